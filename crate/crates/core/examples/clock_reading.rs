//! Clock reading `<phi(t)|T_C|phi(t)>` against `t` for the cyclic clock.

use std::sync::Arc;

use iqc::models::{make_cyclic, CyclicClockSpec};
use iqc::numerics::QuadratureRule;
use iqc::theorems::Suite;
use iqc::Tolerances;

fn main() -> iqc::Result<()> {
    let spec = CyclicClockSpec::new(128, 1.0);
    let model = Arc::new(make_cyclic(spec, spec.full_grid()?)?);
    let suite = Suite::with_defaults(model, &QuadratureRule::clock_default(1.0), Tolerances::default())?;
    for i in -8..=8 {
        let t = 1.25 * i as f64;
        let r = suite.reading(t)?;
        println!("t = {t:+7.3}  reading = {r:+9.5}  error = {:+.3e}", r - t);
    }
    let times: Vec<f64> = (-40..=40).map(|i| 0.25 * i as f64).collect();
    let (worst, at) = suite.reading_error(&times)?;
    println!("max error {worst:.4e} at t = {at}");
    Ok(())
}

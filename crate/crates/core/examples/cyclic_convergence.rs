//! Cyclic clock over several dimensions: the commutator defect shrinks like 1/D.

use std::sync::Arc;

use iqc::models::{make_cyclic, CyclicClockSpec};
use iqc::numerics::QuadratureRule;
use iqc::operators::commutator_expectation;
use iqc::theorems::Suite;
use iqc::{ClockState, Tolerances};
use num_complex::Complex64;

fn main() -> iqc::Result<()> {
    println!("{:>5} {:>14} {:>12}", "D", "|<[T,H]> - i|", "D * error");
    for d in [16, 32, 64, 128] {
        let spec = CyclicClockSpec::new(d, 1.0);
        let grid = spec.full_grid()?;
        let model = Arc::new(make_cyclic(spec, grid)?);
        let suite = Suite::with_defaults(model, &QuadratureRule::clock_default(1.0), Tolerances::default())?;
        let click = ClockState::click(grid, 0)?;
        let comm = commutator_expectation(suite.time_operator(), suite.hamiltonian(), &click)?;
        let err = (comm - Complex64::i()).norm();
        println!("{d:>5} {err:>14.6e} {:>12.4}", err * d as f64);
    }
    Ok(())
}

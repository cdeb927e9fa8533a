//! Piecewise-linear clock: characteristic functions, the kinked derivative, and a few `T_C` entries.

use iqc::charfn::{c, c_dot0_estimate, unitarity_defect_at};
use iqc::models::make_piecewise_linear;
use iqc::numerics::QuadratureRule;
use iqc::operators::build_tc;
use iqc::ClockGrid;

fn main() -> iqc::Result<()> {
    let grid = ClockGrid::symmetric(1.0, 6)?;
    let model = make_piecewise_linear(grid);

    for u in [-0.5, -0.25, 0.0, 0.25, 0.5] {
        println!("u = {u:+.2}  c(0,0) = {:.4}  c(1,0) = {:.4}", c(&model, 0, 0, u)?.re, c(&model, 1, 0, u)?.re);
    }
    println!("unitarity defect at u = 0.5: {:.3}", unitarity_defect_at(&model, 0.5)?);

    let d = c_dot0_estimate(&model, 1);
    println!("dc(1,0)/du at 0: left {:.3}, right {:.3}, kinked = {}", d.left_slope.re, d.right_slope.re, d.kinked);

    let tc = build_tc(&model, &QuadratureRule::clock_default(1.0))?;
    for k in -2..=2 {
        println!("T_C[0,{k:+}] = {:.6}", tc.entry(0, k).re);
    }
    Ok(())
}

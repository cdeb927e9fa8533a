//! Two-component clock with the cosine profile: identities, evolution and the uncertainty bound.

use iqc::charfn::validate_identities;
use iqc::models::{make_two_component, ProfileFunction};
use iqc::numerics::QuadratureRule;
use iqc::operators::{build_hamiltonian, build_tc, evolve, variance};
use iqc::{ClockGrid, ClockState};

fn main() -> iqc::Result<()> {
    let grid = ClockGrid::symmetric(1.0, 12)?;
    let model = make_two_component(grid, ProfileFunction::cosine())?;

    let ids = validate_identities(&model, 33)?;
    println!(
        "{}: unitarity {:.2e}, orthogonality {:.2e}",
        ids.model, ids.max_unitarity_defect, ids.max_orthogonality_defect
    );

    let phi = ClockState::click(grid, 0)?;
    for t in [0.25, 0.5, 1.0, 2.0] {
        let e = evolve(&model, &phi, t)?;
        let (n, w) = e
            .state
            .iter()
            .map(|(n, d)| (n, d.norm_sqr()))
            .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        println!("t = {t:.2}: heaviest click {n} with weight {w:.4}, norm {:.4}", e.state.norm_sqr());
    }

    let tc = build_tc(&model, &QuadratureRule::clock_default(1.0))?;
    let h = build_hamiltonian(&model);
    let (st, sh) = (variance(&tc, &phi)?.sqrt(), variance(&h, &phi)?.sqrt());
    println!("sigma_T = {st:.4} (< {:.4}), sigma_T sigma_H = {:.4}", std::f64::consts::FRAC_1_SQRT_2, st * sh);
    Ok(())
}

mod oracle;

use std::sync::{Arc, OnceLock};

use iqc::charfn::{c, c_dot0, ClockModel};
use iqc::clock::{ClockGrid, ClockState};
use iqc::models::{make_cyclic, make_piecewise_linear, make_two_component, CyclicClockSpec, ProfileFunction};
use iqc::numerics::{integrate, QuadratureRule};
use iqc::operators::{build_hamiltonian, build_tc, evolve, expectation, expectation_tc_dwell, OperatorMatrix};
use num_complex::Complex64;
use proptest::prelude::*;

const HALF: i64 = 8;

struct Fixture {
    model: Arc<dyn ClockModel>,
    tc: OperatorMatrix,
    h: OperatorMatrix,
}

fn fixtures() -> &'static [Fixture] {
    static CELL: OnceLock<Vec<Fixture>> = OnceLock::new();
    CELL.get_or_init(|| {
        let grid = ClockGrid::symmetric(1.0, HALF).unwrap();
        let spec = CyclicClockSpec::new(24, 1.0);
        let models: Vec<Arc<dyn ClockModel>> = vec![
            Arc::new(make_piecewise_linear(grid)),
            Arc::new(make_two_component(grid, ProfileFunction::cosine()).unwrap()),
            Arc::new(make_cyclic(spec, spec.full_grid().unwrap()).unwrap()),
        ];
        models
            .into_iter()
            .map(|model| {
                let tc = build_tc(model.as_ref(), &QuadratureRule::clock_default(1.0)).unwrap();
                let h = build_hamiltonian(model.as_ref());
                Fixture { model, tc, h }
            })
            .collect()
    })
}

fn state(grid: ClockGrid, parts: &[(f64, f64)]) -> ClockState {
    let entries: Vec<_> = grid.indices().zip(parts.iter().map(|&(a, b)| Complex64::new(a, b))).collect();
    ClockState::from_entries(grid, &entries).unwrap()
}

fn parts() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 24)
}

fn nonzero(parts: &[(f64, f64)]) -> bool {
    parts.iter().take(17).any(|&(a, b)| a.abs() + b.abs() > 1e-3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inner_product_is_hermitian_and_positive(a in parts(), b in parts()) {
        let g = ClockGrid::symmetric(1.0, HALF).unwrap();
        let (phi, psi) = (state(g, &a), state(g, &b));
        let ab = phi.inner(&psi).unwrap();
        let ba = psi.inner(&phi).unwrap();
        prop_assert!((ab - ba.conj()).norm() <= 1e-12);
        if nonzero(&a) {
            prop_assert!(phi.inner(&phi).unwrap().re > 0.0);
        }
    }

    #[test]
    fn click_times_are_odd(tau in 1e-3..1e3f64, n in -10_000i64..10_000) {
        let g = ClockGrid::new(tau, -10_000, 10_000).unwrap();
        prop_assert_eq!(g.time(-n), -g.time(n));
    }

    #[test]
    fn shift_identity_is_bitwise(which in 0usize..3, m in -4i64..=4, n in -4i64..=4, r in -4i64..=4, u in -0.5..=0.5f64) {
        let model = fixtures()[which].model.as_ref();
        let a = c(model, m + r, n + r, u).unwrap();
        let b = c(model, m, n, u).unwrap();
        prop_assert_eq!(a.re.to_bits(), b.re.to_bits());
        prop_assert_eq!(a.im.to_bits(), b.im.to_bits());
    }

    #[test]
    fn cyclic_conjugation_identity(m in -11i64..=12, n in -11i64..=12, u in -0.5..=0.5f64) {
        let model = fixtures()[2].model.as_ref();
        let lhs = c(model, m, n, -u).unwrap();
        let rhs = c(model, n, m, u).unwrap().conj();
        prop_assert!((lhs - rhs).norm() <= 1e-13);
    }

    #[test]
    fn finite_support_is_exact(which in 0usize..2, m in -8i64..=8, n in -8i64..=8, u in -0.5..=0.5f64) {
        prop_assume!((m - n).abs() > 1);
        let model = fixtures()[which].model.as_ref();
        prop_assert_eq!(c(model, m, n, u).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn cyclic_click_advances_by_one(n in -8i64..=8) {
        let model = fixtures()[2].model.as_ref();
        let g = *model.grid();
        let out = evolve(model, &ClockState::click(g, n).unwrap(), 1.0).unwrap().state;
        prop_assert!(out.coefficient(n + 1).norm_sqr() >= 1.0 - 1e-12);
    }

    #[test]
    fn time_operator_is_symmetric(which in 0usize..3, a in parts(), b in parts()) {
        let f = &fixtures()[which];
        let g = *f.model.grid();
        let (phi, psi) = (state(g, &a).to_vector(), state(g, &b).to_vector());
        let t = f.tc.matrix();
        let lhs = (t * &phi).dotc(&psi);
        let rhs = phi.dotc(&(t * &psi));
        prop_assert!((lhs - rhs).norm() <= 1e-9);
    }

    #[test]
    fn energy_bound_holds(which in 0usize..3, a in parts()) {
        prop_assume!(nonzero(&a));
        let f = &fixtures()[which];
        let g = *f.model.grid();
        let phi = state(g, &a).normalized().unwrap();
        let span = g.index_max() - g.index_min();
        let bound: f64 = (-span..=span).map(|r| c_dot0(f.model.as_ref(), r).norm()).sum();
        prop_assert!(expectation(&f.h, &phi).unwrap().norm() <= bound + 1e-12);
    }

    #[test]
    fn dwell_form_matches_matrix_form(which in 0usize..3, a in parts()) {
        prop_assume!(nonzero(&a));
        let f = &fixtures()[which];
        let g = *f.model.grid();
        let phi = state(g, &a);
        let quad = QuadratureRule::clock_default(1.0);
        let dwell = expectation_tc_dwell(f.model.as_ref(), &phi, &quad).unwrap();
        let matrix = expectation(&f.tc, &phi).unwrap();
        prop_assert!((dwell - matrix.re).abs() <= 1e-9, "dwell {} matrix {}", dwell, matrix);
        prop_assert!(matrix.im.abs() <= 1e-12);
    }

    #[test]
    fn cyclic_evolution_preserves_norm(a in parts(), t in -30.0..30.0f64) {
        let f = &fixtures()[2];
        let phi = state(*f.model.grid(), &a);
        let e = evolve(f.model.as_ref(), &phi, t).unwrap();
        prop_assert!((e.state.norm_sqr() - phi.norm_sqr()).abs() <= 1e-12 * phi.norm_sqr().max(1.0));
        prop_assert_eq!(e.mass_loss, 0.0);
    }

    #[test]
    fn truncation_loss_is_recorded(a in parts(), t in -3.0..3.0f64) {
        let f = &fixtures()[1];
        let narrow = *f.model.grid();
        let wide = ClockGrid::symmetric(1.0, HALF + 4).unwrap();
        let wide_model = make_two_component(wide, ProfileFunction::cosine()).unwrap();
        let phi = state(narrow, &a);
        let embedded = ClockState::from_entries(wide, &phi.iter().collect::<Vec<_>>()).unwrap();
        let cut = evolve(f.model.as_ref(), &phi, t).unwrap();
        let full = evolve(&wide_model, &embedded, t).unwrap().state;
        let outside: f64 = full.iter().filter(|(n, _)| !narrow.contains(*n)).map(|(_, d)| d.norm_sqr()).sum();
        prop_assert!((cut.mass_loss - outside).abs() <= 1e-12);
        for (n, d) in cut.state.iter() {
            prop_assert_eq!(d, full.coefficient(n));
        }
    }

    #[test]
    fn integrate_is_linear(ar in -3.0..3.0f64, ai in -3.0..3.0f64, b in -3.0..3.0f64, w in 0.1..20.0f64) {
        let rule = QuadratureRule::clock_default(1.0);
        let a = Complex64::new(ar, ai);
        let f = |u: f64| Complex64::from_polar(1.0, -w * u);
        let g = |u: f64| Complex64::new(u * u * u - u, (3.0 * u).sin());
        let lhs = integrate(|u| a * f(u) + g(u) * b, &rule).unwrap().value;
        let rhs = a * integrate(f, &rule).unwrap().value + integrate(g, &rule).unwrap().value * b;
        prop_assert!((lhs - rhs).norm() <= 1e-12);
    }
}

/// `C^{kk} = k tau` on interior clicks of the cyclic clock, cross-checked against the dense oracle.
#[test]
fn diagonal_of_time_operator_is_click_time() {
    let spec = CyclicClockSpec::new(64, 1.0);
    let model = make_cyclic(spec, spec.full_grid().unwrap()).unwrap();
    let tc = build_tc(&model, &QuadratureRule::clock_default(1.0)).unwrap();
    let dense = oracle::DenseClock::new(64, 1.0);
    let t_ref = dense.time_operator();
    let mut worst: f64 = 0.0;
    for k in -8i64..=8 {
        let i = dense.position(k);
        assert!((tc.entry(k, k) - t_ref[(i, i)]).norm() <= 1e-12, "library and dense oracle disagree at k = {k}");
        worst = worst.max((tc.entry(k, k).re - k as f64).abs());
    }
    assert!(worst <= 1e-8, "max |C^kk - k tau| over interior k = {worst:.3e}");
}

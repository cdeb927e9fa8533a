//! Characteristic functions `c^{mn}(u) = <phi_C(tau^m) | phi_C(tau^n + u)>`.
//!
//! A model supplies only the `k = 0` column `c^{n0}(u)`; every other index pair
//! follows from translation invariance, `c^{mn}(u) = c^{m-n,0}(u)`.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;

use crate::clock::ClockGrid;
use crate::error::{Error, Result};
use crate::numerics::{central_diff, tail_estimate, uniform_samples, Derivative, Window, DEFAULT_STEP};
use crate::output::fmt17;

/// Range of differences `n` for which `c^{n0}` can be non-zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Support {
    /// `c^{n0}(u) = 0` for `|n| > R`.
    Finite(u32),
    Unbounded,
}

/// Index window of a periodic (cyclic) click index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CycleWindow {
    pub dimension: usize,
    pub lo: i64,
    pub hi: i64,
}

impl CycleWindow {
    /// Centered window `[-floor((D-1)/2), floor(D/2)]`.
    pub fn centered(dimension: usize) -> Self {
        let d = dimension as i64;
        Self { dimension, lo: -((d - 1) / 2), hi: d / 2 }
    }

    pub fn wrap(&self, n: i64) -> i64 {
        (n - self.lo).rem_euclid(self.dimension as i64) + self.lo
    }

    pub fn contains(&self, n: i64) -> bool {
        (self.lo..=self.hi).contains(&n)
    }
}

/// A source of characteristic functions over the window `[-tau/2, +tau/2]`.
///
/// Implementations must be pure: evaluators may be called concurrently.
pub trait ClockModel: Send + Sync + std::fmt::Debug {
    fn name(&self) -> &str;

    fn grid(&self) -> &ClockGrid;

    /// `c^{n0}(u)` for `|u| <= tau/2`.
    fn c0(&self, n: i64, u: f64) -> Complex64;

    /// Closed-form `d/du c^{n0}(u)` at `u = 0`, when the model has one.
    fn c_dot0_analytic(&self, _n: i64) -> Option<Complex64> {
        None
    }

    fn support(&self) -> Support;

    /// Whether some `c^{n0}` has different one-sided slopes at `u = 0`.
    fn kinked_at_zero(&self) -> bool {
        false
    }

    /// Periodic click index, if the model lives on a finite cycle.
    fn cycle(&self) -> Option<CycleWindow> {
        None
    }

    /// Eigenvalue of `P_C` on click `n`.
    fn click_time(&self, n: i64) -> f64 {
        self.grid().time(n)
    }

    /// True for models that realize an ideal clock exactly (up to round-off).
    fn is_exact(&self) -> bool;

    fn wrap(&self, n: i64) -> i64 {
        self.cycle().map_or(n, |c| c.wrap(n))
    }

    /// Clicks between `n` and the wrap point of the `P_C` readings (cyclic models only).
    fn seam_distance(&self, _n: i64) -> Option<f64> {
        None
    }
}

/// Index range over which sums over the click basis run: the full cycle for
/// cyclic models, the grid otherwise.
pub fn sum_grid(model: &dyn ClockModel) -> ClockGrid {
    match model.cycle() {
        Some(c) => ClockGrid::new(model.grid().tau(), c.lo, c.hi).expect("cycle window contains 0"),
        None => *model.grid(),
    }
}

/// Differences `n` whose `c^{n0}` can be non-zero inside the model's index range.
pub fn difference_range(model: &dyn ClockModel) -> (i64, i64) {
    if let Some(c) = model.cycle() {
        return (c.lo, c.hi);
    }
    let g = model.grid();
    let span = g.index_max() - g.index_min();
    match model.support() {
        Support::Finite(r) => {
            let r = (r as i64).min(span);
            (-r, r)
        }
        Support::Unbounded => (-span, span),
    }
}

fn window_slack(tau: f64) -> f64 {
    1e-12 * tau
}

/// `c^{mn}(u)`, derived from the stored column as `c^{m-n,0}(u)`.
pub fn c(model: &dyn ClockModel, m: i64, n: i64, u: f64) -> Result<Complex64> {
    let tau = model.grid().tau();
    if !Window::clock(tau).contains(u, window_slack(tau)) {
        return Err(Error::OutsideWindow { u, half: 0.5 * tau });
    }
    Ok(c_unchecked(model, m - n, u))
}

/// `c^{n0}(u)` honoring finite support exactly.
pub(crate) fn c_unchecked(model: &dyn ClockModel, n: i64, u: f64) -> Complex64 {
    if let Support::Finite(r) = model.support() {
        if model.cycle().is_none() && n.unsigned_abs() > r as u64 {
            return Complex64::new(0.0, 0.0);
        }
    }
    model.c0(n, u)
}

/// `d/du c^{n0}(u)` at `u = 0`.
pub fn c_dot0(model: &dyn ClockModel, n: i64) -> Complex64 {
    c_dot0_estimate(model, n).value
}

/// Derivative at 0 with one-sided slopes and kink flag. Models without a
/// closed form are differentiated numerically with step `tau * 1e-5`.
pub fn c_dot0_estimate(model: &dyn ClockModel, n: i64) -> Derivative {
    if let Some(value) = model.c_dot0_analytic(n) {
        return Derivative { value, left_slope: value, right_slope: value, kinked: false };
    }
    if let Support::Finite(r) = model.support() {
        if model.cycle().is_none() && n.unsigned_abs() > r as u64 {
            let zero = Complex64::new(0.0, 0.0);
            return Derivative { value: zero, left_slope: zero, right_slope: zero, kinked: false };
        }
    }
    let tau = model.grid().tau();
    central_diff(|u| model.c0(n, u), 0.0, DEFAULT_STEP * tau, Window::clock(tau))
        .expect("default step fits inside the clock window")
}

/// Defects of the characteristic-function identities over sampled `u`.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub model: String,
    pub exact_model: bool,
    pub kinked_at_zero: bool,
    pub samples: usize,
    /// `max |c^{n0}(0) - delta^{n0}|`.
    #[serde(serialize_with = "crate::output::ser17")]
    pub max_orthonormality_defect: f64,
    /// Largest `|sum_n |c^{nk}(u)|^2 - 1|`, row and column forms.
    #[serde(serialize_with = "crate::output::ser17")]
    pub max_unitarity_defect: f64,
    /// Largest `|sum_n conj(c^{nk}(u)) c^{nm}(u)|` for `k != m`, row and column forms.
    #[serde(serialize_with = "crate::output::ser17")]
    pub max_orthogonality_defect: f64,
    /// `max |c^{mn}(-u) - conj(c^{nm}(u))|`.
    #[serde(serialize_with = "crate::output::ser17")]
    pub max_symmetry_defect: f64,
    #[serde(serialize_with = "crate::output::ser17")]
    pub tail_weighted_sum: f64,
    #[serde(serialize_with = "crate::output::ser17")]
    pub derivative_tail: f64,
}

impl IdentityReport {
    pub fn max_defect(&self) -> f64 {
        self.max_orthonormality_defect
            .max(self.max_unitarity_defect)
            .max(self.max_orthogonality_defect)
            .max(self.max_symmetry_defect)
    }
}

/// Probe indices `k, m` for the unitarity sums: `-2..=2`, kept far enough from
/// the truncation edge that finite-support models see their whole support.
fn probe_indices(model: &dyn ClockModel) -> Vec<i64> {
    let g = sum_grid(model);
    let margin = match (model.cycle(), model.support()) {
        (Some(_), _) => 0,
        (None, Support::Finite(r)) => r as i64,
        (None, Support::Unbounded) => 0,
    };
    let lo = (g.index_min() + margin).max(-2);
    let hi = (g.index_max() - margin).min(2);
    if lo > hi {
        vec![0]
    } else {
        (lo..=hi).collect()
    }
}

/// Defects of property c at a single `u`, row and column forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitarityDefect {
    /// `max |sum_n |c^{nk}|^2 - 1|`.
    pub normalization: f64,
    /// `max |sum_n conj(c^{nk}) c^{nm}|` over `k != m`.
    pub orthogonality: f64,
}

/// Normalization part of property c at `u`.
pub fn unitarity_defect_at(model: &dyn ClockModel, u: f64) -> Result<f64> {
    Ok(unitarity_defects_at(model, u)?.normalization)
}

pub fn unitarity_defects_at(model: &dyn ClockModel, u: f64) -> Result<UnitarityDefect> {
    let tau = model.grid().tau();
    if !Window::clock(tau).contains(u, window_slack(tau)) {
        return Err(Error::OutsideWindow { u, half: 0.5 * tau });
    }
    let g = sum_grid(model);
    let probes = probe_indices(model);
    let (dlo, dhi) = (g.index_min() - g.index_max(), g.index_max() - g.index_min());
    let column: Vec<Complex64> = (dlo..=dhi).map(|j| c_unchecked(model, j, u)).collect();
    let at = |j: i64| column[(j - dlo) as usize];
    let mut out = UnitarityDefect { normalization: 0.0, orthogonality: 0.0 };
    for &k in &probes {
        for &m in &probes {
            // columns: sum_n conj(c^{nk}) c^{nm}; rows: sum_n conj(c^{kn}) c^{mn}
            let mut col = Complex64::new(0.0, 0.0);
            let mut row = Complex64::new(0.0, 0.0);
            for n in g.indices() {
                col += at(n - k).conj() * at(n - m);
                row += at(k - n).conj() * at(m - n);
            }
            if k == m {
                let d = (col - 1.0).norm().max((row - 1.0).norm());
                out.normalization = out.normalization.max(d);
            } else {
                out.orthogonality = out.orthogonality.max(col.norm()).max(row.norm());
            }
        }
    }
    Ok(out)
}

/// Check orthonormality, unitarity (property c), the conjugation identity and
/// the weighted tails on `samples` equally spaced points of the window.
pub fn validate_identities(model: &dyn ClockModel, samples: usize) -> Result<IdentityReport> {
    if samples < 3 {
        return Err(Error::Input(format!("need at least 3 u-samples, got {samples}")));
    }
    let tau = model.grid().tau();
    let us = uniform_samples(Window::clock(tau), samples);
    let (dlo, dhi) = difference_range(model);

    let orthonormality = (dlo..=dhi)
        .map(|n| {
            let delta = if n == 0 { 1.0 } else { 0.0 };
            (c_unchecked(model, n, 0.0) - delta).norm()
        })
        .fold(0.0, f64::max);

    let mut unitarity: f64 = 0.0;
    let mut orthogonality: f64 = 0.0;
    let mut symmetry: f64 = 0.0;
    for &u in &us {
        let d = unitarity_defects_at(model, u)?;
        unitarity = unitarity.max(d.normalization);
        orthogonality = orthogonality.max(d.orthogonality);
        for a in dlo..=dhi {
            // c^{mn}(-u) with m - n = a against conj(c^{nm}(u)) with n - m = -a
            let d = (c(model, a, 0, -u)? - c(model, -a, 0, u)?.conj()).norm();
            symmetry = symmetry.max(d);
        }
    }

    let g = sum_grid(model);
    let derivative_tail = g
        .indices()
        .filter(|&n| g.is_edge(n))
        .map(|n| n.unsigned_abs() as f64 * c_dot0(model, n).norm())
        .sum();

    Ok(IdentityReport {
        model: model.name().to_string(),
        exact_model: model.is_exact(),
        kinked_at_zero: model.kinked_at_zero(),
        samples,
        max_orthonormality_defect: orthonormality,
        max_unitarity_defect: unitarity,
        max_orthogonality_defect: orthogonality,
        max_symmetry_defect: symmetry,
        tail_weighted_sum: tail_estimate(model, &us),
        derivative_tail,
    })
}

/// CSV table of `c^{n0}(u)` with columns `n,u,re,im` over the model's index
/// range and `samples` points of the window.
pub fn tabulate_csv(model: &dyn ClockModel, samples: usize) -> String {
    let tau = model.grid().tau();
    let mut out = String::from("n,u,re,im\n");
    for n in sum_grid(model).indices() {
        for u in uniform_samples(Window::clock(tau), samples) {
            let z = c_unchecked(model, n, u);
            let _ = writeln!(out, "{},{},{},{}", n, fmt17(u), fmt17(z.re), fmt17(z.im));
        }
    }
    out
}

/// Heat table `|c^{n0}(u)|` with columns `n,u,abs`.
pub fn magnitude_csv(model: &dyn ClockModel, samples: usize) -> String {
    let tau = model.grid().tau();
    let mut out = String::from("n,u,abs\n");
    for n in sum_grid(model).indices() {
        for u in uniform_samples(Window::clock(tau), samples) {
            let _ = writeln!(out, "{},{},{}", n, fmt17(u), fmt17(c_unchecked(model, n, u).norm()));
        }
    }
    out
}

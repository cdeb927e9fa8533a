//! Hamiltonian, click-time map `P_C` and the averaged time operator `T_C` as
//! dense matrices over the truncated click basis, plus evolution and
//! expectation values.
//!
//! Matrices follow the usual convention: entry `(m, k)` is
//! `<phi_C(tau^m) | A | phi_C(tau^k)>`. For `T_C` this entry is `C^{km}`.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::charfn::{c_dot0, c_unchecked, difference_range, sum_grid, ClockModel, Support};
use crate::clock::{ClockGrid, ClockState};
use crate::error::{Error, Result};
use crate::numerics::QuadratureRule;
use crate::output::{fmt17, num17};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Label {
    H,
    #[serde(rename = "P_C")]
    Pc,
    #[serde(rename = "T_C")]
    Tc,
    Other,
}

impl Label {
    pub fn as_str(&self) -> &'static str {
        match self {
            Label::H => "H",
            Label::Pc => "P_C",
            Label::Tc => "T_C",
            Label::Other => "other",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    label: Label,
    grid: ClockGrid,
    entries: DMatrix<Complex64>,
    hermitian_defect: f64,
    quadrature: Option<QuadratureInfo>,
}

/// Quadrature settings and the worst per-entry error estimate of an assembled `T_C`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureInfo {
    pub nodes_per_panel: usize,
    pub panels: usize,
    #[serde(serialize_with = "crate::output::ser17")]
    pub max_error_estimate: f64,
}

fn hermitian_defect(a: &DMatrix<Complex64>) -> f64 {
    let n = a.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..=i {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

impl OperatorMatrix {
    pub fn new(label: Label, grid: ClockGrid, entries: DMatrix<Complex64>) -> Result<Self> {
        if entries.nrows() != grid.len() || entries.ncols() != grid.len() {
            return Err(Error::Input(format!(
                "matrix is {}x{}, grid has {} clicks",
                entries.nrows(),
                entries.ncols(),
                grid.len()
            )));
        }
        let hermitian_defect = hermitian_defect(&entries);
        Ok(Self { label, grid, entries, hermitian_defect, quadrature: None })
    }

    pub fn label(&self) -> Label {
        self.label
    }

    pub fn grid(&self) -> &ClockGrid {
        &self.grid
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    /// `max |A_mn - conj(A_nm)|`.
    pub fn hermitian_defect(&self) -> f64 {
        self.hermitian_defect
    }

    pub fn quadrature(&self) -> Option<QuadratureInfo> {
        self.quadrature
    }

    /// `<phi_C(tau^m) | A | phi_C(tau^k)>`; zero outside the grid.
    pub fn entry(&self, m: i64, k: i64) -> Complex64 {
        match (self.grid.position(m), self.grid.position(k)) {
            (Some(i), Some(j)) => self.entries[(i, j)],
            _ => Complex64::new(0.0, 0.0),
        }
    }

    pub fn apply(&self, state: &ClockState) -> Result<ClockState> {
        self.check_grid(state)?;
        ClockState::from_vector(self.grid, &(&self.entries * state.to_vector()))
    }

    /// `(A + A^dagger) / 2`.
    pub fn symmetrized(&self) -> Self {
        let entries = (&self.entries + self.entries.adjoint()) * Complex64::new(0.5, 0.0);
        Self { hermitian_defect: hermitian_defect(&entries), entries, ..self.clone() }
    }

    fn check_grid(&self, state: &ClockState) -> Result<()> {
        if *state.grid() != self.grid {
            return Err(Error::Input("state and operator live on different grids".into()));
        }
        Ok(())
    }

    /// Dense CSV with columns `row,col,re,im`, rows and columns labelled by click index.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("row,col,re,im\n");
        for (i, m) in self.grid.indices().enumerate() {
            for (j, k) in self.grid.indices().enumerate() {
                let z = self.entries[(i, j)];
                let _ = writeln!(out, "{},{},{},{}", m, k, fmt17(z.re), fmt17(z.im));
            }
        }
        out
    }

    /// Metadata envelope accompanying the CSV export.
    pub fn envelope(&self, model: &str, data_file: &str) -> Value {
        let mut v = json!({
            "label": self.label.as_str(),
            "model": model,
            "grid": {
                "tau": num17(self.grid.tau()),
                "index_min": self.grid.index_min(),
                "index_max": self.grid.index_max(),
            },
            "hermitian_defect": num17(self.hermitian_defect),
            "convention": "entry (row m, col k) = <phi_C(tau^m)|A|phi_C(tau^k)>",
            "data_file": data_file,
        });
        if let Some(q) = self.quadrature {
            v["quadrature"] = serde_json::to_value(q).expect("quadrature info serializes");
        }
        v
    }
}

/// `H_{mn} = i * cdot^{m-n,0}(0)`.
pub fn build_hamiltonian(model: &dyn ClockModel) -> OperatorMatrix {
    let grid = *model.grid();
    let span = grid.index_max() - grid.index_min();
    let (rlo, rhi) = match (model.cycle(), model.support()) {
        (None, Support::Finite(r)) => (-(r as i64).min(span), (r as i64).min(span)),
        _ => (-span, span),
    };
    let derivs: Vec<Complex64> = (rlo..=rhi).map(|d| c_dot0(model, d)).collect();
    let len = grid.len();
    let entries = DMatrix::from_fn(len, len, |i, j| {
        let d = i as i64 - j as i64;
        if d < rlo || d > rhi {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::i() * derivs[(d - rlo) as usize]
        }
    });
    OperatorMatrix::new(Label::H, grid, entries).expect("dimensions match by construction")
}

/// `diag(n * tau)` over the grid.
pub fn build_pc(grid: ClockGrid) -> OperatorMatrix {
    let diag = DVector::from_iterator(grid.len(), grid.indices().map(|n| Complex64::new(grid.time(n), 0.0)));
    OperatorMatrix::new(Label::Pc, grid, DMatrix::from_diagonal(&diag)).expect("square")
}

/// `P_C` with the model's click readings (differs from [`build_pc`] only at the
/// antipode of an even cyclic clock).
pub fn build_pc_for(model: &dyn ClockModel) -> OperatorMatrix {
    let grid = *model.grid();
    let diag =
        DVector::from_iterator(grid.len(), grid.indices().map(|n| Complex64::new(model.click_time(n), 0.0)));
    OperatorMatrix::new(Label::Pc, grid, DMatrix::from_diagonal(&diag)).expect("square")
}

/// Largest number of panel doublings attempted by [`build_tc`].
pub const MAX_REFINEMENTS: usize = 4;

/// Overlap integrals `G(a, b) = int conj(c^{a0}(u)) c^{b0}(u) du` for all
/// differences `a, b` of the model, laid out row-major over `[dlo, dhi]`.
struct OverlapTable {
    dlo: i64,
    width: usize,
    values: Vec<Complex64>,
}

impl OverlapTable {
    fn new(model: &dyn ClockModel, rule: &QuadratureRule) -> Result<Self> {
        let (dlo, dhi) = difference_range(model);
        let width = (dhi - dlo + 1) as usize;
        let points = rule.points();
        let columns: Vec<Vec<Complex64>> = (dlo..=dhi)
            .map(|a| points.iter().map(|&(u, _)| c_unchecked(model, a, u)).collect())
            .collect();
        for col in &columns {
            if col.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                return Err(Error::Numerics("non-finite characteristic function value".into()));
            }
        }
        let values: Vec<Complex64> = (0..width * width)
            .into_par_iter()
            .map(|idx| {
                let (a, b) = (idx / width, idx % width);
                let (ca, cb) = (&columns[a], &columns[b]);
                let term = |q: usize| ca[q].conj() * cb[q] * points[q].1;
                // mirror nodes summed pairwise
                let n = points.len();
                let mut acc = Complex64::new(0.0, 0.0);
                for q in 0..n / 2 {
                    acc += term(q) + term(n - 1 - q);
                }
                if n % 2 == 1 {
                    acc += term(n / 2);
                }
                acc
            })
            .collect();
        Ok(Self { dlo, width, values })
    }

    fn get(&self, model: &dyn ClockModel, a: i64, b: i64) -> Option<Complex64> {
        let (a, b) = (model.wrap(a) - self.dlo, model.wrap(b) - self.dlo);
        let w = self.width as i64;
        ((0..w).contains(&a) && (0..w).contains(&b)).then(|| self.values[(a * w + b) as usize])
    }
}

/// `C^{km} = tau^-1 sum_n p_n G(k - n, m - n)` for every grid pair, one entry at a time.
fn assemble_tc(model: &dyn ClockModel, table: &OverlapTable) -> DMatrix<Complex64> {
    let grid = *model.grid();
    let sum = sum_grid(model);
    let tau = grid.tau();
    let readings: Vec<(i64, f64)> = sum.indices().map(|n| (n, model.click_time(n))).collect();
    let len = grid.len();
    let columns: Vec<Vec<Complex64>> = (0..len)
        .into_par_iter()
        .map(|j| {
            let k = grid.index_at(j);
            (0..len)
                .map(|i| {
                    let m = grid.index_at(i);
                    let mut acc = Complex64::new(0.0, 0.0);
                    for &(n, p) in &readings {
                        if let Some(g) = table.get(model, k - n, m - n) {
                            acc += g * p;
                        }
                    }
                    acc / tau
                })
                .collect()
        })
        .collect();
    DMatrix::from_fn(len, len, |i, j| columns[j][i])
}

/// Time operator `T_C = tau^-1 int U^+(u) P_C U(u) du` over `[-tau/2, +tau/2]`.
pub fn build_tc(model: &dyn ClockModel, quad: &QuadratureRule) -> Result<OperatorMatrix> {
    build_tc_with(model, quad, &Tolerances::default())
}

pub fn build_tc_with(model: &dyn ClockModel, quad: &QuadratureRule, tol: &Tolerances) -> Result<OperatorMatrix> {
    let tau = model.grid().tau();
    let w = quad.window();
    if w.lo != -0.5 * tau || w.hi != 0.5 * tau {
        return Err(Error::Input(format!(
            "quadrature window [{}, {}] is not [-tau/2, +tau/2] for tau = {tau}",
            w.lo, w.hi
        )));
    }
    let mut rule = quad.clone();
    let mut coarse = assemble_tc(model, &OverlapTable::new(model, &rule)?);
    for _ in 0..=MAX_REFINEMENTS {
        let fine_rule = rule.refined();
        let fine = assemble_tc(model, &OverlapTable::new(model, &fine_rule)?);
        let mut worst: f64 = 0.0;
        let mut converged = true;
        for (a, b) in coarse.iter().zip(fine.iter()) {
            let e = (a - b).norm();
            worst = worst.max(e);
            if e > tol.quadrature * tau + tol.rel * a.norm() {
                converged = false;
            }
        }
        if converged {
            let mut op = OperatorMatrix::new(Label::Tc, *model.grid(), coarse)?;
            op.quadrature = Some(QuadratureInfo {
                nodes_per_panel: rule.nodes_per_panel(),
                panels: rule.panels(),
                max_error_estimate: worst,
            });
            return Ok(op);
        }
        rule = fine_rule;
        coarse = fine;
    }
    Err(Error::Numerics(format!(
        "T_C quadrature did not converge after {MAX_REFINEMENTS} refinements of {} nodes x {} panels",
        quad.nodes_per_panel(),
        quad.panels()
    )))
}

/// Result of [`evolve`]: the evolved state and the probability that left the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Evolution {
    pub state: ClockState,
    pub mass_loss: f64,
}

/// `U(t)` on a state: with `t = k tau + u`, `|u| <= tau/2`,
/// `d'^m = sum_n c^{m-n-k,0}(u) d^n`. Line models truncate at the grid edge
/// (recording the lost mass); cyclic models wrap.
pub fn evolve(model: &dyn ClockModel, state: &ClockState, t: f64) -> Result<Evolution> {
    let grid = *model.grid();
    if *state.grid() != grid {
        return Err(Error::Input("state and model live on different grids".into()));
    }
    if !t.is_finite() {
        return Err(Error::Input(format!("evolution time must be finite, got {t}")));
    }
    let tau = grid.tau();
    let k = (t / tau).round();
    let u = (t - k * tau).clamp(-0.5 * tau, 0.5 * tau);
    let k = k as i64;

    let (lo, hi) = match (model.cycle(), model.support()) {
        (Some(c), _) => (c.lo, c.hi),
        (None, Support::Finite(r)) => (grid.index_min() + k - r as i64, grid.index_max() + k + r as i64),
        (None, Support::Unbounded) => (grid.index_min(), grid.index_max()),
    };
    let (dlo, dhi) = match (model.cycle(), model.support()) {
        (Some(c), _) => (c.lo, c.hi),
        (None, Support::Finite(r)) => (-(r as i64), r as i64),
        (None, Support::Unbounded) => (lo - grid.index_max() - k, hi - grid.index_min() - k),
    };
    let column: Vec<Complex64> = (dlo..=dhi).map(|j| c_unchecked(model, j, u)).collect();

    let mut buffer = vec![Complex64::new(0.0, 0.0); (hi - lo + 1) as usize];
    for (n, d) in state.iter() {
        if d == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (slot, m) in buffer.iter_mut().zip(lo..=hi) {
            let j = model.wrap(m - n - k);
            if (dlo..=dhi).contains(&j) {
                *slot += column[(j - dlo) as usize] * d;
            }
        }
    }
    let mut out = ClockState::zeros(grid);
    let mut inside = Vec::new();
    let mut mass_loss = 0.0;
    for (m, z) in (lo..=hi).zip(buffer) {
        if grid.contains(m) {
            inside.push((m, z));
        } else {
            mass_loss += z.norm_sqr();
        }
    }
    if !inside.is_empty() {
        out = ClockState::from_entries(grid, &inside)?;
    }
    if model.support() == Support::Unbounded && model.cycle().is_none() {
        mass_loss = (state.norm_sqr() - out.norm_sqr()).max(0.0);
    }
    Ok(Evolution { state: out, mass_loss })
}

fn nonzero_norm(state: &ClockState) -> Result<f64> {
    let n2 = state.norm_sqr();
    if n2 == 0.0 {
        Err(Error::Input("expectation value of the zero state".into()))
    } else {
        Ok(n2)
    }
}

/// `<phi|A|phi> / <phi|phi>`.
pub fn expectation(op: &OperatorMatrix, state: &ClockState) -> Result<Complex64> {
    let n2 = nonzero_norm(state)?;
    let v = state.to_vector();
    op.check_grid(state)?;
    Ok(v.dotc(&(op.matrix() * &v)) / n2)
}

/// `<A phi|A phi> / <phi|phi> - |<A>|^2`.
pub fn variance(op: &OperatorMatrix, state: &ClockState) -> Result<f64> {
    variance_flagged(op, state, &Tolerances::default()).map(|(v, _)| v)
}

/// Variance plus a flag telling whether the symmetrized operator had to be
/// used because `op` is not Hermitian within `tol.exact_identity`.
pub fn variance_flagged(op: &OperatorMatrix, state: &ClockState, tol: &Tolerances) -> Result<(f64, bool)> {
    let symmetrize = op.hermitian_defect() > tol.exact_identity;
    let sym;
    let op = if symmetrize {
        sym = op.symmetrized();
        &sym
    } else {
        op
    };
    let n2 = nonzero_norm(state)?;
    op.check_grid(state)?;
    let v = state.to_vector();
    let av = op.matrix() * &v;
    let second = av.norm_squared() / n2;
    let mean = v.dotc(&av) / n2;
    let var = second - mean.norm_sqr();
    if var < -tol.variance_floor * second.max(1.0) {
        return Err(Error::Numerics(format!("negative variance {var}")));
    }
    Ok((var.max(0.0), symmetrize))
}

/// `<phi|T_C H - H T_C|phi> / <phi|phi>`.
pub fn commutator_expectation(tc: &OperatorMatrix, h: &OperatorMatrix, state: &ClockState) -> Result<Complex64> {
    let n2 = nonzero_norm(state)?;
    tc.check_grid(state)?;
    h.check_grid(state)?;
    let v = state.to_vector();
    let th = tc.matrix() * (h.matrix() * &v);
    let ht = h.matrix() * (tc.matrix() * &v);
    Ok(v.dotc(&(th - ht)) / n2)
}

/// `<phi|T_C|phi>` in dwell-time form `tau^-1 sum_n p_n int |d^n(u)|^2 du`,
/// with `d^n(u)` the coefficients of `U(u) phi`.
pub fn expectation_tc_dwell(model: &dyn ClockModel, state: &ClockState, quad: &QuadratureRule) -> Result<f64> {
    expectation_tc_dwell_with(model, state, quad, &Tolerances::default())
}

pub fn expectation_tc_dwell_with(
    model: &dyn ClockModel,
    state: &ClockState,
    quad: &QuadratureRule,
    tol: &Tolerances,
) -> Result<f64> {
    let n2 = nonzero_norm(state)?;
    let tau = model.grid().tau();
    let readings: Vec<f64> = model.grid().indices().map(|n| model.click_time(n)).collect();
    let dwell = |rule: &QuadratureRule| -> Result<f64> {
        let mut acc = 0.0;
        for &(u, w) in rule.points() {
            let evolved = evolve(model, state, u)?.state;
            let weighted: f64 =
                evolved.coefficients().iter().zip(&readings).map(|(d, p)| p * d.norm_sqr()).sum();
            acc += w * weighted;
        }
        Ok(acc / (tau * n2))
    };
    let mut rule = quad.clone();
    let mut coarse = dwell(&rule)?;
    for _ in 0..=MAX_REFINEMENTS {
        let fine_rule = rule.refined();
        let fine = dwell(&fine_rule)?;
        if (coarse - fine).abs() <= tol.quadrature * tau + tol.rel * coarse.abs() {
            return Ok(coarse);
        }
        rule = fine_rule;
        coarse = fine;
    }
    Err(Error::Numerics("dwell-form quadrature did not converge".into()))
}

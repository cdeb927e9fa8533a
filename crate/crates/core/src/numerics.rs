//! Deterministic quadrature, Richardson-extrapolated central differences and
//! truncation-tail estimators.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use crate::charfn::ClockModel;
use crate::error::{Error, Result};

/// Closed interval on which a function may be sampled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl Window {
    /// The averaging window `[-tau/2, +tau/2]`.
    pub fn clock(tau: f64) -> Self {
        Self { lo: -0.5 * tau, hi: 0.5 * tau }
    }

    pub fn contains(&self, x: f64, slack: f64) -> bool {
        x >= self.lo - slack && x <= self.hi + slack
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Composite Gauss–Legendre rule with uniform panels.
///
/// Nodes are placed symmetrically inside every panel, so a rule on a window
/// symmetric about 0 has a node set that is exactly symmetric as well.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    window: Window,
    nodes_per_panel: usize,
    panels: usize,
    boundaries: Vec<f64>,
    points: Vec<(f64, f64)>,
}

/// Value of an integral together with `|value - value on the doubled rule|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: Complex64,
    pub error_estimate: f64,
}

impl QuadratureRule {
    pub const DEFAULT_NODES: usize = 16;
    pub const DEFAULT_PANELS: usize = 4;

    /// Rule on the clock window `[-tau/2, +tau/2]`. The panel count must be even
    /// so that `u = 0` is a panel boundary.
    pub fn clock(tau: f64, nodes_per_panel: usize, panels: usize) -> Result<Self> {
        if panels % 2 != 0 {
            return Err(Error::Config(format!(
                "panel count must be even so that u = 0 is a boundary, got {panels}"
            )));
        }
        Self::on(Window::clock(tau), nodes_per_panel, panels)
    }

    /// Default 16 nodes x 4 panels on the clock window.
    pub fn clock_default(tau: f64) -> Self {
        Self::clock(tau, Self::DEFAULT_NODES, Self::DEFAULT_PANELS).expect("default rule is valid")
    }

    /// Rule on an arbitrary interval with uniformly spaced panel boundaries.
    pub fn on(window: Window, nodes_per_panel: usize, panels: usize) -> Result<Self> {
        if nodes_per_panel < 2 {
            return Err(Error::Config(format!("need at least 2 nodes per panel, got {nodes_per_panel}")));
        }
        if panels == 0 {
            return Err(Error::Config("need at least one panel".into()));
        }
        if !(window.lo.is_finite() && window.hi.is_finite() && window.hi > window.lo) {
            return Err(Error::Config(format!("bad integration window {window:?}")));
        }
        let reference = symmetric_legendre(nodes_per_panel);
        let width = window.width();
        let boundaries: Vec<f64> = (0..=panels)
            .map(|j| match j {
                0 => window.lo,
                j if j == panels => window.hi,
                j => window.lo + width * j as f64 / panels as f64,
            })
            .collect();
        let mut points = Vec::with_capacity(panels * nodes_per_panel);
        for pair in boundaries.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let mid = 0.5 * (a + b);
            let half = 0.5 * (b - a);
            points.extend(reference.iter().map(|&(x, w)| (mid + half * x, half * w)));
        }
        let mut boundaries = boundaries;
        if window.lo == -window.hi {
            let n = points.len();
            for i in n / 2..n {
                let (x, w) = points[n - 1 - i];
                points[i] = (-x, w);
            }
            for j in (panels + 1) / 2..=panels {
                boundaries[j] = -boundaries[panels - j];
            }
        }
        Ok(Self { window, nodes_per_panel, panels, boundaries, points })
    }

    /// Same nodes per panel, twice as many panels.
    pub fn refined(&self) -> Self {
        Self::on(self.window, self.nodes_per_panel, 2 * self.panels).expect("refinement of a valid rule")
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn nodes_per_panel(&self) -> usize {
        self.nodes_per_panel
    }

    pub fn panels(&self) -> usize {
        self.panels
    }

    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    /// `(node, weight)` pairs in increasing node order.
    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    fn apply<F>(&self, f: &F) -> Result<Complex64>
    where
        F: Fn(f64) -> Complex64,
    {
        let mut acc = Complex64::new(0.0, 0.0);
        for &(x, w) in &self.points {
            let y = f(x);
            if !(y.re.is_finite() && y.im.is_finite()) {
                return Err(Error::Numerics(format!("non-finite integrand value at u = {x}")));
            }
            acc += y * w;
        }
        Ok(acc)
    }
}

/// Gauss–Legendre nodes on [-1, 1] with the mirror symmetry enforced bitwise.
fn symmetric_legendre(n: usize) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(NonZeroUsize::new(n).expect("n >= 2"));
    let mut raw: Vec<(f64, f64)> = rule.as_node_weight_pairs().to_vec();
    raw.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out = raw.clone();
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let x = 0.5 * (raw[j].0 - raw[i].0);
        let w = 0.5 * (raw[i].1 + raw[j].1);
        out[i] = (-x, w);
        out[j] = (x, w);
    }
    if n % 2 == 1 {
        out[n / 2].0 = 0.0;
    }
    out
}

/// Integrate `f` with `rule`; the error estimate compares against the doubled rule.
pub fn integrate<F>(f: F, rule: &QuadratureRule) -> Result<Integral>
where
    F: Fn(f64) -> Complex64,
{
    let value = rule.apply(&f)?;
    let fine = rule.refined().apply(&f)?;
    Ok(Integral { value, error_estimate: (value - fine).norm() })
}

/// Derivative estimate with the one-sided slopes used for kink detection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivative {
    /// Richardson-extrapolated symmetric difference.
    pub value: Complex64,
    pub left_slope: Complex64,
    pub right_slope: Complex64,
    pub kinked: bool,
}

/// Relative disagreement of the one-sided slopes above which a kink is flagged.
pub const KINK_THRESHOLD: f64 = 1e-6;

/// Default finite-difference step as a fraction of tau.
pub const DEFAULT_STEP: f64 = 1e-5;

/// One Richardson level on the symmetric difference: `(4 D(h/2) - D(h)) / 3`.
pub fn central_diff<F>(f: F, at: f64, h: f64, window: Window) -> Result<Derivative>
where
    F: Fn(f64) -> Complex64,
{
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Input(format!("finite-difference step must be positive, got {h}")));
    }
    let slack = 1e-12 * window.width();
    if !window.contains(at - 2.0 * h, slack) || !window.contains(at + 2.0 * h, slack) {
        return Err(Error::OutsideWindow { u: at, half: 0.5 * window.width() });
    }
    let f0 = f(at);
    let (fp1, fm1) = (f(at + h), f(at - h));
    let (fp2, fm2) = (f(at + 0.5 * h), f(at - 0.5 * h));

    let d_h = (fp1 - fm1) / (2.0 * h);
    let d_h2 = (fp2 - fm2) / h;
    let value = (d_h2 * 4.0 - d_h) / 3.0;

    let right = ((fp2 - f0) / (0.5 * h)) * 2.0 - (fp1 - f0) / h;
    let left = ((f0 - fm2) / (0.5 * h)) * 2.0 - (f0 - fm1) / h;
    let scale = 1.0f64.max(right.norm()).max(left.norm());
    let kinked = (right - left).norm() > KINK_THRESHOLD * scale;
    Ok(Derivative { value, left_slope: left, right_slope: right, kinked })
}

/// Vector-valued variant of [`central_diff`] (value only).
pub fn central_diff_vector<F>(f: F, at: f64, h: f64) -> DVector<Complex64>
where
    F: Fn(f64) -> DVector<Complex64>,
{
    let d_h = (f(at + h) - f(at - h)) / Complex64::from(2.0 * h);
    let d_h2 = (f(at + 0.5 * h) - f(at - 0.5 * h)) / Complex64::from(h);
    (d_h2 * Complex64::from(4.0) - d_h) / Complex64::from(3.0)
}

/// `count` points spread uniformly over the closed window, endpoints included.
pub fn uniform_samples(window: Window, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![0.5 * (window.lo + window.hi)],
        _ => (0..count)
            .map(|j| match j {
                0 => window.lo,
                j if j == count - 1 => window.hi,
                j => window.lo + window.width() * j as f64 / (count - 1) as f64,
            })
            .collect(),
    }
}

/// Largest edge contribution `sum |n| |c^{n0}(u)|` over the outer 10% of the
/// model's index range, maximized over `u_samples`.
pub fn tail_estimate(model: &dyn ClockModel, u_samples: &[f64]) -> f64 {
    let grid = crate::charfn::sum_grid(model);
    let edge: Vec<i64> = grid.indices().filter(|&n| grid.is_edge(n)).collect();
    u_samples
        .iter()
        .map(|&u| {
            edge.iter()
                .map(|&n| n.unsigned_abs() as f64 * model.c0(n, u).norm())
                .sum::<f64>()
        })
        .fold(0.0, f64::max)
}

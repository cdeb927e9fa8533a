//! Time grid, truncated click index range and states expanded in the click basis.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::output::num17;

/// Click spacing `tau` and the truncated index range `[index_min, index_max]`.
///
/// The time of click `n` is always recomputed as `n * tau`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClockGrid {
    tau: f64,
    index_min: i64,
    index_max: i64,
}

impl ClockGrid {
    pub fn new(tau: f64, index_min: i64, index_max: i64) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::Input(format!("tau must be positive and finite, got {tau}")));
        }
        if index_min > 0 || index_max < 0 {
            return Err(Error::Input(format!(
                "index range must contain 0, got [{index_min}, {index_max}]"
            )));
        }
        Ok(Self { tau, index_min, index_max })
    }

    /// Symmetric grid `[-half_width, +half_width]`.
    pub fn symmetric(tau: f64, half_width: i64) -> Result<Self> {
        Self::new(tau, -half_width, half_width)
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn index_min(&self) -> i64 {
        self.index_min
    }

    pub fn index_max(&self) -> i64 {
        self.index_max
    }

    /// Click time `tau^n = n * tau`.
    pub fn time(&self, n: i64) -> f64 {
        n as f64 * self.tau
    }

    pub fn len(&self) -> usize {
        (self.index_max - self.index_min + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, n: i64) -> bool {
        (self.index_min..=self.index_max).contains(&n)
    }

    /// Storage position of index `n`.
    pub fn position(&self, n: i64) -> Option<usize> {
        self.contains(n).then(|| (n - self.index_min) as usize)
    }

    pub fn index_at(&self, position: usize) -> i64 {
        self.index_min + position as i64
    }

    pub fn indices(&self) -> impl Iterator<Item = i64> + Clone {
        self.index_min..=self.index_max
    }

    /// Number of indices counted as "edge" at each end: 10% of the range, at least one.
    pub fn edge_width(&self) -> usize {
        self.len().div_ceil(10).max(1)
    }

    pub fn is_edge(&self, n: i64) -> bool {
        let w = self.edge_width() as i64;
        self.contains(n) && (n < self.index_min + w || n > self.index_max - w)
    }

    /// The theorem checks refuse grids with fewer than four clicks on either side of 0.
    pub fn check_theorem_size(&self) -> Result<()> {
        if self.index_min > -4 || self.index_max < 4 {
            Err(Error::GridTooSmall { min: self.index_min, max: self.index_max })
        } else {
            Ok(())
        }
    }
}

/// Coefficients `d^n` of a state over the truncated click basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ClockState {
    grid: ClockGrid,
    coefficients: Vec<Complex64>,
}

/// Summability diagnostics for a truncated state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MembershipDiagnostic {
    #[serde(serialize_with = "crate::output::ser17")]
    pub norm: f64,
    /// `sum |n| |d^n|`.
    #[serde(serialize_with = "crate::output::ser17")]
    pub weighted_seminorm: f64,
    /// `sum |d^n|^2` over the edge indices at both ends of the range.
    #[serde(serialize_with = "crate::output::ser17")]
    pub boundary_mass: f64,
}

impl ClockState {
    pub fn zeros(grid: ClockGrid) -> Self {
        Self { grid, coefficients: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    /// The click state `phi_C(tau^n)`.
    pub fn click(grid: ClockGrid, n: i64) -> Result<Self> {
        Self::from_entries(grid, &[(n, Complex64::new(1.0, 0.0))])
    }

    /// State with exactly the given coefficients and zeros elsewhere.
    pub fn from_entries(grid: ClockGrid, entries: &[(i64, Complex64)]) -> Result<Self> {
        let mut state = Self::zeros(grid);
        let mut seen = vec![false; grid.len()];
        for &(n, d) in entries {
            let pos = grid.position(n).ok_or(Error::IndexOutOfRange {
                index: n,
                min: grid.index_min(),
                max: grid.index_max(),
            })?;
            if seen[pos] {
                return Err(Error::Input(format!("duplicate index {n}")));
            }
            seen[pos] = true;
            state.coefficients[pos] = d;
        }
        Ok(state)
    }

    pub fn from_vector(grid: ClockGrid, v: &DVector<Complex64>) -> Result<Self> {
        if v.len() != grid.len() {
            return Err(Error::Input(format!(
                "vector length {} does not match grid length {}",
                v.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, coefficients: v.iter().copied().collect() })
    }

    /// Normalized pseudo-random state supported on the central half of the grid.
    pub fn random_interior(grid: ClockGrid, seed: u64) -> Result<Self> {
        let reach = grid.index_min().abs().min(grid.index_max()) / 2;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let entries: Vec<_> = (-reach..=reach)
            .map(|n| (n, Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))))
            .collect();
        Self::from_entries(grid, &entries)?.normalized()
    }

    pub fn grid(&self) -> &ClockGrid {
        &self.grid
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn coefficient(&self, n: i64) -> Complex64 {
        self.grid.position(n).map_or(Complex64::new(0.0, 0.0), |p| self.coefficients[p])
    }

    /// `(n, d^n)` pairs in increasing index order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.grid.indices().zip(self.coefficients.iter().copied())
    }

    pub fn to_vector(&self) -> DVector<Complex64> {
        DVector::from_column_slice(&self.coefficients)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn weighted_seminorm(&self) -> f64 {
        self.iter().map(|(n, d)| n.unsigned_abs() as f64 * d.norm()).sum()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }

    /// Scalar product `<self|other>`, antilinear in `self`.
    pub fn inner(&self, other: &ClockState) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(Error::Input("states live on different grids".into()));
        }
        Ok(self.coefficients.iter().zip(&other.coefficients).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn normalized(mut self) -> Result<Self> {
        let norm = self.norm();
        if norm == 0.0 {
            return Err(Error::Input("cannot normalize the zero state".into()));
        }
        self.coefficients.iter_mut().for_each(|c| *c /= norm);
        Ok(self)
    }

    pub fn membership(&self) -> MembershipDiagnostic {
        let boundary_mass = self
            .iter()
            .filter(|(n, _)| self.grid.is_edge(*n))
            .map(|(_, d)| d.norm_sqr())
            .sum();
        MembershipDiagnostic {
            norm: self.norm(),
            weighted_seminorm: self.weighted_seminorm(),
            boundary_mass,
        }
    }

    /// JSON array of `[index, re, im]` triples with strictly increasing indices.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.iter()
                .map(|(n, d)| Value::Array(vec![Value::from(n), num17(d.re), num17(d.im)]))
                .collect(),
        )
    }

    pub fn from_json(grid: ClockGrid, value: &Value) -> Result<Self> {
        let items = value
            .as_array()
            .ok_or_else(|| Error::Input("state JSON must be an array".into()))?;
        let mut entries = Vec::with_capacity(items.len());
        let mut last: Option<i64> = None;
        for item in items {
            let triple = item.as_array().filter(|t| t.len() == 3).ok_or_else(|| {
                Error::Input(format!("expected [index, re, im], got {item}"))
            })?;
            let n = triple[0]
                .as_i64()
                .ok_or_else(|| Error::Input(format!("bad index {}", triple[0])))?;
            let re = triple[1].as_f64().ok_or_else(|| Error::Input("bad real part".into()))?;
            let im = triple[2].as_f64().ok_or_else(|| Error::Input("bad imaginary part".into()))?;
            if last.is_some_and(|l| n <= l) {
                return Err(Error::Input(format!("indices must be strictly increasing at {n}")));
            }
            last = Some(n);
            entries.push((n, Complex64::new(re, im)));
        }
        Self::from_entries(grid, &entries)
    }
}

//! Concrete clock models: the two-component profile clock, its piecewise-linear
//! approximation, and an exactly unitary clock on a finite cycle.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::charfn::{ClockModel, CycleWindow, Support};
use crate::clock::ClockGrid;
use crate::error::{Error, Result};

type ProfileFn = dyn Fn(f64) -> Complex64 + Send + Sync;

/// Profile `g` of a two-component clock, evaluated at the scaled time
/// `s = t / tau` on `[-1, 1]`.
#[derive(Clone)]
pub struct ProfileFunction {
    name: String,
    g: Arc<ProfileFn>,
    differentiable_at_zero: bool,
}

impl fmt::Debug for ProfileFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProfileFunction")
            .field("name", &self.name)
            .field("differentiable_at_zero", &self.differentiable_at_zero)
            .finish()
    }
}

/// Number of sample points on `[0, tau]` used to validate a profile.
pub const PROFILE_SAMPLES: usize = 65;

impl ProfileFunction {
    pub fn new<F>(name: impl Into<String>, differentiable_at_zero: bool, g: F) -> Self
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        Self { name: name.into(), g: Arc::new(g), differentiable_at_zero }
    }

    /// `g(t) = cos(pi t / (2 tau))`.
    pub fn cosine() -> Self {
        Self::new("cos", true, |s| Complex64::new((0.5 * PI * s).cos(), 0.0))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn differentiable_at_zero(&self) -> bool {
        self.differentiable_at_zero
    }

    /// `g` at scaled time `s = t / tau`.
    pub fn eval(&self, s: f64) -> Complex64 {
        (self.g)(s)
    }

    /// `g(0) = 1`, `g(+-1) = 0`, `|g(-s)| = |g(s)|` and
    /// `|g(s)|^2 + |g(s - 1)|^2 = 1` on [`PROFILE_SAMPLES`] points of `[0, 1]`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let fail = |what: String| Err(Error::Model(format!("profile '{}': {what}", self.name)));
        if (self.eval(0.0) - 1.0).norm() > tol {
            return fail(format!("g(0) = {} instead of 1", self.eval(0.0)));
        }
        for end in [-1.0, 1.0] {
            if self.eval(end).norm() > tol {
                return fail(format!("g({end} tau) = {} instead of 0", self.eval(end)));
            }
        }
        for j in 0..PROFILE_SAMPLES {
            let s = j as f64 / (PROFILE_SAMPLES - 1) as f64;
            let (gp, gm) = (self.eval(s), self.eval(-s));
            if !(gp.re.is_finite() && gp.im.is_finite() && gm.re.is_finite() && gm.im.is_finite()) {
                return fail(format!("non-finite value at {s} tau"));
            }
            if (gp.norm() - gm.norm()).abs() > tol {
                return fail(format!("|g(-t)| != |g(t)| at t = {s} tau"));
            }
            let partition = gp.norm_sqr() + self.eval(s - 1.0).norm_sqr();
            if (partition - 1.0).abs() > tol {
                return fail(format!(
                    "|g(t)|^2 + |g(t - tau)|^2 = {partition} instead of 1 at t = {s} tau"
                ));
            }
        }
        Ok(())
    }
}

/// Two-component clock: inside one click interval the curve has the components
/// `g(u)` on the current click and `g(u -+ tau)` on its neighbour.
#[derive(Debug, Clone)]
pub struct TwoComponentModel {
    name: String,
    grid: ClockGrid,
    profile: ProfileFunction,
}

pub fn make_two_component(grid: ClockGrid, profile: ProfileFunction) -> Result<TwoComponentModel> {
    profile.validate(crate::tolerance::Tolerances::default().profile)?;
    Ok(TwoComponentModel { name: format!("two-component-{}", profile.name()), grid, profile })
}

impl TwoComponentModel {
    pub fn profile(&self) -> &ProfileFunction {
        &self.profile
    }
}

impl ClockModel for TwoComponentModel {
    fn name(&self) -> &str {
        &self.name
    }

    fn grid(&self) -> &ClockGrid {
        &self.grid
    }

    fn c0(&self, n: i64, u: f64) -> Complex64 {
        let s = u / self.grid.tau();
        match n {
            0 => self.profile.eval(s),
            1 if s >= 0.0 => self.profile.eval(s - 1.0),
            -1 if s < 0.0 => self.profile.eval(s + 1.0),
            _ => Complex64::new(0.0, 0.0),
        }
    }

    fn support(&self) -> Support {
        Support::Finite(1)
    }

    // the neighbour component switches on at u = 0 with a non-zero slope
    fn kinked_at_zero(&self) -> bool {
        true
    }

    fn is_exact(&self) -> bool {
        false
    }
}

/// Linear interpolation between neighbouring clicks; not norm preserving.
#[derive(Debug, Clone)]
pub struct PiecewiseLinearModel {
    grid: ClockGrid,
}

pub fn make_piecewise_linear(grid: ClockGrid) -> PiecewiseLinearModel {
    PiecewiseLinearModel { grid }
}

impl ClockModel for PiecewiseLinearModel {
    fn name(&self) -> &str {
        "piecewise-linear"
    }

    fn grid(&self) -> &ClockGrid {
        &self.grid
    }

    fn c0(&self, n: i64, u: f64) -> Complex64 {
        let s = u / self.grid.tau();
        let v = match n {
            0 => 1.0 - s.abs(),
            1 if s >= 0.0 => s,
            -1 if s < 0.0 => -s,
            _ => 0.0,
        };
        Complex64::new(v, 0.0)
    }

    fn support(&self) -> Support {
        Support::Finite(1)
    }

    fn kinked_at_zero(&self) -> bool {
        true
    }

    fn is_exact(&self) -> bool {
        false
    }
}

/// Placement of the cyclic clock's energy levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrequencyConvention {
    /// `k in {-floor((D-1)/2), ..., floor(D/2)}`.
    #[default]
    Centered,
    /// `k in {0, ..., D-1}`.
    NonNegative,
}

/// Finite cyclic clock: `D` levels `omega_k = 2 pi k / (D tau)` so that
/// evolution by `tau` advances the click index by one, modulo `D`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CyclicClockSpec {
    pub dimension: usize,
    pub tau: f64,
    #[serde(default)]
    pub frequencies: FrequencyConvention,
}

impl CyclicClockSpec {
    pub fn new(dimension: usize, tau: f64) -> Self {
        Self { dimension, tau, frequencies: FrequencyConvention::Centered }
    }

    /// Inclusive range of the integer labels `k`.
    pub fn level_range(&self) -> (i64, i64) {
        let d = self.dimension as i64;
        match self.frequencies {
            FrequencyConvention::Centered => (-((d - 1) / 2), d / 2),
            FrequencyConvention::NonNegative => (0, d - 1),
        }
    }

    pub fn frequencies(&self) -> Vec<f64> {
        let (a, b) = self.level_range();
        (a..=b).map(|k| self.omega(k)).collect()
    }

    pub fn omega(&self, k: i64) -> f64 {
        2.0 * PI * k as f64 / (self.dimension as f64 * self.tau)
    }

    /// Grid covering the whole centered cycle.
    pub fn full_grid(&self) -> Result<ClockGrid> {
        let w = CycleWindow::centered(self.dimension);
        ClockGrid::new(self.tau, w.lo, w.hi)
    }
}

#[derive(Debug, Clone)]
pub struct CyclicModel {
    spec: CyclicClockSpec,
    grid: ClockGrid,
    window: CycleWindow,
    name: String,
}

pub fn make_cyclic(spec: CyclicClockSpec, grid: ClockGrid) -> Result<CyclicModel> {
    if !(spec.tau.is_finite() && spec.tau > 0.0) {
        return Err(Error::Config(format!("tau must be positive, got {}", spec.tau)));
    }
    if grid.len() > spec.dimension {
        return Err(Error::Config(format!(
            "grid of {} clicks is wider than the cycle D = {}",
            grid.len(),
            spec.dimension
        )));
    }
    if spec.dimension < 8 {
        return Err(Error::Config(format!("cyclic clock needs D >= 8, got {}", spec.dimension)));
    }
    if spec.tau != grid.tau() {
        return Err(Error::Config(format!("grid tau {} differs from clock tau {}", grid.tau(), spec.tau)));
    }
    let window = CycleWindow::centered(spec.dimension);
    if !window.contains(grid.index_min()) || !window.contains(grid.index_max()) {
        return Err(Error::Config(format!(
            "grid [{}, {}] must lie inside the centered cycle window [{}, {}]",
            grid.index_min(),
            grid.index_max(),
            window.lo,
            window.hi
        )));
    }
    Ok(CyclicModel { spec, grid, window, name: format!("cyclic-D{}", spec.dimension) })
}

impl CyclicModel {
    pub fn spec(&self) -> &CyclicClockSpec {
        &self.spec
    }

    pub fn window(&self) -> CycleWindow {
        self.window
    }

    /// Index whose `P_C` eigenvalue is pinned to 0 for even `D`.
    pub fn antipode(&self) -> Option<i64> {
        (self.spec.dimension % 2 == 0).then_some(self.window.hi)
    }

    /// Distance (in clicks) from `n` to the place where the `P_C` sawtooth wraps.
    pub fn seam_distance(&self, n: i64) -> f64 {
        let n = self.window.wrap(n);
        if self.spec.dimension % 2 == 0 {
            ((self.window.hi - n).min(n - self.window.lo + 1)) as f64
        } else {
            ((self.window.hi - n).min(n - self.window.lo)) as f64 + 0.5
        }
    }
}

impl ClockModel for CyclicModel {
    fn name(&self) -> &str {
        &self.name
    }

    fn grid(&self) -> &ClockGrid {
        &self.grid
    }

    /// Closed form of `(1/D) sum_k exp(-i omega_k u) exp(2 pi i k n / D)`:
    /// a Dirichlet kernel in `x = n - u / tau`.
    fn c0(&self, n: i64, u: f64) -> Complex64 {
        let d = self.spec.dimension as f64;
        let (a, b) = self.spec.level_range();
        let x = self.window.wrap(n) as f64 - u / self.spec.tau;
        if x == 0.0 {
            return Complex64::new(1.0, 0.0);
        }
        // sin(pi x) with the integer part removed first for accuracy
        let r = x.round();
        let sign = if (r as i64) % 2 == 0 { 1.0 } else { -1.0 };
        let num = sign * (PI * (x - r)).sin();
        let den = d * (PI * x / d).sin();
        let phase = Complex64::from_polar(1.0, PI * (a + b) as f64 * x / d);
        phase * (num / den)
    }

    fn c_dot0_analytic(&self, n: i64) -> Option<Complex64> {
        let d = self.spec.dimension as f64;
        let (a, b) = self.spec.level_range();
        let sum: Complex64 = (a..=b)
            .map(|k| {
                let phase = Complex64::from_polar(1.0, 2.0 * PI * (k * n) as f64 / d);
                Complex64::new(0.0, -self.spec.omega(k)) * phase
            })
            .sum();
        Some(sum / d)
    }

    fn support(&self) -> Support {
        Support::Unbounded
    }

    fn cycle(&self) -> Option<CycleWindow> {
        Some(self.window)
    }

    /// Sawtooth `n tau` over the centered window; 0 at the antipode of an even cycle.
    fn click_time(&self, n: i64) -> f64 {
        let n = self.window.wrap(n);
        if Some(n) == self.antipode() {
            0.0
        } else {
            n as f64 * self.spec.tau
        }
    }

    fn is_exact(&self) -> bool {
        true
    }

    fn seam_distance(&self, n: i64) -> Option<f64> {
        Some(CyclicModel::seam_distance(self, n))
    }
}

/// Model selection as it appears in configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelKind {
    #[serde(rename = "two-component-cos")]
    TwoComponentCos,
    #[serde(rename = "piecewise-linear")]
    PiecewiseLinear,
    #[serde(rename = "cyclic")]
    Cyclic,
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two-component-cos" => Ok(Self::TwoComponentCos),
            "piecewise-linear" => Ok(Self::PiecewiseLinear),
            "cyclic" => Ok(Self::Cyclic),
            other => Err(Error::Config(format!(
                "unknown model '{other}' (expected two-component-cos, piecewise-linear or cyclic)"
            ))),
        }
    }
}

/// `[model]` section of a run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub model: ModelKind,
    #[serde(default = "default_tau")]
    pub tau: f64,
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index_min: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index_max: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frequencies: Option<FrequencyConvention>,
}

fn default_tau() -> f64 {
    1.0
}

/// Half width of the default grid for the line models.
pub const DEFAULT_HALF_WIDTH: i64 = 8;

/// Dimension of the default cyclic clock.
pub const DEFAULT_DIMENSION: usize = 16;

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            model: ModelKind::PiecewiseLinear,
            tau: 1.0,
            dimension: None,
            index_min: None,
            index_max: None,
            frequencies: None,
        }
    }
}

impl ModelConfig {
    pub fn grid(&self) -> Result<ClockGrid> {
        let (dmin, dmax) = match self.model {
            ModelKind::Cyclic => {
                let w = CycleWindow::centered(self.dimension.unwrap_or(DEFAULT_DIMENSION));
                (w.lo, w.hi)
            }
            _ => (-DEFAULT_HALF_WIDTH, DEFAULT_HALF_WIDTH),
        };
        ClockGrid::new(self.tau, self.index_min.unwrap_or(dmin), self.index_max.unwrap_or(dmax))
            .map_err(|e| Error::Config(e.to_string()))
    }

    pub fn build(&self) -> Result<Arc<dyn ClockModel>> {
        if self.model != ModelKind::Cyclic && (self.dimension.is_some() || self.frequencies.is_some()) {
            return Err(Error::Config("D and frequencies apply to the cyclic model only".into()));
        }
        let grid = self.grid()?;
        Ok(match self.model {
            ModelKind::TwoComponentCos => Arc::new(make_two_component(grid, ProfileFunction::cosine())?),
            ModelKind::PiecewiseLinear => Arc::new(make_piecewise_linear(grid)),
            ModelKind::Cyclic => {
                let spec = CyclicClockSpec {
                    dimension: self.dimension.unwrap_or(DEFAULT_DIMENSION),
                    tau: self.tau,
                    frequencies: self.frequencies.unwrap_or_default(),
                };
                Arc::new(make_cyclic(spec, grid)?)
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn grid() -> ClockGrid {
        ClockGrid::symmetric(1.0, 8).unwrap()
    }

    #[test]
    fn cosine_profile_values() {
        let m = make_two_component(grid(), ProfileFunction::cosine()).unwrap();
        assert_abs_diff_eq!(m.c0(0, 0.25).re, (PI / 8.0).cos(), epsilon = 1e-15);
        assert_abs_diff_eq!(m.c0(1, 0.25).re, (PI / 8.0).sin(), epsilon = 1e-15);
        assert_abs_diff_eq!(m.c0(0, 0.25).re, 0.92388, epsilon = 1e-5);
        assert_abs_diff_eq!(m.c0(1, 0.25).re, 0.38268, epsilon = 1e-5);
        assert_eq!(m.c0(-1, 0.25), Complex64::new(0.0, 0.0));
        assert_abs_diff_eq!(m.c0(-1, -0.25).re, (PI / 8.0).sin(), epsilon = 1e-15);
        assert_abs_diff_eq!(m.c0(1, 0.5).re, (PI / 4.0).sin(), epsilon = 1e-15);
    }

    #[test]
    fn clicks_are_orthonormal_at_zero() {
        let m = make_two_component(grid(), ProfileFunction::cosine()).unwrap();
        let p = make_piecewise_linear(grid());
        for n in -3..=3 {
            let delta = if n == 0 { 1.0 } else { 0.0 };
            assert_abs_diff_eq!((m.c0(n, 0.0) - delta).norm(), 0.0, epsilon = 1e-15);
            assert_eq!(p.c0(n, 0.0), Complex64::new(delta, 0.0));
        }
    }

    #[test]
    fn linear_profile_violates_partition() {
        let linear = ProfileFunction::new("linear", false, |s: f64| Complex64::new(1.0 - s.abs(), 0.0));
        let err = make_two_component(grid(), linear).unwrap_err();
        assert!(matches!(err, Error::Model(_)), "{err}");
        assert!(err.to_string().contains("instead of 1"), "{err}");
    }

    #[test]
    fn profile_invariants_are_checked() {
        let shifted = ProfileFunction::new("bad-origin", true, |s: f64| Complex64::new((0.5 * PI * (s + 0.1)).cos(), 0.0));
        assert!(shifted.validate(1e-8).is_err());
        let complex = ProfileFunction::new("phase", true, |s: f64| {
            Complex64::from_polar((0.5 * PI * s).cos(), 0.3 * s)
        });
        assert!(complex.validate(1e-8).is_ok());
    }

    #[test]
    fn piecewise_linear_values() {
        let p = make_piecewise_linear(grid());
        assert_eq!(p.c0(0, 0.5).re, 0.5);
        assert_eq!(p.c0(1, 0.5).re, 0.5);
        assert_eq!(p.c0(-1, -0.5).re, 0.5);
        let norm2: f64 = (-1..=1).map(|n| p.c0(n, 0.5).norm_sqr()).sum();
        assert_eq!(norm2, 0.5);
        assert!(p.kinked_at_zero());
    }

    #[test]
    fn cyclic_configuration_rules() {
        let spec = CyclicClockSpec::new(8, 1.0);
        assert!(make_cyclic(spec, spec.full_grid().unwrap()).is_ok());
        let wide = ClockGrid::symmetric(1.0, 8).unwrap();
        assert!(matches!(make_cyclic(spec, wide), Err(Error::Config(_))));
        assert!(matches!(make_cyclic(CyclicClockSpec::new(4, 1.0), ClockGrid::symmetric(1.0, 1).unwrap()), Err(Error::Config(_))));
        let off = ClockGrid::new(1.0, -4, 3).unwrap();
        assert!(make_cyclic(spec, off).is_err());
    }

    #[test]
    fn cyclic_frequencies_are_cyclic() {
        let spec = CyclicClockSpec::new(8, 1.0);
        for w in spec.frequencies() {
            let z = Complex64::new(0.0, -w * spec.tau * 8.0).exp();
            assert_abs_diff_eq!((z - 1.0).norm(), 0.0, epsilon = 1e-13);
        }
        assert_eq!(spec.level_range(), (-3, 4));
    }

    #[test]
    fn cyclic_closed_form_matches_direct_sum() {
        for conv in [FrequencyConvention::Centered, FrequencyConvention::NonNegative] {
            for dim in [8usize, 9, 16] {
                let spec = CyclicClockSpec { dimension: dim, tau: 1.3, frequencies: conv };
                let m = make_cyclic(spec, spec.full_grid().unwrap()).unwrap();
                let (a, b) = spec.level_range();
                for n in -12..=12 {
                    for u in [-0.65, -0.2, 0.0, 1e-9, 0.37, 0.65] {
                        let direct: Complex64 = (a..=b)
                            .map(|k| {
                                Complex64::new(0.0, -spec.omega(k) * u).exp()
                                    * Complex64::new(0.0, 2.0 * PI * (k * n) as f64 / dim as f64).exp()
                            })
                            .sum::<Complex64>()
                            / dim as f64;
                        assert_abs_diff_eq!((m.c0(n, u) - direct).norm(), 0.0, epsilon = 1e-13);
                    }
                }
            }
        }
    }

    #[test]
    fn cyclic_sawtooth() {
        let spec = CyclicClockSpec::new(8, 0.5);
        let m = make_cyclic(spec, spec.full_grid().unwrap()).unwrap();
        assert_eq!(m.click_time(3), 1.5);
        assert_eq!(m.click_time(-3), -1.5);
        assert_eq!(m.click_time(4), 0.0);
        assert_eq!(m.click_time(5), -1.5);
        assert_eq!(m.seam_distance(0), 4.0);
        assert_eq!(m.seam_distance(4), 0.0);
        assert_eq!(m.seam_distance(-3), 1.0);
        let odd = CyclicClockSpec::new(9, 1.0);
        let m = make_cyclic(odd, odd.full_grid().unwrap()).unwrap();
        assert_eq!(m.click_time(4), 4.0);
        assert_eq!(m.click_time(-4), -4.0);
        assert_eq!(m.seam_distance(0), 4.5);
    }

    #[test]
    fn config_builds_models() {
        let cfg: ModelConfig = toml::from_str("model = \"cyclic\"\nD = 16\n").unwrap();
        let m = cfg.build().unwrap();
        assert_eq!(m.grid().index_min(), -7);
        assert_eq!(m.grid().index_max(), 8);
        let cfg: ModelConfig = toml::from_str("model = \"two-component-cos\"\ntau = 2.0").unwrap();
        assert_eq!(cfg.build().unwrap().grid().len(), 17);
        assert!(toml::from_str::<ModelConfig>("model = \"cyclic\"\nbogus = 1").is_err());
        let cfg = ModelConfig { model: ModelKind::Cyclic, dimension: Some(4), index_min: Some(-8), index_max: Some(8), ..Default::default() };
        assert!(matches!(cfg.build(), Err(Error::Config(_))));
        let cfg = ModelConfig { dimension: Some(16), ..Default::default() };
        assert!(cfg.build().is_err());
        assert!("sundial".parse::<ModelKind>().is_err());
    }
}

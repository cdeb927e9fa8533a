//! Central tolerance configuration.
//!
//! Every numerical comparison in the crate takes its thresholds from a
//! [`Tolerances`] value; nothing compares floats against a literal.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Absolute part of the generic abs + rel comparison.
    pub abs: f64,
    /// Relative part of the generic abs + rel comparison.
    pub rel: f64,
    /// Identities that hold exactly for exact clock models (scaled by tau where
    /// the quantity carries time units).
    pub exact_identity: f64,
    /// Characteristic-function identities of exactly unitary models.
    pub charfn_identity: f64,
    /// Accepted quadrature error estimate per operator entry (times tau).
    pub quadrature: f64,
    /// Partition-of-unity check for profile functions.
    pub profile: f64,
    /// |norm - 1| allowed for a state treated as normalized.
    pub normalization: f64,
    /// Finite-size bound for |<[T_C, H]> - i|.
    pub commutator_finite_size: f64,
    /// Finite-size bound for |reading(t) - t| in units of tau.
    pub reading_finite_size: f64,
    /// Slack below 1/2 accepted for the uncertainty product.
    pub uncertainty_slack: f64,
    /// Negative slack accepted for a variance before it is reported as an error.
    pub variance_floor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            abs: 1e-10,
            rel: 1e-8,
            exact_identity: 1e-8,
            charfn_identity: 1e-12,
            quadrature: 1e-10,
            profile: 1e-8,
            normalization: 1e-12,
            commutator_finite_size: 0.05,
            reading_finite_size: 0.02,
            uncertainty_slack: 1e-6,
            variance_floor: 1e-12,
        }
    }
}

impl Tolerances {
    /// `|a - b| <= abs + rel * max(|a|, |b|)`.
    pub fn close(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.abs + self.rel * a.abs().max(b.abs())
    }

    pub fn close_complex(&self, a: num_complex::Complex64, b: num_complex::Complex64) -> bool {
        (a - b).norm() <= self.abs + self.rel * a.norm().max(b.norm())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn default_pair() {
        let t = Tolerances::default();
        assert_eq!(t.abs, 1e-10);
        assert_eq!(t.rel, 1e-8);
        assert!(t.close(1.0, 1.0 + 5e-9));
        assert!(!t.close(1.0, 1.0 + 5e-8));
        assert!(t.close(0.0, 5e-11));
        assert!(t.close_complex(Complex64::new(0.0, 1.0), Complex64::new(0.0, 1.0 + 1e-9)));
    }

    #[test]
    fn partial_override_from_toml() {
        let t: Tolerances = toml::from_str("abs = 1e-6").unwrap();
        assert_eq!(t.abs, 1e-6);
        assert_eq!(t.rel, 1e-8);
        assert!(toml::from_str::<Tolerances>("bogus = 1.0").is_err());
    }
}

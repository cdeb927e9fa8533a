//! Dense brute-force references for the cyclic clock, built without the
//! library's characteristic functions or quadrature.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use std::f64::consts::PI;

pub struct DenseClock {
    pub dimension: usize,
    pub tau: f64,
    /// Click indices, centered window.
    pub indices: Vec<i64>,
    pub h: DMatrix<Complex64>,
    pub p: DMatrix<Complex64>,
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<Complex64>,
}

impl DenseClock {
    /// Energies `2 pi k / (D tau)` for `k` in the centered window, `H = F diag(omega) F^+`.
    pub fn new(dimension: usize, tau: f64) -> Self {
        let d = dimension as i64;
        let lo = -(d - 1) / 2;
        let indices: Vec<i64> = (lo..lo + d).collect();
        let levels = indices.clone();
        let f = DMatrix::from_fn(dimension, dimension, |m, k| {
            Complex64::from_polar(1.0 / (dimension as f64).sqrt(), 2.0 * PI * (indices[m] * levels[k]) as f64 / d as f64)
        });
        let omega = DMatrix::from_diagonal(&DVector::from_iterator(
            dimension,
            levels.iter().map(|&k| Complex64::new(2.0 * PI * k as f64 / (d as f64 * tau), 0.0)),
        ));
        let h = &f * omega * f.adjoint();
        let h = (&h + h.adjoint()) * Complex64::new(0.5, 0.0);
        // sawtooth readings, antipode of an even cycle at 0
        let p = DMatrix::from_diagonal(&DVector::from_iterator(
            dimension,
            indices.iter().map(|&n| {
                let v = if dimension % 2 == 0 && n == d / 2 { 0.0 } else { n as f64 * tau };
                Complex64::new(v, 0.0)
            }),
        ));
        let eig = SymmetricEigen::new(h.clone());
        Self { dimension, tau, indices, h, p, eigenvalues: eig.eigenvalues, eigenvectors: eig.eigenvectors }
    }

    pub fn position(&self, n: i64) -> usize {
        self.indices.iter().position(|&m| m == n).expect("index inside the cycle")
    }

    pub fn basis(&self, n: i64) -> DVector<Complex64> {
        let mut v = DVector::zeros(self.dimension);
        v[self.position(n)] = Complex64::new(1.0, 0.0);
        v
    }

    /// `exp(-i H t)` by diagonalization.
    pub fn propagator(&self, t: f64) -> DMatrix<Complex64> {
        let phases = DMatrix::from_diagonal(&self.eigenvalues.map(|l| Complex64::from_polar(1.0, -l * t)));
        &self.eigenvectors * phases * self.eigenvectors.adjoint()
    }

    /// `exp(-i H t)` by nalgebra's Pade matrix exponential.
    pub fn propagator_expm(&self, t: f64) -> DMatrix<Complex64> {
        (&self.h * Complex64::new(0.0, -t)).exp()
    }

    /// `tau^-1 int_{-tau/2}^{tau/2} U^+(u) P U(u) du` in closed form over the eigenbasis.
    pub fn time_operator(&self) -> DMatrix<Complex64> {
        let v = &self.eigenvectors;
        let q = v.adjoint() * &self.p * v;
        let n = self.dimension;
        let avg = DMatrix::from_fn(n, n, |a, b| {
            let x = 0.5 * (self.eigenvalues[a] - self.eigenvalues[b]) * self.tau;
            let sinc = if x.abs() < 1e-12 { 1.0 } else { x.sin() / x };
            q[(a, b)] * sinc
        });
        v * avg * v.adjoint()
    }

    pub fn expectation(a: &DMatrix<Complex64>, phi: &DVector<Complex64>) -> Complex64 {
        phi.dotc(&(a * phi)) / phi.norm_squared()
    }

    pub fn commutator_error(&self, t: &DMatrix<Complex64>, phi: &DVector<Complex64>) -> f64 {
        let c = t * &self.h - &self.h * t;
        (Self::expectation(&c, phi) - Complex64::i()).norm()
    }

    /// `<phi_C(t)|T|phi_C(t)>`.
    pub fn reading(&self, t_op: &DMatrix<Complex64>, t: f64) -> f64 {
        let phi = self.propagator(t) * self.basis(0);
        Self::expectation(t_op, &phi).re
    }
}

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::problem::Problem;
use crate::rng::{RngStream, StreamId};

/// Smoothed biweight loss `φ(θ) = θ²/(1+θ²)`.
pub fn biweight_loss(theta: f64) -> f64 {
    let t2 = theta * theta;
    // for huge θ, t2/(1+t2) rounds to 1 anyway; inf/inf would not
    if t2.is_infinite() {
        return 1.0;
    }
    t2 / (1.0 + t2)
}

/// `φ'(θ) = 2θ/(1+θ²)²`.
pub fn biweight_derivative(theta: f64) -> f64 {
    let d = 1.0 + theta * theta;
    2.0 * theta / (d * d)
}

/// Data of one robust-regression instance: `b = A z + 3u₁ + u₂` with
/// `a_i ~ N(0, I_n)`, `z ~ N(0, 4 I_n)`, `u₁ ~ N(0, I_m)` and `u₂` i.i.d.
/// Bernoulli(0.3) on {0, 1}.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionInstance {
    /// m×n, row i is `a_iᵀ`.
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub n: usize,
    pub m: usize,
    pub master_seed: u64,
    pub stream: StreamId,
}

impl RegressionInstance {
    /// Draws an instance. Entries are drawn in the order A (row by row), z,
    /// u₁, u₂.
    pub fn generate(n: usize, m: usize, rng: &mut RngStream) -> Self {
        assert!(n >= 1 && m >= 1, "regression needs n, m >= 1");
        let mut rows = Vec::with_capacity(m * n);
        for _ in 0..m * n {
            rows.push(rng.standard_normal());
        }
        let a = DMatrix::from_row_slice(m, n, &rows);
        let z = DVector::from_fn(n, |_, _| 2.0 * rng.standard_normal());
        let u1 = DVector::from_fn(m, |_, _| rng.standard_normal());
        let u2 = DVector::from_fn(m, |_, _| if rng.random_bool(0.3) { 1.0 } else { 0.0 });
        let b = &a * z + 3.0 * u1 + u2;
        Self { a, b, n, m, master_seed: rng.master_seed(), stream: rng.id().clone() }
    }

    pub fn residuals(&self, x: &[f64]) -> DVector<f64> {
        let x = DVector::from_column_slice(x);
        &self.a * x - &self.b
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let r = self.residuals(x);
        r.iter().map(|&t| biweight_loss(t)).sum::<f64>() / self.m as f64
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let w = self.residuals(x).map(biweight_derivative) / self.m as f64;
        (self.a.transpose() * w).as_slice().to_vec()
    }
}

/// Robust regression `f(x) = (1/m) Σ φ(a_iᵀx - b_i)` started at the origin.
/// The minimum is unknown, so no `f_star` is attached.
pub fn make_robust_regression(n: usize, m: usize, rng: &mut RngStream) -> (Problem, Arc<RegressionInstance>) {
    let inst = Arc::new(RegressionInstance::generate(n, m, rng));
    let (fi, gi) = (Arc::clone(&inst), Arc::clone(&inst));
    let problem = Problem::new(format!("regression:n={n},m={m}"), DVector::zeros(n), move |x| fi.value(x))
        .with_gradient(move |x| gi.gradient(x));
    (problem, inst)
}

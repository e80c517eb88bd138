//! Objective functions and counted evaluation.

use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;

use crate::counter::{BudgetExhausted, EvalCounter};

pub type ObjectiveFn = dyn Fn(&[f64]) -> f64 + Send + Sync;
pub type GradientFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;

/// An unconstrained minimization problem over R^n.
///
/// Objectives must be deterministic: evaluating twice at the same point has to
/// return bit-identical values, since replayed runs are compared exactly.
#[derive(Clone)]
pub struct Problem {
    name: String,
    x0: DVector<f64>,
    f_star: Option<f64>,
    objective: Arc<ObjectiveFn>,
    gradient: Option<Arc<GradientFn>>,
}

impl Problem {
    pub fn new<F>(name: impl Into<String>, x0: DVector<f64>, objective: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        assert!(!x0.is_empty(), "problem dimension must be positive");
        Self {
            name: name.into(),
            x0,
            f_star: None,
            objective: Arc::new(objective),
            gradient: None,
        }
    }

    pub fn with_gradient<G>(mut self, gradient: G) -> Self
    where
        G: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        self.gradient = Some(Arc::new(gradient));
        self
    }

    pub fn with_f_star(mut self, f_star: f64) -> Self {
        self.f_star = Some(f_star);
        self
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.x0.len()
    }

    pub fn x0(&self) -> &DVector<f64> {
        &self.x0
    }

    pub fn f_star(&self) -> Option<f64> {
        self.f_star
    }

    pub fn has_gradient(&self) -> bool {
        self.gradient.is_some()
    }

    /// Uncounted objective value. Solvers go through [`Evaluator`] instead.
    pub fn value(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim());
        (self.objective)(x)
    }

    pub fn gradient(&self, x: &[f64]) -> Option<DVector<f64>> {
        self.gradient
            .as_ref()
            .map(|g| DVector::from_vec(g(x)))
    }
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("name", &self.name)
            .field("dim", &self.dim())
            .field("f_star", &self.f_star)
            .field("has_gradient", &self.has_gradient())
            .finish()
    }
}

/// A problem paired with its evaluation counter for the duration of one run.
#[derive(Debug)]
pub struct Evaluator<'a> {
    problem: &'a Problem,
    counter: EvalCounter,
}

impl<'a> Evaluator<'a> {
    pub fn new(problem: &'a Problem, counter: EvalCounter) -> Self {
        Self { problem, counter }
    }

    pub fn problem(&self) -> &'a Problem {
        self.problem
    }

    pub fn counter(&self) -> &EvalCounter {
        &self.counter
    }

    pub fn evals(&self) -> u64 {
        self.counter.count()
    }

    pub fn eval(&mut self, x: &DVector<f64>) -> Result<f64, BudgetExhausted> {
        self.counter.tick()?;
        Ok(self.problem.value(x.as_slice()))
    }
}

/// Central-difference gradient with per-coordinate step `h·max(1, |x_i|)`.
/// Consumes `2n` evaluations.
pub fn finite_difference_gradient(
    eval: &mut Evaluator<'_>,
    x: &DVector<f64>,
    h: f64,
) -> Result<DVector<f64>, BudgetExhausted> {
    assert!(h > 0.0, "finite-difference step must be positive");
    let mut grad = DVector::zeros(x.len());
    let mut probe = x.clone();
    for i in 0..x.len() {
        let step = h * x[i].abs().max(1.0);
        probe[i] = x[i] + step;
        let fp = eval.eval(&probe)?;
        probe[i] = x[i] - step;
        let fm = eval.eval(&probe)?;
        probe[i] = x[i];
        grad[i] = (fp - fm) / (2.0 * step);
    }
    Ok(grad)
}

/// Relative discrepancy between the analytic gradient and central differences
/// at `x`, or `None` if the problem has no gradient.
pub fn gradient_check(problem: &Problem, x: &DVector<f64>, h: f64) -> Option<f64> {
    let analytic = problem.gradient(x.as_slice())?;
    let mut eval = Evaluator::new(problem, EvalCounter::unbounded());
    let fd = finite_difference_gradient(&mut eval, x, h).expect("unbounded counter");
    let scale = analytic.norm().max(fd.norm()).max(f64::MIN_POSITIVE);
    Some((analytic - fd).norm() / scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sphere(n: usize) -> Problem {
        Problem::new("sphere", DVector::from_element(n, 1.0), |x| {
            x.iter().map(|v| v * v).sum()
        })
        .with_gradient(|x| x.iter().map(|v| 2.0 * v).collect())
    }

    #[test]
    fn fd_of_sphere() {
        let p = sphere(2);
        let mut ev = Evaluator::new(&p, EvalCounter::unbounded());
        let g = finite_difference_gradient(&mut ev, &DVector::from_vec(vec![1.0, 0.0]), 1e-6).unwrap();
        assert_abs_diff_eq!(g[0], 2.0, epsilon = 1e-6);
        assert_abs_diff_eq!(g[1], 0.0, epsilon = 1e-6);
        assert_eq!(ev.evals(), 4);
    }

    #[test]
    fn fd_of_constant_is_zero() {
        let p = Problem::new("const", DVector::zeros(3), |_| 4.2);
        let mut ev = Evaluator::new(&p, EvalCounter::unbounded());
        let g = finite_difference_gradient(&mut ev, &DVector::from_vec(vec![0.3, -2.0, 7.0]), 1e-6).unwrap();
        assert_eq!(g, DVector::zeros(3));
    }

    #[test]
    fn fd_of_bilinear() {
        let p = Problem::new("xy", DVector::zeros(2), |x| x[0] * x[1]);
        let mut ev = Evaluator::new(&p, EvalCounter::unbounded());
        let g = finite_difference_gradient(&mut ev, &DVector::from_vec(vec![2.0, 3.0]), 1e-6).unwrap();
        assert_abs_diff_eq!(g[0], 3.0, epsilon = 1e-6);
        assert_abs_diff_eq!(g[1], 2.0, epsilon = 1e-6);
    }

    #[test]
    fn fd_respects_budget() {
        let p = sphere(3);
        let mut ev = Evaluator::new(&p, EvalCounter::with_budget(5));
        assert!(finite_difference_gradient(&mut ev, p.x0(), 1e-6).is_err());
        assert_eq!(ev.evals(), 5);
    }

    #[test]
    fn gradient_check_sphere() {
        let p = sphere(4);
        let err = gradient_check(&p, &DVector::from_vec(vec![0.5, -1.0, 2.0, 3.0]), 1e-6).unwrap();
        assert!(err < 1e-8, "{err}");
    }
}

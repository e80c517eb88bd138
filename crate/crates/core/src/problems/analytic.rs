//! Smooth test functions with known minima and analytic gradients.

use nalgebra::DVector;

use super::regression::{biweight_derivative, biweight_loss};
use crate::problem::Problem;

pub fn sphere(n: usize) -> Problem {
    Problem::new(format!("sphere:n={n}"), DVector::from_element(n, 1.0), |x| x.iter().map(|v| v * v).sum())
        .with_gradient(|x| x.iter().map(|v| 2.0 * v).collect())
        .with_f_star(0.0)
}

/// Diagonal quadratic `Σ λ_i x_i²` with `λ_i = cond^{(i-1)/(n-1)}`.
pub fn quadratic(n: usize, cond: f64) -> Problem {
    let lambda = quadratic_eigenvalues(n, cond);
    let lg = lambda.clone();
    Problem::new(format!("quad:n={n},cond={cond}"), DVector::from_element(n, 1.0), move |x| {
        x.iter().zip(&lambda).map(|(v, l)| l * v * v).sum()
    })
    .with_gradient(move |x| x.iter().zip(&lg).map(|(v, l)| 2.0 * l * v).collect())
    .with_f_star(0.0)
}

pub fn quadratic_eigenvalues(n: usize, cond: f64) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    (0..n).map(|i| cond.powf(i as f64 / (n - 1) as f64)).collect()
}

/// Chained Rosenbrock `Σ 100(x_{i+1} - x_i²)² + (1 - x_i)²`.
pub fn rosenbrock(n: usize) -> Problem {
    let x0 = DVector::from_fn(n, |i, _| if i % 2 == 0 { -1.2 } else { 1.0 });
    Problem::new(format!("rosenbrock:n={n}"), x0, |x| {
        x.windows(2).map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2)).sum()
    })
    .with_gradient(|x| {
        let mut g = vec![0.0; x.len()];
        for i in 0..x.len().saturating_sub(1) {
            let t = x[i + 1] - x[i] * x[i];
            g[i] += -400.0 * x[i] * t - 2.0 * (1.0 - x[i]);
            g[i + 1] += 200.0 * t;
        }
        g
    })
    .with_f_star(0.0)
}

/// `Σ_{i≤n-2} x_i² + 100 x_{i+1}² + 100 x_{i+2}²`.
pub fn dqdrtic(n: usize) -> Problem {
    Problem::new(format!("dqdrtic:n={n}"), DVector::from_element(n, 3.0), |x| {
        x.windows(3).map(|w| w[0] * w[0] + 100.0 * (w[1] * w[1] + w[2] * w[2])).sum()
    })
    .with_gradient(|x| {
        let mut g = vec![0.0; x.len()];
        for i in 0..x.len().saturating_sub(2) {
            g[i] += 2.0 * x[i];
            g[i + 1] += 200.0 * x[i + 1];
            g[i + 2] += 200.0 * x[i + 2];
        }
        g
    })
    .with_f_star(0.0)
}

/// Extended Powell singular function; `n` must be a multiple of 4.
pub fn powell_singular(n: usize) -> Problem {
    assert!(n.is_multiple_of(4) && n > 0, "powell needs n divisible by 4");
    let x0 = DVector::from_fn(n, |i, _| [3.0, -1.0, 0.0, 1.0][i % 4]);
    Problem::new(format!("powell:n={n}"), x0, |x| {
        x.chunks_exact(4)
            .map(|c| {
                (c[0] + 10.0 * c[1]).powi(2)
                    + 5.0 * (c[2] - c[3]).powi(2)
                    + (c[1] - 2.0 * c[2]).powi(4)
                    + 10.0 * (c[0] - c[3]).powi(4)
            })
            .sum()
    })
    .with_gradient(|x| {
        let mut g = Vec::with_capacity(x.len());
        for c in x.chunks_exact(4) {
            let t1 = c[0] + 10.0 * c[1];
            let t2 = c[2] - c[3];
            let t3 = c[1] - 2.0 * c[2];
            let t4 = c[0] - c[3];
            g.push(2.0 * t1 + 40.0 * t4.powi(3));
            g.push(20.0 * t1 + 4.0 * t3.powi(3));
            g.push(10.0 * t2 - 8.0 * t3.powi(3));
            g.push(-10.0 * t2 - 40.0 * t4.powi(3));
        }
        g
    })
    .with_f_star(0.0)
}

/// `Σ_{i<n} (x_i² + x_n²)² - 4x_i + 3`, minimized at `(1, …, 1, 0)`.
pub fn arwhead(n: usize) -> Problem {
    assert!(n >= 2, "arwhead needs n >= 2");
    Problem::new(format!("arwhead:n={n}"), DVector::from_element(n, 1.0), |x| {
        let (head, last) = x.split_at(x.len() - 1);
        let xn2 = last[0] * last[0];
        head.iter().map(|v| (v * v + xn2).powi(2) - 4.0 * v + 3.0).sum()
    })
    .with_gradient(|x| {
        let n = x.len();
        let xn = x[n - 1];
        let mut g = vec![0.0; n];
        for i in 0..n - 1 {
            let t = x[i] * x[i] + xn * xn;
            g[i] = 4.0 * t * x[i] - 4.0;
            g[n - 1] += 4.0 * t * xn;
        }
        g
    })
    .with_f_star(0.0)
}

/// `(x_1 - 1)² + Σ_{i≥2} i (2x_i - x_{i-1})²`.
pub fn tridia(n: usize) -> Problem {
    Problem::new(format!("tridia:n={n}"), DVector::from_element(n, 1.0), |x| {
        let mut f = (x[0] - 1.0).powi(2);
        for i in 1..x.len() {
            f += (i + 1) as f64 * (2.0 * x[i] - x[i - 1]).powi(2);
        }
        f
    })
    .with_gradient(|x| {
        let mut g = vec![0.0; x.len()];
        g[0] = 2.0 * (x[0] - 1.0);
        for i in 1..x.len() {
            let t = 2.0 * (i + 1) as f64 * (2.0 * x[i] - x[i - 1]);
            g[i] += 2.0 * t;
            g[i - 1] -= t;
        }
        g
    })
    .with_f_star(0.0)
}

/// `(x_1 - 1)² + Σ_{i≥2} i (2x_i² - x_{i-1})²`.
pub fn dixon_price(n: usize) -> Problem {
    Problem::new(format!("dixonprice:n={n}"), DVector::from_element(n, 1.0), |x| {
        let mut f = (x[0] - 1.0).powi(2);
        for i in 1..x.len() {
            f += (i + 1) as f64 * (2.0 * x[i] * x[i] - x[i - 1]).powi(2);
        }
        f
    })
    .with_gradient(|x| {
        let mut g = vec![0.0; x.len()];
        g[0] = 2.0 * (x[0] - 1.0);
        for i in 1..x.len() {
            let t = 2.0 * (i + 1) as f64 * (2.0 * x[i] * x[i] - x[i - 1]);
            g[i] += 4.0 * x[i] * t;
            g[i - 1] -= t;
        }
        g
    })
    .with_f_star(0.0)
}

/// Biweight composite `(1/n) Σ φ(x_i + x_{i+1} - c_i) + φ(x_i - t_i)` with
/// targets `t_i = sin(i)` and `c_i = t_i + t_{i+1}`, so `x = t` is a global
/// minimizer with value 0.
pub fn biweight_sum(n: usize) -> Problem {
    let t: Vec<f64> = (1..=n).map(|i| (i as f64).sin()).collect();
    let tg = t.clone();
    let scale = 1.0 / n as f64;
    Problem::new(format!("biweight:n={n}"), DVector::zeros(n), move |x| {
        let mut f = 0.0;
        for i in 0..x.len() {
            f += biweight_loss(x[i] - t[i]);
            if i + 1 < x.len() {
                f += biweight_loss(x[i] + x[i + 1] - t[i] - t[i + 1]);
            }
        }
        scale * f
    })
    .with_gradient(move |x| {
        let t = &tg;
        let mut g = vec![0.0; x.len()];
        for i in 0..x.len() {
            g[i] += scale * biweight_derivative(x[i] - t[i]);
            if i + 1 < x.len() {
                let d = scale * biweight_derivative(x[i] + x[i + 1] - t[i] - t[i + 1]);
                g[i] += d;
                g[i + 1] += d;
            }
        }
        g
    })
    .with_f_star(0.0)
}

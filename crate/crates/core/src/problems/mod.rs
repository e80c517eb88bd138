//! Built-in problems and the key-based registry.
//!
//! Keys look like `quad:n=100,cond=1e4`. Problems that need random data
//! (currently only `regression`) draw it from a stream keyed by the master
//! seed and the key string, so `(key, seed)` always rebuilds the same
//! instance.

mod analytic;
mod regression;

pub use analytic::{
    arwhead, biweight_sum, dixon_price, dqdrtic, powell_singular, quadratic, quadratic_eigenvalues, rosenbrock,
    sphere, tridia,
};
pub use regression::{biweight_derivative, biweight_loss, make_robust_regression, RegressionInstance};

use crate::error::{Error, Result};
use crate::keys::{parse_params, split_key};
use crate::problem::Problem;
use crate::rng::{RngStream, StreamId};

/// One registry entry, as printed by `--list-problems`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProblemInfo {
    pub name: &'static str,
    pub params: &'static str,
    pub summary: &'static str,
}

pub const REGISTRY: &[ProblemInfo] = &[
    ProblemInfo { name: "sphere", params: "n", summary: "sum of squares, x0 = ones" },
    ProblemInfo { name: "quad", params: "n,cond", summary: "diagonal quadratic with condition number cond" },
    ProblemInfo { name: "rosenbrock", params: "n", summary: "chained Rosenbrock" },
    ProblemInfo { name: "dqdrtic", params: "n", summary: "diagonal quadratic chain, x0 = 3" },
    ProblemInfo { name: "powell", params: "n", summary: "extended Powell singular, n divisible by 4" },
    ProblemInfo { name: "arwhead", params: "n", summary: "arrowhead quartic" },
    ProblemInfo { name: "tridia", params: "n", summary: "tridiagonal quadratic" },
    ProblemInfo { name: "dixonprice", params: "n", summary: "Dixon-Price quartic chain" },
    ProblemInfo { name: "biweight", params: "n", summary: "sum of biweight losses, minimum 0" },
    ProblemInfo {
        name: "regression",
        params: "n,m",
        summary: "robust regression with biweight loss on random data (minimum unknown)",
    },
];

/// Keys of the default analytic suite, dimensions 25 to 5000.
pub const ANALYTIC_SUITE: &[&str] = &[
    "sphere:n=25",
    "quad:n=25,cond=100",
    "rosenbrock:n=25",
    "dqdrtic:n=50",
    "powell:n=100",
    "tridia:n=100",
    "biweight:n=120",
    "quad:n=1000,cond=10000",
    "arwhead:n=1000",
    "dixonprice:n=1000",
    "sphere:n=5000",
];

/// Builds the problem named by `key`. The problem's name is the key as given.
pub fn build(key: &str, master_seed: u64) -> Result<Problem> {
    let (name, params) = split_key(key);
    let mut p = parse_params(params)?;
    let dim = |p: &mut crate::keys::Params, min: usize| -> Result<usize> {
        let n = p.usize("n")?.ok_or_else(|| Error::Parse(format!("`{key}` needs n")))?;
        if n < min {
            return Err(Error::invalid(format!("`{key}` needs n >= {min}")));
        }
        Ok(n)
    };
    let problem = match name {
        "sphere" => sphere(dim(&mut p, 1)?),
        "quad" => {
            let n = dim(&mut p, 1)?;
            let cond = p.f64("cond")?.unwrap_or(1.0);
            if !(cond >= 1.0 && cond.is_finite()) {
                return Err(Error::invalid(format!("`{key}`: cond must be finite and >= 1")));
            }
            quadratic(n, cond)
        }
        "rosenbrock" => rosenbrock(dim(&mut p, 2)?),
        "dqdrtic" => dqdrtic(dim(&mut p, 3)?),
        "powell" => {
            let n = dim(&mut p, 4)?;
            if !n.is_multiple_of(4) {
                return Err(Error::invalid(format!("`{key}`: n must be divisible by 4")));
            }
            powell_singular(n)
        }
        "arwhead" => arwhead(dim(&mut p, 2)?),
        "tridia" => tridia(dim(&mut p, 1)?),
        "dixonprice" => dixon_price(dim(&mut p, 1)?),
        "biweight" => biweight_sum(dim(&mut p, 1)?),
        "regression" => {
            let n = p.usize("n")?.unwrap_or(100);
            let m = p.usize("m")?.unwrap_or(200);
            if n == 0 || m == 0 {
                return Err(Error::invalid(format!("`{key}`: n and m must be positive")));
            }
            let mut rng = RngStream::new(master_seed, StreamId::new(key, "instance", 0));
            make_robust_regression(n, m, &mut rng).0
        }
        _ => return Err(Error::UnknownKey { kind: "problem", key: key.to_owned() }),
    };
    p.finish(problem.renamed(key))
}

/// Builds every problem of [`ANALYTIC_SUITE`].
pub fn make_analytic_suite() -> Vec<Problem> {
    ANALYTIC_SUITE.iter().map(|k| build(k, 0).expect("suite keys are valid")).collect()
}

/// Registry listing, one entry per line.
pub fn list() -> String {
    let mut out = String::new();
    for info in REGISTRY {
        out.push_str(&format!("{:<12} {:<8} {}\n", info.name, info.params, info.summary));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_shape() {
        let suite = make_analytic_suite();
        assert!(suite.len() >= 8);
        let dims: Vec<usize> = suite.iter().map(Problem::dim).collect();
        for n in [25, 100, 1000, 5000] {
            assert!(dims.contains(&n), "missing n={n}");
        }
        assert!(dims.iter().all(|&n| (25..=5000).contains(&n)));
        for p in &suite {
            assert!(p.has_gradient() && p.f_star().is_some(), "{}", p.name());
        }
    }

    #[test]
    fn sphere_example() {
        let p = build("sphere:n=7", 0).unwrap();
        assert_eq!(p.x0().as_slice(), &[1.0; 7]);
        assert_eq!(p.value(&[0.0; 7]), 0.0);
        assert_eq!(p.name(), "sphere:n=7");
    }

    #[test]
    fn regression_regenerates_from_key_and_seed() {
        let x: Vec<f64> = (0..10).map(|i| i as f64 * 0.1).collect();
        let a = build("regression:n=10,m=20", 3).unwrap();
        let b = build("regression:n=10,m=20", 3).unwrap();
        let c = build("regression:n=10,m=20", 4).unwrap();
        assert_eq!(a.value(&x).to_bits(), b.value(&x).to_bits());
        assert_ne!(a.value(&x), c.value(&x));
        assert!(a.f_star().is_none());
        assert_eq!(a.x0().as_slice(), &[0.0; 10]);
    }

    #[test]
    fn bad_keys() {
        assert!(matches!(build("nope:n=3", 0), Err(Error::UnknownKey { .. })));
        assert!(build("sphere", 0).is_err());
        assert!(build("powell:n=6", 0).is_err());
        assert!(build("sphere:n=3,q=1", 0).is_err());
        assert!(build("quad:n=3,cond=0.5", 0).is_err());
    }

    #[test]
    fn listing_covers_registry() {
        let text = list();
        for info in REGISTRY {
            assert!(text.contains(info.name));
        }
    }
}

use std::io::Write;

use crate::error::{Error, Result};
use crate::format;
use crate::record::{EvalCount, HistoryRow};

/// Points on the default ratio grid.
pub const PROFILE_GRID_POINTS: usize = 200;

/// Evaluations needed to reach `f ≤ f* + τ (f₀ - f*)`, read off the history
/// (one row per iteration, so this is the count at the start of the first
/// iteration whose incumbent qualifies).
pub fn evals_to_accuracy(history: &[HistoryRow], f0: f64, f_star: f64, tau: f64) -> Result<EvalCount> {
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::invalid(format!("accuracy level {tau} outside (0, 1]")));
    }
    if f0 < f_star {
        return Err(Error::invalid(format!("f0 = {f0} is below f* = {f_star}")));
    }
    let threshold = f_star + tau * (f0 - f_star);
    Ok(history
        .iter()
        .find(|row| row.f <= threshold)
        .map_or(EvalCount::NotReached, |row| EvalCount::Reached(row.evals)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileCurve {
    pub solver: String,
    /// `(θ, ρ(θ))`, θ increasing.
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub curves: Vec<ProfileCurve>,
    /// Problems no instance solved. They stay in the denominator, so they
    /// count as failures for every solver.
    pub dropped: Vec<usize>,
}

/// Performance profiles from a problems × instances count matrix.
///
/// `instance_solver[j]` names the solver that column `j` belongs to; several
/// columns (repetitions) may share a solver. Per problem, the reference count
/// is the minimum over every instance of every solver. A solver's curve is the
/// mean over its instances of the fraction of problems with `N / min ≤ θ`.
///
/// Without explicit `thresholds` the grid is logarithmic over
/// `[1, largest finite ratio]` with [`PROFILE_GRID_POINTS`] points.
pub fn performance_profile(
    counts: &[Vec<EvalCount>],
    instance_solver: &[String],
    thresholds: Option<&[f64]>,
) -> Result<Profile> {
    if counts.is_empty() || instance_solver.is_empty() {
        return Err(Error::invalid("empty count matrix"));
    }
    let width = instance_solver.len();
    if counts.iter().any(|row| row.len() != width) {
        return Err(Error::invalid("count rows must have one entry per instance"));
    }

    let mut dropped = Vec::new();
    // ratios[p][j], None when not reached
    let mut ratios: Vec<Vec<Option<f64>>> = Vec::with_capacity(counts.len());
    for (p, row) in counts.iter().enumerate() {
        let best = row.iter().filter_map(|c| c.finite()).min();
        match best {
            None => {
                dropped.push(p);
                log::info!("performance profile: problem {p} unsolved by every instance");
                ratios.push(vec![None; width]);
            }
            Some(best) => {
                // a zero count cannot happen for real runs, guard the division anyway
                let best = best.max(1) as f64;
                ratios.push(row.iter().map(|c| c.finite().map(|n| n.max(1) as f64 / best)).collect());
            }
        }
    }

    let grid = match thresholds {
        Some(t) => {
            if t.windows(2).any(|w| w[1] < w[0]) {
                return Err(Error::invalid("thresholds must be non-decreasing"));
            }
            t.to_vec()
        }
        None => {
            let max_ratio = ratios.iter().flatten().flatten().fold(1.0f64, |a, &b| a.max(b));
            log_grid(max_ratio, PROFILE_GRID_POINTS)
        }
    };

    let mut solvers: Vec<&String> = Vec::new();
    for s in instance_solver {
        if !solvers.contains(&s) {
            solvers.push(s);
        }
    }

    let n_problems = counts.len() as f64;
    let curves = solvers
        .into_iter()
        .map(|solver| {
            let cols: Vec<usize> = (0..width).filter(|&j| &instance_solver[j] == solver).collect();
            let points = grid
                .iter()
                .map(|&theta| {
                    let total: f64 = cols
                        .iter()
                        .map(|&j| ratios.iter().filter(|r| r[j].is_some_and(|x| x <= theta)).count() as f64 / n_problems)
                        .sum();
                    (theta, total / cols.len() as f64)
                })
                .collect();
            ProfileCurve { solver: solver.clone(), points }
        })
        .collect();

    Ok(Profile { curves, dropped })
}

/// `points` log-spaced values from 1 to `max`, both endpoints exact.
pub fn log_grid(max: f64, points: usize) -> Vec<f64> {
    if max <= 1.0 || points < 2 {
        return vec![1.0];
    }
    let lmax = max.ln();
    let mut grid: Vec<f64> = (0..points).map(|i| (lmax * i as f64 / (points - 1) as f64).exp()).collect();
    grid[0] = 1.0;
    grid[points - 1] = max;
    grid
}

/// Writes `tau,solver,theta,rho` rows for each accuracy level's profile.
pub fn write_profile_csv<W: Write>(profiles: &[(f64, Profile)], mut out: W) -> Result<()> {
    writeln!(out, "tau,solver,theta,rho")?;
    for (tau, profile) in profiles {
        for curve in &profile.curves {
            for (theta, rho) in &curve.points {
                writeln!(
                    out,
                    "{},{},{},{}",
                    format::tau_label(*tau),
                    curve.solver,
                    format::float(*theta),
                    format::float(*rho)
                )?;
            }
        }
    }
    Ok(())
}

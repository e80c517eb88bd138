use super::SolverConfig;
use crate::counter::EvalCounter;
use crate::error::Result;
use crate::polling::random_unit_vector;
use crate::problem::{Evaluator, Problem};
use crate::record::{HistoryRow, RunRecord, Termination};
use crate::rng::RngStream;

/// Stochastic three points: compare `f(x)`, `f(x + α_k v)`, `f(x - α_k v)` for
/// a uniform unit `v` and keep the best, with `α_k = α₀/(k+1)`. Uses the same
/// step-size floor as direct search so the two terminate comparably.
pub fn run_stp(problem: &Problem, cfg: &SolverConfig, rng: &mut RngStream) -> Result<RunRecord> {
    cfg.validate()?;
    let n = problem.dim();
    let mut eval = Evaluator::new(problem, EvalCounter::new(cfg.max_evals));
    let mut x = problem.x0().clone();
    let mut f_x = eval.eval(&x).expect("budget validated positive");
    let mut k: u64 = 0;
    let mut history = Vec::new();

    let termination = loop {
        let alpha = cfg.alpha0 / (k + 1) as f64;
        history.push(HistoryRow { k, alpha, f: f_x, evals: eval.evals() });
        if alpha < cfg.alpha_floor {
            break Termination::StepSizeFloor;
        }
        if eval.counter().is_exhausted() {
            break Termination::Budget;
        }
        if cfg.max_iterations.is_some_and(|m| k >= m) {
            break Termination::MaxIterations;
        }

        let v = random_unit_vector(n, rng);
        let mut best: Option<(f64, _)> = None;
        for sign in [1.0, -1.0] {
            let trial = &x + (sign * alpha) * &v;
            let Ok(f_trial) = eval.eval(&trial) else { break };
            // ties keep the incumbent
            if f_trial < best.as_ref().map_or(f_x, |(f, _)| *f) {
                best = Some((f_trial, trial));
            }
        }
        if let Some((f, trial)) = best {
            x = trial;
            f_x = f;
        }
        k += 1;
    };

    Ok(RunRecord {
        history,
        final_x: x,
        final_f: f_x,
        termination,
        evals_to_accuracy: Vec::new(),
    })
}

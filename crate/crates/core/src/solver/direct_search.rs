use nalgebra::DVector;

use super::{step_size_update, sufficient_decrease, SolverConfig};
use crate::counter::EvalCounter;
use crate::error::{Error, Result};
use crate::polling::DirectionSet;
use crate::problem::{Evaluator, Problem};
use crate::record::{HistoryRow, RunRecord, Termination};
use crate::rng::RngStream;
use crate::sketch::SketchMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub x: DVector<f64>,
    pub alpha: f64,
    pub k: u64,
    /// Cached `f(x)`.
    pub f_x: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PollOutcome {
    pub success: bool,
    pub evals_used: u64,
    /// The budget ran out before the poll finished.
    pub interrupted: bool,
    /// Index in the polling set of the accepted direction.
    pub accepted: Option<usize>,
}

/// One poll step at `x + α Pᵀd` for `d ∈ D`, in set order.
///
/// Opportunistic polling stops at the first point with sufficient decrease;
/// otherwise every point is evaluated and the best qualifying one is taken.
/// If the budget runs out mid-poll, a qualifying point found so far is still
/// accepted; without one, `x` and `α` are left unchanged.
pub fn poll_iteration(
    state: &mut SolverState,
    sketch: &SketchMatrix,
    dirs: &DirectionSet,
    eval: &mut Evaluator<'_>,
    cfg: &SolverConfig,
) -> PollOutcome {
    let start = eval.evals();
    let mut best: Option<(usize, f64, DVector<f64>)> = None;
    let mut interrupted = false;

    for (i, d) in dirs.iter().enumerate() {
        let step = sketch.apply_transpose(&d);
        let trial = &state.x + state.alpha * &step;
        let Ok(f_trial) = eval.eval(&trial) else {
            interrupted = true;
            break;
        };
        if !sufficient_decrease(state.f_x, f_trial, state.alpha, step.norm_squared(), cfg.rule, cfg.c) {
            continue;
        }
        if best.as_ref().is_none_or(|(_, fb, _)| f_trial < *fb) {
            best = Some((i, f_trial, trial));
        }
        if cfg.opportunistic {
            break;
        }
    }

    let accepted = match best {
        Some((i, f, x)) => {
            state.x = x;
            state.f_x = f;
            state.alpha = step_size_update(state.alpha, true, cfg);
            Some(i)
        }
        None => {
            if !interrupted {
                state.alpha = step_size_update(state.alpha, false, cfg);
            }
            None
        }
    };
    state.k += 1;
    PollOutcome {
        success: accepted.is_some(),
        evals_used: eval.evals() - start,
        interrupted,
        accepted,
    }
}

/// What an observer sees after each poll step. `x`, `f_x` and `alpha` are
/// the values the poll started from.
#[derive(Debug)]
pub struct IterationView<'a> {
    pub k: u64,
    pub x: &'a DVector<f64>,
    pub f_x: f64,
    pub alpha: f64,
    pub sketch: &'a SketchMatrix,
    pub directions: &'a DirectionSet,
    pub outcome: PollOutcome,
}

pub fn run_direct_search(problem: &Problem, cfg: &SolverConfig, rng: &mut RngStream) -> Result<RunRecord> {
    run_inner(problem, cfg, rng, None)
}

/// Like [`run_direct_search`], calling `observer` after every iteration.
pub fn run_direct_search_observed(
    problem: &Problem,
    cfg: &SolverConfig,
    rng: &mut RngStream,
    observer: &mut dyn FnMut(&IterationView<'_>),
) -> Result<RunRecord> {
    run_inner(problem, cfg, rng, Some(observer))
}

fn run_inner(
    problem: &Problem,
    cfg: &SolverConfig,
    rng: &mut RngStream,
    mut observer: Option<&mut dyn FnMut(&IterationView<'_>)>,
) -> Result<RunRecord> {
    cfg.validate()?;
    let n = problem.dim();
    let r = cfg.sketch.reduced_dim(n);
    if r > n {
        return Err(Error::invalid(format!("sketch dimension {r} exceeds problem dimension {n}")));
    }

    let mut eval = Evaluator::new(problem, EvalCounter::new(cfg.max_evals));
    let x0 = problem.x0().clone();
    let f0 = eval.eval(&x0).expect("budget validated positive");
    let mut state = SolverState { x: x0, alpha: cfg.alpha0, k: 0, f_x: f0 };
    let mut history = Vec::new();

    let termination = loop {
        history.push(HistoryRow { k: state.k, alpha: state.alpha, f: state.f_x, evals: eval.evals() });
        if state.alpha < cfg.alpha_floor {
            break Termination::StepSizeFloor;
        }
        if eval.counter().is_exhausted() {
            break Termination::Budget;
        }
        if cfg.max_iterations.is_some_and(|m| state.k >= m) {
            break Termination::MaxIterations;
        }

        // P_k is drawn before D_k from the same stream
        let sketch = cfg.sketch.generate(n, rng)?;
        let dirs = cfg.poll.generate(r, rng)?;
        match observer.as_deref_mut() {
            None => {
                poll_iteration(&mut state, &sketch, &dirs, &mut eval, cfg);
            }
            Some(obs) => {
                let before = state.clone();
                let outcome = poll_iteration(&mut state, &sketch, &dirs, &mut eval, cfg);
                obs(&IterationView {
                    k: before.k,
                    x: &before.x,
                    f_x: before.f_x,
                    alpha: before.alpha,
                    sketch: &sketch,
                    directions: &dirs,
                    outcome,
                });
            }
        }
    };

    Ok(RunRecord {
        history,
        final_f: state.f_x,
        final_x: state.x,
        termination,
        evals_to_accuracy: Vec::new(),
    })
}

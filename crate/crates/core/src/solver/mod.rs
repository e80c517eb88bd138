//! Direct search in random subspaces, the STP baseline and theory
//! diagnostics.

mod diagnostics;
mod direct_search;
mod stp;

use std::fmt;
use std::str::FromStr;

pub use diagnostics::{diagnostic_alpha_bar, diagnostics_mu_p0};
pub use direct_search::{
    poll_iteration, run_direct_search, run_direct_search_observed, IterationView, PollOutcome, SolverState,
};
pub use stp::run_stp;

use crate::error::{Error, Result};
use crate::polling::PollFamily;
use crate::problem::Problem;
use crate::record::RunRecord;
use crate::rng::RngStream;
use crate::sketch::SketchKind;

/// Constant of the practical decrease rule `min(ρ, ρ α² ‖Pᵀd‖²)`.
pub const PRACTICAL_DECREASE: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DecreaseRule {
    /// `f(trial) < f(x) - (c/2) α² ‖Pᵀd‖²`
    Theoretical,
    /// `f(trial) < f(x) - min(1e-5, 1e-5 α² ‖Pᵀd‖²)`
    Practical,
}

impl fmt::Display for DecreaseRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DecreaseRule::Theoretical => "theoretical",
            DecreaseRule::Practical => "practical",
        })
    }
}

impl FromStr for DecreaseRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theoretical" => Ok(DecreaseRule::Theoretical),
            "practical" => Ok(DecreaseRule::Practical),
            _ => Err(Error::UnknownKey { kind: "decrease rule", key: s.to_owned() }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolverKind {
    DirectSearch,
    Stp,
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolverKind::DirectSearch => "ds",
            SolverKind::Stp => "stp",
        })
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ds" => Ok(SolverKind::DirectSearch),
            "stp" => Ok(SolverKind::Stp),
            _ => Err(Error::UnknownKey { kind: "solver", key: s.to_owned() }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub solver: SolverKind,
    pub alpha0: f64,
    pub alpha_max: f64,
    pub gamma_inc: f64,
    pub gamma_dec: f64,
    /// Forcing constant of the theoretical rule.
    pub c: f64,
    pub rule: DecreaseRule,
    /// Stop once the step size drops below this.
    pub alpha_floor: f64,
    pub max_evals: Option<u64>,
    pub max_iterations: Option<u64>,
    pub poll: PollFamily,
    pub sketch: SketchKind,
    pub opportunistic: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            solver: SolverKind::DirectSearch,
            alpha0: 1.0,
            alpha_max: 1000.0,
            gamma_inc: 2.0,
            gamma_dec: 0.5,
            // (c/2) = 1e-5 matches the α-dependent term of the practical rule
            c: 2e-5,
            rule: DecreaseRule::Practical,
            alpha_floor: 1e-6,
            max_evals: None,
            max_iterations: None,
            poll: PollFamily::CoordinatePss,
            sketch: SketchKind::Identity,
            opportunistic: true,
        }
    }
}

impl SolverConfig {
    // negated comparisons also reject NaN
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::invalid(msg));
        if !(self.alpha0 > 0.0) {
            return bad("alpha0 must be positive");
        }
        if !(self.alpha_max >= self.alpha0) {
            return bad("alpha_max must be at least alpha0");
        }
        if !(self.gamma_dec > 0.0 && self.gamma_dec < 1.0) {
            return bad("gamma_dec must lie in (0, 1)");
        }
        if !(self.gamma_inc > 1.0) {
            return bad("gamma_inc must exceed 1");
        }
        if !(self.c > 0.0) {
            return bad("c must be positive");
        }
        if !(self.alpha_floor > 0.0) {
            return bad("alpha_floor must be positive");
        }
        if self.max_evals == Some(0) {
            return bad("evaluation budget must be positive");
        }
        if self.poll == PollFamily::Custom || self.sketch == SketchKind::Custom {
            return bad("custom polling sets and sketches cannot be drawn per iteration");
        }
        Ok(())
    }

    /// True when two runs cannot differ whatever the seed.
    pub fn is_deterministic(&self) -> bool {
        self.solver == SolverKind::DirectSearch && !self.poll.is_random() && !self.sketch.is_random()
    }

    /// Sets one option by name. Names follow the `solve` command's flags:
    /// `solver`, `sketch`, `poll`, `alpha0`, `alpha-max`, `gamma-inc`,
    /// `gamma-dec`, `rule`, `c`, `exhaustive`, `budget`, `max-iterations`,
    /// `alpha-floor`. Does not validate the resulting combination.
    pub fn set_option(&mut self, key: &str, value: &str) -> Result<()> {
        let num = || value.parse::<f64>().map_err(|_| Error::Parse(format!("bad number `{value}` for `{key}`")));
        let int = || value.parse::<u64>().map_err(|_| Error::Parse(format!("bad integer `{value}` for `{key}`")));
        match key {
            "solver" => self.solver = value.parse()?,
            "sketch" => self.sketch = value.parse()?,
            "poll" => self.poll = value.parse()?,
            "alpha0" => self.alpha0 = num()?,
            "alpha-max" => self.alpha_max = num()?,
            "alpha-floor" => self.alpha_floor = num()?,
            "gamma-inc" => self.gamma_inc = num()?,
            "gamma-dec" => self.gamma_dec = num()?,
            "c" => self.c = num()?,
            "rule" => self.rule = value.parse()?,
            "exhaustive" => {
                self.opportunistic = !value.parse::<bool>().map_err(|_| Error::Parse(format!("bad flag `{value}`")))?
            }
            "budget" => self.max_evals = Some(int()?),
            "max-iterations" => self.max_iterations = Some(int()?),
            _ => return Err(Error::UnknownKey { kind: "solver option", key: key.to_owned() }),
        }
        Ok(())
    }

    /// Short label such as `ds[gaussian:r=1|coord]`.
    pub fn label(&self) -> String {
        match self.solver {
            SolverKind::Stp => "stp".to_owned(),
            SolverKind::DirectSearch => format!("ds[{}|{}]", self.sketch, self.poll),
        }
    }
}

/// Sufficient-decrease test for a trial step of squared length `step_norm_sq`.
pub fn sufficient_decrease(f_x: f64, f_trial: f64, alpha: f64, step_norm_sq: f64, rule: DecreaseRule, c: f64) -> bool {
    let forcing = match rule {
        DecreaseRule::Theoretical => 0.5 * c * alpha * alpha * step_norm_sq,
        DecreaseRule::Practical => PRACTICAL_DECREASE.min(PRACTICAL_DECREASE * alpha * alpha * step_norm_sq),
    };
    f_trial < f_x - forcing
}

pub fn step_size_update(alpha: f64, success: bool, cfg: &SolverConfig) -> f64 {
    if success {
        (cfg.gamma_inc * alpha).min(cfg.alpha_max)
    } else {
        cfg.gamma_dec * alpha
    }
}

/// Runs whichever solver `cfg.solver` names.
pub fn run(problem: &Problem, cfg: &SolverConfig, rng: &mut RngStream) -> Result<RunRecord> {
    match cfg.solver {
        SolverKind::DirectSearch => run_direct_search(problem, cfg, rng),
        SolverKind::Stp => run_stp(problem, cfg, rng),
    }
}

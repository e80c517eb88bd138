use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;

use super::profile::{evals_to_accuracy, performance_profile, write_profile_csv, Profile};
use crate::error::{Error, Result};
use crate::format;
use crate::problem::Problem;
use crate::problems;
use crate::record::{write_summary_csv, EvalCount, RunRecord, SummaryRow};
use crate::rng::{RngStream, StreamId};
use crate::solver::{self, SolverConfig};

/// A named solver configuration inside a campaign.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverSpec {
    pub name: String,
    pub config: SolverConfig,
}

impl SolverSpec {
    /// Parses whitespace-separated `key=value` tokens: `name` plus any
    /// [`SolverConfig::set_option`] key except the budget settings.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = SolverConfig::default();
        let mut name = None;
        for token in text.split_whitespace() {
            let (k, v) = token
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected `key=value` in solver spec, got `{token}`")))?;
            match k {
                "name" => name = Some(v.to_owned()),
                "budget" | "max-iterations" => {
                    return Err(Error::invalid(format!("`{k}` is set by the campaign, not per solver")))
                }
                _ => cfg.set_option(k, v)?,
            }
        }
        cfg.validate()?;
        let name = name.unwrap_or_else(|| cfg.label());
        if name.contains(',') || name.contains('"') {
            return Err(Error::invalid(format!("solver name `{name}` must not contain commas or quotes")));
        }
        Ok(Self { name, config: cfg })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Campaign {
    pub problems: Vec<String>,
    pub solvers: Vec<SolverSpec>,
    /// Repetitions for randomized solvers; deterministic ones run once.
    pub reps: u64,
    /// Budget per problem is `budget_multiplier * (n + 1)`.
    pub budget_multiplier: u64,
    pub taus: Vec<f64>,
    pub master_seed: u64,
}

impl Campaign {
    /// Parses the flat config format:
    ///
    /// ```text
    /// # comment
    /// master_seed = 1
    /// reps = 10
    /// budget_multiplier = 50
    /// tau = 1e-1, 1e-3
    /// problem = regression:n=100,m=200
    /// solver = name=coord sketch=identity poll=coord
    /// solver = name=stp solver=stp
    /// ```
    ///
    /// `problem`, `solver` and `tau` may repeat.
    pub fn parse(text: &str) -> Result<Self> {
        let mut c = Campaign {
            problems: Vec::new(),
            solvers: Vec::new(),
            reps: 10,
            budget_multiplier: 200,
            taus: Vec::new(),
            master_seed: 0,
        };
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let at = |msg: String| Error::Parse(format!("line {}: {msg}", lineno + 1));
            let (key, value) = line.split_once('=').ok_or_else(|| at(format!("expected `key = value`: `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            let int = || value.parse::<u64>().map_err(|_| at(format!("bad integer `{value}`")));
            match key {
                "master_seed" => c.master_seed = int()?,
                "reps" => c.reps = int()?,
                "budget_multiplier" => c.budget_multiplier = int()?,
                "tau" => {
                    for t in value.split(',') {
                        let t = t.trim();
                        c.taus.push(t.parse().map_err(|_| at(format!("bad accuracy level `{t}`")))?);
                    }
                }
                "problem" => c.problems.push(value.to_owned()),
                "solver" => c.solvers.push(SolverSpec::parse(value).map_err(|e| at(e.to_string()))?),
                _ => return Err(at(format!("unknown setting `{key}`"))),
            }
        }
        if c.taus.is_empty() {
            c.taus = vec![1e-1, 1e-3, 1e-5];
        }
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.problems.is_empty() || self.solvers.is_empty() {
            return Err(Error::invalid("campaign needs at least one problem and one solver"));
        }
        if self.reps == 0 || self.budget_multiplier == 0 {
            return Err(Error::invalid("reps and budget_multiplier must be positive"));
        }
        if let Some(t) = self.taus.iter().find(|t| !(**t > 0.0 && **t <= 1.0)) {
            return Err(Error::invalid(format!("accuracy level {t} outside (0, 1]")));
        }
        for (i, s) in self.solvers.iter().enumerate() {
            if self.solvers[..i].iter().any(|o| o.name == s.name) {
                return Err(Error::invalid(format!("solver name `{}` used twice", s.name)));
            }
        }
        Ok(())
    }

    /// Repetitions actually run for a solver.
    pub fn reps_for(&self, spec: &SolverSpec) -> u64 {
        if spec.config.is_deterministic() {
            1
        } else {
            self.reps
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FStarSource {
    Known,
    /// Lowest value seen in any run of the campaign.
    BestFound,
}

#[derive(Debug, Clone)]
pub struct ProblemOutcome {
    pub key: String,
    pub dim: usize,
    pub budget: u64,
    pub f_star: f64,
    pub f_star_source: FStarSource,
}

#[derive(Debug, Clone)]
pub struct CampaignRun {
    pub problem: usize,
    pub solver: usize,
    pub rep: u64,
    pub record: RunRecord,
}

#[derive(Debug, Clone)]
pub struct CampaignResult {
    pub problems: Vec<ProblemOutcome>,
    /// Sorted by (problem, solver, rep) in config order.
    pub runs: Vec<CampaignRun>,
    pub summary: Vec<SummaryRow>,
    pub profiles: Vec<(f64, Profile)>,
}

/// Runs every (problem, solver, rep) triple. Runs execute in parallel; each
/// draws from its own stream keyed by the master seed and the triple, so the
/// results do not depend on scheduling.
pub fn run_campaign(c: &Campaign) -> Result<CampaignResult> {
    c.validate()?;
    let built: Vec<Problem> = c
        .problems
        .iter()
        .map(|k| problems::build(k, c.master_seed))
        .collect::<Result<_>>()?;

    let mut jobs = Vec::new();
    for p in 0..built.len() {
        for (s, spec) in c.solvers.iter().enumerate() {
            for rep in 0..c.reps_for(spec) {
                jobs.push((p, s, rep));
            }
        }
    }

    let mut runs: Vec<CampaignRun> = jobs
        .par_iter()
        .map(|&(p, s, rep)| {
            let problem = &built[p];
            let spec = &c.solvers[s];
            let cfg = SolverConfig {
                max_evals: Some(c.budget_multiplier * (problem.dim() as u64 + 1)),
                ..spec.config.clone()
            };
            let mut rng = RngStream::new(c.master_seed, StreamId::new(c.problems[p].as_str(), spec.name.as_str(), rep));
            solver::run(problem, &cfg, &mut rng).map(|record| CampaignRun { problem: p, solver: s, rep, record })
        })
        .collect::<Result<_>>()?;

    // first pass: f* per problem
    let outcomes: Vec<ProblemOutcome> = built
        .iter()
        .enumerate()
        .map(|(p, problem)| {
            let (f_star, source) = match problem.f_star() {
                Some(v) => (v, FStarSource::Known),
                None => {
                    let best = runs
                        .iter()
                        .filter(|r| r.problem == p)
                        .flat_map(|r| r.record.history.iter().map(|h| h.f))
                        .fold(f64::INFINITY, f64::min);
                    (best, FStarSource::BestFound)
                }
            };
            ProblemOutcome {
                key: c.problems[p].clone(),
                dim: problem.dim(),
                budget: c.budget_multiplier * (problem.dim() as u64 + 1),
                f_star,
                f_star_source: source,
            }
        })
        .collect();

    for run in &mut runs {
        let f_star = outcomes[run.problem].f_star;
        let f0 = run.record.f0();
        run.record.evals_to_accuracy = c
            .taus
            .iter()
            .map(|&tau| {
                // a known f* can sit above f0 only through rounding; count it as solved at once
                evals_to_accuracy(&run.record.history, f0, f_star.min(f0), tau).map(|n| (tau, n))
            })
            .collect::<Result<_>>()?;
    }

    let summary: Vec<SummaryRow> = runs
        .iter()
        .map(|r| SummaryRow::from_record(&c.problems[r.problem], &c.solvers[r.solver].name, r.rep, &r.record))
        .collect();
    let profiles = profiles_from_summary(&c.taus, &summary)?;

    Ok(CampaignResult { problems: outcomes, runs, summary, profiles })
}

/// Rebuilds the count matrix (problems × solver instances) from summary rows
/// and computes one profile per accuracy level. Problems and instances keep
/// their first-appearance order.
pub fn profiles_from_summary(taus: &[f64], rows: &[SummaryRow]) -> Result<Vec<(f64, Profile)>> {
    let mut problems: Vec<&str> = Vec::new();
    let mut instances: Vec<(&str, u64)> = Vec::new();
    for r in rows {
        if !problems.contains(&r.problem.as_str()) {
            problems.push(&r.problem);
        }
        if !instances.contains(&(r.solver.as_str(), r.seed)) {
            instances.push((&r.solver, r.seed));
        }
    }
    let names: Vec<String> = instances.iter().map(|(s, _)| s.to_string()).collect();

    taus.iter()
        .map(|&tau| {
            // an instance missing a problem counts as not reached
            let mut counts = vec![vec![EvalCount::NotReached; instances.len()]; problems.len()];
            for r in rows {
                let p = problems.iter().position(|x| *x == r.problem).expect("collected above");
                let j = instances.iter().position(|x| *x == (r.solver.as_str(), r.seed)).expect("collected above");
                if let Some((_, n)) = r.evals_to_accuracy.iter().find(|(t, _)| *t == tau) {
                    counts[p][j] = *n;
                }
            }
            let profile = performance_profile(&counts, &names, None)?;
            for &p in &profile.dropped {
                log::warn!("tau {}: no solver reached the target on {}", format::tau_label(tau), problems[p]);
            }
            Ok((tau, profile))
        })
        .collect()
}

impl CampaignResult {
    /// Writes `manifest.txt`, `summary.csv`, `profile.csv` and one history CSV
    /// per run under `histories/`.
    pub fn write(&self, c: &Campaign, dir: &Path) -> Result<()> {
        let hist_dir = dir.join("histories");
        fs::create_dir_all(&hist_dir)?;

        let mut summary = Vec::new();
        write_summary_csv(&self.summary, &c.taus, &mut summary)?;
        fs::write(dir.join("summary.csv"), summary)?;

        let mut profile = Vec::new();
        write_profile_csv(&self.profiles, &mut profile)?;
        fs::write(dir.join("profile.csv"), profile)?;

        let mut manifest = self.manifest(c);
        manifest.push_str("histories\n");
        for run in &self.runs {
            let file = history_file_name(run.problem, run.solver, run.rep);
            let _ = writeln!(
                manifest,
                "  {file} problem={} solver={} rep={}",
                c.problems[run.problem], c.solvers[run.solver].name, run.rep
            );
            let mut buf = Vec::new();
            run.record.write_history_csv(&mut buf)?;
            fs::write(hist_dir.join(file), buf)?;
        }
        fs::write(dir.join("manifest.txt"), manifest)?;
        Ok(())
    }

    fn manifest(&self, c: &Campaign) -> String {
        let mut m = String::new();
        let _ = writeln!(m, "master_seed = {}", c.master_seed);
        let _ = writeln!(m, "reps = {}", c.reps);
        let _ = writeln!(m, "budget_multiplier = {}", c.budget_multiplier);
        let taus: Vec<String> = c.taus.iter().map(|t| format::tau_label(*t)).collect();
        let _ = writeln!(m, "tau = {}", taus.join(", "));
        m.push_str("problems\n");
        for p in &self.problems {
            let source = match p.f_star_source {
                FStarSource::Known => "known",
                FStarSource::BestFound => "best-found",
            };
            let _ = writeln!(
                m,
                "  {} n={} budget={} f_star={} f_star_source={source}",
                p.key,
                p.dim,
                p.budget,
                format::float(p.f_star)
            );
        }
        m.push_str("solvers\n");
        for s in &c.solvers {
            let cfg = &s.config;
            let _ = writeln!(
                m,
                "  {} solver={} sketch={} poll={} rule={} alpha0={} alpha_max={} gamma_inc={} gamma_dec={} c={} opportunistic={} reps={}",
                s.name,
                cfg.solver,
                cfg.sketch,
                cfg.poll,
                cfg.rule,
                format::float(cfg.alpha0),
                format::float(cfg.alpha_max),
                format::float(cfg.gamma_inc),
                format::float(cfg.gamma_dec),
                format::float(cfg.c),
                cfg.opportunistic,
                c.reps_for(s)
            );
        }
        for (tau, profile) in &self.profiles {
            for &p in &profile.dropped {
                let _ = writeln!(m, "unsolved tau={} problem={}", format::tau_label(*tau), c.problems[p]);
            }
        }
        m
    }
}

pub fn history_file_name(problem: usize, solver: usize, rep: u64) -> String {
    format!("p{problem:03}-s{solver:02}-r{rep:03}.csv")
}

/// Mean final objective per solver for problem index `p`, in solver order.
pub fn mean_final_objective(result: &CampaignResult, p: usize, n_solvers: usize) -> Vec<f64> {
    (0..n_solvers)
        .map(|s| {
            let vals: Vec<f64> = result
                .runs
                .iter()
                .filter(|r| r.problem == p && r.solver == s)
                .map(|r| r.record.final_f)
                .collect();
            vals.iter().sum::<f64>() / vals.len() as f64
        })
        .collect()
}

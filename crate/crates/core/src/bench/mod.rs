//! Accuracy counts, performance profiles and experiment campaigns.

mod campaign;
mod profile;

pub use campaign::{
    history_file_name, mean_final_objective, profiles_from_summary, run_campaign, Campaign, CampaignResult,
    CampaignRun, FStarSource, ProblemOutcome, SolverSpec,
};
pub use profile::{
    evals_to_accuracy, log_grid, performance_profile, write_profile_csv, Profile, ProfileCurve, PROFILE_GRID_POINTS,
};

use crate::error::Result;
use crate::rng::RngStream;
use crate::sketch::{hashing_singular_value_experiment, SingularValueStats};

/// Default `(n, r)` pairs for the hashing singular-value experiment: `n`
/// varying at `r = 5`, then `r` varying at `n = 10⁴`.
pub fn default_hashing_pairs() -> Vec<(usize, usize)> {
    let mut pairs: Vec<(usize, usize)> = [1000, 2000, 4000, 8000, 16000].iter().map(|&n| (n, 5)).collect();
    pairs.extend([2, 4, 8, 16].iter().map(|&r| (10_000, r)));
    pairs
}

/// σ_min statistics of s = 1 hashing matrices; 100 trials in the default run.
pub fn hashing_sv(pairs: &[(usize, usize)], trials: usize, seed: u64) -> Result<Vec<SingularValueStats>> {
    let mut rng = RngStream::new(seed, crate::rng::StreamId::new("hashing-sv", "", 0));
    hashing_singular_value_experiment(pairs, trials, &mut rng)
}

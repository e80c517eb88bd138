//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the binary exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::DVector;

use dsubspace::bench::{self, performance_profile, Campaign, SolverSpec};
use dsubspace::polling::{
    cosine_measure_at, estimate_descent_probability, is_descent_set, make_coordinate_pss, random_unit_vector,
    random_unit_success_bound,
};
use dsubspace::problems;
use dsubspace::record::{EvalCount, Termination};
use dsubspace::sketch::{hashing_sv_stats, is_well_aligned, make_gaussian, make_hashing, make_orthogonal};
use dsubspace::solver::{diagnostic_alpha_bar, diagnostics_mu_p0, run_direct_search, run_direct_search_observed};
use dsubspace::{DecreaseRule, PollFamily, Problem, RngStream, SketchKind, SolverConfig};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

type Check = fn() -> Outcome;

const CRITERIA: &[(&str, u64, Check)] = &[
    ("cosine-measure constants", 10, cosine_constants),
    ("random-unit descent probability", 30, descent_probability),
    ("sketch ensemble exactness", 30, sketch_exactness),
    ("hashing singular-value scaling", 120, hashing_scaling),
    ("descent and alignment imply success", 60, success_implication),
    ("step-size diagnostics", 1, diagnostics),
    ("deterministic convergence on the sphere", 5, sphere_golden),
    ("constant-function termination", 5, constant_function),
    ("robust-regression solver ordering", 300, regression_ordering),
    ("performance profiles", 600, profiles),
];

fn main() -> ExitCode {
    let mut failed = Vec::new();
    for (i, (name, limit, check)) in CRITERIA.iter().enumerate() {
        let start = Instant::now();
        let out = check();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(*limit);
        let pass = out.pass && in_time;
        println!(
            "[{}] {:>2}. {name} ({:.1}s, limit {limit}s): {}",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            elapsed.as_secs_f64(),
            out.detail
        );
        if !pass {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("all {} acceptance criteria passed", CRITERIA.len());
        ExitCode::SUCCESS
    } else {
        println!("failed criteria: {failed:?}");
        ExitCode::FAILURE
    }
}

fn cosine_constants() -> Outcome {
    let mut rng = RngStream::from_seed(101);
    let families = [PollFamily::CoordinatePss, PollFamily::UniformAnglePss, PollFamily::CoordinateNegOnes];
    let mut worst_gap = f64::INFINITY;
    for r in 1..=10 {
        for family in families {
            let set = family.generate(r, &mut rng).unwrap();
            let (kappa, _) = family.constants(r).unwrap();
            for _ in 0..10_000 {
                let v = random_unit_vector(r, &mut rng);
                let cm = cosine_measure_at(&set, &v).unwrap();
                worst_gap = worst_gap.min(cm - kappa);
            }
        }
    }
    let lower_ok = worst_gap >= -1e-12;

    let mut excess = Vec::new();
    for r in 1..=10 {
        let set = make_coordinate_pss(r);
        let mut min = f64::INFINITY;
        for _ in 0..100_000 {
            let v = random_unit_vector(r, &mut rng);
            min = min.min(cosine_measure_at(&set, &v).unwrap());
        }
        excess.push(min - 1.0 / (r as f64).sqrt());
    }
    let tight: Vec<usize> = (1..=10).filter(|r| (0.0..=0.01).contains(&excess[r - 1])).collect();
    let tight_ok = tight.len() == 10;
    let listing: Vec<String> = excess.iter().enumerate().map(|(i, e)| format!("r={}:{:.4}", i + 1, e)).collect();
    outcome(
        lower_ok && tight_ok,
        format!(
            "min(cm - kappa) = {worst_gap:.3e}; [I -I] sampled-min excess over r^-1/2: {}; within 0.01 for r in {tight:?}",
            listing.join(" ")
        ),
    )
}

fn descent_probability() -> Outcome {
    let trials = 100_000;
    let mut rng = RngStream::from_seed(102);
    let p = estimate_descent_probability(PollFamily::RandomUnit { m: 2 }, 100, 1.0, trials, &mut rng).unwrap();
    let se = (p * (1.0 - p) / trials as f64).sqrt();
    let bound = random_unit_success_bound(2, 1.0);
    outcome(p >= bound - 3.0 * se, format!("frequency {p:.4} (se {se:.4}) vs bound {bound:.4}"))
}

fn sketch_exactness() -> Outcome {
    let mut rng = RngStream::from_seed(103);
    let mut ok = true;
    let mut notes = Vec::new();

    // s = 1 entries are ±1, so the norm is exact in floating point; for s > 1
    // the stored 1/√s is rounded and we allow a few ulps
    let mut worst_rel = 0.0f64;
    for &(r, n, s) in &[(5, 10, 1), (10, 1000, 1), (3, 64, 1), (5, 10, 3), (8, 500, 2), (20, 1000, 4)] {
        let p = make_hashing(r, n, s, &mut rng).unwrap();
        let fro = p.frobenius_norm();
        let target = (n as f64).sqrt();
        if s == 1 {
            ok &= fro == target;
        }
        worst_rel = worst_rel.max((fro - target).abs() / target);
    }
    ok &= worst_rel <= 4.0 * f64::EPSILON;
    notes.push(format!("hashing Frobenius max rel err {worst_rel:.1e}"));

    let mut worst_sv = 0.0f64;
    for &(r, n) in &[(1, 10), (5, 50), (10, 100), (20, 400)] {
        let p = make_orthogonal(r, n, &mut rng).unwrap();
        let target = (n as f64 / r as f64).sqrt();
        for sv in p.singular_values() {
            worst_sv = worst_sv.max((sv - target).abs());
        }
    }
    ok &= worst_sv <= 1e-10;
    notes.push(format!("orthogonal sv max abs err {worst_sv:.1e}"));

    let n = 100;
    let g = random_unit_vector(n, &mut rng) * 3.0;
    let draws = 10_000;
    let mut sum = 0.0;
    for _ in 0..draws {
        let p = make_gaussian(10, n, &mut rng).unwrap();
        sum += p.apply(&g).norm_squared() / g.norm_squared();
    }
    let mean = sum / draws as f64;
    ok &= (0.95..=1.05).contains(&mean);
    notes.push(format!("gaussian mean |Pg|^2/|g|^2 = {mean:.4}"));
    outcome(ok, notes.join("; "))
}

fn hashing_scaling() -> Outcome {
    let mut rng = RngStream::from_seed(104);
    let mean = |n, r, rng: &mut RngStream| hashing_sv_stats(n, r, 100, rng).unwrap().mean;
    let by_n: Vec<f64> = [1000, 4000, 16000].iter().map(|&n| mean(n, 5, &mut rng)).collect();
    let ratios_n = [by_n[1] / by_n[0], by_n[2] / by_n[1]];
    let ratio_r = mean(10_000, 2, &mut rng) / mean(10_000, 8, &mut rng);
    let band = 1.8..=2.2;
    let ok = ratios_n.iter().all(|q| band.contains(q)) && band.contains(&ratio_r);
    outcome(
        ok,
        format!(
            "means over n = {:.2?}; ratios per 4x n = {:.3}, {:.3}; r=2 vs r=8 ratio = {ratio_r:.3}",
            by_n, ratios_n[0], ratios_n[1]
        ),
    )
}

/// On `Σ λ_i x_i²` (gradient Lipschitz constant `2 max λ`), every iteration
/// whose polling set is a descent set for the sketched gradient, whose sketch
/// is well aligned, and whose step is below `ᾱ‖∇f‖` must succeed.
fn success_implication() -> Outcome {
    let n = 20;
    let cond = 2.0;
    let problem = problems::quadratic(n, cond);
    let lipschitz = 2.0 * cond;
    let eta = 0.5;
    let c = 1.0;

    let cases: [(SketchKind, f64, f64); 2] = [
        // orthogonal: ‖P‖ = σ_min = √(n/r)
        (SketchKind::Orthogonal { r: 4 }, (n as f64 / 4.0).sqrt(), (n as f64 / 4.0).sqrt()),
        (SketchKind::Gaussian { r: 4 }, 4.0, 0.05),
    ];

    let mut iterations = 0u64;
    let mut antecedent = 0u64;
    let mut violations = 0u64;
    for (kind, pmax, sigma) in cases {
        let r = kind.reduced_dim(n);
        let (kappa, dmax) = PollFamily::CoordinatePss.constants(r).unwrap();
        let alpha_bar = diagnostic_alpha_bar(kappa, eta, lipschitz, c, pmax, dmax).unwrap();
        for seed in 0..30 {
            // small initial steps put early iterations below ᾱ‖∇f‖
            let cfg = SolverConfig {
                sketch: kind,
                rule: DecreaseRule::Theoretical,
                c,
                alpha0: [1.0, 1e-2, 1e-4][seed as usize % 3],
                max_iterations: Some(300),
                ..SolverConfig::default()
            };
            let mut rng = RngStream::from_seed(1000 + seed);
            run_direct_search_observed(&problem, &cfg, &mut rng, &mut |v| {
                iterations += 1;
                let grad = problem.gradient(v.x.as_slice()).unwrap();
                if grad.norm() == 0.0 || v.outcome.interrupted {
                    return;
                }
                let sketched = v.sketch.apply(&grad);
                if sketched.iter().all(|g| *g == 0.0) {
                    return;
                }
                let descent = is_descent_set(v.directions, &sketched, kappa, dmax).unwrap();
                let aligned = is_well_aligned(v.sketch, &grad, eta, sigma, pmax).unwrap();
                if descent && aligned && v.alpha < alpha_bar * grad.norm() {
                    antecedent += 1;
                    if !v.outcome.success {
                        violations += 1;
                    }
                }
            })
            .unwrap();
        }
    }
    outcome(
        iterations >= 10_000 && violations == 0 && antecedent > 0,
        format!("{iterations} iterations, {antecedent} met the hypotheses, {violations} violations"),
    )
}

fn diagnostics() -> Outcome {
    let (mu, p0) = diagnostics_mu_p0(2.0, 0.5).unwrap();
    outcome(mu == 1.0 && p0 == 0.5, format!("mu = {mu}, p0 = {p0}"))
}

fn sphere_golden() -> Outcome {
    let problem = problems::build("sphere:n=50", 0).unwrap();
    let cfg = SolverConfig { max_evals: Some(200 * 51), ..SolverConfig::default() };
    let record = run_direct_search(&problem, &cfg, &mut RngStream::from_seed(0)).unwrap();
    let golden = include_str!("golden/sphere50_history.csv");
    let matches = record.history_csv() == golden;
    outcome(
        record.final_f <= 1e-3 && matches,
        format!(
            "final f = {:.3e} after {} evals; history matches reference: {matches}",
            record.final_f,
            record.total_evals()
        ),
    )
}

fn constant_function() -> Outcome {
    let problem = Problem::new("constant", DVector::from_element(6, 0.5), |_| 3.0);
    let configs = [
        (SketchKind::Identity, PollFamily::CoordinatePss),
        (SketchKind::Identity, PollFamily::UniformAnglePss),
        (SketchKind::Identity, PollFamily::CoordinateNegOnes),
        (SketchKind::Gaussian { r: 2 }, PollFamily::CoordinatePss),
        (SketchKind::Orthogonal { r: 3 }, PollFamily::UniformAnglePss),
        (SketchKind::Hashing { r: 2, s: 1 }, PollFamily::CoordinateNegOnes),
    ];
    let mut ok = true;
    let mut counts = Vec::new();
    for (sketch, poll) in configs {
        let cfg = SolverConfig { sketch, poll, ..SolverConfig::default() };
        let rec = run_direct_search(&problem, &cfg, &mut RngStream::from_seed(5)).unwrap();
        let per_poll = poll.size(sketch.reduced_dim(6)).unwrap() as u64;
        ok &= rec.termination == Termination::StepSizeFloor
            && rec.iterations() == 20
            && rec.total_evals() == 1 + 20 * per_poll
            && rec.history.windows(2).all(|w| w[1].alpha == 0.5 * w[0].alpha);
        counts.push(rec.iterations());
    }
    outcome(ok, format!("unsuccessful iterations per config: {counts:?}"))
}

fn regression_ordering() -> Outcome {
    let campaign = Campaign {
        problems: vec!["regression:n=100,m=200".into()],
        solvers: [
            "name=ds-coord",
            "name=ds-random-unit poll=random_unit:m=2",
            "name=stp solver=stp",
            "name=ds-gaussian-r1 sketch=gaussian:r=1",
        ]
        .iter()
        .map(|s| SolverSpec::parse(s).unwrap())
        .collect(),
        reps: 10,
        budget_multiplier: 50,
        taus: vec![1e-1],
        master_seed: 2024,
    };
    let result = bench::run_campaign(&campaign).unwrap();
    let means = bench::mean_final_objective(&result, 0, 4);
    let (coord, random_unit, stp, gaussian) = (means[0], means[1], means[2], means[3]);
    outcome(
        gaussian < coord && random_unit < coord,
        format!(
            "mean final f: coordinate {coord:.4}, random-unit {random_unit:.4}, stp {stp:.4}, gaussian r=1 {gaussian:.4}"
        ),
    )
}

fn profiles() -> Outcome {
    let names = vec!["A".to_string(), "B".to_string()];
    let counts = vec![
        vec![EvalCount::Reached(10), EvalCount::Reached(20)],
        vec![EvalCount::Reached(30), EvalCount::Reached(15)],
    ];
    let p = performance_profile(&counts, &names, Some(&[1.0, 2.0])).unwrap();
    let example_ok = p.curves[0].points == [(1.0, 0.5), (2.0, 1.0)] && p.curves[1].points == [(1.0, 0.5), (2.0, 1.0)];

    let mut campaign = Campaign::parse(
        "
        master_seed = 11
        reps = 10
        budget_multiplier = 10
        tau = 1e-1, 1e-3, 1e-5
        solver = name=ds-coord
        solver = name=ds-random-unit poll=random_unit:m=2
        solver = name=ds-gaussian-r1 sketch=gaussian:r=1
        solver = name=ds-hashing-r4 sketch=hashing:r=4 poll=coord
        solver = name=ds-orthogonal-r2 sketch=orthogonal:r=2 poll=uniform
        solver = name=stp solver=stp
        problem = sphere:n=25
        ",
    )
    .unwrap();
    campaign.problems = problems::ANALYTIC_SUITE.iter().map(|s| s.to_string()).collect();
    let result = bench::run_campaign(&campaign).unwrap();

    let mut curves_ok = true;
    let mut last_matches = true;
    for (tau, profile) in &result.profiles {
        for curve in &profile.curves {
            curves_ok &= curve.points.windows(2).all(|w| w[1].1 >= w[0].1)
                && curve.points.iter().all(|(_, rho)| (0.0..=1.0).contains(rho));
            // at the largest ratio, ρ is the solver's mean fraction of solved problems
            let rows: Vec<_> = result.summary.iter().filter(|r| r.solver == curve.solver).collect();
            let solved = rows
                .iter()
                .filter(|r| r.evals_to_accuracy.iter().any(|(t, n)| t == tau && n.is_reached()))
                .count() as f64;
            let expected = solved / rows.len() as f64;
            let got = curve.points.last().unwrap().1;
            last_matches &= (got - expected).abs() < 1e-12;
        }
    }
    outcome(
        example_ok && curves_ok && last_matches,
        format!(
            "2x2 example exact: {example_ok}; {} runs on {} problems, curves monotone and bounded: {curves_ok}, endpoints equal solved fractions: {last_matches}",
            result.runs.len(),
            campaign.problems.len()
        ),
    )
}

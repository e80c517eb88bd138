use nalgebra::DVector;
use proptest::prelude::*;

use dsubspace::polling::{cosine_measure_at, random_unit_vector};
use dsubspace::problem::gradient_check;
use dsubspace::solver::run;
use dsubspace::{problems, PollFamily, RngStream, SketchKind, SolverConfig};

fn sketch_kind(n: usize) -> impl Strategy<Value = SketchKind> {
    let r = 1..=n;
    prop_oneof![
        Just(SketchKind::Identity),
        r.clone().prop_map(|r| SketchKind::Gaussian { r }),
        r.clone().prop_map(|r| SketchKind::Orthogonal { r }),
        r.prop_flat_map(|r| (1..=r).prop_map(move |s| SketchKind::Hashing { r, s })),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sketch_products_match_dense(n in 1usize..30, seed in any::<u64>(), kind in (1usize..30).prop_flat_map(sketch_kind)) {
        let r = kind.reduced_dim(n);
        prop_assume!(r <= n);
        let mut rng = RngStream::from_seed(seed);
        let p = kind.generate(n, &mut rng).unwrap();
        let dense = p.to_dense();
        prop_assert_eq!(dense.shape(), (r, n));
        let g = DVector::from_fn(n, |_, _| rng.standard_normal());
        let d = DVector::from_fn(r, |_, _| rng.standard_normal());
        prop_assert!((p.apply(&g) - &dense * &g).norm() <= 1e-12 * (1.0 + g.norm()));
        prop_assert!((p.apply_transpose(&d) - dense.transpose() * &d).norm() <= 1e-12 * (1.0 + d.norm()));
    }

    #[test]
    fn deterministic_sets_meet_their_kappa(r in 1usize..12, seed in any::<u64>()) {
        let mut rng = RngStream::from_seed(seed);
        for family in [PollFamily::CoordinatePss, PollFamily::UniformAnglePss, PollFamily::CoordinateNegOnes] {
            let set = family.generate(r, &mut rng).unwrap();
            let (kappa, dmax) = family.constants(r).unwrap();
            prop_assert!(set.within_norm_band(dmax));
            let v = random_unit_vector(r, &mut rng);
            prop_assert!(cosine_measure_at(&set, &v).unwrap() >= kappa - 1e-12);
        }
    }

    #[test]
    fn runs_replay_bit_for_bit(seed in any::<u64>(), kind in sketch_kind(8), stp in any::<bool>()) {
        let problem = problems::build("rosenbrock:n=8", 0).unwrap();
        let cfg = SolverConfig {
            sketch: kind,
            poll: PollFamily::RandomUnit { m: 2 },
            solver: if stp { dsubspace::SolverKind::Stp } else { dsubspace::SolverKind::DirectSearch },
            max_evals: Some(400),
            ..SolverConfig::default()
        };
        let a = run(&problem, &cfg, &mut RngStream::from_seed(seed)).unwrap();
        let b = run(&problem, &cfg, &mut RngStream::from_seed(seed)).unwrap();
        prop_assert_eq!(a.history_csv(), b.history_csv());
        prop_assert!(a.final_f <= a.f0());
        prop_assert!(a.total_evals() <= 400);
    }

    #[test]
    fn suite_gradients_match_finite_differences(idx in 0usize..problems::ANALYTIC_SUITE.len(), seed in any::<u64>()) {
        let key = problems::ANALYTIC_SUITE[idx];
        // gradients are dimension-generic; check them at a small size of the same family
        let small = match key.split(':').next().unwrap() {
            "quad" => "quad:n=9,cond=1000".to_string(),
            "powell" => "powell:n=8".to_string(),
            name => format!("{name}:n=9"),
        };
        let p = problems::build(&small, 0).unwrap();
        let mut rng = RngStream::from_seed(seed);
        let x = DVector::from_fn(p.dim(), |_, _| rng.standard_normal());
        prop_assert!(gradient_check(&p, &x, 1e-6).unwrap() < 1e-5);
    }
}

use proptest::prelude::*;

use tqm_core::adversaries::HardInstance;
use tqm_core::estimators::{select_query_points, Estimator, IwState, MwState};
use tqm_core::harness::{run_trial, Algorithm, AdversaryKind, TrialConfig};
use tqm_core::infotheory::{kl_divergence, FiniteDistribution};
use tqm_core::{bounds_from_feedback, sup_norm_distance, CdfEstimate, EmpiricalCdf, MonotoneFunction, QueryRound};

fn monotone(n: usize) -> impl Strategy<Value = MonotoneFunction> {
    prop_oneof![
        (1..=n + 1).prop_map(move |x| MonotoneFunction::step(n, x).unwrap()),
        prop::collection::vec(0.0..=1.0f64, n).prop_map(|mut v| {
            v.sort_by(f64::total_cmp);
            MonotoneFunction::dense(v).unwrap()
        }),
    ]
}

fn sized_monotone() -> impl Strategy<Value = MonotoneFunction> {
    (1usize..40).prop_flat_map(monotone)
}

fn simplex(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..1.0f64, n)
        .prop_filter("positive mass", |w| w.iter().sum::<f64>() > 1e-6)
        .prop_map(|w| {
            let t: f64 = w.iter().sum();
            w.iter().map(|x| x / t).collect()
        })
}

fn distribution(n: usize) -> impl Strategy<Value = FiniteDistribution> {
    simplex(n).prop_map(|p| FiniteDistribution::from_weights(&p).unwrap())
}

proptest! {
    #[test]
    fn bounds_sandwich_the_function(
        v in sized_monotone(),
        picks in prop::collection::vec(any::<prop::sample::Index>(), 0..12),
    ) {
        let n = v.n();
        let mut q: Vec<usize> = picks.iter().map(|ix| ix.index(n) + 1).collect();
        q.sort_unstable();
        let b = bounds_from_feedback(&QueryRound::observe(&v, q.clone()).unwrap(), n).unwrap();
        for i in 1..=n {
            prop_assert!(b.lower[i - 1] <= v.eval(i) && v.eval(i) <= b.upper[i - 1]);
            prop_assert!(b.width[i - 1] >= 0.0);
        }
        prop_assert!(b.lower.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(b.upper.windows(2).all(|w| w[0] <= w[1]));
        for &p in &q {
            prop_assert_eq!(b.width[p - 1], 0.0);
        }
    }

    #[test]
    fn certificate_holds((w, k, v) in (1usize..50).prop_flat_map(|n| (simplex(n), 1usize..33, monotone(n)))) {
        let q = select_query_points(&w, k).unwrap();
        let b = bounds_from_feedback(&QueryRound::observe(&v, q).unwrap(), w.len()).unwrap();
        let c: f64 = w.iter().zip(&b.width).map(|(a, d)| a * d).sum();
        prop_assert!(c <= 1.0 / (k + 1) as f64 + 1e-12, "{}", c);
    }

    #[test]
    fn sup_norm_is_a_metric(
        (f, g, h) in (1usize..30).prop_flat_map(|n| {
            let v = || prop::collection::vec(-2.0..2.0f64, n);
            (v(), v(), v())
        })
    ) {
        let d = |a: &[f64], b: &[f64]| sup_norm_distance(a, b).unwrap();
        prop_assert_eq!(d(&f, &f), 0.0);
        prop_assert_eq!(d(&f, &g), d(&g, &f));
        prop_assert!(d(&f, &h) <= d(&f, &g) + d(&g, &h) + 1e-12);
        if f != g {
            prop_assert!(d(&f, &g) > 0.0);
        }
    }

    #[test]
    fn accumulation_is_the_running_mean(vs in (1usize..20).prop_flat_map(|n| prop::collection::vec(monotone(n), 1..15))) {
        let n = vs[0].n();
        let mut acc = EmpiricalCdf::new(n);
        for v in &vs {
            acc.accumulate(v).unwrap();
        }
        let f = acc.values();
        for i in 1..=n {
            let mean = vs.iter().map(|v| v.eval(i)).sum::<f64>() / vs.len() as f64;
            prop_assert!((f[i - 1] - mean).abs() < 1e-12);
        }
        prop_assert!(f.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn mw_state_invariants(
        (n, k, vs) in (1usize..30, 1usize..10).prop_flat_map(|(n, k)| (Just(n), Just(k), prop::collection::vec(monotone(n), 1..25)))
    ) {
        let mut est = MwState::new(n, k, 1.0 / 3.0).unwrap();
        for v in &vs {
            let q = est.queries().unwrap();
            let a: Vec<f64> = q.iter().map(|&p| v.eval(p)).collect();
            est.observe(&a).unwrap();
            let w = est.coefficients();
            prop_assert!(w.iter().all(|&x| x > 0.0));
            prop_assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        let g = est.finalize().unwrap().estimate;
        prop_assert!(g.is_monotone());
        prop_assert!(g.values.iter().all(|x| (0.0..=1.0).contains(x)));
    }

    #[test]
    fn iw_state_invariants(
        (n, k, seed, vs) in (1usize..30, 1usize..10, any::<u64>()).prop_flat_map(|(n, k, s)| {
            (Just(n), Just(k), Just(s), prop::collection::vec(monotone(n), 1..40))
        })
    ) {
        let mut est = IwState::new(n, k, 0.05, seed).unwrap();
        for v in &vs {
            let q = est.begin_round().unwrap();
            est.round(v.eval(q)).unwrap();
            let w = est.coefficients();
            prop_assert!(w.iter().all(|&x| x > 0.0 && x.is_finite()));
            prop_assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
        let g = est.finalize().unwrap().estimate;
        prop_assert!(g.values.iter().all(|x| (0.0..=1.0).contains(x)));
    }

    #[test]
    fn clamp_and_isotonic_post_processing(v in prop::collection::vec(-1.0..2.0f64, 1..40), f in prop::collection::vec(0.0..=1.0f64, 1..40)) {
        let n = v.len().min(f.len());
        let mut f = f[..n].to_vec();
        f.sort_by(f64::total_cmp);
        let raw = CdfEstimate::new(v[..n].to_vec());
        let clamped = raw.clone().clamped();
        prop_assert!(sup_norm_distance(&clamped.values, &f).unwrap() <= sup_norm_distance(&raw.values, &f).unwrap());
        let iso = clamped.isotonic();
        prop_assert!(iso.is_monotone());
        prop_assert!(iso.values.iter().all(|x| (0.0..=1.0).contains(x)));
    }

    #[test]
    fn kl_non_negative_and_contracts((p, q, f, c) in (1usize..8).prop_flat_map(|n| {
        (distribution(n), distribution(n), prop::collection::vec(0usize..4, n), Just(4usize))
    })) {
        let d = kl_divergence(&p, &q).unwrap();
        prop_assert!(d >= 0.0);
        prop_assert_eq!(kl_divergence(&p, &p).unwrap(), 0.0);
        let pushed = kl_divergence(&p.pushforward(&f, c).unwrap(), &q.pushforward(&f, c).unwrap()).unwrap();
        prop_assert!(pushed <= d + 1e-12 || d.is_infinite());
    }

    #[test]
    fn hard_instance_mass_matches_cdf((k, m, theta_seed) in (1usize..6, 1usize..12, any::<u64>())) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(theta_seed);
        let inst = HardInstance::random(k * m, 1.0 / (6.0 * k as f64), &mut rng).unwrap();
        let f = inst.cdf();
        let p = inst.point_mass();
        let mut prev = 0.0;
        for i in 0..k * m {
            prop_assert!((f[i] - prev - p[i]).abs() < 1e-12);
            prev = f[i];
        }
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn trials_depend_only_on_their_seed(seeds in prop::collection::vec(any::<u64>(), 2..6)) {
        let cfg = TrialConfig::new(Algorithm::IwSingle, AdversaryKind::IidStep, 12, 0.4).unwrap().with_rounds(60);
        let run = |order: &[u64]| -> Vec<(u64, f64)> {
            order.iter().enumerate().map(|(i, &s)| {
                let r = run_trial(&cfg, i, s).unwrap();
                (r.seed, r.sup_error)
            }).collect()
        };
        let forward = run(&seeds);
        let reversed: Vec<u64> = seeds.iter().rev().copied().collect();
        let mut backward = run(&reversed);
        backward.reverse();
        prop_assert_eq!(forward, backward);
    }
}

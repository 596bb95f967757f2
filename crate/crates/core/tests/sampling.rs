mod common;

use metric_zero_one::metric_core::{in_d_n, DistanceVector};
use metric_zero_one::sampling::{
    sample_d_n, sample_mn_hitandrun, sample_mn_rejection, sample_s_like, substream, DeltaSchedule,
    HitAndRun, SamplerConfig, SamplerMethod,
};
use proptest::prelude::*;
use rand::Rng;

fn har_config() -> SamplerConfig {
    SamplerConfig {
        method: SamplerMethod::HitAndRun,
        ..SamplerConfig::default()
    }
}

#[test]
fn rejection_acceptance_for_three_points() {
    let mut rng = substream(21, 0, 0);
    let (mut draws, mut attempts) = (0u64, 0u64);
    while attempts < 1_000_000 {
        attempts += sample_mn_rejection(3, &mut rng, 1_000).unwrap().1;
        draws += 1;
    }
    let rate = draws as f64 / attempts as f64;
    assert!((rate - 0.5).abs() < 0.01, "{rate}");
}

#[test]
fn d_n_acceptance_matches_box_monte_carlo() {
    let delta = 0.25;
    let mut rng = substream(22, 0, 0);
    let (mut draws, mut attempts) = (0u64, 0u64);
    while attempts < 200_000 {
        let (d, a) = sample_d_n(3, delta, &mut rng, 1_000).unwrap();
        assert!(in_d_n(&d, delta).unwrap());
        attempts += a;
        draws += 1;
    }
    let library = draws as f64 / attempts as f64;

    let mut oracle = common::rng(23);
    let trials = 200_000;
    let lo = 0.5 - delta;
    let mut hits = 0;
    for _ in 0..trials {
        let d: Vec<f64> = (0..3).map(|_| oracle.random_range(lo..=1.0)).collect();
        if d[0] <= d[1] + d[2] && d[1] <= d[0] + d[2] && d[2] <= d[0] + d[1] {
            hits += 1;
        }
    }
    let brute = hits as f64 / trials as f64;
    assert!((library - brute).abs() < 0.01, "library {library}, oracle {brute}");
}

/// Hit-and-run on M_3 against the exact rejection sampler, compared on the
/// fraction of states whose smallest coordinate is at least 0.3 and on the
/// mean smallest coordinate.
#[test]
fn hit_and_run_agrees_with_rejection_on_three_points() {
    let samples = 60_000;
    let mut rng = substream(24, 0, 0);
    let exact: Vec<f64> = (0..samples)
        .map(|_| sample_mn_rejection(3, &mut rng, 1_000).unwrap().0.min_coord())
        .collect();
    let cfg = har_config();
    let mut chain = HitAndRun::new(3, &cfg);
    let mut rng = substream(25, 0, 0);
    let chained: Vec<f64> = (0..samples)
        .map(|_| {
            let d = chain.next_sample(&mut rng).unwrap();
            assert!(d.is_metric(1e-12));
            d.min_coord()
        })
        .collect();
    let frac = |v: &[f64]| v.iter().filter(|&&m| m >= 0.3).count() as f64 / v.len() as f64;
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    assert!((frac(&exact) - frac(&chained)).abs() < 0.02, "{} vs {}", frac(&exact), frac(&chained));
    assert!((mean(&exact) - mean(&chained)).abs() < 0.01);
}

#[test]
fn fresh_hit_and_run_chains_are_feasible() {
    for n in [3, 6, 9] {
        let mut rng = substream(26, n as u64, 0);
        let d = sample_mn_hitandrun(n, &har_config(), &mut rng).unwrap();
        assert!(d.is_metric(1e-12));
    }
}

fn coords(d: &DistanceVector) -> Vec<f64> {
    d.coords().to_vec()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn samplers_are_deterministic(seed in any::<u64>(), index in 0u64..1000, n in 2usize..6) {
        let a = sample_mn_rejection(n, &mut substream(seed, 1, index), 1_000_000).unwrap();
        let b = sample_mn_rejection(n, &mut substream(seed, 1, index), 1_000_000).unwrap();
        prop_assert_eq!(coords(&a.0), coords(&b.0));
        prop_assert_eq!(a.1, b.1);
        let a = sample_d_n(n + 2, 0.2, &mut substream(seed, 2, index), 1_000_000).unwrap();
        let b = sample_d_n(n + 2, 0.2, &mut substream(seed, 2, index), 1_000_000).unwrap();
        prop_assert_eq!(coords(&a.0), coords(&b.0));
    }

    #[test]
    fn d_n_and_s_like_land_in_d_n(seed in any::<u64>(), n in 3usize..9, delta in 0.01f64..0.5) {
        let mut rng = substream(seed, 0, 0);
        let (d, _) = sample_d_n(n, delta, &mut rng, 10_000_000).unwrap();
        prop_assert!(in_d_n(&d, delta).unwrap());
        let k = 1 + (seed as usize) % (n - 1);
        let (s, _) = sample_s_like(k, n, delta.min(0.49), &mut rng, 10_000_000).unwrap();
        prop_assert!(in_d_n(&s, delta.min(0.49)).unwrap());
    }

    #[test]
    fn delta_schedule_is_nonincreasing(
        scale in 0.01f64..5.0,
        exponent in 0.01f64..=1.0,
        cap in 0.01f64..0.5,
        n in 1usize..10_000,
    ) {
        let s = DeltaSchedule::new(scale, exponent, cap).unwrap();
        prop_assert!(s.delta_at(n + 1) <= s.delta_at(n));
        prop_assert!(s.delta_at(n) > 0.0 && s.delta_at(n) < 0.5);
    }
}

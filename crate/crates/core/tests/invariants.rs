mod common;

use basketmit::estimate::{feasible, minimize_eps_given_n, minimize_eps_over_grid, BoundInputs, EstimationResult};
use basketmit::mitigate::*;
use basketmit::noise::NoiseSchedule;
use basketmit::pattern::cnot15;
use basketmit::rounds::RoundKind;
use basketmit::sim::NoiseModel;
use common::{calibrated, setup};
use proptest::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

fn posterior_of(qs: &[f64]) -> Posterior {
    let mut p = Posterior::uniform();
    for &q in qs {
        p.update([1.0 - q, q]).unwrap();
    }
    p
}

proptest! {
    #[test]
    fn posterior_stays_normalised(qs in prop::collection::vec(1e-6..(1.0 - 1e-6), 0..40)) {
        let mut p = Posterior::uniform();
        for q in qs {
            p.update([1.0 - q, q]).unwrap();
            let [a, b] = p.probabilities();
            prop_assert!((a + b - 1.0).abs() <= 1e-12);
            prop_assert!((0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b));
        }
    }

    #[test]
    fn posterior_update_commutes(qs in prop::collection::vec(0.01..0.99f64, 1..12), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut shuffled = qs.clone();
        shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let (a, b) = (posterior_of(&qs).p1(), posterior_of(&shuffled).p1());
        prop_assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
    }

    #[test]
    fn baskets_are_well_formed(
        phi in prop::collection::vec(0.0..0.3f64, 1..400),
        p_tilde in 0.05..0.25f64,
        n in 1usize..80,
        g in 1usize..4,
    ) {
        let groups = equal_groups(phi.len(), g.min(phi.len()));
        let baskets = find_baskets(&phi, p_tilde, n, &groups);
        let mut covered = vec![false; phi.len()];
        for (gid, b) in &baskets {
            let grp = &groups[*gid];
            prop_assert!(grp.start <= b.start && b.end <= grp.end);
            prop_assert!(2 * b.len() >= n);
            prop_assert!(phi[b.clone()].iter().all(|&x| x <= p_tilde));
            prop_assert!(b.start == grp.start || phi[b.start - 1] > p_tilde);
            prop_assert!(b.end == grp.end || phi[b.end] > p_tilde);
            for i in b.clone() {
                prop_assert!(!covered[i]);
                covered[i] = true;
            }
        }
    }

    #[test]
    fn rolling_rate_matches_direct_count(
        outcomes in prop::collection::vec(prop::option::of(any::<bool>()), 1..300),
        window in 2usize..60,
        g in 1usize..4,
    ) {
        let groups = equal_groups(outcomes.len(), g.min(outcomes.len()));
        let stats = rolling_failure_rate(&outcomes, window, &groups);
        for grp in &groups {
            for i in grp.clone() {
                let lo = i.saturating_sub(window / 2).max(grp.start);
                let hi = (i + window / 2).min(grp.end - 1);
                let tests: Vec<bool> = outcomes[lo..=hi].iter().flatten().copied().collect();
                let want = if tests.is_empty() { 0.0 } else { tests.iter().filter(|&&f| f).count() as f64 / tests.len() as f64 };
                prop_assert!((stats.phi[i] - want).abs() < 1e-12);
                prop_assert_eq!(tests.is_empty(), stats.empty_windows.contains(&i));
            }
        }
    }

    #[test]
    fn schedules_have_exact_counts(total in 1usize..5000, tau in 0.01..0.99f64, seed in any::<u64>()) {
        let s = make_schedule(total, tau, 1, 1, &mut round_rng(seed, 0)).unwrap();
        prop_assert_eq!(s.test_count(), (tau * total as f64).round() as usize);
        let again = make_schedule(total, tau, 1, 1, &mut round_rng(seed, 0)).unwrap();
        prop_assert_eq!(s, again);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn estimator_returns_feasible_points(
        k in 1usize..4,
        p in 0.0..0.2f64,
        frac in 0.05..0.9f64,
        n in 500u64..50_000,
        fix in any::<bool>(),
    ) {
        let probe = BoundInputs::new(k, p, 0.0, None);
        let inputs = BoundInputs::new(k, p, frac * probe.r() / k as f64, fix.then_some(0.9));
        if let EstimationResult::Done(e) = minimize_eps_given_n(&inputs, n) {
            prop_assert!(feasible(&e.params, &inputs).is_empty());
            prop_assert!(e.eps_max < 0.5);
            prop_assert!((e.eps_max - (e.eps_ver + e.eps_rej)).abs() <= 1e-12 * e.eps_max.max(1e-300) + 1e-15);
            prop_assert!(e.phi > inputs.p_max);
        }
    }
}

#[test]
fn warm_started_grid_is_monotone_in_n() {
    for tau in [None, Some(0.9)] {
        let inputs = BoundInputs::new(2, 0.0, 0.15, tau);
        let ns: Vec<u64> = (2..=40).map(|i| i * 500).collect();
        let eps: Vec<f64> = minimize_eps_over_grid(&inputs, &ns)
            .iter()
            .filter_map(|r| r.done().map(|e| e.eps_max))
            .collect();
        assert!(eps.len() > 30);
        assert!(eps.windows(2).all(|w| w[1] <= w[0]), "{eps:?}");
    }
}

fn chi_square_p(counts: &[usize]) -> f64 {
    let total: usize = counts.iter().sum();
    let expect = total as f64 / counts.len() as f64;
    let stat: f64 = counts.iter().map(|&c| (c as f64 - expect).powi(2) / expect).sum();
    ChiSquared::new((counts.len() - 1) as f64).unwrap().sf(stat)
}

#[test]
fn reported_angles_are_uniform() {
    let (p, c) = cnot15();
    let s = setup(&p, &c, [1, 1], NoiseModel::noiseless(), NoiseSchedule::constant(0.9), 77);
    for tau in [0.01, 0.99] {
        let sched = make_schedule(10_000, tau, 1, 1, &mut round_rng(77, 1)).unwrap();
        let ts = run_schedule(&sched, &s, 0).unwrap();
        let kind = if tau < 0.5 { RoundKind::Computation } else { RoundKind::Test };
        for v in [0, 5, 14] {
            let mut counts = [0usize; 8];
            for t in ts.iter().filter(|t| t.kind == kind) {
                counts[usize::from(t.delta[v].index())] += 1;
            }
            let pv = chi_square_p(&counts);
            assert!(pv > 0.001, "vertex {v}, {kind:?}: p = {pv}, {counts:?}");
        }
    }
}

#[test]
fn more_noise_at_low_s() {
    let (p, c) = cnot15();
    let rate = |level: f64| {
        let s = setup(&p, &c, [1, 1], calibrated(), NoiseSchedule::constant(level), 31);
        let sched = Schedule {
            kinds: vec![RoundKind::Test; 10_000],
            groups: vec![0..10_000],
        };
        let ts = run_schedule(&sched, &s, 0).unwrap();
        ts.iter().filter(|t| t.is_test_failure()).count() as f64 / 10_000.0
    };
    let (hi, lo) = (rate(0.8), rate(1.0));
    let pooled = (hi + lo) / 2.0;
    let z = (hi - lo) / (pooled * (1.0 - pooled) * 2.0 / 10_000.0).sqrt();
    let pv = Normal::new(0.0, 1.0).unwrap().sf(z);
    assert!(pv < 0.001, "s=0.8: {hi}, s=1.0: {lo}, p = {pv}");
}

//! Rolling test-failure rate and basket detection.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::rounds::{RoundKind, RoundTranscript};

/// `Some(failed)` for test rounds, `None` for computation rounds.
pub fn test_outcomes(transcripts: &[RoundTranscript]) -> Vec<Option<bool>> {
    transcripts
        .iter()
        .map(|t| (t.kind == RoundKind::Test).then(|| t.is_test_failure()))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RollingStats {
    pub window: usize,
    pub phi: Vec<f64>,
    /// Rounds whose window held no test round; their `phi` is 0 by convention.
    pub empty_windows: Vec<usize>,
}

/// `φ_i`: failed fraction of the test rounds in
/// `[max(i − T/2, g.start), min(i + T/2, g.end − 1)]`, where `g` is `i`'s group.
pub fn rolling_failure_rate(outcomes: &[Option<bool>], window: usize, groups: &[Range<usize>]) -> RollingStats {
    let n = outcomes.len();
    let half = window / 2;
    let mut tests = vec![0usize; n + 1];
    let mut fails = vec![0usize; n + 1];
    for (i, o) in outcomes.iter().enumerate() {
        tests[i + 1] = tests[i] + usize::from(o.is_some());
        fails[i + 1] = fails[i] + usize::from(*o == Some(true));
    }
    let mut phi = vec![0.0; n];
    let mut empty_windows = Vec::new();
    for g in groups {
        let g = g.start.min(n)..g.end.min(n);
        for i in g.clone() {
            let lo = i.saturating_sub(half).max(g.start);
            let hi = (i + half + 1).min(g.end);
            let t = tests[hi] - tests[lo];
            if t == 0 {
                empty_windows.push(i);
            } else {
                phi[i] = (fails[hi] - fails[lo]) as f64 / t as f64;
            }
        }
    }
    RollingStats {
        window,
        phi,
        empty_windows,
    }
}

/// Maximal runs with `φ_i ≤ p̃` inside one group, of length at least `N/2`.
pub fn find_baskets(phi: &[f64], p_tilde: f64, basket_size: usize, groups: &[Range<usize>]) -> Vec<(usize, Range<usize>)> {
    let mut out = Vec::new();
    for (gid, g) in groups.iter().enumerate() {
        let end = g.end.min(phi.len());
        let mut i = g.start;
        while i < end {
            if phi[i] <= p_tilde {
                let start = i;
                while i < end && phi[i] <= p_tilde {
                    i += 1;
                }
                if 2 * (i - start) >= basket_size {
                    out.push((gid, start..i));
                }
            } else {
                i += 1;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_streams() {
        let pass = vec![Some(false); 50];
        assert!(rolling_failure_rate(&pass, 10, &[0..50]).phi.iter().all(|&x| x == 0.0));
        let fail = vec![Some(true); 50];
        assert!(rolling_failure_rate(&fail, 10, &[0..50]).phi.iter().all(|&x| x == 1.0));
    }

    #[test]
    fn alternating_matches_direct_count() {
        let outcomes: Vec<Option<bool>> = (0..100).map(|i| Some(i % 2 == 1)).collect();
        let stats = rolling_failure_rate(&outcomes, 40, &[0..100]);
        for i in 0..100usize {
            let lo = i.saturating_sub(20);
            let hi = (i + 20).min(99);
            let w = &outcomes[lo..=hi];
            let want = w.iter().filter(|o| **o == Some(true)).count() as f64 / w.len() as f64;
            assert_eq!(stats.phi[i], want);
            assert!((stats.phi[i] - 0.5).abs() <= 0.05);
        }
    }

    #[test]
    fn windows_stay_in_group() {
        let mut outcomes = vec![Some(true); 20];
        outcomes.extend(vec![Some(false); 20]);
        let stats = rolling_failure_rate(&outcomes, 10, &[0..20, 20..40]);
        assert!(stats.phi[..20].iter().all(|&x| x == 1.0));
        assert!(stats.phi[20..].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn empty_windows_flagged() {
        let outcomes = vec![None, None, None, Some(true)];
        let stats = rolling_failure_rate(&outcomes, 2, &[0..4]);
        assert_eq!(stats.empty_windows, vec![0, 1]);
        assert_eq!(stats.phi, vec![0.0, 0.0, 1.0, 1.0]);
    }

    #[test]
    fn basket_examples() {
        let phi = vec![0.0; 10_000];
        assert_eq!(find_baskets(&phi, 0.15, 1000, &[0..10_000]), vec![(0, 0..10_000)]);
        let phi = vec![0.16; 10_000];
        assert!(find_baskets(&phi, 0.15, 1000, &[0..10_000]).is_empty());
        let mut phi = vec![0.2; 100_000];
        for i in (14079..19277).chain(71721..78539) {
            phi[i] = 0.1;
        }
        for i in 30_000..34_000 {
            phi[i] = 0.1;
        }
        let b = find_baskets(&phi, 0.15, 10_000, &[0..100_000]);
        let sizes: Vec<usize> = b.iter().map(|(_, r)| r.len()).collect();
        assert_eq!(sizes, vec![5198, 6818]);
    }

    #[test]
    fn baskets_split_at_group_boundaries() {
        let phi = vec![0.0; 100];
        let b = find_baskets(&phi, 0.1, 80, &[0..50, 50..100]);
        assert_eq!(b, vec![(0, 0..50), (1, 50..100)]);
    }
}

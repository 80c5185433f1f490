//! Two-outcome Bayesian updating, tracked as log-odds.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum BayesError {
    #[error("likelihoods ({0}, {1}) must lie in (0, 1) and sum to 1")]
    BadLikelihood(f64, f64),
}

/// Belief `(p_0, p_1)` held as `ℓ = ln(p_1/p_0)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Posterior {
    log_odds: f64,
    updates: usize,
}

impl Posterior {
    /// `p_{0,0} = p_{1,0} = 1/2`.
    pub fn uniform() -> Self {
        Self::default()
    }

    /// `p_{i,j} ∝ q_i p_{i,j−1}`.
    pub fn update(&mut self, q: [f64; 2]) -> Result<(), BayesError> {
        let ok = q.iter().all(|&x| x > 0.0 && x < 1.0) && (q[0] + q[1] - 1.0).abs() <= 1e-12;
        if !ok {
            return Err(BayesError::BadLikelihood(q[0], q[1]));
        }
        self.log_odds += q[1].ln() - q[0].ln();
        self.updates += 1;
        Ok(())
    }

    pub fn p1(&self) -> f64 {
        logistic(self.log_odds)
    }

    pub fn p0(&self) -> f64 {
        logistic(-self.log_odds)
    }

    pub fn probabilities(&self) -> [f64; 2] {
        [self.p0(), self.p1()]
    }

    pub fn log_odds(&self) -> f64 {
        self.log_odds
    }

    pub fn updates(&self) -> usize {
        self.updates
    }

    /// Leading outcome and its probability; `None` at exactly even odds.
    pub fn leader(&self) -> Option<(u8, f64)> {
        if self.log_odds > 0.0 {
            Some((1, self.p1()))
        } else if self.log_odds < 0.0 {
            Some((0, self.p0()))
        } else {
            None
        }
    }
}

fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_prior_takes_first_likelihood() {
        let mut p = Posterior::uniform();
        p.update([0.17, 0.83]).unwrap();
        assert!((p.p1() - 0.83).abs() < 1e-12);
        assert!((p.p0() - 0.17).abs() < 1e-12);
    }

    #[test]
    fn even_likelihood_is_neutral() {
        let mut p = Posterior::uniform();
        p.update([0.3, 0.7]).unwrap();
        let before = p.probabilities();
        p.update([0.5, 0.5]).unwrap();
        assert_eq!(p.probabilities(), before);
    }

    #[test]
    fn rejects_degenerate_likelihoods() {
        let mut p = Posterior::uniform();
        assert!(p.update([0.0, 1.0]).is_err());
        assert!(p.update([0.3, 0.6]).is_err());
        assert_eq!(p.updates(), 0);
    }

    #[test]
    fn survives_many_updates() {
        let mut p = Posterior::uniform();
        for _ in 0..10_000 {
            p.update([1e-10, 1.0 - 1e-10]).unwrap();
        }
        assert_eq!(p.p1(), 1.0);
        assert_eq!(p.p0(), 0.0);
        assert!(p.log_odds().is_finite());
    }
}

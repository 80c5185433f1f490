//! Measurement angles quantised to multiples of π/4.
//!
//! All blinding arithmetic (θ + φ′ + rπ) happens here on integers mod 8, so
//! nothing accumulates floating error before the simulator boundary.

use std::f64::consts::FRAC_PI_4;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use rand::Rng;
use serde::{Deserialize, Serialize};

/// An angle `k·π/4` with `k ∈ {0, …, 7}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Angle(u8);

impl Angle {
    pub const ZERO: Angle = Angle(0);
    pub const HALF_PI: Angle = Angle(2);
    pub const PI: Angle = Angle(4);

    /// Builds an angle from its index, rejecting anything outside `0..8`.
    pub fn new(index: u8) -> Option<Angle> {
        (index < 8).then_some(Angle(index))
    }

    /// Reduces any integer multiple of π/4 into range.
    pub fn wrapping(index: i64) -> Angle {
        Angle(index.rem_euclid(8) as u8)
    }

    /// `bit · π`.
    pub fn pi_times(bit: u8) -> Angle {
        if bit & 1 == 1 {
            Angle::PI
        } else {
            Angle::ZERO
        }
    }

    /// Uniform draw from Θ.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Angle {
        Angle(rng.random_range(0..8u8))
    }

    pub fn index(self) -> u8 {
        self.0
    }

    pub fn radians(self) -> f64 {
        f64::from(self.0) * FRAC_PI_4
    }
}

impl TryFrom<u8> for Angle {
    type Error = String;

    fn try_from(value: u8) -> Result<Self, Self::Error> {
        Angle::new(value).ok_or_else(|| format!("angle index {value} outside 0..8"))
    }
}

impl From<Angle> for u8 {
    fn from(a: Angle) -> u8 {
        a.0
    }
}

impl Add for Angle {
    type Output = Angle;
    fn add(self, rhs: Angle) -> Angle {
        Angle((self.0 + rhs.0) % 8)
    }
}

impl Sub for Angle {
    type Output = Angle;
    fn sub(self, rhs: Angle) -> Angle {
        Angle((self.0 + 8 - rhs.0) % 8)
    }
}

impl Neg for Angle {
    type Output = Angle;
    fn neg(self) -> Angle {
        Angle((8 - self.0) % 8)
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            0 => write!(f, "0"),
            4 => write!(f, "π"),
            k if k % 2 == 0 => write!(f, "{}π/2", k / 2),
            k => write!(f, "{k}π/4"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_wraps_mod_eight() {
        assert_eq!(Angle(6) + Angle(3), Angle(1));
        assert_eq!(Angle(1) - Angle(3), Angle(6));
        assert_eq!(-Angle(0), Angle(0));
        assert_eq!(-Angle(1), Angle(7));
        assert_eq!(Angle::wrapping(-9), Angle(7));
        assert_eq!(Angle::pi_times(3), Angle::PI);
    }

    #[test]
    fn serde_rejects_out_of_range() {
        assert!(serde_json::from_str::<Angle>("9").is_err());
        assert_eq!(serde_json::from_str::<Angle>("7").unwrap(), Angle(7));
        assert_eq!(serde_json::to_string(&Angle(5)).unwrap(), "5");
    }

    #[test]
    fn radians_are_multiples_of_quarter_pi() {
        assert_eq!(Angle::PI.radians(), std::f64::consts::PI);
        assert_eq!(Angle(1).radians(), FRAC_PI_4);
    }
}

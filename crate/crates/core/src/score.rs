//! Measure values and objectives that may contain the singular sentinel.
//!
//! A log-determinant of a singular Gram is `-∞`. Rather than carrying a float
//! infinity through sums, a [`Score`] keeps the number of singular terms apart
//! from the finite part. Scores form an ordered group: fewer singular terms is
//! always better, and among equal counts the larger finite sum wins. Sums,
//! marginal gains and the assignment solver's reduced costs all stay exact
//! and totally ordered.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Score {
    /// Count of `-∞` terms. Negative values only appear in differences.
    pub singular: i64,
    pub finite: f64,
}

impl Score {
    pub const ZERO: Score = Score { singular: 0, finite: 0.0 };
    pub const NEG_INF: Score = Score { singular: 1, finite: 0.0 };

    pub const fn finite(v: f64) -> Self {
        Score { singular: 0, finite: v }
    }

    pub fn is_finite(&self) -> bool {
        self.singular == 0
    }

    /// True when the value or objective contains at least one singular term.
    pub fn is_contaminated(&self) -> bool {
        self.singular > 0
    }

    /// Finite value, or `None` when singular terms are present.
    pub fn value(&self) -> Option<f64> {
        self.is_finite().then_some(self.finite)
    }

    /// Lossy conversion: `-∞`/`+∞` when singular terms dominate.
    pub fn to_f64(&self) -> f64 {
        match self.singular.cmp(&0) {
            Ordering::Equal => self.finite,
            Ordering::Greater => f64::NEG_INFINITY,
            Ordering::Less => f64::INFINITY,
        }
    }
}

impl Default for Score {
    fn default() -> Self {
        Score::ZERO
    }
}

impl Eq for Score {}

impl Ord for Score {
    fn cmp(&self, other: &Self) -> Ordering {
        other.singular.cmp(&self.singular).then_with(|| self.finite.total_cmp(&other.finite))
    }
}

impl PartialOrd for Score {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for Score {
    type Output = Score;
    fn add(self, rhs: Score) -> Score {
        Score { singular: self.singular + rhs.singular, finite: self.finite + rhs.finite }
    }
}

impl Sub for Score {
    type Output = Score;
    fn sub(self, rhs: Score) -> Score {
        Score { singular: self.singular - rhs.singular, finite: self.finite - rhs.finite }
    }
}

impl Neg for Score {
    type Output = Score;
    fn neg(self) -> Score {
        Score { singular: -self.singular, finite: -self.finite }
    }
}

impl Sum for Score {
    fn sum<I: Iterator<Item = Score>>(iter: I) -> Score {
        iter.fold(Score::ZERO, Add::add)
    }
}

impl From<f64> for Score {
    fn from(v: f64) -> Self {
        Score::finite(v)
    }
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.singular {
            0 => write!(f, "{}", self.finite),
            1 => write!(f, "-inf"),
            n if n > 0 => write!(f, "-inf(x{n})"),
            _ => write!(f, "+inf"),
        }
    }
}

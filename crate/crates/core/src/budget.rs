//! Enumeration budgets.
//!
//! Several operations are exact by enumeration (Gauss sums, quadric
//! densities, exhaustive progression scans, subspace enumeration). Each such
//! operation takes an [`EnumerationBudget`] and refuses politely — rather
//! than hanging — when the point count it would visit is too large.

use crate::error::Error;

/// An upper bound on how many points an exact enumeration may visit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationBudget {
    points: u64,
}

/// Default number of points an enumeration may visit (2^24).
pub const DEFAULT_BUDGET_POINTS: u64 = 1 << 24;

impl EnumerationBudget {
    /// A budget allowing enumerations of at most `points` points.
    pub fn new(points: u64) -> Self {
        EnumerationBudget { points }
    }

    /// The maximum number of points this budget allows.
    pub fn points(&self) -> u64 {
        self.points
    }

    /// Checks that an enumeration of `required` points fits, returning the
    /// point count as a `u64` witness when it does.
    pub fn check(&self, required: u128) -> Result<u64, Error> {
        if required <= self.points as u128 {
            Ok(required as u64)
        } else {
            Err(Error::Budget { required, allowed: self.points as u128 })
        }
    }

    /// Checks that `base^exp` points fit within the budget. The reported
    /// requirement is the full power (saturated at u128::MAX), so oversize
    /// requests state their true size.
    pub fn check_pow(&self, base: u64, exp: u32) -> Result<u64, Error> {
        let mut acc: u128 = 1;
        for _ in 0..exp {
            acc = acc.saturating_mul(base as u128);
            if acc == u128::MAX {
                break; // saturated; further factors cannot change it
            }
        }
        self.check(acc)
    }
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        EnumerationBudget::new(DEFAULT_BUDGET_POINTS)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_two_to_the_24() {
        assert_eq!(EnumerationBudget::default().points(), 16_777_216);
    }

    #[test]
    fn check_accepts_and_rejects() {
        let b = EnumerationBudget::new(100);
        assert_eq!(b.check(100), Ok(100));
        assert!(matches!(b.check(101), Err(Error::Budget { required: 101, allowed: 100 })));
    }

    #[test]
    fn check_pow_handles_overflowing_powers() {
        let b = EnumerationBudget::default();
        assert_eq!(b.check_pow(3, 4), Ok(81));
        // 3^64 overflows u64 by far; the check must fail, not wrap.
        assert!(b.check_pow(3, 64).is_err());
        assert_eq!(b.check_pow(7, 0), Ok(1));
    }
}

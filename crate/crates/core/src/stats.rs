//! Small statistical helpers for experiment reporting.

/// Two-sided Wilson score interval for a binomial proportion.
///
/// Returns `(lower, upper)` for `successes` out of `trials` at confidence
/// level `z` standard normal quantiles (1.96 for 95%). For `trials == 0`
/// the interval is the vacuous `[0, 1]`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = (z / denom) * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// The z value used for all 95% intervals reported by this crate.
pub const Z_95: f64 = 1.96;

/// Whether a sequence of binomial estimates is consistent with a
/// non-increasing underlying trend, given per-point 95% Wilson intervals.
///
/// The check is feasibility: some non-increasing curve must pass through
/// every interval, which holds iff for every later point `j` and earlier
/// point `i` the lower bound at `j` does not exceed the upper bound at `i`.
pub fn consistent_with_nonincreasing(counts: &[(u64, u64)]) -> bool {
    let intervals: Vec<(f64, f64)> =
        counts.iter().map(|&(s, t)| wilson_interval(s, t, Z_95)).collect();
    for j in 1..intervals.len() {
        for i in 0..j {
            if intervals[j].0 > intervals[i].1 {
                return false;
            }
        }
    }
    true
}

//! Solve the equal-contribution condition for the dichotomous range and
//! turn it into a practitioner-facing upper value.
//!
//! A two-point item with values {1, c} has variance r^2/4 with r = c - 1,
//! while a k-point item has variance D = (k^2 - 1)/12. Every item pulls the
//! same weight in the sum exactly when r^2/4 = D, i.e. r* = 2 sqrt(D). The
//! counts of the two item kinds cancel out of that condition, so c* = 1 + r*
//! depends on k alone.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::moments::{likert_moments, rational_to_f64, MIN_SCALE};

/// Largest scale length the table generator accepts by default.
pub const DEFAULT_MAX_SCALE: u32 = 1000;

/// Recommended dichotomous upper value for one Likert scale length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CalibrationResult {
    pub k: u32,
    /// Positive root r* of the equal-contribution condition.
    pub optimal_range: f64,
    /// c* = 1 + r*.
    pub exact_upper: f64,
    /// c* rounded to the nearest integer (half away from zero), floored at 2
    /// so the scale keeps two distinct points.
    pub suggested_upper: i64,
}

/// The positive root r* = 2 sqrt(variance(k)) of the equal-contribution
/// condition; independent of how many items of each kind the design holds.
pub fn optimal_range(k: u32) -> Result<f64> {
    let variance = likert_moments(k)?.variance;
    Ok(2.0 * rational_to_f64(variance).sqrt())
}

/// Exact and rounded recommended upper values for a k-point scale.
pub fn calibrate(k: u32) -> Result<CalibrationResult> {
    let range = optimal_range(k)?;
    let exact_upper = 1.0 + range;
    let suggested_upper = (exact_upper.round() as i64).max(2);
    Ok(CalibrationResult {
        k,
        optimal_range: range,
        exact_upper,
        suggested_upper,
    })
}

/// One calibration row per scale length, ascending over k_min..=k_max.
pub fn calibration_table(k_min: u32, k_max: u32) -> Result<Vec<CalibrationResult>> {
    calibration_table_with_cap(k_min, k_max, DEFAULT_MAX_SCALE)
}

/// As [`calibration_table`], with an explicit upper bound on k.
pub fn calibration_table_with_cap(
    k_min: u32,
    k_max: u32,
    cap: u32,
) -> Result<Vec<CalibrationResult>> {
    if k_min < MIN_SCALE || k_min > k_max || k_max > cap {
        return Err(Error::InvalidScaleRange {
            k_min,
            k_max,
            min: MIN_SCALE,
            cap,
        });
    }
    (k_min..=k_max).map(calibrate).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::{dichotomous_share, likert_share};

    // Published recommendations for k = 3..=10, printed to six decimals:
    // (k, range, upper value, suggested value).
    const PUBLISHED_ROWS: [(u32, &str, &str, i64); 8] = [
        (3, "1.632993", "2.632993", 3),
        (4, "2.236068", "3.236068", 3),
        (5, "2.828427", "3.828427", 4),
        (6, "3.415650", "4.415650", 4),
        (7, "4.000000", "5.000000", 5),
        (8, "4.582576", "5.582576", 6),
        (9, "5.163978", "6.163978", 6),
        (10, "5.744563", "6.744563", 7),
    ];

    #[test]
    fn table_3_to_10_matches_published_rows() {
        let rows = calibration_table(3, 10).unwrap();
        assert_eq!(rows.len(), 8);
        for (row, (k, range, upper, suggested)) in rows.iter().zip(PUBLISHED_ROWS) {
            assert_eq!(row.k, k);
            assert_eq!(format!("{:.6}", row.optimal_range), range, "range, k = {k}");
            assert_eq!(format!("{:.6}", row.exact_upper), upper, "upper, k = {k}");
            assert_eq!(row.suggested_upper, suggested, "suggested, k = {k}");
        }
    }

    #[test]
    fn k7_range_is_exactly_four() {
        assert_eq!(optimal_range(7).unwrap(), 4.0);
        let row = calibrate(7).unwrap();
        assert_eq!(row.exact_upper, 5.0);
        assert_eq!(row.suggested_upper, 5);
    }

    #[test]
    fn single_row_table() {
        let rows = calibration_table(7, 7).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].suggested_upper, 5);
    }

    #[test]
    fn k6_rounds_downward() {
        let row = calibrate(6).unwrap();
        assert!(row.exact_upper > 4.0 && row.exact_upper < 4.5);
        assert_eq!(row.suggested_upper, 4);
    }

    #[test]
    fn k8_rounds_upward() {
        let row = calibrate(8).unwrap();
        assert_eq!(row.suggested_upper, 6);
    }

    #[test]
    fn k11_extends_beyond_published_table() {
        // variance (121 - 1)/12 = 10, so r* = 2 sqrt(10) and c* rounds to 7
        let row = calibrate(11).unwrap();
        let expected = 2.0 * 10f64.sqrt();
        assert!((row.optimal_range - expected).abs() < 1e-15);
        assert_eq!(format!("{:.6}", row.optimal_range), "6.324555");
        assert_eq!(row.suggested_upper, 7);
    }

    #[test]
    fn counts_cancel_out_of_the_solve() {
        // plugging r* into the full share expression returns 1/n on any grid
        for k in 3..=10u32 {
            let range = optimal_range(k).unwrap();
            for n1 in 1..=10usize {
                for n2 in 1..=10usize {
                    let ideal = 1.0 / (n1 + n2) as f64;
                    let share = dichotomous_share(range, n1, n2, k).unwrap();
                    assert!(
                        (share - ideal).abs() < 1e-12,
                        "k={k} n1={n1} n2={n2}: {share} vs {ideal}"
                    );
                    let l = likert_share(range, n1, n2, k).unwrap();
                    assert!((l - ideal).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn solve_condition_restated() {
        for k in 3..=1000u32 {
            let d = rational_to_f64(likert_moments(k).unwrap().variance);
            let r = optimal_range(k).unwrap();
            assert!(
                (r * r / 4.0 - d).abs() <= 1e-12 * d,
                "k = {k}: {} vs {d}",
                r * r / 4.0
            );
        }
    }

    #[test]
    fn optimal_range_strictly_increases_in_k() {
        let mut previous = 0.0;
        for k in 3..=200u32 {
            let r = optimal_range(k).unwrap();
            assert!(r > previous, "k = {k}");
            previous = r;
        }
    }

    #[test]
    fn rounding_never_strays_more_than_half() {
        for row in calibration_table_with_cap(3, 1000, 1000).unwrap() {
            let gap = (row.suggested_upper as f64 - row.exact_upper).abs();
            assert!(gap <= 0.5, "k = {}", row.k);
            assert!(row.suggested_upper >= 2);
        }
    }

    #[test]
    fn table_bounds_are_validated() {
        assert!(matches!(
            calibration_table(2, 5),
            Err(Error::InvalidScaleRange { .. })
        ));
        assert!(calibration_table(5, 3).is_err());
        assert!(calibration_table(3, DEFAULT_MAX_SCALE + 1).is_err());
        assert!(calibration_table_with_cap(3, 20, 10).is_err());
        assert!(optimal_range(2).is_err());
    }
}

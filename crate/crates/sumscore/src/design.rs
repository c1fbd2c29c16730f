//! Questionnaire designs and the per-item variance audit.
//!
//! A design is an ordered list of items sharing one Likert scale length and
//! one dichotomous value pair. Under independent, equally likely responses
//! the sum's variance is the sum of the item variances, and an item's
//! percent contribution is the ratio of its variance to that total. The
//! audit computes those shares exactly and compares the design's dichotomous
//! upper value against the calibrated recommendation.

use std::collections::HashSet;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::calibration::{calibrate, CalibrationResult};
use crate::error::{Error, Result};
use crate::moments::{
    likert_moments, rational_to_f64, serialize_rational_as_f64, Rational, ScaleSpec,
};

/// Raw two-point answer domain of dichotomous items, pre-recoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawMapping {
    pub low: i64,
    pub high: i64,
}

impl Default for RawMapping {
    fn default() -> Self {
        RawMapping { low: 0, high: 1 }
    }
}

/// One questionnaire item: a stable id plus its response scale.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DesignItem {
    pub id: String,
    pub scale: ScaleSpec,
}

/// An ordered item list with one shared Likert scale length and one shared
/// dichotomous value pair. Construction validates every invariant; a built
/// design is immutable and safe to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct QuestionnaireDesign {
    items: Vec<DesignItem>,
    raw_mapping: RawMapping,
    dichotomous_count: usize,
    likert_count: usize,
    likert_k: Option<u32>,
    dichotomous_scale: Option<(i64, i64)>,
}

impl QuestionnaireDesign {
    pub fn new(items: Vec<DesignItem>, raw_mapping: RawMapping) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::InvalidDesign(
                "design must contain at least one item".into(),
            ));
        }
        if raw_mapping.low == raw_mapping.high {
            return Err(Error::InvalidDesign(format!(
                "raw mapping low and high must differ, both are {}",
                raw_mapping.low
            )));
        }

        let mut seen = HashSet::new();
        let mut likert_k = None;
        let mut dichotomous_scale = None;
        let mut dichotomous_count = 0;
        let mut likert_count = 0;

        for item in &items {
            if !seen.insert(item.id.as_str()) {
                return Err(Error::InvalidDesign(format!(
                    "duplicate item id `{}`",
                    item.id
                )));
            }
            match item.scale {
                ScaleSpec::Likert { k } => {
                    ScaleSpec::likert(k)?;
                    match likert_k {
                        None => likert_k = Some(k),
                        Some(existing) if existing != k => {
                            return Err(Error::InvalidDesign(format!(
                                "likert items must share one scale length, found {existing} and {k}"
                            )));
                        }
                        Some(_) => {}
                    }
                    likert_count += 1;
                }
                ScaleSpec::Dichotomous { low, high } => {
                    ScaleSpec::dichotomous(low, high)?;
                    match dichotomous_scale {
                        None => dichotomous_scale = Some((low, high)),
                        Some(existing) if existing != (low, high) => {
                            return Err(Error::InvalidDesign(format!(
                                "dichotomous items must share one value pair, found {existing:?} and ({low}, {high})"
                            )));
                        }
                        Some(_) => {}
                    }
                    dichotomous_count += 1;
                }
            }
        }

        Ok(QuestionnaireDesign {
            items,
            raw_mapping,
            dichotomous_count,
            likert_count,
            likert_k,
            dichotomous_scale,
        })
    }

    /// Homogeneous design with `n1` dichotomous items on {1, upper} (ids
    /// d1..) followed by `n2` Likert items on 1..=k (ids l1..).
    pub fn from_counts(n1: usize, n2: usize, k: u32, upper: i64) -> Result<Self> {
        let mut items = Vec::with_capacity(n1 + n2);
        for i in 1..=n1 {
            items.push(DesignItem {
                id: format!("d{i}"),
                scale: ScaleSpec::dichotomous(1, upper)?,
            });
        }
        for i in 1..=n2 {
            items.push(DesignItem {
                id: format!("l{i}"),
                scale: ScaleSpec::likert(k)?,
            });
        }
        Self::new(items, RawMapping::default())
    }

    pub fn items(&self) -> &[DesignItem] {
        &self.items
    }

    /// Total item count n.
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Count of dichotomous items (n1).
    pub fn dichotomous_count(&self) -> usize {
        self.dichotomous_count
    }

    /// Count of Likert items (n2).
    pub fn likert_count(&self) -> usize {
        self.likert_count
    }

    /// The shared scale length, when any Likert item is present.
    pub fn likert_k(&self) -> Option<u32> {
        self.likert_k
    }

    /// The shared (low, high) pair, when any dichotomous item is present.
    pub fn dichotomous_scale(&self) -> Option<(i64, i64)> {
        self.dichotomous_scale
    }

    pub fn raw_mapping(&self) -> RawMapping {
        self.raw_mapping
    }

    /// Inclusive bounds of a complete respondent's sum-score.
    pub fn score_bounds(&self) -> (i64, i64) {
        let low = self.items.iter().map(|i| i.scale.min_value()).sum();
        let high = self.items.iter().map(|i| i.scale.max_value()).sum();
        (low, high)
    }
}

/// One item's share of the sum's variance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ItemContribution {
    pub id: String,
    #[serde(serialize_with = "serialize_rational_as_f64")]
    pub variance: Rational,
    /// R^2 = item variance / total variance.
    pub contribution: f64,
    /// The equal-contribution target 1/n.
    pub ideal: f64,
    pub deviation: f64,
}

/// Per-item variance decomposition of a design's sum-score.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContributionReport {
    pub items: Vec<ItemContribution>,
    #[serde(serialize_with = "serialize_rational_as_f64")]
    pub total_variance: Rational,
}

/// Exact variance decomposition of the design's sum. Shares are computed as
/// exact rationals and cross into floating point only in the final ratio.
pub fn contribution_profile(design: &QuestionnaireDesign) -> ContributionReport {
    let variances: Vec<Rational> = design
        .items()
        .iter()
        .map(|item| item.scale.moments().expect("design validated").variance)
        .collect();
    let total: Rational = variances.iter().fold(Rational::zero(), |acc, v| acc + v);
    let ideal = 1.0 / design.len() as f64;

    let items = design
        .items()
        .iter()
        .zip(&variances)
        .map(|(item, &variance)| {
            let contribution = rational_to_f64(variance / total);
            ItemContribution {
                id: item.id.clone(),
                variance,
                contribution,
                ideal,
                deviation: contribution - ideal,
            }
        })
        .collect();

    ContributionReport {
        items,
        total_variance: total,
    }
}

/// Share of the sum's variance held by one dichotomous item of the given
/// range in a design of n1 dichotomous and n2 k-point items:
/// (r^2/4) / ((r^2/4) n1 + D n2). Accepts non-integer ranges so the exact
/// root r* can be plugged in directly.
pub fn dichotomous_share(range: f64, n1: usize, n2: usize, k: u32) -> Result<f64> {
    let (v, t) = share_terms(range, n1, n2, k)?;
    Ok(v / t)
}

/// Share of the sum's variance held by one k-point item in the same design:
/// D / ((r^2/4) n1 + D n2).
pub fn likert_share(range: f64, n1: usize, n2: usize, k: u32) -> Result<f64> {
    let (_, t) = share_terms(range, n1, n2, k)?;
    let d = rational_to_f64(likert_moments(k)?.variance);
    Ok(d / t)
}

fn share_terms(range: f64, n1: usize, n2: usize, k: u32) -> Result<(f64, f64)> {
    if !range.is_finite() || range <= 0.0 {
        return Err(Error::InvalidDesign(format!(
            "dichotomous range must be positive and finite, got {range}"
        )));
    }
    if n1 + n2 == 0 {
        return Err(Error::InvalidDesign(
            "design must contain at least one item".into(),
        ));
    }
    let d = rational_to_f64(likert_moments(k)?.variance);
    let v = range * range / 4.0;
    Ok((v, v * n1 as f64 + d * n2 as f64))
}

/// A contribution report plus the calibrated recommendation for the
/// design's own scale length.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DesignAudit {
    pub report: ContributionReport,
    /// Present when the design mixes both item kinds; the recommendation is
    /// keyed by the design's Likert scale length.
    pub recommendation: Option<CalibrationResult>,
    /// True when the design's dichotomous range differs from the
    /// recommended one (e.g. answers recorded on {1, k} before calibration).
    pub upper_mismatch: bool,
}

/// Audit a design: contribution profile, recommendation, and a mismatch
/// flag when the dichotomous range is not the suggested one.
pub fn audit_design(design: &QuestionnaireDesign) -> DesignAudit {
    let report = contribution_profile(design);
    let recommendation = match (design.dichotomous_scale(), design.likert_k()) {
        (Some(_), Some(k)) => Some(calibrate(k).expect("design k validated")),
        _ => None,
    };
    let upper_mismatch = match (design.dichotomous_scale(), &recommendation) {
        (Some((low, high)), Some(rec)) => high - low != rec.suggested_upper - 1,
        _ => false,
    };
    DesignAudit {
        report,
        recommendation,
        upper_mismatch,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calibration::optimal_range;
    use num_rational::Ratio;
    use proptest::prelude::*;

    fn mixed_design(n1: usize, n2: usize, k: u32, upper: i64) -> QuestionnaireDesign {
        QuestionnaireDesign::from_counts(n1, n2, k, upper).unwrap()
    }

    #[test]
    fn naive_upper_overweights_dichotomous_items() {
        // 2 items on {1,5} and 8 items on 1..=5: variances 4 and 2,
        // total 2*4 + 8*2 = 24
        let report = contribution_profile(&mixed_design(2, 8, 5, 5));
        assert_eq!(report.total_variance, Ratio::new(24, 1));
        let dich = &report.items[0];
        assert_eq!(dich.variance, Ratio::new(4, 1));
        assert!((dich.contribution - 4.0 / 24.0).abs() < 1e-15);
        assert!((dich.ideal - 0.1).abs() < 1e-15);
        let likert = &report.items[2];
        assert!((likert.contribution - 2.0 / 24.0).abs() < 1e-15);
    }

    #[test]
    fn suggested_upper_tightens_the_profile() {
        // same layout with upper 4: variances 9/4 and 2, total 20.5
        let report = contribution_profile(&mixed_design(2, 8, 5, 4));
        assert_eq!(report.total_variance, Ratio::new(41, 2));
        assert!((report.items[0].contribution - 2.25 / 20.5).abs() < 1e-15);
        assert!((report.items[2].contribution - 2.0 / 20.5).abs() < 1e-15);
    }

    #[test]
    fn exact_root_equalizes_every_share() {
        for k in [3u32, 5, 8] {
            let range = optimal_range(k).unwrap();
            for (n1, n2) in [(2usize, 8usize), (1, 1), (7, 3)] {
                let ideal = 1.0 / (n1 + n2) as f64;
                assert!((dichotomous_share(range, n1, n2, k).unwrap() - ideal).abs() < 1e-12);
                assert!((likert_share(range, n1, n2, k).unwrap() - ideal).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn contributions_sum_to_one() {
        let report = contribution_profile(&mixed_design(3, 7, 6, 4));
        let sum: f64 = report.items.iter().map(|i| i.contribution).sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dichotomous_share_strictly_increases_with_upper() {
        let mut previous = 0.0;
        for upper in 2..=8i64 {
            let report = contribution_profile(&mixed_design(2, 8, 5, upper));
            let share = report.items[0].contribution;
            assert!(share > previous, "upper = {upper}");
            previous = share;
        }
    }

    #[test]
    fn translated_endpoints_audit_identically() {
        let anchored: Vec<DesignItem> = (1..=2)
            .map(|i| DesignItem {
                id: format!("d{i}"),
                scale: ScaleSpec::dichotomous(1, 4).unwrap(),
            })
            .chain((1..=3).map(|i| DesignItem {
                id: format!("l{i}"),
                scale: ScaleSpec::likert(5).unwrap(),
            }))
            .collect();
        let shifted: Vec<DesignItem> = anchored
            .iter()
            .map(|item| DesignItem {
                id: item.id.clone(),
                scale: match item.scale {
                    ScaleSpec::Dichotomous { .. } => ScaleSpec::dichotomous(-2, 1).unwrap(),
                    other => other,
                },
            })
            .collect();
        let a = audit_design(&QuestionnaireDesign::new(anchored, RawMapping::default()).unwrap());
        let b = audit_design(&QuestionnaireDesign::new(shifted, RawMapping::default()).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn audit_flags_mismatched_upper() {
        let audit = audit_design(&mixed_design(2, 8, 5, 5));
        assert!(audit.upper_mismatch);
        assert_eq!(audit.recommendation.unwrap().suggested_upper, 4);
    }

    #[test]
    fn audit_accepts_suggested_upper() {
        let audit = audit_design(&mixed_design(2, 8, 7, 5));
        assert!(!audit.upper_mismatch);
        assert_eq!(audit.recommendation.unwrap().suggested_upper, 5);
    }

    #[test]
    fn audit_without_dichotomous_items_has_no_recommendation() {
        let audit = audit_design(&mixed_design(0, 5, 5, 4));
        assert!(audit.recommendation.is_none());
        assert!(!audit.upper_mismatch);
        assert_eq!(audit.report.items.len(), 5);
    }

    #[test]
    fn design_validation_errors() {
        assert!(QuestionnaireDesign::new(vec![], RawMapping::default()).is_err());

        let dup = vec![
            DesignItem {
                id: "q1".into(),
                scale: ScaleSpec::likert(5).unwrap(),
            },
            DesignItem {
                id: "q1".into(),
                scale: ScaleSpec::likert(5).unwrap(),
            },
        ];
        assert!(matches!(
            QuestionnaireDesign::new(dup, RawMapping::default()),
            Err(Error::InvalidDesign(msg)) if msg.contains("q1")
        ));

        let mixed_k = vec![
            DesignItem {
                id: "a".into(),
                scale: ScaleSpec::likert(5).unwrap(),
            },
            DesignItem {
                id: "b".into(),
                scale: ScaleSpec::likert(7).unwrap(),
            },
        ];
        assert!(QuestionnaireDesign::new(mixed_k, RawMapping::default()).is_err());

        let mixed_pairs = vec![
            DesignItem {
                id: "a".into(),
                scale: ScaleSpec::dichotomous(1, 4).unwrap(),
            },
            DesignItem {
                id: "b".into(),
                scale: ScaleSpec::dichotomous(1, 5).unwrap(),
            },
        ];
        assert!(QuestionnaireDesign::new(mixed_pairs, RawMapping::default()).is_err());

        let degenerate_mapping = QuestionnaireDesign::new(
            vec![DesignItem {
                id: "a".into(),
                scale: ScaleSpec::likert(5).unwrap(),
            }],
            RawMapping { low: 1, high: 1 },
        );
        assert!(degenerate_mapping.is_err());
    }

    #[test]
    fn score_bounds_cover_the_recoded_domain() {
        let design = mixed_design(2, 8, 5, 4);
        assert_eq!(design.score_bounds(), (10, 48));
    }

    proptest! {
        #[test]
        fn profile_is_a_partition_of_unity(
            n1 in 0usize..6,
            n2 in 0usize..6,
            k in 3u32..12,
            upper in 2i64..10,
        ) {
            prop_assume!(n1 + n2 >= 1);
            let design = mixed_design(n1, n2, k, upper);
            let report = contribution_profile(&design);
            let sum: f64 = report.items.iter().map(|i| i.contribution).sum();
            prop_assert!((sum - 1.0).abs() < 1e-12);
            for item in &report.items {
                prop_assert!(item.contribution > 0.0 && item.contribution <= 1.0);
                prop_assert!((item.deviation - (item.contribution - item.ideal)).abs() < 1e-15);
            }
        }
    }
}

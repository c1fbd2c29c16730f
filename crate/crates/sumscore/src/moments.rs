//! Exact first and second moments of the two item distributions a summated
//! questionnaire mixes: the discrete uniform scale on 1..=k and the
//! two-point dichotomous scale.
//!
//! All arithmetic is exact rational; values cross into floating point only
//! at presentation and root-taking boundaries.

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use serde::Serializer;

use crate::error::{Error, Result};

/// Exact rational value used throughout the moment and contribution math.
pub type Rational = Ratio<i128>;

/// Shortest Likert scale the calibration is defined for.
pub const MIN_SCALE: u32 = 3;

/// Response scale of a single questionnaire item.
///
/// The dichotomous low endpoint is not pinned to 1 here: only the range
/// `high - low` enters any variance, so audits of translated scales must be
/// expressible. Scoring and calibration default the low endpoint to 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScaleSpec {
    Likert { k: u32 },
    Dichotomous { low: i64, high: i64 },
}

impl ScaleSpec {
    /// A k-point scale on 1..=k, k >= 3.
    pub fn likert(k: u32) -> Result<Self> {
        validate_scale_len(k)?;
        Ok(ScaleSpec::Likert { k })
    }

    /// A two-point scale on {low, high}, high > low.
    pub fn dichotomous(low: i64, high: i64) -> Result<Self> {
        if high <= low {
            return Err(Error::InvalidDichotomous { low, high });
        }
        Ok(ScaleSpec::Dichotomous { low, high })
    }

    pub fn moments(&self) -> Result<Moments> {
        match *self {
            ScaleSpec::Likert { k } => likert_moments(k),
            ScaleSpec::Dichotomous { low, high } => dichotomous_moments(low, high),
        }
    }

    /// Smallest recoded answer the scale can produce.
    pub fn min_value(&self) -> i64 {
        match *self {
            ScaleSpec::Likert { .. } => 1,
            ScaleSpec::Dichotomous { low, .. } => low,
        }
    }

    /// Largest recoded answer the scale can produce.
    pub fn max_value(&self) -> i64 {
        match *self {
            ScaleSpec::Likert { k } => i64::from(k),
            ScaleSpec::Dichotomous { high, .. } => high,
        }
    }

    /// Number of distinct response values.
    pub fn support_size(&self) -> usize {
        match *self {
            ScaleSpec::Likert { k } => k as usize,
            ScaleSpec::Dichotomous { .. } => 2,
        }
    }
}

/// Mean and variance of an item's response distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Moments {
    pub mean: Rational,
    pub variance: Rational,
}

/// Moments of the equally likely k-point scale: mean (k+1)/2, variance
/// (k^2 - 1)/12.
pub fn likert_moments(k: u32) -> Result<Moments> {
    validate_scale_len(k)?;
    let k = i128::from(k);
    Ok(Moments {
        mean: Ratio::new(k + 1, 2),
        variance: Ratio::new(k * k - 1, 12),
    })
}

/// Moments of the fair two-point scale on {low, high}: mean (low+high)/2,
/// variance r^2/4 with r = high - low.
pub fn dichotomous_moments(low: i64, high: i64) -> Result<Moments> {
    if high <= low {
        return Err(Error::InvalidDichotomous { low, high });
    }
    let r = i128::from(high) - i128::from(low);
    Ok(Moments {
        mean: Ratio::new(i128::from(low) + i128::from(high), 2),
        variance: Ratio::new(r * r, 4),
    })
}

/// Half-sum of squared deviations from the scale midpoint,
/// S(k) = sum_{i=1}^{s} (i - (k+1)/2)^2, where s = (k-1)/2 for odd k and
/// s = k/2 for even k. Satisfies (8/k) * S(k) = 4 * variance(k) exactly.
pub fn symmetric_deviation_sum(k: u32) -> Result<Rational> {
    validate_scale_len(k)?;
    let s = if k % 2 == 1 { (k - 1) / 2 } else { k / 2 };
    let center_twice = i128::from(k) + 1;
    let mut total = Rational::zero();
    for i in 1..=i128::from(s) {
        // i - (k+1)/2 == (2i - (k+1)) / 2
        let deviation = Ratio::new(2 * i - center_twice, 2);
        total += deviation * deviation;
    }
    Ok(total)
}

/// f64 view of an exact rational, taken only at presentation or
/// root-taking boundaries.
pub fn rational_to_f64(value: Rational) -> f64 {
    value.to_f64().expect("rational representable as f64")
}

pub(crate) fn serialize_rational_as_f64<S: Serializer>(
    value: &Rational,
    serializer: S,
) -> std::result::Result<S::Ok, S::Error> {
    serializer.serialize_f64(rational_to_f64(*value))
}

fn validate_scale_len(k: u32) -> Result<()> {
    if k < MIN_SCALE {
        return Err(Error::ScaleTooShort { k, min: MIN_SCALE });
    }
    Ok(())
}

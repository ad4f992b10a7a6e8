//! Parametric stand-in for an autoencoder encoder: given a raw payload and a
//! target compression ratio, report the latent size, the accuracy retained
//! after decoding, and the compute cost of running the encoder.

use serde::{Deserialize, Serialize};

use crate::error::{non_negative, positive, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompressionProfile {
    /// Latent size over raw size, in (0, 1].
    pub ratio: f64,
    pub compressed_size_bits: f64,
    /// Retained accuracy score in [0, 1].
    pub accuracy: f64,
    pub compute_cost: f64,
}

impl CompressionProfile {
    pub fn identity(raw_size_bits: f64) -> Self {
        CompressionProfile {
            ratio: 1.0,
            compressed_size_bits: raw_size_bits,
            accuracy: 1.0,
            compute_cost: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_ratio(self.ratio)?;
        non_negative("compressed_size_bits", self.compressed_size_bits)?;
        if !(0.0..=1.0).contains(&self.accuracy) {
            return Err(Error::InvalidParameter {
                name: "accuracy",
                value: self.accuracy,
                reason: "must lie in [0, 1]",
            });
        }
        non_negative("compute_cost", self.compute_cost)?;
        if self.ratio == 1.0 && (self.accuracy != 1.0 || self.compute_cost != 0.0) {
            return Err(Error::InvariantViolation(
                "identity profile must have accuracy 1 and zero compute cost".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Interpolation {
    #[default]
    PiecewiseLinear,
}

/// Monotone rate/accuracy trade-off given by anchor points, always ending at
/// `(1.0, 1.0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CurveRepr", into = "CurveRepr")]
pub struct RateAccuracyCurve {
    anchors: Vec<(f64, f64)>,
    interpolation: Interpolation,
}

#[derive(Serialize, Deserialize)]
struct CurveRepr {
    anchors: Vec<[f64; 2]>,
    #[serde(default)]
    interpolation: Interpolation,
}

impl TryFrom<CurveRepr> for RateAccuracyCurve {
    type Error = Error;

    fn try_from(repr: CurveRepr) -> Result<Self> {
        RateAccuracyCurve::new(repr.anchors.into_iter().map(|[r, a]| (r, a)).collect())
    }
}

impl From<RateAccuracyCurve> for CurveRepr {
    fn from(curve: RateAccuracyCurve) -> Self {
        CurveRepr {
            anchors: curve.anchors.iter().map(|&(r, a)| [r, a]).collect(),
            interpolation: curve.interpolation,
        }
    }
}

impl Default for RateAccuracyCurve {
    fn default() -> Self {
        RateAccuracyCurve::new(vec![(0.05, 0.90), (0.1, 0.95), (0.5, 0.99), (1.0, 1.0)])
            .expect("default anchors are valid")
    }
}

impl RateAccuracyCurve {
    pub fn new(anchors: Vec<(f64, f64)>) -> Result<Self> {
        let Some(&last) = anchors.last() else {
            return Err(Error::Config(
                "rate/accuracy curve needs at least one anchor".into(),
            ));
        };
        if last != (1.0, 1.0) {
            return Err(Error::Config(
                "rate/accuracy curve must end at (1.0, 1.0)".into(),
            ));
        }
        for &(r, a) in &anchors {
            check_ratio(r)?;
            if !(0.0..=1.0).contains(&a) {
                return Err(Error::Config(format!("anchor accuracy {a} outside [0, 1]")));
            }
        }
        for w in anchors.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::Config(
                    "anchor ratios must be strictly increasing".into(),
                ));
            }
            if w[1].1 < w[0].1 {
                return Err(Error::Config(
                    "anchor accuracy must be non-decreasing in ratio".into(),
                ));
            }
        }
        Ok(RateAccuracyCurve {
            anchors,
            interpolation: Interpolation::PiecewiseLinear,
        })
    }

    pub fn anchors(&self) -> &[(f64, f64)] {
        &self.anchors
    }

    pub fn interpolation(&self) -> Interpolation {
        self.interpolation
    }

    /// Smallest ratio the curve covers.
    pub fn min_ratio(&self) -> f64 {
        self.anchors[0].0
    }

    pub fn accuracy_at(&self, ratio: f64) -> Result<f64> {
        check_ratio(ratio)?;
        if ratio < self.min_ratio() {
            return Err(Error::InvalidParameter {
                name: "ratio",
                value: ratio,
                reason: "below the smallest curve anchor",
            });
        }
        // First anchor with anchor ratio >= ratio; exists since the curve ends at 1.
        let hi = self.anchors.partition_point(|&(r, _)| r < ratio);
        let (r1, a1) = self.anchors[hi];
        if r1 == ratio || hi == 0 {
            return Ok(a1);
        }
        let (r0, a0) = self.anchors[hi - 1];
        let t = (ratio - r0) / (r1 - r0);
        Ok((a0 + t * (a1 - a0)).clamp(a0, a1))
    }
}

fn check_ratio(ratio: f64) -> Result<f64> {
    if ratio.is_finite() && ratio > 0.0 && ratio <= 1.0 {
        Ok(ratio)
    } else {
        Err(Error::InvalidParameter {
            name: "ratio",
            value: ratio,
            reason: "must lie in (0, 1]",
        })
    }
}

/// Encoder compute cost `kappa * raw * (1 - ratio)`.
pub fn compute_cost(raw_size_bits: f64, ratio: f64, cost_coefficient: f64) -> f64 {
    cost_coefficient * raw_size_bits * (1.0 - ratio)
}

pub fn compress(
    raw_size_bits: f64,
    curve: &RateAccuracyCurve,
    ratio: f64,
    cost_coefficient: f64,
) -> Result<CompressionProfile> {
    positive("raw_size_bits", raw_size_bits)?;
    non_negative("cost_coefficient", cost_coefficient)?;
    let accuracy = curve.accuracy_at(ratio)?;
    let profile = if ratio == 1.0 {
        CompressionProfile::identity(raw_size_bits)
    } else {
        CompressionProfile {
            ratio,
            compressed_size_bits: ratio * raw_size_bits,
            accuracy,
            compute_cost: compute_cost(raw_size_bits, ratio, cost_coefficient),
        }
    };
    profile.validate()?;
    Ok(profile)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn two_point() -> RateAccuracyCurve {
        RateAccuracyCurve::new(vec![(0.1, 0.95), (1.0, 1.0)]).unwrap()
    }

    #[test]
    fn identity_profile() {
        let p = compress(1000.0, &RateAccuracyCurve::default(), 1.0, 0.5).unwrap();
        assert_eq!(p.compressed_size_bits, 1000.0);
        assert_eq!(p.accuracy, 1.0);
        assert_eq!(p.compute_cost, 0.0);
    }

    #[test]
    fn anchor_lookup_and_interpolation() {
        let p = compress(1000.0, &two_point(), 0.1, 0.0).unwrap();
        assert_relative_eq!(p.compressed_size_bits, 100.0, max_relative = 1e-15);
        assert_eq!(p.accuracy, 0.95);
        assert_relative_eq!(
            two_point().accuracy_at(0.55).unwrap(),
            0.975,
            max_relative = 1e-14
        );
    }

    #[test]
    fn cost_rule() {
        let p = compress(1000.0, &two_point(), 0.1, 0.01).unwrap();
        assert_relative_eq!(p.compute_cost, 9.0, max_relative = 1e-12);
    }

    #[test]
    fn ratio_out_of_range() {
        let c = RateAccuracyCurve::default();
        for r in [0.0, -0.1, 1.5, f64::NAN, 0.01] {
            assert!(
                matches!(
                    compress(1000.0, &c, r, 0.0),
                    Err(Error::InvalidParameter { .. })
                ),
                "{r}"
            );
        }
    }

    #[test]
    fn curve_validation() {
        assert!(RateAccuracyCurve::new(vec![]).is_err());
        assert!(RateAccuracyCurve::new(vec![(0.1, 0.9)]).is_err());
        assert!(RateAccuracyCurve::new(vec![(0.5, 0.9), (0.2, 0.95), (1.0, 1.0)]).is_err());
        assert!(RateAccuracyCurve::new(vec![(0.2, 0.99), (0.5, 0.9), (1.0, 1.0)]).is_err());
        assert!(RateAccuracyCurve::new(vec![(1.0, 1.0)]).is_ok());
    }

    #[test]
    fn curve_serde_rejects_invalid() {
        let ok: RateAccuracyCurve = toml::from_str("anchors = [[0.1, 0.95], [1.0, 1.0]]").unwrap();
        assert_eq!(ok, two_point());
        assert!(toml::from_str::<RateAccuracyCurve>("anchors = [[0.1, 0.95]]").is_err());
    }

    proptest! {
        #[test]
        fn size_and_accuracy_monotone(raw in 1.0f64..1e9, r1 in 0.05f64..=1.0, r2 in 0.05f64..=1.0) {
            let c = RateAccuracyCurve::default();
            let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
            let a = compress(raw, &c, lo, 1e-3).unwrap();
            let b = compress(raw, &c, hi, 1e-3).unwrap();
            prop_assert!(a.compressed_size_bits <= raw);
            prop_assert_eq!(a.compressed_size_bits == raw, lo == 1.0);
            prop_assert!(a.accuracy <= b.accuracy);
            prop_assert!((0.0..=1.0).contains(&a.accuracy));
        }
    }
}

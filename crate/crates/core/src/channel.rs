//! Uplink channel model: per-channel Shannon capacity, transmission latency
//! over a bundle of channels, and the exponential success probability of a
//! queue that fills at a constant rate.
//!
//! Capacity uses a base-2 logarithm, so rates are in bits per second.

use serde::{Deserialize, Serialize};

use crate::error::{non_negative, positive, Error, Result};

/// Logarithm base used by [`channel_capacity`]. Exported so output metadata
/// can record it.
pub const CAPACITY_LOG_BASE: u32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkParams {
    pub bandwidth_per_channel_hz: f64,
    pub channel_gain: f64,
    pub transmit_power_w: f64,
    pub noise_psd: f64,
}

impl LinkParams {
    pub fn validate(&self) -> Result<()> {
        positive("bandwidth_per_channel_hz", self.bandwidth_per_channel_hz)?;
        non_negative("channel_gain", self.channel_gain)?;
        positive("transmit_power_w", self.transmit_power_w)?;
        positive("noise_psd", self.noise_psd)?;
        Ok(())
    }

    /// Linear signal-to-noise ratio `g * P / N0^2`.
    pub fn snr(&self) -> f64 {
        self.channel_gain * self.transmit_power_w / self.noise_psd
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QueueParams {
    /// Inverse of the queue fill rate, in seconds.
    pub fill_rate_inverse: f64,
}

impl QueueParams {
    pub fn validate(&self) -> Result<()> {
        positive("fill_rate_inverse", self.fill_rate_inverse).map(|_| ())
    }
}

/// Achieved uplink latency. Zero granted channels means nothing is sent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Latency {
    Seconds(f64),
    NoTransmission,
}

impl Latency {
    pub fn seconds(self) -> Option<f64> {
        match self {
            Latency::Seconds(s) => Some(s),
            Latency::NoTransmission => None,
        }
    }
}

/// Per-channel capacity `M * log2(1 + g * P / N0^2)` in bits/s.
pub fn channel_capacity(link: &LinkParams) -> Result<f64> {
    link.validate()?;
    Ok(link.bandwidth_per_channel_hz * (1.0 + link.snr()).log2())
}

/// Time to push `compressed_size_bits` over `channels` channels of `rate`
/// bits/s each.
pub fn transmission_latency(
    compressed_size_bits: f64,
    rate: f64,
    channels: u32,
) -> Result<Latency> {
    non_negative("compressed_size_bits", compressed_size_bits)?;
    if !(rate.is_finite() && rate > 0.0) {
        return Err(Error::DegenerateDivision(
            "channel rate must be finite and positive",
        ));
    }
    if channels == 0 {
        return Ok(Latency::NoTransmission);
    }
    Ok(Latency::Seconds(
        compressed_size_bits / (rate * f64::from(channels)),
    ))
}

/// Probability `exp(-T / lambda)` that the transmission succeeds before the
/// queue overflows. A non-transmission succeeds with probability 0.
pub fn success_probability(latency: Latency, queue: &QueueParams) -> Result<f64> {
    queue.validate()?;
    match latency {
        Latency::NoTransmission => Ok(0.0),
        Latency::Seconds(t) => {
            let t = non_negative("latency", t)?;
            Ok((-t / queue.fill_rate_inverse).exp())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn link(m: f64, g: f64, p: f64, n0: f64) -> LinkParams {
        LinkParams {
            bandwidth_per_channel_hz: m,
            channel_gain: g,
            transmit_power_w: p,
            noise_psd: n0,
        }
    }

    #[test]
    fn capacity_examples() {
        assert_eq!(channel_capacity(&link(1.0, 0.0, 1.0, 1.0)).unwrap(), 0.0);
        assert_relative_eq!(
            channel_capacity(&link(1.0, 1.0, 1.0, 1.0)).unwrap(),
            1.0,
            max_relative = 1e-15
        );
        // 2e6 * log2(101), evaluated at 40 digits with mpmath.
        let r = channel_capacity(&link(2e6, 1e-3, 0.1, 1e-6)).unwrap();
        assert_relative_eq!(r, 13_316_422.965_503_59, max_relative = 1e-12);
    }

    #[test]
    fn capacity_rejects_bad_params() {
        for l in [
            link(0.0, 1.0, 1.0, 1.0),
            link(1.0, 1.0, -1.0, 1.0),
            link(1.0, 1.0, 1.0, 0.0),
            link(f64::NAN, 1.0, 1.0, 1.0),
            link(1.0, -0.5, 1.0, 1.0),
            link(1.0, f64::INFINITY, 1.0, 1.0),
        ] {
            assert!(
                matches!(channel_capacity(&l), Err(Error::InvalidParameter { .. })),
                "{l:?}"
            );
        }
    }

    #[test]
    fn latency_examples() {
        assert_eq!(
            transmission_latency(0.0, 10.0, 1).unwrap(),
            Latency::Seconds(0.0)
        );
        assert_eq!(
            transmission_latency(100.0, 10.0, 2).unwrap(),
            Latency::Seconds(5.0)
        );
        let compressed = 1e6 * 0.1;
        assert_relative_eq!(
            transmission_latency(compressed, 1e4, 4)
                .unwrap()
                .seconds()
                .unwrap(),
            2.5,
            max_relative = 1e-12
        );
    }

    #[test]
    fn latency_degenerate_cases() {
        assert_eq!(
            transmission_latency(100.0, 10.0, 0).unwrap(),
            Latency::NoTransmission
        );
        assert!(matches!(
            transmission_latency(100.0, 0.0, 1),
            Err(Error::DegenerateDivision(_))
        ));
        assert!(transmission_latency(-1.0, 10.0, 1).is_err());
    }

    #[test]
    fn success_examples() {
        let q = |l| QueueParams {
            fill_rate_inverse: l,
        };
        assert_eq!(
            success_probability(Latency::Seconds(0.0), &q(1.0)).unwrap(),
            1.0
        );
        assert_relative_eq!(
            success_probability(Latency::Seconds(3.0), &q(3.0)).unwrap(),
            0.367_879_441_171_442_3,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            success_probability(Latency::Seconds(5.0), &q(2.0)).unwrap(),
            0.082_084_998_623_898_8,
            max_relative = 1e-14
        );
        assert_eq!(
            success_probability(Latency::NoTransmission, &q(2.0)).unwrap(),
            0.0
        );
        assert!(success_probability(Latency::Seconds(-1.0), &q(2.0)).is_err());
        assert!(success_probability(Latency::Seconds(1.0), &q(0.0)).is_err());
    }

    proptest! {
        #[test]
        fn capacity_monotone(
            m in 1.0f64..1e7, g in 0.0f64..1.0, dg in 0.0f64..1.0,
            p in 1e-3f64..10.0, dp in 0.0f64..10.0,
            n in 1e-9f64..1e-3, dn in 0.0f64..1e-3,
        ) {
            let base = channel_capacity(&link(m, g, p, n)).unwrap();
            prop_assert!(base >= 0.0);
            prop_assert!(channel_capacity(&link(m, g + dg, p, n)).unwrap() >= base);
            prop_assert!(channel_capacity(&link(m, g, p + dp, n)).unwrap() >= base);
            prop_assert!(channel_capacity(&link(m, g, p, n + dn)).unwrap() <= base);
        }

        #[test]
        fn latency_inverts(size in 0.0f64..1e9, r in 1e-3f64..1e8, c in 1u32..10_000) {
            let t = transmission_latency(size, r, c).unwrap().seconds().unwrap();
            let back = t * r * f64::from(c);
            prop_assert!((back - size).abs() <= 1e-12 * size.max(f64::MIN_POSITIVE));
        }

        #[test]
        fn success_monotone_in_channels(
            size in 0.0f64..1e8, r in 1.0f64..1e7, lambda in 1e-2f64..100.0, c in 0u32..500,
        ) {
            let q = QueueParams { fill_rate_inverse: lambda };
            let lo = success_probability(transmission_latency(size, r, c).unwrap(), &q).unwrap();
            let hi = success_probability(transmission_latency(size, r, c + 1).unwrap(), &q).unwrap();
            prop_assert!(hi >= lo);
            prop_assert!((0.0..=1.0).contains(&hi));
        }
    }
}

//! IoT bidders: the device record, seeded population generation and the
//! per-device channel demand rule.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{channel_capacity, transmission_latency, LinkParams, QueueParams};
use crate::compression::CompressionProfile;
use crate::error::{positive, Error, Result};

pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

/// Weights on size saving, latency saving and accuracy in the compression
/// gain. They sum to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainWeights {
    pub size: f64,
    pub latency: f64,
    pub accuracy: f64,
}

impl GainWeights {
    pub fn validate(&self) -> Result<()> {
        for (name, w) in [
            ("w_size", self.size),
            ("w_latency", self.latency),
            ("w_accuracy", self.accuracy),
        ] {
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    value: w,
                    reason: "weights must be finite and non-negative",
                });
            }
        }
        let sum = self.size + self.latency + self.accuracy;
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::InvariantViolation(format!(
                "gain weights sum to {sum}, expected 1"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Device {
    pub id: u32,
    pub raw_size_bits: f64,
    pub queue: QueueParams,
    /// Carried for completeness; no formula reads it.
    pub queue_size: u64,
    pub link: LinkParams,
    pub weights: GainWeights,
    pub energy_cost_per_unit: f64,
    pub latency_requirement_s: f64,
    pub compression: Option<CompressionProfile>,
}

impl Device {
    pub fn validate(&self) -> Result<()> {
        positive("raw_size_bits", self.raw_size_bits)?;
        self.queue.validate()?;
        self.link.validate()?;
        self.weights.validate()?;
        crate::error::non_negative("energy_cost_per_unit", self.energy_cost_per_unit)?;
        positive("latency_requirement_s", self.latency_requirement_s)?;
        if let Some(p) = &self.compression {
            p.validate()?;
        }
        Ok(())
    }

    pub fn with_compression(mut self, profile: CompressionProfile) -> Self {
        self.compression = Some(profile);
        self
    }

    /// Payload actually sent: latent size when compressing, raw otherwise.
    pub fn transmitted_size_bits(&self) -> f64 {
        self.compression
            .map_or(self.raw_size_bits, |p| p.compressed_size_bits)
    }

    pub fn rate(&self) -> Result<f64> {
        channel_capacity(&self.link)
    }
}

/// Sampling rule for one scalar device field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case")]
pub enum Dist {
    Constant { value: f64 },
    Uniform { low: f64, high: f64 },
    LogUniform { low: f64, high: f64 },
}

impl Dist {
    pub fn constant(value: f64) -> Self {
        Dist::Constant { value }
    }

    pub fn uniform(low: f64, high: f64) -> Self {
        Dist::Uniform { low, high }
    }

    fn validate(&self, field: &str) -> Result<()> {
        let bad = |msg: &str| Err(Error::Config(format!("{field}: {msg}")));
        match *self {
            Dist::Constant { value } if !value.is_finite() => bad("constant must be finite"),
            Dist::Uniform { low, high } if !(low.is_finite() && high.is_finite() && low < high) => {
                bad("uniform bounds must be finite with low < high")
            }
            Dist::LogUniform { low, high }
                if !(low.is_finite() && high.is_finite() && low > 0.0 && low < high) =>
            {
                bad("log-uniform bounds must be finite with 0 < low < high")
            }
            _ => Ok(()),
        }
    }

    fn min(&self) -> f64 {
        match *self {
            Dist::Constant { value } => value,
            Dist::Uniform { low, .. } | Dist::LogUniform { low, .. } => low,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Dist::Constant { value } => value,
            Dist::Uniform { low, high } => rng.random_range(low..high),
            Dist::LogUniform { low, high } => rng.random_range(low.ln()..high.ln()).exp(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightDists {
    pub size: Dist,
    pub latency: Dist,
    pub accuracy: Dist,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PopulationConfig {
    pub device_count: u32,
    /// Overridden per replication by the harness.
    pub seed: u64,
    pub raw_size_bits: Dist,
    pub fill_rate_inverse: Dist,
    pub queue_size: Dist,
    pub bandwidth_per_channel_hz: Dist,
    pub channel_gain: Dist,
    pub transmit_power_w: Dist,
    pub noise_psd: Dist,
    /// Unnormalised draws; each device's triple is scaled to sum to one.
    pub weights: WeightDists,
    pub energy_cost_per_unit: Dist,
    pub latency_requirement_s: Dist,
}

impl Default for PopulationConfig {
    fn default() -> Self {
        PopulationConfig {
            device_count: 20,
            seed: 0,
            // 0.5 to 2 MB images.
            raw_size_bits: Dist::uniform(4e6, 16e6),
            fill_rate_inverse: Dist::uniform(1.0, 10.0),
            queue_size: Dist::uniform(0.0, 64.0),
            bandwidth_per_channel_hz: Dist::constant(3e4),
            // SNR between 8 and 24.
            channel_gain: Dist::uniform(4e-9, 8e-9),
            transmit_power_w: Dist::uniform(0.2, 0.3),
            noise_psd: Dist::constant(1e-10),
            weights: WeightDists {
                size: Dist::uniform(0.5, 1.0),
                latency: Dist::uniform(0.5, 1.0),
                accuracy: Dist::uniform(0.5, 1.0),
            },
            energy_cost_per_unit: Dist::uniform(1e-7, 1e-6),
            latency_requirement_s: Dist::uniform(2.0, 4.0),
        }
    }
}

impl PopulationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.device_count == 0 {
            return Err(Error::Config("device_count must be at least 1".into()));
        }
        let positive_fields = [
            ("raw_size_bits", &self.raw_size_bits),
            ("fill_rate_inverse", &self.fill_rate_inverse),
            ("bandwidth_per_channel_hz", &self.bandwidth_per_channel_hz),
            ("transmit_power_w", &self.transmit_power_w),
            ("noise_psd", &self.noise_psd),
            ("latency_requirement_s", &self.latency_requirement_s),
        ];
        for (name, d) in positive_fields {
            d.validate(name)?;
            if d.min() <= 0.0 {
                return Err(Error::Config(format!(
                    "{name}: values must be strictly positive"
                )));
            }
        }
        let non_negative_fields = [
            ("queue_size", &self.queue_size),
            ("channel_gain", &self.channel_gain),
            ("energy_cost_per_unit", &self.energy_cost_per_unit),
            ("weights.size", &self.weights.size),
            ("weights.latency", &self.weights.latency),
            ("weights.accuracy", &self.weights.accuracy),
        ];
        for (name, d) in non_negative_fields {
            d.validate(name)?;
            if d.min() < 0.0 {
                return Err(Error::Config(format!(
                    "{name}: values must be non-negative"
                )));
            }
        }
        let w = &self.weights;
        if [w.size, w.latency, w.accuracy]
            .iter()
            .all(|d| matches!(d, Dist::Constant { value } if *value == 0.0))
        {
            return Err(Error::Config(
                "weights: at least one weight must be non-zero".into(),
            ));
        }
        Ok(())
    }
}

pub fn generate_population(config: &PopulationConfig) -> Result<Vec<Device>> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    (0..config.device_count)
        .map(|id| {
            let raw_size_bits = config.raw_size_bits.sample(&mut rng);
            let queue = QueueParams {
                fill_rate_inverse: config.fill_rate_inverse.sample(&mut rng),
            };
            let queue_size = config.queue_size.sample(&mut rng).floor() as u64;
            let link = LinkParams {
                bandwidth_per_channel_hz: config.bandwidth_per_channel_hz.sample(&mut rng),
                channel_gain: config.channel_gain.sample(&mut rng),
                transmit_power_w: config.transmit_power_w.sample(&mut rng),
                noise_psd: config.noise_psd.sample(&mut rng),
            };
            let weights = sample_weights(&config.weights, &mut rng);
            let device = Device {
                id,
                raw_size_bits,
                queue,
                queue_size,
                link,
                weights,
                energy_cost_per_unit: config.energy_cost_per_unit.sample(&mut rng),
                latency_requirement_s: config.latency_requirement_s.sample(&mut rng),
                compression: None,
            };
            device.validate()?;
            Ok(device)
        })
        .collect()
}

fn sample_weights<R: Rng + ?Sized>(dists: &WeightDists, rng: &mut R) -> GainWeights {
    // An all-zero draw falls back to equal weights.
    let raw = [
        dists.size.sample(rng),
        dists.latency.sample(rng),
        dists.accuracy.sample(rng),
    ];
    let sum: f64 = raw.iter().sum();
    let [size, latency, accuracy] = if sum > 0.0 {
        raw.map(|w| w / sum)
    } else {
        [1.0 / 3.0; 3]
    };
    GainWeights {
        size,
        latency,
        accuracy,
    }
}

/// Fewest channels that deliver the payload within the device's latency
/// requirement.
pub fn select_demand(device: &Device, use_compression: bool) -> Result<u32> {
    let rate = device.rate()?;
    if rate <= 0.0 {
        return Err(Error::NoFeasibleDemand {
            device: device.id,
            reason: "zero channel capacity".into(),
        });
    }
    let size = if use_compression {
        device
            .compression
            .ok_or(Error::MissingCompression(device.id))?
            .compressed_size_bits
    } else {
        device.raw_size_bits
    };
    let deadline = device.latency_requirement_s;
    let meets = |c: u32| -> Result<bool> {
        let t = transmission_latency(size, rate, c)?
            .seconds()
            .unwrap_or(f64::INFINITY);
        Ok(t <= deadline)
    };

    let estimate = (size / (rate * deadline)).ceil().max(1.0);
    if !estimate.is_finite() || estimate >= f64::from(u32::MAX) {
        return Err(Error::NoFeasibleDemand {
            device: device.id,
            reason: format!("demand {estimate} exceeds the channel count range"),
        });
    }
    // Nudge the closed form so minimality holds under the same latency
    // evaluation callers use.
    let mut c = estimate as u32;
    while !meets(c)? {
        c = c.checked_add(1).ok_or_else(|| Error::NoFeasibleDemand {
            device: device.id,
            reason: "demand overflow".into(),
        })?;
    }
    while c > 1 && meets(c - 1)? {
        c -= 1;
    }
    Ok(c)
}

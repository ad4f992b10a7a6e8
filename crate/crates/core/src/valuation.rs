//! Device valuation of a channel bundle: the success-discounted channel
//! value, the gain from compressing, transmission and compute costs, and the
//! resulting net value a truthful device bids.

use serde::{Deserialize, Serialize};

use crate::channel::{success_probability, transmission_latency, Latency};
use crate::device::Device;
use crate::error::{Error, Result};

pub const BREAKDOWN_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValuationOptions {
    /// Divide the size, latency and accuracy terms of the compression gain
    /// by raw size, uncompressed latency and 1 respectively.
    #[serde(default)]
    pub normalize_gain: bool,
    /// Evaluate the gain formula for devices sending raw data too (which
    /// leaves only the accuracy weight) instead of crediting them zero.
    #[serde(default)]
    pub literal_raw_gain: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValuationBreakdown {
    pub channel_value: f64,
    pub compression_gain: f64,
    pub total_value: f64,
    pub transmission_cost: f64,
    pub compute_cost: f64,
    pub total_cost: f64,
    pub net_value: f64,
}

impl ValuationBreakdown {
    pub fn new(
        channel_value: f64,
        compression_gain: f64,
        transmission_cost: f64,
        compute_cost: f64,
    ) -> Self {
        let total_value = channel_value + compression_gain;
        let total_cost = transmission_cost + compute_cost;
        ValuationBreakdown {
            channel_value,
            compression_gain,
            total_value,
            transmission_cost,
            compute_cost,
            total_cost,
            net_value: total_value - total_cost,
        }
    }

    /// Breakdown for a bidder described only by its total value and cost.
    pub fn from_totals(total_value: f64, total_cost: f64) -> Self {
        ValuationBreakdown::new(total_value, 0.0, total_cost, 0.0)
    }

    pub fn check(&self) -> Result<()> {
        let close =
            |a: f64, b: f64| (a - b).abs() <= BREAKDOWN_TOLERANCE * a.abs().max(b.abs()).max(1.0);
        if !close(self.total_value, self.channel_value + self.compression_gain)
            || !close(self.total_cost, self.transmission_cost + self.compute_cost)
            || !close(self.net_value, self.total_value - self.total_cost)
        {
            return Err(Error::InvariantViolation(format!(
                "inconsistent valuation breakdown {self:?}"
            )));
        }
        Ok(())
    }
}

fn latency_seconds(size: f64, rate: f64, channels: u32) -> Result<f64> {
    match transmission_latency(size, rate, channels)? {
        Latency::Seconds(t) => Ok(t),
        Latency::NoTransmission => Err(Error::InvalidParameter {
            name: "channels",
            value: 0.0,
            reason: "valuation needs at least one channel",
        }),
    }
}

/// `C * exp(-T / lambda)` with `T` the latency of the transmitted payload.
pub fn channel_valuation(device: &Device, channels: u32) -> Result<f64> {
    let rate = device.rate()?;
    let t = latency_seconds(device.transmitted_size_bits(), rate, channels)?;
    let p = success_probability(Latency::Seconds(t), &device.queue)?;
    Ok(f64::from(channels) * p)
}

/// Weighted benefit of compressing: size saved, latency saved (both
/// latencies at the same channel count) and retained accuracy.
pub fn compression_gain(device: &Device, channels: u32, opts: ValuationOptions) -> Result<f64> {
    device.weights.validate()?;
    let (compressed_size, accuracy) = match device.compression {
        Some(p) => (p.compressed_size_bits, p.accuracy),
        None if opts.literal_raw_gain => (device.raw_size_bits, 1.0),
        None => return Ok(0.0),
    };
    let rate = device.rate()?;
    let t = latency_seconds(compressed_size, rate, channels)?;
    let t_raw = latency_seconds(device.raw_size_bits, rate, channels)?;
    let mut size_term = device.raw_size_bits - compressed_size;
    let mut latency_term = t_raw - t;
    if opts.normalize_gain {
        size_term /= device.raw_size_bits;
        latency_term /= t_raw;
    }
    let w = &device.weights;
    Ok(w.size * size_term + w.latency * latency_term + w.accuracy * accuracy)
}

/// Transmission cost `r * C * beta`.
pub fn transmission_cost(device: &Device, channels: u32) -> Result<f64> {
    Ok(device.rate()? * f64::from(channels) * device.energy_cost_per_unit)
}

pub fn total_valuation(
    device: &Device,
    channels: u32,
    opts: ValuationOptions,
) -> Result<ValuationBreakdown> {
    let channel_value = channel_valuation(device, channels)?;
    let gain = compression_gain(device, channels, opts)?;
    let trans = transmission_cost(device, channels)?;
    let compute = device.compression.map_or(0.0, |p| p.compute_cost);
    let breakdown = ValuationBreakdown::new(channel_value, gain, trans, compute);
    breakdown.check()?;
    Ok(breakdown)
}

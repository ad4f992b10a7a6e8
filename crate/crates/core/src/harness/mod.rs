//! Seeded experiment pipeline: population, compression, demand selection,
//! valuation, winner determination, payments and settlement, one metrics row
//! per (seed, budget, compression setting, payment rule).
//!
//! Seeds run in parallel; rows are sorted by (seed, budget, compression,
//! rule) afterwards so output bytes never depend on scheduling.

mod config;
mod metrics;

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::auction::{
    compute_payments, settle, solve_wdp, AuctionInstance, AuctionOutcome, Bidder, PaymentRule,
};
use crate::channel::{transmission_latency, CAPACITY_LOG_BASE};
use crate::compression::compress;
use crate::device::{generate_population, select_demand, Device, PopulationConfig};
use crate::error::{Error, Result};
use crate::valuation::{total_valuation, ValuationBreakdown};

pub use config::{
    CompressionModelConfig, CompressionSetting, Replications, RuleName, ScenarioConfig,
    SCHEMA_VERSION,
};
pub use metrics::{emit_csv, parse_csv, read_csv, summarize, write_csv, MetricsRow, SummaryRow};

/// A device as it enters the auction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Participant {
    pub device_id: u32,
    pub demand: u32,
    pub latency_s: f64,
    pub valuation: ValuationBreakdown,
}

/// One auction with every payment rule applied to the same allocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuctionRecord {
    pub seed: u64,
    pub compression: bool,
    pub participants: Vec<Participant>,
    pub instance: AuctionInstance,
    pub outcomes: Vec<AuctionOutcome>,
}

impl AuctionRecord {
    pub fn winner_ids(&self) -> Vec<u32> {
        self.outcomes.first().map_or_else(Vec::new, |o| {
            self.participants
                .iter()
                .zip(&o.allocation)
                .filter(|(_, &won)| won)
                .map(|(p, _)| p.device_id)
                .collect()
        })
    }

    fn rows(&self) -> Vec<MetricsRow> {
        let winners = self.winner_ids();
        let winners_field = winners
            .iter()
            .map(u32::to_string)
            .collect::<Vec<_>>()
            .join(";");
        self.outcomes
            .iter()
            .map(|o| {
                let latencies: Vec<f64> = self
                    .participants
                    .iter()
                    .zip(&o.allocation)
                    .filter(|(_, &won)| won)
                    .map(|(p, _)| p.latency_s)
                    .collect();
                let mean_latency = if latencies.is_empty() {
                    0.0
                } else {
                    latencies.iter().sum::<f64>() / latencies.len() as f64
                };
                MetricsRow {
                    budget: self.instance.budget,
                    compression: self.compression,
                    payment_rule: o.payment_rule,
                    winner_count: o.winner_count() as u32,
                    social_welfare: o.social_welfare,
                    total_device_utility: o.total_device_utility(),
                    ssp_utility: o.ssp_utility,
                    mean_winner_latency_s: mean_latency,
                    seed: self.seed,
                    winners: winners_field.clone(),
                }
            })
            .collect()
    }
}

/// Devices for one replication, compressed when asked.
pub fn prepare_devices(
    config: &ScenarioConfig,
    seed: u64,
    compression: bool,
) -> Result<Vec<Device>> {
    let population = PopulationConfig {
        seed,
        ..config.population.clone()
    };
    let devices = generate_population(&population)?;
    if !compression {
        return Ok(devices);
    }
    let cm = &config.compression_model;
    devices
        .into_iter()
        .map(|d| {
            let profile = compress(d.raw_size_bits, &cm.curve, cm.ratio, cm.cost_coefficient)?;
            Ok(d.with_compression(profile))
        })
        .collect()
}

/// Demand, latency and valuation per device. Devices that cannot transmit
/// at all (zero capacity) sit the auction out.
pub fn participants(
    config: &ScenarioConfig,
    devices: &[Device],
    compression: bool,
) -> Result<Vec<Participant>> {
    let mut out = Vec::with_capacity(devices.len());
    for d in devices {
        let demand = match select_demand(d, compression) {
            Ok(c) => c,
            Err(Error::NoFeasibleDemand { .. }) => continue,
            Err(e) => return Err(e),
        };
        let latency_s = transmission_latency(d.transmitted_size_bits(), d.rate()?, demand)?
            .seconds()
            .unwrap_or(0.0);
        let valuation = total_valuation(d, demand, config.valuation)?;
        out.push(Participant {
            device_id: d.id,
            demand,
            latency_s,
            valuation,
        });
    }
    Ok(out)
}

/// Truthful instance: every participant bids its net value.
pub fn truthful_instance(
    participants: &[Participant],
    budget: u32,
    ssp_cost: f64,
) -> Result<AuctionInstance> {
    let bidders = participants
        .iter()
        .map(|p| Bidder {
            bid: p.valuation.net_value,
            demand: p.demand,
        })
        .collect();
    AuctionInstance::new(bidders, budget, ssp_cost)
}

pub fn run_auction(
    participants: &[Participant],
    instance: &AuctionInstance,
    rules: &[PaymentRule],
) -> Result<Vec<AuctionOutcome>> {
    let solution = solve_wdp(instance);
    let valuations: Vec<_> = participants.iter().map(|p| p.valuation).collect();
    rules
        .iter()
        .map(|&rule| {
            let payments = compute_payments(instance, &solution, rule)?;
            settle(instance, &solution, &valuations, &payments, rule)
        })
        .collect()
}

fn run_seed(
    config: &ScenarioConfig,
    rules: &[PaymentRule],
    seed: u64,
) -> Result<Vec<AuctionRecord>> {
    let mut records = Vec::new();
    for &compression in config.compression.flags() {
        let devices = prepare_devices(config, seed, compression)?;
        let participants = participants(config, &devices, compression)?;
        for &budget in &config.budgets {
            let instance = truthful_instance(&participants, budget, config.ssp_cost)?;
            let outcomes = run_auction(&participants, &instance, rules)?;
            records.push(AuctionRecord {
                seed,
                compression,
                participants: participants.clone(),
                instance,
                outcomes,
            });
        }
    }
    Ok(records)
}

/// Every auction of the scenario, sorted by (seed, budget, compression).
pub fn run_records(config: &ScenarioConfig) -> Result<Vec<AuctionRecord>> {
    config.validate()?;
    let rules = config.resolved_rules()?;
    let seeds: Vec<u64> = config.replications.seeds().collect();
    let per_seed: Vec<Vec<AuctionRecord>> = seeds
        .par_iter()
        .map(|&seed| run_seed(config, &rules, seed))
        .collect::<Result<_>>()?;
    let mut records: Vec<AuctionRecord> = per_seed.into_iter().flatten().collect();
    records.sort_by_key(|r| (r.seed, r.instance.budget, r.compression));
    Ok(records)
}

pub fn rows_from_records(records: &[AuctionRecord]) -> Vec<MetricsRow> {
    let mut rows: Vec<MetricsRow> = records.iter().flat_map(AuctionRecord::rows).collect();
    rows.sort_by_key(MetricsRow::sort_key);
    rows
}

pub fn run_scenario(config: &ScenarioConfig) -> Result<Vec<MetricsRow>> {
    Ok(rows_from_records(&run_records(config)?))
}

/// Runs the scenario under at least two payment rules and checks that
/// every auction picked the same winners under each.
pub fn compare_payment_rules(config: &ScenarioConfig) -> Result<Vec<MetricsRow>> {
    if config.resolved_rules()?.len() < 2 {
        return Err(Error::Config(
            "comparison needs at least two distinct payment rules".into(),
        ));
    }
    let records = run_records(config)?;
    for r in &records {
        if r.outcomes
            .windows(2)
            .any(|w| w[0].allocation != w[1].allocation)
        {
            return Err(Error::InvariantViolation(format!(
                "winner sets differ across payment rules (seed {}, budget {})",
                r.seed, r.instance.budget
            )));
        }
    }
    Ok(rows_from_records(&records))
}

/// One JSON object per auction, one per line.
pub fn write_records<W: Write>(records: &[AuctionRecord], mut out: W) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Sidecar describing how the numbers in a CSV were produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub schema_version: u32,
    pub capacity_log_base: u32,
    /// Sign of the service-cost term in `social_welfare`.
    pub welfare_ssp_cost_sign: String,
    pub note: String,
    pub payment_rules: Vec<PaymentRule>,
    pub config: ScenarioConfig,
}

impl RunMetadata {
    pub fn new(config: &ScenarioConfig) -> Result<Self> {
        Ok(RunMetadata {
            schema_version: SCHEMA_VERSION,
            capacity_log_base: CAPACITY_LOG_BASE,
            welfare_ssp_cost_sign: "-".into(),
            note: "social_welfare = sum of winning net values - ssp_cost, equal to device plus provider \
                   utility; the welfare program is also written with + ssp_cost, which shifts the \
                   objective by 2 * ssp_cost without changing the allocation"
                .into(),
            payment_rules: config.resolved_rules()?,
            config: config.clone(),
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(file, self)?;
        Ok(())
    }
}

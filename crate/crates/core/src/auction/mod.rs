//! Sealed-bid channel auction with single-minded bidders: winner
//! determination as a 0/1 knapsack over the channel budget, VCG and uniform
//! clearing payments, and settlement into utilities and social welfare.
//!
//! Ties between optimal allocations are broken first by fewer channels used
//! and then by the lexicographically smallest set of winner ids, in both the
//! dynamic program and the brute-force oracle.

mod bruteforce;
mod payments;
mod settle;
mod wdp;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use bruteforce::{wdp_bruteforce, MAX_ORACLE_DEVICES};
pub use payments::{clearing_payments, compute_payments, vcg_payments, VcgMode};
pub use settle::{settle, AuctionOutcome};
pub use wdp::{solve_wdp, solve_wdp_excluding};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bidder {
    /// Reported net value.
    pub bid: f64,
    /// Channels requested; all or nothing.
    pub demand: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuctionInstance {
    pub bidders: Vec<Bidder>,
    /// Total channels on offer.
    pub budget: u32,
    /// Service cost borne by the provider.
    pub ssp_cost: f64,
}

impl AuctionInstance {
    pub fn new(bidders: Vec<Bidder>, budget: u32, ssp_cost: f64) -> Result<Self> {
        let instance = AuctionInstance {
            bidders,
            budget,
            ssp_cost,
        };
        instance.validate()?;
        Ok(instance)
    }

    /// Builds an instance from `(bid, demand)` pairs.
    pub fn from_pairs(pairs: &[(f64, u32)], budget: u32, ssp_cost: f64) -> Result<Self> {
        let bidders = pairs
            .iter()
            .map(|&(bid, demand)| Bidder { bid, demand })
            .collect();
        AuctionInstance::new(bidders, budget, ssp_cost)
    }

    pub fn validate(&self) -> Result<()> {
        for (i, b) in self.bidders.iter().enumerate() {
            if b.demand == 0 {
                return Err(Error::Structural(format!(
                    "bidder {i} demands zero channels"
                )));
            }
            if !b.bid.is_finite() {
                return Err(Error::Structural(format!(
                    "bidder {i} has non-finite bid {}",
                    b.bid
                )));
            }
        }
        if !(self.ssp_cost.is_finite() && self.ssp_cost >= 0.0) {
            return Err(Error::Structural(format!(
                "ssp_cost {} must be finite and non-negative",
                self.ssp_cost
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.bidders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bidders.is_empty()
    }

    /// Copy with one bidder's report replaced.
    pub fn with_bid(&self, index: usize, bid: f64) -> Self {
        let mut out = self.clone();
        out.bidders[index].bid = bid;
        out
    }
}

/// Winner set of the welfare problem plus its objective.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WdpSolution {
    pub allocation: Vec<bool>,
    /// Sum of winning bids, summed in id order, without the service cost.
    pub objective: f64,
    pub channels_used: u64,
}

impl WdpSolution {
    pub(crate) fn from_allocation(instance: &AuctionInstance, allocation: Vec<bool>) -> Self {
        let mut objective = 0.0;
        let mut channels_used = 0u64;
        for (b, _) in instance
            .bidders
            .iter()
            .zip(&allocation)
            .filter(|(_, &won)| won)
        {
            objective += b.bid;
            channels_used += u64::from(b.demand);
        }
        WdpSolution {
            allocation,
            objective,
            channels_used,
        }
    }

    pub fn winner_ids(&self) -> Vec<usize> {
        self.allocation
            .iter()
            .enumerate()
            .filter_map(|(i, &won)| won.then_some(i))
            .collect()
    }

    pub fn winner_count(&self) -> usize {
        self.allocation.iter().filter(|&&w| w).count()
    }

    /// Welfare with the service cost subtracted, consistent with summing
    /// device and provider utilities.
    pub fn welfare(&self, ssp_cost: f64) -> f64 {
        self.objective - ssp_cost
    }

    /// Objective with the service cost added, the sign the welfare program is
    /// sometimes written with. Reported for comparison only.
    pub fn objective_plus_cost(&self, ssp_cost: f64) -> f64 {
        self.objective + ssp_cost
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClearingVariant {
    LowestWinningBid,
    HighestLosingBid,
}

impl ClearingVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            ClearingVariant::LowestWinningBid => "lowest-winning-bid",
            ClearingVariant::HighestLosingBid => "highest-losing-bid",
        }
    }
}

impl FromStr for ClearingVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lowest-winning-bid" => Ok(ClearingVariant::LowestWinningBid),
            "highest-losing-bid" => Ok(ClearingVariant::HighestLosingBid),
            other => Err(Error::Config(format!("unknown clearing variant `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PaymentRule {
    ClarkePivot,
    PaperLiteral,
    Clearing(ClearingVariant),
}

impl PaymentRule {
    pub fn as_str(self) -> &'static str {
        match self {
            PaymentRule::ClarkePivot => "clarke-pivot",
            PaymentRule::PaperLiteral => "paper-literal",
            PaymentRule::Clearing(ClearingVariant::LowestWinningBid) => {
                "clearing-lowest-winning-bid"
            }
            PaymentRule::Clearing(ClearingVariant::HighestLosingBid) => {
                "clearing-highest-losing-bid"
            }
        }
    }
}

impl fmt::Display for PaymentRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PaymentRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "clarke-pivot" => Ok(PaymentRule::ClarkePivot),
            "paper-literal" => Ok(PaymentRule::PaperLiteral),
            "clearing-lowest-winning-bid" => {
                Ok(PaymentRule::Clearing(ClearingVariant::LowestWinningBid))
            }
            "clearing-highest-losing-bid" => {
                Ok(PaymentRule::Clearing(ClearingVariant::HighestLosingBid))
            }
            other => Err(Error::Config(format!("unknown payment rule `{other}`"))),
        }
    }
}

impl Serialize for PaymentRule {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for PaymentRule {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

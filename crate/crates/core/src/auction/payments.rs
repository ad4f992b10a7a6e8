use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{solve_wdp_excluding, AuctionInstance, ClearingVariant, PaymentRule, WdpSolution};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VcgMode {
    /// Winner pays the welfare the others lose by its presence.
    ClarkePivot,
    /// Winner pays optimal welfare minus optimal welfare without it.
    PaperLiteral,
}

fn check_aligned(instance: &AuctionInstance, solution: &WdpSolution) -> Result<()> {
    if solution.allocation.len() != instance.len() {
        return Err(Error::Structural(format!(
            "allocation has {} entries for {} bidders",
            solution.allocation.len(),
            instance.len()
        )));
    }
    Ok(())
}

/// VCG payments for `solution`, which must be the optimum of `instance`.
/// Re-solves once per winner with that winner removed.
pub fn vcg_payments(
    instance: &AuctionInstance,
    solution: &WdpSolution,
    mode: VcgMode,
) -> Result<Vec<f64>> {
    check_aligned(instance, solution)?;
    Ok((0..instance.len())
        .into_par_iter()
        .map(|k| {
            if !solution.allocation[k] {
                return 0.0;
            }
            let without_k = solve_wdp_excluding(instance, Some(k)).objective;
            match mode {
                VcgMode::ClarkePivot => {
                    let others: f64 = instance
                        .bidders
                        .iter()
                        .zip(&solution.allocation)
                        .enumerate()
                        .filter(|&(j, (_, &won))| won && j != k)
                        .map(|(_, (b, _))| b.bid)
                        .sum();
                    without_k - others
                }
                VcgMode::PaperLiteral => solution.objective - without_k,
            }
        })
        .collect())
}

/// Uniform price charged to every winner. With no losers the highest losing
/// bid is taken as 0, and a negative highest losing bid is floored at 0.
pub fn clearing_payments(
    instance: &AuctionInstance,
    solution: &WdpSolution,
    variant: ClearingVariant,
) -> Result<Vec<f64>> {
    check_aligned(instance, solution)?;
    let bids = || instance.bidders.iter().zip(&solution.allocation);
    let price = match variant {
        ClearingVariant::LowestWinningBid => bids()
            .filter(|(_, &won)| won)
            .map(|(b, _)| b.bid)
            .fold(None, |acc: Option<f64>, b| {
                Some(acc.map_or(b, |a| a.min(b)))
            })
            .unwrap_or(0.0),
        ClearingVariant::HighestLosingBid => bids()
            .filter(|(_, &won)| !won)
            .map(|(b, _)| b.bid)
            .fold(0.0, f64::max),
    };
    Ok(solution
        .allocation
        .iter()
        .map(|&won| if won { price } else { 0.0 })
        .collect())
}

pub fn compute_payments(
    instance: &AuctionInstance,
    solution: &WdpSolution,
    rule: PaymentRule,
) -> Result<Vec<f64>> {
    match rule {
        PaymentRule::ClarkePivot => vcg_payments(instance, solution, VcgMode::ClarkePivot),
        PaymentRule::PaperLiteral => vcg_payments(instance, solution, VcgMode::PaperLiteral),
        PaymentRule::Clearing(v) => clearing_payments(instance, solution, v),
    }
}

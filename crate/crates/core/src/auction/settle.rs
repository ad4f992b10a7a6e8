use serde::{Deserialize, Serialize};

use super::{AuctionInstance, PaymentRule, WdpSolution};
use crate::error::{Error, Result};
use crate::valuation::ValuationBreakdown;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuctionOutcome {
    pub allocation: Vec<bool>,
    pub payments: Vec<f64>,
    pub social_welfare: f64,
    pub device_utilities: Vec<f64>,
    pub ssp_utility: f64,
    pub payment_rule: PaymentRule,
}

impl AuctionOutcome {
    pub fn winner_count(&self) -> usize {
        self.allocation.iter().filter(|&&w| w).count()
    }

    pub fn total_device_utility(&self) -> f64 {
        self.device_utilities.iter().sum()
    }

    /// `|SW - (sum of winner utilities + provider utility)|`.
    pub fn accounting_gap(&self) -> f64 {
        let parts: f64 = self
            .device_utilities
            .iter()
            .zip(&self.allocation)
            .filter(|(_, &won)| won)
            .map(|(u, _)| u)
            .sum::<f64>()
            + self.ssp_utility;
        (self.social_welfare - parts).abs()
    }
}

/// Turns an allocation and payments into utilities and welfare. Winners get
/// `v - p - c`, losers 0; the provider collects payments minus its cost.
pub fn settle(
    instance: &AuctionInstance,
    solution: &WdpSolution,
    valuations: &[ValuationBreakdown],
    payments: &[f64],
    rule: PaymentRule,
) -> Result<AuctionOutcome> {
    let n = instance.len();
    if solution.allocation.len() != n || valuations.len() != n || payments.len() != n {
        return Err(Error::Structural(format!(
            "expected {n} entries, got allocation {}, valuations {}, payments {}",
            solution.allocation.len(),
            valuations.len(),
            payments.len()
        )));
    }

    let mut device_utilities = vec![0.0; n];
    let mut final_payments = vec![0.0; n];
    let mut received = 0.0;
    let mut welfare = 0.0;
    for i in 0..n {
        if !solution.allocation[i] {
            continue;
        }
        let v = &valuations[i];
        device_utilities[i] = v.total_value - payments[i] - v.total_cost;
        final_payments[i] = payments[i];
        received += payments[i];
        welfare += v.total_value - v.total_cost;
    }
    Ok(AuctionOutcome {
        allocation: solution.allocation.clone(),
        payments: final_payments,
        social_welfare: welfare - instance.ssp_cost,
        device_utilities,
        ssp_utility: received - instance.ssp_cost,
        payment_rule: rule,
    })
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::three_device;
    use super::super::{compute_payments, solve_wdp, ClearingVariant};
    use super::*;

    #[test]
    fn winner_utility() {
        let inst = AuctionInstance::from_pairs(&[(10.0, 1)], 1, 0.0).unwrap();
        let s = solve_wdp(&inst);
        let v = [ValuationBreakdown::from_totals(12.0, 2.0)];
        let out = settle(&inst, &s, &v, &[5.0], PaymentRule::ClarkePivot).unwrap();
        assert_eq!(out.device_utilities, vec![5.0]);
    }

    #[test]
    fn provider_utility() {
        let inst = AuctionInstance::from_pairs(&[(6.0, 1), (4.0, 1)], 2, 1.0).unwrap();
        let s = solve_wdp(&inst);
        let v = [
            ValuationBreakdown::from_totals(6.0, 0.0),
            ValuationBreakdown::from_totals(4.0, 0.0),
        ];
        let out = settle(&inst, &s, &v, &[5.0, 3.0], PaymentRule::ClarkePivot).unwrap();
        assert_eq!(out.ssp_utility, 7.0);
    }

    #[test]
    fn worked_example_accounting() {
        let mut inst = three_device();
        inst.ssp_cost = 1.5;
        let s = solve_wdp(&inst);
        // Split each net bid into a value and a cost.
        let v: Vec<_> = inst
            .bidders
            .iter()
            .map(|b| ValuationBreakdown::from_totals(b.bid + 2.0, 2.0))
            .collect();
        for rule in [
            PaymentRule::ClarkePivot,
            PaymentRule::PaperLiteral,
            PaymentRule::Clearing(ClearingVariant::LowestWinningBid),
            PaymentRule::Clearing(ClearingVariant::HighestLosingBid),
        ] {
            let p = compute_payments(&inst, &s, rule).unwrap();
            let out = settle(&inst, &s, &v, &p, rule).unwrap();
            assert_eq!(out.social_welfare, 12.0 - 1.5);
            let lhs: f64 = out.device_utilities.iter().sum::<f64>() + out.ssp_utility;
            assert!((out.social_welfare - lhs).abs() < 1e-12, "{rule}");
            assert_eq!(out.device_utilities[0], 0.0);
            assert_eq!(out.payments[0], 0.0);
        }
    }

    #[test]
    fn misaligned() {
        let inst = three_device();
        let s = solve_wdp(&inst);
        let v = vec![ValuationBreakdown::from_totals(1.0, 0.0); 2];
        assert!(matches!(
            settle(&inst, &s, &v, &[0.0; 3], PaymentRule::ClarkePivot),
            Err(Error::Structural(_))
        ));
    }
}

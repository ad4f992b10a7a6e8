//! Randomised self-checks run by the `verify` subcommand: DP against the
//! brute-force oracle, truthfulness and participation under Clarke-pivot
//! payments, and the welfare accounting identity for every payment rule.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::auction::{
    compute_payments, settle, solve_wdp, wdp_bruteforce, AuctionInstance, Bidder, ClearingVariant,
    PaymentRule,
};
use crate::error::Result;
use crate::valuation::ValuationBreakdown;

pub const IC_TOLERANCE: f64 = 1e-9;
pub const ACCOUNTING_TOLERANCE: f64 = 1e-9;
/// Relative misreport sizes; each is applied upwards and downwards.
pub const MISREPORT_GRID: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];

pub const ALL_RULES: [PaymentRule; 4] = [
    PaymentRule::ClarkePivot,
    PaymentRule::PaperLiteral,
    PaymentRule::Clearing(ClearingVariant::LowestWinningBid),
    PaymentRule::Clearing(ClearingVariant::HighestLosingBid),
];

/// A random auction together with the bidders' true values and costs.
#[derive(Debug, Clone)]
pub struct TruthfulCase {
    pub instance: AuctionInstance,
    pub valuations: Vec<ValuationBreakdown>,
}

/// Draws an instance with up to `max_bidders` bidders and a budget of at
/// most `max_budget`. Odd draws use multiples of 1/16 so that ties are
/// common and sums are exact; even draws are continuous.
pub fn random_case<R: Rng + ?Sized>(
    rng: &mut R,
    max_bidders: usize,
    max_budget: u32,
) -> TruthfulCase {
    let n = rng.random_range(1..=max_bidders);
    let dyadic = rng.random_bool(0.5);
    let draw = |rng: &mut R, hi: f64| {
        if dyadic {
            f64::from(rng.random_range(0..=(hi * 16.0) as u32)) / 16.0
        } else {
            rng.random_range(0.0..hi)
        }
    };
    let mut bidders = Vec::with_capacity(n);
    let mut valuations = Vec::with_capacity(n);
    for _ in 0..n {
        let value = draw(rng, 40.0);
        let cost = draw(rng, 10.0);
        let v = ValuationBreakdown::from_totals(value, cost);
        bidders.push(Bidder {
            bid: v.net_value,
            demand: rng.random_range(1..=10),
        });
        valuations.push(v);
    }
    let budget = rng.random_range(0..=max_budget);
    let ssp_cost = draw(rng, 5.0);
    TruthfulCase {
        instance: AuctionInstance {
            bidders,
            budget,
            ssp_cost,
        },
        valuations,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

impl CheckReport {
    fn new(name: &'static str) -> Self {
        CheckReport {
            name,
            cases: 0,
            failures: 0,
            first_failure: None,
        }
    }

    fn record(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(detail());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.cases > 0
    }
}

/// Utility bidder `k` gets when reporting `report` while its true value and
/// cost are in `case`.
pub fn utility_with_report(
    case: &TruthfulCase,
    k: usize,
    report: f64,
    rule: PaymentRule,
) -> Result<f64> {
    let instance = case.instance.with_bid(k, report);
    let solution = solve_wdp(&instance);
    let payments = compute_payments(&instance, &solution, rule)?;
    let outcome = settle(&instance, &solution, &case.valuations, &payments, rule)?;
    Ok(outcome.device_utilities[k])
}

pub fn check_oracle_equivalence(instances: usize, seed: u64) -> Result<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = CheckReport::new("oracle-equivalence");
    for _ in 0..instances {
        let case = random_case(&mut rng, 15, 50);
        let dp = solve_wdp(&case.instance);
        let bf = wdp_bruteforce(&case.instance)?;
        report.record(
            dp.objective == bf.objective && dp.allocation == bf.allocation,
            || format!("dp {:?} vs oracle {:?} on {:?}", dp, bf, case.instance),
        );
    }
    Ok(report)
}

pub fn check_incentive_compatibility(instances: usize, seed: u64) -> Result<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = CheckReport::new("incentive-compatibility");
    for _ in 0..instances {
        let case = random_case(&mut rng, 10, 40);
        for k in 0..case.instance.len() {
            let truth = case.instance.bidders[k].bid;
            let u_truth = utility_with_report(&case, k, truth, PaymentRule::ClarkePivot)?;
            for step in MISREPORT_GRID {
                for report_bid in [truth * (1.0 + step), truth * (1.0 - step)] {
                    let u_lie =
                        utility_with_report(&case, k, report_bid, PaymentRule::ClarkePivot)?;
                    report.record(u_truth >= u_lie - IC_TOLERANCE, || {
                        format!("bidder {k}: truth {truth} -> {u_truth}, report {report_bid} -> {u_lie}")
                    });
                }
            }
        }
    }
    Ok(report)
}

pub fn check_individual_rationality(instances: usize, seed: u64) -> Result<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = CheckReport::new("individual-rationality");
    for _ in 0..instances {
        let case = random_case(&mut rng, 15, 50);
        let solution = solve_wdp(&case.instance);
        let payments = compute_payments(&case.instance, &solution, PaymentRule::ClarkePivot)?;
        let outcome = settle(
            &case.instance,
            &solution,
            &case.valuations,
            &payments,
            PaymentRule::ClarkePivot,
        )?;
        for (i, (&won, &u)) in outcome
            .allocation
            .iter()
            .zip(&outcome.device_utilities)
            .enumerate()
        {
            let bid = case.instance.bidders[i].bid;
            let ok = if won {
                u >= 0.0 && payments[i] <= bid
            } else {
                u == 0.0 && outcome.payments[i] == 0.0
            };
            report.record(ok, || {
                format!("bidder {i} won={won} utility {u} payment {}", payments[i])
            });
        }
    }
    Ok(report)
}

pub fn check_accounting(instances: usize, seed: u64) -> Result<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = CheckReport::new("accounting-identity");
    for _ in 0..instances {
        let case = random_case(&mut rng, 15, 50);
        let solution = solve_wdp(&case.instance);
        for rule in ALL_RULES {
            let payments = compute_payments(&case.instance, &solution, rule)?;
            let outcome = settle(&case.instance, &solution, &case.valuations, &payments, rule)?;
            let gap = outcome.accounting_gap();
            report.record(gap <= ACCOUNTING_TOLERANCE, || format!("{rule}: gap {gap}"));
        }
    }
    Ok(report)
}

/// The full suite at the default sizes: 1000 oracle instances, 500 for the
/// incentive and accounting checks.
pub fn run_all(seed: u64) -> Result<Vec<CheckReport>> {
    Ok(vec![
        check_oracle_equivalence(1000, seed)?,
        check_incentive_compatibility(500, seed.wrapping_add(1))?,
        check_individual_rationality(500, seed.wrapping_add(2))?,
        check_accounting(500, seed.wrapping_add(3))?,
    ])
}

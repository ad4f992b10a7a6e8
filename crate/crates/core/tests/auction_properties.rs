use proptest::prelude::*;

use spectrum_auction::auction::{
    compute_payments, settle, solve_wdp, vcg_payments, AuctionInstance, PaymentRule, VcgMode,
};
use spectrum_auction::valuation::ValuationBreakdown;

fn instance() -> impl Strategy<Value = AuctionInstance> {
    (
        prop::collection::vec((-5.0f64..50.0, 1u32..10), 0..10),
        0u32..40,
        0.0f64..5.0,
    )
        .prop_map(|(pairs, budget, cost)| {
            AuctionInstance::from_pairs(&pairs, budget, cost).unwrap()
        })
}

fn truth(inst: &AuctionInstance) -> Vec<ValuationBreakdown> {
    inst.bidders
        .iter()
        .map(|b| ValuationBreakdown::from_totals(b.bid + 1.0, 1.0))
        .collect()
}

proptest! {
    #[test]
    fn allocation_ignores_service_cost(inst in instance(), other in 0.0f64..100.0) {
        let mut shifted = inst.clone();
        shifted.ssp_cost = other;
        prop_assert_eq!(solve_wdp(&inst).allocation, solve_wdp(&shifted).allocation);
    }

    #[test]
    fn objective_monotone_in_budget(inst in instance(), extra in 0u32..20) {
        let mut bigger = inst.clone();
        bigger.budget += extra;
        prop_assert!(solve_wdp(&bigger).objective >= solve_wdp(&inst).objective);
    }

    #[test]
    fn allocation_feasible(inst in instance()) {
        let s = solve_wdp(&inst);
        prop_assert!(s.channels_used <= u64::from(inst.budget));
        for (b, &won) in inst.bidders.iter().zip(&s.allocation) {
            prop_assert!(!won || b.bid > 0.0);
        }
    }

    #[test]
    fn clarke_is_rational(inst in instance()) {
        let s = solve_wdp(&inst);
        let p = vcg_payments(&inst, &s, VcgMode::ClarkePivot).unwrap();
        for (i, &won) in s.allocation.iter().enumerate() {
            if won {
                prop_assert!(p[i] <= inst.bidders[i].bid + 1e-9);
                prop_assert!(p[i] >= -1e-9);
            } else {
                prop_assert_eq!(p[i], 0.0);
            }
        }
    }

    #[test]
    fn clarke_is_truthful(inst in instance(), k in 0usize..10, report in -10.0f64..80.0) {
        prop_assume!(k < inst.len());
        let v = truth(&inst);
        let utility = |bid: f64| {
            let shown = inst.with_bid(k, bid);
            let s = solve_wdp(&shown);
            let p = compute_payments(&shown, &s, PaymentRule::ClarkePivot).unwrap();
            settle(&shown, &s, &v, &p, PaymentRule::ClarkePivot).unwrap().device_utilities[k]
        };
        prop_assert!(utility(inst.bidders[k].bid) >= utility(report) - 1e-9);
    }

    #[test]
    fn settlement_identity(inst in instance()) {
        let s = solve_wdp(&inst);
        let v = truth(&inst);
        for rule in spectrum_auction::verify::ALL_RULES {
            let p = compute_payments(&inst, &s, rule).unwrap();
            let out = settle(&inst, &s, &v, &p, rule).unwrap();
            prop_assert!(out.accounting_gap() <= 1e-9);
            for (i, &won) in out.allocation.iter().enumerate() {
                if !won {
                    prop_assert_eq!(out.device_utilities[i], 0.0);
                    prop_assert_eq!(out.payments[i], 0.0);
                }
            }
        }
    }
}

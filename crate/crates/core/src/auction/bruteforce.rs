use std::cmp::Ordering;

use super::{AuctionInstance, WdpSolution};
use crate::error::{Error, Result};

pub const MAX_ORACLE_DEVICES: usize = 20;

/// Exhaustive winner determination over all `2^N` allocations. Test oracle
/// for [`super::solve_wdp`]; refuses more than [`MAX_ORACLE_DEVICES`] bidders.
pub fn wdp_bruteforce(instance: &AuctionInstance) -> Result<WdpSolution> {
    let n = instance.len();
    if n > MAX_ORACLE_DEVICES {
        return Err(Error::OracleTooLarge {
            n,
            max: MAX_ORACLE_DEVICES,
        });
    }
    let budget = u64::from(instance.budget);

    let mut best: Option<(u32, f64, u64)> = None;
    for mask in 0u32..(1u32 << n) {
        let mut value = 0.0;
        let mut channels = 0u64;
        for (i, b) in instance.bidders.iter().enumerate() {
            if mask & (1 << i) != 0 {
                value += b.bid;
                channels += u64::from(b.demand);
            }
        }
        if channels > budget {
            continue;
        }
        let better = match best {
            None => true,
            Some((best_mask, best_value, best_channels)) => match value.partial_cmp(&best_value) {
                Some(Ordering::Greater) => true,
                Some(Ordering::Less) | None => false,
                Some(Ordering::Equal) => {
                    channels < best_channels
                        || (channels == best_channels && lex_less(mask, best_mask, n))
                }
            },
        };
        if better {
            best = Some((mask, value, channels));
        }
    }

    let mask = best.map_or(0, |(m, _, _)| m);
    let allocation = (0..n).map(|i| mask & (1 << i) != 0).collect();
    Ok(WdpSolution::from_allocation(instance, allocation))
}

/// Lexicographic order on the ascending id lists encoded by two masks.
fn lex_less(a: u32, b: u32, n: usize) -> bool {
    let ids = |m: u32| (0..n).filter(move |i| m & (1 << i) != 0);
    ids(a).lt(ids(b))
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::three_device;
    use super::super::solve_wdp;
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn worked_example() {
        let s = wdp_bruteforce(&three_device()).unwrap();
        assert_eq!(s.winner_ids(), vec![1, 2]);
        assert_eq!(s.objective, 12.0);
    }

    #[test]
    fn trivial_cases() {
        let empty = AuctionInstance::from_pairs(&[], 3, 0.0).unwrap();
        assert!(wdp_bruteforce(&empty).unwrap().allocation.is_empty());
        let too_big = AuctionInstance::from_pairs(&[(5.0, 4)], 3, 0.0).unwrap();
        assert_eq!(wdp_bruteforce(&too_big).unwrap().allocation, vec![false]);
    }

    #[test]
    fn guard() {
        let inst = AuctionInstance::from_pairs(&vec![(1.0, 1); 21], 3, 0.0).unwrap();
        assert!(matches!(
            wdp_bruteforce(&inst),
            Err(Error::OracleTooLarge { n: 21, max: 20 })
        ));
    }

    #[test]
    fn lex_order() {
        // {0, 3} < {1, 2} < {2}
        assert!(lex_less(0b1001, 0b0110, 4));
        assert!(lex_less(0b0110, 0b0100, 4));
        assert!(!lex_less(0b0100, 0b0100, 4));
    }

    proptest! {
        #[test]
        fn matches_dp_on_integer_bids(
            pairs in prop::collection::vec((-5i32..20, 1u32..8), 0..12),
            budget in 0u32..30,
        ) {
            let pairs: Vec<(f64, u32)> = pairs.into_iter().map(|(b, d)| (f64::from(b), d)).collect();
            let inst = AuctionInstance::from_pairs(&pairs, budget, 0.0).unwrap();
            let dp = solve_wdp(&inst);
            let bf = wdp_bruteforce(&inst).unwrap();
            prop_assert_eq!(dp, bf);
        }
    }
}

use super::{AuctionInstance, WdpSolution};

/// Best `(value, channels)` over a suffix of bidders within a capacity.
#[derive(Clone, Copy)]
struct Cell {
    value: f64,
    channels: u64,
}

impl Cell {
    const EMPTY: Cell = Cell {
        value: 0.0,
        channels: 0,
    };

    /// Whether `self` beats `other`; full ties favour `self`, which is the
    /// take branch and therefore the lexicographically smaller id set.
    fn at_least(self, other: Cell) -> bool {
        self.value > other.value || (self.value == other.value && self.channels <= other.channels)
    }
}

/// Exact welfare maximisation by dynamic programming over the channel
/// budget, `O(N * min(B, sum of demands))`.
pub fn solve_wdp(instance: &AuctionInstance) -> WdpSolution {
    solve_wdp_excluding(instance, None)
}

/// As [`solve_wdp`] with one bidder barred from winning.
pub fn solve_wdp_excluding(instance: &AuctionInstance, excluded: Option<usize>) -> WdpSolution {
    let n = instance.len();
    let eligible: Vec<bool> = instance
        .bidders
        .iter()
        .enumerate()
        .map(|(i, b)| {
            Some(i) != excluded && b.bid > 0.0 && u64::from(b.demand) <= u64::from(instance.budget)
        })
        .collect();
    let total_demand: u64 = instance
        .bidders
        .iter()
        .zip(&eligible)
        .filter(|(_, &e)| e)
        .map(|(b, _)| u64::from(b.demand))
        .sum();
    let cap = total_demand.min(u64::from(instance.budget)) as usize;

    // Suffix DP: row i holds the optimum over bidders i..n; take[i][c]
    // records the decision for bidder i at capacity c.
    let mut next = vec![Cell::EMPTY; cap + 1];
    let mut take = vec![vec![false; cap + 1]; n];
    for i in (0..n).rev() {
        if !eligible[i] {
            continue;
        }
        let b = instance.bidders[i];
        let d = b.demand as usize;
        let mut cur = next.clone();
        for c in d..=cap {
            let rest = next[c - d];
            let with = Cell {
                value: b.bid + rest.value,
                channels: rest.channels + d as u64,
            };
            if with.at_least(next[c]) {
                cur[c] = with;
                take[i][c] = true;
            }
        }
        next = cur;
    }

    let mut allocation = vec![false; n];
    let mut c = cap;
    for i in 0..n {
        if take[i][c] {
            allocation[i] = true;
            c -= instance.bidders[i].demand as usize;
        }
    }
    WdpSolution::from_allocation(instance, allocation)
}

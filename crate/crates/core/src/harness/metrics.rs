use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::auction::PaymentRule;
use crate::error::{Error, Result};

/// One settled auction: a seed, budget, compression setting and payment rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub budget: u32,
    pub compression: bool,
    pub payment_rule: PaymentRule,
    pub winner_count: u32,
    pub social_welfare: f64,
    pub total_device_utility: f64,
    pub ssp_utility: f64,
    /// Mean achieved uplink latency over winners; 0 with no winners.
    pub mean_winner_latency_s: f64,
    pub seed: u64,
    /// Winning device ids joined by `;`.
    pub winners: String,
}

impl MetricsRow {
    pub fn sort_key(&self) -> (u64, u32, bool, PaymentRule) {
        (self.seed, self.budget, self.compression, self.payment_rule)
    }
}

pub fn write_csv<W: Write>(rows: &[MetricsRow], out: W) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::Structural(
            "refusing to write an empty metrics table".into(),
        ));
    }
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(rows: &[MetricsRow], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_csv(rows, std::io::BufWriter::new(file))
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<MetricsRow>> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize()
        .map(|row| row.map_err(Error::from))
        .collect()
}

pub fn parse_csv(path: &Path) -> Result<Vec<MetricsRow>> {
    read_csv(std::fs::File::open(path)?)
}

/// Means over seeds for one (budget, compression, rule) cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub budget: u32,
    pub compression: bool,
    pub payment_rule: PaymentRule,
    pub replications: usize,
    pub mean_winner_count: f64,
    pub mean_social_welfare: f64,
    pub mean_device_utility: f64,
    pub mean_ssp_utility: f64,
}

pub fn summarize(rows: &[MetricsRow]) -> Vec<SummaryRow> {
    let mut cells: BTreeMap<(u32, bool, PaymentRule), Vec<&MetricsRow>> = BTreeMap::new();
    for row in rows {
        cells
            .entry((row.budget, row.compression, row.payment_rule))
            .or_default()
            .push(row);
    }
    cells
        .into_iter()
        .map(|((budget, compression, payment_rule), rs)| {
            let n = rs.len() as f64;
            let mean = |f: fn(&MetricsRow) -> f64| rs.iter().map(|r| f(r)).sum::<f64>() / n;
            SummaryRow {
                budget,
                compression,
                payment_rule,
                replications: rs.len(),
                mean_winner_count: mean(|r| f64::from(r.winner_count)),
                mean_social_welfare: mean(|r| r.social_welfare),
                mean_device_utility: mean(|r| r.total_device_utility),
                mean_ssp_utility: mean(|r| r.ssp_utility),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::auction::ClearingVariant;
    use proptest::prelude::*;

    fn row(seed: u64) -> MetricsRow {
        MetricsRow {
            budget: 10,
            compression: true,
            payment_rule: PaymentRule::Clearing(ClearingVariant::LowestWinningBid),
            winner_count: 2,
            social_welfare: 1234.5678,
            total_device_utility: 0.1 + 0.2,
            ssp_utility: -1e-7,
            mean_winner_latency_s: 2.5,
            seed,
            winners: "3;7".into(),
        }
    }

    #[test]
    fn one_row_two_lines() {
        let mut buf = Vec::new();
        write_csv(&[row(1)], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert_eq!(
            text.lines().next().unwrap(),
            "budget,compression,payment_rule,winner_count,social_welfare,total_device_utility,\
             ssp_utility,mean_winner_latency_s,seed,winners"
        );
    }

    #[test]
    fn empty_rows_rejected() {
        assert!(write_csv(&[], Vec::new()).is_err());
    }

    #[test]
    fn unwritable_path() {
        let err = emit_csv(&[row(1)], Path::new("/nonexistent-dir/x/y.csv")).unwrap_err();
        assert!(matches!(err, Error::Io(_)));
    }

    #[test]
    fn summary_means() {
        let mut a = row(1);
        a.winner_count = 1;
        let mut b = row(2);
        b.winner_count = 4;
        let s = summarize(&[a, b]);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].mean_winner_count, 2.5);
        assert_eq!(s[0].replications, 2);
    }

    proptest! {
        #[test]
        fn csv_round_trip(
            sw in prop::num::f64::NORMAL, du in prop::num::f64::NORMAL | prop::num::f64::ZERO,
            seed in any::<u64>(), winners in prop::collection::vec(0u32..100, 0..6),
        ) {
            let mut r = row(seed);
            r.social_welfare = sw;
            r.total_device_utility = du;
            r.winners = winners.iter().map(u32::to_string).collect::<Vec<_>>().join(";");
            let mut buf = Vec::new();
            write_csv(&[r.clone(), row(0)], &mut buf).unwrap();
            prop_assert_eq!(read_csv(buf.as_slice()).unwrap(), vec![r, row(0)]);
        }
    }
}

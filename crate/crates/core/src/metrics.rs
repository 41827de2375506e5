//! Campaign economics and trial aggregation.

use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::campaign::CampaignResult;
use crate::error::{Error, Result};
use crate::population::Tier;

/// Undefined ratios. Neither is an error of the simulation; they describe
/// campaigns that won no customers or reached nobody.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum RatioError {
    #[error("no customers")]
    NoCustomers,
    #[error("no reach")]
    NoReach,
}

/// Hiring cost per acquired customer.
pub fn customer_acquisition_cost(eta: f64, psi: usize) -> Result<f64, RatioError> {
    if psi == 0 {
        return Err(RatioError::NoCustomers);
    }
    Ok(eta / psi as f64)
}

/// Fraction of reached agents that bought.
pub fn conversion_ratio(psi: usize, chi: usize) -> Result<f64, RatioError> {
    if chi == 0 {
        return Err(RatioError::NoReach);
    }
    Ok(psi as f64 / chi as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CampaignMetrics {
    /// `None` when the campaign won no customers.
    pub cac: Option<f64>,
    /// `None` when the campaign reached nobody.
    pub conversion_ratio: Option<f64>,
    pub buyers: usize,
    pub reach: usize,
    pub hiring_cost: f64,
}

impl CampaignMetrics {
    pub fn new(hiring_cost: f64, buyers: usize, reach: usize) -> Self {
        CampaignMetrics {
            cac: customer_acquisition_cost(hiring_cost, buyers).ok(),
            conversion_ratio: conversion_ratio(buyers, reach).ok(),
            buyers,
            reach,
            hiring_cost,
        }
    }
}

impl From<&CampaignResult> for CampaignMetrics {
    fn from(r: &CampaignResult) -> Self {
        CampaignMetrics::new(r.seed_hiring_cost, r.buyer_count(), r.reach)
    }
}

/// Arithmetic mean and population variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
}

impl Moments {
    /// `None` for an empty sample.
    pub fn of(values: &[f64]) -> Option<Moments> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let variance = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        Some(Moments { mean, variance })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateMetrics {
    pub trial_count: usize,
    pub buyers: Moments,
    pub reach: Moments,
    pub hiring_cost: Moments,
    /// Over trials that won customers; `None` if none did.
    pub cac: Option<Moments>,
    /// Over trials that reached anyone; `None` if none did.
    pub conversion_ratio: Option<Moments>,
    /// Trials left out of the `cac` statistics.
    pub cac_excluded: usize,
    /// Trials left out of the `conversion_ratio` statistics.
    pub cr_excluded: usize,
}

/// Per-field mean and population variance over trials. Ratios are computed
/// per trial first; undefined ones are excluded and counted.
pub fn aggregate(results: &[CampaignMetrics]) -> Result<AggregateMetrics> {
    if results.is_empty() {
        return Err(Error::NoTrials);
    }
    let column = |f: fn(&CampaignMetrics) -> f64| -> Vec<f64> { results.iter().map(f).collect() };
    let cac: Vec<f64> = results.iter().filter_map(|m| m.cac).collect();
    let cr: Vec<f64> = results.iter().filter_map(|m| m.conversion_ratio).collect();
    let whole = |v: Vec<f64>| Moments::of(&v).expect("results are non-empty");
    Ok(AggregateMetrics {
        trial_count: results.len(),
        buyers: whole(column(|m| m.buyers as f64)),
        reach: whole(column(|m| m.reach as f64)),
        hiring_cost: whole(column(|m| m.hiring_cost)),
        cac_excluded: results.len() - cac.len(),
        cr_excluded: results.len() - cr.len(),
        cac: Moments::of(&cac),
        conversion_ratio: Moments::of(&cr),
    })
}

/// Spearman rank correlation with average ranks for ties. `None` when either
/// side is constant or the lengths differ or are below 2.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let (rx, ry) = (ranks(xs), ranks(ys));
    let mx = rx.iter().sum::<f64>() / rx.len() as f64;
    let my = ry.iter().sum::<f64>() / ry.len() as f64;
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    if vx == 0.0 || vy == 0.0 {
        return None;
    }
    Some(cov / (vx * vy).sqrt())
}

fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// One row of the per-tier metrics table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub mu: f64,
    pub omega: f64,
    pub tier: Tier,
    pub n: usize,
    pub eta: f64,
    pub mean_psi: f64,
    pub mean_chi: f64,
    pub mean_cac: Option<f64>,
    pub var_cac: Option<f64>,
    pub mean_cr: Option<f64>,
    pub var_cr: Option<f64>,
    pub excluded_trials: usize,
}

impl MetricsRow {
    pub fn new(mu: f64, omega: f64, tier: Tier, n: usize, eta: f64, agg: &AggregateMetrics) -> Self {
        MetricsRow {
            mu,
            omega,
            tier,
            n,
            eta,
            mean_psi: agg.buyers.mean,
            mean_chi: agg.reach.mean,
            mean_cac: agg.cac.map(|m| m.mean),
            var_cac: agg.cac.map(|m| m.variance),
            mean_cr: agg.conversion_ratio.map(|m| m.mean),
            var_cr: agg.conversion_ratio.map(|m| m.variance),
            excluded_trials: agg.cac_excluded,
        }
    }
}

/// Writes rows as RFC 4180 CSV with a header; undefined values are empty.
pub fn write_metrics_csv<W: Write>(rows: &[MetricsRow], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush().map_err(|source| Error::Io {
        path: Default::default(),
        source,
    })?;
    Ok(())
}

pub fn read_metrics_csv<R: std::io::Read>(input: R) -> Result<Vec<MetricsRow>> {
    let mut reader = csv::Reader::from_reader(input);
    reader
        .deserialize()
        .map(|row| row.map_err(Error::from))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(hiring_cost: f64, buyers: usize, reach: usize) -> CampaignMetrics {
        CampaignMetrics::new(hiring_cost, buyers, reach)
    }

    #[test]
    fn ratio_values() {
        assert_eq!(customer_acquisition_cost(68.0, 34), Ok(2.0));
        assert_eq!(customer_acquisition_cost(33.83, 1), Ok(33.83));
        assert_eq!(customer_acquisition_cost(10.0, 0), Err(RatioError::NoCustomers));
        assert_eq!(conversion_ratio(100, 100), Ok(1.0));
        assert_eq!(conversion_ratio(0, 500), Ok(0.0));
        assert_eq!(conversion_ratio(25, 100), Ok(0.25));
        assert_eq!(conversion_ratio(0, 0), Err(RatioError::NoReach));
    }

    #[test]
    fn identical_trials_have_zero_variance() {
        let agg = aggregate(&vec![m(5.0, 10, 40); 10]).unwrap();
        assert_eq!(agg.trial_count, 10);
        assert_eq!(agg.buyers.variance, 0.0);
        assert_eq!(agg.cac.unwrap(), Moments { mean: 0.5, variance: 0.0 });
        assert_eq!(agg.conversion_ratio.unwrap().variance, 0.0);
    }

    #[test]
    fn single_trial() {
        let agg = aggregate(&[m(6.0, 3, 12)]).unwrap();
        assert_eq!(agg.cac.unwrap(), Moments { mean: 2.0, variance: 0.0 });
        assert_eq!(agg.conversion_ratio.unwrap(), Moments { mean: 0.25, variance: 0.0 });
    }

    #[test]
    fn two_point_population_variance() {
        let agg = aggregate(&[m(1.0, 1, 10), m(3.0, 1, 10)]).unwrap();
        assert_eq!(agg.cac.unwrap(), Moments { mean: 2.0, variance: 1.0 });
    }

    #[test]
    fn no_customer_trials_are_excluded_and_counted() {
        let agg = aggregate(&[m(4.0, 2, 10), m(4.0, 0, 10), m(4.0, 0, 0)]).unwrap();
        assert_eq!(agg.cac_excluded, 2);
        assert_eq!(agg.cr_excluded, 1);
        assert_eq!(agg.cac.unwrap().mean, 2.0);
        assert_eq!(agg.conversion_ratio.unwrap().mean, 0.1);

        let agg = aggregate(&[m(4.0, 0, 10)]).unwrap();
        assert_eq!(agg.cac, None);
        assert!(matches!(aggregate(&[]), Err(Error::NoTrials)));
    }

    #[test]
    fn spearman_cases() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        assert_eq!(spearman(&x, &[10.0, 20.0, 25.0, 40.0, 41.0, 90.0]), Some(1.0));
        assert_eq!(spearman(&x, &[6.0, 5.0, 4.0, 3.0, 2.0, 1.0]), Some(-1.0));
        assert_eq!(spearman(&x, &[1.0; 6]), None);
        // Ties share the average rank: ranks of y are 1.5, 1.5, 3.
        let r = spearman(&[1.0, 2.0, 3.0], &[5.0, 5.0, 7.0]).unwrap();
        assert!((r - 0.866_025_403_784_438_6).abs() < 1e-12);
    }

    #[test]
    fn csv_roundtrip_with_missing_values() {
        let agg = aggregate(&[m(4.0, 0, 10)]).unwrap();
        let rows = vec![MetricsRow::new(0.5, 0.9, Tier::Nano, 300, 67.99, &agg)];
        let mut buf = Vec::new();
        write_metrics_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(
            "mu,omega,tier,n,eta,mean_psi,mean_chi,mean_cac,var_cac,mean_cr,var_cr,excluded_trials\n"
        ));
        assert!(text.contains("0.5,0.9,6,300,67.99,0.0,10.0,,,0.0,0.0,1"), "{text}");
        assert_eq!(read_metrics_csv(&buf[..]).unwrap(), rows);
    }
}

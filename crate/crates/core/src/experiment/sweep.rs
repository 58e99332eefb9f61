use serde::Serialize;

use super::mc::{run_mc, DEFAULT_EPSILON};
use crate::moments::moment_report;
use crate::params::plan;
use crate::{Result, Seed};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub k: usize,
    pub ell: usize,
    pub p: f64,
    pub m: usize,
    pub exact_ratio: f64,
    pub abs_error: f64,
    pub x_concentration: Option<f64>,
    /// Absent when the sweep runs with zero trials.
    pub empirical_mean_ratio: Option<f64>,
}

/// One row per part size, sorted by `k`: exact moment ratio and its distance
/// to the target, the second-moment excess of `X`, and (with `trials > 0`)
/// the Monte Carlo mean ratio.
pub fn convergence_sweep(r: f64, k_list: &[usize], trials: u64, seed: Seed) -> Result<Vec<SweepRow>> {
    let mut ks = k_list.to_vec();
    ks.sort_unstable();
    ks.dedup();
    ks.into_iter()
        .map(|k| {
            let pl = plan(r, k)?;
            let report = moment_report(&pl)?;
            let empirical_mean_ratio = if trials > 0 {
                Some(run_mc(&pl, trials, seed, DEFAULT_EPSILON)?.empirical_mean_ratio)
            } else {
                None
            };
            Ok(SweepRow {
                k,
                ell: pl.ell,
                p: pl.p,
                m: pl.m,
                exact_ratio: report.ratio_exact_f64,
                abs_error: (report.ratio_exact_f64 - r).abs(),
                x_concentration: report.x_concentration,
                empirical_mean_ratio,
            })
        })
        .collect()
}

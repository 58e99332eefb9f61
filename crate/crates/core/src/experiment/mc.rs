use std::io::Write;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::count::{count_layered, LAYERED_MAX_K};
use crate::digraph::{build_blowup, sample_subgraph};
use crate::moments::{expected_x_exact, expected_y_exact};
use crate::numeric::{rational_to_f64, serialize_biguint};
use crate::params::ConstructionPlan;
use crate::{Error, Result, Seed};

pub const DEFAULT_EPSILON: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub seed: Seed,
    #[serde(serialize_with = "serialize_biguint")]
    pub x: BigUint,
    #[serde(serialize_with = "serialize_biguint")]
    pub y: BigUint,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McReport {
    pub plan: ConstructionPlan,
    pub trials: u64,
    pub seed: Seed,
    pub epsilon: f64,
    pub per_trial: Vec<TrialRecord>,
    pub empirical_mean_ratio: f64,
    pub empirical_sd: f64,
    /// `E[X] / E[Y]` from the exact first moments.
    pub exact_ratio: f64,
    /// Share of trials with `|X/Y - exact_ratio| <= epsilon`.
    pub fraction_within: f64,
    pub mean_derangements: f64,
    pub sd_derangements: f64,
}

fn mean_sd(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    if n < 2.0 {
        return (mean, 0.0);
    }
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

impl McReport {
    /// One CSV row per trial: `trial,seed,x,y,ratio`.
    pub fn write_trials_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for t in &self.per_trial {
            w.serialize(t)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Seeded Monte Carlo over the plan's random model on the global rayon pool.
pub fn run_mc(plan: &ConstructionPlan, trials: u64, seed: Seed, epsilon: f64) -> Result<McReport> {
    run_mc_with_threads(plan, trials, seed, epsilon, None)
}

/// As [`run_mc`], on a dedicated pool of `threads` workers when given.
/// Trial `t` uses `seed.split(t)`, so the report does not depend on the
/// schedule.
pub fn run_mc_with_threads(
    plan: &ConstructionPlan,
    trials: u64,
    seed: Seed,
    epsilon: f64,
    threads: Option<usize>,
) -> Result<McReport> {
    if trials == 0 {
        return Err(Error::Domain("need at least one trial".into()));
    }
    if plan.k > LAYERED_MAX_K {
        return Err(Error::Budget {
            field: "per-trial counts",
            k: plan.k,
            limit: LAYERED_MAX_K,
        });
    }
    let base = build_blowup(plan.k, plan.ell)?;
    let run_trial = |t: u64| -> Result<TrialRecord> {
        let trial_seed = seed.split(t);
        let g = sample_subgraph(&base, plan.m, trial_seed)?;
        let counts = count_layered(&g)?;
        Ok(TrialRecord {
            trial: t,
            seed: trial_seed,
            ratio: counts.ratio_f64(),
            x: counts.derangements,
            y: counts.permutations,
        })
    };
    let collect = || (0..trials).into_par_iter().map(run_trial).collect::<Result<Vec<_>>>();
    let per_trial = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Domain(e.to_string()))?
            .install(collect)?,
        None => collect()?,
    };

    let exact_ratio = rational_to_f64(
        &(expected_x_exact(plan.k, plan.ell, plan.m)? / expected_y_exact(plan.k, plan.ell, plan.m)?),
    );
    let (empirical_mean_ratio, empirical_sd) = mean_sd(per_trial.iter().map(|t| t.ratio));
    let (mean_derangements, sd_derangements) =
        mean_sd(per_trial.iter().map(|t| t.x.to_f64().unwrap_or(f64::INFINITY)));
    let within = per_trial
        .iter()
        .filter(|t| (t.ratio - exact_ratio).abs() <= epsilon)
        .count();
    Ok(McReport {
        plan: *plan,
        trials,
        seed,
        epsilon,
        empirical_mean_ratio,
        empirical_sd,
        exact_ratio,
        fraction_within: within as f64 / trials as f64,
        mean_derangements,
        sd_derangements,
        per_trial,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::count::closed_form_ratio;
    use crate::params::plan;

    #[test]
    fn full_graph_has_no_spread() {
        let pl = ConstructionPlan::direct(3, 2, 18).unwrap();
        let report = run_mc(&pl, 10, Seed(0), DEFAULT_EPSILON).unwrap();
        let closed = rational_to_f64(&closed_form_ratio(3, 2).unwrap());
        assert!(report.per_trial.iter().all(|t| t.ratio == closed));
        assert_eq!(report.empirical_sd, 0.0);
        assert_eq!(report.fraction_within, 1.0);
    }

    #[test]
    fn report_invariants_and_determinism() {
        let pl = plan(0.3, 5).unwrap();
        let a = run_mc_with_threads(&pl, 40, Seed(3), 0.05, Some(1)).unwrap();
        let b = run_mc_with_threads(&pl, 40, Seed(3), 0.05, Some(4)).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert_eq!(a.per_trial.len() as u64, a.trials);
        assert!((0.0..=1.0).contains(&a.fraction_within));
        for t in &a.per_trial {
            assert!(t.ratio <= 0.5);
            assert!(&t.y >= &(&t.x + 1u32));
        }
        let mut csv = Vec::new();
        a.write_trials_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.starts_with("trial,seed,x,y,ratio\n"));
        assert_eq!(text.lines().count(), 41);
    }

    #[test]
    fn rejects_bad_inputs() {
        let pl = plan(0.3, 5).unwrap();
        assert!(run_mc(&pl, 0, Seed(0), 0.05).is_err());
        let big = ConstructionPlan { k: 13, ..pl };
        assert!(matches!(run_mc(&big, 1, Seed(0), 0.05), Err(Error::Budget { .. })));
    }
}

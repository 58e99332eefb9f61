//! One-shot runner for the cross-checks between independent routes: counters
//! against each other, closed forms against enumeration, exact moments
//! against exhaustive averages, and the size trends of the moments.

use std::str::FromStr;
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::mc::{run_mc, run_mc_with_threads};
use crate::count::{
    closed_form_counts, count_bruteforce, count_layered, count_permanent, CountPair,
};
use crate::digraph::{build_blowup, enumerate_subgraphs, sample_subgraph, Digraph};
use crate::moments::{
    expected_x_asymptotic, expected_x_exact, expected_y_asymptotic, expected_y_exact,
    moment_report, second_moment_x_exact, second_moment_y_upper,
};
use crate::numeric::{binomial, ln_rational, to_rational};
use crate::params::{choose_ell, plan, solve_p, ConstructionPlan, DEFAULT_TOL};
use crate::special::{
    f_at_one_bounds, f_eval, falling_ratio_asymptotic, falling_ratio_exact, h_exact,
    h_relative_error,
};
use crate::{Error, Result, Seed};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// Counting and first-moment checks only.
    Tiny,
    /// Everything at desk sizes; about a minute on one core in release builds.
    Small,
    /// Larger samples and trial counts.
    Full,
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tiny" => Ok(Profile::Tiny),
            "small" => Ok(Profile::Small),
            "full" => Ok(Profile::Full),
            other => Err(Error::Parse(format!("unknown profile {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    /// The mathematical statement being checked.
    pub claim: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifySummary {
    pub profile: Profile,
    pub checks: Vec<CheckOutcome>,
}

impl VerifySummary {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// `Ok(detail)` for a pass, `Err(detail)` for a failure.
type CheckResult = std::result::Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lift<T>(r: Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

/// Full blow-ups counted by brute force versus a closed-form formula.
pub fn check_closed_form_vs_bruteforce(
    closed: &dyn Fn(usize, usize) -> Result<CountPair>,
) -> CheckResult {
    let cases = [(1, 2), (1, 3), (2, 2), (2, 3), (3, 2)];
    for (k, ell) in cases {
        let brute = lift(count_bruteforce(&lift(build_blowup(k, ell))?.to_general()))?;
        let formula = lift(closed(k, ell))?;
        ensure(brute == formula, || {
            format!("D({k},{ell}): brute force {brute:?} vs closed form {formula:?}")
        })?;
    }
    Ok(format!("{} blow-ups", cases.len()))
}

fn check_closed_form_vs_layered(max_k: usize) -> CheckResult {
    for k in 1..=max_k {
        for ell in 2..=4 {
            let full = lift(crate::digraph::SampledSubgraph::full(lift(build_blowup(k, ell))?))?;
            let layered = lift(count_layered(&full))?;
            ensure(layered == lift(closed_form_counts(k, ell))?, || {
                format!("D({k},{ell}) layered count disagrees with closed form")
            })?;
        }
    }
    Ok(format!("k <= {max_k}, ell <= 4"))
}

fn check_counters_agree(samples: u64, seed: Seed) -> CheckResult {
    let shapes = [(2, 2), (3, 2), (2, 3), (4, 2), (3, 3), (2, 4), (5, 2), (4, 3), (6, 2), (8, 2), (4, 4), (5, 3)];
    let mut brute_checked = 0;
    for t in 0..samples {
        let (k, ell) = shapes[t as usize % shapes.len()];
        let d = lift(build_blowup(k, ell))?;
        let s = seed.split(t);
        let m = (s.split(0).0 % (d.edge_count() as u64 + 1)) as usize;
        let g = lift(sample_subgraph(&d, m, s))?;
        let layered = lift(count_layered(&g))?;
        let general = g.to_general();
        ensure(layered.satisfies_universal_bounds(), || {
            format!("trial {t}: counts {layered:?} violate 2X <= Y or Y >= X + 1")
        })?;
        ensure(layered == lift(count_permanent(&general))?, || {
            format!("trial {t}: layered and permanent counts differ on D({k},{ell}), m = {m}")
        })?;
        if general.n() <= 9 {
            brute_checked += 1;
            ensure(layered == lift(count_bruteforce(&general))?, || {
                format!("trial {t}: layered and brute-force counts differ")
            })?;
        }
    }
    Ok(format!("{samples} subgraphs, {brute_checked} also brute-forced"))
}

fn check_bruteforce_vs_permanent(samples: u64, seed: Seed) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.0);
    for t in 0..samples {
        let n = 1 + (t as usize % 8);
        let density = [0.15, 0.35, 0.6, 0.85][t as usize % 4];
        let edges: Vec<_> = (0..n)
            .flat_map(|u| (0..n).map(move |v| (u, v)))
            .filter(|&(u, v)| u != v)
            .filter(|_| rng.random_bool(density))
            .collect();
        let g = lift(Digraph::new(n, edges))?;
        let brute = lift(count_bruteforce(&g))?;
        ensure(brute.satisfies_universal_bounds(), || format!("graph {t}: bound violated"))?;
        ensure(brute == lift(count_permanent(&g))?, || {
            format!("graph {t} (n = {n}): brute force and permanent differ")
        })?;
    }
    Ok(format!("{samples} random digraphs"))
}

fn check_falling_identity(max_a: i64) -> CheckResult {
    for a in 0..=max_a {
        for b in 0..=a {
            let den = BigInt::from(binomial(a, b));
            for x in 0..=b {
                let want = BigRational::new(BigInt::from(binomial(a - x, b - x)), den.clone());
                ensure(lift(falling_ratio_exact(a as u64, b as u64, x as u64))? == want, || {
                    format!("(a, b, x) = ({a}, {b}, {x})")
                })?;
            }
        }
    }
    Ok(format!("all 0 <= x <= b <= a <= {max_a}"))
}

fn check_falling_asymptotic_decay() -> CheckResult {
    let mut errors = Vec::new();
    for k in [4usize, 8, 16] {
        let pl = lift(plan(0.3, k))?;
        let (a, b, x) = ((k * k * pl.ell) as u64, pl.m as u64, (k * pl.ell) as u64);
        let exact = ln_rational(&lift(falling_ratio_exact(a, b, x))?);
        let approx = lift(falling_ratio_asymptotic(a, b, x))?.ln();
        errors.push(((exact - approx).exp() - 1.0).abs());
    }
    ensure(errors.windows(2).all(|w| w[1] < w[0]), || format!("errors {errors:?}"))?;
    Ok(format!("relative errors {errors:.3?}"))
}

/// Perfect matchings of `K_{a,a}` avoiding the edges `(w, w)` for `w < b`,
/// by enumerating all `a!` bijections.
pub fn forbidden_matchings_bruteforce(a: usize, b: usize) -> u64 {
    fn go(a: usize, b: usize, row: usize, used: u32) -> u64 {
        if row == a {
            return 1;
        }
        (0..a)
            .filter(|&col| used >> col & 1 == 0 && !(row < b && col == row))
            .map(|col| go(a, b, row + 1, used | 1 << col))
            .sum()
    }
    go(a, b, 0, 0)
}

fn check_h_vs_matchings(max_a: usize) -> CheckResult {
    for a in 0..=max_a {
        for b in 0..=a {
            let want = BigUint::from(forbidden_matchings_bruteforce(a, b));
            ensure(lift(h_exact(a, b))? == want, || format!("h({a}, {b})"))?;
        }
    }
    Ok(format!("a <= {max_a}"))
}

fn h_window_error(a: usize) -> Result<f64> {
    let lower = (a as f64 - (a as f64).powf(0.1)).ceil() as usize;
    (lower..=a).map(|b| h_relative_error(a, b)).try_fold(0.0f64, |acc, e| Ok(acc.max(e?)))
}

fn check_h_window_decay() -> CheckResult {
    let errors = [10, 20, 40].map(h_window_error);
    let errors: Vec<f64> = lift(errors.into_iter().collect())?;
    ensure(errors.windows(2).all(|w| w[1] < w[0]), || format!("errors {errors:?}"))?;
    Ok(format!("max window errors {errors:.3?}"))
}

fn check_f_bounds() -> CheckResult {
    for ell in 1..=12 {
        let (lo, hi) = f_at_one_bounds(ell);
        let v = lift(f_eval(ell, 1.0, 1e-14))?;
        ensure(lo - v.tail_bound <= v.value && v.value <= hi + v.tail_bound, || {
            format!("f_{ell}(1) = {} outside [{lo}, {hi}]", v.value)
        })?;
    }
    Ok("ell = 1..12".into())
}

fn check_solver() -> CheckResult {
    let mut worst = 0.0f64;
    for t in 0..50 {
        let r = 0.01 + 0.48 * f64::from(t) / 49.0;
        let ell = lift(choose_ell(r))?;
        let (p, _) = lift(solve_p(r, ell, DEFAULT_TOL))?;
        let residual = (lift(f_eval(ell, 1.0 / p, 1e-15))?.value * r - 1.0).abs();
        worst = worst.max(residual);
    }
    ensure(worst <= 1e-9, || format!("worst residual {worst:e}"))?;
    ensure(lift(choose_ell(0.3))? == 2 && lift(choose_ell(0.45))? == 3, || {
        "ell selection at r = 0.3 / 0.45".into()
    })?;
    Ok(format!("worst residual {worst:.2e}"))
}

struct Averages {
    ex: BigRational,
    ey: BigRational,
    ex2: BigRational,
    ey2: BigRational,
}

/// Exact averages of X, Y, X^2, Y^2 over every m-edge subgraph.
fn exhaustive_averages(k: usize, ell: usize, m: usize) -> Result<Averages> {
    let d = build_blowup(k, ell)?;
    let mut sums = [BigUint::zero(), BigUint::zero(), BigUint::zero(), BigUint::zero()];
    let mut n = 0u64;
    for g in enumerate_subgraphs(&d, m)? {
        let c = count_layered(&g)?;
        sums[2] += &c.derangements * &c.derangements;
        sums[3] += &c.permutations * &c.permutations;
        sums[0] += c.derangements;
        sums[1] += c.permutations;
        n += 1;
    }
    let [sx, sy, sx2, sy2] = sums;
    let avg = |s: BigUint| to_rational(s) / BigRational::from_integer(n.into());
    Ok(Averages {
        ex: avg(sx),
        ey: avg(sy),
        ex2: avg(sx2),
        ey2: avg(sy2),
    })
}

fn check_first_moments_exhaustive() -> CheckResult {
    for (k, ell) in [(2usize, 2usize), (2, 3)] {
        for m in 0..=k * k * ell {
            let avg = lift(exhaustive_averages(k, ell, m))?;
            ensure(lift(expected_x_exact(k, ell, m))? == avg.ex, || format!("E[X] at ({k},{ell},{m})"))?;
            ensure(lift(expected_y_exact(k, ell, m))? == avg.ey, || format!("E[Y] at ({k},{ell},{m})"))?;
        }
    }
    Ok("(2,2) m = 0..8 and (2,3) m = 0..12".into())
}

fn check_second_moments_exhaustive() -> CheckResult {
    for (k, ell) in [(2usize, 2usize), (2, 3)] {
        for m in 0..=k * k * ell {
            let avg = lift(exhaustive_averages(k, ell, m))?;
            if (k, ell) == (2, 2) {
                ensure(lift(second_moment_x_exact(k, ell, m))? == avg.ex2, || {
                    format!("E[X^2] at ({k},{ell},{m})")
                })?;
            }
            ensure(lift(second_moment_y_upper(k, ell, m))? >= avg.ey2, || {
                format!("E[Y^2] bound at ({k},{ell},{m})")
            })?;
        }
    }
    Ok("E[X^2] equality at (2,2); E[Y^2] domination at (2,2), (2,3)".into())
}

fn check_convergence_trend(ks: &[usize]) -> CheckResult {
    let mut gaps = Vec::new();
    let mut excess = Vec::new();
    for &k in ks {
        let report = lift(moment_report(&lift(plan(0.3, k))?))?;
        gaps.push((report.ratio_exact_f64 - 0.3).abs());
        excess.push(report.x_concentration.ok_or("E[X] = 0")?);
    }
    ensure(gaps.windows(2).all(|w| w[1] < w[0]), || format!("|E[X]/E[Y] - r| = {gaps:?}"))?;
    ensure(excess.windows(2).all(|w| w[1] < w[0]), || format!("E[X^2]/E[X]^2 - 1 = {excess:?}"))?;
    Ok(format!("k = {ks:?}: gaps {gaps:.4?}"))
}

fn check_asymptotic_consistency() -> CheckResult {
    let mut errors = Vec::new();
    for k in [4usize, 8, 16] {
        let pl = lift(plan(0.3, k))?;
        let p = pl.realized_density();
        let ex = ln_rational(&lift(expected_x_exact(k, pl.ell, pl.m))?);
        let ey = ln_rational(&lift(expected_y_exact(k, pl.ell, pl.m))?);
        let ax = lift(expected_x_asymptotic(k, pl.ell, p))?.ln;
        let ay = lift(expected_y_asymptotic(k, pl.ell, p))?.ln;
        errors.push((((ex - ax).exp() - 1.0).abs(), ((ey - ay).exp() - 1.0).abs()));
    }
    ensure(
        errors.windows(2).all(|w| w[1].0 < w[0].0 && w[1].1 < w[0].1),
        || format!("(E[X], E[Y]) relative errors {errors:?}"),
    )?;
    Ok(format!("relative errors {errors:.3?}"))
}

fn check_unbiased(trials: u64, seed: Seed) -> CheckResult {
    let pl = lift(ConstructionPlan::direct(3, 2, 9))?;
    let report = lift(run_mc(&pl, trials, seed, 0.05))?;
    let ex = crate::numeric::rational_to_f64(&lift(expected_x_exact(3, 2, 9))?);
    let se = report.sd_derangements / (trials as f64).sqrt();
    let z = (report.mean_derangements - ex) / se;
    ensure(z.abs() <= 5.0, || format!("mean {} vs E[X] = {ex}, z = {z:.2}", report.mean_derangements))?;
    Ok(format!("z = {z:.2} over {trials} trials"))
}

fn check_concentration(seed: Seed) -> CheckResult {
    let report = lift(run_mc(&lift(plan(0.3, 8))?, 200, seed, 0.05))?;
    ensure(report.per_trial.iter().all(|t| t.ratio <= 0.5), || "X/Y above 1/2".into())?;
    ensure(report.fraction_within >= 0.9, || {
        format!("fraction within 0.05 is {}", report.fraction_within)
    })?;
    Ok(format!("fraction within 0.05: {}", report.fraction_within))
}

fn check_determinism(seed: Seed) -> CheckResult {
    let pl = lift(plan(0.3, 6))?;
    let runs: Vec<String> = lift(
        [Some(1), Some(4), Some(1)]
            .into_iter()
            .map(|t| run_mc_with_threads(&pl, 64, seed, 0.05, t))
            .collect::<Result<Vec<_>>>(),
    )?
    .iter()
    .map(|r| serde_json::to_string(r).expect("reports serialize"))
    .collect();
    ensure(runs.windows(2).all(|w| w[0] == w[1]), || "reports differ between runs".into())?;
    Ok("1 and 4 worker threads, repeated".into())
}

/// Runs every check appropriate for `profile`.
pub fn verify_all(profile: Profile) -> VerifySummary {
    let seed = Seed(0);
    let small = profile != Profile::Tiny;
    let full = profile == Profile::Full;
    let mut plan_checks: Vec<(&'static str, &'static str, Box<dyn Fn() -> CheckResult>)> = vec![
        (
            "closed_form_vs_bruteforce",
            "full blow-up has (k!)^ell derangements and sum_i (C(k,i)(k-i)!)^ell permutations",
            Box::new(|| check_closed_form_vs_bruteforce(&closed_form_counts)),
        ),
        (
            "closed_form_vs_layered",
            "layered counter reproduces the closed forms on full blow-ups",
            Box::new(move || check_closed_form_vs_layered(if small { 6 } else { 4 })),
        ),
        (
            "counters_agree",
            "layered, permanent and brute-force counts coincide; 2X <= Y",
            Box::new(move || check_counters_agree(if full { 400 } else if small { 200 } else { 40 }, seed)),
        ),
        (
            "bruteforce_vs_permanent",
            "derangements = per(A), permutations = per(A + I)",
            Box::new(move || check_bruteforce_vs_permanent(if small { 200 } else { 50 }, seed)),
        ),
        (
            "falling_ratio_identity",
            "C(a-x, b-x) / C(a, b) = (b)_x / (a)_x",
            Box::new(move || check_falling_identity(if small { 40 } else { 20 })),
        ),
        (
            "h_vs_matchings",
            "h(a, b) counts perfect matchings of K_{a,a} avoiding a b-edge matching",
            Box::new(move || check_h_vs_matchings(if small { 7 } else { 5 })),
        ),
        (
            "f_at_one_bounds",
            "2 <= f_ell(1) <= 2 + 1/(2^ell - 1)",
            Box::new(check_f_bounds),
        ),
        (
            "solver",
            "f_ell(1/p) = 1/r with the least ell >= 2 admitting a root",
            Box::new(check_solver),
        ),
        (
            "first_moments_exhaustive",
            "E[X], E[Y] equal exhaustive subgraph averages",
            Box::new(check_first_moments_exhaustive),
        ),
    ];
    if small {
        plan_checks.extend([
            (
                "falling_ratio_asymptotic_decay",
                "(b)_x/(a)_x ~ (b/a)^x exp{x^2/2 (1/a - 1/b)} with error shrinking in k",
                Box::new(check_falling_asymptotic_decay) as Box<dyn Fn() -> CheckResult>,
            ),
            (
                "h_window_decay",
                "h(a, b) ~ a!/e for a - a^(1/10) <= b <= a",
                Box::new(check_h_window_decay),
            ),
            (
                "second_moments_exhaustive",
                "E[X^2] exact and E[Y^2] upper bound against exhaustive averages",
                Box::new(check_second_moments_exhaustive),
            ),
            (
                "convergence_trend",
                "E[X]/E[Y] -> r and E[X^2]/E[X]^2 -> 1 as k grows",
                Box::new(move || {
                    check_convergence_trend(if full { &[4, 6, 8, 10, 12, 16, 20] } else { &[4, 6, 8, 10, 12] })
                }),
            ),
            (
                "asymptotic_consistency",
                "E[X] ~ (k!)^ell p^(k ell) e^{ell(1-1/p)/2}, E[Y] ~ that times f_ell(1/p)",
                Box::new(check_asymptotic_consistency),
            ),
            (
                "unbiased_sampler",
                "empirical mean of X matches E[X] at (k, ell, m) = (3, 2, 9)",
                Box::new(move || check_unbiased(if full { 20_000 } else { 5_000 }, seed)),
            ),
            (
                "concentration",
                "X/Y concentrates near E[X]/E[Y] for plan(0.3, 8)",
                Box::new(move || check_concentration(seed)),
            ),
            (
                "determinism",
                "Monte Carlo reports are identical across runs and thread counts",
                Box::new(move || check_determinism(seed)),
            ),
        ]);
    }
    let checks = plan_checks
        .into_iter()
        .map(|(name, claim, run)| {
            let start = Instant::now();
            let result = run();
            let seconds = start.elapsed().as_secs_f64();
            let (passed, detail) = match result {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            CheckOutcome {
                name,
                claim,
                passed,
                detail,
                seconds,
            }
        })
        .collect();
    VerifySummary { profile, checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forbidden_matching_oracle_small_values() {
        assert_eq!(forbidden_matchings_bruteforce(4, 4), 9);
        assert_eq!(forbidden_matchings_bruteforce(2, 1), 1);
        assert_eq!(forbidden_matchings_bruteforce(3, 0), 6);
    }

    #[test]
    fn mutated_closed_form_is_caught() {
        assert!(check_closed_form_vs_bruteforce(&closed_form_counts).is_ok());
        let mutated = |k: usize, ell: usize| closed_form_counts(k, ell + 1);
        assert!(check_closed_form_vs_bruteforce(&mutated).is_err());
    }

    #[test]
    fn tiny_profile_passes_without_second_moments() {
        let summary = verify_all(Profile::Tiny);
        assert!(summary.all_passed(), "{:#?}", summary.checks);
        let names: Vec<_> = summary.checks.iter().map(|c| c.name).collect();
        assert!(names.contains(&"first_moments_exhaustive"));
        assert!(!names.contains(&"second_moments_exhaustive"));
    }

    #[test]
    fn profile_names() {
        assert_eq!("small".parse::<Profile>().unwrap(), Profile::Small);
        assert!("huge".parse::<Profile>().is_err());
    }
}

//! Exact and asymptotic moments of the derangement count `X` and the
//! permutation count `Y` of a uniform `m`-edge subgraph of `D(k, ell)`.
//!
//! Every exact moment is a sum over pairs (or single) permutation patterns of
//! the probability that a given set of `x` edges survives, which is the
//! falling-factorial ratio `(m)_x / (k^2 ell)_x`. Sums over layer profiles
//! `(b_1, ..., b_ell)` with `sum b_c = b` are read off as coefficients of an
//! `ell`-fold self-convolution rather than enumerated.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::digraph::build_blowup;
use crate::numeric::{
    binomial, factorial, ln_factorial, ln_rational, rational_to_f64, serialize_rational,
    to_rational, LogReal,
};
use crate::params::ConstructionPlan;
use crate::special::{f_eval, h_exact};
use crate::{Error, Result};

pub const FIRST_MOMENT_MAX_K: usize = 40;
pub const SECOND_MOMENT_MAX_K: usize = 25;

fn check_inputs(k: usize, ell: usize, m: usize) -> Result<usize> {
    let base = build_blowup(k, ell)?;
    let total = base.edge_count();
    if m > total {
        return Err(Error::EdgeCountOutOfRange { m, max: total });
    }
    Ok(total)
}

/// `survival[x] = (m)_x / (total)_x` for `x = 0..=max_x`, zero past `m`.
fn survival_table(total: usize, m: usize, max_x: usize) -> Vec<BigRational> {
    let mut table = Vec::with_capacity(max_x + 1);
    let mut current = BigRational::one();
    for x in 0..=max_x {
        table.push(current.clone());
        if x < m {
            current *= BigRational::new(BigInt::from(m - x), BigInt::from(total - x));
        } else {
            current = BigRational::zero();
        }
    }
    table
}

fn survival(table: &[BigRational], x: i64) -> &BigRational {
    debug_assert!(x >= 0);
    &table[x as usize]
}

/// Coefficients of `(sum_t g[t] z^t)^ell`: entry `b` is the sum over all
/// `ell`-tuples with total `b` of the product of `g` at each component.
pub fn composition_weights(g: &[BigUint], ell: usize) -> Vec<BigUint> {
    let mut acc = vec![BigUint::one()];
    for _ in 0..ell {
        let mut out = vec![BigUint::zero(); acc.len() + g.len() - 1];
        for (a, u) in acc.iter().enumerate() {
            if u.is_zero() {
                continue;
            }
            for (t, v) in g.iter().enumerate() {
                if !v.is_zero() {
                    out[a + t] += u * v;
                }
            }
        }
        acc = out;
    }
    acc
}

/// Walks the compositions of `b` into `ell` ordered parts, each at most
/// `max_part`, in lexicographic order.
#[derive(Debug, Clone)]
pub struct CompositionCursor {
    b: usize,
    max_part: usize,
    parts: Option<Vec<usize>>,
}

impl CompositionCursor {
    pub fn new(b: usize, ell: usize, max_part: usize) -> Self {
        let parts = (ell > 0 && b <= ell * max_part).then(|| {
            let mut parts = vec![0; ell];
            let mut left = b;
            for slot in parts.iter_mut().rev() {
                *slot = left.min(max_part);
                left -= *slot;
            }
            parts
        });
        CompositionCursor { b, max_part, parts }
    }

    pub fn total(&self) -> usize {
        self.b
    }
}

impl Iterator for CompositionCursor {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.parts.take()?;
        let ell = current.len();
        let mut next = current.clone();
        // Find the rightmost position that can grow while the suffix after it
        // can shrink by one; then refill the suffix as far right as possible.
        let mut suffix: usize = next[ell - 1];
        for pos in (0..ell - 1).rev() {
            if next[pos] < self.max_part && suffix > 0 {
                next[pos] += 1;
                let mut left = suffix - 1;
                for slot in next[pos + 1..].iter_mut().rev() {
                    *slot = left.min(self.max_part);
                    left -= *slot;
                }
                self.parts = Some(next);
                break;
            }
            suffix += next[pos];
        }
        Some(current)
    }
}

/// `E[X] = (k!)^ell (m)_{k ell} / (k^2 ell)_{k ell}`.
pub fn expected_x_exact(k: usize, ell: usize, m: usize) -> Result<BigRational> {
    let total = check_inputs(k, ell, m)?;
    let table = survival_table(total, m, k * ell);
    Ok(to_rational(factorial(k).pow(ell as u32)) * survival(&table, (k * ell) as i64))
}

/// `E[Y] = sum_i (C(k, i) (k - i)!)^ell (m)_{(k-i) ell} / (k^2 ell)_{(k-i) ell}`.
pub fn expected_y_exact(k: usize, ell: usize, m: usize) -> Result<BigRational> {
    let total = check_inputs(k, ell, m)?;
    let table = survival_table(total, m, k * ell);
    Ok((0..=k)
        .map(|i| {
            let patterns = (binomial(k as i64, i as i64) * factorial(k - i)).pow(ell as u32);
            to_rational(patterns) * survival(&table, ((k - i) * ell) as i64)
        })
        .sum())
}

fn check_density(p: f64) -> Result<()> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Domain(format!("edge density must lie in (0, 1], got {p}")));
    }
    Ok(())
}

/// `(k!)^ell p^(k ell) exp{(ell / 2)(1 - 1/p)}`, in log space.
pub fn expected_x_asymptotic(k: usize, ell: usize, p: f64) -> Result<LogReal> {
    build_blowup(k, ell)?;
    check_density(p)?;
    let ell_f = ell as f64;
    Ok(LogReal::from_ln(
        ell_f * ln_factorial(k) + (k * ell) as f64 * p.ln() + 0.5 * ell_f * (1.0 - 1.0 / p),
    ))
}

/// [`expected_x_asymptotic`] times `f_ell(1/p)`.
pub fn expected_y_asymptotic(k: usize, ell: usize, p: f64) -> Result<LogReal> {
    let x = expected_x_asymptotic(k, ell, p)?;
    let f = f_eval(ell as u32, 1.0 / p, 1e-15)?.value;
    Ok(LogReal::from_ln(x.ln + f.ln()))
}

/// Exact `E[X^2]`. For a fixed derangement `D`, a second derangement sharing
/// `b_c` edges with `D` in layer `c` is counted by `C(k, b_c) h(k - b_c, k - b_c)`
/// per layer, and the pair needs `2 k ell - b` edges to survive.
pub fn second_moment_x_exact(k: usize, ell: usize, m: usize) -> Result<BigRational> {
    let total = check_inputs(k, ell, m)?;
    let table = survival_table(total, m, 2 * k * ell);
    let per_layer = (0..=k)
        .map(|t| Ok(binomial(k as i64, t as i64) * h_exact(k - t, k - t)?))
        .collect::<Result<Vec<_>>>()?;
    let weights = composition_weights(&per_layer, ell);
    let sum: BigRational = weights
        .iter()
        .enumerate()
        .filter(|(_, w)| !w.is_zero())
        .map(|(b, w)| {
            let x = (2 * k * ell) as i64 - b as i64;
            to_rational(w.clone()) * survival(&table, x)
        })
        .sum();
    Ok(to_rational(factorial(k).pow(ell as u32)) * sum)
}

/// Per-layer weight for the `E[Y^2]` bound: `C(k-i, t) C(k-t, j) h(k-j-t, b')`
/// with `b' = max(0, k - i - t - 2j)`, zero when any count is out of range.
fn second_y_layer_weight(k: usize, i: usize, j: usize, t: usize) -> Result<BigUint> {
    let (k, i, j, t) = (k as i64, i as i64, j as i64, t as i64);
    let choose = binomial(k - i, t) * binomial(k - t, j);
    if choose.is_zero() {
        return Ok(choose);
    }
    let a = k - j - t;
    let forbidden = (k - i - t - 2 * j).max(0);
    Ok(choose * h_exact(a as usize, forbidden as usize)?)
}

/// Upper bound on `E[Y^2]`, summing over pairs `(P, P')` where `P` fixes `i`
/// vertices per part, `P'` fixes `j` per part and they share `b_c` edges in
/// layer `c`. The matching count for `P'` uses `h` with a lower bound on the
/// number of forbidden `P` edges, and `h` is decreasing in that argument.
pub fn second_moment_y_upper(k: usize, ell: usize, m: usize) -> Result<BigRational> {
    let total = check_inputs(k, ell, m)?;
    let table = survival_table(total, m, 2 * k * ell);
    let mut sum = BigRational::zero();
    for i in 0..=k {
        let first = to_rational((binomial(k as i64, i as i64) * factorial(k - i)).pow(ell as u32));
        for j in 0..=k {
            let per_layer = (0..=k)
                .map(|t| second_y_layer_weight(k, i, j, t))
                .collect::<Result<Vec<_>>>()?;
            let weights = composition_weights(&per_layer, ell);
            let inner: BigRational = weights
                .iter()
                .enumerate()
                .filter(|(_, w)| !w.is_zero())
                .map(|(b, w)| {
                    let x = (2 * k * ell) as i64 - ((i + j) * ell) as i64 - b as i64;
                    to_rational(w.clone()) * survival(&table, x)
                })
                .sum();
            sum += &first * inner;
        }
    }
    Ok(sum)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentReport {
    pub r: f64,
    pub k: usize,
    pub ell: usize,
    pub m: usize,
    /// Realized density `m / (k^2 ell)`; the asymptotic fields use it.
    pub p: f64,
    #[serde(serialize_with = "serialize_rational")]
    pub ex: BigRational,
    #[serde(serialize_with = "serialize_rational")]
    pub ey: BigRational,
    #[serde(serialize_with = "serialize_rational")]
    pub ex2: BigRational,
    #[serde(serialize_with = "serialize_rational")]
    pub ey2_upper: BigRational,
    pub ex_asym: LogReal,
    pub ey_asym: LogReal,
    #[serde(serialize_with = "serialize_rational")]
    pub ratio_exact: BigRational,
    pub ratio_exact_f64: f64,
    /// `E[X^2] / E[X]^2 - 1`; absent when `E[X] = 0`.
    pub x_concentration: Option<f64>,
    /// `ey2_upper / E[Y]^2 - 1`.
    pub y_concentration_bound: f64,
}

/// Flat CSV row of a [`MomentReport`]; big values appear as natural logs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentCsvRow {
    pub r: f64,
    pub k: usize,
    pub ell: usize,
    pub p: f64,
    pub m: usize,
    pub ln_ex: f64,
    pub ln_ey: f64,
    pub ln_ex2: f64,
    pub ln_ey2_upper: f64,
    pub ln_ex_asym: f64,
    pub ln_ey_asym: f64,
    pub ratio_exact: f64,
    pub x_concentration: Option<f64>,
    pub y_concentration_bound: f64,
}

impl MomentReport {
    pub fn csv_row(&self) -> MomentCsvRow {
        MomentCsvRow {
            r: self.r,
            k: self.k,
            ell: self.ell,
            p: self.p,
            m: self.m,
            ln_ex: ln_rational(&self.ex),
            ln_ey: ln_rational(&self.ey),
            ln_ex2: ln_rational(&self.ex2),
            ln_ey2_upper: ln_rational(&self.ey2_upper),
            ln_ex_asym: self.ex_asym.ln,
            ln_ey_asym: self.ey_asym.ln,
            ratio_exact: self.ratio_exact_f64,
            x_concentration: self.x_concentration,
            y_concentration_bound: self.y_concentration_bound,
        }
    }
}

fn relative_excess(second: &BigRational, first: &BigRational) -> Option<f64> {
    if first.is_zero() {
        return None;
    }
    Some(rational_to_f64(&(second / (first * first) - BigRational::one())))
}

/// All moments for a plan, exact where possible.
pub fn moment_report(plan: &ConstructionPlan) -> Result<MomentReport> {
    let (k, ell, m) = (plan.k, plan.ell, plan.m);
    if k > FIRST_MOMENT_MAX_K {
        return Err(Error::Budget {
            field: "ex/ey",
            k,
            limit: FIRST_MOMENT_MAX_K,
        });
    }
    if k > SECOND_MOMENT_MAX_K {
        return Err(Error::Budget {
            field: "ex2/ey2_upper",
            k,
            limit: SECOND_MOMENT_MAX_K,
        });
    }
    let ex = expected_x_exact(k, ell, m)?;
    let ey = expected_y_exact(k, ell, m)?;
    let ex2 = second_moment_x_exact(k, ell, m)?;
    let ey2_upper = second_moment_y_upper(k, ell, m)?;
    let p = plan.realized_density();
    let ratio_exact = &ex / &ey;
    Ok(MomentReport {
        r: plan.r,
        k,
        ell,
        m,
        p,
        ex_asym: expected_x_asymptotic(k, ell, p)?,
        ey_asym: expected_y_asymptotic(k, ell, p)?,
        ratio_exact_f64: rational_to_f64(&ratio_exact),
        x_concentration: relative_excess(&ex2, &ex),
        y_concentration_bound: relative_excess(&ey2_upper, &ey)
            .expect("E[Y] >= 1 since the identity always survives"),
        ratio_exact,
        ex,
        ey,
        ex2,
        ey2_upper,
    })
}

//! Parameter selection: from a target ratio `r` in `(0, 1/2)` to a number of
//! parts `ell`, an edge density `p` and a concrete edge count `m`.
//!
//! The expected ratio of the random model tends to `1 / f_ell(1/p)`, so the
//! plan solves `f_ell(x) = 1/r` for `x > 1` and sets `p = 1/x`. A root exists
//! as soon as `f_ell(1) < 1/r`, since `f_ell` is continuous, increasing and
//! unbounded on `[1, inf)`.

use serde::{Deserialize, Serialize};

use crate::digraph::Digraph;
use crate::special::f_eval;
use crate::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const MAX_BISECTION_STEPS: u32 = 200;
/// `f_ell(1) - 2` is about `2^-ell`; no `f64` ratio below 1/2 needs more.
const MAX_ELL: u32 = 1100;
const SELECTION_TOL: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstructionPlan {
    pub r: f64,
    pub ell: usize,
    pub p: f64,
    /// Root of `f_ell(x) = 1/r`; `p = 1/x`.
    pub x: f64,
    pub k: usize,
    pub m: usize,
}

impl ConstructionPlan {
    pub fn total_edges(&self) -> usize {
        self.k * self.k * self.ell
    }

    /// Density actually realized by the rounded edge count.
    pub fn realized_density(&self) -> f64 {
        self.m as f64 / self.total_edges() as f64
    }

    /// A plan for an arbitrary `(k, ell, m)`, skipping the solver. `p` is the
    /// realized density and `r` the limiting ratio `1 / f_ell(1/p)` it implies.
    pub fn direct(k: usize, ell: usize, m: usize) -> Result<Self> {
        crate::digraph::build_blowup(k, ell)?;
        let total = k * k * ell;
        if m == 0 || m > total {
            return Err(Error::EdgeCountOutOfRange { m, max: total });
        }
        let p = m as f64 / total as f64;
        let x = 1.0 / p;
        let r = 1.0 / f_eval(ell as u32, x, SELECTION_TOL)?.value;
        Ok(ConstructionPlan { r, ell, p, x, k, m })
    }
}

fn check_ratio(r: f64) -> Result<()> {
    if !(r > 0.0 && r < 0.5) {
        return Err(Error::RatioOutOfRange(r));
    }
    Ok(())
}

/// Smallest `ell >= 2` with `f_ell(1) < 1/r`.
pub fn choose_ell(r: f64) -> Result<u32> {
    check_ratio(r)?;
    let target = 1.0 / r;
    for ell in 2..=MAX_ELL {
        if f_eval(ell, 1.0, SELECTION_TOL)?.value < target {
            return Ok(ell);
        }
    }
    Err(Error::RatioOutOfRange(r))
}

/// Bisection for `x > 1` with `|f_ell(x) - 1/r| <= tol`; returns `(p, x)`.
pub fn solve_p(r: f64, ell: u32, tol: f64) -> Result<(f64, f64)> {
    check_ratio(r)?;
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let target = 1.0 / r;
    let series_tol = tol / 100.0;
    let f = |x: f64| f_eval(ell, x, series_tol).map(|s| s.value);
    let f_at_one = f(1.0)?;
    if f_at_one >= target {
        return Err(Error::NoRoot {
            ell,
            f_at_one,
            target,
        });
    }
    let mut lo = 1.0;
    let mut hi = 2.0;
    while f(hi)? <= target {
        lo = hi;
        hi *= 2.0;
    }
    let mut best = (f64::INFINITY, lo);
    for _ in 0..MAX_BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        let value = f(mid)?;
        let residual = (value - target).abs();
        if residual < best.0 {
            best = (residual, mid);
        }
        if residual <= tol {
            return Ok((1.0 / mid, mid));
        }
        if value < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_BISECTION_STEPS,
        residual: best.0,
    })
}

/// Full plan for target ratio `r` and part size `k`, with
/// `m = round(p k^2 ell)` (ties up).
pub fn plan(r: f64, k: usize) -> Result<ConstructionPlan> {
    check_ratio(r)?;
    if k < 2 {
        return Err(Error::Domain(format!("plans need k >= 2, got {k}")));
    }
    let ell = choose_ell(r)?;
    let (p, x) = solve_p(r, ell, DEFAULT_TOL)?;
    let ell = ell as usize;
    let total = k * k * ell;
    let m = (p * total as f64 + 0.5).floor() as usize;
    if m == 0 || m >= total {
        return Err(Error::DegeneratePlan { m, total });
    }
    Ok(ConstructionPlan { r, ell, p, x, k, m })
}

/// A digraph with ratio exactly 0: one vertex, no edges.
pub fn zero_ratio_graph() -> Digraph {
    Digraph::empty(1).expect("one vertex")
}

/// A digraph with ratio exactly 1/2: any directed cycle.
pub fn half_ratio_graph(n: usize) -> Result<Digraph> {
    Digraph::directed_cycle(n)
}

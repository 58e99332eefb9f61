//! Special functions: the series `f_ell`, the forbidden-matching count `h`,
//! and the falling-factorial ratio giving edge-survival probabilities.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::numeric::{binomial, factorial, ln_factorial, rational_to_f64};
use crate::{Error, Result};

/// A truncated series together with a certified bound on the dropped tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesValue {
    pub value: f64,
    /// Index of the last term included.
    pub truncation_index: u32,
    /// Upper bound on the truncation error `|f - value|`.
    pub tail_bound: f64,
}

const SERIES_TERM_CAP: u32 = 100_000;

/// `f_ell(x) = sum_{i >= 0} x^(i*ell) / (i!)^ell`, truncated once the tail is
/// certified below `tol / 2`.
///
/// Successive terms have ratio `(x / (i + 1))^ell`, which decreases in `i`.
/// Once that ratio `q` is at most 1/2 the remainder after term `i` is bounded
/// by the next term divided by `1 - q`.
pub fn f_eval(ell: u32, x: f64, tol: f64) -> Result<SeriesValue> {
    if ell < 1 {
        return Err(Error::Domain(format!("f_ell needs ell >= 1, got {ell}")));
    }
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::Domain(format!("f_ell needs finite x >= 0, got {x}")));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let exp = ell as i32;
    let mut sum = 0.0;
    let mut term = 1.0;
    for i in 0..SERIES_TERM_CAP {
        sum += term;
        let next = term * (x / f64::from(i + 1)).powi(exp);
        let q = (x / f64::from(i + 2)).powi(exp);
        if q <= 0.5 {
            let tail = next / (1.0 - q);
            if tail <= tol / 2.0 {
                return Ok(SeriesValue {
                    value: sum,
                    truncation_index: i,
                    tail_bound: tail,
                });
            }
        }
        if !sum.is_finite() {
            break;
        }
        term = next;
    }
    Err(Error::Domain(format!("f_{ell}({x}) does not fit in f64 range")))
}

/// Two-sided bound `2 <= f_ell(1) <= 2 + 1 / (2^ell - 1)`.
pub fn f_at_one_bounds(ell: u32) -> (f64, f64) {
    (2.0, 2.0 + 1.0 / (2f64.powi(ell as i32) - 1.0))
}

/// `h(a, b) = sum_w (-1)^w C(b, w) (a - w)!`: the number of perfect matchings
/// of `K_{a,a}` that avoid a fixed matching of `b` edges.
pub fn h_exact(a: usize, b: usize) -> Result<BigUint> {
    if b > a {
        return Err(Error::Domain(format!("h(a, b) needs b <= a, got a = {a}, b = {b}")));
    }
    let mut acc = BigInt::zero();
    for w in 0..=b {
        let term = BigInt::from(binomial(b as i64, w as i64) * factorial(a - w));
        if w % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    Ok(acc.to_biguint().expect("inclusion-exclusion count is nonnegative"))
}

fn check_h_window(a: usize, b: usize) -> Result<()> {
    let lower = a as f64 - (a as f64).powf(0.1);
    if a < 1 || b > a || (b as f64) < lower {
        return Err(Error::Domain(format!(
            "h asymptotics need a >= 1 and a - a^(1/10) <= b <= a, got a = {a}, b = {b}"
        )));
    }
    Ok(())
}

/// Leading-order value `a! / e` of `h(a, b)` for `b` within `a^(1/10)` of `a`.
pub fn h_asymptotic(a: usize, b: usize) -> Result<f64> {
    check_h_window(a, b)?;
    Ok((ln_factorial(a) - 1.0).exp())
}

/// `|e * h(a, b) / a! - 1|`, the relative error of [`h_asymptotic`].
pub fn h_relative_error(a: usize, b: usize) -> Result<f64> {
    check_h_window(a, b)?;
    let ratio = BigRational::new(
        BigInt::from(h_exact(a, b)?),
        BigInt::from(factorial(a)),
    );
    Ok((std::f64::consts::E * rational_to_f64(&ratio) - 1.0).abs())
}

fn falling(n: u64, x: u64) -> BigUint {
    (0..x).fold(BigUint::one(), |acc, t| acc * (n - t))
}

fn check_falling(a: u64, b: u64, x: u64) -> Result<()> {
    if x > b || b > a {
        return Err(Error::Domain(format!(
            "falling ratio needs 0 <= x <= b <= a, got a = {a}, b = {b}, x = {x}"
        )));
    }
    Ok(())
}

/// `(b)_x / (a)_x = C(a - x, b - x) / C(a, b)`, exactly.
pub fn falling_ratio_exact(a: u64, b: u64, x: u64) -> Result<BigRational> {
    check_falling(a, b, x)?;
    Ok(BigRational::new(
        BigInt::from(falling(b, x)),
        BigInt::from(falling(a, x)),
    ))
}

/// `(b/a)^x * exp{(x^2 / 2)(1/a - 1/b)}`, the explicit part of the
/// large-`b` expansion of `(b)_x / (a)_x`.
pub fn falling_ratio_asymptotic(a: u64, b: u64, x: u64) -> Result<f64> {
    check_falling(a, b, x)?;
    if b == 0 {
        return Err(Error::Domain("falling ratio asymptotics need b > 0".into()));
    }
    let (a, b, x) = (a as f64, b as f64, x as f64);
    Ok((x * (b / a).ln() + 0.5 * x * x * (1.0 / a - 1.0 / b)).exp())
}

/// Probability that `x` prescribed edges of `D(k, ell)` all survive in a
/// uniform `m`-edge subgraph. Zero when `x < 0` or `x > m`.
///
/// Panics if `m > k^2 ell`.
pub fn edge_prob_exact(k: usize, ell: usize, m: usize, x: i64) -> BigRational {
    let total = (k * k * ell) as u64;
    assert!(m as u64 <= total, "m = {m} exceeds k^2 ell = {total}");
    if x < 0 || x as u64 > m as u64 {
        return BigRational::zero();
    }
    falling_ratio_exact(total, m as u64, x as u64).expect("range checked above")
}

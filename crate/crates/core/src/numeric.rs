//! Big-number helpers shared by the counting and moment code.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

pub fn factorial(n: usize) -> BigUint {
    (2..=n as u64).fold(BigUint::one(), |acc, j| acc * j)
}

/// `C(n, r)`, zero whenever `r < 0` or `r > n` (including negative `n`).
pub fn binomial(n: i64, r: i64) -> BigUint {
    if n < 0 || r < 0 || r > n {
        return BigUint::zero();
    }
    let r = r.min(n - r) as u64;
    let n = n as u64;
    let mut acc = BigUint::one();
    for t in 0..r {
        acc = acc * (n - t) / (t + 1);
    }
    acc
}

/// `ln(n!)` as a direct sum of logarithms.
pub fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|j| (j as f64).ln()).sum()
}

/// Natural log of a big unsigned integer; `-inf` for zero.
pub fn ln_biguint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    let shift = bits.saturating_sub(64);
    let top = (x >> shift).to_u64().expect("at most 64 bits remain") as f64;
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural log of a positive rational; `-inf` for zero.
pub fn ln_rational(x: &BigRational) -> f64 {
    assert!(!x.is_negative(), "logarithm of a negative rational");
    let num = x.numer().magnitude();
    let den = x.denom().magnitude();
    ln_biguint(num) - ln_biguint(den)
}

/// Rational to `f64` through logarithms, so that huge numerators and
/// denominators with a moderate quotient still convert.
pub fn rational_to_f64(x: &BigRational) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let mag = ln_rational(&x.abs()).exp();
    if x.is_negative() {
        -mag
    } else {
        mag
    }
}

pub fn to_rational(x: BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// A positive real held by its natural logarithm, for magnitudes such as
/// `(k!)^ell` that leave the `f64` range.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct LogReal {
    pub ln: f64,
}

impl LogReal {
    pub fn from_ln(ln: f64) -> Self {
        LogReal { ln }
    }

    /// Plain value; overflows to infinity when out of range.
    pub fn to_f64(self) -> f64 {
        self.ln.exp()
    }

    /// `(mantissa, exponent)` with `value = mantissa * 10^exponent` and
    /// `1 <= mantissa < 10`.
    pub fn mantissa_exponent(self) -> (f64, i64) {
        let log10 = self.ln / std::f64::consts::LN_10;
        let exponent = log10.floor();
        (10f64.powf(log10 - exponent), exponent as i64)
    }

    /// `self / other` as a plain real.
    pub fn ratio(self, other: LogReal) -> f64 {
        (self.ln - other.ln).exp()
    }
}

pub(crate) fn serialize_rational<S: Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

pub(crate) fn serialize_biguint<S: Serializer>(x: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_conventions() {
        assert_eq!(binomial(5, 2), BigUint::from(10u32));
        assert_eq!(binomial(5, 6), BigUint::zero());
        assert_eq!(binomial(5, -1), BigUint::zero());
        assert_eq!(binomial(-2, 1), BigUint::zero());
        assert_eq!(binomial(0, 0), BigUint::one());
        assert_eq!(binomial(40, 20), BigUint::from(137_846_528_820u64));
    }

    #[test]
    fn logs_of_big_values() {
        let f = factorial(100);
        assert!((ln_biguint(&f) - ln_factorial(100)).abs() < 1e-9);
        let r = BigRational::new(BigInt::from(factorial(60)), BigInt::from(factorial(59)));
        assert!((rational_to_f64(&r) - 60.0).abs() < 1e-9);
        let (mant, exp) = LogReal::from_ln(ln_factorial(10)).mantissa_exponent();
        assert_eq!(exp, 6);
        assert!((mant - 3.6288).abs() < 1e-9);
    }
}

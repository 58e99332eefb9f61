//! Exact derangement and permutation counts.
//!
//! Three counters with overlapping domains serve as oracles for each other:
//! literal enumeration of bijections, Ryser permanents of the adjacency
//! matrix, and a layered transfer-matrix count for blow-up subgraphs.

mod layered;
mod ryser;

pub use layered::{count_layered, LAYERED_MAX_K};
pub use ryser::{permanent, BinaryMatrix, PERMANENT_MAX_N};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::digraph::Digraph;
use crate::numeric::{binomial, factorial, serialize_biguint};
use crate::{Error, Result};

pub const BRUTEFORCE_MAX_N: usize = 10;

/// Derangement count `X` and permutation count `Y` of one digraph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct CountPair {
    #[serde(serialize_with = "serialize_biguint")]
    pub derangements: BigUint,
    #[serde(serialize_with = "serialize_biguint")]
    pub permutations: BigUint,
}

impl CountPair {
    pub fn new(derangements: impl Into<BigUint>, permutations: impl Into<BigUint>) -> Self {
        CountPair {
            derangements: derangements.into(),
            permutations: permutations.into(),
        }
    }

    pub fn ratio(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.derangements.clone()),
            BigInt::from(self.permutations.clone()),
        )
    }

    pub fn ratio_f64(&self) -> f64 {
        crate::numeric::rational_to_f64(&self.ratio())
    }

    /// `Y >= X + 1` and `2X <= Y`.
    pub fn satisfies_universal_bounds(&self) -> bool {
        let x = &self.derangements;
        let y = &self.permutations;
        *y >= x + 1u32 && x * 2u32 <= *y
    }
}

/// Counts by checking every one of the `n!` bijections against the
/// definition: each vertex is fixed or mapped along an out-edge.
pub fn count_bruteforce(g: &Digraph) -> Result<CountPair> {
    let n = g.n();
    if n > BRUTEFORCE_MAX_N {
        return Err(Error::TooLarge {
            what: "brute-force counting",
            got: n,
            limit: BRUTEFORCE_MAX_N,
        });
    }
    let out = g.out_masks()?;
    let mut f: Vec<usize> = (0..n).collect();
    let (mut der, mut perm) = (0u64, 0u64);
    loop {
        let allowed = f
            .iter()
            .enumerate()
            .all(|(v, &w)| v == w || out[v] & (1 << w) != 0);
        if allowed {
            perm += 1;
            if f.iter().enumerate().all(|(v, &w)| v != w) {
                der += 1;
            }
        }
        if !next_permutation(&mut f) {
            break;
        }
    }
    Ok(CountPair::new(der, perm))
}

fn next_permutation(a: &mut [usize]) -> bool {
    let Some(i) = (1..a.len()).rev().find(|&i| a[i - 1] < a[i]) else {
        return false;
    };
    let j = (i..a.len()).rev().find(|&j| a[j] > a[i - 1]).expect("pivot has a successor");
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

/// Derangements are `per(A)` and permutations `per(A + I)`.
pub fn count_permanent(g: &Digraph) -> Result<CountPair> {
    if g.n() > PERMANENT_MAX_N {
        return Err(Error::TooLarge {
            what: "permanent counting",
            got: g.n(),
            limit: PERMANENT_MAX_N,
        });
    }
    let adjacency = BinaryMatrix::from_rows(g.n(), g.out_masks()?)?;
    let derangements = permanent(&adjacency)?;
    let permutations = permanent(&adjacency.with_identity())?;
    Ok(CountPair {
        derangements,
        permutations,
    })
}

fn check_blowup(k: usize, ell: usize) -> Result<()> {
    if k < 1 || ell < 2 {
        return Err(Error::InvalidBlowup { k, ell });
    }
    Ok(())
}

/// Counts on the full blow-up: `(k!)^ell` derangements and
/// `sum_i (C(k, i) (k - i)!)^ell` permutations.
pub fn closed_form_counts(k: usize, ell: usize) -> Result<CountPair> {
    check_blowup(k, ell)?;
    let derangements = factorial(k).pow(ell as u32);
    let permutations = (0..=k)
        .map(|i| (binomial(k as i64, i as i64) * factorial(k - i)).pow(ell as u32))
        .sum();
    Ok(CountPair {
        derangements,
        permutations,
    })
}

/// `1 / sum_{i=0}^{k} (1 / i!)^ell`, the ratio on the full blow-up.
pub fn closed_form_ratio(k: usize, ell: usize) -> Result<BigRational> {
    check_blowup(k, ell)?;
    let sum = (0..=k).fold(BigRational::zero(), |acc, i| {
        acc + BigRational::new(BigInt::one(), BigInt::from(factorial(i).pow(ell as u32)))
    });
    Ok(sum.recip())
}

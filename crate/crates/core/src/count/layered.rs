//! Layered counting on subgraphs of the blow-up.
//!
//! Every permutation of a subgraph of `D(k, ell)` fixes the same number `i` of
//! vertices in each part, and the moving vertices of part `c` are matched onto
//! the moving vertices of part `c + 1`. Indexing the moving sets by `R_c`,
//!
//! ```text
//! #permutations = sum_i trace(T_1 T_2 ... T_ell),   T_c[R_c][R_{c+1}] = per(layer_c[R_c, R_{c+1}])
//! ```
//!
//! with `|R_c| = k - i`, and the derangements are the `i = 0` term.
//!
//! Minor permanents are tabulated level by level over `(row set, column set)`
//! pairs of equal size `s`: the top row of `R` is matched to each admissible
//! column and the rest is looked up at level `s - 1`.

use std::ops::{AddAssign, Mul};

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::{closed_form_counts, CountPair};
use crate::digraph::SampledSubgraph;
use crate::{Error, Result};

pub const LAYERED_MAX_K: usize = 12;

/// Masks of `0..k` grouped by popcount, with each mask's rank in its group.
struct Subsets {
    by_size: Vec<Vec<u32>>,
    rank: Vec<u32>,
}

impl Subsets {
    fn new(k: usize) -> Self {
        let mut by_size = vec![Vec::new(); k + 1];
        let mut rank = vec![0u32; 1 << k];
        for mask in 0u32..(1 << k) {
            let group = &mut by_size[mask.count_ones() as usize];
            rank[mask as usize] = group.len() as u32;
            group.push(mask);
        }
        Subsets { by_size, rank }
    }
}

/// Permanents of all `s x s` minors of one layer, row-major over ranks.
fn next_level(layer: &[u64], subsets: &Subsets, s: usize, prev: &[u64]) -> Vec<u64> {
    let sets = &subsets.by_size[s];
    let prev_n = subsets.by_size[s - 1].len();
    let n = sets.len();
    let mut table = vec![0u64; n * n];
    for (r_rank, &rows) in sets.iter().enumerate() {
        let top = 31 - rows.leading_zeros();
        let rest = rows ^ (1 << top);
        let base = subsets.rank[rest as usize] as usize * prev_n;
        let nbrs = layer[top as usize] as u32;
        for (c_rank, &cols) in sets.iter().enumerate() {
            let mut cand = cols & nbrs;
            let mut sum = 0u64;
            while cand != 0 {
                let bit = cand & cand.wrapping_neg();
                cand ^= bit;
                sum += prev[base + subsets.rank[(cols ^ bit) as usize] as usize];
            }
            table[r_rank * n + c_rank] = sum;
        }
    }
    table
}

/// `trace(T_1 ... T_ell)` for `n x n` tables; skips zero entries.
fn trace_of_product<T>(tables: &[Vec<u64>], n: usize) -> T
where
    T: Clone + Zero + From<u64> + AddAssign + Mul<Output = T>,
{
    let (last, init) = tables.split_last().expect("ell >= 2 tables");
    let mut acc: Vec<T> = init[0].iter().map(|&v| T::from(v)).collect();
    for table in &init[1..] {
        let mut out = vec![T::zero(); n * n];
        for a in 0..n {
            for b in 0..n {
                let left = &acc[a * n + b];
                if left.is_zero() {
                    continue;
                }
                for col in 0..n {
                    let right = table[b * n + col];
                    if right != 0 {
                        out[a * n + col] += left.clone() * T::from(right);
                    }
                }
            }
        }
        acc = out;
    }
    let mut trace = T::zero();
    for a in 0..n {
        for b in 0..n {
            let right = last[b * n + a];
            if right != 0 && !acc[a * n + b].is_zero() {
                trace += acc[a * n + b].clone() * T::from(right);
            }
        }
    }
    trace
}

/// Exact counts for a blow-up subgraph via per-level transfer matrices.
pub fn count_layered(g: &SampledSubgraph) -> Result<CountPair> {
    let base = g.base();
    let (k, ell) = (base.k(), base.ell());
    if k > LAYERED_MAX_K {
        return Err(Error::TooLarge {
            what: "layered counting part size k",
            got: k,
            limit: LAYERED_MAX_K,
        });
    }
    // Partial products of a subgraph never exceed the full blow-up's
    // permutation count, so u128 is safe whenever that count fits.
    let fits_u128 = closed_form_counts(k, ell)?.permutations.bits() < 128;
    let subsets = Subsets::new(k);
    let mut tables: Vec<Vec<u64>> = vec![vec![1]; ell];
    let mut permutations = BigUint::zero();
    for s in 0..=k {
        if s > 0 {
            tables = (0..ell)
                .map(|c| next_level(g.layer(c), &subsets, s, &tables[c]))
                .collect();
        }
        let n = subsets.by_size[s].len();
        permutations += if fits_u128 {
            BigUint::from(trace_of_product::<u128>(&tables, n))
        } else {
            trace_of_product::<BigUint>(&tables, n)
        };
    }
    let derangements = tables
        .iter()
        .fold(BigUint::one(), |acc, t| acc * BigUint::from(t[0]));
    Ok(CountPair {
        derangements,
        permutations,
    })
}

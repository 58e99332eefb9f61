use num_bigint::BigUint;

use crate::{Error, Result};

/// Largest order accepted by [`permanent`]: `30!` is below `2^127`, which the
/// wrapping accumulator below relies on.
pub const PERMANENT_MAX_N: usize = 30;

/// Square 0/1 matrix with rows stored as bit masks (`n <= 64`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryMatrix {
    n: usize,
    rows: Vec<u64>,
}

impl BinaryMatrix {
    pub fn from_rows(n: usize, rows: Vec<u64>) -> Result<Self> {
        if n > 64 || rows.len() != n {
            return Err(Error::Domain(format!(
                "binary matrix needs n <= 64 and n rows, got n = {n} with {} rows",
                rows.len()
            )));
        }
        let limit = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        if rows.iter().any(|&r| r & !limit != 0) {
            return Err(Error::Domain("row mask has bits beyond column n".into()));
        }
        Ok(BinaryMatrix { n, rows })
    }

    /// From nested 0/1 entries; any nonzero entry counts as 1.
    pub fn from_entries(entries: &[Vec<u8>]) -> Result<Self> {
        let n = entries.len();
        if entries.iter().any(|r| r.len() != n) {
            return Err(Error::Domain("matrix must be square".into()));
        }
        let rows = entries
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(_, &a)| a != 0)
                    .fold(0u64, |acc, (j, _)| acc | 1 << j)
            })
            .collect();
        Self::from_rows(n, rows)
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_rows(n, (0..n).map(|i| 1u64 << i).collect())
    }

    pub fn all_ones(n: usize) -> Result<Self> {
        let row = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        Self::from_rows(n, vec![row; n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    /// `A + I` with the diagonal forced to 1.
    pub fn with_identity(&self) -> Self {
        BinaryMatrix {
            n: self.n,
            rows: self.rows.iter().enumerate().map(|(i, &r)| r | 1 << i).collect(),
        }
    }
}

/// Ryser's formula
/// `per(A) = (-1)^n sum_{S subset of columns} (-1)^|S| prod_i sum_{j in S} a_ij`,
/// walking the column subsets in Gray-code order so each step adds or removes
/// a single column from the running row sums.
///
/// The signed sum is accumulated modulo `2^128`. Since `0 <= per(A) <= n!` and
/// `n! < 2^127` for `n <= 30`, the wrapped result is the exact permanent.
pub fn permanent(matrix: &BinaryMatrix) -> Result<BigUint> {
    let n = matrix.n;
    if n > PERMANENT_MAX_N {
        return Err(Error::TooLarge {
            what: "permanent",
            got: n,
            limit: PERMANENT_MAX_N,
        });
    }
    if n == 0 {
        return Ok(BigUint::from(1u32));
    }
    let mut columns = vec![0u64; n];
    for (i, &row) in matrix.rows.iter().enumerate() {
        for (j, col) in columns.iter_mut().enumerate() {
            if row >> j & 1 == 1 {
                *col |= 1 << i;
            }
        }
    }
    let mut row_sums = vec![0u32; n];
    let mut zero_rows = n;
    let mut subset_size = 0usize;
    let mut acc: u128 = 0;
    let mut prev_gray: u64 = 0;
    for g in 1u64..(1u64 << n) {
        let gray = g ^ (g >> 1);
        let j = (gray ^ prev_gray).trailing_zeros() as usize;
        let adding = gray >> j & 1 == 1;
        prev_gray = gray;
        let mut col = columns[j];
        while col != 0 {
            let i = col.trailing_zeros() as usize;
            col &= col - 1;
            if adding {
                if row_sums[i] == 0 {
                    zero_rows -= 1;
                }
                row_sums[i] += 1;
            } else {
                row_sums[i] -= 1;
                if row_sums[i] == 0 {
                    zero_rows += 1;
                }
            }
        }
        if adding {
            subset_size += 1;
        } else {
            subset_size -= 1;
        }
        if zero_rows > 0 {
            continue;
        }
        let prod = row_sums
            .iter()
            .fold(1u128, |p, &s| p.wrapping_mul(u128::from(s)));
        if (n - subset_size) % 2 == 0 {
            acc = acc.wrapping_add(prod);
        } else {
            acc = acc.wrapping_sub(prod);
        }
    }
    Ok(BigUint::from(acc))
}

//! Exact ranks of integer matrices.

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

/// Rank of an integer matrix by fraction-free (Bareiss) elimination.
///
/// Every intermediate entry is a minor of the input, so for {-1, 0, 1}
/// matrices overflow only occurs for very large, dense systems; it is
/// reported as [`Error::RankOverflow`] rather than wrapping.
pub fn integer_rank(m: &CsrMatrix<i32>) -> Result<usize> {
    let (rows, cols) = (m.nrows(), m.ncols());
    let mut a = vec![vec![0i128; cols]; rows];
    for (r, c, v) in m.iter() {
        a[r][c] = v as i128;
    }

    let mut rank = 0;
    let mut prev_pivot: i128 = 1;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| a[r][col] != 0) else {
            continue;
        };
        a.swap(rank, p);
        let pivot = a[rank][col];
        for r in rank + 1..rows {
            let (top, bottom) = a.split_at_mut(r);
            let (pivot_row, row) = (&top[rank], &mut bottom[0]);
            let factor = row[col];
            for (x, &y) in row[col..cols].iter_mut().zip(&pivot_row[col..cols]) {
                let v = pivot
                    .checked_mul(*x)
                    .zip(factor.checked_mul(y))
                    .and_then(|(x, y)| x.checked_sub(y))
                    .ok_or(Error::RankOverflow)?;
                // exact division by construction
                *x = v / prev_pivot;
            }
        }
        prev_pivot = pivot;
        rank += 1;
    }
    Ok(rank)
}

/// Rank of an integer matrix over the field `Z/pZ`.
///
/// This never exceeds the rational rank and equals it unless `p` divides
/// every maximal nonzero minor; with a large prime it serves as an
/// independent cross-check of [`integer_rank`].
pub fn rank_mod_prime(m: &CsrMatrix<i32>, p: u64) -> usize {
    let (rows, cols) = (m.nrows(), m.ncols());
    let mut a = vec![vec![0u64; cols]; rows];
    for (r, c, v) in m.iter() {
        a[r][c] = (v as i64).rem_euclid(p as i64) as u64;
    }
    let inv = |x: u64| pow_mod(x, p - 2, p);

    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(piv) = (rank..rows).find(|&r| a[r][col] != 0) else {
            continue;
        };
        a.swap(rank, piv);
        let scale = inv(a[rank][col]);
        for r in rank + 1..rows {
            if a[r][col] == 0 {
                continue;
            }
            let factor = a[r][col] * scale % p;
            let (top, bottom) = a.split_at_mut(r);
            for (x, &y) in bottom[0][col..cols].iter_mut().zip(&top[rank][col..cols]) {
                *x = (*x + p - factor * y % p) % p;
            }
        }
        rank += 1;
    }
    rank
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u64 = 1_000_000_007;

    #[test]
    fn rank_of_small_matrices() {
        let m = CsrMatrix::from_triplets(3, 3, vec![(0, 0, 1), (1, 1, 1), (2, 0, 1), (2, 1, 1)]);
        assert_eq!(integer_rank(&m).unwrap(), 2);
        assert_eq!(rank_mod_prime(&m, P), 2);
        assert_eq!(integer_rank(&CsrMatrix::<i32>::zeros(4, 2)).unwrap(), 0);
    }

    #[test]
    fn rank_mod_two_can_drop() {
        // det = 2, singular mod 2 only
        let m = CsrMatrix::from_triplets(2, 2, vec![(0, 0, 1), (0, 1, 1), (1, 0, 1), (1, 1, -1)]);
        assert_eq!(integer_rank(&m).unwrap(), 2);
        assert_eq!(rank_mod_prime(&m, 2), 1);
        assert_eq!(rank_mod_prime(&m, P), 2);
    }
}

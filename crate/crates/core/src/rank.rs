//! Exact rank by fraction-free (Bareiss) elimination.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::Rational;

/// Rank of an integer matrix given as rows. All rows must share a length.
pub fn rank_integer(mut rows: Vec<Vec<BigInt>>) -> usize {
    let height = rows.len();
    let width = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prev_pivot = BigInt::one();

    for col in 0..width {
        if rank == height {
            break;
        }
        let Some(pivot_row) = (rank..height).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot_row);
        let (top, rest) = rows.split_at_mut(rank + 1);
        let pivot = &top[rank];
        for row in rest.iter_mut() {
            let factor = row[col].clone();
            for c in col..width {
                // Bareiss step: the division by the previous pivot is exact
                let v = &pivot[col] * &row[c] - &factor * &pivot[c];
                row[c] = v / &prev_pivot;
            }
        }
        prev_pivot = top[rank][col].clone();
        rank += 1;
    }
    rank
}

/// Rank of a rational matrix; each row is cleared of denominators first.
pub fn rank_rational(rows: &[Vec<Rational>]) -> usize {
    let scaled = rows
        .iter()
        .map(|row| {
            let lcm = row.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
            row.iter().map(|q| q.numer() * (&lcm / q.denom())).collect()
        })
        .collect();
    rank_integer(scaled)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
            .collect()
    }

    #[test]
    fn small_ranks() {
        assert_eq!(rank_integer(ints(&[&[1, 0], &[0, 1]])), 2);
        assert_eq!(rank_integer(ints(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(rank_integer(ints(&[&[0, 0], &[0, 0]])), 0);
        assert_eq!(rank_integer(ints(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]])), 2);
        assert_eq!(rank_integer(ints(&[&[0, 1, 1], &[0, 1, 1], &[1, 0, 0]])), 2);
        assert_eq!(rank_integer(Vec::new()), 0);
    }

    #[test]
    fn tall_and_wide() {
        assert_eq!(
            rank_integer(ints(&[&[1, 1], &[1, -1], &[2, 0], &[3, 3]])),
            2
        );
        assert_eq!(rank_integer(ints(&[&[2, 4, 6, 8]])), 1);
    }

    #[test]
    fn rational_rows() {
        let h = Rational::new(1, 2).unwrap();
        let q = Rational::new(1, 3).unwrap();
        let rows = vec![vec![h.clone(), h.clone()], vec![q.clone(), q.clone()]];
        assert_eq!(rank_rational(&rows), 1);
        let rows = vec![vec![h.clone(), q.clone()], vec![q, h]];
        assert_eq!(rank_rational(&rows), 2);
    }
}

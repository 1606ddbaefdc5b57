use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinearError {
    #[error("linear system is inconsistent")]
    Inconsistent,
    #[error("solution is not unique (rank {rank} < {unknowns} unknowns)")]
    Underdetermined { rank: usize, unknowns: usize },
    #[error("row {0} has the wrong length")]
    Shape(usize),
}

/// Solve `a x = b` exactly by fraction-free elimination.
pub fn solve_exact_linear(a: &[Vec<BigRational>], b: &[BigRational]) -> Result<Vec<BigRational>, LinearError> {
    let nrows = a.len();
    assert_eq!(nrows, b.len(), "one right-hand side per row");
    let ncols = a.first().map(|r| r.len()).unwrap_or(0);
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(nrows);
    for (i, (row, rhs)) in a.iter().zip(b).enumerate() {
        if row.len() != ncols {
            return Err(LinearError::Shape(i));
        }
        let l = row.iter().chain(std::iter::once(rhs)).fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        rows.push(
            row.iter()
                .chain(std::iter::once(rhs))
                .map(|q| q.numer() * (&l / q.denom()))
                .collect(),
        );
    }
    let mut prev = BigInt::one();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let (top, bottom) = rows.split_at_mut(r + 1);
        let prow = &top[r];
        for row in bottom.iter_mut() {
            let lead = row[col].clone();
            for j in col + 1..=ncols {
                let v = &prow[col] * &row[j] - &lead * &prow[j];
                row[j] = v / &prev;
            }
            row[col] = BigInt::zero();
        }
        prev = rows[r][col].clone();
        pivots.push(col);
        r += 1;
    }
    if rows[r..].iter().any(|row| !row[ncols].is_zero()) {
        return Err(LinearError::Inconsistent);
    }
    if r < ncols {
        return Err(LinearError::Underdetermined { rank: r, unknowns: ncols });
    }
    let mut x = vec![BigRational::zero(); ncols];
    for k in (0..r).rev() {
        let col = pivots[k];
        let mut acc = BigRational::from_integer(rows[k][ncols].clone());
        for j in col + 1..ncols {
            if !rows[k][j].is_zero() {
                acc -= BigRational::from_integer(rows[k][j].clone()) * &x[j];
            }
        }
        x[col] = acc / BigRational::from_integer(rows[k][col].clone());
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn diagonal_system() {
        let a = vec![vec![q(2), q(0)], vec![q(0), q(3)]];
        let x = solve_exact_linear(&a, &[q(1), q(1)]).unwrap();
        assert_eq!(x, vec![BigRational::new(1.into(), 2.into()), BigRational::new(1.into(), 3.into())]);
    }

    #[test]
    fn inconsistent_and_underdetermined() {
        let a = vec![vec![q(1), q(1)], vec![q(2), q(2)]];
        assert_eq!(solve_exact_linear(&a, &[q(1), q(3)]), Err(LinearError::Inconsistent));
        assert!(matches!(solve_exact_linear(&a, &[q(1), q(2)]), Err(LinearError::Underdetermined { .. })));
    }

    #[test]
    fn overdetermined_consistent() {
        let a = vec![vec![q(1), q(0)], vec![q(0), q(1)], vec![q(1), q(1)]];
        let x = solve_exact_linear(&a, &[q(2), q(5), q(7)]).unwrap();
        assert_eq!(x, vec![q(2), q(5)]);
    }
}

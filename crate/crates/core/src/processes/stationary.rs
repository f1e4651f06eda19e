use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::Rational;

/// Solves `pi P = pi`, `sum(pi) = 1` exactly by Gaussian elimination.
///
/// Fails unless the solution is unique, i.e. `P - I` has rank `k - 1`.
pub fn stationary_distribution(matrix: &[Vec<Rational>]) -> Result<Vec<Rational>> {
    let k = matrix.len();
    if k == 0 {
        return Err(Error::NoStationaryDistribution("empty matrix".into()));
    }
    for (i, row) in matrix.iter().enumerate() {
        if row.len() != k {
            return Err(Error::NoStationaryDistribution(format!(
                "row {i} has {} entries, expected {k}",
                row.len()
            )));
        }
        let total = row.iter().fold(Rational::zero(), |a, b| a + b);
        if !total.is_one() || row.iter().any(Signed::is_negative) {
            return Err(Error::NoStationaryDistribution(format!(
                "row {i} is not a probability vector"
            )));
        }
    }

    // Unknowns pi_0..pi_{k-1}; equations (P^T - I) pi = 0 plus sum(pi) = 1.
    // Augmented column k holds the right-hand side.
    let mut rows: Vec<Vec<Rational>> = (0..k)
        .map(|j| {
            let mut eq: Vec<Rational> = (0..k)
                .map(|i| {
                    let mut a = matrix[i][j].clone();
                    if i == j {
                        a -= Rational::one();
                    }
                    a
                })
                .collect();
            eq.push(Rational::zero());
            eq
        })
        .collect();
    let mut norm = vec![Rational::one(); k];
    norm.push(Rational::one());
    rows.push(norm);

    for (pivot_row, col) in (0..k).enumerate() {
        let Some(found) = (pivot_row..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            return Err(Error::NoStationaryDistribution(
                "stationary distribution is not unique".into(),
            ));
        };
        rows.swap(pivot_row, found);
        let pivot = rows[pivot_row][col].clone();
        for v in rows[pivot_row].iter_mut() {
            *v /= pivot.clone();
        }
        let pivot_values = rows[pivot_row].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != pivot_row && !row[col].is_zero() {
                let factor = row[col].clone();
                for (v, p) in row[col..].iter_mut().zip(&pivot_values[col..]) {
                    *v -= factor.clone() * p;
                }
            }
        }
    }
    // The leftover equation must read 0 = 0.
    if rows[k..].iter().any(|r| !r[k].is_zero()) {
        return Err(Error::NoStationaryDistribution("inconsistent system".into()));
    }
    Ok(rows[..k].iter().map(|r| r[k].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p.into(), q.into())
    }

    #[test]
    fn identity_is_not_unique() {
        let m = vec![vec![r(1, 1), r(0, 1)], vec![r(0, 1), r(1, 1)]];
        assert!(matches!(
            stationary_distribution(&m),
            Err(Error::NoStationaryDistribution(_))
        ));
    }

    #[test]
    fn symmetric_and_periodic() {
        let half = vec![vec![r(1, 2), r(1, 2)], vec![r(1, 2), r(1, 2)]];
        assert_eq!(stationary_distribution(&half).unwrap(), vec![r(1, 2), r(1, 2)]);
        let flip = vec![vec![r(0, 1), r(1, 1)], vec![r(1, 1), r(0, 1)]];
        assert_eq!(stationary_distribution(&flip).unwrap(), vec![r(1, 2), r(1, 2)]);
    }

    #[test]
    fn three_state_solution_is_invariant() {
        let m = vec![
            vec![r(1, 2), r(1, 4), r(1, 4)],
            vec![r(1, 3), r(0, 1), r(2, 3)],
            vec![r(0, 1), r(1, 5), r(4, 5)],
        ];
        let pi = stationary_distribution(&m).unwrap();
        assert_eq!(pi.iter().fold(r(0, 1), |a, b| a + b), r(1, 1));
        for j in 0..3 {
            let col = (0..3).fold(r(0, 1), |a, i| a + pi[i].clone() * m[i][j].clone());
            assert_eq!(col, pi[j]);
        }
    }

    #[test]
    fn rejects_non_stochastic() {
        let m = vec![vec![r(1, 2), r(1, 3)], vec![r(1, 2), r(1, 2)]];
        assert!(stationary_distribution(&m).is_err());
    }
}

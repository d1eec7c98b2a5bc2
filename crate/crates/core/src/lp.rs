//! Exact solution of finite two-player zero-sum games.
//!
//! The column player's program `max sum(y) s.t. A'y <= 1, y >= 0` is solved
//! on an integer tableau with fraction-free pivoting and Bland's rule, where
//! `A'` is the payoff matrix shifted to be positive. The row player's
//! optimal strategy is read off the dual values of the slack columns.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct ZeroSumSolution {
    /// Maximin strategy of the row player.
    pub strategy: Vec<BigRational>,
    pub value: BigRational,
}

/// Solves the game where the row player maximizes `p^T A q`.
///
/// # Panics
/// If `a` is empty or ragged.
pub(crate) fn solve_zero_sum(a: &[Vec<BigInt>]) -> ZeroSumSolution {
    let m = a.len();
    let n = a[0].len();
    assert!(n > 0 && a.iter().all(|row| row.len() == n), "ragged payoff matrix");
    let min = a.iter().flatten().min().expect("non-empty matrix").clone();
    let offset = BigInt::one() - min;

    // Columns: y_0..y_{n-1}, slacks s_0..s_{m-1}, rhs.
    let width = n + m + 1;
    let rhs = n + m;
    let mut t: Vec<Vec<BigInt>> = Vec::with_capacity(m + 1);
    for (i, row) in a.iter().enumerate() {
        let mut r = vec![BigInt::zero(); width];
        for (j, x) in row.iter().enumerate() {
            r[j] = x + &offset;
        }
        r[n + i] = BigInt::one();
        r[rhs] = BigInt::one();
        t.push(r);
    }
    let mut z = vec![BigInt::zero(); width];
    for x in z.iter_mut().take(n) {
        *x = -BigInt::one();
    }
    t.push(z);
    let zi = m;
    let mut basis: Vec<usize> = (n..n + m).collect();
    let mut denom = BigInt::one();

    while let Some(col) = (0..n + m).find(|&j| t[zi][j].is_negative()) {
        let mut pivot_row: Option<usize> = None;
        for i in 0..m {
            if !t[i][col].is_positive() {
                continue;
            }
            pivot_row = match pivot_row {
                None => Some(i),
                Some(r) => {
                    let lhs = &t[i][rhs] * &t[r][col];
                    let rhs_cmp = &t[r][rhs] * &t[i][col];
                    if lhs < rhs_cmp || (lhs == rhs_cmp && basis[i] < basis[r]) {
                        Some(i)
                    } else {
                        Some(r)
                    }
                }
            };
        }
        let r = pivot_row.expect("positive payoffs keep the program bounded");
        let p = t[r][col].clone();
        for i in 0..=m {
            if i == r {
                continue;
            }
            let factor = t[i][col].clone();
            if factor.is_zero() {
                for j in 0..width {
                    t[i][j] = &t[i][j] * &p / &denom;
                }
                continue;
            }
            for j in 0..width {
                t[i][j] = (&p * &t[i][j] - &factor * &t[r][j]) / &denom;
            }
        }
        denom = p;
        basis[r] = col;
    }

    let total = t[zi][rhs].clone();
    let strategy = (0..m)
        .map(|i| BigRational::new(t[zi][n + i].clone(), total.clone()))
        .collect();
    let value = BigRational::new(denom, total) - BigRational::from_integer(offset);
    ZeroSumSolution { strategy, value }
}

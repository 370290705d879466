//! Dense exact-rational simplex.
//!
//! Solves `max c·y` subject to `A y <= b`, `y >= 0` with `b >= 0`, so the
//! all-slack basis is feasible and no phase-one is needed. Pivots follow
//! Bland's rule (smallest eligible index), which cannot cycle, so termination
//! is unconditional. Everything is a `BigRational`; the optimum is exact.

use crate::rational::Rational;
use num_traits::{Signed, Zero};

/// Exact optimum of the LP together with the dual prices.
#[derive(Clone, Debug)]
pub struct SimplexSolution {
    pub objective: Rational,
    /// Optimal structural variables `y`.
    pub primal: Vec<Rational>,
    /// Optimal dual variables, one per constraint (nonnegative).
    pub dual: Vec<Rational>,
}

/// Solves `max c·y : A y <= b, y >= 0`. Requires `b >= 0` and a bounded
/// objective; an unbounded ray panics since callers construct bounded games.
pub fn solve_max_leq(a: &[Vec<Rational>], b: &[Rational], c: &[Rational]) -> SimplexSolution {
    let m = a.len();
    let n = c.len();
    assert_eq!(b.len(), m);
    assert!(b.iter().all(|v| !v.is_negative()), "need b >= 0 for the slack basis");
    for row in a {
        assert_eq!(row.len(), n);
    }

    // tableau rows: m constraint rows plus the objective row; columns:
    // n structural, m slack, then the right-hand side
    let cols = n + m + 1;
    let mut t: Vec<Vec<Rational>> = Vec::with_capacity(m + 1);
    for i in 0..m {
        let mut row = vec![Rational::zero(); cols];
        row[..n].clone_from_slice(&a[i]);
        row[n + i] = Rational::from_integer(1.into());
        row[cols - 1] = b[i].clone();
        t.push(row);
    }
    let mut obj = vec![Rational::zero(); cols];
    obj[..n].clone_from_slice(c);
    t.push(obj);

    let mut basis: Vec<usize> = (n..n + m).collect();

    loop {
        // Bland: entering = smallest column with positive reduced cost
        let Some(enter) = (0..n + m).find(|&j| t[m][j].is_positive()) else {
            break;
        };
        // leaving row: minimum ratio, ties by smallest basic variable index
        let mut leave: Option<usize> = None;
        let mut best: Option<Rational> = None;
        for i in 0..m {
            if t[i][enter].is_positive() {
                let ratio = &t[i][cols - 1] / &t[i][enter];
                let replace = match &best {
                    None => true,
                    Some(r) => ratio < *r || (ratio == *r && basis[i] < basis[leave.unwrap()]),
                };
                if replace {
                    best = Some(ratio);
                    leave = Some(i);
                }
            }
        }
        let Some(r) = leave else {
            panic!("unbounded objective in simplex (entering column {enter})");
        };

        // pivot on (r, enter)
        let pivot = t[r][enter].clone();
        for v in t[r].iter_mut() {
            *v /= &pivot;
        }
        for i in 0..=m {
            if i != r && !t[i][enter].is_zero() {
                let factor = t[i][enter].clone();
                let (pivot_row, row) = if i < r {
                    let (lo, hi) = t.split_at_mut(r);
                    (&hi[0], &mut lo[i])
                } else {
                    let (lo, hi) = t.split_at_mut(i);
                    (&lo[r], &mut hi[0])
                };
                for (dst, src) in row.iter_mut().zip(pivot_row.iter()) {
                    *dst -= &factor * src;
                }
            }
        }
        basis[r] = enter;
    }

    let mut primal = vec![Rational::zero(); n];
    for (i, &var) in basis.iter().enumerate() {
        if var < n {
            primal[var] = t[i][cols - 1].clone();
        }
    }
    let dual: Vec<Rational> = (0..m).map(|i| -t[m][n + i].clone()).collect();
    let objective = -t[m][cols - 1].clone();
    debug_assert!(dual.iter().all(|d| !d.is_negative()));
    SimplexSolution {
        objective,
        primal,
        dual,
    }
}

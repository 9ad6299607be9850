//! Dense tableau simplex for `max c.x` subject to `A x <= b`, `x >= 0`,
//! with `b >= 0` so the slack basis is feasible from the start.
//!
//! Dantzig's rule picks the entering column; after a run of degenerate
//! pivots the solver switches to Bland's rule, which cannot cycle.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Solution {
    pub x: Vec<f64>,
    /// Shadow prices of the rows of `A`.
    pub duals: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

const EPS: f64 = 1e-11;
const MAX_PIVOTS: usize = 100_000;
const DEGENERATE_RUN: usize = 50;

/// Solves `max c.x` with `a` given row-major (`rows x cols`).
pub fn maximize(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> Result<Solution> {
    let rows = a.len();
    let cols = c.len();
    if b.len() != rows || a.iter().any(|r| r.len() != cols) {
        return Err(Error::domain("simplex", "inconsistent dimensions"));
    }
    if b.iter().any(|&v| !(v >= 0.0)) {
        return Err(Error::domain("simplex", "right-hand side must be nonnegative"));
    }
    let width = cols + rows + 1;
    let rhs = width - 1;
    let mut t = vec![vec![0.0; width]; rows + 1];
    for i in 0..rows {
        t[i][..cols].copy_from_slice(&a[i]);
        t[i][cols + i] = 1.0;
        t[i][rhs] = b[i];
    }
    for j in 0..cols {
        t[rows][j] = -c[j];
    }
    let mut basis: Vec<usize> = (cols..cols + rows).collect();

    let mut pivots = 0;
    let mut stalled = 0;
    loop {
        let bland = stalled >= DEGENERATE_RUN;
        let obj = &t[rows];
        let entering = if bland {
            (0..width - 1).find(|&j| obj[j] < -EPS)
        } else {
            (0..width - 1)
                .filter(|&j| obj[j] < -EPS)
                .min_by(|&p, &q| obj[p].total_cmp(&obj[q]))
        };
        let Some(col) = entering else { break };

        let mut leave: Option<(usize, f64)> = None;
        for i in 0..rows {
            let p = t[i][col];
            if p > EPS {
                let ratio = t[i][rhs] / p;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < lr - 1e-14 || (ratio <= lr + 1e-14 && basis[i] < basis[li]) {
                            Some((i, ratio))
                        } else {
                            Some((li, lr))
                        }
                    }
                };
            }
        }
        let Some((row, ratio)) = leave else {
            return Err(Error::Unbounded);
        };
        if ratio <= 1e-14 {
            stalled += 1;
        } else {
            stalled = 0;
        }
        pivot(&mut t, row, col);
        basis[row] = col;
        pivots += 1;
        if pivots > MAX_PIVOTS {
            return Err(Error::no_converge("simplex", format!("{MAX_PIVOTS} pivots without optimality")));
        }
    }

    let mut x = vec![0.0; cols];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < cols {
            x[bv] = t[i][rhs];
        }
    }
    let duals = (0..rows).map(|i| t[rows][cols + i]).collect();
    Ok(Solution {
        x,
        duals,
        objective: t[rows][rhs],
        pivots,
    })
}

fn pivot(t: &mut [Vec<f64>], row: usize, col: usize) {
    let p = t[row][col];
    for v in t[row].iter_mut() {
        *v /= p;
    }
    let pivot_row = t[row].clone();
    for (i, r) in t.iter_mut().enumerate() {
        if i == row {
            continue;
        }
        let f = r[col];
        if f != 0.0 {
            for (v, pv) in r.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            r[col] = 0.0;
        }
    }
}

//! Dense linear assignment by shortest augmenting paths (Jonker-Volgenant
//! style, with row/column potentials).
//!
//! Rewards are maximized. A reward of `-inf` marks a forbidden pairing and
//! is never relaxed, so finite rewards keep full precision next to it.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    /// Column assigned to each row.
    pub row_to_col: Vec<usize>,
    pub total: f64,
}

/// Maximum-reward perfect matching of a square matrix.
pub fn solve_assignment(rewards: &DMatrix<f64>) -> Result<Assignment> {
    let n = rewards.nrows();
    if rewards.ncols() != n {
        return Err(Error::Sizing(format!(
            "assignment matrix must be square, got {}x{}",
            n,
            rewards.ncols()
        )));
    }
    if n == 0 {
        return Ok(Assignment { row_to_col: Vec::new(), total: 0.0 });
    }
    let cost = |i: usize, j: usize| -> f64 {
        let r = rewards[(i, j)];
        if r.is_finite() {
            -r
        } else {
            f64::INFINITY
        }
    };

    // 1-based arrays; index 0 is the virtual root column.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let c = cost(i0 - 1, j - 1);
                if c.is_finite() {
                    let reduced = c - u[i0] - v[j];
                    if reduced < minv[j] {
                        minv[j] = reduced;
                        way[j] = j0;
                    }
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            if !delta.is_finite() {
                return Err(Error::Infeasible);
            }
            for j in 0..=n {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut row_to_col = vec![0usize; n];
    for j in 1..=n {
        row_to_col[owner[j] - 1] = j - 1;
    }
    let total = row_to_col.iter().enumerate().map(|(i, &j)| rewards[(i, j)]).sum();
    Ok(Assignment { row_to_col, total })
}

//! Minimum-cost perfect matching (Hungarian algorithm, O(n^3)).

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assignment {
    /// `(row, col)` pairs over the padded square matrix, sorted by row.
    pub pairs: Vec<(usize, usize)>,
    pub total: f64,
}

impl Assignment {
    /// Column assigned to `row`, if the row exists.
    pub fn col_of(&self, row: usize) -> Option<usize> {
        self.pairs.get(row).map(|&(_, c)| c)
    }
}

/// Solves the assignment problem on an `n x m` matrix of non-negative
/// costs. Rectangular inputs are padded to a square with zero entries, and
/// the assignment covers every row and column of the padded matrix.
pub fn hungarian(cost: &[Vec<f64>]) -> Result<Assignment> {
    let rows = cost.len();
    let cols = cost.first().map_or(0, Vec::len);
    for (i, row) in cost.iter().enumerate() {
        if row.len() != cols {
            return Err(Error::InvalidCost(format!(
                "row {i} has {} entries, expected {cols}",
                row.len()
            )));
        }
        if let Some(j) = row.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidCost(format!(
                "entry ({i}, {j}) = {} is not a finite non-negative number",
                row[j]
            )));
        }
    }

    let n = rows.max(cols);
    if n == 0 {
        return Ok(Assignment {
            pairs: Vec::new(),
            total: 0.0,
        });
    }
    let at = |i: usize, j: usize| -> f64 {
        if i < rows && j < cols {
            cost[i][j]
        } else {
            0.0
        }
    };

    // 1-based potentials; column 0 is the virtual source
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
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
                let reduced = at(i0 - 1, j - 1) - u[i0] - v[j];
                if reduced < minv[j] {
                    minv[j] = reduced;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
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

    let mut col_for_row = vec![0usize; n];
    for j in 1..=n {
        col_for_row[owner[j] - 1] = j - 1;
    }
    let pairs: Vec<(usize, usize)> = col_for_row.into_iter().enumerate().collect();
    let total = pairs.iter().map(|&(i, j)| at(i, j)).sum();
    Ok(Assignment { pairs, total })
}

use serde::Serialize;

use crate::error::{Error, Result};
use crate::par::{self, Execution};

/// Symmetric sample-to-sample distance matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl DistanceMatrix {
    /// Builds the matrix from a symmetric distance function evaluated on the
    /// upper triangle.
    pub fn from_fn<F>(n: usize, exec: Execution, f: F) -> Self
    where
        F: Fn(usize, usize) -> f64 + Sync + Send,
    {
        let rows = par::map_range(n, exec, |i| {
            (i + 1..n).map(|j| f(i, j)).collect::<Vec<f64>>()
        });
        let mut entries = vec![0.0; n * n];
        for (i, row) in rows.into_iter().enumerate() {
            for (off, d) in row.into_iter().enumerate() {
                let j = i + 1 + off;
                entries[i * n + j] = d;
                entries[j * n + i] = d;
            }
        }
        DistanceMatrix { n, entries }
    }

    /// Assembles a matrix from full rows, e.g. one shortest-path sweep per
    /// sample. Each symmetric pair keeps the smaller of its two estimates so
    /// rounding differences between sweeps cannot break symmetry.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::invalid("distance rows must form a square matrix"));
        }
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let d = rows[i][j].min(rows[j][i]);
                if d.is_nan() || d < 0.0 {
                    return Err(Error::invalid(format!("invalid distance {d} between {i} and {j}")));
                }
                entries[i * n + j] = d;
                entries[j * n + i] = d;
            }
        }
        Ok(DistanceMatrix { n, entries })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    /// Restriction to `indices`, re-indexed in the given order.
    pub fn submatrix(&self, indices: &[usize]) -> DistanceMatrix {
        let m = indices.len();
        let mut entries = Vec::with_capacity(m * m);
        for &i in indices {
            for &j in indices {
                entries.push(self.get(i, j));
            }
        }
        DistanceMatrix { n: m, entries }
    }

    /// First pair (row-major, upper triangle) with an infinite distance.
    pub fn first_infinite_pair(&self) -> Option<(usize, usize)> {
        (0..self.n)
            .flat_map(|i| (i + 1..self.n).map(move |j| (i, j)))
            .find(|&(i, j)| !self.get(i, j).is_finite())
    }

    /// Length of the closed cycle visiting `order`.
    pub fn cycle_length(&self, order: &[usize]) -> f64 {
        if order.len() < 2 {
            return 0.0;
        }
        let mut total = 0.0;
        for k in 0..order.len() {
            total += self.get(order[k], order[(k + 1) % order.len()]);
        }
        total
    }
}

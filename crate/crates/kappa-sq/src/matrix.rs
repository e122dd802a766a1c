use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Dense real matrix; the carrier for Q, the sampled matrix B = SQ, and
/// generated test matrices. All entries are finite f64.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    data: DMatrix<f64>,
}

impl RealMatrix {
    /// Builds a matrix from row-major entries. Rejects empty dimensions,
    /// mismatched entry counts and non-finite entries.
    pub fn from_rows(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidMatrix(format!(
                "dimensions must be at least 1x1, got {rows}x{cols}"
            )));
        }
        if entries.len() != rows * cols {
            return Err(Error::InvalidMatrix(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                entries.len()
            )));
        }
        let data = DMatrix::from_row_slice(rows, cols, entries);
        Self::from_dmatrix(data)
    }

    /// Wraps an existing nalgebra matrix, validating finiteness. Zero rows are
    /// allowed here: a Bernoulli sample may keep nothing.
    pub fn from_dmatrix(data: DMatrix<f64>) -> Result<Self> {
        if data.ncols() == 0 {
            return Err(Error::InvalidMatrix("matrix has zero columns".into()));
        }
        if let Some(bad) = data.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidMatrix(format!("non-finite entry {bad}")));
        }
        Ok(Self { data })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            data: DMatrix::identity(n, n),
        }
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[(i, j)]
    }

    pub fn row_norm_sq(&self, i: usize) -> f64 {
        self.data.row(i).iter().map(|v| v * v).sum()
    }

    pub fn as_dmatrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub(crate) fn as_dmatrix_mut(&mut self) -> &mut DMatrix<f64> {
        &mut self.data
    }

    pub fn into_dmatrix(self) -> DMatrix<f64> {
        self.data
    }

    /// Singular values in descending order.
    pub fn singular_values(&self) -> Vec<f64> {
        if self.rows() == 0 {
            return Vec::new();
        }
        let svd = self.data.clone().svd(false, false);
        let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
        sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
        sv
    }
}

//! Sparse symmetric matrices and the dense factorizations built from them.
//!
//! Operators are assembled once into compressed sparse rows and stay there;
//! the dense complex LU (for resolvent columns) and the dense symmetric
//! eigendecomposition (for spectral calculus) are derived views, each behind
//! a hard size guard so a misconfigured volume fails fast instead of
//! allocating gigabytes. The sparse form is also what residual checks use,
//! so every dense solve is verified against an independent representation.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

/// Largest dimension accepted by the dense complex LU path.
pub const MAX_DENSE_DIM: usize = 4096;

/// Largest dimension accepted by the dense symmetric eigensolver.
pub const MAX_EIGEN_DIM: usize = 3000;

/// Errors from matrix assembly and factorization.
#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix dimension {dim} exceeds the dense guard {max}")]
    DimensionTooLarge { dim: usize, max: usize },
    #[error("matrix is singular at the requested shift")]
    Singular,
    #[error("row {row} has an entry in column {col}, outside dimension {dim}")]
    ColumnOutOfRange { row: usize, col: usize, dim: usize },
    #[error("row {row} has columns out of order or duplicated")]
    UnsortedRow { row: usize },
    #[error("entry ({row}, {col}) has no equal transposed partner")]
    Asymmetric { row: usize, col: usize },
    #[error("vector length {got} does not match matrix dimension {dim}")]
    ShapeMismatch { got: usize, dim: usize },
}

/// A real symmetric matrix in compressed sparse row form.
///
/// Both triangles are stored, so row `i` lists every structural entry of the
/// matrix row and `matvec` never needs a transpose pass.
#[derive(Debug, Clone)]
pub struct SymmetricCsr {
    dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SymmetricCsr {
    /// Builds a matrix from per-row `(column, value)` lists.
    ///
    /// Each row must be strictly ascending in column index, and every entry
    /// must have an exactly equal transposed partner.
    pub fn from_rows(rows: Vec<Vec<(usize, f64)>>) -> Result<Self, LinalgError> {
        let dim = rows.len();
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for (row, entries) in rows.iter().enumerate() {
            let mut last: Option<usize> = None;
            for &(col, value) in entries {
                if col >= dim {
                    return Err(LinalgError::ColumnOutOfRange { row, col, dim });
                }
                if last.is_some_and(|prev| prev >= col) {
                    return Err(LinalgError::UnsortedRow { row });
                }
                last = Some(col);
                col_idx.push(col);
                values.push(value);
            }
            row_ptr.push(col_idx.len());
        }
        let matrix = Self { dim, row_ptr, col_idx, values };
        for row in 0..dim {
            for (col, value) in matrix.row(row) {
                if matrix.get(col, row) != Some(value) {
                    return Err(LinalgError::Asymmetric { row, col });
                }
            }
        }
        Ok(matrix)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    /// Iterates over the structural entries of one row.
    pub fn row(&self, row: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[row]..self.row_ptr[row + 1];
        span.map(move |k| (self.col_idx[k], self.values[k]))
    }

    /// Looks up a single entry, `None` when structurally absent.
    pub fn get(&self, row: usize, col: usize) -> Option<f64> {
        let span = self.row_ptr[row]..self.row_ptr[row + 1];
        let cols = &self.col_idx[span.clone()];
        cols.binary_search(&col).ok().map(|k| self.values[span.start + k])
    }

    /// Dense real matrix with the same entries.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut dense = DMatrix::zeros(self.dim, self.dim);
        for row in 0..self.dim {
            for (col, value) in self.row(row) {
                dense[(row, col)] = value;
            }
        }
        dense
    }

    /// Dense complex matrix `A - z I`.
    pub fn to_dense_shifted(&self, z: Complex64) -> DMatrix<Complex64> {
        let mut dense = DMatrix::zeros(self.dim, self.dim);
        for row in 0..self.dim {
            for (col, value) in self.row(row) {
                dense[(row, col)] = Complex64::new(value, 0.0);
            }
            dense[(row, row)] -= z;
        }
        dense
    }

    /// `y = A x` for a real vector.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>, LinalgError> {
        if x.len() != self.dim {
            return Err(LinalgError::ShapeMismatch { got: x.len(), dim: self.dim });
        }
        Ok((0..self.dim)
            .map(|row| self.row(row).map(|(col, value)| value * x[col]).sum())
            .collect())
    }

    /// `y = (A - z I) x` for a complex vector.
    pub fn shifted_apply(&self, z: Complex64, x: &[Complex64]) -> Result<Vec<Complex64>, LinalgError> {
        if x.len() != self.dim {
            return Err(LinalgError::ShapeMismatch { got: x.len(), dim: self.dim });
        }
        Ok((0..self.dim)
            .map(|row| {
                let ax: Complex64 = self.row(row).map(|(col, value)| value * x[col]).sum();
                ax - z * x[row]
            })
            .collect())
    }

    /// Max-norm of `(A - z I) x - b`, the residual of a shifted solve.
    pub fn shifted_residual(
        &self,
        z: Complex64,
        x: &[Complex64],
        b: &[Complex64],
    ) -> Result<f64, LinalgError> {
        if b.len() != self.dim {
            return Err(LinalgError::ShapeMismatch { got: b.len(), dim: self.dim });
        }
        let ax = self.shifted_apply(z, x)?;
        Ok(ax.iter().zip(b).map(|(lhs, rhs)| (lhs - rhs).norm()).fold(0.0, f64::max))
    }
}

/// LU factorization of `A - z I`, reusable across many right-hand sides.
pub struct ShiftedLu {
    lu: nalgebra::linalg::LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>,
    dim: usize,
}

impl ShiftedLu {
    /// Factors `A - z I` densely. Fails above [`MAX_DENSE_DIM`] or when the
    /// shifted matrix is singular.
    pub fn new(a: &SymmetricCsr, z: Complex64) -> Result<Self, LinalgError> {
        if a.dim() > MAX_DENSE_DIM {
            return Err(LinalgError::DimensionTooLarge { dim: a.dim(), max: MAX_DENSE_DIM });
        }
        let lu = nalgebra::linalg::LU::new(a.to_dense_shifted(z));
        if !lu.is_invertible() {
            return Err(LinalgError::Singular);
        }
        Ok(Self { lu, dim: a.dim() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Solves `(A - z I) x = b`.
    pub fn solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>, LinalgError> {
        if b.len() != self.dim {
            return Err(LinalgError::ShapeMismatch { got: b.len(), dim: self.dim });
        }
        let rhs = DVector::from_column_slice(b);
        let x = self.lu.solve(&rhs).ok_or(LinalgError::Singular)?;
        Ok(x.data.into())
    }

    /// Solves `(A - z I) x = e_k` for a standard basis vector.
    pub fn solve_unit(&self, k: usize) -> Result<Vec<Complex64>, LinalgError> {
        let mut b = vec![Complex64::ZERO; self.dim];
        b[k] = Complex64::ONE;
        self.solve(&b)
    }
}

/// Eigenvalues (ascending) and matching orthonormal eigenvector columns of a
/// real symmetric matrix.
pub fn symmetric_eigendecomposition(
    a: &SymmetricCsr,
) -> Result<(Vec<f64>, DMatrix<f64>), LinalgError> {
    if a.dim() > MAX_EIGEN_DIM {
        return Err(LinalgError::DimensionTooLarge { dim: a.dim(), max: MAX_EIGEN_DIM });
    }
    let decomp = nalgebra::SymmetricEigen::new(a.to_dense());
    let mut order: Vec<usize> = (0..a.dim()).collect();
    order.sort_by(|&i, &j| decomp.eigenvalues[i].total_cmp(&decomp.eigenvalues[j]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| decomp.eigenvalues[i]).collect();
    let eigenvectors = DMatrix::from_fn(a.dim(), a.dim(), |row, col| {
        decomp.eigenvectors[(row, order[col])]
    });
    Ok((eigenvalues, eigenvectors))
}

//! Dense eigen/singular-value decompositions.
//!
//! Matrices are stored as nalgebra types throughout the crate; the
//! decompositions themselves run on faer, whose self-adjoint eigensolver
//! returns accurate eigenvectors for the block-sparse covariance matrices
//! produced by beam-splitter networks.

use faer::{Mat, Side};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

fn to_faer<T: Copy>(m: &DMatrix<T>) -> Mat<T> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn failed(what: &str) -> Error {
    Error::NumericConsistency(format!("{what} did not converge"))
}

/// Eigenvalues (ascending) and orthonormal eigenvectors (columns) of a real symmetric matrix.
pub fn symmetric_eigen(m: &DMatrix<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let eig = to_faer(m)
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| failed("symmetric eigendecomposition"))?;
    let s = eig.S().column_vector();
    let u = eig.U();
    Ok((
        DVector::from_fn(m.nrows(), |i, _| s[i]),
        DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| u[(i, j)]),
    ))
}

/// Eigenvalues (ascending) of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    let s = to_faer(m)
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| failed("hermitian eigendecomposition"))?;
    Ok(s)
}

/// Full SVD H = U Σ V† with U (rows × rows) and V (cols × cols) unitary.
/// Singular values come out in descending order.
pub struct Svd {
    pub u: DMatrix<Complex64>,
    pub singular_values: Vec<f64>,
    pub v: DMatrix<Complex64>,
}

pub fn svd(m: &DMatrix<Complex64>) -> Result<Svd> {
    let (r, c) = m.shape();
    let svd = to_faer(m)
        .svd()
        .map_err(|_| failed("singular value decomposition"))?;
    let s = svd.S().column_vector();
    let (u, v) = (svd.U(), svd.V());
    Ok(Svd {
        u: DMatrix::from_fn(r, r, |i, j| u[(i, j)]),
        singular_values: (0..r.min(c)).map(|i| s[i].re).collect(),
        v: DMatrix::from_fn(c, c, |i, j| v[(i, j)]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_sparse_reconstruction() {
        // nalgebra 0.33's SymmetricEigen returns wrong eigenvectors for this matrix.
        #[rustfmt::skip]
        let m = DMatrix::from_row_slice(6, 6, &[
            9.935561760079297, 0.0, 3.779666526495319, 0.0, -0.8125572913971122, 0.0,
            0.0, 10.36587256085485, 0.0, 3.65380953102734, 0.0, 2.0991006235253575,
            3.779666526495319, 0.0, 16.68431118606403, 0.0, 0.018563698128561124, 0.0,
            0.0, 3.65380953102734, 0.0, 16.72112175014859, 0.0, -0.8330359278679157,
            -0.8125572913971122, 0.0, 0.018563698128561124, 0.0, 3.4528838297085667, 0.0,
            0.0, 2.0991006235253575, 0.0, -0.8330359278679157, 0.0, 23.15434565277034,
        ]);
        let (d, q) = symmetric_eigen(&m).unwrap();
        let rec = &q * DMatrix::from_diagonal(&d) * q.transpose();
        assert!((rec - &m).amax() < 1e-12);
        assert!(d.as_slice().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn svd_reconstructs() {
        let h = DMatrix::from_fn(3, 5, |i, j| {
            Complex64::new(i as f64 - j as f64, (i * j) as f64 * 0.3)
        });
        let d = svd(&h).unwrap();
        let mut sigma = DMatrix::zeros(3, 5);
        for (k, &s) in d.singular_values.iter().enumerate() {
            sigma[(k, k)] = Complex64::new(s, 0.0);
        }
        assert!((&d.u * sigma * d.v.adjoint() - &h).camax() < 1e-12);
        assert!(d.singular_values.windows(2).all(|w| w[0] >= w[1]));
    }
}

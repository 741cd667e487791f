//! Dense complex matrices, the substrate for states, operators and Kraus
//! elements. Storage is row-major; all instances in this crate are small
//! (total dimension well below 256), so there is no sparse path.

use std::ops::{Index, IndexMut};

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Hermiticity / trace tolerance for state validation.
pub const TOL_HERM: f64 = 1e-9;
/// Trace-equals-one tolerance.
pub const TOL_TRACE: f64 = 1e-9;
/// Positivity tolerance (minimum eigenvalue floor).
pub const TOL_PSD: f64 = 1e-9;
/// Eigensolver / reconstruction tolerance.
pub const TOL_EIG: f64 = 1e-8;
/// Eigenvalues below this are treated as exactly zero in entropies.
pub const CLIP_EIG: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        QMatrix { rows, cols, data }
    }

    /// Build from row-major real entries.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Self {
        assert_eq!(entries.len(), rows * cols);
        QMatrix {
            rows,
            cols,
            data: entries.iter().map(|&x| C64::new(x, 0.0)).collect(),
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), rows * cols);
        QMatrix { rows, cols, data }
    }

    pub fn diag(entries: &[C64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    /// Rank-one projector |v><v| of a unit (or any) vector.
    pub fn projector(v: &[C64]) -> Self {
        let n = v.len();
        Self::from_fn(n, n, |r, c| v[r] * v[c].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in mul");
        let mut out = QMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for c in 0..other.cols {
                    out[(r, c)] += a * other[(k, c)];
                }
            }
        }
        out
    }

    /// self * v for a column vector v.
    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self[(r, c)] * v[c]).sum())
            .collect()
    }

    pub fn add(&self, other: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        QMatrix::from_vec(self.rows, self.cols, data)
    }

    pub fn sub(&self, other: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        QMatrix::from_vec(self.rows, self.cols, data)
    }

    pub fn scale(&self, s: C64) -> QMatrix {
        QMatrix::from_vec(self.rows, self.cols, self.data.iter().map(|a| a * s).collect())
    }

    pub fn scale_re(&self, s: f64) -> QMatrix {
        self.scale(C64::new(s, 0.0))
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> QMatrix {
        QMatrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn trace(&self) -> C64 {
        assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    /// Kronecker product; dimensions multiply.
    pub fn kron(&self, other: &QMatrix) -> QMatrix {
        let (ra, ca, rb, cb) = (self.rows, self.cols, other.rows, other.cols);
        let mut out = QMatrix::zeros(ra * rb, ca * cb);
        for i in 0..ra {
            for j in 0..ca {
                let a = self[(i, j)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for k in 0..rb {
                    for l in 0..cb {
                        out[(i * rb + k, j * cb + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// Largest entrywise absolute value.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from another matrix.
    pub fn max_diff(&self, other: &QMatrix) -> f64 {
        self.sub(other).max_abs()
    }

    pub fn herm_defect(&self) -> f64 {
        self.sub(&self.dagger()).max_abs()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.herm_defect() <= tol
    }

    /// (M + M^dag)/2.
    pub fn hermitize(&self) -> QMatrix {
        self.add(&self.dagger()).scale_re(0.5)
    }

    /// Largest singular value, via the spectrum of M^dag M.
    pub fn operator_norm(&self) -> f64 {
        let gram = self.dagger().mul(self);
        let (vals, _) = eig_hermitian_unchecked(&gram);
        vals.last().copied().unwrap_or(0.0).max(0.0).sqrt()
    }

    /// Smallest singular value.
    pub fn min_singular_value(&self) -> f64 {
        let gram = self.dagger().mul(self);
        let (vals, _) = eig_hermitian_unchecked(&gram);
        vals.first().copied().unwrap_or(0.0).max(0.0).sqrt()
    }

    fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.rows, self.cols, |r, c| self[(r, c)])
    }
}

impl Index<(usize, usize)> for QMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

/// Eigendecomposition of a Hermitian matrix. Eigenvalues are returned in
/// ascending order together with the matrix of orthonormal eigenvector
/// columns (same ordering).
pub fn eig_hermitian(m: &QMatrix) -> Result<(Vec<f64>, QMatrix)> {
    if !m.is_square() {
        return Err(Error::NotSquare(m.rows, m.cols));
    }
    let defect = m.herm_defect();
    if defect > TOL_HERM {
        return Err(Error::NotHermitian(defect));
    }
    Ok(eig_hermitian_unchecked(m))
}

/// Same as [`eig_hermitian`] but skips the Hermiticity check; the input is
/// symmetrized first, so the result is the decomposition of (M+M^dag)/2.
pub fn eig_hermitian_unchecked(m: &QMatrix) -> (Vec<f64>, QMatrix) {
    let n = m.rows();
    let herm = m.hermitize().to_nalgebra();
    let eig = nalgebra::SymmetricEigen::new(herm);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = QMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn kron_identities() {
        let i2 = QMatrix::identity(2);
        assert_eq!(i2.kron(&i2), QMatrix::identity(4));

        let p0 = QMatrix::diag(&[c(1.0, 0.0), c(0.0, 0.0)]);
        let p1 = QMatrix::diag(&[c(0.0, 0.0), c(1.0, 0.0)]);
        let k = p0.kron(&p1);
        let expect = QMatrix::diag(&[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(k.max_diff(&expect) < 1e-15);
    }

    #[test]
    fn kron_sigma_x_on_bell() {
        // (sigma_1 x 1)|psi0> expanded by hand: (|10> + |01>)/sqrt(2)
        let sx = QMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let op = sx.kron(&QMatrix::identity(2));
        let s = 1.0 / 2f64.sqrt();
        let psi0 = vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)];
        let out = op.mul_vec(&psi0);
        let expect = [c(0.0, 0.0), c(s, 0.0), c(s, 0.0), c(0.0, 0.0)];
        for (a, b) in out.iter().zip(expect.iter()) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn eig_simple_spectra() {
        let half = QMatrix::identity(2).scale_re(0.5);
        let (vals, _) = eig_hermitian(&half).unwrap();
        assert!((vals[0] - 0.5).abs() < 1e-14 && (vals[1] - 0.5).abs() < 1e-14);

        let d = QMatrix::from_real(2, 2, &[0.0, 0.0, 0.0, 1.0]);
        let (vals, _) = eig_hermitian(&d).unwrap();
        assert!(vals[0].abs() < 1e-14 && (vals[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = QMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(eig_hermitian(&m).is_err());
    }

    #[test]
    fn eig_reconstruction() {
        let m = QMatrix::from_fn(4, 4, |r, c| {
            C64::new((r * c) as f64 / 7.0 + if r == c { 1.0 } else { 0.0 }, (r as f64 - c as f64) / 5.0)
        })
        .hermitize();
        let (vals, vecs) = eig_hermitian(&m).unwrap();
        let lambda = QMatrix::diag(&vals.iter().map(|&v| c(v, 0.0)).collect::<Vec<_>>());
        let recon = vecs.mul(&lambda).mul(&vecs.dagger());
        assert!(recon.max_diff(&m) < TOL_EIG);
    }

    #[test]
    fn operator_norm_of_diag() {
        let m = QMatrix::diag(&[c(0.3, 0.0), c(-2.0, 0.0)]);
        assert!((m.operator_norm() - 2.0).abs() < 1e-12);
        assert!((m.min_singular_value() - 0.3).abs() < 1e-12);
    }
}

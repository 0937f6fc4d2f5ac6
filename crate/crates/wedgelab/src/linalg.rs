//! Small dense complex matrices for internal-index algebra (d² × d² S-matrices and friends).

use std::ops::{Index, IndexMut};

use nalgebra::DMatrix;
use rand_distr::StandardNormal;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{cone, czero, to_f64, Real, C};

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<C<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![czero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = cone();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        CMatrix { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C<T>>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Structural(format!(
                "matrix data has {} entries, expected {}x{}",
                data.len(),
                rows,
                cols
            )));
        }
        Ok(CMatrix { rows, cols, data })
    }

    /// Builds a matrix from real and imaginary row lists.
    pub fn from_parts(re: &[Vec<f64>], im: Option<&[Vec<f64>]>) -> Result<Self> {
        let rows = re.len();
        let cols = re.first().map_or(0, |r| r.len());
        if re.iter().any(|r| r.len() != cols) {
            return Err(Error::Structural("ragged real part".into()));
        }
        if let Some(im) = im {
            if im.len() != rows || im.iter().any(|r| r.len() != cols) {
                return Err(Error::Structural("imaginary part shape differs from real part".into()));
            }
        }
        Ok(Self::from_fn(rows, cols, |r, c| {
            let i = im.map_or(0.0, |im| im[r][c]);
            Complex::new(T::from_f64(re[r][c]).unwrap(), T::from_f64(i).unwrap())
        }))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C<T>] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C<T>] {
        &mut self.data
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d = *d + a * *b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[C<T>]) -> Vec<C<T>> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .fold(czero(), |acc, (a, b)| acc + *a * *b)
            })
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn conj(&self) -> Self {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn scale(&self, s: C<T>) -> Self {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| *z * s).collect() }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a + *b).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a - *b).collect(),
        }
    }

    /// Kronecker product, `self` acting on the slow (first) factor.
    pub fn kron(&self, rhs: &Self) -> Self {
        let (r2, c2) = (rhs.rows, rhs.cols);
        Self::from_fn(self.rows * r2, self.cols * c2, |r, c| self[(r / r2, c / c2)] * rhs[(r % r2, c % c2)])
    }

    pub fn frobenius(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), |a, b| if b > a || b.is_nan() { b } else { a })
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Largest singular value, computed in double precision.
    pub fn spectral_norm(&self) -> f64 {
        if self.rows == 0 || self.cols == 0 {
            return 0.0;
        }
        if !self.is_finite() {
            return f64::INFINITY;
        }
        let m = DMatrix::from_fn(self.rows, self.cols, |r, c| {
            let z = self[(r, c)];
            Complex::new(to_f64(z.re), to_f64(z.im))
        });
        m.singular_values().iter().cloned().fold(0.0, f64::max)
    }

    /// Entrywise conversion to another working type.
    pub fn cast<U: Real>(&self) -> CMatrix<U> {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|z| Complex::new(U::from_f64(to_f64(z.re)).unwrap(), U::from_f64(to_f64(z.im)).unwrap()))
                .collect(),
        }
    }
}

impl<T> Index<(usize, usize)> for CMatrix<T> {
    type Output = C<T>;
    fn index(&self, (r, c): (usize, usize)) -> &C<T> {
        &self.data[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for CMatrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C<T> {
        &mut self.data[r * self.cols + c]
    }
}

/// Flip F on C^d ⊗ C^d: e_a ⊗ e_b ↦ e_b ⊗ e_a.
pub fn flip<T: Real>(d: usize) -> CMatrix<T> {
    CMatrix::from_fn(d * d, d * d, |r, c| if r / d == c % d && r % d == c / d { cone() } else { czero() })
}

/// Swaps the row pair (α,β) → (β,α). Converts between the S- and R-conventions of a d² × d² matrix.
pub fn swap_row_pair<T: Real>(m: &CMatrix<T>, d: usize) -> CMatrix<T> {
    CMatrix::from_fn(m.rows(), m.cols(), |r, c| m[((r % d) * d + r / d, c)])
}

/// Embeds `m`, acting on factors `i` and `j` of the product space with factor dimensions `dims`,
/// as a matrix on the whole product (identity on the other factors).
pub fn embed_in_product<T: Real>(m: &CMatrix<T>, dims: &[usize], i: usize, j: usize) -> Result<CMatrix<T>> {
    if i == j || i >= dims.len() || j >= dims.len() {
        return Err(Error::Structural(format!("cannot embed on factors ({i}, {j}) of {} factors", dims.len())));
    }
    let pair = dims[i] * dims[j];
    if m.rows() != pair || m.cols() != pair {
        return Err(Error::Structural(format!("{}x{} matrix on factors of dimensions {} and {}", m.rows(), m.cols(), dims[i], dims[j])));
    }
    let total: usize = dims.iter().product();
    let split = |mut flat: usize| {
        let mut idx = vec![0usize; dims.len()];
        for k in (0..dims.len()).rev() {
            idx[k] = flat % dims[k];
            flat /= dims[k];
        }
        idx
    };
    let idx: Vec<Vec<usize>> = (0..total).map(split).collect();
    Ok(CMatrix::from_fn(total, total, |r, c| {
        let (a, b) = (&idx[r], &idx[c]);
        if (0..dims.len()).any(|k| k != i && k != j && a[k] != b[k]) {
            return czero();
        }
        m[(a[i] * dims[j] + a[j], b[i] * dims[j] + b[j])]
    }))
}

/// Haar-distributed unitary from the QR decomposition of a complex Gaussian matrix.
pub fn random_unitary<T: Real>(n: usize, rng: &mut impl rand::Rng) -> CMatrix<T> {
    let z = DMatrix::from_fn(n, n, |_, _| {
        Complex::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    });
    let qr = z.qr();
    let (q, r) = (qr.q(), qr.r());
    CMatrix::from_fn(n, n, |a, b| {
        let d = r[(b, b)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex::new(1.0, 0.0) };
        let v = q[(a, b)] * phase;
        Complex::new(T::from_f64(v.re).unwrap(), T::from_f64(v.im).unwrap())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    #[test]
    fn kron_and_flip() {
        let a = CMatrix::<f64>::from_fn(2, 2, |r, cc| c((r * 2 + cc) as f64, 0.0));
        let b = CMatrix::<f64>::identity(2);
        let k = a.kron(&b);
        assert_eq!(k[(2, 0)], c(2.0, 0.0));
        let f = flip::<f64>(2);
        // F (A⊗B) F = B⊗A
        let lhs = f.matmul(&k).matmul(&f);
        assert!(lhs.sub(&b.kron(&a)).frobenius() < 1e-15);
    }

    #[test]
    fn spectral_norm_of_diagonal() {
        let mut m = CMatrix::<f64>::zeros(4, 4);
        m[(0, 0)] = c(3.0, 0.0);
        m[(2, 2)] = c(0.0, -1.0);
        assert!((m.spectral_norm() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn swap_row_pair_is_involution() {
        let m = CMatrix::<f64>::from_fn(9, 9, |r, cc| c(r as f64, cc as f64));
        assert_eq!(swap_row_pair(&swap_row_pair(&m, 3), 3), m);
    }
}

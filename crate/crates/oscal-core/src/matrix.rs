//! Dense complex operator matrices.
//!
//! Storage is split into separate real/imaginary planes so products run as
//! four real GEMM calls. That keeps the hot path (cutoff-1144 products in the
//! three-dimensional checks) inside optimized kernels, and it makes the exact
//! cancellation arguments for anticommutators auditable: entries of `A*B` and
//! `B*A` are accumulated by the same kernel in the same order, so structurally
//! opposite summands cancel bit-for-bit when the final planes are added.

use matrixmultiply::dgemm;
use num_complex::Complex64;

use crate::error::CoreError;

/// A square complex matrix in row-major split storage.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    dim: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl OperatorMatrix {
    /// The zero operator.
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            re: vec![0.0; dim * dim],
            im: vec![0.0; dim * dim],
        }
    }

    /// The identity operator.
    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.re[i * dim + i] = 1.0;
        }
        m
    }

    /// Build entrywise from a closure over (row, column).
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                let v = f(i, j);
                m.re[i * dim + j] = v.re;
                m.im[i * dim + j] = v.im;
            }
        }
        m
    }

    /// Build from a row-major slice of complex entries.
    pub fn from_rows(dim: usize, entries: &[Complex64]) -> Self {
        assert_eq!(entries.len(), dim * dim, "entry count must be dim^2");
        Self::from_fn(dim, |i, j| entries[i * dim + j])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        let idx = i * self.dim + j;
        Complex64::new(self.re[idx], self.im[idx])
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        let idx = i * self.dim + j;
        self.re[idx] = v.re;
        self.im[idx] = v.im;
    }

    /// Direct read-only access to the real plane (row-major).
    pub fn re_plane(&self) -> &[f64] {
        &self.re
    }

    /// Direct read-only access to the imaginary plane (row-major).
    pub fn im_plane(&self) -> &[f64] {
        &self.im
    }

    fn check_dims(&self, other: &Self) -> Result<(), CoreError> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(CoreError::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            })
        }
    }

    /// Entrywise sum.
    pub fn add(&self, other: &Self) -> Result<Self, CoreError> {
        self.check_dims(other)?;
        let mut out = self.clone();
        for (o, s) in out.re.iter_mut().zip(&other.re) {
            *o += s;
        }
        for (o, s) in out.im.iter_mut().zip(&other.im) {
            *o += s;
        }
        Ok(out)
    }

    /// Entrywise difference.
    pub fn sub(&self, other: &Self) -> Result<Self, CoreError> {
        self.check_dims(other)?;
        let mut out = self.clone();
        for (o, s) in out.re.iter_mut().zip(&other.re) {
            *o -= s;
        }
        for (o, s) in out.im.iter_mut().zip(&other.im) {
            *o -= s;
        }
        Ok(out)
    }

    /// Multiply by a complex scalar.
    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.re.len() {
            out.re[i] = s.re * self.re[i] - s.im * self.im[i];
            out.im[i] = s.re * self.im[i] + s.im * self.re[i];
        }
        out
    }

    /// Multiply by a real scalar (exact in the planes, no complex rotation).
    pub fn scale_re(&self, s: f64) -> Self {
        let mut out = self.clone();
        for v in out.re.iter_mut() {
            *v *= s;
        }
        for v in out.im.iter_mut() {
            *v *= s;
        }
        out
    }

    /// Matrix product via four real GEMM calls on the split planes:
    /// `C_re = A_re B_re - A_im B_im`, `C_im = A_re B_im + A_im B_re`.
    pub fn mul(&self, other: &Self) -> Result<Self, CoreError> {
        self.check_dims(other)?;
        let n = self.dim;
        let mut out = Self::zeros(n);
        if n == 0 {
            return Ok(out);
        }
        let rs = n as isize;
        let cs = 1isize;
        unsafe {
            // C_re = A_re * B_re
            dgemm(
                n,
                n,
                n,
                1.0,
                self.re.as_ptr(),
                rs,
                cs,
                other.re.as_ptr(),
                rs,
                cs,
                0.0,
                out.re.as_mut_ptr(),
                rs,
                cs,
            );
            // C_re -= A_im * B_im
            dgemm(
                n,
                n,
                n,
                -1.0,
                self.im.as_ptr(),
                rs,
                cs,
                other.im.as_ptr(),
                rs,
                cs,
                1.0,
                out.re.as_mut_ptr(),
                rs,
                cs,
            );
            // C_im = A_re * B_im
            dgemm(
                n,
                n,
                n,
                1.0,
                self.re.as_ptr(),
                rs,
                cs,
                other.im.as_ptr(),
                rs,
                cs,
                0.0,
                out.im.as_mut_ptr(),
                rs,
                cs,
            );
            // C_im += A_im * B_re
            dgemm(
                n,
                n,
                n,
                1.0,
                self.im.as_ptr(),
                rs,
                cs,
                other.re.as_ptr(),
                rs,
                cs,
                1.0,
                out.im.as_mut_ptr(),
                rs,
                cs,
            );
        }
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.re[j * n + i] = self.re[i * n + j];
                out.im[j * n + i] = -self.im[i * n + j];
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        let mut t = Complex64::new(0.0, 0.0);
        for i in 0..self.dim {
            t += self.get(i, i);
        }
        t
    }

    /// Largest entry modulus (the norm every identity residual is quoted in).
    pub fn max_norm(&self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.re.len() {
            m = m.max(self.re[i].hypot(self.im[i]));
        }
        m
    }

    /// Frobenius norm, used by least-squares coefficient fits.
    pub fn frobenius_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.re.len() {
            s += self.re[i] * self.re[i] + self.im[i] * self.im[i];
        }
        s.sqrt()
    }

    /// Frobenius inner product `<A, B> = sum conj(A_ij) B_ij`.
    pub fn frobenius_inner(&self, other: &Self) -> Result<Complex64, CoreError> {
        self.check_dims(other)?;
        let mut re = 0.0;
        let mut im = 0.0;
        for i in 0..self.re.len() {
            // conj(a) * b
            re += self.re[i] * other.re[i] + self.im[i] * other.im[i];
            im += self.re[i] * other.im[i] - self.im[i] * other.re[i];
        }
        Ok(Complex64::new(re, im))
    }

    /// Max-norm of `A - A^dagger`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut m: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let dre = self.re[i * n + j] - self.re[j * n + i];
                let dim = self.im[i * n + j] + self.im[j * n + i];
                m = m.max(dre.hypot(dim));
            }
        }
        m
    }

    /// Kronecker product; `self` indexes the slow (outer) factor.
    pub fn kron(&self, other: &Self) -> Self {
        let a = self.dim;
        let b = other.dim;
        let n = a * b;
        let mut out = Self::zeros(n);
        for i in 0..a {
            for j in 0..a {
                let (are, aim) = (self.re[i * a + j], self.im[i * a + j]);
                if are == 0.0 && aim == 0.0 {
                    continue;
                }
                for k in 0..b {
                    for l in 0..b {
                        let (bre, bim) = (other.re[k * b + l], other.im[k * b + l]);
                        let row = i * b + k;
                        let col = j * b + l;
                        out.re[row * n + col] = are * bre - aim * bim;
                        out.im[row * n + col] = are * bim + aim * bre;
                    }
                }
            }
        }
        out
    }

    /// `[A, B] = AB - BA`.
    pub fn commutator(&self, other: &Self) -> Result<Self, CoreError> {
        let ab = self.mul(other)?;
        let ba = other.mul(self)?;
        ab.sub(&ba)
    }

    /// `{A, B} = AB + BA`.
    pub fn anticommutator(&self, other: &Self) -> Result<Self, CoreError> {
        let ab = self.mul(other)?;
        let ba = other.mul(self)?;
        ab.add(&ba)
    }

    /// Copy with rows and columns outside `mask` zeroed.
    pub fn masked(&self, mask: &[bool]) -> Self {
        assert_eq!(mask.len(), self.dim, "mask length must equal dim");
        let n = self.dim;
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                if !(mask[i] && mask[j]) {
                    out.re[i * n + j] = 0.0;
                    out.im[i * n + j] = 0.0;
                }
            }
        }
        out
    }

    /// Submatrix on the listed basis indices (in the given order).
    pub fn restriction(&self, indices: &[usize]) -> Self {
        let m = indices.len();
        let mut out = Self::zeros(m);
        for (r, &i) in indices.iter().enumerate() {
            for (c, &j) in indices.iter().enumerate() {
                let v = self.get(i, j);
                out.re[r * m + c] = v.re;
                out.im[r * m + c] = v.im;
            }
        }
        out
    }

    /// Max-norm over entries whose row and column are both inside `mask`.
    #[allow(clippy::needless_range_loop)]
    pub fn max_norm_masked(&self, mask: &[bool]) -> f64 {
        assert_eq!(mask.len(), self.dim, "mask length must equal dim");
        let n = self.dim;
        let mut m: f64 = 0.0;
        for i in 0..n {
            if !mask[i] {
                continue;
            }
            for j in 0..n {
                if mask[j] {
                    m = m.max(self.re[i * n + j].hypot(self.im[i * n + j]));
                }
            }
        }
        m
    }

    /// Apply to a complex vector: `y = A x`.
    #[allow(clippy::needless_range_loop)]
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.dim, "vector length must equal dim");
        let n = self.dim;
        let mut y = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            let mut acc_re = 0.0;
            let mut acc_im = 0.0;
            for j in 0..n {
                let (are, aim) = (self.re[i * n + j], self.im[i * n + j]);
                acc_re += are * x[j].re - aim * x[j].im;
                acc_im += are * x[j].im + aim * x[j].re;
            }
            y[i] = Complex64::new(acc_re, acc_im);
        }
        y
    }

    /// True when every entry is exactly 0.0 in both planes.
    pub fn is_exactly_zero(&self) -> bool {
        self.re.iter().all(|v| *v == 0.0) && self.im.iter().all(|v| *v == 0.0)
    }
}

//! Small dense complex linear algebra: the 3×3 .. 36×36 matrices that show up
//! in Fourier symbols, plus a real symmetric eigensolver used for
//! pseudo-inverses.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("matrix is numerically singular (pivot column {column})")]
pub struct SingularMatrix {
    pub column: usize,
}

/// Dense complex matrix in row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![Complex::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<Complex<T>>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        CMatrix { rows: r, cols: c, data: rows.concat() }
    }

    pub fn diagonal(d: &[Complex<T>]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn dim(&self) -> usize {
        debug_assert_eq!(self.rows, self.cols);
        self.rows
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&v| v * s).collect() }
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.scale(Complex::new(s, T::zero()))
    }

    /// Copies `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &CMatrix<T>) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)];
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, v| m.max(v.norm()))
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|v| v.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn mul_vec(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                row.iter().zip(x).fold(Complex::zero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect()
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut out = Self::identity(self.dim());
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Solves `self · X = rhs` by LU with partial pivoting.
    pub fn solve(&self, rhs: &CMatrix<T>) -> Result<CMatrix<T>, SingularMatrix> {
        let n = self.dim();
        assert_eq!(rhs.rows, n);
        let mut a = self.clone();
        let mut b = rhs.clone();
        let scale = self.max_abs();
        let tol = scale * T::singular_tol();
        for k in 0..n {
            let (p, pv) = (k..n)
                .map(|i| (i, a[(i, k)].norm()))
                .fold((k, -T::one()), |best, cur| if cur.1 > best.1 { cur } else { best });
            if !(pv > tol) {
                return Err(SingularMatrix { column: k });
            }
            if p != k {
                a.swap_rows(p, k);
                b.swap_rows(p, k);
            }
            let inv = a[(k, k)].inv();
            for i in k + 1..n {
                let f = a[(i, k)] * inv;
                if f.is_zero() {
                    continue;
                }
                for j in k..n {
                    let v = a[(k, j)];
                    a[(i, j)] = a[(i, j)] - f * v;
                }
                for j in 0..b.cols {
                    let v = b[(k, j)];
                    b[(i, j)] = b[(i, j)] - f * v;
                }
            }
        }
        for j in 0..b.cols {
            for i in (0..n).rev() {
                let mut s = b[(i, j)];
                for l in i + 1..n {
                    s = s - a[(i, l)] * b[(l, j)];
                }
                b[(i, j)] = s / a[(i, i)];
            }
        }
        Ok(b)
    }

    pub fn inverse(&self) -> Result<CMatrix<T>, SingularMatrix> {
        self.solve(&Self::identity(self.dim()))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// All eigenvalues (complex Hessenberg reduction + shifted QR).
    pub fn eigenvalues(&self) -> Vec<Complex<T>> {
        eigenvalues(self)
    }

    pub fn spectral_radius(&self) -> T {
        self.eigenvalues().iter().fold(T::zero(), |m, l| m.max(l.norm()))
    }

    /// Whether `self` equals its conjugate transpose to within `tol` (absolute).
    pub fn is_hermitian(&self, tol: T) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..self.cols).all(|j| (self[(i, j)] - self[(j, i)].conj()).norm() <= tol))
    }

    /// Moore–Penrose pseudo-inverse of a Hermitian matrix, computed through its
    /// real symmetric embedding `[[Re, -Im], [Im, Re]]`.
    pub fn hermitian_pinv(&self) -> CMatrix<T> {
        self.hermitian_pinv_floor(T::zero())
    }

    /// As [`CMatrix::hermitian_pinv`], also treating eigenvalues of magnitude
    /// at most `floor` as zero.
    pub fn hermitian_pinv_floor(&self, floor: T) -> CMatrix<T> {
        let n = self.dim();
        let m = 2 * n;
        let mut emb = vec![T::zero(); m * m];
        for i in 0..n {
            for j in 0..n {
                let z = self[(i, j)];
                emb[i * m + j] = z.re;
                emb[i * m + n + j] = -z.im;
                emb[(n + i) * m + j] = z.im;
                emb[(n + i) * m + n + j] = z.re;
            }
        }
        let p = symmetric_pinv_floor(&emb, m, floor);
        Self::from_fn(n, n, |i, j| Complex::new(p[i * m + j], p[(n + i) * m + j]))
    }
}

impl<T> Index<(usize, usize)> for CMatrix<T> {
    type Output = Complex<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for CMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Mul for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn mul(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in product");
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] = out.data[i * rhs.cols + j] + a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl<T: Real> Add for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn add(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect(),
        }
    }
}

impl<T: Real> Sub for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn sub(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect(),
        }
    }
}

fn eigenvalues<T: Real>(m: &CMatrix<T>) -> Vec<Complex<T>> {
    let n = m.dim();
    if n == 0 {
        return Vec::new();
    }
    let mut h = m.clone();
    hessenberg(&mut h);
    let mut eig = vec![Complex::zero(); n];
    let eps = T::epsilon();
    let mut hi = n - 1;
    let mut iter = 0usize;
    loop {
        if hi == 0 {
            eig[0] = h[(0, 0)];
            break;
        }
        // Find the start of the trailing unreduced block.
        let mut lo = hi;
        while lo > 0 {
            let s = h[(lo, lo)].l1_norm() + h[(lo - 1, lo - 1)].l1_norm();
            let s = if s.is_zero() { h.max_abs() } else { s };
            if h[(lo, lo - 1)].l1_norm() <= eps * s {
                h[(lo, lo - 1)] = Complex::zero();
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eig[hi] = h[(hi, hi)];
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        if iter > 60 * n {
            // Give up refining this block; accept the diagonal as is.
            for i in lo..=hi {
                eig[i] = h[(i, i)];
            }
            if lo == 0 {
                break;
            }
            hi = lo - 1;
            iter = 0;
            continue;
        }
        let shift = if iter % 11 == 10 {
            h[(hi, hi)] + Complex::new(h[(hi, hi - 1)].norm() * T::lit(0.75), T::zero())
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        qr_step(&mut h, lo, hi, shift);
    }
    eig
}

fn wilkinson_shift<T: Real>(a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> Complex<T> {
    let two = T::lit(2.0);
    let tr_half = (a + d) / two;
    let det = a * d - b * c;
    let disc = (tr_half * tr_half - det).sqrt();
    let l1 = tr_half + disc;
    let l2 = tr_half - disc;
    if (l1 - d).norm() < (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// One explicitly shifted QR step on the active window `lo..=hi` using Givens rotations.
fn qr_step<T: Real>(h: &mut CMatrix<T>, lo: usize, hi: usize, mu: Complex<T>) {
    for i in lo..=hi {
        h[(i, i)] = h[(i, i)] - mu;
    }
    let mut rots = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let a = h[(k, k)];
        let b = h[(k + 1, k)];
        let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
        let (c, s) = if r.is_zero() {
            (T::one(), Complex::zero())
        } else if a.norm().is_zero() {
            (T::zero(), Complex::one())
        } else {
            let an = a.norm();
            (an / r, a * b.conj() / (an * r))
        };
        for j in k..=hi {
            let x = h[(k, j)];
            let y = h[(k + 1, j)];
            h[(k, j)] = x * c + s * y;
            h[(k + 1, j)] = -s.conj() * x + y * c;
        }
        rots.push((c, s));
    }
    for (idx, &(c, s)) in rots.iter().enumerate() {
        let k = lo + idx;
        let top = (k + 2).min(hi);
        for i in lo..=top {
            let x = h[(i, k)];
            let y = h[(i, k + 1)];
            h[(i, k)] = x * c + s.conj() * y;
            h[(i, k + 1)] = -s * x + y * c;
        }
    }
    for i in lo..=hi {
        h[(i, i)] = h[(i, i)] + mu;
    }
}

/// In-place reduction to upper Hessenberg form by Householder reflections.
fn hessenberg<T: Real>(h: &mut CMatrix<T>) {
    let n = h.dim();
    for k in 0..n.saturating_sub(2) {
        let norm = (k + 1..n).map(|i| h[(i, k)].norm_sqr()).sum::<T>().sqrt();
        if norm.is_zero() {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm().is_zero() { Complex::one() } else { x0 / x0.norm() };
        let alpha = -phase * norm;
        let mut v: Vec<Complex<T>> = (k + 1..n).map(|i| h[(i, k)]).collect();
        v[0] = v[0] - alpha;
        let vn = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if vn.is_zero() {
            continue;
        }
        for z in v.iter_mut() {
            *z = *z / vn;
        }
        let two = T::lit(2.0);
        // H <- (I - 2vv*) H
        for j in 0..n {
            let dot = v.iter().enumerate().fold(Complex::<T>::zero(), |acc, (i, vi)| acc + vi.conj() * h[(k + 1 + i, j)]);
            for (i, vi) in v.iter().enumerate() {
                h[(k + 1 + i, j)] = h[(k + 1 + i, j)] - *vi * dot * two;
            }
        }
        // H <- H (I - 2vv*)
        for i in 0..n {
            let dot = v.iter().enumerate().fold(Complex::<T>::zero(), |acc, (j, vj)| acc + h[(i, k + 1 + j)] * *vj);
            for (j, vj) in v.iter().enumerate() {
                h[(i, k + 1 + j)] = h[(i, k + 1 + j)] - dot * vj.conj() * two;
            }
        }
        for i in k + 2..n {
            h[(i, k)] = Complex::zero();
        }
    }
}

/// Eigen-decomposition of a real symmetric matrix (row-major, `n×n`) by cyclic
/// Jacobi rotations. Returns `(eigenvalues, eigenvectors)` with eigenvectors
/// stored as columns of a row-major matrix.
pub fn symmetric_eigen<T: Real>(a: &[T], n: usize) -> (Vec<T>, Vec<T>) {
    assert_eq!(a.len(), n * n);
    let mut a = a.to_vec();
    let mut v = vec![T::zero(); n * n];
    for i in 0..n {
        v[i * n + i] = T::one();
    }
    let total = a.iter().map(|x| *x * *x).sum::<T>().sqrt();
    let tol = T::epsilon() * total;
    for _sweep in 0..100 {
        let off = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum::<T>()
            .sqrt();
        if off <= tol || total.is_zero() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.abs() <= T::min_positive_value() {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[i * n + i]).collect(), v)
}

/// Pseudo-inverse of a real symmetric matrix. Eigenvalues below a relative
/// threshold are treated as zero.
pub fn symmetric_pinv<T: Real>(a: &[T], n: usize) -> Vec<T> {
    symmetric_pinv_floor(a, n, T::zero())
}

/// As [`symmetric_pinv`], also dropping eigenvalues of magnitude at most `floor`.
pub fn symmetric_pinv_floor<T: Real>(a: &[T], n: usize, floor: T) -> Vec<T> {
    let (lam, v) = symmetric_eigen(a, n);
    let lmax = lam.iter().fold(T::zero(), |m, l| m.max(l.abs()));
    let cut = (lmax * T::epsilon() * T::lit(1.0e4) * T::from_usize_lossy(n.max(1))).max(floor);
    let mut out = vec![T::zero(); n * n];
    for (k, &l) in lam.iter().enumerate() {
        if l.abs() <= cut {
            continue;
        }
        let inv = T::one() / l;
        for i in 0..n {
            let vik = v[i * n + k] * inv;
            for j in 0..n {
                out[i * n + j] = out[i * n + j] + vik * v[j * n + k];
            }
        }
    }
    out
}

use std::sync::Arc;

use num_complex::Complex;
use num_traits::Zero;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::gridops::grid::{BlockGridFunction, FieldLayout};
use crate::gridops::operator::BlockOperator;
use crate::gridops::stencil::Stencil;
use crate::linalg::CMatrix;
use crate::scalar::{cis, Real};
use crate::symbols::Frequency;

/// Relative asymmetry below which a symbol is treated as Hermitian.
const HERMITIAN_TOL: f64 = 1e-9;

/// In-place 2D FFT on an `n × n` row-major array.
struct Fft2<T: Real> {
    n: usize,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
}

impl<T: Real> Fft2<T> {
    fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft2 { n, forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n) }
    }

    fn transpose(&self, a: &mut [Complex<T>]) {
        let n = self.n;
        for j in 0..n {
            for i in j + 1..n {
                a.swap(j * n + i, i * n + j);
            }
        }
    }

    fn run(&self, a: &mut [Complex<T>], inverse: bool) {
        let f = if inverse { &self.inverse } else { &self.forward };
        f.process(a);
        self.transpose(a);
        f.process(a);
        self.transpose(a);
    }

    fn forward_real(&self, x: &[T]) -> Vec<Complex<T>> {
        let mut a: Vec<Complex<T>> = x.iter().map(|&v| Complex::new(v, T::zero())).collect();
        self.run(&mut a, false);
        a
    }

    /// Inverse transform including the `1/n²` normalization; returns the real part.
    fn inverse_real(&self, mut a: Vec<Complex<T>>) -> Vec<T> {
        self.run(&mut a, true);
        let s = T::from_usize_lossy(self.n * self.n).recip();
        a.into_iter().map(|c| c.re * s).collect()
    }

    /// `θ_m = 2πm/n` for `m` in FFT order.
    fn theta(&self, m: usize) -> T {
        T::TAU() * T::from_usize_lossy(m) / T::from_usize_lossy(self.n)
    }
}

/// Exact minimum-norm solver for a constant-coefficient scalar stencil on one
/// periodic grid. Fourier modes whose symbol vanishes get a zero coefficient.
pub struct ScalarFftSolver<T: Real> {
    fft: Fft2<T>,
    inv_symbol: Vec<T>,
}

impl<T: Real> ScalarFftSolver<T> {
    pub fn new(s: &Stencil<T>, n: usize) -> Result<Self> {
        if s.row != s.col {
            return Err(Error::InvalidParameter("FFT solve needs a square stencil".into()));
        }
        let fft = Fft2::new(n);
        let mut sym = vec![Complex::<T>::zero(); n * n];
        for m2 in 0..n {
            for m1 in 0..n {
                sym[m2 * n + m1] = s.symbol(&Frequency::raw(fft.theta(m1), fft.theta(m2)));
            }
        }
        let scale = sym.iter().fold(T::zero(), |m, v| m.max(v.norm()));
        let tol = scale * T::singular_tol();
        // A real symmetric stencil has a real symbol; keep only the real part.
        let inv_symbol = sym.iter().map(|v| if v.norm() <= tol { T::zero() } else { v.re.recip() }).collect();
        Ok(ScalarFftSolver { fft, inv_symbol })
    }

    pub fn n(&self) -> usize {
        self.fft.n
    }

    pub fn solve(&self, rhs: &[T]) -> Vec<T> {
        let mut a = self.fft.forward_real(rhs);
        for (c, &s) in a.iter_mut().zip(&self.inv_symbol) {
            *c = *c * s;
        }
        self.fft.inverse_real(a)
    }
}

/// Exact minimum-norm solver for a constant-coefficient block operator on a
/// periodic grid: one small dense solve per discrete frequency.
pub struct BlockFftSolver<T: Real> {
    fft: Fft2<T>,
    layout: FieldLayout,
    inverses: Vec<CMatrix<T>>,
}

impl<T: Real> BlockFftSolver<T> {
    pub fn new(op: &BlockOperator<T>, n: usize) -> Self {
        let fft = Fft2::new(n);
        let symbols: Vec<CMatrix<T>> = (0..n * n)
            .map(|m| op.symbol(&Frequency::raw(fft.theta(m % n), fft.theta(m / n))))
            .collect();
        // eigenvalues this small relative to the whole operator are round-off
        let floor = symbols.iter().fold(T::zero(), |a, l| a.max(l.max_abs())) * T::singular_tol();
        let inverses = symbols
            .into_iter()
            .map(|l| {
                // Hermitian up to round-off: invert the Hermitian part
                if l.is_hermitian(T::lit(HERMITIAN_TOL) * l.max_abs().max(T::one())) {
                    (&l + &l.conj_transpose()).scale_real(T::lit(0.5)).hermitian_pinv_floor(floor)
                } else {
                    l.inverse().unwrap_or_else(|_| l.hermitian_pinv_floor(floor))
                }
            })
            .collect();
        BlockFftSolver { fft, layout: op.layout(), inverses }
    }

    pub fn solve(&self, rhs: &BlockGridFunction<T>) -> Result<BlockGridFunction<T>> {
        let n = self.fft.n;
        if rhs.n() != n || rhs.layout() != self.layout {
            return Err(Error::SizeMismatch { expected: n, got: rhs.n() });
        }
        let blocks = self.layout.blocks();
        let k = blocks.len();
        let phases: Vec<Vec<Complex<T>>> = blocks
            .iter()
            .map(|b| {
                let (hx, hy) = b.ty.half();
                (0..n * n)
                    .map(|m| {
                        let (t1, t2) = (self.fft.theta(m % n), self.fft.theta(m / n));
                        cis(T::lit(0.5) * (t1 * T::lit(hx as f64) + t2 * T::lit(hy as f64)))
                    })
                    .collect()
            })
            .collect();
        let hats: Vec<Vec<Complex<T>>> = (0..k).map(|b| self.fft.forward_real(rhs.block(b))).collect();
        let mut out: Vec<Vec<Complex<T>>> = vec![vec![Complex::zero(); n * n]; k];
        let mut v = vec![Complex::<T>::zero(); k];
        for m in 0..n * n {
            for b in 0..k {
                v[b] = hats[b][m] * phases[b][m].conj();
            }
            let x = self.inverses[m].mul_vec(&v);
            for b in 0..k {
                out[b][m] = x[b] * phases[b][m];
            }
        }
        let data = out.into_iter().map(|a| self.fft.inverse_real(a)).collect();
        BlockGridFunction::from_blocks(self.layout, n, data)
    }
}

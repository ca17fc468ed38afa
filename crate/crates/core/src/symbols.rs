//! Fourier symbols of the discretization blocks and of the grid transfers.
//!
//! Fourier modes are sampled at the true physical position of every unknown,
//! so a Q2 edge or cell unknown at `x + h/2` picks up the phase
//! `e^{iθ/2}`. With this convention all gradient symbols are purely imaginary
//! and the system symbols are Hermitian.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::fem::Interp1;
use crate::linalg::CMatrix;
use crate::scalar::{cis, im, re, Real};

pub type SymbolMatrix<T> = CMatrix<T>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Discretization {
    /// Equal-order Q1–Q1 with a scaled pressure-Laplacian stabilization.
    PoSD,
    /// Equal-order Q1–Q1 with the local projection stabilization.
    PrSD,
    /// Taylor–Hood Q2–Q1.
    Q2Q1,
}

impl Discretization {
    pub const ALL: [Discretization; 3] = [Discretization::PoSD, Discretization::PrSD, Discretization::Q2Q1];

    /// Dimension of the system symbol.
    pub fn dim(self) -> usize {
        2 * self.velocity_types() + 1
    }

    /// Number of unknown types per velocity component.
    pub fn velocity_types(self) -> usize {
        match self {
            Discretization::Q2Q1 => 4,
            _ => 1,
        }
    }

    pub fn is_equal_order(self) -> bool {
        self != Discretization::Q2Q1
    }

    pub fn default_beta(self) -> f64 {
        match self {
            Discretization::PoSD => 1.0 / 24.0,
            Discretization::PrSD => 1.0,
            Discretization::Q2Q1 => 0.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Discretization::PoSD => "posd",
            Discretization::PrSD => "prsd",
            Discretization::Q2Q1 => "q2q1",
        }
    }
}

impl fmt::Display for Discretization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Discretization::PoSD => "PoSD",
            Discretization::PrSD => "PrSD",
            Discretization::Q2Q1 => "Q2-Q1",
        })
    }
}

impl std::str::FromStr for Discretization {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "posd" => Ok(Discretization::PoSD),
            "prsd" => Ok(Discretization::PrSD),
            "q2q1" | "q2-q1" | "taylor-hood" => Ok(Discretization::Q2Q1),
            other => Err(Error::Parse(format!("unknown discretization `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscretizationSpec<T> {
    pub kind: Discretization,
    pub h: T,
    pub beta: T,
}

impl<T: Real> DiscretizationSpec<T> {
    pub fn new(kind: Discretization, h: T) -> Self {
        DiscretizationSpec { kind, h, beta: T::lit(kind.default_beta()) }
    }

    pub fn posd(h: T) -> Self {
        Self::new(Discretization::PoSD, h)
    }

    pub fn prsd(h: T) -> Self {
        Self::new(Discretization::PrSD, h)
    }

    pub fn q2q1(h: T) -> Self {
        Self::new(Discretization::Q2Q1, h)
    }

    pub fn with_beta(mut self, beta: T) -> Self {
        self.beta = beta;
        self
    }

    /// Same discretization on the mesh of width `2h`.
    pub fn coarse(&self) -> Self {
        DiscretizationSpec { h: self.h + self.h, ..*self }
    }

    pub fn dim(&self) -> usize {
        self.kind.dim()
    }
}

/// A frequency `θ = (θ1, θ2)`.
///
/// Values built with [`Frequency::new`] lie in `[-π/2, 3π/2)²`. The coarse
/// frequency `2θ` is used verbatim (not wrapped), since for half-offset
/// unknowns the representative matters; [`Frequency::raw`] builds those.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frequency<T> {
    pub theta1: T,
    pub theta2: T,
}

impl<T: Real> Frequency<T> {
    pub fn new(theta1: T, theta2: T) -> Result<Self> {
        for t in [theta1, theta2] {
            if !(t >= -T::FRAC_PI_2() && t < T::lit(1.5 * PI)) {
                return Err(Error::FrequencyOutOfRange(t.to_f64_lossy()));
            }
        }
        Ok(Frequency { theta1, theta2 })
    }

    pub fn raw(theta1: T, theta2: T) -> Self {
        Frequency { theta1, theta2 }
    }

    /// Low iff both components lie in `[-π/2, π/2)`.
    pub fn is_low(&self) -> bool {
        let lo = -T::FRAC_PI_2();
        let hi = T::FRAC_PI_2();
        self.theta1 >= lo && self.theta1 < hi && self.theta2 >= lo && self.theta2 < hi
    }

    pub fn is_high(&self) -> bool {
        !self.is_low()
    }

    pub fn is_origin(&self) -> bool {
        self.theta1.abs() <= T::epsilon() && self.theta2.abs() <= T::epsilon()
    }

    /// The four harmonics `θ + π(α1, α2)` in the order `00, 10, 01, 11`.
    pub fn harmonics(&self) -> [Frequency<T>; 4] {
        let pi = T::PI();
        [
            Frequency::raw(self.theta1, self.theta2),
            Frequency::raw(self.theta1 + pi, self.theta2),
            Frequency::raw(self.theta1, self.theta2 + pi),
            Frequency::raw(self.theta1 + pi, self.theta2 + pi),
        ]
    }

    pub fn doubled(&self) -> Frequency<T> {
        Frequency::raw(self.theta1 + self.theta1, self.theta2 + self.theta2)
    }
}

impl<T: Real> fmt::Display for Frequency<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.6}, {:.6})", self.theta1, self.theta2)
    }
}

/// Equispaced samples `θ_k = -π/2 + 2πk/N` in each direction.
pub fn sample_axis<T: Real>(n: usize) -> Result<Vec<T>> {
    if n == 0 || n % 4 != 0 {
        return Err(Error::BadSamples(n));
    }
    let step = T::lit(2.0 * PI) / T::from_usize_lossy(n);
    Ok((0..n).map(|k| -T::FRAC_PI_2() + step * T::from_usize_lossy(k)).collect())
}

/// All sampled frequencies, `θ2` outer and `θ1` inner.
pub fn sample_grid<T: Real>(n: usize) -> Result<Vec<Frequency<T>>> {
    let axis = sample_axis::<T>(n)?;
    Ok(axis.iter().flat_map(|&t2| axis.iter().map(move |&t1| Frequency::raw(t1, t2))).collect())
}

pub fn sample_high<T: Real>(n: usize) -> Result<Vec<Frequency<T>>> {
    Ok(sample_grid(n)?.into_iter().filter(|t| t.is_high()).collect())
}

pub fn sample_low<T: Real>(n: usize) -> Result<Vec<Frequency<T>>> {
    Ok(sample_grid(n)?.into_iter().filter(|t| t.is_low()).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Q1Symbols<T> {
    /// Stiffness symbol.
    pub a: T,
    /// Mass symbol.
    pub m: T,
    pub b1: Complex<T>,
    pub b2: Complex<T>,
}

impl<T: Real> Q1Symbols<T> {
    /// `b = -(b1² + b2²)`, which is real and non-negative.
    pub fn b(&self) -> T {
        -(self.b1 * self.b1 + self.b2 * self.b2).re
    }
}

pub fn q1_scalar_symbols<T: Real>(theta: &Frequency<T>, h: T) -> Q1Symbols<T> {
    let (c1, c2) = (theta.theta1.cos(), theta.theta2.cos());
    let (s1, s2) = (theta.theta1.sin(), theta.theta2.sin());
    let two = T::lit(2.0);
    let a = T::lit(2.0 / 3.0) * (T::lit(4.0) - c1 - c2 - two * c1 * c2);
    let m = h * h / T::lit(9.0) * (T::lit(4.0) + two * c1 + two * c2 + c1 * c2);
    let b1 = im(h / T::lit(3.0) * s1 * (two + c2));
    let b2 = im(h / T::lit(3.0) * (two + c1) * s2);
    Q1Symbols { a, m, b1, b2 }
}

/// Symbol `c` of the stabilization operator (the negated (3,3) block).
pub fn stabilization_symbol<T: Real>(spec: &DiscretizationSpec<T>, theta: &Frequency<T>) -> Result<T> {
    let h = spec.h;
    let s = q1_scalar_symbols(theta, h);
    match spec.kind {
        Discretization::PoSD => Ok(spec.beta * s.a * h * h),
        Discretization::PrSD => {
            let (c1, c2) = (theta.theta1.cos(), theta.theta2.cos());
            let proj = (T::one() + c1) * (T::one() + c2) / T::lit(4.0);
            Ok(spec.beta * (s.m / (h * h) - proj) * h * h)
        }
        Discretization::Q2Q1 => Err(Error::Unsupported { op: "stabilization_symbol", disc: spec.kind }),
    }
}

/// The 1D Q2 stiffness symbol in the basis (vertex, midpoint).
pub fn q2_1d_stiffness<T: Real>(theta: T, h: T) -> [[T; 2]; 2] {
    let s = (T::lit(3.0) * h).recip();
    let off = -T::lit(16.0) * (theta / T::lit(2.0)).cos() * s;
    [[(T::lit(14.0) + T::lit(2.0) * theta.cos()) * s, off], [off, T::lit(16.0) * s]]
}

/// The 1D Q2 mass symbol in the basis (vertex, midpoint).
pub fn q2_1d_mass<T: Real>(theta: T, h: T) -> [[T; 2]; 2] {
    let s = h / T::lit(30.0);
    let off = T::lit(4.0) * (theta / T::lit(2.0)).cos() * s;
    [[(T::lit(8.0) - T::lit(2.0) * theta.cos()) * s, off], [off, T::lit(16.0) * s]]
}

fn kron2<T: Real>(y: &[[T; 2]; 2], x: &[[T; 2]; 2]) -> [[T; 4]; 4] {
    let mut out = [[T::zero(); 4]; 4];
    for (iy, ry) in y.iter().enumerate() {
        for (jy, &vy) in ry.iter().enumerate() {
            for (ix, rx) in x.iter().enumerate() {
                for (jx, &vx) in rx.iter().enumerate() {
                    out[2 * iy + ix][2 * jy + jx] = vy * vx;
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Q2Symbols<T> {
    /// Velocity Laplacian on the (node, x-edge, y-edge, cell) sub-grids.
    pub a2: [[T; 4]; 4],
    pub bx: [Complex<T>; 4],
    pub by: [Complex<T>; 4],
}

fn q2_gradient<T: Real>(t1: T, t2: T, h: T) -> [Complex<T>; 4] {
    let half = T::lit(0.5);
    let k = h / T::lit(9.0);
    [
        im(k * t1.sin()),
        im(T::lit(4.0) * k * (half * t1).sin()),
        im(T::lit(2.0) * k * t1.sin() * (half * t2).cos()),
        im(T::lit(8.0) * k * (half * t1).sin() * (half * t2).cos()),
    ]
}

pub fn q2_component_symbols<T: Real>(theta: &Frequency<T>, h: T) -> Q2Symbols<T> {
    let (t1, t2) = (theta.theta1, theta.theta2);
    let a_xy = kron2(&q2_1d_mass(t2, h), &q2_1d_stiffness(t1, h));
    let a_yx = kron2(&q2_1d_stiffness(t2, h), &q2_1d_mass(t1, h));
    let mut a2 = [[T::zero(); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            a2[i][j] = a_xy[i][j] + a_yx[i][j];
        }
    }
    let bx = q2_gradient(t1, t2, h);
    // Swapping the roles of x and y exchanges the x-edge and y-edge unknowns.
    let sw = q2_gradient(t2, t1, h);
    let by = [sw[0], sw[2], sw[1], sw[3]];
    Q2Symbols { a2, bx, by }
}

/// Diagonal of the assembled velocity Laplacian per unknown type, i.e. the
/// stencil centre coefficients (independent of `h` in 2D).
pub fn velocity_diagonal<T: Real>(kind: Discretization) -> Vec<T> {
    match kind {
        Discretization::Q2Q1 => {
            // constant Fourier coefficients of the 1D diagonal symbols
            let a = [T::lit(14.0 / 3.0), T::lit(16.0 / 3.0)];
            let m = [T::lit(8.0 / 30.0), T::lit(16.0 / 30.0)];
            let mut d = Vec::with_capacity(4);
            for iy in 0..2 {
                for ix in 0..2 {
                    d.push(a[ix] * m[iy] + m[ix] * a[iy]);
                }
            }
            d
        }
        _ => vec![T::lit(8.0 / 3.0)],
    }
}

/// Velocity block (one component) and the two gradient columns of the system
/// symbol, in the type order used by [`system_symbol`].
pub fn velocity_blocks<T: Real>(
    spec: &DiscretizationSpec<T>,
    theta: &Frequency<T>,
) -> (CMatrix<T>, Vec<Complex<T>>, Vec<Complex<T>>) {
    match spec.kind {
        Discretization::Q2Q1 => {
            let q = q2_component_symbols(theta, spec.h);
            let a = CMatrix::from_fn(4, 4, |i, j| re(q.a2[i][j]));
            (a, q.bx.to_vec(), q.by.to_vec())
        }
        _ => {
            let s = q1_scalar_symbols(theta, spec.h);
            (CMatrix::from_fn(1, 1, |_, _| re(s.a)), vec![s.b1], vec![s.b2])
        }
    }
}

/// Symbol `c` for equal-order kinds and `0` for Q2–Q1.
pub fn stabilization_or_zero<T: Real>(spec: &DiscretizationSpec<T>, theta: &Frequency<T>) -> T {
    match spec.kind {
        Discretization::Q2Q1 => T::zero(),
        _ => stabilization_symbol(spec, theta).expect("equal-order stabilization"),
    }
}

/// Full system symbol `[[A, 0, Bxᵀ], [0, A, Byᵀ], [Bx, By, -C]]` with
/// unknowns ordered `(u…, v…, p)`.
pub fn system_symbol<T: Real>(spec: &DiscretizationSpec<T>, theta: &Frequency<T>) -> SymbolMatrix<T> {
    let (a, bx, by) = velocity_blocks(spec, theta);
    let nv = a.rows();
    let dim = 2 * nv + 1;
    let p = 2 * nv;
    let mut l = CMatrix::zeros(dim, dim);
    l.set_block(0, 0, &a);
    l.set_block(nv, nv, &a);
    for k in 0..nv {
        l[(k, p)] = bx[k];
        l[(nv + k, p)] = by[k];
        l[(p, k)] = -bx[k];
        l[(p, nv + k)] = -by[k];
    }
    l[(p, p)] = re(-stabilization_or_zero(spec, theta));
    l
}

/// Prolongation and restriction symbols over the four harmonics of one low
/// frequency.
#[derive(Debug, Clone)]
pub struct TransferSymbol<T> {
    /// `(4·dim) × dim`: harmonic `α` occupies rows `α·dim .. (α+1)·dim`.
    pub prolong: CMatrix<T>,
    /// `dim × (4·dim)`, equal to `4 P̃*` for `R = Pᵀ`.
    pub restrict: CMatrix<T>,
}

/// 1D prolongation symbol block for one harmonic `alpha ∈ {0,1}`: rows are
/// fine types, columns coarse types.
pub fn prolong_1d_symbol<T: Real>(rule: Interp1, theta: T, alpha: usize) -> Vec<Vec<Complex<T>>> {
    let types = rule.fine_types();
    let half_theta = theta / T::lit(2.0);
    types
        .iter()
        .map(|&f| {
            types
                .iter()
                .map(|&t| {
                    let mut c = Complex::<T>::zero();
                    for q in 0..2 {
                        let v: Complex<T> = rule
                            .terms(f, q)
                            .iter()
                            .filter(|term| term.coarse == t)
                            .map(|term| {
                                let halves = 4 * term.cell + 2 * t.half() - 2 * q as i32 - f.half();
                                cis(half_theta * T::lit(halves as f64)) * T::lit(term.weight)
                            })
                            .sum();
                        let sign = if alpha * q % 2 == 1 { -T::one() } else { T::one() };
                        c = c + v * sign;
                    }
                    let phase = cis(-T::PI() * T::lit(alpha as f64) * T::lit(f.half() as f64) / T::lit(2.0));
                    c * phase / T::lit(2.0)
                })
                .collect()
        })
        .collect()
}

fn component_prolong<T: Real>(rule: Interp1, theta: &Frequency<T>, a1: usize, a2: usize) -> CMatrix<T> {
    let px = prolong_1d_symbol(rule, theta.theta1, a1);
    let py = prolong_1d_symbol(rule, theta.theta2, a2);
    let k = px.len();
    CMatrix::from_fn(k * k, k * k, |i, j| py[i / k][j / k] * px[i % k][j % k])
}

pub fn transfer_symbol<T: Real>(spec: &DiscretizationSpec<T>, theta_low: &Frequency<T>) -> TransferSymbol<T> {
    let dim = spec.dim();
    let (vel_rule, nv) = match spec.kind {
        Discretization::Q2Q1 => (Interp1::Quadratic, 4),
        _ => (Interp1::Linear, 1),
    };
    let mut prolong = CMatrix::zeros(4 * dim, dim);
    for (h, (a1, a2)) in [(0, 0), (1, 0), (0, 1), (1, 1)].into_iter().enumerate() {
        let pv = component_prolong(vel_rule, theta_low, a1, a2);
        let pp = component_prolong(Interp1::Linear, theta_low, a1, a2);
        let r0 = h * dim;
        prolong.set_block(r0, 0, &pv);
        prolong.set_block(r0 + nv, nv, &pv);
        prolong.set_block(r0 + 2 * nv, 2 * nv, &pp);
    }
    let restrict = prolong.conj_transpose().scale_real(T::lit(4.0));
    TransferSymbol { prolong, restrict }
}

/// Block-diagonal symbol over the four harmonics, `diag(f(θ^00), …, f(θ^11))`.
pub fn harmonic_block<T: Real>(theta_low: &Frequency<T>, f: impl Fn(&Frequency<T>) -> CMatrix<T>) -> CMatrix<T> {
    let blocks: Vec<CMatrix<T>> = theta_low.harmonics().iter().map(f).collect();
    let d = blocks[0].rows();
    let mut out = CMatrix::zeros(4 * d, 4 * d);
    for (k, b) in blocks.iter().enumerate() {
        out.set_block(k * d, k * d, b);
    }
    out
}

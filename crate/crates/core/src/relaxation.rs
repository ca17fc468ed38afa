//! Error-propagation symbols `S̃ = I − ω·P̃·M̃⁻¹·L̃` of the block relaxation
//! schemes, and the closed-form eigenvalues available for equal-order
//! elements.

use std::fmt;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::{re, Real};
use crate::symbols::{
    q1_scalar_symbols, sample_grid, stabilization_or_zero, stabilization_symbol, system_symbol, velocity_blocks,
    velocity_diagonal, Discretization, DiscretizationSpec, Frequency, SymbolMatrix,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    /// Distributive weighted Jacobi, one pressure Jacobi step.
    Dwj1,
    /// Distributive weighted Jacobi, two pressure Jacobi sweeps.
    Dwj2,
    /// Braess–Sarazin with an exact Schur complement solve.
    BsrExact,
    /// Braess–Sarazin with an inexact Schur complement solve.
    Ibsr,
    UzawaSchur,
    UzawaMass,
    UzawaDiag,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 7] = [
        SchemeKind::Dwj1,
        SchemeKind::Dwj2,
        SchemeKind::BsrExact,
        SchemeKind::Ibsr,
        SchemeKind::UzawaSchur,
        SchemeKind::UzawaMass,
        SchemeKind::UzawaDiag,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Dwj1 => "dwj1",
            SchemeKind::Dwj2 => "dwj2",
            SchemeKind::BsrExact => "bsr",
            SchemeKind::Ibsr => "ibsr",
            SchemeKind::UzawaSchur => "uzawa-schur",
            SchemeKind::UzawaMass => "uzawa-mass",
            SchemeKind::UzawaDiag => "uzawa-diag",
        }
    }

    /// Parameters that influence this scheme.
    pub fn parameters(self) -> &'static [Param] {
        use Param::*;
        match self {
            SchemeKind::Dwj1 => &[Alpha1, Alpha2, Omega],
            SchemeKind::Dwj2 => &[Alpha1, OmegaJ, Omega],
            SchemeKind::BsrExact | SchemeKind::UzawaSchur => &[Alpha, Omega],
            SchemeKind::Ibsr => &[Alpha, Omega, OmegaJ],
            SchemeKind::UzawaMass => &[Alpha, Omega, Delta],
            SchemeKind::UzawaDiag => &[Alpha, Omega, Sigma],
        }
    }

    pub fn is_distributive(self) -> bool {
        matches!(self, SchemeKind::Dwj1 | SchemeKind::Dwj2)
    }

    pub fn is_uzawa(self) -> bool {
        matches!(self, SchemeKind::UzawaSchur | SchemeKind::UzawaMass | SchemeKind::UzawaDiag)
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for SchemeKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        SchemeKind::ALL
            .into_iter()
            .find(|k| k.name() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::Parse(format!("unknown scheme `{s}`")))
    }
}

/// Names of the tunable relaxation parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Param {
    Alpha,
    Alpha1,
    Alpha2,
    Omega,
    OmegaJ,
    Delta,
    Sigma,
}

impl Param {
    pub const ALL: [Param; 7] =
        [Param::Alpha, Param::Alpha1, Param::Alpha2, Param::Omega, Param::OmegaJ, Param::Delta, Param::Sigma];

    pub fn name(self) -> &'static str {
        match self {
            Param::Alpha => "alpha",
            Param::Alpha1 => "alpha1",
            Param::Alpha2 => "alpha2",
            Param::Omega => "omega",
            Param::OmegaJ => "omegaJ",
            Param::Delta => "delta",
            Param::Sigma => "sigma",
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Param {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "");
        Param::ALL
            .into_iter()
            .find(|p| p.name().to_ascii_lowercase() == key)
            .ok_or_else(|| Error::UnknownParameter(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxParams<T> {
    pub alpha: T,
    pub alpha1: T,
    pub alpha2: T,
    pub omega: T,
    pub omega_j: T,
    pub delta: T,
    pub sigma: T,
    /// Weighted-Jacobi sweeps on the Schur complement (IBSR).
    pub sweeps: usize,
    /// Nested W(1,1) cycles on the Schur complement (IBSR, grid solver only).
    /// Zero selects the Jacobi sweeps instead.
    pub inner_cycles: usize,
}

impl<T: Real> Default for RelaxParams<T> {
    fn default() -> Self {
        RelaxParams {
            alpha: T::one(),
            alpha1: T::one(),
            alpha2: T::one(),
            omega: T::one(),
            omega_j: T::one(),
            delta: T::one(),
            sigma: T::one(),
            sweeps: 1,
            inner_cycles: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxScheme<T> {
    pub kind: SchemeKind,
    pub params: RelaxParams<T>,
}

impl<T: Real> RelaxScheme<T> {
    pub fn new(kind: SchemeKind) -> Self {
        RelaxScheme { kind, params: RelaxParams::default() }
    }

    pub fn dwj1(alpha1: T, alpha2: T, omega: T) -> Self {
        let mut s = Self::new(SchemeKind::Dwj1);
        s.params.alpha1 = alpha1;
        s.params.alpha2 = alpha2;
        s.params.omega = omega;
        s
    }

    pub fn dwj2(alpha1: T, omega_j: T, omega: T) -> Self {
        let mut s = Self::new(SchemeKind::Dwj2);
        s.params.alpha1 = alpha1;
        s.params.omega_j = omega_j;
        s.params.omega = omega;
        s
    }

    pub fn bsr(alpha: T, omega: T) -> Self {
        let mut s = Self::new(SchemeKind::BsrExact);
        s.params.alpha = alpha;
        s.params.omega = omega;
        s
    }

    /// Inexact Braess–Sarazin with `sweeps` weighted-Jacobi sweeps on the Schur complement.
    pub fn ibsr(alpha: T, omega: T, omega_j: T, sweeps: usize) -> Self {
        let mut s = Self::new(SchemeKind::Ibsr);
        s.params.alpha = alpha;
        s.params.omega = omega;
        s.params.omega_j = omega_j;
        s.params.sweeps = sweeps;
        s
    }

    /// Inexact Braess–Sarazin with `inner_cycles` nested W(1,1) cycles on the Schur complement.
    pub fn ibsr_inner(alpha: T, omega: T, omega_j: T, inner_cycles: usize) -> Self {
        let mut s = Self::ibsr(alpha, omega, omega_j, 1);
        s.params.inner_cycles = inner_cycles;
        s
    }

    pub fn uzawa_schur(alpha: T, omega: T) -> Self {
        let mut s = Self::new(SchemeKind::UzawaSchur);
        s.params.alpha = alpha;
        s.params.omega = omega;
        s
    }

    pub fn uzawa_mass(alpha: T, omega: T, delta: T) -> Self {
        let mut s = Self::new(SchemeKind::UzawaMass);
        s.params.alpha = alpha;
        s.params.omega = omega;
        s.params.delta = delta;
        s
    }

    pub fn uzawa_diag(alpha: T, omega: T, sigma: T) -> Self {
        let mut s = Self::new(SchemeKind::UzawaDiag);
        s.params.alpha = alpha;
        s.params.omega = omega;
        s.params.sigma = sigma;
        s
    }

    pub fn get(&self, p: Param) -> T {
        let q = &self.params;
        match p {
            Param::Alpha => q.alpha,
            Param::Alpha1 => q.alpha1,
            Param::Alpha2 => q.alpha2,
            Param::Omega => q.omega,
            Param::OmegaJ => q.omega_j,
            Param::Delta => q.delta,
            Param::Sigma => q.sigma,
        }
    }

    pub fn set(&mut self, p: Param, v: T) {
        let q = &mut self.params;
        match p {
            Param::Alpha => q.alpha = v,
            Param::Alpha1 => q.alpha1 = v,
            Param::Alpha2 => q.alpha2 = v,
            Param::Omega => q.omega = v,
            Param::OmegaJ => q.omega_j = v,
            Param::Delta => q.delta = v,
            Param::Sigma => q.sigma = v,
        }
    }

    pub fn with(mut self, p: Param, v: T) -> Self {
        self.set(p, v);
        self
    }

    /// Whether the Schur complement is inverted exactly in the Fourier
    /// analysis (exact BSR, and IBSR driven by nested cycles, whose symbol is
    /// not a fixed function of θ).
    pub fn exact_schur_in_analysis(&self) -> bool {
        self.kind == SchemeKind::BsrExact || (self.kind == SchemeKind::Ibsr && self.params.inner_cycles > 0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.params.omega >= T::zero()) {
            return Err(Error::InvalidParameter("omega must be non-negative".into()));
        }
        for &p in self.kind.parameters() {
            if p != Param::Omega && !(self.get(p) > T::zero()) {
                return Err(Error::InvalidParameter(format!("{p} must be positive for {}", self.kind)));
            }
        }
        if self.kind == SchemeKind::Ibsr && self.params.inner_cycles == 0 && self.params.sweeps == 0 {
            return Err(Error::InvalidParameter("IBSR needs at least one Jacobi sweep".into()));
        }
        Ok(())
    }

    /// Relevant parameters as `name=value` pairs.
    pub fn describe(&self) -> String {
        let mut parts: Vec<String> = self.kind.parameters().iter().map(|&p| format!("{p}={}", self.get(p))).collect();
        if self.kind == SchemeKind::Ibsr {
            if self.params.inner_cycles > 0 {
                parts.push(format!("inner_cycles={}", self.params.inner_cycles));
            } else {
                parts.push(format!("sweeps={}", self.params.sweeps));
            }
        }
        format!("{} {}", self.kind, parts.join(" "))
    }
}

/// Pieces of the inexact Schur complement symbol used by IBSR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IbsrSymbols<T> {
    /// Symbol of `S₀ = B(αD)⁻¹Bᵀ`.
    pub varsigma: T,
    /// `-diag(S)/ωJ`, i.e. minus the inverse of one Jacobi step.
    pub gamma: T,
    /// Symbol of `S = S₀ + C`.
    pub tau: T,
    /// (3,3) entry of the preconditioner symbol.
    pub eta: T,
}

fn mean_over_grid<T: Real>(f: impl Fn(&Frequency<T>) -> T) -> T {
    // exact for trigonometric polynomials of degree < 8
    let grid = sample_grid::<T>(8).expect("8 is a multiple of 4");
    grid.iter().map(f).sum::<T>() / T::from_usize_lossy(grid.len())
}

/// Symbol of `B(αD)⁻¹Bᵀ` with `D` the velocity diagonal per unknown type.
pub fn schur_velocity_part<T: Real>(spec: &DiscretizationSpec<T>, theta: &Frequency<T>, alpha: T) -> T {
    let (_, bx, by) = velocity_blocks(spec, theta);
    let d = velocity_diagonal::<T>(spec.kind);
    bx.iter().zip(&by).zip(&d).map(|((x, y), &dk)| (x.norm_sqr() + y.norm_sqr()) / (alpha * dk)).sum()
}

/// Centre coefficient of the Schur stencil `B(αD)⁻¹Bᵀ + C`.
pub fn schur_diagonal<T: Real>(spec: &DiscretizationSpec<T>, alpha: T) -> T {
    mean_over_grid(|t| schur_velocity_part(spec, t, alpha) + stabilization_or_zero(spec, t))
}

pub fn ibsr_schur_symbols<T: Real>(
    scheme: &RelaxScheme<T>,
    spec: &DiscretizationSpec<T>,
    theta: &Frequency<T>,
) -> Result<IbsrSymbols<T>> {
    let p = &scheme.params;
    let varsigma = schur_velocity_part(spec, theta, p.alpha);
    let tau = varsigma + stabilization_or_zero(spec, theta);
    let diag = schur_diagonal(spec, p.alpha);
    if !(p.omega_j > T::zero()) {
        return Err(Error::InvalidParameter("omegaJ must be positive".into()));
    }
    let w = p.omega_j / diag;
    let gamma = -w.recip();
    let eta = if scheme.exact_schur_in_analysis() {
        -stabilization_or_zero(spec, theta)
    } else {
        let m = p.sweeps.max(1);
        // m weighted-Jacobi sweeps approximate S⁻¹ by (1 - (1 - Wτ)^m) / τ
        let s_inv = if tau.abs() <= T::epsilon() * diag {
            w * T::from_usize_lossy(m)
        } else {
            (T::one() - (T::one() - w * tau).powi(m as i32)) / tau
        };
        varsigma - s_inv.recip()
    };
    Ok(IbsrSymbols { varsigma, gamma, tau, eta })
}

/// Symbol of the approximate Schur complement `Ŝ` used by the Uzawa variants.
pub fn uzawa_schur_symbol<T: Real>(scheme: &RelaxScheme<T>, spec: &DiscretizationSpec<T>, theta: &Frequency<T>) -> T {
    let p = &scheme.params;
    let c = stabilization_or_zero(spec, theta);
    match scheme.kind {
        SchemeKind::UzawaSchur => schur_velocity_part(spec, theta, p.alpha) + c,
        SchemeKind::UzawaMass => c + p.delta * q1_scalar_symbols(theta, spec.h).m,
        SchemeKind::UzawaDiag => p.sigma * spec.h * spec.h,
        _ => unreachable!("not an Uzawa scheme"),
    }
}

/// Symbols entering one relaxation step: `x ← x + ω·P̃·M̃⁻¹(b − L̃x)`.
pub struct RelaxationSymbols<T> {
    pub system: SymbolMatrix<T>,
    pub preconditioner: SymbolMatrix<T>,
    pub distributor: Option<SymbolMatrix<T>>,
}

pub fn relaxation_symbols<T: Real>(
    scheme: &RelaxScheme<T>,
    spec: &DiscretizationSpec<T>,
    theta: &Frequency<T>,
) -> Result<RelaxationSymbols<T>> {
    scheme.validate()?;
    let l = system_symbol(spec, theta);
    let dim = l.rows();
    let nv = spec.kind.velocity_types();
    let pi = 2 * nv;
    let d = velocity_diagonal::<T>(spec.kind);
    let h2 = spec.h * spec.h;
    let p = &scheme.params;
    let mut m = CMatrix::zeros(dim, dim);
    let vel_scale = if scheme.kind.is_distributive() { p.alpha1 } else { p.alpha };
    for c in 0..2 {
        for k in 0..nv {
            m[(c * nv + k, c * nv + k)] = re(vel_scale * d[k]);
        }
    }
    // divergence row is kept in every scheme
    for k in 0..pi {
        m[(pi, k)] = l[(pi, k)];
    }
    let mut distributor = None;
    match scheme.kind {
        SchemeKind::Dwj1 | SchemeKind::Dwj2 => {
            let a_p = q1_scalar_symbols(theta, spec.h).a;
            m[(pi, pi)] = if scheme.kind == SchemeKind::Dwj1 {
                re(h2 * p.alpha2)
            } else {
                let g = distributed_pressure_symbol(spec, theta);
                let wj = p.omega_j;
                re(h2 / (T::lit(2.0) * wj - wj * wj * g / h2))
            };
            let mut pd = CMatrix::identity(dim);
            for k in 0..pi {
                pd[(k, pi)] = l[(k, pi)];
            }
            pd[(pi, pi)] = re(-a_p);
            distributor = Some(pd);
        }
        SchemeKind::BsrExact | SchemeKind::Ibsr => {
            for k in 0..pi {
                m[(k, pi)] = l[(k, pi)];
            }
            m[(pi, pi)] = re(ibsr_schur_symbols(scheme, spec, theta)?.eta);
        }
        SchemeKind::UzawaSchur | SchemeKind::UzawaMass | SchemeKind::UzawaDiag => {
            m[(pi, pi)] = re(-uzawa_schur_symbol(scheme, spec, theta));
        }
    }
    Ok(RelaxationSymbols { system: l, preconditioner: m, distributor })
}

/// Symbol of `BBᵀ + C·A_p`, the pressure block of the distributed operator.
pub fn distributed_pressure_symbol<T: Real>(spec: &DiscretizationSpec<T>, theta: &Frequency<T>) -> T {
    let (_, bx, by) = velocity_blocks(spec, theta);
    let bbt: T = bx.iter().chain(&by).map(|b| b.norm_sqr()).sum();
    let a_p = q1_scalar_symbols(theta, spec.h).a;
    bbt + stabilization_or_zero(spec, theta) * a_p
}

/// The relaxation error-propagation symbol `S̃(θ)`.
pub fn smoother_symbol<T: Real>(
    scheme: &RelaxScheme<T>,
    spec: &DiscretizationSpec<T>,
    theta: &Frequency<T>,
) -> Result<SymbolMatrix<T>> {
    let parts = relaxation_symbols(scheme, spec, theta)?;
    let mut update = parts.preconditioner.solve(&parts.system).map_err(|_| Error::SingularSymbol {
        what: "relaxation preconditioner",
        theta1: theta.theta1.to_f64_lossy(),
        theta2: theta.theta2.to_f64_lossy(),
    })?;
    if let Some(pd) = &parts.distributor {
        update = pd * &update;
    }
    let dim = update.rows();
    Ok(&CMatrix::identity(dim) - &update.scale_real(scheme.params.omega))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormEigs<T> {
    pub y1: T,
    pub y2: T,
    pub y3: T,
    pub lambda1: T,
    pub lambda2: T,
    pub lambda3: T,
}

pub fn closed_form_eigs<T: Real>(
    scheme: &RelaxScheme<T>,
    spec: &DiscretizationSpec<T>,
    theta: &Frequency<T>,
) -> Result<ClosedFormEigs<T>> {
    if spec.kind == Discretization::Q2Q1 {
        return Err(Error::Unsupported { op: "closed_form_eigs", disc: spec.kind });
    }
    let s = q1_scalar_symbols(theta, spec.h);
    let c = stabilization_symbol(spec, theta)?;
    let b = s.b();
    let h2 = spec.h * spec.h;
    let p = &scheme.params;
    let y1 = T::lit(3.0) * s.a / T::lit(8.0);
    let y2 = (b + s.a * c) / h2;
    let y3 = p.omega_j * y2 * (T::lit(2.0) - p.omega_j * y2);
    let k = T::lit(8.0 / 3.0) * p.alpha;
    Ok(ClosedFormEigs {
        y1,
        y2,
        y3,
        lambda1: T::one(),
        lambda2: T::lit(3.0) * s.a / (T::lit(8.0) * p.alpha),
        lambda3: (s.a * c + b) / (k * c + b),
    })
}

fn quadratic_roots<T: Real>(a2: T, a1: T, a0: T) -> [Complex<T>; 2] {
    let disc = Complex::new(a1 * a1 - T::lit(4.0) * a2 * a0, T::zero()).sqrt();
    let two_a = re(T::lit(2.0) * a2);
    [(re(-a1) + disc) / two_a, (re(-a1) - disc) / two_a]
}

/// Generalized eigenvalues `λ` of `(L̃, M̃)` (of `(L̃P̃, M̃)` for the
/// distributive schemes) from their factored characteristic polynomials.
/// The eigenvalues of `S̃` are `1 − ω·λ`.
pub fn determinant_roots<T: Real>(
    scheme: &RelaxScheme<T>,
    spec: &DiscretizationSpec<T>,
    theta: &Frequency<T>,
) -> Result<Vec<Complex<T>>> {
    let e = closed_form_eigs(scheme, spec, theta)?;
    let s = q1_scalar_symbols(theta, spec.h);
    let c = stabilization_symbol(spec, theta)?;
    let b = s.b();
    let p = &scheme.params;
    let k = T::lit(8.0 / 3.0) * p.alpha;
    let vel = re(e.lambda2);
    Ok(match scheme.kind {
        SchemeKind::Dwj1 => {
            let v = re(e.y1 / p.alpha1);
            vec![v, v, re(e.y2 / p.alpha2)]
        }
        SchemeKind::Dwj2 => {
            let v = re(e.y1 / p.alpha1);
            vec![v, v, re(e.y3)]
        }
        SchemeKind::BsrExact | SchemeKind::Ibsr => {
            // -(a - kλ)[(b - kη)λ² + (aη - kc - 2b)λ + ac + b]
            let eta = ibsr_schur_symbols(scheme, spec, theta)?.eta;
            let [r1, r2] = quadratic_roots(b - k * eta, s.a * eta - k * c - b - b, s.a * c + b);
            vec![vel, r1, r2]
        }
        SchemeKind::UzawaSchur | SchemeKind::UzawaMass | SchemeKind::UzawaDiag => {
            // (a - kλ)[-kŝλ² + (aŝ + kc + b)λ - (ac + b)]
            let sh = uzawa_schur_symbol(scheme, spec, theta);
            let [r1, r2] = quadratic_roots(-k * sh, s.a * sh + k * c + b, -(s.a * c + b));
            vec![vel, r1, r2]
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const H: f64 = 1.0 / 64.0;

    #[test]
    fn zero_weight_gives_identity() {
        let spec = DiscretizationSpec::posd(H);
        let t = Frequency::raw(0.7, 2.1);
        for kind in SchemeKind::ALL {
            let s = smoother_symbol(&RelaxScheme::new(kind).with(Param::Omega, 0.0), &spec, &t).unwrap();
            assert_eq!(s, CMatrix::identity(3));
        }
    }

    #[test]
    fn ibsr_one_sweep_gamma() {
        let alpha = 1.3;
        let wj = 0.9;
        let spec = DiscretizationSpec::posd(H);
        let s = ibsr_schur_symbols(&RelaxScheme::ibsr(alpha, 1.0, wj, 1), &spec, &Frequency::raw(1.0, 2.0)).unwrap();
        let expect = -(H * H / (24.0 * wj)) * (9.0 / (2.0 * alpha) + 8.0 / 3.0);
        assert!((s.gamma - expect).abs() < 1e-15);
        assert!((s.eta - (s.gamma + s.varsigma)).abs() < 1e-15);
        let q1 = q1_scalar_symbols(&Frequency::raw(1.0, 2.0), H);
        assert!((s.varsigma - 3.0 * q1.b() / (8.0 * alpha)).abs() < 1e-15);
    }

    #[test]
    fn schur_diagonal_closed_forms() {
        let alpha = 1.2;
        let posd = schur_diagonal(&DiscretizationSpec::posd(H), alpha);
        assert!((posd - H * H * (3.0 / (16.0 * alpha) + 1.0 / 9.0)).abs() < 1e-15);
        let prsd = schur_diagonal(&DiscretizationSpec::prsd(H), alpha);
        assert!((prsd - H * H * (3.0 / (16.0 * alpha) + 7.0 / 36.0)).abs() < 1e-15);
    }

    #[test]
    fn two_sweep_eta_matches_printed_form() {
        let spec = DiscretizationSpec::prsd(H);
        let t = Frequency::raw(2.0, -0.3);
        let one = ibsr_schur_symbols(&RelaxScheme::ibsr(1.2, 1.0, 1.2, 1), &spec, &t).unwrap();
        let two = ibsr_schur_symbols(&RelaxScheme::ibsr(1.2, 1.0, 1.2, 2), &spec, &t).unwrap();
        let printed = one.gamma / (2.0 + one.tau / one.gamma) + one.varsigma;
        assert!((two.eta - printed).abs() < 1e-15);
    }

    #[test]
    fn y2_extremes_over_high_frequencies() {
        let scheme = RelaxScheme::dwj1(1.0, 1.0, 1.0);
        for (spec, lo, hi) in [
            (DiscretizationSpec::posd(H), 8.0 / 27.0, 64.0 / 51.0),
            (DiscretizationSpec::prsd(H), f64::NAN, 1.5),
        ] {
            let (mut mn, mut mx) = (f64::MAX, f64::MIN);
            for t in crate::symbols::sample_high::<f64>(128).unwrap() {
                let e = closed_form_eigs(&scheme, &spec, &t).unwrap();
                mn = mn.min(e.y2);
                mx = mx.max(e.y2);
            }
            if lo.is_finite() {
                assert!((mn - lo).abs() < 1e-12, "{mn}");
            }
            // the maximiser is not a sample point, so allow sampling slack
            assert!(mx <= hi + 1e-12 && mx > hi - 2e-3, "{mx}");
        }
        let e = closed_form_eigs(&scheme, &DiscretizationSpec::posd(H), &Frequency::raw(PI, PI)).unwrap();
        assert!((e.y2 - 8.0 / 27.0).abs() < 1e-12);
        let e = closed_form_eigs(&scheme, &DiscretizationSpec::posd(H), &Frequency::raw((8.0f64 / 17.0).acos(), PI / 2.0))
            .unwrap();
        assert!((e.y2 - 64.0 / 51.0).abs() < 1e-12);
        let e =
            closed_form_eigs(&scheme, &DiscretizationSpec::prsd(H), &Frequency::raw(2.0 * PI / 3.0, 0.0)).unwrap();
        assert!((e.y2 - 1.5).abs() < 1e-12);
    }

    #[test]
    fn closed_forms_reject_taylor_hood() {
        let r = closed_form_eigs(&RelaxScheme::bsr(1.0, 1.0), &DiscretizationSpec::q2q1(H), &Frequency::raw(1.0, 1.0));
        assert!(r.is_err());
    }
}

//! Smoothing factors, two-grid convergence factors and parameter searches.

use std::fmt;

use num_complex::Complex;
use num_rational::Ratio;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::relaxation::{smoother_symbol, Param, RelaxScheme, SchemeKind};
use crate::scalar::Real;
use crate::symbols::{
    harmonic_block, q1_scalar_symbols, sample_high, sample_low, system_symbol, transfer_symbol, Discretization,
    DiscretizationSpec, Frequency, SymbolMatrix,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coarsening {
    /// Re-assemble the discretization on the coarse mesh.
    Rediscretize,
    /// Coarse operator `R·K·P`.
    Galerkin,
}

impl Coarsening {
    pub fn name(self) -> &'static str {
        match self {
            Coarsening::Rediscretize => "redisc",
            Coarsening::Galerkin => "galerkin",
        }
    }
}

impl fmt::Display for Coarsening {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Coarsening {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "redisc" | "rediscretize" | "rediscretization" => Ok(Coarsening::Rediscretize),
            "galerkin" => Ok(Coarsening::Galerkin),
            other => Err(Error::Parse(format!("unknown coarsening `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwoGridSpec {
    pub nu1: usize,
    pub nu2: usize,
    pub coarsening: Coarsening,
    /// Frequency samples per dimension.
    pub samples: usize,
}

impl TwoGridSpec {
    pub fn new(nu1: usize, nu2: usize, coarsening: Coarsening, samples: usize) -> Self {
        TwoGridSpec { nu1, nu2, coarsening, samples }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nu1 + self.nu2 == 0 {
            return Err(Error::InvalidParameter("at least one relaxation sweep is required".into()));
        }
        if self.samples == 0 || self.samples % 4 != 0 {
            return Err(Error::BadSamples(self.samples));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisResult<T> {
    pub factor: T,
    pub argmax_theta: Frequency<T>,
    pub params: RelaxScheme<T>,
}

/// `max_{θ ∈ T^high} ρ(S̃(θ))` over the sampled high frequencies.
pub fn smoothing_factor<T: Real>(
    scheme: &RelaxScheme<T>,
    spec: &DiscretizationSpec<T>,
    samples: usize,
) -> Result<AnalysisResult<T>> {
    let mut best: Option<(T, Frequency<T>)> = None;
    for theta in sample_high::<T>(samples)? {
        let r = smoother_symbol(scheme, spec, &theta)?.spectral_radius();
        if best.is_none_or(|(b, _)| r > b || r.is_nan()) {
            best = Some((r, theta));
        }
    }
    let (factor, argmax_theta) = best.ok_or(Error::EmptyGrid)?;
    Ok(AnalysisResult { factor, argmax_theta, params: *scheme })
}

fn singular(what: &'static str, theta: &Frequency<impl Real>) -> Error {
    Error::SingularSymbol { what, theta1: theta.theta1.to_f64_lossy(), theta2: theta.theta2.to_f64_lossy() }
}

/// Coarse-grid operator symbol at the coarse frequency `2θ`.
pub fn coarse_symbol<T: Real>(
    spec: &DiscretizationSpec<T>,
    coarsening: Coarsening,
    theta_low: &Frequency<T>,
) -> SymbolMatrix<T> {
    match coarsening {
        Coarsening::Rediscretize => system_symbol(&spec.coarse(), &theta_low.doubled()),
        Coarsening::Galerkin => {
            let t = transfer_symbol(spec, theta_low);
            let l4 = harmonic_block(theta_low, |th| system_symbol(spec, th));
            &(&t.restrict * &l4) * &t.prolong
        }
    }
}

/// Coarse-grid correction symbol `I − P̃ (L̃_{2h})⁻¹ R̃ L̃` over four harmonics.
pub fn cgc_symbol<T: Real>(
    spec: &DiscretizationSpec<T>,
    coarsening: Coarsening,
    theta_low: &Frequency<T>,
) -> Result<SymbolMatrix<T>> {
    let t = transfer_symbol(spec, theta_low);
    let l4 = harmonic_block(theta_low, |th| system_symbol(spec, th));
    let lc = match coarsening {
        Coarsening::Rediscretize => system_symbol(&spec.coarse(), &theta_low.doubled()),
        Coarsening::Galerkin => &(&t.restrict * &l4) * &t.prolong,
    };
    let rl = &t.restrict * &l4;
    let corr = lc.solve(&rl).map_err(|_| singular("coarse-grid symbol", theta_low))?;
    Ok(&CMatrix::identity(l4.rows()) - &(&t.prolong * &corr))
}

fn smoother4<T: Real>(
    scheme: &RelaxScheme<T>,
    spec: &DiscretizationSpec<T>,
    theta_low: &Frequency<T>,
) -> Result<SymbolMatrix<T>> {
    let blocks = theta_low
        .harmonics()
        .iter()
        .map(|th| smoother_symbol(scheme, spec, th))
        .collect::<Result<Vec<_>>>()?;
    let d = blocks[0].rows();
    let mut out = CMatrix::zeros(4 * d, 4 * d);
    for (k, b) in blocks.iter().enumerate() {
        out.set_block(k * d, k * d, b);
    }
    Ok(out)
}

/// Two-grid error-propagation symbol `S̃^{ν2} C̃ S̃^{ν1}` at one low frequency.
pub fn two_grid_symbol<T: Real>(
    scheme: &RelaxScheme<T>,
    spec: &DiscretizationSpec<T>,
    tg: &TwoGridSpec,
    theta_low: &Frequency<T>,
) -> Result<SymbolMatrix<T>> {
    let s = smoother4(scheme, spec, theta_low)?;
    let c = cgc_symbol(spec, tg.coarsening, theta_low)?;
    Ok(&(&s.pow(tg.nu2) * &c) * &s.pow(tg.nu1))
}

/// `C̃ S̃^{ν1+ν2}`, which has the same spectrum as [`two_grid_symbol`].
fn two_grid_cyclic<T: Real>(
    scheme: &RelaxScheme<T>,
    spec: &DiscretizationSpec<T>,
    tg: &TwoGridSpec,
    theta_low: &Frequency<T>,
) -> Result<SymbolMatrix<T>> {
    let s = smoother4(scheme, spec, theta_low)?;
    let c = cgc_symbol(spec, tg.coarsening, theta_low)?;
    Ok(&c * &s.pow(tg.nu1 + tg.nu2))
}

fn two_grid_frequencies<T: Real>(samples: usize) -> Result<Vec<Frequency<T>>> {
    // the constant mode and its aliases are the nullspace of the periodic problem
    Ok(sample_low::<T>(samples)?.into_iter().filter(|t| !t.is_origin()).collect())
}

pub fn two_grid_factor<T: Real>(
    scheme: &RelaxScheme<T>,
    spec: &DiscretizationSpec<T>,
    tg: &TwoGridSpec,
) -> Result<AnalysisResult<T>> {
    tg.validate()?;
    let mut best: Option<(T, Frequency<T>)> = None;
    for theta in two_grid_frequencies::<T>(tg.samples)? {
        let r = two_grid_cyclic(scheme, spec, tg, &theta)?.spectral_radius();
        if best.is_none_or(|(b, _)| r > b || r.is_nan()) {
            best = Some((r, theta));
        }
    }
    let (factor, argmax_theta) = best.ok_or(Error::EmptyGrid)?;
    Ok(AnalysisResult { factor, argmax_theta, params: *scheme })
}

/// All eigenvalues of the two-grid symbol at every sampled low frequency.
pub fn two_grid_spectrum<T: Real>(
    scheme: &RelaxScheme<T>,
    spec: &DiscretizationSpec<T>,
    tg: &TwoGridSpec,
) -> Result<Vec<(Frequency<T>, Vec<Complex<T>>)>> {
    tg.validate()?;
    two_grid_frequencies::<T>(tg.samples)?
        .into_iter()
        .map(|theta| Ok((theta, two_grid_symbol(scheme, spec, tg, &theta)?.eigenvalues())))
        .collect()
}

/// `max_{θ ∈ T^high} |1 − ratio·3a(θ)/8|`: damped Jacobi on the velocity Laplacian.
pub fn jacobi_velocity_factor<T: Real>(ratio: T, samples: usize) -> Result<T> {
    Ok(sample_high::<T>(samples)?
        .iter()
        .map(|t| (T::one() - ratio * T::lit(3.0 / 8.0) * q1_scalar_symbols(t, T::one()).a).abs())
        .fold(T::zero(), T::max))
}

/// One condition of a printed parameter region.
#[derive(Debug, Clone, PartialEq)]
pub enum Constraint {
    /// `num/den = value`.
    RatioEquals { num: Param, den: Param, value: Ratio<i64> },
    /// `lo ≤ num/den ≤ hi`.
    RatioBetween { num: Param, den: Param, lo: Ratio<i64>, hi: Ratio<i64> },
    /// `lo ≤ p ≤ hi`.
    Between { param: Param, lo: Ratio<i64>, hi: Ratio<i64> },
    /// The two-branch `(ωJ, ω)` window for two pressure Jacobi sweeps, where
    /// `y_min`, `y_max` bound the distributed pressure symbol over `T^high`.
    TwoSweepWindow { y_min: Ratio<i64>, y_max: Ratio<i64> },
}

fn r2f(r: Ratio<i64>) -> f64 {
    r.to_f64().expect("finite ratio")
}

impl Constraint {
    pub fn holds(&self, s: &RelaxScheme<f64>, tol: f64) -> bool {
        match *self {
            Constraint::RatioEquals { num, den, value } => (s.get(num) / s.get(den) - r2f(value)).abs() <= tol,
            Constraint::RatioBetween { num, den, lo, hi } => {
                let q = s.get(num) / s.get(den);
                q >= r2f(lo) - tol && q <= r2f(hi) + tol
            }
            Constraint::Between { param, lo, hi } => {
                let v = s.get(param);
                v >= r2f(lo) - tol && v <= r2f(hi) + tol
            }
            Constraint::TwoSweepWindow { y_min, y_max } => {
                let (lo, hi) = (r2f(y_min), r2f(y_max));
                let mid = 2.0 / (lo + hi);
                let wj = s.params.omega_j;
                let w = s.params.omega;
                let c = std::f64::consts::FRAC_1_SQRT_2;
                let branch = |y: f64, wlo: f64, whi: f64| {
                    wj >= wlo - tol
                        && wj <= whi + tol
                        && w >= 2.0 / (3.0 * y * wj * (2.0 - y * wj)) - tol
                        && w <= 4.0 / 3.0 + tol
                };
                branch(hi, mid, (1.0 + c) / hi) || branch(lo, (1.0 - c) / lo, mid)
            }
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::RatioEquals { num, den, value } => write!(f, "{num}/{den} = {value}"),
            Constraint::RatioBetween { num, den, lo, hi } => write!(f, "{lo} <= {num}/{den} <= {hi}"),
            Constraint::Between { param, lo, hi } => write!(f, "{lo} <= {param} <= {hi}"),
            Constraint::TwoSweepWindow { y_min, y_max } => {
                let mid = Ratio::from_integer(2) / (y_min + y_max);
                write!(
                    f,
                    "either {mid} <= omegaJ <= (1+sqrt2/2)/({y_max}) and 2/(3 y omegaJ (2 - y omegaJ)) <= omega <= 4/3 with y = {y_max}, \
                     or (1-sqrt2/2)/({y_min}) <= omegaJ <= {mid} and the same bound with y = {y_min}"
                )
            }
        }
    }
}

/// A printed optimal smoothing factor together with its parameter region.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoremOptimum {
    pub mu_opt: Ratio<i64>,
    pub constraints: Vec<Constraint>,
    /// A parameter choice inside the region.
    pub witness: RelaxScheme<f64>,
}

impl TheoremOptimum {
    pub fn mu_opt_f64(&self) -> f64 {
        r2f(self.mu_opt)
    }

    pub fn admits(&self, s: &RelaxScheme<f64>) -> bool {
        self.constraints.iter().all(|c| c.holds(s, 1e-12))
    }
}

fn ratio(n: i64, d: i64) -> Ratio<i64> {
    Ratio::new(n, d)
}

/// The damped-Jacobi optimum for the velocity block alone: `1/3`, attained iff `ω/α1 = 8/9`.
pub fn velocity_jacobi_optimum() -> (Ratio<i64>, Ratio<i64>) {
    (ratio(1, 3), ratio(8, 9))
}

pub fn theorem_optima(kind: Discretization, scheme: SchemeKind) -> Result<TheoremOptimum> {
    use Param::*;
    let unsupported = || Error::UnsupportedScheme { op: "theorem_optima", scheme: format!("{scheme} on {kind}") };
    let (pressure_ratio, y_min, y_max, w1_lo, w1_hi) = match kind {
        Discretization::PoSD => (ratio(459, 356), ratio(8, 27), ratio(64, 51), ratio(136, 267), ratio(96, 89)),
        Discretization::PrSD => (ratio(108, 97), ratio(8, 27), ratio(3, 2), ratio(128, 291), ratio(108, 97)),
        Discretization::Q2Q1 => return Err(unsupported()),
    };
    Ok(match scheme {
        SchemeKind::Dwj1 => {
            let mu = if kind == Discretization::PoSD { ratio(55, 89) } else { ratio(65, 97) };
            let omega = r2f(pressure_ratio);
            TheoremOptimum {
                mu_opt: mu,
                constraints: vec![
                    Constraint::RatioEquals { num: Omega, den: Alpha2, value: pressure_ratio },
                    Constraint::RatioBetween { num: Omega, den: Alpha1, lo: w1_lo, hi: w1_hi },
                ],
                witness: RelaxScheme::dwj1(omega * 9.0 / 8.0, 1.0, omega),
            }
        }
        SchemeKind::Dwj2 => TheoremOptimum {
            mu_opt: ratio(1, 3),
            constraints: vec![
                Constraint::RatioEquals { num: Omega, den: Alpha1, value: ratio(8, 9) },
                Constraint::TwoSweepWindow { y_min, y_max },
            ],
            witness: RelaxScheme::dwj2(1.5, 1.0, 4.0 / 3.0),
        },
        SchemeKind::BsrExact => TheoremOptimum {
            mu_opt: ratio(1, 3),
            constraints: vec![
                Constraint::RatioEquals { num: Omega, den: Alpha, value: ratio(8, 9) },
                Constraint::Between { param: Alpha, lo: ratio(3, 4), hi: ratio(3, 2) },
            ],
            witness: RelaxScheme::bsr(1.0, 8.0 / 9.0),
        },
        _ => return Err(unsupported()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Objective {
    Smoothing { samples: usize },
    TwoGrid(TwoGridSpec),
}

impl Objective {
    pub fn samples(&self) -> usize {
        match self {
            Objective::Smoothing { samples } => *samples,
            Objective::TwoGrid(tg) => tg.samples,
        }
    }

    fn with_samples(&self, samples: usize) -> Objective {
        match *self {
            Objective::Smoothing { .. } => Objective::Smoothing { samples },
            Objective::TwoGrid(tg) => Objective::TwoGrid(TwoGridSpec { samples, ..tg }),
        }
    }

    pub fn evaluate<T: Real>(&self, scheme: &RelaxScheme<T>, spec: &DiscretizationSpec<T>) -> Result<AnalysisResult<T>> {
        match self {
            Objective::Smoothing { samples } => smoothing_factor(scheme, spec, *samples),
            Objective::TwoGrid(tg) => two_grid_factor(scheme, spec, tg),
        }
    }
}

/// Range `lo, lo+step, …, ≤ hi` for one parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamAxis<T> {
    pub param: Param,
    pub lo: T,
    pub hi: T,
    pub step: T,
}

impl<T: Real> ParamAxis<T> {
    pub fn new(param: Param, lo: T, hi: T, step: T) -> Self {
        ParamAxis { param, lo, hi, step }
    }

    pub fn fixed(param: Param, value: T) -> Self {
        ParamAxis { param, lo: value, hi: value, step: T::one() }
    }

    pub fn values(&self) -> Vec<T> {
        if self.hi < self.lo {
            return Vec::new();
        }
        if !(self.step > T::zero()) {
            return vec![self.lo];
        }
        let n = ((self.hi - self.lo) / self.step + T::lit(1e-9)).floor().to_usize().unwrap_or(0);
        (0..=n).map(|k| self.lo + self.step * T::from_usize_lossy(k)).collect()
    }
}

/// Search settings: the full grid is scanned with `search_samples`
/// frequencies per dimension, optionally refined around the incumbent with
/// `refine_step`, and the winner is re-evaluated with the objective's own
/// sample count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizeOptions<T> {
    pub search_samples: Option<usize>,
    pub refine_step: Option<T>,
}

impl<T: Real> Default for OptimizeOptions<T> {
    fn default() -> Self {
        OptimizeOptions { search_samples: None, refine_step: Some(T::lit(0.01)) }
    }
}

fn cartesian<T: Real>(axes: &[(Param, Vec<T>)]) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    for (_, vals) in axes {
        out = out.into_iter().flat_map(|prefix| vals.iter().map(move |&v| [prefix.clone(), vec![v]].concat())).collect();
    }
    out
}

fn grid_search<T: Real>(
    base: &RelaxScheme<T>,
    spec: &DiscretizationSpec<T>,
    objective: &Objective,
    axes: &[(Param, Vec<T>)],
) -> Result<Option<(T, RelaxScheme<T>)>> {
    let mut best: Option<(T, RelaxScheme<T>)> = None;
    for point in cartesian(axes) {
        let mut s = *base;
        for ((p, _), &v) in axes.iter().zip(&point) {
            s.set(*p, v);
        }
        if s.validate().is_err() {
            continue;
        }
        let f = match objective.evaluate(&s, spec) {
            Ok(r) => r.factor,
            Err(Error::SingularSymbol { .. }) => continue,
            Err(e) => return Err(e),
        };
        // strict improvement keeps the lexicographically smallest tuple on ties
        if f.is_finite() && best.is_none_or(|(b, _)| f < b) {
            best = Some((f, s));
        }
    }
    Ok(best)
}

/// Exhaustive minimisation of the objective over a parameter grid.
pub fn optimize_params<T: Real>(
    scheme: &RelaxScheme<T>,
    spec: &DiscretizationSpec<T>,
    objective: &Objective,
    grid: &[ParamAxis<T>],
    options: &OptimizeOptions<T>,
) -> Result<AnalysisResult<T>> {
    let axes: Vec<(Param, Vec<T>)> = grid.iter().map(|a| (a.param, a.values())).collect();
    if axes.is_empty() || axes.iter().any(|(_, v)| v.is_empty()) {
        return Err(Error::EmptyGrid);
    }
    let search = options.search_samples.map_or(*objective, |n| objective.with_samples(n));
    let (_, mut incumbent) = grid_search(scheme, spec, &search, &axes)?.ok_or(Error::EmptyGrid)?;
    if let Some(fine) = options.refine_step {
        let local: Vec<(Param, Vec<T>)> = grid
            .iter()
            .map(|a| {
                let c = incumbent.get(a.param);
                let lo = (c - a.step).max(a.lo);
                let hi = (c + a.step).min(a.hi);
                let ax = ParamAxis::new(a.param, lo, hi, fine.min(a.step));
                (a.param, if a.lo == a.hi { vec![a.lo] } else { ax.values() })
            })
            .collect();
        if let Some((_, s)) = grid_search(scheme, spec, &search, &local)? {
            incumbent = s;
        }
    }
    objective.evaluate(&incumbent, spec)
}

/// Ties one parameter to another: `target = factor · source`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamLink<T> {
    pub target: Param,
    pub source: Param,
    pub factor: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid<T> {
    pub x: ParamAxis<T>,
    pub y: ParamAxis<T>,
    pub xs: Vec<T>,
    pub ys: Vec<T>,
    /// `values[j][i]` is the factor at `(xs[i], ys[j])`.
    pub values: Vec<Vec<T>>,
}

/// Two-grid factors over a two-parameter grid, for contour plots.
pub fn parameter_sweep<T: Real>(
    scheme: &RelaxScheme<T>,
    spec: &DiscretizationSpec<T>,
    tg: &TwoGridSpec,
    x: ParamAxis<T>,
    y: ParamAxis<T>,
    link: Option<ParamLink<T>>,
) -> Result<SweepGrid<T>> {
    let xs = x.values();
    let ys = y.values();
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let mut values = Vec::with_capacity(ys.len());
    for &yv in &ys {
        let mut row = Vec::with_capacity(xs.len());
        for &xv in &xs {
            let mut s = scheme.with(y.param, yv).with(x.param, xv);
            if let Some(l) = link {
                s.set(l.target, l.factor * s.get(l.source));
            }
            row.push(match two_grid_factor(&s, spec, tg) {
                Ok(r) => r.factor,
                Err(Error::SingularSymbol { .. }) => T::nan(),
                Err(e) => return Err(e),
            });
        }
        values.push(row);
    }
    Ok(SweepGrid { x, y, xs, ys, values })
}

//! Experiment descriptions, the catalog of published convergence tables and
//! CSV output of measured results.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lfa::{smoothing_factor, two_grid_factor, Coarsening, TwoGridSpec};
use crate::mgsolver::{measure_rho_hat, CycleKind, CycleSpec, Multigrid};
use crate::relaxation::{Param, RelaxScheme, SchemeKind};
use crate::symbols::{Discretization, DiscretizationSpec};

/// Measured and predicted factors further apart than this are flagged.
pub const DEVIATION_FLAG: f64 = 0.03;
/// Frequency samples per direction for the predicted factors.
pub const LFA_SAMPLES: usize = 128;
/// Mesh width at which the tables quote their predictions.
pub const LFA_H: f64 = 1.0 / 128.0;

/// Relaxation parameters as they appear in a config file; absent entries keep
/// the scheme defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamValues {
    pub alpha: Option<f64>,
    pub alpha1: Option<f64>,
    pub alpha2: Option<f64>,
    pub omega: Option<f64>,
    pub omega_j: Option<f64>,
    pub delta: Option<f64>,
    pub sigma: Option<f64>,
    pub sweeps: Option<usize>,
    pub inner_cycles: Option<usize>,
}

impl ParamValues {
    pub fn apply(&self, mut s: RelaxScheme<f64>) -> RelaxScheme<f64> {
        let reals = [
            (Param::Alpha, self.alpha),
            (Param::Alpha1, self.alpha1),
            (Param::Alpha2, self.alpha2),
            (Param::Omega, self.omega),
            (Param::OmegaJ, self.omega_j),
            (Param::Delta, self.delta),
            (Param::Sigma, self.sigma),
        ];
        for (p, v) in reals {
            if let Some(v) = v {
                s.set(p, v);
            }
        }
        if let Some(m) = self.sweeps {
            s.params.sweeps = m;
        }
        if let Some(c) = self.inner_cycles {
            s.params.inner_cycles = c;
        }
        s
    }
}

fn default_cycle() -> String {
    "w".into()
}
fn default_coarsening() -> String {
    "redisc".into()
}
fn default_k() -> usize {
    100
}
fn default_seed() -> u64 {
    1
}

/// One multigrid measurement as written in a TOML config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub id: String,
    pub disc: String,
    pub scheme: String,
    #[serde(default)]
    pub params: ParamValues,
    #[serde(default = "default_cycle")]
    pub cycle: String,
    pub nu1: usize,
    pub nu2: usize,
    #[serde(default = "default_coarsening")]
    pub coarsening: String,
    pub n: usize,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Paper value to compare against, if any.
    pub reference: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentFile {
    #[serde(default)]
    pub experiment: Vec<ExperimentConfig>,
}

impl ExperimentFile {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

/// A fully resolved measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub id: String,
    pub disc: Discretization,
    pub scheme: RelaxScheme<f64>,
    /// Scheme whose two-grid factor is reported beside the measurement.
    pub lfa_scheme: RelaxScheme<f64>,
    pub cycle: CycleSpec,
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub reference: Option<Reference>,
}

impl ExperimentConfig {
    pub fn resolve(&self) -> Result<Experiment> {
        let disc: Discretization = self.disc.parse()?;
        let kind: SchemeKind = self.scheme.parse()?;
        let scheme = self.params.apply(RelaxScheme::new(kind));
        scheme.validate()?;
        let cycle = CycleSpec::new(self.cycle.parse()?, self.nu1, self.nu2, self.coarsening.parse()?);
        Ok(Experiment {
            id: self.id.clone(),
            disc,
            scheme,
            lfa_scheme: scheme,
            cycle,
            n: self.n,
            k: self.k,
            seed: self.seed,
            reference: self.reference.map(Reference::Value),
        })
    }
}

/// A published value: a convergence factor or a reported divergence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reference {
    Value(f64),
    Divergent,
}

impl Reference {
    pub fn is_divergent(self) -> bool {
        match self {
            Reference::Value(v) => v >= 1.0,
            Reference::Divergent => true,
        }
    }

    pub fn value(self) -> Option<f64> {
        match self {
            Reference::Value(v) => Some(v),
            Reference::Divergent => None,
        }
    }
}

/// One output line; the same shape serves measured and prediction-only rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub id: String,
    pub n: usize,
    pub cycle: String,
    pub nu1: usize,
    pub nu2: usize,
    pub rho_hat: Option<f64>,
    pub rho_lfa: Option<f64>,
    pub wall_time_s: f64,
    pub label: String,
    pub scheme: String,
    /// The residual grew over the run.
    pub diverged: bool,
    pub mu: Option<f64>,
    /// Published factor; empty for a published divergence.
    pub reference: Option<f64>,
    pub reference_divergent: bool,
    pub flag: bool,
}

impl ResultRow {
    /// Whether the measured (or, for prediction rows, predicted) factor agrees
    /// with the published one within `tol`; divergence must match divergence.
    pub fn matches_reference(&self, tol: f64) -> Option<bool> {
        let value = self.rho_hat.or(self.rho_lfa)?;
        let ours_divergent = self.diverged || value >= 1.0;
        if self.reference_divergent {
            return Some(ours_divergent);
        }
        let r = self.reference?;
        Some(!ours_divergent && (value - r).abs() <= tol)
    }
}

fn spec_for(disc: Discretization, h: f64) -> DiscretizationSpec<f64> {
    DiscretizationSpec::new(disc, h)
}

/// Two-grid LFA factor at the tables' mesh width.
pub fn predicted_factor(disc: Discretization, scheme: &RelaxScheme<f64>, cycle: &CycleSpec) -> Result<f64> {
    let tg = TwoGridSpec::new(cycle.nu1, cycle.nu2, cycle.coarsening, LFA_SAMPLES);
    Ok(two_grid_factor(scheme, &spec_for(disc, LFA_H), &tg)?.factor)
}

fn flag(rho_hat: f64, diverged: bool, rho_lfa: f64) -> bool {
    let measured_divergent = diverged || rho_hat >= 1.0;
    if measured_divergent && rho_lfa >= 1.0 {
        return false;
    }
    measured_divergent || (rho_hat - rho_lfa).abs() > DEVIATION_FLAG
}

/// Runs one measurement; `rho_lfa` is computed unless supplied.
pub fn run_experiment(e: &Experiment, rho_lfa: Option<f64>) -> Result<ResultRow> {
    let rho_lfa = match rho_lfa {
        Some(r) => r,
        None => predicted_factor(e.disc, &e.lfa_scheme, &e.cycle)?,
    };
    let start = Instant::now();
    let spec = spec_for(e.disc, 1.0 / e.n as f64);
    let mg = Multigrid::new(&spec, e.cycle, &e.scheme, e.n)?;
    let report = measure_rho_hat(&mg, e.k, e.seed)?;
    let wall = start.elapsed().as_secs_f64();
    let rho_hat = report.rho_hat;
    let diverged = report.diverged || !(rho_hat < 1.0);
    Ok(ResultRow {
        id: e.id.clone(),
        n: e.n,
        cycle: e.cycle.label(),
        nu1: e.cycle.nu1,
        nu2: e.cycle.nu2,
        rho_hat: Some(rho_hat),
        rho_lfa: Some(rho_lfa),
        wall_time_s: wall,
        label: "measured".into(),
        scheme: e.scheme.describe(),
        diverged,
        mu: None,
        reference: e.reference.and_then(Reference::value),
        reference_divergent: e.reference.is_some_and(Reference::is_divergent),
        flag: flag(rho_hat, diverged, rho_lfa),
    })
}

/// The six cycle columns of every measured table.
pub const COLUMNS: [(usize, usize); 6] = [(0, 1), (1, 0), (1, 1), (1, 2), (2, 1), (2, 2)];
/// Mesh sizes of the measured rows.
pub const SIZES: [usize; 2] = [64, 128];

/// A row of an LFA-only table: IBSR parameters with published μ and ρ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictionRow {
    pub label: &'static str,
    pub scheme: RelaxScheme<f64>,
    pub mu: f64,
    pub rho: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TableLayout {
    /// Published two-grid predictions and measured factors for the six
    /// cycle columns at `h = 1/64` and `1/128`.
    Measured {
        cycle: CycleKind,
        lfa: [f64; 6],
        measured: [[Reference; 6]; 2],
        /// Inner W(1,1) cycle counts per column, when the table lists them.
        inner_cycles: Option<[[usize; 6]; 2]>,
    },
    /// Smoothing and two-grid predictions for `ν1 + ν2 = 1`.
    Prediction { rows: Vec<PredictionRow> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableSpec {
    pub id: &'static str,
    pub caption: &'static str,
    pub disc: Discretization,
    pub scheme: RelaxScheme<f64>,
    /// Scheme the published prediction row refers to.
    pub lfa_scheme: RelaxScheme<f64>,
    pub layout: TableLayout,
}

fn values(v: [f64; 6]) -> [Reference; 6] {
    v.map(Reference::Value)
}

fn measured(cycle: CycleKind, lfa: [f64; 6], h64: [f64; 6], h128: [f64; 6]) -> TableLayout {
    TableLayout::Measured { cycle, lfa, measured: [values(h64), values(h128)], inner_cycles: None }
}

/// Every numbered convergence table, in publication order.
pub fn tables() -> Vec<TableSpec> {
    use CycleKind::{TwoGrid, W};
    use Discretization::{PoSD, PrSD, Q2Q1};
    let dwj_posd = RelaxScheme::dwj1(1.451, 1.0, 1.290);
    let dwj_prsd = RelaxScheme::dwj1(1.0, 1.0, 108.0 / 97.0);
    let dwj2 = RelaxScheme::dwj2(1.5, 1.0, 4.0 / 3.0);
    let bsr_posd = RelaxScheme::bsr(1.0, 8.0 / 9.0);
    let bsr_prsd = RelaxScheme::bsr(1.2, 16.0 / 15.0);
    let ibsr2_posd = RelaxScheme::ibsr(1.1, 1.0, 1.0, 2);
    let ibsr2_prsd = RelaxScheme::ibsr(1.2, 0.9, 1.2, 2);
    let bsr_q2 = RelaxScheme::bsr(1.1, 1.05);
    let q2_lfa = [4.893, 4.893, 0.249, 0.109, 0.109, 0.090];
    vec![
        TableSpec {
            id: "posd-dwj-w",
            caption: "W-cycles, DWJ, PoSD, rediscretization",
            disc: PoSD,
            scheme: dwj_posd,
            lfa_scheme: dwj_posd,
            layout: measured(
                W,
                [0.618, 0.618, 0.382, 0.236, 0.236, 0.146],
                [0.564, 0.568, 0.349, 0.215, 0.214, 0.133],
                [0.561, 0.568, 0.348, 0.215, 0.214, 0.132],
            ),
        },
        TableSpec {
            id: "posd-dwj2-w",
            caption: "W-cycles, DWJ with 2 pressure Jacobi sweeps, PoSD, rediscretization",
            disc: PoSD,
            scheme: dwj2,
            lfa_scheme: dwj2,
            layout: measured(
                W,
                [0.338, 0.338, 0.115, 0.078, 0.078, 0.061],
                [0.324, 0.324, 0.112, 0.074, 0.075, 0.074],
                [0.324, 0.324, 0.112, 0.075, 0.075, 0.073],
            ),
        },
        TableSpec {
            id: "prsd-dwj-w",
            caption: "W-cycles, DWJ, PrSD, rediscretization",
            disc: PrSD,
            scheme: dwj_prsd,
            lfa_scheme: dwj_prsd,
            layout: measured(
                W,
                [0.670, 0.670, 0.449, 0.300, 0.300, 0.201],
                [0.652, 0.652, 0.436, 0.291, 0.292, 0.196],
                [0.651, 0.652, 0.435, 0.291, 0.291, 0.195],
            ),
        },
        TableSpec {
            id: "prsd-dwj2-w",
            caption: "W-cycles, DWJ with 2 pressure Jacobi sweeps, PrSD, rediscretization",
            disc: PrSD,
            scheme: dwj2,
            lfa_scheme: dwj2,
            layout: measured(
                W,
                [0.333, 0.333, 0.112, 0.079, 0.079, 0.062],
                [0.324, 0.324, 0.112, 0.074, 0.075, 0.074],
                [0.324, 0.324, 0.112, 0.075, 0.075, 0.073],
            ),
        },
        TableSpec {
            id: "posd-bsr-w",
            caption: "W-cycles, exact BSR, PoSD, rediscretization",
            disc: PoSD,
            scheme: bsr_posd,
            lfa_scheme: bsr_posd,
            layout: measured(
                W,
                [0.333, 0.333, 0.111, 0.079, 0.079, 0.062],
                [0.324, 0.323, 0.112, 0.075, 0.075, 0.058],
                [0.323, 0.323, 0.112, 0.075, 0.075, 0.058],
            ),
        },
        TableSpec {
            id: "posd-ibsr-lfa",
            caption: "LFA predictions for IBSR, PoSD, rediscretization, nu1+nu2=1",
            disc: PoSD,
            scheme: ibsr2_posd,
            lfa_scheme: ibsr2_posd,
            layout: TableLayout::Prediction {
                rows: vec![
                    PredictionRow { label: "1 (optimized)", scheme: RelaxScheme::ibsr(1.2, 1.1, 0.7, 1), mu: 0.679, rho: 0.679 },
                    PredictionRow { label: "1", scheme: RelaxScheme::ibsr(1.0, 8.0 / 9.0, 1.0, 1), mu: 0.669, rho: 0.735 },
                    PredictionRow { label: "2 (optimized)", scheme: RelaxScheme::ibsr(1.1, 1.0, 1.0, 2), mu: 0.366, rho: 0.366 },
                    PredictionRow { label: "2", scheme: RelaxScheme::ibsr(1.0, 8.0 / 9.0, 1.0, 2), mu: 0.461, rho: 0.461 },
                ],
            },
        },
        TableSpec {
            id: "posd-ibsr2-tg",
            caption: "Two-grid, IBSR with 2 Jacobi sweeps, PoSD, rediscretization",
            disc: PoSD,
            scheme: ibsr2_posd,
            lfa_scheme: ibsr2_posd,
            layout: measured(
                TwoGrid,
                [0.366, 0.366, 0.167, 0.128, 0.128, 0.106],
                [0.352, 0.353, 0.160, 0.120, 0.120, 0.100],
                [0.352, 0.353, 0.160, 0.122, 0.122, 0.100],
            ),
        },
        TableSpec {
            id: "posd-ibsr2-w",
            caption: "W-cycles, IBSR with 2 Jacobi sweeps, PoSD, rediscretization",
            disc: PoSD,
            scheme: ibsr2_posd,
            lfa_scheme: ibsr2_posd,
            layout: measured(
                W,
                [0.366, 0.366, 0.167, 0.128, 0.128, 0.106],
                [0.456, 0.453, 0.245, 0.197, 0.200, 0.167],
                [0.459, 0.462, 0.257, 0.206, 0.211, 0.175],
            ),
        },
        TableSpec {
            id: "posd-ibsr-innerw",
            caption: "W-cycles, IBSR with inner W(1,1) cycles, PoSD, rediscretization",
            disc: PoSD,
            scheme: RelaxScheme::ibsr_inner(1.0, 8.0 / 9.0, 1.0, 2),
            lfa_scheme: bsr_posd,
            layout: TableLayout::Measured {
                cycle: W,
                lfa: [0.333, 0.333, 0.111, 0.079, 0.079, 0.062],
                measured: [
                    values([0.368, 0.346, 0.131, 0.075, 0.075, 0.059]),
                    values([0.343, 0.351, 0.111, 0.075, 0.075, 0.063]),
                ],
                inner_cycles: Some([[2, 2, 2, 2, 2, 1], [2, 2, 2, 2, 2, 1]]),
            },
        },
        TableSpec {
            id: "prsd-bsr-w",
            caption: "W-cycles, exact BSR, PrSD, rediscretization",
            disc: PrSD,
            scheme: bsr_prsd,
            lfa_scheme: bsr_prsd,
            layout: measured(
                W,
                [0.673, 0.673, 0.111, 0.079, 0.079, 0.062],
                [0.585, 0.585, 0.112, 0.075, 0.075, 0.058],
                [0.584, 0.584, 0.112, 0.075, 0.075, 0.058],
            ),
        },
        TableSpec {
            id: "prsd-ibsr-lfa",
            caption: "LFA predictions for IBSR, PrSD, rediscretization, nu1+nu2=1",
            disc: PrSD,
            scheme: ibsr2_prsd,
            lfa_scheme: ibsr2_prsd,
            layout: TableLayout::Prediction {
                rows: vec![
                    PredictionRow { label: "1 (optimized)", scheme: RelaxScheme::ibsr(1.6, 0.8, 1.0, 1), mu: 0.714, rho: 0.714 },
                    PredictionRow { label: "1", scheme: RelaxScheme::ibsr(1.2, 16.0 / 15.0, 1.0, 1), mu: 0.718, rho: 1.027 },
                    PredictionRow { label: "2 (optimized)", scheme: RelaxScheme::ibsr(1.2, 0.9, 1.2, 2), mu: 0.494, rho: 0.445 },
                    PredictionRow { label: "2", scheme: RelaxScheme::ibsr(1.2, 16.0 / 15.0, 1.0, 2), mu: 0.431, rho: 0.549 },
                ],
            },
        },
        TableSpec {
            id: "prsd-ibsr2-tg",
            caption: "Two-grid, IBSR with 2 Jacobi sweeps, PrSD, rediscretization",
            disc: PrSD,
            scheme: ibsr2_prsd,
            lfa_scheme: ibsr2_prsd,
            layout: measured(
                TwoGrid,
                [0.445, 0.445, 0.319, 0.262, 0.262, 0.225],
                [0.418, 0.420, 0.301, 0.251, 0.250, 0.212],
                [0.420, 0.420, 0.304, 0.250, 0.249, 0.212],
            ),
        },
        TableSpec {
            id: "prsd-ibsr2-w",
            caption: "W-cycles, IBSR with 2 Jacobi sweeps, PrSD, rediscretization",
            disc: PrSD,
            scheme: ibsr2_prsd,
            lfa_scheme: ibsr2_prsd,
            layout: measured(
                W,
                [0.445, 0.445, 0.319, 0.262, 0.262, 0.225],
                [0.739, 0.740, 0.340, 0.304, 0.299, 0.268],
                [0.736, 0.735, 0.342, 0.309, 0.311, 0.276],
            ),
        },
        TableSpec {
            id: "prsd-ibsr-innerw",
            caption: "W-cycles, IBSR with inner W(1,1) cycles, PrSD, rediscretization",
            disc: PrSD,
            scheme: RelaxScheme::ibsr_inner(1.2, 16.0 / 15.0, 1.1, 1),
            lfa_scheme: bsr_prsd,
            layout: TableLayout::Measured {
                cycle: W,
                lfa: [0.673, 0.673, 0.111, 0.079, 0.079, 0.062],
                measured: [
                    values([0.680, 0.677, 0.112, 0.075, 0.075, 0.059]),
                    values([0.659, 0.662, 0.112, 0.075, 0.075, 0.067]),
                ],
                inner_cycles: Some([[4, 1, 3, 2, 2, 1], [1, 1, 3, 2, 2, 1]]),
            },
        },
        TableSpec {
            id: "q2q1-ibsr2",
            caption: "W-cycles, IBSR with 2 Jacobi sweeps, Q2-Q1, rediscretization",
            disc: Q2Q1,
            scheme: RelaxScheme::ibsr(1.1, 1.05, 1.0, 2),
            lfa_scheme: bsr_q2,
            layout: TableLayout::Measured {
                cycle: W,
                lfa: q2_lfa,
                measured: [
                    [
                        Reference::Divergent,
                        Reference::Divergent,
                        Reference::Value(0.434),
                        Reference::Value(0.131),
                        Reference::Value(0.130),
                        Reference::Value(0.085),
                    ],
                    [
                        Reference::Divergent,
                        Reference::Divergent,
                        Reference::Value(0.437),
                        Reference::Value(0.130),
                        Reference::Value(0.130),
                        Reference::Value(0.085),
                    ],
                ],
                inner_cycles: None,
            },
        },
        TableSpec {
            id: "q2q1-ibsr3",
            caption: "W-cycles, IBSR with 3 Jacobi sweeps, Q2-Q1, rediscretization",
            disc: Q2Q1,
            scheme: RelaxScheme::ibsr(1.1, 1.05, 1.0, 3),
            lfa_scheme: bsr_q2,
            layout: TableLayout::Measured {
                cycle: W,
                lfa: q2_lfa,
                measured: [
                    values([491.373, 492.094, 0.240, 0.104, 0.104, 0.085]),
                    [
                        Reference::Divergent,
                        Reference::Divergent,
                        Reference::Value(0.240),
                        Reference::Value(0.104),
                        Reference::Value(0.104),
                        Reference::Value(0.085),
                    ],
                ],
                inner_cycles: None,
            },
        },
    ]
}

pub fn table(id: &str) -> Result<TableSpec> {
    tables().into_iter().find(|t| t.id == id).ok_or_else(|| Error::UnknownTable(id.to_string()))
}

/// Options for regenerating a table.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRun {
    pub sizes: Vec<usize>,
    pub k: usize,
    pub seed: u64,
    pub coarsening: Coarsening,
}

impl Default for TableRun {
    fn default() -> Self {
        TableRun { sizes: SIZES.to_vec(), k: 100, seed: 1, coarsening: Coarsening::Rediscretize }
    }
}

impl TableSpec {
    /// The measurements this table calls for, one per (size, column).
    pub fn experiments(&self, run: &TableRun) -> Vec<Experiment> {
        let TableLayout::Measured { cycle, measured, inner_cycles, .. } = &self.layout else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for &n in &run.sizes {
            let row = SIZES.iter().position(|&s| s == n);
            for (c, &(nu1, nu2)) in COLUMNS.iter().enumerate() {
                let mut scheme = self.scheme;
                if let (Some(counts), Some(r)) = (inner_cycles, row) {
                    scheme.params.inner_cycles = counts[r][c];
                }
                out.push(Experiment {
                    id: self.id.to_string(),
                    disc: self.disc,
                    scheme,
                    lfa_scheme: self.lfa_scheme,
                    cycle: CycleSpec::new(*cycle, nu1, nu2, run.coarsening),
                    n,
                    k: run.k,
                    seed: run.seed,
                    reference: row.map(|r| measured[r][c]),
                });
            }
        }
        out
    }

    /// Predicted two-grid factor per column at `h = 1/128`.
    pub fn predictions(&self, coarsening: Coarsening) -> Result<Vec<f64>> {
        COLUMNS
            .iter()
            .map(|&(nu1, nu2)| {
                predicted_factor(self.disc, &self.lfa_scheme, &CycleSpec::new(CycleKind::TwoGrid, nu1, nu2, coarsening))
            })
            .collect()
    }

    /// Regenerates the table; `progress` sees each row as it completes.
    pub fn run(&self, run: &TableRun, mut progress: impl FnMut(&ResultRow)) -> Result<Vec<ResultRow>> {
        let mut rows = Vec::new();
        match &self.layout {
            TableLayout::Prediction { rows: spec_rows } => {
                for r in spec_rows {
                    let start = Instant::now();
                    let spec = spec_for(self.disc, LFA_H);
                    let mu = smoothing_factor(&r.scheme, &spec, LFA_SAMPLES)?.factor;
                    let cycle = CycleSpec::new(CycleKind::TwoGrid, 1, 0, run.coarsening);
                    let rho = predicted_factor(self.disc, &r.scheme, &cycle)?;
                    let row = ResultRow {
                        id: self.id.to_string(),
                        n: (1.0 / LFA_H).round() as usize,
                        cycle: cycle.label(),
                        nu1: 1,
                        nu2: 0,
                        rho_hat: None,
                        rho_lfa: Some(rho),
                        wall_time_s: start.elapsed().as_secs_f64(),
                        label: r.label.to_string(),
                        scheme: r.scheme.describe(),
                        diverged: false,
                        mu: Some(mu),
                        reference: Some(r.rho),
                        reference_divergent: false,
                        flag: (rho - r.rho).abs() > DEVIATION_FLAG || (mu - r.mu).abs() > DEVIATION_FLAG,
                    };
                    progress(&row);
                    rows.push(row);
                }
            }
            TableLayout::Measured { .. } => {
                let predicted = self.predictions(run.coarsening)?;
                for (i, e) in self.experiments(run).iter().enumerate() {
                    let row = run_experiment(e, Some(predicted[i % COLUMNS.len()]))?;
                    progress(&row);
                    rows.push(row);
                }
            }
        }
        Ok(rows)
    }
}

/// Writes rows as CSV, preceded by `#` comment lines.
pub fn write_results<W: Write>(mut w: W, comments: &[String], rows: &[ResultRow], header: bool) -> Result<()> {
    for c in comments {
        writeln!(w, "# {c}")?;
    }
    let mut wr = csv::WriterBuilder::new().has_headers(header).from_writer(w);
    for r in rows {
        wr.serialize(r)?;
    }
    wr.flush()?;
    Ok(())
}

/// Appends rows to a results file, writing comments and the header only when
/// the file is new or empty.
pub fn append_results(path: &Path, comments: &[String], rows: &[ResultRow]) -> Result<()> {
    let fresh = std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let f = std::fs::OpenOptions::new().create(true).append(true).open(path)?;
    if fresh {
        write_results(f, comments, rows, true)
    } else {
        write_results(f, &[], rows, false)
    }
}

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use stokes_lfa::experiment::{self, Experiment, ExperimentFile, ResultRow, TableLayout, TableRun};
use stokes_lfa::lfa::{
    optimize_params, parameter_sweep, smoothing_factor, theorem_optima, two_grid_factor, two_grid_spectrum, Coarsening,
    Objective, OptimizeOptions, ParamAxis, ParamLink, TwoGridSpec,
};
use stokes_lfa::mgsolver::{cost_model, relative_efficiency, CycleKind, CycleSpec};
use stokes_lfa::relaxation::{Param, RelaxScheme, SchemeKind};
use stokes_lfa::{Discretization, DiscretizationSpec, Error};

#[derive(Parser)]
#[command(name = "stokes-lfa", version, about = "Fourier analysis and periodic multigrid for Stokes block relaxation")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// LFA smoothing factor
    Smooth(SmoothArgs),
    /// LFA two-grid convergence factor, optionally with its spectrum or a parameter sweep
    Twogrid(TwoGridArgs),
    /// Brute-force parameter optimization of the smoothing or two-grid factor
    Optimize(OptimizeArgs),
    /// Measured multigrid convergence from flags or a TOML config
    Solve(SolveArgs),
    /// Regenerate one published table
    Table(TableArgs),
    /// Catalog of published tables
    Tables {
        #[command(subcommand)]
        cmd: TablesCommand,
    },
    /// Per-sweep cost model and efficiency comparison
    Cost,
}

#[derive(Subcommand)]
enum TablesCommand {
    List,
}

#[derive(Args, Clone)]
struct SchemeArgs {
    #[arg(long, default_value = "posd", value_parser = parse::<Discretization>)]
    disc: Discretization,
    #[arg(long, default_value = "bsr", value_parser = parse::<SchemeKind>)]
    scheme: SchemeKind,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    alpha1: Option<f64>,
    #[arg(long)]
    alpha2: Option<f64>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    omega_j: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    /// Jacobi sweeps on the Schur complement (ibsr)
    #[arg(long)]
    sweeps: Option<usize>,
    /// Nested W(1,1) cycles on the Schur complement (ibsr, solver only)
    #[arg(long)]
    inner_cycles: Option<usize>,
    /// Start from the closed-form optimal parameters
    #[arg(long)]
    optimal: bool,
}

impl SchemeArgs {
    fn scheme(&self) -> Result<RelaxScheme<f64>, Error> {
        let base = if self.optimal {
            theorem_optima(self.disc, self.scheme)?.witness
        } else {
            RelaxScheme::new(self.scheme)
        };
        let s = experiment::ParamValues {
            alpha: self.alpha,
            alpha1: self.alpha1,
            alpha2: self.alpha2,
            omega: self.omega,
            omega_j: self.omega_j,
            delta: self.delta,
            sigma: self.sigma,
            sweeps: self.sweeps,
            inner_cycles: self.inner_cycles,
        }
        .apply(base);
        s.validate()?;
        Ok(s)
    }
}

#[derive(Args)]
struct SmoothArgs {
    #[command(flatten)]
    scheme: SchemeArgs,
    /// Mesh size `n` (h = 1/n)
    #[arg(long, default_value_t = 128)]
    n: usize,
    /// Frequency samples per direction
    #[arg(long, default_value_t = 128)]
    samples: usize,
}

#[derive(Args)]
struct CycleArgs {
    #[arg(long, default_value_t = 1)]
    nu1: usize,
    #[arg(long, default_value_t = 0)]
    nu2: usize,
    #[arg(long, default_value = "redisc", value_parser = parse::<Coarsening>)]
    coarsen: Coarsening,
}

#[derive(Args)]
struct TwoGridArgs {
    #[command(flatten)]
    scheme: SchemeArgs,
    #[command(flatten)]
    cycle: CycleArgs,
    #[arg(long, default_value_t = 128)]
    n: usize,
    #[arg(long, default_value_t = 64)]
    samples: usize,
    /// Write every two-grid eigenvalue to this CSV
    #[arg(long)]
    spectrum: Option<PathBuf>,
    /// Sweep two parameters, e.g. `alpha,omega`; needs --x-range, --y-range and --out
    #[arg(long, value_delimiter = ',')]
    sweep: Option<Vec<String>>,
    /// `lo:hi:step` for the first swept parameter
    #[arg(long)]
    x_range: Option<String>,
    /// `lo:hi:step` for the second swept parameter
    #[arg(long)]
    y_range: Option<String>,
    /// Tie a parameter to another during a sweep, e.g. `omega=0.8889*alpha`
    #[arg(long)]
    link: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OptimizeArgs {
    #[command(flatten)]
    scheme: SchemeArgs,
    #[command(flatten)]
    cycle: CycleArgs,
    /// Optimize the smoothing factor instead of the two-grid factor
    #[arg(long)]
    smoothing: bool,
    /// Searched parameter as `name=lo:hi:step`; repeatable
    #[arg(long = "vary", required = true)]
    vary: Vec<String>,
    #[arg(long, default_value_t = 128)]
    n: usize,
    #[arg(long, default_value_t = 64)]
    samples: usize,
    /// Coarser sampling for the grid search; the best point is re-evaluated at --samples
    #[arg(long)]
    search_samples: Option<usize>,
    /// Step of a local refinement around the best grid point
    #[arg(long)]
    refine: Option<f64>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    scheme: SchemeArgs,
    #[command(flatten)]
    cycle: CycleArgs,
    #[arg(long = "cycle", default_value = "w", value_parser = parse::<CycleKind>)]
    cycle_kind: CycleKind,
    #[arg(long, default_value_t = 64)]
    n: usize,
    #[arg(long, default_value_t = 100)]
    k: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// TOML file with `[[experiment]]` entries; overrides the scheme flags
    #[arg(long)]
    config: Option<PathBuf>,
    /// Append results to this CSV
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TableArgs {
    id: String,
    /// Mesh sizes to measure
    #[arg(long, value_delimiter = ',', default_values_t = experiment::SIZES)]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    k: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value = "redisc", value_parser = parse::<Coarsening>)]
    coarsen: Coarsening,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse<T: std::str::FromStr<Err = Error>>(s: &str) -> Result<T, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::SingularSymbol { .. } | Error::Io(_) | Error::Csv(_) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = match cli.cmd {
        Command::Smooth(a) => cmd_smooth(a),
        Command::Twogrid(a) => cmd_twogrid(a),
        Command::Optimize(a) => cmd_optimize(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Table(a) => cmd_table(a),
        Command::Tables { cmd: TablesCommand::List } => cmd_tables_list(),
        Command::Cost => cmd_cost(),
    };
    match run {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn mesh(n: usize) -> Result<f64, Error> {
    if n == 0 {
        return Err(Error::BadGridSize(n));
    }
    Ok(1.0 / n as f64)
}

fn create(path: &Path, comments: &[String]) -> Result<BufWriter<File>, Error> {
    let mut w = BufWriter::new(File::create(path)?);
    for c in comments {
        writeln!(w, "# {c}")?;
    }
    Ok(w)
}

fn cmd_smooth(a: SmoothArgs) -> Result<u8, Error> {
    let scheme = a.scheme.scheme()?;
    let spec = DiscretizationSpec::new(a.scheme.disc, mesh(a.n)?);
    let r = smoothing_factor(&scheme, &spec, a.samples)?;
    println!("disc: {}  h: 1/{}  samples: {}", a.scheme.disc, a.n, a.samples);
    println!("scheme: {}", scheme.describe());
    println!("mu = {:.6}  at theta = ({:.6}, {:.6})", r.factor, r.argmax_theta.theta1, r.argmax_theta.theta2);
    Ok(0)
}

fn parse_range(param: Param, s: &str) -> Result<ParamAxis<f64>, Error> {
    let v: Vec<f64> = s
        .split(':')
        .map(|t| t.trim().parse::<f64>().map_err(|_| usage(format!("bad range `{s}`, expected lo:hi:step"))))
        .collect::<Result<_, _>>()?;
    match v.as_slice() {
        [x] => Ok(ParamAxis::fixed(param, *x)),
        [lo, hi, step] if *step > 0.0 && lo <= hi => Ok(ParamAxis::new(param, *lo, *hi, *step)),
        _ => Err(usage(format!("bad range `{s}`, expected lo:hi:step"))),
    }
}

fn parse_link(s: &str) -> Result<ParamLink<f64>, Error> {
    let bad = || usage(format!("bad link `{s}`, expected target=factor*source"));
    let (target, rhs) = s.split_once('=').ok_or_else(bad)?;
    let (factor, source) = rhs.split_once('*').ok_or_else(bad)?;
    Ok(ParamLink { target: target.parse()?, source: source.parse()?, factor: factor.trim().parse().map_err(|_| bad())? })
}

fn cmd_twogrid(a: TwoGridArgs) -> Result<u8, Error> {
    let scheme = a.scheme.scheme()?;
    let spec = DiscretizationSpec::new(a.scheme.disc, mesh(a.n)?);
    let tg = TwoGridSpec::new(a.cycle.nu1, a.cycle.nu2, a.cycle.coarsen, a.samples);
    let header = vec![
        format!("disc={} h=1/{} samples={}", a.scheme.disc, a.n, a.samples),
        format!("scheme: {}", scheme.describe()),
        format!("cycle: TG({},{}) coarsening={}", tg.nu1, tg.nu2, tg.coarsening),
    ];
    if let Some(names) = &a.sweep {
        if names.len() != 2 {
            return Err(usage("--sweep takes two parameter names, e.g. alpha,omega"));
        }
        let (Some(xr), Some(yr), Some(out)) = (&a.x_range, &a.y_range, &a.out) else {
            return Err(usage("--sweep needs --x-range, --y-range and --out"));
        };
        let x = parse_range(names[0].parse()?, xr)?;
        let y = parse_range(names[1].parse()?, yr)?;
        let link = a.link.as_deref().map(parse_link).transpose()?;
        let grid = parameter_sweep(&scheme, &spec, &tg, x, y, link)?;
        let mut w = csv::Writer::from_writer(create(out, &header)?);
        w.write_record([grid.x.param.name(), grid.y.param.name(), "rho"])?;
        for (j, yv) in grid.ys.iter().enumerate() {
            for (i, xv) in grid.xs.iter().enumerate() {
                w.write_record([xv.to_string(), yv.to_string(), grid.values[j][i].to_string()])?;
            }
        }
        w.flush()?;
        println!("wrote {}x{} sweep to {}", grid.xs.len(), grid.ys.len(), out.display());
        return Ok(0);
    }
    let r = two_grid_factor(&scheme, &spec, &tg)?;
    for h in &header {
        println!("{h}");
    }
    println!("rho = {:.6}  at theta = ({:.6}, {:.6})", r.factor, r.argmax_theta.theta1, r.argmax_theta.theta2);
    if let Some(path) = &a.spectrum {
        let mut w = csv::Writer::from_writer(create(path, &header)?);
        w.write_record(["theta1", "theta2", "re", "im", "abs"])?;
        for (theta, eigs) in two_grid_spectrum(&scheme, &spec, &tg)? {
            for z in eigs {
                w.write_record([theta.theta1, theta.theta2, z.re, z.im, z.norm()].map(|v| v.to_string()))?;
            }
        }
        w.flush()?;
        println!("wrote spectrum to {}", path.display());
    }
    Ok(0)
}

fn cmd_optimize(a: OptimizeArgs) -> Result<u8, Error> {
    let scheme = a.scheme.scheme()?;
    let spec = DiscretizationSpec::new(a.scheme.disc, mesh(a.n)?);
    let grid = a
        .vary
        .iter()
        .map(|v| {
            let (name, range) = v.split_once('=').ok_or_else(|| usage(format!("bad --vary `{v}`, expected name=lo:hi:step")))?;
            parse_range(name.parse()?, range)
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let objective = if a.smoothing {
        Objective::Smoothing { samples: a.samples }
    } else {
        Objective::TwoGrid(TwoGridSpec::new(a.cycle.nu1, a.cycle.nu2, a.cycle.coarsen, a.samples))
    };
    let opts = OptimizeOptions { search_samples: a.search_samples, refine_step: a.refine };
    let r = optimize_params(&scheme, &spec, &objective, &grid, &opts)?;
    let what = if a.smoothing { "mu".to_string() } else { format!("rho TG({},{})", a.cycle.nu1, a.cycle.nu2) };
    println!("disc: {}  h: 1/{}  samples: {}", a.scheme.disc, a.n, a.samples);
    println!("best {what} = {:.6}", r.factor);
    println!("at: {}", r.params.describe());
    Ok(0)
}

fn describe_row(r: &ResultRow) -> String {
    let measured = match r.rho_hat {
        Some(v) if r.diverged => format!("diverged ({v:.3e})"),
        Some(v) => format!("{v:.3}"),
        None => "-".into(),
    };
    let lfa = r.rho_lfa.map_or("-".into(), |v| format!("{v:.3}"));
    let reference = if r.reference_divergent {
        "divergent".into()
    } else {
        r.reference.map_or("-".into(), |v| format!("{v:.3}"))
    };
    let mu = r.mu.map_or(String::new(), |v| format!("  mu {v:.3}"));
    let flag = if r.flag { "  *" } else { "" };
    format!(
        "{:<14} n={:<4} {:<8} rho_hat {:<22} rho_lfa {:<7} paper {:<9}{mu} [{:.1}s]{flag}",
        r.label, r.n, r.cycle, measured, lfa, reference, r.wall_time_s
    )
}

fn cmd_solve(a: SolveArgs) -> Result<u8, Error> {
    let experiments: Vec<Experiment> = match &a.config {
        Some(path) => ExperimentFile::load(path)?.experiment.iter().map(|c| c.resolve()).collect::<Result<_, _>>()?,
        None => {
            let scheme = a.scheme.scheme()?;
            vec![Experiment {
                id: "cli".into(),
                disc: a.scheme.disc,
                scheme,
                lfa_scheme: scheme,
                cycle: CycleSpec::new(a.cycle_kind, a.cycle.nu1, a.cycle.nu2, a.cycle.coarsen),
                n: a.n,
                k: a.k,
                seed: a.seed,
                reference: None,
            }]
        }
    };
    let mut rows = Vec::new();
    for e in &experiments {
        let row = experiment::run_experiment(e, None)?;
        println!("{}  {}  {}", e.id, e.scheme.describe(), describe_row(&row));
        rows.push(row);
    }
    if let Some(out) = &a.out {
        let comments = experiments
            .iter()
            .map(|e| format!("{}: disc={} {} cycle={} n={} k={} seed={}", e.id, e.disc, e.scheme.describe(), e.cycle.label(), e.n, e.k, e.seed))
            .collect::<Vec<_>>();
        experiment::append_results(out, &comments, &rows)?;
    }
    Ok(0)
}

fn cmd_table(a: TableArgs) -> Result<u8, Error> {
    let t = experiment::table(&a.id)?;
    let run = TableRun { sizes: a.sizes, k: a.k, seed: a.seed, coarsening: a.coarsen };
    let comments = vec![
        format!("table {}: {}", t.id, t.caption),
        format!("disc={} scheme: {}", t.disc, t.scheme.describe()),
        format!("prediction scheme: {}", t.lfa_scheme.describe()),
        format!("coarsening={} k={} seed={} lfa_h=1/128 lfa_samples={}", run.coarsening, run.k, run.seed, experiment::LFA_SAMPLES),
    ];
    for c in &comments {
        println!("# {c}");
    }
    let rows = t.run(&run, |r| println!("{}", describe_row(r)))?;
    let flagged = rows.iter().filter(|r| r.flag).count();
    if let TableLayout::Measured { .. } = t.layout {
        println!("{flagged} of {} rows deviate from the two-grid prediction by more than {}", rows.len(), experiment::DEVIATION_FLAG);
    }
    if let Some(out) = &a.out {
        experiment::write_results(File::create(out)?, &comments, &rows, true)?;
    }
    Ok(0)
}

fn cmd_tables_list() -> Result<u8, Error> {
    for t in experiment::tables() {
        println!("{:<18} {}", t.id, t.caption);
    }
    Ok(0)
}

fn cmd_cost() -> Result<u8, Error> {
    let dwj1 = cost_model(&RelaxScheme::dwj1(1.451, 1.0, 1.29))?;
    let dwj2 = cost_model(&RelaxScheme::dwj2(1.5, 1.0, 4.0 / 3.0))?;
    let ibsr = cost_model(&RelaxScheme::ibsr_inner(1.0, 8.0 / 9.0, 1.0, 2))?;
    let uzawa = cost_model(&RelaxScheme::uzawa_diag(1.0, 1.0, 1.0))?;
    println!("multiply-adds per sweep per point (residual + relaxation):");
    for (name, c) in [("dwj1", dwj1), ("dwj2", dwj2), ("ibsr, 2 inner W(1,1)", ibsr), ("uzawa-diag", uzawa)] {
        println!("  {name:<22} {:>4} = {} + {}", c.multiply_adds_per_sweep_per_point, c.residual, c.relaxation);
    }
    // work ratios are quoted rounded, as are the per-cycle factors
    println!("effective factors rho^(1/W):");
    for (label, rho, w) in [
        ("dwj1 vs uzawa, PoSD", 0.35, 4.0 / 3.0),
        ("dwj1 vs uzawa, PrSD", 0.44, 4.0 / 3.0),
        ("dwj2 vs uzawa", 0.11, 2.0),
        ("dwj2 vs dwj1", 0.11, 1.5),
        ("ibsr vs uzawa", 0.11, 3.6),
    ] {
        println!("  {label:<22} {rho}^(1/{w:.2}) = {:.3}", relative_efficiency(rho, w));
    }
    println!("exact work ratios: dwj1/uzawa {:.3}, dwj2/uzawa {:.3}, dwj2/dwj1 {:.3}, ibsr/uzawa {:.3}",
        dwj1.work_ratio(&uzawa), dwj2.work_ratio(&uzawa), dwj2.work_ratio(&dwj1), ibsr.work_ratio(&uzawa));
    Ok(0)
}

//! Command-line front end.

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::Vector3;
use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::dynamics::{integrate_until, sweep_traveltime, GradientMode, Outcome, SweepSettings, Trajectory};
use crate::error::Error;
use crate::meanfield::PhaseState;
use crate::observables::{density_grid, detect, quadrupole_tensor, quadrupole_timeseries, Plane};
use crate::oracle::suite::{bundled_draws, read_draws, run_suite};
use crate::pairstate::{ExchangeSymmetry, PairConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

pub const SIMULATE_HEADER: &str = "t,rx,ry,rz,px,py,pz,sigma_t,overlap,E_total,E_coul,Dxx,Dyy,Dzz,Dxz";
pub const SWEEP_HEADER: &str = "p,t_coherent,t_classical,t_free,regime";
pub const QUADRUPOLE_HEADER: &str = "t,Dxx,Dyy,Dzz,Dxz,verdict";

#[derive(Debug, Parser)]
#[command(name = "coherent-pair", version, about = "Mean-field central impact of two coherent electrons")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate one trajectory and write every sample as CSV.
    Simulate(RunArgs),
    /// Traveltime against the classical and free baselines over a momentum grid.
    SweepTraveltime(SweepArgs),
    /// Quadrupole tensor time series with the monotone/oscillatory verdict.
    Quadrupole(RunArgs),
    /// One-particle density maps on a coordinate plane.
    Density(DensityArgs),
    /// Run the quadrature oracles on the parameter draws.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpinArg {
    Parallel,
    Antiparallel,
    Distinguishable,
}

impl From<SpinArg> for ExchangeSymmetry {
    fn from(s: SpinArg) -> Self {
        match s {
            SpinArg::Parallel => ExchangeSymmetry::Antisymmetric,
            SpinArg::Antiparallel => ExchangeSymmetry::Symmetric,
            SpinArg::Distinguishable => ExchangeSymmetry::Distinguishable,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GradientArg {
    Numeric,
    Analytic,
}

impl From<GradientArg> for GradientMode {
    fn from(g: GradientArg) -> Self {
        match g {
            GradientArg::Numeric => GradientMode::Numeric,
            GradientArg::Analytic => GradientMode::Analytic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlaneArg {
    Xz,
    Xy,
    Yz,
}

impl From<PlaneArg> for Plane {
    fn from(p: PlaneArg) -> Self {
        match p {
            PlaneArg::Xz => Plane::Xz,
            PlaneArg::Xy => Plane::Xy,
            PlaneArg::Yz => Plane::Yz,
        }
    }
}

/// Pair parameters shared by all runs.
#[derive(Debug, Clone, Args)]
pub struct PairArgs {
    /// Packet width at the culmination moment.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub sigma: f64,
    /// Initial half-separation along z.
    #[arg(long, default_value_t = 5.0, allow_hyphen_values = true)]
    pub r0: f64,
    #[arg(long, value_enum, default_value_t = SpinArg::Antiparallel)]
    pub spin: SpinArg,
    /// Scale of the Coulomb interaction; 0 gives free packets.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub coupling: f64,
    /// Keep the packet width fixed at sigma.
    #[arg(long)]
    pub frozen_width: bool,
    #[arg(long, value_enum, default_value_t = GradientArg::Numeric)]
    pub gradient: GradientArg,
}

impl PairArgs {
    fn config(&self, p0: Vector3<f64>) -> crate::Result<PairConfig> {
        let mut config = PairConfig::new(self.sigma, Vector3::new(0.0, 0.0, self.r0), p0, self.spin.into())?
            .with_coupling(self.coupling);
        if self.frozen_width {
            config = config.frozen();
        }
        config.validate()?;
        Ok(config)
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    /// Momentum of the packet at +r0, x component.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub px: f64,
    /// Momentum of the packet at +r0, z component; negative is inward.
    #[arg(long, default_value_t = -0.3, allow_hyphen_values = true)]
    pub pz: f64,
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
    #[arg(long, default_value_t = 100.0)]
    pub t_max: f64,
    /// Output file; standard output when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    #[arg(long)]
    pub p_min: f64,
    #[arg(long)]
    pub p_max: f64,
    /// Number of grid points, endpoints included; 1 uses p_min only.
    #[arg(long)]
    pub steps: usize,
    /// Step for every grid point; defaults to t_free/1000.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Horizon for every grid point; defaults to 50 t_free.
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct DensityArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, value_enum, default_value_t = PlaneArg::Xz)]
    pub plane: PlaneArg,
    /// Half-width of the square map.
    #[arg(long, default_value_t = 10.0)]
    pub extent: f64,
    #[arg(long, default_value_t = 64)]
    pub n: usize,
    /// Comma-separated sample times.
    #[arg(long, value_delimiter = ',', required = true)]
    pub times: Vec<f64>,
    /// Directory for the map files.
    #[arg(long, default_value = ".")]
    pub output_dir: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    /// Draw file; the bundled draws are used when omitted.
    #[arg(long)]
    pub seed_list: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Core(Error),
    Io(io::Error),
    Gate(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Core(Error::InvalidConfig(_)) => EXIT_USAGE,
            _ => EXIT_RUNTIME,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Io(e) => write!(f, "i/o error: {e}"),
            Failure::Gate(n) => write!(f, "{n} oracle check(s) above their gate"),
        }
    }
}

/// Decimal notation with 12 significant digits.
pub fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{:.11e}", v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let point = exp + 1;
    let body = if point <= 0 {
        format!("0.{}{}", "0".repeat((-point) as usize), digits)
    } else if point as usize >= digits.len() {
        format!("{}{}", digits, "0".repeat(point as usize - digits.len()))
    } else {
        let (int, frac) = digits.split_at(point as usize);
        format!("{int}.{frac}")
    };
    format!("{sign}{body}")
}

fn open_output(path: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run_trajectory(args: &RunArgs) -> Result<Trajectory, Failure> {
    let config = args.pair.config(Vector3::new(args.px, 0.0, args.pz))?;
    let traj = integrate_until(
        &PhaseState::initial(config),
        args.dt,
        args.t_max,
        args.pair.gradient.into(),
        |_| false,
    )?;
    Ok(traj)
}

fn simulate(args: &RunArgs) -> Result<(), Failure> {
    let traj = run_trajectory(args)?;
    let mut out = open_output(&args.output)?;
    writeln!(out, "{SIMULATE_HEADER}")?;
    for sample in &traj.samples {
        let d = quadrupole_tensor(&sample.state(traj.config))?;
        let cols = [
            sample.t,
            sample.r.x,
            sample.r.y,
            sample.r.z,
            sample.p.x,
            sample.p.y,
            sample.p.z,
            sample.sigma_t,
            sample.overlap,
            sample.energy.total,
            sample.energy.coulomb(),
            d.d_xx,
            d.d_yy,
            d.d_zz,
            d.d_xz,
        ];
        writeln!(out, "{}", cols.map(fmt_num).join(","))?;
    }
    out.flush()?;
    Ok(())
}

fn sweep_grid(args: &SweepArgs) -> Result<Vec<f64>, Failure> {
    if args.steps == 0 {
        return Err(Error::InvalidConfig("steps must be at least 1".into()).into());
    }
    if !(args.p_min > 0.0 && args.p_min < args.p_max && args.p_max.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "need 0 < p_min < p_max (got {} and {})",
            args.p_min, args.p_max
        ))
        .into());
    }
    if args.steps == 1 {
        return Ok(vec![args.p_min]);
    }
    let n = args.steps - 1;
    Ok((0..=n)
        .map(|i| args.p_min + (args.p_max - args.p_min) * i as f64 / n as f64)
        .collect())
}

fn sweep(args: &SweepArgs) -> Result<(), Failure> {
    let grid = sweep_grid(args)?;
    if args.jobs == 0 {
        return Err(Error::InvalidConfig("jobs must be at least 1".into()).into());
    }
    let config = args.pair.config(Vector3::new(0.0, 0.0, -1.0))?;
    let mut settings = SweepSettings::new(config);
    settings.dt = args.dt;
    settings.t_max = args.t_max;
    settings.mode = args.pair.gradient.into();
    let records = sweep_traveltime(&settings, &grid, args.jobs)?;
    let mut out = open_output(&args.output)?;
    writeln!(out, "{SWEEP_HEADER}")?;
    for rec in &records {
        let result = rec.result.as_ref().map_err(|e| Failure::Core(e.clone()))?;
        let t_coherent = match result.outcome {
            Outcome::Return(t) => fmt_num(t),
            Outcome::NoReturn => String::new(),
        };
        let regime = rec.regime.map(|r| r.label()).unwrap_or("noreturn");
        writeln!(
            out,
            "{},{},{},{},{}",
            fmt_num(rec.p),
            t_coherent,
            fmt_num(rec.t_classical),
            fmt_num(rec.t_free),
            regime
        )?;
    }
    out.flush()?;
    Ok(())
}

fn quadrupole(args: &RunArgs) -> Result<(), Failure> {
    let traj = run_trajectory(args)?;
    let series = quadrupole_timeseries(&traj)?;
    let verdict = detect(&series);
    let mut out = open_output(&args.output)?;
    writeln!(out, "{QUADRUPOLE_HEADER}")?;
    let last = series.len() - 1;
    for (i, (t, d)) in series.iter().enumerate() {
        let tag = if i == last { verdict.kind.label() } else { "" };
        writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt_num(*t),
            fmt_num(d.d_xx),
            fmt_num(d.d_yy),
            fmt_num(d.d_zz),
            fmt_num(d.d_xz),
            tag
        )?;
    }
    out.flush()?;
    Ok(())
}

/// File name of the `index`-th density map.
pub fn density_file(dir: &Path, index: usize) -> PathBuf {
    dir.join(format!("density_{index:03}.txt"))
}

fn density(args: &DensityArgs) -> Result<(), Failure> {
    let run = &args.run;
    let config = run.pair.config(Vector3::new(run.px, 0.0, run.pz))?;
    let initial = PhaseState::initial(config);
    if !(run.dt > 0.0 && run.dt.is_finite()) {
        return Err(Error::InvalidConfig(format!("dt must be positive, got {}", run.dt)).into());
    }
    for &t in &args.times {
        if !(t >= initial.t && t.is_finite()) {
            return Err(Error::InvalidConfig(format!("map times must be >= {}, got {t}", initial.t)).into());
        }
    }
    std::fs::create_dir_all(&args.output_dir)?;
    for (index, &t) in args.times.iter().enumerate() {
        let span = t - initial.t;
        let state = if span == 0.0 {
            initial
        } else {
            let dt = run.dt.min(0.5 * span);
            let traj = integrate_until(&initial, dt, t, run.pair.gradient.into(), |_| false)?;
            traj.last().state(config)
        };
        let grid = density_grid(&state, args.plane.into(), args.extent, args.n)?;
        let mut out = BufWriter::new(File::create(density_file(&args.output_dir, index))?);
        writeln!(out, "# t={} extent={} n={}", t, args.extent, args.n)?;
        for i in 0..grid.n {
            let row: Vec<String> = grid.row(i).iter().map(|&v| fmt_num(v)).collect();
            writeln!(out, "{}", row.join(" "))?;
        }
        out.flush()?;
    }
    Ok(())
}

fn validate(args: &ValidateArgs) -> Result<(), Failure> {
    let draws = match &args.seed_list {
        Some(path) => read_draws(File::open(path)?)?,
        None => bundled_draws(),
    };
    let checks = run_suite(&draws)?;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let mut failed = 0;
    for c in &checks {
        let status = if !c.report.applicable {
            "SKIP"
        } else if c.passed() {
            "PASS"
        } else {
            failed += 1;
            "FAIL"
        };
        writeln!(
            out,
            "{status} {} analytic={} numeric={} rel_err={:.3e} gate={:.0e} nodes={}",
            c.label, c.report.analytic, c.report.numeric, c.report.rel_err, c.gate, c.report.nodes_used
        )?;
    }
    writeln!(out, "{} checks, {} failed", checks.len(), failed)?;
    if failed > 0 {
        return Err(Failure::Gate(failed));
    }
    Ok(())
}

/// Parse `args` (program name first), run, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match &cli.command {
        Command::Simulate(a) => simulate(a),
        Command::SweepTraveltime(a) => sweep(a),
        Command::Quadrupole(a) => quadrupole(a),
        Command::Density(a) => density(a),
        Command::Validate(a) => validate(a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

//! Command-line front end.
//!
//! Every subcommand writes its CSV/JSON outputs into the output directory
//! (`--out`, overridden by `RKL_OUT`) together with `manifest.json`, which
//! records the parsed arguments, the crate version and the wall time.
//!
//! Exit codes: 0 success, 1 a checked property failed, 2 bad parameters or
//! usage, 3 numerical-stability abort.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::equilibrium::{min_re_xi_on_ellipse, verify_variational, EquilibriumParams};
use crate::expfield::expfield_sweep;
use crate::numerics::parse_grid;
use crate::orthopoly::{stieltjes_checked, KernelGrid};
use crate::pointconf::{
    check_assumptions, default_s_grid, make_jittered_config, make_lattice_config,
    PointConfiguration,
};
use crate::sampler::{default_order, sample_sine_dpp, to_configuration};
use crate::universality::{default_quad_order, run_universality, GridSpec, Scaling};
use crate::weights::{JacobiExponent, WeightSpec};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_PARAMETER: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Parser, Debug, Serialize)]
#[command(
    name = "rkl",
    version,
    about = "Conditional orthogonal polynomial ensembles and sine-kernel universality"
)]
pub struct Cli {
    /// Output directory; the RKL_OUT environment variable takes precedence.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Also write a gnuplot script for the produced CSV files.
    #[arg(long, global = true)]
    pub gnuplot: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
pub enum Command {
    /// Generate a point configuration.
    Gen(GenArgs),
    /// Check the standing assumptions on a configuration.
    Check(CheckArgs),
    /// Tabulate a weight on a grid.
    Weight(WeightCmd),
    /// Recurrence coefficients of a weight.
    Opoly(OpolyArgs),
    /// Christoffel–Darboux kernel of a weight on a tensor grid.
    Kernel(KernelArgs),
    /// Equilibrium density, variational check and phase bound.
    Equilibrium(EquilibriumArgs),
    /// Convergence of the rescaled kernel to the sine kernel.
    Universality(UniversalityArgs),
    /// Bulk scaling of the exponential field weights.
    Prop4(Prop4Args),
}

#[derive(Args, Debug, Serialize)]
#[group(required = true, multiple = false, id = "kind")]
pub struct GenKind {
    /// Shifted integer lattice.
    #[arg(long)]
    pub lattice: bool,
    /// Randomly perturbed half-integer lattice.
    #[arg(long)]
    pub jitter: bool,
    /// Finite-window sine-process sample with a lattice tail.
    #[arg(long)]
    pub dpp: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct GenArgs {
    #[command(flatten)]
    pub kind: GenKind,
    /// Window radius for --lattice / --jitter.
    #[arg(short = 'S', long = "window", default_value_t = 100.0)]
    pub window: f64,
    #[arg(long, default_value_t = 0.5)]
    pub shift: f64,
    #[arg(long, default_value_t = 0.3)]
    pub amplitude: f64,
    #[arg(long, default_value_t = 0.4)]
    pub exponent: f64,
    /// Sampling half-width for --dpp.
    #[arg(short = 'L', long = "half-width", default_value_t = 50.0)]
    pub half_width: f64,
    /// Discretization order for --dpp (default 8 per unit length).
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Destination file; relative paths resolve against the working directory.
    #[arg(short = 'o', long = "output")]
    pub output: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct CheckArgs {
    pub config: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
pub enum WeightKind {
    #[value(name = "rho_R")]
    RhoR,
    #[value(name = "w_R")]
    WR,
    #[value(name = "comp+")]
    CompPlus,
    #[value(name = "comp-")]
    CompMinus,
    #[value(name = "expfield")]
    ExpField,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
pub enum ExponentArg {
    #[value(name = "+")]
    Plus,
    #[value(name = "-")]
    Minus,
}

impl From<ExponentArg> for JacobiExponent {
    fn from(e: ExponentArg) -> Self {
        match e {
            ExponentArg::Plus => JacobiExponent::PlusHalf,
            ExponentArg::Minus => JacobiExponent::MinusHalf,
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct WeightSelect {
    #[arg(long = "weight", visible_alias = "spec", value_enum)]
    pub kind: WeightKind,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub eps: f64,
    #[arg(long = "R")]
    pub r: Option<f64>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Endpoint exponent of the exponential field weight.
    #[arg(
        long = "exp",
        value_enum,
        default_value = "-",
        allow_hyphen_values = true
    )]
    pub exponent: ExponentArg,
}

impl WeightSelect {
    fn build(&self, n: usize) -> Result<WeightSpec> {
        let alpha = || {
            self.alpha
                .ok_or_else(|| Error::param(format!("--alpha is required for {:?}", self.kind)))
        };
        let spec = match self.kind {
            WeightKind::RhoR | WeightKind::WR => {
                let path = self
                    .config
                    .as_ref()
                    .ok_or_else(|| Error::param("--config is required for rho_R / w_R"))?;
                let r = self
                    .r
                    .ok_or_else(|| Error::param("--R is required for rho_R / w_R"))?;
                let config = Arc::new(PointConfiguration::read_from(path)?);
                if self.kind == WeightKind::RhoR {
                    WeightSpec::RhoR { config, r }
                } else {
                    WeightSpec::WR { config, r }
                }
            }
            WeightKind::CompPlus => WeightSpec::ComparisonPlus {
                alpha: alpha()?,
                eps: self.eps,
                n,
            },
            WeightKind::CompMinus => WeightSpec::ComparisonMinus {
                alpha: alpha()?,
                eps: self.eps,
                n,
            },
            WeightKind::ExpField => WeightSpec::ExpField {
                alpha: alpha()?,
                eps: self.eps,
                n,
                exponent: self.exponent.into(),
            },
        };
        spec.validated()
    }
}

#[derive(Args, Debug, Serialize)]
pub struct WeightCmd {
    #[command(flatten)]
    pub weight: WeightSelect,
    /// Size parameter of the field weights.
    #[arg(short = 'N', long = "N", default_value_t = 20)]
    pub n: usize,
    /// Sample points `a:b:n`.
    #[arg(long, default_value = "-1:1:201", allow_hyphen_values = true)]
    pub grid: String,
}

#[derive(Args, Debug, Serialize)]
pub struct OpolyArgs {
    #[command(flatten)]
    pub weight: WeightSelect,
    #[arg(short = 'N', long = "N")]
    pub n: usize,
    /// Quadrature order (default max(4N, 256)).
    #[arg(long)]
    pub order: Option<usize>,
}

#[derive(Args, Debug, Serialize)]
pub struct KernelArgs {
    #[command(flatten)]
    pub weight: WeightSelect,
    #[arg(short = 'N', long = "N")]
    pub n: usize,
    #[arg(long, default_value = "-0.5:0.5:21", allow_hyphen_values = true)]
    pub grid: String,
    /// Omit the weight factors.
    #[arg(long)]
    pub hat: bool,
    #[arg(long)]
    pub order: Option<usize>,
}

#[derive(Args, Debug, Serialize)]
pub struct EquilibriumArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub eps: f64,
    /// Fail (exit 1) unless the variational conditions hold to 1e-6.
    #[arg(long)]
    pub verify: bool,
    /// Also bound Re ξ on the ellipse of parameter --tau.
    #[arg(long)]
    pub xi: bool,
    #[arg(long, default_value_t = 1.05)]
    pub tau: f64,
    #[arg(long, default_value = "-0.99:0.99:199", allow_hyphen_values = true)]
    pub grid: String,
}

#[derive(Args, Debug, Serialize)]
pub struct UniversalityArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Comma-separated radii.
    #[arg(long = "R", default_value = "8,16,32,64")]
    pub radii: String,
    /// Half-width of the compact set.
    #[arg(short = 'A', long = "half-width", default_value_t = 2.0)]
    pub half_width: f64,
    #[arg(long, default_value_t = 41)]
    pub grid: usize,
    /// Use N = ⌊2R⌋ and the (2/N) scaling instead of N = N(R).
    #[arg(long)]
    pub thm13: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct Prop4Args {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub eps: f64,
    #[arg(long = "exp", value_enum, allow_hyphen_values = true)]
    pub exponent: ExponentArg,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub x0: f64,
    /// Comma-separated sizes.
    #[arg(short = 'N', long = "N", default_value = "20,40,80")]
    pub sizes: String,
    /// Microscopic test points `a:b:n`, used on both axes.
    #[arg(long, default_value = "-1:1:5", allow_hyphen_values = true)]
    pub grid: String,
}

#[derive(Serialize)]
struct Manifest<'a> {
    version: &'static str,
    argv: Vec<String>,
    args: &'a Cli,
    out_dir: String,
    threads: usize,
    outputs: Vec<String>,
    exit_code: i32,
    wall_ms: u128,
}

/// Collects output files and gnuplot lines for one run.
struct Run {
    dir: PathBuf,
    outputs: Vec<String>,
    plots: Vec<String>,
}

impl Run {
    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        fs::write(self.dir.join(name), contents)?;
        self.outputs.push(name.to_string());
        Ok(())
    }

    fn plot(&mut self, line: String) {
        self.plots.push(line);
    }
}

fn csv_field(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn parse_list<T: std::str::FromStr>(spec: &str, what: &str) -> Result<Vec<T>> {
    spec.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad {what} entry `{s}`")))
        })
        .collect()
}

/// Runs the command line `args` (including the program name) and returns the
/// process exit code.
pub fn dispatch<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_PARAMETER
            } else {
                EXIT_OK
            };
            let _ = e.print();
            return code;
        }
    };
    let start = Instant::now();
    if let Some(n) = cli.threads {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
    let dir = std::env::var_os("RKL_OUT")
        .map(PathBuf::from)
        .unwrap_or_else(|| cli.out.clone());
    let mut run = Run {
        dir: dir.clone(),
        outputs: Vec::new(),
        plots: Vec::new(),
    };
    let result = fs::create_dir_all(&dir)
        .map_err(Error::from)
        .and_then(|_| execute(&cli, &mut run));
    let code = match &result {
        Ok(code) => *code,
        Err(e) => {
            eprintln!("rkl: {e}");
            match e {
                Error::Numerical(_) => EXIT_NUMERICAL,
                _ => EXIT_PARAMETER,
            }
        }
    };
    if cli.gnuplot && !run.plots.is_empty() {
        let script = format!(
            "set datafile separator ','\nset key autotitle columnhead\n{}\n",
            run.plots.join("\n")
        );
        if let Err(e) = run.write("plot.gp", &script) {
            eprintln!("rkl: {e}");
        }
    }
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION"),
        argv: argv
            .iter()
            .map(|a| a.to_string_lossy().into_owned())
            .collect(),
        args: &cli,
        out_dir: dir.display().to_string(),
        threads: rayon::current_num_threads(),
        outputs: run.outputs.clone(),
        exit_code: code,
        wall_ms: start.elapsed().as_millis(),
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    if let Err(e) = fs::write(dir.join("manifest.json"), json + "\n") {
        eprintln!("rkl: cannot write manifest: {e}");
    }
    code
}

fn execute(cli: &Cli, run: &mut Run) -> Result<i32> {
    match &cli.command {
        Command::Gen(a) => gen(a),
        Command::Check(a) => check(a, run),
        Command::Weight(a) => weight(a, run),
        Command::Opoly(a) => opoly(a, run),
        Command::Kernel(a) => kernel(a, run),
        Command::Equilibrium(a) => equilibrium(a, run),
        Command::Universality(a) => universality(a, run),
        Command::Prop4(a) => prop4(a, run),
    }
}

fn gen(a: &GenArgs) -> Result<i32> {
    let config = if a.kind.lattice {
        make_lattice_config(a.window, a.shift)?
    } else if a.kind.jitter {
        make_jittered_config(a.window, a.amplitude, a.exponent, a.seed)?
    } else {
        let order = a.order.unwrap_or_else(|| default_order(a.half_width));
        to_configuration(&sample_sine_dpp(a.half_width, order, a.seed)?)?
    };
    write_config(&config, &a.output)?;
    println!(
        "wrote {} ({} window points)",
        a.output.display(),
        config.points().len()
    );
    Ok(EXIT_OK)
}

fn write_config(config: &PointConfiguration, path: &Path) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    config.write_to(path)
}

fn check(a: &CheckArgs, run: &mut Run) -> Result<i32> {
    let config = PointConfiguration::read_from(&a.config)?;
    let report = check_assumptions(&config, &default_s_grid(&config))?;
    run.write(
        "check.json",
        &(serde_json::to_string_pretty(&report).expect("serializes") + "\n"),
    )?;
    let mut csv = String::from("S,partial_sum\n");
    for (s, v) in &report.pv_partial_sums {
        writeln!(csv, "{s},{v}").unwrap();
    }
    run.write("check.csv", &csv)?;
    run.plot("set logscale x\nplot 'check.csv' using 1:2 with linespoints".into());
    println!(
        "monotone={} pv_converges={} ratio_ok={} (max |p_n/n - 1| = {})",
        report.monotone,
        report.pv_converges(),
        report.ratio_ok(),
        report.max_ratio_deviation
    );
    Ok(if report.passes() {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    })
}

fn weight(a: &WeightCmd, run: &mut Run) -> Result<i32> {
    use crate::orthopoly::Weight;
    let spec = a.weight.build(a.n)?;
    let mut csv = String::from("t,log_w,w\n");
    for t in parse_grid(&a.grid)? {
        // adding 0.0 turns -0 into 0
        let lw = spec.log_weight(t) + 0.0;
        writeln!(csv, "{t},{lw},{}", lw.exp()).unwrap();
    }
    run.write("weight.csv", &csv)?;
    run.plot("plot 'weight.csv' using 1:3 with lines".into());
    Ok(EXIT_OK)
}

fn opoly(a: &OpolyArgs, run: &mut Run) -> Result<i32> {
    let spec = a.weight.build(a.n)?;
    let order = a.order.unwrap_or_else(|| default_quad_order(a.n));
    let coeffs = stieltjes_checked(spec.into_weight(), a.n, order)?;
    let mut csv = String::from("k,a_k,b_k\n");
    for (k, (ak, bk)) in coeffs.a.iter().zip(&coeffs.b).enumerate() {
        writeln!(csv, "{k},{ak},{bk}").unwrap();
    }
    run.write("opoly.csv", &csv)?;
    run.plot("plot 'opoly.csv' using 1:2 with points, '' using 1:3 with points".into());
    if !coeffs.is_stable() {
        return Err(Error::numerical(format!(
            "coefficients moved by {:e} at doubled quadrature order",
            coeffs.stability.unwrap_or(f64::NAN)
        )));
    }
    Ok(EXIT_OK)
}

fn kernel(a: &KernelArgs, run: &mut Run) -> Result<i32> {
    let spec = a.weight.build(a.n)?;
    let order = a.order.unwrap_or_else(|| default_quad_order(a.n));
    let coeffs = stieltjes_checked(spec.into_weight(), a.n, order)?;
    if !coeffs.is_stable() {
        return Err(Error::numerical(
            "recurrence unstable under quadrature doubling",
        ));
    }
    let grid = parse_grid(&a.grid)?;
    let kg = KernelGrid::evaluate(&coeffs, a.n, &grid, &grid, !a.hat)?;
    let mut csv = String::from("x,y,K\n");
    for (x, row) in kg.x_grid.iter().zip(&kg.values) {
        for (y, v) in kg.y_grid.iter().zip(row) {
            writeln!(csv, "{x},{y},{v}").unwrap();
        }
    }
    run.write("kernel.csv", &csv)?;
    run.plot("splot 'kernel.csv' using 1:2:3 with points".into());
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct EquilibriumSummary {
    alpha: f64,
    eps: f64,
    normalization: f64,
    ell: f64,
    max_dev: f64,
    min_re_xi: Option<f64>,
    xi_lower_bound: Option<f64>,
}

fn equilibrium(a: &EquilibriumArgs, run: &mut Run) -> Result<i32> {
    let params = EquilibriumParams::new(a.alpha, a.eps)?;
    let grid = parse_grid(&a.grid)?;
    let report = verify_variational(&params, &grid)?;
    let mut csv = String::from("x,psi,2U_plus_V\n");
    for s in &report.grid {
        writeln!(csv, "{},{},{}", s.x, s.psi, s.two_u_plus_v).unwrap();
    }
    run.write("equilibrium.csv", &csv)?;
    run.plot("plot 'equilibrium.csv' using 1:2 with lines, '' using 1:3 with lines".into());
    let xi = if a.xi {
        Some(min_re_xi_on_ellipse(&params, a.tau)?)
    } else {
        None
    };
    let summary = EquilibriumSummary {
        alpha: a.alpha,
        eps: a.eps,
        normalization: report.normalization,
        ell: report.ell_estimate,
        max_dev: report.max_variational_deviation,
        min_re_xi: xi.as_ref().map(|x| x.min_re_xi),
        xi_lower_bound: xi.as_ref().map(|x| x.lower_bound),
    };
    let json = serde_json::to_string_pretty(&summary).expect("serializes");
    println!("{json}");
    run.write("equilibrium.json", &(json + "\n"))?;
    let mut ok = true;
    if a.verify {
        ok &= (report.normalization - 1.0).abs() < 1e-10 && report.max_variational_deviation < 1e-6;
    }
    if let Some(x) = &xi {
        ok &= x.positive() && x.bound_holds();
    }
    Ok(if ok { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn universality(a: &UniversalityArgs, run: &mut Run) -> Result<i32> {
    let config = Arc::new(PointConfiguration::read_from(&a.config)?);
    let radii: Vec<f64> = parse_list(&a.radii, "radius")?;
    let spec = GridSpec {
        half_width: a.half_width,
        grid_n: a.grid,
    };
    let scaling = if a.thm13 {
        Scaling::DoubleRadius
    } else {
        Scaling::CountPoints
    };
    let table = run_universality(config, &radii, spec, scaling, default_quad_order)?;
    let mut csv = String::from("R,N,eps_R,sup_error,diag_error,quad_order,wall_ms\n");
    for row in &table.rows {
        writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            row.r,
            row.n,
            row.eps_r,
            csv_field(row.sup_error),
            csv_field(row.diag_error),
            row.quad_order,
            row.wall_ms
        )
        .unwrap();
        if let Some(failure) = &row.failure {
            eprintln!("rkl: row R={} aborted: {failure}", row.r);
        }
        if let Some(kg) = &row.kernel {
            let reference = kg.reference.as_ref().expect("reference attached");
            let mut k = String::from("x,y,K,sine,abs_err\n");
            for i in 0..kg.x_grid.len() {
                for j in 0..kg.y_grid.len() {
                    let (v, s) = (kg.values[i][j], reference[i][j]);
                    writeln!(
                        k,
                        "{},{},{v},{s},{}",
                        kg.x_grid[i],
                        kg.y_grid[j],
                        (v - s).abs()
                    )
                    .unwrap();
                }
            }
            run.write(&format!("kernel_R{}.csv", row.r), &k)?;
        }
    }
    run.write("table.csv", &csv)?;
    run.plot("set logscale xy\nplot 'table.csv' using 1:4 with linespoints, '' using 1:5 with linespoints".into());
    print!("{csv}");
    Ok(if table.any_failed() {
        EXIT_NUMERICAL
    } else if table.strictly_decreasing() {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    })
}

fn prop4(a: &Prop4Args, run: &mut Run) -> Result<i32> {
    let params = EquilibriumParams::new(a.alpha, a.eps)?;
    let sizes: Vec<usize> = parse_list(&a.sizes, "size")?;
    let axis = parse_grid(&a.grid)?;
    let pairs: Vec<(f64, f64)> = axis
        .iter()
        .flat_map(|&x| axis.iter().map(move |&y| (x, y)))
        .collect();
    let samples = expfield_sweep(params, a.exponent.into(), a.x0, &sizes, &pairs)?;
    let mut csv = String::from("N,x,y,K,sine,abs_err\n");
    for s in &samples {
        writeln!(
            csv,
            "{},{},{},{},{},{}",
            s.n, s.x, s.y, s.kernel, s.sine, s.abs_err
        )
        .unwrap();
    }
    run.write("prop4.csv", &csv)?;
    run.plot("plot 'prop4.csv' using 1:6 with points".into());
    Ok(EXIT_OK)
}

//! The `hodokit` command-line tool.
//!
//! Exit codes: 0 ok, 1 verification failure, 2 domain error, 3 usage error,
//! 4 numerical failure.

use crate::dynamics::{conserved, plane_frame, State, SystemParams};
use crate::error::HodoError;
use crate::hodograph::{conic_with_circle, sample_hodograph, velocity_circle};
use crate::oracle::{
    asymptotic_direction, integrate, integrate_grid, integrate_until_radius, linspace_times, observed_scattering_angle,
    sweep_theta, IntegratorConfig, Method, TimeDirection, Trajectory, ASYMPTOTIC_RADIUS_FACTOR,
};
use crate::report::{
    csv_row, fmt_f64, AnalysisReport, AngleUnit, ScatterSummary, BATCH_HEADER, HODOGRAPH_HEADER, PROPAGATE_HEADER,
};
use crate::scattering::{
    analyze_orbit, arc_angle, eccentricity_from_conserved, scattering_angle_from_conserved, theta_limits,
};
use crate::vector::Vec3;
use crate::verify::{run_suite, SuiteConfig};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_USAGE: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

/// Env var capping the worker threads used by `verify` and `batch-scatter`.
pub const THREADS_ENV: &str = "HODOKIT_THREADS";

#[derive(Debug, Parser)]
#[command(name = "hodokit", version, about = "Velocity circles and scattering angles of Kepler orbits")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Conserved quantities, velocity circle, conic and (for hyperbolas) scattering data as JSON.
    Analyze(AnalyzeArgs),
    /// Integrate the equations of motion and write the trajectory as CSV.
    Propagate(PropagateArgs),
    /// Sample the velocity circle as CSV, with an optional JSON sidecar.
    Hodograph(HodographArgs),
    /// Arc and scattering angles from (h, j) or from a state.
    Scatter(ScatterArgs),
    /// Run the closed-form vs. integrator property suite.
    Verify(VerifyArgs),
    /// Closed-form vs. integrated scattering angle over an (h, j) grid.
    BatchScatter(BatchArgs),
}

#[derive(Debug, Args)]
pub struct ParamArgs {
    /// Particle mass.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub m: f64,
    /// Force constant of the -k/|x| potential.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub k: f64,
}

impl ParamArgs {
    fn params(&self) -> Result<SystemParams, CliError> {
        Ok(SystemParams::new(self.m, self.k)?)
    }
}

#[derive(Debug, Args)]
pub struct StateArgs {
    /// Position as a comma-separated triple, e.g. 1,0,0.
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    pub x: Vec3,
    /// Velocity as a comma-separated triple.
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    pub v: Vec3,
    /// Time tag of the state.
    #[arg(long = "t0", default_value_t = 0.0, allow_hyphen_values = true)]
    pub t0: f64,
}

impl StateArgs {
    fn state(&self) -> Result<State, CliError> {
        Ok(State::at_time(self.x, self.v, self.t0)?)
    }
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub state: StateArgs,
    /// Report angles in degrees.
    #[arg(long)]
    pub degrees: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Rk45,
    Leapfrog,
}

#[derive(Debug, Args)]
pub struct PropagateArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub state: StateArgs,
    /// Final time (earlier than t0 integrates backward).
    #[arg(long, allow_hyphen_values = true, conflicts_with = "until_radius", required_unless_present = "until_radius")]
    pub t_final: Option<f64>,
    /// Stop once the particle moves outward past this radius.
    #[arg(long)]
    pub until_radius: Option<f64>,
    /// With --until-radius, integrate backward in time.
    #[arg(long, requires = "until_radius")]
    pub backward: bool,
    /// Number of output rows (equally spaced in time for --t-final); default is every step.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, value_enum, default_value_t = MethodArg::Rk45)]
    pub method: MethodArg,
    #[arg(long, default_value_t = 1e-10)]
    pub rtol: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub atol: f64,
    /// Initial (rk45) or fixed (leapfrog) step.
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long, default_value_t = 10_000_000)]
    pub max_steps: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct HodographArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub state: StateArgs,
    #[arg(long, default_value_t = 720)]
    pub samples: usize,
    #[arg(long)]
    pub degrees: bool,
    /// CSV destination; the sidecar defaults to the same path with a .json extension.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub sidecar: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScatterArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Total energy.
    #[arg(long, allow_hyphen_values = true, requires = "j", conflicts_with_all = ["x", "v"])]
    pub h: Option<f64>,
    /// Angular momentum magnitude.
    #[arg(long, allow_hyphen_values = true, requires = "h")]
    pub j: Option<f64>,
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true, requires = "v", required_unless_present = "h")]
    pub x: Option<Vec3>,
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true, requires = "x")]
    pub v: Option<Vec3>,
    #[arg(long)]
    pub degrees: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub cases: usize,
    /// Override every check's tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Emit JSON instead of text.
    #[arg(long)]
    pub json: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BatchArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Energies: `start:stop:count` (inclusive linear grid) or a comma-separated list.
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    pub h_grid: Grid,
    /// Angular momenta, same syntax as --h-grid.
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    pub j_grid: Grid,
    /// Escape radius for the numerical angle, in units of Λ.
    #[arg(long, default_value_t = ASYMPTOTIC_RADIUS_FACTOR)]
    pub radius_factor: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `x,y,z` with a `.` decimal separator; scientific notation is accepted.
pub fn parse_vec3(s: &str) -> Result<Vec3, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated numbers, got {s:?}"));
    }
    let mut out = [0.0; 3];
    for (o, p) in out.iter_mut().zip(&parts) {
        *o = p.parse::<f64>().map_err(|e| format!("bad number {p:?}: {e}"))?;
        if !o.is_finite() {
            return Err(format!("non-finite component {p:?}"));
        }
    }
    Ok(out.into())
}

/// A list of grid values for `batch-scatter`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

/// Parses `start:stop:count` into an inclusive linear grid, or `a,b,c` into a list.
pub fn parse_grid(s: &str) -> Result<Grid, String> {
    let num = |p: &str| p.trim().parse::<f64>().map_err(|e| format!("bad number {p:?}: {e}"));
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, n] = parts.as_slice() else {
            return Err(format!("expected start:stop:count, got {s:?}"));
        };
        let (a, b) = (num(a)?, num(b)?);
        let n: usize = n.trim().parse().map_err(|e| format!("bad count {n:?}: {e}"))?;
        if n == 0 {
            return Err("grid count must be ≥ 1".into());
        }
        Ok(Grid(linspace_times(a, b, n)))
    } else {
        s.split(',').map(num).collect::<Result<_, _>>().map(Grid)
    }
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl From<HodoError> for CliError {
    fn from(e: HodoError) -> Self {
        let code = match e {
            HodoError::StepLimitExceeded(_) | HodoError::NonFinite(_) | HodoError::DegenerateCollinear => {
                EXIT_NUMERICAL
            }
            _ => EXIT_DOMAIN,
        };
        CliError { code, message: e.to_string() }
    }
}

/// Errors raised while integrating; a singular position here means the collision guard tripped.
fn numerical(e: HodoError) -> CliError {
    match e {
        HodoError::NotHyperbolic(_) | HodoError::DegenerateRadialMotion | HodoError::InvalidInput(_) => e.into(),
        HodoError::SingularPosition => {
            CliError { code: EXIT_NUMERICAL, message: "collision guard tripped (r below minimum radius)".into() }
        }
        other => CliError { code: EXIT_NUMERICAL, message: other.to_string() },
    }
}

fn io_error(e: std::io::Error) -> CliError {
    CliError { code: EXIT_NUMERICAL, message: format!("i/o error: {e}") }
}

/// Output of one command: primary text plus its exit code.
pub struct Output {
    pub text: String,
    pub code: i32,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, code: EXIT_OK }
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(io_error),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes()).map_err(io_error)?;
            lock.flush().map_err(io_error)
        }
    }
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("value serializes");
    s.push('\n');
    s
}

fn unit(degrees: bool) -> AngleUnit {
    if degrees {
        AngleUnit::Deg
    } else {
        AngleUnit::Rad
    }
}

fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v.trim().parse().map_err(|_| CliError {
            code: EXIT_USAGE,
            message: format!("{THREADS_ENV} must be a positive integer, got {v:?}"),
        })?;
        b = b.num_threads(n.max(1));
    }
    b.build().map_err(|e| CliError { code: EXIT_NUMERICAL, message: e.to_string() })
}

pub fn cmd_analyze(a: &AnalyzeArgs) -> Result<Output, CliError> {
    let p = a.params.params()?;
    let s = a.state.state()?;
    let report = AnalysisReport::analyze(&s, &p, unit(a.degrees))?;
    Ok(Output::ok(report.to_json()))
}

pub fn cmd_propagate(a: &PropagateArgs) -> Result<Output, CliError> {
    let p = a.params.params()?;
    let s = a.state.state()?;
    let frame = plane_frame(&s, &p)?;
    let mut cfg = IntegratorConfig {
        method: match a.method {
            MethodArg::Rk45 => Method::AdaptiveRk45,
            MethodArg::Leapfrog => Method::Leapfrog,
        },
        rel_tol: a.rtol,
        abs_tol: a.atol,
        max_steps: a.max_steps,
        ..Default::default()
    };
    if let Some(step) = a.step {
        cfg.initial_step = step;
    }
    if cfg.method == Method::Leapfrog && a.step.is_none() {
        // a thousandth of the local dynamical time
        cfg.initial_step = 1e-3 * (p.m * s.radius().powi(3) / p.k).sqrt();
    }
    cfg.validate()?;
    if a.samples == Some(0) {
        return Err(CliError { code: EXIT_USAGE, message: "--samples must be ≥ 1".into() });
    }

    let traj = match (a.t_final, a.until_radius) {
        (Some(t_final), _) => match a.samples {
            Some(n) => integrate_grid(&s, &p, &linspace_times(s.t, t_final, n), &cfg),
            None => integrate(&s, &p, t_final, &cfg),
        },
        (None, Some(radius)) => {
            let dir = if a.backward { TimeDirection::Backward } else { TimeDirection::Forward };
            integrate_until_radius(&s, &p, radius, dir, &cfg).map(|tr| match a.samples {
                Some(n) => thin(tr, n),
                None => tr,
            })
        }
        (None, None) => unreachable!("clap enforces one stop condition"),
    }
    .map_err(numerical)?;

    let thetas = sweep_theta(&traj, &frame)?;
    let mut text = String::with_capacity(traj.len() * 200);
    text.push_str(PROPAGATE_HEADER);
    text.push('\n');
    for (q, (_, theta)) in traj.iter().zip(thetas) {
        let c = conserved(q, &p)?;
        let row = [q.t, q.x.x, q.x.y, q.x.z, q.v.x, q.v.y, q.v.z, q.radius(), theta, c.j, c.h];
        text.push_str(&csv_row(&row));
        text.push('\n');
    }
    Ok(Output::ok(text))
}

/// Keeps `n` samples evenly spread over the trajectory, always including the first (and last when `n ≥ 2`).
fn thin(mut tr: Trajectory, n: usize) -> Trajectory {
    let len = tr.samples.len();
    if n >= len {
        return tr;
    }
    let picked: Vec<State> = if n == 1 {
        vec![tr.samples[0]]
    } else {
        (0..n).map(|i| tr.samples[(i * (len - 1) + (n - 1) / 2) / (n - 1)]).collect()
    };
    tr.samples = picked;
    tr
}

#[derive(Serialize)]
struct HodographSidecar {
    class: crate::hodograph::ConicClass,
    eccentricity: f64,
    radius: f64,
    center: Vec3,
    center_plane: [f64; 2],
    frame: crate::dynamics::PlaneFrame,
    angle_unit: AngleUnit,
    energy_circle: Option<EnergyCircle>,
    arc: Option<ArcSummary>,
}

#[derive(Serialize)]
struct EnergyCircle {
    radius: f64,
}

#[derive(Serialize)]
struct ArcSummary {
    v_in: Vec3,
    v_out: Vec3,
    v_in_plane: [f64; 2],
    v_out_plane: [f64; 2],
    #[serde(rename = "Theta")]
    arc_angle: f64,
}

fn sidecar_path(a: &HodographArgs) -> Option<PathBuf> {
    a.sidecar.clone().or_else(|| a.out.as_deref().map(|p: &Path| p.with_extension("json")))
}

pub fn cmd_hodograph(a: &HodographArgs) -> Result<(Output, Option<(PathBuf, String)>), CliError> {
    let p = a.params.params()?;
    let s = a.state.state()?;
    let circle = velocity_circle(&s, &p)?;
    let orbit = conic_with_circle(&s, &p, &circle)?;
    let angle = unit(a.degrees);
    let f = orbit.frame;

    let mut text = String::from(HODOGRAPH_HEADER);
    text.push('\n');
    for (theta, v) in sample_hodograph(&circle, &orbit, a.samples)? {
        let _ = writeln!(text, "{}", csv_row(&[angle.convert(theta), v.dot(f.e1), v.dot(f.e2)]));
    }

    let sidecar = sidecar_path(a).map(|path| {
        let (energy_circle, arc) = match analyze_orbit(&circle, &orbit) {
            Ok(sc) => (
                Some(EnergyCircle { radius: sc.energy_radius }),
                Some(ArcSummary {
                    v_in: sc.v_in,
                    v_out: sc.v_out,
                    v_in_plane: [sc.v_in.dot(f.e1), sc.v_in.dot(f.e2)],
                    v_out_plane: [sc.v_out.dot(f.e1), sc.v_out.dot(f.e2)],
                    arc_angle: angle.convert(sc.arc_angle),
                }),
            ),
            Err(_) => (None, None),
        };
        let body = HodographSidecar {
            class: orbit.class,
            eccentricity: orbit.e,
            radius: circle.radius,
            center: circle.center,
            center_plane: [circle.center.dot(f.e1), circle.center.dot(f.e2)],
            frame: f,
            angle_unit: angle,
            energy_circle,
            arc,
        };
        (path, pretty(&body))
    });
    Ok((Output::ok(text), sidecar))
}

pub fn cmd_scatter(a: &ScatterArgs) -> Result<Output, CliError> {
    let p = a.params.params()?;
    let (h, j) = match (a.h, a.j, a.x, a.v) {
        (Some(h), Some(j), _, _) => (h, j),
        (_, _, Some(x), Some(v)) => {
            let c = conserved(&State::new(x, v)?, &p)?;
            (c.h, c.j)
        }
        _ => unreachable!("clap enforces one input form"),
    };
    if !(h > 0.0) {
        return Err(HodoError::NotHyperbolic("h ≤ 0").into());
    }
    if !(j > 0.0 && j.is_finite()) {
        return Err(HodoError::DegenerateRadialMotion.into());
    }
    let e = eccentricity_from_conserved(h, j, &p);
    let (theta_star, theta_0) = theta_limits(e)?;
    let theta = arc_angle(e)?;
    let psi = scattering_angle_from_conserved(h, j, &p)?;
    let angle = unit(a.degrees);
    let summary = ScatterSummary {
        e,
        theta_star: angle.convert(theta_star),
        theta_0: angle.convert(theta_0),
        arc_angle: angle.convert(theta),
        scattering_angle: angle.convert(psi),
        deflection: angle.convert(theta - std::f64::consts::PI),
        angle_unit: angle,
    };
    Ok(Output::ok(pretty(&summary)))
}

pub fn cmd_verify(a: &VerifyArgs) -> Result<Output, CliError> {
    let pool = thread_pool()?;
    let cfg = SuiteConfig { seed: a.seed, cases: a.cases, tolerance: a.tol };
    let report = pool.install(|| run_suite(&cfg));
    let text = if a.json { pretty(&report) } else { report.to_text() };
    let code = if report.all_passed() { EXIT_OK } else { EXIT_VERIFY_FAILED };
    Ok(Output { text, code })
}

/// One grid row of `batch-scatter`.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchRow {
    pub h: f64,
    pub j: f64,
    pub e: f64,
    pub theta_formula: Option<f64>,
    pub theta_numeric: Option<f64>,
    pub status: &'static str,
}

impl BatchRow {
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
        let err = match (self.theta_formula, self.theta_numeric) {
            (Some(a), Some(b)) => fmt_f64((a - b).abs()),
            _ => String::new(),
        };
        format!(
            "{},{},{},{},{},{},{}",
            fmt_f64(self.h),
            fmt_f64(self.j),
            fmt_f64(self.e),
            opt(self.theta_formula),
            opt(self.theta_numeric),
            err,
            self.status
        )
    }
}

/// Closed-form and integrated arc angle for one `(h, j)` pair, starting from perihelion.
pub fn batch_row(h: f64, j: f64, p: &SystemParams, radius_factor: f64) -> BatchRow {
    let e = eccentricity_from_conserved(h, j, p);
    let row = |theta_formula, theta_numeric, status| BatchRow { h, j, e, theta_formula, theta_numeric, status };
    if !(h > 0.0) {
        return row(None, None, "not-hyperbolic");
    }
    if !(j > 0.0) {
        return row(None, None, "radial");
    }
    let Ok(formula) = arc_angle(e) else {
        return row(None, None, "not-hyperbolic");
    };
    let lambda = j * j / (p.m * p.k);
    let r_p = lambda / (1.0 + e);
    let s = State { x: Vec3::new(r_p, 0.0, 0.0), v: Vec3::new(0.0, j / (p.m * r_p), 0.0), t: 0.0 };
    let cfg = IntegratorConfig::default();
    let numeric = asymptotic_direction(&s, p, TimeDirection::Forward, radius_factor, &cfg).and_then(|plus| {
        let minus = asymptotic_direction(&s, p, TimeDirection::Backward, radius_factor, &cfg)?;
        Ok(observed_scattering_angle(minus, plus, Vec3::Z))
    });
    match numeric {
        Ok(n) => row(Some(formula), Some(n), "ok"),
        Err(_) => row(Some(formula), None, "integration-failed"),
    }
}

pub fn cmd_batch_scatter(a: &BatchArgs) -> Result<Output, CliError> {
    use rayon::prelude::*;
    let p = a.params.params()?;
    if !(a.radius_factor > 1.0) {
        return Err(HodoError::InvalidInput("--radius-factor must exceed 1".into()).into());
    }
    let pairs: Vec<(f64, f64)> = a.h_grid.0.iter().flat_map(|&h| a.j_grid.0.iter().map(move |&j| (h, j))).collect();
    let pool = thread_pool()?;
    let rows: Vec<BatchRow> =
        pool.install(|| pairs.par_iter().map(|&(h, j)| batch_row(h, j, &p, a.radius_factor)).collect());
    let mut text = String::from(BATCH_HEADER);
    text.push('\n');
    for r in rows {
        text.push_str(&r.to_csv());
        text.push('\n');
    }
    Ok(Output::ok(text))
}

fn dispatch(cli: &Cli) -> Result<i32, CliError> {
    let (out_path, output) = match &cli.command {
        Command::Analyze(a) => (&a.out, cmd_analyze(a)?),
        Command::Propagate(a) => (&a.out, cmd_propagate(a)?),
        Command::Hodograph(a) => {
            let (output, sidecar) = cmd_hodograph(a)?;
            if let Some((path, body)) = sidecar {
                std::fs::write(path, body).map_err(io_error)?;
            }
            (&a.out, output)
        }
        Command::Scatter(a) => (&a.out, cmd_scatter(a)?),
        Command::Verify(a) => (&a.out, cmd_verify(a)?),
        Command::BatchScatter(a) => (&a.out, cmd_batch_scatter(a)?),
    };
    emit(out_path, &output.text)?;
    Ok(output.code)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

pub fn main() -> i32 {
    run(std::env::args_os())
}

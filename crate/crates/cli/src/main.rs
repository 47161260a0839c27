//! `gccf`: dimension brackets, pressure curves, point clouds, sweeps and
//! structural checks from the command line.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gccf::io::{
    box_count_csv, cloud_csv, encode_ccf1, grid_csv, heatmap_svg, ladder_csv, load_run_config, parse_complex, parse_region, parse_t_grid,
    pressure_csv, scatter_svg, to_json, write_atomic, Artifact, RunConfig, RungCache,
};
use gccf::limitset::{box_counting_dim, closure_points, generate_points, verify_x_infinity, Mode};
use gccf::pressure::{theta_diagnostic, PressureBracket, PressureEngine, Scope};
use gccf::solver::{dimension_bracket, RungStore, SolverConfig};
use gccf::sweep::{boundary_max_check, continuity_check, nonconstancy_check, sweep_grid, AnalysisReport, Outcome};
use gccf::system::{geometry_report, DomainKind, Parameter, Truncation};
use gccf::Error;
use serde_json::{json, Value};

#[derive(Debug, Parser)]
#[command(
    name = "gccf",
    version,
    about = "Certified Hausdorff-dimension brackets for complex continued fraction limit sets"
)]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// TOML file with defaults for any flag.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Bracket the dimension at one parameter.
    Dim(DimArgs),
    /// Tabulate pressure brackets over a t-grid.
    Pressure(PressureArgs),
    /// Generate limit-set points.
    Limitset(LimitsetArgs),
    /// Bracket the dimension over a parameter rectangle and analyse the grid.
    Sweep(SweepArgs),
    /// Run the structural checks at one parameter.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct SolverFlags {
    /// Alphabet cutoffs, comma separated.
    #[arg(long = "N", value_delimiter = ',')]
    truncations: Option<Vec<u32>>,
    /// Word lengths, comma separated.
    #[arg(long = "n", value_delimiter = ',')]
    levels: Option<Vec<usize>>,
    /// Bisection tolerance in t.
    #[arg(long)]
    tol: Option<f64>,
    /// Word budget per pass.
    #[arg(long)]
    budget: Option<u64>,
    /// Bracket width counted as converged.
    #[arg(long)]
    target_width: Option<f64>,
    /// Domain for derivative norms: lens or disk.
    #[arg(long)]
    domain: Option<DomainKind>,
    /// full (all letters, with tail) or finite (F(N) only).
    #[arg(long)]
    scope: Option<Scope>,
}

impl SolverFlags {
    fn apply(&self, mut cfg: SolverConfig) -> SolverConfig {
        if let Some(v) = &self.truncations {
            cfg.truncations = v.clone();
        }
        if let Some(v) = &self.levels {
            cfg.levels = v.clone();
        }
        if let Some(v) = self.tol {
            cfg.tol = v;
        }
        if let Some(v) = self.budget {
            cfg.budget = v;
        }
        if let Some(v) = self.target_width {
            cfg.target_width = v;
        }
        if let Some(v) = self.domain {
            cfg.domain = v;
        }
        if let Some(v) = self.scope {
            cfg.scope = v;
        }
        cfg
    }
}

#[derive(Debug, Args)]
struct DimArgs {
    /// Parameter as a+bi.
    #[arg(long, allow_hyphen_values = true)]
    tau: Option<String>,
    #[command(flatten)]
    solver: SolverFlags,
    /// Rung cache directory (default: $GCCF_CACHE_DIR).
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// Directory for dim.csv and dim.json.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PressureArgs {
    /// Parameter as a+bi.
    #[arg(long, allow_hyphen_values = true)]
    tau: Option<String>,
    /// Exponents as a list `1,1.5,2` or a range `start:stop:step`, within [0, 3].
    #[arg(long)]
    t: Option<String>,
    #[command(flatten)]
    solver: SolverFlags,
    /// Directory for pressure.csv and pressure.json.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct LimitsetArgs {
    /// Parameter as a+bi.
    #[arg(long, allow_hyphen_values = true)]
    tau: Option<String>,
    /// Alphabet cutoff.
    #[arg(long = "N", default_value_t = 10)]
    truncation: u32,
    /// Word length.
    #[arg(long = "n", default_value_t = 4)]
    level: usize,
    /// Draw this many random words instead of enumerating all of them.
    #[arg(long)]
    random: Option<usize>,
    /// Emit the closure points φ_w(0), |w| ≤ LEN, instead.
    #[arg(long, value_name = "LEN", conflicts_with = "random")]
    closure: Option<usize>,
    /// Cap on exhaustive enumeration.
    #[arg(long, default_value_t = 10_000_000)]
    budget: usize,
    /// RNG seed for random sampling.
    #[arg(long)]
    seed: Option<u64>,
    /// Also estimate the box-counting dimension of the cloud.
    #[arg(long)]
    box_count: bool,
    /// Directory for limitset.csv, limitset.ccf1 and limitset.json.
    #[arg(long)]
    out: Option<PathBuf>,
    /// SVG scatter plot path.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Rectangle u0,u1,v0,v1.
    #[arg(long)]
    region: Option<String>,
    /// Grid spacing in both u and v.
    #[arg(long)]
    step: Option<f64>,
    #[command(flatten)]
    solver: SolverFlags,
    /// Allowance added to bracket widths in the continuity check.
    #[arg(long, default_value_t = 0.1)]
    slack: f64,
    /// Rung cache directory (default: $GCCF_CACHE_DIR).
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// Directory for sweep.csv, sweep.json and analysis.json.
    #[arg(long)]
    out: Option<PathBuf>,
    /// SVG heatmap path.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Parameter as a+bi.
    #[arg(long, allow_hyphen_values = true)]
    tau: Option<String>,
    /// Alphabet cutoff for the geometry suite.
    #[arg(long = "N", default_value_t = 10)]
    truncation: u32,
    /// Random sample points per check.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    /// RNG seed for random sampling.
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for verify.json.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Exit statuses.
mod status {
    pub const IO: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const DOMAIN: u8 = 3;
    pub const UNCONVERGED: u8 = 4;
    pub const CHECK: u8 = 5;
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::OutOfDomain { .. } => status::DOMAIN,
        Error::InvalidArgument(_) | Error::Parse(_) | Error::BudgetExceeded { .. } => status::USAGE,
        Error::Io { .. } | Error::Json(_) => status::IO,
        _ => status::CHECK,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    let file = match &cli.config {
        Some(p) => load_run_config(p)?,
        None => RunConfig::default(),
    };
    if let Some(jobs) = cli.jobs.or(file.jobs) {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Error::InvalidArgument(format!("--jobs: {e}")))?;
    }
    match cli.command {
        Command::Dim(a) => dim(a, file),
        Command::Pressure(a) => pressure(a, file),
        Command::Limitset(a) => limitset(a, file),
        Command::Sweep(a) => sweep(a, file),
        Command::Verify(a) => verify(a, file),
    }
}

fn parameter(flag: Option<String>, file: &Option<String>) -> Result<(String, Parameter), Error> {
    let text = flag
        .or_else(|| file.clone())
        .ok_or_else(|| Error::InvalidArgument("--tau is required".into()))?;
    let tau = Parameter::from_complex(parse_complex(&text)?)?;
    Ok((text, tau))
}

fn open_cache(flag: Option<PathBuf>, file: &Option<PathBuf>) -> Result<Option<RungCache>, Error> {
    match flag.or_else(|| file.clone()) {
        Some(dir) => RungCache::open(&dir).map(Some),
        None => RungCache::from_env(),
    }
}

fn out_dir(flag: Option<PathBuf>, file: &Option<PathBuf>) -> Result<Option<PathBuf>, Error> {
    let dir = flag.or_else(|| file.clone());
    if let Some(d) = &dir {
        fs::create_dir_all(d).map_err(|e| Error::Io {
            path: d.clone(),
            source: e,
        })?;
    }
    Ok(dir)
}

fn write(dir: &Path, name: &str, bytes: &[u8]) -> Result<(), Error> {
    write_atomic(&dir.join(name), bytes)
}

fn dim(a: DimArgs, file: RunConfig) -> Result<u8, Error> {
    let (text, tau) = parameter(a.tau, &file.tau)?;
    let cfg = a.solver.apply(file.solver.clone());
    let cache = open_cache(a.cache_dir, &file.cache_dir)?;
    let b = dimension_bracket(&tau, &cfg, cache.as_ref().map(|c| c as &dyn RungStore))?;
    for r in &b.ladder {
        println!(
            "N={:<4} n={} [{:.6}, {:.6}] {:>4} evals {:.2}s{}",
            r.truncation,
            r.level,
            r.h_lo,
            r.h_hi,
            r.t_evals,
            r.seconds,
            if r.cached { " (cached)" } else { "" }
        );
    }
    for s in &b.skipped {
        println!(
            "N={:<4} n={} skipped: {:.3e} words over budget",
            s.truncation, s.level, s.required_words
        );
    }
    println!(
        "h in [{:.6}, {:.6}] width {:.6} {}",
        b.h_lo,
        b.h_hi,
        b.width(),
        if b.converged { "converged" } else { "unconverged" }
    );
    if cache.is_some() {
        println!("cache hits: {}/{}", b.cache_hits(), b.ladder.len());
    }
    let config = json!({"command": "dim", "tau": text, "solver": cfg});
    if let Some(dir) = out_dir(a.out, &file.out)? {
        write(&dir, "dim.csv", ladder_csv(&b, &config).as_bytes())?;
        write(&dir, "dim.json", to_json(&Artifact::new(&config, &b))?.as_bytes())?;
    }
    Ok(if b.converged { 0 } else { status::UNCONVERGED })
}

fn pressure(a: PressureArgs, file: RunConfig) -> Result<u8, Error> {
    let (text, tau) = parameter(a.tau, &file.tau)?;
    let grid =
        a.t.or(file.t.clone())
            .ok_or_else(|| Error::InvalidArgument("--t is required".into()))?;
    let ts = parse_t_grid(&grid)?;
    let cfg = a.solver.apply(file.solver.clone());
    cfg.validate()?;
    let trunc = Truncation::new(*cfg.truncations.last().expect("validated"))?;
    let level = *cfg.levels.last().expect("validated");
    let engine = PressureEngine::new(&tau, trunc, level, cfg.domain, cfg.scope, cfg.budget)?;
    let (lo, hi) = engine.brackets(&ts, &ts)?;
    let rows: Vec<PressureBracket> = ts
        .iter()
        .zip(lo.iter().zip(&hi))
        .map(|(&t, (&p_lo, &p_hi))| PressureBracket {
            t,
            p_lo,
            p_hi,
            level,
            truncation: trunc.get(),
        })
        .collect();
    let config =
        json!({"command": "pressure", "tau": text, "t": grid, "N": trunc.get(), "n": level, "domain": cfg.domain, "scope": cfg.scope});
    let csv = pressure_csv(&rows, &config);
    print!("{csv}");
    if let Some(dir) = out_dir(a.out, &file.out)? {
        write(&dir, "pressure.csv", csv.as_bytes())?;
        let table: Vec<Value> = rows
            .iter()
            .map(|r| json!({"t": r.t, "p_lo": r.p_lo, "p_hi": if r.p_hi.is_finite() { json!(r.p_hi) } else { json!("inf") }}))
            .collect();
        write(&dir, "pressure.json", to_json(&Artifact::new(&config, &table))?.as_bytes())?;
    }
    Ok(0)
}

fn limitset(a: LimitsetArgs, file: RunConfig) -> Result<u8, Error> {
    let (text, tau) = parameter(a.tau, &file.tau)?;
    let trunc = Truncation::new(a.truncation)?;
    let seed = a.seed.or(file.seed).unwrap_or(0);
    let cloud = match (a.closure, a.random) {
        (Some(len), _) => closure_points(&tau, trunc, len)?,
        (None, Some(count)) => generate_points(&tau, trunc, a.level, Mode::Random, count, seed)?,
        (None, None) => generate_points(&tau, trunc, a.level, Mode::Exhaustive, a.budget, seed)?,
    };
    let outside = cloud.points.iter().filter(|z| (*z - 0.5).norm() > 0.5 + 1e-9).count();
    println!(
        "{} points, max error {:.3e}, {} outside the disk",
        cloud.points.len(),
        cloud.meta.max_error,
        outside
    );
    let boxes = if a.box_count {
        // Boxes smaller than the point error would measure the discretization.
        let scale_min = (4.0 * cloud.meta.max_error).max(1.0 / 64.0);
        let r = box_counting_dim(&cloud.points, scale_min, 0.5, 6)?;
        println!("box-counting slope {:.4} (r^2 {:.4})", r.slope, r.r_squared);
        Some(r)
    } else {
        None
    };
    let config = json!({"command": "limitset", "tau": text, "meta": cloud.meta});
    if let Some(dir) = out_dir(a.out, &file.out)? {
        write(&dir, "limitset.csv", cloud_csv(&cloud)?.as_bytes())?;
        write(&dir, "limitset.ccf1", &encode_ccf1(&cloud.points))?;
        write(
            &dir,
            "limitset.json",
            to_json(&Artifact::new(&config, &json!({"box_count": boxes, "outside": outside})))?.as_bytes(),
        )?;
        if let Some(r) = &boxes {
            write(&dir, "boxcount.csv", box_count_csv(r, &config).as_bytes())?;
        }
    }
    if let Some(path) = a.svg.or(file.svg.clone()) {
        write_atomic(&path, scatter_svg(&cloud).as_bytes())?;
    }
    Ok(if outside == 0 { 0 } else { status::CHECK })
}

fn print_report(r: &AnalysisReport) {
    let outcome = match r.outcome {
        Outcome::Pass => "PASS",
        Outcome::Fail => "FAIL",
        Outcome::Inconclusive => "INCONCLUSIVE",
    };
    let summary: Vec<String> = r.summary.iter().map(|(k, v)| format!("{k}={v:.6}")).collect();
    println!("{outcome:<12} {:<14} {}", r.check, summary.join(" "));
    for e in r.failures().take(5) {
        println!("    {}: {} ({} vs {})", e.label, e.inequality, e.lhs, e.rhs);
    }
}

fn sweep(a: SweepArgs, file: RunConfig) -> Result<u8, Error> {
    let region_text = a
        .region
        .or(file.region.clone())
        .ok_or_else(|| Error::InvalidArgument("--region is required".into()))?;
    let region = parse_region(&region_text)?;
    let step = a
        .step
        .or(file.step)
        .ok_or_else(|| Error::InvalidArgument("--step is required".into()))?;
    let cfg = a.solver.apply(file.solver.clone());
    let cache = open_cache(a.cache_dir, &file.cache_dir)?;
    let store = cache.as_ref().map(|c| c as &dyn RungStore);
    let grid = sweep_grid(&region, step, &cfg, store)?;
    println!("{} cells ({} x {})", grid.cells.len(), grid.columns, grid.rows);
    let mut reports = vec![continuity_check(&grid, a.slack), nonconstancy_check(&grid, None, 0, None)?];
    if grid.touches_boundary() {
        reports.push(boundary_max_check(&grid)?);
    }
    for r in &reports {
        print_report(r);
    }
    let config = json!({"command": "sweep", "region": region_text, "step": step, "slack": a.slack, "solver": cfg});
    if let Some(dir) = out_dir(a.out, &file.out)? {
        write(&dir, "sweep.csv", grid_csv(&grid)?.as_bytes())?;
        write(&dir, "sweep.json", to_json(&Artifact::new(&config, &grid))?.as_bytes())?;
        write(&dir, "analysis.json", to_json(&Artifact::new(&config, &reports))?.as_bytes())?;
    }
    if let Some(path) = a.svg.or(file.svg.clone()) {
        write_atomic(&path, heatmap_svg(&grid).as_bytes())?;
    }
    Ok(if reports.iter().any(|r| r.outcome == Outcome::Fail) {
        status::CHECK
    } else {
        0
    })
}

fn verify(a: VerifyArgs, file: RunConfig) -> Result<u8, Error> {
    let (text, tau) = parameter(a.tau, &file.tau)?;
    let seed = a.seed.or(file.seed).unwrap_or(0);
    let geometry = geometry_report(&tau, Truncation::new(a.truncation)?, a.samples, seed)?;
    let mut lines: Vec<(bool, String)> = geometry
        .checks
        .iter()
        .map(|c| {
            (
                c.passed,
                format!(
                    "{:<14} {} (observed {:.6e}, bound {:.6e})",
                    c.name, c.inequality, c.observed, c.bound
                ),
            )
        })
        .collect();
    let theta = theta_diagnostic(&tau, 12)?;
    lines.push((
        theta.passed(),
        format!(
            "{:<14} block partial sums of psi1(1) increase past the lower estimates; tail bound at t = {} is {:.6e}",
            "theta", theta.tail_exponent, theta.tail_bound
        ),
    ));
    let escape = verify_x_infinity(&tau, &[10, 100, 1000])?;
    let radii: Vec<String> = escape.radii.iter().map(|r| format!("s({})={:.3e}", r.truncation, r.s)).collect();
    lines.push((
        escape.passed(),
        format!("{:<14} escape radii strictly decreasing: {}", "x_infinity", radii.join(" ")),
    ));
    let closure = closure_points(&tau, Truncation::new(a.truncation.min(10))?, 2)?;
    let closure_ok =
        closure.points[0] == num_complex::Complex64::new(0.0, 0.0) && closure.points.iter().all(|z| (*z - 0.5).norm() <= 0.5 + 1e-9);
    lines.push((
        closure_ok,
        format!(
            "{:<14} closure points contain 0 and lie in the disk ({} points)",
            "closure",
            closure.points.len()
        ),
    ));
    for (ok, line) in &lines {
        println!("{} {line}", if *ok { "PASS" } else { "FAIL" });
    }
    let all = lines.iter().all(|l| l.0);
    let config = json!({"command": "verify", "tau": text, "N": a.truncation, "samples": a.samples, "seed": seed});
    if let Some(dir) = out_dir(a.out, &file.out)? {
        let result = json!({"geometry": geometry, "theta": theta, "x_infinity": escape, "closure_ok": closure_ok, "passed": all});
        write(&dir, "verify.json", to_json(&Artifact::new(&config, &result))?.as_bytes())?;
    }
    Ok(if all { 0 } else { status::CHECK })
}

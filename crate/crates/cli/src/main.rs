//! `jch`: phase maps and oracle validation for the extended
//! Jaynes-Cummings-Hubbard chain.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

use jch_core::config::ConfigFile;
use jch_core::defects::floating_map;
use jch_core::estimate::{estimate_parameters, FrequencyConvention};
use jch_core::frozen::{phase5_map, resonant_thresholds, ResonantThresholds};
use jch_core::model::first_critical_point;
use jch_core::validation::{run_validation, ValidationOptions};
use jch_core::{staircase::staircase_map, Axis, Convention, ModelParams, PhaseMap, StaircaseModel};

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Model(#[from] jch_core::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{0} check(s) failed")]
    ValidationFailed(usize),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::ValidationFailed(_) => 1,
            _ => 2,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Grid resolution `WxH`: `W` chemical-potential points by `H` points on
/// the second axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
struct Grid {
    mu_points: usize,
    y_points: usize,
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (w, h) = s
            .split_once(['x', 'X'])
            .ok_or_else(|| format!("expected WxH, got `{s}`"))?;
        let parse = |v: &str| {
            v.trim()
                .parse::<usize>()
                .map_err(|e| format!("bad grid size `{v}`: {e}"))
        };
        let grid = Grid {
            mu_points: parse(w)?,
            y_points: parse(h)?,
        };
        if grid.mu_points < 2 || grid.y_points < 2 {
            return Err(format!("each grid axis needs at least 2 points, got `{s}`"));
        }
        Ok(grid)
    }
}

#[derive(Parser, Debug)]
#[command(name = "jch", version, about = "Photon Devil's staircase, floating and frozen solids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Flat TOML parameter file (keys match the model parameter names).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Interaction weighting; overrides `rydberg_weight_exponent` from the
    /// config. Default: paper.
    #[arg(long)]
    convention: Option<Convention>,
}

#[derive(Args, Debug, Clone)]
struct MapArgs {
    #[command(flatten)]
    common: Common,
    /// Output CSV; a `<out>.manifest.json` sidecar is written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "400x400")]
    grid: Grid,
    #[arg(long, default_value_t = -1.1, allow_hyphen_values = true)]
    mu_min: f64,
    #[arg(long, default_value_t = -0.85, allow_hyphen_values = true)]
    mu_max: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    vt_min: f64,
    #[arg(long, default_value_t = 0.05, allow_hyphen_values = true)]
    vt_max: f64,
    /// Largest crystal period resolved.
    #[arg(long, default_value_t = 6)]
    qmax: u32,
    /// Pair multiplicity of the window sums (1 is correct; other values are
    /// a deliberate fault for exercising the overlap check).
    #[arg(long, default_value_t = 1)]
    pair_multiplicity: u32,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Zero-hopping filling map over (mu, v_tilde).
    Staircase(MapArgs),
    /// Floating-solid map over (mu, v_tilde) at hopping J_perp.
    Melt {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, default_value_t = 0.001, allow_hyphen_values = true)]
        jperp: f64,
    },
    /// Resonant phase maps over (mu, t) for a weak and a strong repulsion;
    /// writes `<out>.weak.csv` and `<out>.strong.csv`.
    Phase5 {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "200x100")]
        grid: Grid,
        #[arg(long, default_value_t = -1.1, allow_hyphen_values = true)]
        mu_min: f64,
        /// Defaults to each map's own truncation limit, the larger of the
        /// `|3>` inversion point and the `|2>` full-filling edge.
        #[arg(long, allow_hyphen_values = true)]
        mu_max: Option<f64>,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        t_min: f64,
        #[arg(long, default_value_t = 0.02, allow_hyphen_values = true)]
        t_max: f64,
        #[arg(long, default_value_t = 0.1)]
        v_weak: f64,
        #[arg(long, default_value_t = 0.8)]
        v_strong: f64,
        #[arg(long, default_value_t = 6)]
        qmax: u32,
    },
    /// Analytic boundaries against brute-force oracles; exits 1 on failure.
    Validate {
        #[command(flatten)]
        common: Common,
        /// JSON report path (standard output when absent).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 12)]
        oracle_ring: usize,
        #[arg(long, default_value_t = 6)]
        defect_ring: usize,
        #[arg(long, default_value_t = 1)]
        pair_multiplicity: u32,
    },
    /// Hardware-scale couplings from cavity and atom data.
    Params {
        #[arg(long)]
        config: Option<PathBuf>,
        /// `ordinary` (f = omega/2pi) or `angular`; overrides the config.
        #[arg(long)]
        frequency_convention: Option<FrequencyConvention>,
    },
}

/// Defaults for every subcommand: g = 1, resonance, V = 0.05 g (so
/// Ṽ = 0.025 g under `Convention::Paper`).
fn base_params() -> ModelParams {
    ModelParams::default()
        .with_v1(0.05)
        .with_convention(Convention::Paper)
}

fn load_config(path: Option<&Path>) -> CliResult<ConfigFile> {
    Ok(match path {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    })
}

fn resolve(common: &Common, base: ModelParams) -> CliResult<(ConfigFile, ModelParams)> {
    let cfg = load_config(common.config.as_deref())?;
    let mut params = cfg.model_params(base)?;
    if let Some(c) = common.convention {
        params.convention = c;
    }
    Ok((cfg, params))
}

#[derive(Serialize)]
struct RunManifest<'a> {
    subcommand: &'a str,
    config: Option<String>,
    params: ModelParams,
    grid: Option<Grid>,
    output: Option<String>,
    convention: Convention,
    tool_version: &'static str,
    wall_clock_seconds: f64,
    #[serde(skip_serializing_if = "serde_json::Value::is_null")]
    extra: serde_json::Value,
}

fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value)
        .map_err(|e| io_err(path)(io::Error::other(e)))?;
    writeln!(w).map_err(io_err(path))?;
    w.flush().map_err(io_err(path))
}

fn write_map(map: &PhaseMap, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(path) => {
            let file = File::create(path).map_err(io_err(path))?;
            let mut w = BufWriter::new(file);
            map.write_csv(&mut w).map_err(io_err(path))?;
            w.flush().map_err(io_err(path))
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            let here = Path::new("<stdout>");
            map.write_csv(&mut w).map_err(io_err(here))?;
            w.flush().map_err(io_err(here))
        }
    }
}

fn manifest<'a>(
    subcommand: &'a str,
    common: &Common,
    params: &ModelParams,
    grid: Option<Grid>,
    output: Option<&Path>,
    started: Instant,
    extra: serde_json::Value,
) -> RunManifest<'a> {
    RunManifest {
        subcommand,
        config: common.config.as_ref().map(|p| p.display().to_string()),
        params: *params,
        grid,
        output: output.map(|p| p.display().to_string()),
        convention: params.convention,
        tool_version: env!("CARGO_PKG_VERSION"),
        wall_clock_seconds: started.elapsed().as_secs_f64(),
        extra,
    }
}

fn run_map(name: &str, args: &MapArgs, jperp: Option<f64>) -> CliResult<()> {
    let started = Instant::now();
    let (_, params) = resolve(&args.common, base_params())?;
    let mut model = StaircaseModel::from_params(&params)?;
    model.pair_multiplicity = args.pair_multiplicity;
    let mu = Axis::new(args.mu_min, args.mu_max, args.grid.mu_points);
    let vt = Axis::new(args.vt_min, args.vt_max, args.grid.y_points);
    let map = match jperp {
        None => staircase_map(&model, mu, vt, args.qmax)?,
        Some(j) => floating_map(&model, mu, vt, j, args.qmax)?,
    };
    write_map(&map, args.out.as_deref())?;
    if let Some(out) = &args.out {
        let extra = serde_json::json!({
            "mu_c0": first_critical_point(&params),
            "j_perp": jperp,
            "q_max": args.qmax,
            "pair_multiplicity": args.pair_multiplicity,
            "mu_axis": mu,
            "v_tilde_axis": vt,
        });
        let m = manifest(name, &args.common, &params, Some(args.grid), Some(out), started, extra);
        write_json(&sidecar(out, ".manifest.json"), &m)?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run_phase5(
    common: &Common,
    out: &Path,
    grid: Grid,
    mu_min: f64,
    mu_max: Option<f64>,
    t: Axis,
    v_weak: f64,
    v_strong: f64,
    qmax: u32,
) -> CliResult<()> {
    let started = Instant::now();
    let (_, params) = resolve(common, base_params().with_n_max(2))?;
    let mut maps: Vec<(&str, f64, ResonantThresholds, Axis)> = Vec::new();
    for (tag, v) in [("weak", v_weak), ("strong", v_strong)] {
        let p = params.with_v1(v);
        let th = resonant_thresholds(&p)?;
        let mu = Axis::new(
            mu_min,
            mu_max.unwrap_or_else(|| th.truncation_limit()),
            grid.mu_points,
        );
        let map = phase5_map(&p, mu, t, qmax)?;
        write_map(&map, Some(&sidecar(out, &format!(".{tag}.csv"))))?;
        maps.push((tag, v, th, mu));
    }
    let extra = serde_json::json!({
        "maps": maps.iter().map(|(tag, v, th, mu)| serde_json::json!({
            "file": sidecar(out, &format!(".{tag}.csv")).display().to_string(),
            "v1": v,
            "thresholds": th,
            "truncation_limit": th.truncation_limit(),
            "mu_axis": mu,
        })).collect::<Vec<_>>(),
        "t_axis": t,
        "q_max": qmax,
    });
    let m = manifest("phase5", common, &params, Some(grid), Some(out), started, extra);
    write_json(&sidecar(out, ".manifest.json"), &m)
}

fn run_validate(
    common: &Common,
    out: Option<&Path>,
    opts: ValidationOptions,
) -> CliResult<()> {
    let started = Instant::now();
    let (_, params) = resolve(common, base_params())?;
    let report = run_validation(&params, &opts)?;
    for c in &report.checks {
        let measured = match (c.deviation, c.tolerance) {
            (Some(d), Some(t)) => format!(" (deviation {d:.3e}, tolerance {t:.1e})"),
            _ => String::new(),
        };
        eprintln!(
            "{} {}{measured}: {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    let failed = report.checks.iter().filter(|c| !c.passed).count();
    match out {
        Some(path) => {
            write_json(path, &report)?;
            let m = manifest("validate", common, &params, None, Some(path), started, serde_json::Value::Null);
            write_json(&sidecar(path, ".manifest.json"), &m)?;
        }
        None => {
            let text = serde_json::to_string_pretty(&report)
                .map_err(|e| io_err(Path::new("<stdout>"))(io::Error::other(e)))?;
            println!("{text}");
        }
    }
    if failed > 0 {
        return Err(CliError::ValidationFailed(failed));
    }
    Ok(())
}

fn run_params(config: Option<&Path>, flag: Option<FrequencyConvention>) -> CliResult<()> {
    let cfg = load_config(config)?;
    let mut inputs = cfg.experiment();
    if flag.is_some() {
        inputs.frequency_convention = flag;
    }
    let est = estimate_parameters(&inputs)?;
    println!("{:<8} {:>16} {:>16}  status", "quantity", "formula/2pi", "published/2pi");
    for row in est.comparison() {
        let published = row
            .published_hz
            .map(human_hz)
            .unwrap_or_else(|| "-".to_string());
        println!(
            "{:<8} {:>16} {:>16}  {}",
            row.name,
            human_hz(row.formula_hz),
            published,
            row.agreement
        );
    }
    Ok(())
}

fn human_hz(x: f64) -> String {
    let (scale, unit) = match x.abs() {
        a if a >= 1e9 => (1e9, "GHz"),
        a if a >= 1e6 => (1e6, "MHz"),
        a if a >= 1e3 => (1e3, "kHz"),
        _ => (1.0, "Hz"),
    };
    format!("{:.4} {unit}", x / scale)
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Staircase(args) => run_map("staircase", &args, None),
        Command::Melt { map, jperp } => run_map("melt", &map, Some(jperp)),
        Command::Phase5 {
            common,
            out,
            grid,
            mu_min,
            mu_max,
            t_min,
            t_max,
            v_weak,
            v_strong,
            qmax,
        } => run_phase5(
            &common,
            &out,
            grid,
            mu_min,
            mu_max,
            Axis::new(t_min, t_max, grid.y_points),
            v_weak,
            v_strong,
            qmax,
        ),
        Command::Validate {
            common,
            out,
            oracle_ring,
            defect_ring,
            pair_multiplicity,
        } => {
            if pair_multiplicity == 0 {
                return Err(CliError::Usage("--pair-multiplicity must be positive".into()));
            }
            let opts = ValidationOptions {
                oracle_ring,
                defect_ring,
                pair_multiplicity,
                ..Default::default()
            };
            run_validate(&common, out.as_deref(), opts)
        }
        Command::Params {
            config,
            frequency_convention,
        } => run_params(config.as_deref(), frequency_convention),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("jch: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

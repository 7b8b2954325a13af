//! Command-line frontend: reproducible solver runs serialized as CSV, JSON,
//! and simple SVG plots, each output accompanied by a run manifest.
//!
//! Exit codes: 0 success, 2 numerical-quality failure (e.g. an unresolved
//! mode), 64 usage error, 1 I/O failure.

mod output;

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use boxwell::analytic::{self, PhiForm};
use boxwell::domain::{BoxConfig, MomentumGrid, QuantumNumber};
use boxwell::mollifier::{self, OperatorVariant};
use boxwell::moments::{self, MomentError, MomentRule, Verdict};
use boxwell::momsolver::{
    convergence_study, ComplexOperatorMatrix, OperatorOptions, SolveError, StudyResolution,
};

const EXIT_OK: i32 = 0;
const EXIT_IO: i32 = 1;
const EXIT_QUALITY: i32 = 2;
const EXIT_USAGE: i32 = 64;

#[derive(Parser)]
#[command(
    name = "boxwell",
    version,
    about = "Spectral toolkit for the wall-corrected infinite-well Hamiltonian"
)]
struct Cli {
    #[command(flatten)]
    physics: PhysicsArgs,

    /// Directory for output files (defaults to $BOXWELL_OUT_DIR, then `.`)
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct PhysicsArgs {
    /// Particle mass (overrides the config file)
    #[arg(long, global = true)]
    mass: Option<f64>,

    /// Reduced Planck constant (overrides the config file)
    #[arg(long, global = true)]
    hbar: Option<f64>,

    /// Box length (overrides the config file)
    #[arg(long, global = true)]
    length: Option<f64>,

    /// Flat key = value file with keys m, hbar, L
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the momentum-space integral equation and match modes against
    /// the analytic spectrum
    Spectrum {
        /// Highest quantum number to match
        #[arg(long, default_value_t = 5)]
        n_max: u32,
        /// Momentum cutoff in units of p0 = pi hbar / L
        #[arg(long, default_value_t = 60.0)]
        cutoff_p0: f64,
        /// Total Gauss-Legendre panels over [-P, P] (even)
        #[arg(long, default_value_t = 104)]
        panels: usize,
        /// Per-panel quadrature order
        #[arg(long, default_value_t = 8)]
        order: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Tabulate the momentum wavefunction and density of one mode
    Momdist {
        #[arg(long, default_value_t = 1)]
        n: u32,
        /// Lower end of the momentum range, in units of p0
        #[arg(long, default_value_t = -5.0, allow_hyphen_values = true)]
        p_min: f64,
        /// Upper end of the momentum range, in units of p0
        #[arg(long, default_value_t = 5.0, allow_hyphen_values = true)]
        p_max: f64,
        /// Number of evenly spaced samples (endpoints included)
        #[arg(long, default_value_t = 1001)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Classify truncated momentum moments over a geometric cutoff ladder
    Moments {
        #[arg(long, default_value_t = 1)]
        n: u32,
        /// Largest half-power: reports are written for k = 0 ..= k_max (max 4)
        #[arg(long, default_value_t = 2)]
        k_max: u32,
        /// Comma-separated cutoffs in units of p0, geometric, at least 4
        #[arg(long, default_value = "50,100,200,400")]
        cutoffs: String,
    },
    /// Weak-form verification of the mollified wall-corrected operator
    Verify {
        #[arg(long, default_value_t = 2)]
        n_max: u32,
        /// Comma-separated smoothing widths, absolute (`0.01`) or relative
        /// to the box length (`L/100`)
        #[arg(long, default_value = "L/50,L/100,L/200")]
        eps_list: String,
        #[arg(long, value_enum, default_value_t = VariantArg::Both)]
        variant: VariantArg,
    },
    /// Eigenvalue convergence study over a cutoff schedule
    Converge {
        #[arg(long, default_value_t = 3)]
        n_max: u32,
        /// Comma-separated cutoffs in units of p0 (at least 2)
        #[arg(long, default_value = "4,8,16,32")]
        schedule: String,
        /// Gauss-Legendre panels per unit of p0
        #[arg(long, default_value_t = 104.0 / 60.0)]
        density: f64,
        /// Per-panel quadrature order
        #[arg(long, default_value_t = 8)]
        order: usize,
        /// Also write a log-error SVG plot
        #[arg(long, default_value_t = false)]
        svg: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Ratio,
    Plain,
    Both,
}

enum CliError {
    Usage(String),
    Quality(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Quality(_) => EXIT_QUALITY,
            CliError::Io(_) => EXIT_IO,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Quality(m) | CliError::Io(m) => m,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::ModeNotResolved { .. } => CliError::Quality(e.to_string()),
            SolveError::TooFewResolutions { .. } => CliError::Usage(e.to_string()),
            other => CliError::Quality(other.to_string()),
        }
    }
}

impl From<MomentError> for CliError {
    fn from(e: MomentError) -> Self {
        match e {
            MomentError::InconsistentGrowth { .. } => CliError::Quality(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match run(cli) {
        Ok(()) => std::process::exit(EXIT_OK),
        Err(e) => {
            eprintln!("boxwell: {}", e.message());
            std::process::exit(e.exit_code());
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = resolve_config(&cli.physics)?;
    let out_dir = cli
        .out_dir
        .or_else(|| std::env::var_os("BOXWELL_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    if !out_dir.exists() {
        std::fs::create_dir_all(&out_dir)?;
    }
    match cli.command {
        Command::Spectrum { n_max, cutoff_p0, panels, order, format } => {
            cmd_spectrum(&cfg, &out_dir, n_max, cutoff_p0, panels, order, format)
        }
        Command::Momdist { n, p_min, p_max, samples, format } => {
            cmd_momdist(&cfg, &out_dir, n, p_min, p_max, samples, format)
        }
        Command::Moments { n, k_max, cutoffs } => cmd_moments(&cfg, &out_dir, n, k_max, &cutoffs),
        Command::Verify { n_max, eps_list, variant } => {
            cmd_verify(&cfg, &out_dir, n_max, &eps_list, variant)
        }
        Command::Converge { n_max, schedule, density, order, svg } => {
            cmd_converge(&cfg, &out_dir, n_max, &schedule, density, order, svg)
        }
    }
}

fn resolve_config(args: &PhysicsArgs) -> Result<BoxConfig, CliError> {
    let mut mass = 1.0;
    let mut hbar = 1.0;
    let mut length = 1.0;
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| {
                    CliError::Usage(format!(
                        "config line {} is not `key = value`: {raw:?}",
                        lineno + 1
                    ))
                })?;
            let parsed: f64 = value.parse().map_err(|_| {
                CliError::Usage(format!("config value for {key} is not a number: {value:?}"))
            })?;
            match key {
                "m" | "mass" => mass = parsed,
                "hbar" => hbar = parsed,
                "L" | "length" => length = parsed,
                other => {
                    return Err(CliError::Usage(format!("unknown config key {other:?}")));
                }
            }
        }
    }
    if let Some(v) = args.mass {
        mass = v;
    }
    if let Some(v) = args.hbar {
        hbar = v;
    }
    if let Some(v) = args.length {
        length = v;
    }
    BoxConfig::new(mass, hbar, length).map_err(|e| CliError::Usage(e.to_string()))
}

fn quantum(n: u32) -> Result<QuantumNumber, CliError> {
    QuantumNumber::new(n).map_err(|e| CliError::Usage(e.to_string()))
}

fn parse_list(text: &str, what: &str) -> Result<Vec<f64>, CliError> {
    let values: Result<Vec<f64>, _> =
        text.split(',').map(|s| s.trim().parse::<f64>()).collect();
    let values =
        values.map_err(|_| CliError::Usage(format!("cannot parse {what} list {text:?}")))?;
    if values.is_empty() {
        return Err(CliError::Usage(format!("{what} list is empty")));
    }
    Ok(values)
}

fn physics_json(cfg: &BoxConfig) -> serde_json::Value {
    json!({ "mass": cfg.mass(), "hbar": cfg.hbar(), "length": cfg.length() })
}

#[allow(clippy::too_many_arguments)]
fn cmd_spectrum(
    cfg: &BoxConfig,
    out_dir: &Path,
    n_max: u32,
    cutoff_p0: f64,
    panels: usize,
    order: usize,
    format: Format,
) -> Result<(), CliError> {
    quantum(n_max)?;
    if !(cutoff_p0.is_finite() && cutoff_p0 > 0.0) {
        return Err(CliError::Usage(format!("cutoff must be positive, got {cutoff_p0}")));
    }
    let grid = Arc::new(
        MomentumGrid::gauss_legendre(cutoff_p0 * cfg.momentum_scale(), panels, order)
            .map_err(|e| CliError::Usage(e.to_string()))?,
    );
    let operator = ComplexOperatorMatrix::build(&grid, cfg, OperatorOptions::default());
    let matched = operator.solve_spectrum()?.match_modes(cfg, n_max)?;

    let path = out_dir.join(match format {
        Format::Csv => "spectrum.csv",
        Format::Json => "spectrum.json",
    });
    match format {
        Format::Csv => {
            let rows: Vec<Vec<String>> = matched
                .modes()
                .iter()
                .map(|m| {
                    vec![
                        m.n.to_string(),
                        output::cell(m.analytic_energy),
                        output::cell(m.eigenvalue.re),
                        output::cell(m.eigenvalue.im),
                        output::cell(m.energy_rel_error),
                        output::cell(m.overlap),
                    ]
                })
                .collect();
            output::write_csv(
                &path,
                &["n", "E_analytic", "Re_lambda", "Im_lambda", "rel_error", "overlap"],
                &rows,
            )?;
        }
        Format::Json => {
            let modes: Vec<serde_json::Value> = matched
                .modes()
                .iter()
                .map(|m| {
                    json!({
                        "n": m.n,
                        "E_analytic": m.analytic_energy,
                        "Re_lambda": m.eigenvalue.re,
                        "Im_lambda": m.eigenvalue.im,
                        "rel_error": m.energy_rel_error,
                        "overlap": m.overlap,
                    })
                })
                .collect();
            output::write_json(&path, &json!({ "modes": modes }))?;
        }
    }
    output::write_manifest(
        "spectrum",
        json!({
            "physics": physics_json(cfg),
            "n_max": n_max,
            "cutoff_p0": cutoff_p0,
            "panels": panels,
            "order": order,
            "nodes": grid.len(),
            "kernel": "interior-limit with tail closure",
        }),
        &[path.clone()],
    )?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_momdist(
    cfg: &BoxConfig,
    out_dir: &Path,
    n: u32,
    p_min: f64,
    p_max: f64,
    samples: usize,
    format: Format,
) -> Result<(), CliError> {
    let qn = quantum(n)?;
    if samples < 2 {
        return Err(CliError::Usage(format!("need at least 2 samples, got {samples}")));
    }
    if p_min >= p_max {
        return Err(CliError::Usage(format!("empty momentum range [{p_min}, {p_max}]")));
    }
    let p0 = cfg.momentum_scale();
    let mut table = Vec::with_capacity(samples);
    for i in 0..samples {
        let frac = i as f64 / (samples - 1) as f64;
        let p = (p_min + (p_max - p_min) * frac) * p0;
        let phi = analytic::phi(p, qn, cfg, PhiForm::Auto).expect("Auto evaluation is total");
        table.push((p, analytic::mom_density(p, qn, cfg), phi));
    }

    let path = out_dir.join(match format {
        Format::Csv => "momdist.csv",
        Format::Json => "momdist.json",
    });
    match format {
        Format::Csv => {
            let rows: Vec<Vec<String>> = table
                .iter()
                .map(|(p, d, phi)| {
                    vec![
                        output::cell(*p),
                        output::cell(*d),
                        output::cell(phi.re),
                        output::cell(phi.im),
                    ]
                })
                .collect();
            output::write_csv(&path, &["p", "density", "phi_re", "phi_im"], &rows)?;
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = table
                .iter()
                .map(|(p, d, phi)| {
                    json!({ "p": p, "density": d, "phi_re": phi.re, "phi_im": phi.im })
                })
                .collect();
            output::write_json(&path, &json!({ "n": n, "rows": rows }))?;
        }
    }
    output::write_manifest(
        "momdist",
        json!({
            "physics": physics_json(cfg),
            "n": n,
            "p_min_p0": p_min,
            "p_max_p0": p_max,
            "samples": samples,
        }),
        &[path.clone()],
    )?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_moments(
    cfg: &BoxConfig,
    out_dir: &Path,
    n: u32,
    k_max: u32,
    cutoffs_text: &str,
) -> Result<(), CliError> {
    let qn = quantum(n)?;
    if k_max > 4 {
        return Err(CliError::Usage(format!(
            "k_max is capped at 4 (truncated values overflow quickly), got {k_max}"
        )));
    }
    let p0 = cfg.momentum_scale();
    let cutoffs: Vec<f64> = parse_list(cutoffs_text, "cutoff")?.iter().map(|c| c * p0).collect();
    let rule = MomentRule::default();

    let mut outputs = Vec::new();
    for k in 0..=k_max {
        let report = moments::classify_moment(qn, k, &cutoffs, cfg, &rule)?;
        let verdict = match report.verdict {
            Verdict::Converged { value, tail_estimate } => {
                json!({ "converged": { "value": value, "tail_estimate": tail_estimate } })
            }
            Verdict::Diverges => json!({ "diverges": {} }),
        };
        let value = json!({
            "n": report.n,
            "k": report.k,
            "cutoffs": report.cutoffs,
            "values": report.values,
            "verdict": verdict,
            "fit": {
                "exponent": report.fit.exponent,
                "coefficient": report.fit.coefficient,
                "residual": report.fit.residual,
            },
        });
        let path = out_dir.join(format!("moments_n{n}_k{k}.json"));
        output::write_json(&path, &value)?;
        println!("wrote {}", path.display());
        outputs.push(path);
    }
    output::write_manifest(
        "moments",
        json!({
            "physics": physics_json(cfg),
            "n": n,
            "k_max": k_max,
            "cutoffs": cutoffs,
            "panels_per_period": rule.panels_per_period,
            "order": rule.order,
        }),
        &outputs,
    )?;
    Ok(())
}

fn parse_eps_list(text: &str, cfg: &BoxConfig) -> Result<Vec<f64>, CliError> {
    let parse_entry = |entry: &str| -> Option<f64> {
        let entry = entry.trim();
        if let Some(divisor) = entry.strip_prefix("L/") {
            divisor.parse::<f64>().ok().map(|d| cfg.length() / d)
        } else {
            entry.parse::<f64>().ok()
        }
    };
    let values: Option<Vec<f64>> = text.split(',').map(parse_entry).collect();
    match values {
        Some(v) if !v.is_empty() && v.iter().all(|&e| e.is_finite() && e > 0.0) => Ok(v),
        _ => Err(CliError::Usage(format!("cannot parse eps list {text:?}"))),
    }
}

fn cmd_verify(
    cfg: &BoxConfig,
    out_dir: &Path,
    n_max: u32,
    eps_text: &str,
    variant: VariantArg,
) -> Result<(), CliError> {
    quantum(n_max)?;
    let eps_list = parse_eps_list(eps_text, cfg)?;
    let (variants, with_equivalence): (Vec<OperatorVariant>, bool) = match variant {
        VariantArg::Ratio => (vec![OperatorVariant::Ratio], false),
        VariantArg::Plain => (vec![OperatorVariant::Plain], false),
        VariantArg::Both => (vec![OperatorVariant::Ratio, OperatorVariant::Plain], true),
    };
    let report = mollifier::residual_sweep(n_max, &eps_list, &variants, with_equivalence, cfg)
        .map_err(|e| CliError::Usage(e.to_string()))?;

    let path = out_dir.join("verify.csv");
    let rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                output::cell(r.eps),
                r.variant.to_string(),
                r.testfn_id.clone(),
                output::cell(r.residual),
                r.equivalence_diff.map(output::cell).unwrap_or_default(),
            ]
        })
        .collect();
    output::write_csv(
        &path,
        &["n", "epsilon", "variant", "testfn_id", "residual", "equivalence_diff"],
        &rows,
    )?;
    output::write_manifest(
        "verify",
        json!({
            "physics": physics_json(cfg),
            "n_max": n_max,
            "eps_list": eps_list,
            "variant": match variant {
                VariantArg::Ratio => "ratio",
                VariantArg::Plain => "plain",
                VariantArg::Both => "both",
            },
        }),
        &[path.clone()],
    )?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_converge(
    cfg: &BoxConfig,
    out_dir: &Path,
    n_max: u32,
    schedule_text: &str,
    density: f64,
    order: usize,
    svg: bool,
) -> Result<(), CliError> {
    quantum(n_max)?;
    if !(density.is_finite() && density > 0.0) {
        return Err(CliError::Usage(format!("density must be positive, got {density}")));
    }
    let cutoffs_p0 = parse_list(schedule_text, "schedule")?;
    if cutoffs_p0.len() < 2 {
        return Err(CliError::Usage(format!(
            "a convergence schedule needs at least 2 cutoffs, got {}",
            cutoffs_p0.len()
        )));
    }
    let p0 = cfg.momentum_scale();
    let schedule: Vec<StudyResolution> = cutoffs_p0
        .iter()
        .map(|&c| {
            let panels = (((c * density) / 2.0).ceil() as usize).max(1) * 2;
            StudyResolution { cutoff: c * p0, panels, order }
        })
        .collect();
    let study = convergence_study(cfg, n_max, &schedule, OperatorOptions::default())?;

    let path = out_dir.join("converge.csv");
    let rows: Vec<Vec<String>> = study
        .rows()
        .iter()
        .map(|r| {
            vec![
                output::cell(r.cutoff / p0),
                r.panels.to_string(),
                r.order.to_string(),
                r.nodes.to_string(),
                r.n.to_string(),
                output::cell(r.energy_rel_error),
                output::cell(r.overlap),
                output::cell(r.im_residue),
            ]
        })
        .collect();
    output::write_csv(
        &path,
        &[
            "cutoff_p0",
            "panels",
            "order",
            "nodes",
            "n",
            "energy_rel_error",
            "overlap",
            "im_residue",
        ],
        &rows,
    )?;
    let mut outputs = vec![path.clone()];

    if svg {
        let series: Vec<(String, Vec<f64>)> =
            (1..=n_max).map(|n| (format!("n={n}"), study.energy_errors(n))).collect();
        let svg_path = out_dir.join("converge.svg");
        output::write_error_svg(&svg_path, &series)?;
        println!("wrote {}", svg_path.display());
        outputs.push(svg_path);
    }

    for n in 1..=n_max {
        let last = if study.final_step_nonincreasing(n) { "non-increasing" } else { "increasing" };
        let last_two =
            if study.final_steps_nonincreasing(n) { "non-increasing" } else { "increasing" };
        println!("n={n}: final step {last}; final two steps {last_two}");
    }
    output::write_manifest(
        "converge",
        json!({
            "physics": physics_json(cfg),
            "n_max": n_max,
            "schedule_p0": cutoffs_p0,
            "density_panels_per_p0": density,
            "order": order,
        }),
        &outputs,
    )?;
    println!("wrote {}", path.display());
    Ok(())
}

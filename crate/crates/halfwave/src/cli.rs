//! The `halfwave` command-line surface: spectrum tables, eigenfunction
//! sampling, forward-transform grids, and the verification suite, emitted
//! as CSV or JSON with reproducible numeric payloads.
//!
//! Exit codes: 0 success, 1 verification/accuracy failure, 2 usage error.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use crate::dirac::{
    coupling, ode_residual, radial_eigenfunction, spectrum_table, QuantumState,
    FINE_STRUCTURE_CONST,
};
use crate::profile::{PowerExpTerm, RadialProfile, SampledProfile};
use crate::report::{fmt_float, render, Cell, OutputFormat, TableDoc};
use crate::transform::{forward_transform, TransformOrder, WaveletRegime};
use crate::verify::{render_json, render_text, run as run_suite, Suite, VerifyConfig};

#[derive(Debug, Parser)]
#[command(
    name = "halfwave",
    about = "Bi-orthogonal wavelet transform on the half-line and the relativistic hydrogen spectrum",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    SpecialFunctions,
    Transform,
    Inverse,
    Dirac,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::SpecialFunctions => Suite::SpecialFunctions,
            SuiteArg::Transform => Suite::Transform,
            SuiteArg::Inverse => Suite::Inverse,
            SuiteArg::Dirac => Suite::Dirac,
            SuiteArg::All => Suite::All,
        }
    }
}

#[derive(Debug, Args)]
struct EmitArgs {
    /// Output format
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Output path (standard output when omitted)
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fine-structure spectrum table for a hydrogen-like ion
    Spectrum {
        /// Number of protons in the nucleus
        #[arg(long)]
        protons: u32,
        /// Largest |kappa| to include
        #[arg(long)]
        kappa_max: u32,
        /// Largest radial index to include
        #[arg(long)]
        n_max: u32,
        /// Fine-structure constant override
        #[arg(long, default_value_t = FINE_STRUCTURE_CONST)]
        alpha_fs: f64,
        #[command(flatten)]
        emit: EmitArgs,
    },
    /// Sample one normalized radial eigenspinor (f, g) on a q-grid
    Eigenfunction {
        #[arg(long)]
        protons: u32,
        /// Relativistic quantum number chi (nonzero integer)
        #[arg(long)]
        kappa: i32,
        /// Radial index
        #[arg(long)]
        n: u32,
        #[arg(long)]
        q_min: f64,
        #[arg(long)]
        q_max: f64,
        #[arg(long)]
        points: usize,
        /// Append per-point relative residuals of the radial system
        #[arg(long)]
        residuals: bool,
        #[arg(long, default_value_t = FINE_STRUCTURE_CONST)]
        alpha_fs: f64,
        #[command(flatten)]
        emit: EmitArgs,
    },
    /// Evaluate the forward transform of a profile on a half-plane grid
    Transform {
        /// Profile spec: "pow-exp: p=<real>, s=<complex>, C=<complex>[; ...]"
        /// or "file:<path>" (CSV columns q, Re f[, Im f])
        #[arg(long)]
        profile: String,
        /// Transform order
        #[arg(long)]
        gamma: f64,
        /// Translation grid as LO:HI:STEPS
        #[arg(long)]
        b_range: String,
        /// Dilation grid as LO:HI:STEPS (LO > 0)
        #[arg(long)]
        a_range: String,
        #[command(flatten)]
        emit: EmitArgs,
    },
    /// Run the named verification suite and report pass/fail per check
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
        /// Seed for the randomized checks (recorded in the report)
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Relative tolerance for the loose comparison checks
        #[arg(long)]
        tol: Option<f64>,
        /// Quadrature-oracle relative tolerance
        #[arg(long)]
        quad_tol: Option<f64>,
        /// Fault injection: detune the eigen-spinor energy by 1%
        #[arg(long)]
        perturb_epsilon: bool,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Parse a complex literal: `2`, `-1.5`, `i`, `-i`, `0.5i`, `1+2i`, `1.5-0.5i`.
fn parse_complex(text: &str) -> Result<Complex64, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err("empty complex literal".into());
    }
    if !s.ends_with('i') {
        return s
            .parse::<f64>()
            .map(|re| Complex64::new(re, 0.0))
            .map_err(|e| format!("bad real literal '{text}': {e}"));
    }
    let body = &s[..s.len() - 1];
    // split body into real part and imaginary coefficient at the last +/-
    // that is not an exponent sign
    let bytes = body.as_bytes();
    let mut split = None;
    for idx in (1..bytes.len()).rev() {
        let c = bytes[idx] as char;
        if (c == '+' || c == '-') && !matches!(bytes[idx - 1] as char, 'e' | 'E') {
            split = Some(idx);
            break;
        }
    }
    let (re_str, im_str) = match split {
        Some(idx) => (&body[..idx], &body[idx..]),
        None => ("0", body),
    };
    let im = match im_str {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => other
            .parse::<f64>()
            .map_err(|e| format!("bad imaginary part '{text}': {e}"))?,
    };
    let re = if re_str.is_empty() {
        0.0
    } else {
        re_str
            .parse::<f64>()
            .map_err(|e| format!("bad real part '{text}': {e}"))?
    };
    Ok(Complex64::new(re, im))
}

fn parse_range(text: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("range '{text}' is not LO:HI:STEPS"));
    }
    let lo: f64 = parts[0].parse().map_err(|e| format!("bad range low: {e}"))?;
    let hi: f64 = parts[1].parse().map_err(|e| format!("bad range high: {e}"))?;
    let steps: usize = parts[2]
        .parse()
        .map_err(|e| format!("bad range steps: {e}"))?;
    if steps == 0 {
        return Err("range needs at least one step".into());
    }
    if steps == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..steps)
        .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
        .collect())
}

/// Parse the profile mini-language.
fn parse_profile(spec: &str) -> Result<RadialProfile, String> {
    let spec = spec.trim();
    if let Some(path) = spec.strip_prefix("file:") {
        return load_sampled_profile(path.trim());
    }
    let body = spec
        .strip_prefix("pow-exp:")
        .ok_or_else(|| format!("profile '{spec}' is neither 'pow-exp: ...' nor 'file:<path>'"))?;
    let mut terms = Vec::new();
    for group in body.split(';') {
        if group.trim().is_empty() {
            continue;
        }
        let mut power = None;
        let mut rate = Complex64::new(1.0, 0.0);
        let mut coeff = Complex64::new(1.0, 0.0);
        for field in group.split(',') {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| format!("field '{field}' is not key=value"))?;
            match key.trim() {
                "p" => {
                    power = Some(
                        value
                            .trim()
                            .parse::<f64>()
                            .map_err(|e| format!("bad power: {e}"))?,
                    )
                }
                "s" => rate = parse_complex(value)?,
                "C" | "c" => coeff = parse_complex(value)?,
                other => return Err(format!("unknown profile field '{other}'")),
            }
        }
        let power = power.ok_or("each pow-exp term needs p=<real>")?;
        terms.push(PowerExpTerm::new(coeff, power, rate).map_err(|e| e.to_string())?);
    }
    if terms.is_empty() {
        return Err("profile has no terms".into());
    }
    Ok(RadialProfile::from_terms(terms))
}

fn load_sampled_profile(path: &str) -> Result<RadialProfile, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read '{path}': {e}"))?;
    let mut grid = Vec::new();
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() < 2 {
            return Err(format!("line {}: need columns q, Re f[, Im f]", lineno + 1));
        }
        let q: f64 = cols[0]
            .parse()
            .map_err(|e| format!("line {}: bad q: {e}", lineno + 1))?;
        let re: f64 = cols[1]
            .parse()
            .map_err(|e| format!("line {}: bad Re f: {e}", lineno + 1))?;
        let im: f64 = if cols.len() > 2 {
            cols[2]
                .parse()
                .map_err(|e| format!("line {}: bad Im f: {e}", lineno + 1))?
        } else {
            0.0
        };
        grid.push(q);
        values.push(Complex64::new(re, im));
    }
    let sampled = SampledProfile::new(grid, values, 1.0, None).map_err(|e| e.to_string())?;
    Ok(RadialProfile::Sampled(sampled))
}

fn regime_name(regime: WaveletRegime) -> &'static str {
    match regime {
        WaveletRegime::Admissible => "admissible",
        WaveletRegime::NonAdmissibleSquareIntegrable => "non-admissible",
        WaveletRegime::NonSquareIntegrable => "non-square-integrable",
    }
}

fn emit(table: &TableDoc, format: Format, output: Option<&PathBuf>) -> Result<(), String> {
    let text = render(table, format.into());
    match output {
        Some(path) => fs::write(path, text).map_err(|e| format!("cannot write output: {e}")),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_report(text: &str, output: Option<&PathBuf>) -> Result<(), String> {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| format!("cannot write output: {e}")),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_spectrum(
    protons: u32,
    kappa_max: u32,
    n_max: u32,
    alpha_fs: f64,
    emit_args: &EmitArgs,
) -> Result<i32, String> {
    let rows = spectrum_table(protons, kappa_max, n_max, alpha_fs);
    let mut table = TableDoc::new(&[
        "term", "n", "kappa", "j2", "l", "gamma", "eps_over_m", "binding", "regime", "status",
    ]);
    table.meta("command", "spectrum");
    table.meta("protons", protons);
    table.meta("kappa_max", kappa_max);
    table.meta("n_max", n_max);
    table.meta("alpha_fs", fmt_float(alpha_fs));
    let mut accepted = 0usize;
    for r in &rows {
        if r.rejected.is_none() {
            accepted += 1;
        }
        table.row(vec![
            r.term_symbol.clone().into(),
            Cell::Int(r.n as i64),
            Cell::Int(r.kappa as i64),
            Cell::Int((2.0 * r.j) as i64),
            Cell::Int(r.l as i64),
            Cell::Float(r.gamma),
            Cell::Float(r.epsilon_over_m),
            Cell::Float(r.binding),
            regime_name(r.regime).into(),
            r.rejected.clone().unwrap_or_else(|| "ok".into()).into(),
        ]);
    }
    emit(&table, emit_args.format, emit_args.output.as_ref())?;
    Ok(if accepted == 0 { 1 } else { 0 })
}

#[allow(clippy::too_many_arguments)]
fn cmd_eigenfunction(
    protons: u32,
    kappa: i32,
    n: u32,
    q_min: f64,
    q_max: f64,
    points: usize,
    residuals: bool,
    alpha_fs: f64,
    emit_args: &EmitArgs,
) -> Result<i32, String> {
    if !(q_min > 0.0 && q_max > q_min && points >= 2) {
        return Err("need 0 < q-min < q-max and at least two points".into());
    }
    let state = QuantumState::from_kappa(protons, kappa, n, alpha_fs).map_err(|e| e.to_string())?;
    let params = coupling(&state).map_err(|e| e.to_string())?;
    let spinor = radial_eigenfunction(&params).map_err(|e| e.to_string())?;

    let grid: Vec<f64> = (0..points)
        .map(|i| q_min + (q_max - q_min) * i as f64 / (points - 1) as f64)
        .collect();

    let columns: &[&str] = if residuals {
        &["q", "f", "g", "residual_rel"]
    } else {
        &["q", "f", "g"]
    };
    let mut table = TableDoc::new(columns);
    table.meta("command", "eigenfunction");
    table.meta("protons", protons);
    table.meta("kappa", kappa);
    table.meta("n", n);
    table.meta("alpha_fs", fmt_float(alpha_fs));
    table.meta("gamma", fmt_float(params.gamma));
    table.meta("eps_over_m", fmt_float(params.epsilon_over_m));
    table.meta("normalization_constant", fmt_float(spinor.norm_constant));

    for &q in &grid {
        let f = spinor.f.eval(q).re;
        let g = spinor.g.eval(q).re;
        let mut row = vec![Cell::Float(q), Cell::Float(f), Cell::Float(g)];
        if residuals {
            let res = ode_residual(&params, &spinor, &[q]).map_err(|e| e.to_string())?;
            row.push(Cell::Float(res));
        }
        table.row(row);
    }
    emit(&table, emit_args.format, emit_args.output.as_ref())?;
    Ok(0)
}

fn cmd_transform(
    profile_spec: &str,
    gamma: f64,
    b_range: &str,
    a_range: &str,
    emit_args: &EmitArgs,
) -> Result<i32, String> {
    let profile = parse_profile(profile_spec)?;
    let order = TransformOrder::new(gamma).map_err(|e| e.to_string())?;
    let b_grid = parse_range(b_range)?;
    let a_grid = parse_range(a_range)?;
    if a_grid.iter().any(|&a| a <= 0.0) {
        return Err("dilation grid must be strictly positive".into());
    }

    let mut table = TableDoc::new(&["b", "a", "re_f", "im_f"]);
    table.meta("command", "transform");
    table.meta("profile", profile_spec);
    table.meta("gamma", fmt_float(gamma));
    table.meta("grid_order", "b-major");
    for &b in &b_grid {
        for &a in &a_grid {
            let zbar = Complex64::new(b, -a);
            let value = forward_transform(&profile, order, zbar).map_err(|e| e.to_string())?;
            table.row(vec![
                Cell::Float(b),
                Cell::Float(a),
                Cell::Float(value.re),
                Cell::Float(value.im),
            ]);
        }
    }
    emit(&table, emit_args.format, emit_args.output.as_ref())?;
    Ok(0)
}

fn cmd_verify(
    suite: SuiteArg,
    seed: u64,
    tol: Option<f64>,
    quad_tol: Option<f64>,
    perturb_epsilon: bool,
    format: Format,
    output: Option<&PathBuf>,
) -> Result<i32, String> {
    let mut cfg = VerifyConfig {
        seed,
        perturb_epsilon,
        ..VerifyConfig::default()
    };
    if let Some(t) = tol {
        if !(t > 0.0) {
            return Err("tolerance must be positive".into());
        }
        cfg.verify_rel = t;
    }
    if let Some(t) = quad_tol {
        if !(t > 0.0) {
            return Err("tolerance must be positive".into());
        }
        cfg.quadrature_rel = t;
    }
    let checks = run_suite(suite.into(), &cfg);
    let text = match format {
        Format::Json => render_json(&checks, &cfg),
        Format::Csv => render_text(&checks, &cfg),
    };
    write_report(&text, output)?;
    Ok(if checks.iter().all(|c| c.passed) { 0 } else { 1 })
}

/// Parse arguments from the environment and run; returns the process exit
/// code. Usage errors exit with code 2 via clap.
pub fn main() -> i32 {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Spectrum {
            protons,
            kappa_max,
            n_max,
            alpha_fs,
            emit,
        } => cmd_spectrum(*protons, *kappa_max, *n_max, *alpha_fs, emit),
        Command::Eigenfunction {
            protons,
            kappa,
            n,
            q_min,
            q_max,
            points,
            residuals,
            alpha_fs,
            emit,
        } => cmd_eigenfunction(
            *protons, *kappa, *n, *q_min, *q_max, *points, *residuals, *alpha_fs, emit,
        ),
        Command::Transform {
            profile,
            gamma,
            b_range,
            a_range,
            emit,
        } => cmd_transform(profile, *gamma, b_range, a_range, emit),
        Command::Verify {
            suite,
            seed,
            tol,
            quad_tol,
            perturb_epsilon,
            format,
            output,
        } => cmd_verify(
            *suite,
            *seed,
            *tol,
            *quad_tol,
            *perturb_epsilon,
            *format,
            output.as_ref(),
        ),
    };
    match outcome {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            1
        }
    }
}

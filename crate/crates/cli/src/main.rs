//! `levyfactor`: classify, map, verify and simulate infinitely divisible laws.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 inconclusive result or a
//! verification that came out false.

mod law;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use levyfactor::catalogue::{log_x_over_sinh, registry, LawInfo};
use levyfactor::maps::{inv_i, inv_j, inv_ji, lf_characteristic, map_i, map_j, verify_factorization, IdentityVerdict};
use levyfactor::simulate::{
    empirical_cf, exponential, sample_cp_path_integral, sample_laplace_series, verify_factorization_mc,
    CoefficientRule, Decay, SimConfig, SimResult, SimRng,
};
use levyfactor::spectral::{classify_with_tolerance, dderiv_relation, lm_from_g, log_space, Side};
use levyfactor::tolerances::{DIVIDED_DIFFERENCE, IDENTITY};
use levyfactor::{ClassTested, Error as CoreError, Grid, LevyExponent, LogMoment, Verdict};

use law::{Law, LawDocument};

#[derive(Parser)]
#[command(
    name = "levyfactor",
    version,
    about = "Factorization calculus for selfdecomposable laws"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(clap::Args)]
struct Common {
    /// Left end of the t grid.
    #[arg(long, global = true, allow_negative_numbers = true)]
    grid_min: Option<f64>,
    /// Right end of the t grid.
    #[arg(long, global = true, allow_negative_numbers = true)]
    grid_max: Option<f64>,
    #[arg(long, global = true)]
    grid_points: Option<usize>,
    /// Tolerance used for the verdict.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Monte Carlo sample size.
    #[arg(long, global = true, default_value_t = 100_000)]
    n: usize,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Test class membership of a law's spectral density (JSON report).
    Classify {
        /// L, U, Lf, Lf_c3, L<n>, L<n>f, ID_log or integrable.
        #[arg(long)]
        class: String,
        law: String,
    },
    /// Tabulate a mapped exponent as CSV (t, re, im, err).
    Map {
        #[arg(long, value_enum)]
        op: Op,
        /// Proceed when the logarithmic moment is not known to be finite.
        #[arg(long)]
        force: bool,
        law: String,
    },
    /// Check the factorization identity.
    Verify {
        #[arg(long, value_enum, default_value_t = Mode::Exponent)]
        mode: Mode,
        law: String,
    },
    /// Sample a random integral or Laplace series and compare characteristic functions (CSV).
    Simulate {
        /// For cp_exp: integrate against e^{-s} on [0, T] or s on [0, 1].
        #[arg(long, value_enum, default_value_t = DecayArg::Exp)]
        decay: DecayArg,
        /// Horizon T of the exponential integral.
        #[arg(long, default_value_t = levyfactor::simulate::DEFAULT_HORIZON)]
        horizon: f64,
        /// Number of terms K kept in a Laplace series.
        #[arg(long, default_value_t = levyfactor::simulate::DEFAULT_SERIES_CUTOFF)]
        cutoff: usize,
        law: String,
    },
    /// List the catalogue of closed-form laws.
    Catalogue {
        #[arg(long)]
        json: bool,
        /// Show one entry.
        #[arg(long)]
        law: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Op {
    #[value(name = "I")]
    I,
    #[value(name = "J")]
    J,
    #[value(name = "invI")]
    InvI,
    #[value(name = "invJ")]
    InvJ,
    #[value(name = "invJI")]
    InvJI,
    #[value(name = "lf")]
    Lf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exponent,
    Spectral,
    Mc,
}

#[derive(Clone, Copy, ValueEnum)]
enum DecayArg {
    Exp,
    Ramp,
}

/// Why a command did not succeed, and its exit code.
enum Failure {
    Usage(anyhow::Error),
    Numerical(anyhow::Error),
    /// Already reported on stdout.
    Negative,
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast_ref::<CoreError>() {
            Some(
                CoreError::InvalidParameter(_)
                | CoreError::InvalidGrid(_)
                | CoreError::UnknownLaw(_)
                | CoreError::Unsupported(_),
            )
            | None => Failure::Usage(e),
            Some(_) => Failure::Numerical(e),
        }
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        anyhow::Error::from(e).into()
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(1);
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(e)) => {
            eprintln!("numerical failure: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Negative) => ExitCode::from(2),
    }
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(value) = std::env::var("LEVYFACTOR_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .with_context(|| format!("LEVYFACTOR_THREADS must be a nonnegative integer, got `{value}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n.max(1))
        .build_global()
        .context("configuring the thread pool")
}

fn run(cli: Cli) -> Outcome {
    let c = &cli.common;
    if let Some(tol) = c.tol {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(Failure::Usage(anyhow!("--tol must be positive, got {tol}")));
        }
    }
    match &cli.command {
        Command::Classify { class, law } => cmd_classify(c, class, law),
        Command::Map { op, force, law } => cmd_map(c, *op, *force, law),
        Command::Verify { mode, law } => cmd_verify(c, *mode, law),
        Command::Simulate {
            decay,
            horizon,
            cutoff,
            law,
        } => cmd_simulate(c, *decay, *horizon, *cutoff, law),
        Command::Catalogue { json, law } => cmd_catalogue(c, *json, law.as_deref()),
    }
}

fn output(c: &Common) -> anyhow::Result<Box<dyn Write>> {
    Ok(match &c.out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit_json<T: Serialize>(c: &Common, value: &T) -> anyhow::Result<()> {
    let mut out = output(c)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn grid(c: &Common, min: f64, max: f64, points: usize) -> anyhow::Result<Grid> {
    Ok(Grid::uniform(
        c.grid_min.unwrap_or(min),
        c.grid_max.unwrap_or(max),
        c.grid_points.unwrap_or(points),
    )?)
}

fn default_grid(c: &Common) -> anyhow::Result<Grid> {
    grid(
        c,
        -Grid::DEFAULT_HALF_WIDTH,
        Grid::DEFAULT_HALF_WIDTH,
        Grid::DEFAULT_POINTS,
    )
}

fn load(arg: &str) -> anyhow::Result<Law> {
    LawDocument::parse(arg)?.resolve()
}

fn cmd_classify(c: &Common, class: &str, arg: &str) -> Outcome {
    let class: ClassTested = class.parse()?;
    let law = load(arg)?;
    let m = law
        .spectral()
        .ok_or_else(|| anyhow!("`{}` has no spectral density to classify", law.name()))?;
    let tol = c.tol.unwrap_or(DIVIDED_DIFFERENCE);
    let report = classify_with_tolerance(m, class, tol);
    emit_json(
        c,
        &json!({
            "law": law.name(),
            "class": report.class_tested,
            "verdict": report.verdict,
            "witnesses": report.witnesses,
            "tolerance": report.tolerance,
            "stage": report.stage,
            "notes": report.notes,
        }),
    )?;
    if report.verdict == Verdict::Inconclusive {
        return Err(Failure::Negative);
    }
    Ok(())
}

fn cmd_map(c: &Common, op: Op, force: bool, arg: &str) -> Outcome {
    let law = load(arg)?;
    let psi = law.exponent();
    let needs_moment = matches!(op, Op::I | Op::Lf);
    if needs_moment && psi.log_moment() != LogMoment::Yes && !force {
        return Err(Failure::Usage(anyhow!(
            "`{}` is not known to have a finite logarithmic moment; pass --force to proceed",
            law.name()
        )));
    }
    let psi = if force && psi.log_moment() != LogMoment::Yes {
        psi.clone().with_log_moment(LogMoment::Unknown)
    } else {
        psi.clone()
    };
    let mapped: LevyExponent = match op {
        Op::I => map_i(&psi)?,
        Op::J => map_j(&psi),
        Op::InvI => inv_i(&psi),
        Op::InvJ => inv_j(&psi),
        Op::InvJI => inv_ji(&psi),
        Op::Lf => lf_characteristic(&psi)?,
    };
    let sampled = mapped.sample(&default_grid(c)?)?;
    let mut out = output(c).map_err(Failure::Usage)?;
    let op_name = op
        .to_possible_value()
        .map(|v| v.get_name().to_string())
        .unwrap_or_default();
    writeln!(out, "# law: {arg}").map_err(anyhow::Error::from)?;
    writeln!(out, "# op: {op_name}").map_err(anyhow::Error::from)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "re", "im", "err"]).map_err(anyhow::Error::from)?;
    for ((t, v), e) in sampled.t.iter().zip(&sampled.values).zip(&sampled.errors) {
        w.serialize((t, v.re, v.im, e)).map_err(anyhow::Error::from)?;
    }
    w.flush().map_err(anyhow::Error::from)?;
    Ok(())
}

fn verdict_exit(v: IdentityVerdict) -> Outcome {
    if v.holds() {
        Ok(())
    } else {
        Err(Failure::Negative)
    }
}

fn cmd_verify(c: &Common, mode: Mode, arg: &str) -> Outcome {
    match mode {
        Mode::Exponent => {
            let law = load(arg)?;
            let rep = verify_factorization(law.exponent(), &default_grid(c)?)?;
            let tol = c.tol.unwrap_or(IDENTITY);
            let verdict = IdentityVerdict::judge(rep.residual_sup, rep.error_estimate, tol);
            emit_json(
                c,
                &json!({
                    "law": law.name(),
                    "mode": "exponent",
                    "grid_points": rep.grid.len(),
                    "residual_sup": rep.residual_sup,
                    "error_estimate": rep.error_estimate,
                    "tolerance": tol,
                    "verdict": verdict,
                }),
            )?;
            verdict_exit(verdict)
        }
        Mode::Spectral => {
            let law = load(arg)?;
            let g = law
                .spectral()
                .ok_or_else(|| anyhow!("`{}` has no spectral density", law.name()))?;
            let m = lm_from_g(g)?;
            let side = if g.side(Side::Pos).is_zero() {
                Side::Neg
            } else {
                Side::Pos
            };
            let (lo, hi) = g.side(side).probe();
            let rep = dderiv_relation(g, &m, &log_space(lo, hi, 60))?;
            let tol = c.tol.unwrap_or(1e-6);
            let verdict = IdentityVerdict::judge(rep.residual_sup, 0.0, tol);
            emit_json(
                c,
                &json!({
                    "law": law.name(),
                    "mode": "spectral",
                    "points": rep.points.len(),
                    "residual_sup": rep.residual_sup,
                    "tolerance": tol,
                    "verdict": verdict,
                }),
            )?;
            verdict_exit(verdict)
        }
        Mode::Mc => {
            let doc = LawDocument::parse(arg)?;
            if doc.is_table() {
                return Err(Failure::Usage(anyhow!("Monte Carlo verification needs a named law")));
            }
            let cfg = SimConfig::new(c.seed, c.n, grid(c, -10.0, 10.0, 201)?);
            let result = verify_factorization_mc(&doc.law, &doc.params, &cfg)?;
            let sup = result.sup_distance.unwrap_or(f64::INFINITY);
            let tol = c.tol.unwrap_or(0.03f64.max(3.0 * result.ci_halfwidth));
            let verdict = IdentityVerdict::judge(sup, 0.0, tol);
            if let Some(path) = &c.out {
                let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
                result
                    .write_csv(&cfg, &doc.law, BufWriter::new(f))
                    .map_err(anyhow::Error::from)?;
            }
            let summary = json!({
                "law": doc.law,
                "mode": "mc",
                "seed": c.seed,
                "n": c.n,
                "sup_distance": sup,
                "ci_halfwidth": result.ci_halfwidth,
                "tolerance": tol,
                "verdict": verdict,
            });
            println!(
                "{}",
                serde_json::to_string_pretty(&summary).map_err(anyhow::Error::from)?
            );
            verdict_exit(verdict)
        }
    }
}

fn real(doc: &LawDocument, key: &str, default: f64) -> anyhow::Result<f64> {
    match doc.params.get(key) {
        None => Ok(default),
        Some(levyfactor::catalogue::ParamValue::Real(v)) => Ok(*v),
        Some(_) => bail!("`{key}` must be a number"),
    }
}

fn cmd_simulate(c: &Common, decay: DecayArg, horizon: f64, cutoff: usize, arg: &str) -> Outcome {
    let doc = LawDocument::parse(arg)?;
    let cfg = SimConfig {
        truncation: horizon,
        series_cutoff: cutoff,
        ..SimConfig::new(c.seed, c.n, grid(c, -10.0, 10.0, 201)?)
    };
    cfg.validate()?;
    // the catalogue entry validates the parameters
    let spec = match doc.resolve()? {
        Law::Catalogue(spec) => spec,
        Law::Table { .. } => return Err(Failure::Usage(anyhow!("tables cannot be simulated"))),
    };
    let cf_of = |e: &LevyExponent| -> Result<Vec<Complex64>, Failure> {
        Ok(e.sample(&cfg.t_grid)?.values.iter().map(|v| v.exp()).collect())
    };
    let result: SimResult = match doc.law.as_str() {
        "gamma" => {
            let (alpha, lambda) = (real(&doc, "alpha", 1.0)?, real(&doc, "lambda", 1.0)?);
            let s = sample_cp_path_integral(
                alpha,
                move |r: &mut SimRng| exponential(r, lambda),
                Decay::ExpDecay,
                &cfg,
            )?;
            empirical_cf(&s, &cfg.t_grid)?.with_target(cf_of(&spec.exponent)?)?
        }
        "cp_exp" => {
            let (alpha, lambda) = (real(&doc, "alpha", 1.0)?, real(&doc, "lambda", 1.0)?);
            let (d, target) = match decay {
                DecayArg::Exp => (Decay::ExpDecay, map_i(&spec.exponent)?),
                DecayArg::Ramp => (Decay::LinearRamp, map_j(&spec.exponent)),
            };
            let s = sample_cp_path_integral(alpha, move |r: &mut SimRng| exponential(r, lambda), d, &cfg)?;
            empirical_cf(&s, &cfg.t_grid)?.with_target(cf_of(&target)?)?
        }
        "laplace" | "laplace_series" => {
            let a = match doc.params.get("a") {
                Some(levyfactor::catalogue::ParamValue::List(v)) => v.clone(),
                Some(levyfactor::catalogue::ParamValue::Real(v)) => vec![*v],
                None => vec![1.0],
            };
            let s = sample_laplace_series(&CoefficientRule::Explicit(a), &cfg)?;
            empirical_cf(&s, &cfg.t_grid)?.with_target(cf_of(&spec.exponent)?)?
        }
        "d1" => {
            let u = real(&doc, "u", 1.0)?;
            let s = sample_laplace_series(
                &CoefficientRule::Harmonic {
                    scale: u / std::f64::consts::PI,
                },
                &cfg,
            )?;
            empirical_cf(&s, &cfg.t_grid)?.with_target_fn(|t| Complex64::new(log_x_over_sinh(t * u).exp(), 0.0))?
        }
        other => {
            return Err(Failure::Usage(anyhow!(
                "no sampler for `{other}`; supported: gamma, cp_exp, laplace, laplace_series, d1"
            )))
        }
    };
    let out = output(c)?;
    result.write_csv(&cfg, arg, out).map_err(anyhow::Error::from)?;
    Ok(())
}

fn describe(info: &LawInfo) -> String {
    let params: Vec<String> = info
        .params
        .iter()
        .map(|p| match p.default {
            Some(d) => format!("{}={d} ({})", p.name, p.range),
            None => format!("{} ({})", p.name, p.range),
        })
        .collect();
    let mut s = format!(
        "{}({})\n  {}\n  provenance: {}\n",
        info.name,
        params.join(", "),
        info.description,
        info.provenance
    );
    for k in &info.known_classes {
        s.push_str(&format!("  {}: {} ({})\n", k.class, k.verdict, k.note));
    }
    s
}

fn cmd_catalogue(c: &Common, json: bool, only: Option<&str>) -> Outcome {
    let mut entries = registry();
    if let Some(name) = only {
        entries.retain(|l| l.name == name);
        if entries.is_empty() {
            return Err(CoreError::UnknownLaw(name.to_string()).into());
        }
    }
    if json {
        emit_json(c, &entries)?;
        return Ok(());
    }
    let mut out = output(c)?;
    for (i, info) in entries.iter().enumerate() {
        if i > 0 {
            writeln!(out).map_err(anyhow::Error::from)?;
        }
        write!(out, "{}", describe(info)).map_err(anyhow::Error::from)?;
    }
    out.flush().map_err(anyhow::Error::from)?;
    Ok(())
}

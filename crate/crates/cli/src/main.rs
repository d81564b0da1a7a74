//! `akflow`: plan, build and verify deformed flows, and emit their plot data.
//!
//! Exit codes: 0 success, 1 a check or invariant failed, 2 bad configuration or input.

mod artifacts;
mod plots;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use base_field::{BaseFieldOracle, SergeraertField};
use cantor_schedule::{cantor_point, parse_rational, CantorAddress};
use clap::{Args, Parser, Subcommand};
use deformation_engine::{build_stack, general_levels, sergeraert_levels, BuildConfig, BuiltStack, DeformError, Mode};
use scalar_jet::{Prec, Scalar, MIN_PRECISION_BITS};
use serde::Serialize;
use time_chart::{Plan, SergeraertChart, TravelTable};
use verification::{run_all, run_one, Report, Suite, VerifyConfig, VerifyError};

use artifacts::{emit, load, require_hash, sha256_hex, to_json, PlanDoc, StackDoc};

#[derive(Parser, Debug)]
#[command(name = "akflow", version, about = "Deformed flows of a contracting field on the half-line")]
struct Cli {
    #[command(flatten)]
    run: RunConfig,
    #[command(subcommand)]
    command: Command,
}

/// Settings shared by all commands.
#[derive(Args, Debug, Clone)]
struct RunConfig {
    #[arg(long, global = true, env = "AKFLOW_PRECISION_BITS", default_value_t = 4096)]
    precision_bits: u32,
    /// Number of stages K.
    #[arg(long, global = true, default_value_t = 3)]
    steps: usize,
    /// Label of the first stage, `k₀ + 1`.
    #[arg(long, global = true, default_value_t = 1)]
    start: usize,
    /// Largest block of the base field.
    #[arg(long, global = true, default_value_t = 7)]
    n_max: u32,
    #[arg(long, global = true, default_value = "sergeraert")]
    mode: Mode,
    /// Points per interval or tile.
    #[arg(long, global = true, default_value_t = 9)]
    samples: usize,
    /// Seed of the random samples.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Cantor address, a string of 0 and 1.
    #[arg(long, global = true, default_value = "00")]
    address: CantorAddress,
    /// Output file, or directory for `emit-plots`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Where `verify` writes its report.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// CSV of ξ₀ and its first two derivatives on a geometric grid.
    InspectField {
        #[arg(long, default_value_t = 16)]
        per_octave: u32,
    },
    /// Travel table and orbit indices as JSON.
    Plan,
    /// Builds the conjugation stack from a plan.
    Build {
        #[arg(long)]
        plan: PathBuf,
    },
    /// Runs the checks on a built stack.
    Verify {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        stack: PathBuf,
        /// Points per sweep of the flow estimates.
        #[arg(long, default_value_t = 1024)]
        sweep: usize,
        /// Run only these checks.
        #[arg(long = "check")]
        checks: Vec<String>,
    },
    /// Jet of f_k^t at x.
    Flow {
        #[arg(long)]
        stack: PathBuf,
        #[arg(long)]
        stage: usize,
        /// Rational `a/b` or hex.
        #[arg(long, allow_hyphen_values = true)]
        time: String,
        /// Rational `a/b` or hex.
        #[arg(long)]
        x: String,
        #[arg(long, default_value_t = 2)]
        order: usize,
    },
    /// Interval sets and the component at an address.
    Cantor {
        #[arg(long)]
        stack: PathBuf,
    },
    /// Landscape, wave, Lf and interval CSVs.
    EmitPlots {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        stack: PathBuf,
    },
}

/// Failure with its exit code.
struct Exit(u8, anyhow::Error);

fn config_err(e: anyhow::Error) -> Exit {
    Exit(2, e)
}

/// Invariant and estimate violations are check failures; everything else is bad input.
fn classify(e: anyhow::Error) -> Exit {
    let deform = e
        .downcast_ref::<DeformError>()
        .or_else(|| match e.downcast_ref::<VerifyError>() {
            Some(VerifyError::Deform(d)) => Some(d),
            _ => None,
        });
    match deform {
        Some(DeformError::Invariant(_) | DeformError::Estimate(_)) => Exit(1, e),
        _ => Exit(2, e),
    }
}

impl RunConfig {
    fn validate(&self) -> Result<()> {
        if self.precision_bits < MIN_PRECISION_BITS {
            bail!("precision_bits must be at least {MIN_PRECISION_BITS}, got {}", self.precision_bits);
        }
        if self.steps == 0 || self.start == 0 {
            bail!("need at least one stage, labelled from 1");
        }
        if self.n_max < 4 {
            bail!("n_max must be at least 4, got {}", self.n_max);
        }
        // times reach about 2^{n_max⁴}; keep a quarter of the bits below the unit
        if 4 * u64::from(self.n_max).pow(4) > 3 * u64::from(self.precision_bits) {
            bail!(
                "n_max = {} needs precision_bits ≥ {} so that times keep a quarter of their bits",
                self.n_max,
                (4 * u64::from(self.n_max).pow(4)).div_ceil(3)
            );
        }
        Ok(())
    }

    fn verify_config(&self, precision_bits: u32, n_max: u32) -> VerifyConfig {
        let mut c = VerifyConfig::new(precision_bits);
        c.samples = self.samples;
        c.seed = self.seed;
        c.address = self.address.clone();
        c.oscillation_levels = (4..=n_max).collect();
        c
    }
}

fn chart(precision_bits: u32, n_max: u32) -> Result<SergeraertChart> {
    let table = TravelTable::build(SergeraertField::default(), Prec::new(precision_bits)?, n_max)?;
    Ok(SergeraertChart::new(table)?)
}

fn parse_scalar(s: &str, p: Prec) -> Result<Scalar> {
    if let Some(r) = parse_rational(s) {
        return Ok(Scalar::from_rational(&r, p));
    }
    Scalar::from_hex(s, p).with_context(|| format!("{s} is neither a rational nor a hex scalar"))
}

/// Loads a stack, rebuilding it from its record; invariant failures keep their type.
fn load_stack(path: &Path) -> Result<(StackDoc, String, BuiltStack), Exit> {
    let (doc, hash): (StackDoc, String) = load(path).map_err(config_err)?;
    let built = BuiltStack::from_record(&doc.stack).map_err(|e| classify(e.into()))?;
    Ok((doc, hash, built))
}

fn cmd_plan(run: &RunConfig) -> Result<(), Exit> {
    let c = chart(run.precision_bits, run.n_max).map_err(config_err)?;
    let plan = Plan::from_table(c.table()).map_err(|e| config_err(e.into()))?;
    let doc = PlanDoc {
        precision_bits: run.precision_bits,
        n_max: run.n_max,
        input_hash: sha256_hex(PlanDoc::config_line(run.precision_bits, run.n_max).as_bytes()),
        plan,
    };
    emit(run.out.as_deref(), &to_json(&doc).map_err(config_err)?).map_err(config_err)
}

/// Plan file, its hash, and the chart it describes.
fn open_plan(path: &Path) -> Result<(PlanDoc, String, SergeraertChart), Exit> {
    let (doc, hash): (PlanDoc, String) = load(path).map_err(config_err)?;
    let c = chart(doc.precision_bits, doc.n_max).map_err(config_err)?;
    let again = Plan::from_table(c.table()).map_err(|e| config_err(e.into()))?;
    if again != doc.plan {
        return Err(Exit(2, anyhow::anyhow!("{} does not match the table of its own configuration", path.display())));
    }
    Ok((doc, hash, c))
}

fn cmd_build(run: &RunConfig, plan: &Path) -> Result<(), Exit> {
    let (pdoc, hash, c) = open_plan(plan)?;
    let levels = match run.mode {
        Mode::Sergeraert => sergeraert_levels(c.table()),
        Mode::General => general_levels(&c),
    }
    .map_err(|e| classify(e.into()))?;
    let config = BuildConfig { stages: run.steps, start: run.start, mode: run.mode, samples: run.samples, ..BuildConfig::default() };
    let built = build_stack(&c, &levels, &config).map_err(|e| classify(e.into()))?;
    let doc = StackDoc { n_max: pdoc.n_max, input_hash: hash, stack: built.to_record() };
    emit(run.out.as_deref(), &to_json(&doc).map_err(config_err)?).map_err(config_err)
}

fn cmd_verify(run: &RunConfig, plan: &Path, stack: &Path, sweep: usize, checks: &[String]) -> Result<(), Exit> {
    let (pdoc, plan_hash, c) = open_plan(plan)?;
    let (doc, stack_hash, built) = load_stack(stack)?;
    require_hash("plan", &doc.input_hash, &plan_hash).map_err(config_err)?;
    if doc.stack.precision_bits != c.prec().bits() {
        return Err(Exit(2, anyhow::anyhow!("stack precision differs from the plan")));
    }
    let mut config = run.verify_config(doc.stack.precision_bits, pdoc.n_max);
    config.sweep = sweep;
    let suite = Suite::new(&c, &built, config);
    let report = if checks.is_empty() {
        run_all(&suite, stack_hash)
    } else {
        let rs = checks
            .iter()
            .map(|id| run_one(&suite, id))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| config_err(e.into()))?;
        Report::new(stack_hash, rs)
    };
    emit(run.report.as_deref().or(run.out.as_deref()), &to_json(&report).map_err(config_err)?).map_err(config_err)?;
    for r in report.checks.iter().filter(|r| r.failed()) {
        eprintln!("check {} failed: {}", r.id, r.notes.join("; "));
    }
    if report.ok() {
        Ok(())
    } else {
        Err(Exit(1, anyhow::anyhow!("{} of {} checks failed", report.summary.fail, report.checks.len())))
    }
}

#[derive(Serialize)]
struct FlowOut {
    k: usize,
    t_hex: String,
    x_hex: String,
    derivatives_hex: Vec<String>,
}

fn cmd_flow(run: &RunConfig, stack: &Path, stage: usize, time: &str, x: &str, order: usize) -> Result<(), Exit> {
    let (doc, _, built) = load_stack(stack)?;
    let c = chart(doc.stack.precision_bits, doc.n_max).map_err(config_err)?;
    let p = built.stack.prec();
    let t = parse_scalar(time, p).map_err(config_err)?;
    let x = parse_scalar(x, p).map_err(config_err)?;
    let idx = match stage {
        0 => 0,
        k if k >= built.start && k < built.start + built.depth() => k - built.start + 1,
        k => return Err(Exit(2, anyhow::anyhow!("stage {k} is not in the stack"))),
    };
    let d = deformation_engine::Deformed::new(&c, &built.stack);
    let jet = d.flow_jet(idx, &t, &x, order).map_err(|e| classify(e.into()))?;
    let out = FlowOut {
        k: stage,
        t_hex: t.to_hex(),
        x_hex: x.to_hex(),
        derivatives_hex: (0..=order).map(|m| jet.d(m).to_hex()).collect(),
    };
    emit(run.out.as_deref(), &to_json(&out).map_err(config_err)?).map_err(config_err)
}

#[derive(Serialize)]
struct CantorOut {
    intervals: Vec<cantor_schedule::IntervalSetRecord>,
    address: String,
    lo_hex: String,
    hi_hex: String,
}

fn cmd_cantor(run: &RunConfig, stack: &Path) -> Result<(), Exit> {
    let (doc, _, built) = load_stack(stack)?;
    let (lo, hi) = cantor_point(&run.address, &built.intervals[1..], built.stack.prec()).map_err(|e| config_err(e.into()))?;
    let out = CantorOut { intervals: doc.stack.intervals, address: run.address.to_string(), lo_hex: lo.to_hex(), hi_hex: hi.to_hex() };
    emit(run.out.as_deref(), &to_json(&out).map_err(config_err)?).map_err(config_err)
}

fn cmd_emit_plots(run: &RunConfig, plan: &Path, stack: &Path) -> Result<(), Exit> {
    let (pdoc, plan_hash, c) = open_plan(plan)?;
    let (doc, _, built) = load_stack(stack)?;
    require_hash("plan", &doc.input_hash, &plan_hash).map_err(config_err)?;
    let dir = run.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display())).map_err(config_err)?;
    let suite = Suite::new(&c, &built, run.verify_config(doc.stack.precision_bits, pdoc.n_max));
    let lo = Scalar::pow2(-(pdoc.n_max as i64) - 1, c.prec());
    let file = fs::File::create(dir.join("landscape.csv")).map_err(|e| config_err(e.into()))?;
    plots::landscape(&c, &lo, 16, file).map_err(classify)?;
    plots::wave(&suite, &dir.join("wave.csv")).map_err(classify)?;
    plots::lf(&suite, &dir.join("lf.csv")).map_err(classify)?;
    plots::intervals(&suite, &dir.join("intervals.csv")).map_err(classify)
}

fn cmd_inspect(run: &RunConfig, per_octave: u32) -> Result<(), Exit> {
    let c = chart(run.precision_bits, run.n_max).map_err(config_err)?;
    let lo = Scalar::pow2(-(run.n_max as i64) - 1, c.prec());
    match &run.out {
        Some(p) => {
            let f = fs::File::create(p).with_context(|| format!("creating {}", p.display())).map_err(config_err)?;
            plots::landscape(&c, &lo, per_octave, f).map_err(classify)
        }
        None => plots::landscape(&c, &lo, per_octave, std::io::stdout().lock()).map_err(classify),
    }
}

fn run(cli: Cli) -> Result<(), Exit> {
    let run = &cli.run;
    run.validate().map_err(config_err)?;
    match &cli.command {
        Command::InspectField { per_octave } => cmd_inspect(run, *per_octave),
        Command::Plan => cmd_plan(run),
        Command::Build { plan } => cmd_build(run, plan),
        Command::Verify { plan, stack, sweep, checks } => cmd_verify(run, plan, stack, *sweep, checks),
        Command::Flow { stack, stage, time, x, order } => cmd_flow(run, stack, *stage, time, x, *order),
        Command::Cantor { stack } => cmd_cantor(run, stack),
        Command::EmitPlots { plan, stack } => cmd_emit_plots(run, plan, stack),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Exit(code, e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(code)
        }
    }
}

mod codespec;
mod config;

use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use seccf::bounds::{
    bpsk_rate_curves, ldpc_adjusted_rates, locate_crossings, optimize_bound, sig10, verify_inequalities,
    BoundKind, Fault, VerifyGrid, BPSK_CSV_HEADER, LDPC_CSV_HEADER,
};
use seccf::codes::{composition_counts, deviation_a};
use seccf::protocol::{
    error_rate, leakage_exact, leakage_exact_shift_averaged, leakage_mc, run_trials, wilson_halfwidth, ErrorRate,
};
use seccf::{CodeRateParams, Constellation, DeltaITable, MacChannelParams, QuadratureSpec};

use crate::codespec::parse_code;
use crate::config::Settings;

/// Secure computation-and-forward toolkit: rate curves, leakage bounds, code
/// analysis, protocol simulation and the inequality checker.
#[derive(Debug, Parser)]
#[command(name = "seccf", version)]
struct Cli {
    /// Also write the fully resolved invocation as JSON to this file.
    #[arg(long, global = true)]
    run_config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Binary rate curves (nats per channel use) over a grid of gains.
    Rates(RatesArgs),
    /// Optimised finite-length leakage bound as JSON.
    Bound(BoundArgs),
    /// Structure and deviation of a code.
    Code(CodeArgs),
    /// Monte Carlo protocol rounds from a key = value config file.
    Simulate(SimulateArgs),
    /// Leakage of one node's message to the relay (block length at most 2 for exact methods).
    Leakage(LeakageArgs),
    /// Check the bound inequalities on a parameter grid.
    Verify(VerifyArgs),
}

#[derive(Debug, Args, Serialize)]
struct RatesArgs {
    #[arg(long, default_value_t = 1.0)]
    n0: f64,
    #[arg(long)]
    h_min: f64,
    #[arg(long)]
    h_max: f64,
    #[arg(long, default_value_t = 0.01)]
    h_step: f64,
    /// CSV table `h,delta_i_nats` of a practical code's rate gap.
    #[arg(long)]
    delta_i: Option<PathBuf>,
    /// Report rates in bits instead of nats.
    #[arg(long)]
    bits: bool,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct BoundArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    kbar: usize,
    #[arg(long, default_value_t = 2)]
    q: u32,
    #[arg(long)]
    h: f64,
    #[arg(long, default_value_t = 1.0)]
    n0: f64,
    /// Deviation of the code ensemble; selects the ensemble bound.
    #[arg(long = "A", conflicts_with = "code")]
    a: Option<f64>,
    /// Code descriptor whose deviation is computed and used.
    #[arg(long)]
    code: Option<String>,
    /// Comma-separated real constellation; defaults to BPSK for q = 2.
    #[arg(long)]
    constellation: Option<String>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct CodeArgs {
    /// e.g. repetition:3, spc:4, hamming, uniform:N:K:SEED, file:PATH
    code: String,
    #[arg(long, default_value_t = 2)]
    q: u32,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct SimulateArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Write every round as one JSON line.
    #[arg(long)]
    jsonl: Option<PathBuf>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum LeakageMethodArg {
    Exact,
    ShiftAveraged,
    Mc,
}

#[derive(Debug, Args, Serialize)]
struct LeakageArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    node: u8,
    #[arg(long, value_enum, default_value_t = LeakageMethodArg::Exact)]
    method: LeakageMethodArg,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum GridArg {
    Full,
    Small,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum FaultArg {
    TimesQ,
    Squared,
}

#[derive(Debug, Args, Serialize)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = GridArg::Full)]
    grid: GridArg,
    #[arg(long, value_enum, hide = true)]
    inject_fault: Option<FaultArg>,
}

#[derive(Debug, Serialize)]
struct RunConfig<'a> {
    tool_version: &'static str,
    #[serde(flatten)]
    command: &'a Command,
}

#[derive(Debug)]
struct VerificationFailed;

impl fmt::Display for VerificationFailed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("verification failed")
    }
}

impl std::error::Error for VerificationFailed {}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

/// Rounds every float to 10 significant digits.
fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64().and_then(|x| sig10(x).parse::<f64>().ok()) {
                if let Some(r) = serde_json::Number::from_f64(x) {
                    *n = r;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

fn emit_json(output: Option<&Path>, run: &Value, mut body: Value) -> Result<()> {
    round_json(&mut body);
    if let Value::Object(map) = &mut body {
        map.insert("run".into(), run.clone());
    }
    emit(output, &(serde_json::to_string_pretty(&body)? + "\n"))
}

fn h_grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>> {
    if !(min.is_finite() && max.is_finite()) || min > max {
        bail!("need finite --h-min <= --h-max");
    }
    if min == max {
        return Ok(vec![min]);
    }
    if !(step > 0.0) {
        bail!("--h-step must be positive");
    }
    let count = ((max - min) / step + 1e-9).floor() as usize;
    if count > 1_000_000 {
        bail!("grid of {count} points is too large");
    }
    Ok((0..=count).map(|i| min + i as f64 * step).collect())
}

fn cmd_rates(args: &RatesArgs) -> Result<()> {
    let spec = QuadratureSpec::default();
    let grid = h_grid(args.h_min, args.h_max, args.h_step)?;
    let scale = if args.bits { std::f64::consts::LN_2 } else { 1.0 };
    let unit = |header: &str| if args.bits { header.replace("_nats", "_bits") } else { header.to_string() };
    let rows = bpsk_rate_curves(&grid, args.n0, &spec)?;
    let mut csv = String::new();
    match &args.delta_i {
        None => {
            csv += &unit(BPSK_CSV_HEADER);
            csv.push('\n');
            for r in &rows {
                let fields = [r.h, r.rate_h13 / scale, r.rate_h17 / scale, r.i_h / scale];
                csv += &(fields.map(sig10).join(",") + "\n");
            }
        }
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let table = DeltaITable::parse(&text)?;
            if let Some(family) = table.family() {
                eprintln!("code family: {family}");
            }
            csv += &unit(LDPC_CSV_HEADER);
            csv.push('\n');
            for r in ldpc_adjusted_rates(&table, &grid, args.n0, &spec)? {
                let rates = [r.rate_h13, r.rate_h17, r.i_h, r.delta_i, r.rate_h14, r.rate_h18];
                let fields: Vec<String> = std::iter::once(sig10(r.h)).chain(rates.map(|x| sig10(x / scale))).collect();
                csv += &(fields.join(",") + "\n");
            }
        }
    }
    emit(args.output.as_deref(), &csv)?;
    for c in locate_crossings(&rows, args.n0, &spec)? {
        eprintln!("{} crosses zero at h = {}; secure transmission impossible where negative", c.curve, sig10(c.h));
    }
    Ok(())
}

fn channel_for(q: u32, h: f64, n0: f64, constellation: Option<&str>) -> Result<MacChannelParams> {
    let points = match constellation {
        Some(list) => Constellation::new(
            list.split(',')
                .map(|p| p.trim().parse::<f64>().with_context(|| format!("constellation point {p:?}")))
                .collect::<Result<_>>()?,
        )?,
        None if q == 2 => Constellation::bpsk(),
        None => bail!("--constellation is required when q != 2"),
    };
    if points.q() != q {
        bail!("constellation has {} points, q = {q}", points.q());
    }
    Ok(MacChannelParams::new(h, h, n0, points)?)
}

fn cmd_bound(args: &BoundArgs, run: &Value) -> Result<()> {
    let spec = QuadratureSpec::default();
    let channel = channel_for(args.q, args.h, args.n0, args.constellation.as_deref())?;
    let (n, k, deviation) = match &args.code {
        Some(descriptor) => {
            let code = parse_code(descriptor, args.q)?;
            for (flag, given, actual) in [("--n", args.n, code.n()), ("--k", args.k, code.k())] {
                if given.is_some_and(|g| g != actual) {
                    bail!("{flag} disagrees with the code ({actual})");
                }
            }
            let dev = deviation_a(&code).map_err(|e| match e {
                seccf::Error::TooLarge(m) => anyhow::anyhow!("deviation A is infeasible to compute: {m}"),
                other => other.into(),
            })?;
            (code.n(), code.k(), Some(dev))
        }
        None => (
            args.n.context("--n is required without --code")?,
            args.k.context("--k is required without --code")?,
            None,
        ),
    };
    let params = CodeRateParams::new(n, k, args.kbar, args.q)?;
    let a = deviation.as_ref().map(|d| d.a).or(args.a);
    let kind = if a.is_some() { BoundKind::B2 } else { BoundKind::B1 };
    let report = optimize_bound(kind, &params, a, &channel, &spec)?;
    emit_json(
        args.output.as_deref(),
        run,
        json!({ "report": report, "deviation": deviation, "csv_header": seccf::bounds::BOUND_CSV_HEADER, "csv": report.to_csv() }),
    )
}

fn cmd_code(args: &CodeArgs, run: &Value) -> Result<()> {
    let code = parse_code(&args.code, args.q)?;
    let deviation = deviation_a(&code).ok();
    let compositions = composition_counts(&code).ok().map(|counts| {
        counts
            .into_iter()
            .map(|(c, count)| json!({ "composition": c, "count": count }))
            .collect::<Vec<_>>()
    });
    emit_json(
        args.output.as_deref(),
        run,
        json!({
            "n": code.n(),
            "k": code.k(),
            "q": code.q(),
            "generator": code.matrix().to_text(),
            "information_set": code.information_set(),
            "deviation": deviation,
            "compositions": compositions,
        }),
    )
}

fn trials_and_seed(settings: &Settings, trials: Option<u64>, seed: Option<u64>) -> Result<(u64, u64)> {
    let parse = |key: &str| -> Result<Option<u64>> {
        settings
            .get(key)
            .map(|v| v.parse().with_context(|| format!("{key}: cannot parse {v:?}")))
            .transpose()
    };
    Ok((trials.or(parse("trials")?).unwrap_or(1000), seed.or(parse("seed")?).unwrap_or(0)))
}

fn cmd_simulate(args: &SimulateArgs, run: &Value) -> Result<()> {
    let settings = Settings::load(&args.config.to_string_lossy())?;
    let protocol = config::build(&settings)?;
    let (trials, seed) = trials_and_seed(&settings, args.trials, args.seed)?;
    let summary = match &args.jsonl {
        None => error_rate(&protocol, trials, seed)?,
        Some(path) => {
            if trials == 0 {
                bail!("need at least one trial");
            }
            let records = run_trials(&protocol, trials, seed)?;
            let mut lines = String::new();
            for r in &records {
                lines += &(serde_json::to_string(r)? + "\n");
            }
            fs::write(path, lines).with_context(|| format!("writing {}", path.display()))?;
            let sum_err = records.iter().filter(|r| !r.sum_decode_ok).count() as u64;
            let rec_err = records.iter().filter(|r| !r.recovery_ok).count() as u64;
            ErrorRate {
                trials,
                p_sum_err: sum_err as f64 / trials as f64,
                p_recovery_err: rec_err as f64 / trials as f64,
                sum_halfwidth: wilson_halfwidth(sum_err, trials),
                recovery_halfwidth: wilson_halfwidth(rec_err, trials),
            }
        }
    };
    emit_json(
        args.output.as_deref(),
        run,
        json!({
            "settings": settings.values,
            "trials": trials,
            "master_seed": seed,
            "n": protocol.code.n(),
            "k": protocol.code.k(),
            "kbar": protocol.split.kbar(),
            "result": summary,
        }),
    )
}

fn cmd_leakage(args: &LeakageArgs, run: &Value) -> Result<()> {
    let settings = Settings::load(&args.config.to_string_lossy())?;
    let protocol = config::build(&settings)?;
    let spec = QuadratureSpec::default();
    let (_, seed) = trials_and_seed(&settings, None, args.seed)?;
    let estimate = match args.method {
        LeakageMethodArg::Exact => leakage_exact(&protocol, args.node, &spec)?,
        LeakageMethodArg::ShiftAveraged => leakage_exact_shift_averaged(&protocol, args.node, &spec)?,
        LeakageMethodArg::Mc => leakage_mc(&protocol, args.node, args.samples, seed)?,
    };
    emit_json(args.output.as_deref(), run, json!({ "settings": settings.values, "leakage": estimate }))
}

fn cmd_verify(args: &VerifyArgs) -> Result<()> {
    let grid = match args.grid {
        GridArg::Full => VerifyGrid::Full,
        GridArg::Small => VerifyGrid::Small,
    };
    let fault = args.inject_fault.map(|f| match f {
        FaultArg::TimesQ => Fault::DeviationTimesQ,
        FaultArg::Squared => Fault::DeviationSquared,
    });
    let report = verify_inequalities(grid, fault, &QuadratureSpec::default())?;
    let mut out = format!("{:<42} {:>7} {:>10} {:>16}  worst at\n", "check", "points", "violations", "worst margin");
    for c in &report.checks {
        out += &format!(
            "{:<42} {:>7} {:>10} {:>16}  {}\n",
            c.name,
            c.points,
            c.violations,
            sig10(c.worst_margin),
            c.worst_at
        );
    }
    let passed = report.all_passed();
    out += if passed { "all checks passed\n" } else { "VERIFICATION FAILED\n" };
    emit(None, &out)?;
    if passed {
        Ok(())
    } else {
        Err(VerificationFailed.into())
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.is::<VerificationFailed>() {
        return 4;
    }
    match err.downcast_ref::<seccf::Error>() {
        Some(seccf::Error::NonConvergence { .. }) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = serde_json::to_value(RunConfig {
        tool_version: env!("CARGO_PKG_VERSION"),
        command: &cli.command,
    })
    .expect("arguments serialise");
    let result = (|| -> Result<()> {
        if let Some(path) = &cli.run_config {
            fs::write(path, serde_json::to_string_pretty(&run)? + "\n")
                .with_context(|| format!("writing {}", path.display()))?;
        }
        match &cli.command {
            Command::Rates(a) => cmd_rates(a),
            Command::Bound(a) => cmd_bound(a, &run),
            Command::Code(a) => cmd_code(a, &run),
            Command::Simulate(a) => cmd_simulate(a, &run),
            Command::Leakage(a) => cmd_leakage(a, &run),
            Command::Verify(a) => cmd_verify(a),
        }
    })();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(h_grid(0.0, 0.0, 0.0).unwrap(), vec![0.0]);
        let g = h_grid(2.0, 3.0, 0.001).unwrap();
        assert_eq!(g.len(), 1001);
        assert!((g[1000] - 3.0).abs() < 1e-12);
        assert!(h_grid(3.0, 2.0, 0.1).is_err());
        assert!(h_grid(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn json_rounding() {
        let mut v = json!({ "x": [0.1234567890123, 2], "y": 1e-20 });
        round_json(&mut v);
        assert_eq!(v["x"][0], json!(0.123456789));
        assert_eq!(v["x"][1], json!(2));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&VerificationFailed.into()), 4);
        let e: anyhow::Error = seccf::Error::NonConvergence { error: 1.0, subdivisions: 3 }.into();
        assert_eq!(exit_code(&e), 3);
        assert_eq!(exit_code(&anyhow::anyhow!("bad flag")), 2);
    }
}

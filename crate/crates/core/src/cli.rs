//! Command-line frontend.
//!
//! Subcommands: `weak-value`, `simulate`, `reconstruct`, `sweep`. Every flag
//! may also be given in a plain-text `key = value` config file (`--config`);
//! the command line wins over the file. Reports are JSON objects with
//! top-level `inputs`, `results`, `seed` and `version`; failures are
//! `{"error": {"kind", "message"}}` with a nonzero exit code.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::experiment::{run, CouplingConfig};
use crate::hilbert::{Amplitude, Arm, PathState};
use crate::reconstruction::{bias_sweep, reconstruct, Method};
use crate::tomography::{bloch_exact, measure, rotation_angles, BlochVector};
use crate::tsvf::{modified_projection_weak_value, projection_weak_values, WeakValue};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Header of the `sweep` CSV table.
pub const SWEEP_HEADER: &str = "alpha,ratio_re,ratio_im,true_re,true_im,abs_deviation";

const WEAK_ALPHA_WARN: f64 = 0.1;
const NORMALIZATION_WARN: f64 = 1e-6;
const DEFAULT_SEED: u64 = 0;

#[derive(Parser, Debug)]
#[command(name = "wvsim", version, about = "Weak values, strong coupling and path-state reconstruction in a two-path interferometer")]
struct Cli {
    /// Output format: json or csv (sweep defaults to csv, everything else to json).
    #[arg(long, global = true)]
    output: Option<String>,

    /// Plain-text `key = value` file supplying any flag.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Seed for shot-noise sampling (default 0).
    #[arg(long, global = true)]
    seed: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Standard and finite-coupling weak values of the path projectors.
    WeakValue(StateArgs),
    /// Run the interferometer and report the post-selected spin.
    Simulate(SimulateArgs),
    /// Reconstruct the path state with the weak or strong estimator.
    Reconstruct(ReconstructArgs),
    /// Tabulate the finite-coupling ratio bias over a grid of angles.
    Sweep(SweepArgs),
}

#[derive(Args, Debug, Default)]
struct StateArgs {
    /// Amplitude on path I, as RE[,IM].
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    /// Amplitude on path II, as RE[,IM].
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
    /// Post-selection amplitude on path I (default 1/√2).
    #[arg(long = "pf-a", allow_hyphen_values = true)]
    pf_a: Option<String>,
    /// Post-selection amplitude on path II (default 1/√2).
    #[arg(long = "pf-b", allow_hyphen_values = true)]
    pf_b: Option<String>,
    /// Arm carrying the spin rotation: I or II (default II).
    #[arg(long)]
    arm: Option<String>,
    /// Coupling angle in radians (default 0).
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    state: StateArgs,
    /// Shots per tomography basis; omit for exact expectation values.
    #[arg(long)]
    shots: Option<String>,
}

#[derive(Args, Debug)]
struct ReconstructArgs {
    #[command(flatten)]
    state: StateArgs,
    /// Shots per tomography basis; omit for exact expectation values.
    #[arg(long)]
    shots: Option<String>,
    /// Estimator: weak or strong (default strong).
    #[arg(long)]
    method: Option<String>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    state: StateArgs,
    /// Angle grid START:STOP:N (inclusive, N >= 2).
    #[arg(long, allow_hyphen_values = true)]
    alphas: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

/// What a CLI invocation writes, and its exit status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliOutput {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Flag values after merging the command line over the config file.
#[derive(Debug, Default)]
struct Merged {
    values: BTreeMap<&'static str, String>,
}

const KNOWN_KEYS: [&str; 12] = [
    "output", "seed", "a", "b", "pf-a", "pf-b", "arm", "alpha", "shots", "method", "alphas", "config",
];

impl Merged {
    fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn required(&self, key: &str) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| Error::Argument(format!("missing required flag --{key}")))
    }
}

/// Parses a `key = value` (or `key value`) config file. `#` starts a comment.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = match line.split_once('=') {
            Some((k, v)) => (k.trim(), v.trim()),
            None => line
                .split_once(char::is_whitespace)
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| Error::Argument(format!("config line {}: expected key = value", lineno + 1)))?,
        };
        let key = key.trim_start_matches("--");
        if !KNOWN_KEYS.contains(&key) || key == "config" {
            return Err(Error::Argument(format!("config line {}: unknown key {key:?}", lineno + 1)));
        }
        out.insert(key.to_string(), value.to_string());
    }
    Ok(out)
}

/// Parses `RE` or `RE,IM`.
pub fn parse_complex(s: &str) -> Result<Amplitude> {
    let parse = |t: &str| -> Result<f64> {
        let v: f64 = t
            .trim()
            .parse()
            .map_err(|_| Error::Argument(format!("cannot parse {t:?} as a number")))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Argument(format!("non-finite number {t:?}")))
        }
    };
    match s.split_once(',') {
        Some((re, im)) => Ok(Amplitude::new(parse(re)?, parse(im)?)),
        None => Ok(Amplitude::new(parse(s)?, 0.0)),
    }
}

fn parse_f64(key: &str, s: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::Argument(format!("--{key}: cannot parse {s:?} as a number")))?;
    if !v.is_finite() {
        return Err(Error::Argument(format!("--{key}: value must be finite")));
    }
    Ok(v)
}

fn parse_u64(key: &str, s: &str) -> Result<u64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Argument(format!("--{key}: cannot parse {s:?} as an unsigned integer")))
}

/// Parses `START:STOP:N` into `N` evenly spaced values including both ends.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let [start, stop, n] = parts.as_slice() else {
        return Err(Error::Argument(format!("--alphas: expected START:STOP:N, got {s:?}")));
    };
    let start = parse_f64("alphas", start)?;
    let stop = parse_f64("alphas", stop)?;
    let n = parse_u64("alphas", n)?;
    if n < 2 {
        return Err(Error::Argument(format!("--alphas: grid needs at least 2 points, got {n}")));
    }
    let step = (stop - start) / (n - 1) as f64;
    Ok((0..n)
        .map(|k| if k == n - 1 { stop } else { start + step * k as f64 })
        .collect())
}

fn cjson(z: Amplitude) -> Value {
    json!({ "re": z.re, "im": z.im })
}

fn path_json(p: &PathState) -> Value {
    json!({ "a": cjson(p.a()), "b": cjson(p.b()) })
}

fn bloch_json(b: &BlochVector) -> Value {
    json!({ "sx": b.sx, "sy": b.sy, "sz": b.sz })
}

/// Formats a float with 17 significant digits.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) => map.iter().for_each(|(k, x)| flatten(&join(k), x, rows)),
        Value::Array(xs) => xs
            .iter()
            .enumerate()
            .for_each(|(i, x)| flatten(&join(&i.to_string()), x, rows)),
        Value::Number(n) => {
            let s = match (n.as_u64(), n.as_i64(), n.as_f64()) {
                (Some(u), _, _) => u.to_string(),
                (_, Some(i), _) => i.to_string(),
                (_, _, Some(f)) => format_f64(f),
                _ => n.to_string(),
            };
            rows.push((prefix.to_string(), s));
        }
        Value::String(s) => rows.push((prefix.to_string(), s.clone())),
        Value::Bool(b) => rows.push((prefix.to_string(), b.to_string())),
        Value::Null => rows.push((prefix.to_string(), String::new())),
    }
}

/// Renders a report as `key,value` rows with dotted key paths.
fn report_csv(report: &Value) -> String {
    let mut rows = Vec::new();
    flatten("", report, &mut rows);
    let mut out = String::from("key,value\n");
    for (k, v) in rows {
        let _ = writeln!(out, "{k},{v}");
    }
    out
}

fn error_json(e: &Error) -> String {
    let v = json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
    format!("{}\n", serde_json::to_string_pretty(&v).expect("serializable"))
}

struct Context {
    merged: Merged,
    output: OutputFormat,
    warnings: Vec<String>,
}

impl Context {
    fn path_state(&mut self, key_a: &'static str, key_b: &'static str, default: Option<PathState>) -> Result<PathState> {
        let (a, b) = match (self.merged.get(key_a), self.merged.get(key_b), default) {
            (None, None, Some(d)) => return Ok(d),
            (a, b, _) => (
                a.ok_or_else(|| Error::Argument(format!("missing required flag --{key_a}")))?,
                b.ok_or_else(|| Error::Argument(format!("missing required flag --{key_b}")))?,
            ),
        };
        let (a, b) = (parse_complex(a)?, parse_complex(b)?);
        let n2 = a.norm_sqr() + b.norm_sqr();
        let state = PathState::new(a, b)?;
        if (n2 - 1.0).abs() > NORMALIZATION_WARN {
            self.warnings.push(format!(
                "--{key_a}/--{key_b} have squared norm {n2}; normalizing"
            ));
        }
        Ok(state)
    }

    fn coupling(&self) -> Result<CouplingConfig> {
        let arm = match self.merged.get("arm") {
            Some(s) => s.parse::<Arm>()?,
            None => Arm::II,
        };
        let alpha = match self.merged.get("alpha") {
            Some(s) => parse_f64("alpha", s)?,
            None => 0.0,
        };
        CouplingConfig::new(arm, alpha)
    }

    fn shots(&self) -> Result<Option<u64>> {
        match self.merged.get("shots") {
            None => Ok(None),
            Some(s) => {
                let n = parse_u64("shots", s)?;
                if n == 0 {
                    return Err(Error::Argument("--shots must be at least 1".into()));
                }
                Ok(Some(n))
            }
        }
    }

    fn seed(&self) -> Result<u64> {
        self.merged
            .get("seed")
            .map(|s| parse_u64("seed", s))
            .transpose()
            .map(|s| s.unwrap_or(DEFAULT_SEED))
    }

    fn common_inputs(&mut self, command: &str) -> Result<(Value, PathState, PathState, CouplingConfig)> {
        let pi = self.path_state("a", "b", None)?;
        let pf = self.path_state("pf-a", "pf-b", Some(PathState::symmetric()))?;
        let cfg = self.coupling()?;
        let inputs = json!({
            "command": command,
            "pi": path_json(&pi),
            "pf": path_json(&pf),
            "arm": cfg.arm.to_string(),
            "alpha": cfg.alpha,
        });
        Ok((inputs, pi, pf, cfg))
    }
}

fn report(inputs: Value, results: Value, seed: Option<u64>) -> Value {
    json!({ "inputs": inputs, "results": results, "seed": seed, "version": VERSION })
}

fn cmd_weak_value(ctx: &mut Context) -> Result<Value> {
    let (inputs, pi, pf, cfg) = ctx.common_inputs("weak-value")?;
    let (w_i, w_ii) = projection_weak_values(&pi, &pf)?;
    // The finite-coupling closed form assumes the balanced output port.
    let modified = if pf == PathState::symmetric() {
        let m = modified_projection_weak_value(&pi, cfg.alpha, cfg.arm)?;
        let m_ii = WeakValue(Amplitude::new(1.0, 0.0) - m.value());
        let ratio = if m_ii.value().norm() > crate::tsvf::DEGENERACY_THRESHOLD {
            cjson(m.value() / m_ii.value())
        } else {
            Value::Null
        };
        json!({ "P_I": cjson(m.value()), "P_II": cjson(m_ii.value()), "ratio": ratio })
    } else {
        ctx.warnings
            .push("finite-coupling weak value is only defined for the balanced post-selection; omitted".into());
        Value::Null
    };
    let results = json!({
        "standard": { "P_I": cjson(w_i.value()), "P_II": cjson(w_ii.value()) },
        "modified": modified,
    });
    Ok(report(inputs, results, None))
}

fn cmd_simulate(ctx: &mut Context) -> Result<Value> {
    let (mut inputs, pi, pf, cfg) = ctx.common_inputs("simulate")?;
    let shots = ctx.shots()?;
    let seed = shots.map(|_| ctx.seed()).transpose()?;
    inputs["shots"] = json!(shots);
    let out = run(&pi, &cfg, &pf)?;
    let exact = bloch_exact(&out.conditional_spin);
    let angles = rotation_angles(&exact)
        .map(|r| json!({ "theta_xy": r.theta_xy, "theta_xz": r.theta_xz }))
        .unwrap_or(Value::Null);
    let tomography = match (shots, seed) {
        (Some(n), Some(seed)) => {
            let (records, est) = measure(&out.conditional_spin, n, seed)?;
            json!({
                "records": records,
                "estimate": { "value": bloch_json(&est.value), "stderr": est.stderr },
            })
        }
        _ => Value::Null,
    };
    let results = json!({
        "success_probability": out.success_probability,
        "conditional_spin": {
            "up": cjson(out.conditional_spin.up()),
            "down": cjson(out.conditional_spin.down()),
        },
        "bloch_exact": bloch_json(&exact),
        "rotation_angles": angles,
        "tomography": tomography,
    });
    Ok(report(inputs, results, seed))
}

fn cmd_reconstruct(ctx: &mut Context) -> Result<Value> {
    let (mut inputs, pi, pf, cfg) = ctx.common_inputs("reconstruct")?;
    let method = match ctx.merged.get("method") {
        Some(m) => m.parse::<Method>()?,
        None => Method::Strong,
    };
    let shots = ctx.shots()?;
    let seed = shots.map(|_| ctx.seed()).transpose()?;
    inputs["method"] = json!(method);
    inputs["shots"] = json!(shots);
    if method == Method::Weak && cfg.alpha.abs() > WEAK_ALPHA_WARN {
        ctx.warnings.push(format!(
            "weak estimator at alpha = {} > {WEAK_ALPHA_WARN}: expect O(alpha^2) bias",
            cfg.alpha
        ));
    }
    let rep = reconstruct(&pi, method, &cfg, &pf, shots.zip(seed))?;
    let d = &rep.inputs_digest;
    let results = json!({
        "method": rep.method,
        "alpha": rep.alpha,
        "estimated": path_json(&rep.estimated),
        "fidelity_vs_truth": rep.fidelity_vs_truth,
        "inputs_digest": {
            "bloch": bloch_json(&d.bloch),
            "success_probability": d.success_probability,
            "shots": d.shots,
            "seed": d.seed,
        },
        "records": rep.records,
    });
    Ok(report(inputs, results, seed))
}

fn cmd_sweep(ctx: &mut Context) -> Result<(Value, String)> {
    let (mut inputs, pi, _pf, _cfg) = ctx.common_inputs("sweep")?;
    let grid_spec = ctx.merged.required("alphas")?.to_string();
    let alphas = parse_grid(&grid_spec)?;
    inputs["alphas"] = json!(grid_spec);
    let rows = bias_sweep(&pi, &alphas)?;

    let mut csv = format!("{SWEEP_HEADER}\n");
    for r in &rows {
        let fields = [
            r.alpha,
            r.measured_ratio.re,
            r.measured_ratio.im,
            r.true_ratio.re,
            r.true_ratio.im,
            r.abs_deviation,
        ];
        let line: Vec<String> = fields.iter().map(|&x| format_f64(x)).collect();
        csv.push_str(&line.join(","));
        csv.push('\n');
    }

    let json_rows: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "alpha": r.alpha,
                "ratio": cjson(r.measured_ratio),
                "true_ratio": cjson(r.true_ratio),
                "abs_deviation": r.abs_deviation,
                "weak_value_deviation": r.weak_value_deviation,
            })
        })
        .collect();
    Ok((report(inputs, json!({ "rows": json_rows }), None), csv))
}

fn parse_output(s: &str) -> Result<OutputFormat> {
    match s.trim() {
        "json" => Ok(OutputFormat::Json),
        "csv" => Ok(OutputFormat::Csv),
        other => Err(Error::Argument(format!("--output: expected json or csv, got {other:?}"))),
    }
}

fn merge(cli: &Cli) -> Result<(Merged, &Command)> {
    let file = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Argument(format!("cannot read config {}: {e}", path.display())))?;
            parse_config(&text)?
        }
        None => BTreeMap::new(),
    };
    let (state, shots, method, alphas) = match &cli.command {
        Command::WeakValue(s) => (s, None, None, None),
        Command::Simulate(a) => (&a.state, a.shots.as_ref(), None, None),
        Command::Reconstruct(a) => (&a.state, a.shots.as_ref(), a.method.as_ref(), None),
        Command::Sweep(a) => (&a.state, None, None, a.alphas.as_ref()),
    };
    let from_cli: [(&'static str, Option<&String>); 11] = [
        ("output", cli.output.as_ref()),
        ("seed", cli.seed.as_ref()),
        ("a", state.a.as_ref()),
        ("b", state.b.as_ref()),
        ("pf-a", state.pf_a.as_ref()),
        ("pf-b", state.pf_b.as_ref()),
        ("arm", state.arm.as_ref()),
        ("alpha", state.alpha.as_ref()),
        ("shots", shots),
        ("method", method),
        ("alphas", alphas),
    ];
    let mut merged = Merged::default();
    for (key, value) in from_cli {
        if let Some(v) = value.cloned().or_else(|| file.get(key).cloned()) {
            merged.values.insert(key, v);
        }
    }
    Ok((merged, &cli.command))
}

fn dispatch(cli: &Cli, warnings: &mut Vec<String>) -> Result<String> {
    let (merged, command) = merge(cli)?;
    let default_output = match command {
        Command::Sweep(_) => OutputFormat::Csv,
        _ => OutputFormat::Json,
    };
    let output = merged.get("output").map(parse_output).transpose()?.unwrap_or(default_output);
    let mut ctx = Context { merged, output, warnings: Vec::new() };
    let result = match command {
        Command::WeakValue(_) => cmd_weak_value(&mut ctx).map(|v| (v, None)),
        Command::Simulate(_) => cmd_simulate(&mut ctx).map(|v| (v, None)),
        Command::Reconstruct(_) => cmd_reconstruct(&mut ctx).map(|v| (v, None)),
        Command::Sweep(_) => cmd_sweep(&mut ctx).map(|(v, csv)| (v, Some(csv))),
    };
    warnings.append(&mut ctx.warnings);
    let (report, csv) = result?;
    Ok(match (ctx.output, csv) {
        (OutputFormat::Csv, Some(csv)) => csv,
        (OutputFormat::Csv, None) => report_csv(&report),
        (OutputFormat::Json, _) => {
            format!("{}\n", serde_json::to_string_pretty(&report).expect("serializable"))
        }
    })
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Argument(_) => 2,
        _ => 1,
    }
}

/// Runs the CLI on `args` (including the program name) without touching the
/// process streams.
pub fn execute<I, T>(args: I) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CliOutput {
                    stdout: e.to_string(),
                    stderr: String::new(),
                    code: 0,
                },
                _ => {
                    let err = Error::Argument(e.kind().to_string());
                    CliOutput { stdout: error_json(&err), stderr: e.to_string(), code: 2 }
                }
            };
        }
    };
    let mut warnings = Vec::new();
    let result = dispatch(&cli, &mut warnings);
    let mut stderr = String::new();
    for w in &warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }
    match result {
        Ok(stdout) => CliOutput { stdout, stderr, code: 0 },
        Err(e) => CliOutput { stdout: error_json(&e), stderr, code: exit_code(&e) },
    }
}

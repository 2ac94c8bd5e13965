//! Command-line front end: argument parsing, run configuration and output.
//!
//! Results go to standard output (or `--output`) as pretty JSON or CSV. Failures
//! print a one-line JSON object `{"error":{"kind":…,"message":…}}` on standard
//! error and nothing on standard output.

mod verify;

pub use verify::{run_suite, Check, Suite, SuiteParams, SuiteReport};

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rug::{Float, Rational};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::codec::{decode, decode_exact, default_zero_tol, encode, DigitSequence};
use crate::constraint::{ConstraintModel, ModelKind, SequenceSpec};
use crate::dimension::{moran_root, sigma_from_sequence, DEFAULT_TOL};
use crate::error::Error;
use crate::partition::{Partition, PartitionSpec};

/// Overrides `precision_bits` of whatever partition a command uses.
pub const PRECISION_ENV: &str = "ALPHA_LUEROTH_PRECISION";

const SWEEP_HELP: &str = "\
CSV columns (fixed): model_params,k,s_star,theory,gap
  model_params  resolved model as compact JSON
  k             cover level
  s_star        Moran root
  theory        predicted dimension
  gap           s_star - theory
Floats carry 17 significant digits.";

const INFO_HELP: &str = "\
CSV columns (fixed): n,tail,atom,tail_ratio,atom_ratio
  tail_ratio = n a_n / t_n, atom_ratio = a_n / a_(n+1)
Floats carry 17 significant digits.";

#[derive(Parser, Debug)]
#[command(
    name = "alpha-lueroth",
    version,
    about = "alpha-Lueroth expansions and dimension estimates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Partition diagnostics.
    Partition {
        #[command(subcommand)]
        action: PartitionCommand,
    },
    /// Digits of a point.
    Encode(EncodeArgs),
    /// Point of a digit string.
    Decode(DecodeArgs),
    /// Moran root of a model's cover sums, with the predicted dimension.
    Dim(DimArgs),
    /// Jarnik sigma of a sequence s_n.
    Sigma(SigmaArgs),
    /// Moran roots over a list of models and levels.
    #[command(after_help = SWEEP_HELP)]
    Sweep(SweepArgs),
    /// Run a seeded property suite; exit 0 when it passes.
    Verify(VerifyArgs),
}

#[derive(Subcommand, Debug)]
enum PartitionCommand {
    /// Tails, atoms and asymptotic ratios at the requested indices.
    #[command(after_help = INFO_HELP)]
    Info(InfoArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Default)]
struct Common {
    /// `classical`, an inline JSON partition spec, or a path to one.
    #[arg(long)]
    partition: Option<String>,
    /// Seed for every randomized step.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the result here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// JSON run configuration: {"partition", "model", "seed", "output": {"path", "format"}}.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct InfoArgs {
    #[command(flatten)]
    common: Common,
    /// Indices n.
    #[arg(long, value_delimiter = ',', default_value = "1,10,100,1000,10000")]
    n: Vec<u64>,
}

#[derive(Args, Debug)]
struct EncodeArgs {
    #[command(flatten)]
    common: Common,
    /// Point in (0, 1], decimal or `p/q`.
    #[arg(long, allow_hyphen_values = true)]
    x: String,
    #[arg(long, default_value_t = 20)]
    depth: usize,
    /// Orbit values below this count as 0 (default 2^(-precision/2)).
    #[arg(long)]
    zero_tol: Option<f64>,
}

#[derive(Args, Debug)]
struct DecodeArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated digits, e.g. `2,2`.
    #[arg(long)]
    digits: String,
}

#[derive(Args, Debug)]
struct DimArgs {
    #[command(flatten)]
    common: Common,
    /// Model JSON (inline or path), e.g. {"kind":"goodband","N":2,"M":4}.
    #[arg(long)]
    model: Option<String>,
    /// Cover level.
    #[arg(long, default_value_t = 1)]
    k: u64,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
}

#[derive(Args, Debug)]
struct SigmaArgs {
    #[command(flatten)]
    common: Common,
    /// Sequence JSON, e.g. {"kind":"doubly-exponential","base":2}; defaults to the
    /// sequence of a Jarnik `--model`.
    #[arg(long)]
    sequence: Option<String>,
    #[arg(long)]
    model: Option<String>,
    /// Defaults to the partition's theta.
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long, default_value_t = 64)]
    horizon: u64,
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// Model JSON (object or array of objects); repeatable.
    #[arg(long)]
    model: Vec<String>,
    /// Cover levels.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    k: Vec<u64>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum)]
    suite: Suite,
    /// Model for the frostman, lemma-int and jarnik-bracket suites.
    #[arg(long)]
    model: Option<String>,
    /// Override the suite's sample count.
    #[arg(long)]
    samples: Option<usize>,
    /// Override the suite's depth (or cover level).
    #[arg(long)]
    depth: Option<usize>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputConfig {
    path: Option<PathBuf>,
    format: Option<Format>,
}

/// Defaults read from `--config`; explicit flags win.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    partition: Option<Value>,
    model: Option<Value>,
    seed: Option<u64>,
    #[serde(default)]
    output: OutputConfig,
}

enum Failure {
    /// Bad arguments or inputs: exit 1.
    Usage(String),
    /// A computation failed: exit 2.
    Numeric(Error),
    Suite(SuiteReport),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidPartition(_) | Error::InvalidModel(_) | Error::Json(_) | Error::Io(_) => {
                Failure::Usage(e.to_string())
            }
            e => Failure::Numeric(e),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Where and how a command's result is written.
struct Sink {
    path: Option<PathBuf>,
    format: Format,
}

struct Context {
    config: RunConfig,
    precision: Option<u32>,
}

impl Context {
    fn new(common: &Common, precision: Option<u32>) -> CliResult<Self> {
        let config = match &common.config {
            Some(path) => {
                let text = read_file(path)?;
                serde_json::from_str(&text)
                    .map_err(|e| Failure::Usage(format!("config {}: {e}", path.display())))?
            }
            None => RunConfig::default(),
        };
        Ok(Context { config, precision })
    }

    fn partition(&self, common: &Common) -> CliResult<Partition> {
        let mut spec = match (&common.partition, &self.config.partition) {
            (Some(arg), _) => partition_spec(arg)?,
            (None, Some(Value::String(arg))) => partition_spec(arg)?,
            (None, Some(v)) => serde_json::from_value(v.clone())
                .map_err(|e| Failure::Usage(format!("config partition: {e}")))?,
            (None, None) => PartitionSpec::classical(),
        };
        if let Some(bits) = self.precision {
            spec.precision_bits = bits;
        }
        Ok(Partition::new(spec)?)
    }

    fn model_json(&self, arg: Option<&String>) -> CliResult<Option<String>> {
        match (arg, &self.config.model) {
            (Some(a), _) => inline_or_file(a).map(Some),
            (None, Some(Value::String(a))) => inline_or_file(a).map(Some),
            (None, Some(v)) => Ok(Some(v.to_string())),
            (None, None) => Ok(None),
        }
    }

    fn model(&self, arg: Option<&String>, p: &Partition) -> CliResult<Option<ConstraintModel>> {
        self.model_json(arg)?
            .map(|json| ConstraintModel::from_json(&json, p).map_err(Failure::from))
            .transpose()
    }

    fn seed(&self, common: &Common) -> u64 {
        common.seed.or(self.config.seed).unwrap_or(0)
    }

    fn sink(&self, common: &Common, default: Format, allowed: &[Format]) -> CliResult<Sink> {
        let format = common
            .format
            .or(self.config.output.format)
            .unwrap_or(default);
        if !allowed.contains(&format) {
            return Err(Failure::Usage(
                format!("{format:?} output is not available for this command").to_lowercase(),
            ));
        }
        Ok(Sink {
            path: common
                .output
                .clone()
                .or_else(|| self.config.output.path.clone()),
            format,
        })
    }
}

fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn inline_or_file(arg: &str) -> CliResult<String> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        Ok(arg.to_string())
    } else {
        read_file(Path::new(arg))
    }
}

fn partition_spec(arg: &str) -> CliResult<PartitionSpec> {
    if arg == "classical" {
        return Ok(PartitionSpec::classical());
    }
    let json = inline_or_file(arg)?;
    serde_json::from_str(&json).map_err(|e| Failure::Usage(format!("partition spec: {e}")))
}

/// 17 significant digits, the `f64` round-trip width.
fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// Fixed-point decimal with `sig` significant digits, for points of `[0, 1]`.
fn fixed_decimal(x: &Float, sig: usize) -> String {
    if x.is_zero() {
        return "0".into();
    }
    let sci = x.to_string_radix(10, Some(sig));
    let (mantissa, exp) = match sci.split_once('e') {
        Some((m, e)) => (m, e.parse::<i64>().unwrap_or(0)),
        None => (sci.as_str(), 0),
    };
    let (sign, mantissa) = mantissa
        .strip_prefix('-')
        .map_or(("", mantissa), |m| ("-", m));
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let point = mantissa.find('.').unwrap_or(mantissa.len()) as i64 + exp;
    let body = if point <= 0 {
        format!("0.{}{digits}", "0".repeat((-point) as usize))
    } else if point as usize >= digits.len() {
        format!("{digits}{}", "0".repeat(point as usize - digits.len()))
    } else {
        let (a, b) = digits.split_at(point as usize);
        format!("{a}.{b}")
    };
    format!("{sign}{body}")
}

fn decimal_digits(bits: u32) -> usize {
    (bits as f64 * std::f64::consts::LOG10_2).floor() as usize
}

fn parse_point(s: &str, prec: u32) -> CliResult<Float> {
    let s = s.trim();
    if s.contains('/') {
        let r = Rational::from_str(s)
            .map_err(|e| Failure::Usage(format!("bad rational `{s}`: {e}")))?;
        Ok(Float::with_val(prec, &r))
    } else {
        let parsed =
            Float::parse(s).map_err(|e| Failure::Usage(format!("bad number `{s}`: {e}")))?;
        Ok(Float::with_val(prec, parsed))
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("result types serialize to JSON")
}

fn model_value(model: &ConstraintModel) -> Value {
    serde_json::from_str(&model.to_json()).expect("model JSON round-trips")
}

enum Rendered {
    Json(Value),
    Csv(Vec<u8>),
}

fn csv_bytes(header: &[&str], rows: Vec<Vec<String>>) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Failure::Usage(format!("csv: {e}"));
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    w.into_inner()
        .map_err(|e| Failure::Usage(format!("csv: {e}")))
}

fn partition_info(ctx: &Context, a: &InfoArgs) -> CliResult<(Sink, Rendered)> {
    let sink = ctx.sink(&a.common, Format::Json, &[Format::Json, Format::Csv])?;
    let p = ctx.partition(&a.common)?;
    let report = p.asymptotic_report(&a.n)?;
    let out = match sink.format {
        Format::Json => Rendered::Json(json!({
            "partition": to_value(p.spec()),
            "n_dec": p.n_dec(),
            "law_start": p.law_start(),
            "rows": to_value(&report.rows),
        })),
        Format::Csv => Rendered::Csv(csv_bytes(
            &["n", "tail", "atom", "tail_ratio", "atom_ratio"],
            report
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        fmt17(r.tail),
                        fmt17(r.atom),
                        fmt17(r.tail_ratio),
                        fmt17(r.atom_ratio),
                    ]
                })
                .collect(),
        )?),
    };
    Ok((sink, out))
}

fn encode_cmd(ctx: &Context, a: &EncodeArgs) -> CliResult<(Sink, Rendered)> {
    let sink = ctx.sink(&a.common, Format::Json, &[Format::Json])?;
    let p = ctx.partition(&a.common)?;
    let x = parse_point(&a.x, p.precision())?;
    let zero_tol = a.zero_tol.unwrap_or_else(|| default_zero_tol(&p));
    let enc = encode(&p, &x, a.depth, zero_tol)?;
    let mut v = json!({ "x": a.x });
    if let (Value::Object(m), Value::Object(e)) = (&mut v, to_value(&enc)) {
        m.extend(e);
    }
    Ok((sink, Rendered::Json(v)))
}

fn decode_cmd(ctx: &Context, a: &DecodeArgs) -> CliResult<(Sink, Rendered)> {
    let sink = ctx.sink(&a.common, Format::Json, &[Format::Json])?;
    let p = ctx.partition(&a.common)?;
    let d = DigitSequence::from_str(&a.digits).map_err(|e| Failure::Usage(e.to_string()))?;
    let x = decode(&p, &d)?;
    let mut v = json!({
        "digits": d.digits(),
        "x": fixed_decimal(&x, decimal_digits(p.precision())),
        "x_f64": x.to_f64(),
        "precision": p.precision(),
    });
    if p.is_classical() {
        v["exact"] = Value::String(decode_exact(&p, &d)?.to_string());
    }
    Ok((sink, Rendered::Json(v)))
}

fn dim_cmd(ctx: &Context, a: &DimArgs) -> CliResult<(Sink, Rendered)> {
    let sink = ctx.sink(&a.common, Format::Json, &[Format::Json])?;
    let p = ctx.partition(&a.common)?;
    let model = ctx
        .model(a.model.as_ref(), &p)?
        .ok_or_else(|| Failure::Usage("dim needs --model".into()))?;
    let est = moran_root(&model, &p, a.k, a.tol)?;
    Ok((
        sink,
        Rendered::Json(json!({
            "model": model_value(&model),
            "partition": to_value(p.spec()),
            "k": a.k,
            "s_star": est.s_star,
            "theory": est.theory.map(|t| t.value),
            "gap": est.gap(),
            "estimate": to_value(&est),
        })),
    ))
}

fn sigma_cmd(ctx: &Context, a: &SigmaArgs) -> CliResult<(Sink, Rendered)> {
    let sink = ctx.sink(&a.common, Format::Json, &[Format::Json])?;
    let p = ctx.partition(&a.common)?;
    let seq: SequenceSpec = match &a.sequence {
        Some(s) => serde_json::from_str(&inline_or_file(s)?)
            .map_err(|e| Failure::Usage(format!("sequence: {e}")))?,
        None => match ctx.model(a.model.as_ref(), &p)?.map(|m| m.kind().clone()) {
            Some(ModelKind::Jarnik { s, .. }) => s,
            Some(_) => return Err(Failure::Usage("sigma needs a Jarnik model".into())),
            None => {
                return Err(Failure::Usage(
                    "sigma needs --sequence or a Jarnik --model".into(),
                ))
            }
        },
    };
    let theta = a.theta.unwrap_or_else(|| p.theta());
    let r = sigma_from_sequence(theta, &seq, a.horizon, a.eps)?;
    Ok((
        sink,
        Rendered::Json(json!({ "sequence": to_value(&seq), "report": to_value(&r) })),
    ))
}

fn sweep_models(ctx: &Context, a: &SweepArgs) -> CliResult<Vec<String>> {
    let mut raw = Vec::new();
    if a.model.is_empty() {
        raw.extend(ctx.model_json(None)?);
    }
    for m in &a.model {
        raw.push(inline_or_file(m)?);
    }
    let mut out = Vec::new();
    for json in raw {
        match serde_json::from_str::<Value>(&json)
            .map_err(|e| Failure::Usage(format!("model: {e}")))?
        {
            Value::Array(items) => out.extend(items.iter().map(Value::to_string)),
            v => out.push(v.to_string()),
        }
    }
    if out.is_empty() {
        return Err(Failure::Usage("sweep needs at least one --model".into()));
    }
    Ok(out)
}

fn sweep_cmd(ctx: &Context, a: &SweepArgs) -> CliResult<(Sink, Rendered)> {
    let sink = ctx.sink(&a.common, Format::Csv, &[Format::Json, Format::Csv])?;
    let p = ctx.partition(&a.common)?;
    let mut rows = Vec::new();
    for json in sweep_models(ctx, a)? {
        let model = ConstraintModel::from_json(&json, &p)?;
        for &k in &a.k {
            let est = moran_root(&model, &p, k, a.tol)?;
            rows.push((
                model.to_json(),
                k,
                est.s_star,
                est.theory.map(|t| t.value),
                est.gap(),
            ));
        }
    }
    let out = match sink.format {
        Format::Json => Rendered::Json(Value::Array(
            rows.into_iter()
                .map(|(m, k, s, t, g)| {
                    json!({
                        "model_params": serde_json::from_str::<Value>(&m).unwrap_or(Value::Null),
                        "k": k, "s_star": s, "theory": t, "gap": g,
                    })
                })
                .collect(),
        )),
        Format::Csv => {
            let opt = |x: Option<f64>| x.map(fmt17).unwrap_or_default();
            Rendered::Csv(csv_bytes(
                &["model_params", "k", "s_star", "theory", "gap"],
                rows.into_iter()
                    .map(|(m, k, s, t, g)| vec![m, k.to_string(), fmt17(s), opt(t), opt(g)])
                    .collect(),
            )?)
        }
    };
    Ok((sink, out))
}

fn verify_cmd(ctx: &Context, a: &VerifyArgs) -> CliResult<(Sink, Rendered)> {
    let sink = ctx.sink(&a.common, Format::Json, &[Format::Json])?;
    let p = ctx.partition(&a.common)?;
    let params = SuiteParams {
        seed: ctx.seed(&a.common),
        samples: a.samples,
        depth: a.depth,
        model: ctx.model(a.model.as_ref(), &p)?,
    };
    let report = run_suite(a.suite, &p, &params)?;
    if !report.passed {
        return Err(Failure::Suite(report));
    }
    Ok((sink, Rendered::Json(to_value(&report))))
}

fn dispatch(cli: &Cli, precision: Option<u32>) -> CliResult<(Sink, Rendered)> {
    let common = match &cli.command {
        Command::Partition {
            action: PartitionCommand::Info(a),
        } => &a.common,
        Command::Encode(a) => &a.common,
        Command::Decode(a) => &a.common,
        Command::Dim(a) => &a.common,
        Command::Sigma(a) => &a.common,
        Command::Sweep(a) => &a.common,
        Command::Verify(a) => &a.common,
    };
    let ctx = Context::new(common, precision)?;
    match &cli.command {
        Command::Partition {
            action: PartitionCommand::Info(a),
        } => partition_info(&ctx, a),
        Command::Encode(a) => encode_cmd(&ctx, a),
        Command::Decode(a) => decode_cmd(&ctx, a),
        Command::Dim(a) => dim_cmd(&ctx, a),
        Command::Sigma(a) => sigma_cmd(&ctx, a),
        Command::Sweep(a) => sweep_cmd(&ctx, a),
        Command::Verify(a) => verify_cmd(&ctx, a),
    }
}

fn error_object(kind: &str, message: &str, report: Option<&SuiteReport>) -> String {
    let mut e = json!({ "kind": kind, "message": message });
    if let Some(r) = report {
        e["report"] = to_value(r);
    }
    json!({ "error": e }).to_string()
}

fn precision_override(raw: Option<OsString>) -> CliResult<Option<u32>> {
    let Some(raw) = raw else { return Ok(None) };
    let s = raw
        .to_str()
        .ok_or_else(|| Failure::Usage(format!("{PRECISION_ENV} is not valid UTF-8")))?;
    s.trim()
        .parse::<u32>()
        .map(Some)
        .map_err(|e| Failure::Usage(format!("{PRECISION_ENV}=`{s}`: {e}")))
}

/// Runs one command line (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                1
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    let result =
        precision_override(std::env::var_os(PRECISION_ENV)).and_then(|prec| dispatch(&cli, prec));
    let (sink, rendered) = match result {
        Ok(r) => r,
        Err(f) => {
            let (code, line) = match &f {
                Failure::Usage(m) => (1, error_object("usage", m, None)),
                Failure::Numeric(e) => (2, error_object(e.kind(), &e.to_string(), None)),
                Failure::Suite(r) => (
                    2,
                    error_object("verify-failed", "property suite failed", Some(r)),
                ),
            };
            let _ = writeln!(err, "{line}");
            return code;
        }
    };
    let bytes = match rendered {
        Rendered::Json(v) => {
            let mut b = serde_json::to_vec_pretty(&v).expect("JSON values serialize");
            b.push(b'\n');
            b
        }
        Rendered::Csv(b) => b,
    };
    let written = match &sink.path {
        Some(path) => {
            fs::write(path, &bytes).map_err(|e| format!("cannot write {}: {e}", path.display()))
        }
        None => out.write_all(&bytes).map_err(|e| e.to_string()),
    };
    match written {
        Ok(()) => 0,
        Err(m) => {
            let _ = writeln!(err, "{}", error_object("io", &m, None));
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_decimal_shapes() {
        let x = Float::with_val(128, Rational::from((5, 12)));
        assert!(fixed_decimal(&x, 10).starts_with("0.416666666"));
        let y = Float::with_val(64, 3.0e-5);
        assert_eq!(fixed_decimal(&y, 3), "0.0000300");
        assert_eq!(fixed_decimal(&Float::with_val(64, 1), 3), "1.00");
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt17(0.5), "5.0000000000000000e-1");
        assert_eq!(fmt17(1.0 / 3.0).parse::<f64>().unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn errors_are_classified() {
        assert!(matches!(
            Failure::from(Error::InvalidModel("x".into())),
            Failure::Usage(_)
        ));
        assert!(matches!(
            Failure::from(Error::Divergent { s: 0.1 }),
            Failure::Numeric(_)
        ));
        assert!(precision_override(Some("abc".into())).is_err());
        assert_eq!(
            precision_override(Some("256".into())).ok().flatten(),
            Some(256)
        );
    }
}

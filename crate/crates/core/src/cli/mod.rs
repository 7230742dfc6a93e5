//! Command-line front end for the `qdecomp` binary.
//!
//! Exit codes: 0 success, 2 invalid input, 3 unsupported request, 4 a
//! bound violation or an internal inconsistency. Every number is rounded
//! to 12 significant digits before printing.

mod fig1;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::asymmetry::{
    oracle_asymmetry, renyi_asymmetry_target, standard_asymmetry, AsymmetryResult, AsymmetryTarget, OptimizerConfig,
};
use crate::bounds::{self, fuzz_campaign, mu_overlap, BoundReport, CampaignSpec};
use crate::decompose;
use crate::entropy::{
    min_entropy, relative_entropy, renyi_entropy, renyi_entropy_state, sandwiched_divergence, shannon_entropy,
    von_neumann_entropy, LogBase, ProbabilityVector, RenyiOrder,
};
use crate::error::{Error, Result};
use crate::quantum::io::Instance;
use crate::quantum::measure_probabilities;

pub use fig1::{fig1_table, Block, Fig1Row, Fig1Table, FIG1_COLUMNS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_UNSUPPORTED: i32 = 3;
pub const EXIT_VIOLATION: i32 = 4;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Defaults for a run, optionally read from the file named by
/// `QDECOMP_CONFIG` and then overridden by flags.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub log_base: f64,
    pub format: Format,
    /// Margins below `−margin_tolerance` count as violations.
    pub margin_tolerance: f64,
    /// Overrides the per-kind decomposition tolerance.
    pub decomposition_tolerance: Option<f64>,
    pub optimizer: OptimizerConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            log_base: 2.0,
            format: Format::Json,
            margin_tolerance: bounds::TOL_MARGIN,
            decomposition_tolerance: None,
            optimizer: OptimizerConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    fn base(&self) -> Result<LogBase> {
        LogBase::new(self.log_base)
    }
}

#[derive(Parser, Debug)]
#[command(name = "qdecomp", version, about = "Quantum-classical decompositions, Renyi asymmetry and uncertainty bounds")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// JSON file with a RunConfig.
    #[arg(long, global = true, env = "QDECOMP_CONFIG")]
    config: Option<PathBuf>,
    /// Logarithm base for entropic output (must exceed 1).
    #[arg(long, global = true)]
    log_base: Option<f64>,
    /// Optimizer seed, or campaign seed for `fuzz`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    restarts: Option<usize>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate one quantity on an instance file.
    Compute {
        #[arg(value_enum)]
        kind: ComputeKind,
        instance: PathBuf,
        /// Renyi order; overrides the instance's `alpha`.
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, value_enum, default_value_t = AsymmetryMethod::Auto)]
        method: AsymmetryMethod,
        /// Grid intervals per axis for `--method oracle`.
        #[arg(long, default_value_t = 40)]
        grid_steps: usize,
        #[arg(long, value_enum)]
        decomposition: Option<DecompositionChoice>,
        #[arg(long, value_enum, default_value_t = CheckChoice::Mu)]
        check: CheckChoice,
    },
    /// Sweep the qubit entropy bounds over the Bloch length.
    Fig1 {
        #[arg(long, default_value_t = 100)]
        steps: usize,
    },
    /// Run a randomized campaign described by a JSON spec.
    Fuzz {
        spec: PathBuf,
        /// Worker threads; all cores when omitted.
        #[arg(long)]
        parallelism: Option<usize>,
    },
    /// Parse and check an instance (or, with --campaign, a campaign spec).
    Validate {
        file: PathBuf,
        #[arg(long)]
        campaign: bool,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ComputeKind {
    Entropy,
    Divergence,
    Asymmetry,
    Decompose,
    Bound,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum AsymmetryMethod {
    /// Closed form at α = 1, optimizer otherwise.
    Auto,
    ClosedForm,
    Optimizer,
    Oracle,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DecompositionChoice {
    Skew,
    Covariance,
    Shannon,
    Renyi,
    Selfdual,
    VarianceRoof,
    RoofBounds,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CheckChoice {
    Mu,
    Tradeoff,
    Strong,
    Spectral,
    Mixedness,
    Subadditivity,
}

/// Output of a subcommand plus whether it found a violation.
struct Outcome {
    value: Value,
    csv: Option<String>,
    violation: bool,
}

impl Outcome {
    fn ok(value: Value) -> Self {
        Self { value, csv: None, violation: false }
    }
}

/// Runs the CLI on `args` (including the program name). Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    match execute(&cli, err) {
        Ok((outcome, format)) => {
            let text = render(&outcome, format);
            if let Err(e) = emit(&cli.global.out, &text, out) {
                let _ = writeln!(err, "error: {e}");
                return EXIT_INVALID;
            }
            if outcome.violation {
                EXIT_VIOLATION
            } else {
                EXIT_OK
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Unsupported(_) => EXIT_UNSUPPORTED,
        Error::Inconsistent(_) => EXIT_VIOLATION,
        _ => EXIT_INVALID,
    }
}

fn emit(path: &Option<PathBuf>, text: &str, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn config(g: &GlobalArgs) -> Result<RunConfig> {
    let mut cfg = match &g.config {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    if let Some(b) = g.log_base {
        cfg.log_base = b;
    }
    if let Some(s) = g.seed {
        cfg.optimizer.seed = s;
    }
    if let Some(r) = g.restarts {
        cfg.optimizer.restarts = r;
    }
    if let Some(f) = g.format {
        cfg.format = f;
    }
    cfg.base()?;
    if cfg.optimizer.restarts == 0 {
        return Err(Error::Invalid("restarts must be at least 1".into()));
    }
    Ok(cfg)
}

fn read_instance(path: &Path) -> Result<Instance> {
    Instance::from_json(&std::fs::read_to_string(path)?)
}

fn execute(cli: &Cli, err: &mut dyn Write) -> Result<(Outcome, Format)> {
    let cfg = config(&cli.global)?;
    let base = cfg.base()?;
    let outcome = match &cli.command {
        Command::Compute { kind, instance, alpha, method, grid_steps, decomposition, check } => {
            let inst = read_instance(instance)?;
            let alpha = alpha.or(inst.alpha);
            match kind {
                ComputeKind::Entropy => compute_entropy(&inst, alpha, base)?,
                ComputeKind::Divergence => compute_divergence(&inst, alpha, base)?,
                ComputeKind::Asymmetry => compute_asymmetry(&inst, alpha, *method, *grid_steps, &cfg, base)?,
                ComputeKind::Decompose => compute_decomposition(&inst, alpha, *decomposition, &cfg, base)?,
                ComputeKind::Bound => compute_bound(&inst, alpha, *check, &cfg, base)?,
            }
        }
        Command::Fig1 { steps } => {
            let table = fig1_table(*steps, base)?;
            let _ = writeln!(err, "crossing r = {}", sig12(table.crossing));
            Outcome { value: serde_json::to_value(&table)?, csv: Some(fig1_csv(&table)?), violation: false }
        }
        Command::Fuzz { spec, parallelism } => {
            let mut spec: CampaignSpec = serde_json::from_str(&std::fs::read_to_string(spec)?)?;
            if let Some(s) = cli.global.seed {
                spec.seed = s;
            }
            if let Some(r) = cli.global.restarts {
                spec.optimizer.restarts = r;
            }
            spec.validate()?;
            let summary = match parallelism {
                Some(n) => rayon::ThreadPoolBuilder::new()
                    .num_threads(*n)
                    .build()
                    .map_err(|e| Error::Invalid(e.to_string()))?
                    .install(|| fuzz_campaign(&spec))?,
                None => fuzz_campaign(&spec)?,
            };
            let _ = writeln!(
                err,
                "{} instances, {} violations, {:.2}s",
                summary.instances_run,
                summary.violating_instances.len(),
                summary.runtime.as_secs_f64()
            );
            let mut v = serde_json::to_value(&summary)?;
            // margins stay in nats; the summary records the base for clarity
            v["margin_units"] = json!("nats");
            Outcome { value: v, csv: None, violation: !summary.is_clean() }
        }
        Command::Validate { file, campaign } => {
            let text = std::fs::read_to_string(file)?;
            if *campaign {
                let spec: CampaignSpec = serde_json::from_str(&text)?;
                spec.validate()?;
                Outcome::ok(json!({"valid": true, "check": spec.check, "count": spec.count}))
            } else {
                let inst = Instance::from_json(&text)?;
                let fields: Vec<String> = match serde_json::to_value(&inst)? {
                    Value::Object(m) => m.keys().cloned().collect(),
                    _ => Vec::new(),
                };
                if let Some(a) = inst.alpha {
                    RenyiOrder::new(a)?;
                }
                Outcome::ok(json!({"valid": true, "fields": fields}))
            }
        }
    };
    Ok((outcome, cfg.format))
}

fn order(alpha: Option<f64>) -> Result<RenyiOrder> {
    RenyiOrder::new(alpha.unwrap_or(1.0))
}

fn compute_entropy(inst: &Instance, alpha: Option<f64>, base: LogBase) -> Result<Outcome> {
    let a = order(alpha)?;
    let mut m = Map::new();
    m.insert("log_base".into(), json!(base.value()));
    m.insert("alpha".into(), json!(a.value()));
    let dist = |p: &ProbabilityVector| {
        json!({
            "shannon": base.from_nats(shannon_entropy(p)),
            "renyi": base.from_nats(renyi_entropy(p, a)),
            "min": base.from_nats(min_entropy(p)),
        })
    };
    if let Some(p) = &inst.probabilities {
        m.insert("probabilities".into(), dist(&ProbabilityVector::new(p.clone())?));
    }
    if let Some(rho) = &inst.state {
        m.insert(
            "state".into(),
            json!({
                "von_neumann": base.from_nats(von_neumann_entropy(rho)),
                "renyi": base.from_nats(renyi_entropy_state(rho, a)),
            }),
        );
        if let Some(x) = &inst.observable {
            m.insert("measurement".into(), dist(&measure_probabilities(rho, x)?));
        }
    }
    if m.len() == 2 {
        return Err(Error::Invalid("entropy needs 'probabilities' or 'state'".into()));
    }
    Ok(Outcome::ok(Value::Object(m)))
}

fn compute_divergence(inst: &Instance, alpha: Option<f64>, base: LogBase) -> Result<Outcome> {
    let a = order(alpha)?;
    let rho = inst.state()?;
    let sigma = inst.sigma.as_ref().ok_or_else(|| Error::Invalid("divergence needs 'sigma'".into()))?;
    let d = if a.is_one() { relative_entropy(rho, sigma)? } else { sandwiched_divergence(rho, sigma, a)? };
    Ok(Outcome::ok(json!({"log_base": base.value(), "alpha": a.value(), "divergence": base.from_nats(d)})))
}

fn target(inst: &Instance) -> Result<AsymmetryTarget> {
    if let Some(x) = &inst.observable {
        return Ok(AsymmetryTarget::Observable(x.clone()));
    }
    if let Some(g) = &inst.group {
        return Ok(AsymmetryTarget::Group(g.matrices()?));
    }
    if let Some(s) = &inst.set {
        return Ok(AsymmetryTarget::Set(s.to_set()?));
    }
    if let Some(c) = &inst.channel {
        return Ok(AsymmetryTarget::Channel(c.to_channel()?));
    }
    Err(Error::Invalid("asymmetry needs 'observable', 'group', 'set' or 'channel'".into()))
}

fn asymmetry_json(r: &AsymmetryResult, base: LogBase) -> Result<Value> {
    let mut v = serde_json::to_value(r)?;
    v["value"] = json!(base.from_nats(r.value));
    v["gap_estimate"] = json!(base.from_nats(r.gap_estimate));
    Ok(v)
}

fn compute_asymmetry(
    inst: &Instance,
    alpha: Option<f64>,
    method: AsymmetryMethod,
    grid_steps: usize,
    cfg: &RunConfig,
    base: LogBase,
) -> Result<Outcome> {
    let a = order(alpha)?;
    let rho = inst.state()?;
    let t = target(inst)?;
    let v = match method {
        AsymmetryMethod::Oracle => {
            let x = inst.observable()?;
            json!({"method": "oracle", "grid_steps": grid_steps, "value": base.from_nats(oracle_asymmetry(x, rho, a, grid_steps)?)})
        }
        AsymmetryMethod::ClosedForm => {
            if !a.is_one() {
                return Err(Error::Unsupported("closed form exists only at alpha = 1".into()));
            }
            asymmetry_json(&standard_asymmetry(&t, rho)?, base)?
        }
        AsymmetryMethod::Auto if a.is_one() => asymmetry_json(&standard_asymmetry(&t, rho)?, base)?,
        _ => asymmetry_json(&renyi_asymmetry_target(&t, rho, a, &cfg.optimizer)?, base)?,
    };
    let mut v = v;
    v["log_base"] = json!(base.value());
    v["alpha"] = json!(a.value());
    Ok(Outcome::ok(v))
}

fn compute_decomposition(
    inst: &Instance,
    alpha: Option<f64>,
    choice: Option<DecompositionChoice>,
    cfg: &RunConfig,
    base: LogBase,
) -> Result<Outcome> {
    use DecompositionChoice as D;
    let rho = inst.state()?;
    let choice = choice.unwrap_or(match alpha {
        Some(a) if a != 1.0 => D::Renyi,
        _ => D::Shannon,
    });
    let report = |r: decompose::DecompositionReport, tol: f64| -> Result<Value> {
        r.check(cfg.decomposition_tolerance.unwrap_or(tol))?;
        let mut v = serde_json::to_value(r.in_base(base))?;
        if r.kind.is_entropic() {
            v["log_base"] = json!(base.value());
        }
        Ok(v)
    };
    let v = match choice {
        D::Skew => report(decompose::decompose_variance_skew(inst.observable()?, rho)?, decompose::TOL_EXACT)?,
        D::Shannon => report(decompose::decompose_shannon(inst.observable()?, rho)?, decompose::TOL_EXACT)?,
        D::Renyi => report(
            decompose::decompose_renyi(inst.observable()?, rho, order(alpha)?, &cfg.optimizer)?,
            decompose::TOL_OPTIMIZED,
        )?,
        D::VarianceRoof => report(decompose::variance_convex_roof(inst.observable()?, rho)?, decompose::TOL_EXACT)?,
        D::Selfdual => {
            let (r, channel) = decompose::decompose_selfdual(inst.observable()?, rho)?;
            let mut ch = serde_json::to_value(&channel)?;
            for key in ["mutual_information", "conditional_entropy"] {
                if let Some(x) = ch[key].as_f64() {
                    ch[key] = json!(base.from_nats(x));
                }
            }
            json!({"report": report(r, decompose::TOL_EXACT)?, "channel": ch})
        }
        D::Covariance => {
            let xs = match (&inst.observables, &inst.observable) {
                (Some(v), _) => v.clone(),
                (None, Some(x)) => vec![x.clone()],
                _ => return Err(Error::Invalid("covariance needs 'observables' or 'observable'".into())),
            };
            serde_json::to_value(decompose::decompose_covariance_sld(&xs, rho)?)?
        }
        D::RoofBounds => {
            let mut v = serde_json::to_value(decompose::shannon_roof_bounds(inst.observable()?, rho)?.in_base(base))?;
            v["log_base"] = json!(base.value());
            v
        }
    };
    Ok(Outcome::ok(v))
}

fn compute_bound(inst: &Instance, alpha: Option<f64>, check: CheckChoice, cfg: &RunConfig, base: LogBase) -> Result<Outcome> {
    let rho = || inst.state();
    let y = || inst.observable_y.as_ref().ok_or_else(|| Error::Invalid("instance has no 'observable_y'".into()));
    let a = order(alpha)?;
    let opt = &cfg.optimizer;
    let rep: BoundReport = match check {
        CheckChoice::Mu => {
            let mu = mu_overlap(inst.observable()?, y()?)?;
            return Ok(Outcome::ok(json!({"mu": mu, "neg_log_mu": base.from_nats(-mu.ln()), "log_base": base.value()})));
        }
        CheckChoice::Tradeoff => bounds::check_tradeoff(inst.observable()?, y()?, rho()?, a, opt)?,
        CheckChoice::Strong => bounds::check_strong_uncertainty(inst.observable()?, y()?, rho()?, a, opt)?,
        CheckChoice::Spectral => bounds::corollary1_bound(inst.observable()?, rho()?, a)?,
        CheckChoice::Mixedness => bounds::corollary4_bound(inst.observable()?, rho()?, a, opt)?,
        CheckChoice::Subadditivity => {
            let s = inst.set.as_ref().ok_or_else(|| Error::Invalid("instance has no 'set'".into()))?.to_set()?;
            let t = inst.set_t.as_ref().ok_or_else(|| Error::Invalid("instance has no 'set_t'".into()))?.to_set()?;
            bounds::check_gao_subadditivity(&s, &t, rho()?)?
        }
    };
    let violation = rep.margin < -cfg.margin_tolerance;
    let mut v = serde_json::to_value(rep.with_seed(opt.seed).in_base(base))?;
    v["log_base"] = json!(base.value());
    Ok(Outcome { value: v, csv: None, violation })
}

/// `x` rounded to 12 significant digits.
pub fn sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

fn round_all(v: &mut Value) {
    match v {
        Value::Number(n) if !(n.is_i64() || n.is_u64()) => {
            if let Some(r) = n.as_f64().map(sig12).and_then(serde_json::Number::from_f64) {
                *n = r;
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_all),
        Value::Object(m) => m.values_mut().for_each(round_all),
        _ => {}
    }
}

fn render(outcome: &Outcome, format: Format) -> String {
    match (format, &outcome.csv) {
        (Format::Csv, Some(csv)) => csv.clone(),
        (Format::Csv, None) => {
            let mut v = outcome.value.clone();
            round_all(&mut v);
            let mut rows = Vec::new();
            flatten("", &v, &mut rows);
            let mut s = String::from("key,value\n");
            for (k, val) in rows {
                s.push_str(&format!("{k},{val}\n"));
            }
            s
        }
        (Format::Json, _) => {
            let mut v = outcome.value.clone();
            round_all(&mut v);
            let mut s = serde_json::to_string_pretty(&v).expect("values serialize");
            s.push('\n');
            s
        }
    }
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, x)| flatten(&key(k), x, rows)),
        Value::Array(a) => a.iter().enumerate().for_each(|(i, x)| flatten(&key(&i.to_string()), x, rows)),
        Value::String(s) => rows.push((prefix.to_string(), s.clone())),
        other => rows.push((prefix.to_string(), other.to_string())),
    }
}

fn fig1_csv(t: &Fig1Table) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(FIG1_COLUMNS).map_err(csv_err)?;
    for r in &t.rows {
        let block = serde_json::to_value(r.block)?.as_str().unwrap_or_default().to_string();
        let nums = [r.r, r.h_rho, r.classical_aligned, r.classical_tilted].map(|x| sig12(x).to_string());
        w.write_record(std::iter::once(block).chain(nums)).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Invalid(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Invalid(format!("csv: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("qdecomp").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    fn write_tmp(dir: &tempfile::TempDir, name: &str, body: &str) -> String {
        let p = dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        p.to_str().unwrap().to_string()
    }

    #[test]
    fn sig12_rounds() {
        assert_eq!(sig12(1.0 / 7.0), 0.142857142857);
        assert_eq!(sig12(0.0), 0.0);
        assert_eq!(sig12(-1.0 / 3.0), -0.333333333333);
    }

    #[test]
    fn entropy_of_uniform_vector() {
        let dir = tempfile::tempdir().unwrap();
        let f = write_tmp(&dir, "p.json", r#"{"probabilities": [0.25, 0.25, 0.25, 0.25]}"#);
        let (code, out, _) = call(&["compute", "entropy", &f]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["probabilities"]["shannon"], json!(2.0));
        let (_, out, _) = call(&["--log-base", "2.718281828459045", "compute", "entropy", &f]);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["probabilities"]["shannon"].as_f64().unwrap(), sig12(4f64.ln()));
    }

    #[test]
    fn exit_codes() {
        let dir = tempfile::tempdir().unwrap();
        let bad = write_tmp(&dir, "bad.json", r#"{"state": {"dim": 2, "matrix": [[[1,0]]]}}"#);
        assert_eq!(call(&["compute", "entropy", &bad]).0, EXIT_INVALID);
        assert_eq!(call(&["validate", &bad]).0, EXIT_INVALID);
        assert_eq!(call(&["nonsense"]).0, EXIT_INVALID);
        assert_eq!(call(&["--log-base", "1", "fig1"]).0, EXIT_INVALID);
        let big = write_tmp(&dir, "big.json", r#"{"check": "tradeoff", "count": 2, "dims": [5]}"#);
        assert_eq!(call(&["fuzz", &big]).0, EXIT_UNSUPPORTED);
        let empty = write_tmp(&dir, "empty.json", r#"{"check": "tradeoff", "count": 0}"#);
        let (code, out, _) = call(&["fuzz", &empty]);
        assert_eq!(code, 0);
        assert!(out.contains("\"instances_run\": 0"));
    }

    #[test]
    fn fig1_csv_is_stable() {
        let (code, a, err) = call(&["--format", "csv", "fig1", "--steps", "10"]);
        assert_eq!(code, 0);
        assert!(err.contains("crossing"));
        let (_, b, _) = call(&["--format", "csv", "fig1", "--steps", "10"]);
        assert_eq!(a, b);
        assert!(a.starts_with("block,r,h_rho,classical_aligned,classical_tilted\nqubit,0,1,1,1\n"));
        assert_eq!(a.lines().count(), 1 + 2 * 11 + 1);
    }
}

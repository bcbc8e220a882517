//! `meandiff`: evaluate means and divergences, audit inequality chains,
//! tabulate sharp constants and certify polynomial positivity.
//!
//! Exit codes: 0 when every check passes, 1 on a failed check or a domain
//! error, 2 on usage and parse errors.

mod input;
mod report;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use meandiff::divergences::{divergence, verify_divergence_chain, ClassicalKind, DistributionOptions, DivergenceKind};
use meandiff::inequalities::{audit_chain, beta_table, builtin_chain, log_grid, tightness_check, AuditConfig, Measure};
use meandiff::means::{mean_value, parse_real, MeanKind, PositivePair};
use meandiff::polycert::{certify_positive, Verdict as PolyVerdict};
use meandiff::rational::format_rational;
use serde_json::{json, Value};

use report::{render, Check, Format, ReportBuilder, ReportDocument, Verdict};

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments, unparsable input, unknown names, unreadable files.
    Usage(String),
    /// Input that parses but lies outside a measure's domain.
    Domain(String),
}

impl CliError {
    fn context(self, what: &str) -> Self {
        match self {
            CliError::Usage(m) => CliError::Usage(format!("{what}: {m}")),
            CliError::Domain(m) => CliError::Domain(format!("{what}: {m}")),
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 1,
        }
    }
}

impl From<meandiff::Error> for CliError {
    fn from(e: meandiff::Error) -> Self {
        match e {
            meandiff::Error::Parse(_) => CliError::Usage(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Domain(m) => f.write_str(m),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "meandiff", version, about = "Mean differences, inequality audits and divergence measures")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalOpts {
    /// Number of log-uniform samples per audit.
    #[arg(long, global = true, default_value_t = 100_000)]
    samples: usize,
    /// Seed for the sampler.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Sampling range LO:HI for x = a/b.
    #[arg(long, global = true, default_value = "1e-6:1e6")]
    range: String,
    /// Largest relative violation still counted as a pass.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tolerance: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Replace each probability p by (p + 1e-12)/(1 + n·1e-12).
    #[arg(long, global = true)]
    smooth: bool,
    /// Divide input distributions by their sums.
    #[arg(long, global = true)]
    normalize: bool,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a mean: KIND is A, G, H, S, N1..N3, P1..P6, gini:r:s, power:r or lehmer:r.
    Mean {
        kind: String,
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// Audit an inequality chain (builtin name or chain file).
    Audit { chain: String },
    /// Tabulate the sharp constant of every numbered two-term result.
    Betas,
    /// Certify a polynomial positive on t > 0 (builtin:NAME, a file, or a literal).
    Certify { polynomial: String },
    /// Evaluate a divergence between two distribution files: KIND P Q, or --chain P Q.
    Divergence {
        /// Check the divergence chains instead of evaluating one measure.
        #[arg(long)]
        chain: bool,
        #[arg(num_args = 2..=3, required = true)]
        args: Vec<String>,
    },
}

/// Validated global configuration.
struct RunConfig {
    samples: usize,
    seed: u64,
    range: (f64, f64),
    tolerance: f64,
    format: Format,
    smooth: bool,
    normalize: bool,
    output: Option<PathBuf>,
}

impl RunConfig {
    fn from_opts(g: GlobalOpts) -> Result<Self, CliError> {
        let (lo, hi) = g
            .range
            .split_once(':')
            .ok_or_else(|| CliError::Usage(format!("--range must be LO:HI, got '{}'", g.range)))?;
        let lo = parse_real(lo).map_err(|_| CliError::Usage(format!("invalid range bound '{lo}'")))?;
        let hi = parse_real(hi).map_err(|_| CliError::Usage(format!("invalid range bound '{hi}'")))?;
        if !(lo > 0.0 && lo < hi && hi.is_finite()) {
            return Err(CliError::Usage(format!("--range needs 0 < LO < HI < inf, got {lo}:{hi}")));
        }
        if g.samples == 0 {
            return Err(CliError::Usage("--samples must be at least 1".into()));
        }
        if !(g.tolerance >= 0.0 && g.tolerance.is_finite()) {
            return Err(CliError::Usage("--tolerance must be a finite nonnegative number".into()));
        }
        Ok(RunConfig {
            samples: g.samples,
            seed: g.seed,
            range: (lo, hi),
            tolerance: g.tolerance,
            format: g.format,
            smooth: g.smooth,
            normalize: g.normalize,
            output: g.output,
        })
    }

    fn distribution_options(&self) -> DistributionOptions {
        DistributionOptions { normalize: self.normalize, smooth: self.smooth, ..DistributionOptions::default() }
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

fn cmd_mean(cfg: &RunConfig, kind: &str, a: &str, b: &str) -> Result<ReportDocument, CliError> {
    let k: MeanKind = kind.parse()?;
    let (x, y) = (parse_real(a)?, parse_real(b)?);
    let value = mean_value(k, PositivePair::new(x, y)?)?;
    let mut r = ReportBuilder::new("mean", json!({"kind": k.to_string(), "a": x, "b": y, "format": cfg.format}));
    r.value(value);
    r.check(Check {
        name: format!("{k}({x}, {y})"),
        verdict: Verdict::Pass,
        max_violation: None,
        witness: None,
        message: report::fmt15(value),
        details: json!({"value": value}),
    });
    Ok(r.finish())
}

/// Grid for the informational part of the tightness check.
fn tightness_grid() -> Vec<f64> {
    log_grid(1e-3, 1e3, 61)
}

fn cmd_audit(cfg: &RunConfig, spec: &str) -> Result<ReportDocument, CliError> {
    let (chain, source) = input::resolve_chain(spec)?;
    let audit_cfg = AuditConfig {
        samples: cfg.samples,
        seed: cfg.seed,
        range: cfg.range,
        tolerance: cfg.tolerance,
        ..AuditConfig::default()
    };
    let audit = audit_chain(&chain, &audit_cfg)?;
    let mut r = ReportBuilder::new(
        "audit",
        json!({
            "chain": chain.name,
            "source": source,
            "samples": cfg.samples,
            "seed": cfg.seed,
            "range": [cfg.range.0, cfg.range.1],
            "tolerance": cfg.tolerance,
            "format": cfg.format,
        }),
    );
    let grid = tightness_grid();
    for (edge, ea) in chain.edges.iter().zip(&audit.edges) {
        r.check(Check {
            name: format!("audit: {}", ea.edge),
            verdict: Verdict::from_bool(ea.passed),
            max_violation: Some(ea.max_violation),
            witness: Some(to_value(&ea.witness)),
            message: format!(
                "max violation {} at (a, b) = ({}, {})",
                report::fmt15(ea.max_violation),
                report::fmt15(ea.witness.a),
                report::fmt15(ea.witness.b)
            ),
            details: to_value(ea),
        });
        let is_mean = |m: &Measure| matches!(m, Measure::Mean(_));
        if is_mean(&edge.lhs.measure) || is_mean(&edge.rhs.measure) {
            continue;
        }
        match tightness_check(edge, &grid) {
            Ok(t) => r.check(Check {
                name: format!("tightness: {}", t.edge),
                verdict: Verdict::from_bool(t.passed),
                max_violation: None,
                witness: None,
                message: format!(
                    "ratio at 1±1e-4 = ({}, {}), beta = {}, grid max {} at x = {}",
                    report::fmt15(t.ratio_near_one.0),
                    report::fmt15(t.ratio_near_one.1),
                    format_rational(&t.beta),
                    report::fmt15(t.grid_max),
                    report::fmt15(t.grid_argmax)
                ),
                details: to_value(&t),
            }),
            Err(e) => r.check(Check {
                name: format!("tightness: {edge}"),
                verdict: Verdict::Error,
                max_violation: None,
                witness: None,
                message: e.to_string(),
                details: Value::Null,
            }),
        }
    }
    Ok(r.finish())
}

fn cmd_betas(cfg: &RunConfig) -> Result<ReportDocument, CliError> {
    let mut r = ReportBuilder::new("betas", json!({"format": cfg.format}));
    for rec in beta_table()? {
        let beta = format_rational(&rec.beta);
        let printed = format_rational(&rec.printed);
        let agreement = if rec.matches {
            "matches printed value".to_string()
        } else {
            format!("differs from printed value {printed}")
        };
        r.check(Check {
            name: format!("part {}: D({}) <= beta D({})", rec.part, rec.lhs, rec.rhs),
            verdict: Verdict::from_bool(rec.matches),
            max_violation: None,
            witness: None,
            message: format!("{beta}, {agreement} ({})", rec.method),
            details: to_value(&rec),
        });
    }
    Ok(r.finish())
}

fn cmd_certify(cfg: &RunConfig, spec: &str) -> Result<ReportDocument, CliError> {
    let (poly, source) = input::resolve_polynomial(spec)?;
    let cert = certify_positive(&poly)?;
    let mut r = ReportBuilder::new("certify", json!({"polynomial": source, "format": cfg.format}));
    let verdict = to_value(&cert.verdict);
    let roots: Vec<String> = cert
        .roots
        .iter()
        .map(|root| {
            if root.multiplicity > 1 {
                format!("{} (x{})", report::fmt15(root.approx()), root.multiplicity)
            } else {
                report::fmt15(root.approx())
            }
        })
        .collect();
    r.check(Check {
        name: format!("certify: {poly}"),
        verdict: Verdict::from_bool(cert.verdict != PolyVerdict::Indefinite),
        max_violation: None,
        witness: None,
        message: format!(
            "{}; value at t=1 is {}; real roots [{}]",
            verdict.as_str().unwrap_or_default(),
            cert.value_at_one,
            roots.join(", ")
        ),
        details: to_value(&cert),
    });
    Ok(r.finish())
}

fn parse_divergence_kind(s: &str) -> Result<DivergenceKind, CliError> {
    if let Some(k) = ClassicalKind::ALL.iter().find(|k| k.to_string().eq_ignore_ascii_case(s)) {
        return Ok(DivergenceKind::Classical(*k));
    }
    Ok(s.parse::<DivergenceKind>()?)
}

fn cmd_divergence(cfg: &RunConfig, chain: bool, args: &[String]) -> Result<ReportDocument, CliError> {
    let (kind, files) = match (chain, args.len()) {
        (true, 2) => (None, args),
        (false, 3) => (Some(parse_divergence_kind(&args[0])?), &args[1..]),
        (true, _) => return Err(CliError::Usage("with --chain, give exactly two files: P Q".into())),
        (false, _) => return Err(CliError::Usage("expected KIND P Q".into())),
    };
    let opts = cfg.distribution_options();
    let p = input::load_distribution(files[0].as_ref(), &opts)?;
    let q = input::load_distribution(files[1].as_ref(), &opts)?;
    let config = json!({
        "kind": kind.map(|k| k.to_string()),
        "p": files[0],
        "q": files[1],
        "n": p.len(),
        "smooth": cfg.smooth,
        "normalize": cfg.normalize,
        "tolerance": cfg.tolerance,
        "format": cfg.format,
    });
    let mut r = ReportBuilder::new("divergence", config);
    match kind {
        Some(k) => {
            let value = divergence(k, &p, &q)?;
            r.value(value);
            r.check(Check {
                name: format!("{k}(P||Q)"),
                verdict: Verdict::Pass,
                max_violation: None,
                witness: None,
                message: report::fmt15(value),
                details: json!({"value": value}),
            });
        }
        None => {
            for name in ["eq46", "thm41"] {
                let chain = builtin_chain(name).expect("builtin chain");
                let check = verify_divergence_chain(&chain, &p, &q, cfg.tolerance)?;
                for e in &check.edges {
                    r.check(Check {
                        name: format!("{name}: {}", e.edge),
                        verdict: Verdict::from_bool(e.passed),
                        max_violation: Some(e.violation),
                        witness: None,
                        message: format!("{} <= {}", report::fmt15(e.lhs), report::fmt15(e.rhs)),
                        details: to_value(e),
                    });
                }
            }
        }
    }
    Ok(r.finish())
}

fn run(cli: Cli) -> Result<ReportDocument, CliError> {
    let cfg = RunConfig::from_opts(cli.global)?;
    let doc = match &cli.command {
        Command::Mean { kind, a, b } => cmd_mean(&cfg, kind, a, b)?,
        Command::Audit { chain } => cmd_audit(&cfg, chain)?,
        Command::Betas => cmd_betas(&cfg)?,
        Command::Certify { polynomial } => cmd_certify(&cfg, polynomial)?,
        Command::Divergence { chain, args } => cmd_divergence(&cfg, *chain, args)?,
    };
    let text = render(&doc, cfg.format).map_err(|e| CliError::Usage(e.to_string()))?;
    match &cfg.output {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(doc)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(doc) if doc.verdict == Verdict::Pass => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

//! The report document every command produces, and its renderings.

use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::Result;
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Error,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Error => "ERROR",
        }
    }
}

/// One named check with its outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub verdict: Verdict,
    pub max_violation: Option<f64>,
    pub witness: Option<Value>,
    /// One-line human-readable summary.
    pub message: String,
    /// Structured result from the library.
    pub details: Value,
}

/// Wall-clock information; the only part of a report that varies between
/// identical runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timestamp {
    pub started_unix_seconds: f64,
    pub duration_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Echo of the effective configuration.
    pub config: Value,
    pub checks: Vec<Check>,
    pub verdict: Verdict,
    /// Primary scalar result for `mean` and `divergence`.
    pub value: Option<f64>,
    pub timestamp: Timestamp,
}

/// Collects checks and stamps the timing when finished.
pub struct ReportBuilder {
    command: String,
    config: Value,
    checks: Vec<Check>,
    value: Option<f64>,
    started: SystemTime,
    clock: Instant,
}

impl ReportBuilder {
    pub fn new(command: &str, config: Value) -> Self {
        ReportBuilder {
            command: command.to_string(),
            config,
            checks: Vec::new(),
            value: None,
            started: SystemTime::now(),
            clock: Instant::now(),
        }
    }

    pub fn check(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn value(&mut self, v: f64) {
        self.value = Some(v);
    }

    pub fn finish(self) -> ReportDocument {
        let verdict = if self.checks.iter().any(|c| c.verdict == Verdict::Error) {
            Verdict::Error
        } else {
            Verdict::from_bool(self.checks.iter().all(|c| c.verdict == Verdict::Pass))
        };
        let started = self.started.duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0);
        ReportDocument {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: self.command,
            config: self.config,
            checks: self.checks,
            verdict,
            value: self.value,
            timestamp: Timestamp { started_unix_seconds: started, duration_seconds: self.clock.elapsed().as_secs_f64() },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// `v` with 15 significant digits, trailing zeros removed; positional
/// notation for exponents in `[-5, 15)`, scientific otherwise.
pub fn fmt15(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { "0".into() } else { v.to_string() };
    }
    let sci = format!("{v:.14e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let neg = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };
    let sign = if neg { "-" } else { "" };
    if !(-5..15).contains(&exp) {
        let (first, rest) = digits.split_at(1);
        return if rest.is_empty() { format!("{sign}{first}e{exp}") } else { format!("{sign}{first}.{rest}e{exp}") };
    }
    let body = if exp < 0 {
        format!("0.{}{digits}", "0".repeat((-exp - 1) as usize))
    } else {
        let int_len = exp as usize + 1;
        if digits.len() <= int_len {
            format!("{digits}{}", "0".repeat(int_len - digits.len()))
        } else {
            format!("{}.{}", &digits[..int_len], &digits[int_len..])
        }
    };
    format!("{sign}{body}")
}

pub fn render(doc: &ReportDocument, format: Format) -> Result<String> {
    Ok(match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(doc)?;
            s.push('\n');
            s
        }
        Format::Csv => render_csv(doc)?,
        Format::Text => render_text(doc),
    })
}

fn render_text(doc: &ReportDocument) -> String {
    // Scalar commands print just the value.
    if let (Some(v), true) = (doc.value, doc.checks.len() <= 1) {
        return format!("{}\n", fmt15(v));
    }
    let mut out = String::new();
    for c in &doc.checks {
        out.push_str(&format!("[{}] {}", c.verdict.label(), c.name));
        if !c.message.is_empty() {
            out.push_str(&format!(": {}", c.message));
        }
        out.push('\n');
    }
    let passed = doc.checks.iter().filter(|c| c.verdict == Verdict::Pass).count();
    out.push_str(&format!(
        "{}: {passed}/{} checks passed\n",
        doc.verdict.label(),
        doc.checks.len()
    ));
    out
}

fn render_csv(doc: &ReportDocument) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["name", "verdict", "max_violation", "witness", "message"])?;
    for c in &doc.checks {
        let verdict = serde_json::to_value(c.verdict)?;
        w.write_record([
            c.name.clone(),
            verdict.as_str().unwrap_or_default().to_string(),
            c.max_violation.map(|v| v.to_string()).unwrap_or_default(),
            c.witness.as_ref().map(|v| v.to_string()).unwrap_or_default(),
            c.message.clone(),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn fifteen_digit_formatting() {
        assert_eq!(fmt15(2.0), "2");
        assert_eq!(fmt15(6.0), "6");
        assert_eq!(fmt15(5.0 / 3.0), "1.66666666666667");
        assert_eq!(fmt15(7.0 / 12.0), "0.583333333333333");
        assert_eq!(fmt15(-0.25), "-0.25");
        assert_eq!(fmt15(1234.5), "1234.5");
        assert_eq!(fmt15(1e-7), "1e-7");
        assert_eq!(fmt15(1.5e20), "1.5e20");
        assert_eq!(fmt15(0.0001), "0.0001");
        assert_eq!(fmt15(0.0), "0");
    }

    fn sample() -> ReportDocument {
        let mut b = ReportBuilder::new("audit", json!({"samples": 10, "range": [1e-6, 1e6]}));
        b.check(Check {
            name: "audit: SA <= 1/3 SH".into(),
            verdict: Verdict::Pass,
            max_violation: Some(-0.123456789012345),
            witness: Some(json!({"a": 0.1, "b": 1.0})),
            message: "ok".into(),
            details: json!({"x": [1, 2]}),
        });
        b.check(Check {
            name: "t".into(),
            verdict: Verdict::Fail,
            max_violation: None,
            witness: None,
            message: "has, comma \"quoted\"".into(),
            details: Value::Null,
        });
        b.finish()
    }

    #[test]
    fn json_round_trip() {
        let doc = sample();
        assert_eq!(doc.verdict, Verdict::Fail);
        let text = render(&doc, Format::Json).unwrap();
        let back: ReportDocument = serde_json::from_str(&text).unwrap();
        assert_eq!(back, doc);
    }

    #[test]
    fn csv_quotes_fields() {
        let text = render(&sample(), Format::Csv).unwrap();
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let rows: Vec<csv::StringRecord> = r.records().map(|r| r.unwrap()).collect();
        assert_eq!(rows.len(), 2);
        assert_eq!(&rows[1][4], "has, comma \"quoted\"");
        assert_eq!(&rows[0][1], "pass");
    }

    #[test]
    fn text_summary() {
        let text = render(&sample(), Format::Text).unwrap();
        assert!(text.contains("[PASS] audit: SA <= 1/3 SH: ok"));
        assert!(text.ends_with("FAIL: 1/2 checks passed\n"));
    }
}

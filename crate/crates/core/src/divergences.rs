//! Divergence measures between discrete distributions.
//!
//! Every measure here has the Csiszár form `D(P‖Q) = Σ q_i·f(p_i/q_i)` for a
//! convex generator `f` with `f(1) = 0`. The generator is either one of the
//! classical ones ([`ClassicalKind`]) or a mean difference `g_tp`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::{Serialize, Serializer};

use crate::differences::{generator_difference_in, DifferencePair};
use crate::exec::{chunk_ranges, map_chunks, Execution};
use crate::inequalities::{InequalityChain, Measure};
use crate::means::MeanKind;
use crate::rational::{rationalize, Rational};
use crate::scalar::{DoubleDouble, Scalar};
use crate::{input_err, Error, Result};

/// The classical symmetric divergences and their companions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClassicalKind {
    /// Jensen–Shannon: `f(x) = (x/2)·ln(2x/(x+1)) + ½·ln(2/(x+1))`.
    I,
    /// Jeffreys: `f(x) = (x−1)·ln x`.
    J,
    /// Arithmetic–geometric: `f(x) = ((x+1)/2)·ln((x+1)/(2√x))`.
    T,
    /// Symmetric chi-square: `f(x) = (x−1)²(x+1)/x`.
    Psi,
    /// Triangular discrimination: `f(x) = (x−1)²/(x+1)`.
    Delta,
    /// Hellinger: `f(x) = (√x−1)²/2`.
    Hellinger,
}

impl ClassicalKind {
    pub const ALL: [ClassicalKind; 6] = [
        ClassicalKind::I,
        ClassicalKind::J,
        ClassicalKind::T,
        ClassicalKind::Psi,
        ClassicalKind::Delta,
        ClassicalKind::Hellinger,
    ];

    /// Generator `f(x)` in any scalar type.
    pub fn generator_in<T: Scalar>(&self, x: T) -> T {
        let one = T::from_f64(1.0);
        let two = T::from_f64(2.0);
        let half = T::from_f64(0.5);
        match self {
            ClassicalKind::I => {
                let s = x + one;
                half * x * (two * x / s).ln() + half * (two / s).ln()
            }
            ClassicalKind::J => (x - one) * x.ln(),
            ClassicalKind::T => {
                let s = x + one;
                half * s * (s / (two * x.sqrt())).ln()
            }
            ClassicalKind::Psi => (x - one).square() * (x + one) / x,
            ClassicalKind::Delta => (x - one).square() / (x + one),
            ClassicalKind::Hellinger => half * (x.sqrt() - one).square(),
        }
    }

    /// Closed-form `f″(x)`.
    pub fn second_derivative(&self, x: f64) -> f64 {
        match self {
            ClassicalKind::I => 1.0 / (2.0 * x * (x + 1.0)),
            ClassicalKind::J => (x + 1.0) / (x * x),
            ClassicalKind::T => (x * x + 1.0) / (4.0 * x * x * (x + 1.0)),
            ClassicalKind::Psi => 2.0 + 2.0 / (x * x * x),
            ClassicalKind::Delta => 8.0 / (x + 1.0).powi(3),
            ClassicalKind::Hellinger => 0.25 / (x * x.sqrt()),
        }
    }
}

impl fmt::Display for ClassicalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassicalKind::I => "I",
            ClassicalKind::J => "J",
            ClassicalKind::T => "T",
            ClassicalKind::Psi => "Psi",
            ClassicalKind::Delta => "Delta",
            ClassicalKind::Hellinger => "h",
        })
    }
}

impl FromStr for ClassicalKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "I" => ClassicalKind::I,
            "J" => ClassicalKind::J,
            "T" => ClassicalKind::T,
            "Psi" | "psi" | "Ψ" => ClassicalKind::Psi,
            "Delta" | "delta" | "Δ" => ClassicalKind::Delta,
            "h" | "hellinger" => ClassicalKind::Hellinger,
            _ => return Err(Error::Parse(format!("unknown divergence '{s}'"))),
        })
    }
}

impl Serialize for ClassicalKind {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A divergence: classical, or generated by a mean difference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DivergenceKind {
    Classical(ClassicalKind),
    MeanDifference(DifferencePair),
}

impl DivergenceKind {
    pub fn generator_in<T: Scalar>(&self, x: T) -> T {
        match self {
            DivergenceKind::Classical(k) => k.generator_in(x),
            DivergenceKind::MeanDifference(p) => generator_difference_in(*p, x),
        }
    }
}

impl From<DivergenceKind> for Measure {
    fn from(k: DivergenceKind) -> Measure {
        match k {
            DivergenceKind::Classical(c) => Measure::Divergence(c),
            DivergenceKind::MeanDifference(p) => Measure::Difference(p),
        }
    }
}

impl fmt::Display for DivergenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DivergenceKind::Classical(k) => write!(f, "{k}"),
            DivergenceKind::MeanDifference(p) => write!(f, "{p}"),
        }
    }
}

impl FromStr for DivergenceKind {
    type Err = Error;

    /// A classical name (`I`, `J`, `T`, `Psi`, `Delta`, `h`) or a difference
    /// (`AG`, `D(U,L)`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Ok(k) = s.parse::<ClassicalKind>() {
            return Ok(DivergenceKind::Classical(k));
        }
        s.parse::<DifferencePair>()
            .map(DivergenceKind::MeanDifference)
            .map_err(|_| Error::Parse(format!("unknown divergence '{s}'")))
    }
}

impl Serialize for DivergenceKind {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Smoothing mass added to each entry by [`DistributionOptions::smooth`].
pub const SMOOTHING: f64 = 1e-12;

/// How raw input vectors become distributions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistributionOptions {
    /// Allowed `|Σp − 1|` when not normalizing.
    pub tolerance: f64,
    /// Divide by the sum instead of requiring it to be 1.
    pub normalize: bool,
    /// Map `p ↦ (p + ε)/(1 + nε)` so zero entries become admissible.
    pub smooth: bool,
}

impl Default for DistributionOptions {
    fn default() -> Self {
        DistributionOptions { tolerance: 1e-9, normalize: false, smooth: false }
    }
}

/// A probability vector with strictly positive entries.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Distribution(Vec<f64>);

impl Distribution {
    /// Validates with the default options: entries > 0, sum within 1e−9 of 1.
    pub fn new(p: Vec<f64>) -> Result<Self> {
        Self::with_options(p, &DistributionOptions::default())
    }

    pub fn with_options(mut p: Vec<f64>, opts: &DistributionOptions) -> Result<Self> {
        if p.is_empty() {
            return input_err("distribution is empty");
        }
        if let Some(v) = p.iter().find(|v| !v.is_finite()) {
            return input_err(format!("non-finite probability {v}"));
        }
        if let Some(v) = p.iter().find(|v| **v < 0.0) {
            return Err(Error::Domain(format!("negative probability {v}")));
        }
        let sum: f64 = p.iter().sum();
        if opts.normalize {
            if sum <= 0.0 {
                return Err(Error::Domain("cannot normalize a zero vector".into()));
            }
            p.iter_mut().for_each(|v| *v /= sum);
        } else if (sum - 1.0).abs() > opts.tolerance {
            return Err(Error::Domain(format!(
                "probabilities sum to {sum}, not 1 (tolerance {})",
                opts.tolerance
            )));
        }
        if opts.smooth {
            let n = p.len() as f64;
            p.iter_mut().for_each(|v| *v = (*v + SMOOTHING) / (1.0 + n * SMOOTHING));
        }
        if let Some(i) = p.iter().position(|v| *v <= 0.0) {
            return Err(Error::Domain(format!(
                "probability at index {i} is zero; use smoothing to admit zeros"
            )));
        }
        Ok(Distribution(p))
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `Σ q_i·f(p_i/q_i)` for any measure, accumulated in double-double.
pub fn measure_sum(m: Measure, p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return input_err(format!("length mismatch: {} vs {}", p.len(), q.len()));
    }
    if p.is_empty() {
        return input_err("distributions are empty");
    }
    if p.iter().chain(q).any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::Domain("entries must be positive and finite".into()));
    }
    let mut acc = DoubleDouble::new(0.0);
    for (&pi, &qi) in p.iter().zip(q) {
        let qd = DoubleDouble::new(qi);
        acc = acc + qd * m.eval_in(DoubleDouble::new(pi) / qd);
    }
    Ok(acc.value())
}

/// `D(P‖Q) = Σ q_i·f(p_i/q_i)`.
pub fn divergence(kind: DivergenceKind, p: &Distribution, q: &Distribution) -> Result<f64> {
    measure_sum(kind.into(), p.probabilities(), q.probabilities())
}

/// One evaluated edge of a chain over `(P, Q)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeCheck {
    pub edge: String,
    pub lhs: f64,
    pub rhs: f64,
    pub violation: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainCheck {
    pub chain: String,
    pub tolerance: f64,
    pub edges: Vec<EdgeCheck>,
    pub passed: bool,
}

fn relative_violation(l: f64, r: f64) -> f64 {
    (l - r) / r.abs().max(1e-300)
}

/// Evaluates every edge of `chain` with each measure summed over `(P, Q)`.
pub fn verify_divergence_chain(
    chain: &InequalityChain,
    p: &Distribution,
    q: &Distribution,
    tolerance: f64,
) -> Result<ChainCheck> {
    let edges = check_edges(chain, p.probabilities(), q.probabilities(), tolerance)?;
    let passed = edges.iter().all(|e| e.passed);
    Ok(ChainCheck { chain: chain.name.clone(), tolerance, edges, passed })
}

fn check_edges(chain: &InequalityChain, p: &[f64], q: &[f64], tolerance: f64) -> Result<Vec<EdgeCheck>> {
    chain
        .edges
        .iter()
        .map(|e| {
            let l = coeff(&e.lhs.coeff) * measure_sum(e.lhs.measure, p, q)?;
            let r = coeff(&e.rhs.coeff) * measure_sum(e.rhs.measure, p, q)?;
            let violation = relative_violation(l, r);
            Ok(EdgeCheck { edge: e.to_string(), lhs: l, rhs: r, violation, passed: violation <= tolerance })
        })
        .collect()
}

fn coeff(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Entries below this are clipped before renormalizing in
/// [`random_distribution`].
pub const MIN_PROBABILITY: f64 = 1e-9;

/// A flat-Dirichlet sample of length `n`, clipped at 1e−9 and renormalized.
pub fn random_distribution<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Distribution {
    let mut v: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x = (*x / s).max(MIN_PROBABILITY));
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
    Distribution(v)
}

/// A random pair `(P, Q)` with a common length drawn from `2..=64`.
pub fn random_pair<R: Rng + ?Sized>(rng: &mut R) -> (Distribution, Distribution) {
    let n = rng.random_range(2..=64);
    (random_distribution(rng, n), random_distribution(rng, n))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DivergenceAuditConfig {
    pub trials: usize,
    pub seed: u64,
    pub tolerance: f64,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for DivergenceAuditConfig {
    fn default() -> Self {
        DivergenceAuditConfig { trials: 10_000, seed: 0, tolerance: 1e-10, execution: Execution::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceEdgeAudit {
    pub edge: String,
    pub max_violation: f64,
    /// Trial index attaining the maximum (lowest index on ties).
    pub worst_trial: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceAuditReport {
    pub chain: String,
    pub trials: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub edges: Vec<DivergenceEdgeAudit>,
    pub passed: bool,
}

/// Checks `chain` on `cfg.trials` random distribution pairs. Trial `i`
/// lives in chunk `i / 1024`, which draws from ChaCha stream `chunk`, so the
/// report is identical under sequential and parallel execution.
pub fn audit_divergence_chain(chain: &InequalityChain, cfg: &DivergenceAuditConfig) -> Result<DivergenceAuditReport> {
    if cfg.trials == 0 {
        return input_err("trials must be at least 1");
    }
    if chain.edges.is_empty() {
        return input_err(format!("chain '{}' has no edges", chain.name));
    }
    let ranges = chunk_ranges(cfg.trials);
    let per_chunk = map_chunks(ranges.len(), cfg.execution, |c| -> Result<Vec<(f64, usize)>> {
        let (start, end) = ranges[c];
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(c as u64);
        let mut worst = vec![(f64::NEG_INFINITY, usize::MAX); chain.edges.len()];
        for i in start..end {
            let (p, q) = random_pair(&mut rng);
            for (w, e) in worst.iter_mut().zip(check_edges(chain, &p.0, &q.0, cfg.tolerance)?) {
                if e.violation > w.0 {
                    *w = (e.violation, i);
                }
            }
        }
        Ok(worst)
    });
    let mut worst = vec![(f64::NEG_INFINITY, usize::MAX); chain.edges.len()];
    for chunk in per_chunk {
        for (w, c) in worst.iter_mut().zip(chunk?) {
            if c.0 > w.0 || (c.0 == w.0 && c.1 < w.1) {
                *w = c;
            }
        }
    }
    let edges: Vec<DivergenceEdgeAudit> = chain
        .edges
        .iter()
        .zip(worst)
        .map(|(e, (v, i))| DivergenceEdgeAudit {
            edge: e.to_string(),
            max_violation: v,
            worst_trial: i,
            passed: v <= cfg.tolerance,
        })
        .collect();
    let passed = edges.iter().all(|e| e.passed);
    Ok(DivergenceAuditReport { chain: chain.name.clone(), trials: cfg.trials, seed: cfg.seed, tolerance: cfg.tolerance, edges, passed })
}

/// Offset from 1 at which the ratio's limit is sampled.
pub const RATIO_LIMIT_OFFSET: f64 = 1e-5;

/// Mean-difference/divergence curvature ratios with closed-form derivatives.
pub const RATIO_CHECKS: [&str; 3] = ["AP4_vs_I", "P5G_vs_J", "P5A_vs_T"];

struct RatioSpec {
    lhs: DifferencePair,
    rhs: ClassicalKind,
    ratio: fn(f64) -> f64,
    derivative: fn(f64) -> f64,
}

fn ratio_spec(name: &str) -> Option<RatioSpec> {
    use MeanKind::*;
    let pair = |u, l| DifferencePair::new(u, l).expect("ordered pair");
    Some(match name {
        "AP4_vs_I" => RatioSpec {
            lhs: pair(A, P4),
            rhs: ClassicalKind::I,
            ratio: |x| {
                let s = x.sqrt();
                12.0 * x * (x + 1.0) / (s * (s + 1.0).powi(4))
            },
            derivative: |x| {
                let s = x.sqrt();
                -6.0 * (s - 1.0).powi(3) / (s * (s + 1.0).powi(5))
            },
        },
        "P5G_vs_J" => RatioSpec {
            lhs: pair(P5, G),
            rhs: ClassicalKind::J,
            ratio: |x| {
                let s = x.sqrt();
                3.0 * s * (4.0 * x * s + 4.0 * s + x * x - 2.0 * x + 1.0) / (4.0 * (x + 1.0) * (s + 1.0).powi(4))
            },
            derivative: |x| {
                let s = x.sqrt();
                -3.0 * (s - 1.0).powi(3) * (x * x + 8.0 * x * s + 6.0 * x + 8.0 * s + 1.0)
                    / (8.0 * s * (s + 1.0).powi(5) * (x + 1.0).powi(2))
            },
        },
        "P5A_vs_T" => RatioSpec {
            lhs: pair(P5, A),
            rhs: ClassicalKind::T,
            ratio: |x| {
                let s = x.sqrt();
                2.0 * s * (4.0 * x * s + 4.0 * s + x * x - 6.0 * x + 1.0) * (x + 1.0)
                    / ((x * x + 1.0) * (s + 1.0).powi(4))
            },
            derivative: |x| {
                let s = x.sqrt();
                let x2 = x * x;
                -(s - 1.0).powi(3)
                    * (8.0 * s * (x2 + 1.0) * (s - 1.0).powi(2) + x2 * x2 + 14.0 * x2 * x + 10.0 * x2 + 14.0 * x + 1.0)
                    / (s * (s + 1.0).powi(5) * (x2 + 1.0).powi(2))
            },
        },
        _ => return None,
    })
}

/// Outcome of a monotonicity check on the curvature ratio `g″_L/f″_R`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioReport {
    pub name: String,
    pub lhs: DifferencePair,
    pub rhs: ClassicalKind,
    /// Quotient of second derivatives at `1 − 1e−5` and `1 + 1e−5`.
    pub limit_samples: (f64, f64),
    /// Limit of the ratio at 1, recovered as a rational.
    #[serde(serialize_with = "ser_opt_rational")]
    pub value_at_one: Option<Rational>,
    /// Closed-form ratio agrees with the quotient of second derivatives.
    pub ratio_agrees: bool,
    /// Closed-form derivative agrees with a central difference of the ratio.
    pub derivative_agrees: bool,
    pub increasing_below_one: bool,
    pub decreasing_above_one: bool,
    /// Largest ratio on the grid; bounded by the value at 1 when the ratio
    /// peaks there.
    pub grid_max: f64,
    pub passed: bool,
}

fn ser_opt_rational<S: Serializer>(r: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(&crate::rational::format_rational(r)),
        None => s.serialize_none(),
    }
}

/// Verifies that `r = g″_L/f″_R` increases on `(0,1)` and decreases on
/// `(1,∞)`. Then `r(1)·f_R − g_L` is convex with a double zero at 1, so
/// `g_L ≤ r(1)·f_R` everywhere and `r(1)` is sharp.
pub fn ratio_monotonicity_check(name: &str, grid: &[f64]) -> Result<RatioReport> {
    let spec = ratio_spec(name).ok_or_else(|| {
        Error::Input(format!("unknown ratio check '{name}'; expected one of {}", RATIO_CHECKS.join(", ")))
    })?;
    if grid.is_empty() || grid.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
        return input_err("grid must be nonempty, positive and finite");
    }
    // The limit at 1 comes from the independent quotient of second
    // derivatives, not from the closed-form ratio under test.
    let quotient = |x: f64| -> Result<f64> {
        Ok(Measure::Difference(spec.lhs).second_derivative(x)? / spec.rhs.second_derivative(x))
    };
    let limit_samples = (quotient(1.0 - RATIO_LIMIT_OFFSET)?, quotient(1.0 + RATIO_LIMIT_OFFSET)?);
    let at_one = 0.5 * (limit_samples.0 + limit_samples.1);
    let value_at_one = rationalize(at_one);
    let mut ratio_agrees = true;
    let mut derivative_agrees = true;
    let mut increasing_below_one = true;
    let mut decreasing_above_one = true;
    let mut grid_max = f64::NEG_INFINITY;
    for &x in grid {
        let r = (spec.ratio)(x);
        grid_max = grid_max.max(r);
        let sd = quotient(x)?;
        ratio_agrees &= (sd - r).abs() <= 1e-9 * r.abs();
        let d = (spec.derivative)(x);
        let h = 1e-5 * x;
        let fd = ((spec.ratio)(x + h) - (spec.ratio)(x - h)) / (2.0 * h);
        derivative_agrees &= (fd - d).abs() <= 1e-5 * d.abs() + 1e-8 * r.abs().max(1.0);
        if x < 1.0 {
            increasing_below_one &= d > 0.0;
        } else if x > 1.0 {
            decreasing_above_one &= d < 0.0;
        }
    }
    let passed = ratio_agrees
        && derivative_agrees
        && increasing_below_one
        && decreasing_above_one
        && grid_max <= at_one * (1.0 + 1e-12)
        && value_at_one.is_some();
    Ok(RatioReport {
        name: name.to_string(),
        lhs: spec.lhs,
        rhs: spec.rhs,
        limit_samples,
        value_at_one,
        ratio_agrees,
        derivative_agrees,
        increasing_below_one,
        decreasing_above_one,
        grid_max,
        passed,
    })
}

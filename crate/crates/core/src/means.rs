//! Bivariate means: the Gini family `E(r,s)`, its power and Lehmer
//! sub-families, the thirteen named means, and their generators
//! `f_M(x) = M(x, 1)`.
//!
//! `mean_value` evaluates named means from their two-argument formulas and
//! `generator` from independent one-variable closed forms, so the two can be
//! checked against each other.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::scalar::{softplus, Scalar};
use crate::{input_err, Error, Result};

/// Two strictly positive, finite arguments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PositivePair {
    a: f64,
    b: f64,
}

impl PositivePair {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a > 0.0 && b > 0.0) {
            return input_err(format!("arguments must be positive and finite, got ({a}, {b})"));
        }
        Ok(PositivePair { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn swapped(&self) -> Self {
        PositivePair { a: self.b, b: self.a }
    }

    pub fn min(&self) -> f64 {
        self.a.min(self.b)
    }

    pub fn max(&self) -> f64 {
        self.a.max(self.b)
    }
}

/// A bivariate mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeanKind {
    Gini(f64, f64),
    Power(f64),
    Lehmer(f64),
    H,
    G,
    A,
    S,
    N1,
    N2,
    N3,
    P1,
    P2,
    P3,
    P4,
    P5,
    P6,
}

impl MeanKind {
    /// The named means, in increasing order where comparable.
    pub const NAMED: [MeanKind; 13] = [
        MeanKind::P1,
        MeanKind::P2,
        MeanKind::P3,
        MeanKind::H,
        MeanKind::P4,
        MeanKind::G,
        MeanKind::N1,
        MeanKind::N3,
        MeanKind::N2,
        MeanKind::A,
        MeanKind::P5,
        MeanKind::S,
        MeanKind::P6,
    ];

    pub fn is_named(&self) -> bool {
        !matches!(self, MeanKind::Gini(..) | MeanKind::Power(_) | MeanKind::Lehmer(_))
    }

    /// The equivalent parametric form of a named mean (`None` for N2, N3
    /// and for kinds that are already parametric).
    pub fn parametric_form(&self) -> Option<MeanKind> {
        use MeanKind::*;
        Some(match self {
            P1 => Lehmer(-2.0),
            P2 => Lehmer(-1.0),
            P3 => Lehmer(-0.5),
            H => Power(-1.0),
            P4 => Power(-0.5),
            G => Power(0.0),
            N1 => Power(0.5),
            A => Power(1.0),
            S => Power(2.0),
            P5 => Gini(0.5, 1.0),
            P6 => Lehmer(2.0),
            _ => return None,
        })
    }

    /// Gini parameters `(max(r,s), min(r,s))`; `None` for N2 and N3.
    ///
    /// Gini means increase in each parameter, so componentwise dominance of
    /// these pairs orders the corresponding means.
    pub fn gini_params(&self) -> Option<(f64, f64)> {
        use MeanKind::*;
        let (r, s) = match *self {
            Gini(r, s) => (r, s),
            Power(r) => (r, 0.0),
            Lehmer(r) => (r, r - 1.0),
            N2 | N3 => return None,
            named => return named.parametric_form().and_then(|k| k.gini_params()),
        };
        Some((r.max(s), r.min(s)))
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            MeanKind::Gini(r, s) => r.is_finite() && s.is_finite(),
            MeanKind::Power(r) | MeanKind::Lehmer(r) => r.is_finite(),
            _ => true,
        };
        if ok {
            Ok(())
        } else {
            input_err(format!("mean parameters must be finite: {self}"))
        }
    }
}

const PARAM_EPS: f64 = 1e-12;

fn dominates(t: (f64, f64), p: (f64, f64)) -> bool {
    t.0 >= p.0 - PARAM_EPS && t.1 >= p.1 - PARAM_EPS
}

/// Compares two means pointwise over all positive pairs.
///
/// Returns `Some(Greater)` if `t ≥ p` everywhere (and they differ),
/// `Some(Equal)` if they coincide, `Some(Less)` for the reverse and `None`
/// when no ordering is established (e.g. S and P5).
pub fn compare_means(t: MeanKind, p: MeanKind) -> Option<Ordering> {
    use MeanKind::*;
    match (t.gini_params(), p.gini_params()) {
        (Some(tp), Some(pp)) => {
            let ge = dominates(tp, pp);
            let le = dominates(pp, tp);
            match (ge, le) {
                (true, true) => Some(Ordering::Equal),
                (true, false) => Some(Ordering::Greater),
                (false, true) => Some(Ordering::Less),
                (false, false) => None,
            }
        }
        // N1 ≤ N3 ≤ N2 ≤ A.
        (None, Some(pp)) => {
            if dominates((0.5, 0.0), pp) {
                Some(Ordering::Greater)
            } else if dominates(pp, (1.0, 0.0)) {
                Some(Ordering::Less)
            } else {
                None
            }
        }
        (Some(_), None) => compare_means(p, t).map(Ordering::reverse),
        (None, None) => Some(match (t, p) {
            (N2, N3) => Ordering::Greater,
            (N3, N2) => Ordering::Less,
            _ => Ordering::Equal,
        }),
    }
}

impl fmt::Display for MeanKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use MeanKind::*;
        match self {
            Gini(r, s) => write!(f, "gini:{r}:{s}"),
            Power(r) => write!(f, "power:{r}"),
            Lehmer(r) => write!(f, "lehmer:{r}"),
            H => f.write_str("H"),
            G => f.write_str("G"),
            A => f.write_str("A"),
            S => f.write_str("S"),
            N1 => f.write_str("N1"),
            N2 => f.write_str("N2"),
            N3 => f.write_str("N3"),
            P1 => f.write_str("P1"),
            P2 => f.write_str("P2"),
            P3 => f.write_str("P3"),
            P4 => f.write_str("P4"),
            P5 => f.write_str("P5"),
            P6 => f.write_str("P6"),
        }
    }
}

impl Serialize for MeanKind {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Parses a real given as a decimal or as `p/q`.
pub fn parse_real(s: &str) -> Result<f64> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid number '{s}'"));
    let v = match s.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|_| bad())?;
            let q: f64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0.0 {
                return Err(bad());
            }
            p / q
        }
        None => s.parse().map_err(|_| bad())?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

impl FromStr for MeanKind {
    type Err = Error;

    /// Accepts a named mean (`A`, `P5`, …) or `gini:r:s`, `power:r`,
    /// `lehmer:r` with each parameter a decimal or `p/q`.
    fn from_str(s: &str) -> Result<Self> {
        use MeanKind::*;
        let s = s.trim();
        let parts: Vec<&str> = s.split(':').collect();
        let kind = match parts.as_slice() {
            [name] => match *name {
                "H" => H,
                "G" => G,
                "A" => A,
                "S" => S,
                "N1" => N1,
                "N2" => N2,
                "N3" => N3,
                "P1" => P1,
                "P2" => P2,
                "P3" => P3,
                "P4" => P4,
                "P5" => P5,
                "P6" => P6,
                _ => return Err(Error::Parse(format!("unknown mean '{s}'"))),
            },
            [fam, r] if fam.eq_ignore_ascii_case("power") => Power(parse_real(r)?),
            [fam, r] if fam.eq_ignore_ascii_case("lehmer") => Lehmer(parse_real(r)?),
            [fam, r, t] if fam.eq_ignore_ascii_case("gini") => Gini(parse_real(r)?, parse_real(t)?),
            _ => return Err(Error::Parse(format!("unknown mean '{s}'"))),
        };
        Ok(kind)
    }
}

/// Gini mean evaluated on arbitrary positive scalars, scaled so the larger
/// argument is 1.
fn gini_core<T: Scalar>(r: f64, s: f64, a: T, b: T) -> T {
    let (big, small) = if a.value() >= b.value() { (a, b) } else { (b, a) };
    // l = ln(small/big) ≤ 0
    let l = (small / big).ln();
    let one = T::from_f64(1.0);
    let scaled = if (r - s).abs() < PARAM_EPS {
        let r = 0.5 * (r + s);
        if r == 0.0 {
            (small / big).sqrt()
        } else {
            // exp(w·0 + (1−w)·l), w = weight of the larger argument
            let w_small = one / (one + (-(l * T::from_f64(r))).exp());
            (w_small * l).exp()
        }
    } else if r.abs().max(s.abs()) * l.value().abs() > 500.0 {
        let num = softplus(l * T::from_f64(r));
        let den = softplus(l * T::from_f64(s));
        ((num - den) / T::from_f64(r - s)).exp()
    } else {
        let x = small / big;
        let pr = if r == 0.0 { one } else { x.powf(r) };
        let ps = if s == 0.0 { one } else { x.powf(s) };
        ((one + pr) / (one + ps)).powf(1.0 / (r - s))
    };
    big * scaled
}

fn clamp_internal(v: f64, p: PositivePair) -> f64 {
    v.clamp(p.min(), p.max())
}

fn finite_param(r: f64) -> Result<()> {
    if r.is_finite() {
        Ok(())
    } else {
        input_err(format!("parameter must be finite, got {r}"))
    }
}

/// `E(r,s)(a,b)`: `((aʳ+bʳ)/(aˢ+bˢ))^{1/(r−s)}`, with the logarithmic-
/// derivative branch on the diagonal and `√(ab)` at `r = s = 0`.
pub fn gini_mean(r: f64, s: f64, pair: PositivePair) -> Result<f64> {
    finite_param(r)?;
    finite_param(s)?;
    Ok(clamp_internal(gini_core(r, s, pair.a, pair.b), pair))
}

/// Power mean `((aʳ+bʳ)/2)^{1/r}`, `√(ab)` at `r = 0`.
pub fn power_mean(r: f64, pair: PositivePair) -> Result<f64> {
    gini_mean(r, 0.0, pair)
}

/// Lehmer mean `(aʳ+bʳ)/(aʳ⁻¹+bʳ⁻¹)`.
pub fn lehmer_mean(r: f64, pair: PositivePair) -> Result<f64> {
    gini_mean(r, r - 1.0, pair)
}

/// Evaluates any mean at `(a, b)`.
pub fn mean_value(kind: MeanKind, pair: PositivePair) -> Result<f64> {
    use MeanKind::*;
    kind.validate()?;
    let v = match kind {
        Gini(r, s) => return gini_mean(r, s, pair),
        Power(r) => return power_mean(r, pair),
        Lehmer(r) => return lehmer_mean(r, pair),
        _ => {
            // 1-homogeneity: evaluate on (a/m, b/m) with m = max(a,b).
            let m = pair.max();
            m * named_mean(kind, pair.a / m, pair.b / m)
        }
    };
    Ok(clamp_internal(v, pair))
}

fn named_mean(kind: MeanKind, a: f64, b: f64) -> f64 {
    use MeanKind::*;
    let (ra, rb) = (a.sqrt(), b.sqrt());
    match kind {
        P1 => a * b * (a * a + b * b) / (a * a * a + b * b * b),
        P2 => a * b * (a + b) / (a * a + b * b),
        P3 => a * b * (ra + rb) / (a * ra + b * rb),
        H => 2.0 * a * b / (a + b),
        P4 => 4.0 * a * b / ((ra + rb) * (ra + rb)),
        G => ra * rb,
        N1 => ((ra + rb) / 2.0).powi(2),
        N3 => (a + ra * rb + b) / 3.0,
        N2 => (ra + rb) / 2.0 * ((a + b) / 2.0).sqrt(),
        A => (a + b) / 2.0,
        P5 => ((a + b) / (ra + rb)).powi(2),
        S => ((a * a + b * b) / 2.0).sqrt(),
        P6 => (a * a + b * b) / (a + b),
        Gini(..) | Power(_) | Lehmer(_) => unreachable!("parametric kinds handled by caller"),
    }
}

/// Generator `f_M(x) = M(x, 1)` in any [`Scalar`] type; `x` must be positive.
pub fn generator_in<T: Scalar>(kind: MeanKind, x: T) -> T {
    use MeanKind::*;
    let one = T::from_f64(1.0);
    let two = T::from_f64(2.0);
    let c = T::from_f64;
    let rx = x.sqrt();
    match kind {
        Gini(r, s) => gini_core(r, s, x, one),
        Power(r) => gini_core(r, 0.0, x, one),
        Lehmer(r) => gini_core(r, r - 1.0, x, one),
        P1 => x * (x * x + one) / (x * x * x + one),
        P2 => x * (x + one) / (x * x + one),
        P3 => x * (rx + one) / (x * rx + one),
        H => two * x / (one + x),
        P4 => c(4.0) * x / (rx + one).square(),
        G => rx,
        N1 => ((rx + one) / two).square(),
        N3 => (x + rx + one) / c(3.0),
        N2 => (rx + one) / two * ((x + one) / two).sqrt(),
        A => (x + one) / two,
        P5 => ((x + one) / (rx + one)).square(),
        S => ((x * x + one) / two).sqrt(),
        P6 => (x * x + one) / (x + one),
    }
}

/// Generator `f_M(x) = M(x, 1)`.
pub fn generator(kind: MeanKind, x: f64) -> Result<f64> {
    kind.validate()?;
    if !(x.is_finite() && x > 0.0) {
        return input_err(format!("generator argument must be positive and finite, got {x}"));
    }
    Ok(generator_in(kind, x))
}

/// Searches `xs` for points where `f_t > f_p` and where `f_t < f_p`.
/// Two witnesses prove the means are incomparable.
pub fn crossing_witnesses(t: MeanKind, p: MeanKind, xs: &[f64]) -> (Option<f64>, Option<f64>) {
    let mut above = None;
    let mut below = None;
    for &x in xs {
        if x.is_nan() || x <= 0.0 {
            continue;
        }
        let d = generator_in(t, x) - generator_in(p, x);
        if d > 0.0 && above.is_none() {
            above = Some(x);
        }
        if d < 0.0 && below.is_none() {
            below = Some(x);
        }
    }
    (above, below)
}

//! Differences of ordered means `D_tp(a,b) = t(a,b) − p(a,b) = b·g_tp(a/b)`,
//! closed-form second derivatives `g″_tp`, a finite-difference oracle, the
//! φ-transform and the V-measures.
//!
//! Differences of close means suffer catastrophic cancellation near `a = b`
//! (the value is `O((x−1)²)`), so they are evaluated in double-double
//! arithmetic and rounded once.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::means::{compare_means, generator_in, MeanKind, PositivePair};
use crate::polycert::{H1, H2, H3};
use crate::scalar::{Jet, Scalar, DoubleDouble};
use crate::{input_err, Error, Result};

/// An ordered pair of means `(upper, lower)` with `upper ≥ lower` everywhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DifferencePair {
    upper: MeanKind,
    lower: MeanKind,
}

impl DifferencePair {
    /// Rejects pairs that are equal, reversed or not known to be ordered.
    pub fn new(upper: MeanKind, lower: MeanKind) -> Result<Self> {
        match compare_means(upper, lower) {
            Some(Ordering::Greater) => Ok(DifferencePair { upper, lower }),
            Some(Ordering::Equal) => input_err(format!("{upper} and {lower} are the same mean")),
            Some(Ordering::Less) => input_err(format!("{upper} < {lower}: pair is reversed")),
            None => input_err(format!("{upper} and {lower} are not ordered")),
        }
    }

    /// Constructor for pairs known to be ordered at compile time.
    pub(crate) const fn of(upper: MeanKind, lower: MeanKind) -> Self {
        DifferencePair { upper, lower }
    }

    pub fn upper(&self) -> MeanKind {
        self.upper
    }

    pub fn lower(&self) -> MeanKind {
        self.lower
    }

    /// True for the 27 pairs with a closed-form `g″`.
    pub fn has_certificate(&self) -> bool {
        closed_form(*self).is_some()
    }
}

impl fmt::Display for DifferencePair {
    /// Named pairs print as the concatenation (`P6N2`), others as `D(u,l)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.upper.is_named() && self.lower.is_named() {
            write!(f, "{}{}", self.upper, self.lower)
        } else {
            write!(f, "D({},{})", self.upper, self.lower)
        }
    }
}

impl Serialize for DifferencePair {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FromStr for DifferencePair {
    type Err = Error;

    /// Accepts `D(U,L)` with any mean specs, or two concatenated named
    /// means such as `AG` or `P6N2`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(inner) = s.strip_prefix("D(").and_then(|r| r.strip_suffix(')')) {
            let (u, l) = inner
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("expected D(U,L), got '{s}'")))?;
            return DifferencePair::new(u.parse()?, l.parse()?);
        }
        for cut in 1..s.len() {
            if !s.is_char_boundary(cut) {
                continue;
            }
            let (u, l) = s.split_at(cut);
            if let (Ok(u), Ok(l)) = (u.parse::<MeanKind>(), l.parse::<MeanKind>()) {
                if u.is_named() && l.is_named() {
                    return DifferencePair::new(u, l);
                }
            }
        }
        Err(Error::Parse(format!("unknown difference '{s}'")))
    }
}

/// `g_tp(x) = f_t(x) − f_p(x)` in any scalar type.
pub fn generator_difference_in<T: Scalar>(pair: DifferencePair, x: T) -> T {
    generator_in(pair.upper, x) - generator_in(pair.lower, x)
}

fn check_x(x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        input_err(format!("argument must be positive and finite, got {x}"))
    }
}

/// `g_tp(x)`.
pub fn generator_difference(pair: DifferencePair, x: f64) -> Result<f64> {
    check_x(x)?;
    Ok(generator_difference_in(pair, DoubleDouble::from(x)).value())
}

/// `D_tp(a,b) = t(a,b) − p(a,b)`, computed as `b·g_tp(a/b)` with the ratio
/// and the difference in double-double.
pub fn difference(pair: DifferencePair, p: PositivePair) -> Result<f64> {
    let b = DoubleDouble::from(p.b());
    let x = DoubleDouble::from(p.a()) / b;
    Ok((b * generator_difference_in(pair, x)).value())
}

/// Central second difference `(g(x+h) − 2g(x) + g(x−h))/h²`; truncation
/// error `O(h²)`.
pub fn second_derivative_fd(pair: DifferencePair, x: f64, h: f64) -> Result<f64> {
    check_x(x)?;
    if !(h > 0.0 && h < x / 2.0) {
        return input_err(format!("step must satisfy 0 < h < x/2, got h = {h} at x = {x}"));
    }
    let g = |t: f64| generator_difference_in(pair, DoubleDouble::from(t));
    let two = DoubleDouble::from(2.0);
    let num = g(x + h) - two * g(x) + g(x - h);
    Ok(num.value() / (h * h))
}

/// Default relative finite-difference step.
pub const FD_REL_STEP: f64 = 1e-4;

/// `g″_tp(x)` by forward-mode differentiation (exact up to rounding);
/// works for every pair, certified or not.
pub fn second_derivative_ad(pair: DifferencePair, x: f64) -> Result<f64> {
    check_x(x)?;
    Ok(generator_difference_in(pair, Jet::variable(x)).d2)
}

/// Closed-form `g″_tp(x)` for the 27 certified pairs.
pub fn second_derivative_closed(pair: DifferencePair, x: f64) -> Result<f64> {
    let f = closed_form(pair).ok_or_else(|| Error::UnsupportedPair(pair.to_string()))?;
    check_x(x)?;
    Ok(f(x))
}

/// The certified pairs, in the order their closed forms are listed.
pub const CERTIFIED: [DifferencePair; 27] = {
    use MeanKind::*;
    [
        DifferencePair::of(P6, S),
        DifferencePair::of(P6, N2),
        DifferencePair::of(P6, N3),
        DifferencePair::of(P6, N1),
        DifferencePair::of(P6, G),
        DifferencePair::of(P6, P4),
        DifferencePair::of(P6, P2),
        DifferencePair::of(P6, P1),
        DifferencePair::of(P5, A),
        DifferencePair::of(P5, N2),
        DifferencePair::of(P5, N3),
        DifferencePair::of(P5, N1),
        DifferencePair::of(P5, G),
        DifferencePair::of(P5, H),
        DifferencePair::of(P5, P3),
        DifferencePair::of(P5, P2),
        DifferencePair::of(P5, P1),
        DifferencePair::of(S, P4),
        DifferencePair::of(A, P4),
        DifferencePair::of(S, A),
        DifferencePair::of(S, N2),
        DifferencePair::of(S, N1),
        DifferencePair::of(A, N2),
        DifferencePair::of(A, G),
        DifferencePair::of(A, H),
        DifferencePair::of(N2, N1),
        DifferencePair::of(S, G),
    ]
};

/// Horner evaluation of integer coefficients (constant term first).
fn horner(coeffs: &[i64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c as f64)
}

fn closed_form(pair: DifferencePair) -> Option<fn(f64) -> f64> {
    use MeanKind::*;
    // Shorthands: r = √x, x32 = x^{3/2}, s2 = √(2x+2), q2 = √(2x²+2).
    fn r(x: f64) -> f64 {
        x.sqrt()
    }
    fn x32(x: f64) -> f64 {
        x * x.sqrt()
    }
    fn s2(x: f64) -> f64 {
        (2.0 * x + 2.0).sqrt()
    }
    fn q2(x: f64) -> f64 {
        (2.0 * x * x + 2.0).sqrt()
    }
    // 4√x((√x−1)² + √x) + (x−1)²
    fn p5a_num(x: f64) -> f64 {
        4.0 * r(x) * ((r(x) - 1.0).powi(2) + r(x)) + (x - 1.0).powi(2)
    }
    let f: fn(f64) -> f64 = match (pair.upper, pair.lower) {
        (P6, S) => |x| 2.0 * (2.0 * q2(x).powi(3) - (x + 1.0).powi(3)) / ((x + 1.0).powi(3) * q2(x).powi(3)),
        (P6, N2) => |x| {
            ((x + 1.0).powi(3) * (x32(x) + 1.0) + 16.0 * x32(x) * s2(x).powi(3))
                / (4.0 * x32(x) * (x + 1.0).powi(3) * s2(x).powi(3))
        },
        (P6, N3) => |x| (48.0 * x32(x) + (x + 1.0).powi(3)) / (12.0 * x32(x) * (x + 1.0).powi(3)),
        (P6, N1) => |x| (32.0 * x32(x) + (x + 1.0).powi(3)) / (8.0 * x32(x) * (x + 1.0).powi(3)),
        (P6, G) => |x| (16.0 * x32(x) + (x + 1.0).powi(3)) / (4.0 * x32(x) * (x + 1.0).powi(3)),
        (P6, P4) => |x| {
            2.0 * (3.0 * (x.powi(3) + 1.0) + 17.0 * x * (x + 1.0) + 2.0 * r(x) * (x * x + 6.0 * x + 1.0))
                / (r(x) * (r(x) + 1.0).powi(4) * (x + 1.0).powi(3))
        },
        (P6, P2) => |x| {
            2.0 * (x.powi(6) + 15.0 * x.powi(4) + 16.0 * x.powi(3) + 15.0 * x * x + 1.0)
                / ((x + 1.0).powi(3) * (x * x + 1.0).powi(3))
        },
        (P6, P1) => |x| {
            let u = (x - 1.0).powi(2);
            (2.0 * (x * x + 1.0) * ((u - x).powi(2) + x * x + u * u + x * u) + 8.0 * x.powi(3))
                / (x.powi(3) + 1.0).powi(3)
        },
        (P5, A) => |x| p5a_num(x) / (2.0 * x32(x) * (r(x) + 1.0).powi(4)),
        (P5, N2) => |x| {
            ((r(x) + 1.0).powi(4) * (x32(x) + 1.0) + 4.0 * s2(x) * (x + 1.0) * p5a_num(x))
                / (8.0 * (r(x) + 1.0).powi(4) * x32(x) * (x + 1.0) * s2(x))
        },
        (P5, N3) => |x| {
            (7.0 * (r(x) - 1.0).powi(2) * (x + 6.0 * r(x) + 1.0) + 40.0 * x)
                / (12.0 * x32(x) * (r(x) + 1.0).powi(4))
        },
        (P5, N1) => |x| {
            (5.0 * (r(x) - 1.0).powi(2) * (x + 6.0 * r(x) + 1.0) + 32.0 * x)
                / (8.0 * x32(x) * (r(x) + 1.0).powi(4))
        },
        (P5, G) => |x| {
            3.0 * (4.0 * r(x) * (x + 1.0) + (x - 1.0).powi(2)) / (4.0 * x32(x) * (r(x) + 1.0).powi(4))
        },
        (P5, H) => |x| {
            ((x + 1.0) * ((x - 1.0).powi(4) + 16.0 * x * x)
                + 4.0 * r(x) * ((x + 1.0).powi(4) + 2.0 * x * (x * x + 6.0 * x + 1.0)))
                / (2.0 * x32(x) * (x + 1.0).powi(3) * (r(x) + 1.0).powi(4))
        },
        (P5, P3) => |x| horner(&H1, r(x)) / (4.0 * x32(x) * (x32(x) + 1.0).powi(3) * (r(x) + 1.0)),
        (P5, P2) => |x| horner(&H2, r(x)) / (2.0 * x32(x) * (x * x + 1.0).powi(3) * (r(x) + 1.0).powi(4)),
        (P5, P1) => |x| horner(&H3, r(x)) / (2.0 * x32(x) * (x.powi(3) + 1.0).powi(3) * (r(x) + 1.0).powi(4)),
        (S, P4) => |x| {
            2.0 * (r(x) * (r(x) + 1.0).powi(4) + 3.0 * q2(x).powi(3)) / (r(x) * (r(x) + 1.0).powi(4) * q2(x).powi(3))
        },
        (A, P4) => |x| 6.0 / (r(x) * (r(x) + 1.0).powi(4)),
        (S, A) => |x| 1.0 / ((x * x + 1.0) * q2(x)),
        (S, N2) => |x| {
            (q2(x) * (x32(x) + 1.0) * (x * x + 1.0) + 8.0 * x32(x) * (x + 1.0) * s2(x))
                / (8.0 * x32(x) * (x * x + 1.0) * (x + 1.0) * q2(x) * s2(x))
        },
        (S, N1) => |x| (8.0 * x32(x) + (x * x + 1.0) * q2(x)) / (8.0 * x32(x) * (x * x + 1.0) * q2(x)),
        (A, N2) => |x| (x32(x) + 1.0) / (8.0 * x32(x) * (x + 1.0) * s2(x)),
        (A, G) => |x| 1.0 / (4.0 * x32(x)),
        (A, H) => |x| 4.0 / (x + 1.0).powi(3),
        (N2, N1) => |x| ((x + 1.0) * s2(x) - (x32(x) + 1.0)) / (8.0 * x32(x) * (x + 1.0) * s2(x)),
        (S, G) => |x| (4.0 * x32(x) + q2(x) * (x * x + 1.0)) / (4.0 * x32(x) * q2(x) * (x * x + 1.0)),
        _ => return None,
    };
    Some(f)
}

/// Lifts `f` with `f(1) = 0` to `φ(a,b) = a·f(b/a)`; convex and
/// 1-homogeneous whenever `f` is convex.
pub fn phi_transform(f: impl Fn(f64) -> f64, p: PositivePair) -> Result<f64> {
    Ok(p.a() * f(p.b() / p.a()))
}

/// Index of a V-measure, `1..=4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VkKind(u8);

impl VkKind {
    pub fn new(k: u8) -> Result<Self> {
        if (1..=4).contains(&k) {
            Ok(VkKind(k))
        } else {
            input_err(format!("V-measure index must be 1..=4, got {k}"))
        }
    }

    pub fn index(&self) -> u8 {
        self.0
    }
}

fn vk_generator(k: VkKind, x: f64) -> f64 {
    let r = x.sqrt();
    match k.0 {
        1 => (x + 1.0).powi(2) * (x - 1.0).powi(4) / ((x.powi(3) + 1.0) * (x * x + 1.0)),
        2 => (r - 1.0).powi(2) / (x + 1.0),
        3 => r * (r - 1.0).powi(4) / ((x + 1.0) * (r + 1.0).powi(2)),
        _ => (r - 1.0).powi(4) * ((r - 1.0).powi(2) + r) / (12.0 * (x + 1.0)),
    }
}

/// `V_k(a,b) = b·f_k(a/b)`.
pub fn vk_measure(k: VkKind, p: PositivePair) -> Result<f64> {
    Ok(p.b() * vk_generator(k, p.a() / p.b()))
}

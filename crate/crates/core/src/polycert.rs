//! Exact polynomial positivity certificates.
//!
//! A half-power polynomial `s(x)` (exponents in ½ℕ) is turned into an
//! ordinary polynomial `h(t) = s(t²)`, whose real roots are isolated exactly
//! with Sturm sequences on each square-free factor. Positivity on `t > 0`
//! then follows from the root count and one sample sign.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::rational::parse_rational;
use crate::{input_err, Error, Result};

/// `h1(t) = s1(t²)`, coefficients from the constant term up.
pub const H1: [i64; 11] = [2, 2, -27, 75, -123, 198, -123, 75, -27, 2, 2];
/// `h2(t) = s2(t²)`, coefficients from the constant term up.
pub const H2: [i64; 17] = [1, 4, -6, 0, -12, 0, 14, 92, 102, 92, 14, 0, -12, 0, -6, 4, 1];
/// `h3(t) = s3(t²)`, coefficients from the constant term up.
pub const H3: [i64; 23] = [
    1, 4, -6, 4, 1, -12, -45, -36, 30, 144, 99, 48, 99, 144, 30, -36, -45, -12, 1, 4, -6, 4, 1,
];

/// Isolating intervals are refined to at most this width.
pub const ROOT_WIDTH: f64 = 1e-9;

fn big(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn from_small(r: num_rational::Rational64) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

fn approx(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Polynomial in one variable with exact rational coefficients, constant
/// term first and no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    coeffs: Vec<BigRational>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    /// From integer coefficients, constant term first.
    pub fn from_i64(coeffs: &[i64]) -> Self {
        Polynomial::new(coeffs.iter().map(|&c| big(c)).collect())
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coefficients(&self) -> &[BigRational] {
        &self.coeffs
    }

    fn lead(&self) -> BigRational {
        self.coeffs.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn eval(&self, t: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * t + c)
    }

    pub fn eval_f64(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * t + approx(c))
    }

    pub fn derivative(&self) -> Self {
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * big(i as i64))
                .collect(),
        )
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Polynomial::from_i64(&[1]), |acc, _| acc.mul(self))
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Polynomial::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let get = |v: &[BigRational], i: usize| v.get(i).cloned().unwrap_or_else(BigRational::zero);
        Polynomial::new((0..n).map(|i| get(&self.coeffs, i) + get(&o.coeffs, i)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&big(-1)))
    }

    /// Euclidean division; `d` must be nonzero.
    fn div_rem(&self, d: &Self) -> (Self, Self) {
        let mut rem = self.coeffs.clone();
        if self.coeffs.len() < d.coeffs.len() {
            return (Polynomial::zero(), self.clone());
        }
        let dl = d.lead();
        let mut quot = vec![BigRational::zero(); self.coeffs.len() - d.coeffs.len() + 1];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + d.coeffs.len() - 1] / &dl;
            for (j, dc) in d.coeffs.iter().enumerate() {
                rem[k + j] -= &c * dc;
            }
            quot[k] = c;
        }
        rem.truncate(d.coeffs.len() - 1);
        (Polynomial::new(quot), Polynomial::new(rem))
    }

    fn monic(&self) -> Self {
        let l = self.lead();
        if l.is_zero() {
            self.clone()
        } else {
            self.scale(&(BigRational::one() / l))
        }
    }

    fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Yun's square-free decomposition: `(factor, multiplicity)` with
    /// pairwise coprime, square-free, monic factors.
    pub fn square_free_decomposition(&self) -> Vec<(Polynomial, u32)> {
        let mut out = Vec::new();
        if self.degree() == 0 {
            return out;
        }
        let d = self.derivative();
        let a0 = self.gcd(&d);
        let mut b = self.div_rem(&a0).0;
        let c = d.div_rem(&a0).0;
        let mut dd = c.sub(&b.derivative());
        let mut i = 1;
        while b.degree() > 0 {
            let a = b.gcd(&dd);
            let nb = b.div_rem(&a).0;
            let nc = dd.div_rem(&a).0;
            dd = nc.sub(&nb.derivative());
            if a.degree() > 0 {
                out.push((a, i));
            }
            b = nb;
            i += 1;
        }
        out
    }

    /// Parses `c0 + c1*t + c2*t^2 …` (variable `t` or `x`, integer
    /// exponents, coefficients as integers, decimals or `p/q`).
    pub fn parse(s: &str) -> Result<Self> {
        let terms = parse_terms(s)?;
        let mut coeffs: BTreeMap<usize, BigRational> = BTreeMap::new();
        for (c, twice) in terms {
            if twice % 2 != 0 {
                return Err(Error::Parse(format!("half-integer exponent in '{s}'; use a half-power polynomial")));
            }
            *coeffs.entry((twice / 2) as usize).or_insert_with(BigRational::zero) += c;
        }
        let n = coeffs.keys().next_back().map_or(0, |k| k + 1);
        Ok(Polynomial::new(
            (0..n).map(|i| coeffs.remove(&i).unwrap_or_else(BigRational::zero)).collect(),
        ))
    }
}

fn fmt_terms(f: &mut fmt::Formatter<'_>, terms: &[(BigRational, String)]) -> fmt::Result {
    if terms.is_empty() {
        return f.write_str("0");
    }
    for (i, (c, mono)) in terms.iter().enumerate() {
        let mag = c.abs();
        if i == 0 {
            if c.is_negative() {
                f.write_str("-")?;
            }
        } else {
            f.write_str(if c.is_negative() { " - " } else { " + " })?;
        }
        match (mono.is_empty(), mag.is_one()) {
            (true, _) => write!(f, "{mag}")?,
            (false, true) => f.write_str(mono)?,
            (false, false) => write!(f, "{mag}*{mono}")?,
        }
    }
    Ok(())
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<_> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| {
                let mono = match i {
                    0 => String::new(),
                    1 => "t".to_string(),
                    _ => format!("t^{i}"),
                };
                (c.clone(), mono)
            })
            .collect();
        fmt_terms(f, &terms)
    }
}

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Polynomial", 3)?;
        st.serialize_field("text", &self.to_string())?;
        st.serialize_field("degree", &self.degree())?;
        let cs: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        st.serialize_field("coefficients", &cs)?;
        st.end()
    }
}

/// Polynomial in `x` whose exponents are nonnegative multiples of ½.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfPowerPoly {
    /// Keyed by twice the exponent.
    terms: BTreeMap<u32, BigRational>,
}

impl HalfPowerPoly {
    /// Builds from `(exponent, coefficient)` pairs; exponents must be
    /// nonnegative multiples of ½.
    pub fn new(terms: &[(f64, BigRational)]) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (e, c) in terms {
            let twice = 2.0 * e;
            if !(twice >= 0.0 && twice.fract() == 0.0 && twice <= u32::MAX as f64) {
                return input_err(format!("exponent {e} is not a nonnegative multiple of 1/2"));
            }
            *map.entry(twice as u32).or_insert_with(BigRational::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        Ok(HalfPowerPoly { terms: map })
    }

    /// Highest exponent present (0 for the zero polynomial).
    pub fn max_exponent(&self) -> f64 {
        self.terms.keys().next_back().map_or(0.0, |&k| k as f64 / 2.0)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.terms.iter().map(|(&k, c)| approx(c) * x.powf(k as f64 / 2.0)).sum()
    }

    /// Parses `2*x^5 + 2*x^(9/2) - 27*x^4 …`.
    pub fn parse(s: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (c, twice) in parse_terms(s)? {
            *map.entry(twice).or_insert_with(BigRational::zero) += c;
        }
        map.retain(|_, c: &mut BigRational| !c.is_zero());
        Ok(HalfPowerPoly { terms: map })
    }
}

impl fmt::Display for HalfPowerPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<_> = self
            .terms
            .iter()
            .rev()
            .map(|(&k, c)| {
                let mono = match k {
                    0 => String::new(),
                    2 => "x".to_string(),
                    k if k % 2 == 0 => format!("x^{}", k / 2),
                    k => format!("x^({k}/2)"),
                };
                (c.clone(), mono)
            })
            .collect();
        fmt_terms(f, &terms)
    }
}

/// `h(t) = s(t²)`: exponent `e` becomes degree `2e`.
pub fn substitute_t_squared(p: &HalfPowerPoly) -> Polynomial {
    let n = p.terms.keys().next_back().map_or(0, |&k| k as usize + 1);
    let mut coeffs = vec![BigRational::zero(); n];
    for (&k, c) in &p.terms {
        coeffs[k as usize] = c.clone();
    }
    Polynomial::new(coeffs)
}

/// Splits a sum of monomials into `(coefficient, twice the exponent)`.
fn parse_terms(s: &str) -> Result<Vec<(BigRational, u32)>> {
    let bad = |why: &str| Error::Parse(format!("{why} in polynomial '{s}'"));
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(bad("empty input"));
    }
    // Split at + or - that are not inside parentheses or right after '^'.
    let mut pieces = Vec::new();
    let mut depth = 0;
    let mut start = 0;
    let bytes = compact.as_bytes();
    for (i, &ch) in bytes.iter().enumerate() {
        match ch {
            b'(' => depth += 1,
            b')' => depth -= 1,
            b'+' | b'-' if depth == 0 && i > 0 && bytes[i - 1] != b'^' && bytes[i - 1] != b'*' => {
                pieces.push(&compact[start..i]);
                start = i;
            }
            _ => {}
        }
    }
    pieces.push(&compact[start..]);
    let mut out = Vec::new();
    for piece in pieces {
        let (neg, body) = match piece.as_bytes().first() {
            Some(b'-') => (true, &piece[1..]),
            Some(b'+') => (false, &piece[1..]),
            _ => (false, piece),
        };
        if body.is_empty() {
            return Err(bad("dangling sign"));
        }
        let var_at = body.find(['t', 'x']);
        let (coef, twice) = match var_at {
            None => (from_small(parse_rational(body)?), 0),
            Some(at) => {
                let coef_txt = body[..at].strip_suffix('*').unwrap_or(&body[..at]);
                let coef = if coef_txt.is_empty() { big(1) } else { from_small(parse_rational(coef_txt)?) };
                let rest = &body[at + 1..];
                let twice = match rest.strip_prefix('^') {
                    None if rest.is_empty() => 2,
                    None => return Err(bad("unexpected text after variable")),
                    Some(e) => {
                        let e = e.strip_prefix('(').and_then(|e| e.strip_suffix(')')).unwrap_or(e);
                        let r = parse_rational(e)?;
                        let twice = r * 2;
                        if !twice.is_integer() || twice < num_rational::Rational64::zero() {
                            return Err(bad("exponent must be a nonnegative multiple of 1/2"));
                        }
                        u32::try_from(*twice.numer()).map_err(|_| bad("exponent too large"))?
                    }
                };
                (coef, twice)
            }
        };
        out.push((if neg { -coef } else { coef }, twice));
    }
    Ok(out)
}

/// An isolated real root: `lo ≤ root ≤ hi` (equal when found exactly).
#[derive(Debug, Clone, PartialEq)]
pub struct RootInterval {
    pub lo: BigRational,
    pub hi: BigRational,
    pub multiplicity: u32,
}

impl RootInterval {
    pub fn approx(&self) -> f64 {
        approx(&((&self.lo + &self.hi) / big(2)))
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }
}

impl Serialize for RootInterval {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("RootInterval", 4)?;
        st.serialize_field("approx", &self.approx())?;
        st.serialize_field("lo", &self.lo.to_string())?;
        st.serialize_field("hi", &self.hi.to_string())?;
        st.serialize_field("multiplicity", &self.multiplicity)?;
        st.end()
    }
}

fn sturm_sequence(p: &Polynomial) -> Vec<Polynomial> {
    let mut seq = vec![p.clone(), p.derivative()];
    loop {
        let n = seq.len();
        if seq[n - 1].is_zero() {
            seq.pop();
            break;
        }
        let r = seq[n - 2].div_rem(&seq[n - 1]).1;
        if r.is_zero() {
            break;
        }
        seq.push(r.scale(&big(-1)));
    }
    seq
}

fn sign_variations(seq: &[Polynomial], t: &BigRational) -> usize {
    let signs: Vec<bool> = seq
        .iter()
        .map(|q| q.eval(t))
        .filter(|v| !v.is_zero())
        .map(|v| v.is_positive())
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Isolates the roots of a square-free polynomial with no roots at the
/// endpoints of `spans`. Returns `Err(m)` if a bisection midpoint `m` turns
/// out to be an exact root.
fn isolate_square_free(
    p: &Polynomial,
    spans: &[(BigRational, BigRational)],
    width: &BigRational,
) -> std::result::Result<Vec<(BigRational, BigRational)>, BigRational> {
    let seq = sturm_sequence(p);
    let count = |a: &BigRational, b: &BigRational| sign_variations(&seq, a) - sign_variations(&seq, b);
    let two = big(2);
    let mut found = Vec::new();
    let mut stack: Vec<(BigRational, BigRational)> = spans.to_vec();
    while let Some((a, b)) = stack.pop() {
        let n = count(&a, &b);
        if n == 0 {
            continue;
        }
        if n == 1 {
            // Refine by sign bisection.
            let (mut a, mut b) = (a, b);
            let mut fa_pos = p.eval(&a).is_positive();
            while &b - &a > *width {
                let m = (&a + &b) / &two;
                let fm = p.eval(&m);
                if fm.is_zero() {
                    return Err(m);
                }
                if fm.is_positive() == fa_pos {
                    a = m;
                    fa_pos = fm.is_positive();
                } else {
                    b = m;
                }
            }
            found.push((a, b));
            continue;
        }
        let m = (&a + &b) / &two;
        if p.eval(&m).is_zero() {
            return Err(m);
        }
        stack.push((m.clone(), b));
        stack.push((a, m));
    }
    found.sort_by(|x, y| x.0.cmp(&y.0));
    Ok(found)
}

/// Every real root with multiplicity, isolated in intervals of width at
/// most [`ROOT_WIDTH`] (exact roots found along the way are reported as
/// degenerate intervals). Sorted by position.
pub fn real_roots(p: &Polynomial) -> Result<Vec<RootInterval>> {
    if p.is_zero() {
        return input_err("the zero polynomial has no isolated roots");
    }
    let width = BigRational::from_float(ROOT_WIDTH).expect("finite");
    let mut roots = Vec::new();
    for (factor, mult) in p.square_free_decomposition() {
        // Cauchy bound: every root satisfies |t| < 1 + max|a_i / a_n|.
        let lead = factor.lead();
        let bound = factor
            .coeffs
            .iter()
            .map(|c| (c / &lead).abs())
            .fold(BigRational::zero(), |m, v| if v > m { v } else { m })
            + big(2);
        let mut q = factor;
        // 0 and 1 are split points; take them out exactly if they are roots.
        for special in [big(0), big(1)] {
            if q.eval(&special).is_zero() {
                roots.push(RootInterval { lo: special.clone(), hi: special.clone(), multiplicity: mult });
                q = q.div_rem(&Polynomial::new(vec![-special.clone(), big(1)])).0;
            }
        }
        loop {
            if q.degree() == 0 {
                break;
            }
            let spans = [(-bound.clone(), big(0)), (big(0), big(1)), (big(1), bound.clone())];
            match isolate_square_free(&q, &spans, &width) {
                Ok(found) => {
                    roots.extend(found.into_iter().map(|(lo, hi)| RootInterval { lo, hi, multiplicity: mult }));
                    break;
                }
                Err(m) => {
                    roots.push(RootInterval { lo: m.clone(), hi: m.clone(), multiplicity: mult });
                    q = q.div_rem(&Polynomial::new(vec![-m, big(1)])).0;
                }
            }
        }
    }
    roots.sort_by(|x, y| x.lo.cmp(&y.lo));
    Ok(roots)
}

/// Outcome of a positivity check on `t > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// No roots on `t > 0` and positive at `t = 1`.
    StrictlyPositive,
    /// The only root on `t > 0` is `t = 1`, of even multiplicity, and the
    /// polynomial is positive on both sides.
    NonnegativeZerosOnlyAtOne,
    Indefinite,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositivityCertificate {
    pub polynomial: Polynomial,
    pub roots: Vec<RootInterval>,
    /// `p(1)`, exact.
    #[serde(serialize_with = "ser_display")]
    pub value_at_one: BigRational,
    pub verdict: Verdict,
}

fn ser_display<T: fmt::Display, S: Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

impl PositivityCertificate {
    pub fn positive_roots(&self) -> impl Iterator<Item = &RootInterval> {
        self.roots.iter().filter(|r| r.lo.is_positive())
    }
}

/// Certifies the sign of `p` on `t > 0` from its exact real roots.
pub fn certify_positive(p: &Polynomial) -> Result<PositivityCertificate> {
    let roots = real_roots(p)?;
    let value_at_one = p.eval(&big(1));
    let positive: Vec<&RootInterval> = roots.iter().filter(|r| r.lo.is_positive()).collect();
    let verdict = if positive.is_empty() {
        if value_at_one.is_positive() {
            Verdict::StrictlyPositive
        } else {
            Verdict::Indefinite
        }
    } else if positive.len() == 1
        && positive[0].is_exact()
        && positive[0].lo.is_one()
        && positive[0].multiplicity.is_multiple_of(2)
        && p.eval(&BigRational::new(BigInt::from(1), BigInt::from(2))).is_positive()
        && p.eval(&big(2)).is_positive()
    {
        Verdict::NonnegativeZerosOnlyAtOne
    } else {
        Verdict::Indefinite
    };
    Ok(PositivityCertificate { polynomial: p.clone(), roots, value_at_one, verdict })
}

/// For positive `a`, `b`: `a > b ⇔ a² − b² > 0`. Given the sign of
/// `a² − b²` established elsewhere (e.g. from a certified polynomial),
/// returns the ordering of `a` and `b`; rejects a sign that contradicts the
/// values themselves.
pub fn square_difference_gate(a: f64, b: f64, squared_difference_sign: Ordering) -> Result<Ordering> {
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return input_err(format!("square-difference argument needs positive values, got ({a}, {b})"));
    }
    let direct = a.partial_cmp(&b).expect("finite");
    if direct != squared_difference_sign {
        return input_err(format!(
            "claimed sign {squared_difference_sign:?} of a²−b² contradicts a = {a}, b = {b}"
        ));
    }
    Ok(squared_difference_sign)
}

/// `(t − 1)`
fn t_minus_1() -> Polynomial {
    Polynomial::from_i64(&[-1, 1])
}

/// Polynomial from coefficients written highest degree first.
fn desc(coeffs: &[i64]) -> Polynomial {
    let mut v = coeffs.to_vec();
    v.reverse();
    Polynomial::from_i64(&v)
}

/// Builtin half-power polynomials `s1`, `s2`, `s3` in `x`.
pub fn builtin_half_power(name: &str) -> Option<HalfPowerPoly> {
    let table: &[i64] = match name {
        "s1" => &H1,
        "s2" => &H2,
        "s3" => &H3,
        _ => return None,
    };
    let terms: Vec<(f64, BigRational)> =
        table.iter().enumerate().map(|(k, &c)| (k as f64 / 2.0, big(c))).collect();
    HalfPowerPoly::new(&terms).ok()
}

/// Builtin polynomials in `t` (with `x = t²`): `h1`, `h2`, `h3` and the
/// factored remainders `partN` used in the two-sided inequality proofs.
pub fn builtin_polynomial(name: &str) -> Option<Polynomial> {
    let t1 = t_minus_1();
    let x1 = Polynomial::from_i64(&[-1, 0, 1]); // x − 1 = t² − 1
    let p = match name {
        "h1" => Polynomial::from_i64(&H1),
        "h2" => Polynomial::from_i64(&H2),
        "h3" => Polynomial::from_i64(&H3),
        "part2" => desc(&[2, 0, 4, 0, 3, 0, 4, 0, 2]).mul(&x1.pow(4)),
        "part5" => desc(&[17, 4, 38, 4, 17]).mul(&t1.pow(4)),
        "part7" => desc(&[7, 70, 201, 340, 201, 70, 7]).mul(&t1.pow(6)),
        "part10" => {
            // t⁶(t−2)² + 4t⁶ + 20t⁵ + 78t⁴ + 20t³ + 4t² + (2t−1)²
            let inner = desc(&[1, 0, 0, 0, 0, 0, 0])
                .mul(&desc(&[1, -2]).pow(2))
                .add(&desc(&[4, 20, 78, 20, 4, 0, 0]))
                .add(&desc(&[2, -1]).pow(2));
            inner.mul(&t1.pow(4))
        }
        "part11" => desc(&[1, 8, 94, 264, 386, 264, 94, 8, 1]).mul(&t1.pow(4)).scale(&big(2)),
        "part12" => desc(&[1, 2, 1, 2, 1]).mul(&t1.pow(4)),
        "part17" => desc(&[1, 24, 72, 120, 126, 120, 72, 24, 1]).mul(&t1.pow(4)),
        "part18" => desc(&[1, 2, 0, 2, 1]).mul(&t1.pow(4)).scale(&big(2)),
        "part25" => desc(&[7, 22, 32, 22, 7]).mul(&t1.pow(4)).scale(&big(2)),
        "part26" => desc(&[1, 0, 1]).mul(&desc(&[1, 4, 1])).mul(&t1.pow(4)),
        "part29" => desc(&[721, 3116, 4806, 3116, 721]).mul(&t1.pow(4)),
        "part31" => x1.pow(4),
        "part33" => desc(&[7, 8, 64, 120, 242, 120, 64, 8, 7]).mul(&t1.pow(4)).scale(&big(2)),
        "part40" => desc(&[71, 2316, 4090, 11180, 12021, 11960, 6004, 11960, 12021, 11180, 4090, 2316, 71])
            .mul(&t1.pow(4))
            .scale(&big(4)),
        "part41" => desc(&[1, 1]).pow(2).mul(&t1.pow(6)),
        _ => return None,
    };
    Some(p)
}

/// Names accepted by [`builtin_polynomial`].
pub const BUILTIN_POLYNOMIALS: [&str; 18] = [
    "h1", "h2", "h3", "part2", "part5", "part7", "part10", "part11", "part12", "part17", "part18",
    "part25", "part26", "part29", "part31", "part33", "part40", "part41",
];

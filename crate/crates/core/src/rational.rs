//! Exact rational coefficients: parsing, formatting and recovery of small
//! rationals from floating-point values.

use num_rational::Rational64;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::{Error, Result};

pub use num_rational::Rational64 as Rational;

/// Largest denominator accepted by [`rationalize`] by default.
pub const MAX_DENOMINATOR: i64 = 1000;
/// Largest residual `|v − p/q|` accepted by [`rationalize`] by default.
pub const MAX_RESIDUAL: f64 = 1e-9;

/// Walks the continued-fraction convergents of `v` and returns the first
/// one within `tol` of `v` whose denominator does not exceed `max_den`.
pub fn rationalize_with(v: f64, max_den: i64, tol: f64) -> Option<Rational64> {
    if !v.is_finite() || v.abs() > 1e15 {
        return None;
    }
    let (mut h_prev, mut h) = (0i64, 1i64);
    let (mut k_prev, mut k) = (1i64, 0i64);
    let mut rest = v;
    for _ in 0..64 {
        let a = rest.floor();
        let ai = a as i64;
        let h_next = ai.checked_mul(h)?.checked_add(h_prev)?;
        let k_next = ai.checked_mul(k)?.checked_add(k_prev)?;
        if k_next > max_den {
            return None;
        }
        (h_prev, h, k_prev, k) = (h, h_next, k, k_next);
        if (v - h as f64 / k as f64).abs() < tol {
            return Some(Rational64::new(h, k));
        }
        let frac = rest - a;
        if frac <= 0.0 {
            return None;
        }
        rest = 1.0 / frac;
    }
    None
}

/// [`rationalize_with`] at the default cap (1000) and residual (1e−9).
pub fn rationalize(v: f64) -> Option<Rational64> {
    rationalize_with(v, MAX_DENOMINATOR, MAX_RESIDUAL)
}

/// Parses `p/q`, an integer or a finite decimal (`0.25` → 1/4) exactly.
pub fn parse_rational(s: &str) -> Result<Rational64> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational '{s}'"));
    if let Some((p, q)) = s.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| bad())?;
        let q: i64 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        return Ok(Rational64::new(p, q));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if (int.is_empty() && frac.is_empty())
        || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())
        || frac.len() > 15
    {
        return Err(bad());
    }
    let digits: i64 = format!("{int}{frac}").parse().map_err(|_| bad())?;
    let den = 10i64.pow(frac.len() as u32);
    let r = Rational64::new(digits, den);
    Ok(if neg { -r } else { r })
}

/// `p/q`, or just `p` for integers.
pub fn format_rational(r: &Rational64) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rational64) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// True for strictly positive rationals.
pub fn is_positive(r: &Rational64) -> bool {
    !r.is_zero() && r.is_positive()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> Rational64 {
        Rational64::new(p, d)
    }

    #[test]
    fn recovers_small_rationals() {
        for (p, d) in [(4, 3), (8, 9), (14, 15), (13, 12), (9, 4), (1, 1), (6, 1), (3, 16), (999, 1000)] {
            let v = p as f64 / d as f64;
            assert_eq!(rationalize(v), Some(q(p, d)));
            assert_eq!(rationalize(v + 1e-12), Some(q(p, d)));
        }
        assert_eq!(rationalize(-0.75), Some(q(-3, 4)));
        assert_eq!(rationalize(0.0), Some(q(0, 1)));
    }

    #[test]
    fn rejects_irrationals_and_large_denominators() {
        assert_eq!(rationalize(std::f64::consts::PI), None);
        assert_eq!(rationalize(2f64.sqrt()), None);
        assert_eq!(rationalize(1.0 / 1009.0), None);
        assert_eq!(rationalize(f64::NAN), None);
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("4/9").unwrap(), q(4, 9));
        assert_eq!(parse_rational(" -2/6 ").unwrap(), q(-1, 3));
        assert_eq!(parse_rational("0.25").unwrap(), q(1, 4));
        assert_eq!(parse_rational("3").unwrap(), q(3, 1));
        assert_eq!(parse_rational("-.5").unwrap(), q(-1, 2));
        for bad in ["", "1/0", "a/b", "1.2.3", "1e5", "."] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
        assert_eq!(format_rational(&q(8, 9)), "8/9");
        assert_eq!(format_rational(&q(6, 1)), "6");
        assert!(is_positive(&q(1, 3)) && !is_positive(&q(0, 1)) && !is_positive(&q(-1, 3)));
    }
}

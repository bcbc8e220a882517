//! Number types the generators are evaluated in.
//!
//! Generators are written once against [`Scalar`] and instantiated for
//! `f64`, for [`DoubleDouble`] (used by audits, where sharp edges
//! leave a relative slack of order `(x−1)²`), and for [`Jet`], a
//! second-order forward-mode dual number that yields exact first and second
//! derivatives.

use std::ops::{Add, Div, Mul, Neg, Sub};


pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(v: f64) -> Self;
    /// Nearest binary64 value.
    fn value(self) -> f64;
    fn sqrt(self) -> Self;
    fn ln(self) -> Self;
    fn exp(self) -> Self;
    fn powf(self, e: f64) -> Self;

    fn square(self) -> Self {
        self * self
    }
}

impl Scalar for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn value(self) -> f64 {
        self
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn powf(self, e: f64) -> Self {
        f64::powf(self, e)
    }
}

/// Unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi)/2`, giving about 106 bits
/// of precision for `+ − × ÷ √ exp ln`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub const fn new(v: f64) -> Self {
        DoubleDouble { hi: v, lo: 0.0 }
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    fn norm(hi: f64, lo: f64) -> Self {
        let (hi, lo) = quick_two_sum(hi, lo);
        DoubleDouble { hi, lo }
    }

    fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        DoubleDouble::norm(p, e + self.lo * b)
    }

    /// Multiplication by a power of two (exact barring under/overflow).
    fn ldexp(self, k: i32) -> Self {
        let s = 2f64.powi(k);
        DoubleDouble { hi: self.hi * s, lo: self.lo * s }
    }

    const LN2: DoubleDouble = DoubleDouble { hi: std::f64::consts::LN_2, lo: 2.319_046_813_846_299_6e-17 };

    /// `exp(a)`: reduce `a = k·ln2 + r`, take `expm1(r/1024)` by Taylor
    /// series and undo the scaling by ten doublings `e ↦ 2e + e²`.
    fn exp_dd(self) -> Self {
        if self.hi > 709.8 {
            return DoubleDouble::new(f64::INFINITY);
        }
        if self.hi < -745.2 {
            return DoubleDouble::new(0.0);
        }
        let k = (self.hi / std::f64::consts::LN_2).round();
        let r = (self - DoubleDouble::LN2.mul_f64(k)).ldexp(-10);
        let mut term = r;
        let mut sum = r;
        for n in 2..=14 {
            term = term * r / DoubleDouble::new(n as f64);
            sum = sum + term;
            if term.hi.abs() < 1e-36 {
                break;
            }
        }
        for _ in 0..10 {
            sum = sum.mul_f64(2.0) + sum * sum;
        }
        (sum + DoubleDouble::new(1.0)).ldexp(k as i32)
    }

    /// `ln(a)` by one Newton step `y ← y + a·e^{−y} − 1` from binary64.
    fn ln_dd(self) -> Self {
        if self.hi.is_nan() || self.hi <= 0.0 || self.hi.is_infinite() {
            return DoubleDouble::new(self.hi.ln());
        }
        let y = DoubleDouble::new(self.hi.ln() + self.lo / self.hi);
        y + self * (-y).exp_dd() - DoubleDouble::new(1.0)
    }
}

impl From<f64> for DoubleDouble {
    fn from(v: f64) -> Self {
        DoubleDouble::new(v)
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        DoubleDouble::norm(s, e + f)
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        DoubleDouble { hi: -self.hi, lo: -self.lo }
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let (p, e) = two_prod(self.hi, o.hi);
        DoubleDouble::norm(p, e + (self.hi * o.lo + self.lo * o.hi))
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    // Long division with two correction steps.
    fn div(self, o: Self) -> Self {
        let q1 = self.hi / o.hi;
        let r = self - o.mul_f64(q1);
        let q2 = r.hi / o.hi;
        let r = r - o.mul_f64(q2);
        let q3 = r.hi / o.hi;
        DoubleDouble::norm(q1, q2) + DoubleDouble::new(q3)
    }
}

impl Scalar for DoubleDouble {
    fn from_f64(v: f64) -> Self {
        DoubleDouble::new(v)
    }
    fn value(self) -> f64 {
        self.hi + self.lo
    }
    // One Newton step from the binary64 root.
    fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return DoubleDouble::new(self.hi.sqrt());
        }
        let q = self.hi.sqrt();
        let qq = DoubleDouble::new(q);
        let r = self - qq * qq;
        qq + DoubleDouble::new(r.hi / (2.0 * q))
    }
    fn ln(self) -> Self {
        self.ln_dd()
    }
    fn exp(self) -> Self {
        self.exp_dd()
    }
    fn powf(self, e: f64) -> Self {
        if e == 0.0 {
            return DoubleDouble::new(1.0);
        }
        (self.ln_dd().mul_f64(e)).exp_dd()
    }
}

/// Truncated Taylor expansion `v + d1·ε + ½·d2·ε²` carried through
/// arithmetic; seeding with [`Jet::variable`] gives `(f, f′, f″)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    pub fn variable(x: f64) -> Self {
        Jet { v: x, d1: 1.0, d2: 0.0 }
    }

    pub fn constant(c: f64) -> Self {
        Jet { v: c, d1: 0.0, d2: 0.0 }
    }

    /// Applies a scalar function given its value and first two derivatives
    /// at `self.v`.
    fn chain(self, f: f64, df: f64, d2f: f64) -> Self {
        Jet {
            v: f,
            d1: df * self.d1,
            d2: d2f * self.d1 * self.d1 + df * self.d2,
        }
    }

    fn recip(self) -> Self {
        let inv = 1.0 / self.v;
        self.chain(inv, -inv * inv, 2.0 * inv * inv * inv)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet { v: self.v + o.v, d1: self.d1 + o.d1, d2: self.d2 + o.d2 }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        Jet { v: self.v - o.v, d1: self.d1 - o.d1, d2: self.d2 - o.d2 }
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        Jet {
            v: self.v * o.v,
            d1: self.d1 * o.v + self.v * o.d1,
            d2: self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2,
        }
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet) -> Jet {
        self * o.recip()
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet { v: -self.v, d1: -self.d1, d2: -self.d2 }
    }
}

impl Scalar for Jet {
    fn from_f64(v: f64) -> Self {
        Jet::constant(v)
    }
    fn value(self) -> f64 {
        self.v
    }
    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * self.v))
    }
    fn ln(self) -> Self {
        let inv = 1.0 / self.v;
        self.chain(self.v.ln(), inv, -inv * inv)
    }
    fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }
    fn powf(self, e: f64) -> Self {
        let p = self.v.powf(e);
        let p1 = e * self.v.powf(e - 1.0);
        let p2 = e * (e - 1.0) * self.v.powf(e - 2.0);
        self.chain(p, p1, p2)
    }
}

/// `ln(1 + exp(u))` without overflow.
pub(crate) fn softplus<T: Scalar>(u: T) -> T {
    if u.value() > 0.0 {
        u + (T::from_f64(1.0) + (-u).exp()).ln()
    } else {
        (T::from_f64(1.0) + u.exp()).ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jet_matches_hand_derivatives() {
        // f(x) = sqrt(x) / (x + 1) at x = 2
        let x = Jet::variable(2.0);
        let f = x.sqrt() / (x + Jet::constant(1.0));
        let h = |x: f64| x.sqrt() / (x + 1.0);
        let d = 1e-4;
        let fd1 = (h(2.0 + d) - h(2.0 - d)) / (2.0 * d);
        let fd2 = (h(2.0 + d) - 2.0 * h(2.0) + h(2.0 - d)) / (d * d);
        assert!((f.v - h(2.0)).abs() < 1e-15);
        assert!((f.d1 - fd1).abs() < 1e-8);
        assert!((f.d2 - fd2).abs() < 1e-6);
    }

    #[test]
    fn jet_transcendentals() {
        let x = Jet::variable(1.5);
        let f = x.ln() * x.exp() + x.powf(2.5);
        // f' = e^x/x + ln x e^x + 2.5 x^1.5
        let e = 1.5f64.exp();
        let d1 = e / 1.5 + 1.5f64.ln() * e + 2.5 * 1.5f64.powf(1.5);
        let d2 = -e / 2.25 + 2.0 * e / 1.5 + 1.5f64.ln() * e + 3.75 * 1.5f64.sqrt();
        assert!((f.d1 - d1).abs() < 1e-12);
        assert!((f.d2 - d2).abs() < 1e-12);
    }

    #[test]
    fn double_double_keeps_cancellation() {
        let x = DoubleDouble::from(1.0 + 3e-4);
        let one = DoubleDouble::from(1.0);
        // (sqrt x - 1)^2 / 2 computed two ways
        let direct = (x + one) / DoubleDouble::from(2.0) - x.sqrt();
        let factored = (x.sqrt() - one).square() / DoubleDouble::from(2.0);
        let rel = ((direct - factored) / factored).value().abs();
        assert!(rel < 1e-20, "rel = {rel}");
    }

    #[test]
    fn double_double_field_ops_are_exact_to_106_bits() {
        let three = DoubleDouble::from(3.0);
        let third = DoubleDouble::from(1.0) / three;
        // 1/3 is not a binary64 number: the low word must carry the rest.
        assert!(third.lo() != 0.0);
        let back = third * three - DoubleDouble::from(1.0);
        assert!(back.value().abs() < 1e-31);
        let r2 = DoubleDouble::from(2.0).sqrt();
        assert!((r2 * r2 - DoubleDouble::from(2.0)).value().abs() < 1e-31);
        let s = DoubleDouble::from(1.0) + DoubleDouble::from(1e-20);
        assert_eq!((s.hi(), s.lo()), (1.0, 1e-20));
    }

    #[test]
    fn double_double_transcendentals() {
        let one = DoubleDouble::from(1.0);
        // ln(e^y) = y to ~1e-30 over a wide range.
        for y in [-700.0, -20.0, -1.0, -1e-3, 1e-7, 0.5, 3.0, 50.0, 700.0] {
            let yd = DoubleDouble::from(y) / DoubleDouble::from(3.0);
            let back = yd.exp().ln() - yd;
            assert!(back.value().abs() <= 1e-29 * yd.value().abs().max(1.0), "y={y}: {:e}", back.value());
        }
        // ln(1 + u) for tiny u is accurate to the ~1e-32 absolute
        // resolution of 1 + u itself: compare with u − u²/2 + u³/3.
        let u = DoubleDouble::from(1e-9) / DoubleDouble::from(7.0);
        let series = u - u * u / DoubleDouble::from(2.0) + u * u * u / DoubleDouble::from(3.0);
        assert!(((one + u).ln() - series).value().abs() < 1e-31);
        let p = DoubleDouble::from(2.0).powf(0.5) - DoubleDouble::from(2.0).sqrt();
        assert!(p.value().abs() < 1e-30);
        assert!((DoubleDouble::from(10.0).powf(3.0) - DoubleDouble::from(1000.0)).value().abs() < 1e-26);
    }

    #[test]
    fn softplus_is_stable() {
        assert!((softplus(800.0f64) - 800.0).abs() < 1e-12);
        assert!(softplus(-800.0f64) >= 0.0);
        assert!((softplus(0.0f64) - 2f64.ln()).abs() < 1e-15);
    }
}

//! Scalars for exact and floating weight arithmetic.
//!
//! [`QuadExt`] is the field ℚ(√d) for a squarefree `d`, enough to hold
//! weights such as 1/√2 or sin(π/3) exactly.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    ToPrimitive::to_f64(r).unwrap_or_else(|| {
        // huge numerators and denominators: scale through the bit lengths
        let n = r.numer();
        let d = r.denom();
        let shift = n.bits().max(d.bits()) as i64 - 900;
        let s = shift.max(0) as u32;
        let nf = ToPrimitive::to_f64(&(n >> s)).unwrap_or(0.0);
        let df = ToPrimitive::to_f64(&(d >> s)).unwrap_or(1.0);
        nf / df
    })
}

/// Weight arithmetic shared by exact and floating scalars.
pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Zero
    + One
    + Send
    + Sync
{
    fn from_i64(n: i64) -> Self;
    fn to_f64(&self) -> f64;
    /// Exact equality for exact scalars, relative tolerance for floats.
    fn close_to(&self, other: &Self) -> bool;
    fn is_positive(&self) -> bool {
        self.to_f64() > 0.0
    }
}

impl Scalar for Rat {
    fn from_i64(n: i64) -> Self {
        Rat::from_integer(BigInt::from(n))
    }
    fn to_f64(&self) -> f64 {
        rat_to_f64(self)
    }
    fn close_to(&self, other: &Self) -> bool {
        self == other
    }
    fn is_positive(&self) -> bool {
        Signed::is_positive(self)
    }
}

impl Scalar for f64 {
    fn from_i64(n: i64) -> Self {
        n as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn close_to(&self, other: &Self) -> bool {
        (self - other).abs() <= 1e-12 * self.abs().max(other.abs()).max(1.0)
    }
}

/// An element `a + b√d` of ℚ(√d). `d` is ignored while `b = 0`.
#[derive(Clone, Debug, Eq)]
pub struct QuadExt {
    pub a: Rat,
    pub b: Rat,
    pub d: u64,
}

impl QuadExt {
    pub fn rational(a: Rat) -> Self {
        QuadExt { a, b: Rat::zero(), d: 0 }
    }

    pub fn new(a: Rat, b: Rat, d: u64) -> Self {
        let (k, d) = split_square(d);
        let b = b * Rat::from_integer(BigInt::from(k));
        if b.is_zero() || d == 1 {
            let a = if d == 1 { a + b } else { a };
            QuadExt::rational(a)
        } else {
            QuadExt { a, b, d }
        }
    }

    /// √r for a nonnegative rational r.
    pub fn sqrt_rat(r: &Rat) -> Self {
        assert!(!r.is_negative(), "square root of a negative rational");
        // √(p/q) = √(pq)/q
        let pq = r.numer() * r.denom();
        let pq = pq.to_u64().expect("radicand too large for ℚ(√d)");
        let (k, d) = split_square(pq);
        let coef = Rat::new(BigInt::from(k), r.denom().clone());
        if d == 1 {
            QuadExt::rational(coef)
        } else {
            QuadExt { a: Rat::zero(), b: coef, d }
        }
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn conj(&self) -> Self {
        QuadExt { a: self.a.clone(), b: -self.b.clone(), d: self.d }
    }

    /// a² − d b², which is rational.
    pub fn norm(&self) -> Rat {
        &self.a * &self.a - &self.b * &self.b * Rat::from_integer(BigInt::from(self.d))
    }

    fn common_d(&self, other: &Self) -> u64 {
        match (self.b.is_zero(), other.b.is_zero()) {
            (true, true) => 0,
            (false, true) => self.d,
            (true, false) => other.d,
            (false, false) => {
                assert_eq!(self.d, other.d, "mixing ℚ(√{}) with ℚ(√{})", self.d, other.d);
                self.d
            }
        }
    }

    fn normalized(self) -> Self {
        if self.b.is_zero() {
            QuadExt::rational(self.a)
        } else {
            self
        }
    }
}

/// Writes n = k²·d with d squarefree.
fn split_square(n: u64) -> (u64, u64) {
    if n == 0 {
        return (0, 1);
    }
    let mut k = 1u64;
    let mut d = 1u64;
    let mut m = n;
    let mut p = 2u64;
    while p * p <= m {
        let mut e = 0;
        while m.is_multiple_of(p) {
            m /= p;
            e += 1;
        }
        k *= p.pow(e / 2);
        if e % 2 == 1 {
            d *= p;
        }
        p += 1;
    }
    d *= m;
    (k, d)
}

impl PartialEq for QuadExt {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a && self.b == other.b && (self.b.is_zero() || self.d == other.d)
    }
}

impl std::hash::Hash for QuadExt {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.a.hash(state);
        self.b.hash(state);
        if !self.b.is_zero() {
            self.d.hash(state);
        }
    }
}

/// Reads `p`, `p/q`, `sqrt(p/q)` or `p/q*sqrt(r)`.
pub fn parse_quad(s: &str) -> Option<QuadExt> {
    let s = s.trim();
    let parse_rat = |t: &str| -> Option<Rat> {
        let t = t.trim();
        match t.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().ok()?;
                let d: BigInt = d.trim().parse().ok()?;
                (!d.is_zero()).then(|| Rat::new(n, d))
            }
            None => Some(Rat::from_integer(t.parse().ok()?)),
        }
    };
    let sqrt_part = |t: &str| -> Option<QuadExt> {
        let inner = t.trim().strip_prefix("sqrt(")?.strip_suffix(')')?;
        let r = parse_rat(inner)?;
        (!r.is_negative() && (r.numer() * r.denom()).to_u64().is_some()).then(|| QuadExt::sqrt_rat(&r))
    };
    if let Some((c, r)) = s.split_once('*') {
        return Some(QuadExt::rational(parse_rat(c)?) * sqrt_part(r)?);
    }
    sqrt_part(s).or_else(|| parse_rat(s).map(QuadExt::rational))
}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{} + {}·√{}", self.a, self.b, self.d)
        }
    }
}

impl Add for QuadExt {
    type Output = QuadExt;
    fn add(self, o: QuadExt) -> QuadExt {
        let d = self.common_d(&o);
        QuadExt { a: self.a + o.a, b: self.b + o.b, d }.normalized()
    }
}

impl Sub for QuadExt {
    type Output = QuadExt;
    fn sub(self, o: QuadExt) -> QuadExt {
        let d = self.common_d(&o);
        QuadExt { a: self.a - o.a, b: self.b - o.b, d }.normalized()
    }
}

impl Neg for QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        QuadExt { a: -self.a, b: -self.b, d: self.d }
    }
}

impl Mul for QuadExt {
    type Output = QuadExt;
    fn mul(self, o: QuadExt) -> QuadExt {
        let d = self.common_d(&o);
        let dr = Rat::from_integer(BigInt::from(d));
        let a = &self.a * &o.a + &self.b * &o.b * dr;
        let b = &self.a * &o.b + &self.b * &o.a;
        QuadExt { a, b, d }.normalized()
    }
}

impl Div for QuadExt {
    type Output = QuadExt;
    fn div(self, o: QuadExt) -> QuadExt {
        let n = o.norm();
        assert!(!n.is_zero(), "division by zero in ℚ(√d)");
        let num = self * o.conj();
        QuadExt { a: num.a / &n, b: num.b / &n, d: num.d }.normalized()
    }
}

impl Zero for QuadExt {
    fn zero() -> Self {
        QuadExt::rational(Rat::zero())
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl One for QuadExt {
    fn one() -> Self {
        QuadExt::rational(Rat::one())
    }
}

impl Scalar for QuadExt {
    fn from_i64(n: i64) -> Self {
        QuadExt::rational(Rat::from_integer(BigInt::from(n)))
    }
    fn to_f64(&self) -> f64 {
        rat_to_f64(&self.a) + rat_to_f64(&self.b) * (self.d as f64).sqrt()
    }
    fn close_to(&self, other: &Self) -> bool {
        self == other
    }
    fn is_positive(&self) -> bool {
        // sign of a + b√d without floating error
        let sa = self.a.signum();
        let sb = self.b.signum();
        if sb.is_zero() {
            return Signed::is_positive(&sa);
        }
        if sa.is_zero() || sa == sb {
            return Signed::is_positive(&sb);
        }
        // opposite signs: compare a² with d b²
        let lhs = &self.a * &self.a;
        let rhs = &self.b * &self.b * Rat::from_integer(BigInt::from(self.d));
        if Signed::is_positive(&sa) {
            lhs > rhs
        } else {
            rhs > lhs
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rat {
        rat(n, d)
    }

    #[test]
    fn parsing() {
        assert_eq!(parse_quad("3/4"), Some(QuadExt::rational(q(3, 4))));
        assert_eq!(parse_quad("sqrt(1/2)"), Some(QuadExt::sqrt_rat(&q(1, 2))));
        assert_eq!(parse_quad("2*sqrt(2)"), Some(QuadExt::new(q(0, 1), q(2, 1), 2)));
        assert_eq!(parse_quad("1/0"), None);
        assert_eq!(parse_quad("x"), None);
    }

    #[test]
    fn inverse_sqrt_two_squares_to_half() {
        let s = QuadExt::sqrt_rat(&q(1, 2));
        assert_eq!(s.clone() * s, QuadExt::rational(q(1, 2)));
    }

    #[test]
    fn sqrt_of_perfect_square_is_rational() {
        assert_eq!(QuadExt::sqrt_rat(&q(9, 4)), QuadExt::rational(q(3, 2)));
        assert_eq!(QuadExt::sqrt_rat(&q(8, 1)), QuadExt::new(q(0, 1), q(2, 1), 2));
    }

    #[test]
    fn division_round_trips() {
        let x = QuadExt::new(q(3, 1), q(2, 1), 2);
        let y = QuadExt::new(q(-1, 3), q(5, 7), 2);
        assert_eq!((x.clone() / y.clone()) * y, x);
    }

    #[test]
    fn sign_of_mixed_element() {
        // 1 − √2 < 0, 3 − 2√2 > 0
        assert!(!QuadExt::new(q(1, 1), q(-1, 1), 2).is_positive());
        assert!(QuadExt::new(q(3, 1), q(-2, 1), 2).is_positive());
    }

    #[test]
    fn float_value() {
        let x = QuadExt::new(q(5, 1), q(4, 1), 2);
        assert!((x.to_f64() - 10.656854249492381).abs() < 1e-12);
    }
}

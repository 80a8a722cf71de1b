//! Exact scalars: rationals, real quadratic surds a + b·sqrt(d), and
//! Gaussian numbers over either.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses "p", "p/q" or a finite decimal such as "-1.25".
pub fn parse_rational(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: '{s}'"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Q::new(n, d));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        if fp.is_empty() || !fp.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = ip.starts_with('-');
        let ip_abs = ip.trim_start_matches(['-', '+']);
        let digits = format!("{}{}", if ip_abs.is_empty() { "0" } else { ip_abs }, fp);
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let d = num_traits::pow(BigInt::from(10), fp.len());
        let v = Q::new(n, d);
        return Ok(if neg { -v } else { v });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Q::from_integer(n))
}

pub fn fmt_rational(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn q_to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Serde helpers for a rational stored as a "p/q" string.
pub mod q_string {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rational(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

pub mod q_vec_string {
    use super::*;

    pub fn serialize<S: Serializer>(x: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<String> = x.iter().map(fmt_rational).collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Q>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter().map(|s| parse_rational(s).map_err(serde::de::Error::custom)).collect()
    }
}

/// Coefficient ring for cohomology classes.
pub trait Coeff:
    Clone + fmt::Debug + PartialEq + Send + Sync + Zero + One + Sub<Output = Self> + Neg<Output = Self>
{
    fn from_q(x: &Q) -> Self;
}

impl Coeff for Q {
    fn from_q(x: &Q) -> Self {
        x.clone()
    }
}

impl Coeff for Complex64 {
    fn from_q(x: &Q) -> Self {
        Complex64::new(q_to_f64(x), 0.0)
    }
}

// Square factors are extracted by trial division up to this bound; larger
// square factors stay inside the radicand, which is still correct.
const TRIAL_BOUND: u64 = 100_000;

/// Splits a positive integer as f²·d with d square-free (up to TRIAL_BOUND).
fn square_split(n: &BigInt) -> (BigInt, BigInt) {
    let mut d = n.clone();
    let mut f = BigInt::one();
    let mut p: u64 = 2;
    while p <= TRIAL_BOUND {
        let pp = BigInt::from(p * p);
        if pp > d {
            break;
        }
        while (&d % &pp).is_zero() {
            d /= &pp;
            f *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let r = d.sqrt();
    if &r * &r == d {
        f *= r;
        d = BigInt::one();
    }
    (f, d)
}

/// a + b·sqrt(d) with rational a, b and square-free integer d ≥ 1.
/// When d = 1 the surd part is folded into a.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Surd {
    pub a: Q,
    pub b: Q,
    pub d: BigInt,
}

impl Surd {
    pub fn rational(a: Q) -> Self {
        Surd { a, b: Q::zero(), d: BigInt::one() }
    }

    pub fn new(a: Q, b: Q, d: BigInt) -> Self {
        assert!(d.is_positive(), "radicand must be positive");
        let (f, d) = square_split(&d);
        let b = b * Q::from_integer(f);
        if d.is_one() || b.is_zero() {
            Surd::rational(a + b)
        } else {
            Surd { a, b, d }
        }
    }

    /// sqrt(x) for a rational x ≥ 0.
    pub fn sqrt_of(x: &Q) -> Self {
        assert!(!x.is_negative(), "sqrt of negative rational");
        // sqrt(p/q) = sqrt(p·q)/q
        let n = x.numer() * x.denom();
        Surd::new(Q::zero(), Q::new(BigInt::one(), x.denom().clone()), n)
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Q> {
        self.is_rational().then_some(&self.a)
    }

    fn radicand_with(&self, o: &Surd) -> BigInt {
        match (self.b.is_zero(), o.b.is_zero()) {
            (true, _) => o.d.clone(),
            (_, true) => self.d.clone(),
            _ => {
                assert_eq!(self.d, o.d, "mixed radicands");
                self.d.clone()
            }
        }
    }

    pub fn signum(&self) -> i8 {
        let sa = sign_q(&self.a);
        let sb = sign_q(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        let a2 = &self.a * &self.a;
        let b2d = &self.b * &self.b * Q::from_integer(self.d.clone());
        match a2.cmp(&b2d) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn conj(&self) -> Surd {
        Surd { a: self.a.clone(), b: -self.b.clone(), d: self.d.clone() }
    }

    pub fn inv(&self) -> Surd {
        let norm = &self.a * &self.a - &self.b * &self.b * Q::from_integer(self.d.clone());
        assert!(!norm.is_zero(), "division by zero surd");
        let c = self.conj();
        Surd::new(c.a / &norm, c.b / &norm, self.d.clone())
    }

    pub fn div(&self, o: &Surd) -> Surd {
        self.clone() * o.inv()
    }

    pub fn scale(&self, x: &Q) -> Surd {
        Surd { a: &self.a * x, b: &self.b * x, d: self.d.clone() }.normalized()
    }

    fn normalized(self) -> Surd {
        if self.b.is_zero() {
            Surd::rational(self.a)
        } else {
            self
        }
    }

    pub fn to_f64(&self) -> f64 {
        q_to_f64(&self.a) + q_to_f64(&self.b) * self.d.to_f64().unwrap_or(f64::NAN).sqrt()
    }

    pub fn cmp_exact(&self, o: &Surd) -> Ordering {
        (self.clone() - o.clone()).signum().cmp(&0)
    }
}

fn sign_q(x: &Q) -> i8 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

impl Add for Surd {
    type Output = Surd;
    fn add(self, o: Surd) -> Surd {
        let d = self.radicand_with(&o);
        Surd { a: self.a + o.a, b: self.b + o.b, d }.normalized()
    }
}

impl Sub for Surd {
    type Output = Surd;
    fn sub(self, o: Surd) -> Surd {
        self + (-o)
    }
}

impl Neg for Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        Surd { a: -self.a, b: -self.b, d: self.d }
    }
}

impl Mul for Surd {
    type Output = Surd;
    fn mul(self, o: Surd) -> Surd {
        let d = self.radicand_with(&o);
        let dq = Q::from_integer(d.clone());
        let a = &self.a * &o.a + &self.b * &o.b * dq;
        let b = &self.a * &o.b + &self.b * &o.a;
        Surd { a, b, d }.normalized()
    }
}

impl Zero for Surd {
    fn zero() -> Self {
        Surd::rational(Q::zero())
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl One for Surd {
    fn one() -> Self {
        Surd::rational(Q::one())
    }
}

impl Coeff for Surd {
    fn from_q(x: &Q) -> Self {
        Surd::rational(x.clone())
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", fmt_rational(&self.a));
        }
        let babs = self.b.abs();
        let root = format!("sqrt({})", self.d);
        let bpart = if babs.is_one() { root } else { format!("{}*{}", fmt_rational(&babs), root) };
        if self.a.is_zero() {
            if self.b.is_negative() {
                write!(f, "-{bpart}")
            } else {
                write!(f, "{bpart}")
            }
        } else {
            let sign = if self.b.is_negative() { '-' } else { '+' };
            write!(f, "{} {} {}", fmt_rational(&self.a), sign, bpart)
        }
    }
}

impl FromStr for Surd {
    type Err = Error;

    /// Accepts the Display format: "a", "b*sqrt(d)", "a - sqrt(d)", ...;
    /// the radicand may be rational, e.g. "sqrt(1/3)".
    fn from_str(s: &str) -> Result<Surd> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let Some(idx) = t.find("sqrt(") else {
            return Ok(Surd::rational(parse_rational(&t)?));
        };
        let bad = || Error::Parse(format!("not a surd: '{s}'"));
        let close = t[idx..].find(')').ok_or_else(bad)? + idx;
        if close + 1 != t.len() {
            return Err(bad());
        }
        let rad = parse_rational(&t[idx + 5..close])?;
        if rad.is_negative() {
            return Err(bad());
        }
        let mut prefix = &t[..idx];
        let mut coef = Q::one();
        if let Some(p) = prefix.strip_suffix('*') {
            let start = p.rfind(|c: char| !(c.is_ascii_digit() || c == '/' || c == '.')).map(|i| i + 1).unwrap_or(0);
            coef = parse_rational(&p[start..])?;
            prefix = &p[..start];
        }
        let (a_str, neg) = match prefix.chars().last() {
            Some('-') => (&prefix[..prefix.len() - 1], true),
            Some('+') => (&prefix[..prefix.len() - 1], false),
            None => ("", false),
            _ => return Err(bad()),
        };
        let a = if a_str.is_empty() { Q::zero() } else { parse_rational(a_str)? };
        let b = if neg { -coef } else { coef };
        Ok(Surd::rational(a) + Surd::sqrt_of(&rad).scale(&b))
    }
}

impl Serialize for Surd {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Surd {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Surd, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// re + i·im over an exact coefficient ring.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gauss<T> {
    pub re: T,
    pub im: T,
}

impl<T: Coeff> Gauss<T> {
    pub fn new(re: T, im: T) -> Self {
        Gauss { re, im }
    }

    pub fn i() -> Self {
        Gauss { re: T::zero(), im: T::one() }
    }

    pub fn conj(&self) -> Self {
        Gauss { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn scale(&self, x: &T) -> Self {
        Gauss { re: self.re.clone() * x.clone(), im: self.im.clone() * x.clone() }
    }
}

impl<T: Coeff> Add for Gauss<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Gauss { re: self.re + o.re, im: self.im + o.im }
    }
}

impl<T: Coeff> Sub for Gauss<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Gauss { re: self.re - o.re, im: self.im - o.im }
    }
}

impl<T: Coeff> Neg for Gauss<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Gauss { re: -self.re, im: -self.im }
    }
}

impl<T: Coeff> Mul for Gauss<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let re = self.re.clone() * o.re.clone() - self.im.clone() * o.im.clone();
        let im = self.re * o.im + self.im * o.re;
        Gauss { re, im }
    }
}

impl<T: Coeff> Zero for Gauss<T> {
    fn zero() -> Self {
        Gauss { re: T::zero(), im: T::zero() }
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl<T: Coeff> One for Gauss<T> {
    fn one() -> Self {
        Gauss { re: T::one(), im: T::zero() }
    }
}

impl<T: Coeff> Coeff for Gauss<T> {
    fn from_q(x: &Q) -> Self {
        Gauss { re: T::from_q(x), im: T::zero() }
    }
}

/// Exact complex number with surd components.
pub type SurdComplex = Gauss<Surd>;

impl SurdComplex {
    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    /// Principal argument in (−π, π], computed in floating point.
    pub fn arg_f64(&self) -> f64 {
        principal_arg(self.to_c64())
    }
}

impl fmt::Display for SurdComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        if self.re.is_zero() {
            return write!(f, "({})i", self.im);
        }
        write!(f, "{} + ({})i", self.re, self.im)
    }
}

/// atan2 with the negative real axis mapped to +π.
pub fn principal_arg(z: Complex64) -> f64 {
    let a = z.im.atan2(z.re);
    if a <= -std::f64::consts::PI || (z.im == 0.0 && z.re < 0.0) {
        std::f64::consts::PI
    } else {
        a
    }
}

/// Exact comparison of principal arguments (−π, π] of two nonzero numbers.
pub fn cmp_arg(z: &SurdComplex, w: &SurdComplex) -> Ordering {
    assert!(!z.is_zero() && !w.is_zero(), "argument of zero");
    // Lower half-plane (arg < 0) sorts before the closed upper half-plane.
    let half = |u: &SurdComplex| -> u8 {
        if u.im.is_negative() {
            0
        } else {
            1
        }
    };
    let (hz, hw) = (half(z), half(w));
    if hz != hw {
        return hz.cmp(&hw);
    }
    // Same half-plane: positive and negative reals are the only collinear
    // opposite pair that the cross product cannot order.
    let real_pos = |u: &SurdComplex| u.im.is_zero() && u.re.is_positive();
    let real_neg = |u: &SurdComplex| u.im.is_zero() && u.re.is_negative();
    if hz == 1 {
        if real_pos(z) && real_neg(w) {
            return Ordering::Less;
        }
        if real_neg(z) && real_pos(w) {
            return Ordering::Greater;
        }
    }
    // arg z < arg w  ⇔  Im(conj(z)·w) > 0
    let cross = z.re.clone() * w.im.clone() - z.im.clone() * w.re.clone();
    0.cmp(&cross.signum())
}

/// Sign of Im(z·conj(w)), i.e. of sin(arg z − arg w).
pub fn sin_sign(z: &SurdComplex, w: &SurdComplex) -> i8 {
    (z.im.clone() * w.re.clone() - z.re.clone() * w.im.clone()).signum()
}

/// Sign of Re(z·conj(w)), i.e. of cos(arg z − arg w).
pub fn cos_sign(z: &SurdComplex, w: &SurdComplex) -> i8 {
    (z.re.clone() * w.re.clone() + z.im.clone() * w.im.clone()).signum()
}

/// Best rational approximation of x with denominator ≤ max_den.
pub fn best_rational(x: f64, max_den: u64) -> Q {
    let neg = x < 0.0;
    let mut y = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    for _ in 0..64 {
        let a = y.floor();
        let ai = a as i128;
        let p2 = ai * p1 + p0;
        let q2 = ai * q1 + q0;
        if q2 > max_den as i128 {
            // best semiconvergent with the remaining budget
            let k = (max_den as i128 - q0) / q1;
            let (ps, qs) = (p0 + k * p1, q0 + k * q1);
            let xs = ps as f64 / qs as f64;
            let x1 = p1 as f64 / q1 as f64;
            if (xs - x.abs()).abs() < (x1 - x.abs()).abs() {
                p1 = ps;
                q1 = qs;
            }
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let frac = y - a;
        if frac < 1e-15 {
            break;
        }
        y = 1.0 / frac;
    }
    let r = Q::new(BigInt::from(p1), BigInt::from(q1));
    if neg {
        -r
    } else {
        r
    }
}

pub fn gcd_i64(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

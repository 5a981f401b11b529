//! p-adic valuation, absolute value, and the concrete ultrametrics on
//! `Q_p` and `Q_p^*`.
//!
//! Elements of `Q_p` are modelled by exact rationals carrying their prime
//! context. Every quantity computed here is a function of the valuation,
//! which is exact on `Q`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{domain, Error, Result};
use crate::value::Value;

/// A validated prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prime(u64);

impl Prime {
    /// Candidates above this bound are rejected rather than trial-divided.
    pub const TRIAL_DIVISION_BOUND: u64 = 1_000_000;

    pub fn new(p: u64) -> Result<Self> {
        if p > Self::TRIAL_DIVISION_BOUND {
            return Err(Error::PrimeOutOfRange(p));
        }
        if p < 2 {
            return Err(Error::NotPrime(p));
        }
        let mut d = 2u64;
        while d * d <= p {
            if p.is_multiple_of(d) {
                return Err(Error::NotPrime(p));
            }
            d += 1;
        }
        Ok(Prime(p))
    }

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn big(self) -> BigInt {
        BigInt::from(self.0)
    }

    /// `p^e` as an exact rational, `e` of either sign.
    pub fn pow(self, e: i64) -> BigRational {
        let mag = num_traits::pow(self.big(), e.unsigned_abs() as usize);
        if e >= 0 {
            BigRational::from_integer(mag)
        } else {
            BigRational::new(BigInt::one(), mag)
        }
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for Prime {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u64(self.0)
    }
}

impl<'de> Deserialize<'de> for Prime {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let p = u64::deserialize(d)?;
        Prime::new(p).map_err(serde::de::Error::custom)
    }
}

/// A p-adic valuation: an integer or `+∞` (the valuation of zero).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinity,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinity => None,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinity => write!(f, "+inf"),
        }
    }
}

/// Number of times `p` divides the nonzero integer `n`.
pub(crate) fn int_valuation(n: &BigInt, p: &BigInt) -> i64 {
    debug_assert!(!n.is_zero());
    let mut v = 0;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(p);
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

pub(crate) fn rational_valuation(x: &BigRational, p: Prime) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinity;
    }
    let pb = p.big();
    Valuation::Finite(int_valuation(x.numer(), &pb) - int_valuation(x.denom(), &pb))
}

/// Parses the literal syntax `num/den` or `num` with an optional leading minus.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational literal {s:?}"));
    let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (n, d),
        None => (body, "1"),
    };
    if !digits(num) || !digits(den) {
        return Err(bad());
    }
    let mut n: BigInt = num.parse().map_err(|_| bad())?;
    let d: BigInt = den.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    if neg {
        n = -n;
    }
    Ok(BigRational::new(n, d))
}

/// An exact rational viewed as an element of `Q_p`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PRational {
    value: BigRational,
    p: Prime,
}

impl PRational {
    pub fn new(value: BigRational, p: Prime) -> Self {
        PRational { value, p }
    }

    pub fn from_frac(num: i64, den: i64, p: Prime) -> Self {
        assert!(den != 0, "zero denominator");
        PRational::new(BigRational::new(num.into(), den.into()), p)
    }

    pub fn from_int(n: i64, p: Prime) -> Self {
        PRational::new(BigRational::from_integer(n.into()), p)
    }

    pub fn zero(p: Prime) -> Self {
        PRational::new(BigRational::zero(), p)
    }

    pub fn one(p: Prime) -> Self {
        PRational::new(BigRational::one(), p)
    }

    /// `p^e`.
    pub fn prime_power(e: i64, p: Prime) -> Self {
        PRational::new(p.pow(e), p)
    }

    pub fn parse(s: &str, p: Prime) -> Result<Self> {
        Ok(PRational::new(parse_rational(s)?, p))
    }

    pub fn value(&self) -> &BigRational {
        &self.value
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.value.is_one()
    }

    pub fn vp(&self) -> Valuation {
        vp(self)
    }

    pub fn abs_p(&self) -> PNorm {
        pabs(self)
    }

    /// `|x|_p ≤ 1`.
    pub fn is_integral(&self) -> bool {
        self.vp() >= Valuation::Finite(0)
    }

    /// `|x|_p = 1`.
    pub fn is_unit(&self) -> bool {
        self.vp() == Valuation::Finite(0)
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return domain("zero has no inverse");
        }
        Ok(PRational::new(self.value.recip(), self.p))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        let v = num_traits::pow(self.value.clone(), e as usize);
        Ok(PRational::new(v, self.p))
    }

    pub fn check_same_prime(&self, other: &PRational) -> Result<()> {
        if self.p != other.p {
            return Err(Error::PrimeMismatch(self.p.get(), other.p.get()));
        }
        Ok(())
    }

    /// Writes `x = p^v · u` with `u` a unit; `None` for zero.
    pub fn split_unit(&self) -> Option<(i64, BigRational)> {
        let v = self.vp().finite()?;
        Some((v, &self.value / self.p.pow(v)))
    }

    /// Approximate decimal rendering; display only.
    pub fn to_f64(&self) -> f64 {
        self.value.to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for PRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl fmt::Debug for PRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Serialize for PRational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.value.to_string())
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident) => {
        impl<'a> $trait<&'a PRational> for &'a PRational {
            type Output = PRational;
            fn $method(self, rhs: &'a PRational) -> PRational {
                assert_eq!(self.p, rhs.p, "prime context mismatch");
                PRational::new((&self.value).$method(&rhs.value), self.p)
            }
        }
        impl $trait for PRational {
            type Output = PRational;
            fn $method(self, rhs: PRational) -> PRational {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);

impl<'a> Div<&'a PRational> for &'a PRational {
    type Output = PRational;
    fn div(self, rhs: &'a PRational) -> PRational {
        assert_eq!(self.p, rhs.p, "prime context mismatch");
        assert!(!rhs.is_zero(), "division by zero");
        PRational::new(&self.value / &rhs.value, self.p)
    }
}

impl Neg for &PRational {
    type Output = PRational;
    fn neg(self) -> PRational {
        PRational::new(-&self.value, self.p)
    }
}

impl Neg for PRational {
    type Output = PRational;
    fn neg(self) -> PRational {
        -&self
    }
}

/// The exact value of a p-adic norm: `0` or `p^(-q)` for a rational `q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PNorm {
    Zero,
    Finite(BigRational),
}

impl PNorm {
    pub fn one() -> Self {
        PNorm::Finite(BigRational::zero())
    }

    /// `p^(-q)`.
    pub fn from_exponent(q: BigRational) -> Self {
        PNorm::Finite(q)
    }

    /// `p^(-v)` for an integer `v`.
    pub fn from_int_exponent(v: i64) -> Self {
        PNorm::Finite(BigRational::from_integer(v.into()))
    }

    pub fn from_valuation(v: Valuation) -> Self {
        match v {
            Valuation::Infinity => PNorm::Zero,
            Valuation::Finite(v) => PNorm::from_int_exponent(v),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, PNorm::Zero)
    }

    pub fn exponent(&self) -> Option<&BigRational> {
        match self {
            PNorm::Zero => None,
            PNorm::Finite(q) => Some(q),
        }
    }

    /// The `alpha`-th power; `alpha` must be positive.
    pub fn pow(&self, alpha: &BigRational) -> Self {
        assert!(alpha.is_positive(), "norm powers need a positive exponent");
        match self {
            PNorm::Zero => PNorm::Zero,
            PNorm::Finite(q) => PNorm::Finite(q * alpha),
        }
    }

    /// Quotient `self / other`; `other` must be nonzero.
    pub fn div(&self, other: &PNorm) -> Self {
        match (self, other) {
            (_, PNorm::Zero) => panic!("division by the zero norm"),
            (PNorm::Zero, _) => PNorm::Zero,
            (PNorm::Finite(a), PNorm::Finite(b)) => PNorm::Finite(a - b),
        }
    }

    /// `log_p` of a nonzero norm with integer exponent.
    pub fn log_p(&self) -> Option<i64> {
        let q = self.exponent()?;
        if !q.is_integer() {
            return None;
        }
        (-q.to_integer()).to_i64()
    }

    pub fn to_value(&self, p: Prime) -> Value {
        match self {
            PNorm::Zero => Value::Zero,
            PNorm::Finite(q) => Value::power(BigRational::from_integer(p.big()), -q),
        }
    }

    /// Renders the norm as `p^e` with the concrete prime, `0`, or `1`.
    pub fn display(&self, p: Prime) -> String {
        match self {
            PNorm::Zero => "0".to_string(),
            PNorm::Finite(q) if q.is_zero() => "1".to_string(),
            PNorm::Finite(q) => format!("{}^{}", p, -q),
        }
    }

    pub fn to_f64(&self, p: Prime) -> f64 {
        match self {
            PNorm::Zero => 0.0,
            PNorm::Finite(q) => (p.get() as f64).powf(-q.to_f64().unwrap_or(f64::NAN)),
        }
    }
}

impl Ord for PNorm {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (PNorm::Zero, PNorm::Zero) => Ordering::Equal,
            (PNorm::Zero, _) => Ordering::Less,
            (_, PNorm::Zero) => Ordering::Greater,
            // p^(-a) ≤ p^(-b) iff a ≥ b
            (PNorm::Finite(a), PNorm::Finite(b)) => b.cmp(a),
        }
    }
}

impl PartialOrd for PNorm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Mul for &PNorm {
    type Output = PNorm;
    fn mul(self, rhs: &PNorm) -> PNorm {
        match (self, rhs) {
            (PNorm::Finite(a), PNorm::Finite(b)) => PNorm::Finite(a + b),
            _ => PNorm::Zero,
        }
    }
}

impl Mul for PNorm {
    type Output = PNorm;
    fn mul(self, rhs: PNorm) -> PNorm {
        &self * &rhs
    }
}

impl Serialize for PNorm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            PNorm::Zero => {
                let mut m = s.serialize_map(Some(1))?;
                m.serialize_entry("kind", "zero")?;
                m.end()
            }
            PNorm::Finite(q) => {
                let mut m = s.serialize_map(Some(2))?;
                m.serialize_entry("kind", "finite")?;
                m.serialize_entry("exponent", &q.to_string())?;
                m.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for PNorm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            kind: String,
            exponent: Option<String>,
        }
        let raw = Raw::deserialize(d)?;
        match (raw.kind.as_str(), raw.exponent) {
            ("zero", None) => Ok(PNorm::Zero),
            ("finite", Some(e)) => parse_rational(&e).map(PNorm::Finite).map_err(serde::de::Error::custom),
            _ => Err(serde::de::Error::custom("malformed norm")),
        }
    }
}

impl FromStr for PNorm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Either a norm value or the cap `t` of a truncated gauge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Capped {
    Norm(PNorm),
    Cap(BigRational),
}

impl Capped {
    pub fn to_value(&self, p: Prime) -> Value {
        match self {
            Capped::Norm(n) => n.to_value(p),
            Capped::Cap(t) => Value::rational(t.clone()),
        }
    }

    pub fn display(&self, p: Prime) -> String {
        match self {
            Capped::Norm(n) => n.display(p),
            Capped::Cap(t) => t.to_string(),
        }
    }
}

/// Validates a cap `t` with `1 ≤ t ≤ p`.
pub(crate) fn check_cap(t: &BigRational, p: Prime) -> Result<()> {
    let one = BigRational::one();
    let pr = BigRational::from_integer(p.big());
    if *t < one || *t > pr {
        return Err(Error::InvalidArgument(format!("cap t = {t} must satisfy 1 <= t <= {p}")));
    }
    Ok(())
}

pub fn vp(x: &PRational) -> Valuation {
    rational_valuation(&x.value, x.p)
}

pub fn pabs(x: &PRational) -> PNorm {
    PNorm::from_valuation(vp(x))
}

pub fn dp(x: &PRational, y: &PRational) -> Result<PNorm> {
    x.check_same_prime(y)?;
    Ok(pabs(&(x - y)))
}

/// The gauge `max(|x − 1|_p, |1/x − 1|_p)` on `Q_p^*`.
pub fn rp(x: &PRational) -> Result<PNorm> {
    if x.is_zero() {
        return domain("rp is undefined at 0");
    }
    let one = PRational::one(x.p);
    let a = pabs(&(x - &one));
    let b = pabs(&(&x.inv()? - &one));
    Ok(a.max(b))
}

/// The capped multiplicative gauge `min(rp(x), t)`.
pub fn rp_capped(x: &PRational, t: &BigRational) -> Result<Capped> {
    check_cap(t, x.p)?;
    let r = rp(x)?;
    if r.to_value(x.p) < Value::rational(t.clone()) {
        Ok(Capped::Norm(r))
    } else {
        Ok(Capped::Cap(t.clone()))
    }
}

/// The left-invariant ultrametric `rp'(x / y)` on `Q_p^*` with cap `t ∈ [1, p]`.
pub fn dp_prime(x: &PRational, y: &PRational, t: &BigRational) -> Result<Capped> {
    x.check_same_prime(y)?;
    if x.is_zero() || y.is_zero() {
        return domain("dp_prime needs nonzero arguments");
    }
    check_cap(t, x.p)?;
    let ny = pabs(y);
    if pabs(x) == ny {
        Ok(Capped::Norm(pabs(&(x - y)).div(&ny)))
    } else {
        Ok(Capped::Cap(t.clone()))
    }
}

/// Default cap for [`dp_prime`]: `t = p`.
pub fn default_cap(p: Prime) -> BigRational {
    BigRational::from_integer(p.big())
}

/// `|log_p |x|_p − log_p |y|_p| = |vp(x) − vp(y)|`.
pub fn dp_log(x: &PRational, y: &PRational) -> Result<u64> {
    x.check_same_prime(y)?;
    match (vp(x), vp(y)) {
        (Valuation::Finite(a), Valuation::Finite(b)) => Ok(a.abs_diff(b)),
        _ => domain("dp_log needs nonzero arguments"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    fn q(s: &str, pr: u64) -> PRational {
        PRational::parse(s, p(pr)).unwrap()
    }

    #[test]
    fn prime_validation() {
        assert!(Prime::new(2).is_ok());
        assert!(Prime::new(999_983).is_ok());
        assert_eq!(Prime::new(1), Err(Error::NotPrime(1)));
        assert_eq!(Prime::new(91), Err(Error::NotPrime(91)));
        assert_eq!(Prime::new(1_000_003), Err(Error::PrimeOutOfRange(1_000_003)));
    }

    #[test]
    fn valuations() {
        assert_eq!(vp(&q("12", 2)), Valuation::Finite(2));
        assert_eq!(vp(&q("5/6", 3)), Valuation::Finite(-1));
        assert_eq!(vp(&q("0", 7)), Valuation::Infinity);
        assert!(Valuation::Finite(i64::MAX) < Valuation::Infinity);
    }

    #[test]
    fn absolute_values() {
        assert_eq!(pabs(&q("12", 2)), PNorm::from_int_exponent(2));
        assert_eq!(pabs(&q("1/9", 3)), PNorm::from_int_exponent(-2));
        assert_eq!(pabs(&q("7", 5)), PNorm::one());
        assert_eq!(pabs(&q("1/9", 3)).display(p(3)), "3^2");
        assert_eq!(pabs(&q("12", 2)).display(p(2)), "2^-2");
    }

    #[test]
    fn norm_order_and_products() {
        let small = PNorm::from_int_exponent(3);
        let big = PNorm::from_int_exponent(-1);
        assert!(PNorm::Zero < small && small < PNorm::one() && PNorm::one() < big);
        assert_eq!(&small * &big, PNorm::from_int_exponent(2));
        assert_eq!(&small * &PNorm::Zero, PNorm::Zero);
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(PNorm::from_int_exponent(2).pow(&half), PNorm::one().pow(&half) * PNorm::from_int_exponent(1));
    }

    #[test]
    fn distance_examples() {
        assert_eq!(dp(&q("1", 2), &q("0", 2)).unwrap(), PNorm::one());
        assert_eq!(dp(&q("1/3", 3), &q("2/3", 3)).unwrap(), PNorm::from_int_exponent(-1));
        assert_eq!(dp(&q("5/7", 5), &q("5/7", 5)).unwrap(), PNorm::Zero);
        assert_eq!(dp(&q("1", 2), &q("1", 3)), Err(Error::PrimeMismatch(2, 3)));
    }

    #[test]
    fn rp_examples() {
        assert_eq!(rp(&q("1", 5)).unwrap(), PNorm::Zero);
        assert_eq!(rp(&q("4", 3)).unwrap(), PNorm::from_int_exponent(1));
        for pr in [2, 3, 5, 7] {
            assert_eq!(rp(&q(&pr.to_string(), pr)).unwrap(), PNorm::from_int_exponent(-1));
        }
        assert!(rp(&q("0", 3)).is_err());
    }

    #[test]
    fn dp_prime_examples() {
        let t = default_cap(p(3));
        assert_eq!(dp_prime(&q("1", 3), &q("4", 3), &t).unwrap(), Capped::Norm(PNorm::from_int_exponent(1)));
        assert_eq!(dp_prime(&q("1", 3), &q("3", 3), &t).unwrap(), Capped::Cap(t.clone()));
        assert_eq!(dp_prime(&q("2/9", 3), &q("2/9", 3), &t).unwrap(), Capped::Norm(PNorm::Zero));
        assert!(dp_prime(&q("0", 3), &q("1", 3), &t).is_err());
        let bad = BigRational::from_integer(4.into());
        assert!(dp_prime(&q("1", 3), &q("2", 3), &bad).is_err());
    }

    #[test]
    fn dp_log_examples() {
        assert_eq!(dp_log(&q("4", 2), &q("1", 2)).unwrap(), 2);
        assert_eq!(dp_log(&q("6/5", 5), &q("6/5", 5)).unwrap(), 0);
        assert_eq!(dp_log(&q("1/3", 3), &q("3", 3)).unwrap(), 2);
        assert!(dp_log(&q("0", 3), &q("3", 3)).is_err());
    }

    #[test]
    fn literal_parsing() {
        assert_eq!(parse_rational("-3/6").unwrap(), BigRational::new((-1).into(), 2.into()));
        assert_eq!(parse_rational(" 42 ").unwrap(), BigRational::from_integer(42.into()));
        for bad in ["", "1/0", "a", "1/-2", "--1", "1.5", "+1"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn norm_json_shape() {
        let z = serde_json::to_string(&PNorm::Zero).unwrap();
        assert_eq!(z, r#"{"kind":"zero"}"#);
        let f = PNorm::from_exponent(BigRational::new((-1).into(), 2.into()));
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"kind":"finite","exponent":"-1/2"}"#);
        assert_eq!(s.parse::<PNorm>().unwrap(), f);
    }
}

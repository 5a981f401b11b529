//! Exact nonnegative magnitudes of the form `base^exp` with rational base
//! and exponent, used as the common value type of every semimetric.
//!
//! Order comparisons between single magnitudes are exact. Comparisons
//! between finite sums of magnitudes (needed for the additive triangle
//! inequality once fractional powers appear) use certified rational
//! enclosures and report `None` when the enclosures never separate.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

#[derive(Clone, Debug)]
pub enum Value {
    Zero,
    /// `base^exp` with `base > 0`.
    Power {
        base: BigRational,
        exp: BigRational,
    },
}

/// Precisions (in bits) tried by [`cmp_sums`] before giving up.
const ENCLOSURE_BITS: [u64; 6] = [64, 128, 256, 512, 1024, 2048];

fn exp_i32(e: &BigInt) -> i32 {
    e.to_i32().expect("exponent too large for exact comparison")
}

impl Value {
    pub fn one() -> Self {
        Value::Power { base: BigRational::one(), exp: BigRational::one() }
    }

    pub fn rational(r: BigRational) -> Self {
        assert!(!r.is_negative(), "distances are nonnegative");
        if r.is_zero() {
            Value::Zero
        } else {
            Value::Power { base: r, exp: BigRational::one() }
        }
    }

    pub fn int(n: u64) -> Self {
        Value::rational(BigRational::from_integer(n.into()))
    }

    pub fn power(base: BigRational, exp: BigRational) -> Self {
        assert!(base.is_positive(), "power base must be positive");
        if base.is_one() || exp.is_zero() {
            return Value::one();
        }
        Value::Power { base, exp }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Value::Zero)
    }

    /// `self^alpha` for `alpha > 0`.
    pub fn pow(&self, alpha: &BigRational) -> Self {
        assert!(alpha.is_positive(), "powers of distances need alpha > 0");
        match self {
            Value::Zero => Value::Zero,
            Value::Power { base, exp } => Value::power(base.clone(), exp * alpha),
        }
    }

    /// The exact rational value when the exponent is an integer.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self {
            Value::Zero => Some(BigRational::zero()),
            Value::Power { base, exp } if exp.is_integer() => Some(base.pow(exp_i32(exp.numer()))),
            Value::Power { .. } => None,
        }
    }

    /// Rational bounds `lo ≤ self ≤ hi` with `hi − lo ≤ 2^-bits` for
    /// irrational values; exact otherwise.
    pub fn enclose(&self, bits: u64) -> (BigRational, BigRational) {
        if let Some(r) = self.as_rational() {
            return (r.clone(), r);
        }
        let Value::Power { base, exp } = self else { unreachable!() };
        let d = exp.denom().to_u32().expect("root degree too large");
        let x = base.pow(exp_i32(exp.numer()));
        let scale = BigInt::one() << (bits * d as u64);
        let scaled = x * BigRational::from_integer(scale);
        let floor = scaled.numer() / scaled.denom();
        let root = floor.nth_root(d);
        let denom = BigInt::one() << bits;
        let lo = BigRational::new(root.clone(), denom.clone());
        let hi = BigRational::new(root + BigInt::one(), denom);
        (lo, hi)
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Zero => 0.0,
            Value::Power { base, exp } => base.to_f64().unwrap_or(f64::NAN).powf(exp.to_f64().unwrap_or(f64::NAN)),
        }
    }
}

fn cmp_powers(a: &BigRational, x: &BigRational, b: &BigRational, y: &BigRational) -> Ordering {
    if a == b {
        return match a.cmp(&BigRational::one()) {
            Ordering::Greater => x.cmp(y),
            Ordering::Less => y.cmp(x),
            Ordering::Equal => Ordering::Equal,
        };
    }
    if x == y {
        return if x.is_positive() { a.cmp(b) } else { b.cmp(a) };
    }
    // raise both sides to the positive power denom(x)·denom(y)
    let lhs = a.pow(exp_i32(&(x.numer() * y.denom())));
    let rhs = b.pow(exp_i32(&(y.numer() * x.denom())));
    lhs.cmp(&rhs)
}

impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Value::Zero, Value::Zero) => Ordering::Equal,
            (Value::Zero, _) => Ordering::Less,
            (_, Value::Zero) => Ordering::Greater,
            (Value::Power { base: a, exp: x }, Value::Power { base: b, exp: y }) => cmp_powers(a, x, b, y),
        }
    }
}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Value {}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Zero => write!(f, "0"),
            v => match v.as_rational() {
                Some(r) => write!(f, "{r}"),
                None => {
                    let Value::Power { base, exp } = v else { unreachable!() };
                    write!(f, "{base}^{exp}")
                }
            },
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Compares two finite sums of magnitudes. `None` means the sums could not
/// be separated at the largest precision tried (they may be equal).
pub fn cmp_sums(lhs: &[Value], rhs: &[Value]) -> Option<Ordering> {
    if let ([a], [b]) = (lhs, rhs) {
        return Some(a.cmp(b));
    }
    let exact =
        |vs: &[Value]| -> Option<BigRational> { vs.iter().map(Value::as_rational).sum::<Option<BigRational>>() };
    if let (Some(a), Some(b)) = (exact(lhs), exact(rhs)) {
        return Some(a.cmp(&b));
    }
    let bound = |vs: &[Value], bits| {
        vs.iter().fold((BigRational::zero(), BigRational::zero()), |(lo, hi), v| {
            let (l, h) = v.enclose(bits);
            (lo + l, hi + h)
        })
    };
    for bits in ENCLOSURE_BITS {
        let (llo, lhi) = bound(lhs, bits);
        let (rlo, rhi) = bound(rhs, bits);
        if lhi < rlo {
            return Some(Ordering::Less);
        }
        if llo > rhi {
            return Some(Ordering::Greater);
        }
    }
    None
}

/// `true` unless `lhs` is certifiably larger than the sum `rhs`.
pub fn le_sum(lhs: &Value, rhs: &[Value]) -> bool {
    // a single term no larger than the largest summand needs no enclosure
    if rhs.iter().any(|r| lhs <= r) {
        return true;
    }
    cmp_sums(std::slice::from_ref(lhs), rhs) != Some(Ordering::Greater)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn exact_ordering_of_roots() {
        let sqrt2 = Value::power(r(2, 1), r(1, 2));
        let cbrt3 = Value::power(r(3, 1), r(1, 3));
        // 2^3 = 8 < 3^2 = 9
        assert!(sqrt2 < cbrt3);
        assert_eq!(Value::power(r(4, 1), r(1, 2)), Value::int(2));
        assert_eq!(Value::power(r(2, 1), r(-2, 1)), Value::rational(r(1, 4)));
        assert!(Value::Zero < Value::power(r(2, 1), r(-50, 1)));
        assert!(Value::power(r(1, 2), r(3, 1)) < Value::power(r(2, 1), r(-2, 1)));
    }

    #[test]
    fn enclosure_brackets_value() {
        let v = Value::power(r(2, 1), r(1, 2));
        let (lo, hi) = v.enclose(64);
        assert!(&lo * &lo <= r(2, 1) && &hi * &hi >= r(2, 1));
        assert!(hi - lo <= BigRational::new(1.into(), BigInt::one() << 64));
    }

    #[test]
    fn sum_comparisons() {
        let half = r(1, 2);
        let sqrt2 = Value::power(r(2, 1), half.clone());
        let isqrt2 = Value::power(r(2, 1), -half);
        // 2^(1/2) = 2^(-1/2) + 2^(-1/2): enclosures cannot separate an equality
        assert_eq!(cmp_sums(std::slice::from_ref(&sqrt2), &[isqrt2.clone(), isqrt2.clone()]), None);
        assert!(le_sum(&sqrt2, &[isqrt2.clone(), isqrt2.clone()]));
        assert_eq!(
            cmp_sums(std::slice::from_ref(&sqrt2), &[isqrt2.clone(), Value::rational(r(1, 2))]),
            Some(Ordering::Greater)
        );
        assert!(!le_sum(&sqrt2, &[isqrt2, Value::rational(r(1, 2))]));
        assert_eq!(cmp_sums(&[Value::int(3)], &[Value::int(1), Value::int(2)]), Some(Ordering::Equal));
    }
}

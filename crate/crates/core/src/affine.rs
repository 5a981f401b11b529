//! Affine maps `f(x) = a x + b` on `Q_p` and the gauges on the `ax + b` group.

use std::fmt;

use num_rational::BigRational;
use num_traits::One;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::gauge::Group;
use crate::matrix::PMatrix;
use crate::padic::{pabs, Capped, PNorm, PRational, Prime};
use crate::triangular::UTMatrix;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AffineMap {
    a: PRational,
    b: PRational,
}

/// Membership of a map in the three subsemigroups of interest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Membership {
    /// Both coefficients in `Z_p`.
    pub in_a_zp: bool,
    /// Both coefficients in `Z_p` and `|a|_p = 1`.
    pub in_astar_zp: bool,
    /// `|a|_p = 1`.
    pub in_a_up: bool,
}

impl AffineMap {
    pub fn new(a: PRational, b: PRational) -> Result<Self> {
        a.check_same_prime(&b)?;
        Ok(AffineMap { a, b })
    }

    pub fn from_ints(a: i64, b: i64, p: Prime) -> Self {
        AffineMap { a: PRational::from_int(a, p), b: PRational::from_int(b, p) }
    }

    pub fn identity(p: Prime) -> Self {
        AffineMap { a: PRational::one(p), b: PRational::zero(p) }
    }

    pub fn a(&self) -> &PRational {
        &self.a
    }

    pub fn b(&self) -> &PRational {
        &self.b
    }

    pub fn prime(&self) -> Prime {
        self.a.prime()
    }

    pub fn is_invertible(&self) -> bool {
        !self.a.is_zero()
    }

    pub fn apply(&self, x: &PRational) -> PRational {
        &(&self.a * x) + &self.b
    }

    /// `self ∘ g`: `x ↦ a c x + a d + b`.
    pub fn compose(&self, g: &AffineMap) -> Result<AffineMap> {
        self.a.check_same_prime(&g.a)?;
        Ok(AffineMap { a: &self.a * &g.a, b: &(&self.a * &g.b) + &self.b })
    }

    /// `a⁻¹ x − a⁻¹ b`.
    pub fn inverse(&self) -> Result<AffineMap> {
        let ai = self.a.inv().map_err(|_| Error::Domain("affine map with a = 0 is not invertible".into()))?;
        let b = -&(&ai * &self.b);
        Ok(AffineMap { a: ai, b })
    }

    /// The coefficientwise difference `f − g`, itself an affine map.
    pub fn difference(&self, g: &AffineMap) -> Result<AffineMap> {
        self.a.check_same_prime(&g.a)?;
        Ok(AffineMap { a: &self.a - &g.a, b: &self.b - &g.b })
    }

    /// `[[a, b], [0, 1]]`.
    pub fn to_matrix(&self) -> UTMatrix {
        let p = self.prime();
        let m = PMatrix::from_rows(
            vec![vec![self.a.clone(), self.b.clone()], vec![PRational::zero(p), PRational::one(p)]],
            p,
        )
        .expect("2 x 2 over one prime");
        UTMatrix::new(m).expect("upper triangular by construction")
    }

    pub fn membership(&self) -> Membership {
        let in_a_zp = self.a.is_integral() && self.b.is_integral();
        let in_a_up = self.a.is_unit();
        Membership { in_a_zp, in_astar_zp: in_a_zp && in_a_up, in_a_up }
    }

    /// Reconstructs `f` from `f(0)` and `f(1)`.
    pub fn recover_from_values(f0: &PRational, f1: &PRational) -> Result<AffineMap> {
        AffineMap::new(f1 - f0, f0.clone())
    }
}

impl fmt::Display for AffineMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x+{}", self.a, self.b)
    }
}

impl fmt::Debug for AffineMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for AffineMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("AffineMap", 3)?;
        st.serialize_field("a", &self.a)?;
        st.serialize_field("b", &self.b)?;
        st.serialize_field("p", &self.prime())?;
        st.end()
    }
}

/// `‖f‖ = max(|a|_p, |b|_p)`.
pub fn aff_norm(f: &AffineMap) -> PNorm {
    pabs(&f.a).max(pabs(&f.b))
}

/// `‖f − g‖`.
pub fn aff_distance(f: &AffineMap, g: &AffineMap) -> Result<PNorm> {
    Ok(aff_norm(&f.difference(g)?))
}

/// `L(f) = max(|a − 1|_p, |b|_p)` for `|a|_p = 1`.
pub fn aff_l(f: &AffineMap) -> Result<PNorm> {
    if !f.a.is_unit() {
        return Err(Error::Domain(format!("L needs |a|_p = 1, got a = {}", f.a)));
    }
    Ok(pabs(&(&f.a - &PRational::one(f.prime()))).max(pabs(&f.b)))
}

/// The default cap for [`aff_lprime`].
pub fn default_lprime_cap() -> BigRational {
    BigRational::one()
}

/// `L'(f) = L(f)` on `A*(Z_p)` and `t` elsewhere, for `t ≥ 1`.
pub fn aff_lprime(f: &AffineMap, t: &BigRational) -> Result<Capped> {
    if *t < BigRational::one() {
        return Err(Error::InvalidArgument(format!("L' needs t >= 1, got {t}")));
    }
    if !f.is_invertible() {
        return Err(Error::Domain("L' is defined on invertible maps only".into()));
    }
    if f.membership().in_astar_zp {
        Ok(Capped::Norm(aff_l(f)?))
    } else {
        Ok(Capped::Cap(t.clone()))
    }
}

/// `L'(g⁻¹ ∘ f)`, a left-invariant ultrametric on `A*(Q_p)`.
pub fn lprime_left_metric(f: &AffineMap, g: &AffineMap, t: &BigRational) -> Result<Capped> {
    aff_lprime(&g.inverse()?.compose(f)?, t)
}

/// The invertible affine maps under composition.
#[derive(Clone, Copy, Debug)]
pub struct AffineGroup {
    pub p: Prime,
}

impl Group for AffineGroup {
    type Elem = AffineMap;
    fn identity(&self) -> AffineMap {
        AffineMap::identity(self.p)
    }
    fn mul(&self, a: &AffineMap, b: &AffineMap) -> AffineMap {
        a.compose(b).expect("compatible group elements")
    }
    fn inv(&self, a: &AffineMap) -> AffineMap {
        a.inverse().expect("group elements are invertible")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::matnorm;
    use crate::sample;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    fn q(n: i64, d: i64, pr: Prime) -> PRational {
        PRational::from_frac(n, d, pr)
    }

    #[test]
    fn examples() {
        let pr = p(5);
        let f = AffineMap::from_ints(2, 3, pr);
        let g = AffineMap::from_ints(5, 7, pr);
        let id = AffineMap::identity(pr);
        assert_eq!(f.apply(&q(5, 1, pr)), q(13, 1, pr));
        assert_eq!(id.apply(&q(-7, 3, pr)), q(-7, 3, pr));
        assert_eq!(f.compose(&g).unwrap(), AffineMap::from_ints(10, 17, pr));
        assert_eq!(f.compose(&id).unwrap(), f);
        assert_eq!(f.inverse().unwrap(), AffineMap::new(q(1, 2, pr), q(-3, 2, pr)).unwrap());
        assert_eq!(id.inverse().unwrap(), id);
        assert!(AffineMap::from_ints(0, 1, pr).inverse().is_err());
        assert_eq!(f.to_matrix().matrix(), &PMatrix::from_ints(&[&[2, 3], &[0, 1]], pr).unwrap());
        assert!(id.to_matrix().matrix().is_identity());
    }

    #[test]
    fn norm_examples() {
        let pr = p(3);
        assert_eq!(aff_norm(&AffineMap::from_ints(0, 0, pr)), PNorm::Zero);
        assert_eq!(aff_norm(&AffineMap::from_ints(3, 1, pr)), PNorm::one());
        assert_eq!(aff_l(&AffineMap::identity(pr)).unwrap(), PNorm::Zero);
        assert_eq!(aff_l(&AffineMap::from_ints(1, 3, pr)).unwrap(), PNorm::from_int_exponent(1));
        assert_eq!(aff_l(&AffineMap::from_ints(4, 0, pr)).unwrap(), PNorm::from_int_exponent(1));
        assert!(aff_l(&AffineMap::from_ints(3, 0, pr)).is_err());
    }

    #[test]
    fn lprime_examples() {
        let pr = p(2);
        let one = default_lprime_cap();
        let two = BigRational::from_integer(2.into());
        assert_eq!(aff_lprime(&AffineMap::identity(pr), &one).unwrap(), Capped::Norm(PNorm::Zero));
        assert_eq!(aff_lprime(&AffineMap::from_ints(2, 0, pr), &two).unwrap(), Capped::Cap(two.clone()));
        assert!(aff_lprime(&AffineMap::from_ints(0, 1, pr), &two).is_err());
        assert!(aff_lprime(&AffineMap::identity(pr), &BigRational::new(1.into(), 2.into())).is_err());
    }

    #[test]
    fn membership_examples() {
        let pr = p(3);
        let all = Membership { in_a_zp: true, in_astar_zp: true, in_a_up: true };
        let none = Membership { in_a_zp: false, in_astar_zp: false, in_a_up: false };
        assert_eq!(AffineMap::identity(pr).membership(), all);
        assert_eq!(AffineMap::new(q(1, 3, pr), q(0, 1, pr)).unwrap().membership(), none);
        let m = AffineMap::new(q(1, 1, pr), q(1, 3, pr)).unwrap().membership();
        assert!(!m.in_a_zp && !m.in_astar_zp && m.in_a_up);
    }

    #[test]
    fn laws_on_samples() {
        let pr = p(3);
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        let one = default_lprime_cap();
        for _ in 0..300 {
            let f = sample::affine(&mut rng, pr);
            let g = sample::affine(&mut rng, pr);
            let h = sample::affine_any(&mut rng, pr);
            let x = sample::rational(&mut rng, pr);
            let y = sample::rational(&mut rng, pr);
            assert_eq!(f.compose(&g).unwrap().compose(&h).unwrap(), f.compose(&g.compose(&h).unwrap()).unwrap());
            assert!(f.compose(&f.inverse().unwrap()).unwrap() == AffineMap::identity(pr));
            assert_eq!(f.compose(&g).unwrap().to_matrix(), f.to_matrix().mul(&g.to_matrix()).unwrap());
            assert_eq!(f.compose(&g).unwrap().apply(&x), f.apply(&g.apply(&x)));
            assert_eq!(
                AffineMap::recover_from_values(&h.apply(&PRational::zero(pr)), &h.apply(&PRational::one(pr))).unwrap(),
                h
            );
            assert_eq!(matnorm(h.to_matrix().matrix()), aff_norm(&h).max(PNorm::one()));
            let d = matnorm(f.to_matrix().sub(&g.to_matrix()).unwrap().matrix());
            assert_eq!(d, aff_distance(&f, &g).unwrap());

            let alpha = sample::affine_unit_slope(&mut rng, pr);
            let beta = sample::affine_zp_star(&mut rng, pr);
            assert_eq!(pabs(&(&alpha.apply(&x) - &alpha.apply(&y))), pabs(&(&x - &y)));
            let af = alpha.compose(&f).unwrap();
            let ag = alpha.compose(&g).unwrap();
            assert_eq!(aff_distance(&af, &ag).unwrap(), aff_distance(&f, &g).unwrap());
            let fb = f.compose(&beta).unwrap();
            let gb = g.compose(&beta).unwrap();
            assert_eq!(aff_distance(&fb, &gb).unwrap(), aff_distance(&f, &g).unwrap());

            let u = sample::affine_unit_slope(&mut rng, pr);
            assert_eq!(aff_l(&u.inverse().unwrap()).unwrap(), aff_l(&u).unwrap());
            let v = sample::affine_unit_slope(&mut rng, pr);
            assert!(aff_l(&u.compose(&v).unwrap()).unwrap() <= aff_l(&u).unwrap().max(aff_l(&v).unwrap()));

            let s = sample::affine_zp_star(&mut rng, pr);
            let lp = lprime_left_metric(&beta, &s, &one).unwrap();
            assert_eq!(lp, Capped::Norm(aff_distance(&beta, &s).unwrap()));
        }
    }

    #[test]
    fn sup_formula() {
        let pr = p(2);
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..300 {
            let f = sample::affine_any(&mut rng, pr);
            let at = |x: &PRational| pabs(&f.apply(x));
            let mut sup = at(&PRational::zero(pr)).max(at(&PRational::one(pr)));
            assert_eq!(sup, aff_norm(&f));
            for _ in 0..8 {
                sup = sup.max(at(&sample::integral(&mut rng, pr)));
            }
            assert_eq!(sup, aff_norm(&f));
        }
    }
}

//! The Heisenberg group `H_n = Q_p^n × Q_p^n × Q_p` with product
//! `(x, y, t) ⋄ (x', y', t') = (x + x', y + y', t + t' + Σ x_j y'_j)`.

use std::fmt;

use num_rational::BigRational;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::gauge::Group;
use crate::matrix::{vecnorm, PMatrix, PVector};
use crate::padic::{pabs, PNorm, PRational, Prime, Valuation};
use crate::triangular::UTMatrix;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct HPoint {
    x: PVector,
    y: PVector,
    t: PRational,
}

impl HPoint {
    pub fn new(x: PVector, y: PVector, t: PRational) -> Result<Self> {
        x.check_compatible(&y)?;
        if t.prime() != x.prime() {
            return Err(Error::PrimeMismatch(x.prime().get(), t.prime().get()));
        }
        Ok(HPoint { x, y, t })
    }

    pub fn identity(n: usize, p: Prime) -> Self {
        HPoint { x: PVector::zero(n, p), y: PVector::zero(n, p), t: PRational::zero(p) }
    }

    /// Builds a point from integer coordinates.
    pub fn from_ints(x: &[i64], y: &[i64], t: i64, p: Prime) -> Result<Self> {
        let v = |c: &[i64]| PVector::new(c.iter().map(|&e| PRational::from_int(e, p)).collect(), p);
        HPoint::new(v(x)?, v(y)?, PRational::from_int(t, p))
    }

    pub fn x(&self) -> &PVector {
        &self.x
    }

    pub fn y(&self) -> &PVector {
        &self.y
    }

    pub fn t(&self) -> &PRational {
        &self.t
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn prime(&self) -> Prime {
        self.t.prime()
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.y.is_zero() && self.t.is_zero()
    }

    /// Every coordinate lies in `Z_p`.
    pub fn is_integral(&self) -> bool {
        self.coords().all(PRational::is_integral)
    }

    fn coords(&self) -> impl Iterator<Item = &PRational> {
        self.x.entries().iter().chain(self.y.entries()).chain(std::iter::once(&self.t))
    }

    fn check_compatible(&self, other: &HPoint) -> Result<()> {
        self.x.check_compatible(&other.x)
    }
}

impl fmt::Display for HPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n() == 1 {
            write!(f, "({},{},{})", self.x.entries()[0], self.y.entries()[0], self.t)
        } else {
            write!(f, "({},{},{})", self.x, self.y, self.t)
        }
    }
}

impl fmt::Debug for HPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for HPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("HPoint", 4)?;
        st.serialize_field("x", &self.x)?;
        st.serialize_field("y", &self.y)?;
        st.serialize_field("t", &self.t)?;
        st.serialize_field("p", &self.prime())?;
        st.end()
    }
}

pub fn h_mul(u: &HPoint, v: &HPoint) -> Result<HPoint> {
    u.check_compatible(v)?;
    let t = &(&u.t + &v.t) + &u.x.dot(&v.y);
    Ok(HPoint { x: &u.x + &v.x, y: &u.y + &v.y, t })
}

/// `(−x, −y, −t + Σ x_j y_j)`.
pub fn h_inv(u: &HPoint) -> HPoint {
    HPoint { x: -&u.x, y: -&u.y, t: &(-&u.t) + &u.x.dot(&u.y) }
}

/// `δ_r(x, y, t) = (r x, r y, r² t)`.
pub fn h_dilate(u: &HPoint, r: &PRational) -> HPoint {
    HPoint { x: u.x.scale(r), y: u.y.scale(r), t: &u.t * &(r * r) }
}

/// `g ⋄ u ⋄ g⁻¹` in closed form: `(x', y', t' + Σ (x_j y'_j − x'_j y_j))`.
pub fn h_conjugate(g: &HPoint, u: &HPoint) -> Result<HPoint> {
    g.check_compatible(u)?;
    let t = &(&u.t + &g.x.dot(&u.y)) - &u.x.dot(&g.y);
    Ok(HPoint { x: u.x.clone(), y: u.y.clone(), t })
}

/// `(g ⋄ u) ⋄ g⁻¹` by two products.
pub fn h_conjugate_composed(g: &HPoint, u: &HPoint) -> Result<HPoint> {
    h_mul(&h_mul(g, u)?, &h_inv(g))
}

/// `N(x, y, t) = max(|x|_p, |y|_p, |t|_p^{1/2})`.
pub fn h_norm(u: &HPoint) -> PNorm {
    let half = BigRational::new(1.into(), 2.into());
    let t = match pabs(&u.t) {
        PNorm::Zero => PNorm::Zero,
        n => n.pow(&half),
    };
    vecnorm(&u.x).max(vecnorm(&u.y)).max(t)
}

/// `Ñ(x, y, t) = max(|x|_p, |y|_p, |t|_p)`.
pub fn h_norm_tilde(u: &HPoint) -> PNorm {
    vecnorm(&u.x).max(vecnorm(&u.y)).max(pabs(&u.t))
}

/// Membership in `(p^k Z_p)^n × (p^k Z_p)^n × p^l Z_p`, a subgroup when `2k ≥ l`.
pub fn h_subgroup_member(u: &HPoint, k: i64, l: i64) -> Result<bool> {
    if 2 * k < l {
        return Err(Error::InvalidArgument(format!("2k >= l is needed for a subgroup, got k = {k}, l = {l}")));
    }
    let vk = Valuation::Finite(k);
    let xy = u.x.entries().iter().chain(u.y.entries()).all(|c| c.vp() >= vk);
    Ok(xy && u.t.vp() >= Valuation::Finite(l))
}

/// The unipotent `(n+2) × (n+2)` matrix with `x` along the first row,
/// `y` down the last column and `t` in the corner.
pub fn embed_to_triangular(u: &HPoint) -> UTMatrix {
    let n = u.n();
    let p = u.prime();
    let mut m = PMatrix::identity(n + 2, p);
    for k in 0..n {
        m.set(0, k + 1, u.x.entries()[k].clone());
        m.set(k + 1, n + 1, u.y.entries()[k].clone());
    }
    m.set(0, n + 1, u.t.clone());
    UTMatrix::new(m).expect("upper triangular by construction")
}

/// `N((u')⁻¹ ⋄ u)`.
pub fn left_metric(u: &HPoint, u2: &HPoint) -> Result<PNorm> {
    Ok(h_norm(&h_mul(&h_inv(u2), u)?))
}

/// `N(u ⋄ (u')⁻¹)`.
pub fn right_metric(u: &HPoint, u2: &HPoint) -> Result<PNorm> {
    Ok(h_norm(&h_mul(u, &h_inv(u2))?))
}

/// `Ñ((u')⁻¹ ⋄ u)`; bi-invariant on `H_n(Z_p)`.
pub fn left_metric_tilde(u: &HPoint, u2: &HPoint) -> Result<PNorm> {
    Ok(h_norm_tilde(&h_mul(&h_inv(u2), u)?))
}

/// `Ñ(u ⋄ (u')⁻¹)`.
pub fn right_metric_tilde(u: &HPoint, u2: &HPoint) -> Result<PNorm> {
    Ok(h_norm_tilde(&h_mul(u, &h_inv(u2))?))
}

#[derive(Clone, Copy, Debug)]
pub struct HeisenbergGroup {
    pub n: usize,
    pub p: Prime,
}

impl Group for HeisenbergGroup {
    type Elem = HPoint;
    fn identity(&self) -> HPoint {
        HPoint::identity(self.n, self.p)
    }
    fn mul(&self, a: &HPoint, b: &HPoint) -> HPoint {
        h_mul(a, b).expect("compatible group elements")
    }
    fn inv(&self, a: &HPoint) -> HPoint {
        h_inv(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;
    use crate::triangular::tri_norm;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    fn h1(x: i64, y: i64, t: i64, pr: Prime) -> HPoint {
        HPoint::from_ints(&[x], &[y], t, pr).unwrap()
    }

    #[test]
    fn product_examples() {
        let pr = p(5);
        let u = h1(1, 2, 3, pr);
        let v = h1(4, 5, 6, pr);
        assert_eq!(h_mul(&u, &v).unwrap(), h1(5, 7, 14, pr));
        assert_eq!(h_mul(&u, &v).unwrap().to_string(), "(5,7,14)");
        assert_eq!(h_mul(&HPoint::identity(1, pr), &v).unwrap(), v);
        assert_eq!(h_inv(&u), h1(-1, -2, -1, pr));
        assert!(h_inv(&HPoint::identity(2, pr)).is_identity());
        let other = HPoint::identity(2, pr);
        assert!(h_mul(&u, &other).is_err());
    }

    #[test]
    fn dilation_examples() {
        let pr = p(3);
        let u = h1(1, 1, 1, pr);
        assert_eq!(h_dilate(&u, &PRational::one(pr)), u);
        assert_eq!(h_dilate(&u, &PRational::from_int(3, pr)), h1(3, 3, 9, pr));
    }

    #[test]
    fn conjugation_examples() {
        let pr = p(2);
        let g = h1(1, 0, 0, pr);
        let u = h1(0, 1, 0, pr);
        assert_eq!(h_conjugate(&g, &u).unwrap(), h1(0, 1, 1, pr));
        assert_eq!(h_conjugate(&HPoint::identity(1, pr), &u).unwrap(), u);
        let c = h1(0, 0, 5, pr);
        assert_eq!(h_conjugate(&h1(3, -7, 2, pr), &c).unwrap(), c);
    }

    #[test]
    fn norm_examples() {
        let pr = p(3);
        assert_eq!(h_norm(&HPoint::identity(1, pr)), PNorm::Zero);
        let u = h1(3, 3, 3, pr);
        assert_eq!(h_norm(&u), PNorm::from_exponent(BigRational::new(1.into(), 2.into())));
        assert_eq!(h_norm_tilde(&u), PNorm::from_int_exponent(1));
    }

    #[test]
    fn subgroup_examples() {
        let pr = p(2);
        assert!(h_subgroup_member(&HPoint::identity(1, pr), 3, 2).unwrap());
        assert!(h_subgroup_member(&h1(2, 2, 2, pr), 1, 1).unwrap());
        assert!(!h_subgroup_member(&h1(2, 2, 2, pr), 1, 2).unwrap());
        assert!(h_subgroup_member(&h1(2, 2, 2, pr), 1, 3).is_err());
    }

    #[test]
    fn subgroup_ball_is_norm_ball() {
        let pr = p(3);
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        for k in -1..3 {
            let ball = PNorm::from_int_exponent(k);
            for _ in 0..300 {
                let u = sample::hpoint(&mut rng, 2, pr);
                assert_eq!(h_subgroup_member(&u, k, 2 * k).unwrap(), h_norm(&u) <= ball);
            }
        }
    }

    #[test]
    fn embedding_layout() {
        let pr = p(5);
        let e = embed_to_triangular(&h1(2, 3, 7, pr));
        let expected = PMatrix::from_ints(&[&[1, 2, 7], &[0, 1, 3], &[0, 0, 1]], pr).unwrap();
        assert_eq!(e.matrix(), &expected);
        assert!(embed_to_triangular(&HPoint::identity(2, pr)).matrix().is_identity());
    }

    #[test]
    fn group_laws_on_samples() {
        let pr = p(2);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for n in 1..=3 {
            for _ in 0..200 {
                let u = sample::hpoint(&mut rng, n, pr);
                let v = sample::hpoint(&mut rng, n, pr);
                let w = sample::hpoint(&mut rng, n, pr);
                let r = sample::rational(&mut rng, pr);
                let uv = h_mul(&u, &v).unwrap();
                assert_eq!(h_mul(&uv, &w).unwrap(), h_mul(&u, &h_mul(&v, &w).unwrap()).unwrap());
                assert!(h_mul(&u, &h_inv(&u)).unwrap().is_identity());
                assert_eq!(h_inv(&h_inv(&u)), u);
                assert_eq!(h_dilate(&uv, &r), h_mul(&h_dilate(&u, &r), &h_dilate(&v, &r)).unwrap());
                assert_eq!(h_conjugate(&u, &v).unwrap(), h_conjugate_composed(&u, &v).unwrap());
                assert_eq!(h_norm(&h_dilate(&u, &r)), &pabs(&r) * &h_norm(&u));
                assert!(h_norm(&uv) <= h_norm(&u).max(h_norm(&v)));
                assert_eq!(h_norm(&h_inv(&u)), h_norm(&u));
                assert_eq!(embed_to_triangular(&uv), embed_to_triangular(&u).mul(&embed_to_triangular(&v)).unwrap());
            }
        }
    }

    #[test]
    fn tilde_norm_on_integral_points() {
        let pr = p(3);
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let two = BigRational::from_integer(2.into());
        for _ in 0..300 {
            let u = sample::integral_hpoint(&mut rng, 2, pr);
            let g = sample::integral_hpoint(&mut rng, 2, pr);
            let n = h_norm(&u);
            let nt = h_norm_tilde(&u);
            let sq = if n.is_zero() { PNorm::Zero } else { n.pow(&two) };
            assert!(sq <= nt && nt <= n);
            assert_eq!(h_norm_tilde(&h_conjugate(&g, &u).unwrap()), nt);
            assert_eq!(left_metric_tilde(&u, &g).unwrap(), right_metric_tilde(&u, &g).unwrap());
        }
    }

    #[test]
    fn first_heisenberg_norm_matches_triangular_norm() {
        let pr = p(2);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..200 {
            let u = sample::hpoint(&mut rng, 1, pr);
            assert_eq!(tri_norm(&embed_to_triangular(&u)), h_norm(&u));
        }
    }
}

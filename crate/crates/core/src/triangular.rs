//! Upper-triangular matrices: the grading by distance from the diagonal,
//! non-isotropic dilations, the anisotropic norm
//! `N(A) = max_{j<k} |a_{j,k}|_p^{1/(k−j)}`, and the unipotent groups built
//! on them.
//!
//! `N` never leaves exponent space: its exponent is
//! `min_{j<k} vp(a_{j,k}) / (k − j)`, an exact rational.

use std::fmt;

use num_rational::BigRational;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::gauge::Group;
use crate::matrix::PMatrix;
use crate::padic::{pabs, PNorm, PRational, Prime, Valuation};
use crate::value::Value;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct UTMatrix {
    m: PMatrix,
    strict_upper: bool,
    unit_diagonal: bool,
    unit_norm_diagonal: bool,
}

impl UTMatrix {
    pub fn new(m: PMatrix) -> Result<Self> {
        let n = m.n();
        for j in 0..n {
            for k in 0..j {
                if !m.get(j, k).is_zero() {
                    return Err(Error::Domain(format!("entry ({}, {}) below the diagonal is nonzero", j + 1, k + 1)));
                }
            }
        }
        let diag = || (0..n).map(|j| m.get(j, j));
        let strict_upper = diag().all(PRational::is_zero);
        let unit_diagonal = diag().all(PRational::is_one);
        let unit_norm_diagonal = diag().all(PRational::is_unit);
        Ok(UTMatrix { m, strict_upper, unit_diagonal, unit_norm_diagonal })
    }

    pub fn identity(n: usize, p: Prime) -> Self {
        UTMatrix::new(PMatrix::identity(n, p)).unwrap()
    }

    pub fn matrix(&self) -> &PMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> PMatrix {
        self.m
    }

    pub fn n(&self) -> usize {
        self.m.n()
    }

    pub fn prime(&self) -> Prime {
        self.m.prime()
    }

    pub fn get(&self, j: usize, k: usize) -> &PRational {
        self.m.get(j, k)
    }

    pub fn is_strict_upper(&self) -> bool {
        self.strict_upper
    }

    /// Membership in `T⁺(n)`.
    pub fn is_unit_diagonal(&self) -> bool {
        self.unit_diagonal
    }

    /// Membership in `T̃(n, Q_p)`.
    pub fn is_unit_norm_diagonal(&self) -> bool {
        self.unit_norm_diagonal
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.n();
        (0..n).all(|j| (j + 1..n).all(|k| self.get(j, k).is_zero()))
    }

    pub fn mul(&self, other: &UTMatrix) -> Result<UTMatrix> {
        UTMatrix::new(self.m.try_mul(&other.m)?)
    }

    pub fn add(&self, other: &UTMatrix) -> Result<UTMatrix> {
        UTMatrix::new(self.m.try_add(&other.m)?)
    }

    pub fn sub(&self, other: &UTMatrix) -> Result<UTMatrix> {
        UTMatrix::new(self.m.try_sub(&other.m)?)
    }

    pub fn diagonal_part(&self) -> UTMatrix {
        grade_component(self, 0).expect("grade 0 always exists")
    }

    /// Inverse of an element of `T̃`, through the factorisation `D · U`.
    pub fn inverse(&self) -> Result<UTMatrix> {
        let (d, u) = factor_diagonal_unipotent(self)?;
        let ui = tplus_inverse(&u)?;
        let di = UTMatrix::new(d.matrix().inverse()?)?;
        ui.mul(&di)
    }
}

impl fmt::Display for UTMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.m)
    }
}

impl fmt::Debug for UTMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.m)
    }
}

impl Serialize for UTMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.m.serialize(s)
    }
}

/// The component of `A` in `T_n^l`: entries with `k − j = l`.
pub fn grade_component(a: &UTMatrix, l: usize) -> Result<UTMatrix> {
    let n = a.n();
    if l >= n {
        return Err(Error::InvalidArgument(format!("grade {l} out of range for n = {n}")));
    }
    let mut m = PMatrix::zero(n, a.prime());
    for j in 0..n - l {
        m.set(j, j + l, a.get(j, j + l).clone());
    }
    UTMatrix::new(m)
}

/// `δ_r(A)`: entry `(j, k)` scaled by `r^(k−j)`.
pub fn dilate(a: &UTMatrix, r: &PRational) -> UTMatrix {
    let n = a.n();
    let p = a.prime();
    let mut m = PMatrix::zero(n, p);
    let mut powers = vec![PRational::one(p)];
    for l in 1..n {
        let next = &powers[l - 1] * r;
        powers.push(next);
    }
    for j in 0..n {
        for k in j..n {
            m.set(j, k, a.get(j, k) * &powers[k - j]);
        }
    }
    UTMatrix::new(m).expect("dilation preserves upper-triangularity")
}

/// `N(A) = max_{j<k} |a_{j,k}|_p^{1/(k−j)}`.
pub fn tri_norm(a: &UTMatrix) -> PNorm {
    let n = a.n();
    let mut best = PNorm::Zero;
    for j in 0..n {
        for k in j + 1..n {
            let e = pabs(a.get(j, k));
            if let PNorm::Finite(q) = e {
                let root = PNorm::Finite(q / BigRational::from_integer(((k - j) as i64).into()));
                best = best.max(root);
            }
        }
    }
    best
}

/// The individual terms `|a_{j,k}|_p^{1/(k−j)}` whose maximum is [`tri_norm`].
pub fn tri_norm_terms(a: &UTMatrix) -> Vec<Value> {
    let n = a.n();
    let p = a.prime();
    let mut terms = Vec::new();
    for j in 0..n {
        for k in j + 1..n {
            let l = BigRational::new(1.into(), ((k - j) as i64).into());
            terms.push(pabs(a.get(j, k)).to_value(p).pow(&l));
        }
    }
    terms
}

/// `(I − B)^{-1} = Σ_{l<n} B^l` for strictly upper-triangular `B`.
pub fn nilpotent_inverse(b: &UTMatrix) -> Result<UTMatrix> {
    if !b.is_strict_upper() {
        return Err(Error::Domain("nilpotent_inverse needs a strictly upper-triangular matrix".into()));
    }
    let n = b.n();
    let p = b.prime();
    let mut sum = PMatrix::identity(n, p);
    let mut power = PMatrix::identity(n, p);
    for _ in 1..n {
        power = &power * b.matrix();
        sum = &sum + &power;
    }
    UTMatrix::new(sum)
}

/// Inverse within `T⁺(n)`, writing `A = I − B`.
pub fn tplus_inverse(a: &UTMatrix) -> Result<UTMatrix> {
    if !a.is_unit_diagonal() {
        return Err(Error::Domain("tplus_inverse needs a unit diagonal".into()));
    }
    let id = PMatrix::identity(a.n(), a.prime());
    let b = UTMatrix::new(&id - a.matrix())?;
    nilpotent_inverse(&b)
}

/// Writes an element of `T̃` as `D · U` with `D` diagonal and `U ∈ T⁺`.
pub fn factor_diagonal_unipotent(a: &UTMatrix) -> Result<(UTMatrix, UTMatrix)> {
    let n = a.n();
    let p = a.prime();
    let diag: Vec<PRational> = (0..n).map(|j| a.get(j, j).clone()).collect();
    if diag.iter().any(PRational::is_zero) {
        return Err(Error::Singular);
    }
    let mut u = PMatrix::zero(n, p);
    for j in 0..n {
        let inv = diag[j].inv()?;
        for k in j..n {
            u.set(j, k, &inv * a.get(j, k));
        }
    }
    let d = UTMatrix::new(PMatrix::diagonal(diag, p)?)?;
    Ok((d, UTMatrix::new(u)?))
}

fn require_ttilde(a: &UTMatrix, which: &str) -> Result<()> {
    if a.is_unit_norm_diagonal() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{which} argument is not in T~(n, Q_p): diagonal entries must have norm 1")))
    }
}

fn check_pair(a: &UTMatrix, b: &UTMatrix) -> Result<()> {
    if a.prime() != b.prime() {
        return Err(Error::PrimeMismatch(a.prime().get(), b.prime().get()));
    }
    if a.n() != b.n() {
        return Err(Error::Dimension(format!("{} vs {}", a.n(), b.n())));
    }
    require_ttilde(a, "first")?;
    require_ttilde(b, "second")
}

/// `N((A')⁻¹ A)`, left-invariant on `T̃`.
pub fn left_metric(a: &UTMatrix, a2: &UTMatrix) -> Result<PNorm> {
    check_pair(a, a2)?;
    Ok(tri_norm(&a2.inverse()?.mul(a)?))
}

/// `N(A (A')⁻¹)`, right-invariant on `T̃`.
pub fn right_metric(a: &UTMatrix, a2: &UTMatrix) -> Result<PNorm> {
    check_pair(a, a2)?;
    Ok(tri_norm(&a.mul(&a2.inverse()?)?))
}

/// `D(A, A') = max_j |a_{j,j} − a'_{j,j}|_p`, bi-invariant on `T̃`.
pub fn diag_semimetric(a: &UTMatrix, a2: &UTMatrix) -> Result<PNorm> {
    check_pair(a, a2)?;
    Ok((0..a.n()).map(|j| pabs(&(a.get(j, j) - a2.get(j, j)))).max().unwrap_or(PNorm::Zero))
}

/// `max(N((A')⁻¹ A), D(A, A'))`, a left-invariant ultrametric on `T̃`.
pub fn combined_left_metric(a: &UTMatrix, a2: &UTMatrix) -> Result<PNorm> {
    Ok(left_metric(a, a2)?.max(diag_semimetric(a, a2)?))
}

/// `d(n) = Σ_{1≤j<k≤n} (k − j)`.
pub fn haar_dimension(n: u64) -> u64 {
    (1..n).map(|l| (n - l) * l).sum()
}

/// Integers `l_1, …, l_{n−1}` with `l_{α+β} ≤ l_α + l_β`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubgroupProfile(Vec<i64>);

impl SubgroupProfile {
    pub fn new(ls: Vec<i64>) -> Result<Self> {
        let m = ls.len();
        for a in 1..=m {
            for b in 1..=m - a {
                if a + b <= m && ls[a + b - 1] > ls[a - 1] + ls[b - 1] {
                    return Err(Error::InvalidArgument(format!(
                        "profile violates l_{} <= l_{} + l_{}: {} > {}",
                        a + b,
                        a,
                        b,
                        ls[a + b - 1],
                        ls[a - 1] + ls[b - 1]
                    )));
                }
            }
        }
        Ok(SubgroupProfile(ls))
    }

    /// `(l, 2l, …, (n−1)l)`: the profile of the ball `{N ≤ p^{-l}}`.
    pub fn linear(n: usize, l: i64) -> Self {
        SubgroupProfile((1..n as i64).map(|a| a * l).collect())
    }

    pub fn levels(&self) -> &[i64] {
        &self.0
    }

    /// `l_α` for `α ≥ 1`.
    pub fn level(&self, alpha: usize) -> i64 {
        self.0[alpha - 1]
    }
}

/// `a_{j,k} ∈ p^{l_{k−j}} Z_p` for all `j < k`.
pub fn profile_subgroup_member(a: &UTMatrix, prof: &SubgroupProfile) -> Result<bool> {
    let n = a.n();
    if prof.levels().len() + 1 != n {
        return Err(Error::Dimension(format!("profile of length {} for n = {n}", prof.levels().len())));
    }
    if !a.is_unit_diagonal() {
        return Err(Error::Domain("profile subgroups live in T+(n)".into()));
    }
    Ok((0..n).all(|j| (j + 1..n).all(|k| a.get(j, k).vp() >= Valuation::Finite(prof.level(k - j)))))
}

/// `T̃(n, Q_p)` under multiplication.
#[derive(Clone, Copy, Debug)]
pub struct TriangularGroup {
    pub n: usize,
    pub p: Prime,
}

impl Group for TriangularGroup {
    type Elem = UTMatrix;
    fn identity(&self) -> UTMatrix {
        UTMatrix::identity(self.n, self.p)
    }
    fn mul(&self, a: &UTMatrix, b: &UTMatrix) -> UTMatrix {
        a.mul(b).expect("compatible group elements")
    }
    fn inv(&self, a: &UTMatrix) -> UTMatrix {
        a.inverse().expect("group elements are invertible")
    }
}

//! Exact square matrices over `Q_p`, the max-entry ultranorm, and the
//! gauges on `GL(n, Q_p)`.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_rational::BigRational;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::gauge::Group;
use crate::padic::{check_cap, pabs, Capped, PNorm, PRational, Prime, Valuation};
use crate::value::Value;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PVector {
    entries: Vec<PRational>,
    p: Prime,
}

impl PVector {
    pub fn new(entries: Vec<PRational>, p: Prime) -> Result<Self> {
        if let Some(bad) = entries.iter().find(|e| e.prime() != p) {
            return Err(Error::PrimeMismatch(p.get(), bad.prime().get()));
        }
        Ok(PVector { entries, p })
    }

    pub fn zero(n: usize, p: Prime) -> Self {
        PVector { entries: vec![PRational::zero(p); n], p }
    }

    /// The `j`-th standard basis vector.
    pub fn basis(n: usize, j: usize, p: Prime) -> Self {
        let mut v = PVector::zero(n, p);
        v.entries[j] = PRational::one(p);
        v
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn entries(&self) -> &[PRational] {
        &self.entries
    }

    pub fn scale(&self, r: &PRational) -> PVector {
        PVector { entries: self.entries.iter().map(|e| e * r).collect(), p: self.p }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(PRational::is_zero)
    }

    pub(crate) fn check_compatible(&self, other: &PVector) -> Result<()> {
        if self.p != other.p {
            return Err(Error::PrimeMismatch(self.p.get(), other.p.get()));
        }
        if self.len() != other.len() {
            return Err(Error::Dimension(format!("vector lengths {} and {}", self.len(), other.len())));
        }
        Ok(())
    }

    fn zip_with(&self, other: &PVector, f: impl Fn(&PRational, &PRational) -> PRational) -> PVector {
        assert!(self.check_compatible(other).is_ok(), "incompatible vectors");
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| f(a, b)).collect();
        PVector { entries, p: self.p }
    }

    /// `Σ_j self_j · other_j`.
    pub fn dot(&self, other: &PVector) -> PRational {
        assert!(self.check_compatible(other).is_ok(), "incompatible vectors");
        self.entries.iter().zip(&other.entries).fold(PRational::zero(self.p), |acc, (a, b)| &acc + &(a * b))
    }
}

impl Add for &PVector {
    type Output = PVector;
    fn add(self, rhs: &PVector) -> PVector {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &PVector {
    type Output = PVector;
    fn sub(self, rhs: &PVector) -> PVector {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl std::ops::Neg for &PVector {
    type Output = PVector;
    fn neg(self) -> PVector {
        PVector { entries: self.entries.iter().map(|e| -e).collect(), p: self.p }
    }
}

impl fmt::Display for PVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "]")
    }
}

impl Serialize for PVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.entries.serialize(s)
    }
}

/// An `n × n` matrix over `Q_p`, stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PMatrix {
    n: usize,
    entries: Vec<PRational>,
    p: Prime,
}

impl PMatrix {
    pub fn from_flat(n: usize, entries: Vec<PRational>, p: Prime) -> Result<Self> {
        if n == 0 || entries.len() != n * n {
            return Err(Error::Dimension(format!("{} entries for an {n}x{n} matrix", entries.len())));
        }
        if let Some(bad) = entries.iter().find(|e| e.prime() != p) {
            return Err(Error::PrimeMismatch(p.get(), bad.prime().get()));
        }
        Ok(PMatrix { n, entries, p })
    }

    pub fn from_rows(rows: Vec<Vec<PRational>>, p: Prime) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("matrix must be square".into()));
        }
        PMatrix::from_flat(n, rows.into_iter().flatten().collect(), p)
    }

    /// Builds a matrix from integer-ratio pairs, for tests and examples.
    pub fn from_fracs(rows: &[&[(i64, i64)]], p: Prime) -> Result<Self> {
        let rows = rows.iter().map(|r| r.iter().map(|&(a, b)| PRational::from_frac(a, b, p)).collect()).collect();
        PMatrix::from_rows(rows, p)
    }

    pub fn from_ints(rows: &[&[i64]], p: Prime) -> Result<Self> {
        let rows = rows.iter().map(|r| r.iter().map(|&a| PRational::from_int(a, p)).collect()).collect();
        PMatrix::from_rows(rows, p)
    }

    pub fn zero(n: usize, p: Prime) -> Self {
        PMatrix { n, entries: vec![PRational::zero(p); n * n], p }
    }

    pub fn identity(n: usize, p: Prime) -> Self {
        let mut m = PMatrix::zero(n, p);
        for j in 0..n {
            m.entries[j * n + j] = PRational::one(p);
        }
        m
    }

    pub fn diagonal(diag: Vec<PRational>, p: Prime) -> Result<Self> {
        let n = diag.len();
        let mut m = PMatrix::zero(n.max(1), p);
        if n == 0 {
            return Err(Error::Dimension("empty diagonal".into()));
        }
        for (j, d) in diag.into_iter().enumerate() {
            if d.prime() != p {
                return Err(Error::PrimeMismatch(p.get(), d.prime().get()));
            }
            m.entries[j * n + j] = d;
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn get(&self, j: usize, k: usize) -> &PRational {
        &self.entries[j * self.n + k]
    }

    pub fn set(&mut self, j: usize, k: usize, v: PRational) {
        assert_eq!(v.prime(), self.p, "prime context mismatch");
        self.entries[j * self.n + k] = v;
    }

    pub fn entries(&self) -> &[PRational] {
        &self.entries
    }

    pub fn rows(&self) -> impl Iterator<Item = &[PRational]> {
        self.entries.chunks(self.n)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(PRational::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        *self == PMatrix::identity(self.n, self.p)
    }

    fn check_compatible(&self, other: &PMatrix) -> Result<()> {
        if self.p != other.p {
            return Err(Error::PrimeMismatch(self.p.get(), other.p.get()));
        }
        if self.n != other.n {
            return Err(Error::Dimension(format!("{0}x{0} vs {1}x{1}", self.n, other.n)));
        }
        Ok(())
    }

    pub fn try_mul(&self, other: &PMatrix) -> Result<PMatrix> {
        self.check_compatible(other)?;
        let n = self.n;
        let mut out = PMatrix::zero(n, self.p);
        for j in 0..n {
            for l in 0..n {
                let mut acc = PRational::zero(self.p);
                for k in 0..n {
                    let a = self.get(j, k);
                    let b = other.get(k, l);
                    if !a.is_zero() && !b.is_zero() {
                        acc = &acc + &(a * b);
                    }
                }
                out.entries[j * n + l] = acc;
            }
        }
        Ok(out)
    }

    pub fn try_add(&self, other: &PMatrix) -> Result<PMatrix> {
        self.check_compatible(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        Ok(PMatrix { n: self.n, entries, p: self.p })
    }

    pub fn try_sub(&self, other: &PMatrix) -> Result<PMatrix> {
        self.check_compatible(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect();
        Ok(PMatrix { n: self.n, entries, p: self.p })
    }

    pub fn scale(&self, r: &PRational) -> PMatrix {
        PMatrix { n: self.n, entries: self.entries.iter().map(|e| e * r).collect(), p: self.p }
    }

    pub fn pow(&self, e: usize) -> PMatrix {
        (0..e).fold(PMatrix::identity(self.n, self.p), |acc, _| &acc * self)
    }

    pub fn apply(&self, v: &PVector) -> Result<PVector> {
        if v.prime() != self.p {
            return Err(Error::PrimeMismatch(self.p.get(), v.prime().get()));
        }
        if v.len() != self.n {
            return Err(Error::Dimension(format!("vector of length {} for {}x{} matrix", v.len(), self.n, self.n)));
        }
        let entries = self
            .rows()
            .map(|row| row.iter().zip(v.entries()).fold(PRational::zero(self.p), |acc, (a, b)| &acc + &(a * b)))
            .collect();
        PVector::new(entries, self.p)
    }

    pub fn transpose(&self) -> PMatrix {
        let n = self.n;
        let mut out = PMatrix::zero(n, self.p);
        for j in 0..n {
            for k in 0..n {
                out.entries[k * n + j] = self.get(j, k).clone();
            }
        }
        out
    }

    /// Index of the nonzero entry of least valuation in `col` at rows `from..`.
    fn pivot_row(rows: &[Vec<PRational>], col: usize, from: usize) -> Option<usize> {
        (from..rows.len()).filter(|&r| !rows[r][col].is_zero()).min_by_key(|&r| rows[r][col].vp())
    }

    pub fn det(&self) -> PRational {
        let n = self.n;
        let mut rows: Vec<Vec<PRational>> = self.rows().map(<[PRational]>::to_vec).collect();
        let mut det = PRational::one(self.p);
        for c in 0..n {
            let Some(r) = Self::pivot_row(&rows, c, c) else {
                return PRational::zero(self.p);
            };
            if r != c {
                rows.swap(r, c);
                det = -det;
            }
            let pivot = rows[c][c].clone();
            det = &det * &pivot;
            for r in c + 1..n {
                if rows[r][c].is_zero() {
                    continue;
                }
                let factor = &rows[r][c] / &pivot;
                for k in c..n {
                    let v = &rows[r][k] - &(&factor * &rows[c][k]);
                    rows[r][k] = v;
                }
            }
        }
        det
    }

    /// Exact inverse by Gauss-Jordan elimination, pivoting on the entry of
    /// largest p-adic norm. The product with the input is checked against `I`.
    pub fn inverse(&self) -> Result<PMatrix> {
        let n = self.n;
        let p = self.p;
        let mut rows: Vec<Vec<PRational>> = self
            .rows()
            .enumerate()
            .map(|(j, row)| {
                let mut r = row.to_vec();
                r.extend((0..n).map(|k| if k == j { PRational::one(p) } else { PRational::zero(p) }));
                r
            })
            .collect();
        for c in 0..n {
            let r = Self::pivot_row(&rows, c, c).ok_or(Error::Singular)?;
            rows.swap(r, c);
            let inv = rows[c][c].inv()?;
            for v in rows[c].iter_mut() {
                *v = &*v * &inv;
            }
            for r in 0..n {
                if r == c || rows[r][c].is_zero() {
                    continue;
                }
                let factor = rows[r][c].clone();
                for k in 0..2 * n {
                    let v = &rows[r][k] - &(&factor * &rows[c][k]);
                    rows[r][k] = v;
                }
            }
        }
        let entries = rows.into_iter().flat_map(|r| r.into_iter().skip(n)).collect();
        let out = PMatrix::from_flat(n, entries, p)?;
        if !self.try_mul(&out)?.is_identity() {
            return Err(Error::Domain("elimination produced an inexact inverse".into()));
        }
        Ok(out)
    }
}

impl Mul for &PMatrix {
    type Output = PMatrix;
    fn mul(self, rhs: &PMatrix) -> PMatrix {
        self.try_mul(rhs).expect("incompatible matrices")
    }
}

impl Add for &PMatrix {
    type Output = PMatrix;
    fn add(self, rhs: &PMatrix) -> PMatrix {
        self.try_add(rhs).expect("incompatible matrices")
    }
}

impl Sub for &PMatrix {
    type Output = PMatrix;
    fn sub(self, rhs: &PMatrix) -> PMatrix {
        self.try_sub(rhs).expect("incompatible matrices")
    }
}

impl fmt::Display for PMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (j, row) in self.rows().enumerate() {
            if j > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for (k, e) in row.iter().enumerate() {
                if k > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{e}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for PMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for PMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = self.rows().map(|r| r.iter().map(|e| e.to_string()).collect()).collect();
        rows.serialize(s)
    }
}

/// `max_j |v_j|_p`.
pub fn vecnorm(v: &PVector) -> PNorm {
    v.entries().iter().map(pabs).max().unwrap_or(PNorm::Zero)
}

/// `max_{j,k} |a_{j,k}|_p`.
pub fn matnorm(a: &PMatrix) -> PNorm {
    a.entries().iter().map(pabs).max().unwrap_or(PNorm::Zero)
}

pub fn matmul(a: &PMatrix, b: &PMatrix) -> Result<PMatrix> {
    a.try_mul(b)
}

pub fn matinv(a: &PMatrix) -> Result<PMatrix> {
    a.inverse()
}

/// Integral entries and unit determinant.
pub fn in_gl_zp(a: &PMatrix) -> bool {
    a.entries().iter().all(PRational::is_integral) && a.det().is_unit()
}

/// Every entry of `A − I` lies in `p^j Z_p`.
pub fn in_gl_j(a: &PMatrix, j: i64) -> Result<bool> {
    if j < 1 {
        return Err(Error::InvalidArgument(format!("GL_j needs j >= 1, got {j}")));
    }
    let d = a - &PMatrix::identity(a.n(), a.prime());
    Ok(d.entries().iter().all(|e| e.vp() >= Valuation::Finite(j)))
}

/// `r(A) = max(‖A − I‖, ‖A⁻¹ − I‖)`.
pub fn gl_gauge(a: &PMatrix) -> Result<PNorm> {
    let inv = a.inverse()?;
    let id = PMatrix::identity(a.n(), a.prime());
    Ok(matnorm(&(a - &id)).max(matnorm(&(&inv - &id))))
}

/// `r'(A) = min(r(A), t)` for `1 ≤ t ≤ p`.
pub fn gl_gauge_capped(a: &PMatrix, t: &BigRational) -> Result<Capped> {
    check_cap(t, a.prime())?;
    let r = gl_gauge(a)?;
    if r.to_value(a.prime()) < Value::rational(t.clone()) {
        Ok(Capped::Norm(r))
    } else {
        Ok(Capped::Cap(t.clone()))
    }
}

/// `r''(A) = max(log_p ‖A‖, log_p ‖A⁻¹‖)`.
pub fn gl_log_gauge(a: &PMatrix) -> Result<u64> {
    let inv = a.inverse()?;
    let la = matnorm(a).log_p().expect("invertible matrices are nonzero");
    let lb = matnorm(&inv).log_p().expect("invertible matrices are nonzero");
    let m = la.max(lb);
    debug_assert!(m >= 0);
    Ok(m as u64)
}

/// `GL(n, Q_p)` under matrix multiplication. Elements must be invertible.
#[derive(Clone, Copy, Debug)]
pub struct GlGroup {
    pub n: usize,
    pub p: Prime,
}

impl Group for GlGroup {
    type Elem = PMatrix;
    fn identity(&self) -> PMatrix {
        PMatrix::identity(self.n, self.p)
    }
    fn mul(&self, a: &PMatrix, b: &PMatrix) -> PMatrix {
        a * b
    }
    fn inv(&self, a: &PMatrix) -> PMatrix {
        a.inverse().expect("group elements are invertible")
    }
}

//! Seeded random generators for the property checks.
//!
//! Rationals are drawn as `±p^v · a/b` with `v ∈ [-3, 3]` and `a, b ∈ [1, 50]`
//! coprime to `p`, which spreads samples across valuations around the unit
//! circle `|x|_p = 1`.

use rand::Rng;

use crate::affine::AffineMap;
use crate::cells::Cell;
use crate::heisenberg::HPoint;
use crate::matrix::{PMatrix, PVector};
use crate::padic::{PRational, Prime};
use crate::triangular::UTMatrix;

const MAX_PART: u64 = 50;
const MAX_VAL: i64 = 3;

fn coprime_part<R: Rng + ?Sized>(rng: &mut R, p: Prime) -> i64 {
    loop {
        let a = rng.gen_range(1..=MAX_PART);
        if a % p.get() != 0 {
            return a as i64;
        }
    }
}

/// `±p^v · a/b` with `v` drawn from `vals`.
pub fn rational_with_valuation<R: Rng + ?Sized>(
    rng: &mut R,
    p: Prime,
    vals: std::ops::RangeInclusive<i64>,
) -> PRational {
    let v = rng.gen_range(vals);
    let a = coprime_part(rng, p);
    let b = coprime_part(rng, p);
    let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
    let unit = PRational::from_frac(sign * a, b, p);
    &unit * &PRational::prime_power(v, p)
}

/// Nonzero rational with valuation in `[-3, 3]`.
pub fn nonzero_rational<R: Rng + ?Sized>(rng: &mut R, p: Prime) -> PRational {
    rational_with_valuation(rng, p, -MAX_VAL..=MAX_VAL)
}

/// Like [`nonzero_rational`] but zero one time in sixteen.
pub fn rational<R: Rng + ?Sized>(rng: &mut R, p: Prime) -> PRational {
    if rng.gen_ratio(1, 16) {
        PRational::zero(p)
    } else {
        nonzero_rational(rng, p)
    }
}

/// A p-adic unit.
pub fn unit<R: Rng + ?Sized>(rng: &mut R, p: Prime) -> PRational {
    rational_with_valuation(rng, p, 0..=0)
}

/// An element of `Z_p` (zero one time in sixteen).
pub fn integral<R: Rng + ?Sized>(rng: &mut R, p: Prime) -> PRational {
    if rng.gen_ratio(1, 16) {
        PRational::zero(p)
    } else {
        rational_with_valuation(rng, p, 0..=MAX_VAL)
    }
}

/// A unit congruent to 1 modulo `p`, i.e. close to the identity.
pub fn near_one<R: Rng + ?Sized>(rng: &mut R, p: Prime) -> PRational {
    let e = rational_with_valuation(rng, p, 1..=MAX_VAL);
    &PRational::one(p) + &e
}

pub fn vector<R: Rng + ?Sized>(rng: &mut R, n: usize, p: Prime) -> PVector {
    PVector::new((0..n).map(|_| rational(rng, p)).collect(), p).expect("uniform prime")
}

pub fn matrix<R: Rng + ?Sized>(rng: &mut R, n: usize, p: Prime) -> PMatrix {
    let entries = (0..n * n).map(|_| rational(rng, p)).collect();
    PMatrix::from_flat(n, entries, p).expect("uniform prime")
}

/// An invertible matrix over `Q_p`.
pub fn invertible<R: Rng + ?Sized>(rng: &mut R, n: usize, p: Prime) -> PMatrix {
    loop {
        let m = matrix(rng, n, p);
        if !m.det().is_zero() {
            return m;
        }
    }
}

/// An element of `GL(n, Z_p)`: integral entries with unit determinant.
pub fn gl_zp<R: Rng + ?Sized>(rng: &mut R, n: usize, p: Prime) -> PMatrix {
    loop {
        let entries = (0..n * n).map(|_| if rng.gen_bool(0.5) { unit(rng, p) } else { integral(rng, p) }).collect();
        let m = PMatrix::from_flat(n, entries, p).expect("uniform prime");
        if m.det().is_unit() {
            return m;
        }
    }
}

/// An element of `GL_j(n, Z_p)`: `I` plus a matrix with entries in `p^j Z_p`.
pub fn gl_j<R: Rng + ?Sized>(rng: &mut R, n: usize, j: i64, p: Prime) -> PMatrix {
    let scale = PRational::prime_power(j, p);
    let mut m = PMatrix::identity(n, p);
    for r in 0..n {
        for c in 0..n {
            let e = &integral(rng, p) * &scale;
            let v = m.get(r, c) + &e;
            m.set(r, c, v);
        }
    }
    m
}

fn upper_with<R: Rng + ?Sized, F>(rng: &mut R, n: usize, p: Prime, mut diag: F) -> UTMatrix
where
    F: FnMut(&mut R) -> PRational,
{
    let mut m = PMatrix::zero(n, p);
    for j in 0..n {
        m.set(j, j, diag(rng));
        for k in j + 1..n {
            m.set(j, k, rational(rng, p));
        }
    }
    UTMatrix::new(m).expect("upper triangular by construction")
}

/// An element of `T⁺(n, Q_p)`.
pub fn tplus<R: Rng + ?Sized>(rng: &mut R, n: usize, p: Prime) -> UTMatrix {
    upper_with(rng, n, p, |_| PRational::one(p))
}

/// An element of `T̃(n, Q_p)`: unit-norm diagonal.
pub fn ttilde<R: Rng + ?Sized>(rng: &mut R, n: usize, p: Prime) -> UTMatrix {
    upper_with(rng, n, p, |g| unit(g, p))
}

/// Upper-triangular with diagonal entries in `Z_p` (possibly zero).
pub fn upper_integral_diagonal<R: Rng + ?Sized>(rng: &mut R, n: usize, p: Prime) -> UTMatrix {
    upper_with(rng, n, p, |g| integral(g, p))
}

/// A strictly upper-triangular matrix.
pub fn strict_upper<R: Rng + ?Sized>(rng: &mut R, n: usize, p: Prime) -> UTMatrix {
    upper_with(rng, n, p, |_| PRational::zero(p))
}

pub fn hpoint<R: Rng + ?Sized>(rng: &mut R, n: usize, p: Prime) -> HPoint {
    let x = vector(rng, n, p);
    let y = vector(rng, n, p);
    HPoint::new(x, y, rational(rng, p)).expect("consistent arity")
}

/// A point of `H_n(Z_p)`.
pub fn integral_hpoint<R: Rng + ?Sized>(rng: &mut R, n: usize, p: Prime) -> HPoint {
    let mut coord = || integral(rng, p);
    let x: Vec<_> = (0..n).map(|_| coord()).collect();
    let y: Vec<_> = (0..n).map(|_| coord()).collect();
    let t = coord();
    HPoint::new(PVector::new(x, p).unwrap(), PVector::new(y, p).unwrap(), t).expect("consistent arity")
}

/// An invertible affine map.
pub fn affine<R: Rng + ?Sized>(rng: &mut R, p: Prime) -> AffineMap {
    AffineMap::new(nonzero_rational(rng, p), rational(rng, p)).expect("same prime")
}

/// An element of `A(U_p, Q_p)`: unit slope, arbitrary offset.
pub fn affine_unit_slope<R: Rng + ?Sized>(rng: &mut R, p: Prime) -> AffineMap {
    AffineMap::new(unit(rng, p), rational(rng, p)).expect("same prime")
}

/// An element of `A*(Z_p)`: unit slope, integral offset.
pub fn affine_zp_star<R: Rng + ?Sized>(rng: &mut R, p: Prime) -> AffineMap {
    AffineMap::new(unit(rng, p), integral(rng, p)).expect("same prime")
}

/// Any affine map, possibly with zero slope.
pub fn affine_any<R: Rng + ?Sized>(rng: &mut R, p: Prime) -> AffineMap {
    AffineMap::new(rational(rng, p), rational(rng, p)).expect("same prime")
}

/// A cell with scale in `[-4, 4]`.
pub fn cell<R: Rng + ?Sized>(rng: &mut R, p: Prime) -> Cell {
    let k = rng.gen_range(-4..=4);
    Cell::canonical(&rational(rng, p), k)
}

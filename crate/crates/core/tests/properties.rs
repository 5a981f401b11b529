use num_bigint::BigInt;
use num_rational::BigRational;
use padic_gauge::affine::{aff_distance, AffineMap};
use padic_gauge::cells::{act, meet, rho, Cell};
use padic_gauge::heisenberg::{h_inv, h_mul, h_norm, HPoint};
use padic_gauge::matrix::{matnorm, PMatrix};
use padic_gauge::padic::{dp, pabs, parse_rational, PNorm, PRational, Prime};
use padic_gauge::triangular::{dilate, tri_norm, UTMatrix};
use padic_gauge::Valuation;
use proptest::prelude::*;

fn prime() -> impl Strategy<Value = Prime> {
    prop::sample::select(vec![2u64, 3, 5, 7]).prop_map(|p| Prime::new(p).unwrap())
}

fn frac() -> impl Strategy<Value = (i64, i64)> {
    (-2000i64..2000, 1i64..500)
}

fn nonzero_frac() -> impl Strategy<Value = (i64, i64)> {
    frac().prop_filter("nonzero", |(n, _)| *n != 0)
}

fn rat((n, d): (i64, i64), p: Prime) -> PRational {
    PRational::from_frac(n, d, p)
}

/// Exponent of `p` in `n/d`, by repeated division.
fn ord_frac(n: i64, d: i64, p: u64) -> i64 {
    let ord = |mut x: i64| {
        let mut v = 0;
        while x % p as i64 == 0 {
            x /= p as i64;
            v += 1;
        }
        v
    };
    ord(n) - ord(d)
}

proptest! {
    #[test]
    fn valuation_matches_division(p in prime(), x in nonzero_frac()) {
        prop_assert_eq!(rat(x, p).vp(), Valuation::Finite(ord_frac(x.0, x.1, p.get())));
    }

    #[test]
    fn valuation_of_products_and_sums(p in prime(), x in nonzero_frac(), y in nonzero_frac()) {
        let (a, b) = (rat(x, p), rat(y, p));
        let (va, vb) = (a.vp().finite().unwrap(), b.vp().finite().unwrap());
        prop_assert_eq!((&a * &b).vp(), Valuation::Finite(va + vb));
        match (&a + &b).vp() {
            Valuation::Infinity => prop_assert_eq!(va, vb),
            Valuation::Finite(v) => {
                prop_assert!(v >= va.min(vb));
                if va != vb {
                    prop_assert_eq!(v, va.min(vb));
                }
            }
        }
    }

    #[test]
    fn rational_literals_round_trip(x in frac()) {
        let r = BigRational::new(BigInt::from(x.0), BigInt::from(x.1));
        prop_assert_eq!(parse_rational(&r.to_string()).unwrap(), r);
    }

    #[test]
    fn pnorm_json_round_trip(v in -50i64..50, d in 1i64..7, zero in any::<bool>()) {
        let n = if zero { PNorm::Zero } else { PNorm::from_exponent(BigRational::new(v.into(), d.into())) };
        let s = serde_json::to_string(&n).unwrap();
        prop_assert_eq!(s.parse::<PNorm>().unwrap(), n);
    }

    #[test]
    fn dp_is_symmetric_and_ultrametric(p in prime(), x in frac(), y in frac(), z in frac()) {
        let (a, b, c) = (rat(x, p), rat(y, p), rat(z, p));
        prop_assert_eq!(dp(&a, &b).unwrap(), dp(&b, &a).unwrap());
        prop_assert!(dp(&a, &c).unwrap() <= dp(&a, &b).unwrap().max(dp(&b, &c).unwrap()));
    }

    #[test]
    fn inverse_and_determinant(p in prime(), e in prop::collection::vec(frac(), 4), f in prop::collection::vec(frac(), 4)) {
        let m = |e: &[(i64, i64)]| {
            PMatrix::from_rows(vec![vec![rat(e[0], p), rat(e[1], p)], vec![rat(e[2], p), rat(e[3], p)]], p).unwrap()
        };
        let (a, b) = (m(&e), m(&f));
        prop_assert_eq!((&a * &b).det(), &a.det() * &b.det());
        if !a.det().is_zero() {
            prop_assert!((&a * &a.inverse().unwrap()).is_identity());
            prop_assert!(&matnorm(&a) * &matnorm(&a.inverse().unwrap()) >= PNorm::one());
        } else {
            prop_assert!(a.inverse().is_err());
        }
    }

    #[test]
    fn heisenberg_group_laws(p in prime(), c in prop::collection::vec(frac(), 9)) {
        let h = |i: usize| HPoint::new(
            padic_gauge::matrix::PVector::new(vec![rat(c[i], p)], p).unwrap(),
            padic_gauge::matrix::PVector::new(vec![rat(c[i + 1], p)], p).unwrap(),
            rat(c[i + 2], p),
        ).unwrap();
        let (u, v, w) = (h(0), h(3), h(6));
        let uv = h_mul(&u, &v).unwrap();
        prop_assert_eq!(h_mul(&uv, &w).unwrap(), h_mul(&u, &h_mul(&v, &w).unwrap()).unwrap());
        prop_assert!(h_mul(&u, &h_inv(&u)).unwrap().is_identity());
        prop_assert!(h_norm(&uv) <= h_norm(&u).max(h_norm(&v)));
    }

    #[test]
    fn affine_laws(p in prime(), a in nonzero_frac(), b in frac(), c in nonzero_frac(), d in frac(), x in frac()) {
        let f = AffineMap::new(rat(a, p), rat(b, p)).unwrap();
        let g = AffineMap::new(rat(c, p), rat(d, p)).unwrap();
        let x = rat(x, p);
        prop_assert_eq!(f.compose(&g).unwrap().apply(&x), f.apply(&g.apply(&x)));
        prop_assert_eq!(f.inverse().unwrap().apply(&f.apply(&x)), x);
        prop_assert_eq!(aff_distance(&f, &g).unwrap(), aff_distance(&g, &f).unwrap());
    }

    #[test]
    fn cell_tree_laws(p in prime(), c in frac(), k in -4i64..5, c2 in frac(), k2 in -4i64..5, a in nonzero_frac(), b in frac()) {
        let (x, y) = (Cell::canonical(&rat(c, p), k), Cell::canonical(&rat(c2, p), k2));
        prop_assert!(x.contains(&rat(c, p)));
        prop_assert!(x.children().iter().all(|ch| ch.parent() == x));
        prop_assert_eq!(rho(&x, &y).unwrap() == 0, x == y);
        let m = meet(&x, &y).unwrap();
        prop_assert_eq!(rho(&x, &y).unwrap(), (x.scale() - m.scale() + y.scale() - m.scale()) as u64);
        let f = AffineMap::new(rat(a, p), rat(b, p)).unwrap();
        prop_assert_eq!(rho(&act(&f, &x).unwrap(), &act(&f, &y).unwrap()).unwrap(), rho(&x, &y).unwrap());
    }

    #[test]
    fn tri_norm_scales_under_dilation(p in prime(), e in prop::collection::vec(frac(), 3), r in frac()) {
        let one = PRational::one(p);
        let z = PRational::zero(p);
        let a = UTMatrix::new(PMatrix::from_rows(vec![
            vec![one.clone(), rat(e[0], p), rat(e[1], p)],
            vec![z.clone(), one.clone(), rat(e[2], p)],
            vec![z.clone(), z, one],
        ], p).unwrap()).unwrap();
        let r = rat(r, p);
        prop_assert_eq!(tri_norm(&dilate(&a, &r)), &pabs(&r) * &tri_norm(&a));
    }
}

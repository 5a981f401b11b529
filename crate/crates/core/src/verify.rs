//! Named property suites. Each suite samples (or enumerates) inputs from a
//! seed and reports every identity it checked, with counts and the first
//! few counterexamples.
//!
//! Two mutants corrupt an operation on purpose so that a suite can be run
//! as a negative control: the Heisenberg product without its bilinear
//! term, and the triangular norm with its maximum replaced by a sum.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::One;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::affine::{aff_distance, aff_l, aff_lprime, aff_norm, default_lprime_cap, lprime_left_metric, AffineMap};
use crate::cells::{self, act, cell_semimetric, is_bounded_cellset, meet, rho, separating_cell, Cell};
use crate::error::{Error, Result};
use crate::finite::{self, brute_group_axioms, Budget, GroupSpec, ProductRule};
use crate::gauge::{check_axioms, check_gauge, check_invariance, AxiomReport, AxiomResult, Gauge, Group, Semimetric};
use crate::heisenberg::{self as heis, h_conjugate, h_dilate, h_inv, h_norm, h_norm_tilde, HPoint};
use crate::matrix::{self, gl_gauge, gl_gauge_capped, gl_log_gauge, in_gl_zp, matnorm, vecnorm, PMatrix};
use crate::padic::{default_cap, dp, dp_log, dp_prime, pabs, rp, rp_capped, PNorm, PRational, Prime};
use crate::sample;
use crate::triangular::{
    combined_left_metric, diag_semimetric, dilate, factor_diagonal_unipotent, grade_component, nilpotent_inverse,
    tplus_inverse, tri_norm, UTMatrix,
};
use crate::value::{cmp_sums, Value};

const MAX_WITNESSES: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    UltrametricAxioms,
    NormMultiplicativity,
    MatrixNorm,
    GlGauges,
    TriNorm,
    Heisenberg,
    Affine,
    Cells,
    HaarScaling,
    FiniteGroups,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::UltrametricAxioms,
        Suite::NormMultiplicativity,
        Suite::MatrixNorm,
        Suite::GlGauges,
        Suite::TriNorm,
        Suite::Heisenberg,
        Suite::Affine,
        Suite::Cells,
        Suite::HaarScaling,
        Suite::FiniteGroups,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::UltrametricAxioms => "ultrametric-axioms",
            Suite::NormMultiplicativity => "norm-multiplicativity",
            Suite::MatrixNorm => "matrix-norm",
            Suite::GlGauges => "gl-gauges",
            Suite::TriNorm => "tri-norm",
            Suite::Heisenberg => "heisenberg",
            Suite::Affine => "affine",
            Suite::Cells => "cells",
            Suite::HaarScaling => "haar-scaling",
            Suite::FiniteGroups => "finite-groups",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Suite> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown suite {s:?}")))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mutant {
    /// `h_mul` without the `Σ x_j y'_j` term.
    DroppedTwist,
    /// `tri_norm` as `Σ |a_jk|^(1/(k−j))` instead of the maximum.
    SumTriNorm,
}

impl Mutant {
    pub fn name(self) -> &'static str {
        match self {
            Mutant::DroppedTwist => "dropped-twist",
            Mutant::SumTriNorm => "sum-tri-norm",
        }
    }

    fn applies_to(self, suite: Suite) -> bool {
        match self {
            Mutant::DroppedTwist => matches!(suite, Suite::Heisenberg | Suite::FiniteGroups),
            Mutant::SumTriNorm => suite == Suite::TriNorm,
        }
    }
}

impl FromStr for Mutant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Mutant> {
        [Mutant::DroppedTwist, Mutant::SumTriNorm]
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown mutant {s:?}")))
    }
}

#[derive(Clone, Debug)]
pub struct Params {
    pub p: Prime,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    /// Ball exponent for the Haar-scaling suite.
    pub l: u32,
    /// Quotient precision; suites choose their own when absent.
    pub m: Option<u32>,
    pub budget: Budget,
    pub mutant: Option<Mutant>,
}

impl Params {
    pub fn new(p: Prime) -> Self {
        Params { p, n: 2, samples: 1000, seed: 0, l: 1, m: None, budget: Budget::default(), mutant: None }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub checked: u64,
    pub failed: u64,
    pub witnesses: Vec<String>,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.failed == 0
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub p: Prime,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub mutant: Option<Mutant>,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    pub details: Vec<serde_json::Value>,
}

impl SuiteReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }

    pub fn render(&self) -> String {
        let mut out =
            format!("suite {} (p={}, n={}, samples={}, seed={}", self.suite, self.p, self.n, self.samples, self.seed);
        if let Some(m) = self.mutant {
            out.push_str(&format!(", mutant={}", m.name()));
        }
        out.push_str(")\n");
        for c in &self.checks {
            let status = if c.passed() { "PASS" } else { "FAIL" };
            out.push_str(&format!("  {status} {} ({} checked, {} failed)\n", c.name, c.checked, c.failed));
            for w in &c.witnesses {
                out.push_str(&format!("    witness: {w}\n"));
            }
        }
        for n in &self.notes {
            out.push_str(&format!("  note: {n}\n"));
        }
        out.push_str(if self.passed { "result: PASS\n" } else { "result: FAIL\n" });
        out
    }
}

#[derive(Default)]
struct Checks {
    list: Vec<Check>,
    notes: Vec<String>,
    details: Vec<serde_json::Value>,
}

impl Checks {
    fn entry(&mut self, name: &str) -> &mut Check {
        let i = match self.list.iter().position(|c| c.name == name) {
            Some(i) => i,
            None => {
                self.list.push(Check { name: name.to_string(), checked: 0, failed: 0, witnesses: Vec::new() });
                self.list.len() - 1
            }
        };
        &mut self.list[i]
    }

    fn check(&mut self, name: &str, ok: bool, witness: impl FnOnce() -> String) {
        let c = self.entry(name);
        c.checked += 1;
        if !ok {
            c.failed += 1;
            if c.witnesses.len() < MAX_WITNESSES {
                c.witnesses.push(witness());
            }
        }
    }

    /// Records a fallible check; an error counts as a failure.
    fn check_result(&mut self, name: &str, res: Result<bool>, witness: impl FnOnce() -> String) {
        match res {
            Ok(ok) => self.check(name, ok, witness),
            Err(e) => self.check(name, false, || format!("{} ({e})", witness())),
        }
    }

    fn axiom(&mut self, name: &str, r: &AxiomResult) {
        let c = self.entry(name);
        c.checked += r.samples as u64;
        c.failed += r.failures as u64;
        for v in r.violations.iter().take(MAX_WITNESSES.saturating_sub(c.witnesses.len())) {
            let z = v.z.as_deref().map(|z| format!(", z={z}")).unwrap_or_default();
            c.witnesses.push(format!("x={}, y={}{z}: {} vs {}", v.x, v.y, v.lhs, v.rhs));
        }
    }

    fn axioms(&mut self, prefix: &str, report: &AxiomReport, names: &[&str]) {
        for n in names {
            self.axiom(&format!("{prefix} {n}"), report.axiom(n));
        }
    }

    fn finish(self, suite: Suite, params: &Params) -> SuiteReport {
        let passed = self.list.iter().all(Check::passed);
        SuiteReport {
            suite: suite.name(),
            p: params.p,
            n: params.n,
            samples: params.samples,
            seed: params.seed,
            mutant: params.mutant,
            passed,
            checks: self.list,
            notes: self.notes,
            details: self.details,
        }
    }
}

const ALL_AXIOMS: [&str; 6] = ["evaluation", "self-distance", "symmetry", "triangle", "ultrametric", "separation"];
const SEMIMETRIC_AXIOMS: [&str; 4] = ["evaluation", "self-distance", "symmetry", "triangle"];

pub fn run_suite(suite: Suite, params: &Params) -> Result<SuiteReport> {
    if let Some(m) = params.mutant {
        if !m.applies_to(suite) {
            return Err(Error::InvalidArgument(format!("mutant {} does not apply to suite {suite}", m.name())));
        }
    }
    if params.n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let mut c = Checks::default();
    match suite {
        Suite::UltrametricAxioms => ultrametric_axioms(&mut c, params),
        Suite::NormMultiplicativity => norm_multiplicativity(&mut c, params),
        Suite::MatrixNorm => matrix_norm(&mut c, params),
        Suite::GlGauges => gl_gauges(&mut c, params),
        Suite::TriNorm => triangular_norm(&mut c, params),
        Suite::Heisenberg => heisenberg(&mut c, params)?,
        Suite::Affine => affine(&mut c, params),
        Suite::Cells => cells_suite(&mut c, params)?,
        Suite::HaarScaling => haar_scaling(&mut c, params)?,
        Suite::FiniteGroups => finite_groups(&mut c, params)?,
    }
    Ok(c.finish(suite, params))
}

fn rng(params: &Params, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(params.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(stream))
}

fn ultrametric_axioms(c: &mut Checks, params: &Params) {
    let p = params.p;
    let d = Semimetric::new(true, move |x: &PRational, y: &PRational| Ok(dp(x, y)?.to_value(p)));
    let r = check_axioms(&d, |g| sample::rational(g, p), params.samples, params.seed);
    c.axioms("d_p", &r, &ALL_AXIOMS);

    let t = default_cap(p);
    let d = Semimetric::new(true, move |x: &PRational, y: &PRational| Ok(dp_prime(x, y, &t)?.to_value(p)));
    let r = check_axioms(&d, |g| sample::nonzero_rational(g, p), params.samples, params.seed.wrapping_add(1));
    c.axioms("d_p'", &r, &ALL_AXIOMS);

    let d = Semimetric::new(false, |x: &PRational, y: &PRational| Ok(Value::int(dp_log(x, y)?)));
    let r = check_axioms(&d, |g| sample::nonzero_rational(g, p), params.samples, params.seed.wrapping_add(2));
    c.axioms("d_log", &r, &SEMIMETRIC_AXIOMS);
}

/// `Q_p^*` under multiplication.
#[derive(Clone, Copy)]
struct Multiplicative(Prime);

impl Group for Multiplicative {
    type Elem = PRational;
    fn identity(&self) -> PRational {
        PRational::one(self.0)
    }
    fn mul(&self, a: &PRational, b: &PRational) -> PRational {
        a * b
    }
    fn inv(&self, a: &PRational) -> PRational {
        a.inv().expect("nonzero")
    }
}

fn norm_multiplicativity(c: &mut Checks, params: &Params) {
    let p = params.p;
    let mut g = rng(params, 0);
    for _ in 0..params.samples {
        let x = sample::rational(&mut g, p);
        let y = sample::rational(&mut g, p);
        let z = sample::nonzero_rational(&mut g, p);
        let w = || format!("x={x}, y={y}");
        c.check("|xy| = |x||y|", pabs(&(&x * &y)) == &pabs(&x) * &pabs(&y), w);
        c.check("|x+y| <= max(|x|, |y|)", pabs(&(&x + &y)) <= pabs(&x).max(pabs(&y)), w);
        c.check("|x| = 0 iff x = 0", pabs(&x).is_zero() == x.is_zero(), || format!("x={x}"));
        c.check("|-x| = |x|", pabs(&-&x) == pabs(&x), || format!("x={x}"));
        c.check("|1/z| |z| = 1", &pabs(&z.inv().unwrap()) * &pabs(&z) == PNorm::one(), || format!("z={z}"));
        c.check("rp(1/z) = rp(z)", rp(&z.inv().unwrap()).ok() == rp(&z).ok(), || format!("z={z}"));
        let (u, v) = (sample::unit(&mut g, p), sample::unit(&mut g, p));
        c.check_result(
            "rp(uv) <= max(rp(u), rp(v)) on units",
            (|| Ok(rp(&(&u * &v))? <= rp(&u)?.max(rp(&v)?)))(),
            || format!("u={u}, v={v}"),
        );
        if !x.is_zero() && !y.is_zero() {
            let (x1, y1) = (PRational::one(p), &x * &y);
            c.check_result(
                "dp_log(xy, 1) <= dp_log(x, 1) + dp_log(y, 1)",
                (|| Ok(dp_log(&y1, &x1)? <= dp_log(&x, &x1)? + dp_log(&y, &x1)?))(),
                w,
            );
        }
        let t = default_cap(p);
        let (a, b) = (sample::nonzero_rational(&mut g, p), sample::nonzero_rational(&mut g, p));
        c.check_result(
            "dp'(za, zb) = dp'(a, b)",
            (|| Ok(dp_prime(&(&z * &a), &(&z * &b), &t)? == dp_prime(&a, &b, &t)?))(),
            || format!("z={z}, a={a}, b={b}"),
        );
    }
    let gp = Multiplicative(p);
    let units = Gauge::new(true, move |x: &PRational| Ok(rp(x)?.to_value(p)));
    for r in check_gauge(&gp, &units, |g| sample::unit(g, p), params.samples, params.seed.wrapping_add(1)) {
        c.axiom(&format!("rp on units {}", r.axiom), &r);
    }
    for t in [BigRational::one(), default_cap(p)] {
        let capped = Gauge::new(true, move |x: &PRational| Ok(rp_capped(x, &t)?.to_value(p)));
        for r in
            check_gauge(&gp, &capped, |g| sample::nonzero_rational(g, p), params.samples, params.seed.wrapping_add(2))
        {
            c.axiom(&format!("rp' on Q_p^* {}", r.axiom), &r);
        }
    }
}

fn matrix_norm(c: &mut Checks, params: &Params) {
    let (p, n) = (params.p, params.n);
    let mut g = rng(params, 0);
    for _ in 0..params.samples {
        let a = sample::matrix(&mut g, n, p);
        let b = sample::matrix(&mut g, n, p);
        let v = sample::vector(&mut g, n, p);
        let cz = sample::gl_zp(&mut g, n, p);
        let w = || format!("A={a}, B={b}");
        c.check("||AB|| <= ||A|| ||B||", matnorm(&(&a * &b)) <= &matnorm(&a) * &matnorm(&b), w);
        c.check("||A+B|| <= max(||A||, ||B||)", matnorm(&(&a + &b)) <= matnorm(&a).max(matnorm(&b)), w);
        c.check("||Av|| <= ||A|| ||v||", vecnorm(&a.apply(&v).unwrap()) <= &matnorm(&a) * &vecnorm(&v), || {
            format!("A={a}, v={v}")
        });
        let wc = || format!("A={a}, C={cz}");
        c.check("||AC|| = ||A|| for C in GL(n, Z_p)", matnorm(&(&a * &cz)) == matnorm(&a), wc);
        c.check("||CA|| = ||A|| for C in GL(n, Z_p)", matnorm(&(&cz * &a)) == matnorm(&a), wc);
        let ci = cz.inverse();
        c.check("C^-1 in GL(n, Z_p)", ci.as_ref().is_ok_and(in_gl_zp), || format!("C={cz}"));
        let inv = sample::invertible(&mut g, n, p);
        match inv.inverse() {
            Ok(ai) => {
                c.check("A A^-1 = I", (&inv * &ai).is_identity(), || format!("A={inv}"));
                c.check("1 <= ||A|| ||A^-1||", PNorm::one() <= &matnorm(&inv) * &matnorm(&ai), || format!("A={inv}"));
            }
            Err(e) => c.check("A A^-1 = I", false, || format!("A={inv} ({e})")),
        }
    }
}

fn gl_gauges(c: &mut Checks, params: &Params) {
    let (p, n) = (params.p, params.n);
    let mut g = rng(params, 0);
    let caps = [BigRational::one(), default_cap(p)];
    let pnorm = PNorm::from_int_exponent(-1);
    for _ in 0..params.samples {
        let a = sample::invertible(&mut g, n, p);
        let b = sample::invertible(&mut g, n, p);
        let x = sample::gl_zp(&mut g, n, p);
        let y = sample::gl_zp(&mut g, n, p);
        let w = || format!("A={a}");
        c.check_result("r(A^-1) = r(A)", (|| Ok(gl_gauge(&a.inverse()?)? == gl_gauge(&a)?))(), w);
        c.check_result(
            "r(A) <= 1 iff A in GL(n, Z_p), else r(A) >= p",
            (|| {
                let r = gl_gauge(&a)?;
                Ok(if in_gl_zp(&a) { r <= PNorm::one() } else { r >= pnorm })
            })(),
            w,
        );
        c.check_result(
            "r(X) = ||X - I|| on GL(n, Z_p)",
            (|| Ok(gl_gauge(&x)? == matnorm(&(&x - &PMatrix::identity(n, p)))))(),
            || format!("X={x}"),
        );
        c.check_result(
            "r(XY) <= max(r(X), r(Y)) on GL(n, Z_p)",
            (|| Ok(gl_gauge(&(&x * &y))? <= gl_gauge(&x)?.max(gl_gauge(&y)?)))(),
            || format!("X={x}, Y={y}"),
        );
        for t in &caps {
            let rc = |m: &PMatrix| gl_gauge_capped(m, t).map(|v| v.to_value(p));
            for (u, v, label) in [(&a, &b, "GL(n, Q_p)"), (&x, &y, "GL(n, Z_p)")] {
                c.check_result(
                    &format!("r'(AB) <= max(r'(A), r'(B)) on {label}, t={t}"),
                    (|| Ok(rc(&(u * v))? <= rc(u)?.max(rc(v)?)))(),
                    || format!("A={u}, B={v}"),
                );
            }
            c.check_result(
                &format!("r'(Y^-1 X) = ||X - Y|| on GL(n, Z_p), t={t}"),
                (|| Ok(rc(&(&y.inverse()? * &x))? == matnorm(&(&x - &y)).to_value(p)))(),
                || format!("X={x}, Y={y}"),
            );
        }
        c.check_result(
            "r''(AB) <= r''(A) + r''(B)",
            (|| Ok(gl_log_gauge(&(&a * &b))? <= gl_log_gauge(&a)? + gl_log_gauge(&b)?))(),
            || format!("A={a}, B={b}"),
        );
        for m in [&a, &x] {
            c.check_result("r''(A) = 0 iff A in GL(n, Z_p)", gl_log_gauge(m).map(|r| (r == 0) == in_gl_zp(m)), || {
                format!("A={m}")
            });
        }
        let e = sample::gl_j(&mut g, n, 1, p);
        c.check_result(
            "GL_1(n, Z_p) elements have r <= p^-1",
            (|| Ok(matrix::in_gl_j(&e, 1)? && gl_gauge(&e)? <= PNorm::from_int_exponent(1)))(),
            || format!("A={e}"),
        );
    }
}

/// The triangular norm under test: the true maximum, or the sum mutant.
#[derive(Clone, Copy)]
enum TriEval {
    Max,
    Sum,
}

impl TriEval {
    fn terms(self, a: &UTMatrix) -> Vec<PNorm> {
        match self {
            TriEval::Max => vec![tri_norm(a)],
            TriEval::Sum => {
                let n = a.n();
                let mut out = Vec::new();
                for j in 0..n {
                    for k in j + 1..n {
                        out.push(match pabs(a.get(j, k)) {
                            PNorm::Zero => PNorm::Zero,
                            e => e.pow(&BigRational::new(1.into(), ((k - j) as i64).into())),
                        });
                    }
                }
                out
            }
        }
    }
}

fn values(ts: &[PNorm], p: Prime) -> Vec<Value> {
    ts.iter().map(|t| t.to_value(p)).collect()
}

fn show_terms(ts: &[PNorm], p: Prime) -> String {
    let s: Vec<String> = ts.iter().map(|t| t.display(p)).collect();
    s.join(" + ")
}

/// `Σ lhs ≤ Σ rhs`, treating an undecidable tie as satisfied.
fn sums_le(lhs: &[PNorm], rhs: &[PNorm], p: Prime) -> bool {
    cmp_sums(&values(lhs, p), &values(rhs, p)) != Some(Ordering::Greater)
}

fn sums_eq(lhs: &[PNorm], rhs: &[PNorm], p: Prime) -> bool {
    matches!(cmp_sums(&values(lhs, p), &values(rhs, p)), Some(Ordering::Equal) | None)
}

fn triangular_norm(c: &mut Checks, params: &Params) {
    let (p, n) = (params.p, params.n);
    let eval = if params.mutant == Some(Mutant::SumTriNorm) { TriEval::Sum } else { TriEval::Max };
    let nn = |a: &UTMatrix| eval.terms(a);
    let mut g = rng(params, 0);
    let id = PMatrix::identity(n, p);
    for _ in 0..params.samples {
        let a = sample::upper_integral_diagonal(&mut g, n, p);
        let a2 = sample::upper_integral_diagonal(&mut g, n, p);
        let (na, na2) = (nn(&a), nn(&a2));
        let w = || format!("A={a}, A'={a2}");
        let nprod = nn(&a.mul(&a2).unwrap());
        c.check("N(AA') <= max(N(A), N(A'))", sums_le(&nprod, &na, p) || sums_le(&nprod, &na2, p), || {
            format!("{}: {} vs {} / {}", w(), show_terms(&nprod, p), show_terms(&na, p), show_terms(&na2, p))
        });
        let nsum = nn(&a.add(&a2).unwrap());
        c.check("N(A+A') <= max(N(A), N(A'))", sums_le(&nsum, &na, p) || sums_le(&nsum, &na2, p), w);
        c.check("N(A) = 0 iff A diagonal", na.iter().all(PNorm::is_zero) == a.is_diagonal(), || format!("A={a}"));

        let r = sample::rational(&mut g, p);
        let scaled: Vec<PNorm> = na.iter().map(|t| &pabs(&r) * t).collect();
        let nd = nn(&dilate(&a, &r));
        c.check("N(d_r A) = |r| N(A)", sums_eq(&nd, &scaled, p), || format!("A={a}, r={r}"));
        let s = sample::rational(&mut g, p);
        c.check(
            "d_r(AA') = d_r(A) d_r(A')",
            dilate(&a.mul(&a2).unwrap(), &r) == dilate(&a, &r).mul(&dilate(&a2, &r)).unwrap(),
            w,
        );
        c.check("d_r d_s = d_rs", dilate(&dilate(&a, &s), &r) == dilate(&a, &(&r * &s)), || {
            format!("A={a}, r={r}, s={s}")
        });
        if n >= 2 {
            let ok = (0..n).all(|l| {
                (0..n).all(|l2| {
                    let prod = grade_component(&a, l).unwrap().mul(&grade_component(&a2, l2).unwrap()).unwrap();
                    if l + l2 < n {
                        grade_component(&prod, l + l2).unwrap() == prod
                    } else {
                        prod.matrix().is_zero()
                    }
                })
            });
            c.check("grade(A, l) grade(A', l') in grade l+l'", ok, w);
        }

        let u = sample::tplus(&mut g, n, p);
        match tplus_inverse(&u) {
            Ok(ui) => {
                c.check("U U^-1 = I on T+", u.mul(&ui).unwrap().matrix().is_identity(), || format!("U={u}"));
                let (nu, nui) = (nn(&u), nn(&ui));
                c.check("N(U^-1) = N(U) on T+", sums_eq(&nui, &nu, p), || {
                    format!("U={u}: {} vs {}", show_terms(&nui, p), show_terms(&nu, p))
                });
            }
            Err(e) => c.check("U U^-1 = I on T+", false, || format!("U={u} ({e})")),
        }

        let b = sample::strict_upper(&mut g, n, p);
        match nilpotent_inverse(&b) {
            Ok(sum) => {
                c.check("(I - B) sum B^l = I", (&(&id - b.matrix()) * sum.matrix()).is_identity(), || format!("B={b}"))
            }
            Err(e) => c.check("(I - B) sum B^l = I", false, || format!("B={b} ({e})")),
        }
        let nb = nn(&b);
        let mut power = b.clone();
        for l in 1..n {
            c.check("N(B^l) <= N(B)", sums_le(&nn(&power), &nb, p), || format!("B={b}, l={l}"));
            power = power.mul(&b).unwrap();
        }
        c.check("B^n = 0", power.matrix().is_zero() || n == 0, || format!("B={b}"));

        let t = sample::ttilde(&mut g, n, p);
        let t2 = sample::ttilde(&mut g, n, p);
        let h = sample::ttilde(&mut g, n, p);
        let wt = || format!("A={t}, A'={t2}, G={h}");
        let (d, un) = factor_diagonal_unipotent(&t).unwrap();
        c.check("A = D U factorisation on T~", d.mul(&un).unwrap() == t && un.is_unit_diagonal(), || format!("A={t}"));
        let left = |x: &UTMatrix, y: &UTMatrix| nn(&y.inverse().unwrap().mul(x).unwrap());
        let right = |x: &UTMatrix, y: &UTMatrix| nn(&x.mul(&y.inverse().unwrap()).unwrap());
        let (ht, ht2) = (h.mul(&t).unwrap(), h.mul(&t2).unwrap());
        let (th, t2h) = (t.mul(&h).unwrap(), t2.mul(&h).unwrap());
        c.check("left metric invariance on T~", sums_eq(&left(&ht, &ht2), &left(&t, &t2), p), wt);
        c.check("right metric invariance on T~", sums_eq(&right(&th, &t2h), &right(&t, &t2), p), wt);
        let t3 = sample::ttilde(&mut g, n, p);
        let (l12, l23, l13) = (left(&t, &t2), left(&t2, &t3), left(&t, &t3));
        c.check("left metric strong triangle on T~", sums_le(&l13, &l12, p) || sums_le(&l13, &l23, p), || {
            format!("A={t}, A'={t2}, A''={t3}")
        });
        c.check_result(
            "D bi-invariant on T~",
            (|| {
                let base = diag_semimetric(&t, &t2)?;
                Ok(diag_semimetric(&ht, &ht2)? == base && diag_semimetric(&th, &t2h)? == base)
            })(),
            wt,
        );
        c.check_result(
            "max(N, D) vanishes only on the diagonal",
            combined_left_metric(&t, &t2).map(|v| v.is_zero() == (t == t2)),
            wt,
        );
    }
}

type HMul = fn(&HPoint, &HPoint) -> HPoint;

fn standard_mul(u: &HPoint, v: &HPoint) -> HPoint {
    heis::h_mul(u, v).expect("same arity")
}

/// The negative control: `(x + x', y + y', t + t')`.
pub fn dropped_twist_mul(u: &HPoint, v: &HPoint) -> HPoint {
    HPoint::new(u.x() + v.x(), u.y() + v.y(), u.t() + v.t()).expect("same arity")
}

fn heisenberg(c: &mut Checks, params: &Params) -> Result<()> {
    let (p, n) = (params.p, params.n);
    let mutant = params.mutant == Some(Mutant::DroppedTwist);
    let mul: HMul = if mutant { dropped_twist_mul } else { standard_mul };
    let inv = h_inv;
    let e = HPoint::identity(n, p);
    let mut g = rng(params, 0);
    let two = BigRational::from_integer(2.into());
    for _ in 0..params.samples {
        let u = sample::hpoint(&mut g, n, p);
        let v = sample::hpoint(&mut g, n, p);
        let w = sample::hpoint(&mut g, n, p);
        let r = sample::rational(&mut g, p);
        let s = sample::rational(&mut g, p);
        let uv = mul(&u, &v);
        let wuv = || format!("u={u}, v={v}");
        c.check("identity", mul(&e, &u) == u && mul(&u, &e) == u, || format!("u={u}"));
        c.check("associativity", mul(&uv, &w) == mul(&u, &mul(&v, &w)), || format!("u={u}, v={v}, w={w}"));
        c.check("u h_inv(u) = e", mul(&u, &inv(&u)).is_identity() && mul(&inv(&u), &u).is_identity(), || {
            format!("u={u}, u h_inv(u)={}", mul(&u, &inv(&u)))
        });
        c.check("h_inv(h_inv(u)) = u", inv(&inv(&u)) == u, || format!("u={u}"));
        let closed = h_conjugate(&u, &v)?;
        let composed = mul(&mul(&u, &v), &inv(&u));
        c.check("closed-form conjugation = composed", closed == composed, || {
            format!("g={u}, u={v}: closed {closed}, composed {composed}")
        });
        let center =
            HPoint::new(crate::matrix::PVector::zero(n, p), crate::matrix::PVector::zero(n, p), w.t().clone())?;
        c.check("center is fixed by conjugation", h_conjugate(&u, &center)? == center, || {
            format!("g={u}, t={}", w.t())
        });
        c.check("d_r(uv) = d_r(u) d_r(v)", h_dilate(&uv, &r) == mul(&h_dilate(&u, &r), &h_dilate(&v, &r)), || {
            format!("{}, r={r}", wuv())
        });
        c.check("d_r d_s = d_rs", h_dilate(&h_dilate(&u, &s), &r) == h_dilate(&u, &(&r * &s)), || {
            format!("u={u}, r={r}, s={s}")
        });
        c.check("N(d_r u) = |r| N(u)", h_norm(&h_dilate(&u, &r)) == &pabs(&r) * &h_norm(&u), || {
            format!("u={u}, r={r}")
        });
        c.check("N(uv) <= max(N(u), N(v))", h_norm(&uv) <= h_norm(&u).max(h_norm(&v)), wuv);
        c.check("N(h_inv(u)) = N(u)", h_norm(&inv(&u)) == h_norm(&u), || format!("u={u}"));
        let left = |a: &HPoint, b: &HPoint| h_norm(&mul(&inv(b), a));
        let right = |a: &HPoint, b: &HPoint| h_norm(&mul(a, &inv(b)));
        c.check("left metric invariance", left(&mul(&w, &u), &mul(&w, &v)) == left(&u, &v), || {
            format!("{}, g={w}", wuv())
        });
        c.check("right metric invariance", right(&mul(&u, &w), &mul(&v, &w)) == right(&u, &v), || {
            format!("{}, g={w}", wuv())
        });
        c.check("left metric strong triangle", left(&u, &w) <= left(&u, &v).max(left(&v, &w)), || {
            format!("{}, w={w}", wuv())
        });
        let ok = heis::embed_to_triangular(&uv) == heis::embed_to_triangular(&u).mul(&heis::embed_to_triangular(&v))?;
        c.check("embedding is a homomorphism", ok, wuv);
        if n == 1 {
            c.check("N(embed(u)) = N(u) for n = 1", tri_norm(&heis::embed_to_triangular(&u)) == h_norm(&u), || {
                format!("u={u}")
            });
        }
        for k in [-1i64, 0, 1, 2] {
            let member = heis::h_subgroup_member(&u, k, 2 * k)?;
            c.check(
                "ball N <= p^-k equals the (k, 2k) subgroup",
                member == (h_norm(&u) <= PNorm::from_int_exponent(k)),
                || format!("u={u}, k={k}"),
            );
        }

        let a = sample::integral_hpoint(&mut g, n, p);
        let b = sample::integral_hpoint(&mut g, n, p);
        let (na, nt) = (h_norm(&a), h_norm_tilde(&a));
        let sq = if na.is_zero() { PNorm::Zero } else { na.pow(&two) };
        c.check("N^2 <= N~ <= N on integral points", sq <= nt && nt <= na, || format!("u={a}"));
        c.check(
            "N~ conjugation-invariant on integral points",
            h_norm_tilde(&mul(&mul(&b, &a), &inv(&b))) == nt,
            || format!("g={b}, u={a}"),
        );
        c.check(
            "N~ left = right on integral points",
            h_norm_tilde(&mul(&inv(&b), &a)) == h_norm_tilde(&mul(&a, &inv(&b))),
            || format!("u={a}, u'={b}"),
        );
    }
    let m = params.m.unwrap_or(2);
    let rule = if mutant { ProductRule::DroppedTwist } else { ProductRule::Standard };
    match brute_group_axioms(&GroupSpec::Heisenberg { n }, p, m, rule, &params.budget, params.seed) {
        Ok(report) => record_group_report(c, &report),
        Err(Error::BudgetExceeded { needed, budget }) => {
            c.notes.push(format!("finite model H_{n}(Z/{p}^{m}) skipped: {needed} elements over budget {budget}"))
        }
        Err(e) => return Err(e),
    }
    Ok(())
}

fn mode_name(m: finite::Mode) -> String {
    serde_json::to_value(m).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default()
}

fn record_group_report(c: &mut Checks, report: &finite::GroupReport) {
    for a in &report.axioms {
        let name = format!("{} over Z/{}^{} {}", report.spec, report.p, report.m, a.axiom);
        let entry = c.entry(&name);
        entry.checked += a.checked;
        entry.failed += a.failed;
        for v in report.violations.iter().filter(|v| v.axiom == a.axiom).take(MAX_WITNESSES) {
            entry.witnesses.push(v.elements.join(", "));
        }
    }
    c.notes.push(format!(
        "{} over Z/{}^{}: {} elements, {} associativity ({} triples)",
        report.spec,
        report.p,
        report.m,
        report.elements,
        mode_name(report.mode),
        report.budget_used.triples
    ));
    c.details.push(serde_json::to_value(report).expect("serialisable"));
}

fn affine(c: &mut Checks, params: &Params) {
    let p = params.p;
    let mut g = rng(params, 0);
    let one = default_lprime_cap();
    let id = AffineMap::identity(p);
    for _ in 0..params.samples {
        let f = sample::affine(&mut g, p);
        let h = sample::affine(&mut g, p);
        let k = sample::affine_any(&mut g, p);
        let x = sample::rational(&mut g, p);
        let y = sample::rational(&mut g, p);
        let alpha = sample::affine_unit_slope(&mut g, p);
        let beta = sample::affine_zp_star(&mut g, p);
        let (fs, gs) = (sample::affine_zp_star(&mut g, p), sample::affine_zp_star(&mut g, p));
        let w = || format!("f={f}, g={h}");
        c.check(
            "composition associative",
            f.compose(&h).unwrap().compose(&k).unwrap() == f.compose(&h.compose(&k).unwrap()).unwrap(),
            || format!("f={f}, g={h}, h={k}"),
        );
        c.check("(f g)(x) = f(g(x))", f.compose(&h).unwrap().apply(&x) == f.apply(&h.apply(&x)), || {
            format!("{}, x={x}", w())
        });
        c.check(
            "f f^-1 = identity",
            f.inverse().is_ok_and(|fi| f.compose(&fi).unwrap() == id && fi.compose(&f).unwrap() == id),
            || format!("f={f}"),
        );
        c.check(
            "matrix(f g) = matrix(f) matrix(g)",
            f.compose(&h).unwrap().to_matrix() == f.to_matrix().mul(&h.to_matrix()).unwrap(),
            w,
        );
        c.check(
            "||matrix(f)|| = max(||f||, 1)",
            matnorm(k.to_matrix().matrix()) == aff_norm(&k).max(PNorm::one()),
            || format!("f={k}"),
        );
        let d = matnorm(f.to_matrix().sub(&h.to_matrix()).unwrap().matrix());
        c.check("||matrix(f) - matrix(g)|| = ||f - g||", d == aff_distance(&f, &h).unwrap(), w);
        let z = PRational::zero(p);
        let o = PRational::one(p);
        c.check("||f|| = max(|f(0)|, |f(1)|)", aff_norm(&k) == pabs(&k.apply(&z)).max(pabs(&k.apply(&o))), || {
            format!("f={k}")
        });
        let xi = sample::integral(&mut g, p);
        c.check("|f(x)| <= ||f|| on Z_p", pabs(&k.apply(&xi)) <= aff_norm(&k), || format!("f={k}, x={xi}"));
        c.check(
            "coefficients recovered from f(0), f(1)",
            AffineMap::recover_from_values(&k.apply(&z), &k.apply(&o)).is_ok_and(|r| r == k),
            || format!("f={k}"),
        );
        c.check(
            "A(U_p, Q_p) acts by isometries",
            pabs(&(&alpha.apply(&x) - &alpha.apply(&y))) == pabs(&(&x - &y)),
            || format!("alpha={alpha}, x={x}, y={y}"),
        );
        let base = aff_distance(&f, &h).unwrap();
        c.check(
            "||a f - a g|| = ||f - g|| for a in A(U_p, Q_p)",
            aff_distance(&alpha.compose(&f).unwrap(), &alpha.compose(&h).unwrap()).unwrap() == base,
            || format!("{}, alpha={alpha}", w()),
        );
        c.check(
            "||f b - g b|| = ||f - g|| for b in A*(Z_p)",
            aff_distance(&f.compose(&beta).unwrap(), &h.compose(&beta).unwrap()).unwrap() == base,
            || format!("{}, beta={beta}", w()),
        );
        match (lprime_left_metric(&fs, &gs, &one), aff_distance(&fs, &gs)) {
            (Ok(l), Ok(dd)) => c.check("L'(g^-1 f) = ||f - g|| on A*(Z_p)", l.to_value(p) == dd.to_value(p), || {
                format!("f={fs}, g={gs}")
            }),
            (l, dd) => c.check("L'(g^-1 f) = ||f - g|| on A*(Z_p)", false, || format!("f={fs}, g={gs}: {l:?} {dd:?}")),
        }
        let u = sample::affine_unit_slope(&mut g, p);
        let v = sample::affine_unit_slope(&mut g, p);
        c.check_result("L(f^-1) = L(f)", (|| Ok(aff_l(&u.inverse()?)? == aff_l(&u)?))(), || format!("f={u}"));
        c.check_result(
            "L(fg) <= max(L(f), L(g))",
            (|| Ok(aff_l(&u.compose(&v)?)? <= aff_l(&u)?.max(aff_l(&v)?)))(),
            || format!("f={u}, g={v}"),
        );
        for t in [one.clone(), default_cap(p)] {
            let lp = |m: &AffineMap| aff_lprime(m, &t).map(|c| c.to_value(p));
            c.check_result(&format!("L'(f^-1) = L'(f), t={t}"), (|| Ok(lp(&f.inverse()?)? == lp(&f)?))(), || {
                format!("f={f}")
            });
            c.check_result(
                &format!("L'(fg) <= max(L'(f), L'(g)), t={t}"),
                (|| Ok(lp(&f.compose(&h)?)? <= lp(&f)?.max(lp(&h)?)))(),
                w,
            );
        }
    }
    let d = Semimetric::new(true, move |f: &AffineMap, g: &AffineMap| {
        Ok(lprime_left_metric(f, g, &default_lprime_cap())?.to_value(p))
    });
    let r = check_axioms(&d, |g| sample::affine(g, p), params.samples, params.seed.wrapping_add(1));
    c.axioms("L'(g^-1 f)", &r, &ALL_AXIOMS);
    let inv = check_invariance(
        &d,
        |h: &AffineMap, f: &AffineMap| h.compose(f).unwrap(),
        |g| sample::affine(g, p),
        |g| sample::affine(g, p),
        params.samples,
        params.seed.wrapping_add(2),
    );
    c.axiom("L'(g^-1 f) left invariance", &inv);
}

fn cells_suite(c: &mut Checks, params: &Params) -> Result<()> {
    let p = params.p;
    let d = Semimetric::new(false, |a: &Cell, b: &Cell| Ok(Value::int(rho(a, b)?)));
    let r = check_axioms(&d, |g| sample::cell(g, p), params.samples, params.seed);
    c.axioms("rho", &r, &["evaluation", "self-distance", "symmetry", "triangle", "separation"]);
    let inv = check_invariance(
        &d,
        |f: &AffineMap, x: &Cell| act(f, x).unwrap(),
        |g| sample::affine(g, p),
        |g| sample::cell(g, p),
        params.samples,
        params.seed.wrapping_add(1),
    );
    c.axiom("rho invariance under f", &inv);

    let depth = 4;
    let (nodes, _) =
        cells::tree_nodes(&Cell::unit_ball(p), depth, params.budget.elements.max(cells::DEFAULT_NODE_LIMIT))?;
    let node_set: std::collections::HashSet<&Cell> = nodes.iter().collect();
    for node in &nodes {
        let kids = node.children();
        let ok = kids.len() as u64 == p.get()
            && kids.iter().all(|k| k.parent() == *node && node.contains_cell(k))
            && kids.iter().collect::<std::collections::HashSet<_>>().len() == kids.len();
        c.check("children/parent round trip to depth 4", ok, || format!("C={node}"));
        c.check("parent children contain C", node.scale() == 0 || node.parent().children().contains(node), || {
            format!("C={node}")
        });
        c.check(
            "sum of child measures = measure",
            finite::children_measure(node) == finite::haar_ball(p, node.scale()),
            || format!("C={node}"),
        );
    }

    let mut g = rng(params, 2);
    for _ in 0..params.samples {
        let a = sample::cell(&mut g, p);
        let b = sample::cell(&mut g, p);
        let f = sample::affine(&mut g, p);
        let h = sample::affine(&mut g, p);
        let k = sample::affine(&mut g, p);
        let beta = sample::affine_zp_star(&mut g, p);
        let m = meet(&a, &b)?;
        c.check(
            "meet contains both, no child does",
            m.contains_cell(&a)
                && m.contains_cell(&b)
                && !m.children().iter().any(|ch| ch.contains_cell(&a) && ch.contains_cell(&b)),
            || format!("C={a}, C'={b}"),
        );
        if a.contains_cell(&b) {
            c.check("rho = scale difference along a chain", rho(&a, &b)? == (b.scale() - a.scale()) as u64, || {
                format!("C={a}, C'={b}")
            });
        }
        let fa = act(&f, &a)?;
        c.check("f(parent C) = parent f(C)", act(&f, &a.parent())? == fa.parent(), || format!("f={f}, C={a}"));
        let mut kids: Vec<String> =
            a.children().iter().map(|ch| act(&f, ch).map(|x| x.to_string())).collect::<Result<_>>()?;
        let mut fkids: Vec<String> = fa.children().iter().map(|x| x.to_string()).collect();
        kids.sort();
        fkids.sort();
        c.check("f maps children of C onto children of f(C)", kids == fkids, || format!("f={f}, C={a}"));
        let image_ok =
            nodes.iter().filter(|x| x.scale() <= 2).all(|x| act(&beta, x).is_ok_and(|y| node_set.contains(&y)));
        c.check("A*(Z_p) permutes the tree truncation", image_ok, || format!("beta={beta}"));
        c.check("cell semimetric vanishes on f A*(Z_p)", cell_semimetric(&f.compose(&beta)?, &f)? == 0, || {
            format!("f={f}, beta={beta}")
        });
        let zero = cell_semimetric(&f, &h)? == 0;
        let coset = h.inverse()?.compose(&f)?.membership().in_astar_zp;
        c.check("cell semimetric zero iff g^-1 f in A*(Z_p)", zero == coset, || format!("f={f}, g={h}"));
        c.check(
            "cell semimetric left invariance",
            cell_semimetric(&k.compose(&f)?, &k.compose(&h)?)? == cell_semimetric(&f, &h)?,
            || format!("f={f}, g={h}, h={k}"),
        );
        if f != h {
            let wit = separating_cell(&f, &h)?;
            c.check(
                "distinct maps separated by a cell",
                wit.as_ref().is_some_and(|x| act(&f, x).ok() != act(&h, x).ok()),
                || format!("f={f}, g={h}"),
            );
        }
        let set = [a.clone(), b.clone(), fa.clone()];
        let wit = is_bounded_cellset(&set)?;
        c.check("bounded set witness encloses every cell", set.iter().all(|x| wit.enclosing.contains_cell(x)), || {
            format!("cells={a}, {b}, {fa}")
        });
    }
    Ok(())
}

fn haar_scaling(c: &mut Checks, params: &Params) -> Result<()> {
    let (p, n, l) = (params.p, params.n, params.l);
    let base = (l as u64 * (n as u64 - 1)).max(1) as u32;
    let ms = match params.m {
        Some(m) => vec![m],
        None => vec![base, base + 1],
    };
    let mut ratios = Vec::new();
    let dn = crate::triangular::haar_dimension(n as u64);
    for &m in &ms {
        let r = finite::count_triangular_ball(p, n, l, m, params.budget.elements, true)?;
        let name = format!("T+({n}) ball ratio = p^-l d(n), m={m}");
        let (count, total, ratio) = (r.count.clone(), r.total.clone(), r.ratio.clone());
        c.check(&name, r.passed, || format!("{count}/{total} = {ratio}"));
        c.notes.push(format!(
            "m={m}: count {} of {}, ratio {} vs expected {}^-{} ({})",
            r.count,
            r.total,
            r.ratio,
            p,
            l as u64 * dn,
            mode_name(r.mode)
        ));
        ratios.push(r.ratio.clone());
        c.details.push(serde_json::to_value(&r).expect("serialisable"));
    }
    if ratios.len() > 1 {
        c.check("ratio independent of m", ratios.windows(2).all(|w| w[0] == w[1]), || ratios.join(" vs "));
    }
    match finite::dilation_image_matches(p, n, l, ms[0], params.budget.elements) {
        Ok(ok) => c.check("profile (l, 2l, ...) subgroup = image of d_{p^l}", ok, || format!("m={}", ms[0])),
        Err(Error::BudgetExceeded { .. }) => c.notes.push("dilation image comparison skipped: over budget".into()),
        Err(e) => return Err(e),
    }
    for j in 0..=3u32 {
        match finite::coset_cover_check(
            p,
            j,
            params.samples as u64,
            params.seed.wrapping_add(j as u64),
            params.budget.elements,
        ) {
            Ok(r) => {
                let name = format!("Z_p/p^{j}Z_p has p^{j} disjoint covering cosets");
                let (cosets, mis) = (r.cosets, r.misplaced);
                c.check(&name, r.passed, || format!("{cosets} cosets, {mis} misplaced samples"));
            }
            Err(Error::BudgetExceeded { .. }) => c.notes.push(format!("coset check j={j} skipped: over budget")),
            Err(e) => return Err(e),
        }
    }
    for l2 in -2..3i64 {
        c.check(
            "ball of scale l splits into p^(m-l) balls of scale m",
            (l2..l2 + 3).all(|m| finite::ball_splits(p, l2, m)),
            || format!("l={l2}"),
        );
    }
    Ok(())
}

fn finite_groups(c: &mut Checks, params: &Params) -> Result<()> {
    let (p, n) = (params.p, params.n);
    let m = params.m.unwrap_or(2);
    let rule =
        if params.mutant == Some(Mutant::DroppedTwist) { ProductRule::DroppedTwist } else { ProductRule::Standard };
    let mut specs = vec![
        GroupSpec::Heisenberg { n },
        GroupSpec::TPlus { n: n + 2 },
        GroupSpec::Profile(crate::triangular::SubgroupProfile::new(vec![1; n + 1])?),
        GroupSpec::HSubgroup { n, k: 1, l: 1 },
    ];
    if m >= 3 {
        specs.push(GroupSpec::Profile(crate::triangular::SubgroupProfile::linear(3, 1)));
        specs.push(GroupSpec::HSubgroup { n, k: 1, l: 2 });
    }
    for spec in &specs {
        match brute_group_axioms(spec, p, m, rule, &params.budget, params.seed) {
            Ok(report) => record_group_report(c, &report),
            Err(Error::BudgetExceeded { needed, budget }) => {
                c.notes.push(format!("{spec} over Z/{p}^{m} skipped: {needed} elements over budget {budget}"))
            }
            Err(e) => return Err(e),
        }
    }
    if c.list.is_empty() {
        return Err(Error::InvalidArgument(format!("every finite model is over budget at p={p}, n={n}, m={m}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(p: u64, n: usize, samples: usize) -> Params {
        Params { n, samples, seed: 3, ..Params::new(Prime::new(p).unwrap()) }
    }

    #[test]
    fn names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
        assert_eq!("sum-tri-norm".parse::<Mutant>().unwrap(), Mutant::SumTriNorm);
    }

    #[test]
    fn every_suite_passes_on_small_inputs() {
        for s in Suite::ALL {
            let r = run_suite(s, &params(2, 2, 60)).unwrap();
            assert!(r.passed, "{}", r.render());
            assert!(!r.checks.is_empty());
        }
    }

    #[test]
    fn mutants_are_caught() {
        let mut pr = params(2, 1, 200);
        pr.mutant = Some(Mutant::DroppedTwist);
        let r = run_suite(Suite::Heisenberg, &pr).unwrap();
        assert!(!r.passed);
        assert!(r.check("associativity").unwrap().passed());
        assert!(!r.check("u h_inv(u) = e").unwrap().passed());
        assert!(r.failures().all(|c| !c.witnesses.is_empty()));

        let mut pr = params(3, 3, 200);
        pr.mutant = Some(Mutant::SumTriNorm);
        let r = run_suite(Suite::TriNorm, &pr).unwrap();
        assert!(!r.passed);
        assert!(r.failures().all(|c| !c.witnesses.is_empty()));
        assert!(run_suite(Suite::Cells, &pr).is_err());
    }

    #[test]
    fn reports_are_deterministic() {
        let a = run_suite(Suite::Affine, &params(5, 2, 50)).unwrap();
        let b = run_suite(Suite::Affine, &params(5, 2, 50)).unwrap();
        assert_eq!(a.render(), b.render());
    }
}

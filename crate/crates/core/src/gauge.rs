//! Semimetric and gauge combinators, plus sample-based axiom checkers.
//!
//! A [`Semimetric`] is an opaque evaluation rule returning exact
//! [`Value`]s. Combinators capture their inputs behind `Arc`s, so derived
//! semimetrics are cheap to clone and safe to share across threads.
//!
//! Infinite families (capped sequence maxima, nested gauges) are supplied
//! as finite prefixes. Their evaluation contract is explicit: a capped
//! sequence is faithful at every radius above its last cap, and a nested
//! gauge only accepts points that lie in its largest supplied subgroup.

use std::fmt::Debug;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Signed};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::value::{le_sum, Value};

type Rule<T> = dyn Fn(&T, &T) -> Result<Value> + Send + Sync;
type GaugeRule<T> = dyn Fn(&T) -> Result<Value> + Send + Sync;

pub struct Semimetric<T: ?Sized> {
    rule: Arc<Rule<T>>,
    ultrametric: bool,
}

impl<T: ?Sized> Clone for Semimetric<T> {
    fn clone(&self) -> Self {
        Semimetric { rule: Arc::clone(&self.rule), ultrametric: self.ultrametric }
    }
}

impl<T: ?Sized + 'static> Semimetric<T> {
    /// Wraps a rule. `ultrametric` records the caller's claim that the rule
    /// satisfies the strong triangle inequality; [`check_axioms`] tests it.
    pub fn new<F>(ultrametric: bool, rule: F) -> Self
    where
        F: Fn(&T, &T) -> Result<Value> + Send + Sync + 'static,
    {
        Semimetric { rule: Arc::new(rule), ultrametric }
    }

    pub fn eval(&self, x: &T, y: &T) -> Result<Value> {
        (self.rule)(x, y)
    }

    pub fn is_ultrametric(&self) -> bool {
        self.ultrametric
    }
}

/// Pointwise `min(d, t)`.
pub fn truncate<T: ?Sized + 'static>(d: &Semimetric<T>, t: BigRational) -> Result<Semimetric<T>> {
    if !t.is_positive() {
        return Err(Error::InvalidArgument(format!("truncation level {t} must be positive")));
    }
    let inner = d.clone();
    let cap = Value::rational(t);
    Ok(Semimetric::new(d.ultrametric, move |x, y| Ok(inner.eval(x, y)?.min(cap.clone()))))
}

/// Pointwise `d^alpha`. Exponents above 1 are only accepted for inputs
/// flagged ultrametric.
pub fn power<T: ?Sized + 'static>(d: &Semimetric<T>, alpha: BigRational) -> Result<Semimetric<T>> {
    if !alpha.is_positive() || (!d.ultrametric && alpha > BigRational::one()) {
        return Err(Error::InvalidArgument(format!(
            "exponent {alpha} out of range for a {} input",
            if d.ultrametric { "semi-ultrametric" } else { "semimetric" }
        )));
    }
    let inner = d.clone();
    Ok(Semimetric::new(d.ultrametric, move |x, y| Ok(inner.eval(x, y)?.pow(&alpha))))
}

/// Pointwise maximum of a nonempty finite family.
pub fn max_family<T: ?Sized + 'static>(ds: Vec<Semimetric<T>>) -> Result<Semimetric<T>> {
    if ds.is_empty() {
        return Err(Error::InvalidArgument("max_family needs at least one semimetric".into()));
    }
    let ultra = ds.iter().all(|d| d.ultrametric);
    Ok(Semimetric::new(ultra, move |x, y| {
        let mut best = Value::Zero;
        for d in &ds {
            best = best.max(d.eval(x, y)?);
        }
        Ok(best)
    }))
}

/// `max_j min(d_j, t_j)` over a finite prefix of a sequence whose caps
/// decrease to zero.
///
/// For any radius `r` above the last supplied cap, the ball `{d < r}` of
/// the prefix coincides with the ball of the full infinite maximum, since
/// every omitted term is bounded by that cap.
pub struct CappedSequence<T: ?Sized> {
    metric: Semimetric<T>,
    last_cap: BigRational,
}

impl<T: ?Sized + 'static> CappedSequence<T> {
    pub fn metric(&self) -> &Semimetric<T> {
        &self.metric
    }

    /// Smallest radius (exclusive) at which the prefix is faithful.
    pub fn faithful_above(&self) -> &BigRational {
        &self.last_cap
    }

    pub fn faithful_at(&self, radius: &BigRational) -> bool {
        radius > &self.last_cap
    }
}

pub fn capped_sequence_max<T: ?Sized + 'static>(
    ds: Vec<Semimetric<T>>,
    ts: Vec<BigRational>,
) -> Result<CappedSequence<T>> {
    if ds.is_empty() || ds.len() != ts.len() {
        return Err(Error::InvalidArgument("need one positive cap per semimetric".into()));
    }
    if ts.iter().any(|t| !t.is_positive()) || ts.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::InvalidArgument("caps must be positive and non-increasing".into()));
    }
    let last_cap = ts.last().cloned().unwrap();
    let truncated = ds.iter().zip(ts).map(|(d, t)| truncate(d, t)).collect::<Result<Vec<_>>>()?;
    Ok(CappedSequence { metric: max_family(truncated)?, last_cap })
}

/// Lifts a semimetric on factor `j` to tuples of the given arity.
pub fn product_lift<T: 'static>(d: &Semimetric<T>, j: usize, arity: usize) -> Result<Semimetric<[T]>> {
    if j >= arity {
        return Err(Error::Dimension(format!("coordinate {j} out of range for arity {arity}")));
    }
    let inner = d.clone();
    Ok(Semimetric::new(d.ultrametric, move |x: &[T], y: &[T]| {
        if x.len() != arity || y.len() != arity {
            return Err(Error::Dimension(format!("expected tuples of arity {arity}, got {} and {}", x.len(), y.len())));
        }
        inner.eval(&x[j], &y[j])
    }))
}

/// Group structure supplied alongside a gauge.
pub trait Group: Send + Sync {
    type Elem: Clone + Send + Sync;
    fn identity(&self) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
}

/// A nonnegative length function on a group.
pub struct Gauge<T> {
    rule: Arc<GaugeRule<T>>,
    ultra: bool,
}

impl<T> Clone for Gauge<T> {
    fn clone(&self) -> Self {
        Gauge { rule: Arc::clone(&self.rule), ultra: self.ultra }
    }
}

impl<T: 'static> Gauge<T> {
    /// `ultra` records that the gauge satisfies `r(xy) ≤ max(r(x), r(y))`.
    pub fn new<F>(ultra: bool, rule: F) -> Self
    where
        F: Fn(&T) -> Result<Value> + Send + Sync + 'static,
    {
        Gauge { rule: Arc::new(rule), ultra }
    }

    pub fn eval(&self, x: &T) -> Result<Value> {
        (self.rule)(x)
    }

    pub fn is_ultra(&self) -> bool {
        self.ultra
    }
}

/// `d(x, y) = r(y⁻¹ x)`, invariant under left translations.
pub fn gauge_to_left<G: Group + 'static>(group: Arc<G>, r: Gauge<G::Elem>) -> Semimetric<G::Elem>
where
    G::Elem: 'static,
{
    let ultra = r.ultra;
    Semimetric::new(ultra, move |x, y| r.eval(&group.mul(&group.inv(y), x)))
}

/// `d(x, y) = r(x y⁻¹)`, invariant under right translations.
pub fn gauge_to_right<G: Group + 'static>(group: Arc<G>, r: Gauge<G::Elem>) -> Semimetric<G::Elem>
where
    G::Elem: 'static,
{
    let ultra = r.ultra;
    Semimetric::new(ultra, move |x, y| r.eval(&group.mul(x, &group.inv(y))))
}

/// `0` on members of a subgroup, `1` elsewhere.
pub fn indicator_gauge<T: 'static, F>(member: F) -> Gauge<T>
where
    F: Fn(&T) -> bool + Send + Sync + 'static,
{
    Gauge::new(true, move |x| Ok(if member(x) { Value::Zero } else { Value::one() }))
}

type Member<T> = Box<dyn Fn(&T) -> bool + Send + Sync>;

/// `r(x) = max_j t_j r_j(x)` for an increasing chain `U_1 ⊆ U_2 ⊆ …` with
/// indicator gauges `r_j` and weights `t_j` increasing to infinity.
///
/// Evaluates to `t_J` for the largest `J` with `x ∉ U_J`, and `0` on `U_1`.
/// Points outside the last supplied subgroup are rejected.
pub fn nested_gauge<T: 'static>(members: Vec<Member<T>>, ts: Vec<BigRational>) -> Result<Gauge<T>> {
    if members.is_empty() || members.len() != ts.len() {
        return Err(Error::InvalidArgument("need one weight per subgroup".into()));
    }
    if ts.iter().any(|t| t.is_negative()) || ts.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument("weights must be nonnegative and non-decreasing".into()));
    }
    Ok(Gauge::new(true, move |x| {
        let outside_last = members.iter().rposition(|m| !m(x));
        match outside_last {
            None => Ok(Value::Zero),
            Some(j) if j + 1 == members.len() => {
                Err(Error::Domain("point lies outside the largest supplied subgroup".into()))
            }
            Some(j) => Ok(Value::rational(ts[j].clone())),
        }
    }))
}

#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub x: String,
    pub y: String,
    pub z: Option<String>,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomResult {
    pub axiom: &'static str,
    /// The first few witnesses; `failures` counts all of them.
    pub violations: Vec<Violation>,
    pub failures: usize,
    pub samples: usize,
}

impl AxiomResult {
    fn new(axiom: &'static str) -> Self {
        AxiomResult { axiom, violations: Vec::new(), failures: 0, samples: 0 }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Outcome of [`check_axioms`]. Each sampled triple contributes one check
/// per axiom; `separation` collects distinct points at distance zero.
#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub samples: usize,
    pub results: Vec<AxiomResult>,
}

impl AxiomReport {
    pub fn axiom(&self, name: &str) -> &AxiomResult {
        self.results.iter().find(|r| r.axiom == name).expect("unknown axiom")
    }

    pub fn is_semimetric(&self) -> bool {
        ["evaluation", "self-distance", "symmetry", "triangle"].iter().all(|a| self.axiom(a).passed())
    }

    pub fn is_semi_ultrametric(&self) -> bool {
        self.is_semimetric() && self.axiom("ultrametric").passed()
    }

    /// Semimetric with no distinct pair found at distance zero.
    pub fn is_metric(&self) -> bool {
        self.is_semimetric() && self.axiom("separation").passed()
    }

    pub fn is_ultrametric(&self) -> bool {
        self.is_semi_ultrametric() && self.axiom("separation").passed()
    }
}

/// Caps the number of stored witnesses per axiom.
const MAX_WITNESSES: usize = 16;

fn record(res: &mut AxiomResult, v: Violation) {
    res.failures += 1;
    if res.violations.len() < MAX_WITNESSES {
        res.violations.push(v);
    }
}

/// Samples `count` triples from `sampler` (seeded, deterministic) and checks
/// self-distance, symmetry, the triangle and strong triangle inequalities,
/// and separation. Comparisons are exact; additive triangle checks between
/// fractional powers use certified enclosures.
pub fn check_axioms<T, S>(d: &Semimetric<T>, mut sampler: S, count: usize, seed: u64) -> AxiomReport
where
    T: Debug + PartialEq + 'static,
    S: FnMut(&mut ChaCha8Rng) -> T,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names = ["evaluation", "self-distance", "symmetry", "triangle", "ultrametric", "separation"];
    let mut results: Vec<AxiomResult> = names.iter().map(|n| AxiomResult::new(n)).collect();
    let show = |t: &T| format!("{t:?}");
    for _ in 0..count {
        let x = sampler(&mut rng);
        let y = sampler(&mut rng);
        let z = sampler(&mut rng);
        let evals = (|| -> Result<_> {
            Ok((d.eval(&x, &x)?, d.eval(&x, &y)?, d.eval(&y, &x)?, d.eval(&y, &z)?, d.eval(&x, &z)?))
        })();
        for r in results.iter_mut() {
            r.samples += 1;
        }
        let (dxx, dxy, dyx, dyz, dxz) = match evals {
            Ok(v) => v,
            Err(e) => {
                record(
                    &mut results[0],
                    Violation { x: show(&x), y: show(&y), z: Some(show(&z)), lhs: e.to_string(), rhs: String::new() },
                );
                continue;
            }
        };
        if !dxx.is_zero() {
            record(
                &mut results[1],
                Violation { x: show(&x), y: show(&x), z: None, lhs: dxx.to_string(), rhs: "0".into() },
            );
        }
        if dxy != dyx {
            record(
                &mut results[2],
                Violation { x: show(&x), y: show(&y), z: None, lhs: dxy.to_string(), rhs: dyx.to_string() },
            );
        }
        if !le_sum(&dxz, &[dxy.clone(), dyz.clone()]) {
            record(
                &mut results[3],
                Violation {
                    x: show(&x),
                    y: show(&y),
                    z: Some(show(&z)),
                    lhs: dxz.to_string(),
                    rhs: format!("{dxy} + {dyz}"),
                },
            );
        }
        let m = dxy.clone().max(dyz.clone());
        if dxz > m {
            record(
                &mut results[4],
                Violation { x: show(&x), y: show(&y), z: Some(show(&z)), lhs: dxz.to_string(), rhs: m.to_string() },
            );
        }
        if x != y && dxy.is_zero() {
            record(
                &mut results[5],
                Violation { x: show(&x), y: show(&y), z: None, lhs: "0".into(), rhs: "> 0".into() },
            );
        }
    }
    AxiomReport { samples: count, results }
}

/// Checks `d(act(a, x), act(a, y)) = d(x, y)` on sampled `(a, x, y)`.
pub fn check_invariance<A, T, SA, ST, F>(
    d: &Semimetric<T>,
    act: F,
    mut sample_a: SA,
    mut sample_x: ST,
    count: usize,
    seed: u64,
) -> AxiomResult
where
    A: Debug,
    T: Debug + 'static,
    SA: FnMut(&mut ChaCha8Rng) -> A,
    ST: FnMut(&mut ChaCha8Rng) -> T,
    F: Fn(&A, &T) -> T,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut res = AxiomResult::new("invariance");
    for _ in 0..count {
        let a = sample_a(&mut rng);
        let x = sample_x(&mut rng);
        let y = sample_x(&mut rng);
        res.samples += 1;
        let before = d.eval(&x, &y);
        let after = d.eval(&act(&a, &x), &act(&a, &y));
        match (before, after) {
            (Ok(b), Ok(c)) if b == c => {}
            (b, c) => record(
                &mut res,
                Violation {
                    x: format!("{x:?}"),
                    y: format!("{y:?}"),
                    z: Some(format!("{a:?}")),
                    lhs: format!("{c:?}"),
                    rhs: format!("{b:?}"),
                },
            ),
        }
    }
    res
}

/// Checks the gauge axioms `r(e) = 0`, `r(x⁻¹) = r(x)`, and
/// `r(xy) ≤ max(r(x), r(y))` (or `≤ r(x) + r(y)` for non-ultra gauges).
pub fn check_gauge<G, S>(group: &G, r: &Gauge<G::Elem>, mut sampler: S, count: usize, seed: u64) -> Vec<AxiomResult>
where
    G: Group,
    G::Elem: Debug + 'static,
    S: FnMut(&mut ChaCha8Rng) -> G::Elem,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut identity = AxiomResult::new("identity");
    let mut symmetric = AxiomResult::new("inverse-symmetry");
    let mut sub = AxiomResult::new(if r.ultra { "max-subadditivity" } else { "subadditivity" });
    identity.samples = 1;
    match r.eval(&group.identity()) {
        Ok(v) if v.is_zero() => {}
        other => record(
            &mut identity,
            Violation {
                x: format!("{:?}", group.identity()),
                y: String::new(),
                z: None,
                lhs: format!("{other:?}"),
                rhs: "0".into(),
            },
        ),
    }
    for _ in 0..count {
        let x = sampler(&mut rng);
        let y = sampler(&mut rng);
        symmetric.samples += 1;
        sub.samples += 1;
        let eval =
            || -> Result<_> { Ok((r.eval(&x)?, r.eval(&group.inv(&x))?, r.eval(&y)?, r.eval(&group.mul(&x, &y))?)) };
        let (rx, rxi, ry, rxy) = match eval() {
            Ok(v) => v,
            Err(e) => {
                record(
                    &mut sub,
                    Violation {
                        x: format!("{x:?}"),
                        y: format!("{y:?}"),
                        z: None,
                        lhs: e.to_string(),
                        rhs: String::new(),
                    },
                );
                continue;
            }
        };
        if rx != rxi {
            record(
                &mut symmetric,
                Violation { x: format!("{x:?}"), y: String::new(), z: None, lhs: rx.to_string(), rhs: rxi.to_string() },
            );
        }
        let ok = if r.ultra { rxy <= rx.clone().max(ry.clone()) } else { le_sum(&rxy, &[rx.clone(), ry.clone()]) };
        if !ok {
            record(
                &mut sub,
                Violation {
                    x: format!("{x:?}"),
                    y: format!("{y:?}"),
                    z: None,
                    lhs: rxy.to_string(),
                    rhs: format!("{rx}, {ry}"),
                },
            );
        }
    }
    vec![identity, symmetric, sub]
}

/// The discrete metric: `0` on equal points, `1` otherwise.
pub fn discrete<T: PartialEq + ?Sized + 'static>() -> Semimetric<T> {
    Semimetric::new(true, |x: &T, y: &T| Ok(if x == y { Value::Zero } else { Value::one() }))
}

/// The zero semimetric.
pub fn zero_semimetric<T: ?Sized + 'static>() -> Semimetric<T> {
    Semimetric::new(true, |_: &T, _: &T| Ok(Value::Zero))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::{dp, dp_log, rp, PRational, Prime};
    use crate::sample;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn dp_metric(p: Prime) -> Semimetric<PRational> {
        Semimetric::new(true, move |x: &PRational, y: &PRational| Ok(dp(x, y)?.to_value(p)))
    }

    fn dp_log_metric() -> Semimetric<PRational> {
        Semimetric::new(false, |x: &PRational, y: &PRational| Ok(Value::int(dp_log(x, y)?)))
    }

    struct Units(Prime);
    impl Group for Units {
        type Elem = PRational;
        fn identity(&self) -> PRational {
            PRational::one(self.0)
        }
        fn mul(&self, a: &PRational, b: &PRational) -> PRational {
            a * b
        }
        fn inv(&self, a: &PRational) -> PRational {
            a.inv().unwrap()
        }
    }

    #[test]
    fn truncation_examples() {
        let p = Prime::new(2).unwrap();
        let t = truncate(&dp_metric(p), r(1, 1)).unwrap();
        let q = |s| PRational::parse(s, p).unwrap();
        assert_eq!(t.eval(&q("0"), &q("1/4")).unwrap(), Value::one());
        assert_eq!(t.eval(&q("3"), &q("3")).unwrap(), Value::Zero);
        let d = truncate(&discrete::<i32>(), r(1, 2)).unwrap();
        assert_eq!(d.eval(&1, &2).unwrap(), Value::rational(r(1, 2)));
        assert!(truncate(&discrete::<i32>(), r(0, 1)).is_err());
    }

    #[test]
    fn power_examples() {
        let p2 = Prime::new(2).unwrap();
        let d = power(&dp_metric(p2), r(1, 2)).unwrap();
        let q = |s| PRational::parse(s, p2).unwrap();
        assert_eq!(d.eval(&q("0"), &q("4")).unwrap(), Value::rational(r(1, 2)));
        let id = power(&dp_metric(p2), r(1, 1)).unwrap();
        assert_eq!(id.eval(&q("0"), &q("4")).unwrap(), dp(&q("0"), &q("4")).unwrap().to_value(p2));

        let p3 = Prime::new(3).unwrap();
        let sq = power(&dp_metric(p3), r(2, 1)).unwrap();
        let q3 = |s| PRational::parse(s, p3).unwrap();
        assert_eq!(sq.eval(&q3("0"), &q3("3")).unwrap(), Value::rational(r(1, 9)));
        let rep = check_axioms(&sq, |g| sample::rational(g, p3), 1000, 11);
        assert!(rep.is_ultrametric(), "{rep:?}");

        assert!(power(&dp_log_metric(), r(2, 1)).is_err());
        assert!(power(&dp_log_metric(), r(1, 3)).is_ok());
    }

    #[test]
    fn power_of_log_metric_keeps_triangle() {
        let p = Prime::new(3).unwrap();
        let d = power(&dp_log_metric(), r(1, 2)).unwrap();
        let rep = check_axioms(&d, |g| sample::nonzero_rational(g, p), 1000, 5);
        assert!(rep.is_semimetric(), "{rep:?}");
    }

    #[test]
    fn max_family_examples() {
        let p = Prime::new(2).unwrap();
        let d = dp_metric(p);
        let same = max_family(vec![d.clone(), d.clone()]).unwrap();
        let q = |s| PRational::parse(s, p).unwrap();
        assert_eq!(same.eval(&q("1/3"), &q("5")).unwrap(), d.eval(&q("1/3"), &q("5")).unwrap());
        let both = max_family(vec![product_lift(&d, 0, 2).unwrap(), product_lift(&d, 1, 2).unwrap()]).unwrap();
        let a = [q("0"), q("0")];
        let b = [q("1"), q("2")];
        assert_eq!(both.eval(&a[..], &b[..]).unwrap(), Value::one());
        assert!(max_family::<PRational>(vec![]).is_err());
    }

    #[test]
    fn capped_sequences() {
        let seq = capped_sequence_max(vec![discrete::<u8>(), discrete::<u8>()], vec![r(1, 1), r(1, 2)]).unwrap();
        assert_eq!(seq.metric().eval(&1, &2).unwrap(), Value::one());
        assert!(seq.faithful_at(&r(3, 4)) && !seq.faithful_at(&r(1, 2)));
        let zero = capped_sequence_max(vec![zero_semimetric::<u8>()], vec![r(1, 1)]).unwrap();
        assert_eq!(zero.metric().eval(&1, &2).unwrap(), Value::Zero);
        assert!(capped_sequence_max(vec![discrete::<u8>(), discrete::<u8>()], vec![r(1, 2), r(1, 1)]).is_err());
    }

    #[test]
    fn capped_discrete_product_matches_first_difference() {
        // oracle: the product ultrametric on sequences is t_J for the first
        // coordinate J where they differ
        let len = 6;
        let ts: Vec<_> = (0..len).map(|j| r(1, 1 << j)).collect();
        let lifts = (0..len).map(|j| product_lift(&discrete::<u8>(), j, len).unwrap()).collect();
        let seq = capped_sequence_max(lifts, ts.clone()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..2000 {
            let x: Vec<u8> = (0..len).map(|_| rand::Rng::gen_range(&mut rng, 0..2)).collect();
            let y: Vec<u8> = (0..len).map(|_| rand::Rng::gen_range(&mut rng, 0..2)).collect();
            let expected = match x.iter().zip(&y).position(|(a, b)| a != b) {
                None => Value::Zero,
                Some(j) => Value::rational(ts[j].clone()),
            };
            assert_eq!(seq.metric().eval(&x[..], &y[..]).unwrap(), expected, "{x:?} {y:?}");
        }
    }

    #[test]
    fn lift_behaviour() {
        let p = Prime::new(5).unwrap();
        let q = |s| PRational::parse(s, p).unwrap();
        let lift = product_lift(&dp_metric(p), 0, 2).unwrap();
        assert_eq!(lift.eval(&[q("1"), q("0")][..], &[q("1"), q("7")][..]).unwrap(), Value::Zero);
        assert!(lift.eval(&[q("1")][..], &[q("1")][..]).is_err());
        assert!(product_lift(&dp_metric(p), 2, 2).is_err());
    }

    #[test]
    fn left_and_right_gauges_on_units() {
        let p = Prime::new(3).unwrap();
        let g = Arc::new(Units(p));
        let r_p = Gauge::new(true, move |x: &PRational| Ok(rp(x)?.to_value(p)));
        let left = gauge_to_left(g.clone(), r_p.clone());
        let right = gauge_to_right(g.clone(), r_p.clone());
        let x = PRational::from_frac(4, 5, p);
        let y = PRational::from_frac(7, 2, p);
        assert_eq!(left.eval(&x, &y).unwrap(), rp(&(&y.inv().unwrap() * &x)).unwrap().to_value(p));
        assert!(left.eval(&x, &x).unwrap().is_zero());
        // the group is abelian, hence conjugation invariant
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let a = sample::unit(&mut rng, p);
            let b = sample::unit(&mut rng, p);
            assert_eq!(left.eval(&a, &b).unwrap(), right.eval(&a, &b).unwrap());
        }
        let gg = g.clone();
        let inv = check_invariance(
            &left,
            move |a: &PRational, x: &PRational| gg.mul(a, x),
            |r| sample::unit(r, p),
            |r| sample::unit(r, p),
            1000,
            9,
        );
        assert!(inv.passed(), "{inv:?}");
        let gauges = check_gauge(&*g, &r_p, |r| sample::unit(r, p), 1000, 1);
        assert!(gauges.iter().all(AxiomResult::passed), "{gauges:?}");
    }

    #[test]
    fn indicator_of_units() {
        let p = Prime::new(2).unwrap();
        let ind = indicator_gauge(|x: &PRational| x.is_unit());
        assert_eq!(ind.eval(&PRational::from_int(2, p)).unwrap(), Value::one());
        assert_eq!(ind.eval(&PRational::one(p)).unwrap(), Value::Zero);
        let d = gauge_to_left(Arc::new(Units(p)), ind);
        let rep = check_axioms(&d, |g| sample::nonzero_rational(g, p), 1000, 4);
        assert!(rep.is_semi_ultrametric() && !rep.is_metric(), "{rep:?}");
    }

    #[test]
    fn nested_gauge_on_powers() {
        // U_j = p^(1-j) Z_p ∩ Q_p^*, weights 0, 1, 2, ...
        let p = Prime::new(3).unwrap();
        let members: Vec<Member<PRational>> = (1..=6)
            .map(|j: i64| -> Member<PRational> { Box::new(move |x: &PRational| x.vp().finite().unwrap() >= 1 - j) })
            .collect();
        let ts: Vec<_> = (0..6).map(|t| r(t, 1)).collect();
        let g = nested_gauge(members, ts).unwrap();
        assert_eq!(g.eval(&PRational::one(p)).unwrap(), Value::Zero);
        assert_eq!(g.eval(&PRational::from_frac(1, 3, p)).unwrap(), Value::Zero);
        assert_eq!(g.eval(&PRational::from_frac(1, 9, p)).unwrap(), Value::one());
        assert!(g.eval(&PRational::prime_power(-6, p)).is_err());
    }

    #[test]
    fn checker_catches_asymmetry_and_records_log_metric() {
        let broken = Semimetric::new(false, |x: &i64, y: &i64| Ok(if x < y { Value::one() } else { Value::Zero }));
        let rep = check_axioms(&broken, |g| rand::Rng::gen_range(g, 0..5), 200, 1);
        assert!(!rep.axiom("symmetry").passed());

        let p = Prime::new(3).unwrap();
        assert!(dp_log_metric().eval(&PRational::from_int(1, p), &PRational::from_int(2, p)).unwrap().is_zero());
        let rep = check_axioms(&dp_log_metric(), |g| sample::nonzero_rational(g, p), 1000, 2);
        assert!(rep.is_semimetric() && !rep.is_metric(), "{rep:?}");

        let rep = check_axioms(&dp_metric(p), |g| sample::rational(g, p), 1000, 2);
        assert!(rep.is_ultrametric(), "{rep:?}");
    }

    #[test]
    fn ultrametric_is_preserved_by_combinators() {
        let p = Prime::new(2).unwrap();
        let d = dp_metric(p);
        let combos = [
            truncate(&d, r(1, 2)).unwrap(),
            power(&d, r(3, 1)).unwrap(),
            power(&d, r(1, 3)).unwrap(),
            max_family(vec![d.clone(), truncate(&d, r(2, 1)).unwrap()]).unwrap(),
            capped_sequence_max(vec![d.clone(), d.clone()], vec![r(4, 1), r(1, 1)]).unwrap().metric().clone(),
        ];
        for (i, c) in combos.iter().enumerate() {
            let rep = check_axioms(c, |g| sample::rational(g, p), 1000, i as u64);
            assert!(rep.is_semi_ultrametric(), "combo {i}: {rep:?}");
        }
    }
}

//! Finite quotients `Z/p^m Z` and exhaustive checks over them: coset
//! counting, Haar-measure identities and brute-force group axioms for the
//! Heisenberg and unipotent groups and their congruence subgroups.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cells::{coset_cells, Cell};
use crate::error::{Error, Result};
use crate::matrix::PMatrix;
use crate::padic::{PNorm, PRational, Prime};
use crate::sample;
use crate::triangular::{haar_dimension, tri_norm, SubgroupProfile, UTMatrix};

pub const DEFAULT_ELEMENT_BUDGET: u64 = 10_000;
pub const DEFAULT_TRIPLE_BUDGET: u64 = 1_000_000_000;
pub const DEFAULT_SAMPLED_TRIPLES: u64 = 1_000_000;
/// Environment variable overriding [`Budget::elements`].
pub const BUDGET_ENV: &str = "PADIC_BUDGET";

/// Multiplication tables are kept for groups with at most this many pairs.
const TABLE_LIMIT: u64 = 1 << 24;
const MAX_WITNESSES: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Budget {
    /// Largest set enumerated element by element.
    pub elements: u64,
    /// Largest number of associativity triples checked exhaustively.
    pub triples: u64,
    /// Triples drawn when the exhaustive check is over budget.
    pub sampled_triples: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            elements: DEFAULT_ELEMENT_BUDGET,
            triples: DEFAULT_TRIPLE_BUDGET,
            sampled_triples: DEFAULT_SAMPLED_TRIPLES,
        }
    }
}

impl Budget {
    /// The defaults, with `elements` taken from `PADIC_BUDGET` when set.
    pub fn from_env() -> Result<Self> {
        let mut b = Budget::default();
        if let Ok(s) = std::env::var(BUDGET_ENV) {
            b.elements = s
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("{BUDGET_ENV} must be a nonnegative integer, got {s:?}")))?;
        }
        Ok(b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exhaustive,
    Sampled,
    Formula,
}

/// `Z / p^k Z` with elements `0, …, p^k − 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuotientRing {
    p: Prime,
    k: u32,
    modulus: u64,
}

impl QuotientRing {
    pub fn new(p: Prime, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("quotient precision must be positive".into()));
        }
        let modulus = p
            .get()
            .checked_pow(k)
            .filter(|&m| m <= u32::MAX as u64)
            .ok_or_else(|| Error::InvalidArgument(format!("{p}^{k} is too large for a quotient model")))?;
        Ok(QuotientRing { p, k, modulus })
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.k
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn reduce(&self, a: i128) -> u64 {
        a.rem_euclid(self.modulus as i128) as u64
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.modulus
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.modulus - b) % self.modulus
    }

    pub fn neg(&self, a: u64) -> u64 {
        (self.modulus - a) % self.modulus
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.modulus
    }

    /// The valuation of a residue, with `0` given valuation `k`.
    pub fn valuation(&self, a: u64) -> u32 {
        if a == 0 {
            return self.k;
        }
        let mut v = 0;
        let mut a = a;
        while a.is_multiple_of(self.p.get()) {
            a /= self.p.get();
            v += 1;
        }
        v
    }

    /// The representative of `a` in `[0, p^k)` as an element of `Q_p`.
    pub fn lift(&self, a: u64) -> PRational {
        PRational::from_int(a as i64, self.p)
    }
}

/// `H(p^l Z_p) = p^(−l)`.
pub fn haar_ball(p: Prime, l: i64) -> BigRational {
    p.pow(-l)
}

#[derive(Clone, Debug, Serialize)]
pub struct CosetReport {
    pub p: Prime,
    pub j: u32,
    pub cosets: u64,
    pub disjoint: bool,
    pub samples: u64,
    /// Samples not lying in exactly one of the cosets.
    pub misplaced: u64,
    pub passed: bool,
}

/// Checks that `0, …, p^j − 1` index pairwise distinct cells of scale `j`
/// and that sampled elements of `Z_p` lie in exactly one of them.
pub fn coset_cover_check(p: Prime, j: u32, samples: u64, seed: u64, budget: u64) -> Result<CosetReport> {
    let count = p.get().checked_pow(j).filter(|&c| c <= budget);
    let Some(count) = count else {
        return Err(Error::BudgetExceeded { needed: (p.get() as u128).saturating_pow(j), budget: budget as u128 });
    };
    let cells = coset_cells(p, j);
    let distinct: HashSet<&Cell> = cells.iter().collect();
    let disjoint = distinct.len() == cells.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut misplaced = 0;
    for _ in 0..samples {
        let x = sample::integral(&mut rng, p);
        let holders = cells.iter().filter(|c| c.contains(&x)).count();
        if holders != 1 || !distinct.contains(&Cell::canonical(&x, j as i64)) {
            misplaced += 1;
        }
    }
    let passed = disjoint && misplaced == 0 && cells.len() as u64 == count;
    Ok(CosetReport { p, j, cosets: cells.len() as u64, disjoint, samples, misplaced, passed })
}

#[derive(Clone, Debug, Serialize)]
pub struct HaarCount {
    pub p: Prime,
    pub n: usize,
    pub l: u32,
    pub m: u32,
    pub count: String,
    pub total: String,
    pub ratio: String,
    pub expected: String,
    pub mode: Mode,
    pub passed: bool,
}

fn strict_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|j| (j + 1..n).map(move |k| (j, k))).collect()
}

/// Mixed-radix digits of `idx` in base `q`, least significant first.
fn digits(mut idx: u64, q: u64, len: usize, out: &mut [u64]) {
    for d in out.iter_mut().take(len) {
        *d = idx % q;
        idx /= q;
    }
}

fn lift_unipotent(ring: &QuotientRing, n: usize, pairs: &[(usize, usize)], entries: &[u64]) -> UTMatrix {
    let mut m = PMatrix::identity(n, ring.prime());
    for (&(j, k), &a) in pairs.iter().zip(entries) {
        m.set(j, k, ring.lift(a));
    }
    UTMatrix::new(m).expect("upper triangular by construction")
}

/// The proportion of `T⁺(n, Z/p^m Z)` lying in the ball `{N(A) ≤ p^(−l)}`,
/// compared against `p^(−l·d(n))`.
pub fn count_triangular_ball(
    p: Prime,
    n: usize,
    l: u32,
    m: u32,
    budget: u64,
    allow_formula: bool,
) -> Result<HaarCount> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    // residues of valuation below m lift exactly, and 0 stands for every
    // valuation >= m, so m = l(n-1) already resolves the ball
    if (m as u64) < l as u64 * (n as u64 - 1) {
        return Err(Error::InvalidArgument(format!(
            "precision m = {m} must be at least l(n-1) = {}",
            l as u64 * (n as u64 - 1)
        )));
    }
    let ring = QuotientRing::new(p, m)?;
    let pairs = strict_pairs(n);
    let total = num_traits::pow(BigInt::from(ring.modulus()), pairs.len());
    let expected = p.pow(-(l as i64) * haar_dimension(n as u64) as i64);
    let within = total <= BigInt::from(budget);
    let (count, mode) = if within {
        let q = ring.modulus();
        let size: u64 = q.pow(pairs.len() as u32);
        let ball = PNorm::from_int_exponent(l as i64);
        let count: u64 = (0..size)
            .into_par_iter()
            .map_init(
                || vec![0u64; pairs.len()],
                |buf, idx| {
                    digits(idx, q, pairs.len(), buf);
                    u64::from(tri_norm(&lift_unipotent(&ring, n, &pairs, buf)) <= ball)
                },
            )
            .sum();
        (BigInt::from(count), Mode::Exhaustive)
    } else if allow_formula {
        let exp: u64 = pairs.iter().map(|&(j, k)| m as u64 - l as u64 * (k - j) as u64).sum();
        (num_traits::pow(p.big(), exp as usize), Mode::Formula)
    } else {
        return Err(Error::BudgetExceeded {
            needed: u128::try_from(&total).unwrap_or(u128::MAX),
            budget: budget as u128,
        });
    };
    let ratio = BigRational::new(count.clone(), total.clone());
    let passed = ratio == expected;
    Ok(HaarCount {
        p,
        n,
        l,
        m,
        count: count.to_string(),
        total: total.to_string(),
        ratio: ratio.to_string(),
        expected: expected.to_string(),
        mode,
        passed,
    })
}

/// Whether the profile subgroup `(l, 2l, …, (n−1)l)` of `T⁺(n, Z/p^m Z)`
/// is exactly the image of `δ_{p^l}`.
pub fn dilation_image_matches(p: Prime, n: usize, l: u32, m: u32, budget: u64) -> Result<bool> {
    let ring = QuotientRing::new(p, m)?;
    let pairs = strict_pairs(n);
    let q = ring.modulus();
    let size = q.checked_pow(pairs.len() as u32).filter(|&s| s <= budget).ok_or(Error::BudgetExceeded {
        needed: (q as u128).saturating_pow(pairs.len() as u32),
        budget: budget as u128,
    })?;
    let prof = SubgroupProfile::linear(n, l as i64);
    let scale: Vec<u64> = pairs.iter().map(|&(j, k)| ring.reduce(p.get().pow(l * (k - j) as u32) as i128)).collect();
    let mut buf = vec![0u64; pairs.len()];
    let mut image = HashSet::new();
    let mut members = HashSet::new();
    for idx in 0..size {
        digits(idx, q, pairs.len(), &mut buf);
        let dilated: Vec<u64> = buf.iter().zip(&scale).map(|(&a, &s)| ring.mul(a, s)).collect();
        image.insert(dilated);
        let member = pairs.iter().zip(&buf).all(|(&(j, k), &a)| ring.valuation(a) as i64 >= prof.level(k - j));
        if member {
            members.insert(buf.clone());
        }
    }
    Ok(image == members)
}

/// The group families checked by [`brute_group_axioms`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupSpec {
    Heisenberg {
        n: usize,
    },
    TPlus {
        n: usize,
    },
    /// The profile subgroup of `T⁺(len + 1)`.
    Profile(SubgroupProfile),
    /// `(p^k Z_p)^n × (p^k Z_p)^n × p^l Z_p` inside `H_n`.
    HSubgroup {
        n: usize,
        k: u32,
        l: u32,
    },
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Heisenberg { n } => write!(f, "heisenberg(n={n})"),
            GroupSpec::TPlus { n } => write!(f, "tplus(n={n})"),
            GroupSpec::Profile(prof) => {
                let ls: Vec<String> = prof.levels().iter().map(|l| l.to_string()).collect();
                write!(f, "profile({})", ls.join(","))
            }
            GroupSpec::HSubgroup { n, k, l } => write!(f, "h-subgroup(n={n},k={k},l={l})"),
        }
    }
}

/// The product used by the model; `DroppedTwist` omits the bilinear
/// cross term and serves as a negative control.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProductRule {
    Standard,
    DroppedTwist,
}

#[derive(Clone, Copy, Debug)]
enum Shape {
    Heis(usize),
    Tri(usize),
}

struct Model {
    ring: QuotientRing,
    shape: Shape,
    rule: ProductRule,
    dims: usize,
    pairs: Vec<(usize, usize)>,
    /// `index[j][k]` is the coordinate of entry `(j, k)`.
    index: Vec<Vec<usize>>,
    spec: GroupSpec,
}

impl Model {
    fn new(spec: &GroupSpec, ring: QuotientRing, rule: ProductRule) -> Result<Model> {
        let m = ring.precision() as i64;
        let shape = match spec {
            GroupSpec::Heisenberg { n } => Shape::Heis(*n),
            GroupSpec::TPlus { n } => Shape::Tri(*n),
            GroupSpec::Profile(prof) => {
                if prof.levels().iter().any(|&l| l < 0 || l >= m) {
                    return Err(Error::InvalidArgument(format!("profile levels must lie in [0, m) for m = {m}")));
                }
                Shape::Tri(prof.levels().len() + 1)
            }
            GroupSpec::HSubgroup { n, k, l } => {
                if 2 * k < *l {
                    return Err(Error::InvalidArgument(format!(
                        "2k >= l is needed for a subgroup, got k = {k}, l = {l}"
                    )));
                }
                if *k as i64 >= m || *l as i64 >= m {
                    return Err(Error::InvalidArgument(format!("k and l must be below the precision m = {m}")));
                }
                Shape::Heis(*n)
            }
        };
        let (dims, pairs) = match shape {
            Shape::Heis(n) if n >= 1 => (2 * n + 1, Vec::new()),
            Shape::Tri(n) if n >= 2 => {
                let pairs = strict_pairs(n);
                (pairs.len(), pairs)
            }
            _ => return Err(Error::InvalidArgument(format!("group {spec} is too small to model"))),
        };
        let mut index = Vec::new();
        if let Shape::Tri(n) = shape {
            index = vec![vec![usize::MAX; n]; n];
            for (c, &(j, k)) in pairs.iter().enumerate() {
                index[j][k] = c;
            }
        }
        Ok(Model { ring, shape, rule, dims, pairs, index, spec: spec.clone() })
    }

    fn ambient_size(&self) -> Option<u64> {
        self.ring.modulus().checked_pow(self.dims as u32)
    }

    fn decode(&self, idx: u64) -> Vec<u64> {
        let mut out = vec![0; self.dims];
        digits(idx, self.ring.modulus(), self.dims, &mut out);
        out
    }

    fn encode(&self, c: &[u64]) -> u64 {
        c.iter().rev().fold(0, |acc, &d| acc * self.ring.modulus() + d)
    }

    fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let r = &self.ring;
        let twist = self.rule == ProductRule::Standard;
        let mut c: Vec<u64> = a.iter().zip(b).map(|(&x, &y)| r.add(x, y)).collect();
        match self.shape {
            Shape::Heis(n) if twist => {
                let cross = (0..n).fold(0, |acc, j| r.add(acc, r.mul(a[j], b[n + j])));
                c[2 * n] = r.add(c[2 * n], cross);
            }
            Shape::Tri(_) if twist => {
                for (ci, &(j, k)) in self.pairs.iter().enumerate() {
                    for i in j + 1..k {
                        c[ci] = r.add(c[ci], r.mul(a[self.index[j][i]], b[self.index[i][k]]));
                    }
                }
            }
            _ => {}
        }
        c
    }

    /// The inverse formula of the standard product, whatever the rule.
    fn inv(&self, a: &[u64]) -> Vec<u64> {
        let r = &self.ring;
        match self.shape {
            Shape::Heis(n) => {
                let mut c: Vec<u64> = a.iter().map(|&x| r.neg(x)).collect();
                let xy = (0..n).fold(0, |acc, j| r.add(acc, r.mul(a[j], a[n + j])));
                c[2 * n] = r.add(c[2 * n], xy);
                c
            }
            Shape::Tri(n) => {
                // x_{jk} = −a_{jk} − Σ_{j<i<k} a_{ji} x_{ik}
                let mut x = vec![0u64; self.dims];
                for k in 1..n {
                    for j in (0..k).rev() {
                        let mut s = a[self.index[j][k]];
                        for i in j + 1..k {
                            s = r.add(s, r.mul(a[self.index[j][i]], x[self.index[i][k]]));
                        }
                        x[self.index[j][k]] = r.neg(s);
                    }
                }
                x
            }
        }
    }

    fn member(&self, a: &[u64]) -> bool {
        let r = &self.ring;
        match &self.spec {
            GroupSpec::Heisenberg { .. } | GroupSpec::TPlus { .. } => true,
            GroupSpec::Profile(prof) => {
                self.pairs.iter().zip(a).all(|(&(j, k), &e)| r.valuation(e) as i64 >= prof.level(k - j))
            }
            GroupSpec::HSubgroup { n, k, l } => {
                a[..2 * n].iter().all(|&e| r.valuation(e) >= *k) && r.valuation(a[2 * n]) >= *l
            }
        }
    }

    /// Normality in the ambient group is claimed only for `H_n(p^k)`-type
    /// subgroups with `l ≤ k`.
    fn is_normal_spec(&self) -> bool {
        matches!(self.spec, GroupSpec::HSubgroup { k, l, .. } if l <= k)
    }

    fn show(&self, a: &[u64]) -> String {
        let parts: Vec<String> = a.iter().map(u64::to_string).collect();
        format!("({})", parts.join(","))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub axiom: &'static str,
    pub elements: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomTally {
    pub axiom: &'static str,
    pub checked: u64,
    pub failed: u64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct BudgetUsed {
    pub elements: u64,
    pub triples: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GroupReport {
    pub spec: String,
    pub rule: ProductRule,
    pub p: Prime,
    pub m: u32,
    /// Number of elements of the subgroup.
    pub elements: u64,
    pub total: u64,
    pub passed: bool,
    pub violations: Vec<Witness>,
    pub axioms: Vec<AxiomTally>,
    pub budget_used: BudgetUsed,
    pub mode: Mode,
}

impl GroupReport {
    pub fn axiom(&self, name: &str) -> Option<&AxiomTally> {
        self.axioms.iter().find(|a| a.axiom == name)
    }
}

struct Tally {
    axiom: &'static str,
    checked: u64,
    failed: u64,
    witnesses: Vec<Witness>,
}

impl Tally {
    fn new(axiom: &'static str) -> Self {
        Tally { axiom, checked: 0, failed: 0, witnesses: Vec::new() }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.checked += other.checked;
        self.failed += other.failed;
        let room = MAX_WITNESSES.saturating_sub(self.witnesses.len());
        self.witnesses.extend(other.witnesses.into_iter().take(room));
        self
    }

    fn record(&mut self, ok: bool, witness: impl FnOnce() -> Vec<String>) {
        self.checked += 1;
        if !ok {
            self.failed += 1;
            if self.witnesses.len() < MAX_WITNESSES {
                self.witnesses.push(Witness { axiom: self.axiom, elements: witness() });
            }
        }
    }
}

/// Checks identity, closure, inverses and associativity (and conjugation
/// closure for normal subgroups) over `Z/p^m Z`.
pub fn brute_group_axioms(
    spec: &GroupSpec,
    p: Prime,
    m: u32,
    rule: ProductRule,
    budget: &Budget,
    seed: u64,
) -> Result<GroupReport> {
    let ring = QuotientRing::new(p, m)?;
    let model = Model::new(spec, ring, rule)?;
    let ambient = model.ambient_size().filter(|&a| a <= budget.elements).ok_or(Error::BudgetExceeded {
        needed: (ring.modulus() as u128).saturating_pow(model.dims as u32),
        budget: budget.elements as u128,
    })?;

    let members: Vec<u64> = (0..ambient).into_par_iter().filter(|&i| model.member(&model.decode(i))).collect();
    let mut pos = vec![u32::MAX; ambient as usize];
    for (i, &a) in members.iter().enumerate() {
        pos[a as usize] = i as u32;
    }
    let coords: Vec<Vec<u64>> = members.par_iter().map(|&a| model.decode(a)).collect();
    let size = members.len() as u64;
    let e = vec![0u64; model.dims];

    let mut identity = Tally::new("identity");
    identity.record(model.member(&e), || vec![model.show(&e)]);
    let identity = coords
        .par_iter()
        .fold(
            || Tally::new("identity"),
            |mut t, a| {
                t.record(model.mul(&e, a) == *a && model.mul(a, &e) == *a, || vec![model.show(a)]);
                t
            },
        )
        .reduce(|| Tally::new("identity"), Tally::merge)
        .merge(identity);

    let keep_table = size.saturating_mul(size) <= TABLE_LIMIT;
    let rows: Vec<(Vec<u32>, Tally)> = coords
        .par_iter()
        .map(|a| {
            let mut t = Tally::new("closure");
            let mut row = Vec::with_capacity(if keep_table { coords.len() } else { 0 });
            for b in &coords {
                let c = model.mul(a, b);
                let k = pos[model.encode(&c) as usize];
                t.record(k != u32::MAX, || vec![model.show(a), model.show(b), model.show(&c)]);
                if keep_table {
                    row.push(k);
                }
            }
            (row, t)
        })
        .collect();
    let mut closure = Tally::new("closure");
    let mut table = Vec::new();
    for (row, t) in rows {
        closure = closure.merge(t);
        table.extend(row);
    }
    let closed = closure.failed == 0;

    let inverse = coords
        .par_iter()
        .fold(
            || Tally::new("inverse"),
            |mut t, a| {
                let ai = model.inv(a);
                let ok = model.member(&ai) && model.mul(a, &ai) == e && model.mul(&ai, a) == e;
                t.record(ok, || vec![model.show(a), model.show(&ai)]);
                t
            },
        )
        .reduce(|| Tally::new("inverse"), Tally::merge);

    let triple_count = size.saturating_mul(size).saturating_mul(size);
    let exhaustive = triple_count <= budget.triples;
    let assoc_ok = |t: &mut Tally, i: usize, j: usize, k: usize| {
        if closed && keep_table {
            let n = coords.len();
            let l = table[table[i * n + j] as usize * n + k];
            let r = table[i * n + table[j * n + k] as usize];
            t.record(l == r, || vec![model.show(&coords[i]), model.show(&coords[j]), model.show(&coords[k])]);
        } else {
            let (a, b, c) = (&coords[i], &coords[j], &coords[k]);
            let l = model.mul(&model.mul(a, b), c);
            let r = model.mul(a, &model.mul(b, c));
            t.record(l == r, || vec![model.show(a), model.show(b), model.show(c)]);
        }
    };
    let n = coords.len();
    let (associativity, triples) = if n == 0 {
        (Tally::new("associativity"), 0)
    } else if exhaustive {
        let t = (0..n)
            .into_par_iter()
            .fold(
                || Tally::new("associativity"),
                |mut t, i| {
                    for j in 0..n {
                        for k in 0..n {
                            assoc_ok(&mut t, i, j, k);
                        }
                    }
                    t
                },
            )
            .reduce(|| Tally::new("associativity"), Tally::merge);
        (t, triple_count)
    } else {
        const CHUNK: u64 = 10_000;
        let chunks = budget.sampled_triples.div_ceil(CHUNK);
        let t = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(c));
                let mut t = Tally::new("associativity");
                let todo = CHUNK.min(budget.sampled_triples - c * CHUNK);
                for _ in 0..todo {
                    assoc_ok(&mut t, rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
                }
                t
            })
            .reduce(|| Tally::new("associativity"), Tally::merge);
        (t, budget.sampled_triples)
    };

    let mut tallies = vec![identity, closure, inverse, associativity];
    if model.is_normal_spec() {
        let conj = (0..ambient)
            .into_par_iter()
            .fold(
                || Tally::new("conjugation"),
                |mut t, gi| {
                    let g = model.decode(gi);
                    let gv = model.inv(&g);
                    for u in &coords {
                        let c = model.mul(&model.mul(&g, u), &gv);
                        t.record(model.member(&c), || vec![model.show(&g), model.show(u), model.show(&c)]);
                    }
                    t
                },
            )
            .reduce(|| Tally::new("conjugation"), Tally::merge);
        tallies.push(conj);
    }

    let total = tallies.iter().map(|t| t.checked).sum();
    let passed = tallies.iter().all(|t| t.failed == 0);
    let axioms = tallies.iter().map(|t| AxiomTally { axiom: t.axiom, checked: t.checked, failed: t.failed }).collect();
    let violations = tallies.into_iter().flat_map(|t| t.witnesses).collect();
    Ok(GroupReport {
        spec: spec.to_string(),
        rule,
        p,
        m,
        elements: size,
        total,
        passed,
        violations,
        axioms,
        budget_used: BudgetUsed { elements: ambient, triples },
        mode: if exhaustive { Mode::Exhaustive } else { Mode::Sampled },
    })
}

/// Sum of the measures of the children of a cell, which should equal the
/// measure of the cell itself.
pub fn children_measure(c: &Cell) -> BigRational {
    c.children().iter().map(|k| haar_ball(c.prime(), k.scale())).fold(BigRational::zero(), |a, b| a + b)
}

/// `true` when `H(c + p^k Z_p) = p^(−k)` splits evenly across the `p^(m−k)`
/// sub-cells of scale `m`.
pub fn ball_splits(p: Prime, l: i64, m: i64) -> bool {
    if m < l {
        return false;
    }
    let parts = BigRational::from_integer(num_traits::pow(p.big(), (m - l) as usize));
    haar_ball(p, l) == parts * haar_ball(p, m) && haar_ball(p, 0).is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    fn b() -> Budget {
        Budget::default()
    }

    #[test]
    fn quotient_ring() {
        let r = QuotientRing::new(p(3), 2).unwrap();
        assert_eq!(r.modulus(), 9);
        assert_eq!(r.mul(4, 7), 1);
        assert_eq!(r.neg(0), 0);
        assert_eq!(r.sub(2, 5), 6);
        assert_eq!(r.valuation(0), 2);
        assert_eq!(r.valuation(3), 1);
        assert_eq!(r.reduce(-1), 8);
        assert!(QuotientRing::new(p(2), 0).is_err());
        assert!(QuotientRing::new(p(2), 40).is_err());
    }

    #[test]
    fn haar_balls() {
        assert!(haar_ball(p(2), 0).is_one());
        assert_eq!(haar_ball(p(2), 3), BigRational::new(1.into(), 8.into()));
        assert_eq!(haar_ball(p(3), -1), BigRational::from_integer(3.into()));
        for l in -3..3 {
            for m in l..l + 4 {
                assert!(ball_splits(p(5), l, m));
            }
        }
        let c = Cell::canonical(&PRational::from_frac(1, 3, p(2)), 4);
        assert_eq!(children_measure(&c), haar_ball(p(2), 4));
    }

    #[test]
    fn coset_cover() {
        let r = coset_cover_check(p(2), 1, 1000, 1, 1000).unwrap();
        assert_eq!(r.cosets, 2);
        assert!(r.passed);
        assert_eq!(coset_cover_check(p(3), 2, 200, 2, 1000).unwrap().cosets, 9);
        assert_eq!(coset_cover_check(p(5), 0, 50, 3, 1000).unwrap().cosets, 1);
        assert!(coset_cover_check(p(5), 6, 10, 3, 1000).is_err());
    }

    #[test]
    fn triangular_ball_counts() {
        let r = count_triangular_ball(p(2), 3, 1, 2, 10_000, false).unwrap();
        assert_eq!((r.count.as_str(), r.total.as_str(), r.ratio.as_str()), ("4", "64", "1/16"));
        assert!(r.passed && r.mode == Mode::Exhaustive);
        let r = count_triangular_ball(p(3), 2, 1, 2, 10_000, false).unwrap();
        assert_eq!((r.count.as_str(), r.total.as_str()), ("3", "9"));
        assert!(r.passed);
        assert_eq!(count_triangular_ball(p(2), 2, 2, 3, 10_000, false).unwrap().ratio, "1/4");
        assert_eq!(count_triangular_ball(p(2), 3, 0, 1, 10_000, false).unwrap().ratio, "1");
        assert!(count_triangular_ball(p(2), 3, 1, 2, 10, false).is_err());
        let f = count_triangular_ball(p(2), 3, 1, 2, 10, true).unwrap();
        assert_eq!(f.mode, Mode::Formula);
        assert_eq!(f.ratio, "1/16");
        assert!(count_triangular_ball(p(2), 3, 1, 1, 10_000, false).is_err());
    }

    #[test]
    fn dilation_images() {
        assert!(dilation_image_matches(p(2), 3, 1, 3, 10_000).unwrap());
        assert!(dilation_image_matches(p(3), 2, 1, 2, 10_000).unwrap());
        assert!(dilation_image_matches(p(2), 2, 2, 3, 10_000).unwrap());
    }

    #[test]
    fn heisenberg_mod_4() {
        let r = brute_group_axioms(&GroupSpec::Heisenberg { n: 1 }, p(2), 2, ProductRule::Standard, &b(), 0).unwrap();
        assert_eq!(r.elements, 64);
        assert_eq!(r.budget_used.triples, 64 * 64 * 64);
        assert!(r.passed, "{:?}", r.violations);
        assert_eq!(r.mode, Mode::Exhaustive);
    }

    #[test]
    fn tplus_mod_4() {
        let r = brute_group_axioms(&GroupSpec::TPlus { n: 3 }, p(2), 2, ProductRule::Standard, &b(), 0).unwrap();
        assert_eq!(r.elements, 64);
        assert!(r.passed);
        let r = brute_group_axioms(&GroupSpec::TPlus { n: 4 }, p(2), 1, ProductRule::Standard, &b(), 0).unwrap();
        assert!(r.passed);
    }

    #[test]
    fn subgroups() {
        let prof = SubgroupProfile::new(vec![1, 2]).unwrap();
        let r = brute_group_axioms(&GroupSpec::Profile(prof), p(2), 3, ProductRule::Standard, &b(), 0).unwrap();
        assert!(r.passed);
        assert_eq!(r.elements, 4 * 4 * 2);
        for (k, l) in [(1, 1), (1, 2), (0, 0), (2, 1)] {
            let spec = GroupSpec::HSubgroup { n: 1, k, l };
            let r = brute_group_axioms(&spec, p(2), 3, ProductRule::Standard, &b(), 0).unwrap();
            assert!(r.passed, "{spec}: {:?}", r.violations);
            assert_eq!(r.axiom("conjugation").is_some(), l <= k);
        }
        assert!(brute_group_axioms(
            &GroupSpec::HSubgroup { n: 1, k: 1, l: 3 },
            p(2),
            4,
            ProductRule::Standard,
            &b(),
            0
        )
        .is_err());
    }

    #[test]
    fn non_normal_subgroup_is_detected_when_forced() {
        // with l > k the conjugation closure fails; assert it by hand
        let ring = QuotientRing::new(p(2), 3).unwrap();
        let spec = GroupSpec::HSubgroup { n: 1, k: 1, l: 2 };
        let model = Model::new(&spec, ring, ProductRule::Standard).unwrap();
        let u = vec![2, 0, 0];
        let g = vec![0, 1, 0];
        assert!(model.member(&u));
        let c = model.mul(&model.mul(&g, &u), &model.inv(&g));
        assert!(!model.member(&c));
    }

    #[test]
    fn dropped_twist_is_caught() {
        let r =
            brute_group_axioms(&GroupSpec::Heisenberg { n: 1 }, p(2), 2, ProductRule::DroppedTwist, &b(), 0).unwrap();
        assert!(!r.passed);
        assert!(r.axiom("inverse").unwrap().failed > 0);
        assert!(!r.violations.is_empty());
        let r = brute_group_axioms(&GroupSpec::TPlus { n: 3 }, p(2), 2, ProductRule::DroppedTwist, &b(), 0).unwrap();
        assert!(!r.passed);
    }

    #[test]
    fn sampled_mode_and_budgets() {
        let small = Budget { elements: 10_000, triples: 1000, sampled_triples: 5000 };
        let r = brute_group_axioms(&GroupSpec::Heisenberg { n: 1 }, p(2), 2, ProductRule::Standard, &small, 9).unwrap();
        assert_eq!(r.mode, Mode::Sampled);
        assert_eq!(r.budget_used.triples, 5000);
        assert!(r.passed);
        let tiny = Budget { elements: 10, ..Budget::default() };
        assert!(brute_group_axioms(&GroupSpec::Heisenberg { n: 1 }, p(2), 2, ProductRule::Standard, &tiny, 0).is_err());
    }
}

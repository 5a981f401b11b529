//! Cells `c + p^k Z_p` in `Q_p` and the `(p+1)`-regular tree they form
//! under inclusion.
//!
//! A cell is stored by its canonical center: `0` when `c ∈ p^k Z_p`, and
//! otherwise `p^v · r` where `c = p^v u` and `r ∈ [0, p^(k−v))` is the
//! residue of the unit `u` modulo `p^(k−v)`. Canonical forms make cell
//! equality structural.

use std::collections::VecDeque;
use std::fmt;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::affine::AffineMap;
use crate::error::{Error, Result};
use crate::padic::{PNorm, PRational, Prime, Valuation};

/// Default bound on the number of nodes [`export_tree`] will materialise.
pub const DEFAULT_NODE_LIMIT: u64 = 100_000;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Cell {
    center: PRational,
    scale: i64,
}

/// `x` modulo `m` in `[0, m)`, for `x` with denominator coprime to `m`.
fn residue(x: &BigRational, m: &BigInt) -> BigInt {
    let g = x.denom().extended_gcd(m);
    debug_assert!(g.gcd.is_one(), "denominator must be invertible");
    (x.numer() * g.x).mod_floor(m)
}

impl Cell {
    /// The cell `c + p^k Z_p` in canonical form.
    pub fn canonical(c: &PRational, k: i64) -> Cell {
        let p = c.prime();
        let zero = Cell { center: PRational::zero(p), scale: k };
        let Some((v, u)) = c.split_unit() else { return zero };
        if v >= k {
            return zero;
        }
        let span = (k - v) as u32;
        let m = num_traits::pow(p.big(), span as usize);
        let r = residue(&u, &m);
        let center = &PRational::new(BigRational::from_integer(r), p) * &PRational::prime_power(v, p);
        Cell { center, scale: k }
    }

    /// `Z_p`.
    pub fn unit_ball(p: Prime) -> Cell {
        Cell { center: PRational::zero(p), scale: 0 }
    }

    pub fn center(&self) -> &PRational {
        &self.center
    }

    pub fn scale(&self) -> i64 {
        self.scale
    }

    pub fn prime(&self) -> Prime {
        self.center.prime()
    }

    /// `p^(−k)`, the diameter (and Haar measure) of the cell.
    pub fn diameter(&self) -> PNorm {
        PNorm::from_int_exponent(self.scale)
    }

    pub fn contains(&self, x: &PRational) -> bool {
        (x - &self.center).vp() >= Valuation::Finite(self.scale)
    }

    pub fn contains_cell(&self, other: &Cell) -> bool {
        other.scale >= self.scale && self.contains(&other.center)
    }

    /// The `p` cells `c + j p^k + p^(k+1) Z_p`, `j = 0, …, p − 1`.
    pub fn children(&self) -> Vec<Cell> {
        let p = self.prime();
        let step = PRational::prime_power(self.scale, p);
        (0..p.get() as i64)
            .map(|j| Cell::canonical(&(&self.center + &(&PRational::from_int(j, p) * &step)), self.scale + 1))
            .collect()
    }

    pub fn parent(&self) -> Cell {
        Cell::canonical(&self.center, self.scale - 1)
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.center, self.scale)
    }
}

impl fmt::Debug for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Cell", 3)?;
        st.serialize_field("center", &self.center)?;
        st.serialize_field("scale", &self.scale)?;
        st.serialize_field("p", &self.prime())?;
        st.end()
    }
}

fn check_primes(a: &Cell, b: &Cell) -> Result<()> {
    a.center.check_same_prime(&b.center)
}

/// The smallest cell containing both.
pub fn meet(a: &Cell, b: &Cell) -> Result<Cell> {
    check_primes(a, b)?;
    let mut m = a.scale.min(b.scale);
    if let Valuation::Finite(v) = (&a.center - &b.center).vp() {
        m = m.min(v);
    }
    Ok(Cell::canonical(&a.center, m))
}

/// Path length in the tree of cells.
pub fn rho(a: &Cell, b: &Cell) -> Result<u64> {
    let m = meet(a, b)?.scale;
    Ok(((a.scale - m) + (b.scale - m)) as u64)
}

/// `f(C)`: the cell `(a c + b) + p^(k + vp(a)) Z_p`.
pub fn act(f: &AffineMap, c: &Cell) -> Result<Cell> {
    f.a().check_same_prime(&c.center)?;
    let Valuation::Finite(va) = f.a().vp() else {
        return Err(Error::Domain("cells move only under invertible maps (a = 0)".into()));
    };
    Ok(Cell::canonical(&f.apply(&c.center), c.scale + va))
}

/// `ρ(f(Z_p), g(Z_p))`: a left-invariant semimetric on the invertible maps
/// that vanishes exactly when `g⁻¹ ∘ f ∈ A*(Z_p)`.
pub fn cell_semimetric(f: &AffineMap, g: &AffineMap) -> Result<u64> {
    let z = Cell::unit_ball(f.prime());
    rho(&act(f, &z)?, &act(g, &z)?)
}

/// Witness that a finite set of cells is bounded: an enclosing cell and the
/// smallest diameter in the set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundedWitness {
    pub enclosing: Cell,
    pub min_diameter: PNorm,
}

pub fn is_bounded_cellset(cs: &[Cell]) -> Result<BoundedWitness> {
    let (first, rest) = cs.split_first().ok_or_else(|| Error::InvalidArgument("empty cell set".into()))?;
    let mut enclosing = first.clone();
    let mut max_scale = first.scale;
    for c in rest {
        enclosing = meet(&enclosing, c)?;
        max_scale = max_scale.max(c.scale);
    }
    Ok(BoundedWitness { enclosing, min_diameter: PNorm::from_int_exponent(max_scale) })
}

/// Depth bound for [`separating_cell`]:
/// `|vp(Δa)| + |vp(Δb)| + |vp(a_f)| + 2`, skipping infinite valuations.
pub fn separation_depth(f: &AffineMap, g: &AffineMap) -> Result<u64> {
    let d = f.difference(g)?;
    let term = |x: &PRational| x.vp().finite().map_or(0, i64::unsigned_abs);
    Ok(term(d.a()) + term(d.b()) + term(f.a()) + 2)
}

/// Searches the cells `c + p^k Z_p`, `c ∈ {0, 1}`, `0 ≤ k ≤ D`, for one with
/// `f(C) ≠ g(C)`. For distinct invertible maps one always exists.
pub fn separating_cell(f: &AffineMap, g: &AffineMap) -> Result<Option<Cell>> {
    let depth = separation_depth(f, g)? as i64;
    let p = f.prime();
    for k in 0..=depth {
        for c in [PRational::zero(p), PRational::one(p)] {
            let cell = Cell::canonical(&c, k);
            if act(f, &cell)? != act(g, &cell)? {
                return Ok(Some(cell));
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TreeFormat {
    Dot,
    Json,
}

/// Number of nodes in the truncation of depth `depth`, if it fits in `u64`.
pub fn tree_size(p: Prime, depth: u32) -> Option<u64> {
    let mut total: u64 = 0;
    let mut level: u64 = 1;
    for i in 0..=depth {
        total = total.checked_add(level)?;
        if i < depth {
            level = level.checked_mul(p.get())?;
        }
    }
    Some(total)
}

/// The subtree of `root` down to `depth` levels, breadth first.
pub fn tree_nodes(root: &Cell, depth: u32, node_limit: u64) -> Result<(Vec<Cell>, Vec<(usize, usize)>)> {
    let size = tree_size(root.prime(), depth);
    match size {
        Some(n) if n <= node_limit => {}
        _ => {
            return Err(Error::BudgetExceeded {
                needed: size.map_or(u128::MAX, u128::from),
                budget: node_limit as u128,
            })
        }
    }
    let mut nodes = vec![root.clone()];
    let mut edges = Vec::new();
    let mut queue = VecDeque::from([(0usize, 0u32)]);
    while let Some((i, d)) = queue.pop_front() {
        if d == depth {
            continue;
        }
        for child in nodes[i].children() {
            let j = nodes.len();
            nodes.push(child);
            edges.push((i, j));
            queue.push_back((j, d + 1));
        }
    }
    Ok((nodes, edges))
}

pub fn export_tree(root: &Cell, depth: u32, format: TreeFormat, node_limit: u64) -> Result<String> {
    let (nodes, edges) = tree_nodes(root, depth, node_limit)?;
    match format {
        TreeFormat::Dot => {
            let mut out = String::from("digraph cells {\n");
            for n in &nodes {
                writeln!(out, "  \"{n}\";").unwrap();
            }
            for (a, b) in &edges {
                writeln!(out, "  \"{}\" -> \"{}\";", nodes[*a], nodes[*b]).unwrap();
            }
            out.push_str("}\n");
            Ok(out)
        }
        TreeFormat::Json => {
            let doc = serde_json::json!({
                "p": root.prime(),
                "nodes": nodes,
                "edges": edges,
            });
            Ok(serde_json::to_string_pretty(&doc).expect("serialisable") + "\n")
        }
    }
}

/// The canonical representatives of `Z_p / p^j Z_p` as cells of scale `j`.
pub fn coset_cells(p: Prime, j: u32) -> Vec<Cell> {
    let count = num_traits::pow(p.big(), j as usize);
    let mut out = Vec::new();
    let mut r = BigInt::zero();
    while r < count {
        out.push(Cell::canonical(&PRational::new(BigRational::from_integer(r.clone()), p), j as i64));
        r += 1;
    }
    out
}

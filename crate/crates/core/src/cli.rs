//! The `padic` command line: `eval`, `dist`, `verify`, `cells`, `haar`.
//!
//! Operands are inline JSON, a path to a JSON file, or a bare rational
//! literal. Exit status is 0 on success, 1 when a verification fails and 2
//! for usage or input errors.

use std::io::Write;
use std::path::Path;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::{json, Value as Json};

use crate::affine::{self, AffineMap};
use crate::cells::{self, Cell, TreeFormat};
use crate::error::{Error, Result};
use crate::finite::{self, Budget};
use crate::heisenberg::{self as heis, HPoint};
use crate::matrix::{self, PMatrix, PVector};
use crate::padic::{self, parse_rational, Capped, PNorm, PRational, Prime};
use crate::triangular::{self, UTMatrix};
use crate::verify::{self, Mutant, Params, Suite};

#[derive(Parser, Debug)]
#[command(name = "padic", version, about = "Exact p-adic norms, invariant ultrametrics and their verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a single operation on its operands.
    Eval(EvalArgs),
    /// Evaluate a distance between two operands.
    Dist(DistArgs),
    /// Run a named verification suite.
    Verify(VerifyArgs),
    /// Cell tree export and the affine action on cells.
    Cells {
        #[command(subcommand)]
        command: CellsCommand,
    },
    /// Haar measure counts of triangular balls over finite quotients.
    Haar(HaarArgs),
}

#[derive(Args, Debug)]
struct Common {
    /// The prime; may be omitted when every operand carries its own "p".
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    json: bool,
    /// Also print a floating-point approximation, marked as such.
    #[arg(long)]
    decimal: bool,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(value_enum)]
    kind: EvalKind,
    operands: Vec<String>,
    #[command(flatten)]
    common: Common,
    /// Cap for the truncated gauges.
    #[arg(long)]
    t: Option<String>,
    /// Scalar for dilations.
    #[arg(long)]
    r: Option<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EvalKind {
    Vp,
    Pabs,
    Rp,
    RpCapped,
    Add,
    Mul,
    Inv,
    Vecnorm,
    Matnorm,
    Matmul,
    Matinv,
    Det,
    InGlZp,
    GlGauge,
    GlGaugeCapped,
    GlLogGauge,
    TriNorm,
    TriInverse,
    NilpotentInverse,
    Dilate,
    HMul,
    HInv,
    HNorm,
    HNormTilde,
    HDilate,
    HConjugate,
    Embed,
    AffCompose,
    AffInverse,
    AffNorm,
    AffL,
    AffLprime,
    AffMatrix,
    Meet,
    Act,
    Parent,
    Children,
}

#[derive(Args, Debug)]
struct DistArgs {
    #[arg(value_enum)]
    kind: DistKind,
    x: String,
    y: String,
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    t: Option<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DistKind {
    Dp,
    DpPrime,
    DpLog,
    /// ‖A − B‖ on matrices.
    Matrix,
    /// r′(B⁻¹A) on GL(n, Q_p).
    GlLeft,
    TriLeft,
    TriRight,
    TriDiag,
    HLeft,
    HRight,
    HLeftTilde,
    HRightTilde,
    Aff,
    AffLprime,
    Rho,
    CellSemimetric,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    suite: String,
    #[arg(long)]
    p: u64,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Element budget for exhaustive enumeration.
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long, default_value_t = 1)]
    l: u32,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    mutant: Option<String>,
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand, Debug)]
enum CellsCommand {
    /// Print the subtree below a root cell down to a depth.
    Export {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        depth: u32,
        /// Root cell; defaults to Z_p.
        #[arg(long)]
        root: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Dot)]
        format: Format,
        #[arg(long, default_value_t = cells::DEFAULT_NODE_LIMIT)]
        limit: u64,
    },
    /// Apply an affine map to a cell.
    Act {
        #[arg(long)]
        f: String,
        #[arg(long)]
        cell: String,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Dot,
    Json,
}

#[derive(Args, Debug)]
struct HaarArgs {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    n: usize,
    /// Ball exponents, one row group each.
    #[arg(long, num_args = 1.., default_values_t = [1u32])]
    l: Vec<u32>,
    /// Quotient precisions; defaults to l(n−1) and l(n−1)+1.
    #[arg(long, num_args = 1..)]
    m: Vec<u32>,
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    json: bool,
}

/// Runs the command line and returns the process exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(Outcome { text, code }) => {
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

struct Outcome {
    text: String,
    code: i32,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, code: 0 }
    }
}

fn dispatch(cmd: Command) -> Result<Outcome> {
    match cmd {
        Command::Eval(a) => eval(a).map(Outcome::ok),
        Command::Dist(a) => dist(a).map(Outcome::ok),
        Command::Verify(a) => verify_cmd(a),
        Command::Cells { command } => cells_cmd(command).map(Outcome::ok),
        Command::Haar(a) => haar(a),
    }
}

/// A printed result: exact text, its JSON form, and an optional float.
struct Printed {
    text: String,
    json: Json,
    approx: Option<f64>,
}

impl Printed {
    fn render(&self, common: &Common) -> String {
        let mut s = if common.json { self.json.to_string() } else { self.text.clone() };
        s.push('\n');
        if common.decimal {
            match self.approx {
                Some(f) => s.push_str(&format!("approximately {f:e} (decimal, not exact)\n")),
                None => s.push_str("approximately: no decimal form\n"),
            }
        }
        s
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> Json {
    serde_json::to_value(v).expect("serialisable")
}

fn norm(n: PNorm, p: Prime) -> Printed {
    Printed { text: n.display(p), json: to_json(&n), approx: Some(n.to_f64(p)) }
}

fn capped(c: Capped, p: Prime) -> Printed {
    let json = match &c {
        Capped::Norm(n) => to_json(n),
        Capped::Cap(t) => json!({"kind": "cap", "value": t.to_string()}),
    };
    Printed { text: c.display(p), json, approx: Some(c.to_value(p).to_f64()) }
}

fn rational(x: PRational) -> Printed {
    Printed { text: x.to_string(), json: Json::String(x.to_string()), approx: Some(x.to_f64()) }
}

fn shown<T: std::fmt::Display + serde::Serialize>(x: &T) -> Printed {
    Printed { text: x.to_string(), json: to_json(x), approx: None }
}

fn integer(v: u64) -> Printed {
    Printed { text: v.to_string(), json: json!(v), approx: None }
}

fn boolean(b: bool) -> Printed {
    Printed { text: b.to_string(), json: json!(b), approx: None }
}

/// Reads an operand: inline JSON, a JSON file, or a bare literal.
fn load(s: &str) -> Result<Json> {
    let t = s.trim();
    if t.starts_with('{') || t.starts_with('[') {
        return serde_json::from_str(t).map_err(|e| Error::Parse(format!("bad JSON operand: {e}")));
    }
    if parse_rational(t).is_ok() {
        return Ok(Json::String(t.to_string()));
    }
    let path = Path::new(t);
    if path.is_file() {
        let body = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {t}: {e}")))?;
        return serde_json::from_str(&body).map_err(|e| Error::Parse(format!("bad JSON in {t}: {e}")));
    }
    Err(Error::Parse(format!("operand {t:?} is neither JSON, a rational literal, nor a readable file")))
}

fn rational_json(v: &Json) -> Result<BigRational> {
    match v {
        Json::String(s) => parse_rational(s),
        Json::Number(n) if n.is_i64() => Ok(BigRational::from_integer(n.as_i64().unwrap().into())),
        _ => Err(Error::Parse(format!("expected a rational literal, got {v}"))),
    }
}

/// Resolves the prime from `--p` and any `"p"` fields, which must agree.
fn resolve_prime(flag: Option<u64>, operands: &[Json]) -> Result<Prime> {
    let mut found = flag;
    for o in operands {
        if let Some(v) = o.get("p") {
            let q = v.as_u64().ok_or_else(|| Error::Parse(format!("\"p\" must be a positive integer, got {v}")))?;
            match found {
                Some(f) if f != q => return Err(Error::PrimeMismatch(f, q)),
                _ => found = Some(q),
            }
        }
    }
    Prime::new(found.ok_or_else(|| Error::InvalidArgument("no prime given: pass --p".into()))?)
}

fn field<'a>(v: &'a Json, name: &str) -> Result<&'a Json> {
    v.get(name).ok_or_else(|| Error::Parse(format!("missing field {name:?} in {v}")))
}

fn as_rational(v: &Json, p: Prime) -> Result<PRational> {
    Ok(PRational::new(rational_json(v)?, p))
}

fn as_vector(v: &Json, p: Prime) -> Result<PVector> {
    let items = v.as_array().ok_or_else(|| Error::Parse(format!("expected an array, got {v}")))?;
    PVector::new(items.iter().map(|e| as_rational(e, p)).collect::<Result<_>>()?, p)
}

fn as_matrix(v: &Json, p: Prime) -> Result<PMatrix> {
    let rows = match v {
        Json::Object(_) => field(v, "matrix")?,
        _ => v,
    };
    let rows = rows.as_array().ok_or_else(|| Error::Parse(format!("expected rows, got {rows}")))?;
    let rows = rows.iter().map(|r| Ok(as_vector(r, p)?.entries().to_vec())).collect::<Result<Vec<_>>>()?;
    PMatrix::from_rows(rows, p)
}

fn as_ut(v: &Json, p: Prime) -> Result<UTMatrix> {
    UTMatrix::new(as_matrix(v, p)?)
}

fn as_hpoint(v: &Json, p: Prime) -> Result<HPoint> {
    HPoint::new(as_vector(field(v, "x")?, p)?, as_vector(field(v, "y")?, p)?, as_rational(field(v, "t")?, p)?)
}

fn as_affine(v: &Json, p: Prime) -> Result<AffineMap> {
    AffineMap::new(as_rational(field(v, "a")?, p)?, as_rational(field(v, "b")?, p)?)
}

fn as_cell(v: &Json, p: Prime) -> Result<Cell> {
    let k = field(v, "scale")?.as_i64().ok_or_else(|| Error::Parse(format!("scale must be an integer in {v}")))?;
    Ok(Cell::canonical(&as_rational(field(v, "center")?, p)?, k))
}

fn cap(t: &Option<String>, default: BigRational) -> Result<BigRational> {
    t.as_deref().map(parse_rational).transpose().map(|t| t.unwrap_or(default))
}

fn arity(kind: &str, got: usize, want: usize) -> Result<()> {
    if got != want {
        return Err(Error::InvalidArgument(format!("{kind} takes {want} operand(s), got {got}")));
    }
    Ok(())
}

fn eval(a: EvalArgs) -> Result<String> {
    use EvalKind::*;
    let ops = a.operands.iter().map(|s| load(s)).collect::<Result<Vec<_>>>()?;
    let p = resolve_prime(a.common.p, &ops)?;
    let want = match a.kind {
        Add | Mul | Matmul | HMul | HConjugate | AffCompose | Meet | Act => 2,
        _ => 1,
    };
    arity(&format!("{:?}", a.kind).to_lowercase(), ops.len(), want)?;
    let x = &ops[0];
    let y = ops.get(1);
    let scalar = || -> Result<PRational> {
        let r = a.r.as_deref().ok_or_else(|| Error::InvalidArgument("--r is required".into()))?;
        PRational::parse(r, p)
    };
    let out = match a.kind {
        Vp => {
            let v = padic::vp(&as_rational(x, p)?);
            Printed { text: v.to_string(), json: json!(v.to_string()), approx: None }
        }
        Pabs => norm(padic::pabs(&as_rational(x, p)?), p),
        Rp => norm(padic::rp(&as_rational(x, p)?)?, p),
        RpCapped => capped(padic::rp_capped(&as_rational(x, p)?, &cap(&a.t, padic::default_cap(p))?)?, p),
        Add => rational(&as_rational(x, p)? + &as_rational(y.unwrap(), p)?),
        Mul => rational(&as_rational(x, p)? * &as_rational(y.unwrap(), p)?),
        Inv => rational(as_rational(x, p)?.inv()?),
        Vecnorm => norm(matrix::vecnorm(&as_vector(x, p)?), p),
        Matnorm => norm(matrix::matnorm(&as_matrix(x, p)?), p),
        Matmul => shown(&as_matrix(x, p)?.try_mul(&as_matrix(y.unwrap(), p)?)?),
        Matinv => shown(&as_matrix(x, p)?.inverse()?),
        Det => rational(as_matrix(x, p)?.det()),
        InGlZp => boolean(matrix::in_gl_zp(&as_matrix(x, p)?)),
        GlGauge => norm(matrix::gl_gauge(&as_matrix(x, p)?)?, p),
        GlGaugeCapped => capped(matrix::gl_gauge_capped(&as_matrix(x, p)?, &cap(&a.t, padic::default_cap(p))?)?, p),
        GlLogGauge => integer(matrix::gl_log_gauge(&as_matrix(x, p)?)?),
        TriNorm => norm(triangular::tri_norm(&as_ut(x, p)?), p),
        TriInverse => shown(&as_ut(x, p)?.inverse()?),
        NilpotentInverse => shown(&triangular::nilpotent_inverse(&as_ut(x, p)?)?),
        Dilate => shown(&triangular::dilate(&as_ut(x, p)?, &scalar()?)),
        HMul => shown(&heis::h_mul(&as_hpoint(x, p)?, &as_hpoint(y.unwrap(), p)?)?),
        HInv => shown(&heis::h_inv(&as_hpoint(x, p)?)),
        HNorm => norm(heis::h_norm(&as_hpoint(x, p)?), p),
        HNormTilde => norm(heis::h_norm_tilde(&as_hpoint(x, p)?), p),
        HDilate => shown(&heis::h_dilate(&as_hpoint(x, p)?, &scalar()?)),
        HConjugate => shown(&heis::h_conjugate(&as_hpoint(x, p)?, &as_hpoint(y.unwrap(), p)?)?),
        Embed => shown(&heis::embed_to_triangular(&as_hpoint(x, p)?)),
        AffCompose => shown(&as_affine(x, p)?.compose(&as_affine(y.unwrap(), p)?)?),
        AffInverse => shown(&as_affine(x, p)?.inverse()?),
        AffNorm => norm(affine::aff_norm(&as_affine(x, p)?), p),
        AffL => norm(affine::aff_l(&as_affine(x, p)?)?, p),
        AffLprime => capped(affine::aff_lprime(&as_affine(x, p)?, &cap(&a.t, affine::default_lprime_cap())?)?, p),
        AffMatrix => shown(&as_affine(x, p)?.to_matrix()),
        Meet => shown(&cells::meet(&as_cell(x, p)?, &as_cell(y.unwrap(), p)?)?),
        Act => shown(&cells::act(&as_affine(x, p)?, &as_cell(y.unwrap(), p)?)?),
        Parent => shown(&as_cell(x, p)?.parent()),
        Children => {
            let kids = as_cell(x, p)?.children();
            let text: Vec<String> = kids.iter().map(|c| c.to_string()).collect();
            Printed { text: text.join(" "), json: to_json(&kids), approx: None }
        }
    };
    Ok(out.render(&a.common))
}

fn dist(a: DistArgs) -> Result<String> {
    use DistKind::*;
    let (x, y) = (load(&a.x)?, load(&a.y)?);
    let p = resolve_prime(a.common.p, &[x.clone(), y.clone()])?;
    let out = match a.kind {
        Dp => norm(padic::dp(&as_rational(&x, p)?, &as_rational(&y, p)?)?, p),
        DpPrime => {
            capped(padic::dp_prime(&as_rational(&x, p)?, &as_rational(&y, p)?, &cap(&a.t, padic::default_cap(p))?)?, p)
        }
        DpLog => integer(padic::dp_log(&as_rational(&x, p)?, &as_rational(&y, p)?)?),
        Matrix => norm(matrix::matnorm(&as_matrix(&x, p)?.try_sub(&as_matrix(&y, p)?)?), p),
        GlLeft => {
            let b = as_matrix(&y, p)?.inverse()?;
            capped(matrix::gl_gauge_capped(&b.try_mul(&as_matrix(&x, p)?)?, &cap(&a.t, padic::default_cap(p))?)?, p)
        }
        TriLeft => norm(triangular::left_metric(&as_ut(&x, p)?, &as_ut(&y, p)?)?, p),
        TriRight => norm(triangular::right_metric(&as_ut(&x, p)?, &as_ut(&y, p)?)?, p),
        TriDiag => norm(triangular::diag_semimetric(&as_ut(&x, p)?, &as_ut(&y, p)?)?, p),
        HLeft => norm(heis::left_metric(&as_hpoint(&x, p)?, &as_hpoint(&y, p)?)?, p),
        HRight => norm(heis::right_metric(&as_hpoint(&x, p)?, &as_hpoint(&y, p)?)?, p),
        HLeftTilde => norm(heis::left_metric_tilde(&as_hpoint(&x, p)?, &as_hpoint(&y, p)?)?, p),
        HRightTilde => norm(heis::right_metric_tilde(&as_hpoint(&x, p)?, &as_hpoint(&y, p)?)?, p),
        Aff => norm(affine::aff_distance(&as_affine(&x, p)?, &as_affine(&y, p)?)?, p),
        AffLprime => capped(
            affine::lprime_left_metric(
                &as_affine(&x, p)?,
                &as_affine(&y, p)?,
                &cap(&a.t, affine::default_lprime_cap())?,
            )?,
            p,
        ),
        Rho => integer(cells::rho(&as_cell(&x, p)?, &as_cell(&y, p)?)?),
        CellSemimetric => integer(cells::cell_semimetric(&as_affine(&x, p)?, &as_affine(&y, p)?)?),
    };
    Ok(out.render(&a.common))
}

fn budget(flag: Option<u64>) -> Result<Budget> {
    let mut b = Budget::from_env()?;
    if let Some(e) = flag {
        b.elements = e;
    }
    Ok(b)
}

fn verify_cmd(a: VerifyArgs) -> Result<Outcome> {
    let suite: Suite = a.suite.parse()?;
    let params = Params {
        p: Prime::new(a.p)?,
        n: a.n,
        samples: a.samples,
        seed: a.seed,
        l: a.l,
        m: a.m,
        budget: budget(a.budget)?,
        mutant: a.mutant.as_deref().map(str::parse::<Mutant>).transpose()?,
    };
    let report = verify::run_suite(suite, &params)?;
    let text = if a.json {
        let mut s = serde_json::to_string_pretty(&report).expect("serialisable");
        s.push('\n');
        s
    } else {
        report.render()
    };
    Ok(Outcome { text, code: if report.passed { 0 } else { 1 } })
}

fn cells_cmd(c: CellsCommand) -> Result<String> {
    match c {
        CellsCommand::Export { p, depth, root, format, limit } => {
            let prime = Prime::new(p)?;
            let root = match root {
                Some(r) => {
                    let v = load(&r)?;
                    as_cell(&v, resolve_prime(Some(p), std::slice::from_ref(&v))?)?
                }
                None => Cell::unit_ball(prime),
            };
            let format = match format {
                Format::Dot => TreeFormat::Dot,
                Format::Json => TreeFormat::Json,
            };
            let mut s = cells::export_tree(&root, depth, format, limit)?;
            if !s.ends_with('\n') {
                s.push('\n');
            }
            Ok(s)
        }
        CellsCommand::Act { f, cell, p, json } => {
            let (fv, cv) = (load(&f)?, load(&cell)?);
            let p = resolve_prime(p, &[fv.clone(), cv.clone()])?;
            let image = cells::act(&as_affine(&fv, p)?, &as_cell(&cv, p)?)?;
            Ok(if json { format!("{}\n", to_json(&image)) } else { format!("{image}\n") })
        }
    }
}

fn haar(a: HaarArgs) -> Result<Outcome> {
    let p = Prime::new(a.p)?;
    if a.n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let b = budget(a.budget)?;
    let mut rows = Vec::new();
    for &l in &a.l {
        let ms = if a.m.is_empty() {
            let base = (l as u64 * (a.n as u64 - 1)).max(1) as u32;
            vec![base, base + 1]
        } else {
            a.m.clone()
        };
        for m in ms {
            rows.push(finite::count_triangular_ball(p, a.n, l, m, b.elements, true)?);
        }
    }
    let passed = rows.iter().all(|r| r.passed);
    let text = if a.json {
        format!("{}\n", serde_json::to_string_pretty(&rows).expect("serialisable"))
    } else {
        let d = triangular::haar_dimension(a.n as u64);
        let mut s = format!("p={p} n={} d(n)={d}\n", a.n);
        s.push_str("l\tm\tcount\ttotal\tratio\texpected\tmode\tresult\n");
        for r in &rows {
            s.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}^-{}\t{}\t{}\n",
                r.l,
                r.m,
                r.count,
                r.total,
                r.ratio,
                p,
                r.l as u64 * d,
                to_json(&r.mode).as_str().unwrap_or_default(),
                if r.passed { "PASS" } else { "FAIL" }
            ));
        }
        s
    };
    Ok(Outcome { text, code: if passed { 0 } else { 1 } })
}

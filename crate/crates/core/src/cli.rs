//! File formats, expression parsing, and the `trinomial` command line.
//!
//! A spec file lists the exponents of the three blocks and, optionally, an
//! explicit integer grading and run settings:
//!
//! ```text
//! # T01*T02 + T11*T12 + T21^2
//! l0: 1 1
//! l1: 1 1
//! l2: 2
//! deg T(0,1): 1 0 1
//! deg T(0,2): -1 0 1
//! deg T(1,1): 0 1 1
//! deg T(1,2): 0 -1 1
//! deg T(2,1): 0 0 1
//! nilpotency_cap: 50
//! ```
//!
//! A derivation file has one `T(i,j) -> polynomial` line per non-zero image.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::abelian::GroupElement;
use crate::derivation::{
    elementary_classes, is_elementary, partial_product, Derivation, DerivationDegree,
    ElementarySpec, ElementaryType, Nilpotency, Recognition, DEFAULT_NILPOTENCY_CAP,
};
use crate::oracle::{verify_theorem, OracleError, OracleSettings};
use crate::ring::{fine_grading, ExplicitGrading, Monomial, Polynomial, TrinomialData, Var};
use crate::roots::{BoxCoordinates, RootContext, RootQuery, RootsError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CliError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Semantic(String),
    #[error("variable {0} does not exist in this trinomial")]
    IndexOutOfRange(Var),
    #[error("{0}")]
    Io(String),
}

impl From<RootsError> for CliError {
    fn from(e: RootsError) -> Self {
        CliError::Semantic(e.to_string())
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        CliError::Semantic(e.to_string())
    }
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> CliError {
    CliError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

/// Run settings read from a spec file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Settings {
    pub nilpotency_cap: usize,
    pub oracle: OracleSettings,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            nilpotency_cap: DEFAULT_NILPOTENCY_CAP,
            oracle: OracleSettings::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SpecFile {
    pub trinomial: TrinomialData,
    pub explicit_grading: Option<Vec<Vec<BigInt>>>,
    pub settings: Settings,
}

struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    /// Column of `chars[0]` in the source line, minus one.
    base: usize,
}

impl Cursor {
    fn new(text: &str, line: usize, base: usize) -> Self {
        Self {
            chars: text.chars().collect(),
            pos: 0,
            line,
            base,
        }
    }

    fn column(&self) -> usize {
        self.base + self.pos + 1
    }

    fn error(&self, message: impl Into<String>) -> CliError {
        syntax(self.line, self.column(), message)
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), CliError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{c}'")))
        }
    }

    fn digits(&mut self) -> Result<BigInt, CliError> {
        self.skip_ws();
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(char::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a number"));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        Ok(s.parse().expect("ascii digits"))
    }

    fn small(&mut self) -> Result<usize, CliError> {
        let column = self.column();
        self.digits()?
            .to_usize()
            .ok_or_else(|| syntax(self.line, column, "number too large"))
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }
}

/// `T(i,j)` with 0-based block and 1-based index.
fn parse_var(cur: &mut Cursor) -> Result<Var, CliError> {
    cur.expect('T')?;
    cur.expect('(')?;
    let block = cur.small()?;
    cur.expect(',')?;
    let index = cur.small()?;
    cur.expect(')')?;
    Ok(Var::new(block, index))
}

fn parse_rational(cur: &mut Cursor) -> Result<BigRational, CliError> {
    let num = cur.digits()?;
    if cur.eat('/') {
        let column = cur.column();
        let den = cur.digits()?;
        if den.is_zero() {
            return Err(syntax(cur.line, column, "zero denominator"));
        }
        Ok(BigRational::new(num, den))
    } else {
        Ok(BigRational::from_integer(num))
    }
}

fn parse_factor(cur: &mut Cursor, t: &TrinomialData) -> Result<Monomial, CliError> {
    let v = parse_var(cur)?;
    if !t.contains(v) {
        return Err(CliError::IndexOutOfRange(v));
    }
    let mut power = 1u32;
    if cur.eat('^') {
        let column = cur.column();
        let p = cur.digits()?;
        power = p
            .to_u32()
            .filter(|&p| p > 0)
            .ok_or_else(|| syntax(cur.line, column, "exponent must be a positive integer"))?;
    }
    Ok(Monomial::variable(t.n(), t.flat(v)).pow(power))
}

fn parse_term(cur: &mut Cursor, t: &TrinomialData, sign: bool) -> Result<Polynomial, CliError> {
    let mut negative = sign;
    loop {
        if cur.eat('-') {
            negative = !negative;
        } else if !cur.eat('+') {
            break;
        }
    }
    let (coeff, mut mono) = match cur.peek() {
        Some(c) if c.is_ascii_digit() => {
            let coeff = parse_rational(cur)?;
            if !cur.eat('*') {
                return Ok(Polynomial::constant(t.n(), if negative { -coeff } else { coeff }));
            }
            (coeff, parse_factor(cur, t)?)
        }
        Some('T') => (BigRational::one(), parse_factor(cur, t)?),
        _ => return Err(cur.error("expected a term")),
    };
    while cur.eat('*') {
        mono = mono.mul(&parse_factor(cur, t)?);
    }
    Ok(Polynomial::term(if negative { -coeff } else { coeff }, mono))
}

fn parse_poly_at(text: &str, t: &TrinomialData, line: usize, base: usize) -> Result<Polynomial, CliError> {
    let mut cur = Cursor::new(text, line, base);
    let mut out = parse_term(&mut cur, t, false)?;
    loop {
        let negative = match cur.peek() {
            None => return Ok(out),
            Some('+') => false,
            Some('-') => true,
            Some(_) => return Err(cur.error("expected '+', '-' or end of input")),
        };
        cur.pos += 1;
        out = &out + &parse_term(&mut cur, t, negative)?;
    }
}

/// Parses `term (('+' | '-') term)*` where a term is a signed rational, a
/// product of `T(i,j)^k` factors, or a rational times such a product.
pub fn parse_poly(text: &str, t: &TrinomialData) -> Result<Polynomial, CliError> {
    parse_poly_at(text, t, 1, 0)
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(k, raw)| {
        let line = raw.split('#').next().unwrap_or("");
        (!line.trim().is_empty()).then_some((k + 1, line))
    })
}

fn split_key(line: &str, number: usize) -> Result<(&str, &str, usize), CliError> {
    let colon = line
        .find(':')
        .ok_or_else(|| syntax(number, line.len() + 1, "expected 'key: values'"))?;
    Ok((line[..colon].trim(), &line[colon + 1..], colon + 1))
}

fn integers(values: &str, line: usize, base: usize) -> Result<Vec<BigInt>, CliError> {
    let mut out = Vec::new();
    let mut offset = 0;
    for token in values.split_whitespace() {
        let at = values[offset..].find(token).expect("token from split") + offset;
        offset = at + token.len();
        let value = token
            .parse::<BigInt>()
            .map_err(|_| syntax(line, base + at + 1, format!("'{token}' is not an integer")))?;
        out.push(value);
    }
    Ok(out)
}

fn single<T: std::str::FromStr>(values: &str, key: &str, line: usize, base: usize) -> Result<T, CliError> {
    let v = values.trim();
    v.parse().map_err(|_| {
        syntax(
            line,
            base + values.find(v).unwrap_or(0) + 1,
            format!("'{key}' expects a single non-negative integer"),
        )
    })
}

pub fn parse_spec(text: &str) -> Result<SpecFile, CliError> {
    let mut blocks: [Option<Vec<u32>>; 3] = [None, None, None];
    let mut degrees: BTreeMap<Var, (usize, Vec<BigInt>)> = BTreeMap::new();
    let mut settings = Settings::default();
    for (number, line) in content_lines(text) {
        let (key, values, base) = split_key(line, number)?;
        let key_column = line.find(key).unwrap_or(0) + 1;
        match key {
            "l0" | "l1" | "l2" => {
                let block = usize::from(key.as_bytes()[1] - b'0');
                if blocks[block].is_some() {
                    return Err(CliError::Semantic(format!("line {number}: {key} given twice")));
                }
                let ints = integers(values, number, base)?;
                if ints.is_empty() {
                    return Err(CliError::Semantic(format!("line {number}: block {block} is empty")));
                }
                let exps = ints
                    .iter()
                    .map(|x| x.to_u32().filter(|&e| e >= 1))
                    .collect::<Option<Vec<u32>>>()
                    .ok_or_else(|| {
                        CliError::Semantic(format!("line {number}: exponents must be positive integers"))
                    })?;
                blocks[block] = Some(exps);
            }
            "nilpotency_cap" => settings.nilpotency_cap = single(values, key, number, base)?,
            "oracle_cap" => settings.oracle.cap = single(values, key, number, base)?,
            "samples" => settings.oracle.samples = single(values, key, number, base)?,
            "seed" => settings.oracle.seed = single(values, key, number, base)?,
            _ if key.starts_with("deg") => {
                let mut cur = Cursor::new(&key[3..], number, key_column + 2);
                let v = parse_var(&mut cur)?;
                if !cur.at_end() {
                    return Err(cur.error("unexpected text after variable"));
                }
                let ints = integers(values, number, base)?;
                if degrees.insert(v, (number, ints)).is_some() {
                    return Err(CliError::Semantic(format!("line {number}: degree of {v} given twice")));
                }
            }
            _ => return Err(syntax(number, key_column, format!("unknown key '{key}'"))),
        }
    }
    let [l0, l1, l2] = blocks;
    let missing = |b: usize| CliError::Semantic(format!("missing exponents for block {b} (l{b})"));
    let trinomial = TrinomialData::new(l0.ok_or_else(|| missing(0))?, l1.ok_or_else(|| missing(1))?, l2.ok_or_else(|| missing(2))?)
        .map_err(|e| CliError::Semantic(e.to_string()))?;

    let explicit_grading = if degrees.is_empty() {
        None
    } else {
        if let Some((v, (line, _))) = degrees.iter().find(|(v, _)| !trinomial.contains(**v)) {
            return Err(CliError::Semantic(format!("line {line}: {v} is not a variable")));
        }
        if let Some(v) = trinomial.vars().find(|v| !degrees.contains_key(v)) {
            return Err(CliError::Semantic(format!("no degree given for {v}")));
        }
        let vectors: Vec<Vec<BigInt>> = trinomial.vars().map(|v| degrees[&v].1.clone()).collect();
        let fg = fine_grading(&trinomial).map_err(|e| CliError::Semantic(e.to_string()))?;
        ExplicitGrading::new(&fg, vectors.clone())
            .map_err(|e| CliError::Semantic(format!("invalid grading: {e}")))?;
        Some(vectors)
    };
    Ok(SpecFile {
        trinomial,
        explicit_grading,
        settings,
    })
}

/// Parses `T(i,j) -> polynomial` lines; missing variables map to zero.
pub fn parse_derivation(text: &str, t: &TrinomialData) -> Result<Derivation, CliError> {
    let mut images = vec![Polynomial::zero(t.n()); t.n()];
    let mut seen = vec![false; t.n()];
    for (number, line) in content_lines(text) {
        let arrow = line
            .find("->")
            .ok_or_else(|| syntax(number, line.len() + 1, "expected 'T(i,j) -> polynomial'"))?;
        let mut cur = Cursor::new(&line[..arrow], number, 0);
        let v = parse_var(&mut cur)?;
        if !cur.at_end() {
            return Err(cur.error("expected '->'"));
        }
        if !t.contains(v) {
            return Err(CliError::IndexOutOfRange(v));
        }
        let k = t.flat(v);
        if std::mem::replace(&mut seen[k], true) {
            return Err(CliError::Semantic(format!("line {number}: image of {v} given twice")));
        }
        images[k] = parse_poly_at(&line[arrow + 2..], t, number, arrow + 2)?;
    }
    Derivation::new(t, images).map_err(|e| CliError::Semantic(e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "trinomial", version, about = "Derivations and roots of trinomial algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct DegreeArg {
    /// Coordinates in the active basis; torsion residues follow a ';'.
    #[arg(long, num_args = 1.., allow_negative_numbers = true, required = true)]
    degree: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Grading group and generator degrees.
    Info { spec: PathBuf },
    /// Elementary derivation classes (C, type).
    #[command(group(ArgGroup::new("mode").required(true).args(["count", "list"])))]
    Elementary {
        spec: PathBuf,
        #[arg(long)]
        count: bool,
        #[arg(long)]
        list: bool,
    },
    /// Decide whether a degree is a root.
    IsRoot {
        spec: PathBuf,
        #[command(flatten)]
        degree: DegreeArg,
    },
    /// A locally nilpotent derivation of the given degree.
    Witness {
        spec: PathBuf,
        #[command(flatten)]
        degree: DegreeArg,
    },
    /// All roots in a box of the active coordinates.
    Roots {
        spec: PathBuf,
        /// Pairs `lo hi`, one per coordinate.
        #[arg(long = "box", num_args = 2.., allow_negative_numbers = true, required = true)]
        bounds: Vec<i64>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Check a derivation given by its images.
    Verify { spec: PathBuf, derivation: PathBuf },
    /// Compare all derivations of a degree against the classification.
    Oracle {
        spec: PathBuf,
        #[command(flatten)]
        degree: DegreeArg,
        /// Bound on the total degree of images.
        #[arg(long)]
        cap: Option<u64>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

/// A loaded spec file with its root data.
struct Session {
    spec: SpecFile,
    ctx: RootContext,
    explicit: Option<ExplicitGrading>,
}

impl Session {
    fn load(path: &PathBuf) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let spec = parse_spec(&text)?;
        let ctx = RootContext::new(&spec.trinomial)?;
        let explicit = spec
            .explicit_grading
            .clone()
            .map(|v| ExplicitGrading::new(ctx.grading(), v).expect("validated while parsing"));
        Ok(Self { spec, ctx, explicit })
    }

    fn t(&self) -> &TrinomialData {
        &self.spec.trinomial
    }

    fn element(&self, tokens: &[String]) -> Result<GroupElement, CliError> {
        let joined = tokens.join(" ");
        let (free, torsion) = joined.split_once(';').unwrap_or((&joined, ""));
        let free = integers(free, 1, 0)?;
        let torsion = integers(torsion, 1, 0)?;
        let group = self.ctx.grading().group();
        match &self.explicit {
            Some(eg) => {
                if !torsion.is_empty() {
                    return Err(CliError::Semantic("the explicit grading has no torsion".into()));
                }
                eg.element(group, &free)
                    .map_err(|e| CliError::Semantic(e.to_string()))?
                    .ok_or_else(|| CliError::Semantic(format!("({joined}) is not a degree of this grading")))
            }
            None => group.element(free, torsion).map_err(|e| {
                CliError::Semantic(format!(
                    "{e}; degrees have {} free coordinates and {} torsion residues",
                    group.free_rank(),
                    group.torsion_invariants().len()
                ))
            }),
        }
    }

    fn coordinates(&self, e: &GroupElement) -> (Vec<BigInt>, Vec<BigInt>) {
        match &self.explicit {
            Some(eg) => (eg.coordinates(e), Vec::new()),
            None => (e.free.clone(), e.torsion.clone()),
        }
    }

    fn degree_json(&self, e: &GroupElement) -> Value {
        let (free, torsion) = self.coordinates(e);
        let mut map = Map::new();
        map.insert("coordinates".into(), ints_json(&free));
        if !torsion.is_empty() {
            map.insert("torsion".into(), ints_json(&torsion));
        }
        Value::Object(map)
    }

    fn query_json(&self, q: &RootQuery) -> Value {
        let sets: Vec<Value> = q
            .containing_sets
            .iter()
            .map(|(k, w)| {
                json!({
                    "set": self.ctx.basic_sets()[*k].label(),
                    "witness": exponents_json(self.t(), &w.exponents),
                })
            })
            .collect();
        json!({
            "degree": self.degree_json(&q.element),
            "root": q.is_root(),
            "count": q.containing_sets.len(),
            "type_one": q.type_one,
            "sets": sets,
        })
    }
}

fn big_json(x: &BigInt) -> Value {
    x.to_i64().map_or_else(|| Value::String(x.to_string()), Value::from)
}

fn ints_json(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(big_json).collect())
}

fn rational_json(x: &BigRational) -> Value {
    if x.is_integer() {
        big_json(&x.to_integer())
    } else {
        Value::String(x.to_string())
    }
}

fn exponents_json(t: &TrinomialData, u: &[u32]) -> Value {
    let map: Map<String, Value> = t
        .vars()
        .filter(|&v| u[t.flat(v)] > 0)
        .map(|v| (v.to_string(), Value::from(u[t.flat(v)])))
        .collect();
    Value::Object(map)
}

fn images_json(d: &Derivation) -> Value {
    let map: Map<String, Value> = d
        .display_images()
        .into_iter()
        .filter(|(v, _)| !d.image(*v).is_zero())
        .map(|(v, p)| (v.to_string(), Value::String(p)))
        .collect();
    Value::Object(map)
}

fn kind_json(kind: ElementaryType) -> (Value, Value) {
    match kind {
        ElementaryType::I => (json!("I"), Value::Null),
        ElementaryType::II { i0 } => (json!("II"), json!(i0)),
    }
}

fn spec_json(t: &TrinomialData, spec: &ElementarySpec) -> Value {
    let (kind, i0) = kind_json(spec.kind);
    json!({
        "type": kind,
        "i0": i0,
        "c": spec.c,
        "beta": spec.beta.iter().map(rational_json).collect::<Vec<_>>(),
        "multiplier": {
            "exponents": exponents_json(t, &spec.multiplier.exponents),
            "m": spec.multiplier.m,
            "alpha": rational_json(&spec.multiplier.alpha),
        },
    })
}

fn print_json(out: &mut dyn Write, value: &Value) -> Result<(), CliError> {
    writeln!(out, "{}", serde_json::to_string_pretty(value).expect("json"))
        .map_err(|e| CliError::Io(e.to_string()))
}

fn info(s: &Session, out: &mut dyn Write) -> Result<i32, CliError> {
    let fg = s.ctx.grading();
    let group = fg.group();
    let degrees: Map<String, Value> = s
        .t()
        .vars()
        .map(|v| (v.to_string(), s.degree_json(fg.degree_of(v))))
        .collect();
    print_json(
        out,
        &json!({
            "trinomial": s.t().to_string(),
            "block_sizes": s.t().block_sizes(),
            "free_rank": group.free_rank(),
            "torsion": ints_json(group.torsion_invariants()),
            "coordinates": if s.explicit.is_some() { "explicit" } else { "canonical" },
            "generator_degrees": degrees,
            "g_degree": s.degree_json(fg.g_degree()),
            "basic_sets": s.ctx.basic_sets().iter().map(|b| b.label()).collect::<Vec<_>>(),
        }),
    )?;
    Ok(EXIT_OK)
}

fn elementary(s: &Session, list: bool, out: &mut dyn Write) -> Result<i32, CliError> {
    let t = s.t();
    let classes = elementary_classes(t);
    if !list {
        print_json(out, &json!({ "count": classes.len() }))?;
        return Ok(EXIT_OK);
    }
    let rows: Vec<Value> = classes
        .iter()
        .map(|class| {
            let (kind, i0) = kind_json(class.kind);
            let images: Map<String, Value> = class
                .kind
                .active_blocks()
                .into_iter()
                .map(|i| {
                    let v = Var::new(i, class.c[i]);
                    let p = partial_product(t, &class.c, class.kind, i);
                    (v.to_string(), Value::String(format!("b{i}*({})", p.display(t))))
                })
                .collect();
            json!({ "c": class.c, "type": kind, "i0": i0, "images": images })
        })
        .collect();
    print_json(out, &json!({ "count": classes.len(), "classes": rows }))?;
    Ok(EXIT_OK)
}

fn is_root(s: &Session, degree: &DegreeArg, out: &mut dyn Write) -> Result<i32, CliError> {
    let e = s.element(&degree.degree)?;
    let q = s.ctx.is_root(&e)?;
    print_json(out, &s.query_json(&q))?;
    Ok(if q.is_root() { EXIT_OK } else { EXIT_FALSE })
}

fn witness(s: &Session, degree: &DegreeArg, out: &mut dyn Write) -> Result<i32, CliError> {
    let e = s.element(&degree.degree)?;
    let q = s.ctx.is_root(&e)?;
    let Some((k, w)) = q.containing_sets.first() else {
        print_json(out, &json!({ "degree": s.degree_json(&e), "root": false }))?;
        return Ok(EXIT_FALSE);
    };
    let set = &s.ctx.basic_sets()[*k];
    let d = s.ctx.witness_derivation(&e, set, w)?;
    let nilpotency = match d.bounded_nilpotency(s.spec.settings.nilpotency_cap) {
        Nilpotency::Nilpotent(k) => json!(k),
        Nilpotency::UnknownAtCap => json!("unknown"),
    };
    print_json(
        out,
        &json!({
            "degree": s.degree_json(&e),
            "root": true,
            "set": set.label(),
            "witness": exponents_json(s.t(), &w.exponents),
            "images": images_json(&d),
            "nilpotency_index": nilpotency,
        }),
    )?;
    Ok(EXIT_OK)
}

fn roots(s: &Session, bounds: &[i64], format: Format, out: &mut dyn Write) -> Result<i32, CliError> {
    if !bounds.len().is_multiple_of(2) {
        return Err(CliError::Semantic("--box expects pairs 'lo hi'".into()));
    }
    let pairs: Vec<(i64, i64)> = bounds.chunks(2).map(|p| (p[0], p[1])).collect();
    let coords = match &s.explicit {
        Some(eg) => BoxCoordinates::Explicit(eg),
        None => BoxCoordinates::Canonical,
    };
    let found = s.ctx.enumerate_roots_in_box(&pairs, coords)?;
    match format {
        Format::Json => {
            let rows: Vec<Value> = found.iter().map(|q| s.query_json(q)).collect();
            print_json(out, &Value::Array(rows))?;
        }
        Format::Csv => {
            let group = s.ctx.grading().group();
            let torsion = if s.explicit.is_some() { 0 } else { group.torsion_invariants().len() };
            let mut header: Vec<String> = (0..pairs.len()).map(|k| format!("x{k}")).collect();
            header.extend((0..torsion).map(|k| format!("t{k}")));
            header.extend(["count".to_string(), "type1".to_string()]);
            let io = |e: std::io::Error| CliError::Io(e.to_string());
            writeln!(out, "{}", header.join(",")).map_err(io)?;
            for q in &found {
                let (free, tors) = s.coordinates(&q.element);
                let mut row: Vec<String> = free.iter().chain(&tors).map(ToString::to_string).collect();
                row.push(q.containing_sets.len().to_string());
                row.push(u8::from(q.type_one).to_string());
                writeln!(out, "{}", row.join(",")).map_err(io)?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn verify(s: &Session, path: &PathBuf, out: &mut dyn Write) -> Result<i32, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let d = parse_derivation(&text, s.t())?;
    let well_defined = d.is_well_defined();
    let degree = d
        .degree(s.ctx.grading())
        .map_err(|e| CliError::Semantic(e.to_string()))?;
    let nilpotency = d.bounded_nilpotency(s.spec.settings.nilpotency_cap);
    let recognition = is_elementary(&d);
    let elementary = match &recognition {
        Recognition::Zero => json!({ "zero": true }),
        Recognition::Elementary(spec) => spec_json(s.t(), spec),
        Recognition::NotElementary(reason) => json!({ "reason": format!("{reason:?}") }),
    };
    print_json(
        out,
        &json!({
            "well_defined": well_defined,
            "homogeneous": matches!(degree, DerivationDegree::Homogeneous(_)),
            "degree": match &degree {
                DerivationDegree::Homogeneous(e) => s.degree_json(e),
                DerivationDegree::NotHomogeneous => Value::Null,
            },
            "nilpotency_index": match nilpotency {
                Nilpotency::Nilpotent(k) => json!(k),
                Nilpotency::UnknownAtCap => json!("unknown"),
            },
            "elementary": elementary,
            "is_elementary": recognition.is_elementary(),
        }),
    )?;
    Ok(if !well_defined {
        EXIT_FALSE
    } else if nilpotency == Nilpotency::UnknownAtCap {
        EXIT_CAP
    } else if recognition.is_elementary() {
        EXIT_OK
    } else {
        EXIT_FALSE
    })
}

fn oracle(
    s: &Session,
    degree: &DegreeArg,
    cap: Option<u64>,
    samples: Option<usize>,
    seed: Option<u64>,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let e = s.element(&degree.degree)?;
    let mut settings = s.spec.settings.oracle;
    settings.nilpotency_cap = s.spec.settings.nilpotency_cap;
    settings.cap = cap.unwrap_or(settings.cap);
    settings.samples = samples.unwrap_or(settings.samples);
    settings.seed = seed.unwrap_or(settings.seed);
    let report = verify_theorem(&s.ctx, &[e], settings)?;
    print_json(out, &serde_json::to_value(&report).expect("report serializes"))?;
    Ok(if report.counterexamples > 0 { EXIT_FALSE } else { EXIT_OK })
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    match cli.command {
        Command::Info { spec } => info(&Session::load(&spec)?, out),
        Command::Elementary { spec, list, .. } => elementary(&Session::load(&spec)?, list, out),
        Command::IsRoot { spec, degree } => is_root(&Session::load(&spec)?, &degree, out),
        Command::Witness { spec, degree } => witness(&Session::load(&spec)?, &degree, out),
        Command::Roots { spec, bounds, format } => roots(&Session::load(&spec)?, &bounds, format, out),
        Command::Verify { spec, derivation } => verify(&Session::load(&spec)?, &derivation, out),
        Command::Oracle {
            spec,
            degree,
            cap,
            samples,
            seed,
        } => oracle(&Session::load(&spec)?, &degree, cap, samples, seed, out),
    }
}

/// Runs the command line and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

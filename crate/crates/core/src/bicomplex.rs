//! Bigraded chain complexes over `F2[U, V]` modelling the knot Floer complex
//! of a doubly based knot, together with fixtures and the `kfc v1` text
//! format.
//!
//! Each generator carries the two Maslov gradings `(gr_w, gr_z)`. The
//! differential is a set of monomial entries `src -> U^u V^v · dst`; because
//! the complex is bigraded the exponents of an entry are determined by the
//! gradings of its endpoints, so a pair of generators carries at most one
//! entry.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::{BigInt, Integer, One, Zero};

use crate::error::{Error, Result};
use crate::pl::{fmt_rational, int, parse_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Generator {
    pub name: String,
    pub gr_w: Rational,
    pub gr_z: Rational,
}

impl Generator {
    pub fn new(name: impl Into<String>, gr_w: Rational, gr_z: Rational) -> Self {
        Generator {
            name: name.into(),
            gr_w,
            gr_z,
        }
    }

    /// `A = (gr_w - gr_z) / 2`.
    pub fn alexander(&self) -> Rational {
        (&self.gr_w - &self.gr_z) / int(2)
    }
}

/// Differential entry `src -> U^u V^v · dst` with coefficient one.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub src: String,
    pub dst: String,
    pub u: u32,
    pub v: u32,
}

impl Edge {
    pub fn new(src: impl Into<String>, dst: impl Into<String>, u: u32, v: u32) -> Self {
        Edge {
            src: src.into(),
            dst: dst.into(),
            u,
            v,
        }
    }
}

/// A reason a complex fails validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// The entry does not drop both Maslov gradings by one once the
    /// variable weights are accounted for.
    Homogeneity { src: String, dst: String, u: u32, v: u32 },
    /// `A` of the generator is not a half-integer.
    Alexander { name: String },
    /// An odd number of two-step paths `src -> k -> dst` with total
    /// exponents `(u, v)`.
    BoundarySquared { src: String, dst: String, u: u32, v: u32 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Homogeneity { src, dst, u, v } => {
                write!(f, "edge {src} -> {dst} (U^{u} V^{v}) is not homogeneous")
            }
            Violation::Alexander { name } => {
                write!(f, "generator {name} has Alexander grading outside Z/2")
            }
            Violation::BoundarySquared { src, dst, u, v } => {
                write!(f, "d^2 != 0: coefficient of U^{u} V^{v} {dst} in d^2({src}) is 1")
            }
        }
    }
}

/// Finitely generated bigraded complex over `F2[U, V]`.
///
/// Generators are kept sorted by name and edges by `(src, dst)`, so derived
/// equality is structural equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChainComplexUV {
    generators: Vec<Generator>,
    edges: Vec<Edge>,
}

fn valid_name(name: &str) -> bool {
    !name.is_empty() && !name.chars().any(char::is_whitespace)
}

impl ChainComplexUV {
    /// Assembles a complex, checking names and endpoints but not the
    /// grading conditions (see [`validate`](Self::validate)).
    pub fn new(mut generators: Vec<Generator>, mut edges: Vec<Edge>) -> Result<Self> {
        generators.sort_by(|a, b| a.name.cmp(&b.name));
        for g in &generators {
            if !valid_name(&g.name) {
                return Err(Error::Invalid(format!("bad generator name `{}`", g.name)));
            }
        }
        if let Some(w) = generators.windows(2).find(|w| w[0].name == w[1].name) {
            return Err(Error::Invalid(format!("duplicate generator `{}`", w[0].name)));
        }
        edges.sort();
        let cx = ChainComplexUV { generators, edges };
        for e in &cx.edges {
            for end in [&e.src, &e.dst] {
                if cx.index_of(end).is_none() {
                    return Err(Error::Invalid(format!("edge refers to unknown generator `{end}`")));
                }
            }
        }
        if let Some(w) = cx
            .edges
            .windows(2)
            .find(|w| w[0].src == w[1].src && w[0].dst == w[1].dst)
        {
            return Err(Error::Invalid(format!(
                "more than one entry for {} -> {}",
                w[0].src, w[0].dst
            )));
        }
        Ok(cx)
    }

    /// [`new`](Self::new) followed by [`validate`](Self::validate); the first
    /// violation becomes the error.
    pub fn checked(generators: Vec<Generator>, edges: Vec<Edge>) -> Result<Self> {
        let cx = Self::new(generators, edges)?;
        cx.ensure_valid()?;
        Ok(cx)
    }

    pub(crate) fn ensure_valid(&self) -> Result<()> {
        match self.validate().into_iter().next() {
            None => Ok(()),
            Some(v) => Err(Error::Invalid(v.to_string())),
        }
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.generators
            .binary_search_by(|g| g.name.as_str().cmp(name))
            .ok()
    }

    pub fn generator(&self, name: &str) -> Option<&Generator> {
        self.index_of(name).map(|i| &self.generators[i])
    }

    /// Every homogeneity and `d^2 = 0` violation, in a deterministic order.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let half = Rational::new(BigInt::one(), BigInt::from(2));
        for g in &self.generators {
            if !(g.alexander() / &half).is_integer() {
                out.push(Violation::Alexander {
                    name: g.name.clone(),
                });
            }
        }
        for e in &self.edges {
            let s = self.generator(&e.src).expect("endpoints checked on construction");
            let d = self.generator(&e.dst).expect("endpoints checked on construction");
            let ok_w = &s.gr_w - int(1) == &d.gr_w - int(2 * e.u as i64);
            let ok_z = &s.gr_z - int(1) == &d.gr_z - int(2 * e.v as i64);
            if !(ok_w && ok_z) {
                out.push(Violation::Homogeneity {
                    src: e.src.clone(),
                    dst: e.dst.clone(),
                    u: e.u,
                    v: e.v,
                });
            }
        }
        let mut out_edges: BTreeMap<&str, Vec<&Edge>> = BTreeMap::new();
        for e in &self.edges {
            out_edges.entry(e.src.as_str()).or_default().push(e);
        }
        for g in &self.generators {
            let mut parity: BTreeMap<(&str, u32, u32), bool> = BTreeMap::new();
            for first in out_edges.get(g.name.as_str()).into_iter().flatten() {
                for second in out_edges.get(first.dst.as_str()).into_iter().flatten() {
                    let key = (second.dst.as_str(), first.u + second.u, first.v + second.v);
                    *parity.entry(key).or_insert(false) ^= true;
                }
            }
            for ((dst, u, v), odd) in parity {
                if odd {
                    out.push(Violation::BoundarySquared {
                        src: g.name.clone(),
                        dst: dst.to_string(),
                        u,
                        v,
                    });
                }
            }
        }
        out
    }

    /// Swaps the roles of the two basepoints: `gr_w <-> gr_z` and `U <-> V`.
    pub fn conjugate(&self) -> Result<Self> {
        self.ensure_valid()?;
        let generators = self
            .generators
            .iter()
            .map(|g| Generator::new(g.name.clone(), g.gr_z.clone(), g.gr_w.clone()))
            .collect();
        let edges = self
            .edges
            .iter()
            .map(|e| Edge::new(e.src.clone(), e.dst.clone(), e.v, e.u))
            .collect();
        Self::new(generators, edges)
    }

    /// Largest `|u - v|` over the differential entries.
    pub fn max_exponent_spread(&self) -> u32 {
        self.edges.iter().map(|e| e.u.abs_diff(e.v)).max().unwrap_or(0)
    }

    /// Serializes in `kfc v1` format.
    pub fn to_kfc(&self) -> String {
        self.to_string()
    }

    /// Parses `kfc v1` text and validates the result.
    /// Reads kfc v1 text and checks the result with [`validate`](Self::validate).
    pub fn parse(text: &str) -> Result<Self> {
        let cx = Self::parse_unchecked(text)?;
        cx.ensure_valid()?;
        Ok(cx)
    }

    /// Reads kfc v1 text, checking only the syntax, names and endpoints.
    pub fn parse_unchecked(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, l)) if l.trim_end() == "# kfc v1" => {}
            _ => return Err(Error::parse(1, "expected header `# kfc v1`")),
        }
        let mut field_seen = false;
        let mut generators: Vec<Generator> = Vec::new();
        let mut names: BTreeSet<String> = BTreeSet::new();
        let mut edges: Vec<(usize, Edge)> = Vec::new();
        for (i, raw) in lines {
            let lineno = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let tok: Vec<&str> = line.split_whitespace().collect();
            match tok[0] {
                "field" => {
                    if tok.len() != 2 || tok[1] != "F2" {
                        return Err(Error::parse(lineno, "only `field F2` is supported"));
                    }
                    if field_seen {
                        return Err(Error::parse(lineno, "duplicate field line"));
                    }
                    field_seen = true;
                }
                "generator" => {
                    if !field_seen {
                        return Err(Error::parse(lineno, "`field F2` must precede generators"));
                    }
                    if tok.len() != 6 || tok[2] != "grw" || tok[4] != "grz" {
                        return Err(Error::parse(
                            lineno,
                            "expected `generator <name> grw <rational> grz <rational>`",
                        ));
                    }
                    let gr_w = parse_rational(tok[3])
                        .ok_or_else(|| Error::parse(lineno, format!("bad rational `{}`", tok[3])))?;
                    let gr_z = parse_rational(tok[5])
                        .ok_or_else(|| Error::parse(lineno, format!("bad rational `{}`", tok[5])))?;
                    if !names.insert(tok[1].to_string()) {
                        return Err(Error::parse(lineno, format!("duplicate generator `{}`", tok[1])));
                    }
                    generators.push(Generator::new(tok[1], gr_w, gr_z));
                }
                "edge" => {
                    if !field_seen {
                        return Err(Error::parse(lineno, "`field F2` must precede edges"));
                    }
                    if tok.len() != 7 || tok[3] != "U" || tok[5] != "V" {
                        return Err(Error::parse(lineno, "expected `edge <src> <dst> U <int> V <int>`"));
                    }
                    let exp = |s: &str| {
                        s.parse::<u32>()
                            .map_err(|_| Error::parse(lineno, format!("bad exponent `{s}`")))
                    };
                    let (u, v) = (exp(tok[4])?, exp(tok[6])?);
                    for end in [tok[1], tok[2]] {
                        if !names.contains(end) {
                            return Err(Error::parse(lineno, format!("unknown generator `{end}`")));
                        }
                    }
                    if let Some((prev, _)) = edges.iter().find(|(_, e)| e.src == tok[1] && e.dst == tok[2]) {
                        return Err(Error::parse(
                            lineno,
                            format!("duplicate edge {} -> {} (first on line {prev})", tok[1], tok[2]),
                        ));
                    }
                    edges.push((lineno, Edge::new(tok[1], tok[2], u, v)));
                }
                other => return Err(Error::parse(lineno, format!("unknown directive `{other}`"))),
            }
        }
        if !field_seen {
            return Err(Error::parse(1, "missing `field F2` line"));
        }
        Self::new(generators, edges.into_iter().map(|(_, e)| e).collect())
    }
}

impl fmt::Display for ChainComplexUV {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# kfc v1")?;
        writeln!(f, "field F2")?;
        for g in &self.generators {
            writeln!(
                f,
                "generator {} grw {} grz {}",
                g.name,
                fmt_rational(&g.gr_w),
                fmt_rational(&g.gr_z)
            )?;
        }
        for e in &self.edges {
            writeln!(f, "edge {} {} U {} V {}", e.src, e.dst, e.u, e.v)?;
        }
        Ok(())
    }
}

/// The unknot: one generator in bigrading `(0, 0)`.
pub fn unknot() -> ChainComplexUV {
    ChainComplexUV::checked(vec![Generator::new("x", int(0), int(0))], vec![])
        .expect("unknot fixture is valid")
}

/// The right-handed trefoil staircase: `d b = U a + V c`.
pub fn trefoil() -> ChainComplexUV {
    ChainComplexUV::checked(
        vec![
            Generator::new("a", int(0), int(-2)),
            Generator::new("b", int(-1), int(-1)),
            Generator::new("c", int(-2), int(0)),
        ],
        vec![Edge::new("b", "a", 1, 0), Edge::new("b", "c", 0, 1)],
    )
    .expect("trefoil fixture is valid")
}

/// Figure-eight knot: an isolated generator `x` plus the acyclic box
/// `d a = U b + V c`, `d b = V d`, `d c = U d`.
pub fn figure_eight() -> ChainComplexUV {
    ChainComplexUV::checked(
        vec![
            Generator::new("x", int(0), int(0)),
            Generator::new("a", int(0), int(0)),
            Generator::new("b", int(1), int(-1)),
            Generator::new("c", int(-1), int(1)),
            Generator::new("d", int(0), int(0)),
        ],
        vec![
            Edge::new("a", "b", 1, 0),
            Edge::new("a", "c", 0, 1),
            Edge::new("b", "d", 0, 1),
            Edge::new("c", "d", 1, 0),
        ],
    )
    .expect("figure-eight fixture is valid")
}

/// Gaps between consecutive exponents of the Alexander polynomial of
/// `T(p, q)`, read off the numerical semigroup generated by `p` and `q`.
pub fn staircase_steps(p: u32, q: u32) -> Vec<u32> {
    let (p, q) = (p as u64, q as u64);
    let top = (p - 1) * (q - 1);
    let mut member = vec![false; top as usize + 1];
    for a in 0..=top / p {
        for b in 0..=(top - a * p) / q {
            member[(a * p + b * q) as usize] = true;
        }
    }
    // exponents with nonzero coefficient in (1 - t) * sum_{s in S} t^s
    let exps: Vec<u64> = (0..=top)
        .filter(|&k| k == 0 || member[k as usize] != member[k as usize - 1])
        .collect();
    exps.windows(2).map(|w| (w[1] - w[0]) as u32).collect()
}

/// Staircase complex of the positive torus knot `T(p, q)`, `0 < p < q`,
/// `gcd(p, q) = 1`.
///
/// Generators `x0, x1, …` run from the top Alexander grading `g` down to
/// `-g`; even-indexed ones are cycles and `d x(2i+1) = U^l x(2i) + V^l' x(2i+2)`
/// with `l, l'` consecutive staircase steps. The top generator sits at
/// `gr_w = 0`.
pub fn staircase_torus_knot(p: u32, q: u32) -> Result<ChainComplexUV> {
    if p < 1 || p >= q {
        return Err(Error::domain(format!("staircase needs 0 < p < q, got ({p}, {q})")));
    }
    if p.gcd(&q) != 1 {
        return Err(Error::domain(format!("gcd({p}, {q}) != 1")));
    }
    let steps = staircase_steps(p, q);
    let genus = ((p - 1) * (q - 1) / 2) as i64;
    let count = steps.len() + 1;
    let width = (count - 1).to_string().len();
    let name = |i: usize| format!("x{i:0width$}");

    let mut generators = Vec::with_capacity(count);
    let mut edges = Vec::with_capacity(steps.len());
    let (mut gr_w, mut alex) = (Rational::zero(), int(genus));
    for i in 0..count {
        let gr_z = &gr_w - &alex * int(2);
        generators.push(Generator::new(name(i), gr_w.clone(), gr_z));
        if i < steps.len() {
            let step = steps[i];
            if i % 2 == 0 {
                // x(i+1) --U^step--> x(i)
                edges.push(Edge::new(name(i + 1), name(i), step, 0));
                gr_w = &gr_w - int(2 * step as i64) + int(1);
            } else {
                // x(i) --V^step--> x(i+1)
                edges.push(Edge::new(name(i), name(i + 1), 0, step));
                gr_w -= int(1);
            }
            alex -= int(step as i64);
        }
    }
    ChainComplexUV::checked(generators, edges)
}

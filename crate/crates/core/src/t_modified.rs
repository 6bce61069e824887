//! The `t`-modified complex: specialize `U = v^(2-t)`, `V = v^t` with
//! `t = m/n`, work over `F2[x]` with `x = v^(1/n)`, and read `Υ_K(t)` off the
//! free part of the homology.

use std::collections::BTreeMap;

use num::{BigInt, Integer, Signed, ToPrimitive};

use crate::bicomplex::ChainComplexUV;
use crate::error::{Error, Result};
use crate::f2::BitVec;
use crate::pl::{int, PlFunction, Rational};

/// A rational `t = m/n` in `[0, 2]`, stored in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TParameter {
    m: u64,
    n: u64,
}

impl TParameter {
    /// Normalizes `m/n`; errors if `n = 0` or `m/n > 2`.
    pub fn new(m: u64, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("t has zero denominator"));
        }
        let g = m.gcd(&n);
        let (m, n) = (m / g, n / g);
        if m > 2 * n {
            return Err(Error::OutOfDomain(Rational::new(BigInt::from(m), BigInt::from(n))));
        }
        Ok(TParameter { m, n })
    }

    pub fn from_rational(t: &Rational) -> Result<Self> {
        if t.is_negative() || *t > int(2) {
            return Err(Error::OutOfDomain(t.clone()));
        }
        let m = t.numer().to_u64();
        let n = t.denom().to_u64();
        match (m, n) {
            (Some(m), Some(n)) => Self::new(m, n),
            _ => Err(Error::domain(format!("t = {t} does not fit in 64 bits"))),
        }
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn value(&self) -> Rational {
        Rational::new(BigInt::from(self.m), BigInt::from(self.n))
    }

    /// `2 - t`.
    pub fn reflect(&self) -> Self {
        TParameter {
            m: 2 * self.n - self.m,
            n: self.n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TGenerator {
    pub name: String,
    pub gr_t: Rational,
}

/// Differential entry `src -> x^exp · dst`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TEdge {
    pub src: String,
    pub dst: String,
    pub exp: u64,
}

/// A complex over `F2[x]`, `x = v^(1/n)` of `gr_t`-weight `-1/n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TComplex {
    n: u64,
    generators: Vec<TGenerator>,
    edges: Vec<TEdge>,
}

/// An element `Σ x^k · g` of a [`TComplex`], as `(generator, k)` pairs.
pub type Chain = Vec<(String, u64)>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeSummand {
    pub representative: Chain,
    pub gr_t: Rational,
}

/// A summand `F2[x] / (x^order)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorsionSummand {
    pub representative: Chain,
    pub gr_t: Rational,
    pub order: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HomologySummands {
    pub free: Vec<FreeSummand>,
    pub torsion: Vec<TorsionSummand>,
}

impl HomologySummands {
    pub fn free_rank(&self) -> usize {
        self.free.len()
    }

    /// Torsion orders, sorted.
    pub fn torsion_orders(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self.torsion.iter().map(|t| t.order).collect();
        v.sort_unstable();
        v
    }

    /// Gradings of the free generators, sorted.
    pub fn free_gradings(&self) -> Vec<Rational> {
        let mut v: Vec<Rational> = self.free.iter().map(|f| f.gr_t.clone()).collect();
        v.sort();
        v
    }
}

impl TComplex {
    /// Assembles a complex, checking names and endpoints. Homogeneity and
    /// `d^2 = 0` are checked by [`reduce`].
    pub fn new(n: u64, mut generators: Vec<TGenerator>, mut edges: Vec<TEdge>) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("x = v^(1/n) needs n > 0"));
        }
        generators.sort_by(|a, b| a.name.cmp(&b.name));
        if let Some(w) = generators.windows(2).find(|w| w[0].name == w[1].name) {
            return Err(Error::Invalid(format!("duplicate generator `{}`", w[0].name)));
        }
        edges.sort();
        let cx = TComplex { n, generators, edges };
        for e in &cx.edges {
            if cx.index_of(&e.src).is_none() || cx.index_of(&e.dst).is_none() {
                return Err(Error::Invalid(format!("edge {} -> {} has an unknown endpoint", e.src, e.dst)));
            }
        }
        if let Some(e) = cx.edges.iter().find(|e| e.src == e.dst) {
            return Err(Error::Invalid(format!("self-loop at {}", e.src)));
        }
        if let Some(w) = cx.edges.windows(2).find(|w| w[0].src == w[1].src && w[0].dst == w[1].dst) {
            return Err(Error::Invalid(format!("more than one entry for {} -> {}", w[0].src, w[0].dst)));
        }
        Ok(cx)
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn generators(&self) -> &[TGenerator] {
        &self.generators
    }

    pub fn edges(&self) -> &[TEdge] {
        &self.edges
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.generators.binary_search_by(|g| g.name.as_str().cmp(name)).ok()
    }

    /// Applies the differential to a chain, over `F2[x]`.
    pub fn boundary(&self, chain: &[(String, u64)]) -> Chain {
        let mut parity: BTreeMap<(String, u64), bool> = BTreeMap::new();
        for (g, k) in chain {
            for e in self.edges.iter().filter(|e| &e.src == g) {
                *parity.entry((e.dst.clone(), k + e.exp)).or_insert(false) ^= true;
            }
        }
        parity.into_iter().filter(|(_, odd)| *odd).map(|(key, _)| key).collect()
    }
}

/// Tensor with `R_t`: `gr_t = (1 - t/2) gr_w + (t/2) gr_z`, and
/// `U^u V^v ↦ x^(u(2n - m) + v m)`.
pub fn specialize(cx: &ChainComplexUV, t: TParameter) -> Result<TComplex> {
    cx.ensure_valid()?;
    let tv = t.value();
    let half_t = &tv / int(2);
    let generators = cx
        .generators()
        .iter()
        .map(|g| TGenerator {
            name: g.name.clone(),
            gr_t: (int(1) - &half_t) * &g.gr_w + &half_t * &g.gr_z,
        })
        .collect();
    let (m, n) = (t.m, t.n);
    let edges = cx
        .edges()
        .iter()
        .map(|e| TEdge {
            src: e.src.clone(),
            dst: e.dst.clone(),
            exp: e.u as u64 * (2 * n - m) + e.v as u64 * m,
        })
        .collect();
    TComplex::new(n, generators, edges)
}

fn to_exponent(r: &Rational) -> Option<u64> {
    if r.is_integer() && !r.is_negative() {
        r.to_integer().to_u64()
    } else {
        None
    }
}

/// Homology of a homogeneous complex over `F2[x]` by graded monomial
/// elimination.
///
/// Repeatedly takes the entry `s -> x^e d` of least exponent (ties by
/// generator names), changes basis so that `s -> x^e d'` splits off as a
/// summand, and records `F2[x]/(x^e)` when `e > 0`. Because a homogeneous
/// entry's exponent is fixed by the gradings, the matrix itself is an F2
/// matrix and every basis change is an F2 row or column operation.
pub fn reduce(cx: &TComplex) -> Result<HomologySummands> {
    let len = cx.generators.len();
    let n = int(cx.n as i64);
    // n * gr_t, so that an entry s -> d has exponent scaled[d] - scaled[s] + n
    let scaled: Vec<Rational> = cx.generators.iter().map(|g| &g.gr_t * &n).collect();
    let exponent = |s: usize, d: usize| &scaled[d] - &scaled[s] + &n;

    let mut cols: Vec<BitVec> = vec![BitVec::zeros(len); len];
    for e in &cx.edges {
        let s = cx.index_of(&e.src).expect("checked on construction");
        let d = cx.index_of(&e.dst).expect("checked on construction");
        if to_exponent(&exponent(s, d)) != Some(e.exp) {
            return Err(Error::Invalid(format!(
                "edge {} -> {} with x^{} is not homogeneous",
                e.src, e.dst, e.exp
            )));
        }
        cols[s].set(d, true);
    }
    for (s, col) in cols.iter().enumerate() {
        let mut dd = BitVec::zeros(len);
        for k in col.ones() {
            dd.xor_assign(&cols[k]);
        }
        let hit = dd.ones().next();
        if let Some(h) = hit {
            return Err(Error::Invalid(format!(
                "d^2 != 0: {} appears in d^2({})",
                cx.generators[h].name, cx.generators[s].name
            )));
        }
    }

    let mut basis: Vec<BitVec> = (0..len).map(|i| BitVec::unit(len, i)).collect();
    let mut active = vec![true; len];
    let mut pairs: Vec<(usize, usize, BigInt)> = Vec::new();

    loop {
        let mut best: Option<(BigInt, usize, usize)> = None;
        for s in (0..len).filter(|&s| active[s]) {
            for d in cols[s].ones() {
                let e = exponent(s, d).to_integer();
                let better = match &best {
                    None => true,
                    Some((be, bs, bd)) => (&e, s, d) < (be, *bs, *bd),
                };
                if better {
                    best = Some((e, s, d));
                }
            }
        }
        let Some((e, s, d)) = best else { break };

        // d' = d + Σ x^(..) k over the other targets of s, so ∂s = x^e d'
        let others: Vec<usize> = cols[s].ones().filter(|&k| k != d).collect();
        for k in others {
            add_basis(&mut cols, &mut basis, d, k);
        }
        // c' = c + x^(..) s for every other generator whose boundary meets d
        let hitters: Vec<usize> = (0..len).filter(|&c| c != s && cols[c].get(d)).collect();
        for c in hitters {
            add_basis(&mut cols, &mut basis, c, s);
        }
        debug_assert!(cols[d].is_zero());
        debug_assert!((0..len).all(|c| !cols[c].get(s)));
        debug_assert!((0..len).all(|c| c == s || !cols[c].get(d)));
        active[s] = false;
        active[d] = false;
        pairs.push((s, d, e));
    }

    let chain_of = |b: usize| -> Chain {
        basis[b]
            .ones()
            .map(|g| {
                let k = to_exponent(&(&scaled[g] - &scaled[b]))
                    .expect("basis changes respect the grading");
                (cx.generators[g].name.clone(), k)
            })
            .collect()
    };

    let mut out = HomologySummands::default();
    for (_, d, e) in pairs {
        if e.is_positive() {
            out.torsion.push(TorsionSummand {
                representative: chain_of(d),
                gr_t: cx.generators[d].gr_t.clone(),
                order: e.to_u64().expect("exponent fits in u64"),
            });
        }
    }
    for b in (0..len).filter(|&b| active[b]) {
        out.free.push(FreeSummand {
            representative: chain_of(b),
            gr_t: cx.generators[b].gr_t.clone(),
        });
    }
    Ok(out)
}

/// Replaces basis element `i` by `b_i + b_j` (with the power of `x` fixed by
/// the gradings): column `i` gains column `j`, row `j` loses row `i`.
fn add_basis(cols: &mut [BitVec], basis: &mut [BitVec], i: usize, j: usize) {
    debug_assert_ne!(i, j);
    let col_j = cols[j].clone();
    cols[i].xor_assign(&col_j);
    for col in cols.iter_mut() {
        if col.get(i) {
            col.flip(j);
        }
    }
    let bj = basis[j].clone();
    basis[i].xor_assign(&bj);
}

/// `Υ_K(t)`: the grading of the free summand of the `t`-modified homology.
/// Errors unless the free rank is exactly one.
pub fn upsilon_at(cx: &ChainComplexUV, t: TParameter) -> Result<Rational> {
    let h = reduce(&specialize(cx, t)?)?;
    if h.free_rank() != 1 {
        return Err(Error::NotKnotComplex {
            free_rank: h.free_rank(),
        });
    }
    Ok(h.free[0].gr_t.clone())
}

/// Like [`upsilon_at`] but accepts any positive free rank, returning the
/// maximal free grading and whether the free rank was one.
pub fn upsilon_at_lenient(cx: &ChainComplexUV, t: TParameter) -> Result<(Rational, bool)> {
    let h = reduce(&specialize(cx, t)?)?;
    let knot_like = h.free_rank() == 1;
    h.free
        .into_iter()
        .map(|f| f.gr_t)
        .max()
        .map(|v| (v, knot_like))
        .ok_or(Error::NotKnotComplex { free_rank: 0 })
}

/// Default grid denominator bound, `2 (1 + max |u - v|)`.
pub fn default_grid_bound(cx: &ChainComplexUV) -> u64 {
    2 * (1 + cx.max_exponent_spread() as u64)
}

/// Every reduced `p/q` in `[0, 2]` with `q <= bound`, increasing.
pub fn farey_grid(bound: u64) -> Vec<TParameter> {
    let mut ts: Vec<(Rational, TParameter)> = Vec::new();
    for q in 1..=bound.max(1) {
        for p in 0..=2 * q {
            if p.gcd(&q) == 1 {
                let t = TParameter { m: p, n: q };
                ts.push((t.value(), t));
            }
        }
    }
    ts.sort_by(|a, b| a.0.cmp(&b.0));
    ts.into_iter().map(|(_, t)| t).collect()
}

/// `Υ_K` as a piecewise-linear function.
///
/// Evaluates on the grid of [`farey_grid`]`(bound)` (default
/// [`default_grid_bound`]), interpolates, then re-evaluates at the midpoint
/// of every grid interval; any disagreement is reported as
/// [`Error::IncreaseQ`].
pub fn upsilon_pl(cx: &ChainComplexUV, bound: Option<u64>) -> Result<PlFunction> {
    let bound = bound.unwrap_or_else(|| default_grid_bound(cx));
    if bound == 0 {
        return Err(Error::domain("grid bound Q must be positive"));
    }
    let grid = farey_grid(bound);
    let mut points = Vec::with_capacity(grid.len());
    for &t in &grid {
        points.push((t.value(), upsilon_at(cx, t)?));
    }
    let fitted = PlFunction::from_points(points)?;
    for w in grid.windows(2) {
        let mid = (w[0].value() + w[1].value()) / int(2);
        let computed = upsilon_at(cx, TParameter::from_rational(&mid)?)?;
        let expected = fitted.eval(&mid)?;
        if computed != expected {
            return Err(Error::IncreaseQ {
                at: Box::new(mid),
                computed: Box::new(computed),
                fitted: Box::new(expected),
            });
        }
    }
    Ok(fitted)
}

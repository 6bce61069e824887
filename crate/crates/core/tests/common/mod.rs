//! Independent reference computations used by the integration tests.
#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::{BTreeMap, BTreeSet};

use kfc_core::t_modified::TComplex;
use kfc_core::{ChainComplexUV, Edge, Generator, Rational};
use num::{BigInt, One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

// ---------------------------------------------------------------------------
// F2[x] with dense bit coefficients

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly(Vec<bool>);

impl Poly {
    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn monomial(k: usize) -> Self {
        let mut v = vec![false; k + 1];
        v[k] = true;
        Poly(v)
    }

    fn trim(mut self) -> Self {
        while self.0.last() == Some(&false) {
            self.0.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        let v = (0..n)
            .map(|i| self.0.get(i).copied().unwrap_or(false) ^ other.0.get(i).copied().unwrap_or(false))
            .collect();
        Poly(v).trim()
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![false; self.0.len() + other.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            if a {
                for (j, &b) in other.0.iter().enumerate() {
                    v[i + j] ^= b;
                }
            }
        }
        Poly(v).trim()
    }

    pub fn divrem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by zero");
        let mut r = self.clone();
        let mut quo = Poly::zero();
        while let Some(rd) = r.degree() {
            if rd < dd {
                break;
            }
            let m = Poly::monomial(rd - dd);
            r = r.add(&m.mul(d));
            quo = quo.add(&m);
        }
        (quo, r)
    }

    /// `Some(k)` if this is exactly `x^k`.
    pub fn as_monomial(&self) -> Option<usize> {
        let k = self.degree()?;
        (self.0.iter().filter(|&&b| b).count() == 1).then_some(k)
    }
}

/// Invariant factors of a matrix over F2[x] by elimination with Euclidean
/// division; returns the nonzero diagonal entries.
pub fn smith_diagonal(mut m: Vec<Vec<Poly>>) -> Vec<Poly> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // entry of least degree in the lower-right block
        let mut best: Option<(usize, usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if let Some(d) = m[i][j].degree() {
                    if best.is_none_or(|b| d < b.0) {
                        best = Some((d, i, j));
                    }
                }
            }
        }
        let Some((_, bi, bj)) = best else { break };
        m.swap(t, bi);
        for row in m.iter_mut() {
            row.swap(t, bj);
        }
        let mut clean = true;
        let p = m[t][t].clone();
        for i in t + 1..rows {
            if m[i][t].is_zero() {
                continue;
            }
            let (quo, _) = m[i][t].divrem(&p);
            for j in t..cols {
                let sub = quo.mul(&m[t][j]);
                m[i][j] = m[i][j].add(&sub);
            }
            clean &= m[i][t].is_zero();
        }
        for j in t + 1..cols {
            if m[t][j].is_zero() {
                continue;
            }
            let (quo, _) = m[t][j].divrem(&p);
            for i in t..rows {
                let sub = quo.mul(&m[i][t]);
                m[i][j] = m[i][j].add(&sub);
            }
            clean &= m[t][j].is_zero();
        }
        if clean {
            diag.push(p);
            t += 1;
        }
    }
    diag
}

/// Free rank and sorted torsion orders of the homology of `tc`.
pub fn snf_homology(tc: &TComplex) -> (usize, Vec<u64>) {
    let n = tc.generators().len();
    let idx = |name: &str| tc.index_of(name).unwrap();
    let mut m = vec![vec![Poly::zero(); n]; n];
    for e in tc.edges() {
        m[idx(&e.dst)][idx(&e.src)] = Poly::monomial(e.exp as usize);
    }
    let diag = smith_diagonal(m);
    let rank = diag.len();
    let mut torsion: Vec<u64> = diag
        .iter()
        .map(|p| p.as_monomial().expect("graded complexes have monomial invariant factors") as u64)
        .filter(|&k| k > 0)
        .collect();
    torsion.sort_unstable();
    (n - 2 * rank, torsion)
}

// ---------------------------------------------------------------------------
// degree-wise F2 linear algebra on a TComplex

type Basis = Vec<(usize, u64)>;

struct Graded<'a> {
    tc: &'a TComplex,
    n: Rational,
}

impl<'a> Graded<'a> {
    fn new(tc: &'a TComplex) -> Self {
        Graded {
            tc,
            n: Rational::from_integer(BigInt::from(tc.n())),
        }
    }

    /// `x^k g` for all `g`, `k` with grading `level`.
    fn basis(&self, level: &Rational) -> Basis {
        let mut out = Vec::new();
        for (i, g) in self.tc.generators().iter().enumerate() {
            let k = (&g.gr_t - level) * &self.n;
            if k.is_integer() && k >= Rational::zero() {
                out.push((i, k.to_integer().try_into().unwrap()));
            }
        }
        out
    }

    fn boundary(&self, (i, k): (usize, u64)) -> BTreeSet<(usize, u64)> {
        let name = &self.tc.generators()[i].name;
        let mut out = BTreeSet::new();
        for e in self.tc.edges().iter().filter(|e| &e.src == name) {
            let key = (self.tc.index_of(&e.dst).unwrap(), k + e.exp);
            if !out.remove(&key) {
                out.insert(key);
            }
        }
        out
    }
}

fn rank(vectors: &[Vec<bool>]) -> usize {
    let mut rows: Vec<Vec<bool>> = vectors.to_vec();
    let width = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..width {
        let Some(p) = (r..rows.len()).find(|&i| rows[i][c]) else { continue };
        rows.swap(r, p);
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row[c] {
                for (a, b) in row.iter_mut().zip(&pivot) {
                    *a ^= b;
                }
            }
        }
        r += 1;
    }
    r
}

fn kernel(images: &[Vec<bool>], dim: usize) -> Vec<Vec<bool>> {
    // brute force over the (small) domain
    assert!(dim <= 16, "degree piece too large for the oracle");
    let mut basis: Vec<Vec<bool>> = Vec::new();
    for mask in 1u32..(1 << dim) {
        let mut img = vec![false; images.first().map_or(0, Vec::len)];
        for (j, im) in images.iter().enumerate() {
            if mask >> j & 1 == 1 {
                for (a, b) in img.iter_mut().zip(im) {
                    *a ^= b;
                }
            }
        }
        if img.iter().all(|b| !b) {
            let v: Vec<bool> = (0..dim).map(|j| mask >> j & 1 == 1).collect();
            let mut trial = basis.clone();
            trial.push(v.clone());
            if rank(&trial) > basis.len() {
                basis.push(v);
            }
        }
    }
    basis
}

fn coords(basis: &Basis, chain: &BTreeSet<(usize, u64)>) -> Vec<bool> {
    basis.iter().map(|b| chain.contains(b)).collect()
}

/// Rank of multiplication by `x^k` from `H_level` to `H_(level - k/n)`.
fn x_power_rank(g: &Graded, level: &Rational, k: u64) -> usize {
    let one = Rational::one();
    let src = g.basis(level);
    let src_images: Vec<Vec<bool>> = {
        let below = g.basis(&(level - &one));
        src.iter().map(|&b| coords(&below, &g.boundary(b))).collect()
    };
    let cycles = kernel(&src_images, src.len());
    let target_level = level - Rational::from_integer(BigInt::from(k)) / &g.n;
    let target = g.basis(&target_level);
    let above = g.basis(&(&target_level + &one));
    let boundaries: Vec<Vec<bool>> = above.iter().map(|&b| coords(&target, &g.boundary(b))).collect();
    let shifted: Vec<Vec<bool>> = cycles
        .iter()
        .map(|z| {
            let chain: BTreeSet<(usize, u64)> = z
                .iter()
                .zip(&src)
                .filter(|(on, _)| **on)
                .map(|(_, &(i, e))| (i, e + k))
                .collect();
            coords(&target, &chain)
        })
        .collect();
    let mut all = boundaries.clone();
    all.extend(shifted);
    if target.is_empty() {
        return 0;
    }
    rank(&all) - rank(&boundaries)
}

/// Gradings of the free summands, sorted, from ranks of `x^k` acting on the
/// homology in each degree (`k` past every torsion order).
pub fn free_gradings_by_rank(tc: &TComplex, max_torsion: u64) -> Vec<Rational> {
    let g = Graded::new(tc);
    let k = max_torsion + 1;
    let step = Rational::one() / &g.n;
    let tops: BTreeSet<Rational> = tc.generators().iter().map(|g| g.gr_t.clone()).collect();
    let mut out = Vec::new();
    for h in tops {
        let count = x_power_rank(&g, &h, k) - x_power_rank(&g, &(&h + &step), k);
        out.extend(std::iter::repeat_n(h, count));
    }
    out
}

// ---------------------------------------------------------------------------
// tau by enumerating chains

pub fn tau_brute(cx: &ChainComplexUV) -> Rational {
    let gens = cx.generators();
    let n = gens.len();
    assert!(n <= 12);
    let idx = |s: &str| gens.iter().position(|g| g.name == s).unwrap();
    let hat: Vec<(usize, usize)> = cx.edges().iter().filter(|e| e.u == 0).map(|e| (idx(&e.src), idx(&e.dst))).collect();
    let d = |mask: u32| -> u32 {
        let mut out = 0;
        for &(s, t) in &hat {
            if mask >> s & 1 == 1 {
                out ^= 1 << t;
            }
        }
        out
    };
    let boundaries: BTreeSet<u32> = (0..1u32 << n).map(d).collect();
    let mut levels: Vec<Rational> = gens.iter().map(|g| g.alexander()).collect();
    levels.sort();
    levels.dedup();
    for s in levels {
        let allowed: u32 = (0..n).filter(|&i| gens[i].alexander() <= s).map(|i| 1 << i).sum();
        let hit = (0..1u32 << n)
            .filter(|m| m & !allowed == 0)
            .any(|m| d(m) == 0 && !boundaries.contains(&m));
        if hit {
            return s;
        }
    }
    panic!("no level carries the class");
}

// ---------------------------------------------------------------------------
// random valid complexes

struct Proto {
    gr_w: i64,
    gr_z: i64,
}

fn monomial(src: &Proto, dst: &Proto) -> Option<(u32, u32)> {
    // gr(src) - 1 = gr(dst) - 2u, likewise for v
    let u2 = dst.gr_w - src.gr_w + 1;
    let v2 = dst.gr_z - src.gr_z + 1;
    (u2 >= 0 && v2 >= 0 && u2 % 2 == 0 && v2 % 2 == 0).then_some(((u2 / 2) as u32, (v2 / 2) as u32))
}

/// A random valid complex with at most `max_gens` generators: a direct sum
/// of points, arrows and squares, followed by homogeneous changes of basis
/// and a random naming.
pub fn random_complex<R: Rng>(rng: &mut R, max_gens: usize) -> ChainComplexUV {
    let mut protos: Vec<Proto> = Vec::new();
    let mut arrows: BTreeSet<(usize, usize)> = BTreeSet::new();
    let pick_base = |rng: &mut R| (rng.gen_range(-4..=4i64), rng.gen_range(-4..=4i64));
    while protos.len() < max_gens {
        let room = max_gens - protos.len();
        let kind = rng.gen_range(0..3);
        let (w, z) = pick_base(rng);
        let b = protos.len();
        if kind == 2 && room >= 4 {
            let (p, qq, r, s) = (rng.gen_range(0..=2), rng.gen_range(0..=2), rng.gen_range(0..=2), rng.gen_range(0..=2));
            protos.push(Proto { gr_w: w, gr_z: z });
            protos.push(Proto { gr_w: w - 1 + 2 * p, gr_z: z - 1 + 2 * qq });
            protos.push(Proto { gr_w: w - 1 + 2 * r, gr_z: z - 1 + 2 * s });
            protos.push(Proto { gr_w: w - 2 + 2 * (p + r), gr_z: z - 2 + 2 * (qq + s) });
            arrows.extend([(b, b + 1), (b, b + 2), (b + 1, b + 3), (b + 2, b + 3)]);
        } else if kind >= 1 && room >= 2 {
            let (p, qq) = (rng.gen_range(0..=3), rng.gen_range(0..=3));
            protos.push(Proto { gr_w: w, gr_z: z });
            protos.push(Proto { gr_w: w - 1 + 2 * p, gr_z: z - 1 + 2 * qq });
            arrows.insert((b, b + 1));
        } else {
            protos.push(Proto { gr_w: w, gr_z: z });
        }
        if rng.gen_bool(0.3) {
            break;
        }
    }
    let n = protos.len();
    // coefficient matrix over F2: m[s][d] = 1 if s -> d
    let mut m = vec![vec![false; n]; n];
    for &(s, d) in &arrows {
        m[s][d] = true;
    }
    for _ in 0..rng.gen_range(0..6) {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        // b_i <- b_i + U^a V^b b_j, needs gr(b_j) - gr(b_i) even and >= 0 in both gradings
        let dw = protos[j].gr_w - protos[i].gr_w;
        let dz = protos[j].gr_z - protos[i].gr_z;
        if i == j || dw < 0 || dz < 0 || dw % 2 != 0 || dz % 2 != 0 {
            continue;
        }
        for k in 0..n {
            let add = m[j][k];
            m[i][k] ^= add;
        }
        for row in m.iter_mut() {
            if row[i] {
                row[j] ^= true;
            }
        }
    }
    let mut names: Vec<String> = (0..n).map(|i| format!("g{}{}", (b'a' + i as u8) as char, rng.gen_range(0..10))).collect();
    names.shuffle(rng);
    let generators = protos
        .iter()
        .zip(&names)
        .map(|(p, name)| Generator::new(name.clone(), Rational::from_integer(p.gr_w.into()), Rational::from_integer(p.gr_z.into())))
        .collect();
    let mut edges = Vec::new();
    for s in 0..n {
        for d in 0..n {
            if m[s][d] {
                let (u, v) = monomial(&protos[s], &protos[d]).expect("basis changes are homogeneous");
                edges.push(Edge::new(names[s].clone(), names[d].clone(), u, v));
            }
        }
    }
    ChainComplexUV::checked(generators, edges).expect("random complex is valid")
}

/// A complex with the generators renamed by `f` and the same structure.
pub fn rename(cx: &ChainComplexUV, f: &BTreeMap<String, String>) -> ChainComplexUV {
    let generators = cx
        .generators()
        .iter()
        .map(|g| Generator::new(f[&g.name].clone(), g.gr_w.clone(), g.gr_z.clone()))
        .collect();
    let mut edges: Vec<Edge> = cx
        .edges()
        .iter()
        .map(|e| Edge::new(f[&e.src].clone(), f[&e.dst].clone(), e.u, e.v))
        .collect();
    edges.reverse();
    ChainComplexUV::checked(generators, edges).unwrap()
}

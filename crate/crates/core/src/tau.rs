//! `τ(K)` from the Alexander filtration on the hat complex.

use crate::bicomplex::ChainComplexUV;
use crate::error::{Error, Result};
use crate::f2::{kernel, BitVec, Echelon};
use crate::pl::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HatGenerator {
    pub name: String,
    pub alexander: Rational,
    pub gr_w: Rational,
}

/// `CF^` of `S^3`: the terms of the differential with no `U` power, `V`
/// forgotten, filtered by `A`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FilteredHatComplex {
    generators: Vec<HatGenerator>,
    edges: Vec<(String, String)>,
}

impl FilteredHatComplex {
    pub fn generators(&self) -> &[HatGenerator] {
        &self.generators
    }

    /// `(src, dst)` pairs, sorted.
    pub fn edges(&self) -> &[(String, String)] {
        &self.edges
    }

    fn index_of(&self, name: &str) -> usize {
        self.generators
            .binary_search_by(|g| g.name.as_str().cmp(name))
            .expect("edge endpoints are generators")
    }

    fn columns(&self) -> Vec<BitVec> {
        let len = self.generators.len();
        let mut cols = vec![BitVec::zeros(len); len];
        for (s, d) in &self.edges {
            cols[self.index_of(s)].set(self.index_of(d), true);
        }
        cols
    }

    /// Rank over F2 of the total homology.
    pub fn homology_rank(&self) -> usize {
        let cols = self.columns();
        let len = self.generators.len();
        let kernel_dim = kernel(&cols, len).len();
        let mut image = Echelon::new(len);
        for c in cols {
            image.insert(c);
        }
        kernel_dim - image.rank()
    }
}

pub fn hat_filtered(cx: &ChainComplexUV) -> FilteredHatComplex {
    let generators = cx
        .generators()
        .iter()
        .map(|g| HatGenerator {
            name: g.name.clone(),
            alexander: g.alexander(),
            gr_w: g.gr_w.clone(),
        })
        .collect();
    let edges = cx
        .edges()
        .iter()
        .filter(|e| e.u == 0)
        .map(|e| (e.src.clone(), e.dst.clone()))
        .collect();
    FilteredHatComplex { generators, edges }
}

/// The least Alexander level `s` for which `H(F_s) -> HF^(S^3)` is onto.
pub fn tau(cx: &ChainComplexUV) -> Result<Rational> {
    cx.ensure_valid()?;
    let hat = hat_filtered(cx);
    let rank = hat.homology_rank();
    if rank != 1 {
        return Err(Error::HatRank { rank });
    }
    let len = hat.generators.len();
    let cols = hat.columns();
    let mut boundaries = Echelon::new(len);
    for c in &cols {
        boundaries.insert(c.clone());
    }

    let mut levels: Vec<Rational> = hat.generators.iter().map(|g| g.alexander.clone()).collect();
    levels.sort();
    levels.dedup();
    for s in levels {
        let sub: Vec<usize> = (0..len).filter(|&i| hat.generators[i].alexander <= s).collect();
        let sub_cols: Vec<BitVec> = sub.iter().map(|&i| cols[i].clone()).collect();
        for z in kernel(&sub_cols, sub.len()) {
            let mut cycle = BitVec::zeros(len);
            for k in z.ones() {
                cycle.set(sub[k], true);
            }
            if !boundaries.contains(&cycle) {
                return Ok(s);
            }
        }
    }
    unreachable!("the full complex carries the nonzero class")
}

//! Dense vectors over F2 packed into machine words.

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct BitVec {
    words: Vec<u64>,
    len: usize,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, on: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % 64);
        if on {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }

    /// Highest set index.
    pub fn leading(&self) -> Option<usize> {
        for (wi, &w) in self.words.iter().enumerate().rev() {
            if w != 0 {
                return Some(wi * 64 + 63 - w.leading_zeros() as usize);
            }
        }
        None
    }
}

/// Row-echelon basis keyed by leading bit; supports span membership.
#[derive(Debug, Clone)]
pub(crate) struct Echelon {
    rows: Vec<Option<BitVec>>,
    rank: usize,
}

impl Echelon {
    pub fn new(len: usize) -> Self {
        Echelon {
            rows: vec![None; len],
            rank: 0,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Reduces `v` against the basis; the result is zero iff `v` is in the span.
    pub fn reduce(&self, mut v: BitVec) -> BitVec {
        while let Some(lead) = v.leading() {
            match &self.rows[lead] {
                Some(row) => v.xor_assign(row),
                None => break,
            }
        }
        v
    }

    /// Inserts `v`; returns true if it increased the rank.
    pub fn insert(&mut self, v: BitVec) -> bool {
        let v = self.reduce(v);
        match v.leading() {
            Some(lead) => {
                self.rows[lead] = Some(v);
                self.rank += 1;
                true
            }
            None => false,
        }
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v.clone()).is_zero()
    }
}

/// Basis of the kernel of the linear map whose columns are `cols`
/// (column `j` is the image of basis vector `j`).
pub(crate) fn kernel(cols: &[BitVec], domain: usize) -> Vec<BitVec> {
    // Track combinations alongside images; reduce each new column against
    // earlier pivots, and any column reducing to zero gives a kernel vector.
    let mut pivots: Vec<(BitVec, BitVec)> = Vec::new();
    let mut out = Vec::new();
    for (j, col) in cols.iter().enumerate() {
        let mut img = col.clone();
        let mut comb = BitVec::unit(domain, j);
        while let Some(lead) = img.leading() {
            match pivots.iter().find(|(p, _)| p.leading() == Some(lead)) {
                Some((p, c)) => {
                    img.xor_assign(p);
                    comb.xor_assign(c);
                }
                None => break,
            }
        }
        if img.is_zero() {
            out.push(comb);
        } else {
            pivots.push((img, comb));
        }
    }
    out
}

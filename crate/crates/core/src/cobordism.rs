//! Grading changes of decorated link cobordism maps, from numerical
//! topological data.
//!
//! Nothing here checks that the data comes from an actual surface in an
//! actual 4-manifold; the functions only evaluate the grading formulas.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Add;

use num::Zero;

use crate::error::{Error, Result};
use crate::pl::{fmt_rational, int, rat, Rational};
use crate::t_modified::TParameter;

/// Per-label data of a [`CobordismTopology`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct LabelData {
    /// `<c_1(s), [Σ_j]>`
    pub pairing: i64,
    /// `[Σ]·[Σ_j]`
    pub int: i64,
    /// `χ(Σ_{w,j})`
    pub chi_w: i64,
    /// `χ(Σ_{z,j})`
    pub chi_z: i64,
}

/// Summary of a decorated link cobordism `(W, F, s)`.
///
/// The totals `<c_1, Σ>` and `Σ·Σ` are the sums over labels. The two
/// `*_defined` flags record whether the corresponding Maslov grading exists
/// (that is, whether the relevant first Chern classes on the ends are
/// torsion).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CobordismTopology {
    pub labels: BTreeMap<String, LabelData>,
    pub c1_sq: i64,
    /// `c_1(s - PD[Σ])^2` when supplied directly; otherwise derived.
    pub c1_shift_sq: Option<i64>,
    pub chi_w4: i64,
    pub sigma_w4: i64,
    pub w_in: u64,
    pub w_out: u64,
    pub z_in: u64,
    pub z_out: u64,
    pub gr_w_defined: bool,
    pub gr_z_defined: bool,
}

impl Default for CobordismTopology {
    fn default() -> Self {
        CobordismTopology {
            labels: BTreeMap::new(),
            c1_sq: 0,
            c1_shift_sq: None,
            chi_w4: 0,
            sigma_w4: 0,
            w_in: 0,
            w_out: 0,
            z_in: 0,
            z_out: 0,
            gr_w_defined: true,
            gr_z_defined: true,
        }
    }
}

impl CobordismTopology {
    /// The product cobordism on a link with `pairs[j]` basepoint pairs
    /// labelled `j`.
    pub fn identity(pairs: &BTreeMap<String, u32>) -> Self {
        let total: u64 = pairs.values().map(|&p| p as u64).sum();
        let labels = pairs
            .iter()
            .map(|(j, &p)| {
                let p = p as i64;
                (j.clone(), LabelData { chi_w: p, chi_z: p, ..LabelData::default() })
            })
            .collect();
        CobordismTopology {
            labels,
            w_in: total,
            w_out: total,
            z_in: total,
            z_out: total,
            ..CobordismTopology::default()
        }
    }

    pub fn pairing_c1_sigma(&self) -> i64 {
        self.labels.values().map(|l| l.pairing).sum()
    }

    pub fn int_sigma_sigma(&self) -> i64 {
        self.labels.values().map(|l| l.int).sum()
    }

    pub fn chi_w(&self) -> i64 {
        self.labels.values().map(|l| l.chi_w).sum()
    }

    pub fn chi_z(&self) -> i64 {
        self.labels.values().map(|l| l.chi_z).sum()
    }

    /// `χ~(Σ_w) = χ(Σ_w) - (|w_in| + |w_out|)/2`.
    pub fn reduced_chi_w(&self) -> Rational {
        int(self.chi_w()) - rat((self.w_in + self.w_out) as i64, 2)
    }

    pub fn reduced_chi_z(&self) -> Rational {
        int(self.chi_z()) - rat((self.z_in + self.z_out) as i64, 2)
    }

    /// `c_1(s - PD[Σ])^2`, supplied or expanded.
    pub fn shifted_c1_sq(&self) -> i64 {
        self.c1_shift_sq
            .unwrap_or_else(|| chern_shift(self.c1_sq, self.pairing_c1_sigma(), self.int_sigma_sigma()))
    }

    /// Checks that basepoints alternate (`w` and `z` counts agree) and that a
    /// supplied `c_1(s - PD[Σ])^2` matches its expansion.
    pub fn validate(&self) -> Result<()> {
        if self.w_in != self.z_in || self.w_out != self.z_out {
            return Err(Error::Invalid(format!(
                "basepoint counts must agree: w {}/{} vs z {}/{}",
                self.w_in, self.w_out, self.z_in, self.z_out
            )));
        }
        if let Some(s) = self.c1_shift_sq {
            let expected = chern_shift(self.c1_sq, self.pairing_c1_sigma(), self.int_sigma_sigma());
            if s != expected {
                return Err(Error::Invalid(format!(
                    "c1_shift_sq = {s} but c1^2 - 4<c1,Σ> + 4Σ·Σ = {expected}"
                )));
            }
        }
        Ok(())
    }

    /// Parses `key=value` lines and `label <j> c1=.. int=.. chi_w=.. chi_z=..`
    /// lines. Keys: `c1_sq`, `chi_W`, `sigma_W`, `w_in`, `w_out`, `z_in`,
    /// `z_out`, and optionally `c1_shift_sq`, `pairing_c1_Sigma`,
    /// `int_Sigma_Sigma` (checked against the label sums), `gr_w_defined`,
    /// `gr_z_defined`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut t = CobordismTopology::default();
        let mut seen: BTreeMap<String, usize> = BTreeMap::new();
        let mut totals: Vec<(usize, &str, i64)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("label ") {
                let mut words = rest.split_whitespace();
                let name = words
                    .next()
                    .ok_or_else(|| Error::parse(line_no, "label needs a name"))?
                    .to_string();
                if t.labels.contains_key(&name) {
                    return Err(Error::parse(line_no, format!("duplicate label `{name}`")));
                }
                let mut data = LabelData::default();
                for w in words {
                    let (k, v) = split_kv(w, line_no)?;
                    let v = parse_int(v, line_no)?;
                    match k {
                        "c1" => data.pairing = v,
                        "int" => data.int = v,
                        "chi_w" => data.chi_w = v,
                        "chi_z" => data.chi_z = v,
                        _ => return Err(Error::parse(line_no, format!("unknown label key `{k}`"))),
                    }
                }
                t.labels.insert(name, data);
                continue;
            }
            let (k, v) = split_kv(line, line_no)?;
            if seen.insert(k.to_string(), line_no).is_some() {
                return Err(Error::parse(line_no, format!("duplicate key `{k}`")));
            }
            match k {
                "c1_sq" => t.c1_sq = parse_int(v, line_no)?,
                "c1_shift_sq" => t.c1_shift_sq = Some(parse_int(v, line_no)?),
                "chi_W" => t.chi_w4 = parse_int(v, line_no)?,
                "sigma_W" => t.sigma_w4 = parse_int(v, line_no)?,
                "w_in" => t.w_in = parse_count(v, line_no)?,
                "w_out" => t.w_out = parse_count(v, line_no)?,
                "z_in" => t.z_in = parse_count(v, line_no)?,
                "z_out" => t.z_out = parse_count(v, line_no)?,
                "gr_w_defined" => t.gr_w_defined = parse_bool(v, line_no)?,
                "gr_z_defined" => t.gr_z_defined = parse_bool(v, line_no)?,
                "pairing_c1_Sigma" => totals.push((line_no, "pairing_c1_Sigma", parse_int(v, line_no)?)),
                "int_Sigma_Sigma" => totals.push((line_no, "int_Sigma_Sigma", parse_int(v, line_no)?)),
                _ => return Err(Error::parse(line_no, format!("unknown key `{k}`"))),
            }
        }
        for (line_no, key, v) in totals {
            let sum = if key == "pairing_c1_Sigma" { t.pairing_c1_sigma() } else { t.int_sigma_sigma() };
            if v != sum {
                return Err(Error::parse(line_no, format!("{key} = {v} but the labels sum to {sum}")));
            }
        }
        t.validate()?;
        Ok(t)
    }
}

impl fmt::Display for CobordismTopology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "c1_sq={}", self.c1_sq)?;
        if let Some(s) = self.c1_shift_sq {
            writeln!(f, "c1_shift_sq={s}")?;
        }
        writeln!(f, "chi_W={}", self.chi_w4)?;
        writeln!(f, "sigma_W={}", self.sigma_w4)?;
        writeln!(f, "w_in={}", self.w_in)?;
        writeln!(f, "w_out={}", self.w_out)?;
        writeln!(f, "z_in={}", self.z_in)?;
        writeln!(f, "z_out={}", self.z_out)?;
        if !self.gr_w_defined {
            writeln!(f, "gr_w_defined=false")?;
        }
        if !self.gr_z_defined {
            writeln!(f, "gr_z_defined=false")?;
        }
        for (j, l) in &self.labels {
            writeln!(f, "label {j} c1={} int={} chi_w={} chi_z={}", l.pairing, l.int, l.chi_w, l.chi_z)?;
        }
        Ok(())
    }
}

fn split_kv(word: &str, line: usize) -> Result<(&str, &str)> {
    word.split_once('=')
        .map(|(k, v)| (k.trim(), v.trim()))
        .ok_or_else(|| Error::parse(line, format!("expected key=value, found `{word}`")))
}

fn parse_int(v: &str, line: usize) -> Result<i64> {
    v.parse().map_err(|_| Error::parse(line, format!("`{v}` is not an integer")))
}

fn parse_count(v: &str, line: usize) -> Result<u64> {
    v.parse().map_err(|_| Error::parse(line, format!("`{v}` is not a nonnegative integer")))
}

fn parse_bool(v: &str, line: usize) -> Result<bool> {
    v.parse().map_err(|_| Error::parse(line, format!("`{v}` is not true or false")))
}

/// Changes in `(A_j)_j`, `gr_w`, `gr_z`. Labels with zero Alexander change
/// are not stored. A Maslov change is `None` when that grading is undefined.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GradingDelta {
    d_a: BTreeMap<String, Rational>,
    pub dgr_w: Option<Rational>,
    pub dgr_z: Option<Rational>,
}

impl Default for GradingDelta {
    fn default() -> Self {
        GradingDelta {
            d_a: BTreeMap::new(),
            dgr_w: Some(int(0)),
            dgr_z: Some(int(0)),
        }
    }
}

impl GradingDelta {
    pub fn new(
        d_a: impl IntoIterator<Item = (String, Rational)>,
        dgr_w: Option<Rational>,
        dgr_z: Option<Rational>,
    ) -> Self {
        let mut out = GradingDelta {
            d_a: BTreeMap::new(),
            dgr_w,
            dgr_z,
        };
        for (j, v) in d_a {
            out.add_alexander(&j, v);
        }
        out
    }

    fn add_alexander(&mut self, j: &str, v: Rational) {
        let e = self.d_a.entry(j.to_string()).or_insert_with(Rational::zero);
        *e += v;
        if e.is_zero() {
            self.d_a.remove(j);
        }
    }

    /// The change in `A_j`.
    pub fn d_a(&self, j: &str) -> Rational {
        self.d_a.get(j).cloned().unwrap_or_else(Rational::zero)
    }

    /// Nonzero Alexander changes by label.
    pub fn alexander(&self) -> &BTreeMap<String, Rational> {
        &self.d_a
    }

    /// Total Alexander change, i.e. the collapse to a single label.
    pub fn d_a_total(&self) -> Rational {
        self.d_a.values().fold(Rational::zero(), |acc, v| acc + v)
    }

    /// `(1 - t/2) dgr_w + (t/2) dgr_z`.
    pub fn dgr_t(&self, t: TParameter) -> Option<Rational> {
        let half = t.value() / int(2);
        Some((int(1) - &half) * self.dgr_w.as_ref()? + half * self.dgr_z.as_ref()?)
    }
}

impl Add for &GradingDelta {
    type Output = GradingDelta;
    fn add(self, other: &GradingDelta) -> GradingDelta {
        let mut out = self.clone();
        for (j, v) in &other.d_a {
            out.add_alexander(j, v.clone());
        }
        out.dgr_w = self.dgr_w.as_ref().zip(other.dgr_w.as_ref()).map(|(a, b)| a + b);
        out.dgr_z = self.dgr_z.as_ref().zip(other.dgr_z.as_ref()).map(|(a, b)| a + b);
        out
    }
}

impl fmt::Display for GradingDelta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, v) in &self.d_a {
            writeln!(f, "dA[{j}]\t{}", fmt_rational(v))?;
        }
        writeln!(f, "dA\t{}", fmt_rational(&self.d_a_total()))?;
        let show = |v: &Option<Rational>| v.as_ref().map(fmt_rational).unwrap_or_else(|| "undefined".into());
        writeln!(f, "dgr_w\t{}", show(&self.dgr_w))?;
        write!(f, "dgr_z\t{}", show(&self.dgr_z))
    }
}

/// `c_1(s - PD[Σ])^2 = c_1^2 - 4<c_1, Σ> + 4 Σ·Σ`.
pub fn chern_shift(c1_sq: i64, pairing_c1_sigma: i64, int_sigma_sigma: i64) -> i64 {
    c1_sq - 4 * pairing_c1_sigma + 4 * int_sigma_sigma
}

/// `(<c_1, Σ_j> - Σ·Σ_j)/2 + (χ(Σ_{w,j}) - χ(Σ_{z,j}))/2`.
pub fn alexander_change(t: &CobordismTopology, j: &str) -> Result<Rational> {
    let l = t
        .labels
        .get(j)
        .ok_or_else(|| Error::domain(format!("unknown label `{j}`")))?;
    Ok(rat(l.pairing - l.int, 2) + rat(l.chi_w - l.chi_z, 2))
}

fn maslov_constant(c1_sq: i64, t: &CobordismTopology) -> Rational {
    rat(c1_sq - 2 * t.chi_w4 - 3 * t.sigma_w4, 4)
}

/// `(c_1^2 - 2χ(W) - 3σ(W))/4 + χ~(Σ_w)`.
pub fn grw_change(t: &CobordismTopology) -> Result<Rational> {
    if !t.gr_w_defined {
        return Err(Error::Undefined("gr_w needs torsion c_1(s_w) on the ends".into()));
    }
    Ok(maslov_constant(t.c1_sq, t) + t.reduced_chi_w())
}

/// `(c_1(s - PD[Σ])^2 - 2χ(W) - 3σ(W))/4 + χ~(Σ_z)`.
pub fn grz_change(t: &CobordismTopology) -> Result<Rational> {
    if !t.gr_z_defined {
        return Err(Error::Undefined("gr_z needs torsion c_1(s_z) on the ends".into()));
    }
    Ok(maslov_constant(t.shifted_c1_sq(), t) + t.reduced_chi_z())
}

/// `gr_t` change, from the closed form
/// `(c_1^2 - 2χ - 3σ)/4 + t(-<c_1,Σ> + Σ·Σ)/2 + (1 - t/2)χ~_w + (t/2)χ~_z`.
pub fn grt_change(top: &CobordismTopology, t: TParameter) -> Result<Rational> {
    grw_change(top)?;
    grz_change(top)?;
    let tv = t.value();
    let half = &tv / int(2);
    let shift = top.shifted_c1_sq() - top.c1_sq;
    // shift = 4(-<c_1,Σ> + Σ·Σ) when derived
    Ok(maslov_constant(top.c1_sq, top)
        + &tv * rat(shift, 8)
        + (int(1) - &half) * top.reduced_chi_w()
        + &half * top.reduced_chi_z())
}

/// All closed formulas at once; undefined Maslov gradings
/// become `None`.
pub fn closed_delta(t: &CobordismTopology) -> GradingDelta {
    let d_a = t
        .labels
        .keys()
        .map(|j| (j.clone(), alexander_change(t, j).expect("label exists")));
    GradingDelta::new(d_a, grw_change(t).ok(), grz_change(t).ok())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variable {
    U,
    V,
}

/// Grading of multiplication by `U` or `V` of label `j`: `U` lowers `A_j`
/// by one and `gr_w` by two, `V` raises `A_j` by one and lowers `gr_z` by
/// two.
pub fn variable_action(var: Variable, j: &str) -> GradingDelta {
    match var {
        Variable::U => GradingDelta::new([(j.to_string(), int(-1))], Some(int(-2)), Some(int(0))),
        Variable::V => GradingDelta::new([(j.to_string(), int(1))], Some(int(0)), Some(int(-2))),
    }
}

/// Whether a piece adds (`Plus`) or removes (`Minus`) a basepoint pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Plus,
    Minus,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Handle2Data {
    pub c1_sq: i64,
    pub sigma: i64,
    /// Per label `(<c_1, Σ_j>, Σ·Σ_j)` contributions.
    pub labels: BTreeMap<String, (i64, i64)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PieceKind {
    /// Quasi-stabilization adding a `w`-region.
    QuasiStabS { label: String, dir: Direction },
    /// Quasi-stabilization adding a `z`-region.
    QuasiStabT { label: String, dir: Direction },
    /// Band in the `w`-region of label `label`.
    BandW { label: String },
    /// Band in the `z`-region of label `label`.
    BandZ { label: String },
    /// Births (`Plus`) or deaths (`Minus`) of an unknot with one pair.
    DiskStab { label: String, dir: Direction },
    /// A 4-dimensional 0-handle carrying a new unknot.
    Handle0 { label: String },
    Handle1,
    Handle2(Handle2Data),
    Handle3,
    /// A 4-dimensional 4-handle capping an unknot.
    Handle4 { label: String },
}

/// A piece of a decorated link cobordism, together with the basepoint pairs
/// per label on its incoming end.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ElementaryPiece {
    pub kind: PieceKind,
    pub incoming: BTreeMap<String, u32>,
}

fn pairs(of: &BTreeMap<String, u32>, j: &str) -> u32 {
    of.get(j).copied().unwrap_or(0)
}

impl ElementaryPiece {
    pub fn new(kind: PieceKind, incoming: BTreeMap<String, u32>) -> Self {
        let incoming = incoming.into_iter().filter(|(_, p)| *p > 0).collect();
        ElementaryPiece { kind, incoming }
    }

    /// The label whose basepoint count changes, with the direction.
    fn count_change(&self) -> Option<(&str, Direction)> {
        use PieceKind::*;
        match &self.kind {
            QuasiStabS { label, dir } | QuasiStabT { label, dir } | DiskStab { label, dir } => {
                Some((label, *dir))
            }
            Handle0 { label } => Some((label, Direction::Plus)),
            Handle4 { label } => Some((label, Direction::Minus)),
            _ => None,
        }
    }

    /// Checks the piece against its incoming basepoint counts.
    pub fn validate(&self) -> Result<()> {
        use PieceKind::*;
        let need = |j: &str, k: u32, what: &str| {
            if pairs(&self.incoming, j) < k {
                Err(Error::domain(format!(
                    "{what} needs at least {k} basepoint pair(s) on label `{j}`"
                )))
            } else {
                Ok(())
            }
        };
        match &self.kind {
            QuasiStabS { label, dir } | QuasiStabT { label, dir } => match dir {
                Direction::Plus => need(label, 1, "quasi-stabilization"),
                Direction::Minus => need(label, 2, "quasi-destabilization"),
            },
            BandW { label } | BandZ { label } => need(label, 1, "a band"),
            DiskStab { label, dir: Direction::Minus } => need(label, 1, "a disk destabilization"),
            Handle4 { label } => need(label, 1, "a 4-handle"),
            Handle2(data) => {
                for j in data.labels.keys() {
                    need(j, 1, "a 2-handle pairing")?;
                }
                Ok(())
            }
            DiskStab { .. } | Handle0 { .. } | Handle1 | Handle3 => Ok(()),
        }
    }

    /// Basepoint pairs per label on the outgoing end.
    pub fn outgoing(&self) -> BTreeMap<String, u32> {
        let mut out = self.incoming.clone();
        if let Some((j, dir)) = self.count_change() {
            let p = out.entry(j.to_string()).or_insert(0);
            match dir {
                Direction::Plus => *p += 1,
                Direction::Minus => *p = p.saturating_sub(1),
            }
            if *p == 0 {
                out.remove(j);
            }
        }
        out
    }

    /// Topological contribution: the product cobordism on the smaller end,
    /// plus the local change.
    pub fn topology(&self) -> Result<CobordismTopology> {
        use PieceKind::*;
        self.validate()?;
        let incoming = &self.incoming;
        let outgoing = self.outgoing();
        let smaller = match self.count_change() {
            Some((_, Direction::Minus)) => &outgoing,
            _ => incoming,
        };
        let mut t = CobordismTopology::identity(smaller);
        let in_total: u64 = incoming.values().map(|&p| p as u64).sum();
        let out_total: u64 = outgoing.values().map(|&p| p as u64).sum();
        (t.w_in, t.z_in, t.w_out, t.z_out) = (in_total, in_total, out_total, out_total);
        match &self.kind {
            QuasiStabS { label: j, .. } => t_label(&mut t.labels, j).chi_w += 1,
            QuasiStabT { label: j, .. } => t_label(&mut t.labels, j).chi_z += 1,
            BandW { label: j } => t_label(&mut t.labels, j).chi_w -= 1,
            BandZ { label: j } => t_label(&mut t.labels, j).chi_z -= 1,
            DiskStab { label: j, .. } => {
                let l = t_label(&mut t.labels, j);
                l.chi_w += 1;
                l.chi_z += 1;
            }
            Handle0 { label: j } | Handle4 { label: j } => {
                let l = t_label(&mut t.labels, j);
                l.chi_w += 1;
                l.chi_z += 1;
                t.chi_w4 = 1;
            }
            Handle1 | Handle3 => t.chi_w4 = -1,
            Handle2(data) => {
                for (j, &(pairing, int)) in &data.labels {
                    let l = t_label(&mut t.labels, j);
                    l.pairing += pairing;
                    l.int += int;
                }
                t.c1_sq = data.c1_sq;
                t.sigma_w4 = data.sigma;
                t.chi_w4 = 1;
            }
        }
        Ok(t)
    }
}

fn t_label<'a>(labels: &'a mut BTreeMap<String, LabelData>, j: &str) -> &'a mut LabelData {
    labels.entry(j.to_string()).or_default()
}

/// The grading change of a single piece.
pub fn piece_delta(p: &ElementaryPiece) -> Result<GradingDelta> {
    use PieceKind::*;
    p.validate()?;
    let half = rat(1, 2);
    let d = |j: &str, a: Rational, w: Rational, z: Rational| GradingDelta::new([(j.to_string(), a)], Some(w), Some(z));
    Ok(match &p.kind {
        QuasiStabS { label, .. } => d(label, half.clone(), half.clone(), -half),
        QuasiStabT { label, .. } => d(label, -half.clone(), -half.clone(), half),
        BandZ { label } => d(label, half, int(0), int(-1)),
        BandW { label } => d(label, -half, int(-1), int(0)),
        DiskStab { .. } | Handle1 | Handle3 => GradingDelta::new([], Some(half.clone()), Some(half)),
        Handle0 { .. } | Handle4 { .. } => GradingDelta::default(),
        Handle2(data) => {
            let d_a = data
                .labels
                .iter()
                .map(|(j, &(pairing, int))| (j.clone(), rat(pairing - int, 2)));
            let pairing: i64 = data.labels.values().map(|x| x.0).sum();
            let int_sq: i64 = data.labels.values().map(|x| x.1).sum();
            let shifted = chern_shift(data.c1_sq, pairing, int_sq);
            GradingDelta::new(
                d_a,
                Some(rat(data.c1_sq - 2 - 3 * data.sigma, 4)),
                Some(rat(shifted - 2 - 3 * data.sigma, 4)),
            )
        }
    })
}

/// Sums piece deltas and glues their topology; errors if consecutive
/// basepoint counts do not match or if the summed delta disagrees with the
/// closed formulas on the glued topology.
pub fn compose(pieces: &[ElementaryPiece]) -> Result<(GradingDelta, CobordismTopology)> {
    let mut delta = GradingDelta::default();
    let mut top = CobordismTopology::default();
    for (i, p) in pieces.iter().enumerate() {
        let pt = p.topology()?;
        delta = &delta + &piece_delta(p)?;
        if i == 0 {
            top = pt;
            continue;
        }
        let prev_out = pieces[i - 1].outgoing();
        if prev_out != p.incoming {
            return Err(Error::domain(format!(
                "piece {} starts on {:?} but piece {} ends on {:?}",
                i + 1,
                p.incoming,
                i,
                prev_out
            )));
        }
        for (j, l) in pt.labels {
            let acc = t_label(&mut top.labels, &j);
            acc.pairing += l.pairing;
            acc.int += l.int;
            acc.chi_w += l.chi_w;
            acc.chi_z += l.chi_z;
        }
        // gluing along the middle link: one w-arc and one z-arc per pair
        for (j, &p) in &prev_out {
            let acc = t_label(&mut top.labels, j);
            acc.chi_w -= p as i64;
            acc.chi_z -= p as i64;
        }
        top.c1_sq += pt.c1_sq;
        top.chi_w4 += pt.chi_w4;
        top.sigma_w4 += pt.sigma_w4;
        top.w_out = pt.w_out;
        top.z_out = pt.z_out;
        top.gr_w_defined &= pt.gr_w_defined;
        top.gr_z_defined &= pt.gr_z_defined;
    }
    let closed = closed_delta(&top);
    if closed != delta {
        return Err(Error::Verification(format!(
            "piece deltas sum to\n{delta}\nbut the glued topology gives\n{closed}"
        )));
    }
    Ok((delta, top))
}

/// Pushes Alexander changes forward along a relabelling `f`; labels of
/// `f`'s target with empty preimage get zero.
pub fn collapse(delta: &GradingDelta, f: &BTreeMap<String, String>) -> Result<GradingDelta> {
    let mut d_a = Vec::new();
    for (j, v) in delta.alexander() {
        let target = f
            .get(j)
            .ok_or_else(|| Error::domain(format!("relabelling is not defined on `{j}`")))?;
        d_a.push((target.clone(), v.clone()));
    }
    Ok(GradingDelta::new(d_a, delta.dgr_w.clone(), delta.dgr_z.clone()))
}

/// Hypotheses for [`negdef_knot_map`], asserted by the caller.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct NegDefHypotheses {
    pub b1_zero: bool,
    pub b2_plus_zero: bool,
    pub surface_connected: bool,
    /// The dividing set is two arcs and `Σ_w`, `Σ_z` are connected.
    pub two_arc_dividing_set: bool,
}

impl NegDefHypotheses {
    pub fn asserted() -> Self {
        NegDefHypotheses {
            b1_zero: true,
            b2_plus_zero: true,
            surface_connected: true,
            two_arc_dividing_set: true,
        }
    }

    fn check(&self) -> Result<()> {
        let missing: Vec<&str> = [
            (self.b1_zero, "b1(W) = 0"),
            (self.b2_plus_zero, "b2+(W) = 0"),
            (self.surface_connected, "connected surface"),
            (self.two_arc_dividing_set, "two-arc dividing set"),
        ]
        .iter()
        .filter(|(ok, _)| !ok)
        .map(|(_, name)| *name)
        .collect();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(Error::domain(format!("hypotheses not asserted: {}", missing.join(", "))))
        }
    }
}

/// The induced map on the infinity complex, `1 ↦ U^u_exp V^v_exp`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KnotMap {
    pub d1: Rational,
    pub d2: Rational,
    pub u_exp: Rational,
    pub v_exp: Rational,
}

impl KnotMap {
    pub fn is_identity(&self) -> bool {
        self.u_exp.is_zero() && self.v_exp.is_zero()
    }

    /// The composite map: exponents add.
    pub fn then(&self, other: &KnotMap) -> KnotMap {
        KnotMap {
            d1: &self.d1 + &other.d1,
            d2: &self.d2 + &other.d2,
            u_exp: &self.u_exp + &other.u_exp,
            v_exp: &self.v_exp + &other.v_exp,
        }
    }
}

/// `d_1 = (c_1^2 - 2χ - 3σ)/4 - 2g(Σ_w)`,
/// `d_2 = (c_1(s - PD[Σ])^2 - 2χ - 3σ)/4 - 2g(Σ_z)`, and the map
/// `1 ↦ U^(-d_1/2) V^(-d_2/2)`.
pub fn negdef_knot_map(t: &CobordismTopology, g_w: u64, g_z: u64, hyp: NegDefHypotheses) -> Result<KnotMap> {
    hyp.check()?;
    t.validate()?;
    let d1 = maslov_constant(t.c1_sq, t) - int(2 * g_w as i64);
    let d2 = maslov_constant(t.shifted_c1_sq(), t) - int(2 * g_z as i64);
    let u_exp = -&d1 / int(2);
    let v_exp = -&d2 / int(2);
    Ok(KnotMap { d1, d2, u_exp, v_exp })
}

/// For a closed surface in `S^4` through the basepoints, `1 ↦ U^g_w V^g_z`.
pub fn closed_surface_map(g_w: u64, g_z: u64) -> (u64, u64) {
    (g_w, g_z)
}

/// Parses a piece list: an optional `link <label>=<pairs> ...` line, then
/// lines `piece <kind> [key=value ...]`.
///
/// Kinds are `quasi-stab-s`, `quasi-stab-t`, `band-w`, `band-z`,
/// `disk-stab`, `handle0` .. `handle4`. Keys are `j=<label>`, `dir=+|-`, and
/// for `handle2` also `c1sq=`, `sigma=`, `pair.<label>=`, `int.<label>=`.
pub fn parse_pieces(text: &str) -> Result<Vec<ElementaryPiece>> {
    let mut counts: BTreeMap<String, u32> = BTreeMap::new();
    let mut pieces = Vec::new();
    let mut seen_link = false;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut words = line.split_whitespace();
        match words.next() {
            Some("link") => {
                if seen_link || !pieces.is_empty() {
                    return Err(Error::parse(line_no, "`link` must come once, before any piece"));
                }
                seen_link = true;
                for w in words {
                    let (k, v) = split_kv(w, line_no)?;
                    let p: u32 = v
                        .parse()
                        .map_err(|_| Error::parse(line_no, format!("`{v}` is not a pair count")))?;
                    if counts.insert(k.to_string(), p).is_some() {
                        return Err(Error::parse(line_no, format!("duplicate label `{k}`")));
                    }
                }
                counts.retain(|_, p| *p > 0);
            }
            Some("piece") => {
                let kind_word = words
                    .next()
                    .ok_or_else(|| Error::parse(line_no, "piece needs a kind"))?;
                let kind = parse_kind(kind_word, words, line_no)?;
                let piece = ElementaryPiece::new(kind, counts.clone());
                piece.validate().map_err(|e| Error::parse(line_no, e.to_string()))?;
                counts = piece.outgoing();
                pieces.push(piece);
            }
            Some(other) => return Err(Error::parse(line_no, format!("unknown directive `{other}`"))),
            None => unreachable!(),
        }
    }
    Ok(pieces)
}

fn parse_kind<'a>(kind: &str, words: impl Iterator<Item = &'a str>, line: usize) -> Result<PieceKind> {
    let mut label: Option<String> = None;
    let mut dir = Direction::Plus;
    let mut h2 = Handle2Data::default();
    for w in words {
        let (k, v) = split_kv(w, line)?;
        match k {
            "j" => label = Some(v.to_string()),
            "dir" => {
                dir = match v {
                    "+" => Direction::Plus,
                    "-" => Direction::Minus,
                    _ => return Err(Error::parse(line, format!("dir must be + or -, found `{v}`"))),
                }
            }
            "c1sq" if kind == "handle2" => h2.c1_sq = parse_int(v, line)?,
            "sigma" if kind == "handle2" => h2.sigma = parse_int(v, line)?,
            _ if kind == "handle2" && (k.starts_with("pair.") || k.starts_with("int.")) => {
                let (which, j) = k.split_once('.').expect("checked prefix");
                let e = h2.labels.entry(j.to_string()).or_insert((0, 0));
                let v = parse_int(v, line)?;
                if which == "pair" {
                    e.0 = v;
                } else {
                    e.1 = v;
                }
            }
            _ => return Err(Error::parse(line, format!("unknown key `{k}` for {kind}"))),
        }
    }
    let needs_label = |label: Option<String>| label.ok_or_else(|| Error::parse(line, format!("{kind} needs j=<label>")));
    let no_dir = |dir: Direction| {
        if dir == Direction::Plus {
            Ok(())
        } else {
            Err(Error::parse(line, format!("{kind} takes no direction")))
        }
    };
    Ok(match kind {
        "quasi-stab-s" => PieceKind::QuasiStabS { label: needs_label(label)?, dir },
        "quasi-stab-t" => PieceKind::QuasiStabT { label: needs_label(label)?, dir },
        "disk-stab" => PieceKind::DiskStab { label: needs_label(label)?, dir },
        "band-w" => {
            no_dir(dir)?;
            PieceKind::BandW { label: needs_label(label)? }
        }
        "band-z" => {
            no_dir(dir)?;
            PieceKind::BandZ { label: needs_label(label)? }
        }
        "handle0" => {
            no_dir(dir)?;
            PieceKind::Handle0 { label: needs_label(label)? }
        }
        "handle4" => {
            no_dir(dir)?;
            PieceKind::Handle4 { label: needs_label(label)? }
        }
        "handle1" | "handle3" | "handle2" => {
            no_dir(dir)?;
            if label.is_some() {
                return Err(Error::parse(line, format!("{kind} takes no label")));
            }
            match kind {
                "handle1" => PieceKind::Handle1,
                "handle3" => PieceKind::Handle3,
                _ => PieceKind::Handle2(h2),
            }
        }
        _ => return Err(Error::parse(line, format!("unknown piece kind `{kind}`"))),
    })
}

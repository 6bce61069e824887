//! Self-checks: identities expected to hold exactly, run over fixed inputs.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bicomplex::{figure_eight, staircase_torus_knot, trefoil, unknot, ChainComplexUV};
use crate::bounds::{m_t_charvec, m_t_class, m_t_scalar, torus_upsilon, torus_upsilon_adjacent, HomologyClass};
use crate::cobordism::{compose, Direction, ElementaryPiece, Handle2Data, PieceKind};
use crate::error::{Error, Result};
use crate::pl::int;
use crate::t_modified::{farey_grid, upsilon_at, upsilon_pl};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Sharpness,
    Mt,
    Additivity,
    Conjugation,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Sharpness, Suite::Mt, Suite::Additivity, Suite::Conjugation];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Sharpness => "sharpness",
            Suite::Mt => "mt",
            Suite::Additivity => "additivity",
            Suite::Conjugation => "conjugation",
        }
    }

    pub fn from_name(name: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|s| s.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, name: impl Into<String>, outcome: Result<bool>) {
        let (passed, detail) = match outcome {
            Ok(ok) => (ok, None),
            Err(e) => (false, Some(e.to_string())),
        };
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail,
        });
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            write!(f, "{status}\t{}\t{}", self.suite.name(), c.name)?;
            if let Some(d) = &c.detail {
                write!(f, "\t{d}")?;
            }
            writeln!(f)?;
        }
        let passed = self.checks.iter().filter(|c| c.passed).count();
        write!(f, "{}: {passed}/{} passed", self.suite.name(), self.checks.len())
    }
}

/// The named example complexes.
pub fn fixtures() -> Vec<(String, ChainComplexUV)> {
    let mut out = vec![
        ("unknot".to_string(), unknot()),
        ("trefoil".to_string(), trefoil()),
        ("figure_eight".to_string(), figure_eight()),
    ];
    for (p, q) in [(2, 5), (3, 4), (3, 5), (4, 5)] {
        out.push((format!("T({p},{q})"), staircase_torus_knot(p, q).expect("coprime")));
    }
    out
}

pub fn run(suite: Suite) -> Report {
    let mut r = Report { suite, checks: Vec::new() };
    match suite {
        Suite::Sharpness => sharpness(&mut r),
        Suite::Mt => mt(&mut r),
        Suite::Additivity => additivity(&mut r, 200, 12, 0x5eed),
        Suite::Conjugation => conjugation(&mut r),
    }
    r
}

fn sharpness(r: &mut Report) {
    for n in 1..=8u64 {
        r.push(
            format!("M_t({n}) = Upsilon T({n},{})", n + 1),
            torus_upsilon_adjacent(n).map(|f| f == m_t_scalar(n as i64)),
        );
    }
    for (a, b) in [(2u64, 5u64), (3, 5), (3, 7)] {
        let lhs = torus_upsilon(a, b);
        let rhs = torus_upsilon(a, b - a).map(|f| &f + &m_t_scalar(a as i64));
        r.push(format!("T({a},{b}) = T({a},{}) + M_t({a})", b - a), lhs.and_then(|l| rhs.map(|r| l == r)));
    }
    for n in 2..=5u32 {
        let computed = staircase_torus_knot(n, n + 1).and_then(|c| upsilon_pl(&c, None));
        let closed = torus_upsilon_adjacent(n as u64);
        r.push(
            format!("complex of T({n},{}) attains the bound", n + 1),
            computed.and_then(|c| closed.map(|f| c == f)),
        );
    }
}

fn mt(r: &mut Report) {
    let mut classes = vec![HomologyClass::default()];
    let mut frontier = classes.clone();
    for _ in 0..3 {
        let mut next = Vec::new();
        for c in &frontier {
            for s in -4..=4 {
                let mut v = c.coeffs.clone();
                v.push(s);
                next.push(HomologyClass::new(v));
            }
        }
        classes.extend(next.iter().cloned());
        frontier = next;
    }
    let bad: Vec<String> = classes
        .iter()
        .filter(|s| m_t_charvec(s) != m_t_class(s))
        .map(|s| format!("{:?}", s.coeffs))
        .collect();
    let outcome = if bad.is_empty() {
        Ok(true)
    } else {
        Err(Error::Verification(format!("disagree on {}", bad.join(" "))))
    };
    r.push(format!("two definitions of M_t agree on {} classes", classes.len()), outcome);
}

fn additivity(r: &mut Report, count: usize, max_len: usize, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for i in 0..count {
        let len = rng.gen_range(0..=max_len);
        let pieces = random_pieces(&mut rng, len);
        let ok = compose(&pieces).map(|(d, _)| match (&d.dgr_w, &d.dgr_z) {
            (Some(w), Some(z)) => d.d_a_total() == (w - z) / int(2),
            _ => false,
        });
        match ok {
            Ok(true) => {}
            Ok(false) => failures.push(format!("sequence {i}: collapsed dA mismatch")),
            Err(e) => failures.push(format!("sequence {i}: {e}")),
        }
    }
    let outcome = if failures.is_empty() {
        Ok(true)
    } else {
        Err(Error::Verification(failures.join("; ")))
    };
    r.push(format!("{count} random piece sequences are additive"), outcome);
}

fn conjugation(r: &mut Report) {
    let grid = farey_grid(6);
    for (name, cx) in fixtures() {
        let outcome = cx.conjugate().and_then(|conj| {
            for &t in &grid {
                if upsilon_at(&conj, t)? != upsilon_at(&cx, t.reflect())? {
                    return Err(Error::Verification(format!("differs at t = {}/{}", t.m(), t.n())));
                }
            }
            Ok(true)
        });
        r.push(format!("{name}: Upsilon of conjugate is Upsilon(2 - t)"), outcome);
    }
}

const LABELS: [&str; 3] = ["K", "L", "M"];

/// A random composable sequence of `len` pieces on a random starting link.
pub fn random_pieces<R: Rng>(rng: &mut R, len: usize) -> Vec<ElementaryPiece> {
    let mut counts: BTreeMap<String, u32> = BTreeMap::new();
    for j in &LABELS[..2] {
        let p = rng.gen_range(0..=2);
        if p > 0 {
            counts.insert(j.to_string(), p);
        }
    }
    let mut out = Vec::with_capacity(len);
    while out.len() < len {
        let piece = ElementaryPiece::new(random_kind(rng), counts.clone());
        if piece.validate().is_ok() {
            counts = piece.outgoing();
            out.push(piece);
        }
    }
    out
}

fn random_kind<R: Rng>(rng: &mut R) -> PieceKind {
    let label = LABELS.choose(rng).expect("nonempty").to_string();
    let dir = if rng.gen_bool(0.5) { Direction::Plus } else { Direction::Minus };
    match rng.gen_range(0..10) {
        0 => PieceKind::QuasiStabS { label, dir },
        1 => PieceKind::QuasiStabT { label, dir },
        2 => PieceKind::BandW { label },
        3 => PieceKind::BandZ { label },
        4 => PieceKind::DiskStab { label, dir },
        5 => PieceKind::Handle0 { label },
        6 => PieceKind::Handle4 { label },
        7 => PieceKind::Handle1,
        8 => PieceKind::Handle3,
        _ => {
            let mut labels = BTreeMap::new();
            labels.insert(label, (rng.gen_range(-5..=5), rng.gen_range(-6..=0)));
            PieceKind::Handle2(Handle2Data {
                c1_sq: -(2 * rng.gen_range(0..3) + 1),
                sigma: rng.gen_range(-1..=1),
                labels,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(Suite::from_name(s.name()), Some(s));
        }
        assert_eq!(Suite::from_name("bogus"), None);
    }

    #[test]
    fn random_sequences_chain() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let pieces = random_pieces(&mut rng, 12);
            assert_eq!(pieces.len(), 12);
            for w in pieces.windows(2) {
                assert_eq!(w[0].outgoing(), w[1].incoming);
            }
        }
    }

    #[test]
    fn quick_suites_pass() {
        for s in [Suite::Sharpness, Suite::Additivity, Suite::Conjugation] {
            let r = run(s);
            assert!(r.passed(), "{r}");
        }
    }

    #[test]
    fn failures_are_reported() {
        let mut r = Report { suite: Suite::Mt, checks: Vec::new() };
        r.push("ok", Ok(true));
        r.push("broken", Err(Error::Verification("x".into())));
        assert!(!r.passed());
        let text = r.to_string();
        assert!(text.contains("FAIL\tmt\tbroken\tverification failed: x"));
        assert!(text.ends_with("mt: 1/2 passed"));
    }
}

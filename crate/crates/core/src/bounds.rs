//! `M_t`, the `Υ` and `τ` bounds for surfaces in negative-definite
//! cobordisms, and closed forms for `Υ` of positive torus knots.

use num::Integer;

use crate::error::{Error, Result};
use crate::pl::{int, rat, Line, PlFunction, Rational};

/// Coordinates of `[Σ]` in an orthonormal basis `e_i` of `H_2(W)`, with
/// `e_i · e_j = -δ_ij`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct HomologyClass {
    pub coeffs: Vec<i64>,
}

impl HomologyClass {
    pub fn new(coeffs: Vec<i64>) -> Self {
        HomologyClass { coeffs }
    }

    /// Accepts a class given against an intersection form, which must be
    /// minus the identity.
    pub fn with_form(form: &[Vec<i64>], coeffs: Vec<i64>) -> Result<Self> {
        let n = coeffs.len();
        let orthonormal = form.len() == n
            && form.iter().enumerate().all(|(i, row)| {
                row.len() == n && row.iter().enumerate().all(|(j, &x)| x == if i == j { -1 } else { 0 })
            });
        if !orthonormal {
            return Err(Error::domain("intersection form must be -I in the chosen basis"));
        }
        Ok(HomologyClass { coeffs })
    }

    pub fn rank(&self) -> usize {
        self.coeffs.len()
    }
}

impl From<Vec<i64>> for HomologyClass {
    fn from(coeffs: Vec<i64>) -> Self {
        HomologyClass { coeffs }
    }
}

/// A characteristic vector: pairings `a_i = <C, e_i>`, all odd.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CharVector {
    coords: Vec<i64>,
}

impl CharVector {
    pub fn new(coords: Vec<i64>) -> Result<Self> {
        if let Some(a) = coords.iter().find(|a| a.is_even()) {
            return Err(Error::domain(format!("characteristic coordinate {a} is even")));
        }
        Ok(CharVector { coords })
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    /// `C^2 = -Σ a_i^2`.
    pub fn square(&self) -> i64 {
        -self.coords.iter().map(|a| a * a).sum::<i64>()
    }

    /// `<C, [Σ]> = -Σ a_i s_i`.
    pub fn pairing(&self, s: &HomologyClass) -> i64 {
        -self.coords.iter().zip(&s.coeffs).map(|(a, s)| a * s).sum::<i64>()
    }
}

/// `|[Σ]| = Σ |s_i|`.
pub fn l1_norm(s: &HomologyClass) -> i64 {
    s.coeffs.iter().map(|x| x.abs()).sum()
}

/// `[Σ]·[Σ] = -Σ s_i^2`.
pub fn self_intersection(s: &HomologyClass) -> i64 {
    -s.coeffs.iter().map(|x| x * x).sum::<i64>()
}

fn odd_window(s: i64) -> impl Iterator<Item = i64> {
    let r = 2 * s.abs() + 1;
    (-r..=r).step_by(2)
}

/// `M_t(s) = max over odd a of (-a^2 + 1 + 2ast - 2s^2 t)/4`.
pub fn m_t_scalar(s: i64) -> PlFunction {
    let lines: Vec<Line> = odd_window(s)
        .map(|a| Line::new(rat(s * (a - s), 2), rat(1 - a * a, 4)))
        .collect();
    PlFunction::upper_envelope(&lines).expect("window is nonempty")
}

/// `M_t([Σ]) = Σ M_t(s_i)`.
pub fn m_t_class(s: &HomologyClass) -> PlFunction {
    s.coeffs
        .iter()
        .fold(PlFunction::zero(), |acc, &x| &acc + &m_t_scalar(x))
}

/// `M_t([Σ])` as a maximum over characteristic vectors of
/// `(C^2 + b_2 - 2t<C,Σ> + 2t Σ·Σ)/4`.
pub fn m_t_charvec(s: &HomologyClass) -> PlFunction {
    let b2 = s.rank() as i64;
    let sq = self_intersection(s);
    let windows: Vec<Vec<i64>> = s.coeffs.iter().map(|&x| odd_window(x).collect()).collect();
    let mut lines = Vec::new();
    let mut idx = vec![0usize; windows.len()];
    loop {
        let c = CharVector::new(idx.iter().zip(&windows).map(|(&i, w)| w[i]).collect())
            .expect("window entries are odd");
        lines.push(Line::new(
            rat(-2 * c.pairing(s) + 2 * sq, 4),
            rat(c.square() + b2, 4),
        ));
        // odometer over the box
        let mut k = 0;
        loop {
            if k == idx.len() {
                return PlFunction::upper_envelope(&lines).expect("box is nonempty");
            }
            idx[k] += 1;
            if idx[k] < windows[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// `|t - 1| - 1 = max(-t, t - 2)`.
pub fn genus_term() -> PlFunction {
    let down = PlFunction::linear(&Line::new(int(-1), int(0)));
    let up = PlFunction::linear(&Line::new(int(1), int(-2)));
    down.max(&up)
}

/// `Υ_{K1} + M_t([Σ]) + g(|t - 1| - 1)`, a lower bound for `Υ_{K2}`.
pub fn upsilon_lower_bound(upsilon_k1: &PlFunction, s: &HomologyClass, genus: u64) -> PlFunction {
    let g = int(genus as i64);
    &(upsilon_k1 + &m_t_class(s)) + &genus_term().scale(&g)
}

/// `τ_1 - (|[Σ]| + [Σ]·[Σ])/2 + g`, an upper bound for `τ(K2)`.
pub fn tau_upper_bound(tau_k1: &Rational, s: &HomologyClass, genus: u64) -> Rational {
    tau_k1 - rat(l1_norm(s) + self_intersection(s), 2) + int(genus as i64)
}

/// Bounds on `Υ_{K-}` from `Υ_{K+}` for a positive-to-negative crossing
/// change: `Υ_{K+} <= Υ_{K-} <= Υ_{K+} - M_t(2)`.
pub fn crossing_change_bounds(upsilon_kplus: &PlFunction) -> (PlFunction, PlFunction) {
    // K- -> K+ by a genus 0 surface in the blow-up with [Σ] = 0, and back
    // with [Σ] = 2E
    let lower = upsilon_lower_bound(upsilon_kplus, &HomologyClass::default(), 0);
    let through_blowup = upsilon_lower_bound(&PlFunction::zero(), &HomologyClass::new(vec![2]), 0);
    let upper = upsilon_kplus - &through_blowup;
    (lower, upper)
}

/// `Υ_{T(n,n+1)}`: on `[2i/n, (2i+2)/n]` it is `-i(i+1) - n(n-1-2i)t/2`.
pub fn torus_upsilon_adjacent(n: u64) -> Result<PlFunction> {
    if n < 1 {
        return Err(Error::domain("T(n, n+1) needs n >= 1"));
    }
    let n = n as i64;
    let points = (0..=n).map(|i| (rat(2 * i, n), int(-i * (n - i)))).collect();
    PlFunction::from_points(points)
}

/// `Υ_{T(p,q)}` for a positive torus knot, via
/// `Υ_{T(a,b)} = Υ_{T(a,b-a)} + Υ_{T(a,a+1)}`.
pub fn torus_upsilon(p: u64, q: u64) -> Result<PlFunction> {
    if p == 0 || q == 0 {
        return Err(Error::domain("torus knot parameters must be positive"));
    }
    if p.gcd(&q) != 1 {
        return Err(Error::domain(format!("gcd({p}, {q}) != 1")));
    }
    let mut acc = PlFunction::zero();
    let (mut a, mut b) = (p.min(q), p.max(q));
    while a > 1 {
        let step = torus_upsilon_adjacent(a)?;
        if b == a + 1 {
            return Ok(&acc + &step);
        }
        acc = &acc + &step;
        let rest = b - a;
        (a, b) = (a.min(rest), a.max(rest));
    }
    Ok(acc)
}

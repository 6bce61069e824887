//! Exact rationals and continuous piecewise-linear functions on `[0, 2]`.
//!
//! Every function is stored by its breakpoints `(t, value)` with `t` strictly
//! increasing from `0` to `2`; between breakpoints it is the linear
//! interpolation. The representation is kept canonical: no interior breakpoint
//! has equal slopes on both sides, so structural equality is function
//! equality.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num::{BigInt, One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact arbitrary-precision rational, always in lowest terms.
pub type Rational = num::BigRational;

/// `n / d` as a [`Rational`]. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Formats as `p/q`, or `p` when the denominator is one.
pub fn fmt_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p/q` or an integer `p`. The result is reduced.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let well_formed = |x: &str, signed: bool| {
        let digits = if signed {
            x.strip_prefix('-').or_else(|| x.strip_prefix('+')).unwrap_or(x)
        } else {
            x
        };
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !well_formed(num, true) {
        return None;
    }
    let num = BigInt::from_str(num.trim_start_matches('+')).ok()?;
    let den = match den {
        Some(d) => {
            if !well_formed(d, false) {
                return None;
            }
            BigInt::from_str(d).ok()?
        }
        None => BigInt::one(),
    };
    if den.is_zero() {
        return None;
    }
    Some(Rational::new(num, den))
}

fn domain_start() -> Rational {
    Rational::zero()
}

fn domain_end() -> Rational {
    int(2)
}

fn in_domain(t: &Rational) -> bool {
    !t.is_negative() && *t <= domain_end()
}

/// An affine function `t ↦ intercept + slope·t`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Line {
    pub slope: Rational,
    pub intercept: Rational,
}

impl Line {
    pub fn new(slope: Rational, intercept: Rational) -> Self {
        Line { slope, intercept }
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        &self.intercept + &self.slope * t
    }

    /// Abscissa where two non-parallel lines meet.
    fn crossing(&self, other: &Line) -> Rational {
        (&self.intercept - &other.intercept) / (&other.slope - &self.slope)
    }
}

/// A continuous piecewise-linear function on `[0, 2]` in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PlFunction {
    points: Vec<(Rational, Rational)>,
}

impl PlFunction {
    pub fn zero() -> Self {
        Self::constant(Rational::zero())
    }

    pub fn constant(c: Rational) -> Self {
        PlFunction {
            points: vec![(domain_start(), c.clone()), (domain_end(), c)],
        }
    }

    pub fn linear(line: &Line) -> Self {
        PlFunction {
            points: vec![
                (domain_start(), line.eval(&domain_start())),
                (domain_end(), line.eval(&domain_end())),
            ],
        }
    }

    /// Builds a function from breakpoints. The `t` values must increase
    /// strictly from `0` to `2`; redundant breakpoints are dropped.
    pub fn from_points(points: Vec<(Rational, Rational)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::domain("a PL function needs at least two breakpoints"));
        }
        if points[0].0 != domain_start() || points[points.len() - 1].0 != domain_end() {
            return Err(Error::domain("breakpoints must start at t = 0 and end at t = 2"));
        }
        if points.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::domain("breakpoint t values must be strictly increasing"));
        }
        Ok(Self::canonical(points))
    }

    fn canonical(points: Vec<(Rational, Rational)>) -> Self {
        let mut out: Vec<(Rational, Rational)> = Vec::with_capacity(points.len());
        for p in points {
            while out.len() >= 2 {
                let (t0, v0) = &out[out.len() - 2];
                let (t1, v1) = &out[out.len() - 1];
                // collinear iff (t1 - t0)(v2 - v1) == (t2 - t1)(v1 - v0)
                if (t1 - t0) * (&p.1 - v1) == (&p.0 - t1) * (v1 - v0) {
                    out.pop();
                } else {
                    break;
                }
            }
            out.push(p);
        }
        PlFunction { points: out }
    }

    pub fn breakpoints(&self) -> &[(Rational, Rational)] {
        &self.points
    }

    /// Value at `t`; errors when `t` is outside `[0, 2]`.
    pub fn eval(&self, t: &Rational) -> Result<Rational> {
        if !in_domain(t) {
            return Err(Error::OutOfDomain(t.clone()));
        }
        Ok(self.eval_unchecked(t))
    }

    fn eval_unchecked(&self, t: &Rational) -> Rational {
        let idx = self.points.partition_point(|(bt, _)| bt < t);
        if idx < self.points.len() && self.points[idx].0 == *t {
            return self.points[idx].1.clone();
        }
        let (t0, v0) = &self.points[idx - 1];
        let (t1, v1) = &self.points[idx];
        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    }

    /// Slope on each segment, left to right.
    pub fn slopes(&self) -> Vec<Rational> {
        self.points
            .windows(2)
            .map(|w| (&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0))
            .collect()
    }

    /// Slope of the segment starting at `t = 0`.
    pub fn first_slope(&self) -> Rational {
        let (t0, v0) = &self.points[0];
        let (t1, v1) = &self.points[1];
        (v1 - v0) / (t1 - t0)
    }

    fn merged_ts(&self, other: &PlFunction) -> Vec<Rational> {
        let mut ts: Vec<Rational> = self
            .points
            .iter()
            .chain(other.points.iter())
            .map(|(t, _)| t.clone())
            .collect();
        ts.sort();
        ts.dedup();
        ts
    }

    fn pointwise(&self, other: &PlFunction, op: impl Fn(Rational, Rational) -> Rational) -> Self {
        let points = self
            .merged_ts(other)
            .into_iter()
            .map(|t| {
                let v = op(self.eval_unchecked(&t), other.eval_unchecked(&t));
                (t, v)
            })
            .collect();
        Self::canonical(points)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::canonical(
            self.points
                .iter()
                .map(|(t, v)| (t.clone(), v * c))
                .collect(),
        )
    }

    /// Pointwise maximum, with crossing points inserted where needed.
    pub fn max(&self, other: &PlFunction) -> Self {
        let ts = self.merged_ts(other);
        let mut points = Vec::with_capacity(ts.len() * 2);
        let diff = |t: &Rational| self.eval_unchecked(t) - other.eval_unchecked(t);
        let value = |t: &Rational| {
            let a = self.eval_unchecked(t);
            let b = other.eval_unchecked(t);
            if a >= b {
                a
            } else {
                b
            }
        };
        for (i, t) in ts.iter().enumerate() {
            if i > 0 {
                let t0 = &ts[i - 1];
                let d0 = diff(t0);
                let d1 = diff(t);
                if (d0.is_positive() && d1.is_negative()) || (d0.is_negative() && d1.is_positive()) {
                    let cross = t0 + &d0 / (&d0 - &d1) * (t - t0);
                    let v = self.eval_unchecked(&cross);
                    points.push((cross, v));
                }
            }
            points.push((t.clone(), value(t)));
        }
        Self::canonical(points)
    }

    /// `t ↦ f(2 - t)`.
    pub fn reflect(&self) -> Self {
        let two = domain_end();
        PlFunction {
            points: self
                .points
                .iter()
                .rev()
                .map(|(t, v)| (&two - t, v.clone()))
                .collect(),
        }
    }

    /// `f(t) <= g(t)` for every `t` in `[0, 2]`.
    pub fn leq(&self, other: &PlFunction) -> bool {
        self.merged_ts(other)
            .iter()
            .all(|t| self.eval_unchecked(t) <= other.eval_unchecked(t))
    }

    /// Pointwise maximum of finitely many lines, restricted to `[0, 2]`.
    pub fn upper_envelope(lines: &[Line]) -> Result<Self> {
        if lines.is_empty() {
            return Err(Error::domain("upper envelope of an empty set of lines"));
        }
        let mut sorted: Vec<&Line> = lines.iter().collect();
        sorted.sort_by(|a, b| match a.slope.cmp(&b.slope) {
            Ordering::Equal => a.intercept.cmp(&b.intercept),
            o => o,
        });
        // keep only the highest line of each slope
        let mut distinct: Vec<&Line> = Vec::with_capacity(sorted.len());
        for l in sorted {
            if let Some(last) = distinct.last() {
                if last.slope == l.slope {
                    distinct.pop();
                }
            }
            distinct.push(l);
        }
        let mut hull: Vec<&Line> = Vec::with_capacity(distinct.len());
        for l in distinct {
            while hull.len() >= 2 {
                let a = hull[hull.len() - 2];
                let b = hull[hull.len() - 1];
                if a.crossing(l) <= a.crossing(b) {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(l);
        }
        let (lo, hi) = (domain_start(), domain_end());
        let mut ts = vec![lo.clone()];
        ts.extend(
            hull.windows(2)
                .map(|w| w[0].crossing(w[1]))
                .filter(|x| *x > lo && *x < hi),
        );
        ts.push(hi);
        let points = ts
            .into_iter()
            .map(|t| {
                let v = hull
                    .iter()
                    .map(|l| l.eval(&t))
                    .max()
                    .expect("hull is nonempty");
                (t, v)
            })
            .collect();
        Ok(Self::canonical(points))
    }

    /// Values at `0, step, 2·step, …` up to `2` (always including `2`).
    pub fn sample(&self, step: &Rational) -> Result<Vec<(Rational, Rational)>> {
        if !step.is_positive() {
            return Err(Error::domain("sampling step must be positive"));
        }
        let mut out = Vec::new();
        let mut t = domain_start();
        while t < domain_end() {
            out.push((t.clone(), self.eval_unchecked(&t)));
            t += step;
        }
        out.push((domain_end(), self.eval_unchecked(&domain_end())));
        Ok(out)
    }
}

impl Add for &PlFunction {
    type Output = PlFunction;
    fn add(self, other: &PlFunction) -> PlFunction {
        self.pointwise(other, |a, b| a + b)
    }
}

impl Sub for &PlFunction {
    type Output = PlFunction;
    fn sub(self, other: &PlFunction) -> PlFunction {
        self.pointwise(other, |a, b| a - b)
    }
}

impl Neg for &PlFunction {
    type Output = PlFunction;
    fn neg(self) -> PlFunction {
        PlFunction {
            points: self.points.iter().map(|(t, v)| (t.clone(), -v)).collect(),
        }
    }
}

/// One line per breakpoint: `t<TAB>value`.
impl fmt::Display for PlFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (t, v) in &self.points {
            writeln!(f, "{}\t{}", fmt_rational(t), fmt_rational(v))?;
        }
        Ok(())
    }
}

impl FromStr for PlFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut points = Vec::new();
        for (i, raw) in s.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split('\t');
            let (Some(t), Some(v), None) = (fields.next(), fields.next(), fields.next()) else {
                return Err(Error::parse(i + 1, "expected `t<TAB>value`"));
            };
            let t = parse_rational(t).ok_or_else(|| Error::parse(i + 1, format!("bad rational `{t}`")))?;
            let v = parse_rational(v).ok_or_else(|| Error::parse(i + 1, format!("bad rational `{v}`")))?;
            points.push((t, v));
        }
        PlFunction::from_points(points).map_err(|e| match e {
            Error::Domain(msg) => Error::parse(0, msg),
            other => other,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pl(points: &[(i64, i64, i64, i64)]) -> PlFunction {
        PlFunction::from_points(
            points
                .iter()
                .map(|&(tn, td, vn, vd)| (rat(tn, td), rat(vn, vd)))
                .collect(),
        )
        .unwrap()
    }

    fn minus_t() -> PlFunction {
        PlFunction::linear(&Line::new(int(-1), int(0)))
    }

    fn t_minus_2() -> PlFunction {
        PlFunction::linear(&Line::new(int(1), int(-2)))
    }

    #[test]
    fn rational_text() {
        assert_eq!(parse_rational("-3/6"), Some(rat(-1, 2)));
        assert_eq!(parse_rational("7"), Some(int(7)));
        assert_eq!(parse_rational("+2/4"), Some(rat(1, 2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("1/-2"), None);
        assert_eq!(parse_rational("1.5"), None);
        assert_eq!(fmt_rational(&rat(4, -6)), "-2/3");
        assert_eq!(fmt_rational(&int(-5)), "-5");
    }

    #[test]
    fn eval_examples() {
        assert_eq!(PlFunction::zero().eval(&rat(1, 2)).unwrap(), int(0));
        // -(1 - |t - 1|) == max(-t, t - 2)
        let m2 = minus_t().max(&t_minus_2());
        assert_eq!(m2.eval(&int(1)).unwrap(), int(-1));
        let t34 = pl(&[(0, 1, 0, 1), (2, 3, -2, 1), (4, 3, -2, 1), (2, 1, 0, 1)]);
        assert_eq!(t34.eval(&int(1)).unwrap(), int(-2));
        assert!(t34.eval(&rat(5, 2)).is_err());
        assert!(t34.eval(&rat(-1, 3)).is_err());
    }

    #[test]
    fn envelope_examples() {
        let one = PlFunction::upper_envelope(&[Line::new(int(0), int(0))]).unwrap();
        assert_eq!(one, PlFunction::zero());
        let env = PlFunction::upper_envelope(&[
            Line::new(int(-1), int(0)),
            Line::new(int(1), int(-2)),
        ])
        .unwrap();
        assert_eq!(env, pl(&[(0, 1, 0, 1), (1, 1, -1, 1), (2, 1, 0, 1)]));
        // brute-force comparison on a rational grid
        for k in 0..=40 {
            let t = rat(k, 20);
            let brute = std::cmp::max(-t.clone(), &t - int(2));
            assert_eq!(env.eval(&t).unwrap(), brute);
        }
        assert!(PlFunction::upper_envelope(&[]).is_err());
    }

    #[test]
    fn max_and_leq() {
        let m = minus_t().max(&t_minus_2());
        assert_eq!(m.eval(&rat(1, 2)).unwrap(), rat(-1, 2));
        assert!(m.leq(&m));
        assert!(minus_t().leq(&PlFunction::zero()));
        assert!(!PlFunction::zero().leq(&minus_t()));
        assert!(m.leq(&PlFunction::zero()));
    }

    #[test]
    fn reflect_examples() {
        assert_eq!(PlFunction::zero().reflect(), PlFunction::zero());
        assert_eq!(minus_t().reflect(), t_minus_2());
        let m = minus_t().max(&t_minus_2());
        assert_eq!(m.reflect(), m);
    }

    #[test]
    fn add_identity_and_canonical() {
        let f = pl(&[(0, 1, 0, 1), (1, 2, 1, 1), (2, 1, 3, 1)]);
        assert_eq!(&f + &PlFunction::zero(), f);
        // collinear interior point is dropped
        let g = pl(&[(0, 1, 0, 1), (1, 1, 1, 1), (2, 1, 2, 1)]);
        assert_eq!(g.breakpoints().len(), 2);
        assert_eq!(f.scale(&int(0)), PlFunction::zero());
    }

    #[test]
    fn from_points_rejects_bad_domains() {
        assert!(PlFunction::from_points(vec![(int(0), int(0))]).is_err());
        assert!(PlFunction::from_points(vec![(int(0), int(0)), (int(1), int(0))]).is_err());
        assert!(PlFunction::from_points(vec![
            (int(0), int(0)),
            (int(1), int(0)),
            (int(1), int(0)),
            (int(2), int(0))
        ])
        .is_err());
    }

    #[test]
    fn serialization_format() {
        let f = pl(&[(0, 1, 0, 1), (2, 3, -2, 1), (4, 3, -2, 1), (2, 1, 0, 1)]);
        assert_eq!(f.to_string(), "0\t0\n2/3\t-2\n4/3\t-2\n2\t0\n");
        assert_eq!("0\t0/1\n2/1\t0\n".parse::<PlFunction>().unwrap(), PlFunction::zero());
        assert!("0 0\n2 0\n".parse::<PlFunction>().is_err());
    }

    fn arb_rational() -> impl Strategy<Value = Rational> {
        (-50i64..50, 1i64..12).prop_map(|(n, d)| rat(n, d))
    }

    fn arb_t() -> impl Strategy<Value = Rational> {
        (0i64..=240).prop_map(|k| rat(k, 120))
    }

    fn arb_pl() -> impl Strategy<Value = PlFunction> {
        (
            proptest::collection::btree_set(1i64..60, 0..6),
            proptest::collection::vec(arb_rational(), 8),
        )
            .prop_map(|(interior, values)| {
                let mut ts = vec![int(0)];
                ts.extend(interior.into_iter().map(|k| rat(k, 30)));
                ts.push(int(2));
                let points = ts.into_iter().zip(values.into_iter().cycle()).collect();
                PlFunction::from_points(points).unwrap()
            })
    }

    fn arb_lines() -> impl Strategy<Value = Vec<Line>> {
        proptest::collection::vec(
            (arb_rational(), arb_rational()).prop_map(|(s, i)| Line::new(s, i)),
            1..12,
        )
    }

    proptest! {
        #[test]
        fn add_is_pointwise(f in arb_pl(), g in arb_pl(), t in arb_t()) {
            let sum = &f + &g;
            prop_assert_eq!(sum.eval(&t).unwrap(), f.eval(&t).unwrap() + g.eval(&t).unwrap());
        }

        #[test]
        fn max_is_pointwise(f in arb_pl(), g in arb_pl(), t in arb_t()) {
            let m = f.max(&g);
            let expect = std::cmp::max(f.eval(&t).unwrap(), g.eval(&t).unwrap());
            prop_assert_eq!(m.eval(&t).unwrap(), expect);
        }

        #[test]
        fn envelope_matches_brute_force(lines in arb_lines(), ts in proptest::collection::vec(arb_t(), 20)) {
            let env = PlFunction::upper_envelope(&lines).unwrap();
            for t in &ts {
                let brute = lines.iter().map(|l| l.eval(t)).max().unwrap();
                prop_assert_eq!(env.eval(t).unwrap(), brute);
            }
        }

        #[test]
        fn reflect_is_additive_involution(f in arb_pl(), g in arb_pl()) {
            prop_assert_eq!(f.reflect().reflect(), f.clone());
            prop_assert_eq!((&f + &g).reflect(), &f.reflect() + &g.reflect());
        }

        #[test]
        fn text_round_trip(f in arb_pl()) {
            prop_assert_eq!(f.to_string().parse::<PlFunction>().unwrap(), f);
        }
    }
}

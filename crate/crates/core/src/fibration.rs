//! Elliptic curves with a prescribed linear equivalence among marked
//! points, counted on the one-parameter family of curves through the
//! incidence conditions.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::combinatorics::{binomial, factorial, sub_incidences};
use crate::engine::{exact, int, Engine, EngineError};
use crate::memo::CacheKey;
use crate::problem::{dim_w_raw, fields, Incidence, ParseError, Problem, Tangency};
use crate::Count;

/// The base of the fibration: degree-`d` elliptic curves in `P^n` through
/// the incidence conditions `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Family {
    pub n: u32,
    pub d: u32,
    pub i: Incidence,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} d={} i={}", self.n, self.d, self.i)
    }
}

impl FromStr for Family {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, ParseError> {
        let z: ZProblem = s.parse()?;
        if !z.coeffs.is_empty() {
            return Err(ParseError("family keys carry no divisor".into()));
        }
        Ok(z.family())
    }
}

/// Coefficients on incidence slots. Slots of equal dimension are
/// interchangeable, so the canonical form keeps, per dimension, the sorted
/// list of nonzero coefficients.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DivisorSpec(BTreeMap<u32, Vec<i64>>);

impl DivisorSpec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_slots<I: IntoIterator<Item = (u32, i64)>>(slots: I) -> Self {
        let mut d = Self::new();
        for (e, c) in slots {
            d.push(e, c);
        }
        d
    }

    pub fn push(&mut self, e: u32, c: i64) {
        if c == 0 {
            return;
        }
        let v = self.0.entry(e).or_default();
        v.push(c);
        v.sort_by(|a, b| b.cmp(a));
    }

    /// `(e, coeff)` per nonzero slot.
    pub fn slots(&self) -> Vec<(u32, i64)> {
        self.0
            .iter()
            .flat_map(|(&e, cs)| cs.iter().map(move |&c| (e, c)))
            .collect()
    }

    pub fn sum(&self) -> i64 {
        self.0.values().flatten().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn count_at(&self, e: u32) -> usize {
        self.0.get(&e).map_or(0, Vec::len)
    }
}

impl fmt::Display for DivisorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&e, cs) in &self.0 {
            for (k, &c) in cs.iter().enumerate() {
                let sign = if c < 0 { "-" } else if first { "" } else { "+" };
                let mag = c.unsigned_abs();
                let coeff = if mag == 1 { String::new() } else { format!("{mag}*") };
                write!(f, "{sign}{coeff}q{e}.{}", k + 1)?;
                first = false;
            }
        }
        Ok(())
    }
}

/// One parsed divisor term: coefficient on slot `index` of dimension `e`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DivisorTerm {
    pub e: u32,
    pub index: u32,
    pub coeff: i64,
}

/// Parses `p1+p2-l1`, `2*l1`, `-3*q0.2`, with `p` = points and `l` = lines.
/// Repeated slots add up.
pub fn parse_divisor(s: &str) -> Result<Vec<DivisorTerm>, ParseError> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(ParseError("empty divisor".into()));
    }
    let bad = |t: &str| ParseError(format!("bad divisor term {t:?}"));
    let mut terms: Vec<DivisorTerm> = Vec::new();
    let mut rest = s.as_str();
    while !rest.is_empty() {
        let (sign, body) = match rest.as_bytes()[0] {
            b'+' => (1, &rest[1..]),
            b'-' => (-1, &rest[1..]),
            _ if terms.is_empty() => (1, rest),
            _ => return Err(bad(rest)),
        };
        let end = body.find(['+', '-']).unwrap_or(body.len());
        let tok = &body[..end];
        rest = &body[end..];
        let (coeff, slot) = match tok.split_once('*') {
            Some((c, s)) => (c.parse::<i64>().map_err(|_| bad(tok))?, s),
            None => (1, tok),
        };
        let (e, index) = if let Some(k) = slot.strip_prefix('p') {
            (0, k)
        } else if let Some(k) = slot.strip_prefix('l') {
            (1, k)
        } else if let Some(q) = slot.strip_prefix('q') {
            let (e, k) = q.split_once('.').ok_or_else(|| bad(tok))?;
            (e.parse().map_err(|_| bad(tok))?, k)
        } else {
            return Err(bad(tok));
        };
        let index: u32 = index.parse().map_err(|_| bad(tok))?;
        if index == 0 {
            return Err(bad(tok));
        }
        let coeff = sign * coeff;
        match terms.iter_mut().find(|t| t.e == e && t.index == index) {
            Some(t) => t.coeff += coeff,
            None => terms.push(DivisorTerm { e, index, coeff }),
        }
    }
    Ok(terms)
}

/// `Z_n(d, i)_D`: elliptic curves through `i` with `O(1) = O(D)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ZProblem {
    pub n: u32,
    pub d: u32,
    pub i: Incidence,
    pub coeffs: DivisorSpec,
}

impl ZProblem {
    pub fn new(n: u32, d: u32, i: Incidence, coeffs: DivisorSpec) -> Self {
        ZProblem { n, d, i, coeffs }
    }

    /// Builds from parsed terms, checking slot indices against `i`.
    pub fn from_terms(n: u32, d: u32, i: Incidence, terms: &[DivisorTerm]) -> Result<Self, EngineError> {
        for t in terms {
            if t.index > i.get(t.e) {
                return Err(EngineError::InvalidDivisor(format!(
                    "slot {} of dimension {} exceeds the {} available",
                    t.index,
                    t.e,
                    i.get(t.e)
                )));
            }
        }
        let coeffs = DivisorSpec::from_slots(terms.iter().map(|t| (t.e, t.coeff)));
        Ok(ZProblem { n, d, i, coeffs })
    }

    pub fn family(&self) -> Family {
        Family {
            n: self.n,
            d: self.d,
            i: self.i.clone(),
        }
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        let bad = |s: String| Err(EngineError::InvalidDivisor(s));
        if !(2..=3).contains(&self.n) {
            return bad(format!("ambient dimension {} unsupported (n = 2, 3)", self.n));
        }
        if self.d == 0 {
            return bad("degree must be at least 1".into());
        }
        if let Some((e, _)) = self.i.iter().find(|&(e, _)| e > self.n) {
            return bad(format!("incidence index out of range: e = {e}"));
        }
        if self.coeffs.sum() != self.d as i64 {
            return bad(format!(
                "coefficients sum to {}, degree is {}",
                self.coeffs.sum(),
                self.d
            ));
        }
        for (e, _) in self.coeffs.slots() {
            if self.coeffs.count_at(e) > self.i.get(e) as usize {
                return bad(format!("more divisor slots of dimension {e} than incidences"));
            }
        }
        Ok(())
    }
}

/// `(n+1)d - sum (n-1-e) i_e - 1`.
pub fn dim_z(z: &ZProblem) -> i64 {
    (z.n as i64 + 1) * z.d as i64 - z.i.cost(z.n) - 1
}

impl fmt::Display for ZProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} d={} i={}", self.n, self.d, self.i)?;
        if !self.coeffs.is_empty() {
            write!(f, " D={}", self.coeffs)?;
        }
        Ok(())
    }
}

impl FromStr for ZProblem {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, ParseError> {
        let mut n = None;
        let mut d = None;
        let mut i = Incidence::new();
        let mut coeffs = DivisorSpec::new();
        for (k, v) in fields(s)? {
            let num = |v: &str| v.parse::<u32>().map_err(|_| ParseError(format!("bad integer {v:?}")));
            match k.as_str() {
                "n" => n = Some(num(&v)?),
                "d" => d = Some(num(&v)?),
                "i" => i = v.parse()?,
                "D" => {
                    coeffs = DivisorSpec::from_slots(parse_divisor(&v)?.iter().map(|t| (t.e, t.coeff)))
                }
                _ => return Err(ParseError(format!("unknown field {k:?}"))),
            }
        }
        Ok(ZProblem {
            n: n.ok_or_else(|| ParseError("missing n".into()))?,
            d: d.ok_or_else(|| ParseError("missing d".into()))?,
            i,
            coeffs,
        })
    }
}

fn frac(num: Count, den: Count) -> BigRational {
    BigRational::new(num, den)
}

fn choose_vec(whole: &Incidence, part: &Incidence) -> Count {
    whole
        .iter()
        .map(|(e, c)| binomial(c as u64, part.get(e) as u64))
        .product()
}

impl Engine {
    /// `#Z_n(d, i)_D`.
    pub fn count_z(&self, z: &ZProblem) -> Result<Count, EngineError> {
        z.validate()?;
        self.count_z_unchecked(z)
    }

    pub(crate) fn count_z_unchecked(&self, z: &ZProblem) -> Result<Count, EngineError> {
        if dim_z(z) != 0 {
            return Ok(BigInt::zero());
        }
        let key = CacheKey::Z(z.clone());
        if let Some(v) = self.memo().lookup(&key) {
            return Ok(v);
        }
        let value = self.evaluate_z(z)?;
        self.memo().store(key, value.clone())?;
        Ok(value)
    }

    fn evaluate_z(&self, z: &ZProblem) -> Result<Count, EngineError> {
        let n = z.n;
        let free = z.i.get(n);
        if free >= 2 {
            return Ok(BigInt::zero());
        }
        if free == 1 {
            // finitely many curves; c*q = fixed class has c^2 solutions
            let c = z.coeffs.0.get(&n).and_then(|v| v.first()).copied().unwrap_or(0);
            let w = self.w_over_marking(n, z.d, &z.i.without(n, 1))?;
            return exact(w * int(c * c), || format!("free slot term for {z}"));
        }
        let fam = z.family();
        let ss = int(self.sec_self(&fam)?);
        let slots = z.coeffs.slots();
        let mut d2 = int(self.hyp_self(&fam)?);
        for &(e, c) in &slots {
            d2 -= int(self.sec_hyp(&fam, e)?) * int(2 * c);
            d2 += &ss * int(c * c);
        }
        for (a, &(e, c)) in slots.iter().enumerate() {
            for (b, &(e2, c2)) in slots.iter().enumerate() {
                if a != b {
                    d2 += int(self.sec_pair(&fam, e, e2)?) * int(c * c2);
                }
            }
        }
        let half = d2 / int(2);
        exact(ss - half, || format!("halving D^2 for {z}"))
    }

    /// `#W(d, d eps_{1,n-1}, i) / d!`: number of curves through `i`.
    fn w_over_marking(&self, n: u32, d: u32, i: &Incidence) -> Result<BigRational, EngineError> {
        let p = Problem::elliptic(n, d, Tangency::unit(1, n - 1, d), i.clone());
        Ok(frac(self.count_unchecked(&p)?, factorial(d as u64)))
    }

    fn x_marked(&self, n: u32, d: u32, h: Tangency, i: Incidence) -> Result<Count, EngineError> {
        self.count_unchecked(&Problem::rational(n, d, h, i))
    }

    /// Sum over splittings into a rational part (degree `d0`, carrying
    /// `extra0` and `base - i1`) and an elliptic part (degree `d1`,
    /// carrying `i1`). `rational` returns the weighted rational factor.
    fn split_sum(
        &self,
        fam: &Family,
        base: &Incidence,
        extra0: &Incidence,
        rational: &dyn Fn(u32, u32, &Incidence) -> Result<BigRational, EngineError>,
    ) -> Result<BigRational, EngineError> {
        let n = fam.n;
        let mut acc = BigRational::zero();
        for d0 in 1..fam.d {
            let d1 = fam.d - d0;
            for i1 in sub_incidences(base) {
                if dim_w_raw(n, d1, &Tangency::unit(1, n - 1, d1), &i1) != 0 {
                    continue;
                }
                let i0 = base.minus(&i1).plus(extra0);
                let r = rational(d0, d1, &i0)?;
                if r.is_zero() {
                    continue;
                }
                let w = self.w_over_marking(n, d1, &i1)?;
                if w.is_zero() {
                    continue;
                }
                let node = if n == 2 { int(d0 * d1) } else { BigRational::one() };
                acc += node * int(choose_vec(base, &i1)) * r * w;
            }
        }
        Ok(acc)
    }

    fn memo_int(
        &self,
        key: CacheKey,
        f: impl FnOnce() -> Result<BigRational, EngineError>,
    ) -> Result<Count, EngineError> {
        if let Some(v) = self.memo().lookup(&key) {
            return Ok(v);
        }
        let v = exact(f()?, || key.to_string())?;
        self.memo().store(key, v.clone())?;
        Ok(v)
    }

    /// `Q_e . Q_e'` for distinct slots.
    pub fn sec_pair(&self, fam: &Family, e: u32, e2: u32) -> Result<Count, EngineError> {
        let (a, b) = (e.min(e2), e.max(e2));
        self.memo_int(CacheKey::QQ(fam.clone(), a, b), || {
            let n = fam.n;
            let base = fam.i.without(a, 1).without(b, 1);
            let mut acc = BigRational::zero();
            if a + b >= n {
                acc += self.w_over_marking(n, fam.d, &base.with(a + b - n, 1))?;
            }
            let slots = Incidence::unit(a, 1).with(b, 1);
            acc += self.split_sum(fam, &base, &slots, &|d0, _, i0| {
                let x = self.x_marked(n, d0, Tangency::unit(1, n - 1, d0), i0.clone())?;
                Ok(frac(x, factorial(d0 as u64)))
            })?;
            Ok(acc)
        })
    }

    /// `H . Q_e`.
    pub fn sec_hyp(&self, fam: &Family, e: u32) -> Result<Count, EngineError> {
        self.memo_int(CacheKey::HQ(fam.clone(), e), || {
            let n = fam.n;
            let base = fam.i.without(e, 1);
            let mut acc = BigRational::zero();
            if e >= 1 {
                acc += self.w_over_marking(n, fam.d, &base.with(e - 1, 1))?;
            }
            acc += self.split_sum(fam, &base, &Incidence::unit(e, 1), &|d0, _, i0| {
                let x = self.x_marked(n, d0, Tangency::unit(1, n - 1, d0), i0.clone())?;
                Ok(frac(x * d0, factorial(d0 as u64)))
            })?;
            Ok(acc)
        })
    }

    /// `H^2`.
    pub fn hyp_self(&self, fam: &Family) -> Result<Count, EngineError> {
        self.memo_int(CacheKey::HH(fam.clone()), || {
            let n = fam.n;
            let mut acc = self.w_over_marking(n, fam.d, &fam.i.with(n - 2, 1))?;
            acc += self.split_sum(fam, &fam.i, &Incidence::new(), &|d0, _, i0| {
                let x = self.x_marked(n, d0, Tangency::unit(1, n - 1, d0), i0.clone())?;
                Ok(frac(x * d0 * d0, factorial(d0 as u64)))
            })?;
            Ok(acc)
        })
    }

    /// `(H - Q_e) . Q_e`, with `H` the pullback of a hyperplane through the
    /// slot's plane.
    pub fn hyp_minus_sec(&self, fam: &Family, e: u32) -> Result<Count, EngineError> {
        self.memo_int(CacheKey::HMQ(fam.clone(), e), || {
            let n = fam.n;
            let base = fam.i.without(e, 1);
            let mut acc = BigRational::zero();
            if fam.d >= 2 {
                let h = Tangency::unit(1, n - 1, fam.d - 2).with(2, e, 1);
                let w = self.count_unchecked(&Problem::elliptic(n, fam.d, h, base.clone()))?;
                acc += frac(w, factorial(fam.d as u64 - 2));
            }
            acc += self.split_sum(fam, &base, &Incidence::new(), &|d0, _, i0| {
                if d0 == 1 {
                    return Ok(BigRational::zero());
                }
                let h = Tangency::unit(1, n - 1, d0 - 1).with(1, e, 1);
                let x = self.x_marked(n, d0, h, i0.clone())?;
                Ok(frac(x * (d0 - 1), factorial(d0 as u64 - 1)))
            })?;
            Ok(acc)
        })
    }

    /// `S^2` from one slot dimension: `H.Q - (H-Q).Q`.
    pub fn sec_self_at(&self, fam: &Family, e: u32) -> Result<Count, EngineError> {
        Ok(self.sec_hyp(fam, e)? - self.hyp_minus_sec(fam, e)?)
    }

    /// `S^2`, checked to agree across all slot dimensions present.
    pub fn sec_self(&self, fam: &Family) -> Result<Count, EngineError> {
        self.memo_int(CacheKey::SS(fam.clone()), || {
            let dims: Vec<u32> = fam.i.iter().map(|(e, _)| e).filter(|&e| e < fam.n).collect();
            let first = *dims
                .first()
                .ok_or_else(|| EngineError::InvalidDivisor(format!("no section available on {fam}")))?;
            let v = self.sec_self_at(fam, first)?;
            for &e in &dims[1..] {
                let w = self.sec_self_at(fam, e)?;
                if w != v {
                    return Err(EngineError::OrderMismatch {
                        problem: format!("S^2 on {fam}"),
                        values: format!("{v} (slot {first}), {w} (slot {e})"),
                    });
                }
            }
            Ok(BigRational::from_integer(v))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(s: &str) -> ZProblem {
        s.parse().unwrap()
    }

    fn quartic() -> Family {
        Family {
            n: 2,
            d: 4,
            i: Incidence::unit(0, 11),
        }
    }

    #[test]
    fn dimension_examples() {
        assert_eq!(dim_z(&z("n=2 d=4 i=0:11")), 0);
        assert_eq!(dim_z(&z("n=2 d=3 i=0:8")), 0);
        assert_eq!(dim_z(&z("n=2 d=3 i=0:7")), 1);
    }

    #[test]
    fn divisor_grammar() {
        let t = parse_divisor("p1+p2+p3+p4-p5").unwrap();
        assert_eq!(t.len(), 5);
        assert_eq!(t[4], DivisorTerm { e: 0, index: 5, coeff: -1 });
        let t = parse_divisor("2*l1 - q0.3").unwrap();
        assert_eq!(t, vec![
            DivisorTerm { e: 1, index: 1, coeff: 2 },
            DivisorTerm { e: 0, index: 3, coeff: -1 },
        ]);
        assert_eq!(parse_divisor("p1+p1").unwrap()[0].coeff, 2);
        for bad in ["", "p0", "x1", "p1+", "2*", "p1 p2", "q1"] {
            assert!(parse_divisor(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn canonical_text_round_trip() {
        let a = z("n=2 d=3 i=0:8;1:1 D=l1+p2+p1");
        let b = z("n=2 d=3 i=0:8;1:1 D=q0.1+q0.2+q1.1");
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "n=2 d=3 i=0:8;1:1 D=q0.1+q0.2+q1.1");
        assert_eq!(a.to_string().parse::<ZProblem>().unwrap(), a);
        let c = z("n=2 d=3 i=0:8 D=3*p1");
        assert_eq!(c.to_string().parse::<ZProblem>().unwrap(), c);
    }

    #[test]
    fn validation() {
        let e = Engine::default();
        assert!(e.count_z(&z("n=2 d=4 i=0:11 D=p1+p2+p3")).is_err());
        assert!(e.count_z(&z("n=4 d=1 i=0:11 D=p1")).is_err());
        let i = Incidence::unit(0, 2);
        let terms = parse_divisor("p3").unwrap();
        assert!(ZProblem::from_terms(2, 1, i, &terms).is_err());
    }

    #[test]
    fn quartic_intersection_numbers() {
        let e = Engine::default();
        let f = quartic();
        assert_eq!(e.sec_pair(&f, 0, 0).unwrap(), BigInt::from(3));
        assert_eq!(e.sec_hyp(&f, 0).unwrap(), BigInt::from(30));
        assert_eq!(e.hyp_self(&f).unwrap(), BigInt::from(390));
        assert_eq!(e.hyp_minus_sec(&f, 0).unwrap(), BigInt::from(185));
        assert_eq!(e.sec_self(&f).unwrap(), BigInt::from(-155));
        assert_eq!(e.count_z(&z("n=2 d=4 i=0:11 D=p1+p2+p3+p4")).unwrap(), BigInt::from(62));
    }

    #[test]
    fn free_slot_rule() {
        let e = Engine::default();
        // flexes: 3q = O(1) on the cubic through nine points
        assert_eq!(e.count_z(&z("n=2 d=3 i=0:9;2:1 D=3*q2.1")).unwrap(), BigInt::from(9));
        assert_eq!(e.count_z(&z("n=2 d=3 i=0:9;2:1 D=p1+p2+q2.1")).unwrap(), BigInt::from(1));
        assert_eq!(e.count_z(&z("n=2 d=3 i=0:10;2:2 D=p1+p2+q2.1")).unwrap(), BigInt::zero());
    }
}

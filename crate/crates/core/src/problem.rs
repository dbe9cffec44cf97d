//! Condition data, validity rules and dimension formulas.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Tangency counts `h[(m, e)]`: contact of order `m` with `H` at a point
/// lying on a general `e`-plane of `H`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tangency(BTreeMap<(u32, u32), u32>);

/// Incidence counts `i[e]`: a marked point mapping to a general `e`-plane.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Incidence(BTreeMap<u32, u32>);

impl Tangency {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_entries<I: IntoIterator<Item = ((u32, u32), u32)>>(it: I) -> Self {
        let mut t = Self::new();
        for (k, c) in it {
            t.add(k.0, k.1, c);
        }
        t
    }

    /// Single entry `c * eps_{m,e}`.
    pub fn unit(m: u32, e: u32, c: u32) -> Self {
        Self::from_entries([((m, e), c)])
    }

    pub fn get(&self, m: u32, e: u32) -> u32 {
        self.0.get(&(m, e)).copied().unwrap_or(0)
    }

    pub fn add(&mut self, m: u32, e: u32, c: u32) {
        if c > 0 {
            *self.0.entry((m, e)).or_insert(0) += c;
        }
    }

    /// Panics if the entry would go negative.
    pub fn sub(&mut self, m: u32, e: u32, c: u32) {
        if c == 0 {
            return;
        }
        let v = self.0.get_mut(&(m, e)).expect("tangency entry missing");
        assert!(*v >= c, "tangency entry underflow");
        *v -= c;
        if *v == 0 {
            self.0.remove(&(m, e));
        }
    }

    pub fn with(&self, m: u32, e: u32, c: u32) -> Self {
        let mut t = self.clone();
        t.add(m, e, c);
        t
    }

    pub fn without(&self, m: u32, e: u32, c: u32) -> Self {
        let mut t = self.clone();
        t.sub(m, e, c);
        t
    }

    pub fn iter(&self) -> impl Iterator<Item = ((u32, u32), u32)> + '_ {
        self.0.iter().map(|(k, v)| (*k, *v))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// `sum m * h[(m,e)]`.
    pub fn degree(&self) -> u64 {
        self.iter().map(|((m, _), c)| m as u64 * c as u64).sum()
    }

    /// Total number of marked tangency points.
    pub fn total(&self) -> u64 {
        self.0.values().map(|&c| c as u64).sum()
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut t = self.clone();
        for ((m, e), c) in other.iter() {
            t.add(m, e, c);
        }
        t
    }

    pub fn minus(&self, other: &Self) -> Self {
        let mut t = self.clone();
        for ((m, e), c) in other.iter() {
            t.sub(m, e, c);
        }
        t
    }

    pub fn contains(&self, other: &Self) -> bool {
        other.iter().all(|((m, e), c)| self.get(m, e) >= c)
    }
}

impl Incidence {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_entries<I: IntoIterator<Item = (u32, u32)>>(it: I) -> Self {
        let mut t = Self::new();
        for (e, c) in it {
            t.add(e, c);
        }
        t
    }

    pub fn unit(e: u32, c: u32) -> Self {
        Self::from_entries([(e, c)])
    }

    pub fn get(&self, e: u32) -> u32 {
        self.0.get(&e).copied().unwrap_or(0)
    }

    pub fn add(&mut self, e: u32, c: u32) {
        if c > 0 {
            *self.0.entry(e).or_insert(0) += c;
        }
    }

    pub fn sub(&mut self, e: u32, c: u32) {
        if c == 0 {
            return;
        }
        let v = self.0.get_mut(&e).expect("incidence entry missing");
        assert!(*v >= c, "incidence entry underflow");
        *v -= c;
        if *v == 0 {
            self.0.remove(&e);
        }
    }

    pub fn with(&self, e: u32, c: u32) -> Self {
        let mut t = self.clone();
        t.add(e, c);
        t
    }

    pub fn without(&self, e: u32, c: u32) -> Self {
        let mut t = self.clone();
        t.sub(e, c);
        t
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.0.iter().map(|(k, v)| (*k, *v))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> u64 {
        self.0.values().map(|&c| c as u64).sum()
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut t = self.clone();
        for (e, c) in other.iter() {
            t.add(e, c);
        }
        t
    }

    pub fn minus(&self, other: &Self) -> Self {
        let mut t = self.clone();
        for (e, c) in other.iter() {
            t.sub(e, c);
        }
        t
    }

    pub fn contains(&self, other: &Self) -> bool {
        other.iter().all(|(e, c)| self.get(e) >= c)
    }

    /// Codimension `sum (n-1-e) i[e]` in `P^n` (free points count -1).
    pub fn cost(&self, n: u32) -> i64 {
        self.iter()
            .map(|(e, c)| (n as i64 - 1 - e as i64) * c as i64)
            .sum()
    }
}

/// Codimension `sum (n+m-e-2) h[(m,e)]` in `P^n`.
pub fn tangency_cost(h: &Tangency, n: u32) -> i64 {
    h.iter()
        .map(|((m, e), c)| (n as i64 + m as i64 - e as i64 - 2) * c as i64)
        .sum()
}

/// The data `(genus, n, d, h, i)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Problem {
    pub genus: u32,
    pub n: u32,
    pub d: u32,
    pub h: Tangency,
    pub i: Incidence,
}

impl Problem {
    pub fn new(genus: u32, n: u32, d: u32, h: Tangency, i: Incidence) -> Self {
        Problem { genus, n, d, h, i }
    }

    pub fn rational(n: u32, d: u32, h: Tangency, i: Incidence) -> Self {
        Self::new(0, n, d, h, i)
    }

    pub fn elliptic(n: u32, d: u32, h: Tangency, i: Incidence) -> Self {
        Self::new(1, n, d, h, i)
    }

    /// Expected dimension for the problem's genus.
    pub fn dim(&self) -> i64 {
        if self.genus == 0 {
            dim_x(self)
        } else {
            dim_w(self)
        }
    }

    /// Product of `h[(m,e)]!`, the number of relabelings of tangency points
    /// of the same type.
    pub fn marking_factor(&self) -> crate::Count {
        self.h
            .iter()
            .map(|(_, c)| crate::combinatorics::factorial(c as u64))
            .product()
    }
}

/// Strip zero entries. The maps never hold zeros, so this only rebuilds;
/// it exists so callers that construct raw data have one entry point.
pub fn canonicalize(p: &Problem) -> Problem {
    Problem {
        genus: p.genus,
        n: p.n,
        d: p.d,
        h: Tangency::from_entries(p.h.iter()),
        i: Incidence::from_entries(p.i.iter()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("degree-sum violation: sum m*h = {got}, d = {expected}")]
    DegreeSum { expected: u64, got: u64 },
    #[error("degree must be at least 1")]
    ZeroDegree,
    #[error("ambient dimension must be at least 1")]
    ZeroAmbient,
    #[error("genus {0} unsupported")]
    Genus(u32),
    #[error("genus-1 ambient unsupported (n = {0}; supported n = 2, 3)")]
    GenusOneAmbient(u32),
    #[error("tangency index out of range: m = {m}, e = {e}")]
    TangencyIndex { m: u32, e: u32 },
    #[error("incidence index out of range: e = {e}")]
    IncidenceIndex { e: u32 },
}

impl Violation {
    /// True for problems outside the supported scope rather than malformed.
    pub fn is_unsupported(&self) -> bool {
        matches!(self, Violation::GenusOneAmbient(n) if *n >= 4)
    }
}

pub fn validate(p: &Problem) -> Vec<Violation> {
    let mut out = Vec::new();
    if p.d == 0 {
        out.push(Violation::ZeroDegree);
    }
    if p.n == 0 {
        out.push(Violation::ZeroAmbient);
    }
    match p.genus {
        0 => {}
        1 => {
            if !(2..=3).contains(&p.n) {
                out.push(Violation::GenusOneAmbient(p.n));
            }
        }
        g => out.push(Violation::Genus(g)),
    }
    for ((m, e), _) in p.h.iter() {
        if m == 0 || e >= p.n {
            out.push(Violation::TangencyIndex { m, e });
        }
    }
    for (e, _) in p.i.iter() {
        if e > p.n {
            out.push(Violation::IncidenceIndex { e });
        }
    }
    let got = p.h.degree();
    if got != p.d as u64 {
        out.push(Violation::DegreeSum {
            expected: p.d as u64,
            got,
        });
    }
    out
}

/// Genus-0 dimension `(n+1)d + n - 3 - sum(n+m-e-2)h - sum(n-1-e)i`.
pub fn dim_x(p: &Problem) -> i64 {
    dim_x_raw(p.n, p.d, &p.h, &p.i)
}

pub fn dim_x_raw(n: u32, d: u32, h: &Tangency, i: &Incidence) -> i64 {
    (n as i64 + 1) * d as i64 + n as i64 - 3 - tangency_cost(h, n) - i.cost(n)
}

/// Genus-1 dimension `(n+1)d - sum(n+m-e-2)h - sum(n-1-e)i`.
pub fn dim_w(p: &Problem) -> i64 {
    dim_w_raw(p.n, p.d, &p.h, &p.i)
}

pub fn dim_w_raw(n: u32, d: u32, h: &Tangency, i: &Incidence) -> i64 {
    (n as i64 + 1) * d as i64 - tangency_cost(h, n) - i.cost(n)
}

/// Every valid zero-dimensional problem of the given shape with at most
/// `max_hyperplane` incidences on hyperplanes (they cost nothing, so some
/// bound is needed) and no free points.
pub fn zero_dim_problems(genus: u32, n: u32, d: u32, max_hyperplane: u32) -> Vec<Problem> {
    let mut types = Vec::new();
    for m in 1..=d {
        for e in 0..n {
            types.push((m, e));
        }
    }
    let mut hs = Vec::new();
    tangency_fill(&types, d, &mut Tangency::new(), &mut hs);
    let mut out = Vec::new();
    for h in hs {
        let base = Problem::new(genus, n, d, h, Incidence::new());
        if !validate(&base).is_empty() {
            continue;
        }
        let budget = base.dim();
        for hyper in 0..=max_hyperplane {
            let mut found = Vec::new();
            incidence_fill(n, 0, budget, &mut Incidence::unit(n - 1, hyper), &mut found);
            for i in found {
                out.push(Problem { i, ..base.clone() });
            }
        }
    }
    out.sort();
    out
}

fn tangency_fill(types: &[(u32, u32)], left: u32, cur: &mut Tangency, out: &mut Vec<Tangency>) {
    if left == 0 {
        out.push(cur.clone());
        return;
    }
    let Some((&(m, e), rest)) = types.split_first() else {
        return;
    };
    for c in 0..=left / m {
        if c > 0 {
            cur.add(m, e, 1);
        }
        tangency_fill(rest, left - c * m, cur, out);
    }
    let c = left / m;
    if c > 0 {
        cur.sub(m, e, c);
    }
}

/// Incidences on planes of dimension `e..=n-2` of total codimension `left`.
fn incidence_fill(n: u32, e: u32, left: i64, cur: &mut Incidence, out: &mut Vec<Incidence>) {
    if left == 0 {
        out.push(cur.clone());
        return;
    }
    if left < 0 || e + 2 > n {
        return;
    }
    let cost = (n - 1 - e) as i64;
    let most = (left / cost) as u32;
    for c in 0..=most {
        if c > 0 {
            cur.add(e, 1);
        }
        incidence_fill(n, e + 1, left - c as i64 * cost, cur, out);
    }
    if most > 0 {
        cur.sub(e, most);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse problem: {0}")]
pub struct ParseError(pub String);

impl fmt::Display for Tangency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "-");
        }
        for (k, ((m, e), c)) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ";")?;
            }
            write!(f, "{m},{e}:{c}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Incidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "-");
        }
        for (k, (e, c)) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ";")?;
            }
            write!(f, "{e}:{c}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "g={} n={} d={} h={} i={}",
            self.genus, self.n, self.d, self.h, self.i
        )
    }
}

fn num(s: &str) -> Result<u32, ParseError> {
    s.trim()
        .parse()
        .map_err(|_| ParseError(format!("bad integer {s:?}")))
}

impl FromStr for Tangency {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, ParseError> {
        let s = s.trim();
        let mut t = Tangency::new();
        if s == "-" || s.is_empty() {
            return Ok(t);
        }
        for entry in s.split(';') {
            let (me, c) = entry
                .split_once(':')
                .ok_or_else(|| ParseError(format!("bad tangency entry {entry:?}")))?;
            let (m, e) = me
                .split_once(',')
                .ok_or_else(|| ParseError(format!("bad tangency entry {entry:?}")))?;
            t.add(num(m)?, num(e)?, num(c)?);
        }
        Ok(t)
    }
}

impl FromStr for Incidence {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, ParseError> {
        let s = s.trim();
        let mut t = Incidence::new();
        if s == "-" || s.is_empty() {
            return Ok(t);
        }
        for entry in s.split(';') {
            let (e, c) = entry
                .split_once(':')
                .ok_or_else(|| ParseError(format!("bad incidence entry {entry:?}")))?;
            t.add(num(e)?, num(c)?);
        }
        Ok(t)
    }
}

/// Splits `key=value` fields; `key= -` is accepted as `key=-`.
pub(crate) fn fields(s: &str) -> Result<Vec<(String, String)>, ParseError> {
    let norm = s.replace("= -", "=-");
    norm.split_whitespace()
        .map(|tok| {
            tok.split_once('=')
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .ok_or_else(|| ParseError(format!("expected key=value, got {tok:?}")))
        })
        .collect()
}

impl FromStr for Problem {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, ParseError> {
        let mut g = None;
        let mut n = None;
        let mut d = None;
        let mut h = Tangency::new();
        let mut i = Incidence::new();
        for (k, v) in fields(s)? {
            match k.as_str() {
                "g" => g = Some(num(&v)?),
                "n" => n = Some(num(&v)?),
                "d" => d = Some(num(&v)?),
                "h" => h = v.parse()?,
                "i" => i = v.parse()?,
                _ => return Err(ParseError(format!("unknown field {k:?}"))),
            }
        }
        Ok(Problem {
            genus: g.ok_or_else(|| ParseError("missing g".into()))?,
            n: n.ok_or_else(|| ParseError("missing n".into()))?,
            d: d.ok_or_else(|| ParseError("missing d".into()))?,
            h,
            i,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(text: &str) -> Problem {
        text.parse().unwrap()
    }

    #[test]
    fn zero_entries_are_stripped() {
        let h = Tangency::from_entries([((1, 2), 1), ((2, 0), 0)]);
        let i = Incidence::from_entries([(1, 4), (0, 0)]);
        let q = canonicalize(&Problem::rational(3, 1, h, i));
        assert_eq!(q.to_string(), "g=0 n=3 d=1 h=1,2:1 i=1:4");
    }

    #[test]
    fn validate_examples() {
        assert!(validate(&p("g=0 n=3 d=2 h=1,2:2 i=1:8")).is_empty());
        assert_eq!(
            validate(&p("g=0 n=3 d=2 h=1,2:1 i=1:8")),
            vec![Violation::DegreeSum {
                expected: 2,
                got: 1
            }]
        );
        let v = validate(&p("g=1 n=5 d=2 h=1,4:2 i=-"));
        assert_eq!(v, vec![Violation::GenusOneAmbient(5)]);
        assert!(v[0].is_unsupported());
        assert!(!validate(&p("g=1 n=1 d=1 h=1,0:1 i=-"))[0].is_unsupported());
        assert!(!validate(&p("g=0 n=2 d=1 h=1,2:1 i=-")).is_empty());
        assert!(!validate(&p("g=0 n=2 d=1 h=1,1:1 i=3:1")).is_empty());
    }

    #[test]
    fn dimension_examples() {
        assert_eq!(dim_x(&p("g=0 n=3 d=3 h=1,2:3 i=1:12")), 0);
        assert_eq!(dim_x(&p("g=0 n=1 d=1 h=1,0:1 i=0:2")), 0);
        assert_eq!(dim_x(&p("g=0 n=3 d=2 h=2,2:1 i=1:7")), 0);
        assert_eq!(dim_w(&p("g=1 n=3 d=4 h=1,2:4 i=1:16")), 0);
        assert_eq!(dim_w(&p("g=1 n=2 d=4 h=1,1:4 i=0:12")), 0);
        assert_eq!(dim_w(&p("g=1 n=3 d=3 h=1,2:3 i=-")), 12);
        // a free point raises the dimension by one
        assert_eq!(dim_x(&p("g=0 n=1 d=1 h=1,0:1 i=1:1")), 1);
    }

    #[test]
    fn text_round_trip_and_empty_forms() {
        let q = p("g=1 n=3 d=3 h=1,2:1;2,2:1 i=0:1;1:9");
        assert_eq!(q.to_string().parse::<Problem>().unwrap(), q);
        assert_eq!(p("g=0 n=2 d=1 h=1,1:1 i= -"), p("g=0 n=2 d=1 h=1,1:1 i=-"));
        assert!("g=0 n=2".parse::<Problem>().is_err());
        assert!("g=0 n=2 d=1 h=1:1 i=-".parse::<Problem>().is_err());
    }

    fn arb_problem() -> impl Strategy<Value = Problem> {
        (
            0u32..2,
            1u32..5,
            1u32..5,
            prop::collection::vec(((1u32..4, 0u32..4), 0u32..3), 0..5),
            prop::collection::vec((0u32..5, 0u32..6), 0..5),
        )
            .prop_map(|(g, n, d, h, i)| {
                let mut t = Tangency::new();
                for ((m, e), c) in h {
                    t.add(m, e, c);
                }
                Problem::new(g, n, d, t, Incidence::from_entries(i))
            })
    }

    proptest! {
        #[test]
        fn canonicalize_is_idempotent(q in arb_problem()) {
            let c = canonicalize(&q);
            prop_assert_eq!(canonicalize(&c), c.clone());
            prop_assert_eq!(c.to_string().parse::<Problem>().unwrap(), c);
        }

        #[test]
        fn canonical_form_ignores_entry_order(
            mut entries in prop::collection::vec((0u32..5, 0u32..4), 0..6),
            seed in any::<u64>(),
        ) {
            let a = Incidence::from_entries(entries.clone());
            let k = entries.len().max(1);
            entries.rotate_left((seed as usize) % k);
            entries.reverse();
            prop_assert_eq!(a, Incidence::from_entries(entries));
        }

        #[test]
        fn incidence_shifts_dimension(q in arb_problem(), e in 0u32..4) {
            let n = q.n;
            prop_assume!(e <= n);
            let mut r = q.clone();
            r.i.add(e, 1);
            let drop = n as i64 - 1 - e as i64;
            prop_assert_eq!(dim_x(&r), dim_x(&q) - drop);
            prop_assert_eq!(dim_w(&r), dim_w(&q) - drop);
        }
    }
}

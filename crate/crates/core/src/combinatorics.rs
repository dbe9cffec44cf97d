//! Degeneration partitions and their exact weights.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::problem::{dim_w_raw, dim_x_raw, Incidence, Problem, Tangency};
use crate::Count;

pub fn factorial(k: u64) -> Count {
    (1..=k).fold(BigInt::one(), |acc, j| acc * j)
}

pub fn binomial(n: u64, k: u64) -> Count {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * (n - j) / (j + 1);
    }
    acc
}

/// `total! / prod parts!`; zero if the parts do not sum to `total`.
pub fn multinomial(total: u64, parts: &[u64]) -> Count {
    if parts.iter().sum::<u64>() != total {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    let mut left = total;
    for &p in parts {
        acc *= binomial(left, p);
        left -= p;
    }
    acc
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CombError {
    #[error("parts do not sum to the whole vector")]
    PartsMismatch,
    #[error("no incidence slot of dimension {0}")]
    NoSlot(u32),
}

/// Product over all indices of the scalar multinomials.
pub fn vector_multinomial<K: Ord + Copy>(
    whole: &[(K, u32)],
    parts: &[Vec<(K, u32)>],
) -> Result<Count, CombError> {
    let mut sums: BTreeMap<K, u64> = BTreeMap::new();
    for part in parts {
        for &(k, c) in part {
            *sums.entry(k).or_insert(0) += c as u64;
        }
    }
    sums.retain(|_, v| *v > 0);
    let target: BTreeMap<K, u64> = whole
        .iter()
        .filter(|(_, c)| *c > 0)
        .map(|&(k, c)| (k, c as u64))
        .collect();
    if sums != target {
        return Err(CombError::PartsMismatch);
    }
    let mut acc = BigInt::one();
    for (&k, &total) in &target {
        let counts: Vec<u64> = parts
            .iter()
            .map(|p| p.iter().filter(|(kk, _)| *kk == k).map(|(_, c)| *c as u64).sum())
            .collect();
        acc *= multinomial(total, &counts);
    }
    Ok(acc)
}

pub fn tangency_multinomial(whole: &Tangency, parts: &[&Tangency]) -> Result<Count, CombError> {
    let w: Vec<_> = whole.iter().collect();
    let ps: Vec<Vec<_>> = parts.iter().map(|p| p.iter().collect()).collect();
    vector_multinomial(&w, &ps)
}

pub fn incidence_multinomial(whole: &Incidence, parts: &[&Incidence]) -> Result<Count, CombError> {
    let w: Vec<_> = whole.iter().collect();
    let ps: Vec<Vec<_>> = parts.iter().map(|p| p.iter().collect()).collect();
    vector_multinomial(&w, &ps)
}

/// `prod (multiplicity of each distinct element)!`.
pub fn automorphism_order<T: Ord>(parts: &[T]) -> Count {
    let mut counts: BTreeMap<&T, u64> = BTreeMap::new();
    for p in parts {
        *counts.entry(p).or_insert(0) += 1;
    }
    counts.values().map(|&c| factorial(c)).product()
}

/// One component `(d(k), h(k), i(k))` of a degeneration.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Part {
    pub d: u32,
    pub h: Tangency,
    pub i: Incidence,
}

impl Part {
    pub fn new(d: u32, h: Tangency, i: Incidence) -> Self {
        Part { d, h, i }
    }

    /// New contact order with `H`: `d - sum m h`. Meaningful for parts off `H`.
    pub fn mk(&self) -> i64 {
        self.d as i64 - self.h.degree() as i64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    TypeI,
    TypeII,
    TypeIIa,
    TypeIIb,
    TypeIIc,
}

/// One summand of a degeneration. For Type II variants `parts[0]` lies in
/// `H` and carries the degenerated slot; for `TypeIIa` and `TypeIIb`,
/// `parts[1]` is the distinguished part. For `TypeI`, `parts[0]` is the
/// whole residual problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionTerm {
    pub variant: Variant,
    pub parts: Vec<Part>,
    pub mks: Vec<u32>,
    pub split: Option<(u32, u32)>,
    pub weight: BigRational,
}

pub fn sub_incidences(avail: &Incidence) -> Vec<Incidence> {
    let mut out = vec![Incidence::new()];
    for (e, c) in avail.iter() {
        let mut next = Vec::with_capacity(out.len() * (c as usize + 1));
        for base in &out {
            for k in 0..=c {
                next.push(base.with(e, k));
            }
        }
        out = next;
    }
    out
}

fn sub_tangencies(avail: &Tangency, max_degree: u64) -> Vec<Tangency> {
    let mut out = vec![Tangency::new()];
    for ((m, e), c) in avail.iter() {
        let mut next = Vec::new();
        for base in &out {
            for k in 0..=c {
                let t = base.with(m, e, k);
                if t.degree() <= max_degree {
                    next.push(t);
                } else {
                    break;
                }
            }
        }
        out = next;
    }
    out
}

/// Which component kind a candidate part stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PartKind {
    /// Rational part meeting `H` once: `delta` in `[0, n-1]`.
    Rational,
    /// Elliptic part meeting `H` once: `delta` from the genus-1 formula.
    Elliptic,
    /// Rational part meeting part 0 twice.
    DoubleContact,
}

fn part_admissible(n: u32, part: &Part, kind: PartKind, prune: bool) -> bool {
    let m = part.mk();
    match kind {
        PartKind::Rational | PartKind::Elliptic if m < 1 => return false,
        PartKind::DoubleContact if m < 2 => return false,
        _ => {}
    }
    if !prune {
        return true;
    }
    let m = m as u32;
    let top = n - 1;
    let delta = match kind {
        PartKind::Rational => dim_x_raw(n, part.d, &part.h.with(m, top, 1), &part.i),
        PartKind::Elliptic => dim_w_raw(n, part.d, &part.h.with(m, top, 1), &part.i),
        PartKind::DoubleContact => {
            // split-independent: both contacts free on H
            let h = part.h.with(1, top, 1).with(m - 1, top, 1);
            let delta = dim_x_raw(n, part.d, &h, &part.i);
            return if n == 2 {
                delta == 0
            } else {
                (0..=2).contains(&delta)
            };
        }
    };
    (0..=top as i64).contains(&delta)
}

fn candidates(
    n: u32,
    d_max: u32,
    h: &Tangency,
    r: &Incidence,
    kind: PartKind,
    prune: bool,
) -> Vec<Part> {
    let subs_i = sub_incidences(r);
    let mut out = Vec::new();
    for d in 1..=d_max {
        for hk in sub_tangencies(h, d as u64 - 1) {
            for ik in &subs_i {
                let part = Part::new(d, hk.clone(), ik.clone());
                if part_admissible(n, &part, kind, prune) {
                    out.push(part);
                }
            }
        }
    }
    out.sort();
    out
}

struct Pool {
    d: u32,
    h: Tangency,
    r: Incidence,
}

impl Pool {
    fn fits(&self, part: &Part) -> bool {
        part.d < self.d && self.h.contains(&part.h) && self.r.contains(&part.i)
    }

    fn take(&self, part: &Part) -> Pool {
        Pool {
            d: self.d - part.d,
            h: self.h.minus(&part.h),
            r: self.r.minus(&part.i),
        }
    }
}

/// All multisets of rational parts from `cands` fitting in `pool` while
/// leaving `d(0) >= 1`; calls `emit(parts, remaining pool)`.
fn multisets(
    cands: &[Part],
    start: usize,
    pool: &Pool,
    chosen: &mut Vec<Part>,
    emit: &mut dyn FnMut(&[Part], &Pool),
) {
    emit(chosen, pool);
    for (idx, c) in cands.iter().enumerate().skip(start) {
        if pool.fits(c) {
            let next = pool.take(c);
            chosen.push(c.clone());
            multisets(cands, idx, &next, chosen, emit);
            chosen.pop();
        }
    }
}

fn ratio(num: Count, den: Count) -> BigRational {
    BigRational::new(num, den)
}

/// Type I terms for degenerating slot `e` of `p`: the marked point on the
/// degenerated plane collides with a tangency point of type `(m, e0)`.
pub fn type1_terms(p: &Problem, e: u32) -> Result<Vec<PartitionTerm>, CombError> {
    if p.i.get(e) == 0 {
        return Err(CombError::NoSlot(e));
    }
    let big_e = e + 1;
    let mut out = Vec::new();
    for ((m, e0), c) in p.h.iter() {
        if e0 + big_e < p.n {
            continue;
        }
        let h = p.h.without(m, e0, 1).with(m, e0 + big_e - p.n, 1);
        out.push(PartitionTerm {
            variant: Variant::TypeI,
            parts: vec![Part::new(p.d, h, p.i.without(e, 1))],
            mks: vec![m],
            split: None,
            weight: BigRational::from_integer(BigInt::from(m) * c),
        });
    }
    Ok(out)
}

/// Type II terms (genus 0: `TypeII`; genus 1: `TypeIIa`, `TypeIIb` and,
/// for `n = 3`, `TypeIIc`) for degenerating slot `e` of `p`.
///
/// With `prune` set, terms are dropped only when some factor is forced to
/// vanish: a part whose family dimension is outside `[0, n-1]`, or a
/// point condition left on part 0 (a general point is not on `H`).
pub fn type2_partitions(p: &Problem, e: u32, prune: bool) -> Result<Vec<PartitionTerm>, CombError> {
    if p.i.get(e) == 0 {
        return Err(CombError::NoSlot(e));
    }
    let n = p.n;
    let big_e = e + 1;
    let rest = p.i.without(e, 1);
    let full = Pool {
        d: p.d,
        h: p.h.clone(),
        r: rest.clone(),
    };
    let rational = candidates(n, p.d.saturating_sub(1), &p.h, &rest, PartKind::Rational, prune);
    let mut out = Vec::new();

    let part0_ok = |pool: &Pool| !prune || pool.r.get(0) == 0;
    let part0 = |pool: &Pool| Part::new(pool.d, pool.h.clone(), pool.r.with(big_e, 1));
    let mult = |parts: &[Part]| -> Count {
        let hs: Vec<&Tangency> = parts.iter().map(|q| &q.h).collect();
        let is: Vec<&Incidence> = parts.iter().map(|q| &q.i).collect();
        let mut is_rest = is.clone();
        let i0 = parts[0].i.without(big_e, 1);
        is_rest[0] = &i0;
        tangency_multinomial(&p.h, &hs).expect("tangency split")
            * incidence_multinomial(&rest, &is_rest).expect("incidence split")
    };
    let prod_m = |parts: &[Part]| -> Count {
        parts.iter().map(|q| BigInt::from(q.mk())).product()
    };

    if p.genus == 0 {
        multisets(&rational, 0, &full, &mut Vec::new(), &mut |chosen, pool| {
            if !part0_ok(pool) {
                return;
            }
            let mut parts = vec![part0(pool)];
            parts.extend_from_slice(chosen);
            let w = prod_m(chosen) * mult(&parts);
            out.push(PartitionTerm {
                variant: Variant::TypeII,
                mks: chosen.iter().map(|q| q.mk() as u32).collect(),
                split: None,
                weight: ratio(w, automorphism_order(chosen)),
                parts,
            });
        });
        return Ok(out);
    }

    for kind in [PartKind::Elliptic, PartKind::DoubleContact] {
        let firsts = candidates(n, p.d.saturating_sub(1), &p.h, &rest, kind, prune);
        for first in &firsts {
            let pool1 = full.take(first);
            multisets(&rational, 0, &pool1, &mut Vec::new(), &mut |chosen, pool| {
                if !part0_ok(pool) {
                    return;
                }
                let mut parts = vec![part0(pool), first.clone()];
                parts.extend_from_slice(chosen);
                let base = mult(&parts);
                let aut = automorphism_order(chosen);
                let mks: Vec<u32> = parts[1..].iter().map(|q| q.mk() as u32).collect();
                if kind == PartKind::Elliptic {
                    out.push(PartitionTerm {
                        variant: Variant::TypeIIa,
                        mks,
                        split: None,
                        weight: ratio(prod_m(&parts[1..]) * base, aut),
                        parts,
                    });
                } else {
                    let m1 = first.mk() as u32;
                    for a in 1..m1 {
                        let w = BigInt::from(a) * (m1 - a) * prod_m(chosen) * &base;
                        out.push(PartitionTerm {
                            variant: Variant::TypeIIb,
                            mks: mks.clone(),
                            split: Some((a, m1 - a)),
                            weight: ratio(w, aut.clone() * 2),
                            parts: parts.clone(),
                        });
                    }
                }
            });
        }
    }
    if n == 3 {
        multisets(&rational, 0, &full, &mut Vec::new(), &mut |chosen, pool| {
            if !part0_ok(pool) {
                return;
            }
            let mut parts = vec![part0(pool)];
            parts.extend_from_slice(chosen);
            let w = prod_m(chosen) * mult(&parts);
            out.push(PartitionTerm {
                variant: Variant::TypeIIc,
                mks: chosen.iter().map(|q| q.mk() as u32).collect(),
                split: None,
                weight: ratio(w, automorphism_order(chosen)),
                parts,
            });
        });
    }
    Ok(out)
}

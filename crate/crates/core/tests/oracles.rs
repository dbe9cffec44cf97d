//! Independent computations the engine is checked against.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use egc::combinatorics::{type2_partitions, Variant};
use egc::reference::plane_rational;
use egc::{Engine, Incidence, Problem, Tangency};

fn binom(n: i64, k: i64) -> BigInt {
    if k < 0 || k > n {
        return BigInt::zero();
    }
    (0..k).fold(BigInt::one(), |acc, j| acc * (n - j) / (j + 1))
}

/// Kontsevich's recursion for rational plane curves through `3d - 1` points.
fn kontsevich(max_d: i64) -> Vec<BigInt> {
    let mut n = vec![BigInt::zero(), BigInt::one()];
    for d in 2..=max_d {
        let mut acc = BigInt::zero();
        for a in 1..d {
            let b = d - a;
            let t = binom(3 * d - 4, 3 * a - 2) * (a * a * b * b) - binom(3 * d - 4, 3 * a - 1) * (a * a * a * b);
            acc += &n[a as usize] * &n[b as usize] * t;
        }
        n.push(acc);
    }
    n
}

#[test]
fn plane_rational_matches_kontsevich() {
    let oracle = kontsevich(4);
    assert_eq!(oracle[3], BigInt::from(12));
    let e = Engine::default();
    for d in 1..=4u32 {
        assert_eq!(plane_rational(&e, d).unwrap(), oracle[d as usize], "N_{d}");
    }
}

/// Standard tableaux of a `rows x cols` rectangle by the hook length formula.
fn rectangle_tableaux(rows: u64, cols: u64) -> BigInt {
    let cells = rows * cols;
    let mut hooks = BigInt::one();
    for r in 0..rows {
        for c in 0..cols {
            hooks *= (rows - r - 1) + (cols - c - 1) + 1;
        }
    }
    (1..=cells).fold(BigInt::one(), |acc, k| acc * k) / hooks
}

/// Lines in `P^n` meeting general `(n-2)`-planes: `sigma_1^{2n-2}` on the
/// Grassmannian of lines, a rectangle of shape `2 x (n-1)`.
#[test]
fn lines_match_schubert_calculus() {
    let e = Engine::default();
    for n in 2..=5u32 {
        let p = Problem::rational(n, 1, Tangency::unit(1, n - 1, 1), Incidence::unit(n - 2, 2 * n - 2));
        assert_eq!(p.dim(), 0);
        assert_eq!(e.count(&p).unwrap(), rectangle_tableaux(2, (n - 1) as u64), "n = {n}");
    }
    assert_eq!(rectangle_tableaux(2, 3), BigInt::from(5));
}

/// Labeled data to distribute among the parts.
struct Items {
    tangency: Vec<(u32, u32)>,
    incidence: Vec<u32>,
}

fn items(p: &Problem, e: u32) -> Items {
    let mut tangency = Vec::new();
    for ((m, e0), c) in p.h.iter() {
        tangency.extend(std::iter::repeat_n((m, e0), c as usize));
    }
    let mut incidence = Vec::new();
    for (e1, c) in p.i.without(e, 1).iter() {
        incidence.extend(std::iter::repeat_n(e1, c as usize));
    }
    Items { tangency, incidence }
}

/// Sum over ordered degree vectors `(d_1..d_l)` and labeled assignments of
/// every item to one of the parts `0..=l` of `prod m^k`, divided by the
/// orderings `l!` of the parts off `H` (or `(l-1)!` when part 1 is
/// distinguished).
fn brute_force(p: &Problem, e: u32, distinguished: bool) -> BigRational {
    let it = items(p, e);
    let total_items = it.tangency.len() + it.incidence.len();
    let mut acc = BigRational::zero();
    let min_l = usize::from(distinguished);
    for l in min_l..p.d as usize {
        let mut degrees = vec![1u32; l];
        loop {
            let used: u32 = degrees.iter().sum();
            if used < p.d {
                let mut sum = BigInt::zero();
                let mut assign = vec![0usize; total_items];
                loop {
                    let mut ms = degrees.iter().map(|&d| d as i64).collect::<Vec<_>>();
                    for (k, &(m, _)) in it.tangency.iter().enumerate() {
                        if assign[k] > 0 {
                            ms[assign[k] - 1] -= m as i64;
                        }
                    }
                    if ms.iter().all(|&m| m >= 1) {
                        sum += ms.iter().fold(BigInt::one(), |a, &m| a * m);
                    }
                    if !advance(&mut assign, l + 1) {
                        break;
                    }
                }
                let orderings = (1..=(l - min_l) as u64).fold(BigInt::one(), |a, k| a * k);
                acc += BigRational::new(sum, orderings);
            }
            if !advance_degrees(&mut degrees, p.d - 1) {
                break;
            }
        }
    }
    acc
}

fn advance(v: &mut [usize], base: usize) -> bool {
    for x in v.iter_mut() {
        *x += 1;
        if *x < base {
            return true;
        }
        *x = 0;
    }
    false
}

fn advance_degrees(v: &mut [u32], max: u32) -> bool {
    for x in v.iter_mut() {
        *x += 1;
        if *x <= max {
            return true;
        }
        *x = 1;
    }
    false
}

fn weight_sum(p: &Problem, e: u32, variant: Variant) -> BigRational {
    type2_partitions(p, e, false)
        .unwrap()
        .into_iter()
        .filter(|t| t.variant == variant)
        .fold(BigRational::zero(), |acc, t| acc + t.weight)
}

#[test]
fn partition_weights_match_labeled_enumeration() {
    // the weights do not depend on the dimension, so small data suffices
    let cases = [
        "g=0 n=3 d=2 h=1,2:2 i=1:5",
        "g=0 n=3 d=3 h=1,2:3 i=1:4",
        "g=0 n=3 d=3 h=1,2:1;2,1:1 i=0:1;1:3",
        "g=0 n=2 d=3 h=1,1:1;1,0:2 i=0:4",
        "g=0 n=2 d=4 h=1,1:2;2,0:1 i=0:3",
    ];
    for text in cases {
        let p: Problem = text.parse().unwrap();
        for (e, _) in p.i.iter().filter(|&(e, _)| e + 2 <= p.n) {
            assert_eq!(weight_sum(&p, e, Variant::TypeII), brute_force(&p, e, false), "{text} e={e}");
        }
    }
}

#[test]
fn elliptic_part_weights_match_labeled_enumeration() {
    for text in [
        "g=1 n=3 d=3 h=1,2:3 i=1:5",
        "g=1 n=2 d=4 h=1,1:2;2,0:1 i=0:3",
        "g=1 n=3 d=4 h=1,2:2;1,1:2 i=0:1;1:2",
    ] {
        let p: Problem = text.parse().unwrap();
        for (e, _) in p.i.iter().filter(|&(e, _)| e + 2 <= p.n) {
            assert_eq!(weight_sum(&p, e, Variant::TypeIIa), brute_force(&p, e, true), "{text} e={e}");
        }
    }
}

/// Parts off `H` form a multiset: each appears once, in sorted order.
#[test]
fn parts_off_h_are_listed_once() {
    let p: Problem = "g=0 n=3 d=3 h=1,2:3 i=1:12".parse().unwrap();
    let mut by_shape: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
    for t in type2_partitions(&p, 1, false).unwrap() {
        *by_shape.entry(t.parts[1..].iter().map(|q| q.d).collect()).or_default() += 1;
    }
    assert!(by_shape.contains_key(&vec![1, 1]));
    assert!(!by_shape.keys().any(|k| k.windows(2).any(|w| w[0] > w[1])));
}

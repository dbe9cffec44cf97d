//! Rational curves: `#X_n(d, h, i)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::combinatorics::{factorial, type1_terms, type2_partitions, Part};
use crate::engine::{int, Engine, EngineError, Expansion, Factor, Product, Rule, Term};
use crate::problem::{dim_w_raw, dim_x_raw, Incidence, Problem, Tangency};
use crate::Count;

/// The seed: one line in `P^1` through two points.
pub fn seed() -> Problem {
    Problem::rational(1, 1, Tangency::unit(1, 0, 1), Incidence::unit(0, 2))
}

/// Counts in `P^1`: only degree-one maps with a single simple contact and
/// point conditions survive, each point contributing a factor `d = 1`.
pub fn count_x1_base(p: &Problem) -> Count {
    assert_eq!(p.n, 1, "base evaluator is for P^1");
    if dim_x_raw(1, p.d, &p.h, &p.i) != 0 {
        return BigInt::zero();
    }
    let simple = p.d == 1 && p.h == Tangency::unit(1, 0, 1);
    let points_only = p.i.iter().all(|(e, _)| e == 0);
    if simple && points_only {
        BigInt::one()
    } else {
        BigInt::zero()
    }
}

/// `(p without i_{n-1} slots, d^{i_{n-1}})`.
pub fn divisor_axiom_strip(p: &Problem) -> (Problem, Count) {
    let k = p.i.get(p.n - 1);
    let mut q = p.clone();
    q.i = p.i.without(p.n - 1, k);
    (q, BigInt::from(p.d).pow(k))
}

/// Part 0 data transferred to `P^{n-1}`: `i_{e+1}(0)` and every tangency
/// point `h_{m,e}(0)` become `e`-plane incidences. `None` if part 0 holds a
/// point condition.
pub(crate) fn part0_incidence(part0: &Part) -> Option<Incidence> {
    if part0.i.get(0) > 0 {
        return None;
    }
    let mut i = Incidence::new();
    for (e, c) in part0.i.iter() {
        i.add(e - 1, c);
    }
    for ((_, e), c) in part0.h.iter() {
        i.add(e, c);
    }
    Some(i)
}

/// Family dimension of a part with its new contact left free on `H`.
pub(crate) fn attach_delta(n: u32, part: &Part, elliptic: bool) -> Option<(u32, Problem)> {
    let m = part.mk();
    if m < 1 {
        return None;
    }
    let m = m as u32;
    let h = part.h.with(m, n - 1, 1);
    let delta = if elliptic {
        dim_w_raw(n, part.d, &h, &part.i)
    } else {
        dim_x_raw(n, part.d, &h, &part.i)
    };
    if !(0..n as i64).contains(&delta) {
        return None;
    }
    let delta = delta as u32;
    let genus = u32::from(elliptic);
    let q = Problem::new(genus, n, part.d, part.h.with(m, n - 1 - delta, 1), part.i.clone());
    Some((delta, q))
}

/// `#Y(E(0); E(1..l))` as a product: `#X_{n-1}(E'(0)) / d(0)! * prod #X_n(E'(k))`,
/// with elliptic parts flagged. `None` when a factor is forced to vanish.
pub(crate) fn y_product(n: u32, part0: &Part, others: &[(&Part, bool)], coeff: BigRational) -> Option<Product> {
    let mut i0 = part0_incidence(part0)?;
    let mut factors = Vec::with_capacity(others.len() + 1);
    for (part, elliptic) in others {
        let (delta, q) = attach_delta(n, part, *elliptic)?;
        i0.add(delta, 1);
        factors.push(Factor::problem(q));
    }
    let e0 = Problem::rational(n - 1, part0.d, Tangency::unit(1, n - 2, part0.d), i0);
    if e0.dim() != 0 {
        return None;
    }
    factors.insert(0, Factor::X(e0));
    Some(Product {
        coeff: coeff / BigRational::from_integer(factorial(part0.d as u64)),
        factors,
    })
}

impl Engine {
    pub(crate) fn expand_x(&self, p: &Problem, slot: Option<u32>) -> Result<Expansion, EngineError> {
        if p.n == 1 {
            let rule = if *p == seed() { Rule::Seed } else { Rule::BaseN1 };
            return Ok(Expansion::Leaf {
                rule,
                value: count_x1_base(p),
            });
        }
        if p.i.get(p.n) > 0 {
            // without the free point the family is empty
            return Ok(Expansion::Leaf {
                rule: Rule::FreePoint,
                value: BigInt::zero(),
            });
        }
        if slot.is_none() && self.opts.divisor_axiom && p.i.get(p.n - 1) > 0 {
            let (q, factor) = divisor_axiom_strip(p);
            return Ok(Expansion::Sum {
                rule: Rule::DivisorAxiom,
                slot: None,
                terms: vec![Term {
                    rule: Rule::DivisorAxiom,
                    weight: int(factor),
                    products: vec![Product {
                        coeff: Engine::one(),
                        factors: vec![Factor::X(q)],
                    }],
                    source: None,
                }],
            });
        }
        let e = match slot {
            Some(e) => e,
            None => self.choose_slot(p)?,
        };
        let mut terms = Vec::new();
        for t in type1_terms(p, e).map_err(|_| EngineError::NoSlot(p.to_string()))? {
            let q = Problem::rational(p.n, p.d, t.parts[0].h.clone(), t.parts[0].i.clone());
            terms.push(Term {
                rule: Rule::TypeI,
                weight: t.weight.clone(),
                products: vec![Product {
                    coeff: Engine::one(),
                    factors: vec![Factor::X(q)],
                }],
                source: Some(t),
            });
        }
        for t in type2_partitions(p, e, true).map_err(|_| EngineError::NoSlot(p.to_string()))? {
            let others: Vec<(&Part, bool)> = t.parts[1..].iter().map(|q| (q, false)).collect();
            if let Some(prod) = y_product(p.n, &t.parts[0], &others, Engine::one()) {
                terms.push(Term {
                    rule: Rule::TypeIIPlain,
                    weight: t.weight.clone(),
                    products: vec![prod],
                    source: Some(t),
                });
            }
        }
        Ok(Expansion::Sum {
            rule: Rule::Degeneration,
            slot: Some(e),
            terms,
        })
    }
}

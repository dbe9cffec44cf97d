//! Elliptic curves in `P^2` and `P^3`: `#W_n(d, h, i)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::combinatorics::{factorial, type1_terms, type2_partitions, Part, Variant};
use crate::engine::{int, Engine, EngineError, Expansion, Factor, Product, Rule, Term};
use crate::fibration::{dim_z, DivisorSpec, ZProblem};
use crate::genus0::{attach_delta, divisor_axiom_strip, part0_incidence, y_product};
use crate::problem::{dim_x_raw, Problem, Tangency};

/// Ỹ^b for `n = 2`: part 0 is the line `H`; every other part is rigid.
fn yb_plane(parts: &[Part], a: u32, b: u32) -> Option<Product> {
    let part0 = &parts[0];
    let i0 = part0_incidence(part0)?;
    let e0 = Problem::rational(1, part0.d, Tangency::unit(1, 0, part0.d), i0);
    if e0.dim() != 0 {
        return None;
    }
    let mut factors = vec![Factor::X(e0)];
    let p1 = &parts[1];
    let q1 = Problem::rational(2, p1.d, p1.h.with(a, 1, 1).with(b, 1, 1), p1.i.clone());
    if q1.dim() != 0 {
        return None;
    }
    factors.push(Factor::X(q1));
    for part in &parts[2..] {
        let q = Problem::rational(2, part.d, part.h.with(part.mk() as u32, 1, 1), part.i.clone());
        if q.dim() != 0 {
            return None;
        }
        factors.push(Factor::X(q));
    }
    Some(Product {
        coeff: BigRational::new(BigInt::from(1), factorial(part0.d as u64)),
        factors,
    })
}

fn with_extra(product: Product, coeff: BigRational, extra: Factor) -> Product {
    let mut factors = product.factors;
    factors.push(extra);
    Product {
        coeff: product.coeff * coeff,
        factors,
    }
}

/// Ỹ^b for `n = 3`, dispatched on the dimension of the family of `C(1)`
/// with both contacts free on `H`.
fn yb_space(parts: &[Part], a: u32, b: u32) -> Vec<Product> {
    let (part0, p1) = (&parts[0], &parts[1]);
    let rest: Vec<(&Part, bool)> = parts[2..].iter().map(|q| (q, false)).collect();
    let m1 = a + b;
    let d0 = part0.d;
    let x1 = |h: Tangency| Factor::X(Problem::rational(3, p1.d, h, p1.i.clone()));
    let y0 = |extra: u32| {
        let pt = Part::new(d0, part0.h.with(1, 0, extra), part0.i.clone());
        y_product(3, &pt, &rest, Engine::one())
    };
    let delta = dim_x_raw(3, p1.d, &p1.h.with(a, 2, 1).with(b, 2, 1), &p1.i);
    let mut out = Vec::new();
    match delta {
        0 => {
            if let Some(y) = y0(2) {
                out.push(with_extra(y, Engine::one(), x1(p1.h.with(a, 2, 1).with(b, 2, 1))));
            }
        }
        1 => {
            // pairs on the pencil of part 0 against the one-parameter C(1)
            if let Some(y) = y0(1) {
                out.push(with_extra(y.clone(), int(d0), x1(p1.h.with(a, 1, 1).with(b, 2, 1))));
                out.push(with_extra(y.clone(), int(d0), x1(p1.h.with(b, 1, 1).with(a, 2, 1))));
                out.push(with_extra(y, int(-1), x1(p1.h.with(m1, 2, 1))));
            }
        }
        2 => {
            // C(1) meets the rigid curve C(0) twice; subtract coincident contacts
            if let Some(y) = y0(0) {
                out.push(with_extra(y.clone(), int(d0 * d0), x1(p1.h.with(a, 1, 1).with(b, 1, 1))));
                out.push(with_extra(y, int(-i64::from(d0)), x1(p1.h.with(m1, 1, 1))));
            }
        }
        _ => {}
    }
    out
}

/// Y^c: part 0 is an elliptic curve in `H` whose hyperplane class equals
/// its tangency points (weighted by order) minus its attachment points
/// (weighted by contact order).
fn yc_product(n: u32, parts: &[Part]) -> Option<Product> {
    let part0 = &parts[0];
    let mut i0 = part0_incidence(part0)?;
    let mut div = DivisorSpec::new();
    for ((m, e), c) in part0.h.iter() {
        for _ in 0..c {
            div.push(e, m as i64);
        }
    }
    let mut factors = Vec::new();
    for part in &parts[1..] {
        let (delta, q) = attach_delta(n, part, false)?;
        i0.add(delta, 1);
        div.push(delta, -part.mk());
        factors.push(Factor::X(q));
    }
    assert_eq!(div.sum(), part0.d as i64, "divisor coefficients must sum to d(0)");
    let z = ZProblem::new(n - 1, part0.d, i0, div);
    if dim_z(&z) != 0 {
        return None;
    }
    factors.insert(0, Factor::Z(z));
    Some(Product {
        coeff: Engine::one(),
        factors,
    })
}

impl Engine {
    pub(crate) fn expand_w(&self, p: &Problem, slot: Option<u32>) -> Result<Expansion, EngineError> {
        if p.i.get(p.n) > 0 {
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
                        factors: vec![Factor::W(q)],
                    }],
                    source: None,
                }],
            });
        }
        let e = match slot {
            Some(e) => e,
            None => self.choose_slot(p)?,
        };
        let no_slot = |_| EngineError::NoSlot(p.to_string());
        let mut terms = Vec::new();
        for t in type1_terms(p, e).map_err(no_slot)? {
            let q = Problem::elliptic(p.n, p.d, t.parts[0].h.clone(), t.parts[0].i.clone());
            terms.push(Term {
                rule: Rule::TypeI,
                weight: t.weight.clone(),
                products: vec![Product {
                    coeff: Engine::one(),
                    factors: vec![Factor::W(q)],
                }],
                source: Some(t),
            });
        }
        for t in type2_partitions(p, e, true).map_err(no_slot)? {
            let (rule, products) = match t.variant {
                Variant::TypeIIa => {
                    let mut others = vec![(&t.parts[1], true)];
                    others.extend(t.parts[2..].iter().map(|q| (q, false)));
                    let prod = y_product(p.n, &t.parts[0], &others, Engine::one());
                    (Rule::TypeIIa, prod.into_iter().collect())
                }
                Variant::TypeIIb => {
                    let (a, b) = t.split.expect("split recorded");
                    let prods = if p.n == 2 {
                        yb_plane(&t.parts, a, b).into_iter().collect()
                    } else {
                        yb_space(&t.parts, a, b)
                    };
                    (Rule::TypeIIb, prods)
                }
                Variant::TypeIIc => (Rule::TypeIIc, yc_product(p.n, &t.parts).into_iter().collect()),
                Variant::TypeI | Variant::TypeII => unreachable!("genus-1 stream"),
            };
            if !products.is_empty() {
                terms.push(Term {
                    rule,
                    weight: t.weight.clone(),
                    products,
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

    /// `#Y^a` for parts with part 1 elliptic.
    pub fn count_ya(&self, n: u32, parts: &[Part]) -> Result<BigRational, EngineError> {
        let mut others = vec![(&parts[1], true)];
        others.extend(parts[2..].iter().map(|q| (q, false)));
        match y_product(n, &parts[0], &others, Engine::one()) {
            Some(prod) => self.product_value(&prod),
            None => Ok(BigRational::zero()),
        }
    }

    /// `#Ỹ^b` for parts with part 1 meeting part 0 in contacts of orders
    /// `a` and `b`.
    pub fn count_yb_tilde(&self, n: u32, parts: &[Part], a: u32) -> Result<BigRational, EngineError> {
        let m1 = parts[1].mk();
        if a == 0 || (a as i64) >= m1 || !(2..=3).contains(&n) {
            return Err(EngineError::InvalidDivisor(format!(
                "split {a} out of range for contact order {m1} in P^{n}"
            )));
        }
        let b = m1 as u32 - a;
        let prods = if n == 2 {
            yb_plane(parts, a, b).into_iter().collect()
        } else {
            yb_space(parts, a, b)
        };
        let mut acc = BigRational::zero();
        for prod in &prods {
            acc += self.product_value(prod)?;
        }
        Ok(acc)
    }

    /// `#Y^c` for a `TypeIIc` term.
    pub fn count_yc(&self, n: u32, parts: &[Part]) -> Result<BigRational, EngineError> {
        match yc_product(n, parts) {
            Some(prod) => self.product_value(&prod),
            None => Ok(BigRational::zero()),
        }
    }
}

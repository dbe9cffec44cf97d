//! Evaluation of expansions against the memo store.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::combinatorics::PartitionTerm;
use crate::fibration::ZProblem;
use crate::memo::{CacheError, CacheKey, MemoStore};
use crate::problem::{validate, Problem, Violation};
use crate::Count;

/// Which admissible slot to degenerate first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SlotOrder {
    #[default]
    MaxE,
    MinE,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Options {
    /// Strip hyperplane incidences by the factor `d` each.
    pub divisor_axiom: bool,
    pub order: SlotOrder,
    /// Evaluate every admissible slot at every node and require agreement.
    pub check_all_orders: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            divisor_axiom: true,
            order: SlotOrder::MaxE,
            check_all_orders: false,
        }
    }
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("invalid problem: {}", join(.0))]
    Invalid(Vec<Violation>),
    #[error("unsupported problem: {}", join(.0))]
    Unsupported(Vec<Violation>),
    #[error("invalid divisor condition: {0}")]
    InvalidDivisor(String),
    #[error("non-exact division in {0}")]
    NonExact(String),
    #[error("degeneration orders disagree for {problem}: {values}")]
    OrderMismatch { problem: String, values: String },
    #[error("no degeneration slot for {0}")]
    NoSlot(String),
    #[error(transparent)]
    Cache(#[from] CacheError),
}

fn join(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

impl EngineError {
    pub fn is_unsupported(&self) -> bool {
        matches!(self, EngineError::Unsupported(_))
    }
}

/// How a node of the evaluation was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    Seed,
    ZeroDim,
    FreePoint,
    BaseN1,
    DivisorAxiom,
    Degeneration,
    TypeI,
    TypeIIPlain,
    TypeIIa,
    TypeIIb,
    TypeIIc,
    Product,
    ZEvaluation,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Seed => "seed",
            Rule::ZeroDim => "zero-dim",
            Rule::FreePoint => "free-point",
            Rule::BaseN1 => "base-n1",
            Rule::DivisorAxiom => "divisor-axiom",
            Rule::Degeneration => "degeneration",
            Rule::TypeI => "type-I",
            Rule::TypeIIPlain => "type-IIplain",
            Rule::TypeIIa => "type-IIa",
            Rule::TypeIIb => "type-IIb",
            Rule::TypeIIc => "type-IIc",
            Rule::Product => "product",
            Rule::ZEvaluation => "z-evaluation",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A count the engine knows how to evaluate.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Factor {
    X(Problem),
    W(Problem),
    Z(ZProblem),
}

impl Factor {
    pub fn problem(p: Problem) -> Self {
        if p.genus == 0 {
            Factor::X(p)
        } else {
            Factor::W(p)
        }
    }

    fn measure(&self) -> (u32, u32, u64) {
        match self {
            Factor::X(p) | Factor::W(p) => measure(p),
            Factor::Z(z) => (z.n, z.d, u64::MAX),
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Factor::X(p) | Factor::W(p) => write!(f, "{p}"),
            Factor::Z(z) => write!(f, "{z}"),
        }
    }
}

/// `coeff * prod factors`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Product {
    pub coeff: BigRational,
    pub factors: Vec<Factor>,
}

/// `weight * sum products`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub rule: Rule,
    pub weight: BigRational,
    pub products: Vec<Product>,
    pub source: Option<PartitionTerm>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expansion {
    Leaf { rule: Rule, value: Count },
    Sum { rule: Rule, slot: Option<u32>, terms: Vec<Term> },
}

/// Lexicographic recursion measure `(n, d, sum i + sum (e+1) h)`.
pub fn measure(p: &Problem) -> (u32, u32, u64) {
    let hs: u64 = p.h.iter().map(|((_, e), c)| (e as u64 + 1) * c as u64).sum();
    (p.n, p.d, p.i.total() + hs)
}

pub(crate) fn exact(r: BigRational, what: impl FnOnce() -> String) -> Result<Count, EngineError> {
    if r.is_integer() {
        Ok(r.to_integer())
    } else {
        Err(EngineError::NonExact(what()))
    }
}

pub(crate) fn int(v: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(v.into())
}

pub struct Engine {
    pub opts: Options,
    memo: MemoStore,
}

impl Default for Engine {
    fn default() -> Self {
        Engine::new(Options::default())
    }
}

impl Engine {
    pub fn new(opts: Options) -> Self {
        Engine {
            opts,
            memo: MemoStore::new(),
        }
    }

    pub fn memo(&self) -> &MemoStore {
        &self.memo
    }

    pub fn check(p: &Problem) -> Result<(), EngineError> {
        let v = validate(p);
        if v.is_empty() {
            Ok(())
        } else if v.iter().any(Violation::is_unsupported) {
            Err(EngineError::Unsupported(v))
        } else {
            Err(EngineError::Invalid(v))
        }
    }

    /// `#X(p)` or `#W(p)` according to the genus.
    pub fn count(&self, p: &Problem) -> Result<Count, EngineError> {
        Self::check(p)?;
        self.count_unchecked(p)
    }

    pub fn count_x(&self, p: &Problem) -> Result<Count, EngineError> {
        if p.genus != 0 {
            return Err(EngineError::Invalid(vec![Violation::Genus(p.genus)]));
        }
        self.count(p)
    }

    pub fn count_w(&self, p: &Problem) -> Result<Count, EngineError> {
        if p.genus != 1 {
            return Err(EngineError::Invalid(vec![Violation::Genus(p.genus)]));
        }
        self.count(p)
    }

    pub(crate) fn count_unchecked(&self, p: &Problem) -> Result<Count, EngineError> {
        if p.dim() != 0 {
            return Ok(BigInt::zero());
        }
        let key = if p.genus == 0 {
            CacheKey::X(p.clone())
        } else {
            CacheKey::W(p.clone())
        };
        if let Some(v) = self.memo.lookup(&key) {
            return Ok(v);
        }
        let value = if self.opts.check_all_orders {
            self.count_all_orders_inner(p)?
        } else {
            let exp = self.expand(p)?;
            self.value(p, &exp)?
        };
        self.memo.store(key, value.clone())?;
        Ok(value)
    }

    fn count_all_orders_inner(&self, p: &Problem) -> Result<Count, EngineError> {
        let base = self.expand(p)?;
        let v0 = self.value(p, &base)?;
        if matches!(base, Expansion::Sum { rule: Rule::Degeneration, .. }) {
            let mut seen = vec![v0.clone()];
            for e in self.admissible_slots(p) {
                let exp = self.expand_with_slot(p, Some(e))?;
                seen.push(self.value(p, &exp)?);
            }
            if seen.iter().any(|v| *v != v0) {
                return Err(EngineError::OrderMismatch {
                    problem: p.to_string(),
                    values: seen.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", "),
                });
            }
        }
        Ok(v0)
    }

    /// Slots `e <= n-2` carrying an incidence; any of them may be degenerated.
    pub fn admissible_slots(&self, p: &Problem) -> Vec<u32> {
        p.i.iter()
            .map(|(e, _)| e)
            .filter(|&e| e + 2 <= p.n)
            .collect()
    }

    pub(crate) fn choose_slot(&self, p: &Problem) -> Result<u32, EngineError> {
        let slots = self.admissible_slots(p);
        let pick = match self.opts.order {
            SlotOrder::MaxE => slots.last(),
            SlotOrder::MinE => slots.first(),
        };
        pick.copied()
            .ok_or_else(|| EngineError::NoSlot(p.to_string()))
    }

    /// The expansion used for `p` under the engine's options.
    pub fn expand(&self, p: &Problem) -> Result<Expansion, EngineError> {
        self.expand_with_slot(p, None)
    }

    /// As [`Engine::expand`], but degenerating slot `e` at this node when
    /// given (no divisor stripping at this node).
    pub fn expand_with_slot(&self, p: &Problem, slot: Option<u32>) -> Result<Expansion, EngineError> {
        let exp = if p.dim() != 0 {
            Expansion::Leaf {
                rule: Rule::ZeroDim,
                value: BigInt::zero(),
            }
        } else if p.genus == 0 {
            self.expand_x(p, slot)?
        } else {
            self.expand_w(p, slot)?
        };
        if let Expansion::Sum { terms, .. } = &exp {
            let top = measure(p);
            for t in terms {
                for prod in &t.products {
                    for f in &prod.factors {
                        assert!(f.measure() < top, "recursion measure must decrease: {p} -> {f}");
                    }
                }
            }
        }
        Ok(exp)
    }

    /// Count obtained by degenerating slot `e` at the top node.
    pub fn count_with_slot(&self, p: &Problem, e: u32) -> Result<Count, EngineError> {
        Self::check(p)?;
        if p.dim() != 0 {
            return Ok(BigInt::zero());
        }
        let exp = self.expand_with_slot(p, Some(e))?;
        self.value(p, &exp)
    }

    pub fn value(&self, p: &Problem, exp: &Expansion) -> Result<Count, EngineError> {
        match exp {
            Expansion::Leaf { value, .. } => Ok(value.clone()),
            Expansion::Sum { terms, .. } => {
                let mut acc = BigRational::zero();
                for t in terms {
                    acc += self.term_value(t)?;
                }
                exact(acc, || format!("sum for {p}"))
            }
        }
    }

    pub fn term_value(&self, t: &Term) -> Result<BigRational, EngineError> {
        let mut acc = BigRational::zero();
        for prod in &t.products {
            acc += self.product_value(prod)?;
        }
        Ok(acc * &t.weight)
    }

    pub fn product_value(&self, prod: &Product) -> Result<BigRational, EngineError> {
        let mut acc = prod.coeff.clone();
        for f in &prod.factors {
            if acc.is_zero() {
                break;
            }
            acc *= BigRational::from_integer(self.factor_value(f)?);
        }
        Ok(acc)
    }

    pub fn factor_value(&self, f: &Factor) -> Result<Count, EngineError> {
        match f {
            Factor::X(p) | Factor::W(p) => self.count_unchecked(p),
            Factor::Z(z) => self.count_z_unchecked(z),
        }
    }

    pub(crate) fn one() -> BigRational {
        BigRational::one()
    }
}

//! Exact counts of rational and elliptic curves in projective space with
//! incidence and tangency conditions, computed by degenerating one
//! condition at a time into a fixed hyperplane `H`.

pub mod blowup;
pub mod combinatorics;
pub mod engine;
pub mod fibration;
pub mod genus0;
pub mod genus1;
pub mod memo;
pub mod problem;
pub mod reference;
pub mod trace;

pub type Count = num_bigint::BigInt;
pub type ExactRational = num_rational::BigRational;

pub use engine::{Engine, EngineError, Options, SlotOrder};
pub use fibration::{DivisorSpec, ZProblem};
pub use problem::{canonicalize, dim_w, dim_x, validate, Incidence, Problem, Tangency};

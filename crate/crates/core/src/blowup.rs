//! Chow ring of the blow-up of `P^2 x P^2` along the diagonal.
//!
//! Relations: `h1^3 = h2^3 = 0`, `h1 e = h2 e`,
//! `e^2 = 3 h1 e - h1^2 - h1 h2 - h2^2`. Reduced monomials are
//! `h1^a h2^b` (`a, b <= 2`) and `h1^a e` (`a <= 2`); the point class is
//! `h1^2 h2^2`.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::Count;

/// Exponents `(a, b, c)` of `h1^a h2^b e^c`.
type Mono = (u32, u32, u32);

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BlowupClass(BTreeMap<Mono, BigInt>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BlowupError {
    #[error("product is not a top-dimensional class")]
    NotTop,
}

fn reduce_into(m: Mono, coeff: &BigInt, out: &mut BTreeMap<Mono, BigInt>) {
    let (a, b, c) = m;
    if coeff.is_zero() || a >= 3 || b >= 3 {
        return;
    }
    if c >= 2 {
        let three = coeff * 3;
        reduce_into((a + 1, b, c - 1), &three, out);
        let neg = -coeff;
        reduce_into((a + 2, b, c - 2), &neg, out);
        reduce_into((a + 1, b + 1, c - 2), &neg, out);
        reduce_into((a, b + 2, c - 2), &neg, out);
        return;
    }
    let m = if c == 1 && b > 0 { (a + b, 0, 1) } else { m };
    if m.0 >= 3 {
        return;
    }
    let slot = out.entry(m).or_insert_with(BigInt::zero);
    *slot += coeff;
    if slot.is_zero() {
        out.remove(&m);
    }
}

impl BlowupClass {
    pub fn zero() -> Self {
        Self::default()
    }

    fn mono(m: Mono) -> Self {
        let mut out = BTreeMap::new();
        reduce_into(m, &BigInt::one(), &mut out);
        BlowupClass(out)
    }

    pub fn one() -> Self {
        Self::mono((0, 0, 0))
    }

    pub fn h1() -> Self {
        Self::mono((1, 0, 0))
    }

    pub fn h2() -> Self {
        Self::mono((0, 1, 0))
    }

    pub fn e() -> Self {
        Self::mono((0, 0, 1))
    }

    pub fn scale(&self, k: impl Into<BigInt>) -> Self {
        let k = k.into();
        let mut out = BTreeMap::new();
        for (&m, c) in &self.0 {
            reduce_into(m, &(c * &k), &mut out);
        }
        BlowupClass(out)
    }

    /// Coefficients on the reduced basis.
    pub fn coefficients(&self) -> &BTreeMap<(u32, u32, u32), BigInt> {
        &self.0
    }

    fn degrees(&self) -> Vec<u32> {
        let mut d: Vec<u32> = self.0.keys().map(|(a, b, c)| a + b + c).collect();
        d.dedup();
        d
    }

    /// Coefficient of the point class.
    pub fn degree(&self) -> Count {
        self.0.get(&(2, 2, 0)).cloned().unwrap_or_else(BigInt::zero)
    }
}

impl Add for &BlowupClass {
    type Output = BlowupClass;
    fn add(self, rhs: &BlowupClass) -> BlowupClass {
        let mut out = self.0.clone();
        for (&m, c) in &rhs.0 {
            reduce_into(m, c, &mut out);
        }
        BlowupClass(out)
    }
}

impl Neg for &BlowupClass {
    type Output = BlowupClass;
    fn neg(self) -> BlowupClass {
        self.scale(-1)
    }
}

impl Sub for &BlowupClass {
    type Output = BlowupClass;
    fn sub(self, rhs: &BlowupClass) -> BlowupClass {
        self + &(-rhs)
    }
}

impl Mul for &BlowupClass {
    type Output = BlowupClass;
    fn mul(self, rhs: &BlowupClass) -> BlowupClass {
        let mut out = BTreeMap::new();
        for (&(a, b, c), x) in &self.0 {
            for (&(a2, b2, c2), y) in &rhs.0 {
                reduce_into((a + a2, b + b2, c + c2), &(x * y), &mut out);
            }
        }
        BlowupClass(out)
    }
}

/// Degree of `a * b`; both must be homogeneous with complementary degrees.
pub fn blowup_pair_product(a: &BlowupClass, b: &BlowupClass) -> Result<Count, BlowupError> {
    let (da, db) = (a.degrees(), b.degrees());
    if da.len() > 1 || db.len() > 1 {
        return Err(BlowupError::NotTop);
    }
    match (da.first(), db.first()) {
        (Some(x), Some(y)) if x + y == 4 => Ok((a * b).degree()),
        (None, _) | (_, None) => Ok(BigInt::zero()),
        _ => Err(BlowupError::NotTop),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prod(xs: &[&BlowupClass]) -> BlowupClass {
        xs.iter().fold(BlowupClass::one(), |acc, x| &acc * x)
    }

    #[test]
    fn basis_has_twelve_elements() {
        let gens = [BlowupClass::h1(), BlowupClass::h2(), BlowupClass::e()];
        let mut seen = std::collections::BTreeSet::new();
        let mut frontier = vec![BlowupClass::one()];
        for _ in 0..5 {
            let mut next = Vec::new();
            for c in &frontier {
                seen.extend(c.coefficients().keys().copied());
                for g in &gens {
                    next.push(c * g);
                }
            }
            frontier = next;
        }
        assert_eq!(seen.len(), 12);
    }

    #[test]
    fn relations() {
        let (h1, h2, e) = (BlowupClass::h1(), BlowupClass::h2(), BlowupClass::e());
        assert_eq!(prod(&[&h1, &h1, &h1]), BlowupClass::zero());
        assert_eq!(&h1 * &e, &h2 * &e);
        assert_eq!(blowup_pair_product(&(&h1 * &h2), &(&h1 * &h2)).unwrap(), BigInt::one());
        assert_eq!(prod(&[&h1, &h1, &h2, &e]).degree(), BigInt::zero());
        assert_eq!(prod(&[&h1, &h1, &e, &e]).degree(), BigInt::from(-1));
        assert_eq!(prod(&[&e, &e, &h1, &h2]).degree(), BigInt::from(-1));
        // e^2 = 3 h1 e - h1^2 - h1 h2 - h2^2, so e^4 is the square of the right side
        let e4 = prod(&[&e, &e, &e, &e]).degree();
        let manual = {
            let rel = &(&(&h1 * &e).scale(3) - &(&h1 * &h1)) - &(&(&h1 * &h2) + &(&h2 * &h2));
            (&rel * &rel).degree()
        };
        assert_eq!(e4, manual);
    }

    #[test]
    fn conic_line_pairs() {
        let (h1, h2, e) = (BlowupClass::h1(), BlowupClass::h2(), BlowupClass::e());
        let c0 = &(&h1 + &h2) - &e;
        let c1 = &(&prod(&[&h1, &h1, &h2]) + &prod(&[&h1, &h2, &h2])).scale(92)
            - &prod(&[&e, &h1, &h2]).scale(116);
        assert_eq!(blowup_pair_product(&c0, &c1).unwrap(), BigInt::from(68));
        assert_eq!(blowup_pair_product(&c0, &h1), Err(BlowupError::NotTop));
        assert_eq!(
            blowup_pair_product(&(&h1 + &(&h1 * &h1)), &c1),
            Err(BlowupError::NotTop)
        );
    }
}

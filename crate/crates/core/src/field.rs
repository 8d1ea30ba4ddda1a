//! Arithmetic in GF(q) for prime powers q.
//!
//! Elements are canonical indices in `[0, q)`: the index encodes the
//! polynomial `sum c_i x^i` as `sum c_i p^i` (little-endian base-p digits).
//! Extension fields use the Conway polynomial for (p, e) from an embedded
//! table covering every prime power up to 512, so element indices (and all
//! matrix files built from them) are portable across implementations.
//! Arithmetic is table-driven for q <= 256 and polynomial/modular above.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Default cap on the field order accepted by [`Field::new`].
pub const DEFAULT_ORDER_LIMIT: u64 = 1 << 20;

/// Largest order for which full lookup tables are precomputed.
const TABLE_LIMIT: u64 = 256;

/// Conway polynomials for all prime powers p^e <= 512 with e >= 2,
/// as little-endian coefficient lists (constant term first, monic).
const CONWAY: &[(u64, u32, &[u32])] = &[
    (2, 2, &[1, 1, 1]),
    (2, 3, &[1, 1, 0, 1]),
    (2, 4, &[1, 1, 0, 0, 1]),
    (2, 5, &[1, 0, 1, 0, 0, 1]),
    (2, 6, &[1, 1, 0, 1, 1, 0, 1]),
    (2, 7, &[1, 1, 0, 0, 0, 0, 0, 1]),
    (2, 8, &[1, 0, 1, 1, 1, 0, 0, 0, 1]),
    (2, 9, &[1, 0, 0, 0, 1, 0, 0, 0, 0, 1]),
    (3, 2, &[2, 2, 1]),
    (3, 3, &[1, 2, 0, 1]),
    (3, 4, &[2, 0, 0, 2, 1]),
    (3, 5, &[1, 2, 0, 0, 0, 1]),
    (5, 2, &[2, 4, 1]),
    (5, 3, &[3, 3, 0, 1]),
    (7, 2, &[3, 6, 1]),
    (7, 3, &[4, 0, 6, 1]),
    (11, 2, &[2, 7, 1]),
    (13, 2, &[2, 12, 1]),
    (17, 2, &[3, 16, 1]),
    (19, 2, &[2, 18, 1]),
];

/// An element of a finite field, stored as its canonical index.
///
/// Index 0 is the additive identity and index 1 the multiplicative identity.
/// Elements do not carry their field; containers ([`crate::matrix::GFMatrix`])
/// do, and cross-field operations are rejected there.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement(pub u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    #[inline]
    pub fn index(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug)]
struct FieldData {
    p: u64,
    e: u32,
    q: u64,
    /// Monic irreducible modulus over GF(p), little-endian, degree e.
    modulus: Vec<u32>,
    // Lookup tables, populated when q <= TABLE_LIMIT.
    add_t: Vec<u32>,
    mul_t: Vec<u32>,
    inv_t: Vec<u32>,
    neg_t: Vec<u32>,
}

/// GF(q): immutable after construction, cheap to clone, safe to share.
#[derive(Clone)]
pub struct Field(Arc<FieldData>);

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.0.p, self.0.e)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.e == other.0.e && self.0.modulus == other.0.modulus)
    }
}
impl Eq for Field {}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

impl Field {
    /// Build GF(p^e). `e = 1` gives the prime field with modulus `x`;
    /// `e >= 2` requires an embedded Conway polynomial (p^e <= 512).
    pub fn new(p: u64, e: u32) -> Result<Field> {
        Self::with_limit(p, e, DEFAULT_ORDER_LIMIT)
    }

    pub fn with_limit(p: u64, e: u32, limit: u64) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::NonPrime(p));
        }
        if e == 0 {
            return Err(Error::UnsupportedField { p, e });
        }
        let q = p
            .checked_pow(e)
            .filter(|&q| q <= limit)
            .ok_or(Error::FieldTooLarge { q: u64::MAX, limit })?;
        let modulus: Vec<u32> = if e == 1 {
            vec![0, 1]
        } else {
            CONWAY
                .iter()
                .find(|&&(cp, ce, _)| cp == p && ce == e)
                .map(|&(_, _, m)| m.to_vec())
                .ok_or(Error::UnsupportedField { p, e })?
        };
        let mut data = FieldData {
            p,
            e,
            q,
            modulus,
            add_t: Vec::new(),
            mul_t: Vec::new(),
            inv_t: Vec::new(),
            neg_t: Vec::new(),
        };
        if q <= TABLE_LIMIT {
            data.build_tables();
        }
        Ok(Field(Arc::new(data)))
    }

    /// Convenience constructor from a known prime power order.
    pub fn of_order(q: u64) -> Result<Field> {
        let (p, e) = factor_prime_power(q)?;
        Field::new(p, e)
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.0.p
    }

    #[inline]
    pub fn e(&self) -> u32 {
        self.0.e
    }

    #[inline]
    pub fn q(&self) -> u64 {
        self.0.q
    }

    /// Monic irreducible modulus, little-endian coefficients over GF(p).
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    /// Validated element constructor.
    pub fn element(&self, index: u64) -> Result<FieldElement> {
        if index < self.0.q {
            Ok(FieldElement(index as u32))
        } else {
            Err(Error::ElementOutOfRange { index, q: self.0.q })
        }
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::ZERO
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::ONE
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.0.q as u32).map(FieldElement)
    }

    #[inline]
    fn check(&self, a: FieldElement) {
        debug_assert!((a.0 as u64) < self.0.q, "element {} out of range", a.0);
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.check(a);
        self.check(b);
        let d = &self.0;
        if !d.add_t.is_empty() {
            return FieldElement(d.add_t[(a.0 as usize) * d.q as usize + b.0 as usize]);
        }
        if d.e == 1 {
            return FieldElement((((a.0 as u64) + (b.0 as u64)) % d.p) as u32);
        }
        FieldElement(poly_add(a.0 as u64, b.0 as u64, d.p, d.e) as u32)
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        self.check(a);
        let d = &self.0;
        if !d.neg_t.is_empty() {
            return FieldElement(d.neg_t[a.0 as usize]);
        }
        if d.e == 1 {
            return FieldElement(if a.0 == 0 { 0 } else { (d.p - a.0 as u64) as u32 });
        }
        FieldElement(poly_neg(a.0 as u64, d.p, d.e) as u32)
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.check(a);
        self.check(b);
        let d = &self.0;
        if !d.mul_t.is_empty() {
            return FieldElement(d.mul_t[(a.0 as usize) * d.q as usize + b.0 as usize]);
        }
        if d.e == 1 {
            return FieldElement((((a.0 as u64) * (b.0 as u64)) % d.p) as u32);
        }
        FieldElement(poly_mul(a.0 as u64, b.0 as u64, d.p, d.e, &d.modulus) as u32)
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        self.check(a);
        if a.is_zero() {
            return Err(Error::InverseOfZero);
        }
        let d = &self.0;
        if !d.inv_t.is_empty() {
            return Ok(FieldElement(d.inv_t[a.0 as usize]));
        }
        // a^(q-2) by square-and-multiply
        Ok(self.pow(a, d.q - 2))
    }

    pub fn pow(&self, a: FieldElement, mut n: u64) -> FieldElement {
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            n >>= 1;
        }
        acc
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: FieldElement) -> Result<u64> {
        if a.is_zero() {
            return Err(Error::InverseOfZero);
        }
        let mut x = a;
        let mut ord = 1u64;
        while x != FieldElement::ONE {
            x = self.mul(x, a);
            ord += 1;
        }
        Ok(ord)
    }
}

impl FieldData {
    fn build_tables(&mut self) {
        let q = self.q as usize;
        self.add_t = vec![0; q * q];
        self.mul_t = vec![0; q * q];
        self.neg_t = vec![0; q];
        self.inv_t = vec![0; q];
        for a in 0..q as u64 {
            for b in 0..q as u64 {
                let (s, m) = if self.e == 1 {
                    ((a + b) % self.p, (a * b) % self.p)
                } else {
                    (
                        poly_add(a, b, self.p, self.e),
                        poly_mul(a, b, self.p, self.e, &self.modulus),
                    )
                };
                self.add_t[a as usize * q + b as usize] = s as u32;
                self.mul_t[a as usize * q + b as usize] = m as u32;
                if s == 0 {
                    self.neg_t[a as usize] = b as u32;
                }
                if m == 1 {
                    self.inv_t[a as usize] = b as u32;
                }
            }
        }
    }
}

fn digits(mut v: u64, p: u64, e: u32) -> Vec<u64> {
    let mut d = vec![0u64; e as usize];
    for slot in d.iter_mut() {
        *slot = v % p;
        v /= p;
    }
    d
}

fn undigits(d: &[u64], p: u64) -> u64 {
    d.iter().rev().fold(0u64, |acc, &c| acc * p + c)
}

fn poly_add(a: u64, b: u64, p: u64, e: u32) -> u64 {
    let da = digits(a, p, e);
    let db = digits(b, p, e);
    let sum: Vec<u64> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
    undigits(&sum, p)
}

fn poly_neg(a: u64, p: u64, e: u32) -> u64 {
    let da = digits(a, p, e);
    let neg: Vec<u64> = da.iter().map(|&x| (p - x) % p).collect();
    undigits(&neg, p)
}

fn poly_mul(a: u64, b: u64, p: u64, e: u32, modulus: &[u32]) -> u64 {
    let da = digits(a, p, e);
    let db = digits(b, p, e);
    let mut prod = vec![0u64; 2 * e as usize];
    for (i, &x) in da.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in db.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    // reduce modulo the monic modulus of degree e
    for i in (e as usize..2 * e as usize).rev() {
        let c = prod[i];
        if c == 0 {
            continue;
        }
        prod[i] = 0;
        for (j, &m) in modulus.iter().enumerate().take(e as usize) {
            let idx = i - e as usize + j;
            prod[idx] = (prod[idx] + c * (p - m as u64)) % p;
        }
    }
    undigits(&prod[..e as usize], p)
}

fn factor_prime_power(q: u64) -> Result<(u64, u32)> {
    if q < 2 {
        return Err(Error::NonPrime(q));
    }
    let mut p = 2u64;
    while p * p <= q {
        if q % p == 0 {
            let mut v = q;
            let mut e = 0u32;
            while v % p == 0 {
                v /= p;
                e += 1;
            }
            if v != 1 {
                return Err(Error::NonPrime(q));
            }
            return Ok((p, e));
        }
        p += 1;
    }
    Ok((q, 1))
}

/// Check that `modulus` (little-endian over GF(p)) is irreducible: no roots
/// in GF(p) and no monic factor of degree <= e/2. Exhaustive trial division,
/// intended for validation of the embedded table and parsed inputs.
pub fn is_irreducible_over_prime(modulus: &[u32], p: u64) -> bool {
    let e = modulus.len() - 1;
    if e == 0 || modulus[e] == 0 {
        return false;
    }
    // root test
    for x in 0..p {
        let mut acc = 0u64;
        for &c in modulus.iter().rev() {
            acc = (acc * x + c as u64) % p;
        }
        if acc == 0 {
            return false;
        }
    }
    // trial division by monic polynomials of degree 2..=e/2
    for d in 2..=e / 2 {
        let count = p.pow(d as u32);
        for idx in 0..count {
            let mut f: Vec<u64> = digits(idx, p, d as u32);
            f.push(1); // monic degree d
            if poly_divides(&f, modulus, p) {
                return false;
            }
        }
    }
    true
}

/// Does monic `f` divide `g` over GF(p)?
fn poly_divides(f: &[u64], g: &[u32], p: u64) -> bool {
    let mut rem: Vec<u64> = g.iter().map(|&c| c as u64).collect();
    let df = f.len() - 1;
    while rem.len() > df {
        let lead = *rem.last().unwrap();
        if lead != 0 {
            let shift = rem.len() - 1 - df;
            for (i, &fc) in f.iter().enumerate() {
                let idx = shift + i;
                rem[idx] = (rem[idx] + lead * ((p - fc % p) % p)) % p;
            }
        }
        rem.pop();
        while rem.len() > df && *rem.last().unwrap() == 0 {
            rem.pop();
        }
    }
    rem.iter().all(|&c| c == 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_modulus_is_x() {
        let f = Field::new(2, 1).unwrap();
        assert_eq!(f.modulus(), &[0, 1]);
        assert_eq!(f.q(), 2);
    }

    #[test]
    fn gf4_modulus_is_unique_irreducible_quadratic() {
        let f = Field::new(2, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 1]);
        // exhaustive: x^2+x+1 has no roots over GF(2)
        assert!(is_irreducible_over_prime(&[1, 1, 1], 2));
        // and the other three monic quadratics all have roots
        for m in [[0u32, 0, 1], [1, 0, 1], [0, 1, 1]] {
            assert!(!is_irreducible_over_prime(&m, 2), "{m:?}");
        }
    }

    #[test]
    fn gf9_conway_modulus_irreducible() {
        let f = Field::new(3, 2).unwrap();
        assert_eq!(f.modulus(), &[2, 2, 1]); // x^2 + 2x + 2
        assert!(is_irreducible_over_prime(&[2, 2, 1], 3));
    }

    #[test]
    fn embedded_moduli_are_irreducible_and_primitive() {
        for &(p, e, m) in CONWAY {
            assert!(is_irreducible_over_prime(m, p), "GF({p}^{e})");
            let f = Field::new(p, e).unwrap();
            // Conway polynomials are primitive: x (index p) generates GF(q)*.
            let x = f.element(p).unwrap();
            assert_eq!(f.order(x).unwrap(), f.q() - 1, "GF({p}^{e})");
        }
    }

    #[test]
    fn gf4_multiplication() {
        let f = Field::new(2, 2).unwrap();
        // w * w = w + 1 under x^2+x+1
        assert_eq!(f.mul(FieldElement(2), FieldElement(2)), FieldElement(3));
    }

    #[test]
    fn gf3_addition() {
        let f = Field::new(3, 1).unwrap();
        assert_eq!(f.add(FieldElement(2), FieldElement(2)), FieldElement(1));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(Field::new(4, 1), Err(Error::NonPrime(4))));
        assert!(matches!(Field::new(6, 2), Err(Error::NonPrime(6))));
        assert!(matches!(
            Field::new(23, 2),
            Err(Error::UnsupportedField { .. })
        ));
        assert!(matches!(
            Field::new(2, 21),
            Err(Error::FieldTooLarge { .. })
        ));
        let f = Field::new(2, 2).unwrap();
        assert!(f.element(4).is_err());
        assert!(f.inv(FieldElement::ZERO).is_err());
    }

    fn supported_orders_up_to(max: u64) -> Vec<Field> {
        let mut out = Vec::new();
        for q in 2..=max {
            if let Ok((p, e)) = factor_prime_power(q) {
                if e == 1 || CONWAY.iter().any(|&(cp, ce, _)| cp == p && ce == e) {
                    out.push(Field::new(p, e).unwrap());
                }
            }
        }
        out
    }

    #[test]
    fn field_axioms_exhaustive() {
        for f in supported_orders_up_to(64) {
            let q = f.q() as u32;
            let els: Vec<FieldElement> = f.elements().collect();
            for &a in &els {
                assert_eq!(f.add(a, FieldElement::ZERO), a);
                assert_eq!(f.mul(a, FieldElement::ONE), a);
                assert_eq!(f.add(a, f.neg(a)), FieldElement::ZERO);
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElement::ONE);
                }
                for &b in &els {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                }
            }
            // triples: exhaustive for q <= 16, sampled stride above
            let stride = if q <= 16 { 1 } else { (q / 11).max(2) };
            let sampled: Vec<FieldElement> =
                els.iter().copied().step_by(stride as usize).collect();
            for &a in &sampled {
                for &b in &sampled {
                    for &c in &sampled {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(
                            f.mul(a, f.add(b, c)),
                            f.add(f.mul(a, b), f.mul(a, c))
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn multiplicative_group_is_cyclic() {
        for f in supported_orders_up_to(64) {
            let found = f
                .elements()
                .skip(1)
                .any(|a| f.order(a).unwrap() == f.q() - 1);
            assert!(found, "no generator in GF({})", f.q());
        }
    }

    #[test]
    fn large_prime_field_and_gf512() {
        let f = Field::new(65537, 1).unwrap();
        let a = f.element(65536).unwrap();
        assert_eq!(f.mul(a, a), FieldElement(1)); // (-1)^2 = 1
        assert_eq!(f.inv(f.element(2).unwrap()).unwrap(), f.element(32769).unwrap());

        let g = Field::new(2, 9).unwrap();
        assert_eq!(g.q(), 512);
        let x = g.element(2).unwrap();
        assert_eq!(g.order(x).unwrap(), 511);
        for a in [3u64, 77, 500] {
            let a = g.element(a).unwrap();
            assert_eq!(g.mul(a, g.inv(a).unwrap()), FieldElement::ONE);
        }
    }
}

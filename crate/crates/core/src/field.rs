//! Exact arithmetic in GF(p^n).
//!
//! Elements are coefficient vectors of polynomials of degree `< n` over
//! `Z_p`, stored low-to-high. The field is defined by a monic primitive
//! polynomial, so the class of `x` (called `alpha`) generates the
//! multiplicative group.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::is_prime;

/// Largest field order we are willing to construct.
pub const ORDER_CAP: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("field order {p}^{n} exceeds the cap of {cap}")]
    CapExceeded { p: u64, n: u32, cap: u64 },
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("polynomial {0:?} is not a monic polynomial of the field degree with coefficients below p")]
    MalformedPolynomial(Vec<u32>),
    #[error("polynomial {0:?} is not primitive")]
    NotPrimitive(Vec<u32>),
    #[error("element {0:?} does not belong to this field")]
    SpecMismatch(Vec<u32>),
    #[error("zero cannot be raised to a negative power")]
    ZeroToNegativePower,
}

/// Definition of GF(p^n): characteristic, degree and a monic primitive
/// polynomial (`n + 1` coefficients, low-to-high, last one equal to 1).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawFieldSpec")]
pub struct FieldSpec {
    p: u32,
    n: u32,
    poly: Vec<u32>,
}

#[derive(Deserialize)]
struct RawFieldSpec {
    p: u32,
    n: u32,
    poly: Vec<u32>,
}

impl TryFrom<RawFieldSpec> for FieldSpec {
    type Error = FieldError;

    fn try_from(raw: RawFieldSpec) -> Result<Self, FieldError> {
        FieldSpec::new(raw.p, raw.n, raw.poly)
    }
}

impl FieldSpec {
    /// Validates `p`, `n` and the primitivity of `poly`.
    pub fn new(p: u32, n: u32, poly: Vec<u32>) -> Result<Self, FieldError> {
        check_order(p, n)?;
        if poly.len() != n as usize + 1 || poly[n as usize] != 1 || poly.iter().any(|&c| c >= p) {
            return Err(FieldError::MalformedPolynomial(poly));
        }
        if !root_has_full_order(p, n, &poly) {
            return Err(FieldError::NotPrimitive(poly));
        }
        Ok(FieldSpec { p, n, poly })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn poly(&self) -> &[u32] {
        &self.poly
    }

    /// Number of field elements, `p^n`.
    pub fn order(&self) -> u64 {
        (self.p as u64).pow(self.n)
    }
}

fn check_order(p: u32, n: u32) -> Result<u64, FieldError> {
    if !is_prime(p as u64) {
        return Err(FieldError::NonPrime(p as u64));
    }
    if n == 0 {
        return Err(FieldError::ZeroDegree);
    }
    let order = (p as u64)
        .checked_pow(n)
        .filter(|&q| q <= ORDER_CAP)
        .ok_or(FieldError::CapExceeded {
            p: p as u64,
            n,
            cap: ORDER_CAP,
        })?;
    Ok(order)
}

/// True when `x` has multiplicative order exactly `p^n - 1` modulo `poly`.
///
/// A reducible polynomial yields a ring whose unit group is smaller than
/// `p^n - 1`, so this test also certifies irreducibility.
fn root_has_full_order(p: u32, n: u32, poly: &[u32]) -> bool {
    let n = n as usize;
    let p64 = p as u64;
    let group_order = p64.pow(n as u32) - 1;
    if poly[0] == 0 {
        return false;
    }
    let mut state = vec![0u32; n];
    state[0] = 1;
    let one = state.clone();
    for step in 1..=group_order {
        // state <- state * x mod poly
        let top = state[n - 1] as u64;
        for i in (1..n).rev() {
            state[i] = ((state[i - 1] as u64 + p64 * p64 - top * poly[i] as u64) % p64) as u32;
        }
        state[0] = ((p64 * p64 - top * poly[0] as u64) % p64) as u32;
        if state == one {
            return step == group_order;
        }
    }
    false
}

/// Returns the monic primitive polynomial of degree `n` over `Z_p` whose
/// lower coefficients `(c_{n-1}, ..., c_0)` are lexicographically smallest,
/// i.e. the one with the smallest integer encoding `sum c_i p^i`.
pub fn find_primitive_polynomial(p: u32, n: u32) -> Result<FieldSpec, FieldError> {
    let order = check_order(p, n)?;
    for code in 0..order {
        let mut poly = Vec::with_capacity(n as usize + 1);
        let mut rest = code;
        for _ in 0..n {
            poly.push((rest % p as u64) as u32);
            rest /= p as u64;
        }
        poly.push(1);
        if root_has_full_order(p, n, &poly) {
            return Ok(FieldSpec { p, n, poly });
        }
    }
    // Primitive polynomials exist for every prime power.
    unreachable!("no primitive polynomial of degree {n} over Z_{p}")
}

/// Element of GF(p^n) in polynomial representation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldElem {
    pub coeffs: Vec<u32>,
}

impl FieldElem {
    pub fn new(coeffs: Vec<u32>) -> Self {
        FieldElem { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

/// Arithmetic context for one field.
#[derive(Debug, Clone)]
pub struct GaloisField {
    spec: FieldSpec,
}

impl GaloisField {
    pub fn new(spec: FieldSpec) -> Self {
        GaloisField { spec }
    }

    /// Field defined by [`find_primitive_polynomial`].
    pub fn with_order(p: u32, n: u32) -> Result<Self, FieldError> {
        Ok(GaloisField::new(find_primitive_polynomial(p, n)?))
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn order(&self) -> u64 {
        self.spec.order()
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem::new(vec![0; self.spec.n as usize])
    }

    pub fn one(&self) -> FieldElem {
        let mut e = self.zero();
        e.coeffs[0] = 1;
        e
    }

    /// The primitive element, i.e. the class of `x`.
    pub fn alpha(&self) -> FieldElem {
        if self.spec.n == 1 {
            // x = -c_0 in Z_p
            let p = self.spec.p;
            return FieldElem::new(vec![(p - self.spec.poly[0]) % p]);
        }
        let mut e = self.zero();
        e.coeffs[1] = 1;
        e
    }

    fn check(&self, a: &FieldElem) -> Result<(), FieldError> {
        if a.coeffs.len() != self.spec.n as usize || a.coeffs.iter().any(|&c| c >= self.spec.p) {
            return Err(FieldError::SpecMismatch(a.coeffs.clone()));
        }
        Ok(())
    }

    pub fn add(&self, a: &FieldElem, b: &FieldElem) -> Result<FieldElem, FieldError> {
        self.check(a)?;
        self.check(b)?;
        let p = self.spec.p;
        Ok(FieldElem::new(
            a.coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(&x, &y)| (x + y) % p)
                .collect(),
        ))
    }

    /// Schoolbook product followed by reduction modulo the defining polynomial.
    pub fn mul(&self, a: &FieldElem, b: &FieldElem) -> Result<FieldElem, FieldError> {
        self.check(a)?;
        self.check(b)?;
        let n = self.spec.n as usize;
        let p = self.spec.p as u64;
        let mut prod = vec![0u64; 2 * n - 1];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        for deg in (n..2 * n - 1).rev() {
            let lead = prod[deg];
            if lead == 0 {
                continue;
            }
            // subtract lead * x^(deg-n) * poly
            for (k, &c) in self.spec.poly.iter().enumerate() {
                let idx = deg - n + k;
                prod[idx] = (prod[idx] + p * p - lead * c as u64 % p) % p;
            }
        }
        Ok(FieldElem::new(prod[..n].iter().map(|&c| c as u32).collect()))
    }

    /// `base^e`; negative exponents go through the inverse.
    pub fn pow(&self, base: &FieldElem, e: i64) -> Result<FieldElem, FieldError> {
        self.check(base)?;
        if base.is_zero() {
            return match e {
                0 => Ok(self.one()),
                e if e > 0 => Ok(self.zero()),
                _ => Err(FieldError::ZeroToNegativePower),
            };
        }
        let group = self.order() as i64 - 1;
        let mut exp = e.rem_euclid(group) as u64;
        let mut acc = self.one();
        let mut sq = base.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(&acc, &sq)?;
            }
            sq = self.mul(&sq, &sq)?;
            exp >>= 1;
        }
        Ok(acc)
    }

    /// Base-p positional encoding `sum coeffs[i] * p^i`, a bijection onto
    /// `[0, p^n)`.
    pub fn psi(&self, a: &FieldElem) -> u64 {
        let p = self.spec.p as u64;
        a.coeffs.iter().rev().fold(0, |acc, &c| acc * p + c as u64)
    }

    /// Inverse of [`GaloisField::psi`].
    pub fn from_psi(&self, mut v: u64) -> FieldElem {
        let p = self.spec.p as u64;
        let mut coeffs = Vec::with_capacity(self.spec.n as usize);
        for _ in 0..self.spec.n {
            coeffs.push((v % p) as u32);
            v /= p;
        }
        FieldElem::new(coeffs)
    }

    /// `alpha^0, alpha^1, ..., alpha^(p^n - 2)`.
    pub fn powers_of_alpha(&self) -> Vec<FieldElem> {
        let alpha = self.alpha();
        let count = self.order() as usize - 1;
        let mut out = Vec::with_capacity(count);
        let mut cur = self.one();
        for _ in 0..count {
            out.push(cur.clone());
            cur = self.mul(&cur, &alpha).expect("alpha belongs to the field");
        }
        out
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElem> + '_ {
        (0..self.order()).map(|v| self.from_psi(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn elem(c: &[u32]) -> FieldElem {
        FieldElem::new(c.to_vec())
    }

    fn multiplicative_order(gf: &GaloisField, a: &FieldElem) -> u64 {
        let one = gf.one();
        let mut cur = a.clone();
        let mut k = 1;
        while cur != one {
            cur = gf.mul(&cur, a).unwrap();
            k += 1;
        }
        k
    }

    #[test]
    fn gf9_polynomial_is_x2_x_2() {
        let spec = find_primitive_polynomial(3, 2).unwrap();
        assert_eq!(spec.poly(), &[2, 1, 1]);
        let gf = GaloisField::new(spec);
        assert_eq!(multiplicative_order(&gf, &gf.alpha()), 8);
    }

    #[test]
    fn prime_fields() {
        assert_eq!(find_primitive_polynomial(2, 1).unwrap().poly(), &[1, 1]);
        let spec = find_primitive_polynomial(3, 1).unwrap();
        assert_eq!(spec.poly(), &[1, 1]);
        let gf = GaloisField::new(spec);
        assert_eq!(gf.alpha(), elem(&[2]));
        assert_eq!(multiplicative_order(&gf, &gf.alpha()), 2);
        // exhaust x + c: c = 1 is the smallest giving a generator of Z_7^*
        let gf7 = GaloisField::with_order(7, 1).unwrap();
        assert_eq!(multiplicative_order(&gf7, &gf7.alpha()), 6);
        for c in 0..gf7.spec().poly()[0] {
            let root = elem(&[(7 - c) % 7]);
            assert!(root.is_zero() || multiplicative_order(&gf7, &root) < 6);
        }
    }

    #[test]
    fn gf8_matches_x3_x_1() {
        assert_eq!(find_primitive_polynomial(2, 3).unwrap().poly(), &[1, 1, 0, 1]);
    }

    #[test]
    fn errors() {
        assert_eq!(find_primitive_polynomial(4, 2), Err(FieldError::NonPrime(4)));
        assert!(matches!(
            find_primitive_polynomial(2, 21),
            Err(FieldError::CapExceeded { .. })
        ));
        assert!(find_primitive_polynomial(2, 20).is_ok());
        // x^2 + 1 is reducible over Z_2
        assert!(matches!(FieldSpec::new(2, 2, vec![1, 0, 1]), Err(FieldError::NotPrimitive(_))));
        // x^2 + 1 is irreducible over Z_3 but not primitive (root has order 4)
        assert!(matches!(FieldSpec::new(3, 2, vec![1, 0, 1]), Err(FieldError::NotPrimitive(_))));
        let gf = GaloisField::with_order(3, 2).unwrap();
        assert!(matches!(gf.add(&elem(&[1]), &elem(&[1, 1])), Err(FieldError::SpecMismatch(_))));
        assert!(matches!(gf.add(&elem(&[3, 0]), &elem(&[1, 1])), Err(FieldError::SpecMismatch(_))));
        assert_eq!(gf.pow(&gf.zero(), -1), Err(FieldError::ZeroToNegativePower));
    }

    #[test]
    fn addition() {
        let gf = GaloisField::with_order(3, 2).unwrap();
        assert_eq!(gf.add(&elem(&[1, 0]), &elem(&[2, 0])).unwrap(), elem(&[0, 0]));
        assert_eq!(gf.add(&elem(&[1, 2]), &elem(&[1, 1])).unwrap(), elem(&[2, 0]));
        let gf8 = GaloisField::with_order(2, 3).unwrap();
        for a in gf8.elements() {
            assert!(gf8.add(&a, &a).unwrap().is_zero());
        }
    }

    #[test]
    fn powers() {
        let gf = GaloisField::with_order(3, 2).unwrap();
        let alpha = gf.alpha();
        assert_eq!(gf.pow(&alpha, 0).unwrap(), gf.one());
        // alpha^2 = -alpha - 2 = 2 alpha + 1
        assert_eq!(gf.pow(&alpha, 2).unwrap(), elem(&[1, 2]));
        assert_eq!(gf.pow(&alpha, 8).unwrap(), gf.one());
        let inv = gf.pow(&alpha, -1).unwrap();
        assert_eq!(gf.mul(&inv, &alpha).unwrap(), gf.one());
    }

    #[test]
    fn psi_encoding() {
        let gf = GaloisField::with_order(3, 2).unwrap();
        assert_eq!(gf.psi(&elem(&[0, 0])), 0);
        assert_eq!(gf.psi(&elem(&[2, 1])), 5);
        let images: HashSet<u64> = gf.elements().map(|e| gf.psi(&e)).collect();
        assert_eq!(images.len(), 9);
        assert!(images.iter().all(|&v| v < 9));
    }

    #[test]
    fn alpha_powers_are_distinct() {
        for (p, n) in [(2, 1), (2, 4), (3, 3), (5, 2), (7, 2), (2, 6), (13, 1)] {
            let gf = GaloisField::with_order(p, n).unwrap();
            let powers = gf.powers_of_alpha();
            let set: HashSet<_> = powers.iter().cloned().collect();
            assert_eq!(set.len() as u64, gf.order() - 1, "GF({p}^{n})");
            assert!(!set.contains(&gf.zero()));
        }
    }

    #[test]
    fn spec_json() {
        let spec = find_primitive_polynomial(3, 2).unwrap();
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(json, r#"{"p":3,"n":2,"poly":[2,1,1]}"#);
        let back: FieldSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
        assert!(serde_json::from_str::<FieldSpec>(r#"{"p":3,"n":2,"poly":[1,0,1]}"#).is_err());
    }
}

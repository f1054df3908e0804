//! Exact scalar arithmetic for every base field used by this crate:
//! prime fields GF(p), extension fields GF(p^k) with k <= 3 presented by a
//! fixed monic irreducible modulus, and arbitrary-precision rationals.
//!
//! Finite fields are backed by full operation tables built once per field,
//! so element arithmetic is a table lookup. Elements are enumerated with
//! zero first, ordered by coefficient vector (most significant coefficient
//! first); for prime fields this is residue order.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Default cap on the order of a constructible finite field. Exhaustive
/// verification stays cheap below this bound; callers may raise it.
pub const DEFAULT_MAX_ORDER: u64 = 13;

/// Hard cap imposed by the table representation.
const HARD_MAX_ORDER: u64 = 64;

/// Fixed monic irreducible moduli (constant term first, leading 1 last)
/// so that extension fields are reproducible across runs and machines.
const FIXED_MODULI: &[(u64, &[u64])] = &[
    (4, &[1, 1, 1]),     // t^2 + t + 1 over GF(2)
    (8, &[1, 1, 0, 1]),  // t^3 + t + 1 over GF(2)
    (9, &[1, 0, 1]),     // t^2 + 1 over GF(3)
    (25, &[2, 0, 1]),    // t^2 + 2 over GF(5)
    (27, &[1, 2, 0, 1]), // t^3 + 2t + 1 over GF(3)
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldKind {
    Prime,
    Extension,
    Rational,
}

/// Description of a field: enough to reconstruct it exactly.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    kind: FieldKind,
    /// Characteristic; 0 for the rationals.
    p: u64,
    /// Extension degree over the prime field (1 unless `kind` is Extension).
    k: u32,
    /// Monic modulus, constant term first; empty unless `kind` is Extension.
    modulus: Vec<u64>,
}

impl FieldSpec {
    pub fn prime(p: u64) -> FieldSpec {
        FieldSpec { kind: FieldKind::Prime, p, k: 1, modulus: Vec::new() }
    }

    /// Extension field GF(p^k) where `modulus` lists coefficients constant
    /// term first and must be monic of degree k.
    pub fn extension(p: u64, modulus: Vec<u64>) -> FieldSpec {
        let k = modulus.len().saturating_sub(1) as u32;
        FieldSpec { kind: FieldKind::Extension, p, k, modulus }
    }

    pub fn rational() -> FieldSpec {
        FieldSpec { kind: FieldKind::Rational, p: 0, k: 1, modulus: Vec::new() }
    }

    /// GF(q) by order, using the fixed modulus table for prime powers.
    pub fn from_order(q: u64) -> Result<FieldSpec> {
        if q < 2 {
            return Err(Error::UnknownField(format!("q{q}")));
        }
        if is_prime(q) {
            return Ok(FieldSpec::prime(q));
        }
        for (order, modulus) in FIXED_MODULI {
            if *order == q {
                let p = smallest_prime_factor(q);
                return Ok(FieldSpec::extension(p, modulus.to_vec()));
            }
        }
        Err(Error::UnknownField(format!("q{q}")))
    }

    /// Parses "q2".."q13" (any supported prime power) and "rational".
    pub fn parse(name: &str) -> Result<FieldSpec> {
        if name == "rational" {
            return Ok(FieldSpec::rational());
        }
        let digits = name
            .strip_prefix('q')
            .ok_or_else(|| Error::UnknownField(name.to_string()))?;
        let q: u64 = digits
            .parse()
            .map_err(|_| Error::UnknownField(name.to_string()))?;
        FieldSpec::from_order(q)
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// Field order, None for the rationals.
    pub fn order(&self) -> Option<u64> {
        match self.kind {
            FieldKind::Rational => None,
            _ => Some(self.p.pow(self.k)),
        }
    }

    pub fn name(&self) -> String {
        match self.order() {
            Some(q) => format!("q{q}"),
            None => "rational".to_string(),
        }
    }
}

struct FieldRepr {
    spec: FieldSpec,
    tables: Option<Tables>,
}

struct Tables {
    q: usize,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    /// inv[0] is a dead slot; inversion of zero is rejected before lookup.
    inv: Vec<u8>,
}

/// A field handle. Cheap to clone; element arithmetic for finite fields is
/// a table lookup through this handle.
#[derive(Clone)]
pub struct Field(Arc<FieldRepr>);

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field({})", self.spec().name())
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.spec() == other.spec()
    }
}

impl Eq for Field {}

impl Hash for Field {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.spec().hash(state);
    }
}

impl Field {
    pub fn new(spec: FieldSpec) -> Result<Field> {
        Field::with_max_order(spec, DEFAULT_MAX_ORDER)
    }

    /// Builds the field, enforcing `order <= max_order` for finite fields.
    pub fn with_max_order(spec: FieldSpec, max_order: u64) -> Result<Field> {
        match spec.kind {
            FieldKind::Rational => Ok(Field(Arc::new(FieldRepr { spec, tables: None }))),
            FieldKind::Prime => {
                if !is_prime(spec.p) {
                    return Err(Error::NotPrime(spec.p));
                }
                check_order(spec.p, max_order)?;
                let tables = Tables::build(&spec);
                Ok(Field(Arc::new(FieldRepr { spec, tables: Some(tables) })))
            }
            FieldKind::Extension => {
                if !is_prime(spec.p) {
                    return Err(Error::NotPrime(spec.p));
                }
                validate_modulus(&spec)?;
                check_order(spec.order().unwrap(), max_order)?;
                let tables = Tables::build(&spec);
                Ok(Field(Arc::new(FieldRepr { spec, tables: Some(tables) })))
            }
        }
    }

    /// Shorthand: GF(q) with the fixed modulus table and default bound.
    pub fn gf(q: u64) -> Result<Field> {
        Field::new(FieldSpec::from_order(q)?)
    }

    pub fn rationals() -> Field {
        Field::new(FieldSpec::rational()).expect("rational field always constructible")
    }

    pub fn parse(name: &str) -> Result<Field> {
        Field::new(FieldSpec::parse(name)?)
    }

    pub fn parse_with_max_order(name: &str, max_order: u64) -> Result<Field> {
        Field::with_max_order(FieldSpec::parse(name)?, max_order)
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.0.spec
    }

    pub fn order(&self) -> Option<u64> {
        self.spec().order()
    }

    pub fn characteristic(&self) -> u64 {
        self.spec().characteristic()
    }

    pub fn is_finite(&self) -> bool {
        self.spec().kind != FieldKind::Rational
    }

    pub fn name(&self) -> String {
        self.spec().name()
    }

    pub fn zero(&self) -> FieldElement {
        match self.spec().kind {
            FieldKind::Rational => FieldElement {
                field: self.clone(),
                value: Value::Rational(Box::new(BigRational::zero())),
            },
            _ => FieldElement { field: self.clone(), value: Value::Finite(0) },
        }
    }

    pub fn one(&self) -> FieldElement {
        self.from_int(1)
    }

    /// The image of the integer i under the canonical ring map.
    pub fn from_int(&self, i: i64) -> FieldElement {
        match self.spec().kind {
            FieldKind::Rational => FieldElement {
                field: self.clone(),
                value: Value::Rational(Box::new(BigRational::from_integer(BigInt::from(i)))),
            },
            _ => {
                let p = self.characteristic() as i64;
                let r = i.rem_euclid(p) as u64;
                // Prime-field residues embed as constant coefficient vectors,
                // which is index r in either representation.
                FieldElement { field: self.clone(), value: Value::Finite(r as u8) }
            }
        }
    }

    /// Exact rational n/d.
    pub fn rational(&self, n: i64, d: i64) -> Result<FieldElement> {
        if self.spec().kind != FieldKind::Rational {
            return Err(Error::UnsupportedField(self.name()));
        }
        if d == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(FieldElement {
            field: self.clone(),
            value: Value::Rational(Box::new(BigRational::new(BigInt::from(n), BigInt::from(d)))),
        })
    }

    /// Wraps an already-reduced rational value. Callers must be on the
    /// rational field.
    pub(crate) fn from_big_rational(&self, r: BigRational) -> FieldElement {
        debug_assert_eq!(self.spec().kind, FieldKind::Rational);
        FieldElement { field: self.clone(), value: Value::Rational(Box::new(r)) }
    }

    /// Extension element from coefficients, constant term first.
    pub fn from_coeffs(&self, coeffs: &[i64]) -> Result<FieldElement> {
        if !self.is_finite() {
            return Err(Error::UnsupportedField(self.name()));
        }
        let k = self.spec().degree() as usize;
        if coeffs.len() > k {
            return Err(Error::DegenerateInput(format!(
                "{} coefficients for a degree-{k} extension",
                coeffs.len()
            )));
        }
        let p = self.characteristic() as i64;
        let mut idx = 0u64;
        for (i, c) in coeffs.iter().enumerate() {
            idx += (c.rem_euclid(p) as u64) * self.characteristic().pow(i as u32);
        }
        Ok(FieldElement { field: self.clone(), value: Value::Finite(idx as u8) })
    }

    /// Element with the given enumeration index.
    pub fn nth(&self, idx: u64) -> Result<FieldElement> {
        let q = self
            .order()
            .ok_or_else(|| Error::InfiniteField(self.name()))?;
        if idx >= q {
            return Err(Error::DegenerateInput(format!("element index {idx} >= order {q}")));
        }
        Ok(FieldElement { field: self.clone(), value: Value::Finite(idx as u8) })
    }

    /// All field elements, zero first, in the canonical order.
    pub fn elements(&self) -> Result<Vec<FieldElement>> {
        let q = self
            .order()
            .ok_or_else(|| Error::InfiniteField(self.name()))?;
        Ok((0..q)
            .map(|i| FieldElement { field: self.clone(), value: Value::Finite(i as u8) })
            .collect())
    }

    /// Nonzero field elements in the canonical order.
    pub fn nonzero_elements(&self) -> Result<Vec<FieldElement>> {
        let mut v = self.elements()?;
        v.remove(0);
        Ok(v)
    }

    fn tables(&self) -> &Tables {
        self.0
            .tables
            .as_ref()
            .expect("finite-field operation on rational field")
    }

    pub(crate) fn add_idx(&self, a: u8, b: u8) -> u8 {
        let t = self.tables();
        t.add[a as usize * t.q + b as usize]
    }

    pub(crate) fn mul_idx(&self, a: u8, b: u8) -> u8 {
        let t = self.tables();
        t.mul[a as usize * t.q + b as usize]
    }

    pub(crate) fn neg_idx(&self, a: u8) -> u8 {
        self.tables().neg[a as usize]
    }

    pub(crate) fn inv_idx(&self, a: u8) -> u8 {
        debug_assert!(a != 0);
        self.tables().inv[a as usize]
    }

    pub(crate) fn raw_tables(&self) -> (&[u8], &[u8], &[u8], &[u8]) {
        let t = self.tables();
        (&t.add, &t.mul, &t.neg, &t.inv)
    }
}

fn check_order(q: u64, max_order: u64) -> Result<()> {
    let bound = max_order.min(HARD_MAX_ORDER);
    if q > bound {
        return Err(Error::FieldTooLarge { order: q, bound });
    }
    Ok(())
}

fn validate_modulus(spec: &FieldSpec) -> Result<()> {
    let k = spec.k;
    let p = spec.p;
    let m = &spec.modulus;
    if !(2..=3).contains(&k) || m.len() != k as usize + 1 {
        return Err(Error::BadModulus {
            expected: k,
            detail: format!("degree must be 2 or 3, got coefficient count {}", m.len()),
        });
    }
    if m[k as usize] % p != 1 {
        return Err(Error::BadModulus { expected: k, detail: "not monic".to_string() });
    }
    // Degree 2 or 3: reducible over GF(p) iff it has a root there.
    for r in 0..p {
        let mut val = 0u64;
        let mut rpow = 1u64;
        for &c in m.iter() {
            val = (val + (c % p) * rpow) % p;
            rpow = (rpow * r) % p;
        }
        if val == 0 {
            return Err(Error::BadModulus {
                expected: k,
                detail: format!("has root {r} mod {p}"),
            });
        }
    }
    Ok(())
}

impl Tables {
    fn build(spec: &FieldSpec) -> Tables {
        let p = spec.p;
        let k = spec.k as usize;
        let q = p.pow(spec.k) as usize;
        let idx_to_vec = |i: usize| -> Vec<u64> {
            let mut v = vec![0u64; k];
            let mut rest = i as u64;
            for slot in v.iter_mut() {
                *slot = rest % p;
                rest /= p;
            }
            v
        };
        let vec_to_idx = |v: &[u64]| -> usize {
            let mut idx = 0u64;
            for (i, &c) in v.iter().enumerate() {
                idx += (c % p) * p.pow(i as u32);
            }
            idx as usize
        };
        let mut add = vec![0u8; q * q];
        let mut mul = vec![0u8; q * q];
        for a in 0..q {
            let va = idx_to_vec(a);
            for b in 0..q {
                let vb = idx_to_vec(b);
                let mut sum = vec![0u64; k];
                for i in 0..k {
                    sum[i] = (va[i] + vb[i]) % p;
                }
                add[a * q + b] = vec_to_idx(&sum) as u8;
                let prod = poly_mul_mod(&va, &vb, &spec.modulus, p, k);
                mul[a * q + b] = vec_to_idx(&prod) as u8;
            }
        }
        let mut neg = vec![0u8; q];
        let mut inv = vec![0u8; q];
        for a in 0..q {
            for b in 0..q {
                if add[a * q + b] == 0 {
                    neg[a] = b as u8;
                }
                if a != 0 && mul[a * q + b] == 1 {
                    inv[a] = b as u8;
                }
            }
        }
        Tables { q, add, mul, neg, inv }
    }
}

/// Multiplies two coefficient vectors over GF(p) and reduces by the monic
/// modulus (long division). For k = 1 the modulus is empty and reduction
/// is plain arithmetic mod p.
fn poly_mul_mod(a: &[u64], b: &[u64], modulus: &[u64], p: u64, k: usize) -> Vec<u64> {
    let mut prod = vec![0u64; 2 * k - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + ai * bj) % p;
        }
    }
    if k == 1 {
        return prod;
    }
    // Monic long division: cancel leading terms from the top down.
    for top in (k..prod.len()).rev() {
        let coeff = prod[top];
        if coeff == 0 {
            continue;
        }
        prod[top] = 0;
        let shift = top - k;
        for (i, &mc) in modulus.iter().enumerate().take(k) {
            let pos = shift + i;
            prod[pos] = (prod[pos] + p * p - (coeff * (mc % p)) % p) % p;
        }
    }
    prod.truncate(k);
    prod
}

#[derive(Debug, Clone)]
enum Value {
    Finite(u8),
    Rational(Box<BigRational>),
}

/// An element of a specific field. Arithmetic via operators panics on
/// mixed-field operands (a programming error); the `checked_*` methods
/// and `div`/`inv` report `Error` values instead.
#[derive(Clone)]
pub struct FieldElement {
    field: Field,
    value: Value,
}

impl FieldElement {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        match &self.value {
            Value::Finite(i) => *i == 0,
            Value::Rational(r) => r.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.value {
            Value::Finite(i) => *i == 1,
            Value::Rational(r) => r.is_one(),
        }
    }

    /// Enumeration index for finite-field elements.
    pub fn index(&self) -> Option<u64> {
        match &self.value {
            Value::Finite(i) => Some(*i as u64),
            Value::Rational(_) => None,
        }
    }

    pub(crate) fn idx(&self) -> u8 {
        match &self.value {
            Value::Finite(i) => *i,
            Value::Rational(_) => panic!("index of a rational element"),
        }
    }

    pub(crate) fn from_idx(field: &Field, idx: u8) -> FieldElement {
        FieldElement { field: field.clone(), value: Value::Finite(idx) }
    }

    pub fn rational_value(&self) -> Option<&BigRational> {
        match &self.value {
            Value::Rational(r) => Some(r),
            Value::Finite(_) => None,
        }
    }

    /// Coefficient vector over the prime field, constant term first.
    pub fn coeffs(&self) -> Option<Vec<u64>> {
        match &self.value {
            Value::Finite(i) => {
                let p = self.field.characteristic();
                let k = self.field.spec().degree() as usize;
                let mut v = vec![0u64; k];
                let mut rest = *i as u64;
                for slot in v.iter_mut() {
                    *slot = rest % p;
                    rest /= p;
                }
                Some(v)
            }
            Value::Rational(_) => None,
        }
    }

    fn same_field(&self, other: &FieldElement) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::MixedFields(self.field.name(), other.field.name()))
        }
    }

    pub fn checked_add(&self, other: &FieldElement) -> Result<FieldElement> {
        self.same_field(other)?;
        Ok(match (&self.value, &other.value) {
            (Value::Finite(a), Value::Finite(b)) => {
                FieldElement::from_idx(&self.field, self.field.add_idx(*a, *b))
            }
            (Value::Rational(a), Value::Rational(b)) => FieldElement {
                field: self.field.clone(),
                value: Value::Rational(Box::new(a.as_ref() + b.as_ref())),
            },
            _ => unreachable!("value kind always matches field kind"),
        })
    }

    pub fn checked_sub(&self, other: &FieldElement) -> Result<FieldElement> {
        self.checked_add(&other.checked_neg())
    }

    pub fn checked_mul(&self, other: &FieldElement) -> Result<FieldElement> {
        self.same_field(other)?;
        Ok(match (&self.value, &other.value) {
            (Value::Finite(a), Value::Finite(b)) => {
                FieldElement::from_idx(&self.field, self.field.mul_idx(*a, *b))
            }
            (Value::Rational(a), Value::Rational(b)) => FieldElement {
                field: self.field.clone(),
                value: Value::Rational(Box::new(a.as_ref() * b.as_ref())),
            },
            _ => unreachable!("value kind always matches field kind"),
        })
    }

    pub fn checked_neg(&self) -> FieldElement {
        match &self.value {
            Value::Finite(a) => FieldElement::from_idx(&self.field, self.field.neg_idx(*a)),
            Value::Rational(r) => FieldElement {
                field: self.field.clone(),
                value: Value::Rational(Box::new(-r.as_ref())),
            },
        }
    }

    pub fn inv(&self) -> Result<FieldElement> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match &self.value {
            Value::Finite(a) => FieldElement::from_idx(&self.field, self.field.inv_idx(*a)),
            Value::Rational(r) => FieldElement {
                field: self.field.clone(),
                value: Value::Rational(Box::new(r.recip())),
            },
        })
    }

    pub fn div(&self, other: &FieldElement) -> Result<FieldElement> {
        self.same_field(other)?;
        self.checked_mul(&other.inv()?)
    }

    /// Nonnegative integer power.
    pub fn pow(&self, mut e: u64) -> FieldElement {
        let mut base = self.clone();
        let mut acc = self.field.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// The i-th Frobenius power a^(p^i); requires 0 <= i < k. Rejected on
    /// the rationals, whose only automorphism is trivial.
    pub fn frobenius(&self, i: u32) -> Result<FieldElement> {
        if !self.field.is_finite() {
            return Err(Error::UnsupportedField(self.field.name()));
        }
        let k = self.field.spec().degree();
        if i >= k {
            return Err(Error::DegenerateInput(format!(
                "frobenius index {i} outside 0..{k}"
            )));
        }
        let p = self.field.characteristic();
        Ok(self.pow(p.pow(i)))
    }
}

/// All square roots of d, sorted in the canonical element order. For finite
/// fields this is an exhaustive scan (fields here are tiny); for rationals
/// an exact integer square-root test on numerator and denominator.
pub fn square_roots(d: &FieldElement) -> Vec<FieldElement> {
    let field = d.field();
    if field.is_finite() {
        let mut out: Vec<FieldElement> = field
            .elements()
            .expect("finite")
            .into_iter()
            .filter(|c| &(c * c) == d)
            .collect();
        out.sort();
        return out;
    }
    let r = d.rational_value().expect("rational field element");
    if r.is_negative() {
        return Vec::new();
    }
    if r.is_zero() {
        return vec![field.zero()];
    }
    let num = r.numer().magnitude();
    let den = r.denom().magnitude();
    let sn = num.sqrt();
    let sd = den.sqrt();
    if &(&sn * &sn) == num && &(&sd * &sd) == den {
        let root = BigRational::new(BigInt::from(sn), BigInt::from(sd));
        let neg = FieldElement {
            field: field.clone(),
            value: Value::Rational(Box::new(-root.clone())),
        };
        let pos = FieldElement { field: field.clone(), value: Value::Rational(Box::new(root)) };
        vec![neg, pos]
    } else {
        Vec::new()
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        if self.field != other.field {
            return false;
        }
        match (&self.value, &other.value) {
            (Value::Finite(a), Value::Finite(b)) => a == b,
            (Value::Rational(a), Value::Rational(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for FieldElement {}

impl PartialOrd for FieldElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FieldElement {
    fn cmp(&self, other: &Self) -> Ordering {
        let key = |e: &FieldElement| {
            let s = e.field.spec();
            (s.kind(), s.characteristic(), s.degree(), s.modulus().to_vec())
        };
        key(self).cmp(&key(other)).then_with(|| match (&self.value, &other.value) {
            (Value::Finite(a), Value::Finite(b)) => a.cmp(b),
            (Value::Rational(a), Value::Rational(b)) => a.cmp(b),
            (Value::Finite(_), Value::Rational(_)) => Ordering::Less,
            (Value::Rational(_), Value::Finite(_)) => Ordering::Greater,
        })
    }
}

impl Hash for FieldElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.value {
            Value::Finite(i) => {
                state.write_u8(0);
                state.write_u8(*i);
            }
            Value::Rational(r) => {
                state.write_u8(1);
                r.hash(state);
            }
        }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.value {
            Value::Rational(r) => write!(f, "{r}"),
            Value::Finite(_) => {
                let coeffs = self.coeffs().unwrap();
                if coeffs.iter().all(|&c| c == 0) {
                    return write!(f, "0");
                }
                let mut parts: Vec<String> = Vec::new();
                for (i, &c) in coeffs.iter().enumerate().rev() {
                    if c == 0 {
                        continue;
                    }
                    let part = match i {
                        0 => format!("{c}"),
                        1 if c == 1 => "t".to_string(),
                        1 => format!("{c}t"),
                        _ if c == 1 => format!("t^{i}"),
                        _ => format!("{c}t^{i}"),
                    };
                    parts.push(part);
                }
                write!(f, "{}", parts.join("+"))
            }
        }
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self, self.field.name())
    }
}

macro_rules! bin_op {
    ($trait:ident, $fn:ident, $checked:ident) => {
        impl std::ops::$trait for &FieldElement {
            type Output = FieldElement;
            fn $fn(self, rhs: &FieldElement) -> FieldElement {
                self.$checked(rhs).expect("mixed-field arithmetic")
            }
        }
        impl std::ops::$trait for FieldElement {
            type Output = FieldElement;
            fn $fn(self, rhs: FieldElement) -> FieldElement {
                (&self).$checked(&rhs).expect("mixed-field arithmetic")
            }
        }
    };
}

bin_op!(Add, add, checked_add);
bin_op!(Sub, sub, checked_sub);
bin_op!(Mul, mul, checked_mul);

impl std::ops::Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.checked_neg()
    }
}

impl std::ops::Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.checked_neg()
    }
}

/// K together with a single point at infinity. The only arithmetic the
/// geometry needs on the extended scalar is 1 - x with 1 - inf = inf;
/// everything else stays in K.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtendedScalar {
    Finite(FieldElement),
    Infinity,
}

impl ExtendedScalar {
    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtendedScalar::Infinity)
    }

    pub fn finite(&self) -> Option<&FieldElement> {
        match self {
            ExtendedScalar::Finite(x) => Some(x),
            ExtendedScalar::Infinity => None,
        }
    }

    pub fn one_minus(&self) -> ExtendedScalar {
        match self {
            ExtendedScalar::Infinity => ExtendedScalar::Infinity,
            ExtendedScalar::Finite(x) => ExtendedScalar::Finite(x.field().one() - x.clone()),
        }
    }
}

impl fmt::Display for ExtendedScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedScalar::Finite(x) => write!(f, "{x}"),
            ExtendedScalar::Infinity => write!(f, "inf"),
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn smallest_prime_factor(n: u64) -> u64 {
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return d;
        }
        d += 1;
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_orders() -> Vec<u64> {
        vec![2, 3, 4, 5, 7, 8, 9, 11, 13]
    }

    /// Independent reduction oracle: schoolbook polynomial multiplication
    /// over GF(p) followed by long division by the modulus, written without
    /// reference to the table builder.
    fn oracle_mul(a: &[u64], b: &[u64], modulus: &[u64], p: u64) -> Vec<u64> {
        let k = modulus.len() - 1;
        let mut prod = vec![0u64; a.len() + b.len()];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        while prod.len() > k {
            let top = prod.len() - 1;
            let c = prod[top];
            if c != 0 {
                for i in 0..k {
                    let pos = top - k + i;
                    let sub = (c * modulus[i]) % p;
                    prod[pos] = (prod[pos] + p - sub) % p;
                }
            }
            prod.pop();
        }
        prod.resize(k, 0);
        prod
    }

    #[test]
    fn gf4_t_times_t_is_t_plus_one() {
        let f = Field::gf(4).unwrap();
        let t = f.from_coeffs(&[0, 1]).unwrap();
        let expected = f.from_coeffs(&[1, 1]).unwrap();
        assert_eq!(&t * &t, expected);
        // Oracle agreement for this specific case.
        let reduced = oracle_mul(&[0, 1], &[0, 1], &[1, 1, 1], 2);
        assert_eq!(reduced, vec![1, 1]);
    }

    #[test]
    fn extension_multiplication_matches_polynomial_oracle() {
        for q in [4u64, 8, 9, 25, 27] {
            let spec = FieldSpec::from_order(q).unwrap();
            let field = Field::with_max_order(spec.clone(), 27).unwrap();
            let p = spec.characteristic();
            for a in field.elements().unwrap() {
                for b in field.elements().unwrap() {
                    let got = (&a * &b).coeffs().unwrap();
                    let want = oracle_mul(
                        &a.coeffs().unwrap(),
                        &b.coeffs().unwrap(),
                        spec.modulus(),
                        p,
                    );
                    assert_eq!(got, want, "q={q} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn field_axioms_hold_exhaustively() {
        for q in all_orders() {
            let f = Field::gf(q).unwrap();
            let elems = f.elements().unwrap();
            let zero = f.zero();
            let one = f.one();
            for a in &elems {
                assert_eq!(&(a + &zero), a);
                assert_eq!(&(a * &one), a);
                assert!((a + &a.checked_neg()).is_zero());
                if !a.is_zero() {
                    assert!((a * &a.inv().unwrap()).is_one());
                }
                for b in &elems {
                    assert_eq!(a + b, b + a);
                    assert_eq!(a * b, b * a);
                    for c in &elems {
                        assert_eq!(&(a + b) + c, a + &(b + c));
                        assert_eq!(&(a * b) * c, a * &(b * c));
                        assert_eq!(a * &(b + c), &(a * b) + &(a * c));
                    }
                }
            }
        }
    }

    #[test]
    fn square_roots_match_exhaustive_squaring() {
        for q in all_orders() {
            let f = Field::gf(q).unwrap();
            for d in f.elements().unwrap() {
                // Oracle: collect square roots by scanning squares directly.
                let mut expected: Vec<FieldElement> = f
                    .elements()
                    .unwrap()
                    .into_iter()
                    .filter(|c| c.pow(2) == d)
                    .collect();
                expected.sort();
                assert_eq!(square_roots(&d), expected, "q={q} d={d}");
            }
        }
    }

    #[test]
    fn square_root_examples() {
        let f5 = Field::gf(5).unwrap();
        let roots = square_roots(&f5.from_int(4));
        assert_eq!(roots, vec![f5.from_int(2), f5.from_int(3)]);
        let f3 = Field::gf(3).unwrap();
        assert!(square_roots(&f3.from_int(2)).is_empty());

        let q = Field::rationals();
        let r = square_roots(&q.rational(4, 9).unwrap());
        assert_eq!(r, vec![q.rational(-2, 3).unwrap(), q.rational(2, 3).unwrap()]);
        assert!(square_roots(&q.rational(2, 1).unwrap()).is_empty());
        assert!(square_roots(&q.rational(-4, 1).unwrap()).is_empty());
        assert_eq!(square_roots(&q.zero()), vec![q.zero()]);
    }

    #[test]
    fn rational_arithmetic_is_exact_and_canonical() {
        let q = Field::rationals();
        let a = q.rational(2, 3).unwrap();
        let b = q.rational(1, 6).unwrap();
        assert_eq!(&a + &b, q.rational(5, 6).unwrap());
        assert_eq!(q.rational(2, -4).unwrap(), q.rational(-1, 2).unwrap());
        assert_eq!(format!("{}", q.rational(2, -4).unwrap()), "-1/2");
        assert_eq!(a.div(&q.zero()), Err(Error::DivisionByZero));
        assert_eq!(q.zero().inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn enumeration_is_deterministic_zero_first() {
        for q in all_orders() {
            let f = Field::gf(q).unwrap();
            let elems = f.elements().unwrap();
            assert_eq!(elems.len() as u64, q);
            assert!(elems[0].is_zero());
            assert!(elems[1].is_one());
            let distinct: std::collections::HashSet<_> = elems.iter().cloned().collect();
            assert_eq!(distinct.len() as u64, q);
        }
        assert!(matches!(
            Field::rationals().elements(),
            Err(Error::InfiniteField(_))
        ));
    }

    #[test]
    fn parse_accepts_q2_through_q13_and_rational() {
        for q in all_orders() {
            let f = Field::parse(&format!("q{q}")).unwrap();
            assert_eq!(f.order(), Some(q));
        }
        assert!(Field::parse("rational").unwrap().order().is_none());
        assert!(matches!(Field::parse("q6"), Err(Error::UnknownField(_))));
        assert!(matches!(Field::parse("q16"), Err(Error::UnknownField(_))));
        assert!(matches!(Field::parse("gf5"), Err(Error::UnknownField(_))));
        // Order bound: 25 and 27 need an explicit raise.
        assert!(matches!(
            Field::parse("q25"),
            Err(Error::FieldTooLarge { order: 25, bound: 13 })
        ));
        assert_eq!(Field::parse_with_max_order("q25", 27).unwrap().order(), Some(25));
        assert_eq!(Field::parse_with_max_order("q27", 27).unwrap().order(), Some(27));
    }

    #[test]
    fn fixed_moduli_are_validated() {
        assert!(Field::new(FieldSpec::extension(2, vec![1, 1, 1])).is_ok());
        // t^2 + 1 is reducible over GF(2): root 1.
        assert!(matches!(
            Field::new(FieldSpec::extension(2, vec![1, 0, 1])),
            Err(Error::BadModulus { .. })
        ));
        assert!(matches!(
            Field::new(FieldSpec::prime(6)),
            Err(Error::NotPrime(6))
        ));
    }

    #[test]
    fn frobenius_is_a_field_automorphism_fixing_the_prime_field() {
        for q in [4u64, 8, 9] {
            let f = Field::gf(q).unwrap();
            let k = f.spec().degree();
            let p = f.characteristic();
            for i in 0..k {
                for a in f.elements().unwrap() {
                    for b in f.elements().unwrap() {
                        let fa = a.frobenius(i).unwrap();
                        let fb = b.frobenius(i).unwrap();
                        assert_eq!((&a + &b).frobenius(i).unwrap(), &fa + &fb);
                        assert_eq!((&a * &b).frobenius(i).unwrap(), &fa * &fb);
                    }
                }
                for r in 0..p {
                    let e = f.from_int(r as i64);
                    assert_eq!(e.frobenius(i).unwrap(), e);
                }
            }
            // Nontrivial on the full field for i > 0.
            let t = f.from_coeffs(&[0, 1]).unwrap();
            assert_ne!(t.frobenius(1).unwrap(), t);
            assert!(f.one().frobenius(k).is_err());
        }
        let q = Field::rationals();
        assert!(matches!(
            q.one().frobenius(0),
            Err(Error::UnsupportedField(_))
        ));
    }

    #[test]
    fn mixed_field_operations_are_rejected() {
        let f2 = Field::gf(2).unwrap();
        let f3 = Field::gf(3).unwrap();
        assert!(matches!(
            f2.one().checked_add(&f3.one()),
            Err(Error::MixedFields(_, _))
        ));
        assert!(matches!(
            f2.one().div(&f3.one()),
            Err(Error::MixedFields(_, _))
        ));
    }

    #[test]
    fn extended_scalar_one_minus_convention() {
        let f = Field::gf(5).unwrap();
        let x = ExtendedScalar::Finite(f.from_int(3));
        assert_eq!(x.one_minus(), ExtendedScalar::Finite(f.from_int(3)));
        assert_eq!(ExtendedScalar::Infinity.one_minus(), ExtendedScalar::Infinity);
        assert_eq!(format!("{}", ExtendedScalar::Infinity), "inf");
    }

    #[test]
    fn element_display_shapes() {
        let f9 = Field::gf(9).unwrap();
        let t = f9.from_coeffs(&[0, 1]).unwrap();
        let e = f9.from_coeffs(&[2, 1]).unwrap();
        assert_eq!(format!("{t}"), "t");
        assert_eq!(format!("{e}"), "t+2");
        assert_eq!(format!("{}", f9.zero()), "0");
        let f8 = Field::gf(8).unwrap();
        let u = f8.from_coeffs(&[1, 0, 1]).unwrap();
        assert_eq!(format!("{u}"), "t^2+1");
    }

    #[test]
    fn canonical_order_is_total_on_each_field() {
        let f = Field::gf(9).unwrap();
        let mut elems = f.elements().unwrap();
        let sorted = elems.clone();
        elems.reverse();
        elems.sort();
        assert_eq!(elems, sorted);
    }
}

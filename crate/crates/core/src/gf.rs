//! Exact arithmetic in finite fields `F_{p^r}`.
//!
//! A field is described by its characteristic `p`, its degree `r` over the
//! prime field and a monic irreducible modulus of degree `r`. Elements are
//! stored as their coefficient vector in the basis `1, x, ..., x^{r-1}`,
//! packed little-endian into a single integer `c_0 + c_1 p + ... `. The
//! packed integer doubles as the element's position in the canonical
//! enumeration, so prime-subfield elements are exactly the indices `< p`.
//!
//! Multiplication goes through discrete log tables built at construction,
//! prime fields use residue arithmetic directly.

use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};
use thiserror::Error;

/// Largest field built by [`Gf::new`].
pub const DEFAULT_MAX_SIZE: u64 = 200_000;

/// Fields with `size^2` at most this get a full addition table.
const ADD_TABLE_LIMIT: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GfError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field of size {size} exceeds the configured bound {bound}")]
    TooLarge { size: u128, bound: u64 },
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("field is not flagged as a quadratic extension")]
    NotQuadraticExtension,
    #[error("coefficient vector has wrong length or unreduced entries")]
    BadCoefficients,
}

/// A field element, as a packed coefficient index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize)]
pub struct Elem(pub u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

struct Inner {
    p: u32,
    r: u32,
    size: u32,
    /// Monic, little-endian, length `r + 1`.
    modulus: Vec<u32>,
    /// Degree of the declared base subfield when this is `F_{q^2}` over `F_q`.
    base_degree: Option<u32>,
    generator: u32,
    /// `exp[i] = g^i`, doubled so that `exp[log a + log b]` needs no reduction.
    exp: Vec<u32>,
    log: Vec<u32>,
    neg: Vec<u32>,
    add: Option<Vec<u32>>,
}

/// Handle to an immutable finite field. Cloning is cheap.
#[derive(Clone)]
pub struct Gf(Arc<Inner>);

impl PartialEq for Gf {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p
                && self.0.modulus == other.0.modulus
                && self.0.base_degree == other.0.base_degree)
    }
}

impl Eq for Gf {}

impl fmt::Debug for Gf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}; modulus {:?})", self.0.p, self.0.r, self.0.modulus)
    }
}

impl Serialize for Gf {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("Field", 3)?;
        st.serialize_field("p", &self.0.p)?;
        st.serialize_field("r", &self.0.r)?;
        st.serialize_field("modulus", &self.0.modulus)?;
        st.end()
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// Dense polynomial helpers over F_p, little-endian, used only at construction.

fn poly_trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn inv_mod_p(a: u32, p: u32) -> u32 {
    pow_mod(a as u64, (p - 2) as u64, p as u64) as u32
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

/// Remainder of `a` modulo `b` (b nonzero) over F_p.
fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let b = poly_trim(b.to_vec());
    let mut r = poly_trim(a.to_vec());
    let db = b.len() - 1;
    let lead_inv = inv_mod_p(b[db], p) as u64;
    while r.len() > db {
        let dr = r.len() - 1;
        let c = r[dr] as u64 * lead_inv % p as u64;
        let shift = dr - db;
        for (i, &bi) in b.iter().enumerate() {
            let sub = c * bi as u64 % p as u64;
            r[shift + i] = ((r[shift + i] as u64 + p as u64 - sub) % p as u64) as u32;
        }
        r = poly_trim(r);
    }
    r
}

fn digits(mut v: u64, p: u32, len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push((v % p as u64) as u32);
        v /= p as u64;
    }
    out
}

/// Irreducibility over F_p by trial division against every monic polynomial
/// of degree `1..=deg/2`.
fn is_irreducible(f: &[u32], p: u32) -> bool {
    let deg = f.len() - 1;
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for low in 0..count {
            let mut g = digits(low, p, d);
            g.push(1);
            if poly_rem(f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// Lexicographically least monic irreducible of degree `r`: candidates are
/// ordered by the packed value of their lower coefficients.
fn least_irreducible(p: u32, r: u32) -> Vec<u32> {
    if r == 1 {
        return vec![0, 1];
    }
    let count = (p as u64).pow(r);
    for low in 0..count {
        let mut f = digits(low, p, r as usize);
        f.push(1);
        if f[0] != 0 && is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn slow_mul(a: u32, b: u32, p: u32, modulus: &[u32]) -> u32 {
    let r = modulus.len() - 1;
    if r == 1 {
        return ((a as u64 * b as u64) % p as u64) as u32;
    }
    let da = digits(a as u64, p, r);
    let db = digits(b as u64, p, r);
    let mut prod = vec![0u64; 2 * r - 1];
    for (i, &x) in da.iter().enumerate() {
        for (j, &y) in db.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    let prod: Vec<u32> = prod.into_iter().map(|c| c as u32).collect();
    let rem = poly_rem(&prod, modulus, p);
    let mut v = 0u64;
    for (i, &c) in rem.iter().enumerate() {
        v += c as u64 * (p as u64).pow(i as u32);
    }
    v as u32
}

fn slow_pow(a: u32, mut e: u64, p: u32, modulus: &[u32]) -> u32 {
    let mut acc = 1u32;
    let mut base = a;
    while e > 0 {
        if e & 1 == 1 {
            acc = slow_mul(acc, base, p, modulus);
        }
        base = slow_mul(base, base, p, modulus);
        e >>= 1;
    }
    acc
}

fn digit_add(a: u32, b: u32, p: u32, r: u32) -> u32 {
    let (mut a, mut b) = (a, b);
    let mut out = 0u32;
    let mut place = 1u32;
    for _ in 0..r {
        let s = (a % p + b % p) % p;
        out += s * place;
        a /= p;
        b /= p;
        place = place.wrapping_mul(p);
    }
    out
}

fn digit_neg(a: u32, p: u32, r: u32) -> u32 {
    let mut a = a;
    let mut out = 0u32;
    let mut place = 1u32;
    for _ in 0..r {
        let d = a % p;
        out += ((p - d) % p) * place;
        a /= p;
        place = place.wrapping_mul(p);
    }
    out
}

impl Gf {
    /// `F_{p^r}` with the default size bound.
    pub fn new(p: u64, r: u32) -> Result<Gf, GfError> {
        Self::with_bound(p, r, DEFAULT_MAX_SIZE)
    }

    pub fn prime(p: u64) -> Result<Gf, GfError> {
        Self::new(p, 1)
    }

    /// `F_{q^2}` for `q = p^r`, flagged so that [`Gf::conj`] is available.
    pub fn quadratic_extension(p: u64, r: u32) -> Result<Gf, GfError> {
        Self::build(p, 2 * r, DEFAULT_MAX_SIZE, Some(r))
    }

    pub fn with_bound(p: u64, r: u32, bound: u64) -> Result<Gf, GfError> {
        Self::build(p, r, bound, None)
    }

    fn build(p: u64, r: u32, bound: u64, base_degree: Option<u32>) -> Result<Gf, GfError> {
        if !is_prime(p) {
            return Err(GfError::NotPrime(p));
        }
        if r == 0 {
            return Err(GfError::ZeroDegree);
        }
        let size = (p as u128).checked_pow(r).unwrap_or(u128::MAX);
        if size > bound as u128 {
            return Err(GfError::TooLarge { size, bound });
        }
        let p = p as u32;
        let size = size as u32;
        let modulus = least_irreducible(p, r);

        let order = (size - 1) as u64;
        let factors = prime_factors(order);
        let generator = (1..size)
            .find(|&g| factors.iter().all(|&l| slow_pow(g, order / l, p, &modulus) != 1))
            .expect("multiplicative group is cyclic");

        let mut exp = vec![0u32; 2 * (size as usize - 1).max(1)];
        let mut log = vec![0u32; size as usize];
        let mut x = 1u32;
        for i in 0..(size - 1) {
            exp[i as usize] = x;
            log[x as usize] = i;
            x = slow_mul(x, generator, p, &modulus);
        }
        for i in (size - 1)..2 * (size - 1) {
            exp[i as usize] = exp[(i - (size - 1)) as usize];
        }

        let neg = (0..size).map(|a| digit_neg(a, p, r)).collect();
        let add = if (size as u64) * (size as u64) <= ADD_TABLE_LIMIT && r > 1 {
            let mut t = vec![0u32; size as usize * size as usize];
            for a in 0..size {
                for b in 0..size {
                    t[(a * size + b) as usize] = digit_add(a, b, p, r);
                }
            }
            Some(t)
        } else {
            None
        };

        Ok(Gf(Arc::new(Inner {
            p,
            r,
            size,
            modulus,
            base_degree,
            generator,
            exp,
            log,
            neg,
            add,
        })))
    }

    #[inline]
    pub fn characteristic(&self) -> u32 {
        self.0.p
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.0.r
    }

    #[inline]
    pub fn size(&self) -> u32 {
        self.0.size
    }

    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn is_prime_field(&self) -> bool {
        self.0.r == 1
    }

    /// `q` when this field is flagged as `F_{q^2}` over `F_q`.
    pub fn base_size(&self) -> Option<u32> {
        self.0.base_degree.map(|d| self.0.p.pow(d))
    }

    /// The primitive element used for the log tables.
    pub fn generator(&self) -> Elem {
        Elem(self.0.generator)
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        let s = &self.0;
        if s.r == 1 {
            let v = a.0 + b.0;
            return Elem(if v >= s.p { v - s.p } else { v });
        }
        match &s.add {
            Some(t) => Elem(t[(a.0 * s.size + b.0) as usize]),
            None => Elem(digit_add(a.0, b.0, s.p, s.r)),
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        Elem(self.0.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a.0 == 0 || b.0 == 0 {
            return Elem::ZERO;
        }
        let s = &self.0;
        if s.r == 1 {
            return Elem(((a.0 as u64 * b.0 as u64) % s.p as u64) as u32);
        }
        Elem(s.exp[(s.log[a.0 as usize] + s.log[b.0 as usize]) as usize])
    }

    pub fn inv(&self, a: Elem) -> Result<Elem, GfError> {
        if a.is_zero() {
            return Err(GfError::DivisionByZero);
        }
        let s = &self.0;
        let l = s.log[a.0 as usize];
        Ok(Elem(s.exp[((s.size - 1 - l) % (s.size - 1)) as usize]))
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem, GfError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        if e == 0 {
            return Elem::ONE;
        }
        if a.is_zero() {
            return Elem::ZERO;
        }
        let s = &self.0;
        let order = (s.size - 1) as u64;
        let l = (s.log[a.0 as usize] as u64 * (e % order)) % order;
        Elem(s.exp[l as usize])
    }

    /// Discrete log base [`Gf::generator`]; `None` for zero.
    pub fn log(&self, a: Elem) -> Option<u32> {
        (!a.is_zero()).then(|| self.0.log[a.0 as usize])
    }

    /// `a^(p^k)`.
    pub fn frobenius(&self, a: Elem, k: u32) -> Elem {
        let r = self.0.r;
        let e = (self.0.p as u64).pow(k % r);
        self.pow(a, e)
    }

    /// The involution `a -> a^q` of `F_{q^2}` over `F_q`.
    pub fn conj(&self, a: Elem) -> Result<Elem, GfError> {
        let d = self.0.base_degree.ok_or(GfError::NotQuadraticExtension)?;
        Ok(self.frobenius(a, d))
    }

    /// `a * conj(a) = a^(q+1)`.
    pub fn norm(&self, a: Elem) -> Result<Elem, GfError> {
        Ok(self.mul(a, self.conj(a)?))
    }

    /// Residue of an integer in the prime subfield.
    pub fn from_int(&self, v: i64) -> Elem {
        Elem(v.rem_euclid(self.0.p as i64) as u32)
    }

    /// Elements in coefficient-lexicographic order, zero first.
    pub fn elements(&self) -> impl ExactSizeIterator<Item = Elem> {
        (0..self.0.size).map(Elem)
    }

    pub fn nonzero_elements(&self) -> impl ExactSizeIterator<Item = Elem> {
        (1..self.0.size).map(Elem)
    }

    /// Elements of the unique subfield of size `p^d` (`d` must divide `r`).
    pub fn subfield(&self, d: u32) -> Vec<Elem> {
        self.elements().filter(|&a| self.frobenius(a, d) == a).collect()
    }

    /// Little-endian coefficients of `a` in the modulus basis.
    pub fn coefficients(&self, a: Elem) -> Vec<u32> {
        digits(a.0 as u64, self.0.p, self.0.r as usize)
    }

    pub fn from_coefficients(&self, coeffs: &[u32]) -> Result<Elem, GfError> {
        if coeffs.len() != self.0.r as usize || coeffs.iter().any(|&c| c >= self.0.p) {
            return Err(GfError::BadCoefficients);
        }
        let mut v = 0u32;
        for &c in coeffs.iter().rev() {
            v = v * self.0.p + c;
        }
        Ok(Elem(v))
    }

    /// Wrap a raw element into a field-tagged value.
    pub fn element(&self, a: Elem) -> FieldElement {
        FieldElement { field: self.clone(), value: a }
    }

    /// `F_{q^m}` for this field `F_q`, built as a degree `r*m` extension of
    /// the prime field. Only prime-subfield elements embed by index.
    pub fn extension(&self, m: u32, bound: u64) -> Result<Gf, GfError> {
        Gf::with_bound(self.0.p as u64, self.0.r * m, bound)
    }

    pub fn is_prime_subfield_element(&self, a: Elem) -> bool {
        a.0 < self.0.p
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// An element bundled with its field, for checked arithmetic at API
/// boundaries. Inner loops work on bare [`Elem`] values instead.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldElement {
    pub field: Gf,
    pub value: Elem,
}

impl FieldElement {
    pub fn arith(&self, other: &FieldElement, op: ArithOp) -> Result<FieldElement, GfError> {
        if self.field != other.field {
            return Err(GfError::FieldMismatch);
        }
        let f = &self.field;
        let (a, b) = (self.value, other.value);
        let value = match op {
            ArithOp::Add => f.add(a, b),
            ArithOp::Sub => f.sub(a, b),
            ArithOp::Mul => f.mul(a, b),
            ArithOp::Div => f.div(a, b)?,
        };
        Ok(f.element(value))
    }

    pub fn coefficients(&self) -> Vec<u32> {
        self.field.coefficients(self.value)
    }

    pub fn frobenius(&self, k: u32) -> FieldElement {
        self.field.element(self.field.frobenius(self.value, k))
    }

    pub fn conj(&self) -> Result<FieldElement, GfError> {
        Ok(self.field.element(self.field.conj(self.value)?))
    }
}

impl Serialize for FieldElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.coefficients().serialize(serializer)
    }
}

macro_rules! forward_op {
    ($tr:ident, $method:ident, $op:expr) => {
        impl std::ops::$tr for &FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                self.arith(rhs, $op).expect("field arithmetic failed")
            }
        }
    };
}

forward_op!(Add, add, ArithOp::Add);
forward_op!(Sub, sub, ArithOp::Sub);
forward_op!(Mul, mul, ArithOp::Mul);
forward_op!(Div, div, ArithOp::Div);

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_irreducible_quadratics(p: u32) -> Vec<Vec<u32>> {
        // monic x^2 + b x + c without roots in F_p
        let mut out = Vec::new();
        for b in 0..p {
            for c in 0..p {
                let has_root = (0..p).any(|x| (x * x + b * x + c) % p == 0);
                if !has_root {
                    out.push(vec![c, b, 1]);
                }
            }
        }
        out.sort_by_key(|f| f[0] + p * f[1]);
        out
    }

    #[test]
    fn prime_field_basics() {
        let f7 = Gf::new(7, 1).unwrap();
        assert_eq!(f7.modulus(), &[0, 1]);
        assert_eq!(f7.mul(Elem(2), Elem(4)), Elem(1));
        let f2 = Gf::prime(2).unwrap();
        assert_eq!(f2.add(Elem(1), Elem(1)), Elem(0));
        assert_eq!(f7.elements().count(), 7);
    }

    #[test]
    fn modulus_is_least_irreducible() {
        let f9 = Gf::new(3, 2).unwrap();
        let oracle = brute_irreducible_quadratics(3);
        assert_eq!(f9.modulus(), oracle[0].as_slice());
        assert_eq!(f9.modulus(), &[1, 0, 1]);
        let f49 = Gf::new(7, 2).unwrap();
        assert_eq!(f49.modulus(), brute_irreducible_quadratics(7)[0].as_slice());
    }

    #[test]
    fn construction_errors() {
        assert_eq!(Gf::new(4, 1).unwrap_err(), GfError::NotPrime(4));
        assert_eq!(Gf::new(7, 0).unwrap_err(), GfError::ZeroDegree);
        assert!(matches!(Gf::new(2, 40), Err(GfError::TooLarge { .. })));
        assert!(Gf::with_bound(7, 3, 100).is_err());
    }

    #[test]
    fn inverses_in_f9() {
        let f = Gf::new(3, 2).unwrap();
        for a in f.nonzero_elements() {
            assert_eq!(f.mul(a, f.inv(a).unwrap()), Elem::ONE);
        }
        assert_eq!(f.inv(Elem::ZERO), Err(GfError::DivisionByZero));
    }

    #[test]
    fn mul_matches_slow_path() {
        for (p, r) in [(2, 3), (3, 2), (5, 2), (2, 4), (7, 2)] {
            let f = Gf::new(p, r).unwrap();
            for a in f.elements() {
                for b in f.elements() {
                    assert_eq!(f.mul(a, b).0, slow_mul(a.0, b.0, p as u32, f.modulus()));
                }
            }
        }
    }

    #[test]
    fn field_axioms_exhaustive_small() {
        for (p, r) in [(2, 1), (2, 2), (3, 2), (2, 3), (7, 1)] {
            let f = Gf::new(p, r).unwrap();
            for a in f.elements() {
                for b in f.elements() {
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.sub(f.add(a, b), b), a);
                    for c in f.elements() {
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
    fn table_and_digit_addition_agree() {
        let f = Gf::new(7, 3).unwrap();
        assert!(f.0.add.is_some());
        for a in (0..343).step_by(7) {
            for b in 0..343 {
                assert_eq!(f.add(Elem(a), Elem(b)).0, digit_add(a, b, 7, 3));
            }
        }
    }

    #[test]
    fn frobenius_fixed_points() {
        let f9 = Gf::new(3, 2).unwrap();
        for a in f9.elements() {
            assert_eq!(f9.frobenius(a, 2), a);
        }
        let fixed = f9.elements().filter(|&a| f9.frobenius(a, 1) == a).count();
        assert_eq!(fixed, 3);
        let f4 = Gf::new(2, 2).unwrap();
        for a in f4.elements() {
            assert_eq!(f4.frobenius(f4.frobenius(a, 1), 1), a);
        }
    }

    #[test]
    fn frobenius_is_a_ring_map() {
        for (p, r) in [(2, 2), (3, 2), (7, 2), (2, 4)] {
            let f = Gf::new(p, r).unwrap();
            for a in f.elements() {
                for b in f.elements() {
                    assert_eq!(f.frobenius(f.add(a, b), 1), f.add(f.frobenius(a, 1), f.frobenius(b, 1)));
                    assert_eq!(f.frobenius(f.mul(a, b), 1), f.mul(f.frobenius(a, 1), f.frobenius(b, 1)));
                }
            }
        }
    }

    #[test]
    fn conjugation() {
        let f4 = Gf::quadratic_extension(2, 1).unwrap();
        for a in f4.elements() {
            assert_eq!(f4.conj(a).unwrap(), f4.mul(a, a));
            assert_eq!(f4.conj(f4.conj(a).unwrap()).unwrap(), a);
        }
        for (p, r) in [(2, 1), (3, 1), (5, 1), (7, 1), (2, 2)] {
            let f = Gf::quadratic_extension(p, r).unwrap();
            let q = f.base_size().unwrap();
            let fixed = f.elements().filter(|&a| f.conj(a).unwrap() == a).count();
            assert_eq!(fixed as u32, q);
            assert_eq!(f.subfield(r).len() as u32, q);
        }
        let f25 = Gf::quadratic_extension(5, 1).unwrap();
        for a in f25.elements() {
            for b in f25.elements() {
                let lhs = f25.conj(f25.mul(a, b)).unwrap();
                let rhs = f25.mul(f25.conj(a).unwrap(), f25.conj(b).unwrap());
                assert_eq!(lhs, rhs);
            }
        }
        let plain = Gf::new(3, 2).unwrap();
        assert_eq!(plain.conj(Elem(3)), Err(GfError::NotQuadraticExtension));
    }

    #[test]
    fn enumeration_order() {
        let f9 = Gf::new(3, 2).unwrap();
        let els: Vec<_> = f9.elements().collect();
        assert_eq!(els.len(), 9);
        assert_eq!(els[0], Elem::ZERO);
        let f49 = Gf::new(7, 2).unwrap();
        let mut coeffs: Vec<_> = f49.elements().map(|a| f49.coefficients(a)).collect();
        assert_eq!(coeffs.len(), 49);
        coeffs.sort();
        coeffs.dedup();
        assert_eq!(coeffs.len(), 49);
        for a in f49.elements() {
            assert_eq!(f49.from_coefficients(&f49.coefficients(a)).unwrap(), a);
        }
    }

    #[test]
    fn checked_element_ops() {
        let f7 = Gf::prime(7).unwrap();
        let f5 = Gf::prime(5).unwrap();
        let a = f7.element(Elem(3));
        let b = f7.element(Elem(5));
        assert_eq!((&a * &b).value, Elem(1));
        assert_eq!((&a / &b).value, f7.div(Elem(3), Elem(5)).unwrap());
        assert_eq!(a.arith(&f5.element(Elem(1)), ArithOp::Add), Err(GfError::FieldMismatch));
        assert_eq!(
            a.arith(&f7.element(Elem(0)), ArithOp::Div),
            Err(GfError::DivisionByZero)
        );
        assert_eq!(serde_json::to_string(&Gf::new(3, 2).unwrap().element(Elem(5))).unwrap(), "[2,1]");
    }
}

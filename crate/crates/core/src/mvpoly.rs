//! Sparse multivariate polynomials over a finite field.
//!
//! Terms are kept in a `BTreeMap` keyed by [`Monomial`] under graded
//! lexicographic order, so equality, zero tests and the text rendering are
//! canonical. No zero coefficient is ever stored.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::gf::{Elem, Gf};
use crate::linalg::Matrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("expected {expected} variables or coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("variable index {index} out of range for {nvars} variables")]
    IndexOutOfRange { index: usize, nvars: usize },
    #[error("polynomials live over different fields")]
    FieldMismatch,
    #[error("degree {degree} out of range 1..={max}")]
    DegreeOutOfRange { degree: usize, max: usize },
    #[error("coefficient outside the prime subfield cannot be embedded")]
    NotPrimeSubfield,
}

/// Exponent vector of fixed length.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    /// Graded lex: total degree first, then the exponent of `x1`, `x2`, ...
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct MultiPoly {
    nvars: usize,
    field: Gf,
    terms: BTreeMap<Monomial, Elem>,
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly[{}]({})", self.nvars, self.render())
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl Serialize for MultiPoly {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.render())
    }
}

impl MultiPoly {
    pub fn zero(nvars: usize, field: &Gf) -> Self {
        MultiPoly { nvars, field: field.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, field: &Gf, c: Elem) -> Self {
        let mut p = Self::zero(nvars, field);
        p.add_term(Monomial::one(nvars), c);
        p
    }

    /// The variable `x_{index+1}` (indices are zero-based).
    pub fn var(nvars: usize, field: &Gf, index: usize) -> Self {
        let mut e = vec![0; nvars];
        e[index] = 1;
        Self::term(field, e, Elem::ONE)
    }

    pub fn term(field: &Gf, exponents: Vec<u32>, c: Elem) -> Self {
        let mut p = Self::zero(exponents.len(), field);
        p.add_term(Monomial(exponents), c);
        p
    }

    pub fn from_terms(nvars: usize, field: &Gf, terms: impl IntoIterator<Item = (Vec<u32>, Elem)>) -> Self {
        let mut p = Self::zero(nvars, field);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length");
            p.add_term(Monomial(e), c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Elem) {
        if c.is_zero() {
            return;
        }
        let f = &self.field;
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v = f.add(*v, c);
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn field(&self) -> &Gf {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, Elem)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn coefficient(&self, exponents: &[u32]) -> Elem {
        self.terms.get(&Monomial(exponents.to_vec())).copied().unwrap_or(Elem::ZERO)
    }

    /// `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    fn check_compatible(&self, other: &MultiPoly) -> Result<(), PolyError> {
        if self.field != other.field {
            return Err(PolyError::FieldMismatch);
        }
        if self.nvars != other.nvars {
            return Err(PolyError::DimensionMismatch { expected: self.nvars, got: other.nvars });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &MultiPoly) -> Result<MultiPoly, PolyError> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &MultiPoly) -> Result<MultiPoly, PolyError> {
        self.try_add(&other.neg())
    }

    pub fn try_mul(&self, other: &MultiPoly) -> Result<MultiPoly, PolyError> {
        self.check_compatible(other)?;
        let f = &self.field;
        let mut out = MultiPoly::zero(self.nvars, f);
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &other.terms {
                out.add_term(ma.mul(mb), f.mul(ca, cb));
            }
        }
        Ok(out)
    }

    /// Panicking forms of the ring operations, for polynomials known to be
    /// compatible.
    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        self.try_add(other).expect("incompatible polynomials")
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        self.try_sub(other).expect("incompatible polynomials")
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        self.try_mul(other).expect("incompatible polynomials")
    }

    pub fn neg(&self) -> MultiPoly {
        self.scale(self.field.from_int(-1))
    }

    pub fn scale(&self, c: Elem) -> MultiPoly {
        let f = &self.field;
        let mut out = MultiPoly::zero(self.nvars, f);
        for (m, &v) in &self.terms {
            out.add_term(m.clone(), f.mul(c, v));
        }
        out
    }

    pub fn pow(&self, e: u32) -> MultiPoly {
        let mut acc = MultiPoly::constant(self.nvars, &self.field, Elem::ONE);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn evaluate(&self, point: &[Elem]) -> Result<Elem, PolyError> {
        if point.len() != self.nvars {
            return Err(PolyError::DimensionMismatch { expected: self.nvars, got: point.len() });
        }
        let f = &self.field;
        Ok(self.terms.iter().fold(Elem::ZERO, |acc, (m, &c)| {
            let t = m.0.iter().zip(point).fold(c, |t, (&e, &x)| if e == 0 { t } else { f.mul(t, f.pow(x, e as u64)) });
            f.add(acc, t)
        }))
    }

    /// Flattened form for repeated evaluation in enumeration kernels.
    pub fn compile(&self) -> CompiledPoly {
        CompiledPoly {
            field: self.field.clone(),
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, &c)| {
                    let factors = m.0.iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, &e)| (i, e)).collect();
                    (c, factors)
                })
                .collect(),
        }
    }

    pub fn partial_derivative(&self, index: usize) -> Result<MultiPoly, PolyError> {
        if index >= self.nvars {
            return Err(PolyError::IndexOutOfRange { index, nvars: self.nvars });
        }
        let f = &self.field;
        let mut out = MultiPoly::zero(self.nvars, f);
        for (m, &c) in &self.terms {
            let e = m.0[index];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[index] -= 1;
            out.add_term(Monomial(exps), f.mul(c, f.from_int(e as i64)));
        }
        Ok(out)
    }

    /// Composition `f(images_1, ..., images_n)`; all images share a variable
    /// count, which becomes the result's.
    pub fn substitute(&self, images: &[MultiPoly]) -> Result<MultiPoly, PolyError> {
        if images.len() != self.nvars {
            return Err(PolyError::DimensionMismatch { expected: self.nvars, got: images.len() });
        }
        let target_vars = images.first().map_or(0, |g| g.nvars);
        for g in images {
            if g.field != self.field {
                return Err(PolyError::FieldMismatch);
            }
            if g.nvars != target_vars {
                return Err(PolyError::DimensionMismatch { expected: target_vars, got: g.nvars });
            }
        }
        let f = &self.field;
        let mut powers: HashMap<(usize, u32), MultiPoly> = HashMap::new();
        let mut out = MultiPoly::zero(target_vars, f);
        for (m, &c) in &self.terms {
            let mut t = MultiPoly::constant(target_vars, f, c);
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let p = powers.entry((i, e)).or_insert_with(|| images[i].pow(e));
                t = t.mul(p);
            }
            for (tm, tc) in t.terms {
                out.add_term(tm, tc);
            }
        }
        Ok(out)
    }

    /// `f(g x)`: the variable `x_i` is replaced by `sum_j g_ij x_j`.
    pub fn linear_substitute(&self, g: &Matrix) -> Result<MultiPoly, PolyError> {
        if !g.is_square() {
            return Err(PolyError::DimensionMismatch { expected: self.nvars, got: g.cols() });
        }
        self.substitute_linear_map(g)
    }

    /// Pull back along `x = M t` for an `nvars x k` matrix; the result lives
    /// in `k` variables.
    pub fn substitute_linear_map(&self, m: &Matrix) -> Result<MultiPoly, PolyError> {
        if m.rows() != self.nvars {
            return Err(PolyError::DimensionMismatch { expected: self.nvars, got: m.rows() });
        }
        let k = m.cols();
        let images: Vec<MultiPoly> = (0..self.nvars)
            .map(|i| {
                let mut l = MultiPoly::zero(k, &self.field);
                for j in 0..k {
                    let mut e = vec![0; k];
                    e[j] = 1;
                    l.add_term(Monomial(e), m.get(i, j));
                }
                l
            })
            .collect();
        if images.is_empty() {
            // constant polynomial in zero variables
            let c = self.coefficient(&[]);
            return Ok(MultiPoly::constant(k, &self.field, c));
        }
        self.substitute(&images)
    }

    /// Re-home a polynomial with prime-subfield coefficients into another
    /// field of the same characteristic.
    pub fn embed(&self, target: &Gf) -> Result<MultiPoly, PolyError> {
        if target.characteristic() != self.field.characteristic() {
            return Err(PolyError::FieldMismatch);
        }
        let mut out = MultiPoly::zero(self.nvars, target);
        for (m, &c) in &self.terms {
            if !self.field.is_prime_subfield_element(c) {
                return Err(PolyError::NotPrimeSubfield);
            }
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    /// Append `extra` variables that do not occur.
    pub fn extend_vars(&self, extra: usize) -> MultiPoly {
        let mut out = MultiPoly::zero(self.nvars + extra, &self.field);
        for (m, &c) in &self.terms {
            let mut e = m.0.clone();
            e.resize(self.nvars + extra, 0);
            out.terms.insert(Monomial(e), c);
        }
        out
    }

    /// Canonical text: `c * x1^e1 x2^e2 + ...`, leading (largest) term first.
    /// Prime-subfield coefficients print as residues, others as coefficient
    /// lists.
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let f = &self.field;
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(m, &c)| {
                let coeff = if f.is_prime_subfield_element(c) {
                    c.0.to_string()
                } else {
                    format!("{:?}", f.coefficients(c))
                };
                let vars: Vec<String> = m
                    .0
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| format!("x{}^{}", i + 1, e))
                    .collect();
                if vars.is_empty() {
                    coeff
                } else {
                    format!("{} * {}", coeff, vars.join(" "))
                }
            })
            .collect();
        parts.join(" + ")
    }
}

/// A polynomial flattened to `(coeff, [(var, exp)])` terms.
#[derive(Debug, Clone)]
pub struct CompiledPoly {
    field: Gf,
    nvars: usize,
    terms: Vec<(Elem, Vec<(usize, u32)>)>,
}

impl CompiledPoly {
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Evaluate without length checks; `point.len()` must equal `nvars`.
    #[inline]
    pub fn eval(&self, point: &[Elem]) -> Elem {
        let f = &self.field;
        let mut acc = Elem::ZERO;
        for (c, factors) in &self.terms {
            let mut t = *c;
            for &(i, e) in factors {
                let x = point[i];
                if x.is_zero() {
                    t = Elem::ZERO;
                    break;
                }
                t = f.mul(t, if e == 1 { x } else { f.pow(x, e as u64) });
            }
            acc = f.add(acc, t);
        }
        acc
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// `s_j(x_1, ..., x_n)`, over the given field's prime subfield.
pub fn elementary_symmetric(n: usize, j: usize, field: &Gf) -> Result<MultiPoly, PolyError> {
    if j < 1 || j > n {
        return Err(PolyError::DegreeOutOfRange { degree: j, max: n });
    }
    let mut p = MultiPoly::zero(n, field);
    for subset in combinations(n, j) {
        let mut e = vec![0; n];
        for i in subset {
            e[i] = 1;
        }
        p.add_term(Monomial(e), Elem::ONE);
    }
    Ok(p)
}

/// `omega(x, x^q) = sum_i (x_{2i-1} x_{2i}^q - x_{2i} x_{2i-1}^q)` with `q`
/// the size of `field`. Homogeneous of degree `q + 1` in `2m` variables.
pub fn symplectic_form_poly(m: usize, field: &Gf) -> MultiPoly {
    let n = 2 * m;
    let q = field.size();
    let minus_one = field.from_int(-1);
    let mut p = MultiPoly::zero(n, field);
    for i in 0..m {
        let (a, b) = (2 * i, 2 * i + 1);
        let mut e1 = vec![0; n];
        e1[a] = 1;
        e1[b] = q;
        p.add_term(Monomial(e1), Elem::ONE);
        let mut e2 = vec![0; n];
        e2[b] = 1;
        e2[a] = q;
        p.add_term(Monomial(e2), minus_one);
    }
    p
}

/// `h(x, x) = x_1^{q+1} + ... + x_n^{q+1}`, placed in `field` (usually
/// `F_{q^2}`, where the unitary group acts).
pub fn hermitian_norm_poly(n: usize, q: u32, field: &Gf) -> MultiPoly {
    let mut p = MultiPoly::zero(n, field);
    for i in 0..n {
        let mut e = vec![0; n];
        e[i] = q + 1;
        p.add_term(Monomial(e), Elem::ONE);
    }
    p
}

/// Substitute `x_i -> alpha x_i + beta`; `alpha` and `beta` are the
/// appended variables `x_{n+1}` and `x_{n+2}`.
pub fn affine_shift_expand(s: &MultiPoly) -> MultiPoly {
    let n = s.nvars;
    let f = s.field.clone();
    let alpha = MultiPoly::var(n + 2, &f, n);
    let beta = MultiPoly::var(n + 2, &f, n + 1);
    let images: Vec<MultiPoly> = (0..n)
        .map(|i| MultiPoly::var(n + 2, &f, i).mul(&alpha).add(&beta))
        .collect();
    s.substitute(&images).expect("images are well formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_point(f: &Gf, n: usize, rng: &mut impl Rng) -> Vec<Elem> {
        (0..n).map(|_| Elem(rng.gen_range(0..f.size()))).collect()
    }

    #[test]
    fn symmetric_counts() {
        let f7 = Gf::prime(7).unwrap();
        let s2 = elementary_symmetric(3, 2, &f7).unwrap();
        assert_eq!(s2.render(), "1 * x1^1 x2^1 + 1 * x1^1 x3^1 + 1 * x2^1 x3^1");
        // C(7,3) by direct enumeration of 3-subsets of 7 points
        let mut count = 0;
        for a in 0..7 {
            for b in a + 1..7 {
                for _c in b + 1..7 {
                    count += 1;
                }
            }
        }
        assert_eq!(elementary_symmetric(7, 3, &f7).unwrap().num_terms(), count);
        let s1 = elementary_symmetric(5, 1, &f7).unwrap();
        assert_eq!(s1.num_terms(), 5);
        assert!(s1.is_homogeneous());
        assert!(elementary_symmetric(3, 0, &f7).is_err());
        assert!(elementary_symmetric(3, 4, &f7).is_err());
    }

    #[test]
    fn symplectic_form_shapes() {
        let f2 = Gf::prime(2).unwrap();
        let p = symplectic_form_poly(1, &f2);
        assert_eq!(p.render(), "1 * x1^2 x2^1 + 1 * x1^1 x2^2");
        let f3 = Gf::prime(3).unwrap();
        let p = symplectic_form_poly(2, &f3);
        assert_eq!(p.num_terms(), 4);
        assert_eq!(p.total_degree(), Some(4));
        assert!(p.is_homogeneous());
        assert_eq!(p.coefficient(&[1, 3, 0, 0]), Elem(1));
        assert_eq!(p.coefficient(&[3, 1, 0, 0]), Elem(2));
    }

    #[test]
    fn hermitian_shapes() {
        let f4 = Gf::quadratic_extension(2, 1).unwrap();
        let h = hermitian_norm_poly(3, 2, &f4);
        assert_eq!(h.render(), "1 * x1^3 + 1 * x2^3 + 1 * x3^3");
        let f9 = Gf::quadratic_extension(3, 1).unwrap();
        let h = hermitian_norm_poly(4, 3, &f9);
        assert_eq!(h.total_degree(), Some(4));
        assert_eq!(h.num_terms(), 4);
        assert_eq!(h.evaluate(&[Elem(1); 3]).unwrap_err(), PolyError::DimensionMismatch { expected: 4, got: 3 });
        let f4 = Gf::quadratic_extension(2, 1).unwrap();
        assert_eq!(hermitian_norm_poly(3, 2, &f4).evaluate(&[Elem(1); 3]).unwrap(), Elem(1));
    }

    #[test]
    fn derivatives_in_characteristic_p() {
        let f9 = Gf::quadratic_extension(3, 1).unwrap();
        let h = hermitian_norm_poly(3, 3, &f9);
        for i in 0..3 {
            let d = h.partial_derivative(i).unwrap();
            let mut e = vec![0; 3];
            e[i] = 3;
            assert_eq!(d, MultiPoly::term(&f9, e, Elem::ONE));
        }
        let f3 = Gf::prime(3).unwrap();
        let w = symplectic_form_poly(2, &f3);
        assert_eq!(w.partial_derivative(0).unwrap(), MultiPoly::term(&f3, vec![0, 3, 0, 0], Elem::ONE));
        assert_eq!(w.partial_derivative(1).unwrap(), MultiPoly::term(&f3, vec![3, 0, 0, 0], Elem(2)));
        let c = MultiPoly::constant(2, &f3, Elem(2));
        assert!(c.partial_derivative(1).unwrap().is_zero());
        assert!(c.partial_derivative(2).is_err());
    }

    #[test]
    fn identity_and_swap_substitution() {
        let f5 = Gf::prime(5).unwrap();
        let x = MultiPoly::var(2, &f5, 0);
        let y = MultiPoly::var(2, &f5, 1);
        let p = x.pow(3).add(&x.mul(&y).scale(Elem(3))).add(&MultiPoly::constant(2, &f5, Elem(1)));
        assert_eq!(p.linear_substitute(&Matrix::identity(2)).unwrap(), p);
        let swap = Matrix::from_rows(&[vec![Elem(0), Elem(1)], vec![Elem(1), Elem(0)]]);
        assert_eq!(x.mul(&y).linear_substitute(&swap).unwrap(), x.mul(&y));
        assert!(p.linear_substitute(&Matrix::identity(3)).is_err());
    }

    #[test]
    fn linear_substitution_point_oracle() {
        let f4 = Gf::quadratic_extension(2, 1).unwrap();
        let h = hermitian_norm_poly(3, 2, &f4);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let g = loop {
            let rows: Vec<Vec<Elem>> = (0..3).map(|_| random_point(&f4, 3, &mut rng)).collect();
            let m = Matrix::from_rows(&rows);
            if !m.det(&f4).is_zero() {
                break m;
            }
        };
        let hg = h.linear_substitute(&g).unwrap();
        for _ in 0..50 {
            let pt = random_point(&f4, 3, &mut rng);
            assert_eq!(hg.evaluate(&pt).unwrap(), h.evaluate(&g.apply(&pt, &f4)).unwrap());
        }
    }

    #[test]
    fn shift_of_s1_s2() {
        let f = Gf::prime(11).unwrap();
        let n = 5;
        let s1 = elementary_symmetric(n, 1, &f).unwrap();
        let s2 = elementary_symmetric(n, 2, &f).unwrap();
        let a = MultiPoly::var(n + 2, &f, n);
        let b = MultiPoly::var(n + 2, &f, n + 1);
        let s1e = s1.extend_vars(2);
        let s2e = s2.extend_vars(2);
        let expect1 = a.mul(&s1e).add(&b.scale(f.from_int(n as i64)));
        assert_eq!(affine_shift_expand(&s1), expect1);
        let expect2 = a
            .pow(2)
            .mul(&s2e)
            .add(&a.mul(&b).mul(&s1e).scale(f.from_int(n as i64 - 1)))
            .add(&b.pow(2).scale(f.from_int(10)));
        assert_eq!(affine_shift_expand(&s2), expect2);
    }

    #[test]
    fn embedding_rules() {
        let f3 = Gf::prime(3).unwrap();
        let f9 = Gf::quadratic_extension(3, 1).unwrap();
        let s = elementary_symmetric(3, 2, &f3).unwrap();
        let e = s.embed(&f9).unwrap();
        assert_eq!(e.field(), &f9);
        assert_eq!(e.num_terms(), 3);
        assert_eq!(e.embed(&Gf::prime(5).unwrap()).unwrap_err(), PolyError::FieldMismatch);
        let non_prime = MultiPoly::constant(1, &f9, Elem(4));
        assert_eq!(non_prime.embed(&f3).unwrap_err(), PolyError::NotPrimeSubfield);
        assert_eq!(s.try_add(&s.embed(&f9).unwrap()).unwrap_err(), PolyError::FieldMismatch);
    }

    #[test]
    fn compiled_matches_evaluate() {
        let f = Gf::new(7, 2).unwrap();
        let s3 = elementary_symmetric(6, 3, &f).unwrap();
        let c = s3.compile();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let pt = random_point(&f, 6, &mut rng);
            assert_eq!(c.eval(&pt), s3.evaluate(&pt).unwrap());
        }
    }

    #[test]
    fn rendering_is_leading_term_first() {
        let f = Gf::prime(7).unwrap();
        let x = MultiPoly::var(2, &f, 0);
        let y = MultiPoly::var(2, &f, 1);
        let p = y.add(&x.pow(2).scale(Elem(3))).add(&MultiPoly::constant(2, &f, Elem(5)));
        assert_eq!(p.render(), "3 * x1^2 + 1 * x2^1 + 5");
        assert_eq!(MultiPoly::zero(2, &f).render(), "0");
        let f9 = Gf::new(3, 2).unwrap();
        assert_eq!(MultiPoly::term(&f9, vec![1], Elem(5)).render(), "[2, 1] * x1^1");
    }
}

//! Permutation and matrix groups: stabilizer chains, symplectic and
//! unitary groups over finite fields, projective images, the Weyl group of
//! type E6, derived subgroups, simplicity tests and central products.
//!
//! Permutations act on the right on `{0, .., N-1}`: `x^(ab) = (x^a)^b`.
//! Matrix groups act on row vectors, `v -> v g`, so the permutation
//! representation on nonzero vectors is a homomorphism.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::hash::Hash;
use std::sync::OnceLock;

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::gf::{Elem, Gf, GfError};
use crate::linalg::Matrix;
use crate::projgeom::{point_index, projective_count, ProjectivePoint};

/// Largest domain on which a matrix group is turned into permutations.
pub const DEFAULT_DOMAIN_BUDGET: u64 = 10_000;
/// Largest group whose elements are listed explicitly.
pub const DEFAULT_ORDER_BUDGET: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GroupError {
    #[error("action domain of {needed} points exceeds the budget of {budget}")]
    DomainTooLarge { needed: u128, budget: u64 },
    #[error("group order {order} exceeds the budget of {budget}")]
    OrderTooLarge { order: u128, budget: u128 },
    #[error("{name}: chain order {got} differs from the classical formula {expected}")]
    OrderMismatch { name: String, expected: u128, got: u128 },
    #[error("not a permutation: {0}")]
    NotPermutation(String),
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("subgroup element {0} is not central")]
    NotCentral(usize),
    #[error("the identification of central subgroups is not an isomorphism")]
    NotIsomorphism,
    #[error("invalid parameters: {0}")]
    BadParameters(String),
    #[error(transparent)]
    Field(#[from] GfError),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<u32>);

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.cycle_string())
    }
}

impl Serialize for Permutation {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(serializer)
    }
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation((0..n as u32).collect())
    }

    pub fn from_images(images: Vec<u32>) -> Result<Self, GroupError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x as usize >= n || seen[x as usize] {
                return Err(GroupError::NotPermutation(format!("{images:?}")));
            }
            seen[x as usize] = true;
        }
        Ok(Permutation(images))
    }

    /// Product of disjoint or overlapping cycles, applied left to right.
    pub fn from_cycles(n: usize, cycles: &[&[u32]]) -> Result<Self, GroupError> {
        let mut out = Permutation::identity(n);
        for c in cycles {
            let mut img: Vec<u32> = (0..n as u32).collect();
            for (k, &x) in c.iter().enumerate() {
                if x as usize >= n {
                    return Err(GroupError::NotPermutation(format!("{c:?} on {n} points")));
                }
                img[x as usize] = c[(k + 1) % c.len()];
            }
            out = out.mul(&Permutation::from_images(img)?);
        }
        Ok(out)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }

    #[inline]
    pub fn apply(&self, x: u32) -> u32 {
        self.0[x as usize]
    }

    /// `self` then `other`.
    pub fn mul(&self, other: &Permutation) -> Permutation {
        Permutation(self.0.iter().map(|&x| other.0[x as usize]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Permutation(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    pub fn first_moved(&self) -> Option<u32> {
        self.0.iter().enumerate().find(|&(i, &x)| i as u32 != x).map(|(i, _)| i as u32)
    }

    /// `g^-1 self g`.
    pub fn conjugate(&self, g: &Permutation) -> Permutation {
        g.inverse().mul(self).mul(g)
    }

    /// `a^-1 b^-1 a b`.
    pub fn commutator(a: &Permutation, b: &Permutation) -> Permutation {
        a.inverse().mul(&b.inverse()).mul(a).mul(b)
    }

    pub fn cycles(&self) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.0.len()];
        let mut out = Vec::new();
        for start in 0..self.0.len() {
            if seen[start] {
                continue;
            }
            let mut c = vec![start as u32];
            seen[start] = true;
            let mut x = self.0[start];
            while x as usize != start {
                seen[x as usize] = true;
                c.push(x);
                x = self.0[x as usize];
            }
            if c.len() > 1 {
                out.push(c);
            }
        }
        out
    }

    pub fn order(&self) -> u128 {
        self.cycles().iter().fold(1u128, |acc, c| lcm(acc, c.len() as u128))
    }

    pub fn is_even(&self) -> bool {
        self.cycles().iter().map(|c| c.len() - 1).sum::<usize>() % 2 == 0
    }

    pub fn cycle_string(&self) -> String {
        let cs = self.cycles();
        if cs.is_empty() {
            return "()".into();
        }
        cs.iter()
            .map(|c| format!("({})", c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")))
            .collect()
    }
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u128, b: u128) -> u128 {
    a / gcd(a, b) * b
}

#[derive(Debug, Clone)]
struct Level {
    point: u32,
    gens: Vec<Permutation>,
    orbit: Vec<u32>,
    /// Position of each point in `orbit`, or `u32::MAX`.
    slot: Vec<u32>,
    /// `inv_reps[k]` maps `orbit[k]` back to `point`.
    inv_reps: Vec<Permutation>,
    /// Next Schreier generator to test: (orbit position, generator).
    cursor: (usize, usize),
}

impl Level {
    fn new(point: u32, degree: usize) -> Self {
        let mut slot = vec![u32::MAX; degree];
        slot[point as usize] = 0;
        Level {
            point,
            gens: Vec::new(),
            orbit: vec![point],
            slot,
            inv_reps: vec![Permutation::identity(degree)],
            cursor: (0, 0),
        }
    }

    fn add_gen(&mut self, g: Permutation) {
        self.gens.push(g);
        let inverses: Vec<Permutation> = self.gens.iter().map(Permutation::inverse).collect();
        let mut k = 0;
        while k < self.orbit.len() {
            let x = self.orbit[k];
            for (s, inv) in self.gens.iter().zip(&inverses) {
                let y = s.apply(x);
                if self.slot[y as usize] == u32::MAX {
                    self.slot[y as usize] = self.orbit.len() as u32;
                    self.orbit.push(y);
                    // y -> x -> point
                    let rep = inv.mul(&self.inv_reps[k]);
                    self.inv_reps.push(rep);
                }
            }
            k += 1;
        }
        self.cursor = (0, 0);
    }

    fn inv_rep(&self, x: u32) -> Option<&Permutation> {
        let s = self.slot[x as usize];
        (s != u32::MAX).then(|| &self.inv_reps[s as usize])
    }
}

/// Deterministic Schreier-Sims stabilizer chain. New base points are the
/// first point moved by the element that needs them.
#[derive(Debug, Clone)]
pub struct StabChain {
    degree: usize,
    levels: Vec<Level>,
}

impl StabChain {
    pub fn new(degree: usize, gens: &[Permutation]) -> Self {
        Self::with_base(degree, gens, &[])
    }

    /// A chain whose base starts with `prefix`.
    pub fn with_base(degree: usize, gens: &[Permutation], prefix: &[u32]) -> Self {
        let mut chain = StabChain { degree, levels: prefix.iter().map(|&b| Level::new(b, degree)).collect() };
        for g in gens {
            chain.add_generator(g.clone());
        }
        chain
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn base(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.point).collect()
    }

    pub fn orbit_lengths(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    pub fn order(&self) -> u128 {
        self.levels.iter().map(|l| l.orbit.len() as u128).product()
    }

    /// Strong generators fixing the first `level` base points.
    pub fn level_generators(&self, level: usize) -> &[Permutation] {
        &self.levels[level].gens
    }

    /// Residue of `g` after stripping levels `from..`, and the level where
    /// it fell out (`levels.len()` if it passed them all).
    fn sift(&self, g: &Permutation, from: usize) -> (Permutation, usize) {
        let mut h = g.clone();
        for (l, level) in self.levels.iter().enumerate().skip(from) {
            match level.inv_rep(h.apply(level.point)) {
                Some(u) => h = h.mul(u),
                None => return (h, l),
            }
        }
        (h, self.levels.len())
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        g.degree() == self.degree && self.sift(g, 0).0.is_identity()
    }

    /// Returns false when `g` already lies in the group.
    pub fn add_generator(&mut self, g: Permutation) -> bool {
        assert_eq!(g.degree(), self.degree, "degree mismatch");
        if self.contains(&g) {
            return false;
        }
        let mut fixed_all = true;
        for l in 0..self.levels.len() {
            self.levels[l].add_gen(g.clone());
            if g.apply(self.levels[l].point) != self.levels[l].point {
                fixed_all = false;
                break;
            }
        }
        if fixed_all {
            let b = g.first_moved().expect("non-identity");
            let mut level = Level::new(b, self.degree);
            level.add_gen(g);
            self.levels.push(level);
        }
        self.complete();
        true
    }

    fn complete(&mut self) {
        let mut i = self.levels.len() as isize - 1;
        while i >= 0 {
            let l = i as usize;
            match self.next_failure(l) {
                None => i -= 1,
                Some((h, j)) => {
                    for m in (l + 1)..=j.min(self.levels.len() - 1) {
                        self.levels[m].add_gen(h.clone());
                    }
                    if j == self.levels.len() {
                        let b = h.first_moved().expect("non-identity residue");
                        let mut level = Level::new(b, self.degree);
                        level.add_gen(h);
                        self.levels.push(level);
                    }
                    i = j as isize;
                }
            }
        }
    }

    fn next_failure(&mut self, l: usize) -> Option<(Permutation, usize)> {
        loop {
            let (k, s) = self.levels[l].cursor;
            let level = &self.levels[l];
            if k >= level.orbit.len() {
                return None;
            }
            if s >= level.gens.len() {
                self.levels[l].cursor = (k + 1, 0);
                continue;
            }
            let x = level.orbit[k];
            let gen = &level.gens[s];
            let y = gen.apply(x);
            // u_x s u_y^-1
            let u_x = level.inv_reps[k].inverse();
            let schreier = u_x.mul(gen).mul(level.inv_rep(y).expect("orbit is closed"));
            self.levels[l].cursor = (k, s + 1);
            if schreier.is_identity() {
                continue;
            }
            let (h, j) = self.sift(&schreier, l + 1);
            if !h.is_identity() {
                self.levels[l].cursor = (k, s);
                return Some((h, j));
            }
        }
    }

    /// Uniform random element.
    pub fn random_element<R: Rng>(&self, rng: &mut R) -> Permutation {
        let mut g = Permutation::identity(self.degree);
        for level in self.levels.iter() {
            let k = rng.gen_range(0..level.orbit.len());
            g = g.mul(&level.inv_reps[k]);
        }
        g
    }

    /// Every element, each once.
    pub fn elements(&self, budget: u128) -> Result<Vec<Permutation>, GroupError> {
        let order = self.order();
        if order > budget {
            return Err(GroupError::OrderTooLarge { order, budget });
        }
        let mut out = vec![Permutation::identity(self.degree)];
        for level in self.levels.iter() {
            out = out.iter().flat_map(|e| level.inv_reps.iter().map(move |u| e.mul(u))).collect();
        }
        Ok(out)
    }
}

/// A permutation group with its stabilizer chain.
#[derive(Debug, Clone)]
pub struct PermGroup {
    degree: usize,
    gens: Vec<Permutation>,
    chain: StabChain,
}

impl Serialize for PermGroup {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            kind: &'static str,
            degree: usize,
            generators: &'a [Permutation],
        }
        Repr { kind: "permutation", degree: self.degree, generators: &self.gens }.serialize(serializer)
    }
}

impl PermGroup {
    pub fn new(degree: usize, gens: Vec<Permutation>) -> Result<Self, GroupError> {
        Self::with_base(degree, gens, &[])
    }

    pub fn with_base(degree: usize, gens: Vec<Permutation>, base: &[u32]) -> Result<Self, GroupError> {
        if let Some(g) = gens.iter().find(|g| g.degree() != degree) {
            return Err(GroupError::DegreeMismatch(degree, g.degree()));
        }
        let chain = StabChain::with_base(degree, &gens, base);
        Ok(PermGroup { degree, gens, chain })
    }

    pub fn trivial(degree: usize) -> Self {
        PermGroup { degree, gens: vec![], chain: StabChain::new(degree, &[]) }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn gens(&self) -> &[Permutation] {
        &self.gens
    }

    pub fn chain(&self) -> &StabChain {
        &self.chain
    }

    pub fn order(&self) -> u128 {
        self.chain.order()
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        self.chain.contains(g)
    }

    pub fn identity(&self) -> Permutation {
        Permutation::identity(self.degree)
    }

    pub fn is_abelian(&self) -> bool {
        self.gens.iter().enumerate().all(|(i, a)| self.gens[i + 1..].iter().all(|b| a.mul(b) == b.mul(a)))
    }

    pub fn random_element<R: Rng>(&self, rng: &mut R) -> Permutation {
        self.chain.random_element(rng)
    }

    /// Product of `len` generators chosen at random.
    pub fn random_word<R: Rng>(&self, len: usize, rng: &mut R) -> Permutation {
        let mut g = self.identity();
        if self.gens.is_empty() {
            return g;
        }
        for _ in 0..len {
            g = g.mul(&self.gens[rng.gen_range(0..self.gens.len())]);
        }
        g
    }

    pub fn elements(&self, budget: u128) -> Result<Vec<Permutation>, GroupError> {
        self.chain.elements(budget)
    }

    pub fn orbit(&self, x: u32) -> Vec<u32> {
        let mut seen = vec![false; self.degree];
        seen[x as usize] = true;
        let mut out = vec![x];
        let mut k = 0;
        while k < out.len() {
            let y = out[k];
            for g in &self.gens {
                let z = g.apply(y);
                if !seen[z as usize] {
                    seen[z as usize] = true;
                    out.push(z);
                }
            }
            k += 1;
        }
        out
    }

    /// Orbits on `0..degree`, each sorted, in order of least element.
    pub fn orbits(&self) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.degree];
        let mut out = Vec::new();
        for x in 0..self.degree as u32 {
            if seen[x as usize] {
                continue;
            }
            let mut o = self.orbit(x);
            for &y in &o {
                seen[y as usize] = true;
            }
            o.sort_unstable();
            out.push(o);
        }
        out
    }

    pub fn is_transitive(&self) -> bool {
        self.degree == 0 || self.orbit(0).len() == self.degree
    }

    /// Transitive, and the stabilizer of a point is transitive on the rest.
    pub fn is_two_transitive(&self) -> bool {
        if !self.is_transitive() {
            return false;
        }
        if self.degree < 2 {
            return true;
        }
        let stab = self.stabilizer(0);
        stab.orbits().len() == 2
    }

    /// Stabilizer of a point in the natural action.
    pub fn stabilizer(&self, x: u32) -> PermGroup {
        let chain = StabChain::with_base(self.degree, &self.gens, &[x]);
        let gens = chain.level_generators(1.min(chain.levels.len() - 1)).to_vec();
        let gens = if chain.levels.len() > 1 { gens } else { vec![] };
        PermGroup::new(self.degree, gens).expect("same degree")
    }

    /// Smallest normal subgroup containing `elems`.
    pub fn normal_closure(&self, elems: &[Permutation]) -> PermGroup {
        let mut chain = StabChain::new(self.degree, &[]);
        let mut gens = Vec::new();
        let mut queue: VecDeque<Permutation> = elems.iter().cloned().collect();
        while let Some(h) = queue.pop_front() {
            if h.is_identity() || !chain.add_generator(h.clone()) {
                continue;
            }
            for g in &self.gens {
                queue.push_back(h.conjugate(g));
            }
            gens.push(h);
        }
        PermGroup { degree: self.degree, gens, chain }
    }

    pub fn is_normal_subgroup(&self, sub: &PermGroup) -> bool {
        sub.gens.iter().all(|h| self.contains(h) && self.gens.iter().all(|g| sub.contains(&h.conjugate(g))))
    }
}

/// Symmetric group on `n` points from a transposition and an `n`-cycle.
pub fn symmetric_group(n: usize) -> PermGroup {
    let mut gens = Vec::new();
    if n >= 2 {
        gens.push(Permutation::from_cycles(n, &[&[0, 1]]).unwrap());
    }
    if n >= 3 {
        let cyc: Vec<u32> = (0..n as u32).collect();
        gens.push(Permutation::from_cycles(n, &[&cyc]).unwrap());
    }
    PermGroup::new(n, gens).unwrap()
}

/// Alternating group on `n` points from the 3-cycles `(0 1 i)`.
pub fn alternating_group(n: usize) -> PermGroup {
    let gens = (2..n as u32).map(|i| Permutation::from_cycles(n, &[&[0, 1, i]]).unwrap()).collect();
    PermGroup::new(n, gens).unwrap()
}

/// Cyclic group of order `m` acting regularly.
pub fn cyclic_group(m: usize) -> PermGroup {
    let gens = if m > 1 { vec![Permutation::from_cycles(m, &[&(0..m as u32).collect::<Vec<_>>()]).unwrap()] } else { vec![] };
    PermGroup::new(m, gens).unwrap()
}

/// Stabilizer of `x` under an arbitrary action of `group`, via its orbit
/// and Schreier generators.
pub fn point_stabilizer<T, F>(group: &PermGroup, act: F, x: &T, orbit_budget: usize) -> Result<(PermGroup, usize), GroupError>
where
    T: Clone + Eq + Hash,
    F: Fn(&Permutation, &T) -> T,
{
    let mut reps: HashMap<T, Permutation> = HashMap::new();
    let mut queue = VecDeque::new();
    reps.insert(x.clone(), group.identity());
    queue.push_back(x.clone());
    let mut order_seen = vec![x.clone()];
    while let Some(y) = queue.pop_front() {
        let uy = reps[&y].clone();
        for g in group.gens() {
            let z = act(g, &y);
            if !reps.contains_key(&z) {
                if reps.len() >= orbit_budget {
                    return Err(GroupError::DomainTooLarge { needed: reps.len() as u128 + 1, budget: orbit_budget as u64 });
                }
                reps.insert(z.clone(), uy.mul(g));
                order_seen.push(z.clone());
                queue.push_back(z);
            }
        }
    }
    let mut chain = StabChain::new(group.degree(), &[]);
    let mut gens = Vec::new();
    for y in &order_seen {
        let uy = &reps[y];
        for g in group.gens() {
            let z = act(g, y);
            let s = uy.mul(g).mul(&reps[&z].inverse());
            if !s.is_identity() && chain.add_generator(s.clone()) {
                gens.push(s);
            }
        }
        if chain.order() * order_seen.len() as u128 == group.order() {
            break;
        }
    }
    Ok((PermGroup { degree: group.degree(), gens, chain }, order_seen.len()))
}

/// Subgroup generated by commutators, closed under conjugation.
pub fn derived_subgroup(group: &PermGroup) -> PermGroup {
    let gens = group.gens();
    let mut comms = Vec::new();
    for i in 0..gens.len() {
        for j in (i + 1)..gens.len() {
            comms.push(Permutation::commutator(&gens[i], &gens[j]));
        }
    }
    group.normal_closure(&comms)
}

/// Conjugacy classes, found by closing each unseen element under
/// conjugation by the generators.
pub fn conjugacy_classes(group: &PermGroup, budget: u128) -> Result<Vec<Vec<Permutation>>, GroupError> {
    let elements = group.elements(budget)?;
    let mut seen: HashSet<Permutation> = HashSet::new();
    let mut classes = Vec::new();
    let mut sorted = elements;
    sorted.sort();
    for e in sorted {
        if seen.contains(&e) {
            continue;
        }
        seen.insert(e.clone());
        let mut class = vec![e];
        let mut k = 0;
        while k < class.len() {
            for g in group.gens() {
                let c = class[k].conjugate(g);
                if seen.insert(c.clone()) {
                    class.push(c);
                }
            }
            k += 1;
        }
        classes.push(class);
    }
    Ok(classes)
}

/// True iff the group is nontrivial and the normal closure of every
/// non-identity class representative is the whole group.
pub fn is_simple(group: &PermGroup, budget: u128) -> Result<bool, GroupError> {
    let order = group.order();
    if order == 1 {
        return Ok(false);
    }
    for class in conjugacy_classes(group, budget)? {
        let rep = &class[0];
        if rep.is_identity() {
            continue;
        }
        if group.normal_closure(std::slice::from_ref(rep)).order() != order {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn is_prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut r = 0;
    let mut m = q;
    while m.is_multiple_of(p) {
        m /= p;
        r += 1;
    }
    (m == 1).then_some((p, r))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FormKind {
    Symplectic,
    Hermitian,
}

#[derive(Debug, Clone, Serialize)]
pub struct FormDescriptor {
    pub kind: FormKind,
    #[serde(skip)]
    pub gram: Matrix,
}

impl FormDescriptor {
    /// Block form with `w(e_{2i}, e_{2i+1}) = 1`.
    pub fn symplectic(m: usize, f: &Gf) -> Self {
        let mut gram = Matrix::zeros(2 * m, 2 * m);
        for i in 0..m {
            gram.set(2 * i, 2 * i + 1, Elem::ONE);
            gram.set(2 * i + 1, 2 * i, f.neg(Elem::ONE));
        }
        FormDescriptor { kind: FormKind::Symplectic, gram }
    }

    pub fn hermitian(n: usize) -> Self {
        FormDescriptor { kind: FormKind::Hermitian, gram: Matrix::identity(n) }
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }
}

/// `g^T J g = J` for symplectic forms, `g^T J conj(g) = J` for hermitian.
pub fn preserves_form(g: &Matrix, form: &FormDescriptor, f: &Gf) -> Result<bool, GroupError> {
    if g.rows() != form.dim() || !g.is_square() {
        return Ok(false);
    }
    let lhs = match form.kind {
        FormKind::Symplectic => g.transpose().mul(&form.gram, f).mul(g, f),
        FormKind::Hermitian => {
            let mut bar = g.clone();
            for i in 0..g.rows() {
                for j in 0..g.cols() {
                    bar.set(i, j, f.conj(g.get(i, j))?);
                }
            }
            g.transpose().mul(&form.gram, f).mul(&bar, f)
        }
    };
    Ok(lhs == form.gram)
}

/// `q^{m^2} prod_{i=1..m} (q^{2i} - 1)`.
pub fn sp_order(m: u32, q: u64) -> u128 {
    let q = q as u128;
    q.pow(m * m) * (1..=m).map(|i| q.pow(2 * i) - 1).product::<u128>()
}

/// `q^{n(n-1)/2} prod_{i=2..n} (q^i - (-1)^i)`.
pub fn su_order(n: u32, q: u64) -> u128 {
    let q = q as u128;
    q.pow(n * (n - 1) / 2) * (2..=n).map(|i| if i % 2 == 0 { q.pow(i) - 1 } else { q.pow(i) + 1 }).product::<u128>()
}

pub fn u_order(n: u32, q: u64) -> u128 {
    (q as u128 + 1) * su_order(n, q)
}

/// Matrices over a finite field, with an optional preserved form.
#[derive(Debug, Clone)]
pub struct MatrixGroup {
    name: String,
    field: Gf,
    dim: usize,
    gens: Vec<Matrix>,
    form: Option<FormDescriptor>,
    perm: OnceLock<PermGroup>,
}

impl Serialize for MatrixGroup {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            kind: &'static str,
            name: &'a str,
            field: &'a Gf,
            dim: usize,
            form: Option<FormKind>,
            generators: Vec<Vec<Vec<Vec<u32>>>>,
        }
        Repr {
            kind: "matrix",
            name: &self.name,
            field: &self.field,
            dim: self.dim,
            form: self.form.as_ref().map(|f| f.kind),
            generators: self.gens.iter().map(|g| g.serialize_entries(&self.field)).collect(),
        }
        .serialize(serializer)
    }
}

/// Index of a nonzero row vector: `sum v_i q^i - 1`.
fn vector_index(v: &[Elem], q: u64) -> u32 {
    (v.iter().rev().fold(0u64, |acc, c| acc * q + c.0 as u64) - 1) as u32
}

fn vector_at(index: u64, n: usize, q: u64) -> Vec<Elem> {
    let mut rest = index + 1;
    (0..n)
        .map(|_| {
            let c = Elem((rest % q) as u32);
            rest /= q;
            c
        })
        .collect()
}

fn row_times(v: &[Elem], g: &Matrix, f: &Gf) -> Vec<Elem> {
    (0..g.cols())
        .map(|j| v.iter().enumerate().fold(Elem::ZERO, |acc, (i, &x)| f.add(acc, f.mul(x, g.get(i, j)))))
        .collect()
}

impl MatrixGroup {
    pub fn new(name: impl Into<String>, field: &Gf, dim: usize, gens: Vec<Matrix>, form: Option<FormDescriptor>) -> Result<Self, GroupError> {
        for g in &gens {
            if g.rows() != dim || !g.is_square() {
                return Err(GroupError::DegreeMismatch(dim, g.rows()));
            }
            if g.det(field).is_zero() {
                return Err(GroupError::BadParameters("singular generator".into()));
            }
        }
        Ok(MatrixGroup { name: name.into(), field: field.clone(), dim, gens, form, perm: OnceLock::new() })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn field(&self) -> &Gf {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gens(&self) -> &[Matrix] {
        &self.gens
    }

    pub fn form(&self) -> Option<&FormDescriptor> {
        self.form.as_ref()
    }

    pub fn domain_size(&self) -> u128 {
        (self.field.size() as u128).pow(self.dim as u32) - 1
    }

    /// Permutation of the nonzero row vectors induced by `g`.
    pub fn vector_permutation(&self, g: &Matrix) -> Permutation {
        let q = self.field.size() as u64;
        let n = self.domain_size() as u64;
        Permutation(
            (0..n)
                .map(|i| vector_index(&row_times(&vector_at(i, self.dim, q), g, &self.field), q))
                .collect(),
        )
    }

    /// Faithful permutation representation on nonzero vectors (cached).
    pub fn perm_rep(&self, budget: u64) -> Result<&PermGroup, GroupError> {
        if let Some(p) = self.perm.get() {
            return Ok(p);
        }
        let needed = self.domain_size();
        if needed > budget as u128 {
            return Err(GroupError::DomainTooLarge { needed, budget });
        }
        let degree = needed as usize;
        let mut chain = StabChain::new(degree, &[]);
        let mut gens = Vec::new();
        for g in &self.gens {
            let p = self.vector_permutation(g);
            chain.add_generator(p.clone());
            gens.push(p);
        }
        let _ = self.perm.set(PermGroup { degree, gens, chain });
        Ok(self.perm.get().expect("just set"))
    }

    pub fn order(&self) -> Result<u128, GroupError> {
        Ok(self.perm_rep(DEFAULT_DOMAIN_BUDGET)?.order())
    }

    pub fn contains(&self, g: &Matrix) -> Result<bool, GroupError> {
        let p = self.vector_permutation(g);
        Ok(self.perm_rep(DEFAULT_DOMAIN_BUDGET)?.contains(&p))
    }

    /// Product of `len` random generators.
    pub fn random_word<R: Rng>(&self, len: usize, rng: &mut R) -> Matrix {
        let mut g = Matrix::identity(self.dim);
        if self.gens.is_empty() {
            return g;
        }
        for _ in 0..len {
            g = g.mul(&self.gens[rng.gen_range(0..self.gens.len())], &self.field);
        }
        g
    }

    /// Number of scalar matrices `cI` lying in the group.
    pub fn scalar_count(&self) -> Result<usize, GroupError> {
        let mut count = 0;
        for c in self.field.nonzero_elements() {
            if self.contains(&Matrix::scalar(self.dim, c))? {
                count += 1;
            }
        }
        Ok(count)
    }

    fn check_order(&self, expected: u128) -> Result<(), GroupError> {
        let got = self.order()?;
        if got != expected {
            return Err(GroupError::OrderMismatch { name: self.name.clone(), expected, got });
        }
        Ok(())
    }

    fn check_forms(&self) -> Result<(), GroupError> {
        if let Some(form) = &self.form {
            for (i, g) in self.gens.iter().enumerate() {
                if !preserves_form(g, form, &self.field)? {
                    return Err(GroupError::BadParameters(format!("generator {i} of {} leaves the form", self.name)));
                }
            }
        }
        Ok(())
    }
}

/// Action on points of `P^{n-1}` and the number of scalars in the group.
#[derive(Debug, Clone)]
pub struct ProjectiveImage {
    pub group: PermGroup,
    pub scalars: usize,
}

pub fn projective_image(group: &MatrixGroup, budget: u64) -> Result<ProjectiveImage, GroupError> {
    let f = group.field();
    let n = group.dim();
    let q = f.size() as u64;
    let needed = projective_count(n, q);
    if needed > budget as u128 {
        return Err(GroupError::DomainTooLarge { needed, budget });
    }
    let points: Vec<ProjectivePoint> = (0..needed as u64).map(|i| crate::projgeom::point_at(i, n, f)).collect();
    let gens = group
        .gens()
        .iter()
        .map(|g| {
            Permutation(
                points
                    .iter()
                    .map(|p| {
                        let img = ProjectivePoint::normalize(row_times(p.coords(), g, f), f).expect("invertible");
                        point_index(img.coords(), f.size()) as u32
                    })
                    .collect(),
            )
        })
        .collect();
    Ok(ProjectiveImage { group: PermGroup::new(needed as usize, gens)?, scalars: group.scalar_count()? })
}

/// Field generators of `F_q` over `F_p`: `1, z, .., z^{r-1}` for a primitive `z`.
fn prime_field_basis(f: &Gf, z: Elem, r: u32) -> Vec<Elem> {
    (0..r).map(|i| f.pow(z, i as u64)).collect()
}

/// `Sp_{2m}(q)` generated by transvections `x -> x + c w(x, v) v`, with
/// `v` running over `e_i` and `e_i + e_j` and `c` over an `F_p`-basis.
/// The chain order is checked against the classical formula when the
/// vector domain fits the default budget.
pub fn symplectic_group(m: usize, q: u64) -> Result<MatrixGroup, GroupError> {
    let (p, r) = is_prime_power(q).ok_or_else(|| GroupError::BadParameters(format!("{q} is not a prime power")))?;
    if m == 0 {
        return Err(GroupError::BadParameters("m must be at least 1".into()));
    }
    let f = Gf::new(p, r)?;
    let n = 2 * m;
    let form = FormDescriptor::symplectic(m, &f);
    let mut vs = Vec::new();
    for i in 0..n {
        let mut v = vec![Elem::ZERO; n];
        v[i] = Elem::ONE;
        vs.push(v);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let mut v = vec![Elem::ZERO; n];
            v[i] = Elem::ONE;
            v[j] = Elem::ONE;
            vs.push(v);
        }
    }
    let mut gens = Vec::new();
    for v in &vs {
        let jv = form.gram.apply(v, &f);
        for c in prime_field_basis(&f, f.generator(), r) {
            let mut t = Matrix::identity(n);
            for a in 0..n {
                for b in 0..n {
                    t.set(a, b, f.add(t.get(a, b), f.mul(c, f.mul(v[a], jv[b]))));
                }
            }
            gens.push(t);
        }
    }
    let g = MatrixGroup::new(format!("Sp{n}({q})"), &f, n, gens, Some(form))?;
    g.check_forms()?;
    if g.domain_size() <= DEFAULT_DOMAIN_BUDGET as u128 {
        g.check_order(sp_order(m as u32, q))?;
    }
    Ok(g)
}

fn unitary_generators(n: usize, q: u64, full: bool) -> Result<(Gf, Vec<Matrix>), GroupError> {
    let (p, r) = is_prime_power(q).ok_or_else(|| GroupError::BadParameters(format!("{q} is not a prime power")))?;
    if n < 2 {
        return Err(GroupError::BadParameters("n must be at least 2".into()));
    }
    let f = Gf::quadratic_extension(p, r)?;
    let w = f.generator();
    // conj(eps) = -eps
    let eps = if p == 2 { Elem::ONE } else { f.pow(w, q.div_ceil(2)) };
    let eta = f.pow(w, q + 1);
    let traceless: Vec<Elem> = prime_field_basis(&f, eta, r).into_iter().map(|b| f.mul(eps, b)).collect();
    let mut gens = Vec::new();
    let points = projective_count(n, f.size() as u64) as u64;
    for idx in 0..points {
        let v = crate::projgeom::point_at(idx, n, &f).into_coords();
        let vbar: Vec<Elem> = v.iter().map(|&x| f.conj(x)).collect::<Result<_, _>>()?;
        let norm = v.iter().zip(&vbar).fold(Elem::ZERO, |acc, (&x, &y)| f.add(acc, f.mul(x, y)));
        if !norm.is_zero() {
            continue;
        }
        for &a in &traceless {
            let mut t = Matrix::identity(n);
            for x in 0..n {
                for y in 0..n {
                    t.set(x, y, f.add(t.get(x, y), f.mul(a, f.mul(v[x], vbar[y]))));
                }
            }
            gens.push(t);
        }
    }
    // over F_4 every isotropic vector has a zero coordinate, so for SU_3(2)
    // the transvections are monomial; add the Fourier matrix F = (w^{ij}),
    // its conjugate by diag(1, 1, w), and a torus element
    if n == 3 && q == 2 {
        let mut fourier = Matrix::zeros(3, 3);
        for i in 0..3 {
            for j in 0..3 {
                fourier.set(i, j, f.pow(w, (i * j % 3) as u64));
            }
        }
        let d = Matrix::diagonal(&[Elem::ONE, Elem::ONE, w]);
        let twisted = d.mul(&fourier, &f).mul(&d.inverse(&f).expect("invertible"), &f);
        gens.push(fourier);
        gens.push(twisted);
    }
    let mu = f.pow(w, q - 1);
    if n == 3 && q == 2 {
        gens.push(Matrix::diagonal(&[mu, f.inv(mu)?, Elem::ONE]));
    }
    if full {
        let mut d = Matrix::identity(n);
        d.set(0, 0, mu);
        gens.push(d);
    }
    Ok((f, gens))
}

/// `SU_n(q)` (or `U_n(q)` when `full`) over `F_{q^2}` with the form
/// `sum x_i conj(y_i)`. Generators are unitary transvections
/// `x -> x + a h(x, v) v` for isotropic `v` and trace-zero `a`, plus
/// `diag(z, 1, .., 1)` with `z` of order `q + 1` when `full`. Generators
/// that do not enlarge the group are dropped.
pub fn special_unitary_group(n: usize, q: u64, full: bool) -> Result<MatrixGroup, GroupError> {
    let (f, mut gens) = unitary_generators(n, q, full)?;
    let name = if full { format!("U{n}({q})") } else { format!("SU{n}({q})") };
    let probe = MatrixGroup::new(name.clone(), &f, n, vec![], None)?;
    if probe.domain_size() <= DEFAULT_DOMAIN_BUDGET as u128 {
        // keep only generators that enlarge the group
        let mut chain = StabChain::new(probe.domain_size() as usize, &[]);
        gens.retain(|g| chain.add_generator(probe.vector_permutation(g)));
    }
    let g = MatrixGroup::new(name, &f, n, gens, Some(FormDescriptor::hermitian(n)))?;
    g.check_forms()?;
    if g.domain_size() <= DEFAULT_DOMAIN_BUDGET as u128 {
        g.check_order(if full { u_order(n as u32, q) } else { su_order(n as u32, q) })?;
    }
    Ok(g)
}

/// Bourbaki labelling: 1-3-4-5-6 in a chain with 2 attached to 4.
pub const E6_CARTAN: [[i32; 6]; 6] = [
    [2, 0, -1, 0, 0, 0],
    [0, 2, 0, -1, 0, 0],
    [-1, 0, 2, -1, 0, 0],
    [0, -1, -1, 2, -1, 0],
    [0, 0, 0, -1, 2, -1],
    [0, 0, 0, 0, -1, 2],
];

/// Close the simple roots under the simple reflections
/// `s_i(b) = b - <b, a_i> a_i`, in simple-root coordinates; sorted.
pub fn root_closure(cartan: &[[i32; 6]; 6]) -> Vec<[i32; 6]> {
    let reflect = |b: &[i32; 6], i: usize| {
        let pairing: i32 = (0..6).map(|j| b[j] * cartan[j][i]).sum();
        let mut out = *b;
        out[i] -= pairing;
        out
    };
    let mut seen: HashSet<[i32; 6]> = HashSet::new();
    let mut queue: VecDeque<[i32; 6]> = VecDeque::new();
    for i in 0..6 {
        let mut e = [0; 6];
        e[i] = 1;
        seen.insert(e);
        queue.push_back(e);
    }
    while let Some(b) = queue.pop_front() {
        for i in 0..6 {
            let c = reflect(&b, i);
            if seen.insert(c) {
                queue.push_back(c);
            }
        }
    }
    let mut roots: Vec<[i32; 6]> = seen.into_iter().collect();
    roots.sort();
    roots
}

/// The Weyl group of E6 as permutations of its 72 roots, generated by the
/// simple reflections, with the sorted root list.
pub fn weyl_e6() -> Result<(PermGroup, Vec<[i32; 6]>), GroupError> {
    let roots = root_closure(&E6_CARTAN);
    if roots.len() != 72 {
        return Err(GroupError::BadParameters(format!("E6 root closure has {} roots", roots.len())));
    }
    let index: HashMap<[i32; 6], u32> = roots.iter().enumerate().map(|(k, r)| (*r, k as u32)).collect();
    let gens = (0..6)
        .map(|i| {
            Permutation(
                roots
                    .iter()
                    .map(|b| {
                        let pairing: i32 = (0..6).map(|j| b[j] * E6_CARTAN[j][i]).sum();
                        let mut c = *b;
                        c[i] -= pairing;
                        index[&c]
                    })
                    .collect(),
            )
        })
        .collect();
    Ok((PermGroup::new(72, gens)?, roots))
}

/// `G` and `H` with central subgroups identified pointwise: `z1[k]` is
/// glued to `z2[k]`.
#[derive(Debug, Clone)]
pub struct CentralProductSpec {
    pub g: PermGroup,
    pub h: PermGroup,
    pub z1: Vec<Permutation>,
    pub z2: Vec<Permutation>,
}

/// `(G x H) / N` with `N = {(z, phi(z)^-1)}`, realized as its regular
/// permutation representation on canonical coset representatives.
#[derive(Debug, Clone)]
pub struct CentralProduct {
    pub group: PermGroup,
    /// Canonical `(g, h)` pair of each point of the regular action.
    pub reps: Vec<(Permutation, Permutation)>,
    pub g_injective: bool,
    pub h_injective: bool,
}

impl CentralProduct {
    pub fn order(&self) -> u128 {
        self.group.order()
    }
}

pub fn central_product(spec: &CentralProductSpec, budget: u128) -> Result<CentralProduct, GroupError> {
    let CentralProductSpec { g, h, z1, z2 } = spec;
    if z1.len() != z2.len() || z1.is_empty() {
        return Err(GroupError::NotIsomorphism);
    }
    for (k, z) in z1.iter().enumerate() {
        if !g.contains(z) || g.gens().iter().any(|x| x.mul(z) != z.mul(x)) {
            return Err(GroupError::NotCentral(k));
        }
    }
    for (k, z) in z2.iter().enumerate() {
        if !h.contains(z) || h.gens().iter().any(|x| x.mul(z) != z.mul(x)) {
            return Err(GroupError::NotCentral(k));
        }
    }
    let phi: HashMap<&Permutation, &Permutation> = z1.iter().zip(z2.iter()).collect();
    if phi.len() != z1.len() || z2.iter().collect::<HashSet<_>>().len() != z2.len() {
        return Err(GroupError::NotIsomorphism);
    }
    for a in z1 {
        for b in z1 {
            let ab = a.mul(b);
            match phi.get(&ab) {
                Some(img) if **img == phi[a].mul(phi[b]) => {}
                _ => return Err(GroupError::NotIsomorphism),
            }
        }
    }
    let order = g.order() * h.order() / z1.len() as u128;
    if order > budget {
        return Err(GroupError::OrderTooLarge { order, budget });
    }
    let z2_inv: Vec<Permutation> = z2.iter().map(Permutation::inverse).collect();
    let canon = |a: &Permutation, b: &Permutation| -> (Permutation, Permutation) {
        z1.iter()
            .zip(&z2_inv)
            .map(|(z, w)| (a.mul(z), b.mul(w)))
            .min_by(|x, y| x.0.cmp(&y.0))
            .expect("nonempty")
    };
    let ge = g.elements(budget)?;
    let he = h.elements(budget)?;
    let mut index: HashMap<(Permutation, Permutation), u32> = HashMap::new();
    let mut reps = Vec::new();
    for a in &ge {
        for b in &he {
            let c = canon(a, b);
            if !index.contains_key(&c) {
                index.insert(c.clone(), reps.len() as u32);
                reps.push(c);
            }
        }
    }
    let deg = reps.len();
    let id_g = g.identity();
    let id_h = h.identity();
    let mut gens = Vec::new();
    for x in g.gens() {
        gens.push(Permutation(reps.iter().map(|(a, b)| index[&canon(&a.mul(x), b)]).collect()));
    }
    for y in h.gens() {
        gens.push(Permutation(reps.iter().map(|(a, b)| index[&canon(a, &b.mul(y))]).collect()));
    }
    let g_injective = ge.iter().map(|a| canon(a, &id_h)).collect::<HashSet<_>>().len() == ge.len();
    let h_injective = he.iter().map(|b| canon(&id_g, b)).collect::<HashSet<_>>().len() == he.len();
    Ok(CentralProduct { group: PermGroup::new(deg, gens)?, reps, g_injective, h_injective })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn permutation_basics() {
        let a = Permutation::from_cycles(4, &[&[0, 1]]).unwrap();
        let b = Permutation::from_cycles(4, &[&[1, 2]]).unwrap();
        // 0 -> 1 -> 2
        assert_eq!(a.mul(&b).apply(0), 2);
        assert_eq!(a.mul(&a.inverse()), Permutation::identity(4));
        assert_eq!(Permutation::from_cycles(6, &[&[0, 1, 2], &[3, 4]]).unwrap().order(), 6);
        assert!(Permutation::from_images(vec![0, 0, 1]).is_err());
        assert_eq!(Permutation::commutator(&a, &b).order(), 3);
    }

    #[test]
    fn symmetric_and_alternating_orders() {
        assert_eq!(symmetric_group(7).order(), 5040);
        assert_eq!(alternating_group(7).order(), 2520);
        assert_eq!(cyclic_group(12).order(), 12);
        assert_eq!(symmetric_group(1).order(), 1);
        let s7 = symmetric_group(7);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            assert!(s7.contains(&s7.random_word(12, &mut rng)));
        }
        let a7 = alternating_group(7);
        assert!(!a7.contains(&Permutation::from_cycles(7, &[&[0, 1]]).unwrap()));
        assert_eq!(s7.elements(10_000).unwrap().into_iter().collect::<HashSet<_>>().len(), 5040);
    }

    #[test]
    fn chain_with_base_prefix() {
        let s5 = symmetric_group(5);
        let chain = StabChain::with_base(5, s5.gens(), &[3, 1]);
        assert_eq!(&chain.base()[..2], &[3, 1]);
        assert_eq!(chain.order(), 120);
        assert_eq!(s5.stabilizer(2).order(), 24);
    }

    #[test]
    fn derived_and_simple() {
        let s7 = symmetric_group(7);
        let d = derived_subgroup(&s7);
        assert_eq!(d.order(), 2520);
        assert!(s7.is_normal_subgroup(&d));
        assert!(is_simple(&alternating_group(7), DEFAULT_ORDER_BUDGET).unwrap());
        assert!(!is_simple(&s7, DEFAULT_ORDER_BUDGET).unwrap());
        assert_eq!(derived_subgroup(&cyclic_group(9)).order(), 1);
        assert!(is_simple(&cyclic_group(5), DEFAULT_ORDER_BUDGET).unwrap());
        assert!(!is_simple(&alternating_group(4), DEFAULT_ORDER_BUDGET).unwrap());
        assert_eq!(conjugacy_classes(&symmetric_group(5), 1000).unwrap().len(), 7);
    }

    #[test]
    fn symplectic_orders() {
        for (m, q) in [(1, 2), (1, 3), (2, 2), (2, 3), (1, 4), (1, 9)] {
            let g = symplectic_group(m, q).unwrap();
            assert_eq!(g.order().unwrap(), sp_order(m as u32, q), "Sp{}({q})", 2 * m);
        }
        assert_eq!(sp_order(2, 3), 51840);
        assert_eq!(sp_order(1, 3), 24);
    }

    #[test]
    fn symplectic_forms_exhaustive() {
        for q in [2, 3] {
            let g = symplectic_group(2, q).unwrap();
            let f = g.field().clone();
            let vecs: Vec<Vec<Elem>> = (0..q.pow(4)).map(|i| vector_at(i, 4, q).into_iter().collect()).collect();
            let w = |x: &[Elem], y: &[Elem]| {
                (0..2).fold(Elem::ZERO, |acc, i| f.add(acc, f.sub(f.mul(x[2 * i], y[2 * i + 1]), f.mul(x[2 * i + 1], y[2 * i]))))
            };
            for t in g.gens() {
                for x in vecs.iter().take(40) {
                    for y in &vecs {
                        assert_eq!(w(&t.apply(x, &f), &t.apply(y, &f)), w(x, y));
                    }
                }
            }
        }
    }

    #[test]
    fn unitary_orders() {
        assert_eq!(su_order(4, 2), 25920);
        assert_eq!(u_order(3, 2), 648);
        for (n, q) in [(2, 2), (2, 3), (3, 2), (4, 2), (3, 3)] {
            let g = special_unitary_group(n, q, false).unwrap();
            assert_eq!(g.order().unwrap(), su_order(n as u32, q));
            for t in g.gens() {
                assert_eq!(t.det(g.field()), Elem::ONE);
            }
        }
        let u = special_unitary_group(3, 2, true).unwrap();
        assert_eq!(u.order().unwrap(), 648);
    }

    #[test]
    fn form_checks() {
        let g = special_unitary_group(3, 2, false).unwrap();
        let f = g.field().clone();
        let form = g.form().unwrap().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        assert!(preserves_form(&Matrix::identity(3), &form, &f).unwrap());
        for _ in 0..20 {
            let w = g.random_word(10, &mut rng);
            assert!(preserves_form(&w, &form, &f).unwrap());
            assert!(preserves_form(&w.inverse(&f).unwrap(), &form, &f).unwrap());
            assert!(g.contains(&w).unwrap());
        }
        let f9 = Gf::quadratic_extension(3, 1).unwrap();
        let d = Matrix::diagonal(&[f9.from_int(2), Elem::ONE, Elem::ONE]);
        // 2 * conj(2) = 4 = 1 in F_3, so diag(2,1,1) is unitary; a non-norm-one entry is not
        assert!(preserves_form(&d, &FormDescriptor::hermitian(3), &f9).unwrap());
        let bad = Matrix::diagonal(&[f9.generator(), Elem::ONE, Elem::ONE]);
        assert!(!preserves_form(&bad, &FormDescriptor::hermitian(3), &f9).unwrap());
        let f3 = Gf::prime(3).unwrap();
        let d = Matrix::diagonal(&[f3.from_int(2), Elem::ONE, Elem::ONE, Elem::ONE]);
        assert!(!preserves_form(&d, &FormDescriptor::symplectic(2, &f3), &f3).unwrap());
    }

    #[test]
    fn projective_images() {
        let sl29 = symplectic_group(1, 9).unwrap();
        let psl = projective_image(&sl29, 10_000).unwrap();
        assert_eq!(psl.group.degree(), 10);
        assert_eq!(psl.group.order(), 360);
        assert_eq!(psl.scalars, 2);
        assert!(psl.group.is_two_transitive());
        assert!(is_simple(&psl.group, DEFAULT_ORDER_BUDGET).unwrap());
        let sp43 = symplectic_group(2, 3).unwrap();
        let img = projective_image(&sp43, 10_000).unwrap();
        assert_eq!(img.group.order() * img.scalars as u128, sp43.order().unwrap());
        assert_eq!(img.group.order(), 25920);
        let scalar = MatrixGroup::new("scalar", sp43.field(), 4, vec![Matrix::scalar(4, Elem(2))], None).unwrap();
        assert!(projective_image(&scalar, 10_000).unwrap().group.gens()[0].is_identity());
    }

    #[test]
    fn weyl_group_e6() {
        let (w, roots) = weyl_e6().unwrap();
        assert_eq!(roots.len(), 72);
        // roots are all nonnegative or all nonpositive, half each
        assert!(roots.iter().all(|r| r.iter().all(|&c| c >= 0) || r.iter().all(|&c| c <= 0)));
        assert_eq!(roots.iter().filter(|r| r.iter().all(|&c| c >= 0)).count(), 36);
        assert_eq!(roots.iter().max_by_key(|r| r.iter().sum::<i32>()).unwrap(), &[1, 2, 2, 3, 2, 1]);
        assert_eq!(w.order(), 51840);
        assert_eq!(51840, 2u128.pow(7) * 81 * 5);
        for g in w.gens() {
            assert_eq!(g.order(), 2);
        }
        let d = derived_subgroup(&w);
        assert_eq!(d.order(), 25920);
    }

    #[test]
    fn stabilizers() {
        let s7 = symmetric_group(7);
        let (st, orbit) = point_stabilizer(&s7, |g, x: &u32| g.apply(*x), &0, 100).unwrap();
        assert_eq!((st.order(), orbit), (720, 7));
        let f7 = Gf::prime(7).unwrap();
        let act = |g: &Permutation, x: &Vec<Elem>| {
            let mut y = vec![Elem::ZERO; x.len()];
            for i in 0..x.len() {
                y[g.apply(i as u32) as usize] = x[i];
            }
            ProjectivePoint::normalize(y, &f7).unwrap().into_coords()
        };
        let vertex = vec![Elem::ONE; 7];
        let (st, orbit) = point_stabilizer(&s7, act, &vertex, 10_000).unwrap();
        assert_eq!((st.order(), orbit), (5040, 1));
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..100 {
            let i = rng.gen_range(0..137_257);
            let x = crate::projgeom::point_at(i, 7, &f7).into_coords();
            let (st, orbit) = point_stabilizer(&s7, act, &x, 10_000).unwrap();
            assert_eq!(st.order() * orbit as u128, 5040);
        }
    }

    #[test]
    fn central_products() {
        let z4 = cyclic_group(4);
        let r = z4.gens()[0].clone();
        let r2 = r.mul(&r);
        let id = z4.identity();
        let spec = CentralProductSpec { g: z4.clone(), h: z4.clone(), z1: vec![id.clone(), r2.clone()], z2: vec![id.clone(), r2.clone()] };
        let cp = central_product(&spec, 1000).unwrap();
        assert_eq!(cp.order(), 8);
        assert!(cp.g_injective && cp.h_injective);
        let s3 = symmetric_group(3);
        let direct = CentralProductSpec { g: s3.clone(), h: z4.clone(), z1: vec![s3.identity()], z2: vec![id.clone()] };
        assert_eq!(central_product(&direct, 1000).unwrap().order(), 24);
        let bad = CentralProductSpec { g: s3.clone(), h: z4.clone(), z1: vec![s3.identity(), s3.gens()[0].clone()], z2: vec![id, r2] };
        assert_eq!(central_product(&bad, 1000).unwrap_err(), GroupError::NotCentral(1));
    }
}


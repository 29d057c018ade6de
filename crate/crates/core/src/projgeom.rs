//! Projective spaces over finite fields: enumeration, point sets of
//! homogeneous systems, singular loci, and random linear slices.
//!
//! Points of `P^{n-1}` are normalized so the first nonzero coordinate is 1.
//! Enumeration runs in ascending lexicographic order of normalized tuples,
//! so the `i`-th point is also the `i`-th smallest, and [`point_index`]
//! inverts [`point_at`].

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::gf::{Elem, Gf, GfError};
use crate::linalg::Matrix;
use crate::mvpoly::{CompiledPoly, MultiPoly, PolyError};

pub const DEFAULT_POINT_BUDGET: u64 = 200_000_000;

/// Redraws allowed per slice before giving up.
const SLICE_RETRIES: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("enumeration of {needed} points exceeds the budget of {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("system member {0} is not homogeneous")]
    NotHomogeneous(usize),
    #[error("slice dimension {slice_dim} out of range for P^{ambient}")]
    SliceDim { slice_dim: usize, ambient: usize },
    #[error("no independent slice found after {0} draws")]
    DegenerateSlice(usize),
    #[error("all {0} slice trials were improper")]
    AllTrialsImproper(usize),
    #[error("the zero vector is not a projective point")]
    ZeroPoint,
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Field(#[from] GfError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjectivePoint(Vec<Elem>);

impl Serialize for ProjectivePoint {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.0.iter().map(|e| e.0).collect::<Vec<_>>().serialize(serializer)
    }
}

impl ProjectivePoint {
    /// Scale so the first nonzero coordinate becomes 1.
    pub fn normalize(mut coords: Vec<Elem>, f: &Gf) -> Result<Self, GeomError> {
        let lead = coords.iter().copied().find(|c| !c.is_zero()).ok_or(GeomError::ZeroPoint)?;
        if lead != Elem::ONE {
            let inv = f.inv(lead)?;
            for c in coords.iter_mut() {
                *c = f.mul(*c, inv);
            }
        }
        Ok(ProjectivePoint(coords))
    }

    /// Wrap coordinates already known to be normalized.
    pub fn from_normalized(coords: Vec<Elem>) -> Self {
        debug_assert!(coords.iter().find(|c| !c.is_zero()) == Some(&Elem::ONE));
        ProjectivePoint(coords)
    }

    pub fn coords(&self) -> &[Elem] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<Elem> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

/// `(q^n - 1) / (q - 1)`, the number of points of `P^{n-1}(F_q)`.
pub fn projective_count(n: usize, q: u64) -> u128 {
    let q = q as u128;
    (0..n as u32).map(|i| q.pow(i)).sum()
}

/// The `index`-th point of `P^{n-1}(F)` in enumeration order.
pub fn point_at(index: u64, n: usize, f: &Gf) -> ProjectivePoint {
    let q = f.size() as u64;
    let mut rest = index;
    for lead in (0..n).rev() {
        let tail = n - 1 - lead;
        let block = q.pow(tail as u32);
        if rest < block {
            let mut coords = vec![Elem::ZERO; n];
            coords[lead] = Elem::ONE;
            for i in (lead + 1..n).rev() {
                coords[i] = Elem((rest % q) as u32);
                rest /= q;
            }
            return ProjectivePoint(coords);
        }
        rest -= block;
    }
    panic!("point index {index} out of range");
}

/// Inverse of [`point_at`] for normalized coordinates.
pub fn point_index(coords: &[Elem], q: u32) -> u64 {
    let n = coords.len();
    let q = q as u64;
    let lead = coords.iter().position(|c| !c.is_zero()).expect("nonzero point");
    let mut offset = 0u64;
    for l in (lead + 1..n).rev() {
        offset += q.pow((n - 1 - l) as u32);
    }
    let tail = coords[lead + 1..].iter().fold(0u64, |acc, c| acc * q + c.0 as u64);
    offset + tail
}

fn check_budget(n: usize, q: u64, budget: u64) -> Result<u64, GeomError> {
    let needed = projective_count(n, q);
    if needed > budget as u128 {
        return Err(GeomError::BudgetExceeded { needed, budget });
    }
    Ok(needed as u64)
}

/// All points of `P^{n-1}(F)`, each exactly once, in ascending order.
pub fn enumerate_projective(
    n: usize,
    f: &Gf,
    budget: u64,
) -> Result<impl Iterator<Item = ProjectivePoint> + '_, GeomError> {
    let total = check_budget(n, f.size() as u64, budget)?;
    Ok((0..total).map(move |i| point_at(i, n, f)))
}

/// Visit every normalized point without allocating; returns the number
/// visited.
pub fn for_each_projective(
    n: usize,
    f: &Gf,
    budget: u64,
    mut visit: impl FnMut(&[Elem]),
) -> Result<u64, GeomError> {
    let total = check_budget(n, f.size() as u64, budget)?;
    let q = f.size();
    let mut coords = vec![Elem::ZERO; n];
    for lead in (0..n).rev() {
        coords.fill(Elem::ZERO);
        coords[lead] = Elem::ONE;
        'odometer: loop {
            visit(&coords);
            let mut i = n;
            loop {
                if i == lead + 1 {
                    break 'odometer;
                }
                i -= 1;
                if coords[i].0 + 1 < q {
                    coords[i].0 += 1;
                    break;
                }
                coords[i] = Elem::ZERO;
            }
        }
    }
    Ok(total)
}

/// Homogeneous equations over a common field.
#[derive(Debug, Clone)]
pub struct VarietySystem {
    nvars: usize,
    field: Gf,
    members: Vec<MultiPoly>,
}

impl VarietySystem {
    pub fn new(nvars: usize, field: &Gf, members: Vec<MultiPoly>) -> Result<Self, GeomError> {
        for (i, m) in members.iter().enumerate() {
            if m.field() != field {
                return Err(PolyError::FieldMismatch.into());
            }
            if m.nvars() != nvars {
                return Err(PolyError::DimensionMismatch { expected: nvars, got: m.nvars() }.into());
            }
            if !m.is_homogeneous() {
                return Err(GeomError::NotHomogeneous(i));
            }
        }
        Ok(VarietySystem { nvars, field: field.clone(), members })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn field(&self) -> &Gf {
        &self.field
    }

    pub fn members(&self) -> &[MultiPoly] {
        &self.members
    }

    pub fn with_member(&self, extra: MultiPoly) -> Result<Self, GeomError> {
        let mut members = self.members.clone();
        members.push(extra);
        Self::new(self.nvars, &self.field, members)
    }

    /// Total degrees of the members (zero members report 0).
    pub fn degrees(&self) -> Vec<u32> {
        self.members.iter().map(|m| m.total_degree().unwrap_or(0)).collect()
    }

    /// Product of member degrees, the Bezout ceiling for a proper slice.
    pub fn bezout_ceiling(&self) -> u64 {
        self.degrees().iter().map(|&d| d.max(1) as u64).product()
    }

    /// Move the system to another field of the same characteristic; needs
    /// prime-subfield coefficients.
    pub fn embed(&self, target: &Gf) -> Result<Self, GeomError> {
        let members = self.members.iter().map(|m| m.embed(target)).collect::<Result<Vec<_>, _>>()?;
        Self::new(self.nvars, target, members)
    }

    fn compiled(&self) -> Vec<CompiledPoly> {
        // cheapest first so most points are rejected early
        let mut ms: Vec<&MultiPoly> = self.members.iter().filter(|m| !m.is_zero()).collect();
        ms.sort_by_key(|m| (m.num_terms(), m.total_degree()));
        ms.into_iter().map(MultiPoly::compile).collect()
    }

    pub fn contains(&self, point: &ProjectivePoint) -> bool {
        self.members.iter().all(|m| m.evaluate(point.coords()).map(|v| v.is_zero()).unwrap_or(false))
    }
}

/// Points where every member vanishes, in sorted order.
pub fn variety_points(system: &VarietySystem, budget: u64) -> Result<BTreeSet<ProjectivePoint>, GeomError> {
    let compiled = system.compiled();
    let mut out = BTreeSet::new();
    for_each_projective(system.nvars, &system.field, budget, |x| {
        if compiled.iter().all(|c| c.eval(x).is_zero()) {
            out.insert(ProjectivePoint(x.to_vec()));
        }
    })?;
    Ok(out)
}

/// Like [`variety_points`] but only counts.
pub fn count_variety_points(system: &VarietySystem, budget: u64) -> Result<u64, GeomError> {
    let compiled = system.compiled();
    let mut count = 0u64;
    for_each_projective(system.nvars, &system.field, budget, |x| {
        if compiled.iter().all(|c| c.eval(x).is_zero()) {
            count += 1;
        }
    })?;
    Ok(count)
}

/// Jacobian-criterion locus: common zeros of `f` and all its partials.
pub fn singular_points(f: &MultiPoly, budget: u64) -> Result<BTreeSet<ProjectivePoint>, GeomError> {
    let n = f.nvars();
    let mut members = vec![f.clone()];
    for i in 0..n {
        let d = f.partial_derivative(i)?;
        if !d.is_zero() {
            members.push(d);
        }
    }
    let system = VarietySystem::new(n, f.field(), members)?;
    variety_points(&system, budget)
}

/// A system with its linear members solved away: points of the original
/// are `basis * t` for points `t` of `reduced`.
#[derive(Debug, Clone)]
pub struct LinearReduction {
    pub reduced: VarietySystem,
    /// `nvars x k`, columns spanning the common kernel of the linear members.
    pub basis: Matrix,
    /// Some member became a nonzero constant: no points at all.
    pub empty: bool,
}

impl LinearReduction {
    pub fn lift(&self, t: &[Elem]) -> Result<ProjectivePoint, GeomError> {
        ProjectivePoint::normalize(self.basis.apply(t, self.reduced.field()), self.reduced.field())
    }
}

pub fn eliminate_linear(system: &VarietySystem) -> Result<LinearReduction, GeomError> {
    let n = system.nvars;
    let f = &system.field;
    let linear: Vec<&MultiPoly> = system.members.iter().filter(|m| m.total_degree() == Some(1)).collect();
    let rows: Vec<Vec<Elem>> = linear
        .iter()
        .map(|m| {
            (0..n)
                .map(|j| {
                    let mut e = vec![0; n];
                    e[j] = 1;
                    m.coefficient(&e)
                })
                .collect()
        })
        .collect();
    let kernel = if rows.is_empty() {
        (0..n)
            .map(|j| {
                let mut v = vec![Elem::ZERO; n];
                v[j] = Elem::ONE;
                v
            })
            .collect()
    } else {
        Matrix::from_rows(&rows).kernel(f)
    };
    let k = kernel.len();
    let mut basis = Matrix::zeros(n, k);
    for (j, v) in kernel.iter().enumerate() {
        for i in 0..n {
            basis.set(i, j, v[i]);
        }
    }
    let mut empty = false;
    let mut reduced = Vec::new();
    for m in system.members.iter().filter(|m| m.total_degree() != Some(1)) {
        let r = m.substitute_linear_map(&basis)?;
        if r.is_zero() {
            continue;
        }
        if r.total_degree() == Some(0) {
            empty = true;
        }
        reduced.push(r);
    }
    Ok(LinearReduction { reduced: VarietySystem::new(k, f, reduced)?, basis, empty })
}

/// Distinct points, enumerating only the linear span cut out by the
/// degree-one members.
pub fn count_points_reduced(system: &VarietySystem, budget: u64) -> Result<u64, GeomError> {
    let red = eliminate_linear(system)?;
    if red.empty || red.reduced.nvars == 0 {
        return Ok(0);
    }
    count_variety_points(&red.reduced, budget)
}

/// Same as [`count_points_reduced`] but returns the points in ambient
/// coordinates.
pub fn points_reduced(system: &VarietySystem, budget: u64) -> Result<BTreeSet<ProjectivePoint>, GeomError> {
    let red = eliminate_linear(system)?;
    if red.empty || red.reduced.nvars == 0 {
        return Ok(BTreeSet::new());
    }
    variety_points(&red.reduced, budget)?
        .iter()
        .map(|t| red.lift(t.coords()))
        .collect()
}

/// A system restricted to a random linear `P^s` inside `P^{n-1}`.
#[derive(Debug, Clone)]
pub struct LinearSlice {
    /// The `n - 1 - s` random linear forms, one per row.
    pub forms: Matrix,
    /// `n x (s+1)` parameterization of the slice.
    pub param: Matrix,
    /// Members pulled back to the `s + 1` slice parameters.
    pub system: VarietySystem,
    /// Draws rejected as dependent before this one.
    pub redraws: usize,
}

pub fn random_linear_slice<R: Rng>(
    system: &VarietySystem,
    slice_dim: usize,
    rng: &mut R,
) -> Result<LinearSlice, GeomError> {
    let n = system.nvars;
    if n == 0 || slice_dim > n - 1 {
        return Err(GeomError::SliceDim { slice_dim, ambient: n.saturating_sub(1) });
    }
    let f = &system.field;
    let k = n - 1 - slice_dim;
    for redraws in 0..SLICE_RETRIES {
        let rows: Vec<Vec<Elem>> = (0..k).map(|_| (0..n).map(|_| Elem(rng.gen_range(0..f.size()))).collect()).collect();
        let kernel = if k == 0 {
            (0..n)
                .map(|j| {
                    let mut v = vec![Elem::ZERO; n];
                    v[j] = Elem::ONE;
                    v
                })
                .collect()
        } else {
            Matrix::from_rows(&rows).kernel(f)
        };
        if kernel.len() != slice_dim + 1 {
            continue;
        }
        let mut param = Matrix::zeros(n, slice_dim + 1);
        for (j, v) in kernel.iter().enumerate() {
            for i in 0..n {
                param.set(i, j, v[i]);
            }
        }
        let members = system
            .members
            .iter()
            .map(|m| m.substitute_linear_map(&param))
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(LinearSlice {
            forms: if k == 0 { Matrix::zeros(0, n) } else { Matrix::from_rows(&rows) },
            param,
            system: VarietySystem::new(slice_dim + 1, f, members)?,
            redraws,
        });
    }
    Err(GeomError::DegenerateSlice(SLICE_RETRIES))
}

#[derive(Debug, Clone, Serialize)]
pub struct SliceTrial {
    pub seed: u64,
    pub count: u64,
    pub proper: bool,
    pub redraws: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SliceStats {
    pub field_size: u32,
    pub slice_dim: usize,
    pub ceiling: u64,
    /// `None` when every trial was improper.
    pub min: Option<u64>,
    pub max: Option<u64>,
    pub histogram: BTreeMap<u64, u64>,
    pub improper_count: usize,
    pub trials: Vec<SliceTrial>,
}

/// Seed of the `i`-th trial, derived from the run seed.
pub fn trial_seed(seed: u64, i: u64) -> u64 {
    // splitmix64 step
    let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(i + 1));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Count distinct points on `trials` random slices. A trial is improper
/// when its count exceeds `ceiling` (default: the Bezout ceiling); a slice
/// on which some member vanishes identically is redrawn.
pub fn slice_point_count(
    system: &VarietySystem,
    slice_dim: usize,
    trials: usize,
    seed: u64,
    ceiling: Option<u64>,
    budget: u64,
) -> Result<SliceStats, GeomError> {
    let ceiling = ceiling.unwrap_or_else(|| system.bezout_ceiling());
    let results: Vec<Result<SliceTrial, GeomError>> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let s = trial_seed(seed, i);
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let mut redraws = 0;
            let slice = loop {
                let sl = random_linear_slice(system, slice_dim, &mut rng)?;
                redraws += sl.redraws;
                if sl.system.members.iter().all(|m| !m.is_zero()) {
                    break sl;
                }
                redraws += 1;
                if redraws > SLICE_RETRIES {
                    return Err(GeomError::DegenerateSlice(redraws));
                }
            };
            let count = count_points_reduced(&slice.system, budget)?;
            Ok(SliceTrial { seed: s, count, proper: count <= ceiling, redraws })
        })
        .collect();
    let trials_out = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let proper: Vec<u64> = trials_out.iter().filter(|t| t.proper).map(|t| t.count).collect();
    let improper_count = trials_out.len() - proper.len();
    if proper.is_empty() && !trials_out.is_empty() {
        return Err(GeomError::AllTrialsImproper(trials_out.len()));
    }
    let mut histogram = BTreeMap::new();
    for t in &trials_out {
        *histogram.entry(t.count).or_insert(0) += 1;
    }
    Ok(SliceStats {
        field_size: system.field.size(),
        slice_dim,
        ceiling,
        min: proper.iter().copied().min(),
        max: proper.iter().copied().max(),
        histogram,
        improper_count,
        trials: trials_out,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthLevel {
    pub m: u32,
    pub field_size: u32,
    /// `None` when the level was beyond budget.
    pub count: Option<u64>,
    /// `log_{q^m}(count)`.
    pub dimension_estimate: Option<f64>,
}

/// Point counts over `F_{q^m}` for `m = 1..=levels`, where `F_q` is the
/// system's field. Levels past the budget are truncated, not errors.
pub fn point_count_growth(
    system: &VarietySystem,
    levels: u32,
    budget: u64,
    field_bound: u64,
) -> Result<Vec<GrowthLevel>, GeomError> {
    let base = system.field();
    let mut out = Vec::new();
    for m in 1..=levels {
        let field = if m == 1 { Ok(base.clone()) } else { base.extension(m, field_bound) };
        let level = match field {
            Err(GfError::TooLarge { .. }) => GrowthLevel { m, field_size: 0, count: None, dimension_estimate: None },
            Err(e) => return Err(e.into()),
            Ok(fm) => {
                let sys = if m == 1 { system.clone() } else { system.embed(&fm)? };
                match count_points_reduced(&sys, budget) {
                    Ok(c) => GrowthLevel {
                        m,
                        field_size: fm.size(),
                        count: Some(c),
                        dimension_estimate: (c > 0).then(|| (c as f64).ln() / (fm.size() as f64).ln()),
                    },
                    Err(GeomError::BudgetExceeded { .. }) => {
                        GrowthLevel { m, field_size: fm.size(), count: None, dimension_estimate: None }
                    }
                    Err(e) => return Err(e),
                }
            }
        };
        out.push(level);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mvpoly::{elementary_symmetric, hermitian_norm_poly, symplectic_form_poly};

    #[test]
    fn projective_counts() {
        let f9 = Gf::new(3, 2).unwrap();
        assert_eq!(enumerate_projective(2, &f9, DEFAULT_POINT_BUDGET).unwrap().count(), 10);
        let f4 = Gf::new(2, 2).unwrap();
        assert_eq!(enumerate_projective(3, &f4, DEFAULT_POINT_BUDGET).unwrap().count(), 21);
        let f7 = Gf::prime(7).unwrap();
        let n = for_each_projective(7, &f7, DEFAULT_POINT_BUDGET, |_| {}).unwrap();
        assert_eq!(n, (7u64.pow(7) - 1) / 6);
        assert_eq!(n, 137_257);
        assert!(matches!(
            enumerate_projective(7, &f7, 1000).err().unwrap(),
            GeomError::BudgetExceeded { .. }
        ));
    }

    #[test]
    fn enumeration_is_sorted_and_indexed() {
        let f5 = Gf::prime(5).unwrap();
        let pts: Vec<_> = enumerate_projective(4, &f5, DEFAULT_POINT_BUDGET).unwrap().collect();
        let mut sorted = pts.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(pts, sorted);
        let mut visited = Vec::new();
        for_each_projective(4, &f5, DEFAULT_POINT_BUDGET, |x| visited.push(ProjectivePoint(x.to_vec()))).unwrap();
        assert_eq!(visited, pts);
        for (i, p) in pts.iter().enumerate() {
            assert_eq!(point_index(p.coords(), 5), i as u64);
        }
    }

    #[test]
    fn simple_varieties() {
        let f5 = Gf::prime(5).unwrap();
        let x1 = MultiPoly::var(2, &f5, 0);
        let sys = VarietySystem::new(2, &f5, vec![x1]).unwrap();
        let pts = variety_points(&sys, DEFAULT_POINT_BUDGET).unwrap();
        assert_eq!(pts.into_iter().collect::<Vec<_>>(), vec![ProjectivePoint(vec![Elem(0), Elem(1)])]);
        let empty = VarietySystem::new(3, &f5, vec![]).unwrap();
        assert_eq!(variety_points(&empty, DEFAULT_POINT_BUDGET).unwrap().len(), 31);
        let bad = MultiPoly::var(2, &f5, 0).add(&MultiPoly::constant(2, &f5, Elem(1)));
        assert_eq!(VarietySystem::new(2, &f5, vec![bad]).unwrap_err(), GeomError::NotHomogeneous(0));
    }

    #[test]
    fn y123_contains_vertex() {
        let f7 = Gf::prime(7).unwrap();
        let members = (1..=3).map(|j| elementary_symmetric(7, j, &f7).unwrap()).collect();
        let sys = VarietySystem::new(7, &f7, members).unwrap();
        let pts = variety_points(&sys, DEFAULT_POINT_BUDGET).unwrap();
        assert!(pts.contains(&ProjectivePoint(vec![Elem(1); 7])));
        assert_eq!(count_variety_points(&sys, DEFAULT_POINT_BUDGET).unwrap(), pts.len() as u64);
        assert_eq!(points_reduced(&sys, DEFAULT_POINT_BUDGET).unwrap(), pts);
    }

    #[test]
    fn singular_loci() {
        let f4 = Gf::quadratic_extension(2, 1).unwrap();
        assert!(singular_points(&hermitian_norm_poly(3, 2, &f4), DEFAULT_POINT_BUDGET).unwrap().is_empty());
        let f9 = Gf::new(3, 2).unwrap();
        assert!(singular_points(&symplectic_form_poly(2, &f9), DEFAULT_POINT_BUDGET).unwrap().is_empty());
        let f2 = Gf::prime(2).unwrap();
        let dbl = MultiPoly::var(3, &f2, 0).pow(2);
        let sing = singular_points(&dbl, DEFAULT_POINT_BUDGET).unwrap();
        assert_eq!(sing.len(), 3);
        assert!(sing.iter().all(|p| p.coords()[0].is_zero()));
    }

    #[test]
    fn slices_of_linear_spaces() {
        let f = Gf::prime(11).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let empty = VarietySystem::new(3, &f, vec![]).unwrap();
        let sl = random_linear_slice(&empty, 1, &mut rng).unwrap();
        assert_eq!(sl.system.nvars(), 2);
        assert_eq!(count_points_reduced(&sl.system, DEFAULT_POINT_BUDGET).unwrap(), 12);
        let s1 = elementary_symmetric(7, 1, &f).unwrap();
        let hyper = VarietySystem::new(7, &f, vec![s1]).unwrap();
        let stats = slice_point_count(&hyper, 1, 20, 5, None, DEFAULT_POINT_BUDGET).unwrap();
        assert_eq!(stats.max, Some(1));
        assert_eq!(stats.min, Some(1));
        assert!(random_linear_slice(&hyper, 7, &mut rng).is_err());
    }

    #[test]
    fn slice_bookkeeping_for_y123() {
        let f = Gf::prime(7).unwrap();
        let members = (1..=3).map(|j| elementary_symmetric(7, j, &f).unwrap()).collect();
        let sys = VarietySystem::new(7, &f, members).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let sl = random_linear_slice(&sys, 3, &mut rng).unwrap();
        assert_eq!(sl.system.nvars(), 4);
        assert_eq!(sl.forms.rows(), 3);
        assert_eq!(sl.system.degrees(), vec![1, 2, 3]);
        // every slice point lifts into the original system
        let pts = points_reduced(&sl.system, DEFAULT_POINT_BUDGET).unwrap();
        for t in &pts {
            let x = ProjectivePoint::normalize(sl.param.apply(t.coords(), &f), &f).unwrap();
            assert!(sys.contains(&x));
        }
    }

    #[test]
    fn conic_slices() {
        // x1 x3 - x2^2 over F_25
        let f = Gf::new(5, 2).unwrap();
        let x = |i| MultiPoly::var(3, &f, i);
        let conic = x(0).mul(&x(2)).sub(&x(1).pow(2));
        let sys = VarietySystem::new(3, &f, vec![conic]).unwrap();
        let stats = slice_point_count(&sys, 1, 40, 9, None, DEFAULT_POINT_BUDGET).unwrap();
        assert_eq!(stats.max, Some(2));
        assert_eq!(stats.improper_count, 0);
    }

    #[test]
    fn growth_of_linear_spaces() {
        let f2 = Gf::prime(2).unwrap();
        let n = 4;
        let s1 = elementary_symmetric(n, 1, &f2).unwrap();
        let hyper = VarietySystem::new(n, &f2, vec![s1]).unwrap();
        let levels = point_count_growth(&hyper, 3, DEFAULT_POINT_BUDGET, 1 << 20).unwrap();
        for l in &levels {
            let qm = 2u64.pow(l.m);
            assert_eq!(l.count, Some((qm.pow(n as u32 - 1) - 1) / (qm - 1)));
        }
        let est = levels[2].dimension_estimate.unwrap();
        assert!((est - (n as f64 - 2.0)).abs() < 0.1);
        let whole = VarietySystem::new(n, &f2, vec![]).unwrap();
        let levels = point_count_growth(&whole, 3, DEFAULT_POINT_BUDGET, 1 << 20).unwrap();
        assert!((levels[2].dimension_estimate.unwrap() - (n as f64 - 1.0)).abs() < 0.1);
        let levels = point_count_growth(&whole, 2, 10, 1 << 20).unwrap();
        assert_eq!(levels[1].count, None);
    }
}

//! Half-spaces, open polyhedra, LP wrappers, mixed-integer lattice-freeness,
//! and lattice-free sub-selection.
//!
//! Lattice-freeness here means empty intersection with Z^n x R^d. The check
//! is exact whenever the closure of the polyhedron fits inside the inflated
//! box; otherwise it reports inconclusive rather than guessing. Everything
//! is generic over [`Scalar`], so the affine-only rational path reuses the
//! same code with zero tolerances.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::problem::{enumerate_lattice, BoundingBox};
use crate::scalar::Scalar;
use crate::simplex::{feasible_unbounded, lp_solve, LpOutcome};

/// `{x : normal . x < offset}` when `strict`, else `<=`.
///
/// A zero normal is the degenerate encoding: a strict row with offset <= 0
/// (or a weak row with offset < 0) denotes the empty set, anything else the
/// whole space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Serialize",
    deserialize = "T: serde::de::DeserializeOwned"
))]
pub struct HalfSpace<T = f64> {
    pub normal: Vec<T>,
    pub offset: T,
    pub strict: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Degenerate {
    Empty,
    WholeSpace,
}

impl<T: Scalar> HalfSpace<T> {
    pub fn strict(normal: Vec<T>, offset: T) -> Self {
        HalfSpace { normal, offset, strict: true }
    }

    pub fn weak(normal: Vec<T>, offset: T) -> Self {
        HalfSpace { normal, offset, strict: false }
    }

    fn degenerate(&self) -> Option<Degenerate> {
        if self.normal.iter().any(|v| !v.is_zero()) {
            return None;
        }
        let empty = if self.strict {
            self.offset <= T::zero()
        } else {
            self.offset < T::zero()
        };
        Some(if empty { Degenerate::Empty } else { Degenerate::WholeSpace })
    }

    /// `offset - normal . x`; membership means positive (strict) or
    /// nonnegative (weak) slack.
    pub fn slack(&self, x: &[T]) -> T {
        let dot = self
            .normal
            .iter()
            .zip(x)
            .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone());
        self.offset.clone() - dot
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> HalfSpace<U> {
        HalfSpace {
            normal: self.normal.iter().map(&f).collect(),
            offset: f(&self.offset),
            strict: self.strict,
        }
    }
}

impl HalfSpace<f64> {
    pub fn to_rational(&self) -> HalfSpace<num_rational::BigRational> {
        self.map(|&v| Scalar::from_f64(v))
    }
}

/// Intersection of half-spaces; an empty list is the whole space.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Serialize",
    deserialize = "T: serde::de::DeserializeOwned"
))]
pub struct OpenPolyhedron<T = f64> {
    pub halfspaces: Vec<HalfSpace<T>>,
}

impl<T: Scalar> OpenPolyhedron<T> {
    pub fn new(halfspaces: Vec<HalfSpace<T>>) -> Self {
        OpenPolyhedron { halfspaces }
    }

    pub fn dim(&self) -> usize {
        self.halfspaces.first().map_or(0, |h| h.normal.len())
    }

    /// Strict membership with margin: strict rows need slack > margin, weak
    /// rows need slack >= 0.
    pub fn contains_strictly(&self, x: &[T], margin: &T) -> bool {
        self.halfspaces.iter().all(|h| {
            let s = h.slack(x);
            if h.strict {
                s > margin.clone()
            } else {
                s >= T::zero()
            }
        })
    }

    fn subset(&self, indices: &[usize]) -> OpenPolyhedron<T> {
        OpenPolyhedron {
            halfspaces: indices.iter().map(|&i| self.halfspaces[i].clone()).collect(),
        }
    }
}

impl OpenPolyhedron<f64> {
    pub fn to_rational(&self) -> OpenPolyhedron<num_rational::BigRational> {
        OpenPolyhedron {
            halfspaces: self.halfspaces.iter().map(|h| h.to_rational()).collect(),
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let p: OpenPolyhedron<f64> = serde_json::from_str(text)
            .map_err(|e| CoreError::InvalidProblem(format!("polyhedron JSON: {e}")))?;
        let dim = p.dim();
        if p.halfspaces.iter().any(|h| h.normal.len() != dim) {
            return Err(CoreError::InvalidProblem(
                "halfspace normals disagree on dimension".into(),
            ));
        }
        let finite = p
            .halfspaces
            .iter()
            .all(|h| h.offset.is_finite() && h.normal.iter().all(|v| v.is_finite()));
        if !finite {
            return Err(CoreError::InvalidProblem("non-finite halfspace data".into()));
        }
        Ok(p)
    }
}

/// Minimize `c . x` over the closure of the half-space list intersected with
/// the box; `Unbounded` cannot occur because the box is finite.
pub fn lp_minimize<T: Scalar>(
    c: &[T],
    halfspaces: &[HalfSpace<T>],
    lo: &[T],
    hi: &[T],
) -> Result<LpOutcome<T>> {
    let mut rows = Vec::with_capacity(halfspaces.len());
    for h in halfspaces {
        if let Some(d) = h.degenerate() {
            match d {
                Degenerate::Empty => return Ok(LpOutcome::Infeasible),
                Degenerate::WholeSpace => continue,
            }
        }
        rows.push((h.normal.clone(), h.offset.clone()));
    }
    lp_solve(c, &rows, lo, hi)
}

/// Result of a lattice-freeness query.
#[derive(Debug, Clone, PartialEq)]
pub enum LatticeStatus<T> {
    /// No point of Z^n x R^d lies (strictly) inside the polyhedron, exactly
    /// whenever the closure fits in the inflated box.
    LatticeFree,
    /// A mixed-integer point strictly inside (coordinates in order z, y).
    Witness(Vec<T>),
    /// The closure reaches the inflated box boundary (or lives entirely
    /// outside it); far-away integer fibers cannot be excluded.
    UnboundedInconclusive,
}

/// Search the fiber `z` for a point of the open polyhedron: some `y` in the
/// box's continuous block with every strict row satisfied by more than
/// `strict_margin` and every weak row satisfied. Returns the witness `y`.
pub fn strict_feasible_on_fiber<T: Scalar>(
    poly: &OpenPolyhedron<T>,
    z: &[i64],
    lo: &[T],
    hi: &[T],
    strict_margin: &T,
) -> Result<Option<Vec<T>>> {
    let n = z.len();
    let d = lo.len().checked_sub(n).ok_or(CoreError::DimensionMismatch {
        expected: n,
        found: lo.len(),
    })?;
    let zt: Vec<T> = z.iter().map(|&v| T::from_i64(v)).collect();

    // Rows reduce on the fiber to cont_normal . y {<,<=} constant.
    let mut lp_rows: Vec<(Vec<T>, T, bool)> = Vec::new();
    for h in &poly.halfspaces {
        if let Some(deg) = h.degenerate() {
            match deg {
                Degenerate::Empty => return Ok(None),
                Degenerate::WholeSpace => continue,
            }
        }
        let int_dot = h.normal[..n]
            .iter()
            .zip(&zt)
            .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone());
        let constant = h.offset.clone() - int_dot;
        let cont: Vec<T> = h.normal[n..].to_vec();
        if cont.iter().all(|v| v.is_zero()) {
            let ok = if h.strict {
                constant > strict_margin.clone()
            } else {
                constant >= T::zero()
            };
            if !ok {
                return Ok(None);
            }
        } else {
            lp_rows.push((cont, constant, h.strict));
        }
    }
    if d == 0 || lp_rows.is_empty() {
        let y: Vec<T> = lo[n..]
            .iter()
            .zip(&hi[n..])
            .map(|(l, h)| (l.clone() + h.clone()) / T::from_i64(2))
            .collect();
        return Ok(Some(y));
    }

    // Maximize the minimum slack t of the strict rows; weak rows hold as is.
    let has_strict = lp_rows.iter().any(|(_, _, s)| *s);
    let y_lo = &lo[n..];
    let y_hi = &hi[n..];
    let mut big = T::one();
    for (cont, constant, _) in &lp_rows {
        let mut bound = constant.abs();
        for (j, cj) in cont.iter().enumerate() {
            let mag = if y_lo[j].abs() > y_hi[j].abs() {
                y_lo[j].abs()
            } else {
                y_hi[j].abs()
            };
            bound = bound + cj.abs() * mag;
        }
        if bound > big {
            big = bound;
        }
    }
    big = big + T::one();

    let nvars = d + usize::from(has_strict);
    let mut rows: Vec<(Vec<T>, T)> = Vec::with_capacity(lp_rows.len());
    for (cont, constant, strict) in &lp_rows {
        let mut coeffs = cont.clone();
        if has_strict {
            coeffs.push(if *strict { T::one() } else { T::zero() });
        }
        rows.push((coeffs, constant.clone()));
    }
    let mut c = vec![T::zero(); nvars];
    let mut vlo: Vec<T> = y_lo.to_vec();
    let mut vhi: Vec<T> = y_hi.to_vec();
    if has_strict {
        c[d] = -T::one();
        vlo.push(-big.clone());
        vhi.push(big.clone());
    }
    match lp_minimize(
        &c,
        &rows
            .iter()
            .map(|(a, b)| HalfSpace::weak(a.clone(), b.clone()))
            .collect::<Vec<_>>(),
        &vlo,
        &vhi,
    )? {
        LpOutcome::Infeasible => Ok(None),
        LpOutcome::Optimal { x, .. } => {
            if has_strict {
                let t = x[d].clone();
                if t > strict_margin.clone() {
                    Ok(Some(x[..d].to_vec()))
                } else {
                    Ok(None)
                }
            } else {
                Ok(Some(x[..d].to_vec()))
            }
        }
    }
}

/// Decide whether the open polyhedron misses Z^n x R^d.
///
/// Bounds of the closure are probed against a box inflated by factor 2 plus
/// margin 1. Candidate integer fibers within the probed ranges are always
/// enumerated first (a found witness is sound regardless of boundedness);
/// only a witness-free touching run is inconclusive. Fibers are scanned in
/// lexicographic order and the lowest witness wins regardless of thread
/// scheduling.
pub fn mixed_lattice_free<T: Scalar>(
    poly: &OpenPolyhedron<T>,
    bounds: &BoundingBox,
    n: usize,
    strict_margin: &T,
    budget: usize,
) -> Result<LatticeStatus<T>> {
    let dim = bounds.dim();
    for h in &poly.halfspaces {
        if h.normal.len() != dim {
            return Err(CoreError::DimensionMismatch { expected: dim, found: h.normal.len() });
        }
        if h.degenerate() == Some(Degenerate::Empty) {
            return Ok(LatticeStatus::LatticeFree);
        }
    }

    let inflated = bounds.inflate(2.0, 1.0);
    let ilo: Vec<T> = inflated.lo.iter().map(|&v| T::from_f64(v)).collect();
    let ihi: Vec<T> = inflated.hi.iter().map(|&v| T::from_f64(v)).collect();
    let weak_rows: Vec<HalfSpace<T>> = poly
        .halfspaces
        .iter()
        .map(|h| HalfSpace::weak(h.normal.clone(), h.offset.clone()))
        .collect();

    let free_coord: Vec<bool> = (0..dim)
        .map(|i| poly.halfspaces.iter().all(|h| h.normal[i].is_zero()))
        .collect();
    let touch_tol = if T::pivot_eps().is_zero() { T::zero() } else { T::from_f64(1e-6) };

    let mut touched = false;
    let mut coord_bounds: Vec<Option<(T, T)>> = vec![None; dim];
    for i in 0..dim {
        if free_coord[i] {
            continue;
        }
        let mut c = vec![T::zero(); dim];
        c[i] = T::one();
        let min_i = match lp_minimize(&c, &weak_rows, &ilo, &ihi)? {
            LpOutcome::Infeasible => {
                // Empty within the inflated box; decide global emptiness.
                let rows: Vec<(Vec<T>, T)> = weak_rows
                    .iter()
                    .map(|h| (h.normal.clone(), h.offset.clone()))
                    .collect();
                return if feasible_unbounded(dim, &rows)? {
                    Ok(LatticeStatus::UnboundedInconclusive)
                } else {
                    Ok(LatticeStatus::LatticeFree)
                };
            }
            LpOutcome::Optimal { value, .. } => value,
        };
        c[i] = -T::one();
        let max_i = match lp_minimize(&c, &weak_rows, &ilo, &ihi)? {
            LpOutcome::Infeasible => unreachable!("feasibility established above"),
            LpOutcome::Optimal { value, .. } => -value,
        };
        if min_i <= ilo[i].clone() + touch_tol.clone() || max_i >= ihi[i].clone() - touch_tol.clone()
        {
            touched = true;
        }
        coord_bounds[i] = Some((min_i, max_i));
    }

    // Integer candidate ranges; free integer coordinates are cylinders, any
    // single representative value suffices.
    let mut ranges: Vec<(i64, i64)> = Vec::with_capacity(n);
    for i in 0..n {
        match &coord_bounds[i] {
            None => {
                let lo_i = Scalar::ceil_i64(&ilo[i]);
                let hi_i = Scalar::floor_i64(&ihi[i]);
                let rep = 0i64.clamp(lo_i, hi_i.max(lo_i));
                ranges.push((rep, rep));
            }
            Some((min_i, max_i)) => {
                ranges.push((min_i.ceil_i64(), max_i.floor_i64()));
            }
        }
    }

    let candidates = enumerate_lattice(&ranges, budget)?;
    let hit = candidates
        .par_iter()
        .find_first(|z| {
            matches!(
                strict_feasible_on_fiber(poly, z, &ilo, &ihi, strict_margin),
                Ok(Some(_))
            )
        })
        .cloned();
    if let Some(z) = hit {
        let y = strict_feasible_on_fiber(poly, &z, &ilo, &ihi, strict_margin)?
            .expect("witness fiber re-solves");
        let mut point: Vec<T> = z.iter().map(|&v| T::from_i64(v)).collect();
        point.extend(y);
        return Ok(LatticeStatus::Witness(point));
    }
    if touched {
        Ok(LatticeStatus::UnboundedInconclusive)
    } else {
        Ok(LatticeStatus::LatticeFree)
    }
}

/// Output of [`doignon_select`].
#[derive(Debug, Clone, PartialEq)]
pub struct DoignonSelection {
    /// Surviving half-space indices into the input list, in input order.
    pub indices: Vec<usize>,
    /// Whether the exhaustive fallback ran.
    pub exhaustive: bool,
}

/// Shrink a lattice-free half-space list to at most `2^n` members by greedy
/// deletion, falling back to exhaustive subset search. The `must_keep`
/// index is never dropped.
///
/// The input intersection must already be certified lattice-free. For
/// systems whose normals vanish on the continuous block the greedy phase
/// provably lands within the bound; a genuinely mixed system may have no
/// valid subset of size `2^n`, which is reported as `NoValidSubset`.
pub fn doignon_select<T: Scalar>(
    poly: &OpenPolyhedron<T>,
    bounds: &BoundingBox,
    n: usize,
    must_keep: Option<usize>,
    strict_margin: &T,
    budget: usize,
) -> Result<DoignonSelection> {
    let k = poly.halfspaces.len();
    let limit = 1usize << n;
    match mixed_lattice_free(poly, bounds, n, strict_margin, budget)? {
        LatticeStatus::LatticeFree => {}
        _ => {
            return Err(CoreError::GuardViolated(
                "doignon_select input is not certified lattice-free".into(),
            ))
        }
    }

    let mut kept: Vec<usize> = (0..k).collect();
    let mut idx = 0;
    while idx < kept.len() {
        let candidate = kept[idx];
        if Some(candidate) == must_keep {
            idx += 1;
            continue;
        }
        let trial: Vec<usize> = kept
            .iter()
            .copied()
            .filter(|&i| i != candidate)
            .collect();
        let still_free = matches!(
            mixed_lattice_free(&poly.subset(&trial), bounds, n, strict_margin, budget),
            Ok(LatticeStatus::LatticeFree)
        );
        if still_free {
            kept = trial;
        } else {
            idx += 1;
        }
    }
    if kept.len() <= limit {
        return Ok(DoignonSelection { indices: kept, exhaustive: false });
    }

    // Exhaustive search over subsets of size <= 2^n containing must_keep.
    let mut combos_checked = 0usize;
    for size in 1..=limit.min(k) {
        let mut combo: Vec<usize> = (0..size).collect();
        loop {
            let admissible = must_keep.map_or(true, |mk| combo.contains(&mk));
            if admissible {
                combos_checked += 1;
                if combos_checked > 500_000 {
                    return Err(CoreError::BudgetExceeded { budget: 500_000 });
                }
                if matches!(
                    mixed_lattice_free(&poly.subset(&combo), bounds, n, strict_margin, budget),
                    Ok(LatticeStatus::LatticeFree)
                ) {
                    return Ok(DoignonSelection { indices: combo, exhaustive: true });
                }
            }
            if !next_combination(&mut combo, k) {
                break;
            }
        }
    }
    Err(CoreError::NoValidSubset { limit })
}

/// Advance to the next lexicographic `combo.len()`-subset of `{0, .., k-1}`.
fn next_combination(combo: &mut [usize], k: usize) -> bool {
    let size = combo.len();
    for pos in (0..size).rev() {
        if combo[pos] < k - (size - pos) {
            combo[pos] += 1;
            for j in (pos + 1)..size {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

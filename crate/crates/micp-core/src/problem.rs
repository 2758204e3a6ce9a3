//! Problem model: mixed-integer convex programs over a finite box.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::expr::ConvexExpr;
use crate::tol::Tolerances;

/// A point in R^{n+d}; the first `n` coordinates form the integer block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point {
    pub coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point { coords }
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// True when the first `n` coordinates are within `tol_int` of integers.
    pub fn is_mixed_integer(&self, n: usize, tol_int: f64) -> bool {
        self.coords[..n]
            .iter()
            .all(|&c| (c - c.round()).abs() <= tol_int)
    }

    /// Rounded integer block (callers check `is_mixed_integer` first).
    pub fn integer_block(&self, n: usize) -> Vec<i64> {
        self.coords[..n].iter().map(|c| c.round() as i64).collect()
    }
}

impl From<Vec<f64>> for Point {
    fn from(coords: Vec<f64>) -> Self {
        Point { coords }
    }
}

/// Finite per-coordinate bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoundingBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        BoundingBox { lo, hi }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.lo.len() != self.hi.len() {
            return Err(CoreError::DimensionMismatch {
                expected: self.lo.len(),
                found: self.hi.len(),
            });
        }
        for (i, (&l, &h)) in self.lo.iter().zip(&self.hi).enumerate() {
            if !(l.is_finite() && h.is_finite()) {
                return Err(CoreError::InvalidProblem(format!(
                    "box must be finite in every coordinate (coordinate {i})"
                )));
            }
            if l > h {
                return Err(CoreError::InvalidProblem(format!(
                    "box has lo > hi at coordinate {i}"
                )));
            }
        }
        Ok(())
    }

    pub fn contains(&self, x: &[f64], slack: f64) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(&xi, (&l, &h))| xi >= l - slack && xi <= h + slack)
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(l, h)| 0.5 * (l + h)).collect()
    }

    /// Widen each coordinate about its center by factor `kappa` plus an
    /// absolute margin on each side.
    pub fn inflate(&self, kappa: f64, margin: f64) -> BoundingBox {
        let mut lo = Vec::with_capacity(self.dim());
        let mut hi = Vec::with_capacity(self.dim());
        for (&l, &h) in self.lo.iter().zip(&self.hi) {
            let c = 0.5 * (l + h);
            let half = 0.5 * (h - l) * kappa + margin;
            lo.push(c - half);
            hi.push(c + half);
        }
        BoundingBox { lo, hi }
    }

    /// All corners, for probe sets. Only sensible at desk-scale dimension.
    pub fn corners(&self) -> Vec<Vec<f64>> {
        let dim = self.dim();
        let mut out = Vec::with_capacity(1 << dim.min(16));
        for mask in 0u64..(1u64 << dim) {
            let corner: Vec<f64> = (0..dim)
                .map(|i| if mask >> i & 1 == 0 { self.lo[i] } else { self.hi[i] })
                .collect();
            out.push(corner);
        }
        out
    }

    /// Integer values available in coordinate `i`.
    pub fn integer_range(&self, i: usize) -> (i64, i64) {
        ((self.lo[i] - 1e-9).ceil() as i64, (self.hi[i] + 1e-9).floor() as i64)
    }

    /// Bounds of the continuous block, coordinates `n..`.
    pub fn continuous_block(&self, n: usize) -> BoundingBox {
        BoundingBox {
            lo: self.lo[n..].to_vec(),
            hi: self.hi[n..].to_vec(),
        }
    }
}

/// Enumerate all integer vectors of the given per-coordinate ranges in
/// lexicographic order, capped by `budget`.
pub fn enumerate_lattice(ranges: &[(i64, i64)], budget: usize) -> Result<Vec<Vec<i64>>> {
    let mut count: usize = 1;
    for &(lo, hi) in ranges {
        if hi < lo {
            return Ok(Vec::new());
        }
        let width = (hi - lo + 1) as usize;
        count = count.saturating_mul(width);
        if count > budget {
            return Err(CoreError::BudgetExceeded { budget });
        }
    }
    let mut out = Vec::with_capacity(count);
    let mut current: Vec<i64> = ranges.iter().map(|&(lo, _)| lo).collect();
    if ranges.is_empty() {
        out.push(Vec::new());
        return Ok(out);
    }
    loop {
        out.push(current.clone());
        let mut k = ranges.len();
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            if current[k] < ranges[k].1 {
                current[k] += 1;
                for j in (k + 1)..ranges.len() {
                    current[j] = ranges[j].0;
                }
                break;
            }
        }
    }
}

/// A mixed-integer convex program: minimize `objective` over the box subject
/// to every constraint being nonpositive, with the first `n` variables
/// integral.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Problem {
    pub n: usize,
    pub d: usize,
    pub objective: ConvexExpr,
    pub constraints: Vec<ConvexExpr>,
    #[serde(rename = "box")]
    pub bounds: BoundingBox,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl Problem {
    pub fn dim(&self) -> usize {
        self.n + self.d
    }

    /// Constraint count.
    pub fn m(&self) -> usize {
        self.constraints.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim() == 0 {
            return Err(CoreError::InvalidProblem("n + d must be at least 1".into()));
        }
        self.tolerances
            .validate()
            .map_err(CoreError::InvalidProblem)?;
        self.bounds.validate()?;
        if self.bounds.dim() != self.dim() {
            return Err(CoreError::DimensionMismatch {
                expected: self.dim(),
                found: self.bounds.dim(),
            });
        }
        self.objective.validate(self.dim(), self.tolerances.tol_psd)?;
        for g in &self.constraints {
            g.validate(self.dim(), self.tolerances.tol_psd)?;
        }
        Ok(())
    }

    pub fn from_json_str(text: &str) -> Result<Problem> {
        let p: Problem = serde_json::from_str(text)
            .map_err(|e| CoreError::InvalidProblem(format!("problem JSON: {e}")))?;
        p.validate()?;
        Ok(p)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem serializes")
    }

    pub fn constraint_values(&self, x: &[f64]) -> Vec<f64> {
        self.constraints.iter().map(|g| g.eval(x)).collect()
    }

    /// Largest constraint value; negative infinity when unconstrained.
    pub fn max_constraint(&self, x: &[f64]) -> f64 {
        self.constraints
            .iter()
            .map(|g| g.eval(x))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_feasible(&self, x: &[f64], tol_feas: f64) -> bool {
        self.constraints.iter().all(|g| g.eval(x) <= tol_feas)
    }

    /// Integer ranges of the integer block.
    pub fn fiber_ranges(&self) -> Vec<(i64, i64)> {
        (0..self.n).map(|i| self.bounds.integer_range(i)).collect()
    }

    /// All fibers in the box, lexicographic.
    pub fn fibers(&self, budget: usize) -> Result<Vec<Vec<i64>>> {
        enumerate_lattice(&self.fiber_ranges(), budget)
    }

    /// Assemble the full point (z, y).
    pub fn assemble(&self, z: &[i64], y: &[f64]) -> Vec<f64> {
        let mut x = Vec::with_capacity(self.dim());
        x.extend(z.iter().map(|&zi| zi as f64));
        x.extend_from_slice(y);
        x
    }

    /// True when objective and all constraints are bare affine atoms, the
    /// precondition for the exact rational path.
    pub fn is_affine_only(&self) -> bool {
        self.objective.is_pure_affine() && self.constraints.iter().all(|g| g.is_pure_affine())
    }
}

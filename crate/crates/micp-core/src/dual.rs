//! The exact mixed-integer convex dual: one multiplier row per certificate
//! point, a fiber-constant selector assigning each lattice point the first
//! row it violates, and verification of the either-or bound clause fiber by
//! fiber.

use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certificate::KKTCertificate;
use crate::cutting::{minimize_constrained, minimize_max, ConstrainedOutcome, FiberView};
use crate::error::{CoreError, Result};
use crate::expr::ConvexExpr;
use crate::geometry::{mixed_lattice_free, HalfSpace, LatticeStatus, OpenPolyhedron};
use crate::linalg;
use crate::problem::{BoundingBox, Problem};
use crate::scalar::Scalar;
use crate::tol::Tolerances;

const FIBER_BUDGET: usize = 1_000_000;

/// Row type: a bound row enforces `alpha <= f + U_i g`; an infeasibility row
/// enforces `1 <= U_i g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowKind {
    Bound,
    Infeas,
}

/// One dual row with its anchored selector half-space `v . x >= c`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DualRow {
    pub multipliers: Vec<f64>,
    pub kind: RowKind,
    pub selector_normal: Vec<f64>,
    pub selector_offset: f64,
}

/// A dual bound: `alpha` together with the row multipliers and the selector
/// that maps every lattice point to the first row it violates. The selector
/// normals vanish on the continuous block, so the map is constant along
/// fibers.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DualPair {
    pub alpha: f64,
    pub rows: Vec<DualRow>,
}

impl DualPair {
    /// First row whose anchored half-space is violated at `x` (0-based), or
    /// `None` when `x` lies strictly inside every selector half-space.
    pub fn selector_index(&self, x: &[f64]) -> Option<usize> {
        self.rows
            .iter()
            .position(|r| linalg::dot(&r.selector_normal, x) >= r.selector_offset - 1e-9)
    }
}

/// Derive the dual pair from a valid certificate: feasible points become
/// bound rows with multipliers `u_j / u_{m+1}`; infeasible points become
/// infeasibility rows normalized by `mu = sum_j u_j g_j(x_i) > 0`.
pub fn dual_from_certificate(problem: &Problem, cert: &KKTCertificate) -> Result<DualPair> {
    let tols = &problem.tolerances;
    let m = problem.m();
    let dim = problem.dim();
    let alpha = problem.objective.eval(&cert.points[0].x.coords);
    let mut rows = Vec::with_capacity(cert.points.len());
    for (i, pt) in cert.points.iter().enumerate() {
        let (kind, multipliers) = if pt.u[m] > 1e-12 {
            (RowKind::Bound, (0..m).map(|j| pt.u[j] / pt.u[m]).collect::<Vec<f64>>())
        } else {
            let mu: f64 = (0..m)
                .map(|j| pt.u[j] * problem.constraints[j].eval(&pt.x.coords))
                .sum();
            if mu <= tols.tol_num {
                return Err(CoreError::DegenerateRow { row: i });
            }
            (RowKind::Infeas, (0..m).map(|j| pt.u[j] / mu).collect::<Vec<f64>>())
        };
        let mut normal = vec![0.0; dim];
        for (uj, hj) in pt.u.iter().zip(&pt.h) {
            for (vc, hc) in normal.iter_mut().zip(hj) {
                *vc += uj * hc;
            }
        }
        // Selector normals live on the integer block; the continuous
        // components are bounded by the certificate's stationarity
        // condition and are dropped so the selector is exactly
        // fiber-constant.
        for vc in normal.iter_mut().skip(problem.n) {
            *vc = 0.0;
        }
        if linalg::norm_inf(&normal) <= tols.tol_stat {
            normal.iter_mut().for_each(|v| *v = 0.0);
        }
        let offset = linalg::dot(&normal, &pt.x.coords);
        rows.push(DualRow { multipliers, kind, selector_normal: normal, selector_offset: offset });
    }
    Ok(DualPair { alpha, rows })
}

/// Fiber-level verification outcome of a dual pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DualVerification {
    pub all_fibers_pass: bool,
    pub fibers_checked: usize,
    pub failures: Vec<DualFiberFailure>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DualFiberFailure {
    pub z: Vec<i64>,
    pub reason: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub minimizing_y: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_value: Option<f64>,
}

/// Verify the dual feasibility clause on every fiber in the box: with `i`
/// the selector row of the fiber, the convex function
/// `max(f + U_i g - alpha, U_i g - 1)` must be nonnegative over the fiber.
pub fn verify_dual_pair(problem: &Problem, pair: &DualPair, tols: &Tolerances) -> Result<DualVerification> {
    let fibers = problem.fibers(FIBER_BUDGET)?;
    let outcomes: Vec<Option<DualFiberFailure>> = fibers
        .par_iter()
        .map(|z| check_fiber(problem, pair, z, tols).err())
        .collect();
    let failures: Vec<DualFiberFailure> = outcomes.into_iter().flatten().collect();
    Ok(DualVerification {
        all_fibers_pass: failures.is_empty(),
        fibers_checked: fibers.len(),
        failures,
    })
}

fn check_fiber(
    problem: &Problem,
    pair: &DualPair,
    z: &[i64],
    tols: &Tolerances,
) -> std::result::Result<(), DualFiberFailure> {
    // The selector is fiber-constant, so probing any point of the fiber
    // determines the row.
    let y_mid: Vec<f64> = (problem.n..problem.dim())
        .map(|c| 0.5 * (problem.bounds.lo[c] + problem.bounds.hi[c]))
        .collect();
    let probe = problem.assemble(z, &y_mid);
    let row = match pair.selector_index(&probe) {
        Some(i) => &pair.rows[i],
        None => {
            return Err(DualFiberFailure {
                z: z.to_vec(),
                reason: "no selector row is violated on this fiber".into(),
                minimizing_y: None,
                min_value: None,
            })
        }
    };
    let mut weighted: Vec<ConvexExpr> = Vec::with_capacity(problem.m() + 1);
    for (j, g) in problem.constraints.iter().enumerate() {
        if row.multipliers[j] != 0.0 {
            weighted.push(ConvexExpr::Scale {
                c: row.multipliers[j],
                child: Box::new(g.clone()),
            });
        }
    }
    let zero = ConvexExpr::Affine { a: vec![0.0; problem.dim()], b: 0.0 };
    let ug = if weighted.is_empty() { zero.clone() } else { ConvexExpr::Sum(weighted.clone()) };
    let bound_branch = ConvexExpr::Sum(vec![
        problem.objective.clone(),
        ug.clone(),
        ConvexExpr::Affine { a: vec![0.0; problem.dim()], b: -pair.alpha },
    ]);
    let infeas_branch = ConvexExpr::Sum(vec![
        ug,
        ConvexExpr::Affine { a: vec![0.0; problem.dim()], b: -1.0 },
    ]);
    let composite = ConvexExpr::Max(vec![bound_branch, infeas_branch]);
    let view = FiberView::for_fiber(z, &problem.bounds.lo, &problem.bounds.hi);
    match minimize_max(&[&composite], &view, tols) {
        Ok(s) => {
            if s.value >= -tols.tol_num {
                Ok(())
            } else {
                Err(DualFiberFailure {
                    z: z.to_vec(),
                    reason: format!("dual clause dips to {} on this fiber", s.value),
                    minimizing_y: Some(s.y),
                    min_value: Some(s.value),
                })
            }
        }
        Err(e) => Err(DualFiberFailure {
            z: z.to_vec(),
            reason: format!("fiber solve failed: {e}"),
            minimizing_y: None,
            min_value: None,
        }),
    }
}

/// Lower bound from a lattice-free polyhedron and row multipliers.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DualBound {
    pub alpha: f64,
    /// Rows whose reversed half-space contains feasible points.
    pub contributing_rows: Vec<usize>,
}

/// Compute `alpha = min over contributing rows of min { f + U_i g }` over
/// each reversed half-space within the box. Rows are given directly as the
/// reversed regions (closed half-spaces); a row contributes when its region
/// contains a point with `max_j g_j <= tol_feas`. Returns `+inf` when no
/// row contributes.
pub fn dual_bound_from_polyhedron(
    problem: &Problem,
    reversed_rows: &[HalfSpace<f64>],
    multipliers: &[Vec<f64>],
    tols: &Tolerances,
) -> Result<DualBound> {
    if multipliers.len() != reversed_rows.len() {
        return Err(CoreError::DimensionMismatch {
            expected: reversed_rows.len(),
            found: multipliers.len(),
        });
    }
    let m = problem.m();
    let view = FiberView::full_space(&problem.bounds.lo, &problem.bounds.hi);
    let mut alpha = f64::INFINITY;
    let mut contributing = Vec::new();
    for (i, row) in reversed_rows.iter().enumerate() {
        if multipliers[i].len() != m {
            return Err(CoreError::DimensionMismatch { expected: m, found: multipliers[i].len() });
        }
        let region = ConvexExpr::Affine {
            a: row.normal.clone(),
            b: -row.offset,
        };
        // Membership of feasible points in the region.
        let feasible_inside = if m == 0 {
            matches!(
                minimize_constrained(&problem.objective, &[&region], &view, tols)?,
                ConstrainedOutcome::Solved(_)
            )
        } else {
            let gmax = ConvexExpr::Max(problem.constraints.clone());
            match minimize_constrained(&gmax, &[&region], &view, tols)? {
                ConstrainedOutcome::Solved(s) => s.value <= tols.tol_feas,
                ConstrainedOutcome::Infeasible => false,
            }
        };
        if !feasible_inside {
            continue;
        }
        contributing.push(i);
        let mut terms = vec![problem.objective.clone()];
        for (j, g) in problem.constraints.iter().enumerate() {
            if multipliers[i][j] != 0.0 {
                terms.push(ConvexExpr::Scale { c: multipliers[i][j], child: Box::new(g.clone()) });
            }
        }
        let inner = ConvexExpr::Sum(terms);
        match minimize_constrained(&inner, &[&region], &view, tols)? {
            ConstrainedOutcome::Solved(s) => alpha = alpha.min(s.value),
            ConstrainedOutcome::Infeasible => continue,
        }
    }
    Ok(DualBound { alpha, contributing_rows: contributing })
}

/// Outcome of the linear-corollary check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinearDualReport {
    /// `Some(true)` when the dual polyhedron misses the mixed lattice,
    /// `Some(false)` with a witness otherwise, `None` when inconclusive.
    pub lattice_free: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<f64>>,
    pub rational: bool,
}

/// Linear-corollary check for `min c^T x` with constraints in the
/// `A x >= b` orientation (`g = b - A x <= 0`). The dual value `alpha` and
/// row multipliers `U` define the open polyhedron with rows
/// `(c - U_i A) x < alpha - U_i b` for `i < split_k` and
/// `-U_i A x < 1 - U_i b` for the remaining rows; the bound certifies iff
/// that polyhedron misses `Z^n x R^d`. In rational mode every comparison is
/// exact and no tolerance is involved.
#[allow(clippy::too_many_arguments)]
pub fn linear_dual_check(
    c: &[f64],
    a: &[Vec<f64>],
    b: &[f64],
    n: usize,
    alpha: f64,
    u: &[Vec<f64>],
    split_k: usize,
    bounds: &BoundingBox,
    rational: bool,
    tols: &Tolerances,
) -> Result<LinearDualReport> {
    let dim = bounds.dim();
    let m = a.len();
    if b.len() != m || c.len() != dim || a.iter().any(|r| r.len() != dim) {
        return Err(CoreError::InvalidProblem("linear data dimensions disagree".into()));
    }
    if split_k > u.len() {
        return Err(CoreError::InvalidProblem("split_k exceeds row count".into()));
    }
    let mut halfspaces: Vec<HalfSpace<f64>> = Vec::with_capacity(u.len());
    for (i, ui) in u.iter().enumerate() {
        if ui.len() != m {
            return Err(CoreError::DimensionMismatch { expected: m, found: ui.len() });
        }
        let ui_a: Vec<f64> = (0..dim)
            .map(|col| ui.iter().zip(a).map(|(w, row)| w * row[col]).sum())
            .collect();
        let ui_b: f64 = ui.iter().zip(b).map(|(w, bv)| w * bv).sum();
        let (normal, offset) = if i < split_k {
            ((0..dim).map(|col| c[col] - ui_a[col]).collect::<Vec<f64>>(), alpha - ui_b)
        } else {
            (ui_a.iter().map(|v| -v).collect::<Vec<f64>>(), 1.0 - ui_b)
        };
        halfspaces.push(HalfSpace::strict(normal, offset));
    }
    let status = if rational {
        let poly: OpenPolyhedron<BigRational> =
            OpenPolyhedron::new(halfspaces.iter().map(|h| h.to_rational()).collect());
        let zero = <BigRational as Scalar>::from_i64(0);
        match mixed_lattice_free(&poly, bounds, n, &zero, FIBER_BUDGET)? {
            LatticeStatus::LatticeFree => LatticeStatus::LatticeFree,
            LatticeStatus::Witness(w) => {
                LatticeStatus::Witness(w.iter().map(|v| v.to_f64()).collect())
            }
            LatticeStatus::UnboundedInconclusive => LatticeStatus::UnboundedInconclusive,
        }
    } else {
        mixed_lattice_free(
            &OpenPolyhedron::new(halfspaces),
            bounds,
            n,
            &tols.tol_strict,
            FIBER_BUDGET,
        )?
    };
    Ok(match status {
        LatticeStatus::LatticeFree => {
            LinearDualReport { lattice_free: Some(true), witness: None, rational }
        }
        LatticeStatus::Witness(w) => {
            LinearDualReport { lattice_free: Some(false), witness: Some(w), rational }
        }
        LatticeStatus::UnboundedInconclusive => {
            LinearDualReport { lattice_free: None, witness: None, rational }
        }
    })
}

// ---------------------------------------------------------------------------
// Dual file format
// ---------------------------------------------------------------------------

/// On-disk dual pair: the multiplier matrix is padded to `2^n` rows by
/// repeating the last genuine row, with padded entries marked in
/// `row_kind`; `split_k` records the number of genuine rows.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DualFile {
    pub alpha: f64,
    #[serde(rename = "U")]
    pub u: Vec<Vec<f64>>,
    pub row_kind: Vec<String>,
    pub selector: Vec<SelectorEntry>,
    pub split_k: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelectorEntry {
    pub v: Vec<f64>,
    pub c: f64,
}

impl DualFile {
    pub fn from_pair(pair: &DualPair, n: usize) -> DualFile {
        let k = pair.rows.len();
        let total = (1usize << n).max(k);
        let mut u = Vec::with_capacity(total);
        let mut row_kind = Vec::with_capacity(total);
        for row in &pair.rows {
            u.push(row.multipliers.clone());
            row_kind.push(
                match row.kind {
                    RowKind::Bound => "bound",
                    RowKind::Infeas => "infeas",
                }
                .to_string(),
            );
        }
        for _ in k..total {
            u.push(pair.rows[k - 1].multipliers.clone());
            row_kind.push("padded".to_string());
        }
        DualFile {
            alpha: pair.alpha,
            u,
            row_kind,
            selector: pair
                .rows
                .iter()
                .map(|r| SelectorEntry { v: r.selector_normal.clone(), c: r.selector_offset })
                .collect(),
            split_k: k,
        }
    }

    pub fn as_pair(&self) -> Result<DualPair> {
        if self.selector.len() != self.split_k || self.split_k == 0 || self.split_k > self.u.len() {
            return Err(CoreError::InvalidProblem(
                "dual file: selector length must equal split_k >= 1".into(),
            ));
        }
        let rows = (0..self.split_k)
            .map(|i| {
                let kind = match self.row_kind.get(i).map(String::as_str) {
                    Some("bound") => RowKind::Bound,
                    Some("infeas") => RowKind::Infeas,
                    other => {
                        return Err(CoreError::InvalidProblem(format!(
                            "dual file: bad row kind {other:?} at genuine row {i}"
                        )))
                    }
                };
                Ok(DualRow {
                    multipliers: self.u[i].clone(),
                    kind,
                    selector_normal: self.selector[i].v.clone(),
                    selector_offset: self.selector[i].c,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DualPair { alpha: self.alpha, rows })
    }

    pub fn from_json_str(text: &str) -> Result<DualFile> {
        serde_json::from_str(text)
            .map_err(|e| CoreError::InvalidProblem(format!("dual JSON: {e}")))
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("dual file serializes")
    }
}

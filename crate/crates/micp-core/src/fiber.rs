//! Continuous subproblems on integer fibers and sparse multiplier recovery.
//!
//! For a fixed integer block `z` the fiber subproblem minimizes the
//! objective over the continuous block subject to the constraints. Feasible
//! fibers carry KKT multipliers normalized with the objective weight at one;
//! infeasible fibers carry convex weights over the constraints attaining the
//! minimax value. Either way the aggregated subgradient vanishes on the
//! continuous block, which is what makes the resulting half-space a cylinder
//! over the integer lattice.

use serde::{Deserialize, Serialize};

use crate::cutting::{minimize_constrained, minimize_max, ConstrainedOutcome, FiberView, SolveOutcome};
use crate::error::{CoreError, Result};
use crate::expr::{active_indices, ConvexExpr};
use crate::linalg;
use crate::problem::Problem;
use crate::simplex::{lp_solve, LpOutcome};
use crate::tol::Tolerances;

/// Outcome of solving one fiber. The multiplier vector `u` has length
/// `m + 1`; entries `0..m` weight the constraints and the last entry weights
/// the objective. The subgradient list `h` follows the same indexing.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FiberResult {
    pub z: Vec<i64>,
    pub kind: FiberKind,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum FiberKind {
    Feasible {
        y: Vec<f64>,
        value: f64,
        u: Vec<f64>,
        h: Vec<Vec<f64>>,
    },
    Infeasible {
        y: Vec<f64>,
        minimax_value: f64,
        active: Vec<usize>,
        u: Vec<f64>,
        h: Vec<Vec<f64>>,
    },
}

impl FiberResult {
    pub fn point(&self, problem: &Problem) -> Vec<f64> {
        match &self.kind {
            FiberKind::Feasible { y, .. } | FiberKind::Infeasible { y, .. } => {
                problem.assemble(&self.z, y)
            }
        }
    }

    pub fn multipliers(&self) -> &[f64] {
        match &self.kind {
            FiberKind::Feasible { u, .. } | FiberKind::Infeasible { u, .. } => u,
        }
    }

    pub fn subgradients(&self) -> &[Vec<f64>] {
        match &self.kind {
            FiberKind::Feasible { h, .. } | FiberKind::Infeasible { h, .. } => h,
        }
    }

    /// Aggregated vector `sum_j u_j h_j`.
    pub fn aggregate(&self, dim: usize) -> Vec<f64> {
        let u = self.multipliers();
        let h = self.subgradients();
        let mut v = vec![0.0; dim];
        for (uj, hj) in u.iter().zip(h) {
            if *uj != 0.0 {
                for (vc, hc) in v.iter_mut().zip(hj) {
                    *vc += uj * hc;
                }
            }
        }
        v
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self.kind, FiberKind::Feasible { .. })
    }

    pub fn objective_value(&self) -> f64 {
        match &self.kind {
            FiberKind::Feasible { value, .. } => *value,
            FiberKind::Infeasible { minimax_value, .. } => *minimax_value,
        }
    }

    /// Check the structural invariants; returns a description of the first
    /// violation. Used by tests and the round-trip suites.
    pub fn check_invariants(&self, problem: &Problem, tols: &Tolerances) -> std::result::Result<(), String> {
        let dim = problem.dim();
        let m = problem.m();
        let u = self.multipliers();
        if u.len() != m + 1 {
            return Err(format!("multiplier length {} != m+1", u.len()));
        }
        if u.iter().any(|&v| v < -1e-12) {
            return Err("negative multiplier".into());
        }
        let support = u.iter().filter(|&&v| v > 1e-12).count();
        if support > problem.d + 1 {
            return Err(format!("support {} exceeds d+1", support));
        }
        if support == 0 {
            return Err("empty support".into());
        }
        let agg = self.aggregate(dim);
        for c in problem.n..dim {
            if agg[c].abs() > tols.tol_stat {
                return Err(format!("stationarity residual {} at coordinate {c}", agg[c]));
            }
        }
        let x = self.point(problem);
        match &self.kind {
            FiberKind::Feasible { u, .. } => {
                if u[m] <= 0.0 {
                    return Err("objective multiplier not positive on feasible fiber".into());
                }
                for (j, g) in problem.constraints.iter().enumerate() {
                    let gv = g.eval(&x);
                    if gv > tols.tol_feas {
                        return Err(format!("constraint {j} infeasible: {gv}"));
                    }
                    if (u[j] * gv).abs() > tols.tol_comp {
                        return Err(format!("complementarity violated at {j}"));
                    }
                }
            }
            FiberKind::Infeasible { minimax_value, active, u, .. } => {
                if *minimax_value <= tols.tol_feas {
                    return Err("infeasible fiber with feasible minimax value".into());
                }
                if u[m].abs() > 1e-12 {
                    return Err("objective multiplier nonzero on infeasible fiber".into());
                }
                let total: f64 = active.iter().map(|&j| u[j]).sum();
                if (total - 1.0).abs() > 1e-9 {
                    return Err(format!("active weights sum to {total}"));
                }
                for j in 0..m {
                    if !active.contains(&j) && u[j].abs() > 1e-12 {
                        return Err(format!("weight on inactive constraint {j}"));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Recovery mode: feasible fibers normalize the objective weight to one;
/// minimax fibers distribute unit weight over the active constraints.
#[derive(Debug, Clone)]
pub enum RecoveryMode {
    Feasible,
    Minimax { active: Vec<usize> },
}

/// Solve the minimax problem `min_y max_j g_j((z, y))` and recover convex
/// weights over the attaining constraints.
pub fn fiber_minimax(problem: &Problem, z: &[i64], tols: &Tolerances) -> Result<FiberResult> {
    if problem.m() == 0 {
        return Err(CoreError::InvalidProblem(
            "minimax needs at least one constraint".into(),
        ));
    }
    let view = FiberView::for_fiber(z, &problem.bounds.lo, &problem.bounds.hi);
    let comps: Vec<&ConvexExpr> = problem.constraints.iter().collect();
    let solved = minimize_max(&comps, &view, tols)?;
    let x = problem.assemble(z, &solved.y);
    let values: Vec<f64> = problem.constraint_values(&x);
    let active = active_indices(&values, tols.tol_act);
    let (u, h) = recover_multipliers(problem, &x, RecoveryMode::Minimax { active: active.clone() }, tols)?;
    Ok(FiberResult {
        z: z.to_vec(),
        kind: FiberKind::Infeasible {
            y: solved.y,
            minimax_value: solved.value,
            active,
            u,
            h,
        },
    })
}

/// Value-stage solve of a fiber: classification and minimizer without
/// multiplier recovery. Construction solves every fiber at this stage and
/// recovers multipliers only for fibers whose half-space enters the
/// certificate.
#[derive(Debug, Clone)]
pub struct FiberValue {
    pub z: Vec<i64>,
    pub feasible: bool,
    pub y: Vec<f64>,
    /// Objective value when feasible, minimax value otherwise.
    pub value: f64,
    pub minimax_value: Option<f64>,
}

/// Solve the fiber subproblem without recovery. Feasibility is decided by
/// the minimax value (single code path): the fiber is feasible iff
/// `min_y max_j g_j <= tol_feas`.
pub fn fiber_value(problem: &Problem, z: &[i64], tols: &Tolerances) -> Result<FiberValue> {
    let view = FiberView::for_fiber(z, &problem.bounds.lo, &problem.bounds.hi);
    let mut minimax: Option<SolveOutcome> = None;
    if problem.m() > 0 {
        let comps: Vec<&ConvexExpr> = problem.constraints.iter().collect();
        let mm = minimize_max(&comps, &view, tols)?;
        if mm.value > tols.tol_feas {
            return Ok(FiberValue {
                z: z.to_vec(),
                feasible: false,
                y: mm.y.clone(),
                value: mm.value,
                minimax_value: Some(mm.value),
            });
        }
        minimax = Some(mm);
    }
    let minimax_value = minimax.as_ref().map(|s| s.value);
    let gs: Vec<&ConvexExpr> = problem.constraints.iter().collect();
    match minimize_constrained(&problem.objective, &gs, &view, tols)? {
        ConstrainedOutcome::Solved(s) => Ok(FiberValue {
            z: z.to_vec(),
            feasible: true,
            y: s.y,
            value: s.value,
            minimax_value,
        }),
        // Borderline fibers (minimax value within tolerance of zero) can
        // still be cut off by the affine model; fall back to the minimax
        // classification for dispatch consistency.
        ConstrainedOutcome::Infeasible => match minimax {
            Some(mm) => Ok(FiberValue {
                z: z.to_vec(),
                feasible: false,
                y: mm.y,
                value: mm.value,
                minimax_value,
            }),
            None => Err(CoreError::Numerical(
                "unconstrained fiber reported infeasible".into(),
            )),
        },
    }
}

/// Attach multipliers and subgradients to a value-stage solve.
pub fn recover_fiber_result(
    problem: &Problem,
    fv: &FiberValue,
    tols: &Tolerances,
) -> Result<FiberResult> {
    let x = problem.assemble(&fv.z, &fv.y);
    if fv.feasible {
        let (u, h) = recover_multipliers(problem, &x, RecoveryMode::Feasible, tols)?;
        Ok(FiberResult {
            z: fv.z.clone(),
            kind: FiberKind::Feasible { y: fv.y.clone(), value: fv.value, u, h },
        })
    } else {
        let values = problem.constraint_values(&x);
        let active = active_indices(&values, tols.tol_act);
        let (u, h) =
            recover_multipliers(problem, &x, RecoveryMode::Minimax { active: active.clone() }, tols)?;
        Ok(FiberResult {
            z: fv.z.clone(),
            kind: FiberKind::Infeasible {
                y: fv.y.clone(),
                minimax_value: fv.value,
                active,
                u,
                h,
            },
        })
    }
}

/// A solved fiber plus the minimax value that decided feasibility
/// (`None` for unconstrained problems).
#[derive(Debug, Clone)]
pub struct FiberSolve {
    pub result: FiberResult,
    pub minimax_value: Option<f64>,
}

/// Solve a fiber end to end: classify, minimize, and recover multipliers.
pub fn solve_fiber(problem: &Problem, z: &[i64], tols: &Tolerances) -> Result<FiberSolve> {
    let fv = fiber_value(problem, z, tols)?;
    let minimax_value = fv.minimax_value;
    let result = recover_fiber_result(problem, &fv, tols)?;
    Ok(FiberSolve { result, minimax_value })
}

/// Solve the fiber subproblem, returning only the classified result.
pub fn fiber_minimize(problem: &Problem, z: &[i64], tols: &Tolerances) -> Result<FiberResult> {
    solve_fiber(problem, z, tols).map(|s| s.result)
}

/// Recover multipliers `u >= 0` and subgradients `h_j` at the solved fiber
/// point by a small LP: minimize the infinity norm of the continuous block
/// of `sum_j u_j h_j` subject to the mode's normalization, with `u_j = 0`
/// forced on inactive constraints. Subdifferential vertices of each active
/// function enter as separate LP columns, so kinks resolve exactly.
pub fn recover_multipliers(
    problem: &Problem,
    x: &[f64],
    mode: RecoveryMode,
    tols: &Tolerances,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let m = problem.m();
    let n = problem.n;
    let d = problem.d;
    let mut h: Vec<Vec<f64>> = problem
        .constraints
        .iter()
        .map(|g| g.subgradient(x, tols.tol_act))
        .collect();
    h.push(problem.objective.subgradient(x, tols.tol_act));

    let mut u = vec![0.0; m + 1];
    if d == 0 {
        match mode {
            RecoveryMode::Feasible => u[m] = 1.0,
            RecoveryMode::Minimax { active } => {
                let lowest = *active.first().ok_or_else(|| {
                    CoreError::Numerical("minimax recovery with empty active set".into())
                })?;
                u[lowest] = 1.0;
            }
        }
        return Ok((u, h));
    }

    const VERT_CAP: usize = 24;
    // Columns: subdifferential vertices of each participating function.
    struct Block {
        owner: usize,
        verts: Vec<Vec<f64>>,
    }
    let mut blocks: Vec<Block> = Vec::new();
    let (normalized_owner, active_set): (Option<usize>, Vec<usize>) = match &mode {
        RecoveryMode::Feasible => {
            // Active means no slack beyond tol_act; small positive values
            // (within tol_feas) still count as active.
            let active: Vec<usize> = (0..m)
                .filter(|&j| problem.constraints[j].eval(x) >= -tols.tol_act)
                .collect();
            (Some(m), active)
        }
        RecoveryMode::Minimax { active } => (None, active.clone()),
    };
    for &j in &active_set {
        blocks.push(Block {
            owner: j,
            verts: problem.constraints[j].subgradient_vertices(x, tols.tol_act, VERT_CAP),
        });
    }
    if let Some(owner) = normalized_owner {
        blocks.push(Block {
            owner,
            verts: problem.objective.subgradient_vertices(x, tols.tol_act, VERT_CAP),
        });
    }

    let ncols: usize = blocks.iter().map(|b| b.verts.len()).sum();
    let nvars = ncols + 1; // + residual bound s
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
    // |sum of continuous components| <= s per coordinate.
    for c in n..(n + d) {
        let mut pos = vec![0.0; nvars];
        let mut neg = vec![0.0; nvars];
        let mut k = 0;
        for b in &blocks {
            for v in &b.verts {
                pos[k] = v[c];
                neg[k] = -v[c];
                k += 1;
            }
        }
        pos[ncols] = -1.0;
        neg[ncols] = -1.0;
        rows.push((pos, 0.0));
        rows.push((neg, 0.0));
    }
    // Normalization: unit total weight on the normalized block (feasible
    // mode: the objective; minimax mode: the active constraints).
    let mut norm_row = vec![0.0; nvars];
    let mut k = 0;
    for b in &blocks {
        let in_norm = match mode {
            RecoveryMode::Feasible => b.owner == m,
            RecoveryMode::Minimax { .. } => b.owner != m,
        };
        for _ in &b.verts {
            if in_norm {
                norm_row[k] = 1.0;
            }
            k += 1;
        }
    }
    rows.push((norm_row.clone(), 1.0));
    rows.push((norm_row.iter().map(|v| -v).collect(), -1.0));

    let mut c_obj = vec![0.0; nvars];
    c_obj[ncols] = 1.0;
    let lo = vec![0.0; nvars];
    let hi = vec![1e9; nvars];
    let weights = match lp_solve(&c_obj, &rows, &lo, &hi)? {
        LpOutcome::Infeasible => {
            return Err(CoreError::Numerical("multiplier recovery LP infeasible".into()))
        }
        LpOutcome::Optimal { x, .. } => x,
    };
    let residual = weights[ncols];
    if residual > tols.tol_stat {
        return Err(CoreError::StationarityResidualTooLarge {
            residual,
            tolerance: tols.tol_stat,
        });
    }

    // Fold vertex weights back into per-function multipliers and combined
    // subgradients.
    let mut k = 0;
    let mut combo: Vec<Option<Vec<f64>>> = vec![None; m + 1];
    for b in &blocks {
        let dim = problem.dim();
        let entry = combo[b.owner].get_or_insert(vec![0.0; dim]);
        let mut total = 0.0;
        for v in &b.verts {
            let w = weights[k];
            total += w;
            for (e, vc) in entry.iter_mut().zip(v) {
                *e += w * vc;
            }
            k += 1;
        }
        u[b.owner] += total;
    }
    for j in 0..=m {
        if u[j] > 1e-12 {
            if let Some(sum) = &combo[j] {
                h[j] = sum.iter().map(|v| v / u[j]).collect();
            }
        }
    }
    match mode {
        RecoveryMode::Feasible => u[m] = 1.0,
        RecoveryMode::Minimax { .. } => u[m] = 0.0,
    }
    let keep_sum = matches!(mode, RecoveryMode::Minimax { .. });
    caratheodory_reduce(&mut u, &h, n, d, keep_sum)?;
    Ok((u, h))
}

/// Shrink the support of `u` (over the constraint entries) to at most `d`
/// in feasible mode or `d + 1` in minimax mode, preserving the continuous
/// block of the aggregate exactly (and the weight sum when `keep_sum`).
pub fn caratheodory_reduce(
    u: &mut [f64],
    h: &[Vec<f64>],
    n: usize,
    d: usize,
    keep_sum: bool,
) -> Result<()> {
    let m = u.len() - 1;
    let target = if keep_sum { d + 1 } else { d };
    loop {
        let support: Vec<usize> = (0..m).filter(|&j| u[j] > 1e-12).collect();
        if support.len() <= target {
            for j in 0..m {
                if u[j] <= 1e-12 {
                    u[j] = 0.0;
                }
            }
            return Ok(());
        }
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(d + 1);
        for c in n..(n + d) {
            rows.push(support.iter().map(|&j| h[j][c]).collect());
        }
        if keep_sum {
            rows.push(vec![1.0; support.len()]);
        }
        let mut nu = linalg::null_vector(&rows, support.len()).ok_or_else(|| {
            CoreError::Numerical("dependence vector not found during support reduction".into())
        })?;
        if !nu.iter().any(|&v| v > 1e-12) {
            for v in nu.iter_mut() {
                *v = -*v;
            }
        }
        let theta = support
            .iter()
            .zip(&nu)
            .filter(|(_, &nj)| nj > 1e-12)
            .map(|(&j, &nj)| u[j] / nj)
            .fold(f64::INFINITY, f64::min);
        if !theta.is_finite() {
            return Err(CoreError::Numerical("unbounded reduction step".into()));
        }
        for (&j, &nj) in support.iter().zip(&nu) {
            u[j] -= theta * nj;
            if u[j] < 1e-12 {
                u[j] = 0.0;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::BoundingBox;

    fn example_problem() -> Problem {
        Problem {
            n: 2,
            d: 0,
            objective: ConvexExpr::squared_distance(&[1.0, 1.0]),
            constraints: vec![
                ConvexExpr::Affine { a: vec![1.0, 0.0], b: -0.5 },
                ConvexExpr::Affine { a: vec![0.0, 1.0], b: -0.5 },
            ],
            bounds: BoundingBox::new(vec![-3.0, -3.0], vec![3.0, 3.0]),
            tolerances: Tolerances::default(),
        }
    }

    #[test]
    fn feasible_origin_fiber() {
        let p = example_problem();
        let t = p.tolerances;
        let r = fiber_minimize(&p, &[0, 0], &t).unwrap();
        match &r.kind {
            FiberKind::Feasible { value, u, .. } => {
                assert!((value - 1.0).abs() < 1e-12);
                assert_eq!(u, &vec![0.0, 0.0, 1.0]);
            }
            other => panic!("expected feasible, got {other:?}"),
        }
        r.check_invariants(&p, &t).unwrap();
    }

    #[test]
    fn infeasible_fiber_reports_minimax() {
        let p = example_problem();
        let t = p.tolerances;
        let r = fiber_minimize(&p, &[1, 0], &t).unwrap();
        match &r.kind {
            FiberKind::Infeasible { minimax_value, active, u, h, .. } => {
                assert!((minimax_value - 0.5).abs() < 1e-12);
                assert_eq!(active, &vec![0]);
                assert_eq!(u, &vec![1.0, 0.0, 0.0]);
                assert_eq!(h[0], vec![1.0, 0.0]);
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
        r.check_invariants(&p, &t).unwrap();
    }

    #[test]
    fn dispatch_consistency_on_infeasible_fiber() {
        let p = example_problem();
        let t = p.tolerances;
        let a = fiber_minimize(&p, &[2, 2], &t).unwrap();
        let b = fiber_minimax(&p, &[2, 2], &t).unwrap();
        assert!((a.objective_value() - b.objective_value()).abs() < 1e-12);
        assert_eq!(a.multipliers(), b.multipliers());
    }

    #[test]
    fn separable_quadratic_fiber() {
        let p = Problem {
            n: 1,
            d: 1,
            objective: ConvexExpr::squared_distance(&[0.3, 0.7]),
            constraints: vec![],
            bounds: BoundingBox::new(vec![-2.0, -2.0], vec![2.0, 2.0]),
            tolerances: Tolerances::default(),
        };
        let t = p.tolerances;
        let r = fiber_minimize(&p, &[0], &t).unwrap();
        match &r.kind {
            FiberKind::Feasible { y, value, u, .. } => {
                assert!((y[0] - 0.7).abs() < 1e-8);
                assert!((value - 0.045).abs() < 1e-9);
                assert_eq!(u, &vec![1.0]);
            }
            other => panic!("expected feasible, got {other:?}"),
        }
        r.check_invariants(&p, &t).unwrap();
    }

    #[test]
    fn minimax_single_smooth_constraint() {
        // g1 = (x2 - 2)^2 / 2 + 1 over n=1, d=1: minimax value 1 at y = 2.
        let g = ConvexExpr::Sum(vec![
            ConvexExpr::Quad {
                q: vec![vec![0.0, 0.0], vec![0.0, 1.0]],
                a: vec![0.0, -2.0],
                b: 2.0,
            },
            ConvexExpr::Affine { a: vec![0.0, 0.0], b: 1.0 },
        ]);
        let p = Problem {
            n: 1,
            d: 1,
            objective: ConvexExpr::squared_distance(&[0.0, 0.0]),
            constraints: vec![g],
            bounds: BoundingBox::new(vec![-3.0, -5.0], vec![3.0, 5.0]),
            tolerances: Tolerances::default(),
        };
        let t = p.tolerances;
        let r = fiber_minimax(&p, &[0], &t).unwrap();
        match &r.kind {
            FiberKind::Infeasible { y, minimax_value, u, .. } => {
                assert!((y[0] - 2.0).abs() < 1e-7);
                assert!((minimax_value - 1.0).abs() < 1e-9);
                assert!((u[0] - 1.0).abs() < 1e-12 && u[1] == 0.0);
            }
            other => panic!("expected infeasible kind, got {other:?}"),
        }
        r.check_invariants(&p, &t).unwrap();
    }

    #[test]
    fn minimax_symmetric_pair_splits_weights() {
        // g1 = x2 + 2, g2 = -x2 + 2: minimax at y = 0 with value 2 and
        // equal weights forced by stationarity.
        let p = Problem {
            n: 1,
            d: 1,
            objective: ConvexExpr::squared_distance(&[0.0, 0.0]),
            constraints: vec![
                ConvexExpr::Affine { a: vec![0.0, 1.0], b: 2.0 },
                ConvexExpr::Affine { a: vec![0.0, -1.0], b: 2.0 },
            ],
            bounds: BoundingBox::new(vec![-3.0, -5.0], vec![3.0, 5.0]),
            tolerances: Tolerances::default(),
        };
        let t = p.tolerances;
        let r = fiber_minimax(&p, &[0], &t).unwrap();
        match &r.kind {
            FiberKind::Infeasible { y, minimax_value, u, .. } => {
                assert!(y[0].abs() < 1e-7);
                assert!((minimax_value - 2.0).abs() < 1e-9);
                assert!((u[0] - 0.5).abs() < 1e-9);
                assert!((u[1] - 0.5).abs() < 1e-9);
            }
            other => panic!("expected infeasible kind, got {other:?}"),
        }
        r.check_invariants(&p, &t).unwrap();
    }

    #[test]
    fn recovery_interior_minimum_uses_objective_only() {
        let p = example_problem();
        let t = p.tolerances;
        let (u, _) = recover_multipliers(&p, &[0.0, 0.0], RecoveryMode::Feasible, &t).unwrap();
        assert_eq!(u, vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn caratheodory_noop_when_small() {
        let mut u = vec![0.5, 0.0, 1.0];
        let h = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, 0.0]];
        caratheodory_reduce(&mut u, &h, 1, 1, false).unwrap();
        assert_eq!(u, vec![0.5, 0.0, 1.0]);
    }

    #[test]
    fn caratheodory_d0_reduces_to_lowest_index() {
        let mut u = vec![1.0, 1.0, 1.0, 0.0];
        let h = vec![vec![1.0], vec![2.0], vec![-1.0], vec![0.0]];
        caratheodory_reduce(&mut u, &h, 1, 0, true).unwrap();
        let support: Vec<usize> = (0..3).filter(|&j| u[j] > 0.0).collect();
        assert_eq!(support, vec![0]);
        assert!((u[0] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn caratheodory_d1_preserves_aggregate_and_sum() {
        // Continuous components (1), (-1), (0) with weights (1,1,1).
        let mut u = vec![1.0, 1.0, 1.0, 0.0];
        let h = vec![
            vec![0.0, 1.0],
            vec![0.0, -1.0],
            vec![0.0, 0.0],
            vec![0.0, 0.0],
        ];
        caratheodory_reduce(&mut u, &h, 1, 1, true).unwrap();
        let support = (0..3).filter(|&j| u[j] > 0.0).count();
        assert!(support <= 2);
        let total: f64 = u[..3].iter().sum();
        assert!((total - 3.0).abs() < 1e-9);
        let agg: f64 = (0..3).map(|j| u[j] * h[j][1]).sum();
        assert!(agg.abs() < 1e-9);
    }
}

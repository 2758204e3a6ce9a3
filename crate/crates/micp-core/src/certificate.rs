//! Optimality certificates: data model, verification, and construction.
//!
//! A KKT certificate is a short list of mixed-integer points with
//! multipliers and subgradients whose aggregated half-spaces carve out a
//! lattice-free open polyhedron; its first point is thereby proven optimal.
//! Verification re-checks every condition against the problem data and a
//! deterministic probe set, so a certificate is a portable claim rather
//! than a reference into this crate's internals.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cutting::{minimize_max, FiberView};
use crate::error::{CoreError, Result};
use crate::expr::{active_indices, ConvexExpr};
use crate::fiber::{fiber_value, recover_fiber_result, solve_fiber, FiberResult, FiberValue};
use crate::geometry::{doignon_select, mixed_lattice_free, strict_feasible_on_fiber, HalfSpace, LatticeStatus, OpenPolyhedron};
use crate::linalg;
use crate::problem::{Point, Problem};
use crate::tol::Tolerances;

const FIBER_BUDGET: usize = 1_000_000;
const CONSTRUCT_MAX_N: usize = 8;

/// One certificate entry: a mixed-integer point, its multiplier vector of
/// length `m + 1` (objective weight last), and matching subgradients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificatePoint {
    pub x: Point,
    pub u: Vec<f64>,
    pub h: Vec<Vec<f64>>,
}

/// Certificate for the constrained mixed-integer KKT conditions; the first
/// point is the claimed optimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KKTCertificate {
    pub points: Vec<CertificatePoint>,
}

impl KKTCertificate {
    pub fn claimed_optimum(&self) -> &Point {
        &self.points[0].x
    }

    pub fn k(&self) -> usize {
        self.points.len()
    }
}

/// A level-set boundary point of the objective, with a subgradient there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectivePoint {
    pub x: Point,
    pub h: Vec<f64>,
}

/// A constraint-boundary point: `g_j` vanishes at `y` and `h` is one of its
/// subgradients there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub y: Point,
    pub j: usize,
    pub h: Vec<f64>,
}

/// Certificate built from level-set and constraint-boundary points; the
/// polyhedron mixes strict rows (objective points) with weak rows
/// (boundary points). Only verification is supported.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCertificate {
    pub x_points: Vec<ObjectivePoint>,
    pub y_points: Vec<BoundaryPoint>,
}

/// Verdict of a verification run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Valid,
    Invalid,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub label: String,
    pub passed: bool,
    pub detail: String,
}

/// Per-condition outcomes with the tolerance set that produced them. The
/// verdict is `Valid` iff every condition passed, and `Inconclusive` only
/// when the lattice-freeness check alone could not be decided.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub verdict: Verdict,
    pub conditions: Vec<ConditionCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Point>,
    pub tolerances: Tolerances,
}

impl VerificationReport {
    pub fn is_valid(&self) -> bool {
        self.verdict == Verdict::Valid
    }

    pub fn condition(&self, label: &str) -> Option<&ConditionCheck> {
        self.conditions.iter().find(|c| c.label == label)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

struct ReportBuilder {
    conditions: Vec<ConditionCheck>,
    witness: Option<Point>,
    lattice_inconclusive: bool,
    tolerances: Tolerances,
}

impl ReportBuilder {
    fn new(tolerances: Tolerances) -> Self {
        ReportBuilder {
            conditions: Vec::new(),
            witness: None,
            lattice_inconclusive: false,
            tolerances,
        }
    }

    fn push(&mut self, label: &str, passed: bool, detail: String) {
        self.conditions.push(ConditionCheck { label: label.to_string(), passed, detail });
    }

    fn all_passed(&self) -> bool {
        self.conditions.iter().all(|c| c.passed)
    }

    fn finish(self) -> VerificationReport {
        let verdict = if self.all_passed() {
            Verdict::Valid
        } else if self.lattice_inconclusive
            && self
                .conditions
                .iter()
                .filter(|c| !c.passed)
                .all(|c| c.label == "(d)" || c.label == "(b)" || c.label == "(c):lattice-free")
        {
            Verdict::Inconclusive
        } else {
            Verdict::Invalid
        };
        VerificationReport {
            verdict,
            conditions: self.conditions,
            witness: self.witness,
            tolerances: self.tolerances,
        }
    }

    fn invalid(mut self, label: &str, detail: String) -> VerificationReport {
        self.push(label, false, detail);
        VerificationReport {
            verdict: Verdict::Invalid,
            conditions: self.conditions,
            witness: self.witness,
            tolerances: self.tolerances,
        }
    }
}

/// Deterministic probe set for testing the subgradient inequality: box
/// corners, the box center, every certificate point, and 64 seeded points.
fn probe_points(problem: &Problem, anchors: &[Vec<f64>], seed: u64) -> Vec<Vec<f64>> {
    let dim = problem.dim();
    let mut probes = Vec::new();
    if dim <= 12 {
        probes.extend(problem.bounds.corners());
    }
    probes.push(problem.bounds.center());
    probes.extend(anchors.iter().cloned());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..64 {
        let p: Vec<f64> = (0..dim)
            .map(|i| {
                let (l, h) = (problem.bounds.lo[i], problem.bounds.hi[i]);
                l + rng.gen::<f64>() * (h - l)
            })
            .collect();
        probes.push(p);
    }
    probes
}

/// Check `expr(p) >= expr(x) + h . (p - x) - tol` over the probe set.
fn subgradient_valid(
    expr: &ConvexExpr,
    x: &[f64],
    h: &[f64],
    probes: &[Vec<f64>],
    tol_num: f64,
) -> Option<f64> {
    let fx = expr.eval(x);
    for p in probes {
        let linear: f64 = fx
            + h.iter()
                .zip(p.iter().zip(x))
                .map(|(hc, (pc, xc))| hc * (pc - xc))
                .sum::<f64>();
        let actual = expr.eval(p);
        if actual < linear - tol_num {
            return Some(linear - actual);
        }
    }
    None
}

fn finite(vs: &[f64]) -> bool {
    vs.iter().all(|v| v.is_finite())
}

/// Aggregate `sum_j u_j h_j`, projected onto the integer block: continuous
/// components are zeroed (they are separately bounded by the stationarity
/// condition), and a vector that is negligible everywhere collapses to the
/// exact zero normal, whose strict half-space is the empty set.
fn certificate_normal(u: &[f64], h: &[Vec<f64>], n: usize, dim: usize, tol_stat: f64) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    for (uj, hj) in u.iter().zip(h) {
        if *uj != 0.0 {
            for (vc, hc) in v.iter_mut().zip(hj) {
                *vc += uj * hc;
            }
        }
    }
    for vc in v.iter_mut().skip(n) {
        *vc = 0.0;
    }
    if linalg::norm_inf(&v) <= tol_stat {
        v.iter_mut().for_each(|c| *c = 0.0);
    }
    v
}

fn lattice_condition(
    builder: &mut ReportBuilder,
    label: &str,
    problem: &Problem,
    poly: &OpenPolyhedron<f64>,
) {
    let tols = &builder.tolerances;
    match mixed_lattice_free(poly, &problem.bounds, problem.n, &tols.tol_strict, FIBER_BUDGET) {
        Ok(LatticeStatus::LatticeFree) => {
            builder.push(label, true, "certificate polyhedron is lattice-free".into())
        }
        Ok(LatticeStatus::Witness(w)) => {
            builder.witness = Some(Point::new(w.clone()));
            builder.push(label, false, format!("integer witness {w:?} strictly inside"));
        }
        Ok(LatticeStatus::UnboundedInconclusive) => {
            builder.lattice_inconclusive = true;
            builder.push(
                label,
                false,
                "polyhedron reaches the inflated box; lattice-freeness undecided".into(),
            );
        }
        Err(CoreError::BudgetExceeded { budget }) => {
            builder.lattice_inconclusive = true;
            builder.push(label, false, format!("fiber budget of {budget} exceeded"));
        }
        Err(e) => {
            builder.lattice_inconclusive = true;
            builder.push(label, false, format!("lattice check failed: {e}"));
        }
    }
}

/// Verify the five-condition constrained certificate (labels (a)-(e)).
pub fn verify_kkt_certificate(
    problem: &Problem,
    cert: &KKTCertificate,
    seed: u64,
) -> Result<VerificationReport> {
    let tols = problem.tolerances;
    let mut builder = ReportBuilder::new(tols);
    let dim = problem.dim();
    let m = problem.m();
    let k = cert.points.len();

    if k == 0 {
        return Ok(builder.invalid("structure", "certificate has no points".into()));
    }
    for (i, pt) in cert.points.iter().enumerate() {
        if pt.x.len() != dim || !finite(&pt.x.coords) {
            return Ok(builder.invalid("structure", format!("point {i}: bad coordinates")));
        }
        if pt.u.len() != m + 1 || !finite(&pt.u) {
            return Ok(builder.invalid("structure", format!("point {i}: bad multiplier vector")));
        }
        if pt.h.len() != m + 1 || pt.h.iter().any(|h| h.len() != dim || !finite(h)) {
            return Ok(builder.invalid("structure", format!("point {i}: bad subgradient list")));
        }
    }
    builder.push("structure", true, format!("{k} points, dimensions consistent"));

    let size_ok = k <= (1usize << problem.n);
    builder.push(
        "size",
        size_ok,
        format!("k = {k} vs bound 2^n = {}", 1usize << problem.n),
    );

    let nonint: Vec<usize> = (0..k)
        .filter(|&i| !cert.points[i].x.is_mixed_integer(problem.n, tols.tol_int))
        .collect();
    builder.push(
        "integrality",
        nonint.is_empty(),
        if nonint.is_empty() {
            "all integer blocks integral".into()
        } else {
            format!("points {nonint:?} off the lattice")
        },
    );

    let neg: Vec<usize> = (0..k)
        .filter(|&i| cert.points[i].u.iter().any(|&v| v < -1e-12))
        .collect();
    builder.push(
        "nonnegativity",
        neg.is_empty(),
        if neg.is_empty() {
            "all multipliers nonnegative".into()
        } else {
            format!("points {neg:?} carry negative multipliers")
        },
    );

    let xstar = &cert.points[0].x.coords;
    let gstar = problem.constraint_values(xstar);
    let star_feasible = gstar.iter().all(|&v| v <= tols.tol_feas);
    builder.push(
        "feasibility",
        star_feasible,
        format!("g(x*) = {gstar:?}"),
    );

    let anchors: Vec<Vec<f64>> = cert.points.iter().map(|p| p.x.coords.clone()).collect();
    let probes = probe_points(problem, &anchors, seed);
    let mut subgrad_fail = Vec::new();
    for (i, pt) in cert.points.iter().enumerate() {
        for j in 0..=m {
            let expr = if j < m { &problem.constraints[j] } else { &problem.objective };
            if let Some(violation) = subgradient_valid(expr, &pt.x.coords, &pt.h[j], &probes, tols.tol_num) {
                subgrad_fail.push((i, j, violation));
            }
        }
    }
    builder.push(
        "subgradients",
        subgrad_fail.is_empty(),
        if subgrad_fail.is_empty() {
            "all supplied vectors satisfy the subgradient inequality on the probe set".into()
        } else {
            format!("violations (point, function, gap): {subgrad_fail:?}")
        },
    );

    let fstar = problem.objective.eval(xstar);
    let mut cond_a_fail = Vec::new();
    let mut cond_b_fail = Vec::new();
    let mut cond_c_fail = Vec::new();
    let mut cond_e_fail = Vec::new();
    for (i, pt) in cert.points.iter().enumerate() {
        let x = &pt.x.coords;
        let gvals = problem.constraint_values(x);
        let feasible = gvals.iter().all(|&v| v <= tols.tol_feas);
        if feasible {
            let fi = problem.objective.eval(x);
            if fi < fstar - tols.tol_num {
                cond_a_fail.push(format!("point {i}: f = {fi} below f(x*) = {fstar}"));
            }
            if pt.u[m] <= 1e-12 {
                cond_a_fail.push(format!("point {i}: objective multiplier not positive"));
            }
            for j in 0..m {
                if (pt.u[j] * gvals[j]).abs() > tols.tol_comp {
                    cond_a_fail.push(format!(
                        "point {i}: complementarity u_{j} g_{j} = {}",
                        pt.u[j] * gvals[j]
                    ));
                }
            }
        } else {
            if pt.u[m].abs() > 1e-12 {
                cond_b_fail.push(format!("point {i}: objective multiplier on infeasible point"));
            }
            let attaining = active_indices(&gvals, tols.tol_act);
            for j in 0..m {
                if !attaining.contains(&j) && pt.u[j] > 1e-12 {
                    cond_b_fail.push(format!("point {i}: weight on non-attaining constraint {j}"));
                }
            }
        }
        let support = pt.u.iter().filter(|&&v| v > 1e-12).count();
        if support == 0 || support > problem.d + 1 {
            cond_c_fail.push(format!("point {i}: support {support}"));
        }
        let mut agg = vec![0.0; dim];
        for (uj, hj) in pt.u.iter().zip(&pt.h) {
            for (ac, hc) in agg.iter_mut().zip(hj) {
                *ac += uj * hc;
            }
        }
        for c in problem.n..dim {
            if agg[c].abs() > tols.tol_stat {
                cond_e_fail.push(format!("point {i}: aggregate {} at coordinate {c}", agg[c]));
            }
        }
    }
    builder.push(
        "(a)",
        cond_a_fail.is_empty(),
        if cond_a_fail.is_empty() { "feasible points dominate x* with positive objective weight and complementarity".into() } else { cond_a_fail.join("; ") },
    );
    builder.push(
        "(b)",
        cond_b_fail.is_empty(),
        if cond_b_fail.is_empty() { "infeasible points weight only attaining constraints".into() } else { cond_b_fail.join("; ") },
    );
    builder.push(
        "(c)",
        cond_c_fail.is_empty(),
        if cond_c_fail.is_empty() { format!("supports within 1..={}", problem.d + 1) } else { cond_c_fail.join("; ") },
    );
    builder.push(
        "(e)",
        cond_e_fail.is_empty(),
        if cond_e_fail.is_empty() { "aggregates vanish on the continuous block".into() } else { cond_e_fail.join("; ") },
    );

    let rows: Vec<HalfSpace<f64>> = cert
        .points
        .iter()
        .map(|pt| {
            let v = certificate_normal(&pt.u, &pt.h, problem.n, dim, tols.tol_stat);
            let offset = linalg::dot(&v, &pt.x.coords);
            HalfSpace::strict(v, offset)
        })
        .collect();
    lattice_condition(&mut builder, "(d)", problem, &OpenPolyhedron::new(rows));

    Ok(builder.finish())
}

/// Verify the unconstrained certificate: ordered objective values, vanishing
/// continuous components, and a lattice-free intersection of subgradient
/// half-spaces.
pub fn verify_unconstrained_certificate(
    problem: &Problem,
    cert: &KKTCertificate,
    seed: u64,
) -> Result<VerificationReport> {
    if problem.m() != 0 {
        return Err(CoreError::InvalidProblem(
            "unconstrained verification requires m = 0".into(),
        ));
    }
    let tols = problem.tolerances;
    let mut builder = ReportBuilder::new(tols);
    let dim = problem.dim();
    let k = cert.points.len();
    if k == 0 {
        return Ok(builder.invalid("structure", "certificate has no points".into()));
    }
    for (i, pt) in cert.points.iter().enumerate() {
        if pt.x.len() != dim || !finite(&pt.x.coords) || pt.h.len() != 1 || pt.h[0].len() != dim || !finite(&pt.h[0]) {
            return Ok(builder.invalid("structure", format!("point {i}: bad data")));
        }
    }
    builder.push("structure", true, format!("{k} points"));
    builder.push(
        "size",
        k <= (1usize << problem.n),
        format!("k = {k} vs bound 2^n = {}", 1usize << problem.n),
    );
    let nonint: Vec<usize> = (0..k)
        .filter(|&i| !cert.points[i].x.is_mixed_integer(problem.n, tols.tol_int))
        .collect();
    builder.push(
        "integrality",
        nonint.is_empty(),
        if nonint.is_empty() { "all points integral".into() } else { format!("points {nonint:?} off the lattice") },
    );

    let anchors: Vec<Vec<f64>> = cert.points.iter().map(|p| p.x.coords.clone()).collect();
    let probes = probe_points(problem, &anchors, seed);
    let mut bad = Vec::new();
    for (i, pt) in cert.points.iter().enumerate() {
        if subgradient_valid(&problem.objective, &pt.x.coords, &pt.h[0], &probes, tols.tol_num).is_some() {
            bad.push(i);
        }
    }
    builder.push(
        "subgradients",
        bad.is_empty(),
        if bad.is_empty() { "all vectors pass the subgradient inequality".into() } else { format!("points {bad:?} fail") },
    );

    let values: Vec<f64> = cert.points.iter().map(|p| problem.objective.eval(&p.x.coords)).collect();
    let ordered = values.windows(2).all(|w| w[0] <= w[1] + tols.tol_num);
    builder.push("(a)", ordered, format!("objective chain {values:?}"));

    let mut cfails = Vec::new();
    for (i, pt) in cert.points.iter().enumerate() {
        for c in problem.n..dim {
            if pt.h[0][c].abs() > tols.tol_stat {
                cfails.push(format!("point {i}: h[{c}] = {}", pt.h[0][c]));
            }
        }
    }
    builder.push(
        "(c)",
        cfails.is_empty(),
        if cfails.is_empty() { "subgradients vanish on the continuous block".into() } else { cfails.join("; ") },
    );

    let rows: Vec<HalfSpace<f64>> = cert
        .points
        .iter()
        .map(|pt| {
            let v = certificate_normal(&[1.0], &pt.h, problem.n, dim, tols.tol_stat);
            let offset = linalg::dot(&v, &pt.x.coords);
            HalfSpace::strict(v, offset)
        })
        .collect();
    lattice_condition(&mut builder, "(b)", problem, &OpenPolyhedron::new(rows));

    Ok(builder.finish())
}

/// Verify a boundary certificate: strict rows from objective points, weak
/// rows from constraint-boundary points; only the claimed optimum needs to
/// be mixed-integer.
pub fn verify_boundary_certificate(
    problem: &Problem,
    cert: &BoundaryCertificate,
    seed: u64,
) -> Result<VerificationReport> {
    let tols = problem.tolerances;
    let mut builder = ReportBuilder::new(tols);
    let dim = problem.dim();
    let m = problem.m();
    let k = cert.x_points.len();
    let l = cert.y_points.len();

    if k == 0 {
        return Ok(builder.invalid("structure", "no objective points".into()));
    }
    for (i, pt) in cert.x_points.iter().enumerate() {
        if pt.x.len() != dim || !finite(&pt.x.coords) || pt.h.len() != dim || !finite(&pt.h) {
            return Ok(builder.invalid("structure", format!("objective point {i}: bad data")));
        }
    }
    for (i, pt) in cert.y_points.iter().enumerate() {
        if pt.y.len() != dim || !finite(&pt.y.coords) || pt.h.len() != dim || !finite(&pt.h) || pt.j >= m {
            return Ok(builder.invalid("structure", format!("boundary point {i}: bad data")));
        }
    }
    builder.push("structure", true, format!("{k} objective points, {l} boundary points"));

    let bound = (1usize << problem.n) * (problem.d + 1);
    builder.push("size", k + l <= bound, format!("k + l = {} vs 2^n (d+1) = {bound}", k + l));

    let xstar = &cert.x_points[0].x;
    builder.push(
        "integrality",
        xstar.is_mixed_integer(problem.n, tols.tol_int),
        "claimed optimum must be mixed-integer".into(),
    );
    let gstar = problem.constraint_values(&xstar.coords);
    builder.push(
        "(a)",
        gstar.iter().all(|&v| v <= tols.tol_feas),
        format!("g(x*) = {gstar:?}"),
    );

    let fstar = problem.objective.eval(&xstar.coords);
    let low: Vec<usize> = cert
        .x_points
        .iter()
        .enumerate()
        .filter(|(_, pt)| problem.objective.eval(&pt.x.coords) < fstar - tols.tol_num)
        .map(|(i, _)| i)
        .collect();
    let infeas_y: Vec<usize> = cert
        .y_points
        .iter()
        .enumerate()
        .filter(|(_, pt)| !problem.is_feasible(&pt.y.coords, tols.tol_feas))
        .map(|(i, _)| i)
        .collect();
    builder.push(
        "(b)",
        low.is_empty() && infeas_y.is_empty(),
        format!("objective points below level: {low:?}; infeasible boundary points: {infeas_y:?}"),
    );

    let off_boundary: Vec<usize> = cert
        .y_points
        .iter()
        .enumerate()
        .filter(|(_, pt)| problem.constraints[pt.j].eval(&pt.y.coords).abs() > tols.tol_act)
        .map(|(i, _)| i)
        .collect();
    builder.push(
        "(c):boundary",
        off_boundary.is_empty(),
        if off_boundary.is_empty() { "boundary points sit on their constraint".into() } else { format!("points {off_boundary:?} not on the boundary") },
    );

    let anchors: Vec<Vec<f64>> = cert
        .x_points
        .iter()
        .map(|p| p.x.coords.clone())
        .chain(cert.y_points.iter().map(|p| p.y.coords.clone()))
        .collect();
    let probes = probe_points(problem, &anchors, seed);
    let mut bad = Vec::new();
    for (i, pt) in cert.x_points.iter().enumerate() {
        if subgradient_valid(&problem.objective, &pt.x.coords, &pt.h, &probes, tols.tol_num).is_some() {
            bad.push(format!("objective point {i}"));
        }
    }
    for (i, pt) in cert.y_points.iter().enumerate() {
        if subgradient_valid(&problem.constraints[pt.j], &pt.y.coords, &pt.h, &probes, tols.tol_num).is_some() {
            bad.push(format!("boundary point {i}"));
        }
    }
    builder.push(
        "(c):subgradients",
        bad.is_empty(),
        if bad.is_empty() { "all vectors pass the subgradient inequality".into() } else { bad.join("; ") },
    );

    let mut rows: Vec<HalfSpace<f64>> = Vec::with_capacity(k + l);
    for pt in &cert.x_points {
        rows.push(HalfSpace::strict(pt.h.clone(), linalg::dot(&pt.h, &pt.x.coords)));
    }
    for pt in &cert.y_points {
        rows.push(HalfSpace::weak(pt.h.clone(), linalg::dot(&pt.h, &pt.y.coords)));
    }
    lattice_condition(&mut builder, "(c):lattice-free", problem, &OpenPolyhedron::new(rows));

    Ok(builder.finish())
}

/// Mixed-integer Slater report: every feasible fiber must admit strictly
/// negative constraint values.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SlaterReport {
    pub holds: bool,
    pub violations: Vec<SlaterViolation>,
    pub errors: Vec<SlaterFiberError>,
    pub fibers_checked: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SlaterViolation {
    pub z: Vec<i64>,
    pub minimax_value: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SlaterFiberError {
    pub z: Vec<i64>,
    pub error: String,
}

/// Check the mixed-integer Slater condition over the box: a feasible fiber
/// (minimax value <= tol_feas) violates unless its minimax value is
/// strictly below `-tol_strict`.
pub fn check_mixed_slater(problem: &Problem) -> Result<SlaterReport> {
    let tols = &problem.tolerances;
    if problem.m() == 0 {
        return Ok(SlaterReport { holds: true, violations: vec![], errors: vec![], fibers_checked: 0 });
    }
    let fibers = problem.fibers(FIBER_BUDGET)?;
    let comps: Vec<&ConvexExpr> = problem.constraints.iter().collect();
    let outcomes: Vec<(Vec<i64>, std::result::Result<f64, String>)> = fibers
        .par_iter()
        .map(|z| {
            let view = FiberView::for_fiber(z, &problem.bounds.lo, &problem.bounds.hi);
            let r = minimize_max(&comps, &view, tols)
                .map(|s| s.value)
                .map_err(|e| e.to_string());
            (z.clone(), r)
        })
        .collect();
    let mut violations = Vec::new();
    let mut errors = Vec::new();
    for (z, outcome) in outcomes {
        match outcome {
            Ok(value) => {
                if value <= tols.tol_feas && value >= -tols.tol_strict {
                    violations.push(SlaterViolation { z, minimax_value: value });
                }
            }
            Err(e) => errors.push(SlaterFiberError { z, error: e }),
        }
    }
    Ok(SlaterReport {
        holds: violations.is_empty() && errors.is_empty(),
        violations,
        errors,
        fibers_checked: fibers.len(),
    })
}

/// Search for a standard Slater point: some `s` with `g(s) < 0` strictly.
pub fn check_standard_slater(problem: &Problem) -> Result<Option<Point>> {
    if problem.m() == 0 {
        return Ok(Some(Point::new(problem.bounds.center())));
    }
    let comps: Vec<&ConvexExpr> = problem.constraints.iter().collect();
    let view = FiberView::full_space(&problem.bounds.lo, &problem.bounds.hi);
    let solved = minimize_max(&comps, &view, &problem.tolerances)?;
    if solved.value < -problem.tolerances.tol_strict {
        Ok(Some(Point::new(solved.y)))
    } else {
        Ok(None)
    }
}

/// Construct a certificate for the problem: solve every fiber in the box
/// for its value, pick the incumbent, grow a covering set of fiber
/// half-spaces (recovering multipliers lazily, only for fibers whose row is
/// needed), reduce to at most `2^n` members with the incumbent pinned, and
/// self-verify the result.
pub fn construct_certificate(
    problem: &Problem,
    seed: u64,
) -> Result<(KKTCertificate, VerificationReport)> {
    let tols = &problem.tolerances;
    if problem.n > CONSTRUCT_MAX_N {
        return Err(CoreError::GuardViolated(format!(
            "construction guard: n <= {CONSTRUCT_MAX_N}, got {}",
            problem.n
        )));
    }
    let fibers = problem.fibers(FIBER_BUDGET)?;
    if fibers.is_empty() {
        return Err(CoreError::NoFeasibleFiber);
    }
    let solves: Vec<Result<FiberValue>> = fibers
        .par_iter()
        .map(|z| fiber_value(problem, z, tols))
        .collect();
    let mut values: Vec<FiberValue> = Vec::with_capacity(solves.len());
    for s in solves {
        values.push(s?);
    }

    // Mixed-integer Slater inline: feasible fibers need strict slack.
    for fv in &values {
        if let Some(mm) = fv.minimax_value {
            if fv.feasible && mm >= -tols.tol_strict {
                return Err(CoreError::SlaterViolated { fiber: fv.z.clone(), value: mm });
            }
        }
    }

    let incumbent_idx = values
        .iter()
        .enumerate()
        .filter(|(_, fv)| fv.feasible)
        .min_by(|a, b| a.1.value.partial_cmp(&b.1.value).unwrap())
        .map(|(i, _)| i)
        .ok_or(CoreError::NoFeasibleFiber)?;

    let dim = problem.dim();
    // Lazy multiplier recovery: fibers whose half-space never enters the
    // certificate (for instance distant fibers whose minimizer is clamped
    // by the box) are never asked for multipliers.
    let mut recovered: Vec<Option<Result<FiberResult>>> = vec![None; values.len()];
    let recover = |values: &[FiberValue],
                   cache: &mut Vec<Option<Result<FiberResult>>>,
                   i: usize|
     -> Result<FiberResult> {
        if cache[i].is_none() {
            cache[i] = Some(recover_fiber_result(problem, &values[i], tols));
        }
        cache[i].as_ref().unwrap().clone()
    };
    let row_of = |fr: &FiberResult| {
        let v = certificate_normal(fr.multipliers(), fr.subgradients(), problem.n, dim, tols.tol_stat);
        let offset = linalg::dot(&v, &fr.point(problem));
        HalfSpace::strict(v, offset)
    };
    let to_cert_point = |fr: &FiberResult| CertificatePoint {
        x: Point::new(fr.point(problem)),
        u: fr.multipliers().to_vec(),
        h: fr.subgradients().to_vec(),
    };

    let incumbent = recover(&values, &mut recovered, incumbent_idx)?;
    let incumbent_row = row_of(&incumbent);

    // Degenerate branch: the incumbent is already a continuous minimizer of
    // its weighted system, so the one-point certificate suffices.
    if incumbent_row.normal.iter().all(|&v| v == 0.0) {
        let cert = KKTCertificate { points: vec![to_cert_point(&incumbent)] };
        let report = verify_kkt_certificate(problem, &cert, seed)?;
        return Ok((cert, report));
    }

    // Growth: walk pending fibers in lexicographic order; any fiber still
    // strictly inside the current intersection contributes its own
    // half-space (which always excludes it). Exclusion is monotone under
    // row additions, so excluded fibers drop out permanently. Fibers whose
    // multiplier recovery fails stay pending in the hope that a later row
    // excludes them; a stuck pending fiber fails the construction with its
    // recovery error.
    let inflated = problem.bounds.inflate(2.0, 1.0);
    let mut chosen: Vec<FiberResult> = vec![incumbent.clone()];
    let mut rows: Vec<HalfSpace<f64>> = vec![incumbent_row];
    let grow = |values: &[FiberValue],
                rows: &mut Vec<HalfSpace<f64>>,
                chosen: &mut Vec<FiberResult>,
                recovered: &mut Vec<Option<Result<FiberResult>>>,
                pending: &mut Vec<usize>|
     -> Result<()> {
        loop {
            let mut added = false;
            let mut still = Vec::new();
            let mut first_failure: Option<CoreError> = None;
            for &i in pending.iter() {
                let poly = OpenPolyhedron::new(rows.clone());
                let inside = strict_feasible_on_fiber(
                    &poly,
                    &values[i].z,
                    &inflated.lo,
                    &inflated.hi,
                    &tols.tol_strict,
                )?;
                if inside.is_none() {
                    continue;
                }
                match recover(values, recovered, i) {
                    Ok(fr) => {
                        rows.push(row_of(&fr));
                        chosen.push(fr);
                        added = true;
                    }
                    Err(e) => {
                        if first_failure.is_none() {
                            first_failure = Some(e);
                        }
                        still.push(i);
                    }
                }
            }
            *pending = still;
            if pending.is_empty() {
                return Ok(());
            }
            if !added {
                return Err(first_failure.expect("pending fibers carry a failure"));
            }
        }
    };
    let mut pending: Vec<usize> = (0..values.len()).filter(|&i| i != incumbent_idx).collect();
    grow(&values, &mut rows, &mut chosen, &mut recovered, &mut pending)?;

    let mut status = mixed_lattice_free(
        &OpenPolyhedron::new(rows.clone()),
        &problem.bounds,
        problem.n,
        &tols.tol_strict,
        FIBER_BUDGET,
    )?;
    if status != LatticeStatus::LatticeFree {
        // Box fibers alone may not bound the polyhedron: integer points of
        // the inflated probe range outside the box still need excluding.
        // Their fibers are infeasible under the compactness premise (the
        // feasible set lives inside the box), so they contribute ordinary
        // minimax rows.
        let mut outside: Vec<Vec<i64>> = Vec::new();
        let ranges: Vec<(i64, i64)> = (0..problem.n)
            .map(|i| {
                (
                    (inflated.lo[i] - 1e-9).ceil() as i64,
                    (inflated.hi[i] + 1e-9).floor() as i64,
                )
            })
            .collect();
        let box_ranges = problem.fiber_ranges();
        for z in crate::problem::enumerate_lattice(&ranges, FIBER_BUDGET)? {
            let in_box = z
                .iter()
                .zip(&box_ranges)
                .all(|(&zi, &(lo, hi))| zi >= lo && zi <= hi);
            if !in_box {
                outside.push(z);
            }
        }
        let outer_solves: Vec<Result<FiberValue>> = outside
            .par_iter()
            .map(|z| fiber_value(problem, z, tols))
            .collect();
        let base = values.len();
        for s in outer_solves {
            let fv = s?;
            if fv.feasible && fv.value < incumbent.objective_value() - tols.tol_num {
                return Err(CoreError::Inconclusive(format!(
                    "feasible fiber {:?} outside the box beats the incumbent; the \
                     compactness premise does not hold",
                    fv.z
                )));
            }
            values.push(fv);
            recovered.push(None);
        }
        let mut outer_pending: Vec<usize> = (base..values.len())
            .filter(|&i| !values[i].feasible)
            .collect();
        grow(&values, &mut rows, &mut chosen, &mut recovered, &mut outer_pending)?;
        status = mixed_lattice_free(
            &OpenPolyhedron::new(rows.clone()),
            &problem.bounds,
            problem.n,
            &tols.tol_strict,
            FIBER_BUDGET,
        )?;
    }
    match status {
        LatticeStatus::LatticeFree => {}
        LatticeStatus::Witness(w) => {
            return Err(CoreError::Inconclusive(format!(
                "integer witness {w:?} outside the enumerated fibers"
            )));
        }
        LatticeStatus::UnboundedInconclusive => {
            return Err(CoreError::Inconclusive(
                "fiber half-spaces do not bound the certificate polyhedron".into(),
            ));
        }
    }

    let grown = OpenPolyhedron::new(rows);
    let selection = doignon_select(&grown, &problem.bounds, problem.n, Some(0), &tols.tol_strict, FIBER_BUDGET)?;
    let mut points = Vec::with_capacity(selection.indices.len());
    points.push(to_cert_point(&incumbent));
    for &si in &selection.indices {
        if si == 0 {
            continue;
        }
        points.push(to_cert_point(&chosen[si]));
    }
    let cert = KKTCertificate { points };
    let report = verify_kkt_certificate(problem, &cert, seed)?;
    Ok((cert, report))
}

/// Projection-property check for squared-distance objectives: every sampled
/// feasible mixed-integer point must satisfy the obtuse-angle and
/// distance-domination inequalities against some certificate point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProjectionReport {
    pub counterexamples: Vec<Point>,
    pub checked: usize,
}

pub fn verify_projection_property(
    problem: &Problem,
    target: &[f64],
    cert: &KKTCertificate,
    extra_samples: usize,
    seed: u64,
) -> Result<ProjectionReport> {
    let tols = &problem.tolerances;
    if target.len() != problem.dim() {
        return Err(CoreError::DimensionMismatch { expected: problem.dim(), found: target.len() });
    }
    // Samples: every feasible fiber's solved point plus seeded random
    // feasible points.
    let mut samples: Vec<Vec<f64>> = Vec::new();
    let fibers = problem.fibers(FIBER_BUDGET)?;
    let solved: Vec<Option<Vec<f64>>> = fibers
        .par_iter()
        .map(|z| {
            fiber_value(problem, z, tols)
                .ok()
                .filter(|fv| fv.feasible)
                .map(|fv| problem.assemble(&fv.z, &fv.y))
        })
        .collect();
    let feasible_fibers: Vec<usize> = solved
        .iter()
        .enumerate()
        .filter(|(_, s)| s.is_some())
        .map(|(i, _)| i)
        .collect();
    for s in solved.iter().flatten() {
        samples.push(s.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut attempts = 0usize;
    while samples.len() < feasible_fibers.len() + extra_samples && attempts < 200 * (extra_samples + 1) {
        attempts += 1;
        if feasible_fibers.is_empty() {
            break;
        }
        let fi = feasible_fibers[rng.gen_range(0..feasible_fibers.len())];
        let z = &fibers[fi];
        let y: Vec<f64> = (problem.n..problem.dim())
            .map(|c| {
                let (l, h) = (problem.bounds.lo[c], problem.bounds.hi[c]);
                l + rng.gen::<f64>() * (h - l)
            })
            .collect();
        let x = problem.assemble(z, &y);
        if problem.is_feasible(&x, tols.tol_feas) {
            samples.push(x);
        }
    }

    let norm = |v: &[f64]| linalg::dot(v, v).sqrt();
    let mut counterexamples = Vec::new();
    for x in &samples {
        let mut obtuse = false;
        let mut closer = false;
        let dist_target = norm(&x.iter().zip(target).map(|(a, b)| a - b).collect::<Vec<f64>>());
        for pt in &cert.points {
            let xi = &pt.x.coords;
            let inner: f64 = target
                .iter()
                .zip(xi)
                .zip(x.iter().zip(xi))
                .map(|((yc, xic), (xc, xic2))| (yc - xic) * (xc - xic2))
                .sum();
            if inner <= tols.tol_num {
                obtuse = true;
            }
            let dist_xi = norm(&x.iter().zip(xi).map(|(a, b)| a - b).collect::<Vec<f64>>());
            if dist_target >= dist_xi - tols.tol_num {
                closer = true;
            }
            if obtuse && closer {
                break;
            }
        }
        if !(obtuse && closer) {
            counterexamples.push(Point::new(x.clone()));
        }
    }
    Ok(ProjectionReport { counterexamples, checked: samples.len() })
}

// ---------------------------------------------------------------------------
// Certificate file format
// ---------------------------------------------------------------------------

/// On-disk certificate: `{"theorem":"1"|"2"|"3","points":[{"x","u","h"}],
/// "y_points":[{"y","j","h"}],"claimed_value":v}`. Constraint indices `j`
/// are 1-based in files.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateFile {
    pub theorem: String,
    pub points: Vec<FilePoint>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub y_points: Vec<FileBoundaryPoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub claimed_value: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FilePoint {
    pub x: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<Vec<f64>>,
    pub h: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FileBoundaryPoint {
    pub y: Vec<f64>,
    pub j: usize,
    pub h: Vec<f64>,
}

impl CertificateFile {
    pub fn from_json_str(text: &str) -> Result<CertificateFile> {
        serde_json::from_str(text)
            .map_err(|e| CoreError::InvalidCertificate(format!("certificate JSON: {e}")))
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_kkt(cert: &KKTCertificate, problem: &Problem, theorem: &str) -> CertificateFile {
        CertificateFile {
            theorem: theorem.to_string(),
            points: cert
                .points
                .iter()
                .map(|p| FilePoint { x: p.x.coords.clone(), u: Some(p.u.clone()), h: p.h.clone() })
                .collect(),
            y_points: vec![],
            claimed_value: Some(problem.objective.eval(&cert.points[0].x.coords)),
        }
    }

    pub fn as_kkt(&self, problem: &Problem) -> Result<KKTCertificate> {
        let m = problem.m();
        let points = self
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let u = match &p.u {
                    Some(u) => u.clone(),
                    None if m == 0 => vec![1.0],
                    None => {
                        return Err(CoreError::InvalidCertificate(format!(
                            "point {i} is missing multipliers"
                        )))
                    }
                };
                Ok(CertificatePoint { x: Point::new(p.x.clone()), u, h: p.h.clone() })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(KKTCertificate { points })
    }

    pub fn as_boundary(&self) -> Result<BoundaryCertificate> {
        let x_points = self
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| {
                if p.h.len() != 1 {
                    return Err(CoreError::InvalidCertificate(format!(
                        "objective point {i} must carry exactly one subgradient"
                    )));
                }
                Ok(ObjectivePoint { x: Point::new(p.x.clone()), h: p.h[0].clone() })
            })
            .collect::<Result<Vec<_>>>()?;
        let y_points = self
            .y_points
            .iter()
            .enumerate()
            .map(|(i, p)| {
                if p.j == 0 {
                    return Err(CoreError::InvalidCertificate(format!(
                        "boundary point {i}: constraint indices are 1-based"
                    )));
                }
                Ok(BoundaryPoint { y: Point::new(p.y.clone()), j: p.j - 1, h: p.h.clone() })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BoundaryCertificate { x_points, y_points })
    }

    pub fn from_boundary(cert: &BoundaryCertificate, claimed_value: Option<f64>) -> CertificateFile {
        CertificateFile {
            theorem: "3".into(),
            points: cert
                .x_points
                .iter()
                .map(|p| FilePoint { x: p.x.coords.clone(), u: None, h: vec![p.h.clone()] })
                .collect(),
            y_points: cert
                .y_points
                .iter()
                .map(|p| FileBoundaryPoint { y: p.y.coords.clone(), j: p.j + 1, h: p.h.clone() })
                .collect(),
            claimed_value,
        }
    }
}

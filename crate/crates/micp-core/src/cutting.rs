//! Cutting-plane minimization of convex expressions over a fiber, with a
//! Newton polish step for high-accuracy stationary points.
//!
//! The outer loop is a standard cutting-plane scheme: affine lower models
//! built from subgradients feed a master LP, and the model gap certifies
//! termination. Multiplier recovery downstream is sensitive to argument
//! accuracy, so once the gap is small the active set is polished by Newton
//! iterations on the stationarity system; when the polish fails (for
//! instance a kink exactly at the optimum) the cutting-plane iterate is
//! used as is.

use crate::error::{CoreError, Result};
use crate::expr::ConvexExpr;
use crate::linalg;
use crate::simplex::{lp_solve, LpOutcome};
use crate::tol::Tolerances;

/// A continuous subproblem: leading coordinates frozen, trailing block free
/// inside finite bounds. Fibers freeze the integer block; full-space solves
/// freeze nothing.
#[derive(Debug, Clone)]
pub struct FiberView {
    pub prefix: Vec<f64>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl FiberView {
    pub fn for_fiber(z: &[i64], lo: &[f64], hi: &[f64]) -> FiberView {
        let n = z.len();
        FiberView {
            prefix: z.iter().map(|&v| v as f64).collect(),
            lo: lo[n..].to_vec(),
            hi: hi[n..].to_vec(),
        }
    }

    pub fn full_space(lo: &[f64], hi: &[f64]) -> FiberView {
        FiberView { prefix: Vec::new(), lo: lo.to_vec(), hi: hi.to_vec() }
    }

    pub fn free_dim(&self) -> usize {
        self.lo.len()
    }

    pub fn assemble(&self, y: &[f64]) -> Vec<f64> {
        let mut x = self.prefix.clone();
        x.extend_from_slice(y);
        x
    }

    fn full_lo(&self) -> Vec<f64> {
        let mut v = self.prefix.clone();
        v.extend_from_slice(&self.lo);
        v
    }

    fn full_hi(&self) -> Vec<f64> {
        let mut v = self.prefix.clone();
        v.extend_from_slice(&self.hi);
        v
    }

    fn start(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(l, h)| 0.5 * (l + h)).collect()
    }

    fn contains(&self, y: &[f64], slack: f64) -> bool {
        y.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(&v, (&l, &h))| v >= l - slack && v <= h + slack)
    }
}

/// Solution of a fiber subproblem.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub y: Vec<f64>,
    pub value: f64,
    pub gap: f64,
    pub polished: bool,
}

#[derive(Debug, Clone)]
pub enum ConstrainedOutcome {
    Solved(SolveOutcome),
    /// The affine model proved the constraint system empty on this fiber.
    Infeasible,
}

const MAX_CUTS: usize = 160;
const KEEP_RECENT: usize = 60;
const MAX_ITER: usize = 400;

struct Master {
    d: usize,
    lo: Vec<f64>,
    hi: Vec<f64>,
    // Each row: coeffs (d vars then optional t) <= rhs, plus insertion age.
    rows: Vec<(Vec<f64>, f64, usize)>,
    age: usize,
    t_bounds: Option<(f64, f64)>,
}

impl Master {
    fn new(view: &FiberView, t_bounds: Option<(f64, f64)>) -> Master {
        Master {
            d: view.free_dim(),
            lo: view.lo.clone(),
            hi: view.hi.clone(),
            rows: Vec::new(),
            age: 0,
            t_bounds,
        }
    }

    fn nvars(&self) -> usize {
        self.d + usize::from(self.t_bounds.is_some())
    }

    fn push_row(&mut self, coeffs: Vec<f64>, rhs: f64) {
        self.rows.push((coeffs, rhs, self.age));
        self.age += 1;
    }

    /// Epigraph cut t >= value + grad . (y - y0), i.e. grad.y - t <= grad.y0 - value.
    fn push_objective_cut(&mut self, y0: &[f64], value: f64, grad_y: &[f64]) {
        let mut coeffs = grad_y.to_vec();
        coeffs.push(-1.0);
        self.push_row(coeffs, linalg::dot(grad_y, y0) - value);
    }

    /// Feasibility cut 0 >= value + grad . (y - y0).
    fn push_feasibility_cut(&mut self, y0: &[f64], value: f64, grad_y: &[f64]) {
        let mut coeffs = grad_y.to_vec();
        if self.t_bounds.is_some() {
            coeffs.push(0.0);
        }
        self.push_row(coeffs, linalg::dot(grad_y, y0) - value);
    }

    fn prune(&mut self, at: &[f64]) {
        if self.rows.len() <= MAX_CUTS {
            return;
        }
        let newest = self.age;
        self.rows.retain(|(coeffs, rhs, age)| {
            let slack = rhs - linalg::dot(coeffs, at);
            newest - age <= KEEP_RECENT || slack <= 1e-7
        });
    }

    fn solve(&self) -> Result<Option<(Vec<f64>, f64)>> {
        let nv = self.nvars();
        let mut c = vec![0.0; nv];
        let mut lo = self.lo.clone();
        let mut hi = self.hi.clone();
        if let Some((tl, th)) = self.t_bounds {
            c[nv - 1] = 1.0;
            lo.push(tl);
            hi.push(th);
        }
        let rows: Vec<(Vec<f64>, f64)> = self
            .rows
            .iter()
            .map(|(coeffs, rhs, _)| (coeffs.clone(), *rhs))
            .collect();
        match lp_solve(&c, &rows, &lo, &hi)? {
            LpOutcome::Infeasible => Ok(None),
            LpOutcome::Optimal { x, .. } => {
                let t = if self.t_bounds.is_some() { x[nv - 1] } else { 0.0 };
                Ok(Some((x[..self.d].to_vec(), t)))
            }
        }
    }
}

fn grad_y(expr: &ConvexExpr, x: &[f64], d: usize, tol_act: f64) -> Vec<f64> {
    let g = expr.subgradient(x, tol_act);
    g[g.len() - d..].to_vec()
}

/// Minimize `max_j components[j]` over the view. The active set and its
/// convex weights at the solution come out of the polish when it succeeds.
pub fn minimize_max(
    components: &[&ConvexExpr],
    view: &FiberView,
    tols: &Tolerances,
) -> Result<SolveOutcome> {
    assert!(!components.is_empty());
    let d = view.free_dim();
    let eval_max = |x: &[f64]| -> f64 {
        components
            .iter()
            .map(|c| c.eval(x))
            .fold(f64::NEG_INFINITY, f64::max)
    };
    if d == 0 {
        let x = view.assemble(&[]);
        return Ok(SolveOutcome { y: Vec::new(), value: eval_max(&x), gap: 0.0, polished: true });
    }
    let (flo, fhi) = (view.full_lo(), view.full_hi());
    let mut t_lo = f64::INFINITY;
    let mut t_hi = f64::NEG_INFINITY;
    for c in components {
        let (l, h) = c.value_bounds(&flo, &fhi);
        t_lo = t_lo.min(l);
        t_hi = t_hi.max(h);
    }
    let mut master = Master::new(view, Some((t_lo - 1.0, t_hi + 1.0)));

    let mut y = view.start();
    let mut best_y = y.clone();
    let mut upper = f64::INFINITY;
    let mut lower = f64::NEG_INFINITY;
    let mut polished = false;
    for iter in 0..MAX_ITER {
        let x = view.assemble(&y);
        let mut here = f64::NEG_INFINITY;
        for c in components {
            let v = c.eval(&x);
            here = here.max(v);
            master.push_objective_cut(&y, v, &grad_y(c, &x, d, tols.tol_act));
        }
        if here < upper {
            upper = here;
            best_y = y.clone();
        }
        if upper - lower <= tols.eps_solve {
            break;
        }
        // Try the polish early once the gap is workable.
        if upper - lower <= 1e-5 || iter == MAX_ITER - 1 {
            if let Some((py, pv)) = polish_max(components, view, &best_y, tols) {
                if pv <= upper + 1e-9 {
                    best_y = py;
                    upper = pv;
                    polished = true;
                    break;
                }
            }
        }
        master.prune(&y);
        match master.solve()? {
            Some((ny, t)) => {
                lower = lower.max(t);
                y = ny;
            }
            None => {
                return Err(CoreError::Numerical(
                    "minimax master infeasible within box".into(),
                ))
            }
        }
    }
    let gap = (upper - lower).max(0.0);
    if !polished && gap > tols.eps_solve {
        return Err(CoreError::SolverStalled {
            value: upper,
            gap,
            point: view.assemble(&best_y),
        });
    }
    Ok(SolveOutcome { y: best_y, value: upper, gap: if polished { 0.0 } else { gap }, polished })
}

/// Minimize `objective` subject to `constraints <= 0` over the view.
pub fn minimize_constrained(
    objective: &ConvexExpr,
    constraints: &[&ConvexExpr],
    view: &FiberView,
    tols: &Tolerances,
) -> Result<ConstrainedOutcome> {
    let d = view.free_dim();
    if d == 0 {
        let x = view.assemble(&[]);
        let feasible = constraints.iter().all(|g| g.eval(&x) <= tols.tol_feas);
        if !feasible {
            return Ok(ConstrainedOutcome::Infeasible);
        }
        return Ok(ConstrainedOutcome::Solved(SolveOutcome {
            y: Vec::new(),
            value: objective.eval(&x),
            gap: 0.0,
            polished: true,
        }));
    }
    let (flo, fhi) = (view.full_lo(), view.full_hi());
    let (t_lo, t_hi) = objective.value_bounds(&flo, &fhi);
    let mut master = Master::new(view, Some((t_lo - 1.0, t_hi + 1.0)));

    let mut y = view.start();
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut lower = f64::NEG_INFINITY;
    let mut polished = false;
    for iter in 0..MAX_ITER {
        let x = view.assemble(&y);
        let fval = objective.eval(&x);
        master.push_objective_cut(&y, fval, &grad_y(objective, &x, d, tols.tol_act));
        let mut violation = f64::NEG_INFINITY;
        for g in constraints {
            let gval = g.eval(&x);
            violation = violation.max(gval);
            master.push_feasibility_cut(&y, gval, &grad_y(g, &x, d, tols.tol_act));
        }
        if violation <= tols.tol_feas && best.as_ref().map_or(true, |(_, bv)| fval < *bv) {
            best = Some((y.clone(), fval));
        }
        let upper = best.as_ref().map_or(f64::INFINITY, |(_, bv)| *bv);
        if upper - lower <= tols.eps_solve {
            break;
        }
        if upper - lower <= 1e-5 || iter == MAX_ITER - 1 {
            let seed = best.as_ref().map_or(&y, |(by, _)| by);
            if let Some((py, pv)) = polish_constrained(objective, constraints, view, seed, tols) {
                // A clean KKT point is globally optimal here; `upper` can
                // undershoot it slightly because tol_feas-feasible iterates
                // are accepted as upper bounds.
                if pv <= upper + 1e-4 {
                    best = Some((py, pv));
                    polished = true;
                    break;
                }
            }
        }
        master.prune(&y);
        match master.solve()? {
            Some((ny, t)) => {
                lower = lower.max(t);
                y = ny;
            }
            None => return Ok(ConstrainedOutcome::Infeasible),
        }
    }
    match best {
        None => Ok(ConstrainedOutcome::Infeasible),
        Some((by, bv)) => {
            let gap = (bv - lower).max(0.0);
            if !polished && gap > tols.eps_solve {
                return Err(CoreError::SolverStalled { value: bv, gap, point: view.assemble(&by) });
            }
            Ok(ConstrainedOutcome::Solved(SolveOutcome {
                y: by,
                value: bv,
                gap: if polished { 0.0 } else { gap },
                polished,
            }))
        }
    }
}

fn hessian_y(expr: &ConvexExpr, x: &[f64], d: usize, tol_act: f64) -> Vec<Vec<f64>> {
    let h = expr.hessian(x, tol_act);
    let dim = x.len();
    (dim - d..dim)
        .map(|i| h[i][dim - d..].to_vec())
        .collect()
}

/// Newton iterations on the KKT stationarity system of the active set.
/// Returns the refined minimizer and value, or `None` when the iteration
/// does not converge cleanly inside the box.
fn polish_constrained(
    objective: &ConvexExpr,
    constraints: &[&ConvexExpr],
    view: &FiberView,
    seed: &[f64],
    tols: &Tolerances,
) -> Option<(Vec<f64>, f64)> {
    let x_seed = view.assemble(seed);
    let mut active: Vec<usize> = constraints
        .iter()
        .enumerate()
        .filter(|(_, g)| g.eval(&x_seed) >= -1e-5)
        .map(|(j, _)| j)
        .collect();
    for _round in 0..(2 * constraints.len() + 4) {
        let (y, lambda) = newton_kkt(objective, constraints, &active, view, seed, tols)?;
        if let Some(worst) = lambda
            .iter()
            .enumerate()
            .filter(|(_, &l)| l < -1e-9)
            .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(i, _)| i)
        {
            active.remove(worst);
            continue;
        }
        let x = view.assemble(&y);
        let violated = constraints
            .iter()
            .enumerate()
            .filter(|(j, g)| !active.contains(j) && g.eval(&x) > 1e-11)
            .max_by(|a, b| a.1.eval(&x).partial_cmp(&b.1.eval(&x)).unwrap())
            .map(|(j, _)| j);
        if let Some(j) = violated {
            active.push(j);
            active.sort_unstable();
            continue;
        }
        if !view.contains(&y, 1e-9) {
            return None;
        }
        return Some((y.clone(), objective.eval(&x)));
    }
    None
}

fn newton_kkt(
    objective: &ConvexExpr,
    constraints: &[&ConvexExpr],
    active: &[usize],
    view: &FiberView,
    seed: &[f64],
    tols: &Tolerances,
) -> Option<(Vec<f64>, Vec<f64>)> {
    let d = view.free_dim();
    let k = active.len();
    let mut y = seed.to_vec();
    let mut lambda = vec![0.0; k];
    let mut last_norm = f64::INFINITY;
    for _step in 0..40 {
        let x = view.assemble(&y);
        let gf = grad_y(objective, &x, d, tols.tol_act);
        let grads: Vec<Vec<f64>> = active
            .iter()
            .map(|&j| grad_y(constraints[j], &x, d, tols.tol_act))
            .collect();
        let mut residual = vec![0.0; d + k];
        for c in 0..d {
            residual[c] = gf[c];
            for (i, g) in grads.iter().enumerate() {
                residual[c] += lambda[i] * g[c];
            }
        }
        for (i, &j) in active.iter().enumerate() {
            residual[d + i] = constraints[j].eval(&x);
        }
        let norm = linalg::norm_inf(&residual);
        if norm <= 1e-12 {
            return Some((y, lambda));
        }
        if norm > last_norm * 10.0 {
            return None;
        }
        last_norm = last_norm.min(norm);

        let mut h = hessian_y(objective, &x, d, tols.tol_act);
        for (i, &j) in active.iter().enumerate() {
            let hj = hessian_y(constraints[j], &x, d, tols.tol_act);
            for r in 0..d {
                for c in 0..d {
                    h[r][c] += lambda[i] * hj[r][c];
                }
            }
        }
        let size = d + k;
        let mut jac = vec![vec![0.0; size]; size];
        for r in 0..d {
            jac[r][..d].copy_from_slice(&h[r]);
            for (i, g) in grads.iter().enumerate() {
                jac[r][d + i] = g[r];
            }
        }
        for (i, g) in grads.iter().enumerate() {
            jac[d + i][..d].copy_from_slice(g);
        }
        let rhs: Vec<f64> = residual.iter().map(|v| -v).collect();
        let delta = linalg::solve_dense(&jac, &rhs)?;
        for c in 0..d {
            y[c] += delta[c];
        }
        for i in 0..k {
            lambda[i] += delta[d + i];
        }
        if !y.iter().all(|v| v.is_finite()) {
            return None;
        }
    }
    None
}

/// Newton polish of a minimax point: level equalities plus weighted
/// stationarity over the active components.
fn polish_max(
    components: &[&ConvexExpr],
    view: &FiberView,
    seed: &[f64],
    tols: &Tolerances,
) -> Option<(Vec<f64>, f64)> {
    let x_seed = view.assemble(seed);
    let values: Vec<f64> = components.iter().map(|c| c.eval(&x_seed)).collect();
    let top = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut active: Vec<usize> = (0..components.len())
        .filter(|&j| values[j] >= top - 1e-5)
        .collect();
    for _round in 0..(components.len() + 3) {
        let solved = newton_minimax(components, &active, view, seed, tols)?;
        let (y, weights, level) = solved;
        if let Some(worst) = weights
            .iter()
            .enumerate()
            .filter(|(_, &w)| w < -1e-9)
            .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(i, _)| i)
        {
            if active.len() <= 1 {
                return None;
            }
            active.remove(worst);
            continue;
        }
        let x = view.assemble(&y);
        // Another component rising above the level means the active set was
        // wrong; add it and retry.
        let rising = (0..components.len())
            .filter(|j| !active.contains(j))
            .find(|&j| components[j].eval(&x) > level + 1e-11);
        if let Some(j) = rising {
            active.push(j);
            active.sort_unstable();
            continue;
        }
        if !view.contains(&y, 1e-9) {
            return None;
        }
        let value = components
            .iter()
            .map(|c| c.eval(&x))
            .fold(f64::NEG_INFINITY, f64::max);
        return Some((y, value));
    }
    None
}

fn newton_minimax(
    components: &[&ConvexExpr],
    active: &[usize],
    view: &FiberView,
    seed: &[f64],
    tols: &Tolerances,
) -> Option<(Vec<f64>, Vec<f64>, f64)> {
    let d = view.free_dim();
    let k = active.len();
    let mut y = seed.to_vec();
    let mut w = vec![1.0 / k as f64; k];
    let x0 = view.assemble(&y);
    let mut level = active
        .iter()
        .map(|&j| components[j].eval(&x0))
        .fold(f64::NEG_INFINITY, f64::max);
    let mut last_norm = f64::INFINITY;
    // Unknowns: y (d), w (k), level (1). Equations: k levels, d stationarity,
    // 1 normalization.
    let size = d + k + 1;
    for _step in 0..40 {
        let x = view.assemble(&y);
        let grads: Vec<Vec<f64>> = active
            .iter()
            .map(|&j| grad_y(components[j], &x, d, tols.tol_act))
            .collect();
        let mut residual = vec![0.0; size];
        for (i, &j) in active.iter().enumerate() {
            residual[i] = components[j].eval(&x) - level;
        }
        for c in 0..d {
            residual[k + c] = grads.iter().zip(&w).map(|(g, wi)| wi * g[c]).sum();
        }
        residual[k + d] = w.iter().sum::<f64>() - 1.0;
        let norm = linalg::norm_inf(&residual);
        if norm <= 1e-12 {
            return Some((y, w, level));
        }
        if norm > last_norm * 10.0 {
            return None;
        }
        last_norm = last_norm.min(norm);

        let mut jac = vec![vec![0.0; size]; size];
        for (i, g) in grads.iter().enumerate() {
            jac[i][..d].copy_from_slice(g);
            jac[i][d + k] = -1.0;
        }
        for c in 0..d {
            let mut hrow = vec![0.0; d];
            for (i, &j) in active.iter().enumerate() {
                let hj = hessian_y(components[j], &x, d, tols.tol_act);
                for cc in 0..d {
                    hrow[cc] += w[i] * hj[c][cc];
                }
            }
            jac[k + c][..d].copy_from_slice(&hrow);
            for (i, g) in grads.iter().enumerate() {
                jac[k + c][d + i] = g[c];
            }
        }
        for i in 0..k {
            jac[k + d][d + i] = 1.0;
        }
        let rhs: Vec<f64> = residual.iter().map(|v| -v).collect();
        let delta = linalg::solve_dense(&jac, &rhs)?;
        for c in 0..d {
            y[c] += delta[c];
        }
        for i in 0..k {
            w[i] += delta[d + i];
        }
        level += delta[d + k];
        if !y.iter().all(|v| v.is_finite()) || !level.is_finite() {
            return None;
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tols() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn unconstrained_quadratic_fiber() {
        // f = ((x1-0.3)^2 + (x2-0.7)^2)/2 on the fiber x1 = 0.
        let f = ConvexExpr::squared_distance(&[0.3, 0.7]);
        let view = FiberView::for_fiber(&[0], &[-2.0, -2.0], &[2.0, 2.0]);
        let out = match minimize_constrained(&f, &[], &view, &tols()).unwrap() {
            ConstrainedOutcome::Solved(s) => s,
            other => panic!("unexpected {other:?}"),
        };
        assert!((out.y[0] - 0.7).abs() < 1e-8);
        assert!((out.value - 0.045).abs() < 1e-9);
    }

    #[test]
    fn constrained_quadratic_hits_boundary() {
        // min ||x||^2/2 s.t. 1 - x1 <= 0 over one free variable: optimum at 1.
        let f = ConvexExpr::squared_distance(&[0.0]);
        let g = ConvexExpr::Affine { a: vec![-1.0], b: 1.0 };
        let view = FiberView::full_space(&[-4.0], &[4.0]);
        let out = match minimize_constrained(&f, &[&g], &view, &tols()).unwrap() {
            ConstrainedOutcome::Solved(s) => s,
            other => panic!("unexpected {other:?}"),
        };
        assert!((out.y[0] - 1.0).abs() < 1e-8);
        assert!((out.value - 0.5).abs() < 1e-9);
    }

    #[test]
    fn infeasible_fiber_detected() {
        let f = ConvexExpr::squared_distance(&[0.0]);
        let g1 = ConvexExpr::Affine { a: vec![1.0], b: 1.0 };   // x <= -1
        let g2 = ConvexExpr::Affine { a: vec![-1.0], b: 1.0 };  // x >= 1
        let view = FiberView::full_space(&[-4.0], &[4.0]);
        assert!(matches!(
            minimize_constrained(&f, &[&g1, &g2], &view, &tols()).unwrap(),
            ConstrainedOutcome::Infeasible
        ));
    }

    #[test]
    fn minimax_of_smooth_constraint() {
        // min over y of (y-2)^2/2 + 1: minimum 1 at y = 2.
        let g = ConvexExpr::Sum(vec![
            ConvexExpr::squared_distance(&[2.0]),
            ConvexExpr::Affine { a: vec![0.0], b: 1.0 },
        ]);
        let view = FiberView::full_space(&[-5.0], &[5.0]);
        let out = minimize_max(&[&g], &view, &tols()).unwrap();
        assert!((out.y[0] - 2.0).abs() < 1e-7);
        assert!((out.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn minimax_symmetric_pair() {
        // max(y + 2, -y + 2): minimized at y = 0 with value 2.
        let g1 = ConvexExpr::Affine { a: vec![1.0], b: 2.0 };
        let g2 = ConvexExpr::Affine { a: vec![-1.0], b: 2.0 };
        let view = FiberView::full_space(&[-5.0], &[5.0]);
        let out = minimize_max(&[&g1, &g2], &view, &tols()).unwrap();
        assert!(out.y[0].abs() < 1e-7);
        assert!((out.value - 2.0).abs() < 1e-9);
    }

    #[test]
    fn kinked_objective_still_solves() {
        // quad + 0.5 * max(y, -y) has its minimum at the kink y = 0.25 ... actually
        // f(y) = (y-0.25)^2/2 + 0.5|y|: subdifferential at 0 is [-0.75, 0.25],
        // so 0 is the minimizer.
        let f = ConvexExpr::Sum(vec![
            ConvexExpr::squared_distance(&[0.25]),
            ConvexExpr::Scale {
                c: 0.5,
                child: Box::new(ConvexExpr::Max(vec![
                    ConvexExpr::Affine { a: vec![1.0], b: 0.0 },
                    ConvexExpr::Affine { a: vec![-1.0], b: 0.0 },
                ])),
            },
        ]);
        let view = FiberView::full_space(&[-3.0], &[3.0]);
        let out = match minimize_constrained(&f, &[], &view, &tols()).unwrap() {
            ConstrainedOutcome::Solved(s) => s,
            other => panic!("unexpected {other:?}"),
        };
        assert!(out.y[0].abs() < 1e-6, "kink minimizer, got {}", out.y[0]);
    }

    #[test]
    fn two_dimensional_constrained_solve() {
        // min ||x - (1,1)||^2/2 s.t. x1 + x2 <= 1: optimum (0.5, 0.5).
        let f = ConvexExpr::squared_distance(&[1.0, 1.0]);
        let g = ConvexExpr::Affine { a: vec![1.0, 1.0], b: -1.0 };
        let view = FiberView::full_space(&[-4.0, -4.0], &[4.0, 4.0]);
        let out = match minimize_constrained(&f, &[&g], &view, &tols()).unwrap() {
            ConstrainedOutcome::Solved(s) => s,
            other => panic!("unexpected {other:?}"),
        };
        assert!((out.y[0] - 0.5).abs() < 1e-8);
        assert!((out.y[1] - 0.5).abs() < 1e-8);
        assert!((out.value - 0.25).abs() < 1e-9);
    }
}

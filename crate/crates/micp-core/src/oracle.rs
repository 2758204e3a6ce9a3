//! Brute-force ground truth, deliberately independent of the solver stack:
//! plain evaluation on refining grids for fiber minima, and interval
//! subdivision (no LP) for strict polyhedron membership.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::geometry::OpenPolyhedron;
use crate::problem::{enumerate_lattice, BoundingBox, Point, Problem};
use crate::tol::Tolerances;

/// Ground-truth solve of a problem by grid refinement on every fiber.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleResult {
    pub value: f64,
    pub argmin: Point,
    pub fibers: Vec<FiberTableEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FiberTableEntry {
    pub z: Vec<i64>,
    pub feasible: bool,
    pub value: Option<f64>,
}

const ORACLE_BUDGET: usize = 1_000_000;

/// Enumerate all fibers in the box and grid-search each one. Guarded to
/// `n <= 8`, `d <= 3`.
pub fn brute_force_solve(problem: &Problem, eps_oracle: f64) -> Result<OracleResult> {
    if problem.n > 8 || problem.d > 3 {
        return Err(CoreError::GuardViolated(format!(
            "oracle guard: n <= 8 and d <= 3, got n={} d={}",
            problem.n, problem.d
        )));
    }
    let tols = &problem.tolerances;
    let fibers = problem.fibers(ORACLE_BUDGET)?;
    let solved: Vec<(Vec<i64>, Option<(Vec<f64>, f64)>)> = fibers
        .par_iter()
        .map(|z| (z.clone(), fiber_grid_minimum(problem, z, eps_oracle, tols)))
        .collect();

    let mut table = Vec::with_capacity(solved.len());
    let mut best: Option<(Vec<f64>, f64)> = None;
    for (z, outcome) in &solved {
        match outcome {
            None => table.push(FiberTableEntry { z: z.clone(), feasible: false, value: None }),
            Some((y, v)) => {
                table.push(FiberTableEntry { z: z.clone(), feasible: true, value: Some(*v) });
                let x = problem.assemble(z, y);
                if best.as_ref().map_or(true, |(_, bv)| v < bv) {
                    best = Some((x, *v));
                }
            }
        }
    }
    match best {
        None => Err(CoreError::NoFeasibleFiber),
        Some((x, value)) => Ok(OracleResult { value, argmin: Point::new(x), fibers: table }),
    }
}

/// Grid search with refinement passes on one fiber. Returns the best
/// feasible point and value, or `None` when no grid point is feasible.
fn fiber_grid_minimum(
    problem: &Problem,
    z: &[i64],
    eps_oracle: f64,
    tols: &Tolerances,
) -> Option<(Vec<f64>, f64)> {
    let d = problem.d;
    if d == 0 {
        let x = problem.assemble(z, &[]);
        if problem.is_feasible(&x, tols.tol_feas) {
            return Some((Vec::new(), problem.objective.eval(&x)));
        }
        return None;
    }
    let per_dim: usize = if d <= 2 { 33 } else { 13 };
    let fiber_lo: Vec<f64> = problem.bounds.lo[problem.n..].to_vec();
    let fiber_hi: Vec<f64> = problem.bounds.hi[problem.n..].to_vec();
    let mut lo = fiber_lo.clone();
    let mut hi = fiber_hi.clone();
    let mut best_feasible: Option<(Vec<f64>, f64)> = None;
    let mut least_violating: Option<(Vec<f64>, f64)> = None;

    for _pass in 0..14 {
        let steps: Vec<f64> = lo
            .iter()
            .zip(&hi)
            .map(|(l, h)| (h - l) / (per_dim - 1) as f64)
            .collect();
        let mut index = vec![0usize; d];
        loop {
            let y: Vec<f64> = (0..d).map(|i| lo[i] + steps[i] * index[i] as f64).collect();
            let x = problem.assemble(z, &y);
            let violation = problem.max_constraint(&x);
            if violation <= tols.tol_feas {
                let v = problem.objective.eval(&x);
                if best_feasible.as_ref().map_or(true, |(_, bv)| v < *bv) {
                    best_feasible = Some((y.clone(), v));
                }
            } else if least_violating.as_ref().map_or(true, |(_, bv)| violation < *bv) {
                least_violating = Some((y.clone(), violation));
            }
            let mut k = d;
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                if index[k] + 1 < per_dim {
                    index[k] += 1;
                    for j in (k + 1)..d {
                        index[j] = 0;
                    }
                    break;
                }
                if k == 0 {
                    k = usize::MAX;
                    break;
                }
            }
            if k == usize::MAX {
                break;
            }
        }
        let cell = steps.iter().cloned().fold(0.0_f64, f64::max);
        if cell <= eps_oracle * 0.25 {
            break;
        }
        // Refine around the best feasible point, or the least violating one
        // while no feasible point has been seen.
        let center = match (&best_feasible, &least_violating) {
            (Some((y, _)), _) => y.clone(),
            (None, Some((y, _))) => y.clone(),
            (None, None) => return None,
        };
        for i in 0..d {
            let half = 2.5 * steps[i];
            lo[i] = (center[i] - half).max(fiber_lo[i]);
            hi[i] = (center[i] + half).min(fiber_hi[i]);
        }
    }
    best_feasible
}

/// Independent lattice-freeness re-check: enumerate every integer fiber in
/// the inflated box and search each fiber's continuous block by interval
/// subdivision (no LP involved). Returns one witness point per offending
/// fiber.
pub fn enumerate_strict_points(
    poly: &OpenPolyhedron<f64>,
    bounds: &BoundingBox,
    n: usize,
    tol_strict: f64,
) -> Result<Vec<Point>> {
    let dim = bounds.dim();
    let d = dim - n;
    let inflated = bounds.inflate(2.0, 1.0);
    let ranges: Vec<(i64, i64)> = (0..n)
        .map(|i| {
            (
                (inflated.lo[i] - 1e-9).ceil() as i64,
                (inflated.hi[i] + 1e-9).floor() as i64,
            )
        })
        .collect();
    let fibers = enumerate_lattice(&ranges, ORACLE_BUDGET)?;
    let hits: Vec<Point> = fibers
        .par_iter()
        .filter_map(|z| {
            fiber_witness_by_subdivision(poly, z, &inflated.lo[n..], &inflated.hi[n..], tol_strict)
                .map(|y| {
                    let mut coords: Vec<f64> = z.iter().map(|&v| v as f64).collect();
                    coords.extend(y);
                    Point::new(coords)
                })
        })
        .collect();
    let _ = d;
    Ok(hits)
}

fn fiber_witness_by_subdivision(
    poly: &OpenPolyhedron<f64>,
    z: &[i64],
    y_lo: &[f64],
    y_hi: &[f64],
    tol_strict: f64,
) -> Option<Vec<f64>> {
    let n = z.len();
    let d = y_lo.len();
    // Reduce each row to cont . y {<,<=} constant on this fiber.
    let mut rows: Vec<(Vec<f64>, f64, bool)> = Vec::new();
    for h in &poly.halfspaces {
        let int_dot: f64 = h.normal[..n]
            .iter()
            .zip(z)
            .map(|(a, &b)| a * b as f64)
            .sum();
        let constant = h.offset - int_dot;
        let cont = h.normal[n..].to_vec();
        if cont.iter().all(|&v| v == 0.0) {
            let ok = if h.strict { constant > tol_strict } else { constant >= 0.0 };
            if !ok {
                return None;
            }
        } else {
            rows.push((cont, constant, h.strict));
        }
    }
    let center = |lo: &[f64], hi: &[f64]| -> Vec<f64> {
        lo.iter().zip(hi).map(|(l, h)| 0.5 * (l + h)).collect()
    };
    let qualifies = |y: &[f64]| -> bool {
        rows.iter().all(|(cont, constant, strict)| {
            let slack = constant - cont.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
            if *strict {
                slack > tol_strict
            } else {
                slack >= 0.0
            }
        })
    };
    if d == 0 || rows.is_empty() {
        let y = center(y_lo, y_hi);
        return qualifies(&y).then_some(y);
    }

    let initial_width: f64 = y_lo
        .iter()
        .zip(y_hi)
        .map(|(l, h)| h - l)
        .fold(0.0_f64, f64::max);
    let min_width = 1e-9 * (1.0 + initial_width);
    let mut stack = vec![(y_lo.to_vec(), y_hi.to_vec())];
    let mut nodes = 0usize;
    while let Some((blo, bhi)) = stack.pop() {
        nodes += 1;
        if nodes > 500_000 {
            return None;
        }
        // Prune boxes where some row cannot reach its required slack.
        let mut impossible = false;
        for (cont, constant, strict) in &rows {
            let min_dot: f64 = cont
                .iter()
                .enumerate()
                .map(|(i, &a)| if a >= 0.0 { a * blo[i] } else { a * bhi[i] })
                .sum();
            let max_slack = constant - min_dot;
            let hopeless = if *strict { max_slack <= tol_strict } else { max_slack < 0.0 };
            if hopeless {
                impossible = true;
                break;
            }
        }
        if impossible {
            continue;
        }
        let mid = center(&blo, &bhi);
        if qualifies(&mid) {
            return Some(mid);
        }
        let (split, width) = blo
            .iter()
            .zip(&bhi)
            .enumerate()
            .map(|(i, (l, h))| (i, h - l))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        if width <= min_width {
            continue;
        }
        let mut left_hi = bhi.clone();
        left_hi[split] = mid[split];
        let mut right_lo = blo.clone();
        right_lo[split] = mid[split];
        stack.push((blo, left_hi));
        stack.push((right_lo, bhi));
    }
    None
}

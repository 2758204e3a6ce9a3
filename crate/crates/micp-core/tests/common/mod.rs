//! Seeded random instance and polyhedron generators shared by the
//! integration suites.
//!
//! Instances keep fiber minima and minimax optima interior to the
//! continuous block of the box (strongly convex objectives; constraints
//! either independent of the continuous block or with curvature in it), and
//! use quarter-grid coefficients where crisp slacks matter.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use micp_core::expr::ConvexExpr;
use micp_core::geometry::{HalfSpace, OpenPolyhedron};
use micp_core::problem::{BoundingBox, Problem};
use micp_core::tol::Tolerances;

pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn grid(rng: &mut ChaCha8Rng, lo: i32, hi: i32, step: f64) -> f64 {
    rng.gen_range(lo..=hi) as f64 * step
}

fn random_box(rng: &mut ChaCha8Rng, dim: usize) -> BoundingBox {
    let mut lo = Vec::with_capacity(dim);
    let mut hi = Vec::with_capacity(dim);
    for _ in 0..dim {
        let l = -4.0 + rng.gen::<f64>() * 1.5;
        let h = 4.0 - rng.gen::<f64>() * 1.5;
        lo.push(l);
        hi.push(h);
    }
    BoundingBox::new(lo, hi)
}

/// Strongly convex quadratic with no coupling between the integer and
/// continuous blocks, so fiber minimizers stay interior to the continuous
/// box regardless of the fiber.
fn strongly_convex_quadratic(
    rng: &mut ChaCha8Rng,
    n: usize,
    dim: usize,
    center: &[f64],
) -> ConvexExpr {
    // Per block, Q_block = L L^T + 0.4 I keeps each form well conditioned.
    let mut q = vec![vec![0.0; dim]; dim];
    for (start, end) in [(0, n), (n, dim)] {
        let size = end - start;
        let mut l = vec![vec![0.0; size]; size];
        for i in 0..size {
            for j in 0..=i {
                l[i][j] = rng.gen_range(-0.7..0.7);
            }
        }
        for i in 0..size {
            for j in 0..size {
                let mut acc = 0.0;
                for k in 0..size {
                    acc += l[i][k] * l[j][k];
                }
                q[start + i][start + j] = acc + if i == j { 0.4 } else { 0.0 };
            }
        }
    }
    let a: Vec<f64> = (0..dim)
        .map(|i| -(0..dim).map(|j| q[i][j] * center[j]).sum::<f64>())
        .collect();
    let mut quad_center = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            quad_center += center[i] * q[i][j] * center[j];
        }
    }
    let b = 0.5 * quad_center + rng.gen_range(0.0..1.0);
    ConvexExpr::Quad { q, a, b }
}

fn interior_point(rng: &mut ChaCha8Rng, bounds: &BoundingBox) -> Vec<f64> {
    bounds
        .lo
        .iter()
        .zip(&bounds.hi)
        .map(|(l, h)| {
            let c = 0.5 * (l + h);
            let half = 0.3 * (h - l);
            c + rng.gen_range(-half..half)
        })
        .collect()
}

fn integer_block_affine(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> Vec<f64> {
    loop {
        let mut a = vec![0.0; dim];
        for ai in a.iter_mut().take(n) {
            *ai = grid(rng, -4, 4, 0.25);
        }
        if a.iter().any(|&v| v != 0.0) {
            return a;
        }
    }
}

/// Random mixed-integer convex instance with `n in 1..=3`, `d in 0..=2`,
/// `m in 0..=4`, boxes inside `[-4, 4]^{n+d}`, and an anchor fiber made
/// strictly feasible by construction.
pub fn random_instance(seed: u64) -> Problem {
    let mut rng = rng_for(seed);
    let n = rng.gen_range(1..=3usize);
    let d = rng.gen_range(0..=2usize);
    let m = rng.gen_range(0..=4usize);
    let dim = n + d;
    let bounds = random_box(&mut rng, dim);

    let center = interior_point(&mut rng, &bounds);
    let mut objective_terms = vec![strongly_convex_quadratic(&mut rng, n, dim, &center)];
    if rng.gen_bool(0.3) {
        // Kinked extra over the integer block only: kinks in z never
        // disturb continuous-block stationarity.
        let pieces: Vec<ConvexExpr> = (0..rng.gen_range(2..=3usize))
            .map(|_| ConvexExpr::Affine {
                a: integer_block_affine(&mut rng, n, dim),
                b: rng.gen_range(-1.0..1.0),
            })
            .collect();
        objective_terms.push(ConvexExpr::Scale {
            c: rng.gen_range(0.1..0.35),
            child: Box::new(ConvexExpr::Max(pieces)),
        });
    }
    let objective = if objective_terms.len() == 1 {
        objective_terms.pop().unwrap()
    } else {
        ConvexExpr::Sum(objective_terms)
    };

    // Anchor: a lattice fiber near the center with its continuous midpoint;
    // every constraint is shifted to hold strictly there.
    let anchor: Vec<f64> = (0..dim)
        .map(|i| {
            let c = 0.5 * (bounds.lo[i] + bounds.hi[i]);
            if i < n {
                c.round().clamp(bounds.lo[i].ceil(), bounds.hi[i].floor())
            } else {
                c
            }
        })
        .collect();

    let mut constraints = Vec::with_capacity(m);
    for _ in 0..m {
        let style = rng.gen_range(0..10);
        let mut g = if style < 5 {
            // Affine in the integer block only; quarter-grid coefficients.
            let a = integer_block_affine(&mut rng, n, dim);
            let b = -grid(&mut rng, 1, 8, 0.25);
            ConvexExpr::Affine { a, b }
        } else if style < 8 {
            // Ball constraint: ||x - c||^2 / 2 - r.
            let c = interior_point(&mut rng, &bounds);
            let r = rng.gen_range(0.8..2.5);
            ConvexExpr::Sum(vec![
                ConvexExpr::squared_distance(&c),
                ConvexExpr::Affine { a: vec![0.0; dim], b: -r },
            ])
        } else {
            // Max of two integer-block affines.
            let pieces: Vec<ConvexExpr> = (0..2)
                .map(|_| ConvexExpr::Affine {
                    a: integer_block_affine(&mut rng, n, dim),
                    b: -grid(&mut rng, 1, 8, 0.25),
                })
                .collect();
            ConvexExpr::Max(pieces)
        };
        // Shift so the anchor point is strictly feasible with margin.
        let at_anchor = g.eval(&anchor);
        if at_anchor > -0.3 {
            let shift = at_anchor + 0.3 + grid(&mut rng, 0, 2, 0.25);
            g = ConvexExpr::Sum(vec![g, ConvexExpr::Affine { a: vec![0.0; dim], b: -shift }]);
        }
        constraints.push(g);
    }

    let p = Problem { n, d, objective, constraints, bounds, tolerances: Tolerances::default() };
    p.validate().expect("generated instance validates");
    p
}

/// Random bounded open polyhedron with quarter-grid data: coordinate bound
/// pairs keep the closure inside the box, extra tilted rows add variety.
pub fn random_bounded_polyhedron(seed: u64, n: usize, d: usize) -> (OpenPolyhedron<f64>, BoundingBox) {
    let mut rng = rng_for(seed);
    let dim = n + d;
    let bounds = BoundingBox::new(vec![-3.0; dim], vec![3.0; dim]);
    let mut rows = Vec::new();
    for i in 0..dim {
        let lo = grid(&mut rng, -10, 6, 0.25);
        let hi = lo + grid(&mut rng, 1, 10, 0.25);
        let mut up = vec![0.0; dim];
        up[i] = 1.0;
        let mut down = vec![0.0; dim];
        down[i] = -1.0;
        rows.push(HalfSpace { normal: up, offset: hi, strict: rng.gen_bool(0.7) });
        rows.push(HalfSpace { normal: down, offset: -lo, strict: rng.gen_bool(0.7) });
    }
    for _ in 0..rng.gen_range(0..=4usize) {
        let normal: Vec<f64> = (0..dim).map(|_| grid(&mut rng, -8, 8, 0.25)).collect();
        if normal.iter().all(|&v| v == 0.0) {
            continue;
        }
        let offset = grid(&mut rng, -8, 8, 0.25);
        rows.push(HalfSpace { normal, offset, strict: rng.gen_bool(0.7) });
    }
    (OpenPolyhedron::new(rows), bounds)
}

/// Classify a construction error for the suite reports.
pub fn classify_error(err: &micp_core::CoreError) -> &'static str {
    use micp_core::CoreError::*;
    match err {
        SlaterViolated { .. } => "slater-violated",
        SolverStalled { .. } | StationarityResidualTooLarge { .. } | Numerical(_) => "solver-stalled",
        Inconclusive(_) | BudgetExceeded { .. } | NoValidSubset { .. } => "inconclusive",
        other => panic!("unclassified construction error: {other}"),
    }
}

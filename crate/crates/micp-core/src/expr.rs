//! Convex expression trees over a fixed atom set, with exact evaluation,
//! subgradient, and subdifferential-vertex oracles.
//!
//! The atom set {affine, quadratic, sum, max, scale} spans objectives and
//! constraints made of linear pieces and positive-semidefinite quadratics
//! while keeping every subgradient exact, which is what certificate
//! verification leans on. Expressions are immutable after load and all
//! operations are pure.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::linalg;

/// A convex function of `dim` real variables.
///
/// Serialized form is a tagged object, e.g. `{"affine":{"a":[1,0],"b":-0.5}}`
/// or `{"quad":{"Q":[[1,0],[0,1]],"a":[-1,-1],"b":1}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConvexExpr {
    /// `a^T x + b`.
    Affine { a: Vec<f64>, b: f64 },
    /// `x^T Q x / 2 + a^T x + b` with symmetric positive-semidefinite `Q`.
    Quad {
        #[serde(rename = "Q")]
        q: Vec<Vec<f64>>,
        a: Vec<f64>,
        b: f64,
    },
    /// Pointwise sum of children.
    Sum(Vec<ConvexExpr>),
    /// Pointwise maximum of children.
    Max(Vec<ConvexExpr>),
    /// `c * f` with `c >= 0`.
    Scale {
        c: f64,
        #[serde(rename = "f")]
        child: Box<ConvexExpr>,
    },
}

/// Indices attaining the running maximum within `tol`.
pub fn active_indices(values: &[f64], tol: f64) -> Vec<usize> {
    let best = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v >= best - tol)
        .map(|(i, _)| i)
        .collect()
}

impl ConvexExpr {
    /// Convenience constructor for `||x - center||^2 / 2`.
    pub fn squared_distance(center: &[f64]) -> ConvexExpr {
        let dim = center.len();
        let mut q = vec![vec![0.0; dim]; dim];
        for (i, row) in q.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        let a: Vec<f64> = center.iter().map(|c| -c).collect();
        let b = 0.5 * linalg::dot(center, center);
        ConvexExpr::Quad { q, a, b }
    }

    /// Check shape, finiteness, scale signs, and positive semidefiniteness
    /// of quadratic blocks (eigenvalues >= -tol_psd).
    pub fn validate(&self, dim: usize, tol_psd: f64) -> Result<()> {
        match self {
            ConvexExpr::Affine { a, b } => {
                if a.len() != dim {
                    return Err(CoreError::DimensionMismatch {
                        expected: dim,
                        found: a.len(),
                    });
                }
                if !a.iter().all(|x| x.is_finite()) || !b.is_finite() {
                    return Err(CoreError::InvalidExpression(
                        "affine node has non-finite coefficients".into(),
                    ));
                }
                Ok(())
            }
            ConvexExpr::Quad { q, a, b } => {
                if a.len() != dim || q.len() != dim || q.iter().any(|r| r.len() != dim) {
                    return Err(CoreError::DimensionMismatch {
                        expected: dim,
                        found: q.len(),
                    });
                }
                let finite = a.iter().all(|x| x.is_finite())
                    && b.is_finite()
                    && q.iter().flat_map(|r| r.iter()).all(|x| x.is_finite());
                if !finite {
                    return Err(CoreError::InvalidExpression(
                        "quad node has non-finite coefficients".into(),
                    ));
                }
                for i in 0..dim {
                    for j in (i + 1)..dim {
                        if (q[i][j] - q[j][i]).abs() > 1e-9 * (1.0 + q[i][j].abs()) {
                            return Err(CoreError::InvalidExpression(format!(
                                "quad matrix not symmetric at ({i},{j})"
                            )));
                        }
                    }
                }
                let min_eig = linalg::symmetric_eigenvalues(q)
                    .first()
                    .copied()
                    .unwrap_or(0.0);
                if min_eig < -tol_psd {
                    return Err(CoreError::InvalidExpression(format!(
                        "quad matrix not positive semidefinite (min eigenvalue {min_eig})"
                    )));
                }
                Ok(())
            }
            ConvexExpr::Sum(children) | ConvexExpr::Max(children) => {
                if children.is_empty() {
                    return Err(CoreError::InvalidExpression(
                        "sum/max node needs at least one child".into(),
                    ));
                }
                children.iter().try_for_each(|c| c.validate(dim, tol_psd))
            }
            ConvexExpr::Scale { c, child } => {
                if !(c.is_finite() && *c >= 0.0) {
                    return Err(CoreError::InvalidExpression(format!(
                        "scale coefficient must be nonnegative, got {c}"
                    )));
                }
                child.validate(dim, tol_psd)
            }
        }
    }

    /// Exact function value at `x`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            ConvexExpr::Affine { a, b } => linalg::dot(a, x) + b,
            ConvexExpr::Quad { q, a, b } => {
                let mut quad = 0.0;
                for (i, row) in q.iter().enumerate() {
                    quad += x[i] * linalg::dot(row, x);
                }
                0.5 * quad + linalg::dot(a, x) + b
            }
            ConvexExpr::Sum(children) => children.iter().map(|c| c.eval(x)).sum(),
            ConvexExpr::Max(children) => children
                .iter()
                .map(|c| c.eval(x))
                .fold(f64::NEG_INFINITY, f64::max),
            ConvexExpr::Scale { c, child } => c * child.eval(x),
        }
    }

    /// One subgradient at `x`, selected deterministically: a max node
    /// follows its lowest-index child attaining the maximum within `tol_act`.
    pub fn subgradient(&self, x: &[f64], tol_act: f64) -> Vec<f64> {
        match self {
            ConvexExpr::Affine { a, .. } => a.clone(),
            ConvexExpr::Quad { q, a, .. } => q
                .iter()
                .zip(a)
                .map(|(row, ai)| linalg::dot(row, x) + ai)
                .collect(),
            ConvexExpr::Sum(children) => {
                let mut g = vec![0.0; x.len()];
                for c in children {
                    for (gi, ci) in g.iter_mut().zip(c.subgradient(x, tol_act)) {
                        *gi += ci;
                    }
                }
                g
            }
            ConvexExpr::Max(children) => {
                let values: Vec<f64> = children.iter().map(|c| c.eval(x)).collect();
                let lowest = active_indices(&values, tol_act)[0];
                children[lowest].subgradient(x, tol_act)
            }
            ConvexExpr::Scale { c, child } => child
                .subgradient(x, tol_act)
                .into_iter()
                .map(|g| c * g)
                .collect(),
        }
    }

    /// Children of a max node attaining the maximum within `tol_act`.
    /// Errors on any other node kind.
    pub fn active_children(&self, x: &[f64], tol_act: f64) -> Result<Vec<usize>> {
        match self {
            ConvexExpr::Max(children) => {
                let values: Vec<f64> = children.iter().map(|c| c.eval(x)).collect();
                Ok(active_indices(&values, tol_act))
            }
            _ => Err(CoreError::InvalidExpression(
                "active_children requires a max node".into(),
            )),
        }
    }

    /// Generators of the subdifferential at `x`: the returned set of vectors
    /// spans `∂f(x)` by convex combination. The size is capped; beyond the
    /// cap the set is still a valid subset of generators.
    pub fn subgradient_vertices(&self, x: &[f64], tol_act: f64, cap: usize) -> Vec<Vec<f64>> {
        match self {
            ConvexExpr::Affine { .. } | ConvexExpr::Quad { .. } => {
                vec![self.subgradient(x, tol_act)]
            }
            ConvexExpr::Scale { c, child } => child
                .subgradient_vertices(x, tol_act, cap)
                .into_iter()
                .map(|v| v.into_iter().map(|g| c * g).collect())
                .collect(),
            ConvexExpr::Max(children) => {
                let values: Vec<f64> = children.iter().map(|c| c.eval(x)).collect();
                let mut out = Vec::new();
                for idx in active_indices(&values, tol_act) {
                    for v in children[idx].subgradient_vertices(x, tol_act, cap) {
                        out.push(v);
                        if out.len() >= cap {
                            return out;
                        }
                    }
                }
                out
            }
            ConvexExpr::Sum(children) => {
                let mut acc: Vec<Vec<f64>> = vec![vec![0.0; x.len()]];
                for c in children {
                    let verts = c.subgradient_vertices(x, tol_act, cap);
                    let mut next = Vec::with_capacity(acc.len() * verts.len());
                    'outer: for a in &acc {
                        for v in &verts {
                            next.push(a.iter().zip(v).map(|(p, q)| p + q).collect());
                            if next.len() >= cap {
                                break 'outer;
                            }
                        }
                    }
                    acc = next;
                }
                acc
            }
        }
    }

    /// Hessian of the smooth selection at `x` (max nodes follow the same
    /// lowest-active-child rule as `subgradient`).
    pub fn hessian(&self, x: &[f64], tol_act: f64) -> Vec<Vec<f64>> {
        let dim = x.len();
        match self {
            ConvexExpr::Affine { .. } => vec![vec![0.0; dim]; dim],
            ConvexExpr::Quad { q, .. } => q.clone(),
            ConvexExpr::Sum(children) => {
                let mut h = vec![vec![0.0; dim]; dim];
                for c in children {
                    let hc = c.hessian(x, tol_act);
                    for i in 0..dim {
                        for j in 0..dim {
                            h[i][j] += hc[i][j];
                        }
                    }
                }
                h
            }
            ConvexExpr::Max(children) => {
                let values: Vec<f64> = children.iter().map(|c| c.eval(x)).collect();
                let lowest = active_indices(&values, tol_act)[0];
                children[lowest].hessian(x, tol_act)
            }
            ConvexExpr::Scale { c, child } => {
                let mut h = child.hessian(x, tol_act);
                for row in h.iter_mut() {
                    for v in row.iter_mut() {
                        *v *= c;
                    }
                }
                h
            }
        }
    }

    /// Crude but safe interval bounds on the value over a box.
    pub fn value_bounds(&self, lo: &[f64], hi: &[f64]) -> (f64, f64) {
        match self {
            ConvexExpr::Affine { a, b } => {
                let mut vlo = *b;
                let mut vhi = *b;
                for (i, &ai) in a.iter().enumerate() {
                    let (p, q) = (ai * lo[i], ai * hi[i]);
                    vlo += p.min(q);
                    vhi += p.max(q);
                }
                (vlo, vhi)
            }
            ConvexExpr::Quad { q, a, b } => {
                let mag: Vec<f64> = lo.iter().zip(hi).map(|(l, h)| l.abs().max(h.abs())).collect();
                let mut quad_hi = 0.0;
                for (i, row) in q.iter().enumerate() {
                    for (j, &qij) in row.iter().enumerate() {
                        quad_hi += qij.abs() * mag[i] * mag[j];
                    }
                }
                quad_hi *= 0.5;
                let affine = ConvexExpr::Affine { a: a.clone(), b: *b };
                let (alo, ahi) = affine.value_bounds(lo, hi);
                // The quadratic part is PSD up to the load tolerance.
                ((alo - 1e-6).min(alo), ahi + quad_hi)
            }
            ConvexExpr::Sum(children) => children.iter().fold((0.0, 0.0), |(l, h), c| {
                let (cl, ch) = c.value_bounds(lo, hi);
                (l + cl, h + ch)
            }),
            ConvexExpr::Max(children) => children
                .iter()
                .map(|c| c.value_bounds(lo, hi))
                .fold((f64::NEG_INFINITY, f64::NEG_INFINITY), |(l, h), (cl, ch)| {
                    (l.max(cl), h.max(ch))
                }),
            ConvexExpr::Scale { c, child } => {
                let (l, h) = child.value_bounds(lo, hi);
                (c * l, c * h)
            }
        }
    }

    /// True when the tree contains only affine nodes (possibly nested in
    /// sums, maxes, and scales the linear fast paths cannot handle).
    pub fn is_pure_affine(&self) -> bool {
        matches!(self, ConvexExpr::Affine { .. })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad_example() -> ConvexExpr {
        // ||x - (1,1)||^2 / 2
        ConvexExpr::squared_distance(&[1.0, 1.0])
    }

    #[test]
    fn eval_zero_affine() {
        let e = ConvexExpr::Affine { a: vec![0.0, 0.0], b: 0.0 };
        assert_eq!(e.eval(&[3.0, -2.0]), 0.0);
    }

    #[test]
    fn eval_quadratic_at_origin() {
        assert!((quad_example().eval(&[0.0, 0.0]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn eval_max_of_affines() {
        let e = ConvexExpr::Max(vec![
            ConvexExpr::Affine { a: vec![1.0, 0.0], b: -0.5 },
            ConvexExpr::Affine { a: vec![0.0, 1.0], b: -0.5 },
        ]);
        assert!((e.eval(&[1.0, 0.0]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn subgradient_at_minimizer_vanishes() {
        let g = quad_example().subgradient(&[1.0, 1.0], 1e-8);
        assert!(g.iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn subgradient_matches_gradient_and_finite_differences() {
        let e = quad_example();
        let x = [0.0, 0.0];
        let g = e.subgradient(&x, 1e-8);
        assert!((g[0] + 1.0).abs() < 1e-15 && (g[1] + 1.0).abs() < 1e-15);
        let h = 1e-5;
        for i in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[i] += h;
            xm[i] -= h;
            let fd = (e.eval(&xp) - e.eval(&xm)) / (2.0 * h);
            assert!((fd - g[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn max_tie_break_picks_lowest_index() {
        let e = ConvexExpr::Max(vec![
            ConvexExpr::Affine { a: vec![1.0, 0.0], b: 0.0 },
            ConvexExpr::Affine { a: vec![0.0, 1.0], b: 0.0 },
        ]);
        assert_eq!(e.subgradient(&[1.0, 1.0], 1e-8), vec![1.0, 0.0]);
    }

    #[test]
    fn active_children_symmetric_tie() {
        let e = ConvexExpr::Max(vec![
            ConvexExpr::Affine { a: vec![1.0], b: 0.0 },
            ConvexExpr::Affine { a: vec![1.0], b: 0.0 },
        ]);
        assert_eq!(e.active_children(&[0.3], 1e-8).unwrap(), vec![0, 1]);
    }

    #[test]
    fn active_children_constraint_pair() {
        // max(x1 - 1/2, x2 - 1/2) at (1,0): only the first attains.
        let e = ConvexExpr::Max(vec![
            ConvexExpr::Affine { a: vec![1.0, 0.0], b: -0.5 },
            ConvexExpr::Affine { a: vec![0.0, 1.0], b: -0.5 },
        ]);
        assert_eq!(e.active_children(&[1.0, 0.0], 1e-8).unwrap(), vec![0]);
    }

    #[test]
    fn active_children_all_zero() {
        let e = ConvexExpr::Max(vec![
            ConvexExpr::Affine { a: vec![1.0, 0.0], b: 0.0 },
            ConvexExpr::Affine { a: vec![0.0, 1.0], b: 0.0 },
            ConvexExpr::Affine { a: vec![0.0, 0.0], b: 0.0 },
        ]);
        assert_eq!(e.active_children(&[0.0, 0.0], 1e-8).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn vertices_of_kinked_sum() {
        // quad + max(affine, affine) at a tie point: two generators.
        let e = ConvexExpr::Sum(vec![
            quad_example(),
            ConvexExpr::Max(vec![
                ConvexExpr::Affine { a: vec![1.0, 0.0], b: 0.0 },
                ConvexExpr::Affine { a: vec![-1.0, 0.0], b: 0.0 },
            ]),
        ]);
        let verts = e.subgradient_vertices(&[0.0, 0.5], 1e-8, 16);
        assert_eq!(verts.len(), 2);
        assert!(verts.iter().any(|v| (v[0] - 0.0).abs() < 1e-12));
        assert!(verts.iter().any(|v| (v[0] + 2.0).abs() < 1e-12));
    }

    #[test]
    fn validation_rejects_indefinite_quad() {
        let e = ConvexExpr::Quad {
            q: vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            a: vec![0.0, 0.0],
            b: 0.0,
        };
        assert!(e.validate(2, 1e-9).is_err());
    }

    #[test]
    fn validation_rejects_negative_scale() {
        let e = ConvexExpr::Scale {
            c: -1.0,
            child: Box::new(ConvexExpr::Affine { a: vec![1.0], b: 0.0 }),
        };
        assert!(e.validate(1, 1e-9).is_err());
    }

    #[test]
    fn json_schema_round_trip() {
        let text = r#"{"max":[{"affine":{"a":[1,0],"b":-0.5}},{"scale":{"c":2.0,"f":{"quad":{"Q":[[1,0],[0,1]],"a":[0,0],"b":0}}}}]}"#;
        let e: ConvexExpr = serde_json::from_str(text).unwrap();
        e.validate(2, 1e-9).unwrap();
        let back = serde_json::to_string(&e).unwrap();
        let e2: ConvexExpr = serde_json::from_str(&back).unwrap();
        assert_eq!(e, e2);
    }

    #[test]
    fn value_bounds_contain_samples() {
        let e = ConvexExpr::Sum(vec![
            quad_example(),
            ConvexExpr::Max(vec![
                ConvexExpr::Affine { a: vec![1.0, -1.0], b: 0.25 },
                ConvexExpr::Affine { a: vec![-0.5, 0.0], b: 0.0 },
            ]),
        ]);
        let (lo, hi) = ([-2.0, -1.0], [1.5, 2.0]);
        let (vlo, vhi) = e.value_bounds(&lo, &hi);
        for i in 0..=8 {
            for j in 0..=8 {
                let x = [
                    lo[0] + (hi[0] - lo[0]) * i as f64 / 8.0,
                    lo[1] + (hi[1] - lo[1]) * j as f64 / 8.0,
                ];
                let v = e.eval(&x);
                assert!(v >= vlo - 1e-9 && v <= vhi + 1e-9);
            }
        }
    }
}

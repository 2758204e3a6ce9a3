//! Dense two-phase simplex with Bland's rule.
//!
//! Deterministic pivoting and a finite box on every variable make the kernel
//! reproducible and immune to unboundedness. Sizes stay at desk scale
//! (tens of variables, a few hundred rows), so a dense tableau is the right
//! trade. Generic over [`Scalar`] so the same code runs exactly on
//! rationals for the affine-only path.

use crate::error::{CoreError, Result};
use crate::scalar::Scalar;

/// Outcome of a box-constrained LP.
#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome<T> {
    Optimal { x: Vec<T>, value: T },
    Infeasible,
}

const MAX_PIVOTS: usize = 200_000;

/// Minimize `c . x` subject to `rows[i].0 . x <= rows[i].1` and
/// `lo <= x <= hi` (all bounds finite).
pub fn lp_solve<T: Scalar>(
    c: &[T],
    rows: &[(Vec<T>, T)],
    lo: &[T],
    hi: &[T],
) -> Result<LpOutcome<T>> {
    let nv = c.len();
    debug_assert_eq!(lo.len(), nv);
    debug_assert_eq!(hi.len(), nv);
    for i in 0..nv {
        if hi[i] < lo[i] {
            return Ok(LpOutcome::Infeasible);
        }
    }
    if nv == 0 {
        let ok = rows.iter().all(|(_, b)| b >= &-T::pivot_eps());
        return Ok(if ok {
            LpOutcome::Optimal { x: Vec::new(), value: T::zero() }
        } else {
            LpOutcome::Infeasible
        });
    }

    // Shift to s = x - lo >= 0 and turn upper bounds into rows.
    let width: Vec<T> = hi.iter().zip(lo).map(|(h, l)| h.clone() - l.clone()).collect();
    let mut a_rows: Vec<Vec<T>> = Vec::with_capacity(rows.len() + nv);
    let mut b_vals: Vec<T> = Vec::with_capacity(rows.len() + nv);
    for (coeffs, b) in rows {
        debug_assert_eq!(coeffs.len(), nv);
        let shift: T = coeffs
            .iter()
            .zip(lo)
            .fold(T::zero(), |acc, (ci, li)| acc + ci.clone() * li.clone());
        a_rows.push(coeffs.clone());
        b_vals.push(b.clone() - shift);
    }
    for j in 0..nv {
        let mut r = vec![T::zero(); nv];
        r[j] = T::one();
        a_rows.push(r);
        b_vals.push(width[j].clone());
    }

    let offset: T = c
        .iter()
        .zip(lo)
        .fold(T::zero(), |acc, (ci, li)| acc + ci.clone() * li.clone());

    match standard_form_solve(c, &a_rows, &b_vals)? {
        StdOutcome::Infeasible => Ok(LpOutcome::Infeasible),
        StdOutcome::Optimal { s, value } => {
            let x: Vec<T> = s.iter().zip(lo).map(|(si, li)| si.clone() + li.clone()).collect();
            Ok(LpOutcome::Optimal { x, value: value + offset })
        }
    }
}

/// Feasibility of `rows[i].0 . x <= rows[i].1` over all of R^nv, decided by
/// a pure phase-1 run on the free-variable split x = x+ - x-. No box is
/// needed: the phase-1 objective is bounded below by zero.
pub fn feasible_unbounded<T: Scalar>(nv: usize, rows: &[(Vec<T>, T)]) -> Result<bool> {
    if nv == 0 {
        return Ok(rows.iter().all(|(_, b)| b >= &-T::pivot_eps()));
    }
    let mut a_rows = Vec::with_capacity(rows.len());
    let mut b_vals = Vec::with_capacity(rows.len());
    for (coeffs, b) in rows {
        let mut split = Vec::with_capacity(2 * nv);
        for ci in coeffs {
            split.push(ci.clone());
        }
        for ci in coeffs {
            split.push(-ci.clone());
        }
        a_rows.push(split);
        b_vals.push(b.clone());
    }
    let mut t = Tableau::build(2 * nv, &a_rows, &b_vals);
    Ok(t.phase1()?)
}

enum StdOutcome<T> {
    Optimal { s: Vec<T>, value: T },
    Infeasible,
}

/// min c.s  s.t.  A s <= b, s >= 0  (b of any sign).
fn standard_form_solve<T: Scalar>(
    c: &[T],
    a_rows: &[Vec<T>],
    b_vals: &[T],
) -> Result<StdOutcome<T>> {
    let mut t = Tableau::build(c.len(), a_rows, b_vals);
    if !t.phase1()? {
        return Ok(StdOutcome::Infeasible);
    }
    t.phase2(c)?;
    let s = t.primal_solution(c.len());
    let value = c
        .iter()
        .zip(&s)
        .fold(T::zero(), |acc, (ci, si)| acc + ci.clone() * si.clone());
    Ok(StdOutcome::Optimal { s, value })
}

/// Row-major dense tableau. Columns: structural vars, slacks, artificials.
struct Tableau<T> {
    ncols: usize,
    n_art: usize,
    rows: Vec<Vec<T>>,
    rhs: Vec<T>,
    basis: Vec<usize>,
}

impl<T: Scalar> Tableau<T> {
    fn build(n_structural: usize, a_rows: &[Vec<T>], b_vals: &[T]) -> Self {
        let nr = a_rows.len();
        let art_rows: Vec<usize> = (0..nr).filter(|&i| b_vals[i] < T::zero()).collect();
        let n_art = art_rows.len();
        let ncols = n_structural + nr + n_art;
        let mut rows = Vec::with_capacity(nr);
        let mut rhs = Vec::with_capacity(nr);
        let mut basis = Vec::with_capacity(nr);
        let mut art_seen = 0;
        for i in 0..nr {
            let negate = b_vals[i] < T::zero();
            let mut row = vec![T::zero(); ncols];
            for (j, v) in a_rows[i].iter().enumerate() {
                row[j] = if negate { -v.clone() } else { v.clone() };
            }
            // Slack for this row.
            row[n_structural + i] = if negate { -T::one() } else { T::one() };
            if negate {
                let art_col = n_structural + nr + art_seen;
                row[art_col] = T::one();
                basis.push(art_col);
                rhs.push(-b_vals[i].clone());
                art_seen += 1;
            } else {
                basis.push(n_structural + i);
                rhs.push(b_vals[i].clone());
            }
            rows.push(row);
        }
        Tableau { ncols, n_art, rows, rhs, basis }
    }

    fn pivot(&mut self, r: usize, j: usize, reduced: &mut [T], obj: &mut T) {
        let p = self.rows[r][j].clone();
        for v in self.rows[r].iter_mut() {
            *v = v.clone() / p.clone();
        }
        self.rhs[r] = self.rhs[r].clone() / p;
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let f = self.rows[i][j].clone();
            if f.is_zero() {
                continue;
            }
            for k in 0..self.ncols {
                let delta = f.clone() * self.rows[r][k].clone();
                self.rows[i][k] = self.rows[i][k].clone() - delta;
            }
            self.rhs[i] = self.rhs[i].clone() - f * self.rhs[r].clone();
        }
        let f = reduced[j].clone();
        if !f.is_zero() {
            for k in 0..self.ncols {
                let delta = f.clone() * self.rows[r][k].clone();
                reduced[k] = reduced[k].clone() - delta;
            }
            *obj = obj.clone() - f * self.rhs[r].clone();
        }
        self.basis[r] = j;
    }

    /// Bland's rule: entering = lowest index with negative reduced cost;
    /// leaving = min ratio, ties broken by lowest basic variable index.
    fn optimize(&mut self, reduced: &mut [T], obj: &mut T, allowed: usize) -> Result<()> {
        let eps = T::pivot_eps();
        for _pivots in 0..MAX_PIVOTS {
            let entering = (0..allowed).find(|&j| reduced[j] < -eps.clone());
            let j = match entering {
                Some(j) => j,
                None => return Ok(()),
            };
            let mut leave: Option<(usize, T)> = None;
            for r in 0..self.rows.len() {
                if self.rows[r][j] > eps.clone() {
                    let ratio = self.rhs[r].clone() / self.rows[r][j].clone();
                    let better = match &leave {
                        None => true,
                        Some((lr, lratio)) => {
                            ratio < *lratio
                                || (ratio == *lratio && self.basis[r] < self.basis[*lr])
                        }
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, j, reduced, obj),
                None => {
                    return Err(CoreError::Numerical(
                        "LP unbounded despite box bounds".into(),
                    ))
                }
            }
        }
        Err(CoreError::Numerical("simplex pivot limit exceeded".into()))
    }

    /// Returns true when a feasible basis was found.
    fn phase1(&mut self) -> Result<bool> {
        if self.n_art == 0 {
            return Ok(true);
        }
        let art_start = self.ncols - self.n_art;
        let mut reduced = vec![T::zero(); self.ncols];
        for j in art_start..self.ncols {
            reduced[j] = T::one();
        }
        let mut obj = T::zero();
        for r in 0..self.rows.len() {
            if self.basis[r] >= art_start {
                for k in 0..self.ncols {
                    reduced[k] = reduced[k].clone() - self.rows[r][k].clone();
                }
                obj = obj.clone() - self.rhs[r].clone();
            }
        }
        self.optimize(&mut reduced, &mut obj, self.ncols)?;
        let infeasibility = -obj;
        let feas_tol = if T::pivot_eps().is_zero() {
            T::zero()
        } else {
            T::from_f64(1e-7)
        };
        if infeasibility > feas_tol {
            return Ok(false);
        }
        // Drive any artificial still basic (at zero) out of the basis.
        for r in 0..self.rows.len() {
            if self.basis[r] >= art_start {
                let col = (0..art_start)
                    .find(|&j| self.rows[r][j].abs() > T::pivot_eps() + T::from_f64(1e-11));
                if let Some(j) = col {
                    let mut dummy = vec![T::zero(); self.ncols];
                    let mut dobj = T::zero();
                    self.pivot(r, j, &mut dummy, &mut dobj);
                } else {
                    // Redundant row; pin its rhs to zero and leave it.
                    self.rhs[r] = T::zero();
                }
            }
        }
        Ok(true)
    }

    fn phase2(&mut self, c: &[T]) -> Result<()> {
        let art_start = self.ncols - self.n_art;
        let mut reduced = vec![T::zero(); self.ncols];
        for (j, cj) in c.iter().enumerate() {
            reduced[j] = cj.clone();
        }
        let mut obj = T::zero();
        for r in 0..self.rows.len() {
            let b = self.basis[r];
            if b < c.len() && !c[b].is_zero() {
                let f = c[b].clone();
                for k in 0..self.ncols {
                    let delta = f.clone() * self.rows[r][k].clone();
                    reduced[k] = reduced[k].clone() - delta;
                }
                obj = obj.clone() - f * self.rhs[r].clone();
            }
        }
        // Artificial columns stay out in phase 2.
        self.optimize(&mut reduced, &mut obj, art_start)
    }

    fn primal_solution(&self, nv: usize) -> Vec<T> {
        let mut s = vec![T::zero(); nv];
        for (r, &b) in self.basis.iter().enumerate() {
            if b < nv {
                s[b] = self.rhs[r].clone();
            }
        }
        s
    }
}

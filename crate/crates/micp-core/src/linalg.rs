//! Small dense linear-algebra helpers.
//!
//! Everything here is desk scale (dimensions in the low tens), so plain
//! row-major `Vec<Vec<f64>>` with straightforward algorithms is adequate and
//! keeps the numerics deterministic.

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// Eigenvalues of a symmetric matrix via cyclic Jacobi rotations.
///
/// The input is not checked for symmetry; callers symmetrize first when the
/// source is untrusted.
pub fn symmetric_eigenvalues(m: &[Vec<f64>]) -> Vec<f64> {
    let n = m.len();
    if n == 0 {
        return Vec::new();
    }
    let mut a: Vec<Vec<f64>> = m.to_vec();
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0_f64, |s, x| s.max(x.abs()))
        .max(1.0);
    let tol = 1e-14 * scale;
    for _sweep in 0..64 {
        let mut off = 0.0_f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a[p][q].abs());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() <= tol {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eigs: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    eigs
}

/// Solve `A x = b` by Gaussian elimination with partial pivoting.
/// Returns `None` when the matrix is singular to working precision.
pub fn solve_dense(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = a.len();
    if n == 0 {
        return Some(Vec::new());
    }
    debug_assert!(a.iter().all(|r| r.len() == n));
    debug_assert_eq!(b.len(), n);
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, &rhs)| {
            let mut r = row.clone();
            r.push(rhs);
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())?;
        if m[pivot][col].abs() < 1e-12 {
            return None;
        }
        m.swap(col, pivot);
        for row in (col + 1)..n {
            let factor = m[row][col] / m[col][col];
            if factor == 0.0 {
                continue;
            }
            for k in col..=n {
                m[row][k] -= factor * m[col][k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = m[row][n];
        for k in (row + 1)..n {
            acc -= m[row][k] * x[k];
        }
        x[row] = acc / m[row][row];
    }
    Some(x)
}

/// A nonzero vector in the null space of the (rows x cols) matrix, or `None`
/// when the columns are linearly independent.
pub fn null_vector(rows: &[Vec<f64>], cols: usize) -> Option<Vec<f64>> {
    let nrows = rows.len();
    let mut m: Vec<Vec<f64>> = rows.to_vec();
    let mut pivot_col_of_row: Vec<usize> = Vec::new();
    let mut is_pivot = vec![false; cols];
    let mut r = 0;
    for c in 0..cols {
        if r >= nrows {
            break;
        }
        let pivot = (r..nrows).max_by(|&i, &j| m[i][c].abs().partial_cmp(&m[j][c].abs()).unwrap())?;
        if m[pivot][c].abs() < 1e-11 {
            continue;
        }
        m.swap(r, pivot);
        let p = m[r][c];
        for k in 0..cols {
            m[r][k] /= p;
        }
        for i in 0..nrows {
            if i != r && m[i][c].abs() > 0.0 {
                let f = m[i][c];
                for k in 0..cols {
                    m[i][k] -= f * m[r][k];
                }
            }
        }
        pivot_col_of_row.push(c);
        is_pivot[c] = true;
        r += 1;
    }
    let free = (0..cols).find(|&c| !is_pivot[c])?;
    let mut v = vec![0.0; cols];
    v[free] = 1.0;
    for (row, &pc) in pivot_col_of_row.iter().enumerate() {
        v[pc] = -m[row][free];
    }
    Some(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenvalues_of_diagonal() {
        let m = vec![vec![3.0, 0.0], vec![0.0, -1.0]];
        let e = symmetric_eigenvalues(&m);
        assert!((e[0] + 1.0).abs() < 1e-12);
        assert!((e[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn eigenvalues_of_rotation_invariant_form() {
        // [[2,1],[1,2]] has eigenvalues 1 and 3.
        let m = vec![vec![2.0, 1.0], vec![1.0, 2.0]];
        let e = symmetric_eigenvalues(&m);
        assert!((e[0] - 1.0).abs() < 1e-10);
        assert!((e[1] - 3.0).abs() < 1e-10);
    }

    #[test]
    fn solves_small_system() {
        let a = vec![vec![2.0, 1.0], vec![1.0, 3.0]];
        let x = solve_dense(&a, &[5.0, 10.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12);
        assert!((x[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn singular_system_reports_none() {
        let a = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert!(solve_dense(&a, &[1.0, 2.0]).is_none());
    }

    #[test]
    fn null_vector_of_dependent_columns() {
        // Columns (1,0), (0,1), (1,1): null vector is (1,1,-1) up to scale.
        let rows = vec![vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 1.0]];
        let v = null_vector(&rows, 3).unwrap();
        let r0 = v[0] + v[2];
        let r1 = v[1] + v[2];
        assert!(r0.abs() < 1e-10 && r1.abs() < 1e-10);
        assert!(v.iter().any(|x| x.abs() > 1e-9));
    }

    #[test]
    fn independent_columns_have_no_null_vector() {
        let rows = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        assert!(null_vector(&rows, 2).is_none());
    }
}

//! Small dense linear-algebra helpers shared by the homology and pairing code.
//!
//! Every rank decision goes through [`rank_cutoff`], so a single policy governs
//! kernels, images and pseudo-inverses across the crate.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type Mat = DMatrix<f64>;
pub type Vector = DVector<f64>;
pub type CMat = DMatrix<Complex64>;

/// Relative singular-value cutoff for ranks of complex/pairing matrices.
pub const RANK_RTOL: f64 = 1e-8;

/// Singular values below this are treated as zero. The scale is floored at 1
/// because all operators here have entries of order one, and a matrix that is
/// zero up to rounding must come out with rank 0.
pub fn rank_cutoff(singular_values: &[f64]) -> f64 {
    let smax = singular_values.iter().cloned().fold(0.0, f64::max);
    RANK_RTOL * smax.max(1.0)
}

/// Singular values of `m`, sorted in decreasing order.
pub fn singular_values(m: &Mat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().cloned().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

pub fn numerical_rank(m: &Mat) -> usize {
    let s = singular_values(m);
    let tol = rank_cutoff(&s);
    s.iter().filter(|&&x| x > tol).count()
}

/// Orthonormal basis (as columns) of the right null space of `m`.
pub fn null_space(m: &Mat) -> Mat {
    let cols = m.ncols();
    if cols == 0 {
        return Mat::zeros(0, 0);
    }
    // pad to at least square so the thin SVD carries a full V
    let rows = m.nrows().max(cols);
    let mut padded = Mat::zeros(rows, cols);
    padded.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let s: Vec<f64> = svd.singular_values.iter().cloned().collect();
    let tol = rank_cutoff(&s);
    let kernel: Vec<usize> = (0..s.len()).filter(|&i| s[i] <= tol).collect();
    let mut out = Mat::zeros(cols, kernel.len());
    for (j, &i) in kernel.iter().enumerate() {
        out.set_column(j, &vt.row(i).transpose());
    }
    out
}

/// Orthonormal basis (as columns) of the column space of `m`.
pub fn column_space(m: &Mat) -> Mat {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Mat::zeros(m.nrows(), 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let s: Vec<f64> = svd.singular_values.iter().cloned().collect();
    let tol = rank_cutoff(&s);
    let keep: Vec<usize> = (0..s.len()).filter(|&i| s[i] > tol).collect();
    let mut out = Mat::zeros(m.nrows(), keep.len());
    for (j, &i) in keep.iter().enumerate() {
        out.set_column(j, &u.column(i));
    }
    out
}

/// Least-squares minimum-norm solution of `m x = b` with the shared cutoff.
pub fn pinv_solve(m: &Mat, b: &Vector) -> Vector {
    let svd = m.clone().svd(true, true);
    let s: Vec<f64> = svd.singular_values.iter().cloned().collect();
    let tol = rank_cutoff(&s);
    svd.solve(b, tol).expect("SVD carries U and V")
}

/// Moore-Penrose pseudo-inverse with the shared cutoff.
pub fn pinv(m: &Mat) -> Mat {
    let svd = m.clone().svd(true, true);
    let s: Vec<f64> = svd.singular_values.iter().cloned().collect();
    let tol = rank_cutoff(&s);
    svd.pseudo_inverse(tol).expect("SVD carries U and V")
}

/// Pfaffian of an antisymmetric matrix by skew Gaussian elimination with pivoting.
pub fn pfaffian(m: &Mat) -> f64 {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "pfaffian needs a square matrix");
    if n % 2 == 1 {
        return 0.0;
    }
    let mut a = m.clone();
    let mut pf = 1.0;
    let mut k = 0;
    while k + 1 < n {
        let mut kp = k + 1;
        let mut best = a[(k + 1, k)].abs();
        for i in k + 2..n {
            if a[(i, k)].abs() > best {
                best = a[(i, k)].abs();
                kp = i;
            }
        }
        if kp != k + 1 {
            a.swap_rows(k + 1, kp);
            a.swap_columns(k + 1, kp);
            pf = -pf;
        }
        let pivot = a[(k, k + 1)];
        if pivot == 0.0 {
            return 0.0;
        }
        pf *= pivot;
        if k + 2 < n {
            let tau: Vec<f64> = (k + 2..n).map(|j| a[(k, j)] / pivot).collect();
            let col: Vec<f64> = (k + 2..n).map(|i| a[(i, k + 1)]).collect();
            for (ii, i) in (k + 2..n).enumerate() {
                for (jj, j) in (k + 2..n).enumerate() {
                    a[(i, j)] += tau[ii] * col[jj] - col[ii] * tau[jj];
                }
            }
        }
        k += 2;
    }
    pf
}

/// Block-diagonal lift `I_blocks ⊗ e` of an `n × k` matrix.
pub fn block_diag_repeat(e: &Mat, blocks: usize) -> Mat {
    let (n, k) = e.shape();
    let mut out = Mat::zeros(n * blocks, k * blocks);
    for b in 0..blocks {
        out.view_mut((b * n, b * k), (n, k)).copy_from(e);
    }
    out
}

pub fn frobenius(m: &Mat) -> f64 {
    m.norm()
}

pub fn antisymmetry_residual(m: &Mat) -> f64 {
    (m + m.transpose()).norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pfaffian_squares_to_determinant() {
        let a = Mat::from_fn(6, 6, |i, j| ((i * 7 + j * 3) % 5) as f64 - 2.0);
        let s = &a - a.transpose();
        let pf = pfaffian(&s);
        assert!((pf * pf - s.determinant()).abs() < 1e-9 * (1.0 + s.determinant().abs()));
    }

    #[test]
    fn pfaffian_of_standard_block() {
        let mut j = Mat::zeros(4, 4);
        j[(0, 1)] = 2.0;
        j[(1, 0)] = -2.0;
        j[(2, 3)] = 3.0;
        j[(3, 2)] = -3.0;
        assert!((pfaffian(&j) - 6.0).abs() < 1e-14);
    }

    #[test]
    fn null_space_of_wide_matrix() {
        let m = Mat::from_row_slice(1, 3, &[1.0, 1.0, 0.0]);
        let k = null_space(&m);
        assert_eq!(k.ncols(), 2);
        assert!((&m * &k).norm() < 1e-14);
        assert!((k.transpose() * &k - Mat::identity(2, 2)).norm() < 1e-14);
    }

    #[test]
    fn zero_matrix_has_rank_zero() {
        let m = Mat::from_element(3, 3, 1e-17);
        assert_eq!(numerical_rank(&m), 0);
        assert_eq!(null_space(&m).ncols(), 3);
        assert_eq!(column_space(&m).ncols(), 0);
    }
}

//! Small dense kernels on top of nalgebra: null spaces, projections,
//! symmetric spectra and least squares.

use nalgebra::{DMatrix, DVector, Matrix4, SymmetricEigen};

/// Orthonormal basis (as columns) of the null space of `m`.
///
/// Singular values below `rtol * sigma_max` are treated as zero. Rows are
/// zero-padded when `m` is wide so that the full right singular basis is
/// available.
pub fn null_space(m: &DMatrix<f64>, rtol: f64) -> DMatrix<f64> {
    let n = m.ncols();
    let padded;
    let m = if m.nrows() < n {
        let mut p = DMatrix::zeros(n, n);
        p.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
        padded = p;
        &padded
    } else {
        m
    };
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let sigma_max = svd.singular_values.max();
    let cutoff = if sigma_max > 0.0 { rtol * sigma_max } else { 0.0 };
    let cols: Vec<DVector<f64>> = (0..n)
        .filter(|&i| svd.singular_values[i] <= cutoff)
        .map(|i| v_t.row(i).transpose())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Residual of projecting `v` onto the span of the orthonormal columns of `basis`.
pub fn projection_residual(basis: &DMatrix<f64>, v: &DVector<f64>) -> f64 {
    if basis.ncols() == 0 {
        return v.norm();
    }
    let coeffs = basis.transpose() * v;
    (v - basis * coeffs).norm()
}

/// Same as [`projection_residual`] divided by `|v|` (0 for the zero vector).
pub fn relative_projection_residual(basis: &DMatrix<f64>, v: &DVector<f64>) -> f64 {
    let n = v.norm();
    if n == 0.0 {
        0.0
    } else {
        projection_residual(basis, v) / n
    }
}

/// Column-major vectorisation of a 4x4 matrix.
pub fn vec4(m: &Matrix4<f64>) -> DVector<f64> {
    DVector::from_column_slice(m.as_slice())
}

pub fn unvec4(v: &DVector<f64>) -> Matrix4<f64> {
    Matrix4::from_column_slice(v.as_slice())
}

/// Eigenvalues of a symmetric 4x4 matrix in ascending order.
pub fn symmetric_eigenvalues(s: &Matrix4<f64>) -> [f64; 4] {
    let eig = SymmetricEigen::new(*s);
    let mut ev = [0.0; 4];
    ev.copy_from_slice(eig.eigenvalues.as_slice());
    ev.sort_by(f64::total_cmp);
    ev
}

/// Minimum-norm least-squares solution and the residual norm `|M x - b|`.
pub fn least_squares(m: &DMatrix<f64>, b: &DVector<f64>) -> (DVector<f64>, f64) {
    let svd = m.clone().svd(true, true);
    let eps = f64::EPSILON * m.nrows().max(m.ncols()) as f64 * svd.singular_values.max();
    let x = svd.solve(b, eps).expect("U and V^T were computed");
    let residual = (m * &x - b).norm();
    (x, residual)
}

/// `|det m| / |m|_F^4`: a scale-free singularity measure for 4x4 matrices.
pub fn relative_det(m: &Matrix4<f64>) -> f64 {
    let scale = m.norm();
    if scale == 0.0 {
        0.0
    } else {
        m.determinant().abs() / scale.powi(4)
    }
}

/// Symmetric part `(m + m^T) / 2`.
pub fn sym(m: &Matrix4<f64>) -> Matrix4<f64> {
    (m + m.transpose()) * 0.5
}

/// Antisymmetric part `(m - m^T) / 2`.
pub fn skew(m: &Matrix4<f64>) -> Matrix4<f64> {
    (m - m.transpose()) * 0.5
}

/// `|a - b|_F / max(1, |b|_F)`.
pub fn rel_diff(a: &Matrix4<f64>, b: &Matrix4<f64>) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

use nalgebra::{DMatrix, Matrix4, Vector4};
use serde::Serialize;

use crate::config::{EPS_ALGEBRA, EPS_SINGULAR};
use crate::error::{Error, Result};
use crate::linalg::{least_squares, symmetric_eigenvalues, vec4};
use crate::model::{h1, h2, Chart, PuParams, QuadraticObservable};

/// `sum_i w_i^2 / (2 (c1 w_i^2 - c2)(w_i^2 - w_j^2)) * [(q''' + w_j^2 q')^2 + w_i^2 (q'' + w_j^2 q)^2]`.
pub fn sum_of_squares(params: &PuParams, ct1: f64, ct2: f64) -> Result<QuadraticObservable> {
    let w = [params.omega1().powi(2), params.omega2().powi(2)];
    let mut s = Matrix4::zeros();
    for i in 0..2 {
        let j = 1 - i;
        let factor = ct1 * w[i] - ct2;
        if factor.abs() <= EPS_SINGULAR * (ct1.abs() * w[i]).max(ct2.abs()).max(1.0) {
            return Err(Error::SingularCoefficient { index: i + 1 });
        }
        let k = w[i] / (2.0 * factor * (w[i] - w[j]));
        let u = Vector4::new(0.0, w[j], 0.0, 1.0);
        let v = Vector4::new(w[j], 0.0, 1.0, 0.0);
        // Hessian of k (u.z)^2 is 2 k u u^T.
        s += (u * u.transpose() + v * v.transpose() * w[i]) * (2.0 * k);
    }
    Ok(QuadraticObservable::jet(s))
}

/// `(c1 w1^2 - c2)(w1^2 - w2^2) > 0` and `(c1 w2^2 - c2)(w2^2 - w1^2) > 0`.
pub fn sum_of_squares_predicate(params: &PuParams, ct1: f64, ct2: f64) -> bool {
    let (w1, w2) = (params.omega1().powi(2), params.omega2().powi(2));
    (ct1 * w1 - ct2) * (w1 - w2) > 0.0 && (ct1 * w2 - ct2) * (w2 - w1) > 0.0
}

/// Blend coordinates of [`sum_of_squares`]:
/// `c1 = beta ct1 / D`, `c2 = -beta ct2 / D` with `D = (ct1 w1^2 - ct2)(ct1 w2^2 - ct2)`.
pub fn sum_of_squares_blend(params: &PuParams, ct1: f64, ct2: f64) -> (f64, f64) {
    let (w1, w2) = (params.omega1().powi(2), params.omega2().powi(2));
    let d = (ct1 * w1 - ct2) * (ct1 * w2 - ct2);
    (params.beta() * ct1 / d, -params.beta() * ct2 / d)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BlendFit {
    pub c1: f64,
    pub c2: f64,
    /// Relative least-squares misfit.
    pub residual: f64,
}

/// Least-squares `h ~ c1 H1 + c2 H2` over the Hessian entries.
pub fn fit_blend(params: &PuParams, h: &QuadraticObservable) -> BlendFit {
    let h = h.in_chart(params, Chart::Jet);
    let (a, b) = (vec4(&h1(params).hessian()), vec4(&h2(params).hessian()));
    let m = DMatrix::from_columns(&[a, b]);
    let target = vec4(&h.hessian());
    let (x, r) = least_squares(&m, &target);
    BlendFit {
        c1: x[0],
        c2: x[1],
        residual: r / target.norm().max(f64::MIN_POSITIVE),
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PositivityVerdict {
    pub positive_definite: bool,
    /// Ascending.
    pub eigenvalues: [f64; 4],
}

pub fn positivity(h: &QuadraticObservable) -> PositivityVerdict {
    let eigenvalues = symmetric_eigenvalues(&h.hessian());
    let scale = eigenvalues.iter().fold(0.0_f64, |m, e| m.max(e.abs()));
    PositivityVerdict {
        positive_definite: scale > 0.0 && eigenvalues[0] > EPS_ALGEBRA * scale,
        eigenvalues,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::blend_h;

    fn p12() -> PuParams {
        PuParams::new(1.0, 2.0).unwrap()
    }

    #[test]
    fn verdicts() {
        let p = p12();
        assert!(!positivity(&h1(&p)).positive_definite);
        assert!(positivity(&blend_h(&p, -1.0, 2.0)).positive_definite);
        assert!(!positivity(&blend_h(&p, 0.0, 1.0)).positive_definite);
        assert!(!positivity(&QuadraticObservable::jet(Matrix4::zeros())).positive_definite);
    }

    #[test]
    fn sum_of_squares_is_a_blend() {
        let p = PuParams::new(0.7, 1.9).unwrap();
        for &(a, b) in &[(1.0, 0.0), (0.3, -2.0), (-1.5, 0.4), (2.0, 5.0)] {
            let h = sum_of_squares(&p, a, b).unwrap();
            let fit = fit_blend(&p, &h);
            let (c1, c2) = sum_of_squares_blend(&p, a, b);
            assert!(fit.residual < 1e-12, "{fit:?}");
            assert!((fit.c1 - c1).abs() < 1e-10 * c1.abs().max(1.0));
            assert!((fit.c2 - c2).abs() < 1e-10 * c2.abs().max(1.0));
            assert_eq!(positivity(&h).positive_definite, sum_of_squares_predicate(&p, a, b));
        }
    }

    #[test]
    fn singular_coefficient() {
        assert!(matches!(
            sum_of_squares(&p12(), 1.0, 4.0),
            Err(Error::SingularCoefficient { index: 2 })
        ));
    }
}

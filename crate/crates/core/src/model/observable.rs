use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use super::{ostro_jacobian, resolve_second_structure, Chart, JetState, PoissonTensor, PuParams};
use crate::error::{Error, Result};

/// Quadratic function `F(z) = 1/2 z^T S z` with symmetric `S`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticObservable {
    coeffs: Matrix4<f64>,
    chart: Chart,
}

impl QuadraticObservable {
    /// Symmetrises `coeffs` so that `S = S^T` holds bit-for-bit.
    pub fn new(coeffs: Matrix4<f64>, chart: Chart) -> Self {
        Self {
            coeffs: (coeffs + coeffs.transpose()) * 0.5,
            chart,
        }
    }

    pub fn jet(coeffs: Matrix4<f64>) -> Self {
        Self::new(coeffs, Chart::Jet)
    }

    pub fn coeffs(&self) -> &Matrix4<f64> {
        &self.coeffs
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn eval(&self, z: &Vector4<f64>) -> f64 {
        0.5 * z.dot(&(self.coeffs * z))
    }

    pub fn eval_jet(&self, z: &JetState) -> f64 {
        debug_assert_eq!(self.chart, Chart::Jet);
        self.eval(&z.to_vector())
    }

    pub fn gradient(&self, z: &Vector4<f64>) -> Vector4<f64> {
        self.coeffs * z
    }

    pub fn hessian(&self) -> Matrix4<f64> {
        self.coeffs
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            coeffs: self.coeffs * c,
            chart: self.chart,
        }
    }

    /// Pulls the observable back along `jet = D * ostro`.
    pub fn in_chart(&self, params: &PuParams, chart: Chart) -> Self {
        let d = ostro_jacobian(params);
        let coeffs = match (self.chart, chart) {
            (a, b) if a == b => self.coeffs,
            (Chart::Jet, Chart::Ostrogradsky) => d.transpose() * self.coeffs * d,
            (Chart::Ostrogradsky, Chart::Jet) => {
                let dinv = d.try_inverse().expect("chart Jacobian is unimodular");
                dinv.transpose() * self.coeffs * dinv
            }
            _ => unreachable!(),
        };
        Self::new(coeffs, chart)
    }
}

/// Ostrogradsky Hamiltonian `-q'q''' + q''^2/2 - beta q^2/2 - alpha q'^2/2`.
pub fn h1(params: &PuParams) -> QuadraticObservable {
    let (a, b) = (params.alpha(), params.beta());
    QuadraticObservable::jet(Matrix4::new(
        -b, 0.0, 0.0, 0.0, //
        0.0, -a, 0.0, -1.0, //
        0.0, 0.0, 1.0, 0.0, //
        0.0, -1.0, 0.0, 0.0,
    ))
}

/// `q q'' - q'^2/2 + sign * alpha/(2 beta) q''^2 + q'''^2/(2 beta)`.
pub fn h2_with_sign(params: &PuParams, sign: f64) -> QuadraticObservable {
    let (a, b) = (params.alpha(), params.beta());
    QuadraticObservable::jet(Matrix4::new(
        0.0,
        0.0,
        1.0,
        0.0, //
        0.0,
        -1.0,
        0.0,
        0.0, //
        1.0,
        0.0,
        sign * a / b,
        0.0, //
        0.0,
        0.0,
        0.0,
        1.0 / b,
    ))
}

/// Second Hamiltonian with the `q''^2` sign fixed by [`resolve_second_structure`].
pub fn h2(params: &PuParams) -> QuadraticObservable {
    h2_with_sign(params, resolve_second_structure(params).sign)
}

pub fn blend_h(params: &PuParams, c1: f64, c2: f64) -> QuadraticObservable {
    QuadraticObservable::jet(h1(params).coeffs * c1 + h2(params).coeffs * c2)
}

/// `{F, G} = grad F . J grad G`, again a quadratic with matrix `sym(2 S_F J S_G)`.
pub fn poisson_bracket(
    f: &QuadraticObservable,
    g: &QuadraticObservable,
    j: &PoissonTensor,
) -> Result<QuadraticObservable> {
    for (left, right) in [(f.chart, g.chart), (f.chart, j.chart())] {
        if left != right {
            return Err(Error::ChartMismatch { left, right });
        }
    }
    let m = f.coeffs * j.matrix() * g.coeffs;
    Ok(QuadraticObservable::new(m + m.transpose(), f.chart))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::j1;

    fn p12() -> PuParams {
        PuParams::new(1.0, 2.0).unwrap()
    }

    #[test]
    fn h1_spot_values() {
        let h = h1(&p12());
        assert!((h.eval_jet(&JetState::new(1.0, 0.0, -1.0, 0.0)) + 1.5).abs() < 1e-15);
        assert!((h.eval_jet(&JetState::new(0.0, 1.0, 0.0, -1.0)) + 1.5).abs() < 1e-15);
        assert_eq!(h.eval_jet(&JetState::ZERO), 0.0);
    }

    #[test]
    fn h2_spot_values() {
        let h = h2_with_sign(&p12(), 1.0);
        assert!((h.eval_jet(&JetState::new(1.0, 0.0, -4.0, 0.0)) - 6.0).abs() < 1e-14);
        assert!((h.eval_jet(&JetState::new(1.0, 0.0, -1.0, 0.0)) + 0.375).abs() < 1e-15);
        assert_eq!(h.eval_jet(&JetState::ZERO), 0.0);
    }

    #[test]
    fn shipped_h2_has_positive_qdd_sign() {
        assert_eq!(h2(&p12()), h2_with_sign(&p12(), 1.0));
    }

    #[test]
    fn blend_endpoints() {
        let p = p12();
        assert_eq!(blend_h(&p, 1.0, 0.0).coeffs(), h1(&p).coeffs());
        assert_eq!(blend_h(&p, 0.0, 1.0).coeffs(), h2(&p).coeffs());
    }

    #[test]
    fn coordinate_brackets() {
        let p = p12();
        let j = j1(&p, Chart::Jet);
        // {z_i, z_j} = J_ij, read off from the bilinear bracket of linear functions
        let e = |i: usize| {
            let mut v = Vector4::zeros();
            v[i] = 1.0;
            v
        };
        let br = |i: usize, k: usize| e(i).dot(&(j.matrix() * e(k)));
        assert_eq!(br(1, 2), 1.0);
        assert_eq!(br(0, 3), -1.0);
        assert_eq!(br(2, 3), 5.0);
    }

    #[test]
    fn bracket_self_vanishes() {
        let p = p12();
        let h = h1(&p);
        let b = poisson_bracket(&h, &h, &j1(&p, Chart::Jet)).unwrap();
        assert!(b.coeffs().norm() < 1e-14);
    }

    #[test]
    fn bracket_chart_mismatch() {
        let p = p12();
        let r = poisson_bracket(&h1(&p), &h1(&p), &j1(&p, Chart::Ostrogradsky));
        assert!(matches!(r, Err(Error::ChartMismatch { .. })));
    }

    #[test]
    fn h1_linear_in_p1() {
        let p = p12();
        let ho = h1(&p).in_chart(&p, Chart::Ostrogradsky);
        assert_eq!(ho.coeffs()[(2, 2)], 0.0);
        // and the p1 direction couples to x2 only
        assert!((ho.coeffs()[(1, 2)] - 1.0).abs() < 1e-15);
    }
}

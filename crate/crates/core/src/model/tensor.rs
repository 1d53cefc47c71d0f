use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use super::{blend_h, h2_with_sign, ostro_jacobian, Chart, PuParams};
use crate::error::{Error, Result};
use crate::linalg;
use crate::symmetry::solve_bihamiltonian;

/// Constant antisymmetric contravariant 2-tensor. Constant coefficients make
/// the Jacobi identity automatic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoissonTensor {
    j: Matrix4<f64>,
    chart: Chart,
}

impl PoissonTensor {
    /// Accepts `j` if its symmetric part is below `EPS_ALGEBRA` relative to `|j|`,
    /// then stores the exact antisymmetric part.
    pub fn new(j: Matrix4<f64>, chart: Chart) -> Result<Self> {
        let symmetric_norm = linalg::sym(&j).norm();
        if symmetric_norm > crate::config::EPS_ALGEBRA * j.norm().max(1.0) {
            return Err(Error::NotAntisymmetric { symmetric_norm });
        }
        Ok(Self::from_skew(j, chart))
    }

    pub(crate) fn from_skew(j: Matrix4<f64>, chart: Chart) -> Self {
        Self {
            j: linalg::skew(&j),
            chart,
        }
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.j
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            j: self.j * c,
            chart: self.chart,
        }
    }

    /// Transports the tensor along `jet = D * ostro` (`J_jet = D J_ostro D^T`).
    pub fn in_chart(&self, params: &PuParams, chart: Chart) -> Self {
        let d = ostro_jacobian(params);
        let j = match (self.chart, chart) {
            (a, b) if a == b => self.j,
            (Chart::Ostrogradsky, Chart::Jet) => d * self.j * d.transpose(),
            (Chart::Jet, Chart::Ostrogradsky) => {
                let dinv = d.try_inverse().expect("chart Jacobian is unimodular");
                dinv * self.j * dinv.transpose()
            }
            _ => unreachable!(),
        };
        Self::from_skew(j, chart)
    }
}

/// Canonical structure `{x_i, p_j} = delta_ij`, written in either chart.
pub fn j1(params: &PuParams, chart: Chart) -> PoissonTensor {
    match chart {
        Chart::Ostrogradsky => {
            let mut j = Matrix4::zeros();
            j[(0, 2)] = 1.0;
            j[(1, 3)] = 1.0;
            PoissonTensor::from_skew(j - j.transpose(), chart)
        }
        Chart::Jet => {
            let mut j = Matrix4::zeros();
            j[(0, 3)] = -1.0;
            j[(1, 2)] = 1.0;
            j[(2, 3)] = params.alpha();
            PoissonTensor::from_skew(j - j.transpose(), chart)
        }
    }
}

/// Outcome of fixing the `q''^2` sign of the second Hamiltonian.
#[derive(Debug, Clone, Serialize)]
pub struct SecondStructure {
    /// Sign of the `alpha/(2 beta) q''^2` term.
    pub sign: f64,
    pub tensor: PoissonTensor,
    /// `(sign, |sym(A S^-1)|)` for each candidate; exactly one is zero.
    pub candidates: Vec<(f64, f64)>,
}

/// Solves `J S_2 = A` for both signs of the `q''^2` term and keeps the one
/// whose solution is antisymmetric.
pub fn resolve_second_structure(params: &PuParams) -> SecondStructure {
    let mut best: Option<(f64, PoissonTensor)> = None;
    let mut candidates = Vec::with_capacity(2);
    for sign in [1.0, -1.0] {
        match solve_bihamiltonian(params, &h2_with_sign(params, sign)) {
            Ok(t) => {
                candidates.push((sign, 0.0));
                best.get_or_insert((sign, t));
            }
            Err(Error::NotAntisymmetric { symmetric_norm }) => candidates.push((sign, symmetric_norm)),
            Err(e) => unreachable!("second Hamiltonian Hessian is invertible: {e}"),
        }
    }
    let (sign, tensor) = best.expect("one sign of the q''^2 term is always consistent");
    SecondStructure {
        sign,
        tensor,
        candidates,
    }
}

/// The second Poisson structure, `-d_q ^ d_q' + beta d_q'' ^ d_q'''`.
pub fn j2(params: &PuParams) -> PoissonTensor {
    resolve_second_structure(params).tensor
}

/// Poisson tensor of the blend `c1 H1 + c2 H2` with two closed-form cross-checks.
#[derive(Debug, Clone, Serialize)]
pub struct BlendTensor {
    pub c1: f64,
    pub c2: f64,
    /// `A (c1 S1 + c2 S2)^-1`.
    pub tensor: PoissonTensor,
    /// `(beta c1 J1 + c2 J2) / ((c1 w1^2 + c2)(c1 w2^2 + c2))`.
    pub closed_form: PoissonTensor,
    pub closed_form_residual: f64,
    /// `(c1 J1 + beta c2 J2) / ((c1 - c2 w1^2)(c1 - c2 w2^2))`, the tabulated
    /// normalisation; `None` where its denominator vanishes.
    pub tabulated_form: Option<PoissonTensor>,
    pub tabulated_form_residual: Option<f64>,
}

pub fn blend_j(params: &PuParams, c1: f64, c2: f64) -> Result<BlendTensor> {
    let tensor = match solve_bihamiltonian(params, &blend_h(params, c1, c2)) {
        Ok(t) => t,
        Err(Error::SingularHessian { det }) => return Err(Error::SingularBlend { c1, c2, det }),
        Err(e) => return Err(e),
    };
    let (w1, w2) = (params.omega1().powi(2), params.omega2().powi(2));
    let beta = params.beta();
    let (t1, t2) = (j1(params, Chart::Jet), j2(params));

    let den = (c1 * w1 + c2) * (c1 * w2 + c2);
    let closed_form = PoissonTensor::from_skew((t1.j * (beta * c1) + t2.j * c2) / den, Chart::Jet);
    let closed_form_residual = linalg::rel_diff(&closed_form.j, &tensor.j);

    let den_tab = (c1 - c2 * w1) * (c1 - c2 * w2);
    let tabulated_form =
        (den_tab != 0.0).then(|| PoissonTensor::from_skew((t1.j * c1 + t2.j * (beta * c2)) / den_tab, Chart::Jet));
    let tabulated_form_residual = tabulated_form.map(|t| linalg::rel_diff(&t.j, &tensor.j));

    Ok(BlendTensor {
        c1,
        c2,
        tensor,
        closed_form,
        closed_form_residual,
        tabulated_form,
        tabulated_form_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{free_vector_field, h1, h2, ostro_jacobian};

    fn p12() -> PuParams {
        PuParams::new(1.0, 2.0).unwrap()
    }

    #[test]
    fn j1_jet_entries() {
        let j = j1(&p12(), Chart::Jet);
        let m = j.matrix();
        assert_eq!((m[(0, 3)], m[(1, 2)], m[(2, 3)]), (-1.0, 1.0, 5.0));
        assert_eq!(m + m.transpose(), Matrix4::zeros());
    }

    #[test]
    fn j1_ostro_is_canonical() {
        let j = j1(&p12(), Chart::Ostrogradsky);
        assert_eq!((j.matrix()[(0, 2)], j.matrix()[(1, 3)]), (1.0, 1.0));
        assert_eq!(j.matrix()[(0, 1)], 0.0);
    }

    #[test]
    fn j1_chart_congruence() {
        let p = p12();
        let d = ostro_jacobian(&p);
        let pushed = d * j1(&p, Chart::Ostrogradsky).matrix() * d.transpose();
        assert!((pushed - j1(&p, Chart::Jet).matrix()).norm() < 1e-14);
    }

    #[test]
    fn j2_magnitudes_and_signs() {
        let s = resolve_second_structure(&p12());
        assert_eq!(s.sign, 1.0);
        let m = s.tensor.matrix();
        assert_eq!(m[(0, 1)].abs(), 1.0);
        assert!((m[(2, 3)].abs() - 4.0).abs() < 1e-14);
        for (i, k) in [(0, 2), (0, 3), (1, 2), (1, 3)] {
            assert!(m[(i, k)].abs() < 1e-14);
        }
        assert_eq!(m + m.transpose(), Matrix4::zeros());
        // the rejected sign leaves a visible symmetric part
        assert!(s.candidates.iter().any(|&(sg, r)| sg == -1.0 && r > 1.0));
    }

    #[test]
    fn blend_endpoints() {
        let p = p12();
        let b = blend_j(&p, 1.0, 0.0).unwrap();
        assert!(linalg::rel_diff(b.tensor.matrix(), j1(&p, Chart::Jet).matrix()) < 1e-14);
        let b = blend_j(&p, 0.0, 1.0).unwrap();
        assert!(linalg::rel_diff(b.tensor.matrix(), j2(&p).matrix()) < 1e-14);
    }

    #[test]
    fn blend_singular_locus() {
        // c1 w1^2 + c2 = 0 with w1 = 1
        assert!(matches!(blend_j(&p12(), 1.0, -1.0), Err(Error::SingularBlend { .. })));
        // the tabulated locus c1 = c2 w1^2 is regular for the shipped pair
        assert!(blend_j(&p12(), 1.0, 1.0).is_ok());
    }

    #[test]
    fn blend_closed_form_agrees() {
        let p = PuParams::new(0.7, 1.9).unwrap();
        for (c1, c2) in [(1.0, 2.0), (-0.3, 0.8), (2.5, -0.1)] {
            let b = blend_j(&p, c1, c2).unwrap();
            assert!(b.closed_form_residual < 1e-12, "{c1} {c2}: {}", b.closed_form_residual);
            let a = free_vector_field(&p).linear;
            let s = blend_h(&p, c1, c2);
            assert!(linalg::rel_diff(&(b.tensor.matrix() * s.coeffs()), &a) < 1e-12);
        }
        // the tabulated normalisation does not reproduce the flow away from the axes
        let b = blend_j(&p, 1.0, 2.0).unwrap();
        assert!(b.tabulated_form_residual.unwrap() > 1e-3);
    }

    #[test]
    fn hamilton_identities() {
        let p = PuParams::new(1.3, 0.4).unwrap();
        let a = free_vector_field(&p).linear;
        assert!(linalg::rel_diff(&(j1(&p, Chart::Jet).matrix() * h1(&p).coeffs()), &a) < 1e-15);
        assert!(linalg::rel_diff(&(j2(&p).matrix() * h2(&p).coeffs()), &a) < 1e-13);
    }
}

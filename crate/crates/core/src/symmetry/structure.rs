use nalgebra::{DMatrix, Matrix4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{EPS_SINGULAR, NULL_SPACE_RTOL};
use crate::error::{Error, Result};
use crate::linalg::{null_space, relative_det, relative_projection_residual, vec4};
use crate::model::{free_vector_field, Chart, JetState, PoissonTensor, PuParams, QuadraticObservable, VectorField};

/// Constant tensor `J = A S^-1` with `J grad H = V` for the free flow.
pub fn solve_bihamiltonian(params: &PuParams, target: &QuadraticObservable) -> Result<PoissonTensor> {
    let s = target.coeffs();
    let det = relative_det(s);
    if det < EPS_SINGULAR {
        return Err(Error::SingularHessian { det });
    }
    let a = free_vector_field(params).linear;
    // J^T = S^-1 A^T since S is symmetric
    let jt = s.lu().solve(&a.transpose()).ok_or(Error::SingularHessian { det })?;
    PoissonTensor::new(jt.transpose(), Chart::Jet)
}

/// Uniform draws from `[-2, 2]^4`.
pub fn sample_points(n: usize, seed: u64) -> Vec<JetState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let mut c = [0.0; 4];
            for x in &mut c {
                *x = rng.random_range(-2.0..=2.0);
            }
            JetState::new(c[0], c[1], c[2], c[3])
        })
        .collect()
}

/// `-(DV(z) J + J DV(z)^T)`, the Lie derivative of a constant tensor along the flow.
pub fn lie_derivative_residual(field: &VectorField, j: &PoissonTensor, z: &JetState) -> Matrix4<f64> {
    let dv = field.jacobian(&z.to_vector());
    let m = j.matrix();
    -(dv * m + m * dv.transpose())
}

#[derive(Debug, Clone, Serialize)]
pub struct LieDerivativeReport {
    pub tensor: PoissonTensor,
    /// Largest Frobenius norm of the residual over the sample points.
    pub residual_norm: f64,
    pub sample_points: Vec<JetState>,
}

pub fn lie_derivative_report(field: &VectorField, j: &PoissonTensor, samples: &[JetState]) -> LieDerivativeReport {
    let residual_norm = samples
        .iter()
        .map(|z| lie_derivative_residual(field, j, z).norm())
        .fold(0.0, f64::max);
    LieDerivativeReport {
        tensor: *j,
        residual_norm,
        sample_points: samples.to_vec(),
    }
}

/// Space of constant antisymmetric tensors with vanishing Lie derivative.
#[derive(Debug, Clone, Serialize)]
pub struct InvariantTensorSpace {
    /// Frobenius-orthonormal basis.
    pub tensors: Vec<PoissonTensor>,
    pub dimension: usize,
}

impl InvariantTensorSpace {
    fn span(&self) -> DMatrix<f64> {
        let cols: Vec<_> = self.tensors.iter().map(|t| vec4(t.matrix())).collect();
        if cols.is_empty() {
            DMatrix::zeros(16, 0)
        } else {
            DMatrix::from_columns(&cols)
        }
    }

    /// `|J - P J| / |J|` for the projection onto this space.
    pub fn projection_residual(&self, j: &PoissonTensor) -> f64 {
        relative_projection_residual(&self.span(), &vec4(j.matrix()))
    }
}

const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

fn pair_basis(k: usize) -> Matrix4<f64> {
    let (i, j) = PAIRS[k];
    let mut m = Matrix4::zeros();
    m[(i, j)] = 1.0;
    m[(j, i)] = -1.0;
    m
}

/// Constant solutions of `DV J + J DV^T = 0`.
///
/// A linear field imposes the single condition `A J + J A^T = 0`. A nonlinear
/// field imposes it at every sample point; fewer than three distinct `q`
/// values with nonzero `W''(q)` is reported as
/// [`Error::InsufficientSamples`].
pub fn invariant_tensor_space(field: &VectorField, samples: &[JetState]) -> Result<InvariantTensorSpace> {
    let jacobians: Vec<Matrix4<f64>> = if field.is_linear() {
        vec![field.linear]
    } else {
        samples.iter().map(|z| field.jacobian(&z.to_vector())).collect()
    };
    let mut op = DMatrix::zeros(16 * jacobians.len().max(1), 6);
    for (b, dv) in jacobians.iter().enumerate() {
        for k in 0..6 {
            let e = pair_basis(k);
            let col = vec4(&(dv * e + e * dv.transpose()));
            op.view_mut((16 * b, k), (16, 1)).copy_from(&col);
        }
    }
    let ns = null_space(&op, NULL_SPACE_RTOL);
    let tensors: Vec<PoissonTensor> = ns
        .column_iter()
        .map(|c| {
            let j = (0..6).fold(Matrix4::zeros(), |acc, k| acc + pair_basis(k) * c[k]);
            PoissonTensor::from_skew(j / j.norm(), Chart::Jet)
        })
        .collect();
    let dimension = tensors.len();

    if !field.is_linear() {
        let mut active: Vec<f64> = samples
            .iter()
            .filter(|z| field.potential.second_derivative(z.q) != 0.0)
            .map(|z| z.q)
            .collect();
        active.sort_by(f64::total_cmp);
        active.dedup();
        if active.len() < 3 {
            return Err(Error::InsufficientSamples {
                distinct: active.len(),
                dimension,
            });
        }
    }
    Ok(InvariantTensorSpace { tensors, dimension })
}

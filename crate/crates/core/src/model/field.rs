use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use super::{h1, j1, ostro_jacobian, Chart, JetState, PuParams};

/// Self-interaction `W(q)` added to the Lagrangian as `L - W`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Potential {
    #[default]
    Free,
    /// `W = lambda q^4 / 4`.
    Quartic { lambda: f64 },
    /// `W = sum_k c_k q^k`.
    Polynomial { coeffs: Vec<f64> },
}

impl Potential {
    pub fn quartic(lambda: f64) -> Self {
        if lambda == 0.0 {
            Self::Free
        } else {
            Self::Quartic { lambda }
        }
    }

    pub fn is_free(&self) -> bool {
        match self {
            Self::Free => true,
            Self::Quartic { lambda } => *lambda == 0.0,
            Self::Polynomial { coeffs } => coeffs.iter().all(|&c| c == 0.0),
        }
    }

    pub fn value(&self, q: f64) -> f64 {
        match self {
            Self::Free => 0.0,
            Self::Quartic { lambda } => 0.25 * lambda * q.powi(4),
            Self::Polynomial { coeffs } => coeffs.iter().rev().fold(0.0, |acc, &c| acc * q + c),
        }
    }

    pub fn derivative(&self, q: f64) -> f64 {
        match self {
            Self::Free => 0.0,
            Self::Quartic { lambda } => lambda * q.powi(3),
            Self::Polynomial { coeffs } => coeffs
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (k, &c)| acc * q + k as f64 * c),
        }
    }

    pub fn second_derivative(&self, q: f64) -> f64 {
        match self {
            Self::Free => 0.0,
            Self::Quartic { lambda } => 3.0 * lambda * q * q,
            Self::Polynomial { coeffs } => coeffs
                .iter()
                .enumerate()
                .skip(2)
                .rev()
                .fold(0.0, |acc, (k, &c)| acc * q + (k * (k - 1)) as f64 * c),
        }
    }
}

/// Sign with which `W'(q)` enters the `q'''` component of the flow.
///
/// `L - W` gives `q'''' + alpha q'' + beta q - W'(q) = 0`, so the flow gains
/// `+W'(q) d_q'''`. [`interaction_sign`] rederives this from the canonical
/// equations of `H1 + W`.
pub const INTERACTION_SIGN: f64 = 1.0;

/// `dz/dt = A z + INTERACTION_SIGN * W'(q) e_4` on the jet chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorField {
    pub linear: Matrix4<f64>,
    pub potential: Potential,
}

impl VectorField {
    pub fn is_linear(&self) -> bool {
        self.potential.is_free()
    }

    pub fn flow(&self, z: &Vector4<f64>) -> Vector4<f64> {
        let mut v = self.linear * z;
        v[3] += INTERACTION_SIGN * self.potential.derivative(z[0]);
        v
    }

    pub fn flow_jet(&self, z: &JetState) -> JetState {
        JetState::from_vector(&self.flow(&z.to_vector()))
    }

    /// Jacobian `DV(z) = A + INTERACTION_SIGN * W''(q) e_4 e_1^T`.
    pub fn jacobian(&self, z: &Vector4<f64>) -> Matrix4<f64> {
        let mut m = self.linear;
        m[(3, 0)] += INTERACTION_SIGN * self.potential.second_derivative(z[0]);
        m
    }
}

/// Companion matrix of `q'''' = -alpha q'' - beta q`.
pub fn free_vector_field(params: &PuParams) -> VectorField {
    let (a, b) = (params.alpha(), params.beta());
    VectorField {
        linear: Matrix4::new(
            0.0, 1.0, 0.0, 0.0, //
            0.0, 0.0, 1.0, 0.0, //
            0.0, 0.0, 0.0, 1.0, //
            -b, 0.0, -a, 0.0,
        ),
        potential: Potential::Free,
    }
}

pub fn interacting_vector_field(params: &PuParams, potential: Potential) -> VectorField {
    VectorField {
        potential,
        ..free_vector_field(params)
    }
}

/// Canonical equations of `H1 + W(x1)` in the Ostrogradsky chart.
pub fn ostrogradsky_flow(params: &PuParams, potential: &Potential, s: &Vector4<f64>) -> Vector4<f64> {
    let ho = h1(params).in_chart(params, Chart::Ostrogradsky);
    let mut grad = ho.gradient(s);
    grad[0] += potential.derivative(s[0]);
    j1(params, Chart::Ostrogradsky).matrix() * grad
}

/// Recovers the sign of `W'(q)` in the jet-chart flow by transporting the
/// canonical equations of `H1 + W` through the chart Jacobian.
pub fn interaction_sign(params: &PuParams) -> f64 {
    let w = Potential::quartic(1.0);
    let z = Vector4::new(1.0, 0.3, -0.2, 0.5);
    let d = ostro_jacobian(params);
    let s = d.try_inverse().expect("unimodular") * z;
    let jet_velocity = d * ostrogradsky_flow(params, &w, &s);
    let free = free_vector_field(params).linear * z;
    ((jet_velocity[3] - free[3]) / w.derivative(z[0])).round()
}

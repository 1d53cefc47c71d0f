use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use super::PuParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Chart {
    Jet,
    Ostrogradsky,
}

/// A point `(q, q', q'', q''')` of phase space in the jet chart.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct JetState {
    pub q: f64,
    pub qd: f64,
    pub qdd: f64,
    pub qddd: f64,
}

impl JetState {
    pub const ZERO: Self = Self {
        q: 0.0,
        qd: 0.0,
        qdd: 0.0,
        qddd: 0.0,
    };

    pub fn new(q: f64, qd: f64, qdd: f64, qddd: f64) -> Self {
        Self { q, qd, qdd, qddd }
    }

    pub fn to_vector(self) -> Vector4<f64> {
        Vector4::new(self.q, self.qd, self.qdd, self.qddd)
    }

    pub fn from_vector(v: &Vector4<f64>) -> Self {
        Self::new(v[0], v[1], v[2], v[3])
    }

    pub fn norm(&self) -> f64 {
        self.to_vector().norm()
    }

    pub fn is_finite(&self) -> bool {
        self.to_vector().iter().all(|x| x.is_finite())
    }
}

/// A point `(x1, x2, p1, p2)` in the Ostrogradsky chart.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct OstroState {
    pub x1: f64,
    pub x2: f64,
    pub p1: f64,
    pub p2: f64,
}

impl OstroState {
    pub fn new(x1: f64, x2: f64, p1: f64, p2: f64) -> Self {
        Self { x1, x2, p1, p2 }
    }

    pub fn to_vector(self) -> Vector4<f64> {
        Vector4::new(self.x1, self.x2, self.p1, self.p2)
    }

    pub fn from_vector(v: &Vector4<f64>) -> Self {
        Self::new(v[0], v[1], v[2], v[3])
    }
}

/// Jacobian `d(jet)/d(ostro)`: `jet = D * ostro`.
///
/// Inverse of `x1 = q, x2 = q', p1 = -alpha q' - q''', p2 = q''`.
pub fn ostro_jacobian(params: &PuParams) -> Matrix4<f64> {
    let a = params.alpha();
    Matrix4::new(
        1.0, 0.0, 0.0, 0.0, //
        0.0, 1.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, 1.0, //
        0.0, -a, -1.0, 0.0,
    )
}

pub fn jet_to_ostro(params: &PuParams, z: &JetState) -> OstroState {
    OstroState {
        x1: z.q,
        x2: z.qd,
        p1: -params.alpha() * z.qd - z.qddd,
        p2: z.qdd,
    }
}

pub fn ostro_to_jet(params: &PuParams, s: &OstroState) -> JetState {
    JetState {
        q: s.x1,
        qd: s.x2,
        qdd: s.p2,
        qddd: -s.p1 - params.alpha() * s.x2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p12() -> PuParams {
        PuParams::new(1.0, 2.0).unwrap()
    }

    #[test]
    fn zero_and_position_states() {
        let p = p12();
        assert_eq!(jet_to_ostro(&p, &JetState::ZERO), OstroState::default());
        assert_eq!(
            jet_to_ostro(&p, &JetState::new(1.0, 0.0, 0.0, 0.0)),
            OstroState::new(1.0, 0.0, 0.0, 0.0)
        );
    }

    #[test]
    fn momenta_from_velocity_and_jerk() {
        let p = p12();
        let s = jet_to_ostro(&p, &JetState::new(0.0, 1.0, 2.0, 3.0));
        assert_eq!(s, OstroState::new(0.0, 1.0, -8.0, 2.0));
        assert_eq!(ostro_to_jet(&p, &s), JetState::new(0.0, 1.0, 2.0, 3.0));
        assert_eq!(ostro_to_jet(&p, &OstroState::default()), JetState::ZERO);
    }

    #[test]
    fn jacobian_matches_map() {
        let p = p12();
        let s = OstroState::new(0.3, -1.2, 0.7, 2.5);
        let via_map = ostro_to_jet(&p, &s).to_vector();
        let via_jac = ostro_jacobian(&p) * s.to_vector();
        assert!((via_map - via_jac).norm() < 1e-15);
    }
}

//! Linear embeddings of the oscillator into two-dimensional first-order
//! models `L = a_x x'^2/2 + a_y y'^2/2 - b_x x^2/2 - b_y y^2/2 - g x y`.
//!
//! The substitution `x = mu0 q + mu2 q''`, `y = nu0 q + nu2 q''` either maps
//! both Euler-Lagrange expressions onto the fourth-order equation (family a)
//! or maps the first onto it and annihilates the second (family b).

mod constants;
mod family;
mod hamiltonian;
mod positivity;
mod probe;
mod verify;

use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

pub use constants::{derived_constants, rho0, tau, DerivedConstants};
pub use family::{reconcile_family, reference_family, solve_family, ParamDelta, Reconciliation};
pub use hamiltonian::{
    canonical_2d, pullback_hamiltonian, pushforward_poisson, tabulated_coefficients, Pullback, Pushforward,
};
pub use positivity::{
    fit_blend, positivity, sum_of_squares, sum_of_squares_blend, sum_of_squares_predicate, BlendFit, PositivityVerdict,
};
pub use probe::{expand_linear, expand_quadratic, PROBE_POINTS};
pub use verify::{verify_map, EquationImage, ImageKind, MapVerification};

use crate::config::EPS_SINGULAR;
use crate::model::PuParams;

/// Coefficients of the two-dimensional first-order Lagrangian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoDimModel {
    pub a_x: f64,
    pub a_y: f64,
    pub b_x: f64,
    pub b_y: f64,
    pub g: f64,
}

impl TwoDimModel {
    /// Hessian of `H = p_x^2/(2 a_x) + p_y^2/(2 a_y) + b_x x^2/2 + b_y y^2/2 + g x y`
    /// in `(x, p_x, y, p_y)`; `None` when a kinetic coefficient vanishes.
    pub fn hamiltonian_hessian(&self) -> Option<Matrix4<f64>> {
        if self.a_x == 0.0 || self.a_y == 0.0 {
            return None;
        }
        Some(Matrix4::new(
            self.b_x,
            0.0,
            self.g,
            0.0, //
            0.0,
            1.0 / self.a_x,
            0.0,
            0.0, //
            self.g,
            0.0,
            self.b_y,
            0.0, //
            0.0,
            0.0,
            0.0,
            1.0 / self.a_y,
        ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    Ta1,
    Ta2,
    Tb1,
    Tb2,
}

impl Family {
    /// Family a maps both equations onto the oscillator; family b annihilates the second.
    pub fn maps_both(self) -> bool {
        matches!(self, Family::Ta1 | Family::Ta2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

/// Free parameters of a family: `(a_x, a_y, g)` for Ta, `(a_x, b_x, g)` for
/// Tb1 and `(a_x, b_y, g)` for Tb2.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FreeParams {
    pub a_x: f64,
    pub a_y: Option<f64>,
    pub b_x: Option<f64>,
    pub b_y: Option<f64>,
    pub g: f64,
}

impl FreeParams {
    pub fn coupled(a_x: f64, a_y: f64, g: f64) -> Self {
        Self {
            a_x,
            a_y: Some(a_y),
            g,
            ..Default::default()
        }
    }

    pub fn with_b_x(a_x: f64, b_x: f64, g: f64) -> Self {
        Self {
            a_x,
            b_x: Some(b_x),
            g,
            ..Default::default()
        }
    }

    pub fn with_b_y(a_x: f64, b_y: f64, g: f64) -> Self {
        Self {
            a_x,
            b_y: Some(b_y),
            g,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapStatus {
    Regular,
    /// `x` and `y` are proportional: the Jacobian has rank 2.
    Singular,
    /// `a_y = 0`: the two-dimensional Lagrangian is degenerate.
    Degenerate,
}

/// `x = mu0 q + mu2 q''`, `y = nu0 q + nu2 q''` with momenta `p = a * velocity`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformMap {
    pub family: Family,
    pub branch: Branch,
    pub mu0: f64,
    pub mu2: f64,
    pub nu0: f64,
    pub nu2: f64,
    pub model: TwoDimModel,
    pub params: PuParams,
    /// `(x, p_x, y, p_y) = jac * (q, q', q'', q''')`.
    pub jac: Matrix4<f64>,
    pub status: MapStatus,
}

impl TransformMap {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        family: Family,
        branch: Branch,
        mu0: f64,
        mu2: f64,
        nu0: f64,
        nu2: f64,
        model: TwoDimModel,
        params: PuParams,
    ) -> Self {
        let (ax, ay) = (model.a_x, model.a_y);
        let jac = Matrix4::new(
            mu0,
            0.0,
            mu2,
            0.0, //
            0.0,
            ax * mu0,
            0.0,
            ax * mu2, //
            nu0,
            0.0,
            nu2,
            0.0, //
            0.0,
            ay * nu0,
            0.0,
            ay * nu2,
        );
        // det jac = a_x a_y (mu0 nu2 - mu2 nu0)^2, so cancellation in the
        // 2x2 minor is the scale-free singularity test.
        let minor = mu0 * nu2 - mu2 * nu0;
        let status = if ay == 0.0 {
            MapStatus::Degenerate
        } else if minor.abs() <= EPS_SINGULAR * (mu0 * nu2).abs().max((mu2 * nu0).abs()) {
            MapStatus::Singular
        } else {
            MapStatus::Regular
        };
        Self {
            family,
            branch,
            mu0,
            mu2,
            nu0,
            nu2,
            model,
            params,
            jac,
            status,
        }
    }

    pub fn is_invertible(&self) -> bool {
        self.status == MapStatus::Regular
    }

    /// `mu0 nu2 - mu2 nu0`; zero exactly when `x` and `y` are proportional.
    pub fn transform_determinant(&self) -> f64 {
        self.mu0 * self.nu2 - self.mu2 * self.nu0
    }
}

/// Fitted or tabulated `(c1, c2)` with `H_fo = c1 H1 + c2 H2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlendCoefficients {
    pub c1: f64,
    pub c2: f64,
    pub family: Family,
}

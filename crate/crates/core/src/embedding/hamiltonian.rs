use nalgebra::{Matrix4, Vector4};
use serde::Serialize;

use super::constants::derived_constants;
use super::positivity::fit_blend;
use super::probe::expand_quadratic;
use super::{BlendCoefficients, Branch, Family, MapStatus, TransformMap};
use crate::config::EPS_SINGULAR;
use crate::error::{Error, Result};
use crate::linalg::{least_squares, vec4};
use crate::model::{j1, Chart, PoissonTensor, QuadraticObservable};

/// Canonical structure on `(x, p_x, y, p_y)`.
pub fn canonical_2d() -> Matrix4<f64> {
    let mut j = Matrix4::zeros();
    j[(0, 1)] = 1.0;
    j[(1, 0)] = -1.0;
    j[(2, 3)] = 1.0;
    j[(3, 2)] = -1.0;
    j
}

#[derive(Debug, Clone, Serialize)]
pub struct Pushforward {
    pub tensor: PoissonTensor,
    /// Component along `dq ^ dq'`.
    pub dq_dqd: f64,
    /// `(a_x mu2^2 + a_y nu2^2) / (a_x a_y (mu0 nu2 - mu2 nu0)^2)`.
    pub dq_dqd_closed_form: f64,
    /// Best `k` with `tensor ~ k J1`, and the relative misfit.
    pub j1_factor: f64,
    pub j1_residual: f64,
    pub proportional_to_j1: bool,
}

/// `J_jet = T J_fo T^T` with `T = jac^-1`.
pub fn pushforward_poisson(map: &TransformMap) -> Result<Pushforward> {
    let det = map.jac.determinant();
    if map.status != MapStatus::Regular {
        return Err(Error::SingularMap { det });
    }
    let t = map.jac.try_inverse().ok_or(Error::SingularMap { det })?;
    let j = t * canonical_2d() * t.transpose();
    let tensor = PoissonTensor::new(crate::linalg::skew(&j), Chart::Jet)?;

    let m = map.model;
    let d = map.transform_determinant();
    let dq_dqd_closed_form = (m.a_x * map.mu2.powi(2) + m.a_y * map.nu2.powi(2)) / (m.a_x * m.a_y * d * d);

    let basis = j1(&map.params, Chart::Jet);
    let b = vec4(basis.matrix());
    let target = vec4(tensor.matrix());
    let (k, r) = least_squares(&nalgebra::DMatrix::from_column_slice(16, 1, b.as_slice()), &target);
    let j1_residual = r / target.norm();
    Ok(Pushforward {
        dq_dqd: tensor.matrix()[(0, 1)],
        dq_dqd_closed_form,
        j1_factor: k[0],
        j1_residual,
        proportional_to_j1: j1_residual <= EPS_SINGULAR,
        tensor,
    })
}

/// The tabulated `(c1, c2)` for a family, transcribed as printed.
pub fn tabulated_coefficients(map: &TransformMap) -> Result<BlendCoefficients> {
    let p = &map.params;
    let m = map.model;
    let (w1, w2) = (p.omega1().powi(2), p.omega2().powi(2));
    let big_m = match map.branch {
        Branch::Plus => w1.max(w2),
        Branch::Minus => w1.min(w2),
    };
    let (c1, c2) = match map.family {
        Family::Ta1 => {
            let c2 = -(m.a_x + m.a_y) / (m.a_x * m.a_y);
            (c2 * big_m, c2)
        }
        Family::Ta2 => {
            let c = derived_constants(&m, p)?;
            let rg = match map.branch {
                Branch::Plus => c.rho_g_plus,
                Branch::Minus => c.rho_g_minus,
            };
            let c2 = -(m.a_x + m.a_y) / (m.a_x * m.a_y);
            ((4.0 * m.g - rg) / (2.0 * m.a_x * m.a_y) + p.alpha() / 2.0 * c2, c2)
        }
        Family::Tb1 => ((m.b_x / m.a_x - p.alpha()) / m.a_x, -1.0 / m.a_x),
        Family::Tb2 => (-big_m / m.a_x, -1.0 / m.a_x),
    };
    Ok(BlendCoefficients {
        c1,
        c2,
        family: map.family,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Pullback {
    /// `H_fo` composed with the map, in the jet chart; absent when `a_y = 0`.
    pub observable: Option<QuadraticObservable>,
    /// Fitted `(c1, c2)`; undefined when the pushforward is singular.
    pub fitted: Option<BlendCoefficients>,
    pub fit_residual: Option<f64>,
    pub tabulated: Option<BlendCoefficients>,
    /// `fitted - tabulated`.
    pub delta: Option<(f64, f64)>,
    pub status: MapStatus,
}

/// Composes `H_fo` with the map and identifies it as `c1 H1 + c2 H2`.
pub fn pullback_hamiltonian(map: &TransformMap) -> Result<Pullback> {
    let tabulated = tabulated_coefficients(map)
        .ok()
        .filter(|c| c.c1.is_finite() && c.c2.is_finite());
    let Some(s_fo) = map.model.hamiltonian_hessian() else {
        return Ok(Pullback {
            observable: None,
            fitted: None,
            fit_residual: None,
            tabulated,
            delta: None,
            status: map.status,
        });
    };
    let jac = map.jac;
    let (h, _) = expand_quadratic(|z| {
        let w = jac * Vector4::from_row_slice(z);
        0.5 * w.dot(&(s_fo * w))
    });
    let observable = QuadraticObservable::jet(h);
    if map.status != MapStatus::Regular {
        return Ok(Pullback {
            observable: Some(observable),
            fitted: None,
            fit_residual: None,
            tabulated,
            delta: None,
            status: map.status,
        });
    }
    let fit = fit_blend(&map.params, &observable);
    if fit.residual > 1e-10 {
        return Err(Error::NotInSpan { residual: fit.residual });
    }
    let fitted = BlendCoefficients {
        c1: fit.c1,
        c2: fit.c2,
        family: map.family,
    };
    let delta = tabulated.map(|t| (fitted.c1 - t.c1, fitted.c2 - t.c2));
    Ok(Pullback {
        observable: Some(observable),
        fitted: Some(fitted),
        fit_residual: Some(fit.residual),
        tabulated,
        delta,
        status: map.status,
    })
}

use serde::Serialize;

use super::TwoDimModel;
use crate::error::{Error, Result};
use crate::model::PuParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedConstants {
    pub rho_g_plus: f64,
    pub rho_g_minus: f64,
    pub rho_0_plus: f64,
    pub rho_0_minus: f64,
    pub tau: f64,
}

/// `rho_g = +-sqrt(alpha^2 - 4 beta - 4 g^2/(a_x a_y))`, `rho_0 = rho_g|_{g=0}`
/// and `tau = b_x^2 - a_x b_x alpha + a_x^2 beta`.
pub fn derived_constants(model: &TwoDimModel, params: &PuParams) -> Result<DerivedConstants> {
    if model.a_x * model.a_y == 0.0 {
        return Err(Error::DegenerateModel("rho_g needs a_x a_y != 0".into()));
    }
    let (a, b) = (params.alpha(), params.beta());
    let radicand = a * a - 4.0 * b - 4.0 * model.g * model.g / (model.a_x * model.a_y);
    if radicand < 0.0 {
        return Err(Error::ComplexBranch { radicand });
    }
    let rg = radicand.sqrt();
    let r0 = rho0(params);
    Ok(DerivedConstants {
        rho_g_plus: rg,
        rho_g_minus: -rg,
        rho_0_plus: r0,
        rho_0_minus: -r0,
        tau: tau(model.a_x, model.b_x, params),
    })
}

/// `sqrt(alpha^2 - 4 beta) = |w1^2 - w2^2|`, real for every valid parameter set.
pub fn rho0(params: &PuParams) -> f64 {
    (params.omega1().powi(2) - params.omega2().powi(2)).abs()
}

pub fn tau(a_x: f64, b_x: f64, params: &PuParams) -> f64 {
    b_x * b_x - a_x * b_x * params.alpha() + a_x * a_x * params.beta()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p12() -> PuParams {
        PuParams::new(1.0, 2.0).unwrap()
    }

    #[test]
    fn uncoupled_rho() {
        let m = TwoDimModel {
            a_x: 1.3,
            a_y: -0.4,
            b_x: 0.0,
            b_y: 0.0,
            g: 0.0,
        };
        let c = derived_constants(&m, &p12()).unwrap();
        assert_eq!((c.rho_0_plus, c.rho_0_minus), (3.0, -3.0));
        assert_eq!(c.rho_g_plus, 3.0);
    }

    #[test]
    fn tau_value() {
        assert_eq!(tau(1.0, 2.0, &p12()), -2.0);
    }

    #[test]
    fn complex_branch() {
        let m = TwoDimModel {
            a_x: 1.0,
            a_y: 1.0,
            b_x: 0.0,
            b_y: 0.0,
            g: 2.0,
        };
        match derived_constants(&m, &p12()) {
            Err(Error::ComplexBranch { radicand }) => assert_eq!(radicand, -7.0),
            other => panic!("{other:?}"),
        }
        let m = TwoDimModel { a_y: 0.0, ..m };
        assert!(matches!(derived_constants(&m, &p12()), Err(Error::DegenerateModel(_))));
    }
}

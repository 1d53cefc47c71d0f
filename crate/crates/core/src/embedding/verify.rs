use serde::Serialize;

use super::probe::expand_linear;
use super::TransformMap;
use crate::config::EPS_ALGEBRA;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "factor", rename_all = "lowercase")]
pub enum ImageKind {
    /// `k * phi_PU` with `k != 0`.
    Proportional(f64),
    Zero,
    Neither,
}

/// One Euler-Lagrange expression after substitution, as coefficients of
/// `(q, q', q'', q''', q'''')`.
#[derive(Debug, Clone, Serialize)]
pub struct EquationImage {
    pub kind: ImageKind,
    pub coefficients: [f64; 5],
    /// Left over after removing the best multiple of `phi_PU`.
    pub residual_coefficients: [f64; 5],
    /// Largest residual coefficient relative to the magnitude of the terms involved.
    pub relative_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MapVerification {
    pub phi1: EquationImage,
    pub phi2: EquationImage,
    pub contract_satisfied: bool,
    pub max_relative_residual: f64,
    /// `x` and `y` are proportional, or neither carries `q''`.
    pub rank_deficient: bool,
    pub notes: Vec<String>,
}

fn classify(c: [f64; 5], phi: [f64; 5], scale: f64) -> EquationImage {
    let norm2: f64 = phi.iter().map(|p| p * p).sum();
    let k = c.iter().zip(&phi).map(|(a, b)| a * b).sum::<f64>() / norm2;
    let resid: [f64; 5] = std::array::from_fn(|i| c[i] - k * phi[i]);
    let tol = EPS_ALGEBRA * scale;
    let max_abs = |v: &[f64; 5]| v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let (kind, left) = if max_abs(&c) <= tol {
        (ImageKind::Zero, c)
    } else if max_abs(&resid) <= tol {
        (ImageKind::Proportional(k), resid)
    } else {
        (ImageKind::Neither, resid)
    };
    EquationImage {
        kind,
        coefficients: c,
        residual_coefficients: resid,
        relative_residual: max_abs(&left) / scale,
    }
}

/// Substitutes the map into both first-order Euler-Lagrange expressions
/// `a_x x'' + b_x x + g y` and `a_y y'' + b_y y + g x`, treating the jet
/// variables as independent, and classifies each against
/// `phi_PU = q'''' + alpha q'' + beta q`.
pub fn verify_map(map: &TransformMap) -> MapVerification {
    let m = map.model;
    let (alpha, beta) = (map.params.alpha(), map.params.beta());
    let phi = [beta, 0.0, alpha, 0.0, 1.0];
    let (mu0, mu2, nu0, nu2) = (map.mu0, map.mu2, map.nu0, map.nu2);

    let x = |p: &[f64; 5]| mu0 * p[0] + mu2 * p[2];
    let y = |p: &[f64; 5]| nu0 * p[0] + nu2 * p[2];
    let xdd = |p: &[f64; 5]| mu0 * p[2] + mu2 * p[4];
    let ydd = |p: &[f64; 5]| nu0 * p[2] + nu2 * p[4];
    let (c1, r1) = expand_linear(|p| m.a_x * xdd(p) + m.b_x * x(p) + m.g * y(p));
    let (c2, r2) = expand_linear(|p| m.a_y * ydd(p) + m.b_y * y(p) + m.g * x(p));

    let (amu, anu) = (mu0.abs() + mu2.abs(), nu0.abs() + nu2.abs());
    let scale1 = ((m.a_x.abs() + m.b_x.abs()) * amu + m.g.abs() * anu).max(f64::MIN_POSITIVE);
    let scale2 = ((m.a_y.abs() + m.b_y.abs()) * anu + m.g.abs() * amu).max(f64::MIN_POSITIVE);
    let phi1 = classify(c1, phi, scale1);
    let phi2 = classify(c2, phi, scale2);

    let contract_satisfied = match map.family.maps_both() {
        true => matches!(phi1.kind, ImageKind::Proportional(_)) && matches!(phi2.kind, ImageKind::Proportional(_)),
        false => matches!(phi1.kind, ImageKind::Proportional(_)) && phi2.kind == ImageKind::Zero,
    };

    let det = map.transform_determinant();
    let det_scale = amu * anu;
    let rank_deficient = det.abs() <= EPS_ALGEBRA * det_scale || (mu2 == 0.0 && nu2 == 0.0);
    let mut notes = Vec::new();
    if rank_deficient {
        notes.push("x and y are linearly dependent in (q, q''); the map cannot carry fourth-order data".into());
    }
    if r1.max(r2) > 1e-10 {
        notes.push(format!("probe fit residual {:.3e}", r1.max(r2)));
    }
    if !contract_satisfied {
        notes.push(format!(
            "{:?} contract violated: phi1 {:?}, phi2 {:?}",
            map.family, phi1.kind, phi2.kind
        ));
    }
    MapVerification {
        max_relative_residual: phi1.relative_residual.max(phi2.relative_residual),
        phi1,
        phi2,
        contract_satisfied,
        rank_deficient,
        notes,
    }
}

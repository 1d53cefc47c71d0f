use nalgebra::{DMatrix, Matrix4};
use serde::Serialize;

use crate::config::NULL_SPACE_RTOL;
use crate::linalg::{null_space, relative_projection_residual, unvec4, vec4};
use crate::model::{free_vector_field, h2, Chart, PuParams, QuadraticObservable};

/// Linear generator `X = (Xi z) . grad` on the jet chart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearSymmetry {
    pub xi: Matrix4<f64>,
}

impl LinearSymmetry {
    pub fn new(xi: Matrix4<f64>) -> Self {
        Self { xi }
    }

    /// Matrix commutator `[Xi_a, Xi_b]`.
    pub fn commutator(&self, other: &Self) -> Matrix4<f64> {
        self.xi * other.xi - other.xi * self.xi
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SymmetryBasis {
    pub generators: Vec<LinearSymmetry>,
    pub dimension: usize,
}

impl SymmetryBasis {
    fn from_generators(generators: Vec<LinearSymmetry>) -> Self {
        let dimension = generators.len();
        Self { generators, dimension }
    }

    /// Orthonormal (Frobenius) basis of the span, as 16-vectors in columns.
    pub fn span(&self) -> DMatrix<f64> {
        if self.generators.is_empty() {
            return DMatrix::zeros(16, 0);
        }
        let cols: Vec<_> = self.generators.iter().map(|g| vec4(&g.xi)).collect();
        let m = DMatrix::from_columns(&cols);
        let svd = m.svd(true, false);
        let u = svd.u.expect("requested U");
        let cutoff = NULL_SPACE_RTOL * svd.singular_values.max();
        let keep: Vec<_> = (0..svd.singular_values.len())
            .filter(|&i| svd.singular_values[i] > cutoff)
            .map(|i| u.column(i).into_owned())
            .collect();
        DMatrix::from_columns(&keep)
    }

    /// `|Xi - P Xi| / |Xi|` for the projection `P` onto this basis' span.
    pub fn projection_residual(&self, xi: &Matrix4<f64>) -> f64 {
        relative_projection_residual(&self.span(), &vec4(xi))
    }

    /// Largest `|[Xi_a, Xi_b]| / (|Xi_a| |Xi_b|)` over all pairs.
    pub fn max_commutator(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.generators.iter().enumerate() {
            for b in &self.generators[i + 1..] {
                let scale = a.xi.norm() * b.xi.norm();
                worst = worst.max(a.commutator(b).norm() / scale.max(f64::MIN_POSITIVE));
            }
        }
        worst
    }

    /// Rank of the Gram matrix of the vectorised generators.
    pub fn rank(&self) -> usize {
        self.span().ncols()
    }
}

/// Null space of `Xi -> Xi A - A Xi`, orthonormal in the Frobenius product.
///
/// `A` is first balanced by a diagonal similarity so that the rank decision
/// does not depend on the spread of its entries.
pub fn commutant_basis(a: &Matrix4<f64>) -> SymmetryBasis {
    let d = balancing_diagonal(a);
    let d_inv = d.map(|x| 1.0 / x);
    let ab = Matrix4::from_diagonal(&d_inv) * a * Matrix4::from_diagonal(&d);

    let mut op = DMatrix::zeros(16, 16);
    for k in 0..16 {
        let mut e = Matrix4::zeros();
        e.as_mut_slice()[k] = 1.0;
        op.set_column(k, &vec4(&(e * ab - ab * e)));
    }
    let ns = null_space(&op, NULL_SPACE_RTOL);
    // Xi commutes with A iff D Xi' D^-1 does, with Xi' in the balanced commutant
    let raw: Vec<_> = ns
        .column_iter()
        .map(|c| {
            let xi = unvec4(&c.into_owned());
            vec4(&(Matrix4::from_diagonal(&d) * xi * Matrix4::from_diagonal(&d_inv)))
        })
        .collect();
    if raw.is_empty() {
        return SymmetryBasis::from_generators(Vec::new());
    }
    let q = DMatrix::from_columns(&raw).qr().q();
    let generators = q
        .column_iter()
        .map(|c| LinearSymmetry::new(unvec4(&c.into_owned())))
        .collect();
    SymmetryBasis::from_generators(generators)
}

/// Power-of-two diagonal `D` making `D^-1 A D` roughly row/column balanced
/// (off-diagonal 1-norms).
fn balancing_diagonal(a: &Matrix4<f64>) -> nalgebra::Vector4<f64> {
    let mut d = nalgebra::Vector4::repeat(1.0);
    let mut m = *a;
    for _ in 0..64 {
        let mut converged = true;
        for i in 0..4 {
            let c: f64 = (0..4).filter(|&k| k != i).map(|k| m[(k, i)].abs()).sum();
            let r: f64 = (0..4).filter(|&k| k != i).map(|k| m[(i, k)].abs()).sum();
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let (mut f, mut cf2) = (1.0, c);
            while cf2 < r / 2.0 {
                f *= 2.0;
                cf2 *= 4.0;
            }
            while cf2 >= r * 2.0 {
                f /= 2.0;
                cf2 /= 4.0;
            }
            if (cf2 + r) / f < 0.95 * s {
                converged = false;
                d[i] *= f;
                for k in 0..4 {
                    m[(i, k)] /= f;
                    m[(k, i)] *= f;
                }
            }
        }
        if converged {
            break;
        }
    }
    d
}

/// The four explicit generators `X1 = A`, `X2 = I/2`, `X3 = A^2/2` and
/// `X4 = (alpha q' + q''') d_q - beta (q d_q' + q' d_q'' + q'' d_q''')`,
/// which equals `-beta A^-1`.
pub fn reference_generators(params: &PuParams) -> SymmetryBasis {
    let a = free_vector_field(params).linear;
    let (al, be) = (params.alpha(), params.beta());
    let x4 = Matrix4::new(
        0.0, al, 0.0, 1.0, //
        -be, 0.0, 0.0, 0.0, //
        0.0, -be, 0.0, 0.0, //
        0.0, 0.0, -be, 0.0,
    );
    SymmetryBasis::from_generators(vec![
        LinearSymmetry::new(a),
        LinearSymmetry::new(Matrix4::identity() * 0.5),
        LinearSymmetry::new(a * a * 0.5),
        LinearSymmetry::new(x4),
    ])
}

/// Variant of `X4` with `alpha q d_q` in place of `alpha q' d_q`. It does not
/// commute with the flow; kept to quantify that.
pub fn fourth_generator_alt(params: &PuParams) -> LinearSymmetry {
    let mut x4 = reference_generators(params).generators[3].xi;
    x4[(0, 1)] = 0.0;
    x4[(0, 0)] = params.alpha();
    LinearSymmetry::new(x4)
}

/// `X(F) = (Xi z) . S z`, the quadratic with matrix `Xi^T S + S Xi`.
pub fn apply_symmetry(x: &LinearSymmetry, f: &QuadraticObservable) -> QuadraticObservable {
    let s = f.coeffs();
    QuadraticObservable::new(x.xi.transpose() * s + s * x.xi, f.chart())
}

/// A generated charge, raw and as a multiple of the second Hamiltonian.
#[derive(Debug, Clone, Serialize)]
pub struct ChargeReport {
    pub raw: QuadraticObservable,
    /// Least-squares `c` in `X(F) ~ c H2`.
    pub proportionality: f64,
    /// `|X(F) - c H2| / |X(F)|` (0 for a vanishing charge).
    pub relative_residual: f64,
}

pub fn generated_charge(params: &PuParams, x: &LinearSymmetry, f: &QuadraticObservable) -> ChargeReport {
    debug_assert_eq!(f.chart(), Chart::Jet);
    let raw = apply_symmetry(x, f);
    let s2 = h2(params);
    let (m, b) = (raw.coeffs(), s2.coeffs());
    let proportionality = m.dot(b) / b.dot(b);
    let relative_residual = if m.norm() == 0.0 {
        0.0
    } else {
        (m - b * proportionality).norm() / m.norm()
    };
    ChargeReport {
        raw,
        proportionality,
        relative_residual,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{h1, JetState};

    fn p12() -> PuParams {
        PuParams::new(1.0, 2.0).unwrap()
    }

    #[test]
    fn commutant_of_flow_is_four_dimensional() {
        let basis = commutant_basis(&free_vector_field(&p12()).linear);
        assert_eq!(basis.dimension, 4);
        assert!(basis.max_commutator() < 1e-12);
        assert_eq!(basis.rank(), 4);
    }

    #[test]
    fn commutant_of_zero_is_everything() {
        assert_eq!(commutant_basis(&Matrix4::zeros()).dimension, 16);
    }

    #[test]
    fn reference_generators_lie_in_commutant() {
        let p = p12();
        let basis = commutant_basis(&free_vector_field(&p).linear);
        for g in &reference_generators(&p).generators {
            assert!(basis.projection_residual(&g.xi) < 1e-12);
        }
        assert!(basis.projection_residual(&fourth_generator_alt(&p).xi) > 1e-3);
    }

    #[test]
    fn reference_generators_commute() {
        let refs = reference_generators(&p12());
        assert!(refs.generators[2].commutator(&refs.generators[3]).norm() < 1e-12);
        assert!(refs.max_commutator() < 1e-12);
        let z = nalgebra::Vector4::new(1.0, -2.0, 3.0, 0.5);
        assert_eq!(refs.generators[1].xi * z, z * 0.5);
        assert_eq!(refs.generators[0].xi, free_vector_field(&p12()).linear);
    }

    #[test]
    fn actions_on_h1() {
        let p = p12();
        let h = h1(&p);
        let g = reference_generators(&p).generators;
        assert!(apply_symmetry(&g[0], &h).coeffs().norm() < 1e-12);
        assert_eq!(apply_symmetry(&g[1], &h).coeffs(), h.coeffs());
        assert!(apply_symmetry(&g[3], &h).coeffs().norm() < 1e-12);

        let z = JetState::new(1.0, 0.0, -1.0, 0.0);
        let x3h = apply_symmetry(&g[2], &h);
        assert!((x3h.eval_jet(&z) - 1.5).abs() < 1e-14);
        assert!((x3h.eval_jet(&z) - (-4.0 * h2(&p).eval_jet(&z))).abs() < 1e-14);

        let rep = generated_charge(&p, &g[2], &h);
        assert!((rep.proportionality + p.beta()).abs() < 1e-12);
        assert!(rep.relative_residual < 1e-14);
    }

    #[test]
    fn x3_charge_closed_form() {
        let p = PuParams::new(0.6, 1.4).unwrap();
        let (a, b) = (p.alpha(), p.beta());
        let x3h = apply_symmetry(&reference_generators(&p).generators[2], &h1(&p));
        let z = JetState::new(0.3, -1.1, 0.8, 2.0);
        let want = 0.5 * b * z.qd * z.qd - 0.5 * a * z.qdd * z.qdd - 0.5 * z.qddd * z.qddd - b * z.q * z.qdd;
        assert!((x3h.eval_jet(&z) - want).abs() < 1e-13);
    }
}

use num_complex::Complex64;
use serde::Serialize;

use crate::model::{JetState, PuParams};

/// `q(t) = 2 Re(a1 e^{-i w1 t} + a2 e^{-i w2 t})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeAmplitudes {
    pub a1: Complex64,
    pub a2: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeEnergy {
    pub e1: f64,
    pub e2: f64,
    pub total: f64,
}

/// Real parts from `(q, q'')`, imaginary parts from `(q', q''')`.
pub fn mode_decompose(params: &PuParams, z: &JetState) -> ModeAmplitudes {
    let (w1, w2) = (params.omega1(), params.omega2());
    let (s1, s2) = (w1 * w1, w2 * w2);
    let den = 2.0 * (s1 - s2);
    // 2 r1 + 2 r2 = q, -2 s1 r1 - 2 s2 r2 = q''
    let r1 = -(s2 * z.q + z.qdd) / den;
    let r2 = (s1 * z.q + z.qdd) / den;
    // 2 w1 i1 + 2 w2 i2 = q', -2 w1^3 i1 - 2 w2^3 i2 = q'''
    let i1 = -(s2 * z.qd + z.qddd) / (den * w1);
    let i2 = (s1 * z.qd + z.qddd) / (den * w2);
    ModeAmplitudes {
        a1: Complex64::new(r1, i1),
        a2: Complex64::new(r2, i2),
    }
}

/// The free solution with amplitudes `m`, evaluated at time `t`.
pub fn reconstruct(params: &PuParams, m: &ModeAmplitudes, t: f64) -> JetState {
    let mut d = [0.0; 4];
    for (w, a) in [(params.omega1(), m.a1), (params.omega2(), m.a2)] {
        let phase = a * Complex64::from_polar(1.0, -w * t);
        let mut factor = Complex64::new(1.0, 0.0);
        for dk in d.iter_mut() {
            *dk += 2.0 * (factor * phase).re;
            factor *= Complex64::new(0.0, -w);
        }
    }
    JetState::new(d[0], d[1], d[2], d[3])
}

/// `e1 = 2 R1 |a1|^2`, `e2 = -2 R2 |a2|^2` with `R_i = w_i^2 (w1^2 - w2^2)`.
pub fn mode_energy(params: &PuParams, m: &ModeAmplitudes) -> ModeEnergy {
    let (r1, r2) = params.mode_constants();
    let e1 = 2.0 * r1 * m.a1.norm_sqr();
    let e2 = -2.0 * r2 * m.a2.norm_sqr();
    ModeEnergy { e1, e2, total: e1 + e2 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::h1;

    #[test]
    fn pure_modes() {
        let p = PuParams::new(1.0, 2.0).unwrap();
        let m = mode_decompose(&p, &JetState::new(1.0, 0.0, -1.0, 0.0));
        assert_eq!((m.a1, m.a2), (Complex64::new(0.5, 0.0), Complex64::new(0.0, 0.0)));
        let e = mode_energy(&p, &m);
        assert_eq!(e.total, -1.5);
        assert_eq!(h1(&p).eval_jet(&JetState::new(1.0, 0.0, -1.0, 0.0)), -1.5);

        let m = mode_decompose(&p, &JetState::new(1.0, 0.0, -4.0, 0.0));
        assert_eq!((m.a1.re, m.a2.re), (0.0, 0.5));
        assert_eq!(mode_energy(&p, &m).total, 6.0);
        assert_eq!(mode_decompose(&p, &JetState::ZERO).a1, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn reconstruct_at_zero_is_identity() {
        let p = PuParams::new(0.7, 1.3).unwrap();
        let z = JetState::new(0.3, -1.2, 0.8, 2.1);
        let back = reconstruct(&p, &mode_decompose(&p, &z), 0.0);
        assert!((back.to_vector() - z.to_vector()).norm() < 1e-14);
    }
}

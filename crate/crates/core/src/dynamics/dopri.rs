//! Dormand-Prince 5(4) with PI step-size control and the standard quartic
//! dense output (Hairer, Norsett & Wanner, `DOPRI5`).

use nalgebra::Vector4;

use crate::error::{Error, Result};

type V = Vector4<f64>;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const BETA: f64 = 0.04;
const UROUND: f64 = f64::EPSILON;

/// Continuous extension over one accepted step.
#[derive(Debug, Clone, Copy)]
pub struct DenseStep {
    pub t0: f64,
    pub h: f64,
    r: [V; 5],
}

impl DenseStep {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    pub fn start(&self) -> V {
        self.r[0]
    }

    pub fn end(&self) -> V {
        self.r[0] + self.r[1]
    }

    pub fn eval(&self, t: f64) -> V {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        let r = &self.r;
        r[0] + (r[1] + (r[2] + (r[3] + r[4] * th1) * th) * th1) * th
    }
}

pub struct Dopri5<F> {
    f: F,
    t: f64,
    y: V,
    k1: V,
    h: f64,
    t_end: f64,
    rtol: f64,
    atol: f64,
    facold: f64,
    last_rejected: bool,
    pub attempts: usize,
    pub accepted: usize,
    pub rejected: usize,
    max_steps: usize,
}

impl<F: Fn(f64, &V) -> V> Dopri5<F> {
    pub fn new(f: F, t0: f64, y0: V, t_end: f64, tol: f64, max_steps: usize) -> Self {
        let k1 = f(t0, &y0);
        let mut s = Self {
            f,
            t: t0,
            y: y0,
            k1,
            h: 0.0,
            t_end,
            rtol: tol,
            atol: tol,
            facold: 1e-4,
            last_rejected: false,
            attempts: 0,
            accepted: 0,
            rejected: 0,
            max_steps,
        };
        s.h = s.initial_step();
        s
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> V {
        self.y
    }

    pub fn finished(&self) -> bool {
        self.t >= self.t_end
    }

    fn scale(&self, y: &V, i: usize) -> f64 {
        self.atol + self.rtol * y[i].abs()
    }

    fn initial_step(&self) -> f64 {
        let hmax = self.t_end - self.t;
        let (y0, f0) = (&self.y, &self.k1);
        let (mut dnf, mut dny) = (0.0, 0.0);
        for i in 0..4 {
            let sk = self.scale(y0, i);
            dnf += (f0[i] / sk).powi(2);
            dny += (y0[i] / sk).powi(2);
        }
        let mut h = if dnf <= 1e-10 || dny <= 1e-10 {
            1e-6
        } else {
            (dny / dnf).sqrt() * 0.01
        };
        h = h.min(hmax);
        let y1 = y0 + f0 * h;
        let f1 = (self.f)(self.t + h, &y1);
        let der2 = (0..4)
            .map(|i| ((f1[i] - f0[i]) / self.scale(y0, i)).powi(2))
            .sum::<f64>()
            .sqrt()
            / h;
        let der12 = der2.abs().max(dnf.sqrt());
        let h1 = if der12 <= 1e-15 {
            (h * 1e-3).max(1e-6)
        } else {
            (0.01 / der12).powf(0.2)
        };
        (100.0 * h).min(h1).min(hmax)
    }

    /// Advances by one accepted step, retrying rejected attempts.
    pub fn step(&mut self) -> Result<DenseStep> {
        let expo1 = 0.2 - BETA * 0.75;
        loop {
            if self.attempts >= self.max_steps {
                return Err(Error::StepLimit {
                    t: self.t,
                    steps: self.attempts,
                });
            }
            if 0.1 * self.h.abs() <= self.t.abs() * UROUND || self.h < f64::MIN_POSITIVE {
                return Err(Error::StepUnderflow { t: self.t, h: self.h });
            }
            self.attempts += 1;
            let last = self.t + 1.01 * self.h >= self.t_end;
            let h = if last { self.t_end - self.t } else { self.h };
            let (t, y, k1, f) = (self.t, self.y, self.k1, &self.f);

            let k2 = f(t + C2 * h, &(y + k1 * (h * A21)));
            let k3 = f(t + C3 * h, &(y + (k1 * A31 + k2 * A32) * h));
            let k4 = f(t + C4 * h, &(y + (k1 * A41 + k2 * A42 + k3 * A43) * h));
            let k5 = f(t + C5 * h, &(y + (k1 * A51 + k2 * A52 + k3 * A53 + k4 * A54) * h));
            let k6 = f(t + h, &(y + (k1 * A61 + k2 * A62 + k3 * A63 + k4 * A64 + k5 * A65) * h));
            let y1 = y + (k1 * A71 + k3 * A73 + k4 * A74 + k5 * A75 + k6 * A76) * h;
            let k7 = f(t + h, &y1);
            let e = (k1 * E1 + k3 * E3 + k4 * E4 + k5 * E5 + k6 * E6 + k7 * E7) * h;

            let err = ((0..4)
                .map(|i| {
                    let sk = self.atol + self.rtol * y[i].abs().max(y1[i].abs());
                    (e[i] / sk).powi(2)
                })
                .sum::<f64>()
                / 4.0)
                .sqrt();
            if !err.is_finite() {
                self.rejected += 1;
                self.last_rejected = true;
                self.h = h * FAC_MIN;
                continue;
            }

            let fac11 = err.powf(expo1);
            let fac = (fac11 / self.facold.powf(BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            if err <= 1.0 {
                self.facold = err.max(1e-4);
                let mut hnew = h / fac;
                if self.last_rejected {
                    hnew = hnew.min(h);
                }
                let r2 = y1 - y;
                let r3 = k1 * h - r2;
                let r4 = r2 - k7 * h - r3;
                let r5 = (k1 * D1 + k3 * D3 + k4 * D4 + k5 * D5 + k6 * D6 + k7 * D7) * h;
                let dense = DenseStep {
                    t0: t,
                    h,
                    r: [y, r2, r3, r4, r5],
                };
                self.t = if last { self.t_end } else { t + h };
                self.y = y1;
                self.k1 = k7;
                self.h = hnew;
                self.accepted += 1;
                self.last_rejected = false;
                return Ok(dense);
            }
            self.rejected += 1;
            self.last_rejected = true;
            self.h = h / (1.0 / FAC_MIN).min(fac11 / SAFETY);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_and_dense_output() {
        let f = |_t: f64, y: &V| V::new(y[1], -y[0], y[3], -4.0 * y[2]);
        let mut s = Dopri5::new(f, 0.0, V::new(1.0, 0.0, 0.0, 2.0), 10.0, 1e-11, 100_000);
        let mut worst: f64 = 0.0;
        while !s.finished() {
            let d = s.step().unwrap();
            for k in 0..5 {
                let t = d.t0 + d.h * k as f64 / 4.0;
                let y = d.eval(t);
                worst = worst.max((y[0] - t.cos()).abs()).max((y[2] - (2.0 * t).sin()).abs());
            }
        }
        assert_eq!(s.t(), 10.0);
        assert!(worst < 1e-8, "{worst}");
    }

    #[test]
    fn exhausted_budget() {
        let f = |_t: f64, y: &V| V::new(y[1], -y[0], 0.0, 0.0);
        let mut s = Dopri5::new(f, 0.0, V::new(1.0, 0.0, 0.0, 0.0), 1000.0, 1e-12, 10);
        let r = (0..20).try_for_each(|_| s.step().map(|_| ()));
        assert!(matches!(r, Err(Error::StepLimit { .. })));
    }
}

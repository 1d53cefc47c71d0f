use nalgebra::Vector4;
use serde::{Deserialize, Serialize};

use super::dopri::{DenseStep, Dopri5};
use crate::config::{default_escape_radius, DEFAULT_SAMPLE_RATE, DEFAULT_TOL, DEFAULT_T_END, VERSION};
use crate::error::{Error, Result};
use crate::model::{
    h1, h2, jet_to_ostro, ostro_jacobian, ostrogradsky_flow, JetState, OstroState, Potential, PuParams,
    QuadraticObservable, VectorField,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorSettings {
    pub t_end: f64,
    pub tol: f64,
    /// Output samples per unit time.
    pub sample_rate: f64,
    /// `None` selects `1e3 * max(1, |z0|)`.
    pub escape_radius: Option<f64>,
    pub max_steps: usize,
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        Self {
            t_end: DEFAULT_T_END,
            tol: DEFAULT_TOL,
            sample_rate: DEFAULT_SAMPLE_RATE,
            escape_radius: None,
            max_steps: 50_000_000,
        }
    }
}

impl IntegratorSettings {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.into()));
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return bad("t_end must be positive and finite");
        }
        if !(1e-13..=1e-3).contains(&self.tol) {
            return bad("tol must lie in [1e-13, 1e-3]");
        }
        if !(self.sample_rate.is_finite() && self.sample_rate > 0.0) {
            return bad("sample_rate must be positive and finite");
        }
        if let Some(r) = self.escape_radius {
            if r.is_nan() || r <= 0.0 {
                return bad("escape_radius must be positive");
            }
        }
        Ok(())
    }

    pub fn escape_radius_for(&self, z0: &JetState) -> f64 {
        self.escape_radius.unwrap_or_else(|| default_escape_radius(z0.norm()))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TrajectoryMeta {
    pub params: PuParams,
    pub potential: Potential,
    pub settings: IntegratorSettings,
    pub z0: JetState,
    pub escape_radius: f64,
    /// First time `|z|` reaches the escape radius; integration stops there.
    pub escape_time: Option<f64>,
    /// Largest `|z|` over accepted step endpoints.
    pub max_norm: f64,
    pub h1_drift: f64,
    pub h2_drift: f64,
    pub hint_drift: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub version: String,
}

/// Equidistant samples with `H1`, `H2` and `Hint = H1 + W(q)` along the path.
#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<JetState>,
    pub h1_series: Vec<f64>,
    pub h2_series: Vec<f64>,
    pub hint_series: Vec<f64>,
    pub meta: TrajectoryMeta,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn bounded(&self) -> bool {
        self.meta.escape_time.is_none()
    }

    pub fn ostro_states(&self) -> Vec<OstroState> {
        self.states.iter().map(|z| jet_to_ostro(&self.meta.params, z)).collect()
    }
}

fn max_drift(series: &[f64]) -> f64 {
    series
        .first()
        .map_or(0.0, |&s0| series.iter().fold(0.0, |m, s| m.max((s - s0).abs())))
}

pub(crate) struct RawRun {
    pub times: Vec<f64>,
    pub states: Vec<Vector4<f64>>,
    pub escape_time: Option<f64>,
    pub max_norm: f64,
    pub accepted: usize,
    pub rejected: usize,
}

/// Drives the stepper, sampling the dense output on `k / sample_rate` and
/// stopping at the first crossing of `escape_radius`.
pub(crate) fn propagate(
    f: impl Fn(f64, &Vector4<f64>) -> Vector4<f64>,
    y0: Vector4<f64>,
    norm: impl Fn(&Vector4<f64>) -> f64,
    settings: &IntegratorSettings,
    escape_radius: f64,
) -> Result<RawRun> {
    let mut stepper = Dopri5::new(f, 0.0, y0, settings.t_end, settings.tol, settings.max_steps);
    let dt = 1.0 / settings.sample_rate;
    let mut times = vec![0.0];
    let mut states = vec![y0];
    let mut next = 1usize;
    let mut max_norm = norm(&y0);
    let mut escape_time = None;

    while !stepper.finished() {
        let step = stepper.step()?;
        let end_norm = norm(&step.end());
        max_norm = max_norm.max(end_norm);
        let stop = if end_norm >= escape_radius {
            crossing(&step, &norm, escape_radius)
        } else {
            step.t1()
        };
        loop {
            let t = next as f64 * dt;
            if t > stop || t > settings.t_end {
                break;
            }
            states.push(if t == step.t1() { step.end() } else { step.eval(t) });
            times.push(t);
            next += 1;
        }
        if end_norm >= escape_radius {
            escape_time = Some(stop);
            break;
        }
    }
    Ok(RawRun {
        times,
        states,
        escape_time,
        max_norm,
        accepted: stepper.accepted,
        rejected: stepper.rejected,
    })
}

/// Bisection on the interpolant for `|z(t)| = radius` inside a step.
fn crossing(step: &DenseStep, norm: impl Fn(&Vector4<f64>) -> f64, radius: f64) -> f64 {
    let (mut lo, mut hi) = (step.t0, step.t1());
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if norm(&step.eval(mid)) >= radius {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

fn assemble(
    params: &PuParams,
    potential: &Potential,
    settings: &IntegratorSettings,
    z0: JetState,
    radius: f64,
    raw: RawRun,
) -> Trajectory {
    let (o1, o2) = (h1(params), h2(params));
    let states: Vec<JetState> = raw.states.iter().map(JetState::from_vector).collect();
    let eval = |o: &QuadraticObservable| states.iter().map(|z| o.eval_jet(z)).collect::<Vec<_>>();
    let h1_series = eval(&o1);
    let h2_series = eval(&o2);
    let hint_series: Vec<f64> = h1_series
        .iter()
        .zip(&states)
        .map(|(h, z)| h + potential.value(z.q))
        .collect();
    let meta = TrajectoryMeta {
        params: *params,
        potential: potential.clone(),
        settings: *settings,
        z0,
        escape_radius: radius,
        escape_time: raw.escape_time,
        max_norm: raw.max_norm,
        h1_drift: max_drift(&h1_series),
        h2_drift: max_drift(&h2_series),
        hint_drift: max_drift(&hint_series),
        accepted_steps: raw.accepted,
        rejected_steps: raw.rejected,
        version: VERSION.to_string(),
    };
    Trajectory {
        times: raw.times,
        states,
        h1_series,
        h2_series,
        hint_series,
        meta,
    }
}

/// Integrates the jet-chart flow from `z0`. Escape is recorded, not an error.
pub fn integrate(
    params: &PuParams,
    field: &VectorField,
    z0: JetState,
    settings: &IntegratorSettings,
) -> Result<Trajectory> {
    settings.validate()?;
    if !z0.is_finite() {
        return Err(Error::InvalidArgument("initial state must be finite".into()));
    }
    let radius = settings.escape_radius_for(&z0);
    let raw = propagate(|_, z| field.flow(z), z0.to_vector(), |z| z.norm(), settings, radius)?;
    Ok(assemble(params, &field.potential, settings, z0, radius, raw))
}

/// Integrates Hamilton's equations of `H1 + W` directly in Ostrogradsky
/// coordinates; states are mapped to the jet chart afterwards. The escape
/// test uses the jet norm so both charts stop at the same event.
pub fn integrate_ostrogradsky(
    params: &PuParams,
    potential: &Potential,
    s0: OstroState,
    settings: &IntegratorSettings,
) -> Result<Trajectory> {
    settings.validate()?;
    let d = ostro_jacobian(params);
    let z0 = JetState::from_vector(&(d * s0.to_vector()));
    let radius = settings.escape_radius_for(&z0);
    let mut raw = propagate(
        |_, s| ostrogradsky_flow(params, potential, s),
        s0.to_vector(),
        |s| (d * s).norm(),
        settings,
        radius,
    )?;
    for s in raw.states.iter_mut() {
        *s = d * *s;
    }
    Ok(assemble(params, potential, settings, z0, radius, raw))
}

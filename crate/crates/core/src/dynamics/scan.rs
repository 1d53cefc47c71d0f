use rayon::prelude::*;
use serde::Serialize;

use super::trajectory::{integrate, IntegratorSettings};
use crate::config::{DEFAULT_BISECTION_ITERS, DEFAULT_GRID_POINTS};
use crate::error::{Error, Result};
use crate::model::{interacting_vector_field, JetState, Potential, PuParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunawayVerdict {
    pub bounded: bool,
    pub escape_time: Option<f64>,
    pub max_norm: f64,
    pub escape_radius: f64,
}

/// Integrates to `t_end` (or escape) and classifies the motion.
pub fn runaway_scan(
    params: &PuParams,
    potential: &Potential,
    z0: JetState,
    settings: &IntegratorSettings,
) -> Result<RunawayVerdict> {
    let escape_radius = settings.escape_radius_for(&z0);
    if escape_radius <= z0.norm() {
        return Err(Error::PreconditionViolated(format!(
            "escape radius {escape_radius} does not exceed |z0| = {}",
            z0.norm()
        )));
    }
    let field = interacting_vector_field(params, potential.clone());
    let traj = integrate(params, &field, z0, settings)?;
    Ok(RunawayVerdict {
        bounded: traj.bounded(),
        escape_time: traj.meta.escape_time,
        max_norm: traj.meta.max_norm,
        escape_radius,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridPoint {
    pub lambda: f64,
    #[serde(flatten)]
    pub verdict: RunawayVerdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanOutcome {
    Threshold,
    AllBounded,
    AllUnbounded,
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdReport {
    pub outcome: ScanOutcome,
    pub lambda_star: Option<f64>,
    /// Final bisection bracket `(bounded, unbounded)`.
    pub bracket: Option<(f64, f64)>,
    pub grid: Vec<GridPoint>,
    /// Some grid point above the first escape stays bounded.
    pub non_monotone: bool,
    pub lambda_max: f64,
    pub settings: IntegratorSettings,
    pub z0: JetState,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanOptions {
    pub grid_points: usize,
    pub bisection_iters: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            grid_points: DEFAULT_GRID_POINTS,
            bisection_iters: DEFAULT_BISECTION_ITERS,
        }
    }
}

/// `0` followed by `n - 1` geometric points from `lambda_max * 1e-3` to `lambda_max`.
pub fn lambda_grid(lambda_max: f64, n: usize) -> Vec<f64> {
    if lambda_max == 0.0 || n < 2 {
        return vec![0.0];
    }
    let lo = lambda_max * 1e-3;
    let m = n - 1;
    std::iter::once(0.0)
        .chain((0..m).map(|k| {
            if k + 1 == m {
                lambda_max
            } else {
                lo * (lambda_max / lo).powf(k as f64 / (m - 1).max(1) as f64)
            }
        }))
        .collect()
}

/// Index of the first unbounded grid point, and whether a bounded point follows it.
pub fn first_transition(grid: &[GridPoint]) -> (Option<usize>, bool) {
    let first = grid.iter().position(|g| !g.verdict.bounded);
    (
        first,
        first.is_some_and(|i| grid[i..].iter().any(|g| g.verdict.bounded)),
    )
}

/// Grid classification over `[0, lambda_max]` followed by bisection on the
/// first bounded-to-unbounded transition. Always returns a report; the
/// degenerate outcomes are marked in `outcome`.
pub fn threshold_scan(
    params: &PuParams,
    z0: JetState,
    settings: &IntegratorSettings,
    lambda_max: f64,
    options: ScanOptions,
) -> Result<ThresholdReport> {
    if !(lambda_max.is_finite() && lambda_max >= 0.0) {
        return Err(Error::InvalidArgument(
            "lambda range must be [0, lambda_max] with lambda_max >= 0".into(),
        ));
    }
    settings.validate()?;
    let classify = |lambda: f64| runaway_scan(params, &Potential::quartic(lambda), z0, settings);
    let grid = lambda_grid(lambda_max, options.grid_points)
        .into_par_iter()
        .map(|lambda| classify(lambda).map(|verdict| GridPoint { lambda, verdict }))
        .collect::<Result<Vec<_>>>()?;

    let (first_escape, non_monotone) = first_transition(&grid);
    let mut report = ThresholdReport {
        outcome: ScanOutcome::Threshold,
        lambda_star: None,
        bracket: None,
        grid,
        non_monotone,
        lambda_max,
        settings: *settings,
        z0,
    };
    let i = match first_escape {
        None => {
            report.outcome = ScanOutcome::AllBounded;
            return Ok(report);
        }
        Some(0) => {
            report.outcome = ScanOutcome::AllUnbounded;
            return Ok(report);
        }
        Some(i) => i,
    };
    let (mut lo, mut hi) = (report.grid[i - 1].lambda, report.grid[i].lambda);
    for _ in 0..options.bisection_iters {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if classify(mid)?.bounded {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    report.lambda_star = Some(0.5 * (lo + hi));
    report.bracket = Some((lo, hi));
    Ok(report)
}

/// [`threshold_scan`] with the degenerate outcomes as errors.
pub fn threshold_search(
    params: &PuParams,
    z0: JetState,
    settings: &IntegratorSettings,
    lambda_max: f64,
    options: ScanOptions,
) -> Result<ThresholdReport> {
    let report = threshold_scan(params, z0, settings, lambda_max, options)?;
    match report.outcome {
        ScanOutcome::Threshold => Ok(report),
        ScanOutcome::AllBounded => Err(Error::AllBounded {
            lambda_min: 0.0,
            lambda_max,
        }),
        ScanOutcome::AllUnbounded => Err(Error::AllUnbounded {
            lambda_min: 0.0,
            lambda_max,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_shape() {
        let g = lambda_grid(10.0, 32);
        assert_eq!(g.len(), 32);
        assert_eq!((g[0], g[1], g[31]), (0.0, 0.01, 10.0));
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(lambda_grid(0.0, 32), vec![0.0]);
    }

    #[test]
    fn interleaved_grid_is_flagged() {
        let point = |lambda, bounded| GridPoint {
            lambda,
            verdict: RunawayVerdict {
                bounded,
                escape_time: (!bounded).then_some(1.0),
                max_norm: 0.0,
                escape_radius: 1.0,
            },
        };
        let grid = [
            point(0.0, true),
            point(1.0, true),
            point(2.0, false),
            point(3.0, true),
            point(4.0, false),
        ];
        assert_eq!(first_transition(&grid), (Some(2), true));
        assert_eq!(first_transition(&grid[..3]), (Some(2), false));
        assert_eq!(first_transition(&grid[..2]), (None, false));
    }
}

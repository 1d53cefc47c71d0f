//! Tolerances and defaults shared by every module.

/// Relative tolerance for identities that hold exactly in rational arithmetic.
pub const EPS_ALGEBRA: f64 = 1e-12;

/// Relative determinant gate below which a matrix is treated as singular.
pub const EPS_SINGULAR: f64 = 1e-10;

/// Singular values below `NULL_SPACE_RTOL * sigma_max` count as zero.
pub const NULL_SPACE_RTOL: f64 = 1e-10;

/// Default seed for every random draw (sample points, verification draws).
pub const DEFAULT_SEED: u64 = 20_250_601;

/// Default horizon for threshold scans and Figure-1 style runs.
pub const DEFAULT_T_END: f64 = 200.0;

/// Default integrator tolerance (absolute and relative).
pub const DEFAULT_TOL: f64 = 1e-10;

/// Default number of dense output samples per unit time.
pub const DEFAULT_SAMPLE_RATE: f64 = 10.0;

/// Escape radius multiplier: `R = ESCAPE_RADIUS_FACTOR * max(1, |z0|)`.
pub const ESCAPE_RADIUS_FACTOR: f64 = 1e3;

pub const DEFAULT_GRID_POINTS: usize = 32;
pub const DEFAULT_BISECTION_ITERS: usize = 40;

/// Minimum number of sample points for the interacting invariant-tensor scan.
pub const MIN_INTERACTING_SAMPLES: usize = 10;

/// Fixed initial data of the phase-portrait experiment, Ostrogradsky chart
/// `(x1, x2, p1, p2)`.
pub const FIGURE_INITIAL_OSTRO: [f64; 4] = [0.0, 0.0, 0.5, -0.5];

pub fn default_escape_radius(z0_norm: f64) -> f64 {
    ESCAPE_RADIUS_FACTOR * z0_norm.max(1.0)
}

pub const VERSION: &str = concat!("pu-core ", env!("CARGO_PKG_VERSION"));

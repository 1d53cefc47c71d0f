//! Free and interacting trajectories, normal modes and runaway detection.

mod dopri;
mod export;
mod modes;
mod scan;
mod trajectory;

pub use dopri::{DenseStep, Dopri5};
pub use export::{write_csv, CSV_HEADER};
pub use modes::{mode_decompose, mode_energy, reconstruct, ModeAmplitudes, ModeEnergy};
pub use scan::{
    first_transition, lambda_grid, runaway_scan, threshold_scan, threshold_search, GridPoint, RunawayVerdict,
    ScanOptions, ScanOutcome, ThresholdReport,
};
pub use trajectory::{integrate, integrate_ostrogradsky, IntegratorSettings, Trajectory, TrajectoryMeta};

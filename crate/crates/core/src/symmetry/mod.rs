//! Lie point symmetries of the flow and the Poisson structures it preserves.
//!
//! Symmetries are restricted to linear generators `X = (Xi z) . grad`, for
//! which `[X, V] = 0` reduces to the matrix commutant of the flow matrix.
//! Poisson structures are restricted to constant tensors.

mod generators;
mod structure;

pub use generators::{
    apply_symmetry, commutant_basis, fourth_generator_alt, generated_charge, reference_generators, ChargeReport,
    LinearSymmetry, SymmetryBasis,
};
pub use structure::{
    invariant_tensor_space, lie_derivative_report, lie_derivative_residual, sample_points, solve_bihamiltonian,
    InvariantTensorSpace, LieDerivativeReport,
};

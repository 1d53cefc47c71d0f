//! Parameters, coordinate charts, Hamiltonians, Poisson tensors and vector
//! fields of the fourth-order oscillator.
//!
//! The jet chart `(q, q', q'', q''')` is canonical; the Ostrogradsky chart
//! `(x1, x2, p1, p2)` is reached through [`ostro_jacobian`].

mod field;
mod observable;
mod params;
mod state;
mod tensor;

pub use field::{
    free_vector_field, interacting_vector_field, interaction_sign, ostrogradsky_flow, Potential, VectorField,
    INTERACTION_SIGN,
};
pub use observable::{blend_h, h1, h2, h2_with_sign, poisson_bracket, QuadraticObservable};
pub use params::PuParams;
pub use state::{jet_to_ostro, ostro_jacobian, ostro_to_jet, Chart, JetState, OstroState};
pub use tensor::{blend_j, j1, j2, resolve_second_structure, BlendTensor, PoissonTensor, SecondStructure};

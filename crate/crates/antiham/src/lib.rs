//! Operator-algebra toolkit for comparing three presentations of the same
//! finite-dimensional quantum system: the original system, a doubled system
//! with a hidden two-fold vacuum degeneracy, and a transformed system where
//! the imaginary unit of the observable algebra is replaced by an operator.
//!
//! The crate provides real-linear operator calculus (operators with both a
//! linear and an antilinear part), the doubling and transform constructions,
//! antilinear Hamiltonian term injection, a linear time-reversal operator,
//! and a randomized verification harness that certifies the physical
//! equivalence of the three presentations numerically.

pub mod applications;
pub mod ctransform;
pub mod doubling;
pub mod error;
pub mod harness;
pub mod matrix;
pub mod reallinear;
pub mod system;

#[cfg(test)]
pub(crate) mod testutil;

pub use applications::{
    build_time_reversal, check_generator, check_injection_condition, decode_vector, encode_vector,
    evolve_real_linear, inject_term, injection_condition_violation, realify, AntilinearTerm,
    GeneratorCheck, InjectedSystem, RealMatrix, TimeReversal,
};
pub use ctransform::{SystemCBundle, UTransform};
pub use doubling::DoubledSpace;
pub use error::{Error, Result};
pub use harness::{
    gen_admissible_term, gen_commuting_time_reversal, gen_complex, gen_degenerate_hermitian,
    gen_density, gen_hamiltonian, gen_hermitian, gen_matrix, gen_real_linear, gen_real_symmetric,
    gen_state, gen_system_a, gen_unitary, run_campaign, run_suite, run_suites, trial_rng,
    trial_seed, CampaignConfig, CampaignReport, PropertyReport, Suite,
};
pub use matrix::{exp_hermitian, ComplexMatrix, Vector};
pub use reallinear::{adjoint_pairing, inner_from_real_parts, real_inner, RealLinearOp};
pub use system::{
    measure, DensityMatrix, MeasurementOutcome, QuantumSystem, SpectralDecomposition, SystemLabel,
    DEFAULT_TOL, PROBABILITY_FLOOR,
};

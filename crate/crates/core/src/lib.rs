//! Pseudo-spectral laboratory for P/S mode decoupling in isotropic
//! elastic media with limited-smoothness Lame parameters.
//!
//! The crate provides, on a periodic grid: the spectral substrate
//! ([`grid`], [`field`], [`multiplier`]), Lame parameter families and
//! probe wavefields ([`media`]), the elastic operator and its mode blocks
//! ([`operators`]), the order `-1` conjugation operator that decouples the
//! modes ([`conjugation`]), time evolution including the Volterra
//! reconstruction ([`propagators`]), and sweep/fit machinery that turns
//! the mapping-property claims into measured slopes ([`analysis`]).

pub mod analysis;
pub mod conjugation;
pub mod error;
pub mod field;
pub mod grid;
pub mod media;
pub mod multiplier;
pub mod operators;
pub mod propagators;

pub use error::{Error, Result};

pub use conjugation::{CalibrationReport, ConjugationOperator, SymbolCheck};
pub use field::{curl_2d, curl_3d, gradient, pointwise_multiply, ScalarField, VectorField};
pub use grid::GridSpec;
pub use media::{
    plane_wave_packet, polarization_vector, random_band_limited, BumpSpec, C11Norms, LameField,
    LameReport, MediumFamily, PacketSpec, Polarization, ProbeMode,
};
pub use multiplier::Multiplier;
pub use operators::{
    adjoint_residual, apply_block, apply_elastic, identity_residual_divergence,
    identity_residual_laplacian, project, AdjointPair, Mode, ModeBlock,
};
pub use propagators::{
    cfl_bound, evolve, mode_solve, propagator_component, reference_solve, volterra_solve,
    CauchyData, ForcingSamples, PropagatorKind, Trajectory, VolterraSolution,
};

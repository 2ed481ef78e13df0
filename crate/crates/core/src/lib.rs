//! Simulation of a two-path interferometer whose path qubit is probed through
//! an arm-local spin rotation of arbitrary strength, followed by path
//! post-selection and spin tomography.
//!
//! The crate computes standard and generalized weak values, simulates the
//! measurement chain (exactly, or with binomial shot noise), and reconstructs
//! the pre-selected path state with either a weak-coupling estimator or an
//! exact strong-coupling inversion.

pub mod cli;
pub mod error;
pub mod experiment;
pub mod hilbert;
pub mod par;
pub mod reconstruction;
pub mod tomography;
pub mod tsvf;

pub use error::{Error, Result};
pub use experiment::{couple, post_select, prepare, run, CouplingConfig, ExperimentOutput};
pub use hilbert::{
    apply_operator, inner, path_projector, postselect_projector, tensor, Amplitude, Arm, JointState,
    Operator, PathState, SpinState,
};
pub use par::Execution;
pub use reconstruction::{
    bias_sweep, fidelity, state_from_weak_value, strong_estimate, weak_estimate, BiasRow, Method,
    ReconstructionReport,
};
pub use tomography::{
    bloch_exact, estimate_bloch, rotation_angles, sample, BlochEstimate, BlochVector, RotationAngles,
    ShotRecord,
};
pub use tsvf::{
    generalized_weak_value, modified_projection_weak_value, projection_weak_values, weak_ratio,
    weak_value, TwoStateVector, WeakValue,
};

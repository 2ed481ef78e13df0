//! One pass through the interferometer: spin-polarized preparation, a spin
//! rotation of arbitrary strength localized in one arm, and post-selection of
//! the path onto an output port.

use crate::error::{Error, Result};
use crate::hilbert::{
    apply_operator, c, tensor, Amplitude, Arm, JointState, Matrix2, Operator, PathState, SpinState,
    ZERO_NORM,
};

/// Which arm carries the spin rotation, and by how much (radians).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingConfig {
    pub arm: Arm,
    pub alpha: f64,
}

impl CouplingConfig {
    pub fn new(arm: Arm, alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::Argument(format!("coupling angle must be finite, got {alpha}")));
        }
        Ok(Self { arm, alpha })
    }
}

/// Spin state of the beam leaving the post-selected port.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentOutput {
    pub conditional_spin: SpinState,
    pub success_probability: f64,
    pub unnormalized_spin: (Amplitude, Amplitude),
}

/// Spin rotation `↑x → cos α ↑x − i sin α ↓x`, `↓x → −i sin α ↑x + cos α ↓x`.
pub fn spin_rotation(alpha: f64) -> Matrix2 {
    let (s, co) = alpha.sin_cos();
    [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]
}

/// Unitary acting as [`spin_rotation`] in the configured arm only.
pub fn coupling_operator(cfg: &CouplingConfig) -> Operator {
    Operator::arm_local(cfg.arm, &spin_rotation(cfg.alpha))
}

/// `pi ⊗ |↑x⟩`.
pub fn prepare(pi: &PathState) -> JointState {
    tensor(pi, &SpinState::up_x())
}

pub fn couple(s: &JointState, cfg: &CouplingConfig) -> JointState {
    apply_operator(&coupling_operator(cfg), s)
}

/// Projects the path onto `pf` and returns the conditional spin.
pub fn post_select(s: &JointState, pf: &PathState) -> Result<ExperimentOutput> {
    let mut up = Amplitude::default();
    let mut down = Amplitude::default();
    for arm in [Arm::I, Arm::II] {
        let f = pf.amplitude(arm).conj();
        let (u, d) = s.arm_spin(arm);
        up += f * u;
        down += f * d;
    }
    let p = up.norm_sqr() + down.norm_sqr();
    if p < ZERO_NORM {
        return Err(Error::PostSelectionFailure(p));
    }
    let norm = p.sqrt();
    Ok(ExperimentOutput {
        conditional_spin: SpinState::normalized(up / norm, down / norm)?,
        success_probability: p.min(1.0),
        unnormalized_spin: (up, down),
    })
}

/// `post_select(couple(prepare(pi), cfg), pf)`.
pub fn run(pi: &PathState, cfg: &CouplingConfig, pf: &PathState) -> Result<ExperimentOutput> {
    post_select(&couple(&prepare(pi), cfg), pf)
}

//! Weak values in the two-state-vector picture.
//!
//! The standard weak value of `A` for pre-selection `|ψ⟩` and post-selection
//! `|φ⟩` is `⟨φ|A|ψ⟩ / ⟨φ|ψ⟩`. When only part of the system is post-selected
//! (a projector of rank > 1 on the joint space), the generalized form
//! `⟨Ψ|P A|Ψ⟩ / ⟨Ψ|P|Ψ⟩` applies.

use crate::error::{Error, Result};
use crate::hilbert::{inner, Amplitude, Arm, JointState, Operator, PathState, ONE};

/// Magnitude below which a weak-value denominator counts as vanishing.
pub const DEGENERACY_THRESHOLD: f64 = 1e-12;

/// A (possibly complex, possibly anomalous) weak value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakValue(pub Amplitude);

impl WeakValue {
    pub fn value(&self) -> Amplitude {
        self.0
    }

    pub fn re(&self) -> f64 {
        self.0.re
    }

    pub fn im(&self) -> f64 {
        self.0.im
    }
}

/// Forward-evolving pre-selected state and backward-evolving post-selected state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoStateVector {
    pub pre: JointState,
    pub post: JointState,
}

impl TwoStateVector {
    pub fn new(pre: JointState, post: JointState) -> Self {
        Self { pre, post }
    }

    /// `⟨post|pre⟩`.
    pub fn overlap(&self) -> Amplitude {
        inner(&self.post, &self.pre)
    }
}

fn checked_quotient(num: Amplitude, den: Amplitude, what: &str) -> Result<WeakValue> {
    if den.norm() <= DEGENERACY_THRESHOLD {
        return Err(Error::DegeneratePostSelection(format!(
            "{what} has magnitude {:e}",
            den.norm()
        )));
    }
    Ok(WeakValue(num / den))
}

/// `⟨post|A|pre⟩ / ⟨post|pre⟩`.
pub fn weak_value(tsv: &TwoStateVector, op: &Operator) -> Result<WeakValue> {
    checked_quotient(
        op.matrix_element(&tsv.post, &tsv.pre),
        tsv.overlap(),
        "pre/post overlap",
    )
}

/// `⟨Ψ|P_post A|Ψ⟩ / ⟨Ψ|P_post|Ψ⟩` for a partial post-selection projector `P_post`.
pub fn generalized_weak_value(psi: &JointState, post: &Operator, op: &Operator) -> Result<WeakValue> {
    checked_quotient(
        (*post * *op).matrix_element(psi, psi),
        post.matrix_element(psi, psi),
        "post-selection weight",
    )
}

/// Weak values of the two path projectors for path pre-selection `pi` and
/// path post-selection `pf`: `(f_I* a, f_II* b) / (f_I* a + f_II* b)`.
pub fn projection_weak_values(pi: &PathState, pf: &PathState) -> Result<(WeakValue, WeakValue)> {
    let n_i = pf.a().conj() * pi.a();
    let n_ii = pf.b().conj() * pi.b();
    let den = n_i + n_ii;
    let w_i = checked_quotient(n_i, den, "⟨pf|pi⟩")?;
    Ok((w_i, WeakValue(n_ii / den)))
}

// Arm-II coupling, balanced post-selection:
//   (P_I)_w = a(b* cos α + a*) / [b(a* cos α + b*) + a(b* cos α + a*)]
fn arm_ii_closed_form(pi: &PathState, alpha: f64) -> Result<WeakValue> {
    let (a, b) = (pi.a(), pi.b());
    let cos = alpha.cos();
    let num_i = a * (b.conj() * cos + a.conj());
    let num_ii = b * (a.conj() * cos + b.conj());
    checked_quotient(num_i, num_i + num_ii, "closed-form denominator")
}

/// Weak value of `P_I` when the spin in `arm` is rotated by `alpha` before
/// post-selection onto the balanced path state.
///
/// Coupling in arm I is obtained from the arm-II expression by relabeling the
/// paths: `(P_I)_w = 1 - (P_II)_w` with `(P_II)_w` the arm-II form on `(b, a)`.
pub fn modified_projection_weak_value(pi: &PathState, alpha: f64, arm: Arm) -> Result<WeakValue> {
    match arm {
        Arm::II => arm_ii_closed_form(pi, alpha),
        Arm::I => {
            let w = arm_ii_closed_form(&pi.swapped(), alpha)?;
            Ok(WeakValue(ONE - w.0))
        }
    }
}

/// `(P_I)_w / (P_II)_w` under arm-II coupling:
/// `a(b* cos α + a*) / (b(a* cos α + b*))`. Equals `a/b` only at `α = 0`.
pub fn weak_ratio(pi: &PathState, alpha: f64) -> Result<Amplitude> {
    let (a, b) = (pi.a(), pi.b());
    if b.norm() <= DEGENERACY_THRESHOLD {
        return Err(Error::UndefinedRatio("amplitude b vanishes".into()));
    }
    let cos = alpha.cos();
    let den = b * (a.conj() * cos + b.conj());
    if den.norm() <= DEGENERACY_THRESHOLD {
        return Err(Error::UndefinedRatio(format!(
            "denominator magnitude {:e}",
            den.norm()
        )));
    }
    Ok(a * (b.conj() * cos + a.conj()) / den)
}

//! Path-state characterization from spin tomography of the post-selected beam.
//!
//! Two estimators are provided:
//!
//! * **weak**: read the pointer rotation, divide by `2α` to get `(P_I)_w`,
//!   and invert `w = a/(a+b)`. Valid only as `α → 0`; at finite coupling it
//!   carries an `O(α²)` bias because the measured quantity is then the
//!   generalized weak value of the disturbed state, not `a/(a+b)`.
//! * **strong**: invert the full coupling map exactly from the Bloch vector
//!   and the post-selection probability. Unbiased for any `α` with
//!   `sin α ≠ 0`.
//!
//! [`bias_sweep`] tabulates the finite-coupling ratio against `a/b`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiment::{run, CouplingConfig, ExperimentOutput};
use crate::hilbert::{Amplitude, Arm, PathState, ONE};
use crate::par::{self, Execution};
use crate::tomography::{bloch_exact, measure, rotation_angles, BlochVector, RotationAngles, ShotRecord};
use crate::tsvf::{modified_projection_weak_value, projection_weak_values, weak_ratio, WeakValue};

const ALPHA_MIN: f64 = 1e-12;
const SIN_MIN: f64 = 1e-9;
const P_MIN: f64 = 1e-12;
const W_EDGE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Weak,
    Strong,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "weak" => Ok(Method::Weak),
            "strong" => Ok(Method::Strong),
            other => Err(Error::Argument(format!("unknown method {other:?}, expected weak or strong"))),
        }
    }
}

/// What the estimator was fed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TomographyDigest {
    pub bloch: BlochVector,
    pub success_probability: f64,
    pub shots: Option<u64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionReport {
    pub estimated: PathState,
    pub method: Method,
    pub alpha: f64,
    pub fidelity_vs_truth: Option<f64>,
    pub inputs_digest: TomographyDigest,
    /// Shot records, present when tomography was sampled.
    pub records: Option<[ShotRecord; 3]>,
}

/// One row of the finite-coupling bias table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasRow {
    pub alpha: f64,
    pub measured_ratio: Amplitude,
    pub true_ratio: Amplitude,
    /// `|measured_ratio − true_ratio|`.
    pub abs_deviation: f64,
    /// `|(P_I)_w(α) − a/(a+b)|` for arm-II coupling.
    pub weak_value_deviation: f64,
}

/// `ŵ = (θ_xy + i θ_xz) / 2α`: the weak value of the projector on the coupled arm.
pub fn weak_estimate(angles: &RotationAngles, alpha: f64) -> Result<WeakValue> {
    if !alpha.is_finite() || alpha.abs() <= ALPHA_MIN {
        return Err(Error::Argument(format!("weak estimate needs nonzero coupling, got alpha = {alpha}")));
    }
    Ok(WeakValue(Amplitude::new(angles.theta_xy, angles.theta_xz) / (2.0 * alpha)))
}

/// Inverts `w = a/(a+b)` (balanced post-selection) into a canonical path state.
pub fn state_from_weak_value(w: &WeakValue) -> Result<PathState> {
    state_from_weak_value_with(w, &PathState::symmetric())
}

/// Inverts `w = f_I* a / (f_I* a + f_II* b)` for post-selection `pf = (f_I, f_II)`.
pub fn state_from_weak_value_with(w: &WeakValue, pf: &PathState) -> Result<PathState> {
    let w = w.value();
    if !(w.re.is_finite() && w.im.is_finite()) {
        return Err(Error::Argument("non-finite weak value".into()));
    }
    if w.norm() <= W_EDGE {
        return Ok(PathState::basis(Arm::II));
    }
    if (w - ONE).norm() <= W_EDGE {
        return Ok(PathState::basis(Arm::I));
    }
    let (fa, fb) = (pf.a().conj(), pf.b().conj());
    if fa.norm() <= W_EDGE || fb.norm() <= W_EDGE {
        return Err(Error::Argument("post-selection state must overlap both arms".into()));
    }
    Ok(PathState::new(w / fa, (ONE - w) / fb)?.canonical())
}

/// Unnormalized post-selected spin `(u, d)` recovered from its Bloch vector
/// and norm `p`, with `u` real and non-negative (or `d`, if `u` vanishes).
fn spin_from_bloch(b: &BlochVector, p: f64) -> (Amplitude, Amplitude) {
    let uu = p * (1.0 + b.sx) / 2.0;
    let dd = p * (1.0 - b.sx) / 2.0;
    let ud = Amplitude::new(b.sz, -b.sy) * (p / 2.0);
    if uu >= 1e-12 {
        let u = uu.sqrt();
        (Amplitude::new(u, 0.0), ud / u)
    } else {
        let d = dd.max(0.0).sqrt();
        (ud.conj() / d, Amplitude::new(d, 0.0))
    }
}

/// Exact inversion of the coupling map for balanced post-selection.
pub fn strong_estimate(b: &BlochVector, p: f64, alpha: f64, arm: Arm) -> Result<PathState> {
    strong_estimate_with(b, p, alpha, arm, &PathState::symmetric())
}

/// Exact inversion of the coupling map for an arbitrary post-selection state.
///
/// With `k` the coupled arm and `k'` the other, the post-selected spin is
/// `u = f_k'* x_k' + f_k* x_k cos α`, `d = −i f_k* x_k sin α`.
pub fn strong_estimate_with(b: &BlochVector, p: f64, alpha: f64, arm: Arm, pf: &PathState) -> Result<PathState> {
    let sin = alpha.sin();
    if !alpha.is_finite() || sin.abs() <= SIN_MIN {
        return Err(Error::NonInvertibleCoupling(sin.abs()));
    }
    if !p.is_finite() || p <= P_MIN {
        return Err(Error::DegeneratePostSelection(format!("success probability {p:e}")));
    }
    if p > 1.0 + 1e-9 {
        return Err(Error::Argument(format!("success probability {p} exceeds 1")));
    }
    if ![b.sx, b.sy, b.sz].iter().all(|s| s.is_finite() && s.abs() <= 1.0 + 1e-9) {
        return Err(Error::Argument("Bloch components must lie in [-1, 1]".into()));
    }
    let f_k = pf.amplitude(arm).conj();
    let f_other = pf.amplitude(arm.other()).conj();
    if f_k.norm() <= W_EDGE || f_other.norm() <= W_EDGE {
        return Err(Error::Argument("post-selection state must overlap both arms".into()));
    }
    let (u, d) = spin_from_bloch(b, p);
    let x_k = Amplitude::new(0.0, 1.0) * d / (f_k * sin);
    let x_other = (u - f_k * x_k * alpha.cos()) / f_other;
    let est = match arm {
        Arm::I => PathState::new(x_k, x_other)?,
        Arm::II => PathState::new(x_other, x_k)?,
    };
    Ok(est.canonical())
}

/// `|⟨p|q⟩|²`.
pub fn fidelity(p: &PathState, q: &PathState) -> f64 {
    p.inner(q).norm_sqr().min(1.0)
}

/// Finite-coupling weak-value ratio against the true amplitude ratio, one row
/// per `alpha`, in input order.
pub fn bias_sweep(pi: &PathState, alphas: &[f64]) -> Result<Vec<BiasRow>> {
    bias_sweep_with(pi, alphas, Execution::default())
}

pub fn bias_sweep_with(pi: &PathState, alphas: &[f64], exec: Execution) -> Result<Vec<BiasRow>> {
    if pi.b().norm() <= W_EDGE {
        return Err(Error::UndefinedRatio("amplitude b vanishes".into()));
    }
    let true_ratio = pi.a() / pi.b();
    let (w0, _) = projection_weak_values(pi, &PathState::symmetric())?;
    par::map(alphas, exec, |&alpha| {
        let measured_ratio = weak_ratio(pi, alpha)?;
        let w = modified_projection_weak_value(pi, alpha, Arm::II)?;
        Ok(BiasRow {
            alpha,
            measured_ratio,
            true_ratio,
            abs_deviation: (measured_ratio - true_ratio).norm(),
            weak_value_deviation: (w.value() - w0.value()).norm(),
        })
    })
    .into_iter()
    .collect()
}

/// Simulates the interferometer for `truth`, performs tomography (exact, or
/// sampled when `shots = Some((n, seed))`) and applies `method`.
pub fn reconstruct(
    truth: &PathState,
    method: Method,
    cfg: &CouplingConfig,
    pf: &PathState,
    shots: Option<(u64, u64)>,
) -> Result<ReconstructionReport> {
    // Validate the coupling before simulating so the error names the real cause.
    match method {
        Method::Weak if cfg.alpha.abs() <= ALPHA_MIN => {
            return Err(Error::Argument("weak reconstruction needs nonzero coupling".into()))
        }
        Method::Strong if cfg.alpha.sin().abs() <= SIN_MIN => {
            return Err(Error::NonInvertibleCoupling(cfg.alpha.sin().abs()))
        }
        _ => {}
    }
    let out: ExperimentOutput = run(truth, cfg, pf)?;
    let (bloch, records) = match shots {
        None => (bloch_exact(&out.conditional_spin), None),
        Some((n, seed)) => {
            let (records, est) = measure(&out.conditional_spin, n, seed)?;
            (est.value, Some(records))
        }
    };
    let estimated = match method {
        Method::Weak => {
            let w_arm = weak_estimate(&rotation_angles(&bloch)?, cfg.alpha)?;
            let w_i = match cfg.arm {
                Arm::I => w_arm,
                Arm::II => WeakValue(ONE - w_arm.value()),
            };
            state_from_weak_value_with(&w_i, pf)?
        }
        Method::Strong => strong_estimate_with(&bloch, out.success_probability, cfg.alpha, cfg.arm, pf)?,
    };
    Ok(ReconstructionReport {
        estimated,
        method,
        alpha: cfg.alpha,
        fidelity_vs_truth: Some(fidelity(&estimated, truth)),
        inputs_digest: TomographyDigest {
            bloch,
            success_probability: out.success_probability,
            shots: shots.map(|(n, _)| n),
            seed: shots.map(|(_, s)| s),
        },
        records,
    })
}

/// [`reconstruct`] over many truth states with exact tomography.
pub fn reconstruct_batch(
    truths: &[PathState],
    method: Method,
    cfg: &CouplingConfig,
    pf: &PathState,
    exec: Execution,
) -> Vec<Result<ReconstructionReport>> {
    par::map(truths, exec, |truth| reconstruct(truth, method, cfg, pf, None))
}

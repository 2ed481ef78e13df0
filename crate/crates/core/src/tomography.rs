//! Spin tomography of the post-selected beam.
//!
//! Exact expectation values, a binomial shot-noise model with seeded
//! reproducible sampling, linear-inversion Bloch estimates and extraction of
//! the pointer rotation angles.

use std::f64::consts::PI;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{SpinState, NORM_TOL};
use crate::par::{self, Execution};

/// Spin expectation values `(⟨σx⟩, ⟨σy⟩, ⟨σz⟩)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub sx: f64,
    pub sy: f64,
    pub sz: f64,
}

impl BlochVector {
    /// Validated constructor: components in `[-1, 1]`, length at most one.
    pub fn new(sx: f64, sy: f64, sz: f64) -> Result<Self> {
        let v = Self { sx, sy, sz };
        if ![sx, sy, sz].iter().all(|s| s.is_finite()) {
            return Err(Error::Argument("non-finite Bloch component".into()));
        }
        if v.norm() > 1.0 + NORM_TOL {
            return Err(Error::Argument(format!("Bloch vector length {} exceeds 1", v.norm())));
        }
        Ok(v)
    }

    pub fn norm(&self) -> f64 {
        (self.sx * self.sx + self.sy * self.sy + self.sz * self.sz).sqrt()
    }

    pub fn component(&self, basis: Basis) -> f64 {
        match basis {
            Basis::X => self.sx,
            Basis::Y => self.sy,
            Basis::Z => self.sz,
        }
    }
}

/// Measurement axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    X,
    Y,
    Z,
}

impl Basis {
    pub const ALL: [Basis; 3] = [Basis::X, Basis::Y, Basis::Z];

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Basis::X => "x",
            Basis::Y => "y",
            Basis::Z => "z",
        })
    }
}

/// Aggregate counts for one measurement basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotRecord {
    pub basis: Basis,
    pub shots: u64,
    pub plus_count: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochEstimate {
    /// Linear-inversion estimate. Components are clipped to `[-1, 1]` but the
    /// vector as a whole may fall slightly outside the unit ball.
    pub value: BlochVector,
    pub stderr: [f64; 3],
}

/// Direction of the Bloch projection in the xy and xz planes, from +x.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationAngles {
    pub theta_xy: f64,
    pub theta_xz: f64,
}

/// Exact Bloch vector of a spin state in the x basis:
/// `sx = |u|² − |d|²`, `sy = −2 Im(u* d)`, `sz = 2 Re(u* d)`.
pub fn bloch_exact(s: &SpinState) -> BlochVector {
    let (u, d) = (s.up(), s.down());
    let n = s.norm_sqr();
    let ud = u.conj() * d;
    BlochVector {
        sx: ((u.norm_sqr() - d.norm_sqr()) / n).clamp(-1.0, 1.0),
        sy: (-2.0 * ud.im / n).clamp(-1.0, 1.0),
        sz: (2.0 * ud.re / n).clamp(-1.0, 1.0),
    }
}

/// Draws `plus_count ~ Binomial(shots, (1 + s_basis)/2)` from a ChaCha8
/// stream seeded with `seed`.
pub fn sample(s: &SpinState, basis: Basis, shots: u64, seed: u64) -> Result<ShotRecord> {
    if shots == 0 {
        return Err(Error::Argument("shots must be at least 1".into()));
    }
    let p_plus = ((1.0 + bloch_exact(s).component(basis)) / 2.0).clamp(0.0, 1.0);
    let dist = Binomial::new(shots, p_plus).map_err(|e| Error::Argument(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(ShotRecord { basis, shots, plus_count: dist.sample(&mut rng), seed })
}

/// Samples all three bases, using `seed`, `seed + 1` and `seed + 2`.
pub fn tomograph(s: &SpinState, shots: u64, seed: u64) -> Result<[ShotRecord; 3]> {
    Ok([
        sample(s, Basis::X, shots, seed)?,
        sample(s, Basis::Y, shots, seed.wrapping_add(1))?,
        sample(s, Basis::Z, shots, seed.wrapping_add(2))?,
    ])
}

/// Linear inversion: `ŝ = 2k/n − 1`, `stderr = √((1 − ŝ²)/n)`.
pub fn estimate_bloch(rx: &ShotRecord, ry: &ShotRecord, rz: &ShotRecord) -> Result<BlochEstimate> {
    let mut slots: [Option<&ShotRecord>; 3] = [None; 3];
    for r in [rx, ry, rz] {
        if r.shots == 0 || r.plus_count > r.shots {
            return Err(Error::Argument(format!(
                "invalid record: {} of {} shots",
                r.plus_count, r.shots
            )));
        }
        let slot = &mut slots[r.basis.index()];
        if slot.is_some() {
            return Err(Error::Argument(format!("duplicate basis {}", r.basis)));
        }
        *slot = Some(r);
    }
    let mut value = [0.0; 3];
    let mut stderr = [0.0; 3];
    for (k, r) in slots.iter().enumerate() {
        // All three slots are filled: three records, no duplicates.
        let r = r.expect("basis slot");
        let n = r.shots as f64;
        let s = (2.0 * r.plus_count as f64 / n - 1.0).clamp(-1.0, 1.0);
        value[k] = s;
        stderr[k] = ((1.0 - s * s).max(0.0) / n).sqrt();
    }
    Ok(BlochEstimate {
        value: BlochVector { sx: value[0], sy: value[1], sz: value[2] },
        stderr,
    })
}

/// Shot-noise tomography of `s` followed by linear inversion.
pub fn measure(s: &SpinState, shots: u64, seed: u64) -> Result<([ShotRecord; 3], BlochEstimate)> {
    let records = tomograph(s, shots, seed)?;
    let est = estimate_bloch(&records[0], &records[1], &records[2])?;
    Ok((records, est))
}

/// Independent repetitions of [`measure`]. Repetition `k` uses base seed
/// `first_seed + 3k`, so no two repetitions share a basis stream.
pub fn estimate_ensemble(
    s: &SpinState,
    shots: u64,
    first_seed: u64,
    repetitions: u64,
    exec: Execution,
) -> Result<Vec<BlochEstimate>> {
    par::map_range(0..repetitions, exec, |k| {
        measure(s, shots, first_seed.wrapping_add(3 * k)).map(|(_, e)| e)
    })
    .into_iter()
    .collect()
}

// atan2 returns values in [-π, π]; fold -π onto π.
fn half_open_angle(theta: f64) -> f64 {
    if theta <= -PI {
        PI
    } else {
        theta
    }
}

/// `theta_xy = atan2(sy, sx)`, `theta_xz = atan2(sz, sx)`.
///
/// A plane in which the projection vanishes reports angle 0; it is an error
/// only when both projections vanish.
pub fn rotation_angles(b: &BlochVector) -> Result<RotationAngles> {
    const TOL: f64 = 1e-12;
    if b.sx.hypot(b.sy) < TOL && b.sx.hypot(b.sz) < TOL {
        return Err(Error::DegenerateAngle("xy and xz projections both vanish".into()));
    }
    Ok(RotationAngles {
        theta_xy: half_open_angle(b.sy.atan2(b.sx)),
        theta_xz: half_open_angle(b.sz.atan2(b.sx)),
    })
}

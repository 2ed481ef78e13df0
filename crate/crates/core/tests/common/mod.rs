#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use wvsim::hilbert::{c, Amplitude, JointState, PathState, SpinState};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_amplitude(rng: &mut ChaCha8Rng) -> Amplitude {
    c(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random path state.
pub fn haar_path(rng: &mut ChaCha8Rng) -> PathState {
    loop {
        if let Ok(p) = PathState::new(gaussian_amplitude(rng), gaussian_amplitude(rng)) {
            return p;
        }
    }
}

/// Haar-random path state with `|⟨(1,1)/√2|pi⟩|² >= min_overlap`.
pub fn haar_path_overlapping(rng: &mut ChaCha8Rng, min_overlap: f64) -> PathState {
    loop {
        let p = haar_path(rng);
        if PathState::symmetric().inner(&p).norm_sqr() >= min_overlap {
            return p;
        }
    }
}

pub fn haar_spin(rng: &mut ChaCha8Rng) -> SpinState {
    loop {
        if let Ok(s) = SpinState::normalized(gaussian_amplitude(rng), gaussian_amplitude(rng)) {
            return s;
        }
    }
}

pub fn haar_joint(rng: &mut ChaCha8Rng) -> JointState {
    let mut a = [Amplitude::default(); 4];
    a.iter_mut().for_each(|z| *z = gaussian_amplitude(rng));
    let n = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    a.iter_mut().for_each(|z| *z /= n);
    JointState::new(a).unwrap()
}

/// |Ψ′⟩ written out amplitude by amplitude: spin rotated by `alpha` in arm II.
pub fn psi_prime_arm_ii(pi: &PathState, alpha: f64) -> JointState {
    JointState::new([
        pi.a(),
        Amplitude::default(),
        pi.b() * alpha.cos(),
        c(0.0, -1.0) * pi.b() * alpha.sin(),
    ])
    .unwrap()
}

/// Same with the rotation in arm I.
pub fn psi_prime_arm_i(pi: &PathState, alpha: f64) -> JointState {
    JointState::new([
        pi.a() * alpha.cos(),
        c(0.0, -1.0) * pi.a() * alpha.sin(),
        pi.b(),
        Amplitude::default(),
    ])
    .unwrap()
}

/// Least-squares slope of `ys` against `xs`.
pub fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

mod common;

use proptest::prelude::*;
use wvsim::experiment::{couple, prepare, run, CouplingConfig};
use wvsim::hilbert::{c, inner, path_projector, postselect_projector, tensor, Amplitude, Arm, PathState, SpinState};
use wvsim::par::Execution;
use wvsim::reconstruction::{bias_sweep, bias_sweep_with, fidelity, reconstruct, state_from_weak_value, Method};
use wvsim::tomography::bloch_exact;
use wvsim::tsvf::{generalized_weak_value, modified_projection_weak_value, projection_weak_values, weak_ratio};

fn amp() -> impl Strategy<Value = Amplitude> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| c(re, im))
}

fn path_state() -> impl Strategy<Value = PathState> {
    (amp(), amp())
        .prop_filter("nonzero", |(a, b)| a.norm_sqr() + b.norm_sqr() > 1e-3)
        .prop_map(|(a, b)| PathState::new(a, b).unwrap())
}

/// Path states with post-selection probability on the balanced port ≥ `min`.
fn overlapping(min: f64) -> impl Strategy<Value = PathState> {
    path_state().prop_filter("overlap with balanced port", move |p| {
        PathState::symmetric().inner(p).norm_sqr() >= min
    })
}

fn spin_state() -> impl Strategy<Value = SpinState> {
    (amp(), amp())
        .prop_filter("nonzero", |(u, d)| u.norm_sqr() + d.norm_sqr() > 1e-3)
        .prop_map(|(u, d)| SpinState::normalized(u, d).unwrap())
}

fn arm() -> impl Strategy<Value = Arm> {
    prop_oneof![Just(Arm::I), Just(Arm::II)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn tensor_respects_norms(p in path_state(), s in spin_state()) {
        let j = tensor(&p, &s);
        prop_assert!((j.norm_sqr() - 1.0).abs() < 1e-12);
        prop_assert!((inner(&j, &j).im).abs() < 1e-15);
    }

    #[test]
    fn postselect_projector_is_projector(p in path_state()) {
        prop_assert!(postselect_projector(&p).is_projector(1e-12));
    }

    #[test]
    fn coupling_preserves_norm_and_composes(p in path_state(), a1 in -7.0f64..7.0, a2 in -7.0f64..7.0, arm in arm()) {
        let s = prepare(&p);
        let once = couple(&couple(&s, &CouplingConfig { arm, alpha: a1 }), &CouplingConfig { arm, alpha: a2 });
        let direct = couple(&s, &CouplingConfig { arm, alpha: a1 + a2 });
        prop_assert!((once.norm_sqr() - 1.0).abs() < 1e-12);
        for (x, y) in once.amplitudes().iter().zip(direct.amplitudes()) {
            prop_assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn success_probability_in_unit_interval(p in overlapping(1e-6), f in path_state(), alpha in -4.0f64..4.0, arm in arm()) {
        if let Ok(out) = run(&p, &CouplingConfig { arm, alpha }, &f) {
            prop_assert!((0.0..=1.0).contains(&out.success_probability));
            let (u, d) = out.unnormalized_spin;
            prop_assert!((u.norm_sqr() + d.norm_sqr() - out.success_probability).abs() < 1e-12);
        }
    }

    #[test]
    fn bloch_vector_is_pure(s in spin_state()) {
        prop_assert!((bloch_exact(&s).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn generalized_sum_rule(p in overlapping(0.05), alpha in 0.0f64..3.0, arm in arm()) {
        let psi = couple(&prepare(&p), &CouplingConfig { arm, alpha });
        let post = postselect_projector(&PathState::symmetric());
        if post.matrix_element(&psi, &psi).re > 0.05 {
            let s = generalized_weak_value(&psi, &post, &path_projector(Arm::I)).unwrap().value()
                + generalized_weak_value(&psi, &post, &path_projector(Arm::II)).unwrap().value();
            prop_assert!((s - c(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn closed_form_matches_pipeline_state(p in overlapping(0.05), alpha in 0.0f64..3.0, arm in arm()) {
        let psi = couple(&prepare(&p), &CouplingConfig { arm, alpha });
        let post = postselect_projector(&PathState::symmetric());
        if post.matrix_element(&psi, &psi).re > 0.05 {
            let full = generalized_weak_value(&psi, &post, &path_projector(Arm::I)).unwrap();
            let closed = modified_projection_weak_value(&p, alpha, arm).unwrap();
            prop_assert!((full.value() - closed.value()).norm() < 1e-12);
        }
    }

    #[test]
    fn bias_is_quadratic_in_alpha(p in overlapping(0.2)) {
        let (w0, _) = projection_weak_values(&p, &PathState::symmetric()).unwrap();
        let dev = |alpha: f64| (modified_projection_weak_value(&p, alpha, Arm::II).unwrap().value() - w0.value()).norm();
        let (d1, d2) = (dev(1e-2), dev(5e-3));
        // The α² coefficient is proportional to a b* − 2 Re(a b*) |a|², zero e.g. for a = b.
        if d1 > 1e-9 {
            prop_assert!(((d1 / d2) - 4.0).abs() < 0.2, "ratio {}", d1 / d2);
        }
    }

    #[test]
    fn weak_ratio_converges_to_amplitude_ratio(p in overlapping(0.1)) {
        prop_assume!(p.b().norm() > 0.1);
        let r = weak_ratio(&p, 1e-4).unwrap();
        prop_assert!((r - p.a() / p.b()).norm() < 1e-6 * (1.0 + (p.a() / p.b()).norm()).powi(3));
    }

    #[test]
    fn state_from_weak_value_inverts_projection(p in overlapping(1e-4)) {
        let (w, _) = projection_weak_values(&p, &PathState::symmetric()).unwrap();
        let back = state_from_weak_value(&w).unwrap();
        prop_assert!((fidelity(&back, &p) - 1.0).abs() < 1e-12);
        prop_assert!(back.a().im == 0.0 && back.a().re >= 0.0);
    }

    #[test]
    fn fidelity_is_phase_invariant(p in path_state(), q in path_state(), phi in -7.0f64..7.0) {
        let z = Amplitude::from_polar(1.0, phi);
        let q2 = PathState::new(q.a() * z, q.b() * z).unwrap();
        prop_assert!((fidelity(&p, &q) - fidelity(&p, &q2)).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&fidelity(&p, &q)));
    }

    #[test]
    fn weak_round_trip_bias_is_quadratic(p in overlapping(0.1), alpha in 1e-3f64..0.1, arm in arm()) {
        let cfg = CouplingConfig { arm, alpha };
        let rep = reconstruct(&p, Method::Weak, &cfg, &PathState::symmetric(), None).unwrap();
        prop_assert!(rep.fidelity_vs_truth.unwrap() >= 1.0 - 1.0 * alpha * alpha);
    }

    #[test]
    fn strong_round_trip_is_exact(p in overlapping(1e-3), alpha in 0.1f64..3.04, arm in arm()) {
        let cfg = CouplingConfig { arm, alpha };
        if let Ok(rep) = reconstruct(&p, Method::Strong, &cfg, &PathState::symmetric(), None) {
            prop_assert!(rep.fidelity_vs_truth.unwrap() >= 1.0 - 1e-10);
        }
    }

    #[test]
    fn weak_limit_conditional_spin(p in overlapping(0.1), arm in arm()) {
        // |↑x⟩ − iα (P_arm)_w |↓x⟩ up to normalization and O(α²).
        let alpha = 1e-4;
        let (wi, wii) = projection_weak_values(&p, &PathState::symmetric()).unwrap();
        let w = if arm == Arm::I { wi } else { wii };
        let out = run(&p, &CouplingConfig { arm, alpha }, &PathState::symmetric()).unwrap();
        let s = out.conditional_spin;
        let ratio = s.down() / s.up();
        prop_assert!((ratio - c(0.0, -alpha) * w.value()).norm() < 100.0 * alpha * alpha);
    }

    #[test]
    fn central_claim_deviation_positive_and_monotone(a in 0.05f64..0.95, phase in -3.0f64..3.0) {
        let b = Amplitude::from_polar((1.0 - a * a).sqrt(), phase);
        let p = PathState::new(c(a, 0.0), b).unwrap();
        prop_assume!((p.a() - p.b()).norm() > 1e-2);
        prop_assume!(PathState::symmetric().inner(&p).norm_sqr() > 0.05);
        let alphas: Vec<f64> = (1..=40).map(|k| k as f64 * std::f64::consts::FRAC_PI_2 / 40.0).collect();
        let rows = bias_sweep(&p, &alphas).unwrap();
        // dev(α) = |a/b| |a − b| (1 − cos α) / |b* + a* cos α| is increasing on
        // (0, π/2] iff |b|² + Re(a b*) > 0 (the condition is linear in cos α and
        // always holds at cos α = 1).
        let monotone = p.b().norm_sqr() + (p.a() * p.b().conj()).re > 1e-9;
        prop_assert!(rows.iter().all(|r| r.abs_deviation > 0.0));
        if monotone {
            for w in rows.windows(2) {
                prop_assert!(w[0].abs_deviation < w[1].abs_deviation);
            }
        }
    }

    #[test]
    fn sweep_is_execution_independent(p in overlapping(0.1)) {
        prop_assume!(p.b().norm() > 1e-3);
        let alphas: Vec<f64> = (0..64).map(|k| 0.01 + k as f64 * 0.02).collect();
        let seq = bias_sweep_with(&p, &alphas, Execution::Sequential).unwrap();
        let par = bias_sweep_with(&p, &alphas, Execution::Parallel).unwrap();
        prop_assert_eq!(seq, par);
    }
}

#[test]
fn deviation_need_not_be_monotone_far_from_the_weak_limit() {
    // |b|² + Re(a b*) < 0: the deviation peaks before α = π/2. It still vanishes
    // only at α = 0.
    let p = PathState::new(c(0.9, 0.0), c(-(1.0f64 - 0.81).sqrt(), 0.0)).unwrap();
    let alphas: Vec<f64> = (1..=100).map(|k| k as f64 * std::f64::consts::FRAC_PI_2 / 100.0).collect();
    let rows = bias_sweep(&p, &alphas).unwrap();
    assert!(rows.iter().all(|r| r.abs_deviation > 0.0));
    assert!(rows.windows(2).any(|w| w[1].abs_deviation < w[0].abs_deviation));
    assert!(rows.windows(2).take(10).all(|w| w[0].abs_deviation < w[1].abs_deviation));
}

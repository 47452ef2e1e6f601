//! Cross-checks between the numerical pictures and the closed forms.

use lzsm::analytic::caley_klein_finite;
use lzsm::integrate::{evolve_tdse, propagate_bloch, propagate_tdse, BlochVector, IntegratorSettings, SpinState};
use lzsm::model::DriveConfig;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_4, PI};

fn random_config(rng: &mut ChaCha8Rng) -> DriveConfig {
    DriveConfig {
        delta: rng.gen_range(0.0..0.4),
        eps0: rng.gen_range(-2.0..2.0),
        amp_rf: rng.gen_range(0.0..4.0),
        freq_rf: rng.gen_range(0.5..4.0),
        amp_mw: rng.gen_range(0.0..0.4),
        freq_mw: rng.gen_range(0.5..4.0),
        phase: rng.gen_range(0.0..2.0 * PI),
        ..DriveConfig::default()
    }
}

#[test]
fn schrodinger_and_bloch_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let cfg = random_config(&mut rng);
        let a = propagate_tdse(&cfg, SpinState::up(), -15.0, 15.0, 1e-10, 0.5).unwrap();
        let b = propagate_bloch(&cfg, BlochVector::north(), -15.0, 15.0, 1e-10, 0.5).unwrap();
        assert_eq!(a.len(), b.len());
        for ((ta, s), (tb, u)) in a.samples.iter().zip(&b.samples) {
            assert_eq!(ta, tb);
            assert!(s.to_bloch().distance(u) < 1e-8);
        }
    }
}

#[test]
fn halving_the_tolerance_is_converged() {
    let configs = [
        DriveConfig { delta: 0.07, ..DriveConfig::default() },
        DriveConfig { delta: 0.2, amp_rf: 100.0, freq_rf: 100.0, amp_mw: 0.08, freq_mw: 200.0, ..DriveConfig::default() },
        DriveConfig { delta: 0.07, eps0: -1.5, amp_rf: 1.0, freq_rf: 50.0, amp_mw: 0.08, freq_mw: 1.0, phase: 2.0, ..DriveConfig::default() },
        DriveConfig { delta: 0.07, eps0: 0.5, amp_rf: 25.0, freq_rf: 1.0, amp_mw: 0.08, freq_mw: 1.0, ..DriveConfig::default() },
    ];
    for cfg in configs {
        let run = |tol| evolve_tdse(&cfg, SpinState::up(), -50.0, 50.0, IntegratorSettings::from_tol(tol).unwrap()).unwrap();
        let (a, b) = (run(1e-10), run(5e-11));
        assert!((a.c_up.norm_sqr() - b.c_up.norm_sqr()).abs() <= 1e-6);
    }
}

#[test]
fn backward_evolution_returns_the_initial_state() {
    let cfg = DriveConfig { delta: 0.3, amp_rf: 2.0, freq_rf: 1.5, ..DriveConfig::default() };
    let s = IntegratorSettings::from_tol(1e-11).unwrap();
    let fwd = evolve_tdse(&cfg, SpinState::up(), -10.0, 10.0, s).unwrap();
    let back = evolve_tdse(&cfg, fwd, 10.0, -10.0, s).unwrap();
    assert!((back.c_up - Complex64::new(1.0, 0.0)).norm() < 1e-8);
    assert!(back.c_dn.norm() < 1e-8);
}

#[test]
fn finite_caley_klein_matches_a_bare_passage() {
    // Bare passage (no drives), rotating frame: the up-up amplitude equals `a`.
    let delta: f64 = 0.1;
    let cfg = DriveConfig { delta: 2.0 * delta.sqrt(), ..DriveConfig::default() };
    let (ti, tf) = (-10.0, 10.0);
    let end = evolve_tdse(&cfg, SpinState::up(), ti, tf, IntegratorSettings::from_tol(1e-12).unwrap()).unwrap();
    let rot = Complex64::from_polar(1.0, -FRAC_PI_4);
    let ck = caley_klein_finite(delta, rot * ti, rot * tf).unwrap();
    assert!((ck.a.norm_sqr() - end.c_up.norm_sqr()).abs() < 1e-6);
}

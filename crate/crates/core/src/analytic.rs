//! Closed-form transition probabilities.
//!
//! * Strong drive: at multiphoton resonance the problem reduces to a single
//!   Landau-Zener passage with the modified parameter `delta`.
//! * Weak drive: the three microwave sub-crossings of the `n = 0` passage are
//!   composed as a product of SU(2) transfer matrices.
//! * Finite-time Caley-Klein parameters from parabolic cylinder functions.
//! * Two zero-sweep special cases (Rabi and inverse Landau-Zener).

use crate::error::{Error, Result};
use crate::model::{Alpha, DriveConfig, HarmonicIndex, Harmonics};
use crate::specfun::{log_gamma, stokes_phase, weber_d};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

/// Tolerance on `-(eps0 + alpha omega_f) / omega` being an integer.
pub const RESONANCE_TOL: f64 = 1.0e-6;
/// Tolerance used by the special-case precondition checks.
const SPECIAL_CASE_TOL: f64 = 1.0e-12;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// SU(2) pair with `U = [[a, b], [-b*, a*]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaleyKlein {
    pub a: Complex64,
    pub b: Complex64,
}

impl CaleyKlein {
    pub fn identity() -> Self {
        Self { a: c(1.0, 0.0), b: c(0.0, 0.0) }
    }

    /// `| |a|^2 + |b|^2 - 1 |`.
    pub fn unitarity_defect(&self) -> f64 {
        (self.a.norm_sqr() + self.b.norm_sqr() - 1.0).abs()
    }

    pub fn matrix(&self) -> Mat2 {
        [[self.a, self.b], [-self.b.conj(), self.a.conj()]]
    }
}

/// Row-major 2x2 complex matrix.
pub type Mat2 = [[Complex64; 2]; 2];

pub fn mat_mul(x: &Mat2, y: &Mat2) -> Mat2 {
    let mut out = [[c(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
        }
    }
    out
}

/// Largest entry of `M^dagger M - 1`.
pub fn unitarity_defect(m: &Mat2) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..2 {
        for j in 0..2 {
            let mut s = m[0][i].conj() * m[0][j] + m[1][i].conj() * m[1][j];
            if i == j {
                s -= 1.0;
            }
            worst = worst.max(s.norm());
        }
    }
    worst
}

/// Transfer matrix of one sub-crossing: `[[a, b e^{i psi}], [-b* e^{-i psi}, a*]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    pub ck: CaleyKlein,
    pub psi: f64,
}

impl TransferMatrix {
    pub fn matrix(&self) -> Mat2 {
        let ph = Complex64::from_polar(1.0, self.psi);
        let (a, b) = (self.ck.a, self.ck.b);
        [[a, b * ph], [-(b * ph).conj(), a.conj()]]
    }
}

/// Single-passage propagator `[[c, d], [-d*, c*]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PassagePropagator {
    pub c: Complex64,
    pub d: Complex64,
}

impl PassagePropagator {
    pub fn unitarity_defect(&self) -> f64 {
        (self.c.norm_sqr() + self.d.norm_sqr() - 1.0).abs()
    }
}

/// Photon number `n_alpha = -(eps0 + alpha omega_f) / omega` of the resonant harmonic.
pub fn resonance_index(alpha: Alpha, cfg: &DriveConfig) -> Result<i32> {
    if !(cfg.freq_rf > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "resonance index needs freq_rf > 0, got {}",
            cfg.freq_rf
        )));
    }
    let ratio = -(cfg.eps0 + alpha.sign() * cfg.freq_mw) / cfg.freq_rf;
    let n = ratio.round();
    if (ratio - n).abs() > RESONANCE_TOL || n.abs() > i32::MAX as f64 {
        return Err(Error::OffResonance(format!(
            "-(eps0 + ({alpha}) freq_mw) / freq_rf = {ratio} is not an integer"
        )));
    }
    Ok(n as i32)
}

fn resonant_couplings(cfg: &DriveConfig) -> Result<[(f64, f64); 3]> {
    let mut n_max = 0u32;
    let mut idx = [HarmonicIndex::new(0, Alpha::Zero); 3];
    for (k, alpha) in Alpha::ALL.into_iter().enumerate() {
        let n = resonance_index(alpha, cfg)?;
        n_max = n_max.max(n.unsigned_abs());
        idx[k] = HarmonicIndex::new(n, alpha);
    }
    let h = Harmonics::new(cfg, n_max)?;
    Ok(idx.map(|i| (h.coupling(i), i.alpha.phase(cfg))))
}

/// Modified Landau-Zener parameter
/// `delta = sum_{alpha, beta} J_{n_alpha}^alpha J_{n_beta}^beta cos(phi_alpha - phi_beta)`.
pub fn strong_drive_delta(cfg: &DriveConfig) -> Result<f64> {
    let terms = resonant_couplings(cfg)?;
    let mut delta = 0.0;
    for &(ja, pa) in &terms {
        for &(jb, pb) in &terms {
            delta += ja * jb * (pa - pb).cos();
        }
    }
    Ok(delta.max(0.0))
}

/// The same parameter regrouped as
/// `[J_0 + sum_{alpha != 0} J_alpha cos phi_alpha]^2 + sum_{alpha, beta != 0} J_alpha J_beta sin phi_alpha sin phi_beta`.
pub fn strong_drive_delta_regrouped(cfg: &DriveConfig) -> Result<f64> {
    let [(jm, pm), (j0, _), (jp, pp)] = resonant_couplings(cfg)?;
    let first = j0 + jm * pm.cos() + jp * pp.cos();
    let second = (jm * pm.sin() + jp * pp.sin()).powi(2);
    Ok(first * first + second)
}

/// Survival probability `exp(-2 pi delta)`.
pub fn strong_drive_survival(cfg: &DriveConfig) -> Result<f64> {
    Ok((-2.0 * PI * strong_drive_delta(cfg)?).exp())
}

/// Large-time Caley-Klein pair: `a = exp(-pi delta)`,
/// `b = sqrt(1 - exp(-2 pi delta)) exp(-i chi(delta))`.
pub fn caley_klein_asymptotic(delta: f64) -> Result<CaleyKlein> {
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(Error::Domain(format!("Caley-Klein parameters need delta >= 0, got {delta}")));
    }
    let p = (-2.0 * PI * delta).exp();
    let a = p.sqrt();
    // 1 - p without cancellation for small delta.
    let q = -(-2.0 * PI * delta).exp_m1();
    let b = Complex64::from_polar(q.sqrt(), -stokes_phase(delta)?);
    Ok(CaleyKlein { a: c(a, 0.0), b })
}

/// Finite-time pair exactly as given by the parabolic-cylinder formulas,
/// with `z = s e^{-i pi/4}`. These are `(-i U11, -U12)` of the propagator of
/// `[[s/2, sqrt(delta)], [sqrt(delta), -s/2]]` from `s_start` to `s_end`.
pub fn caley_klein_literal(delta: f64, z_start: Complex64, z_end: Complex64) -> Result<CaleyKlein> {
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(Error::Domain(format!("Caley-Klein parameters need delta >= 0, got {delta}")));
    }
    let i = c(0.0, 1.0);
    if delta == 0.0 {
        // D_0 is a Gaussian, so only the dynamic phase remains.
        let a = -i * ((z_end * z_end - z_start * z_start) / 4.0).exp();
        return Ok(CaleyKlein { a, b: c(0.0, 0.0) });
    }
    let nu = c(0.0, -delta);
    let g = log_gamma(c(1.0, delta))?.exp();
    let df_m = weber_d(nu, -i * z_end)?;
    let df_p = weber_d(nu, i * z_end)?;
    let di_m = weber_d(nu, -i * z_start)?;
    let di_p = weber_d(nu, i * z_start)?;
    let di1_m = weber_d(nu - 1.0, -i * z_start)?;
    let di1_p = weber_d(nu - 1.0, i * z_start)?;
    let root = (2.0 * PI).sqrt();
    let a = -i * g / root * (df_m * di1_p + df_p * di1_m);
    let b = g * Complex64::from_polar(1.0, -FRAC_PI_4) / (2.0 * PI * delta).sqrt()
        * (df_m * di_p - df_p * di_m);
    Ok(CaleyKlein { a, b })
}

/// Finite-time pair of the rotating-frame passage
/// `i dU/ds = sqrt(delta) [[0, e^{i s^2/2}], [e^{-i s^2/2}, 0]] U`
/// between `s_start` and `s_end`, with `z = s e^{-i pi/4}` (the crossing
/// offset is folded into `s`).
pub fn caley_klein_finite(delta: f64, z_start: Complex64, z_end: Complex64) -> Result<CaleyKlein> {
    if delta == 0.0 || z_start == z_end {
        if !(delta >= 0.0) {
            return Err(Error::Domain(format!("Caley-Klein parameters need delta >= 0, got {delta}")));
        }
        return Ok(CaleyKlein::identity());
    }
    let lit = caley_klein_literal(delta, z_start, z_end)?;
    let (zi2, zf2) = (z_start * z_start, z_end * z_end);
    let a = c(0.0, 1.0) * lit.a * (-(zf2 - zi2) / 4.0).exp();
    let b = -lit.b * (-(zf2 + zi2) / 4.0).exp();
    Ok(CaleyKlein { a, b })
}

/// Which Caley-Klein parameters a transfer matrix uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Passage {
    /// Full passage from `-inf` to `+inf`.
    Asymptotic,
    /// Finite window in dimensionless time.
    Window { tau_start: f64, tau_end: f64 },
}

/// Transfer matrix of sub-crossing `idx` with `delta = (J_n^alpha)^2` and
/// phase `Psi_n^alpha`.
pub fn transfer_matrix(idx: HarmonicIndex, cfg: &DriveConfig, passage: Passage) -> Result<TransferMatrix> {
    let h = Harmonics::new(cfg, idx.n.unsigned_abs())?;
    let j = h.coupling(idx);
    let delta = j * j;
    let ck = match passage {
        Passage::Asymptotic => caley_klein_asymptotic(delta)?,
        Passage::Window { tau_start, tau_end } => {
            let w = h.offset(idx);
            let rot = Complex64::from_polar(1.0, -FRAC_PI_4);
            caley_klein_finite(delta, rot * (tau_start + w), rot * (tau_end + w))?
        }
    };
    Ok(TransferMatrix { ck, psi: h.phase(idx) })
}

fn passage_matrices(cfg: &DriveConfig) -> Result<[TransferMatrix; 3]> {
    let t = |alpha| transfer_matrix(HarmonicIndex::new(0, alpha), cfg, Passage::Asymptotic);
    Ok([t(Alpha::Minus)?, t(Alpha::Zero)?, t(Alpha::Plus)?])
}

/// `U ~ S_- S_0 S_+` for the `n = 0` passage, written out entrywise.
pub fn single_passage_propagator(cfg: &DriveConfig) -> Result<PassagePropagator> {
    let [sm, s0, sp] = passage_matrices(cfg)?;
    let (am, bm, pm) = (sm.ck.a, sm.ck.b, sm.psi);
    let (a0, b0, p0) = (s0.ck.a, s0.ck.b, s0.psi);
    let (ap, bp, pp) = (sp.ck.a, sp.ck.b, sp.psi);
    let e = |x: f64| Complex64::from_polar(1.0, x);
    let cc = ap * (a0 * am - b0.conj() * bm * e(-(p0 - pm)))
        - bp.conj() * (am * b0 * e(p0 - pp) + a0.conj() * bm * e(pm - pp));
    let d = bm * e(pm) * (a0.conj() * ap.conj() - b0.conj() * bp * e(-(p0 - pp)))
        + am * (ap.conj() * b0 * e(p0) + a0 * bp * e(pp));
    Ok(PassagePropagator { c: cc, d })
}

/// `(P_j, xi_j)` of the four interfering paths; `P_up->up = |sum P_j e^{i xi_j}|^2`.
pub fn weak_drive_paths(cfg: &DriveConfig) -> Result<[(f64, f64); 4]> {
    let [sm, s0, sp] = passage_matrices(cfg)?;
    let chi = |s: &TransferMatrix| -s.ck.b.arg();
    let (am, bm) = (sm.ck.a.norm(), sm.ck.b.norm());
    let (a0, b0) = (s0.ck.a.norm(), s0.ck.b.norm());
    let (ap, bp) = (sp.ck.a.norm(), sp.ck.b.norm());
    let (cm, c0, cp) = (chi(&sm), chi(&s0), chi(&sp));
    let (pm, p0, pp) = (sm.psi, s0.psi, sp.psi);
    Ok([
        (am * a0 * ap, 0.0),
        (-(bm * b0 * ap), (pm - p0) - (cm - c0)),
        (-(am * b0 * bp), (p0 - pp) - (c0 - cp)),
        (-(bm * a0 * bp), (pm - pp) - (cm - cp)),
    ])
}

/// `(P_up->up, P_up->dn)` after the full `n = 0` passage.
pub fn weak_drive_probabilities(cfg: &DriveConfig) -> Result<(f64, f64)> {
    let paths = weak_drive_paths(cfg)?;
    let mut p = 0.0;
    for &(pj, xj) in &paths {
        for &(pk, xk) in &paths {
            p += pj * pk * (xj - xk).cos();
        }
    }
    Ok((p, 1.0 - p))
}

fn close(x: f64, y: f64) -> bool {
    (x - y).abs() <= SPECIAL_CASE_TOL * (1.0 + x.abs().max(y.abs()))
}

fn require(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::UnsupportedConfig(what.to_string()))
    }
}

/// Zero sweep, `omega_f = omega`, `phi = 0`: `(P_up->up, P_up->dn)` at time `t`.
pub fn rabi_case(cfg: &DriveConfig, t: f64) -> Result<(f64, f64)> {
    cfg.validate()?;
    require(cfg.v == 0.0, "Rabi case needs v = 0")?;
    require(cfg.delta == 0.0 && cfg.eps0 == 0.0, "Rabi case needs delta = eps0 = 0")?;
    require(cfg.freq_rf > 0.0 && close(cfg.freq_mw, cfg.freq_rf), "Rabi case needs freq_mw = freq_rf > 0")?;
    require(close(cfg.phase, 0.0), "Rabi case needs phase = 0")?;
    let (a, af, w) = (cfg.amp_rf, cfg.amp_mw, cfg.freq_rf);
    let r2 = a * a + af * af;
    if r2 == 0.0 {
        return Ok((1.0, 0.0));
    }
    let arg = r2.sqrt() / (2.0 * w) * (w * t).sin();
    let dn = af * af / r2 * arg.sin().powi(2);
    let up = a * a / r2 + af * af / r2 * arg.cos().powi(2);
    Ok((up, dn))
}

/// Effective sweep and Landau-Zener parameter of the inverse case:
/// `v_eff = 2 A_f / omega`, `delta = (A/omega)^2 / (4 v_eff)`.
pub fn inverse_lz_parameters(cfg: &DriveConfig) -> (f64, f64) {
    let v_eff = 2.0 * cfg.amp_mw / cfg.freq_rf;
    let d_eff = cfg.amp_rf / cfg.freq_rf;
    (v_eff, d_eff * d_eff / (4.0 * v_eff))
}

/// Zero sweep, `omega_f = 2 omega`, `phi = pi/2`, start at `t = 0`:
/// `(P_up->up, P_up->dn)` at `t_f` from the real and imaginary parts of the
/// parabolic-cylinder Caley-Klein pair.
pub fn inverse_lz_case(cfg: &DriveConfig, t_f: f64) -> Result<(f64, f64)> {
    cfg.validate()?;
    require(cfg.v == 0.0, "inverse Landau-Zener case needs v = 0")?;
    require(cfg.delta == 0.0 && cfg.eps0 == 0.0, "inverse Landau-Zener case needs delta = eps0 = 0")?;
    require(
        cfg.freq_rf > 0.0 && close(cfg.freq_mw, 2.0 * cfg.freq_rf),
        "inverse Landau-Zener case needs freq_mw = 2 freq_rf > 0",
    )?;
    require(close(cfg.phase, FRAC_PI_2), "inverse Landau-Zener case needs phase = pi/2")?;
    require(cfg.amp_mw > 0.0, "inverse Landau-Zener case needs amp_mw > 0")?;
    if !t_f.is_finite() {
        return Err(Error::Domain(format!("final time must be finite, got {t_f}")));
    }
    let (v_eff, delta) = inverse_lz_parameters(cfg);
    let s = v_eff.sqrt() * (cfg.freq_rf * t_f).sin();
    let z = Complex64::from_polar(s, -FRAC_PI_4);
    let ck = caley_klein_literal(delta, c(0.0, 0.0), z)?;
    let dn = ck.a.re.powi(2) + ck.b.re.powi(2);
    let up = ck.a.im.powi(2) + ck.b.im.powi(2);
    Ok((up, dn))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::bessel_j;

    fn two_photon(delta: f64, a_over_w: f64, phase: f64) -> DriveConfig {
        DriveConfig {
            delta,
            amp_rf: 100.0 * a_over_w,
            freq_rf: 100.0,
            amp_mw: 0.08,
            freq_mw: 200.0,
            phase,
            ..DriveConfig::default()
        }
    }

    #[test]
    fn resonance_indices() {
        let cfg = DriveConfig { freq_rf: 1.0, ..DriveConfig::default() };
        assert_eq!(resonance_index(Alpha::Zero, &cfg).unwrap(), 0);
        let cfg = two_photon(0.1, 1.0, 0.0);
        assert_eq!(resonance_index(Alpha::Plus, &cfg).unwrap(), -2);
        assert_eq!(resonance_index(Alpha::Minus, &cfg).unwrap(), 2);
        let cfg = DriveConfig { eps0: 0.3, freq_rf: 1.0, ..DriveConfig::default() };
        assert!(matches!(resonance_index(Alpha::Zero, &cfg), Err(Error::OffResonance(_))));
        let cfg = DriveConfig { eps0: 2.0 + 5e-7, freq_rf: 1.0, ..DriveConfig::default() };
        assert_eq!(resonance_index(Alpha::Zero, &cfg).unwrap(), -2);
    }

    #[test]
    fn strong_drive_reductions() {
        // No RF drive: only the static coupling survives.
        let cfg = DriveConfig { delta: 0.07, freq_rf: 1.0, amp_mw: 0.08, freq_mw: 200.0, ..DriveConfig::default() };
        assert!((strong_drive_delta(&cfg).unwrap() - 0.07 * 0.07 / 4.0).abs() < 1e-16);
        let p = strong_drive_survival(&DriveConfig { delta: 0.07, freq_rf: 1.0, ..DriveConfig::default() }).unwrap();
        assert!((p - (-PI * 0.0049 / 2.0).exp()).abs() < 1e-15);
        assert!((p - 0.99233).abs() < 1e-5);
        let zero = DriveConfig { freq_rf: 1.0, ..DriveConfig::default() };
        assert_eq!(strong_drive_survival(&zero).unwrap(), 1.0);
        // phi = pi/2, even Q: the sidebands cancel.
        let cfg = two_photon(0.2, 1.3, FRAC_PI_2);
        let j0 = 0.2 / 2.0 * bessel_j(0, 1.3).unwrap();
        assert!((strong_drive_delta(&cfg).unwrap() - j0 * j0).abs() < 1e-15);
    }

    /// The closed form at eps0 = 0 with `Q = omega_f / omega`.
    fn delta_at_zero_shift(cfg: &DriveConfig) -> f64 {
        let q = (cfg.freq_mw / cfg.freq_rf).round() as i32;
        let x = cfg.bessel_argument();
        let jq = cfg.amp_mw / 4.0 * bessel_j(q, x).unwrap();
        let jmq = cfg.amp_mw / 4.0 * bessel_j(-q, x).unwrap();
        let j0 = cfg.delta / 2.0 * bessel_j(0, x).unwrap();
        (j0 + (jq + jmq) * cfg.phase.cos()).powi(2) + (jq - jmq).powi(2) * cfg.phase.sin().powi(2)
    }

    #[test]
    fn strong_drive_forms_agree() {
        for &(d, aw, phi) in &[(0.05, 0.5, 0.3), (0.3, 2.0, 1.1), (0.1, 1.0, 2.5), (0.2, 3.7, -0.7)] {
            for q in [1.0, 2.0, 3.0] {
                let cfg = DriveConfig { freq_mw: 100.0 * q, ..two_photon(d, aw, phi) };
                let a = strong_drive_delta(&cfg).unwrap();
                let b = strong_drive_delta_regrouped(&cfg).unwrap();
                let c = delta_at_zero_shift(&cfg);
                assert!((a - b).abs() < 1e-12 && (a - c).abs() < 1e-12, "{a} {b} {c}");
            }
        }
    }

    #[test]
    fn coherent_destruction_of_tunnelling() {
        let cfg = DriveConfig { amp_mw: 0.0, ..two_photon(0.3, 2.404_825_557_695_773, 0.0) };
        assert!((1.0 - strong_drive_survival(&cfg).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn survival_is_even_in_phase() {
        for q in [1.0, 2.0, 3.0] {
            let cfg = DriveConfig { freq_mw: 100.0 * q, ..two_photon(0.1, 1.4, 0.8) };
            let flipped = DriveConfig { phase: -0.8, ..cfg };
            let (p, m) = (strong_drive_survival(&cfg).unwrap(), strong_drive_survival(&flipped).unwrap());
            assert!((p - m).abs() < 1e-15);
        }
    }

    #[test]
    fn asymptotic_pair() {
        assert_eq!(caley_klein_asymptotic(0.0).unwrap().a, c(1.0, 0.0));
        assert_eq!(caley_klein_asymptotic(0.0).unwrap().b.norm(), 0.0);
        let ck = caley_klein_asymptotic(0.1).unwrap();
        assert!((ck.a.re - (-0.1 * PI).exp()).abs() < 1e-15);
        assert!((ck.a.re - 0.73040).abs() < 1e-5);
        assert!(ck.unitarity_defect() < 1e-15);
        let big = caley_klein_asymptotic(50.0).unwrap();
        assert!(big.a.norm() < 1e-60 && (big.b.norm() - 1.0).abs() < 1e-15);
        assert!(caley_klein_asymptotic(-1.0).is_err());
    }

    #[test]
    fn finite_pair_limits() {
        let z = Complex64::from_polar(3.0, -FRAC_PI_4);
        assert_eq!(caley_klein_finite(0.1, z, z).unwrap(), CaleyKlein::identity());
        assert_eq!(caley_klein_finite(0.0, -z, z).unwrap(), CaleyKlein::identity());
        let ck = caley_klein_finite(0.1, -z * 3.0, z * 2.0).unwrap();
        assert!(ck.unitarity_defect() < 1e-9);
        // The literal pair at coincident arguments is (-i, 0).
        let lit = caley_klein_literal(0.2, z, z).unwrap();
        assert!((lit.a - c(0.0, -1.0)).norm() < 1e-9 && lit.b.norm() < 1e-9);
    }

    #[test]
    fn finite_pair_reference_values() {
        // Propagator of sqrt(d) [[0, e^{i s^2/2}], [e^{-i s^2/2}, 0]] from
        // scipy DOP853 at rtol 1e-12 (entries U11, U12).
        let cases = [
            (0.1, -10.0, 10.0, c(0.751213, 0.0), c(0.135468, -0.646009)),
        ];
        let rot = Complex64::from_polar(1.0, -FRAC_PI_4);
        for (d, si, sf, u11, u12) in cases {
            let ck = caley_klein_finite(d, rot * si, rot * sf).unwrap();
            assert!((ck.a - u11).norm() < 2e-6 && (ck.b - u12).norm() < 2e-6, "{ck:?}");
        }
    }

    #[test]
    fn passage_product_matches_matrix_product() {
        let cfg = DriveConfig { delta: 0.07, eps0: 0.4, amp_rf: 1.0, freq_rf: 50.0, amp_mw: 0.08, freq_mw: 1.0, phase: 0.9, ..DriveConfig::default() };
        let p = single_passage_propagator(&cfg).unwrap();
        let [sm, s0, sp] = passage_matrices(&cfg).unwrap();
        let m = mat_mul(&mat_mul(&sm.matrix(), &s0.matrix()), &sp.matrix());
        assert!((m[0][0] - p.c).norm() < 1e-12 && (m[0][1] - p.d).norm() < 1e-12);
        assert!(p.unitarity_defect() < 1e-12);
        assert_eq!(sm.ck.a, sp.ck.a);
        assert_eq!(sm.ck.b, sp.ck.b);
    }

    #[test]
    fn weak_drive_paths_reproduce_modulus() {
        let cfg = DriveConfig { delta: 0.0075, eps0: -1.3, amp_rf: 29.0, freq_rf: 100.0, amp_mw: 0.08, freq_mw: 1.0, phase: 2.1, ..DriveConfig::default() };
        let p = single_passage_propagator(&cfg).unwrap();
        let (up, dn) = weak_drive_probabilities(&cfg).unwrap();
        assert!((up - p.c.norm_sqr()).abs() < 1e-12);
        assert!((up + dn - 1.0).abs() < 1e-15);
        let zero = DriveConfig { freq_rf: 1.0, freq_mw: 1.0, ..DriveConfig::default() };
        assert_eq!(weak_drive_probabilities(&zero).unwrap(), (1.0, 0.0));
    }

    #[test]
    fn rabi_formulas() {
        let base = DriveConfig { amp_rf: 1.0, freq_rf: 1.0, amp_mw: 1.0, freq_mw: 1.0, ..DriveConfig::default() }.zero_sweep();
        assert_eq!(rabi_case(&base, 0.0).unwrap(), (1.0, 0.0));
        let (up, dn) = rabi_case(&base, 1.234).unwrap();
        assert!((up + dn - 1.0).abs() < 1e-15);
        let no_rf = DriveConfig { amp_rf: 0.0, ..base };
        let t: f64 = 0.7;
        let (_, dn) = rabi_case(&no_rf, t).unwrap();
        assert!((dn - (t.sin() / 2.0).sin().powi(2)).abs() < 1e-15);
        assert!(matches!(rabi_case(&DriveConfig { v: 1.0, ..base }, 1.0), Err(Error::UnsupportedConfig(_))));
        assert!(rabi_case(&DriveConfig { phase: 0.1, ..base }, 1.0).is_err());
        assert!(rabi_case(&DriveConfig { freq_mw: 2.0, ..base }, 1.0).is_err());
    }

    #[test]
    fn inverse_lz_reference_values() {
        // Diabatic populations of the v = 0 Hamiltonian, A = 0.5, A_f = 1,
        // omega = 1, from scipy DOP853 at rtol 1e-12.
        let cfg = DriveConfig { amp_rf: 0.5, freq_rf: 1.0, amp_mw: 1.0, freq_mw: 2.0, phase: FRAC_PI_2, ..DriveConfig::default() }.zero_sweep();
        for (t, want) in [(0.3, 0.00190321), (FRAC_PI_4, 0.06078372), (1.2, 0.17494465), (2.0, 0.15953224), (4.0, 0.07915815)] {
            let (up, dn) = inverse_lz_case(&cfg, t).unwrap();
            assert!((dn - want).abs() < 1e-8, "t={t}: {dn}");
            assert!((up + dn - 1.0).abs() < 1e-9);
        }
        assert!(inverse_lz_case(&cfg, 0.0).unwrap().1 < 1e-18);
        // Without the longitudinal drive the sigma_x sweep rotates the state.
        let bare = DriveConfig { amp_rf: 0.0, ..cfg };
        let (v_eff, _) = inverse_lz_parameters(&bare);
        let s2 = v_eff * 0.9_f64.sin().powi(2);
        let (_, dn) = inverse_lz_case(&bare, 0.9).unwrap();
        assert!((dn - (s2 / 4.0).sin().powi(2)).abs() < 1e-14);
        assert!(inverse_lz_case(&DriveConfig { phase: 0.0, ..cfg }, 1.0).is_err());
    }
}

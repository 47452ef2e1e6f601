//! Numerical propagation of the Schrödinger equation `i dpsi/dtau = H psi`
//! and of the Bloch equation `du/dtau = b x u`.
//!
//! Both are integrated in the frame rotating about `z` with the closed-form
//! phase `theta(tau) = int b_z`, where the right-hand side is proportional to
//! the transverse field only, and mapped back exactly at every sample. The
//! stepper is the adaptive Dormand-Prince 8(5,3) embedded pair; steps are
//! shortened so that every sample time is hit exactly, with no interpolation. The norm (or
//! Bloch radius) is checked at every sample and drift beyond
//! [`NORM_DRIFT_LIMIT`] aborts the run instead of being corrected.

use crate::error::{Error, Result};
use crate::model::{field_vector, DriveConfig};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

/// Largest tolerated change of `|psi|^2` or `|u|`.
pub const NORM_DRIFT_LIMIT: f64 = 1.0e-9;
/// Default relative tolerance.
pub const DEFAULT_TOL: f64 = 1.0e-10;
const MAX_STEPS: usize = 200_000_000;

/// Diabatic amplitudes `(C_up, C_down)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinState {
    pub c_up: Complex64,
    pub c_dn: Complex64,
}

impl SpinState {
    pub fn up() -> Self {
        Self { c_up: Complex64::new(1.0, 0.0), c_dn: Complex64::new(0.0, 0.0) }
    }

    pub fn down() -> Self {
        Self { c_up: Complex64::new(0.0, 0.0), c_dn: Complex64::new(1.0, 0.0) }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c_up.norm_sqr() + self.c_dn.norm_sqr()
    }

    /// `u_alpha = <sigma_alpha>`.
    pub fn to_bloch(&self) -> BlochVector {
        let w = self.c_up.conj() * self.c_dn;
        BlochVector {
            ux: 2.0 * w.re,
            uy: 2.0 * w.im,
            uz: self.c_up.norm_sqr() - self.c_dn.norm_sqr(),
        }
    }

    fn to_array(self) -> [f64; 4] {
        [self.c_up.re, self.c_up.im, self.c_dn.re, self.c_dn.im]
    }

    fn from_array(y: [f64; 4]) -> Self {
        Self { c_up: Complex64::new(y[0], y[1]), c_dn: Complex64::new(y[2], y[3]) }
    }
}

/// Spin polarisation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlochVector {
    pub ux: f64,
    pub uy: f64,
    pub uz: f64,
}

impl BlochVector {
    pub fn north() -> Self {
        Self { ux: 0.0, uy: 0.0, uz: 1.0 }
    }

    pub fn norm(&self) -> f64 {
        (self.ux * self.ux + self.uy * self.uy + self.uz * self.uz).sqrt()
    }

    pub fn distance(&self, other: &BlochVector) -> f64 {
        let d = [self.ux - other.ux, self.uy - other.uy, self.uz - other.uz];
        (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
    }

    fn to_array(self) -> [f64; 3] {
        [self.ux, self.uy, self.uz]
    }

    fn from_array(y: [f64; 3]) -> Self {
        Self { ux: y[0], uy: y[1], uz: y[2] }
    }
}

/// Anything with diabatic populations.
pub trait Populations {
    /// `(p_up, p_dn)`.
    fn populations(&self) -> (f64, f64);
}

impl Populations for SpinState {
    fn populations(&self) -> (f64, f64) {
        (self.c_up.norm_sqr(), self.c_dn.norm_sqr())
    }
}

impl Populations for BlochVector {
    fn populations(&self) -> (f64, f64) {
        ((1.0 + self.uz) / 2.0, (1.0 - self.uz) / 2.0)
    }
}

/// `(p_up, p_dn)` of a spin state or Bloch vector.
pub fn populations<S: Populations>(state: &S) -> (f64, f64) {
    state.populations()
}

/// Azimuthal angle from `u_z = cos theta_az` and polar angle from
/// `atan2(u_y, u_x)` in `[0, 2 pi)`; the polar angle is 0 at the poles.
pub fn bloch_angles(u: &BlochVector) -> Result<(f64, f64)> {
    let r = u.norm();
    if !(r > 0.0) {
        return Err(Error::Domain("Bloch angles of the zero vector".into()));
    }
    let theta_az = (u.uz / r).clamp(-1.0, 1.0).acos();
    let mut theta_pol = if u.ux == 0.0 && u.uy == 0.0 { 0.0 } else { u.uy.atan2(u.ux) };
    if theta_pol < 0.0 {
        theta_pol += 2.0 * PI;
    }
    if theta_pol >= 2.0 * PI {
        theta_pol = 0.0;
    }
    Ok((theta_az, theta_pol))
}

/// Error control of the integrator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegratorSettings {
    pub rtol: f64,
    pub atol: f64,
}

impl IntegratorSettings {
    /// Relative tolerance `tol`, absolute tolerance `tol / 100`.
    pub fn from_tol(tol: f64) -> Result<Self> {
        if !(1.0e-13..=1.0e-6).contains(&tol) {
            return Err(Error::InvalidConfig(format!(
                "integrator tolerance must lie in [1e-13, 1e-6], got {tol}"
            )));
        }
        Ok(Self { rtol: tol, atol: tol * 1.0e-2 })
    }
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        Self { rtol: DEFAULT_TOL, atol: DEFAULT_TOL * 1.0e-2 }
    }
}

/// Sampled time series.
#[derive(Debug, Clone)]
pub struct Trajectory<P> {
    pub samples: Vec<(f64, P)>,
    pub cfg: DriveConfig,
    pub settings: IntegratorSettings,
}

impl<P: Copy> Trajectory<P> {
    pub fn last(&self) -> (f64, P) {
        *self.samples.last().expect("trajectory has at least one sample")
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Sample times `start + k stride`, ending exactly at `end`.
pub fn sample_times(tau_start: f64, tau_end: f64, stride: f64) -> Vec<f64> {
    let mut out = vec![tau_start];
    let mut k = 1usize;
    loop {
        let t = tau_start + k as f64 * stride;
        if t >= tau_end - 1e-12 * stride {
            break;
        }
        out.push(t);
        k += 1;
    }
    out.push(tau_end);
    out
}

// Dormand-Prince 8(5,3) tableau (Hairer, Norsett, Wanner).
const STAGES: usize = 12;
const C: [f64; 12] = [0.0, 0.05260015195876773, 0.0789002279381516, 0.1183503419072274, 0.2816496580927726, 0.3333333333333333, 0.25, 0.3076923076923077, 0.6512820512820513, 0.6, 0.8571428571428571, 1.0];
const A: [[f64; 12]; 12] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.05260015195876773, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.0197250569845379, 0.0591751709536137, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.02958758547680685, 0.0, 0.08876275643042054, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2413651341592667, 0.0, -0.8845494793282861, 0.924834003261792, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.037037037037037035, 0.0, 0.0, 0.17082860872947386, 0.12546768756682242, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.037109375, 0.0, 0.0, 0.17025221101954405, 0.06021653898045596, -0.017578125, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.03709200011850479, 0.0, 0.0, 0.17038392571223998, 0.10726203044637328, -0.015319437748624402, 0.008273789163814023, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.6241109587160757, 0.0, 0.0, -3.3608926294469414, -0.868219346841726, 27.59209969944671, 20.154067550477894, -43.48988418106996, 0.0, 0.0, 0.0, 0.0],
    [0.47766253643826434, 0.0, 0.0, -2.4881146199716677, -0.590290826836843, 21.230051448181193, 15.279233632882423, -33.28821096898486, -0.020331201708508627, 0.0, 0.0, 0.0],
    [-0.9371424300859873, 0.0, 0.0, 5.186372428844064, 1.0914373489967295, -8.149787010746927, -18.52006565999696, 22.739487099350505, 2.4936055526796523, -3.0467644718982196, 0.0, 0.0],
    [2.273310147516538, 0.0, 0.0, -10.53449546673725, -2.0008720582248625, -17.9589318631188, 27.94888452941996, -2.8589982771350235, -8.87285693353063, 12.360567175794303, 0.6433927460157636, 0.0],
];
const B: [f64; 12] = [0.054293734116568765, 0.0, 0.0, 0.0, 0.0, 4.450312892752409, 1.8915178993145003, -5.801203960010585, 0.3111643669578199, -0.1521609496625161, 0.20136540080403034, 0.04471061572777259];
const E3: [f64; 13] = [-0.18980075407240762, 0.0, 0.0, 0.0, 0.0, 4.450312892752409, 1.8915178993145003, -5.801203960010585, -0.4226823213237919, -0.1521609496625161, 0.20136540080403034, 0.02265179219836082, 0.0];
const E5: [f64; 13] = [0.01312004499419488, 0.0, 0.0, 0.0, 0.0, -1.2251564463762044, -0.4957589496572502, 1.6643771824549864, -0.35032884874997366, 0.3341791187130175, 0.08192320648511571, -0.022355307863886294, 0.0];

/// Adaptive integration of `y' = f(t, y)` through the given times (monotone in
/// either direction). `visit` sees the state at each time, including the first.
fn integrate<const N: usize>(
    f: impl Fn(f64, &[f64; N]) -> [f64; N],
    y0: [f64; N],
    times: &[f64],
    settings: IntegratorSettings,
    mut visit: impl FnMut(f64, &[f64; N]) -> Result<()>,
) -> Result<[f64; N]> {
    let mut t = times[0];
    let mut y = y0;
    visit(t, &y)?;
    if times.len() < 2 {
        return Ok(y);
    }
    let dir = (times[times.len() - 1] - t).signum();
    let mut k1 = f(t, &y);
    let scale0 = k1.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1.0);
    let mut h = (1.0e-2 / scale0).min((times[1] - t).abs());
    let mut steps = 0usize;

    for &target in &times[1..] {
        while (target - t) * dir > 0.0 {
            steps += 1;
            if steps > MAX_STEPS {
                return Err(Error::IntegrationFailure { tau: t, reason: "step budget exhausted".into() });
            }
            let remaining = (target - t).abs();
            let land = h >= remaining;
            let step = if land { remaining } else { h };
            let hs = step * dir;

            let mut k = [[0.0; N]; STAGES + 1];
            k[0] = k1;
            for st in 1..STAGES {
                let mut ys = y;
                for (j, kj) in k.iter().enumerate().take(st) {
                    let a = A[st][j];
                    if a != 0.0 {
                        for i in 0..N {
                            ys[i] += hs * a * kj[i];
                        }
                    }
                }
                k[st] = f(t + C[st] * hs, &ys);
            }
            let mut y_new = y;
            for (st, ks) in k.iter().enumerate().take(STAGES) {
                for i in 0..N {
                    y_new[i] += hs * B[st] * ks[i];
                }
            }
            k[STAGES] = f(t + hs, &y_new);
            // Blend of the fifth- and third-order estimates, as in DOP853.
            let (mut e5, mut e3) = (0.0_f64, 0.0_f64);
            for i in 0..N {
                let (mut d5, mut d3) = (0.0, 0.0);
                for (st, ks) in k.iter().enumerate() {
                    d5 += E5[st] * ks[i];
                    d3 += E3[st] * ks[i];
                }
                let sc = settings.atol + settings.rtol * y[i].abs().max(y_new[i].abs());
                e5 += (d5 / sc).powi(2);
                e3 += (d3 / sc).powi(2);
            }
            let denom = e5 + 0.01 * e3;
            let err = if denom > 0.0 { step * e5 / (denom * N as f64).sqrt() } else { 0.0 };
            if !err.is_finite() {
                return Err(Error::IntegrationFailure { tau: t, reason: "non-finite state".into() });
            }
            if err <= 1.0 {
                t = if land { target } else { t + hs };
                y = y_new;
                k1 = k[STAGES];
                // A short landing step says nothing about the natural step.
                if land && step < h {
                    continue;
                }
            }
            let factor = if err == 0.0 { 10.0 } else { (0.9 * err.powf(-0.125)).clamp(0.2, 10.0) };
            h = step * factor;
            if h < 1.0e-14 * t.abs().max(1.0) {
                return Err(Error::IntegrationFailure { tau: t, reason: format!("step size underflow (h = {h:e})") });
            }
        }
        visit(t, &y)?;
    }
    Ok(y)
}

fn check_window(tau_start: f64, tau_end: f64, stride: f64) -> Result<()> {
    if !(tau_start.is_finite() && tau_end.is_finite() && tau_start < tau_end) {
        return Err(Error::InvalidConfig(format!(
            "time window must satisfy tau_start < tau_end, got [{tau_start}, {tau_end}]"
        )));
    }
    if !(stride > 0.0 && stride.is_finite()) {
        return Err(Error::InvalidConfig(format!("sample stride must be > 0, got {stride}")));
    }
    Ok(())
}

/// `theta(tau) = v tau^2 / 2 + eps0 tau + (A/omega) sin(omega tau)`, the
/// integral of `b_z`.
pub fn diagonal_phase(tau: f64, cfg: &DriveConfig) -> f64 {
    let rf = if cfg.amp_rf == 0.0 {
        0.0
    } else {
        cfg.amp_rf / cfg.freq_rf * (cfg.freq_rf * tau).sin()
    };
    0.5 * cfg.v * tau * tau + cfg.eps0 * tau + rf
}

fn transverse_field(tau: f64, cfg: &DriveConfig) -> (f64, f64) {
    (field_vector(tau, cfg).bx, diagonal_phase(tau, cfg))
}

// Frame rotating about z by theta(tau): psi = exp(-i theta sigma_z / 2) psi_r.
// Then i psi_r' = (bx/2) [[0, e^{i theta}], [e^{-i theta}, 0]] psi_r.
fn tdse_rhs(cfg: &DriveConfig) -> impl Fn(f64, &[f64; 4]) -> [f64; 4] + '_ {
    move |tau, y| {
        let (bx, theta) = transverse_field(tau, cfg);
        let (s, c) = theta.sin_cos();
        let h = 0.5 * bx;
        // e^{i theta} c_dn and e^{-i theta} c_up
        let (pr, pi) = (c * y[2] - s * y[3], s * y[2] + c * y[3]);
        let (qr, qi) = (c * y[0] + s * y[1], c * y[1] - s * y[0]);
        [h * pi, -h * pr, h * qi, -h * qr]
    }
}

fn tdse_to_lab(tau: f64, cfg: &DriveConfig, y: &[f64; 4]) -> SpinState {
    let half = 0.5 * diagonal_phase(tau, cfg);
    let r = SpinState::from_array(*y);
    SpinState {
        c_up: r.c_up * Complex64::from_polar(1.0, -half),
        c_dn: r.c_dn * Complex64::from_polar(1.0, half),
    }
}

fn tdse_from_lab(tau: f64, cfg: &DriveConfig, s: SpinState) -> [f64; 4] {
    let half = 0.5 * diagonal_phase(tau, cfg);
    SpinState {
        c_up: s.c_up * Complex64::from_polar(1.0, half),
        c_dn: s.c_dn * Complex64::from_polar(1.0, -half),
    }
    .to_array()
}

// Same frame for the Bloch vector: u = R_z(theta) u_r, u_r' = b_r x u_r with
// b_r = bx (cos theta, -sin theta, 0).
fn bloch_rhs(cfg: &DriveConfig) -> impl Fn(f64, &[f64; 3]) -> [f64; 3] + '_ {
    move |tau, u| {
        let (bx, theta) = transverse_field(tau, cfg);
        let (s, c) = theta.sin_cos();
        let (b0, b1) = (bx * c, -bx * s);
        [b1 * u[2], -b0 * u[2], b0 * u[1] - b1 * u[0]]
    }
}

fn rotate_z(u: [f64; 3], theta: f64) -> [f64; 3] {
    let (s, c) = theta.sin_cos();
    [c * u[0] - s * u[1], s * u[0] + c * u[1], u[2]]
}

fn drift_guard(reference: f64, measure: f64, tau: f64) -> Result<()> {
    let drift = (measure - reference).abs();
    if drift > NORM_DRIFT_LIMIT {
        return Err(Error::IntegrationFailure {
            tau,
            reason: format!("norm drift {drift:e} exceeds {NORM_DRIFT_LIMIT:e}"),
        });
    }
    Ok(())
}

/// Integrate the Schrödinger equation from `tau_start` to `tau_end`, sampling
/// every `stride`.
pub fn propagate_tdse(
    cfg: &DriveConfig,
    psi0: SpinState,
    tau_start: f64,
    tau_end: f64,
    tol: f64,
    stride: f64,
) -> Result<Trajectory<SpinState>> {
    cfg.validate()?;
    check_window(tau_start, tau_end, stride)?;
    let settings = IntegratorSettings::from_tol(tol)?;
    let times = sample_times(tau_start, tau_end, stride);
    let n0 = psi0.norm_sqr();
    let mut samples = Vec::with_capacity(times.len());
    let y0 = tdse_from_lab(tau_start, cfg, psi0);
    integrate(tdse_rhs(cfg), y0, &times, settings, |t, y| {
        let s = tdse_to_lab(t, cfg, y);
        drift_guard(n0, s.norm_sqr(), t)?;
        samples.push((t, s));
        Ok(())
    })?;
    Ok(Trajectory { samples, cfg: *cfg, settings })
}

/// Integrate the Bloch equation from `tau_start` to `tau_end`, sampling every
/// `stride`.
pub fn propagate_bloch(
    cfg: &DriveConfig,
    u0: BlochVector,
    tau_start: f64,
    tau_end: f64,
    tol: f64,
    stride: f64,
) -> Result<Trajectory<BlochVector>> {
    cfg.validate()?;
    check_window(tau_start, tau_end, stride)?;
    let r0 = u0.norm();
    if !(r0 <= 1.0 + NORM_DRIFT_LIMIT) {
        return Err(Error::InvalidConfig(format!("Bloch vector length must be <= 1, got {r0}")));
    }
    let settings = IntegratorSettings::from_tol(tol)?;
    let times = sample_times(tau_start, tau_end, stride);
    let mut samples = Vec::with_capacity(times.len());
    let y0 = rotate_z(u0.to_array(), -diagonal_phase(tau_start, cfg));
    integrate(bloch_rhs(cfg), y0, &times, settings, |t, y| {
        let u = BlochVector::from_array(rotate_z(*y, diagonal_phase(t, cfg)));
        drift_guard(r0, u.norm(), t)?;
        samples.push((t, u));
        Ok(())
    })?;
    Ok(Trajectory { samples, cfg: *cfg, settings })
}

/// Final state only, in either time direction.
pub fn evolve_tdse(
    cfg: &DriveConfig,
    psi0: SpinState,
    tau_from: f64,
    tau_to: f64,
    settings: IntegratorSettings,
) -> Result<SpinState> {
    cfg.validate()?;
    let n0 = psi0.norm_sqr();
    let y0 = tdse_from_lab(tau_from, cfg, psi0);
    let y = integrate(tdse_rhs(cfg), y0, &[tau_from, tau_to], settings, |t, y| {
        drift_guard(n0, SpinState::from_array(*y).norm_sqr(), t)
    })?;
    Ok(tdse_to_lab(tau_to, cfg, &y))
}

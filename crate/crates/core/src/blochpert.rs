//! Perturbative Bloch-vector solution for weak transverse coupling, plus the
//! algebra of the `L`/`M` kernels it is written in.
//!
//! With `x = tau + omega_n^alpha` and `y = Psi_n^alpha`,
//!
//! ```text
//! L(x, y) = C(x) sin y - S(x) cos y
//! M(x, y) = C(x) cos y + S(x) sin y
//! ```
//!
//! where `C`, `S` are the Fresnel integrals rescaled so that
//! `sqrt(pi) C(x) = int_{-inf}^x cos(s^2/2) ds`. To first order in the
//! couplings the rotating-frame down amplitude is `sqrt(pi) sum J (L - i M)`.

use crate::error::{Error, Result};
use crate::integrate::BlochVector;
use crate::model::{Alpha, DriveConfig, HarmonicIndex, Harmonics};
use crate::specfun::{scaled_fresnel, ExtendedReal};
use std::f64::consts::PI;

/// Values of `L(x, y)` and `M(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LMKernel {
    pub l: f64,
    pub m: f64,
}

/// `K_n^alpha(tau) = (tau + omega_n^alpha)^2 / 2 - Psi_n^alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseKernel {
    pub value: f64,
}

impl PhaseKernel {
    pub fn new(tau: f64, idx: HarmonicIndex, cfg: &DriveConfig) -> Self {
        let x = tau + crate::model::level_offset(idx, cfg);
        Self { value: 0.5 * x * x - crate::model::passage_phase(idx, cfg) }
    }
}

/// Harmonic cutoff for the `n` sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruncationSpec {
    pub n_max: u32,
}

impl TruncationSpec {
    /// `max(ceil(A/omega) + 20, 40)`.
    pub fn default_for(cfg: &DriveConfig) -> Self {
        let base = min_order(cfg);
        Self { n_max: (base + 20).max(40) }
    }

    /// An explicit cutoff, which must cover the Bessel bandwidth `ceil(A/omega)`.
    pub fn new(n_max: u32, cfg: &DriveConfig) -> Result<Self> {
        let need = min_order(cfg);
        if n_max < need {
            return Err(Error::InvalidConfig(format!(
                "n_max = {n_max} is below ceil(amp_rf / freq_rf) = {need}"
            )));
        }
        Ok(Self { n_max })
    }
}

fn min_order(cfg: &DriveConfig) -> u32 {
    let x = cfg.bessel_argument().abs();
    if x.is_finite() {
        x.ceil().min(u32::MAX as f64 / 2.0) as u32
    } else {
        0
    }
}

/// `(L, M)` at `(x, y)`; `x` may be infinite.
pub fn lm_kernel(x: impl Into<ExtendedReal>, y: f64) -> LMKernel {
    let (cx, sx) = scaled_fresnel(x.into());
    let (sy, cy) = y.sin_cos();
    LMKernel { l: cx * sy - sx * cy, m: cx * cy + sx * sy }
}

/// `(F_+, F_-, G_+, G_-)` with `F_pm = (C C' pm S S')/2`, `G_pm = (C S' pm S C')/2`.
pub fn fg_kernels(x: impl Into<ExtendedReal>, xp: impl Into<ExtendedReal>) -> (f64, f64, f64, f64) {
    let (c, s) = scaled_fresnel(x.into());
    let (cp, sp) = scaled_fresnel(xp.into());
    (
        0.5 * (c * cp + s * sp),
        0.5 * (c * cp - s * sp),
        0.5 * (c * sp + s * cp),
        0.5 * (c * sp - s * cp),
    )
}

/// `a_c = sum_n J_n cos K_n^0(tau)`, `a_s = sum_n J_n sin K_n^0(tau)`.
pub fn ac_as(tau: f64, cfg: &DriveConfig, trunc: TruncationSpec) -> Result<(f64, f64)> {
    let h = Harmonics::new(cfg, trunc.n_max)?;
    Ok(ac_as_with(tau, &h))
}

fn ac_as_with(tau: f64, h: &Harmonics) -> (f64, f64) {
    let n_max = h.n_max();
    let (mut ac, mut as_) = (0.0, 0.0);
    for n in -n_max..=n_max {
        let idx = HarmonicIndex::new(n, Alpha::Zero);
        let x = tau + h.offset(idx);
        let k = 0.5 * x * x - h.phase(idx);
        let (s, c) = k.sin_cos();
        ac += h.bessel(n) * c;
        as_ += h.bessel(n) * s;
    }
    (ac, as_)
}

struct Term {
    coupling: f64,
    offset: f64,
    phase: f64,
}

fn terms(h: &Harmonics) -> Vec<Term> {
    h.indices()
        .map(|i| Term { coupling: h.coupling(i), offset: h.offset(i), phase: h.phase(i) })
        .filter(|t| t.coupling != 0.0)
        .collect()
}

/// Precomputed harmonic data for evaluating the perturbative solution at many times.
pub struct Perturbative {
    harmonics: Harmonics,
    terms: Vec<Term>,
}

impl Perturbative {
    pub fn new(cfg: &DriveConfig, trunc: TruncationSpec) -> Result<Self> {
        cfg.validate()?;
        let harmonics = Harmonics::new(cfg, trunc.n_max)?;
        let terms = terms(&harmonics);
        Ok(Self { harmonics, terms })
    }

    /// `(sum J L, sum J M)` at `tau`.
    fn sums(&self, tau: f64) -> (f64, f64) {
        let (mut sl, mut sm) = (0.0, 0.0);
        for t in &self.terms {
            let k = lm_kernel(tau + t.offset, t.phase);
            sl += t.coupling * k.l;
            sm += t.coupling * k.m;
        }
        (sl, sm)
    }

    /// Bloch vector at `tau`. `u_z` is not clamped to `[-1, 1]`.
    pub fn at(&self, tau: f64) -> BlochVector {
        let (sl, sm) = self.sums(tau);
        let (ac, as_) = ac_as_with(tau, &self.harmonics);
        let root = PI.sqrt();
        BlochVector {
            ux: 2.0 * root * (ac * sl + as_ * sm),
            uy: 2.0 * root * (as_ * sl - ac * sm),
            uz: 1.0 - 2.0 * PI * (sl * sl + sm * sm),
        }
    }

    /// `u_z` from the double sum over pairs of harmonics with the `F_+`/`G_-` kernel.
    pub fn uz_pairwise(&self, tau: f64) -> f64 {
        let fresnel: Vec<(f64, f64)> = self
            .terms
            .iter()
            .map(|t| scaled_fresnel(ExtendedReal::Finite(tau + t.offset)))
            .collect();
        let mut acc = 0.0;
        for (t, &(c, s)) in self.terms.iter().zip(&fresnel) {
            for (u, &(cp, sp)) in self.terms.iter().zip(&fresnel) {
                let f_plus = 0.5 * (c * cp + s * sp);
                let g_minus = 0.5 * (c * sp - s * cp);
                let dp = t.phase - u.phase;
                acc += t.coupling * u.coupling * (dp.cos() * f_plus - dp.sin() * g_minus);
            }
        }
        1.0 - 4.0 * PI * acc
    }

    /// `u_z(+inf) = 1 - 4 pi sum J J' cos(Psi - Psi')`.
    pub fn asymptotic_uz(&self) -> f64 {
        // The double sum is |sum J e^{i Psi}|^2.
        let (mut re, mut im) = (0.0, 0.0);
        for t in &self.terms {
            re += t.coupling * t.phase.cos();
            im += t.coupling * t.phase.sin();
        }
        1.0 - 4.0 * PI * (re * re + im * im)
    }
}

/// First-order Bloch vector at `tau`, starting from the north pole at `-inf`.
pub fn bloch_perturbative(tau: f64, cfg: &DriveConfig, trunc: TruncationSpec) -> Result<BlochVector> {
    Ok(Perturbative::new(cfg, trunc)?.at(tau))
}

/// `u_z(+inf)` of the perturbative solution.
pub fn bloch_asymptotic_uz(cfg: &DriveConfig, trunc: TruncationSpec) -> Result<f64> {
    Ok(Perturbative::new(cfg, trunc)?.asymptotic_uz())
}

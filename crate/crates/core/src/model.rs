//! Driven two-level model: parameters, field vector, Hamiltonian and the
//! `(n, alpha)` harmonic bookkeeping used by the closed-form results.
//!
//! Everything is dimensionless with the sweep velocity scaled to one:
//! times are `tau = t sqrt(v)`, energies and frequencies are in units of
//! `sqrt(v)`. [`DriveConfig::from_physical`] performs that rescaling.

use crate::error::{Error, Result};
use crate::specfun::{bessel_j, BesselTable};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Drive and sweep parameters, dimensionless.
///
/// The field vector is
/// `b = (delta + amp_mw cos(freq_mw tau + phase), 0, v tau + eps0 + amp_rf cos(freq_rf tau))`.
/// After rescaling `v` is 1. The value `v = 0` is accepted for the zero-sweep
/// special cases, in which case the fields are taken as given.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DriveConfig {
    pub v: f64,
    pub delta: f64,
    pub eps0: f64,
    pub amp_rf: f64,
    pub freq_rf: f64,
    pub amp_mw: f64,
    pub freq_mw: f64,
    pub phase: f64,
}

impl Default for DriveConfig {
    fn default() -> Self {
        Self {
            v: 1.0,
            delta: 0.0,
            eps0: 0.0,
            amp_rf: 0.0,
            freq_rf: 0.0,
            amp_mw: 0.0,
            freq_mw: 0.0,
            phase: 0.0,
        }
    }
}

impl DriveConfig {
    /// Rescale physical parameters (any consistent units, `v > 0`) to the
    /// dimensionless convention.
    pub fn from_physical(phys: DriveConfig) -> Result<Self> {
        phys.check_finite()?;
        if !(phys.v > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "sweep velocity must satisfy v > 0, got v = {}",
                phys.v
            )));
        }
        let s = phys.v.sqrt();
        let cfg = Self {
            v: 1.0,
            delta: phys.delta / s,
            eps0: phys.eps0 / s,
            amp_rf: phys.amp_rf / s,
            freq_rf: phys.freq_rf / s,
            amp_mw: phys.amp_mw / s,
            freq_mw: phys.freq_mw / s,
            phase: phys.phase,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// A configuration without the linear sweep (`v = 0`).
    pub fn zero_sweep(self) -> Self {
        Self { v: 0.0, ..self }
    }

    fn check_finite(&self) -> Result<()> {
        let fields = [
            ("v", self.v),
            ("delta", self.delta),
            ("eps0", self.eps0),
            ("amp_rf", self.amp_rf),
            ("freq_rf", self.freq_rf),
            ("amp_mw", self.amp_mw),
            ("freq_mw", self.freq_mw),
            ("phase", self.phase),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                return Err(Error::InvalidConfig(format!("{name} must be finite, got {value}")));
            }
        }
        Ok(())
    }

    /// Check the invariants: finite fields, `v > 0` (or exactly 0 for the
    /// zero-sweep cases), positive frequencies wherever the matching
    /// amplitude is nonzero.
    pub fn validate(&self) -> Result<()> {
        self.check_finite()?;
        if self.v < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "sweep velocity must satisfy v > 0 (v = 0 only for zero-sweep cases), got v = {}",
                self.v
            )));
        }
        if self.amp_rf != 0.0 && !(self.freq_rf > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "freq_rf must be > 0 when amp_rf != 0, got freq_rf = {}",
                self.freq_rf
            )));
        }
        if self.amp_mw != 0.0 && !(self.freq_mw > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "freq_mw must be > 0 when amp_mw != 0, got freq_mw = {}",
                self.freq_mw
            )));
        }
        Ok(())
    }

    /// Argument `A / omega` of the Bessel functions (0 without RF drive).
    pub fn bessel_argument(&self) -> f64 {
        if self.amp_rf == 0.0 {
            0.0
        } else {
            self.amp_rf / self.freq_rf
        }
    }

    /// Look up a field by name; used by the sweep runner.
    pub fn get(&self, name: &str) -> Option<f64> {
        Some(match name {
            "v" => self.v,
            "delta" => self.delta,
            "eps0" => self.eps0,
            "amp_rf" => self.amp_rf,
            "freq_rf" => self.freq_rf,
            "amp_mw" => self.amp_mw,
            "freq_mw" => self.freq_mw,
            "phase" => self.phase,
            _ => return None,
        })
    }

    /// Set a field by name. Returns `false` for unknown names.
    pub fn set(&mut self, name: &str, value: f64) -> bool {
        let slot = match name {
            "v" => &mut self.v,
            "delta" => &mut self.delta,
            "eps0" => &mut self.eps0,
            "amp_rf" => &mut self.amp_rf,
            "freq_rf" => &mut self.freq_rf,
            "amp_mw" => &mut self.amp_mw,
            "freq_mw" => &mut self.freq_mw,
            "phase" => &mut self.phase,
            _ => return false,
        };
        *slot = value;
        true
    }

    pub const FIELDS: [&'static str; 8] =
        ["v", "delta", "eps0", "amp_rf", "freq_rf", "amp_mw", "freq_mw", "phase"];
}

/// Microwave sub-crossing label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Alpha {
    Minus,
    Zero,
    Plus,
}

impl Alpha {
    pub const ALL: [Alpha; 3] = [Alpha::Minus, Alpha::Zero, Alpha::Plus];

    /// -1, 0 or +1.
    pub fn sign(self) -> f64 {
        match self {
            Alpha::Minus => -1.0,
            Alpha::Zero => 0.0,
            Alpha::Plus => 1.0,
        }
    }

    /// Coupling `Delta_alpha`: `2 delta` for the static term, `amp_mw` for the sidebands.
    pub fn coupling(self, cfg: &DriveConfig) -> f64 {
        match self {
            Alpha::Zero => 2.0 * cfg.delta,
            Alpha::Minus | Alpha::Plus => cfg.amp_mw,
        }
    }

    /// Phase `phi_alpha`: `+phase`, `-phase` or 0.
    pub fn phase(self, cfg: &DriveConfig) -> f64 {
        self.sign() * cfg.phase
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Alpha::Minus => "-",
            Alpha::Zero => "0",
            Alpha::Plus => "+",
        })
    }
}

/// Harmonic `(n, alpha)`: `n` RF photons, microwave sub-crossing `alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HarmonicIndex {
    pub n: i32,
    pub alpha: Alpha,
}

impl HarmonicIndex {
    pub fn new(n: i32, alpha: Alpha) -> Self {
        Self { n, alpha }
    }
}

/// Field vector `b(tau)`; `by` is always zero in this model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldVector {
    pub bx: f64,
    pub by: f64,
    pub bz: f64,
}

impl FieldVector {
    pub fn norm(&self) -> f64 {
        (self.bx * self.bx + self.by * self.by + self.bz * self.bz).sqrt()
    }
}

pub fn field_vector(tau: f64, cfg: &DriveConfig) -> FieldVector {
    let mw = if cfg.amp_mw == 0.0 {
        0.0
    } else {
        cfg.amp_mw * (cfg.freq_mw * tau + cfg.phase).cos()
    };
    let rf = if cfg.amp_rf == 0.0 {
        0.0
    } else {
        cfg.amp_rf * (cfg.freq_rf * tau).cos()
    };
    FieldVector { bx: cfg.delta + mw, by: 0.0, bz: cfg.v * tau + cfg.eps0 + rf }
}

/// 2x2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hamiltonian2x2 {
    pub m: [[Complex64; 2]; 2],
}

impl Hamiltonian2x2 {
    /// `(sigma . b) / 2`.
    pub fn from_field(b: FieldVector) -> Self {
        let h = |re: f64, im: f64| Complex64::new(re / 2.0, im / 2.0);
        Self {
            m: [[h(b.bz, 0.0), h(b.bx, -b.by)], [h(b.bx, b.by), h(-b.bz, 0.0)]],
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.m[0][0] + self.m[1][1]
    }

    /// Largest deviation from Hermiticity.
    pub fn hermiticity_defect(&self) -> f64 {
        let d00 = (self.m[0][0] - self.m[0][0].conj()).norm();
        let d11 = (self.m[1][1] - self.m[1][1].conj()).norm();
        let d01 = (self.m[0][1] - self.m[1][0].conj()).norm();
        d00.max(d11).max(d01)
    }

    /// `H psi`.
    pub fn apply(&self, psi: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.m[0][0] * psi[0] + self.m[0][1] * psi[1],
            self.m[1][0] * psi[0] + self.m[1][1] * psi[1],
        ]
    }
}

pub fn hamiltonian(tau: f64, cfg: &DriveConfig) -> Hamiltonian2x2 {
    Hamiltonian2x2::from_field(field_vector(tau, cfg))
}

/// `(E_up, E_down) = (+|b|/2, -|b|/2)`.
pub fn eigenenergies(tau: f64, cfg: &DriveConfig) -> (f64, f64) {
    let half = field_vector(tau, cfg).norm() / 2.0;
    (half, -half)
}

/// `omega_n^alpha = eps0 + n omega + alpha omega_f`.
pub fn level_offset(idx: HarmonicIndex, cfg: &DriveConfig) -> f64 {
    cfg.eps0 + idx.n as f64 * cfg.freq_rf + idx.alpha.sign() * cfg.freq_mw
}

/// `J_n^alpha = Delta_alpha J_n(A/omega) / 4`.
pub fn effective_coupling(idx: HarmonicIndex, cfg: &DriveConfig) -> Result<f64> {
    Ok(idx.alpha.coupling(cfg) / 4.0 * bessel_j(idx.n, cfg.bessel_argument())?)
}

/// `Psi_n^alpha = (omega_n^alpha)^2 / 2 - phi_alpha`.
pub fn passage_phase(idx: HarmonicIndex, cfg: &DriveConfig) -> f64 {
    let w = level_offset(idx, cfg);
    w * w / 2.0 - idx.alpha.phase(cfg)
}

/// Couplings, offsets and phases for all `|n| <= n_max`, with one Bessel
/// table shared by the three sub-crossings.
#[derive(Debug, Clone)]
pub struct Harmonics {
    cfg: DriveConfig,
    bessel: BesselTable,
}

impl Harmonics {
    pub fn new(cfg: &DriveConfig, n_max: u32) -> Result<Self> {
        Ok(Self { cfg: *cfg, bessel: BesselTable::new(n_max, cfg.bessel_argument())? })
    }

    pub fn n_max(&self) -> i32 {
        self.bessel.n_max()
    }

    pub fn config(&self) -> &DriveConfig {
        &self.cfg
    }

    /// `J_n(A/omega)`, zero outside the table.
    pub fn bessel(&self, n: i32) -> f64 {
        self.bessel.get(n)
    }

    pub fn coupling(&self, idx: HarmonicIndex) -> f64 {
        idx.alpha.coupling(&self.cfg) / 4.0 * self.bessel.get(idx.n)
    }

    pub fn offset(&self, idx: HarmonicIndex) -> f64 {
        level_offset(idx, &self.cfg)
    }

    pub fn phase(&self, idx: HarmonicIndex) -> f64 {
        passage_phase(idx, &self.cfg)
    }

    /// Every index with `|n| <= n_max`, `alpha` inner.
    pub fn indices(&self) -> impl Iterator<Item = HarmonicIndex> {
        let n_max = self.n_max();
        (-n_max..=n_max)
            .flat_map(|n| Alpha::ALL.into_iter().map(move |a| HarmonicIndex::new(n, a)))
    }
}

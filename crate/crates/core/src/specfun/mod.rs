//! Special functions needed by the closed-form results.
//!
//! Everything here is pure and deterministic.

mod bessel;
mod fresnel;
mod gamma;
mod weber;

pub use bessel::{bessel_j, bessel_j_upto, BesselTable, MAX_ARGUMENT, MAX_ORDER};
pub use fresnel::{fresnel, scaled_fresnel, ExtendedReal, FresnelPair};
pub use gamma::{gamma, log_gamma, recip_gamma, stokes_phase};
pub use weber::{weber_d, MAX_ABS_NU, MAX_ABS_Z, SWITCH_RADIUS};

/// Complex scalar used throughout the crate.
pub type ComplexScalar = num_complex::Complex64;

/// One row of the special-function self test.
#[derive(Debug, Clone)]
pub struct SelfTestCheck {
    pub name: &'static str,
    pub worst: f64,
    pub tolerance: f64,
}

impl SelfTestCheck {
    pub fn passed(&self) -> bool {
        self.worst.is_finite() && self.worst <= self.tolerance
    }
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Runs the identity and quadrature checks and reports the worst deviation of
/// each against its tolerance.
pub fn selftest() -> Vec<SelfTestCheck> {
    use std::f64::consts::PI;
    let mut out = Vec::new();
    let xs: Vec<f64> = (0..=30).map(|k| k as f64 * 0.97 + 0.013).collect();

    let mut sq = 0.0_f64;
    let mut lin = 0.0_f64;
    let mut ja = 0.0_f64;
    for &x in &xs {
        let n = (x.abs() + 30.0).ceil() as u32;
        let Ok(t) = BesselTable::new(n, x) else {
            sq = f64::INFINITY;
            continue;
        };
        sq = sq.max((t.iter().map(|(_, j)| j * j).sum::<f64>() - 1.0).abs());
        lin = lin.max((t.iter().map(|(_, j)| j).sum::<f64>() - 1.0).abs());
        for k in 0..8 {
            let y = 0.41 * k as f64 - 1.3;
            let exact = ComplexScalar::from_polar(1.0, x * y.sin());
            let synth: ComplexScalar =
                t.iter().map(|(n, j)| ComplexScalar::from_polar(j, n as f64 * y)).sum();
            ja = ja.max((exact - synth).norm());
        }
    }
    out.push(SelfTestCheck { name: "bessel: sum J_n^2 = 1", worst: sq, tolerance: 1e-10 });
    out.push(SelfTestCheck { name: "bessel: sum J_n = 1", worst: lin, tolerance: 1e-10 });
    out.push(SelfTestCheck { name: "bessel: Jacobi-Anger resynthesis", worst: ja, tolerance: 1e-9 });

    let mut fr = 0.0_f64;
    for &x in &[0.4, 1.0, 1.7, 3.2, 5.5] {
        let c = simpson(|t| (0.5 * PI * t * t).cos(), 0.0, x, 4000);
        let s = simpson(|t| (0.5 * PI * t * t).sin(), 0.0, x, 4000);
        let p = fresnel(x);
        fr = fr.max((p.c - c).abs()).max((p.s - s).abs());
    }
    out.push(SelfTestCheck { name: "fresnel: quadrature of definition", worst: fr, tolerance: 1e-10 });

    let mut refl = 0.0_f64;
    for &(re, im) in &[(0.3, 0.2), (-1.7, 0.5), (2.2, -1.1), (0.5, 4.0)] {
        let z = ComplexScalar::new(re, im);
        let one = ComplexScalar::new(1.0, 0.0);
        let lhs = match (log_gamma(z), log_gamma(one - z)) {
            (Ok(a), Ok(b)) => (a + b).exp(),
            _ => ComplexScalar::new(f64::NAN, 0.0),
        };
        let rhs = PI / (z * PI).sin();
        refl = refl.max((lhs - rhs).norm() / rhs.norm().max(1.0));
    }
    out.push(SelfTestCheck { name: "log_gamma: reflection", worst: refl, tolerance: 1e-10 });

    let mut modulus = 0.0_f64;
    for &y in &[0.2, 1.0, 3.0, 9.0] {
        let lg = log_gamma(ComplexScalar::new(1.0, y)).map(|v| v.re).unwrap_or(f64::NAN);
        modulus = modulus.max((2.0 * lg - (PI * y / (PI * y).sinh()).ln()).abs());
    }
    out.push(SelfTestCheck { name: "log_gamma: |G(1+iy)|^2", worst: modulus, tolerance: 1e-12 });

    let mut rec = 0.0_f64;
    for &(nr, ni) in &[(0.0, -0.05), (0.0, -0.4), (-1.0, -0.3), (0.3, 1.2)] {
        for &(r, th) in &[(0.5, 0.3), (3.0, 0.785), (6.5, -2.35), (9.0, 2.356), (30.0, -0.785)] {
            let nu = ComplexScalar::new(nr, ni);
            let z = ComplexScalar::from_polar(r, th);
            let vals = (weber_d(nu + 1.0, z), weber_d(nu, z), weber_d(nu - 1.0, z));
            let dev = match vals {
                (Ok(up), Ok(mid), Ok(down)) => {
                    let scale = up.norm().max((z * mid).norm()).max((nu * down).norm());
                    (up - z * mid + nu * down).norm() / scale
                }
                _ => f64::INFINITY,
            };
            rec = rec.max(dev);
        }
    }
    out.push(SelfTestCheck { name: "weber: three-term recurrence", worst: rec, tolerance: 1e-7 });

    let mut closed = 0.0_f64;
    for &(r, th) in &[(1.0, 0.4), (5.0, 2.356), (12.0, -0.785), (40.0, 2.356)] {
        let z = ComplexScalar::from_polar(r, th);
        let g = (-z * z / 4.0).exp();
        let d0 = weber_d(ComplexScalar::new(0.0, 0.0), z);
        let d1 = weber_d(ComplexScalar::new(1.0, 0.0), z);
        let dev = match (d0, d1) {
            (Ok(a), Ok(b)) => ((a - g).norm() / g.norm()).max((b - z * g).norm() / (z * g).norm()),
            _ => f64::INFINITY,
        };
        closed = closed.max(dev);
    }
    out.push(SelfTestCheck { name: "weber: D_0, D_1 closed forms", worst: closed, tolerance: 1e-8 });

    out
}

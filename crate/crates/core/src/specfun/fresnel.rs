//! Fresnel integrals `C(x) = int_0^x cos(pi t^2 / 2) dt`,
//! `S(x) = int_0^x sin(pi t^2 / 2) dt` and the shifted/scaled pair used by the
//! perturbative Bloch solutions.

use num_complex::Complex64;
use std::f64::consts::PI;

/// Switch from the power series to the continued fraction.
const SERIES_LIMIT: f64 = 1.5;
const EPS: f64 = 1.0e-16;
const MAX_ITER: usize = 500;

/// Values of the cosine and sine Fresnel integrals at one argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FresnelPair {
    pub c: f64,
    pub s: f64,
}

/// A real argument that may also be one of the two infinities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    NegInfinity,
    Finite(f64),
    PosInfinity,
}

impl ExtendedReal {
    /// Shift a finite value; infinities absorb the shift.
    pub fn offset(self, by: f64) -> Self {
        match self {
            ExtendedReal::Finite(x) => ExtendedReal::Finite(x + by),
            other => other,
        }
    }
}

impl From<f64> for ExtendedReal {
    fn from(x: f64) -> Self {
        if x == f64::INFINITY {
            ExtendedReal::PosInfinity
        } else if x == f64::NEG_INFINITY {
            ExtendedReal::NegInfinity
        } else {
            ExtendedReal::Finite(x)
        }
    }
}

fn series(ax: f64) -> FresnelPair {
    // C = sum (-1)^k (pi/2)^{2k} x^{4k+1} / ((2k)! (4k+1))
    // S = sum (-1)^k (pi/2)^{2k+1} x^{4k+3} / ((2k+1)! (4k+3))
    let fact = 0.5 * PI * ax * ax;
    let mut term = ax; // (pi/2)^m x^{2m+1} / m!
    let mut c = ax;
    let mut s = 0.0;
    let mut sign_c = 1.0;
    let mut sign_s = 1.0;
    for m in 1..MAX_ITER {
        term *= fact / m as f64;
        let contrib = term / (2 * m + 1) as f64;
        if m % 2 == 0 {
            sign_c = -sign_c;
            c += sign_c * contrib;
        } else {
            s += sign_s * contrib;
            sign_s = -sign_s;
        }
        if contrib < EPS * c.abs().max(s.abs()) {
            break;
        }
    }
    FresnelPair { c, s }
}

fn continued_fraction(ax: f64) -> FresnelPair {
    // Modified Lentz evaluation of the erfc continued fraction.
    let tiny = 1.0e-300;
    let pix2 = PI * ax * ax;
    let mut b = Complex64::new(1.0, -pix2);
    let mut cc = Complex64::new(1.0 / tiny, 0.0);
    let mut d = b.inv();
    let mut h = d;
    let mut n = -1.0_f64;
    for _ in 2..MAX_ITER {
        n += 2.0;
        let a = -n * (n + 1.0);
        b += Complex64::new(4.0, 0.0);
        d = (d * a + b).inv();
        cc = b + cc.inv() * a;
        let del = cc * d;
        h *= del;
        if (del - 1.0).norm_sqr() < EPS * EPS {
            break;
        }
    }
    h *= Complex64::new(ax, -ax);
    let phase = Complex64::new((0.5 * pix2).cos(), (0.5 * pix2).sin());
    let cs = Complex64::new(0.5, 0.5) * (Complex64::new(1.0, 0.0) - phase * h);
    FresnelPair { c: cs.re, s: cs.im }
}

/// Standard Fresnel integrals `(C(x), S(x))`.
pub fn fresnel(x: f64) -> FresnelPair {
    if x.is_nan() {
        return FresnelPair { c: f64::NAN, s: f64::NAN };
    }
    if x.is_infinite() {
        let v = 0.5_f64.copysign(x);
        return FresnelPair { c: v, s: v };
    }
    let ax = x.abs();
    let pair = if ax < SERIES_LIMIT {
        series(ax)
    } else {
        continued_fraction(ax)
    };
    if x < 0.0 {
        FresnelPair { c: -pair.c, s: -pair.s }
    } else {
        pair
    }
}

/// `(1/2 + C(x/sqrt(pi)), 1/2 + S(x/sqrt(pi)))`, so that
/// `sqrt(pi) * first = int_{-inf}^x cos(s^2/2) ds` (and likewise for sine).
pub fn scaled_fresnel(x: ExtendedReal) -> (f64, f64) {
    match x {
        ExtendedReal::NegInfinity => (0.0, 0.0),
        ExtendedReal::PosInfinity => (1.0, 1.0),
        ExtendedReal::Finite(v) => {
            let p = fresnel(v / PI.sqrt());
            (0.5 + p.c, 0.5 + p.s)
        }
    }
}

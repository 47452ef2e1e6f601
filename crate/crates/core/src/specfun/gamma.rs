//! Complex log-gamma (Lanczos, g = 7, nine terms) and the Stokes phase.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Below this real part the argument is first shifted upward with the
/// recurrence `ln G(z) = ln G(z + n) - sum ln(z + k)`.
const SHIFT_BELOW: f64 = 0.5;
/// Beyond this the reflection formula is used instead of a long shift.
const REFLECT_BELOW: f64 = -60.0;

fn is_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

fn lanczos(z: Complex64) -> Complex64 {
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS_COEF[0], 0.0);
    for (i, &p) in LANCZOS_COEF.iter().enumerate().skip(1) {
        x += p / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
}

/// `ln Gamma(z)`, continued analytically from the positive real axis with the
/// branch cut on the negative real axis. The imaginary part is continuous in
/// `z` off that cut, which keeps `arg Gamma(1 - i d)` smooth in `d`.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("log_gamma of non-finite argument {z}")));
    }
    if is_pole(z) {
        return Err(Error::Pole(z.re));
    }
    if z.re >= SHIFT_BELOW {
        return Ok(lanczos(z));
    }
    if z.re >= REFLECT_BELOW {
        let shift = (SHIFT_BELOW - z.re).ceil() as usize;
        let mut acc = lanczos(z + shift as f64);
        for k in 0..shift {
            acc -= (z + k as f64).ln();
        }
        return Ok(acc);
    }
    // ln G(z) = ln pi - ln sin(pi z) - ln G(1 - z)
    let s = (z * PI).sin();
    Ok(Complex64::new(PI.ln(), 0.0) - s.ln() - log_gamma(Complex64::new(1.0, 0.0) - z)?)
}

/// `1 / Gamma(z)`, entire: zero at the poles of Gamma.
pub fn recip_gamma(z: Complex64) -> Complex64 {
    match log_gamma(z) {
        Ok(lg) => (-lg).exp(),
        Err(_) => Complex64::new(0.0, 0.0),
    }
}

/// `Gamma(z)`.
pub fn gamma(z: Complex64) -> Result<Complex64> {
    log_gamma(z).map(|lg| lg.exp())
}

/// Stokes phase `chi(d) = pi/4 + arg Gamma(1 - i d) + d (ln d - 1)`, with
/// `chi(0) = pi/4`.
pub fn stokes_phase(delta: f64) -> Result<f64> {
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(Error::Domain(format!("Stokes phase needs delta >= 0, got {delta}")));
    }
    if delta == 0.0 {
        return Ok(PI / 4.0);
    }
    let arg = log_gamma(Complex64::new(1.0, -delta))?.im;
    Ok(PI / 4.0 + arg + delta * (delta.ln() - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Stirling series after shifting `z` to `|z| > 40`; shares no code with
    /// the Lanczos path.
    fn stirling_oracle(z: Complex64) -> Complex64 {
        let mut w = z;
        let mut acc = Complex64::new(0.0, 0.0);
        while w.norm() < 40.0 || w.re < 1.0 {
            acc -= w.ln();
            w += 1.0;
        }
        // Bernoulli B_2k / (2k (2k-1))
        let coeffs = [
            1.0 / 12.0,
            -1.0 / 360.0,
            1.0 / 1260.0,
            -1.0 / 1680.0,
            1.0 / 1188.0,
            -691.0 / 360360.0,
            1.0 / 156.0,
        ];
        let mut series = Complex64::new(0.0, 0.0);
        let w2 = w * w;
        let mut wp = w;
        for c in coeffs {
            series += c / wp;
            wp *= w2;
        }
        acc + (w - 0.5) * w.ln() - w + 0.5 * (2.0 * PI).ln() + series
    }

    #[test]
    fn gamma_one_and_two() {
        assert!(log_gamma(Complex64::new(1.0, 0.0)).unwrap().norm() < 1e-15);
        assert!(log_gamma(Complex64::new(2.0, 0.0)).unwrap().norm() < 1e-15);
        let lg = log_gamma(Complex64::new(5.0, 0.0)).unwrap();
        assert!((lg.re - 24.0_f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn modulus_on_the_line_re_one() {
        // |Gamma(1 + iy)|^2 = pi y / sinh(pi y)
        for &y in &[-1.0, 0.3, 2.0, 7.5] {
            let lg = log_gamma(Complex64::new(1.0, y)).unwrap();
            let want = (PI * y / (PI * y).sinh()).ln();
            assert!((2.0 * lg.re - want).abs() < 1e-12);
        }
    }

    #[test]
    fn agrees_with_shifted_stirling_oracle() {
        let pts = [
            (1.0, -1.0),
            (0.5, 3.0),
            (0.2, -0.4),
            (-2.5, 1.5),
            (-7.3, -0.1),
            (10.0, 30.0),
            (-30.0, 12.0),
            (3.0, -45.0),
        ];
        for (re, im) in pts {
            let z = Complex64::new(re, im);
            let got = log_gamma(z).unwrap();
            let want = stirling_oracle(z);
            assert!((got - want).norm() < 1e-12, "z={z}: {got} vs {want}");
        }
    }

    #[test]
    fn reflection_consistency() {
        for &(re, im) in &[(0.3, 0.2), (-1.7, 0.5), (2.2, -1.1), (-0.5, 0.0)] {
            let z = Complex64::new(re, im);
            let one_minus = Complex64::new(1.0, 0.0) - z;
            let lhs = (log_gamma(z).unwrap() + log_gamma(one_minus).unwrap()).exp();
            let rhs = PI / (z * PI).sin();
            assert!((lhs - rhs).norm() < 1e-10 * rhs.norm().max(1.0));
        }
    }

    #[test]
    fn poles() {
        assert_eq!(log_gamma(Complex64::new(0.0, 0.0)), Err(Error::Pole(0.0)));
        assert_eq!(log_gamma(Complex64::new(-3.0, 0.0)), Err(Error::Pole(-3.0)));
        assert!(log_gamma(Complex64::new(-3.0, 1e-9)).is_ok());
        assert_eq!(recip_gamma(Complex64::new(-2.0, 0.0)), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn stokes_phase_values() {
        assert_eq!(stokes_phase(0.0).unwrap(), PI / 4.0);
        let arg = stirling_oracle(Complex64::new(1.0, -1.0)).im;
        assert!((stokes_phase(1.0).unwrap() - (PI / 4.0 + arg - 1.0)).abs() < 1e-12);
        let d = 0.25;
        let arg = stirling_oracle(Complex64::new(1.0, -d)).im;
        let want = PI / 4.0 + arg + d * (d.ln() - 1.0);
        assert!((stokes_phase(d).unwrap() - want).abs() < 1e-12);
        assert!((stokes_phase(1e-12).unwrap() - PI / 4.0).abs() < 1e-9);
        assert!(stokes_phase(-0.1).is_err());
        assert!(stokes_phase(f64::NAN).is_err());
    }

    #[test]
    fn stokes_phase_is_continuous() {
        // Slope is d ln d near the origin, bounded elsewhere.
        let mut prev = stokes_phase(0.0).unwrap();
        for k in 1..=20000 {
            let d = k as f64 * 1e-3;
            let cur = stokes_phase(d).unwrap();
            assert!((cur - prev).abs() < 0.01, "jump at {d}");
            prev = cur;
        }
    }
}

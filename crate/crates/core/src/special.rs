//! Complex log-gamma (Lanczos, g = 7) with reflection.

use std::f64::consts::PI;

use num_complex::Complex64;

const G: f64 = 7.0;
const COEFFS: [f64; 9] = [
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

/// Whether `z` is a non-positive integer, i.e. a pole of `Gamma`.
pub fn is_gamma_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0
}

/// `log Gamma(z)` on some branch; only `exp` of it is used.
pub fn lgamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // Gamma(z) Gamma(1 - z) = pi / sin(pi z)
        let s = (z * PI).sin();
        Complex64::new(PI, 0.0).ln() - s.ln() - lgamma(1.0 - z)
    } else {
        let z = z - 1.0;
        let mut x = Complex64::new(COEFFS[0], 0.0);
        for (i, &c) in COEFFS.iter().enumerate().skip(1) {
            x += c / (z + i as f64);
        }
        let t = z + G + 0.5;
        Complex64::new(0.5 * (2.0 * PI).ln(), 0.0) + (z + 0.5) * t.ln() - t + x.ln()
    }
}

/// `Gamma(z)`; poles give infinity.
pub fn gamma(z: Complex64) -> Complex64 {
    if is_gamma_pole(z) {
        return Complex64::new(f64::INFINITY, 0.0);
    }
    lgamma(z).exp()
}

pub fn gamma_real(x: f64) -> f64 {
    gamma(Complex64::new(x, 0.0)).re
}

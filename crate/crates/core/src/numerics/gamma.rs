//! Complex Gamma function (Lanczos, g = 7, nine terms) with reflection.

use num::complex::Complex64;
use std::f64::consts::PI;

const G: f64 = 7.0;
const COEF: [f64; 9] = [
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

/// True when z is (numerically) a non-positive integer.
pub fn is_gamma_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// Γ(z); infinite at the poles.
pub fn gamma(z: Complex64) -> Complex64 {
    if is_gamma_pole(z) {
        return Complex64::new(f64::INFINITY, 0.0);
    }
    if z.re < 0.5 {
        return PI / ((PI * z).sin() * gamma(1.0 - z));
    }
    let z = z - 1.0;
    let mut x = Complex64::new(COEF[0], 0.0);
    for (i, c) in COEF.iter().enumerate().skip(1) {
        x += *c / (z + i as f64);
    }
    let t = z + G + 0.5;
    (2.0 * PI).sqrt() * t.powc(z + 0.5) * (-t).exp() * x
}

/// 1/Γ(z), entire; exactly zero at the poles of Γ.
pub fn rgamma(z: Complex64) -> Complex64 {
    if is_gamma_pole(z) {
        return Complex64::new(0.0, 0.0);
    }
    if z.re < 0.5 {
        // 1/Γ(z) = Γ(1−z) sin(πz)/π
        return gamma(1.0 - z) * (PI * z).sin() / PI;
    }
    1.0 / gamma(z)
}

pub fn gamma_real(x: f64) -> f64 {
    gamma(Complex64::new(x, 0.0)).re
}

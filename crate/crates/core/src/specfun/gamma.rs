use core::f64::consts::PI;

use crate::error::{Error, Result};

// Lanczos approximation, g = 7, nine terms.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
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

/// `sin(πx)`, reduced exactly before the trigonometric call so that
/// integers give exact zeros.
pub fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * libm::round(x / 2.0); // r in [-1, 1]
    let folded = if r > 0.5 {
        1.0 - r
    } else if r < -0.5 {
        -1.0 - r
    } else {
        r
    };
    libm::sin(PI * folded)
}

/// Euler's gamma function on the reals, away from the poles.
pub fn gamma_fn(z: f64) -> Result<f64> {
    if z.is_nan() || (z <= 0.0 && z == libm::floor(z)) {
        return Err(Error::GammaPole(z));
    }
    if z < 0.5 {
        return Ok(PI / (sin_pi(z) * gamma_fn(1.0 - z)?));
    }
    let x = z - 1.0;
    let t = x + LANCZOS_G + 0.5;
    let series = LANCZOS[1..]
        .iter()
        .enumerate()
        .fold(LANCZOS[0], |acc, (i, c)| acc + c / (x + (i + 1) as f64));
    Ok(libm::sqrt(2.0 * PI) * libm::exp((x + 0.5) * libm::log(t) - t) * series)
}

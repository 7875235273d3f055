//! Standard normal density and distribution function.
//!
//! The distribution function goes through the complementary error function
//! from `libm` (a port of the FreeBSD/SunPro `s_erf.c` routine, accurate to
//! about one ulp), so lower-tail probabilities keep full relative precision
//! instead of being computed as `1 - something`.

use std::f64::consts::FRAC_1_SQRT_2;

/// `1 / √(2π)`, the density at zero.
pub const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Standard normal density, `exp(-x²/2) / √(2π)`.
#[inline]
pub fn std_normal_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard normal distribution function Φ(x).
#[inline]
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

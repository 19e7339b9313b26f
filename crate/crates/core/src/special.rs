//! Special functions used by the entropy estimators.

use core::f64::consts::PI;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Digamma function ψ(x) for x > 0.
///
/// Shifts the argument above 6 with ψ(x) = ψ(x+1) − 1/x, then applies the
/// asymptotic series ln x − 1/(2x) − Σ B₂ₙ / (2n·x²ⁿ).
pub fn digamma(x: f64) -> f64 {
    if x.is_nan() || x <= 0.0 {
        return f64::NAN;
    }
    let mut x = x;
    let mut acc = 0.0;
    while x < 6.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // Bernoulli terms B2/2, B4/4, …, B12/12
    let series = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32760.0))))));
    acc + libm::log(x) - 0.5 * inv - series
}

/// ln of the volume of the unit ball in `d` dimensions under the Euclidean norm,
/// π^{d/2} / Γ(d/2 + 1).
pub fn log_unit_ball_euclidean(d: usize) -> f64 {
    let h = d as f64 / 2.0;
    h * libm::log(PI) - libm::lgamma(h + 1.0)
}

/// ln of the volume of the unit ball under the max norm, the cube `[-1, 1]^d`.
pub fn log_unit_ball_chebyshev(d: usize) -> f64 {
    d as f64 * core::f64::consts::LN_2
}

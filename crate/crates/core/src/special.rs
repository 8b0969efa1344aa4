//! Special functions needed by the closed-form fast paths.

use num_complex::Complex64;

pub use statrs::function::gamma::{gamma, gamma_ur, ln_gamma};

/// Trigamma `ψ₁(w) = Σ_{k≥0} (w + k)^{-2}` for `Re w > 0`.
///
/// Shifts the argument with `ψ₁(w) = ψ₁(w + 1) + w^{-2}` until `|w| ≥ 20`,
/// then sums the Bernoulli asymptotic series.
pub fn trigamma(w: Complex64) -> Complex64 {
    let mut w = w;
    let mut acc = Complex64::new(0.0, 0.0);
    while w.norm() < 20.0 {
        acc += (w * w).inv();
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    // 1/w + 1/(2w²) + Σ B_{2k} / w^{2k+1}
    const B: [f64; 7] = [
        1.0 / 6.0,
        -1.0 / 30.0,
        1.0 / 42.0,
        -1.0 / 30.0,
        5.0 / 66.0,
        -691.0 / 2730.0,
        7.0 / 6.0,
    ];
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = inv * inv2;
    for b in B {
        series += pow * b;
        pow *= inv2;
    }
    acc + inv + inv2 * 0.5 + series
}

/// Principal branch `w^{-s}` for real `s`.
pub fn cpow_neg(w: Complex64, s: f64) -> Complex64 {
    (-s * w.ln()).exp()
}

/// `Γ(n+1)Γ(α+1)/Γ(n+1+α)` evaluated through log-gamma.
pub fn beta_moment(n: f64, alpha: f64) -> f64 {
    (ln_gamma(n + 1.0) + ln_gamma(alpha + 1.0) - ln_gamma(n + 1.0 + alpha)).exp()
}

/// `ln` of the threshold beyond which `ln n / n^ρ < b`; `+∞` for `ρ = 0`,
/// `−∞` when every `n ≥ 1` qualifies.
pub fn ln_logpoly_threshold(rho: f64, b: f64) -> f64 {
    assert!(rho >= 0.0 && b > 0.0, "need ρ ≥ 0 and b > 0");
    if rho == 0.0 {
        return f64::INFINITY;
    }
    let l = -(b * rho).ln();
    if l <= 0.0 {
        return f64::NEG_INFINITY;
    }
    ((2.0 * l).ln() - (b * rho).ln()) / rho
}

/// `(2·[ln(1/(bρ))]₊ / (bρ))^{1/ρ}`: for `n` above it, `ln n / n^ρ < b`.
pub fn logpoly_threshold(rho: f64, b: f64) -> f64 {
    ln_logpoly_threshold(rho, b).exp()
}

/// `ln` of the threshold beyond which `(ln n)^λ / n^ρ < b`.
pub fn ln_logpoly_threshold_general(lambda: f64, rho: f64, b: f64) -> f64 {
    assert!(lambda > 0.0, "need λ > 0");
    // (ln n)^λ / n^ρ < b  ⇔  ln n / n^{ρ/λ} < b^{1/λ}
    ln_logpoly_threshold(rho / lambda, b.powf(1.0 / lambda))
}

/// `(2λ·[ln(λ/(b^{1/λ}ρ))]₊ / (b^{1/λ}ρ))^{λ/ρ}`.
pub fn logpoly_threshold_general(lambda: f64, rho: f64, b: f64) -> f64 {
    ln_logpoly_threshold_general(lambda, rho, b).exp()
}

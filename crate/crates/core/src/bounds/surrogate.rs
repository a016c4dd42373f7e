use std::f64::consts::{E, PI};

use super::{bound_with_kappa, omega, BoundBreakdown, BoundQuery, BoundsError};

fn check_sufficiency_args(delta: f64, epsilon: f64) -> Result<(), BoundsError> {
    if !(delta > 0.0 && delta <= 1.0) || !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(BoundsError::InvalidQuery(format!("δ = {delta} and ε = {epsilon} must lie in (0,1]")));
    }
    Ok(())
}

fn check_scale(c: f64) -> Result<(), BoundsError> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(BoundsError::InvalidQuery(format!("envelope scale {c} must be > 0")));
    }
    Ok(())
}

fn check_ratio(r: f64) -> Result<(), BoundsError> {
    if !(r > 0.0 && r < 1.0) {
        return Err(BoundsError::InvalidQuery(format!("decay ratio {r} must lie in (0,1)")));
    }
    Ok(())
}

/// Gap bound for a support of `k` symbols (`κ*` replaced by `k`).
pub fn bound_finite(k: usize, query: &BoundQuery) -> Result<BoundBreakdown, BoundsError> {
    query.validate()?;
    if k == 0 {
        return Err(BoundsError::InvalidQuery("support size must be ≥ 1".into()));
    }
    Ok(bound_with_kappa(k as f64, 0.0, query, false))
}

/// `24·k·ln k·ln(12/ε²)/ε²`
pub fn finite_main_term(k: usize, epsilon: f64) -> f64 {
    let kf = k as f64;
    let e2 = epsilon * epsilon;
    24.0 * kf * kf.ln() * (12.0 / e2).ln() / e2
}

/// Sample-size threshold for a support of `k ≥ 2` symbols.
pub fn sufficient_finite(k: usize, delta: f64, epsilon: f64) -> Result<f64, BoundsError> {
    check_sufficiency_args(delta, epsilon)?;
    if k < 2 {
        return Err(BoundsError::InvalidQuery("the finite-support sample size needs k ≥ 2".into()));
    }
    Ok(finite_main_term(k, epsilon).max(omega(delta, epsilon)))
}

/// `e·C̃·(ln n + ln(e/r))/ln(1/r)`, an upper bound on `κ*` whenever
/// `q_j ≤ C·r^j`. `C̃ = max{C, 1}`.
pub fn exponential_surrogate(c: f64, r: f64, n: u64) -> f64 {
    let ct = c.max(1.0);
    let ln_inv_r = -r.ln();
    E * ct * ((n as f64).ln() + 1.0 + ln_inv_r) / ln_inv_r
}

/// `e·C·(ln n + ln(1/r))/ln(1/r)`. Smaller than [`exponential_surrogate`]
/// and not an upper bound on `κ*` in general (it fails for `C < 1`).
pub fn exponential_surrogate_stated(c: f64, r: f64, n: u64) -> f64 {
    let ln_inv_r = -r.ln();
    E * c * ((n as f64).ln() + ln_inv_r) / ln_inv_r
}

/// Gap bound for `q_j ≤ C·r^j`, using [`exponential_surrogate`].
pub fn bound_exponential(c: f64, r: f64, query: &BoundQuery) -> Result<BoundBreakdown, BoundsError> {
    query.validate()?;
    check_scale(c)?;
    check_ratio(r)?;
    Ok(bound_with_kappa(exponential_surrogate(c, r, query.n), f64::NAN, query, false))
}

/// Branches of the exponential-family sample-size threshold.
pub fn exponential_branches(c: f64, r: f64, delta: f64, epsilon: f64) -> [f64; 3] {
    let ct = c.max(1.0);
    let e2 = epsilon * epsilon;
    let ln_inv_r = -r.ln();
    let a = 36.0 * E * ct / (e2 * ln_inv_r);
    let first = a * a.ln().powi(2);
    let mid = 3.0 + (6.0 * PI * E.powi(3) / delta).ln() / ln_inv_r;
    let second = 12.0 * E * ct / e2 * mid * (6.0 * E * ct / e2 * mid).ln();
    let third = 6.0 * E * ct / e2 * (1.0 + 1.0 / ln_inv_r) * (2.0 * PI / delta).ln();
    [first, second, third]
}

/// Leading branch of the exponential-family threshold.
pub fn exponential_main_term(c: f64, r: f64, epsilon: f64) -> f64 {
    exponential_branches(c, r, 1.0, epsilon)[0]
}

/// Sample-size threshold for `q_j ≤ C·r^j`: the largest branch and `ω`.
pub fn sufficient_exponential(c: f64, r: f64, delta: f64, epsilon: f64) -> Result<f64, BoundsError> {
    check_sufficiency_args(delta, epsilon)?;
    check_scale(c)?;
    check_ratio(r)?;
    let b = exponential_branches(c, r, delta, epsilon);
    Ok(b[0].max(b[1]).max(b[2]).max(omega(delta, epsilon)))
}

/// `e·C̃/(γ−1)·n^{1/γ}·(ln n + γ)`, an upper bound on `κ*` whenever
/// `q_j ≤ C·(j+1)^{−γ}`.
pub fn powerlaw_surrogate(c: f64, gamma: f64, n: u64) -> Result<f64, BoundsError> {
    if !(gamma > 1.0) {
        return Err(BoundsError::GammaOutOfRange(gamma));
    }
    let nf = n as f64;
    Ok(E * c.max(1.0) / (gamma - 1.0) * nf.powf(1.0 / gamma) * (nf.ln() + gamma))
}

/// Gap bound for `q_j ≤ C·(j+1)^{−γ}`. For `γ ≤ 1` the bound is infinite and
/// flagged vacuous.
pub fn bound_powerlaw(c: f64, gamma: f64, query: &BoundQuery) -> Result<BoundBreakdown, BoundsError> {
    query.validate()?;
    check_scale(c)?;
    match powerlaw_surrogate(c, gamma, query.n) {
        Ok(k) => Ok(bound_with_kappa(k, f64::NAN, query, false)),
        Err(BoundsError::GammaOutOfRange(_)) => Ok(bound_with_kappa(f64::INFINITY, f64::NAN, query, true)),
        Err(e) => Err(e),
    }
}

/// Branches of the power-law threshold, with `δ₂ = δ/3` in the second and
/// third. Each is `+∞` for `γ ≤ 1`.
pub fn powerlaw_branches(c: f64, gamma: f64, delta: f64, epsilon: f64) -> [f64; 3] {
    if !(gamma > 1.0) {
        return [f64::INFINITY; 3];
    }
    let ct = c.max(1.0);
    let e2 = epsilon * epsilon;
    let gm1 = gamma - 1.0;
    let g = gamma / gm1;
    let ln_2pi_d2 = (2.0 * PI / (delta / 3.0)).ln();

    let a = 9.0 * E * ct / (e2 * gm1);
    let inner1 = 4.0 * g * ((2.0 * g).ln() + 0.5 * a.ln()).max(0.0);
    let first = (g * a.ln() + 2.0 * g * inner1.ln()).exp();

    let b = 6.0 * E * ct / (2.0 * e2) * (3.0 * g + ln_2pi_d2 / gm1);
    let inner2 = 2.0 * g * (g.ln() + b.ln()).max(0.0);
    let second = (g * (b.ln() + inner2.ln())).exp();

    let third = (g * (6.0 * E * ct * gamma / (e2 * gm1) * ln_2pi_d2).ln()).exp();
    [first, second, third]
}

/// Leading branch of the power-law threshold.
pub fn powerlaw_main_term(c: f64, gamma: f64, epsilon: f64) -> f64 {
    powerlaw_branches(c, gamma, 1.0, epsilon)[0]
}

/// Sample-size threshold for `q_j ≤ C·(j+1)^{−γ}`; `+∞` for `γ ≤ 1`.
pub fn sufficient_powerlaw(c: f64, gamma: f64, delta: f64, epsilon: f64) -> Result<f64, BoundsError> {
    check_sufficiency_args(delta, epsilon)?;
    check_scale(c)?;
    let b = powerlaw_branches(c, gamma, delta, epsilon);
    Ok(b[0].max(b[1]).max(b[2]).max(omega(delta, epsilon)))
}

/// Constant-free rates for the three families: gap at sample size `n` and
/// sufficient length at accuracy `ε`.
pub mod rates {
    use std::f64::consts::E;

    /// `√(k·ln n/(2n))`
    pub fn finite_gap(k: usize, n: u64) -> f64 {
        let nf = n as f64;
        (k as f64 * nf.ln() / (2.0 * nf)).sqrt()
    }

    /// `k·ln k·(1/ε²)·ln(1/ε²)`
    pub fn finite_length(k: usize, epsilon: f64) -> f64 {
        let e2 = epsilon * epsilon;
        k as f64 * (k as f64).ln() * (1.0 / e2).ln() / e2
    }

    /// `√(e·C/ln(1/r)·(ln n)²/(2n))`
    pub fn exponential_gap(c: f64, r: f64, n: u64) -> f64 {
        let nf = n as f64;
        (E * c / (-r.ln()) * nf.ln().powi(2) / (2.0 * nf)).sqrt()
    }

    /// `(1/ln(1/r))·(1/ε²)·(ln(1/ε))²`
    pub fn exponential_length(r: f64, epsilon: f64) -> f64 {
        (-epsilon.ln()).powi(2) / (epsilon * epsilon * -r.ln())
    }

    /// `√((ln n)²/((γ−1)·n^{(γ−1)/γ}))`; `+∞` for `γ ≤ 1`.
    pub fn powerlaw_gap(gamma: f64, n: u64) -> f64 {
        if !(gamma > 1.0) {
            return f64::INFINITY;
        }
        let nf = n as f64;
        (nf.ln().powi(2) / ((gamma - 1.0) * nf.powf((gamma - 1.0) / gamma))).sqrt()
    }

    /// `(γ²/(γ−1)³·(1/ε²)·(ln(1/ε))²)^{γ/(γ−1)}`; `+∞` for `γ ≤ 1`.
    pub fn powerlaw_length(gamma: f64, epsilon: f64) -> f64 {
        if !(gamma > 1.0) {
            return f64::INFINITY;
        }
        let base = gamma * gamma / (gamma - 1.0).powi(3) * (-epsilon.ln()).powi(2) / (epsilon * epsilon);
        (gamma / (gamma - 1.0) * base.ln()).exp()
    }
}

//! Small numerical kernels shared by the other modules: log-factorials,
//! log-sum-exp, Hurwitz zeta sums for power-law tails, and a golden-section
//! polish step for one-dimensional minimization.

/// ln(2π)
pub const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// A value together with an absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certified {
    pub value: f64,
    pub error: f64,
}

/// ln(n!). Exact integer product for n ≤ 20, log-gamma beyond.
pub fn log_factorial(n: u64) -> f64 {
    if n <= 20 {
        let f: u64 = (1..=n).product();
        (f as f64).ln()
    } else {
        libm::lgamma(n as f64 + 1.0)
    }
}

/// ln Σ exp(xᵢ) with max shift. Returns -∞ for an empty input or all -∞.
pub fn log_sum_exp(xs: impl IntoIterator<Item = f64> + Clone) -> f64 {
    let max = xs.clone().into_iter().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    let s: f64 = xs.into_iter().map(|x| (x - max).exp()).sum();
    max + s.ln()
}

/// ln(eᵃ + eᵇ)
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

// B₂, B₄, …, B₁₄
const BERNOULLI_EVEN: [f64; 7] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
];
const EM_HEAD: usize = 32;
const EM_TERMS: usize = 6;

/// Hurwitz zeta ζ(s, a) = Σ_{k≥0} (a+k)^(-s) for s > 1, a > 0, by
/// Euler–Maclaurin summation. The error bound is the magnitude of the first
/// omitted correction term, which dominates the remainder for real s.
pub fn hurwitz_zeta(s: f64, a: f64) -> Certified {
    assert!(s > 1.0 && a > 0.0, "hurwitz_zeta needs s > 1, a > 0");
    let mut head = 0.0;
    for k in (0..EM_HEAD).rev() {
        head += (a + k as f64).powf(-s);
    }
    let big = a + EM_HEAD as f64;
    let mut total = head + big.powf(1.0 - s) / (s - 1.0) + 0.5 * big.powf(-s);

    let inv_sq = 1.0 / (big * big);
    let mut poch = s;
    let mut pow = big.powf(-s - 1.0);
    let mut fact = 2.0;
    let mut error = 0.0;
    for m in 1..=EM_TERMS + 1 {
        let term = BERNOULLI_EVEN[m - 1] / fact * poch * pow;
        if m <= EM_TERMS {
            total += term;
        } else {
            error = term.abs();
        }
        let mf = m as f64;
        poch *= (s + 2.0 * mf - 1.0) * (s + 2.0 * mf);
        pow *= inv_sq;
        fact *= (2.0 * mf + 1.0) * (2.0 * mf + 2.0);
    }
    Certified {
        value: total,
        error: error + 4.0 * f64::EPSILON * total,
    }
}

/// Σ_{k≥0} ln(a+k)·(a+k)^(-s) = -∂ζ(s,a)/∂s, by differentiating the
/// Euler–Maclaurin expansion term by term.
pub fn hurwitz_zeta_log_moment(s: f64, a: f64) -> Certified {
    assert!(s > 1.0 && a > 0.0, "hurwitz_zeta_log_moment needs s > 1, a > 0");
    let mut head = 0.0;
    for k in (0..EM_HEAD).rev() {
        let x = a + k as f64;
        head += x.ln() * x.powf(-s);
    }
    let big = a + EM_HEAD as f64;
    let ln_big = big.ln();
    let sm1 = s - 1.0;
    let mut total =
        head + big.powf(1.0 - s) * (ln_big / sm1 + 1.0 / (sm1 * sm1)) + 0.5 * ln_big * big.powf(-s);

    let inv_sq = 1.0 / (big * big);
    let mut poch = s;
    let mut harmonic = 1.0 / s;
    let mut pow = big.powf(-s - 1.0);
    let mut fact = 2.0;
    let mut error = 0.0;
    for m in 1..=EM_TERMS + 1 {
        let term = BERNOULLI_EVEN[m - 1] / fact * poch * pow * (ln_big - harmonic);
        if m <= EM_TERMS {
            total += term;
        } else {
            error = 2.0 * term.abs();
        }
        let mf = m as f64;
        let (u, v) = (s + 2.0 * mf - 1.0, s + 2.0 * mf);
        poch *= u * v;
        harmonic += 1.0 / u + 1.0 / v;
        pow *= inv_sq;
        fact *= (2.0 * mf + 1.0) * (2.0 * mf + 2.0);
    }
    Certified {
        value: total,
        error: error + 4.0 * f64::EPSILON * total.abs(),
    }
}

/// Golden-section search for a minimum of `f` on `[lo, hi]`. Returns the best
/// point seen and its value.
pub fn golden_section_min<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iter = 0;
    while (b - a).abs() > tol && iter < 200 {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        iter += 1;
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

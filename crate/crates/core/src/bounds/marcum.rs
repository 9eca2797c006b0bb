//! Noncentral chi-square distribution and the generalized Marcum Q function,
//! evaluated in the log domain.
//!
//! For `2k` degrees of freedom and noncentrality `lambda` the CDF is the
//! Poisson(`lambda/2`) mixture of regularized lower incomplete gamma functions
//! `P(k + j, x/2)`. All terms are positive; the lower gamma functions are
//! generated by the stable downward recurrence
//! `P(a - 1, y) = P(a, y) + y^(a-1) e^-y / Gamma(a)` and the upper ones by the
//! matching upward recurrence, so tiny probabilities keep full relative
//! accuracy.

use num_traits::Float;

/// Terms more than this many nats below the largest one are dropped.
const CUTOFF: f64 = 45.0;
const EPS: f64 = 1e-17;
const MAX_ITER: usize = 100_000;

fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// `ln(exp(a) + exp(b))`.
#[inline]
fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + Float::ln_1p(Float::exp(lo - hi))
}

/// `ln(1 - exp(x))` for `x <= 0`.
#[inline]
fn log1m_exp(x: f64) -> f64 {
    if x > -core::f64::consts::LN_2 {
        Float::ln(-Float::exp_m1(x))
    } else {
        Float::ln_1p(-Float::exp(x))
    }
}

/// `ln(y^a e^-y / Gamma(a + 1))`, the log of one recurrence step.
#[inline]
fn ln_gamma_step(a: f64, y: f64) -> f64 {
    a * Float::ln(y) - y - ln_gamma(a + 1.0)
}

/// Series for `ln P(a, y)`, accurate for `y < a + 1`.
fn ln_p_series(a: f64, y: f64) -> f64 {
    let mut term = 1.0 / a;
    let mut sum = term;
    for n in 1..MAX_ITER {
        term *= y / (a + n as f64);
        sum += term;
        if term < sum * EPS {
            break;
        }
    }
    a * Float::ln(y) - y - ln_gamma(a) + Float::ln(sum)
}

/// Continued fraction (modified Lentz) for `ln Q(a, y)`, accurate for `y >= a + 1`.
fn ln_q_fraction(a: f64, y: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = y + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    a * Float::ln(y) - y - ln_gamma(a) + Float::ln(h)
}

/// `ln P(a, y)`, log of the regularized lower incomplete gamma function.
pub fn ln_gamma_p(a: f64, y: f64) -> f64 {
    debug_assert!(a > 0.0);
    if y <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if y.is_infinite() {
        return 0.0;
    }
    if y < a + 1.0 {
        ln_p_series(a, y)
    } else {
        log1m_exp(ln_q_fraction(a, y))
    }
}

/// `ln Q(a, y)`, log of the regularized upper incomplete gamma function.
pub fn ln_gamma_q(a: f64, y: f64) -> f64 {
    debug_assert!(a > 0.0);
    if y <= 0.0 {
        return 0.0;
    }
    if y.is_infinite() {
        return f64::NEG_INFINITY;
    }
    if y < a + 1.0 {
        log1m_exp(ln_p_series(a, y))
    } else {
        ln_q_fraction(a, y)
    }
}

/// Streaming log-sum-exp.
#[derive(Clone, Copy)]
struct LogSum {
    max: f64,
    scaled: f64,
}

impl LogSum {
    fn new() -> Self {
        Self {
            max: f64::NEG_INFINITY,
            scaled: 0.0,
        }
    }

    fn add(&mut self, x: f64) {
        if x == f64::NEG_INFINITY {
            return;
        }
        if x > self.max {
            self.scaled = self.scaled * Float::exp(self.max - x) + 1.0;
            self.max = x;
        } else {
            self.scaled += Float::exp(x - self.max);
        }
    }

    fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + Float::ln(self.scaled)
        }
    }
}

/// Poisson log weight `ln(e^-mu mu^j / j!)`.
#[inline]
fn ln_poisson(j: u64, mu: f64, ln_mu: f64) -> f64 {
    -mu + j as f64 * ln_mu - ln_gamma(j as f64 + 1.0)
}

/// `ln Pr{X <= x}` for `X` noncentral chi-square with `2 k` degrees of freedom
/// and noncentrality `lambda`.
pub fn ln_ncx2_cdf(k: u32, lambda: f64, x: f64) -> f64 {
    assert!(k >= 1, "need at least two degrees of freedom");
    assert!(lambda >= 0.0, "noncentrality must be >= 0");
    if !(x > 0.0) {
        return f64::NEG_INFINITY;
    }
    if x.is_infinite() {
        return 0.0;
    }
    let (mu, y, k) = (0.5 * lambda, 0.5 * x, k as f64);
    if mu == 0.0 {
        return ln_gamma_p(k, y);
    }
    let ln_mu = Float::ln(mu);
    let mode = Float::floor(mu) as u64;
    // P(k + j, y) is decreasing in j, so every term past the mode is bounded by
    // w_j P(k + mode, y).
    let t_mode = ln_poisson(mode, mu, ln_mu) + ln_gamma_p(k + mode as f64, y);
    let ln_p_mode = t_mode - ln_poisson(mode, mu, ln_mu);
    let mut top = mode;
    while ln_poisson(top, mu, ln_mu) + ln_p_mode > t_mode - CUTOFF {
        top += 1;
    }
    let mut ln_p = ln_gamma_p(k + top as f64, y);
    let mut sum = LogSum::new();
    let mut j = top;
    loop {
        let w = ln_poisson(j, mu, ln_mu);
        sum.add(w + ln_p);
        // below the mode the weights shrink and P <= 1 bounds the terms
        if j == 0 || (j < mode && w < sum.value() - CUTOFF) {
            break;
        }
        let a = k + j as f64 - 1.0;
        ln_p = log_add(ln_p, ln_gamma_step(a, y));
        j -= 1;
    }
    sum.value().min(0.0)
}

/// `ln Pr{X > x}`, the complement of [`ln_ncx2_cdf`].
pub fn ln_ncx2_sf(k: u32, lambda: f64, x: f64) -> f64 {
    assert!(k >= 1, "need at least two degrees of freedom");
    assert!(lambda >= 0.0, "noncentrality must be >= 0");
    if !(x > 0.0) {
        return 0.0;
    }
    if x.is_infinite() {
        return f64::NEG_INFINITY;
    }
    let (mu, y, k) = (0.5 * lambda, 0.5 * x, k as f64);
    if mu == 0.0 {
        return ln_gamma_q(k, y);
    }
    let ln_mu = Float::ln(mu);
    let mode = Float::floor(mu) as u64;
    // Q(k + j, y) is increasing in j, so every term before the mode is bounded
    // by w_j Q(k + mode, y).
    let t_mode = ln_poisson(mode, mu, ln_mu) + ln_gamma_q(k + mode as f64, y);
    let ln_q_mode = t_mode - ln_poisson(mode, mu, ln_mu);
    let mut bottom = mode;
    while bottom > 0 && ln_poisson(bottom, mu, ln_mu) + ln_q_mode > t_mode - CUTOFF {
        bottom -= 1;
    }
    let mut ln_q = ln_gamma_q(k + bottom as f64, y);
    let mut sum = LogSum::new();
    let mut j = bottom;
    loop {
        let w = ln_poisson(j, mu, ln_mu);
        sum.add(w + ln_q);
        if j > mode && w < sum.value() - CUTOFF {
            break;
        }
        ln_q = log_add(ln_q, ln_gamma_step(k + j as f64, y));
        j += 1;
    }
    sum.value().min(0.0)
}

/// `ln Q_m(a, b)`, the generalized Marcum Q function of integer order `m`.
pub fn ln_marcum_q(m: u32, a: f64, b: f64) -> f64 {
    ln_ncx2_sf(m, a * a, b * b)
}

/// `ln(1 - Q_m(a, b))`.
pub fn ln_marcum_q_complement(m: u32, a: f64, b: f64) -> f64 {
    ln_ncx2_cdf(m, a * a, b * b)
}

//! Incomplete gamma machinery and a few scalar helpers.
//!
//! Everything here works with `a > 0`, `x ≥ 0` and returns values in a form
//! that survives the far tail: either a logarithm, or the upper incomplete
//! gamma function with its `e^{-x} x^a` prefactor stripped off.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

const EPS: f64 = f64::EPSILON;
const TINY: f64 = 1e-300;

pub(crate) fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// Series for the lower function with the prefactor removed:
/// `γ(a, x) e^x x^{-a} = Σ_n x^n / (a (a+1) … (a+n))`.
fn lower_series(a: f64, x: f64) -> Result<f64> {
    let max_iter = iteration_budget(a);
    let mut ap = a;
    let mut term = 1.0 / a;
    let mut sum = term;
    for _ in 0..max_iter {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * EPS {
            return Ok(sum);
        }
    }
    Err(Error::Convergence {
        what: "incomplete gamma series",
        iterations: max_iter,
    })
}

/// Modified Lentz evaluation of `Γ(a, x) e^x x^{-a}` for `x ≥ a + 1`.
fn upper_fraction(a: f64, x: f64) -> Result<f64> {
    let max_iter = iteration_budget(a);
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=max_iter {
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
            return Ok(h);
        }
    }
    Err(Error::Convergence {
        what: "incomplete gamma continued fraction",
        iterations: max_iter,
    })
}

// Both expansions need O(√a) terms near the transition x ≈ a.
fn iteration_budget(a: f64) -> usize {
    1000 + (50.0 * a.sqrt()) as usize
}

/// `ln Q(a, x)` where `Q` is the regularized upper incomplete gamma function.
pub(crate) fn ln_upper_regularized(a: f64, x: f64) -> Result<f64> {
    if x <= 0.0 {
        return Ok(0.0);
    }
    let log_prefactor = -x + a * x.ln() - ln_gamma(a);
    if x < a + 1.0 {
        let p = (log_prefactor + lower_series(a, x)?.ln()).exp();
        Ok((-p).ln_1p())
    } else {
        Ok(log_prefactor + upper_fraction(a, x)?.ln())
    }
}

/// `Γ(a, x) e^x x^{-a}` for `x > 0`.
///
/// Stripping the prefactor keeps the value O(1/x) deep in the tail, so
/// linear combinations of several of these at the same `x` stay accurate.
pub(crate) fn upper_scaled(a: f64, x: f64) -> Result<f64> {
    debug_assert!(x > 0.0);
    if x < a + 1.0 {
        let full = (ln_gamma(a) + x - a * x.ln()).exp();
        Ok(full - lower_series(a, x)?)
    } else {
        upper_fraction(a, x)
    }
}

/// Half-step differences of the scaled upper function,
/// `D_m = Σ_k C(m,k) (-1)^{m-k} h(a + k/2)` for `m = 0..3`, where
/// `h(b) = Γ(b, x) e^x x^{-b}`.
///
/// With `h(b) = ∫_0^∞ (1+w)^{b-1} e^{-xw} dw` each difference is the single
/// integral `∫_0^∞ (1+w)^{a-1} ((1+w)^{1/2} - 1)^m e^{-xw} dw`, which has no
/// cancellation. It is evaluated by exp-sinh quadrature on the scale
/// `1/(x - a + 1)` and is meant for `x - a` well above zero.
pub(crate) fn half_step_differences(a: f64, x: f64) -> Result<[f64; 4]> {
    let scale = 1.0 / (x - a + 1.0).max(1.0);
    let point = |tau: f64| -> [f64; 4] {
        let w = scale * (FRAC_PI_2 * tau.sinh()).exp();
        let log_base = (a - 1.0) * w.ln_1p() - x * w;
        let jac = w * FRAC_PI_2 * tau.cosh();
        let base = log_base.exp() * jac;
        if !(base.is_finite() && base > 0.0) {
            return [0.0; 4];
        }
        let d = w / (1.0 + (1.0 + w).sqrt());
        [base, base * d, base * d * d, base * d * d * d]
    };
    let add = |acc: &mut [f64; 4], v: [f64; 4]| {
        for (a, b) in acc.iter_mut().zip(v) {
            *a += b;
        }
    };

    const REACH: f64 = 4.5;
    let mut h = 0.5;
    let mut sum = [0.0; 4];
    let n = (REACH / h) as i64;
    for k in -n..=n {
        add(&mut sum, point(k as f64 * h));
    }
    let mut estimate = sum.map(|v| v * h);
    for level in 1..=10 {
        h *= 0.5;
        let n = (REACH / h) as i64;
        let mut k = -n + if n % 2 == 0 { 1 } else { 0 };
        while k <= n {
            add(&mut sum, point(k as f64 * h));
            k += 2;
        }
        // Halving the step roughly squares the error, so a change of 1e-10
        // means the new estimate is already at rounding level.
        let next = sum.map(|v| v * h);
        let settled = next
            .iter()
            .zip(&estimate)
            .all(|(n, o)| (n - o).abs() <= 1e-10 * n.abs());
        estimate = next;
        if level >= 3 && settled {
            return Ok(estimate);
        }
    }
    Err(Error::Convergence {
        what: "exp-sinh quadrature",
        iterations: 10,
    })
}

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Standard normal distribution function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Upper normal tail `1 − Φ(x)`, accurate for large positive `x`.
pub fn normal_sf(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Neumaier compensated summation.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn total(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = KahanSum::default();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

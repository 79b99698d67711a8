//! The χ_r distribution and the tail integrals built on it.
//!
//! For a degree `r > 0` the χ_r density is `C_r u^{r-1} e^{-u²/2}` on `u > 0`.
//! The unnormalised tail
//!
//! ```text
//! q_r(u) = ∫_u^∞ s^{r-1} e^{-s²/2} 1{s > 0} ds = 2^{(r-2)/2} Γ(r/2, u²/2)
//! ```
//!
//! and the shifted moments
//!
//! ```text
//! I_m(t) = ∫_t^∞ (s - t)^m s^{r-1} e^{-s²/2} 1{s > 0} ds,   m = 0..3
//! ```
//!
//! are evaluated through the upper incomplete gamma function. The cubic tail
//! function is `γ_r(t) = I_3(t)`, and its derivatives follow from
//! `γ' = -3 I_2`, `γ'' = 6 I_1`, `γ''' = -6 q`.
//!
//! Every tail quantity has a logarithmic twin so that callers can work past
//! the point where the plain value underflows.

use serde::Serialize;

use crate::error::{domain, Result};
use crate::roots::brent;
use crate::special::{half_step_differences, ln_gamma, ln_upper_regularized, upper_scaled};

pub use crate::special::{normal_cdf, normal_pdf, normal_sf};

/// Degree of a χ distribution; any positive real.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Degree(#[serde(serialize_with = "crate::json::sig17")] f64);

impl Degree {
    pub fn new(r: f64) -> Result<Self> {
        if r.is_finite() && r > 0.0 {
            Ok(Degree(r))
        } else {
            Err(domain(format!(
                "degree must be a positive finite real, got {r}"
            )))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// The mode `√(r-1)` of χ_r, or 0 when `r < 1`.
    pub fn mode(self) -> f64 {
        (self.0 - 1.0).max(0.0).sqrt()
    }
}

impl std::fmt::Display for Degree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// `ln C_r = -[(r-2)/2 · ln 2 + ln Γ(r/2)]`.
pub fn ln_norm_const(r: Degree) -> f64 {
    let r = r.get();
    -(0.5 * (r - 2.0) * std::f64::consts::LN_2 + ln_gamma(0.5 * r))
}

/// Normalising constant of the χ_r density.
pub fn norm_const(r: Degree) -> f64 {
    ln_norm_const(r).exp()
}

/// `ln q_r(u)`; for `u ≤ 0` this is `ln q_r(0) = -ln C_r`.
pub fn log_tail_q(r: Degree, u: f64) -> Result<f64> {
    Ok(log_survival(r, u)? - ln_norm_const(r))
}

/// Unnormalised tail integral `q_r(u)`.
pub fn tail_q(r: Degree, u: f64) -> Result<f64> {
    Ok(log_tail_q(r, u)?.exp())
}

/// `ln P(χ_r ≥ u)`.
pub fn log_survival(r: Degree, u: f64) -> Result<f64> {
    if u.is_nan() {
        return Err(domain("tail evaluated at NaN"));
    }
    if u <= 0.0 {
        return Ok(0.0);
    }
    ln_upper_regularized(0.5 * r.get(), 0.5 * u * u)
}

/// `P(χ_r ≥ u) = q_r(u) / q_r(0)`.
pub fn survival(r: Degree, u: f64) -> Result<f64> {
    Ok(log_survival(r, u)?.exp())
}

/// `E χ_r^j` from `E χ^0 = 1`, `E χ = √2 Γ((r+1)/2)/Γ(r/2)` and the
/// recursion `E χ^j = (r + j - 2) E χ^{j-2}`.
pub fn moment(r: Degree, j: u32) -> f64 {
    let r = r.get();
    let mut value = if j.is_multiple_of(2) {
        1.0
    } else {
        std::f64::consts::SQRT_2 * (ln_gamma(0.5 * (r + 1.0)) - ln_gamma(0.5 * r)).exp()
    };
    let mut k = 2 + j % 2;
    while k <= j {
        value *= r + k as f64 - 2.0;
        k += 2;
    }
    value
}

/// The shifted moments `I_0..I_3` at a point `t`, held as
/// `I_m = exp(log_scale) · scaled[m]` so that they can be combined and
/// compared after the individual values have underflowed.
#[derive(Debug, Clone, Copy)]
pub struct TailIntegrals {
    pub t: f64,
    pub log_scale: f64,
    pub scaled: [f64; 4],
}

const BINOMIAL: [[f64; 4]; 4] = [
    [1.0, 0.0, 0.0, 0.0],
    [1.0, 1.0, 0.0, 0.0],
    [1.0, 2.0, 1.0, 0.0],
    [1.0, 3.0, 3.0, 1.0],
];

// Below this t the alternating binomial combination of plain tails loses
// nothing worth mentioning; above it the common factor is pulled out first.
const SCALED_FROM: f64 = 1.0;

// The alternating differences of h_k lose about (2(x - a))^m / m! in
// relative accuracy; past this gap they are integrated directly instead.
const DIRECT_FROM: f64 = 12.0;

impl TailIntegrals {
    pub fn new(r: Degree, t: f64) -> Result<Self> {
        if !t.is_finite() {
            return Err(domain(format!("shift must be finite, got {t}")));
        }
        let rv = r.get();
        if t < SCALED_FROM {
            // (s - t)^m = Σ_k C(m,k) s^k (-t)^{m-k}; the lower limit is max(t, 0).
            let lower = t.max(0.0);
            let mut tails = [0.0; 4];
            for (k, tail) in tails.iter_mut().enumerate() {
                *tail = tail_q(Degree(rv + k as f64), lower)?;
            }
            let mut scaled = [0.0; 4];
            for (m, out) in scaled.iter_mut().enumerate() {
                *out = (0..=m)
                    .map(|k| BINOMIAL[m][k] * (-t).powi((m - k) as i32) * tails[k])
                    .sum();
            }
            return Ok(TailIntegrals {
                t,
                log_scale: 0.0,
                scaled,
            });
        }

        // q_{r+k}(t) = ½ e^{-t²/2} t^{r+k} h_k with h_k = Γ(a,x) e^x x^{-a}.
        let x = 0.5 * t * t;
        let a = 0.5 * rv;
        let differences = if x - a >= DIRECT_FROM {
            half_step_differences(a, x)?
        } else {
            let mut h = [0.0; 4];
            for (k, hk) in h.iter_mut().enumerate() {
                *hk = upper_scaled(a + 0.5 * k as f64, x)?;
            }
            let mut diffs = [0.0; 4];
            for (m, out) in diffs.iter_mut().enumerate() {
                *out = (0..=m)
                    .map(|k| {
                        let sign = if (m - k) % 2 == 0 { 1.0 } else { -1.0 };
                        sign * BINOMIAL[m][k] * h[k]
                    })
                    .sum();
            }
            diffs
        };
        let mut scaled = [0.0; 4];
        for (m, out) in scaled.iter_mut().enumerate() {
            *out = t.powi(m as i32) * differences[m];
        }
        Ok(TailIntegrals {
            t,
            log_scale: -x + rv * t.ln() - std::f64::consts::LN_2,
            scaled,
        })
    }

    pub fn value(&self, m: usize) -> f64 {
        self.log_scale.exp() * self.scaled[m]
    }

    pub fn ln(&self, m: usize) -> f64 {
        self.log_scale + self.scaled[m].ln()
    }

    /// `γ(t) / (-γ'(t)) = I_3 / (3 I_2)`, free of the common scale.
    pub fn gamma_over_neg_derivative(&self) -> f64 {
        self.scaled[3] / (3.0 * self.scaled[2])
    }
}

/// `γ_r(t) = ∫_t^∞ (s - t)^3 s^{r-1} e^{-s²/2} 1{s > 0} ds`.
pub fn gamma3(r: Degree, t: f64) -> Result<f64> {
    Ok(TailIntegrals::new(r, t)?.value(3))
}

/// `ln γ_r(t)`.
pub fn log_gamma3(r: Degree, t: f64) -> Result<f64> {
    Ok(TailIntegrals::new(r, t)?.ln(3))
}

/// `γ^{(0)}..γ^{(5)}` at a point.
///
/// The fourth and fifth derivatives jump at `t = 0`; there the right-hand
/// limits are returned and `one_sided` is set.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GammaDerivatives {
    pub t: f64,
    pub values: [f64; 6],
    pub one_sided: bool,
}

impl GammaDerivatives {
    pub fn get(&self, j: usize) -> f64 {
        self.values[j]
    }
}

// Right-hand limit of t^e at 0.
fn power_at_zero(e: f64) -> f64 {
    if e > 0.0 {
        0.0
    } else if e == 0.0 {
        1.0
    } else {
        f64::INFINITY
    }
}

pub fn gamma_derivs(r: Degree, t: f64) -> Result<GammaDerivatives> {
    let tails = TailIntegrals::new(r, t)?;
    let rv = r.get();
    let (d4, d5) = if t > 0.0 {
        let d4 = 6.0 * ((rv - 1.0) * t.ln() - 0.5 * t * t).exp();
        (d4, -(t - (rv - 1.0) / t) * d4)
    } else if t < 0.0 {
        (0.0, 0.0)
    } else {
        // γ⁽⁵⁾(0+) = lim 6(r-1) t^{r-2} - 6 t^r
        let d5 = if rv == 1.0 {
            0.0
        } else {
            6.0 * (rv - 1.0) * power_at_zero(rv - 2.0)
        };
        (6.0 * power_at_zero(rv - 1.0), d5)
    };
    Ok(GammaDerivatives {
        t,
        values: [
            tails.value(3),
            -3.0 * tails.value(2),
            6.0 * tails.value(1),
            -6.0 * tail_q(r, t)?,
            d4,
            d5,
        ],
        one_sided: t == 0.0,
    })
}

/// The upper `delta`-quantile: the `u` with `P(χ_r ≥ u) = delta`.
///
/// Works on the log-survival scale, so `delta` may be far below the
/// smallest representable survival increment.
pub fn quantile(r: Degree, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(domain(format!(
            "quantile level must lie in (0, 1), got {delta}"
        )));
    }
    let target = delta.ln();
    let excess = |u: f64| Ok(log_survival(r, u)? - target);

    let mut hi = r.get().sqrt().max(1.0) + 2.0;
    while excess(hi)? > 0.0 {
        hi *= 2.0;
    }
    brent(excess, 0.0, hi, 1e-12)
}

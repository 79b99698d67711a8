//! Ordering properties of the centred family `ξ_r = χ_r − √(r−1)`, `r ≥ 1`.
//!
//! `ξ_r` has its mode at zero. Along increasing `r` the family has a
//! monotone likelihood ratio, hence monotone tail ratios, hence decreasing
//! tails `F_r(t) ≥ F_d(t)` for `r ≤ d`, with the `N(0, ½)` law as the limit.

use serde::Serialize;

use crate::chi_kernel::{ln_norm_const, log_survival, Degree};
use crate::error::{domain, Result};
use crate::json::sig17;
use crate::special::normal_sf;

/// Absolute tolerance on log-scale comparisons.
pub const LOG_TOLERANCE: f64 = 1e-10;

/// `√(r−1)`, the mode of `χ_r`.
pub fn shift(r: Degree) -> Result<f64> {
    let rv = r.get();
    if rv < 1.0 {
        return Err(domain(format!("centred family needs r >= 1, got {rv}")));
    }
    Ok((rv - 1.0).sqrt())
}

/// Log density of `ξ_r` at `u`; `-inf` outside the support.
pub fn log_shifted_density(r: Degree, u: f64) -> Result<f64> {
    let v = u + shift(r)?;
    if v <= 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(ln_norm_const(r) + (r.get() - 1.0) * v.ln() - 0.5 * v * v)
}

/// `ln P(ξ_r ≥ t)`.
pub fn log_shifted_tail(r: Degree, t: f64) -> Result<f64> {
    log_survival(r, t + shift(r)?)
}

/// `P(ξ_r ≥ t)`.
pub fn shifted_tail(r: Degree, t: f64) -> Result<f64> {
    Ok(log_shifted_tail(r, t)?.exp())
}

fn ordered_pair(r: Degree, d: Degree) -> Result<(f64, f64)> {
    let (a, b) = (shift(r)?, shift(d)?);
    if r.get() > d.get() {
        return Err(domain(format!(
            "ordering checks need r <= d, got r = {r}, d = {d}"
        )));
    }
    Ok((a, b))
}

/// `(log p_d/p_r)'(u) = (r−d)u² / ((a+b)(u+a)(u+b))` with `a = √(r−1)`,
/// `b = √(d−1)`.
pub fn mlr_log_ratio_derivative(r: Degree, d: Degree, u: f64) -> Result<f64> {
    let (a, b) = ordered_pair(r, d)?;
    if !(u > -a) {
        return Err(domain(format!(
            "u = {u} lies outside the support u > {}",
            -a
        )));
    }
    if r.get() == d.get() {
        return Ok(0.0);
    }
    Ok((r.get() - d.get()) * u * u / ((a + b) * (u + a) * (u + b)))
}

/// Central difference of `log p_d − log p_r` with step `h`.
pub fn mlr_finite_difference(r: Degree, d: Degree, u: f64, h: f64) -> Result<f64> {
    let g = |v: f64| -> Result<f64> { Ok(log_shifted_density(d, v)? - log_shifted_density(r, v)?) };
    Ok((g(u + h)? - g(u - h)?) / (2.0 * h))
}

/// A log-scale comparison `lhs ≥ rhs`.
#[derive(Debug, Clone, Serialize)]
pub struct OrderingCheck {
    #[serde(serialize_with = "sig17")]
    pub log_lhs: f64,
    #[serde(serialize_with = "sig17")]
    pub log_rhs: f64,
    pub holds: bool,
    pub strict: bool,
}

impl OrderingCheck {
    fn compare(log_lhs: f64, log_rhs: f64) -> Self {
        let diff = log_lhs - log_rhs;
        let both_zero = log_lhs == f64::NEG_INFINITY && log_rhs == f64::NEG_INFINITY;
        OrderingCheck {
            log_lhs,
            log_rhs,
            holds: both_zero || diff >= -LOG_TOLERANCE,
            strict: !both_zero && diff > LOG_TOLERANCE,
        }
    }
}

/// `F_r(t) F_d(s) ≥ F_d(t) F_r(s)` for `r ≤ d`, `s < t`.
pub fn tail_ratio_check(r: Degree, d: Degree, s: f64, t: f64) -> Result<OrderingCheck> {
    ordered_pair(r, d)?;
    if !(s < t) {
        return Err(domain(format!(
            "tail ratio check needs s < t, got s = {s}, t = {t}"
        )));
    }
    let lhs = log_shifted_tail(r, t)? + log_shifted_tail(d, s)?;
    let rhs = log_shifted_tail(d, t)? + log_shifted_tail(r, s)?;
    Ok(OrderingCheck::compare(lhs, rhs))
}

/// `F_r(t) ≥ F_d(t)` for `r ≤ d`.
pub fn stochastic_monotone_check(r: Degree, d: Degree, t: f64) -> Result<OrderingCheck> {
    ordered_pair(r, d)?;
    Ok(OrderingCheck::compare(
        log_shifted_tail(r, t)?,
        log_shifted_tail(d, t)?,
    ))
}

/// Tail of the `N(0, ½)` limit, `1 − Φ(√2 u)`.
pub fn normal_limit_tail(u: f64) -> f64 {
    normal_sf(std::f64::consts::SQRT_2 * u)
}

/// `P(ξ_d ≥ u) − (1 − Φ(√2 u))`.
pub fn normal_limit_gap(d: Degree, u: f64) -> Result<f64> {
    Ok(shifted_tail(d, u)? - normal_limit_tail(u))
}

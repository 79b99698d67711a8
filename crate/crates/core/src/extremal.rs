//! The extremal tail bound `Q_r(u)` and the ratio `Λ_r(u) = Q_r(u) / P(χ_r ≥ u)`.
//!
//! `Q_r` is piecewise:
//!
//! ```text
//! Q_r(u) = 1          0 ≤ u ≤ √r
//!        = r / u²     √r ≤ u ≤ μ_r
//!        = W_r(u)     u ≥ μ_r
//! ```
//!
//! with `μ_r = E χ³ / E χ²` and `W_r(u) = min_{t<u} C_r γ(t) / (u - t)³`,
//! attained at `t* = μ⁻¹(u)` where `μ(t) = t - 3γ(t)/γ'(t)`.
//!
//! Ratios against the χ tail are formed in log space, so `Λ_r` stays finite
//! where both `Q_r` and the tail underflow.

use serde::Serialize;

use crate::chi_kernel::{self, ln_norm_const, log_survival, Degree, TailIntegrals};
use crate::error::{domain, Result};
use crate::json::sig17;
use crate::roots::brent;

/// The sharp constant `2e³/9 ≈ 4.463453`.
pub const SHARP_CONSTANT: f64 = 2.0 * 20.085_536_923_187_668 / 9.0;

/// Which branch of `Q_r` is active at `u`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Region {
    Unit,
    Quadratic,
    Cubic,
}

impl std::fmt::Display for Region {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Region::Unit => "UNIT",
            Region::Quadratic => "QUADRATIC",
            Region::Cubic => "CUBIC",
        })
    }
}

/// Everything known about the bound at one point.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub r: Degree,
    #[serde(serialize_with = "sig17")]
    pub u: f64,
    pub region: Region,
    /// `Q_r(u)`.
    #[serde(serialize_with = "sig17")]
    pub q_value: f64,
    #[serde(serialize_with = "sig17")]
    pub log_q_value: f64,
    /// `P(χ_r ≥ u)`.
    #[serde(serialize_with = "sig17")]
    pub chi_tail: f64,
    #[serde(serialize_with = "sig17")]
    pub log_chi_tail: f64,
    /// `2e³/9 · P(χ_r ≥ u)`.
    #[serde(serialize_with = "sig17")]
    pub eaton_bound: f64,
    /// `Λ_r(u)`.
    #[serde(serialize_with = "sig17")]
    pub lambda: f64,
    /// `2e³/9 + 3[J(a_u) - J(3)]`, only defined on the cubic branch.
    #[serde(serialize_with = "crate::json::sig17_opt")]
    pub lambda_envelope: Option<f64>,
}

/// `μ_r = E χ³ / E χ²`.
pub fn mu_r(r: Degree) -> f64 {
    chi_kernel::moment(r, 3) / chi_kernel::moment(r, 2)
}

/// `μ(t) = t - 3γ(t)/γ'(t)`, increasing in `t` with `μ(0) = μ_r`.
pub fn mu_of_t(r: Degree, t: f64) -> Result<f64> {
    let tails = TailIntegrals::new(r, t)?;
    Ok(t + 3.0 * tails.gamma_over_neg_derivative())
}

/// The `t ≥ 0` with `μ(t) = u`, for `u ≥ μ_r`.
pub fn mu_inverse(r: Degree, u: f64) -> Result<f64> {
    let base = mu_r(r);
    if !(u >= base) || !u.is_finite() {
        return Err(domain(format!(
            "mu_inverse needs u >= mu_r = {base} (r = {r}), got {u}"
        )));
    }
    if u == base {
        return Ok(0.0);
    }
    // μ(0) = μ_r ≤ u and μ(u) > u, so [0, u] brackets the root.
    brent(|t| Ok(mu_of_t(r, t)? - u), 0.0, u, 1e-12)
}

/// `ln F(t, u)` with `F(t, u) = C_r γ(t) / (u - t)³ = E(χ_r - t)³₊ / (u - t)³`.
pub fn log_cubic_ratio(r: Degree, t: f64, u: f64) -> Result<f64> {
    if !(t < u) {
        return Err(domain(format!(
            "cubic ratio needs t < u, got t = {t}, u = {u}"
        )));
    }
    Ok(ln_norm_const(r) + TailIntegrals::new(r, t)?.ln(3) - 3.0 * (u - t).ln())
}

/// `F(t, u)`; see [`log_cubic_ratio`].
pub fn cubic_ratio(r: Degree, t: f64, u: f64) -> Result<f64> {
    Ok(log_cubic_ratio(r, t, u)?.exp())
}

/// `ln W_r(u)` for `u ≥ μ_r`.
pub fn log_w_bound(r: Degree, u: f64) -> Result<f64> {
    let t = mu_inverse(r, u)?;
    log_cubic_ratio(r, t, u)
}

/// `W_r(u) = F(μ⁻¹(u), u)` for `u ≥ μ_r`.
pub fn w_bound(r: Degree, u: f64) -> Result<f64> {
    Ok(log_w_bound(r, u)?.exp())
}

/// Which branch of `Q_r` covers `u ≥ 0`.
pub fn region(r: Degree, u: f64) -> Region {
    if u <= r.get().sqrt() {
        Region::Unit
    } else if u < mu_r(r) {
        Region::Quadratic
    } else {
        Region::Cubic
    }
}

/// `ln Q_r(u)`.
pub fn log_q(r: Degree, u: f64) -> Result<f64> {
    check_point(u)?;
    match region(r, u) {
        Region::Unit => Ok(0.0),
        Region::Quadratic => Ok(r.get().ln() - 2.0 * u.ln()),
        Region::Cubic => log_w_bound(r, u),
    }
}

/// `Q_r(u)`.
pub fn q_value(r: Degree, u: f64) -> Result<f64> {
    Ok(log_q(r, u)?.exp())
}

/// `Λ_r(u) = Q_r(u) / P(χ_r ≥ u)`.
pub fn lambda(r: Degree, u: f64) -> Result<f64> {
    Ok((log_q(r, u)? - log_survival(r, u)?).exp())
}

fn check_point(u: f64) -> Result<()> {
    if u.is_finite() && u >= 0.0 {
        Ok(())
    } else {
        Err(domain(format!(
            "bound point must be a finite u >= 0, got {u}"
        )))
    }
}

/// Evaluate the bound and its companions at `u ≥ 0`.
pub fn q_bound(r: Degree, u: f64) -> Result<BoundReport> {
    check_point(u)?;
    let region = region(r, u);
    let log_q_value = log_q(r, u)?;
    let log_chi_tail = log_survival(r, u)?;
    let chi_tail = log_chi_tail.exp();
    let lambda_envelope = match region {
        Region::Cubic => Some(lambda_envelope(r, u)?),
        _ => None,
    };
    Ok(BoundReport {
        r,
        u,
        region,
        q_value: log_q_value.exp(),
        log_q_value,
        chi_tail,
        log_chi_tail,
        eaton_bound: SHARP_CONSTANT * chi_tail,
        lambda: (log_q_value - log_chi_tail).exp(),
        lambda_envelope,
    })
}

/// `J(a) = 6 a⁻⁴ (e^a - 1 - a - a²/2 - a³/6)`, with `J(0) = 1/4`.
pub fn j_function(a: f64) -> f64 {
    if a.abs() < 1.0 {
        // J(a) = 6 Σ_{k≥4} a^{k-4} / k!
        let mut term = 1.0 / 24.0;
        let mut sum = term;
        for k in 5..26 {
            term *= a / k as f64;
            sum += term;
        }
        6.0 * sum
    } else {
        6.0 * (a.exp_m1() - a - a * a / 2.0 - a * a * a / 6.0) / a.powi(4)
    }
}

/// `a_u = 3 q(u) q''(u) / q'(u)²`, defined for `u > √(r-1)` (any `u > 0`
/// when `r ≤ 1`).
///
/// With `q' = -u^{r-1} e^{-u²/2}` and `q'' = -q'·(u - (r-1)/u)` this is
/// `3 (u² - (r-1)) · q(u) / (u^r e^{-u²/2})`; the ratio is taken in logs.
pub fn a_u(r: Degree, u: f64) -> Result<f64> {
    let rv = r.get();
    if !u.is_finite() || u <= 0.0 || u * u <= rv - 1.0 {
        return Err(domain(format!(
            "a_u needs u > sqrt(max(r - 1, 0)) = {}, got {u}",
            r.mode()
        )));
    }
    let log_mills = chi_kernel::log_tail_q(r, u)? - (rv * u.ln() - 0.5 * u * u);
    Ok(3.0 * (u * u - (rv - 1.0)) * log_mills.exp())
}

/// `2e³/9 + 3[J(a_u) - J(3)]` for `u ≥ μ_r`.
pub fn lambda_envelope(r: Degree, u: f64) -> Result<f64> {
    let base = mu_r(r);
    if !(u >= base) {
        return Err(domain(format!(
            "lambda envelope needs u >= mu_r = {base} (r = {r}), got {u}"
        )));
    }
    Ok(SHARP_CONSTANT + 3.0 * (j_function(a_u(r, u)?) - j_function(3.0)))
}

/// Tolerance used when checking `Λ_1` for monotonicity along a grid.
pub const MONOTONE_TOLERANCE: f64 = 1e-9;

/// Whether `Λ_1` is nondecreasing along a sorted grid of points `≥ μ_1`.
pub fn lambda_monotone_check(u_grid: &[f64]) -> Result<bool> {
    let r = Degree::new(1.0)?;
    let base = mu_r(r);
    if let Some(&bad) = u_grid.iter().find(|&&u| !(u >= base)) {
        return Err(domain(format!("grid point {bad} lies below mu_1 = {base}")));
    }
    if u_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(domain("grid must be sorted ascending"));
    }
    let values = u_grid
        .iter()
        .map(|&u| lambda(r, u))
        .collect::<Result<Vec<_>>>()?;
    Ok(values.windows(2).all(|w| w[1] >= w[0] - MONOTONE_TOLERANCE))
}

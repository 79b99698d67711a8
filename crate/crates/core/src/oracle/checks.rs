use serde::Serialize;

use super::{
    chi_expectation, exact_linear_distribution, exact_quadratic_distribution, SignDistribution,
    TestFunction,
};
use crate::chi_kernel::{survival, Degree};
use crate::error::{domain, Result};
use crate::extremal::{q_value, SHARP_CONSTANT};
use crate::hotelling::Projector;
use crate::json::sig17;
use crate::special::normal_sf;

/// Allowed excess of `lhs` over `rhs` in moment comparisons.
pub const MOMENT_TOLERANCE: f64 = 1e-10;
/// Allowed excess of `lhs` over `rhs` in non-strict tail comparisons.
pub const TAIL_TOLERANCE: f64 = 1e-12;

/// Outcome of one inequality `lhs ≤ rhs` (or `<`) on one instance.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub inequality: String,
    pub instance: String,
    #[serde(serialize_with = "sig17")]
    pub lhs: f64,
    #[serde(serialize_with = "sig17")]
    pub rhs: f64,
    /// `rhs − lhs`.
    #[serde(serialize_with = "sig17")]
    pub slack: f64,
    pub holds: bool,
}

/// `weak` allows `lhs` to exceed `rhs` by `tol`; `strict` requires `lhs < rhs`.
impl Verdict {
    pub fn weak(inequality: &str, instance: String, lhs: f64, rhs: f64, tol: f64) -> Self {
        Verdict {
            inequality: inequality.to_string(),
            instance,
            lhs,
            rhs,
            slack: rhs - lhs,
            holds: lhs <= rhs + tol,
        }
    }

    pub fn strict(inequality: &str, instance: String, lhs: f64, rhs: f64) -> Self {
        Verdict {
            inequality: inequality.to_string(),
            instance,
            lhs,
            rhs,
            slack: rhs - lhs,
            holds: lhs < rhs,
        }
    }
}

/// An enumerated sign statistic: `S_n = Σ ε_i x_i` or `εᵀ P ε`.
#[derive(Debug, Clone)]
pub struct Instance {
    pub label: String,
    /// `true` for `S_n`, `false` for `εᵀ P ε`.
    pub linear: bool,
    /// χ degree on the right-hand side: 1, or the projector rank.
    pub degree: Degree,
    pub dist: SignDistribution,
}

impl Instance {
    pub fn linear(x: &[f64], threads: usize) -> Result<Self> {
        Ok(Instance {
            label: format!("S_n, n={}", x.len()),
            linear: true,
            degree: Degree::new(1.0)?,
            dist: exact_linear_distribution(x, threads)?,
        })
    }

    pub fn quadratic(p: &Projector, threads: usize) -> Result<Self> {
        if p.rank == 0 {
            return Err(domain("projector has rank zero"));
        }
        Ok(Instance {
            label: format!("e'Pe, n={}, rank={}", p.matrix.nrows(), p.rank),
            linear: false,
            degree: Degree::new(p.rank as f64)?,
            dist: exact_quadratic_distribution(&p.matrix, threads)?,
        })
    }

    /// `E f` of the statistic on the `u` scale: `S_n` or `√(εᵀPε)`.
    pub fn expectation(&self, f: &TestFunction) -> f64 {
        if self.linear {
            self.dist.expectation(|s| f.eval(s))
        } else {
            self.dist.expectation(|v| f.eval(v.sqrt()))
        }
    }

    /// `P(S_n ≥ u)` or `P(εᵀPε ≥ u²)`.
    pub fn tail(&self, u: f64) -> f64 {
        if self.linear {
            self.dist.tail_probability(u)
        } else {
            self.dist.tail_probability(u * u)
        }
    }

    /// Positive support points on the `u` scale.
    pub fn positive_support(&self) -> Vec<f64> {
        self.dist
            .support
            .iter()
            .filter(|&&s| s > 0.0)
            .map(|&s| if self.linear { s } else { s.sqrt() })
            .collect()
    }
}

/// `E f(statistic) ≤ E f(χ_degree)`.
pub fn verify_moment_inequality(inst: &Instance, f: &TestFunction) -> Result<Verdict> {
    let name = if inst.linear {
        "E f(S_n) <= E f(xi_1)"
    } else {
        "E f(sqrt(e'Pe)) <= E f(chi_r)"
    };
    Ok(Verdict::weak(
        name,
        inst.label.clone(),
        inst.expectation(f),
        chi_expectation(inst.degree, f)?,
        MOMENT_TOLERANCE,
    ))
}

/// Tail inequalities at each positive `u` of the grid.
///
/// For `S_n`: `P(S_n ≥ u) ≤ Q_1(u)/2` and `P(S_n ≥ u) < c (1 − Φ(u))`.
/// For `εᵀPε`: `P(εᵀPε ≥ u²) ≤ Q_r(u)` and `P(εᵀPε ≥ u²) < c P(χ_r ≥ u)`.
pub fn verify_tail_bounds(inst: &Instance, u_grid: &[f64]) -> Result<Vec<Verdict>> {
    let mut out = Vec::new();
    for &u in u_grid.iter().filter(|&&u| u > 0.0) {
        let lhs = inst.tail(u);
        let at = format!("{}, u={u:.6}", inst.label);
        if inst.linear {
            out.push(Verdict::weak(
                "P(S_n>=u) <= Q_1(u)/2",
                at.clone(),
                lhs,
                0.5 * q_value(inst.degree, u)?,
                TAIL_TOLERANCE,
            ));
            out.push(Verdict::strict(
                "P(S_n>=u) < c(1-Phi(u))",
                at,
                lhs,
                SHARP_CONSTANT * normal_sf(u),
            ));
        } else {
            out.push(Verdict::weak(
                "P(e'Pe>=u^2) <= Q_r(u)",
                at.clone(),
                lhs,
                q_value(inst.degree, u)?,
                TAIL_TOLERANCE,
            ));
            out.push(Verdict::strict(
                "P(e'Pe>=u^2) < c P(chi_r>=u)",
                at,
                lhs,
                SHARP_CONSTANT * survival(inst.degree, u)?,
            ));
        }
    }
    Ok(out)
}

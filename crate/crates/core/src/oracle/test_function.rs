use rand::Rng;
use serde::Serialize;

use super::SignDistribution;
use crate::chi_kernel::{gamma3, moment, norm_const, Degree};
use crate::error::{domain, Result};

/// Even test function with convex second derivative,
///
/// `f(u) = a + b u²/2 + c u⁴ + Σ_k w_k (|u| − t_k)³₊ / 6`,
///
/// a finite version of the integral representation of the class, with an
/// explicit quartic term so that `u⁴` is available in closed form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestFunction {
    pub a: f64,
    pub b: f64,
    pub quartic: f64,
    /// `(t_k, w_k)` with `t_k ≥ 0`, `w_k ≥ 0`.
    pub knots: Vec<(f64, f64)>,
}

impl TestFunction {
    pub fn new(a: f64, b: f64, quartic: f64, knots: Vec<(f64, f64)>) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && quartic.is_finite() && quartic >= 0.0) {
            return Err(domain(
                "coefficients must be finite with a nonnegative quartic part",
            ));
        }
        if knots
            .iter()
            .any(|&(t, w)| !(t.is_finite() && w.is_finite() && t >= 0.0 && w >= 0.0))
        {
            return Err(domain("knots need finite t >= 0 and w >= 0"));
        }
        Ok(TestFunction {
            a,
            b,
            quartic,
            knots,
        })
    }

    /// `u²`.
    pub fn square() -> Self {
        TestFunction::new(0.0, 2.0, 0.0, Vec::new()).expect("valid coefficients")
    }

    /// `u⁴`.
    pub fn fourth_power() -> Self {
        TestFunction::new(0.0, 0.0, 1.0, Vec::new()).expect("valid coefficients")
    }

    /// `(|u| − t)³₊`.
    pub fn cubic_hinge(t: f64) -> Result<Self> {
        TestFunction::new(0.0, 0.0, 0.0, vec![(t, 6.0)])
    }

    /// Random member with up to `max_knots` knots in `[0, 3]`.
    ///
    /// With `increasing` set, `a` and `b` are nonnegative so that `f` is
    /// also nondecreasing on `[0, ∞)`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, max_knots: usize, increasing: bool) -> Self {
        let lo = if increasing { 0.0 } else { -1.0 };
        let a = rng.random_range(lo..=1.0);
        let b = rng.random_range(lo..=1.0);
        let quartic = if rng.random_bool(0.5) {
            rng.random_range(0.0..=0.5)
        } else {
            0.0
        };
        let count = rng.random_range(0..=max_knots);
        let knots = (0..count)
            .map(|_| (rng.random_range(0.0..=3.0), rng.random_range(0.0..=2.0)))
            .collect();
        TestFunction {
            a,
            b,
            quartic,
            knots,
        }
    }

    /// Also nondecreasing on `[0, ∞)`: `f(0) ≥ 0` and `f''(0) ≥ 0`.
    pub fn is_increasing(&self) -> bool {
        self.a >= 0.0 && self.b >= 0.0
    }

    pub fn eval(&self, u: f64) -> f64 {
        let v = u.abs();
        let u2 = u * u;
        let hinge: f64 = self
            .knots
            .iter()
            .map(|&(t, w)| w * (v - t).max(0.0).powi(3) / 6.0)
            .sum();
        self.a + 0.5 * self.b * u2 + self.quartic * u2 * u2 + hinge
    }
}

/// `E f(S)` for an exact distribution.
pub fn expectation_under(dist: &SignDistribution, f: &TestFunction) -> f64 {
    dist.expectation(|s| f.eval(s))
}

/// `E f(χ_r)` in closed form, using `E(χ_r − t)³₊ = C_r γ_r(t)`.
pub fn chi_expectation(r: Degree, f: &TestFunction) -> Result<f64> {
    let c = norm_const(r);
    let mut total = f.a + 0.5 * f.b * moment(r, 2) + f.quartic * moment(r, 4);
    for &(t, w) in &f.knots {
        total += w * c * gamma3(r, t)? / 6.0;
    }
    Ok(total)
}

//! Hotelling's T² and R² for an arbitrary sample.
//!
//! With `X` the `n × d` data matrix (row `i` is observation `X_i`) and
//! `ν = (1, …, 1)ᵀ`, the orthogonal projector `P` onto the column span of `X`
//! gives `n R² = νᵀ P ν` and `T² = R² / (1 - R²)`, with `T² = ∞` exactly when
//! `ν` lies in the span. The regularised forms `X̄ (C + εI)⁻¹ X̄ᵀ` and
//! `X̄ (S + εI)⁻¹ X̄ᵀ` converge to the same quantities as `ε ↓ 0`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{domain, Result};
use crate::json::sig17;

/// `R²` values within this distance of 1 (or of 0) are snapped to 1 (or 0).
pub const UNIT_R2_TOLERANCE: f64 = 1e-12;

/// An `n × d` matrix of finite observations.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix(DMatrix<f64>);

impl SampleMatrix {
    pub fn new(data: DMatrix<f64>) -> Result<Self> {
        if data.nrows() == 0 || data.ncols() == 0 {
            return Err(domain(format!(
                "sample must have at least one row and one column, got {}x{}",
                data.nrows(),
                data.ncols()
            )));
        }
        if let Some((idx, v)) = data.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            // nalgebra storage is column-major
            let (row, col) = (idx % data.nrows(), idx / data.nrows());
            return Err(domain(format!(
                "non-finite entry {v} at row {}, column {}",
                row + 1,
                col + 1
            )));
        }
        Ok(SampleMatrix(data))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        if let Some(i) = rows.iter().position(|r| r.len() != d) {
            return Err(domain(format!(
                "row {} has {} columns, expected {d}",
                i + 1,
                rows[i].len()
            )));
        }
        Self::new(DMatrix::from_fn(n, d, |i, j| rows[i][j]))
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn d(&self) -> usize {
        self.0.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    /// `Δ_ε X`: row `i` multiplied by `signs[i]`.
    pub fn sign_flipped(&self, signs: &[i8]) -> Result<Self> {
        check_signs(signs, self.n())?;
        let mut m = self.0.clone();
        for (i, &s) in signs.iter().enumerate() {
            if s < 0 {
                m.row_mut(i).neg_mut();
            }
        }
        Ok(SampleMatrix(m))
    }

    pub fn mean(&self) -> DVector<f64> {
        self.0.row_mean().transpose()
    }
}

fn check_signs(signs: &[i8], n: usize) -> Result<()> {
    if signs.len() != n {
        return Err(domain(format!("expected {n} signs, got {}", signs.len())));
    }
    if signs.iter().any(|&s| s != 1 && s != -1) {
        return Err(domain("signs must be +1 or -1"));
    }
    Ok(())
}

/// Orthogonal projector onto the column span of a sample matrix.
#[derive(Debug, Clone)]
pub struct Projector {
    pub matrix: DMatrix<f64>,
    pub rank: usize,
    /// Orthonormal basis of the span, one column per retained direction.
    basis: DMatrix<f64>,
}

impl Projector {
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// `vᵀ P v`, computed as `‖Uᵀ v‖²` so the result is never negative.
    pub fn quadratic_form(&self, v: &DVector<f64>) -> f64 {
        (self.basis.transpose() * v).norm_squared()
    }

    /// `max |P² - P|` over entries.
    pub fn idempotency_defect(&self) -> f64 {
        (&self.matrix * &self.matrix - &self.matrix).amax()
    }

    pub fn symmetry_defect(&self) -> f64 {
        (&self.matrix - self.matrix.transpose()).amax()
    }
}

/// The projector `X (XᵀX)⁻ Xᵀ`, realised with the Moore–Penrose inverse.
///
/// Directions whose Gram eigenvalue `σ²` falls below
/// `max(n, d) · ε_machine · σ²_max` are treated as null.
pub fn projector(x: &SampleMatrix) -> Projector {
    let (n, d) = (x.n(), x.d());
    let svd = x.matrix().clone().svd(true, false);
    let u = svd.u.expect("left singular vectors were requested");
    let sigma_max = svd.singular_values.max();
    let cutoff = n.max(d) as f64 * f64::EPSILON * sigma_max * sigma_max;
    let keep: Vec<usize> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|&(_, &s)| sigma_max > 0.0 && s * s > cutoff)
        .map(|(i, _)| i)
        .collect();
    let basis = u.select_columns(&keep);
    let matrix = &basis * basis.transpose();
    Projector {
        matrix,
        rank: keep.len(),
        basis,
    }
}

/// Rank, R², T² and `νᵀ P ν` of a sample.
#[derive(Debug, Clone, Serialize)]
pub struct ProjectionSummary {
    pub n: usize,
    pub d: usize,
    pub rank: usize,
    #[serde(serialize_with = "sig17")]
    pub r_squared: f64,
    /// `null` in JSON when infinite; see `t_squared_infinite`.
    #[serde(serialize_with = "sig17")]
    pub t_squared: f64,
    pub t_squared_infinite: bool,
    #[serde(serialize_with = "sig17")]
    pub nu_projection: f64,
}

/// `T² = R² / (1 - R²)`, infinite when `R² = 1`.
pub fn t_squared_from_r2(r2: f64) -> f64 {
    if r2 >= 1.0 {
        f64::INFINITY
    } else {
        r2 / (1.0 - r2)
    }
}

fn summarize(n: usize, d: usize, p: &Projector) -> ProjectionSummary {
    let nu = DVector::from_element(n, 1.0);
    let nu_projection = p.quadratic_form(&nu);
    let mut r2 = (nu_projection / n as f64).clamp(0.0, 1.0);
    if 1.0 - r2 <= UNIT_R2_TOLERANCE {
        r2 = 1.0;
    } else if r2 <= UNIT_R2_TOLERANCE {
        r2 = 0.0;
    }
    let t2 = t_squared_from_r2(r2);
    ProjectionSummary {
        n,
        d,
        rank: p.rank,
        r_squared: r2,
        t_squared: t2,
        t_squared_infinite: t2.is_infinite(),
        nu_projection,
    }
}

/// R² and T² through `n R² = νᵀ P ν`.
pub fn r_squared(x: &SampleMatrix) -> ProjectionSummary {
    summarize(x.n(), x.d(), &projector(x))
}

/// `R²` of the sign-flipped sample `Δ_ε X`, which equals `εᵀ P ε / n`.
pub fn r_squared_signed(x: &SampleMatrix, signs: &[i8]) -> Result<f64> {
    Ok(r_squared(&x.sign_flipped(signs)?).r_squared)
}

/// `T²_ε` and `R²_ε` at a fixed ridge `ε > 0`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Regularized {
    #[serde(serialize_with = "sig17")]
    pub eps: f64,
    #[serde(serialize_with = "sig17")]
    pub t2_eps: f64,
    #[serde(serialize_with = "sig17")]
    pub r2_eps: f64,
}

/// `T²_ε = X̄ (C + εI)⁻¹ X̄ᵀ`, `R²_ε = X̄ (S + εI)⁻¹ X̄ᵀ` with
/// `S = XᵀX / n` and `C = S - X̄ᵀX̄`.
pub fn regularized(x: &SampleMatrix, eps: f64) -> Result<Regularized> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(domain(format!(
            "ridge eps must be positive and finite, got {eps}"
        )));
    }
    let n = x.n() as f64;
    let d = x.d();
    let xm = x.matrix();
    let mean = x.mean();
    let second = xm.transpose() * xm / n;
    let cov = &second - &mean * mean.transpose();
    let ridge = DMatrix::<f64>::identity(d, d) * eps;

    let solve_form = |m: DMatrix<f64>| -> Result<f64> {
        let chol = m.cholesky().ok_or_else(|| {
            domain(format!(
                "ridge {eps} too small for a positive definite system"
            ))
        })?;
        Ok(mean.dot(&chol.solve(&mean)))
    };
    Ok(Regularized {
        eps,
        t2_eps: solve_form(cov + &ridge)?,
        r2_eps: solve_form(second + ridge)?,
    })
}

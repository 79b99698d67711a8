//! Conservative p-values and critical values under orthant symmetry.
//!
//! For `u = √n · R` the tail of the statistic is dominated by
//! `Q_d(u) < c · P(χ_d ≥ u)` with `c = 2e³/9`. Inverting the χ side gives the
//! critical-value chain `x_d(δ) < x_d(δ/c) < z_δ` where
//! `z_δ = x_d(δ) + log c / (x_d(δ) - (d-1)/x_d(δ))`.

use serde::Serialize;

use crate::chi_kernel::{quantile, survival, Degree};
use crate::error::{domain, Error, Result};
use crate::extremal::{q_value, SHARP_CONSTANT};
use crate::hotelling::{r_squared, ProjectionSummary, SampleMatrix};
use crate::json::sig17;

/// Upper bounds on `P(√n R ≥ u)` at the observed statistic.
#[derive(Debug, Clone, Serialize)]
pub struct TestReport {
    pub d: Degree,
    pub n: usize,
    #[serde(serialize_with = "sig17")]
    pub statistic_u: f64,
    /// `Q_d(u)`, the sharp bound.
    #[serde(serialize_with = "sig17")]
    pub p_upper_q: f64,
    /// `min(1, c · P(χ_d ≥ u))`.
    #[serde(serialize_with = "sig17")]
    pub p_upper_eaton: f64,
    /// `P(χ_d ≥ u)`, the asymptotic p-value.
    #[serde(serialize_with = "sig17")]
    pub chi_p: f64,
}

/// Bounds for a statistic with `n R² = n · r2`.
pub fn p_value_bound(d: Degree, n: usize, r2: f64) -> Result<TestReport> {
    if n == 0 {
        return Err(domain("sample size must be at least 1"));
    }
    if !(0.0..=1.0).contains(&r2) {
        return Err(domain(format!("R^2 must lie in [0, 1], got {r2}")));
    }
    let u = (n as f64 * r2).sqrt();
    let chi_p = survival(d, u)?;
    Ok(TestReport {
        d,
        n,
        statistic_u: u,
        p_upper_q: q_value(d, u)?.min(1.0),
        p_upper_eaton: (SHARP_CONSTANT * chi_p).min(1.0),
        chi_p,
    })
}

/// `x_d(δ)`, `x_d(δ/c)` and `z_δ`.
#[derive(Debug, Clone, Serialize)]
pub struct QuantileTriple {
    #[serde(serialize_with = "sig17")]
    pub delta: f64,
    pub d: Degree,
    #[serde(serialize_with = "sig17")]
    pub x_delta: f64,
    #[serde(serialize_with = "sig17")]
    pub x_delta_over_c: f64,
    #[serde(serialize_with = "sig17")]
    pub z_delta: f64,
}

/// The critical-value chain for `0 < δ ≤ 0.5`.
pub fn critical_chain(d: Degree, delta: f64) -> Result<QuantileTriple> {
    if !(delta > 0.0 && delta <= 0.5) {
        return Err(domain(format!(
            "critical chain needs 0 < delta <= 0.5, got {delta}"
        )));
    }
    let dv = d.get();
    let x_delta = quantile(d, delta)?;
    let x_delta_over_c = quantile(d, delta / SHARP_CONSTANT)?;
    let z_delta = x_delta + SHARP_CONSTANT.ln() / (x_delta - (dv - 1.0) / x_delta);

    let violation = |detail: String| Error::ChainViolation {
        d: dv,
        delta,
        detail,
    };
    if dv >= 1.0 && !(x_delta > (dv - 1.0).sqrt()) {
        return Err(violation(format!("x_delta = {x_delta} <= sqrt(d - 1)")));
    }
    if !(x_delta < x_delta_over_c && x_delta_over_c < z_delta) {
        return Err(violation(format!(
            "{x_delta} < {x_delta_over_c} < {z_delta} fails"
        )));
    }
    Ok(QuantileTriple {
        delta,
        d,
        x_delta,
        x_delta_over_c,
        z_delta,
    })
}

/// One [`QuantileTriple`] per dimension.
pub fn conservativeness_table(delta: f64, dims: &[Degree]) -> Result<Vec<QuantileTriple>> {
    dims.iter().map(|&d| critical_chain(d, delta)).collect()
}

/// Round to two decimals, ties to even.
pub fn round2(x: f64) -> f64 {
    (x * 100.0).round_ties_even() / 100.0
}

/// Aligned plain-text rendering: one column per dimension, rows
/// `x_δ`, `x_{δ/c}`, `z_δ`, values at two decimals.
pub fn render_table(rows: &[QuantileTriple]) -> String {
    let header: Vec<String> = std::iter::once("d".to_string())
        .chain(rows.iter().map(|r| format!("{}", r.d)))
        .collect();
    let line = |label: &str, pick: fn(&QuantileTriple) -> f64| -> Vec<String> {
        std::iter::once(label.to_string())
            .chain(rows.iter().map(|r| format!("{:.2}", round2(pick(r)))))
            .collect()
    };
    let body = [
        header,
        line("x_delta", |r| r.x_delta),
        line("x_delta/c", |r| r.x_delta_over_c),
        line("z_delta", |r| r.z_delta),
    ];
    let ncol = body[0].len();
    let widths: Vec<usize> = (0..ncol)
        .map(|j| body.iter().map(|row| row[j].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in &body {
        let cells: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(j, cell)| {
                if j == 0 {
                    format!("{cell:<w$}", w = widths[j])
                } else {
                    format!("{cell:>w$}", w = widths[j])
                }
            })
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    out
}

/// Outcome of testing a concrete sample.
#[derive(Debug, Clone, Serialize)]
pub struct SampleReport {
    pub summary: ProjectionSummary,
    /// Dimension used for the bound: the declared one, or the column count.
    pub declared_d: Degree,
    /// True when the projector rank differs from the declared dimension.
    pub rank_mismatch: bool,
    pub report: TestReport,
    /// The same bounds evaluated with `d = rank`, when the two differ and
    /// the rank is positive.
    pub rank_report: Option<TestReport>,
}

/// Compute R² through the projector and the bounds at `u = √n R`.
pub fn run_test(x: &SampleMatrix, declared_d: Option<Degree>) -> Result<SampleReport> {
    let summary = r_squared(x);
    let declared_d = match declared_d {
        Some(d) => d,
        None => Degree::new(x.d() as f64)?,
    };
    let report = p_value_bound(declared_d, summary.n, summary.r_squared)?;
    let rank_mismatch = summary.rank as f64 != declared_d.get();
    let rank_report = if rank_mismatch && summary.rank > 0 {
        Some(p_value_bound(
            Degree::new(summary.rank as f64)?,
            summary.n,
            summary.r_squared,
        )?)
    } else {
        None
    };
    Ok(SampleReport {
        summary,
        declared_d,
        rank_mismatch,
        report,
        rank_report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn deg(r: f64) -> Degree {
        Degree::new(r).unwrap()
    }

    #[test]
    fn zero_statistic() {
        let rep = p_value_bound(deg(3.0), 10, 0.0).unwrap();
        assert_eq!(rep.statistic_u, 0.0);
        assert_eq!(rep.p_upper_q, 1.0);
        assert_eq!(rep.p_upper_eaton, 1.0);
    }

    #[test]
    fn p_value_domain() {
        assert!(p_value_bound(deg(1.0), 0, 0.5).is_err());
        assert!(p_value_bound(deg(1.0), 5, 1.5).is_err());
        assert!(p_value_bound(deg(1.0), 5, -0.1).is_err());
    }

    #[test]
    fn eaton_is_capped_multiple() {
        let rep = p_value_bound(deg(2.0), 50, 0.3).unwrap();
        assert_eq!(rep.p_upper_eaton, (SHARP_CONSTANT * rep.chi_p).min(1.0));
        assert!(rep.p_upper_q <= rep.p_upper_eaton);
    }

    #[test]
    fn chain_rejects_large_delta() {
        assert!(critical_chain(deg(2.0), 0.6).is_err());
        assert!(critical_chain(deg(2.0), 0.0).is_err());
        assert!(critical_chain(deg(2.0), 0.5).is_ok());
    }

    #[test]
    fn chain_table_values() {
        for (d, want) in [
            (1.0, [1.96, 2.54, 2.72]),
            (10.0, [4.28, 4.78, 4.97]),
            (50.0, [8.22, 8.69, 8.88]),
        ] {
            let t = critical_chain(deg(d), 0.05).unwrap();
            for (got, want) in [t.x_delta, t.x_delta_over_c, t.z_delta].iter().zip(want) {
                assert!((got - want).abs() <= 0.01, "d = {d}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn rounding_is_half_even() {
        assert_eq!(round2(0.125), 0.12);
        assert_eq!(round2(0.375), 0.38);
        assert_eq!(round2(2.5363), 2.54);
    }

    #[test]
    fn render_has_four_rows() {
        let rows = conservativeness_table(0.05, &[deg(1.0), deg(2.0)]).unwrap();
        let text = render_table(&rows);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("x_delta") && lines[1].contains("1.96"));
        assert!(lines[2].contains("2.54") && lines[2].contains("3.00"));
    }

    #[test]
    fn centred_sample_has_unit_bound() {
        let x = SampleMatrix::from_rows(&[vec![1.0, 2.0], vec![-1.0, -2.0]]).unwrap();
        let rep = run_test(&x, None).unwrap();
        assert_eq!(rep.report.p_upper_q, 1.0);
        assert!(rep.rank_mismatch);
        assert_eq!(rep.summary.rank, 1);
        assert!(rep.rank_report.is_some());
    }

    #[test]
    fn single_row_sample() {
        let x = SampleMatrix::from_rows(&[vec![0.4, -1.0, 2.0]]).unwrap();
        let rep = run_test(&x, None).unwrap();
        assert_eq!(rep.summary.r_squared, 1.0);
        assert_eq!(rep.report.statistic_u, 1.0);
        assert_eq!(rep.report.p_upper_q, q_value(deg(3.0), 1.0).unwrap());
    }
}

//! Plain-text rendering of reports.

use std::fmt::Write;

use orthant_t2::extremal::BoundReport;
use orthant_t2::symmetry_test::{QuantileTriple, SampleReport, TestReport};
use orthant_t2::verify::SuiteReport;

/// Four significant digits; `inf`, `-inf` and `nan` spelled out.
pub fn sig4(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.3e}");
    let exp: i32 = sci
        .rsplit('e')
        .next()
        .and_then(|e| e.parse().ok())
        .unwrap_or(0);
    if (-4..4).contains(&exp) {
        let decimals = (3 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        sci
    }
}

fn rows(pairs: &[(&str, String)]) -> String {
    let width = pairs.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut out = String::new();
    for (k, v) in pairs {
        let _ = writeln!(out, "{k:<width$}  {v}");
    }
    out
}

pub fn bound(rep: &BoundReport) -> String {
    rows(&[
        ("r", sig4(rep.r.get())),
        ("u", sig4(rep.u)),
        ("Q_r(u)", sig4(rep.q_value)),
        ("region", rep.region.to_string()),
        ("P(chi_r >= u)", sig4(rep.chi_tail)),
        ("c * P(chi_r >= u)", sig4(rep.eaton_bound)),
        ("Lambda_r(u)", sig4(rep.lambda)),
        (
            "envelope",
            rep.lambda_envelope.map_or_else(|| "n/a".into(), sig4),
        ),
    ])
}

pub fn triple(t: &QuantileTriple) -> String {
    rows(&[
        ("d", sig4(t.d.get())),
        ("delta", sig4(t.delta)),
        ("x_delta", sig4(t.x_delta)),
        ("x_delta/c", sig4(t.x_delta_over_c)),
        ("z_delta", sig4(t.z_delta)),
    ])
}

fn test_rows(rep: &TestReport) -> Vec<(&'static str, String)> {
    vec![
        ("u = sqrt(n) R", sig4(rep.statistic_u)),
        ("p <= Q_d(u)", sig4(rep.p_upper_q)),
        ("p <= c P(chi_d >= u)", sig4(rep.p_upper_eaton)),
        ("P(chi_d >= u)", sig4(rep.chi_p)),
    ]
}

pub fn sample(rep: &SampleReport) -> String {
    let s = &rep.summary;
    let mut pairs = vec![
        ("n", s.n.to_string()),
        ("d (columns)", s.d.to_string()),
        ("rank", s.rank.to_string()),
        ("d (used)", sig4(rep.declared_d.get())),
        ("R^2", sig4(s.r_squared)),
        ("T^2", sig4(s.t_squared)),
    ];
    pairs.extend(test_rows(&rep.report));
    let mut out = rows(&pairs);
    if let Some(alt) = &rep.rank_report {
        let _ = writeln!(
            out,
            "\nrank {} differs from d = {}; bounds with d = rank:",
            s.rank, rep.declared_d
        );
        out.push_str(&rows(&test_rows(alt)));
    } else if rep.rank_mismatch {
        let _ = writeln!(out, "\nrank {} differs from d = {}", s.rank, rep.declared_d);
    }
    out
}

pub fn suite(rep: &SuiteReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "suite {}: {} ({} checks, {} violations, seed {})",
        rep.suite,
        if rep.passed { "PASS" } else { "FAIL" },
        rep.checks,
        rep.violations,
        rep.seed
    );
    for s in &rep.summaries {
        let _ = writeln!(
            out,
            "  [{}] {}: {} checks, min slack {}",
            if s.violations == 0 { "ok" } else { "FAIL" },
            s.name,
            s.checks,
            sig4(s.min_slack)
        );
    }
    for f in &rep.failures {
        let _ = writeln!(
            out,
            "  violation: {} [{}] lhs {} rhs {}",
            f.inequality,
            f.instance,
            sig4(f.lhs),
            sig4(f.rhs)
        );
    }
    for note in &rep.notes {
        let _ = writeln!(out, "  note: {note}");
    }
    out
}

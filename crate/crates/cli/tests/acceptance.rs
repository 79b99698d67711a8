//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero when any
//! criterion fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use orthant_t2::chi_kernel::Degree;
use orthant_t2::extremal::{a_u, j_function, lambda, lambda_envelope, mu_r};
use orthant_t2::oracle::{
    verify_moment_inequality, verify_tail_bounds, Instance, TestFunction, Verdict,
};
use orthant_t2::verify::{corpus, run_suite, Suite, SuiteConfig, SuiteReport};
use orthant_t2::SHARP_CONSTANT;

type Outcome = Result<String, String>;
type Criterion = (&'static str, Box<dyn Fn() -> Outcome>);

// Printed table at δ = 0.05: d, x_δ, x_{δ/c}, z_δ.
#[allow(clippy::approx_constant)]
const TABLE: [(f64, [f64; 3]); 6] = [
    (1.0, [1.96, 2.54, 2.72]),
    (2.0, [2.45, 3.00, 3.18]),
    (5.0, [3.33, 3.85, 4.03]),
    (10.0, [4.28, 4.78, 4.97]),
    (20.0, [5.61, 6.10, 6.28]),
    (50.0, [8.22, 8.69, 8.88]),
];

fn deg(r: f64) -> Degree {
    Degree::new(r).expect("valid degree")
}

fn threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect()
}

fn within(limit: Duration, started: Instant, detail: String) -> Outcome {
    let took = started.elapsed();
    if took < limit {
        Ok(detail)
    } else {
        Err(format!("{detail}; took {took:.2?}, limit {limit:?}"))
    }
}

fn table() -> Outcome {
    let started = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_orthant-t2"))
        .args([
            "--format",
            "json",
            "table",
            "--delta",
            "0.05",
            "--dims",
            "1,2,5,10,20,50",
        ])
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "exit {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    let rows: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let rows = rows.as_array().ok_or("expected a JSON array")?;
    if rows.len() != TABLE.len() {
        return Err(format!("{} rows", rows.len()));
    }
    let mut worst = 0.0f64;
    for (row, (d, want)) in rows.iter().zip(TABLE) {
        let field = |k: &str| row[k].as_f64().ok_or(format!("d={d}: missing {k}"));
        if (field("d")? - d).abs() > 0.0 {
            return Err(format!("row order: expected d={d}"));
        }
        for (k, w) in ["x_delta", "x_delta_over_c", "z_delta"]
            .into_iter()
            .zip(want)
        {
            let gap = (field(k)? - w).abs();
            worst = worst.max(gap);
            if gap > 0.01 {
                return Err(format!("d={d}, {k}: {} vs {w}", field(k)?));
            }
        }
    }
    within(
        Duration::from_secs(1),
        started,
        format!("18 entries, max deviation {worst:.4}"),
    )
}

fn asymptote() -> Outcome {
    let started = Instant::now();
    let c = SHARP_CONSTANT;
    let mut shown = Vec::new();
    for r in [1.0, 2.0, 5.0] {
        let l = lambda(deg(r), mu_r(deg(r)) + 12.0).map_err(|e| e.to_string())?;
        if !(l > 0.9 * c && l < c) {
            return Err(format!("r={r}: Lambda = {l}"));
        }
        shown.push(format!("{l:.4}"));
    }
    let sum = 2.0 / 9.0 + 2.0 / 3.0 + 2.0 + 3.0 * j_function(3.0);
    let exact = 2.0 * 3f64.exp() / 9.0;
    if (sum - exact).abs() > 1e-12 || (c - exact).abs() > 1e-12 {
        return Err(format!("identity off by {:e}", (sum - exact).abs()));
    }
    within(
        Duration::from_secs(1),
        started,
        format!(
            "Lambda at mu_r+12 = {}; identity gap {:.1e}",
            shown.join(", "),
            (sum - exact).abs()
        ),
    )
}

fn envelope() -> Outcome {
    let c = SHARP_CONSTANT;
    let mut points = 0;
    for r in [1.0, 2.0, 5.0, 10.0] {
        let r = deg(r);
        let base = mu_r(r);
        let mut prev_a = f64::NEG_INFINITY;
        for u in grid(base, base + 12.0, 200) {
            let l = lambda(r, u).map_err(|e| e.to_string())?;
            let env = lambda_envelope(r, u).map_err(|e| e.to_string())?;
            let a = a_u(r, u).map_err(|e| e.to_string())?;
            if !(l < env && env < c) {
                return Err(format!("r={r}, u={u}: Lambda {l}, envelope {env}"));
            }
            if !(a > prev_a && a < 3.0) {
                return Err(format!("r={r}, u={u}: a_u {a} after {prev_a}"));
            }
            prev_a = a;
            points += 1;
        }
    }
    Ok(format!("{points} grid points, u in [mu_r, mu_r+12]"))
}

fn lambda_one_monotone() -> Outcome {
    let r = deg(1.0);
    let base = mu_r(r);
    let values = grid(base, base + 10.0, 200)
        .into_iter()
        .map(|u| lambda(r, u))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let worst = values
        .windows(2)
        .map(|w| w[0] - w[1])
        .fold(f64::NEG_INFINITY, f64::max);
    if worst > 1e-9 {
        return Err(format!("largest drop {worst:e}"));
    }
    Ok(format!(
        "200 points, Lambda_1 from {:.4} to {:.4}",
        values[0], values[199]
    ))
}

fn first_failure(vs: &[Verdict]) -> Option<String> {
    vs.iter().find(|v| !v.holds).map(|v| {
        format!(
            "{} [{}]: lhs {} rhs {}",
            v.inequality, v.instance, v.lhs, v.rhs
        )
    })
}

fn oracle_suite(cfg: &SuiteConfig) -> Outcome {
    let started = Instant::now();
    let corpus = corpus(cfg).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut verdicts = Vec::new();
    let mut max_n = (0, 0);
    for inst in corpus.linear.iter().chain(&corpus.quadratic) {
        let n = inst.dist.n;
        if inst.linear {
            max_n.0 = max_n.0.max(n);
        } else {
            max_n.1 = max_n.1.max(n);
        }
        for _ in 0..20 {
            let f = TestFunction::random(&mut rng, 4, false);
            verdicts.push(verify_moment_inequality(inst, &f).map_err(|e| e.to_string())?);
        }
        let tails =
            verify_tail_bounds(inst, &inst.positive_support()).map_err(|e| e.to_string())?;
        // The bound by Q_rank; the c-multiple is criterion 6.
        verdicts.extend(tails.into_iter().step_by(2));
        let sq =
            verify_moment_inequality(inst, &TestFunction::square()).map_err(|e| e.to_string())?;
        if (sq.lhs - sq.rhs).abs() > 1e-10 {
            return Err(format!(
                "f(u)=u^2 not tight at {}: {} vs {}",
                inst.label, sq.lhs, sq.rhs
            ));
        }
    }
    if let Some(f) = first_failure(&verdicts) {
        return Err(f);
    }
    let e1 = Instance::linear(&[1.0, 0.0, 0.0, 0.0], 1).map_err(|e| e.to_string())?;
    let at_one = verify_tail_bounds(&e1, &[1.0]).map_err(|e| e.to_string())?;
    if at_one[0].lhs != at_one[0].rhs {
        return Err(format!(
            "x=e_1, u=1: {} vs {}",
            at_one[0].lhs, at_one[0].rhs
        ));
    }
    if max_n.0 > 12 || max_n.1 > 10 {
        return Err(format!("corpus too large: n = {max_n:?}"));
    }
    within(
        Duration::from_secs(60),
        started,
        format!(
            "{} vectors, {} projectors, {} checks, equality cases tight",
            corpus.linear.len(),
            corpus.quadratic.len(),
            verdicts.len()
        ),
    )
}

fn normal_tail_suite(cfg: &SuiteConfig) -> Outcome {
    let corpus = corpus(cfg).map_err(|e| e.to_string())?;
    let mut verdicts = Vec::new();
    for inst in &corpus.linear {
        let tails =
            verify_tail_bounds(inst, &inst.positive_support()).map_err(|e| e.to_string())?;
        verdicts.extend(tails.into_iter().skip(1).step_by(2));
    }
    if let Some(f) = first_failure(&verdicts) {
        return Err(f);
    }
    let tightest = verdicts
        .iter()
        .map(|v| v.rhs / v.lhs.max(f64::MIN_POSITIVE))
        .fold(f64::INFINITY, f64::min);
    Ok(format!(
        "{} support points, smallest ratio bound/tail {tightest:.3}",
        verdicts.len()
    ))
}

fn from_suite(rep: &SuiteReport, keep: impl Fn(&str) -> bool) -> Outcome {
    let picked: Vec<_> = rep.summaries.iter().filter(|s| keep(&s.name)).collect();
    if picked.is_empty() {
        return Err(format!(
            "suite {} reported none of the expected checks",
            rep.suite
        ));
    }
    let checks: u64 = picked.iter().map(|s| s.checks).sum();
    let bad: Vec<_> = picked
        .iter()
        .filter(|s| s.violations > 0)
        .map(|s| format!("{} ({} of {})", s.name, s.violations, s.checks))
        .collect();
    if bad.is_empty() {
        Ok(format!("{} check groups, {checks} checks", picked.len()))
    } else {
        Err(bad.join("; "))
    }
}

fn kernel_identities(rep: &SuiteReport) -> Outcome {
    from_suite(rep, |n| {
        n.starts_with("gamma")
            || n.starts_with("q_{r+2}")
            || n.starts_with("E chi^j")
            || n.starts_with("mu_r")
            || n.starts_with("C_r")
    })
}

fn hotelling_identities(rep: &SuiteReport) -> Outcome {
    from_suite(rep, |n| {
        n.starts_with("T2_eps") || n.starts_with("R2") || n.starts_with("projector")
    })
}

fn main() -> ExitCode {
    let cfg = SuiteConfig {
        threads: threads(),
        ..SuiteConfig::default()
    };
    let criteria: Vec<Criterion> = vec![
        ("critical value table", Box::new(table)),
        ("sharp-constant asymptote", Box::new(asymptote)),
        ("envelope dominance", Box::new(envelope)),
        ("Lambda_1 monotone", Box::new(lambda_one_monotone)),
        (
            "exact-oracle inequalities",
            Box::new(move || oracle_suite(&cfg)),
        ),
        (
            "normal tail bound",
            Box::new(move || normal_tail_suite(&cfg)),
        ),
        (
            "chi-kernel identities",
            Box::new(move || {
                kernel_identities(&run_suite(Suite::Identities, &cfg).map_err(|e| e.to_string())?)
            }),
        ),
        (
            "Hotelling identities",
            Box::new(move || {
                hotelling_identities(
                    &run_suite(Suite::Identities, &cfg).map_err(|e| e.to_string())?,
                )
            }),
        ),
        (
            "MLR and normal-limit suite",
            Box::new(move || {
                from_suite(
                    &run_suite(Suite::Mlr, &cfg).map_err(|e| e.to_string())?,
                    |_| true,
                )
            }),
        ),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let outcome = check();
        let took = started.elapsed();
        match outcome {
            Ok(detail) => println!("PASS {}. {name} ({took:.2?}): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {}. {name} ({took:.2?}): {detail}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

use nalgebra::DMatrix;

use crate::error::{domain, Error, Result};
use crate::special::KahanSum;

/// Largest `n` for exact enumeration of `Σ ε_i x_i`.
pub const LINEAR_CAP: usize = 24;
/// Largest `n` for exact enumeration of `εᵀ P ε`.
pub const QUADRATIC_CAP: usize = 20;
/// Entrywise tolerance on `P² = P` and `P = Pᵀ`.
pub const PROJECTOR_TOLERANCE: f64 = 1e-9;

// Values closer than this (relative to the largest magnitude) are merged.
const MERGE_TOLERANCE: f64 = 1e-12;

/// Exact law of a statistic of a uniform sign vector.
///
/// Probabilities are `counts[i] / total` with `total = 2ⁿ`. Support points
/// that agree up to rounding are merged and represented by the largest
/// member, which can only enlarge upper tail probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct SignDistribution {
    pub n: usize,
    pub support: Vec<f64>,
    pub counts: Vec<u64>,
    pub total: u64,
}

impl SignDistribution {
    fn from_values(n: usize, mut values: Vec<f64>, weight: u64) -> Self {
        values.sort_by(f64::total_cmp);
        let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let tol = MERGE_TOLERANCE * scale;
        let mut support: Vec<f64> = Vec::new();
        let mut counts: Vec<u64> = Vec::new();
        let mut anchor = f64::NEG_INFINITY;
        for v in values {
            match support.last_mut() {
                Some(last) if v - anchor <= tol => {
                    *last = v;
                    *counts.last_mut().expect("counts track support") += weight;
                }
                _ => {
                    anchor = v;
                    support.push(v);
                    counts.push(weight);
                }
            }
        }
        SignDistribution {
            n,
            support,
            counts,
            total: 1u64 << n,
        }
    }

    pub fn probs(&self) -> Vec<f64> {
        let total = self.total as f64;
        self.counts.iter().map(|&c| c as f64 / total).collect()
    }

    /// `Σ p_i f(s_i)` with compensated summation.
    pub fn expectation(&self, f: impl Fn(f64) -> f64) -> f64 {
        let acc: KahanSum = self
            .support
            .iter()
            .zip(&self.counts)
            .map(|(&s, &c)| c as f64 * f(s))
            .collect();
        acc.total() / self.total as f64
    }

    pub fn mean(&self) -> f64 {
        self.expectation(|s| s)
    }

    /// `P(S ≥ u)`, counting support points within rounding of `u`.
    pub fn tail_probability(&self, u: f64) -> f64 {
        let cut = u - MERGE_TOLERANCE * u.abs().max(1.0);
        let start = self.support.partition_point(|&s| s < cut);
        let hits: u64 = self.counts[start..].iter().sum();
        hits as f64 / self.total as f64
    }
}

// Evaluate `value(k)` for k in 0..count, split into contiguous blocks
// across threads. Each value depends only on k, so the multiset of results
// does not depend on the split.
fn enumerate_blocks<F>(count: u64, threads: usize, value: F) -> Vec<f64>
where
    F: Fn(u64) -> f64 + Sync,
{
    let threads = threads.clamp(1, count.max(1) as usize);
    if threads == 1 {
        return (0..count).map(&value).collect();
    }
    let block = count.div_ceil(threads as u64);
    let value = &value;
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads as u64)
            .map(|b| {
                let lo = (b * block).min(count);
                let hi = ((b + 1) * block).min(count);
                scope.spawn(move || (lo..hi).map(value).collect::<Vec<f64>>())
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("enumeration worker panicked"))
            .collect()
    })
}

fn check_size(n: usize, cap: usize) -> Result<()> {
    if n == 0 {
        return Err(domain("enumeration needs at least one coordinate"));
    }
    if n > cap {
        return Err(Error::EnumerationTooLarge { n, cap });
    }
    Ok(())
}

/// Exact law of `Σ ε_i x_i`.
///
/// Only sign vectors with `ε_1 = +1` are visited; the other half is the
/// mirror image.
pub fn exact_linear_distribution(x: &[f64], threads: usize) -> Result<SignDistribution> {
    let n = x.len();
    check_size(n, LINEAR_CAP)?;
    if x.iter().any(|v| !v.is_finite()) {
        return Err(domain("coefficients must be finite"));
    }
    let half = enumerate_blocks(1u64 << (n - 1), threads, |k| {
        let mut s = x[0];
        for (i, &xi) in x[1..].iter().enumerate() {
            if (k >> i) & 1 == 1 {
                s += xi;
            } else {
                s -= xi;
            }
        }
        s
    });
    let mut values = Vec::with_capacity(2 * half.len());
    for s in half {
        values.push(s);
        values.push(-s);
    }
    Ok(SignDistribution::from_values(n, values, 1))
}

/// Exact law of `εᵀ P ε` for an orthogonal projector `P`.
///
/// The form is even in `ε`, so half the sign vectors are visited with
/// weight two.
pub fn exact_quadratic_distribution(p: &DMatrix<f64>, threads: usize) -> Result<SignDistribution> {
    let n = p.nrows();
    if p.ncols() != n {
        return Err(domain(format!(
            "projector must be square, got {n}x{}",
            p.ncols()
        )));
    }
    check_size(n, QUADRATIC_CAP)?;
    let deviation = (p * p - p).amax().max((p - p.transpose()).amax());
    if !(deviation <= PROJECTOR_TOLERANCE) {
        return Err(Error::NotProjector { deviation });
    }
    let trace = p.trace();
    let values = enumerate_blocks(1u64 << (n - 1), threads, |k| {
        let sign = |i: usize| -> f64 {
            if i == 0 || (k >> (i - 1)) & 1 == 1 {
                1.0
            } else {
                -1.0
            }
        };
        let mut cross = 0.0;
        for i in 0..n {
            let si = sign(i);
            for j in (i + 1)..n {
                cross += si * sign(j) * p[(i, j)];
            }
        }
        (trace + 2.0 * cross).clamp(0.0, n as f64)
    });
    Ok(SignDistribution::from_values(n, values, 2))
}

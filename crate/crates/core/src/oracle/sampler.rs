use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::hotelling::{projector, Projector, SampleMatrix};
use crate::json::sig17;

/// Law of a bounded symmetric weight `η` with `|η| ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SignKind {
    /// `±1` with probability ½ each.
    Rademacher,
    /// Uniform on `[−1, 1]`.
    UniformSign,
    /// `ε · B` with `B ~ Bernoulli(keep)` independent of the sign `ε`.
    ScaledBernoulli { keep: f64 },
}

/// Seeded stream of independent weights of one [`SignKind`].
#[derive(Debug, Clone)]
pub struct SymmetricSampler {
    kind: SignKind,
    rng: ChaCha8Rng,
}

impl SymmetricSampler {
    pub fn new(kind: SignKind, seed: u64) -> Result<Self> {
        if let SignKind::ScaledBernoulli { keep } = kind {
            if !(0.0..=1.0).contains(&keep) {
                return Err(domain(format!(
                    "keep probability must lie in [0, 1], got {keep}"
                )));
            }
        }
        Ok(SymmetricSampler {
            kind,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn kind(&self) -> SignKind {
        self.kind
    }

    pub fn next_weight(&mut self) -> f64 {
        match self.kind {
            SignKind::Rademacher => {
                if self.rng.random_bool(0.5) {
                    1.0
                } else {
                    -1.0
                }
            }
            SignKind::UniformSign => self.rng.random_range(-1.0..=1.0),
            SignKind::ScaledBernoulli { keep } => {
                let sign = if self.rng.random_bool(0.5) { 1.0 } else { -1.0 };
                if self.rng.random_bool(keep) {
                    sign
                } else {
                    0.0
                }
            }
        }
    }
}

impl Iterator for SymmetricSampler {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        Some(self.next_weight())
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct McEstimate {
    #[serde(serialize_with = "sig17")]
    pub mean: f64,
    #[serde(serialize_with = "sig17")]
    pub std_error: f64,
    pub draws: u64,
}

impl McEstimate {
    /// Whether `value` lies within `k` standard errors of the estimate.
    pub fn covers(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.std_error
    }
}

/// Monte Carlo estimate of `E g(Σ η_i x_i)`.
pub fn monte_carlo_linear(
    x: &[f64],
    kind: SignKind,
    seed: u64,
    draws: u64,
    g: impl Fn(f64) -> f64,
) -> Result<McEstimate> {
    if draws < 2 {
        return Err(domain("Monte Carlo needs at least two draws"));
    }
    let mut sampler = SymmetricSampler::new(kind, seed)?;
    let (mut mean, mut m2) = (0.0, 0.0);
    for i in 0..draws {
        let s: f64 = x.iter().map(|&xi| xi * sampler.next_weight()).sum();
        let y = g(s);
        let delta = y - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (y - mean);
    }
    let variance = m2 / (draws - 1) as f64;
    Ok(McEstimate {
        mean,
        std_error: (variance / draws as f64).sqrt(),
        draws,
    })
}

/// Uniform direction on the unit sphere in `ℝⁿ`.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Projector onto the span of `rank` Gaussian columns in `ℝⁿ`.
pub fn random_projector<R: Rng + ?Sized>(rng: &mut R, n: usize, rank: usize) -> Result<Projector> {
    if rank == 0 || rank > n {
        return Err(domain(format!(
            "projector rank must lie in 1..={n}, got {rank}"
        )));
    }
    let data = DMatrix::from_fn(n, rank, |_, _| rng.sample(StandardNormal));
    Ok(projector(&SampleMatrix::new(data)?))
}

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::geometry::Domain;

const PRIMES: [u32; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// How points are placed in a chart's domain box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "snake_case", deny_unknown_fields)]
pub enum Sampling {
    /// Cell centres of a regular grid. A single count applies to every axis.
    Grid { counts: Vec<usize> },
    /// Halton sequence with a seeded random shift (mod 1).
    Halton { count: usize, seed: u64 },
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling::Grid { counts: vec![10] }
    }
}

impl Sampling {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: &str| Err(HarnessError::Sampling(msg.to_string()));
        match self {
            Sampling::Grid { counts } if counts.is_empty() => bad("grid needs at least one count"),
            Sampling::Grid { counts } if counts.contains(&0) => bad("grid counts must be positive"),
            Sampling::Halton { count: 0, .. } => bad("sample count must be positive"),
            _ => Ok(()),
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        match self {
            Sampling::Halton { count, .. } => Sampling::Halton { count, seed },
            grid => grid,
        }
    }
}

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as f64;
    let mut inv = 1.0 / b;
    let mut r = 0.0;
    while i > 0 {
        r += (i % base as u64) as f64 * inv;
        i /= base as u64;
        inv /= b;
    }
    r
}

/// Deterministic point list for `domain` under `config`.
pub fn sample_domain(domain: &Domain, config: &Sampling) -> Result<Vec<Vec<f64>>, HarnessError> {
    domain
        .validate()
        .map_err(|e| HarnessError::Sampling(format!("invalid domain: {e}")))?;
    config.validate()?;
    let n = domain.dim();
    let scale = |axis: usize, t: f64| domain.lower[axis] + t * (domain.upper[axis] - domain.lower[axis]);
    match config {
        Sampling::Grid { counts } => {
            let counts: Vec<usize> = match counts.len() {
                1 => vec![counts[0]; n],
                len if len == n => counts.clone(),
                len => {
                    return Err(HarnessError::Sampling(format!(
                        "grid has {len} counts for a {n}-dimensional domain"
                    )))
                }
            };
            let total: usize = counts.iter().product();
            let mut points = Vec::with_capacity(total);
            for flat in 0..total {
                let mut rest = flat;
                let mut p = vec![0.0; n];
                for axis in (0..n).rev() {
                    let k = rest % counts[axis];
                    rest /= counts[axis];
                    p[axis] = scale(axis, (k as f64 + 0.5) / counts[axis] as f64);
                }
                points.push(p);
            }
            Ok(points)
        }
        Sampling::Halton { count, seed } => {
            if n > PRIMES.len() {
                return Err(HarnessError::Sampling(format!(
                    "Halton sampling supports up to {} axes",
                    PRIMES.len()
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let shift: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
            Ok((1..=*count as u64)
                .map(|i| {
                    (0..n)
                        .map(|axis| scale(axis, (radical_inverse(i, PRIMES[axis]) + shift[axis]).fract()))
                        .collect()
                })
                .collect())
        }
    }
}

//! Seeded test instances: matrices with a chosen spectrum, spectra that the
//! clock represents exactly, and the random family used for oracle checks.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{RealMatrix, RealVector};
use crate::qstate::SimRng;

/// Regularization values drawn for random instances.
pub const ALPHA_CHOICES: [f64; 3] = [0.05, 0.25, 1.0];
const DIMENSIONS: [usize; 3] = [2, 4, 8];
const MAX_RANK: usize = 4;
const MAX_KAPPA: f64 = 10.0;

pub fn rng(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// `n × k` matrix with orthonormal columns (Gaussian draw, Gram-Schmidt).
pub fn random_orthonormal(rng: &mut SimRng, n: usize, k: usize) -> Result<RealMatrix> {
    if k > n || k == 0 {
        return Err(Error::InvalidConfig(format!("cannot fit {k} orthonormal columns in {n} dims")));
    }
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(k);
    while columns.len() < k {
        let mut v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        // two passes keep the basis orthogonal to machine precision
        for _ in 0..2 {
            for c in &columns {
                let d: f64 = c.iter().zip(&v).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(c).for_each(|(x, ci)| *x -= d * ci);
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            columns.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    let mut data = vec![0.0; n * k];
    for (j, c) in columns.iter().enumerate() {
        for (i, x) in c.iter().enumerate() {
            data[i * k + j] = *x;
        }
    }
    RealMatrix::new(n, k, data)
}

/// `U diag(σ) Vᵀ` with random orthonormal `U` (m × R) and `V` (n × R).
pub fn matrix_from_spectrum(rng: &mut SimRng, m: usize, n: usize, singular: &[f64]) -> Result<RealMatrix> {
    let r = singular.len();
    if r > m.min(n) {
        return Err(Error::InvalidConfig(format!("rank {r} exceeds min({m}, {n})")));
    }
    let u = random_orthonormal(rng, m, r)?;
    let v = random_orthonormal(rng, n, r)?;
    let mut us = u;
    for i in 0..m {
        for (j, s) in singular.iter().enumerate() {
            let value = us.get(i, j) * s;
            us.set(i, j, value);
        }
    }
    us.matmul(&v.transpose())
}

/// Singular values whose normalized squares are `k_r / 2^{t−1}`; the counts
/// must sum to `2^{t−1}` so that `‖X‖_F = 1`.
pub fn dyadic_singular_values(counts: &[usize], precision_bits: usize) -> Result<Vec<f64>> {
    let half = 1usize << (precision_bits - 1);
    if counts.iter().sum::<usize>() != half || counts.contains(&0) {
        return Err(Error::InvalidConfig(format!(
            "dyadic counts must be positive and sum to {half}"
        )));
    }
    Ok(counts
        .iter()
        .map(|&k| (k as f64 / half as f64).sqrt())
        .collect())
}

pub fn dyadic_matrix(
    rng: &mut SimRng,
    m: usize,
    n: usize,
    counts: &[usize],
    precision_bits: usize,
) -> Result<RealMatrix> {
    matrix_from_spectrum(rng, m, n, &dyadic_singular_values(counts, precision_bits)?)
}

pub fn random_unit(rng: &mut SimRng, n: usize) -> RealVector {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        if let Some(u) = RealVector(v).normalized() {
            return u;
        }
    }
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub x: RealMatrix,
    pub y: RealVector,
    pub x_new: RealVector,
    pub alpha: f64,
    pub kappa: f64,
    pub singular_values: Vec<f64>,
}

/// Draws `M, N ∈ {2, 4, 8}`, rank up to `min(M, N, 4)`, condition number in
/// `[1, 10]`, `‖X‖_F = 1`, unit `y` and `x′`, and α from [`ALPHA_CHOICES`].
pub fn random_instance(rng: &mut SimRng) -> Result<Instance> {
    let m = *DIMENSIONS.choose(rng).expect("nonempty");
    let n = *DIMENSIONS.choose(rng).expect("nonempty");
    let rank = rng.random_range(1..=m.min(n).min(MAX_RANK));
    let kappa = if rank == 1 { 1.0 } else { rng.random_range(1.0..=MAX_KAPPA) };
    let mut singular = vec![1.0];
    if rank > 1 {
        let mut inner: Vec<f64> = (0..rank - 2)
            .map(|_| rng.random_range(1.0 / kappa..=1.0))
            .collect();
        inner.sort_by(|a, b| b.total_cmp(a));
        singular.extend(inner);
        singular.push(1.0 / kappa);
    }
    let f = singular.iter().map(|s| s * s).sum::<f64>().sqrt();
    singular.iter_mut().for_each(|s| *s /= f);
    let x = matrix_from_spectrum(rng, m, n, &singular)?;
    Ok(Instance {
        y: random_unit(rng, m),
        x_new: random_unit(rng, n),
        alpha: *ALPHA_CHOICES.choose(rng).expect("nonempty"),
        x,
        kappa,
        singular_values: singular,
    })
}

pub fn random_instances(seed: u64, count: usize) -> Result<Vec<Instance>> {
    let mut rng = rng(seed);
    (0..count).map(|_| random_instance(&mut rng)).collect()
}

//! Seeded random generators shared by tests, benchmarks and the randomized
//! acceptance sweeps. Everything goes through `ChaCha8Rng` so every run is
//! reproducible from a single `u64` seed.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::randers::{BetaConvention, RandersMetricSpec};
use crate::{CoeffVec, Result};

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Componentwise standard-normal vector.
pub fn gaussian_vector(dim: usize, rng: &mut impl Rng) -> CoeffVec {
    DVector::from_fn(dim, |_, _| StandardNormal.sample(rng))
}

/// A vector guaranteed to have norm at least `0.1` (resampled otherwise).
pub fn nonzero_vector(dim: usize, rng: &mut impl Rng) -> CoeffVec {
    loop {
        let v = gaussian_vector(dim, rng);
        if v.norm() > 0.1 {
            return v;
        }
    }
}

/// Random well-conditioned symmetric positive-definite Gram matrix.
pub fn random_spd_gram(dim: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let m: DMatrix<f64> = DMatrix::from_fn(dim, dim, |_, _| StandardNormal.sample(rng));
    &m * m.transpose() + DMatrix::identity(dim, dim) * (0.25 * dim as f64)
}

/// A Randers metric with the given `α` Gram and a random `β` direction scaled
/// to an exact `α`-norm, in the `AlphaDual` convention.
pub fn randers_with_beta_norm(
    alpha_gram: DMatrix<f64>,
    bi_gram: DMatrix<f64>,
    beta_norm: f64,
    rng: &mut impl Rng,
) -> Result<RandersMetricSpec> {
    let dim = alpha_gram.nrows();
    let dir = nonzero_vector(dim, rng);
    let current = (dir.transpose() * &alpha_gram * &dir)[(0, 0)].sqrt();
    let v = dir * (beta_norm / current);
    RandersMetricSpec::new(alpha_gram, v, BetaConvention::AlphaDual, bi_gram)
}

/// Uniform draw from a closed interval.
pub fn uniform_in(lo: f64, hi: f64, rng: &mut impl Rng) -> f64 {
    rng.random_range(lo..=hi)
}

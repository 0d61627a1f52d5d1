//! Left-invariant Randers metric data on the reductive complement `𝔪`.
//!
//! A Randers norm is `F(y) = √(yᵀAy) + β(y)` with `A` the Gram matrix of the
//! Riemannian part `α` on the `𝔪`-basis and `β` a linear form. Two dual
//! conventions for `β` are first-class because both occur in practice:
//! `β(y) = ⟨y,V⟩_α` (the vector `V` is the `α`-dual of `β`) and
//! `β(y) = ⟨y,V⟩_bi` (duality through a fixed bi-invariant form). The metric
//! is a valid Finsler norm exactly when the `α`-length of `β` is below one.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::{CoeffVec, Error, Result};

/// Margin on the strict inequality `‖β‖_α < 1`.
const VALIDITY_MARGIN: f64 = 1e-12;

/// How the vector `v` induces the one-form `β`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BetaConvention {
    /// `β(y) = yᵀ A v`: `v` is the dual of `β` in the `α` inner product.
    #[serde(rename = "alpha")]
    AlphaDual,
    /// `β(y) = yᵀ B v`: duality through the bi-invariant Gram `B`.
    #[serde(rename = "bi")]
    BiDual,
}

/// Validity verdict for a candidate Randers metric.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ValidityReport {
    pub valid: bool,
    pub alpha_norm_of_beta: f64,
}

/// A left-invariant Randers metric on `𝔪`, frozen at construction.
#[derive(Debug, Clone)]
pub struct RandersMetricSpec {
    alpha_gram: DMatrix<f64>,
    v_vector: CoeffVec,
    beta_convention: BetaConvention,
    bi_gram: DMatrix<f64>,
    /// Covector of `β` in plain coordinates: `A v` or `B v`.
    beta_covector: CoeffVec,
    alpha_norm_of_beta: f64,
    min_alpha_eigenvalue: f64,
}

impl RandersMetricSpec {
    /// Builds a metric, enforcing the symmetric positive-definite contract on
    /// the `α` Gram. Validity (`‖β‖_α < 1`) is recorded, not enforced, so the
    /// construction pipeline can inspect failing candidates.
    pub fn new(
        alpha_gram: DMatrix<f64>,
        v_vector: CoeffVec,
        beta_convention: BetaConvention,
        bi_gram: DMatrix<f64>,
    ) -> Result<Self> {
        let dim = alpha_gram.nrows();
        if alpha_gram.ncols() != dim || v_vector.len() != dim || bi_gram.nrows() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: v_vector.len(),
            });
        }
        let sym_defect = (&alpha_gram - alpha_gram.transpose()).norm();
        if sym_defect > 1e-12 * (1.0 + alpha_gram.norm()) {
            return Err(Error::NotSymmetric { defect: sym_defect });
        }
        let eigs = alpha_gram.clone().symmetric_eigen().eigenvalues;
        let min_alpha_eigenvalue = eigs.min();
        if min_alpha_eigenvalue <= 0.0 {
            return Err(Error::NotPositiveDefinite {
                min_eigenvalue: min_alpha_eigenvalue,
            });
        }
        let beta_covector = match beta_convention {
            BetaConvention::AlphaDual => &alpha_gram * &v_vector,
            BetaConvention::BiDual => &bi_gram * &v_vector,
        };
        // ‖β‖_α² = cᵀ A⁻¹ c for the covector c.
        let solved = alpha_gram
            .clone()
            .cholesky()
            .ok_or(Error::NotPositiveDefinite {
                min_eigenvalue: min_alpha_eigenvalue,
            })?
            .solve(&beta_covector);
        let alpha_norm_of_beta = beta_covector.dot(&solved).max(0.0).sqrt();
        Ok(RandersMetricSpec {
            alpha_gram,
            v_vector,
            beta_convention,
            bi_gram,
            beta_covector,
            alpha_norm_of_beta,
            min_alpha_eigenvalue,
        })
    }

    /// Purely Riemannian metric (`β = 0`) for a given Gram matrix.
    pub fn riemannian(alpha_gram: DMatrix<f64>) -> Result<Self> {
        let dim = alpha_gram.nrows();
        let bi = DMatrix::identity(dim, dim);
        Self::new(
            alpha_gram,
            DVector::zeros(dim),
            BetaConvention::AlphaDual,
            bi,
        )
    }

    pub fn dim(&self) -> usize {
        self.alpha_gram.nrows()
    }

    pub fn alpha_gram(&self) -> &DMatrix<f64> {
        &self.alpha_gram
    }

    pub fn v_vector(&self) -> &CoeffVec {
        &self.v_vector
    }

    pub fn beta_convention(&self) -> BetaConvention {
        self.beta_convention
    }

    pub fn bi_gram(&self) -> &DMatrix<f64> {
        &self.bi_gram
    }

    /// The covector of `β`: `β(y) = covector · y`.
    pub fn beta_covector(&self) -> &CoeffVec {
        &self.beta_covector
    }

    /// `‖β‖_α` and the verdict of the strict positivity condition.
    pub fn validity_check(&self) -> ValidityReport {
        ValidityReport {
            valid: self.alpha_norm_of_beta < 1.0 - VALIDITY_MARGIN,
            alpha_norm_of_beta: self.alpha_norm_of_beta,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.validity_check().valid
    }

    pub fn min_alpha_eigenvalue(&self) -> f64 {
        self.min_alpha_eigenvalue
    }

    /// Riemannian part `√(yᵀAy)`.
    pub fn alpha_norm(&self, y: &CoeffVec) -> f64 {
        (y.transpose() * &self.alpha_gram * y)[(0, 0)].max(0.0).sqrt()
    }

    /// One-form part `β(y)`.
    pub fn beta_value(&self, y: &CoeffVec) -> f64 {
        self.beta_covector.dot(y)
    }

    /// Full Randers norm `F(y) = α(y) + β(y)`; positive on valid metrics.
    pub fn finsler_norm(&self, y: &CoeffVec) -> Result<f64> {
        if y.norm() == 0.0 {
            return Err(Error::ZeroVector);
        }
        if !self.is_valid() {
            return Err(Error::InvalidMetric {
                alpha_norm_of_beta: self.alpha_norm_of_beta,
            });
        }
        Ok(self.alpha_norm(y) + self.beta_value(y))
    }

    /// A Randers metric is reversible iff it is Riemannian, i.e. `β = 0`.
    pub fn reversibility_check(&self) -> bool {
        self.beta_covector.norm() <= 1e-12 * (1.0 + self.alpha_gram.norm())
    }

    /// Re-expresses a `BiDual` metric in the `AlphaDual` convention: the two
    /// define the same function when `v_alpha = A⁻¹ B v_bi`.
    pub fn to_alpha_dual(&self) -> Result<Self> {
        match self.beta_convention {
            BetaConvention::AlphaDual => Ok(self.clone()),
            BetaConvention::BiDual => {
                let chol = self
                    .alpha_gram
                    .clone()
                    .cholesky()
                    .ok_or(Error::NotPositiveDefinite {
                        min_eigenvalue: self.min_alpha_eigenvalue,
                    })?;
                let v_alpha = chol.solve(&self.beta_covector);
                Self::new(
                    self.alpha_gram.clone(),
                    v_alpha,
                    BetaConvention::AlphaDual,
                    self.bi_gram.clone(),
                )
            }
        }
    }
}

/// Summary statistics of sampled Finsler lengths along an orbit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LengthReport {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub spread: f64,
    pub relative_spread: f64,
    pub sample_count: usize,
    pub seed: u64,
}

impl LengthReport {
    /// Reduces a nonempty list of sampled lengths.
    pub fn from_lengths(lengths: &[f64], seed: u64) -> Self {
        let min = lengths.iter().copied().fold(f64::INFINITY, f64::min);
        let max = lengths.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mean = lengths.iter().sum::<f64>() / lengths.len() as f64;
        let spread = max - min;
        LengthReport {
            min,
            max,
            mean,
            spread,
            relative_spread: if mean != 0.0 { spread / mean } else { f64::INFINITY },
            sample_count: lengths.len(),
            seed,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn eye(d: usize) -> DMatrix<f64> {
        DMatrix::identity(d, d)
    }

    fn ei(d: usize, i: usize) -> CoeffVec {
        DVector::from_fn(d, |r, _| if r == i { 1.0 } else { 0.0 })
    }

    #[test]
    fn pure_riemannian_norm() {
        let m = RandersMetricSpec::riemannian(eye(3)).unwrap();
        let y = DVector::from_vec(vec![3.0, 4.0, 0.0]);
        assert_relative_eq!(m.finsler_norm(&y).unwrap(), 5.0, epsilon = 1e-14);
        assert!(m.reversibility_check());
    }

    #[test]
    fn identity_gram_with_half_e1() {
        let m = RandersMetricSpec::new(
            eye(3),
            ei(3, 0) * 0.5,
            BetaConvention::AlphaDual,
            eye(3),
        )
        .unwrap();
        assert_relative_eq!(m.finsler_norm(&ei(3, 0)).unwrap(), 1.5, epsilon = 1e-14);
        let v = m.validity_check();
        assert!(v.valid);
        assert_relative_eq!(v.alpha_norm_of_beta, 0.5, epsilon = 1e-14);
    }

    #[test]
    fn unit_beta_is_invalid() {
        let m = RandersMetricSpec::new(eye(2), ei(2, 0), BetaConvention::AlphaDual, eye(2))
            .unwrap();
        assert!(!m.validity_check().valid);
        assert!(matches!(
            m.finsler_norm(&ei(2, 0)),
            Err(Error::InvalidMetric { .. })
        ));
    }

    #[test]
    fn bi_dual_validity_formula() {
        // B = I, A = 4I, ‖V‖ = 1: ‖β‖_α² = (BV)ᵀ A⁻¹ (BV) = 1/4.
        let m = RandersMetricSpec::new(eye(3) * 4.0, ei(3, 1), BetaConvention::BiDual, eye(3))
            .unwrap();
        let v = m.validity_check();
        assert!(v.valid);
        assert_relative_eq!(v.alpha_norm_of_beta, 0.5, epsilon = 1e-14);

        // Independent oracle: direct formula with the explicit inverse.
        let cov = eye(3) * ei(3, 1);
        let expected = (cov.transpose() * (eye(3) * 0.25) * &cov)[(0, 0)];
        assert_relative_eq!(v.alpha_norm_of_beta * v.alpha_norm_of_beta, expected);
    }

    #[test]
    fn positive_homogeneity() {
        let m = RandersMetricSpec::new(
            eye(3) * 2.0,
            ei(3, 2) * 0.3,
            BetaConvention::AlphaDual,
            eye(3),
        )
        .unwrap();
        let y = DVector::from_vec(vec![1.0, -0.5, 2.0]);
        let f = m.finsler_norm(&y).unwrap();
        let f2 = m.finsler_norm(&(&y * 2.0)).unwrap();
        assert_relative_eq!(f2, 2.0 * f, epsilon = 1e-12);
    }

    #[test]
    fn irreversibility_gap_is_twice_beta() {
        let m = RandersMetricSpec::new(
            eye(3),
            ei(3, 0) * 0.4,
            BetaConvention::AlphaDual,
            eye(3),
        )
        .unwrap();
        assert!(!m.reversibility_check());
        let y = DVector::from_vec(vec![0.7, 0.2, -0.1]);
        let gap = m.finsler_norm(&y).unwrap() - m.finsler_norm(&(-&y)).unwrap();
        assert_relative_eq!(gap, 2.0 * m.beta_value(&y), epsilon = 1e-12);
    }

    #[test]
    fn rejects_asymmetric_and_indefinite_grams() {
        let mut bad = eye(2);
        bad[(0, 1)] = 0.5;
        assert!(matches!(
            RandersMetricSpec::riemannian(bad),
            Err(Error::NotSymmetric { .. })
        ));
        let indef = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -2.0]));
        assert!(matches!(
            RandersMetricSpec::riemannian(indef),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn zero_vector_is_rejected() {
        let m = RandersMetricSpec::riemannian(eye(2)).unwrap();
        assert!(matches!(
            m.finsler_norm(&DVector::zeros(2)),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn convention_coherence() {
        // A BiDual spec equals the AlphaDual spec with vector A⁻¹ B v.
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let dim = 4;
        for _ in 0..20 {
            let m_rand: DMatrix<f64> =
                DMatrix::from_fn(dim, dim, |_, _| StandardNormal.sample(&mut rng));
            let a: DMatrix<f64> = &m_rand * m_rand.transpose() + eye(dim) * (dim as f64);
            let b = eye(dim) * 2.0;
            let v = DVector::from_fn(dim, |_, _| {
                let g: f64 = StandardNormal.sample(&mut rng);
                g * 0.1
            });
            let bi = RandersMetricSpec::new(a.clone(), v, BetaConvention::BiDual, b).unwrap();
            if !bi.is_valid() {
                continue;
            }
            let al = bi.to_alpha_dual().unwrap();
            for _ in 0..10 {
                let y = DVector::from_fn(dim, |_, _| StandardNormal.sample(&mut rng));
                let fb = bi.finsler_norm(&y).unwrap();
                let fa = al.finsler_norm(&y).unwrap();
                assert_relative_eq!(fb, fa, epsilon = 1e-12, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn length_report_statistics() {
        let r = LengthReport::from_lengths(&[1.0, 2.0, 4.0], 7);
        assert_relative_eq!(r.min, 1.0);
        assert_relative_eq!(r.max, 4.0);
        assert_relative_eq!(r.mean, 7.0 / 3.0);
        assert_relative_eq!(r.spread, 3.0);
        assert_relative_eq!(r.relative_spread, 9.0 / 7.0);
        assert_eq!(r.sample_count, 3);
        assert_eq!(r.seed, 7);
    }
}

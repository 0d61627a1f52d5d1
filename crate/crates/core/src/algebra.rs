//! Matrix Lie algebra and group arithmetic for block-diagonal products of
//! `su(k)` and one-dimensional abelian factors.
//!
//! Every algebra element is handled in two representations: a real coefficient
//! vector over the documented basis, and the ambient anti-Hermitian complex
//! matrix it expands to. The basis is the generalized Gell-Mann convention —
//! for each factor `su(k)` the off-diagonal pairs `i(E_pq + E_qp)` and
//! `E_pq − E_qp` (p < q, lexicographic), followed by the normalized traceless
//! imaginary diagonals — so the bi-invariant Gram `Re tr(P*Q)` is diagonal and
//! coefficient expansion is a plain orthogonal projection.

use nalgebra::{Cholesky, DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::{CMat, CoeffVec, Error, Result};

/// Relative rank threshold used for every span/rank decision in this module.
pub const RANK_TOL: f64 = 1e-10;

/// One direct factor of a supported algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    /// The special unitary algebra `su(k)`, embedded as a `k×k` block.
    Su(usize),
    /// A one-dimensional abelian factor, embedded as a `1×1` imaginary block.
    Abelian,
}

impl Factor {
    fn block_size(self) -> usize {
        match self {
            Factor::Su(k) => k,
            Factor::Abelian => 1,
        }
    }

    fn dim(self) -> usize {
        match self {
            Factor::Su(k) => k * k - 1,
            Factor::Abelian => 1,
        }
    }
}

impl Serialize for Factor {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Factor::Su(k) => ("su", *k as u64).serialize(s),
            Factor::Abelian => ("abelian", 1u64).serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for Factor {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let (name, k): (String, u64) = Deserialize::deserialize(d)?;
        match (name.as_str(), k) {
            ("su", k) if k >= 2 => Ok(Factor::Su(k as usize)),
            ("abelian", 1) => Ok(Factor::Abelian),
            _ => Err(serde::de::Error::custom(format!(
                "unsupported factor [{name:?}, {k}]: expected [\"su\", k>=2] or [\"abelian\", 1]"
            ))),
        }
    }
}

/// Placement of one factor inside the ambient matrix space and the basis list.
#[derive(Debug, Clone, Copy)]
pub struct FactorBlock {
    pub kind: Factor,
    /// First ambient row/column of this factor's diagonal block.
    pub ambient_offset: usize,
    /// First index of this factor's basis elements.
    pub basis_offset: usize,
}

impl FactorBlock {
    pub fn ambient_range(&self) -> std::ops::Range<usize> {
        self.ambient_offset..self.ambient_offset + self.kind.block_size()
    }

    pub fn basis_range(&self) -> std::ops::Range<usize> {
        self.basis_offset..self.basis_offset + self.kind.dim()
    }
}

/// A compact matrix Lie algebra with cached basis and structure constants.
#[derive(Debug, Clone)]
pub struct MatrixLieAlgebra {
    ambient_dim: usize,
    factors: Vec<FactorBlock>,
    basis: Vec<CMat>,
    bi_gram: DMatrix<f64>,
    /// `ad_rep[i] * q == coefficients of [b_i, q]` for coefficient vectors `q`.
    ad_rep: Vec<DMatrix<f64>>,
}

impl MatrixLieAlgebra {
    /// Builds the algebra for a list of factors, embedded block-diagonally.
    pub fn new(factors: &[Factor]) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::UnsupportedAlgebra("empty factor list".into()));
        }
        let ambient_dim: usize = factors.iter().map(|f| f.block_size()).sum();
        let mut blocks = Vec::with_capacity(factors.len());
        let mut basis: Vec<CMat> = Vec::new();
        let mut ambient_offset = 0;
        for &kind in factors {
            blocks.push(FactorBlock {
                kind,
                ambient_offset,
                basis_offset: basis.len(),
            });
            for local in factor_basis(kind) {
                let mut b = CMat::zeros(ambient_dim, ambient_dim);
                let k = kind.block_size();
                b.view_mut((ambient_offset, ambient_offset), (k, k))
                    .copy_from(&local);
                basis.push(b);
            }
            ambient_offset += kind.block_size();
        }

        let dim = basis.len();
        let bi_gram = DMatrix::from_fn(dim, dim, |i, j| re_trace_product(&basis[i], &basis[j]));

        let mut algebra = MatrixLieAlgebra {
            ambient_dim,
            factors: blocks,
            basis,
            bi_gram,
            ad_rep: Vec::new(),
        };
        let mut ad_rep = Vec::with_capacity(dim);
        for i in 0..dim {
            let mut ad_i = DMatrix::zeros(dim, dim);
            for j in 0..dim {
                let m = &algebra.basis[i] * &algebra.basis[j] - &algebra.basis[j] * &algebra.basis[i];
                let coeffs = algebra.from_matrix(&m)?;
                ad_i.set_column(j, &coeffs);
            }
            ad_rep.push(ad_i);
        }
        algebra.ad_rep = ad_rep;
        Ok(algebra)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn factors(&self) -> &[FactorBlock] {
        &self.factors
    }

    pub fn factor_kinds(&self) -> Vec<Factor> {
        self.factors.iter().map(|b| b.kind).collect()
    }

    pub fn basis(&self) -> &[CMat] {
        &self.basis
    }

    /// Gram matrix of `Re tr(P*Q)` on the basis; diagonal by construction.
    pub fn bi_gram(&self) -> &DMatrix<f64> {
        &self.bi_gram
    }

    /// True when the algebra is a single `su(k)` factor.
    pub fn is_single_su(&self, k: usize) -> bool {
        self.factors.len() == 1 && self.factors[0].kind == Factor::Su(k)
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> f64 {
        self.ad_rep[i][(k, j)]
    }

    /// The adjoint representation matrix of `x`: `ad_x q = [x, q]` in coordinates.
    pub fn ad_matrix(&self, x: &CoeffVec) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim(), self.dim());
        for (i, ad_i) in self.ad_rep.iter().enumerate() {
            if x[i] != 0.0 {
                m += ad_i * x[i];
            }
        }
        m
    }

    /// Expands a coefficient vector to its ambient anti-Hermitian matrix.
    pub fn to_matrix(&self, x: &CoeffVec) -> CMat {
        assert_eq!(x.len(), self.dim(), "coefficient length mismatch");
        let mut m = CMat::zeros(self.ambient_dim, self.ambient_dim);
        for (i, b) in self.basis.iter().enumerate() {
            if x[i] != 0.0 {
                m += b * Complex64::new(x[i], 0.0);
            }
        }
        m
    }

    /// Projects an ambient matrix back to basis coordinates.
    ///
    /// Fails when the matrix does not lie in the algebra span (residual above
    /// `1e-10` relative to the matrix norm), which signals either an input
    /// outside the algebra or a corrupted basis.
    pub fn from_matrix(&self, m: &CMat) -> Result<CoeffVec> {
        if m.nrows() != self.ambient_dim || m.ncols() != self.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                got: m.nrows(),
            });
        }
        let dim = self.dim();
        let mut coeffs = DVector::zeros(dim);
        for i in 0..dim {
            coeffs[i] = re_trace_product(&self.basis[i], m) / self.bi_gram[(i, i)];
        }
        let residual = (m - self.to_matrix(&coeffs)).norm();
        if residual > 1e-10 * (1.0 + m.norm()) {
            return Err(Error::NotInSpan { residual });
        }
        Ok(coeffs)
    }

    /// Lie bracket `[p, q] = PQ − QP`, re-expressed in basis coordinates.
    pub fn bracket(&self, p: &CoeffVec, q: &CoeffVec) -> Result<CoeffVec> {
        if p.len() != self.dim() || q.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: if p.len() != self.dim() { p.len() } else { q.len() },
            });
        }
        Ok(self.ad_matrix(p) * q)
    }

    /// Exponential of an algebra element, via Hermitian eigendecomposition of
    /// `−i Z`; the result is unitary to rounding.
    pub fn exponential(&self, z: &CoeffVec) -> Result<GroupElement> {
        let zm = self.to_matrix(z);
        let u = exp_anti_hermitian(&zm)?;
        Ok(GroupElement {
            matrix: u,
            log_factors: vec![z.clone()],
        })
    }

    /// Adjoint action `g X g⁻¹` in basis coordinates.
    pub fn ad_orbit_point(&self, g: &GroupElement, x: &CoeffVec) -> Result<CoeffVec> {
        let conj = self.conjugate(g, &self.to_matrix(x));
        self.from_matrix(&conj)
    }

    /// Ambient-space conjugation `g M g*`.
    pub fn conjugate(&self, g: &GroupElement, m: &CMat) -> CMat {
        &g.matrix * m * g.matrix.adjoint()
    }

    /// The adjoint action of `g` as a real matrix on basis coordinates, so
    /// that `Ad_g x = M x` for every coefficient vector `x`.
    pub fn ad_coordinate_matrix(&self, g: &GroupElement) -> Result<DMatrix<f64>> {
        let dim = self.dim();
        let mut m = DMatrix::zeros(dim, dim);
        for j in 0..dim {
            let col = self.from_matrix(&self.conjugate(g, &self.basis[j]))?;
            m.set_column(j, &col);
        }
        Ok(m)
    }

    /// Sorted eigenvalues of the Hermitian matrix `−i X`; the spectrum of `X`
    /// is this multiset times `i`.
    pub fn spectrum(&self, x: &CoeffVec) -> Vec<f64> {
        hermitian_spectrum(&self.to_matrix(x))
    }

    /// Smallest ideal of the algebra containing the span of `gens`, returned
    /// as a basis orthonormal under the bi-invariant form.
    ///
    /// Iterates `W ← span(W ∪ [bᵢ, W])` until the dimension is unchanged for
    /// a full sweep.
    pub fn generate_ideal(&self, gens: &[CoeffVec]) -> Result<Vec<CoeffVec>> {
        let nonzero: Vec<CoeffVec> = gens.iter().filter(|v| v.norm() > 1e-14).cloned().collect();
        if nonzero.is_empty() {
            return Err(Error::AllZeroInput);
        }
        let mut basis = orthonormal_span(&nonzero, &self.bi_gram);
        loop {
            let mut candidates = basis.clone();
            for ad_i in &self.ad_rep {
                for w in &basis {
                    candidates.push(ad_i * w);
                }
            }
            let next = orthonormal_span(&candidates, &self.bi_gram);
            if next.len() == basis.len() {
                return Ok(basis);
            }
            basis = next;
        }
    }

    /// Draws `count` group elements, each a product of three exponentials of
    /// independent standard-normal algebra elements.
    ///
    /// Deterministic for a fixed seed; sample `i` uses its own stream of a
    /// counter-based generator, so results do not depend on evaluation order.
    /// The law is not Haar-uniform, which is fine for exposing non-constant
    /// lengths on orbits.
    pub fn sample_group(&self, count: usize, seed: u64) -> Vec<GroupElement> {
        (0..count).map(|i| self.sample_one(seed, i as u64)).collect()
    }

    fn sample_one(&self, seed: u64, stream: u64) -> GroupElement {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream.wrapping_add(1));
        let mut g = GroupElement::identity(self.ambient_dim);
        for _ in 0..3 {
            let z = self.random_element(&mut rng);
            let e = self.exponential(&z).expect("basis elements are anti-Hermitian");
            g = g.compose(&e);
        }
        g
    }

    /// Standard-normal coefficients in basis coordinates (scale 1).
    pub fn random_element(&self, rng: &mut impl rand::Rng) -> CoeffVec {
        DVector::from_fn(self.dim(), |_, _| StandardNormal.sample(rng))
    }

    /// Verifies the construction invariants; exercised by the test suites.
    pub fn validate(&self) -> Result<()> {
        let n = self.ambient_dim;
        for b in &self.basis {
            let defect = (b.adjoint() + b).norm();
            if defect > 1e-12 {
                return Err(Error::NotAntiHermitian { defect });
            }
        }
        for block in &self.factors {
            if let Factor::Su(_) = block.kind {
                for i in block.basis_range() {
                    let tr: Complex64 = self.basis[i].trace();
                    if tr.norm() > 1e-12 {
                        return Err(Error::ConstraintViolation(format!(
                            "su-factor basis element {i} is not traceless"
                        )));
                    }
                }
            }
        }
        // Structure constants: antisymmetry and the Jacobi identity.
        let dim = self.dim();
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    let asym = self.structure_constant(i, j, k) + self.structure_constant(j, i, k);
                    if asym.abs() > 1e-10 {
                        return Err(Error::ConstraintViolation(format!(
                            "structure constants not antisymmetric at ({i},{j},{k})"
                        )));
                    }
                }
            }
        }
        let e = |i: usize| -> CoeffVec { DVector::from_fn(dim, |r, _| if r == i { 1.0 } else { 0.0 }) };
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    let jac = self.bracket(&e(i), &self.bracket(&e(j), &e(k))?)?
                        + self.bracket(&e(j), &self.bracket(&e(k), &e(i))?)?
                        + self.bracket(&e(k), &self.bracket(&e(i), &e(j))?)?;
                    if jac.norm() > 1e-10 {
                        return Err(Error::ConstraintViolation(format!(
                            "Jacobi identity fails at ({i},{j},{k}): {:.3e}",
                            jac.norm()
                        )));
                    }
                }
            }
        }
        // Distinct factors commute.
        for a in &self.factors {
            for b in &self.factors {
                if a.basis_offset == b.basis_offset {
                    continue;
                }
                for i in a.basis_range() {
                    for j in b.basis_range() {
                        let br = self.bracket(&e(i), &e(j))?;
                        if br.norm() > 1e-12 {
                            return Err(Error::ConstraintViolation(format!(
                                "cross-factor bracket ({i},{j}) is nonzero"
                            )));
                        }
                    }
                }
            }
        }
        let _ = n;
        Ok(())
    }
}

/// A point of the group: a unitary matrix plus the generator log-history that
/// produced it (empty for the identity).
#[derive(Debug, Clone)]
pub struct GroupElement {
    matrix: CMat,
    log_factors: Vec<CoeffVec>,
}

impl GroupElement {
    pub fn identity(ambient_dim: usize) -> Self {
        GroupElement {
            matrix: CMat::identity(ambient_dim, ambient_dim),
            log_factors: Vec::new(),
        }
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn log_factors(&self) -> &[CoeffVec] {
        &self.log_factors
    }

    /// Group product `self · other`; log histories concatenate.
    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        let mut log_factors = self.log_factors.clone();
        log_factors.extend(other.log_factors.iter().cloned());
        GroupElement {
            matrix: &self.matrix * &other.matrix,
            log_factors,
        }
    }

    /// Inverse via the conjugate transpose; the log history reverses and negates.
    pub fn inverse(&self) -> GroupElement {
        GroupElement {
            matrix: self.matrix.adjoint(),
            log_factors: self.log_factors.iter().rev().map(|z| -z).collect(),
        }
    }

    /// `‖g*g − I‖_F`; the contract bound is `1e-11 · n`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.matrix.nrows();
        (self.matrix.adjoint() * &self.matrix - CMat::identity(n, n)).norm()
    }

    /// Checks unitarity and the per-factor determinant conditions.
    pub fn validate(&self, algebra: &MatrixLieAlgebra) -> Result<()> {
        let n = algebra.ambient_dim();
        let defect = self.unitarity_defect();
        if defect > 1e-11 * n as f64 {
            return Err(Error::ConstraintViolation(format!(
                "unitarity defect {defect:.3e} exceeds bound"
            )));
        }
        let det = self.matrix.clone().determinant();
        if (det.norm() - 1.0).abs() > 1e-10 {
            return Err(Error::ConstraintViolation(format!(
                "determinant modulus {:.12} is off the unit circle",
                det.norm()
            )));
        }
        for block in algebra.factors() {
            if let Factor::Su(k) = block.kind {
                let sub = self
                    .matrix
                    .view((block.ambient_offset, block.ambient_offset), (k, k))
                    .clone_owned();
                let bdet = sub.determinant();
                if (bdet - Complex64::new(1.0, 0.0)).norm() > 1e-10 {
                    return Err(Error::ConstraintViolation(format!(
                        "su block determinant {bdet} differs from 1"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// The Ad-invariant form `⟨P,Q⟩ = Re tr(P*Q)`, optionally rescaled by a
/// positive weight per factor.
#[derive(Debug, Clone)]
pub struct BiInvariantForm {
    gram: DMatrix<f64>,
    weights: Option<Vec<f64>>,
}

impl BiInvariantForm {
    pub fn standard(algebra: &MatrixLieAlgebra) -> Self {
        BiInvariantForm {
            gram: algebra.bi_gram().clone(),
            weights: None,
        }
    }

    /// Per-factor positive scale weights applied to the standard form.
    pub fn scaled(algebra: &MatrixLieAlgebra, weights: &[f64]) -> Result<Self> {
        if weights.len() != algebra.factors().len() {
            return Err(Error::DimensionMismatch {
                expected: algebra.factors().len(),
                got: weights.len(),
            });
        }
        if let Some(w) = weights.iter().find(|w| **w <= 0.0) {
            return Err(Error::ConstraintViolation(format!(
                "factor weight {w} must be positive"
            )));
        }
        let mut gram = algebra.bi_gram().clone();
        for (block, &w) in algebra.factors().iter().zip(weights) {
            for i in block.basis_range() {
                for j in 0..gram.ncols() {
                    gram[(i, j)] *= w.sqrt();
                    gram[(j, i)] *= w.sqrt();
                }
            }
        }
        Ok(BiInvariantForm {
            gram,
            weights: Some(weights.to_vec()),
        })
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    pub fn inner(&self, p: &CoeffVec, q: &CoeffVec) -> f64 {
        (p.transpose() * &self.gram * q)[(0, 0)]
    }

    pub fn norm(&self, p: &CoeffVec) -> f64 {
        self.inner(p, p).max(0.0).sqrt()
    }
}

/// Orthogonal splitting `𝔤 = 𝔥 ⊕ 𝔪` with the projection onto `𝔪` along `𝔥`.
#[derive(Debug, Clone)]
pub struct ReductiveDecomposition {
    h_basis: Vec<CoeffVec>,
    m_basis: Vec<CoeffVec>,
    /// Maps algebra coordinates to `𝔪`-coordinates of the projection.
    proj_m: DMatrix<f64>,
    /// Columns are the `𝔪`-basis in algebra coordinates.
    embed_m: DMatrix<f64>,
}

impl ReductiveDecomposition {
    /// The group itself as a homogeneous space: `𝔥 = 0`, `𝔪`-basis = algebra basis.
    pub fn trivial(algebra: &MatrixLieAlgebra) -> Self {
        let dim = algebra.dim();
        let eye = DMatrix::identity(dim, dim);
        ReductiveDecomposition {
            h_basis: Vec::new(),
            m_basis: (0..dim).map(|i| eye.column(i).clone_owned()).collect(),
            proj_m: eye.clone(),
            embed_m: eye,
        }
    }

    /// Splits off the isotropy subalgebra spanned by `h_gens`; `𝔪` is its
    /// orthogonal complement under `form` and both bases come out
    /// orthonormal for `form`.
    pub fn with_isotropy(
        algebra: &MatrixLieAlgebra,
        form: &BiInvariantForm,
        h_gens: &[CoeffVec],
    ) -> Result<Self> {
        let dim = algebra.dim();
        if h_gens.is_empty() {
            return Ok(Self::trivial(algebra));
        }
        let h_basis = orthonormal_span(h_gens, form.gram());
        let mut extended: Vec<CoeffVec> = h_basis.clone();
        let eye = DMatrix::<f64>::identity(dim, dim);
        for i in 0..dim {
            extended.push(eye.column(i).clone_owned());
        }
        let full = orthonormal_span_stable(&extended, form.gram());
        if full.len() != dim {
            return Err(Error::ConstraintViolation(
                "isotropy extension did not span the algebra".into(),
            ));
        }
        let m_basis: Vec<CoeffVec> = full[h_basis.len()..].to_vec();
        let m_dim = m_basis.len();
        let embed_m = DMatrix::from_fn(dim, m_dim, |r, c| m_basis[c][r]);
        let proj_m = embed_m.transpose() * form.gram();
        Ok(ReductiveDecomposition {
            h_basis,
            m_basis,
            proj_m,
            embed_m,
        })
    }

    pub fn h_dim(&self) -> usize {
        self.h_basis.len()
    }

    pub fn m_dim(&self) -> usize {
        self.m_basis.len()
    }

    pub fn h_basis(&self) -> &[CoeffVec] {
        &self.h_basis
    }

    pub fn m_basis(&self) -> &[CoeffVec] {
        &self.m_basis
    }

    /// `𝔪`-coordinates of the projection of `x` along `𝔥`.
    pub fn project(&self, x: &CoeffVec) -> CoeffVec {
        &self.proj_m * x
    }

    /// Algebra coordinates of an `𝔪`-coordinate vector.
    pub fn embed(&self, xm: &CoeffVec) -> CoeffVec {
        &self.embed_m * xm
    }

    /// Gram of a bi-invariant form restricted to the `𝔪`-basis.
    pub fn m_gram(&self, form: &BiInvariantForm) -> DMatrix<f64> {
        self.embed_m.transpose() * form.gram() * &self.embed_m
    }

    /// Checks `𝔥 ⊥ 𝔪` and the dimension count against `form`.
    pub fn validate(&self, form: &BiInvariantForm) -> Result<()> {
        let dim = self.proj_m.ncols();
        if self.h_dim() + self.m_dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: self.h_dim() + self.m_dim(),
            });
        }
        for h in &self.h_basis {
            for m in &self.m_basis {
                let ip = form.inner(h, m);
                if ip.abs() > 1e-10 {
                    return Err(Error::ConstraintViolation(format!(
                        "h/m orthogonality defect {ip:.3e}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A seeded batch of adjoint-orbit points of a fixed base element.
#[derive(Debug, Clone)]
pub struct OrbitSample {
    pub base_point: CoeffVec,
    pub points: Vec<CoeffVec>,
    pub seed: u64,
    pub count: usize,
}

impl OrbitSample {
    /// Conjugates `x` by `count` sampled group elements.
    pub fn generate(
        algebra: &MatrixLieAlgebra,
        x: &CoeffVec,
        count: usize,
        seed: u64,
    ) -> Result<Self> {
        let xm = algebra.to_matrix(x);
        let mut points = Vec::with_capacity(count);
        for g in algebra.sample_group(count, seed) {
            points.push(algebra.from_matrix(&algebra.conjugate(&g, &xm))?);
        }
        Ok(OrbitSample {
            base_point: x.clone(),
            points,
            seed,
            count,
        })
    }
}

/// The orbit point of `X = i·diag(−1,−1,2)` in `su(3)` parametrized by
/// `(u, v, s, w)` subject to `|u|²+|v|² = 1` and `|w|² = 2+s−s²`.
pub fn parametrized_su3_orbit(
    algebra: &MatrixLieAlgebra,
    u: Complex64,
    v: Complex64,
    s: f64,
    w: Complex64,
) -> Result<CoeffVec> {
    if !algebra.is_single_su(3) {
        return Err(Error::UnsupportedAlgebra(
            "parametrized orbit requires su(3)".into(),
        ));
    }
    let uv = u.norm_sqr() + v.norm_sqr();
    if (uv - 1.0).abs() > 1e-12 {
        return Err(Error::ConstraintViolation(format!(
            "|u|^2+|v|^2 = {uv:.15} differs from 1"
        )));
    }
    let wtarget = 2.0 + s - s * s;
    if (w.norm_sqr() - wtarget).abs() > 1e-12 {
        return Err(Error::ConstraintViolation(format!(
            "|w|^2 = {:.15} differs from 2+s-s^2 = {wtarget:.15}",
            w.norm_sqr()
        )));
    }
    let i = Complex64::i();
    let h11 = Complex64::new(s * v.norm_sqr() - u.norm_sqr(), 0.0);
    let h22 = Complex64::new(s * u.norm_sqr() - v.norm_sqr(), 0.0);
    let h33 = Complex64::new(1.0 - s, 0.0);
    let h12 = (s + 1.0) * u * v;
    let h13 = v * w;
    let h23 = u.conj() * w;
    let m = CMat::from_row_slice(
        3,
        3,
        &[
            i * h11,
            i * h12,
            i * h13,
            i * h12.conj(),
            i * h22,
            i * h23,
            i * h13.conj(),
            i * h23.conj(),
            i * h33,
        ],
    );
    algebra.from_matrix(&m)
}

/// Exponential of an anti-Hermitian matrix by eigendecomposition of `−i Z`.
pub fn exp_anti_hermitian(z: &CMat) -> Result<CMat> {
    let defect = (z.adjoint() + z).norm();
    if defect > 1e-12 * (1.0 + z.norm()) {
        return Err(Error::NotAntiHermitian { defect });
    }
    let h = z * Complex64::new(0.0, -1.0);
    let eig = h.symmetric_eigen();
    let n = z.nrows();
    let phases = CMat::from_fn(n, n, |r, c| {
        if r == c {
            (Complex64::i() * eig.eigenvalues[r]).exp()
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Ok(&eig.eigenvectors * phases * eig.eigenvectors.adjoint())
}

/// Sorted spectrum of the Hermitian matrix `−i Z` for anti-Hermitian `Z`.
pub fn hermitian_spectrum(z: &CMat) -> Vec<f64> {
    let h = z * Complex64::new(0.0, -1.0);
    let mut eigs: Vec<f64> = h.symmetric_eigen().eigenvalues.iter().copied().collect();
    eigs.sort_by(|a, b| a.total_cmp(b));
    eigs
}

fn re_trace_product(p: &CMat, q: &CMat) -> f64 {
    // Re tr(P* Q) without forming the product matrix.
    p.iter()
        .zip(q.iter())
        .map(|(a, b)| (a.conj() * b).re)
        .sum()
}

/// Orthonormal basis (for the inner product with Gram `gram`) of the span of
/// `vectors`, with ranks decided at `RANK_TOL` relative to the largest
/// singular value.
pub fn orthonormal_span(vectors: &[CoeffVec], gram: &DMatrix<f64>) -> Vec<CoeffVec> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let dim = vectors[0].len();
    let chol = Cholesky::new(gram.clone()).expect("bi-invariant Gram must be positive definite");
    let t = chol.l().transpose();
    let m = DMatrix::from_fn(dim, vectors.len(), |r, c| vectors[c][r]);
    let a = &t * &m;
    let svd = a.svd(true, false);
    let smax = svd.singular_values.max();
    if smax <= 0.0 {
        return Vec::new();
    }
    let rank = svd
        .singular_values
        .iter()
        .filter(|s| **s > RANK_TOL * smax)
        .count();
    let u = svd.u.expect("svd with u requested");
    (0..rank)
        .map(|j| {
            t.solve_upper_triangular(&u.column(j).clone_owned())
                .expect("Cholesky factor is invertible")
        })
        .collect()
}

/// Like [`orthonormal_span`], but keeps the leading vectors fixed: a
/// Gram-Schmidt sweep that preserves the order of an already-orthonormal
/// prefix, used to extend an `𝔥`-basis to the full algebra.
fn orthonormal_span_stable(vectors: &[CoeffVec], gram: &DMatrix<f64>) -> Vec<CoeffVec> {
    let mut basis: Vec<CoeffVec> = Vec::new();
    for v in vectors {
        let mut r = v.clone();
        for b in &basis {
            let ip = (b.transpose() * gram * &r)[(0, 0)];
            r -= b * ip;
        }
        // Second sweep for numerical orthogonality.
        for b in &basis {
            let ip = (b.transpose() * gram * &r)[(0, 0)];
            r -= b * ip;
        }
        let norm = ((r.transpose() * gram * &r)[(0, 0)]).max(0.0).sqrt();
        if norm > 1e-10 {
            basis.push(r / norm);
        }
    }
    basis
}

fn factor_basis(kind: Factor) -> Vec<CMat> {
    let i = Complex64::i();
    match kind {
        Factor::Abelian => vec![CMat::from_element(1, 1, i)],
        Factor::Su(k) => {
            let mut out = Vec::with_capacity(k * k - 1);
            for p in 0..k {
                for q in (p + 1)..k {
                    let mut sym = CMat::zeros(k, k);
                    sym[(p, q)] = i;
                    sym[(q, p)] = i;
                    out.push(sym);
                    let mut asym = CMat::zeros(k, k);
                    asym[(p, q)] = Complex64::new(1.0, 0.0);
                    asym[(q, p)] = Complex64::new(-1.0, 0.0);
                    out.push(asym);
                }
            }
            for m in 1..k {
                let scale = (2.0 / (m as f64 * (m as f64 + 1.0))).sqrt();
                let mut d = CMat::zeros(k, k);
                for j in 0..m {
                    d[(j, j)] = i * scale;
                }
                d[(m, m)] = -i * scale * m as f64;
                out.push(d);
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn su2() -> MatrixLieAlgebra {
        MatrixLieAlgebra::new(&[Factor::Su(2)]).unwrap()
    }

    fn su3() -> MatrixLieAlgebra {
        MatrixLieAlgebra::new(&[Factor::Su(3)]).unwrap()
    }

    fn su2_r() -> MatrixLieAlgebra {
        MatrixLieAlgebra::new(&[Factor::Su(2), Factor::Abelian]).unwrap()
    }

    fn e(dim: usize, i: usize) -> CoeffVec {
        DVector::from_fn(dim, |r, _| if r == i { 1.0 } else { 0.0 })
    }

    // 2x2 complex multiply used as an independent oracle for bracket tests.
    fn mul2(a: &[[Complex64; 2]; 2], b: &[[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
        let mut c = [[Complex64::new(0.0, 0.0); 2]; 2];
        for r in 0..2 {
            for s in 0..2 {
                for k in 0..2 {
                    c[r][s] += a[r][k] * b[k][s];
                }
            }
        }
        c
    }

    #[test]
    fn dimensions_and_validation() {
        for (factors, dim, n) in [
            (vec![Factor::Su(2)], 3, 2),
            (vec![Factor::Su(3)], 8, 3),
            (vec![Factor::Su(2), Factor::Abelian], 4, 3),
            (vec![Factor::Su(2), Factor::Su(2)], 6, 4),
        ] {
            let algebra = MatrixLieAlgebra::new(&factors).unwrap();
            assert_eq!(algebra.dim(), dim);
            assert_eq!(algebra.ambient_dim(), n);
            algebra.validate().unwrap();
        }
    }

    #[test]
    fn bi_gram_is_diagonal() {
        let algebra = su3();
        let g = algebra.bi_gram();
        for i in 0..8 {
            for j in 0..8 {
                if i == j {
                    assert_relative_eq!(g[(i, j)], 2.0, epsilon = 1e-13);
                } else {
                    assert!(g[(i, j)].abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn bracket_antisymmetry_on_same_element() {
        let algebra = su3();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = algebra.random_element(&mut rng);
        let br = algebra.bracket(&x, &x).unwrap();
        assert!(br.norm() < 1e-12);
    }

    #[test]
    fn su2_pauli_halves_bracket_like_cross_product() {
        // e_k = -(i/2) sigma_k = -(1/2) b_k in our basis; [e1,e2] must equal e3.
        let algebra = su2();
        let e1 = e(3, 0) * -0.5;
        let e2 = e(3, 1) * -0.5;
        let e3 = e(3, 2) * -0.5;
        let br = algebra.bracket(&e1, &e2).unwrap();
        assert!((&br - &e3).norm() < 1e-12);

        // Independent oracle: direct 2x2 complex multiplication.
        let z = Complex64::new(0.0, 0.0);
        let i = Complex64::i();
        let s1 = [[z, i * -0.5], [i * -0.5, z]]; // -(i/2) sigma_1
        let s2 = [[z, Complex64::new(-0.5, 0.0)], [Complex64::new(0.5, 0.0), z]];
        let ab = mul2(&s1, &s2);
        let ba = mul2(&s2, &s1);
        let expected = algebra.to_matrix(&br);
        for r in 0..2 {
            for c in 0..2 {
                let oracle = ab[r][c] - ba[r][c];
                assert!((expected[(r, c)] - oracle).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn cross_factor_brackets_vanish() {
        let algebra = su2_r();
        let p = e(4, 0);
        let q = e(4, 3);
        assert!(algebra.bracket(&p, &q).unwrap().norm() < 1e-14);
    }

    #[test]
    fn bracket_dimension_mismatch() {
        let algebra = su2();
        let bad = DVector::from_element(5, 1.0);
        assert!(matches!(
            algebra.bracket(&bad, &bad),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn exponential_of_zero_is_identity() {
        let algebra = su2();
        let g = algebra.exponential(&DVector::zeros(3)).unwrap();
        assert!((g.matrix() - CMat::identity(2, 2)).norm() < 1e-14);
    }

    #[test]
    fn exponential_pi_diagonal_gives_minus_identity() {
        // Z = i*pi*diag(1,-1) = pi * D_1; e^{±i pi} = −1.
        let algebra = su2();
        let z = e(3, 2) * std::f64::consts::PI;
        let g = algebra.exponential(&z).unwrap();
        let minus_eye = CMat::identity(2, 2) * Complex64::new(-1.0, 0.0);
        assert!((g.matrix() - minus_eye).norm() < 1e-12);
    }

    #[test]
    fn exponential_inverse_cancels() {
        let algebra = su3();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let z = algebra.random_element(&mut rng);
            let g = algebra.exponential(&z).unwrap();
            let ginv = algebra.exponential(&(-&z)).unwrap();
            let prod = g.compose(&ginv);
            assert!((prod.matrix() - CMat::identity(3, 3)).norm() < 1e-11);
        }
    }

    #[test]
    fn exponential_rejects_non_anti_hermitian() {
        let m = CMat::from_fn(2, 2, |r, c| Complex64::new((r + c) as f64 + 1.0, 0.0));
        assert!(matches!(
            exp_anti_hermitian(&m),
            Err(Error::NotAntiHermitian { .. })
        ));
    }

    #[test]
    fn orbit_point_at_identity_is_x() {
        let algebra = su3();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = algebra.random_element(&mut rng);
        let idp = algebra
            .ad_orbit_point(&GroupElement::identity(3), &x)
            .unwrap();
        assert!((&idp - &x).norm() < 1e-12);
    }

    #[test]
    fn orbit_preserves_binorm_and_spectrum() {
        // X = i diag(-1,-1,2): <X,X>_bi = 1+1+4 = 6 for every orbit point.
        let algebra = su3();
        let i = Complex64::i();
        let xm = CMat::from_diagonal(&DVector::from_vec(vec![-i, -i, i * 2.0]));
        let x = algebra.from_matrix(&xm).unwrap();
        let form = BiInvariantForm::standard(&algebra);
        assert_relative_eq!(form.inner(&x, &x), 6.0, epsilon = 1e-12);

        let base_spec = algebra.spectrum(&x);
        for g in algebra.sample_group(50, 11) {
            let p = algebra.ad_orbit_point(&g, &x).unwrap();
            assert_relative_eq!(form.inner(&p, &p), 6.0, epsilon = 1e-10);
            let spec = algebra.spectrum(&p);
            for (a, b) in base_spec.iter().zip(&spec) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn ideal_of_su2_is_everything() {
        let algebra = su2();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x = algebra.random_element(&mut rng);
        let ideal = algebra.generate_ideal(&[x]).unwrap();
        assert_eq!(ideal.len(), 3);
    }

    #[test]
    fn ideal_of_central_element_is_one_dimensional() {
        let algebra = su2_r();
        let u2 = e(4, 3);
        let ideal = algebra.generate_ideal(&[u2.clone()]).unwrap();
        assert_eq!(ideal.len(), 1);
        let ip = ideal[0].normalize().dot(&u2.normalize());
        assert!((ip.abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ideal_of_first_factor_stays_in_first_factor() {
        let algebra = MatrixLieAlgebra::new(&[Factor::Su(2), Factor::Su(2)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut x = DVector::zeros(6);
        for i in 0..3 {
            x[i] = StandardNormal.sample(&mut rng);
        }
        let ideal = algebra.generate_ideal(&[x]).unwrap();
        assert_eq!(ideal.len(), 3);
        for v in &ideal {
            for i in 3..6 {
                assert!(v[i].abs() < 1e-12);
            }
        }

        // Independent bracket-closure oracle working on raw ambient matrices:
        // stack real/imag entries and grow the span by explicit commutators.
        let to_real = |m: &CMat| -> DVector<f64> {
            let mut v = DVector::zeros(2 * 16);
            for (k, z) in m.iter().enumerate() {
                v[2 * k] = z.re;
                v[2 * k + 1] = z.im;
            }
            v
        };
        let mut span: Vec<(CMat, DVector<f64>)> = Vec::new();
        let push = |span: &mut Vec<(CMat, DVector<f64>)>, m: CMat| -> bool {
            let mut r = to_real(&m);
            for (_, b) in span.iter() {
                let ip = b.dot(&r);
                r -= b * ip;
            }
            if r.norm() > 1e-9 {
                let rn = r.norm();
                span.push((m, r / rn));
                true
            } else {
                false
            }
        };
        let x0 = algebra.to_matrix(&ideal[0]);
        push(&mut span, x0);
        loop {
            let mut grew = false;
            let current: Vec<CMat> = span.iter().map(|(m, _)| m.clone()).collect();
            for b in algebra.basis() {
                for m in &current {
                    grew |= push(&mut span, b * m - m * b);
                }
            }
            if !grew {
                break;
            }
        }
        assert_eq!(span.len(), ideal.len());
    }

    #[test]
    fn ideal_rejects_zero_input() {
        let algebra = su2();
        assert!(matches!(
            algebra.generate_ideal(&[DVector::zeros(3)]),
            Err(Error::AllZeroInput)
        ));
    }

    #[test]
    fn group_sampling_is_deterministic_and_unitary() {
        let algebra = su3();
        let a = algebra.sample_group(5, 42);
        let b = algebra.sample_group(5, 42);
        for (ga, gb) in a.iter().zip(&b) {
            assert_eq!(ga.matrix(), gb.matrix());
            ga.validate(&algebra).unwrap();
            assert!(ga.unitarity_defect() <= 1e-11 * 3.0);
            assert_eq!(ga.log_factors().len(), 3);
        }
        let c = algebra.sample_group(5, 43);
        assert!((a[0].matrix() - c[0].matrix()).norm() > 1e-6);
    }

    #[test]
    fn parametrized_orbit_matches_characteristic_polynomial_oracle() {
        let algebra = su3();
        // u=1, v=0, s=1, |w|^2 = 2: lower 2x2 block has char poly t^2 - t - 2.
        let w = Complex64::new(2.0f64.sqrt(), 0.0);
        let p = parametrized_su3_orbit(
            &algebra,
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            1.0,
            w,
        )
        .unwrap();
        let spec = algebra.spectrum(&p);
        // Roots of t^2 - t - 2 via the quadratic formula, plus the fixed -1.
        let disc = (1.0f64 + 8.0).sqrt();
        let mut expected = vec![-1.0, (1.0 - disc) / 2.0, (1.0 + disc) / 2.0];
        expected.sort_by(|a, b| a.total_cmp(b));
        for (a, b) in spec.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-9);
        }

        let m = algebra.to_matrix(&p);
        let i = Complex64::i();
        assert!((m[(0, 0)] - i * -1.0).norm() < 1e-12);
        assert!((m[(1, 2)] - i * w).norm() < 1e-12);
        assert!((m[(2, 2)] - i * 0.0).norm() < 1e-12);
    }

    #[test]
    fn parametrized_orbit_w_zero_needs_boundary_s() {
        let algebra = su3();
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        // s = 2 makes |w|^2 = 0 admissible and the point diagonal.
        let p = parametrized_su3_orbit(&algebra, zero, one, 2.0, zero).unwrap();
        let m = algebra.to_matrix(&p);
        for r in 0..3 {
            for c in 0..3 {
                if r != c {
                    assert!(m[(r, c)].norm() < 1e-12);
                }
            }
        }
        // Any other s with w = 0 violates the constraint.
        assert!(parametrized_su3_orbit(&algebra, zero, one, 0.5, zero).is_err());
    }

    #[test]
    fn parametrized_orbit_has_binorm_six_and_zero_trace() {
        let algebra = su3();
        let form = BiInvariantForm::standard(&algebra);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..50 {
            let phi: f64 = rand::Rng::random_range(&mut rng, 0.0..std::f64::consts::TAU);
            let theta: f64 = rand::Rng::random_range(&mut rng, 0.0..std::f64::consts::FRAC_PI_2);
            let s: f64 = rand::Rng::random_range(&mut rng, -1.0..2.0);
            let u = Complex64::from_polar(theta.cos(), phi);
            let v = Complex64::from_polar(theta.sin(), 0.3 * phi);
            let w = Complex64::from_polar((2.0 + s - s * s).sqrt(), 1.7 * phi);
            let p = parametrized_su3_orbit(&algebra, u, v, s, w).unwrap();
            assert_relative_eq!(form.inner(&p, &p), 6.0, epsilon = 1e-10);
            assert!(algebra.to_matrix(&p).trace().norm() < 1e-12);
        }
    }

    #[test]
    fn reductive_decomposition_trivial_and_nontrivial() {
        let algebra = su2();
        let form = BiInvariantForm::standard(&algebra);
        let triv = ReductiveDecomposition::trivial(&algebra);
        assert_eq!(triv.h_dim(), 0);
        assert_eq!(triv.m_dim(), 3);
        triv.validate(&form).unwrap();

        let dec =
            ReductiveDecomposition::with_isotropy(&algebra, &form, &[e(3, 2)]).unwrap();
        assert_eq!(dec.h_dim(), 1);
        assert_eq!(dec.m_dim(), 2);
        dec.validate(&form).unwrap();
        // Projection kills the h-component.
        let x = e(3, 2) * 5.0 + e(3, 0) * 2.0;
        let xm = dec.project(&x);
        let back = dec.embed(&xm);
        assert!((back - e(3, 0) * 2.0).norm() < 1e-10);
    }

    #[test]
    fn scaled_form_weights_factors() {
        let algebra = su2_r();
        let form = BiInvariantForm::scaled(&algebra, &[2.0, 5.0]).unwrap();
        assert_relative_eq!(form.inner(&e(4, 0), &e(4, 0)), 4.0, epsilon = 1e-12);
        assert_relative_eq!(form.inner(&e(4, 3), &e(4, 3)), 5.0, epsilon = 1e-12);
        assert!(BiInvariantForm::scaled(&algebra, &[1.0]).is_err());
        assert!(BiInvariantForm::scaled(&algebra, &[1.0, -1.0]).is_err());
    }

    #[test]
    fn orbit_sample_generate_matches_contract() {
        let algebra = su2();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let x = algebra.random_element(&mut rng);
        let sample = OrbitSample::generate(&algebra, &x, 16, 9).unwrap();
        assert_eq!(sample.points.len(), 16);
        let form = BiInvariantForm::standard(&algebra);
        let base = form.norm(&x);
        for p in &sample.points {
            assert_relative_eq!(form.norm(p), base, epsilon = 1e-10);
        }
    }
}

//! Constant-length verification for the Killing vector fields induced by
//! algebra elements.
//!
//! For `X ∈ 𝔤` the field value at the point reached by `g` pulls back to
//! `(Ad_g X)_𝔪`, so `X` generates a constant-length field exactly when
//! `g ↦ F((Ad_g X)_𝔪)` is constant. Three views of that statement live here:
//!
//! * [`length_spectrum`] — direct sampling of the length function;
//! * [`length_derivative`] / [`criterion_residual`] — the analytic first
//!   variation along one-parameter families `exp(tY)·g` or `g·exp(tY)`,
//!   which must vanish identically for constant length;
//! * [`equivalence_check`] — for bi-invariant `α`, the four equivalent
//!   conditions linking constancy to ideal orthogonality and to constancy of
//!   the orbit pairing `⟨𝒪_X, 𝒪_V⟩`.
//!
//! "For all g" is realized by seeded sampling. The sampled functions are
//! real-analytic on a compact group, so residuals bounded away from zero are
//! detected with overwhelming probability; verdicts are three-way to keep
//! "refuted" separate from "needs more samples".

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::algebra::{Factor, MatrixLieAlgebra, ReductiveDecomposition};
use crate::randers::{LengthReport, RandersMetricSpec};
use crate::{CoeffVec, Error, GroupElement, Result};

/// Relative spread / residual at or below which constancy is certified.
pub const CONSTANT_TOL: f64 = 1e-8;
/// Relative spread / residual at or above which non-constancy is certified.
pub const NONCONSTANT_TOL: f64 = 1e-4;
/// Absolute tolerance for ideal-orthogonality tests.
pub const ORTHOGONALITY_TOL: f64 = 1e-10;

/// Seeded sampling configuration for the "for all g ∈ G" quantifier.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SamplerParams {
    pub seed: u64,
    pub count: usize,
}

impl SamplerParams {
    pub fn new(seed: u64, count: usize) -> Self {
        SamplerParams { seed, count }
    }
}

/// Three-way outcome of a constancy test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    /// Certified constant at sampling resolution.
    #[serde(rename = "constant")]
    Constant,
    /// Certified non-constant.
    #[serde(rename = "non-constant")]
    NonConstant,
    /// Between the two thresholds: raise the sample count.
    #[serde(rename = "inconclusive")]
    Inconclusive,
}

impl Verdict {
    pub fn from_relative(value: f64) -> Self {
        if value <= CONSTANT_TOL {
            Verdict::Constant
        } else if value >= NONCONSTANT_TOL {
            Verdict::NonConstant
        } else {
            Verdict::Inconclusive
        }
    }
}

/// Which derivative family the criterion sweeps.
///
/// `Hrs1` differentiates `t ↦ F((Ad_{exp(tY)·g} X)_𝔪)` with `Y` over a basis
/// of `𝔤`; `Hrs2` differentiates `t ↦ F((Ad_{g·exp(tY)} X)_𝔪)` with `Y` over
/// a basis of `𝔪`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CriterionVariant {
    #[serde(rename = "hrs1")]
    Hrs1,
    #[serde(rename = "hrs2")]
    Hrs2,
}

/// One-parameter family used for a single derivative evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeFamily {
    /// `g_t = exp(tY)·g`: the variation is `[Y, Ad_g X]`.
    Left,
    /// `g_t = g·exp(tY)`: the variation is `Ad_g [Y, X]`.
    Right,
}

/// Result of a derivative-criterion sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriterionReport {
    pub max_abs_residual: f64,
    /// Mean sampled Finsler length, the natural residual scale.
    pub f_scale: f64,
    pub relative_residual: f64,
    /// `(g index, Y index)` attaining the maximal residual.
    pub argmax_sample: (usize, usize),
    pub samples: usize,
    pub formula_variant: CriterionVariant,
    pub verdict: Verdict,
    /// Dimension of the isotropy subalgebra; when positive, certification is
    /// sufficient only under the connected-isotropy hypothesis, which is
    /// recorded rather than verified.
    pub isotropy_dim: usize,
}

/// Result of the four-condition equivalence test for bi-invariant `α`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EquivalenceReport {
    /// Relative spread of the sampled length function (condition 1).
    pub cond1_spread: f64,
    pub cond1_holds: bool,
    /// Ideal generated by `[𝔤,X]` orthogonal to the ideal generated by `V`.
    pub cond2_orthogonal: bool,
    /// Ideal generated by `[𝔤,V]` orthogonal to the ideal generated by `X`.
    pub cond3_orthogonal: bool,
    /// Absolute spread of `⟨X',V'⟩_α` over sampled orbit pairs (condition 4).
    pub cond4_spread: f64,
    pub cond4_holds: bool,
    pub verdicts_agree: bool,
    pub samples: usize,
    pub seed: u64,
}

impl EquivalenceReport {
    /// The shared verdict when all four agree; `None` on disagreement.
    pub fn agreed_verdict(&self) -> Option<bool> {
        self.verdicts_agree.then_some(self.cond1_holds)
    }
}

fn projected_orbit_vector(
    decomposition: &ReductiveDecomposition,
    ad_x: &CoeffVec,
    x_scale: f64,
    sample: usize,
) -> Result<CoeffVec> {
    let ym = decomposition.project(ad_x);
    if ym.norm() <= 1e-12 * (1.0 + x_scale) {
        return Err(Error::VanishingProjection { sample });
    }
    Ok(ym)
}

/// Samples `F((Ad_g X)_𝔪)` over seeded group elements and summarizes.
///
/// A constant-length field yields a relative spread at rounding level; the
/// report's `relative_spread` is what [`Verdict::from_relative`] grades.
pub fn length_spectrum(
    algebra: &MatrixLieAlgebra,
    decomposition: &ReductiveDecomposition,
    metric: &RandersMetricSpec,
    x: &CoeffVec,
    params: SamplerParams,
) -> Result<LengthReport> {
    if x.norm() == 0.0 {
        return Err(Error::ZeroVector);
    }
    if params.count < 2 {
        return Err(Error::Precondition(
            "length spectrum needs at least 2 samples".into(),
        ));
    }
    let x_scale = x.norm();
    let mut lengths = Vec::with_capacity(params.count);
    for (i, g) in algebra.sample_group(params.count, params.seed).iter().enumerate() {
        let ad_x = algebra.ad_orbit_point(g, x)?;
        let ym = projected_orbit_vector(decomposition, &ad_x, x_scale, i)?;
        lengths.push(metric.finsler_norm(&ym)?);
    }
    Ok(LengthReport::from_lengths(&lengths, params.seed))
}

/// First variation of the length function at `g` along the family selected
/// by `family`:
///
/// `⟨ẏ_𝔪, y_𝔪⟩_α / α(y_𝔪) + β(ẏ_𝔪)` with `y = Ad_g X` and
/// `ẏ = [Y, Ad_g X]` (left) or `ẏ = Ad_g [Y, X]` (right).
pub fn length_derivative(
    algebra: &MatrixLieAlgebra,
    decomposition: &ReductiveDecomposition,
    metric: &RandersMetricSpec,
    x: &CoeffVec,
    g: &GroupElement,
    y: &CoeffVec,
    family: DerivativeFamily,
) -> Result<f64> {
    let ad_x = algebra.ad_orbit_point(g, x)?;
    let ym = projected_orbit_vector(decomposition, &ad_x, x.norm(), 0)?;
    let variation = match family {
        DerivativeFamily::Left => algebra.bracket(y, &ad_x)?,
        DerivativeFamily::Right => {
            let bracket = algebra.bracket(y, x)?;
            let m = algebra.conjugate(g, &algebra.to_matrix(&bracket));
            algebra.from_matrix(&m)?
        }
    };
    let dm = decomposition.project(&variation);
    Ok(derivative_value(metric, &ym, &dm))
}

fn derivative_value(metric: &RandersMetricSpec, ym: &CoeffVec, dm: &CoeffVec) -> f64 {
    let alpha = metric.alpha_norm(ym);
    let pairing = (dm.transpose() * metric.alpha_gram() * ym)[(0, 0)];
    pairing / alpha + metric.beta_value(dm)
}

/// Sweeps `|length_derivative|` over sampled `g` and basis directions `Y`,
/// reporting the maximum residual relative to the mean sampled length.
///
/// A residual at rounding level over the sweep certifies constant length at
/// sampling resolution; the same seeds drive [`length_spectrum`], so the two
/// verdicts cross-validate.
pub fn criterion_residual(
    algebra: &MatrixLieAlgebra,
    decomposition: &ReductiveDecomposition,
    metric: &RandersMetricSpec,
    x: &CoeffVec,
    params: SamplerParams,
    variant: CriterionVariant,
) -> Result<CriterionReport> {
    if x.norm() == 0.0 {
        return Err(Error::ZeroVector);
    }
    if params.count < 1 {
        return Err(Error::Precondition("criterion needs at least 1 sample".into()));
    }
    let dim = algebra.dim();
    // Direction set: basis of 𝔤 for hrs-1, basis of 𝔪 for hrs-2.
    let directions: Vec<CoeffVec> = match variant {
        CriterionVariant::Hrs1 => (0..dim)
            .map(|i| CoeffVec::from_fn(dim, |r, _| if r == i { 1.0 } else { 0.0 }))
            .collect(),
        CriterionVariant::Hrs2 => decomposition.m_basis().to_vec(),
    };
    let ad_dirs: Vec<DMatrix<f64>> = directions.iter().map(|y| algebra.ad_matrix(y)).collect();

    let x_scale = x.norm();
    let mut max_abs_residual = 0.0f64;
    let mut argmax = (0usize, 0usize);
    let mut f_sum = 0.0f64;
    for (gi, g) in algebra.sample_group(params.count, params.seed).iter().enumerate() {
        let ad_coord = algebra.ad_coordinate_matrix(g)?;
        let ad_x = &ad_coord * x;
        let ym = projected_orbit_vector(decomposition, &ad_x, x_scale, gi)?;
        f_sum += metric.finsler_norm(&ym)?;
        for (yi, ad_y) in ad_dirs.iter().enumerate() {
            let variation = match variant {
                CriterionVariant::Hrs1 => ad_y * &ad_x,
                CriterionVariant::Hrs2 => &ad_coord * (ad_y * x),
            };
            let dm = decomposition.project(&variation);
            let d = derivative_value(metric, &ym, &dm).abs();
            if d > max_abs_residual {
                max_abs_residual = d;
                argmax = (gi, yi);
            }
        }
    }
    let f_scale = f_sum / params.count as f64;
    let relative_residual = max_abs_residual / f_scale;
    Ok(CriterionReport {
        max_abs_residual,
        f_scale,
        relative_residual,
        argmax_sample: argmax,
        samples: params.count,
        formula_variant: variant,
        verdict: Verdict::from_relative(relative_residual),
        isotropy_dim: decomposition.h_dim(),
    })
}

/// Checks that `alpha_gram` is proportional to the standard bi-invariant Gram
/// on each factor, with vanishing cross-factor blocks; returns the weights.
pub fn bi_invariant_weights(
    algebra: &MatrixLieAlgebra,
    alpha_gram: &DMatrix<f64>,
) -> Result<Vec<f64>> {
    let b = algebra.bi_gram();
    if alpha_gram.nrows() != algebra.dim() {
        return Err(Error::DimensionMismatch {
            expected: algebra.dim(),
            got: alpha_gram.nrows(),
        });
    }
    let scale = 1.0 + alpha_gram.norm();
    let mut weights = Vec::with_capacity(algebra.factors().len());
    for (fi, block) in algebra.factors().iter().enumerate() {
        let r = block.basis_range();
        let w = alpha_gram[(r.start, r.start)] / b[(r.start, r.start)];
        if w <= 0.0 {
            return Err(Error::NotBiInvariant { factor: fi, defect: w });
        }
        let mut defect = 0.0f64;
        for i in r.clone() {
            for j in 0..algebra.dim() {
                let expected = if r.contains(&j) { w * b[(i, j)] } else { 0.0 };
                defect = defect.max((alpha_gram[(i, j)] - expected).abs());
            }
        }
        if defect > 1e-10 * scale {
            return Err(Error::NotBiInvariant { factor: fi, defect });
        }
        weights.push(w);
    }
    Ok(weights)
}

/// The four equivalent conditions for bi-invariant `α`: sampled length
/// constancy, two ideal-orthogonality statements and constancy of the orbit
/// pairing. The two ideal conditions are adjoint restatements of each other
/// and must always agree.
pub fn equivalence_check(
    algebra: &MatrixLieAlgebra,
    alpha_gram: &DMatrix<f64>,
    x: &CoeffVec,
    v: &CoeffVec,
    params: SamplerParams,
) -> Result<EquivalenceReport> {
    bi_invariant_weights(algebra, alpha_gram)?;
    if x.norm() == 0.0 {
        return Err(Error::ZeroVector);
    }
    let dim = algebra.dim();
    let alpha_inner = |p: &CoeffVec, q: &CoeffVec| (p.transpose() * alpha_gram * q)[(0, 0)];

    // Condition 1: sampled relative spread of the Finsler length.
    let metric = RandersMetricSpec::new(
        alpha_gram.clone(),
        v.clone(),
        crate::randers::BetaConvention::AlphaDual,
        algebra.bi_gram().clone(),
    )?;
    let decomposition = ReductiveDecomposition::trivial(algebra);
    let spectrum = length_spectrum(algebra, &decomposition, &metric, x, params)?;
    let cond1_holds = spectrum.relative_spread <= CONSTANT_TOL;

    // Conditions 2 and 3: ideal orthogonality under α.
    let ideal_of = |gens: &[CoeffVec]| -> Result<Vec<CoeffVec>> {
        let nonzero: Vec<CoeffVec> =
            gens.iter().filter(|g| g.norm() > 1e-14).cloned().collect();
        if nonzero.is_empty() {
            return Ok(Vec::new());
        }
        algebra.generate_ideal(&nonzero)
    };
    let bracket_gens = |z: &CoeffVec| -> Vec<CoeffVec> {
        let ad_z = algebra.ad_matrix(z);
        (0..dim).map(|j| -ad_z.column(j).clone_owned()).collect()
    };
    let ortho_tol = ORTHOGONALITY_TOL * (1.0 + alpha_gram.norm());
    let orthogonal = |a: &[CoeffVec], b: &[CoeffVec]| {
        a.iter()
            .all(|p| b.iter().all(|q| alpha_inner(p, q).abs() <= ortho_tol))
    };
    let ideal_bracket_x = ideal_of(&bracket_gens(x))?;
    let ideal_v = ideal_of(std::slice::from_ref(v))?;
    let cond2_orthogonal = orthogonal(&ideal_bracket_x, &ideal_v);
    let ideal_bracket_v = ideal_of(&bracket_gens(v))?;
    let ideal_x = ideal_of(std::slice::from_ref(x))?;
    let cond3_orthogonal = orthogonal(&ideal_bracket_v, &ideal_x);

    // Condition 4: spread of ⟨X', V'⟩_α over independently sampled orbit pairs.
    let gx = algebra.sample_group(params.count, params.seed.wrapping_add(0x9e37_79b9));
    let gv = algebra.sample_group(params.count, params.seed.wrapping_add(0x85eb_ca6b));
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (g1, g2) in gx.iter().zip(&gv) {
        let xp = algebra.ad_orbit_point(g1, x)?;
        let vp = algebra.ad_orbit_point(g2, v)?;
        let val = alpha_inner(&xp, &vp);
        lo = lo.min(val);
        hi = hi.max(val);
    }
    let cond4_spread = hi - lo;
    let pair_scale = alpha_inner(x, x).sqrt() * alpha_inner(v, v).sqrt();
    let cond4_holds = cond4_spread <= CONSTANT_TOL * pair_scale.max(f64::MIN_POSITIVE);

    let verdicts_agree = cond1_holds == cond2_orthogonal
        && cond2_orthogonal == cond3_orthogonal
        && cond3_orthogonal == cond4_holds;
    Ok(EquivalenceReport {
        cond1_spread: spectrum.relative_spread,
        cond1_holds,
        cond2_orthogonal,
        cond3_orthogonal,
        cond4_spread,
        cond4_holds,
        verdicts_agree,
        samples: params.count,
        seed: params.seed,
    })
}

/// True when every factor of the algebra is `su(2)` or abelian; used by
/// scenario-level sanity checks.
pub fn is_product_of_su2_and_tori(algebra: &MatrixLieAlgebra) -> bool {
    algebra
        .factors()
        .iter()
        .all(|b| matches!(b.kind, Factor::Su(2) | Factor::Abelian))
}

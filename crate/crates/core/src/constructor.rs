//! Construction of the Riemannian part `α` of a Randers metric
//! `F = α + ⟨·,V⟩_bi` making a prescribed `X` generate a Killing field of
//! constant length `l`.
//!
//! The defining identity `α(X')² = (l − ⟨X',V⟩_bi)²` over the orbit `𝒪_X` is
//! linear in the coefficients of any quadratic-form ansatz for `α²`, so one
//! code path covers every case: evaluate the ansatz monomials on orbit
//! points, solve the resulting least-squares system by SVD, and validate the
//! identity on a fresh conjugation-sampled point set. The shipped cases —
//! the `SU(3)` two-eigenvalue family, the general diagonal `SU(3)` family and
//! the `SU(2)×S¹` one-parameter family — pick the stabilizer-invariant
//! ansatz and the orbit parametrization and reuse the shared solve.
//!
//! Squaring loses the sign, so a matched square is only a norm identity when
//! `l − ⟨X',V⟩_bi` stays positive; that is verified explicitly (`sign_ok`)
//! rather than assumed.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{MatrixLieAlgebra, OrbitSample, ReductiveDecomposition, RANK_TOL};
use crate::killing::{self, CriterionVariant, SamplerParams, Verdict};
use crate::randers::{BetaConvention, RandersMetricSpec};
use crate::{CMat, CoeffVec, Error, Result};

/// Residual acceptance threshold relative to the right-hand-side scale.
const RESIDUAL_TOL: f64 = 1e-8;

/// A symmetry-reduced family of quadratic forms for `α²`.
///
/// Each monomial is stored as a symmetric matrix `G_j` on algebra
/// coordinates, obtained by polarization, so row evaluation
/// `q_j(p) = pᵀ G_j p` and Gram assembly `A = Σ c_j G_j` run off the same
/// objects.
#[derive(Debug, Clone)]
pub struct AnsatzBasis {
    monomials: Vec<DMatrix<f64>>,
    names: Vec<String>,
    symmetry_group: String,
}

impl AnsatzBasis {
    /// Polarizes closures `q_j` (quadratic forms vanishing at 0) into
    /// symmetric matrices.
    pub fn from_quadratics(
        dim: usize,
        quadratics: Vec<(String, Box<dyn Fn(&CoeffVec) -> f64>)>,
        symmetry_group: impl Into<String>,
    ) -> Self {
        let basis_vec = |i: usize| -> CoeffVec {
            DVector::from_fn(dim, |r, _| if r == i { 1.0 } else { 0.0 })
        };
        let mut monomials = Vec::with_capacity(quadratics.len());
        let mut names = Vec::with_capacity(quadratics.len());
        for (name, q) in quadratics {
            let mut g = DMatrix::zeros(dim, dim);
            let diag: Vec<f64> = (0..dim).map(|i| q(&basis_vec(i))).collect();
            for i in 0..dim {
                g[(i, i)] = diag[i];
                for j in (i + 1)..dim {
                    let mixed = q(&(basis_vec(i) + basis_vec(j)));
                    let off = (mixed - diag[i] - diag[j]) / 2.0;
                    g[(i, j)] = off;
                    g[(j, i)] = off;
                }
            }
            monomials.push(g);
            names.push(name);
        }
        AnsatzBasis {
            monomials,
            names,
            symmetry_group: symmetry_group.into(),
        }
    }

    /// Three-monomial ansatz `x·trQ² + y·u*u + z·q²` for block decompositions
    /// `A = i[[Q, u],[u*, q]]` of `su(3)`, forced by `S(U(2)×U(1))` invariance.
    pub fn su3_two_eigenvalue(algebra: &MatrixLieAlgebra) -> Result<Self> {
        require_su3(algebra)?;
        let quadratics: Vec<(String, Box<dyn Fn(&CoeffVec) -> f64>)> = vec![
            ("tr_Q_sq".into(), {
                let h = hermitian_of(algebra);
                Box::new(move |p| h(p).view((0, 0), (2, 2)).norm_squared())
            }),
            ("u_star_u".into(), {
                let h = hermitian_of(algebra);
                Box::new(move |p| {
                    let m = h(p);
                    m[(0, 2)].norm_sqr() + m[(1, 2)].norm_sqr()
                })
            }),
            ("q_sq".into(), {
                let h = hermitian_of(algebra);
                Box::new(move |p| {
                    let q = h(p)[(2, 2)].re;
                    q * q
                })
            }),
        ];
        Ok(Self::from_quadratics(
            algebra.dim(),
            quadratics,
            "S(U(2)xU(1))",
        ))
    }

    /// Six-monomial diagonal ansatz `Σ xᵢ aᵢᵢ² + y₁|u|² + y₂|v|² + y₃|w|²`
    /// for `su(3)`, forced by invariance under the diagonal maximal torus.
    pub fn su3_diagonal(algebra: &MatrixLieAlgebra) -> Result<Self> {
        require_su3(algebra)?;
        let entries: [(&str, usize, usize); 6] = [
            ("a11_sq", 0, 0),
            ("a22_sq", 1, 1),
            ("a33_sq", 2, 2),
            ("u_abs_sq", 0, 1),
            ("v_abs_sq", 0, 2),
            ("w_abs_sq", 1, 2),
        ];
        let quadratics = entries
            .iter()
            .map(|&(name, r, c)| {
                let h = hermitian_of(algebra);
                let f: Box<dyn Fn(&CoeffVec) -> f64> = Box::new(move |p| {
                    let m = h(p);
                    if r == c {
                        m[(r, c)].re * m[(r, c)].re
                    } else {
                        m[(r, c)].norm_sqr()
                    }
                });
                (name.to_string(), f)
            })
            .collect();
        Ok(Self::from_quadratics(
            algebra.dim(),
            quadratics,
            "diagonal maximal torus",
        ))
    }

    /// Four-parameter ansatz on `su(2)⊕ℝ`, block-diagonal in
    /// `(U₁, U₁^⊥, U₂)`: `a₁₁x₁² + a₂₂⟨ξ⊥,ξ⊥⟩_bi + a₃₃x₂² + 2a₁₃x₁x₂`.
    pub fn su2_circle(algebra: &MatrixLieAlgebra) -> Result<Self> {
        let (u1, u2) = su2_circle_units(algebra)?;
        let bi = algebra.bi_gram().clone();
        let inner = move |p: &CoeffVec, q: &CoeffVec| (p.transpose() * &bi * q)[(0, 0)];
        let quadratics: Vec<(String, Box<dyn Fn(&CoeffVec) -> f64>)> = vec![
            ("a11".into(), {
                let (inner, u1) = (inner.clone(), u1.clone());
                Box::new(move |p| {
                    let x1 = inner(p, &u1);
                    x1 * x1
                })
            }),
            ("a22".into(), {
                let (inner, u1, u2) = (inner.clone(), u1.clone(), u2.clone());
                Box::new(move |p| {
                    let x1 = inner(p, &u1);
                    let x2 = inner(p, &u2);
                    inner(p, p) - x1 * x1 - x2 * x2
                })
            }),
            ("a33".into(), {
                let (inner, u2) = (inner.clone(), u2.clone());
                Box::new(move |p| {
                    let x2 = inner(p, &u2);
                    x2 * x2
                })
            }),
            ("a13".into(), {
                let (inner, u1, u2) = (inner.clone(), u1.clone(), u2.clone());
                Box::new(move |p| 2.0 * inner(p, &u1) * inner(p, &u2))
            }),
        ];
        Ok(Self::from_quadratics(
            algebra.dim(),
            quadratics,
            "block stabilizer of (U1, U2)",
        ))
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn symmetry_group(&self) -> &str {
        &self.symmetry_group
    }

    pub fn monomials(&self) -> &[DMatrix<f64>] {
        &self.monomials
    }

    /// Constraint-system row `(q₁(p), …, q_m(p))`.
    pub fn row(&self, p: &CoeffVec) -> Vec<f64> {
        self.monomials
            .iter()
            .map(|g| (p.transpose() * g * p)[(0, 0)])
            .collect()
    }

    /// `A = Σ c_j G_j`; symmetric for any coefficient vector.
    pub fn assemble_gram(&self, coefficients: &DVector<f64>) -> DMatrix<f64> {
        let dim = self.monomials[0].nrows();
        let mut a = DMatrix::zeros(dim, dim);
        for (g, &c) in self.monomials.iter().zip(coefficients.iter()) {
            a += g * c;
        }
        a
    }
}

/// The data of one matching problem `α(X')² = (l − ⟨X',V⟩_bi)²` on `𝒪_X`.
#[derive(Debug, Clone)]
pub struct ConstructionProblem {
    pub x: CoeffVec,
    pub v: CoeffVec,
    pub l: f64,
    pub ansatz: AnsatzBasis,
    pub orbit_points: Vec<CoeffVec>,
}

impl ConstructionProblem {
    /// Validates `l > 0` and that every supplied point lies on `𝒪_X`
    /// (spectrum agreement to `1e-9`).
    pub fn new(
        algebra: &MatrixLieAlgebra,
        x: CoeffVec,
        v: CoeffVec,
        l: f64,
        ansatz: AnsatzBasis,
        orbit_points: Vec<CoeffVec>,
    ) -> Result<Self> {
        if l <= 0.0 {
            return Err(Error::Precondition(format!(
                "target length l = {l} must be positive"
            )));
        }
        if orbit_points.is_empty() {
            return Err(Error::EmptySystem);
        }
        let base = algebra.spectrum(&x);
        for p in &orbit_points {
            let spec = algebra.spectrum(p);
            let deviation = base
                .iter()
                .zip(&spec)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            if deviation > 1e-9 {
                return Err(Error::OffOrbit { deviation });
            }
        }
        Ok(ConstructionProblem {
            x,
            v,
            l,
            ansatz,
            orbit_points,
        })
    }
}

/// Seed and size of the held-out validation sweep.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ValidationParams {
    pub seed: u64,
    pub count: usize,
}

impl Default for ValidationParams {
    fn default() -> Self {
        ValidationParams {
            seed: 0x5eed,
            count: 1000,
        }
    }
}

/// Outcome of a construction solve.
#[derive(Debug, Clone)]
pub struct ConstructionResult {
    /// Coefficients over the ansatz monomials (minimum-norm representative).
    pub coefficients: DVector<f64>,
    /// Kernel dimension of the sampled system at the rank threshold.
    pub solution_space_dim: usize,
    /// Basis of the kernel (null directions of the matching system).
    pub null_directions: Vec<DVector<f64>>,
    /// Max |α(X')² − (l−⟨X',V⟩_bi)²| over the held-out validation points.
    pub residual: f64,
    /// Scale the residual is compared against (`max(l², rhs)`).
    pub residual_scale: f64,
    /// `l − ⟨X',V⟩_bi > 0` on every assembly and validation point.
    pub sign_ok: bool,
    pub spd_ok: bool,
    pub validity_ok: bool,
    pub condition_number: f64,
    /// The assembled metric when the Gram is positive definite.
    pub metric: Option<RandersMetricSpec>,
    pub validation: ValidationParams,
}

impl ConstructionResult {
    /// The defining identity holds on held-out points at tolerance.
    pub fn residual_ok(&self) -> bool {
        self.residual <= RESIDUAL_TOL * self.residual_scale
    }

    /// Identity, sign, positive-definiteness and validity all hold.
    pub fn accepted(&self) -> bool {
        self.residual_ok() && self.sign_ok && self.spd_ok && self.validity_ok
    }
}

/// Assembles the linear system `M c = r` with rows `q_j(X'ᵢ)` and
/// `rᵢ = (l − ⟨X'ᵢ,V⟩_bi)²`.
///
/// The sampled system must be equivalent to polynomial coefficient matching,
/// which is checked by rank saturation: the first half of the points must
/// already produce the full rank.
pub fn build_constraint_system(
    algebra: &MatrixLieAlgebra,
    problem: &ConstructionProblem,
) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let m = problem.ansatz.len();
    let rows = problem.orbit_points.len();
    if rows == 0 || m == 0 {
        return Err(Error::EmptySystem);
    }
    let bi = algebra.bi_gram();
    let mut matrix = DMatrix::zeros(rows, m);
    let mut rhs = DVector::zeros(rows);
    for (i, p) in problem.orbit_points.iter().enumerate() {
        for (j, q) in problem.ansatz.row(p).into_iter().enumerate() {
            matrix[(i, j)] = q;
        }
        let margin = problem.l - (p.transpose() * bi * &problem.v)[(0, 0)];
        rhs[i] = margin * margin;
    }
    let rank_of = |mat: DMatrix<f64>| -> usize {
        let sv = mat.svd(false, false).singular_values;
        let smax = sv.max();
        if smax <= 0.0 {
            0
        } else {
            sv.iter().filter(|s| **s > RANK_TOL * smax).count()
        }
    };
    // Saturation is only decidable once the halved system could itself be
    // square; minimal point sets skip the check.
    if rows >= 2 * m {
        let half = rows.div_ceil(2);
        let rank_half = rank_of(matrix.rows(0, half).clone_owned());
        let rank_full = rank_of(matrix.clone());
        if rank_full > rank_half {
            return Err(Error::DegeneratePointSet {
                rank_half,
                rank_full,
            });
        }
    }
    Ok((matrix, rhs))
}

/// Solves the matching system by SVD (minimum-norm least squares), then
/// validates the identity, the sign guard, positive-definiteness and metric
/// validity on a fresh conjugation-sampled orbit set with disjoint seeds.
pub fn solve_construction(
    algebra: &MatrixLieAlgebra,
    problem: &ConstructionProblem,
    validation: ValidationParams,
) -> Result<ConstructionResult> {
    let (matrix, rhs) = build_constraint_system(algebra, problem)?;
    let m = problem.ansatz.len();
    let svd = matrix.clone().svd(true, true);
    let smax = svd.singular_values.max();
    if smax <= 0.0 {
        return Err(Error::EmptySystem);
    }
    let eps = RANK_TOL * smax;
    let rank = svd.singular_values.iter().filter(|s| **s > eps).count();
    let coefficients = svd
        .solve(&rhs, eps)
        .map_err(|e| Error::ConstraintViolation(e.to_string()))?
        .column(0)
        .clone_owned();
    let v_t = svd.v_t.as_ref().expect("svd computed with v_t");
    let null_directions: Vec<DVector<f64>> = (rank..m)
        .map(|j| v_t.row(j).transpose().clone_owned())
        .collect();
    let smin_nonzero = svd
        .singular_values
        .iter()
        .copied()
        .filter(|s| *s > eps)
        .fold(f64::INFINITY, f64::min);

    let fresh = OrbitSample::generate(algebra, &problem.x, validation.count, validation.seed)?;
    let mut result = evaluate_candidate(
        algebra,
        problem,
        coefficients,
        &problem.orbit_points,
        &fresh.points,
        validation,
    )?;
    result.solution_space_dim = m - rank;
    result.null_directions = null_directions;
    result.condition_number = smax / smin_nonzero;
    Ok(result)
}

/// Scores one coefficient vector: identity residual on the fresh points,
/// sign guard on fit ∪ fresh, positive-definiteness and validity of the
/// assembled metric. Kernel data is filled in by the caller.
fn evaluate_candidate(
    algebra: &MatrixLieAlgebra,
    problem: &ConstructionProblem,
    coefficients: DVector<f64>,
    fit_points: &[CoeffVec],
    fresh_points: &[CoeffVec],
    validation: ValidationParams,
) -> Result<ConstructionResult> {
    let bi = algebra.bi_gram();
    let gram = problem.ansatz.assemble_gram(&coefficients);
    let margin_of = |p: &CoeffVec| problem.l - (p.transpose() * bi * &problem.v)[(0, 0)];
    let mut sign_ok = true;
    for p in fit_points.iter().chain(fresh_points) {
        if margin_of(p) <= 0.0 {
            sign_ok = false;
            break;
        }
    }
    let mut residual = 0.0f64;
    let mut rhs_scale = problem.l * problem.l;
    for p in fresh_points {
        let margin = margin_of(p);
        let alpha_sq = (p.transpose() * &gram * p)[(0, 0)];
        residual = residual.max((alpha_sq - margin * margin).abs());
        rhs_scale = rhs_scale.max(margin * margin);
    }
    let min_eig = gram.clone().symmetric_eigen().eigenvalues.min();
    let spd_ok = min_eig > 0.0;
    let metric = if spd_ok {
        Some(RandersMetricSpec::new(
            gram,
            problem.v.clone(),
            BetaConvention::BiDual,
            bi.clone(),
        )?)
    } else {
        None
    };
    let validity_ok = metric.as_ref().map(|m| m.is_valid()).unwrap_or(false);
    Ok(ConstructionResult {
        coefficients,
        solution_space_dim: 0,
        null_directions: Vec::new(),
        residual,
        residual_scale: rhs_scale,
        sign_ok,
        spd_ok,
        validity_ok,
        condition_number: 1.0,
        metric,
        validation,
    })
}

/// Construction output bundling the problem with its solve result.
#[derive(Debug, Clone)]
pub struct ConstructionOutput {
    pub problem: ConstructionProblem,
    pub result: ConstructionResult,
}

/// `X = i·diag(−1,−1,2)` as a coefficient vector of `su(3)`.
pub fn su3_two_eigenvalue_base(algebra: &MatrixLieAlgebra) -> Result<CoeffVec> {
    require_su3(algebra)?;
    let i = Complex64::i();
    let m = CMat::from_diagonal(&DVector::from_vec(vec![-i, -i, i * 2.0]));
    algebra.from_matrix(&m)
}

/// `V = i·diag(a, b, −a−b)` as a coefficient vector of `su(3)`.
pub fn su3_diagonal_vector(algebra: &MatrixLieAlgebra, a: f64, b: f64) -> Result<CoeffVec> {
    require_su3(algebra)?;
    let i = Complex64::i();
    let m = CMat::from_diagonal(&DVector::from_vec(vec![i * a, i * b, i * (-a - b)]));
    algebra.from_matrix(&m)
}

/// Orbit point of the two-eigenvalue base at parameter `t = |w₃|² ∈ [0,1]`,
/// realized through the general orbit parametrization with `s = 2−3t`.
pub fn su3_two_eigenvalue_orbit_point(algebra: &MatrixLieAlgebra, t: f64) -> Result<CoeffVec> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::ConstraintViolation(format!(
            "orbit parameter t = {t} outside [0,1]"
        )));
    }
    let s = 2.0 - 3.0 * t;
    let w = Complex64::new((9.0 * t * (1.0 - t)).max(0.0).sqrt(), 0.0);
    crate::algebra::parametrized_su3_orbit(
        algebra,
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
        s,
        w,
    )
}

/// Two-eigenvalue construction: `V = λ·i·diag(−1,−1,2)`, three-monomial
/// ansatz, `t`-parametrized orbit grid. The matched system is rank 3, so the
/// solution is unique when it exists.
pub fn construct_su3_two_eigenvalue(
    algebra: &MatrixLieAlgebra,
    lambda: f64,
    l: f64,
    validation: ValidationParams,
) -> Result<ConstructionOutput> {
    let x = su3_two_eigenvalue_base(algebra)?;
    let v = &x * lambda;
    let ansatz = AnsatzBasis::su3_two_eigenvalue(algebra)?;
    let grid = 12usize;
    let points: Vec<CoeffVec> = (0..grid)
        .map(|k| su3_two_eigenvalue_orbit_point(algebra, k as f64 / (grid - 1) as f64))
        .collect::<Result<_>>()?;
    let problem = ConstructionProblem::new(algebra, x, v, l, ansatz, points)?;
    let result = solve_construction(algebra, &problem, validation)?;
    Ok(ConstructionOutput { problem, result })
}

/// General diagonal construction: `V = i·diag(a,b,−a−b)`, six-monomial
/// torus-invariant ansatz, orbit grid over `(s, t)` with deterministic
/// phases.
pub fn construct_su3_general_diagonal(
    algebra: &MatrixLieAlgebra,
    a: f64,
    b: f64,
    l: f64,
    validation: ValidationParams,
) -> Result<ConstructionOutput> {
    let x = su3_two_eigenvalue_base(algebra)?;
    let v = su3_diagonal_vector(algebra, a, b)?;
    let ansatz = AnsatzBasis::su3_diagonal(algebra)?;
    let mut points = Vec::new();
    let s_grid = 8usize;
    let t_grid = 6usize;
    for si in 0..s_grid {
        let s = -0.9 + 2.8 * si as f64 / (s_grid - 1) as f64;
        for ti in 0..t_grid {
            let t = 0.05 + 0.9 * ti as f64 / (t_grid - 1) as f64;
            let phase = 0.7 * si as f64 + 1.3 * ti as f64;
            let u = Complex64::from_polar(t.sqrt(), phase);
            let vv = Complex64::from_polar((1.0 - t).sqrt(), 0.4 * phase);
            let w = Complex64::from_polar((2.0 + s - s * s).max(0.0).sqrt(), 1.9 * phase);
            points.push(crate::algebra::parametrized_su3_orbit(algebra, u, vv, s, w)?);
        }
    }
    let problem = ConstructionProblem::new(algebra, x, v, l, ansatz, points)?;
    let result = solve_construction(algebra, &problem, validation)?;
    Ok(ConstructionOutput { problem, result })
}

/// One validated member of a positive-dimensional solution family.
#[derive(Debug, Clone)]
pub struct FamilyMember {
    /// Offset along the unit null direction from the particular solution.
    pub offset: f64,
    pub coefficients: DVector<f64>,
    pub spd_ok: bool,
    pub validity_ok: bool,
    /// Constant-length verdict from the derivative criterion.
    pub verdict: Verdict,
    pub metric: Option<RandersMetricSpec>,
}

impl FamilyMember {
    pub fn feasible(&self) -> bool {
        self.spd_ok && self.validity_ok && self.verdict == Verdict::Constant
    }
}

/// Result of the `SU(2)×S¹` construction: a one-dimensional family.
#[derive(Debug, Clone)]
pub struct Su2CircleFamily {
    pub problem: ConstructionProblem,
    pub result: ConstructionResult,
    /// Validated members sampled along the null direction.
    pub members: Vec<FamilyMember>,
}

impl Su2CircleFamily {
    pub fn feasible_members(&self) -> Vec<&FamilyMember> {
        self.members.iter().filter(|m| m.feasible()).collect()
    }

    /// The particular solution's metric if feasible, else the first feasible
    /// sampled member.
    pub fn best_metric(&self) -> Option<&RandersMetricSpec> {
        if self.result.accepted() {
            self.result.metric.as_ref()
        } else {
            self.members
                .iter()
                .find(|m| m.feasible())
                .and_then(|m| m.metric.as_ref())
        }
    }
}

/// The `SU(2)×S¹` case: `X = r·U₁ + s·U₂`, `V = a·U₁ + b·U₂` with unit
/// vectors `U₁ ∈ su(2)`, `U₂` spanning the abelian factor. The matching
/// system has a one-dimensional kernel; members along it are validated
/// individually (positive-definiteness, validity, constant length).
#[allow(clippy::too_many_arguments)]
pub fn construct_su2_circle(
    algebra: &MatrixLieAlgebra,
    a: f64,
    b: f64,
    r: f64,
    s: f64,
    l: f64,
    seed: u64,
    validation: ValidationParams,
) -> Result<Su2CircleFamily> {
    if r <= 0.0 {
        return Err(Error::Precondition(format!(
            "radius r = {r} must be positive"
        )));
    }
    if s == 0.0 {
        return Err(Error::Precondition(
            "abelian component s must be nonzero".into(),
        ));
    }
    let (u1, u2) = su2_circle_units(algebra)?;
    let x = &u1 * r + &u2 * s;
    let v = &u1 * a + &u2 * b;
    let ansatz = AnsatzBasis::su2_circle(algebra)?;
    let assembly = OrbitSample::generate(algebra, &x, 24, seed)?;
    let problem = ConstructionProblem::new(algebra, x, v, l, ansatz, assembly.points)?;
    let result = solve_construction(algebra, &problem, validation)?;

    let mut members = Vec::new();
    if let Some(null) = result.null_directions.first() {
        let scale = result.coefficients.norm().max(1.0);
        let dec = ReductiveDecomposition::trivial(algebra);
        let member_count = 13usize;
        for k in 0..member_count {
            let offset = scale * (-1.2 + 2.4 * k as f64 / (member_count - 1) as f64);
            let coefficients = &result.coefficients + null * offset;
            let gram = problem.ansatz.assemble_gram(&coefficients);
            let spd_ok = gram.clone().symmetric_eigen().eigenvalues.min() > 0.0;
            let (metric, validity_ok, verdict) = if spd_ok {
                let metric = RandersMetricSpec::new(
                    gram,
                    problem.v.clone(),
                    BetaConvention::BiDual,
                    algebra.bi_gram().clone(),
                )?;
                let validity_ok = metric.is_valid();
                let verdict = if validity_ok {
                    killing::criterion_residual(
                        algebra,
                        &dec,
                        &metric,
                        &problem.x,
                        SamplerParams::new(seed.wrapping_add(0xfa111), 48),
                        CriterionVariant::Hrs2,
                    )?
                    .verdict
                } else {
                    Verdict::Inconclusive
                };
                (Some(metric), validity_ok, verdict)
            } else {
                (None, false, Verdict::Inconclusive)
            };
            members.push(FamilyMember {
                offset,
                coefficients,
                spd_ok,
                validity_ok,
                verdict,
                metric,
            });
        }
    }
    Ok(Su2CircleFamily {
        problem,
        result,
        members,
    })
}

/// Verdict of the `SU(2)` rigidity probe.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RigidityReport {
    /// Constancy verdict for the supplied metric and element.
    pub verdict: Verdict,
    pub beta_covector_norm: f64,
    /// `F(X)` and `F(−X)`: both `±X` lie on `𝒪_X`, so constancy forces the
    /// two to agree, killing `β` on the line through `X`.
    pub witness_f_plus: f64,
    pub witness_f_minus: f64,
    /// Set when constancy is certified: `β = 0` to `1e-9`.
    pub beta_zero: Option<bool>,
    /// Set when constancy is certified: the fitted positive scale `c` with
    /// `A ≈ c·B`, and whether the fit closes to `1e-9`.
    pub alpha_bi_scale: Option<f64>,
    pub alpha_bi_proportional: Option<bool>,
}

impl RigidityReport {
    /// True when constancy is certified and both rigidity assertions hold.
    pub fn rigidity_confirmed(&self) -> bool {
        self.verdict == Verdict::Constant
            && self.beta_zero == Some(true)
            && self.alpha_bi_proportional == Some(true)
    }
}

/// On `su(2)`, a certified constant-length metric must be Riemannian with
/// `α` a positive multiple of the bi-invariant form; this checks both
/// assertions whenever certification occurs.
pub fn su2_rigidity_check(
    algebra: &MatrixLieAlgebra,
    metric: &RandersMetricSpec,
    x: &CoeffVec,
    params: SamplerParams,
) -> Result<RigidityReport> {
    if !algebra.is_single_su(2) {
        return Err(Error::UnsupportedAlgebra(
            "rigidity probe requires su(2)".into(),
        ));
    }
    if x.norm() == 0.0 {
        return Err(Error::ZeroVector);
    }
    let dec = ReductiveDecomposition::trivial(algebra);
    let report =
        killing::criterion_residual(algebra, &dec, metric, x, params, CriterionVariant::Hrs1)?;
    let witness_f_plus = metric.finsler_norm(x)?;
    let witness_f_minus = metric.finsler_norm(&(-x))?;
    let beta_covector_norm = metric.beta_covector().norm();
    let (beta_zero, alpha_bi_scale, alpha_bi_proportional) =
        if report.verdict == Verdict::Constant {
            let a = metric.alpha_gram();
            let b = algebra.bi_gram();
            let scale = frobenius_inner(a, b) / frobenius_inner(b, b);
            let defect = (a - b * scale).norm();
            (
                Some(beta_covector_norm <= 1e-9 * (1.0 + a.norm())),
                Some(scale),
                Some(defect <= 1e-9 * a.norm()),
            )
        } else {
            (None, None, None)
        };
    Ok(RigidityReport {
        verdict: report.verdict,
        beta_covector_norm,
        witness_f_plus,
        witness_f_minus,
        beta_zero,
        alpha_bi_scale,
        alpha_bi_proportional,
    })
}

/// Uniqueness probe report: re-solves from disjoint orbit-point sets.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UniquenessReport {
    pub trials: usize,
    pub max_pairwise_distance: f64,
    pub tolerance: f64,
    pub agrees: bool,
    pub condition_numbers: Vec<f64>,
}

/// Empirical uniqueness witness: solves the same problem from `trials`
/// disjoint conjugation-sampled point sets and compares the coefficient
/// vectors. Requires the base solve to have a zero-dimensional kernel.
pub fn uniqueness_probe(
    algebra: &MatrixLieAlgebra,
    problem: &ConstructionProblem,
    trials: usize,
    seed: u64,
) -> Result<UniquenessReport> {
    let base = solve_construction(
        algebra,
        problem,
        ValidationParams {
            seed: seed.wrapping_add(0xbeef),
            count: 200,
        },
    )?;
    if base.solution_space_dim != 0 {
        return Err(Error::Precondition(format!(
            "uniqueness probe requires a unique solution (kernel dim {})",
            base.solution_space_dim
        )));
    }
    let points_per_trial = (2 * problem.ansatz.len()).max(16);
    let mut solutions = vec![base.coefficients.clone()];
    let mut condition_numbers = vec![base.condition_number];
    for trial in 0..trials {
        let sample = OrbitSample::generate(
            algebra,
            &problem.x,
            points_per_trial,
            seed.wrapping_add(1 + trial as u64),
        )?;
        let trial_problem = ConstructionProblem::new(
            algebra,
            problem.x.clone(),
            problem.v.clone(),
            problem.l,
            problem.ansatz.clone(),
            sample.points,
        )?;
        let solved = solve_construction(
            algebra,
            &trial_problem,
            ValidationParams {
                seed: seed.wrapping_add(0x1000 + trial as u64),
                count: 100,
            },
        )?;
        condition_numbers.push(solved.condition_number);
        solutions.push(solved.coefficients);
    }
    let mut max_pairwise_distance = 0.0f64;
    for i in 0..solutions.len() {
        for j in (i + 1)..solutions.len() {
            max_pairwise_distance =
                max_pairwise_distance.max((&solutions[i] - &solutions[j]).norm());
        }
    }
    let tolerance = 1e-9 * (1.0 + base.coefficients.norm());
    Ok(UniquenessReport {
        trials,
        max_pairwise_distance,
        tolerance,
        agrees: max_pairwise_distance <= tolerance,
        condition_numbers,
    })
}

fn require_su3(algebra: &MatrixLieAlgebra) -> Result<()> {
    if algebra.is_single_su(3) {
        Ok(())
    } else {
        Err(Error::UnsupportedAlgebra(
            "this construction requires su(3)".into(),
        ))
    }
}

/// Unit vectors `U₁` (diagonal direction of `su(2)`) and `U₂` (abelian
/// generator) for the `su(2)⊕ℝ` construction, in algebra coordinates.
pub fn su2_circle_units(algebra: &MatrixLieAlgebra) -> Result<(CoeffVec, CoeffVec)> {
    use crate::algebra::Factor;
    if algebra.factor_kinds() != vec![Factor::Su(2), Factor::Abelian] {
        return Err(Error::UnsupportedAlgebra(
            "this construction requires su(2) ⊕ abelian(1)".into(),
        ));
    }
    let dim = algebra.dim();
    let b = algebra.bi_gram();
    let mut u1 = DVector::zeros(dim);
    u1[2] = 1.0 / b[(2, 2)].sqrt();
    let mut u2 = DVector::zeros(dim);
    u2[3] = 1.0 / b[(3, 3)].sqrt();
    Ok((u1, u2))
}

/// `p ↦ −i·(matrix of p)`: the Hermitian matrix the ansatz entries read from.
fn hermitian_of(algebra: &MatrixLieAlgebra) -> impl Fn(&CoeffVec) -> CMat + 'static {
    let algebra = algebra.clone();
    move |p: &CoeffVec| algebra.to_matrix(p) * Complex64::new(0.0, -1.0)
}

fn frobenius_inner(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

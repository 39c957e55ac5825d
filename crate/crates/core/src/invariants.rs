//! Structural subspaces of the transport generator and its invariant states.
//!
//! * `W = ran |Z_1|^⊥`, the interaction-free subspace;
//! * `V`, the orthocomplement of the transported seed vectors, whose
//!   projection is harmonic;
//! * the stratification `V_k = P_k V` and the level-1 splitting `V_1 = W ⊕ M`;
//! * invariant states on `V ⊖ W` built by transporting a level-1 seed `τ`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gksl::{omega_perp_subspace, omega_subspace, GKSLModel, MAX_SUPEROPERATOR_DIM, NULL_REL_TOL};
use crate::hilbert::{Block, LevelStructure, State, STATE_TOL};
use crate::linalg::expm;
use crate::operator::{c64, inner, Operator, Vector, ZERO};
use crate::subspace::{Subspace, EQ_TOL};
use crate::transition::{entangled_vector, zeta_pow, Transport};

/// Default tolerance for support tests.
pub const SUPPORT_TOL: f64 = 1e-10;

fn require_ladder(levels: &LevelStructure) -> Result<()> {
    if levels.n_levels() < 2 {
        return Err(Error::Range(format!(
            "structure theory needs at least two middle levels, got {}",
            levels.n_levels()
        )));
    }
    Ok(())
}

/// `W = span{φ_{t_1} : n_2 ≤ t < n_1}`.
pub fn interaction_free_subspace(levels: &LevelStructure) -> Result<Subspace> {
    require_ladder(levels)?;
    let mut gens = Vec::new();
    let mut labels = Vec::new();
    for t in levels.dim_of(2)..levels.dim_of(1) {
        gens.push(entangled_vector(levels, 1, t)?);
        labels.push(format!("phi_{t}_1"));
    }
    Ok(Subspace::span_labeled(levels.total_dim(), &gens, &labels, "W"))
}

/// Generators of `V^⊥`:
/// `|−⟩, |+⟩, Z^nφ_{0_1}, Z*^nφ_{0_N}` for `0 ≤ n ≤ N−1`, and
/// `Z*^s φ_{0_{2m+1}}` for integer `1 ≤ m ≤ (N−1)/2`, `1 ≤ s ≤ 2m`.
#[derive(Clone, Debug)]
pub struct SeedVectors {
    pub vectors: Vec<Vector>,
    pub labels: Vec<String>,
    /// Generators whose level index would exceed `N`; none arise for integer `m`.
    pub skipped: Vec<String>,
}

pub fn v_perp_generators(levels: &LevelStructure) -> Result<SeedVectors> {
    require_ladder(levels)?;
    let n = levels.n_levels();
    let t = Transport::new(levels);
    let phi01 = entangled_vector(levels, 1, 0)?;
    let phi0n = entangled_vector(levels, n, 0)?;
    let mut vectors = vec![levels.minus(), levels.plus()];
    let mut labels = vec!["-".to_string(), "+".to_string()];
    for p in 0..n {
        vectors.push(t.apply_power(&phi01, p));
        labels.push(format!("Z^{p} phi_0_1"));
    }
    for p in 0..n {
        vectors.push(t.apply_adjoint_power(&phi0n, p));
        labels.push(format!("Z*^{p} phi_0_{n}"));
    }
    let mut skipped = Vec::new();
    for m in 1..=(n - 1) / 2 {
        let level = 2 * m + 1;
        for s in 1..=2 * m {
            if level > n {
                skipped.push(format!("Z*^{s} phi_0_{level}"));
                continue;
            }
            let seed = entangled_vector(levels, level, 0)?;
            vectors.push(t.apply_adjoint_power(&seed, s));
            labels.push(format!("Z*^{s} phi_0_{level}"));
        }
    }
    Ok(SeedVectors {
        vectors,
        labels,
        skipped,
    })
}

/// `V^⊥`, the span of the seed vectors.
pub fn harmonic_subspace_v_perp(levels: &LevelStructure) -> Result<Subspace> {
    let seeds = v_perp_generators(levels)?;
    Ok(Subspace::span_labeled(
        levels.total_dim(),
        &seeds.vectors,
        &seeds.labels,
        "V_perp",
    ))
}

/// `V = (span of the seed vectors)^⊥`.
pub fn harmonic_subspace_v(levels: &LevelStructure) -> Result<Subspace> {
    Ok(harmonic_subspace_v_perp(levels)?.complement("V"))
}

/// Where the subspace `M` came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MSource {
    /// `span{φ_{b_1}/μ̄_b − φ_{(b+1)_1}/μ̄_{b+1}}`.
    Mu,
    /// Some `μ_b` vanished; `M = V_1 ⊖ W` computed by orthogonal complement.
    DirectComplement,
}

/// Residual and verdict of one structural identity.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub ok: bool,
}

impl Check {
    fn new(name: impl Into<String>, residual: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            residual,
            ok: residual <= tol,
        }
    }
}

#[derive(Clone, Debug)]
pub struct StratifiedV {
    pub v: Subspace,
    /// `V_k = P_k V`, index `k − 1`.
    pub levels_v: Vec<Subspace>,
    pub w: Subspace,
    pub m: Subspace,
    pub m_source: MSource,
    /// `μ_b`, `b < n_2`: coefficients of `Z*^{N−1}φ_{0_N}` in the level-1
    /// entangled basis.
    pub mu: Vec<c64>,
    /// `V_1 ⊖ W` computed by orthogonal complement.
    pub v1_minus_w: Subspace,
    /// `V ⊖ W`.
    pub v_minus_w: Subspace,
    pub checks: Vec<Check>,
    /// Levels `k ∈ 2..N−1` at which `Z^{k−1}(V_1 ⊖ W)` leaves `ran |Z|_k`.
    pub incompatible_levels: Vec<usize>,
    pub skipped_generators: Vec<String>,
}

impl StratifiedV {
    pub fn level(&self, k: usize) -> &Subspace {
        &self.levels_v[k - 1]
    }

    pub fn all_checks_ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Whether every transported seed stays inside `ran |Z|_k` below level `N`,
    /// the condition under which transported seeds are invariant.
    pub fn transport_compatible(&self) -> bool {
        self.incompatible_levels.is_empty()
    }
}

/// `μ_b` from the nested sum
/// `Π_{j=2}^{N} n_j^{−1/2} Σ_{b_{N−1},…,b_2} ζ_{N−1}^{−b_{N−2}b_{N−1}} ⋯ ζ_2^{−b_1b_2}`,
/// evaluated level by level from `N` down to `1`.
pub fn mu_coefficients(levels: &LevelStructure) -> Result<Vec<c64>> {
    require_ladder(levels)?;
    let n = levels.n_levels();
    // coefficients on level k in the φ_{·_k} basis, starting from φ_{0_N}
    let mut coef = vec![ZERO; levels.dim_of(n)];
    coef[0] = c64::new(1.0, 0.0);
    for k in (2..=n).rev() {
        let nk = levels.dim_of(k);
        let s = 1.0 / (nk as f64).sqrt();
        let mut next = vec![ZERO; levels.dim_of(k - 1)];
        for (d, slot) in next.iter_mut().enumerate().take(nk) {
            for (c, &x) in coef.iter().enumerate() {
                *slot += x * zeta_pow(nk, -((d * c) as i64)) * s;
            }
        }
        coef = next;
    }
    coef.truncate(levels.dim_of(2));
    Ok(coef)
}

/// `M` from the `μ` formula; `DegenerateError` when a needed `μ_b` vanishes.
pub fn m_from_mu(levels: &LevelStructure, mu: &[c64]) -> Result<Subspace> {
    let n2 = levels.dim_of(2);
    let mut gens = Vec::new();
    let mut labels = Vec::new();
    for b in 1..n2.saturating_sub(1) {
        let (ma, mb) = (mu[b], mu[b + 1]);
        if ma.norm() <= 1e-12 || mb.norm() <= 1e-12 {
            return Err(Error::Degenerate(format!(
                "mu_{} = {:.3e} and mu_{} = {:.3e}; M is undefined",
                b,
                ma.norm(),
                b + 1,
                mb.norm()
            )));
        }
        let u = entangled_vector(levels, 1, b)?;
        let v = entangled_vector(levels, 1, b + 1)?;
        let g = &crate::operator::scale_vector(&u, ma.conj().inv())
            - &crate::operator::scale_vector(&v, mb.conj().inv());
        gens.push(g);
        labels.push(format!("phi_{b}_1/mu_{b} - phi_{}_1/mu_{}", b + 1, b + 1));
    }
    Ok(Subspace::span_labeled(levels.total_dim(), &gens, &labels, "M"))
}

pub fn stratify(levels: &LevelStructure) -> Result<StratifiedV> {
    require_ladder(levels)?;
    let n = levels.n_levels();
    let d = levels.total_dim();
    let t = Transport::new(levels);
    let seeds = v_perp_generators(levels)?;
    let v = Subspace::span_labeled(d, &seeds.vectors, &seeds.labels, "V_perp").complement("V");
    let levels_v: Vec<Subspace> = (1..=n)
        .map(|k| v.project(&levels.p_level(k), format!("V_{k}")))
        .collect();
    let w = interaction_free_subspace(levels)?;
    let v1 = &levels_v[0];
    let v1_minus_w = v1.minus(&w, "V_1 - W");
    let v_minus_w = v.minus(&w, "V - W");
    let mu = mu_coefficients(levels)?;
    let (m, m_source) = match m_from_mu(levels, &mu) {
        Ok(m) => (m, MSource::Mu),
        Err(Error::Degenerate(_)) => (v1_minus_w.clone().with_label("M"), MSource::DirectComplement),
        Err(e) => return Err(e),
    };

    let mut checks = Vec::new();
    let pv = v.projector();
    let mut sum = Operator::zeros(d, d);
    for s in &levels_v {
        sum = &sum + &s.projector();
    }
    checks.push(Check::new("V = sum V_k", sum.max_abs_diff(&pv), EQ_TOL));
    let pw = w.projector();
    checks.push(Check::new(
        "W in V_1",
        (&v1.projector() * &pw).max_abs_diff(&pw),
        EQ_TOL,
    ));
    let wm = &pw + &m.projector();
    checks.push(Check::new("V_1 = W + M", wm.max_abs_diff(&v1.projector()), EQ_TOL));
    checks.push(Check::new(
        "W perp M",
        (&w.frame.adjoint() * &m.frame).norm_max(),
        EQ_TOL,
    ));
    checks.push(Check::new(
        "M perp Z*^(N-1) phi_0_N",
        {
            let top = t.apply_adjoint_power(&entangled_vector(levels, n, 0)?, n - 1);
            m.vectors().iter().map(|e| inner(e, &top).norm()).fold(0.0, f64::max)
        },
        EQ_TOL,
    ));
    for k in 1..=n {
        for j in 1..=(n - k) {
            let mut img = levels_v[k - 1].clone();
            for _ in 0..j {
                img = img.image(&t.z, "img");
            }
            checks.push(Check::new(
                format!("Z^{j} V_{k} = V_{}", k + j),
                img.projector_distance(&levels_v[k + j - 1]),
                EQ_TOL,
            ));
        }
    }
    let mut stacked = Operator::zeros(d, d);
    let mut img = v1.clone();
    for j in 0..n {
        if j > 0 {
            img = img.image(&t.z, "img");
        }
        stacked = &stacked + &img.projector();
    }
    checks.push(Check::new("V = sum Z^j V_1", stacked.max_abs_diff(&pv), EQ_TOL));

    let mut incompatible_levels = Vec::new();
    let mut a = v1_minus_w.clone();
    for k in 2..n {
        a = a.image(&t.z, format!("A_{k}"));
        let leak = (&t.abs_perp_k(k) * &a.frame).norm_max();
        if leak > EQ_TOL {
            incompatible_levels.push(k);
        }
    }

    Ok(StratifiedV {
        v,
        levels_v,
        w,
        m,
        m_source,
        mu,
        v1_minus_w,
        v_minus_w,
        checks,
        incompatible_levels,
        skipped_generators: seeds.skipped,
    })
}

/// Per-level residuals of the invariance characterisation on `Ω`.
#[derive(Clone, Debug, Serialize)]
pub struct LevelResiduals {
    pub k: usize,
    /// `‖[ρ, |Z|_k]‖_max`
    pub commutator_abs_z: f64,
    /// `‖[ρ, P_{k+1}]‖_max`
    pub commutator_p_next: f64,
    /// `‖Z_k*ρZ_k − e^{β_k} ρ|Z|_k‖_max`
    pub detailed_balance: f64,
    /// `‖Z_kρZ_k* − e^{−β_k} ρP_{k+1}‖_max`
    pub detailed_balance_forward: f64,
    /// `‖ρZ_k − e^{β_k} Z_kρ‖_max`
    pub intertwining: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct InvarianceReport {
    pub tol: f64,
    pub support_residual: f64,
    pub levels: Vec<LevelResiduals>,
    /// `‖𝓛(ρ)‖_max`
    pub generator_residual: f64,
    /// `‖𝓛(ρ)‖_max ≤ tol`.
    pub verdict: bool,
    /// Commutation with `|Z|_k`, `P_{k+1}` and detailed balance all within tol.
    pub structural_ok: bool,
    /// The forward detailed-balance and intertwining relations within tol.
    pub implied_ok: bool,
    /// `verdict == structural_ok`.
    pub consistent: bool,
}

impl InvarianceReport {
    pub fn commutes_abs_z(&self) -> Vec<(bool, f64)> {
        self.levels
            .iter()
            .map(|l| (l.commutator_abs_z <= self.tol, l.commutator_abs_z))
            .collect()
    }

    pub fn commutes_p_next(&self) -> Vec<(bool, f64)> {
        self.levels
            .iter()
            .map(|l| (l.commutator_p_next <= self.tol, l.commutator_p_next))
            .collect()
    }

    pub fn detailed_balance(&self) -> Vec<(bool, f64)> {
        self.levels
            .iter()
            .map(|l| (l.detailed_balance <= self.tol, l.detailed_balance))
            .collect()
    }

    pub fn max_structural_residual(&self) -> f64 {
        self.levels
            .iter()
            .map(|l| l.commutator_abs_z.max(l.commutator_p_next).max(l.detailed_balance))
            .fold(0.0, f64::max)
    }
}

/// Evaluate the invariance characterisation for `ρ` supported on `Ω`.
pub fn check_invariance(model: &GKSLModel, rho: &Operator, tol: f64) -> Result<InvarianceReport> {
    let levels = model.levels();
    require_ladder(levels)?;
    let omega = omega_subspace(levels);
    let support_residual = omega.support_residual(rho);
    if support_residual > tol.max(SUPPORT_TOL) {
        return Err(Error::Support(format!(
            "state leaves Omega (residual {support_residual:e})"
        )));
    }
    let t = model.transport();
    let mut out = Vec::new();
    for k in 1..levels.n_levels() {
        let beta = model.rates().beta(k);
        let zk = t.z_k(k);
        let zka = zk.adjoint();
        let abs_k = t.abs_k(k);
        let p_next = levels.p_level(k + 1);
        let db = &(&(&zka * rho) * &zk) - &(rho * &abs_k).scale_real(beta.exp());
        let dbf = &(&(&zk * rho) * &zka) - &(rho * &p_next).scale_real((-beta).exp());
        let inter = &(rho * &zk) - &(&zk * rho).scale_real(beta.exp());
        out.push(LevelResiduals {
            k,
            commutator_abs_z: rho.commutator(&abs_k).norm_max(),
            commutator_p_next: rho.commutator(&p_next).norm_max(),
            detailed_balance: db.norm_max(),
            detailed_balance_forward: dbf.norm_max(),
            intertwining: inter.norm_max(),
        });
    }
    let generator_residual = model.generator(rho)?.norm_max();
    let verdict = generator_residual <= tol;
    let structural_ok = out
        .iter()
        .all(|l| l.commutator_abs_z <= tol && l.commutator_p_next <= tol && l.detailed_balance <= tol);
    let implied_ok = out
        .iter()
        .all(|l| l.detailed_balance_forward <= tol && l.intertwining <= tol);
    Ok(InvarianceReport {
        tol,
        support_residual,
        levels: out,
        generator_residual,
        verdict,
        structural_ok,
        implied_ok,
        consistent: verdict == structural_ok,
    })
}

fn validate_positive(tau: &Operator) -> Result<()> {
    if !tau.is_hermitian(STATE_TOL) {
        return Err(Error::InvalidState("seed is not Hermitian".into()));
    }
    if tau.norm_max() == 0.0 {
        return Err(Error::ZeroState);
    }
    let min = tau.hermitian_part().eigenvalues_hermitian()?[0];
    if min < -STATE_TOL * tau.norm_max().max(1.0) {
        return Err(Error::InvalidState(format!("seed has negative eigenvalue {min:e}")));
    }
    Ok(())
}

/// `ρ = c Σ_{n=0}^{N−1} e^{Σ_{j≤n} β_j} Z^n τ Z*^n` with `c` fixing `tr ρ = 1`.
/// `τ` must be positive and supported on `V_1 ⊖ W`; it need not be normalised.
pub fn construct_invariant(model: &GKSLModel, tau: &Operator) -> Result<State> {
    let strat = stratify(model.levels())?;
    construct_invariant_on(model, &strat.v1_minus_w, tau)
}

/// [`construct_invariant`] with a precomputed `V_1 ⊖ W`.
pub fn construct_invariant_on(model: &GKSLModel, seed_space: &Subspace, tau: &Operator) -> Result<State> {
    if tau.rows() != model.dim() || tau.cols() != model.dim() {
        return Err(Error::Shape {
            expected: format!("{0}x{0}", model.dim()),
            found: format!("{}x{}", tau.rows(), tau.cols()),
        });
    }
    validate_positive(tau)?;
    let res = seed_space.support_residual(tau);
    if res > SUPPORT_TOL * tau.norm_max().max(1.0) {
        return Err(Error::Support(format!("seed leaves V_1 - W (residual {res:e})")));
    }
    let rho = transport_sum(model, tau);
    State::normalized(&rho.hermitian_part())
}

/// `Σ_{n=0}^{N−1} e^{Σ_{j≤n} β_j} Z^n τ Z*^n`, unnormalised.
pub fn transport_sum(model: &GKSLModel, tau: &Operator) -> Operator {
    let t = model.transport();
    let n = model.levels().n_levels();
    let mut term = tau.clone();
    let mut out = tau.clone();
    for p in 1..n {
        term = &(&t.z * &term) * &t.z_adj;
        out = &out + &term.scale_real(model.rates().cumulative_beta(p).exp());
    }
    out
}

/// `τ = |Z|_1 ρ |Z|_1 / tr(|Z|_1 ρ)` and the weight `tr(|Z|_1 ρ)` for `ρ`
/// supported on `V ⊖ W`. Invariance of `ρ` is not checked here.
pub fn extract_tau(model: &GKSLModel, rho: &Operator) -> Result<(State, f64)> {
    let strat = stratify(model.levels())?;
    extract_tau_on(model, &strat.v_minus_w, rho)
}

/// [`extract_tau`] with a precomputed `V ⊖ W`.
pub fn extract_tau_on(model: &GKSLModel, support: &Subspace, rho: &Operator) -> Result<(State, f64)> {
    let res = support.support_residual(rho);
    if res > SUPPORT_TOL {
        return Err(Error::Support(format!("state leaves V - W (residual {res:e})")));
    }
    let abs1 = model.transport().abs_k(1);
    let weight = (&abs1 * rho).trace().re;
    if weight <= SUPPORT_TOL {
        return Err(Error::Degenerate(format!(
            "tr(|Z|_1 rho) = {weight:e}; no invariant state has this support"
        )));
    }
    let tau = (&(&abs1 * rho) * &abs1).scale_real(1.0 / weight);
    Ok((State::new(tau.hermitian_part(), STATE_TOL)?, weight))
}

/// `Σ_n e^{Σ_{j≤n} β_j} Z^n |Z|_1 ρ |Z|_1 Z*^n`; equals `ρ` when `ρ` is an
/// invariant operator supported on `V ⊖ W`.
pub fn reconstruct(model: &GKSLModel, rho: &Operator) -> Operator {
    let abs1 = model.transport().abs_k(1);
    transport_sum(model, &(&(&abs1 * rho) * &abs1))
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    /// `λ = tr(P_W ρ)`.
    pub lambda: f64,
    /// `P_W ρ P_W / λ`, absent when `λ = 0`.
    pub eta: Option<State>,
    /// `(I − P_W) ρ (I − P_W) / (1 − λ)`, absent when `λ = 1`.
    pub tau: Option<State>,
}

/// `ρ = λη + (1 − λ)τ` with `η` on `W` and `τ` on `W^⊥`, for `ρ` commuting
/// with `|Z|_1^⊥`.
pub fn decompose_invariant(model: &GKSLModel, rho: &Operator, tol: f64) -> Result<Decomposition> {
    let levels = model.levels();
    let w = interaction_free_subspace(levels)?;
    let perp1 = model.transport().abs_perp_k(1);
    let residual = rho.commutator(&perp1).norm_max();
    if residual > tol {
        return Err(Error::Commutation { residual, tol });
    }
    let pw = w.projector();
    let q = &Operator::identity(levels.total_dim()) - &pw;
    let lambda = (&pw * rho).trace().re;
    let eta = if lambda > tol {
        Some(State::normalized(&(&(&pw * rho) * &pw).hermitian_part())?)
    } else {
        None
    };
    let tau = if 1.0 - lambda > tol {
        Some(State::normalized(&(&(&q * rho) * &q).hermitian_part())?)
    } else {
        None
    };
    Ok(Decomposition { lambda, eta, tau })
}

/// Rank-one test on the seed: true iff the second largest eigenvalue is at
/// most `tol`.
pub fn is_extremal_tau(tau: &State, tol: f64) -> bool {
    let ev = tau
        .operator()
        .hermitian_part()
        .eigenvalues_hermitian()
        .expect("Hermitian eigenvalues");
    ev.len() < 2 || ev[ev.len() - 2] <= tol
}

/// Dimension of the space of stationary operators supported on `ran ρ`.
/// The invariant states with support inside `ran ρ` form a face of that
/// dimension minus one; `ρ` is invariant-extremal iff the result is 1.
pub fn invariant_face_dimension(model: &GKSLModel, rho: &Operator) -> Result<usize> {
    let (vals, vecs) = rho.hermitian_part().eigen_hermitian()?;
    let top = vals.iter().cloned().fold(0.0, f64::max);
    let cols: Vec<Vector> = vals
        .iter()
        .enumerate()
        .filter(|(_, &x)| x > 1e-10 * top.max(1e-300))
        .map(|(j, _)| vecs.column(j))
        .collect();
    let support = Subspace::span(model.dim(), &cols, "ran rho");
    Ok(model.stationary_kernel_on(&support)?.len())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Uniqueness {
    Unique,
    NotUnique,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct OmegaPerpReport {
    pub status: Uniqueness,
    /// Dimension of the stationary operators supported on `Ω^⊥`.
    pub nullspace_dim: usize,
    /// `‖σ − P_−‖_max` for the normalised Hermitian kernel representative σ.
    pub distance_to_ground: Option<f64>,
    /// `‖𝓛(P_−)‖_max`.
    pub ground_residual: f64,
    /// `‖𝓛̂ vec(P_−)‖_2` inside the restricted block.
    pub ground_singular_value: f64,
    /// Rates required to be strictly positive that vanish.
    pub vanishing_rates: Vec<String>,
}

/// Stationary states supported on `Ω^⊥ = span{|−⟩, |+⟩, φ_{0_1}, φ_{0_N}}`.
pub fn omega_perp_uniqueness(model: &GKSLModel) -> Result<OmegaPerpReport> {
    let levels = model.levels();
    if model.dim() > MAX_SUPEROPERATOR_DIM {
        return Err(Error::Size {
            dim: model.dim(),
            limit: MAX_SUPEROPERATOR_DIM,
        });
    }
    let n = levels.n_levels();
    let r = model.rates();
    let mut required = vec![
        ("Gamma_minus(omega_plus)".to_string(), r.plus.damping_minus),
        ("Gamma_plus(omega_plus)".to_string(), r.plus.damping_plus),
        ("Gamma_minus(omega_minus)".to_string(), r.minus.damping_minus),
    ];
    if n >= 2 {
        required.push(("Gamma_minus(omega_1)".into(), r.middle[0].damping_minus));
        required.push((format!("Gamma_plus(omega_{})", n - 1), r.middle[n - 2].damping_plus));
    }
    let vanishing_rates: Vec<String> = required
        .into_iter()
        .filter(|(_, x)| !(*x > 0.0))
        .map(|(name, _)| name)
        .collect();

    let pm = levels.projector(Block::Minus)?;
    let ground_residual = model.generator(&pm)?.norm_max();
    let support = omega_perp_subspace(levels);
    let s = model.lindbladian_matrix()?;
    let f = &support.frame;
    let restricted = s * &f.conjugate().kron(f);
    let ground_coords = support.compress(&pm).vectorize();
    let ground_singular_value = crate::operator::norm(&restricted.apply(&ground_coords));
    let kernel = model.stationary_kernel_on(&support)?;
    let nullspace_dim = kernel.len();
    let distance_to_ground = if nullspace_dim == 1 {
        let x = &kernel[0];
        // fix the phase so that the representative has positive trace
        let tr = x.trace();
        if tr.norm() > 1e-12 {
            let sigma = x.scale(tr.inv()).hermitian_part();
            Some(sigma.max_abs_diff(&pm))
        } else {
            None
        }
    } else {
        None
    };
    let status = if !vanishing_rates.is_empty() {
        Uniqueness::Inconclusive
    } else if nullspace_dim == 1 && distance_to_ground.is_some_and(|x| x <= 1e-9) {
        Uniqueness::Unique
    } else {
        Uniqueness::NotUnique
    };
    Ok(OmegaPerpReport {
        status,
        nullspace_dim,
        distance_to_ground,
        ground_residual,
        ground_singular_value,
        vanishing_rates,
    })
}

/// Sampled check of `T_t^*(p) ≥ p`: the smallest eigenvalue of
/// `T_t^*(p) − p` at each time. Informational only.
#[derive(Clone, Debug, Serialize)]
pub struct SubharmonicSample {
    pub t: f64,
    pub min_eigenvalue: f64,
    pub passes: bool,
}

pub fn subharmonic_probe(model: &GKSLModel, p: &Operator, times: &[f64]) -> Result<Vec<SubharmonicSample>> {
    let dual = model.dual_lindbladian_matrix()?;
    let d = model.dim();
    let mut out = Vec::new();
    for &t in times {
        let e = expm(&dual.scale_real(t))?;
        let evolved = Operator::unvectorize(&e.apply(&p.vectorize()), d)?;
        let gap = (&evolved - p).hermitian_part();
        let min = gap.eigenvalues_hermitian()?[0];
        out.push(SubharmonicSample {
            t,
            min_eigenvalue: min,
            passes: min >= -1e-9,
        });
    }
    Ok(out)
}

/// Stationary operators supported on `V ⊖ W`, each rescaled to unit trace
/// (or unit max-entry when the trace vanishes).
pub fn stationary_states_on(model: &GKSLModel, support: &Subspace) -> Result<Vec<Operator>> {
    let kernel = model.stationary_kernel_on(support)?;
    Ok(kernel
        .into_iter()
        .map(|x| {
            let tr = x.trace();
            if tr.norm() > 1e-8 {
                x.scale(tr.inv())
            } else {
                x.scale_real(1.0 / x.norm_max())
            }
        })
        .collect())
}

/// Relative singular-value threshold re-exported for oracles.
pub const KERNEL_TOL: f64 = NULL_REL_TOL;

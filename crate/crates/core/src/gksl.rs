//! GKSL generator of the transport model: Kraus operators, Hamiltonians,
//! the Schrödinger and Heisenberg generators, the vectorised superoperator,
//! time evolution and numerically stationary states.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{Block, BohrFrequency, LevelStructure, State};
use crate::linalg::expm;
use crate::operator::{c64, Operator, Vector, I};
use crate::subspace::Subspace;
use crate::transition::{entangled_vector, Transport};

/// Dimension guard for the `D² × D²` superoperator.
pub const MAX_SUPEROPERATOR_DIM: usize = 64;

/// Relative singular-value threshold for numerical kernels.
pub const NULL_REL_TOL: f64 = 1e-10;

/// Snapshot tolerance during evolution.
pub const EVOLVE_TOL: f64 = 1e-9;

/// Damping rates and energy shifts attached to one Bohr frequency.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ChannelRates {
    #[serde(rename = "Gamma_minus")]
    pub damping_minus: f64,
    #[serde(rename = "Gamma_plus")]
    pub damping_plus: f64,
    #[serde(rename = "gamma_minus", default)]
    pub shift_minus: f64,
    #[serde(rename = "gamma_plus", default)]
    pub shift_plus: f64,
}

impl ChannelRates {
    pub fn new(damping_minus: f64, damping_plus: f64, shift_minus: f64, shift_plus: f64) -> Self {
        Self {
            damping_minus,
            damping_plus,
            shift_minus,
            shift_plus,
        }
    }
}

/// Rates per channel: `ω_+`, the middle `ω_k` (`k = 1..N−1`) and `ω_−`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateSet {
    #[serde(rename = "omega_plus")]
    pub plus: ChannelRates,
    #[serde(rename = "omega")]
    pub middle: Vec<ChannelRates>,
    #[serde(rename = "omega_minus")]
    pub minus: ChannelRates,
}

impl RateSet {
    /// `Γ_{−,ω} = 1`, `Γ_{+,ω} = e^{−βω}`, `γ = 0` on every channel, except
    /// `Γ_{+,ω_−} = 0`.
    pub fn thermal(levels: &LevelStructure, beta: f64) -> Self {
        let ch = |w: BohrFrequency| ChannelRates::new(1.0, (-beta * levels.frequency(w)).exp(), 0.0, 0.0);
        let mut minus = ch(BohrFrequency::Minus);
        minus.damping_plus = 0.0;
        Self {
            plus: ch(BohrFrequency::Plus),
            middle: (1..levels.n_levels()).map(|k| ch(BohrFrequency::Middle(k))).collect(),
            minus,
        }
    }

    /// Every rate and shift zero.
    pub fn zero(levels: &LevelStructure) -> Self {
        Self {
            plus: ChannelRates::default(),
            middle: vec![ChannelRates::default(); levels.n_levels().saturating_sub(1)],
            minus: ChannelRates::default(),
        }
    }

    pub fn channel(&self, w: BohrFrequency) -> &ChannelRates {
        match w {
            BohrFrequency::Plus => &self.plus,
            BohrFrequency::Middle(k) => &self.middle[k - 1],
            BohrFrequency::Minus => &self.minus,
        }
    }

    pub fn validate(&self, levels: &LevelStructure) -> Result<()> {
        let n = levels.n_levels();
        if self.middle.len() != n.saturating_sub(1) {
            return Err(Error::Rate(format!(
                "expected {} middle channels, found {}",
                n.saturating_sub(1),
                self.middle.len()
            )));
        }
        let all = std::iter::once(("omega_plus".to_string(), &self.plus))
            .chain(self.middle.iter().enumerate().map(|(i, c)| (format!("omega_{}", i + 1), c)))
            .chain(std::iter::once(("omega_minus".to_string(), &self.minus)));
        for (name, c) in all {
            let vals = [c.damping_minus, c.damping_plus, c.shift_minus, c.shift_plus];
            if vals.iter().any(|x| !x.is_finite()) {
                return Err(Error::Rate(format!("{name}: non-finite rate")));
            }
            if c.damping_minus < 0.0 || c.damping_plus < 0.0 {
                return Err(Error::Rate(format!("{name}: damping rates must be nonnegative")));
            }
        }
        if self.minus.damping_plus != 0.0 {
            return Err(Error::Rate("omega_minus: Gamma_plus must vanish".into()));
        }
        for (i, c) in self.middle.iter().enumerate() {
            if !(c.damping_minus > 0.0 && c.damping_plus > 0.0) {
                return Err(Error::Rate(format!(
                    "omega_{}: middle damping rates must be strictly positive",
                    i + 1
                )));
            }
        }
        Ok(())
    }

    /// `β_k = ln(Γ_{−,ω_k} / Γ_{+,ω_k})` for `1 ≤ k ≤ N−1`; `β_0 = 0`.
    pub fn beta(&self, k: usize) -> f64 {
        if k == 0 {
            return 0.0;
        }
        let c = &self.middle[k - 1];
        (c.damping_minus / c.damping_plus).ln()
    }

    /// `Σ_{j=0}^{n} β_j`.
    pub fn cumulative_beta(&self, n: usize) -> f64 {
        (1..=n).map(|j| self.beta(j)).sum()
    }
}

/// Which operator of a channel a Kraus label refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Minus,
    Plus,
}

#[derive(Clone, Debug)]
pub struct KrausOperator {
    pub sign: Sign,
    pub channel: BohrFrequency,
    pub op: Operator,
}

impl KrausOperator {
    pub fn label(&self) -> String {
        let s = match self.sign {
            Sign::Minus => "-",
            Sign::Plus => "+",
        };
        format!("L[{s},{}]", self.channel)
    }
}

/// The `2(N+1)` Kraus operators in channel order, `L_−` before `L_+`.
pub fn kraus_operators(levels: &LevelStructure, rates: &RateSet) -> Vec<KrausOperator> {
    let n = levels.n_levels();
    let n1 = levels.dim_of(1) as f64;
    let t = Transport::new(levels);
    let phi01 = entangled_vector(levels, 1, 0).expect("level 1");
    let phi0n = entangled_vector(levels, n, 0).expect("level N");
    let plus = levels.plus();
    let minus = levels.minus();
    let d = levels.total_dim();
    let mut out = Vec::with_capacity(2 * (n + 1));
    let mut push = |sign, channel, op| out.push(KrausOperator { sign, channel, op });

    let r = &rates.plus;
    push(
        Sign::Minus,
        BohrFrequency::Plus,
        Operator::outer(&phi01, &plus).scale_real((n1 * r.damping_minus).sqrt()),
    );
    push(
        Sign::Plus,
        BohrFrequency::Plus,
        Operator::outer(&plus, &phi01).scale_real((n1 * r.damping_plus).sqrt()),
    );
    for k in 1..n {
        let r = &rates.middle[k - 1];
        let zk = t.z_k(k);
        push(Sign::Minus, BohrFrequency::Middle(k), zk.scale_real(r.damping_minus.sqrt()));
        push(
            Sign::Plus,
            BohrFrequency::Middle(k),
            zk.adjoint().scale_real(r.damping_plus.sqrt()),
        );
    }
    let r = &rates.minus;
    push(
        Sign::Minus,
        BohrFrequency::Minus,
        Operator::outer(&minus, &phi0n).scale_real(r.damping_minus.sqrt()),
    );
    push(Sign::Plus, BohrFrequency::Minus, Operator::zeros(d, d));
    out
}

/// `H = ε_− P_− + ε_+ P_+ + Σ_k ε_k P_k`.
pub fn reference_hamiltonian(levels: &LevelStructure) -> Operator {
    let mut diag = vec![levels.energy_minus(), levels.energy_plus()];
    for k in 1..=levels.n_levels() {
        diag.extend(std::iter::repeat_n(levels.energy(k), levels.dim_of(k)));
    }
    Operator::diagonal(&diag)
}

/// `H_eff = n_1 γ_{−,ω_+} P_+ − n_1 γ_{+,ω_+} |φ_{0_1}⟩⟨φ_{0_1}|
///        + γ_{−,ω_−} |φ_{0_N}⟩⟨φ_{0_N}| − γ_{+,ω_−} P_−
///        + Σ_k (γ_{−,ω_k} |Z|_k − γ_{+,ω_k} P_{k+1})`.
pub fn effective_hamiltonian(levels: &LevelStructure, rates: &RateSet) -> Operator {
    let n = levels.n_levels();
    let n1 = levels.dim_of(1) as f64;
    let t = Transport::new(levels);
    let phi01 = entangled_vector(levels, 1, 0).expect("level 1");
    let phi0n = entangled_vector(levels, n, 0).expect("level N");
    let p_plus = levels.projector(Block::Plus).expect("plus");
    let p_minus = levels.projector(Block::Minus).expect("minus");
    let mut h = &p_plus.scale_real(n1 * rates.plus.shift_minus)
        - &Operator::outer(&phi01, &phi01).scale_real(n1 * rates.plus.shift_plus);
    h = &h + &Operator::outer(&phi0n, &phi0n).scale_real(rates.minus.shift_minus);
    h = &h - &p_minus.scale_real(rates.minus.shift_plus);
    for k in 1..n {
        let r = &rates.middle[k - 1];
        h = &h + &t.abs_k(k).scale_real(r.shift_minus);
        h = &h - &levels.p_level(k + 1).scale_real(r.shift_plus);
    }
    h
}

/// `e^{𝓛̂ dt}` with a fixed step, applied to vectorised states.
#[derive(Clone, Debug)]
pub struct Propagator {
    pub dt: f64,
    pub matrix: Operator,
}

impl Propagator {
    pub fn step(&self, v: &Vector) -> Vector {
        self.matrix.apply(v)
    }
}

/// Immutable model; the superoperator is built lazily and at most once.
#[derive(Debug)]
pub struct GKSLModel {
    levels: LevelStructure,
    rates: RateSet,
    transport: Transport,
    kraus: Vec<KrausOperator>,
    hamiltonian: Operator,
    effective: Operator,
    /// `G = −i H_eff − ½ Σ L*L`, so that `𝓛(ρ) = Gρ + ρG* + Σ LρL*`.
    drift: Operator,
    superop: OnceLock<Operator>,
}

impl Clone for GKSLModel {
    fn clone(&self) -> Self {
        let superop = OnceLock::new();
        if let Some(s) = self.superop.get() {
            let _ = superop.set(s.clone());
        }
        Self {
            levels: self.levels.clone(),
            rates: self.rates.clone(),
            transport: self.transport.clone(),
            kraus: self.kraus.clone(),
            hamiltonian: self.hamiltonian.clone(),
            effective: self.effective.clone(),
            drift: self.drift.clone(),
            superop,
        }
    }
}

impl GKSLModel {
    pub fn new(levels: LevelStructure, rates: RateSet) -> Result<Self> {
        rates.validate(&levels)?;
        let transport = Transport::new(&levels);
        let kraus = kraus_operators(&levels, &rates);
        let hamiltonian = reference_hamiltonian(&levels);
        let effective = effective_hamiltonian(&levels, &rates);
        let d = levels.total_dim();
        let mut dissip = Operator::zeros(d, d);
        for l in &kraus {
            dissip = &dissip + &(&l.op.adjoint() * &l.op);
        }
        let drift = &effective.scale(-I) - &dissip.scale_real(0.5);
        Ok(Self {
            levels,
            rates,
            transport,
            kraus,
            hamiltonian,
            effective,
            drift,
            superop: OnceLock::new(),
        })
    }

    pub fn thermal(levels: LevelStructure, beta: f64) -> Result<Self> {
        let rates = RateSet::thermal(&levels, beta);
        Self::new(levels, rates)
    }

    pub fn levels(&self) -> &LevelStructure {
        &self.levels
    }

    pub fn rates(&self) -> &RateSet {
        &self.rates
    }

    pub fn transport(&self) -> &Transport {
        &self.transport
    }

    pub fn kraus(&self) -> &[KrausOperator] {
        &self.kraus
    }

    pub fn hamiltonian(&self) -> &Operator {
        &self.hamiltonian
    }

    pub fn effective_hamiltonian(&self) -> &Operator {
        &self.effective
    }

    pub fn dim(&self) -> usize {
        self.levels.total_dim()
    }

    fn check_shape(&self, x: &Operator) -> Result<()> {
        let d = self.dim();
        if x.rows() != d || x.cols() != d {
            return Err(Error::Shape {
                expected: format!("{d}x{d}"),
                found: format!("{}x{}", x.rows(), x.cols()),
            });
        }
        Ok(())
    }

    /// `𝓛(ρ) = −i[H_eff, ρ] + Σ (LρL* − ½{L*L, ρ})`.
    pub fn generator(&self, rho: &Operator) -> Result<Operator> {
        self.check_shape(rho)?;
        let mut out = &(&self.drift * rho) + &(rho * &self.drift.adjoint());
        for l in &self.kraus {
            out = &out + &(&(&l.op * rho) * &l.op.adjoint());
        }
        Ok(out)
    }

    /// `𝓛*(x) = i[H_eff, x] + Σ (L*xL − ½{L*L, x})`.
    pub fn dual_generator(&self, x: &Operator) -> Result<Operator> {
        self.check_shape(x)?;
        let ga = self.drift.adjoint();
        let mut out = &(&ga * x) + &(x * &self.drift);
        for l in &self.kraus {
            out = &out + &(&(&l.op.adjoint() * x) * &l.op);
        }
        Ok(out)
    }

    fn guard(&self) -> Result<()> {
        if self.dim() > MAX_SUPEROPERATOR_DIM {
            return Err(Error::Size {
                dim: self.dim(),
                limit: MAX_SUPEROPERATOR_DIM,
            });
        }
        Ok(())
    }

    /// Column-stacking matrix of `𝓛`: `vec(𝓛(ρ)) = 𝓛̂ vec(ρ)` with
    /// `vec(AXB) = (Bᵀ ⊗ A) vec(X)`, hence
    /// `𝓛̂ = I ⊗ G + Ḡ ⊗ I + Σ L̄ ⊗ L`.
    pub fn lindbladian_matrix(&self) -> Result<&Operator> {
        self.guard()?;
        Ok(self.superop.get_or_init(|| {
            let d = self.dim();
            let id = Operator::identity(d);
            let mut s = &id.kron(&self.drift) + &self.drift.conjugate().kron(&id);
            for l in &self.kraus {
                if l.op.norm_max() == 0.0 {
                    continue;
                }
                s = &s + &l.op.conjugate().kron(&l.op);
            }
            s
        }))
    }

    /// Column-stacking matrix of `𝓛*`, the adjoint of [`Self::lindbladian_matrix`]
    /// under the Hilbert–Schmidt pairing.
    pub fn dual_lindbladian_matrix(&self) -> Result<Operator> {
        Ok(self.lindbladian_matrix()?.adjoint())
    }

    /// `exp(𝓛̂ dt)`.
    pub fn propagator(&self, dt: f64) -> Result<Propagator> {
        let s = self.lindbladian_matrix()?;
        Ok(Propagator {
            dt,
            matrix: expm(&s.scale_real(dt))?,
        })
    }

    /// Trajectory `ρ(t_j)`, `t_j = j t / steps`, from the exponential of the
    /// superoperator. Each snapshot is checked against the state invariants.
    pub fn evolve(&self, rho0: &State, t: f64, steps: usize) -> Result<Vec<State>> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::InvalidInput(format!("t must be finite and nonnegative, got {t}")));
        }
        if steps == 0 {
            return Err(Error::InvalidInput("steps must be positive".into()));
        }
        self.check_shape(rho0.operator())?;
        if t == 0.0 {
            return Ok(vec![rho0.clone()]);
        }
        let prop = self.propagator(t / steps as f64)?;
        self.evolve_with(&prop, rho0, steps)
    }

    /// Evolution with a precomputed propagator, `steps` applications.
    pub fn evolve_with(&self, prop: &Propagator, rho0: &State, steps: usize) -> Result<Vec<State>> {
        let d = self.dim();
        let mut out = Vec::with_capacity(steps + 1);
        out.push(rho0.clone());
        let mut v = rho0.operator().vectorize();
        for j in 1..=steps {
            v = prop.step(&v);
            let rho = Operator::unvectorize(&v, d)?;
            let state = State::new(rho, EVOLVE_TOL).map_err(|e| {
                Error::Tolerance(format!("snapshot {j} at t = {}: {e}", j as f64 * prop.dt))
            })?;
            out.push(state);
        }
        Ok(out)
    }

    /// Kernel of `𝓛̂`, returned as orthonormal vectorised matrices.
    pub fn stationary_kernel(&self) -> Result<Subspace> {
        let s = self.lindbladian_matrix()?;
        let (frame, _) = s.null_space(NULL_REL_TOL)?;
        let mut sub = Subspace::from_orthonormal(frame, "ker L")?;
        sub.labels = (0..sub.dim()).map(|i| format!("x{i}")).collect();
        Ok(sub)
    }

    /// Kernel of `𝓛` among operators `X = F Y F*` supported on the subspace
    /// with frame `F`. Returned as `D × D` matrices, orthonormal in the
    /// Hilbert–Schmidt inner product.
    pub fn stationary_kernel_on(&self, support: &Subspace) -> Result<Vec<Operator>> {
        let s = self.lindbladian_matrix()?;
        let f = &support.frame;
        let lift = f.conjugate().kron(f);
        let restricted = s * &lift;
        if restricted.cols() == 0 {
            return Ok(Vec::new());
        }
        let (null, _) = restricted.null_space(NULL_REL_TOL)?;
        let r = support.dim();
        let mut out = Vec::with_capacity(null.cols());
        for j in 0..null.cols() {
            let y = Operator::unvectorize(&null.column(j), r)?;
            out.push(&(f * &y) * &f.adjoint());
        }
        Ok(out)
    }

    /// Orthogonal-complement residual `‖vec ρ − Q Q* vec ρ‖_max` of `ρ`
    /// against the stationary kernel `Q`.
    pub fn kernel_distance(&self, kernel: &Subspace, rho: &Operator) -> f64 {
        let v = Operator::from_columns(rho.rows() * rho.cols(), &[rho.vectorize()]);
        let proj = &kernel.frame * &(&kernel.frame.adjoint() * &v);
        (&v - &proj).norm_max()
    }
}

/// Generator evaluated term by term in the reduced form valid for operators
/// supported on `Ω = {|−⟩, |+⟩, φ_{0_1}, φ_{0_N}}^⊥`:
/// `Σ_j (η_{−,j}|Z|_j − η_{+,j}P_{j+1})ρ + ρ(η̄_{−,j}|Z|_j − η̄_{+,j}P_{j+1})
///  + Γ_{−,j} Z_jρZ_j* + Γ_{+,j} Z_j*ρZ_j`,
/// `η_{−,j} = −(Γ_{−,j} + 2iγ_{−,j})/2`, `η_{+,j} = (Γ_{+,j} − 2iγ_{+,j})/2`.
pub fn reduced_generator_omega(model: &GKSLModel, rho: &Operator) -> Operator {
    let levels = model.levels();
    let t = model.transport();
    let d = levels.total_dim();
    let mut out = Operator::zeros(d, d);
    for j in 1..levels.n_levels() {
        let r = &model.rates().middle[j - 1];
        let eta_m = c64::new(-r.damping_minus / 2.0, -r.shift_minus);
        let eta_p = c64::new(r.damping_plus / 2.0, -r.shift_plus);
        let abs_j = t.abs_k(j);
        let p_next = levels.p_level(j + 1);
        let left = &abs_j.scale(eta_m) - &p_next.scale(eta_p);
        let right = &abs_j.scale(eta_m.conj()) - &p_next.scale(eta_p.conj());
        let zj = t.z_k(j);
        let zja = zj.adjoint();
        out = &out + &(&left * rho);
        out = &out + &(rho * &right);
        out = &out + &(&(&zj * rho) * &zja).scale_real(r.damping_minus);
        out = &out + &(&(&zja * rho) * &zj).scale_real(r.damping_plus);
    }
    out
}

/// Generator evaluated term by term in the reduced form valid for operators
/// supported on `Ω^⊥ = span{|−⟩, |+⟩, φ_{0_1}, φ_{0_N}}`.
pub fn reduced_generator_omega_perp(model: &GKSLModel, rho: &Operator) -> Operator {
    let levels = model.levels();
    let rates = model.rates();
    let t = model.transport();
    let n = levels.n_levels();
    let n1 = levels.dim_of(1) as f64;
    let d = levels.total_dim();
    let plus = levels.plus();
    let minus = levels.minus();
    let phi01 = entangled_vector(levels, 1, 0).expect("level 1");
    let phi0n = entangled_vector(levels, n, 0).expect("level N");
    let p_minus = Operator::outer(&minus, &minus);
    let p_plus = Operator::outer(&plus, &plus);
    let p01 = Operator::outer(&phi01, &phi01);
    let p0n = Operator::outer(&phi0n, &phi0n);

    let (g_m1, g_s1) = if n >= 2 {
        (rates.middle[0].damping_minus, rates.middle[0].shift_minus)
    } else {
        (0.0, 0.0)
    };
    let (g_pn, g_sn) = if n >= 2 {
        (rates.middle[n - 2].damping_plus, rates.middle[n - 2].shift_plus)
    } else {
        (0.0, 0.0)
    };
    let eta_minus = c64::new(0.0, rates.minus.shift_plus);
    let eta_plus = c64::new(-n1 * rates.plus.damping_minus / 2.0, -n1 * rates.plus.shift_minus);
    let eta_01 = c64::new(
        -(n1 * rates.plus.damping_plus + g_m1) / 2.0,
        n1 * rates.plus.shift_plus - g_s1,
    );
    let eta_0n = c64::new(
        -(g_pn + rates.minus.damping_minus) / 2.0,
        g_sn - rates.minus.shift_minus,
    );

    let sandwich = |a: &Operator, coef: f64| (&(a * rho) * &a.adjoint()).scale_real(coef);
    let mut out = Operator::zeros(d, d);
    out = &out + &p_minus.commutator(rho).scale(eta_minus);
    for (p, eta) in [(&p_plus, eta_plus), (&p01, eta_01), (&p0n, eta_0n)] {
        out = &out + &(p * rho).scale(eta);
        out = &out + &(rho * p).scale(eta.conj());
    }
    out = &out + &sandwich(&Operator::outer(&phi01, &plus), n1 * rates.plus.damping_minus);
    out = &out + &sandwich(&Operator::outer(&plus, &phi01), n1 * rates.plus.damping_plus);
    out = &out + &sandwich(&Operator::outer(&minus, &phi0n), rates.minus.damping_minus);
    if n >= 2 {
        out = &out + &sandwich(&t.z_k(1), g_m1);
        out = &out + &sandwich(&t.z_k(n - 1).adjoint(), g_pn);
    }
    out
}

/// `Ω^⊥ = span{|−⟩, |+⟩, φ_{0_1}, φ_{0_N}}`.
pub fn omega_perp_subspace(levels: &LevelStructure) -> Subspace {
    let n = levels.n_levels();
    let gens = vec![
        levels.minus(),
        levels.plus(),
        entangled_vector(levels, 1, 0).expect("level 1"),
        entangled_vector(levels, n, 0).expect("level N"),
    ];
    let labels = vec!["-".into(), "+".into(), "phi_0_1".into(), format!("phi_0_{n}")];
    Subspace::span_labeled(levels.total_dim(), &gens, &labels, "Omega_perp")
}

/// `Ω = {|−⟩, |+⟩, φ_{0_1}, φ_{0_N}}^⊥`.
pub fn omega_subspace(levels: &LevelStructure) -> Subspace {
    omega_perp_subspace(levels).complement("Omega")
}

/// `d/dt tr(p ρ)` at `ρ`, i.e. `tr(p 𝓛(ρ))`.
pub fn rate_of_change(model: &GKSLModel, p: &Operator, rho: &Operator) -> Result<f64> {
    Ok((p * &model.generator(rho)?).trace().re)
}

/// Unit-trace projection onto `|−⟩`.
pub fn ground_state(levels: &LevelStructure) -> State {
    State::pure(&levels.minus()).expect("valid pure state")
}

//! Level structure of the composite space `C|−⟩ ⊕ C|+⟩ ⊕ E_1 ⊕ … ⊕ E_N`.
//!
//! Canonical basis order: `|−⟩`, `|+⟩`, then `|a_k⟩` for `k = 1..N`
//! ascending, `a` ascending within each level.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{c64, Operator, Vector, ONE};

/// Relative tolerance under which two Bohr frequencies are considered equal.
const FREQ_REL_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelConfig {
    pub dims: Vec<usize>,
    pub energy_minus: f64,
    pub energy_plus: f64,
    pub energies: Vec<f64>,
}

/// Validated level graph. Levels are numbered `1..=N` as in the model.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelStructure {
    dims: Vec<usize>,
    energy_minus: f64,
    energy_plus: f64,
    energies: Vec<f64>,
    offsets: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BasisIndex {
    Minus,
    Plus,
    Level { k: usize, a: usize },
}

/// Blocks of the orthogonal decomposition of the space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Block {
    Minus,
    Plus,
    Level(usize),
}

/// Labels of the `N + 1` dissipative channels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BohrFrequency {
    Plus,
    /// `ω_k = ε_k − ε_{k+1}`, `1 ≤ k ≤ N−1`.
    Middle(usize),
    Minus,
}

impl std::fmt::Display for BohrFrequency {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BohrFrequency::Plus => write!(f, "omega_plus"),
            BohrFrequency::Middle(k) => write!(f, "omega_{k}"),
            BohrFrequency::Minus => write!(f, "omega_minus"),
        }
    }
}

impl LevelStructure {
    pub fn new(dims: &[usize], energy_minus: f64, energy_plus: f64, energies: &[f64]) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidInput("dims must be nonempty".into()));
        }
        if energies.len() != dims.len() {
            return Err(Error::Shape {
                expected: format!("{} energies", dims.len()),
                found: format!("{}", energies.len()),
            });
        }
        if let Some(k) = dims.iter().position(|&n| n == 0) {
            return Err(Error::InvalidInput(format!("n_{} must be positive", k + 1)));
        }
        for k in 1..dims.len() {
            if dims[k] > dims[k - 1] {
                return Err(Error::Monotonicity {
                    level: k,
                    next: k + 1,
                    dim: dims[k - 1],
                    next_dim: dims[k],
                });
            }
        }
        let all_finite = energy_minus.is_finite()
            && energy_plus.is_finite()
            && energies.iter().all(|e| e.is_finite());
        if !all_finite {
            return Err(Error::EnergyOrder("energies must be finite".into()));
        }
        let n = dims.len();
        if !(energy_plus > energies[0]) {
            return Err(Error::EnergyOrder(format!(
                "need eps_+ > eps_1, got {energy_plus} and {}",
                energies[0]
            )));
        }
        for k in 1..n {
            if !(energies[k - 1] > energies[k]) {
                return Err(Error::EnergyOrder(format!(
                    "need eps_{} > eps_{}, got {} and {}",
                    k,
                    k + 1,
                    energies[k - 1],
                    energies[k]
                )));
            }
        }
        if !(energies[n - 1] > energy_minus) {
            return Err(Error::EnergyOrder(format!(
                "need eps_{n} > eps_-, got {} and {energy_minus}",
                energies[n - 1]
            )));
        }
        let mut offsets = Vec::with_capacity(n);
        let mut acc = 2;
        for &d in dims {
            offsets.push(acc);
            acc += d;
        }
        let levels = Self {
            dims: dims.to_vec(),
            energy_minus,
            energy_plus,
            energies: energies.to_vec(),
            offsets,
        };
        let freqs = levels.bohr_frequencies();
        for i in 0..freqs.len() {
            for j in i + 1..freqs.len() {
                let (a, b) = (freqs[i].1, freqs[j].1);
                if (a - b).abs() <= FREQ_REL_TOL * a.abs().max(b.abs()) {
                    return Err(Error::FrequencyClash {
                        first: freqs[i].0.to_string(),
                        second: freqs[j].0.to_string(),
                        value: a,
                    });
                }
            }
        }
        Ok(levels)
    }

    pub fn from_config(cfg: &LevelConfig) -> Result<Self> {
        Self::new(&cfg.dims, cfg.energy_minus, cfg.energy_plus, &cfg.energies)
    }

    pub fn to_config(&self) -> LevelConfig {
        LevelConfig {
            dims: self.dims.clone(),
            energy_minus: self.energy_minus,
            energy_plus: self.energy_plus,
            energies: self.energies.clone(),
        }
    }

    /// Energies `ε_k = N + 1 − k − k²/100`, so that `ω_k = 1 + (2k + 1)/100`
    /// exceed 1 and are pairwise distinct, with `ω_+ = 0.77` and `ω_− = 0.63`.
    pub fn with_default_energies(dims: &[usize]) -> Result<Self> {
        let n = dims.len();
        let energies: Vec<f64> = (1..=n)
            .map(|k| (n + 1 - k) as f64 - 0.01 * (k * k) as f64)
            .collect();
        let e_plus = energies[0] + 0.77;
        let e_minus = energies[n - 1] - 0.63;
        Self::new(dims, e_minus, e_plus, &energies)
    }

    /// Number of middle levels.
    pub fn n_levels(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// `n_k`, with `k` counted from 1.
    pub fn dim_of(&self, k: usize) -> usize {
        self.dims[k - 1]
    }

    pub fn energy_minus(&self) -> f64 {
        self.energy_minus
    }

    pub fn energy_plus(&self) -> f64 {
        self.energy_plus
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// `ε_k`, with `k` counted from 1.
    pub fn energy(&self, k: usize) -> f64 {
        self.energies[k - 1]
    }

    /// Total dimension `D = 2 + Σ n_k`.
    pub fn total_dim(&self) -> usize {
        2 + self.dims.iter().sum::<usize>()
    }

    /// Offset of `|0_k⟩` in the canonical basis.
    pub fn offset(&self, k: usize) -> usize {
        self.offsets[k - 1]
    }

    pub fn frequency(&self, w: BohrFrequency) -> f64 {
        let n = self.n_levels();
        match w {
            BohrFrequency::Plus => self.energy_plus - self.energies[0],
            BohrFrequency::Middle(k) => self.energies[k - 1] - self.energies[k],
            BohrFrequency::Minus => self.energies[n - 1] - self.energy_minus,
        }
    }

    /// The channels in the order `ω_+, ω_1, …, ω_{N−1}, ω_−`.
    pub fn channels(&self) -> Vec<BohrFrequency> {
        let mut out = vec![BohrFrequency::Plus];
        out.extend((1..self.n_levels()).map(BohrFrequency::Middle));
        out.push(BohrFrequency::Minus);
        out
    }

    pub fn bohr_frequencies(&self) -> Vec<(BohrFrequency, f64)> {
        self.channels().into_iter().map(|w| (w, self.frequency(w))).collect()
    }

    pub fn check_level(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.n_levels() {
            Err(Error::Index(format!("level {k} outside 1..={}", self.n_levels())))
        } else {
            Ok(())
        }
    }

    pub fn linear_index(&self, b: BasisIndex) -> Result<usize> {
        match b {
            BasisIndex::Minus => Ok(0),
            BasisIndex::Plus => Ok(1),
            BasisIndex::Level { k, a } => {
                self.check_level(k)?;
                if a >= self.dim_of(k) {
                    return Err(Error::Index(format!(
                        "a = {a} outside 0..{} on level {k}",
                        self.dim_of(k)
                    )));
                }
                Ok(self.offset(k) + a)
            }
        }
    }

    /// Inverse of [`LevelStructure::linear_index`].
    pub fn basis_index(&self, i: usize) -> Result<BasisIndex> {
        match i {
            0 => Ok(BasisIndex::Minus),
            1 => Ok(BasisIndex::Plus),
            _ if i < self.total_dim() => {
                let k = self.offsets.iter().rposition(|&o| o <= i).expect("offset") + 1;
                Ok(BasisIndex::Level { k, a: i - self.offset(k) })
            }
            _ => Err(Error::Index(format!("index {i} outside 0..{}", self.total_dim()))),
        }
    }

    pub fn basis_vector(&self, b: BasisIndex) -> Result<Vector> {
        let i = self.linear_index(b)?;
        let mut v = Vector::zeros(self.total_dim());
        v[i] = ONE;
        Ok(v)
    }

    /// `|−⟩`
    pub fn minus(&self) -> Vector {
        self.basis_vector(BasisIndex::Minus).expect("minus")
    }

    /// `|+⟩`
    pub fn plus(&self) -> Vector {
        self.basis_vector(BasisIndex::Plus).expect("plus")
    }

    /// `|a_k⟩`
    pub fn ket(&self, k: usize, a: usize) -> Result<Vector> {
        self.basis_vector(BasisIndex::Level { k, a })
    }

    /// Canonical-basis range `offset .. offset + size` of a block.
    pub fn block_range(&self, which: Block) -> Result<std::ops::Range<usize>> {
        match which {
            Block::Minus => Ok(0..1),
            Block::Plus => Ok(1..2),
            Block::Level(k) => {
                self.check_level(k)?;
                Ok(self.offset(k)..self.offset(k) + self.dim_of(k))
            }
        }
    }

    /// Orthogonal projection onto a block.
    pub fn projector(&self, which: Block) -> Result<Operator> {
        let range = self.block_range(which)?;
        let d = self.total_dim();
        let mut p = Operator::zeros(d, d);
        for i in range {
            p.set(i, i, ONE);
        }
        Ok(p)
    }

    /// `P_k`, panicking on an invalid level.
    pub fn p_level(&self, k: usize) -> Operator {
        self.projector(Block::Level(k)).expect("level in range")
    }

    /// Every block in basis order.
    pub fn blocks(&self) -> Vec<Block> {
        let mut out = vec![Block::Minus, Block::Plus];
        out.extend((1..=self.n_levels()).map(Block::Level));
        out
    }

    /// Embed an `n_{k'} × n_k` block mapping level `k` into level `k'`.
    pub fn embed(&self, k_to: usize, k_from: usize, block: &Operator) -> Result<Operator> {
        self.check_level(k_to)?;
        self.check_level(k_from)?;
        if block.rows() != self.dim_of(k_to) || block.cols() != self.dim_of(k_from) {
            return Err(Error::Shape {
                expected: format!("{}x{}", self.dim_of(k_to), self.dim_of(k_from)),
                found: format!("{}x{}", block.rows(), block.cols()),
            });
        }
        let d = self.total_dim();
        let mut out = Operator::zeros(d, d);
        out.place(self.offset(k_to), self.offset(k_from), block);
        Ok(out)
    }

    /// Embed a level-local vector in the full space.
    pub fn embed_vector(&self, k: usize, local: &[c64]) -> Result<Vector> {
        self.check_level(k)?;
        if local.len() != self.dim_of(k) {
            return Err(Error::Shape {
                expected: format!("{} entries", self.dim_of(k)),
                found: format!("{}", local.len()),
            });
        }
        let mut v = Vector::zeros(self.total_dim());
        for (a, &x) in local.iter().enumerate() {
            v[self.offset(k) + a] = x;
        }
        Ok(v)
    }
}

/// Density matrix on the full space.
#[derive(Clone, Debug)]
pub struct State {
    rho: Operator,
}

/// Default tolerance for [`State`] validation.
pub const STATE_TOL: f64 = 1e-9;

impl State {
    /// Validate Hermiticity, positivity and unit trace within `tol`.
    pub fn new(rho: Operator, tol: f64) -> Result<Self> {
        if !rho.is_square() {
            return Err(Error::Shape {
                expected: "square density matrix".into(),
                found: format!("{}x{}", rho.rows(), rho.cols()),
            });
        }
        if !rho.all_finite() {
            return Err(Error::InvalidState("non-finite entries".into()));
        }
        let herm = rho.max_abs_diff(&rho.adjoint());
        if herm > tol {
            return Err(Error::InvalidState(format!("not Hermitian (residual {herm:e})")));
        }
        let tr = rho.trace();
        if (tr - ONE).norm() > tol {
            return Err(Error::InvalidState(format!("trace {} + {}i differs from 1", tr.re, tr.im)));
        }
        let min = rho.hermitian_part().eigenvalues_hermitian()?[0];
        if min < -tol {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { rho })
    }

    /// Pure state `|ψ⟩⟨ψ|/⟨ψ,ψ⟩`.
    pub fn pure(psi: &Vector) -> Result<Self> {
        if crate::operator::norm(psi) == 0.0 {
            return Err(Error::ZeroState);
        }
        Self::new(Operator::projection_onto(psi), STATE_TOL)
    }

    /// `p / tr p` for a nonzero positive operator.
    pub fn normalized(p: &Operator) -> Result<Self> {
        let tr = p.trace().re;
        if tr.abs() <= f64::MIN_POSITIVE {
            return Err(Error::ZeroState);
        }
        Self::new(p.scale_real(1.0 / tr), STATE_TOL)
    }

    pub fn operator(&self) -> &Operator {
        &self.rho
    }

    pub fn into_operator(self) -> Operator {
        self.rho
    }

    pub fn dim(&self) -> usize {
        self.rho.rows()
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.rho.hermitian_part().eigenvalues_hermitian()?[0])
    }

    /// Numerical rank: eigenvalues above `tol`.
    pub fn rank(&self, tol: f64) -> Result<usize> {
        Ok(self
            .rho
            .hermitian_part()
            .eigenvalues_hermitian()?
            .iter()
            .filter(|&&x| x > tol)
            .count())
    }
}

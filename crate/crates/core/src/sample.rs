//! Seeded random level structures, rates and states for property suites.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::gksl::{ChannelRates, GKSLModel, RateSet};
use crate::hilbert::{LevelStructure, State};
use crate::operator::{c64, norm, scale_vector, Operator, Vector};
use crate::subspace::Subspace;

/// Ranges for random level structures.
#[derive(Clone, Copy, Debug)]
pub struct LevelRanges {
    pub min_levels: usize,
    pub max_levels: usize,
    pub max_dim: usize,
}

impl Default for LevelRanges {
    fn default() -> Self {
        Self {
            min_levels: 1,
            max_levels: 5,
            max_dim: 6,
        }
    }
}

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Nonincreasing dims in `1..=max_dim`.
    pub fn dims(&mut self, ranges: LevelRanges) -> Vec<usize> {
        let n = self.rng.gen_range(ranges.min_levels..=ranges.max_levels);
        let mut dims: Vec<usize> = (0..n).map(|_| self.rng.gen_range(1..=ranges.max_dim)).collect();
        dims.sort_unstable_by(|a, b| b.cmp(a));
        dims
    }

    pub fn levels(&mut self, ranges: LevelRanges) -> LevelStructure {
        let dims = self.dims(ranges);
        LevelStructure::with_default_energies(&dims).expect("default energies are valid")
    }

    fn channel(&mut self) -> ChannelRates {
        ChannelRates::new(
            self.rng.gen_range(0.1..2.0),
            self.rng.gen_range(0.1..2.0),
            self.rng.gen_range(-1.0..1.0),
            self.rng.gen_range(-1.0..1.0),
        )
    }

    /// Strictly positive dampings and arbitrary shifts; `Γ_{+,ω_−} = 0`.
    pub fn rates(&mut self, levels: &LevelStructure) -> RateSet {
        let plus = self.channel();
        let middle = (1..levels.n_levels()).map(|_| self.channel()).collect();
        let mut minus = self.channel();
        minus.damping_plus = 0.0;
        RateSet { plus, middle, minus }
    }

    pub fn model(&mut self, ranges: LevelRanges) -> Result<GKSLModel> {
        let levels = self.levels(ranges);
        let rates = self.rates(&levels);
        GKSLModel::new(levels, rates)
    }

    pub fn gaussian(&mut self) -> c64 {
        c64::new(self.rng.sample(StandardNormal), self.rng.sample(StandardNormal))
    }

    pub fn vector(&mut self, d: usize) -> Vector {
        Vector::from_fn(d, |_| self.gaussian())
    }

    /// Unit vector, uniformly distributed on the sphere.
    pub fn unit_vector(&mut self, d: usize) -> Vector {
        let v = self.vector(d);
        scale_vector(&v, c64::new(1.0 / norm(&v), 0.0))
    }

    /// Uniformly distributed unit vector of a subspace.
    pub fn unit_vector_in(&mut self, sub: &Subspace) -> Vector {
        let coords = self.vector(sub.dim());
        let v = sub.frame.apply(&coords);
        scale_vector(&v, c64::new(1.0 / norm(&v), 0.0))
    }

    pub fn pure_state(&mut self, d: usize) -> State {
        State::pure(&self.unit_vector(d)).expect("unit vector")
    }

    pub fn matrix(&mut self, rows: usize, cols: usize) -> Operator {
        Operator::from_fn(rows, cols, |_, _| self.gaussian())
    }

    pub fn hermitian(&mut self, d: usize) -> Operator {
        self.matrix(d, d).hermitian_part()
    }

    /// Full-rank density matrix `GG*/tr(GG*)` with Gaussian `G`.
    pub fn density(&mut self, d: usize) -> State {
        let g = self.matrix(d, d);
        State::normalized(&(&g * &g.adjoint())).expect("positive definite")
    }

    /// Density matrix supported on `sub`.
    pub fn density_on(&mut self, sub: &Subspace) -> State {
        let r = sub.dim();
        let g = self.matrix(r, r);
        let inner = &g * &g.adjoint();
        State::normalized(&(&(&sub.frame * &inner) * &sub.frame.adjoint())).expect("positive")
    }
}

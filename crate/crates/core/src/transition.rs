//! Discrete Fourier transforms, transition operators between levels and the
//! transport operator `Z = ⊕_k Z_{k,k+1}`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::LevelStructure;
use crate::operator::{c64, Operator, Vector, ZERO};
use crate::subspace::Subspace;

/// `ζ_n^p = exp(2πi p / n)`, reducing `p` mod `n` first.
pub fn zeta_pow(n: usize, p: i64) -> c64 {
    let r = p.rem_euclid(n as i64);
    if r == 0 {
        return c64::new(1.0, 0.0);
    }
    let theta = 2.0 * PI * r as f64 / n as f64;
    c64::new(theta.cos(), theta.sin())
}

/// The `n × n` discrete Fourier transform, entry `(a', a) = ζ^{a a'} / √n`.
pub fn dft(n: usize) -> Operator {
    assert!(n >= 1, "dft needs n >= 1");
    let s = 1.0 / (n as f64).sqrt();
    Operator::from_fn(n, n, |r, c| zeta_pow(n, (r * c) as i64) * s)
}

/// `Σ_{a<n} ζ_n^{j a}`, by direct summation.
pub fn roots_of_unity_sum(n: usize, j: u64) -> c64 {
    assert!(n >= 1, "roots_of_unity_sum needs n >= 1");
    (0..n).map(|a| zeta_pow(n, ((j % n as u64) * a as u64) as i64)).sum()
}

/// Level-local block of `Z_{k,k'}`: an `n_{k'} × n_k` matrix with entry
/// `(b, a) = ζ_k^{b a} / √n_k`.
pub fn transition_block(n_from: usize, n_to: usize) -> Operator {
    let s = 1.0 / (n_from as f64).sqrt();
    Operator::from_fn(n_to, n_from, |b, a| zeta_pow(n_from, (b * a) as i64) * s)
}

/// `Z_{k,k'}` embedded in the full space. For `k = k'` this is `F_k`.
pub fn transition_operator(levels: &LevelStructure, k: usize, k_to: usize) -> Result<Operator> {
    levels.check_level(k)?;
    levels.check_level(k_to)?;
    let block = transition_block(levels.dim_of(k), levels.dim_of(k_to));
    levels.embed(k_to, k, &block)
}

/// `F_k` embedded in the full space.
pub fn embedded_dft(levels: &LevelStructure, k: usize) -> Result<Operator> {
    levels.check_level(k)?;
    levels.embed(k, k, &dft(levels.dim_of(k)))
}

/// Entries of `φ_{a_k} = (1/√n) Σ_b ζ^{−b a} |b_k⟩` on level `k`.
pub fn entangled_local(n: usize, a: usize) -> Vec<c64> {
    let s = 1.0 / (n as f64).sqrt();
    (0..n).map(|b| zeta_pow(n, -((b * a) as i64)) * s).collect()
}

/// `φ_{a_k}` in the full space.
pub fn entangled_vector(levels: &LevelStructure, k: usize, a: usize) -> Result<Vector> {
    levels.check_level(k)?;
    let n = levels.dim_of(k);
    if a >= n {
        return Err(Error::Index(format!("a = {a} outside 0..{n} on level {k}")));
    }
    levels.embed_vector(k, &entangled_local(n, a))
}

/// The `k`-entangled basis `{φ_{a_k}}_{a < n_k}`.
#[derive(Clone, Debug)]
pub struct EntangledBasis {
    pub level: usize,
    pub vectors: Vec<Vector>,
}

impl EntangledBasis {
    pub fn as_subspace(&self, ambient: usize) -> Subspace {
        let frame = Operator::from_columns(ambient, &self.vectors);
        let mut s = Subspace::from_orthonormal(frame, format!("E_{}", self.level))
            .expect("entangled basis is orthonormal");
        s.labels = (0..self.vectors.len())
            .map(|a| format!("phi_{a}_{}", self.level))
            .collect();
        s
    }
}

pub fn entangled_basis(levels: &LevelStructure, k: usize) -> Result<EntangledBasis> {
    levels.check_level(k)?;
    let vectors = (0..levels.dim_of(k))
        .map(|a| entangled_vector(levels, k, a))
        .collect::<Result<_>>()?;
    Ok(EntangledBasis { level: k, vectors })
}

/// `Z = ⊕_{k=1}^{N−1} Z_{k,k+1}`; the zero operator when `N = 1`.
pub fn transport_operator(levels: &LevelStructure) -> Operator {
    let d = levels.total_dim();
    let mut z = Operator::zeros(d, d);
    for k in 1..levels.n_levels() {
        let block = transition_block(levels.dim_of(k), levels.dim_of(k + 1));
        z.place(levels.offset(k + 1), levels.offset(k), &block);
    }
    z
}

/// `(|Z|, |Z|^⊥)` with `|Z| = Z*Z` and `|Z|^⊥ = P − |Z|`, `P = ⊕_{k<N} P_k`.
pub fn transport_absolute(levels: &LevelStructure) -> (Operator, Operator) {
    let z = transport_operator(levels);
    let abs = &z.adjoint() * &z;
    let d = levels.total_dim();
    let mut p = Operator::zeros(d, d);
    for k in 1..levels.n_levels() {
        p = &p + &levels.p_level(k);
    }
    let perp = &p - &abs;
    (abs, perp)
}

/// `ker Z = ⊕_k span{φ_{a_k} : n_{k+1} ≤ a < n_k}`.
pub fn kernel_basis(levels: &LevelStructure) -> Subspace {
    let mut gens = Vec::new();
    let mut labels = Vec::new();
    for k in 1..levels.n_levels() {
        for a in levels.dim_of(k + 1)..levels.dim_of(k) {
            gens.push(entangled_vector(levels, k, a).expect("index in range"));
            labels.push(format!("phi_{a}_{k}"));
        }
    }
    Subspace::span_labeled(levels.total_dim(), &gens, &labels, "ker Z")
}

/// Canonical or entangled basis vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasisLabel {
    Canonical { level: usize, index: usize },
    Entangled { level: usize, index: usize },
}

impl BasisLabel {
    pub fn vector(&self, levels: &LevelStructure) -> Result<Vector> {
        match *self {
            BasisLabel::Canonical { level, index } => levels.ket(level, index),
            BasisLabel::Entangled { level, index } => entangled_vector(levels, level, index),
        }
    }
}

/// Closed-form image of `|0_k⟩` under `Z^p`:
/// `Z^{2m−1}|0_k⟩ = c·φ_{0_{k+2m−1}}`, `Z^{2m}|0_k⟩ = c·|0_{k+2m}⟩`, with
/// `c = Π_{j<m} (n_{k+2j+1} / n_{k+2j})^{1/2}`.
pub fn transport_power_on_zero(
    levels: &LevelStructure,
    k: usize,
    power: usize,
) -> Result<(f64, BasisLabel)> {
    levels.check_level(k)?;
    let n = levels.n_levels();
    if power == 0 || k + power > n {
        return Err(Error::Range(format!(
            "power {power} from level {k} leaves the ladder 1..={n}"
        )));
    }
    let m = power.div_ceil(2);
    let coefficient = (0..m)
        .map(|j| (levels.dim_of(k + 2 * j + 1) as f64 / levels.dim_of(k + 2 * j) as f64).sqrt())
        .product();
    let level = k + power;
    let target = if power % 2 == 1 {
        BasisLabel::Entangled { level, index: 0 }
    } else {
        BasisLabel::Canonical { level, index: 0 }
    };
    Ok((coefficient, target))
}

/// Transport operator with its adjoint and absolute value precomputed.
#[derive(Clone, Debug)]
pub struct Transport {
    pub z: Operator,
    pub z_adj: Operator,
    pub abs: Operator,
    pub abs_perp: Operator,
    projectors: Vec<Operator>,
}

impl Transport {
    pub fn new(levels: &LevelStructure) -> Self {
        let z = transport_operator(levels);
        let z_adj = z.adjoint();
        let (abs, abs_perp) = transport_absolute(levels);
        let projectors = (1..=levels.n_levels()).map(|k| levels.p_level(k)).collect();
        Self {
            z,
            z_adj,
            abs,
            abs_perp,
            projectors,
        }
    }

    fn p(&self, k: usize) -> &Operator {
        &self.projectors[k - 1]
    }

    /// `Z_k = Z P_k`.
    pub fn z_k(&self, k: usize) -> Operator {
        &self.z * self.p(k)
    }

    /// `|Z|_k = |Z| P_k`.
    pub fn abs_k(&self, k: usize) -> Operator {
        &self.abs * self.p(k)
    }

    /// `|Z|_k^⊥ = |Z|^⊥ P_k`.
    pub fn abs_perp_k(&self, k: usize) -> Operator {
        &self.abs_perp * self.p(k)
    }

    /// `Z^n v`.
    pub fn apply_power(&self, v: &Vector, n: usize) -> Vector {
        let mut out = v.clone();
        for _ in 0..n {
            out = self.z.apply(&out);
        }
        out
    }

    /// `Z*^n v`.
    pub fn apply_adjoint_power(&self, v: &Vector, n: usize) -> Vector {
        let mut out = v.clone();
        for _ in 0..n {
            out = self.z_adj.apply(&out);
        }
        out
    }
}

/// Closed forms used to cross-check the operator algebra by direct summation.
pub mod closed_form {
    use super::*;

    /// `P_k − Z*_{k,k'}Z_{k,k'}` on level `k`:
    /// entry `(a', a) = (1/n_k) Σ_{b=n_{k'}}^{n_k−1} ζ_k^{b(a−a')}`.
    pub fn complement_block(n_from: usize, n_to: usize) -> Operator {
        let n = n_from;
        Operator::from_fn(n, n, |ap, a| {
            let mut s = ZERO;
            for b in n_to..n {
                s += zeta_pow(n, b as i64 * (a as i64 - ap as i64));
            }
            s / n as f64
        })
    }

    /// `Z_{k,k'}F_k^* = Σ_{a<n_{k'}} |a_{k'}⟩⟨a_k|` as an `n_{k'} × n_k` block.
    pub fn transition_times_inverse_dft(n_from: usize, n_to: usize) -> Operator {
        Operator::from_fn(n_to, n_from, |r, c| {
            if r == c {
                c64::new(1.0, 0.0)
            } else {
                ZERO
            }
        })
    }

    /// `Z_{k,k'}|a_k⟩ = (1/√n_k) Σ_{a'<n_{k'}} ζ_k^{a'a}|a'_{k'}⟩` as level-`k'` entries.
    pub fn transition_on_basis(n_from: usize, n_to: usize, a: usize) -> Vec<c64> {
        let s = 1.0 / (n_from as f64).sqrt();
        (0..n_to).map(|ap| zeta_pow(n_from, (ap * a) as i64) * s).collect()
    }

    /// `Z_{k',k''}Z_{k,k'}|a_k⟩ =
    /// (n_k n_{k'})^{−1/2} Σ_{b<n_{k''}} Σ_{a'<n_{k'}} ζ_k^{a'a} ζ_{k'}^{b a'} |b_{k''}⟩`.
    pub fn two_step_on_basis(n_k: usize, n_k1: usize, n_k2: usize, a: usize) -> Vec<c64> {
        let s = 1.0 / ((n_k * n_k1) as f64).sqrt();
        (0..n_k2)
            .map(|b| {
                let mut acc = ZERO;
                for ap in 0..n_k1 {
                    acc += zeta_pow(n_k, (ap * a) as i64) * zeta_pow(n_k1, (b * ap) as i64);
                }
                acc * s
            })
            .collect()
    }

    /// `|Z| = ⊕_k Σ_{b < n_{k+1}} |φ_{b_k}⟩⟨φ_{b_k}|` in the full space.
    pub fn absolute_from_entangled(levels: &LevelStructure) -> Operator {
        let d = levels.total_dim();
        let mut out = Operator::zeros(d, d);
        for k in 1..levels.n_levels() {
            for b in 0..levels.dim_of(k + 1) {
                let phi = entangled_vector(levels, k, b).expect("index in range");
                out = &out + &Operator::outer(&phi, &phi);
            }
        }
        out
    }

    /// `|Z|^⊥ = ⊕_k Σ_{n_{k+1} ≤ b < n_k} |φ_{b_k}⟩⟨φ_{b_k}|` in the full space.
    pub fn absolute_perp_from_entangled(levels: &LevelStructure) -> Operator {
        let d = levels.total_dim();
        let mut out = Operator::zeros(d, d);
        for k in 1..levels.n_levels() {
            for b in levels.dim_of(k + 1)..levels.dim_of(k) {
                let phi = entangled_vector(levels, k, b).expect("index in range");
                out = &out + &Operator::outer(&phi, &phi);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::Block;
    use crate::operator::{scale_vector, vector_max_abs_diff};
    use proptest::prelude::*;

    const TOL: f64 = 1e-12;

    fn structure(dims: &[usize]) -> LevelStructure {
        LevelStructure::with_default_energies(dims).unwrap()
    }

    fn c(re: f64, im: f64) -> c64 {
        c64::new(re, im)
    }

    #[test]
    fn dft_small_cases() {
        assert!(dft(1).approx_eq(&Operator::identity(1), 0.0));
        let h = 1.0 / 2f64.sqrt();
        let want = Operator::from_fn(2, 2, |i, j| if i == 1 && j == 1 { c(-h, 0.0) } else { c(h, 0.0) });
        assert!(dft(2).max_abs_diff(&want) < TOL);
        // entry (a'=2, a=1) of F_3 is ζ_3² / √3 = (−1/2 − i√3/2)/√3
        let z = dft(3).get(2, 1);
        let r3 = 3f64.sqrt();
        assert!((z - c(-0.5, -r3 / 2.0) / r3).norm() < TOL);
    }

    #[test]
    fn dft_is_unitary_and_con_involutory() {
        for n in 1..=9 {
            let f = dft(n);
            let id = Operator::identity(n);
            assert!((&f * &f.adjoint()).max_abs_diff(&id) < TOL);
            assert!((&f * &f.conjugate()).max_abs_diff(&id) < TOL);
        }
    }

    #[test]
    fn roots_of_unity_examples() {
        assert!((roots_of_unity_sum(4, 0) - c(4.0, 0.0)).norm() < TOL);
        assert!(roots_of_unity_sum(4, 2).norm() < TOL);
        assert!((roots_of_unity_sum(3, 6) - c(3.0, 0.0)).norm() < TOL);
        for n in 1..=7 {
            for j in 0..(3 * n as u64) {
                let want = if j % n as u64 == 0 { n as f64 } else { 0.0 };
                assert!((roots_of_unity_sum(n, j) - c(want, 0.0)).norm() < TOL);
            }
        }
    }

    #[test]
    fn transition_examples() {
        let l = structure(&[2, 1]);
        let z12 = transition_operator(&l, 1, 2).unwrap();
        let h = 1.0 / 2f64.sqrt();
        // maps E_1 (indices 2, 3) to E_2 (index 4)
        assert!((z12.get(4, 2) - c(h, 0.0)).norm() < TOL);
        assert!((z12.get(4, 3) - c(h, 0.0)).norm() < TOL);
        assert!((z12.norm_frobenius() - 1.0).abs() < TOL);
        assert!((&z12 * &z12).norm_max() < TOL);
        let f1 = transition_operator(&l, 1, 1).unwrap();
        assert!(f1.max_abs_diff(&embedded_dft(&l, 1).unwrap()) < TOL);
        assert!(matches!(transition_operator(&l, 1, 3), Err(Error::Index(_))));
    }

    #[test]
    fn entangled_examples() {
        let l = structure(&[2, 1]);
        assert!(vector_max_abs_diff(&entangled_vector(&l, 2, 0).unwrap(), &l.ket(2, 0).unwrap()) < TOL);
        let phi11 = entangled_vector(&l, 1, 1).unwrap();
        let want = scale_vector(&(&l.ket(1, 0).unwrap() - &l.ket(1, 1).unwrap()), c(1.0 / 2f64.sqrt(), 0.0));
        assert!(vector_max_abs_diff(&phi11, &want) < TOL);
        let l = structure(&[5, 3]);
        let f = embedded_dft(&l, 1).unwrap();
        for a in 0..5 {
            let img = f.apply(&entangled_vector(&l, 1, a).unwrap());
            assert!(vector_max_abs_diff(&img, &l.ket(1, a).unwrap()) < TOL);
        }
        assert!(matches!(entangled_vector(&l, 2, 3), Err(Error::Index(_))));
    }

    #[test]
    fn transport_examples() {
        let l = structure(&[2, 1]);
        let z = transport_operator(&l);
        let phi01 = entangled_vector(&l, 1, 0).unwrap();
        assert!(vector_max_abs_diff(&z.apply(&phi01), &l.ket(2, 0).unwrap()) < TOL);
        let img = z.apply(&l.ket(1, 0).unwrap());
        let want = scale_vector(&entangled_vector(&l, 2, 0).unwrap(), c(0.5f64.sqrt(), 0.0));
        assert!(vector_max_abs_diff(&img, &want) < TOL);
        let single = structure(&[3]);
        assert_eq!(transport_operator(&single).norm_max(), 0.0);
    }

    #[test]
    fn absolute_value_examples() {
        let l = structure(&[2, 1]);
        let (abs, perp) = transport_absolute(&l);
        let phi0 = entangled_vector(&l, 1, 0).unwrap();
        let phi1 = entangled_vector(&l, 1, 1).unwrap();
        assert!(abs.max_abs_diff(&Operator::outer(&phi0, &phi0)) < TOL);
        assert!(perp.max_abs_diff(&Operator::outer(&phi1, &phi1)) < TOL);
        let l = structure(&[4, 4]);
        let (abs, perp) = transport_absolute(&l);
        assert!(abs.max_abs_diff(&l.p_level(1)) < TOL);
        assert!(perp.norm_max() < TOL);
    }

    #[test]
    fn kernel_examples() {
        let l = structure(&[2, 1]);
        let ker = kernel_basis(&l);
        assert_eq!(ker.dim(), 1);
        assert!(ker.same_as(&Subspace::span(5, &[entangled_vector(&l, 1, 1).unwrap()], "x")));
        assert_eq!(kernel_basis(&structure(&[3, 3])).dim(), 0);
        let l = structure(&[3, 2, 1]);
        let ker = kernel_basis(&l);
        let want = Subspace::span(
            l.total_dim(),
            &[entangled_vector(&l, 1, 2).unwrap(), entangled_vector(&l, 2, 1).unwrap()],
            "x",
        );
        assert!(ker.same_as(&want));
        assert!((&transport_operator(&l) * &ker.frame).norm_max() < TOL);
    }

    #[test]
    fn power_examples() {
        let l = structure(&[2, 1, 1]);
        let (c1, t1) = transport_power_on_zero(&l, 1, 1).unwrap();
        assert!((c1 - 0.5f64.sqrt()).abs() < TOL);
        assert_eq!(t1, BasisLabel::Entangled { level: 2, index: 0 });
        let (c2, t2) = transport_power_on_zero(&l, 1, 2).unwrap();
        assert!((c2 - 0.5f64.sqrt()).abs() < TOL);
        assert_eq!(t2, BasisLabel::Canonical { level: 3, index: 0 });
        assert!(matches!(transport_power_on_zero(&l, 1, 3), Err(Error::Range(_))));
        assert!(matches!(transport_power_on_zero(&l, 2, 2), Err(Error::Range(_))));
        assert!(matches!(transport_power_on_zero(&l, 1, 0), Err(Error::Range(_))));
        let eq = structure(&[3, 3, 3, 3]);
        for p in 1..=3 {
            assert!((transport_power_on_zero(&eq, 1, p).unwrap().0 - 1.0).abs() < TOL);
        }
    }

    #[test]
    fn entangled_basis_orthonormal_and_local() {
        let l = structure(&[4, 2]);
        let b = entangled_basis(&l, 1).unwrap();
        let s = b.as_subspace(l.total_dim());
        assert!(s.frame_residual() < TOL);
        let p1 = l.projector(Block::Level(1)).unwrap();
        assert!((&p1 * &s.frame).max_abs_diff(&s.frame) < TOL);
    }

    fn dims_strategy() -> impl Strategy<Value = Vec<usize>> {
        prop::collection::vec(1usize..=6, 2..=5).prop_map(|mut v| {
            v.sort_unstable_by(|a, b| b.cmp(a));
            v
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn pairwise_transition_identities(n_from in 1usize..=6, n_to_raw in 1usize..=6) {
            let n_to = n_to_raw.min(n_from);
            let l = structure(&[n_from, n_to]);
            let z = transition_operator(&l, 1, 2).unwrap();
            let za = z.adjoint();
            let p1 = l.p_level(1);
            let p2 = l.p_level(2);
            prop_assert!((&z * &za).max_abs_diff(&p2) <= TOL);
            let abs = &za * &z;
            prop_assert!((&abs * &abs).max_abs_diff(&abs) <= TOL);
            prop_assert!(abs.max_abs_diff(&abs.adjoint()) <= TOL);
            let gap = &p1 - &abs;
            let ev = gap.eigenvalues_hermitian().unwrap();
            prop_assert!(ev[0] >= -TOL);
            prop_assert_eq!(gap.norm_max() <= TOL, n_from == n_to);
            let comp = l.embed(1, 1, &closed_form::complement_block(n_from, n_to)).unwrap();
            prop_assert!(gap.max_abs_diff(&comp) <= TOL);
            let zf = &z * &embedded_dft(&l, 1).unwrap().adjoint();
            let want = l.embed(2, 1, &closed_form::transition_times_inverse_dft(n_from, n_to)).unwrap();
            prop_assert!(zf.max_abs_diff(&want) <= TOL);
            prop_assert!((&z * &z).norm_max() <= TOL);
            prop_assert!((&p2 * &z).max_abs_diff(&z) <= TOL);
            prop_assert!((&z * &p1).max_abs_diff(&z) <= TOL);
        }

        #[test]
        fn transport_structure(dims in dims_strategy()) {
            let l = structure(&dims);
            let n = l.n_levels();
            let t = Transport::new(&l);
            let d = l.total_dim();
            let mut upper = Operator::zeros(d, d);
            for k in 2..=n { upper = &upper + &l.p_level(k); }
            prop_assert!((&t.z * &t.z_adj).max_abs_diff(&upper) <= TOL);
            prop_assert!(t.abs.max_abs_diff(&closed_form::absolute_from_entangled(&l)) <= TOL);
            prop_assert!(t.abs_perp.max_abs_diff(&closed_form::absolute_perp_from_entangled(&l)) <= TOL);
            for k in 1..n {
                prop_assert!(t.z_k(k).max_abs_diff(&transition_operator(&l, k, k + 1).unwrap()) <= TOL);
                for a in 0..l.dim_of(k + 1) {
                    let phi = entangled_vector(&l, k, a).unwrap();
                    let ket = l.ket(k + 1, a).unwrap();
                    prop_assert!(vector_max_abs_diff(&t.z.apply(&phi), &ket) <= TOL);
                    prop_assert!(vector_max_abs_diff(&t.z_adj.apply(&ket), &phi) <= TOL);
                }
                for a in l.dim_of(k + 1)..l.dim_of(k) {
                    let phi = entangled_vector(&l, k, a).unwrap();
                    prop_assert!(crate::operator::norm(&t.z.apply(&phi)) <= TOL);
                }
            }
            let ker = kernel_basis(&l);
            prop_assert!((&t.z * &ker.frame).norm_max() <= TOL);
            let s = t.z.singular_values().unwrap();
            let nullity = s.iter().filter(|&&x| x <= 1e-10).count();
            // ker Z also contains P_N H and the ± directions
            prop_assert_eq!(nullity, ker.dim() + 2 + l.dim_of(n));
        }

        #[test]
        fn two_step_and_powers(dims in dims_strategy()) {
            let l = structure(&dims);
            let n = l.n_levels();
            let t = Transport::new(&l);
            for k in 1..n {
                for a in 0..l.dim_of(k) {
                    let img = t.z.apply(&l.ket(k, a).unwrap());
                    let want = l.embed_vector(k + 1, &closed_form::transition_on_basis(l.dim_of(k), l.dim_of(k + 1), a)).unwrap();
                    prop_assert!(vector_max_abs_diff(&img, &want) <= TOL);
                    if k + 2 <= n {
                        let img = t.apply_power(&l.ket(k, a).unwrap(), 2);
                        let want = closed_form::two_step_on_basis(l.dim_of(k), l.dim_of(k + 1), l.dim_of(k + 2), a);
                        let want = l.embed_vector(k + 2, &want).unwrap();
                        prop_assert!(vector_max_abs_diff(&img, &want) <= TOL);
                    }
                }
                for p in 1..=(n - k) {
                    let (coef, target) = transport_power_on_zero(&l, k, p).unwrap();
                    let direct = t.apply_power(&l.ket(k, 0).unwrap(), p);
                    let want = scale_vector(&target.vector(&l).unwrap(), c(coef, 0.0));
                    prop_assert!(vector_max_abs_diff(&direct, &want) <= TOL);
                }
            }
        }

        #[test]
        fn isometry_on_range_of_absolute_value(dims in dims_strategy()) {
            let l = structure(&dims);
            let t = Transport::new(&l);
            for k in 1..l.n_levels() {
                let range = Subspace::range_of(&t.abs_k(k), "ran");
                prop_assert_eq!(range.dim(), l.dim_of(k + 1));
                let img = &t.z * &range.frame;
                let gram = &img.adjoint() * &img;
                prop_assert!(gram.max_abs_diff(&Operator::identity(range.dim())) <= TOL);
                let back = &t.z_adj * &img;
                prop_assert!(back.max_abs_diff(&range.frame) <= TOL);
                prop_assert!(Subspace::range_of(&img, "img").same_as(&Subspace::range_of(&l.p_level(k + 1), "E")));
            }
        }
    }
}

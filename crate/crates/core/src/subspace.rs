//! Subspaces carried as orthonormal frames.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{c64, inner, norm, scale_vector, Operator, Vector, ZERO};

/// Columns whose residual norm drops below this are discarded during
/// orthonormalisation.
pub const DROP_TOL: f64 = 1e-10;

/// Tolerance for subspace equality through induced projections.
pub const EQ_TOL: f64 = 1e-10;

/// Orthonormal frame spanning a subspace of `C^ambient`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Subspace {
    pub ambient: usize,
    pub frame: Operator,
    /// Provenance of the generating vectors that survived orthonormalisation.
    pub labels: Vec<String>,
    pub label: String,
}

impl Subspace {
    pub fn zero(ambient: usize, label: impl Into<String>) -> Self {
        Self {
            ambient,
            frame: Operator::zeros(ambient, 0),
            labels: Vec::new(),
            label: label.into(),
        }
    }

    pub fn full(ambient: usize, label: impl Into<String>) -> Self {
        Self {
            ambient,
            frame: Operator::identity(ambient),
            labels: (0..ambient).map(|i| format!("e{i}")).collect(),
            label: label.into(),
        }
    }

    /// Span of `generators`, orthonormalised by column-pivoted modified
    /// Gram–Schmidt. At each step the remaining column of largest residual
    /// norm is taken; ties go to the lowest index, so the frame is
    /// deterministic.
    pub fn span(ambient: usize, generators: &[Vector], label: impl Into<String>) -> Self {
        let labels: Vec<String> = (0..generators.len()).map(|i| format!("g{i}")).collect();
        Self::span_labeled(ambient, generators, &labels, label)
    }

    pub fn span_labeled(
        ambient: usize,
        generators: &[Vector],
        labels: &[String],
        label: impl Into<String>,
    ) -> Self {
        assert_eq!(generators.len(), labels.len());
        let mut residual: Vec<Vector> = generators.to_vec();
        for r in &residual {
            assert_eq!(r.nrows(), ambient, "generator length differs from ambient dimension");
        }
        let mut remaining: Vec<usize> = (0..generators.len()).collect();
        let mut frame: Vec<Vector> = Vec::new();
        let mut kept = Vec::new();
        while !remaining.is_empty() {
            let (pos, best) = remaining
                .iter()
                .enumerate()
                .map(|(p, &j)| (p, norm(&residual[j])))
                .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best <= DROP_TOL {
                break;
            }
            let j = remaining.remove(pos);
            let mut q = residual[j].clone();
            // second pass restores orthogonality lost to cancellation
            for e in &frame {
                let c = inner(e, &q);
                q -= scale_vector(e, c);
            }
            let nq = norm(&q);
            if nq <= DROP_TOL {
                continue;
            }
            q = scale_vector(&q, c64::new(1.0 / nq, 0.0));
            for &r in &remaining {
                let c = inner(&q, &residual[r]);
                residual[r] -= scale_vector(&q, c);
            }
            frame.push(q);
            kept.push(labels[j].clone());
        }
        Self {
            ambient,
            frame: Operator::from_columns(ambient, &frame),
            labels: kept,
            label: label.into(),
        }
    }

    /// Column span of `op`.
    pub fn range_of(op: &Operator, label: impl Into<String>) -> Self {
        Self::span(op.rows(), &op.columns(), label)
    }

    /// Subspace from a frame already known to be orthonormal.
    pub fn from_orthonormal(frame: Operator, label: impl Into<String>) -> Result<Self> {
        let gram = &frame.adjoint() * &frame;
        let err = gram.max_abs_diff(&Operator::identity(frame.cols()));
        if err > 1e-10 {
            return Err(Error::InvalidInput(format!(
                "frame is not orthonormal (Gram residual {err:e})"
            )));
        }
        let labels = (0..frame.cols()).map(|i| format!("c{i}")).collect();
        Ok(Self {
            ambient: frame.rows(),
            frame,
            labels,
            label: label.into(),
        })
    }

    pub fn dim(&self) -> usize {
        self.frame.cols()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn vectors(&self) -> Vec<Vector> {
        self.frame.columns()
    }

    /// Orthogonal projection onto the subspace.
    pub fn projector(&self) -> Operator {
        if self.is_zero() {
            return Operator::zeros(self.ambient, self.ambient);
        }
        &self.frame * &self.frame.adjoint()
    }

    /// Orthogonal complement in the ambient space.
    pub fn complement(&self, label: impl Into<String>) -> Self {
        let p = self.projector();
        let q = &Operator::identity(self.ambient) - &p;
        Self::range_of(&q, label)
    }

    /// `self ⊖ other`: the part of `self` orthogonal to `other`.
    pub fn minus(&self, other: &Subspace, label: impl Into<String>) -> Self {
        let q = &Operator::identity(self.ambient) - &other.projector();
        let gens = (&q * &self.frame).columns();
        Self::span(self.ambient, &gens, label)
    }

    /// Closed linear span of `self ∪ other`.
    pub fn join(&self, other: &Subspace, label: impl Into<String>) -> Self {
        let mut gens = self.vectors();
        gens.extend(other.vectors());
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        Self::span_labeled(self.ambient, &gens, &labels, label)
    }

    /// Image `op(self)`.
    pub fn image(&self, op: &Operator, label: impl Into<String>) -> Self {
        Self::span(op.rows(), &(op * &self.frame).columns(), label)
    }

    /// Range of `proj · P_self`, e.g. `P_k V`.
    pub fn project(&self, proj: &Operator, label: impl Into<String>) -> Self {
        self.image(proj, label)
    }

    pub fn projector_distance(&self, other: &Subspace) -> f64 {
        self.projector().max_abs_diff(&other.projector())
    }

    pub fn same_as(&self, other: &Subspace) -> bool {
        self.ambient == other.ambient && self.projector_distance(other) <= EQ_TOL
    }

    /// `P_other · P_self = P_self`.
    pub fn is_contained_in(&self, other: &Subspace) -> bool {
        let p = self.projector();
        (&other.projector() * &p).max_abs_diff(&p) <= EQ_TOL
    }

    pub fn is_orthogonal_to(&self, other: &Subspace) -> bool {
        (&self.frame.adjoint() * &other.frame).norm_max() <= EQ_TOL
    }

    /// `‖(I − P)ρ(I − P)‖_max`, used as a support test.
    pub fn support_residual(&self, rho: &Operator) -> f64 {
        let q = &Operator::identity(self.ambient) - &self.projector();
        (&(&q * rho) * &q).norm_max()
    }

    /// Stronger support test `‖(I − P)ρ‖_max`.
    pub fn leak_residual(&self, rho: &Operator) -> f64 {
        let q = &Operator::identity(self.ambient) - &self.projector();
        (&q * rho).norm_max()
    }

    /// `ρ` restricted to the subspace, as a matrix in frame coordinates.
    pub fn compress(&self, rho: &Operator) -> Operator {
        &(&self.frame.adjoint() * rho) * &self.frame
    }

    pub fn frame_residual(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        (&self.frame.adjoint() * &self.frame).max_abs_diff(&Operator::identity(self.dim()))
    }

    /// Coordinates of `v` in the frame.
    pub fn coordinates(&self, v: &Vector) -> Vec<c64> {
        self.vectors().iter().map(|e| inner(e, v)).collect()
    }

    /// Vector from frame coordinates.
    pub fn combine(&self, coords: &[c64]) -> Vector {
        let mut out = Vector::zeros(self.ambient);
        for (e, &c) in self.vectors().iter().zip(coords) {
            if c != ZERO {
                out += scale_vector(e, c);
            }
        }
        out
    }
}

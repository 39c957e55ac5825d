//! Dense complex operators and vectors.
//!
//! [`Operator`] is a thin wrapper around a `faer` matrix. It carries every
//! matrix in the crate: level blocks, full-space embeddings, Kraus operators,
//! density matrices and the vectorised generator.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use faer::linalg::solvers::Solve;
use faer::{Mat, Side};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub use faer::c64;

/// Column vector in the ambient space.
pub type Vector = faer::Col<c64>;

pub const ZERO: c64 = c64 { re: 0.0, im: 0.0 };
pub const ONE: c64 = c64 { re: 1.0, im: 0.0 };
pub const I: c64 = c64 { re: 0.0, im: 1.0 };

#[derive(Clone)]
pub struct Operator {
    mat: Mat<c64>,
}

impl Operator {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            mat: Mat::zeros(rows, cols),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            mat: Mat::identity(n, n),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> c64) -> Self {
        Self {
            mat: Mat::from_fn(rows, cols, f),
        }
    }

    pub fn from_mat(mat: Mat<c64>) -> Self {
        Self { mat }
    }

    /// Real diagonal matrix.
    pub fn diagonal(entries: &[f64]) -> Self {
        let n = entries.len();
        let mut out = Self::zeros(n, n);
        for (i, &x) in entries.iter().enumerate() {
            out.set(i, i, c64::new(x, 0.0));
        }
        out
    }

    /// Operator whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vector]) -> Self {
        Self::from_fn(rows, columns.len(), |i, j| columns[j][i])
    }

    /// Rank-one operator `|u><v|`.
    pub fn outer(u: &Vector, v: &Vector) -> Self {
        Self::from_fn(u.nrows(), v.nrows(), |i, j| u[i] * v[j].conj())
    }

    /// Projection `|u><u| / <u,u>`.
    pub fn projection_onto(u: &Vector) -> Self {
        let n2 = norm(u).powi(2);
        Self::outer(u, u).scale_real(1.0 / n2)
    }

    pub fn as_mat(&self) -> faer::MatRef<'_, c64> {
        self.mat.as_ref()
    }

    pub fn into_mat(self) -> Mat<c64> {
        self.mat
    }

    pub fn rows(&self) -> usize {
        self.mat.nrows()
    }

    pub fn cols(&self) -> usize {
        self.mat.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> c64 {
        self.mat[(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: c64) {
        self.mat[(i, j)] = value;
    }

    #[inline]
    pub fn add_at(&mut self, i: usize, j: usize, value: c64) {
        self.mat[(i, j)] += value;
    }

    pub fn column(&self, j: usize) -> Vector {
        Vector::from_fn(self.rows(), |i| self.mat[(i, j)])
    }

    pub fn columns(&self) -> Vec<Vector> {
        (0..self.cols()).map(|j| self.column(j)).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols(), self.rows(), |i, j| self.mat[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols(), self.rows(), |i, j| self.mat[(j, i)])
    }

    pub fn conjugate(&self) -> Self {
        Self::from_fn(self.rows(), self.cols(), |i, j| self.mat[(i, j)].conj())
    }

    pub fn trace(&self) -> c64 {
        (0..self.rows().min(self.cols())).map(|i| self.mat[(i, i)]).sum()
    }

    pub fn scale(&self, factor: c64) -> Self {
        Self::from_fn(self.rows(), self.cols(), |i, j| self.mat[(i, j)] * factor)
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        Self::from_fn(self.rows(), self.cols(), |i, j| self.mat[(i, j)] * factor)
    }

    /// Largest entry modulus.
    pub fn norm_max(&self) -> f64 {
        let mut out = 0.0_f64;
        for j in 0..self.cols() {
            for i in 0..self.rows() {
                out = out.max(self.mat[(i, j)].norm());
            }
        }
        out
    }

    /// Induced 1-norm (largest absolute column sum).
    pub fn norm_one(&self) -> f64 {
        (0..self.cols())
            .map(|j| (0..self.rows()).map(|i| self.mat[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn norm_frobenius(&self) -> f64 {
        self.mat.norm_l2()
    }

    /// Trace norm of a Hermitian operator (sum of absolute eigenvalues).
    pub fn trace_norm_hermitian(&self) -> Result<f64> {
        Ok(self.eigenvalues_hermitian()?.iter().map(|x| x.abs()).sum())
    }

    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        assert_eq!((self.rows(), self.cols()), (other.rows(), other.cols()));
        let mut out = 0.0_f64;
        for j in 0..self.cols() {
            for i in 0..self.rows() {
                out = out.max((self.mat[(i, j)] - other.mat[(i, j)]).norm());
            }
        }
        out
    }

    pub fn approx_eq(&self, other: &Operator, tol: f64) -> bool {
        self.rows() == other.rows() && self.cols() == other.cols() && self.max_abs_diff(other) <= tol
    }

    /// `[self, other] = self·other − other·self`
    pub fn commutator(&self, other: &Operator) -> Self {
        &(self * other) - &(other * self)
    }

    /// `{self, other} = self·other + other·self`
    pub fn anticommutator(&self, other: &Operator) -> Self {
        &(self * other) + &(other * self)
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        assert_eq!(self.cols(), v.nrows());
        &self.mat * v
    }

    /// `self ⊗ other` in the convention `(A⊗B)[i·p + k, j·q + l] = A[i,j]·B[k,l]`.
    pub fn kron(&self, other: &Operator) -> Self {
        let (p, q) = (other.rows(), other.cols());
        let mut out = Self::zeros(self.rows() * p, self.cols() * q);
        for j in 0..self.cols() {
            for i in 0..self.rows() {
                let a = self.mat[(i, j)];
                if a == ZERO {
                    continue;
                }
                for l in 0..q {
                    for k in 0..p {
                        out.mat[(i * p + k, j * q + l)] = a * other.mat[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// Column-stacking vectorisation: `vec(X)[i + j·rows] = X[i, j]`.
    pub fn vectorize(&self) -> Vector {
        let r = self.rows();
        Vector::from_fn(r * self.cols(), |n| self.mat[(n % r, n / r)])
    }

    /// Inverse of [`Operator::vectorize`] for a square `n×n` result.
    pub fn unvectorize(v: &Vector, n: usize) -> Result<Self> {
        if v.nrows() != n * n {
            return Err(Error::Shape {
                expected: format!("vector of length {}", n * n),
                found: format!("length {}", v.nrows()),
            });
        }
        Ok(Self::from_fn(n, n, |i, j| v[i + j * n]))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.max_abs_diff(&self.adjoint()) <= tol
    }

    pub fn hermitian_part(&self) -> Self {
        (self + &self.adjoint()).scale_real(0.5)
    }

    /// Eigenvalues in nondecreasing order; only the lower triangle is read.
    pub fn eigenvalues_hermitian(&self) -> Result<Vec<f64>> {
        self.require_square()?;
        self.mat
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::Linalg(format!("{e:?}")))
    }

    /// Eigenvalues (nondecreasing) and the unitary of eigenvectors.
    pub fn eigen_hermitian(&self) -> Result<(Vec<f64>, Operator)> {
        self.require_square()?;
        let evd = self
            .mat
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Linalg(format!("{e:?}")))?;
        let values = evd.S().column_vector().iter().map(|x| x.re).collect();
        Ok((values, Operator::from_mat(evd.U().to_owned())))
    }

    /// Singular values in nonincreasing order.
    pub fn singular_values(&self) -> Result<Vec<f64>> {
        self.mat
            .singular_values()
            .map_err(|e| Error::Linalg(format!("{e:?}")))
    }

    /// Full singular value decomposition `(U, σ, V)` with `self = U·diag(σ)·V*`.
    pub fn svd(&self) -> Result<(Operator, Vec<f64>, Operator)> {
        let svd = self.mat.svd().map_err(|e| Error::Linalg(format!("{e:?}")))?;
        let s = svd.S().column_vector().iter().map(|x| x.re).collect();
        Ok((
            Operator::from_mat(svd.U().to_owned()),
            s,
            Operator::from_mat(svd.V().to_owned()),
        ))
    }

    /// Orthonormal basis of the right null space, using the threshold
    /// `σ ≤ rel_tol · σ_max`. Columns of the result span the kernel.
    pub fn null_space(&self, rel_tol: f64) -> Result<(Operator, Vec<f64>)> {
        let (_, s, v) = self.svd()?;
        let n = self.cols();
        let smax = s.first().copied().unwrap_or(0.0);
        let threshold = rel_tol * smax;
        let null_cols: Vec<usize> = (0..n)
            .filter(|&j| s.get(j).is_none_or(|&sj| sj <= threshold))
            .collect();
        let frame = Operator::from_fn(n, null_cols.len(), |i, c| v.get(i, null_cols[c]));
        Ok((frame, s))
    }

    /// Solve `self · X = rhs` by partial-pivot LU.
    pub fn solve(&self, rhs: &Operator) -> Result<Operator> {
        self.require_square()?;
        if rhs.rows() != self.rows() {
            return Err(Error::Shape {
                expected: format!("{} rows", self.rows()),
                found: format!("{} rows", rhs.rows()),
            });
        }
        let lu = self.mat.partial_piv_lu();
        Ok(Operator::from_mat(lu.solve(&rhs.mat)))
    }

    pub fn submatrix(&self, row0: usize, col0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self.mat[(row0 + i, col0 + j)])
    }

    /// Copy `block` into `self` with its top-left corner at `(row0, col0)`.
    pub fn place(&mut self, row0: usize, col0: usize, block: &Operator) {
        for j in 0..block.cols() {
            for i in 0..block.rows() {
                self.mat[(row0 + i, col0 + j)] = block.mat[(i, j)];
            }
        }
    }

    pub fn all_finite(&self) -> bool {
        (0..self.cols()).all(|j| (0..self.rows()).all(|i| self.mat[(i, j)].is_finite()))
    }

    fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::Shape {
                expected: "square operator".into(),
                found: format!("{}x{}", self.rows(), self.cols()),
            })
        }
    }
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Operator {}x{} [", self.rows(), self.cols())?;
        for i in 0..self.rows() {
            write!(f, "  ")?;
            for j in 0..self.cols() {
                let z = self.get(i, j);
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl PartialEq for Operator {
    fn eq(&self, other: &Self) -> bool {
        self.rows() == other.rows() && self.cols() == other.cols() && self.max_abs_diff(other) == 0.0
    }
}

impl<'a> Mul<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn mul(self, rhs: &'a Operator) -> Operator {
        assert_eq!(self.cols(), rhs.rows(), "operator product shape mismatch");
        Operator::from_mat(&self.mat * &rhs.mat)
    }
}

impl<'a> Add<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn add(self, rhs: &'a Operator) -> Operator {
        Operator::from_mat(&self.mat + &rhs.mat)
    }
}

impl<'a> Sub<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn sub(self, rhs: &'a Operator) -> Operator {
        Operator::from_mat(&self.mat - &rhs.mat)
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        self.scale_real(-1.0)
    }
}

/// Hermitian inner product `<u, v>` (antilinear in `u`).
pub fn inner(u: &Vector, v: &Vector) -> c64 {
    assert_eq!(u.nrows(), v.nrows());
    (0..u.nrows()).map(|i| u[i].conj() * v[i]).sum()
}

pub fn norm(v: &Vector) -> f64 {
    (0..v.nrows()).map(|i| v[i].norm_sqr()).sum::<f64>().sqrt()
}

pub fn basis_vector(dim: usize, index: usize) -> Vector {
    let mut v = Vector::zeros(dim);
    v[index] = ONE;
    v
}

pub fn vector_max_abs_diff(u: &Vector, v: &Vector) -> f64 {
    assert_eq!(u.nrows(), v.nrows());
    (0..u.nrows()).map(|i| (u[i] - v[i]).norm()).fold(0.0, f64::max)
}

pub fn scale_vector(v: &Vector, factor: c64) -> Vector {
    Vector::from_fn(v.nrows(), |i| v[i] * factor)
}

/// Wire format: `{rows, cols, re: [...], im: [...]}` in row-major order.
#[derive(Serialize, Deserialize)]
struct OperatorWire {
    rows: usize,
    cols: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl From<&Operator> for OperatorWire {
    fn from(op: &Operator) -> Self {
        let mut re = Vec::with_capacity(op.rows() * op.cols());
        let mut im = Vec::with_capacity(op.rows() * op.cols());
        for i in 0..op.rows() {
            for j in 0..op.cols() {
                let z = op.get(i, j);
                re.push(z.re);
                im.push(z.im);
            }
        }
        Self {
            rows: op.rows(),
            cols: op.cols(),
            re,
            im,
        }
    }
}

impl TryFrom<OperatorWire> for Operator {
    type Error = Error;

    fn try_from(w: OperatorWire) -> Result<Self> {
        let n = w.rows * w.cols;
        if w.rows == 0 && w.cols == 0 {
            return Ok(Operator::zeros(0, 0));
        }
        if w.re.len() != n || w.im.len() != n {
            return Err(Error::Shape {
                expected: format!("{n} real and imaginary parts"),
                found: format!("{} and {}", w.re.len(), w.im.len()),
            });
        }
        let op = Operator::from_fn(w.rows, w.cols, |i, j| {
            c64::new(w.re[i * w.cols + j], w.im[i * w.cols + j])
        });
        if !op.all_finite() {
            return Err(Error::InvalidInput("operator has non-finite entries".into()));
        }
        Ok(op)
    }
}

impl Serialize for Operator {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        OperatorWire::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Operator {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = OperatorWire::deserialize(deserializer)?;
        Operator::try_from(wire).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(rows: usize, cols: usize, seed: f64) -> Operator {
        Operator::from_fn(rows, cols, |i, j| {
            c64::new((seed * (i + 2 * j + 1) as f64).sin(), (seed * (3 * i + j) as f64).cos())
        })
    }

    #[test]
    fn vectorize_round_trips_and_matches_kron_identity() {
        let a = sample(3, 3, 0.3);
        let x = sample(3, 3, 1.1);
        let b = sample(3, 3, 2.7);
        let v = x.vectorize();
        assert!(Operator::unvectorize(&v, 3).unwrap().approx_eq(&x, 0.0));
        // vec(AXB) = (Bᵀ ⊗ A) vec(X)
        let lhs = (&(&a * &x) * &b).vectorize();
        let rhs = b.transpose().kron(&a).apply(&v);
        assert!(vector_max_abs_diff(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn json_wire_format_is_row_major() {
        let op = Operator::from_fn(2, 3, |i, j| c64::new((10 * i + j) as f64, -(j as f64)));
        let text = serde_json::to_string(&op).unwrap();
        assert_eq!(
            text,
            r#"{"rows":2,"cols":3,"re":[0.0,1.0,2.0,10.0,11.0,12.0],"im":[-0.0,-1.0,-2.0,-0.0,-1.0,-2.0]}"#
        );
        let back: Operator = serde_json::from_str(&text).unwrap();
        assert_eq!(back, op);
    }

    #[test]
    fn json_rejects_length_mismatch() {
        let bad = r#"{"rows":2,"cols":2,"re":[1,2,3],"im":[0,0,0,0]}"#;
        assert!(serde_json::from_str::<Operator>(bad).is_err());
    }

    #[test]
    fn null_space_of_rank_deficient_matrix() {
        let u = Vector::from_fn(4, |i| c64::new(i as f64 + 1.0, 0.5));
        let v = Vector::from_fn(4, |i| c64::new(1.0, -(i as f64)));
        let a = Operator::outer(&u, &v);
        let (frame, _) = a.null_space(1e-10).unwrap();
        assert_eq!(frame.cols(), 3);
        assert!((&a * &frame).norm_max() < 1e-12);
    }

    #[test]
    fn hermitian_eigenvalues_sorted() {
        let h = Operator::diagonal(&[3.0, -1.0, 2.0]);
        let ev = h.eigenvalues_hermitian().unwrap();
        assert_eq!(ev.len(), 3);
        assert!((ev[0] + 1.0).abs() < 1e-14 && (ev[2] - 3.0).abs() < 1e-14);
    }
}

//! Linear spans of operators under the Hilbert-Schmidt inner product.

use crate::linalg::{self, HermitianEigen};
use crate::scalar::{frobenius, from_real, hs_inner, re, CMat, Real};
use crate::tolerance;

/// A subspace of operators, stored as an orthonormal Hilbert-Schmidt basis.
#[derive(Clone, Debug)]
pub struct OperatorSpan<T: Real> {
    basis: Vec<CMat<T>>,
}

impl<T: Real> OperatorSpan<T> {
    /// Orthonormalizes `ops` by modified Gram-Schmidt with one
    /// reorthogonalization pass. Vectors whose remaining norm falls below
    /// `1e-8` of the largest input norm are treated as dependent.
    pub fn from_operators(ops: &[CMat<T>]) -> Self {
        let scale = ops.iter().map(frobenius).fold(T::zero(), |a, b| a.max(b));
        let cut = re::<T>(tolerance::for_scalar::<T>(tolerance::RANK_CUTOFF)) * scale;
        let mut basis: Vec<CMat<T>> = Vec::new();
        for op in ops {
            let mut v = op.clone();
            for _ in 0..2 {
                for q in &basis {
                    let c = hs_inner(q, &v);
                    v -= q * c;
                }
            }
            let n = frobenius(&v);
            if n > cut && n > T::zero() {
                basis.push(v * from_real(T::one() / n));
            }
        }
        Self { basis }
    }

    /// Wraps a basis the caller guarantees to be orthonormal.
    pub fn from_orthonormal(basis: Vec<CMat<T>>) -> Self {
        Self { basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[CMat<T>] {
        &self.basis
    }

    /// Orthogonal projection of `x` onto the span.
    pub fn project(&self, x: &CMat<T>) -> CMat<T> {
        let mut p = CMat::zeros(x.nrows(), x.ncols());
        for q in &self.basis {
            p += q * hs_inner(q, x);
        }
        p
    }

    /// `‖x − P x‖_HS`.
    pub fn residual(&self, x: &CMat<T>) -> T {
        frobenius(&(x - self.project(x)))
    }

    /// Basis operators as the columns of a `d² × dim` matrix.
    fn stacked(&self) -> CMat<T> {
        let len = self.basis.first().map_or(0, |q| q.len());
        let mut out = CMat::zeros(len, self.basis.len());
        for (k, q) in self.basis.iter().enumerate() {
            out.column_mut(k).copy_from_slice(q.as_slice());
        }
        out
    }

    /// `‖(1 − P_other) Q_self‖_HS`, an upper bound on [`distance`] for
    /// spans of equal dimension. It needs no eigensolve, which makes it the
    /// cheap choice when only a threshold is to be certified, especially
    /// with a sparse `other`.
    ///
    /// [`distance`]: OperatorSpan::distance
    pub fn distance_bound(&self, other: &Self) -> T {
        if self.dim() != other.dim() {
            return T::one();
        }
        if self.dim() == 0 {
            return T::zero();
        }
        frobenius(&residual_block(self, other))
    }

    /// Spectral norm of the difference of the orthogonal projectors onto
    /// the two spans. Zero for equal spans, one when the dimensions differ.
    /// For equal dimensions `‖P − Q‖ = ‖(1 − Q) P‖ = ‖(1 − P) Q‖`, so one
    /// side suffices.
    pub fn distance(&self, other: &Self) -> T {
        if self.dim() != other.dim() {
            return T::one();
        }
        if self.dim() == 0 {
            return T::zero();
        }
        one_sided_gap(self, other).min(T::one())
    }
}

/// Columns `(1 − P_v) q` for the basis `q` of `u`.
fn residual_block<T: Real>(u: &OperatorSpan<T>, v: &OperatorSpan<T>) -> CMat<T> {
    let (qu, qv) = (u.stacked(), v.stacked());
    &qu - linalg::mul(&qv, &linalg::ad_mul(&qv, &qu))
}

/// `‖(1 − P_v) Q_u‖` computed from explicit residuals so that small angles
/// are resolved to working precision.
fn one_sided_gap<T: Real>(u: &OperatorSpan<T>, v: &OperatorSpan<T>) -> T {
    let residuals = residual_block(u, v);
    let gram = linalg::ad_mul(&residuals, &residuals);
    HermitianEigen::new(&gram).max().max(T::zero()).sqrt()
}

//! Finite-dimensional C*-algebras `A = ⊕_r M_{n_r}(C)`: elements, the
//! involution, the algebra trace, faithful states and matrix units.

use std::fmt;

use nalgebra::{Complex, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{GnsError, Result};
use crate::linalg::{self, HermitianEigen};
use crate::scalar::{from_real, max_abs, re, to_f64, CMat, Real, C};
use crate::tolerance;

/// Block sizes `(n_1, …, n_N)` of a multi-matrix algebra.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AlgebraShape {
    blocks: Vec<usize>,
}

impl AlgebraShape {
    pub fn new(blocks: Vec<usize>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(GnsError::InvalidShape("at least one block is required".into()));
        }
        if let Some(pos) = blocks.iter().position(|&n| n == 0) {
            return Err(GnsError::InvalidShape(format!("block {pos} has size 0")));
        }
        Ok(Self { blocks })
    }

    /// Full matrix algebra `M_n(C)`.
    pub fn full(n: usize) -> Result<Self> {
        Self::new(vec![n])
    }

    /// Abelian algebra `C^N`.
    pub fn abelian(n: usize) -> Result<Self> {
        Self::new(vec![1; n])
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_size(&self, r: usize) -> usize {
        self.blocks[r]
    }

    /// `Σ n_r²`.
    pub fn algebra_dim(&self) -> usize {
        self.blocks.iter().map(|n| n * n).sum()
    }

    /// Dimension of the GNS space of a faithful state; equal to
    /// `algebra_dim`.
    pub fn gns_dim(&self) -> usize {
        self.algebra_dim()
    }

    /// `Σ n_r`, the dimension of the defining representation.
    pub fn matrix_dim(&self) -> usize {
        self.blocks.iter().sum()
    }

    /// Offsets of each block's `n_r²` coordinates in a GNS vector.
    pub fn gns_offsets(&self) -> Vec<usize> {
        let mut acc = 0;
        self.blocks
            .iter()
            .map(|n| {
                let o = acc;
                acc += n * n;
                o
            })
            .collect()
    }

    pub fn is_abelian(&self) -> bool {
        self.blocks.iter().all(|&n| n == 1)
    }
}

impl fmt::Display for AlgebraShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.blocks.iter().map(|n| n.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// An element `a = ⊕_r a_r` of the algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement<T: Real> {
    shape: AlgebraShape,
    blocks: Vec<CMat<T>>,
}

impl<T: Real> AlgebraElement<T> {
    pub fn new(shape: AlgebraShape, blocks: Vec<CMat<T>>) -> Result<Self> {
        if blocks.len() != shape.num_blocks() {
            return Err(GnsError::ShapeMismatch(format!(
                "expected {} blocks, got {}",
                shape.num_blocks(),
                blocks.len()
            )));
        }
        for (r, (b, &n)) in blocks.iter().zip(shape.blocks()).enumerate() {
            if b.nrows() != n || b.ncols() != n {
                return Err(GnsError::ShapeMismatch(format!(
                    "block {r} is {}x{}, expected {n}x{n}",
                    b.nrows(),
                    b.ncols()
                )));
            }
        }
        Ok(Self { shape, blocks })
    }

    pub fn from_fn<F: FnMut(usize) -> CMat<T>>(shape: &AlgebraShape, mut f: F) -> Self {
        let blocks = (0..shape.num_blocks()).map(&mut f).collect();
        Self {
            shape: shape.clone(),
            blocks,
        }
    }

    pub fn zero(shape: &AlgebraShape) -> Self {
        Self::from_fn(shape, |r| CMat::zeros(shape.block_size(r), shape.block_size(r)))
    }

    pub fn identity(shape: &AlgebraShape) -> Self {
        Self::from_fn(shape, |r| linalg::identity(shape.block_size(r)))
    }

    /// Central projection `1_{A_r}`.
    pub fn block_identity(shape: &AlgebraShape, r: usize) -> Self {
        Self::from_fn(shape, |s| {
            let n = shape.block_size(s);
            if s == r {
                linalg::identity(n)
            } else {
                CMat::zeros(n, n)
            }
        })
    }

    /// Standard matrix unit `E_{ij}` in block `r`.
    pub fn standard_unit(shape: &AlgebraShape, r: usize, i: usize, j: usize) -> Self {
        let mut a = Self::zero(shape);
        a.blocks[r][(i, j)] = Complex::new(T::one(), T::zero());
        a
    }

    /// Element supported on a single block.
    pub fn from_block(shape: &AlgebraShape, r: usize, block: CMat<T>) -> Result<Self> {
        let mut a = Self::zero(shape);
        let n = shape.block_size(r);
        if block.nrows() != n || block.ncols() != n {
            return Err(GnsError::ShapeMismatch(format!("block {r} must be {n}x{n}")));
        }
        a.blocks[r] = block;
        Ok(a)
    }

    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    pub fn blocks(&self) -> &[CMat<T>] {
        &self.blocks
    }

    pub fn block(&self, r: usize) -> &CMat<T> {
        &self.blocks[r]
    }

    pub fn into_blocks(self) -> Vec<CMat<T>> {
        self.blocks
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.shape != other.shape {
            return Err(GnsError::ShapeMismatch(format!(
                "{} vs {}",
                self.shape, other.shape
            )));
        }
        Ok(())
    }

    fn zip_with<F: Fn(&CMat<T>, &CMat<T>) -> CMat<T>>(&self, other: &Self, f: F) -> Result<Self> {
        self.check_shape(other)?;
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| f(a, b))
            .collect();
        Ok(Self {
            shape: self.shape.clone(),
            blocks,
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: C<T>) -> Self {
        Self {
            shape: self.shape.clone(),
            blocks: self.blocks.iter().map(|b| b * c).collect(),
        }
    }

    /// The involution `a ↦ a*`, blockwise conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self {
            shape: self.shape.clone(),
            blocks: self.blocks.iter().map(|b| b.adjoint()).collect(),
        }
    }

    /// Entrywise complex conjugate in the defining representation.
    pub fn conjugate(&self) -> Self {
        Self {
            shape: self.shape.clone(),
            blocks: self.blocks.iter().map(|b| b.conjugate()).collect(),
        }
    }

    /// Algebra trace `tr_A(a) = Σ_r Tr(a_r)`.
    pub fn trace(&self) -> C<T> {
        self.blocks
            .iter()
            .fold(Complex::new(T::zero(), T::zero()), |acc, b| acc + b.trace())
    }

    /// Largest entry modulus over all blocks.
    pub fn max_abs(&self) -> T {
        self.blocks.iter().fold(T::zero(), |acc, b| acc.max(max_abs(b)))
    }

    /// `Σ_r ‖a_r‖_F²` square-rooted.
    pub fn frobenius(&self) -> T {
        self.blocks
            .iter()
            .fold(T::zero(), |acc, b| {
                acc + b.iter().fold(T::zero(), |s, z| s + z.norm_sqr())
            })
            .sqrt()
    }

    /// Largest entry of `a - b` in modulus.
    pub fn distance(&self, other: &Self) -> Result<T> {
        Ok(self.sub(other)?.max_abs())
    }

    /// `max_r ‖a_r a_r† − 1‖`.
    pub fn unitarity_residual(&self) -> T {
        self.blocks
            .iter()
            .fold(T::zero(), |acc, b| acc.max(linalg::unitarity_residual(b)))
    }

    pub fn hermiticity_residual(&self) -> T {
        self.blocks
            .iter()
            .fold(T::zero(), |acc, b| acc.max(max_abs(&(b - b.adjoint()))))
    }

    /// Ginibre-random element.
    pub fn random<R: Rng + ?Sized>(shape: &AlgebraShape, rng: &mut R) -> Self {
        Self::from_fn(shape, |r| linalg::ginibre(shape.block_size(r), rng))
    }

    pub fn random_hermitian<R: Rng + ?Sized>(shape: &AlgebraShape, rng: &mut R) -> Self {
        Self::from_fn(shape, |r| linalg::random_hermitian(shape.block_size(r), rng))
    }

    /// `exp(i h)` for Hermitian `h`.
    pub fn exp_i_hermitian(h: &Self) -> Self {
        Self::from_fn(&h.shape, |r| {
            HermitianEigen::new(&h.blocks[r]).map(|x| Complex::new(x.cos(), x.sin()))
        })
    }
}

/// Haar-distributed unitary element, deterministic in `seed`.
pub fn random_unitary<T: Real>(shape: &AlgebraShape, seed: u64) -> AlgebraElement<T> {
    random_unitary_with(shape, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn random_unitary_with<T: Real, R: Rng + ?Sized>(shape: &AlgebraShape, rng: &mut R) -> AlgebraElement<T> {
    AlgebraElement::from_fn(shape, |r| linalg::haar_unitary(shape.block_size(r), rng))
}

/// A faithful state `ω(a) = tr_A(R a)` given by its density element `R`.
#[derive(Clone, Debug)]
pub struct FaithfulState<T: Real> {
    density: AlgebraElement<T>,
    eigen: Vec<HermitianEigen<T>>,
}

impl<T: Real> FaithfulState<T> {
    /// Validates `R = R*`, `tr_A(R) = 1` and strict positivity.
    pub fn new(density: AlgebraElement<T>) -> Result<Self> {
        let herm = to_f64(density.hermiticity_residual());
        if herm > tolerance::for_scalar::<T>(tolerance::HERMITICITY) {
            return Err(GnsError::InvalidState(format!(
                "density element is not Hermitian (residual {herm:.3e})"
            )));
        }
        let tr = density.trace();
        let tr_err = to_f64((tr - from_real(T::one())).norm_sqr().sqrt());
        if tr_err > tolerance::for_scalar::<T>(tolerance::STATE_TRACE) {
            return Err(GnsError::InvalidState(format!(
                "tr_A(R) = {:.12} differs from 1",
                to_f64(tr.re)
            )));
        }
        let density = AlgebraElement::from_fn(density.shape(), |r| linalg::hermitian_part(density.block(r)));
        let eigen: Vec<_> = density.blocks().iter().map(HermitianEigen::new).collect();
        for (r, e) in eigen.iter().enumerate() {
            let min = to_f64(e.min());
            if min <= tolerance::POSITIVITY {
                return Err(GnsError::NotFaithful(format!(
                    "block {r} has eigenvalue {min:.3e} <= {:.0e}",
                    tolerance::POSITIVITY
                )));
            }
        }
        Ok(Self { density, eigen })
    }

    /// `R = ⊕_r V_r diag(spectrum_r) V_r*`; `bases` defaults to identities.
    pub fn from_spectra(shape: &AlgebraShape, spectra: &[Vec<T>], bases: Option<&[CMat<T>]>) -> Result<Self> {
        if spectra.len() != shape.num_blocks() {
            return Err(GnsError::ShapeMismatch(format!(
                "{} spectra for {} blocks",
                spectra.len(),
                shape.num_blocks()
            )));
        }
        let mut blocks = Vec::with_capacity(spectra.len());
        for (r, spec) in spectra.iter().enumerate() {
            let n = shape.block_size(r);
            if spec.len() != n {
                return Err(GnsError::ShapeMismatch(format!(
                    "spectrum {r} has {} values, block size is {n}",
                    spec.len()
                )));
            }
            let diag =
                CMat::<T>::from_diagonal(&DVector::from_iterator(n, spec.iter().map(|&x| from_real(x))));
            let block = match bases {
                Some(b) => {
                    let v = b.get(r).ok_or_else(|| {
                        GnsError::ShapeMismatch(format!("missing eigenbasis for block {r}"))
                    })?;
                    if v.nrows() != n || v.ncols() != n {
                        return Err(GnsError::ShapeMismatch(format!("eigenbasis {r} must be {n}x{n}")));
                    }
                    let res = to_f64(linalg::unitarity_residual(v));
                    if res > tolerance::for_scalar::<T>(1e-10) {
                        return Err(GnsError::InvalidState(format!(
                            "eigenbasis {r} is not unitary (residual {res:.3e})"
                        )));
                    }
                    v * diag * v.adjoint()
                }
                None => diag,
            };
            blocks.push(block);
        }
        Self::new(AlgebraElement::new(shape.clone(), blocks)?)
    }

    /// The tracial state `R = 1 / Σ n_r`.
    pub fn tracial(shape: &AlgebraShape) -> Self {
        let w = re::<T>(1.0 / shape.matrix_dim() as f64);
        Self::new(AlgebraElement::identity(shape).scale(from_real(w))).expect("tracial state is faithful")
    }

    /// Random faithful state: spectra drawn uniformly from `[floor, 1]`,
    /// normalized, with a Haar-random eigenbasis per block.
    pub fn random<R: Rng + ?Sized>(shape: &AlgebraShape, floor: f64, rng: &mut R) -> Self {
        let raw: Vec<Vec<f64>> = shape
            .blocks()
            .iter()
            .map(|&n| (0..n).map(|_| rng.random_range(floor..=1.0)).collect())
            .collect();
        let total: f64 = raw.iter().flatten().sum();
        let spectra: Vec<Vec<T>> = raw
            .iter()
            .map(|s| s.iter().map(|x| re::<T>(x / total)).collect())
            .collect();
        let bases: Vec<CMat<T>> = shape
            .blocks()
            .iter()
            .map(|&n| linalg::haar_unitary(n, rng))
            .collect();
        let mut state =
            Self::from_spectra(shape, &spectra, Some(&bases)).expect("random spectra are faithful");
        // Remove the O(eps) trace drift from the basis rotation.
        let tr = state.density.trace().re;
        state.density = state.density.scale(from_real(T::one() / tr));
        for e in &mut state.eigen {
            e.values /= tr;
        }
        state
    }

    pub fn shape(&self) -> &AlgebraShape {
        self.density.shape()
    }

    pub fn density(&self) -> &AlgebraElement<T> {
        &self.density
    }

    /// Eigenvalues of block `r` of `R`, descending.
    pub fn spectrum(&self, r: usize) -> &DVector<T> {
        &self.eigen[r].values
    }

    /// All eigenvalues of `R` in block order.
    pub fn full_spectrum(&self) -> Vec<T> {
        self.eigen.iter().flat_map(|e| e.values.iter().copied()).collect()
    }

    /// Unitary whose columns are the eigenvectors of block `r`.
    pub fn eigenbasis(&self, r: usize) -> &CMat<T> {
        &self.eigen[r].vectors
    }

    /// `ω(a) = tr_A(R a)`.
    pub fn expectation(&self, a: &AlgebraElement<T>) -> Result<C<T>> {
        Ok(self.density.mul(a)?.trace())
    }

    /// Von Neumann entropy of `R` with respect to `tr_A`, in nats.
    pub fn entropy(&self) -> T {
        crate::entropy::shannon(self.full_spectrum())
    }
}

/// A system of matrix units `e^{(r)}_{ij} = V_r E_{ij} V_r*`.
#[derive(Clone, Debug)]
pub struct MatrixUnitSystem<T: Real> {
    shape: AlgebraShape,
    bases: Vec<CMat<T>>,
}

impl<T: Real> MatrixUnitSystem<T> {
    pub fn standard(shape: &AlgebraShape) -> Self {
        Self {
            shape: shape.clone(),
            bases: shape.blocks().iter().map(|&n| linalg::identity(n)).collect(),
        }
    }

    pub fn from_bases(shape: &AlgebraShape, bases: Vec<CMat<T>>) -> Result<Self> {
        AlgebraElement::new(shape.clone(), bases.clone())?;
        for (r, v) in bases.iter().enumerate() {
            let res = to_f64(linalg::unitarity_residual(v));
            if res > tolerance::for_scalar::<T>(1e-10) {
                return Err(GnsError::InvalidState(format!(
                    "basis {r} is not unitary (residual {res:.3e})"
                )));
            }
        }
        Ok(Self {
            shape: shape.clone(),
            bases,
        })
    }

    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    /// Per-block unitary aligning the units with the reference basis.
    pub fn basis(&self, r: usize) -> &CMat<T> {
        &self.bases[r]
    }

    pub fn unit(&self, r: usize, i: usize, j: usize) -> AlgebraElement<T> {
        let v = &self.bases[r];
        let block = v.column(i) * v.column(j).adjoint();
        AlgebraElement::from_block(&self.shape, r, block).expect("unit block has block size")
    }

    /// All `(r, i, j)` in block order, row-major within a block.
    pub fn indices(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::with_capacity(self.shape.algebra_dim());
        for (r, &n) in self.shape.blocks().iter().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    out.push((r, i, j));
                }
            }
        }
        out
    }

    /// `a` expressed in the units: block `r` becomes `V_r* a_r V_r`.
    pub fn coordinates(&self, a: &AlgebraElement<T>) -> Vec<CMat<T>> {
        a.blocks()
            .iter()
            .zip(&self.bases)
            .map(|(b, v)| v.adjoint() * b * v)
            .collect()
    }

    /// Inverse of [`coordinates`](Self::coordinates).
    pub fn element(&self, coords: Vec<CMat<T>>) -> AlgebraElement<T> {
        let blocks = coords
            .into_iter()
            .zip(&self.bases)
            .map(|(c, v)| v * c * v.adjoint())
            .collect();
        AlgebraElement {
            shape: self.shape.clone(),
            blocks,
        }
    }

    /// Largest violation of `e_ij e_kl = δ_jk e_il` (across blocks too),
    /// `e_ij* = e_ji` and `Σ_i e_ii = 1_{A_r}`.
    pub fn relations_residual(&self) -> T {
        let idx = self.indices();
        let units: Vec<_> = idx.iter().map(|&(r, i, j)| self.unit(r, i, j)).collect();
        let mut worst = T::zero();
        for (a, &(r, i, j)) in idx.iter().enumerate() {
            for (b, &(s, k, l)) in idx.iter().enumerate() {
                let prod = units[a].mul(&units[b]).expect("same shape");
                let expect = if r == s && j == k {
                    self.unit(r, i, l)
                } else {
                    AlgebraElement::zero(&self.shape)
                };
                worst = worst.max(prod.distance(&expect).expect("same shape"));
            }
            let star = units[a].adjoint();
            worst = worst.max(star.distance(&self.unit(r, j, i)).expect("same shape"));
        }
        for (r, &n) in self.shape.blocks().iter().enumerate() {
            let mut sum = AlgebraElement::zero(&self.shape);
            for i in 0..n {
                sum = sum.add(&self.unit(r, i, i)).expect("same shape");
            }
            let target = AlgebraElement::block_identity(&self.shape, r);
            worst = worst.max(sum.distance(&target).expect("same shape"));
        }
        worst
    }
}

/// Matrix units built from the spectral projectors of `R`, so that
/// `R = Σ_{r,i} λ^{(r)}_i e^{(r)}_{ii}`.
pub fn canonical_matrix_units<T: Real>(state: &FaithfulState<T>) -> Result<MatrixUnitSystem<T>> {
    let shape = state.shape();
    for r in 0..shape.num_blocks() {
        let min = to_f64(state.eigen[r].min());
        if min <= tolerance::POSITIVITY {
            return Err(GnsError::NotFaithful(format!("block {r} eigenvalue {min:.3e}")));
        }
    }
    let bases = (0..shape.num_blocks())
        .map(|r| state.eigenbasis(r).clone())
        .collect();
    Ok(MatrixUnitSystem {
        shape: shape.clone(),
        bases,
    })
}

//! The GNS Hilbert space `H_ω = (A, ⟨a|b⟩ = ω(a*b))` of a faithful state,
//! the left-regular representation `π_ω` and the cyclic vector `|Ω⟩ = |1⟩`.
//!
//! Coordinates are taken in the orthonormal basis
//! `|ê^{(r)}_{ij}⟩ = (λ^{(r)}_j)^{-1/2} |e^{(r)}_{ij}⟩` built from the matrix
//! units that diagonalize `R`. Basis order: blocks in shape order, then
//! row-major `(i, j)` inside each block. In these coordinates block `r` of a
//! vector is the `n_r × n_r` matrix `C = (V_r* a_r V_r) Λ_r^{1/2}`.

use std::ops::Range;

use nalgebra::{Complex, DVector};

use crate::algebra::{canonical_matrix_units, AlgebraElement, AlgebraShape, FaithfulState, MatrixUnitSystem};
use crate::error::{GnsError, Result};
use crate::linalg::{self, HermitianEigen};
use crate::scalar::{from_real, max_abs, re, to_f64, CMat, CVec, Real, C};
use crate::tolerance;

/// Operator on `H_ω` as a matrix in the orthonormal basis.
pub type GnsOperator<T> = CMat<T>;

#[derive(Clone, Debug)]
pub struct GnsRep<T: Real> {
    shape: AlgebraShape,
    state: FaithfulState<T>,
    units: MatrixUnitSystem<T>,
    offsets: Vec<usize>,
    sqrt_lambda: Vec<DVector<T>>,
    omega: CVec<T>,
}

/// Builds the GNS representation of `state`, which must live on `shape`.
pub fn build_gns<T: Real>(shape: &AlgebraShape, state: &FaithfulState<T>) -> Result<GnsRep<T>> {
    if state.shape() != shape {
        return Err(GnsError::ShapeMismatch(format!(
            "state lives on {}, requested {}",
            state.shape(),
            shape
        )));
    }
    GnsRep::new(state.clone())
}

impl<T: Real> GnsRep<T> {
    pub fn new(state: FaithfulState<T>) -> Result<Self> {
        let shape = state.shape().clone();
        let units = canonical_matrix_units(&state)?;
        let sqrt_lambda = (0..shape.num_blocks())
            .map(|r| state.spectrum(r).map(|l| l.sqrt()))
            .collect();
        let offsets = shape.gns_offsets();
        let mut rep = Self {
            shape: shape.clone(),
            state,
            units,
            offsets,
            sqrt_lambda,
            omega: CVec::zeros(shape.gns_dim()),
        };
        rep.omega = rep.vector(&AlgebraElement::identity(&shape));
        Ok(rep)
    }

    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    pub fn state(&self) -> &FaithfulState<T> {
        &self.state
    }

    pub fn units(&self) -> &MatrixUnitSystem<T> {
        &self.units
    }

    pub fn dim(&self) -> usize {
        self.shape.gns_dim()
    }

    /// Coordinate range of `H^r = P^r H_ω`.
    pub fn block_range(&self, r: usize) -> Range<usize> {
        let n = self.shape.block_size(r);
        self.offsets[r]..self.offsets[r] + n * n
    }

    pub fn index(&self, r: usize, i: usize, j: usize) -> usize {
        self.offsets[r] + i * self.shape.block_size(r) + j
    }

    /// `(r, i, j)` label of a basis index.
    pub fn label(&self, idx: usize) -> (usize, usize, usize) {
        let r = self
            .offsets
            .iter()
            .rposition(|&o| o <= idx)
            .expect("index in range");
        let n = self.shape.block_size(r);
        let local = idx - self.offsets[r];
        (r, local / n, local % n)
    }

    /// The algebra element `(λ_j)^{-1/2} e_{ij}` behind basis vector `idx`.
    pub fn basis_element(&self, idx: usize) -> AlgebraElement<T> {
        let (r, i, j) = self.label(idx);
        let w = T::one() / self.sqrt_lambda[r][j];
        self.units.unit(r, i, j).scale(from_real(w))
    }

    /// Coordinates of `|a⟩`.
    pub fn vector(&self, a: &AlgebraElement<T>) -> CVec<T> {
        let mut v = CVec::zeros(self.dim());
        for (r, c) in self.units.coordinates(a).into_iter().enumerate() {
            let n = self.shape.block_size(r);
            for i in 0..n {
                for j in 0..n {
                    v[self.index(r, i, j)] = c[(i, j)] * from_real(self.sqrt_lambda[r][j]);
                }
            }
        }
        v
    }

    /// The algebra element whose vector is `v`.
    pub fn element(&self, v: &CVec<T>) -> AlgebraElement<T> {
        let coords = (0..self.shape.num_blocks())
            .map(|r| {
                let n = self.shape.block_size(r);
                CMat::from_fn(n, n, |i, j| {
                    v[self.index(r, i, j)] / from_real(self.sqrt_lambda[r][j])
                })
            })
            .collect();
        self.units.element(coords)
    }

    /// Coordinates of the cyclic vector `|Ω⟩ = |1_A⟩`.
    pub fn omega(&self) -> &CVec<T> {
        &self.omega
    }

    /// `⟨a|b⟩ = ω(a* b)`.
    pub fn inner(&self, a: &AlgebraElement<T>, b: &AlgebraElement<T>) -> Result<C<T>> {
        self.state.expectation(&a.adjoint().mul(b)?)
    }

    /// Matrix of `π_ω(a)|b⟩ = |ab⟩` in the orthonormal basis.
    pub fn represent(&self, a: &AlgebraElement<T>) -> Result<GnsOperator<T>> {
        if a.shape() != &self.shape {
            return Err(GnsError::ShapeMismatch(format!(
                "element on {}, representation on {}",
                a.shape(),
                self.shape
            )));
        }
        // Block r of a vector is C = (V* b V) Λ^{1/2}, on which π(a) acts by
        // left multiplication with V* a V, i.e. as (V* a V) ⊗ 1 row-major.
        let d = self.dim();
        let mut m = CMat::zeros(d, d);
        for (r, c) in self.units.coordinates(a).into_iter().enumerate() {
            let n = self.shape.block_size(r);
            for i in 0..n {
                for k in 0..n {
                    let z = c[(i, k)];
                    for j in 0..n {
                        m[(self.index(r, i, j), self.index(r, k, j))] = z;
                    }
                }
            }
        }
        Ok(m)
    }

    /// `π_ω` of every matrix unit, in `units().indices()` order.
    pub fn represented_units(&self) -> Vec<GnsOperator<T>> {
        self.units
            .indices()
            .into_iter()
            .map(|(r, i, j)| self.represent(&self.units.unit(r, i, j)).expect("same shape"))
            .collect()
    }

    /// `P^r = π_ω(1_{A_r})`.
    pub fn block_projector(&self, r: usize) -> GnsOperator<T> {
        self.represent(&AlgebraElement::block_identity(&self.shape, r))
            .expect("same shape")
    }

    /// `Σ_r (1/n_r) Tr_{H^r}(x)`. On `π_ω(A)` this is `tr_A`, on the
    /// commutant it is the trace `tr_{π_ω(A)'}`.
    pub fn block_weighted_trace(&self, x: &GnsOperator<T>) -> C<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for r in 0..self.shape.num_blocks() {
            let w = from_real(T::one() / re::<T>(self.shape.block_size(r) as f64));
            let mut t = Complex::new(T::zero(), T::zero());
            for k in self.block_range(r) {
                t += x[(k, k)];
            }
            acc += t * w;
        }
        acc
    }

    /// Preimage under `π_ω` of an operator in `π_ω(A)`, via `π(a)|Ω⟩ = |a⟩`.
    /// Returns the element and `‖π(a) − x‖_max` as membership residual.
    pub fn preimage(&self, x: &GnsOperator<T>) -> (AlgebraElement<T>, T) {
        let a = self.element(&(x * &self.omega));
        let back = self.represent(&a).expect("same shape");
        let res = max_abs(&(back - x));
        (a, res)
    }

    /// Gram matrix `⟨ê_a|ê_b⟩` evaluated through `ω`.
    pub fn gram_matrix(&self) -> CMat<T> {
        let d = self.dim();
        let basis: Vec<_> = (0..d).map(|b| self.basis_element(b)).collect();
        CMat::from_fn(d, d, |a, b| self.inner(&basis[a], &basis[b]).expect("same shape"))
    }

    /// The density element `R_A ∈ A` with `Tr(ρ π(a)) = tr_A(R_A a)` for
    /// all `a`: the restriction of `ρ` to the subalgebra `π_ω(A)`.
    pub fn restrict_to_a(&self, rho: &GnsOperator<T>) -> Result<AlgebraElement<T>> {
        validate_density(rho, self.dim())?;
        let idx = self.units.indices();
        // tr_A(X e_ij) = (V* X V)_{ji}: the pairing with the unit basis is a
        // permutation, so the normal equations are solved entrywise.
        let mut coords: Vec<CMat<T>> = self.shape.blocks().iter().map(|&n| CMat::zeros(n, n)).collect();
        let mut pairings = Vec::with_capacity(idx.len());
        for &(r, i, j) in &idx {
            let e = self.units.unit(r, i, j);
            let t = trace_product(rho, &self.represent(&e)?);
            coords[r][(j, i)] = t;
            pairings.push((e, t));
        }
        let ra = self.units.element(coords);
        let mut worst = T::zero();
        for (e, t) in &pairings {
            let lhs = ra.mul(e)?.trace();
            worst = worst.max((lhs - t).norm_sqr().sqrt());
        }
        if to_f64(worst) > tolerance::for_scalar::<T>(tolerance::RESTRICTION_RESIDUAL) {
            return Err(GnsError::Internal(format!(
                "restriction residual {:.3e}",
                to_f64(worst)
            )));
        }
        Ok(ra)
    }
}

/// `Tr(a b)` without forming the product.
pub fn trace_product<T: Real>(a: &CMat<T>, b: &CMat<T>) -> C<T> {
    let mut acc = Complex::new(T::zero(), T::zero());
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// `|v⟩⟨v|`.
pub fn projector_onto<T: Real>(v: &CVec<T>) -> GnsOperator<T> {
    v * v.adjoint()
}

/// Checks Hermiticity, unit trace and positivity within `1e-8`.
pub fn validate_density<T: Real>(rho: &GnsOperator<T>, dim: usize) -> Result<()> {
    if rho.nrows() != dim || rho.ncols() != dim {
        return Err(GnsError::ShapeMismatch(format!(
            "density is {}x{}, expected {dim}x{dim}",
            rho.nrows(),
            rho.ncols()
        )));
    }
    let tol = tolerance::for_scalar::<T>(tolerance::DENSITY);
    let herm = to_f64(max_abs(&(rho - rho.adjoint())));
    if herm > tol {
        return Err(GnsError::InvalidDensity(format!(
            "not Hermitian (residual {herm:.3e})"
        )));
    }
    let tr = rho.trace();
    let tr_err = to_f64((tr - from_real(T::one())).norm_sqr().sqrt());
    if tr_err > tol {
        return Err(GnsError::InvalidDensity(format!("trace {:.10}", to_f64(tr.re))));
    }
    let min = to_f64(HermitianEigen::new(rho).min());
    if min < -tol {
        return Err(GnsError::InvalidDensity(format!("negative eigenvalue {min:.3e}")));
    }
    Ok(())
}

/// Identity on `H_ω`.
pub fn identity_operator<T: Real>(rep: &GnsRep<T>) -> GnsOperator<T> {
    linalg::identity(rep.dim())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn m2(l1: f64, l2: f64) -> GnsRep<f64> {
        let s = AlgebraShape::full(2).unwrap();
        GnsRep::new(FaithfulState::from_spectra(&s, &[vec![l1, l2]], None).unwrap()).unwrap()
    }

    #[test]
    fn m2_inner_products() {
        let rep = m2(0.7, 0.3);
        assert_eq!(rep.dim(), 4);
        let e11 = AlgebraElement::standard_unit(rep.shape(), 0, 0, 0);
        assert!((rep.inner(&e11, &e11).unwrap() - cx(0.7, 0.0)).norm() < 1e-15);
        let g = rep.gram_matrix();
        assert!(max_abs(&(g - CMat::identity(4, 4))) < 1e-12);
    }

    #[test]
    fn abelian_basis() {
        let s = AlgebraShape::abelian(2).unwrap();
        let p: f64 = 0.3;
        let st = FaithfulState::from_spectra(&s, &[vec![p], vec![1.0 - p]], None).unwrap();
        let rep = GnsRep::new(st).unwrap();
        assert_eq!(rep.dim(), 2);
        let b0 = rep.basis_element(0);
        let expect = AlgebraElement::block_identity(&s, 0).scale(cx(p.powf(-0.5), 0.0));
        assert!(b0.distance(&expect).unwrap() < 1e-14);
        assert!((rep.omega()[0] - cx(p.sqrt(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn tracial_gram() {
        let n = 3;
        let s = AlgebraShape::full(n).unwrap();
        let rep = GnsRep::new(FaithfulState::<f64>::tracial(&s)).unwrap();
        for (a, &(_, i, j)) in rep.units().indices().iter().enumerate() {
            for (b, &(_, k, l)) in rep.units().indices().iter().enumerate() {
                let ea = rep.units().unit(0, i, j);
                let eb = rep.units().unit(0, k, l);
                let expect = if i == k && j == l { 1.0 / n as f64 } else { 0.0 };
                let got = rep.inner(&ea, &eb).unwrap();
                assert!((got - cx(expect, 0.0)).norm() < 1e-14, "{a} {b}");
            }
        }
    }

    #[test]
    fn represent_identity_and_purification() {
        let s = AlgebraShape::new(vec![2, 1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let st = FaithfulState::<f64>::random(&s, 0.05, &mut rng);
        let rep = GnsRep::new(st.clone()).unwrap();
        let one = rep.represent(&AlgebraElement::identity(&s)).unwrap();
        assert!(max_abs(&(one - CMat::identity(5, 5))) < 1e-13);
        let a = AlgebraElement::random(&s, &mut rng);
        let pa = rep.represent(&a).unwrap();
        let v = &pa * rep.omega();
        assert!((v - rep.vector(&a)).camax() < 1e-13);
        let expval = (rep.omega().adjoint() * &pa * rep.omega())[(0, 0)];
        assert!((expval - st.expectation(&a).unwrap()).norm() < 1e-13);
        assert!((rep.omega().norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn represent_matches_left_multiplication() {
        let s = AlgebraShape::new(vec![3, 1, 2]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let rep = GnsRep::new(FaithfulState::<f64>::random(&s, 0.05, &mut rng)).unwrap();
        let a = AlgebraElement::random(&s, &mut rng);
        let pa = rep.represent(&a).unwrap();
        for b in 0..rep.dim() {
            let col = rep.vector(&a.mul(&rep.basis_element(b)).unwrap());
            assert!((pa.column(b) - col).camax() < 1e-12, "column {b}");
        }
    }

    #[test]
    fn represent_rejects_foreign_shape() {
        let rep = m2(0.6, 0.4);
        let a = AlgebraElement::<f64>::identity(&AlgebraShape::abelian(2).unwrap());
        assert!(matches!(rep.represent(&a), Err(GnsError::ShapeMismatch(_))));
    }

    #[test]
    fn restriction_of_purification_is_r() {
        let s = AlgebraShape::new(vec![2, 2, 1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let rep = GnsRep::new(FaithfulState::<f64>::random(&s, 0.05, &mut rng)).unwrap();
        let rho = projector_onto(rep.omega());
        let ra = rep.restrict_to_a(&rho).unwrap();
        assert!(ra.distance(rep.state().density()).unwrap() < 1e-13);
    }

    #[test]
    fn restriction_of_maximally_mixed_tracial() {
        let s = AlgebraShape::full(2).unwrap();
        let rep = GnsRep::new(FaithfulState::<f64>::tracial(&s)).unwrap();
        let rho = CMat::identity(4, 4) * cx(0.25, 0.0);
        let ra = rep.restrict_to_a(&rho).unwrap();
        let half = AlgebraElement::identity(&s).scale(cx(0.5, 0.0));
        assert!(ra.distance(&half).unwrap() < 1e-15);
    }

    #[test]
    fn restriction_rejects_invalid_density() {
        let rep = m2(0.7, 0.3);
        let not_normalized = CMat::<f64>::identity(4, 4);
        assert!(matches!(
            rep.restrict_to_a(&not_normalized),
            Err(GnsError::InvalidDensity(_))
        ));
        let mut neg = CMat::<f64>::zeros(4, 4);
        neg[(0, 0)] = cx(1.5, 0.0);
        neg[(1, 1)] = cx(-0.5, 0.0);
        assert!(matches!(
            rep.restrict_to_a(&neg),
            Err(GnsError::InvalidDensity(_))
        ));
    }

    #[test]
    fn labels_round_trip() {
        let s = AlgebraShape::new(vec![2, 1, 3]).unwrap();
        let rep = GnsRep::new(FaithfulState::<f64>::tracial(&s)).unwrap();
        for idx in 0..rep.dim() {
            let (r, i, j) = rep.label(idx);
            assert_eq!(rep.index(r, i, j), idx);
        }
    }
}

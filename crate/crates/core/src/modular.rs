//! Tomita-Takesaki data of the GNS vector: the Tomita operator `S`, its
//! polar decomposition `S = J Δ^{1/2}`, the commutant `π_ω(A)'`, and
//! numerical checks of the modular relations.

use nalgebra::{Complex, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{random_unitary_with, AlgebraElement, AlgebraShape};
use crate::commutant::commutant_of;
use crate::error::{GnsError, Result};
use crate::gns::{GnsOperator, GnsRep};
use crate::linalg::{self, HermitianEigen};
use crate::scalar::{cx, frobenius, from_real, max_abs, re, to_f64, CMat, CVec, Real};
use crate::span::OperatorSpan;

/// An antilinear operator `v ↦ M · conj(v)` in onb coordinates.
///
/// Composition and adjoint rules (for matrices `M`, `N` and linear `L`):
///
/// * antilinear ∘ antilinear is linear with matrix `M · conj(N)`;
/// * antilinear ∘ linear is antilinear with matrix `M · conj(L)`;
/// * linear ∘ antilinear is antilinear with matrix `L · M`;
/// * the adjoint, defined by `⟨T* x, y⟩ = ⟨T y, x⟩`, has matrix `Mᵀ`.
#[derive(Clone, Debug, PartialEq)]
pub struct AntilinearOp<T: Real> {
    pub matrix: CMat<T>,
}

impl<T: Real> AntilinearOp<T> {
    pub fn new(matrix: CMat<T>) -> Self {
        Self { matrix }
    }

    pub fn apply(&self, v: &CVec<T>) -> CVec<T> {
        &self.matrix * v.conjugate()
    }

    pub fn adjoint(&self) -> Self {
        Self::new(self.matrix.transpose())
    }

    /// `self ∘ other`, a linear operator.
    pub fn compose(&self, other: &Self) -> CMat<T> {
        linalg::mul(&self.matrix, &other.matrix.conjugate())
    }

    /// `self ∘ l`.
    pub fn after_linear(&self, l: &CMat<T>) -> Self {
        Self::new(linalg::mul(&self.matrix, &l.conjugate()))
    }

    /// `l ∘ self`.
    pub fn before_linear(&self, l: &CMat<T>) -> Self {
        Self::new(linalg::mul(l, &self.matrix))
    }

    /// The linear operator `self ∘ x ∘ self`.
    pub fn sandwich(&self, x: &CMat<T>) -> CMat<T> {
        linalg::mul(
            &linalg::mul(&self.matrix, &x.conjugate()),
            &self.matrix.conjugate(),
        )
    }
}

/// `S|a⟩ = |a*⟩`. Column `b` of the matrix is `S|ê_b⟩`, the basis vectors
/// being real in their own coordinates.
pub fn tomita_s<T: Real>(rep: &GnsRep<T>) -> AntilinearOp<T> {
    let d = rep.dim();
    let mut m = CMat::zeros(d, d);
    for b in 0..d {
        let col = rep.vector(&rep.basis_element(b).adjoint());
        m.set_column(b, &col);
    }
    AntilinearOp::new(m)
}

#[derive(Clone, Debug)]
pub struct ModularData<T: Real> {
    pub s: AntilinearOp<T>,
    /// `Δ = S* S`.
    pub delta: GnsOperator<T>,
    pub delta_eigen: HermitianEigen<T>,
    pub j: AntilinearOp<T>,
    /// HS-orthonormal basis of `π_ω(A)'`, filled by [`ModularData::with_commutant`].
    pub commutant_basis: Vec<GnsOperator<T>>,
}

/// Polar decomposition `S = J Δ^{1/2}` with `Δ = S* S`.
pub fn polar_decompose<T: Real>(s: &AntilinearOp<T>) -> Result<ModularData<T>> {
    let delta = s.adjoint().compose(s);
    let delta = linalg::hermitian_part(&delta);
    let eig = HermitianEigen::new(&delta);
    let scale = eig.max();
    if scale <= T::zero() || eig.min() <= re::<T>(1e-14) * scale {
        return Err(GnsError::Internal(format!(
            "Tomita operator is singular (min eigenvalue of Δ {:.3e})",
            to_f64(eig.min())
        )));
    }
    let inv_sqrt = eig.map(|x| from_real(T::one() / x.sqrt()));
    let j = s.after_linear(&inv_sqrt);
    Ok(ModularData {
        s: s.clone(),
        delta,
        delta_eigen: eig,
        j,
        commutant_basis: Vec::new(),
    })
}

/// Builds `S`, `Δ`, `J` and the commutant for a representation.
pub fn modular_data<T: Real>(rep: &GnsRep<T>) -> Result<ModularData<T>> {
    let md = polar_decompose(&tomita_s(rep))?;
    Ok(md.with_commutant(rep))
}

impl<T: Real> ModularData<T> {
    pub fn with_commutant(mut self, rep: &GnsRep<T>) -> Self {
        self.commutant_basis = commutant(rep);
        self
    }

    pub fn delta_power(&self, p: T) -> GnsOperator<T> {
        self.delta_eigen.map(|x| from_real(x.powf(p)))
    }

    /// `Δ^{it}`.
    pub fn delta_it(&self, t: T) -> GnsOperator<T> {
        self.delta_eigen.map(|x| {
            let phase = t * x.ln();
            Complex::new(phase.cos(), phase.sin())
        })
    }

    /// `J x J` for a linear operator `x`.
    pub fn j_conjugate(&self, x: &GnsOperator<T>) -> GnsOperator<T> {
        self.j.sandwich(x)
    }

    pub fn delta_spectrum(&self) -> &DVector<T> {
        &self.delta_eigen.values
    }

    /// Residuals of the modular axioms on `rep`.
    pub fn axiom_residuals(&self, rep: &GnsRep<T>) -> ModularResiduals {
        let d = rep.dim();
        let id = linalg::identity::<T>(d);
        let omega = rep.omega();
        let j2 = self.j.compose(&self.j);
        let j_sym = max_abs(&(&self.j.matrix - self.j.matrix.transpose()));
        let j_omega = (self.j.apply(omega) - omega).camax();
        let delta_omega = (&self.delta * omega - omega).camax();
        let recon = self.j.after_linear(&self.delta_power(re(0.5)));
        let s_recon = max_abs(&(&recon.matrix - &self.s.matrix));
        let s2 = self.s.compose(&self.s);
        ModularResiduals {
            j_squared: to_f64(max_abs(&(j2 - &id))),
            j_self_adjoint: to_f64(j_sym),
            j_omega: to_f64(j_omega),
            delta_omega: to_f64(delta_omega),
            polar_reconstruction: to_f64(s_recon),
            s_squared: to_f64(max_abs(&(s2 - &id))),
            delta_min_eigenvalue: to_f64(self.delta_eigen.min()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModularResiduals {
    pub j_squared: f64,
    pub j_self_adjoint: f64,
    pub j_omega: f64,
    pub delta_omega: f64,
    pub polar_reconstruction: f64,
    pub s_squared: f64,
    pub delta_min_eigenvalue: f64,
}

impl ModularResiduals {
    /// Largest of the residuals that should vanish.
    pub fn max(&self) -> f64 {
        [
            self.j_squared,
            self.j_self_adjoint,
            self.j_omega,
            self.delta_omega,
            self.polar_reconstruction,
            self.s_squared,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// HS-orthonormal basis of `π_ω(A)'`, the null space of the commutators
/// with `π` of a generating set of `A`.
///
/// The block projectors `π(1_{A_r})` lie in `π_ω(A)`, so every element of
/// the commutant is block diagonal over the `H^r` and the solve runs block
/// by block.
pub fn commutant<T: Real>(rep: &GnsRep<T>) -> Vec<GnsOperator<T>> {
    let gens = generators(rep);
    let d = rep.dim();
    let mut out = Vec::new();
    for r in 0..rep.shape().num_blocks() {
        let range = rep.block_range(r);
        let local: Vec<CMat<T>> = gens
            .iter()
            .map(|g| {
                g.view((range.start, range.start), (range.len(), range.len()))
                    .into_owned()
            })
            .collect();
        for b in commutant_of(&local, 0x5eed + r as u64) {
            let mut full = CMat::zeros(d, d);
            linalg::place_block(&mut full, range.start, &b);
            out.push(full);
        }
    }
    out
}

/// `π(d), π(x), π(x)†` where `d = Σ c_k e_kk` has pairwise distinct weights
/// over all blocks and `x = Σ e_{i,i+1}` is the block-wise shift. Every
/// `e_ii` is a polynomial in `d`, and `e_ii x e_{i+1,i+1} = e_{i,i+1}`, so
/// these generate `A` as a `*`-algebra.
pub fn generators<T: Real>(rep: &GnsRep<T>) -> Vec<GnsOperator<T>> {
    let shape = rep.shape();
    let mut weight = 0.0;
    let diag = shape
        .blocks()
        .iter()
        .map(|&n| {
            CMat::from_fn(n, n, |i, j| {
                if i == j {
                    weight += 1.0;
                    cx(weight, 0.0)
                } else {
                    cx(0.0, 0.0)
                }
            })
        })
        .collect();
    let shift = shape
        .blocks()
        .iter()
        .map(|&n| CMat::from_fn(n, n, |i, j| if j == i + 1 { cx(1.0, 0.0) } else { cx(0.0, 0.0) }))
        .collect();
    let d = rep.represent(&rep.units().element(diag)).expect("same shape");
    let x = rep.represent(&rep.units().element(shift)).expect("same shape");
    if shape.blocks().iter().all(|&n| n == 1) {
        return vec![d];
    }
    vec![d, x.adjoint(), x]
}

/// HS-orthonormal basis of `π_ω(A)`: `π(e_{ij}) / √n_r`.
pub fn algebra_span<T: Real>(rep: &GnsRep<T>) -> OperatorSpan<T> {
    let ops = rep
        .units()
        .indices()
        .into_iter()
        .zip(rep.represented_units())
        .map(|((r, _, _), m)| m * from_real(T::one() / re::<T>(rep.shape().block_size(r) as f64).sqrt()))
        .collect();
    OperatorSpan::from_orthonormal(ops)
}

/// Span of `J π(e) J` over the matrix units. `J` is antiunitary, so the
/// image of the orthonormal basis of `π(A)` is orthonormal.
pub fn conjugated_algebra_span<T: Real>(rep: &GnsRep<T>, md: &ModularData<T>) -> OperatorSpan<T> {
    let ops = algebra_span(rep)
        .basis()
        .iter()
        .map(|x| md.j_conjugate(x))
        .collect();
    OperatorSpan::from_orthonormal(ops)
}

/// Largest distance of `Δ^{it} x Δ^{-it}` from `span π(A)` over the
/// normalized generators `x` of [`generators`] and the given times. The
/// flow is conjugation by a unitary, hence multiplicative, so it preserves
/// `π(A)` exactly when it maps the generators into it.
pub fn check_modular_flow<T: Real>(md: &ModularData<T>, rep: &GnsRep<T>, t_samples: &[T]) -> T {
    let span = algebra_span(rep);
    let gens: Vec<GnsOperator<T>> = generators(rep)
        .into_iter()
        .map(|g| {
            let n = frobenius(&g);
            g * from_real(T::one() / n)
        })
        .collect();
    let mut worst = T::zero();
    for &t in t_samples {
        let u = md.delta_it(t);
        let u_inv = u.adjoint();
        for x in &gens {
            let flowed = linalg::mul(&linalg::mul(&u, x), &u_inv);
            worst = worst.max(span.residual(&flowed));
        }
    }
    worst
}

/// Gauge unitaries built from the matrix units that generate `U_A` as an
/// algebra: the cyclic shift `Σ_i e_{i+1,i}` and a clock `Σ_i ζ_r^i e_{ii}`
/// per block, with block phases chosen so that all clock eigenvalues differ.
pub fn unit_derived_unitaries<T: Real>(rep: &GnsRep<T>) -> Vec<AlgebraElement<T>> {
    let shape = rep.shape();
    let units = rep.units();
    let mut shift = AlgebraElement::zero(shape);
    let mut clock = AlgebraElement::zero(shape);
    let golden = 0.5 * (5f64.sqrt() - 1.0);
    for (r, &n) in shape.blocks().iter().enumerate() {
        let block_phase = 2.0 * std::f64::consts::PI * golden * (r as f64 + 1.0) / n as f64;
        for i in 0..n {
            let next = (i + 1) % n;
            shift = shift.add(&units.unit(r, next, i)).expect("same shape");
            let angle = block_phase + 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            let z = Complex::new(re::<T>(angle.cos()), re::<T>(angle.sin()));
            clock = clock.add(&units.unit(r, i, i).scale(z)).expect("same shape");
        }
    }
    vec![shift, clock]
}

/// `U(g) = J π(g) J`.
pub fn lift<T: Real>(rep: &GnsRep<T>, md: &ModularData<T>, g: &AlgebraElement<T>) -> Result<GnsOperator<T>> {
    Ok(md.j_conjugate(&rep.represent(g)?))
}

/// Projector distance between `{U(g)}'` and `span π(A)` for an explicit
/// list of gauge elements.
pub fn joint_commutant_distance<T: Real>(
    rep: &GnsRep<T>,
    md: &ModularData<T>,
    gauges: &[AlgebraElement<T>],
) -> Result<(usize, T)> {
    let mut gens = Vec::with_capacity(2 * gauges.len());
    for g in gauges {
        let u = lift(rep, md, g)?;
        gens.push(u.adjoint());
        gens.push(u);
    }
    let joint = OperatorSpan::from_orthonormal(commutant_of(&gens, 0x7e57));
    let dim = joint.dim();
    Ok((dim, joint.distance(&algebra_span(rep))))
}

/// Draws `sample_count` Haar gauge elements (plus the unit-derived
/// generators) and returns the projector distance between their joint
/// commutant `U(G)'` and `π_ω(A)`.
pub fn verify_gauge_commutant<T: Real>(
    rep: &GnsRep<T>,
    md: &ModularData<T>,
    sample_count: usize,
    seed: u64,
) -> Result<T> {
    let mut gauges = sampled_gauges(rep.shape(), sample_count, seed);
    gauges.extend(unit_derived_unitaries(rep));
    Ok(joint_commutant_distance(rep, md, &gauges)?.1)
}

/// Distance as a function of the number of Haar samples, without the
/// unit-derived generators.
pub fn gauge_commutant_curve<T: Real>(
    rep: &GnsRep<T>,
    md: &ModularData<T>,
    max_samples: usize,
    seed: u64,
) -> Result<Vec<(usize, usize, T)>> {
    let all = sampled_gauges(rep.shape(), max_samples, seed);
    (1..=max_samples)
        .map(|k| {
            let (dim, dist) = joint_commutant_distance(rep, md, &all[..k])?;
            Ok((k, dim, dist))
        })
        .collect()
}

fn sampled_gauges<T: Real>(shape: &AlgebraShape, count: usize, seed: u64) -> Vec<AlgebraElement<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_unitary_with(shape, &mut rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FaithfulState;
    use crate::scalar::cx;

    fn m2(l1: f64, l2: f64) -> GnsRep<f64> {
        let s = AlgebraShape::full(2).unwrap();
        GnsRep::new(FaithfulState::from_spectra(&s, &[vec![l1, l2]], None).unwrap()).unwrap()
    }

    #[test]
    fn s_fixes_omega_and_is_antilinear() {
        let rep = m2(0.7, 0.3);
        let s = tomita_s(&rep);
        assert!((s.apply(rep.omega()) - rep.omega()).camax() < 1e-14);
        let v = CVec::from_fn(4, |k, _| cx(k as f64 + 1.0, 0.5 * k as f64));
        let iv = &v * cx(0.0, 1.0);
        assert!((s.apply(&iv) + s.apply(&v) * cx(0.0, 1.0)).camax() < 1e-14);
    }

    #[test]
    fn s_on_e12() {
        let (l1, l2) = (0.7, 0.3);
        let rep = m2(l1, l2);
        let s = tomita_s(&rep);
        let mut e12 = CVec::zeros(4);
        e12[rep.index(0, 0, 1)] = cx(1.0, 0.0);
        let out = s.apply(&e12);
        let mut expect = CVec::zeros(4);
        expect[rep.index(0, 1, 0)] = cx((l1 / l2).sqrt(), 0.0);
        assert!((out - expect).camax() < 1e-14);
    }

    #[test]
    fn delta_spectrum_m2() {
        let rep = m2(0.7, 0.3);
        let md = polar_decompose(&tomita_s(&rep)).unwrap();
        let mut got: Vec<f64> = md.delta_spectrum().iter().copied().collect();
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut expect = vec![1.0, 1.0, 7.0 / 3.0, 3.0 / 7.0];
        expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (g, e) in got.iter().zip(&expect) {
            assert!((g - e).abs() < 1e-13);
        }
    }

    #[test]
    fn tracial_delta_is_identity() {
        let s = AlgebraShape::full(3).unwrap();
        let rep = GnsRep::new(FaithfulState::<f64>::tracial(&s)).unwrap();
        let md = polar_decompose(&tomita_s(&rep)).unwrap();
        assert!(max_abs(&(md.delta.clone() - CMat::identity(9, 9))) < 1e-13);
        for i in 0..3 {
            for j in 0..3 {
                let mut v = CVec::zeros(9);
                v[rep.index(0, i, j)] = cx(1.0, 0.0);
                let out = md.j.apply(&v);
                assert!((out[rep.index(0, j, i)] - cx(1.0, 0.0)).norm() < 1e-13);
            }
        }
        let flow = check_modular_flow(&md, &rep, &[0.3, 2.0]);
        assert!(flow < 1e-12);
    }

    #[test]
    fn adjoint_convention() {
        let rep = m2(0.6, 0.4);
        let s = tomita_s(&rep);
        let x = CVec::from_fn(4, |k, _| cx(0.3 * k as f64 - 0.2, 1.0 - 0.1 * k as f64));
        let y = CVec::from_fn(4, |k, _| cx(1.0 / (k as f64 + 1.0), -0.4 * k as f64));
        let lhs = s.adjoint().apply(&x).dotc(&y);
        let rhs = s.apply(&y).dotc(&x);
        assert!((lhs - rhs).norm() < 1e-13);
    }

    #[test]
    fn abelian_commutant_is_diagonal() {
        let s = AlgebraShape::abelian(3).unwrap();
        let st = FaithfulState::from_spectra(&s, &[vec![0.2], vec![0.3], vec![0.5]], None).unwrap();
        let rep = GnsRep::new(st).unwrap();
        let basis = commutant(&rep);
        assert_eq!(basis.len(), 3);
        for b in &basis {
            for i in 0..3 {
                for j in 0..3 {
                    if i != j {
                        assert!(b[(i, j)].norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn flow_at_zero_is_exact() {
        let rep = m2(0.7, 0.3);
        let md = polar_decompose(&tomita_s(&rep)).unwrap();
        assert!(check_modular_flow(&md, &rep, &[0.0]) < 1e-14);
        let r = check_modular_flow(&md, &rep, &[0.5, 1.0, std::f64::consts::PI]);
        assert!(r < 1e-8);
    }

    #[test]
    fn gauge_commutant_detects_non_generating_samples() {
        let s = AlgebraShape::new(vec![2, 1]).unwrap();
        let rep = GnsRep::new(FaithfulState::<f64>::tracial(&s)).unwrap();
        let md = modular_data(&rep).unwrap();
        let (dim, dist) = joint_commutant_distance(&rep, &md, &[AlgebraElement::identity(&s)]).unwrap();
        assert_eq!(dim, 25);
        assert!(dist > 0.5);
        assert!(verify_gauge_commutant(&rep, &md, 4, 1).unwrap() < 1e-8);
    }

    #[test]
    fn abelian_gauge_commutant() {
        let s = AlgebraShape::abelian(2).unwrap();
        let st = FaithfulState::from_spectra(&s, &[vec![0.35], vec![0.65]], None).unwrap();
        let rep = GnsRep::new(st).unwrap();
        let md = modular_data(&rep).unwrap();
        let g = crate::algebra::random_unitary::<f64>(&s, 3);
        let (dim, dist) = joint_commutant_distance(&rep, &md, &[g]).unwrap();
        assert_eq!(dim, 2);
        assert!(dist < 1e-10);
    }

    #[test]
    fn curve_settles_after_two_samples() {
        let s = AlgebraShape::new(vec![2, 2]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let rep = GnsRep::new(FaithfulState::<f64>::random(&s, 0.05, &mut rng)).unwrap();
        let md = polar_decompose(&tomita_s(&rep)).unwrap();
        let curve = gauge_commutant_curve(&rep, &md, 4, 5).unwrap();
        assert_eq!(curve.len(), 4);
        // A single unitary generates an abelian algebra with a larger commutant.
        assert!(curve[0].1 > 8);
        for &(k, dim, dist) in &curve[1..] {
            assert_eq!(dim, 8, "k = {k}");
            assert!(dist < 1e-8);
        }
    }
}

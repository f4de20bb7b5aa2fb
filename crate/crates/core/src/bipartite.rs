//! Closed forms for a single full block `A = M_n(C)`, where
//! `Φ|ê_{ij}⟩ = |i⟩ ⊗ |j⟩` identifies `H_ω` with `C^n ⊗ C^n`.
//!
//! Everything here is written directly in product coordinates and is used
//! to cross-check the general GNS, modular and gauge code paths.

use std::fmt;

use nalgebra::{Complex, DVector};

use crate::algebra::AlgebraElement;
use crate::error::{GnsError, Result};
use crate::gauge::{gauge_projectors, restrict_to_b, rho_g};
use crate::gns::{GnsOperator, GnsRep};
use crate::linalg::{self, HermitianEigen};
use crate::modular::ModularData;
use crate::scalar::{from_real, max_abs, re, to_f64, CMat, CVec, Real};
use crate::span::OperatorSpan;
use crate::tolerance;

/// `R = V diag(λ) V*` on `M_n`, with the product-basis labelling of `H_ω`.
#[derive(Clone, Debug)]
pub struct BipartiteModel<T: Real> {
    n: usize,
    lambdas: Vec<T>,
    basis: CMat<T>,
}

impl<T: Real> BipartiteModel<T> {
    pub fn new(lambdas: Vec<T>, basis: CMat<T>) -> Result<Self> {
        let n = lambdas.len();
        if n == 0 || basis.nrows() != n || basis.ncols() != n {
            return Err(GnsError::ShapeMismatch(format!(
                "{n} eigenvalues with a {}x{} basis",
                basis.nrows(),
                basis.ncols()
            )));
        }
        if lambdas.iter().any(|&l| l <= T::zero()) {
            return Err(GnsError::NotFaithful("eigenvalues must be positive".into()));
        }
        let total = lambdas.iter().fold(T::zero(), |a, &b| a + b);
        if to_f64((total - T::one()).abs()) > tolerance::for_scalar::<T>(1e-12) {
            return Err(GnsError::InvalidState(format!(
                "eigenvalues sum to {}",
                to_f64(total)
            )));
        }
        if to_f64(linalg::unitarity_residual(&basis)) > tolerance::for_scalar::<T>(1e-10) {
            return Err(GnsError::InvalidState("eigenbasis is not unitary".into()));
        }
        Ok(Self { n, lambdas, basis })
    }

    /// The model matching the matrix units chosen by `rep`. Fails unless
    /// `rep` is a single full block.
    pub fn from_rep(rep: &GnsRep<T>) -> Result<Self> {
        if rep.shape().num_blocks() != 1 {
            return Err(GnsError::ShapeMismatch(format!(
                "bipartite model needs one block, got {}",
                rep.shape()
            )));
        }
        Self::new(
            rep.state().spectrum(0).iter().copied().collect(),
            rep.units().basis(0).clone(),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lambdas(&self) -> &[T] {
        &self.lambdas
    }

    pub fn basis(&self) -> &CMat<T> {
        &self.basis
    }

    /// `â = V* a V`.
    pub fn hat(&self, a: &CMat<T>) -> CMat<T> {
        self.basis.adjoint() * a * &self.basis
    }

    fn product_index(&self, i: usize, j: usize) -> usize {
        i * self.n + j
    }

    /// `Φ` as a matrix from GNS onb coordinates to product coordinates.
    pub fn phi(&self, rep: &GnsRep<T>) -> CMat<T> {
        let d = self.n * self.n;
        let mut m = CMat::zeros(d, d);
        for b in 0..rep.dim() {
            let (_, i, j) = rep.label(b);
            m[(self.product_index(i, j), b)] = from_real(T::one());
        }
        m
    }

    /// `π̃(a) = â ⊗ 1_n`.
    pub fn pi(&self, a: &CMat<T>) -> CMat<T> {
        linalg::kron(&self.hat(a), &linalg::identity(self.n))
    }

    /// `Φ|Ω⟩ = Σ_i √λ_i |i⟩ ⊗ |i⟩`.
    pub fn omega(&self) -> CVec<T> {
        let mut v = CVec::zeros(self.n * self.n);
        for (i, &l) in self.lambdas.iter().enumerate() {
            v[self.product_index(i, i)] = from_real(l.sqrt());
        }
        v
    }

    /// Matrix of the antilinear `J̃ : |i⟩ ⊗ |j⟩ ↦ |j⟩ ⊗ |i⟩`.
    pub fn j(&self) -> CMat<T> {
        let d = self.n * self.n;
        let mut m = CMat::zeros(d, d);
        for i in 0..self.n {
            for j in 0..self.n {
                m[(self.product_index(j, i), self.product_index(i, j))] = from_real(T::one());
            }
        }
        m
    }

    /// `J̃ π̃(a) J̃ = 1_n ⊗ conj(â)`.
    pub fn conjugated_pi(&self, a: &CMat<T>) -> CMat<T> {
        linalg::kron(&linalg::identity(self.n), &self.hat(a).conjugate())
    }

    /// `Δ̃ = diag(λ_i / λ_j)`.
    pub fn delta(&self) -> CMat<T> {
        let n = self.n;
        CMat::from_diagonal(&DVector::from_fn(n * n, |k, _| {
            from_real(self.lambdas[k / n] / self.lambdas[k % n])
        }))
    }

    /// `λ_k(g) = Σ_i λ_i |ĝ_{ik}|²`.
    pub fn lambda_k(&self, g: &CMat<T>) -> Vec<T> {
        let gh = self.hat(g);
        (0..self.n)
            .map(|k| (0..self.n).fold(T::zero(), |acc, i| acc + self.lambdas[i] * gh[(i, k)].norm_sqr()))
            .collect()
    }

    /// `ρ̃_g|_B = Σ_k λ_k(g) ḡ|k⟩⟨k|ḡ*`, with `g` read as `ĝ`.
    pub fn rho_b(&self, g: &CMat<T>) -> CMat<T> {
        let gbar = self.hat(g).conjugate();
        let lam = self.lambda_k(g);
        let mut out = CMat::zeros(self.n, self.n);
        for (k, l) in lam.into_iter().enumerate() {
            let col = gbar.column(k);
            out += col * col.adjoint() * from_real(l);
        }
        out
    }

    /// `Ẽ_g(J̃ π̃(R) J̃) = 1_n ⊗ ρ̃_g|_B`.
    pub fn measured_conjugated_density(&self, g: &CMat<T>) -> CMat<T> {
        linalg::kron(&linalg::identity(self.n), &self.rho_b(g))
    }

    /// Orthonormal basis `{1_n ⊗ E_{kl}}` of the commutant.
    pub fn commutant(&self) -> OperatorSpan<T> {
        let n = self.n;
        let id = linalg::identity::<T>(n) * from_real(T::one() / re::<T>(n as f64).sqrt());
        let ops = (0..n * n)
            .map(|kl| {
                let mut e = CMat::zeros(n, n);
                e[(kl / n, kl % n)] = from_real(T::one());
                linalg::kron(&id, &e)
            })
            .collect();
        OperatorSpan::from_orthonormal(ops)
    }
}

/// One named closed-form comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleCheck {
    pub name: &'static str,
    pub residual: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct OracleReport {
    pub checks: Vec<OracleCheck>,
}

/// The first check whose residual exceeded the tolerance.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("bipartite check `{check}` failed: residual {residual:.3e} > {tolerance:.0e}")]
pub struct OracleFailure {
    pub check: &'static str,
    pub residual: f64,
    pub tolerance: f64,
}

impl OracleReport {
    fn record(&mut self, name: &'static str, residual: f64) {
        match self.checks.iter_mut().find(|c| c.name == name) {
            Some(c) => c.residual = c.residual.max(residual),
            None => self.checks.push(OracleCheck { name, residual }),
        }
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.iter().fold(0.0, |a, c| a.max(c.residual))
    }

    pub fn check(&self, tolerance: f64) -> Result<(), OracleFailure> {
        match self
            .checks
            .iter()
            .find(|c| c.residual.is_nan() || c.residual > tolerance)
        {
            Some(c) => Err(OracleFailure {
                check: c.name,
                residual: c.residual,
                tolerance,
            }),
            None => Ok(()),
        }
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{:<28} {:.3e}", c.name, c.residual)?;
        }
        Ok(())
    }
}

fn spectrum_distance<T: Real>(mut got: Vec<T>, mut want: Vec<T>) -> f64 {
    if got.len() != want.len() {
        return f64::INFINITY;
    }
    got.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    want.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    got.iter()
        .zip(&want)
        .fold(0.0, |acc, (a, b)| acc.max(to_f64((*a - *b).abs())))
}

/// Transports the general-path objects of `rep`/`md` through `Φ` and
/// compares them to the closed forms, for the given algebra samples and
/// gauge elements.
pub fn oracle_suite<T: Real>(
    model: &BipartiteModel<T>,
    rep: &GnsRep<T>,
    md: &ModularData<T>,
    samples: &[AlgebraElement<T>],
    gauges: &[AlgebraElement<T>],
) -> Result<OracleReport> {
    if rep.shape().num_blocks() != 1 || rep.shape().block_size(0) != model.n {
        return Err(GnsError::ShapeMismatch(format!(
            "model on M_{}, representation on {}",
            model.n,
            rep.shape()
        )));
    }
    let mut report = OracleReport::default();
    let n = model.n;
    let d = n * n;
    let phi = model.phi(rep);
    let phi_inv = phi.adjoint();
    let transport = |x: &GnsOperator<T>| &phi * x * &phi_inv;

    report.record("phi_unitary", to_f64(linalg::unitarity_residual(&phi)));
    let r_hat = model.hat(rep.state().density().block(0));
    let diag = CMat::from_diagonal(&DVector::from_iterator(
        n,
        model.lambdas.iter().map(|&l| from_real(l)),
    ));
    report.record("eigenbasis_diagonalizes_r", to_f64(max_abs(&(r_hat - diag))));
    report.record("omega", to_f64((&phi * rep.omega() - model.omega()).camax()));

    for (a, b) in samples.iter().zip(samples.iter().cycle().skip(1)) {
        let pa = transport(&rep.represent(a)?);
        let pb = transport(&rep.represent(b)?);
        report.record(
            "pi_tensor_identity",
            to_f64(max_abs(&(&pa - model.pi(a.block(0))))),
        );
        let pab = transport(&rep.represent(&a.mul(b)?)?);
        report.record("phi_homomorphism", to_f64(max_abs(&(pab - &pa * &pb))));
        let jpj = transport(&md.j_conjugate(&rep.represent(a)?));
        report.record(
            "j_pi_j",
            to_f64(max_abs(&(jpj - model.conjugated_pi(a.block(0))))),
        );
    }

    // An antilinear matrix M transports to Φ M conj(Φ⁻¹); Φ is real.
    let j_t = &phi * &md.j.matrix * phi_inv.conjugate();
    report.record("j_swap", to_f64(max_abs(&(j_t - model.j()))));
    report.record(
        "delta_diagonal",
        to_f64(max_abs(&(transport(&md.delta) - model.delta()))),
    );

    let general =
        OperatorSpan::from_operators(&md.commutant_basis.iter().map(&transport).collect::<Vec<_>>());
    report.record("commutant_dim", (general.dim() as f64 - d as f64).abs());
    report.record("commutant_span", to_f64(general.distance(&model.commutant())));

    let identity = AlgebraElement::identity(rep.shape());
    let (rho1, _) = rho_g(rep, md, &identity)?;
    let mut spec: Vec<T> = HermitianEigen::new(&rho1).values.iter().copied().collect();
    spec.truncate(n);
    report.record("rho_1_spectrum", spectrum_distance(spec, model.lambdas.clone()));
    let tail = HermitianEigen::new(&rho1)
        .values
        .iter()
        .skip(n)
        .fold(0.0f64, |a, &v| a.max(to_f64(v.abs())));
    report.record("rho_1_zero_eigenvalues", tail);

    for g in gauges {
        let (rho, er) = rho_g(rep, md, g)?;
        let closed = model.lambda_k(g.block(0));
        let general: Vec<T> = er.lambdas[0].clone();
        report.record(
            "lambda_k",
            general
                .iter()
                .zip(&closed)
                .fold(0.0, |a, (x, y)| a.max(to_f64((*x - *y).abs()))),
        );
        let eig: Vec<T> = HermitianEigen::new(&rho).values.iter().copied().take(n).collect();
        report.record("rho_g_spectrum", spectrum_distance(eig, closed));
        let mb = transport(&restrict_to_b(rep, md, g)?);
        report.record(
            "measured_conjugated_density",
            to_f64(max_abs(&(mb - model.measured_conjugated_density(g.block(0))))),
        );
        let fam = gauge_projectors(rep, md, g)?;
        for k in 0..n {
            // P_g^{(k)} = 1 ⊗ conj(ĝ |k⟩⟨k| ĝ*).
            let col = model.hat(g.block(0)).column(k).into_owned();
            let pk = linalg::kron(&linalg::identity(n), &(&col * col.adjoint()).conjugate());
            report.record(
                "gauge_projectors",
                to_f64(max_abs(&(transport(fam.projector(0, k)) - pk))),
            );
        }
    }
    Ok(report)
}

/// Hadamard-type unitary `(1/√2)[[1, 1], [1, −1]]` in the standard basis.
pub fn hadamard<T: Real>() -> CMat<T> {
    let h = re::<T>(std::f64::consts::FRAC_1_SQRT_2);
    let one = Complex::new(h, T::zero());
    CMat::from_row_slice(2, 2, &[one, one, one, -one])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{random_unitary_with, AlgebraShape, FaithfulState};
    use crate::modular::modular_data;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn run(n: usize, lambdas: Vec<f64>, seed: u64) -> OracleReport {
        let s = AlgebraShape::full(n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = linalg::haar_unitary::<f64, _>(n, &mut rng);
        let rep = GnsRep::new(FaithfulState::from_spectra(&s, &[lambdas], Some(&[v])).unwrap()).unwrap();
        let md = modular_data(&rep).unwrap();
        let model = BipartiteModel::from_rep(&rep).unwrap();
        let samples: Vec<_> = (0..3).map(|_| AlgebraElement::random(&s, &mut rng)).collect();
        let gauges: Vec<_> = (0..3).map(|_| random_unitary_with(&s, &mut rng)).collect();
        oracle_suite(&model, &rep, &md, &samples, &gauges).unwrap()
    }

    #[test]
    fn m2_generic() {
        let report = run(2, vec![0.7, 0.3], 1);
        report.check(1e-10).unwrap();
    }

    #[test]
    fn m3_uniform() {
        let report = run(3, vec![1.0 / 3.0; 3], 2);
        report.check(1e-10).unwrap();
    }

    #[test]
    fn pi_of_e12_is_e12_tensor_one() {
        let s = AlgebraShape::full(2).unwrap();
        let rep =
            GnsRep::new(FaithfulState::<f64>::from_spectra(&s, &[vec![0.7, 0.3]], None).unwrap()).unwrap();
        let model = BipartiteModel::from_rep(&rep).unwrap();
        let e12 = AlgebraElement::standard_unit(&s, 0, 0, 1);
        let phi = model.phi(&rep);
        let got = &phi * rep.represent(&e12).unwrap() * phi.adjoint();
        let want = linalg::kron(e12.block(0), &linalg::identity(2));
        assert!(max_abs(&(got - want)) < 1e-15);
    }

    #[test]
    fn hadamard_lambdas_are_uniform() {
        let model = BipartiteModel::<f64>::new(vec![0.7, 0.3], linalg::identity(2)).unwrap();
        for l in model.lambda_k(&hadamard()) {
            assert!((l - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn broken_check_is_named() {
        let report = OracleReport {
            checks: vec![
                OracleCheck {
                    name: "phi_unitary",
                    residual: 0.0,
                },
                OracleCheck {
                    name: "j_swap",
                    residual: 1e-3,
                },
            ],
        };
        let err = report.check(1e-9).unwrap_err();
        assert_eq!(err.check, "j_swap");
        assert!(err.to_string().contains("j_swap"));
    }

    #[test]
    fn model_validation() {
        assert!(BipartiteModel::<f64>::new(vec![0.5, 0.6], linalg::identity(2)).is_err());
        assert!(BipartiteModel::<f64>::new(vec![1.0, 0.0], linalg::identity(2)).is_err());
    }
}

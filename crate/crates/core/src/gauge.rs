//! The gauge group `U_A` acting on `H_ω` through `U(g) = J π_ω(g) J`, the
//! projective measurements `E_g` it induces, and the entropies of
//! `ρ_g = E_g(|Ω⟩⟨Ω|)`.
//!
//! Densities on the commutant `π_ω(A)'` are normalized against its trace
//! `tr' = Σ_r (1/n_r) Tr_{H^r}`, under which `J π_ω(R) J` has unit trace
//! and the same entropy as `R`.

use nalgebra::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::algebra::{random_unitary_with, AlgebraElement};
use crate::entropy::{relative_entropy, shannon};
use crate::error::{GnsError, Result};
use crate::gns::{projector_onto, trace_product, validate_density, GnsOperator, GnsRep};
use crate::linalg::{self, HermitianEigen};
use crate::modular::{lift, ModularData};
use crate::scalar::{from_real, max_abs, re, to_f64, CMat, Real, C};
use crate::span::OperatorSpan;
use crate::tolerance;

/// A unitary `g ∈ U_A` together with its lift `U(g)`.
#[derive(Clone, Debug)]
pub struct GaugeElement<T: Real> {
    g: AlgebraElement<T>,
    lifted: GnsOperator<T>,
}

impl<T: Real> GaugeElement<T> {
    pub fn new(rep: &GnsRep<T>, md: &ModularData<T>, g: AlgebraElement<T>) -> Result<Self> {
        check_gauge(rep, &g)?;
        let lifted = lift(rep, md, &g)?;
        Ok(Self { g, lifted })
    }

    pub fn identity(rep: &GnsRep<T>, md: &ModularData<T>) -> Self {
        Self::new(rep, md, AlgebraElement::identity(rep.shape())).expect("1_A is unitary")
    }

    pub fn element(&self) -> &AlgebraElement<T> {
        &self.g
    }

    /// `U(g) = J π_ω(g) J`.
    pub fn lifted(&self) -> &GnsOperator<T> {
        &self.lifted
    }
}

fn check_gauge<T: Real>(rep: &GnsRep<T>, g: &AlgebraElement<T>) -> Result<()> {
    if g.shape() != rep.shape() {
        return Err(GnsError::ShapeMismatch(format!(
            "gauge element on {}, representation on {}",
            g.shape(),
            rep.shape()
        )));
    }
    let res = to_f64(g.unitarity_residual());
    if res.is_nan() || res > tolerance::for_scalar::<T>(tolerance::UNITARY) {
        return Err(GnsError::InvalidGauge(format!("‖g g* − 1‖ = {res:.3e}")));
    }
    Ok(())
}

/// The projectors `P_g^{(r,k)} = J π_ω(g e^{(r)}_{kk} g*) J`.
#[derive(Clone, Debug)]
pub struct GaugeProjectorFamily<T: Real> {
    gauge: GaugeElement<T>,
    projectors: Vec<Vec<GnsOperator<T>>>,
}

pub fn gauge_projectors<T: Real>(
    rep: &GnsRep<T>,
    md: &ModularData<T>,
    g: &AlgebraElement<T>,
) -> Result<GaugeProjectorFamily<T>> {
    let gauge = GaugeElement::new(rep, md, g.clone())?;
    let g_adj = g.adjoint();
    let units = rep.units();
    let projectors = (0..rep.shape().num_blocks())
        .map(|r| {
            (0..rep.shape().block_size(r))
                .map(|k| {
                    let p = g.mul(&units.unit(r, k, k))?.mul(&g_adj)?;
                    Ok(md.j_conjugate(&rep.represent(&p)?))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GaugeProjectorFamily { gauge, projectors })
}

impl<T: Real> GaugeProjectorFamily<T> {
    pub fn gauge(&self) -> &GaugeElement<T> {
        &self.gauge
    }

    pub fn projector(&self, r: usize, k: usize) -> &GnsOperator<T> {
        &self.projectors[r][k]
    }

    /// `((r, k), P_g^{(r,k)})` in block order.
    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), &GnsOperator<T>)> {
        self.projectors
            .iter()
            .enumerate()
            .flat_map(|(r, ps)| ps.iter().enumerate().map(move |(k, p)| ((r, k), p)))
    }

    /// Largest violation of: `P² = P = P†`, `P_a P_b = 0` for `a ≠ b`,
    /// `Σ_k P^{(r,k)} = P^r`, and `Σ_{r,k} P^{(r,k)} = 1`.
    pub fn invariant_residual(&self, rep: &GnsRep<T>) -> T {
        let d = rep.dim();
        let mut worst = T::zero();
        let all: Vec<&GnsOperator<T>> = self.iter().map(|(_, p)| p).collect();
        for (a, p) in all.iter().enumerate() {
            worst = worst.max(max_abs(&(*p * *p - *p)));
            worst = worst.max(max_abs(&(*p - p.adjoint())));
            for q in &all[a + 1..] {
                worst = worst.max(max_abs(&(*p * *q)));
            }
        }
        let mut total = CMat::zeros(d, d);
        for (r, ps) in self.projectors.iter().enumerate() {
            let mut sum = CMat::zeros(d, d);
            for p in ps {
                sum += p;
            }
            worst = worst.max(max_abs(&(&sum - rep.block_projector(r))));
            total += sum;
        }
        worst.max(max_abs(&(total - linalg::identity::<T>(d))))
    }

    /// The projective measurement `E_g` as a Kraus channel.
    pub fn channel(&self) -> KrausChannel<T> {
        KrausChannel {
            ops: self.iter().map(|(_, p)| p.clone()).collect(),
        }
    }

    /// `E_g(ρ) = Σ P ρ P`, skipping validation.
    fn measure(&self, rho: &GnsOperator<T>) -> GnsOperator<T> {
        let mut out = CMat::zeros(rho.nrows(), rho.ncols());
        for (_, p) in self.iter() {
            out += p * rho * p;
        }
        out
    }
}

/// A quantum operation `ρ ↦ Σ_k Λ_k ρ Λ_k*` whose Kraus operators lie in
/// the commutant `π_ω(A)'`.
#[derive(Clone, Debug)]
pub struct KrausChannel<T: Real> {
    ops: Vec<GnsOperator<T>>,
}

impl<T: Real> KrausChannel<T> {
    /// Validates completeness (`1e-10`) and commutant membership (`1e-9`)
    /// against `md.commutant_basis`.
    pub fn new(ops: Vec<GnsOperator<T>>, md: &ModularData<T>) -> Result<Self> {
        let Some(first) = ops.first() else {
            return Err(GnsError::InvalidChannel("no Kraus operators".into()));
        };
        let d = first.nrows();
        if ops.iter().any(|k| k.nrows() != d || k.ncols() != d) || md.delta.nrows() != d {
            return Err(GnsError::InvalidChannel(format!(
                "Kraus operators must all be {d}x{d} and match the GNS dimension"
            )));
        }
        if md.commutant_basis.is_empty() {
            return Err(GnsError::Internal(
                "modular data carries no commutant basis".into(),
            ));
        }
        let channel = Self { ops };
        let res = to_f64(channel.completeness_residual());
        if res > tolerance::for_scalar::<T>(tolerance::KRAUS_COMPLETENESS) {
            return Err(GnsError::InvalidChannel(format!("‖Σ Λ*Λ − 1‖ = {res:.3e}")));
        }
        let span = OperatorSpan::from_orthonormal(md.commutant_basis.clone());
        for (k, op) in channel.ops.iter().enumerate() {
            let dist = to_f64(span.residual(op));
            if dist > tolerance::for_scalar::<T>(tolerance::KRAUS_IN_COMMUTANT) {
                return Err(GnsError::InvalidChannel(format!(
                    "Kraus operator {k} lies {dist:.3e} from the commutant"
                )));
            }
        }
        Ok(channel)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            ops: vec![linalg::identity(dim)],
        }
    }

    pub fn ops(&self) -> &[GnsOperator<T>] {
        &self.ops
    }

    /// `‖Σ Λ*Λ − 1‖_max`.
    pub fn completeness_residual(&self) -> T {
        let d = self.ops[0].nrows();
        let mut sum = CMat::zeros(d, d);
        for k in &self.ops {
            sum += k.adjoint() * k;
        }
        max_abs(&(sum - linalg::identity::<T>(d)))
    }
}

/// `E_Λ(ρ) = Σ_k Λ_k ρ Λ_k*` for a density operator `ρ`.
pub fn apply_channel<T: Real>(ch: &KrausChannel<T>, rho: &GnsOperator<T>) -> Result<GnsOperator<T>> {
    validate_density(rho, ch.ops[0].nrows())?;
    let res = to_f64(ch.completeness_residual());
    if res > tolerance::for_scalar::<T>(tolerance::KRAUS_COMPLETENESS) {
        return Err(GnsError::InvalidChannel(format!("‖Σ Λ*Λ − 1‖ = {res:.3e}")));
    }
    let mut out = CMat::zeros(rho.nrows(), rho.ncols());
    for k in &ch.ops {
        out += k * rho * k.adjoint();
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct EntropyReport<T: Real> {
    pub gauge: GaugeElement<T>,
    /// `λ_{r,k}(g) = ‖P_g^{(r,k)} Ω‖²`, indexed `[r][k]`.
    pub lambdas: Vec<Vec<T>>,
    /// `S(ρ_g)` in nats.
    pub entropy: T,
    /// `S(ρ_1)`.
    pub baseline: T,
    /// `S(ρ_g) − S(ρ_1)`.
    pub gap: T,
}

/// `ρ_g = Σ_{r,k} P_g^{(r,k)} |Ω⟩⟨Ω| P_g^{(r,k)}` and its entropy report.
pub fn rho_g<T: Real>(
    rep: &GnsRep<T>,
    md: &ModularData<T>,
    g: &AlgebraElement<T>,
) -> Result<(GnsOperator<T>, EntropyReport<T>)> {
    let family = gauge_projectors(rep, md, g)?;
    let d = rep.dim();
    let mut rho = CMat::zeros(d, d);
    let mut lambdas: Vec<Vec<T>> = rep.shape().blocks().iter().map(|&n| vec![T::zero(); n]).collect();
    for ((r, k), p) in family.iter() {
        let v = p * rep.omega();
        lambdas[r][k] = v.norm_squared();
        rho += projector_onto(&v);
    }
    let entropy = shannon(lambdas.iter().flatten().copied());
    let baseline = baseline_entropy(rep);
    let report = EntropyReport {
        gauge: family.gauge,
        lambdas,
        entropy,
        baseline,
        gap: entropy - baseline,
    };
    Ok((rho, report))
}

/// `λ_{r,k}(g) = ω(g e^{(r)}_{kk} g*) = Σ_i λ^{(r)}_i |ĝ_{ik}|²` with
/// `ĝ = V_r* g_r V_r` in the eigenbasis of `R`. Equal to `‖P_g^{(r,k)} Ω‖²`
/// without building any operator on `H_ω`.
pub fn gauge_lambdas<T: Real>(rep: &GnsRep<T>, g: &AlgebraElement<T>) -> Result<Vec<Vec<T>>> {
    check_gauge(rep, g)?;
    Ok(rep
        .units()
        .coordinates(g)
        .iter()
        .enumerate()
        .map(|(r, gh)| {
            let lam = rep.state().spectrum(r);
            (0..gh.ncols())
                .map(|k| (0..gh.nrows()).fold(T::zero(), |acc, i| acc + lam[i] * gh[(i, k)].norm_sqr()))
                .collect()
        })
        .collect())
}

/// `S(ρ_g)` through [`gauge_lambdas`].
pub fn gauge_entropy<T: Real>(rep: &GnsRep<T>, g: &AlgebraElement<T>) -> Result<T> {
    Ok(shannon(gauge_lambdas(rep, g)?.into_iter().flatten()))
}

/// `S(ρ_1)`.
pub fn baseline_entropy<T: Real>(rep: &GnsRep<T>) -> T {
    gauge_entropy(rep, &AlgebraElement::identity(rep.shape())).expect("1_A is unitary")
}

/// `J π_ω(R) J`, a density on the commutant with respect to `tr'`.
pub fn conjugated_density<T: Real>(rep: &GnsRep<T>, md: &ModularData<T>) -> GnsOperator<T> {
    md.j_conjugate(&rep.represent(rep.state().density()).expect("same shape"))
}

/// `E_g(J π_ω(R) J)`, the density of `E_g(ρ)` restricted to the commutant
/// for every extension `ρ` of `ω` with `J ρ J = ρ`.
pub fn restrict_to_b<T: Real>(
    rep: &GnsRep<T>,
    md: &ModularData<T>,
    g: &AlgebraElement<T>,
) -> Result<GnsOperator<T>> {
    let family = gauge_projectors(rep, md, g)?;
    Ok(family.measure(&conjugated_density(rep, md)))
}

/// `tr_{π(A)'}(B)` through the anti-isomorphism: `J B J = π_ω(a*)` and
/// `tr'(B) = tr_A(a)`. Also returns the residual of `J B J` from `π_ω(A)`,
/// which measures how far `B` is from the commutant.
pub fn commutant_trace<T: Real>(rep: &GnsRep<T>, md: &ModularData<T>, b: &GnsOperator<T>) -> (C<T>, T) {
    let (a_star, res) = rep.preimage(&md.j_conjugate(b));
    (a_star.trace().conj(), res)
}

fn block_spectra<T: Real>(rep: &GnsRep<T>, x: &GnsOperator<T>) -> Vec<(T, CMat<T>)> {
    (0..rep.shape().num_blocks())
        .map(|r| {
            let range = rep.block_range(r);
            let w = T::one() / re::<T>(rep.shape().block_size(r) as f64);
            let sub = x
                .view((range.start, range.start), (range.len(), range.len()))
                .into_owned();
            (w, sub)
        })
        .collect()
}

/// `−tr'(σ ln σ)` for a density `σ` on the commutant (block diagonal over
/// the `H^r`, with `tr'(σ) = 1`).
pub fn commutant_entropy<T: Real>(rep: &GnsRep<T>, sigma: &GnsOperator<T>) -> T {
    block_spectra(rep, sigma)
        .into_iter()
        .fold(T::zero(), |acc, (w, sub)| {
            acc + w * shannon(HermitianEigen::new(&sub).values.iter().copied())
        })
}

/// `tr'(σ (ln σ − ln τ))`, `None` on support mismatch.
pub fn commutant_relative_entropy<T: Real>(
    rep: &GnsRep<T>,
    sigma: &GnsOperator<T>,
    tau: &GnsOperator<T>,
) -> Option<T> {
    let s = block_spectra(rep, sigma);
    let t = block_spectra(rep, tau);
    let mut acc = T::zero();
    for ((w, a), (_, b)) in s.into_iter().zip(t) {
        acc += w * relative_entropy(&a, &b)?;
    }
    Some(acc)
}

/// Largest `|Tr(E_g(ρ) B) − tr'(E_g(J π(R) J) B)|` over the observables.
/// `ρ` should extend `ω` and satisfy `J ρ J = ρ`.
pub fn commutant_trace_residual<T: Real>(
    rep: &GnsRep<T>,
    md: &ModularData<T>,
    g: &AlgebraElement<T>,
    rho: &GnsOperator<T>,
    observables: &[GnsOperator<T>],
) -> Result<T> {
    validate_density(rho, rep.dim())?;
    let family = gauge_projectors(rep, md, g)?;
    let lhs_state = family.measure(rho);
    let rhs_state = family.measure(&conjugated_density(rep, md));
    let mut worst = T::zero();
    for b in observables {
        let lhs = trace_product(&lhs_state, b);
        let rhs = rep.block_weighted_trace(&(&rhs_state * b));
        worst = worst.max((lhs - rhs).norm_sqr().sqrt());
    }
    Ok(worst)
}

/// The entropy gap computed two ways.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropyGap<T> {
    /// `S(ρ_g) − S(ρ_1)`.
    pub difference: T,
    /// `S(τ ‖ E_g(τ))` for `τ = J π(R) J` on the commutant; `None` means `+∞`.
    pub relative: Option<T>,
}

impl<T: Real> EntropyGap<T> {
    /// `|difference − relative|`, or `None` if the relative entropy is
    /// infinite.
    pub fn discrepancy(&self) -> Option<T> {
        self.relative.map(|r| (self.difference - r).abs())
    }
}

pub fn entropy_gap<T: Real>(
    rep: &GnsRep<T>,
    md: &ModularData<T>,
    g: &AlgebraElement<T>,
) -> Result<EntropyGap<T>> {
    let (_, report) = rho_g(rep, md, g)?;
    let tau = conjugated_density(rep, md);
    let measured = restrict_to_b(rep, md, g)?;
    Ok(EntropyGap {
        difference: report.gap,
        relative: commutant_relative_entropy(rep, &tau, &measured),
    })
}

/// A random Kraus family in the commutant: `Λ_k = J π(x_k s^{-1/2}) J`
/// with Ginibre `x_k` and `s = Σ x_k* x_k`.
pub fn random_kraus_channel<T: Real, R: Rng + ?Sized>(
    rep: &GnsRep<T>,
    md: &ModularData<T>,
    count: usize,
    rng: &mut R,
) -> Result<KrausChannel<T>> {
    let shape = rep.shape();
    let xs: Vec<AlgebraElement<T>> = (0..count.max(1))
        .map(|_| AlgebraElement::random(shape, rng))
        .collect();
    let mut s = AlgebraElement::zero(shape);
    for x in &xs {
        s = s.add(&x.adjoint().mul(x)?)?;
    }
    let inv_sqrt = AlgebraElement::from_fn(shape, |r| {
        linalg::hermitian_fn(s.block(r), |v| T::one() / v.sqrt())
    });
    let ops = xs
        .iter()
        .map(|x| Ok(md.j_conjugate(&rep.represent(&x.mul(&inv_sqrt)?)?)))
        .collect::<Result<Vec<_>>>()?;
    KrausChannel::new(ops, md)
}

/// A random extension of `ω`: `Σ_i p_i U(g_i)|Ω⟩⟨Ω|U(g_i)*` with Haar `g_i`
/// and random weights.
pub fn random_extension<T: Real, R: Rng + ?Sized>(
    rep: &GnsRep<T>,
    md: &ModularData<T>,
    terms: usize,
    rng: &mut R,
) -> GnsOperator<T> {
    let weights: Vec<f64> = (0..terms.max(1)).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let d = rep.dim();
    let mut rho = CMat::zeros(d, d);
    for w in weights {
        let g = random_unitary_with(rep.shape(), rng);
        let v = lift(rep, md, &g).expect("same shape") * rep.omega();
        rho += projector_onto(&v) * from_real(re::<T>(w / total));
    }
    rho
}

/// Gaussian-random element of the span of `md.commutant_basis`.
pub fn random_commutant_element<T: Real, R: Rng + ?Sized>(
    md: &ModularData<T>,
    rng: &mut R,
) -> GnsOperator<T> {
    let d = md.delta.nrows();
    let mut b = CMat::zeros(d, d);
    for q in &md.commutant_basis {
        let x: f64 = StandardNormal.sample(rng);
        let y: f64 = StandardNormal.sample(rng);
        b += q * Complex::new(re::<T>(x), re::<T>(y));
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{AlgebraShape, FaithfulState};
    use crate::modular::modular_data;
    use crate::scalar::cx;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup(blocks: Vec<usize>, seed: u64) -> (GnsRep<f64>, ModularData<f64>, ChaCha8Rng) {
        let s = AlgebraShape::new(blocks).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rep = GnsRep::new(FaithfulState::random(&s, 0.05, &mut rng)).unwrap();
        let md = modular_data(&rep).unwrap();
        (rep, md, rng)
    }

    fn m2_diag() -> (GnsRep<f64>, ModularData<f64>) {
        let s = AlgebraShape::full(2).unwrap();
        let rep = GnsRep::new(FaithfulState::from_spectra(&s, &[vec![0.7, 0.3]], None).unwrap()).unwrap();
        let md = modular_data(&rep).unwrap();
        (rep, md)
    }

    fn hadamard() -> AlgebraElement<f64> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let m = CMat::from_row_slice(2, 2, &[cx(h, 0.0), cx(h, 0.0), cx(h, 0.0), cx(-h, 0.0)]);
        AlgebraElement::new(AlgebraShape::full(2).unwrap(), vec![m]).unwrap()
    }

    #[test]
    fn identity_projectors_in_m2() {
        let (rep, md) = m2_diag();
        let fam = gauge_projectors(&rep, &md, &AlgebraElement::identity(rep.shape())).unwrap();
        for k in 0..2 {
            let p = fam.projector(0, k);
            let mut expect = CMat::<f64>::zeros(4, 4);
            for i in 0..2 {
                let idx = rep.index(0, i, k);
                expect[(idx, idx)] = cx(1.0, 0.0);
            }
            assert!(max_abs(&(p - expect)) < 1e-13);
        }
        assert!(fam.invariant_residual(&rep) < 1e-13);
    }

    #[test]
    fn projector_family_invariants_random() {
        let (rep, md, mut rng) = setup(vec![3, 1, 2], 3);
        let g = random_unitary_with(rep.shape(), &mut rng);
        let fam = gauge_projectors(&rep, &md, &g).unwrap();
        assert!(fam.invariant_residual(&rep) < 1e-12);
        let u = fam.gauge().lifted();
        assert!(linalg::unitarity_residual(u) < 1e-12);
        let a = rep
            .represent(&AlgebraElement::random(rep.shape(), &mut rng))
            .unwrap();
        assert!(max_abs(&linalg::commutator(u, &a)) < 1e-11);
    }

    #[test]
    fn abelian_family_is_gauge_independent() {
        let (rep, md, mut rng) = setup(vec![1, 1, 1], 5);
        let g = random_unitary_with(rep.shape(), &mut rng);
        let fam = gauge_projectors(&rep, &md, &g).unwrap();
        for r in 0..3 {
            assert!(max_abs(&(fam.projector(r, 0) - rep.block_projector(r))) < 1e-13);
        }
        let (_, report) = rho_g(&rep, &md, &g).unwrap();
        assert!(report.gap.abs() < 1e-14);
    }

    #[test]
    fn non_unitary_gauge_is_rejected() {
        let (rep, md) = m2_diag();
        let g = AlgebraElement::identity(rep.shape()).scale(cx(1.0 + 1e-9, 0.0));
        assert!(matches!(
            gauge_projectors(&rep, &md, &g),
            Err(GnsError::InvalidGauge(_))
        ));
        assert!(matches!(rho_g(&rep, &md, &g), Err(GnsError::InvalidGauge(_))));
    }

    #[test]
    fn worked_m2_numbers() {
        let (rep, md) = m2_diag();
        let (rho1, r1) = rho_g(&rep, &md, &AlgebraElement::identity(rep.shape())).unwrap();
        let s1 = -(0.7f64 * 0.7f64.ln() + 0.3 * 0.3f64.ln());
        assert!((r1.entropy - s1).abs() < 1e-14);
        assert!((crate::entropy::von_neumann(&rho1) - s1).abs() < 1e-12);
        let (_, rh) = rho_g(&rep, &md, &hadamard()).unwrap();
        assert!((rh.entropy - 2f64.ln()).abs() < 1e-14);
        assert!((rh.gap - (2f64.ln() - s1)).abs() < 1e-14);
        for l in &rh.lambdas[0] {
            assert!((l - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn fast_lambdas_match_projector_norms() {
        let (rep, md, mut rng) = setup(vec![2, 3], 9);
        for _ in 0..5 {
            let g = random_unitary_with(rep.shape(), &mut rng);
            let (rho, report) = rho_g(&rep, &md, &g).unwrap();
            let fast = gauge_lambdas(&rep, &g).unwrap();
            for (a, b) in report.lambdas.iter().flatten().zip(fast.iter().flatten()) {
                assert!((a - b).abs() < 1e-13);
            }
            let mut spec: Vec<f64> = HermitianEigen::new(&rho)
                .values
                .iter()
                .copied()
                .filter(|&x| x > 1e-12)
                .collect();
            let mut lam: Vec<f64> = fast.into_iter().flatten().collect();
            spec.sort_by(f64::total_cmp);
            lam.sort_by(f64::total_cmp);
            assert_eq!(spec.len(), lam.len());
            for (a, b) in spec.iter().zip(&lam) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn restriction_to_a_is_gauge_invariant() {
        let (rep, md, mut rng) = setup(vec![2, 2], 11);
        let g = random_unitary_with(rep.shape(), &mut rng);
        let (rho, _) = rho_g(&rep, &md, &g).unwrap();
        let ra = rep.restrict_to_a(&rho).unwrap();
        assert!(ra.distance(rep.state().density()).unwrap() < 1e-12);
    }

    #[test]
    fn commutant_traces_agree() {
        let (rep, md, mut rng) = setup(vec![2, 1, 3], 13);
        for _ in 0..3 {
            let b = random_commutant_element(&md, &mut rng);
            let (t, res) = commutant_trace(&rep, &md, &b);
            assert!(res < 1e-10);
            assert!((t - rep.block_weighted_trace(&b)).norm() < 1e-10);
        }
        let tau = conjugated_density(&rep, &md);
        assert!((rep.block_weighted_trace(&tau) - cx(1.0, 0.0)).norm() < 1e-13);
        assert!((commutant_entropy(&rep, &tau) - rep.state().entropy()).abs() < 1e-12);
    }

    #[test]
    fn restrict_to_b_hadamard_entropy_is_ln2() {
        let (rep, md) = m2_diag();
        let sigma = restrict_to_b(&rep, &md, &hadamard()).unwrap();
        assert!((commutant_entropy(&rep, &sigma) - 2f64.ln()).abs() < 1e-13);
        let at_one = restrict_to_b(&rep, &md, &AlgebraElement::identity(rep.shape())).unwrap();
        assert!(max_abs(&(at_one - conjugated_density(&rep, &md))) < 1e-14);
    }

    #[test]
    fn commutant_trace_identity_and_gap_forms() {
        let (rep, md, mut rng) = setup(vec![3, 2], 17);
        let obs: Vec<_> = (0..4).map(|_| random_commutant_element(&md, &mut rng)).collect();
        let omega = projector_onto(rep.omega());
        for _ in 0..3 {
            let g = random_unitary_with(rep.shape(), &mut rng);
            assert!(commutant_trace_residual(&rep, &md, &g, &omega, &obs).unwrap() < 1e-10);
            let gap = entropy_gap(&rep, &md, &g).unwrap();
            assert!(gap.difference > 0.0);
            assert!(gap.discrepancy().unwrap() < 1e-10, "{gap:?}");
            let (_, report) = rho_g(&rep, &md, &g).unwrap();
            let sb = commutant_entropy(&rep, &restrict_to_b(&rep, &md, &g).unwrap());
            assert!((sb - report.entropy).abs() < 1e-10);
        }
    }

    #[test]
    fn kraus_channels_preserve_restriction() {
        let (rep, md, mut rng) = setup(vec![2, 1], 19);
        let ch = random_kraus_channel(&rep, &md, 3, &mut rng).unwrap();
        let rho = random_extension(&rep, &md, 3, &mut rng);
        assert!(
            rep.restrict_to_a(&rho)
                .unwrap()
                .distance(rep.state().density())
                .unwrap()
                < 1e-12
        );
        let out = apply_channel(&ch, &rho).unwrap();
        assert!(
            rep.restrict_to_a(&out)
                .unwrap()
                .distance(rep.state().density())
                .unwrap()
                < 1e-12
        );
        let same = apply_channel(&KrausChannel::identity(rep.dim()), &rho).unwrap();
        assert!(max_abs(&(same - &rho)) < 1e-15);
    }

    #[test]
    fn invalid_channels_are_rejected() {
        let (rep, md, mut rng) = setup(vec![2], 21);
        let half = linalg::identity::<f64>(rep.dim()) * cx(0.5, 0.0);
        assert!(matches!(
            KrausChannel::new(vec![half], &md),
            Err(GnsError::InvalidChannel(_))
        ));
        let outside = rep
            .represent(&random_unitary_with(rep.shape(), &mut rng))
            .unwrap();
        assert!(matches!(
            KrausChannel::new(vec![outside], &md),
            Err(GnsError::InvalidChannel(_))
        ));
        let u = lift(&rep, &md, &random_unitary_with(rep.shape(), &mut rng)).unwrap();
        assert!(KrausChannel::new(vec![u], &md).is_ok());
    }
}

//! Compares the GNS representation with an independent construction:
//! Gram matrix of the standard matrix units, Löwdin orthonormalization,
//! and left multiplication transported through `G^{1/2}`.

use gns_core::scalar::{CMat, CVec};
use gns_core::*;
use nalgebra::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Oracle {
    units: Vec<Element64>,
    sqrt_gram: CMat<f64>,
    inv_sqrt_gram: CMat<f64>,
}

fn flatten(a: &Element64) -> CVec<f64> {
    CVec::from_iterator(
        a.shape().algebra_dim(),
        a.blocks()
            .iter()
            .flat_map(|b| b.transpose().iter().copied().collect::<Vec<_>>()),
    )
}

fn gram_power(g: &CMat<f64>, p: f64) -> CMat<f64> {
    let eig = g.clone().symmetric_eigen();
    let d = eig.eigenvalues.map(|x| Complex::new(x.powf(p), 0.0));
    &eig.eigenvectors * CMat::from_diagonal(&d) * eig.eigenvectors.adjoint()
}

impl Oracle {
    fn new(state: &State64) -> Self {
        let shape = state.shape();
        let mut units = Vec::new();
        for (r, &n) in shape.blocks().iter().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    units.push(Element64::standard_unit(shape, r, i, j));
                }
            }
        }
        let d = units.len();
        let gram = CMat::from_fn(d, d, |p, q| {
            state
                .expectation(&units[p].adjoint().mul(&units[q]).unwrap())
                .unwrap()
        });
        Self {
            units,
            sqrt_gram: gram_power(&gram, 0.5),
            inv_sqrt_gram: gram_power(&gram, -0.5),
        }
    }

    /// Left multiplication by `a` in the Löwdin basis.
    fn represent(&self, a: &Element64) -> CMat<f64> {
        let d = self.units.len();
        let mut left = CMat::zeros(d, d);
        for (q, u) in self.units.iter().enumerate() {
            left.set_column(q, &flatten(&a.mul(u).unwrap()));
        }
        &self.sqrt_gram * left * &self.inv_sqrt_gram
    }

    fn omega(&self, shape: &AlgebraShape) -> CVec<f64> {
        &self.sqrt_gram * flatten(&Element64::identity(shape))
    }
}

fn check(state: State64, rng: &mut ChaCha8Rng) {
    let shape = state.shape().clone();
    let oracle = Oracle::new(&state);
    let rep = GnsRep::new(state).unwrap();
    assert_eq!(rep.dim(), oracle.units.len());

    // |u⟩ ↦ π(u)Ω maps the oracle basis vectors G^{1/2} e_u onto ours.
    let d = rep.dim();
    let mut ours = CMat::zeros(d, d);
    for (q, u) in oracle.units.iter().enumerate() {
        ours.set_column(q, &(rep.represent(u).unwrap() * rep.omega()));
    }
    let w = ours * &oracle.inv_sqrt_gram;
    assert!(linalg::unitarity_residual(&w) < 1e-10);
    assert!((&w * oracle.omega(&shape) - rep.omega()).camax() < 1e-10);

    for _ in 0..4 {
        let a = Element64::random(&shape, rng);
        let transported = &w * oracle.represent(&a) * w.adjoint();
        assert!((transported - rep.represent(&a).unwrap()).camax() < 1e-10);
    }
}

#[test]
fn matches_lowdin_construction() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for blocks in [
        vec![1],
        vec![2],
        vec![3],
        vec![2, 1],
        vec![1, 1, 1],
        vec![3, 2],
        vec![4],
    ] {
        let shape = AlgebraShape::new(blocks).unwrap();
        check(State64::random(&shape, 0.05, &mut rng), &mut rng);
        check(State64::tracial(&shape), &mut rng);
    }
}

#[test]
fn omega_reproduces_the_state() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let shape = AlgebraShape::new(vec![3, 2]).unwrap();
    let rep = GnsRep::new(State64::random(&shape, 0.05, &mut rng)).unwrap();
    for _ in 0..8 {
        let a = Element64::random(&shape, &mut rng);
        let lhs = rep.omega().dotc(&(rep.represent(&a).unwrap() * rep.omega()));
        let rhs = rep.state().expectation(&a).unwrap();
        assert!((lhs - rhs).norm() < 1e-12);
    }
}

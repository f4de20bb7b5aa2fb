use gns_core::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn shapes() -> impl Strategy<Value = AlgebraShape> {
    prop::collection::vec(1usize..=4, 1..=3).prop_map(|b| AlgebraShape::new(b).unwrap())
}

fn setup(shape: &AlgebraShape, seed: u64) -> (GnsRep64, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rep = GnsRep::new(State64::random(shape, 0.05, &mut rng)).unwrap();
    (rep, rng)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn trace_is_cyclic(shape in shapes(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = Element64::random(&shape, &mut rng);
        let b = Element64::random(&shape, &mut rng);
        let ab = a.mul(&b).unwrap().trace();
        let ba = b.mul(&a).unwrap().trace();
        prop_assert!((ab - ba).norm() < 1e-10);
    }

    #[test]
    fn representation_is_a_star_homomorphism(shape in shapes(), seed in any::<u64>()) {
        let (rep, mut rng) = setup(&shape, seed);
        let a = Element64::random(&shape, &mut rng);
        let b = Element64::random(&shape, &mut rng);
        let (pa, pb) = (rep.represent(&a).unwrap(), rep.represent(&b).unwrap());
        let pab = rep.represent(&a.mul(&b).unwrap()).unwrap();
        prop_assert!((pab - &pa * &pb).camax() < 1e-10);
        let padj = rep.represent(&a.adjoint()).unwrap();
        prop_assert!((padj - pa.adjoint()).camax() < 1e-12);
    }

    /// `⟨a|b⟩ = ω(a* b)` is antilinear in the first slot.
    #[test]
    fn inner_product_convention(shape in shapes(), seed in any::<u64>()) {
        let (rep, mut rng) = setup(&shape, seed);
        let a = Element64::random(&shape, &mut rng);
        let b = Element64::random(&shape, &mut rng);
        let via_vectors = rep.vector(&a).dotc(&rep.vector(&b));
        prop_assert!((via_vectors - rep.inner(&a, &b).unwrap()).norm() < 1e-10);
        let i = nalgebra::Complex::new(0.0, 1.0);
        let scaled = rep.inner(&a.scale(i), &b).unwrap();
        prop_assert!((scaled + i * rep.inner(&a, &b).unwrap()).norm() < 1e-10);
    }

    #[test]
    fn vectors_round_trip(shape in shapes(), seed in any::<u64>()) {
        let (rep, mut rng) = setup(&shape, seed);
        let a = Element64::random(&shape, &mut rng);
        prop_assert!(rep.element(&rep.vector(&a)).distance(&a).unwrap() < 1e-10);
    }

    #[test]
    fn gauge_entropy_never_drops_below_baseline(shape in shapes(), seed in any::<u64>()) {
        let (rep, mut rng) = setup(&shape, seed);
        let g = random_unitary_with(&shape, &mut rng);
        let gap = gauge_entropy(&rep, &g).unwrap() - rep.state().entropy();
        prop_assert!(gap >= -1e-12);
        let lambdas: f64 = gauge_lambdas(&rep, &g).unwrap().iter().flatten().sum();
        prop_assert!((lambdas - 1.0).abs() < 1e-12);
    }

    #[test]
    fn modular_operator_fixes_omega(shape in shapes(), seed in any::<u64>()) {
        let (rep, _) = setup(&shape, seed);
        let md = polar_decompose(&tomita_s(&rep)).unwrap();
        prop_assert!(md.axiom_residuals(&rep).max() < 1e-10);
    }
}

//! Von Neumann and relative entropies, in nats.

use crate::linalg::HermitianEigen;
use crate::scalar::{re, CMat, Real};
use crate::tolerance;

/// `-Σ p ln p`, with `p ≤ 1e-12` contributing zero.
pub fn shannon<T: Real, I: IntoIterator<Item = T>>(probs: I) -> T {
    let cut = re::<T>(tolerance::ENTROPY_ZERO);
    probs
        .into_iter()
        .filter(|&p| p > cut)
        .fold(T::zero(), |acc, p| acc - p * p.ln())
}

/// `-Tr ρ ln ρ` for a Hermitian positive `ρ`.
pub fn von_neumann<T: Real>(rho: &CMat<T>) -> T {
    shannon(HermitianEigen::new(rho).values.iter().copied())
}

/// `Tr σ (ln σ − ln τ)`, restricted to the support of `σ`.
///
/// Returns `None` (relative entropy `+∞`) when `σ` has weight on the
/// kernel of `τ`.
pub fn relative_entropy<T: Real>(sigma: &CMat<T>, tau: &CMat<T>) -> Option<T> {
    let es = HermitianEigen::new(sigma);
    let et = HermitianEigen::new(tau);
    let cut = re::<T>(tolerance::ENTROPY_ZERO);
    let overlap = es.vectors.adjoint() * &et.vectors;
    let mut acc = T::zero();
    for a in 0..es.values.len() {
        let s = es.values[a];
        if s <= cut {
            continue;
        }
        acc += s * s.ln();
        for b in 0..et.values.len() {
            let w = overlap[(a, b)].norm_sqr();
            let t = et.values[b];
            if t <= cut {
                if w > cut {
                    return None;
                }
                continue;
            }
            acc -= s * w * t.ln();
        }
    }
    Some(acc)
}

//! Gradient ascent of `g ↦ S(ρ_g)` over the unitary group of `A`.
//!
//! Iterates are moved by the exponential retraction `g ← exp(iαH) g`, with
//! `H` the block-diagonal Hermitian gradient obtained by central finite
//! differences and `α` chosen by Armijo backtracking. `g = 1` is a critical
//! point (a minimum), so all starts are Haar-random.

use nalgebra::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::algebra::{random_unitary_with, AlgebraElement, AlgebraShape};
use crate::error::Result;
use crate::gauge::{baseline_entropy, gauge_entropy};
use crate::gns::GnsRep;
use crate::scalar::{cx, re, to_f64, CMat, Real};

#[derive(Clone, Debug, PartialEq)]
pub struct ExtremizeOptions {
    pub max_iters: usize,
    /// Initial line-search step.
    pub step: f64,
    /// Stop once the gradient norm falls below this.
    pub tol: f64,
    pub seed: u64,
    pub starts: usize,
    pub fd_step: f64,
}

impl Default for ExtremizeOptions {
    fn default() -> Self {
        Self {
            max_iters: 500,
            step: 1.0,
            tol: 1e-7,
            seed: 0,
            starts: 8,
            fd_step: 1e-5,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceRow {
    pub start: usize,
    pub iteration: usize,
    pub entropy: f64,
    pub grad_norm: f64,
    pub step: f64,
}

#[derive(Clone, Debug)]
pub struct ExtremizeResult<T: Real> {
    /// Best gauge element found.
    pub g: AlgebraElement<T>,
    pub entropy: T,
    /// `S(ρ_1)`, for reference.
    pub baseline: T,
    /// Whether the best start met the gradient tolerance.
    pub converged: bool,
    pub best_start: usize,
    /// Rows of every start, ordered by start then iteration.
    pub trace: Vec<TraceRow>,
}

/// Real coordinates of block-diagonal Hermitian matrices: per block the
/// diagonal, then real and imaginary parts of the strict upper triangle.
fn hermitian_dim(shape: &AlgebraShape) -> usize {
    shape.blocks().iter().map(|n| n * n).sum()
}

fn hermitian_from_coords<T: Real>(shape: &AlgebraShape, x: &[f64]) -> AlgebraElement<T> {
    let mut at = 0;
    AlgebraElement::from_fn(shape, |r| {
        let n = shape.block_size(r);
        let mut m = CMat::<T>::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = cx(x[at], 0.0);
            at += 1;
        }
        for i in 0..n {
            for j in i + 1..n {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                let z: Complex<T> = cx(s * x[at], s * x[at + 1]);
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
                at += 2;
            }
        }
        m
    })
}

fn retract<T: Real>(shape: &AlgebraShape, g: &AlgebraElement<T>, x: &[f64], alpha: f64) -> AlgebraElement<T> {
    let scaled: Vec<f64> = x.iter().map(|v| v * alpha).collect();
    let u = AlgebraElement::exp_i_hermitian(&hermitian_from_coords::<T>(shape, &scaled));
    u.mul(g).expect("same shape")
}

fn objective<T: Real>(rep: &GnsRep<T>, g: &AlgebraElement<T>) -> f64 {
    to_f64(gauge_entropy(rep, g).expect("retraction keeps g unitary"))
}

fn gradient<T: Real>(rep: &GnsRep<T>, g: &AlgebraElement<T>, h: f64) -> Vec<f64> {
    let shape = rep.shape();
    let p = hermitian_dim(shape);
    let mut e = vec![0.0; p];
    (0..p)
        .map(|k| {
            e[k] = 1.0;
            let up = objective(rep, &retract(shape, g, &e, h));
            let down = objective(rep, &retract(shape, g, &e, -h));
            e[k] = 0.0;
            (up - down) / (2.0 * h)
        })
        .collect()
}

struct Run<T: Real> {
    g: AlgebraElement<T>,
    entropy: f64,
    converged: bool,
    rows: Vec<TraceRow>,
}

fn ascend<T: Real>(rep: &GnsRep<T>, start: usize, g0: AlgebraElement<T>, opts: &ExtremizeOptions) -> Run<T> {
    let shape = rep.shape();
    let mut g = g0;
    let mut f = objective(rep, &g);
    let mut rows = Vec::new();
    let mut alpha = opts.step;
    let mut converged = false;
    for iteration in 0..opts.max_iters {
        let grad = gradient(rep, &g, opts.fd_step);
        let gn2: f64 = grad.iter().map(|v| v * v).sum();
        let gn = gn2.sqrt();
        if gn < opts.tol {
            rows.push(TraceRow {
                start,
                iteration,
                entropy: f,
                grad_norm: gn,
                step: 0.0,
            });
            converged = true;
            break;
        }
        let mut accepted = None;
        let mut a = alpha;
        while a > 1e-12 {
            let cand = retract(shape, &g, &grad, a);
            let fc = objective(rep, &cand);
            if fc >= f + 1e-4 * a * gn2 {
                accepted = Some((cand, fc));
                break;
            }
            a *= 0.5;
        }
        rows.push(TraceRow {
            start,
            iteration,
            entropy: f,
            grad_norm: gn,
            step: if accepted.is_some() { a } else { 0.0 },
        });
        match accepted {
            Some((cand, fc)) => {
                g = cand;
                f = fc;
                alpha = (2.0 * a).min(opts.step * 16.0);
            }
            // No ascent at the finite-difference resolution.
            None => {
                converged = gn < opts.tol.sqrt();
                break;
            }
        }
    }
    Run {
        g,
        entropy: f,
        converged,
        rows,
    }
}

/// Maximizes `S(ρ_g)` from `opts.starts` Haar-random starting points,
/// run in parallel and merged in start order.
pub fn extremize_entropy<T: Real>(rep: &GnsRep<T>, opts: &ExtremizeOptions) -> Result<ExtremizeResult<T>> {
    let shape = rep.shape();
    let starts: Vec<AlgebraElement<T>> = {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        (0..opts.starts.max(1))
            .map(|_| random_unitary_with(shape, &mut rng))
            .collect()
    };
    let runs: Vec<Run<T>> = starts
        .into_par_iter()
        .enumerate()
        .map(|(s, g0)| ascend(rep, s, g0, opts))
        .collect();
    let best_start = runs.iter().enumerate().fold(
        0,
        |best, (s, r)| if r.entropy > runs[best].entropy { s } else { best },
    );
    let trace = runs.iter().flat_map(|r| r.rows.iter().cloned()).collect();
    let best = &runs[best_start];
    Ok(ExtremizeResult {
        g: best.g.clone(),
        entropy: gauge_entropy(rep, &best.g)?,
        baseline: baseline_entropy(rep),
        converged: best.converged,
        best_start,
        trace,
    })
}

/// `⊕_r V_r F_{n_r} V_r*`, the Fourier matrix of each block written in the
/// eigenbasis of `R`. All its `λ_{r,k}` equal `tr(R_r)/n_r`, which for a
/// single block `M_n` gives the maximal entropy `ln n`.
pub fn fourier_gauge<T: Real>(rep: &GnsRep<T>) -> AlgebraElement<T> {
    let shape = rep.shape();
    let coords = shape
        .blocks()
        .iter()
        .map(|&n| {
            let s = 1.0 / (n as f64).sqrt();
            CMat::from_fn(n, n, |j, k| {
                let t = 2.0 * std::f64::consts::PI * (j * k) as f64 / n as f64;
                Complex::new(re::<T>(s * t.cos()), re::<T>(s * t.sin()))
            })
        })
        .collect();
    rep.units().element(coords)
}

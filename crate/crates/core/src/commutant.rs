//! Commutants of finite operator families by null-space solve.
//!
//! The family must be closed under adjoints up to its commutant (a set of
//! unitaries and their adjoints, or a `*`-closed set such as a system of
//! matrix units).
//!
//! Every solution commutes with a random Hermitian combination `H` of the
//! generators, so in the eigenbasis of `H` it is block diagonal over the
//! eigenvalue clusters `α`. The generators then only enter through their
//! cluster blocks `T_αβ`, and the constraints read `B_α S = S B_β` for `S`
//! in the span of `{T_αβ}`. Where such an `S` is invertible it fixes `B_β`
//! from `B_α`; along a spanning forest of these couplings every block is
//! expressed through one root block per tree. The remaining constraints are
//! imposed on the root blocks through their normal matrix, and candidate
//! kernel vectors are re-scored against explicitly computed residuals so the
//! singular-value cutoff is applied at working precision.

use std::collections::VecDeque;
use std::ops::Range;

use nalgebra::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{self, HermitianEigen};
use crate::scalar::{frobenius, from_real, hs_inner, max_abs, re, CMat, Real, C};
use crate::tolerance;

/// Blocks below this (relative to unit-norm generators) are treated as
/// structurally zero.
const LINK_CUTOFF: f64 = 1e-12;

/// Eigenvalues of `H` closer than this (relative to `‖H‖`) share a cluster.
const CLUSTER_GAP: f64 = 1e-9;

/// Kernel candidates kept from the normal equations before re-scoring:
/// singular value at most `1e-4 σ_max`.
const CANDIDATE_CUTOFF: f64 = 1e-8;

/// Couplings with `σ_min / σ_max` below this are not used to propagate
/// blocks.
const EDGE_CONDITION: f64 = 1e-6;

/// Constraints `B_a S = S B_b` for all `S` in an orthonormal `span`.
struct Constraint<T: Real> {
    a: usize,
    b: usize,
    span: Vec<CMat<T>>,
}

/// `B_a = left · X_root · right`.
struct Propagation<T: Real> {
    root: usize,
    left: CMat<T>,
    right: CMat<T>,
}

/// HS-orthonormal basis of `{B : [B, T] = 0 for all T in generators}`.
///
/// `seed` fixes the random combinations used by the reduction; the returned
/// span does not depend on it.
pub fn commutant_of<T: Real>(generators: &[CMat<T>], seed: u64) -> Vec<CMat<T>> {
    let Some(first) = generators.first() else {
        return Vec::new();
    };
    let d = first.nrows();
    let gens: Vec<CMat<T>> = generators
        .iter()
        .filter_map(|g| {
            let n = frobenius(g);
            (n > T::zero()).then(|| g * from_real(T::one() / n))
        })
        .collect();
    if gens.is_empty() {
        return full_matrix_basis(d);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h = CMat::<T>::zeros(d, d);
    for g in &gens {
        let c = gaussian(&mut rng);
        h += g * c + g.adjoint() * c.conj();
    }
    let eig = HermitianEigen::new(&h);
    let w = eig.vectors;
    let clusters = cluster(&eig.values.iter().copied().collect::<Vec<_>>());
    let nc = clusters.len();
    let rotated: Vec<CMat<T>> = gens.iter().map(|g| sandwich(&w, g)).collect();

    let link = re::<T>(tolerance::for_scalar::<T>(LINK_CUTOFF));
    let mut constraints = Vec::new();
    for a in 0..nc {
        for b in 0..nc {
            let blocks: Vec<CMat<T>> = rotated
                .iter()
                .map(|t| block(t, &clusters[a], &clusters[b]))
                .filter(|blk| max_abs(blk) > link)
                .collect();
            let span = orthonormalize(&blocks, link);
            if !span.is_empty() {
                constraints.push(Constraint { a, b, span });
            }
        }
    }

    let sizes: Vec<usize> = clusters.iter().map(|c| c.len()).collect();
    let props = propagate(&sizes, &constraints, &mut rng);

    // Root parameter layout.
    let mut offset = vec![usize::MAX; nc];
    let mut p = 0;
    for a in 0..nc {
        if props[a].root == a {
            offset[a] = p;
            p += sizes[a] * sizes[a];
        }
    }

    let normal = normal_matrix(&props, &constraints, &offset, p);
    let metric = metric_matrix(&props, &offset, p);
    let metric_eig = HermitianEigen::new(&metric);
    // Each root contributes the identity on its own coordinates, so the
    // metric is bounded below by 1.
    let inv_sqrt = metric_eig.map(|x| from_real(T::one() / x.sqrt()));
    let whitened = linalg::hermitian_part(&linalg::mul(&linalg::mul(&inv_sqrt, &normal), &inv_sqrt));
    let e = HermitianEigen::new(&whitened);

    // Propagation can satisfy every constraint exactly, leaving a zero
    // normal matrix. The generators have unit norm, so their commutator map
    // has norm of order one; cutoffs are taken relative to at least that.
    let mu_max = if p == 0 { T::one() } else { e.max().max(T::one()) };
    let sigma_max = mu_max.sqrt();
    let cand_cut = re::<T>(tolerance::for_scalar::<T>(CANDIDATE_CUTOFF)) * mu_max;
    let final_cut = re::<T>(tolerance::for_scalar::<T>(tolerance::RANK_CUTOFF)) * sigma_max;

    let cand: Vec<usize> = (0..p).filter(|&k| e.values[k] <= cand_cut).collect();
    if cand.is_empty() {
        return Vec::new();
    }
    let y = CMat::from_fn(p, cand.len(), |i, k| e.vectors[(i, cand[k])]);
    let x = rescore(
        &linalg::mul(&inv_sqrt, &y),
        &props,
        &constraints,
        &offset,
        &sizes,
        final_cut,
    );

    let blocks = expand(&x, &props, &offset, &sizes);
    let mut out = Vec::with_capacity(x.ncols());
    for k in 0..x.ncols() {
        let mut rotated_b = CMat::<T>::zeros(d, d);
        for (a, blk) in blocks.iter().enumerate() {
            linalg::place_block(&mut rotated_b, clusters[a].start, &blk[k]);
        }
        out.push(linalg::mul(&linalg::mul(&w, &rotated_b), &w.adjoint()));
    }
    out
}

fn gaussian<T: Real, R: rand::Rng + ?Sized>(rng: &mut R) -> C<T> {
    let a: f64 = StandardNormal.sample(rng);
    let b: f64 = StandardNormal.sample(rng);
    Complex::new(re::<T>(a), re::<T>(b))
}

/// Modified Gram-Schmidt with one reorthogonalization pass.
fn orthonormalize<T: Real>(ops: &[CMat<T>], cut: T) -> Vec<CMat<T>> {
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
        if n > cut {
            basis.push(v * from_real(T::one() / n));
        }
    }
    basis
}

/// `σ_min / σ_max` of a square matrix, zero when not square.
fn condition_score<T: Real>(s: &CMat<T>) -> T {
    if s.nrows() != s.ncols() {
        return T::zero();
    }
    let e = HermitianEigen::new(&(s.adjoint() * s));
    let max = e.max();
    if max <= T::zero() {
        return T::zero();
    }
    (e.min().max(T::zero()) / max).sqrt()
}

/// Expresses every cluster block through a root block, following the best
/// conditioned couplings (a maximum spanning forest).
fn propagate<T: Real, R: rand::Rng + ?Sized>(
    sizes: &[usize],
    constraints: &[Constraint<T>],
    rng: &mut R,
) -> Vec<Propagation<T>> {
    let nc = sizes.len();
    let threshold = re::<T>(tolerance::for_scalar::<T>(EDGE_CONDITION));
    let mut edges: Vec<(T, usize, usize, CMat<T>)> = Vec::new();
    for c in constraints {
        if c.a == c.b || sizes[c.a] != sizes[c.b] {
            continue;
        }
        let mut s = CMat::<T>::zeros(sizes[c.a], sizes[c.b]);
        for q in &c.span {
            s += q * gaussian::<T, R>(rng);
        }
        let score = condition_score(&s);
        if score > threshold {
            edges.push((score, c.a, c.b, s));
        }
    }
    edges.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap_or(std::cmp::Ordering::Equal));

    let mut uf = UnionFind::new(nc);
    let mut adjacency: Vec<Vec<(usize, usize, bool)>> = vec![Vec::new(); nc];
    for (k, (_, a, b, _)) in edges.iter().enumerate() {
        if uf.find(*a) != uf.find(*b) {
            uf.union(*a, *b);
            // `true`: stored as B_a S = S B_b, seen from a.
            adjacency[*a].push((*b, k, true));
            adjacency[*b].push((*a, k, false));
        }
    }

    let mut props: Vec<Option<Propagation<T>>> = (0..nc).map(|_| None).collect();
    for start in 0..nc {
        if props[start].is_some() {
            continue;
        }
        let m = sizes[start];
        props[start] = Some(Propagation {
            root: start,
            left: linalg::identity(m),
            right: linalg::identity(m),
        });
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &(v, k, forward) in &adjacency[u] {
                if props[v].is_some() {
                    continue;
                }
                let s = &edges[k].3;
                let s_inv = s.clone().try_inverse().expect("well-conditioned coupling");
                let pu = props[u].as_ref().expect("visited");
                // forward: B_u S = S B_v, so B_v = S⁻¹ B_u S; otherwise
                // B_v S = S B_u, so B_v = S B_u S⁻¹.
                let (left, right) = if forward {
                    (&s_inv * &pu.left, &pu.right * s)
                } else {
                    (s * &pu.left, &pu.right * &s_inv)
                };
                props[v] = Some(Propagation {
                    root: pu.root,
                    left,
                    right,
                });
                queue.push_back(v);
            }
        }
    }
    props
        .into_iter()
        .map(|p| p.expect("every cluster visited"))
        .collect()
}

/// `G += sign · (a ⊗ b)` at block offset `(r0, c0)`.
fn add_kron<T: Real>(g: &mut CMat<T>, r0: usize, c0: usize, a: &CMat<T>, b: &CMat<T>, sign: T) {
    let (br, bc) = (b.nrows(), b.ncols());
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            let x = a[(i, j)] * from_real(sign);
            if x.re == T::zero() && x.im == T::zero() {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    g[(r0 + i * br + k, c0 + j * bc + l)] += x * b[(k, l)];
                }
            }
        }
    }
}

/// Normal matrix of the constraints in root coordinates. With row-major
/// vectorization `vec(A X B) = (A ⊗ Bᵀ) vec X`, the residual of
/// `B_a S − S B_b` is `(L_a ⊗ (R_a S)ᵀ) x − (S L_b ⊗ R_bᵀ) x'`, and
/// `(A ⊗ Bᵀ)† (C ⊗ Dᵀ) = A†C ⊗ conj(B D†)`.
fn normal_matrix<T: Real>(
    props: &[Propagation<T>],
    constraints: &[Constraint<T>],
    offset: &[usize],
    p: usize,
) -> CMat<T> {
    let mut g = CMat::<T>::zeros(p, p);
    let one = T::one();
    for c in constraints {
        let (pa, pb) = (&props[c.a], &props[c.b]);
        let (oa, ob) = (offset[pa.root], offset[pb.root]);
        for s in &c.span {
            let a1 = &pa.left;
            let b1 = &pa.right * s;
            let a2 = s * &pb.left;
            let b2 = &pb.right;
            add_kron(
                &mut g,
                oa,
                oa,
                &(a1.adjoint() * a1),
                &(&b1 * b1.adjoint()).conjugate(),
                one,
            );
            add_kron(
                &mut g,
                ob,
                ob,
                &(a2.adjoint() * &a2),
                &(b2 * b2.adjoint()).conjugate(),
                one,
            );
            let cross_a = a1.adjoint() * &a2;
            let cross_b = (&b1 * b2.adjoint()).conjugate();
            add_kron(&mut g, oa, ob, &cross_a, &cross_b, -one);
            add_kron(&mut g, ob, oa, &cross_a.adjoint(), &cross_b.adjoint(), -one);
        }
    }
    g
}

/// `Σ_a ‖B_a‖²` as a quadratic form in root coordinates.
fn metric_matrix<T: Real>(props: &[Propagation<T>], offset: &[usize], p: usize) -> CMat<T> {
    let mut n = CMat::<T>::zeros(p, p);
    for pa in props {
        let o = offset[pa.root];
        add_kron(
            &mut n,
            o,
            o,
            &(pa.left.adjoint() * &pa.left),
            &(&pa.right * pa.right.adjoint()).conjugate(),
            T::one(),
        );
    }
    n
}

/// `[X_k · right]_k` through one product of the vertically stacked `X_k`.
fn right_all<T: Real>(xs: &[CMat<T>], right: &CMat<T>) -> Vec<CMat<T>> {
    let r = xs[0].nrows();
    let prod = linalg::mul(&stack(xs, true), right);
    (0..xs.len())
        .map(|k| prod.view((k * r, 0), (r, right.ncols())).into_owned())
        .collect()
}

/// `[left · X_k]_k` through one product of the horizontally stacked `X_k`.
fn left_all<T: Real>(left: &CMat<T>, xs: &[CMat<T>]) -> Vec<CMat<T>> {
    let q = xs[0].ncols();
    let prod = linalg::mul(left, &stack(xs, false));
    (0..xs.len())
        .map(|k| prod.view((0, k * q), (left.nrows(), q)).into_owned())
        .collect()
}

/// Stacks equally shaped matrices vertically or horizontally.
fn stack<T: Real>(xs: &[CMat<T>], vertical: bool) -> CMat<T> {
    let (r, q) = xs[0].shape();
    let n = xs.len();
    let mut out = if vertical {
        CMat::zeros(r * n, q)
    } else {
        CMat::zeros(r, q * n)
    };
    for (k, x) in xs.iter().enumerate() {
        let at = if vertical { (k * r, 0) } else { (0, k * q) };
        out.view_mut(at, (r, q)).copy_from(x);
    }
    out
}

/// Cluster blocks `B_a` for every column of root coordinates `x`, indexed
/// `[a][k]`.
fn expand<T: Real>(
    x: &CMat<T>,
    props: &[Propagation<T>],
    offset: &[usize],
    sizes: &[usize],
) -> Vec<Vec<CMat<T>>> {
    let c = x.ncols();
    let mut root_blocks: Vec<Option<Vec<CMat<T>>>> = (0..props.len()).map(|_| None).collect();
    props
        .iter()
        .map(|pa| {
            let roots = root_blocks[pa.root].get_or_insert_with(|| {
                let m = sizes[pa.root];
                let o = offset[pa.root];
                (0..c)
                    .map(|k| CMat::from_fn(m, m, |i, j| x[(o + i * m + j, k)]))
                    .collect()
            });
            left_all(&pa.left, &right_all(roots, &pa.right))
        })
        .collect()
}

/// Keeps the directions in `span(x)` whose true constraint residual is at
/// most `cut`, by diagonalizing the Gram matrix of explicitly computed
/// residuals. The result is orthonormal for `Σ_a ‖B_a‖²` when `x` is.
fn rescore<T: Real>(
    x: &CMat<T>,
    props: &[Propagation<T>],
    constraints: &[Constraint<T>],
    offset: &[usize],
    sizes: &[usize],
    cut: T,
) -> CMat<T> {
    let c = x.ncols();
    let blocks = expand(x, props, offset, sizes);
    let vertical: Vec<CMat<T>> = blocks.iter().map(|bs| stack(bs, true)).collect();
    let horizontal: Vec<CMat<T>> = blocks.iter().map(|bs| stack(bs, false)).collect();
    // Residual of every candidate for one `(constraint, S)`, one column per
    // candidate. Row k·m_a + i of `lhs` and column k·m_b + j of `rhs` hold
    // entry (i, j) of candidate k.
    let residual = |con: &Constraint<T>, s: &CMat<T>| {
        let (ma, mb) = (sizes[con.a], sizes[con.b]);
        let lhs = linalg::mul(&vertical[con.a], s);
        let rhs = linalg::mul(s, &horizontal[con.b]);
        let (lhs, rhs) = (lhs.as_slice(), rhs.as_slice());
        let lhs_rows = c * ma;
        let mut out = CMat::<T>::zeros(ma * mb, c);
        for (k, col) in out.as_mut_slice().chunks_mut(ma * mb).enumerate() {
            for j in 0..mb {
                let l = &lhs[j * lhs_rows + k * ma..j * lhs_rows + (k + 1) * ma];
                let r = &rhs[(k * mb + j) * ma..(k * mb + j + 1) * ma];
                for (dst, (x, y)) in col[j * ma..(j + 1) * ma].iter_mut().zip(l.iter().zip(r)) {
                    *dst = *x - *y;
                }
            }
        }
        out
    };
    let pairs = || {
        constraints
            .iter()
            .flat_map(|con| con.span.iter().map(move |s| (con, s)))
    };

    // Every direction passes when the whole residual block does.
    let cut2 = cut * cut;
    let total = pairs().fold(T::zero(), |acc, (con, s)| {
        acc + residual(con, s).iter().fold(T::zero(), |a, z| a + z.norm_sqr())
    });
    if total <= cut2 {
        return x.clone();
    }
    let mut gram = CMat::<T>::zeros(c, c);
    for (con, s) in pairs() {
        let r = residual(con, s);
        gram += linalg::ad_mul(&r, &r);
    }
    let e = HermitianEigen::new(&gram);
    let keep: Vec<usize> = (0..c).filter(|&k| e.values[k] <= cut2).collect();
    let y = CMat::from_fn(c, keep.len(), |i, k| e.vectors[(i, keep[k])]);
    x * y
}

/// Standard basis `E_{ij}` of all `d × d` matrices.
fn full_matrix_basis<T: Real>(d: usize) -> Vec<CMat<T>> {
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            let mut m = CMat::zeros(d, d);
            m[(i, j)] = from_real(T::one());
            out.push(m);
        }
    }
    out
}

/// Groups a descending spectrum into ranges of (numerically) equal values.
fn cluster<T: Real>(values: &[T]) -> Vec<Range<usize>> {
    if values.is_empty() {
        return Vec::new();
    }
    let scale = values.iter().fold(T::one(), |a, &v| a.max(crate::scalar::abs(v)));
    let gap = re::<T>(tolerance::for_scalar::<T>(CLUSTER_GAP)) * scale;
    let mut out = Vec::new();
    let mut start = 0;
    for k in 1..values.len() {
        if values[k - 1] - values[k] > gap {
            out.push(start..k);
            start = k;
        }
    }
    out.push(start..values.len());
    out
}

/// `W† T W`, using the sparsity of `T` when it pays off.
fn sandwich<T: Real>(w: &CMat<T>, t: &CMat<T>) -> CMat<T> {
    let d = w.nrows();
    let zero = T::zero();
    let nnz: Vec<(usize, usize, C<T>)> = t
        .iter()
        .enumerate()
        .filter(|(_, z)| z.re != zero || z.im != zero)
        .map(|(k, z)| (k % d, k / d, *z))
        .collect();
    if nnz.len() * 2 >= d {
        return linalg::mul(&linalg::ad_mul(w, t), w);
    }
    let mut out = CMat::zeros(d, d);
    for (p, q, z) in nnz {
        for a in 0..d {
            let left = w[(p, a)].conj() * z;
            for b in 0..d {
                out[(a, b)] += left * w[(q, b)];
            }
        }
    }
    out
}

fn block<T: Real>(m: &CMat<T>, rows: &Range<usize>, cols: &Range<usize>) -> CMat<T> {
    m.view((rows.start, cols.start), (rows.len(), cols.len()))
        .into_owned()
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Largest `‖[B, T]‖_HS` over a basis and a generator family.
pub fn max_commutator<T: Real>(basis: &[CMat<T>], generators: &[CMat<T>]) -> T {
    let mut worst = T::zero();
    for b in basis {
        for g in generators {
            worst = worst.max(frobenius(&linalg::commutator(b, g)));
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{cx, to_f64};
    use crate::span::OperatorSpan;
    use nalgebra::SVD;

    fn kron_oracle(gens: &[CMat<f64>]) -> usize {
        // Column-major vec: vec(BT − TB) = (Tᵀ ⊗ 1 − 1 ⊗ T) vec B.
        let d = gens[0].nrows();
        let id = CMat::<f64>::identity(d, d);
        let mut rows = CMat::<f64>::zeros(d * d * gens.len(), d * d);
        for (k, t) in gens.iter().enumerate() {
            let blk = t.transpose().kronecker(&id) - id.kronecker(t);
            rows.view_mut((k * d * d, 0), (d * d, d * d)).copy_from(&blk);
        }
        let svd = SVD::new(rows, false, false);
        let smax = svd.singular_values.max();
        svd.singular_values.iter().filter(|&&s| s <= 1e-8 * smax).count()
            + (d * d).saturating_sub(svd.singular_values.len())
    }

    fn diag(v: &[f64]) -> CMat<f64> {
        CMat::from_diagonal(&nalgebra::DVector::from_iterator(
            v.len(),
            v.iter().map(|&x| cx(x, 0.0)),
        ))
    }

    #[test]
    fn diagonal_generator() {
        let t = diag(&[1.0, 1.0, 2.0]);
        let basis = commutant_of(std::slice::from_ref(&t), 0);
        assert_eq!(basis.len(), 5);
        assert_eq!(kron_oracle(std::slice::from_ref(&t)), 5);
        assert!(to_f64(max_commutator(&basis, &[t])) < 1e-12);
    }

    #[test]
    fn identity_generator_gives_everything() {
        let basis = commutant_of(&[CMat::<f64>::identity(3, 3)], 0);
        assert_eq!(basis.len(), 9);
    }

    #[test]
    fn matches_kronecker_oracle_on_a_tensor_algebra() {
        // a ⊗ 1_2 for a in M_2 has commutant 1_2 ⊗ M_2.
        let id2 = CMat::<f64>::identity(2, 2);
        let mut gens = Vec::new();
        for i in 0..2 {
            for j in 0..2 {
                let mut e = CMat::<f64>::zeros(2, 2);
                e[(i, j)] = cx(1.0, 0.0);
                gens.push(e.kronecker(&id2));
            }
        }
        let basis = commutant_of(&gens, 7);
        assert_eq!(basis.len(), 4);
        assert_eq!(kron_oracle(&gens), 4);
        let expect: Vec<_> = gens
            .iter()
            .map(|g| {
                // swap the tensor factors of g
                let mut s = CMat::<f64>::zeros(4, 4);
                for i in 0..2 {
                    for j in 0..2 {
                        for k in 0..2 {
                            for l in 0..2 {
                                s[(i * 2 + j, k * 2 + l)] = g[(j * 2 + i, l * 2 + k)];
                            }
                        }
                    }
                }
                s
            })
            .collect();
        let a = OperatorSpan::from_orthonormal(basis);
        let b = OperatorSpan::from_operators(&expect);
        assert!(a.distance(&b) < 1e-12);
    }

    #[test]
    fn basis_is_orthonormal() {
        let t = diag(&[0.0, 0.0, 1.0, 1.0, 3.0]);
        let basis = commutant_of(&[t], 1);
        for (a, x) in basis.iter().enumerate() {
            for (b, y) in basis.iter().enumerate() {
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((hs_inner(x, y) - cx(expect, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn clustering() {
        let c = cluster(&[3.0, 3.0 - 1e-13, 1.0, 0.0, -1e-14]);
        assert_eq!(c, vec![0..2, 2..3, 3..5]);
    }
}

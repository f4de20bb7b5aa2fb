//! Dense complex linear algebra helpers built on nalgebra.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::scalar::{from_real, modulus, re, CMat, Real, C};

/// Spectral decomposition `m = V diag(values) V†` of a Hermitian matrix.
///
/// Eigenvalues are sorted in descending order (stable, so ties keep the
/// solver's order) and every eigenvector is rotated so that its first
/// component of non-negligible modulus is real and positive.
#[derive(Clone, Debug)]
pub struct HermitianEigen<T: Real> {
    pub values: DVector<T>,
    pub vectors: CMat<T>,
}

impl<T: Real> HermitianEigen<T> {
    pub fn new(m: &CMat<T>) -> Self {
        let n = m.nrows();
        debug_assert_eq!(n, m.ncols());
        if n == 0 {
            return Self {
                values: DVector::zeros(0),
                vectors: DMatrix::zeros(0, 0),
            };
        }
        let herm = hermitian_part(m);
        let eig = SymmetricEigen::new(herm);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            eig.eigenvalues[b]
                .partial_cmp(&eig.eigenvalues[a])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let values = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
        let mut vectors = CMat::<T>::zeros(n, n);
        let cut = re::<T>(1e-10);
        for (dst, &src) in order.iter().enumerate() {
            let col = eig.eigenvectors.column(src);
            let pivot = col.iter().copied().find(|z| modulus(*z) > cut);
            let phase = match pivot {
                Some(z) => z.conj() / from_real(modulus(z)),
                None => Complex::new(T::one(), T::zero()),
            };
            for i in 0..n {
                vectors[(i, dst)] = col[i] * phase;
            }
        }
        Self { values, vectors }
    }

    /// Rebuilds `V diag(f(values)) V†`.
    pub fn map<F: Fn(T) -> C<T>>(&self, f: F) -> CMat<T> {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for j in 0..n {
            let fj = f(self.values[j]);
            for i in 0..n {
                scaled[(i, j)] *= fj;
            }
        }
        mul(&scaled, &self.vectors.adjoint())
    }

    pub fn min(&self) -> T {
        self.values
            .iter()
            .copied()
            .fold(T::max_value().unwrap(), |a, b| a.min(b))
    }

    pub fn max(&self) -> T {
        self.values
            .iter()
            .copied()
            .fold(T::min_value().unwrap(), |a, b| a.max(b))
    }
}

/// `(m + m†) / 2`.
pub fn hermitian_part<T: Real>(m: &CMat<T>) -> CMat<T> {
    (m + m.adjoint()) * from_real(re::<T>(0.5))
}

/// Applies a real function to the spectrum of a Hermitian matrix.
pub fn hermitian_fn<T: Real, F: Fn(T) -> T>(m: &CMat<T>, f: F) -> CMat<T> {
    HermitianEigen::new(m).map(|x| from_real(f(x)))
}

pub fn identity<T: Real>(n: usize) -> CMat<T> {
    CMat::<T>::identity(n, n)
}

pub fn kron<T: Real>(a: &CMat<T>, b: &CMat<T>) -> CMat<T> {
    a.kronecker(b)
}

/// Matrix product. Large dense operands go through four real products,
/// which reach the optimized real kernels. Operands that are mostly
/// negligible (represented matrix units, `J`, `Δ` in the GNS basis) are
/// multiplied sparsely; entries below `16 ε · max|m|` are skipped there,
/// which perturbs the product at the level of the rounding error of the
/// dense product.
pub fn mul<T: Real>(a: &CMat<T>, b: &CMat<T>) -> CMat<T> {
    if a.nrows() * a.ncols() * b.ncols() < 16384 {
        return a * b;
    }
    if let Some(nz) = sparse_columns(b) {
        return mul_sparse_right(a, &nz, b.ncols());
    }
    if let Some(nz) = sparse_columns(a) {
        return mul_sparse_left(a.nrows(), &nz, b);
    }
    let (ar, ai) = (a.map(|z| z.re), a.map(|z| z.im));
    let (br, bi) = (b.map(|z| z.re), b.map(|z| z.im));
    let real = &ar * &br - &ai * &bi;
    let imag = &ar * &bi + &ai * &br;
    real.zip_map(&imag, Complex::new)
}

type SparseColumns<T> = Vec<Vec<(usize, C<T>)>>;

/// Non-negligible entries per column, if at most one in sixteen entries is.
fn sparse_columns<T: Real>(m: &CMat<T>) -> Option<SparseColumns<T>> {
    let scale = m
        .iter()
        .fold(T::zero(), |acc, z| acc.max(z.re.abs()).max(z.im.abs()));
    let cut = re::<T>(16.0) * T::default_epsilon() * scale;
    let budget = m.len() / 16;
    let mut count = 0;
    let mut cols = Vec::with_capacity(m.ncols());
    for c in m.column_iter() {
        let mut nz = Vec::new();
        for (i, z) in c.iter().enumerate() {
            if z.re.abs() > cut || z.im.abs() > cut {
                count += 1;
                if count > budget {
                    return None;
                }
                nz.push((i, *z));
            }
        }
        cols.push(nz);
    }
    Some(cols)
}

/// Column `j` of `a b` as a combination of the columns of `a` picked out by
/// the nonzeros of column `j` of `b`.
fn mul_sparse_right<T: Real>(a: &CMat<T>, b: &SparseColumns<T>, cols: usize) -> CMat<T> {
    let rows = a.nrows();
    let mut out = CMat::<T>::zeros(rows, cols);
    let a_data = a.as_slice();
    for (col, nz) in out.as_mut_slice().chunks_mut(rows).zip(b) {
        for &(k, z) in nz {
            for (o, x) in col.iter_mut().zip(&a_data[k * rows..(k + 1) * rows]) {
                *o += *x * z;
            }
        }
    }
    out
}

fn mul_sparse_left<T: Real>(rows: usize, a: &SparseColumns<T>, b: &CMat<T>) -> CMat<T> {
    let mut out = CMat::<T>::zeros(rows, b.ncols());
    for (j, col) in out.as_mut_slice().chunks_mut(rows).enumerate() {
        for (k, z) in b.column(j).iter().enumerate() {
            if z.re != T::zero() || z.im != T::zero() {
                for &(i, x) in &a[k] {
                    col[i] += x * *z;
                }
            }
        }
    }
    out
}

/// `a† b`.
pub fn ad_mul<T: Real>(a: &CMat<T>, b: &CMat<T>) -> CMat<T> {
    mul(&a.adjoint(), b)
}

pub fn commutator<T: Real>(a: &CMat<T>, b: &CMat<T>) -> CMat<T> {
    a * b - b * a
}

/// Largest singular value.
pub fn spectral_norm<T: Real>(m: &CMat<T>) -> T {
    if m.is_empty() {
        return T::zero();
    }
    let gram = if m.nrows() >= m.ncols() {
        m.adjoint() * m
    } else {
        m * m.adjoint()
    };
    HermitianEigen::new(&gram).max().max(T::zero()).sqrt()
}

/// `‖m m† − 1‖` in the spectral norm.
pub fn unitarity_residual<T: Real>(m: &CMat<T>) -> T {
    let n = m.nrows();
    spectral_norm(&(m * m.adjoint() - identity::<T>(n)))
}

/// Square matrix of i.i.d. standard complex Gaussians, `E|z|² = 1`.
pub fn ginibre<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat<T> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMat::<T>::from_fn(n, n, |_, _| {
        let a: f64 = rng.sample(StandardNormal);
        let b: f64 = rng.sample(StandardNormal);
        Complex::new(re(a * s), re(b * s))
    })
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of
/// `diag(R)` absorbed into `Q`.
pub fn haar_unitary<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat<T> {
    let z = ginibre::<T, R>(n, rng);
    let qr = z.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        let d = r[(j, j)];
        let m = modulus(d);
        let phase = if m > T::zero() {
            d / from_real(m)
        } else {
            Complex::new(T::one(), T::zero())
        };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Random Hermitian matrix from the Gaussian unitary ensemble.
pub fn random_hermitian<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat<T> {
    hermitian_part(&ginibre::<T, R>(n, rng))
}

/// Copies `block` into `dst` with its top-left corner at `(offset, offset)`.
pub fn place_block<T: Real>(dst: &mut CMat<T>, offset: usize, block: &CMat<T>) {
    let n = block.nrows();
    dst.view_mut((offset, offset), (n, n)).copy_from(block);
}

#[cfg(test)]
mod tests {

    use super::*;
    use crate::scalar::{frobenius, to_f64};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn real_split_product_matches_complex_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a: CMat<f64> = ginibre(40, &mut rng);
        let b: CMat<f64> = ginibre(40, &mut rng).columns(0, 31).into_owned();
        let diff = mul(&a, &b) - &a * &b;
        assert!(diff.iter().all(|z| z.norm() < 1e-12));
        let diff = ad_mul(&a, &a) - a.adjoint() * &a;
        assert!(diff.iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn sparse_products_match_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a: CMat<f64> = ginibre(48, &mut rng);
        let mut p = CMat::<f64>::zeros(48, 48);
        for i in 0..48 {
            p[((5 * i + 3) % 48, i)] = Complex::new(0.5 + i as f64, -1.0);
        }
        for (x, y) in [(&a, &p), (&p, &a), (&p, &p)] {
            let diff = mul(x, y) - x * y;
            assert!(diff.iter().all(|z| z.norm() < 1e-11));
        }
    }

    #[test]
    fn eigen_is_sorted_and_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = random_hermitian::<f64, _>(6, &mut rng);
        let e = HermitianEigen::new(&h);
        for k in 1..6 {
            assert!(e.values[k - 1] >= e.values[k]);
        }
        let back = e.map(from_real);
        assert!(to_f64(frobenius(&(back - &h))) < 1e-12);
    }

    #[test]
    fn phase_fix_makes_pivot_real_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = random_hermitian::<f64, _>(4, &mut rng);
        let e = HermitianEigen::new(&h);
        for j in 0..4 {
            let z = e
                .vectors
                .column(j)
                .iter()
                .copied()
                .find(|z| modulus(*z) > 1e-10)
                .unwrap();
            assert!(z.im.abs() < 1e-14 && z.re > 0.0);
        }
    }

    #[test]
    fn haar_unitary_is_unitary_and_deterministic() {
        let a = haar_unitary::<f64, _>(5, &mut ChaCha8Rng::seed_from_u64(42));
        let b = haar_unitary::<f64, _>(5, &mut ChaCha8Rng::seed_from_u64(42));
        assert_eq!(a, b);
        assert!(unitarity_residual(&a) < 1e-12);
    }

    #[test]
    fn spectral_norm_of_diagonal() {
        let m = CMat::<f64>::from_diagonal(&DVector::from_vec(vec![
            Complex::new(0.5, 0.0),
            Complex::new(0.0, -2.0),
        ]));
        assert!((spectral_norm(&m) - 2.0).abs() < 1e-12);
    }
}

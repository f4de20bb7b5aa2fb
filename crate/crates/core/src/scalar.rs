//! Scalar plumbing shared by every module.
//!
//! All numerical code is generic over a real field `T` (in practice `f64`,
//! with `f32` supported at correspondingly looser accuracy). Complex
//! amplitudes are `Complex<T>` and dense operators are `DMatrix<Complex<T>>`.

use nalgebra::{Complex, ComplexField, DMatrix, DVector, RealField};
use num_traits::{FromPrimitive, ToPrimitive};

/// Real scalar type the toolkit is generic over.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive + Send + Sync {}

impl<T> Real for T where T: RealField + Copy + FromPrimitive + ToPrimitive + Send + Sync {}

pub type C<T> = Complex<T>;
pub type CMat<T> = DMatrix<Complex<T>>;
pub type CVec<T> = DVector<Complex<T>>;

/// Converts an `f64` literal into `T`.
#[inline]
pub fn re<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

/// Lossy conversion back to `f64`, used for reporting and tolerance checks.
#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[inline]
pub fn cx<T: Real>(re_part: f64, im_part: f64) -> C<T> {
    Complex::new(re::<T>(re_part), re::<T>(im_part))
}

#[inline]
pub fn from_real<T: Real>(x: T) -> C<T> {
    Complex::new(x, T::zero())
}

#[inline]
pub fn abs<T: Real>(x: T) -> T {
    <T as ComplexField>::abs(x)
}

#[inline]
pub fn modulus<T: Real>(z: C<T>) -> T {
    z.norm_sqr().sqrt()
}

/// Largest entry modulus of a matrix.
pub fn max_abs<T: Real>(m: &CMat<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc.max(modulus(*z)))
}

/// Frobenius (Hilbert-Schmidt) norm.
pub fn frobenius<T: Real>(m: &CMat<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
}

/// Hilbert-Schmidt inner product `Tr(a† b)`.
pub fn hs_inner<T: Real>(a: &CMat<T>, b: &CMat<T>) -> C<T> {
    a.iter()
        .zip(b.iter())
        .fold(C::new(T::zero(), T::zero()), |acc, (x, y)| acc + x.conj() * y)
}

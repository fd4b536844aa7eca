//! Dense and sparse linear algebra over `f64` and `Complex64`.
//!
//! Problem sizes stay in the low thousands, so the factorizations are dense
//! and deterministic: Cholesky, LU with partial pivoting, and cyclic Jacobi
//! for Hermitian eigenproblems.

mod cholesky;
mod dense;
mod eigen;
mod lu;
mod sparse;

pub use cholesky::{cholesky_spd, Cholesky};
pub use dense::Matrix;
pub use eigen::{hermitian_eigen, HermitianEigen, EIG_TOL, MAX_SWEEPS};
pub use lu::Lu;
pub use sparse::{CsrMatrix, TripletBuilder};

use core::fmt::Debug;
use core::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;
use num_traits::{One, Zero};

/// Field of scalars the kernels operate on.
pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + Send
    + Sync
    + 'static
{
    fn conj(self) -> Self;
    fn re(self) -> f64;
    fn modulus(self) -> f64;
    fn from_real(x: f64) -> Self;
    fn to_complex(self) -> Complex64;
    fn scale(self, factor: f64) -> Self {
        self * Self::from_real(factor)
    }
}

impl Scalar for f64 {
    #[inline]
    fn conj(self) -> Self {
        self
    }
    #[inline]
    fn re(self) -> f64 {
        self
    }
    #[inline]
    fn modulus(self) -> f64 {
        libm::fabs(self)
    }
    #[inline]
    fn from_real(x: f64) -> Self {
        x
    }
    #[inline]
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
}

impl Scalar for Complex64 {
    #[inline]
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    #[inline]
    fn re(self) -> f64 {
        self.re
    }
    #[inline]
    fn modulus(self) -> f64 {
        libm::hypot(self.re, self.im)
    }
    #[inline]
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    #[inline]
    fn to_complex(self) -> Complex64 {
        self
    }
    #[inline]
    fn scale(self, factor: f64) -> Self {
        Complex64::new(self.re * factor, self.im * factor)
    }
}

/// `x* y = Σ conj(xᵢ) yᵢ`.
pub fn inner<T: Scalar>(x: &[T], y: &[T]) -> T {
    debug_assert_eq!(x.len(), y.len());
    x.iter()
        .zip(y)
        .fold(T::zero(), |acc, (&a, &b)| acc + a.conj() * b)
}

pub fn norm2<T: Scalar>(x: &[T]) -> f64 {
    libm::sqrt(x.iter().map(|v| v.modulus() * v.modulus()).sum::<f64>())
}

pub fn max_abs<T: Scalar>(x: &[T]) -> f64 {
    x.iter().fold(0.0, |m, v| f64::max(m, v.modulus()))
}

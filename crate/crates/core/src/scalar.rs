//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating-point scalar the model and solver are generic over: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Default + Debug + Display + Sum + Send + Sync + 'static
{
    /// Converts an `f64` literal or configuration value into `Self`.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 is representable in every supported float type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex scalar built on a [`Real`].
pub type Cx<T> = Complex<T>;

/// Squared Euclidean norm of a complex vector.
pub fn norm_sqr<T: Real>(v: &[Cx<T>]) -> T {
    v.iter().map(|c| c.norm_sqr()).sum()
}

pub fn norm<T: Real>(v: &[Cx<T>]) -> T {
    norm_sqr(v).sqrt()
}

/// `Σ a_i · b_i` without conjugation (row vector times column vector).
pub fn dot<T: Real>(a: &[Cx<T>], b: &[Cx<T>]) -> Cx<T> {
    a.iter()
        .zip(b)
        .fold(Cx::new(T::zero(), T::zero()), |acc, (x, y)| acc + x * y)
}

/// `Re(a^H b)`, the real inner product of two complex vectors.
pub fn real_inner<T: Real>(a: &[Cx<T>], b: &[Cx<T>]) -> T {
    a.iter().zip(b).map(|(x, y)| x.re * y.re + x.im * y.im).sum()
}

pub fn all_finite<T: Real>(v: &[Cx<T>]) -> bool {
    v.iter().all(|c| c.re.is_finite() && c.im.is_finite())
}

//! Scalar backends.
//!
//! Everything numeric in the crate is generic over [`Scalar`]. Exact
//! rationals implement only [`Scalar`]; floating types also implement
//! [`Real`], which adds square roots and the handful of transcendental
//! functions needed by quadrature.

mod mp;

pub use mp::{precision, set_precision, Mp, PrecisionGuard};

use std::fmt;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive, Zero};

/// A field element usable by the polynomial, series and linear-algebra layers.
pub trait Scalar:
    Clone + fmt::Debug + fmt::Display + PartialOrd + Num + Neg<Output = Self> + Send + Sync + 'static
{
    /// True for backends with exact arithmetic; zero tests are then exact.
    const EXACT: bool;

    fn from_i64(v: i64) -> Self;
    fn from_rational(r: &BigRational) -> Self;
    fn to_f64(&self) -> f64;
    fn to_mp(&self) -> Mp;
    /// Nearest backend value (exact for rationals).
    fn from_f64(v: f64) -> Self;
    /// Relative rounding error of one operation; zero for exact backends.
    fn unit_roundoff() -> f64;

    /// Square root if it exists in the backend (always for floats, for
    /// perfect squares in the rational field).
    fn try_sqrt(&self) -> Option<Self>;

    /// Relative threshold under which singular values and series
    /// coefficients count as zero. Zero for exact backends.
    fn vanishing_threshold() -> f64;

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }

    fn is_neg(&self) -> bool {
        *self < Self::zero()
    }

    fn max_of(a: Self, b: Self) -> Self {
        if a < b {
            b
        } else {
            a
        }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }
}

/// Floating scalar with square roots and trigonometry.
pub trait Real: Scalar {
    fn sqrt(&self) -> Self;
    fn pi() -> Self;
    fn cos(&self) -> Self;
    fn sin(&self) -> Self;
    /// Unit roundoff of the backend at its current precision.
    fn epsilon() -> Self;
    fn from_mp(x: &Mp) -> Self;
    /// `10^e`, exact enough for thresholds.
    fn pow10(e: i32) -> Self {
        let ten = Self::from_i64(10);
        let mut r = Self::one();
        for _ in 0..e.unsigned_abs() {
            r = r * ten.clone();
        }
        if e < 0 {
            Self::one() / r
        } else {
            r
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_rational(r: &BigRational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn to_mp(&self) -> Mp {
        Mp::from_f64(*self)
    }
    fn from_f64(v: f64) -> Self {
        v
    }
    fn unit_roundoff() -> f64 {
        f64::EPSILON
    }
    fn try_sqrt(&self) -> Option<Self> {
        if *self < 0.0 {
            None
        } else {
            Some(f64::sqrt(*self))
        }
    }
    fn vanishing_threshold() -> f64 {
        1e-10
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
}

impl Real for f64 {
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn epsilon() -> Self {
        f64::EPSILON
    }
    fn from_mp(x: &Mp) -> Self {
        x.to_f64()
    }
    fn pow10(e: i32) -> Self {
        10f64.powi(e)
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn to_mp(&self) -> Mp {
        Mp::from_rational(self)
    }
    fn from_f64(v: f64) -> Self {
        BigRational::from_float(v).unwrap_or_else(BigRational::zero)
    }
    fn unit_roundoff() -> f64 {
        0.0
    }
    fn try_sqrt(&self) -> Option<Self> {
        if Signed::is_negative(self) {
            return None;
        }
        let n = self.numer().sqrt();
        let d = self.denom().sqrt();
        if &(&n * &n) == self.numer() && &(&d * &d) == self.denom() {
            Some(BigRational::new(n, d))
        } else {
            None
        }
    }
    fn vanishing_threshold() -> f64 {
        0.0
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
}

/// True when `x` is zero relative to `scale` under the backend's notion of
/// vanishing (`rel` is ignored for exact backends).
pub fn negligible<T: Scalar>(x: &T, scale: &T, rel: f64) -> bool {
    if T::EXACT {
        x.is_zero()
    } else {
        x.abs().to_f64() <= scale.abs().to_f64() * rel
    }
}

/// Convert between backends through the high-precision float.
pub fn convert<S: Scalar, T: Real>(x: &S) -> T {
    T::from_mp(&x.to_mp())
}

/// Small helpers shared by all real backends.
pub trait RealExt: Real {
    fn signum_i(&self) -> i32 {
        if *self > Self::zero() {
            1
        } else if *self < Self::zero() {
            -1
        } else {
            0
        }
    }

    fn two() -> Self {
        Self::one() + Self::one()
    }

    fn half() -> Self {
        Self::one() / Self::two()
    }
}

impl<T: Real> RealExt for T {}

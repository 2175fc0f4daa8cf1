//! Scalar abstraction shared by every module.

use nalgebra::{Complex, RealField};
use num_traits::{FromPrimitive, ToPrimitive};

/// Real scalar the numerics are generic over. Implemented for `f32` and `f64`.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + std::fmt::Debug + Send + Sync + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable")
}

/// Lossy conversion to `f64` for reporting.
#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[inline]
pub fn cplx<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

/// |z| without requiring `num_traits::Float` on `T`.
#[inline]
pub fn cabs<T: Real>(z: Complex<T>) -> T {
    nalgebra::ComplexField::modulus(z)
}

#[inline]
pub fn creal<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

/// A real value extended with the two infinities. Rates use `PosInf`, D_max can be `NegInf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extended<T> {
    Finite(T),
    PosInf,
    NegInf,
}

impl<T: Real> Extended<T> {
    pub fn finite(self) -> Option<T> {
        match self {
            Extended::Finite(x) => Some(x),
            _ => None,
        }
    }

    pub fn is_pos_inf(&self) -> bool {
        matches!(self, Extended::PosInf)
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Extended::Finite(x) => to_f64(x),
            Extended::PosInf => f64::INFINITY,
            Extended::NegInf => f64::NEG_INFINITY,
        }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == f64::INFINITY {
            Extended::PosInf
        } else if x == f64::NEG_INFINITY {
            Extended::NegInf
        } else {
            Extended::Finite(lit(x))
        }
    }

    /// Total-order minimum (NegInf < finite < PosInf).
    pub fn min(self, other: Self) -> Self {
        if self.to_f64() <= other.to_f64() {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self.to_f64() >= other.to_f64() {
            self
        } else {
            other
        }
    }

    /// 1/x with 1/0 = +inf and 1/inf = 0 (defined for nonnegative values).
    pub fn recip(self) -> Self {
        match self {
            Extended::Finite(x) if x == T::zero() => Extended::PosInf,
            Extended::Finite(x) => Extended::Finite(T::one() / x),
            Extended::PosInf => Extended::Finite(T::zero()),
            Extended::NegInf => Extended::Finite(T::zero()),
        }
    }

    /// −log₂ of a nonnegative value: 0 ↦ +inf, +inf ↦ −inf.
    pub fn neg_log2(self) -> Self {
        match self {
            Extended::Finite(x) if x <= T::zero() => Extended::PosInf,
            Extended::Finite(x) => Extended::Finite(-x.log2()),
            Extended::PosInf => Extended::NegInf,
            Extended::NegInf => Extended::PosInf,
        }
    }

    /// 2^{−x}: +inf ↦ 0, −inf ↦ +inf.
    pub fn exp2_neg(self) -> Self {
        match self {
            Extended::Finite(x) => Extended::Finite(lit::<T>(2.0).powf(-x)),
            Extended::PosInf => Extended::Finite(T::zero()),
            Extended::NegInf => Extended::PosInf,
        }
    }
}

impl<T: Real> std::fmt::Display for Extended<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Extended::Finite(x) => write!(f, "{}", to_f64(*x)),
            Extended::PosInf => write!(f, "inf"),
            Extended::NegInf => write!(f, "-inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extended_log_round_trip() {
        let r = Extended::Finite(0.25_f64);
        assert_eq!(r.neg_log2(), Extended::Finite(2.0));
        assert_eq!(r.neg_log2().exp2_neg(), r);
        assert_eq!(Extended::<f64>::PosInf.neg_log2(), Extended::NegInf);
        assert_eq!(Extended::Finite(0.0_f64).neg_log2(), Extended::PosInf);
        assert_eq!(Extended::<f64>::NegInf.exp2_neg(), Extended::PosInf);
    }

    #[test]
    fn extended_ordering() {
        let a = Extended::Finite(1.0_f64);
        assert_eq!(a.min(Extended::PosInf), a);
        assert_eq!(a.max(Extended::PosInf), Extended::PosInf);
        assert_eq!(Extended::Finite(0.0_f64).recip(), Extended::PosInf);
    }
}

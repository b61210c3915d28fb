//! Numeric abstractions shared by the analysis code.
//!
//! `Scalar` covers every type the exact walk and flow routines accept,
//! including `BigRational` for hand-checkable oracles. `Real` adds the
//! transcendental functions needed by bounds, spectra and link
//! probabilities.

use num_traits::{Float, FromPrimitive, Num, Signed, ToPrimitive};
use std::fmt::Debug;

pub trait Scalar:
    Num + Signed + PartialOrd + Clone + Debug + FromPrimitive + Send + Sync + 'static
{
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    fn from_real(x: f64) -> Self {
        Self::from_f64(x).expect("finite value representable in scalar type")
    }

    fn half() -> Self {
        Self::one() / (Self::one() + Self::one())
    }

    fn ratio(num: usize, den: usize) -> Self {
        Self::from_count(num) / Self::from_count(den)
    }
}

impl<T> Scalar for T where
    T: Num + Signed + PartialOrd + Clone + Debug + FromPrimitive + Send + Sync + 'static
{
}

pub trait Real: Scalar + Float + ToPrimitive + Copy {
    fn c(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("finite constant")
    }

    fn abs_f(self) -> Self {
        Float::abs(self)
    }

    fn to_f64_lossy(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl<T> Real for T where T: Scalar + Float + ToPrimitive + Copy {}

/// Lossy conversion used for reporting exact results.
pub fn to_f64<T: Scalar + ToPrimitive>(x: &T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Sum with Kahan compensation. Exact types pass through unchanged since the
/// compensation term is identically zero for them.
pub fn compensated_sum<T: Scalar, I: IntoIterator<Item = T>>(items: I) -> T {
    let mut sum = T::zero();
    let mut comp = T::zero();
    for x in items {
        let y = x - comp.clone();
        let t = sum.clone() + y.clone();
        comp = (t.clone() - sum) - y;
        sum = t;
    }
    sum
}

use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_traits::{Float, FloatConst, FromPrimitive, Num, ToPrimitive};

/// Field-like scalar: `f32`, `f64` or an exact rational.
pub trait Scalar:
    Copy
    + Num
    + Neg<Output = Self>
    + PartialOrd
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("integer not representable in scalar type")
    }

    fn of_f64(x: f64) -> Self {
        Self::from_f64(x).expect("value not representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn magnitude(self) -> Self {
        if self < Self::zero() {
            -self
        } else {
            self
        }
    }

    fn two() -> Self {
        Self::one() + Self::one()
    }

    fn square(self) -> Self {
        self * self
    }

    fn larger(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl<T> Scalar for T where
    T: Copy
        + Num
        + Neg<Output = T>
        + PartialOrd
        + FromPrimitive
        + ToPrimitive
        + Debug
        + Display
        + Send
        + Sync
        + 'static
{
}

/// Floating-point scalar with transcendental functions.
pub trait Real: Scalar + Float + FloatConst {}

impl<T: Scalar + Float + FloatConst> Real for T {}

/// Neumaier-compensated sum.
pub fn compensated_sum<T: Scalar, I: IntoIterator<Item = T>>(items: I) -> T {
    let mut sum = T::zero();
    let mut carry = T::zero();
    for x in items {
        let t = sum + x;
        if sum.magnitude() >= x.magnitude() {
            carry = carry + ((sum - t) + x);
        } else {
            carry = carry + ((x - t) + sum);
        }
        sum = t;
    }
    sum + carry
}

/// Plain summation below `COMPENSATION_THRESHOLD` terms, compensated above.
pub(crate) fn accumulate<T: Scalar>(items: &[T]) -> T {
    if items.len() >= COMPENSATION_THRESHOLD {
        compensated_sum(items.iter().copied())
    } else {
        items.iter().fold(T::zero(), |acc, &x| acc + x)
    }
}

pub(crate) const COMPENSATION_THRESHOLD: usize = 10_000;

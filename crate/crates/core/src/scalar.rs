//! Scalar abstraction shared by the assignment solvers, the transportation
//! solver and the ranking metrics.

use std::fmt::{Debug, Display};

use num_traits::{Bounded, Num, NumCast, Signed, ToPrimitive};

/// A totally-ordered-enough numeric type usable as an assignment cost.
///
/// Implemented for `f32`, `f64` and `i64`. Integer costs make the LAP
/// solvers exact, which the tests lean on.
pub trait Scalar:
    Num + NumCast + ToPrimitive + Signed + Bounded + PartialOrd + Copy + Debug + Display + Send + Sync + 'static
{
    /// A value large enough to act as "infinity" inside solver loops while
    /// staying safely away from overflow when a few of them are summed.
    fn solver_infinity() -> Self;

    fn is_finite_value(self) -> bool;

    fn from_usize(n: usize) -> Self {
        <Self as NumCast>::from(n).expect("usize fits in scalar")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl Scalar for f64 {
    fn solver_infinity() -> Self {
        f64::INFINITY
    }
    fn is_finite_value(self) -> bool {
        self.is_finite()
    }
}

impl Scalar for f32 {
    fn solver_infinity() -> Self {
        f32::INFINITY
    }
    fn is_finite_value(self) -> bool {
        self.is_finite()
    }
}

impl Scalar for i64 {
    fn solver_infinity() -> Self {
        i64::MAX / 4
    }
    fn is_finite_value(self) -> bool {
        self < i64::MAX / 4 && self > i64::MIN / 4
    }
}

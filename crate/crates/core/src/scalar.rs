//! Scalar abstraction shared by the real-valued formulas.
//!
//! The analytic helpers (the monotonicity witnesses, the inequality sides)
//! are written once over [`Real`] and instantiated with `f64` for quick
//! estimates and with [`Ball`] for certified answers.

use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::enclosure::Ball;
use crate::error::EnclosureError;

pub trait Real:
    Clone + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    /// Integer constant in the same arithmetic context as `self`.
    fn int_like(&self, v: i64) -> Self;

    fn ratio_like(&self, num: i64, den: i64) -> Self;

    fn try_div(&self, rhs: &Self) -> Result<Self, EnclosureError>;

    /// `self^(num/den)` for positive `self`; `num` may be negative.
    fn pow_ratio(&self, num: i64, den: u32) -> Result<Self, EnclosureError>;
}

impl Real for f64 {
    fn int_like(&self, v: i64) -> f64 {
        v as f64
    }

    fn ratio_like(&self, num: i64, den: i64) -> f64 {
        num as f64 / den as f64
    }

    fn try_div(&self, rhs: &f64) -> Result<f64, EnclosureError> {
        Ok(self / rhs)
    }

    fn pow_ratio(&self, num: i64, den: u32) -> Result<f64, EnclosureError> {
        Ok(self.powf(num as f64 / f64::from(den)))
    }
}

impl Real for Ball {
    fn int_like(&self, v: i64) -> Ball {
        Ball::from_int(v, self.prec())
    }

    fn ratio_like(&self, num: i64, den: i64) -> Ball {
        Ball::from_ratio(num, den, self.prec())
    }

    fn try_div(&self, rhs: &Ball) -> Result<Ball, EnclosureError> {
        self.div_ball(rhs)
    }

    fn pow_ratio(&self, num: i64, den: u32) -> Result<Ball, EnclosureError> {
        match num {
            0 => Ok(self.int_like(1)),
            n if n > 0 => self.pow_rational(n as u32, den),
            n => self.pow_neg_rational(n.unsigned_abs() as u32, den),
        }
    }
}

/// Coefficient ring for exact polynomial arithmetic.
pub trait Coefficient:
    Clone + PartialEq + Zero + One + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
}

impl<T> Coefficient for T where
    T: Clone + PartialEq + Zero + One + Add<Output = T> + Sub<Output = T> + Mul<Output = T> + Neg<Output = T>
{
}

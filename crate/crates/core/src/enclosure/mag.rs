use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

use super::Dyadic;

const MAG_BITS: u32 = 32;

/// Nonnegative upper bound `man * 2^exp` with a short mantissa.
///
/// Every operation rounds away from zero (or toward zero for `*_down`
/// helpers), so a `Mag` produced from a bound is again a bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Mag {
    man: u64,
    exp: i64,
}

impl Mag {
    pub const ZERO: Mag = Mag { man: 0, exp: 0 };

    fn normalized_up(man: u128, exp: i64) -> Mag {
        if man == 0 {
            return Mag::ZERO;
        }
        let bits = 128 - man.leading_zeros();
        if bits <= MAG_BITS {
            return Mag { man: man as u64, exp };
        }
        let shift = bits - MAG_BITS;
        let mut m = man >> shift;
        if m << shift != man {
            m += 1;
        }
        // the increment can carry into an extra bit; that is still a valid bound
        Mag { man: m as u64, exp: exp + i64::from(shift) }
    }

    fn normalized_down(man: u128, exp: i64) -> Mag {
        if man == 0 {
            return Mag::ZERO;
        }
        let bits = 128 - man.leading_zeros();
        if bits <= MAG_BITS {
            return Mag { man: man as u64, exp };
        }
        let shift = bits - MAG_BITS;
        Mag { man: (man >> shift) as u64, exp: exp + i64::from(shift) }
    }

    pub fn is_zero(&self) -> bool {
        self.man == 0
    }

    /// `2^e`.
    pub fn pow2(e: i64) -> Mag {
        Mag { man: 1, exp: e }
    }

    /// Upper bound for `|d|`.
    pub fn from_dyadic_up(d: &Dyadic) -> Mag {
        let m = d.mantissa().abs();
        let bits = m.bits();
        if bits <= u64::from(MAG_BITS) {
            return Mag { man: m.to_u64().unwrap_or(0), exp: d.exponent() };
        }
        let shift = bits - u64::from(MAG_BITS);
        let top = (&m >> shift).to_u64().expect("short mantissa") + 1;
        Mag::normalized_up(u128::from(top), d.exponent() + shift as i64)
    }

    /// Lower bound for `|d|`.
    pub fn from_dyadic_down(d: &Dyadic) -> Mag {
        let m = d.mantissa().abs();
        let bits = m.bits();
        if bits <= u64::from(MAG_BITS) {
            return Mag { man: m.to_u64().unwrap_or(0), exp: d.exponent() };
        }
        let shift = bits - u64::from(MAG_BITS);
        let top = (&m >> shift).to_u64().expect("short mantissa");
        Mag { man: top, exp: d.exponent() + shift as i64 }
    }

    pub fn from_f64_up(v: f64) -> Option<Mag> {
        Dyadic::from_f64(v.abs()).map(|d| Mag::from_dyadic_up(&d))
    }

    pub fn to_dyadic(self) -> Dyadic {
        Dyadic::new(BigInt::from(self.man), self.exp)
    }

    pub fn to_f64(self) -> f64 {
        self.to_dyadic().to_f64()
    }

    pub fn add(self, other: Mag) -> Mag {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let (hi, lo) = if self.exp >= other.exp { (self, other) } else { (other, self) };
        let d = hi.exp - lo.exp;
        if d >= 64 {
            // lo is below one unit in the last place of hi (shifted by 32 bits)
            return Mag::normalized_up((u128::from(hi.man) << 32) + 1, hi.exp - 32);
        }
        let sum = (u128::from(hi.man) << d) + u128::from(lo.man);
        Mag::normalized_up(sum, lo.exp)
    }

    pub fn mul(self, other: Mag) -> Mag {
        if self.is_zero() || other.is_zero() {
            return Mag::ZERO;
        }
        Mag::normalized_up(u128::from(self.man) * u128::from(other.man), self.exp + other.exp)
    }

    pub fn mul_down(self, other: Mag) -> Mag {
        Mag::normalized_down(u128::from(self.man) * u128::from(other.man), self.exp + other.exp)
    }

    /// Upper bound for `self / den`, `den` nonzero.
    pub fn div(self, den: Mag) -> Mag {
        assert!(!den.is_zero(), "magnitude division by zero");
        if self.is_zero() {
            return Mag::ZERO;
        }
        let num = u128::from(self.man) << 64;
        let d = u128::from(den.man);
        let q = num.div_ceil(d);
        Mag::normalized_up(q, self.exp - 64 - den.exp)
    }

    pub fn mul_pow2(self, k: i64) -> Mag {
        Mag { man: self.man, exp: self.exp + k }
    }

    pub fn max(self, other: Mag) -> Mag {
        if self.to_dyadic() >= other.to_dyadic() {
            self
        } else {
            other
        }
    }

    /// Exponent `e` with `self < 2^e`.
    pub fn ceil_log2(self) -> i64 {
        if self.is_zero() {
            return i64::MIN / 4;
        }
        self.exp + i64::from(64 - self.man.leading_zeros())
    }
}

impl PartialOrd for Mag {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.to_dyadic().cmp(&other.to_dyadic()))
    }
}

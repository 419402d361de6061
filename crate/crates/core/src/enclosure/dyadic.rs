use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact binary rational `mantissa * 2^exponent`.
#[derive(Clone, Debug, Default)]
pub struct Dyadic {
    man: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn new(man: BigInt, exp: i64) -> Self {
        Dyadic { man, exp }
    }

    pub fn zero() -> Self {
        Dyadic::default()
    }

    pub fn from_int(v: impl Into<BigInt>) -> Self {
        Dyadic { man: v.into(), exp: 0 }
    }

    /// Exact conversion; every finite double is dyadic.
    pub fn from_f64(v: f64) -> Option<Self> {
        if !v.is_finite() {
            return None;
        }
        if v == 0.0 {
            return Some(Dyadic::zero());
        }
        let bits = v.to_bits();
        let sign = if bits >> 63 == 0 { 1i64 } else { -1 };
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if raw_exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), raw_exp - 1075)
        };
        Some(Dyadic::new(BigInt::from(m) * sign, e))
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.man
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.man.is_zero()
    }

    pub fn sign(&self) -> Sign {
        self.man.sign()
    }

    pub fn is_positive(&self) -> bool {
        self.man.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.man.is_negative()
    }

    /// Number of significant bits of the mantissa.
    pub fn bits(&self) -> u64 {
        self.man.bits()
    }

    /// Position of the leading bit: `|self|` lies in `[2^(m-1), 2^m)` for `m = magnitude_exp()`.
    pub fn magnitude_exp(&self) -> i64 {
        self.exp + self.man.bits() as i64
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic::new(self.man.abs(), self.exp)
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic::new(-&self.man, self.exp)
    }

    pub fn mul_pow2(&self, k: i64) -> Dyadic {
        Dyadic::new(self.man.clone(), self.exp + k)
    }

    fn aligned(a: &Dyadic, b: &Dyadic) -> (BigInt, BigInt, i64) {
        match a.exp.cmp(&b.exp) {
            Ordering::Equal => (a.man.clone(), b.man.clone(), a.exp),
            Ordering::Greater => (&a.man << (a.exp - b.exp) as u64, b.man.clone(), b.exp),
            Ordering::Less => (a.man.clone(), &b.man << (b.exp - a.exp) as u64, a.exp),
        }
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let (a, b, e) = Dyadic::aligned(self, other);
        Dyadic::new(a + b, e)
    }

    pub fn sub(&self, other: &Dyadic) -> Dyadic {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Dyadic) -> Dyadic {
        Dyadic::new(&self.man * &other.man, self.exp + other.exp)
    }

    /// Largest integer not above the value.
    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.man << self.exp as u64
        } else {
            // BigInt right shift rounds toward negative infinity
            &self.man >> (-self.exp) as u64
        }
    }

    pub fn ceil(&self) -> BigInt {
        -(self.neg().floor())
    }

    pub fn is_integer(&self) -> bool {
        self.exp >= 0 || self.man.is_zero() || self.man.trailing_zeros().unwrap_or(0) >= (-self.exp) as u64
    }

    /// Truncate toward `-inf` so that at most `bits` significant bits remain.
    /// Returns the rounded value; the discarded part is below one unit of the
    /// new last place.
    pub fn round_floor(&self, bits: u32) -> Dyadic {
        let have = self.man.bits();
        if have <= u64::from(bits) {
            return self.clone();
        }
        let shift = have - u64::from(bits);
        Dyadic::new(&self.man >> shift, self.exp + shift as i64)
    }

    pub fn round_ceil(&self, bits: u32) -> Dyadic {
        self.neg().round_floor(bits).neg()
    }

    /// Exact quotient rounded toward zero to roughly `bits` significant bits.
    /// Returns the quotient and the exponent of its last place (the error is
    /// strictly below `2^ulp_exp`).
    pub fn div_trunc(&self, other: &Dyadic, bits: u32) -> (Dyadic, i64) {
        assert!(!other.is_zero(), "dyadic division by zero");
        let shift = (i64::from(bits) + other.man.bits() as i64 - self.man.bits() as i64 + 1).max(0);
        let num = &self.man << shift as u64;
        let q = num / &other.man;
        let exp = self.exp - shift - other.exp;
        (Dyadic::new(q, exp), exp)
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.man << self.exp as u64)
        } else {
            BigRational::new(self.man.clone(), BigInt::one() << (-self.exp) as u64)
        }
    }

    /// `floor(r * 2^exp)` as a dyadic with the given exponent.
    pub fn from_rational_floor(r: &BigRational, exp: i64) -> Dyadic {
        let (num, den) = if exp >= 0 {
            (r.numer().clone(), r.denom() << exp as u64)
        } else {
            (r.numer() << (-exp) as u64, r.denom().clone())
        };
        Dyadic::new(num.div_floor(&den), exp)
    }

    pub fn to_f64(&self) -> f64 {
        if self.man.is_zero() {
            return 0.0;
        }
        let bits = self.man.bits() as i64;
        let drop = (bits - 64).max(0);
        let top = (&self.man >> drop as u64).to_f64().unwrap_or(0.0);
        let e = (self.exp + drop).clamp(-2200, 2200) as i32;
        // two steps so that neither factor over- or underflows on its own
        top * 2f64.powi(e / 2) * 2f64.powi(e - e / 2)
    }
}

impl PartialEq for Dyadic {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Dyadic {}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.man.sign(), other.man.sign());
        if sa != sb || sa == Sign::NoSign {
            return sa.cmp(&sb);
        }
        // same nonzero sign: compare magnitudes by leading-bit position first
        let (ma, mb) = (self.magnitude_exp(), other.magnitude_exp());
        if ma != mb {
            let by_mag = ma.cmp(&mb);
            return if sa == Sign::Plus { by_mag } else { by_mag.reverse() };
        }
        let (a, b, _) = Dyadic::aligned(self, other);
        a.cmp(&b)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.to_f64())
    }
}

impl From<i64> for Dyadic {
    fn from(v: i64) -> Self {
        Dyadic::from_int(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(m: i64, e: i64) -> Dyadic {
        Dyadic::new(BigInt::from(m), e)
    }

    #[test]
    fn floor_and_ceil() {
        assert_eq!(d(7, -1).floor(), BigInt::from(3));
        assert_eq!(d(-7, -1).floor(), BigInt::from(-4));
        assert_eq!(d(-7, -1).ceil(), BigInt::from(-3));
        assert_eq!(d(3, 2).floor(), BigInt::from(12));
        assert!(d(8, -3).is_integer());
        assert!(!d(9, -3).is_integer());
    }

    #[test]
    fn ordering_across_exponents() {
        assert!(d(1, 0) < d(3, -1));
        assert!(d(-1, 0) > d(-3, -1));
        assert_eq!(d(4, -2), d(1, 0));
        assert!(d(0, 5) < d(1, -100));
        assert!(d(-1, -100) < d(0, 0));
    }

    #[test]
    fn f64_roundtrip() {
        for v in [0.5, -3.25, 1e-300, 6.02e23, f64::MIN_POSITIVE / 8.0] {
            assert_eq!(Dyadic::from_f64(v).unwrap().to_f64(), v);
        }
        assert!(Dyadic::from_f64(f64::NAN).is_none());
    }

    #[test]
    fn division_error_below_last_place() {
        let one = d(1, 0);
        let three = d(3, 0);
        let (q, ulp) = one.div_trunc(&three, 60);
        let exact = BigRational::new(BigInt::from(1), BigInt::from(3));
        let err = exact - q.to_rational();
        assert!(err >= BigRational::zero());
        assert!(err < Dyadic::new(BigInt::one(), ulp).to_rational());
        assert!(q.bits() >= 60);
    }

    #[test]
    fn rounding_directions() {
        let v = d(0b1011_0111, 0);
        assert_eq!(v.round_floor(4), d(0b1011, 4));
        assert_eq!(v.round_ceil(4), d(0b1100, 4));
        assert_eq!(v.neg().round_floor(4), d(-0b1100, 4));
    }
}

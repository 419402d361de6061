//! Exact integer and rational primitives: integer p-th roots, perfect-power
//! membership of open rational intervals, and the two gap families whose
//! emptiness the floor identity reduces to.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use crate::error::ArgumentError;

/// Unbounded nonnegative integer.
pub type NonnegInt = BigUint;

/// Reduced fraction with positive denominator.
pub type ExactRational = BigRational;

/// Largest `r` with `r^p <= n`.
///
/// Integer Newton iteration seeded from the bit length and leading bits of
/// `n`; the seed is never below the root, so the iterates decrease
/// monotonically until they stop.
pub fn floor_root(n: &BigUint, p: u32) -> BigUint {
    assert!(p >= 1, "root index must be positive");
    if n.is_zero() || p == 1 {
        return n.clone();
    }
    let bits = n.bits();
    if bits <= u64::from(p) {
        // 1 <= n < 2^p
        return BigUint::one();
    }
    if let Some(small) = n.to_u64() {
        return BigUint::from(floor_root_u64(small, p));
    }

    let p_big = BigUint::from(p);
    let p_minus_one = BigUint::from(p - 1);
    // Seed from the leading bits: with k a multiple of p, (n >> k) < (r0+1)^p
    // gives n < ((r0+1) << k/p)^p, so the seed is never below the root.
    let excess = bits - 64;
    let k = excess.div_ceil(u64::from(p)) * u64::from(p);
    let r0 = floor_root_u64((n >> k).to_u64().expect("at most 64 bits"), p);
    let mut x = BigUint::from(r0 + 1) << (k / u64::from(p));
    loop {
        let next = (&p_minus_one * &x + n / Pow::pow(&x, p - 1)) / &p_big;
        if next >= x {
            return x;
        }
        x = next;
    }
}

fn floor_root_u64(n: u64, p: u32) -> u64 {
    // Float estimate, then correct by at most a couple of steps in exact arithmetic.
    let mut r = (n as f64).powf(1.0 / f64::from(p)).round() as u64;
    let pow_le = |r: u64| -> bool {
        match r.checked_pow(p) {
            Some(v) => v <= n,
            None => false,
        }
    };
    while r > 0 && !pow_le(r) {
        r -= 1;
    }
    while pow_le(r + 1) {
        r += 1;
    }
    r
}

/// `true` iff `n` is the p-th power of a nonnegative integer.
pub fn is_perfect_power(n: &BigUint, p: u32) -> bool {
    Pow::pow(&floor_root(n, p), p) == *n
}

/// Compares `a^p` against a rational without leaving exact arithmetic.
pub fn cmp_power_rational(a: &BigUint, p: u32, r: &BigRational) -> Ordering {
    let lhs = BigInt::from_biguint(Sign::Plus, Pow::pow(a, p)) * r.denom();
    lhs.cmp(r.numer())
}

/// Floor of a rational as an integer.
pub fn rational_floor(r: &BigRational) -> BigInt {
    r.numer().div_floor(r.denom())
}

/// Open interval `(lo, hi)` in the p-th power domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapSpec {
    lo: BigRational,
    hi: BigRational,
    p: u32,
}

impl GapSpec {
    pub fn new(lo: BigRational, hi: BigRational, p: u32) -> Result<Self, ArgumentError> {
        if p < 2 {
            return Err(ArgumentError::new(format!("root index p = {p} must be at least 2")));
        }
        if lo >= hi {
            return Err(ArgumentError::new(format!("empty gap: lo = {lo} is not below hi = {hi}")));
        }
        Ok(GapSpec { lo, hi, p })
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    /// Whether `v` lies strictly inside the gap.
    pub fn contains(&self, v: &BigRational) -> bool {
        &self.lo < v && v < &self.hi
    }
}

impl fmt::Display for GapSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}) ^ 1/{}", self.lo, self.hi, self.p)
    }
}

/// All nonnegative integers `a` with `lo < a^p < hi`, ascending.
///
/// The smallest candidate comes from one `floor_root` call; from there the
/// range is walked upward with exact comparisons, so arbitrarily wide gaps
/// are handled correctly.
pub fn pth_powers_in_open_interval(gap: &GapSpec) -> Vec<NonnegInt> {
    let p = gap.p;
    if !gap.hi.is_positive() {
        return Vec::new();
    }
    let mut a = if gap.lo.is_negative() {
        BigUint::zero()
    } else {
        let lo_floor = rational_floor(&gap.lo)
            .to_biguint()
            .expect("nonnegative floor");
        floor_root(&lo_floor, p) + 1u32
    };
    let mut out = Vec::new();
    loop {
        if cmp_power_rational(&a, p, &gap.hi) != Ordering::Less {
            break;
        }
        if cmp_power_rational(&a, p, &gap.lo) == Ordering::Greater {
            out.push(a.clone());
        }
        a += 1u32;
    }
    out
}

fn pow2(e: u32) -> BigInt {
    BigInt::one() << e
}

fn check_np(n: u64, p: u32) -> Result<(), ArgumentError> {
    if n == 0 {
        return Err(ArgumentError::new("n must be a positive integer"));
    }
    if p < 2 {
        return Err(ArgumentError::new(format!("root index p = {p} must be at least 2")));
    }
    Ok(())
}

/// p-th power image of `(2(n - 1/2)^{1/p}, 2(n - 1/2 + 2^{-p-1})^{1/p})`:
/// the interval `(2^p n - 2^{p-1}, 2^p n - 2^{p-1} + 1/2)`.
pub fn gap_q1(n: u64, p: u32) -> Result<GapSpec, ArgumentError> {
    check_np(n, p)?;
    let lo = pow2(p) * BigInt::from(n) - pow2(p - 1);
    let hi = BigRational::from_integer(lo.clone()) + BigRational::new(BigInt::one(), BigInt::from(2));
    GapSpec::new(BigRational::from_integer(lo), hi, p)
}

/// p-th power image of `(2(n^2 - n + 1/4)^{1/p}, 2(n^2 - n + 3/4)^{1/p})`:
/// the interval `(2^p (n^2 - n) + 2^{p-2}, 2^p (n^2 - n) + 3 * 2^{p-2})`.
pub fn gap_q2(n: u64, p: u32) -> Result<GapSpec, ArgumentError> {
    check_np(n, p)?;
    if p % 2 == 0 || p < 3 {
        return Err(ArgumentError::new(format!("gap_q2 needs an odd p >= 3, got {p}")));
    }
    let n = BigInt::from(n);
    let base = pow2(p) * (&n * &n - &n);
    let lo = &base + pow2(p - 2);
    let hi = &base + BigInt::from(3) * pow2(p - 2);
    GapSpec::new(BigRational::from_integer(lo), BigRational::from_integer(hi), p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn int(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn floor_root_examples() {
        assert_eq!(floor_root(&BigUint::from(32u32), 5), BigUint::from(2u32));
        assert_eq!(floor_root(&BigUint::from(31u32), 5), BigUint::from(1u32));
        assert_eq!(floor_root(&BigUint::from(3184u32), 5), BigUint::from(5u32));
        assert_eq!(floor_root(&BigUint::zero(), 7), BigUint::zero());
    }

    #[test]
    fn floor_root_exhaustive_against_power_table() {
        for p in 2..=11u32 {
            // brute-force table of consecutive powers
            let mut r = 0u64;
            for n in 0..=200_000u64 {
                while (r + 1).pow(p) <= n {
                    r += 1;
                }
                assert_eq!(floor_root(&BigUint::from(n), p), BigUint::from(r), "n={n} p={p}");
            }
        }
    }

    #[test]
    fn floor_root_large_values() {
        let base = BigUint::from(3u32).pow(200u32) + 12345u32;
        for p in [2u32, 3, 5, 7, 11, 17] {
            let x = Pow::pow(&base, p);
            assert_eq!(floor_root(&x, p), base);
            assert_eq!(floor_root(&(&x - 1u32), p), &base - 1u32);
            assert_eq!(floor_root(&(&x + 1u32), p), base);
        }
    }

    #[test]
    fn open_interval_examples() {
        let g = GapSpec::new(int(3125), int(7776), 5).unwrap();
        assert!(pth_powers_in_open_interval(&g).is_empty());
        let g = GapSpec::new(int(208), int(208) + ratio(1, 2), 5).unwrap();
        assert!(pth_powers_in_open_interval(&g).is_empty());
        let g = GapSpec::new(int(8), int(24), 5).unwrap();
        assert!(pth_powers_in_open_interval(&g).is_empty());
    }

    #[test]
    fn open_interval_wide_and_negative() {
        let g = GapSpec::new(int(-5), int(100), 2).unwrap();
        let got: Vec<u32> = pth_powers_in_open_interval(&g).iter().map(|a| a.to_u32().unwrap()).collect();
        assert_eq!(got, (0..=9).collect::<Vec<_>>());
        let g = GapSpec::new(ratio(31, 2), ratio(243, 1), 5).unwrap();
        assert_eq!(pth_powers_in_open_interval(&g), vec![BigUint::from(2u32)]);
        let g = GapSpec::new(int(-10), int(0), 3).unwrap();
        assert!(pth_powers_in_open_interval(&g).is_empty());
    }

    #[test]
    fn gap_spec_rejects_bad_input() {
        assert!(GapSpec::new(int(3), int(3), 5).is_err());
        assert!(GapSpec::new(int(1), int(3), 1).is_err());
        assert!(gap_q1(0, 5).is_err());
        assert!(gap_q2(1, 4).is_err());
    }

    #[test]
    fn gap_q1_examples() {
        let g = gap_q1(1, 5).unwrap();
        assert_eq!((g.lo().clone(), g.hi().clone()), (int(16), ratio(33, 2)));
        let g = gap_q1(1, 2).unwrap();
        assert_eq!((g.lo().clone(), g.hi().clone()), (int(2), ratio(5, 2)));
        let g = gap_q1(100, 7).unwrap();
        assert_eq!((g.lo().clone(), g.hi().clone()), (int(12736), ratio(25473, 2)));
    }

    #[test]
    fn gap_q2_examples() {
        let g = gap_q2(1, 5).unwrap();
        assert_eq!((g.lo().clone(), g.hi().clone()), (int(8), int(24)));
        let g = gap_q2(2, 5).unwrap();
        assert_eq!((g.lo().clone(), g.hi().clone()), (int(72), int(88)));
        let g = gap_q2(1, 7).unwrap();
        assert_eq!((g.lo().clone(), g.hi().clone()), (int(32), int(96)));
    }

    #[test]
    fn gap_q2_width_is_half_power_of_two() {
        for p in [3u32, 5, 7, 9, 11] {
            for n in [1u64, 2, 17, 1000, 123_456] {
                assert_eq!(gap_q2(n, p).unwrap().width(), int(1 << (p - 1)));
            }
        }
    }

    proptest! {
        #[test]
        fn floor_root_brackets(n in any::<u128>(), p in 2u32..=13) {
            let big = BigUint::from(n);
            let r = floor_root(&big, p);
            prop_assert!(Pow::pow(&r, p) <= big);
            prop_assert!(Pow::pow(&(&r + 1u32), p) > big);
            prop_assert_eq!(r, big.nth_root(p));
        }

        #[test]
        fn open_interval_matches_enumeration(lo in 0u64..1_000_000, width in 1u64..200_000, p in 2u32..=7) {
            let gap = GapSpec::new(int(lo as i64), int((lo + width) as i64), p).unwrap();
            let expected: Vec<BigUint> = (0u64..)
                .take_while(|a| a.pow(p) < lo + width)
                .filter(|a| a.pow(p) > lo)
                .map(BigUint::from)
                .collect();
            prop_assert_eq!(pth_powers_in_open_interval(&gap), expected);
        }

        #[test]
        fn gap_q1_is_power_free(n in 1u64..10_000_000, p in 2u32..=13) {
            prop_assert!(pth_powers_in_open_interval(&gap_q1(n, p).unwrap()).is_empty());
        }
    }
}

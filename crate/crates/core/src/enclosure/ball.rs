use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};

use super::{Dyadic, Mag};
use crate::bigint::floor_root;
use crate::error::EnclosureError;

/// Midpoint-radius enclosure: the represented real `v` satisfies
/// `|v - mid| <= rad`.
///
/// `prec` is the working precision (in bits of midpoint mantissa) used when
/// this ball takes part in further arithmetic.
#[derive(Clone, Debug)]
pub struct Ball {
    mid: Dyadic,
    rad: Mag,
    prec: u32,
}

fn rounded(mid: Dyadic, prec: u32) -> (Dyadic, Mag) {
    if mid.bits() <= u64::from(prec) {
        return (mid, Mag::ZERO);
    }
    let r = mid.round_floor(prec);
    if r == mid {
        return (r, Mag::ZERO);
    }
    let ulp = Mag::pow2(r.exponent());
    (r, ulp)
}

impl Ball {
    pub fn new(mid: Dyadic, rad: Mag, prec: u32) -> Ball {
        let (mid, err) = rounded(mid, prec);
        Ball { mid, rad: rad.add(err), prec }
    }

    pub fn exact(mid: Dyadic, prec: u32) -> Ball {
        Ball::new(mid, Mag::ZERO, prec)
    }

    pub fn from_int(v: impl Into<BigInt>, prec: u32) -> Ball {
        Ball::exact(Dyadic::from_int(v), prec)
    }

    pub fn from_f64(v: f64, prec: u32) -> Option<Ball> {
        Dyadic::from_f64(v).map(|d| Ball::exact(d, prec))
    }

    /// Encloses `num / den`.
    pub fn from_ratio(num: i64, den: i64, prec: u32) -> Ball {
        Ball::from_rational(&BigRational::new(num.into(), den.into()), prec)
    }

    pub fn from_rational(r: &BigRational, prec: u32) -> Ball {
        let den = r.denom();
        if den.is_one() {
            return Ball::from_int(r.numer().clone(), prec);
        }
        if den.magnitude().count_ones() == 1 {
            let shift = den.trailing_zeros().unwrap_or(0) as i64;
            return Ball::exact(Dyadic::new(r.numer().clone(), -shift), prec);
        }
        let magnitude = r.numer().bits() as i64 - den.bits() as i64;
        let exp = magnitude - i64::from(prec) - 2;
        let mid = Dyadic::from_rational_floor(r, exp);
        Ball::new(mid, Mag::pow2(exp), prec)
    }

    /// Ball covering the closed interval `[lo, hi]`.
    pub fn from_interval(lo: &Dyadic, hi: &Dyadic, prec: u32) -> Ball {
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        let mid = lo.add(hi).mul_pow2(-1);
        let rad = Mag::from_dyadic_up(&hi.sub(lo).mul_pow2(-1));
        Ball::new(mid, rad, prec)
    }

    pub fn mid(&self) -> &Dyadic {
        &self.mid
    }

    pub fn rad(&self) -> Mag {
        self.rad
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn with_prec(mut self, prec: u32) -> Ball {
        self.prec = prec;
        self
    }

    pub fn mid_f64(&self) -> f64 {
        self.mid.to_f64()
    }

    pub fn radius_f64(&self) -> f64 {
        self.rad.to_f64()
    }

    pub fn lower(&self) -> Dyadic {
        self.mid.sub(&self.rad.to_dyadic())
    }

    pub fn upper(&self) -> Dyadic {
        self.mid.add(&self.rad.to_dyadic())
    }

    /// Widens the radius by `err`.
    pub fn add_error(mut self, err: Mag) -> Ball {
        self.rad = self.rad.add(err);
        self
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    pub fn contains_zero(&self) -> bool {
        !self.is_positive() && !self.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.lower().is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.upper().is_negative()
    }

    pub fn contains(&self, v: &Dyadic) -> bool {
        &self.lower() <= v && v <= &self.upper()
    }

    pub fn contains_rational(&self, v: &BigRational) -> bool {
        self.lower().to_rational() <= *v && *v <= self.upper().to_rational()
    }

    pub fn contains_f64(&self, v: f64) -> bool {
        Dyadic::from_f64(v).is_some_and(|d| self.contains(&d))
    }

    /// Every point of `self` is strictly below every point of `other`.
    pub fn strictly_below(&self, other: &Ball) -> bool {
        self.upper() < other.lower()
    }

    pub fn overlaps(&self, other: &Ball) -> bool {
        !(self.strictly_below(other) || other.strictly_below(self))
    }

    pub fn intersect(&self, other: &Ball) -> Option<Ball> {
        let lo = self.lower().max(other.lower());
        let hi = self.upper().min(other.upper());
        (lo <= hi).then(|| Ball::from_interval(&lo, &hi, self.prec.max(other.prec)))
    }

    pub fn hull(&self, other: &Ball) -> Ball {
        let lo = self.lower().min(other.lower());
        let hi = self.upper().max(other.upper());
        Ball::from_interval(&lo, &hi, self.prec.max(other.prec))
    }

    /// Integer part of the enclosed value, if the ball pins it down.
    pub fn floor_if_decided(&self) -> Option<BigInt> {
        let lo = self.lower().floor();
        (lo == self.upper().floor()).then_some(lo)
    }

    pub fn neg_ball(&self) -> Ball {
        Ball { mid: self.mid.neg(), rad: self.rad, prec: self.prec }
    }

    pub fn add_ball(&self, other: &Ball) -> Ball {
        let prec = self.prec.max(other.prec);
        Ball::new(self.mid.add(&other.mid), self.rad.add(other.rad), prec)
    }

    pub fn sub_ball(&self, other: &Ball) -> Ball {
        let prec = self.prec.max(other.prec);
        Ball::new(self.mid.sub(&other.mid), self.rad.add(other.rad), prec)
    }

    pub fn mul_ball(&self, other: &Ball) -> Ball {
        let prec = self.prec.max(other.prec);
        let ma = Mag::from_dyadic_up(&self.mid);
        let mb = Mag::from_dyadic_up(&other.mid);
        let rad = ma.mul(other.rad).add(mb.mul(self.rad)).add(self.rad.mul(other.rad));
        Ball::new(self.mid.mul(&other.mid), rad, prec)
    }

    pub fn div_ball(&self, other: &Ball) -> Result<Ball, EnclosureError> {
        if other.contains_zero() {
            return Err(EnclosureError::DivisionByZeroStraddle(other.to_string()));
        }
        let prec = self.prec.max(other.prec);
        let (q, ulp_exp) = self.mid.div_trunc(&other.mid, prec);
        let ulp = if q.mul(&other.mid) == self.mid { Mag::ZERO } else { Mag::pow2(ulp_exp) };
        let rad = if self.rad.is_zero() && other.rad.is_zero() {
            ulp
        } else {
            let den_low = Mag::from_dyadic_down(&other.mid.abs().sub(&other.rad.to_dyadic()));
            let q_up = Mag::from_dyadic_up(&q).add(ulp);
            self.rad.add(q_up.mul(other.rad)).div(den_low).add(ulp)
        };
        Ok(Ball::new(q, rad, prec))
    }

    pub fn recip(&self) -> Result<Ball, EnclosureError> {
        Ball::from_int(1, self.prec).div_ball(self)
    }

    pub fn sqr(&self) -> Ball {
        self.mul_ball(self)
    }

    pub fn pow_uint(&self, k: u32) -> Ball {
        let mut result = Ball::from_int(1, self.prec);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul_ball(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.sqr();
            }
        }
        result
    }

    pub fn mul_pow2(&self, k: i64) -> Ball {
        Ball { mid: self.mid.mul_pow2(k), rad: self.rad.mul_pow2(k), prec: self.prec }
    }

    /// Encloses `x^(q/p)` for a strictly positive ball.
    ///
    /// `t -> t^(q/p)` is increasing on `t > 0`, so the endpoints map to
    /// endpoints; each is computed as an exact integer p-th root of a
    /// scaled `t^q`, rounded outward.
    pub fn pow_rational(&self, q: u32, p: u32) -> Result<Ball, EnclosureError> {
        assert!(p >= 1 && q >= 1, "exponent q/p must be positive");
        if !self.is_positive() {
            return Err(EnclosureError::NonPositiveBase(self.to_string()));
        }
        let g = q.gcd(&p);
        let (q, p) = (q / g, p / g);
        let lo = root_bound(&self.lower(), q, p, self.prec, false);
        let hi = root_bound(&self.upper(), q, p, self.prec, true);
        Ok(Ball::from_interval(&lo, &hi, self.prec))
    }

    /// Encloses `x^(-q/p)` for a strictly positive ball.
    pub fn pow_neg_rational(&self, q: u32, p: u32) -> Result<Ball, EnclosureError> {
        if !self.is_positive() {
            return Err(EnclosureError::NonPositiveBase(self.to_string()));
        }
        if self.rad.is_zero() {
            // x^(-q/p) = (1/x^q)^(1/p); root the exact reciprocal power directly
            let (lo, hi) = inv_root_bounds(&self.mid, q, p, self.prec);
            return Ok(Ball::from_interval(&lo, &hi, self.prec));
        }
        self.pow_rational(q, p)?.recip()
    }
}

/// Outward-rounded bound for `x^(q/p)`, `x > 0` exact.
fn root_bound(x: &Dyadic, q: u32, p: u32, prec: u32, up: bool) -> Dyadic {
    let m = x.mantissa().magnitude();
    let e = x.exponent();
    let log2_x = m.bits() as i64 + e;
    let scale = i64::from(prec) + 2 - Integer::div_floor(&(i64::from(q) * log2_x), &i64::from(p));
    let t = i64::from(q) * e + i64::from(p) * scale;
    let mq: BigUint = Pow::pow(m, q);
    let (radicand, exact) = if t >= 0 {
        (mq << t as u64, true)
    } else {
        let shifted = &mq >> (-t) as u64;
        let exact = (&shifted << (-t) as u64) == mq;
        (shifted, exact)
    };
    finish_root(radicand, exact, p, scale, up)
}

/// Lower and upper bounds for `x^(-q/p)`, `x > 0` exact.
fn inv_root_bounds(x: &Dyadic, q: u32, p: u32, prec: u32) -> (Dyadic, Dyadic) {
    let m = x.mantissa().magnitude();
    let e = x.exponent();
    let log2_x = m.bits() as i64 + e;
    // result is about 2^(-q log2_x / p)
    let scale = i64::from(prec) + 2 + Integer::div_ceil(&(i64::from(q) * log2_x), &i64::from(p));
    // x^-q * 2^(p*scale) = 2^(p*scale - q*e) / m^q
    let t = i64::from(p) * scale - i64::from(q) * e;
    let mq: BigUint = Pow::pow(m, q);
    let (radicand, exact) = if t >= 0 {
        let num = BigUint::one() << t as u64;
        let (quot, rem) = num.div_rem(&mq);
        (quot, rem.is_zero())
    } else {
        (BigUint::zero(), false)
    };
    let r = floor_root(&radicand, p);
    let hi = if exact && Pow::pow(&r, p) == radicand { r.clone() } else { &r + 1u32 };
    let to_dyadic = |v: BigUint| Dyadic::new(BigInt::from_biguint(Sign::Plus, v), -scale);
    (to_dyadic(r), to_dyadic(hi))
}

fn finish_root(radicand: BigUint, exact: bool, p: u32, scale: i64, up: bool) -> Dyadic {
    let r = floor_root(&radicand, p);
    let r = if up && !(exact && Pow::pow(&r, p) == radicand) { r + 1u32 } else { r };
    Dyadic::new(BigInt::from_biguint(Sign::Plus, r), -scale)
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.17e} +/- {:.3e}]", self.mid.to_f64(), self.rad.to_f64())
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $inner:ident) => {
        impl $trait<&Ball> for &Ball {
            type Output = Ball;
            fn $method(self, rhs: &Ball) -> Ball {
                self.$inner(rhs)
            }
        }
        impl $trait<Ball> for Ball {
            type Output = Ball;
            fn $method(self, rhs: Ball) -> Ball {
                self.$inner(&rhs)
            }
        }
        impl $trait<&Ball> for Ball {
            type Output = Ball;
            fn $method(self, rhs: &Ball) -> Ball {
                self.$inner(rhs)
            }
        }
        impl $trait<Ball> for &Ball {
            type Output = Ball;
            fn $method(self, rhs: Ball) -> Ball {
                self.$inner(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, add_ball);
forward_binop!(Sub, sub, sub_ball);
forward_binop!(Mul, mul, mul_ball);

impl Neg for Ball {
    type Output = Ball;
    fn neg(self) -> Ball {
        self.neg_ball()
    }
}

impl Neg for &Ball {
    type Output = Ball;
    fn neg(self) -> Ball {
        self.neg_ball()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const PREC: u32 = 64;

    fn ulp_of(v: f64, prec: u32) -> f64 {
        2f64.powi(v.abs().log2().floor() as i32 - prec as i32 + 1)
    }

    #[test]
    fn reciprocal_of_two() {
        let half = Ball::from_int(2, PREC).recip().unwrap();
        assert!(half.contains(&Dyadic::from_f64(0.5).unwrap()));
        assert!(half.radius_f64() <= ulp_of(0.5, PREC));
    }

    #[test]
    fn radii_add() {
        let a = Ball::new(Dyadic::from_int(1), Mag::from_f64_up(0.1).unwrap(), PREC);
        let b = Ball::new(Dyadic::from_int(2), Mag::from_f64_up(0.2).unwrap(), PREC);
        let s = &a + &b;
        assert!(s.contains_f64(2.7) && s.contains_f64(3.3));
        assert!(!s.contains_f64(3.31));
    }

    #[test]
    fn straddling_denominator_is_rejected() {
        let z = Ball::new(Dyadic::zero(), Mag::pow2(0), PREC);
        assert!(matches!(z.recip(), Err(EnclosureError::DivisionByZeroStraddle(_))));
        let one = Ball::from_int(1, PREC);
        assert!(matches!(one.div_ball(&z), Err(EnclosureError::DivisionByZeroStraddle(_))));
    }

    #[test]
    fn rational_powers() {
        let one = Ball::from_int(1, PREC).pow_rational(1, 5).unwrap();
        assert!(one.contains(&Dyadic::from_int(1)));
        assert!(one.radius_f64() <= ulp_of(1.0, PREC));

        let two = Ball::from_int(32, PREC).pow_rational(1, 5).unwrap();
        assert!(two.contains(&Dyadic::from_int(2)));
        assert!(two.is_exact());

        let r = Ball::from_ratio(3, 4, PREC).pow_rational(1, 5).unwrap();
        // frozen from a 40-digit reference: (3/4)^(1/5)
        assert!((r.mid_f64() - 0.944_087_511_294_901_98).abs() < 1e-16);
        assert!(r.radius_f64() < 1e-17);
        // fifth power of the enclosure must contain 3/4 again
        let back = r.pow_uint(5);
        assert!(back.contains_rational(&BigRational::new(3.into(), 4.into())));
    }

    #[test]
    fn negative_rational_powers() {
        let x = Ball::from_int(7, 128).pow_neg_rational(2, 5).unwrap();
        let via_recip = Ball::from_int(7, 128).pow_rational(2, 5).unwrap().recip().unwrap();
        assert!(x.overlaps(&via_recip));
        assert!(x.radius_f64() < 1e-36);
        let wide = Ball::new(Dyadic::from_int(7), Mag::pow2(-20), 128).pow_neg_rational(2, 5).unwrap();
        assert!(wide.overlaps(&x));
    }

    #[test]
    fn non_positive_base_is_rejected() {
        let z = Ball::new(Dyadic::from_int(1), Mag::pow2(1), PREC);
        assert!(matches!(z.pow_rational(1, 3), Err(EnclosureError::NonPositiveBase(_))));
        assert!(matches!(Ball::from_int(-4, PREC).pow_neg_rational(1, 3), Err(EnclosureError::NonPositiveBase(_))));
    }

    #[test]
    fn floor_decision() {
        let b = Ball::new(Dyadic::from_f64(2.5).unwrap(), Mag::from_f64_up(0.25).unwrap(), PREC);
        assert_eq!(b.floor_if_decided(), Some(BigInt::from(2)));
        let b = Ball::new(Dyadic::from_f64(2.9).unwrap(), Mag::from_f64_up(0.2).unwrap(), PREC);
        assert_eq!(b.floor_if_decided(), None);
        let b = Ball::new(Dyadic::from_f64(-0.5).unwrap(), Mag::from_f64_up(0.25).unwrap(), PREC);
        assert_eq!(b.floor_if_decided(), Some(BigInt::from(-1)));
    }

    #[test]
    fn hull_and_intersection() {
        let a = Ball::from_interval(&Dyadic::from_int(0), &Dyadic::from_int(2), PREC);
        let b = Ball::from_interval(&Dyadic::from_int(1), &Dyadic::from_int(5), PREC);
        let i = a.intersect(&b).unwrap();
        assert_eq!(i.lower(), Dyadic::from_int(1));
        assert_eq!(i.upper(), Dyadic::from_int(2));
        let h = a.hull(&b);
        assert_eq!(h.lower(), Dyadic::from_int(0));
        assert_eq!(h.upper(), Dyadic::from_int(5));
        let c = Ball::from_int(9, PREC);
        assert!(a.intersect(&c).is_none());
    }

    fn dyadic_strategy() -> impl Strategy<Value = f64> {
        (-1.0e6f64..1.0e6).prop_filter("nonzero", |v| v.abs() > 1e-6)
    }

    proptest! {
        #[test]
        fn exact_dyadic_ops_are_tight(a in dyadic_strategy(), b in dyadic_strategy()) {
            let (ba, bb) = (Ball::from_f64(a, PREC).unwrap(), Ball::from_f64(b, PREC).unwrap());
            let sum = &ba + &bb;
            let prod = &ba * &bb;
            let quo = ba.div_ball(&bb).unwrap();
            for (ball, exact) in [
                (&sum, Dyadic::from_f64(a).unwrap().add(&Dyadic::from_f64(b).unwrap()).to_rational()),
                (&prod, Dyadic::from_f64(a).unwrap().mul(&Dyadic::from_f64(b).unwrap()).to_rational()),
                (&quo, Dyadic::from_f64(a).unwrap().to_rational() / Dyadic::from_f64(b).unwrap().to_rational()),
            ] {
                prop_assert!(ball.contains_rational(&exact));
                let mid = ball.mid_f64().abs().max(f64::MIN_POSITIVE);
                prop_assert!(ball.radius_f64() <= 2.0 * ulp_of(mid, PREC) * 1.0001);
            }
        }

        #[test]
        fn arithmetic_contains_sampled_points(
            a in dyadic_strategy(), ra in 0.0f64..10.0, ta in -1.0f64..1.0,
            b in dyadic_strategy(), rb in 0.0f64..10.0, tb in -1.0f64..1.0,
        ) {
            let ba = Ball::new(Dyadic::from_f64(a).unwrap(), Mag::from_f64_up(ra).unwrap(), PREC);
            let bb = Ball::new(Dyadic::from_f64(b).unwrap(), Mag::from_f64_up(rb).unwrap(), PREC);
            // exact points inside each ball
            let xa = Dyadic::from_f64(a).unwrap().add(&Dyadic::from_f64(ra * ta).unwrap());
            let xb = Dyadic::from_f64(b).unwrap().add(&Dyadic::from_f64(rb * tb).unwrap());
            prop_assert!((&ba + &bb).contains(&xa.add(&xb)));
            prop_assert!((&ba - &bb).contains(&xa.sub(&xb)));
            prop_assert!((&ba * &bb).contains(&xa.mul(&xb)));
            if let Ok(q) = ba.div_ball(&bb) {
                prop_assert!(q.contains_rational(&(xa.to_rational() / xb.to_rational())));
            }
        }

        #[test]
        fn power_consistency(x in 0.01f64..1.0e4, q in 1u32..=3, p in 2u32..=9) {
            let b = Ball::from_f64(x, 96).unwrap();
            let root = b.pow_rational(q, p).unwrap();
            let composed = root.pow_uint(p);
            let direct = b.pow_rational(q * p, p).unwrap();
            prop_assert!(composed.overlaps(&direct));
            prop_assert!(composed.contains(&Dyadic::from_f64(x).unwrap().pow_exact(q)));
        }

        #[test]
        fn higher_precision_stays_consistent(x in 0.5f64..100.0, q in 1u32..=2, p in 3u32..=11) {
            let lo = Ball::from_f64(x, 48).unwrap().pow_neg_rational(q, p).unwrap();
            let hi = Ball::from_f64(x, 256).unwrap().pow_neg_rational(q, p).unwrap();
            prop_assert!(lo.overlaps(&hi));
            prop_assert!(hi.radius_f64() <= lo.radius_f64());
        }
    }

    trait PowExact {
        fn pow_exact(&self, k: u32) -> Dyadic;
    }

    impl PowExact for Dyadic {
        fn pow_exact(&self, k: u32) -> Dyadic {
            (0..k).fold(Dyadic::from_int(1), |acc, _| acc.mul(self))
        }
    }
}

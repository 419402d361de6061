//! Per-`n` decisions of the floor identity
//!
//! `[1 / T(n)] = [(-1)^(n+1) * 2 (n - 1/2)^s]`
//!
//! where `1 / T(n)` equals the scaled reciprocal
//! `(1 - 2^(1-s))^(-1) * zeta_n(s)^(-1)`, plus certified checks of the
//! two-sided bracketing bounds and range scans.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bigint::floor_root;
use crate::enclosure::{Ball, PrecisionPolicy};
use crate::error::{ArgumentError, CheckError, EnclosureError, Undecided};
use crate::tail::{RationalExponent, TailEvaluator, TailKind};

/// Default upper end of a scan.
pub const DEFAULT_N_MAX: u64 = 10_000;

/// Default target radius for reported enclosures, `2^-40`.
pub const DEFAULT_TARGET_RADIUS: f64 = 9.094_947_017_729_282e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Holds,
    Fails,
    Undecided,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Verdict::Holds => "Holds",
            Verdict::Fails => "Fails",
            Verdict::Undecided => "Undecided",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub n: u64,
    pub s: RationalExponent,
    /// `None` when the enclosure never excluded every integer.
    pub lhs_floor: Option<i64>,
    pub rhs_floor: i64,
    pub verdict: Verdict,
    pub precision_used: u32,
}

impl VerdictRecord {
    fn new(n: u64, s: RationalExponent, lhs_floor: Option<i64>, rhs_floor: i64, precision_used: u32) -> Self {
        let verdict = match lhs_floor {
            None => Verdict::Undecided,
            Some(l) if l == rhs_floor => Verdict::Holds,
            Some(_) => Verdict::Fails,
        };
        VerdictRecord { n, s, lhs_floor, rhs_floor, verdict, precision_used }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanReport {
    pub s: RationalExponent,
    pub n_max: u64,
    pub exceptions: Vec<VerdictRecord>,
    pub undecided: Vec<VerdictRecord>,
    #[serde(rename = "empirical_N")]
    pub empirical_n: u64,
    /// Every record, ordered by `n`; written as CSV rows rather than JSON.
    #[serde(skip)]
    pub records: Vec<VerdictRecord>,
}

impl ScanReport {
    fn from_records(s: RationalExponent, n_max: u64, records: Vec<VerdictRecord>) -> Self {
        let pick = |v: Verdict| records.iter().filter(|r| r.verdict == v).cloned().collect::<Vec<_>>();
        let exceptions = pick(Verdict::Fails);
        let undecided = pick(Verdict::Undecided);
        let empirical_n = exceptions.iter().chain(&undecided).map(|r| r.n + 1).max().unwrap_or(1);
        ScanReport { s, n_max, exceptions, undecided, empirical_n, records }
    }

    pub fn holds_from_empirical_n(&self) -> bool {
        self.records
            .iter()
            .filter(|r| r.n >= self.empirical_n)
            .all(|r| r.verdict == Verdict::Holds)
    }
}

/// Which bracketing statement [`Verifier::check_bounds`] tests.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundCheck {
    /// `2 (n - 1/2)^s < |1/T(n)| < 2 (n - 1/4)^s`
    Thm21,
    /// `2 (n - 1/2)^s < |1/T(n)| < 2 (n - 1/2 + eps)^s`, `eps > 0`
    Thm23 { eps: BigRational },
    /// `2 (n - 1/2)^s < |1/T(n)| < 2 (n^2 - n + 3/4)^(s/2)`
    Lem42,
}

/// `R` with `2 (n - 1/2)^(q/p) = R^(1/p)`: `2^p n - 2^(p-1)` for `q = 1`,
/// `2^p (n^2 - n) + 2^(p-2)` for `q = 2`.
pub fn rhs_radicand(n: u64, s: RationalExponent) -> BigUint {
    let p = s.p();
    let n = BigUint::from(n);
    if s.q() == 1 {
        (n << p) - (BigUint::one() << (p - 1))
    } else {
        ((&n * &n - &n) << p) + (BigUint::one() << (p - 2))
    }
}

/// `[2 (n - 1/2)^s]`, exact.
pub fn rhs_floor_positive(n: u64, s: RationalExponent) -> (i64, bool) {
    let radicand = rhs_radicand(n, s);
    let r = floor_root(&radicand, s.p());
    let exact = Pow::pow(&r, s.p()) == radicand;
    (r.to_i64().expect("root fits in i64"), exact)
}

/// `[(-1)^(n+1) * 2 (n - 1/2)^s]`, exact.
pub fn rhs_floor(n: u64, s: RationalExponent) -> i64 {
    let (r, exact) = rhs_floor_positive(n, s);
    match (n % 2 == 1, exact) {
        (true, _) => r,
        (false, true) => -r,
        (false, false) => -r - 1,
    }
}

/// Decides the identity at one `n`. An invalid `policy` yields `Undecided`.
pub fn verify_identity(n: u64, s: RationalExponent, policy: &PrecisionPolicy) -> VerdictRecord {
    Verifier::new(s, *policy).verify(n)
}

pub fn scan(s: RationalExponent, n_max: u64, policy: &PrecisionPolicy) -> Result<ScanReport, ArgumentError> {
    Verifier::new(s, *policy).scan(n_max)
}

pub fn check_bounds(
    n: u64,
    s: RationalExponent,
    which: &BoundCheck,
    policy: &PrecisionPolicy,
) -> Result<bool, CheckError> {
    Verifier::new(s, *policy).check_bounds(n, which)
}

/// Verifier for one exponent, sharing the tail caches across calls and
/// scan workers.
pub struct Verifier {
    eval: TailEvaluator,
    policy: PrecisionPolicy,
}

impl Verifier {
    pub fn new(s: RationalExponent, policy: PrecisionPolicy) -> Self {
        Verifier { eval: TailEvaluator::new(s), policy }
    }

    pub fn exponent(&self) -> RationalExponent {
        self.eval.exponent()
    }

    pub fn policy(&self) -> &PrecisionPolicy {
        &self.policy
    }

    pub fn evaluator(&self) -> &TailEvaluator {
        &self.eval
    }

    /// Refines `compute` until its floor is decided; returns the floor (or
    /// `None`) and the last precision tried.
    fn decide_floor<F>(&self, mut compute: F) -> (Option<i64>, u32)
    where
        F: FnMut(u32) -> Result<Ball, EnclosureError>,
    {
        if self.policy.validate().is_err() {
            return (None, 0);
        }
        let mut last = 0;
        for bits in self.policy.ladder() {
            last = bits;
            if let Ok(ball) = compute(bits) {
                if let Some(f) = ball.floor_if_decided() {
                    return (f.to_i64(), bits);
                }
            }
        }
        (None, last)
    }

    /// Decides `[1/T(n)] = [(-1)^(n+1) 2 (n - 1/2)^s]` at `n`.
    pub fn verify(&self, n: u64) -> VerdictRecord {
        let s = self.exponent();
        let (lhs, bits) = self.decide_floor(|b| self.eval.scaled_reciprocal(n, b));
        VerdictRecord::new(n, s, lhs, rhs_floor(n, s), bits)
    }

    /// The even-`n` identity in its positive form `[1/A] = [2 (n - 1/2)^s]`.
    pub fn verify_via_a(&self, n: u64) -> Result<VerdictRecord, ArgumentError> {
        if n == 0 || n % 2 == 1 {
            return Err(ArgumentError::new(format!("the A form needs an even n, got {n}")));
        }
        let s = self.exponent();
        let (lhs, bits) = self.decide_floor(|b| self.eval.value(TailKind::A, n, b + 8)?.recip());
        Ok(VerdictRecord::new(n, s, lhs, rhs_floor_positive(n, s).0, bits))
    }

    /// Runs [`Verifier::verify`] for `n = 1..=n_max` in parallel.
    pub fn scan(&self, n_max: u64) -> Result<ScanReport, ArgumentError> {
        self.scan_range(1, n_max)
    }

    pub fn scan_range(&self, n_min: u64, n_max: u64) -> Result<ScanReport, ArgumentError> {
        if n_max == 0 || n_min == 0 || n_min > n_max {
            return Err(ArgumentError::new(format!("scan range [{n_min}, {n_max}] is empty or starts at 0")));
        }
        let lo = usize::try_from(n_min).map_err(|_| ArgumentError::new("n_min too large"))?;
        let hi = usize::try_from(n_max).map_err(|_| ArgumentError::new("n_max too large"))?;
        let records: Vec<VerdictRecord> = (lo..=hi).into_par_iter().map(|n| self.verify(n as u64)).collect();
        Ok(ScanReport::from_records(self.exponent(), n_max, records))
    }

    /// `|1/T(n)|` at `bits`.
    fn reciprocal_magnitude(&self, n: u64, bits: u32) -> Result<Ball, EnclosureError> {
        let r = self.eval.scaled_reciprocal(n, bits)?;
        Ok(if n % 2 == 0 { -r } else { r })
    }

    /// Lower and upper comparison values for `which` at `n`.
    fn bounds(&self, n: u64, which: &BoundCheck, bits: u32) -> Result<(Ball, Ball), EnclosureError> {
        let s = self.exponent();
        let (q, p) = (s.q(), s.p());
        let nr = BigRational::from_integer(BigInt::from(n));
        let quarter = |k: i64| BigRational::new(k.into(), 4.into());
        let two_pow = |base: &BigRational, num: u32, den: u32| -> Result<Ball, EnclosureError> {
            Ok(Ball::from_rational(base, bits + 8).pow_rational(num, den)?.mul_pow2(1).with_prec(bits))
        };
        let lower = two_pow(&(&nr - quarter(2)), q, p)?;
        let upper = match which {
            BoundCheck::Thm21 => two_pow(&(&nr - quarter(1)), q, p)?,
            BoundCheck::Thm23 { eps } => two_pow(&(&nr - quarter(2) + eps), q, p)?,
            BoundCheck::Lem42 => two_pow(&(&nr * &nr - &nr + quarter(3)), q, 2 * p)?,
        };
        Ok((lower, upper))
    }

    /// `Ok(true)` when both strict inequalities are certified, `Ok(false)`
    /// when one is certifiably violated.
    pub fn check_bounds(&self, n: u64, which: &BoundCheck) -> Result<bool, CheckError> {
        if n == 0 {
            return Err(ArgumentError::new("n must be a positive integer").into());
        }
        if let BoundCheck::Thm23 { eps } = which {
            if !eps.is_positive() {
                return Err(ArgumentError::new(format!("eps must be positive, got {eps}")).into());
            }
        }
        self.policy.validate()?;
        let mut last = 0;
        for bits in self.policy.ladder() {
            last = bits;
            let value = match self.reciprocal_magnitude(n, bits) {
                Ok(v) => v,
                Err(EnclosureError::Argument(e)) => return Err(e.into()),
                Err(_) => continue,
            };
            let (lower, upper) = self.bounds(n, which, bits)?;
            if lower.strictly_below(&value) && value.strictly_below(&upper) {
                return Ok(true);
            }
            if value.strictly_below(&lower) || upper.strictly_below(&value) {
                return Ok(false);
            }
        }
        Err(Undecided { what: format!("{which:?} bounds at n = {n}, s = {}", self.exponent()), bits: last }.into())
    }

    /// Smallest `n0` in `[1, n_max]` such that the `eps` bracketing holds for
    /// every `n` in `[n0, n_max]`; `None` if it fails at `n_max` itself.
    /// Says nothing about `n > n_max`.
    pub fn thm23_persistent_from(&self, eps: &BigRational, n_max: u64) -> Result<Option<u64>, CheckError> {
        let which = BoundCheck::Thm23 { eps: eps.clone() };
        let hi = usize::try_from(n_max).map_err(|_| ArgumentError::new("n_max too large"))?;
        let flags = (1..=hi)
            .into_par_iter()
            .map(|n| self.check_bounds(n as u64, &which).map(|ok| (n as u64, ok)))
            .collect::<Result<Vec<_>, _>>()?;
        let mut start = None;
        for (n, ok) in flags.into_iter().rev() {
            if !ok {
                break;
            }
            start = Some(n);
        }
        Ok(start)
    }
}

impl BoundCheck {
    pub fn thm23(eps: BigRational) -> Self {
        BoundCheck::Thm23 { eps }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn s(text: &str) -> RationalExponent {
        text.parse().unwrap()
    }

    #[test]
    fn rhs_examples() {
        assert_eq!(rhs_floor(1, s("1/2")), 1);
        assert_eq!(rhs_floor(1, s("1/5")), 1);
        // floor_root(72, 5) = 2, 72 not a fifth power
        assert_eq!(rhs_radicand(2, s("2/5")), BigUint::from(72u32));
        assert_eq!(rhs_floor(2, s("2/5")), -3);
    }

    #[test]
    fn rhs_matches_float_estimate() {
        for text in ["1/2", "1/3", "1/5", "2/5", "2/7"] {
            let e = s(text);
            for n in 1..300u64 {
                let x = 2.0 * (n as f64 - 0.5).powf(e.to_f64());
                let expected = if n % 2 == 1 { x.floor() } else { (-x).floor() };
                assert_eq!(rhs_floor(n, e) as f64, expected, "n = {n}, s = {text}");
            }
        }
    }

    #[test]
    fn q1_rhs_is_monotone() {
        for text in ["1/2", "1/5", "1/7"] {
            let e = s(text);
            for n in 1..2000u64 {
                assert!(rhs_floor_positive(n + 1, e).0 >= rhs_floor_positive(n, e).0);
            }
        }
    }

    #[test]
    fn verify_examples() {
        let policy = PrecisionPolicy::default();
        let r = verify_identity(1, s("1/2"), &policy);
        assert_eq!(r.verdict, Verdict::Holds);
        assert_eq!((r.lhs_floor, r.rhs_floor), (Some(1), 1));
        assert_eq!(verify_identity(1, s("2/3"), &policy).verdict, Verdict::Holds);
        assert_eq!(verify_identity(2, s("1/4"), &policy).verdict, Verdict::Holds);
    }

    #[test]
    fn a_form_agrees_with_zeta_form() {
        let v = Verifier::new(s("2/5"), PrecisionPolicy::default());
        for n in (2..200).step_by(2) {
            let z = v.verify(n);
            let a = v.verify_via_a(n).unwrap();
            assert_eq!(z.verdict, a.verdict, "n = {n}");
            // [-x] = -[x] - 1 on non-integers
            assert_eq!(z.lhs_floor.map(|l| -l - 1), a.lhs_floor);
        }
        assert!(v.verify_via_a(3).is_err());
    }

    #[test]
    fn invalid_policy_is_undecided() {
        let policy = PrecisionPolicy { initial_bits: 0, max_bits: 64, growth_factor: 2 };
        let r = verify_identity(1, s("1/2"), &policy);
        assert_eq!(r.verdict, Verdict::Undecided);
        assert_eq!(r.lhs_floor, None);
    }

    #[test]
    fn scan_small() {
        let report = scan(s("1/2"), 200, &PrecisionPolicy::default()).unwrap();
        assert_eq!(report.empirical_n, 1);
        assert!(report.exceptions.is_empty() && report.undecided.is_empty());
        assert_eq!(report.records.len(), 200);
        assert!(report.records.windows(2).all(|w| w[0].n + 1 == w[1].n));
        assert!(scan(s("1/2"), 0, &PrecisionPolicy::default()).is_err());
    }

    #[test]
    fn empirical_n_counts_undecided() {
        let e = s("1/2");
        let rec = |n, v: Option<i64>| VerdictRecord::new(n, e, v, 1, 64);
        let report = ScanReport::from_records(e, 4, vec![rec(1, Some(1)), rec(2, None), rec(3, Some(1)), rec(4, Some(1))]);
        assert_eq!(report.empirical_n, 3);
        assert!(report.holds_from_empirical_n());
        let report = ScanReport::from_records(e, 2, vec![rec(1, Some(0)), rec(2, Some(1))]);
        assert_eq!(report.empirical_n, 2);
    }

    #[test]
    fn bound_examples() {
        let policy = PrecisionPolicy::default();
        assert!(check_bounds(2, s("1/2"), &BoundCheck::Thm21, &policy).unwrap());
        assert!(check_bounds(3, s("2/5"), &BoundCheck::Lem42, &policy).unwrap());
        assert!(check_bounds(1, s("2/5"), &BoundCheck::Lem42, &policy).unwrap());
        assert!(check_bounds(2, s("2/5"), &BoundCheck::Lem42, &policy).unwrap());
    }

    #[test]
    fn thm23_small_eps_eventually_holds() {
        let v = Verifier::new(s("1/3"), PrecisionPolicy::default());
        let eps = BigRational::new(1.into(), 10.into());
        let from = v.thm23_persistent_from(&eps, 300).unwrap();
        assert!(from.is_some());
        // a huge eps reduces to the lower bound alone, which always holds
        let loose = BoundCheck::thm23(BigRational::from_integer(1000.into()));
        assert!(v.check_bounds(1, &loose).unwrap());
        assert!(v.check_bounds(5, &BoundCheck::thm23(BigRational::zero())).is_err());
    }

    #[test]
    fn thm23_tiny_eps_fails_at_small_n() {
        let v = Verifier::new(s("1/2"), PrecisionPolicy::default());
        let tight = BoundCheck::thm23(BigRational::new(1.into(), 1_000_000.into()));
        assert!(!v.check_bounds(2, &tight).unwrap());
    }
}

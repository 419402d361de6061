//! Certified enclosures of the alternating zeta tail.
//!
//! With `T(n) = sum_{k >= n} (-1)^(k+1) k^(-s)` the quantities of interest
//! are
//!
//! * `A_{n,s} = -T(n)` for even `n` (positive),
//! * `B_{n,s} = -T(n)` for odd `n` (negative),
//! * `zeta_n(s) = T(n) / (1 - 2^(1-s))`,
//! * `(1 - 2^(1-s))^(-1) * zeta_n(s)^(-1) = 1 / T(n)`.
//!
//! Two independent routes compute `T(n)`: a bracketing of consecutive
//! partial sums (slow, used as an oracle) and Euler-Maclaurin summation of
//! the paired series with an explicit remainder bound.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::enclosure::{refine, Ball, Mag, PrecisionPolicy};
use crate::error::{ArgumentError, EnclosureError};

/// Default term cap of the direct oracle.
pub const DEFAULT_MAX_TERMS: u64 = 10_000_000;

/// Euler-Maclaurin correction terms used up to [`FIXED_ORDER_MAX_BITS`].
pub const EM_ORDER: usize = 8;

/// Above this working precision the correction order grows with precision,
/// otherwise the number of directly summed terms would grow like `2^(bits/17)`.
pub const FIXED_ORDER_MAX_BITS: u32 = 128;

const MAX_EM_ORDER: usize = 1024;

/// Term cap for the direct fallback inside [`tail_enclosure`].
const FALLBACK_TERMS: u64 = 100_000;

/// The point `s = q/p`, `q` in `{1, 2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct RationalExponent {
    q: u32,
    p: u32,
}

impl RationalExponent {
    pub fn new(q: u32, p: u32) -> Result<Self, ArgumentError> {
        if q != 1 && q != 2 {
            return Err(ArgumentError::new(format!("numerator q = {q} must be 1 or 2")));
        }
        if p < 2 || q >= p {
            return Err(ArgumentError::new(format!("s = {q}/{p} must lie strictly between 0 and 1")));
        }
        if q == 2 && (p % 2 == 0 || p < 3) {
            return Err(ArgumentError::new(format!("s = 2/{p} needs an odd denominator p >= 3")));
        }
        Ok(RationalExponent { q, p })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn to_f64(&self) -> f64 {
        f64::from(self.q) / f64::from(self.p)
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.q.into(), self.p.into())
    }
}

impl fmt::Display for RationalExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.q, self.p)
    }
}

impl FromStr for RationalExponent {
    type Err = ArgumentError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let (q, p) = text
            .trim()
            .split_once('/')
            .ok_or_else(|| ArgumentError::new(format!("expected a fraction q/p, got {text:?}")))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<u32>()
                .map_err(|_| ArgumentError::new(format!("expected a fraction q/p, got {text:?}")))
        };
        RationalExponent::new(parse(q)?, parse(p)?)
    }
}

impl TryFrom<String> for RationalExponent {
    type Error = ArgumentError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<RationalExponent> for String {
    fn from(s: RationalExponent) -> String {
        s.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailKind {
    A,
    B,
    ZetaTail,
    ZetaTailReciprocalScaled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailMethod {
    Direct,
    Accelerated,
}

#[derive(Debug, Clone)]
pub struct TailEnclosure {
    pub kind: TailKind,
    pub n: u64,
    pub s: RationalExponent,
    pub value: Ball,
    pub method: TailMethod,
    pub precision_bits: u32,
}

impl TailEnclosure {
    /// Sign expected from the definitions: `A > 0`, `B < 0`, `zeta_n` has
    /// sign `(-1)^n` and the scaled reciprocal `1/T(n)` sign `(-1)^(n+1)`.
    pub fn sign_is_consistent(&self) -> bool {
        let even = self.n % 2 == 0;
        match self.kind {
            TailKind::A => self.value.is_positive(),
            TailKind::B => self.value.is_negative(),
            TailKind::ZetaTail if even => self.value.is_positive(),
            TailKind::ZetaTail => self.value.is_negative(),
            TailKind::ZetaTailReciprocalScaled if even => self.value.is_negative(),
            TailKind::ZetaTailReciprocalScaled => self.value.is_positive(),
        }
    }
}

/// Encloses `T(n)` by the hull of the last two of `max_terms` partial sums.
///
/// The terms `k^(-s)` decrease to zero, so consecutive partial sums lie on
/// opposite sides of the limit. The width is about `(n + max_terms)^(-s)`.
pub fn eta_tail_direct(n: u64, s: RationalExponent, precision: u32, max_terms: u64) -> Result<Ball, ArgumentError> {
    if n == 0 {
        return Err(ArgumentError::new("n must be a positive integer"));
    }
    let max_terms = max_terms.max(1);
    let mut before = Ball::from_int(0, precision);
    let mut after = before.clone();
    for k in n..n + max_terms {
        let term = Ball::from_int(k, precision)
            .pow_neg_rational(s.q, s.p)
            .expect("positive integer base");
        before = after.clone();
        after = if k % 2 == 1 { &after + &term } else { &after - &term };
    }
    Ok(before.hull(&after))
}

/// Rigorous `T(n)` via Euler-Maclaurin on the paired series.
pub fn eta_tail_accelerated(n: u64, s: RationalExponent, precision: u32) -> Result<Ball, EnclosureError> {
    TailEvaluator::new(s).eta_tail(n, precision)
}

/// Enclosure of one of the tail quantities to `target_radius`, refining
/// precision along `policy`.
pub fn tail_enclosure(
    kind: TailKind,
    n: u64,
    s: RationalExponent,
    target_radius: f64,
    policy: &PrecisionPolicy,
) -> Result<TailEnclosure, EnclosureError> {
    TailEvaluator::new(s).enclosure(kind, n, target_radius, policy)
}

/// Cached state for one exponent: Euler-Maclaurin coefficient tables per
/// (precision, order) and the prefactor `1/(1 - 2^(1-s))` per precision.
/// Shared read-mostly between scan workers.
pub struct TailEvaluator {
    s: RationalExponent,
    tables: RwLock<HashMap<(u32, usize), Arc<EmTable>>>,
    prefactors: RwLock<HashMap<u32, Ball>>,
}

struct EmTable {
    /// `B_{2k}/(2k)! * 2^(2k-1) * (s)_{2k-1}`, k = 1..=order
    corrections: Vec<Ball>,
    /// multiplies `u^(-s-2K) - (u+1)^(-s-2K)` to bound the remainder
    remainder_factor: Mag,
    /// `1 / (2(1-s))`
    integral_factor: Ball,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Plan {
    order: usize,
    /// first index handled by the Euler-Maclaurin part; `u >= n`, `u = n (mod 2)`
    start: u64,
}

impl TailEvaluator {
    pub fn new(s: RationalExponent) -> Self {
        TailEvaluator { s, tables: RwLock::new(HashMap::new()), prefactors: RwLock::new(HashMap::new()) }
    }

    pub fn exponent(&self) -> RationalExponent {
        self.s
    }

    /// `1 / (1 - 2^(1-s))` at `precision` bits (cached).
    pub fn prefactor(&self, precision: u32) -> Result<Ball, EnclosureError> {
        if let Some(b) = self.prefactors.read().expect("prefactor cache").get(&precision) {
            return Ok(b.clone());
        }
        let (q, p) = (self.s.q, self.s.p);
        let two_pow = Ball::from_int(2, precision + 16).pow_rational(p - q, p)?;
        let value = (Ball::from_int(1, precision + 16) - two_pow).recip()?.with_prec(precision);
        self.prefactors.write().expect("prefactor cache").insert(precision, value.clone());
        Ok(value)
    }

    fn table(&self, precision: u32, order: usize) -> Arc<EmTable> {
        if let Some(t) = self.tables.read().expect("table cache").get(&(precision, order)) {
            return Arc::clone(t);
        }
        let table = Arc::new(EmTable::build(self.s, precision, order));
        self.tables
            .write()
            .expect("table cache")
            .entry((precision, order))
            .or_insert_with(|| Arc::clone(&table))
            .clone()
    }

    /// Rigorous enclosure of `T(n)` at roughly `precision` bits.
    pub fn eta_tail(&self, n: u64, precision: u32) -> Result<Ball, EnclosureError> {
        if n == 0 {
            return Err(ArgumentError::new("n must be a positive integer").into());
        }
        let plan = plan(n, self.s, precision);
        let start_bits = 64 - plan.start.leading_zeros();
        let wp = precision + 24 + 2 * start_bits;
        let (q, p) = (self.s.q, self.s.p);
        let table = self.table(wp, plan.order);

        let mut partial = Ball::from_int(0, wp);
        for k in n..plan.start {
            let term = Ball::from_int(k, wp).pow_neg_rational(q, p)?;
            partial = if k % 2 == 1 { partial + term } else { partial - term };
        }

        let u = plan.start;
        let a0 = Ball::from_int(u, wp).pow_neg_rational(q, p)?;
        let b0 = Ball::from_int(u + 1, wp).pow_neg_rational(q, p)?;
        let inv_a = Ball::from_int(u, wp).recip()?;
        let inv_b = Ball::from_int(u + 1, wp).recip()?;

        // integral of the paired summand from 0 to infinity
        let integral = (&b0 * &Ball::from_int(u + 1, wp) - &a0 * &Ball::from_int(u, wp)) * &table.integral_factor;
        let mut paired = integral + (&a0 - &b0).mul_pow2(-1);

        let mut a = a0;
        let mut b = b0;
        let mut remainder = Mag::ZERO;
        for r in 1..=2 * plan.order {
            a = &a * &inv_a;
            b = &b * &inv_b;
            let diff = &a - &b;
            if r % 2 == 1 {
                paired = paired + &table.corrections[(r - 1) / 2] * &diff;
            }
            if r == 2 * plan.order {
                let diff_up = Mag::from_dyadic_up(&diff.upper());
                remainder = table.remainder_factor.mul(diff_up);
            }
        }
        let paired = paired.add_error(remainder);
        let tail = if n % 2 == 1 { partial + paired } else { partial - paired };
        Ok(tail.with_prec(precision))
    }

    /// `1 / T(n)`, the scaled reciprocal `(1 - 2^(1-s))^(-1) zeta_n(s)^(-1)`.
    pub fn scaled_reciprocal(&self, n: u64, precision: u32) -> Result<Ball, EnclosureError> {
        self.eta_tail(n, precision + 8)?.recip().map(|b| b.with_prec(precision))
    }

    /// The value of `kind` at `n` from an enclosure of `T(n)`.
    fn from_eta(&self, kind: TailKind, eta: &Ball, precision: u32) -> Result<Ball, EnclosureError> {
        match kind {
            TailKind::A | TailKind::B => Ok(-eta),
            TailKind::ZetaTail => Ok(eta * &self.prefactor(precision)?),
            TailKind::ZetaTailReciprocalScaled => eta.recip(),
        }
    }

    pub fn value(&self, kind: TailKind, n: u64, precision: u32) -> Result<Ball, EnclosureError> {
        check_kind(kind, n)?;
        let eta = self.eta_tail(n, precision + 8)?;
        Ok(self.from_eta(kind, &eta, precision + 8)?.with_prec(precision))
    }

    pub fn enclosure(
        &self,
        kind: TailKind,
        n: u64,
        target_radius: f64,
        policy: &PrecisionPolicy,
    ) -> Result<TailEnclosure, EnclosureError> {
        check_kind(kind, n)?;
        let accelerated = refine(|bits| self.value(kind, n, bits), policy, target_radius);
        match accelerated {
            Ok(value) => Ok(TailEnclosure {
                kind,
                n,
                s: self.s,
                precision_bits: value.prec(),
                value,
                method: TailMethod::Accelerated,
            }),
            Err(EnclosureError::PrecisionExhausted { ball, bits }) => {
                // intersect with the slow bracketing; both contain the true value
                let direct = eta_tail_direct(n, self.s, bits, FALLBACK_TERMS)?;
                let direct = self.from_eta(kind, &direct, bits)?;
                let ball = ball.intersect(&direct).unwrap_or(*ball);
                let target = Mag::from_f64_up(target_radius.max(0.0)).unwrap_or(Mag::ZERO);
                if target_radius > 0.0 && ball.rad() <= target {
                    Ok(TailEnclosure { kind, n, s: self.s, value: ball, method: TailMethod::Direct, precision_bits: bits })
                } else {
                    Err(EnclosureError::PrecisionExhausted { ball: Box::new(ball), bits })
                }
            }
            Err(e) => Err(e),
        }
    }
}

fn check_kind(kind: TailKind, n: u64) -> Result<(), ArgumentError> {
    if n == 0 {
        return Err(ArgumentError::new("n must be a positive integer"));
    }
    match kind {
        TailKind::A if n % 2 == 1 => Err(ArgumentError::new(format!("A is defined for even n, got {n}"))),
        TailKind::B if n % 2 == 0 => Err(ArgumentError::new(format!("B is defined for odd n, got {n}"))),
        _ => Ok(()),
    }
}

/// `log2` of the rising factorial `(s)_r` (upper estimate).
fn log2_rising(s: f64, r: usize) -> f64 {
    (0..r).map(|i| (s + i as f64).log2()).sum()
}

/// Smallest start index whose Euler-Maclaurin remainder of the given order
/// stays near `2^-(precision+8)` relative to the tail.
fn required_start(s: f64, precision: u32, order: usize) -> f64 {
    let m = (2 * order + 1) as f64;
    let log2_two_pi = (2.0 * std::f64::consts::PI).log2();
    let numerator = f64::from(precision) + 8.0 + 1.0 + (2 * order) as f64 + log2_rising(s, 2 * order + 1) - m * log2_two_pi;
    (numerator / m).exp2().ceil().max(2.0)
}

fn plan(n: u64, s: RationalExponent, precision: u32) -> Plan {
    let sf = s.to_f64();
    let start_for = |order: usize| -> u64 {
        let need = required_start(sf, precision, order);
        let need = if need > 1e18 { u64::MAX / 4 } else { need as u64 };
        let mut u = need.max(n);
        if (u - n) % 2 == 1 {
            u += 1;
        }
        u
    };
    if precision <= FIXED_ORDER_MAX_BITS {
        return Plan { order: EM_ORDER, start: start_for(EM_ORDER) };
    }
    // cost model: one root per directly summed term, a few products per order
    let mut best = Plan { order: EM_ORDER, start: start_for(EM_ORDER) };
    let mut best_cost = u128::MAX;
    let mut order = EM_ORDER;
    while order <= MAX_EM_ORDER {
        let start = start_for(order);
        let cost = u128::from(start - n) * 8 + order as u128 * 3;
        if cost < best_cost {
            best_cost = cost;
            best = Plan { order, start };
        }
        order += order / 2;
    }
    best
}

impl EmTable {
    fn build(s: RationalExponent, precision: u32, order: usize) -> EmTable {
        let s_rat = s.to_rational();
        let bern = bernoulli_even(order);
        let mut corrections = Vec::with_capacity(order);
        let mut rising = BigRational::one(); // (s)_{r}
        let mut factorial = BigInt::one(); // (2k)!
        let mut r = 0usize;
        for (k, b) in bern.iter().enumerate().map(|(i, b)| (i + 1, b)) {
            // advance (s)_r to r = 2k - 1
            while r < 2 * k - 1 {
                rising *= &s_rat + BigRational::from_integer(r.into());
                r += 1;
            }
            factorial *= BigInt::from((2 * k - 1) * (2 * k));
            let c = b / BigRational::from_integer(factorial.clone())
                * BigRational::from_integer(BigInt::one() << (2 * k - 1))
                * &rising;
            corrections.push(Ball::from_rational(&c, precision));
        }
        // (s)_{2K}
        while r < 2 * order {
            rising *= &s_rat + BigRational::from_integer(r.into());
            r += 1;
        }
        // 2 zeta(m) / (2 pi)^m * 2^(2K) * (s)_{2K},  m = 2K + 1,
        // with zeta(m) <= 1 + 2^(1-m) and 2 pi > 157/25
        let m = 2 * order + 1;
        let zeta_bound = BigRational::one() + BigRational::new(BigInt::one(), BigInt::one() << (m - 1));
        let two_pi_low = BigRational::new(157.into(), 25.into());
        let factor = BigRational::from_integer(2.into()) * zeta_bound / num_traits::pow(two_pi_low, m)
            * BigRational::from_integer(BigInt::one() << (2 * order))
            * rising;
        let remainder_factor = Mag::from_dyadic_up(&Ball::from_rational(&factor, 64).upper());

        let one_minus_s = BigRational::one() - s_rat;
        let integral = BigRational::one() / (BigRational::from_integer(2.into()) * one_minus_s);
        EmTable { corrections, remainder_factor, integral_factor: Ball::from_rational(&integral, precision) }
    }
}

/// `B_2, B_4, ..., B_{2k}` for `k = count`, from the tangent numbers
/// `T_j` via `B_{2j} = (-1)^(j-1) 2j T_j / (4^j (4^j - 1))`.
pub fn bernoulli_even(count: usize) -> Vec<BigRational> {
    static CACHE: OnceLock<Mutex<Vec<BigRational>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(Vec::new()));
    let mut cached = cache.lock().expect("bernoulli cache");
    if cached.len() < count {
        let tangent = tangent_numbers(count);
        *cached = tangent
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let j = i + 1;
                let four_j = BigInt::one() << (2 * j);
                let num = BigInt::from(2 * j) * t;
                let num = if j % 2 == 1 { num } else { -num };
                BigRational::new(num, &four_j * (&four_j - 1))
            })
            .collect();
    }
    cached[..count].to_vec()
}

fn tangent_numbers(count: usize) -> Vec<BigInt> {
    let mut t = vec![BigInt::zero(); count + 1];
    if count == 0 {
        return Vec::new();
    }
    t[1] = BigInt::one();
    for k in 2..=count {
        t[k] = BigInt::from(k - 1) * &t[k - 1];
    }
    for k in 2..=count {
        for j in k..=count {
            t[j] = BigInt::from(j - k) * &t[j - 1] + BigInt::from(j - k + 2) * &t[j];
        }
    }
    t.split_off(1)
}

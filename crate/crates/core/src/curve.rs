//! Integer points on the curves `C_m : x^p = 2^p y^2 + 2^p y - 2^(p-2) - m`
//! and the exceptional sets of the `s = 2/p` identity.
//!
//! An exceptional index `n` has a witness `a` with
//! `a^p = 2^p n^2 - 2^p n + 2^(p-2) + m`, `1 <= m <= 2^(p-1) - 1`. Such a
//! pair is the point `(a, n - 1)` (equivalently `(a, -n)`) of the companion
//! curve `x^p = 2^p y^2 + 2^p y + 2^(p-2) + m`; [`Curve`] handles both
//! families through the constant term.

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bigint::{floor_root, gap_q2, pth_powers_in_open_interval};
use crate::error::{ArgumentError, CurveError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub p: u32,
    pub m: i64,
    pub x: i64,
    pub y: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExceptionRecord {
    pub p: u32,
    pub n: u64,
    pub a: u64,
    pub m: i64,
}

/// `x^p = 2^p y^2 + 2^p y + c` for odd `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Curve {
    p: u32,
    c: BigInt,
}

/// Largest `p` accepted; keeps `2^(p-1)` and the coordinates in `i64`.
pub const MAX_P: u32 = 61;

fn check_odd_p(p: u32, min: u32) -> Result<(), ArgumentError> {
    if p % 2 == 0 || p < min || p > MAX_P {
        return Err(ArgumentError::new(format!("p must be odd with {min} <= p <= {MAX_P}, got {p}")));
    }
    Ok(())
}

fn check_m(p: u32, m: i64) -> Result<(), ArgumentError> {
    let m_max = (1i64 << (p - 1)) - 1;
    if !(1..=m_max).contains(&m) {
        return Err(ArgumentError::new(format!("m must lie in [1, {m_max}] for p = {p}, got {m}")));
    }
    Ok(())
}

impl Curve {
    pub fn new(p: u32, c: BigInt) -> Result<Self, ArgumentError> {
        check_odd_p(p, 3)?;
        Ok(Curve { p, c })
    }

    /// `C_m`.
    pub fn stated(p: u32, m: i64) -> Result<Self, ArgumentError> {
        check_odd_p(p, 5)?;
        check_m(p, m)?;
        Curve::new(p, -(BigInt::one() << (p - 2)) - BigInt::from(m))
    }

    /// The curve carrying the exceptional witnesses for offset `m`.
    pub fn witness(p: u32, m: i64) -> Result<Self, ArgumentError> {
        check_odd_p(p, 5)?;
        check_m(p, m)?;
        Curve::new(p, (BigInt::one() << (p - 2)) + BigInt::from(m))
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn constant(&self) -> &BigInt {
        &self.c
    }

    /// `2^p y^2 + 2^p y + c`.
    pub fn rhs(&self, y: i64) -> BigInt {
        let y = BigInt::from(y);
        ((&y * &y + &y) << self.p) + &self.c
    }

    pub fn contains(&self, x: i64, y: i64) -> bool {
        Pow::pow(BigInt::from(x), self.p) == self.rhs(y)
    }

    /// The unique integer `x` on row `y`, if any (`p` odd).
    pub fn solve_row(&self, y: i64) -> Option<i64> {
        let r = self.rhs(y);
        let mag: BigUint = r.magnitude().clone();
        let root = floor_root(&mag, self.p);
        if Pow::pow(&root, self.p) != mag {
            return None;
        }
        let x = BigInt::from_biguint(if r.is_negative() { Sign::Minus } else { Sign::Plus }, root);
        x.to_i64()
    }

    /// All `(x, y)` with `-y_bound - 1 <= y <= y_bound`, ordered by `y`.
    ///
    /// Only rows `y >= 0` are solved; `y -> -1 - y` fixes the right-hand
    /// side and supplies the negative rows.
    pub fn points(&self, y_bound: u64) -> Result<Vec<(i64, i64)>, ArgumentError> {
        let hi = i64::try_from(y_bound)
            .ok()
            .filter(|&b| b < i64::MAX / 2)
            .ok_or_else(|| ArgumentError::new(format!("y_bound {y_bound} too large")))?;
        let upper: Vec<(i64, i64)> =
            (0..=hi).into_par_iter().filter_map(|y| self.solve_row(y).map(|x| (x, y))).collect();
        let mut out: Vec<(i64, i64)> = upper.iter().rev().map(|&(x, y)| (x, -1 - y)).collect();
        out.extend(upper);
        Ok(out)
    }
}

/// Integer points of `C_m` with `-y_bound - 1 <= y <= y_bound`.
pub fn curve_points(p: u32, m: i64, y_bound: u64) -> Result<Vec<CurvePoint>, ArgumentError> {
    let curve = Curve::stated(p, m)?;
    Ok(curve.points(y_bound)?.into_iter().map(|(x, y)| CurvePoint { p, m, x, y }).collect())
}

/// `(2^(p-1) + m) / 2^p`, the constant of `Y^2 = x^p / 2^p + (2^(p-1) + m) / 2^p`.
pub fn eq4_constant(p: u32, m: i64) -> BigRational {
    BigRational::new((BigInt::one() << (p - 1)) + BigInt::from(m), BigInt::one() << p)
}

/// Exact check of `Y^2 = x^p / 2^p + (2^(p-1) + m) / 2^p` at `Y = y + 1/2`.
pub fn satisfies_eq4(point: &CurvePoint) -> bool {
    let two_p = BigInt::one() << point.p;
    let big_y = BigRational::new(BigInt::from(2 * i128::from(point.y) + 1), BigInt::from(2));
    let lhs = &big_y * &big_y;
    let rhs = BigRational::new(Pow::pow(BigInt::from(point.x), point.p), two_p) + eq4_constant(point.p, point.m);
    lhs == rhs
}

/// `2^p n^2 - 2^p n + 2^(p-2)`, the base of the witness equation.
fn witness_base(p: u32, n: u64) -> BigInt {
    let n = BigInt::from(n);
    ((&n * &n - &n) << p) + (BigInt::one() << (p - 2))
}

/// Witnesses in the gap at one `n`.
pub fn exceptions_at(p: u32, n: u64) -> Result<Option<ExceptionRecord>, CurveError> {
    check_odd_p(p, 5)?;
    let gap = gap_q2(n, p)?;
    let hits = pth_powers_in_open_interval(&gap);
    match hits.as_slice() {
        [] => Ok(None),
        [a] => {
            let m = BigInt::from(Pow::pow(a, p)) - witness_base(p, n);
            Ok(Some(ExceptionRecord {
                p,
                n,
                a: a.to_u64().expect("witness fits in u64"),
                m: m.to_i64().expect("offset fits in i64"),
            }))
        }
        _ => Err(CurveError::MultipleWitnesses { n, count: hits.len() }),
    }
}

/// The exceptional set `{n <= n_max : the gap at n holds a p-th power}`.
pub fn exceptional_set(p: u32, n_max: u64) -> Result<Vec<ExceptionRecord>, CurveError> {
    check_odd_p(p, 5)?;
    if n_max == 0 {
        return Err(ArgumentError::new("n_max must be positive").into());
    }
    let hi = usize::try_from(n_max).map_err(|_| ArgumentError::new("n_max too large"))?;
    let found = (1..=hi)
        .into_par_iter()
        .map(|n| exceptions_at(p, n as u64))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(found.into_iter().flatten().collect())
}

/// Checks the map `n -> (a, n - 1)` into the witness curves: every record
/// lies on its curve with an admissible `m`, and no two records share a
/// point.
pub fn phi_injection_holds(p: u32, records: &[ExceptionRecord]) -> bool {
    let mut images = std::collections::BTreeSet::new();
    records.iter().all(|r| {
        let on_curve = r.p == p
            && check_m(p, r.m).is_ok()
            && i64::try_from(r.a).is_ok_and(|a| {
                Curve::witness(p, r.m).is_ok_and(|c| c.contains(a, r.n as i64 - 1))
            });
        on_curve && images.insert((r.m, r.a, r.n))
    })
}

pub fn phi_injection_check(p: u32, n_max: u64) -> Result<bool, CurveError> {
    let records = exceptional_set(p, n_max)?;
    Ok(phi_injection_holds(p, &records))
}

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::enclosure::{Ball, PrecisionPolicy};
use crate::error::{ArgumentError, CheckError, Undecided};
use crate::IntPoly;

/// Nonzero `alpha`-degree coefficients of the expansion, as
/// `[p^3, p^2, p, 1]` coefficient rows, from `alpha^19` down to `alpha^1`.
pub fn expected_coefficients() -> Vec<(u32, [i64; 4])> {
    vec![
        (19, [-8, -24, 0, 32]),
        (17, [-88, -1032, -2304, -1056]),
        (15, [5472, 21792, 16128, 2304]),
        (13, [-25952, 62688, 126720, 52224]),
        (11, [-656496, -1239120, -856320, -217024]),
        (9, [-1969488, -3717360, -2568960, -651072]),
        (7, [-700704, 1692576, 3421440, 1410048]),
        (5, [1329696, 5295456, 3919104, 559872]),
        (3, [-192456, -2256984, -5038848, -2309472]),
        (1, [-157464, -472392, 0, 629856]),
    ]
}

fn int(v: i64) -> IntPoly {
    IntPoly::constant(BigInt::from(v))
}

fn build_expansion() -> IntPoly {
    let a = IntPoly::alpha();
    let p = IntPoly::p();
    let a2 = a.pow(2);
    let up = &(&a2 + &(&int(2) * &a)) + &int(3);
    let down = &(&a2 - &(&int(2) * &a)) + &int(3);
    let lead = &(&p + &int(2)) * &a2;
    let mid = &(&(&int(6) * &p) + &int(8)) * &a;
    let tail = &(&int(3) * &p) + &int(6);
    let plus = &(&lead + &mid) + &tail;
    let minus = &(&lead - &mid) + &tail;
    &(&up.pow(7) * &minus.pow(3)) - &(&down.pow(7) * &plus.pow(3))
}

/// `(a^2 + 2a + 3)^7 ((p+2)a^2 - (6p+8)a + (3p+6))^3
///  - (a^2 - 2a + 3)^7 ((p+2)a^2 + (6p+8)a + (3p+6))^3`
pub fn lemma41_expansion() -> IntPoly {
    expansion_ref().clone()
}

fn expansion_ref() -> &'static IntPoly {
    static CACHE: OnceLock<IntPoly> = OnceLock::new();
    CACHE.get_or_init(build_expansion)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateRow {
    pub alpha_degree: u32,
    /// Coefficients of `p^3, p^2, p, 1`.
    pub computed: Vec<String>,
    pub expected: Vec<String>,
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaCertificate {
    pub rows: Vec<CertificateRow>,
    pub matched: usize,
    pub even_degrees_vanish: bool,
    /// Every `(alpha, p)` degree carried by the expansion is listed in `rows`.
    pub no_unlisted_terms: bool,
}

impl LemmaCertificate {
    pub fn all_match(&self) -> bool {
        self.matched == self.rows.len() && self.even_degrees_vanish && self.no_unlisted_terms
    }
}

/// Compares the exact expansion with the expected coefficient table.
pub fn lemma41_certificate() -> LemmaCertificate {
    let poly = expansion_ref();
    let expected = expected_coefficients();
    let rows: Vec<CertificateRow> = expected
        .iter()
        .map(|(k, want)| {
            let got: Vec<BigInt> = (0..4).rev().map(|j| poly.coeff(*k, j)).collect();
            let want: Vec<BigInt> = want.iter().map(|&v| BigInt::from(v)).collect();
            CertificateRow {
                alpha_degree: *k,
                computed: got.iter().map(ToString::to_string).collect(),
                expected: want.iter().map(ToString::to_string).collect(),
                matches: got == want,
            }
        })
        .collect();
    let matched = rows.iter().filter(|r| r.matches).count();
    let even_degrees_vanish = poly.terms().all(|(m, _)| m.alpha % 2 == 1);
    let listed: Vec<u32> = expected.iter().map(|(k, _)| *k).collect();
    let no_unlisted_terms = poly.terms().all(|(m, _)| listed.contains(&m.alpha) && m.p <= 3);
    LemmaCertificate { rows, matched, even_degrees_vanish, no_unlisted_terms }
}

/// Sign of the expansion at `(alpha, p)`: exact for integer `alpha`,
/// ball arithmetic along the default precision ladder otherwise.
pub fn lemma41_negative_at(p: u32, alpha: f64) -> Result<bool, CheckError> {
    if !alpha.is_finite() {
        return Err(ArgumentError::new(format!("alpha must be finite, got {alpha}")).into());
    }
    let poly = expansion_ref();
    if alpha.fract() == 0.0 && alpha.abs() < 9.0e15 {
        let v = poly.eval(&BigInt::from(alpha as i64), &BigInt::from(p));
        return Ok(v.is_negative());
    }
    let policy = PrecisionPolicy::default();
    let mut last = 0;
    for bits in policy.ladder() {
        last = bits;
        let a = Ball::from_f64(alpha, bits).expect("finite alpha");
        let v = poly.eval_map(&a, &Ball::from_int(p, bits), Ball::from_int(1, bits), |c| Ball::from_int(c.clone(), bits));
        if v.is_negative() {
            return Ok(true);
        }
        if v.is_positive() || (v.is_exact() && v.mid().is_zero()) {
            return Ok(false);
        }
    }
    Err(Undecided { what: format!("sign of the expansion at alpha = {alpha}, p = {p}"), bits: last }.into())
}

/// Strict negativity on every `p` in `p_values` over the grid of integers
/// and half-integers in `[alpha_min, alpha_max]`, plus the endpoints.
pub fn lemma41_negativity_check(p_values: &[u32], alpha_min: f64, alpha_max: f64) -> Result<bool, CheckError> {
    if p_values.is_empty() {
        return Err(ArgumentError::new("p_values must not be empty").into());
    }
    if let Some(p) = p_values.iter().find(|&&p| p < 5) {
        return Err(ArgumentError::new(format!("p must be at least 5, got {p}")).into());
    }
    if !(alpha_min >= 8.0 && alpha_max >= alpha_min && alpha_max.is_finite()) {
        return Err(ArgumentError::new(format!("need 8 <= alpha_min <= alpha_max, got [{alpha_min}, {alpha_max}]")).into());
    }
    let mut grid = vec![alpha_min, alpha_max];
    let mut k = (alpha_min * 2.0).ceil();
    while k <= alpha_max * 2.0 {
        grid.push(k / 2.0);
        k += 1.0;
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    for &p in p_values {
        for &a in &grid {
            if !lemma41_negative_at(p, a)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

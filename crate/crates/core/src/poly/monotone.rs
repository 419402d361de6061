//! The real-valued functions behind the monotonicity arguments, written once
//! over [`Real`] and certified with balls on finite grids.

use num_rational::BigRational;

use crate::enclosure::{Ball, PrecisionPolicy};
use crate::error::{ArgumentError, CheckError, EnclosureError, Undecided};
use crate::scalar::Real;

/// `h(a) = ((1 - 1/a)^2 + 2/a^2)^(-1/p - 1) * (1 - 1/a)`.
pub fn h_value<R: Real>(alpha: &R, p: u32) -> Result<R, EnclosureError> {
    let one = alpha.int_like(1);
    let inv = one.try_div(alpha)?;
    let t = one - inv.clone();
    let base = t.clone() * t.clone() + alpha.int_like(2) * inv.clone() * inv;
    Ok(base.pow_ratio(-(i64::from(p) + 1), p)? * t)
}

/// `h(a) + h(-a)`, increasing towards its limit 2 for `a >= 8`.
pub fn h_sum<R: Real>(alpha: &R, p: u32) -> Result<R, EnclosureError> {
    Ok(h_value(alpha, p)? + h_value(&-alpha.clone(), p)?)
}

/// `g(x) = (2x)^(-2/p) - (4x^2 - 2x + 3/4)^(-1/p) / 2 - (4x^2 + 2x + 3/4)^(-1/p) / 2`.
pub fn g_value<R: Real>(x: &R, p: u32) -> Result<R, EnclosureError> {
    let half = x.ratio_like(1, 2);
    let four_x2 = x.int_like(4) * x.clone() * x.clone();
    let two_x = x.int_like(2) * x.clone();
    let three_quarters = x.ratio_like(3, 4);
    let lower = (four_x2.clone() - two_x.clone() + three_quarters.clone()).pow_ratio(-1, p)?;
    let upper = (four_x2 + two_x.clone() + three_quarters).pow_ratio(-1, p)?;
    Ok(two_x.pow_ratio(-2, p)? - half.clone() * lower - half * upper)
}

/// `f(x) = g(x) - g(x + 1/2)`.
pub fn f_value<R: Real>(x: &R, p: u32) -> Result<R, EnclosureError> {
    let shifted = x.clone() + x.ratio_like(1, 2);
    Ok(g_value(x, p)? - g_value(&shifted, p)?)
}

/// Both sides of
/// `((a^2 + 2a + 3) / (a^2 - 2a + 3))^(2 + 1/p)
///   < ((p+2)a^2 + (6p+8)a + (3p+6)) / ((p+2)a^2 - (6p+8)a + (3p+6))`.
pub fn inequality2_sides<R: Real>(alpha: &R, p: u32) -> Result<(R, R), EnclosureError> {
    let a = alpha.clone();
    let a2 = a.clone() * a.clone();
    let c = |v: i64| alpha.int_like(v);
    let pi = i64::from(p);
    let ratio = (a2.clone() + c(2) * a.clone() + c(3)).try_div(&(a2.clone() - c(2) * a.clone() + c(3)))?;
    let lhs = ratio.pow_ratio(2 * pi + 1, p)?;
    let lead = c(pi + 2) * a2;
    let mid = c(6 * pi + 8) * a;
    let tail = c(3 * pi + 6);
    let rhs = (lead.clone() + mid.clone() + tail.clone()).try_div(&(lead - mid + tail))?;
    Ok((lhs, rhs))
}

/// `2 + 1/p < 7/3`, exactly.
pub fn exponent_bound_holds(p: u32) -> bool {
    p > 0 && BigRational::new((2 * i64::from(p) + 1).into(), p.into()) < BigRational::new(7.into(), 3.into())
}

/// Runs `step` along the default precision ladder until it decides.
fn certify<F>(what: impl FnOnce() -> String, mut step: F) -> Result<bool, CheckError>
where
    F: FnMut(u32) -> Result<Option<bool>, EnclosureError>,
{
    let policy = PrecisionPolicy::default();
    let mut last = 0;
    for bits in policy.ladder() {
        last = bits;
        match step(bits) {
            Ok(Some(answer)) => return Ok(answer),
            Ok(None) => {}
            Err(EnclosureError::Argument(e)) => return Err(e.into()),
            Err(_) => {}
        }
    }
    Err(Undecided { what: what(), bits: last }.into())
}

fn check_grid(grid: &[f64], min: f64) -> Result<(), ArgumentError> {
    if grid.is_empty() {
        return Err(ArgumentError::new("grid must not be empty"));
    }
    if grid.iter().any(|v| !v.is_finite() || *v < min) {
        return Err(ArgumentError::new(format!("grid values must be finite and >= {min}")));
    }
    if grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(ArgumentError::new("grid must be sorted ascending"));
    }
    Ok(())
}

fn balls(grid: &[f64], bits: u32) -> Vec<Ball> {
    grid.iter().map(|&v| Ball::from_f64(v, bits).expect("finite grid value")).collect()
}

/// Three-way answer for "every consecutive pair is strictly ordered by `lt`".
fn chain(values: &[Ball], lt: impl Fn(&Ball, &Ball) -> bool) -> Option<bool> {
    let mut decided = true;
    for w in values.windows(2) {
        if lt(&w[1], &w[0]) || (w[0].is_exact() && w[1].is_exact() && w[0].mid() == w[1].mid()) {
            return Some(false);
        }
        decided &= lt(&w[0], &w[1]);
    }
    decided.then_some(true)
}

/// `h(a) + h(-a)` strictly increasing along `grid` and strictly below 2.
pub fn h_monotonicity_check(p: u32, grid: &[f64]) -> Result<bool, CheckError> {
    if p < 5 {
        return Err(ArgumentError::new(format!("p must be at least 5, got {p}")).into());
    }
    check_grid(grid, 8.0)?;
    if grid.windows(2).any(|w| w[0] == w[1]) {
        return Ok(false);
    }
    certify(
        || format!("h(a) + h(-a) on {grid:?}, p = {p}"),
        |bits| {
            let two = Ball::from_int(2, bits);
            let values = balls(grid, bits).iter().map(|a| h_sum(a, p)).collect::<Result<Vec<_>, _>>()?;
            if values.iter().any(|v| two.strictly_below(v)) {
                return Ok(Some(false));
            }
            let below_two = values.iter().all(|v| v.strictly_below(&two));
            Ok(match chain(&values, Ball::strictly_below) {
                Some(false) => Some(false),
                Some(true) if below_two => Some(true),
                _ => None,
            })
        },
    )
}

/// `g` strictly decreasing along `grid` and `f(x) > 0` at every grid point.
pub fn g_decreasing_check(p: u32, grid: &[f64]) -> Result<bool, CheckError> {
    if p < 5 {
        return Err(ArgumentError::new(format!("p must be at least 5, got {p}")).into());
    }
    check_grid(grid, 2.0)?;
    if grid.windows(2).any(|w| w[0] == w[1]) {
        return Ok(false);
    }
    certify(
        || format!("g decreasing on {grid:?}, p = {p}"),
        |bits| {
            let xs = balls(grid, bits);
            let g = xs.iter().map(|x| g_value(x, p)).collect::<Result<Vec<_>, _>>()?;
            let f = xs.iter().map(|x| f_value(x, p)).collect::<Result<Vec<_>, _>>()?;
            if f.iter().any(Ball::is_negative) {
                return Ok(Some(false));
            }
            let f_positive = f.iter().all(Ball::is_positive);
            Ok(match chain(&g, |a, b| b.strictly_below(a)) {
                Some(false) => Some(false),
                Some(true) if f_positive => Some(true),
                _ => None,
            })
        },
    )
}

/// Certified comparison of the two sides of [`inequality2_sides`].
pub fn inequality2_check(p: u32, alpha: f64) -> Result<bool, CheckError> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(ArgumentError::new(format!("alpha must be positive, got {alpha}")).into());
    }
    certify(
        || format!("inequality at alpha = {alpha}, p = {p}"),
        |bits| {
            let a = Ball::from_f64(alpha, bits).expect("finite alpha");
            let (lhs, rhs) = inequality2_sides(&a, p)?;
            if lhs.strictly_below(&rhs) {
                Ok(Some(true))
            } else if rhs.strictly_below(&lhs) {
                Ok(Some(false))
            } else {
                Ok(None)
            }
        },
    )
}

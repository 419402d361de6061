use serde::{Deserialize, Serialize};

use super::{Ball, Mag};
use crate::error::{ArgumentError, EnclosureError};

/// Precision ladder for adaptive refinement: `initial_bits`,
/// `initial_bits * growth_factor`, ... up to `max_bits`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrecisionPolicy {
    pub initial_bits: u32,
    pub max_bits: u32,
    pub growth_factor: u32,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy { initial_bits: 64, max_bits: 16384, growth_factor: 2 }
    }
}

impl PrecisionPolicy {
    pub fn new(initial_bits: u32, max_bits: u32, growth_factor: u32) -> Result<Self, ArgumentError> {
        let policy = PrecisionPolicy { initial_bits, max_bits, growth_factor };
        policy.validate()?;
        Ok(policy)
    }

    pub fn validate(&self) -> Result<(), ArgumentError> {
        if self.initial_bits == 0 {
            return Err(ArgumentError::new("initial_bits must be positive"));
        }
        if self.initial_bits > self.max_bits {
            return Err(ArgumentError::new(format!(
                "initial_bits {} exceeds max_bits {}",
                self.initial_bits, self.max_bits
            )));
        }
        if self.growth_factor < 2 {
            return Err(ArgumentError::new("growth_factor must be at least 2"));
        }
        Ok(())
    }

    /// The precisions visited by a refinement, in order.
    pub fn ladder(&self) -> impl Iterator<Item = u32> + '_ {
        let mut next = Some(self.initial_bits);
        std::iter::from_fn(move || {
            let cur = next?;
            next = cur
                .checked_mul(self.growth_factor)
                .filter(|&b| b <= self.max_bits)
                .or_else(|| (cur < self.max_bits).then_some(self.max_bits));
            Some(cur)
        })
    }
}

/// A refinement result: the tightest ball found and whether it met the goal.
#[derive(Debug, Clone)]
pub struct Refined {
    pub ball: Ball,
    pub bits: u32,
    pub converged: bool,
}

/// Re-runs `compute` along the precision ladder until `accept` holds.
///
/// Errors from `compute` at one rung are remembered and the ladder continues;
/// if no rung produced a ball the last error is returned.
pub fn refine_until<F, A>(policy: &PrecisionPolicy, mut compute: F, mut accept: A) -> Result<Refined, EnclosureError>
where
    F: FnMut(u32) -> Result<Ball, EnclosureError>,
    A: FnMut(&Ball) -> bool,
{
    policy.validate()?;
    let mut best: Option<(Ball, u32)> = None;
    let mut last_err = None;
    for bits in policy.ladder() {
        match compute(bits) {
            Ok(ball) => {
                if accept(&ball) {
                    return Ok(Refined { ball, bits, converged: true });
                }
                let tighter = best.as_ref().is_none_or(|(b, _)| ball.rad() <= b.rad());
                if tighter {
                    best = Some((ball, bits));
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    match best {
        Some((ball, bits)) => Ok(Refined { ball, bits, converged: false }),
        None => Err(last_err.expect("ladder has at least one rung")),
    }
}

/// Refines until the radius is at most `target_radius`.
///
/// A target of zero is never met by a non-exact ball, so it reports
/// `PrecisionExhausted` unless the computation is exact.
pub fn refine<F>(compute: F, policy: &PrecisionPolicy, target_radius: f64) -> Result<Ball, EnclosureError>
where
    F: FnMut(u32) -> Result<Ball, EnclosureError>,
{
    let target = Mag::from_f64_up(target_radius.max(0.0)).unwrap_or(Mag::ZERO);
    let strict_zero = target_radius <= 0.0;
    let refined = refine_until(policy, compute, |b| if strict_zero { false } else { b.rad() <= target })?;
    if refined.converged {
        Ok(refined.ball)
    } else {
        Err(EnclosureError::PrecisionExhausted { ball: Box::new(refined.ball), bits: refined.bits })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enclosure::Dyadic;

    fn halving(bits: u32) -> Result<Ball, EnclosureError> {
        // radius halves each time the precision doubles
        Ok(Ball::new(Dyadic::from_int(1), Mag::pow2(-(i64::from(bits) / 2)), bits))
    }

    #[test]
    fn ladder_doubles_and_caps() {
        let p = PrecisionPolicy { initial_bits: 64, max_bits: 300, growth_factor: 2 };
        assert_eq!(p.ladder().collect::<Vec<_>>(), vec![64, 128, 256, 300]);
        let d = PrecisionPolicy::default();
        assert_eq!(d.ladder().last(), Some(16384));
    }

    #[test]
    fn converges_at_128_bits() {
        let seen = std::cell::RefCell::new(Vec::new());
        let ball = refine(
            |b| {
                seen.borrow_mut().push(b);
                halving(b)
            },
            &PrecisionPolicy::default(),
            2f64.powi(-64),
        )
        .unwrap();
        assert_eq!(ball.prec(), 128);
        assert_eq!(*seen.borrow(), vec![64, 128]);
    }

    #[test]
    fn zero_target_exhausts() {
        let policy = PrecisionPolicy { initial_bits: 16, max_bits: 256, growth_factor: 2 };
        let err = refine(halving, &policy, 0.0).unwrap_err();
        match err {
            EnclosureError::PrecisionExhausted { ball, bits } => {
                assert_eq!(bits, 256);
                assert!(ball.contains(&Dyadic::from_int(1)));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn invalid_policy() {
        assert!(PrecisionPolicy::new(128, 64, 2).is_err());
        assert!(PrecisionPolicy::new(64, 128, 1).is_err());
    }
}

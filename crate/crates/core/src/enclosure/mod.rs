//! Arbitrary-precision ball arithmetic.
//!
//! Midpoints are exact dyadic rationals on big integers, radii are short
//! upper bounds rounded outward. Nothing here touches hardware rounding modes.

mod ball;
mod dyadic;
mod mag;
mod policy;

pub use ball::Ball;
pub use dyadic::Dyadic;
pub use mag::Mag;
pub use policy::{refine, refine_until, PrecisionPolicy, Refined};

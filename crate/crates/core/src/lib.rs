//! Certified computation around the floor of the reciprocal zeta tail at
//! `s = 1/p` and `s = 2/p`.
//!
//! * [`bigint`]: exact integer roots and perfect-power gaps.
//! * [`enclosure`]: arbitrary-precision ball arithmetic.
//! * [`tail`]: enclosures of `A_{n,s}`, `B_{n,s}`, `zeta_n(s)`.
//! * [`verify`]: per-`n` floor decisions, bound checks and range scans.
//! * [`curve`]: integer points on `C_m` and the exceptional sets.
//! * [`poly`]: exact bivariate polynomials and the monotonicity certificate.

pub mod bigint;
pub mod curve;
pub mod enclosure;
pub mod error;
pub mod poly;
pub mod report;
pub mod scalar;
pub mod tail;
pub mod verify;

pub use bigint::{floor_root, gap_q1, gap_q2, pth_powers_in_open_interval, ExactRational, GapSpec, NonnegInt};
pub use enclosure::{Ball, Dyadic, Mag, PrecisionPolicy};
pub use error::{ArgumentError, CheckError, CurveError, EnclosureError, Undecided};
pub use curve::{curve_points, exceptional_set, phi_injection_check, Curve, CurvePoint, ExceptionRecord};
pub use poly::BivarPoly;
pub use scalar::{Coefficient, Real};
pub use tail::{RationalExponent, TailEnclosure, TailEvaluator, TailKind, TailMethod};
pub use verify::{check_bounds, rhs_floor, scan, verify_identity, BoundCheck, ScanReport, Verdict, VerdictRecord, Verifier};

/// Integer-coefficient polynomial in `(alpha, p)`.
pub type IntPoly = BivarPoly<num_bigint::BigInt>;

/// Rational-coefficient polynomial in `(alpha, p)`.
pub type RatPoly = BivarPoly<num_rational::BigRational>;

/// Quick floating-point evaluation, no guarantees.
pub type Approx = f64;

//! CSV and JSON serialization of results.

use std::io::Write;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::tail::{TailEnclosure, TailKind, TailMethod};
use crate::verify::{Verdict, VerdictRecord};

/// One CSV row of a scan: `n, lhs_floor, rhs_floor, verdict, precision_used`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictRow {
    pub n: u64,
    pub lhs_floor: Option<i64>,
    pub rhs_floor: i64,
    pub verdict: Verdict,
    pub precision_used: u32,
}

impl From<&VerdictRecord> for VerdictRow {
    fn from(r: &VerdictRecord) -> Self {
        VerdictRow {
            n: r.n,
            lhs_floor: r.lhs_floor,
            rhs_floor: r.rhs_floor,
            verdict: r.verdict,
            precision_used: r.precision_used,
        }
    }
}

/// Flat view of a [`TailEnclosure`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailRow {
    pub kind: TailKind,
    pub n: u64,
    pub s: String,
    pub midpoint: f64,
    pub radius: f64,
    pub lower: f64,
    pub upper: f64,
    /// Midpoint with 30 significant digits.
    pub midpoint_text: String,
    pub method: TailMethod,
    pub precision_bits: u32,
}

impl From<&TailEnclosure> for TailRow {
    fn from(e: &TailEnclosure) -> Self {
        let v = &e.value;
        TailRow {
            kind: e.kind,
            n: e.n,
            s: e.s.to_string(),
            midpoint: v.mid_f64(),
            radius: v.radius_f64(),
            lower: v.lower().to_f64(),
            upper: v.upper().to_f64(),
            midpoint_text: decimal_digits(&v.mid().to_rational(), 30),
            method: e.method,
            precision_bits: e.precision_bits,
        }
    }
}

/// `r` in scientific notation with `digits` significant digits, truncated.
pub fn decimal_digits(r: &BigRational, digits: usize) -> String {
    if r.is_zero() {
        return "0".to_string();
    }
    let sign = if r.is_negative() { "-" } else { "" };
    let mut a = r.abs();
    let ten = BigRational::from_integer(BigInt::from(10));
    let one = BigRational::from_integer(BigInt::from(1));
    let mut exp: i64 = 0;
    while a >= ten {
        a /= &ten;
        exp += 1;
    }
    while a < one {
        a *= &ten;
        exp -= 1;
    }
    let scaled = a * BigRational::from_integer(BigInt::from(10).pow(digits as u32 - 1));
    let text = scaled.to_integer().to_string();
    let (head, tail) = text.split_at(1);
    format!("{sign}{head}.{tail}e{exp}")
}

/// Writes `rows` as CSV with a header line.
pub fn write_csv<T: Serialize, W: Write>(rows: &[T], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `rows` as CSV, using `columns` as the header even when `rows` is empty.
pub fn write_csv_with_columns<T: Serialize, W: Write>(rows: &[T], columns: &[&str], out: W) -> Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(columns)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> serde_json::Result<String> {
    serde_json::to_string_pretty(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::CurvePoint;

    #[test]
    fn verdict_csv_columns() {
        let rows = vec![
            VerdictRow { n: 1, lhs_floor: Some(1), rhs_floor: 1, verdict: Verdict::Holds, precision_used: 64 },
            VerdictRow { n: 2, lhs_floor: None, rhs_floor: -2, verdict: Verdict::Undecided, precision_used: 16384 },
        ];
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "n,lhs_floor,rhs_floor,verdict,precision_used\n1,1,1,Holds,64\n2,,-2,Undecided,16384\n");
    }

    #[test]
    fn empty_tables_keep_their_header() {
        let mut buf = Vec::new();
        write_csv_with_columns::<CurvePoint, _>(&[], &["p", "m", "x", "y"], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "p,m,x,y\n");
    }

    #[test]
    fn decimal_rendering() {
        let r = BigRational::new(BigInt::from(-1), BigInt::from(3));
        assert_eq!(decimal_digits(&r, 5), "-3.3333e-1");
        assert_eq!(decimal_digits(&BigRational::from_integer(BigInt::from(1234)), 3), "1.23e3");
    }
}

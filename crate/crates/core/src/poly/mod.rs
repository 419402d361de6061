//! Exact polynomials in two symbols `alpha` and `p`.

mod lemma;
mod monotone;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::scalar::Coefficient;

pub use lemma::{
    expected_coefficients, lemma41_certificate, lemma41_expansion, lemma41_negative_at, lemma41_negativity_check,
    CertificateRow, LemmaCertificate,
};
pub use monotone::{
    exponent_bound_holds, f_value, g_decreasing_check, g_value, h_monotonicity_check, h_sum, h_value,
    inequality2_check, inequality2_sides,
};

/// Exponents `(alpha, p)` of a monomial, ordered graded-lexicographically:
/// total degree first, then the `alpha` degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub alpha: u32,
    pub p: u32,
}

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.alpha + self.p
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.degree(), self.alpha).cmp(&(other.degree(), other.alpha))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BivarPoly<C> {
    terms: BTreeMap<Monomial, C>,
}

impl<C: Coefficient> BivarPoly<C> {
    pub fn zero() -> Self {
        BivarPoly { terms: BTreeMap::new() }
    }

    pub fn constant(c: C) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn one() -> Self {
        Self::constant(C::one())
    }

    pub fn monomial(c: C, alpha: u32, p: u32) -> Self {
        let mut out = Self::zero();
        out.add_term(Monomial { alpha, p }, c);
        out
    }

    /// The symbol `alpha`.
    pub fn alpha() -> Self {
        Self::monomial(C::one(), 1, 0)
    }

    /// The symbol `p`.
    pub fn p() -> Self {
        Self::monomial(C::one(), 0, 1)
    }

    fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&m) {
            Some(old) => {
                let sum = old + c;
                if !sum.is_zero() {
                    self.terms.insert(m, sum);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, alpha: u32, p: u32) -> C {
        self.terms.get(&Monomial { alpha, p }).cloned().unwrap_or_else(C::zero)
    }

    /// Terms in ascending canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (Monomial, &C)> {
        self.terms.iter().map(|(m, c)| (*m, c))
    }

    pub fn degree_alpha(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.alpha).max()
    }

    pub fn degree_p(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.p).max()
    }

    /// Coefficient of `alpha^k` as a polynomial in `p`, dense, lowest degree first.
    pub fn alpha_coefficient(&self, k: u32) -> Vec<C> {
        let top = self.terms.keys().filter(|m| m.alpha == k).map(|m| m.p).max();
        match top {
            None => Vec::new(),
            Some(d) => (0..=d).map(|j| self.coeff(k, j)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut result = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Evaluates after mapping each coefficient into `T`.
    pub fn eval_map<T, F>(&self, alpha: &T, p: &T, one: T, conv: F) -> T
    where
        T: Clone + Add<Output = T> + Mul<Output = T>,
        F: Fn(&C) -> T,
    {
        let max_a = self.degree_alpha().unwrap_or(0) as usize;
        let max_p = self.degree_p().unwrap_or(0) as usize;
        let powers = |x: &T, n: usize| {
            let mut v = Vec::with_capacity(n + 1);
            v.push(one.clone());
            for i in 0..n {
                let next = v[i].clone() * x.clone();
                v.push(next);
            }
            v
        };
        let pa = powers(alpha, max_a);
        let pp = powers(p, max_p);
        let mut acc: Option<T> = None;
        for (m, c) in self.terms() {
            let term = conv(c) * pa[m.alpha as usize].clone() * pp[m.p as usize].clone();
            acc = Some(match acc {
                None => term,
                Some(a) => a + term,
            });
        }
        acc.unwrap_or_else(|| conv(&C::zero()))
    }

    pub fn eval(&self, alpha: &C, p: &C) -> C {
        self.eval_map(alpha, p, C::one(), C::clone)
    }
}

impl<C: Coefficient> Default for BivarPoly<C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Coefficient> Add<&BivarPoly<C>> for &BivarPoly<C> {
    type Output = BivarPoly<C>;
    fn add(self, rhs: &BivarPoly<C>) -> BivarPoly<C> {
        let mut out = self.clone();
        for (m, c) in rhs.terms() {
            out.add_term(m, c.clone());
        }
        out
    }
}

impl<C: Coefficient> Neg for &BivarPoly<C> {
    type Output = BivarPoly<C>;
    fn neg(self) -> BivarPoly<C> {
        BivarPoly { terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect() }
    }
}

impl<C: Coefficient> Sub<&BivarPoly<C>> for &BivarPoly<C> {
    type Output = BivarPoly<C>;
    fn sub(self, rhs: &BivarPoly<C>) -> BivarPoly<C> {
        self + &(-rhs)
    }
}

impl<C: Coefficient> Mul<&BivarPoly<C>> for &BivarPoly<C> {
    type Output = BivarPoly<C>;
    fn mul(self, rhs: &BivarPoly<C>) -> BivarPoly<C> {
        let mut out = BivarPoly::zero();
        for (ma, ca) in self.terms() {
            for (mb, cb) in rhs.terms() {
                let m = Monomial { alpha: ma.alpha + mb.alpha, p: ma.p + mb.p };
                out.add_term(m, ca.clone() * cb.clone());
            }
        }
        out
    }
}

macro_rules! owned_binop {
    ($trait:ident, $method:ident) => {
        impl<C: Coefficient> $trait<BivarPoly<C>> for BivarPoly<C> {
            type Output = BivarPoly<C>;
            fn $method(self, rhs: BivarPoly<C>) -> BivarPoly<C> {
                (&self).$method(&rhs)
            }
        }
        impl<C: Coefficient> $trait<&BivarPoly<C>> for BivarPoly<C> {
            type Output = BivarPoly<C>;
            fn $method(self, rhs: &BivarPoly<C>) -> BivarPoly<C> {
                (&self).$method(rhs)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl<C: Coefficient> Neg for BivarPoly<C> {
    type Output = BivarPoly<C>;
    fn neg(self) -> BivarPoly<C> {
        -&self
    }
}

/// Descending canonical order, e.g. `-8*alpha^19*p^3 + 32*alpha^19 - 4*alpha`.
impl fmt::Display for BivarPoly<BigInt> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if i == 0 {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let mag = c.abs();
            let mut factors = Vec::new();
            if !mag.is_one() || m.degree() == 0 {
                factors.push(mag.to_string());
            }
            for (name, d) in [("alpha", m.alpha), ("p", m.p)] {
                match d {
                    0 => {}
                    1 => factors.push(name.to_string()),
                    _ => factors.push(format!("{name}^{d}")),
                }
            }
            f.write_str(&factors.join("*"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::IntPoly;
    use num_traits::Zero;
    use proptest::prelude::*;

    fn int(v: i64) -> IntPoly {
        IntPoly::constant(BigInt::from(v))
    }

    fn quad(b: i64) -> IntPoly {
        let a = IntPoly::alpha();
        &(&a * &a) + &(&(&int(b) * &a) + &int(3))
    }

    #[test]
    fn difference_of_quadratics() {
        let d = &quad(2) - &quad(-2);
        assert_eq!(d, IntPoly::monomial(BigInt::from(4), 1, 0));
        assert_eq!(d.to_string(), "4*alpha");
    }

    #[test]
    fn square_of_alpha_plus_one() {
        let a = IntPoly::alpha() + int(1);
        let sq = a.pow(2);
        assert_eq!(sq.to_string(), "alpha^2 + 2*alpha + 1");
        assert_eq!(a.pow(0), IntPoly::one());
    }

    #[test]
    fn no_zero_terms_survive() {
        let a = IntPoly::alpha();
        let z = &a - &a;
        assert!(z.is_zero());
        assert_eq!(z.len(), 0);
        assert_eq!(z.to_string(), "0");
    }

    #[test]
    fn graded_order() {
        let poly = IntPoly::p() + IntPoly::alpha() + IntPoly::alpha().pow(2) + int(7) + &IntPoly::alpha() * &IntPoly::p();
        let order: Vec<(u32, u32)> = poly.terms().map(|(m, _)| (m.alpha, m.p)).collect();
        assert_eq!(order, vec![(0, 0), (0, 1), (1, 0), (1, 1), (2, 0)]);
    }

    #[test]
    fn cubic_factor_product_at_p5() {
        // ((p+2) a^2 + (6p+8) a + (3p+6)) * ((p+2) a^2 - (6p+8) a + (3p+6)) at p = 5, a = 8
        let (a, p) = (IntPoly::alpha(), IntPoly::p());
        let lead = &p + &int(2);
        let mid = &(&int(6) * &p) + &int(8);
        let tail = &(&int(3) * &p) + &int(6);
        let plus = &(&(&lead * &a.pow(2)) + &(&mid * &a)) + &tail;
        let minus = &(&(&lead * &a.pow(2)) - &(&mid * &a)) + &tail;
        let prod = &plus.pow(3) * &minus.pow(3);
        let v = prod.eval(&BigInt::from(8), &BigInt::from(5));
        let direct = |s: i64| BigInt::from(7 * 64 + s * 38 * 8 + 21).pow(3);
        assert_eq!(v, direct(1) * direct(-1));
    }

    fn small_poly() -> impl Strategy<Value = IntPoly> {
        prop::collection::vec((0u32..4, 0u32..3, -20i64..20), 0..6).prop_map(|terms| {
            terms
                .into_iter()
                .fold(IntPoly::zero(), |acc, (a, p, c)| acc + IntPoly::monomial(BigInt::from(c), a, p))
        })
    }

    proptest! {
        #[test]
        fn ring_laws(x in small_poly(), y in small_poly(), z in small_poly()) {
            prop_assert_eq!(&x + &y, &y + &x);
            prop_assert_eq!(&x * &y, &y * &x);
            prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
            prop_assert_eq!(&(&x - &y) + &y, x.clone());
            prop_assert!(x.terms().all(|(_, c)| !c.is_zero()));
        }

        #[test]
        fn evaluation_is_a_homomorphism(x in small_poly(), y in small_poly(), a in -9i64..9, p in -9i64..9) {
            let (a, p) = (BigInt::from(a), BigInt::from(p));
            prop_assert_eq!((&x * &y).eval(&a, &p), x.eval(&a, &p) * y.eval(&a, &p));
            prop_assert_eq!((&x - &y).eval(&a, &p), x.eval(&a, &p) - y.eval(&a, &p));
            prop_assert_eq!(x.pow(3).eval(&a, &p), x.eval(&a, &p).pow(3));
        }
    }
}

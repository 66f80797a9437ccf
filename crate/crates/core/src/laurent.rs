//! Integer Laurent polynomials in one variable `t`.
//!
//! Values are kept in canonical sparse form: a map from exponent to a
//! nonzero coefficient. Equality of polynomials is therefore structural.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LaurentError {
    #[error("derivative order must be 1 or 2, got {0}")]
    DerivativeOrder(u32),
    #[error("cannot parse polynomial at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    terms: BTreeMap<i32, BigInt>,
}

fn add_exp(a: i32, b: i32) -> i32 {
    a.checked_add(b).expect("Laurent exponent overflow")
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, 1)
    }

    /// `c * t^k`.
    pub fn monomial(k: i32, c: impl Into<BigInt>) -> Self {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(k, c);
        }
        Self { terms }
    }

    /// `t^k - 1`, the building block of every invariant in this crate.
    pub fn t_pow_minus_one(k: i32) -> Self {
        if k == 0 {
            return Self::zero();
        }
        Self::from_terms([(k, 1), (0, -1)])
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs. Repeated
    /// exponents are summed and zero coefficients dropped.
    pub fn from_terms<I, C>(terms: I) -> Self
    where
        I: IntoIterator<Item = (i32, C)>,
        C: Into<BigInt>,
    {
        let mut map: BTreeMap<i32, BigInt> = BTreeMap::new();
        for (k, c) in terms {
            *map.entry(k).or_default() += c.into();
        }
        map.retain(|_, c| !c.is_zero());
        Self { terms: map }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, k: i32) -> BigInt {
        self.terms.get(&k).cloned().unwrap_or_default()
    }

    /// Nonzero terms in ascending exponent order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i32, &BigInt)> + '_ {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_degree(&self) -> Option<i32> {
        self.terms.keys().next_back().copied()
    }

    pub fn min_degree(&self) -> Option<i32> {
        self.terms.keys().next().copied()
    }

    pub fn scale(&self, c: impl Into<BigInt>) -> Self {
        let c = c.into();
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(k, a)| (*k, a * &c)).collect(),
        }
    }

    /// The substitution `t -> t^{-1}`.
    pub fn invert_var(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.checked_neg().expect("Laurent exponent overflow"), c.clone()))
                .collect(),
        }
    }

    pub fn is_reciprocal(&self) -> bool {
        self.terms
            .iter()
            .all(|(k, c)| self.terms.get(&-k) == Some(c))
    }

    /// Value at `t = 1`, i.e. the sum of the coefficients.
    pub fn eval_at_one(&self) -> BigInt {
        self.terms.values().sum()
    }

    /// First or second derivative evaluated at `t = 1`:
    /// `sum k a_k` or `sum k(k-1) a_k`.
    pub fn derivative_at_one(&self, order: u32) -> Result<BigInt, LaurentError> {
        let weight: fn(i64) -> i64 = match order {
            1 => |k| k,
            2 => |k| k * (k - 1),
            _ => return Err(LaurentError::DerivativeOrder(order)),
        };
        Ok(self
            .terms
            .iter()
            .map(|(k, c)| c * BigInt::from(weight(*k as i64)))
            .sum())
    }

    /// LaTeX rendering, e.g. `t^{2}-2t+1`.
    pub fn to_latex(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (k, c)) in self.terms.iter().rev().enumerate() {
            if c.is_negative() {
                out.push('-');
            } else if i > 0 {
                out.push('+');
            }
            let mag = c.abs();
            if *k == 0 {
                out.push_str(&mag.to_string());
                continue;
            }
            if !mag.is_one() {
                out.push_str(&mag.to_string());
            }
            out.push('t');
            if *k != 1 {
                out.push_str(&format!("^{{{k}}}"));
            }
        }
        out
    }
}

impl fmt::Display for LaurentPoly {
    /// Plain text form, e.g. `t^2 - 2*t + 1` or `t - 2 + t^-1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (k, c)) in self.terms.iter().rev().enumerate() {
            match (i, c.is_negative()) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mag = c.abs();
            match *k {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}*")?;
                    }
                    f.write_str("t")?;
                    if *k != 1 {
                        write!(f, "^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

struct TextParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl TextParser<'_> {
    fn err(&self, msg: &str) -> LaurentError {
        LaurentError::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn digits(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn exponent(&mut self) -> Result<i32, LaurentError> {
        if self.peek() != Some(b'^') {
            return Ok(1);
        }
        self.pos += 1;
        let braced = self.peek() == Some(b'{');
        if braced {
            self.pos += 1;
        }
        let neg = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            Some(b'+') => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        let digits = self.digits();
        let k: i32 = digits
            .ok_or_else(|| self.err("expected exponent"))?
            .parse()
            .map_err(|_| self.err("exponent out of range"))?;
        if braced {
            if self.peek() != Some(b'}') {
                return Err(self.err("expected '}'"));
            }
            self.pos += 1;
        }
        Ok(if neg { -k } else { k })
    }

    fn parse(mut self) -> Result<LaurentPoly, LaurentError> {
        let mut terms: Vec<(i32, BigInt)> = Vec::new();
        let mut first = true;
        loop {
            let negative = match self.peek() {
                None if first => return Err(self.err("empty input")),
                None => break,
                Some(b'+') => {
                    self.pos += 1;
                    false
                }
                Some(b'-') => {
                    self.pos += 1;
                    true
                }
                Some(_) if first => false,
                Some(_) => return Err(self.err("expected '+' or '-'")),
            };
            first = false;
            let mut coeff = match self.digits() {
                Some(d) => Some(d.parse::<BigInt>().unwrap()),
                None => None,
            };
            if coeff.is_some() && self.peek() == Some(b'*') {
                self.pos += 1;
            }
            let exp = if self.peek() == Some(b't') {
                self.pos += 1;
                self.exponent()?
            } else if coeff.is_none() {
                return Err(self.err("expected coefficient or 't'"));
            } else {
                0
            };
            let mut c = coeff.take().unwrap_or_else(BigInt::one);
            if negative {
                c = -c;
            }
            terms.push((exp, c));
        }
        Ok(LaurentPoly::from_terms(terms))
    }
}

impl FromStr for LaurentPoly {
    type Err = LaurentError;

    /// Accepts the plain text form produced by `Display` and the LaTeX form
    /// (`t^{k}` exponents, juxtaposed coefficients).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TextParser { src: s.as_bytes(), pos: 0 }.parse()
    }
}

impl Add<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for LaurentPoly {
    type Output = LaurentPoly;
    fn add(mut self, rhs: LaurentPoly) -> LaurentPoly {
        self += &rhs;
        self
    }
}

impl AddAssign<&LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: &LaurentPoly) {
        for (k, c) in &rhs.terms {
            let e = self.terms.entry(*k).or_default();
            *e += c;
            if e.is_zero() {
                self.terms.remove(k);
            }
        }
    }
}

impl SubAssign<&LaurentPoly> for LaurentPoly {
    fn sub_assign(&mut self, rhs: &LaurentPoly) {
        for (k, c) in &rhs.terms {
            let e = self.terms.entry(*k).or_default();
            *e -= c;
            if e.is_zero() {
                self.terms.remove(k);
            }
        }
    }
}

impl Sub<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for LaurentPoly {
    type Output = LaurentPoly;
    fn sub(mut self, rhs: LaurentPoly) -> LaurentPoly {
        self -= &rhs;
        self
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}

impl Mul<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut terms: BTreeMap<i32, BigInt> = BTreeMap::new();
        for (a, x) in &self.terms {
            for (b, y) in &rhs.terms {
                *terms.entry(add_exp(*a, *b)).or_default() += x * y;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        LaurentPoly { terms }
    }
}

impl Mul for LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: LaurentPoly) -> LaurentPoly {
        &self * &rhs
    }
}

impl std::iter::Sum for LaurentPoly {
    fn sum<I: Iterator<Item = LaurentPoly>>(iter: I) -> Self {
        iter.fold(LaurentPoly::zero(), |acc, p| acc + p)
    }
}

/// Accumulates `coefficient * t^exponent` contributions with machine
/// integers before converting to a [`LaurentPoly`]. Used by the double sums.
#[derive(Default, Debug, Clone)]
pub struct TermAccumulator {
    terms: BTreeMap<i32, i64>,
}

impl TermAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, exponent: i32, coeff: i64) {
        let e = self.terms.entry(exponent).or_insert(0);
        *e = e.checked_add(coeff).expect("coefficient overflow in accumulator");
    }

    /// Adds `coeff * (t^exponent - 1)`.
    pub fn add_shifted(&mut self, exponent: i32, coeff: i64) {
        if exponent != 0 {
            self.add(exponent, coeff);
            self.add(0, -coeff);
        }
    }

    pub fn finish(self) -> LaurentPoly {
        LaurentPoly::from_terms(self.terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> LaurentPoly {
        s.parse().unwrap()
    }

    #[test]
    fn make_canonical() {
        assert_eq!(LaurentPoly::from_terms(Vec::<(i32, i64)>::new()), LaurentPoly::zero());
        let q = LaurentPoly::from_terms([(1, 1), (0, -2), (-1, 1)]);
        assert_eq!(q.to_string(), "t - 2 + t^-1");
        assert_eq!(q.len(), 3);
        assert!(LaurentPoly::from_terms([(2, 1), (2, -1)]).is_zero());
    }

    #[test]
    fn ring_examples() {
        assert!((p("t - 1") + p("1 - t")).is_zero());
        assert_eq!(p("t - 1") * p("t^-1 - 1"), p("-t + 2 - t^-1"));
        assert!((p("t^2 - 1") * LaurentPoly::zero()).is_zero());
        assert_eq!(p("t").scale(-3), p("-3*t"));
    }

    #[test]
    fn invert_and_reciprocal() {
        let q = p("t - 2 + t^-1");
        assert_eq!(q.invert_var(), q);
        assert_eq!(p("t^5 - 1").invert_var(), p("t^-5 - 1"));
        assert!(LaurentPoly::zero().invert_var().is_zero());
        assert!(p("t + t^-1").is_reciprocal());
        assert!(!p("t^2 - 1").is_reciprocal());
    }

    #[test]
    fn derivatives() {
        let q = p("t - 2 + t^-1");
        assert_eq!(q.derivative_at_one(1).unwrap(), BigInt::from(0));
        // 1*0*1 + (-1)(-2)*1 = 2
        assert_eq!(q.derivative_at_one(2).unwrap(), BigInt::from(2));
        assert_eq!(p("t^2 - 1").derivative_at_one(1).unwrap(), BigInt::from(2));
        assert_eq!(q.derivative_at_one(3), Err(LaurentError::DerivativeOrder(3)));
        assert_eq!(q.derivative_at_one(0), Err(LaurentError::DerivativeOrder(0)));
    }

    #[test]
    fn rendering() {
        let q = p("t^2 - 2*t + 1");
        assert_eq!(q.to_string(), "t^2 - 2*t + 1");
        assert_eq!(q.to_latex(), "t^{2}-2t+1");
        assert_eq!(p("-t^-2 + 3").to_string(), "3 - t^-2");
        assert_eq!(p("-t^-2 + 3").to_latex(), "3-t^{-2}");
        assert_eq!(LaurentPoly::zero().to_string(), "0");
        assert_eq!(p("t^{2}-2t+1"), q);
    }

    #[test]
    fn parse_errors() {
        assert!("".parse::<LaurentPoly>().is_err());
        assert!("t^".parse::<LaurentPoly>().is_err());
        assert!("2 3".parse::<LaurentPoly>().is_err());
        assert!("x".parse::<LaurentPoly>().is_err());
    }

    #[test]
    fn accumulator_matches_direct_sum() {
        let mut acc = TermAccumulator::new();
        acc.add_shifted(2, 3);
        acc.add_shifted(-1, -1);
        acc.add_shifted(0, 7);
        let direct = LaurentPoly::t_pow_minus_one(2).scale(3) - LaurentPoly::t_pow_minus_one(-1);
        assert_eq!(acc.finish(), direct);
    }

    fn arb_poly() -> impl Strategy<Value = LaurentPoly> {
        prop::collection::vec((-6i32..=6, -20i64..=20), 0..6).prop_map(LaurentPoly::from_terms)
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a + &LaurentPoly::zero(), a.clone());
            prop_assert_eq!(&a * &LaurentPoly::one(), a.clone());
            prop_assert!((&a - &a).is_zero());
        }

        #[test]
        fn inversion_is_ring_involution(a in arb_poly(), b in arb_poly()) {
            prop_assert_eq!(a.invert_var().invert_var(), a.clone());
            prop_assert_eq!((&a * &b).invert_var(), &a.invert_var() * &b.invert_var());
            prop_assert_eq!((&a + &b).invert_var(), &a.invert_var() + &b.invert_var());
            prop_assert_eq!(
                a.derivative_at_one(1).unwrap(),
                -a.invert_var().derivative_at_one(1).unwrap()
            );
        }

        #[test]
        fn text_round_trip(a in arb_poly()) {
            prop_assert_eq!(a.to_string().parse::<LaurentPoly>().unwrap(), a.clone());
            prop_assert_eq!(a.to_latex().parse::<LaurentPoly>().unwrap(), a);
        }
    }
}

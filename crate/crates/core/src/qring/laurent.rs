//! Laurent polynomials in `q^{1/2}` with exact coefficients.
//!
//! Exponents are stored in half-steps: the key `h` stands for `q^{h/2}`.
//! Integer powers of `q` therefore use even keys only, and the half-integer
//! powers needed by `q^{-N/2}`-type operators live in the same ring.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalar::Coefficient;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentPoly<C> {
    // half-step exponent -> nonzero coefficient
    terms: BTreeMap<i64, C>,
}

impl<C: Coefficient> LaurentPoly<C> {
    pub fn constant(c: C) -> Self {
        Self::half_monomial(c, 0)
    }

    /// `c * q^exp`.
    pub fn monomial(c: C, exp: i64) -> Self {
        Self::half_monomial(c, 2 * exp)
    }

    /// `c * q^{half/2}`.
    pub fn half_monomial(c: C, half: i64) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(half, c);
        }
        Self { terms }
    }

    /// The indeterminate `q`.
    pub fn q() -> Self {
        Self::q_pow(1)
    }

    pub fn q_pow(exp: i64) -> Self {
        Self::monomial(C::one(), exp)
    }

    pub fn q_half_pow(half: i64) -> Self {
        Self::half_monomial(C::one(), half)
    }

    pub fn from_half_terms<I: IntoIterator<Item = (i64, C)>>(iter: I) -> Self {
        let mut p = Self::zero();
        for (h, c) in iter {
            p.add_term(h, c);
        }
        p
    }

    /// Terms in ascending exponent order as `(half_exponent, coefficient)`.
    pub fn half_terms(&self) -> impl Iterator<Item = (i64, &C)> + '_ {
        self.terms.iter().map(|(h, c)| (*h, c))
    }

    pub fn nterms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff_half(&self, half: i64) -> C {
        self.terms.get(&half).cloned().unwrap_or_else(C::zero)
    }

    pub fn lowest_half(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn highest_half(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// `Some((half, c))` when the polynomial is the single term `c q^{half/2}`.
    pub fn as_monomial(&self) -> Option<(i64, &C)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(h, c)| (*h, c))
        } else {
            None
        }
    }

    /// Multiplies by `q^{half/2}`.
    pub fn shift_half(&self, half: i64) -> Self {
        Self {
            terms: self.terms.iter().map(|(h, c)| (h + half, c.clone())).collect(),
        }
    }

    /// Inverse of a monomial; `None` for anything else.
    pub fn monomial_inverse(&self) -> Option<Self> {
        let (h, c) = self.as_monomial()?;
        Some(Self::half_monomial(C::one() / c.clone(), -h))
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self
                .terms
                .iter()
                .map(|(h, v)| (*h, v.clone() * c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Value at `q = 1`, i.e. the coefficient sum.
    pub fn at_one(&self) -> C {
        self.terms.values().cloned().fold(C::zero(), |a, b| a + b)
    }

    pub fn map_coeffs<D: Coefficient, F: Fn(&C) -> D>(&self, f: F) -> LaurentPoly<D> {
        LaurentPoly::from_half_terms(self.terms.iter().map(|(h, c)| (*h, f(c))))
    }

    fn add_term(&mut self, half: i64, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&half) {
            Some(v) => {
                let s = v.clone() + c;
                if s.is_zero() {
                    self.terms.remove(&half);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(half, c);
            }
        }
    }

    /// Exact quotient `self / divisor` by long division on the leading term.
    ///
    /// Fails with [`Error::NonIntegralQuotient`] when the remainder does not
    /// vanish.
    pub fn exact_div(&self, divisor: &Self) -> Result<Self> {
        let (b_hi, b_lead) = match divisor.terms.iter().next_back() {
            Some((h, c)) => (*h, c.clone()),
            None => return Err(Error::DivisionByZero),
        };
        let b_lo = divisor.lowest_half().unwrap_or(b_hi);
        let a_lo = match self.lowest_half() {
            Some(h) => h,
            None => return Ok(Self::zero()),
        };
        // any exact quotient has all exponents >= a_lo - b_lo
        let floor = a_lo - b_lo;
        let mut rem = self.clone();
        let mut quot = Self::zero();
        while let Some((&a_hi, a_lead)) = rem.terms.iter().next_back() {
            let h = a_hi - b_hi;
            if h < floor {
                return Err(Error::NonIntegralQuotient);
            }
            let c = a_lead.clone() / b_lead.clone();
            if c.clone() * b_lead.clone() != *a_lead {
                return Err(Error::NonIntegralQuotient);
            }
            let term = Self::half_monomial(c.clone(), h);
            rem = &rem - &(&term * divisor);
            quot.add_term(h, c);
        }
        Ok(quot)
    }
}

impl<C: Coefficient + ToPrimitive> LaurentPoly<C> {
    /// Numeric value at `q = q0 > 0`.
    pub fn eval(&self, q0: f64) -> f64 {
        self.terms
            .iter()
            .map(|(h, c)| {
                let c = c.to_f64().unwrap_or(f64::NAN);
                let p = if h % 2 == 0 {
                    q0.powi((h / 2) as i32)
                } else {
                    q0.powf(*h as f64 / 2.0)
                };
                c * p
            })
            .sum()
    }
}

impl<C: Coefficient> Zero for LaurentPoly<C> {
    fn zero() -> Self {
        Self {
            terms: BTreeMap::new(),
        }
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl<C: Coefficient> One for LaurentPoly<C> {
    fn one() -> Self {
        Self::constant(C::one())
    }
}

impl<'a, C: Coefficient> Add<&'a LaurentPoly<C>> for &'a LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn add(self, rhs: &'a LaurentPoly<C>) -> LaurentPoly<C> {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<'a, C: Coefficient> Sub<&'a LaurentPoly<C>> for &'a LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn sub(self, rhs: &'a LaurentPoly<C>) -> LaurentPoly<C> {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<'a, C: Coefficient> Mul<&'a LaurentPoly<C>> for &'a LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn mul(self, rhs: &'a LaurentPoly<C>) -> LaurentPoly<C> {
        let mut out = LaurentPoly::zero();
        for (ha, ca) in &self.terms {
            for (hb, cb) in &rhs.terms {
                out.add_term(ha + hb, ca.clone() * cb.clone());
            }
        }
        out
    }
}

impl<C: Coefficient> AddAssign<&LaurentPoly<C>> for LaurentPoly<C> {
    fn add_assign(&mut self, rhs: &LaurentPoly<C>) {
        for (h, c) in &rhs.terms {
            self.add_term(*h, c.clone());
        }
    }
}

impl<C: Coefficient> SubAssign<&LaurentPoly<C>> for LaurentPoly<C> {
    fn sub_assign(&mut self, rhs: &LaurentPoly<C>) {
        for (h, c) in &rhs.terms {
            self.add_term(*h, C::zero() - c.clone());
        }
    }
}

impl<C: Coefficient> Add for LaurentPoly<C> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self += &rhs;
        self
    }
}

impl<C: Coefficient> Sub for LaurentPoly<C> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        self -= &rhs;
        self
    }
}

impl<C: Coefficient> Mul for LaurentPoly<C> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

impl<C: Coefficient> Neg for LaurentPoly<C> {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            terms: self.terms.into_iter().map(|(h, c)| (h, C::zero() - c)).collect(),
        }
    }
}

fn fmt_half(h: i64) -> String {
    if h % 2 == 0 {
        (h / 2).to_string()
    } else {
        format!("{h}/2")
    }
}

/// `coeff*q^exp` terms in ascending exponent order joined by ` + `;
/// half-integer exponents print as `h/2`. The zero polynomial prints `0`.
impl<C: Coefficient + fmt::Display> fmt::Display for LaurentPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(h, c)| format!("{}*q^{}", c, fmt_half(*h)))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl<C: Coefficient + fmt::Display> fmt::Debug for LaurentPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

impl<C: Coefficient + FromStr> FromStr for LaurentPoly<C> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "0" {
            return Ok(Self::zero());
        }
        let mut out = Self::zero();
        for term in s.split(" + ") {
            let (c, e) = term
                .split_once("*q^")
                .ok_or_else(|| Error::Parse(format!("bad term `{term}`")))?;
            let c: C = c
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad coefficient `{c}`")))?;
            let half = match e.split_once('/') {
                Some((num, "2")) => num.parse::<i64>().ok(),
                Some(_) => None,
                None => e.parse::<i64>().ok().map(|v| 2 * v),
            }
            .ok_or_else(|| Error::Parse(format!("bad exponent `{e}`")))?;
            out.add_term(half, c);
        }
        Ok(out)
    }
}

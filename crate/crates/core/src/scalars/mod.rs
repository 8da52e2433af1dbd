//! Exact arithmetic in Q(v) with v = q^{1/2}, so q = v^2 and q̲ = q^2 = v^4,
//! plus polynomials in the level symbol `c`.

mod level;
pub mod modgcd;
pub mod poly;

pub use level::LevelPoly;
pub use poly::IntPoly;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("denominator vanishes under substitution v -> v^{0}")]
    DenominatorVanishes(i64),
    #[error("cannot parse scalar: {0}")]
    Parse(String),
}

/// Canonical fraction `num/den` of integer polynomials in `v`:
/// gcd(num, den) = 1 in Z[v] and the leading coefficient of `den` is positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Scalar {
    num: IntPoly,
    den: IntPoly,
}

fn div_poly(a: &IntPoly, g: &IntPoly) -> IntPoly {
    if g.is_one() {
        return a.clone();
    }
    a.div_exact(g).expect("gcd must divide")
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar { num: IntPoly::zero(), den: IntPoly::one() }
    }

    pub fn one() -> Self {
        Scalar { num: IntPoly::one(), den: IntPoly::one() }
    }

    pub fn from_int<T: Into<BigInt>>(x: T) -> Self {
        Scalar { num: IntPoly::constant(x.into()), den: IntPoly::one() }
    }

    pub fn ratio<T: Into<BigInt>>(n: T, d: T) -> Self {
        Self::new(IntPoly::constant(n.into()), IntPoly::constant(d.into())).expect("nonzero denominator")
    }

    /// `v^e` for any integer `e`.
    pub fn v_pow(e: i64) -> Self {
        if e >= 0 {
            Scalar { num: IntPoly::monomial(BigInt::one(), e as usize), den: IntPoly::one() }
        } else {
            Scalar { num: IntPoly::one(), den: IntPoly::monomial(BigInt::one(), (-e) as usize) }
        }
    }

    /// `q^e = v^{2e}`.
    pub fn q_pow(e: i64) -> Self {
        Self::v_pow(2 * e)
    }

    /// `q̲^e = v^{4e}`.
    pub fn qbar_pow(e: i64) -> Self {
        Self::v_pow(4 * e)
    }

    /// Laurent polynomial `Σ c v^e` from `(e, c)` pairs.
    pub fn laurent(terms: &[(i64, i64)]) -> Self {
        terms
            .iter()
            .fold(Scalar::zero(), |acc, &(e, c)| acc + Scalar::v_pow(e) * Scalar::from_int(c))
    }

    /// Laurent polynomial from a map exponent -> coefficient.
    pub fn from_laurent<I: IntoIterator<Item = (i64, BigInt)>>(terms: I) -> Self {
        let mut m: std::collections::BTreeMap<i64, BigInt> = std::collections::BTreeMap::new();
        for (e, c) in terms {
            *m.entry(e).or_default() += c;
        }
        m.retain(|_, c| !c.is_zero());
        let Some((&lo, _)) = m.iter().next() else {
            return Scalar::zero();
        };
        let hi = *m.keys().next_back().unwrap();
        let mut c = vec![BigInt::zero(); (hi - lo) as usize + 1];
        for (e, x) in m {
            c[(e - lo) as usize] = x;
        }
        let body = IntPoly::from_coeffs(c);
        if lo >= 0 {
            Scalar { num: body.shl(lo as usize), den: IntPoly::one() }
        } else {
            Scalar { num: body, den: IntPoly::monomial(BigInt::one(), (-lo) as usize) }
        }
    }

    pub fn new(num: IntPoly, den: IntPoly) -> Result<Self, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Self::canonical(num, den))
    }

    fn canonical(num: IntPoly, den: IntPoly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let g = modgcd::gcd(&num, &den);
        let mut n = div_poly(&num, &g);
        let mut d = div_poly(&den, &g);
        if d.lc().is_negative() {
            n = n.neg();
            d = d.neg();
        }
        Scalar { num: n, den: d }
    }

    pub fn numer(&self) -> &IntPoly {
        &self.num
    }

    pub fn denom(&self) -> &IntPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// Multiplicative inverse.
    pub fn inv(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        let (n, d) = if self.num.lc().is_negative() {
            (self.den.neg(), self.num.neg())
        } else {
            (self.den.clone(), self.num.clone())
        };
        Ok(Scalar { num: n, den: d })
    }

    pub fn checked_div(&self, o: &Self) -> Result<Self, ScalarError> {
        Ok(self * &o.inv()?)
    }

    pub fn pow(&self, e: i64) -> Self {
        if e < 0 {
            return self.inv().expect("negative power of zero").pow(-e);
        }
        let mut base = self.clone();
        let mut acc = Scalar::one();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Replace `v` by `v^k`.
    pub fn substitute_power(&self, k: i64) -> Result<Self, ScalarError> {
        if k == 0 {
            let d = self.den.eval_one();
            if d.is_zero() {
                return Err(ScalarError::DenominatorVanishes(0));
            }
            return Ok(Scalar::new(IntPoly::constant(self.num.eval_one()), IntPoly::constant(d)).unwrap());
        }
        let m = k.unsigned_abs() as usize;
        let n = self.num.compose_power(m);
        let d = self.den.compose_power(m);
        if k > 0 {
            return Ok(Self::canonical(n, d));
        }
        // p(v^{-m}) = v^{-m deg p} rev(p)(v^m)
        let shift = m as i64 * (self.den.deg() as i64 - self.num.deg() as i64);
        let rn = self.num.reversed().compose_power(m);
        let rd = self.den.reversed().compose_power(m);
        Ok(Self::canonical(rn, rd) * Scalar::v_pow(shift))
    }

    /// Laurent coefficients when the denominator is a pure power of `v`.
    pub fn as_laurent(&self) -> Option<Vec<(i64, BigInt)>> {
        if !self.den.is_monomial() || !self.den.lc().is_one() {
            return None;
        }
        let shift = self.den.deg() as i64;
        Some(
            self.num
                .coeffs()
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (i as i64 - shift, c.clone()))
                .collect(),
        )
    }

    /// Integer value when the scalar is a constant integer.
    pub fn as_integer(&self) -> Option<BigInt> {
        if self.den.is_one() && self.num.deg() == 0 {
            Some(self.num.coeffs().first().cloned().unwrap_or_default())
        } else {
            None
        }
    }

    /// Specialize `v` to an integer, if the denominator does not vanish there.
    pub fn eval_int(&self, v: i64) -> Option<(BigInt, BigInt)> {
        let ev = |p: &IntPoly| {
            let x = BigInt::from(v);
            p.coeffs().iter().rev().fold(BigInt::zero(), |acc, c| acc * &x + c)
        };
        let d = ev(&self.den);
        if d.is_zero() {
            return None;
        }
        let n = ev(&self.num);
        let g = n.gcd(&d);
        let (mut n, mut d) = (n / &g, d / &g);
        if d.is_negative() {
            n = -n;
            d = -d;
        }
        Some((n, d))
    }

    fn add_impl(&self, o: &Self, negate: bool) -> Self {
        if o.is_zero() {
            return self.clone();
        }
        let on = if negate { o.num.neg() } else { o.num.clone() };
        if self.is_zero() {
            return Scalar { num: on, den: o.den.clone() };
        }
        if self.den.is_one() && o.den.is_one() {
            return Scalar { num: self.num.add(&on), den: IntPoly::one() };
        }
        if self.den == o.den {
            return Self::canonical(self.num.add(&on), self.den.clone());
        }
        let g = modgcd::gcd(&self.den, &o.den);
        let bg = div_poly(&self.den, &g);
        let dg = div_poly(&o.den, &g);
        let n = self.num.mul(&dg).add(&on.mul(&bg));
        if n.is_zero() {
            return Self::zero();
        }
        let den = bg.mul(&o.den);
        if g.is_one() {
            return Scalar { num: n, den };
        }
        let g2 = modgcd::gcd(&n, &g);
        Scalar { num: div_poly(&n, &g2), den: div_poly(&den, &g2) }
    }

    fn mul_impl(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        if self.den.is_one() && o.den.is_one() {
            return Scalar { num: self.num.mul(&o.num), den: IntPoly::one() };
        }
        let g1 = modgcd::gcd(&self.num, &o.den);
        let g2 = modgcd::gcd(&o.num, &self.den);
        let n = div_poly(&self.num, &g1).mul(&div_poly(&o.num, &g2));
        let d = div_poly(&self.den, &g2).mul(&div_poly(&o.den, &g1));
        Scalar { num: n, den: d }
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |p: &IntPoly| {
            if p.term_count() > 1 {
                format!("({})", p)
            } else {
                p.to_string()
            }
        };
        write!(f, "{}/{}", wrap(&self.num), wrap(&self.den))
    }
}

fn parse_poly(s: &str) -> Result<IntPoly, ScalarError> {
    let err = || ScalarError::Parse(s.to_string());
    let s = s.trim();
    let s = s.strip_prefix('(').and_then(|t| t.strip_suffix(')')).unwrap_or(s);
    if s == "0" {
        return Ok(IntPoly::zero());
    }
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut cur = String::new();
    let mut neg = false;
    for (i, ch) in s.chars().enumerate() {
        if (ch == '+' || ch == '-') && !(i > 0 && cur.ends_with('^')) {
            if i > 0 {
                terms.push((neg, std::mem::take(&mut cur)));
            }
            neg = ch == '-';
        } else if !ch.is_whitespace() {
            cur.push(ch);
        }
    }
    terms.push((neg, cur));
    let mut acc = IntPoly::zero();
    for (neg, t) in terms {
        if t.is_empty() {
            return Err(err());
        }
        let (coef, pow) = if let Some(idx) = t.find('v') {
            let head = t[..idx].trim_end_matches('*');
            let coef = if head.is_empty() { BigInt::one() } else { BigInt::from_str(head).map_err(|_| err())? };
            let tail = &t[idx + 1..];
            let pow = if tail.is_empty() {
                1
            } else {
                tail.strip_prefix('^').ok_or_else(err)?.parse::<usize>().map_err(|_| err())?
            };
            (coef, pow)
        } else {
            (BigInt::from_str(&t).map_err(|_| err())?, 0)
        };
        let coef = if neg { -coef } else { coef };
        acc = acc.add(&IntPoly::monomial(coef, pow));
    }
    Ok(acc)
}

impl FromStr for Scalar {
    type Err = ScalarError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut depth = 0i32;
        let mut split = None;
        for (i, ch) in s.char_indices() {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                '/' if depth == 0 => split = Some(i),
                _ => {}
            }
        }
        let (n, d) = match split {
            Some(i) => (parse_poly(&s[..i])?, parse_poly(&s[i + 1..])?),
            None => (parse_poly(s)?, IntPoly::one()),
        };
        Scalar::new(n, d)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, o: &Scalar) -> Scalar {
                $body(self, o)
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar {
                $body(&self, &o)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: &Scalar) -> Scalar {
                $body(&self, o)
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar {
                $body(self, &o)
            }
        }
    };
}

binop!(Add, add, |a: &Scalar, b: &Scalar| a.add_impl(b, false));
binop!(Sub, sub, |a: &Scalar, b: &Scalar| a.add_impl(b, true));
binop!(Mul, mul, |a: &Scalar, b: &Scalar| a.mul_impl(b));
binop!(Div, div, |a: &Scalar, b: &Scalar| a.checked_div(b).expect("division by zero"));

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, o: &Scalar) {
        *self = self.add_impl(o, false);
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, o: &Scalar) {
        *self = self.add_impl(o, true);
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, o: &Scalar) {
        *self = self.mul_impl(o);
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { num: self.num.neg(), den: self.den }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { num: self.num.neg(), den: self.den.clone() }
    }
}

impl From<i64> for Scalar {
    fn from(x: i64) -> Self {
        Scalar::from_int(x)
    }
}

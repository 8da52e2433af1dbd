//! Dense integer polynomials in `v` (ascending coefficients).
//!
//! Coefficients are stored as machine words while they fit and as big integers otherwise;
//! every operation returns the canonical representation.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::borrow::Cow;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Repr {
    Small(Vec<i64>),
    Big(Vec<BigInt>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntPoly {
    r: Repr,
}

impl Default for IntPoly {
    fn default() -> Self {
        Self::zero()
    }
}

fn fits(x: i128) -> bool {
    x > i64::MIN as i128 && x <= i64::MAX as i128
}

fn small_of(x: &BigInt) -> Option<i64> {
    x.to_i64().filter(|&s| s != i64::MIN)
}

impl IntPoly {
    fn from_small(mut c: Vec<i64>) -> Self {
        while c.last() == Some(&0) {
            c.pop();
        }
        IntPoly { r: Repr::Small(c) }
    }

    fn from_wide(mut c: Vec<i128>) -> Self {
        while c.last() == Some(&0) {
            c.pop();
        }
        if c.iter().all(|&x| fits(x)) {
            IntPoly { r: Repr::Small(c.into_iter().map(|x| x as i64).collect()) }
        } else {
            IntPoly { r: Repr::Big(c.into_iter().map(BigInt::from).collect()) }
        }
    }

    fn small(&self) -> Option<&[i64]> {
        match &self.r {
            Repr::Small(c) => Some(c),
            Repr::Big(_) => None,
        }
    }

    fn big(&self) -> Cow<'_, [BigInt]> {
        match &self.r {
            Repr::Small(c) => Cow::Owned(c.iter().map(|&x| BigInt::from(x)).collect()),
            Repr::Big(c) => Cow::Borrowed(c),
        }
    }

    fn len(&self) -> usize {
        match &self.r {
            Repr::Small(c) => c.len(),
            Repr::Big(c) => c.len(),
        }
    }

    fn is_zero_at(&self, i: usize) -> bool {
        match &self.r {
            Repr::Small(c) => c[i] == 0,
            Repr::Big(c) => c[i].is_zero(),
        }
    }

    pub fn zero() -> Self {
        IntPoly { r: Repr::Small(Vec::new()) }
    }

    pub fn one() -> Self {
        IntPoly { r: Repr::Small(vec![1]) }
    }

    pub fn constant(x: BigInt) -> Self {
        Self::from_coeffs(vec![x])
    }

    pub fn monomial(coef: BigInt, deg: usize) -> Self {
        if coef.is_zero() {
            return Self::zero();
        }
        if let Some(k) = small_of(&coef) {
            let mut c = vec![0i64; deg + 1];
            c[deg] = k;
            return IntPoly { r: Repr::Small(c) };
        }
        let mut c = vec![BigInt::zero(); deg + 1];
        c[deg] = coef;
        IntPoly { r: Repr::Big(c) }
    }

    pub fn from_coeffs(mut c: Vec<BigInt>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        let small: Option<Vec<i64>> = c.iter().map(small_of).collect();
        match small {
            Some(s) => IntPoly { r: Repr::Small(s) },
            None => IntPoly { r: Repr::Big(c) },
        }
    }

    pub fn from_i64s(c: &[i64]) -> Self {
        Self::from_coeffs(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn coeffs(&self) -> Vec<BigInt> {
        self.big().into_owned()
    }

    /// Images of the coefficients modulo `p`.
    pub fn residues(&self, p: u64) -> Vec<u64> {
        match &self.r {
            Repr::Small(c) => c.iter().map(|&x| (x as i128).rem_euclid(p as i128) as u64).collect(),
            Repr::Big(c) => {
                let pb = BigInt::from(p);
                c.iter().map(|x| x.mod_floor(&pb).to_u64().unwrap()).collect()
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.len() == 0
    }

    pub fn is_one(&self) -> bool {
        matches!(&self.r, Repr::Small(c) if c.len() == 1 && c[0] == 1)
    }

    /// Degree; zero polynomial reports 0.
    pub fn deg(&self) -> usize {
        self.len().saturating_sub(1)
    }

    pub fn lc(&self) -> BigInt {
        assert!(!self.is_zero(), "leading coefficient of zero polynomial");
        match &self.r {
            Repr::Small(c) => BigInt::from(*c.last().unwrap()),
            Repr::Big(c) => c.last().unwrap().clone(),
        }
    }

    fn lc_negative(&self) -> bool {
        match &self.r {
            Repr::Small(c) => c.last().is_some_and(|&x| x < 0),
            Repr::Big(c) => c.last().is_some_and(|x| x.is_negative()),
        }
    }

    pub fn valuation(&self) -> usize {
        (0..self.len()).position(|i| !self.is_zero_at(i)).unwrap_or(0)
    }

    pub fn is_monomial(&self) -> bool {
        !self.is_zero() && self.valuation() == self.deg()
    }

    pub fn content(&self) -> BigInt {
        match &self.r {
            Repr::Small(c) => {
                let mut g = 0u64;
                for &x in c {
                    if x != 0 {
                        g = g.gcd(&x.unsigned_abs());
                        if g == 1 {
                            break;
                        }
                    }
                }
                BigInt::from(g)
            }
            Repr::Big(c) => {
                let mut g = BigInt::zero();
                for x in c {
                    if x.is_zero() {
                        continue;
                    }
                    g = g.gcd(x);
                    if g.is_one() {
                        break;
                    }
                }
                g
            }
        }
    }

    pub fn neg(&self) -> Self {
        match &self.r {
            Repr::Small(c) => IntPoly { r: Repr::Small(c.iter().map(|x| -x).collect()) },
            Repr::Big(c) => Self::from_coeffs(c.iter().map(|x| -x).collect()),
        }
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        if let (Some(c), Some(k)) = (self.small(), small_of(k)) {
            return Self::from_wide(c.iter().map(|&x| x as i128 * k as i128).collect());
        }
        Self::from_coeffs(self.big().iter().map(|x| x * k).collect())
    }

    pub fn div_int_exact(&self, k: &BigInt) -> Self {
        if k.is_one() {
            return self.clone();
        }
        if let (Some(c), Some(k)) = (self.small(), small_of(k)) {
            return Self::from_small(c.iter().map(|x| x / k).collect());
        }
        Self::from_coeffs(self.big().iter().map(|x| x / k).collect())
    }

    /// Multiply by `v^k`.
    pub fn shl(&self, k: usize) -> Self {
        if self.is_zero() || k == 0 {
            return self.clone();
        }
        match &self.r {
            Repr::Small(c) => {
                let mut out = vec![0i64; k];
                out.extend_from_slice(c);
                IntPoly { r: Repr::Small(out) }
            }
            Repr::Big(c) => {
                let mut out = vec![BigInt::zero(); k];
                out.extend(c.iter().cloned());
                IntPoly { r: Repr::Big(out) }
            }
        }
    }

    /// Divide by `v^k`; the caller guarantees `k <= valuation`.
    pub fn shr(&self, k: usize) -> Self {
        if k == 0 {
            return self.clone();
        }
        match &self.r {
            Repr::Small(c) => IntPoly { r: Repr::Small(c[k..].to_vec()) },
            Repr::Big(c) => IntPoly { r: Repr::Big(c[k..].to_vec()) },
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        self.combine(o, false)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.combine(o, true)
    }

    fn combine(&self, o: &Self, negate: bool) -> Self {
        let n = self.len().max(o.len());
        if let (Some(a), Some(b)) = (self.small(), o.small()) {
            let mut c = vec![0i64; n];
            c[..a.len()].copy_from_slice(a);
            let ok = b.iter().enumerate().all(|(i, &y)| {
                let r = if negate { c[i].checked_sub(y) } else { c[i].checked_add(y) };
                match r {
                    Some(r) if r != i64::MIN => {
                        c[i] = r;
                        true
                    }
                    _ => false,
                }
            });
            if ok {
                return Self::from_small(c);
            }
            let mut c = vec![0i128; n];
            for (i, &x) in a.iter().enumerate() {
                c[i] = x as i128;
            }
            for (i, &y) in b.iter().enumerate() {
                if negate {
                    c[i] -= y as i128;
                } else {
                    c[i] += y as i128;
                }
            }
            return Self::from_wide(c);
        }
        let (a, b) = (self.big(), o.big());
        let mut c = vec![BigInt::zero(); n];
        for (i, x) in a.iter().enumerate() {
            c[i] = x.clone();
        }
        for (i, y) in b.iter().enumerate() {
            if negate {
                c[i] -= y;
            } else {
                c[i] += y;
            }
        }
        Self::from_coeffs(c)
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        if let (Some(a), Some(b)) = (self.small(), o.small()) {
            if let Some(r) = mul_words(a, b) {
                return Self::from_small(r);
            }
            if let Some(r) = mul_small(a, b) {
                return Self::from_wide(r);
            }
        }
        let (a, b) = (self.big(), o.big());
        if a.len() == 1 {
            return o.scale(&a[0]);
        }
        if b.len() == 1 {
            return self.scale(&b[0]);
        }
        let mut r = vec![BigInt::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                r[i + j] += x * y;
            }
        }
        Self::from_coeffs(r)
    }

    /// Exact quotient in `Z[v]`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        assert!(!d.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(Self::zero());
        }
        if self.len() < d.len() {
            return None;
        }
        if let (Some(a), Some(b)) = (self.small(), d.small()) {
            match div_small(a, b) {
                Ok(q) => return q.map(Self::from_wide),
                Err(Overflow) => {}
            }
        }
        let (a, dc) = (self.big(), d.big());
        if dc.len() == 1 {
            let k = &dc[0];
            let mut out = Vec::with_capacity(a.len());
            for x in a.iter() {
                let (q, r) = x.div_rem(k);
                if !r.is_zero() {
                    return None;
                }
                out.push(q);
            }
            return Some(Self::from_coeffs(out));
        }
        let dd = d.deg();
        let mut rem = a.into_owned();
        let n = rem.len() - dc.len() + 1;
        let mut q = vec![BigInt::zero(); n];
        let lc = dc.last().unwrap();
        for i in (0..n).rev() {
            let top = &rem[i + dd];
            if top.is_zero() {
                continue;
            }
            let (t, r) = top.div_rem(lc);
            if !r.is_zero() {
                return None;
            }
            for (j, y) in dc.iter().enumerate() {
                if !y.is_zero() {
                    rem[i + j] -= &t * y;
                }
            }
            q[i] = t;
        }
        if rem.iter().any(|x| !x.is_zero()) {
            return None;
        }
        Some(Self::from_coeffs(q))
    }

    /// Substitute `v -> v^k` for `k >= 1`.
    pub fn compose_power(&self, k: usize) -> Self {
        assert!(k >= 1);
        if k == 1 || self.len() <= 1 {
            return self.clone();
        }
        let a = self.big();
        let mut c = vec![BigInt::zero(); self.deg() * k + 1];
        for (i, x) in a.iter().enumerate() {
            c[i * k] = x.clone();
        }
        Self::from_coeffs(c)
    }

    /// Coefficients in reverse order, i.e. `v^deg * p(1/v)` (valuation must be 0 for an involution).
    pub fn reversed(&self) -> Self {
        let mut c = self.coeffs();
        c.reverse();
        Self::from_coeffs(c)
    }

    pub fn eval_one(&self) -> BigInt {
        self.big().iter().sum()
    }

    pub fn fmt_ascending(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, x) in self.big().iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let neg = x.is_negative();
            let a = x.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { "-" } else { "+" })?;
            }
            first = false;
            match (i, a.is_one()) {
                (0, _) => write!(f, "{}", a)?,
                (1, true) => write!(f, "v")?,
                (1, false) => write!(f, "{}*v", a)?,
                (_, true) => write!(f, "v^{}", i)?,
                (_, false) => write!(f, "{}*v^{}", a, i)?,
            }
        }
        Ok(())
    }

    pub fn term_count(&self) -> usize {
        (0..self.len()).filter(|&i| !self.is_zero_at(i)).count()
    }

    pub(crate) fn lc_is_negative(&self) -> bool {
        self.lc_negative()
    }
}

struct Overflow;

fn mul_small(a: &[i64], b: &[i64]) -> Option<Vec<i128>> {
    let bn: Vec<(usize, i128)> = b.iter().enumerate().filter(|(_, &y)| y != 0).map(|(j, &y)| (j, y as i128)).collect();
    let mut r = vec![0i128; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        let x = x as i128;
        for &(j, y) in &bn {
            r[i + j] = r[i + j].checked_add(x * y)?;
        }
    }
    Some(r)
}

/// Product in machine words, or `None` if any partial sum leaves `i64`.
fn mul_words(a: &[i64], b: &[i64]) -> Option<Vec<i64>> {
    let bn: Vec<(usize, i64)> = b.iter().enumerate().filter(|(_, &y)| y != 0).map(|(j, &y)| (j, y)).collect();
    let mut r = vec![0i64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for &(j, y) in &bn {
            r[i + j] = r[i + j].checked_add(x.checked_mul(y)?)?;
        }
    }
    if r.contains(&i64::MIN) {
        return None;
    }
    Some(r)
}

fn div_small(a: &[i64], d: &[i64]) -> Result<Option<Vec<i128>>, Overflow> {
    let dd = d.len() - 1;
    let lc = d[dd] as i128;
    let mut rem: Vec<i128> = a.iter().map(|&x| x as i128).collect();
    let n = a.len() - d.len() + 1;
    let mut q = vec![0i128; n];
    for i in (0..n).rev() {
        let top = rem[i + dd];
        if top == 0 {
            continue;
        }
        if top % lc != 0 {
            return Ok(None);
        }
        let t = top / lc;
        for (j, &y) in d.iter().enumerate() {
            if y != 0 {
                let p = t.checked_mul(y as i128).ok_or(Overflow)?;
                rem[i + j] = rem[i + j].checked_sub(p).ok_or(Overflow)?;
            }
        }
        q[i] = t;
    }
    if rem.iter().any(|&x| x != 0) {
        return Ok(None);
    }
    Ok(Some(q))
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_ascending(f)
    }
}

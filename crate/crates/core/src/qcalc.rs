//! q̲-numbers and the two-variable calculus with `z₀ z = q̲ z z₀`.

use crate::laurent::{Coeff, LaurentBlock, LaurentError};
use crate::scalars::Scalar;
use num_bigint::BigInt;
use num_traits::One;
use std::collections::BTreeMap;
use std::fmt;

/// Which q-integer convention to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Flavor {
    /// `[m] = (q̲^m − 1)/(q̲ − 1)` with `q̲ = v⁴`.
    Asymmetric,
    /// `[m] = (q^m − q^{−m})/(q − q^{−1})` with `q = v²`.
    Symmetric,
}

/// The q-integer `[m]` in the requested flavor.
pub fn qint(m: i64, flavor: Flavor) -> Scalar {
    if m == 0 {
        return Scalar::zero();
    }
    let n = m.unsigned_abs() as i64;
    // [n] for n > 0, as an explicit Laurent polynomial
    let terms: Vec<(i64, BigInt)> = match flavor {
        Flavor::Asymmetric => (0..n).map(|i| (4 * i, BigInt::one())).collect(),
        Flavor::Symmetric => (0..n).map(|i| (2 * (n - 1) - 4 * i, BigInt::one())).collect(),
    };
    let pos = Scalar::from_laurent(terms);
    if m > 0 {
        return pos;
    }
    match flavor {
        // [−n] = −q̲^{−n}[n]
        Flavor::Asymmetric => -(pos * Scalar::qbar_pow(-n)),
        Flavor::Symmetric => -pos,
    }
}

pub fn qfactorial(n: u32, flavor: Flavor) -> Scalar {
    (1..=n as i64).fold(Scalar::one(), |acc, k| acc * qint(k, flavor))
}

/// `[m][m−1]···[m−l+1]/[l]!`, valid for every integer `m`.
pub fn qbinom(m: i64, l: u32, flavor: Flavor) -> Scalar {
    if l == 0 {
        return Scalar::one();
    }
    if (0..l as i64).contains(&m) {
        return Scalar::zero();
    }
    let num = (0..l as i64).fold(Scalar::one(), |acc, i| acc * qint(m - i, flavor));
    num / qfactorial(l, flavor)
}

/// Polynomial in noncommuting `z`, `z₀` kept in the normal form `Σ c z^a z₀^b`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct NCPoly {
    coeffs: BTreeMap<(i64, u32), Scalar>,
}

impl NCPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, 0, Scalar::one())
    }

    pub fn monomial(a: i64, b: u32, c: Scalar) -> Self {
        let mut p = Self::zero();
        p.add_term(a, b, &c);
        p
    }

    /// `z + z₀`.
    pub fn z_plus_z0() -> Self {
        let mut p = Self::monomial(1, 0, Scalar::one());
        p.add_term(0, 1, &Scalar::one());
        p
    }

    pub fn coeffs(&self) -> &BTreeMap<(i64, u32), Scalar> {
        &self.coeffs
    }

    pub fn coeff(&self, a: i64, b: u32) -> Scalar {
        self.coeffs.get(&(a, b)).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add_term(&mut self, a: i64, b: u32, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let e = self.coeffs.entry((a, b)).or_default();
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&(a, b));
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for ((a, b), c) in &o.coeffs {
            r.add_term(*a, *b, c);
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for ((a, b), c) in &o.coeffs {
            r.add_term(*a, *b, &-c);
        }
        r
    }

    /// Drop every term of `z₀`-degree above `cutoff`.
    pub fn truncate(&self, cutoff: u32) -> Self {
        NCPoly { coeffs: self.coeffs.iter().filter(|((_, b), _)| *b <= cutoff).map(|(k, c)| (*k, c.clone())).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.mul_truncated(o, u32::MAX)
    }

    /// Product, keeping only `z₀`-degrees up to `cutoff`.
    pub fn mul_truncated(&self, o: &Self, cutoff: u32) -> Self {
        let mut r = Self::zero();
        for ((a, b), c1) in &self.coeffs {
            for ((c, d), c2) in &o.coeffs {
                if b.saturating_add(*d) > cutoff {
                    continue;
                }
                // z^a z₀^b z^c z₀^d = q̲^{bc} z^{a+c} z₀^{b+d}
                let w = Scalar::qbar_pow(*b as i64 * *c);
                r.add_term(a + c, b + d, &(c1 * c2 * w));
            }
        }
        r
    }

    pub fn pow(&self, m: u32) -> Self {
        (0..m).fold(Self::one(), |acc, _| acc.mul(self))
    }
}

impl fmt::Display for NCPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> =
            self.coeffs.iter().map(|((a, b), c)| format!("({})*z^{}*z0^{}", c, a, b)).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `(z + z₀)^m = Σ_l [m choose l] z^{m−l} z₀^l`; for `m < 0` truncated at `z₀`-degree `cutoff`.
pub fn nc_binomial(m: i64, cutoff: u32) -> NCPoly {
    let top = if m >= 0 { (m as u32).min(cutoff) } else { cutoff };
    let mut p = NCPoly::zero();
    for l in 0..=top {
        p.add_term(m - l as i64, l, &qbinom(m, l, Flavor::Asymmetric));
    }
    p
}

/// `(q̲^{e} − 1)/(q̲ − 1)` for a doubled exponent `e2`, i.e. `[e]_q̲` at half-integer `e`.
fn qbar_number_doubled(e2: i64) -> Scalar {
    if e2 % 2 == 0 {
        return qint(e2 / 2, Flavor::Asymmetric);
    }
    (Scalar::v_pow(2 * e2) - Scalar::one()) / (Scalar::qbar_pow(1) - Scalar::one())
}

/// `(a(zq̲) − a(z)) / (z(q̲ − 1))` on the full window the input certifies.
pub fn qderiv<V: Coeff>(b: &LaurentBlock<V>) -> LaurentBlock<V> {
    let (lo, hi) = b.window();
    let mut out = LaurentBlock::new(lo - 2, hi - 2, b.lower_exact());
    for (e, v) in b.iter() {
        let k = qbar_number_doubled(*e);
        if !k.is_zero() {
            out.add_term(e - 2, &v.scale(&k));
        }
    }
    out
}

/// `qderiv` restricted to exponents `≤ hi2`; fails when the input window is too small.
pub fn qderiv_to<V: Coeff>(b: &LaurentBlock<V>, hi2: i64) -> Result<LaurentBlock<V>, LaurentError> {
    let d = qderiv(b);
    let (lo, _) = d.window();
    d.restrict(lo.min(hi2), hi2)
}

/// The `n`-th iterate `a^{[n]}`.
pub fn qderiv_n<V: Coeff>(b: &LaurentBlock<V>, n: u32) -> LaurentBlock<V> {
    (0..n).fold(b.clone(), |acc, _| qderiv(&acc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use Flavor::*;

    fn s(t: &str) -> Scalar {
        t.parse().unwrap()
    }

    #[test]
    fn qint_examples() {
        assert_eq!(qint(3, Asymmetric), s("1+v^4+v^8"));
        assert!(qint(0, Asymmetric).is_zero());
        assert!(qint(0, Symmetric).is_zero());
        assert_eq!(qint(2, Symmetric), Scalar::q_pow(1) + Scalar::q_pow(-1));
        let q = Scalar::q_pow(1);
        let qi = Scalar::q_pow(-1);
        for m in -4..=4 {
            let direct = (q.pow(m) - qi.pow(m)) / (&q - &qi);
            assert_eq!(qint(m, Symmetric), direct);
            let qb = Scalar::qbar_pow(1);
            assert_eq!(qint(m, Asymmetric), (qb.pow(m) - Scalar::one()) / (qb - Scalar::one()));
        }
    }

    #[test]
    fn qbinom_examples() {
        let qb = Scalar::qbar_pow(1);
        assert_eq!(qbinom(2, 1, Asymmetric), Scalar::one() + &qb);
        let expect = (Scalar::one() + qb.pow(2)) * (Scalar::one() + &qb + qb.pow(2));
        assert_eq!(qbinom(4, 2, Asymmetric), expect);
        assert!(qbinom(7, 0, Symmetric).is_one());
        assert!(qbinom(-3, 0, Asymmetric).is_one());
        assert!(qbinom(2, 3, Asymmetric).is_zero());
    }

    #[test]
    fn pascal_recurrence() {
        for m in 1..=8i64 {
            for l in 1..=m as u32 {
                let lhs = qbinom(m, l, Asymmetric);
                let rhs = qbinom(m - 1, l - 1, Asymmetric) + Scalar::qbar_pow(l as i64) * qbinom(m - 1, l, Asymmetric);
                assert_eq!(lhs, rhs, "m={m} l={l}");
            }
        }
    }

    #[test]
    fn nc_binomial_small_cases() {
        assert_eq!(nc_binomial(1, 10), NCPoly::z_plus_z0());
        let sq = NCPoly::z_plus_z0().pow(2);
        assert_eq!(nc_binomial(2, 10), sq);
        assert_eq!(sq.coeff(1, 1), s("1+v^4"));
        assert_eq!(NCPoly::z_plus_z0().pow(3).coeff(1, 2), s("1+v^4+v^8"));
    }

    #[test]
    fn qderiv_of_monomials() {
        for n in -3..=5i64 {
            let mut b = LaurentBlock::new(-10, 12, true);
            b.add_term(2 * n, &Scalar::one());
            let d = qderiv(&b);
            assert_eq!(d.coeff(2 * n - 2), qint(n, Asymmetric), "n={n}");
            assert_eq!(d.len(), usize::from(n != 0));
        }
    }
}

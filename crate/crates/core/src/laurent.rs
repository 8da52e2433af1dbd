//! Windowed Laurent expansions in `z` (and in `z₁, z`) with exact coefficients.
//!
//! Exponents are stored doubled, so `z^{1/2}` has key `1`.

use crate::qcalc::{qint, Flavor};
use crate::scalars::Scalar;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LaurentError {
    #[error("window underflow: requested [{want_lo}, {want_hi}] but only [{have_lo}, {have_hi}] is certified")]
    WindowUnderflow { want_lo: i64, want_hi: i64, have_lo: i64, have_hi: i64 },
    #[error("diagonal limit is not certified finite")]
    UnboundedDiagonal,
    #[error("non-integral power of v while substituting")]
    NonIntegral,
}

/// Coefficient spaces: vector spaces over `Q(v)`.
pub trait Coeff: Clone + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn add_assign(&mut self, o: &Self);
    fn scale(&self, s: &Scalar) -> Self;
}

impl Coeff for Scalar {
    fn zero() -> Self {
        Scalar::zero()
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn add_assign(&mut self, o: &Self) {
        *self += o;
    }
    fn scale(&self, s: &Scalar) -> Self {
        self * s
    }
}

fn insert<K: Ord + Copy, V: Coeff>(m: &mut BTreeMap<K, V>, k: K, v: &V) {
    if v.is_zero() {
        return;
    }
    match m.get_mut(&k) {
        Some(x) => {
            x.add_assign(v);
            if x.is_zero() {
                m.remove(&k);
            }
        }
        None => {
            m.insert(k, v.clone());
        }
    }
}

/// `Σ_e c_e z^{e/2}` known exactly for `lo ≤ e ≤ hi`; with `lower_exact` also known to vanish below `lo`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentBlock<V> {
    coeffs: BTreeMap<i64, V>,
    lo: i64,
    hi: i64,
    lower_exact: bool,
}

impl<V: Coeff> LaurentBlock<V> {
    pub fn new(lo: i64, hi: i64, lower_exact: bool) -> Self {
        LaurentBlock { coeffs: BTreeMap::new(), lo, hi, lower_exact }
    }

    /// A finite Laurent polynomial given by `(doubled exponent, coefficient)` pairs, exact on `[lo, hi]`.
    pub fn from_terms<I: IntoIterator<Item = (i64, V)>>(terms: I, lo: i64, hi: i64) -> Self {
        let mut b = Self::new(lo, hi, true);
        for (e, v) in terms {
            b.add_term(e, &v);
        }
        b
    }

    pub fn window(&self) -> (i64, i64) {
        (self.lo, self.hi)
    }

    pub fn lower_exact(&self) -> bool {
        self.lower_exact
    }

    pub fn iter(&self) -> impl Iterator<Item = (&i64, &V)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// True when every coefficient in the window vanishes.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn get(&self, e2: i64) -> Option<&V> {
        self.coeffs.get(&e2)
    }

    pub fn coeff(&self, e2: i64) -> V {
        self.coeffs.get(&e2).cloned().unwrap_or_else(V::zero)
    }

    /// Lowest exponent carrying a nonzero coefficient.
    pub fn lowest(&self) -> Option<(i64, &V)> {
        self.coeffs.iter().next().map(|(e, v)| (*e, v))
    }

    /// Add `v z^{e2/2}`; terms outside the window are discarded.
    pub fn add_term(&mut self, e2: i64, v: &V) {
        if e2 > self.hi || e2 < self.lo {
            return;
        }
        insert(&mut self.coeffs, e2, v);
    }

    /// `z ↦ z q̲^k`: the coefficient at `e` picks up `q̲^{ke}`.
    pub fn shift(&self, k: i64) -> Self {
        if k == 0 {
            return self.clone();
        }
        let coeffs = self.coeffs.iter().map(|(e, v)| (*e, v.scale(&Scalar::v_pow(2 * k * e)))).collect();
        LaurentBlock { coeffs, ..*self }
    }

    /// `z ↦ z v^g`; needs `g e / 2` integral for every stored exponent.
    pub fn substitute_v(&self, g: i64) -> Result<Self, LaurentError> {
        let mut coeffs = BTreeMap::new();
        for (e, v) in &self.coeffs {
            if (g * e) % 2 != 0 {
                return Err(LaurentError::NonIntegral);
            }
            coeffs.insert(*e, v.scale(&Scalar::v_pow(g * e / 2)));
        }
        Ok(LaurentBlock { coeffs, ..*self })
    }

    /// Multiply by `z^{e2/2}`.
    pub fn mul_z(&self, e2: i64) -> Self {
        LaurentBlock {
            coeffs: self.coeffs.iter().map(|(e, v)| (e + e2, v.clone())).collect(),
            lo: self.lo + e2,
            hi: self.hi + e2,
            lower_exact: self.lower_exact,
        }
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        if s.is_zero() {
            return LaurentBlock { coeffs: BTreeMap::new(), ..*self };
        }
        LaurentBlock { coeffs: self.coeffs.iter().map(|(e, v)| (*e, v.scale(s))).collect(), ..*self }
    }

    pub fn neg(&self) -> Self {
        self.scale(&Scalar::from_int(-1))
    }

    fn combine_window(&self, o: &Self) -> (i64, i64, bool) {
        let hi = self.hi.min(o.hi);
        match (self.lower_exact, o.lower_exact) {
            (true, true) => (self.lo.min(o.lo), hi, true),
            (true, false) => (o.lo, hi, false),
            (false, true) => (self.lo, hi, false),
            (false, false) => (self.lo.max(o.lo), hi, false),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let (lo, hi, ex) = self.combine_window(o);
        let mut r = Self::new(lo, hi, ex);
        for (e, v) in self.coeffs.iter().chain(o.coeffs.iter()) {
            r.add_term(*e, v);
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    /// Accumulate `o` in place, shrinking the window as in [`LaurentBlock::add`].
    pub fn add_assign_block(&mut self, o: &Self) {
        let (lo, hi, ex) = self.combine_window(o);
        self.lo = lo;
        self.hi = hi;
        self.lower_exact = ex;
        self.coeffs.retain(|e, _| *e >= lo && *e <= hi);
        for (e, v) in o.coeffs.iter() {
            self.add_term(*e, v);
        }
    }

    /// Restrict to `[lo, hi]`, failing if that range is not certified.
    pub fn restrict(&self, lo: i64, hi: i64) -> Result<Self, LaurentError> {
        if hi > self.hi || (lo < self.lo && !self.lower_exact) {
            return Err(LaurentError::WindowUnderflow { want_lo: lo, want_hi: hi, have_lo: self.lo, have_hi: self.hi });
        }
        let coeffs = self.coeffs.range(lo..=hi).map(|(e, v)| (*e, v.clone())).collect();
        Ok(LaurentBlock { coeffs, lo, hi, lower_exact: self.lower_exact && lo <= self.lo })
    }

    /// Exact equality on the common certified window.
    pub fn agrees_with(&self, o: &Self) -> bool {
        let (lo, hi, _) = self.combine_window(o);
        let a: Vec<_> = self.coeffs.range(lo..=hi).collect();
        let b: Vec<_> = o.coeffs.range(lo..=hi).collect();
        a == b
    }

    pub fn map<W: Coeff, F: Fn(&V) -> W>(&self, f: F) -> LaurentBlock<W> {
        let mut r = LaurentBlock::new(self.lo, self.hi, self.lower_exact);
        for (e, v) in &self.coeffs {
            r.add_term(*e, &f(v));
        }
        r
    }
}

/// Cauchy product of a scalar series with a vector series; both must be exact from below.
pub fn mul_blocks<V: Coeff>(a: &LaurentBlock<Scalar>, b: &LaurentBlock<V>) -> LaurentBlock<V> {
    assert!(a.lower_exact && b.lower_exact, "product needs lower-exact factors");
    let lo = a.lo + b.lo;
    let hi = (a.hi + b.lo).min(b.hi + a.lo);
    let mut r = LaurentBlock::new(lo, hi, true);
    for (e1, s) in &a.coeffs {
        for (e2, v) in &b.coeffs {
            if e1 + e2 > hi {
                break;
            }
            r.add_term(e1 + e2, &v.scale(s));
        }
    }
    r
}

/// Bivariate block in `(z₁, z)`; keys are doubled exponent pairs `(e₁, e)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BiBlock<V> {
    coeffs: BTreeMap<(i64, i64), V>,
    w1: (i64, i64),
    w2: (i64, i64),
    exact1: bool,
    exact2: bool,
}

impl<V: Coeff> BiBlock<V> {
    pub fn new(w1: (i64, i64), w2: (i64, i64), exact1: bool, exact2: bool) -> Self {
        BiBlock { coeffs: BTreeMap::new(), w1, w2, exact1, exact2 }
    }

    pub fn windows(&self) -> ((i64, i64), (i64, i64)) {
        (self.w1, self.w2)
    }

    pub fn lower_exact(&self) -> (bool, bool) {
        (self.exact1, self.exact2)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(i64, i64), &V)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, e1: i64, e2: i64) -> V {
        self.coeffs.get(&(e1, e2)).cloned().unwrap_or_else(V::zero)
    }

    fn inside(&self, e1: i64, e2: i64) -> bool {
        e1 >= self.w1.0 && e1 <= self.w1.1 && e2 >= self.w2.0 && e2 <= self.w2.1
    }

    pub fn add_term(&mut self, e1: i64, e2: i64, v: &V) {
        if self.inside(e1, e2) {
            insert(&mut self.coeffs, (e1, e2), v);
        }
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        let mut r = Self::new(self.w1, self.w2, self.exact1, self.exact2);
        for ((a, b), v) in &self.coeffs {
            r.add_term(*a, *b, &v.scale(s));
        }
        r
    }

    /// Multiply by a Laurent polynomial `Σ c (z₁^{a/2} z^{b/2})`, certifying the shrunk window.
    pub fn mul_poly2(&self, p: &[((i64, i64), Scalar)]) -> Result<Self, LaurentError> {
        let p: Vec<_> = p.iter().filter(|(_, c)| !c.is_zero()).collect();
        if p.is_empty() {
            return Ok(Self::new(self.w1, self.w2, self.exact1, self.exact2));
        }
        let min_a = p.iter().map(|((a, _), _)| *a).min().unwrap();
        let max_a = p.iter().map(|((a, _), _)| *a).max().unwrap();
        let min_b = p.iter().map(|((_, b), _)| *b).min().unwrap();
        let max_b = p.iter().map(|((_, b), _)| *b).max().unwrap();
        let w1 = (if self.exact1 { self.w1.0 + min_a } else { self.w1.0 + max_a }, self.w1.1 + min_a);
        let w2 = (if self.exact2 { self.w2.0 + min_b } else { self.w2.0 + max_b }, self.w2.1 + min_b);
        if w1.1 < w1.0 || w2.1 < w2.0 {
            return Err(LaurentError::WindowUnderflow {
                want_lo: w1.0.min(w2.0),
                want_hi: w1.1.min(w2.1),
                have_lo: self.w1.0.min(self.w2.0),
                have_hi: self.w1.1.min(self.w2.1),
            });
        }
        let mut r = Self::new(w1, w2, self.exact1, self.exact2);
        for ((e1, e2), v) in &self.coeffs {
            for ((a, b), c) in &p {
                r.add_term(e1 + a, e2 + b, &v.scale(c));
            }
        }
        Ok(r)
    }

    /// Multiply by `Σ_k c_k (z/z₁)^k`.
    pub fn poly_mul(&self, p: &[(i64, Scalar)]) -> Result<Self, LaurentError> {
        let p2: Vec<((i64, i64), Scalar)> = p.iter().map(|(k, c)| ((-2 * k, 2 * k), c.clone())).collect();
        self.mul_poly2(&p2)
    }

    /// `z₁ → z`: sums coefficients along anti-diagonals.
    pub fn diagonal_limit(&self) -> Result<LaurentBlock<V>, LaurentError> {
        if !(self.exact1 && self.exact2) {
            return Err(LaurentError::UnboundedDiagonal);
        }
        let lo = self.w1.0 + self.w2.0;
        let hi = (self.w1.1 + self.w2.0).min(self.w2.1 + self.w1.0);
        let mut r = LaurentBlock::new(lo, hi, true);
        for ((a, b), v) in &self.coeffs {
            r.add_term(a + b, v);
        }
        Ok(r)
    }

    /// `z₁ ↦ z₁ q̲^k` (axis 0) or `z ↦ z q̲^k` (axis 1).
    pub fn shift_axis(&self, axis: usize, k: i64) -> Self {
        let mut r = Self::new(self.w1, self.w2, self.exact1, self.exact2);
        for ((a, b), v) in &self.coeffs {
            let e = if axis == 0 { *a } else { *b };
            r.add_term(*a, *b, &v.scale(&Scalar::v_pow(2 * k * e)));
        }
        r
    }

    /// q̲-derivative in one variable.
    pub fn qderiv_axis(&self, axis: usize) -> Self {
        let (mut w1, mut w2) = (self.w1, self.w2);
        if axis == 0 {
            w1 = (w1.0 - 2, w1.1 - 2);
        } else {
            w2 = (w2.0 - 2, w2.1 - 2);
        }
        let mut r = Self::new(w1, w2, self.exact1, self.exact2);
        for ((a, b), v) in &self.coeffs {
            let e = if axis == 0 { *a } else { *b };
            assert!(e % 2 == 0, "q-derivative on half-integer exponents");
            let k = qint(e / 2, Flavor::Asymmetric);
            if axis == 0 {
                r.add_term(a - 2, *b, &v.scale(&k));
            } else {
                r.add_term(*a, b - 2, &v.scale(&k));
            }
        }
        r
    }

    /// Substitute `z₁ ↦ z₁ v^{g1}`, `z ↦ z v^{g2}`.
    pub fn substitute_v(&self, g1: i64, g2: i64) -> Result<Self, LaurentError> {
        let mut r = Self::new(self.w1, self.w2, self.exact1, self.exact2);
        for ((a, b), v) in &self.coeffs {
            let t = g1 * a + g2 * b;
            if t % 2 != 0 {
                return Err(LaurentError::NonIntegral);
            }
            r.add_term(*a, *b, &v.scale(&Scalar::v_pow(t / 2)));
        }
        Ok(r)
    }

    pub fn add(&self, o: &Self) -> Self {
        let pick = |a: (i64, i64), ea: bool, b: (i64, i64), eb: bool| {
            let hi = a.1.min(b.1);
            match (ea, eb) {
                (true, true) => ((a.0.min(b.0), hi), true),
                (true, false) => ((b.0, hi), false),
                (false, true) => ((a.0, hi), false),
                (false, false) => ((a.0.max(b.0), hi), false),
            }
        };
        let (w1, e1) = pick(self.w1, self.exact1, o.w1, o.exact1);
        let (w2, e2) = pick(self.w2, self.exact2, o.w2, o.exact2);
        let mut r = Self::new(w1, w2, e1, e2);
        for ((a, b), v) in self.coeffs.iter().chain(o.coeffs.iter()) {
            r.add_term(*a, *b, v);
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&Scalar::from_int(-1)))
    }

    /// Restrict to a rectangle inside the certified window.
    pub fn restrict(&self, w1: (i64, i64), w2: (i64, i64)) -> Result<Self, LaurentError> {
        let ok1 = w1.1 <= self.w1.1 && (w1.0 >= self.w1.0 || self.exact1);
        let ok2 = w2.1 <= self.w2.1 && (w2.0 >= self.w2.0 || self.exact2);
        if !(ok1 && ok2) {
            return Err(LaurentError::WindowUnderflow {
                want_lo: w1.0.min(w2.0),
                want_hi: w1.1.max(w2.1),
                have_lo: self.w1.0.min(self.w2.0),
                have_hi: self.w1.1.max(self.w2.1),
            });
        }
        let mut r = Self::new(w1, w2, self.exact1 && w1.0 <= self.w1.0, self.exact2 && w2.0 <= self.w2.0);
        for ((a, b), v) in &self.coeffs {
            r.add_term(*a, *b, v);
        }
        Ok(r)
    }

    /// Exact equality on the intersection of the certified windows.
    pub fn agrees_with(&self, o: &Self) -> bool {
        let lo = |a: i64, ea: bool, b: i64, eb: bool| if ea && eb { a.min(b) } else { a.max(b) };
        let w1 = (lo(self.w1.0, self.exact1, o.w1.0, o.exact1), self.w1.1.min(o.w1.1));
        let w2 = (lo(self.w2.0, self.exact2, o.w2.0, o.exact2), self.w2.1.min(o.w2.1));
        let inside = |k: &(i64, i64)| k.0 >= w1.0 && k.0 <= w1.1 && k.1 >= w2.0 && k.1 <= w2.1;
        let a: Vec<_> = self.coeffs.iter().filter(|(k, _)| inside(k)).collect();
        let b: Vec<_> = o.coeffs.iter().filter(|(k, _)| inside(k)).collect();
        a == b
    }
}

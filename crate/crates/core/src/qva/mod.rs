//! Shifted-current expressions `z^e x(z q̲^{s₁})···x(z q̲^{s_m}) ⊗ t^d`, their `r`-th products,
//! and evaluation on the level-`c` module.

use crate::fock::EngineError;
use crate::laurent::{LaurentBlock, LaurentError};
use crate::levelc::{current_string_apply, TensorVector};
use crate::qcalc::{qbinom, qfactorial, Flavor};
use crate::scalars::Scalar;
use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::rc::Rc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QvaError {
    #[error("no admissible clearing factor for the pole at k = {k}: the pair is not quasi-commutative in this order")]
    ClearingUnavailable { k: i64 },
    #[error("pole on the diagonal between currents {left} and {right} of x{shifts:?}")]
    Pole { shifts: Vec<i64>, left: usize, right: usize },
    #[error("expression is not homogeneous in the t-degree (degrees {0:?})")]
    Inhomogeneous(Vec<u32>),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Window(#[from] LaurentError),
}

/// Key of one term: `(z_power, t_degree, shifts)`.
pub type TermKey = (i64, u32, Vec<i64>);

/// Finite sum of shifted-current monomials with merged coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct CurrentExpr {
    terms: BTreeMap<TermKey, Scalar>,
}

impl CurrentExpr {
    pub fn zero() -> Self {
        CurrentExpr::default()
    }

    /// `𝟙`.
    pub fn vacuum() -> Self {
        Self::monomial(Scalar::one(), 0, 0, Vec::new())
    }

    pub fn monomial(coeff: Scalar, z_power: i64, t_degree: u32, shifts: Vec<i64>) -> Self {
        let mut e = Self::zero();
        e.add_term(coeff, z_power, t_degree, shifts);
        e
    }

    pub fn add_term(&mut self, coeff: Scalar, z_power: i64, t_degree: u32, shifts: Vec<i64>) {
        if coeff.is_zero() {
            return;
        }
        let key = (z_power, t_degree, shifts);
        let slot = self.terms.entry(key.clone()).or_default();
        *slot += &coeff;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TermKey, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_vacuum(&self) -> bool {
        *self == Self::vacuum()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for ((e, d, s), c) in &o.terms {
            r.add_term(c.clone(), *e, *d, s.clone());
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&Scalar::from_int(-1)))
    }

    pub fn scale(&self, k: &Scalar) -> Self {
        let mut r = Self::zero();
        for ((e, d, s), c) in &self.terms {
            r.add_term(c * k, *e, *d, s.clone());
        }
        r
    }

    /// Distinct t-degrees present.
    pub fn t_degrees(&self) -> Vec<u32> {
        let mut d: Vec<u32> = self.terms.keys().map(|k| k.1).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    /// The component of t-degree `d`.
    pub fn component(&self, d: u32) -> Self {
        CurrentExpr { terms: self.terms.iter().filter(|(k, _)| k.1 == d).map(|(k, c)| (k.clone(), c.clone())).collect() }
    }

    /// Number of currents in each term, if all terms agree.
    pub fn charge(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(|k| k.2.len());
        let first = it.next()?;
        it.all(|m| m == first).then_some(first)
    }

    /// First pair `j > i` with `s_j − s_i = −1` in some term.
    pub fn find_pole(&self) -> Option<(Vec<i64>, usize, usize)> {
        self.terms.keys().find_map(|(_, _, s)| pole_in(s).map(|(i, j)| (s.clone(), i, j)))
    }
}

fn pole_in(s: &[i64]) -> Option<(usize, usize)> {
    for j in 0..s.len() {
        for i in 0..j {
            if s[j] - s[i] == -1 {
                return Some((i, j));
            }
        }
    }
    None
}

impl fmt::Display for CurrentExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((e, d, s), c)| {
                let xs = if s.is_empty() { "1".to_string() } else { s.iter().map(|k| format!("x[{k}]")).collect() };
                format!("{c} * z^{e} * {xs} * t^{d}")
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `x(z) ⊗ tⁿ`.
pub fn generator(n: u32) -> CurrentExpr {
    CurrentExpr::monomial(Scalar::one(), 0, n, vec![0])
}

/// The t-degree of a homogeneous expression; `𝟙` and `0` have degree 0.
pub fn wt(e: &CurrentExpr) -> Result<u32, QvaError> {
    match e.t_degrees().as_slice() {
        [] => Ok(0),
        [d] => Ok(*d),
        ds => Err(QvaError::Inhomogeneous(ds.to_vec())),
    }
}

/// A product of normalized factors `(1 − q̲^{k+1} x)/(1 − q̲^{k+1})` in `x = z/z₁`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClearingCert {
    factors: Vec<i64>,
}

impl ClearingCert {
    pub fn new(mut factors: Vec<i64>) -> Result<Self, QvaError> {
        if let Some(&k) = factors.iter().find(|&&k| !Self::admits(k)) {
            return Err(QvaError::ClearingUnavailable { k });
        }
        factors.sort_unstable();
        Ok(ClearingCert { factors })
    }

    /// Whether the factor for `k` keeps `p(q̲ⁿ) ≠ 0` for all `n ≥ 0`.
    pub fn admits(k: i64) -> bool {
        k >= 0
    }

    pub fn factors(&self) -> &[i64] {
        &self.factors
    }

    /// Multiply by further factors.
    pub fn extend(&self, more: &[i64]) -> Result<Self, QvaError> {
        let mut f = self.factors.clone();
        f.extend_from_slice(more);
        Self::new(f)
    }

    /// Coefficients `(power of z/z₁, c)` of the expanded polynomial.
    pub fn polynomial(&self) -> Vec<(i64, Scalar)> {
        let mut p = vec![Scalar::one()];
        for &k in &self.factors {
            let a = Scalar::qbar_pow(k + 1);
            let norm = Scalar::one() / (Scalar::one() - &a);
            let mut next = vec![Scalar::zero(); p.len() + 1];
            for (i, c) in p.iter().enumerate() {
                next[i] += &(c * &norm);
                next[i + 1] -= &(c * &a * &norm);
            }
            p = next;
        }
        p.into_iter().enumerate().map(|(i, c)| (i as i64, c)).collect()
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        self.polynomial().iter().fold(Scalar::zero(), |acc, (i, c)| acc + c * x.pow(*i))
    }
}

/// One term `(coeff, z_power, shifts)` of a t-homogeneous group.
type Raw = (Scalar, i64, Vec<i64>);

/// `D^R` with `D f(z) = (f(z q̲) − f(z))/(z(q̲ − 1))`, divided by `[R]_q̲!`.
fn divided_derivative(terms: Vec<Raw>, r: u32) -> Vec<Raw> {
    let inv = Scalar::one() / (Scalar::qbar_pow(1) - Scalar::one());
    let mut cur = terms;
    for _ in 0..r {
        let mut acc: HashMap<(i64, Vec<i64>), Scalar> = HashMap::new();
        for (c, e, sh) in cur {
            let up: Vec<i64> = sh.iter().map(|s| s + 1).collect();
            *acc.entry((e - 1, up)).or_default() += &(&c * Scalar::qbar_pow(e) * &inv);
            *acc.entry((e - 1, sh)).or_default() -= &(&c * &inv);
        }
        cur = acc.into_iter().filter(|(_, c)| !c.is_zero()).map(|((e, sh), c)| (c, e, sh)).collect();
    }
    let f = qfactorial(r, Flavor::Asymmetric);
    cur.into_iter().map(|(c, e, sh)| (c / &f, e, sh)).collect()
}

/// `a_{index} b` together with the clearing certificate that witnesses it.
pub fn rth_product_certified(
    a: &CurrentExpr,
    b: &CurrentExpr,
    index: i64,
) -> Result<(CurrentExpr, ClearingCert), QvaError> {
    if index >= 0 {
        return Ok((CurrentExpr::zero(), ClearingCert::default()));
    }
    let r = (-index - 1) as u32;
    let mut out = CurrentExpr::zero();
    let mut need: BTreeMap<i64, usize> = BTreeMap::new();
    for alpha in a.t_degrees() {
        let group: Vec<Raw> = a.component(alpha).terms().map(|((e, _, s), c)| (c.clone(), *e, s.clone())).collect();
        let shift = alpha as i64 + r as i64;
        for (ca, ea, sa) in divided_derivative(group, r) {
            for ((eb, beta, sb), cb) in b.terms() {
                let mut shifts = sa.clone();
                shifts.extend(sb.iter().map(|s| s + shift));
                let mut local: BTreeMap<i64, usize> = BTreeMap::new();
                for si in &sa {
                    for sj in &shifts[sa.len()..] {
                        *local.entry(sj - si).or_default() += 1;
                    }
                }
                for (k, n) in local {
                    let slot = need.entry(k).or_default();
                    *slot = (*slot).max(n);
                }
                let coeff = &ca * cb * Scalar::qbar_pow(shift * eb);
                out.add_term(coeff, ea + eb, alpha + beta + r, shifts);
            }
        }
    }
    let cert = ClearingCert::new(need.into_iter().flat_map(|(k, n)| std::iter::repeat(k).take(n)).collect())?;
    if let Some((shifts, left, right)) = out.find_pole() {
        return Err(QvaError::Pole { shifts, left, right });
    }
    Ok((out, cert))
}

/// `a_{index} b`: zero for `index ≥ 0`.
pub fn rth_product(a: &CurrentExpr, b: &CurrentExpr, index: i64) -> Result<CurrentExpr, QvaError> {
    rth_product_certified(a, b, index).map(|x| x.0)
}

/// Exact values of an expression on one vector, one block per t-degree.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub by_degree: BTreeMap<u32, LaurentBlock<TensorVector>>,
}

impl Evaluation {
    pub fn is_zero(&self) -> bool {
        self.by_degree.values().all(|b| b.is_zero())
    }

    /// All degrees summed, i.e. the value at `t = 1`.
    pub fn total(&self) -> Option<LaurentBlock<TensorVector>> {
        let mut it = self.by_degree.values();
        let mut acc = it.next()?.clone();
        for b in it {
            acc.add_assign_block(b);
        }
        Some(acc)
    }
}

type StringKey = (Vec<i64>, Vec<crate::fock::FockState>, i64);

thread_local! {
    static STRING_CACHE: RefCell<HashMap<StringKey, Rc<LaurentBlock<TensorVector>>>> = RefCell::new(HashMap::new());
}

const STRING_CACHE_LIMIT: usize = 50_000;

pub fn clear_cache() {
    STRING_CACHE.with(|c| c.borrow_mut().clear());
}

/// `x(z q̲^{s₁})···x(z q̲^{s_m})` on one basis tensor, memoized up to a common shift.
fn string_on_basis(shifts: &[i64], states: &[crate::fock::FockState], hi2: i64) -> Result<LaurentBlock<TensorVector>, QvaError> {
    let kappa = shifts.first().copied().unwrap_or(0);
    let norm: Vec<i64> = shifts.iter().map(|s| s - kappa).collect();
    let key = (norm, states.to_vec(), hi2);
    let hit = STRING_CACHE.with(|c| c.borrow().get(&key).cloned());
    let block = match hit {
        Some(b) => b,
        None => {
            let gammas: Vec<i64> = key.0.iter().map(|s| 4 * s).collect();
            let b = Rc::new(current_string_apply(&gammas, &TensorVector::basis(states.to_vec()), hi2)?);
            STRING_CACHE.with(|c| {
                let mut c = c.borrow_mut();
                if c.len() >= STRING_CACHE_LIMIT {
                    c.clear();
                }
                c.insert(key, b.clone());
            });
            b
        }
    };
    Ok(block.shift(kappa))
}

/// `Y(e, z) v` on the level-`c` module, exact for doubled exponents `≤ hi2`.
pub fn evaluate(e: &CurrentExpr, c: usize, v: &TensorVector, hi2: i64) -> Result<Evaluation, QvaError> {
    assert!(v.is_empty() || v.level() == c, "vector level does not match c");
    if let Some((shifts, left, right)) = e.find_pole() {
        return Err(QvaError::Pole { shifts, left, right });
    }
    let mut by_degree: BTreeMap<u32, LaurentBlock<TensorVector>> = BTreeMap::new();
    for ((zp, d, shifts), coeff) in e.terms() {
        let mut term: Option<LaurentBlock<TensorVector>> = None;
        for (states, k) in v.iter() {
            let b = string_on_basis(shifts, states, hi2 - 2 * zp)?.scale(&(coeff * k));
            match term.as_mut() {
                Some(t) => t.add_assign_block(&b),
                None => term = Some(b),
            }
        }
        let term = term.unwrap_or_else(|| LaurentBlock::new(hi2 + 1 - 2 * zp, hi2 - 2 * zp, true)).mul_z(2 * zp);
        match by_degree.get_mut(d) {
            Some(t) => t.add_assign_block(&term),
            None => {
                by_degree.insert(*d, term);
            }
        }
    }
    Ok(Evaluation { by_degree })
}

/// Right side of the associativity formula:
/// `Σ_{l≥0} qbinom(l−r−1, l) q̲^{(s+l+1)(r−u+1)} a_{r−l}(b_{s+l} cc)` with `u = wt(a)`.
pub fn associativity_rhs(a: &CurrentExpr, b: &CurrentExpr, cc: &CurrentExpr, r: i64, s: i64) -> Result<CurrentExpr, QvaError> {
    let u = wt(a)? as i64;
    let mut out = CurrentExpr::zero();
    // b_{s+l} cc = 0 once s + l ≥ 0, a_{r−l} = 0 while r − l ≥ 0
    for l in (r + 1).max(0)..(-s).max(0) {
        let k = qbinom(l - r - 1, l as u32, Flavor::Asymmetric) * Scalar::qbar_pow((s + l + 1) * (r - u + 1));
        if k.is_zero() {
            continue;
        }
        let inner = rth_product(b, cc, s + l)?;
        out = out.add(&rth_product(a, &inner, r - l)?.scale(&k));
    }
    Ok(out)
}

/// Outcome of comparing both sides of the associativity formula.
#[derive(Clone, Debug, PartialEq)]
pub enum AssocReport {
    Equal { coefficients_compared: usize },
    Discrepancy { vector: usize, t_degree: u32, exponent: i64, lhs: TensorVector, rhs: TensorVector },
}

impl AssocReport {
    pub fn holds(&self) -> bool {
        matches!(self, AssocReport::Equal { .. })
    }
}

/// `(a_r b)_s cc` against the right side of the associativity formula on each test vector.
#[allow(clippy::too_many_arguments)]
pub fn check_associativity(
    a: &CurrentExpr,
    b: &CurrentExpr,
    cc: &CurrentExpr,
    r: i64,
    s: i64,
    c: usize,
    test_vectors: &[TensorVector],
    hi2: i64,
) -> Result<AssocReport, QvaError> {
    let lhs = rth_product(&rth_product(a, b, r)?, cc, s)?;
    let rhs = associativity_rhs(a, b, cc, r, s)?;
    let mut compared = 0;
    for (i, v) in test_vectors.iter().enumerate() {
        let el = evaluate(&lhs, c, v, hi2)?;
        let er = evaluate(&rhs, c, v, hi2)?;
        let mut degrees: Vec<u32> = el.by_degree.keys().chain(er.by_degree.keys()).copied().collect();
        degrees.sort_unstable();
        degrees.dedup();
        for d in degrees {
            let empty = LaurentBlock::new(hi2 + 1, hi2, true);
            let bl = el.by_degree.get(&d).unwrap_or(&empty);
            let br = er.by_degree.get(&d).unwrap_or(&empty);
            let lo = bl.window().0.min(br.window().0);
            for e in lo..=hi2 {
                let (x, y) = (bl.coeff(e), br.coeff(e));
                compared += 1;
                if x != y {
                    return Ok(AssocReport::Discrepancy { vector: i, t_degree: d, exponent: e, lhs: x, rhs: y });
                }
            }
        }
    }
    Ok(AssocReport::Equal { coefficients_compared: compared })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_and_weights() {
        assert_eq!(generator(1).to_string(), "1/1 * z^0 * x[0] * t^1");
        assert_eq!(wt(&generator(3)).unwrap(), 3);
        assert_eq!(wt(&CurrentExpr::vacuum()).unwrap(), 0);
        let mixed = generator(1).add(&generator(2));
        assert_eq!(wt(&mixed), Err(QvaError::Inhomogeneous(vec![1, 2])));
    }

    #[test]
    fn minus_one_product_of_generators() {
        let p = rth_product(&generator(1), &generator(1), -1).unwrap();
        assert_eq!(p, CurrentExpr::monomial(Scalar::one(), 0, 2, vec![0, 1]));
        assert!(rth_product(&generator(1), &generator(1), 0).unwrap().is_zero());
    }

    #[test]
    fn first_derivative_with_vacuum() {
        let p = rth_product(&generator(1), &CurrentExpr::vacuum(), -2).unwrap();
        let inv = Scalar::one() / (Scalar::qbar_pow(1) - Scalar::one());
        let mut expect = CurrentExpr::monomial(inv.clone(), -1, 2, vec![1]);
        expect.add_term(-inv, -1, 2, vec![0]);
        assert_eq!(p, expect);
    }

    #[test]
    fn reversed_pair_has_no_admissible_clearing() {
        let a = CurrentExpr::monomial(Scalar::one(), 0, 0, vec![5]);
        assert!(matches!(rth_product(&a, &generator(1), -1), Err(QvaError::ClearingUnavailable { .. })));
    }

    #[test]
    fn certificate_is_one_at_one() {
        let c = ClearingCert::new(vec![0, 2, 2]).unwrap();
        assert_eq!(c.eval(&Scalar::one()), Scalar::one());
        for n in 0..4 {
            assert!(!c.eval(&Scalar::qbar_pow(n)).is_zero());
        }
        assert!(ClearingCert::new(vec![-1]).is_err());
    }
}

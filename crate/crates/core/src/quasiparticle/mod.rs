//! Quasi-particle monomials `x_{m₁,r₁} ··· x_{m_k,r_k} 𝟙`, their fusion, straightening
//! onto the basis form, and A-term expansions.

use crate::fock::FockState;
use crate::laurent::Coeff;
use crate::levelc::{georgiev_project, tensor_states_up_to_weight, TensorVector};
use crate::qva::{evaluate, generator, rth_product, CurrentExpr, QvaError};
use crate::scalars::Scalar;
use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MonomialError {
    #[error("charge must be positive, got {0}")]
    Charge(u32),
    #[error("mode index must be negative, got {0}")]
    Index(i64),
    #[error("cannot parse monomial: {0}")]
    Parse(String),
}

/// `x_{m₁,r₁} ··· x_{m_k,r_k} 𝟙`, stored as `[(m₁,r₁), …, (m_k,r_k)]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct QPMonomial {
    pairs: Vec<(u32, i64)>,
}

impl QPMonomial {
    pub fn new(pairs: Vec<(u32, i64)>) -> Result<Self, MonomialError> {
        for &(m, r) in &pairs {
            if m == 0 {
                return Err(MonomialError::Charge(m));
            }
            if r >= 0 {
                return Err(MonomialError::Index(r));
            }
        }
        Ok(QPMonomial { pairs })
    }

    /// `𝟙`.
    pub fn vacuum() -> Self {
        QPMonomial::default()
    }

    pub fn pairs(&self) -> &[(u32, i64)] {
        &self.pairs
    }

    /// Number of quasi-particles `k`.
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn charges(&self) -> Vec<u32> {
        self.pairs.iter().map(|p| p.0).collect()
    }

    /// `r₁,…,r_{k−1} ≤ −2`, `r_k ≤ −1` and every `m_j ≤ c`.
    pub fn is_basis_form(&self, c: usize) -> bool {
        let k = self.pairs.len();
        self.pairs
            .iter()
            .enumerate()
            .all(|(j, &(m, r))| m as usize <= c && (r <= -2 || (j + 1 == k && r == -1)))
    }

    /// `−(r₁ + 2r₂ + ··· + k r_k)`.
    pub fn deg_q(&self) -> i64 {
        -self.pairs.iter().enumerate().map(|(j, p)| (j as i64 + 1) * p.1).sum::<i64>()
    }

    /// `Σm_j − Σr_j − k`.
    pub fn wt(&self) -> i64 {
        self.pairs.iter().map(|&(m, r)| m as i64 - r - 1).sum()
    }

    /// `(r⁽¹⁾,…,r⁽ᶜ⁾)` with `r⁽ʲ⁾ = #{i : m_i ≥ j}`.
    pub fn charge_profile(&self, c: usize) -> Vec<u32> {
        (1..=c as u32).map(|j| self.pairs.iter().filter(|p| p.0 >= j).count() as u32).collect()
    }

    /// The nested products `x_{m₁}{}_{r₁}(x_{m₂}{}_{r₂}(··· 𝟙))`.
    pub fn to_expr(&self) -> Result<CurrentExpr, QvaError> {
        let mut e = CurrentExpr::vacuum();
        for &(m, r) in self.pairs.iter().rev() {
            e = rth_product(&quasi_particle(m), &e, r)?;
        }
        Ok(e)
    }
}

impl fmt::Display for QPMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (m, r) in &self.pairs {
            write!(f, "x[{m},{r}] ")?;
        }
        write!(f, "1")
    }
}

impl FromStr for QPMonomial {
    type Err = MonomialError;

    /// `"x[m,r] x[m,r] ... 1"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || MonomialError::Parse(s.to_string());
        let mut toks: Vec<&str> = s.split_whitespace().collect();
        if toks.pop() != Some("1") {
            return Err(bad());
        }
        let mut pairs = Vec::new();
        for t in toks {
            let inner = t.strip_prefix("x[").and_then(|t| t.strip_suffix(']')).ok_or_else(bad)?;
            let (m, r) = inner.split_once(',').ok_or_else(bad)?;
            let m: u32 = m.trim().parse().map_err(|_| bad())?;
            let r: i64 = r.trim().parse().map_err(|_| bad())?;
            pairs.push((m, r));
        }
        QPMonomial::new(pairs)
    }
}

/// `x(z)x(zq̲)···x(zq̲^{m−1}) ⊗ t^m`.
pub fn quasi_particle(m: u32) -> CurrentExpr {
    assert!(m >= 1, "quasi-particle charge must be positive");
    CurrentExpr::monomial(Scalar::one(), 0, m, (0..m as i64).collect())
}

/// Whether `(x_m)_{−1} x_k` equals `x_{m+k}` as expressions.
pub fn fuse_check(m: u32, k: u32) -> Result<bool, MonomialError> {
    for n in [m, k] {
        if n == 0 {
            return Err(MonomialError::Charge(0));
        }
    }
    let p = rth_product(&quasi_particle(m), &quasi_particle(k), -1).expect("fusion has no poles");
    Ok(p == quasi_particle(m + k))
}

/// Outcome of evaluating a quasi-particle on a family of tensor states.
#[derive(Clone, Debug, PartialEq)]
pub enum Integrability {
    Zero { states_checked: usize },
    Nonzero { state: Vec<FockState>, exponent: i64, coefficient: TensorVector },
}

impl Integrability {
    pub fn is_zero(&self) -> bool {
        matches!(self, Integrability::Zero { .. })
    }
}

/// Evaluates `x_m(z)` at level `c` on every tensor state of weight `≤ weight_bound`,
/// exact for doubled exponents `≤ hi2`; the vacuum is tried first.
pub fn integrability_test(m: u32, c: usize, weight_bound: u32, hi2: i64) -> Result<Integrability, QvaError> {
    let x = quasi_particle(m);
    let vac = vec![FockState::vacuum(); c];
    let mut states = tensor_states_up_to_weight(c, weight_bound);
    states.sort_by_key(|s| *s != vac);
    for s in &states {
        let ev = evaluate(&x, c, &TensorVector::basis(s.clone()), hi2)?;
        for b in ev.by_degree.values() {
            if let Some((e, w)) = b.iter().find(|(_, w)| !w.is_zero()) {
                return Ok(Integrability::Nonzero { state: s.clone(), exponent: *e, coefficient: w.clone() });
            }
        }
    }
    Ok(Integrability::Zero { states_checked: states.len() })
}

thread_local! {
    static STRAIGHTEN_MEMO: RefCell<HashMap<(QPMonomial, usize), BTreeMap<QPMonomial, Scalar>>> = RefCell::new(HashMap::new());
}

fn accumulate(out: &mut BTreeMap<QPMonomial, Scalar>, part: &BTreeMap<QPMonomial, Scalar>, k: &Scalar) {
    for (mono, s) in part {
        let slot = out.entry(mono.clone()).or_insert_with(Scalar::zero);
        *slot += &(s * k);
        if slot.is_zero() {
            out.remove(mono);
        }
    }
}

/// Rewrites a monomial as a combination of basis-form monomials at level `c`.
///
/// The rightmost interior `r_j = −1` is removed with
/// `a₋₁(b_s w) = q̲^{u(s+1)}(a₋₁b)_s w − Σ_{l=1}^{−s−1} q̲^{−ul} a_{−1−l}(b_{s+l} w)`,
/// `u = m_j`, and `(x_m)₋₁ x_n = x_{m+n}`; monomials containing `x_m` with `m > c` vanish.
pub fn straighten(mono: &QPMonomial, c: usize) -> BTreeMap<QPMonomial, Scalar> {
    let key = (mono.clone(), c);
    if let Some(hit) = STRAIGHTEN_MEMO.with(|m| m.borrow().get(&key).cloned()) {
        return hit;
    }
    let mut out = BTreeMap::new();
    let p = &mono.pairs;
    if p.iter().all(|&(m, _)| m as usize <= c) {
        let k = p.len();
        match (0..k.saturating_sub(1)).rev().find(|&j| p[j].1 == -1) {
            None => {
                out.insert(mono.clone(), Scalar::one());
            }
            Some(j) => {
                let (u, s) = (p[j].0, p[j + 1].1);
                let splice = |mid: &[(u32, i64)]| {
                    let mut q = p[..j].to_vec();
                    q.extend_from_slice(mid);
                    q.extend_from_slice(&p[j + 2..]);
                    QPMonomial { pairs: q }
                };
                let fused = splice(&[(u + p[j + 1].0, s)]);
                accumulate(&mut out, &straighten(&fused, c), &Scalar::qbar_pow(u as i64 * (s + 1)));
                for l in 1..=(-s - 1) {
                    let next = splice(&[(u, -1 - l), (p[j + 1].0, s + l)]);
                    accumulate(&mut out, &straighten(&next, c), &-Scalar::qbar_pow(-(u as i64) * l));
                }
            }
        }
    }
    STRAIGHTEN_MEMO.with(|m| m.borrow_mut().insert(key, out.clone()));
    out
}

/// `Σ coeff · (monomial as an expression)`.
pub fn combination_expr(comb: &BTreeMap<QPMonomial, Scalar>) -> Result<CurrentExpr, QvaError> {
    let mut e = CurrentExpr::zero();
    for (mono, k) in comb {
        e = e.add(&mono.to_expr()?.scale(k));
    }
    Ok(e)
}

/// Terms of the expansion grouped by shift signature `(l₁,…,l_k)`: quasi-particle `j`
/// occupies the shifts `M_j + l_j, …, M_j + l_j + m_j − 1` with `M_j = Σ_{i<j}(m_i − r_i − 1)`.
pub fn expand_a_terms(mono: &QPMonomial) -> Result<BTreeMap<Vec<i64>, CurrentExpr>, QvaError> {
    let e = mono.to_expr()?;
    let mut offsets = Vec::new();
    let mut acc = 0i64;
    for &(m, r) in &mono.pairs {
        offsets.push(acc);
        acc += m as i64 - r - 1;
    }
    let mut out: BTreeMap<Vec<i64>, CurrentExpr> = BTreeMap::new();
    for ((zp, d, shifts), coeff) in e.terms() {
        let mut sig = Vec::with_capacity(mono.len());
        let mut pos = 0;
        for (j, &(m, _)) in mono.pairs.iter().enumerate() {
            sig.push(shifts[pos] - offsets[j]);
            pos += m as usize;
        }
        out.entry(sig).or_insert_with(CurrentExpr::zero).add_term(coeff.clone(), *zp, *d, shifts.clone());
    }
    Ok(out)
}

/// The all-zero signature group of the A-term expansion.
pub fn leading_term(mono: &QPMonomial) -> Result<CurrentExpr, QvaError> {
    let zero = vec![0; mono.len()];
    Ok(expand_a_terms(mono)?.remove(&zero).unwrap_or_else(CurrentExpr::zero))
}

/// Lowest nonzero coefficient of the leading term on `1^{⊗c}` at `t = 1` after projecting
/// onto the monomial's charge profile, searched up to doubled exponent `max_hi2`.
pub fn leading_coefficient(mono: &QPMonomial, c: usize, max_hi2: i64) -> Result<Option<(i64, TensorVector)>, QvaError> {
    let lead = leading_term(mono)?;
    let profile: Vec<i64> = mono.charge_profile(c).iter().map(|&r| 2 * r as i64).collect();
    let v = TensorVector::vacuum(c);
    let mut hi2 = 0;
    loop {
        let ev = evaluate(&lead, c, &v, hi2)?;
        if let Some(total) = ev.total() {
            let projected = total.map(|w| georgiev_project(w, &profile));
            let found = projected.iter().find(|(_, w)| !w.is_zero()).map(|(e, w)| (*e, w.clone()));
            if found.is_some() {
                return Ok(found);
            }
        }
        if hi2 >= max_hi2 {
            return Ok(None);
        }
        hi2 = (hi2 + 4).min(max_hi2);
    }
}

/// Whether the projected leading term is nonzero, searching up to doubled exponent
/// `4 deg_q + 8`.
pub fn leading_term_nonzero(mono: &QPMonomial, c: usize) -> Result<bool, QvaError> {
    Ok(leading_coefficient(mono, c, 4 * mono.deg_q() + 8)?.is_some())
}

/// `x_m ⊗ tⁿ` for general `n`.
pub fn quasi_particle_n(m: u32, n: u32) -> CurrentExpr {
    let mut e = generator(n);
    for _ in 1..m {
        e = rth_product(&e, &generator(n), -1).expect("fusion has no poles");
    }
    e
}

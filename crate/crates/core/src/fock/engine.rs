//! Products of vertex operators at one variable `z`, each at its own argument `z v^γ`.
//!
//! A string `O₁(z v^{γ₁})···O_n(z v^{γ_n})` equals
//! `Π_{i<j} C_{ij}(v^{γ_j−γ_i}) · exp(Σ B_r a(−r) z^r) exp(Σ A_r a(r) z^{−r}) · (lattice part)`,
//! where `C_{ij}` is the closed form of `exp(Σ_r α^{(i)}_r β^{(j)}_r κ_r x^r)`.

use super::{kappa, FockState, FockVector};
use crate::laurent::{Coeff, LaurentBlock};
use crate::qcalc::{qint, Flavor};
use crate::scalars::Scalar;
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use std::cell::RefCell;
use std::rc::Rc;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("pole on the diagonal between operators {left} and {right}")]
    Pole { left: usize, right: usize },
    #[error("no closed form for the contraction {0:?} · {1:?}")]
    NoClosedForm(OpKind, OpKind),
    #[error("non-integral power of v from a half-integer lattice pairing")]
    NonIntegralPower,
}

/// Elementary operators, all at unit argument.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OpKind {
    /// `x⁺(z)`.
    XPlus,
    /// `φ(z)`.
    Phi,
    /// `𝒴(z) = ℰ₋(z)ℰ₊(z) e^{λ₁}(−z)^{∂λ₁}`.
    Koyama,
    KoyamaMinus,
    KoyamaMinusInv,
    KoyamaPlus,
    KoyamaPlusInv,
    /// `E₋^{±}(±a, z)`.
    EMinus { plus: bool, negated: bool },
    /// `E₊^{±}(±a, z)`.
    EPlus { plus: bool, negated: bool },
}

/// Families accepted by [`exp_op_apply`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExpKind {
    EMinus,
    EPlus,
    KoyamaEMinus,
    KoyamaEPlus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Lattice {
    None,
    X,
    KInv,
    Koyama,
}

impl OpKind {
    fn lattice(self) -> Lattice {
        match self {
            OpKind::XPlus => Lattice::X,
            OpKind::Phi => Lattice::KInv,
            OpKind::Koyama => Lattice::Koyama,
            _ => Lattice::None,
        }
    }
}

/// `O(z v^shift)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElemOp {
    pub kind: OpKind,
    pub shift: i64,
}

impl ElemOp {
    pub fn new(kind: OpKind, shift: i64) -> Self {
        ElemOp { kind, shift }
    }
}

thread_local! {
    static MODES: RefCell<HashMap<(OpKind, u32, bool), Option<Scalar>>> = RefCell::new(HashMap::new());
    static CONTRACTIONS: RefCell<HashMap<(OpKind, OpKind), Result<Vec<(i64, i64)>, EngineError>>> =
        RefCell::new(HashMap::new());
    static CREATION: RefCell<HashMap<Vec<ElemOp>, (u32, Rc<CreationTerms>)>> = RefCell::new(HashMap::new());
    static SIGMA: RefCell<HashMap<Vec<u32>, Scalar>> = RefCell::new(HashMap::new());
}

/// `Π [2λᵢ]`: the engine works in the basis `Π a(−λᵢ)/[2λᵢ]`, where every
/// `x⁺`, `φ` and `ℰ₋` mode coefficient has an integer denominator.
pub(crate) fn sigma(parts: &[u32]) -> Scalar {
    if let Some(s) = SIGMA.with(|m| m.borrow().get(parts).cloned()) {
        return s;
    }
    let s = parts.iter().fold(Scalar::one(), |acc, &r| acc * sym(2 * r as i64));
    SIGMA.with(|m| m.borrow_mut().insert(parts.to_vec(), s.clone()));
    s
}

type CreationTerms = Vec<(u32, Vec<u32>, Scalar)>;

/// Creation series of the combined string, memoized and grown on demand.
pub(crate) fn cached_creation(ops: &[ElemOp], nmax: u32) -> Rc<CreationTerms> {
    let key: Vec<ElemOp> = ops.iter().copied().filter(|o| beta(o.kind, 1).is_some()).collect();
    if let Some(hit) = CREATION.with(|c| c.borrow().get(&key).filter(|(n, _)| *n >= nmax).map(|(_, t)| t.clone())) {
        return hit;
    }
    let n = nmax.max(8);
    let b = combined_modes(&key, n, true);
    let terms = Rc::new(creation_series(&b, n));
    CREATION.with(|c| c.borrow_mut().insert(key, (n, terms.clone())));
    terms
}

fn sym(n: i64) -> Scalar {
    qint(n, Flavor::Symmetric)
}

fn compute_mode(kind: OpKind, r: u32, creation: bool) -> Option<Scalar> {
    let r = r as i64;
    let koy = || Scalar::v_pow(r) / sym(2 * r);
    let generic = |plus: bool| {
        let s = if plus { 1 } else { -1 };
        Scalar::v_pow(-s * r) / sym(r) * Scalar::from_int(s)
    };
    use OpKind::*;
    match (kind, creation) {
        (XPlus, true) => Some(Scalar::v_pow(-r) / sym(r)),
        (XPlus, false) => Some(-(Scalar::v_pow(-r) / sym(r))),
        (Phi, true) => Some(-(Scalar::v_pow(2) - Scalar::v_pow(-2))),
        (Koyama | KoyamaMinus, true) => Some(koy()),
        (KoyamaMinusInv, true) => Some(-koy()),
        (Koyama | KoyamaPlus, false) => Some(-koy()),
        (KoyamaPlusInv, false) => Some(koy()),
        (EMinus { plus, negated }, true) => {
            let b = -generic(plus);
            Some(if negated { -b } else { b })
        }
        (EPlus { plus, negated }, false) => {
            let a = generic(plus);
            Some(if negated { -a } else { a })
        }
        _ => None,
    }
}

/// Coefficient of `a(−r) z^r` in the creation exponent.
fn beta(kind: OpKind, r: u32) -> Option<Scalar> {
    MODES.with(|m| m.borrow_mut().entry((kind, r, true)).or_insert_with(|| compute_mode(kind, r, true)).clone())
}

/// Coefficient of `a(r) z^{−r}` in the annihilation exponent.
fn alpha(kind: OpKind, r: u32) -> Option<Scalar> {
    MODES.with(|m| m.borrow_mut().entry((kind, r, false)).or_insert_with(|| compute_mode(kind, r, false)).clone())
}

fn compute_contraction(left: OpKind, right: OpKind) -> Result<Vec<(i64, i64)>, EngineError> {
    let (Some(a1), Some(b1)) = (alpha(left, 1), beta(right, 1)) else {
        return Ok(Vec::new());
    };
    let g1 = a1 * b1 * kappa(1);
    let terms = g1.as_laurent().ok_or(EngineError::NoClosedForm(left, right))?;
    let terms: Vec<(i64, i64)> = terms
        .into_iter()
        .map(|(k, c)| c.to_i64().map(|c| (k, c)))
        .collect::<Option<_>>()
        .ok_or(EngineError::NoClosedForm(left, right))?;
    for r in 2..=4u32 {
        let g = alpha(left, r).unwrap() * beta(right, r).unwrap() * kappa(r) * Scalar::from_int(r as i64);
        let expect = Scalar::from_laurent(terms.iter().map(|&(k, n)| (k * r as i64, BigInt::from(n))));
        if g != expect {
            return Err(EngineError::NoClosedForm(left, right));
        }
    }
    Ok(terms)
}

/// Exponents `(k, n_k)` with `r α_r β_r κ_r = Σ n_k v^{kr}`, so the contraction of
/// `left(z₁) right(z₂)` is `Π_k (1 − v^k z₂/z₁)^{−n_k}`.
pub fn contraction(left: OpKind, right: OpKind) -> Result<Vec<(i64, i64)>, EngineError> {
    CONTRACTIONS.with(|c| c.borrow_mut().entry((left, right)).or_insert_with(|| compute_contraction(left, right)).clone())
}

/// Product of all pairwise contractions at `z₂/z₁ = v^{γ_j − γ_i}`.
pub fn string_prefactor(ops: &[ElemOp]) -> Result<Scalar, EngineError> {
    let mut num = Scalar::one();
    let mut den = Scalar::one();
    let mut vanishes = false;
    for i in 0..ops.len() {
        for j in i + 1..ops.len() {
            let d = ops[j].shift - ops[i].shift;
            for (k, n) in contraction(ops[i].kind, ops[j].kind)? {
                let m = k + d;
                if m == 0 {
                    if n > 0 {
                        return Err(EngineError::Pole { left: i, right: j });
                    }
                    vanishes = true;
                    continue;
                }
                let f = Scalar::one() - Scalar::v_pow(m);
                if n < 0 {
                    num *= &f.pow(-n);
                } else {
                    den *= &f.pow(n);
                }
            }
        }
    }
    if vanishes {
        return Ok(Scalar::zero());
    }
    Ok(num / den)
}

struct LatticeOut {
    charge2: i64,
    z2: i64,
    vexp: i64,
    sign: i64,
}

fn lattice_pass(ops: &[ElemOp], charge2: i64) -> Result<LatticeOut, EngineError> {
    let mut h = charge2;
    let (mut z2, mut vexp, mut sign) = (0i64, 0i64, 1i64);
    for op in ops.iter().rev() {
        match op.kind.lattice() {
            Lattice::None => {}
            Lattice::X => {
                // z^{2h} v^{2hγ}, then e^{α}
                z2 += 2 * h;
                vexp += op.shift * h;
                h += 2;
            }
            Lattice::KInv => vexp -= 2 * h,
            Lattice::Koyama => {
                // (−z)^{h}, with (−1)^{h} read as (−1)^{⌊h⌋}
                z2 += h;
                if (op.shift * h) % 2 != 0 {
                    return Err(EngineError::NonIntegralPower);
                }
                vexp += op.shift * h / 2;
                if h.div_euclid(2) % 2 != 0 {
                    sign = -sign;
                }
                h += 1;
            }
        }
    }
    Ok(LatticeOut { charge2: h, z2, vexp, sign })
}

/// Doubled lowest `z`-exponent the string can produce on `state`.
pub fn string_lower_bound(ops: &[ElemOp], state: &FockState) -> Result<i64, EngineError> {
    let lat = lattice_pass(ops, state.charge2())?;
    let annihilates = ops.iter().any(|o| alpha(o.kind, 1).is_some());
    let drop = if annihilates { 2 * state.degree() as i64 } else { 0 };
    Ok(lat.z2 - drop)
}

fn binomial(n: u32, k: u32) -> i64 {
    (0..k as i64).fold(1i64, |acc, i| acc * (n as i64 - i) / (i + 1))
}

/// `exp(Σ A_r ∂_r)` on a divided-basis state: `(removed degree, remaining parts, coefficient)`.
pub(crate) fn annihilate(state: &FockState, a: &[Option<Scalar>]) -> Vec<(u32, Vec<u32>, Scalar)> {
    let mut groups: Vec<(u32, u32)> = Vec::new();
    for &p in state.parts() {
        match groups.last_mut() {
            Some((r, m)) if *r == p => *m += 1,
            _ => groups.push((p, 1)),
        }
    }
    let mut acc: Vec<(u32, Vec<u32>, Scalar)> = vec![(0, Vec::new(), Scalar::one())];
    for (r, m) in groups {
        let step = a.get(r as usize).cloned().flatten();
        let mut next = Vec::new();
        for (d, parts, c) in &acc {
            let jmax = if step.is_some() { m } else { 0 };
            for j in 0..=jmax {
                let coef = match &step {
                    Some(s) if j > 0 => c * s.pow(j as i64) * Scalar::from_int(binomial(m, j)),
                    _ => c.clone(),
                };
                let mut p = parts.clone();
                p.extend(std::iter::repeat(r).take((m - j) as usize));
                next.push((d + r * j, p, coef));
            }
        }
        acc = next;
    }
    acc
}

/// Terms of `exp(Σ_{r≥1} B_r x_r)` of total size `≤ nmax`: `(size, parts descending, coefficient)`.
pub fn creation_series(b: &[Option<Scalar>], nmax: u32) -> Vec<(u32, Vec<u32>, Scalar)> {
    fn rec(
        b: &[Option<Scalar>],
        max_part: u32,
        budget: u32,
        parts: &mut Vec<u32>,
        coef: &Scalar,
        out: &mut Vec<(u32, Vec<u32>, Scalar)>,
    ) {
        out.push((parts.iter().sum(), parts.clone(), coef.clone()));
        for r in (1..=max_part.min(budget)).rev() {
            let Some(br) = b.get(r as usize).cloned().flatten() else { continue };
            if br.is_zero() {
                continue;
            }
            // parts are generated descending; k copies of r at once
            let mut c = coef.clone();
            let mut k = 0u32;
            let len = parts.len();
            while (k + 1) * r <= budget {
                k += 1;
                c = c * &br / Scalar::from_int(k as i64);
                parts.push(r);
                rec(b, r - 1, budget - k * r, parts, &c, out);
            }
            parts.truncate(len);
        }
    }
    let mut out = Vec::new();
    rec(b, nmax, nmax, &mut Vec::new(), &Scalar::one(), &mut out);
    out.sort_by_key(|t| t.0);
    out
}

pub(crate) fn merge_desc(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] >= b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// `κ_r / [2r] = [r]/r`.
fn qint_ratio(r: u32) -> Scalar {
    sym(r as i64) / Scalar::from_int(r as i64)
}

/// Combined mode coefficients of a string in the divided basis.
pub(crate) fn combined_modes(ops: &[ElemOp], rmax: u32, creation: bool) -> Vec<Option<Scalar>> {
    let mut out = vec![None];
    for r in 1..=rmax {
        let mut acc: Option<Scalar> = None;
        for op in ops {
            let m = if creation { beta(op.kind, r) } else { alpha(op.kind, r) };
            if let Some(m) = m {
                let e = if creation { op.shift * r as i64 } else { -op.shift * r as i64 };
                let scale = if creation { sym(2 * r as i64) } else { qint_ratio(r) };
                let t = m * Scalar::v_pow(e) * scale;
                acc = Some(match acc {
                    Some(a) => a + t,
                    None => t,
                });
            }
        }
        out.push(acc.filter(|s| !s.is_zero()));
    }
    out
}

/// Coefficients in the divided basis, keyed by doubled `z`-exponent and state.
pub(crate) type DividedTerms = HashMap<(i64, FockState), Scalar>;

/// Divided-basis coordinates of a vector.
pub(crate) fn to_divided(v: &FockVector) -> Vec<(FockState, Scalar)> {
    v.iter().map(|(s, c)| (s.clone(), c * sigma(s.parts()))).collect()
}

pub(crate) fn from_divided(parts: &[u32], c: &Scalar) -> Scalar {
    c / sigma(parts)
}

/// Normally ordered part of the string on one divided-basis state, added into `acc`.
fn accumulate_normal(
    ops: &[ElemOp],
    state: &FockState,
    coef: &Scalar,
    hi2: i64,
    acc: &mut DividedTerms,
) -> Result<(), EngineError> {
    let lat = lattice_pass(ops, state.charge2())?;
    let a = combined_modes(ops, state.parts().first().copied().unwrap_or(0), false);
    let removed = annihilate(state, &a);
    let nmax = removed.iter().map(|(d, _, _)| (hi2 - lat.z2 + 2 * *d as i64).div_euclid(2)).max().unwrap_or(-1);
    if nmax < 0 {
        return Ok(());
    }
    let created = cached_creation(ops, nmax as u32);
    let base = coef * Scalar::v_pow(lat.vexp) * Scalar::from_int(lat.sign);
    for (d, nu, c1) in &removed {
        let e0 = lat.z2 - 2 * *d as i64;
        let c01 = &base * c1;
        for (n, lam, c2) in created.iter() {
            let e = e0 + 2 * *n as i64;
            if e > hi2 {
                break;
            }
            let key = (e, FockState::from_sorted(merge_desc(nu, lam), lat.charge2));
            *acc.entry(key).or_default() += &(&c01 * c2);
        }
    }
    Ok(())
}

/// The string on divided-basis input; returns the doubled lower bound and divided-basis output.
pub(crate) fn apply_divided(
    ops: &[ElemOp],
    input: &[(FockState, Scalar)],
    hi2: i64,
) -> Result<(i64, DividedTerms), EngineError> {
    let pre = string_prefactor(ops)?;
    let mut lo = hi2 + 1;
    for (s, _) in input {
        lo = lo.min(string_lower_bound(ops, s)?);
    }
    let mut acc = DividedTerms::new();
    if !pre.is_zero() {
        for (s, c) in input {
            accumulate_normal(ops, s, &(c * &pre), hi2, &mut acc)?;
        }
    }
    acc.retain(|_, c| !c.is_zero());
    Ok((lo, acc))
}

/// The string applied to a basis state, exact for doubled exponents `≤ hi2`.
pub fn apply_string(ops: &[ElemOp], state: &FockState, hi2: i64) -> Result<LaurentBlock<FockVector>, EngineError> {
    apply_string_vec(ops, &FockVector::basis(state.clone()), hi2)
}

pub fn apply_string_vec(ops: &[ElemOp], v: &FockVector, hi2: i64) -> Result<LaurentBlock<FockVector>, EngineError> {
    let (lo, acc) = apply_divided(ops, &to_divided(v), hi2)?;
    let mut out = LaurentBlock::new(lo.min(hi2 + 1), hi2, true);
    for ((e, st), c) in acc {
        let k = from_divided(st.parts(), &c);
        out.add_term(e, &FockVector::basis(st).scale(&k));
    }
    Ok(out)
}

/// A single exponential: `E₋^{±}(±a, z v^γ)`, `E₊^{±}(±a, z v^γ)`, or `ℰ_∓(z v^γ)^{±1}`.
pub fn exp_op_apply(
    kind: ExpKind,
    plus: bool,
    negated: bool,
    shift: i64,
    v: &FockVector,
    hi2: i64,
) -> LaurentBlock<FockVector> {
    let k = match kind {
        ExpKind::EMinus => OpKind::EMinus { plus, negated },
        ExpKind::EPlus => OpKind::EPlus { plus, negated },
        ExpKind::KoyamaEMinus if plus => OpKind::KoyamaMinus,
        ExpKind::KoyamaEMinus => OpKind::KoyamaMinusInv,
        ExpKind::KoyamaEPlus if plus => OpKind::KoyamaPlus,
        ExpKind::KoyamaEPlus => OpKind::KoyamaPlusInv,
    };
    apply_string_vec(&[ElemOp::new(k, shift)], v, hi2).expect("a single exponential has no contractions")
}

pub fn x_plus_apply(v: &FockVector, hi2: i64) -> LaurentBlock<FockVector> {
    apply_string_vec(&[ElemOp::new(OpKind::XPlus, 0)], v, hi2).expect("single current")
}

pub fn phi_apply(v: &FockVector, hi2: i64) -> LaurentBlock<FockVector> {
    apply_string_vec(&[ElemOp::new(OpKind::Phi, 0)], v, hi2).expect("single current")
}

pub fn koyama_apply(v: &FockVector, hi2: i64) -> Result<LaurentBlock<FockVector>, EngineError> {
    apply_string_vec(&[ElemOp::new(OpKind::Koyama, 0)], v, hi2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vac() -> FockVector {
        FockVector::vacuum()
    }

    #[test]
    fn x_plus_on_vacuum() {
        let b = x_plus_apply(&vac(), 8);
        assert_eq!(b.coeff(0), FockVector::basis(FockState::charged(1)));
        assert!(b.iter().all(|(e, _)| *e >= 0));
        let b1 = x_plus_apply(&FockVector::basis(FockState::charged(1)), 12);
        assert_eq!(b1.lowest().unwrap().0, 4);
        assert!(b1.iter().all(|(_, v)| v.iter().all(|(s, _)| s.charge2() == 4)));
    }

    #[test]
    fn phi_low_coefficients() {
        let b = phi_apply(&FockVector::basis(FockState::charged(2)), 4);
        assert_eq!(b.coeff(0), FockVector::basis(FockState::charged(2)).scale(&Scalar::q_pow(-4)));
        let b0 = phi_apply(&vac(), 4);
        let expect = FockVector::basis(FockState::new(vec![1], 0)).scale(&-(Scalar::q_pow(1) - Scalar::q_pow(-1)));
        assert_eq!(b0.coeff(2), expect);
    }

    #[test]
    fn single_exponentials_first_order() {
        let a1 = FockState::new(vec![1], 0);
        let e = exp_op_apply(ExpKind::EMinus, true, true, 0, &vac(), 4);
        assert_eq!(e.coeff(2), FockVector::basis(a1.clone()).scale(&Scalar::v_pow(-1)));
        let k = exp_op_apply(ExpKind::KoyamaEMinus, true, false, 0, &vac(), 4);
        assert_eq!(k.coeff(2), FockVector::basis(a1).scale(&(Scalar::v_pow(1) / sym(2))));
        let p = exp_op_apply(ExpKind::EPlus, false, false, 3, &vac(), 6);
        assert_eq!(p.len(), 1);
        assert_eq!(p.coeff(0), vac());
    }

    #[test]
    fn koyama_on_vacuum() {
        let b = koyama_apply(&vac(), 4).unwrap();
        assert_eq!(b.coeff(0), FockVector::basis(FockState::new(vec![], 1)));
        assert!(b.iter().all(|(_, v)| v.iter().all(|(s, _)| s.charge2() == 1)));
    }

    #[test]
    fn contraction_closed_forms() {
        assert_eq!(contraction(OpKind::XPlus, OpKind::XPlus).unwrap(), vec![(-4, -1), (0, -1)]);
        assert_eq!(contraction(OpKind::XPlus, OpKind::Phi).unwrap(), vec![(-5, -1), (3, 1)]);
        assert_eq!(contraction(OpKind::XPlus, OpKind::KoyamaMinus).unwrap(), vec![(0, -1)]);
        assert!(contraction(OpKind::Phi, OpKind::XPlus).unwrap().is_empty());
        assert!(contraction(OpKind::KoyamaPlus, OpKind::KoyamaMinus).is_err());
    }

    #[test]
    fn adjacent_currents_vanish_and_reversed_phi_is_a_pole() {
        let xs = [ElemOp::new(OpKind::XPlus, 0), ElemOp::new(OpKind::XPlus, 4)];
        assert!(string_prefactor(&xs).unwrap().is_zero());
        let bad = [ElemOp::new(OpKind::XPlus, 4), ElemOp::new(OpKind::Phi, 1)];
        assert_eq!(string_prefactor(&bad), Err(EngineError::Pole { left: 0, right: 1 }));
    }

    #[test]
    fn creation_series_matches_exponential_counts() {
        let b: Vec<Option<Scalar>> = (0..=6).map(|r| (r > 0).then(Scalar::one)).collect();
        let terms = creation_series(&b, 6);
        // one term per partition of n ≤ 6: 1+1+2+3+5+7+11
        assert_eq!(terms.len(), 30);
        let single: Vec<_> = terms.iter().filter(|t| t.1 == vec![1, 1, 1]).collect();
        assert_eq!(single[0].2, Scalar::ratio(1, 6));
    }
}

//! The level-`c` module `(L₀)^{⊗c}` and the coproduct currents acting on it.

use crate::fock::{apply_string, string_lower_bound, string_prefactor, states_up_to_weight, ElemOp, EngineError, FockState, FockVector, OpKind};
use crate::laurent::{BiBlock, Coeff, LaurentBlock};
use crate::scalars::Scalar;
use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::rc::Rc;

/// Finite combination of `c`-fold tensor products of Fock states.
#[derive(Clone, Debug, Default)]
pub struct TensorVector {
    level: usize,
    terms: BTreeMap<Vec<FockState>, Scalar>,
}

impl PartialEq for TensorVector {
    fn eq(&self, o: &Self) -> bool {
        self.terms == o.terms
    }
}

impl TensorVector {
    pub fn zero(level: usize) -> Self {
        TensorVector { level, terms: BTreeMap::new() }
    }

    pub fn basis(states: Vec<FockState>) -> Self {
        assert!(!states.is_empty(), "level must be at least 1");
        let mut t = Self::zero(states.len());
        t.terms.insert(states, Scalar::one());
        t
    }

    pub fn vacuum(level: usize) -> Self {
        Self::basis(vec![FockState::vacuum(); level])
    }

    /// `v₁ ⊗ ··· ⊗ v_c`.
    pub fn tensor(factors: &[FockVector]) -> Self {
        let mut acc: Vec<(Vec<FockState>, Scalar)> = vec![(Vec::new(), Scalar::one())];
        for f in factors {
            let mut next = Vec::new();
            for (p, c) in &acc {
                for (s, k) in f.iter() {
                    let mut q = p.clone();
                    q.push(s.clone());
                    next.push((q, c * k));
                }
            }
            acc = next;
        }
        let mut out = Self::zero(factors.len());
        for (p, c) in acc {
            out.add_term(p, &c);
        }
        out
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn add_term(&mut self, states: Vec<FockState>, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        if self.level == 0 {
            self.level = states.len();
        }
        assert_eq!(states.len(), self.level, "tensor length must match the level");
        match self.terms.get_mut(&states) {
            Some(x) => {
                *x += c;
                if x.is_zero() {
                    self.terms.remove(&states);
                }
            }
            None => {
                self.terms.insert(states, c.clone());
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<FockState>, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, states: &[FockState]) -> Scalar {
        self.terms.get(states).cloned().unwrap_or_default()
    }
}

/// Doubled charge of every factor.
pub fn charge_profile(states: &[FockState]) -> Vec<i64> {
    states.iter().map(|s| s.charge2()).collect()
}

/// `Σ (|λ⁽ʲ⁾| + h_j²)`.
pub fn tensor_weight(states: &[FockState]) -> i64 {
    states.iter().map(|s| s.weight4()).sum::<i64>() / 4
}

/// All `c`-fold tensor states of `L₀` with total weight `≤ w`.
pub fn tensor_states_up_to_weight(c: usize, w: u32) -> Vec<Vec<FockState>> {
    let singles = states_up_to_weight(w);
    let mut acc: Vec<(Vec<FockState>, i64)> = vec![(Vec::new(), 0)];
    for _ in 0..c {
        let mut next = Vec::new();
        for (p, wt) in &acc {
            for s in &singles {
                let w2 = wt + s.weight4() / 4;
                if w2 <= w as i64 {
                    let mut q = p.clone();
                    q.push(s.clone());
                    next.push((q, w2));
                }
            }
        }
        acc = next;
    }
    acc.into_iter().map(|(p, _)| p).collect()
}

impl Coeff for TensorVector {
    fn zero() -> Self {
        Self::default()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add_assign(&mut self, o: &Self) {
        for (s, c) in &o.terms {
            self.add_term(s.clone(), c);
        }
    }
    fn scale(&self, k: &Scalar) -> Self {
        if k.is_zero() {
            return Self::zero(self.level);
        }
        TensorVector { level: self.level, terms: self.terms.iter().map(|(s, c)| (s.clone(), c * k)).collect() }
    }
}

impl fmt::Display for TensorVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(s, c)| {
                let fs: Vec<String> = s.iter().map(|x| x.to_string()).collect();
                format!("({}) {}", c, fs.join(" ⊗ "))
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Operators that one current `x(z v^γ)` contributes to factor `j` (0-based) when it is
/// carried by factor `l` (0-based): `φ(z v^{γ+2j+1})` for `j < l`, `x⁺(z v^{γ+2l})` for `j = l`.
fn current_on_factor(gamma: i64, l: usize, j: usize) -> Option<ElemOp> {
    use std::cmp::Ordering::*;
    match j.cmp(&l) {
        Less => Some(ElemOp::new(OpKind::Phi, gamma + 2 * j as i64 + 1)),
        Equal => Some(ElemOp::new(OpKind::XPlus, gamma + 2 * l as i64)),
        Greater => None,
    }
}

/// Per-factor strings of a product of level-`c` currents under one assignment.
pub fn factor_strings(gammas: &[i64], assignment: &[usize], c: usize) -> Vec<Vec<ElemOp>> {
    (0..c)
        .map(|j| gammas.iter().zip(assignment).filter_map(|(&g, &l)| current_on_factor(g, l, j)).collect())
        .collect()
}

type FactorKey = (Vec<ElemOp>, FockState, i64);

thread_local! {
    static FACTOR_CACHE: RefCell<HashMap<FactorKey, Rc<LaurentBlock<FockVector>>>> = RefCell::new(HashMap::new());
}

const FACTOR_CACHE_LIMIT: usize = 200_000;

/// Drop the memoized single-factor blocks.
pub fn clear_cache() {
    FACTOR_CACHE.with(|c| c.borrow_mut().clear());
}

/// One factor's string on one state, memoized up to a common shift of all arguments.
fn factor_block(ops: &[ElemOp], state: &FockState, hi2: i64) -> Result<Rc<LaurentBlock<FockVector>>, EngineError> {
    let delta = ops.first().map(|o| o.shift).unwrap_or(0);
    let norm: Vec<ElemOp> = ops.iter().map(|o| ElemOp::new(o.kind, o.shift - delta)).collect();
    let key = (norm, state.clone(), hi2);
    let hit = FACTOR_CACHE.with(|c| c.borrow().get(&key).cloned());
    let base = match hit {
        Some(b) => b,
        None => {
            let b = Rc::new(apply_string(&key.0, state, hi2)?);
            FACTOR_CACHE.with(|c| {
                let mut c = c.borrow_mut();
                if c.len() >= FACTOR_CACHE_LIMIT {
                    c.clear();
                }
                c.insert(key, b.clone());
            });
            b
        }
    };
    if delta == 0 {
        return Ok(base);
    }
    Ok(Rc::new(base.substitute_v(delta).map_err(|_| EngineError::NonIntegralPower)?))
}

/// `⊗_j S_j` applied to a tensor state, where `S_j` is an operator string on factor `j`;
/// `None` when some factor is identically zero.
fn apply_factorwise(
    strings: &[Vec<ElemOp>],
    states: &[FockState],
    hi2: i64,
) -> Result<(i64, Option<Vec<(i64, Vec<FockState>, Scalar)>>), EngineError> {
    let lows: Vec<i64> = strings
        .iter()
        .zip(states)
        .map(|(ops, s)| string_lower_bound(ops, s))
        .collect::<Result<_, _>>()?;
    for ops in strings {
        if string_prefactor(ops)?.is_zero() {
            return Ok((lows.iter().sum(), None));
        }
    }
    let total_lo: i64 = lows.iter().sum();
    if total_lo > hi2 {
        return Ok((total_lo, Some(Vec::new())));
    }
    let mut acc: Vec<(i64, Vec<FockState>, Scalar)> = vec![(0, Vec::new(), Scalar::one())];
    let mut rest_lo = total_lo;
    for (j, (ops, s)) in strings.iter().zip(states).enumerate() {
        rest_lo -= lows[j];
        let hij = hi2 - (total_lo - lows[j]);
        let block = if ops.is_empty() {
            Rc::new(LaurentBlock::from_terms([(0, FockVector::basis(s.clone()))], 0, hij.max(0)))
        } else {
            factor_block(ops, s, hij)?
        };
        if block.is_zero() {
            return Ok((total_lo, None));
        }
        let mut next = Vec::new();
        for (e, prefix, c) in &acc {
            for (ej, w) in block.iter() {
                let e2 = e + ej;
                if e2 + rest_lo > hi2 {
                    continue;
                }
                for (st, k) in w.iter() {
                    let mut p = prefix.clone();
                    p.push(st.clone());
                    next.push((e2, p, c * k));
                }
            }
        }
        acc = next;
        if acc.is_empty() {
            break;
        }
    }
    Ok((total_lo, Some(acc)))
}

/// All assignments `{0..c−1}^m` of `m` currents to factors.
fn assignments(m: usize, c: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|a| {
                (0..c).map(move |l| {
                    let mut b = a.clone();
                    b.push(l);
                    b
                })
            })
            .collect();
    }
    out
}

/// Strings on every factor, summed over a list of assignments, applied to `v`.
fn apply_assignment_sum<F>(
    v: &TensorVector,
    hi2: i64,
    assigns: &[Vec<usize>],
    strings_for: F,
) -> Result<LaurentBlock<TensorVector>, EngineError>
where
    F: Fn(&[usize]) -> Vec<Vec<ElemOp>>,
{
    let c = v.level().max(1);
    let mut lo = hi2 + 1;
    let mut acc: HashMap<(i64, Vec<FockState>), Scalar> = HashMap::new();
    for a in assigns {
        let strings = strings_for(a);
        for (states, coef) in v.iter() {
            let (l, terms) = apply_factorwise(&strings, states, hi2)?;
            lo = lo.min(l);
            for (e, st, k) in terms.into_iter().flatten() {
                *acc.entry((e, st)).or_default() += &(coef * &k);
            }
        }
    }
    let mut out = LaurentBlock::new(lo.min(hi2 + 1), hi2, true);
    for ((e, st), k) in acc {
        if !k.is_zero() {
            let mut t = TensorVector::zero(c);
            t.add_term(st, &k);
            out.add_term(e, &t);
        }
    }
    Ok(out)
}

/// `x(z v^{γ₁}) ··· x(z v^{γ_m})` on the level-`c` module, with `x = Σ_l x^{(l)}`.
pub fn current_string_apply(gammas: &[i64], v: &TensorVector, hi2: i64) -> Result<LaurentBlock<TensorVector>, EngineError> {
    let c = v.level().max(1);
    apply_assignment_sum(v, hi2, &assignments(gammas.len(), c), |a| factor_strings(gammas, a, c))
}

/// `A(z₁)B(z)` on `v` by literal composition, `A`, `B` being current strings with shifts
/// `v^{γ}`; exact for doubled exponents `≤ hi1` in `z₁` and `≤ hi2` in `z`.
pub fn current_string_pair(
    outer: &[i64],
    inner: &[i64],
    v: &TensorVector,
    hi1: i64,
    hi2: i64,
) -> Result<BiBlock<TensorVector>, EngineError> {
    let first = current_string_apply(inner, v, hi2)?;
    let mut lo1 = hi1;
    let mut cols = Vec::new();
    for (e, w) in first.iter() {
        let b = current_string_apply(outer, w, hi1)?;
        lo1 = lo1.min(b.window().0);
        cols.push((*e, b));
    }
    let lo2 = first.window().0.min(hi2);
    let mut out = BiBlock::new((lo1, hi1), (lo2, hi2), true, true);
    for (e, b) in cols {
        for (e1, w) in b.iter() {
            out.add_term(*e1, e, w);
        }
    }
    Ok(out)
}

/// The product restricted to one assignment of currents to factors (0-based).
pub fn assigned_string_apply(
    gammas: &[i64],
    assignment: &[usize],
    v: &TensorVector,
    hi2: i64,
) -> Result<LaurentBlock<TensorVector>, EngineError> {
    let c = v.level().max(1);
    apply_assignment_sum(v, hi2, &[assignment.to_vec()], |a| factor_strings(gammas, a, c))
}

/// `x^{+(l)}(z)` for `l ∈ 1..=c`.
pub fn coproduct_current_apply(l: usize, v: &TensorVector, hi2: i64) -> LaurentBlock<TensorVector> {
    let c = v.level();
    assert!((1..=c).contains(&l), "factor index out of range");
    apply_assignment_sum(v, hi2, &[vec![l - 1]], |a| factor_strings(&[0], a, c)).expect("a single current has no poles")
}

/// `Δ^{(c−1)} x⁺(z) = Σ_l x^{+(l)}(z)`.
pub fn level_x_apply(v: &TensorVector, hi2: i64) -> LaurentBlock<TensorVector> {
    current_string_apply(&[0], v, hi2).expect("a single current has no poles")
}

/// Keep the terms whose doubled factor charges equal `profile`.
pub fn georgiev_project(v: &TensorVector, profile: &[i64]) -> TensorVector {
    let mut out = TensorVector::zero(v.level());
    for (s, c) in v.iter() {
        if charge_profile(s) == profile {
            out.add_term(s.clone(), c);
        }
    }
    out
}

/// `K ⊗ ··· ⊗ K`: `q^{2h}` on a factor of charge `h`.
pub fn diagonal_k(v: &TensorVector) -> TensorVector {
    let mut out = TensorVector::zero(v.level());
    for (s, c) in v.iter() {
        let h2: i64 = s.iter().map(|x| x.charge2()).sum();
        out.add_term(s.clone(), &(c * Scalar::v_pow(2 * h2)));
    }
    out
}

/// `ℰ_c(z)^{∓1} · A · ℰ_c(z)^{±1}` on `v`, where `A` is the product of currents
/// `x(z q̲^{s_i})` and `ℰ_c(z) = ℰ₋(z q̲^p) ⊗ ··· ⊗ ℰ₋(z q̲^{p+c−1})`.
/// `invert = false` conjugates as `ℰ_c^{−1} A ℰ_c`.
pub fn conjugate_by_ec(
    shifts: &[i64],
    p: i64,
    invert: bool,
    v: &TensorVector,
    hi2: i64,
) -> Result<LaurentBlock<TensorVector>, EngineError> {
    let c = v.level().max(1);
    let gammas: Vec<i64> = shifts.iter().map(|s| 4 * s).collect();
    let (left, right) = if invert {
        (OpKind::KoyamaMinus, OpKind::KoyamaMinusInv)
    } else {
        (OpKind::KoyamaMinusInv, OpKind::KoyamaMinus)
    };
    apply_assignment_sum(v, hi2, &assignments(shifts.len(), c), |a| {
        let mut strings = factor_strings(&gammas, a, c);
        for (j, s) in strings.iter_mut().enumerate() {
            let g = 4 * (p + j as i64);
            s.insert(0, ElemOp::new(left, g));
            s.push(ElemOp::new(right, g));
        }
        strings
    })
}

/// The scalar that conjugation by `ℰ_c` produces for one assignment (0-based factors):
/// `Π_i (1 − q^{2(p−s_i)+l_i})^{±1}`.
pub fn conjugation_factor(shifts: &[i64], assignment: &[usize], p: i64, invert: bool) -> Result<Scalar, EngineError> {
    let mut out = Scalar::one();
    for (i, (&s, &l)) in shifts.iter().zip(assignment).enumerate() {
        let f = Scalar::one() - Scalar::q_pow(2 * (p - s) + l as i64);
        if invert {
            if f.is_zero() {
                return Err(EngineError::Pole { left: i, right: shifts.len() });
            }
            out = out / f;
        } else {
            out = out * f;
        }
    }
    Ok(out)
}

/// Sum of `conjugation_factor · A_assignment(v)` over all assignments.
pub fn conjugation_prediction(
    shifts: &[i64],
    p: i64,
    invert: bool,
    v: &TensorVector,
    hi2: i64,
) -> Result<LaurentBlock<TensorVector>, EngineError> {
    let c = v.level().max(1);
    let gammas: Vec<i64> = shifts.iter().map(|s| 4 * s).collect();
    let mut out: Option<LaurentBlock<TensorVector>> = None;
    for a in assignments(shifts.len(), c) {
        let k = conjugation_factor(shifts, &a, p, invert)?;
        let b = assigned_string_apply(&gammas, &a, v, hi2)?.scale(&k);
        out = Some(match out {
            Some(mut o) => {
                o.add_assign_block(&b);
                o
            }
            None => b,
        });
    }
    Ok(out.unwrap_or_else(|| LaurentBlock::new(hi2 + 1, hi2, true)))
}

//! The level-one module `M(1) ⊗ C{P}`: Heisenberg partitions times a lattice charge.

mod engine;
pub mod compose;

pub use engine::{
    apply_string, apply_string_vec, contraction, creation_series, exp_op_apply, koyama_apply, phi_apply,
    string_lower_bound, string_prefactor, x_plus_apply, ElemOp, EngineError, ExpKind, OpKind,
};

use crate::laurent::Coeff;
use crate::qcalc::{qint, Flavor};
use crate::scalars::Scalar;
use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

/// `a(−λ₁)···a(−λ_k) e^{hα}`, parts sorted descending, charge stored as `2h`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct FockState {
    parts: Vec<u32>,
    charge2: i64,
}

impl FockState {
    pub fn new(mut parts: Vec<u32>, charge2: i64) -> Self {
        assert!(parts.iter().all(|&p| p > 0), "parts must be positive");
        parts.sort_unstable_by(|a, b| b.cmp(a));
        FockState { parts, charge2 }
    }

    pub fn vacuum() -> Self {
        FockState { parts: Vec::new(), charge2: 0 }
    }

    /// Lattice-only state `e^{hα}` for integer `h`.
    pub fn charged(h: i64) -> Self {
        FockState { parts: Vec::new(), charge2: 2 * h }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn charge2(&self) -> i64 {
        self.charge2
    }

    /// Integer charge, if the state lies in `L₀`.
    pub fn charge(&self) -> Option<i64> {
        (self.charge2 % 2 == 0).then_some(self.charge2 / 2)
    }

    /// Heisenberg degree `Σ parts`.
    pub fn degree(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// Four times the weight `Σ parts + h²`.
    pub fn weight4(&self) -> i64 {
        4 * self.degree() as i64 + self.charge2 * self.charge2
    }

    pub fn multiplicity(&self, r: u32) -> u32 {
        self.parts.iter().filter(|&&p| p == r).count() as u32
    }

    pub(crate) fn from_sorted(parts: Vec<u32>, charge2: i64) -> Self {
        FockState { parts, charge2 }
    }
}

impl fmt::Display for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p: Vec<String> = self.parts.iter().map(|x| x.to_string()).collect();
        let h = if self.charge2 % 2 == 0 { (self.charge2 / 2).to_string() } else { format!("{}/2", self.charge2) };
        write!(f, "[{}]|h={}", p.join(","), h)
    }
}

/// Finite linear combination of Fock states.
#[derive(Clone, PartialEq, Eq, Default, Debug)]
pub struct FockVector {
    terms: BTreeMap<FockState, Scalar>,
}

impl FockVector {
    pub fn basis(s: FockState) -> Self {
        let mut v = Self::default();
        v.terms.insert(s, Scalar::one());
        v
    }

    pub fn vacuum() -> Self {
        Self::basis(FockState::vacuum())
    }

    pub fn add_term(&mut self, s: FockState, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&s) {
            Some(x) => {
                *x += c;
                if x.is_zero() {
                    self.terms.remove(&s);
                }
            }
            None => {
                self.terms.insert(s, c.clone());
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FockState, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, s: &FockState) -> Scalar {
        self.terms.get(s).cloned().unwrap_or_default()
    }

    /// Keep the terms of the given doubled charge.
    pub fn charge_component(&self, charge2: i64) -> Self {
        FockVector {
            terms: self.terms.iter().filter(|(s, _)| s.charge2 == charge2).map(|(s, c)| (s.clone(), c.clone())).collect(),
        }
    }
}

impl Coeff for FockVector {
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
            return Self::default();
        }
        FockVector { terms: self.terms.iter().map(|(s, c)| (s.clone(), c * k)).collect() }
    }
}

impl fmt::Display for FockVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(s, c)| format!("({}) {}", c, s)).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

thread_local! {
    static KAPPA: RefCell<HashMap<u32, Scalar>> = RefCell::new(HashMap::new());
}

/// `[a(r), a(−r)] = [2r][r]/r` in symmetric q-integers.
pub fn kappa(r: u32) -> Scalar {
    KAPPA.with(|k| {
        k.borrow_mut()
            .entry(r)
            .or_insert_with(|| {
                let r = r as i64;
                qint(2 * r, Flavor::Symmetric) * qint(r, Flavor::Symmetric) / Scalar::from_int(r)
            })
            .clone()
    })
}

/// `a(r)` for `r ≠ 0`: creation for `r < 0`, `κ_r ∂/∂a(−r)` for `r > 0`.
pub fn heis_act(r: i64, v: &FockVector) -> FockVector {
    assert!(r != 0, "a(0) is not part of the oscillator algebra");
    let mut out = FockVector::default();
    let n = r.unsigned_abs() as u32;
    for (s, c) in &v.terms {
        if r < 0 {
            let mut p = s.parts.clone();
            p.push(n);
            out.add_term(FockState::new(p, s.charge2), c);
        } else {
            let m = s.multiplicity(n);
            if m == 0 {
                continue;
            }
            let mut p = s.parts.clone();
            let i = p.iter().position(|&x| x == n).unwrap();
            p.remove(i);
            out.add_term(FockState::from_sorted(p, s.charge2), &(c * kappa(n) * Scalar::from_int(m)));
        }
    }
    out
}

/// Partitions of `n` into parts `≤ max`, descending.
pub fn partitions(n: u32, max: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in (1..=max.min(n)).rev() {
        for mut rest in partitions(n - first, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// All states of `L₀` with weight `Σ parts + h² ≤ w`.
pub fn states_up_to_weight(w: u32) -> Vec<FockState> {
    let mut out = Vec::new();
    let hmax = (w as f64).sqrt() as i64;
    for h in -hmax..=hmax {
        let h2 = (h * h) as u32;
        if h2 > w {
            continue;
        }
        for d in 0..=(w - h2) {
            for p in partitions(d, d) {
                out.push(FockState::from_sorted(p, 2 * h));
            }
        }
    }
    out
}

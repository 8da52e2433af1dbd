//! Two-variable products `A(z₁)B(z)`, built by literal composition or in normal order.

use super::engine::{
    annihilate, apply_divided, cached_creation, combined_modes, from_divided, merge_desc, sigma, to_divided,
};
use std::collections::HashMap;
use super::{ElemOp, EngineError, FockState, FockVector, OpKind};
use crate::laurent::{BiBlock, Coeff, LaurentBlock};
use crate::scalars::Scalar;

/// `outer(z₁)(inner(z) v)`; exact for doubled exponents `≤ hi1` in `z₁` and `≤ hi2` in `z`.
pub fn compose(
    outer: &[ElemOp],
    inner: &[ElemOp],
    v: &FockVector,
    hi1: i64,
    hi2: i64,
) -> Result<BiBlock<FockVector>, EngineError> {
    let (lo2, first) = apply_divided(inner, &to_divided(v), hi2)?;
    let mut columns: HashMap<i64, Vec<(FockState, Scalar)>> = HashMap::new();
    for ((e, st), c) in first {
        columns.entry(e).or_default().push((st, c));
    }
    let mut lo1 = hi1 + 1;
    let mut out_terms = Vec::new();
    for (e, col) in columns {
        let (lo, res) = apply_divided(outer, &col, hi1)?;
        lo1 = lo1.min(lo);
        out_terms.push((e, res));
    }
    let mut out = BiBlock::new((lo1.min(hi1), hi1), (lo2.min(hi2), hi2), true, true);
    for (e, res) in out_terms {
        for ((e1, st), c) in res {
            let k = from_divided(st.parts(), &c);
            out.add_term(e1, e, &FockVector::basis(st).scale(&k));
        }
    }
    Ok(out)
}

/// `:O₁(z₁)O₂(z):` with all creation modes left of all annihilation modes and every
/// `z^{∂α}` read on the input charge. Only `x⁺` and pure exponentials are accepted.
pub fn normal_ordered_pair(
    op1: ElemOp,
    op2: ElemOp,
    v: &FockVector,
    hi1: i64,
    hi2: i64,
) -> Result<BiBlock<FockVector>, EngineError> {
    for op in [op1, op2] {
        assert!(!matches!(op.kind, OpKind::Phi | OpKind::Koyama), "lattice part must be x⁺-type or absent");
    }
    let is_x = |o: ElemOp| o.kind == OpKind::XPlus;
    let mut parts: Vec<(i64, i64, FockState, Scalar)> = Vec::new();
    let (mut lo1, mut lo2) = (hi1 + 1, hi2 + 1);
    for (s, c) in v.iter() {
        let h = s.charge2();
        let (mut z1, mut z2, mut vexp, mut out_h) = (0, 0, 0, h);
        if is_x(op1) {
            z1 = 2 * h;
            vexp += op1.shift * h;
            out_h += 2;
        }
        if is_x(op2) {
            z2 = 2 * h;
            vexp += op2.shift * h;
            out_h += 2;
        }
        let deg = 2 * s.degree() as i64;
        lo1 = lo1.min(z1 - deg);
        lo2 = lo2.min(z2 - deg);
        let top = s.parts().first().copied().unwrap_or(0);
        let a2 = combined_modes(&[op2], top, false);
        let a1 = combined_modes(&[op1], top, false);
        let base = c * Scalar::v_pow(vexp) * sigma(s.parts());
        let mut acc: HashMap<(i64, i64, Vec<u32>), Scalar> = HashMap::new();
        for (d2, p2, c2) in annihilate(s, &a2) {
            let st2 = FockState::new(p2, h);
            for (d1, p1, c1) in annihilate(&st2, &a1) {
                let e1 = z1 - 2 * d1 as i64;
                let e2 = z2 - 2 * d2 as i64;
                if e1 > hi1 || e2 > hi2 {
                    continue;
                }
                let n2 = ((hi2 - e2) / 2) as u32;
                let n1 = ((hi1 - e1) / 2) as u32;
                let k = &c2 * &c1;
                let s2 = cached_creation(&[op2], n2);
                let s1 = cached_creation(&[op1], n1);
                for (m2, l2, k2) in s2.iter().take_while(|t| t.0 <= n2) {
                    let k = &k * k2;
                    let p12 = merge_desc(&p1, l2);
                    for (m1, l1, k1) in s1.iter().take_while(|t| t.0 <= n1) {
                        let key = (e1 + 2 * *m1 as i64, e2 + 2 * *m2 as i64, merge_desc(&p12, l1));
                        *acc.entry(key).or_default() += &(&k * k1);
                    }
                }
            }
        }
        for ((e1, e2, p), k) in acc {
            if !k.is_zero() {
                let k = &base * &k / sigma(&p);
                parts.push((e1, e2, FockState::new(p, out_h), k));
            }
        }
    }
    let mut out = BiBlock::new((lo1.min(hi1), hi1), (lo2.min(hi2), hi2), true, true);
    for (e1, e2, st, k) in parts {
        out.add_term(e1, e2, &FockVector::basis(st).scale(&k));
    }
    Ok(out)
}

/// Substitute `z₁ = z v^{g}` in a block and sum the anti-diagonals.
pub fn specialize_ratio(b: &BiBlock<FockVector>, g: i64) -> Result<LaurentBlock<FockVector>, crate::laurent::LaurentError> {
    b.substitute_v(g, 0)?.diagonal_limit()
}

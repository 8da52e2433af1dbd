use qvertex::fock::compose::{compose, normal_ordered_pair, specialize_ratio};
use qvertex::fock::{
    apply_string, heis_act, kappa, states_up_to_weight, x_plus_apply, ElemOp, FockState, FockVector, OpKind,
};
use qvertex::laurent::{BiBlock, Coeff};
use qvertex::scalars::Scalar;

const W: i64 = 16;

fn x(shift: i64) -> ElemOp {
    ElemOp::new(OpKind::XPlus, shift)
}

/// Charges 0 and 1, weight ≤ 3: eleven states.
fn sample_states() -> Vec<FockState> {
    let s: Vec<FockState> = states_up_to_weight(3).into_iter().filter(|s| s.charge2() >= 0).collect();
    assert!(s.len() >= 10);
    s
}

fn window_view(b: &BiBlock<FockVector>) -> BiBlock<FockVector> {
    b.restrict((-W, W), (-W, W)).expect("window certified")
}

#[test]
fn heisenberg_commutators_on_low_weight_states() {
    for s in states_up_to_weight(3) {
        let v = FockVector::basis(s.clone());
        for r in -4i64..=4 {
            for t in -4i64..=4 {
                if r == 0 || t == 0 {
                    continue;
                }
                let lhs = {
                    let mut a = heis_act(r, &heis_act(t, &v));
                    a.add_assign(&heis_act(t, &heis_act(r, &v)).scale(&Scalar::from_int(-1)));
                    a
                };
                let expect = if r + t == 0 {
                    let k = kappa(r.unsigned_abs() as u32);
                    v.scale(&if r > 0 { k } else { -k })
                } else {
                    FockVector::zero()
                };
                assert_eq!(lhs, expect, "state {s}, r={r}, s={t}");
            }
        }
    }
}

#[test]
fn product_of_two_currents_factors_through_normal_order() {
    // x(z₁)x(z) = (z₁ − z)(z₁ − q^{−2} z) :x(z₁)x(z):
    let qm2 = Scalar::q_pow(-2);
    let poly = [((4, 0), Scalar::one()), ((2, 2), -(Scalar::one() + &qm2)), ((0, 4), qm2)];
    for s in sample_states() {
        let v = FockVector::basis(s.clone());
        let lhs = compose(&[x(0)], &[x(0)], &v, W, W).unwrap();
        let rhs = normal_ordered_pair(x(0), x(0), &v, W, W).unwrap().mul_poly2(&poly).unwrap();
        assert!(window_view(&lhs).agrees_with(&window_view(&rhs)), "state {s}");
        assert!(!window_view(&lhs).is_empty());
    }
}

#[test]
fn current_past_phi_after_clearing_the_pole() {
    // x(z₁)φ(z v)(1 − q² z/z₁) = q²(1 − q^{−2} z/z₁) φ(z v) x(z₁)
    let phi = ElemOp::new(OpKind::Phi, 1);
    let q2 = Scalar::q_pow(2);
    let left_poly = [(0, Scalar::one()), (1, -q2.clone())];
    let right_poly = [(0, q2.clone()), (1, -Scalar::one())];
    for s in sample_states() {
        let v = FockVector::basis(s.clone());
        let lhs = compose(&[x(0)], &[phi], &v, W + 2, W).unwrap().poly_mul(&left_poly).unwrap();
        // φ(z v)(x(z₁) v): compose in the other order, then swap the roles of the axes
        let swapped = compose(&[phi], &[x(0)], &v, W, W + 2).unwrap();
        let rhs = transpose(&swapped).poly_mul(&right_poly).unwrap();
        assert!(window_view(&lhs).agrees_with(&window_view(&rhs)), "state {s}");
    }
}

#[test]
fn current_past_koyama_creator() {
    // x(z₁)ℰ₋(z) = (1 − z/z₁) ℰ₋(z) x(z₁)
    let e = ElemOp::new(OpKind::KoyamaMinus, 0);
    for s in sample_states() {
        let v = FockVector::basis(s.clone());
        let lhs = compose(&[x(0)], &[e], &v, W + 2, W).unwrap();
        let rhs = transpose(&compose(&[e], &[x(0)], &v, W, W + 2).unwrap())
            .poly_mul(&[(0, Scalar::one()), (1, Scalar::from_int(-1))])
            .unwrap();
        assert!(window_view(&lhs).agrees_with(&window_view(&rhs)), "state {s}");
    }
}

#[test]
fn phi_commutes_with_koyama_creator() {
    let e = ElemOp::new(OpKind::KoyamaMinus, 0);
    let phi = ElemOp::new(OpKind::Phi, 0);
    for s in sample_states() {
        let v = FockVector::basis(s.clone());
        let lhs = compose(&[phi], &[e], &v, W, W).unwrap();
        let rhs = transpose(&compose(&[e], &[phi], &v, W, W).unwrap());
        assert!(window_view(&lhs).agrees_with(&window_view(&rhs)), "state {s}");
    }
}

/// `B(z₁, z) ↦ B(z, z₁)`.
fn transpose(b: &BiBlock<FockVector>) -> BiBlock<FockVector> {
    let (w1, w2) = b.windows();
    let (e1, e2) = b.lower_exact();
    let mut out = BiBlock::new(w2, w1, e2, e1);
    for ((a, c), v) in b.iter() {
        out.add_term(*c, *a, v);
    }
    out
}

#[test]
fn engine_agrees_with_contraction_times_normal_order() {
    // x(z v^{g₁}) x(z v^{g₂}) = C(v^{g₂−g₁}) (z v^{g₁})² · diag :x(z₁ v^{g₁}) x(z v^{g₂}):
    for (g1, g2) in [(0, 8), (0, 12), (4, 0), (2, 9)] {
        for s in sample_states().into_iter().take(4) {
            let v = FockVector::basis(s.clone());
            let engine = apply_string(&[x(g1), x(g2)], &s, W).unwrap();
            let no = normal_ordered_pair(x(0), x(0), &v, W + 8, W + 8).unwrap();
            let diag = no.substitute_v(g1, g2).unwrap().diagonal_limit().unwrap();
            let d = Scalar::v_pow(g2 - g1);
            let c = (Scalar::one() - &d) * (Scalar::one() - Scalar::v_pow(-4) * &d);
            let oracle = diag.mul_z(4).scale(&(c * Scalar::v_pow(2 * g1)));
            assert!(engine.agrees_with(&oracle.restrict(-W - 40, W).unwrap()), "shifts ({g1},{g2}) state {s}");
        }
    }
}

#[test]
fn lower_bound_of_x_plus_is_never_violated() {
    for s in states_up_to_weight(8) {
        let b = x_plus_apply(&FockVector::basis(s.clone()), 2 * s.charge2() + 6);
        let bound = 2 * s.charge2() - 2 * s.degree() as i64;
        if let Some((e, _)) = b.lowest() {
            assert!(e >= bound, "state {s}");
        }
        assert!(b.iter().all(|(_, w)| w.iter().all(|(t, _)| t.charge2() == s.charge2() + 2)));
    }
}

#[test]
fn ding_miwa_level_one_by_composition() {
    // the normally ordered pair at z₁ = q^{−2} z is multiplied by (z₁ − q^{−2} z) = 0,
    // and the engine returns the identically vanishing prefactor
    for s in states_up_to_weight(8) {
        let b = apply_string(&[x(0), x(4)], &s, 2 * s.charge2() + 8).unwrap();
        assert!(b.is_zero(), "state {s}");
    }
    let v = FockVector::vacuum();
    let no = normal_ordered_pair(x(0), x(0), &v, W, W).unwrap();
    let qm2 = Scalar::q_pow(-2);
    let poly = [((4, 0), Scalar::one()), ((2, 2), -(Scalar::one() + &qm2)), ((0, 4), qm2)];
    let full = no.mul_poly2(&poly).unwrap();
    let at = specialize_ratio(&full, -4).unwrap();
    assert!(at.is_zero());
}

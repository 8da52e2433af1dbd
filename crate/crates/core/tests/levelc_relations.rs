use qvertex::levelc::{
    conjugate_by_ec, conjugation_prediction, current_string_apply, diagonal_k, level_x_apply, tensor_states_up_to_weight,
    tensor_weight, TensorVector,
};
use qvertex::laurent::Coeff;
use qvertex::scalars::Scalar;

/// `x(z)x(zq²)···x(zq^{2c})`: consecutive arguments in ratio `q²`.
fn ding_miwa_shifts(c: usize) -> Vec<i64> {
    (0..=c as i64).map(|i| 4 * i).collect()
}

#[test]
fn ding_miwa_annihilates_low_weight_states() {
    for (c, w) in [(1usize, 6u32), (2, 6), (3, 4)] {
        let gammas = ding_miwa_shifts(c);
        let states = tensor_states_up_to_weight(c, w);
        for s in &states {
            let v = TensorVector::basis(s.clone());
            let b = current_string_apply(&gammas, &v, 24).unwrap();
            assert!(b.is_zero(), "level {c}, state {:?}", s);
        }
    }
}

#[test]
fn generic_products_do_not_vanish() {
    // arguments in ratio q̲ = q² are special, ratio q³ is not
    for c in 1..=3usize {
        let gammas: Vec<i64> = (0..=c as i64).map(|i| 6 * i).collect();
        let v = TensorVector::vacuum(c);
        let b = current_string_apply(&gammas, &v, 24).unwrap();
        assert!(!b.is_zero(), "level {c}");
    }
}

#[test]
fn diagonal_k_scales_the_current_by_q_squared() {
    for c in 1..=3usize {
        for s in tensor_states_up_to_weight(c, 2) {
            let v = TensorVector::basis(s.clone());
            let kinv = {
                let h2: i64 = s.iter().map(|x| x.charge2()).sum();
                v.scale(&Scalar::v_pow(-2 * h2))
            };
            let lhs = level_x_apply(&kinv, 12);
            let expect = level_x_apply(&v, 12).scale(&Scalar::q_pow(2));
            for (e, w) in lhs.iter() {
                assert_eq!(diagonal_k(w), expect.coeff(*e), "level {c}, state {s:?}, exponent {e}");
            }
            assert_eq!(lhs.len(), expect.len());
        }
    }
}

#[test]
fn conjugation_by_ec_is_assignmentwise_scalar() {
    for c in 1..=2usize {
        for s in tensor_states_up_to_weight(c, 1) {
            let v = TensorVector::basis(s.clone());
            for shifts in [vec![0i64], vec![0, 2], vec![1, -1]] {
                for p in [-1i64, 0, 2] {
                    let got = conjugate_by_ec(&shifts, p, false, &v, 12).unwrap();
                    let want = conjugation_prediction(&shifts, p, false, &v, 12).unwrap();
                    assert!(got.agrees_with(&want), "c={c} s={s:?} shifts={shifts:?} p={p}");
                }
            }
        }
    }
}

#[test]
fn conjugation_vanishes_when_a_shift_meets_p_at_level_one() {
    let v = TensorVector::vacuum(1);
    let b = conjugate_by_ec(&[3, 1], 3, false, &v, 16).unwrap();
    assert!(b.is_zero());
    let nz = conjugate_by_ec(&[3, 1], 5, false, &v, 16).unwrap();
    assert!(!nz.is_zero());
    let id = conjugate_by_ec(&[], 0, false, &v, 4).unwrap();
    assert_eq!(id.coeff(0), v);
    assert_eq!(id.len(), 1);
}

#[test]
fn tensor_weights_are_bounded() {
    for s in tensor_states_up_to_weight(3, 4) {
        assert!(tensor_weight(&s) <= 4);
    }
    assert_eq!(tensor_states_up_to_weight(1, 2).len(), 8);
}

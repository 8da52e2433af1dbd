use proptest::prelude::*;
use qvertex::fock::FockState;
use qvertex::levelc::TensorVector;
use qvertex::quasiparticle::*;
use qvertex::qva::{evaluate, rth_product, wt, CurrentExpr, Evaluation};
use qvertex::scalars::Scalar;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

fn mono(p: &[(u32, i64)]) -> QPMonomial {
    QPMonomial::new(p.to_vec()).unwrap()
}

fn vectors(c: usize) -> Vec<TensorVector> {
    let mut excited = vec![FockState::vacuum(); c];
    excited[0] = FockState::new(vec![1], 0);
    let mut charged = vec![FockState::vacuum(); c];
    charged[c - 1] = FockState::charged(1);
    vec![TensorVector::vacuum(c), TensorVector::basis(excited), TensorVector::basis(charged)]
}

fn same_values(a: &Evaluation, b: &Evaluation) -> bool {
    match (a.total(), b.total()) {
        (Some(x), Some(y)) => x.agrees_with(&y),
        (Some(x), None) | (None, Some(x)) => x.is_zero(),
        (None, None) => true,
    }
}

#[test]
fn quasi_particle_examples() {
    assert_eq!(quasi_particle(1), qvertex::qva::generator(1));
    assert_eq!(quasi_particle(2), CurrentExpr::monomial(Scalar::one(), 0, 2, vec![0, 1]));
    assert_eq!(quasi_particle(2), rth_product(&quasi_particle(1), &quasi_particle(1), -1).unwrap());
    for m in 1..6 {
        assert_eq!(wt(&quasi_particle(m)).unwrap(), m);
    }
}

#[test]
fn fusion() {
    for m in 1..4 {
        for k in 1..=4 - m {
            assert!(fuse_check(m, k).unwrap(), "m={m} k={k}");
        }
    }
    assert_eq!(
        rth_product(&quasi_particle(2), &quasi_particle(1), -1).unwrap().terms().next().unwrap().0 .2,
        vec![0, 1, 2]
    );
    assert!(fuse_check(2, 0).is_err());
    assert!(fuse_check(0, 1).is_err());
}

#[test]
fn fusion_agrees_on_evaluation() {
    let v = TensorVector::vacuum(3);
    for (m, k) in [(1, 1), (1, 2), (2, 1)] {
        let fused = rth_product(&quasi_particle(m), &quasi_particle(k), -1).unwrap();
        let a = evaluate(&fused, 3, &v, 4).unwrap();
        let b = evaluate(&quasi_particle(m + k), 3, &v, 4).unwrap();
        assert!(!a.is_zero());
        assert!(same_values(&a, &b));
    }
}

#[test]
fn integrability_examples() {
    assert!(integrability_test(2, 1, 4, 8).unwrap().is_zero());
    match integrability_test(2, 2, 2, 8).unwrap() {
        Integrability::Nonzero { state, coefficient, .. } => {
            assert_eq!(state, vec![FockState::vacuum(); 2]);
            let target = vec![FockState::charged(1); 2];
            assert!(!coefficient.coeff(&target).is_zero(), "{coefficient}");
        }
        z => panic!("expected a witness, got {z:?}"),
    }
    assert!(!integrability_test(1, 1, 2, 8).unwrap().is_zero());
    assert!(integrability_test(3, 2, 2, 8).unwrap().is_zero());
}

#[test]
fn straighten_examples() {
    let b = mono(&[(1, -3), (2, -1)]);
    assert_eq!(straighten(&b, 2), BTreeMap::from([(b.clone(), Scalar::one())]));
    // one application of the associativity rewrite
    let m = mono(&[(1, -1), (1, -2)]);
    let qinv = Scalar::qbar_pow(-1);
    let expect = BTreeMap::from([(mono(&[(2, -2)]), qinv.clone()), (mono(&[(1, -2), (1, -1)]), -qinv.clone())]);
    assert_eq!(straighten(&m, 2), expect);
    assert_eq!(straighten(&m, 1), BTreeMap::from([(mono(&[(1, -2), (1, -1)]), -qinv)]));
    let v = TensorVector::vacuum(2);
    let lhs = evaluate(&m.to_expr().unwrap(), 2, &v, 6).unwrap();
    let rhs = evaluate(&combination_expr(&straighten(&m, 2)).unwrap(), 2, &v, 6).unwrap();
    assert!(!lhs.is_zero());
    assert!(same_values(&lhs, &rhs));
    // a trailing run of −1 fuses
    assert_eq!(straighten(&mono(&[(1, -1), (1, -1)]), 2), BTreeMap::from([(mono(&[(2, -1)]), Scalar::one())]));
    assert!(straighten(&mono(&[(1, -1), (1, -1)]), 1).is_empty());
    assert!(straighten(&mono(&[(3, -2)]), 2).is_empty());
}

#[test]
fn straightened_terms_are_in_basis_form() {
    for c in 1..=3 {
        for p in [vec![(1, -1), (1, -1), (1, -4)], vec![(1, -1), (2, -3), (1, -1)], vec![(2, -2), (1, -1), (1, -3)]] {
            for (b, k) in straighten(&mono(&p), c) {
                assert!(b.is_basis_form(c), "{b} at level {c}");
                assert!(!k.is_zero());
                assert_eq!(b.wt(), mono(&p).wt());
            }
        }
    }
}

/// All monomials with `k ≤ 3`, `deg_q ≤ 8` and charges `≤ top`.
fn small_monomials(top: u32) -> Vec<QPMonomial> {
    let mut out = vec![QPMonomial::vacuum()];
    let mut frontier = vec![Vec::<(u32, i64)>::new()];
    for _ in 0..3 {
        let mut next = Vec::new();
        for p in &frontier {
            for m in 1..=top {
                for r in -8..=-1 {
                    let mut q = p.clone();
                    q.push((m, r));
                    if mono(&q).deg_q() <= 8 {
                        out.push(mono(&q));
                        next.push(q);
                    }
                }
            }
        }
        frontier = next;
    }
    out
}

/// A random non-basis monomial; charges above `c` only when `overcharged`.
fn random_non_basis(rng: &mut ChaCha8Rng, c: usize, overcharged: bool) -> QPMonomial {
    let pool: Vec<QPMonomial> = small_monomials(c as u32 + 1)
        .into_iter()
        .filter(|m| !m.is_basis_form(c) && m.charges().iter().any(|&x| x as usize > c) == overcharged)
        .collect();
    pool[rng.gen_range(0..pool.len())].clone()
}

#[test]
fn straightening_preserves_values() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut nonzero = 0;
    for n in 0..25 {
        let c = 1 + n % 2;
        let m = random_non_basis(&mut rng, c, n % 5 == 4);
        let out = straighten(&m, c);
        assert!(out.keys().all(|b| b.is_basis_form(c)));
        let lhs = m.to_expr().unwrap();
        let rhs = combination_expr(&out).unwrap();
        for v in vectors(c) {
            let a = evaluate(&lhs, c, &v, 8).unwrap();
            let b = evaluate(&rhs, c, &v, 8).unwrap();
            assert!(same_values(&a, &b), "{m} at level {c}");
            nonzero += usize::from(!a.is_zero());
        }
    }
    assert!(nonzero >= 20, "too few nonzero comparisons: {nonzero}");
}

#[test]
fn a_term_examples() {
    let single = expand_a_terms(&mono(&[(1, -1)])).unwrap();
    assert_eq!(single.len(), 1);
    assert_eq!(single[&vec![0]], quasi_particle(1));
    let two = expand_a_terms(&mono(&[(1, -2), (1, -1)])).unwrap();
    assert_eq!(two.keys().cloned().collect::<Vec<_>>(), vec![vec![0, 0], vec![1, 0]]);
    let lead = leading_term(&mono(&[(1, -2), (1, -1)])).unwrap();
    assert_eq!(lead.terms().map(|(k, _)| k.2.clone()).collect::<Vec<_>>(), vec![vec![0, 2]]);
    // runs start at M_j = Σ_{i<j}(m_i − r_i − 1)
    let m = mono(&[(2, -3), (1, -2), (2, -1)]);
    let lead = leading_term(&m).unwrap();
    assert_eq!(lead.terms().map(|(k, _)| k.2.clone()).collect::<Vec<_>>(), vec![vec![0, 1, 4, 6, 7]]);
}

#[test]
fn a_terms_reassemble_the_monomial() {
    for p in [vec![(2, -3), (1, -2), (2, -1)], vec![(1, -4), (1, -3)], vec![(3, -2), (1, -2)]] {
        let m = mono(&p);
        let groups = expand_a_terms(&m).unwrap();
        let sum = groups.values().fold(CurrentExpr::zero(), |acc, g| acc.add(g));
        assert_eq!(sum, m.to_expr().unwrap());
        for g in groups.values() {
            assert_eq!(wt(g).unwrap() as i64, m.wt());
        }
    }
}

#[test]
fn leading_terms_are_nonzero() {
    assert!(leading_term_nonzero(&mono(&[(1, -1)]), 1).unwrap());
    assert!(leading_term_nonzero(&mono(&[(2, -1)]), 2).unwrap());
    assert!(leading_term_nonzero(&mono(&[(1, -3), (1, -1)]), 1).unwrap());
    assert!(leading_term_nonzero(&mono(&[(2, -3), (1, -2), (1, -2), (2, -1)]), 2).unwrap());
}

#[test]
fn leading_terms_of_distinct_monomials_differ() {
    let monos: Vec<QPMonomial> = [
        vec![(1, -1)],
        vec![(2, -1)],
        vec![(1, -2)],
        vec![(1, -3), (1, -1)],
        vec![(2, -3), (1, -1)],
        vec![(1, -3), (2, -1)],
        vec![(1, -2), (1, -2)],
        vec![(2, -2), (2, -1)],
    ]
    .into_iter()
    .map(|p| mono(&p))
    .collect();
    let leads: Vec<CurrentExpr> = monos.iter().map(|m| leading_term(m).unwrap()).collect();
    for i in 0..leads.len() {
        for j in 0..i {
            assert_ne!(leads[i], leads[j], "{} vs {}", monos[i], monos[j]);
        }
    }
}

fn any_monomial() -> impl Strategy<Value = QPMonomial> {
    prop::collection::vec((1u32..=3, -4i64..=-1), 0..=3).prop_map(|p| QPMonomial::new(p).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn a_term_groups_share_the_weight(m in any_monomial()) {
        for g in expand_a_terms(&m).unwrap().values() {
            prop_assert_eq!(wt(g).unwrap() as i64, m.wt());
        }
        prop_assert!(m.deg_q() >= m.len() as i64);
    }

    #[test]
    fn straightening_lands_in_the_basis(m in any_monomial(), c in 1usize..=3) {
        for (b, _) in straighten(&m, c) {
            prop_assert!(b.is_basis_form(c));
            prop_assert_eq!(b.wt(), m.wt());
            prop_assert!(b.deg_q() <= m.deg_q());
        }
        if m.is_basis_form(c) {
            prop_assert_eq!(straighten(&m, c), BTreeMap::from([(m.clone(), Scalar::one())]));
        }
    }
}

use proptest::prelude::*;
use qvertex::combinatorics::*;
use qvertex::quasiparticle::QPMonomial;
use qvertex::scalars::{LevelPoly, Scalar};
use std::collections::BTreeMap;

/// Partitions of `n` into parts pairwise differing by at least 2, largest part first.
fn gapped_partitions(n: u32, below: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in (1..=n.min(below)).rev() {
        for mut rest in gapped_partitions(n - p, p.saturating_sub(2)) {
            rest.insert(0, p);
            out.push(rest);
        }
    }
    out
}

fn c_pow(k: u32) -> LevelPoly {
    LevelPoly::monomial(k, Scalar::one())
}

fn mono(p: &[(u32, i64)]) -> QPMonomial {
    QPMonomial::new(p.to_vec()).unwrap()
}

#[test]
fn counts_at_level_one() {
    let counts = |n: i64| {
        let mut c = vec![0; n as usize + 1];
        for m in enumerate_basis(1, n) {
            c[m.deg_q() as usize] += 1;
        }
        c
    };
    assert_eq!(counts(4), vec![1, 1, 1, 1, 2]);
    let oracle: Vec<usize> = (0..=10).map(|n| gapped_partitions(n, n).len()).collect();
    assert_eq!(oracle, vec![1, 1, 1, 1, 2, 2, 3, 3, 4, 5, 6]);
    assert_eq!(counts(10), oracle);
}

#[test]
fn shapes_are_gapped_partitions() {
    for n in 0..=14u32 {
        let mut ours: Vec<Vec<u32>> = enumerate_basis(1, n as i64)
            .iter()
            .filter(|m| m.deg_q() == n as i64)
            .map(|m| YoungDiagram::of(m).heights())
            .collect();
        ours.sort();
        let mut oracle = gapped_partitions(n, n);
        oracle.sort();
        assert_eq!(ours, oracle, "n = {n}");
    }
}

#[test]
fn labelings_at_level_two() {
    let deg4: Vec<QPMonomial> = enumerate_basis(2, 4).into_iter().filter(|m| m.deg_q() == 4).collect();
    assert_eq!(deg4.len(), 6);
    assert_eq!(deg4.iter().filter(|m| m.len() == 1).count(), 2);
    assert_eq!(deg4.iter().filter(|m| m.len() == 2).count(), 4);
    // 1 + 2 + 2 + 2 + 6
    assert_eq!(enumerate_basis(2, 4).len(), 13);
}

#[test]
fn enumeration_is_sorted_and_in_basis_form() {
    for c in 1..=3 {
        let b = enumerate_basis(c, 8);
        assert!(b.windows(2).all(|w| precedes(&w[0], &w[1])));
        assert!(b.iter().all(|m| m.is_basis_form(c) && m.deg_q() <= 8));
    }
}

#[test]
fn ordering_is_strict_and_total() {
    let b = enumerate_basis(2, 6);
    for x in &b {
        assert!(!precedes(x, x));
        for y in &b {
            if x != y {
                assert!(precedes(x, y) ^ precedes(y, x), "{x} vs {y}");
            }
        }
    }
    // weight decides first
    assert!(precedes(&mono(&[(2, -1)]), &mono(&[(1, -3)])));
    assert!(precedes(&mono(&[(1, -3)]), &mono(&[(2, -2)])));
    assert!(precedes(&mono(&[(1, -3), (2, -1)]), &mono(&[(2, -3), (1, -1)])));
}

#[test]
fn figure_one_statistics() {
    let m = mono(&[(7, -3), (4, -2), (5, -2), (6, -1)]);
    let s = stats(&m).unwrap();
    assert_eq!(s.deg_q, 17);
    assert_eq!(s.wt, 26);
    assert_eq!(s.diagram.columns, vec![(8, 7), (5, 4), (3, 5), (1, 6)]);
    assert_eq!(s.diagram.boxes(), 17);
    let vac = stats(&QPMonomial::vacuum()).unwrap();
    assert_eq!((vac.deg_q, vac.wt), (0, 0));
    assert!(stats(&mono(&[(1, -1), (1, -2)])).is_err());
}

#[test]
fn diagram_rendering() {
    let d = YoungDiagram::of(&mono(&[(2, -2), (1, -1)]));
    assert_eq!(d.render(), "[2]\n[2]\n[2][1]");
    assert_eq!(YoungDiagram::of(&QPMonomial::vacuum()).render(), "");
    let lines = YoungDiagram::of(&mono(&[(7, -3), (4, -2), (5, -2), (6, -1)])).render();
    assert_eq!(lines.lines().count(), 8);
    assert_eq!(lines.lines().last().unwrap(), "[7][4][5][6]");
}

#[test]
fn character_coefficients() {
    let f = character_formula(12);
    assert_eq!(f.coeff(0), &LevelPoly::one());
    assert_eq!(f.coeff(4), &c_pow(1).add(&c_pow(2)));
    assert_eq!(shape_character(12), f);
    for c in 1..=3 {
        assert_eq!(character(c, 12), f.specialize(c as i64), "level {c}");
    }
    let level_one: Vec<LevelPoly> = (0..=10).map(|n| f.specialize(1).coeff(n).clone()).collect();
    let expect: Vec<LevelPoly> = [1, 1, 1, 1, 2, 2, 3, 3, 4, 5, 6].iter().map(|&k| LevelPoly::monomial(0, Scalar::from_int(k))).collect();
    assert_eq!(level_one, expect);
}

#[test]
fn character_counts_parts() {
    // the coefficient of c^r q^n counts r-part gapped partitions of n
    let f = character_formula(14);
    for n in 0..=14u32 {
        let mut by_parts: BTreeMap<u32, i64> = BTreeMap::new();
        for p in gapped_partitions(n, n) {
            *by_parts.entry(p.len() as u32).or_default() += 1;
        }
        let mut expect = LevelPoly::zero();
        for (r, k) in by_parts {
            expect.add_term(r, &Scalar::from_int(k));
        }
        assert_eq!(f.coeff(n as usize), &expect, "n = {n}");
    }
}

#[test]
fn hardy_identity() {
    let low = hardy_identity_check(1);
    assert!(low.equal);
    assert_eq!(hardy_rhs(1).coeffs(), &[LevelPoly::one(), c_pow(1)]);
    let r = hardy_identity_check(20);
    assert_eq!(r, IdentityReport { order: 20, equal: true, first_mismatch: None });
    // at c = 1: Σ q^{r²}/(q;q)_r against Π 1/((1 − q^{5n+1})(1 − q^{5n+4}))
    let mut prod = QSeries::one(20);
    for k in 1..=20usize {
        if k % 5 == 1 || k % 5 == 4 {
            prod = prod.mul(&QSeries::geometric(20, 0, k));
        }
    }
    assert_eq!(character_formula(20).specialize(1), prod);
    assert_eq!(hardy_rhs(20).specialize(1), prod);
}

#[test]
fn a_wrong_sign_breaks_the_identity() {
    let bad = character_formula(10).sub(&QSeries::monomial(10, 2, 7));
    let diff = bad.sub(&hardy_rhs(10));
    assert_eq!(diff.coeffs().iter().position(|a| !a.is_zero()), Some(7));
}

#[test]
fn independence_at_low_degree() {
    let r = independence_rank(1, 3, 4, &default_test_vectors(1)).unwrap();
    assert_eq!((r.elements, r.rank, r.rank_t1), (4, 4, 4));
    let mut twice = enumerate_basis(1, 3);
    twice.push(twice[2].clone());
    let d = rank_of(&twice, 1, &default_test_vectors(1), 4).unwrap();
    assert_eq!((d.elements, d.rank, d.rank_t1), (5, 4, 4));
}

#[test]
fn independence_of_the_enumerated_basis() {
    for (c, n) in [(1, 6), (2, 4)] {
        let r = independence_rank(c, n, 6, &default_test_vectors(c)).unwrap();
        assert_eq!(r.elements, enumerate_basis(c, n).len());
        assert!(r.full(), "level {c}: {r:?}");
    }
}

fn scalar() -> impl Strategy<Value = Scalar> {
    (-3i64..=3, -3i64..=3, 0i64..=2).prop_map(|(a, e, f)| Scalar::from_int(a) * Scalar::v_pow(e) / (Scalar::one() + Scalar::v_pow(2 * f)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rank_is_invariant_under_row_operations(
        rows in prop::collection::vec(prop::collection::vec(scalar(), 4), 1..4),
        k in scalar(),
    ) {
        let r = exact_rank(&rows);
        prop_assert_eq!(r, bareiss_rank(&rows));
        let mut more = rows.clone();
        let combo: Vec<Scalar> = rows[0].iter().zip(rows.last().unwrap()).map(|(a, b)| a + &(&k * b)).collect();
        more.push(combo);
        prop_assert_eq!(exact_rank(&more), r);
        prop_assert!(r <= rows.len().min(4));
    }

    #[test]
    fn character_coefficients_are_nonnegative_integers(n in 0usize..=16) {
        let f = character_formula(16);
        let coeffs = f.coeff(n).integer_coeffs().expect("integral");
        prop_assert!(coeffs.values().all(|k| *k > 0.into()));
    }
}

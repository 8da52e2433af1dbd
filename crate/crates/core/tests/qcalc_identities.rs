use proptest::prelude::*;
use qvertex::laurent::{mul_blocks, LaurentBlock};
use qvertex::qcalc::{nc_binomial, qbinom, qderiv, qderiv_n, NCPoly, Flavor};
use qvertex::scalars::Scalar;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const QB: Flavor = Flavor::Asymmetric;

#[test]
fn binomial_expansion_by_repeated_multiplication() {
    let zz = NCPoly::z_plus_z0();
    for m in 0..=8u32 {
        assert_eq!(nc_binomial(m as i64, 8), zz.pow(m), "m = {m}");
    }
    let n = 6;
    let one = NCPoly::one();
    let inv = nc_binomial(-1, n);
    assert_eq!(inv.mul_truncated(&zz, n), one);
    assert_eq!(zz.mul_truncated(&inv, n), one);
    let inv2 = nc_binomial(-2, n);
    assert_eq!(inv2, inv.mul_truncated(&inv, n));
    assert_eq!(inv2.mul_truncated(&zz.pow(2), n), one);
}

#[test]
fn cube_coefficient() {
    let c = NCPoly::z_plus_z0().pow(3).coeff(1, 2);
    assert_eq!(c, Scalar::one() + Scalar::qbar_pow(1) + Scalar::qbar_pow(2));
}

fn random_poly(rng: &mut ChaCha8Rng) -> LaurentBlock<Scalar> {
    let n = rng.gen_range(1..=5);
    let terms: Vec<(i64, Scalar)> = (0..n)
        .map(|_| {
            let e = 2 * rng.gen_range(-4..=4i64);
            let k = Scalar::from_int(rng.gen_range(-5..=5i64)) * Scalar::v_pow(rng.gen_range(-3..=3));
            (e, k)
        })
        .collect();
    LaurentBlock::from_terms(terms, -8, 60)
}

#[test]
fn q_leibniz_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let (a, b) = (random_poly(&mut rng), random_poly(&mut rng));
        let ab = mul_blocks(&a, &b);
        for m in 0..=4u32 {
            let lhs = qderiv_n(&ab, m);
            let mut rhs = LaurentBlock::new(lhs.window().0, lhs.window().1, true);
            for l in 0..=m {
                let t = mul_blocks(&qderiv_n(&a, l), &qderiv_n(&b, m - l).shift(l as i64)).scale(&qbinom(m as i64, l, QB));
                rhs.add_assign_block(&t);
            }
            assert!(lhs.agrees_with(&rhs), "m = {m}");
        }
    }
}

fn block() -> impl Strategy<Value = LaurentBlock<Scalar>> {
    prop::collection::vec((-6i64..=6, -4i64..=4, -2i64..=2), 0..6).prop_map(|t| {
        LaurentBlock::from_terms(t.into_iter().map(|(e, k, p)| (e, Scalar::from_int(k) * Scalar::v_pow(p))), -20, 20)
    })
}

fn ncpoly() -> impl Strategy<Value = NCPoly> {
    prop::collection::vec((-2i64..=2, 0u32..=2, -3i64..=3), 0..4).prop_map(|t| {
        let mut p = NCPoly::zero();
        for (a, b, k) in t {
            p.add_term(a, b, &Scalar::from_int(k));
        }
        p
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn nc_multiplication_is_associative(a in ncpoly(), b in ncpoly(), c in ncpoly()) {
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
    }

    #[test]
    fn q_pascal(m in 1i64..=8, l in 1u32..=8) {
        prop_assume!(l as i64 <= m);
        let lhs = qbinom(m, l, QB);
        let rhs = qbinom(m - 1, l - 1, QB) + Scalar::qbar_pow(l as i64) * qbinom(m - 1, l, QB);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn derivative_then_shift(b in block()) {
        // D ∘ R_z = q̲ · R_z ∘ D
        let lhs = qderiv(&b.shift(1));
        let rhs = qderiv(&b).shift(1).scale(&Scalar::qbar_pow(1));
        prop_assert!(lhs.agrees_with(&rhs));
    }
}

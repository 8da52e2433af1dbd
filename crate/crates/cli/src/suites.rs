use qvertex::combinatorics::{default_test_vectors, enumerate_basis};
use qvertex::fock::compose::{compose, normal_ordered_pair};
use qvertex::fock::{heis_act, kappa, states_up_to_weight, ElemOp, FockState, FockVector, OpKind};
use qvertex::laurent::{mul_blocks, BiBlock, Coeff, LaurentBlock};
use qvertex::levelc::{current_string_apply, tensor_states_up_to_weight, TensorVector};
use qvertex::qcalc::{nc_binomial, qbinom, qderiv_n, Flavor, NCPoly};
use qvertex::quasiparticle::{combination_expr, fuse_check, integrability_test, leading_term_nonzero, Integrability, quasi_particle, straighten, QPMonomial};
use qvertex::qva::{check_associativity, evaluate, generator, rth_product, wt, AssocReport, CurrentExpr, QvaError};
use qvertex::scalars::Scalar;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Check {
    Check { name: name.into(), passed, detail: detail.into() }
}

pub struct Params {
    pub level: usize,
    pub order: usize,
    pub degq: i64,
    pub weight_bound: u32,
    pub window: i64,
    pub seed: u64,
}

const QB: Flavor = Flavor::Asymmetric;

pub fn qcalc(p: &Params) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let zz = NCPoly::z_plus_z0();
    let mut out = Vec::new();
    let bad: Vec<u32> = (0..=8).filter(|&m| nc_binomial(m as i64, 8) != zz.pow(m)).collect();
    out.push(check("q-binomial theorem, m = 0..8", bad.is_empty(), if bad.is_empty() { "9 exponents".to_string() } else { format!("mismatches at m = {bad:?}") }));
    let n = p.order.min(8) as u32;
    let inv = nc_binomial(-1, n);
    let ok = inv.mul_truncated(&zz, n) == NCPoly::one()
        && zz.mul_truncated(&inv, n) == NCPoly::one()
        && nc_binomial(-2, n).mul_truncated(&zz.pow(2), n) == NCPoly::one();
    out.push(check("q-binomial theorem, m = -1, -2", ok, format!("through z0-degree {n}")));
    let pascal = (1..=8i64).all(|m| {
        (1..=m as u32).all(|l| qbinom(m, l, QB) == qbinom(m - 1, l - 1, QB) + Scalar::qbar_pow(l as i64) * qbinom(m - 1, l, QB))
    });
    out.push(check("q-Pascal recurrence, l <= m <= 8", pascal, ""));
    let mut failures = 0;
    for _ in 0..20 {
        let (a, b) = (random_poly(&mut rng), random_poly(&mut rng));
        let ab = mul_blocks(&a, &b);
        for m in 0..=4u32 {
            let lhs = qderiv_n(&ab, m);
            let mut rhs = LaurentBlock::new(lhs.window().0, lhs.window().1, true);
            for l in 0..=m {
                rhs.add_assign_block(&mul_blocks(&qderiv_n(&a, l), &qderiv_n(&b, m - l).shift(l as i64)).scale(&qbinom(m as i64, l, QB)));
            }
            failures += usize::from(!lhs.agrees_with(&rhs));
        }
    }
    out.push(check("q-Leibniz rule, 20 random pairs, m <= 4", failures == 0, format!("{failures} failures")));
    let mut failures = 0;
    for _ in 0..20 {
        let (a, b, c) = (random_nc(&mut rng), random_nc(&mut rng), random_nc(&mut rng));
        failures += usize::from(a.mul(&b).mul(&c) != a.mul(&b.mul(&c)));
    }
    out.push(check("noncommutative product is associative, 20 random triples", failures == 0, format!("{failures} failures")));
    out
}

fn random_poly(rng: &mut ChaCha8Rng) -> LaurentBlock<Scalar> {
    let n = rng.gen_range(1..=5);
    let terms: Vec<(i64, Scalar)> = (0..n)
        .map(|_| (2 * rng.gen_range(-4..=4i64), Scalar::from_int(rng.gen_range(-5..=5i64)) * Scalar::v_pow(rng.gen_range(-3..=3))))
        .collect();
    LaurentBlock::from_terms(terms, -8, 60)
}

fn random_nc(rng: &mut ChaCha8Rng) -> NCPoly {
    let mut p = NCPoly::zero();
    for _ in 0..rng.gen_range(1..=3) {
        p.add_term(rng.gen_range(-2..=2), rng.gen_range(0..=2), &Scalar::from_int(rng.gen_range(-3..=3i64)));
    }
    p
}

fn failures<T: std::fmt::Debug>(bad: &[T]) -> String {
    if bad.is_empty() {
        String::new()
    } else {
        format!(", failures: {bad:?}")
    }
}

fn s(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn transpose(b: &BiBlock<FockVector>) -> BiBlock<FockVector> {
    let (w1, w2) = b.windows();
    let (e1, e2) = b.lower_exact();
    let mut out = BiBlock::new(w2, w1, e2, e1);
    for ((a, c), v) in b.iter() {
        out.add_term(*c, *a, v);
    }
    out
}

pub fn fock_relations(p: &Params) -> Vec<Check> {
    let w = 2 * p.window;
    let x = |s: i64| ElemOp::new(OpKind::XPlus, s);
    let states: Vec<FockState> = states_up_to_weight(p.weight_bound).into_iter().filter(|s| s.charge2() >= 0).collect();
    let view = |b: &BiBlock<FockVector>| b.restrict((-w, w), (-w, w));
    let mut out = Vec::new();

    let mut bad = 0;
    let all = states_up_to_weight(p.weight_bound);
    for s in &all {
        let v = FockVector::basis(s.clone());
        for r in (-4i64..=4).filter(|r| *r != 0) {
            for t in (-4i64..=4).filter(|t| *t != 0) {
                let mut lhs = heis_act(r, &heis_act(t, &v));
                lhs.add_assign(&heis_act(t, &heis_act(r, &v)).scale(&Scalar::from_int(-1)));
                let expect = if r + t == 0 {
                    let k = kappa(r.unsigned_abs() as u32);
                    v.scale(&if r > 0 { k } else { -k })
                } else {
                    FockVector::zero()
                };
                bad += usize::from(lhs != expect);
            }
        }
    }
    out.push(check("Heisenberg commutators", bad == 0, format!("{} states, {bad} failures", all.len())));

    let run = |name: &str, f: &dyn Fn(&FockVector) -> Result<(BiBlock<FockVector>, BiBlock<FockVector>), String>| {
        let mut bad = Vec::new();
        for s in &states {
            let v = FockVector::basis(s.clone());
            let ok = f(&v).and_then(|(l, r)| {
                let (l, r) = (view(&l).map_err(|e| e.to_string())?, view(&r).map_err(|e| e.to_string())?);
                Ok(l.agrees_with(&r))
            });
            if ok != Ok(true) {
                bad.push(s.to_string());
            }
        }
        check(name, bad.is_empty(), format!("{} states{}", states.len(), failures(&bad)))
    };
    let qm2 = Scalar::q_pow(-2);
    let poly = [((4, 0), Scalar::one()), ((2, 2), -(Scalar::one() + &qm2)), ((0, 4), qm2)];
    out.push(run("x(z1)x(z) = (z1 - z)(z1 - q^-2 z) :x(z1)x(z):", &|v| {
        let lhs = compose(&[x(0)], &[x(0)], v, w, w).map_err(s)?;
        let rhs = normal_ordered_pair(x(0), x(0), v, w, w).map_err(s)?.mul_poly2(&poly).map_err(s)?;
        Ok((lhs, rhs))
    }));
    let phi = ElemOp::new(OpKind::Phi, 1);
    let q2 = Scalar::q_pow(2);
    out.push(run("x(z1) phi(zv) (1 - q^2 z/z1) = q^2 (1 - q^-2 z/z1) phi(zv) x(z1)", &|v| {
        let lhs = compose(&[x(0)], &[phi], v, w + 2, w).map_err(s)?.poly_mul(&[(0, Scalar::one()), (1, -q2.clone())]).map_err(s)?;
        let swapped = compose(&[phi], &[x(0)], v, w, w + 2).map_err(s)?;
        let rhs = transpose(&swapped).poly_mul(&[(0, q2.clone()), (1, -Scalar::one())]).map_err(s)?;
        Ok((lhs, rhs))
    }));
    let e = ElemOp::new(OpKind::KoyamaMinus, 0);
    out.push(run("x(z1) E-(z) = (1 - z/z1) E-(z) x(z1)", &|v| {
        let lhs = compose(&[x(0)], &[e], v, w + 2, w).map_err(s)?;
        let swapped = compose(&[e], &[x(0)], v, w, w + 2).map_err(s)?;
        let rhs = transpose(&swapped).poly_mul(&[(0, Scalar::one()), (1, Scalar::from_int(-1))]).map_err(s)?;
        Ok((lhs, rhs))
    }));
    out
}

pub fn integrability(p: &Params) -> Vec<Check> {
    let c = p.level;
    let mut out = Vec::new();
    for m in 1..=c as u32 + 1 {
        let name = format!("x_{m} at level {c} vanishes iff {m} > {c}");
        out.push(match integrability_test(m, c, p.weight_bound, 2 * p.window) {
            Ok(r) => {
                let detail = match &r {
                    Integrability::Zero { states_checked } => format!("zero on {states_checked} states"),
                    Integrability::Nonzero { state, exponent, .. } => {
                        let s: Vec<String> = state.iter().map(|f| f.to_string()).collect();
                        format!("nonzero on [{}] at doubled exponent {exponent}", s.join(", "))
                    }
                };
                check(name, r.is_zero() == (m as usize > c), detail)
            }
            Err(e) => check(name, false, e.to_string()),
        });
    }
    let gammas: Vec<i64> = (0..=c as i64).map(|i| 4 * i).collect();
    let states = tensor_states_up_to_weight(c, p.weight_bound);
    let mut bad = 0;
    for s in &states {
        match current_string_apply(&gammas, &TensorVector::basis(s.clone()), 2 * p.window) {
            Ok(b) if b.is_zero() => {}
            _ => bad += 1,
        }
    }
    out.push(check(
        format!("x(z)x(zq^2)...x(zq^{}) annihilates level {c}", 2 * c),
        bad == 0,
        format!("{} states of weight <= {}, {bad} failures", states.len(), p.weight_bound),
    ));
    out
}

fn assoc_vectors(c: usize) -> Vec<TensorVector> {
    let mut excited = vec![FockState::vacuum(); c];
    excited[0] = FockState::new(vec![1], 0);
    let mut charged = vec![FockState::vacuum(); c];
    charged[c - 1] = FockState::charged(1);
    vec![TensorVector::vacuum(c), TensorVector::basis(excited), TensorVector::basis(charged)]
}

pub fn associativity(p: &Params) -> Vec<Check> {
    let c = p.level;
    let gens = [("x(t)", generator(1)), ("x_2", quasi_particle(2)), ("1", CurrentExpr::vacuum())];
    let vs = assoc_vectors(c);
    let mut out = Vec::new();
    for (na, a) in &gens {
        for (nb, b) in &gens {
            for (nc, cc) in &gens {
                let mut compared = 0;
                let mut failure = None;
                for r in -3i64..=1 {
                    for s in -3i64..=1 {
                        match check_associativity(a, b, cc, r, s, c, &vs, 2 * p.window) {
                            Ok(AssocReport::Equal { coefficients_compared }) => compared += coefficients_compared,
                            Ok(d) => failure = failure.or(Some(format!("r={r} s={s}: {d:?}"))),
                            Err(e) => failure = failure.or(Some(format!("r={r} s={s}: {e}"))),
                        }
                    }
                }
                let detail = failure.clone().unwrap_or_else(|| format!("{compared} coefficients compared"));
                out.push(check(format!("associativity for ({na}, {nb}, {nc}), r, s in -3..1"), failure.is_none(), detail));
            }
        }
    }
    out
}

fn non_basis_sample(rng: &mut ChaCha8Rng, c: usize, n: usize) -> Vec<QPMonomial> {
    let mut pool = Vec::new();
    let mut frontier = vec![Vec::<(u32, i64)>::new()];
    for _ in 0..3 {
        let mut next = Vec::new();
        for q in &frontier {
            for m in 1..=c as u32 {
                for r in -8..=-1 {
                    let mut e = q.clone();
                    e.push((m, r));
                    let mono = QPMonomial::new(e.clone()).expect("valid pairs");
                    if mono.deg_q() <= 8 {
                        if !mono.is_basis_form(c) {
                            pool.push(mono);
                        }
                        next.push(e);
                    }
                }
            }
        }
        frontier = next;
    }
    (0..n).map(|_| pool[rng.gen_range(0..pool.len())].clone()).collect()
}

pub fn lemmas(p: &Params) -> Vec<Check> {
    let c = p.level;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut out = Vec::new();
    let fused: Vec<(u32, u32)> = (1..4).flat_map(|m| (1..=4 - m).map(move |k| (m, k))).filter(|&(m, k)| fuse_check(m, k) != Ok(true)).collect();
    out.push(check("fusion (x_m)_{-1} x_k = x_{m+k}, m + k <= 4", fused.is_empty(), failures(&fused)));

    let sample = non_basis_sample(&mut rng, c, 10);
    let mut bad = Vec::new();
    for m in &sample {
        let ok = (|| -> Result<bool, QvaError> {
            let lhs = m.to_expr()?;
            let rhs = combination_expr(&straighten(m, c))?;
            for v in default_test_vectors(c) {
                let (a, b) = (evaluate(&lhs, c, &v, 2 * p.window)?.total(), evaluate(&rhs, c, &v, 2 * p.window)?.total());
                let same = match (a, b) {
                    (Some(x), Some(y)) => x.agrees_with(&y),
                    (Some(x), None) | (None, Some(x)) => x.is_zero(),
                    (None, None) => true,
                };
                if !same {
                    return Ok(false);
                }
            }
            Ok(true)
        })();
        if ok != Ok(true) {
            bad.push(m.to_string());
        }
    }
    out.push(check(format!("straightening preserves values at level {c}"), bad.is_empty(), format!("{} monomials{}", sample.len(), failures(&bad))));

    let basis = enumerate_basis(c, p.degq);
    let zero: Vec<String> = basis.iter().filter(|m| leading_term_nonzero(m, c) != Ok(true)).map(|m| m.to_string()).collect();
    out.push(check(format!("leading terms are nonzero, deg_q <= {}", p.degq), zero.is_empty(), format!("{} monomials{}", basis.len(), failures(&zero))));

    let pool: Vec<CurrentExpr> = vec![generator(1), generator(2), quasi_particle(2), CurrentExpr::vacuum()];
    let mut checked = 0;
    let mut bad = 0;
    while checked < 50 {
        let a = &pool[rng.gen_range(0..pool.len())];
        let b = &pool[rng.gen_range(0..pool.len())];
        let r = rng.gen_range(-4i64..=-1);
        match rth_product(a, b, r) {
            Ok(x) if !x.is_zero() => {
                checked += 1;
                let lhs = wt(&x).map(|w| w as i64);
                let rhs = wt(a).and_then(|wa| wt(b).map(|wb| wa as i64 + wb as i64 - r - 1));
                bad += usize::from(lhs.is_err() || lhs != rhs);
            }
            Ok(_) => {}
            Err(_) => {
                checked += 1;
                bad += 1;
            }
        }
    }
    out.push(check("wt(a_r b) = wt a + wt b - r - 1", bad == 0, format!("{checked} products, {bad} failures")));
    out
}

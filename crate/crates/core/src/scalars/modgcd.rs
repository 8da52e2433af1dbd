//! Univariate gcd over `Z[v]` by images modulo word-size primes and CRT.

use super::poly::IntPoly;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use std::sync::OnceLock;

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for sp in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % sp == 0 {
            return n == sp;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn primes() -> &'static [u64] {
    static P: OnceLock<Vec<u64>> = OnceLock::new();
    P.get_or_init(|| {
        let mut out = Vec::new();
        let mut n = (1u64 << 62) - 1;
        while out.len() < 256 {
            if is_prime(n) {
                out.push(n);
            }
            n -= 2;
        }
        out
    })
}

fn reduce(x: &BigInt, p: u64) -> u64 {
    if let Some(s) = x.to_i64() {
        return s.rem_euclid(p as i64) as u64;
    }
    x.mod_floor(&BigInt::from(p)).to_u64().unwrap()
}

fn image(a: &IntPoly, p: u64) -> Vec<u64> {
    let mut v = a.residues(p);
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

/// Monic gcd in `F_p[v]`.
fn gcd_mod(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> Vec<u64> {
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        let inv = powmod(*b.last().unwrap(), p - 2, p);
        let db = b.len() - 1;
        while a.len() >= b.len() {
            let t = mulmod(*a.last().unwrap(), inv, p);
            let shift = a.len() - b.len();
            for j in 0..db {
                let s = mulmod(t, b[j], p);
                let x = a[shift + j];
                a[shift + j] = if x >= s { x - s } else { x + p - s };
            }
            a.pop();
            while a.last() == Some(&0) {
                a.pop();
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    if let Some(&l) = a.last() {
        let inv = powmod(l, p - 2, p);
        for x in a.iter_mut() {
            *x = mulmod(*x, inv, p);
        }
    }
    a
}

fn symmetric(x: &BigInt, m: &BigInt, half: &BigInt) -> BigInt {
    if x > half {
        x - m
    } else {
        x.clone()
    }
}

/// Gcd of primitive polynomials of positive degree with nonzero constant terms.
/// Result is primitive with positive leading coefficient.
pub(crate) fn primitive_gcd(a: &IntPoly, b: &IntPoly) -> IntPoly {
    if a == b {
        return a.clone();
    }
    let glc = a.lc().gcd(&b.lc());
    let mut best = a.deg().min(b.deg()) + 1;
    let mut acc: Vec<BigInt> = Vec::new();
    let mut modulus = BigInt::one();
    for &p in primes() {
        if reduce(&a.lc(), p) == 0 || reduce(&b.lc(), p) == 0 {
            continue;
        }
        let g = gcd_mod(image(a, p), image(b, p), p);
        let d = g.len() - 1;
        if d == 0 {
            return IntPoly::one();
        }
        if d > best {
            continue;
        }
        let s = reduce(&glc, p);
        let g: Vec<u64> = g.into_iter().map(|x| mulmod(x, s, p)).collect();
        if d < best {
            best = d;
            acc = g.iter().map(|&x| BigInt::from(x)).collect();
            modulus = BigInt::from(p);
        } else {
            let pb = BigInt::from(p);
            let minv = powmod(reduce(&modulus, p), p - 2, p);
            for (i, gi) in g.iter().enumerate() {
                let cur = reduce(&acc[i], p);
                let diff = (*gi + p - cur) % p;
                let k = mulmod(diff, minv, p);
                acc[i] = &acc[i] + &modulus * BigInt::from(k);
            }
            modulus *= &pb;
        }
        let half: BigInt = &modulus >> 1;
        let cand = IntPoly::from_coeffs(acc.iter().map(|x| symmetric(x, &modulus, &half)).collect());
        let cont = cand.content();
        let mut cand = cand.div_int_exact(&cont);
        if cand.lc_is_negative() {
            cand = cand.neg();
        }
        if a.div_exact(&cand).is_some() && b.div_exact(&cand).is_some() {
            return cand;
        }
    }
    panic!("modular gcd exhausted its prime table");
}

/// Full gcd in `Z[v]`: content gcd times `v`-power times primitive gcd, positive leading coefficient.
pub fn gcd(a: &IntPoly, b: &IntPoly) -> IntPoly {
    if a.is_zero() {
        return normalize_sign(b.clone());
    }
    if b.is_zero() {
        return normalize_sign(a.clone());
    }
    if a.is_one() || b.is_one() {
        return IntPoly::one();
    }
    let ic = a.content().gcd(&b.content());
    let va = a.valuation();
    let vb = b.valuation();
    let vmin = va.min(vb);
    if a.is_monomial() || b.is_monomial() {
        return IntPoly::monomial(ic, vmin);
    }
    let pa = strip(a, va);
    let pb = strip(b, vb);
    if pa.deg() == 0 || pb.deg() == 0 {
        return IntPoly::monomial(ic, vmin);
    }
    let g = primitive_gcd(&pa, &pb);
    g.scale(&ic).shl(vmin)
}

fn strip(a: &IntPoly, val: usize) -> IntPoly {
    let s = a.shr(val);
    let c = s.content();
    let s = s.div_int_exact(&c);
    if s.lc_is_negative() {
        s.neg()
    } else {
        s
    }
}

fn normalize_sign(a: IntPoly) -> IntPoly {
    if !a.is_zero() && a.lc_is_negative() {
        a.neg()
    } else {
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64s(c)
    }

    #[test]
    fn gcd_recovers_common_factor() {
        let f = p(&[1, 1, 1]);
        let a = f.mul(&p(&[2, -1])).mul(&p(&[0, 3]));
        let b = f.mul(&p(&[1, 0, 7])).scale(&BigInt::from(6));
        assert_eq!(gcd(&a, &b), f.scale(&BigInt::from(3)));
    }

    #[test]
    fn coprime_is_constant() {
        assert_eq!(gcd(&p(&[1, 1]), &p(&[-1, 1])), IntPoly::one());
    }

    #[test]
    fn cyclotomic_gcd() {
        // gcd(v^12 - 1, v^8 - 1) = v^4 - 1
        let mut a = vec![0i64; 13];
        a[0] = -1;
        a[12] = 1;
        let mut b = vec![0i64; 9];
        b[0] = -1;
        b[8] = 1;
        assert_eq!(gcd(&p(&a), &p(&b)), p(&[-1, 0, 0, 0, 1]));
    }

    #[test]
    fn large_coefficient_gcd_needs_several_primes() {
        let big = BigInt::from(3).pow(90u32);
        let f = IntPoly::from_coeffs(vec![big.clone(), BigInt::from(5), BigInt::one()]);
        let a = f.mul(&p(&[1, 2]));
        let b = f.mul(&p(&[7, 0, 1]));
        assert_eq!(gcd(&a, &b), f);
    }
}

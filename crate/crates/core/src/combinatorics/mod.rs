//! Enumeration of the basis monomials, their diagrams and statistics, characters,
//! and the exact rank of evaluation matrices.

use crate::fock::FockState;
use crate::levelc::TensorVector;
use crate::quasiparticle::QPMonomial;
use crate::qva::{evaluate, QvaError};
use crate::scalars::LevelPoly;
use crate::scalars::Scalar;
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CombError {
    #[error("monomial {0} is not in basis form")]
    NotBasisForm(String),
}

/// Mode sequences `(r₁,…,r_k)` with `r₁,…,r_{k−1} ≤ −2`, `r_k ≤ −1` and `deg_q ≤ n`.
pub fn shapes(n: i64) -> Vec<Vec<i64>> {
    fn extend(prefix: &mut Vec<i64>, k: usize, deg: i64, n: i64, out: &mut Vec<Vec<i64>>) {
        let j = prefix.len() + 1;
        if j > k {
            out.push(prefix.clone());
            return;
        }
        // cheapest completion of positions j+1..k
        let rest: i64 = (j as i64 + 1..=k as i64).map(|i| if i == k as i64 { i } else { 2 * i }).sum();
        let top = if j == k { -1 } else { -2 };
        let mut r = top;
        while deg - j as i64 * r + rest <= n {
            prefix.push(r);
            extend(prefix, k, deg - j as i64 * r, n, out);
            prefix.pop();
            r -= 1;
        }
    }
    let mut out = Vec::new();
    let mut k = 0;
    while (k * k) as i64 <= n {
        extend(&mut Vec::new(), k, 0, n, &mut out);
        k += 1;
    }
    out
}

/// Sort key realizing `≺`: first `Σ(m_j − r_j) − k`, then `(m₁,r₁,m₂,r₂,…)` lexicographically.
pub fn order_key(m: &QPMonomial) -> (i64, Vec<(u32, i64)>) {
    (m.wt(), m.pairs().to_vec())
}

pub fn compare(a: &QPMonomial, b: &QPMonomial) -> Ordering {
    order_key(a).cmp(&order_key(b))
}

pub fn precedes(a: &QPMonomial, b: &QPMonomial) -> bool {
    compare(a, b) == Ordering::Less
}

/// Every basis-form monomial at level `c` with `deg_q ≤ degq_max`, in `≺` order.
pub fn enumerate_basis(c: usize, degq_max: i64) -> Vec<QPMonomial> {
    let mut out = Vec::new();
    for rs in shapes(degq_max) {
        let mut labels = vec![Vec::<u32>::new()];
        for _ in &rs {
            labels = labels.into_iter().flat_map(|l| (1..=c as u32).map(move |m| [l.clone(), vec![m]].concat())).collect();
        }
        for ms in labels {
            let pairs = ms.into_iter().zip(rs.iter().copied()).collect();
            out.push(QPMonomial::new(pairs).expect("shapes have negative modes"));
        }
    }
    out.sort_by(compare);
    out
}

/// Columns `(height, label)` left to right.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct YoungDiagram {
    pub columns: Vec<(u32, u32)>,
}

impl YoungDiagram {
    /// Column `j` has height `−(r_j + ··· + r_k)` and label `m_j`.
    pub fn of(m: &QPMonomial) -> Self {
        let p = m.pairs();
        let columns = (0..p.len()).map(|j| (-p[j..].iter().map(|x| x.1).sum::<i64>() as u32, p[j].0)).collect();
        YoungDiagram { columns }
    }

    pub fn boxes(&self) -> u32 {
        self.columns.iter().map(|c| c.0).sum()
    }

    /// Heights, i.e. the parts of the underlying partition.
    pub fn heights(&self) -> Vec<u32> {
        self.columns.iter().map(|c| c.0).collect()
    }

    /// Rows drawn from the top, each box carrying its column's label.
    pub fn render(&self) -> String {
        let w = self.columns.iter().map(|c| c.1.to_string().len()).max().unwrap_or(1);
        let tallest = self.columns.first().map(|c| c.0).unwrap_or(0);
        let mut lines = Vec::new();
        for row in (0..tallest).rev() {
            let mut line = String::new();
            for &(h, label) in &self.columns {
                if h > row {
                    line.push_str(&format!("[{:^w$}]", label));
                } else {
                    line.push_str(&" ".repeat(w + 2));
                }
            }
            lines.push(line.trim_end().to_string());
        }
        lines.join("\n")
    }
}

impl fmt::Display for YoungDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stats {
    pub deg_q: i64,
    pub wt: i64,
    pub diagram: YoungDiagram,
}

/// `deg_q`, `wt` and the colored diagram of a basis-form monomial.
pub fn stats(m: &QPMonomial) -> Result<Stats, CombError> {
    let c = m.charges().into_iter().max().unwrap_or(1) as usize;
    if !m.is_basis_form(c) {
        return Err(CombError::NotBasisForm(m.to_string()));
    }
    Ok(Stats { deg_q: m.deg_q(), wt: m.wt(), diagram: YoungDiagram::of(m) })
}

/// `Σ_{n ≤ N} a_n qⁿ` with coefficients polynomial in `c`.
#[derive(Clone, Debug, PartialEq)]
pub struct QSeries {
    coeffs: Vec<LevelPoly>,
}

impl QSeries {
    pub fn zero(order: usize) -> Self {
        QSeries { coeffs: vec![LevelPoly::zero(); order + 1] }
    }

    pub fn one(order: usize) -> Self {
        Self::term(order, 0, LevelPoly::one())
    }

    /// `k qⁿ`, dropped if `n` exceeds the order.
    pub fn term(order: usize, n: usize, k: LevelPoly) -> Self {
        let mut s = Self::zero(order);
        if n <= order {
            s.coeffs[n] = k;
        }
        s
    }

    /// `c^a q^b`.
    pub fn monomial(order: usize, a: u32, b: usize) -> Self {
        Self::term(order, b, LevelPoly::monomial(a, Scalar::one()))
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[LevelPoly] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> &LevelPoly {
        &self.coeffs[n]
    }

    pub fn add_at(&mut self, n: usize, k: &LevelPoly) {
        if n <= self.order() {
            self.coeffs[n] = self.coeffs[n].add(k);
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        QSeries { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        QSeries { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.sub(b)).collect() }
    }

    pub fn scale(&self, k: &LevelPoly) -> Self {
        QSeries { coeffs: self.coeffs.iter().map(|a| a.mul(k)).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.order().min(o.order());
        let mut out = Self::zero(n);
        for (i, a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate().take(n + 1 - i) {
                if !b.is_zero() {
                    out.coeffs[i + j] = out.coeffs[i + j].add(&a.mul(b));
                }
            }
        }
        out
    }

    /// `1 − c^a q^b`.
    pub fn one_minus(order: usize, a: u32, b: usize) -> Self {
        Self::one(order).sub(&Self::monomial(order, a, b))
    }

    /// `1/(1 − c^a q^b)` for `b ≥ 1`.
    pub fn geometric(order: usize, a: u32, b: usize) -> Self {
        assert!(b >= 1);
        let mut s = Self::zero(order);
        for i in 0..=order / b {
            s.coeffs[i * b] = LevelPoly::monomial(a * i as u32, Scalar::one());
        }
        s
    }

    /// Coefficients at a numeric level.
    pub fn specialize(&self, c: i64) -> QSeries {
        QSeries { coeffs: self.coeffs.iter().map(|a| LevelPoly::monomial(0, a.eval(c))).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|a| a.is_zero())
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.is_zero())
            .map(|(n, a)| format!("({a}) q^{n}"))
            .collect();
        if parts.is_empty() {
            write!(f, "0")?;
        } else {
            write!(f, "{}", parts.join(" + "))?;
        }
        write!(f, " + O(q^{})", self.order() + 1)
    }
}

/// `1/((1 − q)···(1 − q^r))`.
fn inv_q_pochhammer(order: usize, r: usize) -> QSeries {
    (1..=r).fold(QSeries::one(order), |acc, i| acc.mul(&QSeries::geometric(order, 0, i)))
}

/// Number of enumerated basis monomials at level `c` in each `deg_q`.
pub fn character(c: usize, order: usize) -> QSeries {
    let mut s = QSeries::zero(order);
    for m in enumerate_basis(c, order as i64) {
        s.add_at(m.deg_q() as usize, &LevelPoly::one());
    }
    s
}

/// `Σ c^k q^{deg_q}` over the mode sequences, with `c` symbolic.
pub fn shape_character(order: usize) -> QSeries {
    let mut s = QSeries::zero(order);
    for rs in shapes(order as i64) {
        let deg = -rs.iter().enumerate().map(|(j, r)| (j as i64 + 1) * r).sum::<i64>();
        s.add_at(deg as usize, &LevelPoly::monomial(rs.len() as u32, Scalar::one()));
    }
    s
}

/// `Σ_{r≥0} q^{r²} c^r / ((1 − q)···(1 − q^r))`.
pub fn character_formula(order: usize) -> QSeries {
    let mut s = QSeries::zero(order);
    let mut r = 0;
    while r * r <= order {
        s = s.add(&QSeries::monomial(order, r as u32, r * r).mul(&inv_q_pochhammer(order, r)));
        r += 1;
    }
    s
}

/// Right side of the identity:
/// `(1 + Σ_{s≥1} (−1)^s (1 − cq^{2s}) c^{2s} q^{s(5s−1)/2} (cq;q)_{s−1}/(q;q)_s) Π_{r≥1} 1/(1 − cq^r)`.
pub fn hardy_rhs(order: usize) -> QSeries {
    let mut bracket = QSeries::one(order);
    let mut s = 1usize;
    while s * (5 * s - 1) / 2 <= order {
        let mut t = QSeries::monomial(order, 2 * s as u32, s * (5 * s - 1) / 2)
            .mul(&QSeries::one_minus(order, 1, 2 * s))
            .mul(&inv_q_pochhammer(order, s));
        for i in 1..s {
            t = t.mul(&QSeries::one_minus(order, 1, i));
        }
        bracket = if s % 2 == 1 { bracket.sub(&t) } else { bracket.add(&t) };
        s += 1;
    }
    (1..=order).fold(bracket, |acc, r| acc.mul(&QSeries::geometric(order, 1, r)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityReport {
    pub order: usize,
    pub equal: bool,
    pub first_mismatch: Option<usize>,
}

/// Compares the character formula with [`hardy_rhs`] through `q^order`.
pub fn hardy_identity_check(order: usize) -> IdentityReport {
    let diff = character_formula(order).sub(&hardy_rhs(order));
    let first_mismatch = diff.coeffs().iter().position(|a| !a.is_zero());
    IdentityReport { order, equal: first_mismatch.is_none(), first_mismatch }
}

const PRIME: u64 = 4_294_967_291;

fn poly_mod(p: &crate::scalars::IntPoly, v: u64) -> u64 {
    let m = BigInt::from(PRIME);
    p.coeffs().iter().rev().fold(0u64, |acc, c| {
        let c = ((c % &m + &m) % &m).to_u64().expect("reduced mod p");
        ((acc as u128 * v as u128 + c as u128) % PRIME as u128) as u64
    })
}

fn pow_mod(mut b: u64, mut e: u64) -> u64 {
    let mut r = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * b as u128 % PRIME as u128) as u64;
        }
        b = (b as u128 * b as u128 % PRIME as u128) as u64;
        e >>= 1;
    }
    r
}

/// Pivot columns of the matrix with `v` specialized to an element of `𝔽_p`, or `None` if
/// some denominator vanishes there.
fn pivot_columns_mod_p(rows: &[Vec<Scalar>], v: u64) -> Option<Vec<usize>> {
    let mul = |a: u64, b: u64| (a as u128 * b as u128 % PRIME as u128) as u64;
    let mut a = Vec::with_capacity(rows.len());
    for row in rows {
        let mut r = Vec::with_capacity(row.len());
        for x in row {
            let d = poly_mod(x.denom(), v);
            if d == 0 {
                return None;
            }
            r.push(mul(poly_mod(x.numer(), v), pow_mod(d, PRIME - 2)));
        }
        a.push(r);
    }
    let ncols = a.iter().map(|r| r.len()).max().unwrap_or(0);
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..ncols {
        let Some(p) = (rank..a.len()).find(|&i| a[i][col] != 0) else { continue };
        a.swap(rank, p);
        let inv = pow_mod(a[rank][col], PRIME - 2);
        for i in rank + 1..a.len() {
            let f = mul(a[i][col], inv);
            if f == 0 {
                continue;
            }
            for j in col..ncols {
                a[i][j] = (a[i][j] + PRIME - mul(f, a[rank][j])) % PRIME;
            }
        }
        pivots.push(col);
        rank += 1;
    }
    Some(pivots)
}

/// Rank over `ℚ(v)` by fraction-free (Bareiss) elimination: rows are cleared of
/// denominators and every division in the elimination is exact in `ℤ[v, v⁻¹]`.
pub fn bareiss_rank(rows: &[Vec<Scalar>]) -> usize {
    let mut a: Vec<Vec<Scalar>> = rows
        .iter()
        .map(|row| {
            let mut dens: Vec<Scalar> = Vec::new();
            for x in row {
                let d = Scalar::new(x.denom().clone(), crate::scalars::IntPoly::one()).expect("nonzero denominator");
                if !d.is_one() && !dens.contains(&d) {
                    dens.push(d);
                }
            }
            let k = dens.iter().fold(Scalar::one(), |acc, d| acc * d);
            row.iter().map(|x| x * &k).collect()
        })
        .filter(|row: &Vec<Scalar>| row.iter().any(|x| !x.is_zero()))
        .collect();
    let ncols = a.iter().map(|r| r.len()).max().unwrap_or(0);
    for row in &mut a {
        row.resize(ncols, Scalar::zero());
    }
    let mut rank = 0;
    let mut prev = Scalar::one();
    for col in 0..ncols {
        if rank == a.len() {
            break;
        }
        let Some(p) = (rank..a.len()).find(|&i| !a[i][col].is_zero()) else { continue };
        a.swap(rank, p);
        let (top, rest) = a.split_at_mut(rank + 1);
        let pivot = &top[rank];
        for row in rest.iter_mut() {
            let f = row[col].clone();
            for j in col + 1..ncols {
                let x = &pivot[col] * &row[j] - &f * &pivot[j];
                row[j] = x / &prev;
            }
            row[col] = Scalar::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
    }
    rank
}

/// Exact rank over `ℚ(v)`.
///
/// Candidate pivot columns come from elimination over `𝔽_p` at a numeric `v`; the exact
/// rank of those columns is a lower bound, and it settles the rank when it equals the
/// number of rows. Otherwise the whole matrix is eliminated exactly.
pub fn exact_rank(rows: &[Vec<Scalar>]) -> usize {
    let pivots = [7919u64, 104_729, 1_299_709].iter().find_map(|&v| pivot_columns_mod_p(rows, v));
    if let Some(cols) = pivots {
        let sub: Vec<Vec<Scalar>> = rows.iter().map(|r| cols.iter().map(|&j| r[j].clone()).collect()).collect();
        let r = bareiss_rank(&sub);
        if r == rows.len() {
            return r;
        }
    }
    bareiss_rank(rows)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankReport {
    pub elements: usize,
    pub columns: usize,
    pub rank: usize,
    pub columns_t1: usize,
    pub rank_t1: usize,
}

impl RankReport {
    pub fn full(&self) -> bool {
        self.rank == self.elements && self.rank_t1 == self.elements
    }
}

type Column = (usize, Option<u32>, i64, Vec<FockState>);

/// Exact rank of the coefficients of `Y(b, z)w`, `b` running over `monomials` and `w` over
/// `vectors`, for doubled exponents `≤ hi2`; once keeping the `t`-degree and once at `t = 1`.
pub fn rank_of(monomials: &[QPMonomial], c: usize, vectors: &[TensorVector], hi2: i64) -> Result<RankReport, QvaError> {
    let mut graded: Vec<BTreeMap<Column, Scalar>> = Vec::new();
    let mut flat: Vec<BTreeMap<Column, Scalar>> = Vec::new();
    for m in monomials {
        let e = m.to_expr()?;
        let (mut g, mut f) = (BTreeMap::new(), BTreeMap::new());
        for (i, v) in vectors.iter().enumerate() {
            let ev = evaluate(&e, c, v, hi2)?;
            for (d, block) in &ev.by_degree {
                for (x, w) in block.iter() {
                    for (states, k) in w.iter() {
                        g.insert((i, Some(*d), *x, states.clone()), k.clone());
                        let slot: &mut Scalar = f.entry((i, None, *x, states.clone())).or_insert_with(Scalar::zero);
                        *slot += k;
                    }
                }
            }
        }
        graded.push(g);
        flat.push(f);
    }
    let matrix = |rows: &[BTreeMap<Column, Scalar>]| {
        let mut cols: Vec<&Column> = rows.iter().flat_map(|r| r.keys()).collect();
        cols.sort();
        cols.dedup();
        let m: Vec<Vec<Scalar>> = rows.iter().map(|r| cols.iter().map(|k| r.get(*k).cloned().unwrap_or_default()).collect()).collect();
        (cols.len(), exact_rank(&m))
    };
    let (columns, rank) = matrix(&graded);
    let (columns_t1, rank_t1) = matrix(&flat);
    Ok(RankReport { elements: monomials.len(), columns, rank, columns_t1, rank_t1 })
}

/// The vacuum of `L^{⊗c}` and the excited states with one box on a single factor.
pub fn default_test_vectors(c: usize) -> Vec<TensorVector> {
    let mut out = vec![TensorVector::vacuum(c)];
    for j in 0..c {
        let mut s = vec![FockState::vacuum(); c];
        s[j] = FockState::new(vec![1], 0);
        out.push(TensorVector::basis(s));
    }
    out
}

/// [`rank_of`] applied to `enumerate_basis(c, degq_max)`.
pub fn independence_rank(c: usize, degq_max: i64, hi2: i64, vectors: &[TensorVector]) -> Result<RankReport, QvaError> {
    rank_of(&enumerate_basis(c, degq_max), c, vectors, hi2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes_by_degree() {
        let mut counts = [0; 7];
        for rs in shapes(6) {
            let d = -rs.iter().enumerate().map(|(j, r)| (j as i64 + 1) * r).sum::<i64>();
            counts[d as usize] += 1;
        }
        assert_eq!(counts, [1, 1, 1, 1, 2, 2, 3]);
    }

    #[test]
    fn series_arithmetic() {
        let g = QSeries::geometric(5, 1, 2);
        let back = g.mul(&QSeries::one_minus(5, 1, 2));
        assert_eq!(back, QSeries::one(5));
    }

    #[test]
    fn rank_of_small_matrices() {
        let s = |k: i64| Scalar::v_pow(k);
        let rows = vec![vec![s(1), s(2)], vec![s(2), s(3)], vec![Scalar::one(), Scalar::zero()]];
        assert_eq!(exact_rank(&rows), 2);
        assert_eq!(exact_rank(&rows[..2]), 1);
        let half = Scalar::ratio(1, 2);
        assert_eq!(exact_rank(&[vec![half.clone(), s(1) / (Scalar::one() + s(2))], vec![Scalar::one(), Scalar::zero()]]), 2);
        assert_eq!(exact_rank(&[]), 0);
    }
}

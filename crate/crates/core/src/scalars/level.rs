use super::Scalar;
use std::collections::BTreeMap;
use std::fmt;

/// Polynomial in the level symbol `c` with `Scalar` coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LevelPoly {
    coeffs: BTreeMap<u32, Scalar>,
}

impl LevelPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, Scalar::one())
    }

    pub fn monomial(e: u32, s: Scalar) -> Self {
        let mut p = Self::zero();
        p.add_term(e, &s);
        p
    }

    pub fn coeffs(&self) -> &BTreeMap<u32, Scalar> {
        &self.coeffs
    }

    pub fn coeff(&self, e: u32) -> Scalar {
        self.coeffs.get(&e).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add_term(&mut self, e: u32, s: &Scalar) {
        if s.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(e).or_default();
        *entry += s;
        if entry.is_zero() {
            self.coeffs.remove(&e);
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (e, s) in &o.coeffs {
            r.add_term(*e, s);
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&Scalar::from_int(-1)))
    }

    pub fn scale(&self, k: &Scalar) -> Self {
        let mut r = Self::zero();
        for (e, s) in &self.coeffs {
            r.add_term(*e, &(s * k));
        }
        r
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut r = Self::zero();
        for (e1, s1) in &self.coeffs {
            for (e2, s2) in &o.coeffs {
                r.add_term(e1 + e2, &(s1 * s2));
            }
        }
        r
    }

    /// Multiply by `c^k`.
    pub fn shift(&self, k: u32) -> Self {
        LevelPoly { coeffs: self.coeffs.iter().map(|(e, s)| (e + k, s.clone())).collect() }
    }

    /// Value at an integer level.
    pub fn eval(&self, c: i64) -> Scalar {
        self.coeffs
            .iter()
            .fold(Scalar::zero(), |acc, (e, s)| acc + s * Scalar::from_int(c).pow(*e as i64))
    }

    /// Integer coefficients, if every coefficient is an integer constant.
    pub fn integer_coeffs(&self) -> Option<BTreeMap<u32, num_bigint::BigInt>> {
        self.coeffs.iter().map(|(e, s)| s.as_integer().map(|i| (*e, i))).collect()
    }
}

impl fmt::Display for LevelPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, s) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let coef = match s.as_integer() {
                Some(i) => i.to_string(),
                None => format!("[{}]", s),
            };
            match e {
                0 => write!(f, "{}", coef)?,
                1 if coef == "1" => write!(f, "c")?,
                1 => write!(f, "{}*c", coef)?,
                _ if coef == "1" => write!(f, "c^{}", e)?,
                _ => write!(f, "{}*c^{}", coef, e)?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_display() {
        let c = LevelPoly::monomial(1, Scalar::one());
        let p = LevelPoly::one().add(&c);
        let sq = p.mul(&p);
        assert_eq!(sq.to_string(), "1 + 2*c + c^2");
        assert_eq!(sq.eval(2), Scalar::from_int(9));
        assert!(p.sub(&p).is_zero());
    }
}

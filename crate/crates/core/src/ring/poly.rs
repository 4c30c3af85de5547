use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::trinomial::{TrinomialData, Var};

/// Exponent vector over the flat variable order.
///
/// The derived ordering is lexicographic with the first variable most
/// significant, i.e. `T01 > T02 > ... > T11 > ... > T2n2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Self(vec![0; nvars])
    }

    pub fn from_exponents(exponents: Vec<u32>) -> Self {
        Self(exponents)
    }

    pub fn variable(nvars: usize, k: usize) -> Self {
        let mut e = vec![0; nvars];
        e[k] = 1;
        Self(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn total_degree(&self) -> u64 {
        self.0.iter().map(|&e| u64::from(e)).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `self / other`, or `None` if `other` does not divide `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        other.divides(self).then(|| {
            Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
        })
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.min(b)).collect())
    }

    pub fn pow(&self, k: u32) -> Monomial {
        Monomial(self.0.iter().map(|e| e * k).collect())
    }

    pub fn display<'a>(&'a self, t: &'a TrinomialData) -> MonomialDisplay<'a> {
        MonomialDisplay { mono: self, t }
    }
}

pub struct MonomialDisplay<'a> {
    mono: &'a Monomial,
    t: &'a TrinomialData,
}

impl fmt::Display for MonomialDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let factors: Vec<String> = self
            .mono
            .0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(k, &e)| match e {
                1 => self.t.var(k).to_string(),
                _ => format!("{}^{}", self.t.var(k), e),
            })
            .collect();
        if factors.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", factors.join("*"))
        }
    }
}

/// Sparse polynomial with exact rational coefficients.
///
/// Zero coefficients are never stored. Iteration is in ascending term order,
/// so the leading term is the last entry.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, BigRational>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        Self::term(c, Monomial::one(nvars))
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigRational::one())
    }

    pub fn term(c: BigRational, m: Monomial) -> Self {
        let mut p = Self::zero(m.nvars());
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn monomial(m: Monomial) -> Self {
        Self::term(BigRational::one(), m)
    }

    pub fn variable(t: &TrinomialData, v: Var) -> Self {
        Self::monomial(Monomial::variable(t.n(), t.flat(v)))
    }

    /// `T_i^{l_i}`.
    pub fn block_monomial(t: &TrinomialData, block: usize) -> Self {
        Self::monomial(Monomial(t.block_exponent_vector(block)))
    }

    /// The trinomial `g` itself.
    pub fn trinomial(t: &TrinomialData) -> Self {
        (0..3)
            .map(|i| Self::block_monomial(t, i))
            .fold(Self::zero(t.n()), |acc, p| &acc + &p)
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, BigRational)>) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> Option<u64> {
        self.terms.keys().map(Monomial::total_degree).max()
    }

    pub fn add_term(&mut self, m: Monomial, c: BigRational) {
        debug_assert_eq!(m.nvars(), self.nvars);
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(slot) => {
                slot.insert(c);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Self {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        Self {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(k, a)| (k.mul(m), a.clone())).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut result = Self::one(self.nvars);
        for _ in 0..k {
            result = &result * self;
        }
        result
    }

    /// Formal partial derivative with respect to the variable at flat index `k`.
    pub fn partial_derivative(&self, k: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[k];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[k] -= 1;
            out.add_term(Monomial(exps), c * BigRational::from(BigInt::from(e)));
        }
        out
    }

    /// Exact division by a monomial; `None` if some term is not divisible.
    pub fn div_monomial(&self, m: &Monomial) -> Option<Self> {
        let mut terms = BTreeMap::new();
        for (k, c) in &self.terms {
            terms.insert(k.div(m)?, c.clone());
        }
        Some(Self {
            nvars: self.nvars,
            terms,
        })
    }

    /// Greatest common monomial divisor of all terms; `None` for zero.
    pub fn monomial_content(&self) -> Option<Monomial> {
        let mut it = self.terms.keys();
        let first = it.next()?.clone();
        Some(it.fold(first, |acc, m| acc.gcd(m)))
    }

    /// If `other = c * self` for a rational `c`, returns `c`.
    /// Zero is proportional to everything with factor zero.
    pub fn proportionality(&self, other: &Polynomial) -> Option<BigRational> {
        if other.is_zero() {
            return Some(BigRational::zero());
        }
        if self.is_zero() || self.len() != other.len() {
            return None;
        }
        let (m, a) = self.leading_term()?;
        let c = other.coefficient(m) / a;
        (self.scale(&c) == *other).then_some(c)
    }

    pub fn display<'a>(&'a self, t: &'a TrinomialData) -> PolynomialDisplay<'a> {
        PolynomialDisplay { poly: self, t }
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        self.scale(&-BigRational::one())
    }
}

pub struct PolynomialDisplay<'a> {
    poly: &'a Polynomial,
    t: &'a TrinomialData,
}

/// Prints in the grammar accepted by the expression parser, leading term first.
impl fmt::Display for PolynomialDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.poly.terms.iter().rev().enumerate() {
            let magnitude = c.abs();
            match (k, c.is_negative()) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if m.is_one() {
                write!(f, "{magnitude}")?;
            } else if magnitude.is_one() {
                write!(f, "{}", m.display(self.t))?;
            } else {
                write!(f, "{}*{}", magnitude, m.display(self.t))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadric() -> TrinomialData {
        TrinomialData::new(vec![1, 1], vec![1, 1], vec![2]).unwrap()
    }

    fn var(t: &TrinomialData, i: usize, j: usize) -> Polynomial {
        Polynomial::variable(t, Var::new(i, j))
    }

    #[test]
    fn arithmetic_identities() {
        let t = quadric();
        let a = &var(&t, 0, 1) + &var(&t, 1, 2);
        assert_eq!(&a + &Polynomial::zero(t.n()), a);
        assert!((&a - &a).is_zero());
        let lhs = &(&var(&t, 0, 1) + &var(&t, 0, 2)) * &(&var(&t, 0, 1) - &var(&t, 0, 2));
        let rhs = &(&var(&t, 0, 1) * &var(&t, 0, 1)) - &(&var(&t, 0, 2) * &var(&t, 0, 2));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn partial_derivatives() {
        let t = quadric();
        let t21 = var(&t, 2, 1);
        let d = (&t21 * &t21).partial_derivative(t.flat(Var::new(2, 1)));
        assert_eq!(d, t21.scale(&BigRational::from_integer(2.into())));
        let p = &var(&t, 0, 1) * &var(&t, 0, 2);
        assert_eq!(p.partial_derivative(0), var(&t, 0, 2));
        assert!(Polynomial::one(t.n()).partial_derivative(0).is_zero());
    }

    #[test]
    fn leading_term_is_block_zero_monomial() {
        let t = quadric();
        let g = Polynomial::trinomial(&t);
        let (lm, _) = g.leading_term().unwrap();
        assert_eq!(lm.exponents(), &[1, 1, 0, 0, 0]);
    }

    #[test]
    fn display_format() {
        let t = quadric();
        let p = &var(&t, 0, 1).scale(&BigRational::new((-1).into(), 2.into()))
            + &Polynomial::one(t.n());
        assert_eq!(p.display(&t).to_string(), "-1/2*T(0,1) + 1");
    }
}

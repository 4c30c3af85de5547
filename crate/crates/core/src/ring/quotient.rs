//! Arithmetic in `R(g) = K[T_ij] / (g)`.
//!
//! Under the lexicographic order with `T01` most significant the leading
//! monomial of `g` is `T_0^{l_0}`, so reduction replaces every occurrence of
//! `T_0^{l_0}` by `-(T_1^{l_1} + T_2^{l_2})`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::poly::{Monomial, Polynomial};
use super::trinomial::TrinomialData;

fn binomial(n: u32, k: u32) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// Largest `q` with `T_0^{q l_0}` dividing the monomial.
fn block_zero_power(t: &TrinomialData, m: &Monomial) -> u32 {
    t.exponents(0)
        .iter()
        .enumerate()
        .map(|(j, &l)| m.exponents()[j] / l)
        .min()
        .unwrap_or(0)
}

/// Unique representative of `p + (g)`: the remainder of division by `g`.
pub fn normal_form(p: &Polynomial, t: &TrinomialData) -> Polynomial {
    let n = t.n();
    let l0 = Monomial::from_exponents(t.block_exponent_vector(0));
    let y = Monomial::from_exponents(t.block_exponent_vector(1));
    let z = Monomial::from_exponents(t.block_exponent_vector(2));

    let mut out = Polynomial::zero(n);
    for (m, c) in p.terms() {
        let q = block_zero_power(t, m);
        if q == 0 {
            out.add_term(m.clone(), c.clone());
            continue;
        }
        let rest = m.div(&l0.pow(q)).expect("block power divides");
        let sign = if q.is_multiple_of(2) { c.clone() } else { -c.clone() };
        for k in 0..=q {
            let coeff = &sign * BigRational::from(binomial(q, k));
            out.add_term(rest.mul(&y.pow(k)).mul(&z.pow(q - k)), coeff);
        }
    }
    out
}

/// `a * b` reduced modulo `g`.
pub fn mul_reduced(a: &Polynomial, b: &Polynomial, t: &TrinomialData) -> Polynomial {
    normal_form(&(a * b), t)
}

/// A binary form `F(x, y) = sum_a coeffs[a] * x^a * y^(d - a)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryForm {
    pub coeffs: Vec<BigRational>,
}

impl BinaryForm {
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Expands `F(X, Y)` for polynomials `X`, `Y`.
    pub fn evaluate(&self, x: &Polynomial, y: &Polynomial) -> Polynomial {
        let d = self.degree() as u32;
        let mut out = Polynomial::zero(x.nvars());
        for (a, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let term = &x.pow(a as u32) * &y.pow(d - a as u32);
            out = &out + &term.scale(c);
        }
        out
    }
}

/// `p = monomial * F(T_x^{l_x}, T_y^{l_y})` with `F` a binary form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockDecomposition {
    pub monomial: Monomial,
    pub form: BinaryForm,
}

/// Writes the representative `p` literally as a monomial times a binary form
/// in the two block monomials `T_x^{l_x}`, `T_y^{l_y}`.
///
/// The monomial is the greatest common monomial divisor of `p`. Returns
/// `None` if the cofactor is not such a form, or if `p` is zero.
pub fn decompose_over_blocks(
    p: &Polynomial,
    t: &TrinomialData,
    x_block: usize,
    y_block: usize,
) -> Option<BlockDecomposition> {
    let content = p.monomial_content()?;
    let cofactor = p.div_monomial(&content)?;
    let block_power = |m: &Monomial, block: usize| -> Option<u32> {
        let mut power = None;
        for v in t.block_vars(block) {
            let e = m.exponents()[t.flat(v)];
            let l = t.exponent(v);
            if !e.is_multiple_of(l) {
                return None;
            }
            match power {
                None => power = Some(e / l),
                Some(k) if k == e / l => {}
                Some(_) => return None,
            }
        }
        power
    };

    let mut pattern = Vec::with_capacity(cofactor.len());
    for (m, c) in cofactor.terms() {
        let other = 3 - x_block - y_block;
        if t.block_vars(other).any(|v| m.exponents()[t.flat(v)] != 0) {
            return None;
        }
        let a = block_power(m, x_block)?;
        let b = block_power(m, y_block)?;
        pattern.push((a, b, c.clone()));
    }
    let degree = pattern.first().map(|(a, b, _)| a + b)?;
    if pattern.iter().any(|(a, b, _)| a + b != degree) {
        return None;
    }
    let mut coeffs = vec![BigRational::zero(); degree as usize + 1];
    for (a, _, c) in pattern {
        coeffs[a as usize] = c;
    }
    Some(BlockDecomposition {
        monomial: content,
        form: BinaryForm { coeffs },
    })
}

/// `p = prod T_ij^{u_ij} * F(T_0^{l_0}, T_1^{l_1})` on the given representative.
pub fn decompose_homogeneous(p: &Polynomial, t: &TrinomialData) -> Option<BlockDecomposition> {
    decompose_over_blocks(p, t, 0, 1)
}

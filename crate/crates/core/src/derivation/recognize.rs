use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::elementary::{partial_product, ElementarySpec, ElementaryType, KernelMultiplier};
use super::Derivation;
use crate::ring::{decompose_over_blocks, normal_form, Monomial, Polynomial};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum NotElementaryReason {
    /// Non-kernel variables are not one per block in two or three blocks.
    NonKernelShape,
    /// The blocks carrying non-kernel variables break the exponent condition.
    ExponentCondition,
    /// An image is not divisible by its partial-derivative product.
    DivisionFailed,
    /// Block images are not proportional with coefficients summing to zero.
    BetaMismatch,
    /// The common factor is not `alpha * T^u * (beta_1 T_0^{l_0} - beta_0 T_1^{l_1})^m`.
    MultiplierNotFactored,
    /// The rebuilt derivation differs from the input.
    ReconstructionMismatch,
}

impl NotElementaryReason {
    /// Failures that only occur past the point where `C` and `beta` are
    /// read off consistently; a larger scalar field might still factor `h`.
    pub fn needs_scalar_extension(self) -> bool {
        matches!(self, Self::MultiplierNotFactored)
    }
}

#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Recognition {
    Zero,
    Elementary(ElementarySpec),
    NotElementary(NotElementaryReason),
}

impl Recognition {
    pub fn is_elementary(&self) -> bool {
        !matches!(self, Self::NotElementary(_))
    }
}

fn binomial(n: u32, k: u32) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// Exact quotient of `p` by `c * m`, if every term is divisible.
fn divide_by_term(p: &Polynomial, divisor: &Polynomial) -> Option<Polynomial> {
    let (m, c) = divisor.leading_term()?;
    if divisor.len() != 1 {
        return None;
    }
    p.div_monomial(m).map(|q| q.scale(&(BigRational::one() / c)))
}

/// Reads `h * delta_{C,beta}` back off the images of `d`.
pub fn is_elementary(d: &Derivation) -> Recognition {
    use NotElementaryReason::*;
    if d.is_zero() {
        return Recognition::Zero;
    }
    let t = d.trinomial();
    let non_kernel = d.non_kernel_variables();
    let mut c = [1usize; 3];
    let mut active = [false; 3];
    for v in &non_kernel {
        if active[v.block] {
            return Recognition::NotElementary(NonKernelShape);
        }
        active[v.block] = true;
        c[v.block] = v.index;
    }
    let kind = match non_kernel.len() {
        3 => ElementaryType::I,
        2 => ElementaryType::II {
            i0: (0..3).find(|&i| !active[i]).expect("one inactive block"),
        },
        _ => return Recognition::NotElementary(NonKernelShape),
    };
    let blocks = kind.active_blocks();
    if blocks
        .iter()
        .filter(|&&i| t.exponent(crate::ring::Var::new(i, c[i])) > 1)
        .count()
        > 1
    {
        return Recognition::NotElementary(ExponentCondition);
    }

    // Block 0 variables never occur in the reference product, so the
    // quotient is the normal form of h.
    let r = blocks[0];
    let p_r = partial_product(t, &c, kind, r);
    let image_r = d.image(crate::ring::Var::new(r, c[r]));
    let Some(q) = divide_by_term(image_r, &p_r) else {
        return Recognition::NotElementary(DivisionFailed);
    };

    let mut beta = [BigRational::zero(), BigRational::zero(), BigRational::zero()];
    beta[r] = BigRational::one();
    for &i in &blocks[1..] {
        let expected = normal_form(&(&q * &partial_product(t, &c, kind, i)), t);
        match expected.proportionality(d.image(crate::ring::Var::new(i, c[i]))) {
            Some(b) if !b.is_zero() => beta[i] = b,
            _ => return Recognition::NotElementary(BetaMismatch),
        }
    }
    if !(&beta[0] + &beta[1] + &beta[2]).is_zero() {
        return Recognition::NotElementary(BetaMismatch);
    }

    let Some(dec) = decompose_over_blocks(&q, t, 1, 2) else {
        return Recognition::NotElementary(MultiplierNotFactored);
    };
    let m = dec.form.degree() as u32;
    // (beta_2 y - beta_1 z)^m, coefficient of y^a z^(m-a).
    let power: Vec<BigRational> = (0..=m)
        .map(|a| {
            let sign_b1 = -beta[1].clone();
            BigRational::from(binomial(m, a)) * num_traits::pow(beta[2].clone(), a as usize)
                * num_traits::pow(sign_b1, (m - a) as usize)
        })
        .collect();
    let reference = Polynomial::from_terms(
        m as usize + 1,
        power
            .iter()
            .enumerate()
            .map(|(a, coeff)| (Monomial::variable(m as usize + 1, a), coeff.clone())),
    );
    let actual = Polynomial::from_terms(
        m as usize + 1,
        dec.form
            .coeffs
            .iter()
            .enumerate()
            .map(|(a, coeff)| (Monomial::variable(m as usize + 1, a), coeff.clone())),
    );
    let Some(alpha) = reference.proportionality(&actual) else {
        return Recognition::NotElementary(MultiplierNotFactored);
    };
    if alpha.is_zero() {
        return Recognition::NotElementary(MultiplierNotFactored);
    }

    let multiplier = KernelMultiplier {
        exponents: dec.monomial.exponents().to_vec(),
        m,
        alpha,
    };
    let Ok(spec) = ElementarySpec::new(t, c, beta, multiplier) else {
        return Recognition::NotElementary(ReconstructionMismatch);
    };
    if spec.derivation(t) != *d {
        return Recognition::NotElementary(ReconstructionMismatch);
    }
    Recognition::Elementary(spec)
}

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::{Derivation, DerivationError};
use crate::abelian::GroupElement;
use crate::ring::{normal_form, FineGrading, Monomial, Polynomial, TrinomialData, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ElementaryType {
    /// All `beta_i` nonzero.
    I,
    /// `beta_{i0} = 0` for exactly one `i0`.
    II { i0: usize },
}

impl ElementaryType {
    pub fn from_beta(beta: &[BigRational; 3]) -> Result<Self, DerivationError> {
        if !(&beta[0] + &beta[1] + &beta[2]).is_zero() {
            return Err(DerivationError::BetaSumNonzero);
        }
        let zeros: Vec<usize> = (0..3).filter(|&i| beta[i].is_zero()).collect();
        match zeros.as_slice() {
            [] => Ok(Self::I),
            [i0] => Ok(Self::II { i0: *i0 }),
            _ => Err(DerivationError::BetaCaseInvalid),
        }
    }

    /// Blocks carrying a non-kernel variable.
    pub fn active_blocks(self) -> Vec<usize> {
        match self {
            Self::I => vec![0, 1, 2],
            Self::II { i0 } => (0..3).filter(|&i| i != i0).collect(),
        }
    }
}

/// `h = alpha * prod T^u * (beta_1 T_0^{l_0} - beta_0 T_1^{l_1})^m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelMultiplier {
    pub exponents: Vec<u32>,
    pub m: u32,
    pub alpha: BigRational,
}

impl KernelMultiplier {
    pub fn one(t: &TrinomialData) -> Self {
        Self {
            exponents: vec![0; t.n()],
            m: 0,
            alpha: BigRational::one(),
        }
    }
}

/// Data of an elementary derivation `h * delta_{C,beta}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementarySpec {
    /// 1-based `(c_0, c_1, c_2)`; in Type II `c_{i0}` is carried but unused.
    pub c: [usize; 3],
    pub beta: [BigRational; 3],
    pub kind: ElementaryType,
    pub multiplier: KernelMultiplier,
}

fn check_indices(t: &TrinomialData, c: &[usize; 3]) -> Result<(), DerivationError> {
    for (block, &index) in c.iter().enumerate() {
        let size = t.block_size(block);
        if index == 0 || index > size {
            return Err(DerivationError::IndexOutOfRange { block, index, size });
        }
    }
    Ok(())
}

fn exponent_condition(t: &TrinomialData, c: &[usize; 3], kind: ElementaryType) -> bool {
    kind.active_blocks()
        .into_iter()
        .filter(|&i| t.exponent(Var::new(i, c[i])) > 1)
        .count()
        <= 1
}

impl ElementarySpec {
    pub fn new(
        t: &TrinomialData,
        c: [usize; 3],
        beta: [BigRational; 3],
        multiplier: KernelMultiplier,
    ) -> Result<Self, DerivationError> {
        check_indices(t, &c)?;
        let kind = ElementaryType::from_beta(&beta)?;
        if !exponent_condition(t, &c, kind) {
            return Err(DerivationError::ExponentConditionViolated);
        }
        if multiplier.exponents.len() != t.n() {
            return Err(DerivationError::LengthMismatch {
                expected: t.n(),
                actual: multiplier.exponents.len(),
            });
        }
        let spec = Self {
            c,
            beta,
            kind,
            multiplier,
        };
        if let Some(v) = spec
            .non_kernel_variables()
            .into_iter()
            .find(|&v| spec.multiplier.exponents[t.flat(v)] > 0)
        {
            return Err(DerivationError::SupportViolation(v));
        }
        Ok(spec)
    }

    pub fn non_kernel_variables(&self) -> BTreeSet<Var> {
        self.kind
            .active_blocks()
            .into_iter()
            .map(|i| Var::new(i, self.c[i]))
            .collect()
    }

    /// `delta_{C,beta}` without the multiplier.
    pub fn base_derivation(&self, t: &TrinomialData) -> Derivation {
        let assignments: Vec<(Var, Polynomial)> = self
            .kind
            .active_blocks()
            .into_iter()
            .map(|i| {
                let image = partial_product(t, &self.c, self.kind, i).scale(&self.beta[i]);
                (Var::new(i, self.c[i]), image)
            })
            .collect();
        Derivation::from_assignments(t, assignments)
    }

    /// `h * delta_{C,beta}`.
    pub fn derivation(&self, t: &TrinomialData) -> Derivation {
        self.base_derivation(t).scale_by(&kernel_polynomial(t, self))
    }
}

/// `prod_{k != i, k active} dT_k^{l_k} / dT_{k c_k}`, a scalar times a monomial.
pub fn partial_product(t: &TrinomialData, c: &[usize; 3], kind: ElementaryType, i: usize) -> Polynomial {
    kind.active_blocks()
        .into_iter()
        .filter(|&k| k != i)
        .map(|k| {
            Polynomial::block_monomial(t, k).partial_derivative(t.flat(Var::new(k, c[k])))
        })
        .fold(Polynomial::one(t.n()), |acc, p| &acc * &p)
}

/// `delta_{C,beta}` from Construction-level data.
pub fn elementary_derivation(
    t: &TrinomialData,
    c: [usize; 3],
    beta: [BigRational; 3],
) -> Result<Derivation, DerivationError> {
    let spec = ElementarySpec::new(t, c, beta, KernelMultiplier::one(t))?;
    Ok(spec.base_derivation(t))
}

fn kernel_polynomial(t: &TrinomialData, spec: &ElementarySpec) -> Polynomial {
    let mult = &spec.multiplier;
    let binomial = &Polynomial::block_monomial(t, 0).scale(&spec.beta[1])
        - &Polynomial::block_monomial(t, 1).scale(&spec.beta[0]);
    let mut h = Polynomial::term(
        mult.alpha.clone(),
        Monomial::from_exponents(mult.exponents.clone()),
    );
    for _ in 0..mult.m {
        h = normal_form(&(&h * &binomial), t);
    }
    normal_form(&h, t)
}

/// The homogeneous kernel element described by `spec.multiplier`, in normal form.
pub fn kernel_element(t: &TrinomialData, spec: &ElementarySpec) -> Result<Polynomial, DerivationError> {
    if let Some(v) = spec
        .non_kernel_variables()
        .into_iter()
        .find(|&v| spec.multiplier.exponents.get(t.flat(v)).copied().unwrap_or(0) > 0)
    {
        return Err(DerivationError::SupportViolation(v));
    }
    Ok(kernel_polynomial(t, spec))
}

/// Closed-form degree of `h * delta_{C,beta}`.
pub fn elementary_degree(fg: &FineGrading, spec: &ElementarySpec) -> GroupElement {
    let group = fg.group();
    let g = fg.g_degree();
    let mut deg = match spec.kind {
        ElementaryType::I => group.scale(g, &BigInt::from(2)).expect("same group"),
        ElementaryType::II { .. } => g.clone(),
    };
    for v in spec.non_kernel_variables() {
        deg = group.sub(&deg, fg.degree_of(v)).expect("same group");
    }
    let h = fg.monomial_degree(&Monomial::from_exponents(spec.multiplier.exponents.clone()));
    deg = group.add(&deg, &h).expect("same group");
    group
        .add(&deg, &group.scale(g, &BigInt::from(spec.multiplier.m)).expect("same group"))
        .expect("same group")
}

/// An unscaled `(C, type)` class of `delta_{C,beta}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct ElementaryClass {
    pub c: [usize; 3],
    pub kind: ElementaryType,
}

/// All `(C, type)` pairs admitted by the exponent conditions. Type II
/// classes fix `c_{i0} = 1`.
pub fn elementary_classes(t: &TrinomialData) -> Vec<ElementaryClass> {
    let [n0, n1, n2] = t.block_sizes();
    let mut out = Vec::new();
    for c0 in 1..=n0 {
        for c1 in 1..=n1 {
            for c2 in 1..=n2 {
                let c = [c0, c1, c2];
                if exponent_condition(t, &c, ElementaryType::I) {
                    out.push(ElementaryClass {
                        c,
                        kind: ElementaryType::I,
                    });
                }
                for i0 in 0..3 {
                    if c[i0] != 1 {
                        continue;
                    }
                    let kind = ElementaryType::II { i0 };
                    if exponent_condition(t, &c, kind) {
                        out.push(ElementaryClass { c, kind });
                    }
                }
            }
        }
    }
    out.sort();
    out
}

pub fn count_elementary_classes(t: &TrinomialData) -> usize {
    elementary_classes(t).len()
}

/// `(C, type, beta)` read off from the kernel, `beta` up to a scalar.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reconstruction {
    pub c: [usize; 3],
    pub kind: ElementaryType,
    pub beta: [BigRational; 3],
}

/// Recovers `delta_{C,beta}` up to a constant from its kernel variables and a
/// binomial `zeta T_0^{l_0} + xi T_1^{l_1}` in its kernel.
pub fn reconstruct_from_kernel(
    t: &TrinomialData,
    kernel_vars: &BTreeSet<Var>,
    zeta: &BigRational,
    xi: &BigRational,
) -> Result<Reconstruction, DerivationError> {
    let non_kernel: Vec<Var> = t.vars().filter(|v| !kernel_vars.contains(v)).collect();
    let blocks: BTreeSet<usize> = non_kernel.iter().map(|v| v.block).collect();
    if blocks.len() != non_kernel.len() || !(2..=3).contains(&non_kernel.len()) {
        return Err(DerivationError::InvalidKernelShape);
    }
    let mut c = [1; 3];
    for v in &non_kernel {
        c[v.block] = v.index;
    }
    let kind = match (0..3).find(|b| !blocks.contains(b)) {
        None => ElementaryType::I,
        Some(i0) => ElementaryType::II { i0 },
    };
    let beta0 = -xi.clone();
    let beta1 = zeta.clone();
    let beta2 = -(&beta0 + &beta1);
    let beta = [beta0, beta1, beta2];
    if ElementaryType::from_beta(&beta).ok() != Some(kind) {
        return Err(DerivationError::InconsistentBinomial);
    }
    if !exponent_condition(t, &c, kind) {
        return Err(DerivationError::InvalidKernelShape);
    }
    Ok(Reconstruction { c, kind, beta })
}

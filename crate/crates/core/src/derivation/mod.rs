//! Derivations of `R(g)` given by their values on the generators.

mod elementary;
mod recognize;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::abelian::GroupElement;
use crate::ring::{normal_form, FineGrading, Homogeneity, Polynomial, TrinomialData, Var};

pub use elementary::{
    count_elementary_classes, elementary_classes, elementary_degree, elementary_derivation,
    kernel_element, partial_product, reconstruct_from_kernel, ElementaryClass, ElementarySpec,
    ElementaryType, KernelMultiplier, Reconstruction,
};
pub use recognize::{is_elementary, NotElementaryReason, Recognition};

/// Default cap for [`Derivation::bounded_nilpotency`].
pub const DEFAULT_NILPOTENCY_CAP: usize = 50;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DerivationError {
    #[error("beta entries must sum to zero")]
    BetaSumNonzero,
    #[error("beta must have either no zero entry or exactly one")]
    BetaCaseInvalid,
    #[error("more than one chosen exponent l(i,c_i) exceeds 1 for this type")]
    ExponentConditionViolated,
    #[error("index c_{block} = {index} out of range 1..={size}")]
    IndexOutOfRange {
        block: usize,
        index: usize,
        size: usize,
    },
    #[error("multiplier exponent on non-kernel variable {0}")]
    SupportViolation(Var),
    #[error("expected {expected} generator images, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("the zero derivation has no degree")]
    ZeroDerivation,
    #[error("kernel variables do not leave one non-kernel variable in each of two or three blocks")]
    InvalidKernelShape,
    #[error("the binomial is incompatible with the kernel shape")]
    InconsistentBinomial,
}

/// A derivation determined by the images of the generators, kept in normal form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    trinomial: TrinomialData,
    images: Vec<Polynomial>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DerivationDegree {
    Homogeneous(GroupElement),
    NotHomogeneous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Nilpotency {
    /// `d^k(T_ij) = 0` for every generator, with `k` minimal.
    Nilpotent(usize),
    UnknownAtCap,
}

impl Derivation {
    pub fn new(t: &TrinomialData, images: Vec<Polynomial>) -> Result<Self, DerivationError> {
        if images.len() != t.n() {
            return Err(DerivationError::LengthMismatch {
                expected: t.n(),
                actual: images.len(),
            });
        }
        let images = images.iter().map(|p| normal_form(p, t)).collect();
        Ok(Self {
            trinomial: t.clone(),
            images,
        })
    }

    pub fn zero(t: &TrinomialData) -> Self {
        Self {
            trinomial: t.clone(),
            images: vec![Polynomial::zero(t.n()); t.n()],
        }
    }

    /// Builds from `(variable, image)` pairs; omitted generators map to zero.
    pub fn from_assignments(
        t: &TrinomialData,
        assignments: impl IntoIterator<Item = (Var, Polynomial)>,
    ) -> Self {
        let mut images = vec![Polynomial::zero(t.n()); t.n()];
        for (v, p) in assignments {
            images[t.flat(v)] = normal_form(&p, t);
        }
        Self {
            trinomial: t.clone(),
            images,
        }
    }

    pub fn trinomial(&self) -> &TrinomialData {
        &self.trinomial
    }

    pub fn images(&self) -> &[Polynomial] {
        &self.images
    }

    pub fn image(&self, v: Var) -> &Polynomial {
        &self.images[self.trinomial.flat(v)]
    }

    pub fn is_zero(&self) -> bool {
        self.images.iter().all(Polynomial::is_zero)
    }

    /// `h * d`.
    pub fn scale_by(&self, h: &Polynomial) -> Self {
        let images = self
            .images
            .iter()
            .map(|p| normal_form(&(h * p), &self.trinomial))
            .collect();
        Self {
            trinomial: self.trinomial.clone(),
            images,
        }
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, other: &Derivation, c: &num_rational::BigRational) -> Self {
        let images = self
            .images
            .iter()
            .zip(&other.images)
            .map(|(a, b)| a + &b.scale(c))
            .collect();
        Self {
            trinomial: self.trinomial.clone(),
            images,
        }
    }

    /// Leibniz extension to `p`, reduced modulo `g`.
    pub fn apply(&self, p: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero(self.trinomial.n());
        for (k, image) in self.images.iter().enumerate() {
            if image.is_zero() {
                continue;
            }
            let partial = p.partial_derivative(k);
            if !partial.is_zero() {
                out = &out + &(&partial * image);
            }
        }
        normal_form(&out, &self.trinomial)
    }

    /// `d(g) = 0` in `R(g)`, so the map descends to the quotient.
    pub fn is_well_defined(&self) -> bool {
        self.apply(&Polynomial::trinomial(&self.trinomial)).is_zero()
    }

    pub fn is_in_kernel(&self, p: &Polynomial) -> bool {
        self.apply(p).is_zero()
    }

    pub fn non_kernel_variables(&self) -> BTreeSet<Var> {
        self.images
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(k, _)| self.trinomial.var(k))
            .collect()
    }

    /// The common value of `deg d(T_ij) - deg T_ij` over non-kernel generators.
    pub fn degree(&self, fg: &FineGrading) -> Result<DerivationDegree, DerivationError> {
        let group = fg.group();
        let mut common: Option<GroupElement> = None;
        for (k, image) in self.images.iter().enumerate() {
            let shift = match fg.homogeneous_degree(image) {
                Homogeneity::Zero => continue,
                Homogeneity::NotHomogeneous => return Ok(DerivationDegree::NotHomogeneous),
                Homogeneity::Homogeneous(d) => group
                    .sub(&d, &fg.generator_degrees()[k])
                    .expect("degrees share the group"),
            };
            match &common {
                None => common = Some(shift),
                Some(c) if *c == shift => {}
                Some(_) => return Ok(DerivationDegree::NotHomogeneous),
            }
        }
        common
            .map(DerivationDegree::Homogeneous)
            .ok_or(DerivationError::ZeroDerivation)
    }

    /// Semi-decision for local nilpotency: iterates on each generator.
    /// Never reports non-nilpotency; gives up after `cap` applications.
    pub fn bounded_nilpotency(&self, cap: usize) -> Nilpotency {
        let t = &self.trinomial;
        let mut index = 1;
        for v in t.vars() {
            let mut f = Polynomial::variable(t, v);
            let mut steps = 0;
            while !f.is_zero() {
                if steps == cap {
                    return Nilpotency::UnknownAtCap;
                }
                f = self.apply(&f);
                steps += 1;
            }
            index = index.max(steps);
        }
        Nilpotency::Nilpotent(index)
    }

    /// Whether `d(T_0^{l_0})`, `d(T_1^{l_1})`, `d(T_2^{l_2})` span a space of
    /// dimension at most one.
    pub fn block_image_proportionality(&self) -> bool {
        let images: Vec<Polynomial> = (0..3)
            .map(|i| self.apply(&Polynomial::block_monomial(&self.trinomial, i)))
            .collect();
        match images.iter().find(|p| !p.is_zero()) {
            None => true,
            Some(base) => images.iter().all(|p| base.proportionality(p).is_some()),
        }
    }

    pub fn display_images(&self) -> Vec<(Var, String)> {
        self.images
            .iter()
            .enumerate()
            .map(|(k, p)| (self.trinomial.var(k), p.display(&self.trinomial).to_string()))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::fine_grading;
    use num_bigint::BigInt;

    fn quadric() -> TrinomialData {
        TrinomialData::new(vec![1, 1], vec![1, 1], vec![2]).unwrap()
    }

    fn var(t: &TrinomialData, i: usize, j: usize) -> Polynomial {
        Polynomial::variable(t, Var::new(i, j))
    }

    /// T12 d/dT01 - T02 d/dT11
    fn quadric_witness(t: &TrinomialData) -> Derivation {
        Derivation::from_assignments(
            t,
            [
                (Var::new(0, 1), var(t, 1, 2)),
                (Var::new(1, 1), -&var(t, 0, 2)),
            ],
        )
    }

    fn euler(t: &TrinomialData) -> Derivation {
        Derivation::from_assignments(t, t.vars().map(|v| (v, Polynomial::variable(t, v))).collect::<Vec<_>>())
    }

    #[test]
    fn leibniz_on_products() {
        let t = quadric();
        let d = quadric_witness(&t);
        assert!(d.is_well_defined());
        let p = &var(&t, 0, 1) * &var(&t, 1, 1);
        let expected = &(&var(&t, 1, 2) * &var(&t, 1, 1)) - &(&var(&t, 0, 1) * &var(&t, 0, 2));
        assert_eq!(d.apply(&p), normal_form(&expected, &t));
        assert!(d.apply(&Polynomial::one(t.n())).is_zero());
    }

    #[test]
    fn degree_of_witness_in_xyz_basis() {
        let t = quadric();
        let fg = fine_grading(&t).unwrap();
        let d = quadric_witness(&t);
        let DerivationDegree::Homogeneous(e) = d.degree(&fg).unwrap() else {
            panic!("witness should be homogeneous");
        };
        // deg T12 - deg T01 in any basis.
        let expected = fg
            .group()
            .sub(fg.degree_of(Var::new(1, 2)), fg.degree_of(Var::new(0, 1)))
            .unwrap();
        assert_eq!(e, expected);
        let eg = crate::ring::ExplicitGrading::new(
            &fg,
            [[1, 0, 1], [-1, 0, 1], [0, 1, 1], [0, -1, 1], [0, 0, 1]]
                .iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
        .unwrap();
        assert_eq!(eg.coordinates(&e), vec![BigInt::from(-1), BigInt::from(-1), BigInt::from(0)]);
    }

    #[test]
    fn euler_degree_zero_and_not_nilpotent() {
        let t = quadric();
        let fg = fine_grading(&t).unwrap();
        let d = euler(&t);
        assert_eq!(
            d.degree(&fg).unwrap(),
            DerivationDegree::Homogeneous(fg.group().zero())
        );
        assert_eq!(d.bounded_nilpotency(10), Nilpotency::UnknownAtCap);
    }

    #[test]
    fn swap_is_not_homogeneous() {
        let t = quadric();
        let fg = fine_grading(&t).unwrap();
        let d = Derivation::from_assignments(
            &t,
            [(Var::new(0, 1), var(&t, 0, 2)), (Var::new(0, 2), var(&t, 0, 1))],
        );
        assert_eq!(d.degree(&fg).unwrap(), DerivationDegree::NotHomogeneous);
        // Only the block-0 image is nonzero: T01^2 + T02^2.
        assert!(d.block_image_proportionality());
    }

    #[test]
    fn zero_derivation() {
        let t = quadric();
        let fg = fine_grading(&t).unwrap();
        let d = Derivation::zero(&t);
        assert_eq!(d.bounded_nilpotency(1), Nilpotency::Nilpotent(1));
        assert_eq!(d.degree(&fg), Err(DerivationError::ZeroDerivation));
        assert!(d.non_kernel_variables().is_empty());
        assert!(d.block_image_proportionality());
    }

    #[test]
    fn witness_nilpotency_and_kernel() {
        let t = quadric();
        let d = quadric_witness(&t);
        assert_eq!(d.bounded_nilpotency(DEFAULT_NILPOTENCY_CAP), Nilpotency::Nilpotent(2));
        assert_eq!(
            d.non_kernel_variables(),
            BTreeSet::from([Var::new(0, 1), Var::new(1, 1)])
        );
        assert!(d.block_image_proportionality());
        assert!(!d.is_in_kernel(&var(&t, 0, 1)));
        assert!(d.is_in_kernel(&Polynomial::one(t.n())));
    }

    #[test]
    fn length_is_checked() {
        let t = quadric();
        assert!(matches!(
            Derivation::new(&t, vec![]),
            Err(DerivationError::LengthMismatch { expected: 5, actual: 0 })
        ));
    }
}

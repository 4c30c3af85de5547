use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use thiserror::Error;

use super::poly::{Monomial, Polynomial};
use super::trinomial::{TrinomialData, Var};
use crate::abelian::{
    quotient_group, smith_normal_form, AbelianError, GradingGroup, GroupElement, IntegerMatrix,
    SmithDecomposition,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GradingError {
    #[error(transparent)]
    Abelian(#[from] AbelianError),
    #[error("expected {expected} degree vectors, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("degree vectors must all have dimension {expected}; {var} has {actual}")]
    DimensionMismatch {
        var: Var,
        expected: usize,
        actual: usize,
    },
    #[error("the assignment does not make g homogeneous")]
    NotACoarsening,
    #[error("the grading group has torsion and cannot be given integer coordinates")]
    Torsion,
    #[error("the assignment identifies distinct degrees (relation lattice strictly larger than Im L*)")]
    NotFaithful,
}

/// The fine grading of `R(g)` by `K = Z^n / Im L^*`.
#[derive(Debug, Clone)]
pub struct FineGrading {
    trinomial: TrinomialData,
    group: GradingGroup,
    generator_degrees: Vec<GroupElement>,
    g_degree: GroupElement,
}

/// Degree of a polynomial with respect to the fine grading.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Homogeneity {
    /// The zero polynomial, homogeneous of every degree.
    Zero,
    Homogeneous(GroupElement),
    NotHomogeneous,
}

impl Homogeneity {
    pub fn degree(&self) -> Option<&GroupElement> {
        match self {
            Homogeneity::Homogeneous(e) => Some(e),
            _ => None,
        }
    }
}

pub fn fine_grading(t: &TrinomialData) -> Result<FineGrading, GradingError> {
    let group = quotient_group(&t.presentation())?;
    let n = t.n();
    let generator_degrees = (0..n)
        .map(|k| {
            let mut e = vec![BigInt::zero(); n];
            e[k] = BigInt::from(1);
            group.project(&e)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let g_degree = group.project(
        &t.block_exponent_vector(0)
            .into_iter()
            .map(BigInt::from)
            .collect::<Vec<_>>(),
    )?;
    Ok(FineGrading {
        trinomial: t.clone(),
        group,
        generator_degrees,
        g_degree,
    })
}

impl FineGrading {
    pub fn trinomial(&self) -> &TrinomialData {
        &self.trinomial
    }

    pub fn group(&self) -> &GradingGroup {
        &self.group
    }

    pub fn generator_degrees(&self) -> &[GroupElement] {
        &self.generator_degrees
    }

    pub fn degree_of(&self, v: Var) -> &GroupElement {
        &self.generator_degrees[self.trinomial.flat(v)]
    }

    pub fn g_degree(&self) -> &GroupElement {
        &self.g_degree
    }

    /// `sum_j l_ij deg T_ij` for block `i`.
    pub fn block_degree(&self, block: usize) -> GroupElement {
        self.monomial_degree(&Monomial::from_exponents(
            self.trinomial.block_exponent_vector(block),
        ))
    }

    pub fn monomial_degree(&self, m: &Monomial) -> GroupElement {
        let v: Vec<BigInt> = m.exponents().iter().map(|&e| BigInt::from(e)).collect();
        self.group.project(&v).expect("monomial has ambient length")
    }

    pub fn homogeneous_degree(&self, p: &Polynomial) -> Homogeneity {
        let mut degrees = p.terms().map(|(m, _)| self.monomial_degree(m));
        let Some(first) = degrees.next() else {
            return Homogeneity::Zero;
        };
        if degrees.all(|d| d == first) {
            Homogeneity::Homogeneous(first)
        } else {
            Homogeneity::NotHomogeneous
        }
    }

    /// Checks that `assigned` (one vector per generator, in a group
    /// `Z/m_1 + ... + Z/m_k` with `m = 0` meaning `Z`) kills every relation
    /// in `Im L^*`, i.e. factors through the fine grading.
    pub fn validate_coarsening(
        &self,
        assigned: &[Vec<BigInt>],
        moduli: &[BigInt],
    ) -> Result<bool, GradingError> {
        let t = &self.trinomial;
        if assigned.len() != t.n() {
            return Err(GradingError::LengthMismatch {
                expected: t.n(),
                actual: assigned.len(),
            });
        }
        for (k, a) in assigned.iter().enumerate() {
            if a.len() != moduli.len() {
                return Err(GradingError::DimensionMismatch {
                    var: t.var(k),
                    expected: moduli.len(),
                    actual: a.len(),
                });
            }
        }
        let lstar = t.presentation();
        for col in 0..lstar.cols() {
            let relation = lstar.column(col);
            for (coord, modulus) in moduli.iter().enumerate() {
                let image: BigInt = relation
                    .iter()
                    .zip(assigned)
                    .map(|(r, a)| r * &a[coord])
                    .sum();
                let vanishes = if modulus.is_zero() {
                    image.is_zero()
                } else {
                    image.is_multiple_of(modulus)
                };
                if !vanishes {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// A user-supplied integer basis for a torsion-free `K`: one vector per
/// generator whose relation lattice is exactly `Im L^*`.
#[derive(Debug, Clone)]
pub struct ExplicitGrading {
    dimension: usize,
    vectors: Vec<Vec<BigInt>>,
    /// Matrix of the induced injection `K -> Z^dimension` on canonical coordinates.
    embedding: IntegerMatrix,
    embedding_snf: SmithDecomposition,
}

impl ExplicitGrading {
    pub fn new(fg: &FineGrading, vectors: Vec<Vec<BigInt>>) -> Result<Self, GradingError> {
        let n = fg.trinomial.n();
        if vectors.len() != n {
            return Err(GradingError::LengthMismatch {
                expected: n,
                actual: vectors.len(),
            });
        }
        let dimension = vectors[0].len();
        let moduli = vec![BigInt::zero(); dimension];
        if !fg.validate_coarsening(&vectors, &moduli)? {
            return Err(GradingError::NotACoarsening);
        }
        let group = fg.group();
        if !group.torsion_invariants().is_empty() {
            return Err(GradingError::Torsion);
        }
        let r = group.free_rank();
        let mut embedding = IntegerMatrix::zeros(dimension.max(1), r.max(1));
        for k in 0..r {
            let mut free = vec![BigInt::zero(); r];
            free[k] = BigInt::from(1);
            let e = group.element(free, vec![])?;
            let lifted = group.lift(&e)?;
            for coord in 0..dimension {
                let value: BigInt = lifted
                    .iter()
                    .zip(&vectors)
                    .map(|(x, vec)| x * &vec[coord])
                    .sum();
                embedding.set(coord, k, value);
            }
        }
        let embedding_snf = smith_normal_form(&embedding);
        if r > 0 && (dimension < r || embedding_snf.rank() < r) {
            return Err(GradingError::NotFaithful);
        }
        Ok(Self {
            dimension,
            vectors,
            embedding,
            embedding_snf,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn vectors(&self) -> &[Vec<BigInt>] {
        &self.vectors
    }

    /// Coordinates of `e` in this basis.
    pub fn coordinates(&self, e: &GroupElement) -> Vec<BigInt> {
        if e.free.is_empty() {
            return vec![BigInt::zero(); self.dimension];
        }
        self.embedding.mul_vec(&e.free)[..self.dimension].to_vec()
    }

    /// The element with the given coordinates, or `None` if the point is not
    /// in the image of `K`.
    pub fn element(
        &self,
        group: &GradingGroup,
        coords: &[BigInt],
    ) -> Result<Option<GroupElement>, GradingError> {
        if coords.len() != self.dimension {
            return Err(GradingError::Abelian(AbelianError::LengthMismatch {
                expected: self.dimension,
                actual: coords.len(),
            }));
        }
        let r = group.free_rank();
        if r == 0 {
            return Ok(coords.iter().all(Zero::is_zero).then(|| group.zero()));
        }
        let snf = &self.embedding_snf;
        let y = snf.u.mul_vec(coords);
        let mut z = Vec::with_capacity(r);
        for (k, yk) in y.iter().enumerate() {
            if k < r {
                let d = &snf.diag[k];
                if !yk.is_multiple_of(d) {
                    return Ok(None);
                }
                z.push(yk / d);
            } else if !yk.is_zero() {
                return Ok(None);
            }
        }
        let x = snf.v.mul_vec(&z);
        Ok(Some(group.element(x, vec![])?))
    }
}

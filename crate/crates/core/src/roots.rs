//! Roots of the fine grading: degrees of homogeneous locally nilpotent
//! derivations.
//!
//! Every root lies in a basic set `E(T_a, T_b) = deg g - deg T_a - deg T_b +
//! cone(deg T_ij : T_ij != T_a, T_b)` for a pair of variables in distinct blocks
//! with one of the two exponents equal to 1. Membership is decided by a
//! bounded search over the ambient lattice, using a functional that is
//! strictly positive on every generator degree.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::abelian::{AbelianError, GradingGroup, GroupElement};
use crate::derivation::{
    elementary_classes, Derivation, DerivationError, ElementarySpec, ElementaryType,
    KernelMultiplier,
};
use crate::ring::{fine_grading, ExplicitGrading, FineGrading, GradingError, TrinomialData, Var};

/// Upper bound on the number of basic sets containing a single root.
pub const MAX_CONTAINING_SETS: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RootsError {
    #[error(transparent)]
    Abelian(#[from] AbelianError),
    #[error(transparent)]
    Grading(#[from] GradingError),
    #[error(transparent)]
    Derivation(#[from] DerivationError),
    #[error("{count} basic sets contain {element}, more than three")]
    TooManyBasicSets { element: GroupElement, count: usize },
    #[error("search budget does not fit in 64 bits")]
    SearchBudgetOverflow,
    #[error("the exponent vector is not a witness for this degree and basic set")]
    InvalidWitness,
    #[error("the box is empty")]
    EmptyBox,
    #[error("expected {expected} box intervals, got {actual}")]
    BoxDimension { expected: usize, actual: usize },
}

pub type Result<T> = std::result::Result<T, RootsError>;

/// A homomorphism `psi: K -> Z` with `psi(deg T_ij) = w_ij > 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositiveFunctional {
    weights: Vec<u64>,
    block_value: u64,
}

impl PositiveFunctional {
    /// `w_ij = prod_{k != i} A_k` with `A_k = sum_j l_kj`.
    pub fn new(t: &TrinomialData) -> Self {
        let a: Vec<u64> = (0..3).map(|i| t.block_degree(i)).collect();
        let weights = t
            .vars()
            .map(|v| (0..3).filter(|&k| k != v.block).map(|k| a[k]).product())
            .collect();
        Self {
            weights,
            block_value: a.iter().product(),
        }
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn weight(&self, t: &TrinomialData, v: Var) -> u64 {
        self.weights[t.flat(v)]
    }

    /// `W = sum_j l_ij w_ij`, equal for all three blocks and to `psi(deg g)`.
    pub fn block_value(&self) -> u64 {
        self.block_value
    }

    pub fn evaluate(&self, group: &GradingGroup, e: &GroupElement) -> Result<BigInt> {
        let lifted = group.lift(e)?;
        Ok(lifted
            .iter()
            .zip(&self.weights)
            .map(|(x, &w)| x * BigInt::from(w))
            .sum())
    }
}

pub fn positive_functional(t: &TrinomialData) -> PositiveFunctional {
    PositiveFunctional::new(t)
}

/// `E(T_a, T_b)` with `a` before `b` in variable order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasicSet {
    pub pair: (Var, Var),
    pub offset: GroupElement,
    pub generators: Vec<Var>,
}

impl BasicSet {
    /// Block containing neither variable of the pair.
    pub fn free_block(&self) -> usize {
        3 - self.pair.0.block - self.pair.1.block
    }

    pub fn label(&self) -> String {
        format!("E({},{})", self.pair.0, self.pair.1)
    }
}

pub fn basic_sets(fg: &FineGrading) -> Vec<BasicSet> {
    let t = fg.trinomial();
    let group = fg.group();
    let vars: Vec<Var> = t.vars().collect();
    let mut out = Vec::new();
    for (k, &a) in vars.iter().enumerate() {
        for &b in &vars[k + 1..] {
            if a.block == b.block || t.exponent(a).min(t.exponent(b)) != 1 {
                continue;
            }
            let offset = group
                .sub(&group.sub(fg.g_degree(), fg.degree_of(a)).expect("same group"), fg.degree_of(b))
                .expect("same group");
            out.push(BasicSet {
                pair: (a, b),
                offset,
                generators: vars.iter().copied().filter(|&v| v != a && v != b).collect(),
            });
        }
    }
    out
}

/// Exponents `u_ij >= 0`, one per variable of the trinomial.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub exponents: Vec<u32>,
}

/// Depth-first search for `target = sum u_k * degrees[k]` with
/// `sum u_k * weights[k] = psi(target)`.
struct Search<'a> {
    group: &'a GradingGroup,
    degrees: Vec<&'a GroupElement>,
    weights: Vec<u64>,
    target: &'a GroupElement,
}

impl Search<'_> {
    fn run(&self, budget: u64) -> Option<Vec<u32>> {
        let mut order: Vec<usize> = (0..self.weights.len()).collect();
        order.sort_by(|&x, &y| self.weights[y].cmp(&self.weights[x]));
        let mut u = vec![0u32; self.weights.len()];
        let zero = self.group.zero();
        self.descend(&order, 0, budget, &zero, &mut u).then_some(u)
    }

    fn descend(
        &self,
        order: &[usize],
        depth: usize,
        remaining: u64,
        acc: &GroupElement,
        u: &mut [u32],
    ) -> bool {
        if depth == order.len() {
            return remaining == 0 && acc == self.target;
        }
        let k = order[depth];
        let w = self.weights[k];
        let max = remaining / w;
        if depth + 1 == order.len() {
            if !remaining.is_multiple_of(w) {
                return false;
            }
            let last = self
                .group
                .add(acc, &self.group.scale(self.degrees[k], &BigInt::from(max)).expect("same group"))
                .expect("same group");
            if &last == self.target {
                u[k] = u32::try_from(max).expect("bounded by budget");
                return true;
            }
            return false;
        }
        let mut current = acc.clone();
        for count in 0..=max {
            if count > 0 {
                current = self.group.add(&current, self.degrees[k]).expect("same group");
            }
            u[k] = count as u32;
            if self.descend(order, depth + 1, remaining - count * w, &current, u) {
                return true;
            }
        }
        u[k] = 0;
        false
    }
}

/// Answer of a root query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootQuery {
    pub element: GroupElement,
    /// Indices into `RootContext::basic_sets` with one witness each.
    pub containing_sets: Vec<(usize, Witness)>,
    pub type_one: bool,
}

impl RootQuery {
    pub fn is_root(&self) -> bool {
        !self.containing_sets.is_empty()
    }
}

/// Coordinates for box enumeration.
#[derive(Debug, Clone, Copy)]
pub enum BoxCoordinates<'a> {
    /// Free Smith coordinates, with every torsion residue combination.
    Canonical,
    Explicit(&'a ExplicitGrading),
}

/// Fine grading, functional, and basic sets of one trinomial.
#[derive(Debug, Clone)]
pub struct RootContext {
    fg: FineGrading,
    pf: PositiveFunctional,
    sets: Vec<BasicSet>,
}

impl RootContext {
    pub fn new(t: &TrinomialData) -> Result<Self> {
        Ok(Self::from_grading(fine_grading(t)?))
    }

    pub fn from_grading(fg: FineGrading) -> Self {
        let pf = PositiveFunctional::new(fg.trinomial());
        let sets = basic_sets(&fg);
        Self { fg, pf, sets }
    }

    pub fn grading(&self) -> &FineGrading {
        &self.fg
    }

    pub fn trinomial(&self) -> &TrinomialData {
        self.fg.trinomial()
    }

    pub fn functional(&self) -> &PositiveFunctional {
        &self.pf
    }

    pub fn basic_sets(&self) -> &[BasicSet] {
        &self.sets
    }

    fn check(&self, e: &GroupElement) -> Result<()> {
        if self.fg.group().contains(e) {
            Ok(())
        } else {
            Err(AbelianError::GroupMismatch.into())
        }
    }

    /// Searches `target = sum u_k deg(vars[k]) + extra_count * extra_degree`.
    /// Returns `None` when `psi(target) < 0` or the search is exhausted.
    fn combination(
        &self,
        target: &GroupElement,
        vars: &[Var],
        extra: Option<(&GroupElement, u64)>,
    ) -> Result<Option<Vec<u32>>> {
        let budget = self.pf.evaluate(self.fg.group(), target)?;
        if budget.is_negative() {
            return Ok(None);
        }
        let budget = budget.to_u64().ok_or(RootsError::SearchBudgetOverflow)?;
        let t = self.trinomial();
        let mut degrees: Vec<&GroupElement> = vars.iter().map(|&v| self.fg.degree_of(v)).collect();
        let mut weights: Vec<u64> = vars.iter().map(|&v| self.pf.weight(t, v)).collect();
        if let Some((deg, w)) = extra {
            degrees.push(deg);
            weights.push(w);
        }
        if weights.is_empty() {
            return Ok((budget == 0 && self.fg.group().is_zero(target)).then(Vec::new));
        }
        let search = Search {
            group: self.fg.group(),
            degrees,
            weights,
            target,
        };
        Ok(search.run(budget))
    }

    fn spread(&self, vars: &[Var], u: &[u32]) -> Vec<u32> {
        let t = self.trinomial();
        let mut exponents = vec![0; t.n()];
        for (&v, &k) in vars.iter().zip(u) {
            exponents[t.flat(v)] = k;
        }
        exponents
    }

    pub fn membership(&self, e: &GroupElement, set: &BasicSet) -> Result<Option<Witness>> {
        self.check(e)?;
        let target = self.fg.group().sub(e, &set.offset)?;
        Ok(self
            .combination(&target, &set.generators, None)?
            .map(|u| Witness {
                exponents: self.spread(&set.generators, &u),
            }))
    }

    pub fn is_root(&self, e: &GroupElement) -> Result<RootQuery> {
        self.check(e)?;
        let mut containing_sets = Vec::new();
        for (k, set) in self.sets.iter().enumerate() {
            if let Some(w) = self.membership(e, set)? {
                containing_sets.push((k, w));
            }
        }
        if containing_sets.len() > MAX_CONTAINING_SETS {
            return Err(RootsError::TooManyBasicSets {
                element: e.clone(),
                count: containing_sets.len(),
            });
        }
        let type_one = !containing_sets.is_empty() && self.is_type_one_degree(e)?;
        Ok(RootQuery {
            element: e.clone(),
            containing_sets,
            type_one,
        })
    }

    /// Whether `e = 2 deg g - sum_i deg T_{i c_i} + deg T^u + m deg g` for an
    /// admissible Type I `C`, with `u` supported off `C`.
    pub fn is_type_one_degree(&self, e: &GroupElement) -> Result<bool> {
        self.check(e)?;
        let group = self.fg.group();
        let t = self.trinomial();
        let g = self.fg.g_degree();
        let two_g = group.scale(g, &BigInt::from(2))?;
        for class in elementary_classes(t) {
            if class.kind != ElementaryType::I {
                continue;
            }
            let c_vars: Vec<Var> = (0..3).map(|i| Var::new(i, class.c[i])).collect();
            let mut target = group.sub(e, &two_g)?;
            for v in &c_vars {
                target = group.add(&target, self.fg.degree_of(*v))?;
            }
            let kernel: Vec<Var> = t.vars().filter(|v| !c_vars.contains(v)).collect();
            if self
                .combination(&target, &kernel, Some((g, self.pf.block_value())))?
                .is_some()
            {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Type II derivation `T^u * delta_{C,beta}` of degree `e` with
    /// non-kernel variables `set.pair`.
    pub fn witness_derivation(
        &self,
        e: &GroupElement,
        set: &BasicSet,
        witness: &Witness,
    ) -> Result<Derivation> {
        self.check(e)?;
        let t = self.trinomial();
        let group = self.fg.group();
        let (a, b) = set.pair;
        if witness.exponents.len() != t.n()
            || witness.exponents[t.flat(a)] != 0
            || witness.exponents[t.flat(b)] != 0
        {
            return Err(RootsError::InvalidWitness);
        }
        let mut reached = set.offset.clone();
        for v in t.vars() {
            let k = witness.exponents[t.flat(v)];
            reached = group.add(&reached, &group.scale(self.fg.degree_of(v), &BigInt::from(k))?)?;
        }
        if &reached != e {
            return Err(RootsError::InvalidWitness);
        }
        let i0 = set.free_block();
        let mut c = [1; 3];
        c[a.block] = a.index;
        c[b.block] = b.index;
        let mut beta = [BigRational::zero(), BigRational::zero(), BigRational::zero()];
        beta[a.block] = BigRational::one();
        beta[b.block] = -BigRational::one();
        debug_assert!(beta[i0].is_zero());
        let multiplier = KernelMultiplier {
            exponents: witness.exponents.clone(),
            m: 0,
            alpha: BigRational::one(),
        };
        Ok(ElementarySpec::new(t, c, beta, multiplier)?.derivation(t))
    }

    /// Whether `w` lies in the weight monoid.
    pub fn monoid_membership(&self, w: &GroupElement) -> Result<bool> {
        self.check(w)?;
        let vars: Vec<Var> = self.trinomial().vars().collect();
        Ok(self.combination(w, &vars, None)?.is_some())
    }

    /// Roots in the box, in lexicographic coordinate order (torsion residues
    /// vary fastest).
    pub fn enumerate_roots_in_box(
        &self,
        bounds: &[(i64, i64)],
        coords: BoxCoordinates<'_>,
    ) -> Result<Vec<RootQuery>> {
        let group = self.fg.group();
        let expected = match coords {
            BoxCoordinates::Canonical => group.free_rank(),
            BoxCoordinates::Explicit(eg) => eg.dimension(),
        };
        if bounds.len() != expected {
            return Err(RootsError::BoxDimension {
                expected,
                actual: bounds.len(),
            });
        }
        if bounds.iter().any(|(lo, hi)| lo > hi) {
            return Err(RootsError::EmptyBox);
        }
        let torsion: Vec<i64> = group
            .torsion_invariants()
            .iter()
            .map(|d| d.to_i64().expect("small torsion"))
            .collect();
        let mut out = Vec::new();
        for point in lattice_box(bounds) {
            let point: Vec<BigInt> = point.into_iter().map(BigInt::from).collect();
            let residues: Vec<(i64, i64)> = torsion.iter().map(|&d| (0, d - 1)).collect();
            for residue in lattice_box(&residues) {
                let e = match coords {
                    BoxCoordinates::Canonical => Some(group.element(
                        point.clone(),
                        residue.into_iter().map(BigInt::from).collect(),
                    )?),
                    BoxCoordinates::Explicit(eg) => eg.element(group, &point)?,
                };
                let Some(e) = e else { continue };
                let query = self.is_root(&e)?;
                if query.is_root() {
                    out.push(query);
                }
            }
        }
        Ok(out)
    }
}

/// All integer points of a product of closed intervals, lexicographically.
pub fn lattice_box(bounds: &[(i64, i64)]) -> Vec<Vec<i64>> {
    let mut points = vec![Vec::with_capacity(bounds.len())];
    for &(lo, hi) in bounds {
        points = points
            .into_iter()
            .flat_map(|p| {
                (lo..=hi).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    points
}

//! Brute-force checks by linear algebra on homogeneous components.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::abelian::{AbelianError, GroupElement};
use crate::derivation::{is_elementary, Derivation, DerivationDegree, Nilpotency, Recognition};
use crate::ring::{normal_form, Monomial, Polynomial, Var};
use crate::roots::{lattice_box, RootContext, RootsError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("cap {cap} is below the total degree {needed} of g")]
    CapTooSmall { cap: u64, needed: u64 },
    #[error(transparent)]
    Roots(#[from] RootsError),
    #[error(transparent)]
    Abelian(#[from] AbelianError),
}

pub type Result<T> = std::result::Result<T, OracleError>;

/// Reduced monomials of one degree up to a total-degree cap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentBasis {
    pub degree: GroupElement,
    pub cap: u64,
    pub monomials: Vec<Monomial>,
}

/// All monomials `T^u` in normal form with `deg T^u = w` and `|u| <= cap`.
pub fn component_basis(ctx: &RootContext, w: &GroupElement, cap: u64) -> Result<ComponentBasis> {
    let fg = ctx.grading();
    let group = fg.group();
    if !group.contains(w) {
        return Err(AbelianError::GroupMismatch.into());
    }
    let t = ctx.trinomial();
    let budget = ctx.functional().evaluate(group, w)?;
    let mut monomials = Vec::new();
    if !budget.is_negative() {
        let budget = budget.to_u64().ok_or(RootsError::SearchBudgetOverflow)?;
        let weights = ctx.functional().weights();
        let mut u = vec![0u32; t.n()];
        enumerate(weights, 0, budget, cap, &mut u, &mut |u| {
            let m = Monomial::from_exponents(u.to_vec());
            if &fg.monomial_degree(&m) == w && is_reduced(ctx, &m) {
                monomials.push(m);
            }
        });
    }
    monomials.sort();
    Ok(ComponentBasis {
        degree: w.clone(),
        cap,
        monomials,
    })
}

fn is_reduced(ctx: &RootContext, m: &Monomial) -> bool {
    let t = ctx.trinomial();
    t.block_vars(0).any(|v| m.exponents()[t.flat(v)] < t.exponent(v))
}

fn enumerate(
    weights: &[u64],
    k: usize,
    remaining: u64,
    cap: u64,
    u: &mut [u32],
    visit: &mut dyn FnMut(&[u32]),
) {
    if k == weights.len() {
        if remaining == 0 {
            visit(u);
        }
        return;
    }
    let max = (remaining / weights[k]).min(cap);
    for count in 0..=max {
        u[k] = count as u32;
        enumerate(weights, k + 1, remaining - count * weights[k], cap - count, u, visit);
    }
    u[k] = 0;
}

/// All homogeneous derivations of one degree with images of total degree at
/// most `cap`.
#[derive(Debug, Clone)]
pub struct DerivationSpace {
    pub degree: GroupElement,
    pub cap: u64,
    /// Unknowns: the image of a variable has a coefficient per basis monomial.
    pub unknowns: Vec<(Var, Monomial)>,
    pub basis: Vec<Derivation>,
}

impl DerivationSpace {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    fn coefficients(&self, d: &Derivation) -> Option<Vec<BigRational>> {
        let t = d.trinomial();
        let mut out = vec![BigRational::zero(); self.unknowns.len()];
        let index: BTreeMap<(Var, &Monomial), usize> = self
            .unknowns
            .iter()
            .enumerate()
            .map(|(k, (v, m))| ((*v, m), k))
            .collect();
        for v in t.vars() {
            for (m, c) in d.image(v).terms() {
                out[*index.get(&(v, m))?] = c.clone();
            }
        }
        Some(out)
    }

    /// Whether `d` lies in the span of the basis.
    pub fn contains(&self, d: &Derivation) -> bool {
        let Some(target) = self.coefficients(d) else {
            return false;
        };
        let mut rows: Vec<Vec<BigInt>> = self
            .basis
            .iter()
            .map(|b| integer_row(&self.coefficients(b).expect("basis element")))
            .collect();
        let before = rank(rows.clone());
        rows.push(integer_row(&target));
        rank(rows) == before
    }
}

fn integer_row(v: &[BigRational]) -> Vec<BigInt> {
    let denom = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    v.iter().map(|x| (x * BigRational::from(denom.clone())).to_integer()).collect()
}

fn primitive(row: &mut [BigInt]) {
    let g = row.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in row.iter_mut() {
            *x /= &g;
        }
    }
}

/// Fraction-free reduced row echelon form; returns pivot columns.
fn echelon(rows: &mut [Vec<BigInt>]) -> Vec<usize> {
    let cols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        for i in 0..rows.len() {
            if i == r || rows[i][c].is_zero() {
                continue;
            }
            let a = rows[r][c].clone();
            let b = rows[i][c].clone();
            let pivot_row = rows[r].clone();
            for (x, y) in rows[i].iter_mut().zip(&pivot_row) {
                *x = &*x * &a - y * &b;
            }
            primitive(&mut rows[i]);
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    pivots
}

fn rank(mut rows: Vec<Vec<BigInt>>) -> usize {
    echelon(&mut rows).len()
}

/// Integer basis of the null space of the matrix with the given rows.
fn null_space(mut rows: Vec<Vec<BigInt>>, cols: usize) -> Vec<Vec<BigInt>> {
    let pivots = echelon(&mut rows);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![BigRational::zero(); cols];
            x[f] = BigRational::one();
            for (r, &p) in pivots.iter().enumerate() {
                x[p] = -BigRational::new(rows[r][f].clone(), rows[r][p].clone());
            }
            let mut row = integer_row(&x);
            primitive(&mut row);
            row
        })
        .collect()
}

pub fn derivation_space(ctx: &RootContext, e: &GroupElement, cap: u64) -> Result<DerivationSpace> {
    let t = ctx.trinomial();
    let needed = t.total_degree();
    if cap < needed {
        return Err(OracleError::CapTooSmall { cap, needed });
    }
    let fg = ctx.grading();
    let group = fg.group();
    let g = Polynomial::trinomial(t);

    let mut unknowns = Vec::new();
    for v in t.vars() {
        let w = group.add(fg.degree_of(v), e)?;
        for m in component_basis(ctx, &w, cap)?.monomials {
            unknowns.push((v, m));
        }
    }

    let mut columns: Vec<Polynomial> = Vec::with_capacity(unknowns.len());
    let mut row_index: BTreeMap<Monomial, usize> = BTreeMap::new();
    for (v, m) in &unknowns {
        let image = normal_form(&g.partial_derivative(t.flat(*v)).mul_monomial(m), t);
        for (mono, _) in image.terms() {
            let next = row_index.len();
            row_index.entry(mono.clone()).or_insert(next);
        }
        columns.push(image);
    }
    let mut rows = vec![vec![BigInt::zero(); unknowns.len()]; row_index.len()];
    for (k, col) in columns.iter().enumerate() {
        for (mono, c) in col.terms() {
            debug_assert!(c.is_integer());
            rows[row_index[mono]][k] = c.to_integer();
        }
    }

    let kernel = if rows.is_empty() {
        (0..unknowns.len())
            .map(|k| {
                let mut x = vec![BigInt::zero(); unknowns.len()];
                x[k] = BigInt::one();
                x
            })
            .collect()
    } else {
        null_space(rows, unknowns.len())
    };
    let basis = kernel
        .iter()
        .map(|x| build(ctx, &unknowns, x.iter().map(|c| BigRational::from(c.clone()))))
        .collect();
    Ok(DerivationSpace {
        degree: e.clone(),
        cap,
        unknowns,
        basis,
    })
}

fn build(
    ctx: &RootContext,
    unknowns: &[(Var, Monomial)],
    coeffs: impl Iterator<Item = BigRational>,
) -> Derivation {
    let t = ctx.trinomial();
    let mut images = vec![Polynomial::zero(t.n()); t.n()];
    for ((v, m), c) in unknowns.iter().zip(coeffs) {
        images[t.flat(*v)].add_term(m.clone(), c);
    }
    Derivation::new(t, images).expect("one image per variable")
}

/// Degrees `e` of the canonical box `[-coord_bound, coord_bound]^r` (all
/// torsion residues) with `|psi(e)| <= radius`.
pub fn psi_window(ctx: &RootContext, radius: u64, coord_bound: i64) -> Result<Vec<GroupElement>> {
    let group = ctx.grading().group();
    let free = vec![(-coord_bound, coord_bound); group.free_rank()];
    let torsion: Vec<(i64, i64)> = group
        .torsion_invariants()
        .iter()
        .map(|d| (0, d.to_i64().expect("small torsion") - 1))
        .collect();
    let radius = BigInt::from(radius);
    let mut out = Vec::new();
    for f in lattice_box(&free) {
        for r in lattice_box(&torsion) {
            let e = group.element(
                f.iter().map(|&x| BigInt::from(x)).collect(),
                r.iter().map(|&x| BigInt::from(x)).collect(),
            )?;
            if ctx.functional().evaluate(group, &e)?.abs() <= radius {
                out.push(e);
            }
        }
    }
    Ok(out)
}

/// Settings of a theorem check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OracleSettings {
    pub cap: u64,
    pub nilpotency_cap: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for OracleSettings {
    fn default() -> Self {
        Self {
            cap: 6,
            nilpotency_cap: crate::derivation::DEFAULT_NILPOTENCY_CAP,
            samples: 20,
            seed: 0,
        }
    }
}

/// Images of one derivation, as `(variable, polynomial)` strings.
pub type ImageList = Vec<(String, String)>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeReport {
    pub degree: String,
    pub dimension: usize,
    pub candidates: usize,
    pub nilpotent: usize,
    pub elementary: usize,
    pub is_root: bool,
    /// Nilpotent derivations whose degree is not a root.
    pub root_mismatch: bool,
    pub counterexamples: Vec<ImageList>,
    pub needs_scalar_extension: Vec<ImageList>,
    pub unknown_at_cap: Vec<ImageList>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub trinomial: String,
    pub settings: OracleSettings,
    pub degrees: Vec<DegreeReport>,
    pub counterexamples: usize,
    pub needs_scalar_extension: usize,
    pub unknown_at_cap: usize,
    pub root_mismatches: usize,
    /// Root degrees whose space has no nilpotent candidate.
    pub roots_without_nilpotent: usize,
    pub passed: bool,
}

fn images(d: &Derivation) -> ImageList {
    d.display_images()
        .into_iter()
        .map(|(v, p)| (v.to_string(), p))
        .collect()
}

/// Checks that every nilpotent derivation found in the given degrees is
/// elementary and has a root as its degree.
pub fn verify_theorem(
    ctx: &RootContext,
    degrees: &[GroupElement],
    settings: OracleSettings,
) -> Result<Report> {
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let mut sorted = degrees.to_vec();
    sorted.sort();
    sorted.dedup();
    let mut reports = Vec::with_capacity(sorted.len());
    for e in &sorted {
        let space = derivation_space(ctx, e, settings.cap)?;
        let is_root = ctx.is_root(e)?.is_root();
        let mut candidates: Vec<Derivation> = space.basis.clone();
        if !space.basis.is_empty() {
            for _ in 0..settings.samples {
                let mut d = Derivation::zero(ctx.trinomial());
                for b in &space.basis {
                    let c: i64 = rng.gen_range(-3..=3);
                    d = d.add_scaled(b, &BigRational::from_integer(c.into()));
                }
                candidates.push(d);
            }
        }
        let mut report = DegreeReport {
            degree: e.to_string(),
            dimension: space.dimension(),
            candidates: 0,
            nilpotent: 0,
            elementary: 0,
            is_root,
            root_mismatch: false,
            counterexamples: Vec::new(),
            needs_scalar_extension: Vec::new(),
            unknown_at_cap: Vec::new(),
        };
        for d in candidates.iter().filter(|d| !d.is_zero()) {
            report.candidates += 1;
            debug_assert!(matches!(
                d.degree(ctx.grading()),
                Ok(DerivationDegree::Homogeneous(_))
            ));
            match d.bounded_nilpotency(settings.nilpotency_cap) {
                Nilpotency::UnknownAtCap => report.unknown_at_cap.push(images(d)),
                Nilpotency::Nilpotent(_) => {
                    report.nilpotent += 1;
                    if !is_root {
                        report.root_mismatch = true;
                    }
                    match is_elementary(d) {
                        Recognition::Zero | Recognition::Elementary(_) => report.elementary += 1,
                        Recognition::NotElementary(reason) if reason.needs_scalar_extension() => {
                            report.needs_scalar_extension.push(images(d))
                        }
                        Recognition::NotElementary(_) => report.counterexamples.push(images(d)),
                    }
                }
            }
        }
        reports.push(report);
    }
    let counterexamples = reports.iter().map(|r| r.counterexamples.len()).sum();
    let root_mismatches = reports.iter().filter(|r| r.root_mismatch).count();
    Ok(Report {
        trinomial: ctx.trinomial().to_string(),
        settings,
        counterexamples,
        needs_scalar_extension: reports.iter().map(|r| r.needs_scalar_extension.len()).sum(),
        unknown_at_cap: reports.iter().map(|r| r.unknown_at_cap.len()).sum(),
        root_mismatches,
        roots_without_nilpotent: reports.iter().filter(|r| r.is_root && r.nilpotent == 0).count(),
        passed: counterexamples == 0 && root_mismatches == 0,
        degrees: reports,
    })
}

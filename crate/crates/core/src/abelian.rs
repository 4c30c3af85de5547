//! Finitely generated abelian groups `Z^n / Im A` with canonical coordinates
//! obtained from a Smith normal form of the presentation matrix.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AbelianError {
    #[error("presentation columns are linearly dependent (rank {rank} < {cols} columns)")]
    RankDeficient { rank: usize, cols: usize },
    #[error("expected a vector of length {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("element does not belong to this group")]
    GroupMismatch,
    #[error("matrix must have positive dimensions")]
    EmptyMatrix,
}

/// Dense integer matrix, row-major, arbitrary precision entries.
#[derive(Clone, PartialEq, Eq)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from rows. Returns `None` if rows are ragged or empty.
    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Option<Self> {
        let r = rows.len();
        let c = rows.first()?.len();
        if c == 0 || rows.iter().any(|row| row.len() != c) {
            return None;
        }
        let entries = rows
            .iter()
            .flat_map(|row| row.iter().cloned().map(Into::into))
            .collect();
        Some(Self {
            rows: r,
            cols: c,
            entries,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: BigInt) {
        self.entries[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.entries[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in product");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[target] += factor * row[source]
    fn add_row_multiple(&mut self, target: usize, source: usize, factor: &BigInt) {
        for j in 0..self.cols {
            let delta = self.get(source, j) * factor;
            if !delta.is_zero() {
                self.entries[target * self.cols + j] += delta;
            }
        }
    }

    /// col[target] += factor * col[source]
    fn add_col_multiple(&mut self, target: usize, source: usize, factor: &BigInt) {
        for i in 0..self.rows {
            let delta = self.get(i, source) * factor;
            if !delta.is_zero() {
                self.entries[i * self.cols + target] += delta;
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self.get(i, j).clone();
            self.set(i, j, v);
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = -self.get(i, j).clone();
            self.set(i, j, v);
        }
    }
}

impl fmt::Debug for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntegerMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// `U * A * V = D` with `U`, `V` unimodular and `D` diagonal with
/// nonnegative entries `d_1 | d_2 | ...`.
#[derive(Debug, Clone)]
pub struct SmithDecomposition {
    pub u: IntegerMatrix,
    /// Inverse of `u`, tracked alongside the elimination.
    pub u_inv: IntegerMatrix,
    pub v: IntegerMatrix,
    pub d: IntegerMatrix,
    pub diag: Vec<BigInt>,
}

impl SmithDecomposition {
    /// Number of nonzero diagonal entries.
    pub fn rank(&self) -> usize {
        self.diag.iter().filter(|d| !d.is_zero()).count()
    }
}

fn min_pivot(a: &IntegerMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..a.rows() {
        for j in t..a.cols() {
            let x = a.get(i, j);
            if x.is_zero() {
                continue;
            }
            match best {
                Some((bi, bj)) if a.get(bi, bj).abs() <= x.abs() => {}
                _ => best = Some((i, j)),
            }
        }
    }
    best
}

/// Smith normal form by repeated least-magnitude pivoting.
///
/// The pivot is always the nonzero entry of least absolute value in the
/// remaining block, ties broken by lowest `(row, col)`, so the output is a
/// deterministic function of `a`.
pub fn smith_normal_form(a: &IntegerMatrix) -> SmithDecomposition {
    let (m, n) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = IntegerMatrix::identity(m);
    let mut u_inv = IntegerMatrix::identity(m);
    let mut v = IntegerMatrix::identity(n);

    let mut t = 0;
    while t < m.min(n) {
        let Some((pr, pc)) = min_pivot(&d, t) else {
            break;
        };
        d.swap_rows(t, pr);
        u.swap_rows(t, pr);
        u_inv.swap_cols(t, pr);
        d.swap_cols(t, pc);
        v.swap_cols(t, pc);

        loop {
            let pivot = d.get(t, t).clone();
            let mut residue = false;
            for i in t + 1..m {
                if d.get(i, t).is_zero() {
                    continue;
                }
                let q = d.get(i, t).div_floor(&pivot);
                let neg_q = -&q;
                d.add_row_multiple(i, t, &neg_q);
                u.add_row_multiple(i, t, &neg_q);
                u_inv.add_col_multiple(t, i, &q);
                residue |= !d.get(i, t).is_zero();
            }
            for j in t + 1..n {
                if d.get(t, j).is_zero() {
                    continue;
                }
                let q = -d.get(t, j).div_floor(&pivot);
                d.add_col_multiple(j, t, &q);
                v.add_col_multiple(j, t, &q);
                residue |= !d.get(t, j).is_zero();
            }

            if !residue {
                // Row and column cleared; enforce divisibility of the rest.
                let offender = (t + 1..m)
                    .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                    .find(|&(i, j)| !d.get(i, j).is_multiple_of(&pivot));
                match offender {
                    None => break,
                    Some((i, _)) => {
                        let one = BigInt::one();
                        d.add_row_multiple(t, i, &one);
                        u.add_row_multiple(t, i, &one);
                        u_inv.add_col_multiple(i, t, &-one);
                    }
                }
            }

            let (pr, pc) = min_pivot(&d, t).expect("pivot block is nonzero");
            d.swap_rows(t, pr);
            u.swap_rows(t, pr);
            u_inv.swap_cols(t, pr);
            d.swap_cols(t, pc);
            v.swap_cols(t, pc);
        }

        if d.get(t, t).is_negative() {
            d.negate_row(t);
            u.negate_row(t);
            u_inv.negate_col(t);
        }
        t += 1;
    }

    let diag = (0..m.min(n)).map(|k| d.get(k, k).clone()).collect();
    SmithDecomposition {
        u,
        u_inv,
        v,
        d,
        diag,
    }
}

/// Element of a [`GradingGroup`] in canonical coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    /// One residue per torsion invariant, each in `[0, d)`.
    pub torsion: Vec<BigInt>,
    pub free: Vec<BigInt>,
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let free: Vec<String> = self.free.iter().map(ToString::to_string).collect();
        write!(f, "({})", free.join(", "))?;
        if !self.torsion.is_empty() {
            let tors: Vec<String> = self.torsion.iter().map(ToString::to_string).collect();
            write!(f, " ; [{}]", tors.join(", "))?;
        }
        Ok(())
    }
}

/// `Z^n / Im A` for an `n x c` presentation matrix `A` of full column rank.
#[derive(Debug, Clone)]
pub struct GradingGroup {
    ambient_rank: usize,
    free_rank: usize,
    torsion_invariants: Vec<BigInt>,
    /// SNF row index of each torsion invariant.
    torsion_rows: Vec<usize>,
    /// Number of nonzero SNF diagonal entries; free coordinates start here.
    relation_rank: usize,
    snf: SmithDecomposition,
}

/// Presents `Z^n / Im A` where `A` is `n x c` with linearly independent columns.
pub fn quotient_group(presentation: &IntegerMatrix) -> Result<GradingGroup, AbelianError> {
    if presentation.rows() == 0 || presentation.cols() == 0 {
        return Err(AbelianError::EmptyMatrix);
    }
    let snf = smith_normal_form(presentation);
    let rank = snf.rank();
    if rank < presentation.cols() {
        return Err(AbelianError::RankDeficient {
            rank,
            cols: presentation.cols(),
        });
    }
    let (torsion_rows, torsion_invariants): (Vec<usize>, Vec<BigInt>) = snf
        .diag
        .iter()
        .enumerate()
        .filter(|(_, d)| **d > BigInt::one())
        .map(|(k, d)| (k, d.clone()))
        .unzip();
    Ok(GradingGroup {
        ambient_rank: presentation.rows(),
        free_rank: presentation.rows() - rank,
        torsion_invariants,
        torsion_rows,
        relation_rank: rank,
        snf,
    })
}

impl GradingGroup {
    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion_invariants(&self) -> &[BigInt] {
        &self.torsion_invariants
    }

    pub fn smith(&self) -> &SmithDecomposition {
        &self.snf
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement {
            torsion: vec![BigInt::zero(); self.torsion_invariants.len()],
            free: vec![BigInt::zero(); self.free_rank],
        }
    }

    /// The canonical projection `Z^n -> K`.
    pub fn project(&self, v: &[BigInt]) -> Result<GroupElement, AbelianError> {
        self.check_len(v)?;
        let y = self.snf.u.mul_vec(v);
        let torsion = self
            .torsion_rows
            .iter()
            .zip(&self.torsion_invariants)
            .map(|(&k, d)| y[k].mod_floor(d))
            .collect();
        let free = y[self.relation_rank..].to_vec();
        Ok(GroupElement { torsion, free })
    }

    pub fn project_i64(&self, v: &[i64]) -> Result<GroupElement, AbelianError> {
        let big: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
        self.project(&big)
    }

    /// A preimage in `Z^n` of `e`; `project(lift(e)) == e`.
    pub fn lift(&self, e: &GroupElement) -> Result<Vec<BigInt>, AbelianError> {
        self.check_element(e)?;
        let mut y = vec![BigInt::zero(); self.ambient_rank];
        for (&k, r) in self.torsion_rows.iter().zip(&e.torsion) {
            y[k] = r.clone();
        }
        for (slot, f) in y[self.relation_rank..].iter_mut().zip(&e.free) {
            *slot = f.clone();
        }
        Ok(self.snf.u_inv.mul_vec(&y))
    }

    pub fn is_in_image(&self, v: &[BigInt]) -> Result<bool, AbelianError> {
        Ok(self.is_zero(&self.project(v)?))
    }

    pub fn is_zero(&self, e: &GroupElement) -> bool {
        e.torsion.iter().all(Zero::is_zero) && e.free.iter().all(Zero::is_zero)
    }

    /// `a + sign * b` with torsion reduction.
    pub fn combine(
        &self,
        a: &GroupElement,
        b: &GroupElement,
        sign: i32,
    ) -> Result<GroupElement, AbelianError> {
        self.check_element(a)?;
        self.check_element(b)?;
        let s = BigInt::from(sign);
        let torsion = a
            .torsion
            .iter()
            .zip(&b.torsion)
            .zip(&self.torsion_invariants)
            .map(|((x, y), d)| (x + y * &s).mod_floor(d))
            .collect();
        let free = a.free.iter().zip(&b.free).map(|(x, y)| x + y * &s).collect();
        Ok(GroupElement { torsion, free })
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement, AbelianError> {
        self.combine(a, b, 1)
    }

    pub fn sub(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement, AbelianError> {
        self.combine(a, b, -1)
    }

    pub fn scale(&self, a: &GroupElement, k: &BigInt) -> Result<GroupElement, AbelianError> {
        self.check_element(a)?;
        Ok(GroupElement {
            torsion: a
                .torsion
                .iter()
                .zip(&self.torsion_invariants)
                .map(|(x, d)| (x * k).mod_floor(d))
                .collect(),
            free: a.free.iter().map(|x| x * k).collect(),
        })
    }

    /// Builds an element from coordinates, reducing torsion residues.
    pub fn element(
        &self,
        free: Vec<BigInt>,
        torsion: Vec<BigInt>,
    ) -> Result<GroupElement, AbelianError> {
        if free.len() != self.free_rank {
            return Err(AbelianError::LengthMismatch {
                expected: self.free_rank,
                actual: free.len(),
            });
        }
        if torsion.len() != self.torsion_invariants.len() {
            return Err(AbelianError::LengthMismatch {
                expected: self.torsion_invariants.len(),
                actual: torsion.len(),
            });
        }
        let torsion = torsion
            .iter()
            .zip(&self.torsion_invariants)
            .map(|(x, d)| x.mod_floor(d))
            .collect();
        Ok(GroupElement { torsion, free })
    }

    pub fn contains(&self, e: &GroupElement) -> bool {
        e.free.len() == self.free_rank
            && e.torsion.len() == self.torsion_invariants.len()
            && e
                .torsion
                .iter()
                .zip(&self.torsion_invariants)
                .all(|(r, d)| !r.is_negative() && r < d)
    }

    fn check_element(&self, e: &GroupElement) -> Result<(), AbelianError> {
        if self.contains(e) {
            Ok(())
        } else {
            Err(AbelianError::GroupMismatch)
        }
    }

    fn check_len(&self, v: &[BigInt]) -> Result<(), AbelianError> {
        if v.len() != self.ambient_rank {
            return Err(AbelianError::LengthMismatch {
                expected: self.ambient_rank,
                actual: v.len(),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[i64]]) -> IntegerMatrix {
        let rows: Vec<Vec<i64>> = rows.iter().map(|r| r.to_vec()).collect();
        IntegerMatrix::from_rows(&rows).unwrap()
    }

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn identity_is_its_own_smith_form() {
        let a = IntegerMatrix::identity(2);
        let snf = smith_normal_form(&a);
        assert_eq!(snf.d, a);
        assert_eq!(snf.diag, big(&[1, 1]));
    }

    #[test]
    fn quadric_presentation_is_torsion_free() {
        let lstar = mat(&[&[-1, -1], &[-1, -1], &[1, 0], &[1, 0], &[0, 2]]);
        let snf = smith_normal_form(&lstar);
        assert_eq!(snf.diag, big(&[1, 1]));
        assert_eq!(snf.u.mul(&lstar).mul(&snf.v), snf.d);
        let k = quotient_group(&lstar).unwrap();
        assert_eq!(k.free_rank(), 3);
        assert!(k.torsion_invariants().is_empty());
    }

    #[test]
    fn sum_of_three_squares_has_two_torsion_factors() {
        let lstar = mat(&[&[-2, -2], &[2, 0], &[0, 2]]);
        let snf = smith_normal_form(&lstar);
        assert_eq!(snf.diag, big(&[2, 2]));
        let k = quotient_group(&lstar).unwrap();
        assert_eq!(k.free_rank(), 1);
        assert_eq!(k.torsion_invariants(), big(&[2, 2]).as_slice());
    }

    #[test]
    fn dependent_columns_are_rejected() {
        let a = mat(&[&[1, 2], &[1, 2], &[0, 0]]);
        assert!(matches!(
            quotient_group(&a),
            Err(AbelianError::RankDeficient { rank: 1, cols: 2 })
        ));
    }

    #[test]
    fn u_inverse_is_tracked() {
        let a = mat(&[&[4, 6, 2], &[8, -3, 5], &[0, 7, 7]]);
        let snf = smith_normal_form(&a);
        assert_eq!(snf.u.mul(&snf.u_inv), IntegerMatrix::identity(3));
    }

    #[test]
    fn projection_kills_relations_and_lift_inverts() {
        let lstar = mat(&[&[-2, -2], &[2, 0], &[0, 2]]);
        let k = quotient_group(&lstar).unwrap();
        assert!(k.is_zero(&k.project(&big(&[0, 0, 0])).unwrap()));
        for j in 0..2 {
            assert!(k.is_in_image(&lstar.column(j)).unwrap());
        }
        let e = k.project(&big(&[1, 0, 0])).unwrap();
        assert!(!k.is_zero(&e));
        let back = k.project(&k.lift(&e).unwrap()).unwrap();
        assert_eq!(back, e);
        assert!(matches!(
            k.project(&big(&[1, 0])),
            Err(AbelianError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn torsion_addition_wraps() {
        let k = quotient_group(&mat(&[&[2]])).unwrap();
        let one = k.element(vec![], big(&[1])).unwrap();
        let sum = k.add(&one, &one).unwrap();
        assert!(k.is_zero(&sum));
        assert_eq!(k.sub(&one, &one).unwrap(), k.zero());
        assert_eq!(k.add(&one, &k.zero()).unwrap(), one);
    }

    #[test]
    fn foreign_elements_are_rejected() {
        let k = quotient_group(&mat(&[&[2]])).unwrap();
        let bogus = GroupElement {
            torsion: big(&[5]),
            free: vec![],
        };
        assert_eq!(k.add(&bogus, &k.zero()), Err(AbelianError::GroupMismatch));
    }
}

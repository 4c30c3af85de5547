use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use crate::abelian::IntegerMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TrinomialError {
    #[error("block {block} is empty; every block needs at least one variable")]
    EmptyBlock { block: usize },
    #[error("exponent l({block},{index}) = {value}; exponents must be at least 1")]
    BadExponent {
        block: usize,
        index: usize,
        value: i64,
    },
}

/// A generator `T_ij`. `block` is `i` in `0..3`, `index` is the 1-based `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct Var {
    pub block: usize,
    pub index: usize,
}

impl Var {
    pub fn new(block: usize, index: usize) -> Self {
        Self { block, index }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T({},{})", self.block, self.index)
    }
}

/// Exponent data of `g = T_0^{l_0} + T_1^{l_1} + T_2^{l_2}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TrinomialData {
    exponents: [Vec<u32>; 3],
    offsets: [usize; 3],
}

impl TrinomialData {
    pub fn new(l0: Vec<u32>, l1: Vec<u32>, l2: Vec<u32>) -> Result<Self, TrinomialError> {
        let exponents = [l0, l1, l2];
        for (block, l) in exponents.iter().enumerate() {
            if l.is_empty() {
                return Err(TrinomialError::EmptyBlock { block });
            }
            if let Some(pos) = l.iter().position(|&e| e == 0) {
                return Err(TrinomialError::BadExponent {
                    block,
                    index: pos + 1,
                    value: 0,
                });
            }
        }
        let offsets = [0, exponents[0].len(), exponents[0].len() + exponents[1].len()];
        Ok(Self { exponents, offsets })
    }

    /// All exponents equal to one with the given block sizes.
    pub fn all_ones(n0: usize, n1: usize, n2: usize) -> Result<Self, TrinomialError> {
        Self::new(vec![1; n0], vec![1; n1], vec![1; n2])
    }

    /// Total number of variables `n`.
    pub fn n(&self) -> usize {
        self.exponents.iter().map(Vec::len).sum()
    }

    pub fn block_size(&self, block: usize) -> usize {
        self.exponents[block].len()
    }

    pub fn block_sizes(&self) -> [usize; 3] {
        [self.block_size(0), self.block_size(1), self.block_size(2)]
    }

    pub fn exponents(&self, block: usize) -> &[u32] {
        &self.exponents[block]
    }

    pub fn exponent(&self, v: Var) -> u32 {
        self.exponents[v.block][v.index - 1]
    }

    /// Sum of the exponents in a block (total degree of `T_i^{l_i}`).
    pub fn block_degree(&self, block: usize) -> u64 {
        self.exponents[block].iter().map(|&e| u64::from(e)).sum()
    }

    pub fn total_degree(&self) -> u64 {
        (0..3).map(|i| self.block_degree(i)).max().unwrap_or(0)
    }

    pub fn contains(&self, v: Var) -> bool {
        v.block < 3 && v.index >= 1 && v.index <= self.block_size(v.block)
    }

    /// Position of `v` in the flat ordering `T01, T02, ..., T11, ..., T2n2`.
    pub fn flat(&self, v: Var) -> usize {
        debug_assert!(self.contains(v));
        self.offsets[v.block] + v.index - 1
    }

    pub fn var(&self, flat: usize) -> Var {
        let block = if flat >= self.offsets[2] {
            2
        } else if flat >= self.offsets[1] {
            1
        } else {
            0
        };
        Var::new(block, flat - self.offsets[block] + 1)
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        (0..self.n()).map(|k| self.var(k))
    }

    pub fn block_vars(&self, block: usize) -> impl Iterator<Item = Var> {
        (1..=self.block_size(block)).map(move |j| Var::new(block, j))
    }

    /// Exponent vector of the block monomial `T_i^{l_i}`.
    pub fn block_exponent_vector(&self, block: usize) -> Vec<u32> {
        let mut u = vec![0; self.n()];
        for (j, &e) in self.exponents[block].iter().enumerate() {
            u[self.offsets[block] + j] = e;
        }
        u
    }

    /// The `2 x n` matrix `(-l_0 | l_1 | 0 ; -l_0 | 0 | l_2)`.
    pub fn matrix_l(&self) -> IntegerMatrix {
        let n = self.n();
        let mut m = IntegerMatrix::zeros(2, n);
        for v in self.vars() {
            let l = BigInt::from(self.exponent(v));
            let k = self.flat(v);
            match v.block {
                0 => {
                    m.set(0, k, -l.clone());
                    m.set(1, k, -l);
                }
                1 => m.set(0, k, l),
                _ => m.set(1, k, l),
            }
        }
        m
    }

    /// The presentation matrix `L^*` (transpose of [`matrix_l`](Self::matrix_l)).
    pub fn presentation(&self) -> IntegerMatrix {
        self.matrix_l().transpose()
    }
}

impl fmt::Display for TrinomialData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let blocks: Vec<String> = (0..3)
            .map(|i| {
                self.block_vars(i)
                    .map(|v| match self.exponent(v) {
                        1 => v.to_string(),
                        e => format!("{v}^{e}"),
                    })
                    .collect::<Vec<_>>()
                    .join("*")
            })
            .collect();
        write!(f, "{}", blocks.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(m: &IntegerMatrix) -> Vec<Vec<i64>> {
        (0..m.rows())
            .map(|i| m.row(i).iter().map(|x| x.try_into().unwrap()).collect())
            .collect()
    }

    #[test]
    fn matrix_l_all_ones() {
        let t = TrinomialData::all_ones(2, 2, 2).unwrap();
        assert_eq!(
            rows(&t.matrix_l()),
            vec![vec![-1, -1, 1, 1, 0, 0], vec![-1, -1, 0, 0, 1, 1]]
        );
    }

    #[test]
    fn matrix_l_small_and_quadric() {
        let t = TrinomialData::new(vec![1], vec![1], vec![2]).unwrap();
        assert_eq!(rows(&t.matrix_l()), vec![vec![-1, 1, 0], vec![-1, 0, 2]]);
        let q = TrinomialData::new(vec![1, 1], vec![1, 1], vec![2]).unwrap();
        assert_eq!(
            rows(&q.matrix_l()),
            vec![vec![-1, -1, 1, 1, 0], vec![-1, -1, 0, 0, 2]]
        );
    }

    #[test]
    fn flat_indexing_round_trips() {
        let t = TrinomialData::new(vec![1, 2], vec![3], vec![1, 1, 1]).unwrap();
        for k in 0..t.n() {
            assert_eq!(t.flat(t.var(k)), k);
        }
        assert_eq!(t.var(2), Var::new(1, 1));
        assert!(!t.contains(Var::new(1, 2)));
    }

    #[test]
    fn rejects_zero_exponents_and_empty_blocks() {
        assert!(matches!(
            TrinomialData::new(vec![1], vec![1], vec![0, 1]),
            Err(TrinomialError::BadExponent { block: 2, index: 1, .. })
        ));
        assert!(matches!(
            TrinomialData::new(vec![], vec![1], vec![1]),
            Err(TrinomialError::EmptyBlock { block: 0 })
        ));
    }
}

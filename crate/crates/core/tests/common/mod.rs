#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use trinomial::abelian::{GroupElement, IntegerMatrix};
use trinomial::derivation::{ElementarySpec, ElementaryType, KernelMultiplier};
use trinomial::ring::{ExplicitGrading, FineGrading, TrinomialData, Var};

pub fn quadric() -> TrinomialData {
    TrinomialData::new(vec![1, 1], vec![1, 1], vec![2]).unwrap()
}

/// Degrees of `T01, T02, T11, T12, T21` in the three-dimensional basis used
/// for the quadric pictures.
pub const XYZ_VECTORS: [[i64; 3]; 5] = [[1, 0, 1], [-1, 0, 1], [0, 1, 1], [0, -1, 1], [0, 0, 1]];

pub fn xyz_grading(fg: &FineGrading) -> ExplicitGrading {
    let vectors = XYZ_VECTORS
        .iter()
        .map(|v| v.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    ExplicitGrading::new(fg, vectors).unwrap()
}

pub fn xyz_point(fg: &FineGrading, eg: &ExplicitGrading, p: [i64; 3]) -> GroupElement {
    let p: Vec<BigInt> = p.iter().map(|&x| BigInt::from(x)).collect();
    eg.element(fg.group(), &p).unwrap().unwrap()
}

pub fn xyz_coords(eg: &ExplicitGrading, e: &GroupElement) -> [i64; 3] {
    let c = eg.coordinates(e);
    [c[0].to_i64().unwrap(), c[1].to_i64().unwrap(), c[2].to_i64().unwrap()]
}

/// Number of basic sets of the quadric containing `(x, y, z)`, read off the
/// cones spanned from each offset by the three remaining generator degrees.
pub fn quadric_set_count(x: i64, y: i64, z: i64) -> usize {
    let odd = (x + y + z).rem_euclid(2) == 1;
    let corner = x != 0 && y != 0 && z >= x.abs() + y.abs() - 2;
    let lateral_x = x != 0 && z >= x.abs() + y.abs() - 1 && odd;
    let lateral_y = y != 0 && z >= x.abs() + y.abs() - 1 && odd;
    usize::from(corner) + usize::from(lateral_x) + usize::from(lateral_y)
}

/// Degrees of `h * delta` with all three variables non-kernel.
pub fn quadric_type_one(x: i64, y: i64, z: i64) -> bool {
    x != 0 && y != 0 && z >= x.abs() + y.abs() - 1 && (x + y + z).rem_euclid(2) == 1
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

pub fn nonzero_rational(rng: &mut impl Rng) -> BigRational {
    loop {
        let n: i64 = rng.gen_range(-5..=5);
        let d: i64 = rng.gen_range(1..=3);
        if n != 0 {
            return BigRational::new(n.into(), d.into());
        }
    }
}

pub fn random_trinomial(rng: &mut impl Rng, max_n: usize, max_l: u32) -> TrinomialData {
    let mut block = || (0..rng.gen_range(1..=max_n)).map(|_| rng.gen_range(1..=max_l)).collect();
    let (l0, l1, l2) = (block(), block(), block());
    TrinomialData::new(l0, l1, l2).unwrap()
}

/// A random valid spec on `t`, if `t` admits one within a few attempts.
pub fn random_spec(rng: &mut impl Rng, t: &TrinomialData, max_m: u32) -> Option<ElementarySpec> {
    for _ in 0..50 {
        let c = [
            rng.gen_range(1..=t.block_size(0)),
            rng.gen_range(1..=t.block_size(1)),
            rng.gen_range(1..=t.block_size(2)),
        ];
        let kind = if rng.gen_bool(0.5) {
            ElementaryType::I
        } else {
            ElementaryType::II { i0: rng.gen_range(0..3) }
        };
        let active = kind.active_blocks();
        let big = active.iter().filter(|&&i| t.exponent(Var::new(i, c[i])) > 1).count();
        if big > 1 {
            continue;
        }
        let beta = match kind {
            ElementaryType::I => {
                let b0 = nonzero_rational(rng);
                let b1 = nonzero_rational(rng);
                let b2 = -(&b0 + &b1);
                if b2.is_zero() {
                    continue;
                }
                [b0, b1, b2]
            }
            ElementaryType::II { i0 } => {
                let r = nonzero_rational(rng);
                let mut beta = [r.clone(), r.clone(), r];
                beta[i0] = BigRational::zero();
                let other = active[1];
                beta[other] = -beta[other].clone();
                beta
            }
        };
        let c = match kind {
            ElementaryType::II { i0 } => {
                let mut c = c;
                c[i0] = 1;
                c
            }
            ElementaryType::I => c,
        };
        let non_kernel: Vec<Var> = active.iter().map(|&i| Var::new(i, c[i])).collect();
        let exponents = t
            .vars()
            .map(|v| if non_kernel.contains(&v) { 0 } else { rng.gen_range(0..=2) })
            .collect();
        let multiplier = KernelMultiplier {
            exponents,
            m: rng.gen_range(0..=max_m),
            alpha: nonzero_rational(rng),
        };
        return Some(ElementarySpec::new(t, c, beta, multiplier).expect("valid by construction"));
    }
    None
}

pub fn random_matrix(rng: &mut impl Rng, max_dim: usize, bound: i64) -> IntegerMatrix {
    let rows = rng.gen_range(1..=max_dim);
    let cols = rng.gen_range(1..=max_dim);
    let data: Vec<Vec<i64>> = (0..rows)
        .map(|_| (0..cols).map(|_| rng.gen_range(-bound..=bound)).collect())
        .collect();
    IntegerMatrix::from_rows(&data).unwrap()
}

/// Determinant by fraction-free elimination.
pub fn determinant(rows: &[Vec<BigInt>]) -> BigInt {
    let n = rows.len();
    let mut a = rows.to_vec();
    let mut sign = BigInt::from(1);
    let mut prev = BigInt::from(1);
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return BigInt::zero();
        };
        if p != k {
            a.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// `gcd` of all `k x k` minors.
pub fn determinantal_divisor(m: &IntegerMatrix, k: usize) -> BigInt {
    use num_integer::Integer;
    let mut g = BigInt::zero();
    for rows in subsets(m.rows(), k) {
        for cols in subsets(m.cols(), k) {
            let minor: Vec<Vec<BigInt>> = rows
                .iter()
                .map(|&i| cols.iter().map(|&j| m.get(i, j).clone()).collect())
                .collect();
            g = g.gcd(&determinant(&minor));
        }
    }
    g
}

pub fn square_rows(m: &IntegerMatrix) -> Vec<Vec<BigInt>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

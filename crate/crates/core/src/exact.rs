//! Exact rational linear algebra for small dense matrices.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type QMatrix = Vec<Vec<BigRational>>;

pub fn from_i64(m: &[Vec<i64>]) -> QMatrix {
    m.iter().map(|row| row.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect()).collect()
}

fn ncols(m: &QMatrix, fallback: usize) -> usize {
    m.first().map_or(fallback, Vec::len)
}

/// Reduced row echelon form; returns the pivot columns.
pub fn rref(m: &mut QMatrix) -> Vec<usize> {
    let rows = m.len();
    let cols = ncols(m, 0);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = BigRational::one() / m[r][c].clone();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let sub = &f * &m[r][j];
                    m[i][j] -= sub;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &QMatrix) -> usize {
    rref(&mut m.clone()).len()
}

/// Basis of the right null space, as column vectors of length `cols`.
pub fn null_space(m: &QMatrix, cols: usize) -> Vec<Vec<BigRational>> {
    let mut a = m.clone();
    let pivots = rref(&mut a);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); cols];
            v[f] = BigRational::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -a[r][f].clone();
            }
            v
        })
        .collect()
}

/// Product of an r×k matrix with the matrix whose columns are `vecs` (each of length k).
pub fn mul_columns(m: &QMatrix, vecs: &[Vec<BigRational>]) -> QMatrix {
    m.iter()
        .map(|row| {
            vecs.iter()
                .map(|v| row.iter().zip(v).fold(BigRational::zero(), |acc, (a, b)| acc + a * b))
                .collect()
        })
        .collect()
}

/// Matrix whose columns are `vecs`.
pub fn columns_to_matrix(vecs: &[Vec<BigRational>], rows: usize) -> QMatrix {
    (0..rows).map(|r| vecs.iter().map(|v| v[r].clone()).collect()).collect()
}

pub fn stack(top: &QMatrix, bottom: &QMatrix) -> QMatrix {
    top.iter().chain(bottom).cloned().collect()
}

pub fn is_zero(m: &QMatrix) -> bool {
    m.iter().flatten().all(|x| x.is_zero())
}

pub fn max_abs(m: &QMatrix) -> BigRational {
    m.iter().flatten().map(|x| x.abs()).fold(BigRational::zero(), |a, b| if b > a { b } else { a })
}

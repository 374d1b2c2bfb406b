//! Dense matrices over QQ.

use num_traits::{One, Zero};

use crate::polyring::Coeff;

pub type QMatrix = Vec<Vec<Coeff>>;

pub fn identity(n: usize) -> QMatrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { Coeff::one() } else { Coeff::zero() }).collect()).collect()
}

pub fn from_ints(rows: &[&[i64]]) -> QMatrix {
    rows.iter().map(|r| r.iter().map(|&v| Coeff::from_integer(v.into())).collect()).collect()
}

pub fn is_square(a: &QMatrix, n: usize) -> bool {
    a.len() == n && a.iter().all(|r| r.len() == n)
}

pub fn transpose(a: &QMatrix) -> QMatrix {
    let cols = a.first().map_or(0, Vec::len);
    (0..cols).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn mul(a: &QMatrix, b: &QMatrix) -> QMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|r| (0..cols).map(|j| (0..inner).fold(Coeff::zero(), |acc, k| acc + &r[k] * &b[k][j])).collect())
        .collect()
}

/// Row-reduced echelon form; returns the pivot columns.
fn rref(a: &mut QMatrix) -> Vec<usize> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for v in a[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..cols {
                    let d = &f * &a[r][j];
                    a[i][j] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(a: &QMatrix) -> usize {
    rref(&mut a.clone()).len()
}

/// Inverse of a square matrix, or `None` when singular.
pub fn inverse(a: &QMatrix) -> Option<QMatrix> {
    let n = a.len();
    if !is_square(a, n) {
        return None;
    }
    let mut aug: QMatrix = a.iter().zip(identity(n)).map(|(r, e)| r.iter().cloned().chain(e).collect()).collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

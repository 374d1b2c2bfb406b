//! Matrices over the polynomial ring: minors, Fitting ideals, Jacobian
//! coefficient extraction, ranks modulo variables, and rational row/column operations.

pub mod rational;

use std::collections::{HashMap, HashSet};
use std::fmt;

use num_traits::Zero;
use thiserror::Error;

use crate::ideal_ops::{IdealError, IdealHandle};
use crate::polyring::{check_same, parse_poly, Coeff, PolyError, Polynomial, Ring};
pub use rational::QMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("minor size {t} out of range for a {rows}x{cols} matrix")]
    BadSize { t: usize, rows: usize, cols: usize },
    #[error("Fitting index {index} needs {size}x{size} minors of a {rows}x{cols} matrix; the ideal is zero")]
    BadIndex { index: usize, size: usize, rows: usize, cols: usize },
    #[error("entry ({row}, {col}) is not a linear form in the given variables")]
    NonLinearEntry { row: usize, col: usize },
    #[error("row or column transform is singular or has the wrong size")]
    SingularTransform,
    #[error("rows have different lengths")]
    NotRectangular,
    #[error("incompatible shapes {0}x{1} and {2}x{3}")]
    ShapeMismatch(usize, usize, usize, usize),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Ideal(#[from] IdealError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    ring: Ring,
    rows: usize,
    cols: usize,
    entries: Vec<Vec<Polynomial>>,
}

impl PolyMatrix {
    pub fn new(ring: &Ring, entries: Vec<Vec<Polynomial>>) -> Result<Self, MatrixError> {
        let rows = entries.len();
        let cols = entries.first().map_or(0, Vec::len);
        if entries.iter().any(|r| r.len() != cols) {
            return Err(MatrixError::NotRectangular);
        }
        for e in entries.iter().flatten() {
            check_same(ring, e.ring())?;
        }
        Ok(PolyMatrix { ring: ring.clone(), rows, cols, entries })
    }

    pub fn parse<S: AsRef<str>>(ring: &Ring, rows: &[Vec<S>]) -> Result<Self, MatrixError> {
        let entries = rows
            .iter()
            .map(|r| r.iter().map(|s| parse_poly(s.as_ref(), ring)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        PolyMatrix::new(ring, entries)
    }

    pub fn zeros(ring: &Ring, rows: usize, cols: usize) -> Self {
        PolyMatrix { ring: ring.clone(), rows, cols, entries: vec![vec![Polynomial::zero(ring); cols]; rows] }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, i: usize, j: usize) -> &Polynomial {
        &self.entries[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: Polynomial) {
        assert!(p.ring().same_vars(&self.ring), "entry ring mismatch");
        self.entries[i][j] = p;
    }

    pub fn rows(&self) -> &[Vec<Polynomial>] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(Polynomial::is_zero)
    }

    pub fn transpose(&self) -> PolyMatrix {
        let entries = (0..self.cols).map(|j| (0..self.rows).map(|i| self.entries[i][j].clone()).collect()).collect();
        PolyMatrix { ring: self.ring.clone(), rows: self.cols, cols: self.rows, entries }
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> PolyMatrix {
        let entries = rows.iter().map(|&i| cols.iter().map(|&j| self.entries[i][j].clone()).collect()).collect();
        PolyMatrix { ring: self.ring.clone(), rows: rows.len(), cols: cols.len(), entries }
    }

    pub fn map_entries(&self, f: impl Fn(&Polynomial) -> Polynomial) -> PolyMatrix {
        let entries: Vec<Vec<Polynomial>> = self.entries.iter().map(|r| r.iter().map(&f).collect()).collect();
        let ring = entries.iter().flatten().next().map_or(self.ring.clone(), |p| p.ring().clone());
        PolyMatrix { ring, rows: self.rows, cols: self.cols, entries }
    }

    pub fn substitute_zero(&self, vars: &[usize]) -> PolyMatrix {
        self.map_entries(|p| p.substitute_zero(vars))
    }

    pub fn map_to_ring(&self, target: &Ring) -> Result<PolyMatrix, MatrixError> {
        let entries = self
            .entries
            .iter()
            .map(|r| r.iter().map(|p| p.map_to_ring(target)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        PolyMatrix::new(target, entries)
    }

    pub fn mul(&self, other: &PolyMatrix) -> Result<PolyMatrix, MatrixError> {
        if self.cols != other.rows {
            return Err(MatrixError::ShapeMismatch(self.rows, self.cols, other.rows, other.cols));
        }
        check_same(&self.ring, &other.ring)?;
        let mut out = PolyMatrix::zeros(&self.ring, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Polynomial::zero(&self.ring);
                for k in 0..self.cols {
                    if !self.entries[i][k].is_zero() && !other.entries[k][j].is_zero() {
                        acc = &acc + &(&self.entries[i][k] * &other.entries[k][j]);
                    }
                }
                out.entries[i][j] = acc;
            }
        }
        Ok(out)
    }

    /// Left multiplication by a rational matrix.
    pub fn scalar_left(&self, u: &QMatrix) -> PolyMatrix {
        let entries = u
            .iter()
            .map(|urow| {
                (0..self.cols)
                    .map(|j| {
                        let mut acc = Polynomial::zero(&self.ring);
                        for (k, c) in urow.iter().enumerate() {
                            if !c.is_zero() && !self.entries[k][j].is_zero() {
                                acc = &acc + &self.entries[k][j].scale(c);
                            }
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        PolyMatrix { ring: self.ring.clone(), rows: u.len(), cols: self.cols, entries }
    }

    /// Right multiplication by a rational matrix.
    pub fn scalar_right(&self, v: &QMatrix) -> PolyMatrix {
        self.transpose().scalar_left(&rational::transpose(v)).transpose()
    }

    /// Row vector times matrix: `[p_1 .. p_r] * M`.
    pub fn row_times(&self, row: &[Polynomial]) -> Result<Vec<Polynomial>, MatrixError> {
        if row.len() != self.rows {
            return Err(MatrixError::ShapeMismatch(1, row.len(), self.rows, self.cols));
        }
        let m = PolyMatrix::new(&self.ring, vec![row.to_vec()])?.mul(self)?;
        Ok(m.entries.into_iter().next().unwrap_or_default())
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        self.entries.iter().map(|r| r.iter().map(|p| p.to_string()).collect()).collect()
    }
}

impl fmt::Display for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.entries.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let cells: Vec<String> = r.iter().map(|p| p.to_string()).collect();
            write!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// Determinant rows `rows[depth..]` against the column set `mask`, by
/// expansion along the first remaining row, memoized per column set.
fn laplace(m: &PolyMatrix, rows: &[usize], mask: u64, memo: &mut HashMap<u64, Polynomial>) -> Polynomial {
    let k = mask.count_ones() as usize;
    if k == 0 {
        return Polynomial::one(&m.ring);
    }
    if let Some(p) = memo.get(&mask) {
        return p.clone();
    }
    let r = rows[rows.len() - k];
    let mut acc = Polynomial::zero(&m.ring);
    let mut sign_positive = true;
    for c in 0..m.cols {
        if mask & (1 << c) == 0 {
            continue;
        }
        let a = &m.entries[r][c];
        if !a.is_zero() {
            let sub = laplace(m, rows, mask & !(1 << c), memo);
            if !sub.is_zero() {
                let term = a * &sub;
                acc = if sign_positive { &acc + &term } else { &acc - &term };
            }
        }
        sign_positive = !sign_positive;
    }
    memo.insert(mask, acc.clone());
    acc
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

/// Determinant of a square matrix.
pub fn determinant(m: &PolyMatrix) -> Result<Polynomial, MatrixError> {
    if m.rows != m.cols {
        return Err(MatrixError::ShapeMismatch(m.rows, m.cols, m.cols, m.rows));
    }
    assert!(m.cols <= 64, "at most 64 columns supported");
    let rows: Vec<usize> = (0..m.rows).collect();
    let full = if m.cols == 64 { u64::MAX } else { (1u64 << m.cols) - 1 };
    Ok(laplace(m, &rows, full, &mut HashMap::new()))
}

/// All nonzero `t x t` minors, deduplicated up to sign, in primitive form and
/// sorted canonically.
pub fn minor_list(m: &PolyMatrix, t: usize) -> Result<Vec<Polynomial>, MatrixError> {
    if t == 0 || t > m.rows.min(m.cols) {
        return Err(MatrixError::BadSize { t, rows: m.rows, cols: m.cols });
    }
    assert!(m.cols <= 64, "at most 64 columns supported");
    let colsets: Vec<u64> = subsets(m.cols, t).iter().map(|s| s.iter().fold(0u64, |a, &c| a | (1 << c))).collect();
    let mut seen: HashSet<Polynomial> = HashSet::new();
    for rows in subsets(m.rows, t) {
        let mut memo = HashMap::new();
        for &mask in &colsets {
            let d = laplace(m, &rows, mask, &mut memo);
            if !d.is_zero() {
                seen.insert(d.primitive());
            }
        }
    }
    let mut out: Vec<(String, Polynomial)> = seen.into_iter().map(|p| (p.to_canonical_string(), p)).collect();
    out.sort_by(|a, b| a.1.total_degree().cmp(&b.1.total_degree()).then_with(|| a.0.cmp(&b.0)));
    Ok(out.into_iter().map(|(_, p)| p).collect())
}

/// `I_t(M)`, the ideal of `t x t` minors.
pub fn minors(m: &PolyMatrix, t: usize) -> Result<IdealHandle, MatrixError> {
    Ok(IdealHandle::new(&m.ring, minor_list(m, t)?)?)
}

/// `Fitt_i(E) = I_{n-i}(M)` for the module presented by `M` on `n = rows` generators.
/// Unit ideal when `n - i <= 0`; `BadIndex` (the zero ideal) when there are no minors of that size.
pub fn fitting_ideal(m: &PolyMatrix, i: usize) -> Result<IdealHandle, MatrixError> {
    if i >= m.rows {
        return Ok(IdealHandle::unit(&m.ring));
    }
    let size = m.rows - i;
    if size > m.cols {
        return Err(MatrixError::BadIndex { index: i, size, rows: m.rows, cols: m.cols });
    }
    minors(m, size)
}

/// Coefficients `c[i][j][k]` with `M_ij = sum_k c[i][j][k] * x_{vars[k]}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearCoeffs {
    pub vars: Vec<usize>,
    pub c: Vec<Vec<Vec<Coeff>>>,
}

impl LinearCoeffs {
    pub fn get(&self, i: usize, j: usize, k: usize) -> &Coeff {
        &self.c[i][j][k]
    }

    /// Rebuilds the matrix over `ring`.
    pub fn reassemble(&self, ring: &Ring) -> PolyMatrix {
        let entries = self
            .c
            .iter()
            .map(|r| {
                r.iter()
                    .map(|coeffs| {
                        coeffs
                            .iter()
                            .zip(&self.vars)
                            .fold(Polynomial::zero(ring), |acc, (c, &v)| &acc + &Polynomial::var(ring, v).scale(c))
                    })
                    .collect()
            })
            .collect();
        PolyMatrix::new(ring, entries).expect("rectangular by construction")
    }
}

pub fn extract_linear_coeffs(m: &PolyMatrix, xblock: &[usize]) -> Result<LinearCoeffs, MatrixError> {
    let mut c = Vec::with_capacity(m.rows);
    for (i, row) in m.entries.iter().enumerate() {
        let mut crow = Vec::with_capacity(m.cols);
        for (j, p) in row.iter().enumerate() {
            if !p.is_linear_form() || p.support().iter().any(|v| !xblock.contains(v)) {
                return Err(MatrixError::NonLinearEntry { row: i, col: j });
            }
            crow.push(xblock.iter().map(|&v| p.linear_coefficient(v)).collect());
        }
        c.push(crow);
    }
    Ok(LinearCoeffs { vars: xblock.to_vec(), c })
}

/// Rank over the fraction field, by Bareiss elimination.
pub fn rank(m: &PolyMatrix) -> usize {
    let mut a = m.entries.clone();
    let (rows, cols) = (m.rows, m.cols);
    let mut prev = Polynomial::one(&m.ring);
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let num = &(&a[r][c] * &a[i][j]) - &(&a[i][c] * &a[r][j]);
                a[i][j] = num.div_exact(&prev).expect("Bareiss division is exact");
            }
            a[i][c] = Polynomial::zero(&m.ring);
        }
        prev = a[r][c].clone();
        r += 1;
    }
    r
}

/// Rank after setting the listed variables to zero.
pub fn rank_mod_vars(m: &PolyMatrix, vars: &[usize]) -> usize {
    rank(&m.substitute_zero(vars))
}

/// `U * M * V` for invertible rational `U` (rows x rows) and `V` (cols x cols).
pub fn field_row_col_ops(m: &PolyMatrix, u: &QMatrix, v: &QMatrix) -> Result<PolyMatrix, MatrixError> {
    if !rational::is_square(u, m.rows) || !rational::is_square(v, m.cols) {
        return Err(MatrixError::SingularTransform);
    }
    if rational::rank(u) < m.rows || rational::rank(v) < m.cols {
        return Err(MatrixError::SingularTransform);
    }
    Ok(m.scalar_left(u).scalar_right(v))
}

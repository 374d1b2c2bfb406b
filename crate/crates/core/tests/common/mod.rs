//! Shared generators for the integration tests.
#![allow(dead_code)]

use num_bigint::BigInt;
use proptest::prelude::*;
use reeskit::hypotheses::PresentationInput;
use reeskit::ideal_ops::IdealHandle;
use reeskit::polymatrix::{PolyMatrix, QMatrix};
use reeskit::polyring::{Coeff, Monomial, Polynomial, Ring, VarSet};

pub fn ring(names: &[&str]) -> Ring {
    VarSet::new(names.iter().copied()).unwrap()
}

pub fn q(v: i64) -> Coeff {
    Coeff::from_integer(BigInt::from(v))
}

/// Terms as `(exponents, coefficient)`.
pub type RawPoly = Vec<(Vec<u32>, i64)>;

pub fn raw_poly(nvars: usize, max_exp: u32, max_terms: usize) -> impl Strategy<Value = RawPoly> {
    prop::collection::vec((prop::collection::vec(0..=max_exp, nvars), -4i64..=4), 1..=max_terms)
}

pub fn poly(ring: &Ring, raw: &RawPoly) -> Polynomial {
    Polynomial::from_terms(ring, raw.iter().map(|(e, c)| (Monomial::from_exponents(e.clone()), q(*c))))
}

/// Nonzero generator lists for small ideals.
pub fn raw_ideal(nvars: usize, max_exp: u32, max_terms: usize, max_gens: usize) -> impl Strategy<Value = Vec<RawPoly>> {
    prop::collection::vec(raw_poly(nvars, max_exp, max_terms), 1..=max_gens)
}

pub fn ideal(ring: &Ring, raw: &[RawPoly]) -> IdealHandle {
    IdealHandle::new(ring, raw.iter().map(|r| poly(ring, r)).collect()).unwrap()
}

/// Linear forms given by coefficient vectors.
pub type RawLinear = Vec<Vec<Vec<i64>>>;

pub fn raw_linear_matrix(rows: usize, cols: usize, nvars: usize) -> impl Strategy<Value = RawLinear> {
    let coeff = prop_oneof![3 => Just(0i64), 2 => -2i64..=2];
    prop::collection::vec(prop::collection::vec(prop::collection::vec(coeff, nvars), cols), rows)
}

pub fn linear_form(ring: &Ring, c: &[i64]) -> Polynomial {
    let n = ring.len();
    Polynomial::from_terms(ring, c.iter().enumerate().map(|(i, &v)| (Monomial::var(n, i), q(v))))
}

pub fn linear_matrix(ring: &Ring, raw: &RawLinear) -> PolyMatrix {
    let rows = raw.iter().map(|r| r.iter().map(|c| linear_form(ring, c)).collect()).collect();
    PolyMatrix::new(ring, rows).unwrap()
}

/// An invertible rational matrix as a product of unit lower and
/// nonsingular upper triangular factors.
pub fn invertible(n: usize) -> impl Strategy<Value = QMatrix> {
    let entries = prop::collection::vec(-3i64..=3, n * n);
    let lower = prop::collection::vec(-3i64..=3, n * n);
    let diag = prop::collection::vec(prop_oneof![Just(1i64), Just(-1), Just(2), Just(3)], n);
    (entries, lower, diag).prop_map(move |(u, l, d)| {
        let upper: QMatrix = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            q(d[i])
                        } else if j > i {
                            q(u[i * n + j])
                        } else {
                            q(0)
                        }
                    })
                    .collect()
            })
            .collect();
        let lower: QMatrix = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            q(1)
                        } else if j < i {
                            q(l[i * n + j])
                        } else {
                            q(0)
                        }
                    })
                    .collect()
            })
            .collect();
        reeskit::polymatrix::rational::mul(&lower, &upper)
    })
}

/// A linear presentation over `x1, x2, x3` whose last variable occurs only
/// in the bottom-right entry, with coefficient one, so the Jacobian dual is
/// in block form.
pub fn block_form_presentation() -> impl Strategy<Value = PresentationInput> {
    (1usize..=2, 3usize..=4).prop_flat_map(|(e, n)| {
        let m = n - e;
        raw_linear_matrix(n, m, 2).prop_map(move |raw| {
            let r = ring(&["x1", "x2", "x3"]);
            let mut rows: Vec<Vec<Polynomial>> =
                raw.iter().map(|row| row.iter().map(|c| linear_form(&r, &[c[0], c[1], 0])).collect()).collect();
            let last = &mut rows[n - 1][m - 1];
            *last = &*last + &Polynomial::var(&r, 2);
            PresentationInput::new(PolyMatrix::new(&r, rows).unwrap(), e).unwrap()
        })
    })
}

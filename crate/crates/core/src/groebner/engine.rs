//! Integer-coefficient polynomial engine used by Buchberger's algorithm.
//!
//! Polynomials are kept primitive over ZZ with terms sorted descending in the
//! active term order; reduction is fraction-free.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::polyring::{Monomial, MonomialOrder, Polynomial, Ring};

pub(crate) type Exps = Box<[u32]>;

#[derive(Clone, Debug)]
pub(crate) struct IPoly {
    pub terms: Vec<(Exps, BigInt)>,
}

pub(crate) fn mask(e: &[u32]) -> u64 {
    let mut m = 0u64;
    for (i, &x) in e.iter().enumerate() {
        if x > 0 {
            m |= 1 << (i % 64);
        }
    }
    m
}

pub(crate) fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn quotient(b: &[u32], a: &[u32]) -> Exps {
    b.iter().zip(a).map(|(y, x)| y - x).collect()
}

pub(crate) fn lcm(a: &[u32], b: &[u32]) -> Exps {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

pub(crate) fn coprime(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| *x == 0 || *y == 0)
}

pub(crate) fn degree(a: &[u32]) -> u64 {
    a.iter().map(|&x| x as u64).sum()
}

fn mul_exps(a: &[u32], b: &[u32]) -> Exps {
    a.iter().zip(b).map(|(x, y)| x.checked_add(*y).expect("exponent overflow")).collect()
}

impl IPoly {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn lm(&self) -> &[u32] {
        &self.terms[0].0
    }

    pub fn lc(&self) -> &BigInt {
        &self.terms[0].1
    }

    pub fn is_constant(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.iter().all(|&e| e == 0)
    }

    /// Clears denominators, sorts, and makes primitive.
    pub fn from_poly(p: &Polynomial, order: &MonomialOrder) -> IPoly {
        let den = p.terms().fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
        let mut terms: Vec<(Exps, BigInt)> = p
            .terms()
            .map(|(m, c)| (m.exponents().to_vec().into_boxed_slice(), c.numer() * (&den / c.denom())))
            .collect();
        terms.sort_by(|a, b| order.cmp_exps(&b.0, &a.0));
        let mut out = IPoly { terms };
        out.make_primitive();
        out
    }

    /// Rational polynomial with leading coefficient one.
    pub fn to_monic_poly(&self, ring: &Ring) -> Polynomial {
        if self.is_zero() {
            return Polynomial::zero(ring);
        }
        let lc = self.lc().clone();
        Polynomial::from_terms(
            ring,
            self.terms
                .iter()
                .map(|(e, c)| (Monomial::from_exponents(e.to_vec()), BigRational::new(c.clone(), lc.clone()))),
        )
    }

    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for (_, c) in &self.terms {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Divides by the content and makes the leading coefficient positive.
    /// Returns the divisor applied (signed).
    pub fn make_primitive(&mut self) -> BigInt {
        if self.terms.is_empty() {
            return BigInt::one();
        }
        let mut g = self.content();
        if self.terms[0].1.is_negative() {
            g = -g;
        }
        if !g.is_one() {
            for (_, c) in self.terms.iter_mut() {
                *c = &*c / &g;
            }
        }
        g
    }

    pub fn sugar(&self) -> u64 {
        self.terms.iter().map(|(e, _)| degree(e)).max().unwrap_or(0)
    }
}

/// `a * p[skip..] - b * t * q[skip..]`, merged in descending order.
fn combine(
    p: &[(Exps, BigInt)],
    a: &BigInt,
    q: &[(Exps, BigInt)],
    b: &BigInt,
    t: &[u32],
    order: &MonomialOrder,
) -> Vec<(Exps, BigInt)> {
    let mut out = Vec::with_capacity(p.len() + q.len());
    let mut i = 0;
    let mut j = 0;
    let mut qt: Option<Exps> = q.first().map(|(e, _)| mul_exps(e, t));
    while i < p.len() || j < q.len() {
        let ord = match (p.get(i), &qt) {
            (Some(pe), Some(qe)) => order.cmp_exps(&pe.0, qe),
            (Some(_), None) => Ordering::Greater,
            (None, Some(_)) => Ordering::Less,
            (None, None) => unreachable!(),
        };
        match ord {
            Ordering::Greater => {
                let c = if a.is_one() { p[i].1.clone() } else { &p[i].1 * a };
                out.push((p[i].0.clone(), c));
                i += 1;
            }
            Ordering::Less => {
                let c = -(&q[j].1 * b);
                out.push((qt.take().unwrap(), c));
                j += 1;
                qt = q.get(j).map(|(e, _)| mul_exps(e, t));
            }
            Ordering::Equal => {
                let c = &p[i].1 * a - &q[j].1 * b;
                if !c.is_zero() {
                    out.push((p[i].0.clone(), c));
                }
                i += 1;
                j += 1;
                qt = q.get(j).map(|(e, _)| mul_exps(e, t));
            }
        }
    }
    out
}

/// S-polynomial of two primitive polynomials.
pub(crate) fn spoly(f: &IPoly, g: &IPoly, order: &MonomialOrder) -> IPoly {
    let l = lcm(f.lm(), g.lm());
    let tf = quotient(&l, f.lm());
    let tg = quotient(&l, g.lm());
    let gcd = f.lc().gcd(g.lc());
    let a = g.lc() / &gcd;
    let b = f.lc() / &gcd;
    // a*tf*f - b*tg*g; the leading terms cancel.
    let ftail: Vec<(Exps, BigInt)> = f.terms[1..].iter().map(|(e, c)| (mul_exps(e, &tf), c.clone())).collect();
    let mut out = IPoly { terms: combine(&ftail, &a, &g.terms[1..], &b, &tg, order) };
    out.make_primitive();
    out
}

/// A reducer: polynomial plus cached leading-monomial mask.
pub(crate) struct Reducer<'a> {
    pub poly: &'a IPoly,
    pub mask: u64,
}

impl<'a> Reducer<'a> {
    pub fn new(poly: &'a IPoly) -> Self {
        Reducer { mask: mask(poly.lm()), poly }
    }
}

fn find_reducer<'a>(e: &[u32], reducers: &'a [Reducer<'a>]) -> Option<&'a IPoly> {
    let m = mask(e);
    reducers.iter().find(|r| r.mask & !m == 0 && divides(r.poly.lm(), e)).map(|r| r.poly)
}

/// Full fraction-free reduction of `p` against `reducers` using the first
/// divisor in sequence order. Returns the remainder `r` and a rational `s`
/// with `s*p - r` in the ideal of the reducers. With `tail == false` only
/// the leading term is reduced.
pub(crate) fn reduce(p: IPoly, reducers: &[Reducer<'_>], order: &MonomialOrder, tail: bool) -> (IPoly, BigRational) {
    let mut scale = BigRational::one();
    let mut done: Vec<(Exps, BigInt)> = Vec::new();
    let mut rest = p.terms;
    let mut start = 0usize;
    let mut steps = 0usize;
    while start < rest.len() {
        if !tail && !done.is_empty() {
            break;
        }
        let (lead_e, lead_c) = (&rest[start].0, &rest[start].1);
        match find_reducer(lead_e, reducers) {
            None => {
                done.push(rest[start].clone());
                start += 1;
            }
            Some(g) => {
                let t = quotient(lead_e, g.lm());
                let gcd = lead_c.gcd(g.lc());
                let a = g.lc() / &gcd;
                let b = lead_c / &gcd;
                rest = combine(&rest[start + 1..], &a, &g.terms[1..], &b, &t, order);
                start = 0;
                if !a.is_one() {
                    for (_, c) in done.iter_mut() {
                        *c *= &a;
                    }
                    scale *= BigRational::from_integer(a);
                }
                steps += 1;
                if steps % 8 == 0 {
                    let mut g = BigInt::zero();
                    for (_, c) in done.iter().chain(rest.iter()) {
                        g = g.gcd(c);
                        if g.is_one() {
                            break;
                        }
                    }
                    if !g.is_zero() && !g.is_one() {
                        for (_, c) in done.iter_mut().chain(rest.iter_mut()) {
                            *c = &*c / &g;
                        }
                        scale /= BigRational::from_integer(g);
                    }
                }
            }
        }
    }
    done.extend(rest.drain(start..));
    let mut out = IPoly { terms: done };
    let k = out.make_primitive();
    scale /= BigRational::from_integer(k);
    (out, scale)
}

/// Gaussian elimination on coefficient vectors: returns generators of the
/// same QQ-span with pairwise distinct leading monomials.
pub(crate) fn linear_interreduce(mut polys: Vec<IPoly>, order: &MonomialOrder) -> Vec<IPoly> {
    use std::collections::HashMap;
    polys.sort_by(|a, b| order.cmp_exps(b.lm(), a.lm()).then(a.terms.len().cmp(&b.terms.len())));
    let mut rows: HashMap<Exps, IPoly> = HashMap::new();
    let mut out_order: Vec<Exps> = Vec::new();
    for mut f in polys {
        while !f.is_zero() {
            match rows.get(f.lm()) {
                None => break,
                Some(r) => {
                    let gcd = f.lc().gcd(r.lc());
                    let a = r.lc() / &gcd;
                    let b = f.lc() / &gcd;
                    let terms = combine(&f.terms[1..], &a, &r.terms[1..], &b, &vec![0; f.lm().len()], order);
                    f = IPoly { terms };
                    f.make_primitive();
                }
            }
        }
        if !f.is_zero() {
            let key: Exps = f.lm().into();
            out_order.push(key.clone());
            rows.insert(key, f);
        }
    }
    out_order.into_iter().map(|k| rows.remove(&k).unwrap()).collect()
}

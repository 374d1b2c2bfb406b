use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::order::{Monomial, MonomialOrder};
use super::varset::{check_same, Ring};
use super::PolyError;

pub type Coeff = BigRational;

/// Multivariate polynomial over QQ in canonical form: a map from monomials
/// to nonzero rational coefficients.
#[derive(Clone, Debug)]
pub struct Polynomial {
    ring: Ring,
    terms: BTreeMap<Monomial, Coeff>,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        self.ring.same_vars(&other.ring) && self.terms == other.terms
    }
}

impl Eq for Polynomial {}

impl std::hash::Hash for Polynomial {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.terms.hash(state);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

/// Checked ring arithmetic: fails with `RingMismatch` when the operands live in different rings.
pub fn poly_arith(a: &Polynomial, b: &Polynomial, op: ArithOp) -> Result<Polynomial, PolyError> {
    check_same(&a.ring, &b.ring)?;
    Ok(match op {
        ArithOp::Add => a.add_unchecked(b),
        ArithOp::Sub => a.sub_unchecked(b),
        ArithOp::Mul => a.mul_unchecked(b)?,
    })
}

impl Polynomial {
    pub fn zero(ring: &Ring) -> Self {
        Polynomial { ring: ring.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(ring: &Ring, c: Coeff) -> Self {
        let mut p = Self::zero(ring);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(ring.len()), c);
        }
        p
    }

    pub fn one(ring: &Ring) -> Self {
        Self::constant(ring, Coeff::one())
    }

    pub fn from_int(ring: &Ring, c: i64) -> Self {
        Self::constant(ring, Coeff::from_integer(BigInt::from(c)))
    }

    pub fn var(ring: &Ring, i: usize) -> Self {
        assert!(i < ring.len(), "variable index out of range");
        Self::monomial(ring, Monomial::var(ring.len(), i), Coeff::one())
    }

    pub fn var_named(ring: &Ring, name: &str) -> Result<Self, PolyError> {
        ring.index_of(name)
            .map(|i| Self::var(ring, i))
            .ok_or_else(|| PolyError::UnknownVariable { name: name.to_string(), pos: 0 })
    }

    pub fn monomial(ring: &Ring, m: Monomial, c: Coeff) -> Self {
        assert_eq!(m.len(), ring.len(), "monomial length does not match ring");
        let mut p = Self::zero(ring);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    /// Sums the given terms; zero coefficients vanish.
    pub fn from_terms<I>(ring: &Ring, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, Coeff)>,
    {
        let mut p = Self::zero(ring);
        for (m, c) in terms {
            assert_eq!(m.len(), ring.len(), "monomial length does not match ring");
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Coeff) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coeff)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> Coeff {
        self.terms.get(m).cloned().unwrap_or_else(Coeff::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.iter().all(|(m, c)| m.is_one() && c.is_one())
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u64> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    /// True iff every term has total degree exactly one (the zero polynomial counts).
    pub fn is_linear_form(&self) -> bool {
        self.terms.keys().all(|m| m.degree() == 1)
    }

    /// Variables occurring with positive exponent.
    pub fn support(&self) -> Vec<usize> {
        let mut used = vec![false; self.ring.len()];
        for m in self.terms.keys() {
            for i in m.support() {
                used[i] = true;
            }
        }
        used.iter().enumerate().filter(|(_, u)| **u).map(|(i, _)| i).collect()
    }

    pub fn leading_term(&self, order: &MonomialOrder) -> Option<(&Monomial, &Coeff)> {
        self.terms.iter().max_by(|a, b| order.cmp(a.0, b.0))
    }

    pub fn leading_monomial(&self, order: &MonomialOrder) -> Option<&Monomial> {
        self.leading_term(order).map(|(m, _)| m)
    }

    /// Terms sorted descending under `order`.
    pub fn sorted_terms(&self, order: &MonomialOrder) -> Vec<(&Monomial, &Coeff)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| order.cmp(b.0, a.0));
        v
    }

    fn add_unchecked(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    fn sub_unchecked(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    fn mul_unchecked(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        let mut out = Polynomial::zero(&self.ring);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2)?, c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn try_add(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        poly_arith(self, other, ArithOp::Add)
    }

    pub fn try_sub(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        poly_arith(self, other, ArithOp::Sub)
    }

    pub fn try_mul(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        poly_arith(self, other, ArithOp::Mul)
    }

    pub fn scale(&self, c: &Coeff) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.ring);
        }
        Polynomial { ring: self.ring.clone(), terms: self.terms.iter().map(|(m, d)| (m.clone(), d * c)).collect() }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Result<Polynomial, PolyError> {
        let terms = self
            .terms
            .iter()
            .map(|(t, c)| Ok((t.mul(m)?, c.clone())))
            .collect::<Result<BTreeMap<_, _>, PolyError>>()?;
        Ok(Polynomial { ring: self.ring.clone(), terms })
    }

    pub fn pow(&self, k: u32) -> Result<Polynomial, PolyError> {
        let mut acc = Polynomial::one(&self.ring);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul_unchecked(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.mul_unchecked(&base)?;
            }
        }
        Ok(acc)
    }

    /// Drops every term containing one of `vars`; reduction modulo the ideal they generate.
    pub fn substitute_zero(&self, vars: &[usize]) -> Polynomial {
        Polynomial {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| vars.iter().all(|&v| m.exponents()[v] == 0))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Ring homomorphism sending variable `i` to `images[i]`; all images share a target ring.
    pub fn substitute(&self, target: &Ring, images: &[Polynomial]) -> Result<Polynomial, PolyError> {
        assert_eq!(images.len(), self.ring.len(), "one image per variable required");
        for im in images {
            check_same(target, im.ring())?;
        }
        let mut out = Polynomial::zero(target);
        let mut cache: Vec<Vec<Polynomial>> =
            images.iter().map(|im| vec![Polynomial::one(target), im.clone()]).collect();
        for (m, c) in &self.terms {
            let mut t = Polynomial::constant(target, c.clone());
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while cache[i].len() <= e as usize {
                    let next = cache[i].last().unwrap().mul_unchecked(&images[i])?;
                    cache[i].push(next);
                }
                t = t.mul_unchecked(&cache[i][e as usize])?;
            }
            out = out.add_unchecked(&t);
        }
        Ok(out)
    }

    /// Re-expresses the polynomial in `target`, matching variables by name.
    pub fn map_to_ring(&self, target: &Ring) -> Result<Polynomial, PolyError> {
        let map: Vec<usize> = self
            .ring
            .names()
            .iter()
            .enumerate()
            .map(|(i, n)| {
                let used = self.terms.keys().any(|m| m.exponents()[i] > 0);
                match target.index_of(n) {
                    Some(j) => Ok(j),
                    None if !used => Ok(usize::MAX),
                    None => Err(PolyError::UnknownVariable { name: n.clone(), pos: 0 }),
                }
            })
            .collect::<Result<_, _>>()?;
        let terms = self.terms.iter().map(|(m, c)| {
            let mut e = vec![0u32; target.len()];
            for (i, &x) in m.exponents().iter().enumerate() {
                if x > 0 {
                    e[map[i]] = x;
                }
            }
            (Monomial::from_exponents(e), c.clone())
        });
        Ok(Polynomial::from_terms(target, terms))
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Polynomial) -> Option<Polynomial> {
        if d.is_zero() {
            return None;
        }
        let order = MonomialOrder::DegRevLex;
        let (dm, dc) = d.leading_term(&order).map(|(m, c)| (m.clone(), c.clone()))?;
        let mut rem = self.clone();
        let mut quot = Polynomial::zero(&self.ring);
        while let Some((m, c)) = rem.leading_term(&order).map(|(m, c)| (m.clone(), c.clone())) {
            let q = dm.quotient_of(&m)?;
            let qc = c / &dc;
            let step = d.mul_monomial(&q).ok()?.scale(&qc);
            rem = rem.sub_unchecked(&step);
            quot.add_term(q, qc);
        }
        Some(quot)
    }

    /// Least common multiple of coefficient denominators times the polynomial,
    /// divided by the gcd of the resulting numerators, with positive leading
    /// coefficient under degrevlex. Generates the same ideal as `self`.
    pub fn primitive(&self) -> Polynomial {
        if self.is_zero() {
            return self.clone();
        }
        let den = self.terms.values().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let nums: Vec<BigInt> = self.terms.values().map(|c| c.numer() * (&den / c.denom())).collect();
        let mut g = nums.iter().fold(BigInt::zero(), |acc, n| acc.gcd(n));
        let lead = self.leading_term(&MonomialOrder::DegRevLex).unwrap().1;
        if lead.is_negative() {
            g = -g;
        }
        Polynomial {
            ring: self.ring.clone(),
            terms: self.terms.keys().cloned().zip(nums).map(|(m, n)| (m, Coeff::from_integer(n / &g))).collect(),
        }
    }

    /// Scales so the leading coefficient under `order` is one.
    pub fn monic(&self, order: &MonomialOrder) -> Polynomial {
        match self.leading_term(order) {
            None => self.clone(),
            Some((_, c)) => {
                let inv = c.recip();
                self.scale(&inv)
            }
        }
    }

    /// Whether `self` equals `other` up to a nonzero scalar.
    pub fn associated(&self, other: &Polynomial) -> bool {
        self.primitive() == other.primitive()
    }

    /// Coefficient of `x_var` when the polynomial is a linear form.
    pub fn linear_coefficient(&self, var: usize) -> Coeff {
        self.coeff(&Monomial::var(self.ring.len(), var))
    }

    /// Canonical textual form with terms in descending degrevlex order.
    pub fn to_canonical_string(&self) -> String {
        self.to_string()
    }
}

fn write_monomial(f: &mut fmt::Formatter<'_>, names: &[String], m: &Monomial) -> fmt::Result {
    let mut first = true;
    for (i, &e) in m.exponents().iter().enumerate() {
        if e == 0 {
            continue;
        }
        if !first {
            write!(f, "*")?;
        }
        first = false;
        if e == 1 {
            write!(f, "{}", names[i])?;
        } else {
            write!(f, "{}^{}", names[i], e)?;
        }
    }
    Ok(())
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let names = self.ring.names();
        for (k, (m, c)) in self.sorted_terms(&MonomialOrder::DegRevLex).into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if m.is_one() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write_monomial(f, names, m)?;
            } else {
                write!(f, "{abs}*")?;
                write_monomial(f, names, m)?;
            }
        }
        Ok(())
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.try_add(rhs).expect("polynomial addition")
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.try_sub(rhs).expect("polynomial subtraction")
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.try_mul(rhs).expect("polynomial multiplication")
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        Polynomial { ring: self.ring.clone(), terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect() }
    }
}

//! Ideal-level operations: membership, equality, sums, colon ideals,
//! saturation, elimination, intersection, radical membership, dimension and height.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use thiserror::Error;

use crate::groebner::{buchberger, leading_term_ideal, GroebnerBasis};
use crate::polyring::{check_same, Monomial, MonomialOrder, PolyError, Polynomial, Ring, VarSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdealError {
    #[error("colon or saturation by the zero ideal")]
    ZeroIdealDivisor,
    #[error("the ideal is the unit ideal")]
    UnitIdeal,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

type GbCache = RwLock<HashMap<MonomialOrder, Arc<GroebnerBasis>>>;

/// Finitely generated ideal with a per-order cache of reduced Groebner bases.
pub struct IdealHandle {
    ring: Ring,
    generators: Vec<Polynomial>,
    cache: GbCache,
}

impl Clone for IdealHandle {
    fn clone(&self) -> Self {
        let cache = self.cache.read().expect("gb cache poisoned").clone();
        IdealHandle { ring: self.ring.clone(), generators: self.generators.clone(), cache: RwLock::new(cache) }
    }
}

impl fmt::Debug for IdealHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IdealHandle").field("ring", &self.ring.names()).field("generators", &self.generators).finish()
    }
}

impl fmt::Display for IdealHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, g) in self.generators.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, ")")
    }
}

impl IdealHandle {
    /// Ideal generated by `generators`; zero generators are dropped.
    pub fn new(ring: &Ring, generators: Vec<Polynomial>) -> Result<Self, IdealError> {
        for g in &generators {
            check_same(ring, g.ring())?;
        }
        Ok(IdealHandle {
            ring: ring.clone(),
            generators: generators.into_iter().filter(|g| !g.is_zero()).collect(),
            cache: RwLock::new(HashMap::new()),
        })
    }

    pub fn zero(ring: &Ring) -> Self {
        IdealHandle { ring: ring.clone(), generators: Vec::new(), cache: RwLock::new(HashMap::new()) }
    }

    pub fn unit(ring: &Ring) -> Self {
        IdealHandle { ring: ring.clone(), generators: vec![Polynomial::one(ring)], cache: RwLock::new(HashMap::new()) }
    }

    /// Ideal generated by the listed variables.
    pub fn from_vars(ring: &Ring, vars: &[usize]) -> Self {
        IdealHandle {
            ring: ring.clone(),
            generators: vars.iter().map(|&v| Polynomial::var(ring, v)).collect(),
            cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.generators
    }

    pub fn is_zero(&self) -> bool {
        self.generators.is_empty()
    }

    /// Reduced Groebner basis under `order`, computed once and cached.
    pub fn gb(&self, order: MonomialOrder) -> Arc<GroebnerBasis> {
        if let Some(gb) = self.cache.read().expect("gb cache poisoned").get(&order) {
            return gb.clone();
        }
        let gb = Arc::new(buchberger(&self.ring, &self.generators, &order));
        self.cache.write().expect("gb cache poisoned").entry(order).or_insert(gb).clone()
    }

    pub fn is_unit(&self) -> bool {
        self.gb(MonomialOrder::DegRevLex).is_unit()
    }

    /// Generators of the reduced degrevlex basis, in primitive integer form.
    pub fn canonical_generators(&self) -> Vec<Polynomial> {
        self.gb(MonomialOrder::DegRevLex).generators().iter().map(Polynomial::primitive).collect()
    }

    pub fn sum(&self, other: &IdealHandle) -> Result<IdealHandle, IdealError> {
        check_same(&self.ring, &other.ring)?;
        let mut gens = self.generators.clone();
        gens.extend(other.generators.iter().cloned());
        IdealHandle::new(&self.ring, gens)
    }

    pub fn product(&self, other: &IdealHandle) -> Result<IdealHandle, IdealError> {
        check_same(&self.ring, &other.ring)?;
        let mut gens = Vec::new();
        for f in &self.generators {
            for g in &other.generators {
                gens.push(f.try_mul(g)?);
            }
        }
        IdealHandle::new(&self.ring, gens)
    }

    pub fn power(&self, k: u32) -> Result<IdealHandle, IdealError> {
        let mut acc = IdealHandle::unit(&self.ring);
        for _ in 0..k {
            acc = acc.product(self)?;
        }
        Ok(acc)
    }

    pub fn contains(&self, p: &Polynomial) -> bool {
        contains(self, p)
    }

    /// Whether every generator of `other` lies in `self`.
    pub fn contains_ideal(&self, other: &IdealHandle) -> bool {
        let gb = self.gb(MonomialOrder::DegRevLex);
        other.generators.iter().all(|g| gb.contains(g))
    }

    /// The same ideal over `target`, matching variables by name.
    pub fn map_to_ring(&self, target: &Ring) -> Result<IdealHandle, IdealError> {
        let gens = self.generators.iter().map(|g| g.map_to_ring(target)).collect::<Result<Vec<_>, _>>()?;
        IdealHandle::new(target, gens)
    }

    /// Image under a ring map given by variable images.
    pub fn substitute(&self, target: &Ring, images: &[Polynomial]) -> Result<IdealHandle, IdealError> {
        let gens = self.generators.iter().map(|g| g.substitute(target, images)).collect::<Result<Vec<_>, _>>()?;
        IdealHandle::new(target, gens)
    }
}

/// Membership test: `p` reduces to zero modulo the degrevlex basis of `ideal`.
pub fn contains(ideal: &IdealHandle, p: &Polynomial) -> bool {
    ideal.gb(MonomialOrder::DegRevLex).contains(p)
}

/// Mutual containment of generator sets.
pub fn ideal_equal(a: &IdealHandle, b: &IdealHandle) -> Result<bool, IdealError> {
    check_same(&a.ring, &b.ring)?;
    Ok(a.contains_ideal(b) && b.contains_ideal(a))
}

/// Ring with `front` variables prepended to `ring`, eliminating them first.
fn extended_ring(front: &[&str], ring: &Ring) -> Result<Ring, IdealError> {
    let mut fresh: Vec<String> = Vec::new();
    for base in front {
        let mut name = base.to_string();
        while ring.index_of(&name).is_some() || fresh.contains(&name) {
            name.push('_');
        }
        fresh.push(name);
    }
    Ok(VarSet::with_blocks(fresh, ring.names().to_vec())?)
}

/// `I ∩ k[kept]`: generators of the elimination ideal, in the ring of kept variables.
pub fn eliminate(ideal: &IdealHandle, drop: &[usize]) -> Result<IdealHandle, IdealError> {
    let ring = ideal.ring();
    let dropped: Vec<String> = drop.iter().map(|&i| ring.name(i).to_string()).collect();
    let kept: Vec<String> = (0..ring.len()).filter(|i| !drop.contains(i)).map(|i| ring.name(i).to_string()).collect();
    if kept.is_empty() {
        return Err(PolyError::InvalidVarSet("cannot eliminate every variable".into()).into());
    }
    let kept_ring = VarSet::new(kept.clone())?;
    if dropped.is_empty() {
        return ideal.map_to_ring(&kept_ring);
    }
    let block_ring = VarSet::with_blocks(dropped, kept)?;
    let lifted = ideal.map_to_ring(&block_ring)?;
    let order = block_ring.elimination_order().expect("block ring");
    eliminate_prefix(&lifted, order, &kept_ring)
}

fn eliminate_prefix(lifted: &IdealHandle, order: MonomialOrder, target: &Ring) -> Result<IdealHandle, IdealError> {
    let split = order.eliminated_block().expect("elimination order");
    let gb = lifted.gb(order);
    let gens = gb
        .generators()
        .iter()
        .filter(|g| g.support().iter().all(|&v| v >= split))
        .map(|g| g.map_to_ring(target))
        .collect::<Result<Vec<_>, _>>()?;
    IdealHandle::new(target, gens)
}

/// `I ∩ J` via `t*I + (1-t)*J` and elimination of `t`.
pub fn intersect(a: &IdealHandle, b: &IdealHandle) -> Result<IdealHandle, IdealError> {
    check_same(&a.ring, &b.ring)?;
    if a.is_zero() || b.is_zero() {
        return Ok(IdealHandle::zero(&a.ring));
    }
    let ring = &a.ring;
    let big = extended_ring(&["t"], ring)?;
    let t = Polynomial::var(&big, 0);
    let one_minus_t = &Polynomial::one(&big) - &t;
    let mut gens = Vec::new();
    for f in &a.generators {
        gens.push(&t * &f.map_to_ring(&big)?);
    }
    for g in &b.generators {
        gens.push(&one_minus_t * &g.map_to_ring(&big)?);
    }
    let lifted = IdealHandle::new(&big, gens)?;
    eliminate_prefix(&lifted, big.elimination_order().unwrap(), ring)
}

/// `I : (f)` as `(I ∩ (f)) / f`.
pub fn colon_by(ideal: &IdealHandle, f: &Polynomial) -> Result<IdealHandle, IdealError> {
    if f.is_zero() {
        return Err(IdealError::ZeroIdealDivisor);
    }
    let principal = IdealHandle::new(&ideal.ring, vec![f.clone()])?;
    let meet = intersect(ideal, &principal)?;
    let gens =
        meet.generators.iter().map(|g| g.div_exact(f).expect("intersection with (f) is divisible by f")).collect();
    IdealHandle::new(&ideal.ring, gens)
}

/// `I : J = ∩_f I : (f)` over the generators `f` of `J`.
pub fn colon(ideal: &IdealHandle, by: &IdealHandle) -> Result<IdealHandle, IdealError> {
    check_same(&ideal.ring, &by.ring)?;
    if by.is_zero() {
        return Err(IdealError::ZeroIdealDivisor);
    }
    let mut acc: Option<IdealHandle> = None;
    for f in &by.generators {
        let c = colon_by(ideal, f)?;
        acc = Some(match acc {
            None => c,
            Some(prev) => intersect(&prev, &c)?,
        });
    }
    Ok(reduce_generators(acc.unwrap()))
}

/// `I : f^∞` via `I + (1 - y*f)` and elimination of `y`.
pub fn saturate_by(ideal: &IdealHandle, f: &Polynomial) -> Result<IdealHandle, IdealError> {
    if f.is_zero() {
        return Err(IdealError::ZeroIdealDivisor);
    }
    let ring = &ideal.ring;
    let big = extended_ring(&["y"], ring)?;
    let y = Polynomial::var(&big, 0);
    let mut gens: Vec<Polynomial> = ideal.generators.iter().map(|g| g.map_to_ring(&big)).collect::<Result<_, _>>()?;
    gens.push(&Polynomial::one(&big) - &(&y * &f.map_to_ring(&big)?));
    let lifted = IdealHandle::new(&big, gens)?;
    eliminate_prefix(&lifted, big.elimination_order().unwrap(), ring)
}

/// `I : J^∞ = ∩_f I : f^∞` over the generators `f` of `J`.
pub fn saturate(ideal: &IdealHandle, by: &IdealHandle) -> Result<IdealHandle, IdealError> {
    check_same(&ideal.ring, &by.ring)?;
    if by.is_zero() {
        return Err(IdealError::ZeroIdealDivisor);
    }
    let mut acc: Option<IdealHandle> = None;
    for f in &by.generators {
        let s = saturate_by(ideal, f)?;
        acc = Some(match acc {
            None => s,
            Some(prev) => intersect(&prev, &s)?,
        });
    }
    Ok(reduce_generators(acc.unwrap()))
}

/// Iterated colon `I : J^k` until it stabilizes.
#[derive(Clone, Debug)]
pub struct ColonChain {
    /// `steps[k] = I : J^k`, with `steps[0] = I`; the last entry is the saturation.
    pub steps: Vec<IdealHandle>,
    /// Smallest `N` with `I : J^N = I : J^∞`.
    pub exponent: usize,
}

pub fn saturate_iterated(ideal: &IdealHandle, by: &IdealHandle, max_steps: usize) -> Result<ColonChain, IdealError> {
    let mut steps = vec![ideal.clone()];
    for _ in 0..max_steps {
        let last = steps.last().unwrap();
        let next = colon(last, by)?;
        if ideal_equal(last, &next)? {
            let exponent = steps.len() - 1;
            return Ok(ColonChain { steps, exponent });
        }
        steps.push(next);
    }
    let exponent = steps.len() - 1;
    Ok(ColonChain { steps, exponent })
}

/// Rabinowitsch test: `f ∈ √I` iff `1 ∈ I + (1 - y*f)`.
pub fn radical_member(f: &Polynomial, ideal: &IdealHandle) -> Result<bool, IdealError> {
    check_same(&ideal.ring, f.ring())?;
    let big = extended_ring(&["y"], &ideal.ring)?;
    let y = Polynomial::var(&big, 0);
    let mut gens: Vec<Polynomial> = ideal.generators.iter().map(|g| g.map_to_ring(&big)).collect::<Result<_, _>>()?;
    gens.push(&Polynomial::one(&big) - &(&y * &f.map_to_ring(&big)?));
    Ok(IdealHandle::new(&big, gens)?.is_unit())
}

/// Krull dimension of `ring / I` from the degrevlex initial ideal.
pub fn dimension(ideal: &IdealHandle) -> Result<usize, IdealError> {
    let gb = ideal.gb(MonomialOrder::DegRevLex);
    if gb.is_unit() {
        return Err(IdealError::UnitIdeal);
    }
    let n = ideal.ring.len();
    let supports: Vec<u64> =
        leading_term_ideal(&gb).iter().map(|m| m.support().fold(0u64, |acc, i| acc | (1 << i))).collect();
    assert!(n <= 63, "dimension search supports at most 63 variables");
    Ok(max_independent_set(n, &supports))
}

/// Largest `S ⊆ {0..n}` such that no support mask lies inside `S`.
fn max_independent_set(n: usize, supports: &[u64]) -> usize {
    fn search(var: usize, n: usize, chosen: u64, size: usize, best: &mut usize, supports: &[u64]) {
        if size + (n - var) <= *best {
            return;
        }
        if var == n {
            *best = size;
            return;
        }
        let with = chosen | (1 << var);
        if !supports.iter().any(|&s| s & !with == 0) {
            search(var + 1, n, with, size + 1, best, supports);
        }
        search(var + 1, n, chosen, size, best, supports);
    }
    let mut best = 0;
    search(0, n, 0, 0, &mut best, supports);
    best
}

/// Codimension: number of variables minus the Krull dimension.
pub fn height(ideal: &IdealHandle) -> Result<usize, IdealError> {
    Ok(ideal.ring.len() - dimension(ideal)?)
}

/// Lower bound on the height without a Groebner basis: the initial ideal
/// contains the leading monomials of the generators, for any order. Tries
/// lex and degrevlex under every rotation of the variables and its reverse.
pub fn height_lower_bound(ideal: &IdealHandle) -> usize {
    let n = ideal.ring.len();
    if ideal.generators.is_empty() {
        return 0;
    }
    if ideal.generators.iter().any(Polynomial::is_constant) {
        return n;
    }
    let mut best = 0;
    for shift in 0..n {
        for reversed in [false, true] {
            let perm: Vec<usize> =
                (0..n).map(|i| if reversed { (n - 1 - i + shift) % n } else { (i + shift) % n }).collect();
            for graded in [true, false] {
                let supports: Vec<u64> = ideal
                    .generators
                    .iter()
                    .map(|g| {
                        let lead = g.terms().map(|(m, _)| m).max_by(|a, b| permuted_cmp(a, b, &perm, graded)).unwrap();
                        lead.support().fold(0u64, |acc, i| acc | (1 << i))
                    })
                    .collect();
                best = best.max(n - max_independent_set(n, &supports));
                if best == n {
                    return n;
                }
            }
        }
    }
    best
}

/// Lex (or degrevlex when `graded`) with variables ranked by `perm`.
fn permuted_cmp(a: &Monomial, b: &Monomial, perm: &[usize], graded: bool) -> std::cmp::Ordering {
    let (ea, eb) = (a.exponents(), b.exponents());
    if graded {
        a.degree().cmp(&b.degree()).then_with(|| {
            perm.iter().rev().map(|&v| eb[v].cmp(&ea[v])).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
        })
    } else {
        perm.iter().map(|&v| ea[v].cmp(&eb[v])).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
    }
}

/// A set of `k` variables whose ideal contains `I`, if one exists; it bounds
/// the height of `I` by `k`. Subsets are tried in lexicographic order.
pub fn variable_prime_containing(ideal: &IdealHandle, k: usize) -> Option<Vec<usize>> {
    let n = ideal.ring.len();
    if k > n {
        return None;
    }
    let mut subset: Vec<usize> = (0..k).collect();
    loop {
        if ideal.generators.iter().all(|g| g.substitute_zero(&subset).is_zero()) {
            return Some(subset);
        }
        let mut i = k;
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            if subset[i] < n - k + i {
                break;
            }
        }
        subset[i] += 1;
        for j in i + 1..k {
            subset[j] = subset[j - 1] + 1;
        }
    }
}

/// Certifies `√I = (vars)`: every generator lies in `(vars)` and every listed
/// variable is in `√I`. When true, `(vars)` is the unique minimal prime of `I`.
pub fn radical_equals_variable_prime(ideal: &IdealHandle, vars: &[usize]) -> Result<bool, IdealError> {
    if vars.is_empty() {
        return Ok(false);
    }
    if !ideal.generators.iter().all(|g| g.substitute_zero(vars).is_zero()) {
        return Ok(false);
    }
    for &v in vars {
        if !radical_member(&Polynomial::var(&ideal.ring, v), ideal)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Replaces the generators by the reduced degrevlex basis (same ideal).
fn reduce_generators(ideal: IdealHandle) -> IdealHandle {
    let gb = ideal.gb(MonomialOrder::DegRevLex);
    let gens = gb.generators().iter().map(Polynomial::primitive).collect();
    let out = IdealHandle { ring: ideal.ring.clone(), generators: gens, cache: RwLock::new(HashMap::new()) };
    out.cache.write().unwrap().insert(MonomialOrder::DegRevLex, gb);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::parse_poly;

    fn ring3() -> Ring {
        VarSet::new(["x", "y", "z"]).unwrap()
    }

    fn ideal(ring: &Ring, gens: &[&str]) -> IdealHandle {
        IdealHandle::new(ring, gens.iter().map(|s| parse_poly(s, ring).unwrap()).collect()).unwrap()
    }

    #[test]
    fn membership_and_equality() {
        let r = ring3();
        assert!(ideal(&r, &["x", "y"]).contains(&parse_poly("x + y", &r).unwrap()));
        assert!(!ideal(&r, &["x^2"]).contains(&parse_poly("x", &r).unwrap()));
        assert!(ideal_equal(&ideal(&r, &["x", "y"]), &ideal(&r, &["x + y", "y"])).unwrap());
        assert!(!ideal_equal(&ideal(&r, &["x"]), &ideal(&r, &["x^2"])).unwrap());
    }

    #[test]
    fn colon_examples() {
        let r = ring3();
        let c = colon(&ideal(&r, &["x^2"]), &ideal(&r, &["x"])).unwrap();
        assert!(ideal_equal(&c, &ideal(&r, &["x"])).unwrap());
        let c = colon(&ideal(&r, &["x*y", "x*z"]), &ideal(&r, &["x"])).unwrap();
        assert!(ideal_equal(&c, &ideal(&r, &["y", "z"])).unwrap());
        assert_eq!(colon(&ideal(&r, &["x"]), &IdealHandle::zero(&r)).unwrap_err(), IdealError::ZeroIdealDivisor);
    }

    #[test]
    fn saturation_examples() {
        let r = ring3();
        let s = saturate(&ideal(&r, &["x*y", "x*z"]), &ideal(&r, &["x"])).unwrap();
        assert!(ideal_equal(&s, &ideal(&r, &["y", "z"])).unwrap());
        let chain = saturate_iterated(&ideal(&r, &["x^3*y"]), &ideal(&r, &["x"]), 10).unwrap();
        assert_eq!(chain.exponent, 3);
        assert!(ideal_equal(chain.steps.last().unwrap(), &ideal(&r, &["y"])).unwrap());
        assert_eq!(saturate(&ideal(&r, &["x"]), &IdealHandle::zero(&r)).unwrap_err(), IdealError::ZeroIdealDivisor);
    }

    #[test]
    fn elimination_examples() {
        let r = ring3();
        let e = eliminate(&ideal(&r, &["x^2 - y", "x^3 - z"]), &[0]).unwrap();
        let yz = VarSet::new(["y", "z"]).unwrap();
        assert!(ideal_equal(&e, &ideal(&yz, &["y^3 - z^2"])).unwrap());
        let e = eliminate(&ideal(&r, &["x"]), &[0]).unwrap();
        assert!(e.is_zero());
        let ryxz = VarSet::new(["y", "x", "z"]).unwrap();
        let e = eliminate(&ideal(&ryxz, &["1 - y*x", "x*z"]), &[0]).unwrap();
        let xz = VarSet::new(["x", "z"]).unwrap();
        assert!(ideal_equal(&e, &ideal(&xz, &["z"])).unwrap());
    }

    #[test]
    fn intersection_examples() {
        let r = ring3();
        let i = intersect(&ideal(&r, &["x"]), &ideal(&r, &["y"])).unwrap();
        assert!(ideal_equal(&i, &ideal(&r, &["x*y"])).unwrap());
        let i = intersect(&ideal(&r, &["x", "y"]), &ideal(&r, &["x"])).unwrap();
        assert!(ideal_equal(&i, &ideal(&r, &["x"])).unwrap());
        let i = intersect(&ideal(&r, &["x^2"]), &ideal(&r, &["x"])).unwrap();
        assert!(ideal_equal(&i, &ideal(&r, &["x^2"])).unwrap());
    }

    #[test]
    fn radical_membership() {
        let r = ring3();
        let x = parse_poly("x", &r).unwrap();
        assert!(radical_member(&x, &ideal(&r, &["x^2"])).unwrap());
        assert!(!radical_member(&x, &ideal(&r, &["y"])).unwrap());
        assert!(radical_equals_variable_prime(&ideal(&r, &["x^2", "x*y"]), &[0]).unwrap());
        assert!(!radical_equals_variable_prime(&ideal(&r, &["x*y"]), &[0]).unwrap());
    }

    #[test]
    fn dimension_and_height() {
        let r = ring3();
        assert_eq!(dimension(&ideal(&r, &["x"])).unwrap(), 2);
        assert_eq!(dimension(&ideal(&r, &["x*y", "x*z"])).unwrap(), 2);
        assert_eq!(height(&ideal(&r, &["x", "y"])).unwrap(), 2);
        assert_eq!(dimension(&IdealHandle::zero(&r)).unwrap(), 3);
        assert_eq!(dimension(&ideal(&r, &["x", "y", "z"])).unwrap(), 0);
        assert_eq!(dimension(&ideal(&r, &["x", "x - 1"])).unwrap_err(), IdealError::UnitIdeal);
    }
}

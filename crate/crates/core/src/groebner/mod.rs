//! Division algorithm, Buchberger's algorithm with the Gebauer-Moeller
//! installation of the product and chain criteria, and reduced bases.

mod engine;

use std::cmp::Ordering;

use num_rational::BigRational;

use crate::polyring::{Monomial, MonomialOrder, Polynomial, Ring};
use engine::{coprime, degree, divides, lcm, linear_interreduce, reduce, spoly, Exps, IPoly, Reducer};

/// Reduced Groebner basis: monic generators, sorted ascending by leading monomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroebnerBasis {
    ring: Ring,
    generators: Vec<Polynomial>,
    order: MonomialOrder,
    reduced: bool,
}

impl GroebnerBasis {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.generators
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// True iff the basis generates the unit ideal.
    pub fn is_unit(&self) -> bool {
        self.generators.iter().any(|g| !g.is_zero() && g.is_constant())
    }

    pub fn leading_monomials(&self) -> Vec<Monomial> {
        self.generators.iter().map(|g| g.leading_monomial(&self.order).unwrap().clone()).collect()
    }

    /// Remainder of `p` modulo the basis.
    pub fn reduce(&self, p: &Polynomial) -> Polynomial {
        normal_form(p, &self.generators, &self.order)
    }

    pub fn contains(&self, p: &Polynomial) -> bool {
        self.reduce(p).is_zero()
    }
}

/// Remainder of `p` on division by `divisors`, reducing every term and
/// always using the first divisor (in sequence order) whose leading term divides.
pub fn normal_form(p: &Polynomial, divisors: &[Polynomial], order: &MonomialOrder) -> Polynomial {
    if p.is_zero() {
        return p.clone();
    }
    let ipolys: Vec<IPoly> = divisors.iter().filter(|g| !g.is_zero()).map(|g| IPoly::from_poly(g, order)).collect();
    let reducers: Vec<Reducer<'_>> = ipolys.iter().map(Reducer::new).collect();
    // from_poly divides by a scalar; undo it through the tracked scale.
    let ip = IPoly::from_poly(p, order);
    let lead_ratio = {
        let (m, c) = p.leading_term(order).unwrap();
        let ic = &ip.terms.iter().find(|(e, _)| &e[..] == m.exponents()).unwrap().1;
        c / BigRational::from_integer(ic.clone())
    };
    let (r, scale) = reduce(ip, &reducers, order, true);
    if r.is_zero() {
        return Polynomial::zero(p.ring());
    }
    let factor = lead_ratio / scale;
    Polynomial::from_terms(
        p.ring(),
        r.terms
            .iter()
            .map(|(e, c)| (Monomial::from_exponents(e.to_vec()), BigRational::from_integer(c.clone()) * &factor)),
    )
}

#[derive(Clone, Debug)]
struct Pair {
    i: usize,
    j: usize,
    lcm: Exps,
    sugar: u64,
}

struct State<'o> {
    order: &'o MonomialOrder,
    polys: Vec<IPoly>,
    sugars: Vec<u64>,
    active: Vec<usize>,
    pairs: Vec<Pair>,
}

impl<'o> State<'o> {
    fn pair(&self, i: usize, j: usize) -> Pair {
        let (a, b) = (self.polys[i].lm(), self.polys[j].lm());
        let l = lcm(a, b);
        let d = degree(&l);
        let sugar = (self.sugars[i] + d - degree(a)).max(self.sugars[j] + d - degree(b));
        Pair { i: i.min(j), j: i.max(j), lcm: l, sugar }
    }

    /// Gebauer-Moeller update after adding polynomial `h` (already stored).
    fn update(&mut self, h: usize) {
        let hl: Exps = self.polys[h].lm().into();
        let mut c: Vec<Pair> = self.active.iter().map(|&g| self.pair(h, g)).collect();
        let coprime_with_h = |p: &Pair, polys: &[IPoly]| {
            let other = if p.i == h { p.j } else { p.i };
            coprime(&hl, polys[other].lm())
        };
        // Chain criterion among new pairs.
        let mut d: Vec<Pair> = Vec::new();
        while let Some(p) = (!c.is_empty()).then(|| c.remove(0)) {
            let keep = coprime_with_h(&p, &self.polys)
                || (!c.iter().any(|q| divides(&q.lcm, &p.lcm)) && !d.iter().any(|q| divides(&q.lcm, &p.lcm)));
            if keep {
                d.push(p);
            }
        }
        // Product criterion.
        let e: Vec<Pair> = d.into_iter().filter(|p| !coprime_with_h(p, &self.polys)).collect();
        // Chain criterion on old pairs.
        let polys = &self.polys;
        self.pairs.retain(|p| {
            !divides(&hl, &p.lcm) || lcm(polys[p.i].lm(), &hl) == p.lcm || lcm(polys[p.j].lm(), &hl) == p.lcm
        });
        self.pairs.extend(e);
        self.active.retain(|&g| !divides(&hl, polys[g].lm()));
        self.active.push(h);
    }

    fn add(&mut self, p: IPoly, sugar: u64) {
        self.polys.push(p);
        self.sugars.push(sugar);
        self.update(self.polys.len() - 1);
    }

    fn select(&mut self) -> Option<Pair> {
        if self.pairs.is_empty() {
            return None;
        }
        let order = self.order;
        let best = (0..self.pairs.len())
            .min_by(|&a, &b| {
                let (p, q) = (&self.pairs[a], &self.pairs[b]);
                p.sugar
                    .cmp(&q.sugar)
                    .then(degree(&p.lcm).cmp(&degree(&q.lcm)))
                    .then_with(|| order.cmp_exps(&p.lcm, &q.lcm))
                    .then((p.i, p.j).cmp(&(q.i, q.j)))
            })
            .unwrap();
        Some(self.pairs.swap_remove(best))
    }
}

/// Reduced Groebner basis of the ideal generated by `gens` under `order`.
///
/// The result is independent of the order of `gens`.
pub fn buchberger(ring: &Ring, gens: &[Polynomial], order: &MonomialOrder) -> GroebnerBasis {
    let mut input: Vec<IPoly> = gens
        .iter()
        .filter(|g| !g.is_zero())
        .map(|g| {
            assert!(g.ring().same_vars(ring), "generator ring mismatch");
            IPoly::from_poly(g, order)
        })
        .collect();
    let unit = |ring: &Ring| GroebnerBasis {
        ring: ring.clone(),
        generators: vec![Polynomial::one(ring)],
        order: *order,
        reduced: true,
    };
    if input.iter().any(IPoly::is_constant) {
        return unit(ring);
    }
    input = linear_interreduce(input, order);
    // Deterministic insertion: ascending leading monomial, then term count.
    input.sort_by(|a, b| {
        order.cmp_exps(a.lm(), b.lm()).then(a.terms.len().cmp(&b.terms.len())).then_with(|| cmp_terms(a, b, order))
    });

    let mut st = State { order, polys: Vec::new(), sugars: Vec::new(), active: Vec::new(), pairs: Vec::new() };
    for f in input {
        let s = f.sugar();
        st.add(f, s);
    }
    while let Some(p) = st.select() {
        let s = spoly(&st.polys[p.i], &st.polys[p.j], order);
        if s.is_zero() {
            continue;
        }
        let (h, _) = {
            let reducers: Vec<Reducer<'_>> = st.active.iter().map(|&g| Reducer::new(&st.polys[g])).collect();
            reduce(s, &reducers, order, true)
        };
        if h.is_zero() {
            continue;
        }
        if h.is_constant() {
            return unit(ring);
        }
        st.add(h, p.sugar);
    }

    // Interreduce the minimal basis.
    let mut minimal: Vec<IPoly> = st.active.iter().map(|&g| st.polys[g].clone()).collect();
    minimal.sort_by(|a, b| order.cmp_exps(a.lm(), b.lm()));
    let mut kept: Vec<IPoly> = Vec::with_capacity(minimal.len());
    for f in minimal {
        if !kept.iter().any(|g| divides(g.lm(), f.lm())) {
            kept.push(f);
        }
    }
    let minimal = kept;
    let mut reduced = Vec::with_capacity(minimal.len());
    for k in 0..minimal.len() {
        let others: Vec<Reducer<'_>> =
            minimal.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, g)| Reducer::new(g)).collect();
        let (r, _) = reduce(minimal[k].clone(), &others, order, true);
        reduced.push(r.to_monic_poly(ring));
    }
    GroebnerBasis { ring: ring.clone(), generators: reduced, order: *order, reduced: true }
}

fn cmp_terms(a: &IPoly, b: &IPoly, order: &MonomialOrder) -> Ordering {
    for (x, y) in a.terms.iter().zip(&b.terms) {
        let o = order.cmp_exps(&x.0, &y.0).then_with(|| x.1.cmp(&y.1));
        if o != Ordering::Equal {
            return o;
        }
    }
    a.terms.len().cmp(&b.terms.len())
}

/// Minimal monomial generators of the initial ideal of a reduced basis.
pub fn leading_term_ideal(gb: &GroebnerBasis) -> Vec<Monomial> {
    let lms = gb.leading_monomials();
    lms.iter()
        .enumerate()
        .filter(|(i, m)| !lms.iter().enumerate().any(|(j, n)| j != *i && n.divides(m) && n != *m))
        .map(|(_, m)| m.clone())
        .collect()
}

/// S-polynomial over QQ, exposed for criterion checks.
pub fn s_polynomial(f: &Polynomial, g: &Polynomial, order: &MonomialOrder) -> Polynomial {
    let (fm, fc) = f.leading_term(order).expect("nonzero");
    let (gm, gc) = g.leading_term(order).expect("nonzero");
    let l = fm.lcm(gm);
    let tf = fm.quotient_of(&l).unwrap();
    let tg = gm.quotient_of(&l).unwrap();
    let a = f.mul_monomial(&tf).unwrap().scale(&fc.recip());
    let b = g.mul_monomial(&tg).unwrap().scale(&gc.recip());
    &a - &b
}

//! Randomized invariants of the algebra kernel, the matrix layer, the
//! hypothesis checks and the Rees contexts.

mod common;

use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};
use reeskit::cli::fixtures::fixture;
use reeskit::groebner::{buchberger, normal_form};
use reeskit::hypotheses::{check_gs, check_setting, find_distinguished_prime, PresentationInput};
use reeskit::ideal_ops::{
    colon, colon_by, eliminate, height, height_lower_bound, ideal_equal, intersect, radical_equals_variable_prime,
    saturate, variable_prime_containing, IdealHandle,
};
use reeskit::polymatrix::{extract_linear_coeffs, minors, rank, rank_mod_vars, rational, PolyMatrix, QMatrix};
use reeskit::polyring::{parse_poly, BlockKind, Monomial, MonomialOrder, Polynomial};
use reeskit::rees::{build_context_unchecked, defining_ideal_closed_form, pull_back};

use common::*;

fn config(cases: u32, seed: u64) -> Config {
    Config { cases, rng_seed: RngSeed::Fixed(seed), failure_persistence: None, ..Config::default() }
}

fn orders() -> Vec<MonomialOrder> {
    vec![
        MonomialOrder::DegRevLex,
        MonomialOrder::Lex,
        MonomialOrder::Block { split: 2, first: BlockKind::Lex, second: BlockKind::DegRevLex },
        MonomialOrder::Block { split: 1, first: BlockKind::DegRevLex, second: BlockKind::Lex },
    ]
}

fn xyzw() -> reeskit::polyring::Ring {
    ring(&["x", "y", "z", "w"])
}

fn f1() -> PresentationInput {
    fixture("F1").unwrap().doc.presentation().unwrap()
}

proptest! {
    #![proptest_config(config(128, 11))]

    #[test]
    fn addition_is_canonical(a in raw_poly(4, 3, 5), b in raw_poly(4, 3, 5)) {
        let r = xyzw();
        let (p, q) = (poly(&r, &a), poly(&r, &b));
        prop_assert_eq!((&p + &q).to_canonical_string(), (&q + &p).to_canonical_string());
    }

    #[test]
    fn print_then_parse_is_identity(a in raw_poly(4, 3, 6)) {
        let r = xyzw();
        let p = poly(&r, &a);
        prop_assert_eq!(parse_poly(&p.to_string(), &r).unwrap(), p.clone());
        prop_assert_eq!(parse_poly(&p.to_canonical_string(), &r).unwrap(), p);
    }

    #[test]
    fn order_laws(u in prop::collection::vec(0u32..4, 4), v in prop::collection::vec(0u32..4, 4), w in prop::collection::vec(0u32..4, 4)) {
        let (u, v, w) = (Monomial::from_exponents(u), Monomial::from_exponents(v), Monomial::from_exponents(w));
        let one = Monomial::one(4);
        for order in orders() {
            let c = order.cmp(&u, &v);
            prop_assert_eq!(c, order.cmp(&v, &u).reverse());
            prop_assert_eq!(c == std::cmp::Ordering::Equal, u == v);
            prop_assert_eq!(order.cmp(&u.mul(&w).unwrap(), &v.mul(&w).unwrap()), c);
            prop_assert!(order.cmp(&one, &u) != std::cmp::Ordering::Greater);
        }
    }

    #[test]
    fn block_order_eliminates(u in prop::collection::vec(0u32..4, 4), v in prop::collection::vec(0u32..4, 2)) {
        let order = MonomialOrder::Block { split: 2, first: BlockKind::Lex, second: BlockKind::DegRevLex };
        let kept = Monomial::from_exponents(vec![0, 0, v[0], v[1]]);
        let any = Monomial::from_exponents(u.clone());
        if u[0] + u[1] > 0 {
            prop_assert_eq!(order.cmp(&any, &kept), std::cmp::Ordering::Greater);
        }
    }
}

proptest! {
    #![proptest_config(config(64, 12))]

    #[test]
    fn basis_generates_and_is_stable(raw in raw_ideal(3, 1, 3, 3)) {
        let r = ring(&["x", "y", "z"]);
        let gens: Vec<Polynomial> = raw.iter().map(|t| poly(&r, t)).filter(|g| !g.is_zero()).collect();
        for order in [MonomialOrder::DegRevLex, MonomialOrder::Lex] {
            let gb = buchberger(&r, &gens, &order);
            for g in &gens {
                prop_assert!(normal_form(g, gb.generators(), &order).is_zero());
            }
            let again = buchberger(&r, gb.generators(), &order);
            prop_assert_eq!(again.generators(), gb.generators());
        }
    }

    #[test]
    fn elimination_is_sound(raw in raw_ideal(3, 1, 3, 3)) {
        let r = ring(&["x", "y", "z"]);
        let i = ideal(&r, &raw);
        let e = eliminate(&i, &[0]).unwrap();
        prop_assert!(e.ring().index_of("x").is_none());
        for g in e.generators() {
            prop_assert!(i.contains(&g.map_to_ring(&r).unwrap()));
        }
    }

    #[test]
    fn colon_agrees_with_generatorwise_intersection(ri in raw_ideal(3, 1, 3, 2), rj in raw_ideal(3, 1, 2, 2)) {
        let r = ring(&["x", "y", "z"]);
        let (i, j) = (ideal(&r, &ri), ideal(&r, &rj));
        prop_assume!(!j.is_zero());
        let whole = colon(&i, &j).unwrap();
        let mut pieces = IdealHandle::unit(&r);
        for f in j.generators() {
            pieces = intersect(&pieces, &colon_by(&i, f).unwrap()).unwrap();
        }
        prop_assert!(ideal_equal(&whole, &pieces).unwrap());
        prop_assert!(i.contains_ideal(&whole.product(&j).unwrap()));
    }

    #[test]
    fn variable_prime_certificate_implies_height(
        raw in raw_ideal(3, 1, 2, 2),
        powers in prop::collection::vec(1u32..=3, 2),
        k in 1usize..=2,
    ) {
        let r = ring(&["x", "y", "z"]);
        let s: Vec<usize> = (0..k).collect();
        let mut gens: Vec<Polynomial> = s.iter().map(|&v| Polynomial::var(&r, v).pow(powers[v]).unwrap()).collect();
        gens.extend(raw.iter().map(|t| &poly(&r, t) * &Polynomial::var(&r, 0)));
        let i = IdealHandle::new(&r, gens).unwrap();
        if radical_equals_variable_prime(&i, &s).unwrap() {
            prop_assert_eq!(height(&i).unwrap(), k);
        }
        let other = ideal(&r, &raw);
        if !other.is_unit() && radical_equals_variable_prime(&other, &s).unwrap() {
            prop_assert_eq!(height(&other).unwrap(), k);
        }
    }

    #[test]
    fn cheap_height_bounds_bracket_the_height(raw in raw_ideal(4, 2, 3, 4)) {
        let r = ring(&["w", "x", "y", "z"]);
        let i = ideal(&r, &raw);
        prop_assume!(!i.is_zero() && !i.is_unit());
        let h = height(&i).unwrap();
        prop_assert!(height_lower_bound(&i) <= h);
        for k in 1..=4 {
            if let Some(vars) = variable_prime_containing(&i, k) {
                prop_assert!(h <= k);
                prop_assert!(IdealHandle::from_vars(&r, &vars).contains_ideal(&i));
            }
        }
    }

    #[test]
    fn saturation_contains_colon(ri in raw_ideal(3, 1, 3, 2), rj in raw_ideal(3, 1, 2, 1)) {
        let r = ring(&["x", "y", "z"]);
        let (i, j) = (ideal(&r, &ri), ideal(&r, &rj));
        prop_assume!(!j.is_zero());
        let sat = saturate(&i, &j).unwrap();
        prop_assert!(sat.contains_ideal(&colon(&i, &j).unwrap()));
        prop_assert!(ideal_equal(&colon(&sat, &j).unwrap(), &sat).unwrap());
    }
}

proptest! {
    #![proptest_config(config(48, 13))]

    #[test]
    fn fitting_chain_and_ranks(raw in raw_linear_matrix(4, 3, 3)) {
        let r = ring(&["x", "y", "z"]);
        let m = linear_matrix(&r, &raw);
        let p = PresentationInput::new(m.clone(), 1).unwrap();
        for i in 0..4 {
            prop_assert!(p.fitting(i + 1).unwrap().contains_ideal(&p.fitting(i).unwrap()));
        }
        let full = rank(&m);
        prop_assert_eq!(rank_mod_vars(&m, &[]), full);
        prop_assert!(full <= 3);
        for t in 1..=3 {
            prop_assert_eq!(minors(&m, t).unwrap().is_zero(), t > full);
        }
        prop_assert!(rank_mod_vars(&m, &[0]) <= full);
    }

    #[test]
    fn linear_coefficients_reassemble(raw in raw_linear_matrix(3, 4, 3)) {
        let r = ring(&["x", "y", "z"]);
        let m = linear_matrix(&r, &raw);
        let lc = extract_linear_coeffs(&m, &[0, 1, 2]).unwrap();
        prop_assert_eq!(lc.reassemble(&r), m);
    }

    #[test]
    fn gs_is_monotone(raw in raw_linear_matrix(4, 3, 3)) {
        let r = ring(&["x", "y", "z"]);
        let p = PresentationInput::new(linear_matrix(&r, &raw), 1).unwrap();
        let holds: Vec<bool> = (1..=3).map(|s| check_gs(&p, s).unwrap()).collect();
        for s in 1..holds.len() {
            prop_assert!(holds[s - 1] || !holds[s]);
        }
        if let Ok(vars) = find_distinguished_prime(&p) {
            prop_assert_eq!(vars.len(), 2);
            prop_assert_eq!(p.fitting_height(2).unwrap(), Some(2));
        }
    }
}

/// `U * phi(A x) * V` for the first fixture with random invertible `A`, `U`,
/// `V`, together with `A^{-1}` and `U * phi(x) * V`.
fn moved_f1() -> impl Strategy<Value = (PresentationInput, QMatrix, PresentationInput)> {
    (invertible(3), invertible(4), invertible(3)).prop_map(|(a, u, v)| {
        let base = f1();
        let moved = base.with_coordinate_change(&a).unwrap();
        let p = PresentationInput::new(moved.matrix().scalar_left(&u).scalar_right(&v), 1).unwrap();
        let still = PresentationInput::new(base.matrix().scalar_left(&u).scalar_right(&v), 1).unwrap();
        (p, rational::inverse(&a).unwrap(), still)
    })
}

proptest! {
    #![proptest_config(config(12, 14))]

    #[test]
    fn hypotheses_are_invariant_and_normalization_is_exact((p, undo, still) in moved_f1()) {
        prop_assert!(check_setting(&still, None).unwrap().all_pass());
        let report = check_setting(&p, Some(&undo)).unwrap();
        prop_assert!(report.all_pass(), "{:?}", report.first_failure());
        let again = check_setting(&p, Some(&undo)).unwrap();
        prop_assert_eq!(report.to_json(), again.to_json());
        let nz = report.normalized.as_ref().unwrap();
        let q = &nz.presentation;
        let d = q.d();
        let (n, m) = (q.n(), q.m());
        let prime: Vec<usize> = (0..d - 1).collect();
        let reduced = q.matrix().substitute_zero(&prime);
        for i in 0..n {
            for j in 0..m {
                let entry = reduced.entry(i, j);
                if (i, j) == (n - 1, m - 1) {
                    prop_assert_eq!(entry, &Polynomial::var(q.ring(), d - 1));
                } else {
                    prop_assert!(entry.is_zero());
                }
            }
        }
        for t in 1..=m {
            let a = minors(report.input.matrix(), t).unwrap().map_to_ring(q.ring()).unwrap();
            prop_assert!(ideal_equal(&a, &minors(q.matrix(), t).unwrap()).unwrap());
        }
        prop_assert!(check_setting(q, None).unwrap().all_pass());
    }

    #[test]
    fn pull_back_matches_direct_saturation((p, undo, _) in moved_f1()) {
        let report = check_setting(&p, Some(&undo)).unwrap();
        prop_assert!(report.all_pass());
        let nz = report.normalized.as_ref().unwrap();
        let ctx = reeskit::rees::build_context(&nz.presentation).unwrap();
        let closed = defining_ideal_closed_form(&ctx).unwrap();
        let back = pull_back(&closed, p.ring(), nz, Some(&undo)).unwrap();
        let direct = build_context_unchecked(&p).unwrap();
        // The prime is generated by the new coordinates `A x` it names.
        let forward = rational::inverse(&undo).unwrap();
        let big = &direct.bigring;
        let forms: Vec<Polynomial> = report
            .prime_p
            .clone()
            .unwrap()
            .iter()
            .map(|&i| {
                (0..p.d()).fold(Polynomial::zero(big), |acc, j| &acc + &Polynomial::var(big, j).scale(&forward[i][j]))
            })
            .collect();
        let prime = IdealHandle::new(big, forms).unwrap();
        let oracle = saturate(&direct.l, &prime).unwrap();
        prop_assert!(ideal_equal(&back.map_to_ring(big).unwrap(), &oracle).unwrap());
    }
}

proptest! {
    #![proptest_config(config(24, 15))]

    #[test]
    fn context_bookkeeping(p in block_form_presentation()) {
        let ctx = build_context_unchecked(&p).unwrap();
        let (d, n, m) = (ctx.d(), ctx.n(), p.m());
        for j in 0..m {
            let lhs = (0..d).fold(Polynomial::zero(&ctx.bigring), |acc, k| &acc + &(&ctx.x(k) * ctx.b.entry(k, j)));
            let rhs = (0..n).fold(Polynomial::zero(&ctx.bigring), |acc, i| {
                &acc + &(&ctx.t(i) * &p.matrix().entry(i, j).map_to_ring(&ctx.bigring).unwrap())
            });
            prop_assert_eq!(&lhs, &rhs);
            prop_assert_eq!(&lhs, &ctx.ells[j]);
        }
        let bp = ctx.bprime_minors().unwrap();
        let bpp = reeskit::rees::minors_or_zero(&ctx.bdoubleprime, d).unwrap();
        prop_assert!(ideal_equal(&bp, &bpp).unwrap());
        let tn = IdealHandle::new(&ctx.bigring, vec![ctx.t(n - 1)]).unwrap();
        let id_b = reeskit::rees::minors_or_zero(&ctx.b, d).unwrap();
        prop_assert!(ideal_equal(&tn.product(&bp).unwrap(), &id_b).unwrap());
        let prime = ctx.prime_ideal();
        let col = colon(&ctx.l, &prime).unwrap();
        let sat = saturate(&ctx.l, &prime).unwrap();
        prop_assert!(col.contains_ideal(&ctx.l));
        prop_assert!(sat.contains_ideal(&col));
    }
}

#[test]
fn dimension_extremes() {
    let r = ring(&["x", "y", "z"]);
    assert_eq!(reeskit::ideal_ops::dimension(&IdealHandle::zero(&r)).unwrap(), 3);
    assert_eq!(reeskit::ideal_ops::dimension(&IdealHandle::from_vars(&r, &[0, 1, 2])).unwrap(), 0);
}

#[test]
fn full_rank_matrix_has_generic_rank() {
    let r = ring(&["x", "y", "z"]);
    let m = PolyMatrix::parse(&r, &[vec!["x", "y"], vec!["y", "z"], vec!["z", "x"]]).unwrap();
    assert_eq!(rank(&m), 2);
    assert_eq!(rank_mod_vars(&m, &[0, 1, 2]), 0);
}

//! Acceptance suite: one test, and one summary line, per criterion.
//!
//! Run with `cargo test -p reeskit --test acceptance -- --nocapture` to see
//! the detail lines.

mod common;

use std::cell::Cell;
use std::time::{Duration, Instant};

use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};
use reeskit::cli::fixtures::fixture;
use reeskit::cli::Analysis;
use reeskit::groebner::{buchberger, normal_form, s_polynomial};
use reeskit::hypotheses::{check_gs, check_height_profile_at, check_setting, PresentationInput};
use reeskit::ideal_ops::{
    colon, dimension, height, ideal_equal, radical_equals_variable_prime, radical_member, saturate, saturate_iterated,
    variable_prime_containing, IdealHandle,
};
use reeskit::polymatrix::{determinant, minors, rank_mod_vars};
use reeskit::polyring::{parse_poly, MonomialOrder, Polynomial};
use reeskit::rees::{
    bourbaki_specialize, build_context, build_context_unchecked, closed_form_candidate, defining_ideal_closed_form,
    oracle_defining_ideal, special_fiber, verify_deformation, ReesContext,
};

use common::*;

/// Collects the checks of one criterion and prints a single verdict line.
struct Criterion {
    id: &'static str,
    title: &'static str,
    start: Instant,
    budget: Option<Duration>,
    failures: Vec<String>,
}

impl Criterion {
    fn new(id: &'static str, title: &'static str, budget_secs: Option<u64>) -> Self {
        Criterion {
            id,
            title,
            start: Instant::now(),
            budget: budget_secs.map(Duration::from_secs),
            failures: Vec::new(),
        }
    }

    fn check(&mut self, label: &str, ok: bool) {
        println!("  [{}] {label}", if ok { "ok" } else { "FAIL" });
        if !ok {
            self.failures.push(label.to_string());
        }
    }

    fn finish(mut self) {
        let elapsed = self.start.elapsed();
        if let Some(b) = self.budget {
            self.check(&format!("runtime {:.2?} within {:?}", elapsed, b), elapsed <= b);
        }
        let verdict = if self.failures.is_empty() { "PASS" } else { "FAIL" };
        println!("criterion {}: {verdict} - {} ({:.2?})", self.id, self.title, elapsed);
        assert!(self.failures.is_empty(), "criterion {} failed: {:?}", self.id, self.failures);
    }
}

fn presentation(name: &str) -> (Analysis, PresentationInput) {
    let f = fixture(name).unwrap();
    let a = Analysis::run(&f.doc).unwrap();
    let p = a.report.input.clone();
    (a, p)
}

fn certified(name: &str) -> (Analysis, ReesContext) {
    let (a, _) = presentation(name);
    let ctx = a.certified_context().unwrap().expect("fixture is certified");
    (a, ctx)
}

fn polys(ring: &reeskit::polyring::Ring, gens: &[&str]) -> IdealHandle {
    IdealHandle::new(ring, gens.iter().map(|g| parse_poly(g, ring).unwrap()).collect()).unwrap()
}

fn three_way(c: &mut Criterion, ctx: &ReesContext) -> IdealHandle {
    let closed = defining_ideal_closed_form(ctx).unwrap();
    let p = ctx.prime_ideal();
    let col = colon(&ctx.l, &p).unwrap();
    let sat = saturate(&ctx.l, &p).unwrap();
    c.check("L + I_(d-1)(B') = L : (x_1..x_(d-1))", ideal_equal(&closed, &col).unwrap());
    c.check("L : (x_1..x_(d-1)) = L : (x_1..x_(d-1))^inf", ideal_equal(&col, &sat).unwrap());
    c.check("L + I_(d-1)(B') = L : (x_1..x_(d-1))^inf", ideal_equal(&closed, &sat).unwrap());
    closed
}

#[test]
fn criterion_1_ideal_case_f1() {
    let mut c = Criterion::new("1", "ideal case on F1", Some(10));
    let (a, ctx) = certified("F1");
    c.check("hypotheses pass", a.report.all_pass());
    let closed = three_way(&mut c, &ctx);
    let expected = polys(&ctx.bigring, &["T1*T2 - T1*T3 - T2*T3"]);
    c.check("I_2(B') = (T1*T2 - T1*T3 - T2*T3)", ideal_equal(&ctx.bprime_minors().unwrap(), &expected).unwrap());
    c.check("height = 3 = n - 1", height(&closed).unwrap() == 3);
    c.check("dimension = 4 = d + 1", dimension(&closed).unwrap() == 4);
    let fib = special_fiber(&ctx, &closed).unwrap();
    c.check("fiber ideal height 1 = n - d", height(&fib.ideal).unwrap() == 1);
    c.check("analytic spread 3 = d", fib.analytic_spread == 3);
    c.finish();
}

#[test]
fn criterion_2_module_case_f2() {
    let mut c = Criterion::new("2", "module case on F2", Some(30));
    let (a, ctx) = certified("F2");
    c.check("hypotheses pass", a.report.all_pass());
    c.check("e = 2, n = 5", ctx.e() == 2 && ctx.n() == 5);
    let closed = three_way(&mut c, &ctx);
    c.check("dimension = 5 = d + e", dimension(&closed).unwrap() == 5);
    let fib = special_fiber(&ctx, &closed).unwrap();
    c.check("analytic spread 4 = d + e - 1", fib.analytic_spread == 4);
    let square = ctx.bprime.nrows() == ctx.bprime.ncols();
    c.check("n = d + e and B' is square", ctx.n() == ctx.d() + ctx.e() && square);
    if square {
        let det = determinant(&ctx.bprime).unwrap();
        let principal = IdealHandle::new(&ctx.bigring, vec![det]).unwrap();
        c.check("I_(d-1)(B') = (det B')", ideal_equal(&ctx.bprime_minors().unwrap(), &principal).unwrap());
    }
    c.finish();
}

#[test]
fn criterion_3_deformation_f2() {
    let mut c = Criterion::new("3", "deformation identity at a seeded specialization of F2", Some(60));
    let (_, ctx) = certified("F2");
    let spec = bourbaki_specialize(&ctx.base, 1).unwrap();
    let report = check_setting(&spec.psi, None).unwrap();
    c.check("psi passes the ideal-case hypotheses", report.all_pass());
    c.check("psi has rank 1", spec.psi.e() == 1);
    let ideal_ctx = build_context(&spec.psi).unwrap();
    let cert = verify_deformation(&ctx, &ideal_ctx, &spec).unwrap();
    c.check("symmetric ideals agree modulo (Y)", cert.passed("symmetric_ideal_specializes"));
    c.check("closed forms agree modulo (Y)", cert.passed("closed_form_specializes"));
    for seed in 2..=4 {
        c.check(&format!("seed {seed} yields a specialization"), bourbaki_specialize(&ctx.base, seed).is_ok());
    }
    c.finish();
}

#[test]
fn criterion_4_negative_control_example_3_9() {
    let mut c = Criterion::new("4", "rank condition fails; forced oracle", Some(120));
    let (a, p) = presentation("example_3_9");
    c.check("first failing check is rank_one", a.report.first_failure().map(|f| f.name.as_str()) == Some("rank_one"));
    c.check("rank modulo (x1, x2) = 2", rank_mod_vars(p.matrix(), &[0, 1]) == 2);
    let ctx = a.forced_context().unwrap();
    let prime = ctx.prime_ideal();
    c.check("forced context uses (x1, x2)", ctx.bigring.name(0) == "x1" && ctx.bigring.name(1) == "x2");
    let oracle = oracle_defining_ideal(&ctx).unwrap();
    let col1 = colon(&ctx.l, &prime).unwrap();
    let col2 = colon(&ctx.l, &prime.power(2).unwrap()).unwrap();
    c.check("L : p^inf = L : p^2", ideal_equal(&oracle, &col2).unwrap());
    c.check("L : p^inf != L : p", !ideal_equal(&oracle, &col1).unwrap());
    c.check("L : p^inf != L + I_2(B')", !ideal_equal(&oracle, &closed_form_candidate(&ctx).unwrap()).unwrap());
    let chain = saturate_iterated(&ctx.l, &prime, 8).unwrap();
    c.check("stabilization exponent = 2", chain.exponent == 2);
    c.finish();
}

#[test]
fn criterion_5_negative_control_example_3_8() {
    let mut c = Criterion::new("5", "no variable prime over I_3", Some(60));
    let (_, p) = presentation("example_3_8");
    c.check("G_2 holds", check_gs(&p, 2).unwrap());
    c.check("G_3 fails", !check_gs(&p, 3).unwrap());
    let i3 = minors(p.matrix(), 3).unwrap();
    for s in [[0, 1], [0, 2], [1, 2]] {
        let label = format!("sqrt I_3 != (x{}, x{})", s[0] + 1, s[1] + 1);
        c.check(&label, !radical_equals_variable_prime(&i3, &s).unwrap());
    }
    let r = p.ring();
    for (f, member) in [("x2", true), ("x1*x3", true), ("x1", false), ("x3", false)] {
        let label = format!("{f} {} sqrt I_3", if member { "in" } else { "not in" });
        c.check(&label, radical_member(&parse_poly(f, r).unwrap(), &i3).unwrap() == member);
    }
    for prime in [["x1", "x2"], ["x2", "x3"]] {
        c.check(&format!("I_3 in ({})", prime.join(", ")), polys(r, &prime).contains_ideal(&i3));
    }
    c.finish();
}

#[test]
fn criterion_6_medium_tier_example_3_12() {
    let mut c = Criterion::new("6", "G_4 but not G_5 on a 7x6 matrix", Some(300));
    let (_, p) = presentation("example_3_12");
    c.check("G_4 holds", check_gs(&p, 4).unwrap());
    c.check("G_5 fails", !check_gs(&p, 5).unwrap());
    c.check("ht Fitt_3 = 4", p.fitting_height(3).unwrap() == Some(4));
    c.check("ht Fitt_4 = 4", p.fitting_height(4).unwrap() == Some(4));
    c.check("rank modulo (x1..x5) = 1", rank_mod_vars(p.matrix(), &[0, 1, 2, 3, 4]) == 1);
    let r = p.ring();
    let fitt4 = p.fitting(4).unwrap();
    let p1 = polys(r, &["x1", "x2", "x3", "x4"]);
    let p2 = polys(r, &["x1 - x2", "x3", "x4", "x5", "x6"]);
    c.check("Fitt_4 in (x1, x2, x3, x4), a prime of height 4", p1.contains_ideal(&fitt4) && height(&p1).unwrap() == 4);
    c.check(
        "Fitt_4 in (x1 - x2, x3, x4, x5, x6), a prime of height 5",
        p2.contains_ideal(&fitt4) && height(&p2).unwrap() == 5,
    );
    for (f, member) in [("x3", true), ("x4", true), ("x1 - x2", true), ("x1*x5", true), ("x1", false), ("x5", false)] {
        let label = format!("{f} {} sqrt Fitt_4", if member { "in" } else { "not in" });
        c.check(&label, radical_member(&parse_poly(f, r).unwrap(), &fitt4).unwrap() == member);
    }
    c.finish();
}

#[test]
fn criterion_7_slow_tier_example_3_11() {
    let mut c = Criterion::new("7", "G_6 but not G_7 over 8 variables", None);
    let (_, p) = presentation("example_3_11");
    let all: Vec<usize> = (0..8).collect();
    let i1 = minors(p.matrix(), 1).unwrap();
    c.check("I_1 = (x1..x8)", ideal_equal(&i1, &IdealHandle::from_vars(p.ring(), &all)).unwrap());
    c.check("rank modulo (x1..x7) = 1", rank_mod_vars(p.matrix(), &all[..7]) == 1);
    c.check("G_6 holds", check_gs(&p, 6).unwrap());
    c.check("G_7 fails", !check_gs(&p, 7).unwrap());
    let profile = check_height_profile_at(&p, 6).unwrap();
    c.check("ht Fitt_5 = ht Fitt_6 = 6", profile.lower == (5, Some(6)) && profile.upper == (6, Some(6)));
    // Independent of the bounds: a height 6 variable prime holds Fitt_6, and
    // the lower bound comes from leading monomials only.
    let f6 = p.fitting(6).unwrap();
    c.check("Fitt_6 inside a variable prime of height 6", variable_prime_containing(&f6, 6).is_some());
    c.check("Fitt_5 in no variable prime of height 5", variable_prime_containing(&p.fitting(5).unwrap(), 5).is_none());
    c.finish();
}

fn runner(cases: u32) -> TestRunner {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn ensure(ok: bool, what: &str) -> Result<(), TestCaseError> {
    if ok {
        Ok(())
    } else {
        Err(TestCaseError::fail(what.to_string()))
    }
}

fn buchberger_postconditions(cases: u32) -> Result<String, String> {
    let r = ring(&["x", "y", "z"]);
    let (seen, busy) = (Cell::new(0), Cell::new(0));
    let mut run = runner(cases);
    let strategy = (raw_ideal(3, 1, 3, 3), proptest::bool::ANY);
    run.run(&strategy, |(raw, lex)| {
        let order = if lex { MonomialOrder::Lex } else { MonomialOrder::DegRevLex };
        let gens: Vec<Polynomial> = raw.iter().map(|t| poly(&r, t)).filter(|g| !g.is_zero()).collect();
        let gb = buchberger(&r, &gens, &order);
        let basis = gb.generators();
        seen.set(seen.get() + 1);
        busy.set(busy.get() + usize::from(basis.len() > 1 && !gb.is_unit()));
        for (i, f) in basis.iter().enumerate() {
            for g in &basis[i + 1..] {
                ensure(
                    normal_form(&s_polynomial(f, g, &order), basis, &order).is_zero(),
                    "S-polynomial does not reduce to zero",
                )?;
            }
        }
        for g in &gens {
            ensure(normal_form(g, basis, &order).is_zero(), "input generator not in the basis ideal")?;
        }
        let lms = gb.leading_monomials();
        for (i, g) in basis.iter().enumerate() {
            ensure(g.leading_term(&order).unwrap().1 == &q(1), "basis element not monic")?;
            for (j, lm) in lms.iter().enumerate() {
                if i != j {
                    ensure(g.terms().all(|(m, _)| !lm.divides(m)), "basis not reduced")?;
                }
            }
        }
        let mut reversed = gens.clone();
        reversed.reverse();
        ensure(buchberger(&r, &reversed, &order).generators() == basis, "basis depends on input order")?;
        Ok(())
    })
    .map_err(|e| e.to_string())?;
    Ok(format!("{} cases, {} with a proper basis of two or more elements", seen.get(), busy.get()))
}

fn sandwich_and_idempotence(cases: u32) -> Result<String, String> {
    let r = ring(&["x", "y", "z"]);
    let (seen, busy) = (Cell::new(0), Cell::new(0));
    let mut run = runner(cases);
    run.run(&(raw_ideal(3, 2, 2, 2), raw_ideal(3, 1, 2, 2)), |(ri, rj)| {
        let (i, j) = (ideal(&r, &ri), ideal(&r, &rj));
        if j.is_zero() {
            return Ok(());
        }
        let col = colon(&i, &j).unwrap();
        let sat = saturate(&i, &j).unwrap();
        seen.set(seen.get() + 1);
        busy.set(busy.get() + usize::from(!ideal_equal(&i, &sat).unwrap()));
        ensure(col.contains_ideal(&i), "I not in I:J")?;
        ensure(sat.contains_ideal(&col), "I:J not in I:J^inf")?;
        ensure(ideal_equal(&saturate(&sat, &j).unwrap(), &sat).unwrap(), "saturation not idempotent")?;
        Ok(())
    })
    .map_err(|e| e.to_string())?;
    Ok(format!("{} cases, {} with I strictly inside its saturation", seen.get(), busy.get()))
}

fn minors_invariance(cases: u32) -> Result<String, String> {
    let r = ring(&["x", "y", "z"]);
    let (seen, busy) = (Cell::new(0), Cell::new(0));
    let mut run = runner(cases);
    run.run(&(raw_linear_matrix(3, 3, 3), invertible(3), invertible(3)), |(raw, u, v)| {
        let m = linear_matrix(&r, &raw);
        let moved = m.scalar_left(&u).scalar_right(&v);
        seen.set(seen.get() + 1);
        busy.set(busy.get() + usize::from(!determinant(&m).unwrap().is_zero()));
        for t in 1..=3 {
            let a = minors(&m, t).unwrap();
            let b = minors(&moved, t).unwrap();
            ensure(ideal_equal(&a, &b).unwrap(), &format!("I_{t} changed under field operations"))?;
        }
        Ok(())
    })
    .map_err(|e| e.to_string())?;
    Ok(format!("{} cases, {} with nonzero determinant", seen.get(), busy.get()))
}

fn cramer_containment(cases: u32) -> Result<String, String> {
    let (seen, busy) = (Cell::new(0), Cell::new(0));
    let mut run = runner(cases);
    run.run(&block_form_presentation(), |p| {
        let ctx = build_context_unchecked(&p).unwrap();
        ensure(ctx.block_form, "generator produced a context outside block form")?;
        let candidate = closed_form_candidate(&ctx).unwrap();
        let oracle = oracle_defining_ideal(&ctx).unwrap();
        seen.set(seen.get() + 1);
        busy.set(busy.get() + usize::from(!ctx.l.contains_ideal(&candidate)));
        ensure(oracle.contains_ideal(&candidate), "L + I_(d-1)(B') not in the saturation")?;
        Ok(())
    })
    .map_err(|e| e.to_string())?;
    Ok(format!("{} contexts, {} where I_(d-1)(B') is not already in L", seen.get(), busy.get()))
}

#[test]
fn criterion_8_property_suites() {
    let mut c = Criterion::new("8", "seeded property suites", None);
    let suites: [(&str, u32, fn(u32) -> Result<String, String>); 4] = [
        ("Buchberger postconditions", 200, buchberger_postconditions),
        ("colon/saturation sandwich and idempotence", 100, sandwich_and_idempotence),
        ("I_t invariance under field row/column operations", 100, minors_invariance),
        ("Cramer containment on generated contexts", 64, cramer_containment),
    ];
    for (name, cases, suite) in suites {
        let t = Instant::now();
        let outcome = suite(cases);
        match &outcome {
            Ok(stats) => println!("  {name}: {stats} ({:.2?})", t.elapsed()),
            Err(e) => println!("  {name}: {e}"),
        }
        c.check(&format!("{name} ({cases} cases)"), outcome.is_ok());
    }
    c.finish();
}

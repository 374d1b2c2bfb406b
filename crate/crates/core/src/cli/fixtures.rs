//! Embedded fixture corpus and its expected-outcome assertions.

use std::cell::OnceCell;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{Analysis, CliError, InputDocument, RunOptions};
use crate::hypotheses::{check_gs, check_setting, find_distinguished_prime};
use crate::ideal_ops::{
    colon, dimension, height, ideal_equal, radical_equals_variable_prime, radical_member, saturate_iterated,
    IdealHandle,
};
use crate::polymatrix::{minors, rank_mod_vars};
use crate::polyring::{parse_poly, Polynomial, Ring};
use crate::rees::{
    bourbaki_specialize, build_context, closed_form_candidate, defining_ideal_closed_form, oracle_defining_ideal,
    special_fiber, verify_deformation, verify_theorem, Certificate, ReesContext,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Tier {
    Fast,
    Medium,
    Slow,
}

impl Tier {
    pub fn as_str(self) -> &'static str {
        match self {
            Tier::Fast => "fast",
            Tier::Medium => "medium",
            Tier::Slow => "slow",
        }
    }

    /// `REESKIT_TIER` if set and valid, otherwise fast.
    pub fn from_env() -> Tier {
        std::env::var("REESKIT_TIER").ok().and_then(|s| s.parse().ok()).unwrap_or(Tier::Fast)
    }
}

impl std::str::FromStr for Tier {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fast" => Ok(Tier::Fast),
            "medium" => Ok(Tier::Medium),
            "slow" => Ok(Tier::Slow),
            other => Err(format!("unknown tier {other:?}")),
        }
    }
}

/// One expected outcome. Ideals are given by generator lists; `minors`
/// selects the ideal of t-minors of the (possibly coordinate-changed) input.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Assertion {
    AllChecksPass,
    FirstFailure { check: String },
    Gs { s: usize, holds: bool },
    FittingHeight { index: usize, height: usize },
    HeightProfile { s: usize, lower: usize, upper: usize, height: usize },
    MaximalContent,
    RankModVars { vars: Vec<String>, rank: usize },
    DistinguishedPrime { vars: Vec<String> },
    NoVariablePrime { minors: usize },
    RadicalMember { minors: usize, poly: String, member: bool },
    ContainedIn { minors: usize, ideal: Vec<String> },
    CertificatePasses,
    IdentityPasses { name: String },
    BprimeMinors { generators: Vec<String> },
    FiberIdeal { generators: Vec<String> },
    Height { value: usize },
    Dimension { value: usize },
    FiberHeight { value: usize },
    AnalyticSpread { value: usize },
    DeterminantalClosedForm,
    StabilizationExponent { value: usize },
    OracleEqualsColon { equal: bool },
    OracleEqualsColonPower { power: u32, equal: bool },
    OracleEqualsClosedForm { equal: bool },
    SpecializationPassesHypotheses,
    DeformationPasses,
}

impl fmt::Display for Assertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = serde_json::to_value(self).unwrap();
        let kind = v["kind"].as_str().unwrap_or_default().to_string();
        let mut rest: Vec<String> = v
            .as_object()
            .into_iter()
            .flatten()
            .filter(|(k, _)| k.as_str() != "kind")
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        rest.sort();
        if rest.is_empty() {
            write!(f, "{kind}")
        } else {
            write!(f, "{kind} {}", rest.join(" "))
        }
    }
}

#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub description: &'static str,
    pub tier: Tier,
    pub doc: InputDocument,
}

const SOURCES: [(&str, &str, &str); 6] = [
    ("F1", "4x3 bidiagonal matrix in x, y, x+y, z; ideal case", include_str!("../../fixtures/F1.json")),
    ("F2", "F1 padded with a zero row; module of rank 2", include_str!("../../fixtures/F2.json")),
    ("example_3_8", "G_2 but no distinguished variable prime", include_str!("../../fixtures/example_3_8.json")),
    ("example_3_9", "rank two modulo the distinguished prime", include_str!("../../fixtures/example_3_9.json")),
    ("example_3_11", "9x8 matrix over 8 variables; G_6 but not G_7", include_str!("../../fixtures/example_3_11.json")),
    ("example_3_12", "7x6 matrix; G_4 but not G_5", include_str!("../../fixtures/example_3_12.json")),
];

pub fn corpus() -> Vec<Fixture> {
    SOURCES
        .iter()
        .map(|&(name, description, text)| {
            let doc = InputDocument::from_json(text).unwrap_or_else(|e| panic!("embedded fixture {name}: {e}"));
            let tier = doc.options.tiers.as_deref().and_then(|t| t.parse().ok()).unwrap_or(Tier::Fast);
            Fixture { name, description, tier, doc }
        })
        .collect()
}

pub fn fixture(name: &str) -> Option<Fixture> {
    corpus().into_iter().find(|f| f.name == name)
}

#[derive(Clone, Debug)]
pub struct AssertionLine {
    pub label: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct FixtureOutcome {
    pub lines: Vec<AssertionLine>,
}

impl FixtureOutcome {
    pub fn pass(&self) -> bool {
        self.lines.iter().all(|l| l.pass)
    }

    pub fn to_json(&self, f: &Fixture) -> Value {
        json!({
            "name": f.name,
            "tier": f.tier.as_str(),
            "pass": self.pass(),
            "assertions": self.lines.iter().map(|l| json!({"assertion": l.label, "pass": l.pass, "detail": l.detail})).collect::<Vec<_>>(),
        })
    }
}

/// Lazily computed quantities shared by the assertions of one fixture.
pub struct FixtureRun<'a> {
    doc: &'a InputDocument,
    seed: u64,
    analysis: OnceCell<Analysis>,
    context: OnceCell<ReesContext>,
    closed: OnceCell<IdealHandle>,
    certificate: OnceCell<Certificate>,
    oracle: OnceCell<IdealHandle>,
}

impl<'a> FixtureRun<'a> {
    pub fn new(doc: &'a InputDocument, opts: &RunOptions) -> Self {
        FixtureRun {
            doc,
            seed: super::seed_of(doc, opts),
            analysis: OnceCell::new(),
            context: OnceCell::new(),
            closed: OnceCell::new(),
            certificate: OnceCell::new(),
            oracle: OnceCell::new(),
        }
    }

    fn analysis(&self) -> Result<&Analysis, CliError> {
        if self.analysis.get().is_none() {
            let _ = self.analysis.set(Analysis::run(self.doc)?);
        }
        Ok(self.analysis.get().unwrap())
    }

    /// Certified context when available, otherwise the forced one.
    fn context(&self) -> Result<&ReesContext, CliError> {
        if self.context.get().is_none() {
            let a = self.analysis()?;
            let ctx = match a.certified_context()? {
                Some(c) => c,
                None => a.forced_context()?,
            };
            let _ = self.context.set(ctx);
        }
        Ok(self.context.get().unwrap())
    }

    fn certified(&self) -> Result<&ReesContext, CliError> {
        if !self.analysis()?.report.all_pass() {
            return Err(CliError::Compute("input is not certified".into()));
        }
        self.context()
    }

    fn closed(&self) -> Result<&IdealHandle, CliError> {
        if self.closed.get().is_none() {
            let _ = self.closed.set(defining_ideal_closed_form(self.certified()?)?);
        }
        Ok(self.closed.get().unwrap())
    }

    fn certificate(&self) -> Result<&Certificate, CliError> {
        if self.certificate.get().is_none() {
            let _ = self.certificate.set(verify_theorem(self.certified()?)?);
        }
        Ok(self.certificate.get().unwrap())
    }

    fn oracle(&self) -> Result<&IdealHandle, CliError> {
        if self.oracle.get().is_none() {
            let _ = self.oracle.set(oracle_defining_ideal(self.context()?)?);
        }
        Ok(self.oracle.get().unwrap())
    }

    fn input_ring(&self) -> Result<Ring, CliError> {
        Ok(self.analysis()?.report.input.ring().clone())
    }

    fn var_indices(&self, names: &[String]) -> Result<Vec<usize>, CliError> {
        let ring = self.input_ring()?;
        names.iter().map(|n| ring.index_of(n).ok_or_else(|| CliError::Parse(format!("unknown variable {n}")))).collect()
    }

    fn minors_ideal(&self, t: usize) -> Result<IdealHandle, CliError> {
        Ok(minors(self.analysis()?.report.input.matrix(), t)?)
    }

    fn parse_all(&self, gens: &[String], ring: &Ring) -> Result<IdealHandle, CliError> {
        let polys = gens
            .iter()
            .map(|g| parse_poly(g, ring).map_err(|e| CliError::Parse(e.to_string())))
            .collect::<Result<Vec<Polynomial>, _>>()?;
        Ok(IdealHandle::new(ring, polys)?)
    }

    /// Evaluates an assertion, returning pass/fail and the observed value.
    pub fn evaluate(&self, a: &Assertion) -> Result<(bool, String), CliError> {
        let compare = |observed: String, expected: String| {
            (observed == expected, format!("observed {observed}, expected {expected}"))
        };
        Ok(match a {
            Assertion::AllChecksPass => {
                let r = &self.analysis()?.report;
                let first = r.first_failure().map_or("none".to_string(), |c| c.name.clone());
                (r.all_pass(), format!("first failure: {first}"))
            }
            Assertion::FirstFailure { check } => {
                let r = &self.analysis()?.report;
                compare(r.first_failure().map_or("none".to_string(), |c| c.name.clone()), check.clone())
            }
            Assertion::Gs { s, holds } => {
                let p = &self.analysis()?.report.input;
                compare(check_gs(p, *s)?.to_string(), holds.to_string())
            }
            Assertion::FittingHeight { index, height } => {
                let p = &self.analysis()?.report.input;
                let h = p.fitting_height(*index)?;
                compare(h.map_or("unit".into(), |h| h.to_string()), height.to_string())
            }
            Assertion::HeightProfile { s, lower, upper, height } => {
                let p = &self.analysis()?.report.input;
                let prof = crate::hypotheses::check_height_profile_at(p, *s)?;
                let show = |x: (usize, Option<usize>)| {
                    format!("Fitt_{} height {}", x.0, x.1.map_or("unit".into(), |h| h.to_string()))
                };
                compare(
                    format!("{}; {}", show(prof.lower), show(prof.upper)),
                    format!("{}; {}", show((*lower, Some(*height))), show((*upper, Some(*height)))),
                )
            }
            Assertion::MaximalContent => {
                let r = &self.analysis()?.report;
                let p = &r.input;
                let all: Vec<usize> = (0..p.d()).collect();
                let eq = ideal_equal(&minors(p.matrix(), 1)?, &IdealHandle::from_vars(p.ring(), &all))?;
                (eq, format!("I_1 equals the maximal ideal: {eq}"))
            }
            Assertion::RankModVars { vars, rank } => {
                let idx = self.var_indices(vars)?;
                let p = &self.analysis()?.report.input;
                compare(rank_mod_vars(p.matrix(), &idx).to_string(), rank.to_string())
            }
            Assertion::DistinguishedPrime { vars } => {
                let p = &self.analysis()?.report.input;
                let found = match find_distinguished_prime(p) {
                    Ok(v) => v.iter().map(|&i| p.ring().name(i).to_string()).collect::<Vec<_>>().join(","),
                    Err(_) => "none".into(),
                };
                compare(found, vars.join(","))
            }
            Assertion::NoVariablePrime { minors: t } => {
                let p = &self.analysis()?.report.input;
                let ideal = self.minors_ideal(*t)?;
                let k = p.d() - 1;
                let mut hits = Vec::new();
                for subset in subsets(p.d(), k) {
                    if radical_equals_variable_prime(&ideal, &subset)? {
                        hits.push(subset.iter().map(|&i| p.ring().name(i).to_string()).collect::<Vec<_>>().join(","));
                    }
                }
                (
                    hits.is_empty(),
                    format!(
                        "subsets with matching radical: {}",
                        if hits.is_empty() { "none".into() } else { hits.join("; ") }
                    ),
                )
            }
            Assertion::RadicalMember { minors: t, poly, member } => {
                let ring = self.input_ring()?;
                let f = parse_poly(poly, &ring).map_err(|e| CliError::Parse(e.to_string()))?;
                compare(radical_member(&f, &self.minors_ideal(*t)?)?.to_string(), member.to_string())
            }
            Assertion::ContainedIn { minors: t, ideal } => {
                let target = self.parse_all(ideal, &self.input_ring()?)?;
                let ok = target.contains_ideal(&self.minors_ideal(*t)?);
                (ok, format!("I_{t} contained in ({}): {ok}", ideal.join(", ")))
            }
            Assertion::CertificatePasses => {
                let c = self.certificate()?;
                let failed: Vec<&str> =
                    c.identities.iter().filter(|i| !c.passed(&i.name)).map(|i| i.name.as_str()).collect();
                (
                    c.verdict,
                    format!(
                        "identities not passing: {}",
                        if failed.is_empty() { "none".into() } else { failed.join(", ") }
                    ),
                )
            }
            Assertion::IdentityPasses { name } => {
                let ok = self.certificate()?.passed(name);
                (ok, format!("{name}: {ok}"))
            }
            Assertion::BprimeMinors { generators } => {
                let ctx = self.certified()?;
                let expected = self.parse_all(generators, &ctx.bigring)?;
                let ok = ideal_equal(&ctx.bprime_minors()?, &expected)?;
                (ok, format!("I_(d-1)(B') = ({}): {ok}", generators.join(", ")))
            }
            Assertion::FiberIdeal { generators } => {
                let ctx = self.certified()?;
                let fib = special_fiber(ctx, self.closed()?)?;
                let expected = self.parse_all(generators, &ctx.tring)?;
                let ok = ideal_equal(&fib.ideal, &expected)?;
                let observed: Vec<String> = fib.ideal.canonical_generators().iter().map(|g| g.to_string()).collect();
                (ok, format!("fiber ideal ({})", observed.join(", ")))
            }
            Assertion::Height { value } => compare(height(self.closed()?)?.to_string(), value.to_string()),
            Assertion::Dimension { value } => compare(dimension(self.closed()?)?.to_string(), value.to_string()),
            Assertion::FiberHeight { value } => {
                let ctx = self.certified()?;
                let fib = special_fiber(ctx, self.closed()?)?;
                compare(height(&fib.ideal)?.to_string(), value.to_string())
            }
            Assertion::AnalyticSpread { value } => {
                let ctx = self.certified()?;
                compare(special_fiber(ctx, self.closed()?)?.analytic_spread.to_string(), value.to_string())
            }
            Assertion::DeterminantalClosedForm => {
                let ctx = self.certified()?;
                let square = ctx.bprime.nrows() == ctx.bprime.ncols();
                let det = crate::polymatrix::determinant(&ctx.bprime)?;
                let ok =
                    square && ideal_equal(&ctx.bprime_minors()?, &IdealHandle::new(&ctx.bigring, vec![det.clone()])?)?;
                (ok, format!("B' is {}x{}, det B' = {det}", ctx.bprime.nrows(), ctx.bprime.ncols()))
            }
            Assertion::StabilizationExponent { value } => {
                let ctx = self.context()?;
                let chain = saturate_iterated(&ctx.l, &ctx.prime_ideal(), 8)?;
                compare(chain.exponent.to_string(), value.to_string())
            }
            Assertion::OracleEqualsColon { equal } => {
                let ctx = self.context()?;
                let eq = ideal_equal(self.oracle()?, &colon(&ctx.l, &ctx.prime_ideal())?)?;
                compare(eq.to_string(), equal.to_string())
            }
            Assertion::OracleEqualsColonPower { power, equal } => {
                let ctx = self.context()?;
                let eq = ideal_equal(self.oracle()?, &colon(&ctx.l, &ctx.prime_ideal().power(*power)?)?)?;
                compare(eq.to_string(), equal.to_string())
            }
            Assertion::OracleEqualsClosedForm { equal } => {
                let ctx = self.context()?;
                let eq = ideal_equal(self.oracle()?, &closed_form_candidate(ctx)?)?;
                compare(eq.to_string(), equal.to_string())
            }
            Assertion::SpecializationPassesHypotheses => {
                let ctx = self.certified()?;
                let spec = bourbaki_specialize(&ctx.base, self.seed)?;
                let r = check_setting(&spec.psi, None)?;
                (
                    r.all_pass(),
                    format!(
                        "seed {}: psi first failure {}",
                        self.seed,
                        r.first_failure().map_or("none", |c| c.name.as_str())
                    ),
                )
            }
            Assertion::DeformationPasses => {
                let ctx = self.certified()?;
                let spec = bourbaki_specialize(&ctx.base, self.seed)?;
                let ideal_ctx = build_context(&spec.psi)?;
                let c = verify_deformation(ctx, &ideal_ctx, &spec)?;
                (c.verdict, format!("seed {}: deformation verdict {}", self.seed, c.verdict))
            }
        })
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

pub fn run_fixture(f: &Fixture, opts: &RunOptions) -> FixtureOutcome {
    let run = FixtureRun::new(&f.doc, opts);
    let lines = f
        .doc
        .expect
        .iter()
        .map(|a| {
            let (pass, detail) = run.evaluate(a).unwrap_or_else(|e| (false, format!("error: {e}")));
            AssertionLine { label: a.to_string(), pass, detail }
        })
        .collect();
    FixtureOutcome { lines }
}

//! Command-line front end: documents, command dispatch, and reports.

pub mod document;
pub mod fixtures;

use std::fmt::Write as _;

use serde_json::{json, Value};
use thiserror::Error;

use crate::hypotheses::{
    check_setting, find_distinguished_prime, normalize_block_form, HypothesisReport, PresentationInput,
};
use crate::ideal_ops::{colon, ideal_equal, saturate_iterated, IdealHandle};
use crate::polymatrix::{PolyMatrix, QMatrix};
use crate::polyring::{MonomialOrder, Polynomial, VarSet};
use crate::rees::{
    bourbaki_specialize, build_context, build_context_unchecked, closed_form_candidate, defining_ideal_closed_form,
    oracle_defining_ideal, pull_back, special_fiber, verify_deformation, verify_theorem, Certificate, ReesContext,
};
pub use document::InputDocument;
pub use fixtures::{Fixture, Tier};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("I/O error: {0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("computation error: {0}")]
    Compute(String),
}

macro_rules! compute_err {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Compute(e.to_string())
            }
        }
    )*};
}
compute_err!(
    crate::rees::ReesError,
    crate::hypotheses::HypothesisError,
    crate::ideal_ops::IdealError,
    crate::polymatrix::MatrixError,
    crate::polyring::PolyError
);

/// Process exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Pass = 0,
    MathFailure = 1,
    Operational = 2,
}

impl Exit {
    pub fn code(self) -> i32 {
        self as i32
    }

    fn from_bool(ok: bool) -> Exit {
        if ok {
            Exit::Pass
        } else {
            Exit::MathFailure
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub order: Option<MonomialOrder>,
    pub timings: bool,
    pub original_coordinates: bool,
}

/// Human-readable text, machine report, and exit status of one command.
#[derive(Clone, Debug)]
pub struct CommandOutput {
    pub exit: Exit,
    pub text: String,
    pub json: Value,
}

impl CommandOutput {
    fn new(exit: Exit, text: String, mut json: Value, timings: bool) -> Self {
        if !timings {
            strip_timings(&mut json);
        }
        if let Value::Object(map) = &mut json {
            map.insert("exit_code".into(), json!(exit.code()));
        }
        CommandOutput { exit, text, json }
    }

    pub fn operational(err: &CliError) -> Self {
        CommandOutput {
            exit: Exit::Operational,
            text: format!("error: {err}\n"),
            json: json!({"error": err.to_string(), "exit_code": 2}),
        }
    }
}

fn strip_timings(v: &mut Value) {
    match v {
        Value::Object(map) => {
            map.remove("elapsed_ms");
            map.values_mut().for_each(strip_timings);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_timings),
        _ => {}
    }
}

pub fn read_document(path: &str) -> Result<InputDocument, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{path}: {e}")))?;
    InputDocument::from_json(&text)
}

/// Hypothesis report for a document, plus the input after any coordinate change.
pub struct Analysis {
    pub doc: InputDocument,
    pub coordinate_change: Option<QMatrix>,
    pub input: PresentationInput,
    pub report: HypothesisReport,
}

impl Analysis {
    pub fn run(doc: &InputDocument) -> Result<Analysis, CliError> {
        let input = doc.presentation()?;
        let coordinate_change = doc.coordinate_change()?;
        let report = check_setting(&input, coordinate_change.as_ref())?;
        Ok(Analysis { doc: doc.clone(), coordinate_change, input, report })
    }

    /// Context of the normalized presentation, when every check passed.
    pub fn certified_context(&self) -> Result<Option<ReesContext>, CliError> {
        match (&self.report.normalized, self.report.all_pass()) {
            (Some(nz), true) => Ok(Some(build_context(&nz.presentation)?)),
            _ => Ok(None),
        }
    }

    /// Context built without the block-form requirement, with the
    /// distinguished prime (when one exists) moved to the front.
    pub fn forced_context(&self) -> Result<ReesContext, CliError> {
        let p = &self.report.input;
        let d = p.d();
        let prime = find_distinguished_prime(p).unwrap_or_else(|_| (0..d - 1).collect());
        let last = (0..d).find(|v| !prime.contains(v)).unwrap();
        let names: Vec<String> = prime.iter().chain([last].iter()).map(|&i| p.ring().name(i).to_string()).collect();
        let ring = VarSet::new(names)?;
        let permuted = PresentationInput::new(p.matrix().map_to_ring(&ring)?, p.e())?;
        Ok(build_context_unchecked(&permuted)?)
    }

    pub fn header(&self) -> String {
        let p = &self.input;
        format!("ring QQ[{}], {}x{} presentation, rank {}\n", p.ring().names().join(","), p.n(), p.m(), p.e())
    }
}

fn seed_of(doc: &InputDocument, opts: &RunOptions) -> u64 {
    opts.seed.or(doc.options.seed).unwrap_or(1)
}

fn order_of(doc: &InputDocument, opts: &RunOptions) -> Result<MonomialOrder, CliError> {
    Ok(opts.order.or(doc.order()?).unwrap_or_default())
}

fn ideal_lines(out: &mut String, title: &str, gens: &[Polynomial]) {
    let noun = if gens.len() == 1 { "generator" } else { "generators" };
    let _ = writeln!(out, "{title} ({} {noun}):", gens.len());
    for g in gens {
        let _ = writeln!(out, "  {g}");
    }
}

fn basis(i: &IdealHandle, order: MonomialOrder) -> Vec<Polynomial> {
    i.gb(order).generators().iter().map(Polynomial::primitive).collect()
}

fn strings(gens: &[Polynomial]) -> Vec<String> {
    gens.iter().map(|g| g.to_string()).collect()
}

fn report_text(a: &Analysis) -> String {
    let mut out = a.header();
    for c in &a.report.checks {
        let _ = writeln!(out, "{:<8} {:<20} {}", format!("{:?}", c.status).to_uppercase(), c.name, c.detail);
    }
    if let Some(nz) = &a.report.normalized {
        let _ = writeln!(out, "normalized variables: {}", nz.presentation.ring().names().join(", "));
        let _ = writeln!(out, "normalized matrix:\n{}", nz.presentation.matrix());
    }
    for note in &a.report.notes {
        let _ = writeln!(out, "note: {note}");
    }
    out
}

fn certificate_text(out: &mut String, title: &str, cert: &Certificate) {
    let _ = writeln!(out, "{title}: {}", if cert.verdict { "PASS" } else { "FAIL" });
    for c in &cert.identities {
        let _ = writeln!(out, "  {:<8} {:<30} {}", format!("{:?}", c.status).to_uppercase(), c.name, c.statement);
    }
    for a in &cert.assumptions {
        let _ = writeln!(out, "  assumption: {a}");
    }
}

fn base_json(a: &Analysis, command: &str) -> Value {
    json!({
        "command": command,
        "input": a.doc,
        "hypotheses": a.report.to_json(),
    })
}

pub fn cmd_check(doc: &InputDocument, opts: &RunOptions) -> Result<CommandOutput, CliError> {
    let a = Analysis::run(doc)?;
    let exit = Exit::from_bool(a.report.all_pass());
    Ok(CommandOutput::new(exit, report_text(&a), base_json(&a, "check"), opts.timings))
}

fn context_json(ctx: &ReesContext) -> Value {
    json!({
        "variables": ctx.bigring.names(),
        "ells": strings(&ctx.ells),
        "B": ctx.b.to_strings(),
        "Bprime": ctx.bprime.to_strings(),
        "Bdoubleprime": ctx.bdoubleprime.to_strings(),
        "block_form": ctx.block_form,
    })
}

/// Oracle, colon, and closed-form candidate for an uncertified input.
fn forced_oracle(a: &Analysis, order: MonomialOrder, out: &mut String) -> Result<Value, CliError> {
    let ctx = a.forced_context()?;
    let p = ctx.prime_ideal();
    let chain = saturate_iterated(&ctx.l, &p, 8)?;
    let oracle = oracle_defining_ideal(&ctx)?;
    let single = colon(&ctx.l, &p)?;
    let candidate = closed_form_candidate(&ctx)?;
    let eq_colon = ideal_equal(&oracle, &single)?;
    let eq_closed = ideal_equal(&oracle, &candidate)?;
    let chain_agrees = ideal_equal(chain.steps.last().unwrap(), &oracle)?;
    let gens = basis(&oracle, order);
    let _ = writeln!(out, "forced oracle in variables {}", ctx.bigring.names().join(", "));
    ideal_lines(out, "oracle J = L : p^inf", &gens);
    let _ = writeln!(out, "stabilization exponent N = {}", chain.exponent);
    let _ = writeln!(out, "J {} L : p", if eq_colon { "=" } else { "!=" });
    let _ = writeln!(out, "J {} L + I_(d-1)(B')", if eq_closed { "=" } else { "!=" });
    Ok(json!({
        "context": context_json(&ctx),
        "oracle": strings(&gens),
        "stabilization_exponent": chain.exponent,
        "iterated_colon_agrees": chain_agrees,
        "oracle_equals_colon": eq_colon,
        "oracle_equals_closed_form": eq_closed,
    }))
}

fn pulled_back(a: &Analysis, ideal: &IdealHandle, order: MonomialOrder) -> Result<Vec<Polynomial>, CliError> {
    let nz = a.report.normalized.as_ref().expect("certified");
    let back = pull_back(ideal, a.input.ring(), nz, a.coordinate_change.as_ref())?;
    Ok(basis(&back, order))
}

pub fn cmd_defining_ideal(
    doc: &InputDocument,
    verify: bool,
    force_oracle: bool,
    opts: &RunOptions,
) -> Result<CommandOutput, CliError> {
    let a = Analysis::run(doc)?;
    let order = order_of(doc, opts)?;
    let mut out = report_text(&a);
    let mut js = base_json(&a, "defining-ideal");
    let Some(ctx) = a.certified_context()? else {
        let _ = writeln!(out, "hypotheses fail; the closed form is not certified for this input");
        if force_oracle {
            js["forced_oracle"] = forced_oracle(&a, order, &mut out)?;
        }
        return Ok(CommandOutput::new(Exit::MathFailure, out, js, opts.timings));
    };
    let closed = defining_ideal_closed_form(&ctx)?;
    let bp = ctx.bprime_minors()?;
    let _ = writeln!(out, "variables: {}", ctx.bigring.names().join(", "));
    ideal_lines(&mut out, "L", &ctx.ells);
    ideal_lines(&mut out, "I_(d-1)(B')", bp.generators());
    js["defining_ideal"] = json!({
        "variables": ctx.bigring.names(),
        "ells": strings(&ctx.ells),
        "bprime_minors": strings(bp.generators()),
        "basis": strings(&basis(&closed, order)),
    });
    if opts.original_coordinates {
        let gens = pulled_back(&a, &closed, order)?;
        ideal_lines(&mut out, "defining ideal in input coordinates", &gens);
        js["defining_ideal"]["input_coordinates"] = json!(strings(&gens));
    }
    let mut ok = true;
    if force_oracle {
        let oracle = oracle_defining_ideal(&ctx)?;
        ideal_lines(&mut out, "oracle L : p^inf", &basis(&oracle, order));
        js["oracle"] = json!(strings(&basis(&oracle, order)));
    }
    if verify {
        let cert = verify_theorem(&ctx)?;
        certificate_text(&mut out, "certificate", &cert);
        ok &= cert.verdict;
        js["certificate"] = serde_json::to_value(&cert).unwrap();
        if ctx.e() >= 2 {
            let seed = seed_of(doc, opts);
            let spec = bourbaki_specialize(&ctx.base, seed)?;
            let psi_report = check_setting(&spec.psi, None)?;
            let psi_ok = psi_report.all_pass();
            let _ =
                writeln!(out, "specialization (seed {seed}): psi hypotheses {}", if psi_ok { "PASS" } else { "FAIL" });
            ok &= psi_ok;
            let mut deformation = json!({
                "seed": seed,
                "Z": crate::hypotheses::qmatrix_json(&spec.z),
                "psi": spec.psi.matrix().to_strings(),
                "psi_hypotheses": psi_report.to_json(),
            });
            if psi_ok {
                let ideal_ctx = build_context(&spec.psi)?;
                let dcert = verify_deformation(&ctx, &ideal_ctx, &spec)?;
                certificate_text(&mut out, "deformation", &dcert);
                ok &= dcert.verdict;
                deformation["certificate"] = serde_json::to_value(&dcert).unwrap();
            }
            js["deformation"] = deformation;
        }
    }
    Ok(CommandOutput::new(Exit::from_bool(ok), out, js, opts.timings))
}

pub fn cmd_fiber(doc: &InputDocument, opts: &RunOptions) -> Result<CommandOutput, CliError> {
    let a = Analysis::run(doc)?;
    let order = order_of(doc, opts)?;
    let mut out = report_text(&a);
    let mut js = base_json(&a, "fiber");
    let Some(ctx) = a.certified_context()? else {
        let _ = writeln!(out, "refused: input is not certified");
        return Ok(CommandOutput::new(Exit::MathFailure, out, js, opts.timings));
    };
    let closed = defining_ideal_closed_form(&ctx)?;
    let fib = special_fiber(&ctx, &closed)?;
    let codim = ctx.tring.len() - fib.analytic_spread;
    let gens = basis(&fib.ideal, order);
    ideal_lines(&mut out, "fiber ideal", &gens);
    let _ = writeln!(out, "codimension in k[T]: {codim}");
    let _ = writeln!(out, "analytic spread: {}", fib.analytic_spread);
    let ok = fib.equals_bprime_minors && fib.substitution_agrees;
    let _ = writeln!(out, "equals I_(d-1)(B'): {}", fib.equals_bprime_minors);
    js["fiber"] = json!({
        "generators": strings(&gens),
        "codimension": codim,
        "analytic_spread": fib.analytic_spread,
        "equals_bprime_minors": fib.equals_bprime_minors,
        "substitution_agrees": fib.substitution_agrees,
    });
    Ok(CommandOutput::new(Exit::from_bool(ok), out, js, opts.timings))
}

pub fn cmd_jacobian_dual(doc: &InputDocument, opts: &RunOptions) -> Result<CommandOutput, CliError> {
    let a = Analysis::run(doc)?;
    let mut out = a.header();
    let mut js = base_json(&a, "jacobian-dual");
    let ctx = match a.certified_context()? {
        Some(ctx) => ctx,
        None => {
            let _ = writeln!(out, "note: hypotheses fail; showing the Jacobian dual of the input as given");
            match &a.report.prime_p {
                Some(prime) => match normalize_block_form(&a.report.input, prime) {
                    Ok(nz) => build_context_unchecked(&nz.presentation)?,
                    Err(_) => a.forced_context()?,
                },
                None => a.forced_context()?,
            }
        }
    };
    let show = |out: &mut String, title: &str, m: &PolyMatrix| {
        let _ = writeln!(out, "{title}:\n{m}");
    };
    let _ = writeln!(out, "variables: {}", ctx.bigring.names().join(", "));
    ideal_lines(&mut out, "L", &ctx.ells);
    show(&mut out, "B", &ctx.b);
    show(&mut out, "B'", &ctx.bprime);
    show(&mut out, "B''", &ctx.bdoubleprime);
    let _ = writeln!(out, "block form: {}", ctx.block_form);
    js["jacobian_dual"] = context_json(&ctx);
    Ok(CommandOutput::new(Exit::Pass, out, js, opts.timings))
}

pub fn cmd_oracle(doc: &InputDocument, opts: &RunOptions) -> Result<CommandOutput, CliError> {
    let a = Analysis::run(doc)?;
    let order = order_of(doc, opts)?;
    let mut out = report_text(&a);
    let mut js = base_json(&a, "oracle");
    match a.certified_context()? {
        Some(ctx) => {
            let oracle = oracle_defining_ideal(&ctx)?;
            let chain = saturate_iterated(&ctx.l, &ctx.prime_ideal(), 8)?;
            let gens = basis(&oracle, order);
            ideal_lines(&mut out, "oracle J = L : p^inf", &gens);
            let _ = writeln!(out, "stabilization exponent N = {}", chain.exponent);
            js["oracle"] = json!({"generators": strings(&gens), "stabilization_exponent": chain.exponent});
            if opts.original_coordinates {
                let back = pulled_back(&a, &oracle, order)?;
                ideal_lines(&mut out, "oracle in input coordinates", &back);
                js["oracle"]["input_coordinates"] = json!(strings(&back));
            }
        }
        None => {
            js["forced_oracle"] = forced_oracle(&a, order, &mut out)?;
        }
    }
    Ok(CommandOutput::new(Exit::Pass, out, js, opts.timings))
}

pub fn cmd_fixtures_list() -> CommandOutput {
    let mut out = String::new();
    let mut items = Vec::new();
    for f in fixtures::corpus() {
        let _ = writeln!(out, "{:<14} {:<7} {}", f.name, f.tier.as_str(), f.description);
        items.push(json!({"name": f.name, "tier": f.tier.as_str(), "description": f.description}));
    }
    CommandOutput::new(Exit::Pass, out, json!({"command": "fixtures list", "fixtures": items}), false)
}

pub fn cmd_fixtures_run(tier: Tier, opts: &RunOptions) -> CommandOutput {
    let mut out = String::new();
    let mut results = Vec::new();
    let mut ok = true;
    for f in fixtures::corpus().into_iter().filter(|f| f.tier <= tier) {
        let outcome = fixtures::run_fixture(&f, opts);
        for line in &outcome.lines {
            let _ = writeln!(out, "{} {} {}", if line.pass { "PASS" } else { "FAIL" }, f.name, line.label);
        }
        ok &= outcome.pass();
        results.push(outcome.to_json(&f));
    }
    let _ = writeln!(out, "{}", if ok { "all fixtures pass" } else { "fixture mismatch" });
    CommandOutput::new(
        Exit::from_bool(ok),
        out,
        json!({"command": "fixtures run", "tier": tier.as_str(), "fixtures": results}),
        opts.timings,
    )
}

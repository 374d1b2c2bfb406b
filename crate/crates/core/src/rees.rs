//! Rees algebra constructions: the symmetric-algebra ideal, the Jacobian dual
//! and its blocks, the closed-form defining ideal, the saturation oracle, the
//! certificate, the special fiber, and generic specialization for modules.

use std::time::Instant;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::hypotheses::{is_block_form, HypothesisError, Normalization, PresentationInput};
use crate::ideal_ops::{
    colon, dimension, eliminate, height, ideal_equal, saturate, saturate_iterated, IdealError, IdealHandle,
};
use crate::polymatrix::{extract_linear_coeffs, minor_list, rational, MatrixError, PolyMatrix, QMatrix};
use crate::polyring::{Coeff, Polynomial, Ring, VarSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReesError {
    #[error("last row of the Jacobian dual is not (0, ..., 0, T_n): {row:?}")]
    BlockFormViolation { row: Vec<String> },
    #[error("context is not in block form; the closed form is not certified for it")]
    NotCertified,
    #[error("invalid input: {0}")]
    BadInput(String),
    #[error("no invertible specialization found within the retry budget")]
    SpecializationDegenerate,
    #[error(transparent)]
    Hypothesis(#[from] HypothesisError),
    #[error(transparent)]
    Ideal(#[from] IdealError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

impl From<crate::polyring::PolyError> for ReesError {
    fn from(e: crate::polyring::PolyError) -> Self {
        ReesError::Matrix(e.into())
    }
}

/// Names `T1..Tn` for the Rees variables.
pub fn t_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("T{i}")).collect()
}

/// Everything derived from a presentation in the big ring `k[x_1..x_d, T_1..T_n]`.
#[derive(Clone, Debug)]
pub struct ReesContext {
    pub base: PresentationInput,
    pub bigring: Ring,
    pub tring: Ring,
    pub ells: Vec<Polynomial>,
    pub l: IdealHandle,
    /// Jacobian dual, `d x m`, entries in the T-variables.
    pub b: PolyMatrix,
    /// `B` without its last row and last column.
    pub bprime: PolyMatrix,
    /// `B` with last row replaced by `(0, ..., 0, 1)`.
    pub bdoubleprime: PolyMatrix,
    /// Last row of `B` is `(0, ..., 0, T_n)`.
    pub block_form: bool,
}

impl ReesContext {
    pub fn d(&self) -> usize {
        self.base.d()
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    pub fn e(&self) -> usize {
        self.base.e()
    }

    pub fn x(&self, i: usize) -> Polynomial {
        Polynomial::var(&self.bigring, i)
    }

    pub fn t(&self, i: usize) -> Polynomial {
        Polynomial::var(&self.bigring, self.d() + i)
    }

    /// `(x_1, ..., x_{d-1})` in the big ring.
    pub fn prime_ideal(&self) -> IdealHandle {
        IdealHandle::from_vars(&self.bigring, &(0..self.d() - 1).collect::<Vec<_>>())
    }

    pub fn x_block(&self) -> Vec<usize> {
        (0..self.d()).collect()
    }

    /// `I_{d-1}(B')` in the big ring.
    pub fn bprime_minors(&self) -> Result<IdealHandle, ReesError> {
        minors_or_zero(&self.bprime, self.d() - 1)
    }

    /// Whether the size constraints for the closed form hold.
    pub fn in_setting(&self) -> bool {
        self.block_form && self.d() >= 3 && self.n() >= self.d() + self.e()
    }
}

/// `I_t(M)`, with the unit ideal for `t = 0` and the zero ideal when no `t x t` minors exist.
pub fn minors_or_zero(m: &PolyMatrix, t: usize) -> Result<IdealHandle, ReesError> {
    if t == 0 {
        return Ok(IdealHandle::unit(m.ring()));
    }
    if t > m.nrows().min(m.ncols()) {
        return Ok(IdealHandle::zero(m.ring()));
    }
    Ok(IdealHandle::new(m.ring(), minor_list(m, t)?)?)
}

/// Builds the context without requiring block form.
pub fn build_context_unchecked(p: &PresentationInput) -> Result<ReesContext, ReesError> {
    let (d, n, m) = (p.d(), p.n(), p.m());
    let xnames = p.ring().names().to_vec();
    let tn = t_names(n);
    if let Some(clash) = xnames.iter().find(|x| tn.contains(x)) {
        return Err(ReesError::BadInput(format!("variable name {clash} is reserved")));
    }
    let bigring = VarSet::new(xnames.iter().cloned().chain(tn.iter().cloned()))?;
    let tring = VarSet::new(tn)?;
    let phi = p.matrix().map_to_ring(&bigring)?;
    let ts: Vec<Polynomial> = (0..n).map(|i| Polynomial::var(&bigring, d + i)).collect();
    let ells = phi.row_times(&ts)?;

    let coeffs = extract_linear_coeffs(p.matrix(), &(0..d).collect::<Vec<_>>())?;
    let mut b = PolyMatrix::zeros(&bigring, d, m);
    for k in 0..d {
        for j in 0..m {
            let entry = (0..n).fold(Polynomial::zero(&bigring), |acc, i| {
                let c = coeffs.get(i, j, k);
                if c.is_zero() {
                    acc
                } else {
                    &acc + &ts[i].scale(c)
                }
            });
            b.set(k, j, entry);
        }
    }
    let xs: Vec<Polynomial> = (0..d).map(|i| Polynomial::var(&bigring, i)).collect();
    debug_assert_eq!(b.row_times(&xs)?, ells);

    let last = &b.rows()[d - 1];
    let block_form = (0..m).all(|j| if j + 1 == m { last[j] == ts[n - 1] } else { last[j].is_zero() });
    let bprime = b.submatrix(&(0..d - 1).collect::<Vec<_>>(), &(0..m.saturating_sub(1)).collect::<Vec<_>>());
    let mut bdoubleprime = b.clone();
    for j in 0..m {
        let v = if j + 1 == m { Polynomial::one(&bigring) } else { Polynomial::zero(&bigring) };
        bdoubleprime.set(d - 1, j, v);
    }
    let l = IdealHandle::new(&bigring, ells.clone())?;
    Ok(ReesContext { base: p.clone(), bigring, tring, ells, l, b, bprime, bdoubleprime, block_form })
}

/// Builds the context of a normalized presentation.
pub fn build_context(p: &PresentationInput) -> Result<ReesContext, ReesError> {
    let ctx = build_context_unchecked(p)?;
    if !ctx.block_form {
        let row = ctx.b.rows()[ctx.d() - 1].iter().map(|q| q.to_string()).collect();
        return Err(ReesError::BlockFormViolation { row });
    }
    Ok(ctx)
}

/// `L + I_{d-1}(B')` without any precondition check.
pub fn closed_form_candidate(ctx: &ReesContext) -> Result<IdealHandle, ReesError> {
    Ok(ctx.l.sum(&ctx.bprime_minors()?)?)
}

/// The closed-form defining ideal `L + I_{d-1}(B')`; refused off block form.
pub fn defining_ideal_closed_form(ctx: &ReesContext) -> Result<IdealHandle, ReesError> {
    if !ctx.block_form || !is_block_form(&ctx.base) {
        return Err(ReesError::NotCertified);
    }
    closed_form_candidate(ctx)
}

/// `L : (x_1, ..., x_{d-1})^∞`.
pub fn oracle_defining_ideal(ctx: &ReesContext) -> Result<IdealHandle, ReesError> {
    Ok(saturate(&ctx.l, &ctx.prime_ideal())?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum IdentityStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub statement: String,
    pub status: IdentityStatus,
    pub left: Vec<String>,
    pub right: Vec<String>,
    pub measures: Value,
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub identities: Vec<IdentityCheck>,
    pub verdict: bool,
    pub assumptions: Vec<String>,
    /// Smallest `N` with `L : p^N = L : p^∞`, when computed.
    pub stabilization_exponent: Option<usize>,
}

impl Certificate {
    fn new(identities: Vec<IdentityCheck>, assumptions: Vec<String>, stabilization_exponent: Option<usize>) -> Self {
        let verdict = identities.iter().all(|c| c.status != IdentityStatus::Fail);
        Certificate { identities, verdict, assumptions, stabilization_exponent }
    }

    pub fn identity(&self, name: &str) -> Option<&IdentityCheck> {
        self.identities.iter().find(|c| c.name == name)
    }

    pub fn passed(&self, name: &str) -> bool {
        self.identity(name).is_some_and(|c| c.status == IdentityStatus::Pass)
    }
}

fn gens(i: &IdealHandle) -> Vec<String> {
    i.canonical_generators().iter().map(|p| p.to_string()).collect()
}

fn status(ok: bool) -> IdentityStatus {
    if ok {
        IdentityStatus::Pass
    } else {
        IdentityStatus::Fail
    }
}

fn timed<T>(f: impl FnOnce() -> Result<T, ReesError>) -> Result<(T, f64), ReesError> {
    let start = Instant::now();
    let out = f()?;
    Ok((out, start.elapsed().as_secs_f64() * 1000.0))
}

fn skipped(name: &str, statement: &str) -> IdentityCheck {
    IdentityCheck {
        name: name.into(),
        statement: statement.into(),
        status: IdentityStatus::Skipped,
        left: vec![],
        right: vec![],
        measures: json!("outside the setting"),
        elapsed_ms: 0.0,
    }
}

pub const IDENTITY_NAMES: [&str; 7] = [
    "closed_form_equals_colon",
    "closed_form_equals_saturation",
    "height_and_dimension",
    "fiber_ideal_height",
    "residual_intersection",
    "fiber_ideal_two_forms",
    "special_fiber",
];

/// Result of the special fiber computation.
#[derive(Clone, Debug)]
pub struct FiberReport {
    /// Ideal of the T-ring.
    pub ideal: IdealHandle,
    pub analytic_spread: usize,
    /// The fiber ideal equals `I_{d-1}(B')` read in the T-ring.
    pub equals_bprime_minors: bool,
    /// Substituting `x = 0` into the generators gives the same ideal.
    pub substitution_agrees: bool,
}

/// Eliminates the x-block from `J + (x_1, ..., x_d)`.
pub fn special_fiber(ctx: &ReesContext, j: &IdealHandle) -> Result<FiberReport, ReesError> {
    let xs = IdealHandle::from_vars(&ctx.bigring, &ctx.x_block());
    let fiber = eliminate(&j.sum(&xs)?, &ctx.x_block())?;
    let fiber = fiber.map_to_ring(&ctx.tring)?;
    let analytic_spread = match dimension(&fiber) {
        Ok(v) => v,
        Err(IdealError::UnitIdeal) => 0,
        Err(e) => return Err(e.into()),
    };
    let bp = ctx.bprime_minors()?.map_to_ring(&ctx.tring)?;
    let equals_bprime_minors = ideal_equal(&fiber, &bp)?;
    let substituted: Vec<Polynomial> = j
        .generators()
        .iter()
        .map(|g| g.substitute_zero(&ctx.x_block()).map_to_ring(&ctx.tring))
        .collect::<Result<_, _>>()?;
    let substitution_agrees = ideal_equal(&fiber, &IdealHandle::new(&ctx.tring, substituted)?)?;
    Ok(FiberReport { ideal: fiber, analytic_spread, equals_bprime_minors, substitution_agrees })
}

/// Runs the seven identities of the certificate.
pub fn verify_theorem(ctx: &ReesContext) -> Result<Certificate, ReesError> {
    let (d, n, e) = (ctx.d(), ctx.n(), ctx.e());
    let mut out = Vec::new();
    let closed = closed_form_candidate(ctx)?;
    let p = ctx.prime_ideal();

    let (col, ms) = timed(|| Ok(colon(&ctx.l, &p)?))?;
    out.push(IdentityCheck {
        name: IDENTITY_NAMES[0].into(),
        statement: "L + I_{d-1}(B') = L : (x_1..x_{d-1})".into(),
        status: status(ideal_equal(&closed, &col)?),
        left: gens(&closed),
        right: gens(&col),
        measures: Value::Null,
        elapsed_ms: ms,
    });

    let ((sat, chain), ms) = timed(|| {
        let sat = oracle_defining_ideal(ctx)?;
        let chain = saturate_iterated(&ctx.l, &p, 8)?;
        Ok((sat, chain))
    })?;
    let chain_agrees = ideal_equal(chain.steps.last().unwrap(), &sat)?;
    out.push(IdentityCheck {
        name: IDENTITY_NAMES[1].into(),
        statement: "L + I_{d-1}(B') = L : (x_1..x_{d-1})^∞".into(),
        status: status(ideal_equal(&closed, &sat)?),
        left: gens(&closed),
        right: gens(&sat),
        measures: json!({"stabilization_exponent": chain.exponent, "iterated_colon_agrees": chain_agrees}),
        elapsed_ms: ms,
    });
    let exponent = Some(chain.exponent);

    let mut assumptions = vec!["perfection of the presented ideal is assumed, not certified".to_string()];
    if e > 1 {
        assumptions
            .push("module case: the oracle is saturation-based (torsion identified with x-block saturation)".into());
    }

    if !ctx.in_setting() {
        for (k, st) in [
            "ht = n - e and dim = d + e",
            "ht I_{d-1}(B') in k[T] = n - d - e + 1",
            "L : (x_1..x_{d-1}, x_d T_n) = L + I_d(B'')",
            "I_{d-1}(B') = I_d(B'')",
            "fiber ideal = I_{d-1}(B')",
        ]
        .iter()
        .enumerate()
        {
            out.push(skipped(IDENTITY_NAMES[k + 2], st));
        }
        return Ok(Certificate::new(out, assumptions, exponent));
    }

    let ((ht, dim), ms) = timed(|| Ok((height(&closed)?, dimension(&closed)?)))?;
    out.push(IdentityCheck {
        name: IDENTITY_NAMES[2].into(),
        statement: "ht = n - e and dim = d + e".into(),
        status: status(ht == n - e && dim == d + e),
        left: vec![],
        right: vec![],
        measures: json!({"height": ht, "dimension": dim, "expected_height": n - e, "expected_dimension": d + e}),
        elapsed_ms: ms,
    });

    let bp = ctx.bprime_minors()?;
    let (bp_ht, ms) = timed(|| Ok(height(&bp.map_to_ring(&ctx.tring)?)?))?;
    let expected = n + 1 - d - e;
    out.push(IdentityCheck {
        name: IDENTITY_NAMES[3].into(),
        statement: "ht I_{d-1}(B') in k[T] = n - d - e + 1".into(),
        status: status(bp_ht == expected),
        left: gens(&bp),
        right: vec![],
        measures: json!({"height": bp_ht, "expected": expected}),
        elapsed_ms: ms,
    });

    let bdd = minors_or_zero(&ctx.bdoubleprime, d)?;
    let ((res_left, res_right), ms) = timed(|| {
        let mut kgens: Vec<Polynomial> = (0..d - 1).map(|i| ctx.x(i)).collect();
        kgens.push(&ctx.x(d - 1) * &ctx.t(n - 1));
        let k = IdealHandle::new(&ctx.bigring, kgens)?;
        Ok((colon(&ctx.l, &k)?, ctx.l.sum(&bdd)?))
    })?;
    out.push(IdentityCheck {
        name: IDENTITY_NAMES[4].into(),
        statement: "L : (x_1..x_{d-1}, x_d T_n) = L + I_d(B'')".into(),
        status: status(ideal_equal(&res_left, &res_right)?),
        left: gens(&res_left),
        right: gens(&res_right),
        measures: Value::Null,
        elapsed_ms: ms,
    });

    let (eq, ms) = timed(|| Ok(ideal_equal(&bp, &bdd)?))?;
    out.push(IdentityCheck {
        name: IDENTITY_NAMES[5].into(),
        statement: "I_{d-1}(B') = I_d(B'')".into(),
        status: status(eq),
        left: gens(&bp),
        right: gens(&bdd),
        measures: Value::Null,
        elapsed_ms: ms,
    });

    let (fib, ms) = timed(|| special_fiber(ctx, &sat))?;
    let ok = fib.equals_bprime_minors && fib.substitution_agrees && fib.analytic_spread == d + e - 1;
    out.push(IdentityCheck {
        name: IDENTITY_NAMES[6].into(),
        statement: "fiber ideal = I_{d-1}(B'), analytic spread d + e - 1".into(),
        status: status(ok),
        left: gens(&fib.ideal),
        right: gens(&bp.map_to_ring(&ctx.tring)?),
        measures: json!({
            "analytic_spread": fib.analytic_spread,
            "expected": d + e - 1,
            "substitution_agrees": fib.substitution_agrees,
        }),
        elapsed_ms: ms,
    });

    Ok(Certificate::new(out, assumptions, exponent))
}

/// A generic specialization of a module presentation to an ideal presentation.
#[derive(Clone, Debug)]
pub struct Specialization {
    /// `Z`, an `n x (e-1)` rational matrix.
    pub z: QMatrix,
    /// Bottom `(n-e+1) x (n-e)` block of `(G^T)^{-1} phi`.
    pub psi: PresentationInput,
    /// `Y_j = sum_i Z_ij T_i`, as rows of length `n`: `ymatrix[j][i] = Z_ij`.
    pub ymatrix: QMatrix,
}

/// Specialization at a given `Z`.
pub fn specialize_with(p: &PresentationInput, z: &QMatrix) -> Result<Specialization, ReesError> {
    let (n, e) = (p.n(), p.e());
    if e < 2 {
        return Err(ReesError::BadInput("specialization needs rank at least 2".into()));
    }
    if z.len() != n || z.iter().any(|r| r.len() != e - 1) {
        return Err(ReesError::BadInput("Z must be n x (e - 1)".into()));
    }
    let ymatrix = rational::transpose(z);
    let mut g = ymatrix.clone();
    for k in e - 1..n {
        g.push((0..n).map(|i| if i == k { Coeff::from_integer(1.into()) } else { Coeff::zero() }).collect());
    }
    let gt_inv = rational::inverse(&rational::transpose(&g)).ok_or(ReesError::SpecializationDegenerate)?;
    let tilde = p.matrix().scalar_left(&gt_inv);
    let psi = tilde.submatrix(&(e - 1..n).collect::<Vec<_>>(), &(0..p.m()).collect::<Vec<_>>());
    Ok(Specialization { z: z.clone(), psi: PresentationInput::new(psi, 1)?, ymatrix })
}

pub const SPECIALIZATION_BOUND: i64 = 10_000;
pub const SPECIALIZATION_RETRIES: usize = 5;

/// Draws `Z` uniformly from integers in `[-10^4, 10^4]` with a seeded generator.
pub fn bourbaki_specialize(p: &PresentationInput, seed: u64) -> Result<Specialization, ReesError> {
    if p.e() < 2 {
        return Err(ReesError::BadInput("specialization needs rank at least 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..SPECIALIZATION_RETRIES {
        let z: QMatrix = (0..p.n())
            .map(|_| {
                (0..p.e() - 1)
                    .map(|_| Coeff::from_integer(rng.gen_range(-SPECIALIZATION_BOUND..=SPECIALIZATION_BOUND).into()))
                    .collect()
            })
            .collect();
        match specialize_with(p, &z) {
            Err(ReesError::SpecializationDegenerate) => continue,
            other => return other,
        }
    }
    Err(ReesError::SpecializationDegenerate)
}

/// Compares the module context with the ideal context of a specialization:
/// `L_E + (Y) = L_psi + (Y)` and `L_E + I_{d-1}(B'_E) + (Y) = L_psi + I_{d-1}(B'_psi) + (Y)`,
/// with the T-variables of `psi` read as `T_e, ..., T_n`.
pub fn verify_deformation(
    module: &ReesContext,
    ideal_side: &ReesContext,
    spec: &Specialization,
) -> Result<Certificate, ReesError> {
    let (d, n, e) = (module.d(), module.n(), module.e());
    if e == 1 {
        return Ok(Certificate::new(vec![], vec!["rank one: nothing to specialize".into()], None));
    }
    if ideal_side.n() + e - 1 != n || ideal_side.d() != d {
        return Err(ReesError::BadInput("specialization does not match the module".into()));
    }
    let big = &module.bigring;
    let mut images: Vec<Polynomial> = (0..d).map(|i| Polynomial::var(big, i)).collect();
    images.extend((0..ideal_side.n()).map(|k| Polynomial::var(big, d + k + e - 1)));
    let ys: Vec<Polynomial> = spec
        .ymatrix
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .fold(Polynomial::zero(big), |acc, (i, c)| &acc + &Polynomial::var(big, d + i).scale(c))
        })
        .collect();
    let y = IdealHandle::new(big, ys)?;

    let mut out = Vec::new();
    let (ok, ms) = timed(|| {
        let left = module.l.sum(&y)?;
        let right = ideal_side.l.substitute(big, &images)?.sum(&y)?;
        Ok((ideal_equal(&left, &right)?, gens(&left), gens(&right)))
    })?;
    out.push(IdentityCheck {
        name: "symmetric_ideal_specializes".into(),
        statement: "L_E + (Y) = L_psi + (Y)".into(),
        status: status(ok.0),
        left: ok.1,
        right: ok.2,
        measures: Value::Null,
        elapsed_ms: ms,
    });
    let (ok, ms) = timed(|| {
        let left = closed_form_candidate(module)?.sum(&y)?;
        let right = closed_form_candidate(ideal_side)?.substitute(big, &images)?.sum(&y)?;
        Ok((ideal_equal(&left, &right)?, gens(&left), gens(&right)))
    })?;
    out.push(IdentityCheck {
        name: "closed_form_specializes".into(),
        statement: "L_E + I_{d-1}(B'_E) + (Y) = L_psi + I_{d-1}(B'_psi) + (Y)".into(),
        status: status(ok.0),
        left: ok.1,
        right: ok.2,
        measures: Value::Null,
        elapsed_ms: ms,
    });
    let assumptions = vec!["equalities hold at one random point; failure suggests a non-generic draw".into()];
    Ok(Certificate::new(out, assumptions, None))
}

/// Rewrites an ideal of the normalized big ring in the original coordinates:
/// `T = S * U^{-1}` on the Rees variables and `x_new = A^{-1} x` when a
/// coordinate change `A` was applied. Variables are matched by name.
pub fn pull_back(
    ideal: &IdealHandle,
    original_x: &Ring,
    normalization: &Normalization,
    coordinate_change: Option<&QMatrix>,
) -> Result<IdealHandle, ReesError> {
    let src = ideal.ring();
    let n = normalization.u.len();
    let d = original_x.len();
    let target = VarSet::new(original_x.names().iter().cloned().chain(t_names(n)))?;
    let u_inv = rational::inverse(&normalization.u).ok_or(ReesError::SpecializationDegenerate)?;
    let a_inv = match coordinate_change {
        Some(a) => Some(rational::inverse(a).ok_or_else(|| ReesError::BadInput("singular coordinate change".into()))?),
        None => None,
    };
    let mut images = Vec::with_capacity(src.len());
    for name in src.names() {
        if let Some(xi) = original_x.index_of(name) {
            let img = match &a_inv {
                Some(ai) => (0..d)
                    .fold(Polynomial::zero(&target), |acc, k| &acc + &Polynomial::var(&target, k).scale(&ai[xi][k])),
                None => Polynomial::var(&target, xi),
            };
            images.push(img);
        } else {
            let k: usize = name[1..].parse().map_err(|_| ReesError::BadInput(format!("unexpected variable {name}")))?;
            let img = (0..n).fold(Polynomial::zero(&target), |acc, i| {
                &acc + &Polynomial::var(&target, d + i).scale(&u_inv[i][k - 1])
            });
            images.push(img);
        }
    }
    Ok(ideal.substitute(&target, &images)?)
}

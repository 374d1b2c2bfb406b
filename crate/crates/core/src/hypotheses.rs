//! Hypothesis checks for a linear presentation: the G_s conditions, Fitting
//! heights, the distinguished variable prime, and normalization to block form.

use std::collections::HashMap;
use std::sync::Mutex;

use num_traits::Zero;
use serde_json::{json, Value};
use thiserror::Error;

use crate::ideal_ops::{
    height, height_lower_bound, ideal_equal, radical_member, variable_prime_containing, IdealError, IdealHandle,
};
use crate::polymatrix::{
    extract_linear_coeffs, fitting_ideal, rank_mod_vars, rational, MatrixError, PolyMatrix, QMatrix,
};
use crate::polyring::{Coeff, Polynomial, Ring, VarSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HypothesisError {
    #[error("invalid presentation: {0}")]
    BadInput(String),
    #[error("hypothesis failure: {0}")]
    HypothesisFailure(String),
    #[error("no variable subset is the unique minimal prime")]
    NotFound { witnesses: Vec<PrimeWitness> },
    #[error("matrix has rank {rank} modulo the prime, not 1")]
    RankNotOne { rank: usize },
    #[error("rank-one decomposition failed")]
    DecompositionFailure,
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Ideal(#[from] IdealError),
}

/// Height of an ideal, `None` for the unit ideal.
pub type Height = Option<usize>;

/// Known height bounds of `Fitt_i` as `[lower, upper]`.
fn bounds_json(p: &PresentationInput, i: usize) -> Value {
    match p.known_height_bounds(i) {
        Some((lo, hi)) => json!([lo, hi]),
        None => Value::Null,
    }
}

/// A presentation matrix `n x m` over the x-ring with declared cokernel rank `e`.
pub struct PresentationInput {
    ring: Ring,
    matrix: PolyMatrix,
    rank_e: usize,
    ideals: Mutex<HashMap<usize, IdealHandle>>,
    heights: Mutex<HashMap<usize, Height>>,
    /// Known `(lower, upper)` height bounds, from cheap certificates.
    bounds: Mutex<HashMap<usize, (usize, usize)>>,
}

impl Clone for PresentationInput {
    fn clone(&self) -> Self {
        PresentationInput {
            ring: self.ring.clone(),
            matrix: self.matrix.clone(),
            rank_e: self.rank_e,
            ideals: Mutex::new(self.ideals.lock().unwrap().clone()),
            heights: Mutex::new(self.heights.lock().unwrap().clone()),
            bounds: Mutex::new(self.bounds.lock().unwrap().clone()),
        }
    }
}

impl std::fmt::Debug for PresentationInput {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PresentationInput")
            .field("ring", &self.ring.names())
            .field("rank_e", &self.rank_e)
            .field("matrix", &self.matrix.to_strings())
            .finish()
    }
}

impl PresentationInput {
    pub fn new(matrix: PolyMatrix, rank_e: usize) -> Result<Self, HypothesisError> {
        if rank_e == 0 {
            return Err(HypothesisError::BadInput("rank must be positive".into()));
        }
        if matrix.ncols() + rank_e != matrix.nrows() {
            return Err(HypothesisError::BadInput(format!(
                "a {}x{} matrix cannot present a module of rank {rank_e}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(PresentationInput {
            ring: matrix.ring().clone(),
            matrix,
            rank_e,
            ideals: Mutex::new(HashMap::new()),
            heights: Mutex::new(HashMap::new()),
            bounds: Mutex::new(HashMap::new()),
        })
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn matrix(&self) -> &PolyMatrix {
        &self.matrix
    }

    pub fn d(&self) -> usize {
        self.ring.len()
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn m(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn e(&self) -> usize {
        self.rank_e
    }

    pub fn fitting(&self, i: usize) -> Result<IdealHandle, HypothesisError> {
        if let Some(f) = self.ideals.lock().unwrap().get(&i) {
            return Ok(f.clone());
        }
        let f = match fitting_ideal(&self.matrix, i) {
            Ok(f) => f,
            Err(MatrixError::BadIndex { .. }) => IdealHandle::zero(&self.ring),
            Err(e) => return Err(e.into()),
        };
        self.ideals.lock().unwrap().insert(i, f.clone());
        Ok(f)
    }

    /// Whether `ht Fitt_i >= k`. Tries the leading-monomial lower bound and
    /// containment in a variable prime before computing the exact height.
    pub fn fitting_height_at_least(&self, i: usize, k: usize) -> Result<bool, HypothesisError> {
        if let Some(h) = self.heights.lock().unwrap().get(&i) {
            return Ok(h.map_or(true, |h| h >= k));
        }
        if let Some(&(lo, hi)) = self.bounds.lock().unwrap().get(&i) {
            if lo >= k {
                return Ok(true);
            }
            if hi < k {
                return Ok(false);
            }
        }
        let f = self.fitting(i)?;
        if f.generators().iter().any(|g| g.is_constant() && !g.is_zero()) {
            self.heights.lock().unwrap().insert(i, None);
            return Ok(true);
        }
        let lo = height_lower_bound(&f);
        let mut hi = self.d();
        if lo < k && k >= 1 {
            if variable_prime_containing(&f, k - 1).is_some() {
                hi = k - 1;
            }
        }
        self.bounds.lock().unwrap().insert(i, (lo, hi));
        if lo >= k {
            return Ok(true);
        }
        if hi < k {
            return Ok(false);
        }
        Ok(self.fitting_height(i)?.map_or(true, |h| h >= k))
    }

    /// Best known `(lower, upper)` bounds on `ht Fitt_i` without new work.
    pub fn known_height_bounds(&self, i: usize) -> Option<(usize, usize)> {
        if let Some(h) = self.heights.lock().unwrap().get(&i) {
            let v = h.unwrap_or(self.d());
            return Some((v, v));
        }
        self.bounds.lock().unwrap().get(&i).copied()
    }

    /// Height of `Fitt_i`, memoized.
    pub fn fitting_height(&self, i: usize) -> Result<Height, HypothesisError> {
        if let Some(h) = self.heights.lock().unwrap().get(&i) {
            return Ok(*h);
        }
        let f = self.fitting(i)?;
        let h = match height(&f) {
            Ok(h) => Some(h),
            Err(IdealError::UnitIdeal) => None,
            Err(e) => return Err(e.into()),
        };
        self.heights.lock().unwrap().insert(i, h);
        Ok(h)
    }

    /// Substitutes `x_i -> sum_j A_ij x_j` in every entry.
    pub fn with_coordinate_change(&self, a: &QMatrix) -> Result<PresentationInput, HypothesisError> {
        let d = self.d();
        if !rational::is_square(a, d) || rational::rank(a) < d {
            return Err(HypothesisError::BadInput("coordinate change must be an invertible d x d matrix".into()));
        }
        let images: Vec<Polynomial> = a
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .fold(Polynomial::zero(&self.ring), |acc, (j, c)| &acc + &Polynomial::var(&self.ring, j).scale(c))
            })
            .collect();
        let mut entries = Vec::with_capacity(self.n());
        for row in self.matrix.rows() {
            entries.push(
                row.iter()
                    .map(|p| p.substitute(&self.ring, &images))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(MatrixError::from)?,
            );
        }
        PresentationInput::new(PolyMatrix::new(&self.ring, entries)?, self.rank_e)
    }
}

/// `G_s`: `ht Fitt_i >= i - e + 2` for `e <= i <= s + e - 2`.
pub fn check_gs(p: &PresentationInput, s: usize) -> Result<bool, HypothesisError> {
    let e = p.e();
    for i in e..(s + e).saturating_sub(1) {
        if !p.fitting_height_at_least(i, i + 2 - e)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Largest `s <= d` for which `G_s` holds (`G_1` always holds).
pub fn largest_gs(p: &PresentationInput) -> Result<usize, HypothesisError> {
    let mut s = 1;
    while s < p.d() && check_gs(p, s + 1)? {
        s += 1;
    }
    Ok(s)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightProfile {
    pub s: usize,
    /// `(index, height)` for `Fitt_{s+e-2}` and `Fitt_{s+e-1}`.
    pub lower: (usize, Height),
    pub upper: (usize, Height),
}

/// For input satisfying `G_s` but not `G_{s+1}`: both `Fitt_{s+e-2}` and
/// `Fitt_{s+e-1}` have height exactly `s`.
pub fn check_height_profile_at(p: &PresentationInput, s: usize) -> Result<HeightProfile, HypothesisError> {
    if s < 2 {
        return Err(HypothesisError::BadInput("height profile needs s >= 2".into()));
    }
    if !check_gs(p, s)? || check_gs(p, s + 1)? {
        return Err(HypothesisError::HypothesisFailure(format!("input does not satisfy G_{s} but not G_{}", s + 1)));
    }
    let e = p.e();
    let (i, j) = (s + e - 2, s + e - 1);
    // Fitt_i is contained in Fitt_j, so ht Fitt_i <= ht Fitt_j.
    let lower_ok = p.fitting_height_at_least(i, s)?;
    let upper_ok = !p.fitting_height_at_least(j, s + 1)?;
    if !lower_ok || !upper_ok {
        return Err(HypothesisError::HypothesisFailure(format!(
            "ht Fitt_{i} >= {s}: {lower_ok}, ht Fitt_{j} <= {s}: {upper_ok}"
        )));
    }
    Ok(HeightProfile { s, lower: (i, Some(s)), upper: (j, Some(s)) })
}

/// The profile at `s = d - 1`.
pub fn check_height_profile(p: &PresentationInput) -> Result<HeightProfile, HypothesisError> {
    check_height_profile_at(p, p.d() - 1)
}

/// Outcome of testing one variable subset against the Fitting ideal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeWitness {
    pub vars: Vec<usize>,
    /// Every generator vanishes modulo the subset.
    pub contained: bool,
    /// First variable of the subset outside the radical, if any.
    pub failing_var: Option<usize>,
}

impl PrimeWitness {
    pub fn passes(&self) -> bool {
        self.contained && self.failing_var.is_none()
    }
}

fn test_subset(f: &IdealHandle, vars: &[usize]) -> Result<PrimeWitness, HypothesisError> {
    let contained = f.generators().iter().all(|g| g.substitute_zero(vars).is_zero());
    let mut failing_var = None;
    if contained {
        for &v in vars {
            if !radical_member(&Polynomial::var(f.ring(), v), f)? {
                failing_var = Some(v);
                break;
            }
        }
    }
    Ok(PrimeWitness { vars: vars.to_vec(), contained, failing_var })
}

/// Searches the `(d-1)`-subsets of the variables for `S` with `sqrt(Fitt_{d+e-2}) = (S)`.
pub fn find_distinguished_prime(p: &PresentationInput) -> Result<Vec<usize>, HypothesisError> {
    let d = p.d();
    let f = p.fitting(d + p.e() - 2)?;
    let mut witnesses = Vec::new();
    for skip in (0..d).rev() {
        let vars: Vec<usize> = (0..d).filter(|&v| v != skip).collect();
        let w = test_subset(&f, &vars)?;
        if w.passes() {
            return Ok(vars);
        }
        witnesses.push(w);
    }
    Err(HypothesisError::NotFound { witnesses })
}

/// Data produced by normalization: the presentation in the permuted ring is
/// `U * phi * V`, with the single nonzero entry modulo the prime in the corner.
#[derive(Clone, Debug)]
pub struct Normalization {
    /// `permutation[k]` is the original index of the variable now in position `k`.
    pub permutation: Vec<usize>,
    pub u: QMatrix,
    pub v: QMatrix,
    pub presentation: PresentationInput,
}

/// `W` whose last column is `w` and whose other columns are the standard
/// vectors `e_k` for `k != pivot`; invertible because `w[pivot] != 0`.
fn completion(w: &[Coeff], pivot: usize) -> QMatrix {
    let n = w.len();
    let mut cols: Vec<Vec<Coeff>> = (0..n)
        .filter(|&k| k != pivot)
        .map(|k| (0..n).map(|i| if i == k { Coeff::from_integer(1.into()) } else { Coeff::zero() }).collect())
        .collect();
    cols.push(w.to_vec());
    rational::transpose(&cols)
}

pub fn normalize_block_form(p: &PresentationInput, prime_vars: &[usize]) -> Result<Normalization, HypothesisError> {
    let d = p.d();
    if prime_vars.len() + 1 != d {
        return Err(HypothesisError::BadInput("prime must consist of d - 1 variables".into()));
    }
    let last = (0..d).find(|v| !prime_vars.contains(v)).ok_or(HypothesisError::DecompositionFailure)?;
    let mut permutation = prime_vars.to_vec();
    permutation.push(last);
    let names: Vec<String> = permutation.iter().map(|&i| p.ring.name(i).to_string()).collect();
    let ring = VarSet::new(names).map_err(MatrixError::from)?;
    let phi = p.matrix.map_to_ring(&ring)?;
    let prime: Vec<usize> = (0..d - 1).collect();

    let reduced = phi.substitute_zero(&prime);
    let coeffs = extract_linear_coeffs(&reduced, &[d - 1])?;
    let c: QMatrix = coeffs.c.iter().map(|r| r.iter().map(|v| v[0].clone()).collect()).collect();
    let rank = rational::rank(&c);
    if rank != 1 {
        return Err(HypothesisError::RankNotOne { rank });
    }
    let (n, m) = (p.n(), p.m());
    let j0 = (0..m).find(|&j| (0..n).any(|i| !c[i][j].is_zero())).ok_or(HypothesisError::DecompositionFailure)?;
    let u_vec: Vec<Coeff> = (0..n).map(|i| c[i][j0].clone()).collect();
    let i0 = (0..n).find(|&i| !u_vec[i].is_zero()).ok_or(HypothesisError::DecompositionFailure)?;
    let v_vec: Vec<Coeff> = (0..m).map(|j| &c[i0][j] / &u_vec[i0]).collect();
    for i in 0..n {
        for j in 0..m {
            if c[i][j] != &u_vec[i] * &v_vec[j] {
                return Err(HypothesisError::DecompositionFailure);
            }
        }
    }
    let u = rational::inverse(&completion(&u_vec, i0)).ok_or(HypothesisError::DecompositionFailure)?;
    let wv_inv = rational::inverse(&completion(&v_vec, j0)).ok_or(HypothesisError::DecompositionFailure)?;
    let v = rational::transpose(&wv_inv);
    let normalized = crate::polymatrix::field_row_col_ops(&phi, &u, &v)?;
    Ok(Normalization { permutation, u, v, presentation: PresentationInput::new(normalized, p.e())? })
}

/// Whether the matrix is already in block form for the prime `x_1..x_{d-1}`.
pub fn is_block_form(p: &PresentationInput) -> bool {
    let d = p.d();
    let prime: Vec<usize> = (0..d - 1).collect();
    let reduced = p.matrix.substitute_zero(&prime);
    let xd = Polynomial::var(&p.ring, d - 1);
    (0..p.n()).all(|i| {
        (0..p.m()).all(|j| {
            let e = reduced.entry(i, j);
            if i + 1 == p.n() && j + 1 == p.m() {
                *e == xd
            } else {
                e.is_zero()
            }
        })
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct CheckResult {
    pub name: String,
    pub status: CheckStatus,
    pub detail: String,
    pub witness: Value,
}

/// Ordered results of every hypothesis check.
#[derive(Clone, Debug)]
pub struct HypothesisReport {
    pub checks: Vec<CheckResult>,
    /// Presentation after any coordinate change, before normalization.
    pub input: PresentationInput,
    pub prime_p: Option<Vec<usize>>,
    pub normalized: Option<Normalization>,
    pub largest_gs: Option<usize>,
    /// Rank-one failure with `n = d + e`, where the rank condition should be automatic.
    pub rank_condition_contradiction: bool,
    pub notes: Vec<String>,
}

impl HypothesisReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.status == CheckStatus::Pass)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn first_failure(&self) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.status == CheckStatus::Fail)
    }

    pub fn to_json(&self) -> Value {
        let names = self.input.ring().names();
        json!({
            "checks": self.checks,
            "all_pass": self.all_pass(),
            "prime": self.prime_p.as_ref().map(|s| s.iter().map(|&i| names[i].clone()).collect::<Vec<_>>()),
            "largest_gs": self.largest_gs,
            "rank_condition_contradiction": self.rank_condition_contradiction,
            "normalized": self.normalized.as_ref().map(|nz| json!({
                "variables": nz.presentation.ring().names(),
                "U": qmatrix_json(&nz.u),
                "V": qmatrix_json(&nz.v),
                "matrix": nz.presentation.matrix().to_strings(),
            })),
            "notes": self.notes,
        })
    }
}

pub fn qmatrix_json(a: &QMatrix) -> Value {
    json!(a.iter().map(|r| r.iter().map(|c| c.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>())
}

pub const CHECK_NAMES: [&str; 8] = [
    "linear_entries",
    "maximal_content",
    "size_constraints",
    "height_two",
    "g_d_minus_1",
    "not_g_d",
    "distinguished_prime",
    "rank_one",
];

/// Runs every check in order, stopping at the first failure.
pub fn check_setting(
    p: &PresentationInput,
    coordinate_change: Option<&QMatrix>,
) -> Result<HypothesisReport, HypothesisError> {
    let input = match coordinate_change {
        Some(a) => p.with_coordinate_change(a)?,
        None => p.clone(),
    };
    let mut report = HypothesisReport {
        checks: Vec::new(),
        input: input.clone(),
        prime_p: None,
        normalized: None,
        largest_gs: None,
        rank_condition_contradiction: false,
        notes: vec!["perfection of the ideal of maximal minors is assumed, not certified".into()],
    };
    let p = &input;
    let (d, n, m, e) = (p.d(), p.n(), p.m(), p.e());
    let all_vars: Vec<usize> = (0..d).collect();
    let mut failed = false;
    let push = |report: &mut HypothesisReport, name: &str, ok: bool, detail: String, witness: Value| {
        report.checks.push(CheckResult {
            name: name.into(),
            status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
            detail,
            witness,
        });
        ok
    };

    let lin = extract_linear_coeffs(p.matrix(), &all_vars);
    let ok = match &lin {
        Ok(_) => push(&mut report, CHECK_NAMES[0], true, "all entries are linear forms".into(), Value::Null),
        Err(MatrixError::NonLinearEntry { row, col }) => push(
            &mut report,
            CHECK_NAMES[0],
            false,
            format!("entry ({row}, {col}) is not a linear form"),
            json!({"row": row, "col": col}),
        ),
        Err(err) => return Err(err.clone().into()),
    };
    failed |= !ok;

    if !failed {
        let i1 = p.fitting(n - 1)?;
        let eq = ideal_equal(&i1, &IdealHandle::from_vars(p.ring(), &all_vars))?;
        failed |=
            !push(&mut report, CHECK_NAMES[1], eq, "I_1 equals the maximal ideal of variables".into(), Value::Null);
    }

    if !failed {
        let ok = d >= 3 && n >= d + e && m + e == n;
        failed |= !push(
            &mut report,
            CHECK_NAMES[2],
            ok,
            format!("d = {d}, n = {n}, m = {m}, e = {e}; need d >= 3, n >= d + e, m = n - e"),
            json!({"d": d, "n": n, "m": m, "e": e}),
        );
    }

    if !failed {
        // ht I_m(phi) <= n - m + 1 = e + 1 always holds for maximal minors.
        let ok = p.fitting_height_at_least(e, 2)?;
        failed |= !push(
            &mut report,
            CHECK_NAMES[3],
            ok,
            format!("ht I_{}(phi) >= 2", n - e),
            json!({"height_bounds": bounds_json(p, e)}),
        );
    }

    if !failed {
        let gd1 = check_gs(p, d - 1)?;
        let s = largest_gs(p)?;
        let heights: Vec<Value> = (e..d + e)
            .filter_map(|i| {
                p.known_height_bounds(i)
                    .map(|_| json!({"index": i, "required": i + 2 - e, "bounds": bounds_json(p, i)}))
            })
            .collect();
        report.largest_gs = Some(s);
        let ok = push(
            &mut report,
            CHECK_NAMES[4],
            gd1,
            format!("G_{} (largest G_s: s = {s})", d - 1),
            json!({"fitting_heights": heights, "largest_s": s}),
        );
        if !ok {
            report
                .notes
                .push(format!("G_{} fails; the closed form does not apply (G_s regime with s = {s} < d - 1)", d - 1));
            if s >= 2 {
                if let Ok(profile) = check_height_profile_at(p, s) {
                    report
                        .notes
                        .push(format!("ht Fitt_{} = ht Fitt_{} = {}", profile.lower.0, profile.upper.0, profile.s));
                }
            }
        }
        failed |= !ok;
        if !failed {
            let gd = check_gs(p, d)?;
            let ok = push(&mut report, CHECK_NAMES[5], !gd, format!("G_{d} must fail"), Value::Null);
            if !ok {
                report.notes.push(format!(
                    "G_{d} holds; the defining ideal is known from the G_d theory for linearly presented ideals"
                ));
            }
            failed |= !ok;
        }
    }

    if !failed {
        match find_distinguished_prime(p) {
            Ok(vars) => {
                let names: Vec<&str> = vars.iter().map(|&i| p.ring().name(i)).collect();
                push(
                    &mut report,
                    CHECK_NAMES[6],
                    true,
                    format!("sqrt(Fitt_{}) = ({})", d + e - 2, names.join(", ")),
                    json!(names),
                );
                report.prime_p = Some(vars);
            }
            Err(HypothesisError::NotFound { witnesses }) => {
                let w: Vec<Value> = witnesses
                    .iter()
                    .map(|w| {
                        json!({
                            "vars": w.vars.iter().map(|&i| p.ring().name(i)).collect::<Vec<_>>(),
                            "contained": w.contained,
                            "not_in_radical": w.failing_var.map(|i| p.ring().name(i)),
                        })
                    })
                    .collect();
                push(
                    &mut report,
                    CHECK_NAMES[6],
                    false,
                    "no variable subset is the unique minimal prime".into(),
                    json!(w),
                );
                failed = true;
            }
            Err(err) => return Err(err),
        }
    }

    if !failed {
        let prime = report.prime_p.clone().unwrap();
        let rank = rank_mod_vars(p.matrix(), &prime);
        match normalize_block_form(p, &prime) {
            Ok(nz) => {
                push(&mut report, CHECK_NAMES[7], true, "rank 1 modulo the prime".into(), json!({"rank": rank}));
                report.normalized = Some(nz);
            }
            Err(HypothesisError::RankNotOne { rank }) => {
                push(
                    &mut report,
                    CHECK_NAMES[7],
                    false,
                    format!("rank {rank} modulo the prime"),
                    json!({"rank": rank}),
                );
                if n == d + e {
                    report.rank_condition_contradiction = true;
                    report.notes.push("rank condition fails although n = d + e, where it holds automatically".into());
                }
            }
            Err(err) => return Err(err),
        }
    }

    for name in CHECK_NAMES.iter().skip(report.checks.len()) {
        report.checks.push(CheckResult {
            name: (*name).into(),
            status: CheckStatus::Skipped,
            detail: "not reached".into(),
            witness: Value::Null,
        });
    }
    Ok(report)
}

//! Python bindings for reeskit.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use reeskit::cli::{fixtures, CliError, InputDocument};
use reeskit::hypotheses::{self as hyp, HypothesisReport};
use reeskit::ideal_ops::{self as ops, IdealHandle};
use reeskit::polymatrix::PolyMatrix;
use reeskit::polyring::{parse_poly, MonomialOrder, Polynomial, Ring, VarSet};
use reeskit::rees::{self, Certificate};

fn value_err(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err(e: impl ToString) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn strings(gens: &[Polynomial]) -> Vec<String> {
    gens.iter().map(|g| g.to_string()).collect()
}

fn parse_order(order: &str) -> PyResult<MonomialOrder> {
    order.parse().map_err(value_err)
}

/// An ideal of a polynomial ring over the rationals.
#[pyclass(name = "Ideal", module = "reeskit")]
#[derive(Clone)]
pub struct PyIdeal {
    inner: IdealHandle,
}

#[pymethods]
impl PyIdeal {
    #[new]
    fn new(vars: Vec<String>, generators: Vec<String>) -> PyResult<Self> {
        let ring = VarSet::new(vars).map_err(value_err)?;
        let gens = generators.iter().map(|g| parse_poly(g, &ring)).collect::<Result<Vec<_>, _>>().map_err(value_err)?;
        Ok(PyIdeal { inner: IdealHandle::new(&ring, gens).map_err(value_err)? })
    }

    #[getter]
    fn vars(&self) -> Vec<String> {
        self.inner.ring().names().to_vec()
    }

    #[getter]
    fn generators(&self) -> Vec<String> {
        strings(self.inner.generators())
    }

    /// Reduced Groebner basis, with primitive integer coefficients.
    #[pyo3(signature = (order = "degrevlex"))]
    fn groebner_basis(&self, order: &str) -> PyResult<Vec<String>> {
        let gb = self.inner.gb(parse_order(order)?);
        Ok(gb.generators().iter().map(|g| g.primitive().to_string()).collect())
    }

    fn contains(&self, poly: &str) -> PyResult<bool> {
        let p = parse_poly(poly, self.inner.ring()).map_err(value_err)?;
        Ok(self.inner.contains(&p))
    }

    fn radical_contains(&self, poly: &str) -> PyResult<bool> {
        let p = parse_poly(poly, self.inner.ring()).map_err(value_err)?;
        ops::radical_member(&p, &self.inner).map_err(runtime_err)
    }

    fn equals(&self, other: &PyIdeal) -> PyResult<bool> {
        ops::ideal_equal(&self.inner, &other.inner).map_err(value_err)
    }

    fn __add__(&self, other: &PyIdeal) -> PyResult<PyIdeal> {
        Ok(PyIdeal { inner: self.inner.sum(&other.inner).map_err(value_err)? })
    }

    fn __mul__(&self, other: &PyIdeal) -> PyResult<PyIdeal> {
        Ok(PyIdeal { inner: self.inner.product(&other.inner).map_err(value_err)? })
    }

    fn intersect(&self, other: &PyIdeal) -> PyResult<PyIdeal> {
        Ok(PyIdeal { inner: ops::intersect(&self.inner, &other.inner).map_err(value_err)? })
    }

    fn colon(&self, other: &PyIdeal) -> PyResult<PyIdeal> {
        Ok(PyIdeal { inner: ops::colon(&self.inner, &other.inner).map_err(value_err)? })
    }

    fn saturate(&self, other: &PyIdeal) -> PyResult<PyIdeal> {
        Ok(PyIdeal { inner: ops::saturate(&self.inner, &other.inner).map_err(value_err)? })
    }

    /// Eliminates the named variables; the result lives in the remaining ones.
    fn eliminate(&self, drop: Vec<String>) -> PyResult<PyIdeal> {
        let ring = self.inner.ring();
        let idx = drop
            .iter()
            .map(|n| ring.index_of(n).ok_or_else(|| value_err(format!("unknown variable {n}"))))
            .collect::<PyResult<Vec<_>>>()?;
        Ok(PyIdeal { inner: ops::eliminate(&self.inner, &idx).map_err(value_err)? })
    }

    fn dimension(&self) -> PyResult<usize> {
        ops::dimension(&self.inner).map_err(value_err)
    }

    fn height(&self) -> PyResult<usize> {
        ops::height(&self.inner).map_err(value_err)
    }

    fn __repr__(&self) -> String {
        format!("Ideal({})", self.generators().join(", "))
    }
}

/// Outcome of the hypothesis checks.
#[pyclass(name = "HypothesisReport", module = "reeskit")]
pub struct PyReport {
    inner: HypothesisReport,
}

#[pymethods]
impl PyReport {
    #[getter]
    fn all_pass(&self) -> bool {
        self.inner.all_pass()
    }

    #[getter]
    fn first_failure(&self) -> Option<String> {
        self.inner.first_failure().map(|c| c.name.clone())
    }

    /// `(name, status)` pairs in check order.
    #[getter]
    fn checks(&self) -> Vec<(String, String)> {
        self.inner.checks.iter().map(|c| (c.name.clone(), format!("{:?}", c.status).to_lowercase())).collect()
    }

    #[getter]
    fn prime(&self) -> Option<Vec<String>> {
        let ring = self.inner.input.ring();
        self.inner.prime_p.as_ref().map(|v| v.iter().map(|&i| ring.name(i).to_string()).collect())
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner.to_json()).unwrap()
    }
}

/// The seven-identity certificate.
#[pyclass(name = "Certificate", module = "reeskit")]
pub struct PyCertificate {
    inner: Certificate,
}

#[pymethods]
impl PyCertificate {
    #[getter]
    fn verdict(&self) -> bool {
        self.inner.verdict
    }

    #[getter]
    fn stabilization_exponent(&self) -> Option<usize> {
        self.inner.stabilization_exponent
    }

    #[getter]
    fn identities(&self) -> Vec<(String, String)> {
        self.inner.identities.iter().map(|i| (i.name.clone(), format!("{:?}", i.status).to_lowercase())).collect()
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).unwrap()
    }
}

/// Jacobian dual data and the symmetric-algebra ideal of a presentation.
#[pyclass(name = "ReesContext", module = "reeskit")]
pub struct PyContext {
    inner: rees::ReesContext,
}

fn matrix_strings(m: &PolyMatrix) -> Vec<Vec<String>> {
    m.to_strings()
}

#[pymethods]
impl PyContext {
    #[getter]
    fn vars(&self) -> Vec<String> {
        self.inner.bigring.names().to_vec()
    }

    #[getter]
    fn ells(&self) -> Vec<String> {
        strings(&self.inner.ells)
    }

    #[getter]
    fn jacobian_dual(&self) -> Vec<Vec<String>> {
        matrix_strings(&self.inner.b)
    }

    #[getter]
    fn bprime(&self) -> Vec<Vec<String>> {
        matrix_strings(&self.inner.bprime)
    }

    #[getter]
    fn block_form(&self) -> bool {
        self.inner.block_form
    }

    fn symmetric_ideal(&self) -> PyIdeal {
        PyIdeal { inner: self.inner.l.clone() }
    }

    fn bprime_minors(&self) -> PyResult<PyIdeal> {
        Ok(PyIdeal { inner: self.inner.bprime_minors().map_err(runtime_err)? })
    }

    fn closed_form(&self) -> PyResult<PyIdeal> {
        Ok(PyIdeal { inner: rees::defining_ideal_closed_form(&self.inner).map_err(runtime_err)? })
    }

    /// `L + I_{d-1}(B')` without the block-form requirement.
    fn closed_form_candidate(&self) -> PyResult<PyIdeal> {
        Ok(PyIdeal { inner: rees::closed_form_candidate(&self.inner).map_err(runtime_err)? })
    }

    fn oracle(&self) -> PyResult<PyIdeal> {
        Ok(PyIdeal { inner: rees::oracle_defining_ideal(&self.inner).map_err(runtime_err)? })
    }

    fn verify(&self) -> PyResult<PyCertificate> {
        Ok(PyCertificate { inner: rees::verify_theorem(&self.inner).map_err(runtime_err)? })
    }

    /// Fiber ideal in the T-variables and the analytic spread.
    fn special_fiber(&self) -> PyResult<(PyIdeal, usize)> {
        let closed = rees::defining_ideal_closed_form(&self.inner).map_err(runtime_err)?;
        let f = rees::special_fiber(&self.inner, &closed).map_err(runtime_err)?;
        Ok((PyIdeal { inner: f.ideal }, f.analytic_spread))
    }
}

/// A linear presentation matrix of a module of rank `rank`.
#[pyclass(name = "Presentation", module = "reeskit")]
#[derive(Clone)]
pub struct PyPresentation {
    doc: InputDocument,
}

fn cli_err(e: CliError) -> PyErr {
    match e {
        CliError::Parse(_) | CliError::Io(_) => value_err(e),
        CliError::Compute(_) => runtime_err(e),
    }
}

#[pymethods]
impl PyPresentation {
    #[new]
    fn new(vars: Vec<String>, matrix: Vec<Vec<String>>, rank: usize) -> PyResult<Self> {
        let text = serde_json::json!({"ring": {"vars": vars}, "matrix": matrix, "rank": rank}).to_string();
        let doc = InputDocument::from_json(&text).map_err(cli_err)?;
        doc.presentation().map_err(cli_err)?;
        Ok(PyPresentation { doc })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let doc = InputDocument::from_json(text).map_err(cli_err)?;
        doc.presentation().map_err(cli_err)?;
        Ok(PyPresentation { doc })
    }

    #[getter]
    fn vars(&self) -> Vec<String> {
        self.doc.ring.vars.clone()
    }

    #[getter]
    fn matrix(&self) -> Vec<Vec<String>> {
        self.doc.matrix.clone()
    }

    #[getter]
    fn rank(&self) -> usize {
        self.doc.rank
    }

    fn fitting_ideal(&self, i: usize) -> PyResult<PyIdeal> {
        let p = self.doc.presentation().map_err(cli_err)?;
        Ok(PyIdeal { inner: p.fitting(i).map_err(runtime_err)? })
    }

    fn largest_gs(&self) -> PyResult<usize> {
        let p = self.doc.presentation().map_err(cli_err)?;
        hyp::largest_gs(&p).map_err(runtime_err)
    }

    fn check(&self) -> PyResult<PyReport> {
        let a = reeskit::cli::Analysis::run(&self.doc).map_err(cli_err)?;
        Ok(PyReport { inner: a.report })
    }

    /// Context of the normalized presentation; raises if the checks fail
    /// unless `force` is set.
    #[pyo3(signature = (force = false))]
    fn rees_context(&self, force: bool) -> PyResult<PyContext> {
        let a = reeskit::cli::Analysis::run(&self.doc).map_err(cli_err)?;
        let ctx = match a.certified_context().map_err(cli_err)? {
            Some(c) => c,
            None if force => a.forced_context().map_err(cli_err)?,
            None => {
                let name = a.report.first_failure().map_or("unknown", |c| c.name.as_str()).to_string();
                return Err(runtime_err(format!("hypotheses fail at {name}")));
            }
        };
        Ok(PyContext { inner: ctx })
    }

    fn __repr__(&self) -> String {
        format!("Presentation({}x{}, rank {})", self.doc.matrix.len(), self.doc.matrix[0].len(), self.doc.rank)
    }
}

/// Canonical form of a polynomial in the given variables.
#[pyfunction]
fn normalize_poly(vars: Vec<String>, text: &str) -> PyResult<String> {
    let ring: Ring = VarSet::new(vars).map_err(value_err)?;
    Ok(parse_poly(text, &ring).map_err(value_err)?.to_string())
}

#[pyfunction]
fn fixture_names() -> Vec<&'static str> {
    fixtures::corpus().iter().map(|f| f.name).collect()
}

#[pyfunction]
fn fixture(name: &str) -> PyResult<PyPresentation> {
    fixtures::fixture(name)
        .map(|f| PyPresentation { doc: f.doc })
        .ok_or_else(|| value_err(format!("unknown fixture {name}")))
}

/// `(assertion, passed)` pairs for one embedded fixture.
#[pyfunction]
fn run_fixture(name: &str) -> PyResult<Vec<(String, bool)>> {
    let f = fixtures::fixture(name).ok_or_else(|| value_err(format!("unknown fixture {name}")))?;
    let out = fixtures::run_fixture(&f, &Default::default());
    Ok(out.lines.into_iter().map(|l| (l.label, l.pass)).collect())
}

#[pymodule]
#[pyo3(name = "reeskit")]
fn reeskit_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyIdeal>()?;
    m.add_class::<PyPresentation>()?;
    m.add_class::<PyReport>()?;
    m.add_class::<PyContext>()?;
    m.add_class::<PyCertificate>()?;
    m.add_function(wrap_pyfunction!(normalize_poly, m)?)?;
    m.add_function(wrap_pyfunction!(fixture_names, m)?)?;
    m.add_function(wrap_pyfunction!(fixture, m)?)?;
    m.add_function(wrap_pyfunction!(run_fixture, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrappers_build_without_an_interpreter() {
        let p = PyPresentation { doc: fixtures::fixture("F1").unwrap().doc };
        assert_eq!(p.rank(), 1);
        assert_eq!(p.vars(), vec!["x", "y", "z"]);
        assert!(fixture_names().contains(&"example_3_9"));
    }
}

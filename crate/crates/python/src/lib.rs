//! Python bindings for sampling representations, evaluating brackets and
//! running rank scans and flows.

use std::sync::Arc;

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use surface_poisson::bracket;
use surface_poisson::cli::exit_code;
use surface_poisson::flows::{integrate_flow, FlowOptions};
use surface_poisson::function::InvariantFunction;
use surface_poisson::homology::build_complex;
use surface_poisson::lie::{GroupKind, InvariantForm, LieGroupSpec};
use surface_poisson::rep::{self, RepresentationData};
use surface_poisson::strata::{self, CensusCounts, MappingClass};
use surface_poisson::Error;

fn to_py(e: Error) -> PyErr {
    if exit_code(&e) == 2 {
        PyRuntimeError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn group_spec(name: &str) -> PyResult<Arc<LieGroupSpec>> {
    GroupKind::parse(name)
        .map(|k| Arc::new(LieGroupSpec::new(k)))
        .ok_or_else(|| PyValueError::new_err(format!("unknown group {name:?}")))
}

/// A point of the representation variety.
#[pyclass(name = "Representation", module = "surface_poisson", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyRepresentation {
    inner: rep::Representation,
}

#[pymethods]
impl PyRepresentation {
    /// Samples a point with `r(φ) = c` by Newton projection from a seeded start.
    #[staticmethod]
    #[pyo3(signature = (group, genus, central = "I", seed = 0))]
    fn sample(group: &str, genus: usize, central: &str, seed: u64) -> PyResult<Self> {
        let spec = group_spec(group)?;
        let c = rep::parse_central(&spec, central).map_err(to_py)?;
        let inner = rep::sample_hom_xi(&spec, genus, &c, seed).map_err(to_py)?;
        Ok(PyRepresentation { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let data: RepresentationData =
            serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        let inner = rep::Representation::from_data(&data).map_err(to_py)?;
        Ok(PyRepresentation { inner })
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner.to_data()).expect("representation data always serializes")
    }

    #[getter]
    fn genus(&self) -> usize {
        self.inner.genus()
    }

    #[getter]
    fn group(&self) -> String {
        self.inner.spec().kind().to_string()
    }

    /// Generator images as nested lists of complex numbers, in the order x1, y1, x2, ...
    fn images(&self) -> Vec<Vec<Vec<Complex64>>> {
        self.inner
            .images()
            .iter()
            .map(|m| m.row_iter().map(|r| r.iter().copied().collect()).collect())
            .collect()
    }

    fn relator_residual(&self) -> f64 {
        self.inner.relator_residual()
    }

    /// `(h0, label)` where label is one of central, abelian-noncentral, irreducible.
    fn orbit_type(&self) -> (usize, String) {
        let o = rep::orbit_type(&self.inner);
        (o.h0, o.label.to_string())
    }

    /// `(h0, h1, h2, |d1 d0|)` of the twisted cochain complex.
    fn cohomology(&self) -> (usize, usize, usize, f64) {
        let data = build_complex(&self.inner);
        (data.h0, data.h1, data.h2, data.complex_residual())
    }

    fn __repr__(&self) -> String {
        format!(
            "Representation(group={}, genus={}, residual={:.2e})",
            self.group(),
            self.genus(),
            self.relator_residual()
        )
    }
}

/// A conjugation-invariant function such as `tr(x1*y1) + 0.5*tr(x2)^2`.
#[pyclass(name = "Function", module = "surface_poisson", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyFunction {
    inner: InvariantFunction,
}

#[pymethods]
impl PyFunction {
    #[new]
    fn new(expr: &str) -> PyResult<Self> {
        let inner = InvariantFunction::parse(expr).map_err(to_py)?;
        Ok(PyFunction { inner })
    }

    fn __call__(&self, phi: &PyRepresentation) -> PyResult<f64> {
        self.inner.eval(&phi.inner).map_err(to_py)
    }

    /// Left-translated differential as a flat list of length `2 * genus * dim`.
    fn differential(&self, phi: &PyRepresentation) -> PyResult<Vec<f64>> {
        Ok(self.inner.differential(&phi.inner).map_err(to_py)?.iter().copied().collect())
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Function({:?})", self.inner.to_string())
    }
}

/// An invariant symmetric form on the Lie algebra.
#[pyclass(name = "Form", module = "surface_poisson", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyForm {
    inner: InvariantForm,
}

#[pymethods]
impl PyForm {
    /// `-Re tr(XY)`, positive definite on compact groups.
    #[staticmethod]
    fn reference(group: &str) -> PyResult<Self> {
        Ok(PyForm {
            inner: InvariantForm::reference(&*group_spec(group)?),
        })
    }

    /// Diagonal Gram matrix in the orthonormal basis; must be invariant.
    #[staticmethod]
    fn diag(group: &str, entries: Vec<f64>) -> PyResult<Self> {
        let inner = InvariantForm::diagonal(&*group_spec(group)?, &entries).map_err(to_py)?;
        Ok(PyForm { inner })
    }

    /// `(positive, negative, zero)` eigenvalue counts.
    fn signature(&self) -> (usize, usize, usize) {
        self.inner.signature()
    }
}

fn form_or_reference(form: Option<&PyForm>, phi: &PyRepresentation) -> InvariantForm {
    form.map(|f| f.inner.clone())
        .unwrap_or_else(|| InvariantForm::reference(phi.inner.spec()))
}

#[pyfunction]
#[pyo3(name = "bracket", signature = (f, h, phi, form = None))]
fn py_bracket(f: &PyFunction, h: &PyFunction, phi: &PyRepresentation, form: Option<&PyForm>) -> PyResult<f64> {
    let form = form_or_reference(form, phi);
    Ok(bracket::bracket(&f.inner, &h.inner, &phi.inner, &form).map_err(to_py)?.value)
}

/// Absolute cyclic sum `{f,{h,k}} + {h,{k,f}} + {k,{f,h}}` at `phi`.
#[pyfunction]
#[pyo3(signature = (f, h, k, phi, form = None))]
fn jacobi_residual(
    f: &PyFunction,
    h: &PyFunction,
    k: &PyFunction,
    phi: &PyRepresentation,
    form: Option<&PyForm>,
) -> PyResult<f64> {
    let form = form_or_reference(form, phi);
    bracket::jacobi_residual(&f.inner, &h.inner, &k.inner, &phi.inner, &form).map_err(to_py)
}

/// `(rank, singular-value gap)` of the bracket Gram over the default probe family.
#[pyfunction]
#[pyo3(signature = (phi, form = None, family_seed = 0))]
fn poisson_rank(phi: &PyRepresentation, form: Option<&PyForm>, family_seed: u64) -> PyResult<(usize, f64)> {
    let form = form_or_reference(form, phi);
    let family = strata::default_family(phi.inner.genus(), family_seed);
    let r = strata::poisson_rank(&phi.inner, &form, &family).map_err(to_py)?;
    Ok((r.rank, r.gap))
}

/// Runs the genus-two SU(2) census; returns `(passed, min_gap, records)` where
/// each record is `(seed, orbit_type, h0, h1, rank, sv_gap)`.
#[pyfunction]
#[pyo3(signature = (seed = 0, abelian = 50, irreducible = 50))]
#[allow(clippy::type_complexity)]
fn kummer_census(
    seed: u64,
    abelian: usize,
    irreducible: usize,
) -> PyResult<(bool, f64, Vec<(u64, String, usize, usize, usize, f64)>)> {
    let counts = CensusCounts { abelian, irreducible };
    let report = strata::kummer_census(seed, counts, &strata::default_family(2, 0)).map_err(to_py)?;
    let records = report
        .records
        .iter()
        .map(|r| (r.seed, r.orbit_type.to_string(), r.h0, r.h1, r.rank, r.sv_gap))
        .collect();
    Ok((report.passed(), report.min_gap, records))
}

/// Pullback residual `|{β*f, β*h} - ε β*{f,h}|` for the Dehn twist on `handle`.
#[pyfunction]
#[pyo3(signature = (f, h, phi, handle = 1, form = None))]
fn dehn_twist_residual(
    f: &PyFunction,
    h: &PyFunction,
    phi: &PyRepresentation,
    handle: usize,
    form: Option<&PyForm>,
) -> PyResult<f64> {
    let form = form_or_reference(form, phi);
    let beta = MappingClass::dehn_twist(phi.inner.genus(), handle).map_err(to_py)?;
    strata::mcg_pullback_check(&beta, &f.inner, &h.inner, &phi.inner, &form).map_err(to_py)
}

/// Integrates the Hamiltonian flow of `f`; returns `(endpoint, value_drift, max_relator_residual)`.
#[pyfunction]
#[pyo3(signature = (f, phi, form = None, t_end = 1.0, dt = 1e-3))]
fn flow(
    f: &PyFunction,
    phi: &PyRepresentation,
    form: Option<&PyForm>,
    t_end: f64,
    dt: f64,
) -> PyResult<(PyRepresentation, f64, f64)> {
    let form = form_or_reference(form, phi);
    let opts = FlowOptions {
        t_end,
        dt,
        project: true,
    };
    let traj = integrate_flow(&f.inner, &phi.inner, &form, opts).map_err(to_py)?;
    if let Some(reason) = &traj.aborted {
        return Err(PyRuntimeError::new_err(format!("flow aborted: {reason}")));
    }
    Ok((
        PyRepresentation {
            inner: traj.endpoint.clone(),
        },
        traj.value_drift(),
        traj.max_relator_residual(),
    ))
}

#[pymodule]
#[pyo3(name = "surface_poisson")]
fn surface_poisson_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRepresentation>()?;
    m.add_class::<PyFunction>()?;
    m.add_class::<PyForm>()?;
    m.add_function(wrap_pyfunction!(py_bracket, m)?)?;
    m.add_function(wrap_pyfunction!(jacobi_residual, m)?)?;
    m.add_function(wrap_pyfunction!(poisson_rank, m)?)?;
    m.add_function(wrap_pyfunction!(kummer_census, m)?)?;
    m.add_function(wrap_pyfunction!(dehn_twist_residual, m)?)?;
    m.add_function(wrap_pyfunction!(flow, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_names_resolve() {
        assert_eq!(group_spec("SU2").unwrap().dim(), 3);
        assert_eq!(group_spec("SU2xU1").unwrap().dim(), 4);
        assert!(group_spec("SP4").is_err());
    }

    #[test]
    fn representation_json_round_trip() {
        let phi = PyRepresentation::sample("U2", 2, "I", 5).unwrap();
        let back = PyRepresentation::from_json(&phi.to_json()).unwrap();
        assert_eq!(phi.images(), back.images());
        assert_eq!(back.cohomology(), (1, 10, 1, back.cohomology().3));
    }
}

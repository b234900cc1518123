use grunsky_core::grunsky::{self as op, GrunskyOperator, Route};
use grunsky_core::map_zoo::{self, ConformalMapModel, MobiusTransform, PreSchwarzianFamily};
use grunsky_core::period_map;
use grunsky_core::power_series::PowerSeries;
use nalgebra::DMatrix;
use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(grunsky, GrunskyError, PyException);
create_exception!(grunsky, ValidationError, GrunskyError);
create_exception!(grunsky, NumericalError, GrunskyError);

fn wrap<T>(r: grunsky_core::Result<T>) -> PyResult<T> {
    r.map_err(|e| {
        if e.is_validation() {
            ValidationError::new_err(e.to_string())
        } else {
            NumericalError::new_err(e.to_string())
        }
    })
}

fn route(name: &str) -> PyResult<Route> {
    wrap(name.parse())
}

fn rows(m: &DMatrix<Complex64>) -> Vec<Vec<Complex64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// A univalent map of the closed unit disk.
#[pyclass(name = "ConformalMap", frozen, from_py_object, module = "grunsky")]
#[derive(Clone)]
struct PyMap(ConformalMapModel);

#[pymethods]
impl PyMap {
    #[staticmethod]
    fn affine_disk(center: Complex64, radius: f64) -> PyResult<Self> {
        wrap(ConformalMapModel::affine_disk(center, radius)).map(Self)
    }

    #[staticmethod]
    fn quadratic(center: Complex64, c: Complex64) -> PyResult<Self> {
        wrap(ConformalMapModel::quadratic(center, c)).map(Self)
    }

    #[staticmethod]
    fn joukowski_ellipse(center: Complex64, c: Complex64) -> PyResult<Self> {
        wrap(ConformalMapModel::joukowski_ellipse(center, c)).map(Self)
    }

    /// `coeffs` are the coefficients of z, z², … of `f − center`.
    #[staticmethod]
    #[pyo3(signature = (center, coeffs, certified = false))]
    fn raw_series(center: Complex64, coeffs: Vec<Complex64>, certified: bool) -> PyResult<Self> {
        let mut all = vec![Complex64::new(0.0, 0.0)];
        all.extend(coeffs);
        wrap(ConformalMapModel::raw_series(center, PowerSeries::new(all), certified)).map(Self)
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.0.kind().name()
    }

    #[getter]
    fn center(&self) -> Complex64 {
        self.0.center()
    }

    fn dprime0(&self) -> Complex64 {
        self.0.dprime0()
    }

    fn dsecond0(&self) -> Complex64 {
        self.0.dsecond0()
    }

    fn __call__(&self, z: Complex64) -> PyResult<Complex64> {
        wrap(self.0.evaluate(z))
    }

    fn series(&self) -> Vec<Complex64> {
        self.0.series().coeffs().to_vec()
    }

    /// Taylor coefficients of the Schwarzian derivative at 0.
    fn schwarzian(&self) -> PyResult<Vec<Complex64>> {
        wrap(map_zoo::schwarzian(&self.0)).map(|s| s.coeffs().to_vec())
    }

    fn __repr__(&self) -> String {
        let c = self.0.center();
        format!("ConformalMap({}, center={}{:+}j)", self.0.kind().name(), c.re, c.im)
    }
}

#[pyclass(name = "Mobius", frozen, from_py_object, module = "grunsky")]
#[derive(Clone)]
struct PyMobius(MobiusTransform);

#[pymethods]
impl PyMobius {
    #[new]
    fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> PyResult<Self> {
        wrap(MobiusTransform::new(a, b, c, d)).map(Self)
    }

    #[staticmethod]
    fn identity() -> Self {
        Self(MobiusTransform::identity())
    }

    #[staticmethod]
    fn dilation(k: Complex64) -> PyResult<Self> {
        wrap(MobiusTransform::dilation(k)).map(Self)
    }

    #[staticmethod]
    fn translation(b: Complex64) -> Self {
        Self(MobiusTransform::translation(b))
    }

    #[staticmethod]
    fn inversion() -> Self {
        Self(MobiusTransform::inversion())
    }

    fn coefficients(&self) -> [Complex64; 4] {
        self.0.coefficients()
    }

    /// `None` at the pole.
    fn __call__(&self, z: Complex64) -> Option<Complex64> {
        self.0.apply(z)
    }

    fn compose(&self, other: &Self) -> Self {
        Self(self.0.compose(&other.0))
    }

    fn inverse(&self) -> Self {
        Self(self.0.inverse())
    }
}

/// A validated collection of maps with disjoint images.
#[pyclass(name = "Rigging", frozen, from_py_object, module = "grunsky")]
#[derive(Clone)]
struct PyRigging(map_zoo::Rigging);

#[pymethods]
impl PyRigging {
    #[new]
    #[pyo3(signature = (maps, samples = 256))]
    fn new(maps: Vec<PyMap>, samples: usize) -> PyResult<Self> {
        wrap(map_zoo::validate_rigging(maps.into_iter().map(|m| m.0).collect(), samples)).map(Self)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn maps(&self) -> Vec<PyMap> {
        self.0.maps().iter().cloned().map(PyMap).collect()
    }

    #[getter]
    fn centers(&self) -> Vec<Complex64> {
        self.0.centers()
    }

    #[getter]
    fn margin(&self) -> f64 {
        self.0.disjointness_margin()
    }

    fn post_compose(&self, t: &PyMobius) -> PyResult<Self> {
        wrap(map_zoo::post_compose_mobius(&self.0, &t.0)).map(Self)
    }

    /// Normalized rigging and the transform that produced it.
    fn normalize(&self) -> PyResult<(Self, PyMobius)> {
        wrap(period_map::normalize_rigging(&self.0)).map(|(r, t)| (Self(r), PyMobius(t)))
    }

    fn __len__(&self) -> usize {
        self.0.n()
    }
}

/// Truncated block operator; block `(j, i)` maps source `i` to target `j`.
#[pyclass(name = "Operator", frozen, from_py_object, module = "grunsky")]
#[derive(Clone)]
struct PyOperator(GrunskyOperator);

#[pymethods]
impl PyOperator {
    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn order(&self) -> usize {
        self.0.order()
    }

    #[getter]
    fn route(&self) -> &'static str {
        self.0.route().name()
    }

    fn block(&self, j: usize, i: usize) -> PyResult<Vec<Vec<Complex64>>> {
        let n = self.0.n();
        if j >= n || i >= n {
            return wrap(Err(grunsky_core::Error::IndexOutOfRange { index: j.max(i), n }));
        }
        Ok(rows(&self.0.block(j, i).matrix))
    }

    fn matrix(&self) -> Vec<Vec<Complex64>> {
        rows(&self.0.flatten())
    }

    fn norm(&self) -> PyResult<f64> {
        wrap(op::operator_norm(&self.0))
    }

    fn symmetry_defect(&self) -> f64 {
        self.0.symmetry_defect()
    }

    fn compress(&self, order: usize) -> PyResult<Self> {
        wrap(self.0.compress(order)).map(Self)
    }

    fn max_entry_diff(&self, other: &Self) -> PyResult<f64> {
        wrap(self.0.max_entry_diff(&other.0))
    }

    #[pyo3(signature = (norm = None))]
    fn to_json(&self, norm: Option<f64>) -> String {
        op::to_json(&self.0, norm)
    }

    fn to_csv(&self) -> String {
        op::to_csv(&self.0)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        wrap(op::operator_from_json(text)).map(|(o, _)| Self(o))
    }
}

#[pyfunction]
#[pyo3(signature = (rigging, order = 32, route = "series"))]
fn assemble(rigging: &PyRigging, order: usize, route: &str) -> PyResult<PyOperator> {
    wrap(op::assemble(&rigging.0, order, self::route(route)?)).map(PyOperator)
}

#[pyfunction]
fn truncation_sweep(rigging: &PyRigging, orders: Vec<usize>) -> PyResult<Vec<(usize, f64)>> {
    wrap(op::truncation_sweep(&rigging.0, &orders))
}

/// Normalized centers and normalized operator.
#[pyfunction]
#[pyo3(signature = (rigging, order = 32, route = "series"))]
fn period(rigging: &PyRigging, order: usize, route: &str) -> PyResult<(Vec<Complex64>, PyOperator)> {
    let d = wrap(period_map::period(&rigging.0, order, self::route(route)?))?;
    Ok((d.normalized_centers, PyOperator(d.grunsky)))
}

#[pyfunction]
#[pyo3(signature = (rigging, transform, order = 32))]
fn mobius_invariance(rigging: &PyRigging, transform: &PyMobius, order: usize) -> PyResult<f64> {
    wrap(period_map::check_mobius_invariance(&rigging.0, &transform.0, order))
}

/// Jets recovered from a normalized operator. Pass `truth` to fill residuals.
#[pyfunction]
#[pyo3(signature = (operator, normalized_centers, truth = None))]
fn recover_jets<'py>(
    py: Python<'py>,
    operator: &PyOperator,
    normalized_centers: Vec<Complex64>,
    truth: Option<&PyRigging>,
) -> PyResult<Bound<'py, PyDict>> {
    let mut report = wrap(period_map::recover_jets(&operator.0, &normalized_centers))?;
    if let Some(t) = truth {
        report = wrap(report.with_ground_truth(&t.0))?;
    }
    let d = PyDict::new(py);
    d.set_item("dprime", report.dprime)?;
    d.set_item("dsecond", report.dsecond)?;
    d.set_item("schwarzian_at_zero", report.schwarzian_at_zero)?;
    if let Some(r) = report.residuals {
        let res = PyDict::new(py);
        res.set_item("dprime", r.dprime)?;
        res.set_item("dsecond", r.dsecond)?;
        res.set_item("schwarzian", r.schwarzian)?;
        d.set_item("residuals", res)?;
    } else {
        d.set_item("residuals", py.None())?;
    }
    Ok(d)
}

/// Cauchy–Riemann defect when map `j` moves along the family through it
/// with pre-Schwarzian direction `phi`.
#[pyfunction]
#[pyo3(signature = (j, rigging, phi, delta = 1e-2, order = 32, q_slope = Complex64::new(0.0, 0.0)))]
fn holomorphy_probe<'py>(
    py: Python<'py>,
    j: usize,
    rigging: &PyRigging,
    phi: Vec<Complex64>,
    delta: f64,
    order: usize,
    q_slope: Complex64,
) -> PyResult<Bound<'py, PyDict>> {
    if j >= rigging.0.n() {
        return wrap(Err(grunsky_core::Error::IndexOutOfRange { index: j, n: rigging.0.n() }));
    }
    let family = wrap(PreSchwarzianFamily::through(rigging.0.map(j), &phi, q_slope))?;
    let p = wrap(period_map::holomorphy_probe(j, &rigging.0, &family, delta, order))?;
    let d = PyDict::new(py);
    d.set_item("h", p.h)?;
    d.set_item("residual", p.residual)?;
    d.set_item("scale", p.scale)?;
    d.set_item("per_block", p.per_block)?;
    Ok(d)
}

#[pyfunction]
fn zoo() -> Vec<(&'static str, &'static str, &'static str)> {
    map_zoo::ZOO_CATALOG.iter().map(|e| (e.kind, e.formula, e.parameters)).collect()
}

#[pymodule]
fn grunsky(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("GrunskyError", m.py().get_type::<GrunskyError>())?;
    m.add("ValidationError", m.py().get_type::<ValidationError>())?;
    m.add("NumericalError", m.py().get_type::<NumericalError>())?;
    m.add_class::<PyMap>()?;
    m.add_class::<PyMobius>()?;
    m.add_class::<PyRigging>()?;
    m.add_class::<PyOperator>()?;
    m.add_function(wrap_pyfunction!(assemble, m)?)?;
    m.add_function(wrap_pyfunction!(truncation_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(period, m)?)?;
    m.add_function(wrap_pyfunction!(mobius_invariance, m)?)?;
    m.add_function(wrap_pyfunction!(recover_jets, m)?)?;
    m.add_function(wrap_pyfunction!(holomorphy_probe, m)?)?;
    m.add_function(wrap_pyfunction!(zoo, m)?)?;
    Ok(())
}

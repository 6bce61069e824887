use pyo3::create_exception;
use pyo3::exceptions::{PyTypeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyFloat, PyList};

use kfc_core::bicomplex;
use kfc_core::bounds::{self, HomologyClass};
use kfc_core::cobordism::{self, CobordismTopology, GradingDelta};
use kfc_core::t_modified;
use kfc_core::verify::{self, Suite};
use kfc_core::{fmt_rational, parse_rational, Error, Rational, TParameter};

create_exception!(kfc, KfcError, PyValueError, "Raised for invalid input or an undefined invariant.");
create_exception!(kfc, NotAKnotComplex, KfcError, "The homology does not have free rank one.");

fn err(e: Error) -> PyErr {
    match e {
        Error::NotKnotComplex { .. } | Error::HatRank { .. } => NotAKnotComplex::new_err(e.to_string()),
        _ => KfcError::new_err(e.to_string()),
    }
}

fn fraction<'py>(py: Python<'py>, r: &Rational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((fmt_rational(r),))
}

/// Accepts int, Fraction or a "p/q" string. Floats are refused.
fn rational(obj: &Bound<'_, PyAny>) -> PyResult<Rational> {
    if obj.is_instance_of::<PyFloat>() {
        return Err(PyTypeError::new_err("floats are not exact; pass a Fraction or a \"p/q\" string"));
    }
    let s = obj.str()?.to_string();
    parse_rational(&s).ok_or_else(|| PyTypeError::new_err(format!("`{s}` is not a rational")))
}

fn t_param(obj: &Bound<'_, PyAny>) -> PyResult<TParameter> {
    TParameter::from_rational(&rational(obj)?).map_err(err)
}

fn pairs<'py>(py: Python<'py>, pts: &[(Rational, Rational)]) -> PyResult<Bound<'py, PyList>> {
    let items = pts
        .iter()
        .map(|(t, v)| Ok((fraction(py, t)?, fraction(py, v)?)))
        .collect::<PyResult<Vec<_>>>()?;
    PyList::new(py, items)
}

/// A piecewise-linear function on [0, 2] with rational breakpoints.
#[pyclass(module = "kfc", name = "PlFunction", eq, frozen, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyPl(kfc_core::PlFunction);

#[pymethods]
impl PyPl {
    /// Builds the function through `points`, a sequence of (t, value) pairs
    /// starting at t = 0 and ending at t = 2.
    #[new]
    fn new(points: Vec<(Bound<'_, PyAny>, Bound<'_, PyAny>)>) -> PyResult<Self> {
        let pts = points
            .iter()
            .map(|(t, v)| Ok((rational(t)?, rational(v)?)))
            .collect::<PyResult<Vec<_>>>()?;
        kfc_core::PlFunction::from_points(pts).map(PyPl).map_err(err)
    }

    /// Reads the tab-separated breakpoint format.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        text.parse().map(PyPl).map_err(err)
    }

    fn breakpoints<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyList>> {
        pairs(py, self.0.breakpoints())
    }

    fn slopes<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyAny>>> {
        self.0.slopes().iter().map(|s| fraction(py, s)).collect()
    }

    fn first_slope<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &self.0.first_slope())
    }

    fn sample<'py>(&self, py: Python<'py>, step: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyList>> {
        pairs(py, &self.0.sample(&rational(step)?).map_err(err)?)
    }

    fn reflect(&self) -> Self {
        PyPl(self.0.reflect())
    }

    fn max(&self, other: &PyPl) -> Self {
        PyPl(self.0.max(&other.0))
    }

    /// Pointwise `self <= other`.
    fn leq(&self, other: &PyPl) -> bool {
        self.0.leq(&other.0)
    }

    fn __call__<'py>(&self, py: Python<'py>, t: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &self.0.eval(&rational(t)?).map_err(err)?)
    }

    fn __add__(&self, other: &PyPl) -> Self {
        PyPl(&self.0 + &other.0)
    }

    fn __sub__(&self, other: &PyPl) -> Self {
        PyPl(&self.0 - &other.0)
    }

    fn __neg__(&self) -> Self {
        PyPl(-&self.0)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        let pts: Vec<String> = self
            .0
            .breakpoints()
            .iter()
            .map(|(t, v)| format!("({}, {})", fmt_rational(t), fmt_rational(v)))
            .collect();
        format!("PlFunction([{}])", pts.join(", "))
    }
}

/// A bigraded chain complex over F2[U, V].
#[pyclass(module = "kfc", name = "ChainComplex", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyComplex(kfc_core::ChainComplexUV);

#[pymethods]
impl PyComplex {
    /// `generators` holds (name, gr_w, gr_z) triples, `edges` holds
    /// (src, dst, u, v) for a term U^u V^v dst in the boundary of src.
    #[new]
    #[pyo3(signature = (generators, edges = Vec::new()))]
    fn new(
        generators: Vec<(String, Bound<'_, PyAny>, Bound<'_, PyAny>)>,
        edges: Vec<(String, String, u32, u32)>,
    ) -> PyResult<Self> {
        let gens = generators
            .iter()
            .map(|(n, w, z)| Ok(kfc_core::Generator::new(n.as_str(), rational(w)?, rational(z)?)))
            .collect::<PyResult<Vec<_>>>()?;
        let edges = edges.into_iter().map(|(s, d, u, v)| kfc_core::Edge::new(s, d, u, v)).collect();
        kfc_core::ChainComplexUV::checked(gens, edges).map(PyComplex).map_err(err)
    }

    /// Reads kfc v1 text.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        kfc_core::ChainComplexUV::parse(text).map(PyComplex).map_err(err)
    }

    #[staticmethod]
    fn staircase(p: u32, q: u32) -> PyResult<Self> {
        bicomplex::staircase_torus_knot(p, q).map(PyComplex).map_err(err)
    }

    #[staticmethod]
    fn unknot() -> Self {
        PyComplex(bicomplex::unknot())
    }

    #[staticmethod]
    fn trefoil() -> Self {
        PyComplex(bicomplex::trefoil())
    }

    #[staticmethod]
    fn figure_eight() -> Self {
        PyComplex(bicomplex::figure_eight())
    }

    fn generators<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyList>> {
        let items = self
            .0
            .generators()
            .iter()
            .map(|g| Ok((g.name.clone(), fraction(py, &g.gr_w)?, fraction(py, &g.gr_z)?)))
            .collect::<PyResult<Vec<_>>>()?;
        PyList::new(py, items)
    }

    fn edges(&self) -> Vec<(String, String, u32, u32)> {
        self.0.edges().iter().map(|e| (e.src.clone(), e.dst.clone(), e.u, e.v)).collect()
    }

    fn conjugate(&self) -> PyResult<Self> {
        self.0.conjugate().map(PyComplex).map_err(err)
    }

    fn to_kfc(&self) -> String {
        self.0.to_kfc()
    }

    /// Upsilon at a single t in [0, 2].
    fn upsilon<'py>(&self, py: Python<'py>, t: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
        let t = t_param(t)?;
        let v = py.detach(|| t_modified::upsilon_at(&self.0, t)).map_err(err)?;
        fraction(py, &v)
    }

    /// Upsilon as a function, evaluated on the Farey grid of order `q`.
    #[pyo3(signature = (q = None))]
    fn upsilon_pl(&self, py: Python<'_>, q: Option<u64>) -> PyResult<PyPl> {
        py.detach(|| t_modified::upsilon_pl(&self.0, q)).map(PyPl).map_err(err)
    }

    fn tau<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &kfc_core::tau(&self.0).map_err(err)?)
    }

    fn __len__(&self) -> usize {
        self.0.generators().len()
    }

    fn __repr__(&self) -> String {
        format!(
            "ChainComplex({} generators, {} edges)",
            self.0.generators().len(),
            self.0.edges().len()
        )
    }
}

/// M_t of the class with coordinates `class_` in an orthonormal basis of
/// (Z^n, -I). With `charvec`, maximizes over characteristic vectors directly.
#[pyfunction]
#[pyo3(signature = (class_, charvec = false))]
fn m_t(class_: Vec<i64>, charvec: bool) -> PyPl {
    let s = HomologyClass::new(class_);
    PyPl(if charvec { bounds::m_t_charvec(&s) } else { bounds::m_t_class(&s) })
}

#[pyfunction]
fn upsilon_lower_bound(upsilon1: &PyPl, class_: Vec<i64>, genus: u64) -> PyPl {
    PyPl(bounds::upsilon_lower_bound(&upsilon1.0, &HomologyClass::new(class_), genus))
}

#[pyfunction]
fn tau_upper_bound<'py>(
    py: Python<'py>,
    tau1: &Bound<'py, PyAny>,
    class_: Vec<i64>,
    genus: u64,
) -> PyResult<Bound<'py, PyAny>> {
    fraction(py, &bounds::tau_upper_bound(&rational(tau1)?, &HomologyClass::new(class_), genus))
}

/// (lower, upper) bounds for Upsilon of K- given Upsilon of K+.
#[pyfunction]
fn crossing_change_bounds(upsilon_plus: &PyPl) -> (PyPl, PyPl) {
    let (lo, hi) = bounds::crossing_change_bounds(&upsilon_plus.0);
    (PyPl(lo), PyPl(hi))
}

#[pyfunction]
fn torus_upsilon(p: u64, q: u64) -> PyResult<PyPl> {
    bounds::torus_upsilon(p, q).map(PyPl).map_err(err)
}

fn delta_dict<'py>(
    py: Python<'py>,
    d: &GradingDelta,
    top: &CobordismTopology,
    t: Option<&Bound<'py, PyAny>>,
) -> PyResult<Bound<'py, PyDict>> {
    let out = PyDict::new(py);
    let alex = PyDict::new(py);
    for (j, v) in d.alexander() {
        alex.set_item(j, fraction(py, v)?)?;
    }
    out.set_item("alexander", alex)?;
    out.set_item("alexander_total", fraction(py, &d.d_a_total())?)?;
    let opt = |v: &Option<Rational>| -> PyResult<Option<Bound<'py, PyAny>>> {
        v.as_ref().map(|v| fraction(py, v)).transpose()
    };
    out.set_item("gr_w", opt(&d.dgr_w)?)?;
    out.set_item("gr_z", opt(&d.dgr_z)?)?;
    if let Some(t) = t {
        let v = match cobordism::grt_change(top, t_param(t)?) {
            Ok(v) => Some(v),
            Err(Error::Undefined(_)) => None,
            Err(e) => return Err(err(e)),
        };
        out.set_item("gr_t", opt(&v)?)?;
    }
    Ok(out)
}

/// Grading changes of a piece list; undefined Maslov changes are None.
#[pyfunction]
#[pyo3(signature = (text, t = None))]
fn grading_from_pieces<'py>(
    py: Python<'py>,
    text: &str,
    t: Option<&Bound<'py, PyAny>>,
) -> PyResult<Bound<'py, PyDict>> {
    let pieces = cobordism::parse_pieces(text).map_err(err)?;
    let (d, top) = cobordism::compose(&pieces).map_err(err)?;
    delta_dict(py, &d, &top, t)
}

#[pyfunction]
#[pyo3(signature = (text, t = None))]
fn grading_from_topology<'py>(
    py: Python<'py>,
    text: &str,
    t: Option<&Bound<'py, PyAny>>,
) -> PyResult<Bound<'py, PyDict>> {
    let top = CobordismTopology::parse(text).map_err(err)?;
    delta_dict(py, &cobordism::closed_delta(&top), &top, t)
}

/// Runs a self-check suite; returns (all passed, report text).
#[pyfunction]
fn run_suite(py: Python<'_>, name: &str) -> PyResult<(bool, String)> {
    let suite = Suite::from_name(name).ok_or_else(|| KfcError::new_err(format!("unknown suite `{name}`")))?;
    let report = py.detach(|| verify::run(suite));
    Ok((report.passed(), report.to_string()))
}

#[pymodule]
fn kfc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add_class::<PyComplex>()?;
    m.add_class::<PyPl>()?;
    m.add("KfcError", py.get_type::<KfcError>())?;
    m.add("NotAKnotComplex", py.get_type::<NotAKnotComplex>())?;
    m.add_function(wrap_pyfunction!(m_t, m)?)?;
    m.add_function(wrap_pyfunction!(upsilon_lower_bound, m)?)?;
    m.add_function(wrap_pyfunction!(tau_upper_bound, m)?)?;
    m.add_function(wrap_pyfunction!(crossing_change_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(torus_upsilon, m)?)?;
    m.add_function(wrap_pyfunction!(grading_from_pieces, m)?)?;
    m.add_function(wrap_pyfunction!(grading_from_topology, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    Ok(())
}

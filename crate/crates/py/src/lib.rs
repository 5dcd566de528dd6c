//! Python bindings. Rationals cross the boundary as strings (`"3/4"`,
//! `"-2"`); set expressions are `SetExpr` objects built with `parse`.

use cbset::algebra::{self, RankVector};
use cbset::constructions::{self, Word};
use cbset::{dsl, oracle, topology, Error, Rat};
use pyo3::exceptions::{PyNotImplementedError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Parse { .. } | Error::Validation(_) | Error::Precondition(_) => {
            PyValueError::new_err(e.to_string())
        }
        Error::Unsupported(_) => PyNotImplementedError::new_err(e.to_string()),
        Error::Construction(_) | Error::Io(_) => PyRuntimeError::new_err(e.to_string()),
    }
}

fn rat(s: &str) -> PyResult<Rat> {
    s.trim()
        .parse()
        .map_err(|_| PyValueError::new_err(format!("not a rational number: {s:?}")))
}

fn rats(xs: &[String]) -> PyResult<Vec<Rat>> {
    xs.iter().map(|s| rat(s)).collect()
}

fn strs<'a>(xs: impl IntoIterator<Item = &'a Rat>) -> Vec<String> {
    xs.into_iter().map(|x| x.to_string()).collect()
}

/// A symbolic countable subset of the real line.
#[pyclass(name = "SetExpr", module = "cbset_py", frozen, eq, from_py_object)]
#[derive(Clone, PartialEq)]
struct PySet(cbset::SetExpr);

fn wrap(e: Option<cbset::SetExpr>) -> Option<PySet> {
    e.map(PySet)
}

#[pymethods]
impl PySet {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        dsl::parse(text).map(PySet).map_err(py_err)
    }

    fn __str__(&self) -> String {
        dsl::render(&self.0)
    }

    fn __repr__(&self) -> String {
        format!("SetExpr({:?})", dsl::render(&self.0))
    }

    fn __contains__(&self, x: &str) -> PyResult<bool> {
        topology::membership(&self.0, &rat(x)?).map_err(py_err)
    }

    fn normalize(&self) -> PyResult<PySet> {
        cbset::normalize(&self.0).map(PySet).map_err(py_err)
    }

    fn rank(&self) -> PyResult<usize> {
        topology::rank(&self.0).map_err(py_err)
    }

    fn closure(&self) -> PyResult<PySet> {
        topology::closure(&self.0).map(PySet).map_err(py_err)
    }

    /// Accumulation points, or `None` when there are none.
    fn acc(&self) -> PyResult<Option<PySet>> {
        topology::acc_points(&self.0).map(wrap).map_err(py_err)
    }

    fn iso(&self) -> PyResult<PySet> {
        topology::iso_points(&self.0).map(PySet).map_err(py_err)
    }

    /// Derived set; the set must be closed.
    fn lpt(&self) -> PyResult<Option<PySet>> {
        topology::lpt_set(&self.0).map(wrap).map_err(py_err)
    }

    fn is_closed(&self) -> PyResult<bool> {
        topology::is_closed(&self.0).map_err(py_err)
    }

    fn is_discrete(&self) -> PyResult<bool> {
        topology::is_discrete(&self.0).map_err(py_err)
    }

    fn is_compact(&self) -> PyResult<bool> {
        topology::is_compact(&self.0).map_err(py_err)
    }

    fn derivative_chain(&self) -> PyResult<Vec<PySet>> {
        let c = topology::derivative_chain(&self.0).map_err(py_err)?;
        Ok(c.chain.into_iter().map(PySet).collect())
    }

    #[pyo3(signature = (depth = oracle::DEFAULT_DEPTH))]
    fn enumerate(&self, depth: usize) -> PyResult<Vec<String>> {
        let en = oracle::enumerate(&self.0, depth).map_err(py_err)?;
        Ok(strs(&en.points))
    }
}

#[pyfunction]
fn parse(text: &str) -> PyResult<PySet> {
    PySet::new(text)
}

#[pyfunction]
fn kbound(ranks: Vec<u32>) -> PyResult<u64> {
    let rv = RankVector::new(ranks).map_err(py_err)?;
    algebra::kbound(&rv).map_err(py_err)
}

#[pyfunction]
fn minkowski_sum(children: Vec<PySet>) -> PyResult<PySet> {
    let cs: Vec<cbset::SetExpr> = children.into_iter().map(|c| c.0).collect();
    algebra::minkowski_sum(&cs).map(PySet).map_err(py_err)
}

/// Discrete decomposition of `b_1 E_1 + ... + b_m E_m`.
#[pyfunction]
fn linear_image_decompose<'py>(
    py: Python<'py>,
    sets: Vec<PySet>,
    coeffs: Vec<String>,
) -> PyResult<Bound<'py, PyDict>> {
    let es: Vec<cbset::SetExpr> = sets.into_iter().map(|s| s.0).collect();
    let plan = algebra::linear_image_decompose(&es, &rats(&coeffs)?).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("K", plan.k)?;
    d.set_item("image", PySet(plan.image.clone()))?;
    d.set_item("ranks", plan.ranks.clone())?;
    let pieces: Vec<Bound<'py, PyDict>> = plan
        .pieces
        .iter()
        .map(|p| {
            let pd = PyDict::new(py);
            pd.set_item("label", p.label())?;
            pd.set_item("set", PySet(p.set.clone()))?;
            pd.set_item("discrete", p.discrete)?;
            Ok(pd)
        })
        .collect::<PyResult<_>>()?;
    d.set_item("pieces", pieces)?;
    Ok(d)
}

/// Ordered discrete families for a compact `Y` plus a tail `Z`.
#[pyfunction]
#[pyo3(signature = (y, z, window = None))]
fn tail_combine<'py>(
    py: Python<'py>,
    y: PySet,
    z: PySet,
    window: Option<(i64, i64)>,
) -> PyResult<Bound<'py, PyDict>> {
    let plan = algebra::tail_combine(&y.0, &z.0, window).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("d", plan.d.to_string())?;
    d.set_item("N", plan.n.to_string())?;
    d.set_item("M", plan.m)?;
    d.set_item("shift", plan.shift.to_string())?;
    d.set_item("ordering_holds", plan.ordering_holds())?;
    d.set_item("piece_count", plan.piece_count())?;
    let families: Vec<Bound<'py, PyDict>> = plan
        .families
        .iter()
        .map(|f| {
            let fd = PyDict::new(py);
            fd.set_item("residue", f.residue)?;
            fd.set_item("indices", f.indices.clone())?;
            fd.set_item(
                "pieces",
                f.pieces.iter().cloned().map(PySet).collect::<Vec<_>>(),
            )?;
            fd.set_item("discrete", f.discrete.clone())?;
            Ok(fd)
        })
        .collect::<PyResult<_>>()?;
    d.set_item("families", families)?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (e, arity, trials, seed = 0))]
fn hypothesis_check<'py>(
    py: Python<'py>,
    e: PySet,
    arity: usize,
    trials: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let r = algebra::hypothesis_check(&e.0, arity, trials, seed).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("pass", r.pass())?;
    let ts: Vec<Bound<'py, PyDict>> = r
        .trials
        .iter()
        .map(|t| {
            let td = PyDict::new(py);
            td.set_item("coeffs", strs(&t.coeffs))?;
            td.set_item("K", t.k)?;
            td.set_item("pieces", t.pieces)?;
            td.set_item("pass", t.pass)?;
            td.set_item("error", t.error.clone())?;
            Ok(td)
        })
        .collect::<PyResult<_>>()?;
    d.set_item("trials", ts)?;
    Ok(d)
}

#[pyfunction]
fn ex1_encode(bound: u64, points: Vec<String>) -> PyResult<Vec<String>> {
    let inst = constructions::ex1_encode(bound, &rats(&points)?).map_err(py_err)?;
    Ok(strs(&inst.a))
}

#[pyfunction]
fn ex1_decode(bound: u64, points: Vec<String>) -> PyResult<Vec<String>> {
    Ok(strs(&constructions::ex1_decode(bound, &rats(&points)?)))
}

/// `(pairs_checked, violations)`.
#[pyfunction]
fn ex1_claim_check(
    bound: u64,
    points: Vec<String>,
    max_index: usize,
) -> PyResult<(u64, Vec<(usize, usize)>)> {
    let r = constructions::ex1_claim_check(bound, &rats(&points)?, max_index).map_err(py_err)?;
    Ok((r.pairs_checked, r.violations))
}

#[pyfunction]
fn cantor_verify<'py>(py: Python<'py>, max_len: usize, max_k: u64) -> PyResult<Bound<'py, PyDict>> {
    let r = constructions::cantor_verify(max_len, max_k).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("pass", r.pass())?;
    d.set_item("words", r.words)?;
    d.set_item("points", r.points)?;
    let violations: Vec<String> = [
        &r.containment_violations,
        &r.disjointness_violations,
        &r.range_violations,
        &r.density_violations,
        &r.witness_violations,
    ]
    .into_iter()
    .flatten()
    .cloned()
    .collect();
    d.set_item("violations", violations)?;
    Ok(d)
}

/// Witness digits for `sigma` and `k`.
#[pyfunction]
fn non_isolation_witness(sigma: Vec<u8>, k: usize) -> PyResult<Vec<u32>> {
    let w = Word::new(sigma).map_err(py_err)?;
    let t = constructions::non_isolation_witness(&w, k).map_err(py_err)?;
    Ok(t.digits().iter().map(|&d| u32::from(d)).collect())
}

#[pymodule]
fn cbset_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySet>()?;
    m.add_function(wrap_pyfunction!(parse, m)?)?;
    m.add_function(wrap_pyfunction!(kbound, m)?)?;
    m.add_function(wrap_pyfunction!(minkowski_sum, m)?)?;
    m.add_function(wrap_pyfunction!(linear_image_decompose, m)?)?;
    m.add_function(wrap_pyfunction!(tail_combine, m)?)?;
    m.add_function(wrap_pyfunction!(hypothesis_check, m)?)?;
    m.add_function(wrap_pyfunction!(ex1_encode, m)?)?;
    m.add_function(wrap_pyfunction!(ex1_decode, m)?)?;
    m.add_function(wrap_pyfunction!(ex1_claim_check, m)?)?;
    m.add_function(wrap_pyfunction!(cantor_verify, m)?)?;
    m.add_function(wrap_pyfunction!(non_isolation_witness, m)?)?;
    Ok(())
}

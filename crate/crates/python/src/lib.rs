//! Python bindings.
//!
//! Points are `(x, y)` pairs of `int`, `float`, `fractions.Fraction` or
//! strings such as `"-7/3"`. Functions taking a `backend` argument compute
//! exactly (`"exact"`, results as `Fraction`) or in binary64
//! (`"floating"`, results as `float`). Traces travel as the same JSON-lines
//! text the `ssync` CLI writes.

use std::collections::BTreeMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyFloat, PyInt};

use ssync_core::gather2d::{self, Phase};
use ssync_core::geometry::{self, Point};
use ssync_core::model::{spectrum_of, Configuration, RobotId, Spectrum};
use ssync_core::scenario::{Coord, Scenario};
use ssync_core::trace_io::{parse_trace, write_trace, AnyTrace};
use ssync_core::verify::{self, CheckReport, FuzzConfig, InitialSpec};
use ssync_core::{render, Backend, Rational, Scalar, Similarity, Tolerance};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn backend(name: &str) -> PyResult<Backend> {
    name.parse().map_err(err)
}

fn coord(obj: &Bound<'_, PyAny>) -> PyResult<Coord> {
    if obj.is_instance_of::<PyInt>() {
        if let Ok(v) = obj.extract::<i64>() {
            return Ok(Coord::Int(v));
        }
    }
    if obj.is_instance_of::<PyFloat>() {
        return Ok(Coord::Float(obj.extract::<f64>()?));
    }
    Ok(Coord::Text(obj.str()?.to_string()))
}

fn scalar<S: Scalar>(obj: &Bound<'_, PyAny>) -> PyResult<S> {
    coord(obj)?.to_scalar().map_err(err)
}

fn points<S: Scalar>(pts: &[(Bound<'_, PyAny>, Bound<'_, PyAny>)]) -> PyResult<Vec<Point<S>>> {
    pts.iter()
        .map(|(x, y)| Ok(Point::new(scalar(x)?, scalar(y)?)))
        .collect()
}

fn configuration<S: Scalar>(
    pts: &[(Bound<'_, PyAny>, Bound<'_, PyAny>)],
) -> PyResult<Configuration<S>> {
    Configuration::new(points(pts)?).map_err(err)
}

fn py_scalar<S: Scalar>(py: Python<'_>, v: &S) -> PyResult<Py<PyAny>> {
    match S::BACKEND {
        Backend::Exact => {
            let fraction = py.import("fractions")?.getattr("Fraction")?;
            Ok(fraction.call1((v.encode(),))?.unbind())
        }
        Backend::Floating => Ok(PyFloat::new(py, v.to_f64()).into_any().unbind()),
    }
}

fn py_point<S: Scalar>(py: Python<'_>, p: &Point<S>) -> PyResult<(Py<PyAny>, Py<PyAny>)> {
    Ok((py_scalar(py, &p.x)?, py_scalar(py, &p.y)?))
}

type PyPoint = (Py<PyAny>, Py<PyAny>);
type Pts<'py> = Vec<(Bound<'py, PyAny>, Bound<'py, PyAny>)>;

/// Dispatches `$body` with `S` bound to the scalar type of `$backend`.
macro_rules! on_backend {
    ($backend:expr, $S:ident => $body:expr) => {
        match backend($backend)? {
            Backend::Exact => {
                type $S = Rational;
                $body
            }
            Backend::Floating => {
                type $S = f64;
                $body
            }
        }
    };
}

/// Smallest enclosing circle: `((cx, cy), radius_squared)`.
#[pyfunction]
#[pyo3(signature = (pts, backend="exact"))]
fn sec(py: Python<'_>, pts: Pts<'_>, backend: &str) -> PyResult<(PyPoint, Py<PyAny>)> {
    on_backend!(backend, S => {
        let c = geometry::sec(&points::<S>(&pts)?);
        Ok((py_point(py, &c.center)?, py_scalar(py, &c.radius_sq)?))
    })
}

/// Same as `sec`, by exhaustive search over pairs and triples (at most 12 points).
#[pyfunction]
#[pyo3(signature = (pts, backend="exact"))]
fn sec_bruteforce(py: Python<'_>, pts: Pts<'_>, backend: &str) -> PyResult<(PyPoint, Py<PyAny>)> {
    on_backend!(backend, S => {
        let c = geometry::sec_bruteforce(&points::<S>(&pts)?).map_err(err)?;
        Ok((py_point(py, &c.center)?, py_scalar(py, &c.radius_sq)?))
    })
}

/// Distinct input points lying on the smallest enclosing circle.
#[pyfunction]
#[pyo3(signature = (pts, backend="exact"))]
fn on_sec(py: Python<'_>, pts: Pts<'_>, backend: &str) -> PyResult<Vec<PyPoint>> {
    on_backend!(backend, S => {
        geometry::on_sec(&points::<S>(&pts)?).iter().map(|p| py_point(py, p)).collect()
    })
}

fn spectrum<S: Scalar>(pts: &Pts<'_>) -> PyResult<Spectrum<S>> {
    Ok(Spectrum::from_points(points::<S>(pts)?.iter()))
}

/// Common destination of the gathering protocol for the given robot locations.
#[pyfunction]
#[pyo3(signature = (pts, backend="exact"))]
fn target(py: Python<'_>, pts: Pts<'_>, backend: &str) -> PyResult<PyPoint> {
    on_backend!(backend, S => {
        let t = gather2d::target(&spectrum::<S>(&pts)?).map_err(err)?;
        py_point(py, &t)
    })
}

/// Destination the robogram computes from a spectrum, as seen by a robot at the origin.
#[pyfunction]
#[pyo3(signature = (pts, backend="exact"))]
fn pgm(py: Python<'_>, pts: Pts<'_>, backend: &str) -> PyResult<PyPoint> {
    on_backend!(backend, S => py_point(py, &gather2d::pgm(&spectrum::<S>(&pts)?)))
}

#[pyfunction]
#[pyo3(signature = (pts, backend="exact"))]
fn classify_phase(pts: Pts<'_>, backend: &str) -> PyResult<String> {
    on_backend!(backend, S => {
        Ok(gather2d::classify_phase(&spectrum::<S>(&pts)?).map_err(err)?.name().to_string())
    })
}

/// Termination measure `(phase_weight, residual_robots)`.
#[pyfunction]
#[pyo3(signature = (pts, backend="exact"))]
fn measure(pts: Pts<'_>, backend: &str) -> PyResult<(u8, usize)> {
    on_backend!(backend, S => {
        let m = gather2d::measure(&configuration::<S>(&pts)?).map_err(err)?;
        Ok((m.p, m.m))
    })
}

/// True for even robot counts split half and half over two locations.
#[pyfunction]
#[pyo3(signature = (pts, backend="exact"))]
fn forbidden(pts: Pts<'_>, backend: &str) -> PyResult<bool> {
    on_backend!(backend, S => Ok(gather2d::forbidden(&configuration::<S>(&pts)?)))
}

/// One round seen globally: robots in `active` move to the common target.
#[pyfunction]
#[pyo3(signature = (pts, active=None, backend="exact"))]
fn round_global(
    py: Python<'_>,
    pts: Pts<'_>,
    active: Option<Vec<usize>>,
    backend: &str,
) -> PyResult<Vec<PyPoint>> {
    on_backend!(backend, S => {
        let conf = configuration::<S>(&pts)?;
        let ids: Vec<RobotId> = match active {
            Some(a) => {
                if let Some(bad) = a.iter().find(|&&i| i >= conf.n_robots()) {
                    return Err(err(format!("no robot {bad}")));
                }
                a.into_iter().map(RobotId).collect()
            }
            None => conf.ids().collect(),
        };
        gather2d::round_global(&ids, &conf).locations().iter().map(|p| py_point(py, p)).collect()
    })
}

/// Whether `target` commutes with the similarity `(zoom, c, s, reflect, translation)`.
#[pyfunction]
#[pyo3(signature = (pts, zoom, c, s, reflect=false, translation=None, backend="exact"))]
#[allow(clippy::too_many_arguments)]
fn target_morph(
    pts: Pts<'_>,
    zoom: Bound<'_, PyAny>,
    c: Bound<'_, PyAny>,
    s: Bound<'_, PyAny>,
    reflect: bool,
    translation: Option<(Bound<'_, PyAny>, Bound<'_, PyAny>)>,
    backend: &str,
) -> PyResult<bool> {
    on_backend!(backend, S => {
        let t = match &translation {
            Some((x, y)) => Point::new(scalar::<S>(x)?, scalar::<S>(y)?),
            None => Point::origin(),
        };
        let f = Similarity::new(scalar::<S>(&zoom)?, scalar::<S>(&c)?, scalar::<S>(&s)?, reflect, t).map_err(err)?;
        Ok(verify::check_target_morph(&spectrum::<S>(&pts)?, &f))
    })
}

/// Installs the floating-point comparison tolerance for the whole process.
#[pyfunction]
#[pyo3(signature = (abs=1e-9, rel=1e-9))]
fn set_tolerance(abs: f64, rel: f64) -> PyResult<()> {
    if !(abs.is_finite() && rel.is_finite() && abs >= 0.0 && rel >= 0.0) {
        return Err(err("tolerances must be finite and non-negative"));
    }
    Tolerance { abs, rel }.install();
    Ok(())
}

fn report_dict<'py>(py: Python<'py>, report: &CheckReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("passed", report.passed())?;
    d.set_item("runs", report.runs)?;
    d.set_item("rounds", report.rounds)?;
    d.set_item("moving_rounds", report.moving_rounds)?;
    let failures: BTreeMap<&str, u64> = report
        .tallies
        .iter()
        .map(|(p, t)| (p.name(), t.failed))
        .collect();
    d.set_item("failures", failures)?;
    let off: Vec<(&str, &str, u64)> = report
        .off_graph_transitions()
        .into_iter()
        .map(|((a, b), n)| (a.name(), b.name(), n))
        .collect();
    d.set_item("off_graph_transitions", off)?;
    let unobserved: Vec<(&str, &str)> = report
        .unobserved_arcs()
        .into_iter()
        .map(|(a, b)| (a.name(), b.name()))
        .collect();
    d.set_item("unobserved_arcs", unobserved)?;
    d.set_item("max_rounds_to_gather", report.max_rounds_to_gather())?;
    let cx: Vec<(&str, u64, usize, usize, String)> = report
        .counterexamples
        .iter()
        .map(|c| (c.property.name(), c.seed, c.run, c.round, c.detail.clone()))
        .collect();
    d.set_item("counterexamples", cx)?;
    d.set_item("summary", report.summary())?;
    Ok(d)
}

/// Runs a TOML scenario. Returns `(gathered, trace_jsonl)`.
#[pyfunction]
fn run_scenario(text: &str) -> PyResult<(bool, String)> {
    let sc = Scenario::parse(text).map_err(err)?;
    sc.install_tolerance();
    let mut buf = Vec::new();
    let gathered = match sc.backend {
        Backend::Exact => {
            let run = sc.run::<Rational>().map_err(err)?;
            write_trace(&mut buf, &run.trace, &run.meta).map_err(err)?;
            run.gathered
        }
        Backend::Floating => {
            let run = sc.run::<f64>().map_err(err)?;
            write_trace(&mut buf, &run.trace, &run.meta).map_err(err)?;
            run.gathered
        }
    };
    Ok((gathered, String::from_utf8(buf).map_err(err)?))
}

/// Checks a JSON-lines trace and returns the report as a dict.
#[pyfunction]
fn check_trace<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyDict>> {
    let (trace, meta) = parse_trace(text).map_err(err)?;
    report_dict(py, &trace.check(&meta))
}

#[pyfunction]
#[pyo3(signature = (runs, seed=0, backend="exact", n_min=3, n_max=8))]
fn fuzz<'py>(
    py: Python<'py>,
    runs: usize,
    seed: u64,
    backend: &str,
    n_min: usize,
    n_max: usize,
) -> PyResult<Bound<'py, PyDict>> {
    if n_min < 3 || n_max < n_min {
        return Err(err(format!("bad robot range [{n_min}, {n_max}]")));
    }
    let b = self::backend(backend)?;
    let mut cfg = FuzzConfig::new(runs, seed);
    cfg.n_min = n_min;
    cfg.n_max = n_max;
    cfg.initial = InitialSpec::for_backend(b);
    let report = py.detach(|| match b {
        Backend::Exact => verify::fuzz::<Rational>(&cfg).map(|o| o.report),
        Backend::Floating => verify::fuzz::<f64>(&cfg).map(|o| o.report),
    });
    report_dict(py, &report.map_err(err)?)
}

/// Multi-panel SVG of a JSON-lines trace.
#[pyfunction]
fn render_svg(text: &str) -> PyResult<String> {
    let (trace, _) = parse_trace(text).map_err(err)?;
    Ok(match &trace {
        AnyTrace::Exact(t) => render::render_svg(t),
        AnyTrace::Floating(t) => render::render_svg(t),
    })
}

/// Names of the twelve phases in measure order.
#[pyfunction]
fn phases() -> Vec<&'static str> {
    Phase::ALL.iter().map(|p| p.name()).collect()
}

/// Arcs `(from, to)` of the phase reachability graph, self-loops excluded.
#[pyfunction]
fn reachability_arcs() -> Vec<(&'static str, &'static str)> {
    gather2d::reachability_arcs()
        .into_iter()
        .map(|(a, b)| (a.name(), b.name()))
        .collect()
}

#[pyfunction]
#[pyo3(signature = (pts, backend="exact"))]
fn spectrum_counts(py: Python<'_>, pts: Pts<'_>, backend: &str) -> PyResult<Vec<(PyPoint, usize)>> {
    on_backend!(backend, S => {
        let conf = configuration::<S>(&pts)?;
        spectrum_of(&conf).iter().map(|(p, n)| Ok((py_point(py, p)?, n))).collect()
    })
}

#[pymodule]
fn ssync_gather(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(sec, m)?)?;
    m.add_function(wrap_pyfunction!(sec_bruteforce, m)?)?;
    m.add_function(wrap_pyfunction!(on_sec, m)?)?;
    m.add_function(wrap_pyfunction!(target, m)?)?;
    m.add_function(wrap_pyfunction!(pgm, m)?)?;
    m.add_function(wrap_pyfunction!(classify_phase, m)?)?;
    m.add_function(wrap_pyfunction!(measure, m)?)?;
    m.add_function(wrap_pyfunction!(forbidden, m)?)?;
    m.add_function(wrap_pyfunction!(round_global, m)?)?;
    m.add_function(wrap_pyfunction!(target_morph, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum_counts, m)?)?;
    m.add_function(wrap_pyfunction!(set_tolerance, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(check_trace, m)?)?;
    m.add_function(wrap_pyfunction!(fuzz, m)?)?;
    m.add_function(wrap_pyfunction!(render_svg, m)?)?;
    m.add_function(wrap_pyfunction!(phases, m)?)?;
    m.add_function(wrap_pyfunction!(reachability_arcs, m)?)?;
    Ok(())
}

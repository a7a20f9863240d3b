//! Python bindings for the laboratory: grids and fields, Gaussian-weighted
//! calculus, exponent sets, closed-form oracles, the heat solver, frequency
//! traces, and the estimator/doubling checks.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use uclab::error::LabError;

/// (tau, t, ||U||^2, Q, Qbar, dist) rows of a frequency trace.
type TraceRow = (f64, f64, f64, f64, f64, f64);

fn err(e: LabError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "GridSpec", from_py_object)]
#[derive(Clone)]
struct PyGridSpec {
    inner: uclab::GridSpec,
}

#[pymethods]
impl PyGridSpec {
    #[new]
    fn new(n: usize, points: usize) -> PyResult<Self> {
        Ok(PyGridSpec {
            inner: uclab::GridSpec::new(n, points).map_err(err)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn points(&self) -> usize {
        self.inner.points()
    }

    #[getter]
    fn spacing(&self) -> f64 {
        self.inner.spacing()
    }

    fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    /// Coordinates of the node with flat index `i`.
    fn node(&self, i: usize) -> Vec<f64> {
        let mut x = vec![0.0; self.inner.dim()];
        self.inner.node_coords(i, &mut x);
        x
    }

    fn __repr__(&self) -> String {
        format!(
            "GridSpec(n={}, points={})",
            self.inner.dim(),
            self.inner.points()
        )
    }
}

#[pyclass(name = "ScalarField", from_py_object)]
#[derive(Clone)]
struct PyScalarField {
    inner: uclab::ScalarField,
}

#[pymethods]
impl PyScalarField {
    #[new]
    fn new(grid: PyGridSpec, values: Vec<f64>) -> PyResult<Self> {
        Ok(PyScalarField {
            inner: uclab::ScalarField::from_values(&grid.inner, values).map_err(err)?,
        })
    }

    #[staticmethod]
    fn constant(grid: PyGridSpec, c: f64) -> Self {
        PyScalarField {
            inner: uclab::ScalarField::constant(&grid.inner, c),
        }
    }

    /// Single Fourier mode cos(2 pi k x_1).
    #[staticmethod]
    fn cosine_mode(grid: PyGridSpec, k: usize) -> Self {
        let tau = 2.0 * std::f64::consts::PI * k as f64;
        PyScalarField {
            inner: uclab::ScalarField::from_fn(&grid.inner, |x| (tau * x[0]).cos()),
        }
    }

    /// Seeded zero-mean random trigonometric polynomial with modes up to `cap`.
    #[staticmethod]
    fn random_trig(grid: PyGridSpec, seed: u64, cap: usize) -> Self {
        PyScalarField {
            inner: uclab::solver::random_trig_field(&grid.inner, seed, 0, cap),
        }
    }

    fn values(&self) -> Vec<f64> {
        self.inner.values().to_vec()
    }

    fn lp_norm(&self, p: f64) -> PyResult<f64> {
        self.inner.lp_norm(p).map_err(err)
    }

    fn ball_l2_norm(&self, center: Vec<f64>, delta: f64) -> PyResult<f64> {
        self.inner.ball_l2_norm(&center, delta).map_err(err)
    }

    fn dirichlet_quotient(&self) -> PyResult<f64> {
        self.inner.dirichlet_quotient().map_err(err)
    }

    fn laplacian(&self) -> Self {
        PyScalarField {
            inner: self.inner.laplacian(),
        }
    }

    /// Gradient components as one list of node values per axis.
    fn gradient(&self) -> Vec<Vec<f64>> {
        self.inner
            .gradient()
            .components()
            .iter()
            .map(|c| c.values().to_vec())
            .collect()
    }

    /// Evaluates the trigonometric interpolant at an arbitrary point.
    fn eval(&self, x: Vec<f64>) -> f64 {
        self.inner.interpolant().eval(&x)
    }

    fn scaled(&self, c: f64) -> Self {
        PyScalarField {
            inner: self.inner.scaled(c),
        }
    }

    fn add(&self, other: &PyScalarField) -> Self {
        PyScalarField {
            inner: self.inner.lin_comb(1.0, &other.inner, 1.0),
        }
    }
}

#[pyclass(name = "ExponentSet", from_py_object)]
#[derive(Clone)]
struct PyExponentSet {
    inner: uclab::ExponentSet,
}

#[pymethods]
impl PyExponentSet {
    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha
    }
    #[getter]
    fn beta(&self) -> f64 {
        self.inner.beta
    }
    #[getter]
    fn a(&self) -> f64 {
        self.inner.a
    }
    #[getter]
    fn b(&self) -> f64 {
        self.inner.b
    }
    #[getter]
    fn big_m(&self) -> f64 {
        self.inner.big_m
    }
    #[getter]
    fn epsilon(&self) -> f64 {
        self.inner.epsilon
    }
    #[getter]
    fn tau0(&self) -> f64 {
        self.inner.tau0
    }

    fn __repr__(&self) -> String {
        format!(
            "ExponentSet(alpha={}, beta={}, a={}, b={}, M={}, epsilon={}, tau0={})",
            self.inner.alpha,
            self.inner.beta,
            self.inner.a,
            self.inner.b,
            self.inner.big_m,
            self.inner.epsilon,
            self.inner.tau0
        )
    }
}

/// Derived exponents (alpha, beta, a, b, M, epsilon, tau0) with validity
/// gates; pass float('inf') for the Lebesgue exponents where applicable.
#[pyfunction]
#[pyo3(signature = (n, p, q, m0, m1, p2=None, q2=None))]
fn exponents(
    n: usize,
    p: f64,
    q: f64,
    m0: f64,
    m1: f64,
    p2: Option<f64>,
    q2: Option<f64>,
) -> PyResult<PyExponentSet> {
    Ok(PyExponentSet {
        inner: uclab::exponents(n, p, q, m0, m1, p2, q2).map_err(err)?,
    })
}

/// Gaussian moment int_{B(0,R)} x^mu t^l G(x,t) dx; radius=None means R = inf.
#[pyfunction]
#[pyo3(signature = (mu, l, t, radius=None))]
fn moment(mu: Vec<usize>, l: u32, t: f64, radius: Option<f64>) -> PyResult<f64> {
    uclab::moment(&mu, l, t, radius).map_err(err)
}

/// Lattice-periodized int f G(. - center, t) dx for a periodic field.
#[pyfunction]
fn weighted_integral(f: &PyScalarField, center: Vec<f64>, t: f64) -> PyResult<f64> {
    let g = uclab::BackwardGaussian::new(center, t).map_err(err)?;
    let quad = uclab::LatticeQuadrature::auto(t, 1e-10).map_err(err)?;
    uclab::weighted_integral(&f.inner, &g, &quad).map_err(err)
}

/// Exact spectral-route weighted integral (stays exact as t -> 0^-).
#[pyfunction]
fn weighted_integral_spectral(f: &PyScalarField, center: Vec<f64>, t: f64) -> PyResult<f64> {
    let g = uclab::BackwardGaussian::new(center, t).map_err(err)?;
    uclab::weighted_integral_spectral(&f.inner, &g).map_err(err)
}

/// Certified tail bound for int_{|x|>R} f^2 G dx given |f| <= f_inf.
#[pyfunction]
fn tail_bound(radius: f64, t: f64, f_inf: f64, n: usize) -> PyResult<f64> {
    uclab::tail_bound(radius, t, f_inf, n).map_err(err)
}

#[pyclass(name = "CaloricPolynomial", from_py_object)]
#[derive(Clone)]
struct PyCaloricPolynomial {
    inner: uclab::CaloricPolynomial,
}

#[pymethods]
impl PyCaloricPolynomial {
    #[new]
    fn new(m: usize, n: usize) -> PyResult<Self> {
        Ok(PyCaloricPolynomial {
            inner: uclab::caloric_polynomial(m, n).map_err(err)?,
        })
    }

    #[getter]
    fn degree(&self) -> usize {
        self.inner.degree()
    }

    fn eval(&self, x: Vec<f64>, t: f64) -> f64 {
        self.inner.eval(&x, t)
    }

    fn grad(&self, x: Vec<f64>, t: f64) -> Vec<f64> {
        self.inner.grad(&x, t)
    }
}

#[pyclass(name = "HermiteFunction", from_py_object)]
#[derive(Clone)]
struct PyHermiteFunction {
    inner: uclab::HermiteFunction,
}

#[pymethods]
impl PyHermiteFunction {
    #[new]
    fn new(m: usize, n: usize) -> PyResult<Self> {
        Ok(PyHermiteFunction {
            inner: uclab::hermite_data(m, n).map_err(err)?,
        })
    }

    #[getter]
    fn eigenvalue(&self) -> f64 {
        self.inner.eigenvalue()
    }

    fn eval(&self, y: Vec<f64>) -> f64 {
        self.inner.eval(&y)
    }
}

#[pyclass(name = "Trajectory")]
struct PyTrajectory {
    inner: uclab::Trajectory,
}

#[pymethods]
impl PyTrajectory {
    fn times(&self) -> Vec<f64> {
        self.inner.times().to_vec()
    }

    fn field_at(&self, t: f64) -> PyResult<PyScalarField> {
        Ok(PyScalarField {
            inner: self.inner.field_at(t).map_err(err)?,
        })
    }

    fn last_field(&self) -> PyScalarField {
        PyScalarField {
            inner: self.inner.last_field().clone(),
        }
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

/// Integrates u_t - Delta u = w . grad u + v u with exact spectral diffusion;
/// `v_constant` adds a constant zeroth-order coefficient.
#[pyfunction]
#[pyo3(signature = (grid, u0, t_start, t_end, dt, scheme="strang", v_constant=0.0))]
fn solve_heat(
    grid: PyGridSpec,
    u0: &PyScalarField,
    t_start: f64,
    t_end: f64,
    dt: f64,
    scheme: &str,
    v_constant: f64,
) -> PyResult<PyTrajectory> {
    let scheme = match scheme {
        "strang" => uclab::Scheme::Strang,
        "imex-euler" => uclab::Scheme::ImexEuler,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown scheme '{other}' (use 'strang' or 'imex-euler')"
            )))
        }
    };
    let cfg = uclab::SimulationConfig {
        grid: grid.inner.clone(),
        t_start,
        t_end,
        dt,
        scheme,
    };
    let coeffs = if v_constant == 0.0 {
        uclab::Coefficients::zero(f64::INFINITY, f64::INFINITY)
    } else {
        uclab::Coefficients::constant_v(v_constant, f64::INFINITY, f64::INFINITY)
    };
    Ok(PyTrajectory {
        inner: uclab::solve(&cfg, &u0.inner, &coeffs).map_err(err)?,
    })
}

/// Distance from a modified-frequency value to sp(H) = {m/2}.
#[pyfunction]
fn spectrum_distance(qbar: f64) -> f64 {
    uclab::spectrum_distance(qbar)
}

/// Frequency trace of a caloric polynomial: rows (tau, t, norm_sq, q, qbar, dist).
#[pyfunction]
#[pyo3(signature = (m, n, eps, span=3.0, samples=73))]
fn trace_caloric(
    m: usize,
    n: usize,
    eps: f64,
    span: f64,
    samples: usize,
) -> PyResult<Vec<TraceRow>> {
    let p = uclab::caloric_polynomial(m, n.min(2)).map_err(err)?;
    let grid = uclab::YGrid::default_for(n.min(2)).map_err(err)?;
    let trace = uclab::frequency::trace_caloric(&p, eps, span, samples, &grid).map_err(err)?;
    Ok(trace
        .samples()
        .iter()
        .map(|s| (s.tau, s.t, s.norm_sq, s.q, s.qbar, s.dist))
        .collect())
}

/// Limit mode from trace rows produced by `trace_caloric` (or compatible):
/// returns (mode, stable, max_distance).
#[pyfunction]
fn limit_mode(rows: Vec<TraceRow>) -> PyResult<(i64, bool, f64)> {
    let samples: Vec<uclab::frequency::TraceSample> = rows
        .iter()
        .map(|&(tau, t, norm_sq, q, qbar, dist)| uclab::frequency::TraceSample {
            tau,
            t,
            norm_sq,
            q,
            qbar,
            dist,
        })
        .collect();
    let trace = uclab::FrequencyTrace::new(samples).map_err(err)?;
    let lm = uclab::limit_mode(&trace).map_err(err)?;
    Ok((lm.mode, lm.stable, lm.max_distance))
}

/// Start-point selection: returns (x, achieved_ratio, bound, certified).
#[pyfunction]
fn select_start_point(u: &PyScalarField, eps: f64) -> PyResult<(Vec<f64>, f64, f64, bool)> {
    let sel = uclab::select_start_point(&u.inner, eps).map_err(err)?;
    Ok((sel.x, sel.achieved_ratio, sel.bound, sel.certified))
}

/// gamma(delta) from the exponent set.
#[pyfunction]
fn gamma(delta: f64, exps: &PyExponentSet) -> PyResult<f64> {
    uclab::gamma(delta, &exps.inner).map_err(err)
}

/// The admissible small scale delta for a ball radius delta0: returns
/// (delta, gamma(delta)).
#[pyfunction]
fn choose_delta(delta0: f64, exps: &PyExponentSet) -> PyResult<(f64, f64)> {
    let c = uclab::choose_delta(delta0, &exps.inner).map_err(err)?;
    Ok((c.delta, c.gamma))
}

/// Observability ratio ||u||^2_{L^2(Omega)} / ||u||^2_{L^2(B_delta0(center))}.
#[pyfunction]
fn observability_ratio(u: &PyScalarField, delta0: f64, center: Vec<f64>) -> PyResult<f64> {
    let r = uclab::observability_ratio(&u.inner, delta0, &center).map_err(err)?;
    Ok(r.ratio)
}

/// Physical-representation frequency |t| int |grad u|^2 G / int u^2 G.
#[pyfunction]
fn frequency_physical(u: &PyScalarField, t: f64, center: Vec<f64>) -> PyResult<f64> {
    uclab::frequency::frequency_physical_spectral(&u.inner, t, &center).map_err(err)
}

#[pymodule]
fn uclab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyGridSpec>()?;
    m.add_class::<PyScalarField>()?;
    m.add_class::<PyExponentSet>()?;
    m.add_class::<PyCaloricPolynomial>()?;
    m.add_class::<PyHermiteFunction>()?;
    m.add_class::<PyTrajectory>()?;
    m.add_function(wrap_pyfunction!(exponents, m)?)?;
    m.add_function(wrap_pyfunction!(moment, m)?)?;
    m.add_function(wrap_pyfunction!(weighted_integral, m)?)?;
    m.add_function(wrap_pyfunction!(weighted_integral_spectral, m)?)?;
    m.add_function(wrap_pyfunction!(tail_bound, m)?)?;
    m.add_function(wrap_pyfunction!(solve_heat, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum_distance, m)?)?;
    m.add_function(wrap_pyfunction!(trace_caloric, m)?)?;
    m.add_function(wrap_pyfunction!(limit_mode, m)?)?;
    m.add_function(wrap_pyfunction!(select_start_point, m)?)?;
    m.add_function(wrap_pyfunction!(gamma, m)?)?;
    m.add_function(wrap_pyfunction!(choose_delta, m)?)?;
    m.add_function(wrap_pyfunction!(observability_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(frequency_physical, m)?)?;
    Ok(())
}

//! Python bindings: particle states, trajectories, the explicit Lax pair,
//! the Hastings–McLeod reference and the identity residuals.

use std::collections::BTreeMap;
use std::sync::Arc;

use laxforge_core::calogero::{self, Anchor, StateSource};
use laxforge_core::fields::{Grid2D, Polynomial, ResidualReport};
use laxforge_core::fpcore::{self, DerivativeMode, FokkerPlanckSpec};
use laxforge_core::laxbuild::{self, BuilderConfig, BuiltLax};
use laxforge_core::pii_reference;
use num_complex::Complex64 as C;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

create_exception!(laxforge, LaxforgeError, PyException);

fn err(e: laxforge_core::Error) -> PyErr {
    LaxforgeError::new_err(e.to_string())
}

fn coeffs(p: &Polynomial<C>) -> Vec<C> {
    p.coeffs().to_vec()
}

/// A point `(t, Q, P, U)` of the particle phase space.
#[pyclass(name = "ParticleState", module = "laxforge", from_py_object)]
#[derive(Clone)]
struct PyState(calogero::ParticleState);

#[pymethods]
impl PyState {
    #[new]
    fn new(t: f64, q: Vec<C>, p: Vec<C>, u: C) -> PyResult<Self> {
        calogero::ParticleState::new(t, q, p, u).map(PyState).map_err(err)
    }

    #[getter]
    fn t(&self) -> f64 {
        self.0.t
    }

    #[getter]
    fn kappa(&self) -> usize {
        self.0.kappa
    }

    #[getter]
    fn q(&self) -> Vec<C> {
        self.0.q.clone()
    }

    #[getter]
    fn p(&self) -> Vec<C> {
        self.0.p.clone()
    }

    #[getter]
    fn u(&self) -> C {
        self.0.u
    }

    fn first_integrals(&self) -> PyResult<Vec<C>> {
        self.0.first_integrals().map_err(err)
    }

    fn coulomb_sums(&self) -> PyResult<Vec<C>> {
        self.0.coulomb_sums().map_err(err)
    }

    /// `(Q', P', U')` from the equations of motion.
    fn rates(&self) -> PyResult<(Vec<C>, Vec<C>, C)> {
        let r = self.0.eom_rhs().map_err(err)?;
        Ok((r.qdot, r.pdot, r.udot))
    }

    /// `(b₊, b₁)` at `x`.
    fn governing_fields(&self, x: f64) -> PyResult<(C, C)> {
        let g = calogero::governing_fields_from_state(Arc::new(self.0.clone()));
        let (bp, b1) = g.eval(self.0.t, x).map_err(err)?;
        Ok((bp.v, b1.v))
    }

    fn __repr__(&self) -> String {
        format!("ParticleState(t={}, q={:?}, p={:?}, u={})", self.0.t, self.0.q, self.0.p, self.0.u)
    }
}

/// Accepted integrator nodes with dense output in between.
#[pyclass(name = "Trajectory", module = "laxforge")]
struct PyTrajectory(Arc<calogero::Trajectory>);

#[pymethods]
impl PyTrajectory {
    #[getter]
    fn times(&self) -> Vec<f64> {
        self.0.nodes.iter().map(|s| s.t).collect()
    }

    fn __len__(&self) -> usize {
        self.0.nodes.len()
    }

    fn state_at(&self, t: f64) -> PyResult<PyState> {
        self.0.state_at(t).map(PyState).map_err(err)
    }

    fn max_first_integral_drift(&self) -> PyResult<f64> {
        self.0.max_first_integral_drift().map_err(err)
    }

    /// Mismatch of the particle flow against the governing system at `n_probe` times.
    fn compatibility(&self, n_probe: usize) -> PyResult<f64> {
        calogero::compatibility_check(self.0.as_ref(), n_probe).map(|r| r.max_abs).map_err(err)
    }

    /// Worst residual per identity on the grid `[t0, t_end] × [x_min, x_max]`:
    /// governing system, constraints and zero curvature of the built pair.
    #[pyo3(signature = (x_min=-3.0, x_max=3.0, nt=40, nx=40, phi="1"))]
    fn check_identities(
        &self,
        x_min: f64,
        x_max: f64,
        nt: usize,
        nx: usize,
        phi: &str,
    ) -> PyResult<BTreeMap<String, f64>> {
        let grid = Grid2D::uniform((self.0.t0(), self.0.t_end(), nt), (x_min, x_max, nx), 0.05).map_err(err)?;
        let spec = FokkerPlanckSpec::quantum_pii(self.0.kappa as f64);
        let src: Arc<dyn StateSource> = self.0.clone();
        let mut out = BTreeMap::new();
        let mut put = |r: &ResidualReport| {
            out.insert(r.identity_name.clone(), r.max_abs);
        };
        let g = calogero::governing_fields_from_state(src.clone());
        let (a, b) = fpcore::governing_residuals(&spec, &g, &grid).map_err(err)?;
        put(&a);
        put(&b);
        let lax = BuiltLax::new(src, BuilderConfig::with_phi(phi).map_err(err)?);
        let (d, o) = fpcore::constraint_residuals(&spec, &lax, &grid).map_err(err)?;
        put(&d);
        put(&o);
        for z in fpcore::zero_curvature_residuals(&lax, &grid, DerivativeMode::Analytic).map_err(err)? {
            put(&z);
        }
        Ok(out)
    }
}

/// Solves `c_k = 0` for the momenta and `U` at fixed coordinates. Exactly
/// one of `sum_p`, `u` may be given; the default is `ΣP = 0`.
#[pyfunction]
#[pyo3(signature = (kappa, q0, t0=0.0, sum_p=None, u=None))]
fn init_state(kappa: usize, q0: Vec<C>, t0: f64, sum_p: Option<C>, u: Option<C>) -> PyResult<PyState> {
    let anchor = match (sum_p, u) {
        (Some(_), Some(_)) => return Err(PyValueError::new_err("give at most one of sum_p and u")),
        (_, Some(u)) => Anchor::U(u),
        (Some(p), None) => Anchor::SumP(p),
        (None, None) => Anchor::default(),
    };
    calogero::init_state(kappa, &q0, t0, anchor).map(PyState).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (state, t_end, rel_tol=1e-10, abs_tol=1e-12))]
fn integrate(state: &PyState, t_end: f64, rel_tol: f64, abs_tol: f64) -> PyResult<PyTrajectory> {
    calogero::integrate(&state.0, t_end, rel_tol, abs_tol).map(|t| PyTrajectory(Arc::new(t))).map_err(err)
}

/// The polynomial Lax pair at one state: entry name → ascending complex
/// coefficients, plus the division remainders and the degree audit.
#[pyfunction]
#[pyo3(signature = (state, phi="1"))]
fn build_lax(py: Python<'_>, state: &PyState, phi: &str) -> PyResult<Py<PyAny>> {
    let cfg = BuilderConfig::with_phi(phi).map_err(err)?;
    let r = laxbuild::build_pair(&state.0, &cfg).map_err(err)?;
    let d = pyo3::types::PyDict::new(py);
    for (name, p) in [
        ("L1", &r.l1),
        ("L2", &r.l2),
        ("Lplus", &r.l_plus),
        ("Lminus", &r.l_minus),
        ("B1", &r.b1),
        ("B2", &r.b2),
        ("Bplus", &r.b_plus),
        ("Bminus", &r.b_minus),
        ("Ld", &r.l_d),
        ("Bd", &r.b_d),
    ] {
        d.set_item(name, coeffs(p))?;
    }
    d.set_item("remainder_l_minus", r.remainders.l_minus)?;
    d.set_item("remainder_b_minus", r.remainders.b_minus)?;
    d.set_item("degree_audit", laxbuild::degree_audit(&r).is_ok())?;
    Ok(d.into_any().unbind())
}

/// Tabulated Hastings–McLeod solution with `u = (q')² - tq² - q⁴`.
#[pyclass(name = "HastingsMcLeod", module = "laxforge")]
struct PyHm(Arc<pii_reference::HMSolution>);

#[pymethods]
impl PyHm {
    #[getter]
    fn range(&self) -> (f64, f64) {
        self.0.range()
    }

    /// `(q, q', q'', u)` at `t`.
    fn __call__(&self, t: f64) -> PyResult<(f64, f64, f64, f64)> {
        let p = self.0.eval(t).map_err(err)?;
        Ok((p.q, p.qp, p.qpp, p.u))
    }

    /// `{"min_q", "ode_residual", "u_relation"}` over the table.
    fn invariants(&self) -> BTreeMap<&'static str, f64> {
        let i = self.0.invariants();
        BTreeMap::from([("min_q", i.min_q), ("ode_residual", i.ode_residual), ("u_relation", i.u_relation)])
    }

    /// Particle state of the closed form at `kappa` = 1 or 2.
    fn particles(&self, kappa: usize, t: f64) -> PyResult<PyState> {
        pii_reference::particles_from_hm(kappa, &self.0, t).map(PyState).map_err(err)
    }
}

#[pyfunction]
#[pyo3(signature = (t_min=-10.0, t_max=8.0, n_points=pii_reference::DEFAULT_POINTS, tol=pii_reference::DEFAULT_TOLERANCE))]
fn solve_hastings_mcleod(t_min: f64, t_max: f64, n_points: usize, tol: f64) -> PyResult<PyHm> {
    pii_reference::solve_hastings_mcleod(t_min, t_max, n_points, tol).map(|h| PyHm(Arc::new(h))).map_err(err)
}

#[pyfunction]
fn airy_ai(t: f64) -> f64 {
    pii_reference::airy_ai(t)
}

#[pymodule]
#[pyo3(name = "laxforge")]
fn laxforge_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("LaxforgeError", m.py().get_type::<LaxforgeError>())?;
    m.add_class::<PyState>()?;
    m.add_class::<PyTrajectory>()?;
    m.add_class::<PyHm>()?;
    m.add_function(wrap_pyfunction!(init_state, m)?)?;
    m.add_function(wrap_pyfunction!(integrate, m)?)?;
    m.add_function(wrap_pyfunction!(build_lax, m)?)?;
    m.add_function(wrap_pyfunction!(solve_hastings_mcleod, m)?)?;
    m.add_function(wrap_pyfunction!(airy_ai, m)?)?;
    Ok(())
}

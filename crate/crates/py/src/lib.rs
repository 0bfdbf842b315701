//! Python bindings: eigenstates, the Airy packet and the verification campaigns.

use bohrqm::airy::{self, AiryPacketParams};
use bohrqm::campaign::{self, AiryConfig, FlatnessConfig, LPolicy, Method, Quantity, Selection, Tolerances};
use bohrqm::hydrogen::{self, EigenstateSpec};
use bohrqm::madelung;
use bohrqm::report::VerificationReport;
use bohrqm::{PhysicalConstants, QuantumNumbers, RadialGrid, SpacingLaw};
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: bohrqm::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn spacing(law: &str) -> PyResult<SpacingLaw> {
    match law {
        "log" | "logarithmic" => Ok(SpacingLaw::Logarithmic),
        "uniform" => Ok(SpacingLaw::Uniform),
        _ => Err(PyValueError::new_err(format!("unknown spacing '{law}' (log|uniform)"))),
    }
}

/// Masked samples become None.
fn masked(p: &madelung::PotentialProfile) -> (Vec<f64>, Vec<Option<f64>>) {
    let vals = p
        .values
        .iter()
        .zip(&p.node_mask)
        .map(|(v, m)| (!m).then_some(*v))
        .collect();
    (p.coords.clone(), vals)
}

/// Hydrogen eigenstate in atomic units.
#[pyclass(name = "Eigenstate", frozen)]
struct PyEigenstate(EigenstateSpec);

#[pymethods]
impl PyEigenstate {
    #[new]
    fn new(n: i64, l: i64, m: i64) -> PyResult<Self> {
        EigenstateSpec::atomic(n, l, m).map(Self).map_err(err)
    }

    #[getter]
    fn n(&self) -> u32 {
        self.0.qn.n()
    }

    #[getter]
    fn l(&self) -> u32 {
        self.0.qn.l()
    }

    #[getter]
    fn m(&self) -> i32 {
        self.0.qn.m()
    }

    #[getter]
    fn energy(&self) -> f64 {
        self.0.energy()
    }

    /// (R, dR/dr, d2R/dr2) at r.
    fn radial(&self, r: f64) -> PyResult<(f64, f64, f64)> {
        let v = self.0.radial(r).map_err(err)?;
        Ok((v.value, v.first, v.second))
    }

    fn psi(&self, r: f64, theta: f64, phi: f64) -> PyResult<Complex64> {
        self.0.psi(r, theta, phi).map_err(err)
    }

    /// Radii of the local maxima of r^2 R^2.
    fn radial_peaks(&self) -> Vec<f64> {
        hydrogen::radial_peaks(&self.0)
    }

    /// (r, V_Q) with V_Q = V + V_Bohm from the analytic Laplacian; None on the node mask.
    #[pyo3(signature = (r_min=0.05, r_max=None, points=4000, spacing="log"))]
    fn quantum_potential(
        &self,
        r_min: f64,
        r_max: Option<f64>,
        points: usize,
        spacing: &str,
    ) -> PyResult<(Vec<f64>, Vec<Option<f64>>)> {
        let r_max = r_max.unwrap_or(60.0 * f64::from(self.0.qn.n()));
        let grid = RadialGrid::new(r_min, r_max, points, self::spacing(spacing)?).map_err(err)?;
        campaign::analytic_quantum_potential(&self.0, &grid)
            .map(|p| masked(&p))
            .map_err(err)
    }

    /// (r, V_Q) from second differences on a uniform grid with radial nodes guarded.
    #[pyo3(signature = (r_max=None, h=1e-3))]
    fn quantum_potential_fd(&self, r_max: Option<f64>, h: f64) -> PyResult<(Vec<f64>, Vec<Option<f64>>)> {
        let r_max = r_max.unwrap_or(60.0 * f64::from(self.0.qn.n()));
        campaign::fd_quantum_potential(&self.0, r_max, h)
            .map(|p| masked(&p))
            .map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Eigenstate(n={}, l={}, m={})", self.n(), self.l(), self.m())
    }
}

/// Accelerating Airy packet of strength B, atomic units.
#[pyclass(name = "AiryPacket", frozen)]
struct PyAiryPacket(AiryPacketParams);

#[pymethods]
impl PyAiryPacket {
    #[new]
    fn new(b: f64) -> PyResult<Self> {
        AiryPacketParams::atomic(b).map(Self).map_err(err)
    }

    #[getter]
    fn b(&self) -> f64 {
        self.0.b()
    }

    fn psi(&self, x: f64, t: f64) -> PyResult<Complex64> {
        airy::airy_psi(&self.0, x, t).map_err(err)
    }

    fn bohm_potential(&self, x: f64, t: f64) -> f64 {
        airy::airy_bohm_closed_form(&self.0, x, t)
    }

    #[getter]
    fn acceleration(&self) -> f64 {
        airy::airy_quantum_acceleration(&self.0)
    }

    fn trajectory(&self, t: f64) -> f64 {
        airy::airy_peak_trajectory(&self.0, t)
    }

    fn __repr__(&self) -> String {
        format!("AiryPacket(B={})", self.0.b())
    }
}

#[pyclass(name = "Report", frozen)]
struct PyReport(VerificationReport);

#[pymethods]
impl PyReport {
    #[getter]
    fn command(&self) -> &str {
        &self.0.command
    }

    #[getter]
    fn cases(&self) -> usize {
        self.0.summary.cases
    }

    #[getter]
    fn passes(&self) -> usize {
        self.0.summary.passes
    }

    #[getter]
    fn max_error(&self) -> Option<f64> {
        self.0.summary.max_error
    }

    fn all_pass(&self) -> bool {
        self.0.all_pass()
    }

    /// (case id, computed, expected, pass) per record.
    fn records(&self) -> Vec<(String, Option<f64>, f64, bool)> {
        self.0
            .records
            .iter()
            .map(|r| (r.case_id.clone(), r.computed, r.expected, r.pass))
            .collect()
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    fn to_csv(&self) -> String {
        self.0.to_csv()
    }

    fn __repr__(&self) -> String {
        format!("Report({}: {}/{} pass)", self.0.command, self.passes(), self.cases())
    }
}

#[pyfunction]
fn energy_level(n: i64) -> PyResult<f64> {
    hydrogen::energy_level(n, &PhysicalConstants::atomic()).map_err(err)
}

/// All valid (n, l, m) with n <= n_max.
#[pyfunction]
fn states(n_max: u32) -> Vec<(u32, u32, i32)> {
    QuantumNumbers::all_up_to(n_max)
        .into_iter()
        .map(|q| (q.n(), q.l(), q.m()))
        .collect()
}

#[pyfunction]
#[pyo3(signature = (n_max, method="analytic", circular=false, tol=None))]
fn flatness(n_max: u32, method: &str, circular: bool, tol: Option<f64>) -> PyResult<PyReport> {
    let method: Method = method.parse().map_err(err)?;
    let mut cfg = FlatnessConfig::new(n_max, method);
    if circular {
        cfg.policy = LPolicy::Circular;
    }
    if let Some(t) = tol {
        cfg.tolerance = t;
    }
    campaign::flatness(&cfg).map(PyReport).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (n_max, tol=1e-8))]
fn bohr_radii(n_max: u32, tol: f64) -> PyResult<PyReport> {
    campaign::bohr_radii(n_max, &PhysicalConstants::atomic(), tol)
        .map(|(r, _)| PyReport(r))
        .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (b, times=vec![0.0, 0.3, 1.0]))]
fn airy_campaign(b: f64, times: Vec<f64>) -> PyResult<PyReport> {
    let params = AiryPacketParams::atomic(b).map_err(err)?;
    campaign::airy_campaign(&AiryConfig {
        params,
        times,
        tolerances: Tolerances::default(),
    })
    .map(|(r, _)| PyReport(r))
    .map_err(err)
}

/// (coords, values, mask) of one quantity; `state` is (n, l, m) or None for the packet.
#[pyfunction]
#[pyo3(signature = (quantity, state=None, b=1.0, t=0.0))]
fn profile(
    quantity: &str,
    state: Option<(i64, i64, i64)>,
    b: f64,
    t: f64,
) -> PyResult<(Vec<f64>, Vec<f64>, Vec<bool>)> {
    let q: Quantity = quantity.parse().map_err(err)?;
    let selection = match state {
        Some((n, l, m)) => Selection::State(EigenstateSpec::atomic(n, l, m).map_err(err)?),
        None => Selection::Airy {
            params: AiryPacketParams::atomic(b).map_err(err)?,
            t,
        },
    };
    let p = campaign::profile(&selection, q).map_err(err)?;
    Ok((p.coords, p.values, p.mask))
}

#[pymodule]
#[pyo3(name = "bohrqm")]
pub fn init(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyEigenstate>()?;
    m.add_class::<PyAiryPacket>()?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(energy_level, m)?)?;
    m.add_function(wrap_pyfunction!(states, m)?)?;
    m.add_function(wrap_pyfunction!(flatness, m)?)?;
    m.add_function(wrap_pyfunction!(bohr_radii, m)?)?;
    m.add_function(wrap_pyfunction!(airy_campaign, m)?)?;
    m.add_function(wrap_pyfunction!(profile, m)?)?;
    Ok(())
}

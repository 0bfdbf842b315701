//! Verification campaigns: each builds a [`VerificationReport`] (and where
//! useful a [`Table`]) from the library operations.
//!
//! Finite-difference comparisons against closed forms keep a distance from
//! zeros of the sampled profile, because a second difference near a simple
//! zero at distance d carries an error of order h^2/d that no step size
//! removes uniformly. The distances are fixed constants below.

use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::airy::{self, AiryPacketParams};
use crate::error::{Error, Result};
use crate::grid::{AxisGrid, RadialGrid, SpacingLaw};
use crate::hydrogen::{self, EigenstateSpec};
use crate::madelung::{self, Axis, Geometry, PhaseRate, PolarPair, PotentialKind, PotentialProfile};
use crate::quantum_numbers::QuantumNumbers;
use crate::report::{fmt_num, CaseRecord, ErrorMetric, ProfileData, Table, VerificationReport};
use crate::units::PhysicalConstants;

/// Inner end of the default hydrogen grid, in Bohr radii.
pub const HYDROGEN_R_MIN: f64 = 0.05;
/// Outer end of the default hydrogen grid per unit of n_max, in Bohr radii.
pub const HYDROGEN_R_MAX_PER_N: f64 = 60.0;
pub const HYDROGEN_POINTS: usize = 4000;

/// Step of the finite-difference flatness path, in Bohr radii.
pub const FD_STEP: f64 = 1e-3;
/// The finite-difference path starts at r = n a / 2: closer to the origin
/// the h^2 / r^4 truncation of the r^l factor dominates for l >= 1.
pub const FD_INNER_RADIUS_PER_N: f64 = 0.5;
/// Distance kept from radial nodes on the finite-difference path, per unit n a.
pub const FD_NODE_GUARD_PER_N: f64 = 0.01;

/// Half-width of Airy comparison windows, in u.
pub const AIRY_WINDOW_U: f64 = 6.0;
/// Distance kept from zeros of Ai in finite-difference comparisons, in u.
pub const AIRY_ZERO_GUARD_U: f64 = 0.3;
/// Step (in u) for the finite-difference quantum acceleration.
pub const AIRY_ACCEL_STEP_U: f64 = 1e-3;
/// Step (in x, atomic units) for the Bohm-potential comparison.
pub const AIRY_BOHM_STEP: f64 = 1e-4;
/// Step (in u) and time separation for the hydrodynamic residuals, which
/// difference up to third order and are rounding-limited at finer steps.
pub const AIRY_RESIDUAL_STEP_U: f64 = 1e-2;
pub const AIRY_RESIDUAL_DT: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub flatness_analytic: f64,
    pub flatness_fd: f64,
    pub acceleration: f64,
    pub bohr_radius: f64,
    pub level_ratio: f64,
    pub airy_acceleration: f64,
    pub airy_residual: f64,
    pub airy_bohm: f64,
    pub residual: f64,
    pub orthonormality: f64,
    pub current: f64,
    pub divergence: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            flatness_analytic: 1e-8,
            flatness_fd: 1e-4,
            acceleration: 1e-8,
            bohr_radius: 1e-8,
            level_ratio: 1e-12,
            airy_acceleration: 1e-5,
            airy_residual: 1e-5,
            airy_bohm: 1e-6,
            residual: 1e-9,
            orthonormality: 1e-6,
            current: 1e-10,
            divergence: 1e-8,
        }
    }
}

/// `n01_l00_m+00`; zero padding keeps lexicographic order numeric.
pub fn case_id(q: &QuantumNumbers) -> String {
    format!("n{:02}_l{:02}_m{:+03}", q.n(), q.l(), q.m())
}

fn check_n_max(n_max: u32) -> Result<()> {
    if n_max == 0 {
        return Err(Error::QuantumNumbers("n-max must be >= 1".into()));
    }
    if n_max > 100 {
        return Err(Error::QuantumNumbers(format!("n-max must be <= 100 (got {n_max})")));
    }
    Ok(())
}

/// r in [0.05 a, 60 n_max a], 4000 logarithmic points.
pub fn default_hydrogen_grid(n_max: u32, constants: &PhysicalConstants) -> RadialGrid {
    let a = constants.bohr_radius();
    RadialGrid::new(
        HYDROGEN_R_MIN * a,
        HYDROGEN_R_MAX_PER_N * f64::from(n_max.max(1)) * a,
        HYDROGEN_POINTS,
        SpacingLaw::Logarithmic,
    )
    .expect("default hydrogen grid is valid")
}

/// `n,energy,ratio` with ratio = E_n / E_1.
pub fn levels(n_max: u32, constants: &PhysicalConstants) -> Result<Table> {
    check_n_max(n_max)?;
    let e1 = hydrogen::energy_level(1, constants)?;
    let mut t = Table::new(&["n", "energy", "ratio"]);
    for n in 1..=n_max {
        let e = hydrogen::energy_level(i64::from(n), constants)?;
        t.push(vec![n.to_string(), fmt_num(e), fmt_num(e / e1)]);
    }
    Ok(t)
}

/// E_n / E_1 against 1/n^2 for every n <= n_max.
pub fn levels_report(n_max: u32, constants: &PhysicalConstants, tol: f64) -> Result<VerificationReport> {
    check_n_max(n_max)?;
    let e1 = hydrogen::energy_level(1, constants)?;
    let mut records = Vec::new();
    for n in 1..=n_max {
        let e = hydrogen::energy_level(i64::from(n), constants)?;
        let nf = f64::from(n);
        records.push(CaseRecord::new(
            format!("ratio_n{n:02}"),
            e / e1,
            1.0 / (nf * nf),
            tol,
            ErrorMetric::Relative,
        ));
    }
    Ok(VerificationReport::new("levels", records))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LPolicy {
    /// Every valid (l, m).
    All,
    /// l = n - 1 only (all m).
    Circular,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Analytic,
    Fd,
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(Method::Analytic),
            "fd" => Ok(Method::Fd),
            _ => Err(Error::Parameter(format!("unknown method '{s}' (analytic|fd)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatnessConfig {
    pub n_max: u32,
    pub policy: LPolicy,
    pub method: Method,
    pub tolerance: f64,
    pub constants: PhysicalConstants,
    /// Relative perturbation applied to the expected energy. Only useful to
    /// check that the report reacts to a wrong expectation.
    pub energy_perturbation: f64,
}

impl FlatnessConfig {
    pub fn new(n_max: u32, method: Method) -> Self {
        let tol = Tolerances::default();
        Self {
            n_max,
            policy: LPolicy::All,
            method,
            tolerance: match method {
                Method::Analytic => tol.flatness_analytic,
                Method::Fd => tol.flatness_fd,
            },
            constants: PhysicalConstants::atomic(),
            energy_perturbation: 0.0,
        }
    }
}

fn states(n_max: u32, policy: LPolicy) -> Vec<QuantumNumbers> {
    match policy {
        LPolicy::All => QuantumNumbers::all_up_to(n_max),
        LPolicy::Circular => QuantumNumbers::all_up_to(n_max)
            .into_iter()
            .filter(|q| q.l() + 1 == q.n())
            .collect(),
    }
}

/// V_Q = V + V^Bohm on the default grid, analytic Bohm potential.
pub fn analytic_quantum_potential(spec: &EigenstateSpec, grid: &RadialGrid) -> Result<PotentialProfile> {
    madelung::quantum_potential(
        &madelung::coulomb_potential(&spec.constants, grid),
        &madelung::bohm_potential_analytic(spec, grid)?,
    )
}

/// V_Q from second-order differences of R_nl on a uniform grid of step
/// `h` over [n a / 2, r_max], with points near radial nodes excluded.
pub fn fd_quantum_potential(spec: &EigenstateSpec, r_max: f64, h: f64) -> Result<PotentialProfile> {
    let a = spec.constants.bohr_radius();
    let n = f64::from(spec.qn.n());
    let grid = RadialGrid::with_spacing(FD_INNER_RADIUS_PER_N * n * a, r_max, h)?;
    let r = grid
        .points()
        .iter()
        .map(|&r| spec.radial(r).map(|v| v.value))
        .collect::<Result<Vec<_>>>()?;
    let mut bohm =
        madelung::bohm_potential_fd(grid.points(), &r, Geometry::hydrogen(spec), &spec.constants)?;
    let guard = madelung::widen_mask(
        &madelung::sign_change_mask(&r),
        grid.points(),
        FD_NODE_GUARD_PER_N * n * a,
    );
    for (m, g) in bohm.node_mask.iter_mut().zip(guard) {
        *m |= g;
    }
    madelung::quantum_potential(&madelung::coulomb_potential(&spec.constants, &grid), &bohm)
}

/// (value at the worst point, |value - target|) over unmasked points.
fn worst_point(p: &PotentialProfile, target: f64) -> Result<f64> {
    p.unmasked()
        .map(|(_, v)| v)
        .max_by(|a, b| (a - target).abs().total_cmp(&(b - target).abs()))
        .ok_or(Error::EmptyMask)
}

/// One case per state: the V_Q sample farthest from E_n against E_n.
pub fn flatness(cfg: &FlatnessConfig) -> Result<VerificationReport> {
    check_n_max(cfg.n_max)?;
    if cfg.tolerance.is_nan() || cfg.tolerance <= 0.0 {
        return Err(Error::Parameter("tolerance must be > 0".into()));
    }
    let grid = default_hydrogen_grid(cfg.n_max, &cfg.constants);
    let records = states(cfg.n_max, cfg.policy)
        .into_par_iter()
        .map(|q| {
            let spec = EigenstateSpec::new(q, cfg.constants);
            let expected = spec.energy() * (1.0 + cfg.energy_perturbation);
            let vq = match cfg.method {
                Method::Analytic => analytic_quantum_potential(&spec, &grid),
                Method::Fd => fd_quantum_potential(
                    &spec,
                    grid.r_max(),
                    FD_STEP * cfg.constants.bohr_radius(),
                ),
            };
            match vq.and_then(|p| worst_point(&p, expected)) {
                Ok(v) => CaseRecord::new(case_id(&q), v, expected, cfg.tolerance, ErrorMetric::Relative),
                Err(e) => CaseRecord::failed(case_id(&q), expected, cfg.tolerance, ErrorMetric::Relative, &e),
            }
        })
        .collect();
    let name = match cfg.method {
        Method::Analytic => "flatness-analytic",
        Method::Fd => "flatness-fd",
    };
    Ok(VerificationReport::new(name, records))
}

/// One case per state: max |a_Q| on the default grid against 0.
pub fn acceleration(n_max: u32, constants: &PhysicalConstants, tol: f64) -> Result<VerificationReport> {
    check_n_max(n_max)?;
    let grid = default_hydrogen_grid(n_max, constants);
    let records = QuantumNumbers::all_up_to(n_max)
        .into_par_iter()
        .map(|q| {
            let spec = EigenstateSpec::new(q, *constants);
            let worst = analytic_quantum_potential(&spec, &grid).and_then(|vq| {
                madelung::quantum_acceleration(&vq, constants)
                    .max_abs()
                    .ok_or(Error::EmptyMask)
            });
            match worst {
                Ok(a) => CaseRecord::new(case_id(&q), a, 0.0, tol, ErrorMetric::Absolute),
                Err(e) => CaseRecord::failed(case_id(&q), 0.0, tol, ErrorMetric::Absolute, &e),
            }
        })
        .collect();
    Ok(VerificationReport::new("acceleration", records))
}

/// Peak of P_{n,n-1} against n^2 a; table `n,r_peak,expected,rel_error,pass`.
pub fn bohr_radii(
    n_max: u32,
    constants: &PhysicalConstants,
    tol: f64,
) -> Result<(VerificationReport, Table)> {
    check_n_max(n_max)?;
    let a = constants.bohr_radius();
    let mut records = Vec::new();
    let mut table = Table::new(&["n", "r_peak", "expected", "rel_error", "pass"]);
    for n in 1..=n_max {
        let spec = EigenstateSpec::new(
            QuantumNumbers::new(i64::from(n), i64::from(n) - 1, 0)?,
            *constants,
        );
        let expected = f64::from(n * n) * a;
        let id = format!("peak_n{n:02}");
        let rec = match hydrogen::radial_peaks(&spec).as_slice() {
            [r] => CaseRecord::new(id, *r, expected, tol, ErrorMetric::Relative),
            peaks => CaseRecord::failed(
                id,
                expected,
                tol,
                ErrorMetric::Relative,
                &Error::Domain(format!("expected one maximum, found {}", peaks.len())),
            ),
        };
        table.push(vec![
            n.to_string(),
            rec.computed.map(fmt_num).unwrap_or_default(),
            fmt_num(expected),
            rec.rel_error.map(fmt_num).unwrap_or_default(),
            rec.pass.to_string(),
        ]);
        records.push(rec);
    }
    Ok((VerificationReport::new("bohr-radii", records), table))
}

/// One case per state: the relative Schrodinger residual off the node mask.
pub fn eigen_residuals(n_max: u32, constants: &PhysicalConstants, tol: f64) -> Result<VerificationReport> {
    check_n_max(n_max)?;
    let grid = default_hydrogen_grid(n_max, constants);
    let records = QuantumNumbers::all_up_to(n_max)
        .into_par_iter()
        .map(|q| {
            let spec = EigenstateSpec::new(q, *constants);
            match hydrogen::schrodinger_residual(&spec, &grid) {
                Ok(r) => CaseRecord::new(case_id(&q), r, 0.0, tol, ErrorMetric::Absolute),
                Err(e) => CaseRecord::failed(case_id(&q), 0.0, tol, ErrorMetric::Absolute, &e),
            }
        })
        .collect();
    Ok(VerificationReport::new("residual", records))
}

/// One case per state: max_j |G_ij - delta_ij| over its row of the Gram matrix.
pub fn orthonormality(n_max: u32, constants: &PhysicalConstants, tol: f64) -> Result<VerificationReport> {
    check_n_max(n_max)?;
    let states = QuantumNumbers::all_up_to(n_max);
    let gram = hydrogen::gram_matrix(n_max, constants)?;
    let records = states
        .iter()
        .zip(&gram)
        .enumerate()
        .map(|(i, (q, row))| {
            let worst = row
                .iter()
                .enumerate()
                .map(|(j, g)| (g - if i == j { 1.0 } else { 0.0 }).norm())
                .fold(0.0, f64::max);
            CaseRecord::new(case_id(q), worst, 0.0, tol, ErrorMetric::Absolute)
        })
        .collect();
    Ok(VerificationReport::new("orthonormality", records))
}

/// Probe points for current checks, scaled with the orbit size n^2 a.
pub fn current_probe_points(n: u32, constants: &PhysicalConstants) -> Vec<[f64; 3]> {
    let scale = f64::from(n * n) * constants.bohr_radius();
    let mut pts = Vec::new();
    for r in [0.35, 1.0, 1.7] {
        for theta in [0.4, 1.1, 2.3] {
            for phi in [0.3, 2.5] {
                pts.push([r * scale, theta, phi]);
            }
        }
    }
    pts
}

/// Current structure over probe points. m = 0: every component of j
/// vanishes. m != 0: j_r and j_theta vanish and j is divergence-free.
pub fn current_structure(
    n_max: u32,
    constants: &PhysicalConstants,
    tol_current: f64,
    tol_divergence: f64,
) -> Result<VerificationReport> {
    check_n_max(n_max)?;
    let steps = madelung::SphericalSteps::default();
    let records: Vec<Vec<CaseRecord>> = QuantumNumbers::all_up_to(n_max)
        .into_par_iter()
        .map(|q| {
            let spec = EigenstateSpec::new(q, *constants);
            let pts = current_probe_points(q.n(), constants);
            let psi = |r, t, p| spec.psi(r, t, p);
            let id = case_id(&q);
            let current = madelung::probability_current_spherical(psi, &pts, steps, constants).map(|f| {
                let madelung::CurrentField::Spherical { components, .. } = f else {
                    unreachable!("spherical current")
                };
                let upto = if q.m() == 0 { 3 } else { 2 };
                components
                    .iter()
                    .flat_map(|j| j[..upto].iter().map(|v| v.abs()).collect::<Vec<_>>())
                    .fold(0.0, f64::max)
            });
            let name = if q.m() == 0 { "current" } else { "current_rtheta" };
            let mut out = vec![match current {
                Ok(v) => CaseRecord::new(format!("{id}_{name}"), v, 0.0, tol_current, ErrorMetric::Absolute),
                Err(e) => CaseRecord::failed(format!("{id}_{name}"), 0.0, tol_current, ErrorMetric::Absolute, &e),
            }];
            if q.m() != 0 {
                let div = madelung::current_divergence_spherical(psi, &pts, steps, constants)
                    .map(|d| d.iter().map(|v| v.abs()).fold(0.0, f64::max));
                out.push(match div {
                    Ok(v) => CaseRecord::new(format!("{id}_divergence"), v, 0.0, tol_divergence, ErrorMetric::Absolute),
                    Err(e) => CaseRecord::failed(format!("{id}_divergence"), 0.0, tol_divergence, ErrorMetric::Absolute, &e),
                });
            }
            out
        })
        .collect();
    Ok(VerificationReport::new("current", records.into_iter().flatten().collect()))
}

fn zero_potential(coords: &[f64]) -> PotentialProfile {
    PotentialProfile {
        axis: Axis::X,
        coords: coords.to_vec(),
        values: vec![0.0; coords.len()],
        node_mask: vec![false; coords.len()],
        kind: PotentialKind::External,
    }
}

/// Second-order Bohm potential of |Psi| on `grid`, with points within
/// [`AIRY_ZERO_GUARD_U`] of a zero of Ai excluded.
pub fn airy_fd_bohm(params: &AiryPacketParams, grid: &AxisGrid, t: f64) -> Result<PotentialProfile> {
    let psi = airy::sample(params, grid.points(), t)?;
    let polar = madelung::decompose(Axis::X, grid.points(), &psi, params.constants().hbar())?;
    let mut bohm =
        madelung::bohm_potential_fd(grid.points(), &polar.amplitude, Geometry::Line, params.constants())?;
    let guard = madelung::widen_mask(
        &polar.mask,
        grid.points(),
        AIRY_ZERO_GUARD_U / params.inverse_length(),
    );
    for (m, g) in bohm.node_mask.iter_mut().zip(guard) {
        *m |= g;
    }
    Ok(bohm)
}

/// Quantum acceleration value farthest from B^3 / 2m^2 at time t.
pub fn airy_fd_acceleration(params: &AiryPacketParams, t: f64) -> Result<f64> {
    let grid = params.window(t, AIRY_WINDOW_U, AIRY_ACCEL_STEP_U)?;
    let bohm = airy_fd_bohm(params, &grid, t)?;
    let vq = madelung::quantum_potential(&zero_potential(grid.points()), &bohm)?;
    let target = airy::airy_quantum_acceleration(params);
    madelung::quantum_acceleration(&vq, params.constants())
        .defined()
        .map(|(_, a)| a)
        .max_by(|a, b| (a - target).abs().total_cmp(&(b - target).abs()))
        .ok_or(Error::EmptyMask)
}

/// max |fd - closed form| of the Bohm potential at step [`AIRY_BOHM_STEP`].
pub fn airy_bohm_discrepancy(params: &AiryPacketParams, t: f64) -> Result<f64> {
    let k = params.inverse_length();
    let grid = params.window(t, AIRY_WINDOW_U, AIRY_BOHM_STEP * k)?;
    let fd = airy_fd_bohm(params, &grid, t)?;
    fd.unmasked()
        .map(|(x, v)| (v - airy::airy_bohm_closed_form(params, x, t)).abs())
        .reduce(f64::max)
        .ok_or(Error::EmptyMask)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AiryResiduals {
    pub hamilton_jacobi: f64,
    pub continuity: f64,
    pub euler: f64,
}

/// HJ, continuity and Euler residuals at time t. The phase rate and time
/// derivatives come from slices at t -+ dt/2.
pub fn airy_residuals(params: &AiryPacketParams, t: f64) -> Result<AiryResiduals> {
    let grid = params.window(t, AIRY_WINDOW_U, AIRY_RESIDUAL_STEP_U)?;
    let hbar = params.constants().hbar();
    let polar = |t: f64| -> Result<madelung::PolarForm> {
        madelung::decompose(Axis::X, grid.points(), &airy::sample(params, grid.points(), t)?, hbar)
    };
    let dt = AIRY_RESIDUAL_DT;
    let pair = PolarPair::new(polar(t - dt / 2.0)?, polar(t + dt / 2.0)?, dt)?;
    let zero = vec![0.0; grid.len()];
    let rate = madelung::phase_rate(&pair);
    let c = params.constants();
    Ok(AiryResiduals {
        hamilton_jacobi: madelung::hj_residual(&polar(t)?, &zero, PhaseRate::Sampled(&rate), c)?,
        continuity: madelung::continuity_residual(&pair, c)?,
        euler: madelung::euler_residual(&pair, &zero, c)?,
    })
}

/// Grid for tracking the principal lobe from t = 0 to `t_max`.
pub fn airy_trajectory_grid(params: &AiryPacketParams, t_max: f64) -> Result<AxisGrid> {
    let k = params.inverse_length();
    let h = (airy::DEFAULT_U_RANGE.1 - airy::DEFAULT_U_RANGE.0) / (airy::DEFAULT_POINTS - 1) as f64 / k;
    let lo = -AIRY_WINDOW_U / k;
    let hi = AIRY_WINDOW_U / k + airy::airy_peak_trajectory(params, t_max);
    AxisGrid::new(lo, hi, ((hi - lo) / h).round() as usize + 1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AiryConfig {
    pub params: AiryPacketParams,
    pub times: Vec<f64>,
    pub tolerances: Tolerances,
}

/// Acceleration, Bohm-potential, residual and trajectory checks; table
/// `t,x_peak,expected`.
pub fn airy_campaign(cfg: &AiryConfig) -> Result<(VerificationReport, Table)> {
    if cfg.times.is_empty() {
        return Err(Error::Parameter("at least one time is required".into()));
    }
    if cfg.times.iter().any(|t| !t.is_finite()) {
        return Err(Error::Parameter("times must be finite".into()));
    }
    let p = &cfg.params;
    let tol = &cfg.tolerances;
    let a0 = airy::airy_quantum_acceleration(p);
    let mut records = Vec::new();
    let mut push = |id: String, r: Result<f64>, expected: f64, tol: f64, metric| {
        records.push(match r {
            Ok(v) => CaseRecord::new(id, v, expected, tol, metric),
            Err(e) => CaseRecord::failed(id, expected, tol, metric, &e),
        })
    };
    for &t in &cfg.times {
        push(format!("acceleration_t{t}"), airy_fd_acceleration(p, t), a0, tol.airy_acceleration, ErrorMetric::Relative);
        push(format!("bohm_fd_t{t}"), airy_bohm_discrepancy(p, t), 0.0, tol.airy_bohm, ErrorMetric::Absolute);
        match airy_residuals(p, t) {
            Ok(r) => {
                push(format!("hj_residual_t{t}"), Ok(r.hamilton_jacobi), 0.0, tol.airy_residual, ErrorMetric::Absolute);
                push(format!("continuity_residual_t{t}"), Ok(r.continuity), 0.0, tol.airy_residual, ErrorMetric::Absolute);
                push(format!("euler_residual_t{t}"), Ok(r.euler), 0.0, tol.airy_residual, ErrorMetric::Absolute);
            }
            Err(e) => {
                for name in ["hj", "continuity", "euler"] {
                    push(format!("{name}_residual_t{t}"), Err(e.clone()), 0.0, tol.airy_residual, ErrorMetric::Absolute);
                }
            }
        }
    }
    let t_max = cfg.times.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    let mut table = Table::new(&["t", "x_peak", "expected"]);
    match airy_trajectory_grid(p, t_max) {
        Ok(grid) => {
            let h = grid.spacing();
            let start = airy::numeric_peak(p, &grid, 0.0);
            for &t in &cfg.times {
                let expected = airy::airy_peak_trajectory(p, t);
                let shift = start
                    .clone()
                    .and_then(|x0| airy::numeric_peak(p, &grid, t).map(|x| x - x0));
                if let Ok(s) = &shift {
                    table.push(vec![fmt_num(t), fmt_num(*s), fmt_num(expected)]);
                }
                // both argmaxes are quantized to the grid
                push(format!("trajectory_t{t}"), shift, expected, h, ErrorMetric::Absolute);
            }
        }
        Err(e) => push("trajectory".into(), Err(e), 0.0, 0.0, ErrorMetric::Absolute),
    }
    Ok((VerificationReport::new("airy", records), table))
}

/// Observed order of fd Bohm potential convergence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub label: String,
    /// Where the error is measured: the point of largest discrepancy on the
    /// coarsest grid, tracked with centred stencils at the finer steps.
    pub probe: f64,
    pub steps: Vec<f64>,
    pub errors: Vec<f64>,
    /// Least-squares slope of log(error) against log(step).
    pub order: f64,
}

fn fit_order(steps: &[f64], errors: &[f64]) -> f64 {
    let xs: Vec<f64> = steps.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Convergence study for one hydrogen state over r in `window` (Bohr radii).
pub fn hydrogen_convergence(spec: &EigenstateSpec, window: (f64, f64), steps: &[f64]) -> Result<ConvergenceStudy> {
    let a = spec.constants.bohr_radius();
    let n = f64::from(spec.qn.n());
    let geometry = Geometry::hydrogen(spec);
    let coarse = RadialGrid::with_spacing(window.0 * a, window.1 * a, steps[0] * a)?;
    let r = coarse
        .points()
        .iter()
        .map(|&r| spec.radial(r).map(|v| v.value))
        .collect::<Result<Vec<_>>>()?;
    let fd = madelung::bohm_potential_fd(coarse.points(), &r, geometry, &spec.constants)?;
    let exact = madelung::bohm_potential_analytic(spec, &coarse)?;
    let guard = madelung::widen_mask(&madelung::sign_change_mask(&r), coarse.points(), FD_NODE_GUARD_PER_N * n * a);
    let probe = (0..coarse.len())
        .filter(|&i| !fd.node_mask[i] && !exact.node_mask[i] && !guard[i])
        .max_by(|&i, &j| {
            (fd.values[i] - exact.values[i])
                .abs()
                .total_cmp(&(fd.values[j] - exact.values[j]).abs())
        })
        .map(|i| coarse.points()[i])
        .ok_or(Error::EmptyMask)?;
    let exact_at_probe = -spec.constants.kinetic_prefactor() * spec.laplacian_ratio(probe)?;
    let errors = steps
        .iter()
        .map(|&h| {
            let g = AxisGrid::centered(probe, h * a, 2)?;
            let v = g
                .points()
                .iter()
                .map(|&r| spec.radial(r).map(|v| v.value))
                .collect::<Result<Vec<_>>>()?;
            let b = madelung::bohm_potential_fd(g.points(), &v, geometry, &spec.constants)?;
            Ok((b.values[2] - exact_at_probe).abs())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ConvergenceStudy {
        label: case_id(&spec.qn),
        probe,
        order: fit_order(steps, &errors),
        steps: steps.to_vec(),
        errors,
    })
}

/// Convergence study for the Airy packet at t over the comparison window.
pub fn airy_convergence(params: &AiryPacketParams, t: f64, steps: &[f64]) -> Result<ConvergenceStudy> {
    let k = params.inverse_length();
    let coarse = params.window(t, AIRY_WINDOW_U, steps[0] * k)?;
    let fd = airy_fd_bohm(params, &coarse, t)?;
    let probe = fd
        .unmasked()
        .max_by(|a, b| {
            (a.1 - airy::airy_bohm_closed_form(params, a.0, t))
                .abs()
                .total_cmp(&(b.1 - airy::airy_bohm_closed_form(params, b.0, t)).abs())
        })
        .map(|(x, _)| x)
        .ok_or(Error::EmptyMask)?;
    let exact = airy::airy_bohm_closed_form(params, probe, t);
    let errors = steps
        .iter()
        .map(|&h| {
            let g = AxisGrid::centered(probe, h, 2)?;
            let amp = g
                .points()
                .iter()
                .map(|&x| airy::airy_profile(params, x, t).map(f64::abs))
                .collect::<Result<Vec<_>>>()?;
            let b = madelung::bohm_potential_fd(g.points(), &amp, Geometry::Line, params.constants())?;
            Ok((b.values[2] - exact).abs())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ConvergenceStudy {
        label: format!("airy_B{}", params.b()),
        probe,
        order: fit_order(steps, &errors),
        steps: steps.to_vec(),
        errors,
    })
}

/// What a profile is taken of.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Selection {
    State(EigenstateSpec),
    Airy { params: AiryPacketParams, t: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quantity {
    /// P_nl for a state, |Psi|^2 for the packet.
    P,
    V,
    VBohm,
    VQ,
    /// j_phi on the equatorial ray for a state, j_x for the packet.
    J,
    /// Stationary-equation residual for a state, HJ residual for the packet.
    Residual,
}

impl FromStr for Quantity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "P" => Quantity::P,
            "V" => Quantity::V,
            "V_bohm" => Quantity::VBohm,
            "V_q" | "V_Q" => Quantity::VQ,
            "j" => Quantity::J,
            "residual" => Quantity::Residual,
            _ => {
                return Err(Error::Parameter(format!(
                    "unknown quantity '{s}' (P|V|V_bohm|V_q|j|residual)"
                )))
            }
        })
    }
}

impl Quantity {
    pub fn name(&self) -> &'static str {
        match self {
            Quantity::P => "P",
            Quantity::V => "V",
            Quantity::VBohm => "V_bohm",
            Quantity::VQ => "V_q",
            Quantity::J => "j",
            Quantity::Residual => "residual",
        }
    }
}

fn unmasked_profile(
    q: Quantity,
    unit: &str,
    coordinate: &str,
    coordinate_unit: &str,
    coords: &[f64],
    values: Vec<Option<f64>>,
) -> ProfileData {
    ProfileData {
        quantity: q.name().into(),
        unit: unit.into(),
        coordinate: coordinate.into(),
        coordinate_unit: coordinate_unit.into(),
        coords: coords.to_vec(),
        mask: values.iter().map(Option::is_none).collect(),
        values: values.into_iter().map(|v| v.unwrap_or(0.0)).collect(),
    }
}

fn from_potential(q: Quantity, coordinate: &str, p: &PotentialProfile) -> ProfileData {
    ProfileData {
        quantity: q.name().into(),
        unit: "energy".into(),
        coordinate: coordinate.into(),
        coordinate_unit: "length".into(),
        coords: p.coords.clone(),
        values: p.node_mask.iter().zip(&p.values).map(|(m, v)| if *m { 0.0 } else { *v }).collect(),
        mask: p.node_mask.clone(),
    }
}

/// Samples `quantity` for a state on the default hydrogen grid (n_max = n),
/// or for the packet on its default grid translated by x(t).
pub fn profile(selection: &Selection, quantity: Quantity) -> Result<ProfileData> {
    match selection {
        Selection::State(spec) => {
            let grid = default_hydrogen_grid(spec.qn.n(), &spec.constants);
            let pts = grid.points();
            Ok(match quantity {
                Quantity::P => {
                    let p = hydrogen::radial_distribution(spec, &grid)?;
                    unmasked_profile(quantity, "1/length", "r", "length", pts, p.values.into_iter().map(Some).collect())
                }
                Quantity::V => from_potential(quantity, "r", &madelung::coulomb_potential(&spec.constants, &grid)),
                Quantity::VBohm => from_potential(quantity, "r", &madelung::bohm_potential_analytic(spec, &grid)?),
                Quantity::VQ => from_potential(quantity, "r", &analytic_quantum_potential(spec, &grid)?),
                Quantity::J => {
                    let points: Vec<[f64; 3]> = pts.iter().map(|&r| [r, std::f64::consts::FRAC_PI_2, 0.0]).collect();
                    let field = madelung::probability_current_spherical(
                        |r, t, p| spec.psi(r, t, p),
                        &points,
                        madelung::SphericalSteps::default(),
                        &spec.constants,
                    )?;
                    let madelung::CurrentField::Spherical { components, .. } = field else {
                        unreachable!("spherical current")
                    };
                    let vals = components.iter().map(|c| Some(c[2])).collect();
                    let mut d = unmasked_profile(quantity, "1/(length^2 time)", "r", "length", pts, vals);
                    d.quantity = "j_phi".into();
                    d
                }
                Quantity::Residual => {
                    let vals = hydrogen::schrodinger_residual_profile(spec, &grid, spec.energy())?;
                    unmasked_profile(quantity, "relative", "r", "length", pts, vals)
                }
            })
        }
        Selection::Airy { params, t } => {
            let t = *t;
            // the default grid carried along with the packet
            let (k, shift) = (params.inverse_length(), airy::airy_peak_trajectory(params, t));
            let (lo, hi) = airy::DEFAULT_U_RANGE;
            let grid = AxisGrid::new(shift + lo / k, shift + hi / k, airy::DEFAULT_POINTS)?;
            let pts = grid.points();
            let c = params.constants();
            Ok(match quantity {
                Quantity::P => {
                    let psi = airy::sample(params, pts, t)?;
                    unmasked_profile(quantity, "1/length", "x", "length", pts, psi.iter().map(|z| Some(z.norm_sqr())).collect())
                }
                Quantity::V => from_potential(quantity, "x", &zero_potential(pts)),
                Quantity::VBohm | Quantity::VQ => {
                    let mut p = airy::airy_bohm_profile(params, pts, t)?;
                    if quantity == Quantity::VQ {
                        p = madelung::quantum_potential(&zero_potential(pts), &p)?;
                    }
                    from_potential(quantity, "x", &p)
                }
                Quantity::J => {
                    let psi = airy::sample(params, pts, t)?;
                    let madelung::CurrentField::Line { jx, .. } = madelung::probability_current_line(pts, &psi, c)? else {
                        unreachable!("line current")
                    };
                    unmasked_profile(quantity, "1/time", "x", "length", pts, jx)
                }
                Quantity::Residual => {
                    let dt = AIRY_RESIDUAL_DT;
                    let hbar = c.hbar();
                    let polar = |t: f64| -> Result<madelung::PolarForm> {
                        madelung::decompose(Axis::X, pts, &airy::sample(params, pts, t)?, hbar)
                    };
                    let pair = PolarPair::new(polar(t - dt / 2.0)?, polar(t + dt / 2.0)?, dt)?;
                    let rate = madelung::phase_rate(&pair);
                    let zero = vec![0.0; pts.len()];
                    let vals = madelung::hj_residual_profile(&polar(t)?, &zero, PhaseRate::Sampled(&rate), c)?;
                    unmasked_profile(quantity, "energy", "x", "length", pts, vals)
                }
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn levels_table() {
        let t = levels(3, &PhysicalConstants::atomic()).unwrap();
        assert_eq!(t.header, ["n", "energy", "ratio"]);
        assert_eq!(t.rows[1][1], fmt_num(-0.125));
        assert_eq!(t.rows[2][2], fmt_num(1.0 / 9.0));
        assert!(levels(0, &PhysicalConstants::atomic()).is_err());
        assert!(levels_report(20, &PhysicalConstants::atomic(), 1e-12).unwrap().all_pass());
    }

    #[test]
    fn case_ids_sort_numerically() {
        let mut ids: Vec<String> = QuantumNumbers::all_up_to(10).iter().map(case_id).collect();
        let orig = ids.clone();
        ids.sort();
        let n_of = |s: &str| s[1..3].parse::<u32>().unwrap();
        assert!(ids.windows(2).all(|w| n_of(&w[0]) <= n_of(&w[1])));
        assert_eq!(ids.len(), orig.len());
        assert_eq!(case_id(&QuantumNumbers::new(3, 2, -1).unwrap()), "n03_l02_m-01");
    }

    #[test]
    fn flatness_small_campaigns() {
        let rep = flatness(&FlatnessConfig::new(3, Method::Analytic)).unwrap();
        assert_eq!(rep.summary.cases, 14);
        assert!(rep.all_pass(), "{:?}", rep.summary);
        let mut cfg = FlatnessConfig::new(2, Method::Fd);
        cfg.policy = LPolicy::Circular;
        let rep = flatness(&cfg).unwrap();
        assert_eq!(rep.summary.cases, 4);
        assert!(rep.all_pass(), "{:?}", rep.summary);
        cfg.tolerance = 1e-15;
        let rep = flatness(&cfg).unwrap();
        assert_eq!(rep.summary.passes, 0);
        assert!(rep.summary.max_error.unwrap() > 1e-12);
    }

    #[test]
    fn perturbed_expectation_fails() {
        let mut cfg = FlatnessConfig::new(2, Method::Analytic);
        cfg.energy_perturbation = 1e-3;
        assert_eq!(flatness(&cfg).unwrap().summary.passes, 0);
    }

    #[test]
    fn bohr_radii_table() {
        let (rep, t) = bohr_radii(3, &PhysicalConstants::atomic(), 1e-8).unwrap();
        assert!(rep.all_pass());
        assert_eq!(t.to_csv().lines().next().unwrap(), "n,r_peak,expected,rel_error,pass");
    }

    #[test]
    fn profiles() {
        let spec = EigenstateSpec::atomic(1, 0, 0).unwrap();
        let vq = profile(&Selection::State(spec), Quantity::VQ).unwrap();
        assert!(vq.values.iter().zip(&vq.mask).all(|(v, m)| *m || (v + 0.5).abs() < 1e-12));
        let p = profile(&Selection::State(EigenstateSpec::atomic(2, 1, 0).unwrap()), Quantity::P).unwrap();
        assert!(p.values.iter().all(|&v| v >= 0.0));
        assert!(p.coords.windows(2).all(|w| w[1] > w[0]));
        let params = AiryPacketParams::atomic(1.0).unwrap();
        let b = profile(&Selection::Airy { params, t: 0.0 }, Quantity::VBohm).unwrap();
        let slope = (b.values[100] - b.values[10]) / (b.coords[100] - b.coords[10]);
        assert!((slope + 0.5).abs() < 1e-12);
        assert!("bogus".parse::<Quantity>().is_err());
    }

    #[test]
    fn fit_order_of_exact_power_law() {
        let steps = [1e-2, 1e-3, 1e-4];
        let errors: Vec<f64> = steps.iter().map(|h| 3.0 * h * h).collect();
        assert!((fit_order(&steps, &errors) - 2.0).abs() < 1e-12);
    }
}

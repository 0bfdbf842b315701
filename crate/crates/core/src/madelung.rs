//! Madelung variables Psi = A e^{iS/hbar} and the hydrodynamic quantities
//! built from them: Bohm and quantum potentials, quantum acceleration,
//! probability current, and the Hamilton-Jacobi, continuity and Euler
//! residuals.
//!
//! Two Bohm potentials are available for hydrogen eigenstates:
//! [`bohm_potential_analytic`] divides by the full complex psi, while
//! [`bohm_potential_madelung`] uses the real amplitude A = |psi|. They agree
//! for m = 0 and differ by hbar^2 m^2 / (2 M r^2 sin^2 theta) otherwise,
//! which is exactly the azimuthal kinetic term (grad S)^2 / 2M.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::hydrogen::{mask_below, EigenstateSpec, NODE_MASK_THRESHOLD};
use crate::units::PhysicalConstants;

/// Which coordinate a 1D profile is sampled along.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    /// Spherical radius; Laplacians pick up the 2/r first-derivative term.
    Radius,
    /// Cartesian coordinate.
    X,
    /// Azimuthal angle on a ring; used only for phase bookkeeping.
    Azimuth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PotentialKind {
    External,
    Bohm,
    Quantum,
}

/// Samples of V, V^Bohm or V_Q. `node_mask[i]` marks excluded points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialProfile {
    pub axis: Axis,
    pub coords: Vec<f64>,
    pub values: Vec<f64>,
    pub node_mask: Vec<bool>,
    pub kind: PotentialKind,
}

impl PotentialProfile {
    /// (coordinate, value) at every unmasked point.
    pub fn unmasked(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.coords
            .iter()
            .zip(&self.values)
            .zip(&self.node_mask)
            .filter(|(_, &m)| !m)
            .map(|((&c, &v), _)| (c, v))
    }

    /// max |V - target| over unmasked points.
    pub fn max_deviation_from(&self, target: f64) -> Result<f64> {
        self.unmasked()
            .map(|(_, v)| (v - target).abs())
            .reduce(f64::max)
            .ok_or(Error::EmptyMask)
    }

    fn check_finite(&self) -> Result<()> {
        for ((c, v), m) in self.coords.iter().zip(&self.values).zip(&self.node_mask) {
            if !m && !v.is_finite() {
                return Err(Error::Domain(format!("non-finite potential at {c}")));
            }
        }
        Ok(())
    }
}

/// Amplitude and phase (in action units) of a sampled wavefunction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarForm {
    pub axis: Axis,
    pub coords: Vec<f64>,
    pub amplitude: Vec<f64>,
    /// Unwrapped phase S, continuous between unmasked neighbours.
    pub phase: Vec<f64>,
    /// Amplitude below threshold, or adjacent to a phase jump of ~pi
    /// (a sign change of the underlying real profile).
    pub mask: Vec<bool>,
    pub hbar: f64,
}

impl PolarForm {
    pub fn reconstruct(&self) -> Vec<Complex64> {
        self.amplitude
            .iter()
            .zip(&self.phase)
            .map(|(&a, &s)| Complex64::from_polar(a, s / self.hbar))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }
}

/// Splits samples into A = |Psi| and S = hbar * unwrapped arg Psi, unwrapping
/// along the sample order with branch threshold pi.
pub fn decompose(
    axis: Axis,
    coords: &[f64],
    field: &[Complex64],
    hbar: f64,
) -> Result<PolarForm> {
    if coords.len() != field.len() {
        return Err(Error::GridMismatch(format!(
            "{} coordinates for {} samples",
            coords.len(),
            field.len()
        )));
    }
    if field.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::Domain("field contains non-finite samples".into()));
    }
    let amplitude: Vec<f64> = field.iter().map(|z| z.norm()).collect();
    let mut mask = mask_below(&amplitude, NODE_MASK_THRESHOLD);
    if mask.iter().all(|&m| m) {
        return Err(Error::EmptyMask);
    }
    let mut phase = Vec::with_capacity(field.len());
    let mut acc = field.first().map_or(0.0, |z| z.arg());
    phase.push(hbar * acc);
    for i in 1..field.len() {
        let d = wrap(field[i].arg() - field[i - 1].arg());
        if d.abs() > 0.5 * PI {
            mask[i - 1] = true;
            mask[i] = true;
        }
        acc += d;
        phase.push(hbar * acc);
    }
    Ok(PolarForm {
        axis,
        coords: coords.to_vec(),
        amplitude,
        phase,
        mask,
        hbar,
    })
}

/// Wraps an angle into (-pi, pi].
fn wrap(mut d: f64) -> f64 {
    d %= 2.0 * PI;
    if d > PI {
        d -= 2.0 * PI;
    } else if d <= -PI {
        d += 2.0 * PI;
    }
    d
}

/// Finite-difference kernels on uniformly spaced samples.
pub(crate) mod fd {
    pub fn d1_2(v: &[f64], i: usize, h: f64) -> f64 {
        (v[i + 1] - v[i - 1]) / (2.0 * h)
    }

    pub fn d2_2(v: &[f64], i: usize, h: f64) -> f64 {
        (v[i + 1] - 2.0 * v[i] + v[i - 1]) / (h * h)
    }

    pub fn d1_4(v: &[f64], i: usize, h: f64) -> f64 {
        (-v[i + 2] + 8.0 * v[i + 1] - 8.0 * v[i - 1] + v[i - 2]) / (12.0 * h)
    }

    pub fn d2_4(v: &[f64], i: usize, h: f64) -> f64 {
        (-v[i + 2] + 16.0 * v[i + 1] - 30.0 * v[i] + 16.0 * v[i - 1] - v[i - 2]) / (12.0 * h * h)
    }

    /// True when i +- half lies inside the data and no point in that window is masked.
    pub fn stencil_clear(mask: &[bool], i: usize, half: usize) -> bool {
        i >= half && i + half < mask.len() && !mask[i - half..=i + half].iter().any(|&m| m)
    }

    /// d/dx on a possibly nonuniform grid, second order (three points).
    pub fn d1_nonuniform(x: &[f64], v: &[f64], i: usize) -> f64 {
        let hm = x[i] - x[i - 1];
        let hp = x[i + 1] - x[i];
        (hm * hm * v[i + 1] - hp * hp * v[i - 1] + (hp * hp - hm * hm) * v[i])
            / (hp * hm * (hp + hm))
    }
}

/// Uniform spacing of `coords`, or an error if they are not uniform.
pub(crate) fn uniform_spacing(coords: &[f64], min_len: usize) -> Result<f64> {
    if coords.len() < min_len {
        return Err(Error::Grid(format!(
            "need at least {min_len} points, got {}",
            coords.len()
        )));
    }
    let h = (coords[coords.len() - 1] - coords[0]) / (coords.len() - 1) as f64;
    let scale = coords[0].abs().max(coords[coords.len() - 1].abs()).max(h);
    for w in coords.windows(2) {
        if ((w[1] - w[0]) - h).abs() > 1e-9 * scale {
            return Err(Error::Grid("finite differences need a uniform grid".into()));
        }
    }
    Ok(h)
}

/// Marks both samples on either side of every sign change of a real profile.
pub fn sign_change_mask(values: &[f64]) -> Vec<bool> {
    let mut mask = vec![false; values.len()];
    for i in 1..values.len() {
        if (values[i - 1] < 0.0) != (values[i] < 0.0) {
            mask[i - 1] = true;
            mask[i] = true;
        }
    }
    mask
}

/// Extends a mask to every point within `distance` of a masked point.
///
/// Second differences of a profile near a simple zero carry a truncation
/// error of order h^2 / (distance to the zero), so comparisons against
/// closed forms keep a fixed distance from zeros.
pub fn widen_mask(mask: &[bool], coords: &[f64], distance: f64) -> Vec<bool> {
    let centres: Vec<f64> = coords
        .iter()
        .zip(mask)
        .filter(|(_, &m)| m)
        .map(|(&c, _)| c)
        .collect();
    coords
        .iter()
        .zip(mask)
        .map(|(&c, &m)| {
            if m {
                return true;
            }
            let k = centres.partition_point(|&z| z < c);
            let near = |j: usize| centres.get(j).is_some_and(|z| (z - c).abs() <= distance);
            near(k) || (k > 0 && near(k - 1))
        })
        .collect()
}

/// V(r) = -coulomb / r.
pub fn coulomb_potential(constants: &PhysicalConstants, grid: &RadialGrid) -> PotentialProfile {
    PotentialProfile {
        axis: Axis::Radius,
        coords: grid.points().to_vec(),
        values: grid.points().iter().map(|&r| -constants.coulomb() / r).collect(),
        node_mask: vec![false; grid.len()],
        kind: PotentialKind::External,
    }
}

/// -(hbar^2/2m) (nabla^2 psi)/psi for a hydrogen eigenstate, from the
/// analytic radial derivatives and the exact angular eigenvalue. Points
/// where |R| < 1e-12 max|R| are masked.
pub fn bohm_potential_analytic(
    spec: &EigenstateSpec,
    grid: &RadialGrid,
) -> Result<PotentialProfile> {
    let pref = spec.constants.kinetic_prefactor();
    let mut mask = crate::hydrogen::node_mask(spec, grid)?;
    let mut values = Vec::with_capacity(grid.len());
    for (&r, m) in grid.points().iter().zip(mask.iter_mut()) {
        let v = -pref * spec.laplacian_ratio(r)?;
        if !v.is_finite() {
            *m = true;
        }
        values.push(if v.is_finite() { v } else { 0.0 });
    }
    if mask.iter().all(|&m| m) {
        return Err(Error::EmptyMask);
    }
    let p = PotentialProfile {
        axis: Axis::Radius,
        coords: grid.points().to_vec(),
        values,
        node_mask: mask,
        kind: PotentialKind::Bohm,
    };
    p.check_finite()?;
    Ok(p)
}

/// Strict Madelung Bohm potential -(hbar^2/2m) nabla^2 A / A with A = |psi|,
/// along the ray at polar angle `theta`.
pub fn bohm_potential_madelung(
    spec: &EigenstateSpec,
    grid: &RadialGrid,
    theta: f64,
) -> Result<PotentialProfile> {
    let mut p = bohm_potential_analytic(spec, grid)?;
    let m = f64::from(spec.qn.m());
    let s2 = theta.sin().powi(2);
    if m != 0.0 && s2 == 0.0 {
        return Err(Error::Domain(
            "strict Bohm potential diverges on the polar axis for m != 0".into(),
        ));
    }
    if m != 0.0 {
        let pref = spec.constants.kinetic_prefactor();
        for (v, &r) in p.values.iter_mut().zip(&p.coords) {
            *v -= pref * m * m / (r * r * s2);
        }
    }
    Ok(p)
}

/// How the angular part of the Laplacian enters a radial finite-difference
/// Bohm potential: it contributes `coefficient / r^2` to nabla^2 A / A.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Geometry {
    /// Cartesian second derivative only.
    Line,
    /// A'' + 2A'/r + coefficient A / r^2.
    Radial { angular_coefficient: f64 },
}

impl Geometry {
    /// Angular coefficient -l(l+1) of an eigenstate's spherical harmonic.
    pub fn hydrogen(spec: &EigenstateSpec) -> Self {
        let l = f64::from(spec.qn.l());
        Geometry::Radial {
            angular_coefficient: -l * (l + 1.0),
        }
    }
}

/// Second-order central-difference Bohm potential of real amplitude
/// samples on a uniform grid (at least 5 points). End points and points
/// whose stencil touches a node-masked sample are masked.
pub fn bohm_potential_fd(
    coords: &[f64],
    amplitude: &[f64],
    geometry: Geometry,
    constants: &PhysicalConstants,
) -> Result<PotentialProfile> {
    if coords.len() != amplitude.len() {
        return Err(Error::GridMismatch("coordinate/amplitude length".into()));
    }
    let h = uniform_spacing(coords, 5)?;
    let base_mask = mask_below(amplitude, NODE_MASK_THRESHOLD);
    let pref = constants.kinetic_prefactor();
    let mut values = vec![0.0; coords.len()];
    let mut mask = vec![true; coords.len()];
    for i in 1..coords.len() - 1 {
        if !fd::stencil_clear(&base_mask, i, 1) {
            continue;
        }
        let a = amplitude[i];
        let lap = match geometry {
            Geometry::Line => fd::d2_2(amplitude, i, h),
            Geometry::Radial {
                angular_coefficient,
            } => {
                let r = coords[i];
                fd::d2_2(amplitude, i, h)
                    + 2.0 * fd::d1_2(amplitude, i, h) / r
                    + angular_coefficient * a / (r * r)
            }
        };
        values[i] = -pref * lap / a;
        mask[i] = false;
    }
    if mask.iter().all(|&m| m) {
        return Err(Error::EmptyMask);
    }
    Ok(PotentialProfile {
        axis: match geometry {
            Geometry::Line => Axis::X,
            Geometry::Radial { .. } => Axis::Radius,
        },
        coords: coords.to_vec(),
        values,
        node_mask: mask,
        kind: PotentialKind::Bohm,
    })
}

/// V_Q = V + V^Bohm, masked wherever either input is.
pub fn quantum_potential(
    external: &PotentialProfile,
    bohm: &PotentialProfile,
) -> Result<PotentialProfile> {
    if external.coords.len() != bohm.coords.len()
        || external
            .coords
            .iter()
            .zip(&bohm.coords)
            .any(|(a, b)| (a - b).abs() > 1e-12 * a.abs().max(b.abs()).max(1e-300))
    {
        return Err(Error::GridMismatch(
            "external and Bohm potentials are sampled on different grids".into(),
        ));
    }
    Ok(PotentialProfile {
        axis: bohm.axis,
        coords: bohm.coords.clone(),
        values: external
            .values
            .iter()
            .zip(&bohm.values)
            .map(|(v, b)| v + b)
            .collect(),
        node_mask: external
            .node_mask
            .iter()
            .zip(&bohm.node_mask)
            .map(|(a, b)| *a || *b)
            .collect(),
        kind: PotentialKind::Quantum,
    })
}

/// -(1/m) dV_Q/dx along the profile's axis. `None` at masked points, at
/// the ends of unmasked runs, and on runs shorter than three points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccelerationField {
    pub axis: Axis,
    pub coords: Vec<f64>,
    pub values: Vec<Option<f64>>,
}

impl AccelerationField {
    pub fn max_abs(&self) -> Option<f64> {
        self.values.iter().flatten().map(|v| v.abs()).reduce(f64::max)
    }

    pub fn defined(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.coords
            .iter()
            .zip(&self.values)
            .filter_map(|(&c, v)| v.map(|v| (c, v)))
    }
}

pub fn quantum_acceleration(
    quantum: &PotentialProfile,
    constants: &PhysicalConstants,
) -> AccelerationField {
    let n = quantum.coords.len();
    let mut values = vec![None; n];
    for (i, slot) in values.iter_mut().enumerate().take(n.saturating_sub(1)).skip(1) {
        if fd::stencil_clear(&quantum.node_mask, i, 1) {
            let g = fd::d1_nonuniform(&quantum.coords, &quantum.values, i);
            *slot = Some(-g / constants.mass());
        }
    }
    AccelerationField {
        axis: quantum.axis,
        coords: quantum.coords.clone(),
        values,
    }
}

/// Probability current. Spherical components are (r, theta, phi).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CurrentField {
    Line {
        coords: Vec<f64>,
        jx: Vec<Option<f64>>,
    },
    Spherical {
        points: Vec<[f64; 3]>,
        components: Vec<[f64; 3]>,
    },
}

/// j = (hbar/m) Im(psi* dpsi/dx) from central differences on a uniform axis.
pub fn probability_current_line(
    coords: &[f64],
    field: &[Complex64],
    constants: &PhysicalConstants,
) -> Result<CurrentField> {
    if coords.len() != field.len() {
        return Err(Error::GridMismatch("coordinate/field length".into()));
    }
    let h = uniform_spacing(coords, 3)?;
    let k = constants.hbar() / constants.mass();
    let mut jx = vec![None; coords.len()];
    for i in 1..coords.len() - 1 {
        let d = (field[i + 1] - field[i - 1]) / (2.0 * h);
        jx[i] = Some(k * (field[i].conj() * d).im);
    }
    Ok(CurrentField::Line {
        coords: coords.to_vec(),
        jx,
    })
}

/// Step sizes for local spherical stencils.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalSteps {
    pub dr: f64,
    pub dtheta: f64,
    pub dphi: f64,
}

impl Default for SphericalSteps {
    fn default() -> Self {
        Self {
            dr: 1e-3,
            dtheta: 1e-3,
            dphi: 1e-3,
        }
    }
}

/// j at each point, (hbar/m) Im(psi* grad psi) with grad in spherical
/// components and central differences of step `steps`.
pub fn probability_current_spherical<F>(
    psi: F,
    points: &[[f64; 3]],
    steps: SphericalSteps,
    constants: &PhysicalConstants,
) -> Result<CurrentField>
where
    F: Fn(f64, f64, f64) -> Result<Complex64>,
{
    let components = points
        .iter()
        .map(|p| current_at(&psi, *p, steps, constants))
        .collect::<Result<Vec<_>>>()?;
    Ok(CurrentField::Spherical {
        points: points.to_vec(),
        components,
    })
}

fn current_at<F>(
    psi: &F,
    [r, t, p]: [f64; 3],
    s: SphericalSteps,
    c: &PhysicalConstants,
) -> Result<[f64; 3]>
where
    F: Fn(f64, f64, f64) -> Result<Complex64>,
{
    let k = c.hbar() / c.mass();
    let centre = psi(r, t, p)?.conj();
    let dr = (psi(r + s.dr, t, p)? - psi(r - s.dr, t, p)?) / (2.0 * s.dr);
    let dt = (psi(r, t + s.dtheta, p)? - psi(r, t - s.dtheta, p)?) / (2.0 * s.dtheta);
    let dp = (psi(r, t, p + s.dphi)? - psi(r, t, p - s.dphi)?) / (2.0 * s.dphi);
    Ok([
        k * (centre * dr).im,
        k * (centre * dt).im / r,
        k * (centre * dp).im / (r * t.sin()),
    ])
}

/// div j at each point, differencing [`probability_current_spherical`]
/// with the same steps.
pub fn current_divergence_spherical<F>(
    psi: F,
    points: &[[f64; 3]],
    steps: SphericalSteps,
    constants: &PhysicalConstants,
) -> Result<Vec<f64>>
where
    F: Fn(f64, f64, f64) -> Result<Complex64>,
{
    points
        .iter()
        .map(|&[r, t, p]| {
            let j = |rr: f64, tt: f64, pp: f64| current_at(&psi, [rr, tt, pp], steps, constants);
            let (hr, ht, hp) = (steps.dr, steps.dtheta, steps.dphi);
            let radial = ((r + hr).powi(2) * j(r + hr, t, p)?[0]
                - (r - hr).powi(2) * j(r - hr, t, p)?[0])
                / (2.0 * hr * r * r);
            let polar = ((t + ht).sin() * j(r, t + ht, p)?[1]
                - (t - ht).sin() * j(r, t - ht, p)?[1])
                / (2.0 * ht * r * t.sin());
            let azimuthal =
                (j(r, t, p + hp)?[2] - j(r, t, p - hp)?[2]) / (2.0 * hp * r * t.sin());
            Ok(radial + polar + azimuthal)
        })
        .collect()
}

/// Source of dS/dt for the Hamilton-Jacobi residual.
#[derive(Debug, Clone, Copy)]
pub enum PhaseRate<'a> {
    /// Stationary state: dS/dt = -E everywhere.
    Stationary { energy: f64 },
    /// Pointwise samples of dS/dt, e.g. from [`phase_rate`].
    Sampled(&'a [f64]),
}

/// Two polar forms on the same grid, `dt` apart. Residuals built from a
/// pair are evaluated at the midpoint time.
#[derive(Debug, Clone)]
pub struct PolarPair {
    pub earlier: PolarForm,
    pub later: PolarForm,
    pub dt: f64,
}

impl PolarPair {
    pub fn new(earlier: PolarForm, later: PolarForm, dt: f64) -> Result<Self> {
        if earlier.coords != later.coords || earlier.axis != later.axis {
            return Err(Error::GridMismatch("time slices use different grids".into()));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::Parameter(format!("dt must be > 0 (got {dt})")));
        }
        Ok(Self { earlier, later, dt })
    }

    fn mask(&self) -> Vec<bool> {
        self.earlier
            .mask
            .iter()
            .zip(&self.later.mask)
            .map(|(a, b)| *a || *b)
            .collect()
    }
}

/// dS/dt at the midpoint time, with the phase difference wrapped into
/// (-pi hbar, pi hbar].
pub fn phase_rate(pair: &PolarPair) -> Vec<f64> {
    let hbar = pair.earlier.hbar;
    pair.earlier
        .phase
        .iter()
        .zip(&pair.later.phase)
        .map(|(a, b)| hbar * wrap((b - a) / hbar) / pair.dt)
        .collect()
}

/// Pointwise Madelung terms on a 1D axis, fourth-order differences.
struct LineTerms {
    kinetic: f64,
    bohm: f64,
    momentum: f64,
    momentum_slope: f64,
    density_flux_divergence: f64,
}

fn line_terms(polar: &PolarForm, i: usize, h: f64, c: &PhysicalConstants) -> LineTerms {
    let a = &polar.amplitude;
    let s = &polar.phase;
    let (a0, a1, a2) = (a[i], fd::d1_4(a, i, h), fd::d2_4(a, i, h));
    let (s1, s2) = (fd::d1_4(s, i, h), fd::d2_4(s, i, h));
    let (lap, div) = match polar.axis {
        Axis::Radius => {
            let r = polar.coords[i];
            (a2 + 2.0 * a1 / r, 2.0 * a0 * a1 * s1 + a0 * a0 * (s2 + 2.0 * s1 / r))
        }
        _ => (a2, 2.0 * a0 * a1 * s1 + a0 * a0 * s2),
    };
    LineTerms {
        kinetic: s1 * s1 / (2.0 * c.mass()),
        bohm: -c.kinetic_prefactor() * lap / a0,
        momentum: s1,
        momentum_slope: s2,
        density_flux_divergence: div / c.mass(),
    }
}

fn max_over<I: Iterator<Item = f64>>(it: I) -> Result<f64> {
    it.map(f64::abs).reduce(f64::max).ok_or(Error::EmptyMask)
}

/// max |(dS/dx)^2/2m + V^Bohm + V + dS/dt| over usable points of a 1D polar
/// form, with fourth-order central differences.
pub fn hj_residual(
    polar: &PolarForm,
    external: &[f64],
    rate: PhaseRate<'_>,
    constants: &PhysicalConstants,
) -> Result<f64> {
    max_over(
        hj_residual_profile(polar, external, rate, constants)?
            .into_iter()
            .flatten(),
    )
}

/// Pointwise form of [`hj_residual`]; `None` where the stencil is unusable.
pub fn hj_residual_profile(
    polar: &PolarForm,
    external: &[f64],
    rate: PhaseRate<'_>,
    constants: &PhysicalConstants,
) -> Result<Vec<Option<f64>>> {
    if external.len() != polar.len() {
        return Err(Error::GridMismatch("external potential length".into()));
    }
    if let PhaseRate::Sampled(r) = rate {
        if r.len() != polar.len() {
            return Err(Error::GridMismatch("phase-rate length".into()));
        }
    }
    let h = uniform_spacing(&polar.coords, 5)?;
    Ok((0..polar.len())
        .map(|i| {
            if !fd::stencil_clear(&polar.mask, i, 2) {
                return None;
            }
            let t = line_terms(polar, i, h, constants);
            let dsdt = match rate {
                PhaseRate::Stationary { energy } => -energy,
                PhaseRate::Sampled(r) => r[i],
            };
            Some(t.kinetic + t.bohm + external[i] + dsdt)
        })
        .collect())
}

/// max |(1/m) d/dx(A^2 dS/dx) + d(A^2)/dt| at the pair's midpoint time.
/// Spatial terms are averaged over the two slices; the time derivative is
/// the centred difference of A^2.
pub fn continuity_residual(pair: &PolarPair, constants: &PhysicalConstants) -> Result<f64> {
    let h = uniform_spacing(&pair.earlier.coords, 5)?;
    let mask = pair.mask();
    max_over((0..mask.len()).filter_map(|i| {
        if !fd::stencil_clear(&mask, i, 2) {
            return None;
        }
        let e = line_terms(&pair.earlier, i, h, constants);
        let l = line_terms(&pair.later, i, h, constants);
        let div = 0.5 * (e.density_flux_divergence + l.density_flux_divergence);
        let d_density = (pair.later.amplitude[i].powi(2) - pair.earlier.amplitude[i].powi(2))
            / pair.dt;
        Some(div + d_density)
    }))
}

/// max |Dp/Dt + dV_Q/dx| at the pair's midpoint time, with p = dS/dx,
/// Dp/Dt = (p/m) dp/dx + dp/dt and V_Q = V + V^Bohm.
pub fn euler_residual(
    pair: &PolarPair,
    external: &[f64],
    constants: &PhysicalConstants,
) -> Result<f64> {
    let h = uniform_spacing(&pair.earlier.coords, 5)?;
    if external.len() != pair.earlier.len() {
        return Err(Error::GridMismatch("external potential length".into()));
    }
    let mask = pair.mask();
    let n = mask.len();
    // V_Q at both times, then its gradient needs two more points of clearance
    let vq = |polar: &PolarForm| -> Vec<Option<f64>> {
        (0..n)
            .map(|i| {
                fd::stencil_clear(&mask, i, 2)
                    .then(|| line_terms(polar, i, h, constants).bohm + external[i])
            })
            .collect()
    };
    let (vq_e, vq_l) = (vq(&pair.earlier), vq(&pair.later));
    let grad = |v: &[Option<f64>], i: usize| -> Option<f64> {
        if i < 2 || i + 2 >= n {
            return None;
        }
        let w: Option<Vec<f64>> = v[i - 2..=i + 2].iter().copied().collect();
        w.map(|w| (-w[4] + 8.0 * w[3] - 8.0 * w[1] + w[0]) / (12.0 * h))
    };
    max_over((0..n).filter_map(|i| {
        let g = 0.5 * (grad(&vq_e, i)? + grad(&vq_l, i)?);
        let e = line_terms(&pair.earlier, i, h, constants);
        let l = line_terms(&pair.later, i, h, constants);
        let p = 0.5 * (e.momentum + l.momentum);
        let dpdx = 0.5 * (e.momentum_slope + l.momentum_slope);
        let dpdt = (l.momentum - e.momentum) / pair.dt;
        Some(p / constants.mass() * dpdx + dpdt + g)
    }))
}

/// Madelung terms of a 3D wavefunction at one point, from fourth-order
/// local stencils in (r, theta, phi).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalMadelung {
    /// (grad S)^2 / 2m
    pub kinetic: f64,
    /// -(hbar^2/2m) nabla^2 A / A
    pub bohm: f64,
    /// (grad S)_phi = (1/(r sin theta)) dS/dphi
    pub azimuthal_momentum: f64,
}

/// Evaluates A = |psi| and S = hbar arg psi on five-point stencils around
/// `(r, theta, phi)` and forms the kinetic and strict Bohm terms.
pub fn spherical_madelung<F>(
    psi: &F,
    [r, t, p]: [f64; 3],
    steps: SphericalSteps,
    constants: &PhysicalConstants,
) -> Result<SphericalMadelung>
where
    F: Fn(f64, f64, f64) -> Result<Complex64>,
{
    let hbar = constants.hbar();
    let centre = psi(r, t, p)?;
    let line = |f: &dyn Fn(f64) -> Result<Complex64>, h: f64| -> Result<([f64; 5], [f64; 5])> {
        let mut amp = [0.0; 5];
        let mut phase = [0.0; 5];
        for (k, off) in (-2i32..=2).enumerate() {
            let z = f(f64::from(off) * h)?;
            amp[k] = z.norm();
            // phase relative to the centre sample, so no unwrapping is needed
            phase[k] = hbar * (z * centre.conj()).arg();
        }
        Ok((amp, phase))
    };
    let (ar, sr) = line(&|d| psi(r + d, t, p), steps.dr)?;
    let (at, st) = line(&|d| psi(r, t + d, p), steps.dtheta)?;
    let (ap, sp) = line(&|d| psi(r, t, p + d), steps.dphi)?;
    let d1 = |v: &[f64; 5], h: f64| fd::d1_4(v, 2, h);
    let d2 = |v: &[f64; 5], h: f64| fd::d2_4(v, 2, h);
    let a0 = centre.norm();
    let sin_t = t.sin();
    let lap = d2(&ar, steps.dr)
        + 2.0 * d1(&ar, steps.dr) / r
        + (d2(&at, steps.dtheta) + t.cos() / sin_t * d1(&at, steps.dtheta)) / (r * r)
        + d2(&ap, steps.dphi) / (r * r * sin_t * sin_t);
    let g_r = d1(&sr, steps.dr);
    let g_t = d1(&st, steps.dtheta) / r;
    let g_p = d1(&sp, steps.dphi) / (r * sin_t);
    Ok(SphericalMadelung {
        kinetic: (g_r * g_r + g_t * g_t + g_p * g_p) / (2.0 * constants.mass()),
        bohm: -constants.kinetic_prefactor() * lap / a0,
        azimuthal_momentum: g_p,
    })
}

/// max |(grad S)^2/2m + V^Bohm + V - E| over the probe points of a
/// hydrogen eigenstate, with dS/dt = -E_n supplied analytically.
pub fn hydrogen_hj_residual(
    spec: &EigenstateSpec,
    points: &[[f64; 3]],
    steps: SphericalSteps,
) -> Result<f64> {
    let c = spec.constants;
    let psi = |r: f64, t: f64, p: f64| spec.psi(r, t, p);
    max_over(
        points
            .iter()
            .map(|&pt| {
                let m = spherical_madelung(&psi, pt, steps, &c)?;
                Ok(m.kinetic + m.bohm - c.coulomb() / pt[0] - spec.energy())
            })
            .collect::<Result<Vec<f64>>>()?
            .into_iter(),
    )
}

/// max |div j| over probe points of a stationary state (d(A^2)/dt = 0).
pub fn hydrogen_continuity_residual(
    spec: &EigenstateSpec,
    points: &[[f64; 3]],
    steps: SphericalSteps,
) -> Result<f64> {
    let psi = |r: f64, t: f64, p: f64| spec.psi(r, t, p);
    max_over(current_divergence_spherical(psi, points, steps, &spec.constants)?.into_iter())
}

//! The accelerating Airy free-particle packet
//!
//! Psi(x, t) = Ai(u) exp(i phi), u = (B / hbar^{2/3}) (x - B^3 t^2 / 4m^2),
//! phi = B^3 t (6 m^2 x - B^3 t^2) / (12 m^3 hbar).
//!
//! The packet is not normalizable, so every quantity here is absolute.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::AxisGrid;
use crate::hydrogen::mask_below;
use crate::hydrogen::NODE_MASK_THRESHOLD;
use crate::madelung::{Axis, PotentialKind, PotentialProfile};
use crate::specfun::{AIRY_MAX_ARG as MAX_ARG, AIRY_MIN_ARG as MIN_ARG};
use crate::specfun::airy_ai;
use crate::units::PhysicalConstants;

/// Grid extent of the default packet grid, in units of u.
pub const DEFAULT_U_RANGE: (f64, f64) = (-15.0, 10.0);
pub const DEFAULT_POINTS: usize = 8000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AiryPacketParams {
    b: f64,
    constants: PhysicalConstants,
}

impl AiryPacketParams {
    pub fn new(b: f64, constants: PhysicalConstants) -> Result<Self> {
        if !(b.is_finite() && b > 0.0) {
            return Err(Error::Parameter(format!("B must be finite and > 0 (got {b})")));
        }
        Ok(Self { b, constants })
    }

    /// B in atomic units.
    pub fn atomic(b: f64) -> Result<Self> {
        Self::new(b, PhysicalConstants::atomic())
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn constants(&self) -> &PhysicalConstants {
        &self.constants
    }

    /// B / hbar^{2/3}, the inverse length converting x to u.
    pub fn inverse_length(&self) -> f64 {
        self.b / self.constants.hbar().powf(2.0 / 3.0)
    }

    /// u(x, t).
    pub fn argument(&self, x: f64, t: f64) -> f64 {
        self.inverse_length() * (x - airy_peak_trajectory(self, t))
    }

    /// phi(x, t), the phase in radians.
    pub fn phase(&self, x: f64, t: f64) -> f64 {
        let m = self.constants.mass();
        let b3 = self.b.powi(3);
        b3 * t * (6.0 * m * m * x - b3 * t * t) / (12.0 * m.powi(3) * self.constants.hbar())
    }

    /// Uniform velocity field dS/dx / m = B^3 t / (2 m^2).
    pub fn velocity(&self, t: f64) -> f64 {
        self.b.powi(3) * t / (2.0 * self.constants.mass().powi(2))
    }

    /// dS/dt = B^3 x / 2m - B^6 t^2 / 4m^3.
    pub fn phase_rate(&self, x: f64, t: f64) -> f64 {
        let m = self.constants.mass();
        let b3 = self.b.powi(3);
        b3 * x / (2.0 * m) - b3 * b3 * t * t / (4.0 * m.powi(3))
    }

    /// The default grid: u in [-15, 10] at t = 0, 8000 uniform points.
    pub fn default_grid(&self) -> AxisGrid {
        let k = self.inverse_length();
        AxisGrid::new(DEFAULT_U_RANGE.0 / k, DEFAULT_U_RANGE.1 / k, DEFAULT_POINTS)
            .expect("default Airy grid is valid")
    }

    /// Uniform grid following the packet: u in [-half_width_u, half_width_u]
    /// at time t with spacing `step_u` in u.
    pub fn window(&self, t: f64, half_width_u: f64, step_u: f64) -> Result<AxisGrid> {
        let k = self.inverse_length();
        let half = (half_width_u / step_u).round() as usize;
        AxisGrid::centered(airy_peak_trajectory(self, t), step_u / k, half)
    }
}

/// Ai(u(x, t)), the signed real profile whose modulus is the amplitude.
pub fn airy_profile(params: &AiryPacketParams, x: f64, t: f64) -> Result<f64> {
    airy_ai(params.argument(x, t))
}

pub fn airy_psi(params: &AiryPacketParams, x: f64, t: f64) -> Result<Complex64> {
    let a = airy_profile(params, x, t)?;
    Ok(a * Complex64::from_polar(1.0, params.phase(x, t)))
}

/// Psi sampled on a grid.
pub fn sample(params: &AiryPacketParams, coords: &[f64], t: f64) -> Result<Vec<Complex64>> {
    coords.iter().map(|&x| airy_psi(params, x, t)).collect()
}

/// V^Bohm = -(B^3 / 2m)(x - B^3 t^2 / 4m^2), from Ai''(u) = u Ai(u).
pub fn airy_bohm_closed_form(params: &AiryPacketParams, x: f64, t: f64) -> f64 {
    -params.b.powi(3) / (2.0 * params.constants.mass()) * (x - airy_peak_trajectory(params, t))
}

/// Closed-form Bohm profile, masked where |Ai| < 1e-12 max |Ai|.
pub fn airy_bohm_profile(
    params: &AiryPacketParams,
    coords: &[f64],
    t: f64,
) -> Result<PotentialProfile> {
    let amp = coords
        .iter()
        .map(|&x| airy_profile(params, x, t).map(f64::abs))
        .collect::<Result<Vec<_>>>()?;
    Ok(PotentialProfile {
        axis: Axis::X,
        coords: coords.to_vec(),
        values: coords
            .iter()
            .map(|&x| airy_bohm_closed_form(params, x, t))
            .collect(),
        node_mask: mask_below(&amp, NODE_MASK_THRESHOLD),
        kind: PotentialKind::Bohm,
    })
}

/// a_Q = B^3 / (2 m^2).
pub fn airy_quantum_acceleration(params: &AiryPacketParams) -> f64 {
    params.b.powi(3) / (2.0 * params.constants.mass().powi(2))
}

/// x(t) = B^3 t^2 / (4 m^2), the translation of every u = const feature.
pub fn airy_peak_trajectory(params: &AiryPacketParams, t: f64) -> f64 {
    params.b.powi(3) * t * t / (4.0 * params.constants.mass().powi(2))
}

/// Grid point of the global maximum of |Psi(., t)|. Points whose argument
/// lies outside the evaluable range of Ai are skipped; |Ai| there is below
/// 0.28, well under the principal-lobe maximum 0.536.
pub fn numeric_peak(params: &AiryPacketParams, grid: &AxisGrid, t: f64) -> Result<f64> {
    let mut best = (f64::NEG_INFINITY, f64::NAN);
    for &x in grid.points() {
        let u = params.argument(x, t);
        if !(MIN_ARG..=MAX_ARG).contains(&u) {
            continue;
        }
        let a = airy_ai(u)?.abs();
        if a > best.0 {
            best = (a, x);
        }
    }
    if best.1.is_nan() {
        return Err(Error::Domain("grid does not reach the evaluable range of Ai".into()));
    }
    Ok(best.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::madelung::{bohm_potential_fd, Geometry};

    #[test]
    fn psi_examples() {
        let p = AiryPacketParams::atomic(1.0).unwrap();
        let z = airy_psi(&p, 0.0, 0.0).unwrap();
        assert!((z.re - 0.355_028_053_887_817_2).abs() < 1e-14 && z.im == 0.0);
        assert!((p.phase(1.0, 1.0) - 5.0 / 12.0).abs() < 1e-15);
        // |Psi| depends on (x, t) only through u
        let (t1, t2) = (0.4, 1.3);
        let shift = airy_peak_trajectory(&p, t2) - airy_peak_trajectory(&p, t1);
        for &x in &[-3.0, -0.2, 1.7] {
            let a = airy_psi(&p, x, t1).unwrap().norm();
            let b = airy_psi(&p, x + shift, t2).unwrap().norm();
            assert!((a - b).abs() < 1e-14);
        }
        assert!(AiryPacketParams::atomic(0.0).is_err());
        assert!(airy_psi(&p, 40.0, 0.0).is_err());
    }

    #[test]
    fn closed_forms() {
        let p = AiryPacketParams::atomic(1.0).unwrap();
        assert_eq!(airy_bohm_closed_form(&p, 0.0, 0.0), 0.0);
        assert_eq!(airy_bohm_closed_form(&p, 2.0, 0.0), -1.0);
        assert_eq!(airy_quantum_acceleration(&p), 0.5);
        let p2 = AiryPacketParams::atomic(2.0).unwrap();
        assert_eq!(airy_quantum_acceleration(&p2), 8.0 * airy_quantum_acceleration(&p));
        assert_eq!(airy_peak_trajectory(&p, 0.0), 0.0);
        assert_eq!(airy_peak_trajectory(&p, 2.0), 1.0);
        // x(t) = a_Q t^2 / 2
        let h = 1e-3;
        let d2 = (airy_peak_trajectory(&p, 1.0 + h) - 2.0 * airy_peak_trajectory(&p, 1.0)
            + airy_peak_trajectory(&p, 1.0 - h))
            / (h * h);
        assert!((d2 - airy_quantum_acceleration(&p)).abs() < 1e-8);
    }

    #[test]
    fn fd_slope_matches_closed_form() {
        for b in [0.5, 1.0, 2.0] {
            let p = AiryPacketParams::atomic(b).unwrap();
            // fd Bohm potential on a short stretch with no Ai zero
            let g = AxisGrid::new(-1.0 / b, 1.5 / b, 2501).unwrap();
            let amp: Vec<f64> = g
                .points()
                .iter()
                .map(|&x| airy_profile(&p, x, 0.0).unwrap().abs())
                .collect();
            let fd = bohm_potential_fd(g.points(), &amp, Geometry::Line, p.constants()).unwrap();
            let pts: Vec<(f64, f64)> = fd.unmasked().collect();
            let (x0, v0) = pts[10];
            let (x1, v1) = pts[pts.len() - 10];
            let slope = (v1 - v0) / (x1 - x0);
            assert!((slope + b.powi(3) / 2.0).abs() < 1e-5 * b.powi(3), "B={b}: {slope}");
        }
    }

    #[test]
    fn phase_derivatives() {
        let p = AiryPacketParams::atomic(1.3).unwrap();
        let (x, t, h) = (0.7, 0.9, 1e-5);
        let dsdx = (p.phase(x + h, t) - p.phase(x - h, t)) / (2.0 * h);
        assert!((dsdx / p.constants().mass() - p.velocity(t)).abs() < 1e-8);
        let dsdt = (p.phase(x, t + h) - p.phase(x, t - h)) / (2.0 * h);
        assert!((dsdt - p.phase_rate(x, t)).abs() < 1e-8);
    }

    #[test]
    fn numeric_peak_follows_trajectory() {
        let p = AiryPacketParams::atomic(1.0).unwrap();
        let g = p.default_grid();
        let h = g.spacing();
        let x0 = numeric_peak(&p, &g, 0.0).unwrap();
        // principal lobe of Ai sits at u = -1.0188
        assert!((x0 + 1.018_792_971_647_471).abs() <= h);
        let x1 = numeric_peak(&p, &g, 2.0).unwrap();
        assert!((x1 - x0 - airy_peak_trajectory(&p, 2.0)).abs() <= 2.0 * h);
    }
}

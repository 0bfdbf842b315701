//! Closed-form bound states of the Coulomb problem.
//!
//! psi_nlm(r, theta, phi) = R_nl(r) Y^m_l(theta, phi) with
//! R_nl = N e^{-rho/2} rho^l L^{2l+1}_{n-l-1}(rho), rho = 2r/(na) and
//! N^2 = (2/(na))^3 (n-l-1)! / (2n (n+l)!). With the un-scaled Laguerre
//! convention (L^alpha_k(0) = C(k+alpha, k)) this R_nl is unit-normalized;
//! the quadrature tests below check that rather than assume it.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{RadialGrid, SpacingLaw};
use crate::quadrature::GaussLegendre;
use crate::quantum_numbers::QuantumNumbers;
use crate::specfun::{
    laguerre, laguerre_derivative, laguerre_second_derivative, ln_factorial, spherical_harmonic,
};
use crate::units::PhysicalConstants;

/// Relative amplitude below which a grid point counts as a node.
pub const NODE_MASK_THRESHOLD: f64 = 1e-12;

/// Bisection stops once the bracket is this small relative to its midpoint.
const PEAK_RELATIVE_TOLERANCE: f64 = 1e-14;
const BRACKETS_PER_DECADE: f64 = 1000.0;

/// E_n = -hartree / (2 n^2).
pub fn energy_level(n: i64, constants: &PhysicalConstants) -> Result<f64> {
    if n < 1 {
        return Err(Error::QuantumNumbers(format!(
            "n must satisfy n >= 1 (got n = {n})"
        )));
    }
    let nf = n as f64;
    Ok(-constants.hartree() / (2.0 * nf * nf))
}

/// A bound eigenstate together with the constants fixing its length and
/// energy scales.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenstateSpec {
    pub qn: QuantumNumbers,
    pub constants: PhysicalConstants,
}

/// R and its first two radial derivatives at one radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialValue {
    pub value: f64,
    pub first: f64,
    pub second: f64,
}

impl EigenstateSpec {
    pub fn new(qn: QuantumNumbers, constants: PhysicalConstants) -> Self {
        Self { qn, constants }
    }

    pub fn atomic(n: i64, l: i64, m: i64) -> Result<Self> {
        Ok(Self::new(
            QuantumNumbers::new(n, l, m)?,
            PhysicalConstants::atomic(),
        ))
    }

    pub fn energy(&self) -> f64 {
        let n = f64::from(self.qn.n());
        -self.constants.hartree() / (2.0 * n * n)
    }

    /// d rho / d r = 2 / (n a).
    fn rho_scale(&self) -> f64 {
        2.0 / (f64::from(self.qn.n()) * self.constants.bohr_radius())
    }

    fn ln_norm(&self) -> f64 {
        let n = i64::from(self.qn.n());
        let l = i64::from(self.qn.l());
        // n <= 100 is enforced by QuantumNumbers, so these lookups succeed
        let num = ln_factorial(n - l - 1).expect("degree within table");
        let den = ln_factorial(n + l).expect("n + l within table");
        1.5 * self.rho_scale().ln() + 0.5 * (num - (2.0 * n as f64).ln() - den)
    }

    fn laguerre_triple(&self, rho: f64) -> (f64, f64, f64) {
        let k = self.qn.laguerre_degree();
        let a = self.qn.laguerre_alpha();
        (
            laguerre(k, a, rho),
            laguerre_derivative(k, a, rho),
            laguerre_second_derivative(k, a, rho),
        )
    }

    /// R_nl(r) with analytic first and second derivatives in r.
    pub fn radial(&self, r: f64) -> Result<RadialValue> {
        check_radius(r)?;
        let s = self.rho_scale();
        let rho = s * r;
        let l = f64::from(self.qn.l());
        let envelope = (self.ln_norm() - 0.5 * rho + l * rho.ln()).exp();
        let (lg, dlg, d2lg) = self.laguerre_triple(rho);
        let g = l / rho - 0.5;
        Ok(RadialValue {
            value: envelope * lg,
            first: s * envelope * (g * lg + dlg),
            second: s * s * envelope * ((g * g - l / (rho * rho)) * lg + 2.0 * g * dlg + d2lg),
        })
    }

    /// (nabla^2 psi) / psi at radius r. The angular factor contributes the
    /// exact eigenvalue -l(l+1)/r^2, so the ratio depends on r only. The
    /// e^{-rho/2} rho^l factor is differentiated in closed form, where the
    /// centrifugal term cancels against it, leaving
    /// s^2 [1/4 - (l+1)/rho + ((2l+2)/rho - 1) L'/L + L''/L].
    pub fn laplacian_ratio(&self, r: f64) -> Result<f64> {
        check_radius(r)?;
        let s = self.rho_scale();
        let rho = s * r;
        let l = f64::from(self.qn.l());
        let (lg, dlg, d2lg) = self.laguerre_triple(rho);
        let shape = 0.25 - (l + 1.0) / rho + ((2.0 * l + 2.0) / rho - 1.0) * dlg / lg + d2lg / lg;
        Ok(s * s * shape)
    }

    /// psi_nlm(r, theta, phi).
    pub fn psi(&self, r: f64, theta: f64, phi: f64) -> Result<Complex64> {
        let radial = self.radial(r)?.value;
        let y = spherical_harmonic(self.qn.l(), self.qn.m(), theta, phi)?;
        Ok(y * radial)
    }

    /// psi_nlm e^{-i E_n t / hbar}.
    pub fn psi_at(&self, r: f64, theta: f64, phi: f64, t: f64) -> Result<Complex64> {
        let phase = -self.energy() * t / self.constants.hbar();
        Ok(self.psi(r, theta, phi)? * Complex64::from_polar(1.0, phase))
    }

    /// Sign of dP/dr, from L (L (1 + l - rho/2) + rho L'), which shares
    /// its sign with R (R + r R') but carries no exponential factors.
    fn peak_indicator(&self, r: f64) -> f64 {
        let rho = self.rho_scale() * r;
        let l = f64::from(self.qn.l());
        let (lg, dlg, _) = self.laguerre_triple(rho);
        lg * (lg * (1.0 + l - 0.5 * rho) + rho * dlg)
    }
}

fn check_radius(r: f64) -> Result<()> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::Domain(format!("radius must be finite and > 0 (got {r})")));
    }
    Ok(())
}

/// Free-function form of [`EigenstateSpec::radial`].
#[allow(non_snake_case)]
pub fn radial_R(spec: &EigenstateSpec, r: f64) -> Result<RadialValue> {
    spec.radial(r)
}

/// Free-function form of [`EigenstateSpec::psi`].
pub fn psi(spec: &EigenstateSpec, r: f64, theta: f64, phi: f64) -> Result<Complex64> {
    spec.psi(r, theta, phi)
}

/// `true` where |R_nl| < 1e-12 max|R_nl| over the grid (excluded points).
pub fn node_mask(spec: &EigenstateSpec, grid: &RadialGrid) -> Result<Vec<bool>> {
    let values = grid
        .points()
        .iter()
        .map(|&r| spec.radial(r).map(|v| v.value))
        .collect::<Result<Vec<_>>>()?;
    Ok(mask_below(&values, NODE_MASK_THRESHOLD))
}

pub(crate) fn mask_below(values: &[f64], relative: f64) -> Vec<bool> {
    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    values.iter().map(|v| v.abs() < relative * peak).collect()
}

/// Max over unmasked points of the stationary-equation residual
/// [-(hbar^2/2m)(R'' + 2R'/r - l(l+1)R/r^2) - coulomb R/r - E R] / (|E| max|R|).
pub fn schrodinger_residual(spec: &EigenstateSpec, grid: &RadialGrid) -> Result<f64> {
    schrodinger_residual_with_energy(spec, grid, spec.energy())
}

/// As [`schrodinger_residual`], with a caller-chosen trial energy.
pub fn schrodinger_residual_with_energy(
    spec: &EigenstateSpec,
    grid: &RadialGrid,
    energy: f64,
) -> Result<f64> {
    let pointwise = schrodinger_residual_profile(spec, grid, energy)?;
    pointwise
        .iter()
        .flatten()
        .map(|v| v.abs())
        .reduce(f64::max)
        .ok_or(Error::EmptyMask)
}

/// Pointwise relative residual; `None` at masked points.
pub fn schrodinger_residual_profile(
    spec: &EigenstateSpec,
    grid: &RadialGrid,
    energy: f64,
) -> Result<Vec<Option<f64>>> {
    let c = &spec.constants;
    let l = f64::from(spec.qn.l());
    let values = grid
        .points()
        .iter()
        .map(|&r| spec.radial(r))
        .collect::<Result<Vec<_>>>()?;
    let amps: Vec<f64> = values.iter().map(|v| v.value).collect();
    let mask = mask_below(&amps, NODE_MASK_THRESHOLD);
    let peak = amps.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = energy.abs() * peak;
    Ok(grid
        .points()
        .iter()
        .zip(&values)
        .zip(&mask)
        .map(|((&r, v), &masked)| {
            if masked {
                return None;
            }
            let lap = v.second + 2.0 * v.first / r - l * (l + 1.0) * v.value / (r * r);
            let res = -c.kinetic_prefactor() * lap - c.coulomb() * v.value / r - energy * v.value;
            Some(res / scale)
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RadialQuantity {
    /// R_nl(r)
    Radial,
    /// P_nl(r) = r^2 R_nl^2
    Distribution,
    /// dP_nl/dr
    DistributionSlope,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub grid: RadialGrid,
    pub values: Vec<f64>,
    pub meaning: RadialQuantity,
}

pub fn radial_profile(
    spec: &EigenstateSpec,
    grid: &RadialGrid,
    meaning: RadialQuantity,
) -> Result<RadialProfile> {
    let values = grid
        .points()
        .iter()
        .map(|&r| {
            let v = spec.radial(r)?;
            Ok(match meaning {
                RadialQuantity::Radial => v.value,
                RadialQuantity::Distribution => r * r * v.value * v.value,
                RadialQuantity::DistributionSlope => {
                    2.0 * r * v.value * (v.value + r * v.first)
                }
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RadialProfile {
        grid: grid.clone(),
        values,
        meaning,
    })
}

/// P_nl(r) = r^2 R_nl(r)^2 on the grid.
pub fn radial_distribution(spec: &EigenstateSpec, grid: &RadialGrid) -> Result<RadialProfile> {
    radial_profile(spec, grid, RadialQuantity::Distribution)
}

/// All strict local maxima of P_nl on (0, inf), innermost first.
///
/// The sign of the analytic dP/dr is scanned on a logarithmic bracketing
/// grid and every + to - change is refined by bisection. The scan covers
/// [1e-3 a, 3 n^2 a + 10 a], which contains the classical turning point
/// 2 n^2 a beyond which P is monotone decreasing.
pub fn radial_peaks(spec: &EigenstateSpec) -> Vec<f64> {
    let a = spec.constants.bohr_radius();
    let n = f64::from(spec.qn.n());
    let lo = 1e-3 * a;
    let hi = (3.0 * n * n + 10.0) * a;
    let count = ((hi / lo).log10() * BRACKETS_PER_DECADE).ceil() as usize + 1;
    let grid = RadialGrid::new(lo, hi, count, SpacingLaw::Logarithmic)
        .expect("bracketing grid parameters are valid");
    let pts = grid.points();
    let signs: Vec<f64> = pts.iter().map(|&r| spec.peak_indicator(r)).collect();
    let mut peaks = Vec::new();
    for i in 0..pts.len() - 1 {
        if signs[i] > 0.0 && signs[i + 1] <= 0.0 {
            peaks.push(bisect_sign_change(spec, pts[i], pts[i + 1]));
        }
    }
    peaks
}

fn bisect_sign_change(spec: &EigenstateSpec, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= PEAK_RELATIVE_TOLERANCE * mid {
            break;
        }
        if spec.peak_indicator(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Number of sign changes of R_nl on the grid, skipping exact zeros.
pub fn count_radial_nodes(spec: &EigenstateSpec, grid: &RadialGrid) -> Result<usize> {
    let mut last = 0.0f64;
    let mut changes = 0;
    for &r in grid.points() {
        let v = spec.radial(r)?.value;
        if v == 0.0 {
            continue;
        }
        if last != 0.0 && v.signum() != last.signum() {
            changes += 1;
        }
        last = v;
    }
    Ok(changes)
}

/// Quadrature settings for [`overlap`].
#[derive(Debug, Clone)]
pub struct OverlapQuadrature {
    radial: GaussLegendre,
    angular: GaussLegendre,
    n_phi: usize,
    /// Radial cutoff in units of n_max * a.
    cutoff: f64,
}

impl Default for OverlapQuadrature {
    fn default() -> Self {
        Self {
            radial: GaussLegendre::new(20),
            angular: GaussLegendre::new(32),
            n_phi: 32,
            cutoff: 80.0,
        }
    }
}

impl OverlapQuadrature {
    fn radial_integral(&self, a: &EigenstateSpec, b: &EigenstateSpec) -> Result<f64> {
        let n_max = f64::from(a.qn.n().max(b.qn.n()));
        let r_cut = self.cutoff * n_max * a.constants.bohr_radius();
        let panels = (self.cutoff * n_max).ceil() as usize;
        let rule = self.radial.composite_rule(0.0, r_cut, panels);
        rule.into_iter()
            .map(|(r, w)| Ok(w * r * r * a.radial(r)?.value * b.radial(r)?.value))
            .sum()
    }

    fn angular_integral(&self, a: &QuantumNumbers, b: &QuantumNumbers) -> Result<Complex64> {
        let dphi = 2.0 * std::f64::consts::PI / self.n_phi as f64;
        let mut total = Complex64::new(0.0, 0.0);
        for (&x, &w) in self.angular.nodes().iter().zip(self.angular.weights()) {
            let theta = x.acos();
            for k in 0..self.n_phi {
                let phi = k as f64 * dphi;
                let ya = spherical_harmonic(a.l(), a.m(), theta, phi)?;
                let yb = spherical_harmonic(b.l(), b.m(), theta, phi)?;
                total += ya.conj() * yb * (w * dphi);
            }
        }
        Ok(total)
    }
}

/// <a|b> by tensor-product quadrature: composite Gauss-Legendre in r on
/// [0, 80 n_max a], Gauss-Legendre in cos(theta), uniform in phi. The
/// integrand separates, so the triple sum is evaluated as a product of the
/// radial and angular sums.
pub fn overlap(a: &EigenstateSpec, b: &EigenstateSpec) -> Result<Complex64> {
    overlap_with(a, b, &OverlapQuadrature::default())
}

pub fn overlap_with(
    a: &EigenstateSpec,
    b: &EigenstateSpec,
    quad: &OverlapQuadrature,
) -> Result<Complex64> {
    if a.constants != b.constants {
        return Err(Error::Parameter(
            "overlap needs both states in the same constants".into(),
        ));
    }
    let radial = quad.radial_integral(a, b)?;
    let angular = quad.angular_integral(&a.qn, &b.qn)?;
    Ok(angular * radial)
}

/// Gram matrix of all states with n <= n_max, in `QuantumNumbers::all_up_to` order.
pub fn gram_matrix(n_max: u32, constants: &PhysicalConstants) -> Result<Vec<Vec<Complex64>>> {
    let states: Vec<EigenstateSpec> = QuantumNumbers::all_up_to(n_max)
        .into_iter()
        .map(|q| EigenstateSpec::new(q, *constants))
        .collect();
    let quad = OverlapQuadrature::default();
    states
        .par_iter()
        .map(|a| states.iter().map(|b| overlap_with(a, b, &quad)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn spec(n: i64, l: i64, m: i64) -> EigenstateSpec {
        EigenstateSpec::atomic(n, l, m).unwrap()
    }

    #[test]
    fn energy_levels() {
        let au = PhysicalConstants::atomic();
        assert_eq!(energy_level(1, &au).unwrap(), -0.5);
        assert_eq!(energy_level(2, &au).unwrap(), -0.125);
        assert!(energy_level(0, &au).is_err());
        let e1 = energy_level(1, &au).unwrap();
        for n in 1..=10 {
            let ratio = energy_level(n, &au).unwrap() / e1;
            assert!((ratio - 1.0 / (n * n) as f64).abs() < 1e-15);
        }
        let si = PhysicalConstants::si();
        let ev = energy_level(1, &si).unwrap() / crate::units::JOULE_PER_EV;
        assert!((ev + 13.605_693).abs() < 1e-5, "{ev}");
    }

    #[test]
    fn explicit_small_states() {
        let r10 = spec(1, 0, 0).radial(1.0).unwrap().value;
        assert!((r10 - 2.0 / std::f64::consts::E).abs() < 1e-15);
        assert!((r10 - 0.735_758_9).abs() < 1e-7);
        let r21 = spec(2, 1, 0).radial(2.0).unwrap().value;
        let want = (-1.0f64).exp() / 6f64.sqrt();
        assert!((r21 - want).abs() < 1e-15);
        assert!((r21 - 0.150_186_153).abs() < 1e-9);
        // R_20 = (1/(2 sqrt 2)) (2 - r) e^{-r/2}
        for &r in &[0.3, 1.0, 2.5, 7.0] {
            let v = spec(2, 0, 0).radial(r).unwrap().value;
            let want = (2.0 - r) * (-r / 2.0f64).exp() / (2.0 * 2f64.sqrt());
            assert!((v - want).abs() < 1e-15, "r={r}");
        }
    }

    #[test]
    fn analytic_derivatives_match_finite_differences() {
        let s = spec(3, 1, 0);
        let r = 3.0;
        let v = s.radial(r).unwrap();
        let h = 1e-5;
        let fd1 = (s.radial(r + h).unwrap().value - s.radial(r - h).unwrap().value) / (2.0 * h);
        assert!((fd1 - v.first).abs() <= 1e-8 * v.first.abs(), "{fd1} vs {}", v.first);
        let h = 1e-4;
        let fd2 = (s.radial(r + h).unwrap().first - s.radial(r - h).unwrap().first) / (2.0 * h);
        assert!((fd2 - v.second).abs() <= 1e-7 * v.second.abs());
    }

    #[test]
    fn psi_properties() {
        let s = spec(1, 0, 0);
        let v = s.psi(1.3, 0.4, 2.0).unwrap();
        let want = s.radial(1.3).unwrap().value / (4.0 * PI).sqrt();
        assert!((v.re - want).abs() < 1e-15 && v.im == 0.0);
        let a = spec(3, 2, -2);
        let b = spec(3, 2, 2);
        for &(r, t, p) in &[(1.0, 0.3, 0.1), (5.0, 1.9, 4.0), (9.0, 2.7, 1.0)] {
            let da = a.psi(r, t, p).unwrap().norm();
            let db = b.psi(r, t, p).unwrap().norm();
            assert!((da - db).abs() <= 1e-15 * da.max(1e-300));
        }
        assert!(s.psi(0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn schrodinger_residuals() {
        let grid = RadialGrid::new(0.1, 20.0, 2000, SpacingLaw::Logarithmic).unwrap();
        assert!(schrodinger_residual(&spec(1, 0, 0), &grid).unwrap() <= 1e-10);
        assert!(schrodinger_residual(&spec(5, 3, 1), &grid).unwrap() <= 1e-9);
        let s = spec(1, 0, 0);
        let wrong = schrodinger_residual_with_energy(&s, &grid, s.energy() * (1.0 + 1e-3)).unwrap();
        assert!(wrong >= 1e-4, "{wrong}");
    }

    #[test]
    fn radial_distribution_values() {
        let grid = RadialGrid::new(0.5, 2.0, 4, SpacingLaw::Uniform).unwrap();
        let p = radial_distribution(&spec(1, 0, 0), &grid).unwrap();
        assert!((p.values[1] - 4.0 * (-2.0f64).exp()).abs() < 1e-15);
        assert!((p.values[1] - 0.541_341_1).abs() < 1e-7);
        assert!(p.values.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn normalization_by_quadrature() {
        let gl = GaussLegendre::new(20);
        for (n, l) in [(1, 0), (2, 1), (3, 0), (4, 2), (7, 3), (10, 9)] {
            let s = spec(n, l, 0);
            let rule = gl.composite_rule(0.0, 60.0 * n as f64, 60 * n as usize);
            let total: f64 = rule
                .iter()
                .map(|&(r, w)| {
                    let v = s.radial(r).unwrap().value;
                    w * r * r * v * v
                })
                .sum();
            assert!((total - 1.0).abs() < 1e-6, "({n},{l}): {total}");
        }
    }

    #[test]
    fn peaks_of_low_states() {
        assert_eq!(radial_peaks(&spec(1, 0, 0)).len(), 1);
        assert!((radial_peaks(&spec(1, 0, 0))[0] - 1.0).abs() < 1e-12);
        assert!((radial_peaks(&spec(2, 1, 0))[0] - 4.0).abs() < 1e-12);
        let p30 = radial_peaks(&spec(3, 0, 0));
        assert_eq!(p30.len(), 3, "{p30:?}");
        assert!((p30[2] - 13.07).abs() < 0.01, "{p30:?}");
    }

    #[test]
    fn peaks_agree_with_dense_argmax() {
        // brute force: local maxima of sampled P on a fine grid
        for (n, l) in [(3, 0), (4, 1), (5, 2), (6, 0)] {
            let s = spec(n, l, 0);
            let hi = (3 * n * n + 10) as f64;
            let h = 1e-3;
            let grid = RadialGrid::with_spacing(h, hi, h).unwrap();
            let p = radial_distribution(&s, &grid).unwrap().values;
            let dense: Vec<f64> = (1..p.len() - 1)
                .filter(|&i| p[i] > p[i - 1] && p[i] > p[i + 1])
                .map(|i| grid.points()[i])
                .collect();
            let found = radial_peaks(&s);
            assert_eq!(dense.len(), found.len(), "({n},{l})");
            for (d, f) in dense.iter().zip(&found) {
                assert!((d - f).abs() <= h, "({n},{l}): {d} vs {f}");
            }
        }
    }

    #[test]
    fn node_counts() {
        let grid = RadialGrid::new(1e-3, 400.0, 200_000, SpacingLaw::Logarithmic).unwrap();
        for n in 1..=8 {
            for l in 0..n {
                let c = count_radial_nodes(&spec(n, l, 0), &grid).unwrap();
                assert_eq!(c as i64, n - l - 1, "({n},{l})");
            }
        }
    }

    #[test]
    fn peak_scales_with_bohr_radius() {
        let base = PhysicalConstants::atomic();
        let doubled = base.with_coulomb(2.0).unwrap();
        for n in 1..=5 {
            let q = QuantumNumbers::new(n, n - 1, 0).unwrap();
            let p1 = radial_peaks(&EigenstateSpec::new(q, base))[0];
            let p2 = radial_peaks(&EigenstateSpec::new(q, doubled))[0];
            assert!((p2 - 0.5 * p1).abs() <= 1e-12 * p1);
        }
    }

    #[test]
    fn overlaps() {
        let one = overlap(&spec(1, 0, 0), &spec(1, 0, 0)).unwrap();
        assert!((one - 1.0).norm() < 1e-6);
        let zero = overlap(&spec(1, 0, 0), &spec(2, 1, 0)).unwrap();
        assert!(zero.norm() < 1e-6);
        let zero = overlap(&spec(2, 1, -1), &spec(2, 1, 1)).unwrap();
        assert!(zero.norm() < 1e-6);
        let other = EigenstateSpec::new(
            QuantumNumbers::new(1, 0, 0).unwrap(),
            PhysicalConstants::new(1.0, 1.0, 2.0).unwrap(),
        );
        assert!(overlap(&spec(1, 0, 0), &other).is_err());
    }

    #[test]
    fn psi_211_normalized_by_direct_3d_sum() {
        // midpoint rule over (r, theta, phi), no separation of variables
        let s = spec(2, 1, 1);
        let (nr, nt, np) = (1200, 60, 8);
        let r_max = 60.0;
        let (dr, dt, dp) = (r_max / nr as f64, PI / nt as f64, 2.0 * PI / np as f64);
        let mut total = 0.0;
        for i in 0..nr {
            let r = (i as f64 + 0.5) * dr;
            for j in 0..nt {
                let t = (j as f64 + 0.5) * dt;
                for k in 0..np {
                    let p = (k as f64 + 0.5) * dp;
                    let v = s.psi(r, t, p).unwrap();
                    total += v.norm_sqr() * r * r * t.sin() * dr * dt * dp;
                }
            }
        }
        assert!((total - 1.0).abs() < 1e-4, "{total}");
    }
}

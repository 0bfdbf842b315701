//! Orthonormal spherical harmonics with the Condon-Shortley phase.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAX_DEGREE: u32 = 64;

/// Fully normalized associated Legendre function, including the
/// Condon-Shortley factor (-1)^m, for 0 <= m <= l.
///
/// Satisfies Y^m_l(theta, phi) = legendre_normalized(l, m, cos theta) e^{i m phi}.
pub fn legendre_normalized(l: u32, m: u32, x: f64) -> f64 {
    debug_assert!(m <= l);
    let sin_t = (1.0 - x * x).max(0.0).sqrt();
    let mut pmm = 0.5 / PI.sqrt();
    for k in 1..=m {
        let k = f64::from(k);
        pmm *= -((2.0 * k + 1.0) / (2.0 * k)).sqrt() * sin_t;
    }
    if l == m {
        return pmm;
    }
    let mf = f64::from(m);
    let mut prev = pmm;
    let mut curr = (2.0 * mf + 3.0).sqrt() * x * pmm;
    for ll in (m + 2)..=l {
        let lf = f64::from(ll);
        let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
        let b = (((lf - 1.0).powi(2) - mf * mf) / (4.0 * (lf - 1.0).powi(2) - 1.0)).sqrt();
        let next = a * (x * curr - b * prev);
        prev = curr;
        curr = next;
    }
    curr
}

/// Y^m_l(theta, phi).
pub fn spherical_harmonic(l: u32, m: i32, theta: f64, phi: f64) -> Result<Complex64> {
    if m.unsigned_abs() > l {
        return Err(Error::QuantumNumbers(format!(
            "|m| must satisfy |m| <= l (got l = {l}, m = {m})"
        )));
    }
    if l > MAX_DEGREE {
        return Err(Error::Domain(format!("l = {l} exceeds {MAX_DEGREE}")));
    }
    if !(0.0..=PI).contains(&theta) || !phi.is_finite() {
        return Err(Error::Domain(format!(
            "need theta in [0, pi] and finite phi (got {theta}, {phi})"
        )));
    }
    let ma = m.unsigned_abs();
    let p = legendre_normalized(l, ma, theta.cos());
    let y = Complex64::from_polar(p, f64::from(ma) * phi);
    if m >= 0 {
        Ok(y)
    } else if ma.is_multiple_of(2) {
        Ok(y.conj())
    } else {
        Ok(-y.conj())
    }
}

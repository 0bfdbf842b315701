//! Airy function Ai(x) for real arguments.
//!
//! For x > [`ASYMPTOTIC_FROM`] the large-argument asymptotic expansion is
//! summed directly. Below that, Ai is continued by exact Taylor stepping of
//! y'' = x y from the asymptotic values at `ASYMPTOTIC_FROM` down to
//! [`MIN_ARG`]. Stepping towards negative x is the stable direction for the
//! recessive solution, and a single chain of anchors makes neighbouring
//! patches agree to rounding, so finite differences of the result stay
//! smooth across patch boundaries.

use std::sync::OnceLock;

use crate::error::{Error, Result};

pub const MIN_ARG: f64 = -20.0;
pub const MAX_ARG: f64 = 20.0;
const ASYMPTOTIC_FROM: f64 = 10.5;
const ANCHOR_STEP: f64 = 0.5;
const TAYLOR_TERMS: usize = 40;

#[derive(Clone, Copy)]
struct Anchor {
    x: f64,
    y: f64,
    dy: f64,
}

/// Taylor coefficients of the solution of y'' = x y about x0.
fn taylor_coefficients(x0: f64, y: f64, dy: f64) -> [f64; TAYLOR_TERMS] {
    let mut c = [0.0; TAYLOR_TERMS];
    c[0] = y;
    c[1] = dy;
    c[2] = 0.5 * x0 * y;
    for k in 1..TAYLOR_TERMS - 2 {
        c[k + 2] = (x0 * c[k] + c[k - 1]) / ((k + 2) * (k + 1)) as f64;
    }
    c
}

fn eval_taylor(c: &[f64; TAYLOR_TERMS], d: f64) -> (f64, f64) {
    let mut v = 0.0;
    let mut dv = 0.0;
    for k in (0..TAYLOR_TERMS).rev() {
        v = v * d + c[k];
        if k > 0 {
            dv = dv * d + k as f64 * c[k];
        }
    }
    (v, dv)
}

/// Ai and Ai' from the asymptotic expansion; accurate to ~e^{-2 zeta}.
fn asymptotic(x: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * x * x.sqrt();
    let mut u = 1.0;
    let mut sum_u = 1.0;
    let mut sum_v = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
            / (216.0 * kf * (2.0 * kf - 1.0));
        let v = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u;
        let zk = zeta.powi(k);
        let term = u / zk;
        if term.abs() >= last || term.abs() < 1e-18 {
            break;
        }
        last = term.abs();
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum_u += sign * term;
        sum_v += sign * v / zk;
    }
    let pref = (-zeta).exp() / (2.0 * std::f64::consts::PI.sqrt());
    let q = x.powf(0.25);
    (pref / q * sum_u, -pref * q * sum_v)
}

fn anchors() -> &'static [Anchor] {
    static ANCHORS: OnceLock<Vec<Anchor>> = OnceLock::new();
    ANCHORS.get_or_init(|| {
        let (y, dy) = asymptotic(ASYMPTOTIC_FROM);
        let mut out = vec![Anchor {
            x: ASYMPTOTIC_FROM,
            y,
            dy,
        }];
        let count = ((ASYMPTOTIC_FROM - MIN_ARG) / ANCHOR_STEP).round() as usize + 1;
        for j in 1..=count {
            let prev = out[j - 1];
            let c = taylor_coefficients(prev.x, prev.y, prev.dy);
            let (y, dy) = eval_taylor(&c, -ANCHOR_STEP);
            out.push(Anchor {
                x: ASYMPTOTIC_FROM - j as f64 * ANCHOR_STEP,
                y,
                dy,
            });
        }
        out
    })
}

fn check_range(x: f64) -> Result<()> {
    if !(MIN_ARG..=MAX_ARG).contains(&x) {
        return Err(Error::Domain(format!(
            "Airy argument {x} outside supported range [{MIN_ARG}, {MAX_ARG}]"
        )));
    }
    Ok(())
}

/// (Ai(x), Ai'(x)).
pub fn airy_ai_pair(x: f64) -> Result<(f64, f64)> {
    check_range(x)?;
    if x > ASYMPTOTIC_FROM {
        return Ok(asymptotic(x));
    }
    let table = anchors();
    let j = ((ASYMPTOTIC_FROM - x) / ANCHOR_STEP).round() as usize;
    let a = table[j.min(table.len() - 1)];
    let c = taylor_coefficients(a.x, a.y, a.dy);
    Ok(eval_taylor(&c, x - a.x))
}

/// Ai(x) for x in [-20, 20].
pub fn airy_ai(x: f64) -> Result<f64> {
    airy_ai_pair(x).map(|p| p.0)
}

/// Ai'(x) for x in [-20, 20].
pub fn airy_ai_prime(x: f64) -> Result<f64> {
    airy_ai_pair(x).map(|p| p.1)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Maclaurin pair Ai = c1 f - c2 g, with c1 = 3^{-2/3}/Gamma(2/3) and
    /// c2 = 3^{-1/3}/Gamma(1/3). Only trusted for small |x|.
    fn maclaurin(x: f64) -> f64 {
        const C1: f64 = 0.355_028_053_887_817_24;
        const C2: f64 = 0.258_819_403_792_806_8;
        let x3 = x * x * x;
        let mut f_term = 1.0;
        let mut g_term = x;
        let mut f = f_term;
        let mut g = g_term;
        for k in 1..80 {
            let k3 = 3.0 * k as f64;
            f_term *= x3 / ((k3 - 1.0) * k3);
            g_term *= x3 / (k3 * (k3 + 1.0));
            f += f_term;
            g += g_term;
        }
        C1 * f - C2 * g
    }

    // 20-digit references for Ai(x), Ai'(x).
    const REFERENCE: &[(f64, f64, f64)] = &[
        (0.0, 0.355_028_053_887_817_24, -0.258_819_403_792_806_8),
        (1.0, 0.135_292_416_312_881_42, -0.159_147_441_296_793_2),
        (-1.0, 0.535_560_883_292_352_1, -0.010_160_567_116_645_21),
        (1.3, 0.093_474_665_771_502_7, -0.120_333_865_590_183_58),
        (2.0, 0.034_924_130_423_274_38, -0.053_090_384_433_653_63),
        (-2.0, 0.227_407_428_201_685_6, 0.618_259_020_741_691),
        (3.5, 0.002_584_098_786_989_635, -0.005_004_413_967_952_583),
        (5.0, 1.083_444_281_360_744_2e-4, -2.474_138_908_684_625e-4),
        (-5.0, 0.350_761_009_024_114_3, 0.327_192_818_554_443_1),
        (6.0, 9.947_694_360_252_89e-6, -2.476_520_039_703_495_5e-5),
        (-6.0, -0.329_145_173_629_823_1, 0.345_935_487_282_342_9),
        (-7.3, 0.335_770_370_515_147_3, -0.180_095_804_483_293_66),
        (8.0, 4.692_207_616_099_231_6e-8, -1.341_439_297_906_786_6e-7),
        (-8.0, -0.052_705_050_356_386_2, 0.935_560_938_198_306_6),
        (9.5, 5.330_263_704_617_492e-10, -1.656_639_459_374_066_3e-9),
        (10.0, 1.104_753_255_289_868_6e-10, -3.520_633_676_738_923_6e-10),
        (-10.0, 0.040_241_238_486_443_19, 0.996_265_044_132_790_1),
        (12.0, 1.393_184_688_875_360_8e-13, -4.854_736_554_985_308e-13),
        (15.0, 2.164_962_520_737_992_3e-18, -8.420_567_954_017_773e-18),
        (-15.0, 0.278_217_490_870_828_9, 0.272_374_204_308_642),
        (17.0, 7.050_197_298_388_614e-22, -2.917_148_219_293_314e-21),
        (20.0, 1.691_672_868_670_540_3e-27, -7.586_391_625_748_355e-27),
        (-20.0, -0.176_406_127_077_984_7, 0.892_862_856_736_471_2),
    ];

    #[test]
    fn ai_at_zero_matches_series() {
        let v = airy_ai(0.0).unwrap();
        assert!((v - maclaurin(0.0)).abs() < 1e-15);
        assert!((v - 0.355_028_053_9).abs() < 1e-10);
    }

    #[test]
    fn matches_reference_table() {
        for &(x, ai, aip) in REFERENCE {
            let (v, dv) = airy_ai_pair(x).unwrap();
            // near a zero of Ai compare against the local slope scale
            let scale = ai.abs().max(1e-3 * aip.abs().min(1.0));
            assert!((v - ai).abs() <= 1e-10 * scale, "Ai({x}) = {v}, want {ai}");
            assert!((dv - aip).abs() <= 1e-10 * aip.abs(), "Ai'({x}) = {dv}, want {aip}");
        }
    }

    #[test]
    fn agrees_with_maclaurin_on_small_arguments() {
        for i in -30..=30 {
            let x = i as f64 * 0.1;
            let v = airy_ai(x).unwrap();
            let o = maclaurin(x);
            // the series itself cancels to ~1e-13 relative near x = 3
            assert!((v - o).abs() <= 1e-12 * o.abs(), "x={x}: {v} vs {o}");
        }
    }

    #[test]
    fn decays_for_large_argument() {
        let v = airy_ai(15.0).unwrap();
        assert!(v > 0.0 && v < 1e-15);
    }

    #[test]
    fn airy_ode_by_second_difference() {
        let x = 1.3;
        let h = 1e-3;
        let y = |t: f64| airy_ai(t).unwrap();
        let d2 = (y(x + h) - 2.0 * y(x) + y(x - h)) / (h * h);
        assert!((d2 - x * y(x)).abs() < 1e-7);
        let h = 1e-4;
        let mut i = -100;
        while i <= 80 {
            let x = i as f64 * 0.1 + 0.0123;
            let d2 = (y(x + h) - 2.0 * y(x) + y(x - h)) / (h * h);
            let res = (d2 - x * y(x)).abs();
            assert!(res <= 1e-6, "x={x}: residual {res}");
            i += 1;
        }
    }

    #[test]
    fn smooth_across_anchor_boundaries() {
        // second differences straddling a patch boundary at 10.5 - 0.25 - 0.5k
        let h = 1e-4;
        for k in 0..60 {
            let b = ASYMPTOTIC_FROM - 0.25 - ANCHOR_STEP * k as f64;
            if b < MIN_ARG + 0.01 {
                break;
            }
            let y = |t: f64| airy_ai(t).unwrap();
            let d2 = (y(b + h) - 2.0 * y(b) + y(b - h)) / (h * h);
            let want = b * y(b);
            let scale = y(b).abs().max(airy_ai_prime(b).unwrap().abs() * 1e-2);
            assert!((d2 - want).abs() <= 1e-5 * scale.max(1e-12), "boundary {b}");
        }
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(airy_ai(20.5).is_err());
        assert!(airy_ai(-21.0).is_err());
        assert!(airy_ai(f64::NAN).is_err());
    }
}

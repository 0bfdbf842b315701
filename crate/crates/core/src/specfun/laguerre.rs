//! Generalized Laguerre polynomials L^alpha_k(x).
//!
//! Upward three-term recurrence in the degree. Stable for the low degrees
//! used by bound hydrogen states (k <= n - 1); degrees above
//! [`MAX_STABLE_DEGREE`] are still evaluated but lose relative accuracy
//! near the polynomial's zeros.

/// Largest degree for which the recurrence is used without reservation.
pub const MAX_STABLE_DEGREE: u32 = 30;

/// Value of L^alpha_k(x).
pub fn laguerre(k: u32, alpha: u32, x: f64) -> f64 {
    let a = f64::from(alpha);
    let mut prev = 1.0;
    if k == 0 {
        return prev;
    }
    let mut curr = 1.0 + a - x;
    for j in 1..k {
        let j = f64::from(j);
        let next = ((2.0 * j + 1.0 + a - x) * curr - (j + a) * prev) / (j + 1.0);
        prev = curr;
        curr = next;
    }
    curr
}

/// d/dx L^alpha_k(x) = -L^{alpha+1}_{k-1}(x).
pub fn laguerre_derivative(k: u32, alpha: u32, x: f64) -> f64 {
    if k == 0 {
        0.0
    } else {
        -laguerre(k - 1, alpha + 1, x)
    }
}

/// d^2/dx^2 L^alpha_k(x) = L^{alpha+2}_{k-2}(x).
pub fn laguerre_second_derivative(k: u32, alpha: u32, x: f64) -> f64 {
    if k < 2 {
        0.0
    } else {
        laguerre(k - 2, alpha + 2, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Explicit sum L^a_k(x) = sum_i (-1)^i C(k+a, k-i) x^i / i!.
    fn series_oracle(k: u32, alpha: u32, x: f64) -> f64 {
        let binom = |n: u32, r: u32| -> f64 {
            (0..r).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
        };
        let mut sum = 0.0;
        let mut fact = 1.0;
        for i in 0..=k {
            if i > 0 {
                fact *= f64::from(i);
            }
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * binom(k + alpha, k - i) * x.powi(i as i32) / fact;
        }
        sum
    }

    #[test]
    fn low_degree_values() {
        assert_eq!(laguerre(0, 1, 3.7), 1.0);
        assert_eq!(laguerre(1, 1, 0.0), 2.0);
        assert_eq!(series_oracle(2, 3, 1.0), 5.5);
        assert!((laguerre(2, 3, 1.0) - 5.5).abs() < 1e-14);
    }

    #[test]
    fn matches_series_oracle() {
        for k in 0..=8 {
            for alpha in [0, 1, 3, 7, 13] {
                for &x in &[0.0, 0.3, 1.0, 2.5, 7.0, 15.0] {
                    let v = laguerre(k, alpha, x);
                    let o = series_oracle(k, alpha, x);
                    assert!(
                        (v - o).abs() <= 1e-11 * o.abs().max(1.0),
                        "k={k} a={alpha} x={x}: {v} vs {o}"
                    );
                }
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        assert_eq!(laguerre_derivative(0, 1, 2.2), 0.0);
        assert_eq!(laguerre_derivative(1, 1, 5.0), -1.0);
        assert!((laguerre_derivative(2, 1, 1.0) + 2.0).abs() < 1e-14);
        // step sweep: the central difference converges to the analytic value
        for &(k, a, x) in &[(1u32, 1u32, 5.0f64), (2, 1, 1.0), (5, 3, 2.7), (9, 19, 30.0)] {
            let exact = laguerre_derivative(k, a, x);
            let mut errs = Vec::new();
            for h in [1e-2, 1e-3] {
                let fd = (laguerre(k, a, x + h) - laguerre(k, a, x - h)) / (2.0 * h);
                errs.push((fd - exact).abs() / exact.abs().max(1.0));
            }
            assert!(errs[1] < 1e-6, "k={k} a={a} x={x}: {errs:?}");
            assert!(errs[1] <= errs[0] + 1e-12);
            let h = 1e-3;
            let fd2 = (laguerre(k, a, x + h) - 2.0 * laguerre(k, a, x) + laguerre(k, a, x - h))
                / (h * h);
            let exact2 = laguerre_second_derivative(k, a, x);
            assert!(
                (fd2 - exact2).abs() <= 1e-4 * exact2.abs().max(1.0),
                "second derivative k={k} a={a} x={x}: {fd2} vs {exact2}"
            );
        }
    }

    #[test]
    fn recurrence_consistency() {
        for k in 1..12u32 {
            for alpha in 0..=21u32 {
                for i in 0..=60 {
                    let x = f64::from(i);
                    let a = f64::from(alpha);
                    let kf = f64::from(k);
                    let lhs = (kf + 1.0) * laguerre(k + 1, alpha, x);
                    let t1 = (2.0 * kf + 1.0 + a - x) * laguerre(k, alpha, x);
                    let t2 = (kf + a) * laguerre(k - 1, alpha, x);
                    let scale = lhs.abs().max(t1.abs()).max(t2.abs()).max(1.0);
                    assert!(((lhs - (t1 - t2)) / scale).abs() <= 1e-10, "k={k} a={alpha} x={x}");
                }
            }
        }
    }

    #[test]
    fn laguerre_ode_with_differenced_derivatives() {
        let h = 1e-4;
        for &(k, alpha) in &[(3u32, 1u32), (6, 5), (9, 1), (2, 17)] {
            for &x in &[0.7, 2.0, 5.5, 11.0] {
                let y = |t: f64| laguerre(k, alpha, t);
                let y1 = (y(x + h) - y(x - h)) / (2.0 * h);
                let y2 = (y(x + h) - 2.0 * y(x) + y(x - h)) / (h * h);
                let res = x * y2 + (f64::from(alpha) + 1.0 - x) * y1 + f64::from(k) * y(x);
                let scale = (x * y2).abs().max(f64::from(k) * y(x).abs()).max(1.0);
                assert!(res.abs() / scale <= 1e-6, "k={k} a={alpha} x={x}: {res}");
            }
        }
    }
}

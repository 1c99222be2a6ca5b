//! Taylor coefficients of a function analytic in two complex variables,
//! from trapezoidal Cauchy integrals on circles `|w| = |z| = R`.
//!
//! For each coefficient the radius is picked from the supplied list to
//! minimise the rounding bound `ε·max|F|/R^{m+n}`; aliasing from orders
//! `≥ nodes` is assumed negligible (entire functions with moderate growth).

use nalgebra::DMatrix;
use num_complex::Complex64;

use std::f64::consts::PI;

/// `c_mn` with `F(w, z) = Σ c_mn wᵐ zⁿ`, for `m, n < order`.
pub fn taylor_coefficients_2d<F>(f: F, order: usize, nodes: usize, radii: &[f64]) -> DMatrix<Complex64>
where
    F: Fn(Complex64, Complex64) -> Complex64,
{
    assert!(order <= nodes, "need at least as many nodes as coefficients");
    assert!(!radii.is_empty() && radii.iter().all(|r| *r > 0.0), "radii must be positive");
    let roots: Vec<Complex64> = (0..nodes).map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / nodes as f64)).collect();

    let mut best = DMatrix::<Complex64>::zeros(order, order);
    let mut best_bound = DMatrix::<f64>::from_element(order, order, f64::INFINITY);
    for &r in radii {
        let samples = DMatrix::from_fn(nodes, nodes, |j, l| f(roots[j] * r, roots[l] * r));
        let scale = samples.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        // transform along z, then w; e^{−inθ_l} = conj(root_l)^n
        let partial = DMatrix::from_fn(nodes, order, |j, n| {
            (0..nodes).map(|l| samples[(j, l)] * roots[(l * n) % nodes].conj()).sum::<Complex64>()
        });
        for m in 0..order {
            for n in 0..order {
                let bound = f64::EPSILON * scale / r.powi((m + n) as i32);
                if bound < best_bound[(m, n)] {
                    let sum: Complex64 = (0..nodes).map(|j| partial[(j, n)] * roots[(j * m) % nodes].conj()).sum();
                    best[(m, n)] = sum / ((nodes * nodes) as f64 * r.powi((m + n) as i32));
                    best_bound[(m, n)] = bound;
                }
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_of_product() {
        // e^{wz} = Σ (wz)ⁿ/n!
        let c = taylor_coefficients_2d(|w, z| (w * z).exp(), 20, 64, &[0.5, 1.0, 2.0, 4.0]);
        let mut fact = 1.0;
        for n in 0..20 {
            if n > 0 {
                fact *= n as f64;
            }
            for m in 0..20 {
                let e = if m == n { 1.0 / fact } else { 0.0 };
                assert!((c[(m, n)].re - e).abs() < 1e-13 && c[(m, n)].im.abs() < 1e-13, "{m} {n}");
            }
        }
    }
}

//! Direct integration of the Heisenberg equations for the mode operators.
//!
//! With system modes `a₁…aₙ` followed by reservoir modes `b₁…bₙ`, the
//! equations are linear:
//!
//! ```text
//! d/dt (a, b) = −i h(t) (a, b) − i f(t) e^{−iω_L t} e₁,
//! h(t) = [[M, g(t) I], [g(t) I, M]]
//! ```
//!
//! so `(a, b)(t) = U(t) (a, b)(0) + ζ(t)`. The integration runs in the frame
//! rotating at `ω₀` (which commutes with `h`) and restores the phase at the
//! end. The Markovian envelope has `g(t) ~ t^{−1/2}` near the origin; for it
//! the equations are integrated in `s = √t`, where the right-hand side is
//! bounded.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use osc_core::{DampingEnvelope, SystemParams};

use crate::error::{OracleError, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepConfig {
    /// Largest phase advance `ω·dt` per step for the fastest frequency present.
    pub phase_step: f64,
    /// Absolute cap on the step.
    pub max_step: f64,
    /// Allowed `‖U†U − I‖_max` (mode ODE) or `|‖ψ‖ − 1|` (Fock).
    pub drift_tol: Option<f64>,
}

impl Default for StepConfig {
    fn default() -> Self {
        StepConfig { phase_step: 0.005, max_step: 0.01, drift_tol: None }
    }
}

impl StepConfig {
    fn validate(&self) -> Result<()> {
        if !(self.phase_step > 0.0 && self.max_step > 0.0) {
            return Err(OracleError::InvalidInput("step sizes must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeODEState {
    pub time: f64,
    /// `2n × 2n` map from initial to time-`t` mode operators.
    pub coeff_matrix: DMatrix<Complex64>,
    pub displacement: DVector<Complex64>,
}

impl ModeODEState {
    /// `⟨a†ᵢaᵢ⟩ = Σⱼ |U_ij|² nⱼ + |ζᵢ|²` for initially diagonal (number or
    /// thermal) states with occupations `initial` (system modes then
    /// reservoir modes).
    pub fn occupations(&self, initial: &[f64]) -> Vec<f64> {
        let u = &self.coeff_matrix;
        (0..u.nrows())
            .map(|i| {
                let mixed: f64 = initial.iter().enumerate().map(|(j, n)| u[(i, j)].norm_sqr() * n).sum();
                mixed + self.displacement[i].norm_sqr()
            })
            .collect()
    }

    /// `⟨aᵢ(t)⟩` for an initial product of coherent states `alphas`.
    pub fn mean_amplitudes(&self, alphas: &[Complex64]) -> Vec<Complex64> {
        let u = &self.coeff_matrix;
        (0..u.nrows())
            .map(|i| alphas.iter().enumerate().map(|(j, a)| u[(i, j)] * a).sum::<Complex64>() + self.displacement[i])
            .collect()
    }

    /// `‖U†U − I‖_max`.
    pub fn unitarity_residual(&self) -> f64 {
        let n = self.coeff_matrix.nrows();
        let gram = self.coeff_matrix.adjoint() * &self.coeff_matrix - DMatrix::identity(n, n);
        gram.iter().fold(0.0, |m, z| m.max(z.norm()))
    }
}

/// Maps the integration variable `τ` to physical time, with `dt/dτ` and
/// `g(t) dt/dτ`.
enum Clock<'a> {
    Linear(&'a DampingEnvelope),
    Sqrt(f64),
}

impl Clock<'_> {
    fn time(&self, tau: f64) -> f64 {
        match self {
            Clock::Linear(_) => tau,
            Clock::Sqrt(_) => tau * tau,
        }
    }

    fn tau(&self, t: f64) -> f64 {
        match self {
            Clock::Linear(_) => t,
            Clock::Sqrt(_) => t.sqrt(),
        }
    }

    /// `(t, dt/dτ, g(t) dt/dτ)`.
    fn eval(&self, tau: f64) -> (f64, f64, f64) {
        match self {
            Clock::Linear(env) => (tau, 1.0, env.rate(tau)),
            Clock::Sqrt(gamma) => {
                let g = *gamma;
                let x = g * tau * tau;
                // 2s·g(s²) = γ s e^{−γs²/2} / √(1 − e^{−γs²}) → √γ as s → 0
                let g_jac = if g == 0.0 {
                    0.0
                } else if x < 1e-300 {
                    g.sqrt()
                } else {
                    g * tau * (-0.5 * x).exp() / (-(-x).exp_m1()).sqrt()
                };
                (tau * tau, 2.0 * tau, g_jac)
            }
        }
    }
}

struct Problem<'a> {
    n: usize,
    k: f64,
    delta: f64,
    params: &'a SystemParams,
    clock: Clock<'a>,
}

impl Problem<'_> {
    /// `dX/dτ` for `X = [Ũ | ζ̃]` (`2n × (2n+1)`), in the frame rotating at ω₀.
    fn rhs(&self, tau: f64, x: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let n = self.n;
        let (t, jac, g_jac) = self.clock.eval(tau);
        let kj = self.k * jac;
        let mut out = DMatrix::zeros(2 * n, 2 * n + 1);
        for col in 0..=2 * n {
            for row in 0..2 * n {
                let site = row % n;
                let partner = if row < n { row + n } else { row - n };
                let mut acc = x[(partner, col)] * g_jac;
                if site > 0 {
                    acc += x[(row - 1, col)] * kj;
                }
                if site + 1 < n {
                    acc += x[(row + 1, col)] * kj;
                }
                out[(row, col)] = -I * acc;
            }
        }
        let f = self.params.drive.amplitude(t);
        out[(0, 2 * n)] += -I * jac * Complex64::from_polar(f, self.delta * t);
        out
    }

    fn rk4(&self, tau: f64, h: f64, x: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let c = |v: f64| Complex64::new(v, 0.0);
        let k1 = self.rhs(tau, x);
        let k2 = self.rhs(tau + 0.5 * h, &(x + &k1 * c(0.5 * h)));
        let k3 = self.rhs(tau + 0.5 * h, &(x + &k2 * c(0.5 * h)));
        let k4 = self.rhs(tau + h, &(x + &k3 * c(h)));
        x + (k1 + k2 * c(2.0) + k3 * c(2.0) + k4) * c(h / 6.0)
    }
}

/// Solution at a single time `t`.
pub fn linear_mode_oracle(
    params: &SystemParams,
    env: &DampingEnvelope,
    t: f64,
    step: &StepConfig,
) -> Result<ModeODEState> {
    Ok(linear_mode_trajectory(params, env, &[t], step)?.pop().expect("one time requested"))
}

/// Solutions at each of `times` (non-decreasing, non-negative), from one
/// continuous integration.
pub fn linear_mode_trajectory(
    params: &SystemParams,
    env: &DampingEnvelope,
    times: &[f64],
    step: &StepConfig,
) -> Result<Vec<ModeODEState>> {
    params.validate()?;
    env.validate()?;
    step.validate()?;
    if times.iter().any(|t| !(*t >= 0.0 && t.is_finite())) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(OracleError::InvalidInput("times must be finite, non-negative and sorted".into()));
    }
    let n = params.chain_size;
    let clock = match env {
        DampingEnvelope::Markovian(gamma) => Clock::Sqrt(*gamma),
        other => Clock::Linear(other),
    };
    let problem = Problem { n, k: params.k, delta: params.detuning(), params, clock };

    let physical = 2.0 * params.k + params.detuning().abs() + env.rate_bound() + params.drive.bandwidth();
    let t_end = times.last().copied().unwrap_or(0.0);
    let freq = match problem.clock {
        Clock::Linear(_) => physical,
        Clock::Sqrt(gamma) => 2.0 * t_end.sqrt() * physical + gamma.sqrt(),
    };
    let h_max = if freq > 0.0 { (step.phase_step / freq).min(step.max_step) } else { step.max_step };
    let tol = step.drift_tol.unwrap_or(1e-6);

    let mut x = DMatrix::<Complex64>::zeros(2 * n, 2 * n + 1);
    for i in 0..2 * n {
        x[(i, i)] = Complex64::new(1.0, 0.0);
    }
    let mut tau = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let target = problem.clock.tau(t);
        let span = target - tau;
        if span > 0.0 {
            let steps = (span / h_max).ceil().max(1.0) as usize;
            let h = span / steps as f64;
            for s in 0..steps {
                x = problem.rk4(tau + s as f64 * h, h, &x);
            }
            tau = target;
        }
        let phase = Complex64::from_polar(1.0, -params.omega0 * problem.clock.time(tau));
        let state = ModeODEState {
            time: t,
            coeff_matrix: x.columns(0, 2 * n) * phase,
            displacement: x.column(2 * n) * phase,
        };
        let residual = state.unitarity_residual();
        if residual > tol {
            return Err(OracleError::UnitarityDrift { time: t, residual });
        }
        out.push(state);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use osc_core::pair::{drive_response, mode_coefficients};
    use osc_core::{DriveSpec, QuadratureConfig};

    #[test]
    fn free_evolution() {
        let p = SystemParams::pair(1.7, 0.0, 1.0, DriveSpec::Constant(0.0));
        let t = 3.0;
        let s = linear_mode_oracle(&p, &DampingEnvelope::none(), t, &StepConfig::default()).unwrap();
        let phase = Complex64::from_polar(1.0, -1.7 * t);
        for i in 0..4 {
            for j in 0..4 {
                let e = if i == j { phase } else { Complex64::new(0.0, 0.0) };
                assert!((s.coeff_matrix[(i, j)] - e).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn pair_coefficients_and_drive() {
        let p = SystemParams::pair(2.0, 0.6, 1.5, DriveSpec::Constant(0.7));
        for env in [DampingEnvelope::ConstantG(0.3), DampingEnvelope::Markovian(0.4)] {
            let t = 5.0;
            let s = linear_mode_oracle(&p, &env, t, &StepConfig::default()).unwrap();
            let c = mode_coefficients(&p, &env, t).unwrap();
            let f = drive_response(&p, &env, t, &QuadratureConfig::default()).unwrap();
            // a₁(t) = p a₁ + u a₂ + q b + h c + f₁; mode order [a₁, a₂, b, c]
            let row = [c.p, c.u, c.q, c.h];
            for (j, v) in row.iter().enumerate() {
                assert!((s.coeff_matrix[(0, j)] - v).norm() < 1e-9, "{env:?} j={j}");
            }
            assert!((s.displacement[0] - f.f1).norm() < 1e-9);
            assert!((s.displacement[1] - f.f2).norm() < 1e-9);
        }
    }

    #[test]
    fn unitarity_at_long_times() {
        let p = SystemParams::pair(1.0, 0.8, 1.0, DriveSpec::Constant(0.0));
        let s = linear_mode_oracle(&p, &DampingEnvelope::ConstantG(0.5), 100.0, &StepConfig::default()).unwrap();
        assert!(s.unitarity_residual() < 1e-8);
    }

    #[test]
    fn trajectory_matches_single_calls() {
        let p = SystemParams::chain(3, 1.0, 0.5, 0.8, DriveSpec::Constant(0.4));
        let env = DampingEnvelope::ConstantG(0.1);
        let cfg = StepConfig::default();
        let traj = linear_mode_trajectory(&p, &env, &[0.0, 1.0, 2.5], &cfg).unwrap();
        assert_eq!(traj[0].displacement.norm(), 0.0);
        let single = linear_mode_oracle(&p, &env, 2.5, &cfg).unwrap();
        assert!((&traj[2].displacement - &single.displacement).norm() < 1e-10);
    }

    #[test]
    fn rejects_unsorted_times() {
        let p = SystemParams::pair(1.0, 1.0, 1.0, DriveSpec::Constant(0.0));
        let r = linear_mode_trajectory(&p, &DampingEnvelope::none(), &[2.0, 1.0], &StepConfig::default());
        assert!(matches!(r, Err(OracleError::InvalidInput(_))));
    }
}

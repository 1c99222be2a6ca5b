//! Schrödinger propagation in a truncated Fock space.
//!
//! Modes are ordered as for [`crate::mode_ode`]: system sites `a₁…aₙ`, then
//! reservoir sites `b₁…bₙ`. The basis is mixed-radix over `mode_dims` with
//! the first mode most significant. Propagation runs in the frame rotating
//! at `ω₀`, where the Hamiltonian reads
//!
//! ```text
//! H = k Σ (a†ᵢaᵢ₊₁ + b†ᵢbᵢ₊₁ + h.c.) + g(t) Σ (a†ᵢbᵢ + h.c.)
//!     + f(t) (e^{iΔt} a₁† + e^{−iΔt} a₁)
//! ```

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use osc_core::phase_space::DensityMatrix;
use osc_core::{DampingEnvelope, SystemParams};

use crate::error::{OracleError, Result};
use crate::mode_ode::StepConfig;

use std::f64::consts::PI;

const I: Complex64 = Complex64::new(0.0, 1.0);
pub const MAX_STATES: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    pub mode_dims: Vec<usize>,
    pub amplitudes: DVector<Complex64>,
}

fn checked_total(dims: &[usize]) -> Result<usize> {
    let total: u128 = dims.iter().map(|&d| d as u128).product();
    if dims.is_empty() || dims.contains(&0) {
        return Err(OracleError::InvalidInput("every mode needs dimension ≥ 1".into()));
    }
    if total > MAX_STATES as u128 {
        return Err(OracleError::DimensionOverflow { dims: dims.to_vec(), total, limit: MAX_STATES });
    }
    Ok(total as usize)
}

/// Number-basis amplitudes `⟨n|α⟩ = e^{−|α|²/2} αⁿ/√n!` for `n < dim`.
pub fn coherent_amplitudes(alpha: Complex64, dim: usize) -> Vec<Complex64> {
    let mut v = Vec::with_capacity(dim);
    let mut cur = Complex64::from((-0.5 * alpha.norm_sqr()).exp());
    for n in 0..dim {
        if n > 0 {
            cur = cur * alpha / (n as f64).sqrt();
        }
        v.push(cur);
    }
    v
}

impl FockState {
    pub fn new(mode_dims: Vec<usize>, amplitudes: DVector<Complex64>) -> Result<Self> {
        let total = checked_total(&mode_dims)?;
        if amplitudes.len() != total {
            return Err(OracleError::InvalidInput(format!("{} amplitudes for {total} basis states", amplitudes.len())));
        }
        Ok(FockState { mode_dims, amplitudes })
    }

    /// The basis state `|n₁, n₂, …⟩`.
    pub fn basis(mode_dims: Vec<usize>, occupations: &[usize]) -> Result<Self> {
        let total = checked_total(&mode_dims)?;
        if occupations.len() != mode_dims.len() || occupations.iter().zip(&mode_dims).any(|(n, d)| n >= d) {
            return Err(OracleError::InvalidInput("occupations outside the truncated space".into()));
        }
        let index = occupations.iter().zip(&mode_dims).fold(0, |acc, (n, d)| acc * d + n);
        let mut amplitudes = DVector::zeros(total);
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(FockState { mode_dims, amplitudes })
    }

    /// Tensor product of single-mode amplitude vectors.
    pub fn product(factors: &[Vec<Complex64>]) -> Result<Self> {
        let dims: Vec<usize> = factors.iter().map(Vec::len).collect();
        let total = checked_total(&dims)?;
        let mut amplitudes = DVector::from_element(total, Complex64::new(1.0, 0.0));
        for (idx, amp) in amplitudes.iter_mut().enumerate() {
            let mut rest = idx;
            for (m, f) in factors.iter().enumerate().rev() {
                *amp *= f[rest % dims[m]];
                rest /= dims[m];
            }
        }
        Ok(FockState { mode_dims: dims, amplitudes })
    }

    /// Truncated product of coherent states, renormalised.
    pub fn coherent(mode_dims: Vec<usize>, alphas: &[Complex64]) -> Result<Self> {
        if alphas.len() != mode_dims.len() {
            return Err(OracleError::InvalidInput("one amplitude per mode required".into()));
        }
        let factors: Vec<Vec<Complex64>> =
            alphas.iter().zip(&mode_dims).map(|(a, d)| coherent_amplitudes(*a, *d)).collect();
        let mut s = Self::product(&factors)?;
        let norm = s.norm();
        s.amplitudes /= Complex64::from(norm);
        Ok(s)
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    fn digits(&self, mut idx: usize, out: &mut [usize]) {
        for m in (0..self.mode_dims.len()).rev() {
            out[m] = idx % self.mode_dims[m];
            idx /= self.mode_dims[m];
        }
    }

    /// `⟨a†ₘaₘ⟩`.
    pub fn mode_occupation(&self, mode: usize) -> f64 {
        let mut d = vec![0; self.mode_dims.len()];
        let mut acc = 0.0;
        for (idx, a) in self.amplitudes.iter().enumerate() {
            self.digits(idx, &mut d);
            acc += d[mode] as f64 * a.norm_sqr();
        }
        acc
    }

    /// Probability of the highest retained level of each mode; a proxy for
    /// the mass lost to truncation.
    pub fn edge_populations(&self) -> Vec<f64> {
        let mut d = vec![0; self.mode_dims.len()];
        let mut out = vec![0.0; self.mode_dims.len()];
        for (idx, a) in self.amplitudes.iter().enumerate() {
            self.digits(idx, &mut d);
            for m in 0..d.len() {
                if d[m] + 1 == self.mode_dims[m] {
                    out[m] += a.norm_sqr();
                }
            }
        }
        out
    }
}

/// Sparse real operator as `(row, col, value)` triplets.
#[derive(Default)]
struct Sparse {
    entries: Vec<(usize, usize, f64)>,
}

impl Sparse {
    fn apply_add(&self, x: &DVector<Complex64>, scale: Complex64, out: &mut DVector<Complex64>) {
        for &(r, c, v) in &self.entries {
            out[r] += scale * v * x[c];
        }
    }

    fn apply_transpose_add(&self, x: &DVector<Complex64>, scale: Complex64, out: &mut DVector<Complex64>) {
        for &(r, c, v) in &self.entries {
            out[c] += scale * v * x[r];
        }
    }

    fn row_sums(&self, n: usize) -> Vec<f64> {
        let mut s = vec![0.0; n];
        for &(r, _, v) in &self.entries {
            s[r] += v.abs();
        }
        s
    }

    fn col_sums(&self, n: usize) -> Vec<f64> {
        let mut s = vec![0.0; n];
        for &(_, c, v) in &self.entries {
            s[c] += v.abs();
        }
        s
    }
}

struct Operators {
    hop: Sparse,
    bath: Sparse,
    /// `a₁†`; `a₁` is its transpose.
    raise: Sparse,
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for m in (0..dims.len().saturating_sub(1)).rev() {
        s[m] = s[m + 1] * dims[m + 1];
    }
    s
}

/// Adds `a†ᵢaⱼ + a†ⱼaᵢ` to `op`, truncated consistently so the result is
/// symmetric.
fn add_exchange(op: &mut Sparse, dims: &[usize], strides: &[usize], total: usize, i: usize, j: usize) {
    for idx in 0..total {
        let ni = (idx / strides[i]) % dims[i];
        let nj = (idx / strides[j]) % dims[j];
        if nj > 0 && ni + 1 < dims[i] {
            let target = idx + strides[i] - strides[j];
            let v = (((ni + 1) * nj) as f64).sqrt();
            op.entries.push((target, idx, v));
            op.entries.push((idx, target, v));
        }
    }
}

fn build_operators(dims: &[usize], n: usize) -> Operators {
    let total: usize = dims.iter().product();
    let st = strides(dims);
    let mut hop = Sparse::default();
    for site in 0..n.saturating_sub(1) {
        add_exchange(&mut hop, dims, &st, total, site, site + 1);
        add_exchange(&mut hop, dims, &st, total, n + site, n + site + 1);
    }
    let mut bath = Sparse::default();
    for site in 0..n {
        add_exchange(&mut bath, dims, &st, total, site, n + site);
    }
    let mut raise = Sparse::default();
    for idx in 0..total {
        let n1 = (idx / st[0]) % dims[0];
        if n1 + 1 < dims[0] {
            raise.entries.push((idx + st[0], idx, ((n1 + 1) as f64).sqrt()));
        }
    }
    Operators { hop, bath, raise }
}

/// Propagates `init` to time `t` under the driven chain-plus-reservoir
/// Hamiltonian. `init.mode_dims` must list `2n` modes.
pub fn fock_evolve(
    params: &SystemParams,
    env: &DampingEnvelope,
    init: &FockState,
    t: f64,
    step: &StepConfig,
) -> Result<FockState> {
    params.validate()?;
    env.validate()?;
    if matches!(env, DampingEnvelope::Markovian(_)) {
        return Err(OracleError::UnsupportedEnvelope("the Markovian rate is singular at t = 0; use the mode oracle"));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(OracleError::InvalidInput(format!("time must be non-negative, got {t}")));
    }
    let n = params.chain_size;
    if init.mode_dims.len() != 2 * n {
        return Err(OracleError::InvalidInput(format!(
            "{} modes given, {} expected (system sites then reservoirs)",
            init.mode_dims.len(),
            2 * n
        )));
    }
    let total = checked_total(&init.mode_dims)?;
    let ops = build_operators(&init.mode_dims, n);

    let g_max = env.rate_bound();
    let f_max = match params.drive.constant() {
        Some(f) => f.abs(),
        None => {
            // coarse sampling bound for scheduled drives
            (0..=1000).map(|i| params.drive.amplitude(t * i as f64 / 1000.0).abs()).fold(0.0, f64::max)
        }
    };
    let hop_rows = ops.hop.row_sums(total);
    let bath_rows = ops.bath.row_sums(total);
    let up = ops.raise.row_sums(total);
    let down = ops.raise.col_sums(total);
    let gershgorin = (0..total)
        .map(|r| params.k * hop_rows[r] + g_max * bath_rows[r] + f_max * (up[r] + down[r]))
        .fold(0.0, f64::max);
    let physical = 2.0 * params.k + params.detuning().abs() + g_max + params.drive.bandwidth();
    let mut h = step.max_step;
    if physical > 0.0 {
        h = h.min(step.phase_step / physical);
    }
    if gershgorin > 0.0 {
        h = h.min(0.25 / gershgorin);
    }
    let steps = if t > 0.0 { (t / h).ceil().max(1.0) as usize } else { 0 };
    let h = if steps > 0 { t / steps as f64 } else { 0.0 };
    let tol = step.drift_tol.unwrap_or(1e-8);
    let delta = params.detuning();

    let apply = |time: f64, x: &DVector<Complex64>| {
        let mut out = DVector::zeros(total);
        ops.hop.apply_add(x, Complex64::from(params.k), &mut out);
        let g = env.rate(time);
        if g != 0.0 {
            ops.bath.apply_add(x, Complex64::from(g), &mut out);
        }
        let f = params.drive.amplitude(time);
        if f != 0.0 {
            let carrier = Complex64::from_polar(f, delta * time);
            ops.raise.apply_add(x, carrier, &mut out);
            ops.raise.apply_transpose_add(x, carrier.conj(), &mut out);
        }
        out * (-I)
    };

    let mut psi = init.amplitudes.clone();
    let norm0 = psi.norm();
    for s in 0..steps {
        let t0 = s as f64 * h;
        let k1 = apply(t0, &psi);
        let k2 = apply(t0 + 0.5 * h, &(&psi + &k1 * Complex64::from(0.5 * h)));
        let k3 = apply(t0 + 0.5 * h, &(&psi + &k2 * Complex64::from(0.5 * h)));
        let k4 = apply(t0 + h, &(&psi + &k3 * Complex64::from(h)));
        psi += (k1 + k2 * Complex64::from(2.0) + k3 * Complex64::from(2.0) + k4) * Complex64::from(h / 6.0);
        if s % 64 == 63 || s + 1 == steps {
            let drift = (psi.norm() - norm0).abs();
            if drift > tol {
                return Err(OracleError::NormDrift { time: t0 + h, drift });
            }
        }
    }

    // back to the lab frame: e^{−iω₀ t N}
    let st = strides(&init.mode_dims);
    for (idx, a) in psi.iter_mut().enumerate() {
        let quanta: usize = (0..init.mode_dims.len()).map(|m| (idx / st[m]) % init.mode_dims[m]).sum();
        *a *= Complex64::from_polar(1.0, -params.omega0 * t * quanta as f64);
    }
    Ok(FockState { mode_dims: init.mode_dims.clone(), amplitudes: psi })
}

/// Reduced density matrix over the modes in `keep` (in the order given).
pub fn partial_trace(state: &FockState, keep: &[usize]) -> Result<DensityMatrix> {
    let m = state.mode_dims.len();
    if keep.is_empty() || keep.iter().any(|&k| k >= m) {
        return Err(OracleError::InvalidInput("keep must be a nonempty set of mode indices".into()));
    }
    let mut seen = vec![false; m];
    for &k in keep {
        if std::mem::replace(&mut seen[k], true) {
            return Err(OracleError::InvalidInput("duplicate mode in keep".into()));
        }
    }
    let kept_dims: Vec<usize> = keep.iter().map(|&k| state.mode_dims[k]).collect();
    let rest: Vec<usize> = (0..m).filter(|k| !seen[*k]).collect();
    let kept_total: usize = kept_dims.iter().product();
    let rest_total: usize = rest.iter().map(|&k| state.mode_dims[k]).product();

    let mut psi = DMatrix::<Complex64>::zeros(kept_total, rest_total);
    let mut d = vec![0; m];
    for (idx, a) in state.amplitudes.iter().enumerate() {
        state.digits(idx, &mut d);
        let row = keep.iter().fold(0, |acc, &k| acc * state.mode_dims[k] + d[k]);
        let col = rest.iter().fold(0, |acc, &k| acc * state.mode_dims[k] + d[k]);
        psi[(row, col)] = *a;
    }
    let rho = &psi * psi.adjoint();
    Ok(DensityMatrix::from_matrix(rho, kept_dims))
}

/// `(1/π)⟨α|ρ|α⟩` for a single-mode density matrix.
pub fn husimi_from_state(rho: &DensityMatrix, alpha: Complex64) -> f64 {
    husimi_from_state_multimode(rho, &[alpha])
}

/// `π^{−M} ⟨α₁…α_M|ρ|α₁…α_M⟩` over the modes of `rho`. Panics if the number
/// of amplitudes differs from the number of modes.
pub fn husimi_from_state_multimode(rho: &DensityMatrix, alphas: &[Complex64]) -> f64 {
    let dims = rho.mode_dims();
    assert_eq!(dims.len(), alphas.len(), "one amplitude per mode");
    let factors: Vec<Vec<Complex64>> = alphas.iter().zip(dims).map(|(a, d)| coherent_amplitudes(*a, *d)).collect();
    let v = FockState::product(&factors).expect("dims already validated").amplitudes;
    let value = (v.adjoint() * rho.entries() * &v)[(0, 0)].re;
    value / PI.powi(alphas.len() as i32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use osc_core::pair::drive_response;
    use osc_core::phase_space::reduced_density_matrix;
    use osc_core::{DriveSpec, QuadratureConfig};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_hamiltonian_leaves_state() {
        let p = SystemParams::pair(1.0, 0.0, 1.0, DriveSpec::Constant(0.0));
        let init = FockState::coherent(vec![5, 5, 3, 3], &[c(0.3, 0.1), c(0.0, 0.2), c(0.1, 0.0), c(0.0, 0.0)]).unwrap();
        let out = fock_evolve(&p, &DampingEnvelope::none(), &init, 2.0, &StepConfig::default()).unwrap();
        // only the lab-frame phase e^{−iω₀tN} acts
        let st = strides(&init.mode_dims);
        for (idx, (a, b)) in init.amplitudes.iter().zip(out.amplitudes.iter()).enumerate() {
            let quanta: usize = (0..4).map(|m| (idx / st[m]) % init.mode_dims[m]).sum();
            let expected = a * Complex64::from_polar(1.0, -2.0 * quanta as f64);
            assert!((b - expected).norm() < 1e-15);
        }
    }

    #[test]
    fn single_excitation_swaps() {
        let k = 0.8;
        let p = SystemParams::pair(1.0, k, 1.0, DriveSpec::Constant(0.0));
        let init = FockState::basis(vec![3, 3, 2, 2], &[1, 0, 0, 0]).unwrap();
        let t = std::f64::consts::PI / (2.0 * k);
        let out = fock_evolve(&p, &DampingEnvelope::none(), &init, t, &StepConfig::default()).unwrap();
        assert!((out.mode_occupation(1) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn resonant_drive_matches_closed_form() {
        let p = SystemParams::pair(3.0, 1.0, 3.0, DriveSpec::Constant(0.3));
        let env = DampingEnvelope::none();
        let init = FockState::basis(vec![12, 12, 1, 1], &[0, 0, 0, 0]).unwrap();
        let t = 2.0;
        let out = fock_evolve(&p, &env, &init, t, &StepConfig::default()).unwrap();
        let f = drive_response(&p, &env, t, &QuadratureConfig::default()).unwrap();
        assert!((out.mode_occupation(1) - f.f2.norm_sqr()).abs() < 1e-6);
    }

    #[test]
    fn partial_trace_examples() {
        let a = vec![c(0.6, 0.0), c(0.0, 0.8)];
        let b = vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let s = FockState::product(&[a.clone(), b]).unwrap();
        let rho = partial_trace(&s, &[0]).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((rho.get(i, j) - a[i] * a[j].conj()).norm() < 1e-15);
            }
        }
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = DVector::zeros(4);
        amps[1] = c(r, 0.0);
        amps[2] = c(r, 0.0);
        let bell = FockState::new(vec![2, 2], amps).unwrap();
        let rho = partial_trace(&bell, &[0]).unwrap();
        assert!((rho.get(0, 0).re - 0.5).abs() < 1e-15 && (rho.get(1, 1).re - 0.5).abs() < 1e-15);
        assert!(rho.get(0, 1).norm() < 1e-15);
        assert!(partial_trace(&bell, &[]).is_err());
        assert!(partial_trace(&bell, &[0, 0]).is_err());
    }

    #[test]
    fn husimi_examples() {
        let alpha = c(0.7, -0.4);
        let mut vac = DMatrix::zeros(10, 10);
        vac[(0, 0)] = c(1.0, 0.0);
        let q = husimi_from_state(&DensityMatrix::single_mode(vac), alpha);
        assert!((q - (-alpha.norm_sqr()).exp() / PI).abs() < 1e-15);
        let mut one = DMatrix::zeros(10, 10);
        one[(1, 1)] = c(1.0, 0.0);
        let q = husimi_from_state(&DensityMatrix::single_mode(one), alpha);
        assert!((q - alpha.norm_sqr() * (-alpha.norm_sqr()).exp() / PI).abs() < 1e-15);
        let r = c(0.5, 0.9);
        let rho = reduced_density_matrix(r, 1.0, 40).unwrap();
        let q = husimi_from_state(&rho, alpha);
        assert!((q - (-(alpha - r).norm_sqr()).exp() / PI).abs() < 1e-14);
    }

    #[test]
    fn rejects_markovian_and_oversized() {
        let p = SystemParams::pair(1.0, 1.0, 1.0, DriveSpec::Constant(0.0));
        let init = FockState::basis(vec![2, 2, 2, 2], &[0, 0, 0, 0]).unwrap();
        let r = fock_evolve(&p, &DampingEnvelope::Markovian(0.1), &init, 1.0, &StepConfig::default());
        assert!(matches!(r, Err(OracleError::UnsupportedEnvelope(_))));
        assert!(matches!(
            FockState::basis(vec![100, 100, 100, 100], &[0, 0, 0, 0]),
            Err(OracleError::DimensionOverflow { .. })
        ));
    }
}

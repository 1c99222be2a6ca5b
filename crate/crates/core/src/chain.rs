//! Uniform chain of `n` oscillators, nearest-neighbour coupling `k₀`, each
//! mixed with its own reservoir, the first site driven.
//!
//! The coupling matrix `M` (`ω₀` on the diagonal, `k₀` off it) is
//! diagonalised analytically by the symmetric orthogonal matrix
//! `T_ij = √(2/(n+1)) sin(ijπ/(n+1))` with eigenvalues
//! `λ_k = ω₀ + 2k₀ cos(kπ/(n+1))`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{check_time, Error, Result};
use crate::params::{DampingEnvelope, SystemParams};
use crate::quadrature::{integrate, QuadratureConfig};

use std::f64::consts::PI;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq)]
pub struct ChainSpectrum {
    pub n: usize,
    /// `λ_k`, `k = 1…n`, stored at index `k − 1`.
    pub lambdas: Vec<f64>,
    /// Column `k − 1` is the normal mode belonging to `λ_k`.
    pub t: DMatrix<f64>,
}

impl ChainSpectrum {
    /// `λ_k − ω₀ = 2k₀ cos(kπ/(n+1))`.
    fn offsets(&self, omega0: f64) -> Vec<f64> {
        self.lambdas.iter().map(|l| l - omega0).collect()
    }
}

/// The tridiagonal matrix `M`.
pub fn coupling_matrix(n: usize, omega0: f64, k0: f64) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            omega0
        } else if i.abs_diff(j) == 1 {
            k0
        } else {
            0.0
        }
    })
}

pub fn chain_spectrum(n: usize, omega0: f64, k0: f64) -> ChainSpectrum {
    let step = PI / (n + 1) as f64;
    let lambdas = (1..=n).map(|k| omega0 + 2.0 * k0 * (k as f64 * step).cos()).collect();
    let norm = (2.0 / (n + 1) as f64).sqrt();
    let t = DMatrix::from_fn(n, n, |i, j| norm * (((i + 1) * (j + 1)) as f64 * step).sin());
    ChainSpectrum { n, lambdas, t }
}

/// Heisenberg solution `a(t) = ũ a(0) + ṽ b(0) + ζ̃` for the chain operators
/// `a` and reservoir operators `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainEvolution {
    pub u_tilde: DMatrix<Complex64>,
    pub v_tilde: DMatrix<Complex64>,
    pub zeta_tilde: DVector<Complex64>,
}

fn validated_size(params: &SystemParams) -> Result<usize> {
    match params.chain_size {
        0 => Err(Error::invalid("chain_size", "must be at least 1")),
        n => Ok(n),
    }
}

/// `ũ = T diag(u_k) Tᵗ`, `ṽ = T diag(v_k) Tᵗ` with `u_k = e^{−iλ_k t} cos G`,
/// `v_k = −i e^{−iλ_k t} sin G`, and `ζ̃ = T ζ` where
///
/// ```text
/// ζ_k = −i T_k1 ∫₀ᵗ e^{−iλ_k(t−t′)} e^{−iω_L t′} f(t′) cos[G(t)−G(t′)] dt′.
/// ```
pub fn chain_mode_evolution(
    params: &SystemParams,
    env: &DampingEnvelope,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<ChainEvolution> {
    let n = validated_size(params)?;
    let (cos_g, sin_g) = env.eval(t)?;
    let spec = chain_spectrum(n, params.omega0, params.k);
    let modes = &spec.t;

    let u: Vec<Complex64> = spec.lambdas.iter().map(|l| (-I * l * t).exp() * cos_g).collect();
    let v: Vec<Complex64> = spec.lambdas.iter().map(|l| -I * (-I * l * t).exp() * sin_g).collect();
    let rotate = |d: &[Complex64]| {
        DMatrix::from_fn(n, n, |i, j| (0..n).map(|k| modes[(i, k)] * d[k] * modes[(j, k)]).sum::<Complex64>())
    };

    let mut zeta = vec![Complex64::new(0.0, 0.0); n];
    if !params.drive.is_zero() && t > 0.0 {
        // e^{−iλ_k t} factored out: the integrand carries e^{i(λ_k − ω_L)t′}.
        let freqs: Vec<f64> = spec.lambdas.iter().map(|l| l - params.omega_l).collect();
        let integrand = |tp: f64| {
            let (cp, sp) = env.eval_unchecked(tp);
            let weight = params.drive.amplitude(tp) * (cos_g * cp + sin_g * sp);
            freqs.iter().map(|w| Complex64::from_polar(weight, w * tp)).collect::<Vec<_>>()
        };
        let max_freq = freqs.iter().fold(0.0f64, |m, w| m.max(w.abs()))
            + env.rate_bound()
            + params.drive.bandwidth();
        let integral =
            integrate(integrand, 0.0, t, max_freq, cfg).map_err(|source| Error::Quadrature { time: t, source })?;
        for k in 0..n {
            zeta[k] = -I * modes[(k, 0)] * (-I * spec.lambdas[k] * t).exp() * integral.value[k];
        }
    }
    let zeta_tilde = DVector::from_fn(n, |i, _| (0..n).map(|k| modes[(i, k)] * zeta[k]).sum::<Complex64>());

    Ok(ChainEvolution { u_tilde: rotate(&u), v_tilde: rotate(&v), zeta_tilde })
}

/// `⟨a†ᵢaᵢ⟩ = |ψᵢ(t)|²` for every site, all modes starting in their ground
/// states, where
///
/// ```text
/// ψᵢ = e^{−iω₀t} ∫₀ᵗ f(t′) e^{iΔt′} cos[G(t)−G(t′)] φᵢ(t−t′) dt′,
/// φᵢ(τ) = Σ_k e^{−2ik₀τ cos(kπ/(n+1))} T_ik T_k1.
/// ```
pub fn chain_excitations(
    params: &SystemParams,
    env: &DampingEnvelope,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<Vec<f64>> {
    let n = validated_size(params)?;
    check_time(t)?;
    if params.drive.is_zero() || t == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let spec = chain_spectrum(n, params.omega0, params.k);
    let offsets = spec.offsets(params.omega0);
    let weights: Vec<Vec<f64>> =
        (0..n).map(|i| (0..n).map(|k| spec.t[(i, k)] * spec.t[(k, 0)]).collect()).collect();
    let delta = params.detuning();
    let (cos_g, sin_g) = env.eval_unchecked(t);

    let integrand = |tp: f64| {
        let (cp, sp) = env.eval_unchecked(tp);
        let weight = params.drive.amplitude(tp) * (cos_g * cp + sin_g * sp);
        let carrier = Complex64::from_polar(weight, delta * tp);
        let tau = t - tp;
        let modes: Vec<Complex64> = offsets.iter().map(|o| Complex64::from_polar(1.0, -o * tau)).collect();
        weights
            .iter()
            .map(|row| carrier * row.iter().zip(&modes).map(|(w, m)| m * *w).sum::<Complex64>())
            .collect::<Vec<_>>()
    };
    let max_offset = offsets.iter().fold(0.0f64, |m, o| m.max(o.abs()));
    let max_freq = delta.abs() + max_offset + env.rate_bound() + params.drive.bandwidth();
    let integral =
        integrate(integrand, 0.0, t, max_freq, cfg).map_err(|source| Error::Quadrature { time: t, source })?;
    Ok(integral.value.iter().map(|z| z.norm_sqr()).collect())
}

/// `k₀² ⟨a†ᵢaᵢ⟩ / F²`, the dimensionless excitations reported in figures.
pub fn scaled_excitations(raw: &[f64], k0: f64, amplitude: f64) -> Vec<f64> {
    let s = k0 * k0 / (amplitude * amplitude);
    raw.iter().map(|x| x * s).collect()
}

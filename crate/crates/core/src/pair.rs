//! Two driven oscillators, each mixed with its own reservoir.
//!
//! In the Heisenberg picture
//!
//! ```text
//! a₁(t) = p a₁(0) + u a₂(0) + q b(0) + h c(0) + f₁(t)
//! a₂(t) = p a₂(0) + u a₁(0) + q c(0) + h b(0) + f₂(t)
//! ```
//!
//! where `p, u, q, h` depend only on `ω₀t`, `kt` and the envelope, and
//! `f₁, f₂` are the coherent responses to the drive.

use num_complex::Complex64;

use crate::error::{check_time, Error, Result};
use crate::params::{DampingEnvelope, SystemParams};
use crate::quadrature::{integrate, QuadratureConfig};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeCoefficients {
    pub p: Complex64,
    pub u: Complex64,
    pub q: Complex64,
    pub h: Complex64,
}

impl ModeCoefficients {
    /// `|p|² + |u|² + |q|² + |h|²`; equals 1 when the commutators are preserved.
    pub fn norm_sqr(&self) -> f64 {
        self.p.norm_sqr() + self.u.norm_sqr() + self.q.norm_sqr() + self.h.norm_sqr()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveResponse {
    pub f1: Complex64,
    pub f2: Complex64,
}

/// Mean occupations `⟨a†ᵢaᵢ⟩`, i.e. energies in units of `ħω₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairEnergies {
    pub e1: f64,
    pub e2: f64,
}

impl PairEnergies {
    /// Energies in units of `F²/k²` (multiply by `k²/F²`).
    pub fn scaled(&self, k: f64, amplitude: f64) -> PairEnergies {
        let s = k * k / (amplitude * amplitude);
        PairEnergies { e1: self.e1 * s, e2: self.e2 * s }
    }
}

pub fn mode_coefficients(params: &SystemParams, env: &DampingEnvelope, t: f64) -> Result<ModeCoefficients> {
    let (cos_g, sin_g) = env.eval(t)?;
    let phase = (-I * params.omega0 * t).exp();
    let (ckt, skt) = ((params.k * t).cos(), (params.k * t).sin());
    Ok(ModeCoefficients {
        p: phase * cos_g * ckt,
        u: -I * phase * cos_g * skt,
        q: -I * phase * sin_g * ckt,
        h: -phase * sin_g * skt,
    })
}

/// Highest angular frequency in the drive integrands once `e^{−iω₀t}` has
/// been factored out.
pub(crate) fn integrand_frequency(params: &SystemParams, env: &DampingEnvelope, extra: f64) -> f64 {
    params.detuning().abs() + extra + env.rate_bound() + params.drive.bandwidth()
}

/// `f₁(t), f₂(t)`:
///
/// ```text
/// f₁ = −i e^{−iω₀t} ∫₀ᵗ e^{iΔt′} cos[k(t−t′)] cos[G(t)−G(t′)] f(t′) dt′
/// f₂ =  −e^{−iω₀t} ∫₀ᵗ e^{iΔt′} sin[k(t−t′)] cos[G(t)−G(t′)] f(t′) dt′
/// ```
pub fn drive_response(
    params: &SystemParams,
    env: &DampingEnvelope,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<DriveResponse> {
    check_time(t)?;
    let zero = Complex64::new(0.0, 0.0);
    if params.drive.is_zero() || t == 0.0 {
        return Ok(DriveResponse { f1: zero, f2: zero });
    }
    let delta = params.detuning();
    let k = params.k;
    let (cos_g, sin_g) = env.eval_unchecked(t);
    let integrand = |tp: f64| {
        let (cp, sp) = env.eval_unchecked(tp);
        let weight = params.drive.amplitude(tp) * (cos_g * cp + sin_g * sp);
        let carrier = Complex64::from_polar(weight, delta * tp);
        let arg = k * (t - tp);
        [carrier * arg.cos(), carrier * arg.sin()]
    };
    let freq = integrand_frequency(params, env, k);
    let integral = integrate(integrand, 0.0, t, freq, cfg).map_err(|source| Error::Quadrature { time: t, source })?;
    let phase = (-I * params.omega0 * t).exp();
    Ok(DriveResponse { f1: -I * phase * integral.value[0], f2: -phase * integral.value[1] })
}

pub fn pair_energies(
    params: &SystemParams,
    env: &DampingEnvelope,
    init_n1: f64,
    init_n2: f64,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<PairEnergies> {
    if !(init_n1 >= 0.0 && init_n2 >= 0.0) {
        return Err(Error::invalid("initial occupation", "must be non-negative"));
    }
    let (cos_g, sin_g) = env.eval(t)?;
    let drive = drive_response(params, env, t, cfg)?;
    let (c2, s2) = (cos_g * cos_g, sin_g * sin_g);
    let (ck2, sk2) = ((params.k * t).cos().powi(2), (params.k * t).sin().powi(2));
    let e1 = c2 * ck2 * init_n1 + c2 * sk2 * init_n2 + s2 * ck2 * params.nbar_b + s2 * sk2 * params.nbar_c
        + drive.f1.norm_sqr();
    let e2 = c2 * ck2 * init_n2 + c2 * sk2 * init_n1 + s2 * ck2 * params.nbar_c + s2 * sk2 * params.nbar_b
        + drive.f2.norm_sqr();
    Ok(PairEnergies { e1, e2 })
}

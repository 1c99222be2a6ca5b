//! Physical configuration shared by every other module: system parameters,
//! the classical drive, and the damping envelope `(cos G(t), sin G(t))`.

use std::fmt;
use std::sync::Arc;

use crate::error::{check_time, Error, Result};
use crate::quadrature::{integrate, QuadratureConfig};

pub type TimeFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Amplitude `f(t)` of the classical drive `f(t)(e^{-iω_L t} a₁† + h.c.)`.
#[derive(Clone)]
pub enum DriveSpec {
    Constant(f64),
    /// Arbitrary amplitude. `bandwidth` bounds the angular frequencies present
    /// in `f(t)` and widens the quadrature panel cap accordingly.
    Schedule { amplitude: TimeFn, bandwidth: f64 },
}

impl DriveSpec {
    pub fn schedule(amplitude: impl Fn(f64) -> f64 + Send + Sync + 'static, bandwidth: f64) -> Self {
        DriveSpec::Schedule { amplitude: Arc::new(amplitude), bandwidth }
    }

    pub fn amplitude(&self, t: f64) -> f64 {
        match self {
            DriveSpec::Constant(f) => *f,
            DriveSpec::Schedule { amplitude, .. } => amplitude(t),
        }
    }

    pub fn bandwidth(&self) -> f64 {
        match self {
            DriveSpec::Constant(_) => 0.0,
            DriveSpec::Schedule { bandwidth, .. } => bandwidth.abs(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, DriveSpec::Constant(f) if *f == 0.0)
    }

    /// The constant amplitude `F`, if the drive has one.
    pub fn constant(&self) -> Option<f64> {
        match self {
            DriveSpec::Constant(f) => Some(*f),
            DriveSpec::Schedule { .. } => None,
        }
    }
}

impl fmt::Debug for DriveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DriveSpec::Constant(v) => f.debug_tuple("Constant").field(v).finish(),
            DriveSpec::Schedule { bandwidth, .. } => {
                f.debug_struct("Schedule").field("bandwidth", bandwidth).finish_non_exhaustive()
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct SystemParams {
    pub omega0: f64,
    /// Inter-oscillator coupling (`k₀` for chains).
    pub k: f64,
    pub omega_l: f64,
    pub drive: DriveSpec,
    pub nbar_b: f64,
    pub nbar_c: f64,
    pub chain_size: usize,
}

impl SystemParams {
    /// Two oscillators with zero-temperature reservoirs.
    pub fn pair(omega0: f64, k: f64, omega_l: f64, drive: DriveSpec) -> Self {
        SystemParams { omega0, k, omega_l, drive, nbar_b: 0.0, nbar_c: 0.0, chain_size: 2 }
    }

    pub fn chain(n: usize, omega0: f64, k0: f64, omega_l: f64, drive: DriveSpec) -> Self {
        SystemParams { chain_size: n, ..Self::pair(omega0, k0, omega_l, drive) }
    }

    pub fn with_baths(mut self, nbar_b: f64, nbar_c: f64) -> Self {
        self.nbar_b = nbar_b;
        self.nbar_c = nbar_c;
        self
    }

    /// `Δ = ω₀ − ω_L`.
    pub fn detuning(&self) -> f64 {
        self.omega0 - self.omega_l
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega0 > 0.0 && self.omega0.is_finite()) {
            return Err(Error::invalid("omega0", format!("must be positive, got {}", self.omega0)));
        }
        if !(self.k >= 0.0 && self.k.is_finite()) {
            return Err(Error::invalid("k", format!("must be non-negative, got {}", self.k)));
        }
        if !self.omega_l.is_finite() {
            return Err(Error::invalid("omega_l", "must be finite"));
        }
        for (name, v) in [("nbar_b", self.nbar_b), ("nbar_c", self.nbar_c)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, format!("must be non-negative, got {v}")));
            }
        }
        if self.chain_size < 1 {
            return Err(Error::invalid("chain_size", "must be at least 1"));
        }
        if let DriveSpec::Constant(f) = self.drive {
            if !f.is_finite() {
                return Err(Error::invalid("drive", "amplitude must be finite"));
            }
        }
        Ok(())
    }
}

/// Bose–Einstein occupation `1/(e^{ω₀/T} − 1)` with `ħ = k_B = 1`.
pub fn bose_einstein_occupation(temperature: f64, omega0: f64) -> f64 {
    if temperature <= 0.0 {
        0.0
    } else {
        1.0 / (omega0 / temperature).exp_m1()
    }
}

/// The pair `(cos G(t), sin G(t))` with `G(t) = ∫₀ᵗ g`.
#[derive(Clone)]
pub enum DampingEnvelope {
    /// `G(t) = g₀ t`. `ConstantG(0.0)` switches the reservoirs off.
    ConstantG(f64),
    /// `cos G(t) = e^{−γt/2}`, `sin G(t) = +√(1 − e^{−γt})`.
    Markovian(f64),
    /// Arbitrary coupling schedule `g(t)`. `G` is obtained from `integral`
    /// when supplied, otherwise by quadrature of `rate`.
    Schedule { rate: TimeFn, integral: Option<TimeFn>, rate_bound: f64 },
}

impl fmt::Debug for DampingEnvelope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DampingEnvelope::ConstantG(g) => f.debug_tuple("ConstantG").field(g).finish(),
            DampingEnvelope::Markovian(gamma) => f.debug_tuple("Markovian").field(gamma).finish(),
            DampingEnvelope::Schedule { integral, rate_bound, .. } => f
                .debug_struct("Schedule")
                .field("closed_form_integral", &integral.is_some())
                .field("rate_bound", rate_bound)
                .finish_non_exhaustive(),
        }
    }
}

impl DampingEnvelope {
    pub fn none() -> Self {
        DampingEnvelope::ConstantG(0.0)
    }

    pub fn schedule(rate: impl Fn(f64) -> f64 + Send + Sync + 'static, rate_bound: f64) -> Self {
        DampingEnvelope::Schedule { rate: Arc::new(rate), integral: None, rate_bound }
    }

    pub fn schedule_with_integral(
        rate: impl Fn(f64) -> f64 + Send + Sync + 'static,
        integral: impl Fn(f64) -> f64 + Send + Sync + 'static,
        rate_bound: f64,
    ) -> Self {
        DampingEnvelope::Schedule { rate: Arc::new(rate), integral: Some(Arc::new(integral)), rate_bound }
    }

    /// `g(t) = g₀ e^{−t/τ}` with `G(t) = g₀τ(1 − e^{−t/τ})`.
    pub fn exponential(g0: f64, tau: f64) -> Self {
        Self::schedule_with_integral(
            move |t| g0 * (-t / tau).exp(),
            move |t| -g0 * tau * (-t / tau).exp_m1(),
            g0.abs(),
        )
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DampingEnvelope::ConstantG(g) if !g.is_finite() => Err(Error::invalid("g0", "must be finite")),
            DampingEnvelope::Markovian(gamma) if !(*gamma >= 0.0 && gamma.is_finite()) => {
                Err(Error::invalid("gamma", format!("must be non-negative, got {gamma}")))
            }
            DampingEnvelope::Schedule { rate_bound, .. } if !rate_bound.is_finite() => {
                Err(Error::invalid("rate_bound", "must be finite"))
            }
            _ => Ok(()),
        }
    }

    /// Upper bound on how fast `G` winds; enters the quadrature panel cap.
    pub fn rate_bound(&self) -> f64 {
        match self {
            DampingEnvelope::ConstantG(g) => g.abs(),
            DampingEnvelope::Markovian(gamma) => gamma.abs(),
            DampingEnvelope::Schedule { rate_bound, .. } => rate_bound.abs(),
        }
    }

    /// `G(t)` itself. Defined for every mode; for the Markovian envelope it is
    /// `arccos(e^{−γt/2}) ∈ [0, π/2)`.
    pub fn phase(&self, t: f64) -> f64 {
        match self {
            DampingEnvelope::ConstantG(g) => g * t,
            DampingEnvelope::Markovian(gamma) => (-0.5 * gamma * t).exp().acos(),
            DampingEnvelope::Schedule { rate, integral, rate_bound } => match integral {
                Some(big_g) => big_g(t),
                None => {
                    let cfg = QuadratureConfig::with_tolerance(1e-13);
                    match integrate(|s| rate(s), 0.0, t, rate_bound.abs(), &cfg) {
                        Ok(i) => i.value,
                        Err(crate::quadrature::QuadratureError::NotConverged { estimate, .. }) => estimate[0].re,
                        Err(_) => f64::NAN,
                    }
                }
            },
        }
    }

    /// Coupling rate `g(t) = dG/dt`. Diverges as `t → 0⁺` for the Markovian
    /// envelope.
    pub fn rate(&self, t: f64) -> f64 {
        match self {
            DampingEnvelope::ConstantG(g) => *g,
            DampingEnvelope::Markovian(gamma) => {
                let decay = (-gamma * t).exp();
                0.5 * gamma * decay.sqrt() / (-(-gamma * t).exp_m1()).sqrt()
            }
            DampingEnvelope::Schedule { rate, .. } => rate(t),
        }
    }

    /// `(cos G(t), sin G(t))`.
    pub fn eval(&self, t: f64) -> Result<(f64, f64)> {
        check_time(t)?;
        Ok(self.eval_unchecked(t))
    }

    pub(crate) fn eval_unchecked(&self, t: f64) -> (f64, f64) {
        match self {
            DampingEnvelope::Markovian(gamma) => {
                let c = (-0.5 * gamma * t).exp();
                // 1 − e^{−γt} via expm1 keeps precision for small γt.
                let s = (-(-gamma * t).exp_m1()).max(0.0).sqrt();
                (c, s)
            }
            _ => {
                let big_g = self.phase(t);
                (big_g.cos(), big_g.sin())
            }
        }
    }

    /// `cos[G(t) − G(t′)]`, expanded as `cos G cos G′ + sin G sin G′` so the
    /// Markovian substitution carries over.
    pub fn cos_phase_difference(&self, t: f64, t_prime: f64) -> f64 {
        match self {
            DampingEnvelope::ConstantG(g) => (g * (t - t_prime)).cos(),
            _ => {
                let (c, s) = self.eval_unchecked(t);
                let (cp, sp) = self.eval_unchecked(t_prime);
                c * cp + s * sp
            }
        }
    }
}

/// `(cos G(t), sin G(t))` for `t ≥ 0`.
pub fn envelope_eval(env: &DampingEnvelope, t: f64) -> Result<(f64, f64)> {
    env.eval(t)
}

/// `σ_t = 1 + n̄ sin² G(t)`.
pub fn effective_occupation(nbar: f64, env: &DampingEnvelope, t: f64) -> Result<f64> {
    if !(nbar >= 0.0) {
        return Err(Error::invalid("nbar", format!("must be non-negative, got {nbar}")));
    }
    let (_, s) = env.eval(t)?;
    Ok(1.0 + nbar * s * s)
}

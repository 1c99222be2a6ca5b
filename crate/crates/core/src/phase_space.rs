//! Husimi functions, reduced density matrices and photon-number
//! distributions of the driven pair.
//!
//! Both reservoirs are taken to share one occupation `n̄`, which enters only
//! through `σ_t = 1 + n̄ sin² G(t)`. Two families of initial states are
//! covered: product coherent states `|α₀⟩|β₀⟩`, and `|N⟩ ⊗ |0⟩`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{check_time, Error, Result};
use crate::pair::{drive_response, mode_coefficients};
use crate::params::{effective_occupation, DampingEnvelope, SystemParams};
use crate::quadrature::QuadratureConfig;
use crate::special::{ln_factorials, log_sum_exp, scaled_laguerre};

pub use crate::special::laguerre;

use std::f64::consts::PI;

/// Below this, `σ − 1`, `e(t)` and `n̄ sin²G` are treated as exactly zero.
const DEGENERATE: f64 = 1e-12;
/// Missing trace above which a [`DensityMatrix`] carries a warning.
const TAIL_WARNING: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub alpha1: Complex64,
    pub alpha2: Complex64,
}

impl PhasePoint {
    pub fn new(alpha1: Complex64, alpha2: Complex64) -> Self {
        PhasePoint { alpha1, alpha2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CoherentInit {
    pub alpha0: Complex64,
    pub beta0: Complex64,
}

impl CoherentInit {
    pub fn new(alpha0: Complex64, beta0: Complex64) -> Self {
        CoherentInit { alpha0, beta0 }
    }

    pub fn vacuum() -> Self {
        Self::default()
    }
}

/// Density matrix in a truncated number basis. For several modes the basis
/// is the mixed-radix product of `mode_dims`, first mode most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: DMatrix<Complex64>,
    mode_dims: Vec<usize>,
    truncated_mass: Option<f64>,
}

impl DensityMatrix {
    /// Wraps a square matrix over the given modes. Panics if the product of
    /// `mode_dims` differs from the matrix size.
    pub fn from_matrix(entries: DMatrix<Complex64>, mode_dims: Vec<usize>) -> Self {
        assert!(entries.is_square(), "density matrix must be square");
        assert_eq!(mode_dims.iter().product::<usize>(), entries.nrows(), "mode dims do not match matrix size");
        let mut rho = DensityMatrix { entries, mode_dims, truncated_mass: None };
        let missing = 1.0 - rho.trace();
        if missing > TAIL_WARNING {
            rho.truncated_mass = Some(missing);
        }
        rho
    }

    pub fn single_mode(entries: DMatrix<Complex64>) -> Self {
        let dim = entries.nrows();
        Self::from_matrix(entries, vec![dim])
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn mode_dims(&self) -> &[usize] {
        &self.mode_dims
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn get(&self, m: usize, n: usize) -> Complex64 {
        self.entries[(m, n)]
    }

    pub fn trace(&self) -> f64 {
        self.entries.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn purity(&self) -> f64 {
        // tr ρ² = Σ |ρ_mn|² for Hermitian ρ
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Largest `|ρ_mn − conj(ρ_nm)|`.
    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.entries[(i, j)] - self.entries[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// `Some(1 − tr ρ)` when the basis cut off more than `1e-8` of the mass.
    pub fn truncation_warning(&self) -> Option<f64> {
        self.truncated_mass
    }
}

/// `(ν₁, ν₂)`: centres of the coherent-state Husimi function.
pub fn maxima_trajectory(
    params: &SystemParams,
    env: &DampingEnvelope,
    init: CoherentInit,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<(Complex64, Complex64)> {
    let c = mode_coefficients(params, env, t)?;
    let f = drive_response(params, env, t, cfg)?;
    Ok((f.f1 + c.p * init.alpha0 + c.u * init.beta0, f.f2 + c.u * init.alpha0 + c.p * init.beta0))
}

/// Everything the coherent-state Husimi function needs at one time, so a
/// phase-space grid costs one drive integral instead of one per point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentQContext {
    pub nu1: Complex64,
    pub nu2: Complex64,
    pub sigma_t: f64,
}

impl CoherentQContext {
    pub fn new(
        params: &SystemParams,
        env: &DampingEnvelope,
        init: CoherentInit,
        nbar: f64,
        t: f64,
        cfg: &QuadratureConfig,
    ) -> Result<Self> {
        let sigma_t = effective_occupation(nbar, env, t)?;
        let (nu1, nu2) = maxima_trajectory(params, env, init, t, cfg)?;
        Ok(CoherentQContext { nu1, nu2, sigma_t })
    }

    /// Single-oscillator factor `(1/πσ) e^{−|ν_i − α|²/σ}`; `site` is 1 or 2.
    pub fn site(&self, site: usize, alpha: Complex64) -> f64 {
        let nu = if site == 1 { self.nu1 } else { self.nu2 };
        (-(nu - alpha).norm_sqr() / self.sigma_t).exp() / (PI * self.sigma_t)
    }

    pub fn q(&self, point: PhasePoint) -> f64 {
        let s = self.sigma_t;
        let eta = (self.nu1 - point.alpha1).norm_sqr() + (self.nu2 - point.alpha2).norm_sqr();
        (-eta / s).exp() / (PI * PI * s * s)
    }
}

pub fn husimi_coherent(
    params: &SystemParams,
    env: &DampingEnvelope,
    init: CoherentInit,
    nbar: f64,
    t: f64,
    point: PhasePoint,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    Ok(CoherentQContext::new(params, env, init, nbar, t, cfg)?.q(point))
}

/// Reduced density matrix of a displaced thermal state with centre `r_t`
/// and `σ_t = 1 + n̄ sin²G`, in the basis `|0⟩ … |dim−1⟩`.
///
/// For `n ≥ m`
///
/// ```text
/// ρ_mn = √(n!/m!) e^{−|r|²/σ} r̄^{n−m} / σ^{n+1}
///        · Σ_{k=0}^{m} C(m,k) (σ−1)^{m−k} (|r|²/σ)^k / (n−m+k)!
/// ```
///
/// evaluated in log space; the other triangle follows from Hermiticity.
pub fn reduced_density_matrix(r_t: Complex64, sigma_t: f64, dim: usize) -> Result<DensityMatrix> {
    if !(sigma_t >= 1.0 && sigma_t.is_finite()) {
        return Err(Error::invalid("sigma_t", format!("must be at least 1, got {sigma_t}")));
    }
    if dim == 0 {
        return Err(Error::invalid("dim", "must be at least 1"));
    }
    if !(r_t.re.is_finite() && r_t.im.is_finite()) {
        return Err(Error::invalid("r_t", "must be finite"));
    }
    let lf = ln_factorials(2 * dim);
    let r2 = r_t.norm_sqr();
    let ln_r = r_t.norm().ln();
    let arg = r_t.arg();
    let thermal = sigma_t - 1.0;
    let pure = thermal < DEGENERATE;
    let ln_thermal = thermal.ln();
    let ln_sigma = sigma_t.ln();
    // p·ln x with the convention 0·ln 0 = 0
    let pow_ln = |ln_x: f64, p: usize| if p == 0 { 0.0 } else { p as f64 * ln_x };

    let mut rho = DMatrix::<Complex64>::zeros(dim, dim);
    let mut terms = Vec::with_capacity(dim);
    for m in 0..dim {
        for n in m..dim {
            let d = n - m;
            let ln_abs = if pure {
                // coherent state: r^m r̄^n e^{−|r|²}/√(m!n!)
                pow_ln(ln_r, m + n) - r2 - 0.5 * (lf[m] + lf[n])
            } else {
                terms.clear();
                for k in 0..=m {
                    let ln_binom = lf[m] - lf[k] - lf[m - k];
                    terms.push(
                        ln_binom + pow_ln(ln_thermal, m - k) + pow_ln(ln_r, 2 * k) - k as f64 * ln_sigma - lf[d + k],
                    );
                }
                0.5 * (lf[n] - lf[m]) - r2 / sigma_t - (n + 1) as f64 * ln_sigma + pow_ln(ln_r, d)
                    + log_sum_exp(&terms)
            };
            // phase of r^m r̄^n
            let value = Complex64::from_polar(ln_abs.exp(), -(d as f64) * arg);
            rho[(m, n)] = value;
            rho[(n, m)] = value.conj();
        }
    }
    Ok(DensityMatrix::single_mode(rho))
}

/// `P_n = e^{−|r|²/σ} sⁿ L_n(−|r|²/(sσ)) / σ^{n+1}` with `s = n̄ sin²G`,
/// `σ = 1 + s`. As `s → 0` this is the Poisson distribution.
pub fn populations(r_t: Complex64, nbar: f64, env: &DampingEnvelope, t: f64, n: usize) -> Result<f64> {
    let sigma = effective_occupation(nbar, env, t)?;
    let s = sigma - 1.0;
    let r2 = r_t.norm_sqr();
    Ok((-r2 / sigma).exp() * scaled_laguerre(n, s, r2 / sigma) / sigma.powi(n as i32 + 1))
}

/// Time-dependent quantities shared by all number-state Husimi functions.
/// `w(t)` depends on the phase point and is produced by [`NumberQContext::w`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumberQContext {
    /// `e(t) = 1 − cos²G/σ_t`.
    pub e_t: f64,
    pub sigma_t: f64,
    pub f1: Complex64,
    pub f2: Complex64,
    pub mu1: Complex64,
    pub mu2: Complex64,
}

impl NumberQContext {
    pub fn new(
        params: &SystemParams,
        env: &DampingEnvelope,
        nbar: f64,
        t: f64,
        cfg: &QuadratureConfig,
    ) -> Result<Self> {
        check_time(t)?;
        let sigma_t = effective_occupation(nbar, env, t)?;
        let c = mode_coefficients(params, env, t)?;
        let f = drive_response(params, env, t, cfg)?;
        let e_t = (1.0 - (c.p.norm_sqr() + c.u.norm_sqr()) / sigma_t).max(0.0);
        Ok(NumberQContext { e_t, sigma_t, f1: f.f1, f2: f.f2, mu1: c.p, mu2: c.u })
    }

    /// `w = [(α₁ − f₁) μ̄₁ + (α₂ − f₂) μ̄₂] / σ_t`.
    pub fn w(&self, point: PhasePoint) -> Complex64 {
        ((point.alpha1 - self.f1) * self.mu1.conj() + (point.alpha2 - self.f2) * self.mu2.conj()) / self.sigma_t
    }

    fn gaussian(&self, point: PhasePoint) -> f64 {
        let s = self.sigma_t;
        let eta = (self.f1 - point.alpha1).norm_sqr() + (self.f2 - point.alpha2).norm_sqr();
        (-eta / s).exp() / (PI * PI * s * s)
    }

    /// `Q_N(α₁, α₂) = Gaussian · e^N L_N(−|w|²/e)`.
    pub fn q(&self, n: usize, point: PhasePoint) -> f64 {
        let e = if self.e_t < DEGENERATE { 0.0 } else { self.e_t };
        self.gaussian(point) * scaled_laguerre(n, e, self.w(point).norm_sqr())
    }

    /// `Q_y = Σ_N yᴺ Q_N = Gaussian · exp(y|w|²/(1 − ye)) / (1 − ye)`, for
    /// `|y e| < 1`.
    pub fn generating(&self, y: f64, point: PhasePoint) -> f64 {
        let d = 1.0 - y * self.e_t;
        self.gaussian(point) * (y * self.w(point).norm_sqr() / d).exp() / d
    }

    /// `Q_y` integrated over `α₁`:
    ///
    /// ```text
    /// Q_y^red = e^{−|η₂|²/σ} / (π A) · exp(|μ₂|² |η₂|² y / (σ A)),
    /// A(y) = σ − y (σ − |μ₂|²),  η₂ = α₂ − f₂.
    /// ```
    pub fn reduced_generating(&self, y: f64, alpha2: Complex64) -> f64 {
        let s = self.sigma_t;
        let m2 = self.mu2.norm_sqr();
        let eta2 = (alpha2 - self.f2).norm_sqr();
        let a = s - y * (s - m2);
        (-eta2 / s).exp() / (PI * a) * (m2 * eta2 * y / (s * a)).exp()
    }

    /// Coefficient of `yᴺ` in [`Self::reduced_generating`]:
    /// `(1/πσ) e^{−|η₂|²/σ} ρᴺ L_N(−|μ₂|²|η₂|²/(σ²ρ))` with
    /// `ρ = 1 − |μ₂|²/σ`.
    pub fn q_reduced(&self, n: usize, alpha2: Complex64) -> f64 {
        let s = self.sigma_t;
        let m2 = self.mu2.norm_sqr();
        let eta2 = (alpha2 - self.f2).norm_sqr();
        let rho = (1.0 - m2 / s).max(0.0);
        let rho = if rho < DEGENERATE { 0.0 } else { rho };
        (-eta2 / s).exp() / (PI * s) * scaled_laguerre(n, rho, m2 * eta2 / (s * s))
    }
}

pub fn husimi_number(
    params: &SystemParams,
    env: &DampingEnvelope,
    n: usize,
    nbar: f64,
    t: f64,
    point: PhasePoint,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    Ok(NumberQContext::new(params, env, nbar, t, cfg)?.q(n, point))
}

pub fn husimi_number_reduced(
    params: &SystemParams,
    env: &DampingEnvelope,
    n: usize,
    nbar: f64,
    t: f64,
    alpha2: Complex64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    Ok(NumberQContext::new(params, env, nbar, t, cfg)?.q_reduced(n, alpha2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::DriveSpec;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn laguerre_examples() {
        assert_eq!(laguerre(0, 3.3), 1.0);
        assert_eq!(laguerre(1, 0.4), 0.6);
        assert_abs_diff_eq!(laguerre(2, 2.0), -1.0, epsilon = 1e-15);
    }

    #[test]
    fn maxima_at_origin_and_swap() {
        let init = CoherentInit::new(c(0.5, -1.0), c(0.2, 0.3));
        let p = SystemParams::pair(2.0, 0.7, 1.5, DriveSpec::Constant(0.4));
        let (n1, n2) = maxima_trajectory(&p, &DampingEnvelope::ConstantG(0.1), init, 0.0, &cfg()).unwrap();
        assert_eq!((n1, n2), (init.alpha0, init.beta0));

        let p = SystemParams::pair(2.0, 0.7, 1.5, DriveSpec::Constant(0.0));
        let init = CoherentInit::new(c(1.1, 0.4), Complex64::new(0.0, 0.0));
        let t = 3.2;
        let (_, n2) = maxima_trajectory(&p, &DampingEnvelope::none(), init, t, &cfg()).unwrap();
        let expected = -Complex64::i() * (-Complex64::i() * 2.0 * t).exp() * (0.7 * t).sin() * init.alpha0;
        assert_abs_diff_eq!((n2 - expected).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn coherent_peak_and_initial_values() {
        let p = SystemParams::pair(1.0, 0.6, 1.3, DriveSpec::Constant(0.5));
        let env = DampingEnvelope::ConstantG(0.2);
        let init = CoherentInit::new(c(0.3, 0.1), c(-0.4, 0.2));
        let ctx = CoherentQContext::new(&p, &env, init, 0.0, 2.0, &cfg()).unwrap();
        assert_abs_diff_eq!(ctx.q(PhasePoint::new(ctx.nu1, ctx.nu2)), 1.0 / (PI * PI), epsilon = 1e-15);

        let point = PhasePoint::new(c(1.0, 0.0), c(0.0, -1.0));
        let q0 = husimi_coherent(&p, &env, init, 1.7, 0.0, point, &cfg()).unwrap();
        let expected = (-(init.alpha0 - point.alpha1).norm_sqr() - (init.beta0 - point.alpha2).norm_sqr()).exp()
            / (PI * PI);
        assert_abs_diff_eq!(q0, expected, epsilon = 1e-15);
    }

    #[test]
    fn coherent_factorizes() {
        let p = SystemParams::pair(1.0, 0.6, 0.8, DriveSpec::Constant(0.9));
        let env = DampingEnvelope::Markovian(0.4);
        let ctx = CoherentQContext::new(&p, &env, CoherentInit::new(c(1.0, 1.0), c(0.0, 0.5)), 1.2, 3.0, &cfg())
            .unwrap();
        for (a1, a2) in [(c(0.0, 0.0), c(1.0, -1.0)), (c(-2.0, 0.5), c(0.3, 0.3))] {
            let full = ctx.q(PhasePoint::new(a1, a2));
            let product = ctx.site(1, a1) * ctx.site(2, a2);
            assert!((full - product).abs() <= 1e-12 * full.max(1e-300));
        }
    }

    #[test]
    fn density_matrix_pure_limit() {
        let r = c(0.8, -0.5);
        let rho = reduced_density_matrix(r, 1.0, 30).unwrap();
        assert_abs_diff_eq!(rho.purity(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rho.trace(), 1.0, epsilon = 1e-12);
        assert!(rho.truncation_warning().is_none());
        let expected = r * r.conj() * r.conj() * (-r.norm_sqr()).exp() / 2f64.sqrt();
        assert_abs_diff_eq!((rho.get(1, 2) - expected).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn density_matrix_thermal_diagonal() {
        let sigma: f64 = 1.6;
        let rho = reduced_density_matrix(Complex64::new(0.0, 0.0), sigma, 60).unwrap();
        for m in 0..60 {
            for n in 0..60 {
                let expected = if m == n { (sigma - 1.0).powi(n as i32) / sigma.powi(n as i32 + 1) } else { 0.0 };
                assert_abs_diff_eq!(rho.get(m, n).re, expected, epsilon = 1e-15);
                assert_eq!(rho.get(m, n).im, 0.0);
            }
        }
    }

    #[test]
    fn density_matrix_truncation_warning() {
        let rho = reduced_density_matrix(c(3.0, 0.0), 1.0, 5).unwrap();
        assert!(rho.truncation_warning().unwrap() > 0.5);
        assert!(reduced_density_matrix(c(0.0, 0.0), 0.5, 5).is_err());
        assert!(reduced_density_matrix(c(0.0, 0.0), 1.0, 0).is_err());
    }

    #[test]
    fn density_matrix_large_dim_is_finite() {
        let rho = reduced_density_matrix(c(4.0, 3.0), 2.5, 200).unwrap();
        assert!(rho.entries().iter().all(|z| z.re.is_finite() && z.im.is_finite()));
        assert_abs_diff_eq!(rho.trace(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn populations_limits() {
        let env = DampingEnvelope::Markovian(1.0);
        let t = 50.0; // sin²G = 1 to double precision
        let s: f64 = 0.7;
        for n in 0..10 {
            let p = populations(Complex64::new(0.0, 0.0), s, &env, t, n).unwrap();
            assert_abs_diff_eq!(p, s.powi(n as i32) / (1.0 + s).powi(n as i32 + 1), epsilon = 1e-15);
        }
        let r = c(1.2, 0.5);
        let mut fact = 1.0;
        for n in 0..10 {
            if n > 0 {
                fact *= n as f64;
            }
            let p = populations(r, 0.0, &env, t, n).unwrap();
            let poisson = r.norm_sqr().powi(n as i32) * (-r.norm_sqr()).exp() / fact;
            assert_abs_diff_eq!(p, poisson, epsilon = 1e-15);
        }
    }

    #[test]
    fn number_state_zero_is_vacuum_coherent() {
        let p = SystemParams::pair(1.0, 0.5, 1.2, DriveSpec::Constant(0.7));
        let env = DampingEnvelope::ConstantG(0.3);
        let point = PhasePoint::new(c(0.2, -0.1), c(-0.5, 0.4));
        let t = 2.5;
        let qn = husimi_number(&p, &env, 0, 0.8, t, point, &cfg()).unwrap();
        let qc = husimi_coherent(&p, &env, CoherentInit::vacuum(), 0.8, t, point, &cfg()).unwrap();
        assert_abs_diff_eq!(qn, qc, epsilon = 1e-15);
    }

    #[test]
    fn single_photon_swap() {
        let k = 0.5;
        let omega0 = 1.3;
        let p = SystemParams::pair(omega0, k, 1.0, DriveSpec::Constant(0.0));
        let env = DampingEnvelope::none();
        for t in [0.4, PI / (2.0 * k), 5.0] {
            let ctx = NumberQContext::new(&p, &env, 0.0, t, &cfg()).unwrap();
            assert!(ctx.e_t < 1e-15);
            let point = PhasePoint::new(c(0.3, 0.9), c(-0.7, 0.2));
            let phase = Complex64::from_polar(1.0, omega0 * t);
            let amp = point.alpha1 * (k * t).cos() * phase + Complex64::i() * point.alpha2 * (k * t).sin() * phase;
            let expected = (-point.alpha1.norm_sqr() - point.alpha2.norm_sqr()).exp() * amp.norm_sqr() / (PI * PI);
            assert_abs_diff_eq!(ctx.q(1, point), expected, epsilon = 1e-15);
        }
    }

    #[test]
    fn reduced_single_photon_examples() {
        let k = 1.0;
        let p = SystemParams::pair(2.0, k, 1.0, DriveSpec::Constant(0.0));
        let env = DampingEnvelope::none();
        let a2 = c(0.6, -0.8);
        for t in [0.0, PI / 2.0, 1.1] {
            let q = husimi_number_reduced(&p, &env, 1, 0.0, t, a2, &cfg()).unwrap();
            let expected = (-a2.norm_sqr()).exp() / PI
                * (a2.norm_sqr() * (k * t).sin().powi(2) + (k * t).cos().powi(2));
            assert_abs_diff_eq!(q, expected, epsilon = 1e-15);
        }
    }

    #[test]
    fn reduced_zero_photon_is_gaussian() {
        let p = SystemParams::pair(1.0, 0.4, 0.7, DriveSpec::Constant(0.3));
        let env = DampingEnvelope::Markovian(0.5);
        let ctx = NumberQContext::new(&p, &env, 0.9, 2.0, &cfg()).unwrap();
        let a2 = c(0.1, 0.2);
        let expected = (-(a2 - ctx.f2).norm_sqr() / ctx.sigma_t).exp() / (PI * ctx.sigma_t);
        assert_abs_diff_eq!(ctx.q_reduced(0, a2), expected, epsilon = 1e-15);
    }

    #[test]
    fn reduced_generating_series() {
        let p = SystemParams::pair(1.0, 0.8, 0.9, DriveSpec::Constant(0.6));
        let env = DampingEnvelope::ConstantG(0.35);
        let ctx = NumberQContext::new(&p, &env, 0.5, 1.7, &cfg()).unwrap();
        let a2 = c(0.4, -0.3);
        let y: f64 = 0.45;
        let series: f64 = (0..120).map(|n| y.powi(n as i32) * ctx.q_reduced(n, a2)).sum();
        assert_abs_diff_eq!(series, ctx.reduced_generating(y, a2), epsilon = 1e-14);
        let point = PhasePoint::new(c(-0.2, 0.1), a2);
        let series: f64 = (0..120).map(|n| y.powi(n as i32) * ctx.q(n, point)).sum();
        assert_abs_diff_eq!(series, ctx.generating(y, point), epsilon = 1e-14);
    }

    #[test]
    fn long_time_markovian_limit() {
        let gamma = 1.0;
        let t = 20.0; // e^{−γt} ≈ 2e−9
        let nbar = 0.6;
        let p = SystemParams::pair(1.0, 0.5, 1.0, DriveSpec::Constant(0.4));
        let env = DampingEnvelope::Markovian(gamma);
        let ctx = NumberQContext::new(&p, &env, nbar, t, &cfg()).unwrap();
        let s_inf = 1.0 + nbar;
        for n in 0..4 {
            for point in [PhasePoint::new(c(0.0, 0.0), c(0.5, 0.5)), PhasePoint::new(ctx.f1, ctx.f2)] {
                let eta = (point.alpha1 - ctx.f1).norm_sqr() + (point.alpha2 - ctx.f2).norm_sqr();
                let limit = (-eta / s_inf).exp() / (PI * PI * s_inf * s_inf);
                assert_abs_diff_eq!(ctx.q(n, point), limit, epsilon = 1e-6);
            }
        }
    }

    proptest! {
        #[test]
        fn diagonal_matches_populations(re in -2.0f64..2.0, im in -2.0f64..2.0, nbar in 0.0f64..3.0, t in 0.0f64..10.0) {
            let env = DampingEnvelope::Markovian(0.3);
            let r = Complex64::new(re, im);
            let sigma = effective_occupation(nbar, &env, t).unwrap();
            let rho = reduced_density_matrix(r, sigma, 25).unwrap();
            for n in 0..25 {
                let pn = populations(r, nbar, &env, t, n).unwrap();
                prop_assert!((rho.get(n, n).re - pn).abs() <= 1e-12);
            }
            prop_assert!(rho.hermiticity_residual() <= 1e-12);
        }

        #[test]
        fn number_q_positive(n in 0usize..6, a in -3.0f64..3.0, b in -3.0f64..3.0, t in 0.0f64..8.0, nbar in 0.0f64..2.0) {
            let p = SystemParams::pair(1.0, 0.7, 1.1, DriveSpec::Constant(0.5));
            let env = DampingEnvelope::ConstantG(0.25);
            let ctx = NumberQContext::new(&p, &env, nbar, t, &QuadratureConfig::default()).unwrap();
            let point = PhasePoint::new(Complex64::new(a, b), Complex64::new(b, -a));
            prop_assert!(ctx.q(n, point) >= 0.0);
            prop_assert!(ctx.e_t >= 0.0 && ctx.e_t < 1.0);
        }
    }
}

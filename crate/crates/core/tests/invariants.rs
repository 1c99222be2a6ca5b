use std::f64::consts::PI;

use osc_core::chain::{chain_excitations, chain_mode_evolution, chain_spectrum};
use osc_core::pair::{mode_coefficients, pair_energies};
use osc_core::phase_space::{
    maxima_trajectory, populations, reduced_density_matrix, CoherentInit, CoherentQContext, NumberQContext,
    PhasePoint,
};
use osc_core::quadrature::integrate;
use osc_core::{Complex64, DampingEnvelope, DriveSpec, QuadratureConfig, SystemParams};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn envelope(which: usize, g: f64) -> DampingEnvelope {
    match which {
        0 => DampingEnvelope::none(),
        1 => DampingEnvelope::ConstantG(g),
        2 => DampingEnvelope::Markovian(g + 0.05),
        _ => DampingEnvelope::exponential(g, 2.0),
    }
}

fn pair(k: f64, detuning: f64, f: f64) -> SystemParams {
    SystemParams::pair(7.0, k, 7.0 - detuning, DriveSpec::Constant(f))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn coherent_q_factorizes(
        k in 0.2f64..2.0, d in -2.0f64..2.0, f in 0.0f64..1.5, g in 0.0f64..1.0, which in 0usize..4,
        nbar in 0.0f64..2.0, t in 0.0f64..10.0,
        a in -3.0f64..3.0, b in -3.0f64..3.0, x in -3.0f64..3.0, y in -3.0f64..3.0,
    ) {
        let cfg = QuadratureConfig::default();
        let init = CoherentInit::new(c(0.4, -0.2), c(-0.6, 0.1));
        let ctx = CoherentQContext::new(&pair(k, d, f), &envelope(which, g), init, nbar, t, &cfg).unwrap();
        let (a1, a2) = (c(a, b), c(x, y));
        let joint = ctx.q(PhasePoint::new(a1, a2));
        let product = ctx.site(1, a1) * ctx.site(2, a2);
        prop_assert!((joint - product).abs() <= 1e-12 * joint.max(1e-300));
        prop_assert!(joint <= 1.0 / (PI * PI * ctx.sigma_t * ctx.sigma_t) * (1.0 + 1e-12));
    }

    #[test]
    fn density_matrix_is_a_state(
        re in -2.0f64..2.0, im in -2.0f64..2.0, s in 1.0f64..2.5,
    ) {
        let rho = reduced_density_matrix(c(re, im), s, 120).unwrap();
        prop_assert!(rho.truncation_warning().is_none());
        prop_assert!(rho.hermiticity_residual() <= 1e-14);
        prop_assert!((rho.trace() - 1.0).abs() <= 1e-8);
        // purity of a displaced thermal state is 1/(2σ − 1)
        prop_assert!((rho.purity() - 1.0 / (2.0 * s - 1.0)).abs() <= 1e-8);
    }

    #[test]
    fn populations_sum_to_one(
        re in -2.0f64..2.0, im in -2.0f64..2.0, nbar in 0.0f64..2.0, g in 0.0f64..1.0, t in 0.0f64..6.0,
    ) {
        let env = DampingEnvelope::ConstantG(g);
        let total: f64 = (0..80).map(|n| populations(c(re, im), nbar, &env, t, n).unwrap()).sum();
        prop_assert!((total - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn number_zero_is_vacuum_coherent(
        k in 0.2f64..2.0, d in -2.0f64..2.0, f in 0.0f64..1.5, g in 0.0f64..1.0, which in 0usize..4,
        nbar in 0.0f64..2.0, t in 0.0f64..8.0, a in -2.0f64..2.0, b in -2.0f64..2.0,
    ) {
        let cfg = QuadratureConfig::default();
        let (p, env) = (pair(k, d, f), envelope(which, g));
        let num = NumberQContext::new(&p, &env, nbar, t, &cfg).unwrap();
        let coh = CoherentQContext::new(&p, &env, CoherentInit::vacuum(), nbar, t, &cfg).unwrap();
        let pt = PhasePoint::new(c(a, b), c(b, -a));
        prop_assert!((num.q(0, pt) - coh.q(pt)).abs() <= 1e-14);
    }

    #[test]
    fn reduced_number_q_is_normalized(
        k in 0.2f64..2.0, d in -2.0f64..2.0, f in 0.0f64..1.0, g in 0.0f64..1.0,
        nbar in 0.0f64..2.0, t in 0.0f64..6.0, n in 0usize..5,
    ) {
        let cfg = QuadratureConfig::default();
        let ctx = NumberQContext::new(&pair(k, d, f), &DampingEnvelope::ConstantG(g), nbar, t, &cfg).unwrap();
        // radially symmetric about f₂
        let radial = |r: f64| 2.0 * PI * r * ctx.q_reduced(n, ctx.f2 + r);
        let total = integrate(radial, 0.0, 15.0, 1.0, &cfg).unwrap().value;
        prop_assert!((total - 1.0).abs() <= 1e-8);
    }

    #[test]
    fn two_site_chain_is_the_pair(
        k in 0.2f64..2.0, d in -2.0f64..2.0, f in 0.1f64..1.5, g in 0.0f64..1.0, t in 0.0f64..15.0,
    ) {
        let cfg = QuadratureConfig::default();
        let env = DampingEnvelope::ConstantG(g);
        let chain = SystemParams::chain(2, 7.0, k, 7.0 - d, DriveSpec::Constant(f));
        let n = chain_excitations(&chain, &env, t, &cfg).unwrap();
        let e = pair_energies(&pair(k, d, f), &env, 0.0, 0.0, t, &cfg).unwrap();
        prop_assert!((n[0] - e.e1).abs() <= 1e-9 * (1.0 + e.e1));
        prop_assert!((n[1] - e.e2).abs() <= 1e-9 * (1.0 + e.e2));
    }

    #[test]
    fn chain_propagator_is_unitary(
        n in 1usize..9, k0 in 0.0f64..2.0, g in 0.0f64..1.0, t in 0.0f64..30.0,
    ) {
        let cfg = QuadratureConfig::default();
        let p = SystemParams::chain(n, 5.0, k0, 5.0, DriveSpec::Constant(0.0));
        let ev = chain_mode_evolution(&p, &DampingEnvelope::ConstantG(g), t, &cfg).unwrap();
        let gram = &ev.u_tilde * ev.u_tilde.adjoint() + &ev.v_tilde * ev.v_tilde.adjoint();
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((gram[(i, j)] - want).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn spectrum_is_symmetric_about_omega0(n in 1usize..20, k0 in 0.0f64..3.0) {
        let spec = chain_spectrum(n, 4.0, k0);
        for i in 0..n {
            prop_assert!((spec.lambdas[i] - 4.0 + spec.lambdas[n - 1 - i] - 4.0).abs() <= 1e-12);
        }
    }
}

#[test]
fn maxima_follow_coefficients_without_drive() {
    let cfg = QuadratureConfig::default();
    let p = pair(0.8, 0.3, 0.0);
    let env = DampingEnvelope::ConstantG(0.2);
    let init = CoherentInit::new(c(1.0, 0.5), c(-0.3, 0.0));
    for t in [0.0, 0.7, 3.1, 9.0] {
        let m = mode_coefficients(&p, &env, t).unwrap();
        let (n1, n2) = maxima_trajectory(&p, &env, init, t, &cfg).unwrap();
        assert!((n1 - (m.p * init.alpha0 + m.u * init.beta0)).norm() < 1e-15);
        assert!((n2 - (m.u * init.alpha0 + m.p * init.beta0)).norm() < 1e-15);
    }
}

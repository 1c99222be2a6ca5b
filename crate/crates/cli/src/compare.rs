//! Closed forms against the mode-equation oracle on a scenario's time grid.

use osc_core::chain::chain_excitations;
use osc_core::pair::pair_energies;
use osc_oracle::{linear_mode_trajectory, StepConfig};
use rayon::prelude::*;

use crate::config::{Config, Kind, Scenario};
use crate::scenario::RunOptions;
use crate::Error;

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub scenario: String,
    pub variant: String,
    pub points: usize,
    pub max_deviation: f64,
    /// Time (dimensionless) at which the largest deviation occurred.
    pub worst_time: f64,
    pub tolerance: f64,
}

impl Comparison {
    pub fn passed(&self) -> bool {
        self.max_deviation <= self.tolerance
    }
}

fn oracle_step() -> StepConfig {
    StepConfig { phase_step: 1e-3, ..StepConfig::default() }
}

fn compare_scenario(s: &Scenario, opts: &RunOptions, tol: f64) -> Result<Vec<Comparison>, Error> {
    let env = s.envelope();
    let axis = s.output.time_axis();
    let n = s.system.chain_size;
    let mut initial = vec![0.0; 2 * n];
    if n == 2 {
        initial = vec![s.initial.n1, s.initial.n2, s.system.nbar_b, s.system.nbar_c];
    }
    s.variants()
        .into_par_iter()
        .map(|v| {
            let k = v.params.k;
            let times: Vec<f64> = axis.iter().map(|x| x / k).collect();
            let oracle = linear_mode_trajectory(&v.params, &env, &times, &oracle_step())
                .map_err(|source| Error::Oracle { scenario: s.name.clone(), source })?;
            let mut worst = (0.0f64, axis[0]);
            for ((x, t), state) in axis.iter().zip(&times).zip(&oracle) {
                let reference = state.occupations(&initial);
                let closed = if n == 2 {
                    let e = pair_energies(&v.params, &env, s.initial.n1, s.initial.n2, *t, &opts.quadrature)
                        .map_err(|source| Error::Compute { scenario: s.name.clone(), source })?;
                    vec![e.e1, e.e2]
                } else {
                    chain_excitations(&v.params, &env, *t, &opts.quadrature)
                        .map_err(|source| Error::Compute { scenario: s.name.clone(), source })?
                };
                for (a, b) in closed.iter().zip(&reference) {
                    let d = (a - b).abs();
                    if d > worst.0 {
                        worst = (d, *x);
                    }
                }
            }
            Ok(Comparison {
                scenario: s.name.clone(),
                variant: v.label,
                points: axis.len(),
                max_deviation: worst.0,
                worst_time: worst.1,
                tolerance: tol,
            })
        })
        .collect()
}

/// Runs every scenario that has an oracle counterpart (oracle-compare,
/// pair-energy, chain-excitations); phase-space scenarios are skipped.
pub fn compare_oracle(cfg: &Config, opts: &RunOptions, tol: f64) -> Result<Vec<Comparison>, Error> {
    cfg.validate()?;
    let mut out = Vec::new();
    for s in &cfg.scenarios {
        if matches!(s.kind, Kind::OracleCompare | Kind::PairEnergy | Kind::ChainExcitations) {
            out.extend(compare_scenario(s, opts, tol)?);
        }
    }
    Ok(out)
}

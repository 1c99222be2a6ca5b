//! Turns a validated [`Scenario`] into tables and a figure.

use num_complex::Complex64;
use osc_core::chain::{chain_excitations, scaled_excitations};
use osc_core::pair::pair_energies;
use osc_core::phase_space::{maxima_trajectory, CoherentInit, CoherentQContext, NumberQContext};
use osc_core::QuadratureConfig;
use rayon::prelude::*;

use crate::config::{Kind, Scenario, Variant};
use crate::svg::{LineSeries, Panel};
use crate::table::Table;
use crate::Error;

#[derive(Debug, Clone)]
#[derive(Default)]
pub struct RunOptions {
    pub quadrature: QuadratureConfig,
    /// Overrides `output.grid_points` of phase-space scenarios.
    pub grid: Option<usize>,
}


#[derive(Debug, Clone)]
pub struct ScenarioOutput {
    pub name: String,
    /// `(slug, table)`; written as `<name>-<slug>.csv`.
    pub tables: Vec<(String, Table)>,
    pub figure: Vec<Panel>,
}

fn compute_err(s: &Scenario, source: osc_core::Error) -> Error {
    Error::Compute { scenario: s.name.clone(), source }
}

/// Drive scale for `k²/F²` normalisation; `None` when undriven.
fn drive_scale(s: &Scenario) -> Option<f64> {
    let f = s.drive.scale();
    (f != 0.0).then_some(f)
}

pub fn compute(s: &Scenario, opts: &RunOptions) -> Result<ScenarioOutput, Error> {
    match s.kind {
        Kind::PairEnergy => pair_energy(s, opts),
        Kind::MaximaPath => maxima_path(s, opts),
        Kind::HusimiGrid | Kind::HusimiReduced => husimi(s, opts),
        Kind::ChainExcitations => chain(s, opts),
        Kind::OracleCompare => Err(Error::Unsupported(format!(
            "scenario `{}` is an oracle comparison; use the compare-oracle command",
            s.name
        ))),
    }
}

fn map_times<T: Send>(
    s: &Scenario,
    v: &Variant,
    axis: &[f64],
    f: impl Fn(f64) -> osc_core::Result<T> + Sync,
) -> Result<Vec<T>, Error> {
    let k = v.params.k;
    axis.par_iter().map(|x| f(x / k)).collect::<osc_core::Result<Vec<T>>>().map_err(|e| compute_err(s, e))
}

fn pair_energy(s: &Scenario, opts: &RunOptions) -> Result<ScenarioOutput, Error> {
    let env = s.envelope();
    let axis = s.output.time_axis();
    let scale = drive_scale(s);
    let (cols, y_label) = match scale {
        Some(_) => (["kt", "e1_scaled", "e2_scaled"], "E₂k²/F²"),
        None => (["kt", "e1", "e2"], "E₂"),
    };
    let mut tables = Vec::new();
    let mut series = Vec::new();
    for v in s.variants() {
        let values = map_times(s, &v, &axis, |t| {
            let e = pair_energies(&v.params, &env, s.initial.n1, s.initial.n2, t, &opts.quadrature)?;
            Ok(match scale {
                Some(f) => e.scaled(v.params.k, f),
                None => e,
            })
        })?;
        let mut table = Table::new(&cols);
        for (x, e) in axis.iter().zip(&values) {
            table.push(vec![*x, e.e1, e.e2]);
        }
        series.push(LineSeries { label: v.label.clone(), x: axis.clone(), y: values.iter().map(|e| e.e2).collect() });
        tables.push((v.slug, table));
    }
    let figure = vec![Panel::Lines { title: s.name.clone(), x_label: "kt".into(), y_label: y_label.into(), series }];
    Ok(ScenarioOutput { name: s.name.clone(), tables, figure })
}

fn maxima_path(s: &Scenario, opts: &RunOptions) -> Result<ScenarioOutput, Error> {
    let env = s.envelope();
    let axis = s.output.time_axis();
    let init = CoherentInit::new(s.initial.alpha0(), s.initial.beta0());
    let mut tables = Vec::new();
    let mut series = Vec::new();
    for v in s.variants() {
        let values = map_times(s, &v, &axis, |t| maxima_trajectory(&v.params, &env, init, t, &opts.quadrature))?;
        let mut table = Table::new(&["kt", "nu1_re", "nu1_im", "nu2_re", "nu2_im"]);
        for (x, (n1, n2)) in axis.iter().zip(&values) {
            table.push(vec![*x, n1.re, n1.im, n2.re, n2.im]);
        }
        series.push(LineSeries {
            label: v.label.clone(),
            x: values.iter().map(|(_, n2)| n2.re).collect(),
            y: values.iter().map(|(_, n2)| n2.im).collect(),
        });
        tables.push((v.slug, table));
    }
    let figure = vec![Panel::Lines { title: s.name.clone(), x_label: "Re ν₂".into(), y_label: "Im ν₂".into(), series }];
    Ok(ScenarioOutput { name: s.name.clone(), tables, figure })
}

fn husimi(s: &Scenario, opts: &RunOptions) -> Result<ScenarioOutput, Error> {
    let env = s.envelope();
    let mut output = s.output.clone();
    if let Some(n) = opts.grid {
        output.grid_points = Some(n);
    }
    let xs = output.grid_axis(output.grid_center[0]);
    let ys = output.grid_axis(output.grid_center[1]);
    let times = output.times.clone().unwrap_or_default();
    let nbar = s.system.nbar_b;
    let reduced = s.kind == Kind::HusimiReduced;
    let site = if reduced { 2 } else { output.site };
    let init = CoherentInit::new(s.initial.alpha0(), s.initial.beta0());

    let mut tables = Vec::new();
    let mut figure = Vec::new();
    for v in s.variants() {
        for &kt in &times {
            let t = kt / v.params.k;
            let q: Box<dyn Fn(Complex64) -> f64 + Sync> = if reduced {
                let ctx = NumberQContext::new(&v.params, &env, nbar, t, &opts.quadrature).map_err(|e| compute_err(s, e))?;
                let n = s.initial.number;
                Box::new(move |a| ctx.q_reduced(n, a))
            } else {
                let ctx = CoherentQContext::new(&v.params, &env, init, nbar, t, &opts.quadrature)
                    .map_err(|e| compute_err(s, e))?;
                Box::new(move |a| ctx.site(site, a))
            };
            let values: Vec<Vec<f64>> =
                ys.par_iter().map(|y| xs.iter().map(|x| q(Complex64::new(*x, *y))).collect()).collect();
            let mut table = Table::new(&["re", "im", "q"]);
            for (y, row) in ys.iter().zip(&values) {
                for (x, q) in xs.iter().zip(row) {
                    table.push(vec![*x, *y, *q]);
                }
            }
            tables.push((format!("{}-kt-{kt}", v.slug), table));
            let sub = if site == 1 { "₁" } else { "₂" };
            figure.push(Panel::Heat {
                title: format!("{}, kt={kt}", v.label),
                x_label: format!("Re α{sub}"),
                y_label: format!("Im α{sub}"),
                xs: xs.clone(),
                ys: ys.clone(),
                values,
            });
        }
    }
    Ok(ScenarioOutput { name: s.name.clone(), tables, figure })
}

fn chain(s: &Scenario, opts: &RunOptions) -> Result<ScenarioOutput, Error> {
    let env = s.envelope();
    let axis = s.output.time_axis();
    let scale = drive_scale(s);
    let n = s.system.chain_size;
    let mut names = vec!["k0t".to_string()];
    names.extend((1..=n).map(|i| format!("n_{i}")));
    let names_ref: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut tables = Vec::new();
    let mut figure = Vec::new();
    for v in s.variants() {
        let values = map_times(s, &v, &axis, |t| {
            let raw = chain_excitations(&v.params, &env, t, &opts.quadrature)?;
            Ok(match scale {
                Some(f) => scaled_excitations(&raw, v.params.k, f),
                None => raw,
            })
        })?;
        let mut table = Table::new(&names_ref);
        for (x, row) in axis.iter().zip(&values) {
            let mut r = vec![*x];
            r.extend_from_slice(row);
            table.push(r);
        }
        let series = (0..n)
            .map(|i| LineSeries {
                label: format!("n_{}", i + 1),
                x: axis.clone(),
                y: values.iter().map(|r| r[i]).collect(),
            })
            .collect();
        figure.push(Panel::Lines { title: v.label.clone(), x_label: "k₀t".into(), y_label: "n_i".into(), series });
        tables.push((v.slug, table));
    }
    Ok(ScenarioOutput { name: s.name.clone(), tables, figure })
}

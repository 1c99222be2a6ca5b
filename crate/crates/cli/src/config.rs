//! Scenario files: TOML with an explicit schema version. Unknown keys are
//! rejected so a typo cannot silently fall back to a default.

use std::path::Path;

use num_complex::Complex64;
use osc_core::{DampingEnvelope, DriveSpec, SystemParams};
use serde::Deserialize;

use crate::Error;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub schema: u32,
    #[serde(rename = "scenario", default)]
    pub scenarios: Vec<Scenario>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    PairEnergy,
    MaximaPath,
    HusimiGrid,
    HusimiReduced,
    ChainExcitations,
    OracleCompare,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::PairEnergy => "pair-energy",
            Kind::MaximaPath => "maxima-path",
            Kind::HusimiGrid => "husimi-grid",
            Kind::HusimiReduced => "husimi-reduced",
            Kind::ChainExcitations => "chain-excitations",
            Kind::OracleCompare => "oracle-compare",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub kind: Kind,
    /// `Δ/k` values; each produces its own series and overrides `omega_l`.
    #[serde(default)]
    pub detunings: Option<Vec<f64>>,
    pub system: System,
    #[serde(default)]
    pub drive: Drive,
    #[serde(default)]
    pub envelope: Envelope,
    #[serde(default)]
    pub initial: Initial,
    pub output: Output,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct System {
    pub omega0: f64,
    pub k: f64,
    #[serde(default)]
    pub omega_l: Option<f64>,
    #[serde(default)]
    pub nbar_b: f64,
    #[serde(default)]
    pub nbar_c: f64,
    #[serde(default = "two")]
    pub chain_size: usize,
}

fn two() -> usize {
    2
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Drive {
    Constant { amplitude: f64 },
    /// `F e^{−(t−center)²/(2 width²)}`, times in units of `1/k`.
    Pulse { amplitude: f64, center: f64, width: f64 },
}

impl Default for Drive {
    fn default() -> Self {
        Drive::Constant { amplitude: 0.0 }
    }
}

impl Drive {
    /// Peak amplitude, used for the `k²/F²` scaling.
    pub fn scale(&self) -> f64 {
        match self {
            Drive::Constant { amplitude } | Drive::Pulse { amplitude, .. } => *amplitude,
        }
    }

    fn spec(&self, k: f64) -> DriveSpec {
        match *self {
            Drive::Constant { amplitude } => DriveSpec::Constant(amplitude),
            Drive::Pulse { amplitude, center, width } => {
                let (c, w) = (center / k, width / k);
                DriveSpec::schedule(move |t| amplitude * (-0.5 * ((t - c) / w).powi(2)).exp(), 6.0 / w)
            }
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Envelope {
    #[default]
    None,
    Constant {
        g0: f64,
    },
    Markovian {
        gamma: f64,
    },
    Exponential {
        g0: f64,
        tau: f64,
    },
}

impl Envelope {
    pub fn build(&self) -> DampingEnvelope {
        match *self {
            Envelope::None => DampingEnvelope::none(),
            Envelope::Constant { g0 } => DampingEnvelope::ConstantG(g0),
            Envelope::Markovian { gamma } => DampingEnvelope::Markovian(gamma),
            Envelope::Exponential { g0, tau } => DampingEnvelope::exponential(g0, tau),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Initial {
    /// Initial occupations (number or thermal states) for energy scenarios.
    #[serde(default)]
    pub n1: f64,
    #[serde(default)]
    pub n2: f64,
    /// Coherent amplitudes `[re, im]` for phase-space scenarios.
    #[serde(default)]
    pub alpha0: [f64; 2],
    #[serde(default)]
    pub beta0: [f64; 2],
    /// Photon number `N` of `|N⟩ ⊗ |0⟩` for husimi-reduced.
    #[serde(default)]
    pub number: usize,
}

impl Initial {
    pub fn alpha0(&self) -> Complex64 {
        Complex64::new(self.alpha0[0], self.alpha0[1])
    }

    pub fn beta0(&self) -> Complex64 {
        Complex64::new(self.beta0[0], self.beta0[1])
    }
}

/// Times are dimensionless (`kt`, or `k₀t` for chains).
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    #[serde(default)]
    pub t_start: f64,
    #[serde(default)]
    pub t_end: Option<f64>,
    #[serde(default)]
    pub samples: Option<usize>,
    /// Snapshot times for phase-space grids.
    #[serde(default)]
    pub times: Option<Vec<f64>>,
    /// Half-width of the square grid centred on `grid_center`.
    #[serde(default)]
    pub grid_extent: Option<f64>,
    #[serde(default)]
    pub grid_points: Option<usize>,
    #[serde(default)]
    pub grid_center: [f64; 2],
    /// Which oscillator a husimi-grid shows (1 or 2).
    #[serde(default = "two")]
    pub site: usize,
}

impl Output {
    /// Evenly spaced dimensionless times, endpoints included.
    pub fn time_axis(&self) -> Vec<f64> {
        let (Some(end), Some(n)) = (self.t_end, self.samples) else { return Vec::new() };
        let step = (end - self.t_start) / (n - 1) as f64;
        (0..n).map(|i| if i + 1 == n { end } else { self.t_start + step * i as f64 }).collect()
    }

    /// Grid coordinates along one axis.
    pub fn grid_axis(&self, center: f64) -> Vec<f64> {
        let (Some(extent), Some(n)) = (self.grid_extent, self.grid_points) else { return Vec::new() };
        let step = 2.0 * extent / (n - 1) as f64;
        (0..n).map(|i| center - extent + step * i as f64).collect()
    }
}

/// One physical configuration (a single detuning) of a scenario.
#[derive(Debug, Clone)]
pub struct Variant {
    pub slug: String,
    pub label: String,
    /// `Δ/k`.
    pub detuning: f64,
    pub params: SystemParams,
}

impl Scenario {
    pub fn envelope(&self) -> DampingEnvelope {
        self.envelope.build()
    }

    pub fn variants(&self) -> Vec<Variant> {
        let s = &self.system;
        // (Δ/k, ω_L); an explicit ω_L is used as given
        let detunings: Vec<(f64, f64)> = match (&self.detunings, s.omega_l) {
            (Some(list), _) => list.iter().map(|d| (*d, s.omega0 - d * s.k)).collect(),
            (None, Some(wl)) => vec![((s.omega0 - wl) / s.k, wl)],
            (None, None) => vec![(0.0, s.omega0)],
        };
        let k_name = if self.kind == Kind::ChainExcitations { "k₀" } else { "k" };
        detunings
            .into_iter()
            .map(|(d, omega_l)| {
                let params = SystemParams {
                    omega0: s.omega0,
                    k: s.k,
                    omega_l,
                    drive: self.drive.spec(s.k),
                    nbar_b: s.nbar_b,
                    nbar_c: s.nbar_c,
                    chain_size: s.chain_size,
                };
                Variant { slug: format!("delta-{d}"), label: format!("Δ/{k_name}={d}"), detuning: d, params }
            })
            .collect()
    }

    /// Checks everything that can be checked without computing.
    pub fn validate(&self) -> Result<(), Error> {
        let bad = |msg: String| Err(Error::Validation { scenario: self.name.clone(), message: msg });
        if self.name.is_empty() || !self.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
            return bad("name must be nonempty and use only ASCII letters, digits, '-' or '_'".into());
        }
        let s = &self.system;
        if !(s.k > 0.0 && s.k.is_finite()) {
            return bad(format!("system.k must be positive (times are measured in units of 1/k), got {}", s.k));
        }
        if self.detunings.is_none() && s.omega_l.is_none() {
            return bad("either system.omega_l or detunings is required".into());
        }
        if matches!(&self.detunings, Some(d) if d.is_empty() || d.iter().any(|x| !x.is_finite())) {
            return bad("detunings must be a nonempty list of finite numbers".into());
        }
        for v in self.variants() {
            if let Err(e) = v.params.validate() {
                return bad(e.to_string());
            }
        }
        if let Err(e) = self.envelope().validate() {
            return bad(e.to_string());
        }
        if let Drive::Pulse { width, .. } = self.drive {
            if !(width > 0.0) {
                return bad("drive.width must be positive".into());
            }
        }
        let o = &self.output;
        let needs_grid = matches!(self.kind, Kind::HusimiGrid | Kind::HusimiReduced);
        if needs_grid {
            match &o.times {
                Some(t) if !t.is_empty() && t.iter().all(|x| *x >= 0.0 && x.is_finite()) => {}
                _ => return bad("output.times must be a nonempty list of non-negative times".into()),
            }
            if !matches!(o.grid_extent, Some(e) if e > 0.0 && e.is_finite()) {
                return bad("output.grid_extent must be positive".into());
            }
            if !matches!(o.grid_points, Some(n) if n >= 2) {
                return bad("output.grid_points must be at least 2".into());
            }
            if !(o.site == 1 || o.site == 2) {
                return bad("output.site must be 1 or 2".into());
            }
        } else {
            let Some(end) = o.t_end else { return bad("output.t_end is required".into()) };
            if !(o.t_start >= 0.0 && end > o.t_start && end.is_finite()) {
                return bad(format!("empty time range [{}, {}]", o.t_start, end));
            }
            if !matches!(o.samples, Some(n) if n >= 2) {
                return bad("output.samples must be at least 2".into());
            }
        }
        if matches!(self.kind, Kind::PairEnergy | Kind::MaximaPath | Kind::HusimiGrid | Kind::HusimiReduced)
            && s.chain_size != 2
        {
            return bad(format!("{} needs chain_size = 2", self.kind.as_str()));
        }
        if (self.kind == Kind::HusimiGrid || self.kind == Kind::HusimiReduced)
            && s.nbar_b != s.nbar_c {
                return bad("phase-space scenarios assume equal reservoir occupations".into());
            }
        let i = &self.initial;
        if !(i.n1 >= 0.0 && i.n2 >= 0.0) {
            return bad("initial occupations must be non-negative".into());
        }
        let chain_like = self.kind == Kind::ChainExcitations || (self.kind == Kind::OracleCompare && s.chain_size != 2);
        if chain_like && (i.n1 != 0.0 || i.n2 != 0.0 || s.nbar_b != 0.0 || s.nbar_c != 0.0) {
            return bad("chain excitations are computed for ground-state sites and reservoirs only".into());
        }
        Ok(())
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, Error> {
        let cfg: Config = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if cfg.schema != SCHEMA_VERSION {
            return Err(Error::Parse(format!("unsupported schema {} (expected {SCHEMA_VERSION})", cfg.schema)));
        }
        if cfg.scenarios.is_empty() {
            return Err(Error::Parse("no [[scenario]] entries".into()));
        }
        let mut names: Vec<&str> = cfg.scenarios.iter().map(|s| s.name.as_str()).collect();
        names.sort_unstable();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Parse(format!("duplicate scenario name `{}`", w[0])));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io { path: path.to_path_buf(), source: e })?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<(), Error> {
        self.scenarios.iter().try_for_each(Scenario::validate)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
schema = 1

[[scenario]]
name = "a"
kind = "pair-energy"
detunings = [0.0, 1.0]

[scenario.system]
omega0 = 2.0
k = 0.5

[scenario.drive]
kind = "constant"
amplitude = 0.5

[scenario.output]
t_end = 10.0
samples = 11
"#;

    #[test]
    fn parses_minimal() {
        let cfg = Config::parse(MINIMAL).unwrap();
        cfg.validate().unwrap();
        let v = cfg.scenarios[0].variants();
        assert_eq!(v.len(), 2);
        assert_eq!(v[1].params.omega_l, 1.5);
        assert_eq!(v[1].label, "Δ/k=1");
        let axis = cfg.scenarios[0].output.time_axis();
        assert_eq!(axis.len(), 11);
        assert_eq!(axis[10], 10.0);
    }

    #[test]
    fn unknown_key_is_an_error_with_context() {
        let text = MINIMAL.replace("omega0 = 2.0", "omega0 = 2.0\nomegaO = 1.0");
        let err = Config::parse(&text).unwrap_err().to_string();
        assert!(err.contains("omegaO") && err.contains("line"), "{err}");
    }

    #[test]
    fn schema_version_checked() {
        assert!(Config::parse(&MINIMAL.replace("schema = 1", "schema = 2")).is_err());
    }

    #[test]
    fn empty_time_range_rejected() {
        let text = MINIMAL.replace("t_end = 10.0", "t_end = 0.0");
        let cfg = Config::parse(&text).unwrap();
        assert!(matches!(cfg.validate(), Err(Error::Validation { .. })));
    }
}

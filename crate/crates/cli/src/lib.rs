//! Scenario runner behind the `oscsim` binary: reads TOML scenario files,
//! evaluates the closed forms from `osc-core`, and writes one CSV per data
//! series plus one SVG per scenario.

use std::path::{Path, PathBuf};

use thiserror::Error;

pub mod compare;
pub mod config;
pub mod presets;
pub mod scenario;
pub mod svg;
pub mod table;

pub use compare::{compare_oracle, Comparison};
pub use config::{Config, Kind, Scenario};
pub use scenario::{compute, RunOptions, ScenarioOutput};
pub use table::Table;

#[derive(Debug, Error)]
pub enum Error {
    #[error("config error: {0}")]
    Parse(String),

    #[error("scenario `{scenario}`: {message}")]
    Validation { scenario: String, message: String },

    #[error("scenario `{scenario}`: {source}")]
    Compute {
        scenario: String,
        #[source]
        source: osc_core::Error,
    },

    #[error("scenario `{scenario}`: oracle failed: {source}")]
    Oracle {
        scenario: String,
        #[source]
        source: osc_oracle::OracleError,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(String),

    #[error("figure: {0}")]
    Figure(String),

    #[error("{0}")]
    Unsupported(String),
}

/// Files produced by one scenario, rendered but not yet written.
#[derive(Debug, Clone)]
pub struct Rendered {
    pub files: Vec<(String, Vec<u8>)>,
    pub outputs: Vec<ScenarioOutput>,
}

/// Validates and computes every scenario, then renders file contents.
/// Nothing touches the filesystem.
pub fn render(cfg: &Config, opts: &RunOptions) -> Result<Rendered, Error> {
    cfg.validate()?;
    if let Some(s) = cfg.scenarios.iter().find(|s| s.kind == Kind::OracleCompare) {
        return Err(Error::Unsupported(format!(
            "scenario `{}` is an oracle comparison; run it with compare-oracle",
            s.name
        )));
    }
    use rayon::prelude::*;
    let outputs = cfg.scenarios.par_iter().map(|s| compute(s, opts)).collect::<Result<Vec<_>, _>>()?;
    let mut files = Vec::new();
    for out in &outputs {
        for (slug, table) in &out.tables {
            files.push((format!("{}-{slug}.csv", out.name), table.to_csv()?));
        }
        files.push((format!("{}.svg", out.name), svg::emit_figure(&out.figure)?.into_bytes()));
    }
    Ok(Rendered { files, outputs })
}

/// Computes everything first and writes files only if all scenarios succeed.
pub fn run(cfg: &Config, out_dir: &Path, opts: &RunOptions) -> Result<Vec<PathBuf>, Error> {
    let rendered = render(cfg, opts)?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::Io { path: out_dir.to_path_buf(), source: e })?;
    let mut written = Vec::new();
    for (name, bytes) in rendered.files {
        let path = out_dir.join(name);
        std::fs::write(&path, bytes).map_err(|e| Error::Io { path: path.clone(), source: e })?;
        written.push(path);
    }
    Ok(written)
}

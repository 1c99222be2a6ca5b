//! Figure presets shipped with the binary.

use crate::config::Config;
use crate::Error;

pub const NAMES: [&str; 4] = ["fig2", "fig3", "fig4", "fig6"];

pub fn source(name: &str) -> Option<&'static str> {
    match name {
        "fig2" => Some(include_str!("../presets/fig2.toml")),
        "fig3" => Some(include_str!("../presets/fig3.toml")),
        "fig4" => Some(include_str!("../presets/fig4.toml")),
        "fig6" => Some(include_str!("../presets/fig6.toml")),
        _ => None,
    }
}

pub fn load(name: &str) -> Result<Config, Error> {
    let text = source(name)
        .ok_or_else(|| Error::Unsupported(format!("unknown preset `{name}` (available: {})", NAMES.join(", "))))?;
    Config::parse(text)
}

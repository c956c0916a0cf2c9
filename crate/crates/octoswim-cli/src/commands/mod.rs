//! One module per subcommand, plus the shared artifact and metrics
//! helpers they build on.

pub mod arm;
pub mod design;
pub mod mech;
pub mod metrics;
pub mod steer;
pub mod sweep;
pub mod swim;

use std::fs;
use std::path::{Path, PathBuf};

use crate::config::ScenarioConfig;
use crate::CliError;

/// Creates the output directory (if needed) and returns the full path of
/// an artifact inside it.
pub fn artifact_path(out: &Path, name: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(out)
        .map_err(|err| CliError::runtime(format!("cannot create {}: {err}", out.display())))?;
    Ok(out.join(name))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text)
        .map_err(|err| CliError::runtime(format!("cannot write {}: {err}", path.display())))
}

/// Writes the fully materialized scenario next to the other artifacts so
/// a run can be reproduced from its own output directory.
pub fn write_effective_config(out: &Path, canonical: &ScenarioConfig) -> Result<(), CliError> {
    let path = artifact_path(out, "effective_config.toml")?;
    write_text(&path, &crate::config::to_toml(canonical))
}

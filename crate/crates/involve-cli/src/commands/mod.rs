//! Subcommand implementations.

pub mod analyze;
pub mod evaluate;
pub mod generate;
pub mod score;
pub mod train;

use std::path::Path;

use crate::CliError;

/// Reads an input file that the user named on the command line; a missing
/// or unreadable input is a usage error.
pub fn read_input(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

/// Maps dataset-loading failures: malformed content is a usage problem.
pub fn load_dataset(path: &Path) -> Result<involve::forge::Dataset, CliError> {
    if !path.exists() {
        return Err(CliError::Usage(format!("dataset {} does not exist", path.display())));
    }
    involve::forge::Dataset::read(path)
        .map_err(|e| CliError::Usage(format!("cannot load dataset {}: {e}", path.display())))
}

/// Maps checkpoint-loading failures to the model exit code.
pub fn load_model(path: &Path) -> Result<involve::model::DualHeadModel, CliError> {
    involve::model::load_checkpoint(path)
        .map_err(|e| CliError::Model(format!("cannot load checkpoint {}: {e}", path.display())))
}

/// Writes an output file after validation passed; failures here are I/O
/// errors (exit 4).
pub fn write_output(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| CliError::Io(format!("cannot create {}: {e}", parent.display())))?;
        }
    }
    std::fs::write(path, contents)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

//! Output assembly helpers: format flag, config echo, float formatting,
//! and writing to a file or stdout.

use std::fs;
use std::io::{self, Write as _};
use std::path::Path;

use clap::ValueEnum;

use crate::config::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Prefixes every line of the raw config with `# ` so tabular output
/// stays self-describing and reruns are comparable byte for byte.
pub fn config_echo(raw: &str) -> String {
    let mut out = String::new();
    for line in raw.lines() {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    out
}

/// Shortest decimal form that round-trips the value.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

pub fn write_output(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(format!("cannot write stdout: {e}"))),
    }
}

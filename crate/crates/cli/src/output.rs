use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::CliError;

pub const TOOL: &str = "svhe";

/// Provenance line written above every CSV header.
pub fn comment_line(hash: &str) -> String {
    format!(
        "# tool={TOOL} version={} config_hash={hash}",
        env!("CARGO_PKG_VERSION")
    )
}

/// Creates `dir/name`, writes the comment line, then `body`.
pub fn write_csv(
    dir: &Path,
    name: &str,
    hash: &str,
    body: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>,
) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.to_path_buf(), e))?;
    let path = dir.join(name);
    let io_err = |e| CliError::Io(path.clone(), e);
    let mut out = BufWriter::new(File::create(&path).map_err(io_err)?);
    writeln!(out, "{}", comment_line(hash)).map_err(io_err)?;
    body(&mut out).map_err(io_err)?;
    out.flush().map_err(io_err)?;
    Ok(path)
}

pub fn write_text(dir: &Path, name: &str, text: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.to_path_buf(), e))?;
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| CliError::Io(path.clone(), e))?;
    Ok(path)
}

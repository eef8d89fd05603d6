//! Output files tagged with the configuration hash.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use qreadout::Result;

/// First line of every CSV output.
pub fn hash_comment(hash: &str) -> String {
    format!("# config_hash={hash}")
}

/// Writes `name` under `dir`: the hash comment, then whatever `body` emits.
pub fn write_csv(dir: &Path, name: &str, hash: &str, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let mut out = BufWriter::new(File::create(&path)?);
    writeln!(out, "{}", hash_comment(hash))?;
    body(&mut out)?;
    out.flush()?;
    Ok(path)
}

#[derive(Serialize)]
struct Tagged<'a, T: Serialize> {
    config_hash: &'a str,
    command: &'a str,
    version: &'a str,
    result: &'a T,
}

/// Writes `{config_hash, command, version, result}` as pretty JSON.
pub fn write_json<T: Serialize>(dir: &Path, name: &str, command: &str, hash: &str, result: &T) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let mut out = BufWriter::new(File::create(&path)?);
    let tagged = Tagged { config_hash: hash, command, version: env!("CARGO_PKG_VERSION"), result };
    serde_json::to_writer_pretty(&mut out, &tagged)?;
    writeln!(out)?;
    out.flush()?;
    Ok(path)
}

/// Empty for `None`, shortest round-trip form otherwise.
pub fn cell(value: Option<f64>) -> String {
    value.map(|v| format!("{v:e}")).unwrap_or_default()
}

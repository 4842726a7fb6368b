use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Common JSON wrapper: the result plus enough context to reproduce it.
#[derive(Serialize)]
pub struct Envelope<'a, R: Serialize> {
    pub schema_version: u32,
    pub qgame_version: &'static str,
    pub command: &'a str,
    /// SHA-256 of the game file, when one was read.
    pub spec_sha256: Option<&'a str>,
    pub inputs: Value,
    pub result: R,
}

pub fn json_report<R: Serialize>(
    command: &str,
    spec_sha256: Option<&str>,
    inputs: Value,
    result: R,
) -> CliResult<Vec<u8>> {
    let env = Envelope {
        schema_version: SCHEMA_VERSION,
        qgame_version: env!("CARGO_PKG_VERSION"),
        command,
        spec_sha256,
        inputs,
        result,
    };
    let mut out = serde_json::to_vec_pretty(&env).map_err(|e| CliError::Usage(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

/// Six significant digits, plain notation for moderate magnitudes.
pub fn sig6(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..6).contains(&exp) {
        return format!("{x:.5e}");
    }
    let decimals = (5 - exp).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // Rounding can carry into a new digit (9.999995 -> 10.00000); trim either way.
    let s = if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

pub fn csv_bytes<I, R>(header: &[&str], rows: I) -> CliResult<Vec<u8>>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| CliError::Usage(format!("csv encoding failed: {e}"));
    w.write_record(header).map_err(fail)?;
    for r in rows {
        w.write_record(r).map_err(fail)?;
    }
    w.into_inner().map_err(|e| CliError::Usage(format!("csv encoding failed: {e}")))
}

/// Writes to `path` through a temporary sibling and a rename, or to stdout.
pub fn emit(bytes: &[u8], path: Option<&Path>) -> CliResult<()> {
    let Some(path) = path else {
        let mut stdout = std::io::stdout().lock();
        return stdout
            .write_all(bytes)
            .and_then(|_| stdout.flush())
            .map_err(|source| CliError::Write { path: "<stdout>".into(), source });
    };
    let write_err = |source| CliError::Write { path: path.to_path_buf(), source };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(write_err)?;
    tmp.write_all(bytes).map_err(write_err)?;
    tmp.as_file().sync_all().map_err(write_err)?;
    tmp.persist(path).map_err(|e| write_err(e.error))?;
    Ok(())
}

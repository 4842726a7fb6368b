//! Game description files.
//!
//! ```json
//! { "pairs": 3,
//!   "frame_a": {"kind": "fixed_xyz"},
//!   "frame_b": {"kind": "planar", "angles": [0.0, 0.6, 1.2]},
//!   "payoff": {"diag": [7, 7, 0, 1, 1, 0]},
//!   "units": "currency" }
//! ```
//!
//! `diag` lists the pay for each atom `a` asked against a ball on `a'`;
//! `full` is the complete `2K x 2K` matrix.

use std::path::{Path, PathBuf};

use qgame_core::strategy::{frame_fixed_xyz, frame_planar};
use qgame_core::{GameSpec, ObservableFrame, PayoffMatrix};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

const TOP_LEVEL_KEYS: [&str; 6] = ["pairs", "frame_a", "frame_b", "payoff", "units", "description"];

pub struct LoadedSpec {
    pub game: GameSpec,
    pub sha256: String,
}

pub fn load(path: &Path) -> CliResult<LoadedSpec> {
    let bytes = std::fs::read(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let sha256 = hex::encode(Sha256::digest(&bytes));
    let value: Value = serde_json::from_slice(&bytes).map_err(|e| CliError::Json {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: strip_position(&e.to_string()),
    })?;
    let game = Parser { path }.game(&value)?;
    Ok(LoadedSpec { game, sha256 })
}

fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

struct Parser<'a> {
    path: &'a Path,
}

impl Parser<'_> {
    fn err(&self, field: impl Into<String>, message: impl Into<String>) -> CliError {
        CliError::Spec {
            path: PathBuf::from(self.path),
            field: field.into(),
            message: message.into(),
        }
    }

    fn object<'v>(&self, v: &'v Value, field: &str) -> CliResult<&'v Map<String, Value>> {
        v.as_object().ok_or_else(|| self.err(field, "expected an object"))
    }

    fn number(&self, v: &Value, field: &str) -> CliResult<f64> {
        v.as_f64().ok_or_else(|| self.err(field, "expected a number"))
    }

    fn numbers(&self, v: &Value, field: &str, len: usize) -> CliResult<Vec<f64>> {
        let arr = v.as_array().ok_or_else(|| self.err(field, "expected an array"))?;
        if arr.len() != len {
            return Err(self.err(field, format!("expected {len} entries, got {}", arr.len())));
        }
        arr.iter()
            .enumerate()
            .map(|(i, x)| self.number(x, &format!("{field}[{i}]")))
            .collect()
    }

    fn game(&self, root: &Value) -> CliResult<GameSpec> {
        let obj = self.object(root, "(root)")?;
        if let Some(key) = obj.keys().find(|k| !TOP_LEVEL_KEYS.contains(&k.as_str())) {
            return Err(self.err(key.as_str(), "unknown field"));
        }
        let pairs_v = obj.get("pairs").ok_or_else(|| self.err("pairs", "missing"))?;
        let pairs = pairs_v
            .as_u64()
            .filter(|&k| k >= 2)
            .ok_or_else(|| self.err("pairs", "expected an integer >= 2"))? as usize;
        if let Some(units) = obj.get("units") {
            if units.as_str() != Some("currency") {
                return Err(self.err("units", "only \"currency\" is supported"));
            }
        }
        let frame_a = self.frame(obj.get("frame_a"), "frame_a", pairs)?;
        let frame_b = self.frame(obj.get("frame_b"), "frame_b", pairs)?;
        let payoff = self.payoff(obj.get("payoff"), pairs)?;
        GameSpec::new(frame_a, frame_b, payoff).map_err(|e| self.err("(root)", e.to_string()))
    }

    fn frame(&self, v: Option<&Value>, field: &str, pairs: usize) -> CliResult<ObservableFrame> {
        let obj = self.object(v.ok_or_else(|| self.err(field, "missing"))?, field)?;
        let kind = obj
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| self.err(format!("{field}.kind"), "expected \"fixed_xyz\" or \"planar\""))?;
        match kind {
            "fixed_xyz" => {
                if let Some(extra) = obj.keys().find(|k| *k != "kind") {
                    return Err(self.err(format!("{field}.{extra}"), "unknown field"));
                }
                if pairs != 3 {
                    return Err(self.err(
                        format!("{field}.kind"),
                        format!("fixed_xyz frame has 3 pairs but pairs = {pairs}"),
                    ));
                }
                Ok(frame_fixed_xyz())
            }
            "planar" => {
                if let Some(extra) = obj.keys().find(|k| *k != "kind" && *k != "angles") {
                    return Err(self.err(format!("{field}.{extra}"), "unknown field"));
                }
                let path = format!("{field}.angles");
                let angles = obj.get("angles").ok_or_else(|| self.err(&path, "missing"))?;
                let angles = self.numbers(angles, &path, pairs)?;
                frame_planar(&angles).map_err(|e| self.err(path, e.to_string()))
            }
            other => Err(self.err(
                format!("{field}.kind"),
                format!("unknown frame kind {other:?}; expected \"fixed_xyz\" or \"planar\""),
            )),
        }
    }

    fn payoff(&self, v: Option<&Value>, pairs: usize) -> CliResult<PayoffMatrix> {
        let obj = self.object(v.ok_or_else(|| self.err("payoff", "missing"))?, "payoff")?;
        let atoms = 2 * pairs;
        match (obj.get("diag"), obj.get("full"), obj.len()) {
            (Some(diag), None, 1) => {
                let values = self.numbers(diag, "payoff.diag", atoms)?;
                PayoffMatrix::table(&values).map_err(|e| self.err("payoff.diag", e.to_string()))
            }
            (None, Some(full), 1) => {
                let rows = full
                    .as_array()
                    .ok_or_else(|| self.err("payoff.full", "expected an array of rows"))?;
                if rows.len() != atoms {
                    return Err(self.err(
                        "payoff.full",
                        format!("expected {atoms} rows for pairs = {pairs}, got {}", rows.len()),
                    ));
                }
                let rows = rows
                    .iter()
                    .enumerate()
                    .map(|(i, r)| self.numbers(r, &format!("payoff.full[{i}]"), atoms))
                    .collect::<CliResult<Vec<_>>>()?;
                PayoffMatrix::full(rows).map_err(|e| self.err("payoff.full", e.to_string()))
            }
            _ => Err(self.err("payoff", "expected exactly one of \"diag\" or \"full\"")),
        }
    }
}

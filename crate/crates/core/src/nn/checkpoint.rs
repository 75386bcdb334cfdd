//! Plain-text parameter checkpoints.
//!
//! ```text
//! metabandit-params 1
//! dims <hidden> <input> <actions>
//! <tensor-name> <rows> <cols>
//! <row-major values, space separated>
//! ...
//! ```
//!
//! Values use Rust's shortest round-trip float formatting, so a save/load
//! cycle is bit-exact.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::params::TENSOR_NAMES;
use super::AgentParams;
use crate::{Error, Result};

const MAGIC: &str = "metabandit-params";
const VERSION: u32 = 1;

pub fn write_params(params: &AgentParams) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC} {VERSION}");
    let _ = writeln!(out, "dims {} {} {}", params.hidden, params.input, params.actions);
    for ((name, shape), t) in TENSOR_NAMES.iter().zip(params.shapes()).zip(params.tensors()) {
        let _ = writeln!(out, "{name} {} {}", shape.rows, shape.cols);
        let line: Vec<String> = t.iter().map(|v| format!("{v:?}")).collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
    out
}

pub fn read_params(text: &str, origin: &Path) -> Result<AgentParams> {
    let bad = |reason: String| Error::Format { path: origin.to_path_buf(), reason };
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad("empty file".into()))?;
    let mut parts = header.split_whitespace();
    if parts.next() != Some(MAGIC) {
        return Err(bad("missing magic header".into()));
    }
    let version: u32 = parts.next().and_then(|v| v.parse().ok()).ok_or_else(|| bad("missing version".into()))?;
    if version != VERSION {
        return Err(bad(format!("unsupported version {version}")));
    }
    let dims: Vec<usize> = lines
        .next()
        .and_then(|l| l.strip_prefix("dims "))
        .map(|l| l.split_whitespace().filter_map(|v| v.parse().ok()).collect())
        .ok_or_else(|| bad("missing dims line".into()))?;
    let [hidden, input, actions] = dims[..] else {
        return Err(bad("dims line needs three integers".into()));
    };
    let mut params = AgentParams::zeros(hidden, input, actions);
    let shapes = params.shapes();
    for ((name, shape), tensor) in TENSOR_NAMES.iter().zip(shapes).zip(params.tensors_mut()) {
        let head = lines.next().ok_or_else(|| bad(format!("missing tensor {name}")))?;
        let fields: Vec<&str> = head.split_whitespace().collect();
        if fields.len() != 3 || fields[0] != *name {
            return Err(bad(format!("expected header for {name}, found `{head}`")));
        }
        let (rows, cols): (usize, usize) = match (fields[1].parse(), fields[2].parse()) {
            (Ok(r), Ok(c)) => (r, c),
            _ => return Err(bad(format!("bad shape for {name}"))),
        };
        if rows != shape.rows || cols != shape.cols {
            return Err(bad(format!("{name} has shape {rows}x{cols}, expected {}x{}", shape.rows, shape.cols)));
        }
        let values = lines.next().unwrap_or("");
        let parsed: std::result::Result<Vec<f64>, _> = values.split_whitespace().map(str::parse).collect();
        let parsed = parsed.map_err(|e| bad(format!("{name}: {e}")))?;
        if parsed.len() != shape.len() {
            return Err(bad(format!("{name} has {} values, expected {}", parsed.len(), shape.len())));
        }
        *tensor = parsed;
    }
    params.validate()?;
    Ok(params)
}

pub fn save_params(params: &AgentParams, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, write_params(params))?;
    Ok(())
}

pub fn load_params(path: &Path) -> Result<AgentParams> {
    if !path.exists() {
        return Err(Error::MissingCheckpoint(path.to_path_buf()));
    }
    read_params(&fs::read_to_string(path)?, path)
}

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde_json::Value;

/// Shortest round-trip decimal, with `inf` / `-inf` for infinities.
pub fn fmt_number(v: f64) -> String {
    if v.is_finite() {
        format!("{v}")
    } else if v < 0.0 {
        "-inf".to_string()
    } else {
        // NaN never leaves the solvers as a value; treat it like a failed cell
        "inf".to_string()
    }
}

/// JSON number, or the strings `"inf"` / `"-inf"`.
pub fn num(v: f64) -> Value {
    if v.is_finite() {
        Value::from(v)
    } else {
        Value::String(fmt_number(v))
    }
}

pub fn nums(values: &[f64]) -> Value {
    Value::Array(values.iter().map(|&v| num(v)).collect())
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))
}

pub fn write_file(dir: &Path, name: &str, contents: &[u8]) -> Result<PathBuf> {
    let path = dir.join(name);
    let mut file = fs::File::create(&path).with_context(|| format!("cannot write {}", path.display()))?;
    file.write_all(contents)
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(path)
}

pub fn write_json(dir: &Path, name: &str, value: &Value) -> Result<PathBuf> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_file(dir, name, text.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinities_are_spelled_out() {
        assert_eq!(fmt_number(f64::INFINITY), "inf");
        assert_eq!(fmt_number(f64::NEG_INFINITY), "-inf");
        assert_eq!(fmt_number(-2.5), "-2.5");
        assert_eq!(num(f64::INFINITY), Value::String("inf".into()));
        assert_eq!(nums(&[1.0, f64::INFINITY]).to_string(), "[1.0,\"inf\"]");
    }
}

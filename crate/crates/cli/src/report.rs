use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde_json::{json, Value};

/// Name of the only report field that differs between identical runs.
pub const TIMESTAMP_KEY: &str = "timestamp";

/// Builds the report object. Keys are sorted, so equal inputs give equal bytes
/// apart from the timestamp.
pub fn report(command: &str, params: Value, result: Value, passed: bool) -> Value {
    let now = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    json!({
        "command": command,
        "params": params,
        "passed": passed,
        "result": result,
        TIMESTAMP_KEY: now,
    })
}

pub fn write_text(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            std::io::stdout().lock().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

pub fn emit(report: &Value, out: Option<&Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    write_text(&text, out)
}

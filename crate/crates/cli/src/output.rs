//! Artifact writers. Every output embeds the resolved config and a schema
//! version; floats print with 17 significant digits so files round-trip
//! bit-exactly.

use serde::Serialize;
use std::io::Write;
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

/// 17 significant digits, scientific.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV preamble: schema version plus the resolved config on comment lines.
pub fn write_csv_header<W: Write>(
    out: &mut W,
    config: &impl Serialize,
    header: &str,
) -> anyhow::Result<()> {
    writeln!(out, "# schema_version={SCHEMA_VERSION}")?;
    writeln!(out, "# config={}", serde_json::to_string(config)?)?;
    writeln!(out, "{header}")?;
    Ok(())
}

pub fn write_json_file(path: &Path, value: &serde_json::Value) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

//! Deterministic artifact writing: JSON bodies are stable for a fixed
//! invocation; timestamps go into a `<path>.meta.json` sidecar.

use serde::Serialize;
use std::path::{Path, PathBuf};

/// Scratch directory for outputs when no explicit path is given.
pub fn scratch_dir() -> PathBuf {
    std::env::var_os("STOQAQC_SCRATCH").map(PathBuf::from).unwrap_or_else(std::env::temp_dir)
}

pub fn resolve_out(out: Option<PathBuf>, default_name: &str) -> PathBuf {
    out.unwrap_or_else(|| scratch_dir().join(default_name))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> std::io::Result<()> {
    let body = serde_json::to_string_pretty(value).expect("serializable");
    std::fs::write(path, body + "\n")?;
    write_sidecar(path)
}

pub fn write_text(path: &Path, body: &str) -> std::io::Result<()> {
    std::fs::write(path, body)
}

#[derive(Serialize)]
struct Sidecar {
    written_at_unix_ms: u128,
    tool: &'static str,
    tool_version: &'static str,
}

fn write_sidecar(path: &Path) -> std::io::Result<()> {
    let meta = Sidecar {
        written_at_unix_ms: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_millis())
            .unwrap_or(0),
        tool: "stoqaqc",
        tool_version: env!("CARGO_PKG_VERSION"),
    };
    let mut sidecar = path.as_os_str().to_owned();
    sidecar.push(".meta.json");
    std::fs::write(
        sidecar,
        serde_json::to_string_pretty(&meta).expect("serializable") + "\n",
    )
}

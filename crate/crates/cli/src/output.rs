//! Artifact writing: every file the tool emits starts with a
//! deterministic provenance header (tool version, canonical parameter
//! set, content digests of the inputs) so a re-run of the same
//! invocation reproduces the output byte for byte.

use std::fs;
use std::io::Write;
use std::path::Path;

use sha2::{Digest, Sha256};
use tropos_core::{Error, Result};

/// Tool identification used in every header.
pub const TOOL: &str = concat!("tropos ", env!("CARGO_PKG_VERSION"));

/// Provenance carried by each artifact: the canonical command line that
/// produced it and a SHA-256 digest per input file.
pub struct Meta {
    cmd: String,
    inputs: Vec<(String, String)>,
}

impl Meta {
    pub fn new(cmd: impl Into<String>) -> Self {
        Meta {
            cmd: cmd.into(),
            inputs: Vec::new(),
        }
    }

    /// Reads an input file, recording its digest under the given flag
    /// name.
    pub fn read_input(&mut self, label: &str, path: &Path) -> Result<Vec<u8>> {
        let bytes = fs::read(path).map_err(|e| {
            Error::precondition(format!("cannot read {}: {e}", path.display()))
        })?;
        let mut h = Sha256::new();
        h.update(&bytes);
        self.inputs
            .push((label.to_string(), format!("{:x}", h.finalize())));
        Ok(bytes)
    }

    fn inputs_field(&self) -> String {
        if self.inputs.is_empty() {
            "-".to_string()
        } else {
            self.inputs
                .iter()
                .map(|(l, d)| format!("{l}=sha256:{d}"))
                .collect::<Vec<_>>()
                .join(",")
        }
    }

    /// The single comment line that opens every CSV artifact.
    pub fn header_line(&self) -> String {
        format!("# {TOOL} | cmd: {} | inputs: {}", self.cmd, self.inputs_field())
    }

    /// The `meta` object embedded in every JSON artifact.
    pub fn json_value(&self) -> serde_json::Value {
        let mut inputs = serde_json::Map::new();
        for (l, d) in &self.inputs {
            inputs.insert(l.clone(), serde_json::Value::String(format!("sha256:{d}")));
        }
        serde_json::json!({
            "tool": TOOL,
            "cmd": self.cmd,
            "inputs": serde_json::Value::Object(inputs),
        })
    }
}

fn write_text(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => {
            fs::write(p, text)
                .map_err(|e| Error::precondition(format!("cannot write {}: {e}", p.display())))
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

/// Writes a CSV artifact: provenance comment, column line, data rows.
pub fn write_csv(
    out: Option<&Path>,
    meta: &Meta,
    columns: &[&str],
    rows: &[Vec<String>],
) -> Result<()> {
    let mut s = String::with_capacity(64 * (rows.len() + 2));
    s.push_str(&meta.header_line());
    s.push('\n');
    s.push_str(&columns.join(","));
    s.push('\n');
    for row in rows {
        s.push_str(&row.join(","));
        s.push('\n');
    }
    write_text(out, &s)
}

/// Writes a JSON artifact with the provenance injected as a top-level
/// `meta` field. Keys serialize in sorted order, so output is
/// deterministic.
pub fn write_json(out: Option<&Path>, meta: &Meta, value: serde_json::Value) -> Result<()> {
    let value = match value {
        serde_json::Value::Object(mut m) => {
            m.insert("meta".to_string(), meta.json_value());
            serde_json::Value::Object(m)
        }
        other => serde_json::json!({ "meta": meta.json_value(), "result": other }),
    };
    let mut s = serde_json::to_string_pretty(&value)
        .map_err(|e| Error::argument(format!("cannot serialize result: {e}")))?;
    s.push('\n');
    write_text(out, &s)
}

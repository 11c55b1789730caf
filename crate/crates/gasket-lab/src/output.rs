use std::io::Write;
use std::path::PathBuf;

use anyhow::{Context, Result};

/// 15 significant digits, the CSV contract for real columns.
pub fn fmt15(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:.14e}")
    }
}

pub enum Sink {
    Stdout(std::io::Stdout),
    File(std::io::BufWriter<std::fs::File>, PathBuf),
}

impl Sink {
    pub fn open(out: &Option<PathBuf>) -> Result<Sink> {
        match out {
            None => Ok(Sink::Stdout(std::io::stdout())),
            Some(path) => {
                if let Some(dir) = path.parent() {
                    if !dir.as_os_str().is_empty() {
                        std::fs::create_dir_all(dir)
                            .with_context(|| format!("creating {dir:?}"))?;
                    }
                }
                let file =
                    std::fs::File::create(path).with_context(|| format!("creating {path:?}"))?;
                Ok(Sink::File(std::io::BufWriter::new(file), path.clone()))
            }
        }
    }

    pub fn line(&mut self, s: &str) -> Result<()> {
        match self {
            Sink::Stdout(w) => writeln!(w, "{s}").context("writing stdout"),
            Sink::File(w, p) => writeln!(w, "{s}").with_context(|| format!("writing {p:?}")),
        }
    }

    pub fn flush(&mut self) -> Result<()> {
        match self {
            Sink::Stdout(w) => w.flush().context("flushing stdout"),
            Sink::File(w, p) => w.flush().with_context(|| format!("flushing {p:?}")),
        }
    }
}

/// Canonical report envelope: every JSON artifact names the operation, its
/// inputs and outputs, and the tolerances it was judged against.
pub fn report(
    operation: &str,
    inputs: serde_json::Value,
    outputs: serde_json::Value,
    tolerances: serde_json::Value,
    pass: Option<bool>,
) -> serde_json::Value {
    let mut doc = serde_json::json!({
        "operation": operation,
        "inputs": inputs,
        "outputs": outputs,
        "tolerances": tolerances,
    });
    if let Some(p) = pass {
        doc["pass"] = serde_json::json!(p);
    }
    doc
}

pub fn emit_json(sink: &mut Sink, value: &serde_json::Value) -> Result<()> {
    sink.line(&serde_json::to_string_pretty(value)?)?;
    sink.flush()
}

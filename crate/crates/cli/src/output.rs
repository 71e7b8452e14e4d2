//! Result files. Data files carry the config hash and nothing time-dependent;
//! the wall-clock time goes to a sidecar log.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;

/// 17 significant digits, enough to round-trip an `f64`.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// A `# config_sha256=` line, then the header, then the rows.
pub fn csv(hash: &str, header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = format!("# config_sha256={hash}\n{}\n", header.join(","));
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn versions() -> Value {
    json!({
        "stark-cap": stark_cap::VERSION,
        "stark-cap-cli": env!("CARGO_PKG_VERSION"),
    })
}

pub fn json_document(config: &RunConfig, hash: &str, results: impl Serialize, residuals: impl Serialize) -> String {
    let doc = json!({
        "config": config,
        "config_hash": hash,
        "results": results,
        "residuals": residuals,
        "versions": versions(),
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("results serialize");
    text.push('\n');
    text
}

/// Files of one run under `dir`, all named `<stem>_<suffix>`.
pub struct Artifacts {
    dir: PathBuf,
    stem: String,
    written: Vec<PathBuf>,
}

impl Artifacts {
    pub fn new(dir: &Path, stem: &str) -> std::io::Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            stem: stem.to_string(),
            written: Vec::new(),
        })
    }

    pub fn path(&self, suffix: &str) -> PathBuf {
        self.dir.join(format!("{}_{suffix}", self.stem))
    }

    pub fn write(&mut self, suffix: &str, content: &str) -> std::io::Result<()> {
        let path = self.path(suffix);
        std::fs::write(&path, content)?;
        self.written.push(path);
        Ok(())
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    /// Appends a line per call to `<stem>_<command>.log`.
    pub fn log(&self, command: &str, hash: &str, elapsed: Duration, note: &str) -> std::io::Result<()> {
        let stamp = SystemTime::now().duration_since(UNIX_EPOCH).unwrap_or_default();
        let mut line = String::new();
        let _ = write!(
            line,
            "unix_time={} command={command} config_sha256={hash} elapsed_s={:.3} files={}",
            stamp.as_secs(),
            elapsed.as_secs_f64(),
            self.written.len()
        );
        if !note.is_empty() {
            let _ = write!(line, " {note}");
        }
        let mut f = std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(self.path(&format!("{command}.log")))?;
        writeln!(f, "{line}")
    }
}

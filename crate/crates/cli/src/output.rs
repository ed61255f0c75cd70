use std::path::{Path, PathBuf};

use padic_fractal::measures::manifest_path;
use padic_fractal::Result;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;

/// Writes data files into one directory, each with a JSON manifest beside it.
pub struct OutputDir<'a> {
    dir: PathBuf,
    command: &'static str,
    config: &'a RunConfig,
    files: Vec<String>,
}

impl<'a> OutputDir<'a> {
    pub fn create(dir: &Path, command: &'static str, config: &'a RunConfig) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            command,
            config,
            files: Vec::new(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// Records `name` as written and writes `name.json`.
    pub fn manifest(&mut self, name: &str, stats: Value) -> Result<()> {
        let m = json!({
            "tool": "padic-fractal",
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "file": name,
            "config": self.config,
            "stats": stats,
        });
        std::fs::write(
            manifest_path(&self.path(name)),
            serde_json::to_string_pretty(&m)? + "\n",
        )?;
        self.files.push(name.to_string());
        Ok(())
    }

    /// Writes `value` as pretty JSON to `name`, with a manifest.
    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        std::fs::write(self.path(name), serde_json::to_string_pretty(value)? + "\n")?;
        self.manifest(name, Value::Null)
    }

    pub fn files(&self) -> Vec<String> {
        self.files.clone()
    }
}

/// What a command did, printed to stdout.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub files: Vec<String>,
    pub summary: Value,
    /// `Some(false)` when an embedding check ran and failed.
    pub certified: Option<bool>,
}

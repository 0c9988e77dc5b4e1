use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use onestreet::GameConfig;
use serde::Serialize;

/// Record of one command invocation, written beside its outputs.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub args: Vec<String>,
    pub tool: String,
    pub version: String,
    pub config: GameConfig,
    pub seeds: BTreeMap<String, u64>,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub started_unix: u64,
    pub wall_clock_secs: f64,
    #[serde(skip)]
    clock: Option<Instant>,
}

impl RunManifest {
    pub fn start(command: &str, config: GameConfig) -> Self {
        Self {
            command: command.into(),
            args: std::env::args().collect(),
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config,
            seeds: BTreeMap::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            started_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
            wall_clock_secs: 0.0,
            clock: Some(Instant::now()),
        }
    }

    pub fn seed(mut self, name: &str, value: u64) -> Self {
        self.seeds.insert(name.into(), value);
        self
    }

    pub fn input(mut self, path: &Path) -> Self {
        self.inputs.push(path.to_path_buf());
        self
    }

    pub fn output(&mut self, path: &Path) {
        self.outputs.push(path.to_path_buf());
    }

    /// Path of the manifest that belongs to output `path`.
    pub fn path_for(path: &Path) -> PathBuf {
        if path.is_dir() {
            return path.join("manifest.json");
        }
        let mut name = path.file_name().unwrap_or_default().to_os_string();
        name.push(".manifest.json");
        path.with_file_name(name)
    }

    /// Writes the manifest next to `anchor` (a file or an output directory).
    pub fn finish(mut self, anchor: &Path) -> std::io::Result<PathBuf> {
        if let Some(c) = self.clock {
            self.wall_clock_secs = c.elapsed().as_secs_f64();
        }
        let path = Self::path_for(anchor);
        std::fs::write(&path, serde_json::to_string_pretty(&self)? + "\n")?;
        Ok(path)
    }
}

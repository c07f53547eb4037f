//! Run manifests: one `manifest.txt` per output directory recording what
//! produced its contents.

use std::path::{Path, PathBuf};
use std::time::Instant;

use cadence_core::io::write_atomic;
use cadence_core::Result;

pub const MANIFEST_NAME: &str = "manifest.txt";

/// Provenance of one command invocation. The duration field makes manifests
/// the one output exempt from byte-identical reruns.
pub struct RunManifest {
    pub command: &'static str,
    pub config_hash: String,
    pub seed: u64,
    pub inputs: Vec<PathBuf>,
    pub output: PathBuf,
    started: Instant,
}

impl RunManifest {
    pub fn start(command: &'static str) -> Self {
        Self {
            command,
            config_hash: String::new(),
            seed: 0,
            inputs: Vec::new(),
            output: PathBuf::new(),
            started: Instant::now(),
        }
    }

    pub fn input(mut self, path: &Path) -> Self {
        self.inputs.push(path.to_path_buf());
        self
    }

    /// Write `manifest.txt` into `dir` atomically.
    pub fn write(&self, dir: &Path) -> Result<()> {
        let inputs: Vec<String> =
            self.inputs.iter().map(|p| p.display().to_string()).collect();
        let text = format!(
            "command={}\nconfig_hash={}\nseed={}\ninputs={}\noutput={}\nversion={}\nduration_ms={}\n",
            self.command,
            self.config_hash,
            self.seed,
            inputs.join(","),
            self.output.display(),
            env!("CARGO_PKG_VERSION"),
            self.started.elapsed().as_millis()
        );
        write_atomic(&dir.join(MANIFEST_NAME), text.as_bytes())
    }
}

/// The manifest directory for a file output: its parent, or the working
/// directory when the path has none.
pub fn manifest_dir(out_file: &Path) -> PathBuf {
    match out_file.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    }
}

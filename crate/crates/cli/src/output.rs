//! Output directory bookkeeping and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thinfilm::{Error, Result, SCHEMA_VERSION};

pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema: String,
    pub command: String,
    pub config: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub version: String,
    pub duration_secs: f64,
    pub exit_status: u8,
    pub files: Vec<String>,
}

/// An output directory that holds only the files this run declares.
pub struct OutDir {
    dir: PathBuf,
    files: Vec<String>,
}

impl OutDir {
    /// Creates `dir`. A directory left by an earlier run is cleared of the
    /// files its manifest declared; anything else in it is an error.
    pub fn prepare(dir: &Path) -> Result<Self> {
        if dir.exists() {
            let manifest = dir.join(MANIFEST);
            if manifest.exists() {
                let old: RunManifest = serde_json::from_str(&fs::read_to_string(&manifest)?)
                    .map_err(|e| Error::Parse(format!("{}: {e}", manifest.display())))?;
                for f in &old.files {
                    let p = dir.join(f);
                    if p.exists() {
                        fs::remove_file(p)?;
                    }
                }
                fs::remove_file(&manifest)?;
            }
            if let Some(entry) = fs::read_dir(dir)?.next() {
                return Err(Error::config(
                    "--out",
                    format!("{} holds files not written by thinfilm (e.g. {:?})", dir.display(), entry?.file_name()),
                ));
            }
        }
        fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), files: Vec::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let p = self.dir.join(name);
        fs::write(&p, bytes)?;
        self.files.push(name.to_string());
        Ok(p)
    }

    pub fn write_json(&mut self, name: &str, value: &serde_json::Value) -> Result<PathBuf> {
        let mut text = serde_json::to_string_pretty(value).expect("json value serializes");
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    /// Writes the manifest through a temporary file and a rename.
    pub fn finish(self, command: &str, config: Option<&Path>, elapsed: Duration, exit_status: u8) -> Result<()> {
        let m = RunManifest {
            schema: SCHEMA_VERSION.to_string(),
            command: command.to_string(),
            config: config.map(Path::to_path_buf),
            output_dir: self.dir.clone(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            duration_secs: elapsed.as_secs_f64(),
            exit_status,
            files: self.files,
        };
        let tmp = self.dir.join(".manifest.json.tmp");
        fs::write(&tmp, serde_json::to_string_pretty(&m).expect("manifest serializes") + "\n")?;
        fs::rename(tmp, self.dir.join(MANIFEST))?;
        Ok(())
    }
}

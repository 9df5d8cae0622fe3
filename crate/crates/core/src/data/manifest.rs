use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.toml";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub dataset: String,
    /// Relative to the data directory.
    pub path: String,
    pub url: Option<String>,
    pub sha256: Option<String>,
    #[serde(default)]
    pub gzip: bool,
    #[serde(default)]
    pub vendored: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    #[serde(rename = "file", default)]
    pub files: Vec<ManifestEntry>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl Manifest {
    /// Reads `manifest.toml` from `dir`; a missing manifest is empty.
    pub fn load(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST_FILE);
        match std::fs::read_to_string(&path) {
            Ok(text) => Self::parse(&text),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Self::default()),
            Err(e) => Err(Error::io(path, e)),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse {
            line: e.span().map_or(0, |s| text[..s.start].lines().count()),
            msg: e.message().to_string(),
        })
    }

    pub fn entry(&self, rel: &str) -> Option<&ManifestEntry> {
        self.files.iter().find(|f| f.path == rel)
    }

    /// Expected digest for `rel`: the manifest value, or the `.sha256`
    /// sidecar recorded when the file was fetched.
    pub fn expected_digest(&self, dir: &Path, rel: &str) -> Option<String> {
        if let Some(d) = self.entry(rel).and_then(|e| e.sha256.clone()) {
            return Some(d);
        }
        std::fs::read_to_string(digest_path(dir, rel))
            .ok()
            .map(|s| s.trim().to_string())
    }

    pub fn verify(&self, dir: &Path, rel: &str, bytes: &[u8]) -> Result<()> {
        if let Some(expected) = self.expected_digest(dir, rel) {
            let actual = sha256_hex(bytes);
            if actual != expected {
                return Err(Error::Checksum {
                    path: dir.join(rel),
                    expected,
                    actual,
                });
            }
        }
        Ok(())
    }
}

pub fn digest_path(dir: &Path, rel: &str) -> PathBuf {
    dir.join(format!("{rel}.sha256"))
}

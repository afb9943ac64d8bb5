//! Content-addressed certificate storage.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use sha2::{Digest, Sha256};

use crate::envelope::Envelope;

pub const DEFAULT_STORE: &str = "symrank-store";

pub struct Store {
    root: PathBuf,
}

impl Store {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Store { root: root.into() }
    }

    /// Writes `env` under the SHA-256 of its canonical JSON and returns the
    /// path. Storing the same envelope twice is a no-op.
    pub fn put(&self, env: &Envelope) -> Result<PathBuf> {
        let bytes = canonical_bytes(env)?;
        let digest = hex::encode(Sha256::digest(&bytes));
        fs::create_dir_all(&self.root).with_context(|| format!("creating store {}", self.root.display()))?;
        let path = self.root.join(format!("{digest}.json"));
        if !path.exists() {
            let tmp = self.root.join(format!(".{digest}.tmp"));
            fs::write(&tmp, &bytes).with_context(|| format!("writing {}", tmp.display()))?;
            fs::rename(&tmp, &path)?;
        }
        Ok(path)
    }
}

/// Compact JSON with struct fields in declaration order and maps sorted.
pub fn canonical_bytes(env: &Envelope) -> Result<Vec<u8>> {
    // round trip through Value so every map is ordered by key
    let value = serde_json::to_value(env)?;
    Ok(serde_json::to_vec(&value)?)
}

pub fn load(path: &Path) -> Result<Envelope> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing certificate {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelope::{Payload, Provenance, TargetDescriptor};
    use symrank::wpower::dicke_decomposition;

    #[test]
    fn idempotent_put() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::new(dir.path());
        let env = Envelope::new(
            TargetDescriptor::Dicke { m: 3, n: 2 },
            Payload::Symmetric(dicke_decomposition(3, 2).unwrap()),
            Provenance {
                command: "dicke --m 3 --n 2".into(),
                seed: None,
            },
        );
        let a = store.put(&env).unwrap();
        let b = store.put(&env).unwrap();
        assert_eq!(a, b);
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
        assert_eq!(load(&a).unwrap(), env);
    }
}

//! Content-addressed result cache.
//!
//! Entries are named by `sha256(input bytes, operation, params)` and hold a
//! header line, the sha256 of the payload, then the payload. An entry whose
//! payload digest does not match is treated as absent.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use sha2::{Digest, Sha256};

const HEADER: &str = "birkhoff-cache 1";

pub struct Cache {
    dir: PathBuf,
}

fn digest(parts: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    hex::encode(h.finalize())
}

impl Cache {
    pub fn open(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating cache directory {}", dir.display()))?;
        Ok(Cache { dir: dir.to_path_buf() })
    }

    pub fn key(input: &[u8], operation: &str, params: &str) -> String {
        digest(&[input, operation.as_bytes(), params.as_bytes()])
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.entry"))
    }

    pub fn get(&self, key: &str) -> Option<String> {
        let text = fs::read_to_string(self.path(key)).ok()?;
        let (header, rest) = text.split_once('\n')?;
        let (sum, payload) = rest.split_once('\n')?;
        (header == HEADER && sum == digest(&[payload.as_bytes()])).then(|| payload.to_string())
    }

    pub fn put(&self, key: &str, payload: &str) -> Result<()> {
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        write!(tmp, "{HEADER}\n{}\n{payload}", digest(&[payload.as_bytes()]))?;
        tmp.as_file().sync_all()?;
        tmp.persist(self.path(key))?;
        Ok(())
    }
}

//! On-disk cache for brute-force coefficient tables.
//!
//! One file per key, named by the SHA-256 of the key. The first line records
//! the key and the SHA-256 of the payload; a file that fails either check is
//! ignored and rewritten. Writes go through a temporary file and a rename.

use sha2::{Digest, Sha256};
use std::io::Write;
use std::path::PathBuf;

const MAGIC: &str = "# blockmap-cache v1";

pub fn sha256_hex(data: &[u8]) -> String {
    hex::encode(Sha256::digest(data))
}

#[derive(Clone, Debug)]
pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    /// `BLOCKMAP_CACHE`, or `.cache/` in the working directory.
    pub fn from_env() -> Self {
        let dir = std::env::var_os("BLOCKMAP_CACHE").map(PathBuf::from).unwrap_or_else(|| PathBuf::from(".cache"));
        Cache { dir: Some(dir) }
    }

    pub fn disabled() -> Self {
        Cache { dir: None }
    }

    pub fn path_for(&self, key: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{}.txt", sha256_hex(key.as_bytes()))))
    }

    pub fn load(&self, key: &str) -> Option<String> {
        let text = std::fs::read_to_string(self.path_for(key)?).ok()?;
        let (header, payload) = text.split_once('\n')?;
        let expected = format!("{MAGIC} key={key} sha256={}", sha256_hex(payload.as_bytes()));
        (header == expected).then(|| payload.to_string())
    }

    pub fn store(&self, key: &str, payload: &str) -> std::io::Result<()> {
        let (Some(dir), Some(path)) = (self.dir.as_ref(), self.path_for(key)) else {
            return Ok(());
        };
        std::fs::create_dir_all(dir)?;
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        writeln!(tmp, "{MAGIC} key={key} sha256={}", sha256_hex(payload.as_bytes()))?;
        tmp.write_all(payload.as_bytes())?;
        tmp.as_file().sync_all()?;
        tmp.persist(&path).map_err(|e| e.error)?;
        Ok(())
    }

    /// Cached payload, or `compute()` stored for next time. A failed store only warns.
    pub fn get_or_compute<E>(&self, key: &str, compute: impl FnOnce() -> Result<String, E>) -> Result<String, E> {
        if let Some(hit) = self.load(key) {
            return Ok(hit);
        }
        let payload = compute()?;
        if let Err(e) = self.store(key, &payload) {
            eprintln!("warning: could not write cache entry for {key}: {e}");
        }
        Ok(payload)
    }
}

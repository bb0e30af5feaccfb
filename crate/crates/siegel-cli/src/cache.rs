//! Persistent expansion cache: content-addressed JSON blobs on disk.
//!
//! A cache entry is the exact byte string the command would have written,
//! keyed by a hash of the computation identity (format version, level,
//! canonical index vector, horizon).  Hits are therefore byte-identical to
//! recomputation by construction, and a format version bump changes every
//! key at once.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use sha2::{Digest, Sha256};

/// Bump when the serialized shape of any cached payload changes.
pub const FORMAT_VERSION: u32 = 1;

static TMP_COUNTER: AtomicU64 = AtomicU64::new(0);

pub struct Cache {
    dir: Option<PathBuf>,
    warned: bool,
}

impl Cache {
    /// Resolve the cache location: `SIEGEL_CACHE_DIR` overrides `--cache-dir`,
    /// which overrides a per-user directory under the system temp dir.
    /// `--no-cache` disables persistence entirely.
    pub fn resolve(no_cache: bool, flag: Option<PathBuf>) -> Cache {
        if no_cache {
            return Cache {
                dir: None,
                warned: false,
            };
        }
        let dir = std::env::var_os("SIEGEL_CACHE_DIR")
            .map(PathBuf::from)
            .or(flag)
            .unwrap_or_else(|| std::env::temp_dir().join("siegel-cache"));
        Cache {
            dir: Some(dir),
            warned: false,
        }
    }

    /// Fetch the entry for `key`, or compute, persist, and return it.
    ///
    /// `validate` guards against corrupt entries: anything unreadable or
    /// invalid is recomputed and overwritten, with a single warning on
    /// stderr.  Cache I/O failures degrade to plain computation — the cache
    /// is never allowed to turn a correct answer into an error.
    pub fn get_or_compute<E>(
        &mut self,
        key: &str,
        validate: impl Fn(&str) -> bool,
        produce: impl FnOnce() -> Result<String, E>,
    ) -> Result<String, E> {
        let Some(dir) = self.dir.clone() else {
            return produce();
        };
        let path = dir.join(format!("{}.json", hash_key(key)));
        match std::fs::read_to_string(&path) {
            Ok(text) if validate(&text) => return Ok(text),
            Ok(_) => self.warn(
                "cache-corrupt",
                "cache entry failed validation; recomputing",
                &path,
            ),
            Err(e) if e.kind() != std::io::ErrorKind::NotFound => {
                self.warn("cache-unreadable", &e.to_string(), &path)
            }
            Err(_) => {}
        }
        let text = produce()?;
        if let Err(e) = write_atomic(&dir, &path, &text) {
            self.warn("cache-unwritable", &e.to_string(), &path);
        }
        Ok(text)
    }

    fn warn(&mut self, code: &str, message: &str, path: &Path) {
        if self.warned {
            return;
        }
        self.warned = true;
        eprintln!(
            "{}",
            serde_json::json!({
                "code": code,
                "message": message,
                "context": { "path": path.display().to_string() },
            })
        );
    }
}

fn hash_key(key: &str) -> String {
    let digest = Sha256::digest(key.as_bytes());
    let mut hex = String::with_capacity(64);
    for byte in digest {
        hex.push_str(&format!("{byte:02x}"));
    }
    hex
}

/// Write via a unique temp file in the same directory, then rename, so
/// concurrent readers only ever see complete entries.
fn write_atomic(dir: &Path, path: &Path, text: &str) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let tmp = dir.join(format!(
        ".tmp-{}-{}",
        std::process::id(),
        TMP_COUNTER.fetch_add(1, Ordering::Relaxed)
    ));
    std::fs::write(&tmp, text)?;
    std::fs::rename(&tmp, path)
}

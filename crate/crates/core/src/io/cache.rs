use std::collections::HashMap;
use std::fs::{self, OpenOptions};
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solver::{Rung, RungKey, RungStore};

/// File name of the rung cache inside the cache directory.
pub const CACHE_FILE: &str = "rungs.jsonl";
/// Environment variable naming the default cache directory.
pub const CACHE_DIR_ENV: &str = "GCCF_CACHE_DIR";

/// One line of the cache file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    /// [`RungKey::canonical`] rendering, including the code version.
    pub key: String,
    pub rung: Rung,
}

pub fn parse_cache_line(line: &str) -> Result<CacheEntry> {
    let entry: CacheEntry = serde_json::from_str(line)?;
    let r = &entry.rung;
    if !entry.key.contains(";code=") {
        return Err(Error::Parse("cache key lacks a code version".into()));
    }
    if !(r.h_lo.is_finite() && r.h_hi.is_finite() && r.h_lo <= r.h_hi) {
        return Err(Error::Parse(format!("cached rung has an invalid bracket [{}, {}]", r.h_lo, r.h_hi)));
    }
    Ok(entry)
}

/// Append-only JSON-lines store of finished rungs.
///
/// Entries are never rewritten. Lines that fail to parse (for example a
/// truncated final line) are skipped on load and counted.
#[derive(Debug)]
pub struct RungCache {
    path: PathBuf,
    entries: Mutex<HashMap<String, Rung>>,
    skipped_lines: usize,
}

impl RungCache {
    pub fn open(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join(CACHE_FILE);
        let mut entries = HashMap::new();
        let mut skipped_lines = 0;
        match fs::read_to_string(&path) {
            Ok(text) => {
                for line in text.lines().filter(|l| !l.trim().is_empty()) {
                    match parse_cache_line(line) {
                        Ok(e) => {
                            entries.entry(e.key).or_insert(e.rung);
                        }
                        Err(_) => skipped_lines += 1,
                    }
                }
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
            Err(e) => return Err(Error::io(&path, e)),
        }
        Ok(RungCache {
            path,
            entries: Mutex::new(entries),
            skipped_lines,
        })
    }

    /// The cache named by `GCCF_CACHE_DIR`, if set.
    pub fn from_env() -> Result<Option<Self>> {
        match std::env::var_os(CACHE_DIR_ENV) {
            Some(dir) if !dir.is_empty() => RungCache::open(Path::new(&dir)).map(Some),
            _ => Ok(None),
        }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn len(&self) -> usize {
        self.entries.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn skipped_lines(&self) -> usize {
        self.skipped_lines
    }
}

impl RungStore for RungCache {
    fn get(&self, key: &RungKey) -> Option<Rung> {
        self.entries.lock().expect("cache lock").get(&key.canonical()).cloned()
    }

    fn put(&self, key: &RungKey, rung: &Rung) -> Result<()> {
        let key = key.canonical();
        let mut entries = self.entries.lock().expect("cache lock");
        if entries.contains_key(&key) {
            return Ok(());
        }
        let mut line = serde_json::to_string(&CacheEntry {
            key: key.clone(),
            rung: rung.clone(),
        })?;
        line.push('\n');
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)
            .map_err(|e| Error::io(&self.path, e))?;
        file.write_all(line.as_bytes()).map_err(|e| Error::io(&self.path, e))?;
        entries.insert(key, rung.clone());
        Ok(())
    }
}

//! On-disk cache of q-series bases.
//!
//! One JSON file per key, written through a temporary file and a rename while
//! holding `<dir>/.lock`. Each entry carries the format version and the
//! SHA-256 of its payload; entries of another version are ignored and
//! corrupt entries are recomputed and overwritten.

use std::fs::{self, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::thread;
use std::time::{Duration, SystemTime};

use halfint_core::QSeries;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::codec::{series_from_json, series_to_json, CodecError};

pub const FORMAT_VERSION: u32 = 1;

const LOCK_NAME: &str = ".lock";
const LOCK_WAIT: Duration = Duration::from_secs(60);
const LOCK_STALE: Duration = Duration::from_secs(600);

#[derive(Debug, thiserror::Error)]
pub enum CacheError {
    #[error("cache i/o: {0}")]
    Io(#[from] io::Error),
    #[error("corrupt cache entry {path}: {reason}")]
    Corrupt { path: PathBuf, reason: String },
    #[error("timed out waiting for {0}")]
    LockTimeout(PathBuf),
}

/// Level 1 integral weight (`weight` = w) or level 4 plus space (`weight` = k).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CacheKey {
    pub level: u32,
    pub weight: u32,
    pub trunc: usize,
    pub kind: &'static str,
}

impl CacheKey {
    pub fn cusp(weight: u32, trunc: usize) -> Self {
        CacheKey {
            level: 1,
            weight,
            trunc,
            kind: "cusp",
        }
    }

    pub fn plus(k: u32, trunc: usize) -> Self {
        CacheKey {
            level: 4,
            weight: k,
            trunc,
            kind: "plus",
        }
    }

    fn file_name(&self) -> String {
        format!(
            "v{FORMAT_VERSION}-level{}-{}-{}-t{}.json",
            self.level, self.kind, self.weight, self.trunc
        )
    }

    fn to_json(&self) -> Value {
        json!({ "level": self.level, "weight": self.weight, "trunc": self.trunc, "kind": self.kind })
    }
}

pub fn checksum(payload: &Value) -> String {
    hex::encode(Sha256::digest(payload.to_string().as_bytes()))
}

/// Serialized entry; key order is fixed, so equal payloads give equal bytes.
pub fn encode_entry(key: &CacheKey, series: &[QSeries]) -> String {
    let payload = Value::Array(series.iter().map(series_to_json).collect());
    let entry = json!({
        "format_version": FORMAT_VERSION,
        "key": key.to_json(),
        "checksum": checksum(&payload),
        "payload": payload,
    });
    entry.to_string() + "\n"
}

pub enum Decoded {
    Hit(Vec<QSeries>),
    /// Another format version or another key: ignored.
    Stale,
}

pub fn decode_entry(key: &CacheKey, text: &str) -> Result<Decoded, String> {
    let v: Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
    if v.get("format_version").and_then(Value::as_u64) != Some(FORMAT_VERSION as u64) {
        return Ok(Decoded::Stale);
    }
    if v.get("key") != Some(&key.to_json()) {
        return Ok(Decoded::Stale);
    }
    let payload = v.get("payload").ok_or("missing payload")?;
    if v.get("checksum").and_then(Value::as_str) != Some(checksum(payload).as_str()) {
        return Err("checksum mismatch".into());
    }
    let items = payload.as_array().ok_or("payload is not an array")?;
    let series = items
        .iter()
        .map(series_from_json)
        .collect::<Result<Vec<_>, CodecError>>()
        .map_err(|e| e.to_string())?;
    if series.iter().any(|s| s.trunc() != key.trunc) {
        return Err("truncation differs from key".into());
    }
    Ok(Decoded::Hit(series))
}

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

/// Exclusive lock held while the guard lives.
struct LockGuard(PathBuf);

impl Drop for LockGuard {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.0);
    }
}

impl Cache {
    /// Creates the directory if needed and checks that it is writable.
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, CacheError> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        let probe = dir.join(format!(".probe-{}", std::process::id()));
        fs::write(&probe, b"")?;
        fs::remove_file(&probe)?;
        Ok(Cache { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, key: &CacheKey) -> PathBuf {
        self.dir.join(key.file_name())
    }

    fn lock(&self) -> Result<LockGuard, CacheError> {
        let path = self.dir.join(LOCK_NAME);
        let start = SystemTime::now();
        loop {
            match OpenOptions::new().write(true).create_new(true).open(&path) {
                Ok(mut f) => {
                    writeln!(f, "{}", std::process::id())?;
                    return Ok(LockGuard(path));
                }
                Err(e) if e.kind() == io::ErrorKind::AlreadyExists => {
                    let age = fs::metadata(&path)
                        .and_then(|m| m.modified())
                        .ok()
                        .and_then(|t| t.elapsed().ok());
                    if age.is_some_and(|a| a > LOCK_STALE) {
                        let _ = fs::remove_file(&path);
                        continue;
                    }
                    if start.elapsed().unwrap_or_default() > LOCK_WAIT {
                        return Err(CacheError::LockTimeout(path));
                    }
                    thread::sleep(Duration::from_millis(20));
                }
                Err(e) => return Err(e.into()),
            }
        }
    }

    /// Ok(None) when absent or stale.
    pub fn get(&self, key: &CacheKey) -> Result<Option<Vec<QSeries>>, CacheError> {
        let path = self.path(key);
        let _guard = self.lock()?;
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        match decode_entry(key, &text) {
            Ok(Decoded::Hit(s)) => Ok(Some(s)),
            Ok(Decoded::Stale) => Ok(None),
            Err(reason) => Err(CacheError::Corrupt { path, reason }),
        }
    }

    pub fn put(&self, key: &CacheKey, series: &[QSeries]) -> Result<(), CacheError> {
        let path = self.path(key);
        let tmp = self
            .dir
            .join(format!("{}.tmp-{}", key.file_name(), std::process::id()));
        let _guard = self.lock()?;
        fs::write(&tmp, encode_entry(key, series))?;
        fs::rename(&tmp, &path)?;
        Ok(())
    }

    /// Cached value, or `compute` stored under the key; corrupt entries are replaced.
    pub fn get_or_compute<E>(
        &self,
        key: &CacheKey,
        compute: impl FnOnce() -> Result<Vec<QSeries>, E>,
    ) -> Result<Vec<QSeries>, E>
    where
        E: From<CacheError>,
    {
        match self.get(key) {
            Ok(Some(s)) => return Ok(s),
            Ok(None) | Err(CacheError::Corrupt { .. }) => {}
            Err(e) => return Err(e.into()),
        }
        let s = compute()?;
        self.put(key, &s)?;
        Ok(s)
    }
}

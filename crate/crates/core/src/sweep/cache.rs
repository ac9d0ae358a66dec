//! On-disk spectrum cache.
//!
//! One file per spectrum at `<dir>/<first two hash bytes>/<hash>.spec`: a
//! JSON header line followed by the quasi-energies as little-endian `f64`
//! pairs `(Re ε, Im ε)`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::model::ResonanceParams;
use crate::{Error, Result, C64};

/// Bumped whenever a change could alter stored spectra.
pub const CACHE_VERSION: &str = "ptqkr-spectrum-1";

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CacheKey(pub String);

#[derive(Serialize)]
struct KeyRecord<'a> {
    version: &'a str,
    params: &'a ResonanceParams,
    tol_real: f64,
}

impl CacheKey {
    /// SHA-256 of the canonical JSON record `{version, params, tol_real}`.
    pub fn new(params: &ResonanceParams, tol_real: f64) -> Self {
        let record = KeyRecord {
            version: CACHE_VERSION,
            params,
            tol_real,
        };
        let json = serde_json::to_vec(&record).expect("parameter record serializes");
        Self(hex::encode(Sha256::digest(&json)))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    version: String,
    key: String,
    params: ResonanceParams,
    tol_real: f64,
    dim: usize,
}

#[derive(Debug)]
pub struct SpectrumCache {
    dir: PathBuf,
    computations: AtomicUsize,
    writes: AtomicUsize,
}

impl SpectrumCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Self {
            dir,
            computations: AtomicUsize::new(0),
            writes: AtomicUsize::new(0),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Number of times a compute closure has run through this cache.
    pub fn computations(&self) -> usize {
        self.computations.load(Ordering::SeqCst)
    }

    pub fn path_of(&self, key: &CacheKey) -> PathBuf {
        self.dir.join(&key.0[..4]).join(format!("{}.spec", key.0))
    }

    /// Stored quasi-energies for `key`; `Ok(None)` when absent.
    pub fn load(&self, key: &CacheKey) -> Result<Option<Vec<C64>>> {
        let path = self.path_of(key);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        decode(&bytes, key).map(Some)
    }

    pub fn store(
        &self,
        key: &CacheKey,
        params: &ResonanceParams,
        tol_real: f64,
        eps: &[C64],
    ) -> Result<()> {
        let header = Header {
            version: CACHE_VERSION.into(),
            key: key.0.clone(),
            params: *params,
            tol_real,
            dim: eps.len(),
        };
        let mut bytes = serde_json::to_vec(&header).map_err(|e| Error::Io(e.to_string()))?;
        bytes.push(b'\n');
        for e in eps {
            bytes.extend_from_slice(&e.re.to_le_bytes());
            bytes.extend_from_slice(&e.im.to_le_bytes());
        }
        let path = self.path_of(key);
        let parent = path.parent().expect("cache path has a parent");
        fs::create_dir_all(parent)?;
        let n = self.writes.fetch_add(1, Ordering::SeqCst);
        let tmp = parent.join(format!("{}.tmp.{}.{n}", key.0, std::process::id()));
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(&bytes)?;
            f.sync_all()?;
        }
        fs::rename(&tmp, &path)?;
        Ok(())
    }

    /// Cached spectrum for `(params, tol_real)`, or the result of `compute`
    /// written back atomically. Corrupt entries are recomputed and overwritten.
    pub fn run_cached(
        &self,
        params: &ResonanceParams,
        tol_real: f64,
        compute: impl FnOnce() -> Result<Vec<C64>>,
    ) -> Result<Vec<C64>> {
        let key = CacheKey::new(params, tol_real);
        match self.load(&key) {
            Ok(Some(eps)) => return Ok(eps),
            Ok(None) => {}
            Err(Error::CacheCorrupt(why)) => {
                log::warn!("cache entry {} is corrupt ({why}); recomputing", key.0);
            }
            Err(e) => return Err(e),
        }
        self.computations.fetch_add(1, Ordering::SeqCst);
        let eps = compute()?;
        self.store(&key, params, tol_real, &eps)?;
        Ok(eps)
    }
}

fn decode(bytes: &[u8], key: &CacheKey) -> Result<Vec<C64>> {
    let corrupt = |why: &str| Error::CacheCorrupt(why.to_string());
    let nl = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| corrupt("missing header line"))?;
    let header: Header =
        serde_json::from_slice(&bytes[..nl]).map_err(|e| corrupt(&format!("bad header: {e}")))?;
    if header.version != CACHE_VERSION {
        return Err(corrupt(&format!(
            "version {} != {CACHE_VERSION}",
            header.version
        )));
    }
    if header.key != key.0 {
        return Err(corrupt("key mismatch"));
    }
    let body = &bytes[nl + 1..];
    if body.len() != 16 * header.dim {
        return Err(corrupt(&format!(
            "payload has {} bytes, expected {}",
            body.len(),
            16 * header.dim
        )));
    }
    Ok(body
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
            C64::new(re, im)
        })
        .collect())
}

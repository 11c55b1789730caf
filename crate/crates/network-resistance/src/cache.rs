//! Disk-backed cache of renormalization factors keyed by `family:d:l`.
//!
//! Writes go through a read-merge-rename cycle so concurrent writers converge
//! to the union of their entries; entries disagreeing beyond tolerance abort
//! instead of silently overwriting.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use gasket_geometry::Family;
use serde::{Deserialize, Serialize};

use crate::{rho, rho_via_trace, vicsek_fixed_point, NetError, Result};

const CACHE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CacheEntry {
    pub rho: f64,
    /// Cross-route disagreement (gasket) or fixed-point residual (Vicsek).
    pub residual: f64,
    pub method: String,
}

#[derive(Debug, Default)]
pub struct RhoCache {
    path: Option<PathBuf>,
    map: BTreeMap<String, CacheEntry>,
}

impl RhoCache {
    pub fn in_memory() -> Self {
        RhoCache::default()
    }

    /// Opens a cache file, treating a missing file as empty.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let map = read_map(&path)?;
        Ok(RhoCache {
            path: Some(path),
            map,
        })
    }

    pub fn key(family: Family, d: u32, l: u32) -> String {
        format!("{family}:{d}:{l}")
    }

    pub fn get(&self, family: Family, d: u32, l: u32) -> Option<&CacheEntry> {
        self.map.get(&Self::key(family, d, l))
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Inserts a freshly computed entry. An existing entry must agree to
    /// relative tolerance 1e-10, else the mismatch aborts the operation.
    pub fn validate_and_insert(
        &mut self,
        family: Family,
        d: u32,
        l: u32,
        entry: CacheEntry,
    ) -> Result<()> {
        let key = Self::key(family, d, l);
        if let Some(existing) = self.map.get(&key) {
            let rel = (existing.rho - entry.rho).abs() / existing.rho.abs().max(1.0);
            if rel > CACHE_TOLERANCE {
                return Err(NetError::CacheMismatch {
                    key,
                    cached: existing.rho,
                    computed: entry.rho,
                });
            }
        }
        self.map.insert(key, entry);
        self.persist()
    }

    fn persist(&self) -> Result<()> {
        let Some(path) = &self.path else {
            return Ok(());
        };
        // read-merge-rename: concurrent writers keep each other's entries
        let mut merged = read_map(path)?;
        for (k, v) in &self.map {
            if let Some(existing) = merged.get(k) {
                let rel = (existing.rho - v.rho).abs() / existing.rho.abs().max(1.0);
                if rel > CACHE_TOLERANCE {
                    return Err(NetError::CacheMismatch {
                        key: k.clone(),
                        cached: existing.rho,
                        computed: v.rho,
                    });
                }
            }
            merged.insert(k.clone(), v.clone());
        }
        if let Some(dir) = path.parent() {
            if !dir.as_os_str().is_empty() {
                std::fs::create_dir_all(dir)?;
            }
        }
        let tmp = path.with_extension("tmp");
        std::fs::write(
            &tmp,
            serde_json::to_string_pretty(&merged).expect("cache JSON"),
        )?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }
}

fn read_map(path: &Path) -> Result<BTreeMap<String, CacheEntry>> {
    match std::fs::read_to_string(path) {
        Ok(text) => serde_json::from_str(&text)
            .map_err(|e| NetError::InvalidInput(format!("corrupt cache file {path:?}: {e}"))),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(BTreeMap::new()),
        Err(e) => Err(e.into()),
    }
}

/// Renormalization factor through the cache: cached values are returned as-is,
/// misses are computed (resistance route for the gasket, fixed point for the
/// Vicsek families) and stored.
pub fn rho_cached(cache: &mut RhoCache, family: Family, d: u32, l: u32) -> Result<f64> {
    if let Some(e) = cache.get(family, d, l) {
        return Ok(e.rho);
    }
    let entry = compute_entry(family, d, l)?;
    let value = entry.rho;
    cache.validate_and_insert(family, d, l, entry)?;
    Ok(value)
}

/// Recomputes the entry and validates it against the cache; used to confirm
/// cache integrity.
pub fn recompute_and_validate(cache: &mut RhoCache, family: Family, d: u32, l: u32) -> Result<f64> {
    let entry = compute_entry(family, d, l)?;
    let value = entry.rho;
    cache.validate_and_insert(family, d, l, entry)?;
    Ok(value)
}

fn compute_entry(family: Family, d: u32, l: u32) -> Result<CacheEntry> {
    match family {
        Family::Sg => {
            let value = rho(d, l)?;
            let other = rho_via_trace(d, l)?;
            Ok(CacheEntry {
                rho: value,
                residual: (value - other).abs() / value,
                method: "corner-resistance".into(),
            })
        }
        Family::Vs2d | Family::Vs3d => {
            let fp = vicsek_fixed_point(family, l, 1e-12, 500)?;
            Ok(CacheEntry {
                rho: fp.rho,
                residual: fp.residual,
                method: "fixed-point".into(),
            })
        }
    }
}

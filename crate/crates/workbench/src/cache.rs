//! On-disk memo of eigensymbols, keyed by (level, label, sign, code version).

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use signed_iwasawa_core::iwasawa::Sign;
use signed_iwasawa_core::modsym::{extract_eigensymbol, CurveData, EigenSymbol};

use crate::error::Result;
use crate::formats::{write_atomic, SCHEMA_VERSION};

pub const CODE_VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "+symbols1");

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheKey {
    pub level: u64,
    pub label: String,
    pub sign: Sign,
    pub code_version: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct CacheEntry {
    schema_version: u32,
    key: CacheKey,
    symbol: EigenSymbol,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CacheStatus {
    Disabled,
    Hit,
    Miss,
    /// An unreadable or invalid entry was replaced.
    Replaced,
}

#[derive(Clone, Debug, Default)]
pub struct SymbolCache {
    dir: Option<PathBuf>,
}

impl SymbolCache {
    pub fn new(dir: Option<PathBuf>) -> Self {
        Self { dir }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn key(curve: &CurveData, sign: Sign) -> CacheKey {
        CacheKey { level: curve.conductor, label: curve.label.clone(), sign, code_version: CODE_VERSION.into() }
    }

    pub fn path_for(&self, key: &CacheKey) -> Option<PathBuf> {
        let safe: String = key
            .label
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
            .collect();
        let sign = match key.sign {
            Sign::Plus => "plus",
            Sign::Minus => "minus",
        };
        self.dir
            .as_ref()
            .map(|d| d.join(format!("eigensymbol-{}-{safe}-{sign}-{}.json", key.level, key.code_version)))
    }

    /// Loads the symbol if a valid entry exists, otherwise computes and
    /// stores it.
    pub fn eigensymbol(&self, curve: &CurveData, sign: Sign) -> Result<(EigenSymbol, CacheStatus)> {
        let key = Self::key(curve, sign);
        let Some(path) = self.path_for(&key) else {
            return Ok((extract_eigensymbol(curve, sign)?, CacheStatus::Disabled));
        };
        let mut status = CacheStatus::Miss;
        if path.exists() {
            match Self::load(&path, &key, curve) {
                Some(symbol) => return Ok((symbol, CacheStatus::Hit)),
                None => status = CacheStatus::Replaced,
            }
        }
        let symbol = extract_eigensymbol(curve, sign)?;
        let entry = CacheEntry { schema_version: SCHEMA_VERSION, key, symbol };
        let text = serde_json::to_vec_pretty(&entry).expect("entry serializes");
        if let Err(e) = write_atomic(&path, &text) {
            eprintln!("warning: cannot write cache entry {}: {e}", path.display());
        }
        Ok((entry.symbol, status))
    }

    fn load(path: &Path, key: &CacheKey, curve: &CurveData) -> Option<EigenSymbol> {
        let text = fs::read(path).ok()?;
        let entry: CacheEntry = serde_json::from_slice(&text).ok()?;
        if entry.schema_version != SCHEMA_VERSION || &entry.key != key || entry.symbol.sign != key.sign {
            return None;
        }
        entry.symbol.verify(curve).ok()?;
        Some(entry.symbol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use signed_iwasawa_core::modsym::builtin_curve;

    #[test]
    fn hit_after_miss_and_corruption_recovery() {
        let dir = tempfile::tempdir().unwrap();
        let cache = SymbolCache::new(Some(dir.path().to_path_buf()));
        let e = builtin_curve("32a1").unwrap();
        let (a, s1) = cache.eigensymbol(&e, Sign::Plus).unwrap();
        assert_eq!(s1, CacheStatus::Miss);
        let (b, s2) = cache.eigensymbol(&e, Sign::Plus).unwrap();
        assert_eq!(s2, CacheStatus::Hit);
        assert_eq!(a, b);
        let path = cache.path_for(&SymbolCache::key(&e, Sign::Plus)).unwrap();
        fs::write(&path, b"{ not json").unwrap();
        let (c, s3) = cache.eigensymbol(&e, Sign::Plus).unwrap();
        assert_eq!(s3, CacheStatus::Replaced);
        assert_eq!(a, c);
        assert_eq!(cache.eigensymbol(&e, Sign::Plus).unwrap().1, CacheStatus::Hit);
        // a well-formed entry with altered values is rejected too
        let mut entry: serde_json::Value = serde_json::from_slice(&fs::read(&path).unwrap()).unwrap();
        entry["symbol"]["values"][0] = serde_json::json!(12345);
        fs::write(&path, serde_json::to_vec(&entry).unwrap()).unwrap();
        assert_eq!(cache.eigensymbol(&e, Sign::Plus).unwrap().1, CacheStatus::Replaced);
    }
}

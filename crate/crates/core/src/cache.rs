//! Content-addressed on-disk cache of per-cell metric results.
//!
//! Entries live at `<dir>/<hh>/<hash>.json`, where `hash` is the SHA-256 of
//! everything that determines the cell's values. Floats are stored as raw
//! IEEE-754 bits so a warm run reproduces a cold one exactly.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::metrics::{Metric, MetricValue, MetricVector, Summary};

/// Incrementally hashed cache key.
#[derive(Clone, Default)]
pub struct KeyBuilder {
    hasher: Sha256,
}

impl KeyBuilder {
    pub fn new(namespace: &str) -> Self {
        let mut k = Self::default();
        k.str(namespace);
        k
    }

    pub fn str(&mut self, s: &str) -> &mut Self {
        self.hasher.update((s.len() as u64).to_le_bytes());
        self.hasher.update(s.as_bytes());
        self
    }

    pub fn u64(&mut self, v: u64) -> &mut Self {
        self.hasher.update(v.to_le_bytes());
        self
    }

    pub fn f64(&mut self, v: f64) -> &mut Self {
        self.u64(v.to_bits())
    }

    pub fn finish(&self) -> String {
        hex::encode(self.hasher.clone().finalize())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum StoredValue {
    Defined { bits: u64, skipped: usize },
    Undefined(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoredVector {
    /// Twelve values in `Metric::ALL` x `Summary::ALL` order.
    pub values: Vec<StoredValue>,
    pub coverage_bits: u64,
}

impl From<&MetricVector> for StoredVector {
    fn from(mv: &MetricVector) -> Self {
        let mut values = Vec::with_capacity(12);
        for m in Metric::ALL {
            for s in Summary::ALL {
                values.push(match mv.get(m, s) {
                    MetricValue::Defined { value, skipped } => StoredValue::Defined {
                        bits: value.to_bits(),
                        skipped: *skipped,
                    },
                    MetricValue::Undefined(r) => StoredValue::Undefined(r.clone()),
                });
            }
        }
        Self {
            values,
            coverage_bits: mv.component_coverage.to_bits(),
        }
    }
}

impl StoredVector {
    pub fn to_metric_vector(&self) -> Option<MetricVector> {
        if self.values.len() != Metric::ALL.len() * Summary::ALL.len() {
            return None;
        }
        let mut it = self.values.iter();
        let mut values = std::collections::BTreeMap::new();
        for m in Metric::ALL {
            for s in Summary::ALL {
                let v = match it.next()? {
                    StoredValue::Defined { bits, skipped } => MetricValue::Defined {
                        value: f64::from_bits(*bits),
                        skipped: *skipped,
                    },
                    StoredValue::Undefined(r) => MetricValue::Undefined(r.clone()),
                };
                values.insert((m, s), v);
            }
        }
        Some(MetricVector {
            values,
            component_coverage: f64::from_bits(self.coverage_bits),
        })
    }
}

/// Everything computed for one (text, size, stopwords, strategy, P) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellEntry {
    pub original: StoredVector,
    pub replicas: Vec<StoredVector>,
    pub budget: usize,
    pub added: usize,
    pub shortfall: usize,
}

#[derive(Debug, Clone)]
pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    pub fn disabled() -> Self {
        Self { dir: None }
    }

    pub fn at(dir: impl Into<PathBuf>) -> Self {
        Self {
            dir: Some(dir.into()),
        }
    }

    fn path(dir: &Path, key: &str) -> PathBuf {
        dir.join(&key[..2]).join(format!("{key}.json"))
    }

    pub fn get(&self, key: &str) -> Option<CellEntry> {
        let dir = self.dir.as_ref()?;
        let bytes = fs::read(Self::path(dir, key)).ok()?;
        serde_json::from_slice(&bytes).ok()
    }

    /// Best effort: a failed write only costs a recomputation later.
    pub fn put(&self, key: &str, entry: &CellEntry) {
        let Some(dir) = &self.dir else { return };
        let path = Self::path(dir, key);
        let Some(parent) = path.parent() else { return };
        if fs::create_dir_all(parent).is_err() {
            return;
        }
        let Ok(bytes) = serde_json::to_vec(entry) else { return };
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        if fs::write(&tmp, bytes).is_ok() && fs::rename(&tmp, &path).is_err() {
            let _ = fs::remove_file(&tmp);
        }
    }
}

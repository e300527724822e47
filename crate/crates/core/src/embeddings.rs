//! Word vectors in the plain-text `.vec` layout, plus a seeded synthetic
//! source for tests and offline runs.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const DEFAULT_DIM: usize = 300;

/// Immutable word -> vector map. Vectors are stored row-major with their
/// L2 norms precomputed.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    index: HashMap<String, usize>,
    words: Vec<String>,
    data: Vec<f64>,
    norms: Vec<f64>,
    source_id: String,
}

impl EmbeddingTable {
    pub fn from_rows(dim: usize, source_id: impl Into<String>, rows: Vec<(String, Vec<f64>)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("embedding dimension must be >= 1".into()));
        }
        let mut table = Self {
            dim,
            index: HashMap::with_capacity(rows.len()),
            words: Vec::with_capacity(rows.len()),
            data: Vec::with_capacity(rows.len() * dim),
            norms: Vec::with_capacity(rows.len()),
            source_id: source_id.into(),
        };
        for (word, v) in rows {
            if v.len() != dim {
                return Err(Error::InvalidArgument(format!(
                    "vector for \"{word}\" has {} components, expected {dim}",
                    v.len()
                )));
            }
            table.push(word, &v);
        }
        Ok(table)
    }

    fn push(&mut self, word: String, v: &[f64]) {
        if self.index.contains_key(&word) {
            return;
        }
        self.index.insert(word.clone(), self.words.len());
        self.words.push(word);
        self.norms.push(v.iter().map(|x| x * x).sum::<f64>().sqrt());
        self.data.extend_from_slice(v);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.words.iter().map(String::as_str)
    }

    pub fn vector(&self, word: &str) -> Option<&[f64]> {
        self.index
            .get(word)
            .map(|&i| &self.data[i * self.dim..(i + 1) * self.dim])
    }

    /// Unit-length copy of a word's vector; `None` when absent or zero-norm.
    pub fn unit_vector(&self, word: &str) -> Option<Vec<f64>> {
        let i = *self.index.get(word)?;
        let norm = self.norms[i];
        if norm == 0.0 || !norm.is_finite() {
            return None;
        }
        Some(
            self.data[i * self.dim..(i + 1) * self.dim]
                .iter()
                .map(|x| x / norm)
                .collect(),
        )
    }

    /// Cosine similarity, or `None` if either word is missing or has a zero vector.
    pub fn cosine(&self, a: &str, b: &str) -> Option<f64> {
        let (&i, &j) = (self.index.get(a)?, self.index.get(b)?);
        let (na, nb) = (self.norms[i], self.norms[j]);
        if na == 0.0 || nb == 0.0 {
            return None;
        }
        let va = &self.data[i * self.dim..(i + 1) * self.dim];
        let vb = &self.data[j * self.dim..(j + 1) * self.dim];
        let dot: f64 = va.iter().zip(vb).map(|(x, y)| x * y).sum();
        Some((dot / (na * nb)).clamp(-1.0, 1.0))
    }

    /// SHA-256 over the sorted (word, vector bits) content. Used in cache keys.
    pub fn fingerprint(&self) -> String {
        let mut order: Vec<usize> = (0..self.words.len()).collect();
        order.sort_by(|&a, &b| self.words[a].cmp(&self.words[b]));
        let mut h = Sha256::new();
        h.update((self.dim as u64).to_le_bytes());
        for i in order {
            h.update((self.words[i].len() as u64).to_le_bytes());
            h.update(self.words[i].as_bytes());
            for x in &self.data[i * self.dim..(i + 1) * self.dim] {
                h.update(x.to_bits().to_le_bytes());
            }
        }
        hex::encode(h.finalize())
    }
}

fn malformed(path: &Path, line: usize, reason: impl Into<String>) -> Error {
    Error::MalformedEmbeddings {
        path: path.to_path_buf(),
        line,
        reason: reason.into(),
    }
}

/// Loads a `.vec` file: optional `<count> <dim>` header, then
/// `word v1 ... vdim` per line. With `restrict_to`, other words are
/// length-checked but not parsed or stored.
pub fn load_vectors(path: impl AsRef<Path>, restrict_to: Option<&HashSet<String>>) -> Result<EmbeddingTable> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::with_capacity(1 << 20, file);

    let mut dim: Option<usize> = None;
    let mut rows: Vec<(String, Vec<f64>)> = Vec::new();
    let mut saw_content = false;
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.trim_end_matches(['\r', '\n']);
        let mut fields = line.split(' ').filter(|f| !f.is_empty());
        let Some(word) = fields.next() else { continue };
        saw_content = true;
        let values: Vec<&str> = fields.collect();

        if lineno == 1 && values.len() == 1 {
            if let (Ok(_), Ok(d)) = (word.parse::<usize>(), values[0].parse::<usize>()) {
                if d == 0 {
                    return Err(malformed(path, 1, "header declares dimension 0"));
                }
                dim = Some(d);
                continue;
            }
        }
        let expected = *dim.get_or_insert(values.len());
        if expected == 0 {
            return Err(malformed(path, lineno, "row has no vector components"));
        }
        if values.len() != expected {
            return Err(Error::DimensionMismatch {
                path: path.to_path_buf(),
                line: lineno,
                expected,
                found: values.len(),
            });
        }
        if restrict_to.is_some_and(|keep| !keep.contains(word)) {
            continue;
        }
        let v = values
            .iter()
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|e| malformed(path, lineno, format!("bad number: {e}")))?;
        rows.push((word.to_string(), v));
    }
    if !saw_content {
        return Err(Error::EmptyEmbeddings(path.to_path_buf()));
    }
    let dim = dim.ok_or_else(|| Error::EmptyEmbeddings(path.to_path_buf()))?;
    EmbeddingTable::from_rows(dim, path.display().to_string(), rows)
}

/// Writes the table with a header line, words in table order.
pub fn write_vectors(table: &EmbeddingTable, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    writeln!(w, "{} {}", table.len(), table.dim()).map_err(io)?;
    for word in table.words() {
        write!(w, "{word}").map_err(io)?;
        for x in table.vector(word).unwrap_or_default() {
            write!(w, " {x}").map_err(io)?;
        }
        writeln!(w).map_err(io)?;
    }
    w.flush().map_err(io)
}

/// Deterministic unit-norm vectors; each is a pure function of
/// `(word, dim, seed)`.
pub fn synthetic_table<'a>(vocabulary: impl IntoIterator<Item = &'a str>, dim: usize, seed: u64) -> Result<EmbeddingTable> {
    if dim == 0 {
        return Err(Error::InvalidArgument("embedding dimension must be >= 1".into()));
    }
    let mut words: Vec<&str> = vocabulary.into_iter().collect();
    words.sort_unstable();
    words.dedup();
    let rows = words
        .into_iter()
        .map(|w| (w.to_string(), synthetic_vector(w, dim, seed)))
        .collect();
    EmbeddingTable::from_rows(dim, format!("synthetic:{seed}:{dim}"), rows)
}

fn synthetic_vector(word: &str, dim: usize, seed: u64) -> Vec<f64> {
    let mut h = Sha256::new();
    h.update(b"conet-probe/synthetic/v1");
    h.update(seed.to_le_bytes());
    h.update((dim as u64).to_le_bytes());
    h.update(word.as_bytes());
    let mut rng = ChaCha8Rng::from_seed(h.finalize().into());
    loop {
        let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

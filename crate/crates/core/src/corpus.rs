//! Text ingestion: manifests, tokenization, truncation, stopword filtering and
//! word-level shuffles.
//!
//! Tokens are maximal runs of alphabetic characters, case folded with Unicode
//! default case folding. Everything else (digits, punctuation, symbols,
//! whitespace) separates tokens.
//!
//! # Shuffle key derivation
//!
//! Replica `r` of document `text_id` under master seed `s` is produced by a
//! Fisher-Yates shuffle driven by `ChaCha8Rng::from_seed(key)`, where `key`
//! is the SHA-256 digest of
//!
//! ```text
//! b"conet-probe/shuffle/v1" || s (u64 LE) || len(text_id) (u64 LE) || text_id (UTF-8) || r (u64 LE)
//! ```
//!
//! ChaCha8 output is specified bit-for-bit, so replicas are identical across
//! runs and platforms.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const DEFAULT_REPLICAS: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub text_id: String,
    pub path: PathBuf,
    pub language: String,
    pub dataset_tag: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manifest {
    pub source: PathBuf,
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, text_id: &str) -> Option<&ManifestEntry> {
        self.entries.iter().find(|e| e.text_id == text_id)
    }
}

const MANIFEST_COLUMNS: [&str; 4] = ["text_id", "path", "language", "dataset_tag"];

/// Reads a `text_id,path,language,dataset_tag` CSV manifest.
///
/// Relative text paths are resolved against the manifest's directory.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<Manifest> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.iter().all(|b| b.is_ascii_whitespace()) {
        return Err(Error::EmptyManifest(path.to_path_buf()));
    }
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(bytes.as_slice());
    let headers = reader
        .headers()
        .map_err(|e| malformed(path, 1, e.to_string()))?
        .clone();
    let mut columns = [0usize; 4];
    for (slot, name) in columns.iter_mut().zip(MANIFEST_COLUMNS) {
        *slot = headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| malformed(path, 1, format!("missing column `{name}`")))?;
    }

    let mut entries = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
            malformed(path, line, e.to_string())
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let field = |i: usize| record.get(columns[i]).unwrap_or("").to_string();
        let (text_id, rel, language, dataset_tag) = (field(0), field(1), field(2), field(3));
        for (name, value) in MANIFEST_COLUMNS.iter().zip([&text_id, &rel, &language]) {
            if value.is_empty() {
                return Err(malformed(path, line, format!("empty `{name}`")));
            }
        }
        if let Some(&first_line) = seen.get(&text_id) {
            return Err(Error::DuplicateTextId {
                path: path.to_path_buf(),
                text_id,
                first_line,
                second_line: line,
            });
        }
        let text_path = base.join(&rel);
        match fs::metadata(&text_path) {
            Ok(meta) if meta.is_file() => {}
            Ok(_) => {
                return Err(malformed(path, line, format!("{} is not a file", text_path.display())))
            }
            Err(e) => {
                return Err(malformed(path, line, format!("{}: {e}", text_path.display())))
            }
        }
        seen.insert(text_id.clone(), line);
        entries.push(ManifestEntry {
            text_id,
            path: text_path,
            language,
            dataset_tag,
        });
    }
    if entries.is_empty() {
        return Err(Error::EmptyManifest(path.to_path_buf()));
    }
    Ok(Manifest {
        source: path.to_path_buf(),
        entries,
    })
}

fn malformed(path: &Path, line: usize, reason: String) -> Error {
    Error::MalformedManifest {
        path: path.to_path_buf(),
        line,
        reason,
    }
}

/// Stopword lists keyed by language code.
#[derive(Debug, Clone, Default)]
pub struct Stopwords {
    lists: HashMap<String, HashSet<String>>,
}

const BUILTIN_STOPWORDS: [(&str, &str); 5] = [
    ("en", include_str!("../stopwords/en.txt")),
    ("de", include_str!("../stopwords/de.txt")),
    ("fr", include_str!("../stopwords/fr.txt")),
    ("es", include_str!("../stopwords/es.txt")),
    ("la", include_str!("../stopwords/la.txt")),
];

impl Stopwords {
    pub fn empty() -> Self {
        Self::default()
    }

    /// The lists shipped with the crate.
    pub fn builtin() -> Self {
        let mut out = Self::default();
        for (lang, text) in BUILTIN_STOPWORDS {
            out.insert_text(lang, text);
        }
        out
    }

    /// Parses one-word-per-line text; `#` starts a comment.
    pub fn insert_text(&mut self, language: &str, text: &str) {
        let words = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .map(fold)
            .collect();
        self.lists.insert(language.to_string(), words);
    }

    pub fn insert_file(&mut self, language: &str, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        self.insert_text(language, &text);
        Ok(())
    }

    /// Loads every `<lang>.txt` in `dir`, replacing lists for the same language.
    pub fn insert_dir(&mut self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        let mut paths: Vec<PathBuf> = fs::read_dir(dir)
            .map_err(|e| Error::io(dir, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "txt"))
            .collect();
        paths.sort();
        for p in paths {
            if let Some(lang) = p.file_stem().and_then(|s| s.to_str()) {
                let lang = lang.to_string();
                self.insert_file(&lang, &p)?;
            }
        }
        Ok(())
    }

    pub fn get(&self, language: &str) -> Option<&HashSet<String>> {
        self.lists.get(language)
    }

    /// Text of all lists, sorted, for cache keys.
    pub fn fingerprint(&self, language: &str) -> String {
        let mut words: Vec<&str> = self
            .lists
            .get(language)
            .map(|s| s.iter().map(String::as_str).collect())
            .unwrap_or_default();
        words.sort_unstable();
        words.join("\n")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub text_id: String,
    pub language: String,
    pub tokens: Vec<String>,
    pub stopwords_filtered: bool,
    /// Set by [`truncate`] when fewer tokens were available than requested.
    pub short: bool,
}

impl Document {
    pub fn new(text_id: impl Into<String>, language: impl Into<String>, tokens: Vec<String>) -> Self {
        Self {
            text_id: text_id.into(),
            language: language.into(),
            tokens,
            stopwords_filtered: false,
            short: false,
        }
    }

    pub fn size(&self) -> usize {
        self.tokens.len()
    }
}

fn fold(s: &str) -> String {
    caseless::default_case_fold_str(s)
}

/// Splits `raw` into case-folded alphabetic runs.
pub fn tokenize(raw: &str) -> Vec<String> {
    raw.split(|c: char| !c.is_alphabetic())
        .filter(|run| !run.is_empty())
        .filter_map(|run| {
            // Folding can introduce combining marks (e.g. U+0130 -> i + U+0307).
            let folded: String = fold(run).chars().filter(|c| c.is_alphabetic()).collect();
            (!folded.is_empty()).then_some(folded)
        })
        .collect()
}

pub fn preprocess(
    text_id: &str,
    raw: &str,
    language: &str,
    filter_stopwords: bool,
    stopwords: &Stopwords,
) -> Result<Document> {
    let doc = Document::new(text_id, language, tokenize(raw));
    if filter_stopwords {
        filter_stopwords_from(doc, stopwords)
    } else {
        Ok(doc)
    }
}

pub fn filter_stopwords_from(mut doc: Document, stopwords: &Stopwords) -> Result<Document> {
    let list = stopwords
        .get(&doc.language)
        .ok_or_else(|| Error::UnknownLanguage(doc.language.clone()))?;
    doc.tokens.retain(|t| !list.contains(t));
    doc.stopwords_filtered = true;
    Ok(doc)
}

/// Keeps the first `n` tokens. Documents shorter than `n` are kept whole
/// and flagged as short.
pub fn truncate(doc: &Document, n: usize) -> Result<Document> {
    if n == 0 {
        return Err(Error::InvalidArgument("truncation size must be >= 1".into()));
    }
    let mut out = doc.clone();
    out.short = doc.size() < n;
    out.tokens.truncate(n);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShuffleSet {
    pub original: Document,
    pub replicas: Vec<Document>,
    pub seed: u64,
}

/// The 32-byte ChaCha seed for one replica.
pub fn shuffle_key(seed: u64, text_id: &str, replica: usize) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(b"conet-probe/shuffle/v1");
    h.update(seed.to_le_bytes());
    h.update((text_id.len() as u64).to_le_bytes());
    h.update(text_id.as_bytes());
    h.update((replica as u64).to_le_bytes());
    h.finalize().into()
}

pub fn make_shuffles(doc: &Document, count: usize, seed: u64) -> Result<ShuffleSet> {
    if count < 2 {
        return Err(Error::InvalidArgument(format!(
            "replica count must be >= 2, got {count}"
        )));
    }
    if doc.size() < 2 {
        return Err(Error::DocumentTooShort {
            text_id: doc.text_id.clone(),
            size: doc.size(),
            required: 2,
        });
    }
    let replicas = (0..count)
        .map(|r| {
            let mut rng = ChaCha8Rng::from_seed(shuffle_key(seed, &doc.text_id, r));
            let mut replica = doc.clone();
            replica.tokens.shuffle(&mut rng);
            replica
        })
        .collect();
    Ok(ShuffleSet {
        original: doc.clone(),
        replicas,
        seed,
    })
}

//! Run configuration.
//!
//! The config file is flat TOML. Relative paths are resolved against the
//! directory of the config file. Every key except `analysis_manifest` is
//! optional:
//!
//! ```toml
//! analysis_manifest = "analysis.csv"    # texts used for informativeness
//! syntax_manifest = "syntax.csv"        # same content, many languages
//! semantics_manifest = "analysis.csv"   # one language, many contents
//! sizes = [200, 400, 800, 1000]
//! stopwords = "both"                    # keep | filter | both
//! strategies = ["original", "global", "local"]
//! fractions = [0, 25, 50, 75, 100]      # percent of co-occurrence edges
//! replicas = 10
//! seed = 42
//! embeddings = "synthetic:7"            # or a path to a .vec file; synthetic:<seed>[:<dim>]
//! workers = 4                           # 0 = all cores
//! out = "out"
//! signed_distance = false
//! std = "population"                    # population | sample
//! damping = 0.85
//! filter_order = "truncate_then_filter" # or filter_then_truncate
//! variability_source = "normalized"     # normalized | raw
//! stopword_dir = "stopwords"            # <lang>.txt files overriding the built-in lists
//! cache = true
//! cache_dir = "out/cache"
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::embeddings::DEFAULT_DIM;
use crate::error::{Error, Result};
use crate::metrics::DEFAULT_DAMPING;
use crate::network::Strategy;
use crate::report::StopwordSetting;
use crate::stats::StdKind;

pub const DEFAULT_SIZES: [usize; 4] = [200, 400, 800, 1000];
pub const DEFAULT_FRACTIONS: [f64; 5] = [0.0, 25.0, 50.0, 75.0, 100.0];

#[derive(Debug, Clone, PartialEq)]
pub enum EmbeddingSource {
    Synthetic { seed: u64, dim: usize },
    File(PathBuf),
}

impl EmbeddingSource {
    /// `synthetic:<seed>`, `synthetic:<seed>:<dim>`, or a file path.
    pub fn parse(s: &str, base: &Path) -> Result<Self> {
        if let Some(rest) = s.strip_prefix("synthetic:") {
            let mut parts = rest.split(':');
            let seed = parts
                .next()
                .and_then(|p| p.parse().ok())
                .ok_or_else(|| Error::Config(format!("bad synthetic embedding source {s:?}")))?;
            let dim = match parts.next() {
                None => DEFAULT_DIM,
                Some(d) => d
                    .parse()
                    .ok()
                    .filter(|&d: &usize| d > 0)
                    .ok_or_else(|| Error::Config(format!("bad synthetic dimension in {s:?}")))?,
            };
            if parts.next().is_some() {
                return Err(Error::Config(format!("bad synthetic embedding source {s:?}")));
            }
            Ok(EmbeddingSource::Synthetic { seed, dim })
        } else {
            Ok(EmbeddingSource::File(base.join(s)))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FilterOrder {
    /// Cut the raw token stream to N, then drop stopwords.
    #[default]
    TruncateThenFilter,
    /// Drop stopwords, then keep the first N remaining tokens.
    FilterThenTruncate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VariabilitySource {
    /// Normalized values `X`.
    #[default]
    Normalized,
    /// Raw summaries on the real texts.
    Raw,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub analysis_manifest: PathBuf,
    pub syntax_manifest: Option<PathBuf>,
    pub semantics_manifest: Option<PathBuf>,
    pub sizes: Vec<usize>,
    pub stopwords: Vec<StopwordSetting>,
    pub strategies: Vec<Strategy>,
    pub fractions: Vec<f64>,
    pub replicas: usize,
    pub seed: u64,
    pub embeddings: EmbeddingSource,
    pub out: PathBuf,
    /// Worker threads; 0 uses every core.
    pub workers: usize,
    pub signed_distance: bool,
    pub std: StdKind,
    pub damping: f64,
    pub filter_order: FilterOrder,
    pub variability_source: VariabilitySource,
    pub stopword_dir: Option<PathBuf>,
    pub cache: bool,
    /// Defaults to `<out>/cache`.
    pub cache_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(analysis_manifest: impl Into<PathBuf>, out: impl Into<PathBuf>) -> Self {
        Self {
            analysis_manifest: analysis_manifest.into(),
            syntax_manifest: None,
            semantics_manifest: None,
            sizes: DEFAULT_SIZES.to_vec(),
            stopwords: vec![StopwordSetting::Keep, StopwordSetting::Filter],
            strategies: vec![Strategy::Original, Strategy::Global, Strategy::Local],
            fractions: DEFAULT_FRACTIONS.to_vec(),
            replicas: crate::corpus::DEFAULT_REPLICAS,
            seed: 42,
            embeddings: EmbeddingSource::Synthetic {
                seed: 7,
                dim: DEFAULT_DIM,
            },
            out: out.into(),
            workers: 0,
            signed_distance: false,
            std: StdKind::Population,
            damping: DEFAULT_DAMPING,
            filter_order: FilterOrder::TruncateThenFilter,
            variability_source: VariabilitySource::Normalized,
            stopword_dir: None,
            cache: true,
            cache_dir: None,
        }
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new(""));
        Self::from_toml(&text, base)
    }

    pub fn from_toml(text: &str, base: &Path) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        raw.resolve(base)
    }

    pub fn cache_dir(&self) -> PathBuf {
        self.cache_dir
            .clone()
            .unwrap_or_else(|| self.out.join("cache"))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.sizes.is_empty() || self.sizes.contains(&0) {
            return bad("sizes must be a non-empty list of positive integers".into());
        }
        if self.fractions.iter().any(|p| !(0.0..=100.0).contains(p)) {
            return bad(format!("fractions must lie in [0, 100]: {:?}", self.fractions));
        }
        if self.replicas < 2 {
            return bad(format!("replicas must be >= 2, got {}", self.replicas));
        }
        if self.strategies.is_empty() {
            return bad("no strategies configured".into());
        }
        if self.stopwords.is_empty() {
            return bad("no stopword settings configured".into());
        }
        if self
            .strategies
            .iter()
            .any(|s| *s != Strategy::Original)
            && self.fractions.is_empty()
        {
            return bad("enriched strategies need at least one fraction".into());
        }
        if !(self.damping > 0.0 && self.damping < 1.0) {
            return bad(format!("damping must lie in (0, 1), got {}", self.damping));
        }
        Ok(())
    }
}

pub fn parse_stopword_setting(s: &str) -> Result<Vec<StopwordSetting>> {
    match s {
        "keep" => Ok(vec![StopwordSetting::Keep]),
        "filter" => Ok(vec![StopwordSetting::Filter]),
        "both" => Ok(vec![StopwordSetting::Keep, StopwordSetting::Filter]),
        other => Err(Error::Config(format!(
            "stopwords must be keep, filter or both; got {other:?}"
        ))),
    }
}

pub fn parse_strategy(s: &str) -> Result<Strategy> {
    Strategy::parse(s).ok_or_else(|| Error::Config(format!("unknown strategy {s:?}")))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    analysis_manifest: PathBuf,
    syntax_manifest: Option<PathBuf>,
    semantics_manifest: Option<PathBuf>,
    sizes: Option<Vec<usize>>,
    stopwords: Option<String>,
    strategies: Option<Vec<String>>,
    fractions: Option<Vec<f64>>,
    replicas: Option<usize>,
    seed: Option<u64>,
    embeddings: Option<String>,
    workers: Option<usize>,
    out: Option<PathBuf>,
    signed_distance: Option<bool>,
    std: Option<String>,
    damping: Option<f64>,
    filter_order: Option<String>,
    variability_source: Option<String>,
    stopword_dir: Option<PathBuf>,
    cache: Option<bool>,
    cache_dir: Option<PathBuf>,
}

impl RawConfig {
    fn resolve(self, base: &Path) -> Result<RunConfig> {
        let mut cfg = RunConfig::new(base.join(&self.analysis_manifest), base.join(self.out.unwrap_or_else(|| "out".into())));
        cfg.syntax_manifest = self.syntax_manifest.map(|p| base.join(p));
        cfg.semantics_manifest = self.semantics_manifest.map(|p| base.join(p));
        if let Some(v) = self.sizes {
            cfg.sizes = v;
        }
        if let Some(s) = self.stopwords {
            cfg.stopwords = parse_stopword_setting(&s)?;
        }
        if let Some(v) = self.strategies {
            cfg.strategies = v.iter().map(|s| parse_strategy(s)).collect::<Result<_>>()?;
        }
        if let Some(v) = self.fractions {
            cfg.fractions = v;
        }
        if let Some(v) = self.replicas {
            cfg.replicas = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(s) = self.embeddings {
            cfg.embeddings = EmbeddingSource::parse(&s, base)?;
        }
        if let Some(v) = self.workers {
            cfg.workers = v;
        }
        if let Some(v) = self.signed_distance {
            cfg.signed_distance = v;
        }
        if let Some(s) = self.std {
            cfg.std = match s.as_str() {
                "population" => StdKind::Population,
                "sample" => StdKind::Sample,
                other => return Err(Error::Config(format!("std must be population or sample, got {other:?}"))),
            };
        }
        if let Some(v) = self.damping {
            cfg.damping = v;
        }
        if let Some(s) = self.filter_order {
            cfg.filter_order = match s.as_str() {
                "truncate_then_filter" => FilterOrder::TruncateThenFilter,
                "filter_then_truncate" => FilterOrder::FilterThenTruncate,
                other => return Err(Error::Config(format!("unknown filter_order {other:?}"))),
            };
        }
        if let Some(s) = self.variability_source {
            cfg.variability_source = match s.as_str() {
                "normalized" => VariabilitySource::Normalized,
                "raw" => VariabilitySource::Raw,
                other => return Err(Error::Config(format!("unknown variability_source {other:?}"))),
            };
        }
        cfg.stopword_dir = self.stopword_dir.map(|p| base.join(p));
        if let Some(v) = self.cache {
            cfg.cache = v;
        }
        cfg.cache_dir = self.cache_dir.map(|p| base.join(p));
        cfg.validate()?;
        Ok(cfg)
    }
}

//! The full sweep: texts x sizes x stopword settings x strategies x
//! fractions, each evaluated against its own shuffled replicas.
//!
//! Work is split into one task per (text, size, stopword setting). A task
//! builds the co-occurrence networks of the text and its replicas once and
//! evaluates every (strategy, fraction) cell on them, skipping cells already
//! present in the cache. Results are assembled in a fixed order, so neither
//! the worker count nor the cache state changes any output.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::cache::{Cache, CellEntry, KeyBuilder, StoredVector};
use crate::config::{EmbeddingSource, FilterOrder, RunConfig, VariabilitySource};
use crate::corpus::{self, Document, ManifestEntry, Stopwords};
use crate::embeddings::{self, EmbeddingTable};
use crate::error::{Error, Result};
use crate::metrics::{self, Metric, MetricVector, Summary};
use crate::network::{self, CoocNetwork, EdgeCandidate, Strategy};
use crate::report::{self, CellKey, InformativenessRow, RecordRow, StopwordSetting, VariabilityRow};
use crate::stats::{self, NormalizeOptions, NormalizedMetric};

const CACHE_NAMESPACE: &str = "conet-probe/cell/v1";

/// Which report roles a text plays.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Roles {
    pub analysis: bool,
    pub syntax: bool,
    pub semantics: bool,
}

#[derive(Debug, Clone)]
pub struct Text {
    pub entry: ManifestEntry,
    pub roles: Roles,
    /// Tokens of the full text, or the reason it could not be read.
    pub tokens: std::result::Result<Vec<String>, String>,
    raw_hash: String,
}

/// One (size, stopwords, strategy, fraction) configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellDef {
    pub size: usize,
    pub stopwords: StopwordSetting,
    pub strategy: Strategy,
    pub fraction: f64,
}

impl CellDef {
    pub fn key(&self, metric: Metric, summary: Summary) -> CellKey {
        CellKey {
            size: self.size,
            stopwords: self.stopwords,
            strategy: self.strategy,
            fraction: self.fraction,
            metric,
            summary,
        }
    }
}

/// Everything known about one text in one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellOutcome {
    pub text_id: String,
    pub def: CellDef,
    /// Requested virtual edges on the real text's network.
    pub budget: usize,
    pub added: usize,
    pub shortfall: usize,
    pub short_document: bool,
    pub from_cache: bool,
    /// Text-level failure; all values are undefined when set.
    pub error: Option<String>,
    pub original: Option<MetricVector>,
    pub normalized: BTreeMap<(Metric, Summary), std::result::Result<NormalizedMetric, String>>,
}

impl CellOutcome {
    pub fn raw(&self, metric: Metric, summary: Summary) -> Option<f64> {
        self.original.as_ref()?.get(metric, summary).value()
    }
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub records: Vec<RecordRow>,
    pub informativeness: Vec<InformativenessRow>,
    pub variability: Vec<VariabilityRow>,
    pub cells: Vec<CellOutcome>,
    /// Distinct `text_id: reason` messages for texts that failed.
    pub failures: Vec<String>,
    pub computed_cells: usize,
    pub cached_cells: usize,
}

impl PipelineOutput {
    pub fn has_failures(&self) -> bool {
        !self.failures.is_empty()
    }
}

/// Cells in configuration order. `Original` runs once at fraction 0.
pub fn cell_defs(cfg: &RunConfig) -> Vec<CellDef> {
    let mut fractions: Vec<f64> = Vec::new();
    for &p in &cfg.fractions {
        if !fractions.iter().any(|q| q.to_bits() == p.to_bits()) {
            fractions.push(p);
        }
    }
    let mut strategies: Vec<Strategy> = Vec::new();
    for &s in &cfg.strategies {
        if !strategies.contains(&s) {
            strategies.push(s);
        }
    }
    let mut out = Vec::new();
    for &size in &cfg.sizes {
        for &stopwords in &cfg.stopwords {
            for &strategy in &strategies {
                let ps: &[f64] = if strategy == Strategy::Original { &[0.0] } else { &fractions };
                for &fraction in ps {
                    out.push(CellDef {
                        size,
                        stopwords,
                        strategy,
                        fraction,
                    });
                }
            }
        }
    }
    out
}

fn load_texts(cfg: &RunConfig) -> Result<Vec<Text>> {
    let mut texts: Vec<Text> = Vec::new();
    let manifests = [
        Some(&cfg.analysis_manifest),
        cfg.syntax_manifest.as_ref(),
        cfg.semantics_manifest.as_ref(),
    ];
    for (role, path) in manifests.into_iter().enumerate() {
        let Some(path) = path else { continue };
        let manifest = corpus::load_manifest(path)?;
        for entry in manifest.entries {
            let idx = match texts.iter().position(|t| t.entry.text_id == entry.text_id) {
                Some(i) => {
                    let known = &texts[i].entry;
                    if known.path != entry.path || known.language != entry.language {
                        return Err(Error::Config(format!(
                            "text_id \"{}\" refers to different texts in {}",
                            entry.text_id,
                            path.display()
                        )));
                    }
                    i
                }
                None => {
                    let (tokens, raw_hash) = read_text(&entry.path);
                    texts.push(Text {
                        entry,
                        roles: Roles::default(),
                        tokens,
                        raw_hash,
                    });
                    texts.len() - 1
                }
            };
            let roles = &mut texts[idx].roles;
            match role {
                0 => roles.analysis = true,
                1 => roles.syntax = true,
                _ => roles.semantics = true,
            }
        }
    }
    Ok(texts)
}

fn read_text(path: &Path) -> (std::result::Result<Vec<String>, String>, String) {
    match fs::read(path) {
        Err(e) => (Err(format!("{}: {e}", path.display())), String::new()),
        Ok(bytes) => {
            let hash = KeyBuilder::new("text").str(&hex::encode(&bytes)).finish();
            match String::from_utf8(bytes) {
                Ok(s) => (Ok(corpus::tokenize(&s)), hash),
                Err(_) => (Err(format!("{}: not valid UTF-8", path.display())), hash),
            }
        }
    }
}

fn load_embeddings(cfg: &RunConfig, texts: &[Text]) -> Result<Option<EmbeddingTable>> {
    if cfg.strategies.iter().all(|s| *s == Strategy::Original) {
        return Ok(None);
    }
    let vocab: HashSet<String> = texts
        .iter()
        .filter_map(|t| t.tokens.as_ref().ok())
        .flatten()
        .cloned()
        .collect();
    let table = match &cfg.embeddings {
        EmbeddingSource::Synthetic { seed, dim } => {
            let mut words: Vec<&str> = vocab.iter().map(String::as_str).collect();
            words.sort_unstable();
            embeddings::synthetic_table(words, *dim, *seed)?
        }
        EmbeddingSource::File(path) => embeddings::load_vectors(path, Some(&vocab))?,
    };
    Ok(Some(table))
}

fn load_stopwords(cfg: &RunConfig) -> Result<Stopwords> {
    let mut sw = Stopwords::builtin();
    if let Some(dir) = &cfg.stopword_dir {
        sw.insert_dir(dir)?;
    }
    Ok(sw)
}

fn prepare(text: &Text, size: usize, setting: StopwordSetting, cfg: &RunConfig, sw: &Stopwords) -> Result<Document> {
    let tokens = text.tokens.as_ref().map_err(|e| Error::Undefined(e.clone()))?;
    let doc = Document::new(&text.entry.text_id, &text.entry.language, tokens.clone());
    match (setting, cfg.filter_order) {
        (StopwordSetting::Keep, _) => corpus::truncate(&doc, size),
        (StopwordSetting::Filter, FilterOrder::TruncateThenFilter) => {
            corpus::filter_stopwords_from(corpus::truncate(&doc, size)?, sw)
        }
        (StopwordSetting::Filter, FilterOrder::FilterThenTruncate) => {
            corpus::truncate(&corpus::filter_stopwords_from(doc, sw)?, size)
        }
    }
}

struct Context<'a> {
    cfg: &'a RunConfig,
    stopwords: &'a Stopwords,
    table: Option<&'a EmbeddingTable>,
    table_fingerprint: String,
    cache: &'a Cache,
}

impl Context<'_> {
    fn cell_key(&self, text: &Text, doc: &Document, def: &CellDef) -> String {
        let mut k = KeyBuilder::new(CACHE_NAMESPACE);
        k.str(&text.entry.text_id).str(&text.entry.language).str(&text.raw_hash);
        k.u64(doc.size() as u64);
        for t in &doc.tokens {
            k.str(t);
        }
        k.u64(def.size as u64).str(def.stopwords.as_str());
        k.str(match self.cfg.filter_order {
            FilterOrder::TruncateThenFilter => "truncate_then_filter",
            FilterOrder::FilterThenTruncate => "filter_then_truncate",
        });
        k.str(def.strategy.as_str()).f64(def.fraction);
        k.u64(self.cfg.replicas as u64).u64(self.cfg.seed).f64(self.cfg.damping);
        if def.strategy != Strategy::Original {
            k.str(&self.table_fingerprint);
        }
        k.finish()
    }
}

/// All cells for one (text, size, stopwords) task.
fn run_task(ctx: &Context, text: &Text, defs: &[(usize, CellDef)]) -> Vec<(usize, CellOutcome)> {
    let failed = |def: &CellDef, reason: String, short: bool| CellOutcome {
        text_id: text.entry.text_id.clone(),
        def: *def,
        budget: 0,
        added: 0,
        shortfall: 0,
        short_document: short,
        from_cache: false,
        error: Some(reason),
        original: None,
        normalized: BTreeMap::new(),
    };
    let (size, setting) = (defs[0].1.size, defs[0].1.stopwords);
    let doc = match prepare(text, size, setting, ctx.cfg, ctx.stopwords) {
        Ok(d) => d,
        Err(e) => return defs.iter().map(|(i, d)| (*i, failed(d, e.to_string(), false))).collect(),
    };

    let keys: Vec<String> = defs.iter().map(|(_, d)| ctx.cell_key(text, &doc, d)).collect();
    let mut entries: Vec<Option<(CellEntry, bool)>> =
        keys.iter().map(|k| ctx.cache.get(k).map(|e| (e, true))).collect();

    if entries.iter().any(Option::is_none) {
        match compute_missing(ctx, &doc, defs, &entries) {
            Ok(fresh) => {
                for ((slot, key), entry) in entries.iter_mut().zip(&keys).zip(fresh) {
                    if let Some(entry) = entry {
                        ctx.cache.put(key, &entry);
                        *slot = Some((entry, false));
                    }
                }
            }
            Err(e) => {
                return defs
                    .iter()
                    .map(|(i, d)| (*i, failed(d, e.to_string(), doc.short)))
                    .collect()
            }
        }
    }

    let opts = NormalizeOptions {
        std: ctx.cfg.std,
        signed_distance: ctx.cfg.signed_distance,
    };
    defs.iter()
        .zip(entries)
        .map(|((i, def), entry)| {
            let (entry, from_cache) = entry.expect("every cell computed or cached");
            (*i, outcome_from_entry(text, def, &doc, entry, from_cache, opts))
        })
        .collect()
}

fn compute_missing(
    ctx: &Context,
    doc: &Document,
    defs: &[(usize, CellDef)],
    have: &[Option<(CellEntry, bool)>],
) -> Result<Vec<Option<CellEntry>>> {
    let set = corpus::make_shuffles(doc, ctx.cfg.replicas, ctx.cfg.seed)?;
    let docs: Vec<&Document> = std::iter::once(&set.original).chain(&set.replicas).collect();
    let nets: Vec<CoocNetwork> = docs.iter().map(|d| network::build_cooc(d)).collect::<Result<_>>()?;
    // Replicas are summarized over the real text's most frequent words.
    let top = metrics::top_words(&nets[0]);
    let top_nodes: Vec<Vec<usize>> = nets.iter().map(|n| top.nodes_in(n)).collect();

    let needs_candidates = defs
        .iter()
        .zip(have)
        .any(|((_, d), h)| h.is_none() && d.strategy != Strategy::Original);
    let cands: Vec<Vec<EdgeCandidate>> = match (needs_candidates, ctx.table) {
        (true, Some(table)) => nets.par_iter().map(|n| network::candidates(n, table)).collect(),
        _ => vec![Vec::new(); nets.len()],
    };

    defs.iter()
        .zip(have)
        .map(|((_, def), h)| {
            if h.is_some() {
                return Ok(None);
            }
            let per_net: Vec<(StoredVector, network::Enrichment)> = nets
                .par_iter()
                .zip(&cands)
                .zip(&top_nodes)
                .map(|((net, c), top)| {
                    let e = network::enrich(net, c, def.strategy, def.fraction)?;
                    let mv = metrics::metric_vector(&e.network.to_graph(), top, ctx.cfg.damping);
                    Ok((StoredVector::from(&mv), e))
                })
                .collect::<Result<_>>()?;
            let mut it = per_net.into_iter();
            let (original, e) = it.next().expect("original network");
            Ok(Some(CellEntry {
                original,
                replicas: it.map(|(v, _)| v).collect(),
                budget: e.budget,
                added: e.added(),
                shortfall: e.shortfall,
            }))
        })
        .collect()
}

fn outcome_from_entry(
    text: &Text,
    def: &CellDef,
    doc: &Document,
    entry: CellEntry,
    from_cache: bool,
    opts: NormalizeOptions,
) -> CellOutcome {
    let original = entry.original.to_metric_vector();
    let replicas: Vec<Option<MetricVector>> = entry.replicas.iter().map(StoredVector::to_metric_vector).collect();
    let mut normalized = BTreeMap::new();
    for m in Metric::ALL {
        for s in Summary::ALL {
            let result = normalize_one(original.as_ref(), &replicas, m, s, opts);
            normalized.insert((m, s), result);
        }
    }
    CellOutcome {
        text_id: text.entry.text_id.clone(),
        def: *def,
        budget: entry.budget,
        added: entry.added,
        shortfall: entry.shortfall,
        short_document: doc.short,
        from_cache,
        error: None,
        original,
        normalized,
    }
}

fn normalize_one(
    original: Option<&MetricVector>,
    replicas: &[Option<MetricVector>],
    m: Metric,
    s: Summary,
    opts: NormalizeOptions,
) -> std::result::Result<NormalizedMetric, String> {
    let original = original.ok_or("corrupt cache entry")?;
    let x = match original.get(m, s) {
        metrics::MetricValue::Defined { value, .. } => *value,
        metrics::MetricValue::Undefined(r) => return Err(r.clone()),
    };
    let mut baseline = Vec::with_capacity(replicas.len());
    for (i, r) in replicas.iter().enumerate() {
        let r = r.as_ref().ok_or("corrupt cache entry")?;
        match r.get(m, s) {
            metrics::MetricValue::Defined { value, .. } => baseline.push(*value),
            metrics::MetricValue::Undefined(reason) => return Err(format!("replica {i}: {reason}")),
        }
    }
    stats::normalize(x, &baseline, opts).map_err(|e| e.to_string())
}

fn flag_text(s: &str) -> String {
    s.replace([';', '\n', '\r'], ",")
}

fn record_rows(text: &Text, outcome: &CellOutcome) -> Vec<RecordRow> {
    let mut rows = Vec::with_capacity(12);
    for m in Metric::ALL {
        for s in Summary::ALL {
            let mut flags = Vec::new();
            if outcome.short_document {
                flags.push("short_document".to_string());
            }
            if outcome.shortfall > 0 {
                flags.push(format!("candidate_shortfall={}", outcome.shortfall));
            }
            if let Some(e) = &outcome.error {
                flags.push(format!("error={}", flag_text(e)));
            }
            if let Some(metrics::MetricValue::Defined { skipped, .. }) = outcome.original.as_ref().map(|o| o.get(m, s)) {
                if *skipped > 0 {
                    flags.push(format!("skipped_nodes={skipped}"));
                }
            }
            let norm = outcome.normalized.get(&(m, s));
            if let Some(Err(reason)) = norm {
                flags.push(format!("undefined={}", flag_text(reason)));
            }
            let n = norm.and_then(|r| r.as_ref().ok());
            rows.push(RecordRow {
                text_id: text.entry.text_id.clone(),
                dataset_tag: text.entry.dataset_tag.clone(),
                language: text.entry.language.clone(),
                cell: outcome.def.key(m, s),
                x_raw: outcome.raw(m, s),
                mu_r: n.map(|n| n.baseline_mean),
                sigma_r: n.map(|n| n.baseline_std),
                x_norm: n.map(|n| n.x_norm),
                eps: n.map(|n| n.eps),
                d: n.map(|n| n.d),
                informative: n.map(|n| n.informative),
                flags: flags.join(";"),
            });
        }
    }
    rows
}

pub fn run_pipeline(cfg: &RunConfig) -> Result<PipelineOutput> {
    cfg.validate()?;
    let texts = load_texts(cfg)?;
    let stopwords = load_stopwords(cfg)?;
    let table = load_embeddings(cfg, &texts)?;
    let table_fingerprint = table.as_ref().map(|t| t.fingerprint()).unwrap_or_default();
    let cache = if cfg.cache { Cache::at(cfg.cache_dir()) } else { Cache::disabled() };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;

    let defs = cell_defs(cfg);
    // Tasks: (text, size, stopwords) groups of cell definitions.
    let mut tasks: Vec<(usize, Vec<(usize, CellDef)>)> = Vec::new();
    for t in 0..texts.len() {
        for &size in &cfg.sizes {
            for &sw in &cfg.stopwords {
                let group: Vec<(usize, CellDef)> = defs
                    .iter()
                    .copied()
                    .enumerate()
                    .filter(|(_, d)| d.size == size && d.stopwords == sw)
                    .collect();
                if !group.is_empty() {
                    tasks.push((t, group));
                }
            }
        }
    }

    let ctx = Context {
        cfg,
        stopwords: &stopwords,
        table: table.as_ref(),
        table_fingerprint,
        cache: &cache,
    };
    let results: Vec<Vec<(usize, CellOutcome)>> = pool.install(|| {
        tasks
            .par_iter()
            .map(|(t, group)| run_task(&ctx, &texts[*t], group))
            .collect()
    });

    // grid[text][def]
    let mut grid: Vec<Vec<Option<CellOutcome>>> = vec![vec![None; defs.len()]; texts.len()];
    for ((t, _), outcomes) in tasks.iter().zip(results) {
        for (d, o) in outcomes {
            grid[*t][d] = Some(o);
        }
    }

    let mut records = Vec::new();
    let mut failures: Vec<String> = Vec::new();
    let (mut computed_cells, mut cached_cells) = (0, 0);
    for (text, row) in texts.iter().zip(&grid) {
        for o in row.iter().flatten() {
            records.extend(record_rows(text, o));
            if let Some(e) = &o.error {
                let msg = format!("{}: {}", text.entry.text_id, e);
                if !failures.contains(&msg) {
                    failures.push(msg);
                }
            } else if o.from_cache {
                cached_cells += 1;
            } else {
                computed_cells += 1;
            }
        }
    }

    let informativeness = informativeness_rows(&texts, &grid, &defs)?;
    let variability = variability_rows(cfg, &texts, &grid, &defs);
    report::sort_records(&mut records);
    let cells = grid.into_iter().flatten().flatten().collect();

    Ok(PipelineOutput {
        records,
        informativeness,
        variability,
        cells,
        failures,
        computed_cells,
        cached_cells,
    })
}

fn informativeness_rows(texts: &[Text], grid: &[Vec<Option<CellOutcome>>], defs: &[CellDef]) -> Result<Vec<InformativenessRow>> {
    let analysis: Vec<usize> = (0..texts.len()).filter(|&t| texts[t].roles.analysis).collect();
    let mut rows = Vec::new();
    for (d, def) in defs.iter().enumerate() {
        for m in Metric::ALL {
            for s in Summary::ALL {
                let cells: Vec<Option<NormalizedMetric>> = analysis
                    .iter()
                    .map(|&t| {
                        grid[t][d]
                            .as_ref()
                            .and_then(|o| o.normalized.get(&(m, s)))
                            .and_then(|r| r.as_ref().ok().copied())
                    })
                    .collect();
                if cells.is_empty() {
                    continue;
                }
                let info = stats::informativeness(&cells)?;
                rows.push(InformativenessRow {
                    cell: def.key(m, s),
                    percent: info.percent,
                    n_t: info.n_t,
                    n_informative: info.n_informative,
                    n_undefined: info.n_undefined,
                });
            }
        }
    }
    report::sort_informativeness(&mut rows);
    Ok(rows)
}

fn variability_rows(cfg: &RunConfig, texts: &[Text], grid: &[Vec<Option<CellOutcome>>], defs: &[CellDef]) -> Vec<VariabilityRow> {
    if cfg.syntax_manifest.is_none() || cfg.semantics_manifest.is_none() {
        return Vec::new();
    }
    let value = |o: &CellOutcome, m: Metric, s: Summary| match cfg.variability_source {
        VariabilitySource::Normalized => o
            .normalized
            .get(&(m, s))
            .and_then(|r| r.as_ref().ok())
            .map(|n| n.x_norm),
        VariabilitySource::Raw => o.raw(m, s),
    };
    let collect = |role: fn(&Roles) -> bool, d: usize, m: Metric, s: Summary| -> Vec<f64> {
        texts
            .iter()
            .zip(grid)
            .filter(|(t, _)| role(&t.roles))
            .filter_map(|(_, row)| row[d].as_ref().and_then(|o| value(o, m, s)))
            .filter(|v| v.is_finite())
            .collect()
    };
    let mut rows = Vec::new();
    for (d, def) in defs.iter().enumerate() {
        for m in Metric::ALL {
            for s in Summary::ALL {
                let syntax = collect(|r| r.syntax, d, m, s);
                let semantics = collect(|r| r.semantics, d, m, s);
                let v_syntax = stats::coefficient_of_variation(&syntax, cfg.std).ok();
                let v_semantics = stats::coefficient_of_variation(&semantics, cfg.std).ok();
                let ratio = stats::variability_ratio(&syntax, &semantics, cfg.std).ok();
                rows.push(VariabilityRow {
                    cell: def.key(m, s),
                    v_syntax,
                    v_semantics,
                    v_ratio: ratio.map(|r| r.ratio),
                    syntax_dominant: ratio.map(|r| r.syntax_dominant),
                });
            }
        }
    }
    report::sort_variability(&mut rows);
    rows
}

/// Runs the sweep and writes the three CSV reports to `cfg.out`.
pub fn run_and_report(cfg: &RunConfig) -> Result<PipelineOutput> {
    let out = run_pipeline(cfg)?;
    report::report_csv(&out.records, &out.informativeness, &out.variability, &cfg.out)?;
    Ok(out)
}

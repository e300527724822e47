//! Co-occurrence networks and their enrichment with embedding-based virtual
//! edges.
//!
//! Nodes are the distinct words of a document in order of first occurrence.
//! Co-occurrence edges join adjacent tokens. Virtual edges join words that
//! are not adjacent anywhere in the text, weighted by the cosine similarity
//! of their embeddings, and are selected either globally (highest weights)
//! or locally with the disparity filter (lowest significance `alpha`).
//!
//! In both strategies the number of virtual edges kept is
//! `K = round_half_up(P / 100 * N_E)`, where `N_E` is the number of
//! co-occurrence edges.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::corpus::Document;
use crate::embeddings::EmbeddingTable;
use crate::error::{Error, Result};
use crate::graph::SimpleGraph;
use crate::report::fmt_sig6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Strategy {
    /// Plain co-occurrence network, no virtual edges.
    Original,
    Global,
    Local,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Original => "original",
            Strategy::Global => "global",
            Strategy::Local => "local",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "original" => Some(Strategy::Original),
            "global" => Some(Strategy::Global),
            "local" => Some(Strategy::Local),
            _ => None,
        }
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoocNetwork {
    words: Vec<String>,
    frequencies: Vec<usize>,
    cooc_edges: BTreeSet<(usize, usize)>,
    virtual_edges: BTreeMap<(usize, usize), f64>,
}

fn ordered(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Builds the co-occurrence network of a document.
pub fn build_cooc(doc: &Document) -> Result<CoocNetwork> {
    if doc.size() < 2 {
        return Err(Error::DocumentTooShort {
            text_id: doc.text_id.clone(),
            size: doc.size(),
            required: 2,
        });
    }
    let mut index: HashMap<&str, usize> = HashMap::new();
    let mut words = Vec::new();
    let mut frequencies = Vec::new();
    let mut ids = Vec::with_capacity(doc.size());
    for tok in &doc.tokens {
        let id = *index.entry(tok.as_str()).or_insert_with(|| {
            words.push(tok.clone());
            frequencies.push(0);
            words.len() - 1
        });
        frequencies[id] += 1;
        ids.push(id);
    }
    let cooc_edges = ids
        .windows(2)
        .filter(|w| w[0] != w[1])
        .map(|w| ordered(w[0], w[1]))
        .collect();
    Ok(CoocNetwork {
        words,
        frequencies,
        cooc_edges,
        virtual_edges: BTreeMap::new(),
    })
}

impl CoocNetwork {
    pub fn node_count(&self) -> usize {
        self.words.len()
    }

    /// Node words, index order = first occurrence in the document.
    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn word(&self, node: usize) -> &str {
        &self.words[node]
    }

    pub fn node_of(&self, word: &str) -> Option<usize> {
        self.words.iter().position(|w| w == word)
    }

    pub fn frequencies(&self) -> &[usize] {
        &self.frequencies
    }

    /// Number of co-occurrence edges (`N_E`).
    pub fn n_e(&self) -> usize {
        self.cooc_edges.len()
    }

    pub fn cooc_edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.cooc_edges
    }

    pub fn virtual_edges(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.virtual_edges
    }

    pub fn is_cooc(&self, a: usize, b: usize) -> bool {
        self.cooc_edges.contains(&ordered(a, b))
    }

    pub fn cooc_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.node_count()];
        for &(a, b) in &self.cooc_edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    /// Unweighted simple graph over co-occurrence and virtual edges.
    pub fn to_graph(&self) -> SimpleGraph {
        SimpleGraph::from_edges(
            self.node_count(),
            self.cooc_edges
                .iter()
                .copied()
                .chain(self.virtual_edges.keys().copied()),
        )
    }

    fn with_virtual(&self, chosen: &[EdgeCandidate]) -> CoocNetwork {
        let mut out = self.clone();
        out.virtual_edges = chosen.iter().map(|c| (c.pair, c.weight)).collect();
        out
    }

    /// Edge list `word_a word_b {C|V} weight`, one per line, sorted.
    /// Words within a line are in lexicographic order; co-occurrence edges
    /// have weight 1.
    pub fn dump(&self) -> String {
        let mut lines: Vec<String> = self
            .cooc_edges
            .iter()
            .map(|&(a, b)| (a, b, 'C', 1.0))
            .chain(self.virtual_edges.iter().map(|(&(a, b), &w)| (a, b, 'V', w)))
            .map(|(a, b, kind, w)| {
                let (x, y) = word_pair(&self.words, a, b);
                format!("{x} {y} {kind} {}", fmt_sig6(w))
            })
            .collect();
        lines.sort();
        let mut out = String::new();
        for l in lines {
            let _ = writeln!(out, "{l}");
        }
        out
    }
}

fn word_pair(words: &[String], a: usize, b: usize) -> (&str, &str) {
    let (x, y) = (words[a].as_str(), words[b].as_str());
    if x <= y {
        (x, y)
    } else {
        (y, x)
    }
}

/// A potential virtual edge between two nodes that never co-occur.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeCandidate {
    /// Node indices, smaller first.
    pub pair: (usize, usize),
    pub weight: f64,
    /// Disparity significance, `min(alpha_ij, alpha_ji)`; set by the local strategy.
    pub alpha: Option<f64>,
}

fn cmp_pair_words(words: &[String], a: (usize, usize), b: (usize, usize)) -> Ordering {
    word_pair(words, a.0, a.1).cmp(&word_pair(words, b.0, b.1))
}

fn cmp_by_weight(words: &[String], a: &EdgeCandidate, b: &EdgeCandidate) -> Ordering {
    b.weight
        .total_cmp(&a.weight)
        .then_with(|| cmp_pair_words(words, a.pair, b.pair))
}

/// All non-adjacent node pairs with a positive cosine similarity, sorted
/// by weight descending, ties by lexicographic word pair.
pub fn candidates(net: &CoocNetwork, table: &EmbeddingTable) -> Vec<EdgeCandidate> {
    let units: Vec<Option<Vec<f64>>> = net.words.iter().map(|w| table.unit_vector(w)).collect();
    let n = net.node_count();
    let mut out: Vec<EdgeCandidate> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let units = &units;
            (i + 1..n).filter_map(move |j| {
                let (a, b) = (units[i].as_ref()?, units[j].as_ref()?);
                if net.is_cooc(i, j) {
                    return None;
                }
                let w = a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>().min(1.0);
                (w > 0.0).then_some(EdgeCandidate {
                    pair: (i, j),
                    weight: w,
                    alpha: None,
                })
            })
        })
        .collect();
    out.sort_by(|a, b| cmp_by_weight(&net.words, a, b));
    out
}

/// `K = round_half_up(P / 100 * N_E)`.
pub fn virtual_edge_budget(fraction_percent: f64, n_e: usize) -> usize {
    (fraction_percent / 100.0 * n_e as f64 + 0.5).floor().max(0.0) as usize
}

/// Result of one thresholding pass.
#[derive(Debug, Clone, PartialEq)]
pub struct Enrichment {
    pub network: CoocNetwork,
    /// Requested number of virtual edges.
    pub budget: usize,
    /// `budget - added` when there were not enough candidates.
    pub shortfall: usize,
}

impl Enrichment {
    pub fn added(&self) -> usize {
        self.network.virtual_edges.len()
    }
}

fn check_fraction(p: f64) -> Result<()> {
    if !(0.0..=100.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("fraction {p} outside [0, 100]")));
    }
    Ok(())
}

/// Adds the `K` highest-weight candidates.
pub fn enrich_global(net: &CoocNetwork, cands: &[EdgeCandidate], fraction_percent: f64) -> Result<Enrichment> {
    check_fraction(fraction_percent)?;
    let budget = virtual_edge_budget(fraction_percent, net.n_e());
    let take = budget.min(cands.len());
    Ok(Enrichment {
        network: net.with_virtual(&cands[..take]),
        budget,
        shortfall: budget - take,
    })
}

/// Disparity-filter significance of an edge seen from one endpoint:
/// `1 - (k - 1) * integral_0^pi (1 - x)^(k - 2) dx` with `pi = w / strength`,
/// evaluated in closed form as `(1 - pi)^(k - 1)`. Lower is more significant.
/// A degree-1 endpoint yields 1.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn disparity_alpha(weight: f64, strength: f64, degree: usize) -> Result<f64> {
    if !(weight > 0.0) || !weight.is_finite() {
        return Err(Error::InvalidArgument(format!("edge weight must be > 0, got {weight}")));
    }
    if !(strength >= weight) || !strength.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "node strength {strength} smaller than edge weight {weight}"
        )));
    }
    if degree == 0 {
        return Err(Error::InvalidArgument("node degree must be >= 1".into()));
    }
    if degree == 1 {
        return Ok(1.0);
    }
    let pi = (weight / strength).min(1.0);
    let exp = i32::try_from(degree - 1).unwrap_or(i32::MAX);
    Ok((1.0 - pi).powi(exp))
}

/// Disparity significance for every candidate on the union graph
/// (co-occurrence edges at weight 1 plus all candidates).
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn candidate_significance(net: &CoocNetwork, cands: &[EdgeCandidate]) -> Result<Vec<f64>> {
    let mut degree = net.cooc_degrees();
    let mut strength: Vec<f64> = degree.iter().map(|&d| d as f64).collect();
    for c in cands {
        if !(c.weight > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "candidate ({}, {}) has non-positive weight {}",
                c.pair.0, c.pair.1, c.weight
            )));
        }
        for v in [c.pair.0, c.pair.1] {
            degree[v] += 1;
            strength[v] += c.weight;
        }
    }
    cands
        .iter()
        .map(|c| {
            let (i, j) = c.pair;
            let from_i = disparity_alpha(c.weight, strength[i], degree[i])?;
            let from_j = disparity_alpha(c.weight, strength[j], degree[j])?;
            Ok(from_i.min(from_j))
        })
        .collect()
}

/// Adds the `K` candidates with the lowest disparity significance.
/// Ties break by higher weight, then lexicographic word pair.
pub fn enrich_local(net: &CoocNetwork, cands: &[EdgeCandidate], fraction_percent: f64) -> Result<Enrichment> {
    check_fraction(fraction_percent)?;
    let budget = virtual_edge_budget(fraction_percent, net.n_e());
    let alphas = candidate_significance(net, cands)?;
    let mut ranked: Vec<EdgeCandidate> = cands
        .iter()
        .zip(alphas)
        .map(|(c, a)| EdgeCandidate {
            alpha: Some(a),
            ..c.clone()
        })
        .collect();
    ranked.sort_by(|a, b| {
            a.alpha
                .unwrap_or(1.0)
                .total_cmp(&b.alpha.unwrap_or(1.0))
                .then_with(|| cmp_by_weight(&net.words, a, b))
    });
    let take = budget.min(ranked.len());
    Ok(Enrichment {
        network: net.with_virtual(&ranked[..take]),
        budget,
        shortfall: budget - take,
    })
}

/// Dispatches on strategy; `Original` returns the network unchanged.
pub fn enrich(net: &CoocNetwork, cands: &[EdgeCandidate], strategy: Strategy, fraction_percent: f64) -> Result<Enrichment> {
    match strategy {
        Strategy::Original => Ok(Enrichment {
            network: net.clone(),
            budget: 0,
            shortfall: 0,
        }),
        Strategy::Global => enrich_global(net, cands, fraction_percent),
        Strategy::Local => enrich_local(net, cands, fraction_percent),
    }
}

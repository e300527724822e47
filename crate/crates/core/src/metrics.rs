//! The six node-level network metrics and their two summaries.
//!
//! All metrics treat the graph as unweighted and undirected. On disconnected
//! graphs, average shortest path, closeness and betweenness are evaluated on
//! the largest connected component (other nodes are undefined and skipped
//! by the summaries). Eigenvector centrality is the dominant eigenvector of
//! the largest component, with zero on all other nodes. Clustering and
//! PageRank use the whole graph.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::SimpleGraph;
use crate::network::CoocNetwork;

pub const TOP_WORDS: usize = 10;
pub const DEFAULT_DAMPING: f64 = 0.85;
pub const ITERATION_CAP: usize = 1000;
pub const PAGERANK_TOLERANCE: f64 = 1e-10;
pub const EIGENVECTOR_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Metric {
    AvgShortestPath,
    Closeness,
    Clustering,
    Betweenness,
    PageRank,
    Eigenvector,
}

impl Metric {
    pub const ALL: [Metric; 6] = [
        Metric::AvgShortestPath,
        Metric::Closeness,
        Metric::Clustering,
        Metric::Betweenness,
        Metric::PageRank,
        Metric::Eigenvector,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::AvgShortestPath => "avg_shortest_path",
            Metric::Closeness => "closeness",
            Metric::Clustering => "clustering",
            Metric::Betweenness => "betweenness",
            Metric::PageRank => "pagerank",
            Metric::Eigenvector => "eigenvector",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.as_str() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Summary {
    AllNodes,
    TopWords,
}

impl Summary {
    pub const ALL: [Summary; 2] = [Summary::AllNodes, Summary::TopWords];

    pub fn as_str(self) -> &'static str {
        match self {
            Summary::AllNodes => "all_nodes",
            Summary::TopWords => "top_words",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.as_str() == s)
    }
}

/// The ten most frequent words of a network, ties by first occurrence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopWords {
    pub words: Vec<String>,
}

impl TopWords {
    /// Node indices of these words in `net`; words absent from `net` are dropped.
    pub fn nodes_in(&self, net: &CoocNetwork) -> Vec<usize> {
        self.words.iter().filter_map(|w| net.node_of(w)).collect()
    }
}

pub fn top_words(net: &CoocNetwork) -> TopWords {
    let freq = net.frequencies();
    let mut order: Vec<usize> = (0..net.node_count()).collect();
    order.sort_by(|&a, &b| {
        freq[b]
            .cmp(&freq[a])
            .then(a.cmp(&b))
            .then_with(|| net.word(a).cmp(net.word(b)))
    });
    TopWords {
        words: order
            .into_iter()
            .take(TOP_WORDS)
            .map(|i| net.word(i).to_string())
            .collect(),
    }
}

fn lcc_or_err(g: &SimpleGraph) -> Result<Vec<usize>> {
    let lcc = g.largest_component();
    if lcc.len() < 2 {
        return Err(Error::Undefined(format!(
            "largest component has {} node(s)",
            lcc.len()
        )));
    }
    Ok(lcc)
}

/// Sum of hop distances from every node to the rest of its component;
/// `None` outside the largest component.
fn distance_sums(g: &SimpleGraph) -> (Vec<Option<u64>>, usize) {
    let lcc = g.largest_component();
    let mut out = vec![None; g.node_count()];
    if lcc.len() < 2 {
        return (out, lcc.len());
    }
    let sums: Vec<u64> = lcc
        .par_iter()
        .map(|&s| {
            g.bfs_distances(s)
                .into_iter()
                .filter(|&d| d != usize::MAX)
                .map(|d| d as u64)
                .sum()
        })
        .collect();
    for (&v, s) in lcc.iter().zip(sums) {
        out[v] = Some(s);
    }
    (out, lcc.len())
}

/// Per-node mean distance to the other nodes of the largest component.
/// Its mean over all nodes is the average shortest path length.
pub fn shortest_path_lengths(g: &SimpleGraph) -> Vec<Option<f64>> {
    let (sums, n_c) = distance_sums(g);
    sums.into_iter()
        .map(|s| s.map(|s| s as f64 / (n_c - 1) as f64))
        .collect()
}

/// Mean hop distance over all node pairs of the largest component.
pub fn avg_shortest_path(g: &SimpleGraph) -> Result<f64> {
    if g.node_count() < 2 {
        return Err(Error::InvalidArgument("graph needs at least 2 nodes".into()));
    }
    let lcc = lcc_or_err(g)?;
    let (sums, _) = distance_sums(g);
    let total: u64 = sums.iter().flatten().sum();
    let n = lcc.len() as f64;
    Ok(total as f64 / (n * (n - 1.0)))
}

/// `(n_c - 1) / sum of distances`, within the largest component.
pub fn closeness_all(g: &SimpleGraph) -> Vec<Option<f64>> {
    let (sums, n_c) = distance_sums(g);
    sums.into_iter()
        .map(|s| s.map(|s| (n_c - 1) as f64 / s as f64))
        .collect()
}

pub fn closeness(g: &SimpleGraph, node: usize) -> Result<f64> {
    closeness_all(g)[node].ok_or_else(|| {
        Error::Undefined(format!("node {node} is outside the largest component"))
    })
}

pub fn clustering(g: &SimpleGraph, node: usize) -> f64 {
    let nbrs = g.neighbors(node);
    let k = nbrs.len();
    if k < 2 {
        return 0.0;
    }
    let mut links = 0usize;
    for (idx, &u) in nbrs.iter().enumerate() {
        let later = &nbrs[idx + 1..];
        links += count_common(g.neighbors(u), later);
    }
    links as f64 / (k * (k - 1) / 2) as f64
}

fn count_common(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

pub fn clustering_all(g: &SimpleGraph) -> Vec<f64> {
    (0..g.node_count()).map(|v| clustering(g, v)).collect()
}

/// Single-source dependency accumulation (Brandes) over the whole graph.
fn source_dependencies(g: &SimpleGraph, s: usize) -> Vec<f64> {
    let n = g.node_count();
    let mut stack = Vec::with_capacity(n);
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![usize::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    sigma[s] = 1.0;
    dist[s] = 0;
    queue.push_back(s);
    while let Some(v) = queue.pop_front() {
        stack.push(v);
        for &w in g.neighbors(v) {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
            if dist[w] == dist[v] + 1 {
                sigma[w] += sigma[v];
            }
        }
    }
    let mut delta = vec![0.0f64; n];
    while let Some(w) = stack.pop() {
        for &v in g.neighbors(w) {
            if dist[v] != usize::MAX && dist[v] + 1 == dist[w] {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
        }
    }
    delta[s] = 0.0;
    delta
}

/// Normalized betweenness on the largest component:
/// `sum_{s<t} sigma_st(v) / sigma_st` divided by `(n_c - 1)(n_c - 2) / 2`.
///
/// Sources are processed in parallel; their dependency vectors are summed in
/// ascending source order so the result does not depend on the thread count.
pub fn betweenness_all(g: &SimpleGraph) -> Vec<Option<f64>> {
    let n = g.node_count();
    let lcc = g.largest_component();
    let mut out = vec![None; n];
    if lcc.len() < 2 {
        return out;
    }
    let per_source: Vec<Vec<f64>> = lcc.par_iter().map(|&s| source_dependencies(g, s)).collect();
    let mut total = vec![0.0f64; n];
    for deps in &per_source {
        for &v in &lcc {
            total[v] += deps[v];
        }
    }
    let n_c = lcc.len() as f64;
    let pairs = (n_c - 1.0) * (n_c - 2.0) / 2.0;
    for &v in &lcc {
        // Each unordered pair was counted from both ends.
        let raw = total[v] / 2.0;
        out[v] = Some(if pairs > 0.0 { raw / pairs } else { 0.0 });
    }
    out
}

pub fn betweenness(g: &SimpleGraph, node: usize) -> Option<f64> {
    betweenness_all(g)[node]
}

/// PageRank by power iteration with uniform teleport and uniform
/// redistribution of mass from isolated nodes. Scores sum to 1.
pub fn pagerank(g: &SimpleGraph, damping: f64) -> Result<Vec<f64>> {
    let n = g.node_count();
    if n == 0 {
        return Err(Error::InvalidArgument("PageRank of an empty graph".into()));
    }
    if !(damping > 0.0 && damping < 1.0) {
        return Err(Error::InvalidArgument(format!("damping {damping} outside (0, 1)")));
    }
    let nf = n as f64;
    let mut x = vec![1.0 / nf; n];
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for _ in 0..ITERATION_CAP {
        let dangling: f64 = (0..n).filter(|&v| g.degree(v) == 0).map(|v| x[v]).sum();
        let base = (1.0 - damping) / nf + damping * dangling / nf;
        for (v, slot) in next.iter_mut().enumerate() {
            let inflow: f64 = g
                .neighbors(v)
                .iter()
                .map(|&u| x[u] / g.degree(u) as f64)
                .sum();
            *slot = base + damping * inflow;
        }
        let total: f64 = next.iter().sum();
        for s in next.iter_mut() {
            *s /= total;
        }
        residual = x.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut x, &mut next);
        if residual < PAGERANK_TOLERANCE {
            return Ok(x);
        }
    }
    Err(Error::NotConverged {
        algorithm: "pagerank",
        iterations: ITERATION_CAP,
        residual,
    })
}

/// Eigenvector centrality: the unit-norm, nonnegative Perron vector of the
/// largest component's adjacency matrix; zero elsewhere.
///
/// Power iteration runs on `A + I`, which has the same eigenvectors but no
/// `-lambda` twin for bipartite components. Iteration stops once the
/// estimated distance to the fixed point (step size scaled by the observed
/// contraction rate) drops below the tolerance. Components whose spectral
/// gap is too small to converge within the iteration cap are solved with a
/// dense symmetric eigendecomposition instead.
pub fn eigenvector(g: &SimpleGraph) -> Result<Vec<f64>> {
    if g.edge_count() == 0 {
        return Err(Error::Undefined("eigenvector centrality needs at least one edge".into()));
    }
    let lcc = g.largest_component();
    let n = g.node_count();
    let m = lcc.len();
    let mut local = vec![usize::MAX; n];
    for (i, &v) in lcc.iter().enumerate() {
        local[v] = i;
    }
    let adj: Vec<Vec<usize>> = lcc
        .iter()
        .map(|&v| g.neighbors(v).iter().map(|&w| local[w]).collect())
        .collect();

    let vec = power_iteration(&adj).unwrap_or_else(|| dense_perron(&adj));
    let mut out = vec![0.0; n];
    for (i, &v) in lcc.iter().enumerate() {
        out[v] = vec[i];
    }
    debug_assert_eq!(m, vec.len());
    Ok(out)
}

fn normalize_l2(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in v.iter_mut() {
        *x /= norm;
    }
}

fn power_iteration(adj: &[Vec<usize>]) -> Option<Vec<f64>> {
    let m = adj.len();
    let mut x = vec![1.0 / (m as f64).sqrt(); m];
    let mut next = vec![0.0; m];
    let mut prev_step = f64::INFINITY;
    for _ in 0..ITERATION_CAP {
        for (i, slot) in next.iter_mut().enumerate() {
            *slot = x[i] + adj[i].iter().map(|&j| x[j]).sum::<f64>();
        }
        normalize_l2(&mut next);
        let step = x
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        std::mem::swap(&mut x, &mut next);
        let rate = (step / prev_step).min(0.999_999);
        let error_estimate = if rate.is_finite() && rate > 0.0 {
            step / (1.0 - rate)
        } else {
            step
        };
        if step == 0.0 || error_estimate < EIGENVECTOR_TOLERANCE {
            return Some(x);
        }
        prev_step = step;
    }
    None
}

fn dense_perron(adj: &[Vec<usize>]) -> Vec<f64> {
    let m = adj.len();
    let mut a = nalgebra::DMatrix::<f64>::zeros(m, m);
    for (i, row) in adj.iter().enumerate() {
        for &j in row {
            a[(i, j)] = 1.0;
        }
    }
    let eig = nalgebra::SymmetricEigen::new(a);
    let top = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let mut v: Vec<f64> = eig.eigenvectors.column(top).iter().map(|x| x.abs()).collect();
    normalize_l2(&mut v);
    v
}

/// A summary value, or the reason it is undefined.
#[derive(Debug, Clone, PartialEq)]
pub enum MetricValue {
    Defined { value: f64, skipped: usize },
    Undefined(String),
}

impl MetricValue {
    pub fn value(&self) -> Option<f64> {
        match self {
            MetricValue::Defined { value, .. } => Some(*value),
            MetricValue::Undefined(_) => None,
        }
    }
}

/// Arithmetic mean of the defined per-node values, over all nodes or over
/// the given top-word nodes. Nodes with undefined values are skipped and
/// counted.
pub fn summarize(per_node: &[Option<f64>], mode: Summary, top_nodes: &[usize]) -> Result<(f64, usize)> {
    let selected: Vec<Option<f64>> = match mode {
        Summary::AllNodes => per_node.to_vec(),
        Summary::TopWords => top_nodes.iter().map(|&v| per_node.get(v).copied().flatten()).collect(),
    };
    let defined: Vec<f64> = selected.iter().flatten().copied().collect();
    if defined.is_empty() {
        return Err(Error::Undefined(format!(
            "no defined values among {} node(s)",
            selected.len()
        )));
    }
    let skipped = selected.len() - defined.len();
    Ok((defined.iter().sum::<f64>() / defined.len() as f64, skipped))
}

/// Twelve summary values for one graph.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricVector {
    pub values: BTreeMap<(Metric, Summary), MetricValue>,
    /// Fraction of nodes in the largest connected component.
    pub component_coverage: f64,
}

impl MetricVector {
    pub fn get(&self, metric: Metric, summary: Summary) -> &MetricValue {
        &self.values[&(metric, summary)]
    }
}

/// Per-node values of one metric; whole-metric failures are returned as
/// the undefined reason.
pub fn per_node(g: &SimpleGraph, metric: Metric, damping: f64) -> std::result::Result<Vec<Option<f64>>, String> {
    let wrap = |v: Vec<f64>| v.into_iter().map(Some).collect();
    match metric {
        Metric::AvgShortestPath => Ok(shortest_path_lengths(g)),
        Metric::Closeness => Ok(closeness_all(g)),
        Metric::Clustering => Ok(wrap(clustering_all(g))),
        Metric::Betweenness => Ok(betweenness_all(g)),
        Metric::PageRank => pagerank(g, damping).map(wrap).map_err(|e| e.to_string()),
        Metric::Eigenvector => eigenvector(g).map(wrap).map_err(|e| e.to_string()),
    }
}

pub fn metric_vector(g: &SimpleGraph, top_nodes: &[usize], damping: f64) -> MetricVector {
    let mut values = BTreeMap::new();
    for metric in Metric::ALL {
        let nodes = per_node(g, metric, damping);
        for summary in Summary::ALL {
            let v = match &nodes {
                Err(reason) => MetricValue::Undefined(reason.clone()),
                Ok(nodes) => match summarize(nodes, summary, top_nodes) {
                    Ok((value, skipped)) => MetricValue::Defined { value, skipped },
                    Err(e) => MetricValue::Undefined(e.to_string()),
                },
            };
            values.insert((metric, summary), v);
        }
    }
    let n = g.node_count();
    let component_coverage = if n == 0 {
        0.0
    } else {
        g.largest_component().len() as f64 / n as f64
    };
    MetricVector {
        values,
        component_coverage,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Document;
    use crate::network::build_cooc;

    fn path3() -> SimpleGraph {
        SimpleGraph::from_edges(3, [(0, 1), (1, 2)])
    }

    fn star(leaves: usize) -> SimpleGraph {
        SimpleGraph::from_edges(leaves + 1, (1..=leaves).map(|l| (0, l)))
    }

    fn complete(n: usize) -> SimpleGraph {
        SimpleGraph::from_edges(n, (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))))
    }

    #[test]
    fn shortest_path_fixtures() {
        assert!((avg_shortest_path(&path3()).unwrap() - 4.0 / 3.0).abs() < 1e-12);
        assert!((avg_shortest_path(&star(3)).unwrap() - 1.5).abs() < 1e-12);
        for n in 3..=10 {
            assert_eq!(avg_shortest_path(&complete(n)).unwrap(), 1.0);
        }
        let empty = SimpleGraph::from_edges(3, []);
        assert!(avg_shortest_path(&empty).is_err());
        assert!(avg_shortest_path(&SimpleGraph::from_edges(1, [])).is_err());
    }

    #[test]
    fn per_node_path_lengths_average_to_l() {
        let g = SimpleGraph::from_edges(6, [(0, 1), (1, 2), (2, 3), (1, 4), (4, 5), (5, 2)]);
        let (mean, _) = summarize(&shortest_path_lengths(&g), Summary::AllNodes, &[]).unwrap();
        assert!((mean - avg_shortest_path(&g).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn closeness_fixtures() {
        let s = star(3);
        assert_eq!(closeness(&s, 0).unwrap(), 1.0);
        assert!((closeness(&s, 1).unwrap() - 0.6).abs() < 1e-12);
        for n in 3..=6 {
            assert_eq!(closeness(&complete(n), n - 1).unwrap(), 1.0);
        }
        let split = SimpleGraph::from_edges(5, [(0, 1), (1, 2), (3, 4)]);
        assert!(closeness(&split, 3).is_err());
    }

    #[test]
    fn clustering_fixtures() {
        assert_eq!(clustering(&complete(3), 0), 1.0);
        assert_eq!(clustering(&path3(), 1), 0.0);
        assert_eq!(clustering(&path3(), 0), 0.0);
        let g = SimpleGraph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2)]);
        assert!((clustering(&g, 0) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn betweenness_fixtures() {
        assert_eq!(betweenness(&path3(), 1), Some(1.0));
        assert_eq!(betweenness(&path3(), 0), Some(0.0));
        for n in 3..=6 {
            assert!(betweenness_all(&complete(n)).iter().all(|b| *b == Some(0.0)));
        }
        for leaves in 2..=6 {
            assert!((betweenness(&star(leaves), 0).unwrap() - 1.0).abs() < 1e-12);
        }
        let split = SimpleGraph::from_edges(5, [(0, 1), (1, 2), (3, 4)]);
        assert_eq!(betweenness(&split, 3), None);
    }

    #[test]
    fn pagerank_fixtures() {
        for n in 3..=10 {
            let pr = pagerank(&complete(n), DEFAULT_DAMPING).unwrap();
            assert!(pr.iter().all(|p| (p - 1.0 / n as f64).abs() < 1e-12));
        }
        let pr = pagerank(&path3(), DEFAULT_DAMPING).unwrap();
        assert!(pr[1] > pr[0]);
        assert!((pr[0] - pr[2]).abs() < 1e-12);
        assert!((pr.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        // Isolated node gets teleport plus redistributed mass.
        let pr = pagerank(&SimpleGraph::from_edges(3, [(0, 1)]), DEFAULT_DAMPING).unwrap();
        assert!((pr.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(pagerank(&SimpleGraph::from_edges(0, []), 0.85).is_err());
        assert!(pagerank(&path3(), 1.0).is_err());
    }

    #[test]
    fn eigenvector_fixtures() {
        for n in 3..=8 {
            let ev = eigenvector(&complete(n)).unwrap();
            assert!(ev.iter().all(|x| (x - 1.0 / (n as f64).sqrt()).abs() < 1e-9));
        }
        let ev = eigenvector(&star(3)).unwrap();
        assert!(ev[0] > ev[1]);
        assert!((ev[1] - ev[2]).abs() < 1e-12 && (ev[2] - ev[3]).abs() < 1e-12);
        let ev = eigenvector(&SimpleGraph::from_edges(2, [(0, 1)])).unwrap();
        assert!((ev[0] - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((ev[1] - 0.5f64.sqrt()).abs() < 1e-12);
        assert!(eigenvector(&SimpleGraph::from_edges(3, [])).is_err());
    }

    #[test]
    fn eigenvector_long_path_falls_back_cleanly() {
        // Small spectral gap: power iteration alone cannot reach tolerance in time.
        let n = 400;
        let g = SimpleGraph::from_edges(n, (0..n - 1).map(|i| (i, i + 1)));
        let ev = eigenvector(&g).unwrap();
        // Path graph Perron vector: sin(pi * (i + 1) / (n + 1)), normalized.
        let exact: Vec<f64> = (0..n)
            .map(|i| (std::f64::consts::PI * (i + 1) as f64 / (n + 1) as f64).sin())
            .collect();
        let norm = exact.iter().map(|x| x * x).sum::<f64>().sqrt();
        for (a, b) in ev.iter().zip(&exact) {
            assert!((a - b / norm).abs() < 1e-9);
        }
    }

    #[test]
    fn summarize_cases() {
        let vals = vec![Some(0.5); 4];
        assert_eq!(summarize(&vals, Summary::AllNodes, &[]).unwrap().0, 0.5);
        assert_eq!(summarize(&vals, Summary::TopWords, &[1, 2]).unwrap().0, 0.5);
        let vals = vec![Some(1.0), Some(0.0)];
        assert_eq!(summarize(&vals, Summary::TopWords, &[0]).unwrap().0, 1.0);
        let vals = vec![Some(1.0), None, Some(3.0)];
        assert_eq!(summarize(&vals, Summary::TopWords, &[0, 1, 2]).unwrap(), (2.0, 1));
        assert!(summarize(&[None, None], Summary::AllNodes, &[]).is_err());
    }

    fn doc(text: &str) -> Document {
        Document::new("t", "en", text.split(' ').map(String::from).collect())
    }

    #[test]
    fn top_words_order() {
        let net = build_cooc(&doc("a b a c a b a b a")).unwrap();
        assert_eq!(top_words(&net).words, vec!["a", "b", "c"]);
        let net = build_cooc(&doc("x b c b c c b")).unwrap();
        assert_eq!(top_words(&net).words, vec!["b", "c", "x"]);
        let many: Vec<String> = (0..30).map(|i| format!("w{}", char::from(b'a' + (i % 15) as u8))).collect();
        let net = build_cooc(&Document::new("t", "en", many)).unwrap();
        assert_eq!(top_words(&net).words.len(), TOP_WORDS);
    }

    #[test]
    fn top_words_shuffle_invariant() {
        let text = "a a a a a a a a a a a a b b b b b b b b b b b c c c c c c c c c c d d d d d d d d d e e e e e e e e f f f f f f f g g g g g g h h h h h i i i i j j j k k l";
        let original = doc(text);
        let set = crate::corpus::make_shuffles(&original, 5, 11).unwrap();
        let expected = top_words(&build_cooc(&original).unwrap());
        for r in &set.replicas {
            assert_eq!(top_words(&build_cooc(r).unwrap()), expected);
        }
    }

    #[test]
    fn metric_vector_is_complete() {
        let g = SimpleGraph::from_edges(6, [(0, 1), (1, 2), (3, 4)]);
        let mv = metric_vector(&g, &[0, 3, 5], DEFAULT_DAMPING);
        assert_eq!(mv.values.len(), 12);
        assert!((mv.component_coverage - 0.5).abs() < 1e-15);
        // Node 5 is isolated and outside the largest component.
        match mv.get(Metric::Closeness, Summary::TopWords) {
            MetricValue::Defined { skipped, .. } => assert_eq!(*skipped, 2),
            other => panic!("{other:?}"),
        }
        let pr = mv.get(Metric::PageRank, Summary::AllNodes).value().unwrap();
        assert!((pr - 1.0 / 6.0).abs() < 1e-9);
    }
}

//! Reference implementations used to check the library. They favour
//! directness over speed and share no code with the crate under test.

#![allow(dead_code, clippy::needless_range_loop)]

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn mini_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/mini")
}

// ---------------------------------------------------------------- quadrature

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
    let m = 0.5 * (a + b);
    let fm = f(m);
    (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64, whole: f64, m: f64, fm: f64, eps: f64, depth: u32) -> f64 {
    let (lm, flm, left) = simpson(f, a, fa, m, fm);
    let (rm, frm, right) = simpson(f, m, fm, b, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * eps {
        return left + right + delta / 15.0;
    }
    simpson_rec(f, a, fa, m, fm, left, lm, flm, eps / 2.0, depth - 1)
        + simpson_rec(f, m, fm, b, fb, right, rm, frm, eps / 2.0, depth - 1)
}

/// Adaptive Simpson quadrature with Richardson correction.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, eps: f64) -> f64 {
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    simpson_rec(f, a, fa, b, fb, whole, m, fm, eps, 50)
}

/// Disparity significance straight from its integral definition.
pub fn alpha_by_quadrature(pi: f64, k: usize) -> f64 {
    if k <= 1 {
        return 1.0;
    }
    let e = (k - 2) as i32;
    let integral = integrate(&|x: f64| (1.0 - x).powi(e), 0.0, pi, 1e-15);
    1.0 - (k - 1) as f64 * integral
}

// ---------------------------------------------------------------- graphs

/// Plain adjacency-matrix graph.
#[derive(Debug, Clone)]
pub struct Graph {
    pub n: usize,
    pub adj: Vec<Vec<bool>>,
}

impl Graph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut adj = vec![vec![false; n]; n];
        for &(a, b) in edges {
            if a != b {
                adj[a][b] = true;
                adj[b][a] = true;
            }
        }
        Self { n, adj }
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in a + 1..self.n {
                if self.adj[a][b] {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].iter().filter(|&&x| x).count()
    }

    /// Largest connected component, ties to the one holding the lowest node.
    pub fn largest_component(&self) -> Vec<usize> {
        let mut label: Vec<usize> = (0..self.n).collect();
        fn find(label: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while label[r] != r {
                r = label[r];
            }
            label[x] = r;
            r
        }
        for (a, b) in self.edges() {
            let (ra, rb) = (find(&mut label, a), find(&mut label, b));
            if ra != rb {
                label[ra.max(rb)] = ra.min(rb);
            }
        }
        let roots: Vec<usize> = (0..self.n).map(|v| find(&mut label, v)).collect();
        let mut best: Vec<usize> = Vec::new();
        for r in 0..self.n {
            let members: Vec<usize> = (0..self.n).filter(|&v| roots[v] == r).collect();
            if members.len() > best.len() {
                best = members;
            }
        }
        best
    }
}

/// Every graph on `n` labelled nodes.
pub fn all_graphs(n: usize) -> Vec<Graph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    (0u64..1 << pairs.len())
        .map(|mask| {
            let edges: Vec<(usize, usize)> = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, p)| *p)
                .collect();
            Graph::new(n, &edges)
        })
        .collect()
}

/// Every labelled tree on `n >= 3` nodes, decoded from Prufer sequences.
pub fn all_trees(n: usize) -> Vec<Graph> {
    let len = n - 2;
    let total = n.pow(len as u32);
    (0..total)
        .map(|mut code| {
            let mut seq = Vec::with_capacity(len);
            for _ in 0..len {
                seq.push(code % n);
                code /= n;
            }
            let mut degree = vec![1usize; n];
            for &s in &seq {
                degree[s] += 1;
            }
            let mut edges = Vec::new();
            for &s in &seq {
                let leaf = (0..n).find(|&v| degree[v] == 1).unwrap();
                edges.push((leaf, s));
                degree[leaf] -= 1;
                degree[s] -= 1;
            }
            let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
            edges.push((rest[0], rest[1]));
            Graph::new(n, &edges)
        })
        .collect()
}

pub fn path(n: usize) -> Graph {
    Graph::new(n, &(1..n).map(|i| (i - 1, i)).collect::<Vec<_>>())
}

pub fn cycle(n: usize) -> Graph {
    Graph::new(n, &(0..n).map(|i| (i, (i + 1) % n)).collect::<Vec<_>>())
}

pub fn star(n: usize) -> Graph {
    Graph::new(n, &(1..n).map(|i| (0, i)).collect::<Vec<_>>())
}

pub fn complete(n: usize) -> Graph {
    let e: Vec<_> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    Graph::new(n, &e)
}

pub fn complete_bipartite(p: usize, q: usize) -> Graph {
    let e: Vec<_> = (0..p).flat_map(|a| (p..p + q).map(move |b| (a, b))).collect();
    Graph::new(p + q, &e)
}

pub fn wheel(n: usize) -> Graph {
    let mut e: Vec<_> = (1..n).map(|i| (0, i)).collect();
    e.extend((1..n).map(|i| (i, if i + 1 < n { i + 1 } else { 1 })));
    Graph::new(n, &e)
}

/// Named 7- and 8-node graphs, including disconnected ones.
pub fn named_families() -> Vec<Graph> {
    let mut out = Vec::new();
    for n in [7, 8] {
        out.extend([path(n), cycle(n), star(n), complete(n), wheel(n)]);
    }
    out.push(complete_bipartite(3, 4));
    out.push(complete_bipartite(3, 5));
    out.push(complete_bipartite(4, 4));
    out.push(complete_bipartite(1, 7));
    // cube graph
    let cube: Vec<_> = (0..8usize)
        .flat_map(|a| (0..3).map(move |bit| (a, a ^ (1 << bit))))
        .filter(|(a, b)| a < b)
        .collect();
    out.push(Graph::new(8, &cube));
    // ladder
    out.push(Graph::new(8, &[(0, 1), (1, 2), (2, 3), (4, 5), (5, 6), (6, 7), (0, 4), (1, 5), (2, 6), (3, 7)]));
    // two disjoint K4, equal size, so the lower-index one wins
    out.push(Graph::new(8, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (4, 5), (4, 6), (4, 7), (5, 6), (5, 7), (6, 7)]));
    // triangle plus a 4-path, larger component second
    out.push(Graph::new(7, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 6)]));
    // barbell
    out.push(Graph::new(8, &[(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (5, 7), (6, 7)]));
    // isolated nodes around a triangle
    out.push(Graph::new(8, &[(2, 5), (5, 7), (7, 2)]));
    out
}

/// `count` seeded Erdos-Renyi graphs with 2..=30 nodes.
pub fn random_graphs(count: usize, seed: u64) -> Vec<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(2..=30);
            let p = rng.gen_range(0.05..0.5);
            let mut edges = Vec::new();
            for a in 0..n {
                for b in a + 1..n {
                    if rng.gen_bool(p) {
                        edges.push((a, b));
                    }
                }
            }
            Graph::new(n, &edges)
        })
        .collect()
}

// ---------------------------------------------------------------- paths

/// Shortest-path structure: distances, path counts, and counts through
/// each intermediate node.
pub struct PathStats {
    pub dist: Vec<Vec<Option<usize>>>,
    pub sigma: Vec<Vec<f64>>,
    /// `through[s][t][v]`: shortest s-t paths with `v` as an inner node.
    pub through: Vec<Vec<Vec<f64>>>,
}

/// Enumerates every simple path by depth-first search. Small graphs only.
pub fn enumerate_paths(g: &Graph) -> PathStats {
    let n = g.n;
    let mut dist = vec![vec![None; n]; n];
    let mut sigma = vec![vec![0.0; n]; n];
    let mut through = vec![vec![vec![0.0; n]; n]; n];

    fn dfs(g: &Graph, path: &mut Vec<usize>, on: &mut [bool], found: &mut Vec<Vec<usize>>) {
        let v = *path.last().unwrap();
        found.push(path.clone());
        for w in 0..g.n {
            if g.adj[v][w] && !on[w] {
                on[w] = true;
                path.push(w);
                dfs(g, path, on, found);
                path.pop();
                on[w] = false;
            }
        }
    }

    for s in 0..n {
        let mut found = Vec::new();
        let mut on = vec![false; n];
        on[s] = true;
        dfs(g, &mut vec![s], &mut on, &mut found);
        for p in &found {
            let t = *p.last().unwrap();
            let len = p.len() - 1;
            match dist[s][t] {
                Some(d) if d < len => continue,
                Some(d) if d == len => {}
                _ => {
                    dist[s][t] = Some(len);
                    sigma[s][t] = 0.0;
                    through[s][t].iter_mut().for_each(|x| *x = 0.0);
                }
            }
            sigma[s][t] += 1.0;
            for &v in p.iter().take(p.len().saturating_sub(1)).skip(1) {
                through[s][t][v] += 1.0;
            }
        }
    }
    PathStats { dist, sigma, through }
}

/// Floyd-Warshall distances with path counts built layer by layer.
pub fn layered_paths(g: &Graph) -> PathStats {
    let n = g.n;
    let mut d = vec![vec![usize::MAX; n]; n];
    for a in 0..n {
        d[a][a] = 0;
        for b in 0..n {
            if g.adj[a][b] {
                d[a][b] = 1;
            }
        }
    }
    for k in 0..n {
        for a in 0..n {
            for b in 0..n {
                if d[a][k] != usize::MAX && d[k][b] != usize::MAX && d[a][k] + d[k][b] < d[a][b] {
                    d[a][b] = d[a][k] + d[k][b];
                }
            }
        }
    }
    let mut sigma = vec![vec![0.0; n]; n];
    for s in 0..n {
        sigma[s][s] = 1.0;
        let max_d = (0..n).filter(|&t| d[s][t] != usize::MAX).map(|t| d[s][t]).max().unwrap_or(0);
        for layer in 1..=max_d {
            for t in 0..n {
                if d[s][t] == layer {
                    sigma[s][t] = (0..n).filter(|&u| g.adj[u][t] && d[s][u] == layer - 1).map(|u| sigma[s][u]).sum();
                }
            }
        }
    }
    let mut through = vec![vec![vec![0.0; n]; n]; n];
    for s in 0..n {
        for t in 0..n {
            if s == t || d[s][t] == usize::MAX {
                continue;
            }
            for v in 0..n {
                if v != s && v != t && d[s][v] != usize::MAX && d[v][t] != usize::MAX && d[s][v] + d[v][t] == d[s][t] {
                    through[s][t][v] = sigma[s][v] * sigma[v][t];
                }
            }
        }
    }
    let dist = d
        .into_iter()
        .map(|row| row.into_iter().map(|x| (x != usize::MAX).then_some(x)).collect())
        .collect();
    PathStats { dist, sigma, through }
}

// ---------------------------------------------------------------- metrics

/// All six per-node metrics as the reference computes them.
pub struct OracleMetrics {
    pub asp: Vec<Option<f64>>,
    pub closeness: Vec<Option<f64>>,
    pub clustering: Vec<f64>,
    pub betweenness: Vec<Option<f64>>,
    pub pagerank: Vec<f64>,
    /// `None` for a graph without edges.
    pub eigenvector: Option<Vec<f64>>,
}

pub fn oracle_metrics(g: &Graph, paths: &PathStats, damping: f64) -> OracleMetrics {
    let n = g.n;
    let lcc = g.largest_component();
    let nc = lcc.len();
    let mut asp = vec![None; n];
    let mut closeness = vec![None; n];
    let mut betweenness = vec![None; n];
    if nc >= 2 {
        for &v in &lcc {
            let total: usize = lcc.iter().filter(|&&u| u != v).map(|&u| paths.dist[v][u].unwrap()).sum();
            asp[v] = Some(total as f64 / (nc - 1) as f64);
            closeness[v] = Some((nc - 1) as f64 / total as f64);
            let mut b = 0.0;
            for (i, &s) in lcc.iter().enumerate() {
                for &t in &lcc[i + 1..] {
                    if s != v && t != v {
                        b += paths.through[s][t][v] / paths.sigma[s][t];
                    }
                }
            }
            let pairs = ((nc - 1) * (nc - 2)) as f64 / 2.0;
            betweenness[v] = Some(if pairs > 0.0 { b / pairs } else { 0.0 });
        }
    }
    let clustering = (0..n)
        .map(|v| {
            let nb: Vec<usize> = (0..n).filter(|&u| g.adj[v][u]).collect();
            let k = nb.len();
            if k < 2 {
                return 0.0;
            }
            let mut links = 0;
            for a in 0..k {
                for b in a + 1..k {
                    if g.adj[nb[a]][nb[b]] {
                        links += 1;
                    }
                }
            }
            2.0 * links as f64 / (k * (k - 1)) as f64
        })
        .collect();
    OracleMetrics {
        asp,
        closeness,
        clustering,
        betweenness,
        pagerank: pagerank_linear(g, damping),
        eigenvector: eigenvector_by_multiplication(g, &lcc),
    }
}

/// Solves `(I - d S) x = (1 - d) / n` where `S` is the column-stochastic
/// transition matrix with isolated nodes jumping uniformly.
pub fn pagerank_linear(g: &Graph, damping: f64) -> Vec<f64> {
    let n = g.n;
    let mut m = nalgebra::DMatrix::<f64>::identity(n, n);
    for u in 0..n {
        let k = g.degree(u);
        for v in 0..n {
            let s = if k == 0 {
                1.0 / n as f64
            } else if g.adj[u][v] {
                1.0 / k as f64
            } else {
                0.0
            };
            m[(v, u)] -= damping * s;
        }
    }
    let rhs = nalgebra::DVector::from_element(n, (1.0 - damping) / n as f64);
    let x = m.lu().solve(&rhs).expect("PageRank system is nonsingular");
    let total: f64 = x.iter().sum();
    x.iter().map(|v| v / total).collect()
}

/// Repeated multiplication by `A + I` restricted to the largest component,
/// run until successive iterates agree to 1e-14.
pub fn eigenvector_by_multiplication(g: &Graph, lcc: &[usize]) -> Option<Vec<f64>> {
    if g.edges().is_empty() {
        return None;
    }
    let m = lcc.len();
    let mut x = vec![1.0; m];
    for _ in 0..2_000_000 {
        let mut y: Vec<f64> = (0..m)
            .map(|i| x[i] + (0..m).filter(|&j| g.adj[lcc[i]][lcc[j]]).map(|j| x[j]).sum::<f64>())
            .collect();
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        y.iter_mut().for_each(|v| *v /= norm);
        let change = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        x = y;
        if change < 1e-14 {
            break;
        }
    }
    let mut out = vec![0.0; g.n];
    for (i, &v) in lcc.iter().enumerate() {
        out[v] = x[i];
    }
    Some(out)
}

// ---------------------------------------------------------------- text

/// Deterministic alphabetic pseudo-words: "ba", "be", ... from an index.
pub fn pseudo_word(mut i: usize) -> String {
    const C: &[u8] = b"bcdfghjklmnpqrstvwz";
    const V: &[u8] = b"aeiou";
    let mut s = String::new();
    loop {
        s.push(C[i % C.len()] as char);
        i /= C.len();
        s.push(V[i % V.len()] as char);
        i /= V.len();
        if i == 0 {
            break;
        }
    }
    s
}

/// A document of `len` words drawn independently and uniformly from a
/// vocabulary of `vocab` pseudo-words.
pub fn iid_text(rng: &mut ChaCha8Rng, vocab: usize, len: usize) -> String {
    (0..len)
        .map(|_| pseudo_word(rng.gen_range(0..vocab)))
        .collect::<Vec<_>>()
        .join(" ")
}

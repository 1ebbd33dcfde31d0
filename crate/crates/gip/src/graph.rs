//! Sparse weighted directed graphs, edge-list ingestion, and the synthetic
//! generators (two-block SBM, Erdős–Rényi, ring lattice, composite networks).
//!
//! Edges always carry a strictly positive weight; an absent edge is simply not
//! stored. Bidirectional edges are stored as two directed edges of equal
//! weight. Self-edges are rejected everywhere.

use std::collections::HashMap;
use std::io::BufRead;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("malformed edge line {line}: {msg}")]
    MalformedLine { line: usize, msg: String },
    #[error("nonpositive weight {weight} on line {line}")]
    NonpositiveWeight { line: usize, weight: f64 },
    #[error("duplicate edge {src} -> {dst} (line {line})")]
    DuplicateEdge {
        line: usize,
        src: String,
        dst: String,
    },
    #[error("self-edge on node {node} (line {line})")]
    SelfEdge { line: usize, node: String },
    #[error("lattice degree {degree} is odd")]
    OddDegree { degree: usize },
    #[error("lattice degree {degree} must be smaller than size {size}")]
    DegreeTooLarge { degree: usize, size: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("operation undefined on an empty graph")]
    EmptyGraph,
    #[error("power iteration did not converge within {max_iter} iterations")]
    NonConvergent { max_iter: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Sparse weighted directed graph with both adjacency directions materialized.
///
/// `out_adj[i]` lists `(j, W_ij)` for edges leaving `i`; `in_adj[j]` lists
/// `(i, W_ij)` for edges entering `j`. Both encode the identical edge multiset.
#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    m: usize,
    out_adj: Vec<Vec<(u32, f64)>>,
    in_adj: Vec<Vec<(u32, f64)>>,
    labels: Option<Vec<String>>,
}

impl Graph {
    /// Builds a graph from directed `(src, dst, weight)` triples.
    pub fn from_edges(n: usize, edges: &[(u32, u32, f64)]) -> Result<Self, GraphError> {
        let mut b = GraphBuilder::new(n);
        for (line, &(i, j, w)) in edges.iter().enumerate() {
            b.add_edge(i, j, w, line + 1)?;
        }
        Ok(b.finish())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of stored directed edges.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn out_edges(&self, i: usize) -> &[(u32, f64)] {
        &self.out_adj[i]
    }

    pub fn in_edges(&self, j: usize) -> &[(u32, f64)] {
        &self.in_adj[j]
    }

    pub fn out_degree(&self, i: usize) -> usize {
        self.out_adj[i].len()
    }

    /// Original node labels when the graph came from an edge-list file.
    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l[i].clone(),
            None => i.to_string(),
        }
    }

    /// Arithmetic mean of the stored edge weights.
    pub fn mean_weight(&self) -> Result<f64, GraphError> {
        if self.m == 0 {
            return Err(GraphError::EmptyGraph);
        }
        let sum: f64 = self
            .out_adj
            .iter()
            .flat_map(|row| row.iter().map(|&(_, w)| w))
            .sum();
        Ok(sum / self.m as f64)
    }

    /// Smallest positive stored weight, if any edge exists.
    pub fn min_weight(&self) -> Option<f64> {
        self.out_adj
            .iter()
            .flat_map(|row| row.iter().map(|&(_, w)| w))
            .fold(None, |acc, w| match acc {
                None => Some(w),
                Some(a) => Some(if w < a { w } else { a }),
            })
    }

    /// Dominant eigenvalue modulus of the weight matrix.
    ///
    /// Acyclic graphs are detected first (nilpotent weight matrix, radius 0);
    /// otherwise runs shifted power iteration on `W + I`, which is aperiodic,
    /// and reports `rho(W + I) - 1`.
    pub fn spectral_radius(&self, tol: f64, max_iter: usize) -> Result<f64, GraphError> {
        if self.n == 0 {
            return Ok(0.0);
        }
        if self.is_acyclic() {
            return Ok(0.0);
        }
        let n = self.n;
        let mut v = vec![1.0 / n as f64; n];
        let mut next = vec![0.0; n];
        let mut lambda_prev = f64::NAN;
        for _ in 0..max_iter {
            for x in next.iter_mut() {
                *x = 0.0;
            }
            for (i, row) in self.out_adj.iter().enumerate() {
                let vi = v[i];
                // shifted iterate: (W + I) v
                next[i] += vi;
                if vi != 0.0 {
                    for &(j, w) in row {
                        next[j as usize] += w * vi;
                    }
                }
            }
            // note: transposing W leaves the spectrum unchanged, so either
            // adjacency direction works; out_adj accumulation feeds W^T v.
            let norm: f64 = next.iter().map(|x| x.abs()).fold(0.0, f64::max);
            if norm == 0.0 {
                return Ok(0.0);
            }
            let lambda = norm;
            for (dst, &src) in v.iter_mut().zip(next.iter()) {
                *dst = src / norm;
            }
            if (lambda - lambda_prev).abs() <= tol * lambda.max(1.0) {
                return Ok((lambda - 1.0).max(0.0));
            }
            lambda_prev = lambda;
        }
        Err(GraphError::NonConvergent { max_iter })
    }

    /// Weak connectivity: every node reachable from node 0 ignoring
    /// edge direction.
    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(i) = stack.pop() {
            let neighbors = self.out_adj[i].iter().chain(self.in_adj[i].iter());
            for &(j, _) in neighbors {
                if !seen[j as usize] {
                    seen[j as usize] = true;
                    count += 1;
                    stack.push(j as usize);
                }
            }
        }
        count == self.n
    }

    /// Kahn's algorithm; true when the graph has no directed cycle.
    fn is_acyclic(&self) -> bool {
        let mut indeg: Vec<usize> = (0..self.n).map(|j| self.in_adj[j].len()).collect();
        let mut stack: Vec<usize> = (0..self.n).filter(|&j| indeg[j] == 0).collect();
        let mut seen = 0;
        while let Some(i) = stack.pop() {
            seen += 1;
            for &(j, _) in &self.out_adj[i] {
                indeg[j as usize] -= 1;
                if indeg[j as usize] == 0 {
                    stack.push(j as usize);
                }
            }
        }
        seen == self.n
    }
}

struct GraphBuilder {
    n: usize,
    out_adj: Vec<Vec<(u32, f64)>>,
    in_adj: Vec<Vec<(u32, f64)>>,
    seen: HashMap<(u32, u32), ()>,
    labels: Option<Vec<String>>,
}

impl GraphBuilder {
    fn new(n: usize) -> Self {
        GraphBuilder {
            n,
            out_adj: vec![Vec::new(); n],
            in_adj: vec![Vec::new(); n],
            seen: HashMap::new(),
            labels: None,
        }
    }

    fn add_edge(&mut self, i: u32, j: u32, w: f64, line: usize) -> Result<(), GraphError> {
        assert!(
            (i as usize) < self.n && (j as usize) < self.n,
            "node index out of range"
        );
        if i == j {
            return Err(GraphError::SelfEdge {
                line,
                node: self.name(i),
            });
        }
        if !(w > 0.0) {
            return Err(GraphError::NonpositiveWeight { line, weight: w });
        }
        if self.seen.insert((i, j), ()).is_some() {
            return Err(GraphError::DuplicateEdge {
                line,
                src: self.name(i),
                dst: self.name(j),
            });
        }
        self.out_adj[i as usize].push((j, w));
        self.in_adj[j as usize].push((i, w));
        Ok(())
    }

    fn name(&self, i: u32) -> String {
        match &self.labels {
            Some(l) => l[i as usize].clone(),
            None => i.to_string(),
        }
    }

    fn finish(mut self) -> Graph {
        for row in self.out_adj.iter_mut() {
            row.sort_unstable_by_key(|&(j, _)| j);
        }
        for row in self.in_adj.iter_mut() {
            row.sort_unstable_by_key(|&(i, _)| i);
        }
        let m = self.out_adj.iter().map(Vec::len).sum();
        Graph {
            n: self.n,
            m,
            out_adj: self.out_adj,
            in_adj: self.in_adj,
            labels: self.labels,
        }
    }
}

/// Reads a whitespace-separated edge list: `src dst [weight]`, `#` comments.
///
/// Node labels are arbitrary strings mapped to dense indices in order of first
/// appearance; the label map is retained on the returned graph. Lines without
/// a weight use `default_weight`. With `bidirectional`, each line also adds
/// the reverse edge.
pub fn load_edge_list<R: BufRead>(
    source: R,
    default_weight: f64,
    bidirectional: bool,
) -> Result<Graph, GraphError> {
    if !(default_weight > 0.0) {
        return Err(GraphError::InvalidConfig(format!(
            "default weight must be positive, got {default_weight}"
        )));
    }
    let mut index: HashMap<String, u32> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut edges: Vec<(u32, u32, f64, usize)> = Vec::new();
    for (lineno, line) in source.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line?;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut parts = body.split_whitespace();
        let src = parts.next().unwrap();
        let dst = parts.next().ok_or_else(|| GraphError::MalformedLine {
            line: lineno,
            msg: "expected `src dst [weight]`".into(),
        })?;
        let weight = match parts.next() {
            Some(tok) => tok.parse::<f64>().map_err(|e| GraphError::MalformedLine {
                line: lineno,
                msg: format!("bad weight `{tok}`: {e}"),
            })?,
            None => default_weight,
        };
        if parts.next().is_some() {
            return Err(GraphError::MalformedLine {
                line: lineno,
                msg: "trailing fields after weight".into(),
            });
        }
        let mut id = |name: &str| -> u32 {
            *index.entry(name.to_string()).or_insert_with(|| {
                labels.push(name.to_string());
                (labels.len() - 1) as u32
            })
        };
        let (i, j) = (id(src), id(dst));
        edges.push((i, j, weight, lineno));
        if bidirectional {
            edges.push((j, i, weight, lineno));
        }
    }
    let mut b = GraphBuilder::new(labels.len());
    b.labels = Some(labels);
    for (i, j, w, line) in edges {
        b.add_edge(i, j, w, line)?;
    }
    Ok(b.finish())
}

/// Writes the graph back out as `src dst weight` lines.
pub fn write_edge_list<W: std::io::Write>(g: &Graph, mut out: W) -> std::io::Result<()> {
    for i in 0..g.n() {
        for &(j, w) in g.out_edges(i) {
            writeln!(out, "{} {} {}", g.label(i), g.label(j as usize), w)?;
        }
    }
    Ok(())
}

/// Two-block planted stochastic block model.
///
/// Nodes `0..n1` form community 1, `n1..n1+n2` community 2. Every unordered
/// pair receives a bidirectional edge independently with the probability of
/// its block pair; all edges share the same weight.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct SbmConfig {
    pub n1: usize,
    pub n2: usize,
    pub p_in_1: f64,
    pub p_in_2: f64,
    pub p_12: f64,
    pub weight: f64,
    pub seed: u64,
}

impl SbmConfig {
    /// Symmetric `SBM(p_in, p_out)` with two equally sized communities.
    pub fn symmetric(n_b: usize, p_in: f64, p_out: f64, weight: f64, seed: u64) -> Self {
        SbmConfig {
            n1: n_b,
            n2: n_b,
            p_in_1: p_in,
            p_in_2: p_in,
            p_12: p_out,
            weight,
            seed,
        }
    }

    fn validate(&self) -> Result<(), GraphError> {
        for (name, p) in [
            ("p_in_1", self.p_in_1),
            ("p_in_2", self.p_in_2),
            ("p_12", self.p_12),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(GraphError::InvalidConfig(format!(
                    "{name}={p} outside [0,1]"
                )));
            }
        }
        if !(self.weight > 0.0) {
            return Err(GraphError::InvalidConfig(format!(
                "weight must be positive, got {}",
                self.weight
            )));
        }
        if self.n1 == 0 || self.n2 == 0 {
            return Err(GraphError::InvalidConfig(
                "community sizes must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

pub fn generate_sbm(cfg: &SbmConfig) -> Result<Graph, GraphError> {
    cfg.validate()?;
    let n = cfg.n1 + cfg.n2;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut b = GraphBuilder::new(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let p = match (i < cfg.n1, j < cfg.n1) {
                (true, true) => cfg.p_in_1,
                (false, false) => cfg.p_in_2,
                _ => cfg.p_12,
            };
            if rng.gen::<f64>() < p {
                b.add_edge(i as u32, j as u32, cfg.weight, 0)?;
                b.add_edge(j as u32, i as u32, cfg.weight, 0)?;
            }
        }
    }
    Ok(b.finish())
}

/// Erdős–Rényi graph with bidirectional edges: a single-block SBM.
pub fn generate_er(n: usize, p: f64, weight: f64, seed: u64) -> Result<Graph, GraphError> {
    if n == 0 {
        return Err(GraphError::InvalidConfig("n must be >= 1".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(GraphError::InvalidConfig(format!("p={p} outside [0,1]")));
    }
    if !(weight > 0.0) {
        return Err(GraphError::InvalidConfig(format!(
            "weight must be positive, got {weight}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = GraphBuilder::new(n);
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.gen::<f64>() < p {
                b.add_edge(i as u32, j as u32, weight, 0)?;
                b.add_edge(j as u32, i as u32, weight, 0)?;
            }
        }
    }
    Ok(b.finish())
}

/// Ring lattice: node `i` connects bidirectionally to `i±1..i±d/2 (mod n)`.
pub fn generate_lattice(n: usize, d: usize, weight: f64) -> Result<Graph, GraphError> {
    if !d.is_multiple_of(2) {
        return Err(GraphError::OddDegree { degree: d });
    }
    if d >= n {
        return Err(GraphError::DegreeTooLarge { degree: d, size: n });
    }
    if !(weight > 0.0) {
        return Err(GraphError::InvalidConfig(format!(
            "weight must be positive, got {weight}"
        )));
    }
    let mut b = GraphBuilder::new(n);
    for i in 0..n {
        for off in 1..=(d / 2) {
            let j = (i + off) % n;
            b.add_edge(i as u32, j as u32, weight, 0)?;
            b.add_edge(j as u32, i as u32, weight, 0)?;
        }
    }
    Ok(b.finish())
}

/// Disjoint union of `g1` and `g2` (indices of `g2` offset by `g1.n()`) plus
/// independent Bernoulli(`p_o`) bidirectional bridges on every cross pair.
pub fn compose_networks(
    g1: &Graph,
    g2: &Graph,
    p_o: f64,
    weight: f64,
    seed: u64,
) -> Result<Graph, GraphError> {
    if g1.n() == 0 || g2.n() == 0 {
        return Err(GraphError::InvalidConfig(
            "both parts must be nonempty".into(),
        ));
    }
    if !(0.0..=1.0).contains(&p_o) {
        return Err(GraphError::InvalidConfig(format!(
            "p_o={p_o} outside [0,1]"
        )));
    }
    if !(weight > 0.0) {
        return Err(GraphError::InvalidConfig(format!(
            "weight must be positive, got {weight}"
        )));
    }
    let n1 = g1.n();
    let mut b = GraphBuilder::new(n1 + g2.n());
    for i in 0..n1 {
        for &(j, w) in g1.out_edges(i) {
            b.add_edge(i as u32, j, w, 0)?;
        }
    }
    for i in 0..g2.n() {
        for &(j, w) in g2.out_edges(i) {
            b.add_edge((n1 + i) as u32, n1 as u32 + j, w, 0)?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..n1 {
        for j in 0..g2.n() {
            if rng.gen::<f64>() < p_o {
                b.add_edge(i as u32, (n1 + j) as u32, weight, 0)?;
                b.add_edge((n1 + j) as u32, i as u32, weight, 0)?;
            }
        }
    }
    Ok(b.finish())
}

/// Regular lattice joined to an ER graph of the same size by sparse bridges.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct CompositeConfig {
    pub lattice_size: usize,
    pub lattice_degree: usize,
    pub er_prob: f64,
    pub bridge_prob: f64,
    pub weight: f64,
    pub seed: u64,
}

impl CompositeConfig {
    /// Lattice nodes come first (`0..lattice_size`), then the ER part.
    pub fn build(&self) -> Result<Graph, GraphError> {
        let lattice = generate_lattice(self.lattice_size, self.lattice_degree, self.weight)?;
        let er = generate_er(self.lattice_size, self.er_prob, self.weight, self.seed)?;
        // distinct stream for the bridge draws
        compose_networks(
            &lattice,
            &er,
            self.bridge_prob,
            self.weight,
            self.seed ^ 0x9e37_79b9_7f4a_7c15,
        )
    }
}

#![allow(dead_code, clippy::needless_range_loop)] // dense oracles index deliberately; each test compiles its own copy

//! Shared test support: a dense full-matrix reference simulator, independent
//! of the sparse-frontier implementation it checks, plus random-instance
//! builders used across the integration suites.

use gip::propagation::{BoundSchedule, StateVector, UpperBound};
use gip::Graph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Dense weight matrix of a graph, `w[i][j] = W_ij`.
pub fn dense_weights(g: &Graph) -> Vec<Vec<f64>> {
    let n = g.n();
    let mut w = vec![vec![0.0; n]; n];
    for i in 0..n {
        for &(j, wt) in g.out_edges(i) {
            w[i][j as usize] = wt;
        }
    }
    w
}

/// One dense step of the bounded-linear dynamics: every node recomputes
/// `f_{j,t}(sum_i W_ij x_i)` from the full previous state vector.
pub fn dense_step(w: &[Vec<f64>], schedule: &BoundSchedule, x: &[f64], t: u32) -> Vec<f64> {
    let n = x.len();
    let mut next = vec![0.0; n];
    for (j, slot) in next.iter_mut().enumerate() {
        let mut y = 0.0;
        for i in 0..n {
            y += w[i][j] * x[i];
        }
        let (l, h) = schedule.bounds(j, t);
        *slot = if y < l {
            0.0
        } else {
            match h {
                UpperBound::Finite(hv) if y >= hv => hv,
                _ => y,
            }
        };
    }
    next
}

pub struct DenseRun {
    pub trajectory: Vec<Vec<f64>>,
    pub total: f64,
    pub steps: u32,
    pub converged: bool,
}

/// Full-vector reference of the influence evaluation loop: same stopping rule,
/// no frontier tracking, quadratic per step.
pub fn dense_evaluate(
    g: &Graph,
    schedule: &BoundSchedule,
    gamma: f64,
    eps: f64,
    t_max: u32,
    x0: &[f64],
) -> DenseRun {
    let w = dense_weights(g);
    let mut x = x0.to_vec();
    let mut trajectory = vec![x.clone()];
    let mut total = 0.0;
    let mut discount = 1.0;
    let mut t = 0u32;
    let converged = loop {
        let peak = x.iter().fold(0.0f64, |a, &v| a.max(v)) * discount;
        if peak < eps {
            break true;
        }
        if t == t_max {
            break false;
        }
        t += 1;
        discount *= 1.0 - gamma;
        x = dense_step(&w, schedule, &x, t);
        total += discount * x.iter().sum::<f64>();
        trajectory.push(x.clone());
    };
    DenseRun {
        trajectory,
        total,
        steps: t,
        converged,
    }
}

/// Dense linear trajectory `x(t)^T = x(0)^T W^t`.
pub fn dense_linear_trajectory(g: &Graph, x0: &[f64], horizon: u32) -> Vec<Vec<f64>> {
    let w = dense_weights(g);
    let n = x0.len();
    let mut states = vec![x0.to_vec()];
    for _ in 0..horizon {
        let prev = states.last().unwrap();
        let mut next = vec![0.0; n];
        for (j, slot) in next.iter_mut().enumerate() {
            let mut y = 0.0;
            for i in 0..n {
                y += w[i][j] * prev[i];
            }
            *slot = y;
        }
        states.push(next);
    }
    states
}

/// Random connected-ish test graph with uniform weight.
pub fn random_graph(rng: &mut ChaCha8Rng, max_n: usize, weight: f64) -> Graph {
    let n = rng.gen_range(4..=max_n);
    let p = rng.gen_range(0.15..0.6);
    let mut edges = Vec::new();
    for i in 0..n as u32 {
        for j in (i + 1)..n as u32 {
            if rng.gen::<f64>() < p {
                edges.push((i, j, weight));
                edges.push((j, i, weight));
            }
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

/// Random graph with heterogeneous positive weights.
pub fn random_weighted_graph(rng: &mut ChaCha8Rng, max_n: usize) -> Graph {
    let n = rng.gen_range(4..=max_n);
    let p = rng.gen_range(0.15..0.6);
    let mut edges = Vec::new();
    for i in 0..n as u32 {
        for j in 0..n as u32 {
            if i != j && rng.gen::<f64>() < p {
                edges.push((i, j, rng.gen_range(0.02..0.2)));
            }
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

/// Random valid initial state: each node independently seeded in `[l0, h0]`.
pub fn random_state(
    rng: &mut ChaCha8Rng,
    n: usize,
    p_active: f64,
    l0: f64,
    h0: f64,
) -> StateVector {
    let values: Vec<f64> = (0..n)
        .map(|_| {
            if rng.gen::<f64>() < p_active {
                rng.gen_range(l0..=h0)
            } else {
                0.0
            }
        })
        .collect();
    StateVector::new(values)
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Path of a bundled data fixture.
pub fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
}

/// Karate club with node indices equal to the numeric labels in the fixture
/// (the loader itself assigns indices by first appearance).
pub fn load_karate() -> Graph {
    let file = std::fs::File::open(fixture("karate_club.txt")).unwrap();
    let raw = gip::load_edge_list(std::io::BufReader::new(file), 0.1, true).unwrap();
    let labels = raw.labels().unwrap();
    let relabel: Vec<u32> = labels.iter().map(|l| l.parse().unwrap()).collect();
    let mut edges = Vec::new();
    for i in 0..raw.n() {
        for &(j, w) in raw.out_edges(i) {
            edges.push((relabel[i], relabel[j as usize], w));
        }
    }
    Graph::from_edges(raw.n(), &edges).unwrap()
}

/// The club factions recorded with the karate network.
pub fn karate_factions() -> (Vec<u32>, Vec<u32>) {
    let text = std::fs::read_to_string(fixture("karate_factions.txt")).unwrap();
    let mut lines = text.lines();
    let parse = |line: &str| -> Vec<u32> {
        line.split_whitespace()
            .map(|t| t.parse().unwrap())
            .collect()
    };
    (parse(lines.next().unwrap()), parse(lines.next().unwrap()))
}

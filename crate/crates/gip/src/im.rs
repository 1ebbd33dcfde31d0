//! Budget-constrained influence maximization over the bounded-linear
//! dynamics: the binary-reduced objective, the exact solution of the linear
//! regime, a customized direct search with swap polling and optional
//! community restarts, brute-force ranking, and the baseline selectors.

use std::collections::HashMap;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::centrality::{
    degree_centrality, katz_centrality, selection_scores, top_k, CentralityError,
};
use crate::graph::{Graph, GraphError};
use crate::propagation::{
    evaluate_influence, BoundSchedule, NodeValues, PropagationConfig, StateVector, UpperBound,
};

#[derive(Debug, Error)]
pub enum ImError {
    #[error("infeasible seed vector: {got} seeds, budget is {k}")]
    InfeasibleSeed { got: usize, k: usize },
    #[error("objective evaluation did not converge within {t_max} steps")]
    NonConvergent { t_max: u32 },
    #[error("C({n},{k}) = {count} subsets exceeds the brute-force cap {cap}")]
    CombinatorialBlowup {
        n: usize,
        k: usize,
        count: u128,
        cap: u128,
    },
    #[error("seed set is not a size-k subset of the ranking")]
    UnknownSeedSet,
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error(transparent)]
    Centrality(#[from] CentralityError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

pub const BRUTE_FORCE_CAP: u128 = 10_000_000;

/// Budget-constrained maximization instance: pick at most `k` nodes, give
/// each its maximum admissible initial value `h0_j`, maximize the overall
/// influence.
#[derive(Debug, Clone)]
pub struct ImProblem {
    pub graph: Graph,
    pub schedule: BoundSchedule,
    pub gamma: f64,
    pub eps: f64,
    pub t_max: u32,
    pub k: usize,
    pub l0: NodeValues,
    pub h0: NodeValues,
}

impl ImProblem {
    pub fn new(
        graph: Graph,
        schedule: BoundSchedule,
        gamma: f64,
        eps: f64,
        k: usize,
        l0: NodeValues,
        h0: NodeValues,
    ) -> Result<Self, ImError> {
        let n = graph.n();
        if k < 1 || k > n {
            return Err(ImError::InvalidProblem(format!("k = {k} outside [1, {n}]")));
        }
        if !(0.0..1.0).contains(&gamma) {
            return Err(ImError::InvalidProblem(format!(
                "gamma = {gamma} outside [0, 1)"
            )));
        }
        if !(eps > 0.0) {
            return Err(ImError::InvalidProblem(format!(
                "eps = {eps} must be positive"
            )));
        }
        for j in 0..n {
            let (lj, hj) = (l0.get(j), h0.get(j));
            if !(lj > 0.0 && hj >= lj) {
                return Err(ImError::InvalidProblem(format!(
                    "need 0 < l0 <= h0 at node {j}, got ({lj}, {hj})"
                )));
            }
            if let Some((sl, sh)) = schedule.initial_bounds(j) {
                let upper_matches = match sh {
                    UpperBound::Finite(sh) => sh == hj,
                    UpperBound::Unbounded => false,
                };
                if sl != lj || !upper_matches {
                    return Err(ImError::InvalidProblem(format!(
                        "schedule initial bounds at node {j} disagree with (l0, h0)"
                    )));
                }
            }
        }
        Ok(ImProblem {
            graph,
            schedule,
            gamma,
            eps,
            t_max: 10_000,
            k,
            l0,
            h0,
        })
    }

    /// Instance with uniform threshold-type bounds; the schedule's mean
    /// weight is taken from the graph.
    #[allow(clippy::too_many_arguments)]
    pub fn threshold_uniform(
        graph: Graph,
        theta_l: f64,
        theta_h: f64,
        gamma: f64,
        eps: f64,
        k: usize,
        l0: f64,
        h0: f64,
    ) -> Result<Self, ImError> {
        let alpha = graph.mean_weight()?;
        let schedule = BoundSchedule::threshold_uniform(theta_l, theta_h, alpha, l0, h0);
        ImProblem::new(graph, schedule, gamma, eps, k, l0.into(), h0.into())
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    fn eval_config(&self) -> PropagationConfig {
        PropagationConfig {
            gamma: self.gamma,
            eps: self.eps,
            t_max: self.t_max,
            record_trajectory: false,
        }
    }

    /// Raw objective for a sorted seed set of exactly `k` nodes.
    pub fn objective_of_set(&self, seed_set: &[u32]) -> Result<f64, ImError> {
        if seed_set.len() != self.k {
            return Err(ImError::InfeasibleSeed {
                got: seed_set.len(),
                k: self.k,
            });
        }
        let x0 = StateVector::from_seeds(self.n(), seed_set, &self.h0);
        let res = evaluate_influence(&self.graph, &self.schedule, &self.eval_config(), &x0);
        if !res.converged {
            return Err(ImError::NonConvergent { t_max: self.t_max });
        }
        Ok(res.total)
    }

    /// Objective of a feasible binary vector, `s(h0 ⊙ z)`.
    pub fn objective(&self, z: &SeedVector) -> Result<f64, ImError> {
        self.objective_of_set(&z.support())
    }

    /// Extreme-barrier objective: infeasible vectors score negative infinity
    /// so they can never win a comparison.
    pub fn objective_barrier(&self, z: &SeedVector) -> Result<f64, ImError> {
        if z.count() != self.k {
            return Ok(f64::NEG_INFINITY);
        }
        self.objective(z)
    }
}

/// Binary activation-indicator vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedVector {
    z: Vec<bool>,
}

impl SeedVector {
    pub fn from_support(n: usize, seeds: &[u32]) -> Self {
        let mut z = vec![false; n];
        for &j in seeds {
            z[j as usize] = true;
        }
        SeedVector { z }
    }

    pub fn support(&self) -> Vec<u32> {
        self.z
            .iter()
            .enumerate()
            .filter(|&(_, &b)| b)
            .map(|(j, _)| j as u32)
            .collect()
    }

    pub fn count(&self) -> usize {
        self.z.iter().filter(|&&b| b).count()
    }

    pub fn as_bits(&self) -> &[bool] {
        &self.z
    }
}

#[derive(Debug, Clone)]
pub struct SolverOutcome {
    pub z: SeedVector,
    pub seed_set: Vec<u32>,
    pub objective: f64,
    pub n_evals: u64,
    pub iterations: u64,
    pub elapsed_seconds: f64,
}

/// Complete size-`k` enumeration, sorted by descending objective with
/// lexicographic set order on ties.
#[derive(Debug, Clone)]
pub struct RankingTable {
    pub entries: Vec<(Vec<u32>, f64)>,
}

impl RankingTable {
    pub fn best(&self) -> (&[u32], f64) {
        let (set, v) = &self.entries[0];
        (set, *v)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Memoizing objective evaluator; `n_evals` counts only cache misses.
pub struct Evaluator<'p> {
    problem: &'p ImProblem,
    memo: HashMap<Vec<u32>, f64>,
    n_evals: u64,
}

impl<'p> Evaluator<'p> {
    pub fn new(problem: &'p ImProblem) -> Self {
        Evaluator {
            problem,
            memo: HashMap::new(),
            n_evals: 0,
        }
    }

    pub fn value(&mut self, seed_set: &[u32]) -> Result<f64, ImError> {
        debug_assert!(
            seed_set.windows(2).all(|w| w[0] < w[1]),
            "set must be sorted"
        );
        if let Some(&v) = self.memo.get(seed_set) {
            return Ok(v);
        }
        let v = self.problem.objective_of_set(seed_set)?;
        self.memo.insert(seed_set.to_vec(), v);
        self.n_evals += 1;
        Ok(v)
    }

    pub fn contains(&self, seed_set: &[u32]) -> bool {
        self.memo.contains_key(seed_set)
    }

    pub fn n_evals(&self) -> u64 {
        self.n_evals
    }
}

/// Two distinguishable node blocks, used by the community-restart strategy.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct TwoBlockPartition {
    pub block1: Vec<u32>,
    pub block2: Vec<u32>,
}

impl TwoBlockPartition {
    /// Contiguous split: nodes `0..n1` against the rest.
    pub fn from_split(n: usize, n1: usize) -> Self {
        TwoBlockPartition {
            block1: (0..n1 as u32).collect(),
            block2: (n1 as u32..n as u32).collect(),
        }
    }

    pub fn validate(&self, n: usize) -> Result<(), ImError> {
        let mut seen = vec![false; n];
        for &j in self.block1.iter().chain(self.block2.iter()) {
            if j as usize >= n || seen[j as usize] {
                return Err(ImError::InvalidProblem(
                    "partition must be a disjoint cover of the node set".into(),
                ));
            }
            seen[j as usize] = true;
        }
        if !seen.iter().all(|&s| s) {
            return Err(ImError::InvalidProblem(
                "partition must cover every node".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, serde::Serialize, serde::Deserialize)]
pub enum Restart {
    #[default]
    None,
    Community(TwoBlockPartition),
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct CdsParams {
    /// Sufficient-improvement factor: a poll stops early at the first
    /// candidate with `s > (1 + zeta) * s_current`.
    pub zeta: f64,
    /// Decay applied to `zeta` after a poll that improved only weakly.
    pub delta: f64,
    /// Neighborhood radius (even, >= 2); 2 means single swaps.
    pub d: usize,
    /// The optional search step; community restart is its only realization.
    pub search_enabled: bool,
    pub restart: Restart,
}

impl Default for CdsParams {
    fn default() -> Self {
        CdsParams {
            zeta: 0.1,
            delta: 0.5,
            d: 2,
            search_enabled: false,
            restart: Restart::None,
        }
    }
}

impl CdsParams {
    fn validate(&self, n: usize) -> Result<(), ImError> {
        if !(self.zeta > 0.0 && self.zeta < 1.0 && self.delta > 0.0 && self.delta < 1.0) {
            return Err(ImError::InvalidProblem(
                "need 0 < zeta < 1 and 0 < delta < 1".into(),
            ));
        }
        if self.d < 2 || !self.d.is_multiple_of(2) {
            return Err(ImError::InvalidProblem("d must be even and >= 2".into()));
        }
        if let Restart::Community(p) = &self.restart {
            p.validate(n)?;
        }
        Ok(())
    }
}

/// Katz vector at factor `1 - gamma`, falling back to the damped factor
/// `0.9 / rho(W)` when the series diverges on this network.
fn katz_or_damped(g: &Graph, gamma: f64) -> Result<crate::centrality::CentralityVector, ImError> {
    match katz_centrality(g, 1.0 - gamma, 1e-12, 200_000) {
        Ok(c) => Ok(c),
        Err(CentralityError::DivergentSeries { .. }) => {
            let rho = g.spectral_radius(1e-9, 100_000)?;
            let factor = (0.9 / rho).min(1.0);
            Ok(katz_centrality(g, factor, 1e-12, 200_000)?)
        }
        Err(e) => Err(e.into()),
    }
}

/// Selection scores used for the warm start and for poll ordering.
pub fn warm_scores(p: &ImProblem) -> Result<Vec<f64>, ImError> {
    let h0 = p.h0.to_vec(p.n());
    Ok(selection_scores(&katz_or_damped(&p.graph, p.gamma)?, &h0))
}

/// Exact solution of the linear regime: activate the `k` nodes with the
/// highest `h0_j * c_j` at their maximum initial values.
///
/// Only globally optimal when the schedule really is in that regime
/// (`EicLimit`, or a certificate from `validate_eic_limit`) and
/// `(1 - gamma) rho(W) < 1`.
pub fn exact_linear_solution(p: &ImProblem) -> Result<SolverOutcome, ImError> {
    let started = Instant::now();
    let c = katz_centrality(&p.graph, 1.0 - p.gamma, 1e-12, 200_000).map_err(|e| match e {
        CentralityError::DivergentSeries { product } => {
            ImError::Centrality(CentralityError::DivergentSeries { product })
        }
        other => other.into(),
    })?;
    let h0 = p.h0.to_vec(p.n());
    let seed_set = top_k(&c, &h0, p.k)?;
    let objective: f64 = seed_set
        .iter()
        .map(|&j| c.values[j as usize] * h0[j as usize])
        .sum();
    Ok(SolverOutcome {
        z: SeedVector::from_support(p.n(), &seed_set),
        seed_set,
        objective,
        n_evals: 0,
        iterations: 0,
        elapsed_seconds: started.elapsed().as_secs_f64(),
    })
}

/// Feasible candidates within l1-distance `d` of `z`, in poll order:
/// swaps sorted by descending score of the incoming node(s), ties by
/// ascending incoming index, then ascending outgoing index. For `d >= 4`,
/// deeper swaps follow all shallower ones.
pub fn neighborhood(z: &SeedVector, d: usize, scores: &[f64]) -> Vec<Vec<u32>> {
    assert!(d >= 2 && d.is_multiple_of(2), "d must be even and >= 2");
    let inside = z.support();
    let n = z.as_bits().len();
    let outside: Vec<u32> = (0..n as u32)
        .filter(|&j| !z.as_bits()[j as usize])
        .collect();
    let mut result = Vec::new();
    for q in 1..=(d / 2) {
        if q > inside.len() || q > outside.len() {
            break;
        }
        let mut incoming = combinations(&outside, q);
        incoming.sort_by(|a, b| {
            let sa: f64 = a.iter().map(|&j| scores[j as usize]).sum();
            let sb: f64 = b.iter().map(|&j| scores[j as usize]).sum();
            sb.total_cmp(&sa).then_with(|| a.cmp(b))
        });
        let outgoing = combinations(&inside, q);
        for inc in &incoming {
            for out in &outgoing {
                let mut cand: Vec<u32> = inside
                    .iter()
                    .copied()
                    .filter(|j| !out.contains(j))
                    .chain(inc.iter().copied())
                    .collect();
                cand.sort_unstable();
                result.push(cand);
            }
        }
    }
    result
}

fn combinations(items: &[u32], q: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..q).collect();
    if q == 0 || q > items.len() {
        return out;
    }
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        // advance the lexicographic index combination
        let mut pos = q;
        while pos > 0 {
            pos -= 1;
            if idx[pos] != pos + items.len() - q {
                idx[pos] += 1;
                for later in (pos + 1)..q {
                    idx[later] = idx[later - 1] + 1;
                }
                break;
            }
            if pos == 0 {
                return out;
            }
        }
    }
}

/// Customized direct search: warm start at the linear-regime exact solution,
/// then repeated polls of the swap neighborhood. A poll moves immediately to
/// the first candidate clearing the `(1 + zeta)` bar; otherwise it moves to
/// the best strictly improving candidate while decaying `zeta`; otherwise the
/// current point is a local maximizer and the loop stops. With the community
/// restart, the poll loop reruns from every unexplored split of the budget
/// across the two blocks (top scores within each block), and the best local
/// maximizer wins.
pub fn cds_solve(p: &ImProblem, params: &CdsParams) -> Result<SolverOutcome, ImError> {
    params.validate(p.n())?;
    let started = Instant::now();
    let scores = warm_scores(p)?;
    let mut order: Vec<u32> = (0..p.n() as u32).collect();
    order.sort_by(|&a, &b| {
        scores[b as usize]
            .total_cmp(&scores[a as usize])
            .then(a.cmp(&b))
    });
    let mut warm: Vec<u32> = order.iter().copied().take(p.k).collect();
    warm.sort_unstable();

    let mut evaluator = Evaluator::new(p);
    let mut iterations = 0u64;
    let mut best = poll_loop(p, params, &scores, warm, &mut evaluator, &mut iterations)?;

    if let Restart::Community(partition) = &params.restart {
        for point in community_restart_points(partition, &scores, p.k) {
            if evaluator.contains(&point) {
                continue;
            }
            let local = poll_loop(p, params, &scores, point, &mut evaluator, &mut iterations)?;
            if local.1 > best.1 {
                best = local;
            }
        }
    }

    let (seed_set, objective) = best;
    Ok(SolverOutcome {
        z: SeedVector::from_support(p.n(), &seed_set),
        seed_set,
        objective,
        n_evals: evaluator.n_evals(),
        iterations,
        elapsed_seconds: started.elapsed().as_secs_f64(),
    })
}

/// Restart points: every split `(k1, k2)` of the budget, taking the `k1`
/// best-scoring nodes of block 1 and the `k2` best of block 2.
fn community_restart_points(
    partition: &TwoBlockPartition,
    scores: &[f64],
    k: usize,
) -> Vec<Vec<u32>> {
    let rank = |block: &[u32]| {
        let mut b = block.to_vec();
        b.sort_by(|&a, &bb| {
            scores[bb as usize]
                .total_cmp(&scores[a as usize])
                .then(a.cmp(&bb))
        });
        b
    };
    let b1 = rank(&partition.block1);
    let b2 = rank(&partition.block2);
    let mut points = Vec::new();
    for k1 in 0..=k {
        let k2 = k - k1;
        if k1 > b1.len() || k2 > b2.len() {
            continue;
        }
        let mut point: Vec<u32> = b1[..k1].iter().chain(b2[..k2].iter()).copied().collect();
        point.sort_unstable();
        points.push(point);
    }
    points
}

fn poll_loop(
    p: &ImProblem,
    params: &CdsParams,
    scores: &[f64],
    start: Vec<u32>,
    evaluator: &mut Evaluator,
    iterations: &mut u64,
) -> Result<(Vec<u32>, f64), ImError> {
    let mut current = start;
    let mut current_val = evaluator.value(&current)?;
    let mut zeta = params.zeta;
    loop {
        *iterations += 1;
        let z = SeedVector::from_support(p.n(), &current);
        let mut sufficient: Option<(Vec<u32>, f64)> = None;
        let mut best_strict: Option<(Vec<u32>, f64)> = None;
        for cand in neighborhood(&z, params.d, scores) {
            let v = evaluator.value(&cand)?;
            if v > (1.0 + zeta) * current_val {
                sufficient = Some((cand, v));
                break;
            }
            if v > current_val && best_strict.as_ref().is_none_or(|(_, bv)| v > *bv) {
                best_strict = Some((cand, v));
            }
        }
        if let Some((cand, v)) = sufficient {
            current = cand;
            current_val = v;
        } else if let Some((cand, v)) = best_strict {
            current = cand;
            current_val = v;
            zeta *= params.delta;
        } else {
            return Ok((current, current_val));
        }
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

pub fn brute_force(p: &ImProblem) -> Result<RankingTable, ImError> {
    brute_force_capped(p, BRUTE_FORCE_CAP)
}

/// Evaluates every size-`k` subset (lexicographic enumeration, parallel
/// evaluation, deterministic ordering) and returns the full ranking.
pub fn brute_force_capped(p: &ImProblem, cap: u128) -> Result<RankingTable, ImError> {
    let (n, k) = (p.n(), p.k);
    let count = binomial(n, k);
    if count > cap {
        return Err(ImError::CombinatorialBlowup { n, k, count, cap });
    }
    let node_ids: Vec<u32> = (0..n as u32).collect();
    let sets = combinations(&node_ids, k);
    let mut entries: Vec<(Vec<u32>, f64)> = sets
        .into_par_iter()
        .map(|set| {
            let v = p.objective_of_set(&set)?;
            Ok((set, v))
        })
        .collect::<Result<Vec<_>, ImError>>()?;
    entries.sort_by(|(sa, va), (sb, vb)| vb.total_cmp(va).then_with(|| sa.cmp(sb)));
    Ok(RankingTable { entries })
}

/// Best of `n_s` uniformly drawn size-`k` seed sets.
pub fn random_sampling(p: &ImProblem, n_s: usize, seed: u64) -> Result<SolverOutcome, ImError> {
    assert!(n_s >= 1, "need at least one sample");
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut evaluator = Evaluator::new(p);
    let mut best: Option<(Vec<u32>, f64)> = None;
    for _ in 0..n_s {
        let mut set: Vec<u32> = rand::seq::index::sample(&mut rng, p.n(), p.k)
            .into_iter()
            .map(|i| i as u32)
            .collect();
        set.sort_unstable();
        let v = evaluator.value(&set)?;
        if best.as_ref().is_none_or(|(_, bv)| v > *bv) {
            best = Some((set, v));
        }
    }
    let (seed_set, objective) = best.unwrap();
    Ok(SolverOutcome {
        z: SeedVector::from_support(p.n(), &seed_set),
        seed_set,
        objective,
        n_evals: evaluator.n_evals(),
        iterations: n_s as u64,
        elapsed_seconds: started.elapsed().as_secs_f64(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CentralityMethod {
    Degree,
    Katz,
}

/// Seed the `k` nodes of the highest centrality and evaluate once. The Katz
/// variant uses factor `1 - gamma`, damped to stay convergent on networks
/// whose spectral radius makes that series diverge.
pub fn centrality_method(p: &ImProblem, kind: CentralityMethod) -> Result<SolverOutcome, ImError> {
    let started = Instant::now();
    let c = match kind {
        CentralityMethod::Degree => degree_centrality(&p.graph),
        CentralityMethod::Katz => katz_or_damped(&p.graph, p.gamma)?,
    };
    let ones = vec![1.0; p.n()];
    let seed_set = top_k(&c, &ones, p.k)?;
    let objective = p.objective_of_set(&seed_set)?;
    Ok(SolverOutcome {
        z: SeedVector::from_support(p.n(), &seed_set),
        seed_set,
        objective,
        n_evals: 1,
        iterations: 1,
        elapsed_seconds: started.elapsed().as_secs_f64(),
    })
}

/// Accuracy `tau = s / s*`; a degenerate zero optimum reports 1 so that
/// parameter sweeps stay total.
pub fn accuracy(s: f64, ranking: &RankingTable) -> f64 {
    let (_, best) = ranking.best();
    if best == 0.0 {
        1.0
    } else {
        s / best
    }
}

/// Rank `phi = (#{A : s(A) > s(A0)} + 1) / C(n,k)`; ties share the best rank.
pub fn rank_metric(seed_set: &[u32], ranking: &RankingTable) -> Result<f64, ImError> {
    let mut sorted = seed_set.to_vec();
    sorted.sort_unstable();
    let s0 = ranking
        .entries
        .iter()
        .find(|(set, _)| *set == sorted)
        .map(|&(_, v)| v)
        .ok_or(ImError::UnknownSeedSet)?;
    let greater = ranking.entries.partition_point(|&(_, v)| v > s0);
    Ok((greater + 1) as f64 / ranking.entries.len() as f64)
}

//! Bounded-linear propagation dynamics and the limiting-case models.
//!
//! At every step each node aggregates its in-neighbors' states linearly,
//! `y_j(t) = sum_i W_ij x_i(t-1)`, then clips the result through a
//! time-dependent bound function: below the lower bound the node stays at 0,
//! between the bounds it takes `y` itself, at or above the upper bound it
//! saturates there. The lower bound acts as a critical mass for activation,
//! the upper bound as a saturation ceiling. Pure linear dynamics and
//! all-or-threshold dynamics are the two ends of this family.

use std::sync::Arc;

use thiserror::Error;

use crate::centrality::{katz_centrality, CentralityError};
use crate::graph::Graph;

#[derive(Debug, Error)]
pub enum PropagationError {
    #[error("series diverges: (1 - gamma) * spectral radius = {product} >= 1")]
    DivergentSeries { product: f64 },
    #[error("did not converge within {max_iter} iterations")]
    NonConvergent { max_iter: usize },
    #[error("horizon {horizon} exceeds the iteration cap {t_max}")]
    HorizonExceeded { horizon: u32, t_max: u32 },
    #[error("invalid state: {0}")]
    InvalidState(String),
}

impl From<CentralityError> for PropagationError {
    fn from(e: CentralityError) -> Self {
        match e {
            CentralityError::DivergentSeries { product } => {
                PropagationError::DivergentSeries { product }
            }
            CentralityError::NonConvergent { max_iter } => {
                PropagationError::NonConvergent { max_iter }
            }
            other => PropagationError::InvalidState(other.to_string()),
        }
    }
}

/// Scalar-or-per-node parameter.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(untagged)]
pub enum NodeValues {
    Uniform(f64),
    PerNode(Vec<f64>),
}

impl NodeValues {
    #[inline]
    pub fn get(&self, j: usize) -> f64 {
        match self {
            NodeValues::Uniform(v) => *v,
            NodeValues::PerNode(v) => v[j],
        }
    }

    pub fn to_vec(&self, n: usize) -> Vec<f64> {
        match self {
            NodeValues::Uniform(v) => vec![*v; n],
            NodeValues::PerNode(v) => {
                assert_eq!(v.len(), n, "per-node parameter length mismatch");
                v.clone()
            }
        }
    }
}

impl From<f64> for NodeValues {
    fn from(v: f64) -> Self {
        NodeValues::Uniform(v)
    }
}

/// An upper bound that may be absent. Kept as an explicit marker so that no
/// infinity sentinel enters the state arithmetic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UpperBound {
    Finite(f64),
    Unbounded,
}

impl UpperBound {
    #[inline]
    pub fn caps(&self, y: f64) -> bool {
        match self {
            UpperBound::Finite(h) => y >= *h,
            UpperBound::Unbounded => false,
        }
    }
}

/// Threshold-type bound family: `l_{j,t} = (theta_l_j * alpha)^t * l0_j` and
/// `h_{j,t} = theta_h_j * theta_l_j^(t-1) * alpha^t * h0_j`, with the plain
/// `(l0_j, h0_j)` at `t = 0`. `alpha` is the mean edge weight of the network
/// the schedule is meant for.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct ThresholdBounds {
    pub theta_l: NodeValues,
    pub theta_h: NodeValues,
    pub alpha: f64,
    pub l0: NodeValues,
    pub h0: NodeValues,
}

impl ThresholdBounds {
    pub fn uniform(theta_l: f64, theta_h: f64, alpha: f64, l0: f64, h0: f64) -> Self {
        assert!(
            theta_l >= 0.0 && theta_h >= theta_l,
            "need 0 <= theta_l <= theta_h"
        );
        assert!(l0 > 0.0 && h0 >= l0, "need 0 < l0 <= h0");
        ThresholdBounds {
            theta_l: theta_l.into(),
            theta_h: theta_h.into(),
            alpha,
            l0: l0.into(),
            h0: h0.into(),
        }
    }

    #[inline]
    fn bounds(&self, j: usize, t: u32) -> (f64, UpperBound) {
        let tl = self.theta_l.get(j);
        let th = self.theta_h.get(j);
        if t == 0 {
            return (self.l0.get(j), UpperBound::Finite(self.h0.get(j)));
        }
        let l = (tl * self.alpha).powi(t as i32) * self.l0.get(j);
        let h = th * tl.powi(t as i32 - 1) * self.alpha.powi(t as i32) * self.h0.get(j);
        (l, UpperBound::Finite(h))
    }
}

/// Generator of the per-node, per-step bounds `(l_{j,t}, h_{j,t})`.
#[derive(Clone)]
pub enum BoundSchedule {
    /// `l = 0`, `h` unbounded for every `t >= 1`: pure linear dynamics.
    EicLimit,
    ThresholdType(ThresholdBounds),
    /// Arbitrary rule or table; called as `(node, t)` for `t >= 0`.
    Explicit(Arc<dyn Fn(usize, u32) -> (f64, UpperBound) + Send + Sync>),
}

impl std::fmt::Debug for BoundSchedule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BoundSchedule::EicLimit => write!(f, "EicLimit"),
            BoundSchedule::ThresholdType(tb) => f.debug_tuple("ThresholdType").field(tb).finish(),
            BoundSchedule::Explicit(_) => write!(f, "Explicit(..)"),
        }
    }
}

impl BoundSchedule {
    pub fn threshold_uniform(theta_l: f64, theta_h: f64, alpha: f64, l0: f64, h0: f64) -> Self {
        BoundSchedule::ThresholdType(ThresholdBounds::uniform(theta_l, theta_h, alpha, l0, h0))
    }

    /// Bounds at step `t >= 1`.
    #[inline]
    pub fn bounds(&self, j: usize, t: u32) -> (f64, UpperBound) {
        debug_assert!(t >= 1);
        match self {
            BoundSchedule::EicLimit => (0.0, UpperBound::Unbounded),
            BoundSchedule::ThresholdType(tb) => tb.bounds(j, t),
            BoundSchedule::Explicit(f) => f(j, t),
        }
    }

    /// Initial-value bounds `(l_{j,0}, h_{j,0})`; `None` when the schedule
    /// places no restriction on initial states.
    pub fn initial_bounds(&self, j: usize) -> Option<(f64, UpperBound)> {
        match self {
            BoundSchedule::EicLimit => None,
            BoundSchedule::ThresholdType(tb) => Some(tb.bounds(j, 0)),
            BoundSchedule::Explicit(f) => Some(f(j, 0)),
        }
    }
}

/// Bound function of node `j` at step `t` applied to the linear pre-image `y`.
pub fn bound_eval(schedule: &BoundSchedule, j: usize, t: u32, y: f64) -> f64 {
    let (l, h) = schedule.bounds(j, t);
    clip(y, l, h)
}

#[inline]
fn clip(y: f64, l: f64, h: UpperBound) -> f64 {
    if y < l {
        0.0
    } else if let UpperBound::Finite(hv) = h {
        if y >= hv {
            hv
        } else {
            y
        }
    } else {
        y
    }
}

/// Per-node influence levels at one time step.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    values: Vec<f64>,
}

impl StateVector {
    pub fn new(values: Vec<f64>) -> Self {
        assert!(
            values.iter().all(|&x| x >= 0.0),
            "state values must be nonnegative"
        );
        StateVector { values }
    }

    pub fn zeros(n: usize) -> Self {
        StateVector {
            values: vec![0.0; n],
        }
    }

    /// State with `x_j = value_j` on the seed set and 0 elsewhere.
    pub fn from_seeds(n: usize, seeds: &[u32], values: &NodeValues) -> Self {
        let mut x = vec![0.0; n];
        for &j in seeds {
            x[j as usize] = values.get(j as usize);
        }
        StateVector::new(x)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn support(&self) -> Vec<u32> {
        self.values
            .iter()
            .enumerate()
            .filter(|&(_, &x)| x > 0.0)
            .map(|(j, _)| j as u32)
            .collect()
    }
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct PropagationConfig {
    /// Time-discount factor in `[0, 1)`.
    pub gamma: f64,
    /// Convergence tolerance on `max_j (1-gamma)^t x_j(t)`.
    pub eps: f64,
    /// Hard iteration cap; hitting it yields a flagged partial result.
    pub t_max: u32,
    pub record_trajectory: bool,
}

impl Default for PropagationConfig {
    fn default() -> Self {
        PropagationConfig {
            gamma: 0.0,
            eps: 1e-6,
            t_max: 10_000,
            record_trajectory: false,
        }
    }
}

impl PropagationConfig {
    pub fn validate(&self) -> Result<(), PropagationError> {
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(PropagationError::InvalidState(format!(
                "gamma = {} outside [0, 1)",
                self.gamma
            )));
        }
        if !(self.eps > 0.0) {
            return Err(PropagationError::InvalidState(format!(
                "eps = {} must be positive",
                self.eps
            )));
        }
        if self.t_max < 1 {
            return Err(PropagationError::InvalidState("t_max must be >= 1".into()));
        }
        Ok(())
    }
}

/// Sparse states per step: `(t, [(node, x)])`.
pub type SparseTrajectory = Vec<(u32, Vec<(u32, f64)>)>;

#[derive(Debug, Clone)]
pub struct PropagationResult {
    /// Discounted overall influence `sum_j sum_{t=1}^{t_eps} (1-gamma)^t x_j(t)`.
    pub total: f64,
    /// Per-node share of `total`.
    pub per_node: Vec<f64>,
    /// Step at which the convergence criterion first held (or the cap).
    pub steps: u32,
    pub converged: bool,
    /// Sparse states per step when recording was on.
    pub trajectory: Option<SparseTrajectory>,
    /// Active set per step when recording was on.
    pub active_history: Option<Vec<Vec<u32>>>,
    /// Running series `s(t) = sum_j sum_{t'<=t} (1-gamma)^t' x_j(t')`,
    /// indexed by `t` starting at `s(0)`.
    pub s_of_t: Vec<f64>,
    /// Number of nodes with positive influence up to each step.
    pub n_a_of_t: Vec<usize>,
}

/// One synchronous update of the bounded-linear dynamics.
pub fn gip_step(g: &Graph, x_prev: &StateVector, schedule: &BoundSchedule, t: u32) -> StateVector {
    assert!(t >= 1, "steps are defined for t >= 1");
    let active = x_prev.support();
    let mut y = vec![0.0; g.n()];
    let mut touched = Vec::new();
    accumulate_frontier(g, x_prev.values(), &active, &mut y, &mut touched);
    let mut next = vec![0.0; g.n()];
    for &j in &touched {
        let (l, h) = schedule.bounds(j as usize, t);
        next[j as usize] = clip(y[j as usize], l, h);
    }
    StateVector::new(next)
}

/// Adds `W_ij x_i` into `y[j]` for every out-edge of every active node.
/// `touched` receives the sorted list of reached targets.
fn accumulate_frontier(
    g: &Graph,
    x: &[f64],
    active: &[u32],
    y: &mut [f64],
    touched: &mut Vec<u32>,
) {
    touched.clear();
    for &i in active {
        let xi = x[i as usize];
        for &(j, w) in g.out_edges(i as usize) {
            if y[j as usize] == 0.0 {
                touched.push(j);
            }
            y[j as usize] += w * xi;
        }
    }
    touched.sort_unstable();
    touched.dedup();
}

/// Iterates the dynamics over the active frontier and accumulates the
/// discounted influence until `max_j (1-gamma)^t x_j(t) < eps` or the cap.
///
/// Hitting the cap returns a partial result flagged `converged = false`
/// rather than an error, so parameter sweeps near divergence still report.
/// Each step touches every stored edge at most once.
pub fn evaluate_influence(
    g: &Graph,
    schedule: &BoundSchedule,
    cfg: &PropagationConfig,
    x0: &StateVector,
) -> PropagationResult {
    debug_assert!(cfg.validate().is_ok());
    debug_assert_eq!(x0.values().len(), g.n());
    let n = g.n();
    let retain = 1.0 - cfg.gamma;

    let mut x = x0.values().to_vec();
    let mut active = x0.support();
    let mut per_node = vec![0.0; n];
    let mut ever_active = vec![false; n];
    let mut n_active = 0usize;
    for &j in &active {
        ever_active[j as usize] = true;
        n_active += 1;
    }

    let s0: f64 = active.iter().map(|&j| x[j as usize]).sum();
    let mut s_of_t = vec![s0];
    let mut n_a_of_t = vec![n_active];
    let mut trajectory = cfg.record_trajectory.then(|| {
        vec![(
            0u32,
            active
                .iter()
                .map(|&j| (j, x[j as usize]))
                .collect::<Vec<_>>(),
        )]
    });
    let mut active_history = cfg.record_trajectory.then(|| vec![active.clone()]);

    let mut y = vec![0.0; n];
    let mut touched: Vec<u32> = Vec::new();
    let mut discount = 1.0; // (1 - gamma)^t
    let mut t = 0u32;
    let converged = loop {
        let peak = active.iter().map(|&j| x[j as usize]).fold(0.0f64, f64::max) * discount;
        if peak < cfg.eps {
            break true;
        }
        if t == cfg.t_max {
            break false;
        }
        t += 1;
        discount *= retain;

        for &j in &touched {
            y[j as usize] = 0.0;
        }
        accumulate_frontier(g, &x, &active, &mut y, &mut touched);
        for &j in &active {
            x[j as usize] = 0.0;
        }
        active.clear();
        let mut step_sum = 0.0;
        for &j in &touched {
            let (l, h) = schedule.bounds(j as usize, t);
            let v = clip(y[j as usize], l, h);
            if v > 0.0 {
                x[j as usize] = v;
                active.push(j);
                per_node[j as usize] += discount * v;
                step_sum += v;
                if !ever_active[j as usize] {
                    ever_active[j as usize] = true;
                    n_active += 1;
                }
            }
        }
        s_of_t.push(s_of_t.last().unwrap() + discount * step_sum);
        n_a_of_t.push(n_active);
        if let Some(traj) = trajectory.as_mut() {
            traj.push((t, active.iter().map(|&j| (j, x[j as usize])).collect()));
        }
        if let Some(hist) = active_history.as_mut() {
            hist.push(active.clone());
        }
    };

    let total = per_node.iter().sum();
    PropagationResult {
        total,
        per_node,
        steps: t,
        converged,
        trajectory,
        active_history,
        s_of_t,
        n_a_of_t,
    }
}

/// Closed-form overall influence of the linear regime, `c^T x(0)` with `c`
/// the Katz vector at factor `1 - gamma`. Requires `(1-gamma) rho(W) < 1`.
pub fn eic_closed_form(g: &Graph, gamma: f64, x0: &StateVector) -> Result<f64, PropagationError> {
    assert!((0.0..1.0).contains(&gamma), "gamma must lie in [0, 1)");
    let c = katz_centrality(g, 1.0 - gamma, 1e-12, 200_000)?;
    Ok(c.values
        .iter()
        .zip(x0.values().iter())
        .map(|(&ci, &xi)| ci * xi)
        .sum())
}

/// Parameters of the ramped threshold model: activation starts at `l'_j` with
/// state value 1 and grows linearly to `m_j` at `h'_j`.
#[derive(Debug, Clone)]
pub struct MltParams {
    pub l_prime: NodeValues,
    pub h_prime: NodeValues,
    pub m: NodeValues,
    pub h0_prime: NodeValues,
}

impl MltParams {
    /// The parameter mapping under which the ramped model reproduces
    /// threshold-type bounded dynamics with `l0 = 1` up to the scale factor
    /// `(theta_l * alpha)^t` per step.
    pub fn from_thresholds(theta_l: f64, theta_h: f64, alpha: f64, h0: &NodeValues) -> Self {
        assert!(theta_l > 0.0, "theta_l must be positive for the mapping");
        let (h_prime, m) = match h0 {
            NodeValues::Uniform(h) => (
                NodeValues::Uniform(theta_h * alpha * h),
                NodeValues::Uniform(theta_h * h / theta_l),
            ),
            NodeValues::PerNode(hs) => (
                NodeValues::PerNode(hs.iter().map(|h| theta_h * alpha * h).collect()),
                NodeValues::PerNode(hs.iter().map(|h| theta_h * h / theta_l).collect()),
            ),
        };
        MltParams {
            l_prime: NodeValues::Uniform(theta_l * alpha),
            h_prime,
            m,
            h0_prime: h0.clone(),
        }
    }
}

/// One step of the multi-valued threshold model (time-independent ramp).
pub fn mlt_step(g: &Graph, x_prev: &StateVector, params: &MltParams) -> StateVector {
    let active = x_prev.support();
    let mut y = vec![0.0; g.n()];
    let mut touched = Vec::new();
    accumulate_frontier(g, x_prev.values(), &active, &mut y, &mut touched);
    let mut next = vec![0.0; g.n()];
    for &j in &touched {
        let j = j as usize;
        let l = params.l_prime.get(j);
        let h = params.h_prime.get(j);
        let m = params.m.get(j);
        let yj = y[j];
        next[j] = if yj < l {
            0.0
        } else if yj >= h {
            m
        } else {
            (m - 1.0) / (h - l) * (yj - l) + 1.0
        };
    }
    StateVector::new(next)
}

/// One step of the all-or-threshold model: `x_j = theta_j` iff `y_j >= theta_j`.
pub fn elt_step(g: &Graph, x_prev: &StateVector, thresholds: &NodeValues) -> StateVector {
    let active = x_prev.support();
    let mut y = vec![0.0; g.n()];
    let mut touched = Vec::new();
    accumulate_frontier(g, x_prev.values(), &active, &mut y, &mut touched);
    let mut next = vec![0.0; g.n()];
    for &j in &touched {
        let th = thresholds.get(j as usize);
        if y[j as usize] >= th {
            next[j as usize] = th;
        }
    }
    StateVector::new(next)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    /// `l_{j,t} > l_min0 * w^t`: the lower bound can block a live propagation.
    LowerAboveFloor,
    /// `l_min0 * w^t > h0^T (W^t)_{:,j}`: the walk bound dips below the floor.
    WalkBelowFloor,
    /// `h0^T (W^t)_{:,j} > h_{j,t}`: saturation can clip the linear value.
    UpperBelowWalk,
    /// `x_j(0)` outside `{0} ∪ [l_{j,0}, h_{j,0}]`.
    InvalidInitialState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundViolation {
    pub node: u32,
    pub t: u32,
    pub kind: ViolationKind,
}

#[derive(Debug, Clone, Default)]
pub struct EicLimitReport {
    pub violations: Vec<BoundViolation>,
}

impl EicLimitReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Certifies linear-regime equivalence over a horizon by checking, for every
/// node and step `t <= horizon`, the chain
/// `l_{j,t} <= l_min0 w^t <= h0^T (W^t)_{:,j} <= h_{j,t}`, with `w` the
/// smallest positive weight and `l_min0` the smallest initial lower bound.
/// An empty violation list certifies that the trajectory from any valid
/// initial state equals the pure linear dynamics over the horizon.
pub fn validate_eic_limit(
    g: &Graph,
    schedule: &BoundSchedule,
    x0: &StateVector,
    horizon: u32,
) -> EicLimitReport {
    assert!(horizon >= 1);
    let mut report = EicLimitReport::default();
    if matches!(schedule, BoundSchedule::EicLimit) {
        return report;
    }
    let n = g.n();
    let w = g.min_weight().unwrap_or(0.0);

    let mut l_min0 = f64::INFINITY;
    // walk vector v_t = (W^T)^t h0, tracked as a finite part plus an
    // unbounded-contribution flag so no infinity enters the arithmetic
    let mut v: Vec<(f64, bool)> = Vec::with_capacity(n);
    for j in 0..n {
        match schedule.initial_bounds(j) {
            Some((l0, h0)) => {
                l_min0 = l_min0.min(l0);
                let x = x0.values()[j];
                let valid = x == 0.0
                    || match h0 {
                        UpperBound::Finite(h) => x >= l0 && x <= h,
                        UpperBound::Unbounded => x >= l0,
                    };
                if !valid {
                    report.violations.push(BoundViolation {
                        node: j as u32,
                        t: 0,
                        kind: ViolationKind::InvalidInitialState,
                    });
                }
                match h0 {
                    UpperBound::Finite(h) => v.push((h, false)),
                    UpperBound::Unbounded => v.push((0.0, true)),
                }
            }
            None => {
                l_min0 = 0.0;
                v.push((0.0, true));
            }
        }
    }

    let mut next: Vec<(f64, bool)> = vec![(0.0, false); n];
    for t in 1..=horizon {
        for slot in next.iter_mut() {
            *slot = (0.0, false);
        }
        for (i, &(vi, inf_i)) in v.iter().enumerate() {
            for &(j, wt) in g.out_edges(i) {
                let slot = &mut next[j as usize];
                slot.0 += wt * vi;
                slot.1 |= inf_i;
            }
        }
        std::mem::swap(&mut v, &mut next);
        let floor = l_min0 * w.powi(t as i32);
        #[allow(clippy::needless_range_loop)]
        for j in 0..n {
            let (l, h) = schedule.bounds(j, t);
            if l > floor {
                report.violations.push(BoundViolation {
                    node: j as u32,
                    t,
                    kind: ViolationKind::LowerAboveFloor,
                });
            }
            let (walk, walk_unbounded) = v[j];
            if !walk_unbounded && floor > walk {
                report.violations.push(BoundViolation {
                    node: j as u32,
                    t,
                    kind: ViolationKind::WalkBelowFloor,
                });
            }
            if let UpperBound::Finite(hv) = h {
                if walk_unbounded || walk > hv {
                    report.violations.push(BoundViolation {
                        node: j as u32,
                        t,
                        kind: ViolationKind::UpperBelowWalk,
                    });
                }
            }
        }
    }
    report
}

/// Right derivative of the step-`horizon` influence slice
/// `s_t = (1-gamma)^t sum_j x_j(t)` with respect to the initial state.
///
/// The bound function is right-differentiable everywhere with derivative 1 on
/// `[l, h)` and 0 elsewhere, so the derivative backpropagates through the
/// recorded trajectory as a 0/1-masked product of weight matrices.
pub fn right_derivative(
    g: &Graph,
    schedule: &BoundSchedule,
    cfg: &PropagationConfig,
    x0: &StateVector,
    horizon: u32,
) -> Result<Vec<f64>, PropagationError> {
    assert!(horizon >= 1);
    if horizon > cfg.t_max {
        return Err(PropagationError::HorizonExceeded {
            horizon,
            t_max: cfg.t_max,
        });
    }
    let n = g.n();
    // forward pass recording the semiderivative mask of every step
    let mut masks: Vec<Vec<f64>> = Vec::with_capacity(horizon as usize);
    let mut x = x0.values().to_vec();
    let mut active = x0.support();
    let mut y = vec![0.0; n];
    let mut touched: Vec<u32> = Vec::new();
    for t in 1..=horizon {
        for &j in &touched {
            y[j as usize] = 0.0;
        }
        accumulate_frontier(g, &x, &active, &mut y, &mut touched);
        let mut mask = vec![0.0; n];
        for (j, mj) in mask.iter_mut().enumerate() {
            let (l, h) = schedule.bounds(j, t);
            let yj = y[j];
            *mj = if yj >= l && !h.caps(yj) { 1.0 } else { 0.0 };
        }
        for &j in &active {
            x[j as usize] = 0.0;
        }
        active.clear();
        for &j in &touched {
            let (l, h) = schedule.bounds(j as usize, t);
            let v = clip(y[j as usize], l, h);
            if v > 0.0 {
                x[j as usize] = v;
                active.push(j);
            }
        }
        masks.push(mask);
    }

    // backward pass: grad^T = (1-g)^t mask_t^T W^T prod_{r=t-1..1} Diag(mask_r) W^T
    let mut v = masks.pop().unwrap();
    let mut next = vec![0.0; n];
    let apply_w = |v: &[f64], out: &mut [f64]| {
        for (i, slot) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for &(j, w) in g.out_edges(i) {
                acc += w * v[j as usize];
            }
            *slot = acc;
        }
    };
    while let Some(mask) = masks.pop() {
        apply_w(&v, &mut next);
        for (slot, (&nm, &mk)) in v.iter_mut().zip(next.iter().zip(mask.iter())) {
            *slot = nm * mk;
        }
    }
    apply_w(&v, &mut next);
    let discount = (1.0 - cfg.gamma).powi(horizon as i32);
    Ok(next.into_iter().map(|g| discount * g).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate_er;
    use proptest::prelude::*;

    fn star4_pendant() -> Graph {
        // center 0, leaves 1..=4, pendant 5 hanging off the center
        let mut edges = Vec::new();
        for leaf in 1..=4u32 {
            edges.push((0u32, leaf, 0.1));
            edges.push((leaf, 0u32, 0.1));
        }
        edges.push((0, 5, 0.1));
        edges.push((5, 0, 0.1));
        Graph::from_edges(6, &edges).unwrap()
    }

    #[test]
    fn bound_eval_shape() {
        let sched = BoundSchedule::Explicit(Arc::new(|_, _| (1.0, UpperBound::Finite(4.0))));
        assert_eq!(bound_eval(&sched, 0, 1, 2.0), 2.0);
        assert_eq!(bound_eval(&sched, 0, 1, 0.5), 0.0);
        assert_eq!(bound_eval(&sched, 0, 1, 7.0), 4.0);
        // collapsed bounds keep the boundary on the saturated side
        let sched = BoundSchedule::Explicit(Arc::new(|_, _| (3.0, UpperBound::Finite(3.0))));
        assert_eq!(bound_eval(&sched, 0, 1, 3.0), 3.0);
        assert_eq!(bound_eval(&sched, 0, 1, 2.999), 0.0);
    }

    #[test]
    fn gip_step_star_examples() {
        let g = star4_pendant();
        let x0 = StateVector::from_seeds(6, &[1, 2, 3, 4], &NodeValues::Uniform(1.0));
        let sched = BoundSchedule::threshold_uniform(2.0, 4.0, 0.1, 1.0, 1.0);
        let x1 = gip_step(&g, &x0, &sched, 1);
        assert_eq!(x1.values()[0], 0.4); // y = 0.4 hits h_1 = 0.4
        let sched = BoundSchedule::threshold_uniform(2.0, 2.0, 0.1, 1.0, 1.0);
        let x1 = gip_step(&g, &x0, &sched, 1);
        assert!((x1.values()[0] - 0.2).abs() < 1e-15); // saturated at h_1 = 0.2

        // absorbing zero state
        let x1 = gip_step(&g, &StateVector::zeros(6), &sched, 1);
        assert!(x1.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn pendant_dichotomy() {
        // leaves seeded; the pendant two hops away activates at t = 2 iff
        // theta_h >= theta_l^2 (here theta_l = 2)
        let g = star4_pendant();
        let x0 = StateVector::from_seeds(6, &[1, 2, 3, 4], &NodeValues::Uniform(1.0));
        let cfg = PropagationConfig {
            record_trajectory: true,
            ..Default::default()
        };
        let sched = BoundSchedule::threshold_uniform(2.0, 4.0, 0.1, 1.0, 1.0);
        let res = evaluate_influence(&g, &sched, &cfg, &x0);
        let expected = 0.1f64 * (4.0f64 * 0.1f64); // alpha * h_{0,1}
        let x2: Vec<(u32, f64)> = res.trajectory.as_ref().unwrap()[2].1.clone();
        let pendant = x2.iter().find(|&&(j, _)| j == 5).map(|&(_, v)| v);
        assert_eq!(pendant, Some(expected));
        assert!((expected - 0.04).abs() < 1e-15);
        let history = res.active_history.as_ref().unwrap();
        assert_eq!(history.len(), res.steps as usize + 1);
        assert_eq!(history[0], vec![1, 2, 3, 4]);
        assert_eq!(history[1], vec![0]);

        let sched = BoundSchedule::threshold_uniform(2.0, 2.0, 0.1, 1.0, 1.0);
        let res = evaluate_influence(&g, &sched, &cfg, &x0);
        let x2 = &res.trajectory.as_ref().unwrap()[2].1;
        assert!(
            x2.iter().all(|&(j, _)| j != 5),
            "pendant must stay inactive"
        );
    }

    #[test]
    fn evaluate_chain() {
        let g = Graph::from_edges(2, &[(0, 1, 0.5)]).unwrap();
        let x0 = StateVector::new(vec![1.0, 0.0]);
        let res = evaluate_influence(
            &g,
            &BoundSchedule::EicLimit,
            &PropagationConfig::default(),
            &x0,
        );
        assert_eq!(res.total, 0.5);
        assert_eq!(res.steps, 2);
        assert!(res.converged);
        assert_eq!(res.per_node, vec![0.0, 0.5]);
        assert_eq!(res.s_of_t, vec![1.0, 1.5, 1.5]);
        assert_eq!(res.n_a_of_t, vec![1, 2, 2]);

        let res = evaluate_influence(
            &g,
            &BoundSchedule::EicLimit,
            &PropagationConfig::default(),
            &StateVector::zeros(2),
        );
        assert_eq!(res.total, 0.0);
        assert_eq!(res.steps, 0);
    }

    #[test]
    fn evaluate_blocked_star_center() {
        // a single seeded center cannot push any leaf past theta_l = 2
        let g = star4_pendant();
        let x0 = StateVector::from_seeds(6, &[0], &NodeValues::Uniform(1.0));
        let sched = BoundSchedule::threshold_uniform(2.0, 2.0, 0.1, 1.0, 1.0);
        let res = evaluate_influence(&g, &sched, &PropagationConfig::default(), &x0);
        assert_eq!(res.total, 0.0);
    }

    #[test]
    fn evaluate_nonconvergent_is_flagged() {
        // 2-cycle with weight 2: the linear dynamics blow up
        let g = Graph::from_edges(2, &[(0, 1, 2.0), (1, 0, 2.0)]).unwrap();
        let cfg = PropagationConfig {
            t_max: 50,
            ..Default::default()
        };
        let res = evaluate_influence(
            &g,
            &BoundSchedule::EicLimit,
            &cfg,
            &StateVector::new(vec![1.0, 0.0]),
        );
        assert!(!res.converged);
        assert_eq!(res.steps, 50);
        assert!(res.total.is_finite());
    }

    #[test]
    fn closed_form_examples() {
        let g = Graph::from_edges(2, &[(0, 1, 0.5)]).unwrap();
        let x0 = StateVector::new(vec![1.0, 0.0]);
        assert!((eic_closed_form(&g, 0.0, &x0).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(
            eic_closed_form(&g, 0.0, &StateVector::zeros(2)).unwrap(),
            0.0
        );

        // 2-cycle weight 0.5, gamma = 0.5: c^T x0 = sum_t 0.25^t = 1/3
        let g = Graph::from_edges(2, &[(0, 1, 0.5), (1, 0, 0.5)]).unwrap();
        let v = eic_closed_form(&g, 0.5, &x0).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-10, "{v}");

        // divergent case: (1-gamma) rho = 1
        let g = Graph::from_edges(2, &[(0, 1, 1.0), (1, 0, 1.0)]).unwrap();
        assert!(matches!(
            eic_closed_form(&g, 0.0, &x0),
            Err(PropagationError::DivergentSeries { .. })
        ));
    }

    #[test]
    fn mlt_ramp() {
        let g = Graph::from_edges(2, &[(0, 1, 1.0)]).unwrap();
        let params = MltParams::from_thresholds(2.0, 4.0, 0.1, &NodeValues::Uniform(1.0));
        assert_eq!(params.l_prime.get(1), 0.2);
        assert!((params.h_prime.get(1) - 0.4).abs() < 1e-15);
        assert_eq!(params.m.get(1), 2.0);
        // y below, at, and inside the ramp
        let step = |x0: f64| {
            let x = StateVector::new(vec![x0, 0.0]);
            mlt_step(&g, &x, &params).values()[1]
        };
        assert_eq!(step(0.1), 0.0);
        assert_eq!(step(0.2), 1.0);
        assert!((step(0.3) - 1.5).abs() < 1e-12);
        assert_eq!(step(0.4), 2.0);
        assert_eq!(step(0.9), 2.0);
    }

    #[test]
    fn elt_boundaries() {
        let g = Graph::from_edges(2, &[(0, 1, 1.0)]).unwrap();
        let th = NodeValues::Uniform(0.5);
        let x = StateVector::new(vec![0.5, 0.0]);
        assert_eq!(elt_step(&g, &x, &th).values()[1], 0.5);
        let x = StateVector::new(vec![0.5 - 1e-9, 0.0]);
        assert_eq!(elt_step(&g, &x, &th).values()[1], 0.0);
    }

    #[test]
    fn validate_eic_limit_cases() {
        let g = generate_er(6, 0.8, 0.1, 5).unwrap();
        let x0 = StateVector::from_seeds(6, &[0], &NodeValues::Uniform(1.0));
        // the pure linear schedule is always valid
        let rep = validate_eic_limit(&g, &BoundSchedule::EicLimit, &x0, 10);
        assert!(rep.is_valid());

        // theta_l = 2 on a uniform-weight graph: lower bounds outgrow the
        // floor immediately
        let sched = BoundSchedule::threshold_uniform(2.0, 9000.0, 0.1, 1.0, 1.0);
        let rep = validate_eic_limit(&g, &sched, &x0, 3);
        assert!(rep
            .violations
            .iter()
            .any(|v| v.t == 1 && v.kind == ViolationKind::LowerAboveFloor));

        // floor-matching explicit schedule with unbounded uppers is valid on
        // a cycle (every node keeps receiving walks)
        let g = Graph::from_edges(2, &[(0, 1, 0.1), (1, 0, 0.1)]).unwrap();
        let sched = BoundSchedule::Explicit(Arc::new(|_, t| {
            (1.0 * 0.1f64.powi(t as i32), UpperBound::Unbounded)
        }));
        let x0 = StateVector::new(vec![1.0, 0.0]);
        let rep = validate_eic_limit(&g, &sched, &x0, 10);
        assert!(rep.is_valid(), "{:?}", rep.violations);
    }

    #[test]
    fn right_derivative_linear_chain() {
        let g = Graph::from_edges(2, &[(0, 1, 0.5)]).unwrap();
        let cfg = PropagationConfig::default();
        let x0 = StateVector::new(vec![1.0, 0.0]);
        let d = right_derivative(&g, &BoundSchedule::EicLimit, &cfg, &x0, 1).unwrap();
        assert_eq!(d, vec![0.5, 0.0]);
        // t = 2: W^2 1 = 0
        let d = right_derivative(&g, &BoundSchedule::EicLimit, &cfg, &x0, 2).unwrap();
        assert_eq!(d, vec![0.0, 0.0]);
    }

    #[test]
    fn right_derivative_elt_limit_is_zero_off_threshold() {
        // l = h everywhere: the mask is zero unless y lands exactly on l
        let g = generate_er(8, 0.6, 0.1, 9).unwrap();
        let sched = BoundSchedule::threshold_uniform(2.0, 2.0, 0.1, 1.0, 1.0);
        let cfg = PropagationConfig::default();
        let x0 = StateVector::from_seeds(8, &[0], &NodeValues::Uniform(0.9));
        let d = right_derivative(&g, &sched, &cfg, &x0, 3).unwrap();
        assert!(d.iter().all(|&v| v == 0.0), "{d:?}");
    }

    #[test]
    fn right_derivative_matches_finite_difference() {
        let g = generate_er(10, 0.5, 0.1, 21).unwrap();
        let sched = BoundSchedule::threshold_uniform(1.3, 5.0, 0.1, 0.5, 2.0);
        let cfg = PropagationConfig::default();
        let x0 = StateVector::from_seeds(10, &[0, 3, 7], &NodeValues::Uniform(1.7));
        let t = 3u32;
        let grad = right_derivative(&g, &sched, &cfg, &x0, t).unwrap();
        let slice = |x: &StateVector| {
            let mut cur = x.clone();
            for step_t in 1..=t {
                cur = gip_step(&g, &cur, &sched, step_t);
            }
            cur.values().iter().sum::<f64>()
        };
        let base = slice(&x0);
        let delta = 1e-7;
        for j in [0usize, 3, 7] {
            let mut bumped = x0.values().to_vec();
            bumped[j] += delta;
            let fd = (slice(&StateVector::new(bumped)) - base) / delta;
            assert!(
                (fd - grad[j]).abs() <= 1e-4 * fd.abs().max(1.0),
                "node {j}: fd {fd} vs grad {}",
                grad[j]
            );
        }
    }

    #[test]
    fn right_derivative_horizon_guard() {
        let g = Graph::from_edges(2, &[(0, 1, 0.5)]).unwrap();
        let cfg = PropagationConfig {
            t_max: 5,
            ..Default::default()
        };
        let x0 = StateVector::new(vec![1.0, 0.0]);
        assert!(matches!(
            right_derivative(&g, &BoundSchedule::EicLimit, &cfg, &x0, 6),
            Err(PropagationError::HorizonExceeded { .. })
        ));
    }

    proptest! {
        // the all-or-threshold step is the collapsed-bounds special case
        #[test]
        fn gip_with_equal_bounds_is_elt(seed in 0u64..300, theta in 0.05f64..0.5) {
            let g = generate_er(12, 0.4, 0.1, seed).unwrap();
            let x0 = StateVector::from_seeds(12, &[0, 1, 2], &NodeValues::Uniform(1.0));
            let sched = BoundSchedule::Explicit(Arc::new(move |_, _| {
                (theta, UpperBound::Finite(theta))
            }));
            let a = gip_step(&g, &x0, &sched, 1);
            let b = elt_step(&g, &x0, &NodeValues::Uniform(theta));
            prop_assert_eq!(a.values(), b.values());
        }

        // clip postcondition: result in {0} ∪ [l, h] and never above y
        #[test]
        fn bound_eval_postcondition(y in 0.0f64..10.0, l in 0.0f64..5.0, span in 0.0f64..5.0) {
            let h = l + span;
            let sched = BoundSchedule::Explicit(Arc::new(move |_, _| (l, UpperBound::Finite(h))));
            let r = bound_eval(&sched, 0, 1, y);
            prop_assert!(r == 0.0 || (r >= l && r <= h));
            prop_assert!(r <= y || (r - y).abs() < 1e-12);
        }
    }
}

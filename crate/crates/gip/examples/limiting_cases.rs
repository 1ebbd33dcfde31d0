//! The bounded-linear dynamics contain three named limits:
//!
//! - dropping both bounds gives the pure linear cascade `x(t) = W^T x(t-1)`;
//! - collapsing the bounds (`l = h`) gives all-or-threshold updates;
//! - with uniform thresholds and unit initial floor, the dynamics equal the
//!   ramped multi-valued threshold model up to a `(theta_l alpha)^t` scale.
//!
//! This example checks all three numerically on one random network.

use gip::propagation::{
    elt_step, gip_step, mlt_step, BoundSchedule, MltParams, NodeValues, StateVector,
};
use gip::{generate_er, Graph};

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn main() {
    let g: Graph = generate_er(15, 0.35, 0.1, 42).unwrap();
    let alpha = g.mean_weight().unwrap();
    let x0 = StateVector::from_seeds(15, &[0, 3, 7], &NodeValues::Uniform(1.0));

    // 1. linear limit: the unbounded schedule reproduces matrix powers
    let mut x = x0.clone();
    let mut linear = x0.values().to_vec();
    for t in 1..=6u32 {
        x = gip_step(&g, &x, &BoundSchedule::EicLimit, t);
        let mut next = vec![0.0; 15];
        for (i, &xi) in linear.iter().enumerate() {
            for &(j, w) in g.out_edges(i) {
                next[j as usize] += w * xi;
            }
        }
        linear = next;
        assert!(max_diff(x.values(), &linear) < 1e-14);
    }
    println!("linear limit: 6 steps match W^T powers exactly");

    // 2. threshold limit: l = h behaves as the all-or-threshold step
    let theta = 0.2;
    let collapsed = BoundSchedule::threshold_uniform(2.0, 2.0, alpha, 1.0, 1.0);
    let a = gip_step(&g, &x0, &collapsed, 1);
    let b = elt_step(&g, &x0, &NodeValues::Uniform(2.0 * alpha));
    assert_eq!(a.values(), b.values());
    println!("threshold limit: collapsed bounds equal the all-or-threshold step (theta = {theta})");

    // 3. ramped model: per-step scale identity x(t) = (theta_l alpha)^t x'(t)
    let (theta_l, theta_h) = (1.5, 4.0);
    let schedule = BoundSchedule::threshold_uniform(theta_l, theta_h, alpha, 1.0, 1.0);
    let params = MltParams::from_thresholds(theta_l, theta_h, alpha, &NodeValues::Uniform(1.0));
    let mut x = x0.clone();
    let mut x_ramp = x0.clone();
    let mut scale = 1.0;
    for t in 1..=8u32 {
        x = gip_step(&g, &x, &schedule, t);
        x_ramp = mlt_step(&g, &x_ramp, &params);
        scale *= theta_l * alpha;
        let scaled: Vec<f64> = x_ramp.values().iter().map(|v| v * scale).collect();
        assert!(max_diff(x.values(), &scaled) < 1e-12);
    }
    println!("ramped model: 8 steps match through the (theta_l alpha)^t scale map");
}

//! Acceptance gate: one test per release criterion, each printing a PASS line
//! with the measured quantities (`cargo test --test acceptance -- --nocapture`
//! shows them). Expected values come from independent oracles: a dense
//! full-matrix simulator, closed-form series, and analytic expectations.

mod common;

use std::time::Instant;

use common::*;
use gip::experiment::{run_sbm_effects, RunOptions, SbmEffectsConfig, SeedPair};
use gip::im::{
    accuracy, brute_force, cds_solve, centrality_method, exact_linear_solution, neighborhood,
    random_sampling, rank_metric, warm_scores, CdsParams, CentralityMethod, ImProblem, Restart,
    TwoBlockPartition,
};
use gip::propagation::{
    eic_closed_form, evaluate_influence, gip_step, mlt_step, right_derivative, BoundSchedule,
    MltParams, NodeValues, PropagationConfig, StateVector,
};
use gip::{Graph, SbmConfig};
use rand::Rng;

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn sparse_to_dense(n: usize, sparse: &[(u32, f64)]) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for &(j, x) in sparse {
        out[j as usize] = x;
    }
    out
}

/// Criterion 1: the sparse-frontier evaluator matches a dense full-matrix
/// reference on 200 random instances, per step and in total, within 1e-10.
#[test]
fn acceptance_01_dense_oracle_equivalence() {
    let started = Instant::now();
    let mut rng = seeded_rng(0xA1);
    for case in 0..200 {
        let g = random_weighted_graph(&mut rng, 30);
        let n = g.n();
        let alpha = match g.mean_weight() {
            Ok(a) => a,
            Err(_) => continue,
        };
        let gamma = if case % 2 == 0 { 0.0 } else { 0.2 };
        let theta_l = rng.gen_range(0.5..3.0);
        let theta_h = theta_l + rng.gen_range(0.0..6.0);
        let l0 = rng.gen_range(0.3..1.0);
        let h0 = l0 + rng.gen_range(0.0..1.0);
        let schedule = BoundSchedule::threshold_uniform(theta_l, theta_h, alpha, l0, h0);
        let x0 = random_state(&mut rng, n, 0.3, l0, h0);
        let cfg = PropagationConfig {
            gamma,
            eps: 1e-9,
            t_max: 10_000,
            record_trajectory: true,
        };
        let sparse = evaluate_influence(&g, &schedule, &cfg, &x0);
        let dense = dense_evaluate(&g, &schedule, gamma, 1e-9, 10_000, x0.values());
        assert_eq!(sparse.steps, dense.steps, "case {case}: step counts differ");
        assert!(
            (sparse.total - dense.total).abs() <= 1e-10,
            "case {case}: totals differ: {} vs {}",
            sparse.total,
            dense.total
        );
        let trajectory = sparse.trajectory.as_ref().unwrap();
        for (t, states) in trajectory {
            let dense_x = &dense.trajectory[*t as usize];
            let sparse_x = sparse_to_dense(n, states);
            assert!(
                max_abs_diff(&sparse_x, dense_x) <= 1e-10,
                "case {case}: state mismatch at t={t}"
            );
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed < 10.0, "criterion 1 exceeded 10 s: {elapsed:.2} s");
    println!("acceptance criterion 1: PASS (200 instances, {elapsed:.2} s)");
}

/// Criterion 2: under the pure-linear schedule the trajectory equals
/// `(W^T)^t x(0)` to 1e-10 for t <= 20, and the Katz closed form matches the
/// evaluated total within the truncation bound `||c||_1 * eps`.
#[test]
fn acceptance_02_linear_limit_and_closed_form() {
    let mut rng = seeded_rng(0xB2);
    let mut checked_closed_form = 0;
    for case in 0..100 {
        let g = random_weighted_graph(&mut rng, 25);
        let n = g.n();
        let gamma = if case % 2 == 0 { 0.0 } else { 0.2 };
        // rescale weights so (1-gamma) * max column sum <= 0.9, which forces
        // (1-gamma) * rho(W) <= 0.9
        let col_bound = (0..n)
            .map(|j| g.in_edges(j).iter().map(|&(_, w)| w).sum::<f64>())
            .fold(0.0f64, f64::max);
        if col_bound == 0.0 {
            continue;
        }
        let scale = 0.9 / ((1.0 - gamma) * col_bound);
        let mut edges = Vec::new();
        for i in 0..n {
            for &(j, w) in g.out_edges(i) {
                edges.push((i as u32, j, w * scale.min(1.0)));
            }
        }
        let g = Graph::from_edges(n, &edges).unwrap();

        let x0 = random_state(&mut rng, n, 0.4, 0.2, 1.0);
        // trajectory identity over the horizon
        let oracle = dense_linear_trajectory(&g, x0.values(), 20);
        let mut x = x0.clone();
        for t in 1..=20u32 {
            x = gip_step(&g, &x, &BoundSchedule::EicLimit, t);
            assert!(
                max_abs_diff(x.values(), &oracle[t as usize]) <= 1e-10,
                "case {case}: linear trajectory mismatch at t={t}"
            );
        }

        // closed form against the truncated evaluation
        let eps = 1e-10;
        let cfg = PropagationConfig {
            gamma,
            eps,
            t_max: 100_000,
            record_trajectory: false,
        };
        let evaluated = evaluate_influence(&g, &BoundSchedule::EicLimit, &cfg, &x0);
        assert!(evaluated.converged);
        let closed = eic_closed_form(&g, gamma, &x0).unwrap();
        let ones = StateVector::new(vec![1.0; n]);
        let c_l1 = eic_closed_form(&g, gamma, &ones).unwrap();
        let bound = c_l1 * eps * 1.01 + 1e-12;
        assert!(
            (closed - evaluated.total).abs() <= bound,
            "case {case}: closed form {closed} vs evaluated {} (bound {bound})",
            evaluated.total
        );
        checked_closed_form += 1;
    }
    assert!(checked_closed_form >= 90);
    println!("acceptance criterion 2: PASS ({checked_closed_form} closed-form checks)");
}

/// Criterion 3: with uniform thresholds and unit initial lower bounds the
/// bounded dynamics equal the ramped threshold model up to the per-step scale
/// `(theta_l alpha)^t`, and the discounted totals agree under the mapped
/// discount factor.
#[test]
fn acceptance_03_mlt_scaling_identity() {
    let mut rng = seeded_rng(0xC3);
    let horizon = 40u32;
    for case in 0..100 {
        let g = random_weighted_graph(&mut rng, 20);
        let n = g.n();
        let alpha = match g.mean_weight() {
            Ok(a) => a,
            Err(_) => continue,
        };
        let gamma = if case % 2 == 0 { 0.0 } else { 0.2 };
        let theta_l = rng.gen_range(0.8..2.5);
        let theta_h = theta_l + rng.gen_range(0.0..5.0);
        if theta_l * alpha >= 1.0 {
            continue;
        }
        let h0 = rng.gen_range(1.0..2.0);
        let schedule = BoundSchedule::threshold_uniform(theta_l, theta_h, alpha, 1.0, h0);
        let params = MltParams::from_thresholds(theta_l, theta_h, alpha, &NodeValues::Uniform(h0));
        let x0 = random_state(&mut rng, n, 0.4, 1.0, h0);

        let gamma_prime = 1.0 - (1.0 - gamma) * theta_l * alpha;
        let scale_step = theta_l * alpha;
        let mut x = x0.clone();
        let mut x_mlt = x0.clone();
        let mut scale = 1.0;
        let (mut total, mut total_mlt) = (0.0, 0.0);
        let (mut disc, mut disc_mlt) = (1.0, 1.0);
        for t in 1..=horizon {
            x = gip_step(&g, &x, &schedule, t);
            x_mlt = mlt_step(&g, &x_mlt, &params);
            scale *= scale_step;
            let scaled: Vec<f64> = x_mlt.values().iter().map(|v| v * scale).collect();
            assert!(
                max_abs_diff(x.values(), &scaled) <= 1e-10,
                "case {case}: per-step identity broken at t={t}"
            );
            disc *= 1.0 - gamma;
            disc_mlt *= 1.0 - gamma_prime;
            total += disc * x.values().iter().sum::<f64>();
            total_mlt += disc_mlt * x_mlt.values().iter().sum::<f64>();
        }
        assert!(
            (total - total_mlt).abs() <= 1e-10 * total.abs().max(1.0),
            "case {case}: totals {total} vs {total_mlt}"
        );
    }
    println!("acceptance criterion 3: PASS (100 instances over {horizon} steps)");
}

/// Criterion 4: Monte-Carlo one-step influence on 1000 two-block SBM samples
/// against the analytic expectations; the published plug-in numbers
/// (5.0/5.0 and 4.1 vs 0.9) are asserted as formula values, while the
/// statistical gate uses the self-edge-free expectations of the sampled
/// ensemble (4.82/4.82 and 3.776 vs 0.864).
#[test]
fn acceptance_04_sbm_one_step_expectations() {
    use gip::experiment::{sbm_expected_one_step, ActivationRegime};
    let started = Instant::now();

    // plug-in arithmetic from the closed forms
    let plug =
        |split, regime| sbm_expected_one_step(25, 0.9, 0.1, 0.1, 1.0, 0.0, split, regime, true);
    assert!((plug((2, 0), ActivationRegime::Linear) - 5.0).abs() < 1e-12);
    assert!((plug((1, 1), ActivationRegime::Linear) - 5.0).abs() < 1e-12);
    assert!((plug((2, 0), ActivationRegime::TwoNeighbor) - 4.1).abs() < 1e-12);
    assert!((plug((1, 1), ActivationRegime::TwoNeighbor) - 0.9).abs() < 1e-12);

    let mut cfg = SbmEffectsConfig::paper_default(0xD4);
    cfg.pairs = vec![SeedPair {
        label: "k2".into(),
        same: vec![0, 1],
        split: vec![0, 25],
    }];
    cfg.theta_l_grid = vec![1.0, 2.0];
    cfg.theta_h_grid = vec![9000.0];
    cfg.samples = Some(1000);
    let out = run_sbm_effects(&cfg, RunOptions::default()).unwrap();

    let lookup = |metric: &str, side: &str, tl: f64| -> f64 {
        out.rows
            .iter()
            .find(|r| {
                r.replicate.is_none()
                    && r.metric == metric
                    && r.params[1].1 == side
                    && r.params[2].1 == tl.to_string()
            })
            .unwrap_or_else(|| panic!("missing {metric} {side} {tl}"))
            .value
    };

    for (tl, expected_same, expected_split) in [(1.0, 4.82, 4.82), (2.0, 3.776, 0.864)] {
        for (side, expected) in [("same", expected_same), ("split", expected_split)] {
            let mean = lookup("mean_s1_increment", side, tl);
            let se = lookup("se_s1_increment", side, tl);
            let corrected = lookup("analytic_s1_corrected", side, tl);
            assert!(
                (corrected - expected).abs() < 1e-12,
                "corrected oracle mismatch at tl={tl} {side}"
            );
            assert!(
                (mean - corrected).abs() <= 3.0 * se,
                "tl={tl} {side}: mean {mean} vs analytic {corrected} (3se = {})",
                3.0 * se
            );
        }
    }
    // part 1: the two seed sets are statistically indistinguishable
    let (m_same, m_split) = (
        lookup("mean_s1_increment", "same", 1.0),
        lookup("mean_s1_increment", "split", 1.0),
    );
    let se_pair = (lookup("se_s1_increment", "same", 1.0).powi(2)
        + lookup("se_s1_increment", "split", 1.0).powi(2))
    .sqrt();
    assert!((m_same - m_split).abs() <= 3.0 * se_pair);
    // part 2: the same-community set strictly dominates
    let (m_same2, m_split2) = (
        lookup("mean_s1_increment", "same", 2.0),
        lookup("mean_s1_increment", "split", 2.0),
    );
    let se_pair2 = (lookup("se_s1_increment", "same", 2.0).powi(2)
        + lookup("se_s1_increment", "split", 2.0).powi(2))
    .sqrt();
    assert!(m_same2 - m_split2 > 3.0 * se_pair2);

    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed < 60.0, "criterion 4 exceeded 60 s: {elapsed:.1} s");
    println!(
        "acceptance criterion 4: PASS (1000 samples, {elapsed:.1} s; plug-in 5.0/5.0, 4.1/0.9; \
         sampled means {m_same:.3}/{m_split:.3}, {m_same2:.3}/{m_split2:.3})"
    );
}

/// Criterion 5: the pendant dichotomy on the 4-star-plus-pendant instance:
/// the node two hops out activates at t = 2 exactly when the saturation
/// threshold reaches the square of the activation threshold.
#[test]
fn acceptance_05_pendant_dichotomy() {
    let mut edges = Vec::new();
    for leaf in 1..=4u32 {
        edges.push((0u32, leaf, 0.1));
        edges.push((leaf, 0u32, 0.1));
    }
    edges.push((0, 5, 0.1));
    edges.push((5, 0, 0.1));
    let g = Graph::from_edges(6, &edges).unwrap();
    let x0 = StateVector::from_seeds(6, &[1, 2, 3, 4], &NodeValues::Uniform(1.0));
    let cfg = PropagationConfig {
        record_trajectory: true,
        ..Default::default()
    };
    let expected_active = 0.1f64 * (4.0f64 * 0.1f64); // alpha * h_{j,1}

    for (theta_h, expected) in [(4.0, expected_active), (2.0, 0.0)] {
        let schedule = BoundSchedule::threshold_uniform(2.0, theta_h, 0.1, 1.0, 1.0);
        let res = evaluate_influence(&g, &schedule, &cfg, &x0);
        let x2 = sparse_to_dense(6, &res.trajectory.as_ref().unwrap()[2].1);
        assert_eq!(x2[5], expected, "theta_h = {theta_h}");
        // dense oracle cross-check, bit for bit
        let dense = dense_evaluate(&g, &schedule, 0.0, 1e-6, 100, x0.values());
        assert_eq!(dense.trajectory[2][5], expected);
    }
    assert!((expected_active - 0.04).abs() < 1e-15);
    println!("acceptance criterion 5: PASS (pendant t=2 value 0.04 at theta_h=4, 0 at theta_h=2)");
}

/// Criterion 6: in the pure linear regime the Katz-ranked solution attains the
/// brute-force optimum exactly on 100 random instances.
#[test]
fn acceptance_06_exact_linear_solution_optimal() {
    let mut rng = seeded_rng(0xE6);
    let mut checked = 0;
    while checked < 100 {
        let g = random_weighted_graph(&mut rng, 12);
        let n = g.n();
        let col_bound = (0..n)
            .map(|j| g.in_edges(j).iter().map(|&(_, w)| w).sum::<f64>())
            .fold(0.0f64, f64::max);
        if col_bound == 0.0 {
            continue;
        }
        // keep the series comfortably convergent
        let scale = (0.9 / col_bound).min(1.0);
        let mut edges = Vec::new();
        for i in 0..n {
            for &(j, w) in g.out_edges(i) {
                edges.push((i as u32, j, w * scale));
            }
        }
        let g = Graph::from_edges(n, &edges).unwrap();
        let k = rng.gen_range(1..=3usize.min(n));
        let mut problem = ImProblem::new(
            g,
            BoundSchedule::EicLimit,
            0.0,
            1e-12,
            k,
            NodeValues::Uniform(1.0),
            NodeValues::Uniform(1.0),
        )
        .unwrap();
        problem.t_max = 100_000;
        let exact = exact_linear_solution(&problem).unwrap();
        let table = brute_force(&problem).unwrap();
        let via_black_box = problem.objective_of_set(&exact.seed_set).unwrap();
        assert_eq!(
            via_black_box,
            table.best().1,
            "instance {checked}: exact solution {:?} does not attain the optimum",
            exact.seed_set
        );
        checked += 1;
    }
    println!("acceptance criterion 6: PASS (100 instances, bitwise optimum match)");
}

/// Criterion 7: the direct search with community restarts finds a brute-force
/// optimum in every cell of the karate-club threshold grid at k = 3.
#[test]
fn acceptance_07_karate_grid_exact() {
    let started = Instant::now();
    let g = load_karate();
    assert_eq!(g.n(), 34);
    assert_eq!(g.m(), 156);
    let (block1, block2) = karate_factions();
    let partition = TwoBlockPartition { block1, block2 };
    let params = CdsParams {
        restart: Restart::Community(partition),
        search_enabled: true,
        ..Default::default()
    };
    let mut cells = 0;
    let mut total_brute_evals = 0usize;
    let mut worst_tau = 1.0f64;
    for theta_l in [1.0f64, 2.0, 3.0] {
        let mut theta_h = theta_l;
        while theta_h <= 8.0 {
            let problem =
                ImProblem::threshold_uniform(g.clone(), theta_l, theta_h, 0.0, 1e-6, 3, 1.0, 1.0)
                    .unwrap();
            let table = brute_force(&problem).unwrap();
            assert_eq!(table.len(), 5984);
            total_brute_evals += table.len();
            let out = cds_solve(&problem, &params).unwrap();
            let tau = accuracy(out.objective, &table);
            worst_tau = worst_tau.min(tau);
            // tau = 1.0 up to summation-order noise: seed sets tied in exact
            // arithmetic can differ in the last bit of the evaluated total
            assert!(
                out.objective >= table.best().1 * (1.0 - 1e-12),
                "cell ({theta_l},{theta_h}): tau = {tau}"
            );
            // poll soundness of the returned point
            let scores = warm_scores(&problem).unwrap();
            for cand in neighborhood(&out.z, 2, &scores) {
                assert!(problem.objective_of_set(&cand).unwrap() <= out.objective);
            }
            cells += 1;
            theta_h += 1.0;
        }
    }
    assert_eq!(cells, 21);
    let elapsed = started.elapsed().as_secs_f64();
    assert!(
        elapsed < 300.0,
        "criterion 7 exceeded 5 min: {elapsed:.0} s"
    );
    println!(
        "acceptance criterion 7: PASS ({cells} cells, worst tau = {worst_tau} (1.0 within 1e-12), \
         {total_brute_evals} brute evaluations, {elapsed:.1} s)"
    );
}

/// Criterion 8: on the asymmetric two-block SBM at k = 4, the direct search
/// stays within accuracy 0.95 and a top-2 rank out of 230300 in its worst
/// grid cell, on a majority of generated instances. The search runs with
/// radius 4 and community restarts, the two published improvement dimensions
/// (radius grown with the budget, restarts across the blocks).
#[test]
fn acceptance_08_sbm_grid_near_optimal() {
    let started = Instant::now();
    let mut passes = 0;
    let instances = 3;
    for inst in 0..instances {
        let sbm = SbmConfig {
            n1: 25,
            n2: 25,
            p_in_1: 0.3,
            p_in_2: 0.12,
            p_12: 0.01,
            weight: 0.1,
            seed: 0xF8 + inst,
        };
        let g = gip::generate_sbm(&sbm).unwrap();
        let params = CdsParams {
            d: 4,
            restart: Restart::Community(TwoBlockPartition::from_split(g.n(), 25)),
            search_enabled: true,
            ..Default::default()
        };
        let mut worst_tau = 1.0f64;
        let mut worst_rank_count = 1usize;
        let mut cells = 0;
        for theta_l in [1.0f64, 2.0, 3.0] {
            for theta_h in [theta_l, 8.0, 16.0] {
                if theta_h < theta_l {
                    continue;
                }
                let problem = ImProblem::threshold_uniform(
                    g.clone(),
                    theta_l,
                    theta_h,
                    0.0,
                    1e-6,
                    4,
                    1.0,
                    1.0,
                )
                .unwrap();
                let table = brute_force(&problem).unwrap();
                assert_eq!(table.len(), 230_300);
                let out = cds_solve(&problem, &params).unwrap();
                let tau = accuracy(out.objective, &table);
                let phi = rank_metric(&out.seed_set, &table).unwrap();
                let rank_count = (phi * table.len() as f64).round() as usize;
                worst_tau = worst_tau.min(tau);
                worst_rank_count = worst_rank_count.max(rank_count);
                cells += 1;
            }
        }
        assert_eq!(cells, 9);
        let ok = worst_tau >= 0.95 && worst_rank_count <= 2;
        println!(
            "  instance {inst}: worst tau {worst_tau:.6}, worst rank {worst_rank_count} of 230300 -> {}",
            if ok { "pass" } else { "fail" }
        );
        if ok {
            passes += 1;
        }
    }
    assert!(
        passes * 2 > instances,
        "only {passes} of {instances} instances met the accuracy/rank bar"
    );
    let elapsed = started.elapsed().as_secs_f64();
    println!("acceptance criterion 8: PASS ({passes}/{instances} instances, {elapsed:.0} s)");
}

/// Criterion 9a: the overall influence is nondecreasing in the initial state.
#[test]
fn acceptance_09a_monotonicity() {
    let mut rng = seeded_rng(0x9A);
    let cfg = PropagationConfig {
        eps: 1e-10,
        ..Default::default()
    };
    for case in 0..500 {
        let g = random_weighted_graph(&mut rng, 20);
        let n = g.n();
        let alpha = match g.mean_weight() {
            Ok(a) => a,
            Err(_) => continue,
        };
        let theta_l = rng.gen_range(0.5..2.5);
        let theta_h = theta_l + rng.gen_range(0.0..6.0);
        let (l0, h0) = (0.5, 1.5);
        let schedule = BoundSchedule::threshold_uniform(theta_l, theta_h, alpha, l0, h0);
        let upper = random_state(&mut rng, n, 0.4, l0, h0);
        // lower state: drop some seeds, shrink the rest within [l0, value]
        let lower: Vec<f64> = upper
            .values()
            .iter()
            .map(|&v| {
                if v == 0.0 || rng.gen::<f64>() < 0.3 {
                    0.0
                } else {
                    rng.gen_range(l0..=v)
                }
            })
            .collect();
        let lower = StateVector::new(lower);
        let s_low = evaluate_influence(&g, &schedule, &cfg, &lower).total;
        let s_high = evaluate_influence(&g, &schedule, &cfg, &upper).total;
        assert!(
            s_low <= s_high + 1e-12,
            "case {case}: monotonicity violated: {s_low} > {s_high}"
        );
    }
    println!("acceptance criterion 9a: PASS (monotonicity, 500 pairs)");
}

/// Criterion 9b: midpoint concavity under floor-compatible schedules.
#[test]
fn acceptance_09b_midpoint_concavity() {
    let mut rng = seeded_rng(0x9B);
    let cfg = PropagationConfig {
        eps: 1e-12,
        ..Default::default()
    };
    for case in 0..500 {
        // uniform weights with theta_l <= 1 keep the lower bounds at or below
        // the smallest reachable signal, the concave regime
        let g = random_graph(&mut rng, 20, 0.1);
        let n = g.n();
        if g.m() == 0 {
            continue;
        }
        let theta_l = rng.gen_range(0.3..1.0);
        let theta_h = theta_l + rng.gen_range(0.0..8.0);
        let (l0, h0) = (0.5, 1.5);
        let schedule = BoundSchedule::threshold_uniform(theta_l, theta_h, 0.1, l0, h0);
        // a shared support keeps the midpoint a valid initial state
        let support: Vec<u32> = (0..n as u32).filter(|_| rng.gen::<f64>() < 0.4).collect();
        let draw = |rng: &mut rand_chacha::ChaCha8Rng| {
            let mut x = vec![0.0; n];
            for &j in &support {
                x[j as usize] = rng.gen_range(l0..=h0);
            }
            StateVector::new(x)
        };
        let a = draw(&mut rng);
        let b = draw(&mut rng);
        let mid = StateVector::new(
            a.values()
                .iter()
                .zip(b.values())
                .map(|(x, y)| 0.5 * (x + y))
                .collect(),
        );
        let s = |x: &StateVector| evaluate_influence(&g, &schedule, &cfg, x).total;
        let (sa, sb, sm) = (s(&a), s(&b), s(&mid));
        assert!(
            sm >= 0.5 * (sa + sb) - 1e-8 * (1.0 + sa.abs() + sb.abs()),
            "case {case}: concavity violated: mid {sm} vs avg {}",
            0.5 * (sa + sb)
        );
    }
    println!("acceptance criterion 9b: PASS (midpoint concavity, 500 pairs)");
}

/// Criterion 9c: the backpropagated right derivative matches forward finite
/// differences when the trajectory stays away from the bounds.
#[test]
fn acceptance_09c_right_derivative_finite_difference() {
    let mut rng = seeded_rng(0x9C);
    let cfg = PropagationConfig::default();
    let mut probes = 0;
    'outer: while probes < 200 {
        let g = random_weighted_graph(&mut rng, 15);
        let n = g.n();
        let alpha = match g.mean_weight() {
            Ok(a) => a,
            Err(_) => continue,
        };
        let theta_l = rng.gen_range(0.5..2.0);
        let theta_h = theta_l + rng.gen_range(1.0..6.0);
        let (l0, h0) = (0.5, 2.0);
        let schedule = BoundSchedule::threshold_uniform(theta_l, theta_h, alpha, l0, h0);
        let x0 = random_state(&mut rng, n, 0.5, l0, h0);
        let horizon = 3u32;

        // reject trajectories that graze a bound
        let w = dense_weights(&g);
        let mut x = x0.values().to_vec();
        for t in 1..=horizon {
            let mut y = vec![0.0; n];
            for (i, row) in w.iter().enumerate() {
                for (j, yj) in y.iter_mut().enumerate() {
                    *yj += row[j] * x[i];
                }
            }
            for (j, &yj) in y.iter().enumerate() {
                let (l, h) = schedule.bounds(j, t);
                if yj > 0.0 && (yj - l).abs() < 1e-3 {
                    continue 'outer;
                }
                if let gip::propagation::UpperBound::Finite(hv) = h {
                    if (yj - hv).abs() < 1e-3 {
                        continue 'outer;
                    }
                }
            }
            x = dense_step(&w, &schedule, &x, t);
        }

        let grad = right_derivative(&g, &schedule, &cfg, &x0, horizon).unwrap();
        let slice = |x0: &StateVector| {
            let mut cur = x0.clone();
            for t in 1..=horizon {
                cur = gip_step(&g, &cur, &schedule, t);
            }
            cur.values().iter().sum::<f64>()
        };
        let base = slice(&x0);
        let delta = 1e-7;
        for _ in 0..3 {
            let j = rng.gen_range(0..n);
            let mut bumped = x0.values().to_vec();
            bumped[j] += delta;
            let fd = (slice(&StateVector::new(bumped)) - base) / delta;
            let denom = grad[j].abs().max(fd.abs());
            if denom > 0.0 {
                assert!(
                    (fd - grad[j]).abs() / denom < 1e-4,
                    "node {j}: fd {fd} vs backprop {}",
                    grad[j]
                );
            }
            probes += 1;
        }
    }
    println!(
        "acceptance criterion 9c: PASS (right derivative vs finite differences, {probes} probes)"
    );
}

/// Criterion 9d: every direct-search output is a local maximizer of its swap
/// neighborhood (exhaustive re-scan).
#[test]
fn acceptance_09d_poll_soundness() {
    let mut rng = seeded_rng(0x9D);
    for case in 0..20 {
        let g = random_weighted_graph(&mut rng, 14);
        let n = g.n();
        let alpha = match g.mean_weight() {
            Ok(a) => a,
            Err(_) => continue,
        };
        let theta_l = rng.gen_range(0.8..2.5);
        let theta_h = theta_l + rng.gen_range(0.0..6.0);
        let k = rng.gen_range(1..=3usize.min(n - 1));
        let problem = ImProblem::new(
            Graph::from_edges(
                n,
                &(0..n)
                    .flat_map(|i| {
                        g.out_edges(i)
                            .iter()
                            .map(move |&(j, w)| (i as u32, j, w))
                            .collect::<Vec<_>>()
                    })
                    .collect::<Vec<_>>(),
            )
            .unwrap(),
            BoundSchedule::threshold_uniform(theta_l, theta_h, alpha, 1.0, 1.0),
            0.0,
            1e-9,
            k,
            NodeValues::Uniform(1.0),
            NodeValues::Uniform(1.0),
        )
        .unwrap();
        let out = cds_solve(&problem, &CdsParams::default()).unwrap();
        let scores = warm_scores(&problem).unwrap();
        for cand in neighborhood(&out.z, 2, &scores) {
            let v = problem.objective_of_set(&cand).unwrap();
            assert!(
                v <= out.objective,
                "case {case}: neighbor {cand:?} with {v} beats returned {}",
                out.objective
            );
        }
    }
    println!("acceptance criterion 9d: PASS (poll soundness, 20 instances)");
}

/// Criterion 9e: the brute-force optimum is nondecreasing in the budget.
#[test]
fn acceptance_09e_budget_monotonicity() {
    for inst in 0..3u64 {
        let sbm = SbmConfig {
            n1: 6,
            n2: 6,
            p_in_1: 0.5,
            p_in_2: 0.25,
            p_12: 0.05,
            weight: 0.1,
            seed: 0x9E + inst,
        };
        let g = gip::generate_sbm(&sbm).unwrap();
        for (theta_l, theta_h) in [(1.0, 1.0), (2.0, 2.0), (1.5, 4.0)] {
            let mut last = 0.0;
            for k in 1..=12usize {
                let problem = ImProblem::threshold_uniform(
                    g.clone(),
                    theta_l,
                    theta_h,
                    0.0,
                    1e-9,
                    k,
                    1.0,
                    1.0,
                )
                .unwrap();
                let best = brute_force(&problem).unwrap().best().1;
                assert!(
                    best >= last - 1e-12,
                    "instance {inst} ({theta_l},{theta_h}): s*({k}) = {best} < {last}"
                );
                last = best;
            }
        }
    }
    println!("acceptance criterion 9e: PASS (budget saturation monotone, 3 instances)");
}

/// Criterion 10: desk-scale substitute for the large-network comparison:
/// on mid-size two-block SBMs the direct search dominates the random, degree,
/// and Katz baselines at every budget, with zero violations.
#[test]
fn acceptance_10_method_dominance() {
    let started = Instant::now();
    let mut comparisons = 0;
    for inst in 0..3u64 {
        let sbm = SbmConfig {
            n1: 100,
            n2: 100,
            p_in_1: 0.15,
            p_in_2: 0.06,
            p_12: 0.005,
            weight: 0.1,
            seed: 0x10A + inst,
        };
        let g = gip::generate_sbm(&sbm).unwrap();
        for (theta_l, theta_h) in [(4.0, 4.0), (4.0, 200.0)] {
            for k in [1usize, 2, 4, 6, 8, 10] {
                let problem = ImProblem::threshold_uniform(
                    g.clone(),
                    theta_l,
                    theta_h,
                    0.0,
                    1e-6,
                    k,
                    1.0,
                    1.0,
                )
                .unwrap();
                let cds = cds_solve(&problem, &CdsParams::default()).unwrap();
                let degree = centrality_method(&problem, CentralityMethod::Degree).unwrap();
                let katz = centrality_method(&problem, CentralityMethod::Katz).unwrap();
                let mut random_best = f64::NEG_INFINITY;
                for rep in 0..10u64 {
                    let out = random_sampling(&problem, 100, 0x5EED ^ inst ^ (rep << 32)).unwrap();
                    random_best = random_best.max(out.objective);
                }
                for (name, value) in [
                    ("degree", degree.objective),
                    ("katz", katz.objective),
                    ("random", random_best),
                ] {
                    assert!(
                        cds.objective >= value,
                        "instance {inst} ({theta_l},{theta_h}) k={k}: cds {} < {name} {value}",
                        cds.objective
                    );
                    comparisons += 1;
                }
            }
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    assert!(
        elapsed < 600.0,
        "criterion 10 exceeded 10 min: {elapsed:.0} s"
    );
    println!(
        "acceptance criterion 10: PASS ({comparisons} comparisons, zero violations, {elapsed:.0} s)"
    );
}

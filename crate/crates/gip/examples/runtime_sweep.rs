//! Scaling behavior of the direct search on ER graphs of fixed mean degree:
//! evaluation counts per feasible neighbor stay roughly flat as the network
//! grows, so the search cost tracks the neighborhood size rather than the
//! full combinatorial space.

use gip::experiment::{run_runtime_sweep, RunOptions, RuntimeSweepConfig};

fn main() {
    let cfg = RuntimeSweepConfig {
        sizes: vec![50, 100, 200, 400],
        mean_degrees: vec![5.0, 10.0],
        theta_pairs: vec![(2.0, 8.0)],
        k: 3,
        weight: 0.1,
        l0: 1.0,
        h0: 1.0,
        gamma: 0.0,
        eps: 1e-6,
        seed: 11,
        samples: Some(10),
    };
    let out = run_runtime_sweep(&cfg, RunOptions::default()).unwrap();

    println!("direct search on ER graphs, k = 3, theta = (2, 8), 10 samples per point\n");
    println!(
        "{:>6} {:>8} {:>14} {:>14} {:>20}",
        "n", "degree", "mean evals", "sd evals", "evals per neighbor"
    );
    for &n in &cfg.sizes {
        for &d in &cfg.mean_degrees {
            let get = |metric: &str| {
                out.rows
                    .iter()
                    .find(|r| {
                        r.replicate.is_none()
                            && r.metric == metric
                            && r.params[0].1 == n.to_string()
                            && r.params[1].1 == d.to_string()
                    })
                    .map(|r| r.value)
                    .unwrap_or(f64::NAN)
            };
            println!(
                "{n:>6} {d:>8} {:>14.1} {:>14.1} {:>20.3}",
                get("mean_n_evals"),
                get("sd_n_evals"),
                get("mean_evals_per_neighbor"),
            );
        }
    }
}

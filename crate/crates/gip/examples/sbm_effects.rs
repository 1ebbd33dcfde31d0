//! The community effect on a two-block SBM: with the loosest lower bound a
//! pair of seeds spreads the same expected one-step influence whether the
//! seeds share a community or not, while a bound requiring two co-active
//! neighbors strongly favors the same-community pair. Sampled means are
//! compared against the closed-form expectations.

use gip::experiment::{run_sbm_effects, RunOptions, SbmEffectsConfig};

fn main() {
    let mut cfg = SbmEffectsConfig::paper_default(1);
    cfg.samples = Some(300);
    let out = run_sbm_effects(&cfg, RunOptions::default()).unwrap();

    let get = |metric: &str, pair: &str, side: &str, tl: f64| -> Option<f64> {
        out.rows
            .iter()
            .find(|r| {
                r.replicate.is_none()
                    && r.metric == metric
                    && r.params[0].1 == pair
                    && r.params[1].1 == side
                    && r.params[2].1 == tl.to_string()
            })
            .map(|r| r.value)
    };

    println!("SBM(0.9, 0.1), 25 + 25 nodes, weight 0.1, 300 samples");
    println!("one-step influence, seed pair {{0,1}} (same community) vs {{0,25}} (split):\n");
    for tl in [1.0, 2.0] {
        println!("theta_l = {tl}:");
        for side in ["same", "split"] {
            let mean = get("mean_s1_increment", "k2", side, tl).unwrap();
            let se = get("se_s1_increment", "k2", side, tl).unwrap();
            let analytic = get("analytic_s1_corrected", "k2", side, tl).unwrap();
            let plugin = get("analytic_s1_plugin", "k2", side, tl).unwrap();
            println!(
                "  {side:>5}: sampled {mean:.3} +- {se:.3}, analytic {analytic:.3} (idealized {plugin:.3})"
            );
        }
    }
    println!("\nfour-seed pair {{0,1,2,3}} vs {{0,1,25,26}}, overall influence ratio:");
    for tl in [1.0, 2.0] {
        let ratio = out
            .rows
            .iter()
            .find(|r| {
                r.metric == "delta_ratio"
                    && r.params[0].1 == "k4"
                    && r.params[2].1 == tl.to_string()
            })
            .map(|r| r.value);
        println!("  theta_l = {tl}: delta = {:?}", ratio.unwrap());
    }
}

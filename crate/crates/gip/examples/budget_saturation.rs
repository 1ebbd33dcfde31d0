//! How much budget is worth buying: the brute-force optimum as a fraction of
//! its full-budget ceiling, per budget size. Collapsed bounds produce a step
//! shape (extra seeds only matter in groups), the loose lower bound a nearly
//! linear climb.

use gip::experiment::{run_budget_saturation, BudgetSaturationConfig, RunOptions};

fn main() {
    let cfg = BudgetSaturationConfig::paper_default(3);
    let out = run_budget_saturation(&cfg, RunOptions::default()).unwrap();

    let pairs = cfg.theta_pairs.clone();
    print!("{:>3}", "k");
    for (tl, th) in &pairs {
        print!("  ({tl},{th})");
    }
    println!();
    for k in 1..=20usize {
        print!("{k:>3}");
        for (tl, th) in &pairs {
            let ratio = out
                .rows
                .iter()
                .find(|r| {
                    r.metric == "ratio"
                        && r.params[0].1 == tl.to_string()
                        && r.params[1].1 == th.to_string()
                        && r.params[2].1 == k.to_string()
                })
                .map(|r| r.value)
                .unwrap_or(f64::NAN);
            print!("  {ratio:>5.3}");
        }
        println!();
    }
    println!("\nvalues are s*(k) / s*(n) on a 20-node two-block SBM");
}

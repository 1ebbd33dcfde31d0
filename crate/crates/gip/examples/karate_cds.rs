//! Seed selection on the karate club network: the customized direct search
//! (warm start at the Katz ranking, swap polls, community restarts over the
//! two club factions) against the brute-force ranking of all C(34,3) = 5984
//! seed sets, across a grid of threshold parameters.

use gip::im::{
    accuracy, brute_force, cds_solve, rank_metric, CdsParams, ImProblem, Restart, TwoBlockPartition,
};
use gip::{load_edge_list, Graph};

fn karate() -> Graph {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/karate_club.txt");
    let file = std::fs::File::open(path).expect("karate fixture");
    let raw = load_edge_list(std::io::BufReader::new(file), 0.1, true).unwrap();
    // normalize indices to the numeric labels
    let labels = raw.labels().unwrap();
    let ids: Vec<u32> = labels.iter().map(|l| l.parse().unwrap()).collect();
    let mut edges = Vec::new();
    for i in 0..raw.n() {
        for &(j, w) in raw.out_edges(i) {
            edges.push((ids[i], ids[j as usize], w));
        }
    }
    Graph::from_edges(raw.n(), &edges).unwrap()
}

fn factions() -> TwoBlockPartition {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/karate_factions.txt");
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let parse = |l: &str| l.split_whitespace().map(|t| t.parse().unwrap()).collect();
    TwoBlockPartition {
        block1: parse(lines.next().unwrap()),
        block2: parse(lines.next().unwrap()),
    }
}

fn main() {
    let g = karate();
    println!("karate club: {} members, {} directed edges", g.n(), g.m());
    let params = CdsParams {
        restart: Restart::Community(factions()),
        search_enabled: true,
        ..Default::default()
    };

    println!(
        "{:>7} {:>7} {:>14} {:>9} {:>8} {:>8}",
        "theta_l", "theta_h", "seeds", "objective", "tau", "evals"
    );
    for theta_l in [1.0f64, 2.0, 3.0] {
        for theta_h in [theta_l, 4.0, 8.0] {
            if theta_h < theta_l {
                continue;
            }
            let problem =
                ImProblem::threshold_uniform(g.clone(), theta_l, theta_h, 0.0, 1e-6, 3, 1.0, 1.0)
                    .unwrap();
            let table = brute_force(&problem).unwrap();
            let out = cds_solve(&problem, &params).unwrap();
            let tau = accuracy(out.objective, &table);
            let phi = rank_metric(&out.seed_set, &table).unwrap();
            println!(
                "{theta_l:>7} {theta_h:>7} {:>14} {:>9.4} {tau:>8.4} {:>8}  (rank {:.0} of {})",
                format!("{:?}", out.seed_set),
                out.objective,
                out.n_evals,
                phi * table.len() as f64,
                table.len()
            );
        }
    }
}

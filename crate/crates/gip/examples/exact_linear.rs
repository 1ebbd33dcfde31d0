//! In the linear regime the seed-selection problem has a closed-form answer:
//! rank nodes by Katz centrality (weighted by their maximum initial value)
//! and take the top k. This example verifies the optimality against a full
//! enumeration and shows the centrality scores behind the choice.

use gip::im::{brute_force, exact_linear_solution, ImProblem};
use gip::propagation::{BoundSchedule, NodeValues};
use gip::{generate_er, katz_centrality};

fn main() {
    let g = generate_er(14, 0.3, 0.08, 7).unwrap();
    let gamma = 0.1;
    let c = katz_centrality(&g, 1.0 - gamma, 1e-12, 100_000).unwrap();
    let mut ranked: Vec<(usize, f64)> = c.values.iter().copied().enumerate().collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1));
    println!("Katz scores (factor {}):", 1.0 - gamma);
    for (node, score) in ranked.iter().take(5) {
        println!("  node {node}: {score:.6}");
    }

    let problem = ImProblem::new(
        g,
        BoundSchedule::EicLimit,
        gamma,
        1e-12,
        3,
        NodeValues::Uniform(1.0),
        NodeValues::Uniform(1.0),
    )
    .unwrap();
    let exact = exact_linear_solution(&problem).unwrap();
    let table = brute_force(&problem).unwrap();
    println!(
        "\nexact solution: seeds {:?}, closed-form objective {:.6}",
        exact.seed_set, exact.objective
    );
    println!(
        "brute force:   seeds {:?}, objective {:.6} over {} sets",
        table.best().0,
        table.best().1,
        table.len()
    );
    let evaluated = problem.objective_of_set(&exact.seed_set).unwrap();
    assert_eq!(evaluated, table.best().1);
    println!("the Katz-ranked set attains the enumerated optimum exactly");
}

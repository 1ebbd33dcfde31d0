//! Command-line front end: network generation, propagation runs, centrality
//! scores, seed-set maximization, and the config-driven experiment harness.
//!
//! Exit codes: 0 on success, 2 on validation errors, 3 when a run failed to
//! converge and `--allow-partial` was not given.

use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gip::experiment::{schema, write_csv, ExperimentConfig, ExperimentError, RunOptions};
use gip::im::{
    brute_force, cds_solve, centrality_method, random_sampling, CdsParams, CentralityMethod,
    ImProblem, Restart, SeedVector, TwoBlockPartition,
};
use gip::propagation::{
    evaluate_influence, BoundSchedule, NodeValues, PropagationConfig, StateVector,
};
use gip::{
    degree_centrality, generate_er, generate_lattice, generate_sbm, katz_centrality,
    load_edge_list, write_edge_list, CompositeConfig, Graph, SbmConfig,
};

#[derive(Parser)]
#[command(
    name = "gipmax",
    version,
    about = "Information propagation and influence maximization on weighted directed networks"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a synthetic network and write it as an edge list.
    Generate(GenerateArgs),
    /// Run the propagation dynamics from a seed set.
    Propagate(PropagateArgs),
    /// Compute per-node centrality scores.
    Centrality(CentralityArgs),
    /// Solve the budget-constrained seed-selection problem.
    Maximize(MaximizeArgs),
    /// Run a config-driven experiment and write CSV/JSON outputs.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Edge-list file: `src dst [weight]` per line, `#` comments.
    #[arg(long)]
    input: PathBuf,
    /// Add the reverse edge for every line.
    #[arg(long)]
    bidirectional: bool,
    /// Weight for lines that omit one.
    #[arg(long, default_value_t = 0.1)]
    default_weight: f64,
}

impl InputArgs {
    fn load(&self) -> Result<Graph, CliError> {
        let file = std::fs::File::open(&self.input).map_err(|e| {
            CliError::validation(format!("cannot open {}: {e}", self.input.display()))
        })?;
        Ok(load_edge_list(
            std::io::BufReader::new(file),
            self.default_weight,
            self.bidirectional,
        )?)
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[command(subcommand)]
    kind: GenerateKind,
}

#[derive(Subcommand)]
enum GenerateKind {
    /// Two-block stochastic block model with bidirectional edges.
    Sbm {
        #[arg(long)]
        n1: usize,
        #[arg(long)]
        n2: usize,
        #[arg(long)]
        p_in_1: f64,
        #[arg(long)]
        p_in_2: f64,
        #[arg(long)]
        p_12: f64,
        #[arg(long, default_value_t = 0.1)]
        weight: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Erdős–Rényi graph with bidirectional edges.
    Er {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0.1)]
        weight: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Ring lattice of even degree.
    Lattice {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 0.1)]
        weight: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Ring lattice joined to an ER part by sparse bridges.
    Composite {
        #[arg(long)]
        lattice_size: usize,
        #[arg(long)]
        lattice_degree: usize,
        #[arg(long)]
        er_prob: f64,
        #[arg(long)]
        bridge_prob: f64,
        #[arg(long, default_value_t = 0.1)]
        weight: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ModelArgs {
    /// Lower bound threshold of the threshold-type schedule.
    #[arg(long, default_value_t = 2.0)]
    theta_l: f64,
    /// Upper bound threshold of the threshold-type schedule.
    #[arg(long, default_value_t = 4.0)]
    theta_h: f64,
    /// Use the pure linear dynamics instead of threshold-type bounds.
    #[arg(long)]
    eic: bool,
    #[arg(long, default_value_t = 1.0)]
    l0: f64,
    #[arg(long, default_value_t = 1.0)]
    h0: f64,
    #[arg(long, default_value_t = 0.0)]
    gamma: f64,
    #[arg(long, default_value_t = 1e-6)]
    eps: f64,
    #[arg(long, default_value_t = 10_000)]
    t_max: u32,
}

impl ModelArgs {
    fn schedule(&self, g: &Graph) -> Result<BoundSchedule, CliError> {
        if self.eic {
            Ok(BoundSchedule::EicLimit)
        } else {
            let alpha = g.mean_weight()?;
            Ok(BoundSchedule::threshold_uniform(
                self.theta_l,
                self.theta_h,
                alpha,
                self.l0,
                self.h0,
            ))
        }
    }

    fn propagation_config(&self, record: bool) -> Result<PropagationConfig, CliError> {
        let cfg = PropagationConfig {
            gamma: self.gamma,
            eps: self.eps,
            t_max: self.t_max,
            record_trajectory: record,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct PropagateArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    model: ModelArgs,
    /// Comma-separated seed nodes (labels from the edge list).
    #[arg(long)]
    seeds: String,
    /// Write the `t,node,x` trajectory CSV here.
    #[arg(long)]
    trajectory_out: Option<PathBuf>,
    /// Write the JSON summary here instead of stdout.
    #[arg(long)]
    summary_out: Option<PathBuf>,
    /// Include per-node influence in the summary.
    #[arg(long)]
    per_node: bool,
    /// Report partial results instead of failing on non-convergence.
    #[arg(long)]
    allow_partial: bool,
}

#[derive(Args)]
struct CentralityArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Score to compute.
    #[arg(long, value_parser = ["katz", "degree"], default_value = "katz")]
    kind: String,
    /// Katz attenuation factor.
    #[arg(long, default_value_t = 1.0)]
    factor: f64,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 200_000)]
    max_iter: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MaximizeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, value_parser = ["cds", "brute", "random", "degree", "katz"], default_value = "cds")]
    method: String,
    /// Budget: number of seed nodes.
    #[arg(long)]
    k: usize,
    /// Sufficient-improvement factor of the direct search.
    #[arg(long, default_value_t = 0.1)]
    zeta: f64,
    /// Decay of the sufficient-improvement factor.
    #[arg(long, default_value_t = 0.5)]
    delta: f64,
    /// Poll neighborhood radius (even).
    #[arg(long, default_value_t = 2)]
    radius: usize,
    /// Restart strategy: `community` polls again from budget splits.
    #[arg(long, value_parser = ["community"])]
    restart: Option<String>,
    /// Partition file for community restart: two lines of node labels.
    #[arg(long)]
    partition: Option<PathBuf>,
    /// First block of the partition as an index boundary (nodes 0..SPLIT).
    #[arg(long)]
    split: Option<usize>,
    /// Draws for the random-sampling method.
    #[arg(long, default_value_t = 100)]
    n_s: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for CSV and summary files.
    #[arg(long)]
    out: PathBuf,
    /// Run the full published sample counts.
    #[arg(long)]
    paper_scale: bool,
    /// Worker threads (also via GIPMAX_THREADS).
    #[arg(long)]
    threads: Option<usize>,
    /// Tolerate non-converged replicates.
    #[arg(long)]
    allow_partial: bool,
    /// Also write a gnuplot stub describing the data layout.
    #[arg(long)]
    gnuplot_stub: bool,
}

#[derive(Debug)]
enum CliError {
    Validation(String),
    NonConvergence(String),
}

impl CliError {
    fn validation(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }
}

impl<E: Into<ExperimentError>> From<E> for CliError {
    fn from(e: E) -> Self {
        let e: ExperimentError = e.into();
        if e.is_nonconvergence() {
            CliError::NonConvergence(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

fn resolve_nodes(g: &Graph, spec: &str) -> Result<Vec<u32>, CliError> {
    let mut out = Vec::new();
    for tok in spec.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let idx = match g.labels() {
            Some(labels) => labels.iter().position(|l| l == tok).map(|i| i as u32),
            None => tok.parse::<u32>().ok().filter(|&i| (i as usize) < g.n()),
        };
        match idx {
            Some(i) => out.push(i),
            None => return Err(CliError::validation(format!("unknown node `{tok}`"))),
        }
    }
    if out.is_empty() {
        return Err(CliError::validation("empty node list"));
    }
    Ok(out)
}

fn open_out(path: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    match path {
        Some(p) => {
            let f = std::fs::File::create(p)
                .map_err(|e| CliError::validation(format!("cannot create {}: {e}", p.display())))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(std::io::stdout().lock())),
    }
}

fn run_generate(args: GenerateArgs) -> Result<(), CliError> {
    let (graph, out) = match args.kind {
        GenerateKind::Sbm {
            n1,
            n2,
            p_in_1,
            p_in_2,
            p_12,
            weight,
            seed,
            out,
        } => (
            generate_sbm(&SbmConfig {
                n1,
                n2,
                p_in_1,
                p_in_2,
                p_12,
                weight,
                seed,
            })?,
            out,
        ),
        GenerateKind::Er {
            n,
            p,
            weight,
            seed,
            out,
        } => (generate_er(n, p, weight, seed)?, out),
        GenerateKind::Lattice { n, d, weight, out } => (generate_lattice(n, d, weight)?, out),
        GenerateKind::Composite {
            lattice_size,
            lattice_degree,
            er_prob,
            bridge_prob,
            weight,
            seed,
            out,
        } => (
            CompositeConfig {
                lattice_size,
                lattice_degree,
                er_prob,
                bridge_prob,
                weight,
                seed,
            }
            .build()?,
            out,
        ),
    };
    let mut w = open_out(&out)?;
    write_edge_list(&graph, &mut w).map_err(|e| CliError::validation(e.to_string()))?;
    Ok(())
}

fn run_propagate(args: PropagateArgs) -> Result<(), CliError> {
    let g = args.input.load()?;
    let seeds = resolve_nodes(&g, &args.seeds)?;
    let schedule = args.model.schedule(&g)?;
    let cfg = args.model.propagation_config(true)?;
    let x0 = StateVector::from_seeds(g.n(), &seeds, &NodeValues::Uniform(args.model.h0));
    let res = evaluate_influence(&g, &schedule, &cfg, &x0);

    if let Some(path) = &args.trajectory_out {
        let mut w =
            csv::Writer::from_writer(std::fs::File::create(path).map_err(|e| {
                CliError::validation(format!("cannot create {}: {e}", path.display()))
            })?);
        w.write_record(["t", "node", "x"])
            .map_err(ExperimentError::from)?;
        for (t, states) in res.trajectory.as_ref().unwrap() {
            for &(j, x) in states {
                w.write_record([t.to_string(), g.label(j as usize), x.to_string()])
                    .map_err(ExperimentError::from)?;
            }
        }
        w.flush().map_err(|e| CliError::validation(e.to_string()))?;
    }

    let mut summary = serde_json::json!({
        "total": res.total,
        "steps": res.steps,
        "converged": res.converged,
    });
    if args.per_node {
        summary["per_node"] = serde_json::json!(res.per_node);
    }
    let mut w = open_out(&args.summary_out)?;
    writeln!(
        w,
        "{}",
        serde_json::to_string_pretty(&summary).map_err(ExperimentError::from)?
    )
    .map_err(|e| CliError::validation(e.to_string()))?;

    if !res.converged && !args.allow_partial {
        return Err(CliError::NonConvergence(format!(
            "propagation hit the iteration cap {}",
            cfg.t_max
        )));
    }
    Ok(())
}

fn run_centrality(args: CentralityArgs) -> Result<(), CliError> {
    let g = args.input.load()?;
    let c = match args.kind.as_str() {
        "degree" => degree_centrality(&g),
        _ => katz_centrality(&g, args.factor, args.tol, args.max_iter)?,
    };
    let mut w = csv::Writer::from_writer(open_out(&args.out)?);
    w.write_record(["node", "score"])
        .map_err(ExperimentError::from)?;
    for (i, v) in c.values.iter().enumerate() {
        w.write_record([g.label(i), v.to_string()])
            .map_err(ExperimentError::from)?;
    }
    w.flush().map_err(|e| CliError::validation(e.to_string()))?;
    Ok(())
}

fn load_partition(g: &Graph, args: &MaximizeArgs) -> Result<TwoBlockPartition, CliError> {
    if let Some(split) = args.split {
        if split == 0 || split >= g.n() {
            return Err(CliError::validation(format!(
                "--split {split} outside 1..{}",
                g.n()
            )));
        }
        return Ok(TwoBlockPartition::from_split(g.n(), split));
    }
    let path = args.partition.as_ref().ok_or_else(|| {
        CliError::validation("--restart community needs --partition <file> or --split <n1>")
    })?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::validation(format!("cannot read {}: {e}", path.display())))?;
    let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    if lines.len() != 2 {
        return Err(CliError::validation(
            "partition file must hold exactly two lines of node labels",
        ));
    }
    let parse =
        |line: &str| resolve_nodes(g, &line.split_whitespace().collect::<Vec<_>>().join(","));
    let partition = TwoBlockPartition {
        block1: parse(lines[0])?,
        block2: parse(lines[1])?,
    };
    partition.validate(g.n())?;
    Ok(partition)
}

fn run_maximize(args: MaximizeArgs) -> Result<(), CliError> {
    let g = args.input.load()?;
    let labels: Vec<String> = (0..g.n()).map(|i| g.label(i)).collect();
    let schedule = args.model.schedule(&g)?;
    let mut problem = ImProblem::new(
        g,
        schedule,
        args.model.gamma,
        args.model.eps,
        args.k,
        NodeValues::Uniform(args.model.l0),
        NodeValues::Uniform(args.model.h0),
    )?;
    problem.t_max = args.model.t_max;

    let outcome = match args.method.as_str() {
        "brute" => {
            let started = std::time::Instant::now();
            let table = brute_force(&problem)?;
            let (set, objective) = table.best();
            let set = set.to_vec();
            gip::im::SolverOutcome {
                z: SeedVector::from_support(problem.n(), &set),
                seed_set: set,
                objective,
                n_evals: table.len() as u64,
                iterations: 1,
                elapsed_seconds: started.elapsed().as_secs_f64(),
            }
        }
        "random" => random_sampling(&problem, args.n_s, args.seed)?,
        "degree" => centrality_method(&problem, CentralityMethod::Degree)?,
        "katz" => centrality_method(&problem, CentralityMethod::Katz)?,
        _ => {
            let restart = match args.restart.as_deref() {
                Some("community") => Restart::Community(load_partition(&problem.graph, &args)?),
                _ => Restart::None,
            };
            let params = CdsParams {
                zeta: args.zeta,
                delta: args.delta,
                d: args.radius,
                search_enabled: !matches!(restart, Restart::None),
                restart,
            };
            cds_solve(&problem, &params)?
        }
    };

    let seed_labels: Vec<&str> = outcome
        .seed_set
        .iter()
        .map(|&j| labels[j as usize].as_str())
        .collect();
    let report = serde_json::json!({
        "method": args.method,
        "seed_set": seed_labels,
        "objective": outcome.objective,
        "n_evals": outcome.n_evals,
        "elapsed": outcome.elapsed_seconds,
    });
    let mut w = open_out(&args.out)?;
    writeln!(
        w,
        "{}",
        serde_json::to_string_pretty(&report).map_err(ExperimentError::from)?
    )
    .map_err(|e| CliError::validation(e.to_string()))?;
    Ok(())
}

fn run_experiment(args: ExperimentArgs) -> Result<(), CliError> {
    let threads = args.threads.or_else(|| {
        std::env::var("GIPMAX_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(n) = threads {
        // fails harmlessly if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::validation(format!("cannot read {}: {e}", args.config.display())))?;
    let config: ExperimentConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::validation(format!("bad config: {e}")))?;
    let opts = RunOptions {
        paper_scale: args.paper_scale,
        allow_partial: args.allow_partial,
    };
    let output = config.run(opts)?;

    std::fs::create_dir_all(&args.out)
        .map_err(|e| CliError::validation(format!("cannot create {}: {e}", args.out.display())))?;
    let csv_path = args.out.join(format!("{}.csv", output.kind));
    let file = std::fs::File::create(&csv_path)
        .map_err(|e| CliError::validation(format!("cannot create {}: {e}", csv_path.display())))?;
    write_csv(BufWriter::new(file), output.kind, &output.rows)?;

    let summary = serde_json::json!({
        "kind": output.kind,
        "rows": output.rows.len(),
        "nonconverged": output.nonconverged,
        "paper_scale": args.paper_scale,
        "details": output.summary,
    });
    std::fs::write(
        args.out.join("summary.json"),
        serde_json::to_string_pretty(&summary).map_err(ExperimentError::from)?,
    )
    .map_err(|e| CliError::validation(e.to_string()))?;

    if args.gnuplot_stub {
        let cols = schema(output.kind);
        let mut stub = String::new();
        stub.push_str("# data layout stub; plotting is left to external tools\n");
        stub.push_str("set datafile separator comma\n");
        stub.push_str(&format!(
            "# columns: 1=kind 2=replicate {} {}=metric {}=value\n",
            cols.iter()
                .enumerate()
                .map(|(i, c)| format!("{}={}", i + 3, c))
                .collect::<Vec<_>>()
                .join(" "),
            cols.len() + 3,
            cols.len() + 4,
        ));
        stub.push_str(&format!("# plot '{}.csv' using ...\n", output.kind));
        std::fs::write(args.out.join(format!("{}.gp", output.kind)), stub)
            .map_err(|e| CliError::validation(e.to_string()))?;
    }

    if output.nonconverged > 0 && !args.allow_partial {
        return Err(CliError::NonConvergence(format!(
            "{} replicate(s) did not converge",
            output.nonconverged
        )));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Generate(a) => run_generate(a),
        Cmd::Propagate(a) => run_propagate(a),
        Cmd::Centrality(a) => run_centrality(a),
        Cmd::Maximize(a) => run_maximize(a),
        Cmd::Experiment(a) => run_experiment(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::NonConvergence(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

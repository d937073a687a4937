//! Batch front-end: graph generation, circuit runs, state decomposition
//! reports, classical simulation, hardness Monte Carlo, the walk demo, and
//! a one-shot invariant verification sweep.
//!
//! Exit codes: 0 all requested assertions passed, 1 an assertion failed,
//! 2 usage error, 3 internal defect.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use welded_core::address::AddressCodec;
use welded_core::circuit::Circuit;
use welded_core::classical::{simulate_classical, AddressSubtree};
use welded_core::decomposition::{decompose_run, success_probability, verify_decomposition};
use welded_core::generator::random_rooted_circuit;
use welded_core::graph::{build_canonical, validate_welded_tree, RawGraph, WeldedTree};
use welded_core::hardness::{
    mc_desirable, mc_exit_or_cycle_path, mc_exit_or_cycle_subtree, mc_subtree_sampler,
};
use welded_core::oracle::{GraphView, Oracle};
use welded_core::parallel::resolve_workers;
use welded_core::simulator::{run_trace, SimContext, SimOptions};
use welded_core::walk::{classical_baseline_canonical, column_walk_series};
use welded_core::{Color, RngStream};

#[derive(Parser)]
#[command(
    name = "welded",
    version,
    about = "welded tree graphs, oracles, and hardness experiments"
)]
struct Cli {
    /// Worker threads for trial sweeps (default: WELDED_WORKERS or 1).
    /// Results are identical for every worker count.
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a canonical welded tree and write it as JSON.
    GenGraph {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Re-validate the constructed graph exhaustively.
        #[arg(long)]
        validate: bool,
    },
    /// Generate a random compliant circuit and write it as JSON.
    GenCircuit {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        p: u32,
        #[arg(long, default_value_t = 3)]
        workspace: u32,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a circuit and print per-step support and norm.
    RunCircuit {
        #[arg(long)]
        circuit: PathBuf,
        #[command(flatten)]
        graph: GraphSource,
        #[arg(long, value_enum, default_value_t = SpaceArg::Vertex)]
        space: SpaceArg,
    },
    /// Split a run into good/bad/ugly components; CSV per step.
    Decompose {
        #[arg(long)]
        circuit: PathBuf,
        #[command(flatten)]
        graph: GraphSource,
    },
    /// Classically simulate a circuit; one JSON line per trial.
    SimulateClassical {
        #[arg(long)]
        circuit: PathBuf,
        #[command(flatten)]
        graph: GraphSource,
        #[arg(long, default_value_t = 1)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Monte Carlo hardness experiments over permuted welds; CSV.
    HardnessMc {
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum)]
        mode: McMode,
        /// Tuple length for path/desirable modes (a repeat-free sequence is
        /// derived from the seed), or subtree size for subtree mode.
        #[arg(long)]
        length: Option<u32>,
        /// Fixed address subtree (JSON list of color strings) for subtree mode.
        #[arg(long)]
        tree: Option<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Exit probability of the column walk over time; CSV `t,p_exit`.
    WalkDemo {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 100.0)]
        tmax: f64,
        /// Integrator step; at this default, halving it moves every
        /// reported probability by less than 1e-9 up to n = 10, t = 100.
        #[arg(long, default_value_t = 0.002)]
        dt: f64,
        /// Also report a classical search baseline with this query budget.
        #[arg(long)]
        baseline_queries: Option<u64>,
        #[arg(long, default_value_t = 1000)]
        baseline_trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Sweep random circuits and verify the exact per-step identities and
    /// conservation laws of the state decomposition; exit 0 iff all hold.
    VerifyLemmas {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 20)]
        circuits: u64,
        #[arg(long, default_value_t = 10)]
        p: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct GraphSource {
    /// Load a graph written by gen-graph.
    #[arg(long, conflicts_with_all = ["n", "seed_graph"])]
    graph: Option<PathBuf>,
    /// Or build the canonical graph of this size...
    #[arg(long)]
    n: Option<u32>,
    /// ...from this seed.
    #[arg(long, default_value_t = 0)]
    seed_graph: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum SpaceArg {
    Vertex,
    Address,
}

#[derive(Clone, Copy, ValueEnum)]
enum McMode {
    Path,
    Subtree,
    Desirable,
}

enum Failure {
    Usage(String),
    Internal(String),
}

impl From<welded_core::Error> for Failure {
    fn from(e: welded_core::Error) -> Self {
        match e {
            // Violated preconditions on user-supplied inputs are usage
            // errors; everything else is a defect.
            welded_core::Error::Precondition(_)
            | welded_core::Error::InvalidCircuit(_)
            | welded_core::Error::InvalidGraph(_)
            | welded_core::Error::BadSubtree(_)
            | welded_core::Error::GenuinenessViolation { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Internal(e.to_string()),
        }
    }
}

type RunResult = Result<bool, Failure>;

fn read_to_string(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn load_graph(src: &GraphSource) -> Result<WeldedTree, Failure> {
    match (&src.graph, src.n) {
        (Some(path), None) => {
            let raw: RawGraph = serde_json::from_str(&read_to_string(path)?)
                .map_err(|e| Failure::Usage(format!("bad graph file: {e}")))?;
            Ok(WeldedTree::from_raw(&raw)?)
        }
        (None, Some(n)) => Ok(build_canonical(n, src.seed_graph)?),
        _ => Err(Failure::Usage("pass exactly one of --graph or --n".into())),
    }
}

fn load_circuit(path: &Path) -> Result<Circuit, Failure> {
    Circuit::from_json(&read_to_string(path)?).map_err(Into::into)
}

fn header(seed: u64, n: u32, p_max: u32, workers: usize) {
    println!(
        "# welded {} | seed={seed} n={n} p_max={p_max} workers={workers}",
        env!("CARGO_PKG_VERSION")
    );
}

/// Derive a repeat-free tuple of the requested length from a seed; the
/// first color avoids the one missing at the entrance so the walk begins on
/// a real edge.
fn derive_tuple(g: &WeldedTree, length: u32, seed: u64) -> Vec<Color> {
    let mut rng = RngStream::derive(seed, "tuple", 0);
    let missing = g.missing_color();
    let mut t: Vec<Color> = Vec::with_capacity(length as usize);
    for i in 0..length {
        let choices: Vec<Color> = welded_core::color::COLORS
            .into_iter()
            .filter(|&c| t.last() != Some(&c) && (i > 0 || c != missing))
            .collect();
        t.push(*rng.choose(&choices));
    }
    t
}

fn run(cli: Cli) -> RunResult {
    let workers = resolve_workers(cli.workers);
    match cli.command {
        Command::GenGraph { n, seed, out, validate } => {
            header(seed, n, 0, workers);
            let g = build_canonical(n, seed)?;
            if validate {
                let report = validate_welded_tree(&g);
                if !report.is_ok() {
                    return Err(Failure::Internal(format!(
                        "constructed graph invalid: {report}"
                    )));
                }
                println!("# validation ok");
            }
            let json = serde_json::to_string_pretty(&g.to_raw())
                .map_err(|e| Failure::Internal(e.to_string()))?;
            std::fs::write(&out, json + "\n")
                .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", out.display())))?;
            println!("# wrote {} ({} vertices)", out.display(), g.vertex_count());
            Ok(true)
        }
        Command::GenCircuit { n, p, workspace, seed, out } => {
            header(seed, n, p, workers);
            let g = build_canonical(n, RngStream::derive(seed, "graph", 0).next_u64())?;
            let view = GraphView::new(&g);
            let mut rng = RngStream::derive(seed, "circuit", 0);
            let c = random_rooted_circuit(&view, p, workspace, &mut rng)?;
            std::fs::write(&out, c.to_json() + "\n")
                .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", out.display())))?;
            println!("# wrote {} ({} gates)", out.display(), c.gates.len());
            Ok(true)
        }
        Command::RunCircuit { circuit, graph, space } => {
            let g = load_graph(&graph)?;
            let c = load_circuit(&circuit)?;
            header(graph.seed_graph, g.n(), c.p, workers);
            let view = GraphView::new(&g);
            let codec = AddressCodec::new(c.p.max(2), g.missing_color())?;
            let ctx = match space {
                SpaceArg::Vertex => SimContext::Vertex(view),
                SpaceArg::Address => SimContext::Address(codec),
            };
            let states = run_trace(&c, &ctx, &SimOptions::default())?;
            println!("step,support,norm");
            for (i, s) in states.iter().enumerate() {
                println!("{i},{},{}", s.support_len(), s.norm());
            }
            let last = states.last().expect("nonempty");
            let mut top: Vec<_> = last.iter().collect();
            top.sort_by(|a, b| b.1.norm_sqr().total_cmp(&a.1.norm_sqr()));
            println!("# final state, largest amplitudes:");
            for (config, amp) in top.into_iter().take(8) {
                let regs: Vec<String> = config.regs.iter().map(|r| format!("{r:x}")).collect();
                println!("#   [{}] w={:b} amp={amp}", regs.join(" "), config.work);
            }
            Ok(true)
        }
        Command::Decompose { circuit, graph } => {
            let g = load_graph(&graph)?;
            let c = load_circuit(&circuit)?;
            header(graph.seed_graph, g.n(), c.p, workers);
            let view = GraphView::new(&g);
            let opts = SimOptions::default();
            // Surface oracle-gate precondition violations before splitting:
            // the decomposition itself assumes a compliant circuit.
            run_trace(&c, &SimContext::Vertex(view), &opts)?;
            let d = decompose_run(&c, &view, &opts)?;
            let report = verify_decomposition(&d, &view, &opts)?;
            println!(
                "step,phi_good_sq,phi_bad_sq,phi_ugly_sq,psi_good_sq,psi_bad_sq,psi_ugly_sq,max_identity_residual"
            );
            for row in &report.rows {
                println!(
                    "{},{},{},{},{},{},{},{}",
                    row.step,
                    row.phi_good_sq,
                    row.phi_bad_sq,
                    row.phi_ugly_sq,
                    row.psi_good_sq,
                    row.psi_bad_sq,
                    row.psi_ugly_sq,
                    row.identity_residual
                        .max(row.conservation_residual)
                        .max(row.transcript_residual)
                        .max(row.norm_match_residual)
                );
            }
            println!("# success_probability={}", success_probability(&d, &view));
            Ok(true)
        }
        Command::SimulateClassical { circuit, graph, trials, seed } => {
            let g = load_graph(&graph)?;
            let c = load_circuit(&circuit)?;
            header(seed, g.n(), c.p, workers);
            let opts = SimOptions::default();
            for trial in 0..trials {
                let oracle = Oracle::new(&g);
                let trial_seed = RngStream::derive(seed, "alg2-trial", trial).next_u64();
                let run = simulate_classical(&c, &oracle, trial_seed, &opts)?;
                let line = serde_json::json!({
                    "trial": trial,
                    "c_star": run.c_star.to_string(),
                    "total_queries": run.total_queries,
                    "resolved_tuple_lengths": run.resolved_tuple_lengths,
                    "samples": run.samples,
                });
                println!("{line}");
            }
            Ok(true)
        }
        Command::HardnessMc { n, mode, length, tree, trials, seed } => {
            header(seed, n, length.unwrap_or(0), workers);
            let g = build_canonical(n, RngStream::derive(seed, "graph", 0).next_u64())?;
            match mode {
                McMode::Path => {
                    let length =
                        length.ok_or_else(|| Failure::Usage("--length required".into()))?;
                    let t = derive_tuple(&g, length, seed);
                    let tuple_str: String = t.iter().map(|c| c.short()).collect();
                    let r = mc_exit_or_cycle_path(&g, &t, trials, seed, workers)?;
                    println!("mode,tuple,trials,hits,frequency,halfwidth,bound,pass");
                    println!(
                        "path,{tuple_str},{},{},{},{},{},{}",
                        r.trials, r.hits, r.frequency, r.wilson_halfwidth, r.bound, r.pass
                    );
                    Ok(r.pass)
                }
                McMode::Subtree => {
                    println!("mode,size,trials,hits,frequency,halfwidth,bound,pass");
                    let r = match tree {
                        Some(path) => {
                            let wide = AddressCodec::new(31, g.missing_color())?;
                            let t = AddressSubtree::from_json(&read_to_string(&path)?, &wide)?;
                            let codec =
                                AddressCodec::new((t.len() as u32).max(2), g.missing_color())?;
                            let t = AddressSubtree::new(t.nodes().to_vec(), &codec)?;
                            mc_exit_or_cycle_subtree(&g, &t, &codec, trials, seed, workers)?
                        }
                        None => {
                            let size = length.ok_or_else(|| {
                                Failure::Usage("--length (subtree size) or --tree required".into())
                            })?;
                            mc_subtree_sampler(&g, size, trials, seed, workers)?
                        }
                    };
                    println!(
                        "subtree,{},{},{},{},{},{},{}",
                        length.map(|l| l.to_string()).unwrap_or_default(),
                        r.trials,
                        r.hits,
                        r.frequency,
                        r.wilson_halfwidth,
                        r.bound,
                        r.pass
                    );
                    Ok(r.pass)
                }
                McMode::Desirable => {
                    let length =
                        length.ok_or_else(|| Failure::Usage("--length required".into()))?;
                    let t = derive_tuple(&g, length, seed);
                    let rows = mc_desirable(&g, &t, trials, seed, workers)?;
                    println!("prefix,trials_with_prefix,undesirable,frequency,halfwidth,bound,pass");
                    let mut all_pass = true;
                    for row in &rows {
                        all_pass &= row.pass;
                        println!(
                            "{},{},{},{},{},{},{}",
                            row.prefix_index,
                            row.trials_with_prefix,
                            row.undesirable,
                            row.frequency,
                            row.wilson_halfwidth,
                            row.bound,
                            row.pass
                        );
                    }
                    Ok(all_pass)
                }
            }
        }
        Command::WalkDemo { n, tmax, dt, baseline_queries, baseline_trials, seed } => {
            header(seed, n, 0, workers);
            let series = column_walk_series(n, tmax, dt);
            println!("t,p_exit");
            for (t, p) in &series.points {
                println!("{t},{p}");
            }
            let (t_best, p_best) = series.max_exit_probability();
            println!(
                "# max p_exit={p_best} at t={t_best}; norm drift={}",
                series.max_norm_drift
            );
            if let Some(queries) = baseline_queries {
                let rate =
                    classical_baseline_canonical(n, queries, baseline_trials, seed, workers)?;
                println!("# classical baseline: {queries} queries, hit rate {rate}");
            }
            Ok(true)
        }
        Command::VerifyLemmas { n, circuits, p, seed } => {
            header(seed, n, p, workers);
            let g = build_canonical(n, RngStream::derive(seed, "graph", 0).next_u64())?;
            let view = GraphView::new(&g);
            let opts = SimOptions::default();
            let tol = 1e-9;
            let mut worst = [0.0f64; 4];
            let mut rooted_violations = 0usize;
            let mut bad_mass_seen = 0.0f64;
            // Random circuits, plus deep query chains behind a superposed
            // control: the chains cross the weld and push real mass into
            // the bad components, so the identities get exercised off zero.
            let mut suite: Vec<welded_core::Circuit> = Vec::new();
            for k in 0..circuits {
                let mut rng = RngStream::derive(seed, "circuit", k);
                suite.push(random_rooted_circuit(&view, p, 3, &mut rng)?);
            }
            for k in 0..(circuits / 4 + 2) {
                let base =
                    welded_core::generator::query_chain_circuit(&view, p.saturating_sub(1).max(2), seed + k)?;
                let mut gates = base.gates.clone();
                gates[0] = welded_core::Gate::hadamard(0);
                suite.push(welded_core::Circuit::new(n, base.p, 1, gates)?);
            }
            for c in &suite {
                let d = decompose_run(c, &view, &opts)?;
                let r = verify_decomposition(&d, &view, &opts)?;
                worst[0] = worst[0].max(r.max_identity_residual);
                worst[1] = worst[1].max(r.max_conservation_residual);
                worst[2] = worst[2].max(r.max_transcript_residual);
                worst[3] = worst[3].max(r.max_norm_match_residual);
                rooted_violations += r.rootedness_violations;
                bad_mass_seen += r.rows.iter().map(|row| row.psi_bad_sq).sum::<f64>();
            }
            let names = [
                "per-step identities",
                "norm conservation",
                "transcript match",
                "good-part norms",
            ];
            let mut ok = true;
            println!("check,max_residual,tolerance,pass");
            for (name, w) in names.iter().zip(worst) {
                let pass = w <= tol;
                ok &= pass;
                println!("{name},{w},{tol},{pass}");
            }
            let rooted_ok = rooted_violations == 0;
            ok &= rooted_ok;
            println!("support rootedness,{rooted_violations},0,{rooted_ok}");
            println!("# total bad-component mass exercised: {bad_mass_seen}");
            Ok(ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("FAIL: one or more assertions did not hold");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(3)
        }
    }
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use mbpat::anneal::{anneal_restarts, CostFunction, Schedule};
use mbpat::compile::{compile_input, CircuitInput, CompileOptions};
use mbpat::dense::StateVector;
use mbpat::fixtures;
use mbpat::hamiltonian::Hamiltonian;
use mbpat::hybrid::{self, Counts, DenseBackend};
use mbpat::io::{circuit_from_json, pattern_from_json, pattern_to_json};
use mbpat::pattern::{CliffordPart, GraphForm, Layout, Pattern};
use mbpat::verify::{pattern_distribution, verify_branches};

#[derive(Parser)]
#[command(name = "mbpat", version, about = "Measurement-pattern compiler and hybrid sampler")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum LayoutArg {
    Star,
    StarAncilla,
}

impl From<LayoutArg> for Layout {
    fn from(l: LayoutArg) -> Layout {
        match l {
            LayoutArg::Star => Layout::Star,
            LayoutArg::StarAncilla => Layout::StarAncilla,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Dense,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyMode {
    Branches,
    Distribution,
}

#[derive(clap::Args)]
struct SeedArg {
    /// RNG seed; the flag wins over the environment variable.
    #[arg(long, env = "MBPAT_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(clap::Args)]
struct ShotArgs {
    #[arg(long, default_value_t = 10_000)]
    shots: usize,
    #[command(flatten)]
    seed: SeedArg,
    #[arg(long, value_enum, default_value_t = BackendArg::Dense)]
    backend: BackendArg,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a circuit document into a pattern document.
    Compile {
        circuit: PathBuf,
        #[arg(long, value_enum, default_value_t = LayoutArg::Star)]
        layout: LayoutArg,
        /// Replace the Clifford part by its graph state.
        #[arg(long)]
        graph_form: bool,
        /// Log-depth parity trees instead of ladders.
        #[arg(long)]
        parallel_fan: bool,
        /// One shared diagonalising circuit per commuting group.
        #[arg(long)]
        diagonalize_groups: bool,
        /// Skip gate cancellation and rescheduling.
        #[arg(long)]
        no_optimize: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Lower the preparation cost of a graph-form pattern by local complementation.
    Anneal {
        pattern: PathBuf,
        /// `edges`, `degree` or `weighted:α`.
        #[arg(long, default_value = "edges")]
        cost: String,
        #[arg(long, default_value_t = 2.0)]
        t0: f64,
        #[arg(long, default_value_t = 0.995)]
        cooling: f64,
        #[arg(long, default_value_t = 2000)]
        steps: usize,
        #[arg(long, default_value_t = 1)]
        restarts: usize,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Where to write the best-cost trace as JSON.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Sample corrected bitstrings from a graph-form pattern.
    Sample {
        pattern: PathBuf,
        #[command(flatten)]
        run: ShotArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a pattern against the circuit it was compiled from.
    Verify {
        circuit: PathBuf,
        pattern: PathBuf,
        #[arg(long, value_enum, default_value_t = VerifyMode::Branches)]
        mode: VerifyMode,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Estimate a diagonal observable from hybrid samples.
    Expect {
        pattern: PathBuf,
        hamiltonian: PathBuf,
        #[command(flatten)]
        run: ShotArgs,
    },
    /// Write the pattern's graph in Graphviz format.
    ExportDot {
        pattern: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Weighted max-cut QAOA layer, sampled through the hybrid executor.
    DemoQaoa {
        #[command(flatten)]
        run: ShotArgs,
    },
    /// H₂O ansatz: the four shipped measurement groups, exact and sampled.
    DemoVqe {
        /// Shots per group.
        #[command(flatten)]
        run: ShotArgs,
    },
}

/// Six significant digits.
fn sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (5 - mag).max(0) as usize;
    format!("{x:.decimals$}")
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_pattern(path: &Path) -> Result<Pattern> {
    pattern_from_json(&read(path)?).with_context(|| format!("loading {}", path.display()))
}

fn load_circuit(path: &Path) -> Result<CircuitInput> {
    circuit_from_json(&read(path)?).with_context(|| format!("loading {}", path.display()))
}

fn backend(b: BackendArg) -> DenseBackend {
    match b {
        BackendArg::Dense => DenseBackend::default(),
    }
}

fn counts_json(counts: &Counts) -> String {
    let mut s = serde_json::to_string_pretty(counts).expect("counts serialize");
    s.push('\n');
    s
}

fn graph_pattern(input: &CircuitInput) -> Result<Pattern> {
    Ok(compile_input(input, Layout::Star, &CompileOptions::default())?.to_graph_form()?)
}

/// Ok(true) on success, Ok(false) on a failed check.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Compile {
            circuit,
            layout,
            graph_form,
            parallel_fan,
            diagonalize_groups,
            no_optimize,
            output,
        } => {
            let input = load_circuit(&circuit)?;
            let opts = CompileOptions {
                parallel_fan,
                diagonalize_groups,
                optimize: !no_optimize,
            };
            let mut p = compile_input(&input, layout.into(), &opts)?;
            if graph_form {
                p = p.to_graph_form()?;
            }
            let r = p.depth_report();
            eprintln!(
                "qubits {} (main {}), measurements {}, entangling layers {}, CX {}, CZ {}, rounds {}",
                p.total_qubits,
                p.main_qubits,
                p.measurements.len(),
                r.entangling_layers,
                r.cnot_count,
                r.cz_count,
                r.parallel_groups
            );
            write(output.as_deref(), &pattern_to_json(&p))?;
            Ok(true)
        }
        Command::Anneal {
            pattern,
            cost,
            t0,
            cooling,
            steps,
            restarts,
            seed,
            output,
            trace,
        } => {
            let mut p = load_pattern(&pattern)?;
            let cost: CostFunction = cost.parse()?;
            let schedule = Schedule { t0, cooling, steps };
            let CliffordPart::Graph(gf) = &p.clifford else {
                bail!("anneal needs a graph-form pattern (compile with --graph-form)");
            };
            let r = anneal_restarts(&gf.register, cost, &schedule, restarts, seed.seed)?;
            eprintln!(
                "cost {} -> {} ({} accepted moves)",
                sig(r.initial_cost),
                sig(r.best_cost),
                r.accepted
            );
            if let Some(t) = trace {
                let doc = serde_json::json!({
                    "cost": format!("{cost:?}"),
                    "initial_cost": r.initial_cost,
                    "best_cost": r.best_cost,
                    "trace": r.trace,
                });
                write(Some(&t), &format!("{}\n", serde_json::to_string_pretty(&doc)?))?;
            }
            p.clifford = CliffordPart::Graph(GraphForm { register: r.register });
            write(output.as_deref(), &pattern_to_json(&p))?;
            Ok(true)
        }
        Command::Sample { pattern, run, output } => {
            let p = load_pattern(&pattern)?;
            let counts = hybrid::execute(&p, run.shots, &backend(run.backend), run.seed.seed)?;
            write(output.as_deref(), &counts_json(&counts))?;
            Ok(true)
        }
        Command::Verify {
            circuit,
            pattern,
            mode,
            tol,
        } => {
            let input = load_circuit(&circuit)?;
            let p = load_pattern(&pattern)?;
            let deviation = match mode {
                VerifyMode::Branches => {
                    let r = verify_branches(&input, &p, None)?;
                    println!("branches {}", r.branches);
                    r.max_deviation()
                }
                VerifyMode::Distribution => {
                    let mut s = StateVector::zero(input.num_qubits)?;
                    input.apply_to(&mut s)?;
                    let all: Vec<usize> = (0..input.num_qubits).collect();
                    let ideal = s.distribution(&all)?;
                    let got = pattern_distribution(&p)?;
                    ideal.iter().zip(&got).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
                }
            };
            let pass = deviation <= tol;
            println!("max deviation {deviation:.3e}");
            println!("{}", if pass { "PASS" } else { "FAIL" });
            Ok(pass)
        }
        Command::Expect {
            pattern,
            hamiltonian,
            run,
        } => {
            let p = load_pattern(&pattern)?;
            let h = Hamiltonian::parse(&read(&hamiltonian)?)?;
            let e = hybrid::expectation(&p, &h, run.shots, &backend(run.backend), run.seed.seed)?;
            println!("{} ± {}", sig(e.value), sig(e.std_error));
            Ok(true)
        }
        Command::ExportDot { pattern, output } => {
            let p = load_pattern(&pattern)?;
            let CliffordPart::Graph(gf) = &p.clifford else {
                bail!("export-dot needs a graph-form pattern (compile with --graph-form)");
            };
            let mut labels: Vec<String> = (0..p.total_qubits).map(|q| format!("a{q}")).collect();
            for (i, &q) in p.main_map.iter().enumerate() {
                labels[q] = format!("q{i}");
            }
            write(output.as_deref(), &gf.register.to_dot(Some(&labels)))?;
            Ok(true)
        }
        Command::DemoQaoa { run } => demo_qaoa(&run),
        Command::DemoVqe { run } => demo_vqe(&run),
    }
}

fn demo_qaoa(run: &ShotArgs) -> Result<bool> {
    let input = fixtures::qaoa_circuit(fixtures::QAOA_GAMMA, fixtures::QAOA_BETA);
    let p = graph_pattern(&input)?;
    let counts = hybrid::execute(&p, run.shots, &backend(run.backend), run.seed.seed)?;
    let mut ranked: Vec<(&String, &u64)> = counts.iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(a.1).then(a.0.cmp(b.0)));
    println!("gamma {} beta {}, {} shots, {} qubits", fixtures::QAOA_GAMMA, fixtures::QAOA_BETA, run.shots, p.total_qubits);
    for (k, c) in &ranked {
        println!("{k} {c}");
    }
    let mut s = StateVector::zero(4)?;
    input.apply_to(&mut s)?;
    let ideal = s.distribution(&[0, 1, 2, 3])?;
    let measured = hybrid::counts_to_distribution(&counts, 4)?;
    let f = hybrid::hellinger_normalized(&ideal, &measured)?;
    println!("normalized fidelity {}", sig(f));
    let mut top: Vec<&str> = ranked.iter().take(2).map(|(k, _)| k.as_str()).collect();
    top.sort_unstable();
    let pass = top == fixtures::QAOA_SOLUTIONS.to_vec();
    println!("top strings {} {}: {}", top.first().unwrap_or(&"-"), top.get(1).unwrap_or(&"-"), if pass { "PASS" } else { "FAIL" });
    Ok(pass)
}

fn demo_vqe(run: &ShotArgs) -> Result<bool> {
    let ansatz = fixtures::vqe_ansatz();
    let mut state = StateVector::zero(ansatz.num_qubits)?;
    ansatz.apply_to(&mut state)?;
    let mut pass = true;
    println!("group  reference  exact      hybrid");
    for k in 0..4 {
        let h = fixtures::h2o_group(k);
        let exact = state.expectation(&h)?;
        let mut value = 0.0;
        let mut var = 0.0;
        for (i, g) in h.measurement_groups()?.iter().enumerate() {
            let p = graph_pattern(&fixtures::with_suffix(&ansatz, &g.gates))?;
            let seed = run.seed.seed.wrapping_add((k * 1000 + i) as u64);
            let e = hybrid::expectation(&p, &g.diagonal_observable()?, run.shots, &backend(run.backend), seed)?;
            value += e.value;
            var += e.std_error * e.std_error;
        }
        let reference = fixtures::H2O_IDEAL[k];
        let err = var.sqrt();
        let ok = (exact - reference).abs() < 1e-3 && (value - reference).abs() <= 3.0 * err;
        pass &= ok;
        println!(
            "H{}     {}  {}  {} ± {}  {}",
            k + 1,
            sig(reference),
            sig(exact),
            sig(value),
            sig(err),
            if ok { "PASS" } else { "FAIL" }
        );
    }
    println!("full-Hamiltonian ground energy for reference: {} Ha (terms not shipped)", fixtures::H2O_FULL_ENERGY);
    Ok(pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

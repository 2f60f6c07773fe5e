// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use qroute::bench::{
    aggregate, default_jobs, run_suite, run_with_result, write_aggregate_csv, write_csv, write_jsonl, CircuitSource,
    GroupBy, SuiteConfig, JOBS_ENV,
};
use qroute::{
    emit_qasm, parse_qasm, random_circuit, verify, Circuit, CouplingGraph, LayeringMode, Placement, PlacementMethod,
    RouterConfig, Selection,
};
use serde::{Deserialize, Serialize};

/// Exit status when routing succeeded but the output failed verification.
const VERIFY_FAILED: u8 = 2;

#[derive(Parser)]
#[command(name = "qroute", version, about = "Qubit placement and SWAP routing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Place and route one OpenQASM file.
    Transpile(TranspileArgs),
    /// Run a benchmark suite over a hyperparameter grid.
    Bench(BenchArgs),
    /// Check a compiled circuit against its input.
    Verify(VerifyArgs),
    /// Write a random CNOT-heavy circuit.
    GenRandom(GenRandomArgs),
    /// Coupling graphs.
    Arch {
        #[command(subcommand)]
        command: ArchCommand,
    },
}

#[derive(Subcommand)]
enum ArchCommand {
    /// Built-in architecture names.
    List,
    /// Vertex count, edges and diameter of a graph spec.
    Show { graph: String },
}

#[derive(Args)]
struct RouterArgs {
    #[arg(long, default_value_t = 0.1)]
    discount: f64,
    #[arg(long, default_value_t = 40)]
    horizon: usize,
    #[arg(long, default_value_t = 7)]
    lookahead_depth: usize,
    #[arg(long, default_value = "coarse")]
    layering: LayeringMode,
    #[arg(long, default_value = "multi")]
    placement: PlacementMethod,
    #[arg(long, default_value_t = 16)]
    candidates: usize,
    #[arg(long, default_value_t = 3)]
    perturb_max: usize,
    #[arg(long, default_value_t = 8)]
    tie_cap: usize,
    #[arg(long, default_value = "immediate")]
    selection: Selection,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl RouterArgs {
    fn config(&self) -> RouterConfig {
        RouterConfig {
            discount: self.discount,
            horizon: self.horizon,
            lookahead_depth: self.lookahead_depth,
            layering: self.layering,
            placement: self.placement,
            candidates: self.candidates,
            perturb_max: self.perturb_max,
            tie_cap: self.tie_cap,
            selection: self.selection,
            seed: self.seed,
        }
    }
}

#[derive(Args)]
struct TranspileArgs {
    input: PathBuf,
    /// Built-in name (`tokyo20`, `grid:RxC`, `line:N`, `ring:N`) or edge-list file.
    #[arg(long, default_value = "tokyo20")]
    graph: String,
    #[command(flatten)]
    router: RouterArgs,
    /// Directory for the artifacts; defaults to the input's directory.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Emit each SWAP as three CNOTs.
    #[arg(long)]
    decompose_swaps: bool,
    #[arg(long)]
    no_verify: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// TOML suite; grid flags given on the command line override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// OpenQASM files, added to the suite's circuits.
    #[arg(long = "circuit")]
    circuits: Vec<PathBuf>,
    #[arg(long)]
    graph: Option<String>,
    #[arg(long, value_delimiter = ',')]
    discounts: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    horizons: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    depths: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    placements: Option<Vec<PlacementMethod>>,
    #[arg(long, value_delimiter = ',')]
    layerings: Option<Vec<LayeringMode>>,
    #[arg(long)]
    selection: Option<Selection>,
    #[arg(long)]
    repetitions: Option<usize>,
    #[arg(long)]
    seed_base: Option<u64>,
    #[arg(long)]
    no_verify: bool,
    /// Worker threads.
    #[arg(long, env = JOBS_ENV)]
    jobs: Option<usize>,
    /// Per-run CSV; stdout when no output is named.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    jsonl: Option<PathBuf>,
    /// Mean, median and interquartile range per group.
    #[arg(long)]
    aggregate: Option<PathBuf>,
    /// Pool circuits per grid cell instead of grouping per circuit.
    #[arg(long)]
    pool_circuits: bool,
}

#[derive(Args)]
struct VerifyArgs {
    input: PathBuf,
    compiled: PathBuf,
    graph: String,
    placement: PathBuf,
    /// Overrides the layering stored in the placement record.
    #[arg(long)]
    layering: Option<LayeringMode>,
}

#[derive(Args)]
struct GenRandomArgs {
    #[arg(long)]
    qubits: usize,
    #[arg(long)]
    gates: usize,
    #[arg(long, default_value_t = 0.5)]
    two_qubit_fraction: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

/// Placement artifact written by `transpile` and read by `verify`.
#[derive(Debug, Serialize, Deserialize)]
struct PlacementRecord {
    num_vertices: usize,
    /// Vertex of each logical qubit before the first gate.
    initial: Vec<usize>,
    #[serde(rename = "final")]
    final_: Vec<usize>,
    swap_count: usize,
    layering: LayeringMode,
}

fn read_circuit(path: &Path) -> Result<Circuit> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_qasm(&text).with_context(|| format!("parsing {}", path.display()))
}

fn read_graph(spec: &str) -> Result<CouplingGraph> {
    CouplingGraph::from_spec(spec).with_context(|| format!("loading graph `{spec}`"))
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map_or_else(|| "circuit".into(), |s| s.to_string_lossy().into_owned())
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn transpile_cmd(args: &TranspileArgs) -> Result<ExitCode> {
    let circuit = read_circuit(&args.input)?;
    let graph = read_graph(&args.graph)?;
    let config = args.router.config();
    let name = stem(&args.input);
    let (record, result) = run_with_result(&name, &circuit, &graph, &config, !args.no_verify);
    let Some(result) = result else {
        bail!("{}: {}", args.input.display(), record.error.unwrap_or_default());
    };
    let dir = match &args.out_dir {
        Some(d) => d.clone(),
        None => args.input.parent().map(Path::to_path_buf).unwrap_or_default(),
    };
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    write_file(
        &dir.join(format!("{name}.compiled.qasm")),
        &emit_qasm(&result.compiled, args.decompose_swaps),
    )?;
    let placement = PlacementRecord {
        num_vertices: graph.num_vertices(),
        initial: result.initial_placement.as_slice().to_vec(),
        final_: result.final_placement.as_slice().to_vec(),
        swap_count: result.swap_count,
        layering: config.layering,
    };
    write_file(
        &dir.join(format!("{name}.placement.json")),
        &serde_json::to_string_pretty(&placement)?,
    )?;
    let record_json = serde_json::to_string_pretty(&record)?;
    write_file(&dir.join(format!("{name}.record.json")), &record_json)?;
    println!("{record_json}");
    if record.verified == Some(false) {
        eprintln!("verification failed: {}", record.error.unwrap_or_default());
        return Ok(ExitCode::from(VERIFY_FAILED));
    }
    Ok(ExitCode::SUCCESS)
}

fn load_suite(args: &BenchArgs) -> Result<SuiteConfig> {
    let mut suite = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let mut suite: SuiteConfig =
                toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
            // Circuit paths are relative to the suite file.
            let base = path.parent().unwrap_or(Path::new(""));
            for c in &mut suite.circuits {
                if let CircuitSource::File { path } = c {
                    if path.is_relative() {
                        *path = base.join(&*path);
                    }
                }
            }
            suite
        }
        None => SuiteConfig::new(Vec::new(), "tokyo20"),
    };
    suite
        .circuits
        .extend(args.circuits.iter().map(|p| CircuitSource::File { path: p.clone() }));
    if let Some(g) = &args.graph {
        suite.graph = g.clone();
    }
    if let Some(v) = &args.discounts {
        suite.discounts = v.clone();
    }
    if let Some(v) = &args.horizons {
        suite.horizons = v.clone();
    }
    if let Some(v) = &args.depths {
        suite.depths = v.clone();
    }
    if let Some(v) = &args.placements {
        suite.placements = v.clone();
    }
    if let Some(v) = &args.layerings {
        suite.layerings = v.clone();
    }
    if let Some(v) = args.selection {
        suite.selection = v;
    }
    if let Some(v) = args.repetitions {
        suite.repetitions = v;
    }
    if let Some(v) = args.seed_base {
        suite.seed_base = v;
    }
    if args.no_verify {
        suite.verify = false;
    }
    Ok(suite)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn bench_cmd(args: &BenchArgs) -> Result<ExitCode> {
    let suite = load_suite(args)?;
    let graph = read_graph(&suite.graph)?;
    let jobs = args.jobs.unwrap_or_else(default_jobs);
    let records = run_suite(&suite, &graph, jobs)?;
    if let Some(path) = &args.csv {
        write_csv(&records, create(path)?)?;
    }
    if let Some(path) = &args.jsonl {
        write_jsonl(&records, create(path)?)?;
    }
    if let Some(path) = &args.aggregate {
        let by = if args.pool_circuits {
            GroupBy::Cell
        } else {
            GroupBy::Circuit
        };
        write_aggregate_csv(&aggregate(&records, by), create(path)?)?;
    }
    if args.csv.is_none() && args.jsonl.is_none() && args.aggregate.is_none() {
        write_csv(&records, io::stdout().lock())?;
    }
    let failed = records.iter().filter(|r| r.error.is_some()).count();
    if failed > 0 {
        eprintln!("{failed} of {} runs failed", records.len());
        return Ok(ExitCode::FAILURE);
    }
    Ok(ExitCode::SUCCESS)
}

fn verify_cmd(args: &VerifyArgs) -> Result<ExitCode> {
    let input = read_circuit(&args.input)?;
    let compiled = read_circuit(&args.compiled)?;
    let graph = read_graph(&args.graph)?;
    let text = fs::read_to_string(&args.placement).with_context(|| format!("reading {}", args.placement.display()))?;
    let record: PlacementRecord =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", args.placement.display()))?;
    let p0 = Placement::new(record.num_vertices, record.initial).context("placement record")?;
    let mode = args.layering.unwrap_or(record.layering);
    let report = verify(&input, &compiled, &graph, &p0, record.swap_count, mode)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(if report.is_ok() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(VERIFY_FAILED)
    })
}

fn gen_random_cmd(args: &GenRandomArgs) -> Result<ExitCode> {
    let c = random_circuit(args.qubits, args.gates, args.two_qubit_fraction, args.seed)?;
    let text = emit_qasm(&c, false);
    match &args.output {
        Some(path) => write_file(path, &text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(ExitCode::SUCCESS)
}

fn arch_cmd(command: &ArchCommand) -> Result<ExitCode> {
    match command {
        ArchCommand::List => {
            for name in CouplingGraph::builtin_names() {
                println!("{name}");
            }
        }
        ArchCommand::Show { graph } => {
            let g = read_graph(graph)?;
            let n = g.num_vertices();
            let diameter = (0..n)
                .flat_map(|u| (0..n).map(move |v| (u, v)))
                .map(|(u, v)| g.distance(u, v))
                .max();
            println!("vertices {n}");
            println!("edges {}", g.edges().len());
            println!("connected {}", g.is_connected());
            if g.is_connected() {
                println!("diameter {}", diameter.unwrap_or(0));
            }
            for (u, v) in g.edges() {
                println!("{u} {v}");
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Transpile(args) => transpile_cmd(args),
        Command::Bench(args) => bench_cmd(args),
        Command::Verify(args) => verify_cmd(args),
        Command::GenRandom(args) => gen_random_cmd(args),
        Command::Arch { command } => arch_cmd(command),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

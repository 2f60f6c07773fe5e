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

//! Benchmark suites: circuits times a hyperparameter grid times repetitions,
//! run on a worker pool and written out in a fixed order.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{random_circuit, Circuit};
use crate::graph::CouplingGraph;
use crate::layering::LayeringMode;
use crate::placement::PlacementMethod;
use crate::qasm::parse_qasm;
use crate::router::{transpile, RouteResult, RouterConfig, Selection};
use crate::verify::verify;

pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable holding the default worker count.
pub const JOBS_ENV: &str = "QROUTE_JOBS";

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("repetitions must be at least 1")]
    NoRepetitions,
    #[error("hyperparameter grid axis `{0}` is empty")]
    EmptyAxis(&'static str),
    #[error("suite lists no circuits")]
    NoCircuits,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("thread pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum CircuitSource {
    File {
        path: PathBuf,
    },
    Random {
        name: Option<String>,
        qubits: usize,
        gates: usize,
        two_qubit_fraction: f64,
        seed: u64,
    },
}

impl CircuitSource {
    pub fn name(&self) -> String {
        match self {
            CircuitSource::File { path } => path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.display().to_string()),
            CircuitSource::Random { name: Some(name), .. } => name.clone(),
            CircuitSource::Random {
                qubits,
                gates,
                two_qubit_fraction,
                seed,
                ..
            } => format!("random-q{qubits}-g{gates}-f{two_qubit_fraction}-s{seed}"),
        }
    }

    pub fn load(&self) -> Result<Circuit, String> {
        match self {
            CircuitSource::File { path } => {
                let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
                parse_qasm(&text).map_err(|e| format!("{}: {e}", path.display()))
            }
            CircuitSource::Random {
                qubits,
                gates,
                two_qubit_fraction,
                seed,
                ..
            } => random_circuit(*qubits, *gates, *two_qubit_fraction, *seed).map_err(|e| e.to_string()),
        }
    }
}

fn default_discounts() -> Vec<f64> {
    vec![0.1]
}
fn default_horizons() -> Vec<usize> {
    vec![40]
}
fn default_depths() -> Vec<usize> {
    vec![7]
}
fn default_placements() -> Vec<PlacementMethod> {
    vec![PlacementMethod::Multi]
}
fn default_layerings() -> Vec<LayeringMode> {
    vec![LayeringMode::Coarse]
}
fn default_repetitions() -> usize {
    3
}
fn default_candidates() -> usize {
    16
}
fn default_perturb_max() -> usize {
    3
}
fn default_tie_cap() -> usize {
    8
}
fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub circuits: Vec<CircuitSource>,
    pub graph: String,
    #[serde(default = "default_discounts")]
    pub discounts: Vec<f64>,
    #[serde(default = "default_horizons")]
    pub horizons: Vec<usize>,
    #[serde(default = "default_depths")]
    pub depths: Vec<usize>,
    #[serde(default = "default_placements")]
    pub placements: Vec<PlacementMethod>,
    #[serde(default = "default_layerings")]
    pub layerings: Vec<LayeringMode>,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    #[serde(default)]
    pub seed_base: u64,
    #[serde(default = "default_candidates")]
    pub candidates: usize,
    #[serde(default = "default_perturb_max")]
    pub perturb_max: usize,
    #[serde(default = "default_tie_cap")]
    pub tie_cap: usize,
    #[serde(default)]
    pub selection: Selection,
    #[serde(default = "default_true")]
    pub verify: bool,
}

impl SuiteConfig {
    pub fn new(circuits: Vec<CircuitSource>, graph: &str) -> Self {
        SuiteConfig {
            circuits,
            graph: graph.to_string(),
            discounts: default_discounts(),
            horizons: default_horizons(),
            depths: default_depths(),
            placements: default_placements(),
            layerings: default_layerings(),
            repetitions: default_repetitions(),
            seed_base: 0,
            candidates: default_candidates(),
            perturb_max: default_perturb_max(),
            selection: Selection::default(),
            tie_cap: default_tie_cap(),
            verify: true,
        }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.repetitions == 0 {
            return Err(BenchError::NoRepetitions);
        }
        if self.circuits.is_empty() {
            return Err(BenchError::NoCircuits);
        }
        for (axis, len) in [
            ("discounts", self.discounts.len()),
            ("horizons", self.horizons.len()),
            ("depths", self.depths.len()),
            ("placements", self.placements.len()),
            ("layerings", self.layerings.len()),
        ] {
            if len == 0 {
                return Err(BenchError::EmptyAxis(axis));
            }
        }
        for cfg in self.grid() {
            cfg.score_params().map_err(|e| BenchError::Config(e.to_string()))?;
        }
        Ok(())
    }

    /// Hyperparameter cells in a fixed order, seeds left at zero.
    pub fn grid(&self) -> Vec<RouterConfig> {
        let mut out = Vec::new();
        for &discount in &self.discounts {
            for &horizon in &self.horizons {
                for &lookahead_depth in &self.depths {
                    for &placement in &self.placements {
                        for &layering in &self.layerings {
                            out.push(RouterConfig {
                                discount,
                                horizon,
                                lookahead_depth,
                                layering,
                                placement,
                                candidates: self.candidates,
                                perturb_max: self.perturb_max,
                                tie_cap: self.tie_cap,
                                selection: self.selection,
                                seed: 0,
                            });
                        }
                    }
                }
            }
        }
        out
    }
}

/// Result of one routing run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema_version: u32,
    pub circuit: String,
    pub qubits: usize,
    pub gates: usize,
    pub discount: f64,
    pub horizon: usize,
    pub lookahead_depth: usize,
    pub placement: PlacementMethod,
    pub layering: LayeringMode,
    pub selection: Selection,
    pub seed: u64,
    pub swap_count: Option<usize>,
    /// `swap_count / gates`.
    pub normalized: Option<f64>,
    pub wall_time_ms: f64,
    pub verified: Option<bool>,
    pub stall_trips: Option<usize>,
    pub error: Option<String>,
}

/// [`RunRecord`] without wall time, so reruns compare byte for byte.
#[derive(Serialize)]
struct CsvRow<'a> {
    schema_version: u32,
    circuit: &'a str,
    qubits: usize,
    gates: usize,
    discount: f64,
    horizon: usize,
    lookahead_depth: usize,
    placement: PlacementMethod,
    layering: LayeringMode,
    selection: Selection,
    seed: u64,
    swap_count: Option<usize>,
    normalized: Option<f64>,
    verified: Option<bool>,
    stall_trips: Option<usize>,
    error: Option<&'a str>,
}

impl<'a> From<&'a RunRecord> for CsvRow<'a> {
    fn from(r: &'a RunRecord) -> Self {
        CsvRow {
            schema_version: r.schema_version,
            circuit: &r.circuit,
            qubits: r.qubits,
            gates: r.gates,
            discount: r.discount,
            horizon: r.horizon,
            lookahead_depth: r.lookahead_depth,
            placement: r.placement,
            layering: r.layering,
            selection: r.selection,
            seed: r.seed,
            swap_count: r.swap_count,
            normalized: r.normalized,
            verified: r.verified,
            stall_trips: r.stall_trips,
            error: r.error.as_deref(),
        }
    }
}

/// Transpiles one circuit and, if asked, verifies the output.
pub fn run_one(name: &str, circuit: &Circuit, graph: &CouplingGraph, config: &RouterConfig, check: bool) -> RunRecord {
    run_with_result(name, circuit, graph, config, check).0
}

/// [`run_one`], also handing back the routing result when routing succeeded.
pub fn run_with_result(
    name: &str,
    circuit: &Circuit,
    graph: &CouplingGraph,
    config: &RouterConfig,
    check: bool,
) -> (RunRecord, Option<RouteResult>) {
    let gates = circuit.num_gates();
    let mut record = RunRecord {
        schema_version: SCHEMA_VERSION,
        circuit: name.to_string(),
        qubits: circuit.num_qubits(),
        gates,
        discount: config.discount,
        horizon: config.horizon,
        lookahead_depth: config.lookahead_depth,
        placement: config.placement,
        layering: config.layering,
        selection: config.selection,
        seed: config.seed,
        swap_count: None,
        normalized: None,
        wall_time_ms: 0.0,
        verified: None,
        stall_trips: None,
        error: None,
    };
    let start = Instant::now();
    let result = transpile(circuit, graph, config);
    record.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    match result {
        Ok(r) => {
            record.swap_count = Some(r.swap_count);
            record.normalized = Some(if gates == 0 {
                0.0
            } else {
                r.swap_count as f64 / gates as f64
            });
            record.stall_trips = Some(r.stats.stall_trips);
            if check {
                match verify(
                    circuit,
                    &r.compiled,
                    graph,
                    &r.initial_placement,
                    r.swap_count,
                    config.layering,
                ) {
                    Ok(report) => {
                        record.verified = Some(report.is_ok());
                        if !report.is_ok() {
                            record.error = Some(format!("verification failed: {:?}", report.violations.first()));
                        }
                    }
                    Err(e) => {
                        record.verified = Some(false);
                        record.error = Some(e.to_string());
                    }
                }
            }
            (record, Some(r))
        }
        Err(e) => {
            record.error = Some(e.to_string());
            (record, None)
        }
    }
}

/// Worker count from [`JOBS_ENV`], else the available parallelism.
pub fn default_jobs() -> usize {
    std::env::var(JOBS_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Runs every (circuit, cell, repetition) on `jobs` workers. Records come
/// back in that nested order whatever the scheduling. Repetition `r` uses
/// seed `seed_base + r`. A circuit that fails to load yields error records.
pub fn run_suite(suite: &SuiteConfig, graph: &CouplingGraph, jobs: usize) -> Result<Vec<RunRecord>, BenchError> {
    suite.validate()?;
    let circuits: Vec<(String, Result<Circuit, String>)> =
        suite.circuits.iter().map(|c| (c.name(), c.load())).collect();
    let grid = suite.grid();
    let mut tasks = Vec::new();
    for (ci, _) in circuits.iter().enumerate() {
        for cell in &grid {
            for rep in 0..suite.repetitions {
                let mut cfg = cell.clone();
                cfg.seed = suite.seed_base + rep as u64;
                tasks.push((ci, cfg));
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| BenchError::Pool(e.to_string()))?;
    let records = pool.install(|| {
        tasks
            .par_iter()
            .map(|(ci, cfg)| {
                let (name, loaded) = &circuits[*ci];
                match loaded {
                    Ok(c) => run_one(name, c, graph, cfg, suite.verify),
                    Err(e) => failed_load(name, cfg, e),
                }
            })
            .collect()
    });
    Ok(records)
}

fn failed_load(name: &str, cfg: &RouterConfig, error: &str) -> RunRecord {
    RunRecord {
        schema_version: SCHEMA_VERSION,
        circuit: name.to_string(),
        qubits: 0,
        gates: 0,
        discount: cfg.discount,
        horizon: cfg.horizon,
        lookahead_depth: cfg.lookahead_depth,
        placement: cfg.placement,
        layering: cfg.layering,
        selection: cfg.selection,
        seed: cfg.seed,
        swap_count: None,
        normalized: None,
        wall_time_ms: 0.0,
        verified: None,
        stall_trips: None,
        error: Some(error.to_string()),
    }
}

pub fn write_csv<W: Write>(records: &[RunRecord], out: W) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(CsvRow::from(r))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_jsonl<W: Write>(records: &[RunRecord], mut out: W) -> Result<(), BenchError> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Median, quartiles and mean of a sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub iqr: f64,
}

/// Quantile by linear interpolation between closest ranks.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

impl Summary {
    pub fn of(values: &[f64]) -> Option<Summary> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let (q1, q3) = (quantile(&v, 0.25), quantile(&v, 0.75));
        Some(Summary {
            mean: v.iter().sum::<f64>() / v.len() as f64,
            median: quantile(&v, 0.5),
            q1,
            q3,
            iqr: q3 - q1,
        })
    }
}

/// How records are grouped for aggregation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupBy {
    /// One row per circuit and cell.
    Circuit,
    /// One row per cell, pooling circuits.
    Cell,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    /// Circuit name, or `*` when circuits are pooled.
    pub circuit: String,
    pub discount: f64,
    pub horizon: usize,
    pub lookahead_depth: usize,
    pub placement: PlacementMethod,
    pub layering: LayeringMode,
    pub selection: Selection,
    pub runs: usize,
    pub failures: usize,
    pub swaps_mean: Option<f64>,
    pub swaps_median: Option<f64>,
    pub swaps_q1: Option<f64>,
    pub swaps_q3: Option<f64>,
    pub swaps_iqr: Option<f64>,
    pub normalized_mean: Option<f64>,
    pub normalized_median: Option<f64>,
    pub normalized_q1: Option<f64>,
    pub normalized_q3: Option<f64>,
    pub normalized_iqr: Option<f64>,
}

/// Groups records and summarises SWAP counts and normalized SWAP counts.
/// Rows follow the first appearance of each group in `records`.
pub fn aggregate(records: &[RunRecord], by: GroupBy) -> Vec<AggregateRow> {
    type Key = (String, u64, usize, usize, PlacementMethod, LayeringMode, Selection);
    let mut order: Vec<Key> = Vec::new();
    let mut groups: BTreeMap<usize, Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        let circuit = match by {
            GroupBy::Circuit => r.circuit.clone(),
            GroupBy::Cell => "*".to_string(),
        };
        let key = (
            circuit,
            r.discount.to_bits(),
            r.horizon,
            r.lookahead_depth,
            r.placement,
            r.layering,
            r.selection,
        );
        let idx = order.iter().position(|k| *k == key).unwrap_or_else(|| {
            order.push(key);
            order.len() - 1
        });
        groups.entry(idx).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|(idx, rs)| {
            let (circuit, discount, horizon, lookahead_depth, placement, layering, selection) = order[idx].clone();
            let ok: Vec<&&RunRecord> = rs
                .iter()
                .filter(|r| r.error.is_none() && r.swap_count.is_some())
                .collect();
            let swaps: Vec<f64> = ok.iter().map(|r| r.swap_count.unwrap_or(0) as f64).collect();
            let norm: Vec<f64> = ok.iter().filter_map(|r| r.normalized).collect();
            let (s, n) = (Summary::of(&swaps), Summary::of(&norm));
            AggregateRow {
                circuit,
                discount: f64::from_bits(discount),
                horizon,
                lookahead_depth,
                placement,
                layering,
                selection,
                runs: rs.len(),
                failures: rs.len() - ok.len(),
                swaps_mean: s.map(|s| s.mean),
                swaps_median: s.map(|s| s.median),
                swaps_q1: s.map(|s| s.q1),
                swaps_q3: s.map(|s| s.q3),
                swaps_iqr: s.map(|s| s.iqr),
                normalized_mean: n.map(|s| s.mean),
                normalized_median: n.map(|s| s.median),
                normalized_q1: n.map(|s| s.q1),
                normalized_q3: n.map(|s| s.q3),
                normalized_iqr: n.map(|s| s.iqr),
            }
        })
        .collect()
}

pub fn write_aggregate_csv<W: Write>(rows: &[AggregateRow], out: W) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_source(seed: u64) -> CircuitSource {
        CircuitSource::Random {
            name: None,
            qubits: 6,
            gates: 40,
            two_qubit_fraction: 0.5,
            seed,
        }
    }

    #[test]
    fn quantiles_interpolate() {
        let s = Summary::of(&[4.0, 1.0, 3.0, 2.0]).unwrap();
        assert_eq!(s.median, 2.5);
        assert_eq!(s.q1, 1.75);
        assert_eq!(s.q3, 3.25);
        assert_eq!(s.iqr, 1.5);
        assert_eq!(s.mean, 2.5);
        assert!(Summary::of(&[]).is_none());
        assert_eq!(Summary::of(&[7.0]).unwrap().iqr, 0.0);
    }

    #[test]
    fn single_cell_single_rep_gives_one_record() {
        let mut suite = SuiteConfig::new(vec![random_source(1)], "grid:2x3");
        suite.repetitions = 1;
        let g = CouplingGraph::from_spec(&suite.graph).unwrap();
        let records = run_suite(&suite, &g, 2).unwrap();
        assert_eq!(records.len(), 1);
        let r = &records[0];
        assert_eq!(r.verified, Some(true));
        assert_eq!(r.normalized, Some(r.swap_count.unwrap() as f64 / r.gates as f64));
    }

    #[test]
    fn csv_is_deterministic_across_worker_counts() {
        let mut suite = SuiteConfig::new(vec![random_source(1), random_source(2)], "tokyo20");
        suite.discounts = vec![0.0, 0.5];
        suite.repetitions = 2;
        suite.seed_base = 10;
        let g = CouplingGraph::from_spec(&suite.graph).unwrap();
        let mut a = Vec::new();
        let mut b = Vec::new();
        let ra = run_suite(&suite, &g, 1).unwrap();
        write_csv(&ra, &mut a).unwrap();
        write_csv(&run_suite(&suite, &g, 4).unwrap(), &mut b).unwrap();
        assert_eq!(a, b);
        assert_eq!(ra.len(), 8);
        assert_eq!(
            ra.iter().map(|r| r.seed).collect::<Vec<_>>(),
            vec![10, 11, 10, 11, 10, 11, 10, 11]
        );
        let rows = aggregate(&ra, GroupBy::Circuit);
        assert_eq!(rows.len(), 4);
        assert!(rows.iter().all(|r| r.runs == 2 && r.failures == 0));
        let pooled = aggregate(&ra, GroupBy::Cell);
        assert_eq!(pooled.len(), 2);
        assert!(pooled.iter().all(|r| r.circuit == "*" && r.runs == 4));
    }

    #[test]
    fn failures_are_recorded_and_the_suite_continues() {
        let mut suite = SuiteConfig::new(
            vec![
                CircuitSource::File {
                    path: PathBuf::from("/nonexistent/x.qasm"),
                },
                random_source(3),
            ],
            "line:3",
        );
        suite.repetitions = 1;
        let g = CouplingGraph::from_spec(&suite.graph).unwrap();
        let records = run_suite(&suite, &g, 1).unwrap();
        assert_eq!(records.len(), 2);
        assert!(records[0].error.is_some());
        // Six qubits do not fit on three vertices.
        assert!(records[1].error.is_some());
        assert_eq!(records[1].swap_count, None);
    }

    #[test]
    fn suite_validation() {
        let mut suite = SuiteConfig::new(vec![random_source(1)], "tokyo20");
        suite.repetitions = 0;
        assert!(matches!(suite.validate(), Err(BenchError::NoRepetitions)));
        suite.repetitions = 1;
        suite.depths.clear();
        assert!(matches!(suite.validate(), Err(BenchError::EmptyAxis("depths"))));
        suite.depths = vec![7];
        suite.discounts = vec![1.5];
        assert!(matches!(suite.validate(), Err(BenchError::Config(_))));
    }

    #[test]
    fn jsonl_round_trips() {
        let mut suite = SuiteConfig::new(vec![random_source(4)], "grid:3x3");
        suite.repetitions = 1;
        let g = CouplingGraph::from_spec(&suite.graph).unwrap();
        let records = run_suite(&suite, &g, 1).unwrap();
        let mut buf = Vec::new();
        write_jsonl(&records, &mut buf).unwrap();
        let back: Vec<RunRecord> = String::from_utf8(buf)
            .unwrap()
            .lines()
            .map(|l| serde_json::from_str(l).unwrap())
            .collect();
        assert_eq!(back, records);
    }
}

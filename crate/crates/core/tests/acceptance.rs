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

//! Acceptance suite. Prints one `ACCEPTANCE <n> PASS|FAIL` line per
//! criterion and exits non-zero if any fails.
//!
//! Benchmark circuits are read from `$QROUTE_BENCH_DIR` (default
//! `<workspace>/benchmarks`) as `<name>.qasm`.

mod common;

use std::path::PathBuf;
use std::time::{Duration, Instant};

use qroute::bench::{aggregate, run_suite, CircuitSource, GroupBy, SuiteConfig};
use qroute::graph::{all_pairs_distances, blossom_matching, CouplingGraph, UNREACHABLE};
use qroute::layering::LayeringMode;
use qroute::placement::{Placement, PlacementMethod, ScoreParams};
use qroute::router::{transpile, RouterConfig, RouterState};
use qroute::{parse_qasm, random_circuit, verify, Circuit, Gate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{brute_force_matching, floyd_warshall, random_graph, random_placement};

type Check = Result<String, String>;

fn bench_dir() -> PathBuf {
    std::env::var_os("QROUTE_BENCH_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../benchmarks"))
}

fn load(name: &str) -> Result<Circuit, String> {
    let path = bench_dir().join(format!("{name}.qasm"));
    let text = std::fs::read_to_string(&path).map_err(|e| format!("missing input {}: {e}", path.display()))?;
    parse_qasm(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn within(limit: Duration, started: Instant) -> Result<(), String> {
    let took = started.elapsed();
    if took > limit {
        Err(format!("took {took:.1?}, limit {limit:?}"))
    } else {
        Ok(())
    }
}

/// Transpiles, verifies and checks the stall guard stayed quiet.
fn routed_swaps(c: &Circuit, g: &CouplingGraph, cfg: &RouterConfig, name: &str) -> Result<usize, String> {
    let r = transpile(c, g, cfg).map_err(|e| format!("{name} seed {}: {e}", cfg.seed))?;
    let report = verify(c, &r.compiled, g, &r.initial_placement, r.swap_count, cfg.layering)
        .map_err(|e| format!("{name}: {e}"))?;
    if !report.is_ok() {
        return Err(format!("{name} seed {}: {:?}", cfg.seed, report.violations));
    }
    if r.stats.stall_trips != 0 {
        return Err(format!(
            "{name} seed {}: stall guard tripped {} times",
            cfg.seed, r.stats.stall_trips
        ));
    }
    Ok(r.swap_count)
}

fn mean_swaps(name: &str, seeds: u64, g: &CouplingGraph) -> Result<f64, String> {
    let c = load(name)?;
    let mut total = 0;
    for seed in 0..seeds {
        let cfg = RouterConfig {
            seed,
            ..RouterConfig::default()
        };
        total += routed_swaps(&c, g, &cfg, name)?;
    }
    Ok(total as f64 / seeds as f64)
}

fn worked_example() -> Check {
    // Two-by-three grid v1..v6 (vertices 0..5). g1 = cx(q1 at v1, q0 at v5)
    // and g2 = cx(q0, q2 at v3), which g1's target pushes into layer two.
    let g = CouplingGraph::grid(2, 3);
    let c = Circuit::from_gates(3, vec![Gate::cx(1, 0), Gate::cx(0, 2)]).unwrap();
    let p = Placement::new(6, vec![4, 0, 2]).unwrap();
    let fw = floyd_warshall(6, g.edges());
    for u in 0..6 {
        for v in 0..6 {
            if fw[u][v] != Some(u64::from(g.distance(u, v))) {
                return Err(format!("distance ({u},{v}) disagrees with the oracle"));
            }
        }
    }
    let state = RouterState::new(&c, &g, p, &RouterConfig::default()).map_err(|e| e.to_string())?;
    let edges: Vec<_> = state
        .candidate_edges()
        .map_err(|e| e.to_string())?
        .iter()
        .map(|&e| g.edges()[e])
        .collect();
    if edges != [(0, 1), (0, 3), (1, 4), (3, 4), (4, 5)] {
        return Err(format!("candidate edges {edges:?}"));
    }
    let immediate = state.edge_score((1, 4), &ScoreParams::new(1, 0.0).unwrap());
    let discounted = state.edge_score((1, 4), &ScoreParams::new(2, 0.1).unwrap());
    let sigma = state.placement_score(&ScoreParams::new(2, 0.1).unwrap());
    let detail = format!("immediate {immediate}, discounted {discounted}, placement score {sigma}");
    if immediate == 1.0 && discounted == 1.1 && sigma == 2.2 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn ising() -> Check {
    let g = CouplingGraph::tokyo20();
    let mut notes = Vec::new();
    for name in ["ising_model_10", "ising_model_13"] {
        let c = load(name)?;
        for layering in [LayeringMode::Coarse, LayeringMode::Fine] {
            for seed in 0..5 {
                let cfg = RouterConfig {
                    seed,
                    layering,
                    placement: PlacementMethod::Linear,
                    ..RouterConfig::default()
                };
                let started = Instant::now();
                let n = routed_swaps(&c, &g, &cfg, name)?;
                within(Duration::from_secs(5), started).map_err(|e| format!("{name}: {e}"))?;
                if n != 0 {
                    return Err(format!("{name} {layering:?} seed {seed}: {n} swaps"));
                }
            }
        }
        notes.push(format!("{name} 0 swaps"));
    }
    Ok(notes.join(", "))
}

fn small_circuits() -> Check {
    let g = CouplingGraph::tokyo20();
    let started = Instant::now();
    let mut notes = Vec::new();
    let mut bad = Vec::new();
    for (name, paper) in [
        ("4mod5-v1_22", 2.0),
        ("mod5mils_65", 2.33),
        ("alu-v0_27", 3.33),
        ("decod24-v2_43", 3.33),
        ("4gt13_92", 4.0),
    ] {
        let mean = mean_swaps(name, 5, &g)?;
        notes.push(format!("{name} {mean:.2}"));
        if mean > 2.0 * paper {
            bad.push(format!("{name} {mean:.2} > {}", 2.0 * paper));
        }
    }
    within(Duration::from_secs(30), started)?;
    if bad.is_empty() {
        Ok(notes.join(", "))
    } else {
        Err(bad.join(", "))
    }
}

fn medium_circuits() -> Check {
    let g = CouplingGraph::tokyo20();
    let started = Instant::now();
    let rd84 = mean_swaps("rd84_142", 5, &g)?;
    let adr4 = mean_swaps("adr4_197", 5, &g)?;
    within(Duration::from_secs(300), started)?;
    let detail = format!("rd84_142 {rd84:.2} (limit 67), adr4_197 {adr4:.2} (limit 375)");
    if rd84 <= 67.0 && adr4 <= 375.0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn large_circuit() -> Check {
    let g = CouplingGraph::tokyo20();
    let c = load("sym9_193")?;
    let started = Instant::now();
    let n = routed_swaps(&c, &g, &RouterConfig::default(), "sym9_193")?;
    within(Duration::from_secs(1800), started)?;
    let detail = format!("sym9_193 {n} swaps in {:.1?} (limit 5232)", started.elapsed());
    if n < 5232 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn property_suite() -> Check {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);

    // (a) routed random circuits verify.
    let graphs = [
        CouplingGraph::line(8),
        CouplingGraph::grid(3, 3),
        CouplingGraph::tokyo20(),
    ];
    let methods = [
        PlacementMethod::Linear,
        PlacementMethod::MatchingGreedy,
        PlacementMethod::MatchingBlossom,
        PlacementMethod::Multi,
    ];
    for case in 0..1000u64 {
        let g = &graphs[case as usize % graphs.len()];
        let n = rng.gen_range(2..=g.num_vertices().min(12));
        let c = random_circuit(n, rng.gen_range(0..80), rng.gen_range(0.0..=1.0), case).unwrap();
        let cfg = RouterConfig {
            seed: case,
            discount: [0.0, 0.1, 0.5, 0.9][rng.gen_range(0..4)],
            layering: if rng.gen_bool(0.5) {
                LayeringMode::Coarse
            } else {
                LayeringMode::Fine
            },
            placement: methods[rng.gen_range(0..methods.len())],
            ..RouterConfig::default()
        };
        let r = transpile(&c, g, &cfg).map_err(|e| format!("(a) case {case}: {e}"))?;
        let report = verify(&c, &r.compiled, g, &r.initial_placement, r.swap_count, cfg.layering)
            .map_err(|e| format!("(a) case {case}: {e}"))?;
        if !report.is_ok() {
            return Err(format!("(a) case {case}: {:?}", report.violations));
        }
    }

    // (b) blossom against exhaustive search.
    for case in 0..200 {
        let n = rng.gen_range(1..=12);
        let edges = random_graph(n, rng.gen_range(0.1..0.7), &mut rng);
        let got = blossom_matching(&CouplingGraph::new(n, &edges).unwrap()).len();
        let want = brute_force_matching(n, &edges);
        if got != want {
            return Err(format!("(b) case {case}: blossom {got}, exhaustive {want}"));
        }
    }

    // (c) distances against Floyd-Warshall.
    for case in 0..200 {
        let n = rng.gen_range(1..=16);
        let edges = random_graph(n, rng.gen_range(0.05..0.6), &mut rng);
        let fw = floyd_warshall(n, &edges);
        let d = all_pairs_distances(n, &edges);
        for u in 0..n {
            for v in 0..n {
                if fw[u][v].map_or(UNREACHABLE, |x| x as u32) != d.get(u, v) {
                    return Err(format!("(c) case {case}: ({u},{v})"));
                }
            }
        }
    }

    // (d) zero-discount edge score against the front layer alone.
    for case in 0..300u64 {
        let g = &graphs[case as usize % graphs.len()];
        let n = rng.gen_range(2..=g.num_vertices().min(12));
        let c = random_circuit(n, 40, 0.7, case).unwrap();
        let p = random_placement(n, g.num_vertices(), &mut rng);
        let state = RouterState::new(&c, g, p.clone(), &RouterConfig::default()).unwrap();
        let params = ScoreParams::new(c.len().max(1), 0.0).unwrap();
        let front: Vec<&Gate> = state
            .layering()
            .front()
            .map(|s| c.gate(s))
            .filter(|g| g.is_two_qubit())
            .collect();
        for &(u, v) in g.edges() {
            let mut after = p.clone();
            after.swap_vertices(u, v);
            let direct: i64 = front
                .iter()
                .map(|gate| {
                    let (a, b) = (gate.qubits[0], gate.qubits[1]);
                    i64::from(g.distance(p.vertex(a), p.vertex(b)))
                        - i64::from(g.distance(after.vertex(a), after.vertex(b)))
                })
                .sum();
            if state.edge_score((u, v), &params) != direct as f64 {
                return Err(format!("(d) case {case} edge ({u},{v})"));
            }
        }
    }

    // (e) bench cells repeat exactly, whatever the worker count.
    let circuits = (0..4)
        .map(|i| CircuitSource::Random {
            name: None,
            qubits: 6 + 3 * i,
            gates: 120,
            two_qubit_fraction: 0.6,
            seed: 77 + i as u64,
        })
        .collect();
    let mut suite = SuiteConfig::new(circuits, "tokyo");
    suite.discounts = vec![0.0, 0.5];
    suite.layerings = vec![LayeringMode::Coarse, LayeringMode::Fine];
    suite.repetitions = 2;
    let g = CouplingGraph::tokyo20();
    let tau = |jobs| -> Result<Vec<_>, String> {
        Ok(run_suite(&suite, &g, jobs)
            .map_err(|e| e.to_string())?
            .into_iter()
            .map(|r| {
                (
                    r.circuit,
                    r.discount.to_bits(),
                    r.layering,
                    r.seed,
                    r.swap_count,
                    r.error,
                )
            })
            .collect())
    };
    let (first, second) = (tau(1)?, tau(4)?);
    if first != second {
        return Err("(e) bench cells differ between runs".into());
    }
    for seed in 0..20 {
        let c = random_circuit(12, 150, 0.6, seed).unwrap();
        let cfg = RouterConfig {
            seed,
            ..RouterConfig::default()
        };
        let (a, b) = (transpile(&c, &g, &cfg).unwrap(), transpile(&c, &g, &cfg).unwrap());
        if a.compiled != b.compiled || a.initial_placement != b.initial_placement {
            return Err(format!("(e) transpile seed {seed} differs between runs"));
        }
    }

    within(Duration::from_secs(600), started)?;
    Ok(format!("(a)-(e) hold in {:.1?}", started.elapsed()))
}

fn discount_sweep() -> Check {
    let started = Instant::now();
    let circuits = (0..30)
        .map(|i| CircuitSource::Random {
            name: None,
            qubits: 5 + i % 16,
            gates: 200,
            two_qubit_fraction: 0.5,
            seed: 1000 + i as u64,
        })
        .collect();
    let mut suite = SuiteConfig::new(circuits, "tokyo");
    suite.discounts = (0..10).map(|i| f64::from(i) / 10.0).collect();
    suite.repetitions = 1;
    let records =
        run_suite(&suite, &CouplingGraph::tokyo20(), qroute::bench::default_jobs()).map_err(|e| e.to_string())?;
    let rows = aggregate(&records, GroupBy::Cell);
    let mut medians = Vec::new();
    for row in &rows {
        if row.failures != 0 {
            return Err(format!("discount {}: {} failed runs", row.discount, row.failures));
        }
        match (row.normalized_median, row.normalized_iqr) {
            (Some(m), Some(iqr)) if m.is_finite() && iqr.is_finite() => medians.push(m),
            other => return Err(format!("discount {}: summary {other:?}", row.discount)),
        }
    }
    if medians.len() != 10 {
        return Err(format!("{} cells summarised", medians.len()));
    }
    within(Duration::from_secs(900), started)?;
    let max = medians.iter().copied().fold(f64::MIN, f64::max);
    let min = medians.iter().copied().fold(f64::MAX, f64::min);
    let detail = format!(
        "normalized medians {:.4}..{:.4}, ratio {:.3} (limit 1.3)",
        min,
        max,
        max / min
    );
    if max <= 1.3 * min {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn main() {
    let criteria: [(&str, fn() -> Check); 7] = [
        ("worked example scores", worked_example),
        ("ising regressions", ising),
        ("small-circuit swap counts", small_circuits),
        ("medium-circuit swap counts", medium_circuits),
        ("large circuit", large_circuit),
        ("property suite", property_suite),
        ("discount sweep", discount_sweep),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let (verdict, detail) = match check() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!(
            "ACCEPTANCE {} {verdict} {name}: {detail} [{:.1?}]",
            i + 1,
            started.elapsed()
        );
    }
    if failed > 0 {
        println!("{failed} of {} acceptance criteria failed", criteria.len());
        std::process::exit(1);
    }
}

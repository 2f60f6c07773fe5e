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

//! SWAP routing.
//!
//! Each iteration executes every front-layer gate whose operands are
//! adjacent, re-places qubits that have not been used yet, and, when nothing
//! is executable, inserts one SWAP on the candidate edge with the largest
//! edge score ([`Selection`] picks immediate or discounted). Ties go to a bounded rollout: every tied edge is
//! swapped on a cloned state and routing continues for up to `D` more SWAPs.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, Gate, GateKind};
use crate::graph::{CouplingGraph, UNREACHABLE};
use crate::layering::{Layering, LayeringError, LayeringMode};
use crate::placement::{
    horizon_gates, initial_placement, layered_sum, score_horizon, HorizonGate, Placement, PlacementError,
    PlacementMethod, ScoreParams,
};

/// Relative tolerance under which two edge scores count as tied.
const TIE_EPS: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum RouteError {
    #[error(transparent)]
    Placement(#[from] PlacementError),
    #[error(transparent)]
    Layering(#[from] LayeringError),
    #[error("placement covers {placed} qubits but the circuit has {qubits}")]
    PlacementSize { placed: usize, qubits: usize },
    #[error("placement is over {placed} vertices but the graph has {vertices}")]
    GraphSize { placed: usize, vertices: usize },
    #[error("gate {seq_index} spans disconnected vertices {from} and {to}")]
    Unroutable { seq_index: usize, from: usize, to: usize },
    #[error("the front layer has no two-qubit gate")]
    EmptyFront,
    #[error("tie cap must be at least 1")]
    ZeroTieCap,
}

/// Score that picks the SWAP outside of rollouts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Selection {
    /// Front-layer distance gain only; the discounted score is used by
    /// rollouts.
    #[default]
    Immediate,
    /// Discounted score over the configured horizon.
    Discounted,
}

impl std::str::FromStr for Selection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "immediate" => Ok(Selection::Immediate),
            "discounted" => Ok(Selection::Discounted),
            other => Err(format!("unknown selection `{other}`")),
        }
    }
}

impl std::fmt::Display for Selection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Selection::Immediate => "immediate",
            Selection::Discounted => "discounted",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RouterConfig {
    pub discount: f64,
    pub horizon: usize,
    pub lookahead_depth: usize,
    pub layering: LayeringMode,
    pub placement: PlacementMethod,
    /// Candidates drawn by [`PlacementMethod::Multi`].
    pub candidates: usize,
    /// Upper bound on random SWAPs applied to each multi-placement candidate.
    pub perturb_max: usize,
    /// Most tied edges handed to the rollout; the lowest-index ones are kept.
    pub tie_cap: usize,
    pub selection: Selection,
    pub seed: u64,
}

impl Default for RouterConfig {
    fn default() -> Self {
        RouterConfig {
            discount: 0.1,
            horizon: 40,
            lookahead_depth: 7,
            layering: LayeringMode::Coarse,
            placement: PlacementMethod::Multi,
            candidates: 16,
            perturb_max: 3,
            tie_cap: 8,
            selection: Selection::Immediate,
            seed: 0,
        }
    }
}

impl RouterConfig {
    pub fn score_params(&self) -> Result<ScoreParams, PlacementError> {
        ScoreParams::new(self.horizon, self.discount)
    }
}

/// How a rollout ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScoreKind {
    /// Routing completed; the value is `D' - D`.
    EarlyFinish,
    /// Depth exhausted; the value is the placement score reached.
    PlacementScore,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TieBreakOutcome {
    pub edge: (usize, usize),
    pub edge_index: usize,
    pub kind: ScoreKind,
    pub value: f64,
}

impl TieBreakOutcome {
    fn beats(&self, other: &TieBreakOutcome) -> bool {
        (self.kind, self.value) < (other.kind, other.value)
    }

    fn ties(&self, other: &TieBreakOutcome) -> bool {
        self.kind == other.kind && self.value == other.value
    }
}

/// Counters describing one routing run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RouteStats {
    pub iterations: usize,
    pub tie_breaks: usize,
    pub free_moves: usize,
    pub stall_trips: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RouteResult {
    /// Compiled circuit over physical vertices.
    pub compiled: Circuit,
    pub swap_count: usize,
    /// Placement that the compiled circuit assumes at its start. Differs
    /// from the requested one when unused qubits were re-placed.
    pub initial_placement: Placement,
    pub final_placement: Placement,
    pub stats: RouteStats,
}

/// Horizon plus, for each qubit, the positions of its horizon gates.
struct IndexedHorizon {
    gates: Vec<HorizonGate>,
    by_qubit: Vec<Vec<usize>>,
}

impl IndexedHorizon {
    fn new(gates: Vec<HorizonGate>, num_qubits: usize) -> Self {
        let mut by_qubit = vec![Vec::new(); num_qubits];
        for (i, h) in gates.iter().enumerate() {
            by_qubit[h.qubits.0].push(i);
            by_qubit[h.qubits.1].push(i);
        }
        IndexedHorizon { gates, by_qubit }
    }

    /// Horizon gates touching `a` or `b`, in horizon order, without repeats.
    fn touching(&self, a: Option<usize>, b: Option<usize>) -> impl Iterator<Item = &HorizonGate> {
        let empty: &[usize] = &[];
        let xs = a.map_or(empty, |q| &self.by_qubit[q]);
        let ys = b.map_or(empty, |q| &self.by_qubit[q]);
        let (mut i, mut j) = (0, 0);
        std::iter::from_fn(move || {
            let next = match (xs.get(i), ys.get(j)) {
                (Some(&x), Some(&y)) if x == y => {
                    i += 1;
                    j += 1;
                    x
                }
                (Some(&x), Some(&y)) if x < y => {
                    i += 1;
                    x
                }
                (_, Some(&y)) => {
                    j += 1;
                    y
                }
                (Some(&x), None) => {
                    i += 1;
                    x
                }
                (None, None) => return None,
            };
            Some(&self.gates[next])
        })
    }
}

/// Mutable routing state. Cloning it is how rollouts branch.
#[derive(Clone, Debug)]
pub struct RouterState<'a> {
    circuit: &'a Circuit,
    graph: &'a CouplingGraph,
    params: ScoreParams,
    selection: Selection,
    layering: Layering,
    placement: Placement,
    /// For every vertex, the starting vertex of whatever now sits on it.
    origin: Vec<usize>,
    initial: Vec<usize>,
    touched: Vec<bool>,
    free_count: usize,
    swap_count: usize,
    rng: ChaCha8Rng,
}

impl<'a> RouterState<'a> {
    pub fn new(
        circuit: &'a Circuit,
        graph: &'a CouplingGraph,
        placement: Placement,
        config: &RouterConfig,
    ) -> Result<Self, RouteError> {
        if placement.num_qubits() != circuit.num_qubits() {
            return Err(RouteError::PlacementSize {
                placed: placement.num_qubits(),
                qubits: circuit.num_qubits(),
            });
        }
        if placement.num_vertices() != graph.num_vertices() {
            return Err(RouteError::GraphSize {
                placed: placement.num_vertices(),
                vertices: graph.num_vertices(),
            });
        }
        if config.tie_cap == 0 {
            return Err(RouteError::ZeroTieCap);
        }
        let params = config.score_params()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        // Keep the router's stream apart from the placement stream.
        rng.set_stream(1);
        Ok(RouterState {
            circuit,
            graph,
            params,
            selection: config.selection,
            layering: Layering::build(circuit, config.layering),
            initial: placement.as_slice().to_vec(),
            origin: (0..graph.num_vertices()).collect(),
            touched: vec![false; circuit.num_qubits()],
            free_count: circuit.num_qubits(),
            swap_count: 0,
            placement,
            rng,
        })
    }

    pub fn placement(&self) -> &Placement {
        &self.placement
    }

    pub fn layering(&self) -> &Layering {
        &self.layering
    }

    pub fn swap_count(&self) -> usize {
        self.swap_count
    }

    pub fn is_free(&self, qubit: usize) -> bool {
        !self.touched[qubit]
    }

    pub fn is_done(&self) -> bool {
        self.layering.is_empty()
    }

    /// Starting placement consistent with every move made so far.
    pub fn initial_placement(&self) -> Placement {
        Placement::new(self.graph.num_vertices(), self.initial.clone()).expect("re-placement keeps the start injective")
    }

    fn is_executable(&self, gate: &Gate) -> bool {
        !gate.is_two_qubit()
            || self.graph.is_edge(
                self.placement.vertex(gate.qubits[0]),
                self.placement.vertex(gate.qubits[1]),
            )
    }

    /// Front-layer gates that can run under the current placement, in
    /// sequence order.
    pub fn executable_gates(&self) -> Vec<usize> {
        self.layering
            .front()
            .filter(|&s| self.is_executable(self.circuit.gate(s)))
            .collect()
    }

    fn has_executable(&self) -> bool {
        self.layering.front().any(|s| self.is_executable(self.circuit.gate(s)))
    }

    /// The gates mapped onto vertices, in the order given.
    pub fn physical(&self, gates: &[usize]) -> Vec<Gate> {
        gates
            .iter()
            .map(|&s| {
                let g = self.circuit.gate(s);
                let qubits = g.qubits.iter().map(|&q| self.placement.vertex(q)).collect();
                Gate::new(g.kind.clone(), qubits, g.params.clone())
            })
            .collect()
    }

    /// Removes executed front-layer gates and re-layers what is left.
    pub fn execute(&mut self, gates: &[usize]) -> Result<(), RouteError> {
        self.layering = self.layering.relayer_after_removal(gates, self.circuit)?;
        for &s in gates {
            for &q in &self.circuit.gate(s).qubits {
                if !self.touched[q] {
                    self.touched[q] = true;
                    self.free_count -= 1;
                }
            }
        }
        Ok(())
    }

    pub fn apply_swap(&mut self, edge: (usize, usize)) {
        let (u, v) = edge;
        self.placement.swap_vertices(u, v);
        self.origin.swap(u, v);
        self.swap_count += 1;
    }

    fn horizon(&self, params: &ScoreParams) -> IndexedHorizon {
        IndexedHorizon::new(
            horizon_gates(self.circuit, &self.layering, params),
            self.circuit.num_qubits(),
        )
    }

    pub fn placement_score(&self, params: &ScoreParams) -> f64 {
        score_horizon(
            &horizon_gates(self.circuit, &self.layering, params),
            &self.placement,
            self.graph,
        )
    }

    fn dist(&self, u: usize, v: usize) -> i64 {
        self.graph.distance(u, v) as i64
    }

    /// Score change when the qubits `moved` sit at the paired vertices.
    fn move_delta(&self, horizon: &IndexedHorizon, moved: [(usize, usize); 2], count: usize) -> f64 {
        let moved = &moved[..count];
        let at = |q: usize| {
            moved
                .iter()
                .find(|&&(m, _)| m == q)
                .map_or(self.placement.vertex(q), |&(_, v)| v)
        };
        let b = (count == 2).then(|| moved[1].0);
        layered_sum(horizon.touching(Some(moved[0].0), b), |h| {
            let (x, y) = h.qubits;
            self.dist(at(x), at(y)) - self.dist(self.placement.vertex(x), self.placement.vertex(y))
        })
    }

    /// Moves each unused qubit, in index order, by its best strictly
    /// improving relocation or exchange with another unused qubit. Returns
    /// the number of moves made.
    pub fn refine_free_qubits(&mut self) -> usize {
        if self.free_count == 0 {
            return 0;
        }
        let horizon = self.horizon(&self.params.clone());
        let mut moves = 0;
        for q in 0..self.circuit.num_qubits() {
            if self.touched[q] {
                continue;
            }
            let here = self.placement.vertex(q);
            // (delta, relocate-to or exchange-with)
            let mut best: Option<(f64, Result<usize, usize>)> = None;
            let mut consider = |delta: f64, mv: Result<usize, usize>| {
                if delta < -TIE_EPS && best.is_none_or(|(d, _)| delta < d) {
                    best = Some((delta, mv));
                }
            };
            if !horizon.by_qubit[q].is_empty() {
                for w in 0..self.graph.num_vertices() {
                    if self.placement.qubit_at(w).is_none() {
                        consider(self.move_delta(&horizon, [(q, w), (q, w)], 1), Ok(w));
                    }
                }
            }
            for r in 0..self.circuit.num_qubits() {
                if r == q || self.touched[r] {
                    continue;
                }
                if horizon.by_qubit[q].is_empty() && horizon.by_qubit[r].is_empty() {
                    continue;
                }
                let there = self.placement.vertex(r);
                consider(self.move_delta(&horizon, [(q, there), (r, here)], 2), Err(r));
            }
            match best {
                Some((_, Ok(w))) => {
                    self.initial[q] = self.origin[w];
                    self.placement.relocate(q, w).expect("target vertex is free");
                    moves += 1;
                }
                Some((_, Err(r))) => {
                    self.initial.swap(q, r);
                    self.placement.exchange(q, r);
                    moves += 1;
                }
                None => {}
            }
        }
        moves
    }

    /// Edges with an endpoint holding an operand of a front-layer two-qubit
    /// gate, by ascending edge index.
    pub fn candidate_edges(&self) -> Result<Vec<usize>, RouteError> {
        let mut vertices = Vec::new();
        for s in self.layering.front() {
            let gate = self.circuit.gate(s);
            if gate.is_two_qubit() {
                vertices.extend(gate.qubits.iter().map(|&q| self.placement.vertex(q)));
            }
        }
        if vertices.is_empty() {
            return Err(RouteError::EmptyFront);
        }
        let mut out: Vec<usize> = vertices
            .iter()
            .flat_map(|&v| {
                self.graph
                    .neighbors(v)
                    .iter()
                    .map(move |&u| self.graph.edge_index(u, v).expect("neighbour pairs are edges"))
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    fn edge_score_in(&self, horizon: &IndexedHorizon, edge: (usize, usize)) -> f64 {
        let (u, v) = edge;
        let (a, b) = (self.placement.qubit_at(u), self.placement.qubit_at(v));
        let after = |q: usize| {
            if Some(q) == a {
                v
            } else if Some(q) == b {
                u
            } else {
                self.placement.vertex(q)
            }
        };
        layered_sum(horizon.touching(a, b), |h| {
            let (x, y) = h.qubits;
            self.dist(self.placement.vertex(x), self.placement.vertex(y)) - self.dist(after(x), after(y))
        })
    }

    /// Discounted reduction in operand distance over the horizon if the
    /// contents of `edge`'s endpoints were exchanged.
    pub fn edge_score(&self, edge: (usize, usize), params: &ScoreParams) -> f64 {
        self.edge_score_in(&self.horizon(params), edge)
    }

    /// Candidate edges sharing the maximal edge score.
    pub fn best_edges(&self, params: &ScoreParams) -> Result<Vec<usize>, RouteError> {
        self.check_reachable()?;
        let candidates = self.candidate_edges()?;
        let horizon = self.horizon(params);
        let scores: Vec<f64> = candidates
            .iter()
            .map(|&e| self.edge_score_in(&horizon, self.graph.edges()[e]))
            .collect();
        let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let tol = TIE_EPS * max.abs().max(1.0);
        Ok(candidates
            .into_iter()
            .zip(scores)
            .filter(|&(_, s)| s >= max - tol)
            .map(|(e, _)| e)
            .collect())
    }

    fn check_reachable(&self) -> Result<(), RouteError> {
        for s in self.layering.front() {
            let gate = self.circuit.gate(s);
            if gate.is_two_qubit() {
                let (from, to) = (
                    self.placement.vertex(gate.qubits[0]),
                    self.placement.vertex(gate.qubits[1]),
                );
                if self.graph.distance(from, to) == UNREACHABLE {
                    return Err(RouteError::Unroutable { seq_index: s, from, to });
                }
            }
        }
        Ok(())
    }

    fn front_two_qubit(&self) -> usize {
        self.layering
            .front()
            .filter(|&s| self.circuit.gate(s).is_two_qubit())
            .count()
    }

    /// Horizon used inside rollouts: the configured one, widened to reach
    /// past the front layer.
    fn rollout_params(&self) -> ScoreParams {
        let front = self.front_two_qubit();
        ScoreParams {
            horizon: self.params.horizon.max(front + 1),
            discount: self.params.discount,
        }
    }

    /// Parameters that pick the SWAP in the main loop.
    pub fn selection_params(&self) -> ScoreParams {
        match self.selection {
            Selection::Discounted => self.params,
            Selection::Immediate => ScoreParams {
                horizon: self.front_two_qubit().max(1),
                discount: 0.0,
            },
        }
    }

    /// Executes and re-places until a SWAP is needed or nothing is left.
    pub fn settle(&mut self) -> Result<(), RouteError> {
        loop {
            let rho = self.executable_gates();
            if !rho.is_empty() {
                self.execute(&rho)?;
            }
            self.refine_free_qubits();
            if self.is_done() || !self.has_executable() {
                return Ok(());
            }
        }
    }

    fn rollout(&self, edge_index: usize, depth: usize) -> Result<TieBreakOutcome, RouteError> {
        let edge = self.graph.edges()[edge_index];
        let mut sim = self.clone();
        sim.apply_swap(edge);
        let mut extra = 0;
        loop {
            sim.settle()?;
            if sim.is_done() {
                return Ok(TieBreakOutcome {
                    edge,
                    edge_index,
                    kind: ScoreKind::EarlyFinish,
                    value: extra as f64 - depth as f64,
                });
            }
            if extra == depth {
                return Ok(TieBreakOutcome {
                    edge,
                    edge_index,
                    kind: ScoreKind::PlacementScore,
                    value: sim.placement_score(&self.params),
                });
            }
            let best = sim.best_edges(&sim.rollout_params())?;
            let pick = if best.len() > 1 {
                *best.choose(&mut sim.rng).expect("non-empty")
            } else {
                best[0]
            };
            sim.apply_swap(sim.graph.edges()[pick]);
            extra += 1;
        }
    }

    /// Rollout result for each of `degenerate` (edge indices).
    pub fn tie_break_outcomes(&self, degenerate: &[usize], depth: usize) -> Result<Vec<TieBreakOutcome>, RouteError> {
        degenerate.iter().map(|&e| self.rollout(e, depth)).collect()
    }

    /// Picks one of the tied edges (indices) by rollout; the `cap`
    /// lowest-index edges are considered. Remaining ties, or `depth == 0`,
    /// are settled with the state's generator.
    pub fn tie_break(&mut self, degenerate: &[usize], depth: usize, cap: usize) -> Result<usize, RouteError> {
        let mut pool = degenerate.to_vec();
        pool.sort_unstable();
        pool.truncate(cap.max(1));
        if depth == 0 {
            return Ok(*pool.choose(&mut self.rng).expect("non-empty"));
        }
        let outcomes = self.tie_break_outcomes(&pool, depth)?;
        let best = outcomes
            .iter()
            .copied()
            .reduce(|b, o| if o.beats(&b) { o } else { b })
            .expect("non-empty");
        let winners: Vec<usize> = outcomes
            .iter()
            .filter(|o| o.ties(&best))
            .map(|o| o.edge_index)
            .collect();
        Ok(if winners.len() > 1 {
            *winners.choose(&mut self.rng).expect("non-empty")
        } else {
            winners[0]
        })
    }

    /// SWAPs that bring the earliest front-layer two-qubit gate's operands
    /// together along a shortest path.
    pub fn forced_path(&self) -> Result<Vec<(usize, usize)>, RouteError> {
        let s = self
            .layering
            .front()
            .find(|&s| self.circuit.gate(s).is_two_qubit())
            .ok_or(RouteError::EmptyFront)?;
        let gate = self.circuit.gate(s);
        let (from, to) = (
            self.placement.vertex(gate.qubits[0]),
            self.placement.vertex(gate.qubits[1]),
        );
        let path = self
            .graph
            .shortest_path(from, to)
            .ok_or(RouteError::Unroutable { seq_index: s, from, to })?;
        Ok(path
            .windows(2)
            .take(path.len().saturating_sub(2))
            .map(|w| (w[0], w[1]))
            .collect())
    }

    /// Routes everything left, appending the physical gates to `out` when
    /// given.
    pub fn run(&mut self, config: &RouterConfig, mut out: Option<&mut Circuit>) -> Result<RouteStats, RouteError> {
        config.score_params()?;
        let mut emit = |gates: Vec<Gate>| {
            if let Some(out) = out.as_deref_mut() {
                for g in gates {
                    out.push(g).expect("physical gates stay in range");
                }
            }
        };
        let mut stats = RouteStats::default();
        // States seen since the last gate ran; a repeat means the scores cycle.
        let mut seen: HashSet<u64> = HashSet::new();
        while !self.is_done() {
            stats.iterations += 1;
            let rho = self.executable_gates();
            if !rho.is_empty() {
                emit(self.physical(&rho));
                self.execute(&rho)?;
                seen.clear();
            }
            stats.free_moves += self.refine_free_qubits();
            if self.is_done() || self.has_executable() {
                continue;
            }
            if !seen.insert(self.fingerprint()) {
                stats.stall_trips += 1;
                for edge in self.forced_path()? {
                    emit(vec![Gate::swap(edge.0, edge.1)]);
                    self.apply_swap(edge);
                }
                continue;
            }
            let best = self.best_edges(&self.selection_params())?;
            let pick = if best.len() > 1 {
                stats.tie_breaks += 1;
                self.tie_break(&best, config.lookahead_depth, config.tie_cap)?
            } else {
                best[0]
            };
            let edge = self.graph.edges()[pick];
            emit(vec![Gate::swap(edge.0, edge.1)]);
            self.apply_swap(edge);
        }
        Ok(stats)
    }

    fn fingerprint(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.placement.as_slice().hash(&mut h);
        self.layering.front().for_each(|s| s.hash(&mut h));
        h.finish()
    }
}

/// Routes `circuit` onto `graph` starting from `placement`.
pub fn route(
    circuit: &Circuit,
    graph: &CouplingGraph,
    placement: &Placement,
    config: &RouterConfig,
) -> Result<RouteResult, RouteError> {
    let mut state = RouterState::new(circuit, graph, placement.clone(), config)?;
    let mut out = circuit.empty_like(graph.num_vertices());
    let stats = state.run(config, Some(&mut out))?;
    debug_assert_eq!(
        out.count_kind(&GateKind::Swap) - circuit.count_kind(&GateKind::Swap),
        state.swap_count
    );
    Ok(RouteResult {
        compiled: out,
        swap_count: state.swap_count,
        initial_placement: state.initial_placement(),
        final_placement: state.placement.clone(),
        stats,
    })
}

/// Placement followed by routing, both driven by `config`.
pub fn transpile(circuit: &Circuit, graph: &CouplingGraph, config: &RouterConfig) -> Result<RouteResult, RouteError> {
    let params = config.score_params()?;
    let layering = Layering::build(circuit, config.layering);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let p0 = initial_placement(
        config.placement,
        circuit,
        &layering,
        graph,
        &params,
        config.candidates,
        config.perturb_max,
        &mut rng,
    )?;
    route(circuit, graph, &p0, config)
}

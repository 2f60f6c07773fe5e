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

//! Initial qubit placement and the discounted placement score.
//!
//! The score of a placement is the sum, over the next `horizon` two-qubit
//! gates, of `discount^(layer - 1)` times the hop distance between the
//! gate's operands. Gates enter the horizon in ascending `(layer,
//! seq_index)` order, so a horizon at least as large as the first layer
//! with `discount = 0` scores exactly the first layer (`0^0 = 1`).

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::Circuit;
use crate::graph::{blossom_matching, greedy_matching, maximal_paths, CouplingGraph, DegreeFavor};
use crate::layering::Layering;

#[derive(Debug, Error, PartialEq)]
pub enum PlacementError {
    #[error("circuit needs {qubits} qubits but the coupling graph has {vertices} vertices")]
    TooManyQubits { qubits: usize, vertices: usize },
    #[error("qubit {0} is not placed")]
    UnmappedQubit(usize),
    #[error("vertex {vertex} out of range for {num_vertices} vertices")]
    VertexOutOfRange { vertex: usize, num_vertices: usize },
    #[error("qubits {0} and {1} share vertex {2}")]
    NotInjective(usize, usize, usize),
    #[error("vertex {0} is occupied")]
    Occupied(usize),
    #[error("horizon must be at least 1")]
    ZeroHorizon,
    #[error("discount {0} outside [0, 1]")]
    BadDiscount(f64),
    #[error("candidate count must be at least 1")]
    NoCandidates,
}

/// Injective map from logical qubits to coupling-graph vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Placement {
    forward: Vec<usize>,
    reverse: Vec<Option<usize>>,
}

impl Placement {
    pub fn new(num_vertices: usize, forward: Vec<usize>) -> Result<Self, PlacementError> {
        let mut reverse = vec![None; num_vertices];
        for (q, &v) in forward.iter().enumerate() {
            if v >= num_vertices {
                return Err(PlacementError::VertexOutOfRange {
                    vertex: v,
                    num_vertices,
                });
            }
            if let Some(other) = reverse[v] {
                return Err(PlacementError::NotInjective(other, q, v));
            }
            reverse[v] = Some(q);
        }
        Ok(Placement { forward, reverse })
    }

    /// Qubit `i` on vertex `i`.
    pub fn identity(num_qubits: usize, num_vertices: usize) -> Result<Self, PlacementError> {
        if num_qubits > num_vertices {
            return Err(PlacementError::TooManyQubits {
                qubits: num_qubits,
                vertices: num_vertices,
            });
        }
        Placement::new(num_vertices, (0..num_qubits).collect())
    }

    #[inline]
    pub fn vertex(&self, qubit: usize) -> usize {
        self.forward[qubit]
    }

    #[inline]
    pub fn qubit_at(&self, vertex: usize) -> Option<usize> {
        self.reverse[vertex]
    }

    pub fn num_qubits(&self) -> usize {
        self.forward.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.reverse.len()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.forward
    }

    /// Exchanges whatever sits on `u` and `v`.
    pub fn swap_vertices(&mut self, u: usize, v: usize) {
        let (a, b) = (self.reverse[u], self.reverse[v]);
        self.reverse[u] = b;
        self.reverse[v] = a;
        if let Some(a) = a {
            self.forward[a] = v;
        }
        if let Some(b) = b {
            self.forward[b] = u;
        }
    }

    /// Moves `qubit` to an unoccupied vertex.
    pub fn relocate(&mut self, qubit: usize, vertex: usize) -> Result<(), PlacementError> {
        if self.reverse[vertex].is_some() {
            return Err(PlacementError::Occupied(vertex));
        }
        let old = self.forward[qubit];
        self.reverse[old] = None;
        self.reverse[vertex] = Some(qubit);
        self.forward[qubit] = vertex;
        Ok(())
    }

    pub fn exchange(&mut self, a: usize, b: usize) {
        let (va, vb) = (self.forward[a], self.forward[b]);
        self.swap_vertices(va, vb);
    }

    /// Order-sensitive hash used by the router's stall detection.
    pub fn fingerprint(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.forward.hash(&mut h);
        h.finish()
    }
}

/// Decision horizon and discount factor shared by placement and edge scores.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreParams {
    pub horizon: usize,
    pub discount: f64,
}

impl ScoreParams {
    pub fn new(horizon: usize, discount: f64) -> Result<Self, PlacementError> {
        if horizon == 0 {
            return Err(PlacementError::ZeroHorizon);
        }
        if !(0.0..=1.0).contains(&discount) {
            return Err(PlacementError::BadDiscount(discount));
        }
        Ok(ScoreParams { horizon, discount })
    }

    /// `discount^(layer - 1)`, with `0^0 = 1`.
    #[inline]
    pub fn weight(&self, layer: usize) -> f64 {
        self.discount.powi((layer - 1) as i32)
    }
}

/// One two-qubit gate inside the decision horizon.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HorizonGate {
    pub seq_index: usize,
    pub qubits: (usize, usize),
    pub layer: usize,
    pub weight: f64,
}

/// The first `params.horizon` two-qubit gates in `(layer, seq_index)` order.
pub fn horizon_gates(circuit: &Circuit, layering: &Layering, params: &ScoreParams) -> Vec<HorizonGate> {
    let mut per_layer = vec![0usize; layering.num_layers() + 1];
    for (s, l) in layering.iter() {
        if circuit.gate(s).is_two_qubit() {
            per_layer[l] += 1;
        }
    }
    // Last layer that contributes and how many of its gates fit.
    let mut budget = params.horizon;
    let mut cutoff = layering.num_layers();
    let mut last_take = usize::MAX;
    for (l, &count) in per_layer.iter().enumerate().skip(1) {
        if count >= budget {
            cutoff = l;
            last_take = budget;
            break;
        }
        budget -= count;
    }
    let mut out = Vec::with_capacity(params.horizon.min(layering.len()));
    let mut taken_at_cutoff = 0;
    for (s, l) in layering.iter() {
        let gate = circuit.gate(s);
        if !gate.is_two_qubit() || l > cutoff {
            continue;
        }
        if l == cutoff {
            if taken_at_cutoff == last_take {
                continue;
            }
            taken_at_cutoff += 1;
        }
        out.push(HorizonGate {
            seq_index: s,
            qubits: (gate.qubits[0], gate.qubits[1]),
            layer: l,
            weight: params.weight(l),
        });
    }
    out.sort_by_key(|h| (h.layer, h.seq_index));
    out
}

/// `sum(weight * value)` over horizon gates given in layer order. Values are
/// totalled per layer before weighting, so equal per-layer totals give
/// bit-identical sums whatever the gate order.
pub fn layered_sum<'h>(
    gates: impl IntoIterator<Item = &'h HorizonGate>,
    mut value: impl FnMut(&HorizonGate) -> i64,
) -> f64 {
    let mut total = 0.0;
    let mut current: Option<(usize, f64)> = None;
    let mut acc = 0i64;
    for h in gates {
        match current {
            Some((layer, _)) if layer == h.layer => {}
            Some((layer, weight)) => {
                debug_assert!(layer < h.layer);
                total += weight * acc as f64;
                acc = 0;
                current = Some((h.layer, h.weight));
            }
            None => current = Some((h.layer, h.weight)),
        }
        acc += value(h);
    }
    if let Some((_, weight)) = current {
        total += weight * acc as f64;
    }
    total
}

/// Placement score over a precomputed horizon.
pub fn score_horizon(horizon: &[HorizonGate], placement: &Placement, graph: &CouplingGraph) -> f64 {
    layered_sum(horizon, |h| {
        graph.distance(placement.vertex(h.qubits.0), placement.vertex(h.qubits.1)) as i64
    })
}

/// Discounted placement score of `placement` for the gates left in
/// `layering`.
pub fn placement_score(
    placement: &Placement,
    layering: &Layering,
    circuit: &Circuit,
    graph: &CouplingGraph,
    params: &ScoreParams,
) -> Result<f64, PlacementError> {
    let horizon = horizon_gates(circuit, layering, params);
    for h in &horizon {
        for q in [h.qubits.0, h.qubits.1] {
            if q >= placement.num_qubits() {
                return Err(PlacementError::UnmappedQubit(q));
            }
        }
    }
    Ok(score_horizon(&horizon, placement, graph))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatchingAlgorithm {
    Greedy,
    Blossom,
}

/// Partially built placement.
struct Builder<'a> {
    graph: &'a CouplingGraph,
    forward: Vec<Option<usize>>,
    occupied: Vec<bool>,
}

impl<'a> Builder<'a> {
    fn new(num_qubits: usize, graph: &'a CouplingGraph) -> Result<Self, PlacementError> {
        if num_qubits > graph.num_vertices() {
            return Err(PlacementError::TooManyQubits {
                qubits: num_qubits,
                vertices: graph.num_vertices(),
            });
        }
        Ok(Builder {
            graph,
            forward: vec![None; num_qubits],
            occupied: vec![false; graph.num_vertices()],
        })
    }

    fn put(&mut self, q: usize, v: usize) {
        self.forward[q] = Some(v);
        self.occupied[v] = true;
    }

    /// Places every remaining qubit near its already-placed horizon
    /// partners, or on a free high-degree vertex close to the placed ones
    /// when it has none.
    fn fill_by_proximity(&mut self, horizon: &[HorizonGate]) {
        let mut order: Vec<usize> = Vec::new();
        for h in horizon {
            for q in [h.qubits.0, h.qubits.1] {
                if !order.contains(&q) {
                    order.push(q);
                }
            }
        }
        let rest: Vec<usize> = (0..self.forward.len()).filter(|q| !order.contains(q)).collect();
        order.extend(rest);
        for q in order {
            if self.forward[q].is_some() {
                continue;
            }
            let partners: Vec<usize> = horizon
                .iter()
                .filter_map(|h| match h.qubits {
                    (a, b) if a == q => self.forward[b],
                    (a, b) if b == q => self.forward[a],
                    _ => None,
                })
                .collect();
            let placed: Vec<usize> = self.forward.iter().flatten().copied().collect();
            let free = (0..self.graph.num_vertices()).filter(|&v| !self.occupied[v]);
            let dist_sum = |v: usize, targets: &[usize]| -> u64 {
                targets.iter().map(|&t| self.graph.distance(v, t) as u64).sum()
            };
            let best = if partners.is_empty() {
                free.min_by_key(|&v| (std::cmp::Reverse(self.graph.degree(v)), dist_sum(v, &placed), v))
            } else {
                free.min_by_key(|&v| (dist_sum(v, &partners), std::cmp::Reverse(self.graph.degree(v)), v))
            };
            let v = best.expect("enough free vertices");
            self.put(q, v);
        }
    }

    fn finish(self) -> Placement {
        let forward = self
            .forward
            .into_iter()
            .map(|v| v.expect("all qubits placed"))
            .collect();
        Placement::new(self.graph.num_vertices(), forward).expect("builder keeps the map injective")
    }
}

/// Matching-based placement: first-layer two-qubit gates, in sequence order,
/// go onto matching edges sorted by endpoint degree sum (descending); the
/// rest are placed by proximity to their horizon partners.
pub fn matching_placement<R: Rng + ?Sized>(
    circuit: &Circuit,
    layering: &Layering,
    graph: &CouplingGraph,
    algorithm: MatchingAlgorithm,
    params: &ScoreParams,
    rng: &mut R,
) -> Result<Placement, PlacementError> {
    let mut builder = Builder::new(circuit.num_qubits(), graph)?;
    let matching = match algorithm {
        MatchingAlgorithm::Greedy => greedy_matching(graph, rng),
        MatchingAlgorithm::Blossom => blossom_matching(graph),
    };
    let mut slots: Vec<(usize, usize)> = matching.edges().to_vec();
    slots.sort_by_key(|&(u, v)| std::cmp::Reverse(graph.degree(u) + graph.degree(v)));
    let mut slots = slots.into_iter();
    for s in layering.front() {
        let gate = circuit.gate(s);
        if !gate.is_two_qubit() {
            continue;
        }
        let (a, b) = (gate.qubits[0], gate.qubits[1]);
        if builder.forward[a].is_some() || builder.forward[b].is_some() {
            continue;
        }
        let Some((u, v)) = slots.next() else { break };
        builder.put(a, u);
        builder.put(b, v);
    }
    let horizon = horizon_gates(circuit, layering, params);
    builder.fill_by_proximity(&horizon);
    Ok(builder.finish())
}

/// Linear placement: qubits in index order along the greedy paths, longest
/// path first.
pub fn linear_placement(
    circuit: &Circuit,
    graph: &CouplingGraph,
    favor: DegreeFavor,
) -> Result<Placement, PlacementError> {
    let mut builder = Builder::new(circuit.num_qubits(), graph)?;
    let mut paths = maximal_paths(graph, favor);
    paths.sort_by_key(|p| std::cmp::Reverse(p.len()));
    for (q, v) in (0..circuit.num_qubits()).zip(paths.into_iter().flatten()) {
        builder.put(q, v);
    }
    Ok(builder.finish())
}

/// Heuristics that can seed a candidate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Heuristic {
    MatchingGreedy,
    MatchingBlossom,
    LinearHigh,
    LinearLow,
}

impl Heuristic {
    pub const ALL: [Heuristic; 4] = [
        Heuristic::MatchingGreedy,
        Heuristic::MatchingBlossom,
        Heuristic::LinearHigh,
        Heuristic::LinearLow,
    ];

    pub fn place<R: Rng + ?Sized>(
        self,
        circuit: &Circuit,
        layering: &Layering,
        graph: &CouplingGraph,
        params: &ScoreParams,
        rng: &mut R,
    ) -> Result<Placement, PlacementError> {
        match self {
            Heuristic::MatchingGreedy => {
                matching_placement(circuit, layering, graph, MatchingAlgorithm::Greedy, params, rng)
            }
            Heuristic::MatchingBlossom => {
                matching_placement(circuit, layering, graph, MatchingAlgorithm::Blossom, params, rng)
            }
            Heuristic::LinearHigh => linear_placement(circuit, graph, DegreeFavor::High),
            Heuristic::LinearLow => linear_placement(circuit, graph, DegreeFavor::Low),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub heuristic: Heuristic,
    pub perturbations: usize,
    pub placement: Placement,
    pub score: f64,
}

/// Draws `count` candidates, each from a uniformly chosen heuristic followed
/// by up to `perturb_max` random edge swaps, and scores them.
pub fn generate_candidates<R: Rng + ?Sized>(
    circuit: &Circuit,
    layering: &Layering,
    graph: &CouplingGraph,
    params: &ScoreParams,
    count: usize,
    perturb_max: usize,
    rng: &mut R,
) -> Result<Vec<Candidate>, PlacementError> {
    if count == 0 {
        return Err(PlacementError::NoCandidates);
    }
    let horizon = horizon_gates(circuit, layering, params);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let heuristic = *Heuristic::ALL.choose(rng).expect("non-empty");
        let mut placement = heuristic.place(circuit, layering, graph, params, rng)?;
        let perturbations = rng.gen_range(0..=perturb_max);
        if !graph.edges().is_empty() {
            for _ in 0..perturbations {
                let &(u, v) = graph.edges().choose(rng).expect("non-empty");
                placement.swap_vertices(u, v);
            }
        }
        let score = score_horizon(&horizon, &placement, graph);
        out.push(Candidate {
            heuristic,
            perturbations,
            placement,
            score,
        });
    }
    Ok(out)
}

/// Lowest-scoring of `count` generated candidates; earlier candidates win
/// ties.
pub fn generate_placements<R: Rng + ?Sized>(
    circuit: &Circuit,
    layering: &Layering,
    graph: &CouplingGraph,
    params: &ScoreParams,
    count: usize,
    perturb_max: usize,
    rng: &mut R,
) -> Result<Placement, PlacementError> {
    let candidates = generate_candidates(circuit, layering, graph, params, count, perturb_max, rng)?;
    let best = candidates
        .into_iter()
        .reduce(|best, c| if c.score < best.score { c } else { best })
        .expect("count >= 1");
    Ok(best.placement)
}

/// Initial placement strategy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlacementMethod {
    /// Better-scoring of the high- and low-degree linear placements.
    Linear,
    MatchingGreedy,
    MatchingBlossom,
    /// Best of a plurality of perturbed candidates.
    Multi,
}

impl std::str::FromStr for PlacementMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "linear" => Ok(PlacementMethod::Linear),
            "matching-greedy" => Ok(PlacementMethod::MatchingGreedy),
            "matching-blossom" => Ok(PlacementMethod::MatchingBlossom),
            "multi" => Ok(PlacementMethod::Multi),
            other => Err(format!("unknown placement method `{other}`")),
        }
    }
}

impl std::fmt::Display for PlacementMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PlacementMethod::Linear => "linear",
            PlacementMethod::MatchingGreedy => "matching-greedy",
            PlacementMethod::MatchingBlossom => "matching-blossom",
            PlacementMethod::Multi => "multi",
        })
    }
}

/// Runs the chosen strategy. `count` and `perturb_max` only matter for
/// [`PlacementMethod::Multi`].
#[allow(clippy::too_many_arguments)]
pub fn initial_placement<R: Rng + ?Sized>(
    method: PlacementMethod,
    circuit: &Circuit,
    layering: &Layering,
    graph: &CouplingGraph,
    params: &ScoreParams,
    count: usize,
    perturb_max: usize,
    rng: &mut R,
) -> Result<Placement, PlacementError> {
    match method {
        PlacementMethod::Linear => {
            let horizon = horizon_gates(circuit, layering, params);
            let high = linear_placement(circuit, graph, DegreeFavor::High)?;
            let low = linear_placement(circuit, graph, DegreeFavor::Low)?;
            if score_horizon(&horizon, &low, graph) < score_horizon(&horizon, &high, graph) {
                Ok(low)
            } else {
                Ok(high)
            }
        }
        PlacementMethod::MatchingGreedy => {
            matching_placement(circuit, layering, graph, MatchingAlgorithm::Greedy, params, rng)
        }
        PlacementMethod::MatchingBlossom => {
            matching_placement(circuit, layering, graph, MatchingAlgorithm::Blossom, params, rng)
        }
        PlacementMethod::Multi => generate_placements(circuit, layering, graph, params, count, perturb_max, rng),
    }
}

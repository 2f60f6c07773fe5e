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

//! Independent check of a routed circuit.
//!
//! Replays the compiled circuit against the coupling graph while tracking
//! which logical qubit sits on each vertex, and matches every non-inserted
//! gate against the input's dependency front. Shares nothing with the
//! router beyond the commutation predicate.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, Gate, GateKind};
use crate::graph::CouplingGraph;
use crate::layering::{commutes, LayeringMode};
use crate::placement::Placement;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VerifyError {
    #[error("placement covers {placed} qubits but the input has {qubits}")]
    PlacementSize { placed: usize, qubits: usize },
    #[error("placement is over {placed} vertices but the graph has {vertices}")]
    GraphSize { placed: usize, vertices: usize },
    #[error("compiled circuit uses {used} qubits but the graph has {vertices} vertices")]
    CompiledSize { used: usize, vertices: usize },
}

/// One failed check, located by compiled-gate index (or input index for
/// missing gates).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    /// A two-qubit gate acts on a non-adjacent pair.
    NotOnEdge { index: usize, u: usize, v: usize },
    /// A gate acts on a vertex holding no logical qubit.
    EmptyVertex { index: usize, vertex: usize },
    /// No input gate corresponds to this compiled gate.
    Unmatched { index: usize },
    /// The matching input gate still waits on a non-commuting predecessor.
    OutOfOrder {
        index: usize,
        seq_index: usize,
        blocked_by: usize,
    },
    /// An input gate never appeared.
    Missing { seq_index: usize },
    /// Inserted SWAPs differ from the reported count.
    SwapCount { reported: usize, found: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub inserted_swaps: usize,
    pub matched: usize,
    pub violations: Vec<Violation>,
}

impl VerifyReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Input gates not yet seen in the compiled circuit, per qubit.
struct Pending<'a> {
    input: &'a Circuit,
    mode: LayeringMode,
    on_qubit: Vec<Vec<usize>>,
    head: Vec<usize>,
    done: Vec<bool>,
}

impl<'a> Pending<'a> {
    fn new(input: &'a Circuit, mode: LayeringMode) -> Self {
        let mut on_qubit = vec![Vec::new(); input.num_qubits()];
        for g in input.gates() {
            for &q in &g.qubits {
                on_qubit[q].push(g.seq_index);
            }
        }
        Pending {
            input,
            mode,
            head: vec![0; input.num_qubits()],
            done: vec![false; input.len()],
            on_qubit,
        }
    }

    fn waiting(&self, q: usize) -> impl Iterator<Item = usize> + '_ {
        self.on_qubit[q][self.head[q]..]
            .iter()
            .copied()
            .filter(|&s| !self.done[s])
    }

    fn conflicts(&self, a: &Gate, b: &Gate) -> bool {
        match self.mode {
            LayeringMode::Fine => a.shares_qubit(b),
            LayeringMode::Coarse => !commutes(a, b),
        }
    }

    /// Earliest pending input gate equal to `logical`.
    fn find(&self, logical: &Gate) -> Option<usize> {
        let q = *logical.qubits.first()?;
        self.waiting(q).find(|&s| self.input.gate(s).same_operation(logical))
    }

    /// An earlier pending gate that must precede `s`, if any.
    fn blocker(&self, s: usize) -> Option<usize> {
        let gate = self.input.gate(s);
        gate.qubits.iter().find_map(|&q| {
            self.waiting(q)
                .take_while(|&t| t < s)
                .find(|&t| self.conflicts(self.input.gate(t), gate))
        })
    }

    fn mark(&mut self, s: usize) {
        self.done[s] = true;
        for &q in &self.input.gate(s).qubits {
            let list = &self.on_qubit[q];
            while self.head[q] < list.len() && self.done[list[self.head[q]]] {
                self.head[q] += 1;
            }
        }
    }
}

/// Checks that `compiled` runs `input` on `graph` from placement `p0`.
///
/// Every two-qubit gate must sit on an edge; the non-inserted gates, pulled
/// back through the tracked placement, must be a dependency-respecting
/// reordering of the input under `mode`; and the inserted SWAPs must number
/// `reported_swaps`. A compiled SWAP counts as an input SWAP when it matches
/// one that is ready.
pub fn verify(
    input: &Circuit,
    compiled: &Circuit,
    graph: &CouplingGraph,
    p0: &Placement,
    reported_swaps: usize,
    mode: LayeringMode,
) -> Result<VerifyReport, VerifyError> {
    if p0.num_qubits() != input.num_qubits() {
        return Err(VerifyError::PlacementSize {
            placed: p0.num_qubits(),
            qubits: input.num_qubits(),
        });
    }
    if p0.num_vertices() != graph.num_vertices() {
        return Err(VerifyError::GraphSize {
            placed: p0.num_vertices(),
            vertices: graph.num_vertices(),
        });
    }
    if compiled.num_qubits() > graph.num_vertices() {
        return Err(VerifyError::CompiledSize {
            used: compiled.num_qubits(),
            vertices: graph.num_vertices(),
        });
    }
    let mut at: Vec<Option<usize>> = (0..graph.num_vertices()).map(|v| p0.qubit_at(v)).collect();
    let mut pending = Pending::new(input, mode);
    let mut violations = Vec::new();
    let mut inserted = 0;
    let mut matched = 0;

    for (index, gate) in compiled.gates().iter().enumerate() {
        if gate.is_two_qubit() && !graph.is_edge(gate.qubits[0], gate.qubits[1]) {
            violations.push(Violation::NotOnEdge {
                index,
                u: gate.qubits[0],
                v: gate.qubits[1],
            });
        }
        let pulled: Option<Vec<usize>> = gate.qubits.iter().map(|&v| at[v]).collect();
        let logical = pulled.map(|qs| Gate::new(gate.kind.clone(), qs, gate.params.clone()));
        let candidate = logical.as_ref().and_then(|l| pending.find(l));

        if gate.kind == GateKind::Swap {
            let as_input = candidate.filter(|&s| pending.blocker(s).is_none());
            if let Some(s) = as_input {
                pending.mark(s);
                matched += 1;
            } else {
                at.swap(gate.qubits[0], gate.qubits[1]);
                inserted += 1;
            }
            continue;
        }

        if logical.is_none() {
            let vertex = *gate
                .qubits
                .iter()
                .find(|&&v| at[v].is_none())
                .expect("some vertex is empty");
            violations.push(Violation::EmptyVertex { index, vertex });
            continue;
        }
        match candidate {
            None => violations.push(Violation::Unmatched { index }),
            Some(s) => {
                if let Some(t) = pending.blocker(s) {
                    violations.push(Violation::OutOfOrder {
                        index,
                        seq_index: s,
                        blocked_by: t,
                    });
                }
                pending.mark(s);
                matched += 1;
            }
        }
    }

    for s in 0..input.len() {
        if !pending.done[s] {
            violations.push(Violation::Missing { seq_index: s });
        }
    }
    if inserted != reported_swaps {
        violations.push(Violation::SwapCount {
            reported: reported_swaps,
            found: inserted,
        });
    }
    Ok(VerifyReport {
        inserted_swaps: inserted,
        matched,
        violations,
    })
}

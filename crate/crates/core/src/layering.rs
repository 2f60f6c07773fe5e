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

//! Partition of a gate sequence into ordered layers.
//!
//! A gate's layer is one more than the largest layer among the earlier gates
//! it must follow. In fine mode a gate must follow every earlier gate that
//! touches one of its qubits; in coarse mode only the earlier gates it does
//! not commute with. The result is the longest-path layering of the
//! dependency order, which has the fewest layers any ordered scan can give.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Axis, Circuit, Gate, GateKind};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LayeringMode {
    /// Gates sharing a qubit never share a layer.
    Fine,
    /// Gates sharing a qubit may share a layer when they commute.
    #[default]
    Coarse,
}

impl std::str::FromStr for LayeringMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fine" => Ok(LayeringMode::Fine),
            "coarse" => Ok(LayeringMode::Coarse),
            other => Err(format!("unknown layering mode `{other}`")),
        }
    }
}

impl std::fmt::Display for LayeringMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LayeringMode::Fine => "fine",
            LayeringMode::Coarse => "coarse",
        })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LayeringError {
    #[error("gate {0} is not in the first layer")]
    NotInFrontLayer(usize),
}

/// How a gate acts on one of its qubits, as far as commutation goes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Role {
    Control = 0,
    Target = 1,
    ZRotation = 2,
    XRotation = 3,
    Opaque = 4,
}

const ROLES: [Role; 5] = [
    Role::Control,
    Role::Target,
    Role::ZRotation,
    Role::XRotation,
    Role::Opaque,
];

fn role(gate: &Gate, qubit: usize) -> Role {
    match &gate.kind {
        GateKind::Cx if gate.qubits[0] == qubit => Role::Control,
        GateKind::Cx => Role::Target,
        kind => match kind.rotation_axis() {
            Some(Axis::Z) => Role::ZRotation,
            Some(Axis::X) => Role::XRotation,
            None => Role::Opaque,
        },
    }
}

/// Z rotation with control, control with control, X rotation with target,
/// target with target.
fn compatible(a: Role, b: Role) -> bool {
    use Role::*;
    matches!(
        (a, b),
        (ZRotation, Control)
            | (Control, ZRotation)
            | (Control, Control)
            | (XRotation, Target)
            | (Target, XRotation)
            | (Target, Target)
    )
}

/// Whether two gates commute under the CNOT commutation rules.
///
/// True iff every qubit the gates share is covered by one of the four rules;
/// gates with disjoint supports commute vacuously.
pub fn commutes(a: &Gate, b: &Gate) -> bool {
    a.qubits
        .iter()
        .filter(|q| b.qubits.contains(q))
        .all(|&q| compatible(role(a, q), role(b, q)))
}

/// Layer assignment for the gates still to be routed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layering {
    mode: LayeringMode,
    gates: Vec<usize>,
    layer: Vec<usize>,
    num_layers: usize,
}

impl Layering {
    /// Layers every gate of `circuit`.
    pub fn build(circuit: &Circuit, mode: LayeringMode) -> Self {
        Self::build_over(circuit, 0..circuit.len(), mode)
    }

    /// Layers the gates with the given sequence indices, which must be
    /// ascending.
    pub fn build_over(circuit: &Circuit, gates: impl IntoIterator<Item = usize>, mode: LayeringMode) -> Self {
        let gates: Vec<usize> = gates.into_iter().collect();
        debug_assert!(gates.windows(2).all(|w| w[0] < w[1]));
        // Highest layer so far per (qubit, role).
        let mut reach = vec![[0usize; 5]; circuit.num_qubits()];
        let mut layer = Vec::with_capacity(gates.len());
        let mut num_layers = 0;
        for &s in &gates {
            let gate = circuit.gate(s);
            let mut l = 0;
            for &q in &gate.qubits {
                let r = role(gate, q);
                for other in ROLES {
                    if mode == LayeringMode::Fine || !compatible(r, other) {
                        l = l.max(reach[q][other as usize]);
                    }
                }
            }
            l += 1;
            for &q in &gate.qubits {
                let slot = &mut reach[q][role(gate, q) as usize];
                *slot = (*slot).max(l);
            }
            num_layers = num_layers.max(l);
            layer.push(l);
        }
        Layering {
            mode,
            gates,
            layer,
            num_layers,
        }
    }

    /// Layering of the remaining gates once `removed` (all from the first
    /// layer) have been executed.
    pub fn relayer_after_removal(&self, removed: &[usize], circuit: &Circuit) -> Result<Layering, LayeringError> {
        if removed.is_empty() {
            return Ok(self.clone());
        }
        for &s in removed {
            if self.layer_of(s) != Some(1) {
                return Err(LayeringError::NotInFrontLayer(s));
            }
        }
        let keep = self.gates.iter().copied().filter(|s| !removed.contains(s));
        Ok(Layering::build_over(circuit, keep, self.mode))
    }

    pub fn mode(&self) -> LayeringMode {
        self.mode
    }

    /// Sequence indices still layered, ascending.
    pub fn remaining(&self) -> &[usize] {
        &self.gates
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn num_layers(&self) -> usize {
        self.num_layers
    }

    /// 1-based layer index of a gate, if it is still layered.
    pub fn layer_of(&self, seq_index: usize) -> Option<usize> {
        self.gates.binary_search(&seq_index).ok().map(|i| self.layer[i])
    }

    /// `(seq_index, layer)` pairs in sequence order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.gates.iter().copied().zip(self.layer.iter().copied())
    }

    /// Gates of the first layer, in sequence order.
    pub fn front(&self) -> impl Iterator<Item = usize> + '_ {
        self.iter().filter(|&(_, l)| l == 1).map(|(s, _)| s)
    }

    /// Layers as explicit gate lists, `layers()[0]` being the first layer.
    pub fn layers(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_layers];
        for (s, l) in self.iter() {
            out[l - 1].push(s);
        }
        out
    }
}

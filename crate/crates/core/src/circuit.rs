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

//! Gate-level circuit representation.
//!
//! A [`Circuit`] is an ordered gate sequence over a single register of
//! qubits. Operands are plain indices into that register; whether they are
//! logical qubits or physical vertices depends on where the circuit sits in
//! the pipeline (input circuits are logical, routed circuits are physical).

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CircuitError {
    #[error("gate {index}: operand {qubit} out of range for {num_qubits} qubit(s)")]
    OperandOutOfRange {
        index: usize,
        qubit: usize,
        num_qubits: usize,
    },
    #[error("gate {index}: {name} expects {expected} operand(s), got {got}")]
    Arity {
        index: usize,
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("gate {index}: duplicate operand {qubit}")]
    DuplicateOperands { index: usize, qubit: usize },
    #[error("random circuit needs at least 2 qubits for two-qubit gates, got {0}")]
    TooFewQubits(usize),
    #[error("two-qubit fraction {0} outside [0, 1]")]
    BadFraction(f64),
}

/// Rotation axis used by the commutation rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    Z,
    X,
}

/// The operation a gate performs.
///
/// Named one-qubit gates keep their OpenQASM spelling so a circuit can be
/// written back out unchanged. Anything unrecognised with one operand ends
/// up in [`GateKind::Other`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    S,
    Sdg,
    T,
    Tdg,
    Rx,
    Ry,
    Rz,
    U1,
    U2,
    U3,
    /// Opaque one-qubit operation.
    Other(String),
    Cx,
    Swap,
    /// Measurement into `creg[bit]`.
    Measure {
        creg: String,
        bit: usize,
    },
    /// Barrier over any number of qubits.
    Barrier,
}

impl GateKind {
    pub fn from_name(name: &str) -> GateKind {
        match name {
            "h" => GateKind::H,
            "x" => GateKind::X,
            "y" => GateKind::Y,
            "z" => GateKind::Z,
            "s" => GateKind::S,
            "sdg" => GateKind::Sdg,
            "t" => GateKind::T,
            "tdg" => GateKind::Tdg,
            "rx" => GateKind::Rx,
            "ry" => GateKind::Ry,
            "rz" => GateKind::Rz,
            "u1" => GateKind::U1,
            "u2" => GateKind::U2,
            "u3" | "U" => GateKind::U3,
            "cx" | "CX" => GateKind::Cx,
            "swap" => GateKind::Swap,
            other => GateKind::Other(other.to_string()),
        }
    }

    /// OpenQASM spelling.
    pub fn name(&self) -> &str {
        match self {
            GateKind::H => "h",
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::S => "s",
            GateKind::Sdg => "sdg",
            GateKind::T => "t",
            GateKind::Tdg => "tdg",
            GateKind::Rx => "rx",
            GateKind::Ry => "ry",
            GateKind::Rz => "rz",
            GateKind::U1 => "u1",
            GateKind::U2 => "u2",
            GateKind::U3 => "u3",
            GateKind::Other(name) => name,
            GateKind::Cx => "cx",
            GateKind::Swap => "swap",
            GateKind::Measure { .. } => "measure",
            GateKind::Barrier => "barrier",
        }
    }

    /// Number of qubit operands, `None` for barriers.
    pub fn arity(&self) -> Option<usize> {
        match self {
            GateKind::Cx | GateKind::Swap => Some(2),
            GateKind::Barrier => None,
            _ => Some(1),
        }
    }

    /// Diagonal gates are Z rotations and X/Rx are X rotations; everything
    /// else is treated as a generic one-qubit unitary.
    pub fn rotation_axis(&self) -> Option<Axis> {
        match self {
            GateKind::Z | GateKind::S | GateKind::Sdg | GateKind::T | GateKind::Tdg => Some(Axis::Z),
            GateKind::Rz | GateKind::U1 => Some(Axis::Z),
            GateKind::X | GateKind::Rx => Some(Axis::X),
            _ => None,
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(self, GateKind::Cx | GateKind::Swap)
    }

    /// Measurements and barriers ride along with the circuit but never take
    /// part in placement or routing decisions.
    pub fn is_directive(&self) -> bool {
        matches!(self, GateKind::Measure { .. } | GateKind::Barrier)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    pub params: Vec<f64>,
    pub seq_index: usize,
}

impl Gate {
    pub fn new(kind: GateKind, qubits: Vec<usize>, params: Vec<f64>) -> Self {
        Gate {
            kind,
            qubits,
            params,
            seq_index: 0,
        }
    }

    pub fn cx(control: usize, target: usize) -> Self {
        Gate::new(GateKind::Cx, vec![control, target], Vec::new())
    }

    pub fn swap(a: usize, b: usize) -> Self {
        Gate::new(GateKind::Swap, vec![a, b], Vec::new())
    }

    pub fn single(kind: GateKind, qubit: usize) -> Self {
        Gate::new(kind, vec![qubit], Vec::new())
    }

    pub fn rz(qubit: usize, angle: f64) -> Self {
        Gate::new(GateKind::Rz, vec![qubit], vec![angle])
    }

    pub fn rx(qubit: usize, angle: f64) -> Self {
        Gate::new(GateKind::Rx, vec![qubit], vec![angle])
    }

    pub fn is_two_qubit(&self) -> bool {
        self.kind.is_two_qubit()
    }

    pub fn acts_on(&self, qubit: usize) -> bool {
        self.qubits.contains(&qubit)
    }

    pub fn shares_qubit(&self, other: &Gate) -> bool {
        self.qubits.iter().any(|q| other.qubits.contains(q))
    }

    /// Same operation on the same operands, ignoring position.
    pub fn same_operation(&self, other: &Gate) -> bool {
        self.kind == other.kind && self.qubits == other.qubits && self.params == other.params
    }
}

/// A classical register declaration carried through for measurements.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassicalRegister {
    pub name: String,
    pub size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    num_qubits: usize,
    register: String,
    cregs: Vec<ClassicalRegister>,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Self::with_register("q", num_qubits)
    }

    pub fn with_register(register: &str, num_qubits: usize) -> Self {
        Circuit {
            num_qubits,
            register: register.to_string(),
            cregs: Vec::new(),
            gates: Vec::new(),
        }
    }

    /// Builds a circuit from gates, renumbering `seq_index` densely.
    pub fn from_gates(num_qubits: usize, gates: Vec<Gate>) -> Result<Self, CircuitError> {
        let mut circuit = Circuit::new(num_qubits);
        for gate in gates {
            circuit.push(gate)?;
        }
        Ok(circuit)
    }

    pub fn add_creg(&mut self, name: &str, size: usize) {
        self.cregs.push(ClassicalRegister {
            name: name.to_string(),
            size,
        });
    }

    /// Appends a gate after validating its operands.
    pub fn push(&mut self, mut gate: Gate) -> Result<usize, CircuitError> {
        let index = self.gates.len();
        if let Some(expected) = gate.kind.arity() {
            if gate.qubits.len() != expected {
                return Err(CircuitError::Arity {
                    index,
                    name: gate.kind.name().to_string(),
                    expected,
                    got: gate.qubits.len(),
                });
            }
        }
        for (i, &q) in gate.qubits.iter().enumerate() {
            if q >= self.num_qubits {
                return Err(CircuitError::OperandOutOfRange {
                    index,
                    qubit: q,
                    num_qubits: self.num_qubits,
                });
            }
            if gate.qubits[..i].contains(&q) {
                return Err(CircuitError::DuplicateOperands { index, qubit: q });
            }
        }
        gate.seq_index = index;
        self.gates.push(gate);
        Ok(index)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn register(&self) -> &str {
        &self.register
    }

    pub fn qubit_name(&self, qubit: usize) -> String {
        format!("{}[{}]", self.register, qubit)
    }

    pub fn qubit_names(&self) -> Vec<String> {
        (0..self.num_qubits).map(|q| self.qubit_name(q)).collect()
    }

    pub fn cregs(&self) -> &[ClassicalRegister] {
        &self.cregs
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gate(&self, seq_index: usize) -> &Gate {
        &self.gates[seq_index]
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Number of gates excluding measurements and barriers.
    pub fn num_gates(&self) -> usize {
        self.gates.iter().filter(|g| !g.kind.is_directive()).count()
    }

    pub fn num_two_qubit_gates(&self) -> usize {
        self.gates.iter().filter(|g| g.is_two_qubit()).count()
    }

    pub fn count_kind(&self, kind: &GateKind) -> usize {
        self.gates.iter().filter(|g| &g.kind == kind).count()
    }

    /// Qubits that appear as an operand of at least one gate.
    pub fn used_qubits(&self) -> Vec<bool> {
        let mut used = vec![false; self.num_qubits];
        for gate in &self.gates {
            for &q in &gate.qubits {
                used[q] = true;
            }
        }
        used
    }

    /// Copy of this circuit's header (register, cregs) over a different
    /// qubit count, with no gates.
    pub fn empty_like(&self, num_qubits: usize) -> Circuit {
        Circuit {
            num_qubits,
            register: self.register.clone(),
            cregs: self.cregs.clone(),
            gates: Vec::new(),
        }
    }
}

/// Deterministic random circuit of CNOTs and one-qubit gates.
///
/// Each gate is a CNOT with probability `two_qubit_fraction`, with its
/// ordered operand pair drawn uniformly over distinct pairs; otherwise a
/// one-qubit gate drawn from a small Clifford+T+rotation menu.
pub fn random_circuit(
    num_qubits: usize,
    num_gates: usize,
    two_qubit_fraction: f64,
    seed: u64,
) -> Result<Circuit, CircuitError> {
    if !(0.0..=1.0).contains(&two_qubit_fraction) {
        return Err(CircuitError::BadFraction(two_qubit_fraction));
    }
    if num_qubits < 2 && two_qubit_fraction > 0.0 {
        return Err(CircuitError::TooFewQubits(num_qubits));
    }
    if num_qubits == 0 && num_gates > 0 {
        return Err(CircuitError::TooFewQubits(num_qubits));
    }
    const ONE_QUBIT: [GateKind; 7] = [
        GateKind::H,
        GateKind::T,
        GateKind::Tdg,
        GateKind::S,
        GateKind::X,
        GateKind::Rz,
        GateKind::Rx,
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut circuit = Circuit::new(num_qubits);
    for _ in 0..num_gates {
        let gate = if rng.gen_bool(two_qubit_fraction) {
            let a = rng.gen_range(0..num_qubits);
            let mut b = rng.gen_range(0..num_qubits - 1);
            if b >= a {
                b += 1;
            }
            Gate::cx(a, b)
        } else {
            let q = rng.gen_range(0..num_qubits);
            let kind = ONE_QUBIT.choose(&mut rng).expect("menu is non-empty").clone();
            let params = match kind {
                GateKind::Rz | GateKind::Rx => vec![rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI)],
                _ => Vec::new(),
            };
            Gate::new(kind, vec![q], params)
        };
        circuit.push(gate)?;
    }
    Ok(circuit)
}

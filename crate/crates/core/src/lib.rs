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

//! Placement and SWAP routing of quantum circuits onto undirected coupling
//! graphs.
//!
//! The pipeline is: parse a circuit ([`qasm`]), pick an initial placement
//! ([`placement`]), route it ([`router`]), and check the result
//! independently ([`verify`]). [`bench`] runs suites of such jobs.

pub mod bench;
pub mod circuit;
pub mod graph;
pub mod layering;
pub mod placement;
pub mod qasm;
pub mod router;
pub mod verify;

pub use circuit::{random_circuit, Circuit, CircuitError, Gate, GateKind};
pub use graph::{CouplingGraph, GraphError};
pub use layering::{commutes, Layering, LayeringMode};
pub use placement::{initial_placement, placement_score, Placement, PlacementMethod, ScoreParams};
pub use qasm::{emit_qasm, parse_qasm, QasmError};
pub use router::{route, transpile, RouteError, RouteResult, RouterConfig, Selection};
pub use verify::{verify, VerifyError, VerifyReport, Violation};

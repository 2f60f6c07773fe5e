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

mod common;

use proptest::prelude::*;
use qroute::circuit::{Circuit, Gate, GateKind};
use qroute::graph::CouplingGraph;
use qroute::layering::{commutes, Layering, LayeringMode};
use qroute::placement::{initial_placement, PlacementMethod, ScoreParams};
use qroute::router::{route, transpile, RouterConfig};
use qroute::{emit_qasm, parse_qasm, verify};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn one_qubit_kind() -> impl Strategy<Value = (GateKind, usize)> {
    prop_oneof![
        Just((GateKind::H, 0)),
        Just((GateKind::X, 0)),
        Just((GateKind::Y, 0)),
        Just((GateKind::Z, 0)),
        Just((GateKind::S, 0)),
        Just((GateKind::Sdg, 0)),
        Just((GateKind::T, 0)),
        Just((GateKind::Tdg, 0)),
        Just((GateKind::Rx, 1)),
        Just((GateKind::Ry, 1)),
        Just((GateKind::Rz, 1)),
        Just((GateKind::U1, 1)),
        Just((GateKind::U2, 2)),
        Just((GateKind::U3, 3)),
        Just((GateKind::Other("reset".into()), 0)),
    ]
}

/// Gates over `n >= 2` qubits, including SWAPs, measurements and barriers.
fn gate(n: usize) -> impl Strategy<Value = Gate> {
    let pair = (0..n, 1..n).prop_map(move |(a, k)| (a, (a + k) % n));
    prop_oneof![
        4 => (one_qubit_kind(), 0..n, prop::collection::vec(-10.0f64..10.0, 3)).prop_map(|((k, arity), q, ps)| {
            Gate::new(k, vec![q], ps[..arity].to_vec())
        }),
        4 => pair.clone().prop_map(|(a, b)| Gate::cx(a, b)),
        1 => pair.prop_map(|(a, b)| Gate::swap(a, b)),
        1 => (0..n, 0..2usize).prop_map(|(q, bit)| Gate::new(
            GateKind::Measure { creg: "c".into(), bit },
            vec![q],
            vec![],
        )),
        1 => prop::sample::subsequence((0..n).collect::<Vec<_>>(), 1..=n)
            .prop_map(|qs| Gate::new(GateKind::Barrier, qs, vec![])),
    ]
}

fn circuit(max_qubits: usize, max_gates: usize) -> impl Strategy<Value = Circuit> {
    (2..=max_qubits).prop_flat_map(move |n| {
        prop::collection::vec(gate(n), 0..max_gates).prop_map(move |gates| {
            let mut c = Circuit::from_gates(n, gates).unwrap();
            c.add_creg("c", 2);
            c
        })
    })
}

fn graphs() -> Vec<CouplingGraph> {
    vec![
        CouplingGraph::line(8),
        CouplingGraph::grid(3, 3),
        CouplingGraph::tokyo20(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 256,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn emit_then_parse_is_identity(c in circuit(6, 40)) {
        let text = emit_qasm(&c, false);
        let back = parse_qasm(&text).unwrap();
        prop_assert_eq!(back, c);
    }

    #[test]
    fn layers_respect_conflicts(c in circuit(6, 40), coarse in any::<bool>()) {
        let mode = if coarse { LayeringMode::Coarse } else { LayeringMode::Fine };
        let l = Layering::build(&c, mode);
        prop_assert_eq!(l.len(), c.len());
        for (i, a) in c.gates().iter().enumerate() {
            for b in &c.gates()[i + 1..] {
                if !a.shares_qubit(b) {
                    continue;
                }
                let conflict = !coarse || !commutes(a, b);
                let (la, lb) = (l.layer_of(a.seq_index).unwrap(), l.layer_of(b.seq_index).unwrap());
                if conflict {
                    prop_assert!(la < lb);
                }
            }
        }
        // Every gate past the first layer has a conflicting gate exactly one
        // layer below it, so no layer could be dropped.
        for g in c.gates() {
            let lg = l.layer_of(g.seq_index).unwrap();
            if lg > 1 {
                let witness = c.gates()[..g.seq_index].iter().any(|h| {
                    h.shares_qubit(g)
                        && (!coarse || !commutes(h, g))
                        && l.layer_of(h.seq_index) == Some(lg - 1)
                });
                prop_assert!(witness);
            }
        }
    }

    #[test]
    fn placements_are_injective(c in circuit(9, 30), seed in any::<u64>(), which in 0..4usize) {
        let g = CouplingGraph::grid(3, 3);
        let method = [
            PlacementMethod::Linear,
            PlacementMethod::MatchingGreedy,
            PlacementMethod::MatchingBlossom,
            PlacementMethod::Multi,
        ][which];
        let l = Layering::build(&c, LayeringMode::Coarse);
        let s = ScoreParams::new(40, 0.1).unwrap();
        let p = initial_placement(method, &c, &l, &g, &s, 8, 3, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert_eq!(p.num_qubits(), c.num_qubits());
        for q in 0..c.num_qubits() {
            prop_assert_eq!(p.qubit_at(p.vertex(q)), Some(q));
        }
    }

    #[test]
    fn routed_circuits_verify(
        c in circuit(8, 60),
        seed in any::<u64>(),
        which in 0..3usize,
        coarse in any::<bool>(),
        discount in prop_oneof![Just(0.0), Just(0.1), Just(0.5), Just(0.9)],
    ) {
        let g = &graphs()[which];
        let cfg = RouterConfig {
            seed,
            discount,
            layering: if coarse { LayeringMode::Coarse } else { LayeringMode::Fine },
            ..RouterConfig::default()
        };
        let r = transpile(&c, g, &cfg).unwrap();
        let report = verify(&c, &r.compiled, g, &r.initial_placement, r.swap_count, cfg.layering).unwrap();
        prop_assert!(report.is_ok(), "{:?}", report.violations);
        prop_assert_eq!(r.stats.stall_trips, 0);
    }

    #[test]
    fn routing_from_an_adjacent_start_inserts_nothing(n in 2..8usize, len in 0..30usize) {
        // A chain of cx(i, i+1) on a line placed in order is executable as is.
        let gates: Vec<Gate> = (0..len).map(|i| Gate::cx(i % (n - 1), i % (n - 1) + 1)).collect();
        let c = Circuit::from_gates(n, gates).unwrap();
        let g = CouplingGraph::line(n);
        let p = qroute::Placement::identity(n, n).unwrap();
        let r = route(&c, &g, &p, &RouterConfig::default()).unwrap();
        prop_assert_eq!(r.swap_count, 0);
        // Commuting gates may be reordered, so compare contents and verify.
        let key = |g: &Gate| (format!("{:?}", g.kind), g.qubits.clone());
        let mut got: Vec<_> = r.compiled.gates().iter().map(key).collect();
        let mut want: Vec<_> = c.gates().iter().map(key).collect();
        got.sort();
        want.sort();
        prop_assert_eq!(got, want);
        let report = verify(&c, &r.compiled, &g, &p, 0, LayeringMode::Coarse).unwrap();
        prop_assert!(report.is_ok(), "{:?}", report.violations);
    }
}

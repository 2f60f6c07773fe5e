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

//! Reference implementations and generators shared by the integration tests.

#![allow(dead_code)]

use qroute::placement::Placement;
use rand::seq::SliceRandom;
use rand::Rng;

/// Erdos-Renyi edge list with `u < v`.
pub fn random_graph<R: Rng>(n: usize, p: f64, rng: &mut R) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    edges
}

/// All-pairs hop counts; `None` when unreachable.
pub fn floyd_warshall(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<Option<u64>>> {
    let mut d = vec![vec![None; n]; n];
    for (v, row) in d.iter_mut().enumerate() {
        row[v] = Some(0);
    }
    for &(u, v) in edges {
        d[u][v] = Some(1);
        d[v][u] = Some(1);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|c| a + b < c) {
                        d[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    d
}

/// Maximum matching size by exhaustive search.
pub fn brute_force_matching(n: usize, edges: &[(usize, usize)]) -> usize {
    fn go(v: usize, n: usize, adj: &[Vec<usize>], used: &mut [bool]) -> usize {
        if v == n {
            return 0;
        }
        if used[v] {
            return go(v + 1, n, adj, used);
        }
        used[v] = true;
        let mut best = go(v + 1, n, adj, used);
        for &w in &adj[v] {
            if !used[w] {
                used[w] = true;
                best = best.max(1 + go(v + 1, n, adj, used));
                used[w] = false;
            }
        }
        used[v] = false;
        best
    }
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    go(0, n, &adj, &mut vec![false; n])
}

pub fn random_placement<R: Rng>(qubits: usize, vertices: usize, rng: &mut R) -> Placement {
    let mut vs: Vec<usize> = (0..vertices).collect();
    vs.shuffle(rng);
    vs.truncate(qubits);
    Placement::new(vertices, vs).unwrap()
}

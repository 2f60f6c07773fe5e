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

//! Undirected coupling graphs with cached hop distances, matchings and
//! greedy path covers.

use std::collections::VecDeque;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Distance between vertices in different components.
pub const UNREACHABLE: u32 = u32::MAX;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("edge ({0}, {1}) references a vertex outside 0..{2}")]
    VertexOutOfRange(usize, usize, usize),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown architecture `{0}` (try tokyo20, grid:RxC, line:N or an edge-list file)")]
    UnknownArchitecture(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Row-major `n × n` matrix of hop counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<u32>,
}

impl DistanceMatrix {
    #[inline]
    pub fn get(&self, u: usize, v: usize) -> u32 {
        self.data[u * self.n + v]
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn row(&self, u: usize) -> &[u32] {
        &self.data[u * self.n..(u + 1) * self.n]
    }
}

/// Unweighted shortest-path lengths from one breadth-first traversal per
/// source. Pairs in different components get [`UNREACHABLE`].
pub fn all_pairs_distances(num_vertices: usize, edges: &[(usize, usize)]) -> DistanceMatrix {
    let mut adj = vec![Vec::new(); num_vertices];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut data = vec![UNREACHABLE; num_vertices * num_vertices];
    let mut queue = VecDeque::with_capacity(num_vertices);
    for source in 0..num_vertices {
        let row = &mut data[source * num_vertices..(source + 1) * num_vertices];
        row[source] = 0;
        queue.clear();
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let du = row[u];
            for &w in &adj[u] {
                if row[w] == UNREACHABLE {
                    row[w] = du + 1;
                    queue.push_back(w);
                }
            }
        }
    }
    DistanceMatrix { n: num_vertices, data }
}

#[derive(Clone, Debug)]
pub struct CouplingGraph {
    num_vertices: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
    dist: DistanceMatrix,
}

impl CouplingGraph {
    /// Builds a graph from unordered vertex pairs. Duplicate and reversed
    /// pairs collapse to one edge.
    pub fn new(num_vertices: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut norm = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if u >= num_vertices || v >= num_vertices {
                return Err(GraphError::VertexOutOfRange(u, v, num_vertices));
            }
            norm.push((u.min(v), u.max(v)));
        }
        norm.sort_unstable();
        norm.dedup();
        let mut adj = vec![Vec::new(); num_vertices];
        for &(u, v) in &norm {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let dist = all_pairs_distances(num_vertices, &norm);
        Ok(CouplingGraph {
            num_vertices,
            edges: norm,
            adj,
            dist,
        })
    }

    /// 20-qubit IBM Q Tokyo layout: a 4×5 grid with crossed diagonals in
    /// alternating plaquettes.
    pub fn tokyo20() -> Self {
        let mut edges = Vec::new();
        for r in 0..4 {
            for c in 0..4 {
                edges.push((5 * r + c, 5 * r + c + 1));
            }
        }
        for v in 0..15 {
            edges.push((v, v + 5));
        }
        edges.extend_from_slice(&[
            (1, 7),
            (2, 6),
            (3, 9),
            (4, 8),
            (5, 11),
            (6, 10),
            (7, 13),
            (8, 12),
            (11, 17),
            (12, 16),
            (13, 19),
            (14, 18),
        ]);
        CouplingGraph::new(20, &edges).expect("static layout is valid")
    }

    /// `rows × cols` square lattice, vertices numbered row-major.
    pub fn grid(rows: usize, cols: usize) -> Self {
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let v = r * cols + c;
                if c + 1 < cols {
                    edges.push((v, v + 1));
                }
                if r + 1 < rows {
                    edges.push((v, v + cols));
                }
            }
        }
        CouplingGraph::new(rows * cols, &edges).expect("lattice is valid")
    }

    pub fn line(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        CouplingGraph::new(n, &edges).expect("path is valid")
    }

    pub fn ring(n: usize) -> Self {
        let mut edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        if n > 2 {
            edges.push((n - 1, 0));
        }
        CouplingGraph::new(n, &edges).expect("cycle is valid")
    }

    /// Parses an edge list: one `u v` pair per line, `#` comments. A line
    /// holding a single integer fixes the vertex count; otherwise it is one
    /// more than the largest index seen.
    pub fn from_edge_list(text: &str) -> Result<Self, GraphError> {
        let mut declared = None;
        let mut edges = Vec::new();
        let mut max_vertex = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let nums = line
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| GraphError::Parse {
                    line: i + 1,
                    message: e.to_string(),
                })?;
            match nums[..] {
                [n] => declared = Some(n),
                [u, v] => {
                    max_vertex = Some(max_vertex.unwrap_or(0).max(u).max(v));
                    edges.push((u, v));
                }
                _ => {
                    return Err(GraphError::Parse {
                        line: i + 1,
                        message: format!("expected `u v`, got `{line}`"),
                    })
                }
            }
        }
        let n = declared.unwrap_or_else(|| max_vertex.map_or(0, |m| m + 1));
        CouplingGraph::new(n, &edges)
    }

    /// Resolves a built-in name (`tokyo20`, `grid:RxC`, `line:N`,
    /// `ring:N`) or, failing that, reads an edge-list file.
    pub fn from_spec(spec: &str) -> Result<Self, GraphError> {
        let lower = spec.to_ascii_lowercase();
        if lower == "tokyo20" || lower == "tokyo" {
            return Ok(CouplingGraph::tokyo20());
        }
        let parse_n = |s: &str| s.parse::<usize>().ok();
        if let Some(rest) = lower.strip_prefix("grid:").or_else(|| lower.strip_prefix("grid")) {
            if let Some((r, c)) = rest.split_once('x') {
                if let (Some(r), Some(c)) = (parse_n(r), parse_n(c)) {
                    return Ok(CouplingGraph::grid(r, c));
                }
            }
        }
        if let Some(n) = lower.strip_prefix("line:").and_then(parse_n) {
            return Ok(CouplingGraph::line(n));
        }
        if let Some(n) = lower.strip_prefix("ring:").and_then(parse_n) {
            return Ok(CouplingGraph::ring(n));
        }
        let path = Path::new(spec);
        if path.exists() {
            return CouplingGraph::from_edge_list(&std::fs::read_to_string(path)?);
        }
        Err(GraphError::UnknownArchitecture(spec.to_string()))
    }

    /// Built-in architectures, for listings.
    pub fn builtin_names() -> &'static [&'static str] {
        &["tokyo20", "grid:RxC", "line:N", "ring:N"]
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    #[inline]
    pub fn distance(&self, u: usize, v: usize) -> u32 {
        self.dist.get(u, v)
    }

    pub fn distances(&self) -> &DistanceMatrix {
        &self.dist
    }

    pub fn is_edge(&self, u: usize, v: usize) -> bool {
        u != v && self.dist.get(u, v) == 1
    }

    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        self.edges.binary_search(&(u.min(v), u.max(v))).ok()
    }

    pub fn is_connected(&self) -> bool {
        self.num_vertices == 0 || self.dist.row(0).iter().all(|&d| d != UNREACHABLE)
    }

    /// One shortest path from `u` to `v`, inclusive of both ends. Among
    /// equal-length paths the walk prefers lower-index neighbours.
    pub fn shortest_path(&self, u: usize, v: usize) -> Option<Vec<usize>> {
        if self.distance(u, v) == UNREACHABLE {
            return None;
        }
        let mut path = vec![u];
        let mut cur = u;
        while cur != v {
            let d = self.distance(cur, v);
            cur = *self.adj[cur]
                .iter()
                .find(|&&w| self.distance(w, v) + 1 == d)
                .expect("a neighbour on a shortest path exists");
            path.push(cur);
        }
        Some(path)
    }
}

/// A set of vertex-disjoint edges.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matching {
    edges: Vec<(usize, usize)>,
}

impl Matching {
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    fn from_mates(mates: &[Option<usize>]) -> Self {
        let edges = mates
            .iter()
            .enumerate()
            .filter_map(|(u, m)| m.filter(|&v| u < v).map(|v| (u, v)))
            .collect();
        Matching { edges }
    }
}

/// Maximal matching built by scanning the edges in random order.
pub fn greedy_matching<R: Rng + ?Sized>(g: &CouplingGraph, rng: &mut R) -> Matching {
    let mut order: Vec<usize> = (0..g.edges().len()).collect();
    order.shuffle(rng);
    let mut used = vec![false; g.num_vertices()];
    let mut edges = Vec::new();
    for i in order {
        let (u, v) = g.edges()[i];
        if !used[u] && !used[v] {
            used[u] = true;
            used[v] = true;
            edges.push((u, v));
        }
    }
    edges.sort_unstable();
    Matching { edges }
}

/// Maximum-cardinality matching via Edmonds' blossom contraction.
pub fn blossom_matching(g: &CouplingGraph) -> Matching {
    const NONE: usize = usize::MAX;
    let n = g.num_vertices();
    let mut mate = vec![NONE; n];
    let mut parent = vec![NONE; n];
    let mut base: Vec<usize> = (0..n).collect();
    let mut used = vec![false; n];
    let mut in_blossom = vec![false; n];
    let mut queue = VecDeque::new();

    // Walk both alternating paths towards the root to find the blossom base.
    let lca = |mut a: usize, mut b: usize, mate: &[usize], parent: &[usize], base: &[usize]| {
        let mut seen = vec![false; n];
        loop {
            a = base[a];
            seen[a] = true;
            if mate[a] == NONE {
                break;
            }
            a = parent[mate[a]];
        }
        loop {
            b = base[b];
            if seen[b] {
                return b;
            }
            b = parent[mate[b]];
        }
    };

    fn mark_path(
        mut v: usize,
        b: usize,
        mut child: usize,
        mate: &[usize],
        parent: &mut [usize],
        base: &[usize],
        in_blossom: &mut [bool],
    ) {
        while base[v] != b {
            in_blossom[base[v]] = true;
            in_blossom[base[mate[v]]] = true;
            parent[v] = child;
            child = mate[v];
            v = parent[mate[v]];
        }
    }

    for root in 0..n {
        if mate[root] != NONE {
            continue;
        }
        used.fill(false);
        parent.fill(NONE);
        for (i, b) in base.iter_mut().enumerate() {
            *b = i;
        }
        used[root] = true;
        queue.clear();
        queue.push_back(root);
        let mut endpoint = NONE;
        'search: while let Some(v) = queue.pop_front() {
            for &to in g.neighbors(v) {
                if base[v] == base[to] || mate[v] == to {
                    continue;
                }
                if to == root || (mate[to] != NONE && parent[mate[to]] != NONE) {
                    let cur = lca(v, to, &mate, &parent, &base);
                    in_blossom.fill(false);
                    mark_path(v, cur, to, &mate, &mut parent, &base, &mut in_blossom);
                    mark_path(to, cur, v, &mate, &mut parent, &base, &mut in_blossom);
                    for i in 0..n {
                        if in_blossom[base[i]] {
                            base[i] = cur;
                            if !used[i] {
                                used[i] = true;
                                queue.push_back(i);
                            }
                        }
                    }
                } else if parent[to] == NONE {
                    parent[to] = v;
                    if mate[to] == NONE {
                        endpoint = to;
                        break 'search;
                    }
                    used[mate[to]] = true;
                    queue.push_back(mate[to]);
                }
            }
        }
        let mut v = endpoint;
        while v != NONE {
            let pv = parent[v];
            let next = mate[pv];
            mate[v] = pv;
            mate[pv] = v;
            v = next;
        }
    }
    let mates: Vec<Option<usize>> = mate.iter().map(|&m| (m != NONE).then_some(m)).collect();
    Matching::from_mates(&mates)
}

/// Which end of the degree range path growth prefers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DegreeFavor {
    High,
    Low,
}

/// Greedy maximal linear forest.
///
/// Each path starts at the unused vertex whose degree among unused vertices
/// is extreme for `favor`, and grows from its tail, then its head, always
/// stepping to the unused neighbour of extreme residual degree. Ties go to
/// the lowest vertex index. Every vertex ends up on exactly one path.
pub fn maximal_paths(g: &CouplingGraph, favor: DegreeFavor) -> Vec<Vec<usize>> {
    let n = g.num_vertices();
    let mut used = vec![false; n];
    let mut residual: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let better = |a: usize, b: usize| match favor {
        DegreeFavor::High => a > b,
        DegreeFavor::Low => a < b,
    };
    let pick = |cands: &mut dyn Iterator<Item = usize>, residual: &[usize]| {
        let mut best: Option<usize> = None;
        for v in cands {
            if best.is_none_or(|b| better(residual[v], residual[b])) {
                best = Some(v);
            }
        }
        best
    };
    let take = |v: usize, used: &mut [bool], residual: &mut [usize]| {
        used[v] = true;
        for &w in g.neighbors(v) {
            residual[w] -= 1;
        }
    };

    let mut paths = Vec::new();
    while let Some(start) = pick(&mut (0..n).filter(|&v| !used[v]), &residual) {
        take(start, &mut used, &mut residual);
        let mut path = VecDeque::from([start]);
        for at_tail in [true, false] {
            loop {
                let end = if at_tail {
                    *path.back().unwrap()
                } else {
                    *path.front().unwrap()
                };
                let next = pick(&mut g.neighbors(end).iter().copied().filter(|&w| !used[w]), &residual);
                let Some(next) = next else { break };
                take(next, &mut used, &mut residual);
                if at_tail {
                    path.push_back(next);
                } else {
                    path.push_front(next);
                }
            }
        }
        paths.push(path.into_iter().collect());
    }
    paths
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn star(leaves: usize) -> CouplingGraph {
        let edges: Vec<_> = (1..=leaves).map(|v| (0, v)).collect();
        CouplingGraph::new(leaves + 1, &edges).unwrap()
    }

    fn assert_valid_matching(g: &CouplingGraph, m: &Matching) {
        let mut seen = vec![false; g.num_vertices()];
        for &(u, v) in m.edges() {
            assert!(g.is_edge(u, v));
            assert!(!seen[u] && !seen[v]);
            seen[u] = true;
            seen[v] = true;
        }
    }

    #[test]
    fn path_distance() {
        let g = CouplingGraph::line(3);
        assert_eq!(g.distance(0, 2), 2);
        assert_eq!(g.distance(2, 0), 2);
        assert_eq!(g.distance(1, 1), 0);
    }

    #[test]
    fn tokyo_edges_are_distance_one() {
        let g = CouplingGraph::tokyo20();
        assert_eq!(g.edges().len(), 43);
        for &(u, v) in g.edges() {
            assert_eq!(g.distance(u, v), 1);
        }
        assert!(g.is_connected());
        assert_eq!(g.distance(0, 19), 4);
    }

    #[test]
    fn disconnected_pairs_use_sentinel() {
        let g = CouplingGraph::new(4, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(g.distance(0, 2), UNREACHABLE);
        assert!(!g.is_connected());
        assert!(g.shortest_path(0, 3).is_none());
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(matches!(CouplingGraph::new(2, &[(1, 1)]), Err(GraphError::SelfLoop(1))));
        assert!(matches!(
            CouplingGraph::new(2, &[(0, 2)]),
            Err(GraphError::VertexOutOfRange(0, 2, 2))
        ));
    }

    #[test]
    fn edge_list_parsing() {
        let g = CouplingGraph::from_edge_list("# demo\n6\n0 1\n1 2 # inline\n\n2,3\n").unwrap();
        assert_eq!(g.num_vertices(), 6);
        assert_eq!(g.edges(), &[(0, 1), (1, 2), (2, 3)]);
        assert!(CouplingGraph::from_edge_list("0 1 2\n").is_err());
    }

    #[test]
    fn spec_names() {
        assert_eq!(CouplingGraph::from_spec("grid:2x3").unwrap().num_vertices(), 6);
        assert_eq!(CouplingGraph::from_spec("grid3x4").unwrap().edges().len(), 17);
        assert_eq!(CouplingGraph::from_spec("line:5").unwrap().edges().len(), 4);
        assert_eq!(CouplingGraph::from_spec("TOKYO20").unwrap().num_vertices(), 20);
        assert!(CouplingGraph::from_spec("no-such-arch").is_err());
    }

    #[test]
    fn shortest_path_follows_edges() {
        let g = CouplingGraph::grid(3, 3);
        let p = g.shortest_path(0, 8).unwrap();
        assert_eq!(p.len(), 5);
        assert!(p.windows(2).all(|w| g.is_edge(w[0], w[1])));
    }

    #[test]
    fn greedy_matching_basics() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let empty = CouplingGraph::new(3, &[]).unwrap();
        assert!(greedy_matching(&empty, &mut rng).is_empty());
        let triangle = CouplingGraph::new(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        for _ in 0..20 {
            assert_eq!(greedy_matching(&triangle, &mut rng).len(), 1);
        }
    }

    #[test]
    fn greedy_matching_on_four_path_can_be_stuck_at_one() {
        // Visiting (1,2) first blocks both other edges.
        let g = CouplingGraph::line(4);
        let mut sizes = std::collections::BTreeSet::new();
        for seed in 0..64 {
            let m = greedy_matching(&g, &mut ChaCha8Rng::seed_from_u64(seed));
            assert_valid_matching(&g, &m);
            if m.len() == 1 {
                assert_eq!(m.edges(), &[(1, 2)]);
            }
            sizes.insert(m.len());
        }
        assert_eq!(sizes.into_iter().collect::<Vec<_>>(), vec![1, 2]);
    }

    #[test]
    fn blossom_small_cases() {
        assert_eq!(blossom_matching(&CouplingGraph::line(4)).len(), 2);
        assert_eq!(blossom_matching(&CouplingGraph::ring(5)).len(), 2);
        assert_eq!(blossom_matching(&CouplingGraph::ring(6)).len(), 3);
        assert_eq!(blossom_matching(&CouplingGraph::tokyo20()).len(), 10);
        assert_eq!(blossom_matching(&star(4)).len(), 1);
    }

    #[test]
    fn blossom_needs_contraction() {
        // Two triangles joined through a path; greedy orders can miss the
        // perfect matching, blossom must not.
        let g = CouplingGraph::new(
            8,
            &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 5)],
        )
        .unwrap();
        let m = blossom_matching(&g);
        assert_valid_matching(&g, &m);
        assert_eq!(m.len(), 4);
    }

    #[test]
    fn paths_on_line_graph() {
        let g = CouplingGraph::line(6);
        for favor in [DegreeFavor::High, DegreeFavor::Low] {
            let paths = maximal_paths(&g, favor);
            assert_eq!(paths.len(), 1);
            assert_eq!(paths[0].len(), 6);
        }
    }

    #[test]
    fn star_low_degree_runs_through_hub() {
        let g = star(4);
        let low = maximal_paths(&g, DegreeFavor::Low);
        assert_eq!(low[0].len(), 3);
        assert_eq!(low[0][1], 0);
        // Growth from both ends recovers the leaf-hub-leaf path even when
        // starting at the hub.
        let high = maximal_paths(&g, DegreeFavor::High);
        assert_eq!(high[0], vec![2, 0, 1]);
    }

    #[test]
    fn tokyo_paths_are_long() {
        let g = CouplingGraph::tokyo20();
        for favor in [DegreeFavor::High, DegreeFavor::Low] {
            let paths = maximal_paths(&g, favor);
            let longest = paths.iter().map(Vec::len).max().unwrap();
            assert!(longest >= 13, "{favor:?}: {paths:?}");
        }
    }
}

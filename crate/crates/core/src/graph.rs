//! Multi-arrowed graphs, the graphs derived from them, and d-connection
//! oracles.
//!
//! Vertices are `0..n` internally. Every JSON form uses 1-based indices so
//! vertex `k` is written as `k + 1`.
//!
//! Edge classes:
//! * `E1` (single-headed): transfer functions that may carry a direct
//!   feedthrough term.
//! * `E2` (double-headed): strictly causal transfer functions.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Upper bound on the vertex count, set by the width of [`VertexSet`].
pub const MAX_VERTICES: usize = 64;

/// A set of vertices stored as a bitmask.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet(u64);

impl VertexSet {
    pub const EMPTY: VertexSet = VertexSet(0);

    pub fn from_bits(bits: u64) -> Self {
        Self(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn singleton(v: usize) -> Self {
        Self(1 << v)
    }

    pub fn contains(self, v: usize) -> bool {
        v < MAX_VERTICES && self.0 >> v & 1 == 1
    }

    pub fn insert(&mut self, v: usize) {
        self.0 |= 1 << v;
    }

    pub fn remove(&mut self, v: usize) {
        self.0 &= !(1 << v);
    }

    pub fn with(mut self, v: usize) -> Self {
        self.insert(v);
        self
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: VertexSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..MAX_VERTICES).filter(move |&v| self.contains(v))
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// All subsets of `pool` with at most `max_size` elements, by increasing
    /// cardinality and then lexicographically on the sorted member lists.
    pub fn subsets_by_size(pool: VertexSet, max_size: usize) -> Vec<VertexSet> {
        let members = pool.to_vec();
        let mut out = Vec::new();
        for size in 0..=max_size.min(members.len()) {
            let mut idx: Vec<usize> = (0..size).collect();
            loop {
                out.push(idx.iter().map(|&k| members[k]).collect());
                // advance the combination in lexicographic order
                let mut pos = size;
                while pos > 0 && idx[pos - 1] == members.len() - size + pos - 1 {
                    pos -= 1;
                }
                if pos == 0 {
                    break;
                }
                idx[pos - 1] += 1;
                for q in pos..size {
                    idx[q] = idx[q - 1] + 1;
                }
            }
        }
        out
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = VertexSet::EMPTY;
        for v in iter {
            s.insert(v);
        }
        s
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|v| v + 1)).finish()
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.iter().map(|v| format!("y{}", v + 1)).collect();
        write!(f, "{{{}}}", items.join(", "))
    }
}

impl Serialize for VertexSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.iter().map(|v| v + 1))
    }
}

impl<'de> Deserialize<'de> for VertexSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<usize>::deserialize(d)?;
        raw.into_iter()
            .map(|v| match v {
                1..=MAX_VERTICES => Ok(v - 1),
                _ => Err(serde::de::Error::custom(format!("vertex index {v} out of range 1..={MAX_VERTICES}"))),
            })
            .collect()
    }
}

/// Plain directed graph; cycles allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiGraph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
    children: Vec<Vec<usize>>,
    parents: Vec<Vec<usize>>,
}

impl DiGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let edges: BTreeSet<_> = edges.into_iter().collect();
        let mut children = vec![Vec::new(); n];
        let mut parents = vec![Vec::new(); n];
        for &(a, b) in &edges {
            assert!(a < n && b < n, "edge ({a}, {b}) out of range for {n} vertices");
            children[a].push(b);
            parents[b].push(a);
        }
        Self { n, edges, children, parents }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a, b))
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn parents(&self, v: usize) -> &[usize] {
        &self.parents[v]
    }

    /// `v` together with every vertex reachable from it.
    pub fn descendants(&self, v: usize) -> VertexSet {
        self.reach(VertexSet::singleton(v), |u| &self.children[u])
    }

    /// Members of `s` together with every vertex that reaches one of them.
    pub fn ancestors_of_set(&self, s: VertexSet) -> VertexSet {
        self.reach(s, |u| &self.parents[u])
    }

    fn reach<'a>(&'a self, seed: VertexSet, next: impl Fn(usize) -> &'a [usize]) -> VertexSet {
        let mut seen = seed;
        let mut stack: Vec<usize> = seed.iter().collect();
        while let Some(u) = stack.pop() {
            for &w in next(u) {
                if !seen.contains(w) {
                    seen.insert(w);
                    stack.push(w);
                }
            }
        }
        seen
    }

    pub fn is_acyclic(&self) -> bool {
        let mut indeg: Vec<usize> = (0..self.n).map(|v| self.parents[v].len()).collect();
        let mut queue: VecDeque<usize> = (0..self.n).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(u) = queue.pop_front() {
            seen += 1;
            for &w in &self.children[u] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    queue.push_back(w);
                }
            }
        }
        seen == self.n
    }

    /// Triples `(i, k, j)` with `i -> k <- j` and `i != j`.
    pub fn colliders(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for k in 0..self.n {
            for &i in &self.parents[k] {
                for &j in &self.parents[k] {
                    if i != j {
                        out.push((i, k, j));
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn skeleton(&self) -> UndirectedGraph {
        UndirectedGraph::new(self.n, self.edges.iter().copied())
    }

    /// d-connection of `i` and `j` given `s`.
    ///
    /// Reachability over (vertex, direction-of-arrival) states: a trail may
    /// pass a non-collider outside `s` and a collider that is an ancestor of
    /// (or inside) `s`. Linear in the number of edges per query.
    pub fn d_connected(&self, i: usize, j: usize, s: VertexSet) -> bool {
        debug_assert!(i != j && !s.contains(i) && !s.contains(j));
        let active_colliders = self.ancestors_of_set(s);
        // visited[v][0]: arrived from a child (moving up); [1]: from a parent.
        let mut visited = vec![[false; 2]; self.n];
        let mut queue = VecDeque::new();
        queue.push_back((i, 0usize));
        while let Some((v, dir)) = queue.pop_front() {
            if visited[v][dir] {
                continue;
            }
            visited[v][dir] = true;
            if v == j {
                return true;
            }
            let in_s = s.contains(v);
            if dir == 0 {
                if !in_s {
                    queue.extend(self.parents[v].iter().map(|&p| (p, 0)));
                    queue.extend(self.children[v].iter().map(|&c| (c, 1)));
                }
            } else {
                if !in_s {
                    queue.extend(self.children[v].iter().map(|&c| (c, 1)));
                }
                if active_colliders.contains(v) {
                    queue.extend(self.parents[v].iter().map(|&p| (p, 0)));
                }
            }
        }
        false
    }
}

/// Undirected simple graph; edges stored as `(min, max)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UndirectedGraph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl UndirectedGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let edges = edges.into_iter().filter(|(a, b)| a != b).map(|(a, b)| (a.min(b), a.max(b))).collect();
        Self { n, edges }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }
}

/// `G = (V, E1, E2)` with `E1` single-headed and `E2` double-headed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MultiArrowJson", into = "MultiArrowJson")]
pub struct MultiArrowGraph {
    n: usize,
    e1: BTreeSet<(usize, usize)>,
    e2: BTreeSet<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct MultiArrowJson {
    n: usize,
    e1: Vec<[usize; 2]>,
    e2: Vec<[usize; 2]>,
}

fn to_one_based(edges: &BTreeSet<(usize, usize)>) -> Vec<[usize; 2]> {
    edges.iter().map(|&(a, b)| [a + 1, b + 1]).collect()
}

fn from_one_based(n: usize, edges: &[[usize; 2]]) -> Result<Vec<(usize, usize)>> {
    edges
        .iter()
        .map(|&[a, b]| {
            if a == 0 || b == 0 || a > n || b > n {
                Err(Error::Structural(format!("edge [{a}, {b}] out of range 1..={n}")))
            } else {
                Ok((a - 1, b - 1))
            }
        })
        .collect()
}

impl TryFrom<MultiArrowJson> for MultiArrowGraph {
    type Error = Error;
    fn try_from(j: MultiArrowJson) -> Result<Self> {
        MultiArrowGraph::new(j.n, from_one_based(j.n, &j.e1)?, from_one_based(j.n, &j.e2)?)
    }
}

impl From<MultiArrowGraph> for MultiArrowJson {
    fn from(g: MultiArrowGraph) -> Self {
        Self { n: g.n, e1: to_one_based(&g.e1), e2: to_one_based(&g.e2) }
    }
}

impl MultiArrowGraph {
    pub fn new(
        n: usize,
        e1: impl IntoIterator<Item = (usize, usize)>,
        e2: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        if n > MAX_VERTICES {
            return Err(Error::Structural(format!("{n} vertices exceeds the supported maximum of {MAX_VERTICES}")));
        }
        let e1: BTreeSet<_> = e1.into_iter().collect();
        let e2: BTreeSet<_> = e2.into_iter().collect();
        for &(a, b) in e1.iter().chain(e2.iter()) {
            if a >= n || b >= n {
                return Err(Error::Structural(format!("edge ({}, {}) out of range for {n} vertices", a + 1, b + 1)));
            }
            if a == b {
                return Err(Error::Structural(format!("self pair on vertex {}", a + 1)));
            }
        }
        if let Some(&(a, b)) = e1.intersection(&e2).next() {
            return Err(Error::Structural(format!("edge ({}, {}) is both single- and double-headed", a + 1, b + 1)));
        }
        Ok(Self { n, e1, e2 })
    }

    pub fn empty(n: usize) -> Self {
        Self { n, e1: BTreeSet::new(), e2: BTreeSet::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn single_headed(&self) -> &BTreeSet<(usize, usize)> {
        &self.e1
    }

    pub fn double_headed(&self) -> &BTreeSet<(usize, usize)> {
        &self.e2
    }

    /// Directed graph on `E1 ∪ E2`.
    pub fn causal_graph(&self) -> DiGraph {
        DiGraph::new(self.n, self.e1.iter().chain(self.e2.iter()).copied())
    }

    pub fn skeleton(&self) -> UndirectedGraph {
        self.causal_graph().skeleton()
    }

    /// The `E1` subgraph; fails when it has a directed cycle.
    pub fn instantaneous_graph(&self) -> Result<DiGraph> {
        let g = DiGraph::new(self.n, self.e1.iter().copied());
        if !g.is_acyclic() {
            return Err(Error::Structural("single-headed edges form a directed cycle (algebraic loop)".into()));
        }
        Ok(g)
    }

    /// Every feedback loop contains a double-headed edge, i.e. `E1` is acyclic.
    pub fn check_recursive(&self) -> bool {
        DiGraph::new(self.n, self.e1.iter().copied()).is_acyclic()
    }

    /// d-connection of `i` and `j` given `s` inside the graph of
    /// instantaneous propagations.
    pub fn feedthrough_d_connected(&self, i: usize, j: usize, s: VertexSet) -> Result<bool> {
        Ok(self.instantaneous_graph()?.d_connected(i, j, s))
    }

    /// Children of `i` through double-headed edges.
    pub fn double_headed_children(&self, i: usize) -> Vec<usize> {
        self.e2.iter().filter(|&&(a, _)| a == i).map(|&(_, b)| b).collect()
    }

    /// Delayed d-connection of `j` with the one-step-delayed copy of `i`.
    ///
    /// The delayed copy is a fresh source vertex whose only out-edges are the
    /// double-headed edges of `i`, turned single-headed. The present `i`
    /// stays an ordinary (unconditioned) vertex of the instantaneous graph.
    pub fn delayed_d_connected(&self, i: usize, j: usize, s: VertexSet) -> bool {
        self.delayed_d_connected_via(i, j, s, &self.double_headed_children(i))
    }

    /// As [`delayed_d_connected`](Self::delayed_d_connected) with an explicit
    /// list of vertices that the delayed copy of `i` feeds.
    pub fn delayed_d_connected_via(&self, i: usize, j: usize, s: VertexSet, lagged_children: &[usize]) -> bool {
        debug_assert!(i != j && !s.contains(i) && !s.contains(j));
        if lagged_children.is_empty() {
            return false;
        }
        let delayed = self.n;
        let edges = self.e1.iter().copied().chain(lagged_children.iter().map(|&c| (delayed, c)));
        DiGraph::new(self.n + 1, edges).d_connected(delayed, j, s)
    }
}

/// Output of the reconstruction: undirected edges, oriented single-headed
/// edges and double-headed edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PartialGraphJson", into = "PartialGraphJson")]
pub struct PartialGraph {
    n: usize,
    undirected: BTreeSet<(usize, usize)>,
    directed: BTreeSet<(usize, usize)>,
    double_headed: BTreeSet<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct PartialGraphJson {
    n: usize,
    undirected: Vec<[usize; 2]>,
    directed: Vec<[usize; 2]>,
    e2: Vec<[usize; 2]>,
}

impl TryFrom<PartialGraphJson> for PartialGraph {
    type Error = Error;
    fn try_from(j: PartialGraphJson) -> Result<Self> {
        let mut g = PartialGraph::new(j.n);
        for (a, b) in from_one_based(j.n, &j.undirected)? {
            g.add_undirected(a, b)?;
        }
        for (a, b) in from_one_based(j.n, &j.directed)? {
            g.add_directed(a, b)?;
        }
        for (a, b) in from_one_based(j.n, &j.e2)? {
            g.add_double_headed(a, b)?;
        }
        Ok(g)
    }
}

impl From<PartialGraph> for PartialGraphJson {
    fn from(g: PartialGraph) -> Self {
        Self {
            n: g.n,
            undirected: to_one_based(&g.undirected),
            directed: to_one_based(&g.directed),
            e2: to_one_based(&g.double_headed),
        }
    }
}

fn unordered(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl PartialGraph {
    pub fn new(n: usize) -> Self {
        Self { n, undirected: BTreeSet::new(), directed: BTreeSet::new(), double_headed: BTreeSet::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn undirected(&self) -> &BTreeSet<(usize, usize)> {
        &self.undirected
    }

    pub fn directed(&self) -> &BTreeSet<(usize, usize)> {
        &self.directed
    }

    pub fn double_headed(&self) -> &BTreeSet<(usize, usize)> {
        &self.double_headed
    }

    fn check_pair(&self, a: usize, b: usize) -> Result<()> {
        if a == b || a >= self.n || b >= self.n {
            return Err(Error::Structural(format!("invalid vertex pair ({}, {})", a + 1, b + 1)));
        }
        Ok(())
    }

    fn occupied_by(&self, a: usize, b: usize) -> Option<&'static str> {
        if self.undirected.contains(&unordered(a, b)) {
            Some("undirected")
        } else if self.directed.contains(&(a, b)) || self.directed.contains(&(b, a)) {
            Some("directed")
        } else if self.double_headed.contains(&(a, b)) || self.double_headed.contains(&(b, a)) {
            Some("double-headed")
        } else {
            None
        }
    }

    pub fn add_undirected(&mut self, a: usize, b: usize) -> Result<()> {
        self.check_pair(a, b)?;
        if let Some(kind) = self.occupied_by(a, b) {
            return Err(Error::Structural(format!("pair ({}, {}) already carries a {kind} edge", a + 1, b + 1)));
        }
        self.undirected.insert(unordered(a, b));
        Ok(())
    }

    pub fn add_directed(&mut self, a: usize, b: usize) -> Result<()> {
        self.check_pair(a, b)?;
        if let Some(kind) = self.occupied_by(a, b) {
            return Err(Error::Structural(format!("pair ({}, {}) already carries a {kind} edge", a + 1, b + 1)));
        }
        self.directed.insert((a, b));
        Ok(())
    }

    /// Both `a => b` and `b => a` may be present.
    pub fn add_double_headed(&mut self, a: usize, b: usize) -> Result<()> {
        self.check_pair(a, b)?;
        if self.undirected.contains(&unordered(a, b)) || self.directed.contains(&(a, b)) || self.directed.contains(&(b, a)) {
            return Err(Error::Structural(format!("pair ({}, {}) already carries a single-headed edge", a + 1, b + 1)));
        }
        self.double_headed.insert((a, b));
        Ok(())
    }

    pub fn has_undirected(&self, a: usize, b: usize) -> bool {
        self.undirected.contains(&unordered(a, b))
    }

    pub fn has_directed(&self, a: usize, b: usize) -> bool {
        self.directed.contains(&(a, b))
    }

    pub fn has_double_headed(&self, a: usize, b: usize) -> bool {
        self.double_headed.contains(&(a, b))
    }

    /// Turns the undirected edge `a - b` into `a -> b`.
    pub fn orient(&mut self, a: usize, b: usize) -> Result<()> {
        if !self.undirected.remove(&unordered(a, b)) {
            return Err(Error::Structural(format!("no undirected edge between {} and {}", a + 1, b + 1)));
        }
        self.directed.insert((a, b));
        Ok(())
    }

    /// Neighbours of `v` through undirected edges.
    pub fn undirected_neighbors(&self, v: usize) -> Vec<usize> {
        self.undirected
            .iter()
            .filter_map(|&(a, b)| if a == v { Some(b) } else if b == v { Some(a) } else { None })
            .collect()
    }

    /// All vertices joined to `v` by an edge of any kind.
    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.occupied_by(a, b).is_some()
    }

    /// Undirected graph over every edge regardless of kind.
    pub fn skeleton(&self) -> UndirectedGraph {
        UndirectedGraph::new(
            self.n,
            self.undirected.iter().chain(self.directed.iter()).chain(self.double_headed.iter()).copied(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[usize]) -> VertexSet {
        v.iter().copied().collect()
    }

    /// Six-node network, 0-based: 1->2, 2->3, 2->4, 3->4, 4->5, 6->4 and 5=>2.
    fn six_node() -> MultiArrowGraph {
        MultiArrowGraph::new(6, [(0, 1), (1, 2), (1, 3), (2, 3), (3, 4), (5, 3)], [(4, 1)]).unwrap()
    }

    #[test]
    fn causal_graph_and_skeleton() {
        let g = MultiArrowGraph::new(3, [(0, 1)], [(2, 0)]).unwrap();
        let c = g.causal_graph();
        assert_eq!(c.edges().iter().copied().collect::<Vec<_>>(), vec![(0, 1), (2, 0)]);
        assert!(MultiArrowGraph::empty(4).causal_graph().edges().is_empty());
        let two_way = DiGraph::new(2, [(0, 1), (1, 0)]);
        assert_eq!(two_way.skeleton().edges().len(), 1);
    }

    #[test]
    fn instantaneous_graph_drops_double_headed() {
        let g = MultiArrowGraph::new(3, [(0, 1), (1, 2)], [(2, 0)]).unwrap();
        let inst = g.instantaneous_graph().unwrap();
        assert_eq!(inst.edges().len(), 2);
        assert!(!inst.has_edge(2, 0));
        let all_e2 = MultiArrowGraph::new(3, [], [(0, 1), (1, 2), (2, 0)]).unwrap();
        assert!(all_e2.instantaneous_graph().unwrap().edges().is_empty());
        let cyclic = MultiArrowGraph::new(2, [(0, 1), (1, 0)], []).unwrap();
        assert!(cyclic.instantaneous_graph().is_err());
    }

    #[test]
    fn rejects_malformed_graphs() {
        assert!(MultiArrowGraph::new(2, [(0, 1)], [(0, 1)]).is_err());
        assert!(MultiArrowGraph::new(2, [(1, 1)], []).is_err());
        assert!(MultiArrowGraph::new(2, [(0, 2)], []).is_err());
    }

    #[test]
    fn recursion_check() {
        assert!(!MultiArrowGraph::new(2, [(0, 1), (1, 0)], []).unwrap().check_recursive());
        assert!(six_node().check_recursive());
        assert!(MultiArrowGraph::empty(0).check_recursive());
    }

    #[test]
    fn collider_triples() {
        let chain = DiGraph::new(3, [(0, 1), (1, 2)]);
        assert!(chain.colliders().is_empty());
        let v = DiGraph::new(3, [(0, 2), (1, 2)]);
        assert_eq!(v.colliders(), vec![(0, 2, 1), (1, 2, 0)]);
    }

    #[test]
    fn diamond_colliders() {
        // i=0, l=1, j=2, k=3, m=4
        let g = DiGraph::new(5, [(0, 1), (1, 2), (0, 3), (2, 3), (3, 4)]);
        assert_eq!(g.colliders(), vec![(0, 3, 2), (2, 3, 0)]);
        assert!(!g.d_connected(0, 2, set(&[1])));
        assert!(g.d_connected(0, 2, set(&[1, 4])));
    }

    #[test]
    fn d_connection_basics() {
        let chain = DiGraph::new(3, [(0, 1), (1, 2)]);
        assert!(!chain.d_connected(0, 2, set(&[1])));
        assert!(chain.d_connected(0, 2, VertexSet::EMPTY));
        let v = DiGraph::new(3, [(0, 1), (2, 1)]);
        assert!(v.d_connected(0, 2, set(&[1])));
        assert!(!v.d_connected(0, 2, VertexSet::EMPTY));
    }

    #[test]
    fn feedthrough_queries_on_six_nodes() {
        let g = six_node();
        assert!(!g.feedthrough_d_connected(2, 5, set(&[1])).unwrap());
        assert!(g.feedthrough_d_connected(2, 5, set(&[1, 3])).unwrap());
        let only_e2 = MultiArrowGraph::new(3, [], [(0, 1), (1, 2)]).unwrap();
        assert!(!only_e2.feedthrough_d_connected(0, 2, VertexSet::EMPTY).unwrap());
    }

    #[test]
    fn delayed_queries_on_six_nodes() {
        let g = six_node();
        // 5' -> 2 <- 1 is blocked at the unconditioned collider 2.
        assert!(!g.delayed_d_connected(4, 0, VertexSet::EMPTY));
        // Conditioning on 2 (or its descendant 3) opens it.
        assert!(g.delayed_d_connected(4, 0, set(&[1])));
        assert!(g.delayed_d_connected(4, 0, set(&[2])));
        // 5' -> 2 -> 3 is blocked by 2.
        assert!(g.delayed_d_connected(4, 2, VertexSet::EMPTY));
        assert!(!g.delayed_d_connected(4, 2, set(&[1])));
        // direct double-headed child
        assert!(g.delayed_d_connected(4, 1, set(&[0, 2, 3, 5])));
        // no double-headed out-edge
        assert!(!g.delayed_d_connected(0, 4, VertexSet::EMPTY));
    }

    #[test]
    fn subset_order() {
        let subsets = VertexSet::subsets_by_size(set(&[0, 2, 5]), 3);
        let lists: Vec<Vec<usize>> = subsets.iter().map(|s| s.to_vec()).collect();
        assert_eq!(
            lists,
            vec![vec![], vec![0], vec![2], vec![5], vec![0, 2], vec![0, 5], vec![2, 5], vec![0, 2, 5]]
        );
        assert_eq!(VertexSet::subsets_by_size(set(&[1, 2, 3]), 1).len(), 4);
    }

    #[test]
    fn json_is_one_based() {
        let g = MultiArrowGraph::new(3, [(0, 1)], [(2, 0)]).unwrap();
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"{"n":3,"e1":[[1,2]],"e2":[[3,1]]}"#);
        let back: MultiArrowGraph = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
        assert!(serde_json::from_str::<MultiArrowGraph>(r#"{"n":2,"e1":[[0,1]],"e2":[]}"#).is_err());

        let mut p = PartialGraph::new(3);
        p.add_undirected(1, 0).unwrap();
        p.add_directed(1, 2).unwrap();
        p.add_double_headed(2, 0).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"n":3,"undirected":[[1,2]],"directed":[[2,3]],"e2":[[3,1]]}"#);
        assert_eq!(serde_json::from_str::<PartialGraph>(&s).unwrap(), p);
    }

    #[test]
    fn partial_graph_keeps_pairs_disjoint() {
        let mut p = PartialGraph::new(3);
        p.add_undirected(0, 1).unwrap();
        assert!(p.add_directed(1, 0).is_err());
        assert!(p.add_double_headed(0, 1).is_err());
        p.add_double_headed(1, 2).unwrap();
        p.add_double_headed(2, 1).unwrap();
        assert!(p.add_undirected(2, 1).is_err());
        p.orient(1, 0).unwrap();
        assert!(p.has_directed(1, 0) && !p.has_undirected(0, 1));
        assert!(p.orient(1, 0).is_err());
    }
}

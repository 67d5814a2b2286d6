//! Orientation of undirected edges in a reconstruction result.
//!
//! Colliders are detected first: all type A checks (through a double-headed
//! edge), then all type B checks (two undirected edges). Propagation rounds
//! then alternate A and B until nothing changes. Within a phase every
//! proposal is collected before any is applied, so the outcome does not
//! depend on iteration order; an edge with opposite proposals stays
//! undirected and is reported as a conflict.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::gemd::{ReconstructionResult, SeparationKind, SeparationRecord};
use crate::graph::{PartialGraph, VertexSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrientationRule {
    ColliderA,
    ColliderB,
    PropagationA,
    PropagationB,
}

impl fmt::Display for OrientationRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OrientationRule::ColliderA => "collider_a",
            OrientationRule::ColliderB => "collider_b",
            OrientationRule::PropagationA => "propagation_a",
            OrientationRule::PropagationB => "propagation_b",
        })
    }
}

/// The separation record a firing relied on (1-based in JSON).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessRef {
    pub kind: SeparationKind,
    pub source: usize,
    pub target: usize,
    pub set: VertexSet,
}

impl WitnessRef {
    fn of(r: &SeparationRecord, set: VertexSet) -> Self {
        Self { kind: r.kind, source: r.source + 1, target: r.target + 1, set }
    }
}

/// One orientation `from -> to` (1-based).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrientedEdge {
    pub from: usize,
    pub to: usize,
    pub rule: OrientationRule,
    /// The triple the rule looked at, in rule order (1-based).
    pub triple: [usize; 3],
    pub witness: WitnessRef,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conflict {
    /// Unordered pair (1-based, smaller first).
    pub pair: [usize; 2],
    pub proposals: Vec<OrientedEdge>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OrientationTrace {
    pub oriented_edges: Vec<OrientedEdge>,
    pub conflicts: Vec<Conflict>,
    pub diagnostics: Vec<String>,
}

impl OrientationTrace {
    /// One line per firing and per conflict.
    pub fn rule_log(&self) -> String {
        let mut out = String::new();
        for e in &self.oriented_edges {
            let _ = writeln!(
                out,
                "{} triple (y{}, y{}, y{}) witness {}[y{} -> y{}] = {}: y{} -> y{}",
                e.rule,
                e.triple[0],
                e.triple[1],
                e.triple[2],
                kind_name(e.witness.kind),
                e.witness.source,
                e.witness.target,
                e.witness.set,
                e.from,
                e.to
            );
        }
        for c in &self.conflicts {
            let rules: Vec<String> = c.proposals.iter().map(|p| format!("{} wants y{} -> y{}", p.rule, p.from, p.to)).collect();
            let _ = writeln!(out, "conflict on y{} - y{}: {}", c.pair[0], c.pair[1], rules.join("; "));
        }
        for d in &self.diagnostics {
            let _ = writeln!(out, "note: {d}");
        }
        out
    }
}

fn kind_name(k: SeparationKind) -> &'static str {
    match k {
        SeparationKind::Feedthrough => "feedthrough",
        SeparationKind::Delayed => "delayed",
    }
}

struct Proposal {
    from: usize,
    to: usize,
    rule: OrientationRule,
    triple: [usize; 3],
    witness: WitnessRef,
}

impl Proposal {
    fn record(&self) -> OrientedEdge {
        OrientedEdge {
            from: self.from + 1,
            to: self.to + 1,
            rule: self.rule,
            triple: self.triple.map(|v| v + 1),
            witness: self.witness,
        }
    }
}

/// Applies a batch; returns whether anything was oriented.
fn apply(graph: &mut PartialGraph, trace: &mut OrientationTrace, conflicted: &mut BTreeSet<(usize, usize)>, batch: Vec<Proposal>) -> bool {
    let mut by_pair: BTreeMap<(usize, usize), Vec<Proposal>> = BTreeMap::new();
    for p in batch {
        by_pair.entry((p.from.min(p.to), p.from.max(p.to))).or_default().push(p);
    }
    let mut changed = false;
    for (pair, props) in by_pair {
        if conflicted.contains(&pair) || !graph.has_undirected(pair.0, pair.1) {
            continue;
        }
        let dir = (props[0].from, props[0].to);
        if props.iter().any(|p| (p.from, p.to) != dir) {
            conflicted.insert(pair);
            trace.conflicts.push(Conflict { pair: [pair.0 + 1, pair.1 + 1], proposals: props.iter().map(Proposal::record).collect() });
            continue;
        }
        graph.orient(dir.0, dir.1).expect("edge checked undirected");
        trace.oriented_edges.push(props[0].record());
        changed = true;
    }
    changed
}

fn double_headed_into(graph: &PartialGraph) -> Vec<(usize, usize)> {
    graph.double_headed().iter().copied().collect()
}

fn collider_a(result: &ReconstructionResult, graph: &PartialGraph, diagnostics: &mut Vec<String>) -> Vec<Proposal> {
    let mut out = Vec::new();
    for (j, k) in double_headed_into(graph) {
        for i in graph.undirected_neighbors(k) {
            if i == j {
                continue;
            }
            let Some(rec) = result.delayed_record(j, i) else {
                if !graph.adjacent(i, j) {
                    diagnostics.push(format!("no delayed record for y{} -> y{}; collider check skipped", j + 1, i + 1));
                }
                continue;
            };
            if let Some(s) = rec.separating_set {
                if !s.contains(k) {
                    out.push(Proposal { from: i, to: k, rule: OrientationRule::ColliderA, triple: [j, k, i], witness: WitnessRef::of(rec, s) });
                }
            }
        }
    }
    out
}

fn collider_b(result: &ReconstructionResult, graph: &PartialGraph, diagnostics: &mut Vec<String>) -> Vec<Proposal> {
    let mut out = Vec::new();
    for k in 0..graph.n() {
        let nbrs = graph.undirected_neighbors(k);
        for (x, &j) in nbrs.iter().enumerate() {
            for &i in &nbrs[x + 1..] {
                let Some(rec) = result.feedthrough_record(i, j) else {
                    diagnostics.push(format!("no feedthrough record for y{} - y{}; collider check skipped", i.min(j) + 1, i.max(j) + 1));
                    continue;
                };
                if let Some(s) = rec.separating_set {
                    if !s.contains(k) {
                        let w = WitnessRef::of(rec, s);
                        out.push(Proposal { from: j, to: k, rule: OrientationRule::ColliderB, triple: [j, k, i], witness: w });
                        out.push(Proposal { from: i, to: k, rule: OrientationRule::ColliderB, triple: [j, k, i], witness: w });
                    }
                }
            }
        }
    }
    out
}

fn propagation_a(result: &ReconstructionResult, graph: &PartialGraph) -> Vec<Proposal> {
    let mut out = Vec::new();
    for (k, i) in double_headed_into(graph) {
        for j in graph.undirected_neighbors(i) {
            if j == k {
                continue;
            }
            if let Some(rec) = result.delayed_record(k, j) {
                if let Some(s) = rec.separating_set.filter(|s| s.contains(i)) {
                    out.push(Proposal { from: i, to: j, rule: OrientationRule::PropagationA, triple: [k, i, j], witness: WitnessRef::of(rec, s) });
                }
            }
        }
    }
    out
}

fn propagation_b(result: &ReconstructionResult, graph: &PartialGraph) -> Vec<Proposal> {
    let mut out = Vec::new();
    for &(k, i) in graph.directed() {
        for j in graph.undirected_neighbors(i) {
            if j == k {
                continue;
            }
            if let Some(rec) = result.feedthrough_record(j, k) {
                if let Some(s) = rec.separating_set.filter(|s| s.contains(i)) {
                    out.push(Proposal { from: i, to: j, rule: OrientationRule::PropagationB, triple: [k, i, j], witness: WitnessRef::of(rec, s) });
                }
            }
        }
    }
    out
}

struct State {
    graph: PartialGraph,
    trace: OrientationTrace,
    conflicted: BTreeSet<(usize, usize)>,
}

impl State {
    fn from_trace(graph: PartialGraph, trace: OrientationTrace) -> Self {
        let conflicted = trace.conflicts.iter().map(|c| (c.pair[0] - 1, c.pair[1] - 1)).collect();
        Self { graph, trace, conflicted }
    }
}

/// All type A collider checks, then all type B checks.
pub fn detect_colliders(result: &ReconstructionResult) -> (PartialGraph, OrientationTrace) {
    let mut st = State::from_trace(result.graph.clone(), OrientationTrace::default());
    let mut diagnostics = Vec::new();
    let mut batch = collider_a(result, &st.graph, &mut diagnostics);
    batch.extend(collider_b(result, &st.graph, &mut diagnostics));
    apply(&mut st.graph, &mut st.trace, &mut st.conflicted, batch);
    st.trace.diagnostics.extend(diagnostics);
    (st.graph, st.trace)
}

/// Propagation rounds, alternating A and B, until a fixpoint.
pub fn propagate(graph: PartialGraph, trace: OrientationTrace, result: &ReconstructionResult) -> (PartialGraph, OrientationTrace) {
    let mut st = State::from_trace(graph, trace);
    loop {
        let batch = propagation_a(result, &st.graph);
        let a = apply(&mut st.graph, &mut st.trace, &mut st.conflicted, batch);
        let batch = propagation_b(result, &st.graph);
        let b = apply(&mut st.graph, &mut st.trace, &mut st.conflicted, batch);
        if !a && !b {
            break;
        }
    }
    (st.graph, st.trace)
}

pub fn orient_all(result: &ReconstructionResult) -> (PartialGraph, OrientationTrace) {
    let (g, t) = detect_colliders(result);
    propagate(g, t, result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gemd::{gemd, GemdParams};
    use crate::harness::builtins::{example1_diamond, example2_network, Example2Params};
    use crate::ldim::LdimModel;

    fn population(m: &LdimModel) -> ReconstructionResult {
        gemd(&m.population_autocovariance(10).unwrap(), &GemdParams::default()).unwrap()
    }

    fn directed(g: &PartialGraph) -> Vec<(usize, usize)> {
        g.directed().iter().map(|&(a, b)| (a + 1, b + 1)).collect()
    }

    #[test]
    fn six_node_network_is_fully_oriented() {
        let r = population(&example2_network(&Example2Params::uniform(0.45)).unwrap());
        let (g, trace) = orient_all(&r);
        assert_eq!(directed(&g), vec![(1, 2), (2, 3), (2, 4), (3, 4), (4, 5), (6, 4)]);
        assert!(g.undirected().is_empty());
        assert!(trace.conflicts.is_empty());
        let rule_of = |a: usize, b: usize| trace.oriented_edges.iter().find(|e| e.from == a && e.to == b).unwrap().rule;
        assert_eq!(rule_of(1, 2), OrientationRule::ColliderA);
        assert_eq!(rule_of(3, 4), OrientationRule::ColliderB);
        assert_eq!(rule_of(2, 3), OrientationRule::PropagationA);
        assert_eq!(rule_of(4, 5), OrientationRule::PropagationB);
    }

    #[test]
    fn diamond_keeps_two_edges_undirected() {
        let r = population(&example1_diamond([1.0; 5]).unwrap());
        let (g, trace) = orient_all(&r);
        assert_eq!(directed(&g), vec![(1, 4), (3, 4), (4, 5)]);
        let und: Vec<_> = g.undirected().iter().map(|&(a, b)| (a + 1, b + 1)).collect();
        assert_eq!(und, vec![(1, 2), (2, 3)]);
        assert!(trace.conflicts.is_empty());
        let (g_col, _) = detect_colliders(&r);
        assert_eq!(directed(&g_col), vec![(1, 4), (3, 4)]);
    }

    #[test]
    fn nothing_to_orient() {
        let r = population(&LdimModel::with_white_noise(3, []).unwrap());
        let (g, trace) = orient_all(&r);
        assert!(g.directed().is_empty() && trace.oriented_edges.is_empty());
        let chain = LdimModel::with_white_noise(3, [(0, 1, crate::lti::TransferFunction::gain(0.5)), (1, 2, crate::lti::TransferFunction::gain(0.5))]).unwrap();
        let (g, _) = orient_all(&population(&chain));
        assert!(g.directed().is_empty());
        assert_eq!(g.undirected().len(), 2);
    }

    #[test]
    fn conflicting_colliders_stay_undirected() {
        // 1 - 2 - 3 - 4 with {1,3} and {2,4} separated by sets missing the
        // middle vertex: 2 and 3 both want to be colliders on 2 - 3.
        let mut graph = PartialGraph::new(4);
        graph.add_undirected(0, 1).unwrap();
        graph.add_undirected(1, 2).unwrap();
        graph.add_undirected(2, 3).unwrap();
        let rec = |a: usize, b: usize| SeparationRecord {
            source: a,
            target: b,
            kind: SeparationKind::Feedthrough,
            separating_set: Some(VertexSet::EMPTY),
            fscores: vec![],
        };
        let result = ReconstructionResult { graph, records: vec![rec(0, 2), rec(1, 3), rec(0, 3)], config: GemdParams::default(), diagnostics: vec![] };
        let (g, trace) = orient_all(&result);
        assert_eq!(trace.conflicts.len(), 1);
        assert_eq!(trace.conflicts[0].pair, [2, 3]);
        assert!(g.has_undirected(1, 2));
        assert!(g.has_directed(0, 1) && g.has_directed(3, 2));
        assert!(trace.rule_log().contains("conflict on y2 - y3"));
    }

    #[test]
    fn trace_is_deterministic_and_serializable() {
        let r = population(&example2_network(&Example2Params::uniform(0.5)).unwrap());
        let (g1, t1) = orient_all(&r);
        let (g2, t2) = orient_all(&r);
        assert_eq!(g1, g2);
        assert_eq!(t1, t2);
        let back: OrientationTrace = serde_json::from_str(&serde_json::to_string(&t1).unwrap()).unwrap();
        assert_eq!(back, t1);
        assert_eq!(t1.rule_log().lines().count(), 6);
    }
}

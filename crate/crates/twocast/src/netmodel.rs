//! The layered two-unicast network: data model, text file format,
//! validation and pruning, and the elementary graph queries everything
//! else is built from (reachability, parent sets, clone sets, vertex
//! cuts).
//!
//! A network is a layered DAG. Layer 0 holds exactly the two sources
//! `s1, s2`; the last layer holds exactly the two destinations `d1, d2`;
//! every edge runs from one layer to the next. Construction prunes nodes
//! that no source can reach or that reach no destination (each pruned
//! node leaves a warning), so all queries may assume every surviving node
//! sits on a source-to-somewhere path.
//!
//! # File format
//!
//! UTF-8, line oriented: `# comment`, `node <name> <layer>`,
//! `edge <from> <to>`, blank lines ignored. Names are `[A-Za-z0-9_]+`;
//! `s1 s2 d1 d2` are reserved for the four terminals. The serializer
//! emits nodes sorted by (layer, name) and then edges sorted by name
//! pair, so parse-serialize round-trips are byte-stable.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// Handle to a node of one particular [`Network`].
///
/// Ids order nodes by (layer, name); within a single layer that is plain
/// lexicographic name order, which is the canonical order used for every
/// tie-break in the crate.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct NodeId(u32);

impl NodeId {
    pub(crate) fn index(self) -> usize {
        self.0 as usize
    }
}

/// Ordered set of nodes (iterates in (layer, name) order).
pub type NodeSet = BTreeSet<NodeId>;

/// Errors from parsing, validating, or assembling a network.
#[derive(Debug, Error)]
pub enum NetError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("{0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> NetError {
    NetError::Invalid(msg.into())
}

/// How aggressively construction removes structurally useless nodes.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub(crate) enum PruneMode {
    /// Drop internal nodes that no source reaches *or* that reach no
    /// destination, and require both `s1 -> d1` and `s2 -> d2`. Used for
    /// parsed input.
    Full,
    /// Drop only internal nodes that no source reaches, and skip the
    /// session connectivity checks. Used for rewired (induced) graphs,
    /// where a source may legitimately lose its destination.
    SourcesOnly,
}

/// An immutable layered two-unicast network.
#[derive(Clone)]
pub struct Network {
    names: Vec<String>,
    layer_of: Vec<u32>,
    layers: Vec<Vec<NodeId>>,
    parents: Vec<Vec<NodeId>>,
    children: Vec<Vec<NodeId>>,
    by_name: BTreeMap<String, NodeId>,
    terminals: [NodeId; 4], // s1, s2, d1, d2
    reach_s: [Vec<bool>; 2],
    reach_d: [Vec<bool>; 2],
    warnings: Vec<String>,
}

/// Parses the line format into a validated, pruned [`Network`].
pub fn parse_network(text: &str) -> Result<Network, NetError> {
    let mut nodes: Vec<(String, u32)> = Vec::new();
    let mut edges: Vec<(String, String)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        let syntax = |msg: String| NetError::Syntax { line, msg };
        match fields[0] {
            "node" => {
                if fields.len() != 3 {
                    return Err(syntax("expected `node <name> <layer>`".into()));
                }
                let name = fields[1];
                if !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                    return Err(syntax(format!("invalid node name `{name}`")));
                }
                let layer: u32 = fields[2]
                    .parse()
                    .map_err(|_| syntax(format!("invalid layer `{}`", fields[2])))?;
                nodes.push((name.to_string(), layer));
            }
            "edge" => {
                if fields.len() != 3 {
                    return Err(syntax("expected `edge <from> <to>`".into()));
                }
                edges.push((fields[1].to_string(), fields[2].to_string()));
            }
            other => return Err(syntax(format!("unknown directive `{other}`"))),
        }
    }
    Network::assemble(nodes, edges, PruneMode::Full)
}

impl Network {
    /// Builds a network from raw node and edge lists, enforcing the
    /// layering rules and pruning per `mode`.
    pub(crate) fn assemble(
        nodes: Vec<(String, u32)>,
        edges: Vec<(String, String)>,
        mode: PruneMode,
    ) -> Result<Network, NetError> {
        // Uniqueness and terminal presence.
        let mut by_name: BTreeMap<String, u32> = BTreeMap::new();
        for (name, layer) in &nodes {
            if by_name.insert(name.clone(), *layer).is_some() {
                return Err(invalid(format!("duplicate node `{name}`")));
            }
        }
        for term in ["s1", "s2", "d1", "d2"] {
            if !by_name.contains_key(term) {
                let kind = if term.starts_with('s') { "source" } else { "destination" };
                return Err(invalid(format!("missing {kind} {term}")));
            }
        }
        let max_layer = *by_name.values().max().expect("terminals exist");
        for term in ["s1", "s2"] {
            if by_name[term] != 0 {
                return Err(invalid(format!("source {term} must be at layer 0")));
            }
        }
        for term in ["d1", "d2"] {
            if by_name[term] != max_layer {
                return Err(invalid(format!(
                    "destination {term} must be at the last layer ({max_layer})"
                )));
            }
        }
        if max_layer == 0 {
            return Err(invalid("network needs at least two layers".to_string()));
        }
        for (name, layer) in &by_name {
            let is_terminal = matches!(name.as_str(), "s1" | "s2" | "d1" | "d2");
            if *layer == 0 && !is_terminal {
                return Err(invalid(format!("layer 0 must contain exactly s1 and s2, found `{name}`")));
            }
            if *layer == max_layer && !is_terminal {
                return Err(invalid(format!(
                    "the last layer must contain exactly d1 and d2, found `{name}`"
                )));
            }
        }

        // Edge sanity on names, before ids exist.
        let mut seen_edges: BTreeSet<(String, String)> = BTreeSet::new();
        for (from, to) in &edges {
            let from_layer = *by_name
                .get(from)
                .ok_or_else(|| invalid(format!("edge references unknown node `{from}`")))?;
            let to_layer = *by_name
                .get(to)
                .ok_or_else(|| invalid(format!("edge references unknown node `{to}`")))?;
            if to_layer != from_layer + 1 {
                return Err(invalid(format!(
                    "non-consecutive-layer edge {from} -> {to} (layers {from_layer} -> {to_layer})"
                )));
            }
            if !seen_edges.insert((from.clone(), to.clone())) {
                return Err(invalid(format!("multi-edge {from} -> {to}")));
            }
        }

        // Iteratively prune (on names), then build the final indexed form.
        let mut alive: BTreeSet<&str> = by_name.keys().map(String::as_str).collect();
        let mut pruned: Vec<(String, &'static str)> = Vec::new();
        loop {
            let fwd = closure(
                &edges,
                &alive,
                ["s1", "s2"].iter().copied(),
                |e| (e.0.as_str(), e.1.as_str()),
            );
            let bwd = closure(
                &edges,
                &alive,
                ["d1", "d2"].iter().copied(),
                |e| (e.1.as_str(), e.0.as_str()),
            );
            let mut removed = Vec::new();
            for &name in &alive {
                if matches!(name, "s1" | "s2" | "d1" | "d2") {
                    continue;
                }
                if !fwd.contains(name) {
                    removed.push((name, "unreachable from both sources"));
                } else if mode == PruneMode::Full && !bwd.contains(name) {
                    removed.push((name, "cannot reach any destination"));
                }
            }
            if removed.is_empty() {
                break;
            }
            for &(name, reason) in &removed {
                alive.remove(name);
                pruned.push((name.to_string(), reason));
            }
        }
        pruned.sort();
        let warnings: Vec<String> = pruned
            .iter()
            .map(|(name, reason)| format!("pruned node {name}: {reason}"))
            .collect();

        // Canonical ids: sort survivors by (layer, name).
        let mut survivors: Vec<(u32, String)> = by_name
            .iter()
            .filter(|(name, _)| alive.contains(name.as_str()))
            .map(|(name, layer)| (*layer, name.clone()))
            .collect();
        survivors.sort();
        let names: Vec<String> = survivors.iter().map(|(_, n)| n.clone()).collect();
        let layer_of: Vec<u32> = survivors.iter().map(|(l, _)| *l).collect();
        let id_of: BTreeMap<&str, NodeId> = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), NodeId(i as u32)))
            .collect();

        let mut layers = vec![Vec::new(); max_layer as usize + 1];
        for (i, &layer) in layer_of.iter().enumerate() {
            layers[layer as usize].push(NodeId(i as u32));
        }
        let mut parents = vec![Vec::new(); names.len()];
        let mut children = vec![Vec::new(); names.len()];
        for (from, to) in &edges {
            let (Some(&f), Some(&t)) = (id_of.get(from.as_str()), id_of.get(to.as_str())) else {
                continue; // endpoint pruned
            };
            parents[t.index()].push(f);
            children[f.index()].push(t);
        }
        for list in parents.iter_mut().chain(children.iter_mut()) {
            list.sort();
        }

        let terminals = [id_of["s1"], id_of["s2"], id_of["d1"], id_of["d2"]];
        let mut net = Network {
            by_name: names
                .iter()
                .enumerate()
                .map(|(i, n)| (n.clone(), NodeId(i as u32)))
                .collect(),
            names,
            layer_of,
            layers,
            parents,
            children,
            terminals,
            reach_s: [Vec::new(), Vec::new()],
            reach_d: [Vec::new(), Vec::new()],
            warnings,
        };
        for i in 0..2 {
            net.reach_s[i] = net.forward_closure(&[net.terminals[i]]);
            net.reach_d[i] = net.backward_closure(&[net.terminals[2 + i]]);
        }

        if mode == PruneMode::Full {
            for i in [1usize, 2] {
                if !net.reaches_dest(net.source(i), i) {
                    return Err(invalid(format!("s{i} cannot reach d{i}")));
                }
            }
        }
        Ok(net)
    }

    fn forward_closure(&self, starts: &[NodeId]) -> Vec<bool> {
        self.bfs(starts, |v| &self.children[v.index()])
    }

    fn backward_closure(&self, starts: &[NodeId]) -> Vec<bool> {
        self.bfs(starts, |v| &self.parents[v.index()])
    }

    fn bfs<'a>(&'a self, starts: &[NodeId], next: impl Fn(NodeId) -> &'a [NodeId]) -> Vec<bool> {
        let mut seen = vec![false; self.names.len()];
        let mut queue: Vec<NodeId> = Vec::new();
        for &s in starts {
            if !seen[s.index()] {
                seen[s.index()] = true;
                queue.push(s);
            }
        }
        while let Some(v) = queue.pop() {
            for &w in next(v) {
                if !seen[w.index()] {
                    seen[w.index()] = true;
                    queue.push(w);
                }
            }
        }
        seen
    }

    /// Number of nodes.
    pub fn num_nodes(&self) -> usize {
        self.names.len()
    }

    /// All node ids in canonical (layer, name) order.
    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.names.len() as u32).map(NodeId)
    }

    /// Number of layers (source layer and destination layer included).
    pub fn num_layers(&self) -> usize {
        self.layers.len()
    }

    /// Nodes of one layer in name order.
    pub fn layer(&self, l: usize) -> &[NodeId] {
        &self.layers[l]
    }

    pub fn layer_of(&self, v: NodeId) -> usize {
        self.layer_of[v.index()] as usize
    }

    pub fn name(&self, v: NodeId) -> &str {
        &self.names[v.index()]
    }

    /// Looks a node up by name.
    pub fn node(&self, name: &str) -> Option<NodeId> {
        self.by_name.get(name).copied()
    }

    /// Like [`Network::node`] but panics with the name when absent;
    /// for tests and internal code where existence is an invariant.
    pub fn expect_node(&self, name: &str) -> NodeId {
        self.node(name).unwrap_or_else(|| panic!("no node named `{name}`"))
    }

    /// Source `i` (1 or 2).
    pub fn source(&self, i: usize) -> NodeId {
        assert!(i == 1 || i == 2, "source index must be 1 or 2");
        self.terminals[i - 1]
    }

    /// Destination `i` (1 or 2).
    pub fn dest(&self, i: usize) -> NodeId {
        assert!(i == 1 || i == 2, "destination index must be 1 or 2");
        self.terminals[1 + i]
    }

    pub fn is_source(&self, v: NodeId) -> bool {
        v == self.terminals[0] || v == self.terminals[1]
    }

    pub fn is_dest(&self, v: NodeId) -> bool {
        v == self.terminals[2] || v == self.terminals[3]
    }

    /// Parents of `v` in name order (empty for sources). Every parent is
    /// source-reachable by the pruning invariant.
    pub fn parents(&self, v: NodeId) -> &[NodeId] {
        &self.parents[v.index()]
    }

    /// Children of `v` in name order (empty for destinations).
    pub fn children(&self, v: NodeId) -> &[NodeId] {
        &self.children[v.index()]
    }

    /// Parents of `v` that source `i` reaches.
    pub fn s_parents(&self, v: NodeId, i: usize) -> Vec<NodeId> {
        assert!(i == 1 || i == 2, "source index must be 1 or 2");
        self.parents(v)
            .iter()
            .copied()
            .filter(|&u| self.reach_s[i - 1][u.index()])
            .collect()
    }

    /// Is `v` reachable from source `i`? (Sources reach themselves.)
    pub fn source_reaches(&self, i: usize, v: NodeId) -> bool {
        assert!(i == 1 || i == 2, "source index must be 1 or 2");
        self.reach_s[i - 1][v.index()]
    }

    /// Is `v` reachable from either source?
    pub fn source_reachable(&self, v: NodeId) -> bool {
        self.reach_s[0][v.index()] || self.reach_s[1][v.index()]
    }

    /// Does `v` reach destination `i`? (Destinations reach themselves.)
    pub fn reaches_dest(&self, v: NodeId, i: usize) -> bool {
        assert!(i == 1 || i == 2, "destination index must be 1 or 2");
        self.reach_d[i - 1][v.index()]
    }

    /// Forward reachability closure of `src` (includes `src`).
    pub fn reachable_from(&self, src: NodeId) -> NodeSet {
        let seen = self.forward_closure(&[src]);
        self.nodes().filter(|v| seen[v.index()]).collect()
    }

    /// Nodes of `v`'s layer with exactly the same parent set as `v`
    /// (always contains `v`).
    ///
    /// # Panics
    ///
    /// Panics if `v` is a source: sources have no parents, so their clone
    /// set is not meaningful.
    pub fn clones(&self, v: NodeId) -> NodeSet {
        assert!(!self.is_source(v), "clone set of a source is undefined");
        let p = self.parents(v);
        self.layer(self.layer_of(v))
            .iter()
            .copied()
            .filter(|&u| self.parents(u) == p)
            .collect()
    }

    /// Nodes of `v`'s layer with the same source-`i`-reachable parents.
    ///
    /// # Panics
    ///
    /// Panics if `v` is a source.
    pub fn s_clones(&self, v: NodeId, i: usize) -> NodeSet {
        assert!(!self.is_source(v), "clone set of a source is undefined");
        let p = self.s_parents(v, i);
        self.layer(self.layer_of(v))
            .iter()
            .copied()
            .filter(|&u| self.s_parents(u, i) == p)
            .collect()
    }

    /// True iff removing `cut` leaves no path from `from \ cut` to
    /// `to \ cut`.
    pub fn is_vertex_cut(&self, cut: &NodeSet, from: &NodeSet, to: &NodeSet) -> bool {
        let mut seen = vec![false; self.names.len()];
        let mut queue: Vec<NodeId> = Vec::new();
        for &s in from {
            if !cut.contains(&s) && !seen[s.index()] {
                seen[s.index()] = true;
                queue.push(s);
            }
        }
        while let Some(v) = queue.pop() {
            if to.contains(&v) {
                return false;
            }
            for &w in self.children(v) {
                if !cut.contains(&w) && !seen[w.index()] {
                    seen[w.index()] = true;
                    queue.push(w);
                }
            }
        }
        true
    }

    /// Warnings recorded while pruning during construction.
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Names of a node set, sorted lexicographically (report order).
    pub fn sorted_names(&self, set: &NodeSet) -> Vec<String> {
        let mut names: Vec<String> = set.iter().map(|&v| self.name(v).to_string()).collect();
        names.sort();
        names
    }

    /// Serializes to the line format (idempotent under re-parsing).
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for v in self.nodes() {
            out.push_str(&format!("node {} {}\n", self.name(v), self.layer_of(v)));
        }
        let mut edge_names: Vec<(String, String)> = Vec::new();
        for v in self.nodes() {
            for &c in self.children(v) {
                edge_names.push((self.name(v).to_string(), self.name(c).to_string()));
            }
        }
        edge_names.sort();
        for (from, to) in edge_names {
            out.push_str(&format!("edge {from} {to}\n"));
        }
        out
    }

    /// Node/edge lists in the shape [`Network::assemble`] takes; the
    /// starting point for building rewired variants of this network.
    pub(crate) fn to_parts(&self) -> (Vec<(String, u32)>, Vec<(String, String)>) {
        let nodes = self
            .nodes()
            .map(|v| (self.name(v).to_string(), self.layer_of[v.index()]))
            .collect();
        let mut edges = Vec::new();
        for v in self.nodes() {
            for &c in self.children(v) {
                edges.push((self.name(v).to_string(), self.name(c).to_string()));
            }
        }
        (nodes, edges)
    }
}

impl fmt::Debug for Network {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Network({} nodes, {} layers)", self.num_nodes(), self.num_layers())
    }
}

/// Closure over `edges` restricted to `alive`, from `starts`, following
/// `orient` (forward or reversed edges).
fn closure<'a>(
    edges: &'a [(String, String)],
    alive: &BTreeSet<&'a str>,
    starts: impl Iterator<Item = &'a str>,
    orient: impl Fn(&'a (String, String)) -> (&'a str, &'a str),
) -> BTreeSet<&'a str> {
    let mut adj: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for e in edges {
        let (from, to) = orient(e);
        if alive.contains(from) && alive.contains(to) {
            adj.entry(from).or_default().push(to);
        }
    }
    let mut seen: BTreeSet<&str> = starts.filter(|s| alive.contains(s)).collect();
    let mut queue: Vec<&str> = seen.iter().copied().collect();
    while let Some(v) = queue.pop() {
        for &w in adj.get(v).into_iter().flatten() {
            if seen.insert(w) {
                queue.push(w);
            }
        }
    }
    seen
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;

    pub const ZIGZAG: &str = include_str!("../corpus/zigzag.net");
    pub const ASYM: &str = include_str!("../corpus/asym.net");
    pub const ASYM_DASHED: &str = include_str!("../corpus/asym_dashed.net");
    pub const DIAMOND_F4: &str = include_str!("../corpus/diamond_f4.net");
    pub const DISJOINT: &str = include_str!("../corpus/disjoint.net");

    pub fn corpus() -> Vec<(&'static str, Network)> {
        [
            ("zigzag", ZIGZAG),
            ("asym", ASYM),
            ("asym_dashed", ASYM_DASHED),
            ("diamond_f4", DIAMOND_F4),
            ("disjoint", DISJOINT),
        ]
        .into_iter()
        .map(|(name, text)| (name, parse_network(text).expect(name)))
        .collect()
    }

    /// Set-of-names helper for terse assertions.
    pub fn names(net: &Network, set: &NodeSet) -> Vec<String> {
        net.sorted_names(set)
    }

    pub fn set(net: &Network, names: &[&str]) -> NodeSet {
        names.iter().map(|n| net.expect_node(n)).collect()
    }
}

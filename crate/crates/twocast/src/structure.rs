//! Structural calculus on layered two-unicast networks: rank-mincuts,
//! primary min-cut nodes, critical nodes, omniscience, and the induced
//! (rewired) graphs that model interference neutralization.
//!
//! Everything here is exact graph reasoning — no field arithmetic, no
//! randomness — except [`rank_mincut_randomized`], which exists purely as
//! an independent Monte-Carlo cross-check on [`rank_mincut`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::gf::{FieldElem, Matrix};
use crate::netmodel::{NetError, Network, NodeId, NodeSet, PruneMode};

/// A critical node: the earliest-layer node whose clone set separates both
/// sources from destination `i`.
#[derive(Clone, Debug)]
pub struct CriticalNodeInfo {
    /// Representative node, lexicographically smallest of `clone_set`.
    /// When `layer == 0` this is source `s_i` itself (the degenerate case
    /// where the other source cannot reach `d_i`).
    pub node: NodeId,
    /// The layer index `k_i*`; 0 encodes the degenerate case.
    pub layer: usize,
    /// The full clone set of `node` (empty in the degenerate case).
    pub clone_set: NodeSet,
}

impl CriticalNodeInfo {
    /// True when the other source cannot reach `d_i` at all.
    pub fn is_degenerate(&self) -> bool {
        self.layer == 0
    }
}

/// Restriction of the network to nodes that are source-reachable and reach
/// some node of `U`: the sub-DAG along which information can flow into `U`.
struct Restriction {
    in_a: Vec<bool>,
    sources_in: Vec<NodeId>,
}

fn restriction(net: &Network, u_set: &NodeSet) -> Restriction {
    assert!(!u_set.is_empty(), "rank-mincut of an empty set is undefined");
    let k = net.layer_of(*u_set.iter().next().unwrap());
    let mut reaches_u = vec![false; net.num_nodes()];
    let mut queue = Vec::new();
    for &u in u_set {
        assert_eq!(net.layer_of(u), k, "rank-mincut target must lie in one layer");
        assert!(net.source_reachable(u), "rank-mincut target must be source-reachable");
        reaches_u[u.index()] = true;
        queue.push(u);
    }
    while let Some(v) = queue.pop() {
        for &p in net.parents(v) {
            if !reaches_u[p.index()] {
                reaches_u[p.index()] = true;
                queue.push(p);
            }
        }
    }
    let in_a: Vec<bool> = net
        .nodes()
        .map(|v| reaches_u[v.index()] && net.source_reachable(v))
        .collect();
    let sources_in = [net.source(1), net.source(2)]
        .into_iter()
        .filter(|s| in_a[s.index()])
        .collect();
    Restriction { in_a, sources_in }
}

/// Exact rank-mincut from `{s1, s2}` to `U`: the minimum rank of a
/// source-side-to-sink-side transfer matrix, always 1 or 2 here.
///
/// The value is 1 iff, within the restriction to nodes that are
/// source-reachable and reach `U`, either a single source survives or some
/// layer consists entirely of mutual clones (`U`'s own layer included —
/// a clone class receives one signal, rank 1); otherwise 2.
///
/// # Panics
///
/// Panics if `U` is empty, spans layers, or contains a node no source
/// reaches.
pub fn rank_mincut(net: &Network, u_set: &NodeSet) -> u8 {
    rank_mincut_impl(net, u_set).0
}

fn rank_mincut_impl(net: &Network, u_set: &NodeSet) -> (u8, Option<CloneLayer>) {
    let k = net.layer_of(*u_set.iter().next().unwrap());
    let rest = restriction(net, u_set);
    if rest.sources_in.len() <= 1 {
        debug_assert_eq!(rest.sources_in.len(), 1);
        return (1, Some(CloneLayer::Source(rest.sources_in[0])));
    }
    for l in 1..=k {
        let members: Vec<NodeId> =
            net.layer(l).iter().copied().filter(|v| rest.in_a[v.index()]).collect();
        let Some((&first, others)) = members.split_first() else {
            continue;
        };
        if others.iter().all(|&v| net.parents(v) == net.parents(first)) {
            return (1, Some(CloneLayer::Layer(first)));
        }
    }
    (2, None)
}

/// Where the rank first collapses to 1.
enum CloneLayer {
    /// Only this source survives the restriction.
    Source(NodeId),
    /// First all-clone layer, identified by its smallest member.
    Layer(NodeId),
}

/// The primary min-cut node of `U`: the (representative of the) earliest
/// clone class whose reception determines everything `U` receives.
/// Requires `rank_mincut(net, U) == 1`; when only one source reaches `U`
/// the answer is that source.
///
/// # Panics
///
/// Panics if `rank_mincut(net, U) == 2` (no primary min-cut exists), or on
/// the same precondition violations as [`rank_mincut`].
pub fn primary_mincut(net: &Network, u_set: &NodeSet) -> NodeId {
    match rank_mincut_impl(net, u_set) {
        (_, Some(CloneLayer::Source(s))) => s,
        (_, Some(CloneLayer::Layer(first))) => {
            let class = net.clones(first);
            debug_assert!(class.contains(&first));
            *class.iter().next().unwrap()
        }
        (rank, None) => panic!("primary min-cut undefined: rank-mincut is {rank}"),
    }
}

/// The critical node for destination `i`: the earliest-layer node whose
/// clone set is a `(s1,s2; d_i)`-vertex-cut. When the other source cannot
/// reach `d_i` the result degenerates to `(s_i, layer 0, empty set)`.
pub fn critical_node(net: &Network, i: usize) -> CriticalNodeInfo {
    assert!(i == 1 || i == 2, "destination index must be 1 or 2");
    let d = net.dest(i);
    if !net.source_reaches(3 - i, d) {
        return CriticalNodeInfo { node: net.source(i), layer: 0, clone_set: NodeSet::new() };
    }
    let sources: NodeSet = [net.source(1), net.source(2)].into_iter().collect();
    let target: NodeSet = [d].into_iter().collect();
    for l in 1..net.num_layers() {
        // Layer iteration is name-ordered, so the first hit in a clone
        // class is its lexicographically smallest member.
        for &v in net.layer(l) {
            let class = net.clones(v);
            if *class.iter().next().unwrap() != v {
                continue; // already tested via the class representative
            }
            if net.is_vertex_cut(&class, &sources, &target) {
                return CriticalNodeInfo { node: v, layer: l, clone_set: class };
            }
        }
    }
    unreachable!("the destination's own clone set is always a cut");
}

/// Omniscience test: `v` is omniscient when its clone set cuts both
/// sources off one destination while the other-session clone set cuts that
/// session's source from its own destination — in either index
/// orientation.
///
/// # Panics
///
/// Panics if `v` is a source.
pub fn is_omniscient(net: &Network, v: NodeId) -> bool {
    assert!(!net.is_source(v), "omniscience is defined for non-source nodes");
    let sources: NodeSet = [net.source(1), net.source(2)].into_iter().collect();
    let class = net.clones(v);
    let check = |cut_dest: usize| {
        let d_cut: NodeSet = [net.dest(cut_dest)].into_iter().collect();
        if !net.is_vertex_cut(&class, &sources, &d_cut) {
            return false;
        }
        let other = 3 - cut_dest;
        let s_class = net.s_clones(v, other);
        let s_from: NodeSet = [net.source(other)].into_iter().collect();
        let s_to: NodeSet = [net.dest(other)].into_iter().collect();
        net.is_vertex_cut(&s_class, &s_from, &s_to)
    };
    check(1) || check(2)
}

/// Omniscient nodes, looked up the fast way: a network has an omniscient
/// node iff a critical node is omniscient, so only `v1*` and `v2*` are
/// tested. Use [`omniscient_nodes_exhaustive`] to sweep every node.
pub fn omniscient_nodes(net: &Network) -> NodeSet {
    let mut found = NodeSet::new();
    for i in [1, 2] {
        let info = critical_node(net, i);
        if !info.is_degenerate() && is_omniscient(net, info.node) {
            found.insert(info.node);
        }
    }
    found
}

/// Reference implementation of the omniscience sweep: tests every
/// non-source node. Exists to validate the fast path on arbitrary inputs.
pub fn omniscient_nodes_exhaustive(net: &Network) -> NodeSet {
    net.nodes()
        .filter(|&v| !net.is_source(v) && is_omniscient(net, v))
        .collect()
}

/// An induced graph: the network rewired to model perfect interference
/// neutralization by the anchor's other-session parents.
#[derive(Clone, Debug)]
pub struct InducedGraph {
    /// The rewired (and re-pruned) network. Node ids are its own; map via
    /// names when relating to the base network.
    pub graph: Network,
    /// Anchor node (in base-network naming) whose other-session parents
    /// were neutralized.
    pub anchor: String,
    /// The pivot `w` actually used.
    pub pivot: String,
    /// False when the neutralized set had rank-mincut 2, in which case
    /// `graph` is the base network unchanged.
    pub rewired: bool,
    /// Names of nodes dropped because the rewiring left them unreachable.
    pub dropped: Vec<String>,
    /// Names of neutralized-set members that still reach a destination in
    /// the induced graph.
    pub reach_set: Vec<String>,
}

/// Builds the induced graph for orientation `i` (`i = 1` neutralizes the
/// `s2`-reachable parents of `anchor`; `i = 2` the mirror) with pivot `w`,
/// or the lexicographically smallest member of the neutralized set when
/// `pivot` is `None`.
///
/// Rewiring replaces `P(u)` by the symmetric difference `P(u) Δ S` for
/// exactly the anchor-layer nodes `u` with `w ∈ P(u)`, then drops nodes no
/// source can reach. Destinations survive even if unreachable — an induced
/// graph may legally disconnect a session.
pub fn induced_graph(
    net: &Network,
    i: usize,
    anchor: NodeId,
    pivot: Option<NodeId>,
) -> Result<InducedGraph, NetError> {
    assert!(i == 1 || i == 2, "orientation must be 1 or 2");
    let j = 3 - i;
    let s_set: Vec<NodeId> = net.s_parents(anchor, j);
    if s_set.is_empty() {
        return Err(NetError::Invalid(format!(
            "induced graph undefined: {} has no s{j}-reachable parents",
            net.name(anchor)
        )));
    }
    let w = match pivot {
        Some(w) => {
            if !s_set.contains(&w) {
                return Err(NetError::Invalid(format!(
                    "pivot {} is not an s{j}-reachable parent of {}",
                    net.name(w),
                    net.name(anchor)
                )));
            }
            w
        }
        None => s_set[0],
    };
    let s_as_set: NodeSet = s_set.iter().copied().collect();

    if rank_mincut(net, &s_as_set) == 2 {
        let reach_set = s_set
            .iter()
            .filter(|&&v| net.reaches_dest(v, 1) || net.reaches_dest(v, 2))
            .map(|&v| net.name(v).to_string())
            .collect();
        return Ok(InducedGraph {
            graph: net.clone(),
            anchor: net.name(anchor).to_string(),
            pivot: net.name(w).to_string(),
            rewired: false,
            dropped: Vec::new(),
            reach_set,
        });
    }

    let anchor_layer = net.layer_of(anchor);
    let (nodes, _) = net.to_parts();
    let mut edges: Vec<(String, String)> = Vec::new();
    for v in net.nodes() {
        let parents: Vec<NodeId> = if net.layer_of(v) == anchor_layer && !net.is_source(v) {
            let p: NodeSet = net.parents(v).iter().copied().collect();
            if p.contains(&w) {
                p.symmetric_difference(&s_as_set).copied().collect()
            } else {
                p.into_iter().collect()
            }
        } else {
            net.parents(v).to_vec()
        };
        for p in parents {
            edges.push((net.name(p).to_string(), net.name(v).to_string()));
        }
    }
    let graph = Network::assemble(nodes, edges, PruneMode::SourcesOnly)?;
    let dropped: Vec<String> = net
        .nodes()
        .map(|v| net.name(v).to_string())
        .filter(|name| graph.node(name).is_none())
        .collect();
    let reach_set = s_set
        .iter()
        .map(|&v| net.name(v).to_string())
        .filter(|name| {
            graph
                .node(name)
                .is_some_and(|v| graph.reaches_dest(v, 1) || graph.reaches_dest(v, 2))
        })
        .collect();
    Ok(InducedGraph {
        graph,
        anchor: net.name(anchor).to_string(),
        pivot: net.name(w).to_string(),
        rewired: true,
        dropped,
        reach_set,
    })
}

/// Monte-Carlo cross-check for [`rank_mincut`]: run random linear coding
/// over GF(2^r), read off each target node's two global coefficients, and
/// return the best rank of that matrix over three independent trials.
///
/// This deliberately re-derives the coefficient recursion instead of
/// calling into the coding engine, so the two routes stay independent.
pub fn rank_mincut_randomized(net: &Network, u_set: &NodeSet, r: u8, seed: u64) -> u8 {
    let mut best = 0u8;
    for trial in 0..3 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (trial as u64) << 32);
        // beta[v] = (coefficient of s1's symbol, of s2's symbol) at v.
        let mut beta = vec![[FieldElem::zero(r); 2]; net.num_nodes()];
        beta[net.source(1).index()][0] = FieldElem::one(r);
        beta[net.source(2).index()][1] = FieldElem::one(r);
        let mut alpha = vec![FieldElem::zero(r); net.num_nodes()];
        for v in net.nodes() {
            alpha[v.index()] = FieldElem::random(r, &mut rng);
        }
        for l in 1..net.num_layers() {
            for &v in net.layer(l) {
                let mut acc = [FieldElem::zero(r); 2];
                for &p in net.parents(v) {
                    for t in 0..2 {
                        acc[t] += alpha[p.index()] * beta[p.index()][t];
                    }
                }
                beta[v.index()] = acc;
            }
        }
        let rows: Vec<Vec<FieldElem>> =
            u_set.iter().map(|&v| beta[v.index()].to_vec()).collect();
        best = best.max(Matrix::from_rows(&rows).rank() as u8);
    }
    best.max(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::testutil::{corpus, set, ASYM, ASYM_DASHED, DIAMOND_F4, DISJOINT, ZIGZAG};
    use crate::netmodel::parse_network;

    #[test]
    fn critical_nodes_on_corpus() {
        let expect = [
            ("zigzag", ("u4", 2), ("d2", 3)),
            ("asym", ("u4", 2), ("d2", 3)),
            ("asym_dashed", ("u4", 2), ("d2", 3)),
            ("diamond_f4", ("d1", 3), ("d2", 3)),
        ];
        for (name, v1, v2) in expect {
            let net = corpus().into_iter().find(|(n, _)| *n == name).unwrap().1;
            for (i, (node, layer)) in [(1, v1), (2, v2)] {
                let info = critical_node(&net, i);
                assert_eq!(
                    (net.name(info.node), info.layer),
                    (node, layer),
                    "{name} critical node {i}"
                );
            }
        }
    }

    #[test]
    fn disjoint_critical_nodes_degenerate() {
        let net = parse_network(DISJOINT).unwrap();
        for i in [1, 2] {
            let info = critical_node(&net, i);
            assert!(info.is_degenerate());
            assert_eq!(info.node, net.source(i));
            assert!(info.clone_set.is_empty());
        }
    }

    #[test]
    fn rank_mincut_examples() {
        let diamond = parse_network(DIAMOND_F4).unwrap();
        assert_eq!(rank_mincut(&diamond, &set(&diamond, &["u4", "u5"])), 2);

        let asym = parse_network(ASYM).unwrap();
        assert_eq!(rank_mincut(&asym, &set(&asym, &["u2"])), 1);
        assert_eq!(rank_mincut(&asym, &set(&asym, &["s1"])), 1);
        assert_eq!(rank_mincut(&asym, &set(&asym, &["s1", "s2"])), 2);

        // A clone pair has rank 1 even when its shared parents see rank 2.
        assert_eq!(rank_mincut(&diamond, &set(&diamond, &["u4", "u6"])), 1);
        assert_eq!(rank_mincut(&diamond, &set(&diamond, &["u1", "u2"])), 2);
    }

    #[test]
    fn primary_mincut_examples() {
        let dashed = parse_network(ASYM_DASHED).unwrap();
        let pmc = primary_mincut(&dashed, &set(&dashed, &["u5"]));
        assert_eq!(dashed.name(pmc), "u2");

        let asym = parse_network(ASYM).unwrap();
        let pmc = primary_mincut(&asym, &set(&asym, &["u5"]));
        assert_eq!(asym.name(pmc), "s2");

        // Clone pair: the primary min-cut is the pair's own clone class.
        let diamond = parse_network(DIAMOND_F4).unwrap();
        let pmc = primary_mincut(&diamond, &set(&diamond, &["u4", "u6"]));
        assert_eq!(diamond.name(pmc), "u4");
    }

    #[test]
    fn critical_node_equals_primary_mincut_of_destination() {
        // Two independent routes to the same concept: the layer scan and
        // the restriction walk must agree on every corpus network.
        for (name, net) in corpus() {
            for i in [1, 2] {
                let info = critical_node(&net, i);
                if info.is_degenerate() {
                    continue;
                }
                let d: NodeSet = [net.dest(i)].into_iter().collect();
                assert_eq!(primary_mincut(&net, &d), info.node, "{name} dest {i}");
            }
        }
    }

    #[test]
    fn omniscience_on_corpus() {
        let zigzag = parse_network(ZIGZAG).unwrap();
        assert!(is_omniscient(&zigzag, zigzag.expect_node("u4")));
        assert_eq!(zigzag.sorted_names(&omniscient_nodes(&zigzag)), ["u4"]);

        let asym = parse_network(ASYM).unwrap();
        for v in asym.nodes().filter(|&v| !asym.is_source(v)) {
            assert!(!is_omniscient(&asym, v), "{} must not be omniscient", asym.name(v));
        }
        assert!(omniscient_nodes(&asym).is_empty());
    }

    #[test]
    fn fast_and_exhaustive_omniscience_agree_on_corpus() {
        for (name, net) in corpus() {
            assert_eq!(
                omniscient_nodes(&net).is_empty(),
                omniscient_nodes_exhaustive(&net).is_empty(),
                "{name}"
            );
        }
    }

    #[test]
    fn induced_graph_on_zigzag_disconnects_s2() {
        let net = parse_network(ZIGZAG).unwrap();
        let v1 = critical_node(&net, 1);
        let g12 = induced_graph(&net, 1, v1.node, None).unwrap();
        assert!(g12.rewired);
        assert_eq!(g12.pivot, "u2");
        assert_eq!(g12.dropped, ["u3"]);
        let g = &g12.graph;
        assert!(!g.source_reaches(2, g.expect_node("d2")));
        // u2 survives (s2 still reaches it) but now leads nowhere.
        assert!(g.node("u2").is_some());
        assert!(g.children(g.expect_node("u2")).is_empty());
    }

    #[test]
    fn induced_graph_on_asym_creates_an_omniscient_node() {
        let net = parse_network(ASYM).unwrap();
        let v1 = critical_node(&net, 1);
        let g12 = induced_graph(&net, 1, v1.node, None).unwrap();
        assert!(g12.rewired);
        assert_eq!(g12.dropped, ["u5"]);
        let g = &g12.graph;
        // u4 lost its u2 parent; u6 is untouched and becomes omniscient.
        assert_eq!(
            g.parents(g.expect_node("u4")),
            &[g.expect_node("u1")],
        );
        assert!(is_omniscient(g, g.expect_node("u6")));
        assert!(omniscient_nodes_exhaustive(&net).is_empty());
    }

    #[test]
    fn induced_graph_identity_when_rank_two() {
        // In diamond_f4 the s2-reachable parents of d1 are {u4, u5} with
        // rank-mincut 2, so no rewiring happens.
        let net = parse_network(DIAMOND_F4).unwrap();
        let d1 = net.expect_node("d1");
        let g12 = induced_graph(&net, 1, d1, None).unwrap();
        assert!(!g12.rewired);
        assert_eq!(g12.graph.serialize(), net.serialize());
    }

    #[test]
    fn induced_graph_pivot_choice_does_not_change_omniscience() {
        // All valid pivots agree on "does an omniscient node exist".
        for (name, net) in corpus() {
            let v1 = critical_node(&net, 1);
            if v1.is_degenerate() {
                continue;
            }
            let pivots = net.s_parents(v1.node, 2);
            let verdicts: Vec<bool> = pivots
                .iter()
                .map(|&w| {
                    let g = induced_graph(&net, 1, v1.node, Some(w)).unwrap();
                    !omniscient_nodes_exhaustive(&g.graph).is_empty()
                })
                .collect();
            assert!(
                verdicts.windows(2).all(|w| w[0] == w[1]),
                "{name}: pivot choice changed omniscience: {verdicts:?}"
            );
        }
    }

    #[test]
    fn randomized_mincut_agrees_on_corpus_sets() {
        for (name, net) in corpus() {
            for v in net.nodes() {
                if !net.source_reachable(v) {
                    continue;
                }
                let single: NodeSet = [v].into_iter().collect();
                let exact = rank_mincut(&net, &single);
                let sampled = rank_mincut_randomized(&net, &single, 16, 0xfeed);
                assert_eq!(exact, sampled, "{name}/{}", net.name(v));
            }
            // All source-reachable pairs within each layer.
            for l in 0..net.num_layers() {
                let layer: Vec<NodeId> = net.layer(l).to_vec();
                for (ai, &a) in layer.iter().enumerate() {
                    for &b in &layer[ai + 1..] {
                        let pair: NodeSet = [a, b].into_iter().collect();
                        let exact = rank_mincut(&net, &pair);
                        let sampled = rank_mincut_randomized(&net, &pair, 16, 0xbeef);
                        assert_eq!(
                            exact,
                            sampled,
                            "{name}/{}+{}",
                            net.name(a),
                            net.name(b)
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn lemma_rank_two_parents_of_deep_critical_nodes() {
        // Whenever k_i* >= 2, the critical node's parents see both sources
        // at full rank.
        for (name, net) in corpus() {
            for i in [1, 2] {
                let info = critical_node(&net, i);
                if info.layer < 2 {
                    continue;
                }
                let parents: NodeSet = net.parents(info.node).iter().copied().collect();
                assert_eq!(rank_mincut(&net, &parents), 2, "{name} dest {i}");
            }
        }
    }
}

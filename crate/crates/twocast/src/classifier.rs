//! Capacity-region classification for two-unicast layered networks.
//!
//! The classifier decides which of five regions the network's capacity
//! region is — triangle, one of two trapezoids, pentagon, or square —
//! purely from graph structure: omniscience first, then a cascade of
//! conditions evaluated in both index orientations. It also owns the
//! rate-region geometry (exact rational halfspace tests and corner sets).

use num_rational::Rational64;
use num_traits::Zero;
use serde::Serialize;
use std::fmt;

use crate::netmodel::{Network, NodeSet};
use crate::structure::{
    critical_node, induced_graph, is_omniscient, omniscient_nodes, primary_mincut, rank_mincut,
    CriticalNodeInfo,
};

/// A rate pair in symbols per channel use, kept exact.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct RatePair {
    pub r1: Rational64,
    pub r2: Rational64,
}

impl RatePair {
    /// Builds a rate pair; rates must be nonnegative.
    pub fn new(r1: Rational64, r2: Rational64) -> Self {
        assert!(r1 >= Rational64::zero() && r2 >= Rational64::zero(), "rates are nonnegative");
        RatePair { r1, r2 }
    }

    /// Convenience constructor from two numerator/denominator pairs.
    pub fn of(n1: i64, d1: i64, n2: i64, d2: i64) -> Self {
        RatePair::new(Rational64::new(n1, d1), Rational64::new(n2, d2))
    }

    /// The same pair with the two sessions swapped.
    pub fn mirror(self) -> Self {
        RatePair { r1: self.r2, r2: self.r1 }
    }
}

impl fmt::Display for RatePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.r1, self.r2)
    }
}

impl Serialize for RatePair {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("RatePair", 2)?;
        st.serialize_field("r1", &self.r1.to_string())?;
        st.serialize_field("r2", &self.r2.to_string())?;
        st.end()
    }
}

/// The five possible capacity regions.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RateRegion {
    Triangle,
    Trapezoid12,
    Trapezoid21,
    Pentagon,
    Square,
}

impl RateRegion {
    /// Compact code used in reports: T, T12, T21, P, S.
    pub fn code(self) -> &'static str {
        match self {
            RateRegion::Triangle => "T",
            RateRegion::Trapezoid12 => "T12",
            RateRegion::Trapezoid21 => "T21",
            RateRegion::Pentagon => "P",
            RateRegion::Square => "S",
        }
    }

    /// Inverse of [`code`](Self::code).
    pub fn from_code(code: &str) -> Option<Self> {
        Some(match code {
            "T" => RateRegion::Triangle,
            "T12" => RateRegion::Trapezoid12,
            "T21" => RateRegion::Trapezoid21,
            "P" => RateRegion::Pentagon,
            "S" => RateRegion::Square,
            _ => return None,
        })
    }

    /// The region with the two sessions swapped.
    pub fn mirror(self) -> Self {
        match self {
            RateRegion::Trapezoid12 => RateRegion::Trapezoid21,
            RateRegion::Trapezoid21 => RateRegion::Trapezoid12,
            other => other,
        }
    }

    /// Exact membership test. All regions live inside the unit square and
    /// differ only in the diagonal constraint:
    /// triangle `R1+R2 <= 1`, trapezoids `2R1+R2 <= 2` / `R1+2R2 <= 2`,
    /// pentagon `R1+R2 <= 3/2`, square none.
    pub fn contains(self, p: &RatePair) -> bool {
        let one = Rational64::from_integer(1);
        let two = Rational64::from_integer(2);
        if p.r1 > one || p.r2 > one {
            return false;
        }
        match self {
            RateRegion::Triangle => p.r1 + p.r2 <= one,
            RateRegion::Trapezoid12 => two * p.r1 + p.r2 <= two,
            RateRegion::Trapezoid21 => p.r1 + two * p.r2 <= two,
            RateRegion::Pentagon => p.r1 + p.r2 <= Rational64::new(3, 2),
            RateRegion::Square => true,
        }
    }

    /// Corner points of the region boundary away from the origin, in
    /// ascending `(r1, r2)` order. Time-sharing between consecutive
    /// corners (and the axes) realizes the whole region.
    pub fn corners(self) -> Vec<RatePair> {
        match self {
            RateRegion::Triangle => vec![RatePair::of(0, 1, 1, 1), RatePair::of(1, 1, 0, 1)],
            RateRegion::Trapezoid12 => vec![
                RatePair::of(0, 1, 1, 1),
                RatePair::of(1, 2, 1, 1),
                RatePair::of(1, 1, 0, 1),
            ],
            RateRegion::Trapezoid21 => vec![
                RatePair::of(0, 1, 1, 1),
                RatePair::of(1, 1, 0, 1),
                RatePair::of(1, 1, 1, 2),
            ],
            RateRegion::Pentagon => vec![
                RatePair::of(0, 1, 1, 1),
                RatePair::of(1, 2, 1, 1),
                RatePair::of(1, 1, 0, 1),
                RatePair::of(1, 1, 1, 2),
            ],
            RateRegion::Square => vec![
                RatePair::of(0, 1, 1, 1),
                RatePair::of(1, 1, 0, 1),
                RatePair::of(1, 1, 1, 1),
            ],
        }
    }
}

impl fmt::Display for RateRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// Condition evaluation for one orientation (12 anchors on `v1*` and asks
/// whether session 2 can be protected; 21 is the mirror image).
#[derive(Clone, Debug, Serialize)]
pub struct OrientationTrace {
    /// False when this orientation's anchor lies strictly later than the
    /// other critical node (the conditions are then never consulted), or
    /// when an omniscient node preempts the whole cascade.
    pub applicable: bool,
    /// Both critical layers positive and the anchor no later than the
    /// partner.
    pub t1: bool,
    /// The anchor's other-session parents have rank-mincut 1.
    pub t2: bool,
    /// The partner critical node's primary min-cut in the induced graph is
    /// omniscient there.
    pub t3: bool,
    /// The neutralization pivot is the other session's source itself.
    pub t4: bool,
    /// The pivot's other-session clone set cuts that session end to end.
    pub p4: bool,
    /// `t4 || p4`.
    pub q4: bool,
    /// `t1 && t2 && t3 && t4` — the trapezoid condition.
    pub trapezoid: bool,
    /// `t1 && t2 && t3 && p4` — the pentagon condition.
    pub pentagon: bool,
    /// Primary min-cut of the neutralized parent set (once `t2` holds).
    pub w: Option<String>,
    /// Primary min-cut of the partner critical node in the induced graph.
    pub u: Option<String>,
}

impl OrientationTrace {
    fn not_applicable() -> Self {
        OrientationTrace {
            applicable: false,
            t1: false,
            t2: false,
            t3: false,
            t4: false,
            p4: false,
            q4: false,
            trapezoid: false,
            pentagon: false,
            w: None,
            u: None,
        }
    }

    fn blank() -> Self {
        OrientationTrace { applicable: true, ..OrientationTrace::not_applicable() }
    }
}

/// Everything the condition cascade computed, for both orientations.
#[derive(Clone, Debug)]
pub struct ConditionTrace {
    pub k1: usize,
    pub k2: usize,
    /// Names of the critical nodes (a source name in the degenerate case).
    pub v1: String,
    pub v2: String,
    /// Omniscient nodes found via the critical-node fast path, sorted.
    pub omniscient: Vec<String>,
    /// True iff `omniscient` is nonempty.
    pub o: bool,
    pub or12: OrientationTrace,
    pub or21: OrientationTrace,
    /// Network warnings plus anything odd the cascade ran into.
    pub warnings: Vec<String>,
}

/// The JSON-facing analysis summary, with a stable field order.
#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub network: String,
    pub k1: usize,
    pub k2: usize,
    pub v1: String,
    pub v2: String,
    pub omniscient: Vec<String>,
    pub conditions: ConditionsReport,
    pub region: String,
    pub warnings: Vec<String>,
}

/// The `conditions` sub-object of [`AnalysisReport`].
#[derive(Clone, Debug, Serialize)]
pub struct ConditionsReport {
    pub o: bool,
    pub t12: OrientationTrace,
    pub t21: OrientationTrace,
}

impl AnalysisReport {
    /// Canonical single-line JSON; byte-identical across runs.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serialization cannot fail")
    }

    /// Indented JSON for human eyes.
    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

/// The full classification outcome.
#[derive(Clone, Debug)]
pub struct Classification {
    pub region: RateRegion,
    pub trace: ConditionTrace,
    pub report: AnalysisReport,
}

/// Evaluates the whole condition cascade: critical nodes, omniscience,
/// then conditions 1–4 in both orientations (skipped entirely when an
/// omniscient node exists, and for the orientation whose anchor lies
/// later than its partner).
pub fn eval_conditions(net: &Network) -> ConditionTrace {
    let c1 = critical_node(net, 1);
    let c2 = critical_node(net, 2);
    let omni = omniscient_nodes(net);
    let o = !omni.is_empty();
    let mut warnings: Vec<String> = net.warnings().to_vec();
    let (or12, or21) = if o {
        (OrientationTrace::not_applicable(), OrientationTrace::not_applicable())
    } else {
        (
            eval_orientation(net, 1, &c1, &c2, &mut warnings),
            eval_orientation(net, 2, &c2, &c1, &mut warnings),
        )
    };
    ConditionTrace {
        k1: c1.layer,
        k2: c2.layer,
        v1: net.name(c1.node).to_string(),
        v2: net.name(c2.node).to_string(),
        omniscient: net.sorted_names(&omni),
        o,
        or12,
        or21,
        warnings,
    }
}

fn eval_orientation(
    net: &Network,
    i: usize,
    front: &CriticalNodeInfo,
    back: &CriticalNodeInfo,
    warnings: &mut Vec<String>,
) -> OrientationTrace {
    let j = 3 - i;
    if front.layer > back.layer {
        return OrientationTrace::not_applicable();
    }
    let mut t = OrientationTrace::blank();
    t.t1 = front.layer > 0;
    if !t.t1 {
        return t;
    }

    let s_par = net.s_parents(front.node, j);
    if s_par.is_empty() {
        warnings.push(format!(
            "orientation {i}{j}: {} has no s{j}-reachable parents",
            net.name(front.node)
        ));
        return t;
    }
    let s_set: NodeSet = s_par.iter().copied().collect();
    t.t2 = rank_mincut(net, &s_set) == 1;
    if !t.t2 {
        return t;
    }

    let w = primary_mincut(net, &s_set);
    t.w = Some(net.name(w).to_string());

    match induced_graph(net, i, front.node, None) {
        Ok(ind) => {
            let g = &ind.graph;
            match g.node(net.name(back.node)) {
                Some(v) if g.source_reachable(v) => {
                    let single: NodeSet = [v].into_iter().collect();
                    let u = primary_mincut(g, &single);
                    t.u = Some(g.name(u).to_string());
                    t.t3 = !g.is_source(u) && is_omniscient(g, u);
                }
                _ => warnings.push(format!(
                    "orientation {i}{j}: {} is unreachable in the induced graph, \
                     so condition 3 fails",
                    net.name(back.node)
                )),
            }
        }
        Err(e) => warnings.push(format!("orientation {i}{j}: induced graph failed: {e}")),
    }

    t.t4 = w == net.source(j);
    if !t.t4 {
        let s_class = net.s_clones(w, j);
        let from: NodeSet = [net.source(j)].into_iter().collect();
        let to: NodeSet = [net.dest(j)].into_iter().collect();
        t.p4 = net.is_vertex_cut(&s_class, &from, &to);
    }
    t.q4 = t.t4 || t.p4;
    t.trapezoid = t.t1 && t.t2 && t.t3 && t.t4;
    t.pentagon = t.t1 && t.t2 && t.t3 && t.p4;
    t
}

/// Classifies the network's capacity region and assembles the report.
/// `label` names the network in the report (callers usually pass the file
/// stem).
pub fn classify(net: &Network, label: &str) -> Classification {
    let trace = eval_conditions(net);
    let region = if trace.o {
        RateRegion::Triangle
    } else if trace.or12.trapezoid {
        RateRegion::Trapezoid12
    } else if trace.or21.trapezoid {
        RateRegion::Trapezoid21
    } else if trace.or12.pentagon || trace.or21.pentagon {
        RateRegion::Pentagon
    } else {
        RateRegion::Square
    };
    let report = AnalysisReport {
        network: label.to_string(),
        k1: trace.k1,
        k2: trace.k2,
        v1: trace.v1.clone(),
        v2: trace.v2.clone(),
        omniscient: trace.omniscient.clone(),
        conditions: ConditionsReport {
            o: trace.o,
            t12: trace.or12.clone(),
            t21: trace.or21.clone(),
        },
        region: region.code().to_string(),
        warnings: trace.warnings.clone(),
    };
    Classification { region, trace, report }
}

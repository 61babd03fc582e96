//! Object-centric mode graph: one vertex per placement region and per arm,
//! with pick, place, and handoff edges weighted by Euclidean distance.
//!
//! The graph only describes where objects can sit and how they can change
//! hands; time and simultaneity live in the scheduling layers on top of it.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::Point;

pub type VertexId = usize;
pub type EdgeId = usize;
pub type PairId = usize;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ArmSpec {
    pub id: String,
    pub base: Point,
    pub reach: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RegionSpec {
    pub id: String,
    pub centroid: Point,
    pub capacity: usize,
    /// Radius around the centroid within which placement poses are sampled.
    pub extent: f64,
}

/// Static description of the scene the mode graph is built from.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Workspace {
    pub arms: Vec<ArmSpec>,
    pub regions: Vec<RegionSpec>,
    /// Two arms get a handoff edge pair iff their bases are at most this far apart.
    pub handoff_distance: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VertexKind {
    Arm,
    Region,
}

#[derive(Clone, Debug)]
pub struct Vertex {
    pub name: String,
    pub kind: VertexKind,
    /// Arm base or region centroid; edge weights are distances between these.
    pub point: Point,
    /// How many objects the vertex can hold at once. Always 1 for arms.
    pub capacity: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeKind {
    Pick,
    Place,
    Handoff,
}

#[derive(Clone, Debug)]
pub struct ModeEdge {
    pub kind: EdgeKind,
    pub from: VertexId,
    pub to: VertexId,
    pub weight: f64,
    /// The unordered bidirectional pair this edge belongs to.
    pub pair: PairId,
}

/// An unordered vertex pair connected by edges in both directions.
/// Every edge the builder emits belongs to exactly one such pair.
#[derive(Clone, Debug)]
pub struct EdgePair {
    pub lo: VertexId,
    pub hi: VertexId,
    pub weight: f64,
    pub lo_to_hi: EdgeId,
    pub hi_to_lo: EdgeId,
}

#[derive(Clone, Debug)]
pub struct ModeGraph {
    vertices: Vec<Vertex>,
    edges: Vec<ModeEdge>,
    pairs: Vec<EdgePair>,
    out: Vec<Vec<EdgeId>>,
    n_arms: usize,
}

/// Which vertex every object currently occupies, indexed by object.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiModalState(pub Vec<VertexId>);

impl MultiModalState {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CapacityViolation {
    pub vertex: VertexId,
    pub vertex_name: String,
    pub occupancy: usize,
    pub capacity: usize,
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("duplicate vertex id {0:?}")]
    DuplicateId(String),
    #[error("arm {0:?} has a non-finite or negative reach")]
    BadReach(String),
    #[error("region {0:?} must have capacity of at least 1")]
    BadCapacity(String),
    #[error("region {0:?} has a non-finite or negative extent")]
    BadExtent(String),
    #[error("handoff distance must be finite and non-negative")]
    BadHandoffDistance,
    #[error("region {0:?} is not reachable by any arm")]
    UnreachableRegion(String),
    #[error("no vertex named {0:?}")]
    UnknownVertex(String),
    #[error("vertex {vertex:?} holds {occupancy} objects but has capacity {capacity}")]
    CapacityExceeded {
        vertex: String,
        occupancy: usize,
        capacity: usize,
    },
}

impl ModeGraph {
    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, v: VertexId) -> &Vertex {
        &self.vertices[v]
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_arms(&self) -> usize {
        self.n_arms
    }

    pub fn is_arm(&self, v: VertexId) -> bool {
        v < self.n_arms
    }

    pub fn capacity(&self, v: VertexId) -> usize {
        self.vertices[v].capacity
    }

    pub fn edges(&self) -> &[ModeEdge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> &ModeEdge {
        &self.edges[e]
    }

    pub fn pairs(&self) -> &[EdgePair] {
        &self.pairs
    }

    pub fn pair(&self, p: PairId) -> &EdgePair {
        &self.pairs[p]
    }

    pub fn out_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.out[v]
    }

    pub fn vertex_id(&self, name: &str) -> Option<VertexId> {
        self.vertices.iter().position(|v| v.name == name)
    }

    pub fn edge_between(&self, from: VertexId, to: VertexId) -> Option<EdgeId> {
        self.out[from]
            .iter()
            .copied()
            .find(|&e| self.edges[e].to == to)
    }

    pub fn pair_between(&self, u: VertexId, v: VertexId) -> Option<PairId> {
        let (lo, hi) = if u < v { (u, v) } else { (v, u) };
        self.pairs
            .iter()
            .position(|p| p.lo == lo && p.hi == hi)
    }
}

/// Builds the mode graph for a workspace. Arms come first in vertex order,
/// then regions, both in specification order, so the layout is reproducible
/// down to the last bit.
pub fn build_mode_graph(ws: &Workspace) -> Result<ModeGraph, GraphError> {
    if !ws.handoff_distance.is_finite() || ws.handoff_distance < 0.0 {
        return Err(GraphError::BadHandoffDistance);
    }

    let mut vertices = Vec::with_capacity(ws.arms.len() + ws.regions.len());
    for arm in &ws.arms {
        if !arm.reach.is_finite() || arm.reach < 0.0 {
            return Err(GraphError::BadReach(arm.id.clone()));
        }
        vertices.push(Vertex {
            name: arm.id.clone(),
            kind: VertexKind::Arm,
            point: arm.base,
            capacity: 1,
        });
    }
    for region in &ws.regions {
        if region.capacity == 0 {
            return Err(GraphError::BadCapacity(region.id.clone()));
        }
        if !region.extent.is_finite() || region.extent < 0.0 {
            return Err(GraphError::BadExtent(region.id.clone()));
        }
        vertices.push(Vertex {
            name: region.id.clone(),
            kind: VertexKind::Region,
            point: region.centroid,
            capacity: region.capacity,
        });
    }
    for (i, v) in vertices.iter().enumerate() {
        if vertices[..i].iter().any(|w| w.name == v.name) {
            return Err(GraphError::DuplicateId(v.name.clone()));
        }
    }

    let n_arms = ws.arms.len();
    let mut edges: Vec<ModeEdge> = Vec::new();
    let mut pairs: Vec<EdgePair> = Vec::new();

    let link = |edges: &mut Vec<ModeEdge>,
                    pairs: &mut Vec<EdgePair>,
                    kind_fwd: EdgeKind,
                    kind_bwd: EdgeKind,
                    u: VertexId,
                    v: VertexId,
                    weight: f64| {
        let pair_id = pairs.len();
        let fwd = edges.len();
        edges.push(ModeEdge { kind: kind_fwd, from: u, to: v, weight, pair: pair_id });
        let bwd = edges.len();
        edges.push(ModeEdge { kind: kind_bwd, from: v, to: u, weight, pair: pair_id });
        let (lo, hi, lo_to_hi, hi_to_lo) =
            if u < v { (u, v, fwd, bwd) } else { (v, u, bwd, fwd) };
        pairs.push(EdgePair { lo, hi, weight, lo_to_hi, hi_to_lo });
    };

    for (ai, arm) in ws.arms.iter().enumerate() {
        for (ri, region) in ws.regions.iter().enumerate() {
            let d = arm.base.dist(region.centroid);
            if d <= arm.reach {
                let region_v = n_arms + ri;
                link(&mut edges, &mut pairs, EdgeKind::Pick, EdgeKind::Place, region_v, ai, d);
            }
        }
    }
    for a in 0..n_arms {
        for b in (a + 1)..n_arms {
            let d = ws.arms[a].base.dist(ws.arms[b].base);
            if d <= ws.handoff_distance {
                link(&mut edges, &mut pairs, EdgeKind::Handoff, EdgeKind::Handoff, a, b, d);
            }
        }
    }

    for (ri, region) in ws.regions.iter().enumerate() {
        let v = n_arms + ri;
        if !edges.iter().any(|e| e.from == v || e.to == v) {
            return Err(GraphError::UnreachableRegion(region.id.clone()));
        }
    }

    let mut out = vec![Vec::new(); vertices.len()];
    for (id, edge) in edges.iter().enumerate() {
        out[edge.from].push(id);
    }

    Ok(ModeGraph { vertices, edges, pairs, out, n_arms })
}

/// Resolves an object arrangement given as vertex names into a multi-modal
/// state, rejecting unknown vertices and over-full placements.
pub fn mode_of(g: &ModeGraph, locations: &[&str]) -> Result<MultiModalState, GraphError> {
    let mut modes = Vec::with_capacity(locations.len());
    for name in locations {
        match g.vertex_id(name) {
            Some(v) => modes.push(v),
            None => return Err(GraphError::UnknownVertex((*name).to_string())),
        }
    }
    let state = MultiModalState(modes);
    match validate_state(g, &state) {
        Ok(()) => Ok(state),
        Err(violations) => {
            let worst = &violations[0];
            Err(GraphError::CapacityExceeded {
                vertex: worst.vertex_name.clone(),
                occupancy: worst.occupancy,
                capacity: worst.capacity,
            })
        }
    }
}

/// Checks per-vertex occupancy of a state against capacities.
pub fn validate_state(g: &ModeGraph, q: &MultiModalState) -> Result<(), Vec<CapacityViolation>> {
    let mut occupancy = vec![0usize; g.n_vertices()];
    for &v in &q.0 {
        occupancy[v] += 1;
    }
    let violations: Vec<CapacityViolation> = occupancy
        .iter()
        .enumerate()
        .filter(|&(v, &occ)| occ > g.capacity(v))
        .map(|(v, &occ)| CapacityViolation {
            vertex: v,
            vertex_name: g.vertex(v).name.clone(),
            occupancy: occ,
            capacity: g.capacity(v),
        })
        .collect();
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn swap2_has_expected_topology_and_weights() {
        let g = build_mode_graph(&fixtures::swap2_workspace()).unwrap();
        assert_eq!(g.n_vertices(), 4);
        assert_eq!(g.n_arms(), 2);
        assert_eq!(g.edges().len(), 6);
        assert_eq!(g.pairs().len(), 3);

        let (l, r) = (g.vertex_id("L").unwrap(), g.vertex_id("R").unwrap());
        let (s1, s2) = (g.vertex_id("S1").unwrap(), g.vertex_id("S2").unwrap());

        let pick = g.edge(g.edge_between(s1, l).unwrap());
        assert_eq!(pick.kind, EdgeKind::Pick);
        assert_eq!(pick.weight, 0.5);
        let place = g.edge(g.edge_between(l, s1).unwrap());
        assert_eq!(place.kind, EdgeKind::Place);
        assert_eq!(place.weight, 0.5);
        let handoff = g.edge(g.edge_between(l, r).unwrap());
        assert_eq!(handoff.kind, EdgeKind::Handoff);
        assert_eq!(handoff.weight, 2.0);
        assert_eq!(g.edge(g.edge_between(r, s2).unwrap()).weight, 0.5);

        assert!(g.edge_between(l, s2).is_none(), "L must not reach S2");
        assert!(g.edge_between(s2, l).is_none());
    }

    #[test]
    fn single_arm_single_region_yields_one_pick_place_pair() {
        let ws = Workspace {
            arms: vec![ArmSpec { id: "a".into(), base: Point::xy(0.0, 0.0), reach: 1.0 }],
            regions: vec![RegionSpec {
                id: "s".into(),
                centroid: Point::xy(0.5, 0.0),
                capacity: 1,
                extent: 0.1,
            }],
            handoff_distance: 1.0,
        };
        let g = build_mode_graph(&ws).unwrap();
        assert_eq!(g.n_vertices(), 2);
        assert_eq!(g.edges().len(), 2);
        let kinds: Vec<EdgeKind> = g.edges().iter().map(|e| e.kind).collect();
        assert!(kinds.contains(&EdgeKind::Pick) && kinds.contains(&EdgeKind::Place));
    }

    #[test]
    fn unreachable_region_is_a_named_error() {
        let mut ws = fixtures::swap2_workspace();
        ws.regions.push(RegionSpec {
            id: "far".into(),
            centroid: Point::xy(100.0, 100.0),
            capacity: 1,
            extent: 0.1,
        });
        match build_mode_graph(&ws) {
            Err(GraphError::UnreachableRegion(name)) => assert_eq!(name, "far"),
            other => panic!("expected unreachable-region error, got {other:?}"),
        }
    }

    #[test]
    fn coincident_arm_bases_get_zero_weight_handoffs() {
        let ws = Workspace {
            arms: vec![
                ArmSpec { id: "a".into(), base: Point::xy(0.0, 0.0), reach: 1.0 },
                ArmSpec { id: "b".into(), base: Point::xy(0.0, 0.0), reach: 1.0 },
            ],
            regions: vec![RegionSpec {
                id: "s".into(),
                centroid: Point::xy(0.5, 0.0),
                capacity: 2,
                extent: 0.1,
            }],
            handoff_distance: 1.0,
        };
        let g = build_mode_graph(&ws).unwrap();
        let h = g.edge(g.edge_between(0, 1).unwrap());
        assert_eq!(h.kind, EdgeKind::Handoff);
        assert_eq!(h.weight, 0.0);
        assert!(g.edge_between(1, 0).is_some(), "handoffs come in both directions");
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let mut ws = fixtures::swap2_workspace();
        ws.regions[1].id = "L".into();
        assert!(matches!(build_mode_graph(&ws), Err(GraphError::DuplicateId(name)) if name == "L"));
    }

    #[test]
    fn mode_of_resolves_names_and_checks_capacity() {
        let g = build_mode_graph(&fixtures::swap2_workspace()).unwrap();
        let q = mode_of(&g, &["S1", "S2"]).unwrap();
        assert_eq!(q.0, vec![g.vertex_id("S1").unwrap(), g.vertex_id("S2").unwrap()]);

        assert!(matches!(
            mode_of(&g, &["S1", "nowhere"]),
            Err(GraphError::UnknownVertex(name)) if name == "nowhere"
        ));

        match mode_of(&g, &["L", "L"]) {
            Err(GraphError::CapacityExceeded { vertex, occupancy, capacity }) => {
                assert_eq!(vertex, "L");
                assert_eq!((occupancy, capacity), (2, 1));
            }
            other => panic!("expected capacity error, got {other:?}"),
        }
    }

    #[test]
    fn validate_state_reports_all_violations() {
        let g = build_mode_graph(&fixtures::swap2_workspace()).unwrap();
        let s1 = g.vertex_id("S1").unwrap();
        let ok = MultiModalState(vec![s1, s1]);
        assert!(validate_state(&g, &ok).is_ok(), "region capacity 2 admits two objects");

        let bad = MultiModalState(vec![s1, s1, s1]);
        let violations = validate_state(&g, &bad).unwrap_err();
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].vertex_name, "S1");
        assert_eq!(violations[0].occupancy, 3);
        assert_eq!(violations[0].capacity, 2);
    }
}

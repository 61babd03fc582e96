//! Time expansion of the mode graph.
//!
//! The mode graph is copied once per time slice 0..=T. Every bidirectional
//! edge pair becomes, per step, a merge-split gadget: both endpoint slices
//! feed a merge node, a single core arc carries the pair's weight to a split
//! node, and the split node feeds both endpoints in the next slice. Capping
//! the core arc at one unit therefore rules out head-on crossings of the
//! pair within a step. Stay arcs cost nothing.

use thiserror::Error;

use crate::mode_graph::{ModeGraph, PairId, VertexId};

pub type NodeId = usize;
pub type ArcId = usize;
pub type GadgetId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    /// Mode vertex `v` at time slice `t`.
    Slice { v: VertexId, t: usize },
    Merge { gadget: GadgetId },
    Split { gadget: GadgetId },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArcKind {
    Stay,
    GadgetIn,
    Core,
    GadgetOut,
}

#[derive(Clone, Debug)]
pub struct Arc {
    pub kind: ArcKind,
    pub from: NodeId,
    pub to: NodeId,
    /// The step this arc belongs to (it bridges slices `step` and `step + 1`).
    pub step: usize,
    /// Mode-edge weight for core arcs, zero otherwise.
    pub base_cost: f64,
    pub gadget: Option<GadgetId>,
}

#[derive(Clone, Debug)]
pub struct Gadget {
    pub step: usize,
    pub pair: PairId,
    pub merge: NodeId,
    pub split: NodeId,
    pub core: ArcId,
}

#[derive(Debug)]
pub struct TimeExpandedGraph<'g> {
    g: &'g ModeGraph,
    horizon: usize,
    arcs: Vec<Arc>,
    gadgets: Vec<Gadget>,
    out: Vec<Vec<ArcId>>,
    inc: Vec<Vec<ArcId>>,
    n_slice_nodes: usize,
}

#[derive(Debug, Error)]
pub enum ExpandError {
    #[error("horizon must be at least 1")]
    ZeroHorizon,
}

/// Expands `g` over `horizon` steps (slices 0..=horizon).
pub fn expand(g: &ModeGraph, horizon: usize) -> Result<TimeExpandedGraph<'_>, ExpandError> {
    if horizon == 0 {
        return Err(ExpandError::ZeroHorizon);
    }
    let nv = g.n_vertices();
    let np = g.pairs().len();
    let n_slice_nodes = (horizon + 1) * nv;
    let n_nodes = n_slice_nodes + 2 * horizon * np;

    let mut teg = TimeExpandedGraph {
        g,
        horizon,
        arcs: Vec::with_capacity(horizon * (nv + 5 * np)),
        gadgets: Vec::with_capacity(horizon * np),
        out: vec![Vec::new(); n_nodes],
        inc: vec![Vec::new(); n_nodes],
        n_slice_nodes,
    };

    for step in 0..horizon {
        for v in 0..nv {
            teg.push_arc(Arc {
                kind: ArcKind::Stay,
                from: teg.slice_node(v, step),
                to: teg.slice_node(v, step + 1),
                step,
                base_cost: 0.0,
                gadget: None,
            });
        }
        for (pair_id, pair) in g.pairs().iter().enumerate() {
            let gadget_id = teg.gadgets.len();
            let merge = n_slice_nodes + 2 * gadget_id;
            let split = merge + 1;
            for v in [pair.lo, pair.hi] {
                teg.push_arc(Arc {
                    kind: ArcKind::GadgetIn,
                    from: teg.slice_node(v, step),
                    to: merge,
                    step,
                    base_cost: 0.0,
                    gadget: Some(gadget_id),
                });
            }
            let core = teg.arcs.len();
            teg.push_arc(Arc {
                kind: ArcKind::Core,
                from: merge,
                to: split,
                step,
                base_cost: pair.weight,
                gadget: Some(gadget_id),
            });
            for v in [pair.lo, pair.hi] {
                teg.push_arc(Arc {
                    kind: ArcKind::GadgetOut,
                    from: split,
                    to: teg.slice_node(v, step + 1),
                    step,
                    base_cost: 0.0,
                    gadget: Some(gadget_id),
                });
            }
            teg.gadgets.push(Gadget { step, pair: pair_id, merge, split, core });
        }
    }

    Ok(teg)
}

impl<'g> TimeExpandedGraph<'g> {
    fn push_arc(&mut self, arc: Arc) {
        let id = self.arcs.len();
        self.out[arc.from].push(id);
        self.inc[arc.to].push(id);
        self.arcs.push(arc);
    }

    pub fn graph(&self) -> &'g ModeGraph {
        self.g
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn slice_node(&self, v: VertexId, t: usize) -> NodeId {
        t * self.g.n_vertices() + v
    }

    pub fn node_kind(&self, node: NodeId) -> NodeKind {
        if node < self.n_slice_nodes {
            let nv = self.g.n_vertices();
            NodeKind::Slice { v: node % nv, t: node / nv }
        } else {
            let rel = node - self.n_slice_nodes;
            let gadget = rel / 2;
            if rel % 2 == 0 {
                NodeKind::Merge { gadget }
            } else {
                NodeKind::Split { gadget }
            }
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.n_slice_nodes + 2 * self.gadgets.len()
    }

    pub fn n_slice_nodes(&self) -> usize {
        self.n_slice_nodes
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, a: ArcId) -> &Arc {
        &self.arcs[a]
    }

    pub fn gadgets(&self) -> &[Gadget] {
        &self.gadgets
    }

    pub fn out_arcs(&self, node: NodeId) -> &[ArcId] {
        &self.out[node]
    }

    pub fn in_arcs(&self, node: NodeId) -> &[ArcId] {
        &self.inc[node]
    }

    /// Cost of sending one object over `arc`: later steps cost proportionally
    /// more, and the first step already counts (offset one, not zero).
    pub fn timed_cost(&self, a: ArcId) -> f64 {
        let arc = &self.arcs[a];
        (arc.step + 1) as f64 * arc.base_cost
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::mode_graph::build_mode_graph;

    #[test]
    fn swap2_single_step_expansion_counts() {
        let g = build_mode_graph(&fixtures::swap2_workspace()).unwrap();
        let teg = expand(&g, 1).unwrap();
        assert_eq!(teg.n_slice_nodes(), 8);
        assert_eq!(teg.gadgets().len(), 3);
        assert_eq!(teg.n_nodes(), 8 + 6);
        let stay = teg.arcs().iter().filter(|a| a.kind == ArcKind::Stay).count();
        let core = teg.arcs().iter().filter(|a| a.kind == ArcKind::Core).count();
        assert_eq!(stay, 4);
        assert_eq!(teg.arcs().len() - stay, 15, "five arcs per gadget");
        assert_eq!(core, 3);
    }

    #[test]
    fn zero_horizon_is_rejected() {
        let g = build_mode_graph(&fixtures::swap2_workspace()).unwrap();
        assert!(matches!(expand(&g, 0), Err(ExpandError::ZeroHorizon)));
    }

    #[test]
    fn pick_place_pair_becomes_one_gadget_per_step() {
        let g = build_mode_graph(&crate::mode_graph::Workspace {
            arms: vec![crate::mode_graph::ArmSpec {
                id: "a".into(),
                base: crate::geom::Point::xy(0.0, 0.0),
                reach: 1.0,
            }],
            regions: vec![crate::mode_graph::RegionSpec {
                id: "s".into(),
                centroid: crate::geom::Point::xy(0.6, 0.0),
                capacity: 1,
                extent: 0.1,
            }],
            handoff_distance: 0.5,
        })
        .unwrap();
        let teg = expand(&g, 2).unwrap();
        assert_eq!(teg.gadgets().len(), 2);
        let cores: Vec<_> = teg.arcs().iter().filter(|a| a.kind == ArcKind::Core).collect();
        assert_eq!(cores.len(), 2);
        assert!(cores.iter().all(|a| a.base_cost == 0.6));
        assert_eq!(teg.timed_cost(teg.gadgets()[0].core), 0.6);
        assert_eq!(teg.timed_cost(teg.gadgets()[1].core), 1.2);
    }

    #[test]
    fn every_vertex_appears_in_every_slice_with_a_stay_arc() {
        let g = build_mode_graph(&fixtures::swapbuf_workspace()).unwrap();
        let horizon = 3;
        let teg = expand(&g, horizon).unwrap();
        for t in 0..horizon {
            for v in 0..g.n_vertices() {
                let node = teg.slice_node(v, t);
                assert!(teg
                    .out_arcs(node)
                    .iter()
                    .any(|&a| teg.arc(a).kind == ArcKind::Stay && teg.arc(a).to == teg.slice_node(v, t + 1)));
            }
        }
    }
}

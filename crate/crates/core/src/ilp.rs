//! Explicit 0/1 formulation of the scheduling problem on a time-expanded
//! graph.
//!
//! One binary variable per (object, arc) says whether the object traverses
//! the arc. Unit supply/demand rows route each object from its start slice
//! to its goal slice, core-arc rows forbid head-on crossings, inflow rows
//! enforce vertex capacities per slice, and movement rows cap how many
//! objects may move over a vertex's edges within one step. The objective is
//! the smallest possible maximum, over objects, of time-scaled traversal
//! cost. The solver consumes the structure; `check_assignment` re-evaluates
//! the rows literally so any produced assignment can be audited against the
//! model itself.

use thiserror::Error;

use crate::mode_graph::{validate_state, MultiModalState, VertexId};
use crate::teg::{ArcId, ArcKind, NodeKind, TimeExpandedGraph};

pub type VarId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    Eq,
    Le,
}

/// Why a row exists; keeps failures explainable and tests direct.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowKind {
    Flow { object: usize, node: usize },
    HeadOn { gadget: usize },
    Occupancy { vertex: VertexId, t: usize },
    Throughput { vertex: VertexId, step: usize },
}

#[derive(Clone, Debug)]
pub struct LinearRow {
    pub kind: RowKind,
    pub terms: Vec<(VarId, i32)>,
    pub cmp: Cmp,
    pub rhs: i32,
}

#[derive(Debug)]
pub struct IlpModel<'g> {
    teg: TimeExpandedGraph<'g>,
    starts: Vec<VertexId>,
    goals: Vec<VertexId>,
    rows: Vec<LinearRow>,
    /// Time-scaled cost per arc; identical for every object.
    arc_cost: Vec<f64>,
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("start and goal must place the same objects")]
    LengthMismatch,
    #[error("object {object} references vertex {vertex} which is not in the graph")]
    BadVertex { object: usize, vertex: VertexId },
    #[error("{0} state violates vertex capacities")]
    InvalidState(&'static str),
}

pub fn build_model<'g>(
    teg: TimeExpandedGraph<'g>,
    q_init: &MultiModalState,
    q_goal: &MultiModalState,
) -> Result<IlpModel<'g>, ModelError> {
    if q_init.len() != q_goal.len() {
        return Err(ModelError::LengthMismatch);
    }
    let g = teg.graph();
    for q in [q_init, q_goal] {
        for (object, &v) in q.0.iter().enumerate() {
            if v >= g.n_vertices() {
                return Err(ModelError::BadVertex { object, vertex: v });
            }
        }
    }
    if validate_state(g, q_init).is_err() {
        return Err(ModelError::InvalidState("start"));
    }
    if validate_state(g, q_goal).is_err() {
        return Err(ModelError::InvalidState("goal"));
    }

    let k = q_init.len();
    let n_arcs = teg.arcs().len();
    let horizon = teg.horizon();
    let var = |object: usize, arc: ArcId| object * n_arcs + arc;

    let mut rows = Vec::new();

    for i in 0..k {
        for node in 0..teg.n_nodes() {
            let mut terms: Vec<(VarId, i32)> = Vec::new();
            let rhs = match teg.node_kind(node) {
                NodeKind::Slice { v, t } if t == 0 => {
                    for &a in teg.out_arcs(node) {
                        terms.push((var(i, a), 1));
                    }
                    i32::from(v == q_init.0[i])
                }
                NodeKind::Slice { v, t } if t == horizon => {
                    for &a in teg.in_arcs(node) {
                        terms.push((var(i, a), 1));
                    }
                    i32::from(v == q_goal.0[i])
                }
                _ => {
                    for &a in teg.out_arcs(node) {
                        terms.push((var(i, a), 1));
                    }
                    for &a in teg.in_arcs(node) {
                        terms.push((var(i, a), -1));
                    }
                    0
                }
            };
            rows.push(LinearRow { kind: RowKind::Flow { object: i, node }, terms, cmp: Cmp::Eq, rhs });
        }
    }

    for (gadget_id, gadget) in teg.gadgets().iter().enumerate() {
        let terms = (0..k).map(|i| (var(i, gadget.core), 1)).collect();
        rows.push(LinearRow {
            kind: RowKind::HeadOn { gadget: gadget_id },
            terms,
            cmp: Cmp::Le,
            rhs: 1,
        });
    }

    for t in 1..=horizon {
        for v in 0..g.n_vertices() {
            let node = teg.slice_node(v, t);
            let mut terms = Vec::new();
            for i in 0..k {
                for &a in teg.in_arcs(node) {
                    terms.push((var(i, a), 1));
                }
            }
            rows.push(LinearRow {
                kind: RowKind::Occupancy { vertex: v, t },
                terms,
                cmp: Cmp::Le,
                rhs: g.capacity(v) as i32,
            });
        }
    }

    for step in 0..horizon {
        for v in 0..g.n_vertices() {
            let leave = teg.slice_node(v, step);
            let enter = teg.slice_node(v, step + 1);
            let mut terms = Vec::new();
            for i in 0..k {
                for &a in teg.out_arcs(leave) {
                    if teg.arc(a).kind == ArcKind::GadgetIn {
                        terms.push((var(i, a), 1));
                    }
                }
                for &a in teg.in_arcs(enter) {
                    if teg.arc(a).kind == ArcKind::GadgetOut {
                        terms.push((var(i, a), 1));
                    }
                }
            }
            rows.push(LinearRow {
                kind: RowKind::Throughput { vertex: v, step },
                terms,
                cmp: Cmp::Le,
                rhs: g.capacity(v) as i32,
            });
        }
    }

    let arc_cost = (0..n_arcs).map(|a| teg.timed_cost(a)).collect();

    Ok(IlpModel { teg, starts: q_init.0.clone(), goals: q_goal.0.clone(), rows, arc_cost })
}

impl<'g> IlpModel<'g> {
    pub fn teg(&self) -> &TimeExpandedGraph<'g> {
        &self.teg
    }

    pub fn n_objects(&self) -> usize {
        self.starts.len()
    }

    pub fn n_vars(&self) -> usize {
        self.starts.len() * self.teg.arcs().len()
    }

    pub fn rows(&self) -> &[LinearRow] {
        &self.rows
    }

    pub fn starts(&self) -> &[VertexId] {
        &self.starts
    }

    pub fn goals(&self) -> &[VertexId] {
        &self.goals
    }

    pub fn var(&self, object: usize, arc: ArcId) -> VarId {
        object * self.teg.arcs().len() + arc
    }

    pub fn arc_cost(&self, arc: ArcId) -> f64 {
        self.arc_cost[arc]
    }

    /// Evaluates every row against a full 0/1 assignment.
    pub fn check_assignment(&self, x: &[bool]) -> Result<(), RowKind> {
        assert_eq!(x.len(), self.n_vars(), "assignment length must match the model");
        for row in &self.rows {
            let lhs: i32 = row.terms.iter().map(|&(v, c)| if x[v] { c } else { 0 }).sum();
            let ok = match row.cmp {
                Cmp::Eq => lhs == row.rhs,
                Cmp::Le => lhs <= row.rhs,
            };
            if !ok {
                return Err(row.kind);
            }
        }
        Ok(())
    }

    /// Time-scaled traversal cost of one object under an assignment.
    pub fn object_cost(&self, x: &[bool], object: usize) -> f64 {
        let n_arcs = self.teg.arcs().len();
        (0..n_arcs)
            .filter(|&a| x[object * n_arcs + a])
            .map(|a| self.arc_cost[a])
            .sum()
    }

    /// The min-max objective value of an assignment.
    pub fn objective(&self, x: &[bool]) -> f64 {
        (0..self.n_objects())
            .map(|i| self.object_cost(x, i))
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::mode_graph::{build_mode_graph, mode_of};
    use crate::teg::expand;

    #[test]
    fn swap2_model_has_expected_shape() {
        let g = build_mode_graph(&fixtures::swap2_workspace()).unwrap();
        let init = mode_of(&g, &["S1", "S2"]).unwrap();
        let goal = mode_of(&g, &["S2", "S1"]).unwrap();
        let model = build_model(expand(&g, 1).unwrap(), &init, &goal).unwrap();
        assert_eq!(model.n_vars(), 2 * 19);
        let flows = model.rows().iter().filter(|r| matches!(r.kind, RowKind::Flow { .. })).count();
        assert_eq!(flows, 2 * 14);
        let headon = model.rows().iter().filter(|r| matches!(r.kind, RowKind::HeadOn { .. })).count();
        assert_eq!(headon, 3);
        let occ = model.rows().iter().filter(|r| matches!(r.kind, RowKind::Occupancy { .. })).count();
        assert_eq!(occ, 4);
        let thr = model.rows().iter().filter(|r| matches!(r.kind, RowKind::Throughput { .. })).count();
        assert_eq!(thr, 4);
    }

    #[test]
    fn all_stay_assignment_satisfies_identity_instance() {
        let g = build_mode_graph(&fixtures::swap2_workspace()).unwrap();
        let q = mode_of(&g, &["S1", "S2"]).unwrap();
        let horizon = 2;
        let model = build_model(expand(&g, horizon).unwrap(), &q, &q).unwrap();

        let mut x = vec![false; model.n_vars()];
        for (i, &v) in q.0.iter().enumerate() {
            for step in 0..horizon {
                let node = model.teg().slice_node(v, step);
                let stay = model
                    .teg()
                    .out_arcs(node)
                    .iter()
                    .copied()
                    .find(|&a| model.teg().arc(a).kind == ArcKind::Stay)
                    .unwrap();
                x[model.var(i, stay)] = true;
            }
        }
        assert!(model.check_assignment(&x).is_ok());
        assert_eq!(model.objective(&x), 0.0);
    }

    #[test]
    fn endpoint_errors_are_reported() {
        let g = build_mode_graph(&fixtures::swap2_workspace()).unwrap();
        let init = mode_of(&g, &["S1", "S2"]).unwrap();
        let goal = mode_of(&g, &["S2", "S1"]).unwrap();

        let short = MultiModalState(vec![init.0[0]]);
        assert!(matches!(
            build_model(expand(&g, 1).unwrap(), &short, &goal),
            Err(ModelError::LengthMismatch)
        ));

        let out_of_range = MultiModalState(vec![goal.0[0], 99]);
        assert!(matches!(
            build_model(expand(&g, 1).unwrap(), &init, &out_of_range),
            Err(ModelError::BadVertex { object: 1, vertex: 99 })
        ));

        let overfull = MultiModalState(vec![0, 0]);
        assert!(matches!(
            build_model(expand(&g, 1).unwrap(), &overfull, &goal),
            Err(ModelError::InvalidState("start"))
        ));
    }
}

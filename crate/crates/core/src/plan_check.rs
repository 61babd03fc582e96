//! Independent validation of slice-by-slice schedules, plus the plain-text
//! trace format the CLI reads and writes.
//!
//! Deliberately knows nothing about how plans are produced: it re-derives
//! every rule (edge existence, unordered pair exclusivity, per-vertex
//! movement limits, occupancy) straight from the mode graph so that a
//! buggy solver and a buggy checker would have to agree by accident.

use thiserror::Error;

use crate::mode_graph::{ModeGraph, MultiModalState, VertexId};

#[derive(Debug, Error, PartialEq)]
pub enum PlanCheckError {
    #[error("plan is empty")]
    Empty,
    #[error("object {object} has {got} slices, expected {want}")]
    RaggedPaths { object: usize, got: usize, want: usize },
    #[error("object {object} starts at {got:?}, instance starts at {want:?}")]
    WrongStart { object: usize, got: String, want: String },
    #[error("object {object} ends at {got:?}, goal is {want:?}")]
    WrongGoal { object: usize, got: String, want: String },
    #[error("object {object} jumps {from:?} -> {to:?} at step {step}: no such transition")]
    NoEdge { object: usize, step: usize, from: String, to: String },
    #[error("vertex {vertex:?} holds {occupancy} objects at slice {t}, capacity {capacity}")]
    OverOccupied { vertex: String, t: usize, occupancy: usize, capacity: usize },
    #[error("vertex {vertex:?} is involved in {moves} transfers at step {step}, capacity {capacity}")]
    OverMoved { vertex: String, step: usize, moves: usize, capacity: usize },
    #[error("transition between {a:?} and {b:?} is used twice at step {step}")]
    PairClash { a: String, b: String, step: usize },
    #[error("trace line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("object count mismatch: trace has {got}, instance has {want}")]
    ObjectCount { got: usize, want: usize },
}

/// Totals extracted from a validated plan.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanStats {
    pub n_steps: usize,
    pub per_object_actions: Vec<usize>,
    pub per_object_cost: Vec<f64>,
    pub max_actions: usize,
}

/// Checks a full schedule, returning its per-object totals on success.
/// `paths[i][t]` is object i's vertex at slice t; all rules are enforced
/// for every step, including occupancy of slice 0.
pub fn check_plan(
    g: &ModeGraph,
    q_init: &MultiModalState,
    q_goal: &MultiModalState,
    paths: &[Vec<VertexId>],
) -> Result<PlanStats, PlanCheckError> {
    if paths.is_empty() || paths[0].is_empty() {
        return Err(PlanCheckError::Empty);
    }
    if paths.len() != q_init.len() || paths.len() != q_goal.len() {
        return Err(PlanCheckError::ObjectCount { got: paths.len(), want: q_init.len() });
    }
    let slices = paths[0].len();
    let name = |v: VertexId| g.vertex(v).name.clone();
    for (i, path) in paths.iter().enumerate() {
        if path.len() != slices {
            return Err(PlanCheckError::RaggedPaths { object: i, got: path.len(), want: slices });
        }
        if path[0] != q_init.0[i] {
            return Err(PlanCheckError::WrongStart {
                object: i,
                got: name(path[0]),
                want: name(q_init.0[i]),
            });
        }
        if *path.last().unwrap() != q_goal.0[i] {
            return Err(PlanCheckError::WrongGoal {
                object: i,
                got: name(*path.last().unwrap()),
                want: name(q_goal.0[i]),
            });
        }
    }

    let n_steps = slices - 1;
    let nv = g.n_vertices();
    for t in 0..slices {
        let mut occupancy = vec![0usize; nv];
        for path in paths {
            occupancy[path[t]] += 1;
        }
        for v in 0..nv {
            if occupancy[v] > g.capacity(v) {
                return Err(PlanCheckError::OverOccupied {
                    vertex: name(v),
                    t,
                    occupancy: occupancy[v],
                    capacity: g.capacity(v),
                });
            }
        }
    }
    for step in 0..n_steps {
        let mut movement = vec![0usize; nv];
        let mut pair_used = vec![0usize; g.pairs().len()];
        for (i, path) in paths.iter().enumerate() {
            let (u, w) = (path[step], path[step + 1]);
            if u == w {
                continue;
            }
            let Some(pair) = g.pair_between(u, w) else {
                return Err(PlanCheckError::NoEdge {
                    object: i,
                    step,
                    from: name(u),
                    to: name(w),
                });
            };
            movement[u] += 1;
            movement[w] += 1;
            pair_used[pair] += 1;
        }
        for (p, &used) in pair_used.iter().enumerate() {
            if used > 1 {
                let pair = g.pair(p);
                return Err(PlanCheckError::PairClash {
                    a: name(pair.lo),
                    b: name(pair.hi),
                    step,
                });
            }
        }
        for v in 0..nv {
            if movement[v] > g.capacity(v) {
                return Err(PlanCheckError::OverMoved {
                    vertex: name(v),
                    step,
                    moves: movement[v],
                    capacity: g.capacity(v),
                });
            }
        }
    }

    let per_object_actions: Vec<usize> = paths
        .iter()
        .map(|p| (0..n_steps).filter(|&t| p[t] != p[t + 1]).count())
        .collect();
    let per_object_cost: Vec<f64> = paths
        .iter()
        .map(|p| {
            (0..n_steps)
                .filter(|&t| p[t] != p[t + 1])
                .map(|t| g.pair(g.pair_between(p[t], p[t + 1]).unwrap()).weight)
                .sum()
        })
        .collect();
    let max_actions = per_object_actions.iter().copied().max().unwrap_or(0);
    Ok(PlanStats { n_steps, per_object_actions, per_object_cost, max_actions })
}

/// Renders a schedule as text: one tab-separated `object step vertex` line
/// per slice, objects outer, steps inner, both ascending.
pub fn format_plan(g: &ModeGraph, paths: &[Vec<VertexId>]) -> String {
    let mut out = String::new();
    for (i, path) in paths.iter().enumerate() {
        for (t, &v) in path.iter().enumerate() {
            out.push_str(&format!("{i}\t{t}\t{}\n", g.vertex(v).name));
        }
    }
    out
}

/// Parses the `format_plan` text back into per-object paths. The trace must
/// be dense: every object needs the same contiguous slice range from 0.
pub fn parse_plan(g: &ModeGraph, text: &str) -> Result<Vec<Vec<VertexId>>, PlanCheckError> {
    let mut rows: Vec<(usize, usize, VertexId)> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        let parse = |reason: &str| PlanCheckError::Parse {
            line: lineno + 1,
            reason: reason.to_string(),
        };
        let mut parts = line.split('\t');
        let object: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| parse("bad object index"))?;
        let step: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| parse("bad step index"))?;
        let vertex = parts
            .next()
            .and_then(|s| g.vertex_id(s))
            .ok_or_else(|| parse("unknown vertex"))?;
        if parts.next().is_some() {
            return Err(parse("trailing fields"));
        }
        rows.push((object, step, vertex));
    }
    if rows.is_empty() {
        return Err(PlanCheckError::Empty);
    }
    let n_objects = rows.iter().map(|r| r.0).max().unwrap() + 1;
    let slices = rows.iter().map(|r| r.1).max().unwrap() + 1;
    let mut paths = vec![vec![usize::MAX; slices]; n_objects];
    for (object, step, vertex) in rows {
        paths[object][step] = vertex;
    }
    for (i, path) in paths.iter().enumerate() {
        if let Some(t) = path.iter().position(|&v| v == usize::MAX) {
            return Err(PlanCheckError::Parse {
                line: 0,
                reason: format!("object {i} is missing slice {t}"),
            });
        }
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::mode_graph::{build_mode_graph, mode_of, MultiModalState};
    use crate::solver::solve_mapf;

    #[test]
    fn accepts_the_solved_swap_and_reports_totals() {
        let g = build_mode_graph(&fixtures::swap2_workspace()).unwrap();
        let init = mode_of(&g, &["S1", "S2"]).unwrap();
        let goal = mode_of(&g, &["S2", "S1"]).unwrap();
        let plan = solve_mapf(&g, &init, &goal).unwrap().unwrap();
        let stats = check_plan(&g, &init, &goal, &plan.paths).unwrap();
        assert_eq!(stats.n_steps, 6);
        assert_eq!(stats.per_object_actions, vec![3, 3]);
        assert_eq!(stats.max_actions, 3);
        assert_eq!(stats.per_object_cost, vec![3.0, 3.0]);
    }

    #[test]
    fn rejects_a_head_on_pair_clash() {
        let g = build_mode_graph(&fixtures::swap2_workspace()).unwrap();
        let init = mode_of(&g, &["S1", "L"]).unwrap();
        let goal = mode_of(&g, &["L", "S1"]).unwrap();
        let s1 = g.vertex_id("S1").unwrap();
        let l = g.vertex_id("L").unwrap();
        let paths = vec![vec![s1, l], vec![l, s1]];
        let err = check_plan(&g, &init, &goal, &paths).unwrap_err();
        assert!(matches!(err, PlanCheckError::PairClash { step: 0, .. }));
    }

    #[test]
    fn rejects_over_occupancy_and_teleports() {
        let g = build_mode_graph(&fixtures::swap2_workspace()).unwrap();
        let s1 = g.vertex_id("S1").unwrap();
        let s2 = g.vertex_id("S2").unwrap();
        let l = g.vertex_id("L").unwrap();

        // Regions never connect directly: S2 -> S1 is a teleport.
        let init = mode_of(&g, &["S2"]).unwrap();
        let goal = mode_of(&g, &["S1"]).unwrap();
        let err = check_plan(&g, &init, &goal, &[vec![s2, s1]]).unwrap_err();
        assert!(matches!(err, PlanCheckError::NoEdge { object: 0, step: 0, .. }));

        // Three objects converging on a two-slot region. The endpoints are
        // built raw because the arrangement itself is the violation.
        let init = MultiModalState(vec![s1, s1, l]);
        let goal = MultiModalState(vec![s1, s1, s1]);
        let paths = vec![vec![s1, s1], vec![s1, s1], vec![l, s1]];
        let err = check_plan(&g, &init, &goal, &paths).unwrap_err();
        assert!(matches!(
            err,
            PlanCheckError::OverOccupied { t: 1, occupancy: 3, capacity: 2, .. }
        ));
    }

    #[test]
    fn rejects_exceeded_transfer_limits() {
        let g = build_mode_graph(&fixtures::swapbuf_workspace()).unwrap();
        let bf = g.vertex_id("Bf").unwrap();
        let l = g.vertex_id("L").unwrap();
        let r = g.vertex_id("R").unwrap();
        // One object leaves the buffer while another drops onto it:
        // occupancy stays legal at every slice, but two transfers touch a
        // capacity-one vertex in the same step.
        let init = mode_of(&g, &["L", "Bf"]).unwrap();
        let goal = mode_of(&g, &["Bf", "R"]).unwrap();
        let paths = vec![vec![l, bf], vec![bf, r]];
        let err = check_plan(&g, &init, &goal, &paths).unwrap_err();
        assert!(matches!(err, PlanCheckError::OverMoved { step: 0, moves: 2, capacity: 1, .. }));
    }

    #[test]
    fn trace_round_trips_through_text() {
        let g = build_mode_graph(&fixtures::swap2_workspace()).unwrap();
        let init = mode_of(&g, &["S1", "S2"]).unwrap();
        let goal = mode_of(&g, &["S2", "S1"]).unwrap();
        let plan = solve_mapf(&g, &init, &goal).unwrap().unwrap();
        let text = format_plan(&g, &plan.paths);
        assert!(text.starts_with("0\t0\tS1\n"));
        let parsed = parse_plan(&g, &text).unwrap();
        assert_eq!(parsed, plan.paths);
    }

    #[test]
    fn parse_rejects_sparse_and_malformed_traces() {
        let g = build_mode_graph(&fixtures::swap2_workspace()).unwrap();
        let err = parse_plan(&g, "0\t0\tS1\n0\t2\tS2\n").unwrap_err();
        assert!(matches!(err, PlanCheckError::Parse { .. }));
        let err = parse_plan(&g, "0\t0\tNOPE\n").unwrap_err();
        assert!(matches!(err, PlanCheckError::Parse { line: 1, .. }));
        assert_eq!(parse_plan(&g, ""), Err(PlanCheckError::Empty));
    }
}

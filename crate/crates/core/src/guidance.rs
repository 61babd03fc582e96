//! Per-arm step suggestions derived from three strategies of decreasing
//! coordination: a jointly solved schedule, one object scheduled at a time
//! around the rest, and independent per-object shortest paths merged
//! after the fact.
//!
//! Guidance is advisory: it names which arm should pick, place, give or
//! receive which object next, and what each arm's first upcoming duty is.
//! The greedy merge is intentionally capacity-blind, so mutually blocking
//! suggestions (two arms each told to hand their object to the other) are
//! possible and left in place; detecting that they cannot be grounded is
//! the caller's job.

use thiserror::Error;

use crate::mode_graph::{ModeGraph, MultiModalState, VertexId};
use crate::solver::{cheapest_path, solve_mapf, SolveError};
use crate::teg::expand;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Smart,
    Sequential,
    Greedy,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Smart => "smart",
            Strategy::Sequential => "sequential",
            Strategy::Greedy => "greedy",
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "smart" => Ok(Strategy::Smart),
            "sequential" => Ok(Strategy::Sequential),
            "greedy" => Ok(Strategy::Greedy),
            other => Err(format!("unknown strategy {other:?}")),
        }
    }
}

/// What one arm is asked to do within one synchronized step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArmAction {
    Idle,
    Pick { object: usize },
    Place { object: usize, region: VertexId },
    Give { object: usize, to: VertexId },
    Receive { object: usize, from: VertexId },
}

impl ArmAction {
    pub fn is_idle(self) -> bool {
        self == ArmAction::Idle
    }

    pub fn object(self) -> Option<usize> {
        match self {
            ArmAction::Idle => None,
            ArmAction::Pick { object }
            | ArmAction::Place { object, .. }
            | ArmAction::Give { object, .. }
            | ArmAction::Receive { object, .. } => Some(object),
        }
    }
}

impl std::fmt::Display for ArmAction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ArmAction::Idle => write!(f, "idle"),
            ArmAction::Pick { object } => write!(f, "pick o{object}"),
            ArmAction::Place { object, region } => write!(f, "place o{object} at v{region}"),
            ArmAction::Give { object, to } => write!(f, "give o{object} -> v{to}"),
            ArmAction::Receive { object, from } => write!(f, "recv o{object} <- v{from}"),
        }
    }
}

/// One strategy's advice at one state: the immediate per-arm step and each
/// arm's first upcoming involvement, plus the backing schedule's length
/// when a schedule exists.
#[derive(Clone, Debug, PartialEq)]
pub struct Guidance {
    pub now: Vec<ArmAction>,
    pub horizon: Vec<ArmAction>,
    pub remaining_steps: Option<usize>,
}

impl Guidance {
    fn idle(n_arms: usize) -> Self {
        Guidance {
            now: vec![ArmAction::Idle; n_arms],
            horizon: vec![ArmAction::Idle; n_arms],
            remaining_steps: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum GuidanceError {
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// Computes one strategy's advice for moving `q` toward `q_goal`.
pub fn compute(
    g: &ModeGraph,
    strategy: Strategy,
    q: &MultiModalState,
    q_goal: &MultiModalState,
) -> Result<Guidance, GuidanceError> {
    match strategy {
        Strategy::Smart => smart(g, q, q_goal),
        Strategy::Sequential => Ok(sequential(g, q, q_goal)),
        Strategy::Greedy => Ok(greedy(g, q, q_goal)),
    }
}

fn smart(
    g: &ModeGraph,
    q: &MultiModalState,
    q_goal: &MultiModalState,
) -> Result<Guidance, GuidanceError> {
    match solve_mapf(g, q, q_goal)? {
        Some(plan) => Ok(from_paths(g, &plan.paths, plan.n_steps)),
        None => Ok(Guidance::idle(g.n_arms())),
    }
}

/// Schedules the lowest-indexed displaced object alone, treating every other
/// object as a fixed obstacle that permanently consumes its vertex capacity.
/// Falls through to later objects when the first cannot move at all.
fn sequential(g: &ModeGraph, q: &MultiModalState, q_goal: &MultiModalState) -> Guidance {
    let nv = g.n_vertices();
    for (i, (&at, &to)) in q.0.iter().zip(&q_goal.0).enumerate() {
        if at == to {
            continue;
        }
        let mut static_occ = vec![0usize; nv];
        for (j, &v) in q.0.iter().enumerate() {
            if j != i {
                static_occ[v] += 1;
            }
        }
        let blocked: Vec<VertexId> =
            (0..nv).filter(|&v| static_occ[v] + 1 > g.capacity(v)).collect();
        let base = g.n_arms().max(1);
        for horizon in [base, 2 * base, 4 * base] {
            let teg = expand(g, horizon).expect("horizon is positive");
            if let Some((path, _)) = cheapest_path(&teg, at, to, &blocked) {
                let last_move =
                    (0..horizon).rev().find(|&t| path[t] != path[t + 1]).map_or(0, |t| t + 1);
                let mut paths: Vec<Vec<VertexId>> =
                    q.0.iter().map(|&v| vec![v; last_move + 1]).collect();
                paths[i] = path[..=last_move].to_vec();
                return from_paths(g, &paths, last_move);
            }
        }
    }
    Guidance::idle(g.n_arms())
}

/// Routes every object along its own cheapest mode-graph path as if it were
/// alone, then merges first moves arm by arm: lower-indexed objects claim
/// the acting arm (the giver, for handoffs) first, and handoff receive
/// sides are filled afterwards only where an arm is still free.
fn greedy(g: &ModeGraph, q: &MultiModalState, q_goal: &MultiModalState) -> Guidance {
    let n_arms = g.n_arms();
    let mut now = vec![ArmAction::Idle; n_arms];
    let mut horizon = vec![ArmAction::Idle; n_arms];

    let paths: Vec<Option<Vec<VertexId>>> =
        q.0.iter()
            .zip(&q_goal.0)
            .map(|(&at, &to)| if at == to { None } else { shortest_route(g, at, to) })
            .collect();

    let mut receives: Vec<(VertexId, ArmAction)> = Vec::new();
    for (i, path) in paths.iter().enumerate() {
        let Some(path) = path else { continue };
        let (u, w) = (path[0], path[1]);
        let (arm, action, receive) = match (g.is_arm(u), g.is_arm(w)) {
            (false, true) => (w, ArmAction::Pick { object: i }, None),
            (true, false) => (u, ArmAction::Place { object: i, region: w }, None),
            (true, true) => (
                u,
                ArmAction::Give { object: i, to: w },
                Some((w, ArmAction::Receive { object: i, from: u })),
            ),
            (false, false) => continue,
        };
        if now[arm].is_idle() {
            now[arm] = action;
            if let Some(r) = receive {
                receives.push(r);
            }
        }
    }
    for (arm, action) in receives {
        if now[arm].is_idle() {
            now[arm] = action;
        }
    }

    // First upcoming involvement per arm across the independent routes,
    // earlier steps first, lower objects breaking ties.
    let max_len = paths.iter().flatten().map(Vec::len).max().unwrap_or(0);
    for t in 0..max_len.saturating_sub(1) {
        for (i, path) in paths.iter().enumerate() {
            let Some(path) = path else { continue };
            if t + 1 >= path.len() {
                continue;
            }
            let (u, w) = (path[t], path[t + 1]);
            match (g.is_arm(u), g.is_arm(w)) {
                (false, true) => fill(&mut horizon, w, ArmAction::Pick { object: i }),
                (true, false) => {
                    fill(&mut horizon, u, ArmAction::Place { object: i, region: w })
                }
                (true, true) => {
                    fill(&mut horizon, u, ArmAction::Give { object: i, to: w });
                    fill(&mut horizon, w, ArmAction::Receive { object: i, from: u });
                }
                (false, false) => {}
            }
        }
    }

    Guidance { now, horizon, remaining_steps: None }
}

fn fill(slots: &mut [ArmAction], arm: VertexId, action: ArmAction) {
    if slots[arm].is_idle() {
        slots[arm] = action;
    }
}

/// Plain-weight lexicographically smallest shortest route, ignoring all
/// capacities and other objects.
fn shortest_route(g: &ModeGraph, from: VertexId, to: VertexId) -> Option<Vec<VertexId>> {
    let nv = g.n_vertices();
    let mut dist = vec![f64::INFINITY; nv];
    dist[to] = 0.0;
    // Edges come in symmetric pairs, so distances-to-goal relax over the
    // forward adjacency. Graphs are tiny; simple sweeps are plenty.
    for _ in 0..nv {
        let mut changed = false;
        for v in 0..nv {
            for &e in g.out_edges(v) {
                let edge = g.edge(e);
                let c = edge.weight + dist[edge.to];
                if c < dist[v] - 1e-12 {
                    dist[v] = c;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    if !dist[from].is_finite() {
        return None;
    }
    let mut path = vec![from];
    let mut v = from;
    while v != to {
        if path.len() > nv {
            return None;
        }
        let next = g
            .out_edges(v)
            .iter()
            .map(|&e| g.edge(e))
            .filter(|edge| (edge.weight + dist[edge.to] - dist[v]).abs() <= 1e-9)
            .map(|edge| edge.to)
            .min()?;
        path.push(next);
        v = next;
    }
    Some(path)
}

/// Reads per-arm actions off a joint slice-by-slice schedule: `now` from
/// step 0, `horizon` from each arm's first involvement at any step.
fn from_paths(g: &ModeGraph, paths: &[Vec<VertexId>], n_steps: usize) -> Guidance {
    let n_arms = g.n_arms();
    let mut now = vec![ArmAction::Idle; n_arms];
    let mut horizon = vec![ArmAction::Idle; n_arms];
    for t in 0..n_steps {
        for (i, path) in paths.iter().enumerate() {
            let (u, w) = (path[t], path[t + 1]);
            if u == w {
                continue;
            }
            let mut set = |arm: VertexId, action: ArmAction| {
                if t == 0 {
                    now[arm] = action;
                }
                fill(&mut horizon, arm, action);
            };
            match (g.is_arm(u), g.is_arm(w)) {
                (false, true) => set(w, ArmAction::Pick { object: i }),
                (true, false) => set(u, ArmAction::Place { object: i, region: w }),
                (true, true) => {
                    set(u, ArmAction::Give { object: i, to: w });
                    set(w, ArmAction::Receive { object: i, from: u });
                }
                (false, false) => {}
            }
        }
    }
    Guidance { now, horizon, remaining_steps: Some(n_steps) }
}

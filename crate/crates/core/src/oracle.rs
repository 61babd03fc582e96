//! Exhaustive breadth-first search over joint multi-modal states.
//!
//! This is the reference answer for small instances: it enumerates every
//! synchronized step a scene allows (each object stays put or crosses one
//! mode edge, subject to capacity, per-vertex throughput, and one crossing
//! per vertex pair per step) and reports step-optimal and action-optimal
//! values by brute force. The scheduling layer is checked against it but
//! shares none of its code.

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use crate::mode_graph::{validate_state, ModeGraph, MultiModalState, VertexId};

pub const DEFAULT_STATE_LIMIT: usize = 1_000_000;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("explored {explored} states, limit is {limit}")]
    StateLimit { explored: usize, limit: usize },
    #[error("start and goal must place the same objects")]
    LengthMismatch,
    #[error("{0} state violates vertex capacities")]
    InvalidState(&'static str),
}

pub struct Oracle<'g> {
    g: &'g ModeGraph,
    state_limit: usize,
}

impl<'g> Oracle<'g> {
    pub fn new(g: &'g ModeGraph) -> Self {
        Oracle { g, state_limit: DEFAULT_STATE_LIMIT }
    }

    pub fn with_state_limit(g: &'g ModeGraph, state_limit: usize) -> Self {
        Oracle { g, state_limit }
    }

    /// Fewest synchronized steps that turn `init` into `goal`, or `None` if
    /// no schedule of at most `step_cap` steps exists.
    pub fn min_steps(
        &self,
        init: &MultiModalState,
        goal: &MultiModalState,
        step_cap: usize,
    ) -> Result<Option<usize>, OracleError> {
        self.check_endpoints(init, goal)?;
        if init == goal {
            return Ok(Some(0));
        }
        let dist = self.goal_distances(goal);
        if lower_bound(&dist, &init.0) > step_cap {
            return Ok(None);
        }

        let mut seen: HashMap<Box<[u8]>, ()> = HashMap::new();
        let mut queue: VecDeque<(Vec<VertexId>, usize)> = VecDeque::new();
        seen.insert(encode(&init.0), ());
        queue.push_back((init.0.clone(), 0));

        while let Some((state, depth)) = queue.pop_front() {
            if depth == step_cap {
                continue;
            }
            let mut found = None;
            self.for_each_successor(&state, |next, _moved| {
                if next == goal.0.as_slice() {
                    found = Some(depth + 1);
                    return;
                }
                if depth + 1 + lower_bound(&dist, next) > step_cap {
                    return;
                }
                let key = encode(next);
                if !seen.contains_key(&key) {
                    seen.insert(key, ());
                    queue.push_back((next.to_vec(), depth + 1));
                }
            });
            if let Some(steps) = found {
                return Ok(Some(steps));
            }
            if seen.len() > self.state_limit {
                return Err(OracleError::StateLimit {
                    explored: seen.len(),
                    limit: self.state_limit,
                });
            }
        }
        Ok(None)
    }

    /// Minimum over all schedules of at most `step_cap` steps of the largest
    /// per-object action count, or `None` if no such schedule exists.
    pub fn min_max_actions(
        &self,
        init: &MultiModalState,
        goal: &MultiModalState,
        step_cap: usize,
    ) -> Result<Option<usize>, OracleError> {
        self.check_endpoints(init, goal)?;
        if init == goal {
            return Ok(Some(0));
        }
        let dist = self.goal_distances(goal);
        if lower_bound(&dist, &init.0) > step_cap {
            return Ok(None);
        }
        for budget in 1..=step_cap {
            if self.feasible_with_budget(init, goal, step_cap, budget, &dist)? {
                return Ok(Some(budget));
            }
        }
        Ok(None)
    }

    fn check_endpoints(
        &self,
        init: &MultiModalState,
        goal: &MultiModalState,
    ) -> Result<(), OracleError> {
        if init.len() != goal.len() {
            return Err(OracleError::LengthMismatch);
        }
        if validate_state(self.g, init).is_err() {
            return Err(OracleError::InvalidState("start"));
        }
        if validate_state(self.g, goal).is_err() {
            return Err(OracleError::InvalidState("goal"));
        }
        Ok(())
    }

    /// Breadth-first over (modes, per-object actions used) with every object
    /// held to at most `budget` actions.
    fn feasible_with_budget(
        &self,
        init: &MultiModalState,
        goal: &MultiModalState,
        step_cap: usize,
        budget: usize,
        dist: &[Vec<usize>],
    ) -> Result<bool, OracleError> {
        let k = init.len();
        let mut seen: HashMap<Box<[u8]>, ()> = HashMap::new();
        let mut queue: VecDeque<(Vec<VertexId>, Vec<u8>, usize)> = VecDeque::new();
        seen.insert(encode2(&init.0, &vec![0u8; k]), ());
        queue.push_back((init.0.clone(), vec![0u8; k], 0));

        while let Some((state, used, depth)) = queue.pop_front() {
            if depth == step_cap {
                continue;
            }
            let mut found = false;
            self.for_each_successor(&state, |next, moved| {
                if found {
                    return;
                }
                let mut next_used = used.clone();
                for (i, &m) in moved.iter().enumerate() {
                    if m {
                        next_used[i] += 1;
                    }
                    // Every remaining action needs budget, every remaining
                    // step needs horizon; both bounds ignore interactions.
                    let remaining = dist[i][next[i]];
                    if next_used[i] as usize + remaining > budget
                        || depth + 1 + remaining > step_cap
                    {
                        return;
                    }
                }
                if next == goal.0.as_slice() {
                    found = true;
                    return;
                }
                let key = encode2(next, &next_used);
                if !seen.contains_key(&key) {
                    seen.insert(key, ());
                    queue.push_back((next.to_vec(), next_used, depth + 1));
                }
            });
            if found {
                return Ok(true);
            }
            if seen.len() > self.state_limit {
                return Err(OracleError::StateLimit {
                    explored: seen.len(),
                    limit: self.state_limit,
                });
            }
        }
        Ok(false)
    }

    /// Unweighted single-object distances to each object's goal vertex,
    /// ignoring all other objects. Admissible for both steps and actions.
    fn goal_distances(&self, goal: &MultiModalState) -> Vec<Vec<usize>> {
        goal.0
            .iter()
            .map(|&target| {
                let mut d = vec![usize::MAX; self.g.n_vertices()];
                let mut queue = VecDeque::new();
                d[target] = 0;
                queue.push_back(target);
                while let Some(v) = queue.pop_front() {
                    // Mode edges come in bidirectional pairs, so forward
                    // search over out-edges doubles as reverse search.
                    for &e in self.g.out_edges(v) {
                        let w = self.g.edge(e).to;
                        if d[w] == usize::MAX {
                            d[w] = d[v] + 1;
                            queue.push_back(w);
                        }
                    }
                }
                d
            })
            .collect()
    }

    /// Calls `f` for every legal synchronized step out of `state`, with a
    /// per-object moved mask. Objects are decided in index order; throughput
    /// and pair usage are pruned as they grow, occupancy is checked once the
    /// whole step is assembled (an over-full vertex may still be vacated by
    /// a later object in the same step).
    fn for_each_successor(&self, state: &[VertexId], mut f: impl FnMut(&[VertexId], &[bool])) {
        let n = self.g.n_vertices();
        let mut occupancy = vec![0usize; n];
        for &v in state {
            occupancy[v] += 1;
        }
        let mut throughput = vec![0usize; n];
        let mut pair_used = vec![false; self.g.pairs().len()];
        let mut next: Vec<VertexId> = state.to_vec();
        let mut moved = vec![false; state.len()];
        let mut any_moved = false;

        self.recurse(
            state,
            0,
            &mut occupancy,
            &mut throughput,
            &mut pair_used,
            &mut next,
            &mut moved,
            &mut any_moved,
            &mut f,
        );
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse(
        &self,
        state: &[VertexId],
        i: usize,
        occupancy: &mut Vec<usize>,
        throughput: &mut Vec<usize>,
        pair_used: &mut Vec<bool>,
        next: &mut Vec<VertexId>,
        moved: &mut Vec<bool>,
        any_moved: &mut bool,
        f: &mut impl FnMut(&[VertexId], &[bool]),
    ) {
        if i == state.len() {
            if *any_moved && occupancy.iter().enumerate().all(|(v, &o)| o <= self.g.capacity(v)) {
                f(next, moved);
            }
            return;
        }

        // Stay.
        self.recurse(state, i + 1, occupancy, throughput, pair_used, next, moved, any_moved, f);

        let from = state[i];
        for &e in self.g.out_edges(from) {
            let edge = self.g.edge(e);
            let (to, pair) = (edge.to, edge.pair);
            if pair_used[pair] {
                continue;
            }
            if throughput[from] + 1 > self.g.capacity(from)
                || throughput[to] + 1 > self.g.capacity(to)
            {
                continue;
            }

            pair_used[pair] = true;
            throughput[from] += 1;
            throughput[to] += 1;
            occupancy[from] -= 1;
            occupancy[to] += 1;
            next[i] = to;
            moved[i] = true;
            let prev_any = *any_moved;
            *any_moved = true;

            self.recurse(state, i + 1, occupancy, throughput, pair_used, next, moved, any_moved, f);

            *any_moved = prev_any;
            moved[i] = false;
            next[i] = from;
            occupancy[to] -= 1;
            occupancy[from] += 1;
            throughput[to] -= 1;
            throughput[from] -= 1;
            pair_used[pair] = false;
        }
    }
}

fn lower_bound(dist: &[Vec<usize>], state: &[VertexId]) -> usize {
    state
        .iter()
        .enumerate()
        .map(|(i, &v)| dist[i][v])
        .max()
        .unwrap_or(0)
}

fn encode(state: &[VertexId]) -> Box<[u8]> {
    state.iter().map(|&v| v as u8).collect()
}

fn encode2(state: &[VertexId], used: &[u8]) -> Box<[u8]> {
    state
        .iter()
        .map(|&v| v as u8)
        .chain(used.iter().copied())
        .collect()
}

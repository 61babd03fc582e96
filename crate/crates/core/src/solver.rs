//! Exact solver for the scheduling model, plus the horizon-escalating
//! front end that turns solved models into concrete plans.
//!
//! The search runs A* over joint slice states: a state is one vertex per
//! object at one time slice, successors apply every rule-respecting
//! combination of per-object stays and moves, and the heuristic is each
//! object's individually cheapest timed completion (a small dynamic program
//! over the time-expanded slices), combined with the min-max objective.
//! States are deduplicated by (slice, positions) with Pareto dominance over
//! the per-object accumulated cost vectors, which keeps symmetric instances
//! from re-deriving interleavings of the same schedule. The first goal state
//! popped is a proven optimum. A refinement pass then canonicalizes the
//! answer: fewest steps first, then the lexicographically smallest
//! per-object vertex sequences that still attain the optimum, so equal-cost
//! instances always produce the same schedule. Produced assignments are
//! re-checked against the model rows literally.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use thiserror::Error;

use crate::ilp::{build_model, IlpModel, ModelError};
use crate::mode_graph::{ModeGraph, MultiModalState, PairId, VertexId};
use crate::teg::{expand, ArcKind, TimeExpandedGraph};

const EXPAND_LIMIT: usize = 2_000_000;
const REFINE_STEP_LIMIT: usize = 2_000_000;
const COST_EPS: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("search exceeded {0} nodes")]
    SearchLimit(usize),
}

#[derive(Clone, Debug)]
pub enum SolveOutcome {
    Optimal(Solved),
    Infeasible,
}

/// An optimal solution of one model: slice-by-slice vertex per object, the
/// full 0/1 assignment it induces, and the min-max objective value.
#[derive(Clone, Debug)]
pub struct Solved {
    pub paths: Vec<Vec<VertexId>>,
    pub assignment: Vec<bool>,
    pub objective: f64,
}

/// A schedule with the idle tail removed.
#[derive(Clone, Debug)]
pub struct MapfPlan {
    /// Horizon of the expansion that produced the plan.
    pub horizon: usize,
    /// Steps remaining after pruning the suffix where everything rests.
    pub n_steps: usize,
    /// Per object, the occupied vertex at slices 0..=n_steps.
    pub paths: Vec<Vec<VertexId>>,
    /// Per object, the summed weight of traversed edges.
    pub per_object_cost: Vec<f64>,
    /// Per object, the number of non-stay traversals.
    pub per_object_actions: Vec<usize>,
    /// Min-max time-scaled objective value at the solved horizon.
    pub objective: f64,
}

impl MapfPlan {
    pub fn n_objects(&self) -> usize {
        self.paths.len()
    }

    /// The multi-modal state after `t` steps of the plan.
    pub fn state_at(&self, t: usize) -> MultiModalState {
        MultiModalState(self.paths.iter().map(|p| p[t.min(self.n_steps)]).collect())
    }
}

struct OpenEntry {
    f: f64,
    seq: usize,
    node: usize,
}

impl PartialEq for OpenEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for OpenEntry {}
impl PartialOrd for OpenEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for OpenEntry {
    // Inverted so the max-heap pops the smallest (f, seq) first.
    fn cmp(&self, other: &Self) -> Ordering {
        other.f.total_cmp(&self.f).then_with(|| other.seq.cmp(&self.seq))
    }
}

struct JointState {
    t: usize,
    positions: Vec<VertexId>,
    /// Accumulated timed cost per object.
    acc: Vec<f64>,
    parent: usize,
}

/// One per-object choice within a step: destination, timed cost, and the
/// crossed pair for moves.
type StepOption = (VertexId, f64, Option<PairId>);

struct Search<'a> {
    g: &'a ModeGraph,
    ctg: &'a [Vec<f64>],
    nv: usize,
    nodes: Vec<JointState>,
    retired: Vec<bool>,
    heap: BinaryHeap<OpenEntry>,
    /// Pareto front of accumulated cost vectors per (slice, positions).
    seen: HashMap<(usize, Vec<VertexId>), Vec<(Vec<f64>, usize)>>,
    seq: usize,
    /// Shared-rule tallies for the combination currently being built.
    arrivals: Vec<usize>,
    transfers: Vec<usize>,
    pair_used: Vec<usize>,
}

impl Search<'_> {
    /// Registers one per-object choice against the step's shared rules,
    /// returning false (and changing nothing) when a rule would break.
    fn apply(&mut self, from: VertexId, option: StepOption) -> bool {
        let (to, _, pair) = option;
        if self.arrivals[to] + 1 > self.g.capacity(to) {
            return false;
        }
        if let Some(p) = pair {
            if self.pair_used[p] + 1 > 1
                || self.transfers[from] + 1 > self.g.capacity(from)
                || self.transfers[to] + 1 > self.g.capacity(to)
            {
                return false;
            }
            self.pair_used[p] += 1;
            self.transfers[from] += 1;
            self.transfers[to] += 1;
        }
        self.arrivals[to] += 1;
        true
    }

    fn unapply(&mut self, from: VertexId, option: StepOption) {
        let (to, _, pair) = option;
        self.arrivals[to] -= 1;
        if let Some(p) = pair {
            self.pair_used[p] -= 1;
            self.transfers[from] -= 1;
            self.transfers[to] -= 1;
        }
    }

    /// Object-major recursion over every rule-respecting joint combination.
    fn combine(
        &mut self,
        parent: usize,
        t: usize,
        positions: &[VertexId],
        acc: &[f64],
        options: &[Vec<StepOption>],
        choice: &mut Vec<usize>,
        object: usize,
    ) {
        if object == positions.len() {
            self.push_child(parent, t, positions, acc, options, choice);
            return;
        }
        for c in 0..options[object].len() {
            let option = options[object][c];
            if self.apply(positions[object], option) {
                choice.push(c);
                self.combine(parent, t, positions, acc, options, choice, object + 1);
                choice.pop();
                self.unapply(positions[object], option);
            }
        }
    }

    fn push_child(
        &mut self,
        parent: usize,
        t: usize,
        positions: &[VertexId],
        acc: &[f64],
        options: &[Vec<StepOption>],
        choice: &[usize],
    ) {
        let k = positions.len();
        let child_pos: Vec<VertexId> = (0..k).map(|i| options[i][choice[i]].0).collect();
        let child_acc: Vec<f64> = (0..k).map(|i| acc[i] + options[i][choice[i]].1).collect();
        let f = (0..k)
            .map(|i| child_acc[i] + self.ctg[i][(t + 1) * self.nv + child_pos[i]])
            .fold(0.0, f64::max);
        if !f.is_finite() {
            return;
        }

        let node = self.nodes.len();
        let slot = self.seen.entry((t + 1, child_pos.clone())).or_default();
        if slot.iter().any(|(held, _)| dominates(held, &child_acc)) {
            return;
        }
        slot.retain(|(held, id)| {
            if dominates(&child_acc, held) {
                self.retired[*id] = true;
                false
            } else {
                true
            }
        });
        slot.push((child_acc.clone(), node));
        self.nodes.push(JointState { t: t + 1, positions: child_pos, acc: child_acc, parent });
        self.retired.push(false);
        self.seq += 1;
        self.heap.push(OpenEntry { f, seq: self.seq, node });
    }
}

/// True when `a` is at least as cheap for every object.
fn dominates(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

/// Exactly solves `model`, returning either a proven optimum or
/// infeasibility. Deterministic: ties are broken by canonical refinement.
pub fn solve(model: &IlpModel) -> Result<SolveOutcome, SolveError> {
    let teg = model.teg();
    let g = teg.graph();
    let k = model.n_objects();
    if k == 0 {
        let solved = Solved { paths: Vec::new(), assignment: Vec::new(), objective: 0.0 };
        return Ok(SolveOutcome::Optimal(solved));
    }
    let nv = g.n_vertices();
    let horizon = teg.horizon();
    let starts = model.starts();
    let goals = model.goals();

    // Admissible and consistent per object: its cheapest timed completion
    // if it had the graph to itself.
    let ctg: Vec<Vec<f64>> =
        goals.iter().map(|&goal| cost_to_go(g, horizon, goal, horizon)).collect();
    if (0..k).any(|i| !ctg[i][starts[i]].is_finite()) {
        return Ok(SolveOutcome::Infeasible);
    }

    let mut search = Search {
        g,
        ctg: &ctg,
        nv,
        nodes: Vec::new(),
        retired: Vec::new(),
        heap: BinaryHeap::new(),
        seen: HashMap::new(),
        seq: 0,
        arrivals: vec![0; nv],
        transfers: vec![0; nv],
        pair_used: vec![0; g.pairs().len()],
    };
    let root_f = (0..k).map(|i| ctg[i][starts[i]]).fold(0.0, f64::max);
    search.nodes.push(JointState {
        t: 0,
        positions: starts.to_vec(),
        acc: vec![0.0; k],
        parent: 0,
    });
    search.retired.push(false);
    search.seen.insert((0, starts.to_vec()), vec![(vec![0.0; k], 0)]);
    search.heap.push(OpenEntry { f: root_f, seq: 0, node: 0 });

    let mut expansions = 0usize;
    while let Some(entry) = search.heap.pop() {
        let node = entry.node;
        if search.retired[node] {
            continue;
        }
        if search.nodes[node].positions == goals {
            return Ok(SolveOutcome::Optimal(finish(model, &search.nodes, node, entry.f)));
        }
        let t = search.nodes[node].t;
        if t == horizon {
            continue;
        }
        expansions += 1;
        if expansions > EXPAND_LIMIT {
            return Err(SolveError::SearchLimit(EXPAND_LIMIT));
        }

        // Per-object options this step: stay first, then each mode edge.
        let positions = search.nodes[node].positions.clone();
        let acc = search.nodes[node].acc.clone();
        let options: Vec<Vec<StepOption>> = positions
            .iter()
            .map(|&v| {
                let mut opts: Vec<StepOption> = vec![(v, 0.0, None)];
                for &e in g.out_edges(v) {
                    let edge = g.edge(e);
                    opts.push((edge.to, (t + 1) as f64 * edge.weight, Some(edge.pair)));
                }
                opts
            })
            .collect();
        let mut choice = Vec::with_capacity(k);
        search.combine(node, t, &positions, &acc, &options, &mut choice, 0);
    }
    Ok(SolveOutcome::Infeasible)
}

/// Canonicalizes and packages a proven-optimal goal state.
fn finish(model: &IlpModel, nodes: &[JointState], node: usize, objective: f64) -> Solved {
    let teg = model.teg();
    let horizon = teg.horizon();
    let k = model.n_objects();
    // Canonical tie-break: the fewest steps any optimal assignment needs,
    // then lexicographically smallest sequences.
    let mut canonical = None;
    for t_cap in 0..=horizon {
        match refine(teg, model.starts(), model.goals(), objective, t_cap) {
            Refined::Done(paths) => {
                canonical = Some(paths);
                break;
            }
            Refined::Infeasible => continue,
            Refined::Aborted => break,
        }
    }
    let paths = canonical.unwrap_or_else(|| {
        // Fall back to the schedule the search itself found, resting at the
        // goal through any remaining slices.
        let mut chain = vec![node];
        while nodes[*chain.last().unwrap()].t > 0 {
            chain.push(nodes[*chain.last().unwrap()].parent);
        }
        chain.reverse();
        let mut paths = vec![Vec::with_capacity(horizon + 1); k];
        for &id in &chain {
            for (i, path) in paths.iter_mut().enumerate() {
                path.push(nodes[id].positions[i]);
            }
        }
        for path in &mut paths {
            while path.len() < horizon + 1 {
                path.push(*path.last().unwrap());
            }
        }
        paths
    });
    let assignment = assignment_for(model, &paths);
    model
        .check_assignment(&assignment)
        .expect("optimal schedule must satisfy every model row");
    debug_assert!((model.objective(&assignment) - objective).abs() <= COST_EPS);
    Solved { paths, assignment, objective }
}

/// Cheapest timed completion per (slice, vertex) for one object with the
/// graph to itself; moves are only allowed before step `t_cap`.
fn cost_to_go(g: &ModeGraph, horizon: usize, goal: VertexId, t_cap: usize) -> Vec<f64> {
    let nv = g.n_vertices();
    let mut ctg = vec![f64::INFINITY; (horizon + 1) * nv];
    ctg[horizon * nv + goal] = 0.0;
    for t in (0..horizon).rev() {
        for v in 0..nv {
            let mut best = ctg[(t + 1) * nv + v];
            if t < t_cap {
                for &e in g.out_edges(v) {
                    let edge = g.edge(e);
                    let c = (t + 1) as f64 * edge.weight + ctg[(t + 1) * nv + edge.to];
                    if c < best {
                        best = c;
                    }
                }
            }
            ctg[t * nv + v] = best;
        }
    }
    ctg
}

/// Cheapest timed path for one object that never touches a blocked vertex:
/// backward dynamic program over slices, then forward extraction preferring
/// the smallest next vertex, which makes the per-object answer canonical.
pub(crate) fn cheapest_path(
    teg: &TimeExpandedGraph,
    start: VertexId,
    goal: VertexId,
    blocked: &[VertexId],
) -> Option<(Vec<VertexId>, f64)> {
    let g = teg.graph();
    let nv = g.n_vertices();
    let horizon = teg.horizon();

    let mut banned = vec![false; nv];
    for &v in blocked {
        banned[v] = true;
    }

    let inf = f64::INFINITY;
    let mut ctg = vec![inf; (horizon + 1) * nv];
    if !banned[goal] {
        ctg[horizon * nv + goal] = 0.0;
    }
    for t in (0..horizon).rev() {
        for v in 0..nv {
            if banned[v] {
                continue;
            }
            let mut best = ctg[(t + 1) * nv + v];
            for &e in g.out_edges(v) {
                let edge = g.edge(e);
                let c = (t + 1) as f64 * edge.weight + ctg[(t + 1) * nv + edge.to];
                if c < best {
                    best = c;
                }
            }
            ctg[t * nv + v] = best;
        }
    }

    let total = ctg[start];
    if !total.is_finite() {
        return None;
    }

    let mut path = Vec::with_capacity(horizon + 1);
    let mut v = start;
    path.push(v);
    for t in 0..horizon {
        let here = ctg[t * nv + v];
        let mut candidates: Vec<VertexId> = Vec::new();
        if ctg[(t + 1) * nv + v] == here {
            candidates.push(v);
        }
        for &e in g.out_edges(v) {
            let edge = g.edge(e);
            let c = (t + 1) as f64 * edge.weight + ctg[(t + 1) * nv + edge.to];
            if c == here {
                candidates.push(edge.to);
            }
        }
        v = candidates
            .into_iter()
            .min()
            .expect("finite cost-to-go must have a witness");
        path.push(v);
    }
    debug_assert_eq!(v, goal);
    Some((path, total))
}

enum Refined {
    Done(Vec<Vec<VertexId>>),
    Infeasible,
    Aborted,
}

/// Canonical tie-break among optimal assignments: every move must happen
/// before step `t_cap`, and within that the per-object vertex sequences are
/// the lexicographically smallest (object-major). Depth-first over objects
/// in index order with exact per-object probes; aborts (deterministically)
/// only past a large step budget.
fn refine(
    teg: &TimeExpandedGraph,
    starts: &[VertexId],
    goals: &[VertexId],
    objective: f64,
    t_cap: usize,
) -> Refined {
    let g = teg.graph();
    let nv = g.n_vertices();
    let np = g.pairs().len();
    let horizon = teg.horizon();
    let k = starts.len();
    let budget = objective + COST_EPS + objective.abs() * 1e-12;

    // Unrestricted cost-to-go per object, an admissible enumeration bound.
    // Slices at and past the cap only connect by staying put.
    let free: Vec<Vec<f64>> =
        (0..k).map(|i| cost_to_go(g, horizon, goals[i], t_cap)).collect();

    let mut occ_left: Vec<i32> = (0..=horizon)
        .flat_map(|_| (0..nv).map(|v| g.capacity(v) as i32))
        .collect();
    let mut thr_left: Vec<i32> =
        (0..horizon).flat_map(|_| (0..nv).map(|v| g.capacity(v) as i32)).collect();
    let mut pair_left: Vec<i32> = vec![1; horizon * np];

    struct Ctx<'a> {
        g: &'a ModeGraph,
        nv: usize,
        np: usize,
        horizon: usize,
        t_cap: usize,
        starts: &'a [VertexId],
        goals: &'a [VertexId],
        free: &'a [Vec<f64>],
        budget: f64,
        steps: usize,
    }

    /// Cheapest cost for `object` through the remaining capacities alone.
    fn probe(
        ctx: &Ctx,
        occ_left: &[i32],
        thr_left: &[i32],
        pair_left: &[i32],
        object: usize,
    ) -> f64 {
        let (nv, horizon) = (ctx.nv, ctx.horizon);
        let mut dp = vec![f64::INFINITY; (horizon + 1) * nv];
        let goal = ctx.goals[object];
        if occ_left[horizon * nv + goal] >= 1 {
            dp[horizon * nv + goal] = 0.0;
        }
        for t in (0..horizon).rev() {
            for v in 0..nv {
                if occ_left[t * nv + v] < 1 {
                    continue;
                }
                let mut best = dp[(t + 1) * nv + v];
                if t < ctx.t_cap && thr_left[t * nv + v] >= 1 {
                    for &e in ctx.g.out_edges(v) {
                        let edge = ctx.g.edge(e);
                        if pair_left[t * ctx.np + edge.pair] < 1
                            || thr_left[t * nv + edge.to] < 1
                        {
                            continue;
                        }
                        let c = (t + 1) as f64 * edge.weight + dp[(t + 1) * nv + edge.to];
                        if c < best {
                            best = c;
                        }
                    }
                }
                dp[t * nv + v] = best;
            }
        }
        dp[ctx.starts[object]]
    }

    #[allow(clippy::too_many_arguments)]
    fn walk(
        ctx: &mut Ctx,
        occ_left: &mut Vec<i32>,
        thr_left: &mut Vec<i32>,
        pair_left: &mut Vec<i32>,
        object: usize,
        t: usize,
        v: VertexId,
        cost: f64,
        prefix: &mut Vec<VertexId>,
        fixed: &mut Vec<Vec<VertexId>>,
    ) -> Option<bool> {
        ctx.steps += 1;
        if ctx.steps > REFINE_STEP_LIMIT {
            return None;
        }
        let (nv, horizon) = (ctx.nv, ctx.horizon);
        if t == horizon {
            if v != ctx.goals[object] {
                return Some(false);
            }
            fixed.push(prefix.clone());
            for j in (object + 1)..ctx.starts.len() {
                if probe(ctx, occ_left, thr_left, pair_left, j) > ctx.budget {
                    fixed.pop();
                    return Some(false);
                }
            }
            if object + 1 == ctx.starts.len() {
                return Some(true);
            }
            let done = place(ctx, occ_left, thr_left, pair_left, object + 1, fixed)?;
            if !done {
                fixed.pop();
            }
            return Some(done);
        }

        let mut candidates: Vec<(VertexId, f64, Option<PairId>)> = vec![(v, 0.0, None)];
        if t < ctx.t_cap {
            for &e in ctx.g.out_edges(v) {
                let edge = ctx.g.edge(e);
                candidates.push((edge.to, (t + 1) as f64 * edge.weight, Some(edge.pair)));
            }
            candidates.sort_by_key(|&(w, _, _)| w);
        }

        for (w, move_cost, pair) in candidates {
            let next_cost = cost + move_cost;
            if next_cost + ctx.free[object][(t + 1) * nv + w] > ctx.budget {
                continue;
            }
            if occ_left[(t + 1) * nv + w] < 1 {
                continue;
            }
            if let Some(p) = pair {
                if pair_left[t * ctx.np + p] < 1
                    || thr_left[t * nv + v] < 1
                    || thr_left[t * nv + w] < 1
                {
                    continue;
                }
                pair_left[t * ctx.np + p] -= 1;
                thr_left[t * nv + v] -= 1;
                thr_left[t * nv + w] -= 1;
            }
            occ_left[(t + 1) * nv + w] -= 1;
            prefix.push(w);

            let done =
                walk(ctx, occ_left, thr_left, pair_left, object, t + 1, w, next_cost, prefix, fixed)?;

            if done {
                return Some(true);
            }
            prefix.pop();
            occ_left[(t + 1) * nv + w] += 1;
            if let Some(p) = pair {
                pair_left[t * ctx.np + p] += 1;
                thr_left[t * nv + v] += 1;
                thr_left[t * nv + w] += 1;
            }
        }
        Some(false)
    }

    fn place(
        ctx: &mut Ctx,
        occ_left: &mut Vec<i32>,
        thr_left: &mut Vec<i32>,
        pair_left: &mut Vec<i32>,
        object: usize,
        fixed: &mut Vec<Vec<VertexId>>,
    ) -> Option<bool> {
        let start = ctx.starts[object];
        if occ_left[start] < 1 || ctx.free[object][start] > ctx.budget {
            return Some(false);
        }
        occ_left[start] -= 1;
        let mut prefix = vec![start];
        let done = walk(ctx, occ_left, thr_left, pair_left, object, 0, start, 0.0, &mut prefix, fixed)?;
        if !done {
            occ_left[start] += 1;
        }
        Some(done)
    }

    let mut ctx =
        Ctx { g, nv, np, horizon, t_cap, starts, goals, free: &free, budget, steps: 0 };
    let mut fixed: Vec<Vec<VertexId>> = Vec::new();
    match place(&mut ctx, &mut occ_left, &mut thr_left, &mut pair_left, 0, &mut fixed) {
        Some(true) => Refined::Done(fixed),
        Some(false) => Refined::Infeasible,
        None => Refined::Aborted,
    }
}

/// Translates slice-by-slice paths into the model's 0/1 assignment.
fn assignment_for(model: &IlpModel, paths: &[Vec<VertexId>]) -> Vec<bool> {
    let teg = model.teg();
    let mut x = vec![false; model.n_vars()];
    for (i, path) in paths.iter().enumerate() {
        for t in 0..teg.horizon() {
            let (u, w) = (path[t], path[t + 1]);
            let from = teg.slice_node(u, t);
            if u == w {
                let stay = teg
                    .out_arcs(from)
                    .iter()
                    .copied()
                    .find(|&a| teg.arc(a).kind == ArcKind::Stay)
                    .expect("every slice vertex has a stay arc");
                x[model.var(i, stay)] = true;
            } else {
                let pair = teg.graph().pair_between(u, w).expect("moves follow mode edges");
                let gadget_id = t * teg.graph().pairs().len() + pair;
                let gadget = &teg.gadgets()[gadget_id];
                debug_assert_eq!((gadget.step, gadget.pair), (t, pair));
                let enter = teg
                    .out_arcs(from)
                    .iter()
                    .copied()
                    .find(|&a| teg.arc(a).gadget == Some(gadget_id))
                    .expect("gadget reaches both endpoints");
                let exit = teg
                    .in_arcs(teg.slice_node(w, t + 1))
                    .iter()
                    .copied()
                    .find(|&a| teg.arc(a).gadget == Some(gadget_id))
                    .expect("gadget reaches both endpoints");
                x[model.var(i, enter)] = true;
                x[model.var(i, gadget.core)] = true;
                x[model.var(i, exit)] = true;
            }
        }
    }
    x
}

/// Solves the rearrangement instance end to end: expand at the default
/// horizon (arms times objects), solve, and on infeasibility double the
/// horizon up to four times the default before reporting infeasible.
/// The returned plan has its idle tail pruned.
pub fn solve_mapf(
    g: &ModeGraph,
    q_init: &MultiModalState,
    q_goal: &MultiModalState,
) -> Result<Option<MapfPlan>, SolveError> {
    if q_init.len() != q_goal.len() {
        return Err(SolveError::Model(ModelError::LengthMismatch));
    }
    let k = q_init.len();
    if k == 0 || q_init == q_goal {
        // Nothing has to move; still refuse invalid endpoints.
        let teg = expand(g, 1).expect("horizon 1 is valid");
        build_model(teg, q_init, q_goal)?;
        return Ok(Some(MapfPlan {
            horizon: 0,
            n_steps: 0,
            paths: q_init.0.iter().map(|&v| vec![v]).collect(),
            per_object_cost: vec![0.0; k],
            per_object_actions: vec![0; k],
            objective: 0.0,
        }));
    }

    let base = g.n_arms().max(1) * k;
    for horizon in [base, 2 * base, 4 * base] {
        let teg = expand(g, horizon).expect("horizon is positive");
        let model = build_model(teg, q_init, q_goal)?;
        match solve(&model)? {
            SolveOutcome::Optimal(solved) => return Ok(Some(prune(g, solved, horizon))),
            SolveOutcome::Infeasible => continue,
        }
    }
    Ok(None)
}

fn prune(g: &ModeGraph, solved: Solved, horizon: usize) -> MapfPlan {
    let last_move = (0..horizon)
        .rev()
        .find(|&t| solved.paths.iter().any(|p| p[t] != p[t + 1]));
    let n_steps = last_move.map_or(0, |t| t + 1);
    let paths: Vec<Vec<VertexId>> =
        solved.paths.iter().map(|p| p[..=n_steps].to_vec()).collect();
    let per_object_cost = paths
        .iter()
        .map(|p| {
            (0..n_steps)
                .filter(|&t| p[t] != p[t + 1])
                .map(|t| g.pair(g.pair_between(p[t], p[t + 1]).unwrap()).weight)
                .sum()
        })
        .collect();
    let per_object_actions = paths
        .iter()
        .map(|p| (0..n_steps).filter(|&t| p[t] != p[t + 1]).count())
        .collect();
    MapfPlan {
        horizon,
        n_steps,
        paths,
        per_object_cost,
        per_object_actions,
        objective: solved.objective,
    }
}

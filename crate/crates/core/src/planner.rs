//! Anytime tree search over grounded task states.
//!
//! Nodes are full geometric snapshots: a tool position per arm and a pose
//! or holding arm per object. Edges are synchronized steps of one or more
//! grounded actions. The search grows the tree by either grounding the
//! advice of a guidance strategy or sampling a random feasible action,
//! validates every candidate step against both the mode-level rules and a
//! motion model, and keeps improving on the first solution until the
//! budget runs out.
//!
//! Time is virtual and deterministic: one iteration is one millisecond of
//! budget, so identical seeds reproduce identical results bit for bit on
//! any machine, including the reported solve times.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::geom::Point;
use crate::guidance::{self, ArmAction, Guidance, GuidanceError, Strategy};
use crate::mode_graph::{validate_state, ModeGraph, MultiModalState, VertexId, Workspace};
use crate::motion::MotionModel;
use crate::plan_check;

const PLACE_SAMPLE_RETRIES: usize = 30;
const REWIRE_SUBTREE_CAP: usize = 64;
const COST_EPS: f64 = 1e-12;

/// Where one object is: resting in a region or carried by an arm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ObjectLocation {
    Placed { region: VertexId, pose: Point },
    Held { arm: VertexId },
}

/// A full geometric snapshot of the scene.
#[derive(Clone, Debug, PartialEq)]
pub struct TaskState {
    /// Tool position per arm, indexed like the graph's arm vertices.
    pub arm_positions: Vec<Point>,
    pub locations: Vec<ObjectLocation>,
}

impl TaskState {
    /// The mode-level shadow of this state: one vertex per object.
    pub fn projection(&self) -> MultiModalState {
        MultiModalState(
            self.locations
                .iter()
                .map(|loc| match *loc {
                    ObjectLocation::Placed { region, .. } => region,
                    ObjectLocation::Held { arm } => arm,
                })
                .collect(),
        )
    }

    /// Current pose of an object; a held object rides its arm's tool point.
    pub fn pose_of(&self, object: usize) -> Point {
        match self.locations[object] {
            ObjectLocation::Placed { pose, .. } => pose,
            ObjectLocation::Held { arm } => self.arm_positions[arm],
        }
    }

    fn holder(&self, arm: VertexId) -> Option<usize> {
        self.locations.iter().position(|loc| *loc == ObjectLocation::Held { arm })
    }
}

/// One grounded action inside a synchronized step.
#[derive(Clone, Debug, PartialEq)]
pub enum GroundedAction {
    Pick { arm: VertexId, object: usize, region: VertexId },
    Place { arm: VertexId, object: usize, region: VertexId, pose: Point },
    Handoff { giver: VertexId, receiver: VertexId, object: usize, at: Point },
}

/// One synchronized step: its actions and where every arm ends up.
#[derive(Clone, Debug, PartialEq)]
pub struct Step {
    pub actions: Vec<GroundedAction>,
    pub arm_targets: Vec<Point>,
}

/// A finished plan with its anytime improvement record.
#[derive(Clone, Debug)]
pub struct Solution {
    pub steps: Vec<Step>,
    /// Max over arms of total tool path length.
    pub makespan: f64,
    /// Virtual milliseconds (iterations) until the first solution.
    pub initial_ms: u64,
    pub iterations: u64,
    /// (virtual ms, makespan) per strict improvement, first solution included.
    pub cost_history: Vec<(u64, f64)>,
}

/// What the search knew when the budget ran out without a solution.
#[derive(Clone, Debug)]
pub struct Failure {
    pub iterations: u64,
    /// Fewest scheduled steps still separating any discovered mode class
    /// from the goal, per the strategy's own estimate.
    pub best_remaining: Option<usize>,
    pub n_modes: usize,
}

#[derive(Clone, Debug)]
pub enum Outcome {
    Solved(Solution),
    Exhausted(Failure),
}

impl Outcome {
    pub fn solution(&self) -> Option<&Solution> {
        match self {
            Outcome::Solved(s) => Some(s),
            Outcome::Exhausted(_) => None,
        }
    }
}

#[derive(Debug, Error)]
pub enum PlanError {
    #[error(transparent)]
    Guidance(#[from] GuidanceError),
    #[error("start state is invalid: {0}")]
    InvalidStart(String),
}

#[derive(Clone, Debug)]
pub struct PlannerConfig {
    pub seed: u64,
    /// Iteration budget; one iteration is one virtual millisecond.
    pub budget_ms: u64,
    pub strategy: Strategy,
    pub motion: MotionModel,
    /// Fraction of iterations that ground the strategy's advice.
    pub guidance_fraction: f64,
    /// Fraction of iterations that add a random feasible action.
    pub add_fraction: f64,
    /// Probability of extending the most promising mode class instead of a
    /// uniformly random one.
    pub goal_bias: f64,
    /// Follow guidance exclusively, never sampling random actions.
    pub pure_guidance: bool,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig {
            seed: 0,
            budget_ms: 1000,
            strategy: Strategy::Smart,
            motion: MotionModel::FreeSpace,
            guidance_fraction: 0.8,
            add_fraction: 0.2,
            goal_bias: 0.5,
            pure_guidance: false,
        }
    }
}

/// Memo of strategy advice per (projection, strategy), shareable across
/// planner runs on the same instance; advice is deterministic, so sharing
/// never changes results, only speed.
#[derive(Default)]
pub struct GuidanceCache {
    map: HashMap<(Vec<VertexId>, &'static str), Guidance>,
}

impl GuidanceCache {
    pub fn new() -> Self {
        Self::default()
    }

    fn get_or_compute(
        &mut self,
        g: &ModeGraph,
        strategy: Strategy,
        q: &MultiModalState,
        q_goal: &MultiModalState,
    ) -> Result<Guidance, GuidanceError> {
        let key = (q.0.clone(), strategy.name());
        if let Some(hit) = self.map.get(&key) {
            return Ok(hit.clone());
        }
        let computed = guidance::compute(g, strategy, q, q_goal)?;
        self.map.insert(key, computed.clone());
        Ok(computed)
    }
}

struct Node {
    parent: Option<usize>,
    children: Vec<usize>,
    state: TaskState,
    /// Accumulated tool path length per arm from the root to here.
    arm_costs: Vec<f64>,
    step: Option<Step>,
    tau: usize,
}

struct ModeClass {
    nodes: Vec<usize>,
    guidance: Guidance,
}

impl ModeClass {
    fn has_advice(&self) -> bool {
        self.guidance.now.iter().any(|a| !a.is_idle())
    }
}

struct Planner<'a> {
    g: &'a ModeGraph,
    goal: &'a MultiModalState,
    /// Placement disc radius per vertex; zero for arms.
    extents: Vec<f64>,
    footprint_radius: f64,
    motion: MotionModel,
    nodes: Vec<Node>,
    taus: Vec<ModeClass>,
    tau_index: HashMap<Vec<VertexId>, usize>,
    extension_lengths: (f64, usize),
    best_goal: Option<(usize, f64)>,
    cost_history: Vec<(u64, f64)>,
    initial_ms: Option<u64>,
}

/// Plans from `start` until every object rests inside its goal region.
/// Deterministic in `config.seed`; the cache only memoizes guidance.
pub fn plan(
    ws: &Workspace,
    g: &ModeGraph,
    start: &TaskState,
    goal: &MultiModalState,
    footprint_radius: f64,
    config: &PlannerConfig,
    cache: &mut GuidanceCache,
) -> Result<Outcome, PlanError> {
    if start.arm_positions.len() != g.n_arms() {
        return Err(PlanError::InvalidStart("one tool position per arm required".into()));
    }
    if start.locations.len() != goal.len() {
        return Err(PlanError::InvalidStart("object count differs from the goal".into()));
    }
    let projection = start.projection();
    if let Err(violations) = validate_state(g, &projection) {
        return Err(PlanError::InvalidStart(format!(
            "{} holds {} objects but has capacity {}",
            violations[0].vertex_name, violations[0].occupancy, violations[0].capacity
        )));
    }

    let mut extents = vec![0.0; g.n_vertices()];
    for (ri, region) in ws.regions.iter().enumerate() {
        extents[g.n_arms() + ri] = region.extent;
    }

    let mut planner = Planner {
        g,
        goal,
        extents,
        footprint_radius,
        motion: config.motion,
        nodes: Vec::new(),
        taus: Vec::new(),
        tau_index: HashMap::new(),
        extension_lengths: (0.0, 0),
        best_goal: None,
        cost_history: Vec::new(),
        initial_ms: None,
    };

    let root_tau = planner.intern_tau(projection, config.strategy, cache)?;
    planner.nodes.push(Node {
        parent: None,
        children: Vec::new(),
        state: start.clone(),
        arm_costs: vec![0.0; g.n_arms()],
        step: None,
        tau: root_tau,
    });
    planner.taus[root_tau].nodes.push(0);
    planner.note_goal(0, 0);

    let guidance_fraction = if config.pure_guidance { 1.0 } else { config.guidance_fraction };
    let add_fraction = if config.pure_guidance { 0.0 } else { config.add_fraction };

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut iterations = 0u64;
    for iteration in 1..=config.budget_ms {
        iterations = iteration;
        let tau = planner.select_tau(&mut rng, config.goal_bias);
        let node = {
            let members = &planner.taus[tau].nodes;
            members[rng.random_range(0..members.len())]
        };
        let kind: f64 = rng.random();
        let actions = if kind < guidance_fraction {
            let advice = planner.taus[tau].guidance.now.clone();
            planner.ground_advice(node, &advice, &mut rng)
        } else if kind < guidance_fraction + add_fraction {
            planner.sample_action(node, &mut rng)
        } else {
            None
        };
        if let Some(actions) = actions {
            planner.grow(node, actions, iteration, config.strategy, cache)?;
        }
    }

    Ok(match planner.best_goal {
        Some((node, makespan)) => Outcome::Solved(Solution {
            steps: planner.retrace(node),
            makespan,
            initial_ms: planner.initial_ms.unwrap_or(0),
            iterations,
            cost_history: planner.cost_history.clone(),
        }),
        None => Outcome::Exhausted(Failure {
            iterations,
            best_remaining: planner
                .taus
                .iter()
                .filter_map(|tau| tau.guidance.remaining_steps)
                .min(),
            n_modes: planner.taus.len(),
        }),
    })
}

impl<'a> Planner<'a> {
    fn intern_tau(
        &mut self,
        projection: MultiModalState,
        strategy: Strategy,
        cache: &mut GuidanceCache,
    ) -> Result<usize, GuidanceError> {
        if let Some(&id) = self.tau_index.get(&projection.0) {
            return Ok(id);
        }
        let guidance = cache.get_or_compute(self.g, strategy, &projection, self.goal)?;
        let id = self.taus.len();
        self.tau_index.insert(projection.0, id);
        self.taus.push(ModeClass { nodes: Vec::new(), guidance });
        Ok(id)
    }

    /// Mode class to extend: with probability `goal_bias` the advice-bearing
    /// class whose strategy sees the fewest remaining steps (ties to the
    /// oldest class), otherwise uniformly random.
    fn select_tau(&self, rng: &mut ChaCha8Rng, goal_bias: f64) -> usize {
        if rng.random_bool(goal_bias) {
            let best = self
                .taus
                .iter()
                .enumerate()
                .filter(|(_, tau)| tau.has_advice())
                .min_by_key(|(id, tau)| (tau.guidance.remaining_steps.unwrap_or(usize::MAX), *id))
                .map(|(id, _)| id);
            if let Some(id) = best {
                return id;
            }
        }
        rng.random_range(0..self.taus.len())
    }

    /// Turns per-arm advice into grounded actions against a node's state.
    /// Any inconsistency (wrong holder, missing handoff partner, busy arm,
    /// unplaceable pose) voids the whole step.
    fn ground_advice(
        &self,
        node: usize,
        advice: &[ArmAction],
        rng: &mut ChaCha8Rng,
    ) -> Option<Vec<GroundedAction>> {
        let state = &self.nodes[node].state;
        let mut actions = Vec::new();
        let mut staged_poses: Vec<Point> = Vec::new();
        for (arm, action) in advice.iter().enumerate() {
            match *action {
                ArmAction::Idle => {}
                ArmAction::Pick { object } => {
                    let ObjectLocation::Placed { region, .. } = state.locations[object] else {
                        return None;
                    };
                    if self.g.edge_between(region, arm).is_none() || state.holder(arm).is_some() {
                        return None;
                    }
                    actions.push(GroundedAction::Pick { arm, object, region });
                }
                ArmAction::Place { object, region } => {
                    if state.locations[object] != (ObjectLocation::Held { arm }) {
                        return None;
                    }
                    if self.g.edge_between(arm, region).is_none() {
                        return None;
                    }
                    let pose = self.sample_pose(state, region, object, &staged_poses, rng)?;
                    staged_poses.push(pose);
                    actions.push(GroundedAction::Place { arm, object, region, pose });
                }
                ArmAction::Give { object, to } => {
                    if advice[to] != (ArmAction::Receive { object, from: arm }) {
                        return None;
                    }
                    if state.locations[object] != (ObjectLocation::Held { arm }) {
                        return None;
                    }
                    if self.g.edge_between(arm, to).is_none() || state.holder(to).is_some() {
                        return None;
                    }
                    let at = self.g.vertex(arm).point.midpoint(self.g.vertex(to).point);
                    actions.push(GroundedAction::Handoff { giver: arm, receiver: to, object, at });
                }
                ArmAction::Receive { object, from } => {
                    if advice[from] != (ArmAction::Give { object, to: arm }) {
                        return None;
                    }
                }
            }
        }
        if actions.is_empty() {
            None
        } else {
            Some(actions)
        }
    }

    /// Uniformly samples one feasible single-action step from a node.
    fn sample_action(&self, node: usize, rng: &mut ChaCha8Rng) -> Option<Vec<GroundedAction>> {
        let state = &self.nodes[node].state;
        let occupancy = self.region_occupancy(state);

        enum Candidate {
            Pick { arm: VertexId, object: usize, region: VertexId },
            Place { arm: VertexId, object: usize, region: VertexId },
            Handoff { giver: VertexId, receiver: VertexId, object: usize },
        }
        let mut candidates = Vec::new();
        for (object, loc) in state.locations.iter().enumerate() {
            match *loc {
                ObjectLocation::Placed { region, .. } => {
                    for &e in self.g.out_edges(region) {
                        let arm = self.g.edge(e).to;
                        if self.g.is_arm(arm) && state.holder(arm).is_none() {
                            candidates.push(Candidate::Pick { arm, object, region });
                        }
                    }
                }
                ObjectLocation::Held { arm } => {
                    for &e in self.g.out_edges(arm) {
                        let to = self.g.edge(e).to;
                        if self.g.is_arm(to) {
                            if state.holder(to).is_none() {
                                candidates.push(Candidate::Handoff {
                                    giver: arm,
                                    receiver: to,
                                    object,
                                });
                            }
                        } else if occupancy[to] < self.g.capacity(to) {
                            candidates.push(Candidate::Place { arm, object, region: to });
                        }
                    }
                }
            }
        }
        if candidates.is_empty() {
            return None;
        }
        let action = match candidates[rng.random_range(0..candidates.len())] {
            Candidate::Pick { arm, object, region } => {
                GroundedAction::Pick { arm, object, region }
            }
            Candidate::Place { arm, object, region } => {
                let pose = self.sample_pose(state, region, object, &[], rng)?;
                GroundedAction::Place { arm, object, region, pose }
            }
            Candidate::Handoff { giver, receiver, object } => {
                let at = self.g.vertex(giver).point.midpoint(self.g.vertex(receiver).point);
                GroundedAction::Handoff { giver, receiver, object, at }
            }
        };
        Some(vec![action])
    }

    fn region_occupancy(&self, state: &TaskState) -> Vec<usize> {
        let mut occupancy = vec![0usize; self.g.n_vertices()];
        for loc in &state.locations {
            if let ObjectLocation::Placed { region, .. } = *loc {
                occupancy[region] += 1;
            }
        }
        occupancy
    }

    /// Samples a placement pose uniformly over the region's disc, rejecting
    /// poses that crowd other objects, with a bounded number of retries.
    fn sample_pose(
        &self,
        state: &TaskState,
        region: VertexId,
        object: usize,
        staged: &[Point],
        rng: &mut ChaCha8Rng,
    ) -> Option<Point> {
        let centroid = self.g.vertex(region).point;
        let extent = self.extents[region];
        for _ in 0..PLACE_SAMPLE_RETRIES {
            let pose = if extent > 0.0 {
                let radius = extent * rng.random::<f64>().sqrt();
                let angle = std::f64::consts::TAU * rng.random::<f64>();
                centroid + Point::xy(radius * angle.cos(), radius * angle.sin())
            } else {
                centroid
            };
            let crowded = state
                .locations
                .iter()
                .enumerate()
                .filter(|&(o, _)| o != object)
                .filter_map(|(_, loc)| match *loc {
                    ObjectLocation::Placed { pose, .. } => Some(pose),
                    ObjectLocation::Held { .. } => None,
                })
                .chain(staged.iter().copied())
                .any(|other| pose.dist(other) < self.footprint_radius);
            if !crowded {
                return Some(pose);
            }
            if extent == 0.0 {
                return None;
            }
        }
        None
    }

    /// Executes one synchronized step from a state: re-derives arm targets,
    /// re-validates mode rules, placement separation, and the motion model,
    /// and returns the successor state with per-arm step costs.
    fn execute(
        &self,
        state: &TaskState,
        actions: &[GroundedAction],
    ) -> Option<(TaskState, Vec<f64>, Vec<Point>)> {
        let mut targets = state.arm_positions.clone();
        let mut locations = state.locations.clone();
        let mut acted = vec![false; self.g.n_arms()];
        let claim = |arm: VertexId, acted: &mut Vec<bool>| {
            if acted[arm] {
                return None;
            }
            acted[arm] = true;
            Some(())
        };
        for action in actions {
            match *action {
                GroundedAction::Pick { arm, object, region } => {
                    claim(arm, &mut acted)?;
                    if locations[object] != (state.locations[object])
                        || !matches!(state.locations[object],
                            ObjectLocation::Placed { region: r, .. } if r == region)
                    {
                        return None;
                    }
                    targets[arm] = state.pose_of(object);
                    locations[object] = ObjectLocation::Held { arm };
                }
                GroundedAction::Place { arm, object, region, pose } => {
                    claim(arm, &mut acted)?;
                    if state.locations[object] != (ObjectLocation::Held { arm }) {
                        return None;
                    }
                    if pose.dist(self.g.vertex(region).point) > self.extents[region] + 1e-9 {
                        return None;
                    }
                    targets[arm] = pose;
                    locations[object] = ObjectLocation::Placed { region, pose };
                }
                GroundedAction::Handoff { giver, receiver, object, at } => {
                    claim(giver, &mut acted)?;
                    claim(receiver, &mut acted)?;
                    if state.locations[object] != (ObjectLocation::Held { arm: giver })
                        || state.holder(receiver).is_some()
                    {
                        return None;
                    }
                    targets[giver] = at;
                    targets[receiver] = at;
                    locations[object] = ObjectLocation::Held { arm: receiver };
                }
            }
        }

        let next = TaskState { arm_positions: targets.clone(), locations };
        let before = state.projection();
        let after = next.projection();
        let slices: Vec<Vec<VertexId>> =
            before.0.iter().zip(&after.0).map(|(&u, &w)| vec![u, w]).collect();
        plan_check::check_plan(self.g, &before, &after, &slices).ok()?;

        for action in actions {
            if let GroundedAction::Place { object, pose, .. } = *action {
                let crowded = next
                    .locations
                    .iter()
                    .enumerate()
                    .filter(|&(o, _)| o != object)
                    .any(|(_, loc)| match *loc {
                        ObjectLocation::Placed { pose: other, .. } => {
                            pose.dist(other) < self.footprint_radius - 1e-12
                        }
                        ObjectLocation::Held { .. } => false,
                    });
                if crowded {
                    return None;
                }
            }
        }

        let costs = self.motion.validate(&state.arm_positions, &targets)?;
        Some((next, costs, targets))
    }

    /// Adds a node for `actions` grown from `origin`, first shopping the
    /// origin's mode class for a cheaper anchor, then letting the new node
    /// adopt any neighbors it improves.
    fn grow(
        &mut self,
        origin: usize,
        actions: Vec<GroundedAction>,
        iteration: u64,
        strategy: Strategy,
        cache: &mut GuidanceCache,
    ) -> Result<(), GuidanceError> {
        let Some((state, costs, targets)) = self.execute(&self.nodes[origin].state, &actions)
        else {
            return Ok(());
        };

        let radius = self.rewire_radius();
        let mut parent = origin;
        let mut best = (self.arrival(origin, &costs), state, costs, targets);
        let origin_tau = self.nodes[origin].tau;
        for &m in &self.taus[origin_tau].nodes {
            if m == origin {
                continue;
            }
            if self.state_distance(&self.nodes[m].state, &best.1) > radius {
                continue;
            }
            if let Some((state_m, costs_m, targets_m)) =
                self.execute(&self.nodes[m].state, &actions)
            {
                let arrival = self.arrival(m, &costs_m);
                if arrival + COST_EPS < best.0 {
                    parent = m;
                    best = (arrival, state_m, costs_m, targets_m);
                }
            }
        }
        let (_, state, costs, targets) = best;

        let step = Step { actions, arm_targets: targets };
        if self.nodes[parent].children.iter().any(|&c| {
            self.nodes[c].step.as_ref() == Some(&step) && self.nodes[c].state == state
        }) {
            return Ok(());
        }

        let arm_costs: Vec<f64> = self.nodes[parent]
            .arm_costs
            .iter()
            .zip(&costs)
            .map(|(base, step)| base + step)
            .collect();
        let length = costs.iter().copied().fold(0.0, f64::max);
        self.extension_lengths.0 += length;
        self.extension_lengths.1 += 1;

        let tau = self.intern_tau(state.projection(), strategy, cache)?;
        let id = self.nodes.len();
        self.nodes.push(Node {
            parent: Some(parent),
            children: Vec::new(),
            state,
            arm_costs,
            step: Some(step),
            tau,
        });
        self.nodes[parent].children.push(id);
        self.taus[tau].nodes.push(id);
        self.note_goal(id, iteration);
        self.adopt_neighbors(id, iteration);
        Ok(())
    }

    fn arrival(&self, parent: usize, step_costs: &[f64]) -> f64 {
        self.nodes[parent]
            .arm_costs
            .iter()
            .zip(step_costs)
            .map(|(base, step)| base + step)
            .fold(0.0, f64::max)
    }

    fn rewire_radius(&self) -> f64 {
        let (sum, count) = self.extension_lengths;
        if count == 0 {
            0.0
        } else {
            2.0 * sum / count as f64
        }
    }

    fn state_distance(&self, a: &TaskState, b: &TaskState) -> f64 {
        a.arm_positions
            .iter()
            .zip(&b.arm_positions)
            .map(|(p, q)| p.dist(*q))
            .fold(0.0, f64::max)
    }

    /// Re-parents neighbors that the fresh node reaches more cheaply,
    /// re-executing each adopted subtree so every descendant's geometry and
    /// accumulated costs stay consistent. An adoption that fails anywhere
    /// down the subtree is abandoned whole.
    fn adopt_neighbors(&mut self, id: usize, iteration: u64) {
        let radius = self.rewire_radius();
        let tau = self.nodes[id].tau;
        let candidates: Vec<usize> = self.taus[tau]
            .nodes
            .iter()
            .filter(|&&m| m != id)
            .flat_map(|&m| self.nodes[m].children.clone())
            .collect();
        for w in candidates {
            if w == id || self.nodes[w].parent == Some(id) {
                continue;
            }
            if self.state_distance(&self.nodes[w].state, &self.nodes[id].state) > radius {
                continue;
            }
            let actions = self.nodes[w].step.as_ref().expect("non-root").actions.clone();
            let Some((state, costs, targets)) = self.execute(&self.nodes[id].state, &actions)
            else {
                continue;
            };
            let arrival = self.arrival(id, &costs);
            let current = self.nodes[w].arm_costs.iter().copied().fold(0.0, f64::max);
            if arrival + COST_EPS >= current {
                continue;
            }
            let arm_costs: Vec<f64> = self.nodes[id]
                .arm_costs
                .iter()
                .zip(&costs)
                .map(|(base, step)| base + step)
                .collect();
            let mut staged: Vec<(usize, TaskState, Vec<f64>, Vec<Point>)> =
                vec![(w, state, arm_costs, targets)];
            let mut frontier = 0;
            let mut ok = true;
            while frontier < staged.len() {
                if staged.len() > REWIRE_SUBTREE_CAP {
                    ok = false;
                    break;
                }
                let node = staged[frontier].0;
                let state = staged[frontier].1.clone();
                let arm_costs = staged[frontier].2.clone();
                for &child in &self.nodes[node].children.clone() {
                    let child_actions =
                        self.nodes[child].step.as_ref().expect("non-root").actions.clone();
                    match self.execute(&state, &child_actions) {
                        Some((child_state, child_costs, child_targets)) => {
                            let child_arm_costs: Vec<f64> = arm_costs
                                .iter()
                                .zip(&child_costs)
                                .map(|(base, step)| base + step)
                                .collect();
                            staged.push((child, child_state, child_arm_costs, child_targets));
                        }
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
                if !ok {
                    break;
                }
                frontier += 1;
            }
            if !ok {
                continue;
            }
            let old_parent = self.nodes[w].parent.expect("non-root");
            self.nodes[old_parent].children.retain(|&c| c != w);
            self.nodes[id].children.push(w);
            self.nodes[w].parent = Some(id);
            for (node, state, arm_costs, targets) in staged {
                self.nodes[node].state = state;
                self.nodes[node].arm_costs = arm_costs;
                if let Some(step) = self.nodes[node].step.as_mut() {
                    step.arm_targets = targets;
                }
                self.note_goal(node, iteration);
            }
        }
    }

    /// Registers a node as a solution when its projection matches the goal
    /// and every object rests inside its goal region's disc.
    fn note_goal(&mut self, id: usize, iteration: u64) {
        let node = &self.nodes[id];
        if node.state.projection() != *self.goal {
            return;
        }
        let settled = node.state.locations.iter().enumerate().all(|(i, loc)| match *loc {
            ObjectLocation::Placed { region, pose } => {
                region == self.goal.0[i]
                    && pose.dist(self.g.vertex(region).point) <= self.extents[region] + 1e-9
            }
            ObjectLocation::Held { .. } => false,
        });
        if !settled {
            return;
        }
        let makespan = node.arm_costs.iter().copied().fold(0.0, f64::max);
        let improved = match self.best_goal {
            Some((_, best)) => makespan + COST_EPS < best,
            None => true,
        };
        if improved {
            if self.initial_ms.is_none() {
                self.initial_ms = Some(iteration);
            }
            self.best_goal = Some((id, makespan));
            self.cost_history.push((iteration, makespan));
        }
    }

    fn retrace(&self, goal_node: usize) -> Vec<Step> {
        let mut steps = Vec::new();
        let mut cursor = goal_node;
        while let Some(parent) = self.nodes[cursor].parent {
            steps.push(self.nodes[cursor].step.clone().expect("non-root"));
            cursor = parent;
        }
        steps.reverse();
        steps
    }
}

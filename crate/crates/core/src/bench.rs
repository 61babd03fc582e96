//! Benchmark scenario families and the trial harness behind the CLI.

use std::fmt;
use std::io::Write as _;
use std::path::Path;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::geom::Point;
use crate::guidance::Strategy;
use crate::mode_graph::{ArmSpec, RegionSpec};
use crate::motion::MotionModel;
use crate::planner::{plan, GuidanceCache, Outcome, PlanError, PlannerConfig};
use crate::replay::replay;
use crate::scenario::{ObjectSpec, Scenario, ScenarioError};
use crate::solver::{solve_mapf, SolveError};

const POSE_RETRIES: usize = 200;

/// The built-in scenario generators. `Custom` marks hand-written files and
/// cannot be generated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// Half the objects cross left to right, half the other way.
    Switch,
    /// Every object crosses in the same direction.
    SideToSide,
    /// Direction chosen per object by a seeded coin.
    Random,
    /// Two arms, two objects, and a single one-slot buffer between them.
    SwapBuffer,
    Custom,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Switch => "switch",
            Family::SideToSide => "side_to_side",
            Family::Random => "random",
            Family::SwapBuffer => "swap_buffer",
            Family::Custom => "custom",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "switch" => Ok(Family::Switch),
            "side_to_side" => Ok(Family::SideToSide),
            "random" => Ok(Family::Random),
            "swap_buffer" => Ok(Family::SwapBuffer),
            "custom" => Ok(Family::Custom),
            other => Err(format!("unknown family {other:?}")),
        }
    }
}

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error("family custom is for hand-written scenario files")]
    NotGenerable,
    #[error("family {family} needs {needs}, got {arms} arms and {objects} objects")]
    BadShape { family: &'static str, needs: &'static str, arms: usize, objects: usize },
    #[error("could not sample non-overlapping poses in region {region:?}")]
    Crowded { region: String },
    #[error(transparent)]
    Invalid(#[from] ScenarioError),
}

/// Builds a scenario of the given family. Same arguments, same scenario,
/// byte for byte.
pub fn generate(
    family: Family,
    arms: usize,
    objects: usize,
    seed: u64,
) -> Result<Scenario, GenerateError> {
    let scenario = match family {
        Family::Custom => return Err(GenerateError::NotGenerable),
        Family::SwapBuffer => {
            if arms != 2 || objects != 2 {
                return Err(GenerateError::BadShape {
                    family: family.name(),
                    needs: "exactly 2 arms and 2 objects",
                    arms,
                    objects,
                });
            }
            swap_buffer_scenario(seed)
        }
        Family::Switch | Family::SideToSide | Family::Random => {
            if arms == 0 || objects == 0 {
                return Err(GenerateError::BadShape {
                    family: family.name(),
                    needs: "at least 1 arm and 1 object",
                    arms,
                    objects,
                });
            }
            relay_scenario(family, arms, objects, seed)?
        }
    };
    scenario.validate()?;
    Ok(scenario)
}

/// A chain of arms one unit apart bridging two shared table regions.
/// Only the end arms can reach a region, so anything crossing the chain
/// travels hand to hand.
fn relay_scenario(
    family: Family,
    arms: usize,
    objects: usize,
    seed: u64,
) -> Result<Scenario, GenerateError> {
    let regions = vec![
        RegionSpec {
            id: "C1".into(),
            centroid: Point::xy(0.0, 0.0),
            capacity: objects,
            extent: 0.6,
        },
        RegionSpec {
            id: "C2".into(),
            centroid: Point::xy(arms as f64 + 1.0, 0.0),
            capacity: objects,
            extent: 0.6,
        },
    ];
    let arm_specs = (0..arms)
        .map(|i| ArmSpec {
            id: format!("a{i}"),
            base: Point::xy(i as f64 + 1.0, 0.0),
            reach: 1.1,
        })
        .collect();

    let footprint = 0.2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut starts: Vec<usize> = Vec::with_capacity(objects);
    for i in 0..objects {
        let from_c1 = match family {
            Family::Switch => i < objects.div_ceil(2),
            Family::SideToSide => true,
            Family::Random => rng.random_bool(0.5),
            _ => unreachable!(),
        };
        starts.push(if from_c1 { 0 } else { 1 });
    }

    let goals: Vec<usize> = starts.iter().map(|s| 1 - s).collect();
    let mut start_poses: Vec<Point> = Vec::with_capacity(objects);
    let mut goal_poses: Vec<Point> = Vec::with_capacity(objects);
    for i in 0..objects {
        let start = starts[i];
        let pose = sample_pose(&regions[start], footprint, &start_poses, &starts, start, &mut rng)
            .ok_or_else(|| GenerateError::Crowded { region: regions[start].id.clone() })?;
        start_poses.push(pose);
        let goal = goals[i];
        let pose = sample_pose(&regions[goal], footprint, &goal_poses, &goals, goal, &mut rng)
            .ok_or_else(|| GenerateError::Crowded { region: regions[goal].id.clone() })?;
        goal_poses.push(pose);
    }

    let object_specs = (0..objects)
        .map(|i| ObjectSpec {
            id: format!("o{i}"),
            start_region: regions[starts[i]].id.clone(),
            start_pose: start_poses[i],
            goal_region: regions[1 - starts[i]].id.clone(),
            goal_pose: goal_poses[i],
        })
        .collect();

    Ok(Scenario {
        family: family.name().into(),
        seed,
        arms: arm_specs,
        regions,
        handoff_distance: 1.5,
        footprint_radius: footprint,
        objects: object_specs,
    })
}

/// Draws a pose in the region's disc, rejecting poses that would crowd an
/// earlier object assigned to the same region. `peers` and `own` tell which
/// of the already drawn poses share this region.
fn sample_pose(
    region: &RegionSpec,
    footprint: f64,
    drawn: &[Point],
    peers: &[usize],
    own: usize,
    rng: &mut ChaCha8Rng,
) -> Option<Point> {
    for _ in 0..POSE_RETRIES {
        let r = region.extent * rng.random::<f64>().sqrt();
        let theta = std::f64::consts::TAU * rng.random::<f64>();
        let pose = Point::xy(
            region.centroid.x + r * theta.cos(),
            region.centroid.y + r * theta.sin(),
        );
        let clear = drawn
            .iter()
            .zip(peers)
            .filter(|(_, &p)| p == own)
            .all(|(q, _)| pose.dist(*q) >= footprint);
        if clear {
            return Some(pose);
        }
    }
    None
}

/// Two arms that both reach a shared buffer but only their own side table,
/// with every region holding at most one object. Forces one object through
/// the buffer.
fn swap_buffer_scenario(seed: u64) -> Scenario {
    let ws = crate::fixtures::swapbuf_workspace();
    let region = |id: &str| ws.regions.iter().find(|r| r.id == id).unwrap().centroid;
    Scenario {
        family: Family::SwapBuffer.name().into(),
        seed,
        objects: vec![
            ObjectSpec {
                id: "o0".into(),
                start_region: "P1".into(),
                start_pose: region("P1"),
                goal_region: "P2".into(),
                goal_pose: region("P2"),
            },
            ObjectSpec {
                id: "o1".into(),
                start_region: "P2".into(),
                start_pose: region("P2"),
                goal_region: "P1".into(),
                goal_pose: region("P1"),
            },
        ],
        arms: ws.arms,
        regions: ws.regions,
        handoff_distance: ws.handoff_distance,
        footprint_radius: 0.0,
    }
}

#[derive(Clone, Debug)]
pub struct RunParams {
    pub strategy: Strategy,
    /// Virtual-millisecond budget per trial (one planner iteration each).
    pub budget_ms: u64,
    pub trials: u64,
    pub seed: u64,
    pub motion: MotionModel,
    pub pure_guidance: bool,
}

/// One CSV row. Failed trials keep their timing and cost columns empty.
#[derive(Clone, Debug)]
pub struct TrialRow {
    pub scenario: String,
    pub strategy: String,
    pub trial: u64,
    pub success: bool,
    pub initial_ms: Option<u64>,
    pub makespan: Option<f64>,
    pub actions: Option<usize>,
    pub mapf_steps: Option<usize>,
}

#[derive(Debug)]
pub struct RunReport {
    pub rows: Vec<TrialRow>,
    /// Trials whose plan failed independent re-execution. Always 0 for a
    /// correct planner; counted separately so it can never hide as an
    /// ordinary failure.
    pub violations: usize,
    pub mapf_steps: Option<usize>,
    /// (trial, cost history) per successful trial, for anytime analysis.
    pub histories: Vec<(u64, Vec<(u64, f64)>)>,
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// Runs `trials` independent planner trials on one scenario and re-executes
/// every claimed solution from the raw scenario before counting it.
pub fn run(scenario: &Scenario, params: &RunParams) -> Result<RunReport, RunError> {
    let g = scenario.validate()?;
    let ws = scenario.workspace();
    let start = scenario.initial_task_state(&g);
    let goal = scenario.goal_projection(&g);

    let mapf_steps = solve_mapf(&g, &scenario.initial_projection(&g), &goal)?
        .map(|mapf_plan| mapf_plan.n_steps);

    let mut rows = Vec::with_capacity(params.trials as usize);
    let mut histories = Vec::new();
    let mut violations = 0usize;
    let mut cache = GuidanceCache::new();
    for trial in 0..params.trials {
        let config = PlannerConfig {
            seed: params.seed.wrapping_add(trial),
            budget_ms: params.budget_ms,
            strategy: params.strategy,
            motion: params.motion,
            pure_guidance: params.pure_guidance,
            ..Default::default()
        };
        let outcome =
            plan(&ws, &g, &start, &goal, scenario.footprint_radius, &config, &mut cache)?;
        let mut row = TrialRow {
            scenario: scenario.id(),
            strategy: params.strategy.name().into(),
            trial,
            success: false,
            initial_ms: None,
            makespan: None,
            actions: None,
            mapf_steps,
        };
        if let Outcome::Solved(solution) = &outcome {
            match replay(scenario, &solution.steps, &params.motion) {
                Ok(stats) if (stats.makespan - solution.makespan).abs() < 1e-6 => {
                    row.success = true;
                    row.initial_ms = Some(solution.initial_ms);
                    row.makespan = Some(stats.makespan);
                    row.actions = Some(stats.n_steps);
                    histories.push((trial, solution.cost_history.clone()));
                }
                _ => violations += 1,
            }
        }
        rows.push(row);
    }
    Ok(RunReport { rows, violations, mapf_steps, histories })
}

/// Renders rows as CSV, sorted by scenario, strategy, then trial. The exact
/// byte layout is part of the interface: rerunning the same benchmark must
/// reproduce the file.
pub fn render_csv(rows: &[TrialRow]) -> String {
    let mut sorted: Vec<&TrialRow> = rows.iter().collect();
    sorted.sort_by(|a, b| {
        (&a.scenario, &a.strategy, a.trial).cmp(&(&b.scenario, &b.strategy, b.trial))
    });
    let mut out = String::from("scenario,strategy,trial,success,initial_ms,makespan,actions,mapf_steps\n");
    for row in sorted {
        let opt_u64 = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
        let opt_usize = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
        let makespan = row.makespan.map(|m| format!("{m:.3}")).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            row.scenario,
            row.strategy,
            row.trial,
            if row.success { 1 } else { 0 },
            opt_u64(row.initial_ms),
            makespan,
            opt_usize(row.actions),
            opt_usize(row.mapf_steps),
        ));
    }
    out
}

pub fn write_csv(rows: &[TrialRow], path: &Path) -> std::io::Result<()> {
    let mut file = std::fs::File::create(path)?;
    file.write_all(render_csv(rows).as_bytes())
}

/// One human-readable line per (scenario, strategy) group.
pub fn summarize(rows: &[TrialRow]) -> String {
    let mut groups: Vec<(String, String)> = rows
        .iter()
        .map(|r| (r.scenario.clone(), r.strategy.clone()))
        .collect();
    groups.sort();
    groups.dedup();

    let mut out = String::new();
    for (scenario, strategy) in groups {
        let members: Vec<&TrialRow> = rows
            .iter()
            .filter(|r| r.scenario == scenario && r.strategy == strategy)
            .collect();
        let n = members.len();
        let wins: Vec<&TrialRow> = members.iter().filter(|r| r.success).copied().collect();
        let mean = |f: &dyn Fn(&TrialRow) -> f64| {
            wins.iter().map(|r| f(r)).sum::<f64>() / wins.len() as f64
        };
        out.push_str(&format!(
            "{scenario} {strategy}: {}/{} solved",
            wins.len(),
            n
        ));
        if !wins.is_empty() {
            out.push_str(&format!(
                ", initial_ms {:.1}, makespan {:.3}, actions {:.2}",
                mean(&|r| r.initial_ms.unwrap() as f64),
                mean(&|r| r.makespan.unwrap()),
                mean(&|r| r.actions.unwrap() as f64),
            ));
        }
        if let Some(steps) = members.first().and_then(|r| r.mapf_steps) {
            out.push_str(&format!(", schedule floor {steps}"));
        }
        out.push('\n');
    }
    out
}

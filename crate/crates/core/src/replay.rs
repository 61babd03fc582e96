//! Independent re-execution of planned solutions.
//!
//! The replayer rebuilds every rule from the raw scenario: reach and
//! handoff conditions from base and centroid coordinates, capacities from
//! the region specs, separation from the footprint radius. It shares no
//! state or derived structure with the planner, so agreement between the
//! two is evidence rather than tautology. Vertex indices in actions follow
//! the file convention: arms first in file order, then regions.

use thiserror::Error;

use crate::geom::Point;
use crate::motion::MotionModel;
use crate::planner::{GroundedAction, Step};
use crate::scenario::Scenario;

#[derive(Debug, Error, PartialEq)]
pub enum ReplayError {
    #[error("step {step} is empty")]
    EmptyStep { step: usize },
    #[error("step {step}: arm {arm:?} acts twice")]
    ArmBusy { step: usize, arm: String },
    #[error("step {step}: object {object:?} is not where the action expects it")]
    MisplacedObject { step: usize, object: String },
    #[error("step {step}: arm {arm:?} already holds an object")]
    HandsFull { step: usize, arm: String },
    #[error("step {step}: {from:?} and {to:?} are out of reach of each other")]
    OutOfReach { step: usize, from: String, to: String },
    #[error("step {step}: the corridor between {a:?} and {b:?} is used twice")]
    CorridorReused { step: usize, a: String, b: String },
    #[error("step {step}: {vertex:?} is involved in {count} transfers, capacity {capacity}")]
    TooManyTransfers { step: usize, vertex: String, count: usize, capacity: usize },
    #[error("step {step}: region {region:?} would hold {count} objects, capacity {capacity}")]
    OverFull { step: usize, region: String, count: usize, capacity: usize },
    #[error("step {step}: place pose is outside region {region:?}")]
    PoseOutside { step: usize, region: String },
    #[error("step {step}: placed objects {a:?} and {b:?} are closer than the footprint")]
    Crowded { step: usize, a: String, b: String },
    #[error("step {step}: the synchronized motion is infeasible")]
    MotionInfeasible { step: usize },
    #[error("step {step}: action names an unknown arm or region index")]
    UnknownIndex { step: usize },
    #[error("object {object:?} does not end in its goal region")]
    GoalUnmet { object: String },
}

/// Everything the replay measured while re-executing the solution.
#[derive(Clone, Debug)]
pub struct ReplayStats {
    pub n_steps: usize,
    /// Max over arms of total tool path length.
    pub makespan: f64,
    pub per_arm_length: Vec<f64>,
    /// Transfers per object over the whole solution.
    pub per_object_transfers: Vec<usize>,
}

#[derive(Clone, Copy, PartialEq)]
enum Loc {
    Placed { region: usize, pose: Point },
    Held { arm: usize },
}

/// Re-executes `steps` against the scenario from scratch and returns the
/// measured totals, or the first rule the solution breaks.
pub fn replay(
    scenario: &Scenario,
    steps: &[Step],
    motion: &MotionModel,
) -> Result<ReplayStats, ReplayError> {
    let n_arms = scenario.arms.len();
    let n_regions = scenario.regions.len();
    let region_of = |vertex: usize| vertex.checked_sub(n_arms).filter(|&r| r < n_regions);
    let arm_name = |arm: usize| scenario.arms[arm].id.clone();
    let region_name = |region: usize| scenario.regions[region].id.clone();

    let mut arm_pos: Vec<Point> = scenario.arms.iter().map(|a| a.base).collect();
    let mut lengths = vec![0.0f64; n_arms];
    let mut transfers = vec![0usize; scenario.objects.len()];
    let mut locations: Vec<Loc> = Vec::with_capacity(scenario.objects.len());
    for object in &scenario.objects {
        let region = scenario
            .regions
            .iter()
            .position(|r| r.id == object.start_region)
            .ok_or(ReplayError::UnknownIndex { step: 0 })?;
        locations.push(Loc::Placed { region, pose: object.start_pose });
    }

    for (step, contents) in steps.iter().enumerate() {
        if contents.actions.is_empty() {
            return Err(ReplayError::EmptyStep { step });
        }
        let mut targets = arm_pos.clone();
        let mut next = locations.clone();
        let mut acted = vec![false; n_arms];
        let mut corridors: Vec<(usize, usize)> = Vec::new();
        let mut touches = vec![0usize; n_arms + n_regions];

        let claim = |arm: usize, acted: &mut Vec<bool>| -> Result<(), ReplayError> {
            if arm >= acted.len() {
                return Err(ReplayError::UnknownIndex { step });
            }
            if acted[arm] {
                return Err(ReplayError::ArmBusy { step, arm: arm_name(arm) });
            }
            acted[arm] = true;
            Ok(())
        };

        for action in &contents.actions {
            match *action {
                GroundedAction::Pick { arm, object, region } => {
                    claim(arm, &mut acted)?;
                    let region =
                        region_of(region).ok_or(ReplayError::UnknownIndex { step })?;
                    let expected = match locations.get(object) {
                        Some(&Loc::Placed { region: r, pose }) if r == region => pose,
                        Some(_) => {
                            return Err(ReplayError::MisplacedObject {
                                step,
                                object: scenario.objects[object].id.clone(),
                            })
                        }
                        None => return Err(ReplayError::UnknownIndex { step }),
                    };
                    if next[object] != locations[object] {
                        return Err(ReplayError::MisplacedObject {
                            step,
                            object: scenario.objects[object].id.clone(),
                        });
                    }
                    if locations.iter().any(|l| *l == Loc::Held { arm }) {
                        return Err(ReplayError::HandsFull { step, arm: arm_name(arm) });
                    }
                    let spec = &scenario.arms[arm];
                    if spec.base.dist(scenario.regions[region].centroid) > spec.reach + 1e-9 {
                        return Err(ReplayError::OutOfReach {
                            step,
                            from: region_name(region),
                            to: arm_name(arm),
                        });
                    }
                    targets[arm] = expected;
                    next[object] = Loc::Held { arm };
                    corridors.push((arm.min(n_arms + region), arm.max(n_arms + region)));
                    touches[arm] += 1;
                    touches[n_arms + region] += 1;
                    transfers[object] += 1;
                }
                GroundedAction::Place { arm, object, region, pose } => {
                    claim(arm, &mut acted)?;
                    let region =
                        region_of(region).ok_or(ReplayError::UnknownIndex { step })?;
                    if locations.get(object) != Some(&Loc::Held { arm }) {
                        return Err(ReplayError::MisplacedObject {
                            step,
                            object: scenario.objects[object].id.clone(),
                        });
                    }
                    let spec = &scenario.arms[arm];
                    let rspec = &scenario.regions[region];
                    if spec.base.dist(rspec.centroid) > spec.reach + 1e-9 {
                        return Err(ReplayError::OutOfReach {
                            step,
                            from: arm_name(arm),
                            to: region_name(region),
                        });
                    }
                    if pose.dist(rspec.centroid) > rspec.extent + 1e-9 {
                        return Err(ReplayError::PoseOutside {
                            step,
                            region: region_name(region),
                        });
                    }
                    targets[arm] = pose;
                    next[object] = Loc::Placed { region, pose };
                    corridors.push((arm.min(n_arms + region), arm.max(n_arms + region)));
                    touches[arm] += 1;
                    touches[n_arms + region] += 1;
                    transfers[object] += 1;
                }
                GroundedAction::Handoff { giver, receiver, object, at } => {
                    claim(giver, &mut acted)?;
                    claim(receiver, &mut acted)?;
                    if locations.get(object) != Some(&Loc::Held { arm: giver }) {
                        return Err(ReplayError::MisplacedObject {
                            step,
                            object: scenario.objects[object].id.clone(),
                        });
                    }
                    if locations.iter().any(|l| *l == Loc::Held { arm: receiver }) {
                        return Err(ReplayError::HandsFull { step, arm: arm_name(receiver) });
                    }
                    let give = &scenario.arms[giver];
                    let recv = &scenario.arms[receiver];
                    if give.base.dist(recv.base) > scenario.handoff_distance + 1e-9 {
                        return Err(ReplayError::OutOfReach {
                            step,
                            from: arm_name(giver),
                            to: arm_name(receiver),
                        });
                    }
                    targets[giver] = at;
                    targets[receiver] = at;
                    next[object] = Loc::Held { arm: receiver };
                    corridors.push((giver.min(receiver), giver.max(receiver)));
                    touches[giver] += 1;
                    touches[receiver] += 1;
                    transfers[object] += 1;
                }
            }
        }

        for i in 0..corridors.len() {
            for j in (i + 1)..corridors.len() {
                if corridors[i] == corridors[j] {
                    let name = |v: usize| {
                        if v < n_arms {
                            arm_name(v)
                        } else {
                            region_name(v - n_arms)
                        }
                    };
                    return Err(ReplayError::CorridorReused {
                        step,
                        a: name(corridors[i].0),
                        b: name(corridors[i].1),
                    });
                }
            }
        }
        for vertex in 0..touches.len() {
            let capacity =
                if vertex < n_arms { 1 } else { scenario.regions[vertex - n_arms].capacity };
            if touches[vertex] > capacity {
                let name = if vertex < n_arms {
                    arm_name(vertex)
                } else {
                    region_name(vertex - n_arms)
                };
                return Err(ReplayError::TooManyTransfers {
                    step,
                    vertex: name,
                    count: touches[vertex],
                    capacity,
                });
            }
        }

        let mut occupancy = vec![0usize; n_regions];
        for loc in &next {
            if let Loc::Placed { region, .. } = *loc {
                occupancy[region] += 1;
            }
        }
        for region in 0..n_regions {
            if occupancy[region] > scenario.regions[region].capacity {
                return Err(ReplayError::OverFull {
                    step,
                    region: region_name(region),
                    count: occupancy[region],
                    capacity: scenario.regions[region].capacity,
                });
            }
        }
        for i in 0..next.len() {
            for j in (i + 1)..next.len() {
                if let (Loc::Placed { pose: a, .. }, Loc::Placed { pose: b, .. }) =
                    (next[i], next[j])
                {
                    if a.dist(b) < scenario.footprint_radius - 1e-12 {
                        return Err(ReplayError::Crowded {
                            step,
                            a: scenario.objects[i].id.clone(),
                            b: scenario.objects[j].id.clone(),
                        });
                    }
                }
            }
        }

        if motion.validate(&arm_pos, &targets).is_none() {
            return Err(ReplayError::MotionInfeasible { step });
        }
        for arm in 0..n_arms {
            lengths[arm] += arm_pos[arm].dist(targets[arm]);
        }
        arm_pos = targets;
        locations = next;
    }

    for (i, object) in scenario.objects.iter().enumerate() {
        let goal = scenario.regions.iter().position(|r| r.id == object.goal_region);
        let ok = match (locations[i], goal) {
            (Loc::Placed { region, pose }, Some(goal_region)) => {
                region == goal_region
                    && pose.dist(scenario.regions[goal_region].centroid)
                        <= scenario.regions[goal_region].extent + 1e-9
            }
            _ => false,
        };
        if !ok {
            return Err(ReplayError::GoalUnmet { object: object.id.clone() });
        }
    }

    Ok(ReplayStats {
        n_steps: steps.len(),
        makespan: lengths.iter().copied().fold(0.0, f64::max),
        per_arm_length: lengths.clone(),
        per_object_transfers: transfers,
    })
}

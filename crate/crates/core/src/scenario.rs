//! Instance files: the scene, the objects, and where they start and belong.
//!
//! A scenario is a plain JSON document that fully determines a benchmark
//! instance, including the sampling seed it was generated from, so files
//! are reproducible artifacts rather than snapshots.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::Point;
use crate::mode_graph::{
    build_mode_graph, validate_state, GraphError, ModeGraph, MultiModalState, Workspace,
};
use crate::planner::{ObjectLocation, TaskState};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ObjectSpec {
    pub id: String,
    pub start_region: String,
    pub start_pose: Point,
    pub goal_region: String,
    pub goal_pose: Point,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Scenario {
    pub family: String,
    pub seed: u64,
    pub arms: Vec<crate::mode_graph::ArmSpec>,
    pub regions: Vec<crate::mode_graph::RegionSpec>,
    pub handoff_distance: f64,
    /// Minimum separation between any two placed objects.
    pub footprint_radius: f64,
    pub objects: Vec<ObjectSpec>,
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("object {object:?} names unknown region {region:?}")]
    UnknownRegion { object: String, region: String },
    #[error("object {object:?} has its {which} pose outside the region")]
    PoseOutsideRegion { object: String, which: &'static str },
    #[error("objects {a:?} and {b:?} overlap at their {which} poses")]
    Crowded { a: String, b: String, which: &'static str },
    #[error("footprint radius must be finite and non-negative")]
    BadFootprint,
    #[error("{which} arrangement exceeds capacity: {violation}")]
    OverFull { which: &'static str, violation: String },
}

impl Scenario {
    /// Canonical instance name: family, arm count, object count, seed.
    pub fn id(&self) -> String {
        format!(
            "{}-r{}-k{}-s{}",
            self.family,
            self.arms.len(),
            self.objects.len(),
            self.seed
        )
    }

    pub fn workspace(&self) -> Workspace {
        Workspace {
            arms: self.arms.clone(),
            regions: self.regions.clone(),
            handoff_distance: self.handoff_distance,
        }
    }

    pub fn load(path: &Path) -> Result<Scenario, ScenarioError> {
        let text = fs::read_to_string(path)?;
        let scenario: Scenario = serde_json::from_str(&text)?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn save(&self, path: &Path) -> Result<(), ScenarioError> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(path, text)?;
        Ok(())
    }

    /// Structural soundness: the graph builds, regions exist, poses lie in
    /// their regions, nothing starts overlapping, and neither arrangement
    /// exceeds capacity.
    pub fn validate(&self) -> Result<ModeGraph, ScenarioError> {
        if !self.footprint_radius.is_finite() || self.footprint_radius < 0.0 {
            return Err(ScenarioError::BadFootprint);
        }
        let g = build_mode_graph(&self.workspace())?;

        for object in &self.objects {
            for (region, pose, which) in [
                (&object.start_region, object.start_pose, "start"),
                (&object.goal_region, object.goal_pose, "goal"),
            ] {
                let Some(spec) = self.regions.iter().find(|r| &r.id == region) else {
                    return Err(ScenarioError::UnknownRegion {
                        object: object.id.clone(),
                        region: region.clone(),
                    });
                };
                if pose.dist(spec.centroid) > spec.extent + 1e-9 {
                    return Err(ScenarioError::PoseOutsideRegion {
                        object: object.id.clone(),
                        which,
                    });
                }
            }
        }
        for which in ["start", "goal"] {
            for i in 0..self.objects.len() {
                for j in (i + 1)..self.objects.len() {
                    let pose = |o: &ObjectSpec| {
                        if which == "start" {
                            o.start_pose
                        } else {
                            o.goal_pose
                        }
                    };
                    if pose(&self.objects[i]).dist(pose(&self.objects[j]))
                        < self.footprint_radius - 1e-12
                    {
                        return Err(ScenarioError::Crowded {
                            a: self.objects[i].id.clone(),
                            b: self.objects[j].id.clone(),
                            which: if which == "start" { "start" } else { "goal" },
                        });
                    }
                }
            }
        }
        for (which, projection) in [
            ("start", self.initial_projection(&g)),
            ("goal", self.goal_projection(&g)),
        ] {
            if let Err(violations) = validate_state(&g, &projection) {
                return Err(ScenarioError::OverFull {
                    which,
                    violation: format!(
                        "{} holds {} with capacity {}",
                        violations[0].vertex_name, violations[0].occupancy, violations[0].capacity
                    ),
                });
            }
        }
        Ok(g)
    }

    pub fn initial_projection(&self, g: &ModeGraph) -> MultiModalState {
        MultiModalState(
            self.objects
                .iter()
                .map(|o| g.vertex_id(&o.start_region).expect("validated"))
                .collect(),
        )
    }

    pub fn goal_projection(&self, g: &ModeGraph) -> MultiModalState {
        MultiModalState(
            self.objects
                .iter()
                .map(|o| g.vertex_id(&o.goal_region).expect("validated"))
                .collect(),
        )
    }

    /// The geometric start: every arm at its base, every object at its
    /// start pose.
    pub fn initial_task_state(&self, g: &ModeGraph) -> TaskState {
        TaskState {
            arm_positions: self.arms.iter().map(|a| a.base).collect(),
            locations: self
                .objects
                .iter()
                .map(|o| ObjectLocation::Placed {
                    region: g.vertex_id(&o.start_region).expect("validated"),
                    pose: o.start_pose,
                })
                .collect(),
        }
    }
}

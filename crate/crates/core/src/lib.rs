//! Synchronized multi-arm object rearrangement.
//!
//! The library models a scene of robot arms and placement regions as an
//! object-centric mode graph, schedules object motions over that graph with
//! an exact discrete solver (cross-checked by a brute-force oracle), turns
//! schedules into per-arm guidance, and grounds everything with a guided
//! sampling-based task planner. A benchmark layer generates scenario
//! families and reports deterministic CSV results; the `armplan` binary
//! exposes all of it on the command line.

pub mod bench;
pub mod fixtures;
pub mod geom;
pub mod guidance;
pub mod ilp;
pub mod mode_graph;
pub mod motion;
pub mod oracle;
pub mod plan_check;
pub mod planner;
pub mod replay;
pub mod scenario;
pub mod solver;
pub mod teg;

//! Canonical miniature workspaces used throughout the test suite and docs.
//!
//! `swap2` is the smallest instance that forces cooperation: two arms, two
//! single-sided tables, and a swap that can only happen through handoffs.
//! `swapbuf` is the smallest instance that forces a buffer placement: two
//! capacity-one pads whose contents must trade places via a third pad.

use crate::geom::Point;
use crate::mode_graph::{ArmSpec, RegionSpec, Workspace};

/// Two arms (L at the origin, R at (2,0), reach 1.2), one table on each
/// outer side (capacity 2), handoffs possible exactly between L and R.
pub fn swap2_workspace() -> Workspace {
    Workspace {
        arms: vec![
            ArmSpec { id: "L".into(), base: Point::xy(0.0, 0.0), reach: 1.2 },
            ArmSpec { id: "R".into(), base: Point::xy(2.0, 0.0), reach: 1.2 },
        ],
        regions: vec![
            RegionSpec { id: "S1".into(), centroid: Point::xy(-0.5, 0.0), capacity: 2, extent: 0.4 },
            RegionSpec { id: "S2".into(), centroid: Point::xy(2.5, 0.0), capacity: 2, extent: 0.4 },
        ],
        handoff_distance: 2.0,
    }
}

/// The swap task on `swap2`: object 0 sits on S1 and wants S2, object 1 the
/// reverse. Arrangements are (start, goal) vertex names indexed by object.
pub fn swap2_swap_task() -> (Vec<&'static str>, Vec<&'static str>) {
    (vec!["S1", "S2"], vec!["S2", "S1"])
}

/// A single object crossing from S1 to S2 on `swap2`.
pub fn swap2_single_task() -> (Vec<&'static str>, Vec<&'static str>) {
    (vec!["S1"], vec!["S2"])
}

/// Two arms and three capacity-one pads; P1 and P2 are each reachable by one
/// arm only, the buffer pad Bf by both.
pub fn swapbuf_workspace() -> Workspace {
    Workspace {
        arms: vec![
            ArmSpec { id: "L".into(), base: Point::xy(0.0, 0.0), reach: 1.5 },
            ArmSpec { id: "R".into(), base: Point::xy(2.0, 0.0), reach: 1.5 },
        ],
        regions: vec![
            RegionSpec { id: "P1".into(), centroid: Point::xy(0.0, 1.0), capacity: 1, extent: 0.0 },
            RegionSpec { id: "P2".into(), centroid: Point::xy(2.0, 1.0), capacity: 1, extent: 0.0 },
            RegionSpec { id: "Bf".into(), centroid: Point::xy(1.0, 1.0), capacity: 1, extent: 0.0 },
        ],
        handoff_distance: 2.0,
    }
}

/// The swap task on `swapbuf`: the pads' contents must trade places, which
/// is impossible without parking one object on the buffer.
pub fn swapbuf_swap_task() -> (Vec<&'static str>, Vec<&'static str>) {
    (vec!["P1", "P2"], vec!["P2", "P1"])
}

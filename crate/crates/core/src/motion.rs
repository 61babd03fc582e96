//! Motion feasibility for synchronized straight-line arm motions.
//!
//! Every arm moves its tool point in a straight line during a step, all
//! arms in lockstep over the same unit time interval. The free-space model
//! accepts everything; the interference model additionally requires every
//! pair of arms to keep a minimum separation throughout the motion, which
//! in particular rejects handoffs that bring two tool points together.

use crate::geom::Point;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MotionModel {
    /// Arms never collide; cost is per-arm path length.
    FreeSpace,
    /// Straight-line sweeps must keep every arm pair at least `d_min`
    /// apart at every instant.
    Interference { d_min: f64 },
}

impl MotionModel {
    /// Validates one synchronized motion and returns per-arm path lengths,
    /// or `None` when the motion is infeasible under this model.
    pub fn validate(&self, from: &[Point], to: &[Point]) -> Option<Vec<f64>> {
        debug_assert_eq!(from.len(), to.len());
        if let MotionModel::Interference { d_min } = *self {
            for i in 0..from.len() {
                for j in (i + 1)..from.len() {
                    if min_pair_distance(from[i], to[i], from[j], to[j]) < d_min {
                        return None;
                    }
                }
            }
        }
        Some(from.iter().zip(to).map(|(a, b)| a.dist(*b)).collect())
    }
}

/// Minimum distance between two points moving linearly over the same unit
/// interval. The squared distance is a quadratic in time, so the minimum is
/// at an endpoint or at the single interior stationary point.
fn min_pair_distance(from_a: Point, to_a: Point, from_b: Point, to_b: Point) -> f64 {
    let a = from_a - from_b;
    let b = (to_a - from_a) - (to_b - from_b);
    let bb = b.dot(b);
    let s = if bb > 0.0 { (-a.dot(b) / bb).clamp(0.0, 1.0) } else { 0.0 };
    (a + b * s).norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point {
        Point::xy(x, y)
    }

    #[test]
    fn free_space_reports_path_lengths() {
        let costs = MotionModel::FreeSpace
            .validate(&[p(0.0, 0.0), p(1.0, 0.0)], &[p(3.0, 4.0), p(1.0, 0.0)])
            .unwrap();
        assert_eq!(costs, vec![5.0, 0.0]);
    }

    #[test]
    fn crossing_sweeps_interfere() {
        let m = MotionModel::Interference { d_min: 0.2 };
        // The arms trade places along the same line and meet halfway.
        assert!(m.validate(&[p(0.0, 0.0), p(2.0, 0.0)], &[p(2.0, 0.0), p(0.0, 0.0)]).is_none());
        // Same exchange with one metre of lateral offset stays clear.
        let costs =
            m.validate(&[p(0.0, 0.0), p(2.0, 1.0)], &[p(2.0, 0.0), p(0.0, 1.0)]).unwrap();
        assert!((costs[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn handoff_meeting_points_are_rejected() {
        let m = MotionModel::Interference { d_min: 0.05 };
        let meet = p(1.0, 0.0);
        assert!(m.validate(&[p(0.0, 0.0), p(2.0, 0.0)], &[meet, meet]).is_none());
        assert!(MotionModel::FreeSpace.validate(&[p(0.0, 0.0), p(2.0, 0.0)], &[meet, meet]).is_some());
    }

    #[test]
    fn interior_minimum_matches_dense_sampling() {
        let cases = [
            (p(0.0, 0.0), p(4.0, 1.0), p(3.0, -2.0), p(1.0, 2.0)),
            (p(-1.0, 0.5), p(2.0, 2.0), p(0.0, 3.0), p(0.5, -1.0)),
            (p(0.0, 0.0), p(0.0, 0.0), p(1.0, 1.0), p(-1.0, 1.0)),
        ];
        for (fa, ta, fb, tb) in cases {
            let exact = min_pair_distance(fa, ta, fb, tb);
            let sampled = (0..=1000)
                .map(|i| {
                    let s = i as f64 / 1000.0;
                    fa.lerp(ta, s).dist(fb.lerp(tb, s))
                })
                .fold(f64::INFINITY, f64::min);
            assert!(exact <= sampled + 1e-9);
            assert!(exact >= sampled - 1e-3);
        }
    }
}

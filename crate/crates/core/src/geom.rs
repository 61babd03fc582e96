//! Small Euclidean helpers shared across the library.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use serde::de::{SeqAccess, Visitor};
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A workspace point. Planar inputs leave `z` at zero; every computation is
/// plain Euclidean, so nothing downstream cares whether the input was 2-D or 3-D.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0, z: 0.0 };

    pub fn xy(x: f64, y: f64) -> Self {
        Point { x, y, z: 0.0 }
    }

    pub fn xyz(x: f64, y: f64, z: f64) -> Self {
        Point { x, y, z }
    }

    pub fn dist(self, other: Point) -> f64 {
        (self - other).norm()
    }

    pub fn midpoint(self, other: Point) -> Point {
        Point {
            x: (self.x + other.x) / 2.0,
            y: (self.y + other.y) / 2.0,
            z: (self.z + other.z) / 2.0,
        }
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    /// Linear interpolation from `self` to `other` at parameter `s` in [0, 1].
    pub fn lerp(self, other: Point, s: f64) -> Point {
        self + (other - self) * s
    }

    pub fn is_planar(self) -> bool {
        self.z == 0.0
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point { x: self.x + rhs.x, y: self.y + rhs.y, z: self.z + rhs.z }
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point { x: self.x - rhs.x, y: self.y - rhs.y, z: self.z - rhs.z }
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, rhs: f64) -> Point {
        Point { x: self.x * rhs, y: self.y * rhs, z: self.z * rhs }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_planar() {
            write!(f, "({:.3},{:.3})", self.x, self.y)
        } else {
            write!(f, "({:.3},{:.3},{:.3})", self.x, self.y, self.z)
        }
    }
}

// Points travel through files as `[x, y]` (or `[x, y, z]` when the third
// coordinate is meaningful), matching the scenario schema.
impl Serialize for Point {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let len = if self.is_planar() { 2 } else { 3 };
        let mut seq = serializer.serialize_seq(Some(len))?;
        seq.serialize_element(&self.x)?;
        seq.serialize_element(&self.y)?;
        if !self.is_planar() {
            seq.serialize_element(&self.z)?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct PointVisitor;
        impl<'de> Visitor<'de> for PointVisitor {
            type Value = Point;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a coordinate array [x, y] or [x, y, z]")
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Point, A::Error> {
                let x: f64 = seq
                    .next_element()?
                    .ok_or_else(|| serde::de::Error::invalid_length(0, &self))?;
                let y: f64 = seq
                    .next_element()?
                    .ok_or_else(|| serde::de::Error::invalid_length(1, &self))?;
                let z: f64 = seq.next_element()?.unwrap_or(0.0);
                if seq.next_element::<f64>()?.is_some() {
                    return Err(serde::de::Error::invalid_length(4, &self));
                }
                Ok(Point { x, y, z })
            }
        }
        deserializer.deserialize_seq(PointVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_is_euclidean() {
        assert_eq!(Point::xy(0.0, 0.0).dist(Point::xy(3.0, 4.0)), 5.0);
        assert_eq!(Point::xyz(1.0, 2.0, 2.0).dist(Point::ORIGIN), 3.0);
    }

    #[test]
    fn planar_points_serialize_as_pairs() {
        let p = Point::xy(-0.5, 0.0);
        assert_eq!(serde_json::to_string(&p).unwrap(), "[-0.5,0.0]");
        let q = Point::xyz(1.0, 2.0, 3.0);
        assert_eq!(serde_json::to_string(&q).unwrap(), "[1.0,2.0,3.0]");
    }

    #[test]
    fn deserializes_two_or_three_coordinates() {
        let p: Point = serde_json::from_str("[1.5, 2.5]").unwrap();
        assert_eq!(p, Point::xy(1.5, 2.5));
        let q: Point = serde_json::from_str("[1.0, 2.0, 3.0]").unwrap();
        assert_eq!(q, Point::xyz(1.0, 2.0, 3.0));
        assert!(serde_json::from_str::<Point>("[1.0]").is_err());
        assert!(serde_json::from_str::<Point>("[1.0,2.0,3.0,4.0]").is_err());
    }
}

//! Geometric primitives shared by every other module: points, poses,
//! point clouds, occupancy grids, and raster buffers.
//!
//! World frame: meters, Z up. Headings are radians measured
//! counterclockwise from world +X in the XY plane, normalized to [0, 2π).

mod grid;
mod ply;
mod raster;
mod transform;

pub use grid::{point_in_region, CellMask, CellState, OccupancyGrid};
pub use ply::{load_point_cloud, save_point_cloud, PlyFormat};
pub use raster::RasterImage;
pub use transform::{map_to_world, round_half_away, world_to_map};

use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use thiserror::Error;

/// Errors from point-cloud loading and geometric construction.
#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("FormatError: {0}")]
    Format(String),
    #[error("EmptyInput: point cloud has no vertices")]
    EmptyInput,
    #[error("IoError: {0}")]
    Io(#[from] std::io::Error),
}

/// A point in the world frame, meters, Z up.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// 3-D Euclidean distance.
    pub fn distance(&self, other: &Point3) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        (dx * dx + dy * dy + dz * dz).sqrt()
    }

    /// Euclidean distance in the XY plane only.
    pub fn distance_xy(&self, other: &Point3) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        (dx * dx + dy * dy).sqrt()
    }
}

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: Point3,
    pub max: Point3,
}

impl Aabb {
    /// Bounds of a non-empty point set.
    pub fn from_points(points: &[Point3]) -> Option<Aabb> {
        let first = points.first()?;
        let mut min = *first;
        let mut max = *first;
        for p in &points[1..] {
            min.x = min.x.min(p.x);
            min.y = min.y.min(p.y);
            min.z = min.z.min(p.z);
            max.x = max.x.max(p.x);
            max.y = max.y.max(p.y);
            max.z = max.z.max(p.z);
        }
        Some(Aabb { min, max })
    }
}

/// Agent pose: position plus heading (CCW from +X, normalized to [0, 2π)).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub position: Point3,
    heading: f64,
}

impl Pose {
    pub fn new(position: Point3, heading: f64) -> Self {
        Self {
            position,
            heading: normalize_heading(heading),
        }
    }

    pub fn heading(&self) -> f64 {
        self.heading
    }
}

/// Wrap an angle into [0, 2π).
pub fn normalize_heading(heading: f64) -> f64 {
    let h = heading.rem_euclid(TAU);
    // rem_euclid can return exactly TAU when the input is a tiny negative.
    if h >= TAU {
        0.0
    } else {
        h
    }
}

/// An immutable point cloud with cached bounds and optional per-point RGB.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: Vec<Point3>,
    colors: Option<Vec<[u8; 3]>>,
    bounds: Aabb,
}

impl PointCloud {
    /// Build a cloud, computing bounds. Colors, when given, must pair with
    /// points one-to-one.
    pub fn new(points: Vec<Point3>, colors: Option<Vec<[u8; 3]>>) -> Result<Self, GeometryError> {
        if points.is_empty() {
            return Err(GeometryError::EmptyInput);
        }
        if let Some(p) = points.iter().find(|p| !p.is_finite()) {
            return Err(GeometryError::Format(format!(
                "non-finite coordinate ({}, {}, {})",
                p.x, p.y, p.z
            )));
        }
        if let Some(c) = &colors {
            if c.len() != points.len() {
                return Err(GeometryError::Format(format!(
                    "{} colors for {} points",
                    c.len(),
                    points.len()
                )));
            }
        }
        let bounds = Aabb::from_points(&points).expect("non-empty");
        Ok(Self {
            points,
            colors,
            bounds,
        })
    }

    pub fn points(&self) -> &[Point3] {
        &self.points
    }

    pub fn colors(&self) -> Option<&[[u8; 3]]> {
        self.colors.as_deref()
    }

    pub fn bounds(&self) -> Aabb {
        self.bounds
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn heading_normalized_into_unit_circle() {
        assert_eq!(Pose::new(Point3::new(0.0, 0.0, 0.0), -PI).heading(), PI);
        assert_eq!(Pose::new(Point3::new(0.0, 0.0, 0.0), TAU).heading(), 0.0);
        let h = Pose::new(Point3::new(0.0, 0.0, 0.0), 7.0 * PI).heading();
        assert!((h - PI).abs() < 1e-12);
        assert!(normalize_heading(-1e-300) < TAU);
    }

    #[test]
    fn cloud_bounds_cover_extremes() {
        let cloud = PointCloud::new(
            vec![
                Point3::new(0.0, 0.0, 0.0),
                Point3::new(1.0, 0.0, 0.0),
                Point3::new(0.0, 1.0, 2.0),
            ],
            None,
        )
        .unwrap();
        assert_eq!(cloud.bounds().min.z, 0.0);
        assert_eq!(cloud.bounds().max.z, 2.0);
        assert_eq!(cloud.len(), 3);
    }

    #[test]
    fn empty_cloud_rejected() {
        assert!(matches!(
            PointCloud::new(vec![], None),
            Err(GeometryError::EmptyInput)
        ));
    }

    #[test]
    fn mismatched_colors_rejected() {
        let r = PointCloud::new(vec![Point3::new(0.0, 0.0, 0.0)], Some(vec![]));
        assert!(matches!(r, Err(GeometryError::Format(_))));
    }
}

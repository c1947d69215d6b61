//! Spatial scene graph construction: floor segmentation from height
//! histograms, per-floor occupancy grids, room partitioning, annotation
//! ingestion, and assembly into the hierarchical floor -> room -> object
//! graph with containment edges.

mod annotations;
mod floors;
mod io;
mod occupancy;
mod rooms;

pub use annotations::{ingest_annotations, IngestOutcome, ANNOTATION_SCHEMA_VERSION};
pub use floors::segment_floors;
pub use io::{load_ssg, save_ssg, SSG_SCHEMA_VERSION};
pub use occupancy::build_occupancy;
pub use rooms::segment_rooms;

use crate::geometry::{point_in_region, CellMask, GeometryError, OccupancyGrid, Point3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Extra headroom above a floor surface that still counts as "on that
/// floor". Agents and object centers sit above the slab base.
pub const STANDING_HEADROOM_M: f64 = 2.0;

/// Errors from scene-graph construction and (de)serialization.
#[derive(Debug, Error)]
pub enum BuildError {
    #[error("EmptyInput: {0}")]
    EmptyInput(&'static str),
    #[error("NoFloorFound: no histogram bin passes the peak fraction")]
    NoFloorFound,
    #[error("NoFreeSpace: occupancy grid has no free cells")]
    NoFreeSpace,
    #[error("SchemaError: {0}")]
    Schema(String),
    #[error("VersionMismatch: file declares schema_version {found}, expected {expected}")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("DanglingReference: {0}")]
    DanglingReference(String),
    #[error("InvalidParams: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("IoError: {0}")]
    Io(#[from] std::io::Error),
}

/// Knobs for the floor/occupancy/room segmentation pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentationParams {
    /// Height-histogram bin width, meters.
    pub histogram_bin: f64,
    /// DBSCAN epsilon over 1-D peak heights, meters.
    pub dbscan_eps: f64,
    /// DBSCAN minimum neighborhood size (self included).
    pub dbscan_min_pts: usize,
    /// A histogram bin qualifies as a floor peak only when it holds at
    /// least this fraction of all points.
    pub peak_fraction: f64,
    /// Occupancy-grid cell size, meters.
    pub grid_resolution: f64,
    /// Height band above the floor surface counted as wall evidence, meters.
    pub wall_band: (f64, f64),
    /// Points per cell inside the wall band required to mark a Wall.
    pub wall_point_threshold: usize,
    /// Regions smaller than this merge into their longest-boundary neighbor, m².
    pub min_room_area: f64,
    /// Regions larger than this get flagged for manual review, m².
    pub review_area: f64,
}

impl Default for SegmentationParams {
    fn default() -> Self {
        Self {
            histogram_bin: 0.05,
            dbscan_eps: 0.30,
            dbscan_min_pts: 1,
            peak_fraction: 0.10,
            grid_resolution: 0.05,
            wall_band: (0.5, 1.8),
            wall_point_threshold: 5,
            min_room_area: 2.0,
            review_area: 20.0,
        }
    }
}

impl SegmentationParams {
    pub fn validate(&self) -> Result<(), BuildError> {
        let positive = [
            ("histogram_bin", self.histogram_bin),
            ("dbscan_eps", self.dbscan_eps),
            ("peak_fraction", self.peak_fraction),
            ("grid_resolution", self.grid_resolution),
            ("wall_band.0", self.wall_band.0),
            ("wall_band.1", self.wall_band.1),
            ("min_room_area", self.min_room_area),
            ("review_area", self.review_area),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(BuildError::InvalidParams(format!(
                    "{name} must be strictly positive, got {v}"
                )));
            }
        }
        if self.dbscan_min_pts == 0 {
            return Err(BuildError::InvalidParams(
                "dbscan_min_pts must be at least 1".into(),
            ));
        }
        if self.wall_band.0 >= self.wall_band.1 {
            return Err(BuildError::InvalidParams(format!(
                "wall_band lower {} must be below upper {}",
                self.wall_band.0, self.wall_band.1
            )));
        }
        Ok(())
    }
}

/// One floor of the building: a horizontal slab between surface heights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FloorSlab {
    /// 0-based, counted from the lowest floor.
    pub index: usize,
    pub z_base: f64,
    pub z_ceiling: f64,
    /// Points attributed to this floor's surface peak.
    pub support_count: usize,
}

impl FloorSlab {
    pub fn contains_z(&self, z: f64) -> bool {
        z >= self.z_base && z < self.z_ceiling
    }
}

/// The floor owning height `z`: direct slab containment wins, then a slab
/// whose base lies within [`STANDING_HEADROOM_M`] below `z`. Higher floors
/// take precedence in the fallback.
pub fn floor_for_z(floors: &[FloorSlab], z: f64) -> Option<usize> {
    if let Some(f) = floors.iter().rev().find(|f| f.contains_z(z)) {
        return Some(f.index);
    }
    floors
        .iter()
        .rev()
        .find(|f| z >= f.z_base && z < f.z_base + STANDING_HEADROOM_M)
        .map(|f| f.index)
}

/// A room: a connected mask of free cells on one floor's grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoomRegion {
    pub id: String,
    pub floor_index: usize,
    pub mask: CellMask,
    /// `|mask| * resolution^2`, m².
    pub area: f64,
    /// Mean of member cell centers, world XY.
    pub centroid: (f64, f64),
    pub category: Option<String>,
    /// Set when the area exceeds the review threshold.
    pub review_flag: bool,
}

/// An oriented box with a semantic label, optionally contained in a room.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneObject {
    pub id: String,
    pub room_id: Option<String>,
    pub category: String,
    pub center: Point3,
    /// Box extents (dx, dy, dz), meters.
    pub size: (f64, f64, f64),
    /// Radians, CCW from +X.
    pub heading: f64,
}

/// Containment edge of the hierarchy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContainmentEdge {
    FloorRoom { floor_index: usize, room_id: String },
    RoomObject { room_id: String, object_id: String },
}

/// The hierarchical floors -> rooms -> objects graph plus per-floor grids.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialSceneGraph {
    floors: Vec<FloorSlab>,
    grids: Vec<OccupancyGrid>,
    rooms: Vec<RoomRegion>,
    objects: Vec<SceneObject>,
    edges: Vec<ContainmentEdge>,
    /// Object ids whose center hit no room mask, bucketed per floor.
    unassigned: Vec<Vec<String>>,
}

impl SpatialSceneGraph {
    pub fn floors(&self) -> &[FloorSlab] {
        &self.floors
    }

    pub fn grids(&self) -> &[OccupancyGrid] {
        &self.grids
    }

    pub fn grid(&self, floor_index: usize) -> &OccupancyGrid {
        &self.grids[floor_index]
    }

    pub fn rooms(&self) -> &[RoomRegion] {
        &self.rooms
    }

    pub fn objects(&self) -> &[SceneObject] {
        &self.objects
    }

    pub fn edges(&self) -> &[ContainmentEdge] {
        &self.edges
    }

    pub fn unassigned(&self) -> &[Vec<String>] {
        &self.unassigned
    }

    pub fn room(&self, id: &str) -> Option<&RoomRegion> {
        self.rooms.iter().find(|r| r.id == id)
    }

    /// Rooms of one floor, in stored (id-assignment) order.
    pub fn rooms_on_floor(&self, floor_index: usize) -> impl Iterator<Item = &RoomRegion> {
        self.rooms.iter().filter(move |r| r.floor_index == floor_index)
    }

    /// Objects assigned to one room, in stored order.
    pub fn objects_in_room<'a>(&'a self, room_id: &'a str) -> impl Iterator<Item = &'a SceneObject> {
        self.objects
            .iter()
            .filter(move |o| o.room_id.as_deref() == Some(room_id))
    }
}

/// Assemble and validate the graph from the pipeline stages' outputs.
///
/// Containment edges are derived: one floor->room edge per room, one
/// room->object edge per assigned object. Objects without a room land in
/// their floor's unassigned bucket (floor resolved by center height,
/// nearest slab when out of every slab).
pub fn assemble_ssg(
    floors: Vec<FloorSlab>,
    grids: Vec<OccupancyGrid>,
    rooms: Vec<RoomRegion>,
    objects: Vec<SceneObject>,
) -> Result<SpatialSceneGraph, BuildError> {
    if floors.is_empty() {
        return Err(BuildError::EmptyInput("graph needs at least one floor"));
    }
    if grids.len() != floors.len() {
        return Err(BuildError::DanglingReference(format!(
            "{} grids for {} floors",
            grids.len(),
            floors.len()
        )));
    }

    let mut edges = Vec::new();
    for room in &rooms {
        edges.push(ContainmentEdge::FloorRoom {
            floor_index: room.floor_index,
            room_id: room.id.clone(),
        });
    }
    let mut unassigned: Vec<Vec<String>> = vec![Vec::new(); floors.len()];
    for obj in &objects {
        match &obj.room_id {
            Some(room_id) => edges.push(ContainmentEdge::RoomObject {
                room_id: room_id.clone(),
                object_id: obj.id.clone(),
            }),
            None => {
                let floor = floor_for_z(&floors, obj.center.z).unwrap_or_else(|| {
                    nearest_floor_by_base(&floors, obj.center.z)
                });
                unassigned[floor].push(obj.id.clone());
            }
        }
    }

    let graph = SpatialSceneGraph {
        floors,
        grids,
        rooms,
        objects,
        edges,
        unassigned,
    };
    graph.validate()?;
    Ok(graph)
}

fn nearest_floor_by_base(floors: &[FloorSlab], z: f64) -> usize {
    floors
        .iter()
        .min_by(|a, b| {
            let da = (z - a.z_base).abs();
            let db = (z - b.z_base).abs();
            da.total_cmp(&db)
        })
        .map(|f| f.index)
        .expect("floors non-empty")
}

impl SpatialSceneGraph {
    /// Rebuild from parts already carrying edges and buckets (used by the
    /// loader); validates every graph invariant.
    pub(crate) fn from_parts(
        floors: Vec<FloorSlab>,
        grids: Vec<OccupancyGrid>,
        rooms: Vec<RoomRegion>,
        objects: Vec<SceneObject>,
        edges: Vec<ContainmentEdge>,
        unassigned: Vec<Vec<String>>,
    ) -> Result<Self, BuildError> {
        let graph = Self {
            floors,
            grids,
            rooms,
            objects,
            edges,
            unassigned,
        };
        graph.validate()?;
        Ok(graph)
    }

    fn validate(&self) -> Result<(), BuildError> {
        // Floors: indexed contiguously, ordered, non-overlapping.
        for (i, f) in self.floors.iter().enumerate() {
            if f.index != i {
                return Err(BuildError::DanglingReference(format!(
                    "floor at position {i} carries index {}",
                    f.index
                )));
            }
            if !(f.z_base < f.z_ceiling) {
                return Err(BuildError::Schema(format!(
                    "floor {i} has z_base {} >= z_ceiling {}",
                    f.z_base, f.z_ceiling
                )));
            }
            if i > 0 && self.floors[i - 1].z_ceiling > f.z_base {
                return Err(BuildError::Schema(format!(
                    "floor {i} overlaps the slab below"
                )));
            }
        }
        if self.grids.len() != self.floors.len() || self.unassigned.len() != self.floors.len() {
            return Err(BuildError::DanglingReference(
                "per-floor tables must match floor count".into(),
            ));
        }

        // Rooms: valid floor, in-bounds connected mask, disjoint per floor.
        for room in &self.rooms {
            if room.floor_index >= self.floors.len() {
                return Err(BuildError::DanglingReference(format!(
                    "room {} cites floor {} of {}",
                    room.id,
                    room.floor_index,
                    self.floors.len()
                )));
            }
            if room.mask.is_empty() || !room.mask.is_connected() {
                return Err(BuildError::Schema(format!(
                    "room {} mask must be non-empty and 4-connected",
                    room.id
                )));
            }
            let grid = &self.grids[room.floor_index];
            if room.mask.iter().any(|(r, c)| !grid.contains_cell(r, c)) {
                return Err(BuildError::Schema(format!(
                    "room {} mask exceeds its grid",
                    room.id
                )));
            }
        }
        for i in 0..self.rooms.len() {
            if self.rooms.iter().filter(|r| r.id == self.rooms[i].id).count() > 1 {
                return Err(BuildError::Schema(format!(
                    "duplicate room id {}",
                    self.rooms[i].id
                )));
            }
            for j in i + 1..self.rooms.len() {
                let (a, b) = (&self.rooms[i], &self.rooms[j]);
                if a.floor_index == b.floor_index && a.mask.intersects(&b.mask) {
                    return Err(BuildError::Schema(format!(
                        "rooms {} and {} overlap on floor {}",
                        a.id, b.id, a.floor_index
                    )));
                }
            }
        }

        // Objects: assigned centers must sit inside their room.
        for obj in &self.objects {
            if !(obj.size.0 > 0.0 && obj.size.1 > 0.0 && obj.size.2 > 0.0) {
                return Err(BuildError::Schema(format!(
                    "object {} has non-positive size",
                    obj.id
                )));
            }
            if let Some(room_id) = &obj.room_id {
                let room = self.room(room_id).ok_or_else(|| {
                    BuildError::DanglingReference(format!(
                        "object {} cites missing room {room_id}",
                        obj.id
                    ))
                })?;
                let grid = &self.grids[room.floor_index];
                if !point_in_region(grid, &room.mask, (obj.center.x, obj.center.y)) {
                    return Err(BuildError::Schema(format!(
                        "object {} center is outside room {room_id}",
                        obj.id
                    )));
                }
                if floor_for_z(&self.floors, obj.center.z) != Some(room.floor_index) {
                    return Err(BuildError::Schema(format!(
                        "object {} height does not match floor {}",
                        obj.id, room.floor_index
                    )));
                }
            }
        }

        // Edges: exactly the containment relation.
        let mut expected = Vec::new();
        for room in &self.rooms {
            expected.push(ContainmentEdge::FloorRoom {
                floor_index: room.floor_index,
                room_id: room.id.clone(),
            });
        }
        for obj in &self.objects {
            if let Some(room_id) = &obj.room_id {
                expected.push(ContainmentEdge::RoomObject {
                    room_id: room_id.clone(),
                    object_id: obj.id.clone(),
                });
            }
        }
        if self.edges != expected {
            return Err(BuildError::DanglingReference(
                "edges do not match the containment relation".into(),
            ));
        }

        // Buckets: unassigned objects exist and have no room.
        for (floor, bucket) in self.unassigned.iter().enumerate() {
            for id in bucket {
                let obj = self.objects.iter().find(|o| &o.id == id).ok_or_else(|| {
                    BuildError::DanglingReference(format!(
                        "unassigned bucket of floor {floor} cites missing object {id}"
                    ))
                })?;
                if obj.room_id.is_some() {
                    return Err(BuildError::Schema(format!(
                        "object {id} is both assigned and bucketed"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::CellState;

    fn flat_grid(width: usize, height: usize) -> OccupancyGrid {
        let cells = vec![CellState::Free; width * height];
        OccupancyGrid::from_cells((0.0, 0.0), 0.05, width, height, cells)
    }

    fn room(id: &str, floor: usize, r0: usize, c0: usize, side: usize) -> RoomRegion {
        let mask: CellMask = (r0..r0 + side)
            .flat_map(|r| (c0..c0 + side).map(move |c| (r, c)))
            .collect();
        let area = mask.len() as f64 * 0.05 * 0.05;
        RoomRegion {
            id: id.into(),
            floor_index: floor,
            area,
            centroid: (
                (c0 as f64 + side as f64 / 2.0) * 0.05,
                (r0 as f64 + side as f64 / 2.0) * 0.05,
            ),
            mask,
            category: None,
            review_flag: area > 20.0,
        }
    }

    fn object(id: &str, room_id: Option<&str>, center: Point3) -> SceneObject {
        SceneObject {
            id: id.into(),
            room_id: room_id.map(String::from),
            category: "chair".into(),
            center,
            size: (0.5, 0.5, 0.9),
            heading: 0.0,
        }
    }

    fn two_floor_fixture() -> (Vec<FloorSlab>, Vec<OccupancyGrid>) {
        let floors = vec![
            FloorSlab {
                index: 0,
                z_base: 0.0,
                z_ceiling: 2.95,
                support_count: 100,
            },
            FloorSlab {
                index: 1,
                z_base: 3.0,
                z_ceiling: 5.5,
                support_count: 100,
            },
        ];
        let grids = vec![flat_grid(100, 100), flat_grid(100, 100)];
        (floors, grids)
    }

    #[test]
    fn node_and_edge_counts_match_children() {
        let (floors, grids) = two_floor_fixture();
        let rooms = vec![
            room("f0-r0", 0, 0, 0, 40),
            room("f0-r1", 0, 0, 50, 40),
            room("f1-r0", 1, 10, 10, 40),
        ];
        let objects = vec![
            object("o0", Some("f0-r0"), Point3::new(0.5, 0.5, 0.4)),
            object("o1", Some("f0-r0"), Point3::new(1.0, 0.8, 0.2)),
            object("o2", Some("f0-r1"), Point3::new(3.0, 0.5, 0.7)),
            object("o3", Some("f1-r0"), Point3::new(1.0, 1.0, 3.4)),
            object("o4", Some("f1-r0"), Point3::new(1.5, 1.2, 3.2)),
        ];
        let g = assemble_ssg(floors, grids, rooms, objects).unwrap();
        assert_eq!(g.floors().len() + g.rooms().len() + g.objects().len(), 10);
        assert_eq!(g.edges().len(), 3 + 5);
    }

    #[test]
    fn dangling_floor_reference_rejected() {
        let (floors, grids) = two_floor_fixture();
        let rooms = vec![room("f7-r0", 7, 0, 0, 10)];
        let err = assemble_ssg(floors, grids, rooms, vec![]).unwrap_err();
        assert!(matches!(err, BuildError::DanglingReference(_)));
    }

    #[test]
    fn empty_object_list_is_valid() {
        let (floors, grids) = two_floor_fixture();
        let g = assemble_ssg(floors, grids, vec![room("f0-r0", 0, 0, 0, 10)], vec![]).unwrap();
        assert_eq!(g.edges().len(), 1);
        assert!(g.unassigned().iter().all(|b| b.is_empty()));
    }

    #[test]
    fn unassigned_object_lands_in_floor_bucket() {
        let (floors, grids) = two_floor_fixture();
        let objects = vec![
            object("low", None, Point3::new(0.2, 0.2, 0.4)),
            object("high", None, Point3::new(0.2, 0.2, 3.4)),
        ];
        let g = assemble_ssg(floors, grids, vec![], objects).unwrap();
        assert_eq!(g.unassigned()[0], vec!["low".to_string()]);
        assert_eq!(g.unassigned()[1], vec!["high".to_string()]);
    }

    #[test]
    fn overlapping_rooms_rejected() {
        let (floors, grids) = two_floor_fixture();
        let rooms = vec![room("a", 0, 0, 0, 20), room("b", 0, 10, 10, 20)];
        assert!(assemble_ssg(floors, grids, rooms, vec![]).is_err());
    }

    #[test]
    fn floor_for_z_prefers_containment_then_headroom() {
        let (floors, _) = two_floor_fixture();
        assert_eq!(floor_for_z(&floors, 1.0), Some(0));
        assert_eq!(floor_for_z(&floors, 3.5), Some(1));
        assert_eq!(floor_for_z(&floors, 100.0), None);
        assert_eq!(floor_for_z(&floors, -0.5), None);

        // Headroom only matters for slabs shorter than the standing margin:
        // an agent stands above a top slab whose ceiling hugs the cloud max.
        let short_top = vec![
            FloorSlab {
                index: 0,
                z_base: 0.0,
                z_ceiling: 2.95,
                support_count: 1,
            },
            FloorSlab {
                index: 1,
                z_base: 3.0,
                z_ceiling: 3.6,
                support_count: 1,
            },
        ];
        assert_eq!(floor_for_z(&short_top, 3.8), Some(1));
        assert_eq!(floor_for_z(&short_top, 5.2), None);
    }
}

//! Ingestion of semantic annotations: room category labels anchored at
//! world points, and labeled object boxes assigned to rooms by their
//! center coordinates.

use super::{floor_for_z, BuildError, FloorSlab, RoomRegion, SceneObject};
use crate::geometry::{normalize_heading, point_in_region, OccupancyGrid, Point3};
use serde::Deserialize;
use std::path::Path;

pub const ANNOTATION_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Deserialize)]
struct AnnotationFile {
    schema_version: u32,
    #[serde(default)]
    room_labels: Vec<RoomLabelRecord>,
    #[serde(default)]
    objects: Vec<ObjectRecord>,
}

#[derive(Debug, Deserialize)]
struct RoomLabelRecord {
    anchor: [f64; 3],
    category: String,
}

#[derive(Debug, Deserialize)]
struct ObjectRecord {
    category: String,
    center: [f64; 3],
    size: [f64; 3],
    #[serde(default)]
    heading: f64,
}

/// Result of annotation ingestion. Anchors that land in no room are
/// warnings, not failures.
#[derive(Debug)]
pub struct IngestOutcome {
    pub objects: Vec<SceneObject>,
    pub warnings: Vec<String>,
}

/// Apply an annotation file: room-label records set `category` on the room
/// containing their anchor; object records become [`SceneObject`]s placed
/// by their center (floor by height, room by XY). Unknown categories pass
/// through verbatim.
pub fn ingest_annotations(
    rooms: &mut [RoomRegion],
    floors: &[FloorSlab],
    grids: &[OccupancyGrid],
    path: impl AsRef<Path>,
) -> Result<IngestOutcome, BuildError> {
    let text = std::fs::read_to_string(path)?;
    let file: AnnotationFile =
        serde_json::from_str(&text).map_err(|e| BuildError::Schema(e.to_string()))?;
    if file.schema_version != ANNOTATION_SCHEMA_VERSION {
        return Err(BuildError::Schema(format!(
            "annotation schema_version {} unsupported (expected {})",
            file.schema_version, ANNOTATION_SCHEMA_VERSION
        )));
    }

    let mut warnings = Vec::new();

    let locate_room =
        |rooms: &[RoomRegion], x: f64, y: f64, z: f64| -> Option<usize> {
            let floor = floor_for_z(floors, z)?;
            rooms
                .iter()
                .position(|r| r.floor_index == floor && point_in_region(&grids[floor], &r.mask, (x, y)))
        };

    for (i, label) in file.room_labels.iter().enumerate() {
        let [x, y, z] = label.anchor;
        match locate_room(rooms, x, y, z) {
            Some(idx) => rooms[idx].category = Some(label.category.clone()),
            None => warnings.push(format!(
                "AnchorNotFound: room_labels[{i}] anchor ({x}, {y}, {z}) lies in no room"
            )),
        }
    }

    let mut objects = Vec::with_capacity(file.objects.len());
    for (i, rec) in file.objects.iter().enumerate() {
        let [dx, dy, dz] = rec.size;
        if !(dx > 0.0 && dy > 0.0 && dz > 0.0) {
            return Err(BuildError::Schema(format!(
                "objects[{i}] size must be strictly positive"
            )));
        }
        let [x, y, z] = rec.center;
        let room_id = locate_room(rooms, x, y, z).map(|idx| rooms[idx].id.clone());
        objects.push(SceneObject {
            id: format!("o{i}"),
            room_id,
            category: rec.category.clone(),
            center: Point3::new(x, y, z),
            size: (dx, dy, dz),
            heading: normalize_heading(rec.heading),
        });
    }

    Ok(IngestOutcome { objects, warnings })
}

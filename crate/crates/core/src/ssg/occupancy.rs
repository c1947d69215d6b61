//! Occupancy-grid construction for one floor slab.

use super::{BuildError, FloorSlab, SegmentationParams};
use crate::geometry::{CellState, OccupancyGrid, PointCloud};

/// Rasterize a floor slab into Free/Wall/Unknown cells.
///
/// The grid covers the XY bounds of the slab's points. A cell is Wall when
/// enough points fall in it inside the wall band above the floor surface,
/// else Free when any point gives floor-surface evidence (within two
/// histogram bins of the surface), else Unknown.
pub fn build_occupancy(
    cloud: &PointCloud,
    floor: &FloorSlab,
    params: &SegmentationParams,
) -> Result<OccupancyGrid, BuildError> {
    params.validate()?;
    let res = params.grid_resolution;

    let mut min_x = f64::INFINITY;
    let mut min_y = f64::INFINITY;
    let mut max_x = f64::NEG_INFINITY;
    let mut max_y = f64::NEG_INFINITY;
    let mut any = false;
    for p in cloud.points() {
        if p.z >= floor.z_base && p.z <= floor.z_ceiling {
            min_x = min_x.min(p.x);
            min_y = min_y.min(p.y);
            max_x = max_x.max(p.x);
            max_y = max_y.max(p.y);
            any = true;
        }
    }
    if !any {
        return Err(BuildError::EmptyInput("no points inside the floor slab"));
    }

    let width = ((max_x - min_x) / res).floor() as usize + 1;
    let height = ((max_y - min_y) / res).floor() as usize + 1;
    let mut wall_hits = vec![0usize; width * height];
    let mut floor_hits = vec![0usize; width * height];

    let wall_lo = floor.z_base + params.wall_band.0;
    let wall_hi = floor.z_base + params.wall_band.1;
    // Surface evidence straddles the slab base: reconstruction noise puts
    // half the floor returns just below it.
    let surf_lo = floor.z_base - 2.0 * params.histogram_bin;
    let surf_hi = floor.z_base + 2.0 * params.histogram_bin;

    for p in cloud.points() {
        if p.z < surf_lo || p.z > floor.z_ceiling {
            continue;
        }
        let col = ((p.x - min_x) / res).floor();
        let row = ((p.y - min_y) / res).floor();
        if col < 0.0 || row < 0.0 {
            continue;
        }
        let (col, row) = (col as usize, row as usize);
        if col >= width || row >= height {
            continue;
        }
        let idx = row * width + col;
        if p.z >= wall_lo && p.z <= wall_hi {
            wall_hits[idx] += 1;
        }
        if p.z >= surf_lo && p.z <= surf_hi {
            floor_hits[idx] += 1;
        }
    }

    let cells = wall_hits
        .iter()
        .zip(&floor_hits)
        .map(|(&w, &f)| {
            if w >= params.wall_point_threshold {
                CellState::Wall
            } else if f >= 1 {
                CellState::Free
            } else {
                CellState::Unknown
            }
        })
        .collect();
    Ok(OccupancyGrid::from_cells(
        (min_x, min_y),
        res,
        width,
        height,
        cells,
    ))
}

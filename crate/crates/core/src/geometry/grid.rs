//! Per-floor 2D occupancy grid and cell-set masks.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// State of one occupancy cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CellState {
    Unknown,
    Free,
    Wall,
}

/// Row-major 2D grid anchored in world coordinates.
///
/// Cell (row, col) covers the world rectangle
/// `[origin + col*res, origin + (col+1)*res) x [origin + row*res, ...)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    origin_x: f64,
    origin_y: f64,
    resolution: f64,
    width: usize,
    height: usize,
    cells: Vec<CellState>,
}

impl OccupancyGrid {
    pub fn new(origin_xy: (f64, f64), resolution: f64, width: usize, height: usize) -> Self {
        assert!(resolution > 0.0, "resolution must be positive");
        Self {
            origin_x: origin_xy.0,
            origin_y: origin_xy.1,
            resolution,
            width,
            height,
            cells: vec![CellState::Unknown; width * height],
        }
    }

    pub fn from_cells(
        origin_xy: (f64, f64),
        resolution: f64,
        width: usize,
        height: usize,
        cells: Vec<CellState>,
    ) -> Self {
        assert!(resolution > 0.0, "resolution must be positive");
        assert_eq!(cells.len(), width * height, "cell count mismatch");
        Self {
            origin_x: origin_xy.0,
            origin_y: origin_xy.1,
            resolution,
            width,
            height,
            cells,
        }
    }

    pub fn origin_xy(&self) -> (f64, f64) {
        (self.origin_x, self.origin_y)
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn cells(&self) -> &[CellState] {
        &self.cells
    }

    pub fn get(&self, row: usize, col: usize) -> CellState {
        self.cells[row * self.width + col]
    }

    pub fn set(&mut self, row: usize, col: usize, state: CellState) {
        self.cells[row * self.width + col] = state;
    }

    /// The cell containing a world XY point, or None when outside the grid.
    pub fn cell_at(&self, xy: (f64, f64)) -> Option<(usize, usize)> {
        let col = ((xy.0 - self.origin_x) / self.resolution).floor();
        let row = ((xy.1 - self.origin_y) / self.resolution).floor();
        if col < 0.0 || row < 0.0 || col >= self.width as f64 || row >= self.height as f64 {
            return None;
        }
        Some((row as usize, col as usize))
    }

    /// World coordinates of a cell's center.
    pub fn cell_center(&self, row: usize, col: usize) -> (f64, f64) {
        (
            self.origin_x + (col as f64 + 0.5) * self.resolution,
            self.origin_y + (row as f64 + 0.5) * self.resolution,
        )
    }

    pub fn contains_cell(&self, row: usize, col: usize) -> bool {
        row < self.height && col < self.width
    }
}

/// A set of (row, col) cells on one grid. Ordered for deterministic iteration.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CellMask {
    cells: BTreeSet<(usize, usize)>,
}

impl CellMask {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, row: usize, col: usize) -> bool {
        self.cells.insert((row, col))
    }

    pub fn remove(&mut self, row: usize, col: usize) -> bool {
        self.cells.remove(&(row, col))
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        self.cells.contains(&(row, col))
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Cells in (row, col) order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.cells.iter().copied()
    }

    pub fn union_with(&mut self, other: &CellMask) {
        self.cells.extend(other.cells.iter().copied());
    }

    pub fn intersects(&self, other: &CellMask) -> bool {
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        small.iter().any(|(r, c)| large.contains(r, c))
    }

    /// Mean of member cell centers in world coordinates.
    pub fn centroid(&self, grid: &OccupancyGrid) -> Option<(f64, f64)> {
        if self.is_empty() {
            return None;
        }
        let (mut sx, mut sy) = (0.0, 0.0);
        for (r, c) in self.iter() {
            let (x, y) = grid.cell_center(r, c);
            sx += x;
            sy += y;
        }
        let n = self.len() as f64;
        Some((sx / n, sy / n))
    }

    /// True when all member cells share an edge path inside the mask
    /// (4-connectivity).
    pub fn is_connected(&self) -> bool {
        if self.is_empty() {
            return false;
        }
        let start = *self.cells.iter().next().unwrap();
        let mut seen = BTreeSet::new();
        let mut stack = vec![start];
        seen.insert(start);
        while let Some((r, c)) = stack.pop() {
            let mut push = |rr: isize, cc: isize| {
                if rr < 0 || cc < 0 {
                    return;
                }
                let cell = (rr as usize, cc as usize);
                if self.cells.contains(&cell) && seen.insert(cell) {
                    stack.push(cell);
                }
            };
            push(r as isize - 1, c as isize);
            push(r as isize + 1, c as isize);
            push(r as isize, c as isize - 1);
            push(r as isize, c as isize + 1);
        }
        seen.len() == self.len()
    }
}

impl FromIterator<(usize, usize)> for CellMask {
    fn from_iter<T: IntoIterator<Item = (usize, usize)>>(iter: T) -> Self {
        Self {
            cells: iter.into_iter().collect(),
        }
    }
}

/// True iff the grid cell containing `xy` belongs to the mask.
/// Points outside the grid are never in any region.
pub fn point_in_region(grid: &OccupancyGrid, mask: &CellMask, xy: (f64, f64)) -> bool {
    match grid.cell_at(xy) {
        Some((row, col)) => mask.contains(row, col),
        None => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_mask(grid: &OccupancyGrid, r0: usize, c0: usize, side: usize) -> CellMask {
        let mut mask = CellMask::new();
        for r in r0..r0 + side {
            for c in c0..c0 + side {
                assert!(grid.contains_cell(r, c));
                mask.insert(r, c);
            }
        }
        mask
    }

    #[test]
    fn centroid_of_solid_region_is_inside() {
        // 4x4 m room at 0.05 m cells: an 80x80 cell mask starting at (10, 10).
        let grid = OccupancyGrid::new((0.0, 0.0), 0.05, 120, 120);
        let mask = square_mask(&grid, 10, 10, 80);
        let centroid = mask.centroid(&grid).unwrap();
        assert!(point_in_region(&grid, &mask, centroid));
    }

    #[test]
    fn membership_matches_exhaustive_check() {
        // Oracle: brute-force scan over every cell rectangle.
        let grid = OccupancyGrid::new((-1.0, -1.0), 0.05, 60, 60);
        let mask = square_mask(&grid, 5, 8, 20);
        let res = grid.resolution();
        let (ox, oy) = grid.origin_xy();
        let probe = |x: f64, y: f64| -> bool {
            for (r, c) in mask.iter() {
                let x0 = ox + c as f64 * res;
                let y0 = oy + r as f64 * res;
                if x >= x0 && x < x0 + res && y >= y0 && y < y0 + res {
                    return true;
                }
            }
            false
        };
        let mut xy = (-0.9371, -0.8333);
        for step in 0..400 {
            xy = (
                -1.0 + (xy.0 * 73.0 + step as f64 * 0.013).rem_euclid(3.0),
                -1.0 + (xy.1 * 91.0 + step as f64 * 0.017).rem_euclid(3.0),
            );
            assert_eq!(point_in_region(&grid, &mask, xy), probe(xy.0, xy.1));
        }
    }

    #[test]
    fn point_one_millimeter_outside_edge_is_out() {
        let grid = OccupancyGrid::new((0.0, 0.0), 0.05, 60, 60);
        let mask = square_mask(&grid, 0, 0, 20); // covers [0, 1.0) x [0, 1.0)
        assert!(point_in_region(&grid, &mask, (0.999, 0.5)));
        assert!(!point_in_region(&grid, &mask, (1.001, 0.5)));
        assert!(!point_in_region(&grid, &mask, (0.5, 1.001)));
    }

    #[test]
    fn out_of_grid_is_false() {
        let grid = OccupancyGrid::new((0.0, 0.0), 0.05, 10, 10);
        let mask = square_mask(&grid, 0, 0, 10);
        assert!(!point_in_region(&grid, &mask, (-0.01, 0.2)));
        assert!(!point_in_region(&grid, &mask, (0.2, 5.0)));
    }

    #[test]
    fn connectivity_detects_gaps() {
        let grid = OccupancyGrid::new((0.0, 0.0), 1.0, 10, 10);
        let mut mask = square_mask(&grid, 0, 0, 2);
        assert!(mask.is_connected());
        mask.insert(5, 5);
        assert!(!mask.is_connected());
    }
}

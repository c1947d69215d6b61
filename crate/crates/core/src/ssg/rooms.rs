//! Room partitioning: exact Euclidean distance transform of free space,
//! marker selection at the transform's local maxima, and marker-based
//! watershed flooding in descending distance order.

use super::{BuildError, RoomRegion, SegmentationParams};
use crate::geometry::{CellMask, CellState, OccupancyGrid};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

const INF: f64 = 1e20;

/// Minimum separation between watershed markers, meters.
const MARKER_SEPARATION_M: f64 = 1.0;

/// Partition a floor's free cells into room regions.
///
/// Regions smaller than `min_room_area` merge into the neighbor sharing
/// the longest boundary; regions larger than `review_area` come back with
/// `review_flag` set. Region ids are assigned by centroid row-major order.
pub fn segment_rooms(
    grid: &OccupancyGrid,
    floor_index: usize,
    params: &SegmentationParams,
) -> Result<Vec<RoomRegion>, BuildError> {
    params.validate()?;
    let (w, h) = (grid.width(), grid.height());
    let free: Vec<bool> = grid.cells().iter().map(|&c| c == CellState::Free).collect();
    if !free.iter().any(|&f| f) {
        return Err(BuildError::NoFreeSpace);
    }

    let res = grid.resolution();
    let dist = distance_transform_m(&free, w, h, res);

    // Local maxima of the transform (8-neighborhood, plateaus included),
    // greedily thinned to a minimum mutual separation. Highest first so a
    // plateau keeps its strongest representative.
    let mut candidates: Vec<usize> = (0..w * h)
        .filter(|&i| free[i] && is_local_max(&dist, w, h, i))
        .collect();
    candidates.sort_by(|&a, &b| {
        dist[b]
            .total_cmp(&dist[a])
            .then_with(|| a.cmp(&b))
    });
    let mut markers: Vec<usize> = Vec::new();
    for &c in &candidates {
        let (cr, cc) = (c / w, c % w);
        let far_enough = markers.iter().all(|&m| {
            let (mr, mc) = (m / w, m % w);
            let dr = cr as f64 - mr as f64;
            let dc = cc as f64 - mc as f64;
            (dr * dr + dc * dc).sqrt() * res >= MARKER_SEPARATION_M
        });
        if far_enough {
            markers.push(c);
        }
    }
    // Marker ids follow row-major cell order.
    markers.sort_unstable();

    let mut labels = vec![0u32; w * h];
    let mut heap = BinaryHeap::new();
    for (k, &cell) in markers.iter().enumerate() {
        heap.push(FloodEntry {
            dist: dist[cell],
            label: (k + 1) as u32,
            cell,
        });
    }
    flood(&mut labels, &mut heap, &free, &dist, w, h);

    // Components whose every candidate lost the separation contest still
    // need labels of their own.
    let mut next_label = markers.len() as u32;
    loop {
        let seed = (0..w * h)
            .filter(|&i| free[i] && labels[i] == 0)
            .max_by(|&a, &b| dist[a].total_cmp(&dist[b]).then_with(|| b.cmp(&a)));
        let Some(seed) = seed else { break };
        next_label += 1;
        heap.push(FloodEntry {
            dist: dist[seed],
            label: next_label,
            cell: seed,
        });
        flood(&mut labels, &mut heap, &free, &dist, w, h);
    }

    merge_small_regions(&mut labels, &free, w, h, res, params.min_room_area);

    // Collect masks per surviving label.
    let mut by_label: std::collections::BTreeMap<u32, CellMask> = Default::default();
    for i in 0..w * h {
        if labels[i] != 0 {
            by_label.entry(labels[i]).or_default().insert(i / w, i % w);
        }
    }
    let mut regions: Vec<CellMask> = by_label.into_values().collect();
    regions.sort_by(|a, b| {
        grid_centroid(a)
            .partial_cmp(&grid_centroid(b))
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.iter().next().cmp(&b.iter().next()))
    });

    Ok(regions
        .into_iter()
        .enumerate()
        .map(|(k, mask)| {
            let area = mask.len() as f64 * res * res;
            let centroid = mask.centroid(grid).expect("mask non-empty");
            RoomRegion {
                id: format!("f{floor_index}-r{k}"),
                floor_index,
                area,
                centroid,
                mask,
                category: None,
                review_flag: area > params.review_area,
            }
        })
        .collect())
}

/// Mean (row, col) of a mask, for row-major ordering of regions.
fn grid_centroid(mask: &CellMask) -> (f64, f64) {
    let n = mask.len() as f64;
    let (mut sr, mut sc) = (0.0, 0.0);
    for (r, c) in mask.iter() {
        sr += r as f64;
        sc += c as f64;
    }
    (sr / n, sc / n)
}

fn is_local_max(dist: &[f64], w: usize, h: usize, i: usize) -> bool {
    if dist[i] <= 0.0 {
        return false;
    }
    let (r, c) = (i / w, i % w);
    for dr in -1i64..=1 {
        for dc in -1i64..=1 {
            if dr == 0 && dc == 0 {
                continue;
            }
            let (nr, nc) = (r as i64 + dr, c as i64 + dc);
            if nr < 0 || nc < 0 || nr >= h as i64 || nc >= w as i64 {
                continue; // outside counts as obstacle, distance 0
            }
            if dist[nr as usize * w + nc as usize] > dist[i] {
                return false;
            }
        }
    }
    true
}

#[derive(PartialEq)]
struct FloodEntry {
    dist: f64,
    label: u32,
    cell: usize,
}

impl Eq for FloodEntry {}

impl Ord for FloodEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Max-heap: highest distance first; on ties the lower marker id,
        // then the lower cell index, takes the cell.
        self.dist
            .total_cmp(&other.dist)
            .then_with(|| other.label.cmp(&self.label))
            .then_with(|| other.cell.cmp(&self.cell))
    }
}

impl PartialOrd for FloodEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn flood(
    labels: &mut [u32],
    heap: &mut BinaryHeap<FloodEntry>,
    free: &[bool],
    dist: &[f64],
    w: usize,
    h: usize,
) {
    while let Some(FloodEntry { label, cell, .. }) = heap.pop() {
        if labels[cell] != 0 {
            continue;
        }
        labels[cell] = label;
        let (r, c) = (cell / w, cell % w);
        let mut push = |nr: i64, nc: i64| {
            if nr < 0 || nc < 0 || nr >= h as i64 || nc >= w as i64 {
                return;
            }
            let n = nr as usize * w + nc as usize;
            if free[n] && labels[n] == 0 {
                heap.push(FloodEntry {
                    dist: dist[n],
                    label,
                    cell: n,
                });
            }
        };
        push(r as i64 - 1, c as i64);
        push(r as i64 + 1, c as i64);
        push(r as i64, c as i64 - 1);
        push(r as i64, c as i64 + 1);
    }
}

fn merge_small_regions(
    labels: &mut [u32],
    free: &[bool],
    w: usize,
    h: usize,
    res: f64,
    min_area: f64,
) {
    loop {
        let mut cell_count: std::collections::BTreeMap<u32, usize> = Default::default();
        for &l in labels.iter().filter(|&&l| l != 0) {
            *cell_count.entry(l).or_default() += 1;
        }
        // Smallest under-threshold region that has a neighbor to join.
        let mut target: Option<(usize, u32)> = None;
        for (&label, &count) in &cell_count {
            let area = count as f64 * res * res;
            if area >= min_area {
                continue;
            }
            if boundary_lengths(labels, free, w, h, label).is_empty() {
                continue;
            }
            match target {
                Some((best, bl)) if (count, label) >= (best, bl) => {}
                _ => target = Some((count, label)),
            }
        }
        let Some((_, small)) = target else { break };
        let neighbors = boundary_lengths(labels, free, w, h, small);
        let (&winner, _) = neighbors
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(a.0)))
            .expect("non-empty by selection");
        for l in labels.iter_mut() {
            if *l == small {
                *l = winner;
            }
        }
    }
}

/// Shared 4-adjacent boundary length (in cell pairs) between `label` and
/// each neighboring region.
fn boundary_lengths(
    labels: &[u32],
    free: &[bool],
    w: usize,
    h: usize,
    label: u32,
) -> std::collections::BTreeMap<u32, usize> {
    let mut out: std::collections::BTreeMap<u32, usize> = Default::default();
    for r in 0..h {
        for c in 0..w {
            let i = r * w + c;
            if labels[i] != label {
                continue;
            }
            let mut look = |nr: i64, nc: i64| {
                if nr < 0 || nc < 0 || nr >= h as i64 || nc >= w as i64 {
                    return;
                }
                let n = nr as usize * w + nc as usize;
                if free[n] && labels[n] != 0 && labels[n] != label {
                    *out.entry(labels[n]).or_default() += 1;
                }
            };
            look(r as i64 - 1, c as i64);
            look(r as i64 + 1, c as i64);
            look(r as i64, c as i64 - 1);
            look(r as i64, c as i64 + 1);
        }
    }
    out
}

/// Exact Euclidean distance (meters) from each free cell to the nearest
/// non-free cell, with everything outside the grid counting as non-free.
/// Two-pass lower-envelope transform over squared distances.
pub(crate) fn distance_transform_m(free: &[bool], w: usize, h: usize, res: f64) -> Vec<f64> {
    // Pad with an obstacle ring so border cells see the outside.
    let (pw, ph) = (w + 2, h + 2);
    let mut f = vec![0.0f64; pw * ph];
    for r in 0..h {
        for c in 0..w {
            f[(r + 1) * pw + (c + 1)] = if free[r * w + c] { INF } else { 0.0 };
        }
    }

    // columns
    let mut col_buf = vec![0.0; ph];
    let mut out_buf = vec![0.0; ph];
    for c in 0..pw {
        for r in 0..ph {
            col_buf[r] = f[r * pw + c];
        }
        dt_1d(&col_buf, &mut out_buf);
        for r in 0..ph {
            f[r * pw + c] = out_buf[r];
        }
    }
    // rows
    let mut row_out = vec![0.0; pw];
    for r in 0..ph {
        dt_1d(&f[r * pw..(r + 1) * pw], &mut row_out);
        f[r * pw..(r + 1) * pw].copy_from_slice(&row_out);
    }

    let mut dist = vec![0.0; w * h];
    for r in 0..h {
        for c in 0..w {
            dist[r * w + c] = f[(r + 1) * pw + (c + 1)].sqrt() * res;
        }
    }
    dist
}

/// One-dimensional squared distance transform (lower envelope of
/// parabolas rooted at `(i, f[i])`).
fn dt_1d(f: &[f64], out: &mut [f64]) {
    let n = f.len();
    let mut v = vec![0usize; n]; // parabola roots
    let mut z = vec![0.0f64; n + 1]; // envelope boundaries
    let mut k = 0usize;
    z[0] = -INF;
    z[1] = INF;
    for q in 1..n {
        loop {
            let p = v[k];
            let s = ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64))
                / (2.0 * q as f64 - 2.0 * p as f64);
            if s <= z[k] {
                k -= 1;
            } else {
                k += 1;
                v[k] = q;
                z[k] = s;
                z[k + 1] = INF;
                break;
            }
        }
    }
    k = 0;
    for q in 0..n {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        let d = q as f64 - p as f64;
        out[q] = d * d + f[p];
    }
}

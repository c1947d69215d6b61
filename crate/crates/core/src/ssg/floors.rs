//! Floor segmentation: height histogram, peak selection, 1-D density
//! clustering of the surviving peaks.

use super::{BuildError, FloorSlab, SegmentationParams};
use crate::geometry::PointCloud;

/// Segment floor slabs from the cloud's height distribution.
///
/// A histogram over Z with `histogram_bin` width is scanned for local
/// maxima holding at least `peak_fraction` of all points; peaks within
/// `dbscan_eps` cluster together and each cluster's count-weighted mean
/// height becomes a floor surface. A slab spans from its surface to the
/// next surface minus one bin; the top slab extends to the cloud maximum.
pub fn segment_floors(
    cloud: &PointCloud,
    params: &SegmentationParams,
) -> Result<Vec<FloorSlab>, BuildError> {
    params.validate()?;
    if cloud.is_empty() {
        return Err(BuildError::EmptyInput("point cloud has no points"));
    }

    let bin = params.histogram_bin;
    let z_min = cloud.bounds().min.z;
    let z_max = cloud.bounds().max.z;
    let n_bins = (((z_max - z_min) / bin).floor() as usize).saturating_add(1);
    let mut counts = vec![0usize; n_bins];
    for p in cloud.points() {
        let idx = (((p.z - z_min) / bin).floor() as usize).min(n_bins - 1);
        counts[idx] += 1;
    }

    // A peak must dominate its neighbors and carry a meaningful share of
    // the cloud; a flat histogram yields no floors at all.
    let threshold = params.peak_fraction * cloud.len() as f64;
    let mut peaks: Vec<(f64, usize)> = Vec::new(); // (bin center height, count)
    for i in 0..n_bins {
        let left = if i > 0 { counts[i - 1] } else { 0 };
        let right = if i + 1 < n_bins { counts[i + 1] } else { 0 };
        if counts[i] >= left && counts[i] >= right && counts[i] as f64 >= threshold {
            peaks.push((z_min + (i as f64 + 0.5) * bin, counts[i]));
        }
    }
    if peaks.is_empty() {
        return Err(BuildError::NoFloorFound);
    }

    let clusters = dbscan_1d(&peaks, params.dbscan_eps, params.dbscan_min_pts);
    if clusters.is_empty() {
        return Err(BuildError::NoFloorFound);
    }

    let mut surfaces: Vec<(f64, usize)> = clusters
        .iter()
        .map(|members| {
            let weight: usize = members.iter().map(|&i| peaks[i].1).sum();
            let mean: f64 = members
                .iter()
                .map(|&i| peaks[i].0 * peaks[i].1 as f64)
                .sum::<f64>()
                / weight as f64;
            (mean, weight)
        })
        .collect();
    surfaces.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut slabs = Vec::with_capacity(surfaces.len());
    for (i, &(z_base, support_count)) in surfaces.iter().enumerate() {
        let z_ceiling = if i + 1 < surfaces.len() {
            surfaces[i + 1].0 - bin
        } else {
            // Keep the slab non-degenerate when the cloud barely rises
            // above the top surface.
            z_max.max(z_base + bin)
        };
        slabs.push(FloorSlab {
            index: i,
            z_base,
            z_ceiling,
            support_count,
        });
    }
    Ok(slabs)
}

/// DBSCAN over 1-D heights. `points` must be sorted ascending by height
/// (histogram order guarantees it). Returns clusters as index lists,
/// ordered by first member.
fn dbscan_1d(points: &[(f64, usize)], eps: f64, min_pts: usize) -> Vec<Vec<usize>> {
    let n = points.len();
    let neighbors = |i: usize| -> Vec<usize> {
        // Sorted input: the eps-neighborhood is a contiguous index range.
        let h = points[i].0;
        let mut lo = i;
        while lo > 0 && h - points[lo - 1].0 <= eps {
            lo -= 1;
        }
        let mut hi = i;
        while hi + 1 < n && points[hi + 1].0 - h <= eps {
            hi += 1;
        }
        (lo..=hi).collect()
    };

    const UNVISITED: usize = usize::MAX;
    const NOISE: usize = usize::MAX - 1;
    let mut label = vec![UNVISITED; n];
    let mut clusters: Vec<Vec<usize>> = Vec::new();

    for i in 0..n {
        if label[i] != UNVISITED {
            continue;
        }
        let hood = neighbors(i);
        if hood.len() < min_pts {
            label[i] = NOISE;
            continue;
        }
        let cluster_id = clusters.len();
        clusters.push(Vec::new());
        label[i] = cluster_id;
        clusters[cluster_id].push(i);
        let mut queue: Vec<usize> = hood;
        let mut qi = 0;
        while qi < queue.len() {
            let j = queue[qi];
            qi += 1;
            if label[j] == NOISE {
                label[j] = cluster_id;
                clusters[cluster_id].push(j);
            }
            if label[j] != UNVISITED {
                continue;
            }
            label[j] = cluster_id;
            clusters[cluster_id].push(j);
            let j_hood = neighbors(j);
            if j_hood.len() >= min_pts {
                queue.extend(j_hood);
            }
        }
        clusters[cluster_id].sort_unstable();
    }
    clusters
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point3;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal, Uniform};

    fn slab_cloud(modes: &[(f64, usize)], scatter: &[(f64, f64, usize)]) -> PointCloud {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let xy = Uniform::new(0.0, 5.0).unwrap();
        let mut points = Vec::new();
        for &(mode, n) in modes {
            let dist = Normal::new(mode, 0.02).unwrap();
            for _ in 0..n {
                points.push(Point3::new(
                    xy.sample(&mut rng),
                    xy.sample(&mut rng),
                    dist.sample(&mut rng),
                ));
            }
        }
        for &(lo, hi, n) in scatter {
            let dist = Uniform::new(lo, hi).unwrap();
            for _ in 0..n {
                points.push(Point3::new(
                    xy.sample(&mut rng),
                    xy.sample(&mut rng),
                    dist.sample(&mut rng),
                ));
            }
        }
        PointCloud::new(points, None).unwrap()
    }

    /// Oracle for the two-mode case: the two histogram argmax bins, found
    /// by direct scan over each half of the height range.
    fn two_mode_argmax(cloud: &PointCloud, bin: f64, split: f64) -> (f64, f64) {
        let z_min = cloud.bounds().min.z;
        let z_max = cloud.bounds().max.z;
        let n_bins = ((z_max - z_min) / bin).floor() as usize + 1;
        let mut counts = vec![0usize; n_bins];
        for p in cloud.points() {
            counts[(((p.z - z_min) / bin).floor() as usize).min(n_bins - 1)] += 1;
        }
        let center = |i: usize| z_min + (i as f64 + 0.5) * bin;
        let (mut lo_best, mut hi_best) = ((0, 0usize), (0, 0usize));
        for (i, &c) in counts.iter().enumerate() {
            if center(i) < split {
                if c > lo_best.1 {
                    lo_best = (i, c);
                }
            } else if c > hi_best.1 {
                hi_best = (i, c);
            }
        }
        (center(lo_best.0), center(hi_best.0))
    }

    #[test]
    fn single_dominant_peak_yields_one_slab() {
        let cloud = slab_cloud(&[(0.0, 10_000)], &[(0.0, 2.5, 2_000)]);
        let slabs = segment_floors(&cloud, &SegmentationParams::default()).unwrap();
        assert_eq!(slabs.len(), 1);
        assert!(slabs[0].z_base.abs() <= 0.05, "z_base {}", slabs[0].z_base);
        assert!(slabs[0].z_ceiling >= 2.0);
    }

    #[test]
    fn two_modes_yield_two_slabs_near_truth() {
        let cloud = slab_cloud(&[(0.0, 10_000), (3.0, 10_000)], &[(0.0, 5.5, 3_000)]);
        let params = SegmentationParams::default();
        let slabs = segment_floors(&cloud, &params).unwrap();
        assert_eq!(slabs.len(), 2);
        let (lo, hi) = two_mode_argmax(&cloud, params.histogram_bin, 1.5);
        assert!((slabs[0].z_base - lo).abs() <= 0.05 + 1e-9);
        assert!((slabs[1].z_base - hi).abs() <= 0.05 + 1e-9);
        assert!(slabs[0].z_base.abs() <= 0.10);
        assert!((slabs[1].z_base - 3.0).abs() <= 0.10);
        assert!(slabs[0].z_ceiling <= slabs[1].z_base);
    }

    #[test]
    fn uniform_noise_finds_no_floor() {
        // 10k points spread over 10 m: ~50 per 5 cm bin, far below 10% of
        // the cloud. Verified here against the same histogram the
        // implementation scans.
        let cloud = slab_cloud(&[], &[(0.0, 10.0, 10_000)]);
        let z_min = cloud.bounds().min.z;
        let mut counts = vec![0usize; 201];
        for p in cloud.points() {
            counts[(((p.z - z_min) / 0.05).floor() as usize).min(200)] += 1;
        }
        assert!(counts.iter().all(|&c| (c as f64) < 0.10 * 10_000.0));
        assert!(matches!(
            segment_floors(&cloud, &SegmentationParams::default()),
            Err(BuildError::NoFloorFound)
        ));
    }

    #[test]
    fn slabs_sorted_and_disjoint() {
        let cloud = slab_cloud(
            &[(0.0, 8_000), (2.8, 9_000), (5.9, 8_500)],
            &[(0.0, 8.0, 2_000)],
        );
        let slabs = segment_floors(&cloud, &SegmentationParams::default()).unwrap();
        assert_eq!(slabs.len(), 3);
        for w in slabs.windows(2) {
            assert!(w[0].z_base < w[1].z_base);
            assert!(w[0].z_ceiling <= w[1].z_base);
        }
        assert_eq!(
            slabs.iter().map(|s| s.index).collect::<Vec<_>>(),
            vec![0, 1, 2]
        );
    }

    #[test]
    fn nearby_peaks_merge_into_one_floor() {
        // Two modes 0.15 m apart sit inside one eps=0.30 cluster.
        let cloud = slab_cloud(&[(0.0, 5_000), (0.15, 5_000)], &[]);
        let slabs = segment_floors(&cloud, &SegmentationParams::default()).unwrap();
        assert_eq!(slabs.len(), 1);
        assert!((slabs[0].z_base - 0.075).abs() < 0.06);
    }

    #[test]
    fn min_pts_above_one_drops_isolated_peaks() {
        let peaks = vec![(0.0, 100), (0.1, 80), (3.0, 90)];
        let clusters = dbscan_1d(&peaks, 0.3, 2);
        assert_eq!(clusters, vec![vec![0, 1]]);
    }

    #[test]
    fn flat_plane_cloud_gets_nondegenerate_slab() {
        let points = (0..100)
            .map(|i| Point3::new((i % 10) as f64, (i / 10) as f64, 1.0))
            .collect();
        let cloud = PointCloud::new(points, None).unwrap();
        let slabs = segment_floors(&cloud, &SegmentationParams::default()).unwrap();
        assert_eq!(slabs.len(), 1);
        assert!(slabs[0].z_ceiling > slabs[0].z_base);
    }
}

//! World <-> map-pixel transform for agent-centric top-down maps.
//!
//! The agent sits at the exact center pixel and its heading points image-up:
//! the mapping is translate(-agent.position), rotate(-(heading - π/2)),
//! scale(1/resolution), with image rows growing downward.

use super::Pose;
use std::f64::consts::FRAC_PI_2;

/// Round half away from zero, the symmetric choice around the centered agent.
pub fn round_half_away(v: f64) -> i64 {
    v.round() as i64
}

/// Project a world XY point onto the agent-centric map.
///
/// Returns the `(x, y)` pixel (column, row), or `None` when the point falls
/// outside the `map_size` x `map_size` frame. The agent maps to
/// `(map_size/2, map_size/2)`; points ahead of the agent get smaller rows.
pub fn world_to_map(
    agent: &Pose,
    target_xy: (f64, f64),
    resolution: f64,
    map_size: u32,
) -> Option<(u32, u32)> {
    assert!(resolution > 0.0, "resolution must be positive");
    assert!(map_size > 0, "map_size must be positive");
    let dx = target_xy.0 - agent.position.x;
    let dy = target_xy.1 - agent.position.y;
    // Rotate by -(heading - π/2) so the heading direction lands on +Y (image up).
    let phi = agent.heading() - FRAC_PI_2;
    let (s, c) = phi.sin_cos();
    let rx = (c * dx + s * dy) / resolution;
    let ry = (-s * dx + c * dy) / resolution;
    let half = (map_size / 2) as i64;
    let px = half + round_half_away(rx);
    let py = half - round_half_away(ry);
    if px < 0 || py < 0 || px >= map_size as i64 || py >= map_size as i64 {
        return None;
    }
    Some((px as u32, py as u32))
}

/// World XY of a map pixel's lattice point (inverse of [`world_to_map`]).
pub fn map_to_world(
    agent: &Pose,
    pixel: (u32, u32),
    resolution: f64,
    map_size: u32,
) -> (f64, f64) {
    let half = (map_size / 2) as i64;
    let gx = (pixel.0 as i64 - half) as f64 * resolution;
    let gy = (half - pixel.1 as i64) as f64 * resolution;
    let phi = agent.heading() - FRAC_PI_2;
    let (s, c) = phi.sin_cos();
    (
        agent.position.x + c * gx - s * gy,
        agent.position.y + s * gx + c * gy,
    )
}

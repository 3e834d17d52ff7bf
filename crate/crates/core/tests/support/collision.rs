//! Brute-force point-membership oracle for shape overlap.

use std::f64::consts::PI;

use kpmp_core::world::{overlap, Pose2, Shape, Vec2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const GRID: usize = 1000;

pub fn random_shape(rng: &mut ChaCha8Rng) -> Shape {
    match rng.random_range(0..3) {
        0 => Shape::Disk {
            radius: rng.random_range(0.05..1.0),
        },
        1 => Shape::Box {
            half_width: rng.random_range(0.05..1.0),
            half_depth: rng.random_range(0.05..1.0),
        },
        _ => Shape::ChainLink {
            length: rng.random_range(0.1..2.0),
            thickness: rng.random_range(0.02..0.3),
        },
    }
}

pub fn random_pose(rng: &mut ChaCha8Rng) -> Pose2 {
    Pose2::new(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5), rng.random_range(-PI..PI))
}

fn to_local(pose: &Pose2, p: Vec2) -> (f64, f64) {
    let (s, c) = pose.heading.sin_cos();
    let d = p - pose.position;
    (d.x * c + d.y * s, -d.x * s + d.y * c)
}

/// Signed depth of `p` inside the shape (positive inside), in the shape's own
/// frame; `inflate` grows the shape.
pub fn depth(shape: &Shape, pose: &Pose2, p: Vec2, inflate: f64) -> f64 {
    let (x, y) = to_local(pose, p);
    match *shape {
        Shape::Disk { radius } => radius + inflate - (x * x + y * y).sqrt(),
        Shape::Box { half_width, half_depth } => (half_width + inflate - x.abs()).min(half_depth + inflate - y.abs()),
        Shape::ChainLink { length, thickness } => {
            let along = (x + inflate).min(length + inflate - x);
            along.min(thickness / 2.0 + inflate - y.abs())
        }
    }
}

fn corners(shape: &Shape) -> Vec<(f64, f64)> {
    match *shape {
        Shape::Disk { radius } => vec![(-radius, -radius), (radius, radius)],
        Shape::Box { half_width, half_depth } => vec![
            (-half_width, -half_depth),
            (half_width, -half_depth),
            (half_width, half_depth),
            (-half_width, half_depth),
        ],
        Shape::ChainLink { length, thickness } => {
            let t = thickness / 2.0;
            vec![(0.0, -t), (length, -t), (length, t), (0.0, t)]
        }
    }
}

fn bounds(shape: &Shape, pose: &Pose2) -> (Vec2, Vec2) {
    if let Shape::Disk { radius } = *shape {
        let r = Vec2::new(radius, radius);
        return (pose.position - r, pose.position + r);
    }
    let (s, c) = pose.heading.sin_cos();
    let pts: Vec<Vec2> = corners(shape)
        .into_iter()
        .map(|(x, y)| pose.position + Vec2::new(x * c - y * s, x * s + y * c))
        .collect();
    let lo = pts.iter().fold(Vec2::repeat(f64::INFINITY), |a, p| a.inf(p));
    let hi = pts.iter().fold(Vec2::repeat(f64::NEG_INFINITY), |a, p| a.sup(p));
    (lo, hi)
}

/// First grid point (cell centres over the shared bounding box) inside both
/// shapes grown by `inflate`.
pub fn common_point(a: (&Shape, &Pose2), b: (&Shape, &Pose2), inflate: f64) -> Option<Vec2> {
    let (la, ha) = bounds(a.0, a.1);
    let (lb, hb) = bounds(b.0, b.1);
    let lo = la.sup(&lb) - Vec2::repeat(inflate);
    let hi = ha.inf(&hb) + Vec2::repeat(inflate);
    if lo.x > hi.x || lo.y > hi.y {
        return None;
    }
    let step = (hi - lo) / GRID as f64;
    for i in 0..GRID {
        for j in 0..GRID {
            let p = lo + Vec2::new((i as f64 + 0.5) * step.x, (j as f64 + 0.5) * step.y);
            if depth(a.0, a.1, p, inflate) >= 0.0 && depth(b.0, b.1, p, inflate) >= 0.0 {
                return Some(p);
            }
        }
    }
    None
}

fn grid_spacing(a: (&Shape, &Pose2), b: (&Shape, &Pose2)) -> f64 {
    let (la, ha) = bounds(a.0, a.1);
    let (lb, hb) = bounds(b.0, b.1);
    let ext = ha.inf(&hb) - la.sup(&lb);
    ext.x.max(ext.y).max(0.0) / GRID as f64
}

#[derive(Debug, Default)]
pub struct OracleSummary {
    pub pairs: usize,
    pub positives: usize,
    /// Disagreements explained by the grid resolution.
    pub boundary: usize,
    /// Disagreements the grid cannot explain.
    pub failures: Vec<String>,
}

pub fn run_oracle(pairs: usize, seed: u64) -> OracleSummary {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = OracleSummary {
        pairs,
        ..OracleSummary::default()
    };
    for pair in 0..pairs {
        let (sa, pa) = (random_shape(&mut rng), random_pose(&mut rng));
        let (sb, pb) = (random_shape(&mut rng), random_pose(&mut rng));
        let a = (&sa, &pa);
        let b = (&sb, &pb);
        let fast = overlap(&sa, &pa, &sb, &pb);
        out.positives += usize::from(fast);
        match (fast, common_point(a, b, 0.0)) {
            (true, Some(_)) | (false, None) => {}
            (true, None) => {
                // thinner than the grid: must show up once both grow by a cell
                let h = grid_spacing(a, b) * 2f64.sqrt();
                if common_point(a, b, h).is_some() {
                    out.boundary += 1;
                } else {
                    out.failures.push(format!("pair {pair}: {sa:?} {pa:?} / {sb:?} {pb:?} reported overlapping"));
                }
            }
            (false, Some(p)) => {
                let d = depth(&sa, &pa, p, 0.0).min(depth(&sb, &pb, p, 0.0));
                if d < 1e-9 {
                    out.boundary += 1;
                } else {
                    out.failures.push(format!("pair {pair} misses shared point {p:?} (depth {d})"));
                }
            }
        }
    }
    out
}

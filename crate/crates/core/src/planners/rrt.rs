use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::world::{normalize_angle, RobotKind, RobotState, Scene};

/// Weights of the configuration distance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceWeights {
    pub position: f64,
    pub heading: f64,
    pub joint: f64,
}

impl Default for DistanceWeights {
    fn default() -> Self {
        Self {
            position: 1.0,
            heading: 0.3,
            joint: 1.0,
        }
    }
}

/// Robot configuration coordinates: `[x, y]`, `[x, y, heading]` or joint
/// angles.
pub fn config_coords(state: &RobotState) -> Vec<f64> {
    match state {
        RobotState::Holonomic { pose, .. } => vec![pose.position.x, pose.position.y],
        RobotState::Car { pose, .. } => vec![pose.position.x, pose.position.y, pose.heading],
        RobotState::Arm { angles, .. } => angles.clone(),
    }
}

/// A random configuration with per-coordinate weights (a goal sample
/// leaves the heading free by zeroing its weight).
#[derive(Clone, Debug, PartialEq)]
pub struct ConfigSample {
    pub coords: Vec<f64>,
    pub weights: Vec<f64>,
}

fn weights_for(kind: &RobotKind, w: &DistanceWeights) -> Vec<f64> {
    match kind {
        RobotKind::HolonomicDisk { .. } => vec![w.position; 2],
        RobotKind::CarLike(_) => vec![w.position, w.position, w.heading],
        RobotKind::PlanarArm(a) => vec![w.joint; a.joint_count()],
    }
}

/// Weighted Euclidean distance; the car heading uses the wrapped difference.
pub fn weighted_distance(kind: &RobotKind, a: &[f64], sample: &ConfigSample) -> f64 {
    let mut d2 = 0.0;
    for (k, (x, y)) in a.iter().zip(&sample.coords).enumerate() {
        let diff = if matches!(kind, RobotKind::CarLike(_)) && k == 2 {
            normalize_angle(x - y)
        } else {
            x - y
        };
        d2 += sample.weights[k] * diff * diff;
    }
    d2.sqrt()
}

/// Nearest tree node by linear scan; the lowest index wins ties.
pub fn select_node_rrt(kind: &RobotKind, coords: &[Vec<f64>], sample: &ConfigSample) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, c) in coords.iter().enumerate() {
        let d = weighted_distance(kind, c, sample);
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    best
}

/// Uniform configuration over the arena (mobile) or joint limits (arm).
pub fn uniform_sample<R: Rng>(scene: &Scene, w: &DistanceWeights, rng: &mut R) -> ConfigSample {
    let a = &scene.arena;
    let coords = match &scene.robot.kind {
        RobotKind::HolonomicDisk { .. } => vec![
            rng.random_range(a.min.x..=a.max.x),
            rng.random_range(a.min.y..=a.max.y),
        ],
        RobotKind::CarLike(_) => vec![
            rng.random_range(a.min.x..=a.max.x),
            rng.random_range(a.min.y..=a.max.y),
            rng.random_range(-PI..PI),
        ],
        RobotKind::PlanarArm(arm) => arm.joint_limits.iter().map(|(lo, hi)| rng.random_range(*lo..=*hi)).collect(),
    };
    ConfigSample {
        coords,
        weights: weights_for(&scene.robot.kind, w),
    }
}

/// A configuration inside the goal region. For the arm, joint samples are
/// drawn until the tool lands in the goal (bounded attempts).
pub fn goal_sample<R: Rng>(scene: &Scene, w: &DistanceWeights, rng: &mut R) -> ConfigSample {
    let g = &scene.goal;
    let mut weights = weights_for(&scene.robot.kind, w);
    let coords = match &scene.robot.kind {
        RobotKind::HolonomicDisk { .. } => vec![g.center.x, g.center.y],
        RobotKind::CarLike(_) => {
            weights[2] = 0.0;
            vec![g.center.x, g.center.y, 0.0]
        }
        RobotKind::PlanarArm(arm) => {
            let mut last = Vec::new();
            for _ in 0..200 {
                last = arm.joint_limits.iter().map(|(lo, hi)| rng.random_range(*lo..=*hi)).collect();
                if g.contains(arm.tool_point(&last)) {
                    break;
                }
            }
            last
        }
    };
    ConfigSample { coords, weights }
}

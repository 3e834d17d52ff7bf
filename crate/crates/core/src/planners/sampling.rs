use std::f64::consts::{FRAC_PI_4, PI};

use rand::Rng;

use crate::knowledge::ControlRange;
use crate::physics::ControlInput;
use crate::world::{RobotKind, RobotModel, RobotState, Vec2, WorkspaceState};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SamplingParams {
    pub min_steps: usize,
    pub max_steps: usize,
    /// Aim pushes along the contacted region's push direction.
    pub push_bias: bool,
}

fn uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    if lo >= hi {
        lo
    } else {
        rng.random_range(lo..=hi)
    }
}

fn random_sign<R: Rng>(rng: &mut R) -> f64 {
    if rng.random::<bool>() {
        1.0
    } else {
        -1.0
    }
}

/// Draws a control within `range` and a step count. `push` is the world
/// push direction when the robot is in contact through a region.
pub fn sample_controls_and_steps<R: Rng>(
    robot: &RobotModel,
    q: &WorkspaceState,
    range: &ControlRange,
    push: Option<Vec2>,
    params: &SamplingParams,
    rng: &mut R,
) -> (ControlInput, usize) {
    let push = push.filter(|_| params.push_bias);
    let control = match (&robot.kind, range) {
        (RobotKind::HolonomicDisk { .. }, ControlRange::Magnitude { lower, upper }) => {
            let mag = uniform(rng, *lower, *upper);
            let angle = match push {
                Some(n) => n.y.atan2(n.x) + rng.random_range(-FRAC_PI_4..=FRAC_PI_4),
                None => rng.random_range(-PI..PI),
            };
            ControlInput::PlanarForce(Vec2::new(angle.cos(), angle.sin()) * mag)
        }
        (RobotKind::CarLike(c), ControlRange::Magnitude { lower, upper }) => {
            let mag = uniform(rng, *lower, *upper);
            let sign = match (push, &q.robot) {
                (Some(n), RobotState::Car { pose, .. }) => {
                    let along = Vec2::new(pose.heading.cos(), pose.heading.sin()).dot(&n);
                    if along == 0.0 {
                        random_sign(rng)
                    } else {
                        along.signum()
                    }
                }
                _ => random_sign(rng),
            };
            ControlInput::CarControl {
                drive_torque: sign * mag,
                steer_torque: uniform(rng, -c.steer_torque_max, c.steer_torque_max),
            }
        }
        (RobotKind::PlanarArm(arm), ControlRange::Joint { lower, upper }) => {
            let levers: Option<Vec<f64>> = match (push, &q.robot) {
                (Some(n), RobotState::Arm { angles, .. }) => {
                    let tool = arm.tool_point(angles);
                    Some(
                        arm.point_jacobian(angles, arm.joint_count() - 1, tool)
                            .iter()
                            .map(|c| c.dot(&n))
                            .collect(),
                    )
                }
                _ => None,
            };
            let torques = lower
                .iter()
                .zip(upper)
                .enumerate()
                .map(|(k, (lo, hi))| {
                    let mag = uniform(rng, *lo, *hi);
                    let sign = match &levers {
                        Some(l) if l[k] != 0.0 => l[k].signum(),
                        _ => random_sign(rng),
                    };
                    sign * mag
                })
                .collect();
            ControlInput::JointTorques(torques)
        }
        _ => panic!("control range does not fit the {} model", robot.label()),
    };
    let steps = rng.random_range(params.min_steps..=params.max_steps);
    (control, steps)
}

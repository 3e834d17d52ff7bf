//! Robot models: holonomic disk, car-like chassis and planar arm.

use serde::{Deserialize, Serialize};

use super::{perp, Pose2, Shape, Vec2};

/// Actuation bounds. Units follow the robot kind: N for the disk, drive
/// torque N·m for the car, joint torque N·m for the arm. `v_max` is m/s for
/// mobile robots and rad/s per joint for the arm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicBounds {
    pub lower: f64,
    pub upper: f64,
    pub v_max: f64,
}

impl DynamicBounds {
    pub fn is_valid(&self) -> bool {
        self.lower.is_finite()
            && self.upper.is_finite()
            && self.lower >= 0.0
            && self.lower < self.upper
            && self.v_max > 0.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CarParams {
    pub half_length: f64,
    pub half_width: f64,
    pub wheel_radius: f64,
    pub mass: f64,
    pub mu_wheel: f64,
    pub max_steer: f64,
    /// Steering actuator bound, sampled symmetrically.
    pub steer_torque_max: f64,
    pub steer_inertia: f64,
    pub steer_damping: f64,
    /// Rolling-resistance coefficient (force = c m g against the motion).
    pub rolling_resistance: f64,
    pub wheelbase: f64,
}

impl CarParams {
    pub fn chassis(&self) -> Shape {
        Shape::Box {
            half_width: self.half_length,
            half_depth: self.half_width,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArmParams {
    pub link_lengths: Vec<f64>,
    pub link_masses: Vec<f64>,
    pub link_thickness: f64,
    pub joint_limits: Vec<(f64, f64)>,
    pub base: Pose2,
    /// Viscous joint friction `b` in `I q̈ = τ − b q̇`.
    pub joint_damping: f64,
}

impl ArmParams {
    pub fn joint_count(&self) -> usize {
        self.link_lengths.len()
    }

    /// Diagonal joint inertias from point masses at link midpoints,
    /// aggregated along the straightened chain.
    pub fn joint_inertias(&self) -> Vec<f64> {
        let n = self.joint_count();
        (0..n)
            .map(|k| {
                let mut reach = 0.0;
                let mut inertia = 0.0;
                for j in k..n {
                    let d = reach + 0.5 * self.link_lengths[j];
                    inertia += self.link_masses[j] * d * d;
                    reach += self.link_lengths[j];
                }
                inertia
            })
            .collect()
    }

    pub fn reach(&self) -> f64 {
        self.link_lengths.iter().sum()
    }

    /// Joint origins plus the tool point, `n + 1` points.
    pub fn joint_positions(&self, angles: &[f64]) -> Vec<Vec2> {
        let mut pts = Vec::with_capacity(angles.len() + 1);
        let mut p = self.base.position;
        let mut heading = self.base.heading;
        pts.push(p);
        for (l, q) in self.link_lengths.iter().zip(angles) {
            heading += q;
            p += Vec2::new(heading.cos(), heading.sin()) * *l;
            pts.push(p);
        }
        pts
    }

    /// Link frames (origin at the proximal joint, x along the link).
    pub fn link_frames(&self, angles: &[f64]) -> Vec<Pose2> {
        let pts = self.joint_positions(angles);
        let mut heading = self.base.heading;
        angles
            .iter()
            .enumerate()
            .map(|(i, q)| {
                heading += q;
                Pose2::new(pts[i].x, pts[i].y, heading)
            })
            .collect()
    }

    pub fn tool_point(&self, angles: &[f64]) -> Vec2 {
        *self.joint_positions(angles).last().expect("arm has links")
    }

    /// Columns `∂p/∂q_k` for a point `p` rigidly attached to link `link`.
    /// Joints distal to that link contribute zero columns.
    pub fn point_jacobian(&self, angles: &[f64], link: usize, p: Vec2) -> Vec<Vec2> {
        let pts = self.joint_positions(angles);
        (0..self.joint_count())
            .map(|k| if k <= link { perp(p - pts[k]) } else { Vec2::zeros() })
            .collect()
    }

    pub fn link_shape(&self, link: usize) -> Shape {
        Shape::ChainLink {
            length: self.link_lengths[link],
            thickness: self.link_thickness,
        }
    }

    pub fn within_limits(&self, angles: &[f64]) -> bool {
        angles
            .iter()
            .zip(&self.joint_limits)
            .all(|(q, (lo, hi))| *q >= *lo && *q <= *hi)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RobotKind {
    HolonomicDisk { radius: f64, mass: f64, mu_ground: f64 },
    CarLike(CarParams),
    PlanarArm(ArmParams),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobotModel {
    pub kind: RobotKind,
    pub bounds: DynamicBounds,
}

impl RobotModel {
    pub fn label(&self) -> &'static str {
        match self.kind {
            RobotKind::HolonomicDisk { .. } => "holonomic_disk",
            RobotKind::CarLike(_) => "car_like",
            RobotKind::PlanarArm(_) => "planar_arm",
        }
    }

    pub fn arm(&self) -> Option<&ArmParams> {
        match &self.kind {
            RobotKind::PlanarArm(a) => Some(a),
            _ => None,
        }
    }

    /// Point in the goal / KPIECE projection: position for mobile robots,
    /// tool point for the arm.
    pub fn projection(&self, state: &RobotState) -> Vec2 {
        match (&self.kind, state) {
            (RobotKind::PlanarArm(arm), RobotState::Arm { angles, .. }) => arm.tool_point(angles),
            (_, RobotState::Holonomic { pose, .. }) | (_, RobotState::Car { pose, .. }) => {
                pose.position
            }
            _ => panic!("robot state does not match the robot model"),
        }
    }

    pub fn state_matches(&self, state: &RobotState) -> bool {
        match (&self.kind, state) {
            (RobotKind::HolonomicDisk { .. }, RobotState::Holonomic { .. }) => true,
            (RobotKind::CarLike(_), RobotState::Car { .. }) => true,
            (RobotKind::PlanarArm(a), RobotState::Arm { angles, rates }) => {
                angles.len() == a.joint_count() && rates.len() == a.joint_count()
            }
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RobotState {
    Holonomic {
        pose: Pose2,
        velocity: Vec2,
    },
    Car {
        pose: Pose2,
        /// Longitudinal speed along the heading, m/s.
        speed: f64,
        steer: f64,
        steer_rate: f64,
    },
    Arm {
        angles: Vec<f64>,
        rates: Vec<f64>,
    },
}

impl RobotState {
    /// Largest speed-like magnitude, compared against `DynamicBounds::v_max`.
    pub fn speed(&self) -> f64 {
        match self {
            RobotState::Holonomic { velocity, .. } => velocity.norm(),
            RobotState::Car { speed, .. } => speed.abs(),
            RobotState::Arm { rates, .. } => rates.iter().fold(0.0, |m, r| m.max(r.abs())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FootprintError {
    #[error("joint {joint} angle {angle} outside limits [{lower}, {upper}]")]
    JointLimit {
        joint: usize,
        angle: f64,
        lower: f64,
        upper: f64,
    },
    #[error("robot state does not match the {0} model")]
    Mismatch(&'static str),
}

/// World placements of every robot body. The arm contributes one link box
/// per joint, ordered base to tool.
pub fn robot_footprint(
    robot: &RobotModel,
    state: &RobotState,
) -> Result<Vec<(Shape, Pose2)>, FootprintError> {
    match (&robot.kind, state) {
        (RobotKind::HolonomicDisk { radius, .. }, RobotState::Holonomic { pose, .. }) => {
            Ok(vec![(Shape::Disk { radius: *radius }, *pose)])
        }
        (RobotKind::CarLike(car), RobotState::Car { pose, .. }) => Ok(vec![(car.chassis(), *pose)]),
        (RobotKind::PlanarArm(arm), RobotState::Arm { angles, .. }) => {
            if angles.len() != arm.joint_count() {
                return Err(FootprintError::Mismatch(robot.label()));
            }
            for (joint, (q, (lo, hi))) in angles.iter().zip(&arm.joint_limits).enumerate() {
                if q < lo || q > hi {
                    return Err(FootprintError::JointLimit {
                        joint,
                        angle: *q,
                        lower: *lo,
                        upper: *hi,
                    });
                }
            }
            Ok(arm
                .link_frames(angles)
                .into_iter()
                .enumerate()
                .map(|(i, f)| (arm.link_shape(i), f))
                .collect())
        }
        _ => Err(FootprintError::Mismatch(robot.label())),
    }
}

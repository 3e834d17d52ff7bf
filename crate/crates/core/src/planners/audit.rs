//! Whole-path checks of a kappa solution: contact-phase control strength and
//! region-only contacts over every substep.

use serde::{Deserialize, Serialize};

use crate::knowledge::{ManipulationKnowledge, RobotLocation};
use crate::physics::{propagate, ControlInput, SimConfig};
use crate::reasoning::{reasoning_process, ReasoningParams, REGION_TOLERANCE, SINGULAR_LEVER};
use crate::world::{ObjectClass, RobotKind, RobotState, Scene};

use super::PathFile;

/// Relative slack on force comparisons (direction times magnitude loses at
/// most a few ulps).
const SLACK: f64 = 1e-9;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub segments: usize,
    pub contact_segments: usize,
    pub events_checked: usize,
    pub violations: Vec<String>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Replays `path` segment by segment, re-deriving the knowledge at each
/// segment start. Contact-phase controls must reach the robot bound plus
/// the touched object's floor load; every robot contact must hit an active
/// region of a manipulatable object.
pub fn audit_path(scene: &Scene, km: &ManipulationKnowledge, path: &PathFile, cfg: &SimConfig) -> AuditReport {
    let mut report = AuditReport {
        segments: path.segments.len(),
        ..AuditReport::default()
    };
    let params = ReasoningParams { alpha: path.alpha };
    let b = scene.robot.bounds;
    let mut q = scene.initial.clone();
    for (i, seg) in path.segments.iter().enumerate() {
        let kappa = reasoning_process(km, &q, &params);
        if let RobotLocation::Contact { object, .. } = &kappa.location {
            report.contact_segments += 1;
            let spec = &scene.objects[scene.object_index(object).expect("known object")];
            let load = if spec.gravity_affected {
                spec.mu_ground * spec.mass * km.gravity
            } else {
                0.0
            };
            let ok = match (&scene.robot.kind, &seg.control, &q.robot) {
                (RobotKind::HolonomicDisk { .. }, ControlInput::PlanarForce(f), _) => {
                    f.norm() >= (b.lower + load) * (1.0 - SLACK)
                }
                (RobotKind::CarLike(c), ControlInput::CarControl { drive_torque, .. }, _) => {
                    drive_torque.abs() >= (b.lower + load * c.wheel_radius) * (1.0 - SLACK)
                }
                (RobotKind::PlanarArm(arm), ControlInput::JointTorques(t), RobotState::Arm { angles, .. }) => {
                    let n = kappa.push_direction.expect("contact has a push direction");
                    let tool = arm.tool_point(angles);
                    let reach = arm.reach();
                    arm.point_jacobian(angles, arm.joint_count() - 1, tool)
                        .iter()
                        .zip(t)
                        .all(|(col, tau)| {
                            let lever = col.dot(&n).abs();
                            let need = if lever < SINGULAR_LEVER {
                                b.lower
                            } else {
                                lever * (b.lower / reach + load)
                            };
                            tau.abs() >= need * (1.0 - SLACK)
                        })
                }
                _ => false,
            };
            if !ok {
                report
                    .violations
                    .push(format!("segment {i}: contact control below bound + floor load {load}"));
            }
        }
        let (next, log) = match propagate(scene, &q, &seg.control, seg.steps, cfg) {
            Ok(r) => r,
            Err(e) => {
                report.violations.push(format!("segment {i}: {e}"));
                return report;
            }
        };
        for e in log.contact_events() {
            report.events_checked += 1;
            let obj = &km.objects[e.object];
            if obj.class == ObjectClass::Fixed {
                report.violations.push(format!("segment {i}: contact with fixed {}", obj.id));
                continue;
            }
            let inside = obj
                .regions
                .iter()
                .any(|r| kappa.is_active(&r.id) && r.contains_local(e.local_point, REGION_TOLERANCE));
            if !inside {
                report
                    .violations
                    .push(format!("segment {i}: contact with {} outside active regions", obj.id));
            }
        }
        q = next;
    }
    report
}

//! Per-step reasoning over manipulation knowledge: which regions are usable,
//! where the robot is relative to them, and how strong controls should be.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::knowledge::{
    aligned, ControlRange, InstantiatedKnowledge, ManipulationKnowledge, ObjectSnapshot, RobotLocation,
};
use crate::world::geometry::{manifold, placed_overlap, Placed};
use crate::world::{
    region_world_polygon, robot_footprint, Face, ObjectClass, RegionId, RobotKind, RobotState, Vec2,
    WorkspaceState,
};

/// Bodies closer than this count as touching, m.
pub const TOUCH_TOLERANCE: f64 = 1e-3;
/// Slack when testing a contact point against a region box, m.
pub const REGION_TOLERANCE: f64 = 5e-3;
/// Jacobian columns shorter than this along the push are singular, m.
pub const SINGULAR_LEVER: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InactiveReason {
    OccupiedByObstacle,
    OppositeBlocked,
    RetypedConstraint,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionState {
    Active,
    Inactive(InactiveReason),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionStatus {
    pub regions: BTreeMap<RegionId, RegionState>,
    /// Per-object class for this step (free objects may become constrained).
    pub classes: Vec<ObjectClass>,
    /// Per-object motion axis for this step, object frame.
    pub axes: Vec<Option<Vec2>>,
}

impl RegionStatus {
    pub fn is_active(&self, id: &RegionId) -> bool {
        self.regions.get(id) == Some(&RegionState::Active)
    }

    pub fn active_set(&self) -> BTreeSet<RegionId> {
        self.regions
            .iter()
            .filter(|(_, s)| **s == RegionState::Active)
            .map(|(id, _)| id.clone())
            .collect()
    }
}

fn object_placed(km: &ManipulationKnowledge, q: &WorkspaceState, i: usize) -> Placed {
    Placed::new(&km.objects[i].props.shape, &q.objects[i].pose)
}

/// Region activation: a region overlapped by another object is occupied; a
/// region whose linked opposite is occupied is useless. A free object with
/// an occupied region is restricted to the remaining free axis this step.
pub fn update_manipulation_constraints(km: &ManipulationKnowledge, q: &WorkspaceState) -> RegionStatus {
    let placed: Vec<Placed> = (0..km.objects.len()).map(|i| object_placed(km, q, i)).collect();
    let mut regions = BTreeMap::new();
    let mut classes = Vec::with_capacity(km.objects.len());
    let mut axes = Vec::with_capacity(km.objects.len());
    for (i, obj) in km.objects.iter().enumerate() {
        let mut occupied: BTreeSet<&RegionId> = BTreeSet::new();
        let mut occupied_faces: Vec<Face> = Vec::new();
        for r in &obj.regions {
            let poly = Placed::Poly(region_world_polygon(r, &q.objects[i]));
            let hit = placed
                .iter()
                .enumerate()
                .any(|(j, p)| j != i && placed_overlap(&poly, p));
            if hit {
                occupied.insert(&r.id);
                occupied_faces.push(r.face);
            }
        }
        let mut class = obj.class;
        let mut axis = obj.motion_axis.filter(|_| class == ObjectClass::ConstraintOrientedManipulatable);
        if class == ObjectClass::FreeManipulatable && !occupied.is_empty() {
            let blocked = |a: Vec2| occupied_faces.iter().any(|f| aligned(f.outward_normal(), a));
            let free: Vec<Vec2> = [Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)]
                .into_iter()
                .filter(|a| !blocked(*a))
                .collect();
            if let [a] = free.as_slice() {
                class = ObjectClass::ConstraintOrientedManipulatable;
                axis = Some(*a);
            }
        }
        for r in &obj.regions {
            let state = if occupied.contains(&r.id) {
                RegionState::Inactive(InactiveReason::OccupiedByObstacle)
            } else if r.opposite.as_ref().is_some_and(|o| occupied.contains(o)) {
                RegionState::Inactive(InactiveReason::OppositeBlocked)
            } else if class != obj.class && !aligned(r.face.outward_normal(), axis.expect("retyped axis")) {
                RegionState::Inactive(InactiveReason::RetypedConstraint)
            } else {
                RegionState::Active
            };
            regions.insert(r.id.clone(), state);
        }
        classes.push(class);
        axes.push(axis);
    }
    RegionStatus { regions, classes, axes }
}

/// Robot bodies that may establish a pushing contact: the arm pushes with
/// its last link only.
fn pushing_bodies(km: &ManipulationKnowledge, q: &WorkspaceState) -> Vec<Placed> {
    let fp = robot_footprint(&km.robot, &q.robot).unwrap_or_default();
    let fp = match km.robot.kind {
        RobotKind::PlanarArm(_) => fp.into_iter().last().into_iter().collect(),
        _ => fp,
    };
    fp.iter().map(|(s, p)| Placed::new(s, p)).collect()
}

/// Classifies the robot as in contact through an active region, inside an
/// active region without touching anything, or moving freely. With several
/// contacted objects the one with the largest floor load wins.
pub fn compute_robot_location(q: &WorkspaceState, km: &ManipulationKnowledge, status: &RegionStatus) -> RobotLocation {
    let bodies = pushing_bodies(km, q);
    let mut touching_any = false;
    let mut best: Option<(f64, usize, RegionId)> = None;
    for (i, obj) in km.objects.iter().enumerate() {
        let target = object_placed(km, q, i);
        for body in &bodies {
            let Some(m) = manifold(body, &target, TOUCH_TOLERANCE) else {
                continue;
            };
            if m.min_separation() >= TOUCH_TOLERANCE {
                continue;
            }
            touching_any = true;
            if !obj.class.is_manipulatable() {
                continue;
            }
            let local = q.objects[i].pose.inverse_transform_point(m.centroid());
            let Some(region) = obj
                .regions
                .iter()
                .find(|r| status.is_active(&r.id) && r.contains_local(local, REGION_TOLERANCE))
            else {
                continue;
            };
            let load = obj.props.push_load(km.gravity);
            if best.as_ref().is_none_or(|(l, _, _)| load > *l) {
                best = Some((load, i, region.id.clone()));
            }
        }
    }
    if let Some((_, i, region)) = best {
        return RobotLocation::Contact {
            object: km.objects[i].id.clone(),
            region,
        };
    }
    if touching_any {
        return RobotLocation::Move;
    }
    let in_region = km.regions().any(|(i, r)| {
        if !status.is_active(&r.id) {
            return false;
        }
        let poly = Placed::Poly(region_world_polygon(r, &q.objects[i]));
        match (&km.robot.kind, &q.robot) {
            (RobotKind::PlanarArm(arm), RobotState::Arm { angles, .. }) => poly.contains(arm.tool_point(angles), 0.0),
            _ => bodies.iter().any(|b| placed_overlap(b, &poly)),
        }
    });
    if in_region {
        RobotLocation::Interaction
    } else {
        RobotLocation::Move
    }
}

/// Floor load of the contacted object, N (zero away from contact).
pub fn contact_load(location: &RobotLocation, km: &ManipulationKnowledge) -> f64 {
    match location {
        RobotLocation::Contact { object, .. } => km
            .object_index(object)
            .map(|i| km.objects[i].props.push_load(km.gravity))
            .unwrap_or(0.0),
        _ => 0.0,
    }
}

/// World push direction of the contacted region.
pub fn push_direction(location: &RobotLocation, km: &ManipulationKnowledge, q: &WorkspaceState) -> Option<Vec2> {
    let RobotLocation::Contact { region, .. } = location else {
        return None;
    };
    let (i, r) = km.region(region)?;
    Some(q.objects[i].pose.transform_vector(r.push_direction))
}

/// The unmodified range from the robot's dynamic bounds.
pub fn move_range(km: &ManipulationKnowledge) -> ControlRange {
    let b = km.robot.bounds;
    match &km.robot.kind {
        RobotKind::PlanarArm(a) => ControlRange::Joint {
            lower: vec![b.lower; a.joint_count()],
            upper: vec![b.upper; a.joint_count()],
        },
        _ => ControlRange::Magnitude {
            lower: b.lower,
            upper: b.upper,
        },
    }
}

/// Adaptive range: the bounds away from regions, scaled by `alpha` inside an
/// active region, shifted up by the object's floor load at contact. Arm
/// ranges are mapped to joint torque magnitudes through the transposed
/// Jacobian along the push direction. Returns the range and whether a
/// singular joint fell back to the move range.
pub fn compute_control_range(
    location: &RobotLocation,
    km: &ManipulationKnowledge,
    q: &WorkspaceState,
    alpha: f64,
) -> (ControlRange, bool) {
    let b = km.robot.bounds;
    match location {
        RobotLocation::Move => (move_range(km), false),
        RobotLocation::Interaction => {
            let r = match move_range(km) {
                ControlRange::Magnitude { lower, upper } => ControlRange::Magnitude {
                    lower: alpha * lower,
                    upper: alpha * upper,
                },
                ControlRange::Joint { lower, upper } => ControlRange::Joint {
                    lower: lower.iter().map(|l| alpha * l).collect(),
                    upper: upper.iter().map(|u| alpha * u).collect(),
                },
            };
            (r, false)
        }
        RobotLocation::Contact { .. } => {
            let load = contact_load(location, km);
            match (&km.robot.kind, &q.robot) {
                (RobotKind::HolonomicDisk { .. }, _) => (
                    ControlRange::Magnitude {
                        lower: b.lower + load,
                        upper: b.upper + load,
                    },
                    false,
                ),
                (RobotKind::CarLike(c), _) => {
                    let shift = load * c.wheel_radius;
                    (
                        ControlRange::Magnitude {
                            lower: b.lower + shift,
                            upper: b.upper + shift,
                        },
                        false,
                    )
                }
                (RobotKind::PlanarArm(arm), RobotState::Arm { angles, .. }) => {
                    let n = push_direction(location, km, q).expect("contact region exists");
                    let (f_lo, f_hi) = km.robot_props.force_bounds;
                    let tool = arm.tool_point(angles);
                    let cols = arm.point_jacobian(angles, arm.joint_count() - 1, tool);
                    let mut fallback = false;
                    let mut lower = Vec::with_capacity(cols.len());
                    let mut upper = Vec::with_capacity(cols.len());
                    for col in cols {
                        let lever = col.dot(&n).abs();
                        if lever < SINGULAR_LEVER {
                            fallback = true;
                            lower.push(b.lower);
                            upper.push(b.upper);
                        } else {
                            lower.push(lever * (f_lo + load));
                            upper.push(lever * (f_hi + load));
                        }
                    }
                    (ControlRange::Joint { lower, upper }, fallback)
                }
                _ => (move_range(km), false),
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReasoningParams {
    /// Pre-contact slowdown factor inside active regions.
    pub alpha: f64,
}

impl Default for ReasoningParams {
    fn default() -> Self {
        Self { alpha: 0.5 }
    }
}

/// Full reasoning pass producing the knowledge for one planning step.
pub fn reasoning_process(km: &ManipulationKnowledge, q: &WorkspaceState, params: &ReasoningParams) -> InstantiatedKnowledge {
    let status = update_manipulation_constraints(km, q);
    let location = compute_robot_location(q, km, &status);
    let (control_range, jacobian_fallback) = compute_control_range(&location, km, q, params.alpha);
    let objects = km
        .objects
        .iter()
        .enumerate()
        .map(|(i, o)| ObjectSnapshot {
            class: status.classes[i],
            constraint: status.axes[i],
            props: o.props,
        })
        .collect();
    InstantiatedKnowledge {
        active_regions: status.active_set(),
        control_range,
        objects,
        push_direction: push_direction(&location, km, q),
        contact_load: contact_load(&location, km),
        location,
        jacobian_fallback,
    }
}

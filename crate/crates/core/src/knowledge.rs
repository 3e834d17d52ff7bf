//! Semantic facts about the scene, the one-off inference of manipulation
//! knowledge, and the per-step instantiated knowledge the planner consumes.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::world::scene::link_opposites;
use crate::world::{
    DynamicBounds, Face, ManipulationRegion, ObjectClass, ObjectId, ObjectSpec, RegionId, RegionParams, RobotKind,
    RobotModel, Scene, Shape, Vec2,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum KnowledgeError {
    #[error("object {object} is asserted to be both {first:?} and {second:?}")]
    Inconsistent {
        object: ObjectId,
        first: ObjectClass,
        second: ObjectClass,
    },
    #[error("object {0} is not manipulatable and owns no regions")]
    NotManipulatable(ObjectId),
}

/// A numeric data property with its unit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DataProperty {
    pub name: String,
    pub value: f64,
    pub unit: String,
}

fn prop(name: &str, value: f64, unit: &str) -> DataProperty {
    DataProperty {
        name: name.into(),
        value,
        unit: unit.into(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectFacts {
    pub id: ObjectId,
    /// Every class assertion found for the object, in declaration order.
    pub classes: Vec<ObjectClass>,
    pub data: Vec<DataProperty>,
    pub gravity_affected: bool,
    pub shape: Shape,
    /// Composition, e.g. a car's wheels and body.
    pub parts: Vec<String>,
    /// Motion-axis assertion in the object frame.
    pub motion_axis: Option<Vec2>,
    /// Faces the scene permits regions on.
    pub permitted_faces: Vec<Face>,
}

impl ObjectFacts {
    pub fn data_value(&self, name: &str) -> Option<f64> {
        self.data.iter().find(|d| d.name == name).map(|d| d.value)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobotFacts {
    pub model: RobotModel,
    pub kinematic: Vec<DataProperty>,
    pub dynamic: Vec<DataProperty>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SemanticKnowledge {
    pub objects: Vec<ObjectFacts>,
    pub robot: RobotFacts,
    pub region_params: RegionParams,
}

impl SemanticKnowledge {
    /// Collects facts from a scene: one class assertion per declared object
    /// plus any extra assertions of the knowledge section.
    pub fn from_scene(scene: &Scene) -> Self {
        let objects = scene
            .objects
            .iter()
            .map(|spec| {
                let mut classes = vec![spec.class];
                for a in scene.class_assertions.iter().filter(|a| a.object == spec.id) {
                    if !classes.contains(&a.class) {
                        classes.push(a.class);
                    }
                }
                ObjectFacts {
                    id: spec.id.clone(),
                    classes,
                    data: object_data(spec),
                    gravity_affected: spec.gravity_affected,
                    shape: spec.shape,
                    parts: spec.parts.clone(),
                    motion_axis: spec.motion_constraint,
                    permitted_faces: spec.regions.iter().map(|r| r.face).collect(),
                }
            })
            .collect();
        Self {
            objects,
            robot: robot_facts(&scene.robot),
            region_params: scene.region_params,
        }
    }
}

fn object_data(spec: &ObjectSpec) -> Vec<DataProperty> {
    let mut d = vec![prop("mass", spec.mass, "kg"), prop("mu_ground", spec.mu_ground, "1")];
    match spec.shape {
        Shape::Disk { radius } => d.push(prop("radius", radius, "m")),
        Shape::Box {
            half_width,
            half_depth,
        } => {
            d.push(prop("half_width", half_width, "m"));
            d.push(prop("half_depth", half_depth, "m"));
        }
        Shape::ChainLink { length, thickness } => {
            d.push(prop("length", length, "m"));
            d.push(prop("thickness", thickness, "m"));
        }
    }
    d
}

fn robot_facts(model: &RobotModel) -> RobotFacts {
    let b = model.bounds;
    let (unit, kinematic) = match &model.kind {
        RobotKind::HolonomicDisk { .. } => ("N", Vec::new()),
        RobotKind::CarLike(c) => ("N·m", vec![prop("max_steer", c.max_steer, "rad")]),
        RobotKind::PlanarArm(a) => (
            "N·m",
            a.joint_limits
                .iter()
                .enumerate()
                .flat_map(|(k, (lo, hi))| {
                    [
                        prop(&format!("joint{k}_lower"), *lo, "rad"),
                        prop(&format!("joint{k}_upper"), *hi, "rad"),
                    ]
                })
                .collect(),
        ),
    };
    let speed_unit = if model.arm().is_some() { "rad/s" } else { "m/s" };
    RobotFacts {
        model: model.clone(),
        kinematic,
        dynamic: vec![
            prop("lower", b.lower, unit),
            prop("upper", b.upper, unit),
            prop("v_max", b.v_max, speed_unit),
        ],
    }
}

/// Mass, friction, gravity flag and geometry of an object.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalProps {
    pub mass: f64,
    pub mu_ground: f64,
    pub gravity_affected: bool,
    pub shape: Shape,
}

impl PhysicalProps {
    /// Minimum sustained force that slides the object on the floor.
    pub fn push_load(&self, gravity: f64) -> f64 {
        if self.gravity_affected {
            self.mu_ground * self.mass * gravity
        } else {
            0.0
        }
    }
}

pub fn object_properties(spec: &ObjectSpec) -> PhysicalProps {
    PhysicalProps {
        mass: spec.mass,
        mu_ground: spec.mu_ground,
        gravity_affected: spec.gravity_affected,
        shape: spec.shape,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobotProps {
    pub bounds: DynamicBounds,
    pub joint_limits: Vec<(f64, f64)>,
    /// Steering limit of a car, rad.
    pub max_steer: Option<f64>,
    /// Contact-force range in N the control bounds correspond to.
    pub force_bounds: (f64, f64),
    /// Largest push force the robot can sustain, N.
    pub push_capacity: f64,
}

pub fn robot_properties(model: &RobotModel) -> RobotProps {
    let b = model.bounds;
    let (joint_limits, max_steer, force_bounds) = match &model.kind {
        RobotKind::HolonomicDisk { .. } => (Vec::new(), None, (b.lower, b.upper)),
        RobotKind::CarLike(c) => (
            Vec::new(),
            Some(c.max_steer),
            (b.lower / c.wheel_radius, b.upper / c.wheel_radius),
        ),
        RobotKind::PlanarArm(a) => {
            let reach = a.reach();
            (a.joint_limits.clone(), None, (b.lower / reach, b.upper / reach))
        }
    };
    RobotProps {
        bounds: b,
        joint_limits,
        max_steer,
        force_bounds,
        push_capacity: push_capacity(model),
    }
}

/// Push capacity in N: `f_max` for the disk, `τ_max / r` for the car, and for
/// the arm the largest tool force reachable within the joint torque bound at
/// the mid-limits configuration, over all push directions.
pub fn push_capacity(model: &RobotModel) -> f64 {
    match &model.kind {
        RobotKind::HolonomicDisk { .. } => model.bounds.upper,
        RobotKind::CarLike(c) => model.bounds.upper / c.wheel_radius,
        RobotKind::PlanarArm(a) => {
            let mid: Vec<f64> = a.joint_limits.iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect();
            let tool = a.tool_point(&mid);
            let cols = a.point_jacobian(&mid, a.joint_count() - 1, tool);
            let tau = model.bounds.upper;
            (0..720)
                .map(|i| {
                    let t = i as f64 * std::f64::consts::PI / 720.0;
                    let n = Vec2::new(t.cos(), t.sin());
                    cols.iter()
                        .map(|c| {
                            let lever = c.dot(&n).abs();
                            if lever > 1e-12 {
                                tau / lever
                            } else {
                                f64::INFINITY
                            }
                        })
                        .fold(f64::INFINITY, f64::min)
                })
                .filter(|f| f.is_finite())
                .fold(0.0, f64::max)
        }
    }
}

/// Declared class, except that a manipulatable object the robot cannot
/// slide (`μ m g > capacity`) is treated as fixed.
pub fn object_classification(spec: &ObjectSpec, capacity: f64, gravity: f64) -> ObjectClass {
    classify(spec.class, &object_properties(spec), capacity, gravity)
}

fn classify(declared: ObjectClass, props: &PhysicalProps, capacity: f64, gravity: f64) -> ObjectClass {
    if declared.is_manipulatable() && props.push_load(gravity) > capacity {
        ObjectClass::Fixed
    } else {
        declared
    }
}

/// Regions of a manipulatable object: one per face for free objects, only
/// the faces pushing along the motion axis for constrained ones. Faces the
/// scene lists act as a whitelist when present.
pub fn manipulatable_region(spec: &ObjectSpec, params: &RegionParams) -> Result<Vec<ManipulationRegion>, KnowledgeError> {
    regions_for(
        &spec.id,
        spec.class,
        &spec.shape,
        spec.motion_constraint,
        &spec.regions.iter().map(|r| r.face).collect::<Vec<_>>(),
        params,
    )
}

fn regions_for(
    id: &ObjectId,
    class: ObjectClass,
    shape: &Shape,
    axis: Option<Vec2>,
    permitted: &[Face],
    params: &RegionParams,
) -> Result<Vec<ManipulationRegion>, KnowledgeError> {
    if !class.is_manipulatable() {
        return Err(KnowledgeError::NotManipulatable(id.clone()));
    }
    let mut regions: Vec<ManipulationRegion> = Face::ALL
        .iter()
        .filter(|f| permitted.is_empty() || permitted.contains(f))
        .filter(|f| match (class, axis) {
            (ObjectClass::ConstraintOrientedManipulatable, Some(a)) => aligned(f.outward_normal(), a),
            _ => true,
        })
        .filter_map(|f| ManipulationRegion::on_face(id, shape, *f, params))
        .collect();
    link_opposites(&mut regions);
    Ok(regions)
}

/// Whether a face normal pushes along `axis` (either sense).
pub fn aligned(normal: Vec2, axis: Vec2) -> bool {
    normal.dot(&axis).abs() > std::f64::consts::FRAC_1_SQRT_2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectKnowledge {
    pub id: ObjectId,
    pub declared: ObjectClass,
    pub class: ObjectClass,
    pub regions: Vec<ManipulationRegion>,
    pub props: PhysicalProps,
    pub motion_axis: Option<Vec2>,
    /// Faces allowed by the scene (empty: all).
    pub permitted_faces: Vec<Face>,
}

/// Planner-facing knowledge, inferred once and immutable afterwards.
/// `objects` is index-aligned with the scene's objects.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManipulationKnowledge {
    pub objects: Vec<ObjectKnowledge>,
    pub robot: RobotModel,
    pub robot_props: RobotProps,
    pub region_params: RegionParams,
    pub gravity: f64,
}

impl ManipulationKnowledge {
    pub fn regions(&self) -> impl Iterator<Item = (usize, &ManipulationRegion)> {
        self.objects
            .iter()
            .enumerate()
            .flat_map(|(i, o)| o.regions.iter().map(move |r| (i, r)))
    }

    pub fn region(&self, id: &RegionId) -> Option<(usize, &ManipulationRegion)> {
        self.regions().find(|(_, r)| r.id == *id)
    }

    pub fn object_index(&self, id: &ObjectId) -> Option<usize> {
        self.objects.iter().position(|o| o.id == *id)
    }

    /// Largest floor load among manipulatable objects, N.
    pub fn max_push_load(&self) -> f64 {
        self.objects
            .iter()
            .filter(|o| o.class.is_manipulatable())
            .map(|o| o.props.push_load(self.gravity))
            .fold(0.0, f64::max)
    }
}

/// Applies classification, region generation and property projection to
/// every object.
pub fn infer_manipulation_knowledge(ks: &SemanticKnowledge, gravity: f64) -> Result<ManipulationKnowledge, KnowledgeError> {
    let robot_props = robot_properties(&ks.robot.model);
    let mut objects = Vec::with_capacity(ks.objects.len());
    for facts in &ks.objects {
        let declared = match facts.classes.as_slice() {
            [one] => *one,
            [first, second, ..] => {
                return Err(KnowledgeError::Inconsistent {
                    object: facts.id.clone(),
                    first: *first,
                    second: *second,
                })
            }
            [] => unreachable!("every object carries its declared class"),
        };
        let props = PhysicalProps {
            mass: facts.data_value("mass").unwrap_or(0.0),
            mu_ground: facts.data_value("mu_ground").unwrap_or(0.0),
            gravity_affected: facts.gravity_affected,
            shape: facts.shape,
        };
        let class = classify(declared, &props, robot_props.push_capacity, gravity);
        let regions = if class.is_manipulatable() {
            regions_for(
                &facts.id,
                class,
                &facts.shape,
                facts.motion_axis,
                &facts.permitted_faces,
                &ks.region_params,
            )?
        } else {
            Vec::new()
        };
        objects.push(ObjectKnowledge {
            id: facts.id.clone(),
            declared,
            class,
            regions,
            props,
            motion_axis: facts.motion_axis,
            permitted_faces: facts.permitted_faces.clone(),
        });
    }
    Ok(ManipulationKnowledge {
        objects,
        robot: ks.robot.model.clone(),
        robot_props,
        region_params: ks.region_params,
        gravity,
    })
}

/// Semantic extraction and inference in one call.
pub fn infer_from_scene(scene: &Scene, gravity: f64) -> Result<ManipulationKnowledge, KnowledgeError> {
    infer_manipulation_knowledge(&SemanticKnowledge::from_scene(scene), gravity)
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RobotLocation {
    Move,
    Interaction,
    Contact { object: ObjectId, region: RegionId },
}

/// Sampling range for controls. Magnitudes: the disk samples force norms
/// (N), the car drive torques (N·m), the arm per-joint torque magnitudes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControlRange {
    Magnitude { lower: f64, upper: f64 },
    Joint { lower: Vec<f64>, upper: Vec<f64> },
}

impl ControlRange {
    pub fn is_valid(&self) -> bool {
        match self {
            ControlRange::Magnitude { lower, upper } => lower <= upper,
            ControlRange::Joint { lower, upper } => {
                lower.len() == upper.len() && lower.iter().zip(upper).all(|(l, u)| l <= u)
            }
        }
    }
}

/// Object view for one planning step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectSnapshot {
    pub class: ObjectClass,
    /// Applicable motion axis (object frame), including a temporary one from
    /// reasoning.
    pub constraint: Option<Vec2>,
    pub props: PhysicalProps,
}

/// Knowledge valid for one planning step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstantiatedKnowledge {
    pub active_regions: BTreeSet<RegionId>,
    pub control_range: ControlRange,
    pub objects: Vec<ObjectSnapshot>,
    pub location: RobotLocation,
    /// Push direction (world) of the contacted region.
    pub push_direction: Option<Vec2>,
    /// Floor load added to the range at contact, N.
    pub contact_load: f64,
    /// A singular arm configuration forced the move-range fallback.
    pub jacobian_fallback: bool,
}

impl InstantiatedKnowledge {
    pub fn is_active(&self, id: &RegionId) -> bool {
        self.active_regions.contains(id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::parse_scene;

    const SCENE: &str = r#"
name = "k"
[arena]
min = [-3.0, -3.0]
max = [3.0, 3.0]
[robot]
kind = "holonomic_disk"
radius = 0.1
mass = 1.0
mu_ground = 0.1
bounds = { lower = 1.0, upper = 10.0, v_max = 1.0 }
start = [-2.0, 0.0]
[goal]
center = [2.0, 0.0]
radius = 0.2
[[objects]]
id = "cube"
class = "free_manipulatable"
shape = { box = { half_width = 0.5, half_depth = 0.5 } }
pose = [0.0, 0.0, 0.0]
mass = 1.0
mu_ground = 0.5
[[objects]]
id = "anvil"
class = "free_manipulatable"
shape = { box = { half_width = 0.2, half_depth = 0.2 } }
pose = [0.0, 2.0, 0.0]
mass = 50.0
mu_ground = 0.5
[[objects]]
id = "car"
class = "constraint_oriented_manipulatable"
shape = { box = { half_width = 0.4, half_depth = 0.2 } }
pose = [1.5, -2.0, 0.0]
mass = 2.0
mu_ground = 0.3
constraint_axis = [1.0, 0.0]
parts = ["body", "wheel_fl", "wheel_fr", "wheel_rl", "wheel_rr"]
[[objects]]
id = "wall"
class = "fixed"
shape = { box = { half_width = 0.1, half_depth = 1.0 } }
pose = [2.5, 0.0, 0.0]
mass = 100.0
mu_ground = 1.0
"#;

    #[test]
    fn classification_follows_push_capacity() {
        let scene = parse_scene(SCENE).unwrap();
        let cap = push_capacity(&scene.robot);
        assert_eq!(cap, 10.0);
        assert_eq!(object_classification(&scene.objects[0], cap, 9.8), ObjectClass::FreeManipulatable);
        // 0.5 · 50 · 9.8 = 245 N > 10 N
        assert_eq!(object_classification(&scene.objects[1], cap, 9.8), ObjectClass::Fixed);
        assert_eq!(object_classification(&scene.objects[3], cap, 9.8), ObjectClass::Fixed);
    }

    #[test]
    fn free_box_gets_four_inward_regions() {
        let scene = parse_scene(SCENE).unwrap();
        let regions = manipulatable_region(&scene.objects[0], &scene.region_params).unwrap();
        assert_eq!(regions.len(), 4);
        let mut dirs: Vec<(i64, i64)> = regions
            .iter()
            .map(|r| (r.push_direction.x.round() as i64, r.push_direction.y.round() as i64))
            .collect();
        dirs.sort();
        assert_eq!(dirs, vec![(-1, 0), (0, -1), (0, 1), (1, 0)]);
        for r in &regions {
            assert!((r.push_direction + r.face.outward_normal()).norm() < 1e-12);
            assert!(r.opposite.is_some());
        }
    }

    #[test]
    fn constrained_car_gets_linked_front_and_rear() {
        let scene = parse_scene(SCENE).unwrap();
        let regions = manipulatable_region(&scene.objects[2], &scene.region_params).unwrap();
        assert_eq!(regions.len(), 2);
        assert_eq!(regions[0].opposite.as_ref(), Some(&regions[1].id));
        assert_eq!(regions[1].opposite.as_ref(), Some(&regions[0].id));
        assert!(regions.iter().all(|r| r.push_direction.y == 0.0));
    }

    #[test]
    fn fixed_wall_has_no_regions() {
        let scene = parse_scene(SCENE).unwrap();
        assert_eq!(
            manipulatable_region(&scene.objects[3], &scene.region_params),
            Err(KnowledgeError::NotManipulatable(ObjectId::from("wall")))
        );
    }

    #[test]
    fn inference_reclassifies_and_is_repeatable() {
        let scene = parse_scene(SCENE).unwrap();
        let km = infer_from_scene(&scene, 9.8).unwrap();
        assert_eq!(km.objects[1].class, ObjectClass::Fixed);
        assert!(km.objects[1].regions.is_empty());
        assert_eq!(km.objects[0].regions.len(), 4);
        assert_eq!(km, infer_from_scene(&scene, 9.8).unwrap());
        for (i, _) in km.regions() {
            assert!(km.objects[i].class.is_manipulatable());
        }
    }

    #[test]
    fn two_class_assertions_are_inconsistent() {
        let text = SCENE.replacen(
            "[robot]",
            "[knowledge]\nclass_assertions = [{ object = \"cube\", class = \"fixed\" }]\n[robot]",
            1,
        );
        let scene = parse_scene(&text).unwrap();
        let err = infer_from_scene(&scene, 9.8).unwrap_err();
        assert!(matches!(err, KnowledgeError::Inconsistent { ref object, .. } if object.0 == "cube"));
    }

    #[test]
    fn every_data_property_has_a_unit() {
        let scene = parse_scene(SCENE).unwrap();
        let ks = SemanticKnowledge::from_scene(&scene);
        for o in &ks.objects {
            assert_eq!(o.classes.len(), 1);
            assert!(o.data.iter().all(|d| !d.unit.is_empty()));
        }
        assert!(ks.robot.dynamic.iter().all(|d| !d.unit.is_empty()));
    }

    #[test]
    fn object_properties_project_the_spec() {
        let scene = parse_scene(SCENE).unwrap();
        let p = object_properties(&scene.objects[2]);
        assert_eq!((p.mass, p.mu_ground, p.gravity_affected), (2.0, 0.3, true));
        assert_eq!(p.shape, scene.objects[2].shape);
    }
}

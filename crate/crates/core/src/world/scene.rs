//! Scene files: TOML documents describing the arena, objects, robot,
//! initial placement and goal. Unknown keys are rejected.
//!
//! ```toml
//! name = "example"
//!
//! [arena]
//! min = [-2.0, -1.5]
//! max = [2.0, 1.5]
//! walls = true            # optional: fixed boundary walls
//! wall_thickness = 0.1    # optional
//!
//! [knowledge]             # optional
//! region_depth_ratio = 0.25
//! region_span_ratio = 0.8
//! class_assertions = [{ object = "cube", class = "fixed" }]
//!
//! [robot]
//! kind = "holonomic_disk" # | "car_like" | "planar_arm"
//! radius = 0.15
//! mass = 1.0
//! mu_ground = 0.1
//! bounds = { lower = 1.0, upper = 6.0, v_max = 1.5 }
//! start = [-1.5, 0.0, 0.0]
//!
//! [goal]
//! center = [1.5, 0.0]
//! radius = 0.2
//!
//! [[objects]]
//! id = "cube"
//! class = "free_manipulatable"
//! shape = { box = { half_width = 0.15, half_depth = 0.15 } }
//! pose = [0.0, 0.0, 0.0]
//! mass = 0.5
//! mu_ground = 0.4
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::geometry::placed_overlap;
use super::robot::{robot_footprint, ArmParams, CarParams, DynamicBounds, RobotKind, RobotModel, RobotState};
use super::{
    Face, ManipulationRegion, ObjectClass, ObjectId, ObjectSpec, ObjectState, Placed, Pose2, Shape,
    Vec2, WorkspaceState,
};

#[derive(Debug, thiserror::Error)]
pub enum SceneError {
    #[error("cannot read scene file {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed scene file: {0}")]
    Parse(String),
    #[error("invalid entity `{entity}`: {reason}")]
    Invalid { entity: String, reason: String },
}

fn invalid(entity: impl Into<String>, reason: impl Into<String>) -> SceneError {
    SceneError::Invalid {
        entity: entity.into(),
        reason: reason.into(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionParams {
    /// Region depth as a fraction of the owner's largest half-extent.
    pub depth_ratio: f64,
    /// Fraction of the face length covered by the region.
    pub span_ratio: f64,
}

impl Default for RegionParams {
    fn default() -> Self {
        Self {
            depth_ratio: 0.25,
            span_ratio: 0.8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Arena {
    pub min: Vec2,
    pub max: Vec2,
    pub walls: bool,
    pub wall_thickness: f64,
}

impl Arena {
    pub fn extent(&self) -> Vec2 {
        self.max - self.min
    }
}

/// Ball of `radius` around `center` in the robot projection.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Goal {
    pub center: Vec2,
    pub radius: f64,
}

impl Goal {
    pub fn contains(&self, p: Vec2) -> bool {
        (p - self.center).norm() <= self.radius
    }
}

/// An extra class fact about an object, on top of the declared class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassAssertion {
    pub object: ObjectId,
    pub class: ObjectClass,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scene {
    pub name: String,
    pub arena: Arena,
    pub objects: Vec<ObjectSpec>,
    pub robot: RobotModel,
    pub initial: WorkspaceState,
    pub goal: Goal,
    pub region_params: RegionParams,
    pub class_assertions: Vec<ClassAssertion>,
}

impl Scene {
    pub fn object_index(&self, id: &ObjectId) -> Option<usize> {
        self.objects.iter().position(|o| &o.id == id)
    }

    /// Canonical TOML rendering; `parse_scene(s.to_toml())` reproduces `s`.
    pub fn to_toml(&self) -> String {
        toml::to_string(&SceneFile::from_scene(self)).expect("scene serialises")
    }

    /// SHA-256 of the canonical rendering, hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_toml().as_bytes()))
    }
}

// ---- file schema -------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneFile {
    name: String,
    arena: ArenaEntry,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    knowledge: Option<KnowledgeEntry>,
    robot: RobotEntry,
    goal: GoalEntry,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    objects: Vec<ObjectEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArenaEntry {
    min: [f64; 2],
    max: [f64; 2],
    #[serde(default)]
    walls: bool,
    #[serde(default = "default_wall_thickness")]
    wall_thickness: f64,
}

fn default_wall_thickness() -> f64 {
    0.1
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct KnowledgeEntry {
    #[serde(default = "default_depth_ratio")]
    region_depth_ratio: f64,
    #[serde(default = "default_span_ratio")]
    region_span_ratio: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    class_assertions: Vec<ClassAssertion>,
}

fn default_depth_ratio() -> f64 {
    RegionParams::default().depth_ratio
}

fn default_span_ratio() -> f64 {
    RegionParams::default().span_ratio
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GoalEntry {
    center: [f64; 2],
    radius: f64,
}

fn default_true() -> bool {
    true
}

fn is_true(b: &bool) -> bool {
    *b
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObjectEntry {
    id: String,
    class: ObjectClass,
    shape: Shape,
    pose: [f64; 3],
    mass: f64,
    mu_ground: f64,
    #[serde(default = "default_true", skip_serializing_if = "is_true")]
    gravity: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    regions: Vec<Face>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    constraint_axis: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    parts: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RobotEntry {
    HolonomicDisk {
        radius: f64,
        mass: f64,
        mu_ground: f64,
        bounds: DynamicBounds,
        start: [f64; 2],
    },
    CarLike {
        half_length: f64,
        half_width: f64,
        wheel_radius: f64,
        mass: f64,
        mu_wheel: f64,
        max_steer: f64,
        steer_torque_max: f64,
        #[serde(default = "default_steer_inertia")]
        steer_inertia: f64,
        #[serde(default = "default_steer_damping")]
        steer_damping: f64,
        #[serde(default)]
        rolling_resistance: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        wheelbase: Option<f64>,
        bounds: DynamicBounds,
        /// x, y, heading
        start: [f64; 3],
    },
    PlanarArm {
        link_lengths: Vec<f64>,
        link_masses: Vec<f64>,
        link_thickness: f64,
        joint_limits: Vec<[f64; 2]>,
        /// x, y, heading of the base frame
        base: [f64; 3],
        #[serde(default)]
        joint_damping: f64,
        bounds: DynamicBounds,
        start_angles: Vec<f64>,
    },
}

fn default_steer_inertia() -> f64 {
    0.02
}

fn default_steer_damping() -> f64 {
    0.05
}

impl SceneFile {
    fn from_scene(scene: &Scene) -> SceneFile {
        let p = |v: Vec2| [v.x, v.y];
        let robot = match (&scene.robot.kind, &scene.initial.robot) {
            (RobotKind::HolonomicDisk { radius, mass, mu_ground }, RobotState::Holonomic { pose, .. }) => {
                RobotEntry::HolonomicDisk {
                    radius: *radius,
                    mass: *mass,
                    mu_ground: *mu_ground,
                    bounds: scene.robot.bounds,
                    start: p(pose.position),
                }
            }
            (RobotKind::CarLike(c), RobotState::Car { pose, .. }) => RobotEntry::CarLike {
                half_length: c.half_length,
                half_width: c.half_width,
                wheel_radius: c.wheel_radius,
                mass: c.mass,
                mu_wheel: c.mu_wheel,
                max_steer: c.max_steer,
                steer_torque_max: c.steer_torque_max,
                steer_inertia: c.steer_inertia,
                steer_damping: c.steer_damping,
                rolling_resistance: c.rolling_resistance,
                wheelbase: Some(c.wheelbase),
                bounds: scene.robot.bounds,
                start: [pose.position.x, pose.position.y, pose.heading],
            },
            (RobotKind::PlanarArm(a), RobotState::Arm { angles, .. }) => RobotEntry::PlanarArm {
                link_lengths: a.link_lengths.clone(),
                link_masses: a.link_masses.clone(),
                link_thickness: a.link_thickness,
                joint_limits: a.joint_limits.iter().map(|(l, h)| [*l, *h]).collect(),
                base: [a.base.position.x, a.base.position.y, a.base.heading],
                joint_damping: a.joint_damping,
                bounds: scene.robot.bounds,
                start_angles: angles.clone(),
            },
            _ => unreachable!("validated scene has matching robot state"),
        };
        let objects = scene
            .objects
            .iter()
            .zip(&scene.initial.objects)
            .filter(|(spec, _)| !spec.generated)
            .map(|(spec, st)| ObjectEntry {
                id: spec.id.0.clone(),
                class: spec.class,
                shape: spec.shape,
                pose: [st.pose.position.x, st.pose.position.y, st.pose.heading],
                mass: spec.mass,
                mu_ground: spec.mu_ground,
                gravity: spec.gravity_affected,
                regions: spec.regions.iter().map(|r| r.face).collect(),
                constraint_axis: spec.motion_constraint.map(p),
                parts: spec.parts.clone(),
            })
            .collect();
        let default_params = RegionParams::default();
        let knowledge = (scene.region_params != default_params || !scene.class_assertions.is_empty())
            .then(|| KnowledgeEntry {
                region_depth_ratio: scene.region_params.depth_ratio,
                region_span_ratio: scene.region_params.span_ratio,
                class_assertions: scene.class_assertions.clone(),
            });
        SceneFile {
            name: scene.name.clone(),
            arena: ArenaEntry {
                min: p(scene.arena.min),
                max: p(scene.arena.max),
                walls: scene.arena.walls,
                wall_thickness: scene.arena.wall_thickness,
            },
            knowledge,
            robot,
            goal: GoalEntry {
                center: p(scene.goal.center),
                radius: scene.goal.radius,
            },
            objects,
        }
    }
}

// ---- loading & validation ----------------------------------------------

pub fn load_scene(path: impl AsRef<Path>) -> Result<Scene, SceneError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| SceneError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_scene(&text)
}

pub fn parse_scene(text: &str) -> Result<Scene, SceneError> {
    let file: SceneFile = toml::from_str(text).map_err(|e| SceneError::Parse(e.to_string()))?;
    build(file)
}

fn finite_positive(entity: &str, what: &str, v: f64) -> Result<(), SceneError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(entity, format!("{what} must be positive, got {v}")))
    }
}

fn build(file: SceneFile) -> Result<Scene, SceneError> {
    let arena = Arena {
        min: Vec2::new(file.arena.min[0], file.arena.min[1]),
        max: Vec2::new(file.arena.max[0], file.arena.max[1]),
        walls: file.arena.walls,
        wall_thickness: file.arena.wall_thickness,
    };
    if !(arena.min.x < arena.max.x && arena.min.y < arena.max.y) {
        return Err(invalid("arena", "min must be below max on both axes"));
    }
    finite_positive("arena", "wall_thickness", arena.wall_thickness)?;

    let (region_params, class_assertions) = match file.knowledge {
        Some(k) => (
            RegionParams {
                depth_ratio: k.region_depth_ratio,
                span_ratio: k.region_span_ratio,
            },
            k.class_assertions,
        ),
        None => (RegionParams::default(), Vec::new()),
    };
    finite_positive("knowledge", "region_depth_ratio", region_params.depth_ratio)?;
    if !(region_params.span_ratio > 0.0 && region_params.span_ratio <= 1.0) {
        return Err(invalid("knowledge", "region_span_ratio must lie in (0, 1]"));
    }

    let mut objects = Vec::new();
    let mut states = Vec::new();
    for entry in file.objects {
        let (spec, state) = build_object(entry, &region_params)?;
        if objects.iter().any(|o: &ObjectSpec| o.id == spec.id) {
            return Err(invalid(spec.id.0, "duplicate object id"));
        }
        objects.push(spec);
        states.push(state);
    }
    if arena.walls {
        for (spec, state) in arena_walls(&arena) {
            objects.push(spec);
            states.push(state);
        }
    }
    for a in &class_assertions {
        if !objects.iter().any(|o| o.id == a.object) {
            return Err(invalid(a.object.0.clone(), "class assertion names an unknown object"));
        }
    }

    let (robot, robot_state) = build_robot(file.robot)?;
    let goal = Goal {
        center: Vec2::new(file.goal.center[0], file.goal.center[1]),
        radius: file.goal.radius,
    };
    finite_positive("goal", "radius", goal.radius)?;

    let footprint = robot_footprint(&robot, &robot_state).map_err(|e| invalid("robot", e.to_string()))?;
    for (spec, st) in objects.iter().zip(&states) {
        if !spec.is_fixed() {
            continue;
        }
        let obj = Placed::new(&spec.shape, &st.pose);
        if footprint
            .iter()
            .any(|(s, p)| placed_overlap(&Placed::new(s, p), &obj))
        {
            return Err(invalid(spec.id.0.clone(), "fixed object overlaps the robot's initial placement"));
        }
    }

    Ok(Scene {
        name: file.name,
        arena,
        objects,
        robot,
        initial: WorkspaceState {
            objects: states,
            robot: robot_state,
            time: 0.0,
        },
        goal,
        region_params,
        class_assertions,
    })
}

fn build_object(entry: ObjectEntry, params: &RegionParams) -> Result<(ObjectSpec, ObjectState), SceneError> {
    let name = entry.id.clone();
    let id = ObjectId(entry.id);
    if !entry.shape.is_valid() {
        return Err(invalid(name, "shape dimensions must be strictly positive"));
    }
    finite_positive(&name, "mass", entry.mass)?;
    if !(entry.mu_ground.is_finite() && entry.mu_ground >= 0.0) {
        return Err(invalid(name, "mu_ground must be non-negative"));
    }
    let axis = match (entry.class, entry.constraint_axis) {
        (ObjectClass::ConstraintOrientedManipulatable, Some(a)) => {
            let v = Vec2::new(a[0], a[1]);
            let n = v.norm();
            if !(n.is_finite() && n > 0.0) {
                return Err(invalid(name, "constraint_axis must be non-zero"));
            }
            Some(v / n)
        }
        (ObjectClass::ConstraintOrientedManipulatable, None) => {
            return Err(invalid(name, "constraint-oriented objects need a constraint_axis"));
        }
        (_, Some(_)) => {
            return Err(invalid(name, "only constraint-oriented objects may declare a constraint_axis"));
        }
        (_, None) => None,
    };
    if entry.class == ObjectClass::Fixed && !entry.regions.is_empty() {
        return Err(invalid(name, "fixed objects cannot own manipulation regions"));
    }
    if entry.class.is_manipulatable() && !matches!(entry.shape, Shape::Box { .. }) {
        return Err(invalid(name, "manipulatable objects must be boxes"));
    }
    let mut regions: Vec<ManipulationRegion> = Vec::new();
    for face in &entry.regions {
        if regions.iter().any(|r| r.face == *face) {
            return Err(invalid(name, format!("region {} declared twice", face.label())));
        }
        regions.push(ManipulationRegion::on_face(&id, &entry.shape, *face, params).expect("box shape"));
    }
    link_opposites(&mut regions);
    let pose = Pose2::new(entry.pose[0], entry.pose[1], entry.pose[2]);
    let state = ObjectState::at_rest(pose, axis);
    Ok((
        ObjectSpec {
            id,
            class: entry.class,
            shape: entry.shape,
            mass: entry.mass,
            mu_ground: entry.mu_ground,
            gravity_affected: entry.gravity,
            regions,
            motion_constraint: axis,
            parts: entry.parts,
            generated: false,
        },
        state,
    ))
}

/// Links each region to the region on the opposite face, when present.
pub fn link_opposites(regions: &mut [ManipulationRegion]) {
    let ids: Vec<(Face, _)> = regions.iter().map(|r| (r.face, r.id.clone())).collect();
    for r in regions.iter_mut() {
        r.opposite = ids
            .iter()
            .find(|(f, _)| *f == r.face.opposite())
            .map(|(_, id)| id.clone());
    }
}

fn arena_walls(arena: &Arena) -> Vec<(ObjectSpec, ObjectState)> {
    let t = arena.wall_thickness;
    let c = (arena.min + arena.max) * 0.5;
    let h = arena.extent() * 0.5;
    let walls = [
        ("left", Vec2::new(arena.min.x - 0.5 * t, c.y), 0.5 * t, h.y + t),
        ("right", Vec2::new(arena.max.x + 0.5 * t, c.y), 0.5 * t, h.y + t),
        ("bottom", Vec2::new(c.x, arena.min.y - 0.5 * t), h.x + t, 0.5 * t),
        ("top", Vec2::new(c.x, arena.max.y + 0.5 * t), h.x + t, 0.5 * t),
    ];
    walls
        .into_iter()
        .map(|(side, centre, hx, hy)| {
            (
                ObjectSpec {
                    id: ObjectId(format!("arena_wall_{side}")),
                    class: ObjectClass::Fixed,
                    shape: Shape::Box {
                        half_width: hx,
                        half_depth: hy,
                    },
                    mass: 1.0,
                    mu_ground: 0.0,
                    gravity_affected: true,
                    regions: Vec::new(),
                    motion_constraint: None,
                    parts: Vec::new(),
                    generated: true,
                },
                ObjectState::at_rest(
                    Pose2 {
                        position: centre,
                        heading: 0.0,
                    },
                    None,
                ),
            )
        })
        .collect()
}

fn build_robot(entry: RobotEntry) -> Result<(RobotModel, RobotState), SceneError> {
    let (kind, bounds, state) = match entry {
        RobotEntry::HolonomicDisk {
            radius,
            mass,
            mu_ground,
            bounds,
            start,
        } => {
            finite_positive("robot", "radius", radius)?;
            finite_positive("robot", "mass", mass)?;
            if mu_ground < 0.0 {
                return Err(invalid("robot", "mu_ground must be non-negative"));
            }
            (
                RobotKind::HolonomicDisk {
                    radius,
                    mass,
                    mu_ground,
                },
                bounds,
                RobotState::Holonomic {
                    pose: Pose2::new(start[0], start[1], 0.0),
                    velocity: Vec2::zeros(),
                },
            )
        }
        RobotEntry::CarLike {
            half_length,
            half_width,
            wheel_radius,
            mass,
            mu_wheel,
            max_steer,
            steer_torque_max,
            steer_inertia,
            steer_damping,
            rolling_resistance,
            wheelbase,
            bounds,
            start,
        } => {
            for (what, v) in [
                ("half_length", half_length),
                ("half_width", half_width),
                ("wheel_radius", wheel_radius),
                ("mass", mass),
                ("max_steer", max_steer),
                ("steer_torque_max", steer_torque_max),
                ("steer_inertia", steer_inertia),
            ] {
                finite_positive("robot", what, v)?;
            }
            if mu_wheel < 0.0 || steer_damping < 0.0 || rolling_resistance < 0.0 {
                return Err(invalid("robot", "friction and damping coefficients must be non-negative"));
            }
            let wheelbase = wheelbase.unwrap_or(2.0 * half_length);
            finite_positive("robot", "wheelbase", wheelbase)?;
            (
                RobotKind::CarLike(CarParams {
                    half_length,
                    half_width,
                    wheel_radius,
                    mass,
                    mu_wheel,
                    max_steer,
                    steer_torque_max,
                    steer_inertia,
                    steer_damping,
                    rolling_resistance,
                    wheelbase,
                }),
                bounds,
                RobotState::Car {
                    pose: Pose2::new(start[0], start[1], start[2]),
                    speed: 0.0,
                    steer: 0.0,
                    steer_rate: 0.0,
                },
            )
        }
        RobotEntry::PlanarArm {
            link_lengths,
            link_masses,
            link_thickness,
            joint_limits,
            base,
            joint_damping,
            bounds,
            start_angles,
        } => {
            let n = link_lengths.len();
            if n == 0 {
                return Err(invalid("robot", "arm needs at least one link"));
            }
            if link_masses.len() != n || joint_limits.len() != n || start_angles.len() != n {
                return Err(invalid(
                    "robot",
                    "link_lengths, link_masses, joint_limits and start_angles must have equal length",
                ));
            }
            for (i, l) in link_lengths.iter().enumerate() {
                finite_positive("robot", &format!("link_lengths[{i}]"), *l)?;
                finite_positive("robot", &format!("link_masses[{i}]"), link_masses[i])?;
                let [lo, hi] = joint_limits[i];
                if !(lo < hi) {
                    return Err(invalid("robot", format!("joint {i} limits must satisfy lower < upper")));
                }
            }
            finite_positive("robot", "link_thickness", link_thickness)?;
            if joint_damping < 0.0 {
                return Err(invalid("robot", "joint_damping must be non-negative"));
            }
            (
                RobotKind::PlanarArm(ArmParams {
                    link_lengths,
                    link_masses,
                    link_thickness,
                    joint_limits: joint_limits.iter().map(|l| (l[0], l[1])).collect(),
                    base: Pose2::new(base[0], base[1], base[2]),
                    joint_damping,
                }),
                bounds,
                RobotState::Arm {
                    rates: vec![0.0; start_angles.len()],
                    angles: start_angles,
                },
            )
        }
    };
    if !bounds.is_valid() {
        return Err(invalid(
            "robot",
            "dynamic bounds must satisfy 0 <= lower < upper and v_max > 0",
        ));
    }
    Ok((RobotModel { kind, bounds }, state))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
name = "empty"
[arena]
min = [-1.0, -1.0]
max = [1.0, 1.0]
[robot]
kind = "holonomic_disk"
radius = 0.1
mass = 1.0
mu_ground = 0.1
bounds = { lower = 1.0, upper = 10.0, v_max = 1.0 }
start = [0.0, 0.0]
[goal]
center = [0.5, 0.5]
radius = 0.1
"#;

    #[test]
    fn minimal_scene_has_no_objects() {
        let s = parse_scene(MINIMAL).unwrap();
        assert!(s.objects.is_empty());
        assert!(s.initial.objects.is_empty());
        assert!(matches!(s.initial.robot, RobotState::Holonomic { .. }));
    }

    #[test]
    fn fixed_wall_with_region_is_rejected() {
        let text = format!(
            "{MINIMAL}\n[[objects]]\nid = \"north_wall\"\nclass = \"fixed\"\nshape = {{ box = {{ half_width = 1.0, half_depth = 0.05 }} }}\npose = [0.0, 0.9, 0.0]\nmass = 1.0\nmu_ground = 0.5\nregions = [\"+y\"]\n"
        );
        match parse_scene(&text) {
            Err(SceneError::Invalid { entity, .. }) => assert_eq!(entity, "north_wall"),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = MINIMAL.replace("radius = 0.1\nmass", "radius = 0.1\ncolour = \"red\"\nmass");
        assert!(matches!(parse_scene(&text), Err(SceneError::Parse(_))));
    }

    #[test]
    fn malformed_file_is_a_parse_error() {
        assert!(matches!(parse_scene("name = "), Err(SceneError::Parse(_))));
    }

    #[test]
    fn fixed_object_on_robot_start_is_rejected() {
        let text = format!(
            "{MINIMAL}\n[[objects]]\nid = \"pillar\"\nclass = \"fixed\"\nshape = {{ disk = {{ radius = 0.2 }} }}\npose = [0.1, 0.0, 0.0]\nmass = 1.0\nmu_ground = 0.5\n"
        );
        match parse_scene(&text) {
            Err(SceneError::Invalid { entity, .. }) => assert_eq!(entity, "pillar"),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn arena_walls_are_generated_and_not_serialised() {
        let text = MINIMAL.replace("max = [1.0, 1.0]", "max = [1.0, 1.0]\nwalls = true");
        let s = parse_scene(&text).unwrap();
        assert_eq!(s.objects.len(), 4);
        assert!(s.objects.iter().all(|o| o.is_fixed() && o.generated));
        assert!(!s.to_toml().contains("arena_wall"));
        assert_eq!(parse_scene(&s.to_toml()).unwrap(), s);
    }
}

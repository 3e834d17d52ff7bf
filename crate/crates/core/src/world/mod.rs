//! Planar scene description: shapes, poses, objects, robot models and the
//! workspace state the planner searches over.

pub mod geometry;
pub mod robot;
pub mod scene;

use std::f64::consts::PI;
use std::fmt;

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

pub use geometry::{overlap, region_world_polygon, Placed};
pub use robot::{
    robot_footprint, ArmParams, CarParams, DynamicBounds, RobotKind, RobotModel, RobotState,
};
pub use scene::{load_scene, parse_scene, Arena, Goal, RegionParams, Scene};

pub type Vec2 = Vector2<f64>;

/// Wraps an angle into `(-π, π]`.
pub fn normalize_angle(a: f64) -> f64 {
    if a > -PI && a <= PI {
        return a;
    }
    let mut r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r -= 2.0 * PI;
    }
    if r <= -PI {
        r += 2.0 * PI;
    }
    r
}

/// Counter-clockwise perpendicular, i.e. `ẑ × v`.
#[inline]
pub fn perp(v: Vec2) -> Vec2 {
    Vec2::new(-v.y, v.x)
}

/// 2D cross product `a × b` (z component).
#[inline]
pub fn cross(a: Vec2, b: Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

#[inline]
pub fn rotate(v: Vec2, angle: f64) -> Vec2 {
    let (s, c) = angle.sin_cos();
    Vec2::new(c * v.x - s * v.y, s * v.x + c * v.y)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pose2 {
    pub position: Vec2,
    pub heading: f64,
}

impl Default for Pose2 {
    fn default() -> Self {
        Self::identity()
    }
}

impl Pose2 {
    pub fn new(x: f64, y: f64, heading: f64) -> Self {
        Self {
            position: Vec2::new(x, y),
            heading: normalize_angle(heading),
        }
    }

    pub fn identity() -> Self {
        Self {
            position: Vec2::zeros(),
            heading: 0.0,
        }
    }

    /// Maps a point from this frame into the parent frame.
    pub fn transform_point(&self, local: Vec2) -> Vec2 {
        self.position + rotate(local, self.heading)
    }

    pub fn transform_vector(&self, local: Vec2) -> Vec2 {
        rotate(local, self.heading)
    }

    /// Maps a parent-frame point into this frame.
    pub fn inverse_transform_point(&self, world: Vec2) -> Vec2 {
        rotate(world - self.position, -self.heading)
    }

    pub fn inverse_transform_vector(&self, world: Vec2) -> Vec2 {
        rotate(world, -self.heading)
    }

    /// `self ∘ local`: the pose of a child frame expressed in the parent frame.
    pub fn compose(&self, local: &Pose2) -> Pose2 {
        Pose2 {
            position: self.transform_point(local.position),
            heading: normalize_angle(self.heading + local.heading),
        }
    }

    pub fn inverse(&self) -> Pose2 {
        Pose2 {
            position: rotate(-self.position, -self.heading),
            heading: normalize_angle(-self.heading),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Disk { radius: f64 },
    /// Rectangle centred on its frame.
    Box { half_width: f64, half_depth: f64 },
    /// Arm link: spans `x ∈ [0, length]`, `|y| ≤ thickness / 2` in its own frame.
    ChainLink { length: f64, thickness: f64 },
}

impl Shape {
    pub fn is_valid(&self) -> bool {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        match *self {
            Shape::Disk { radius } => ok(radius),
            Shape::Box {
                half_width,
                half_depth,
            } => ok(half_width) && ok(half_depth),
            Shape::ChainLink { length, thickness } => ok(length) && ok(thickness),
        }
    }

    /// Largest half-extent, used to size manipulation regions.
    pub fn max_half_extent(&self) -> f64 {
        match *self {
            Shape::Disk { radius } => radius,
            Shape::Box {
                half_width,
                half_depth,
            } => half_width.max(half_depth),
            Shape::ChainLink { length, thickness } => (0.5 * length).max(0.5 * thickness),
        }
    }

    /// Radius of the disk centred on the frame origin that encloses the shape.
    pub fn bounding_radius(&self) -> f64 {
        match *self {
            Shape::Disk { radius } => radius,
            Shape::Box {
                half_width,
                half_depth,
            } => half_width.hypot(half_depth),
            Shape::ChainLink { length, thickness } => length.hypot(0.5 * thickness),
        }
    }

    /// Rotational inertia about the frame origin for a body of the given mass.
    pub fn inertia(&self, mass: f64) -> f64 {
        match *self {
            Shape::Disk { radius } => 0.5 * mass * radius * radius,
            Shape::Box {
                half_width,
                half_depth,
            } => mass * (half_width * half_width + half_depth * half_depth) / 3.0,
            Shape::ChainLink { length, thickness } => {
                mass * (length * length / 3.0 + thickness * thickness / 12.0)
            }
        }
    }

    /// Effective lever arm of Coulomb floor friction resisting spin.
    pub fn friction_radius(&self) -> f64 {
        match *self {
            Shape::Disk { radius } => 2.0 * radius / 3.0,
            _ => (self.inertia(1.0)).sqrt(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectClass {
    Fixed,
    FreeManipulatable,
    ConstraintOrientedManipulatable,
}

impl ObjectClass {
    pub fn is_manipulatable(self) -> bool {
        !matches!(self, ObjectClass::Fixed)
    }
}

impl fmt::Display for ObjectClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ObjectClass::Fixed => "fixed",
            ObjectClass::FreeManipulatable => "free-mObject",
            ObjectClass::ConstraintOrientedManipulatable => "co-mObject",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ObjectId(pub String);

impl fmt::Display for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ObjectId {
    fn from(s: &str) -> Self {
        ObjectId(s.to_owned())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RegionId(pub String);

impl fmt::Display for RegionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for RegionId {
    fn from(s: &str) -> Self {
        RegionId(s.to_owned())
    }
}

/// A face of a box-shaped object, named by its outward normal in the object frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Face {
    #[serde(rename = "+x")]
    PosX,
    #[serde(rename = "-x")]
    NegX,
    #[serde(rename = "+y")]
    PosY,
    #[serde(rename = "-y")]
    NegY,
}

impl Face {
    pub const ALL: [Face; 4] = [Face::PosX, Face::NegX, Face::PosY, Face::NegY];

    pub fn outward_normal(self) -> Vec2 {
        match self {
            Face::PosX => Vec2::new(1.0, 0.0),
            Face::NegX => Vec2::new(-1.0, 0.0),
            Face::PosY => Vec2::new(0.0, 1.0),
            Face::NegY => Vec2::new(0.0, -1.0),
        }
    }

    pub fn opposite(self) -> Face {
        match self {
            Face::PosX => Face::NegX,
            Face::NegX => Face::PosX,
            Face::PosY => Face::NegY,
            Face::NegY => Face::PosY,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Face::PosX => "+x",
            Face::NegX => "-x",
            Face::PosY => "+y",
            Face::NegY => "-y",
        }
    }

    pub fn from_label(s: &str) -> Option<Face> {
        Face::ALL.into_iter().find(|f| f.label() == s)
    }
}

/// Object-attached zone from which the robot may push its owner.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManipulationRegion {
    pub id: RegionId,
    pub owner: ObjectId,
    pub face: Face,
    /// Pose of the region box in the owner's frame.
    pub local_pose: Pose2,
    pub extent: Shape,
    /// Unit push direction in the owner's frame (inward face normal).
    pub push_direction: Vec2,
    pub opposite: Option<RegionId>,
    pub active: bool,
}

impl ManipulationRegion {
    /// Box abutting `face` of a box-shaped owner, `depth` deep and covering
    /// `span` of the face length. `None` for non-box owners.
    pub fn on_face(owner: &ObjectId, shape: &Shape, face: Face, params: &RegionParams) -> Option<Self> {
        let Shape::Box {
            half_width,
            half_depth,
        } = *shape
        else {
            return None;
        };
        let depth = params.depth_ratio * shape.max_half_extent();
        let n = face.outward_normal();
        let (offset, along_half) = match face {
            Face::PosX | Face::NegX => (half_width, half_depth),
            Face::PosY | Face::NegY => (half_depth, half_width),
        };
        let centre = n * (offset + 0.5 * depth);
        let extent = match face {
            Face::PosX | Face::NegX => Shape::Box {
                half_width: 0.5 * depth,
                half_depth: params.span_ratio * along_half,
            },
            Face::PosY | Face::NegY => Shape::Box {
                half_width: params.span_ratio * along_half,
                half_depth: 0.5 * depth,
            },
        };
        Some(ManipulationRegion {
            id: RegionId(format!("{}:{}", owner.0, face.label())),
            owner: owner.clone(),
            face,
            local_pose: Pose2 {
                position: centre,
                heading: 0.0,
            },
            extent,
            push_direction: -n,
            opposite: None,
            active: true,
        })
    }

    /// Local-frame containment with an outward tolerance.
    pub fn contains_local(&self, p_owner: Vec2, tol: f64) -> bool {
        let Shape::Box {
            half_width,
            half_depth,
        } = self.extent
        else {
            return false;
        };
        let q = self.local_pose.inverse_transform_point(p_owner);
        q.x.abs() <= half_width + tol && q.y.abs() <= half_depth + tol
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectSpec {
    pub id: ObjectId,
    pub class: ObjectClass,
    pub shape: Shape,
    pub mass: f64,
    pub mu_ground: f64,
    pub gravity_affected: bool,
    /// Explicitly declared regions; empty means "derive from class".
    pub regions: Vec<ManipulationRegion>,
    /// Unit motion axis in the object frame (co-mObjects only).
    pub motion_constraint: Option<Vec2>,
    /// Extra composition facts (`hasWheel`, `hasBody`, ...).
    pub parts: Vec<String>,
    /// Generated arena walls are not written back to scene files.
    #[serde(skip)]
    pub generated: bool,
}

impl ObjectSpec {
    pub fn is_fixed(&self) -> bool {
        self.class == ObjectClass::Fixed
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectState {
    pub pose: Pose2,
    pub linear_velocity: Vec2,
    pub angular_velocity: f64,
    /// World-independent motion axis (object frame) currently applicable.
    pub constraint: Option<Vec2>,
}

impl ObjectState {
    pub fn at_rest(pose: Pose2, constraint: Option<Vec2>) -> Self {
        Self {
            pose,
            linear_velocity: Vec2::zeros(),
            angular_velocity: 0.0,
            constraint,
        }
    }
}

/// Full world snapshot; `objects[i]` belongs to `scene.objects[i]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorkspaceState {
    pub objects: Vec<ObjectState>,
    pub robot: RobotState,
    pub time: f64,
}

impl WorkspaceState {
    pub fn object<'a>(&'a self, scene: &Scene, id: &ObjectId) -> Option<&'a ObjectState> {
        scene.object_index(id).map(|i| &self.objects[i])
    }
}

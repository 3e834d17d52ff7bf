use kpmp_core::knowledge::{infer_from_scene, ControlRange, RobotLocation};
use kpmp_core::reasoning::{
    compute_control_range, compute_robot_location, reasoning_process, update_manipulation_constraints,
    InactiveReason, ReasoningParams, RegionState,
};
use kpmp_core::world::{parse_scene, ObjectClass, ObjectId, Pose2, RegionId, RobotState, Scene, Vec2, WorkspaceState};

fn scene(robot: &str, objects: &str) -> Scene {
    parse_scene(&format!(
        r#"
name = "r"
[arena]
min = [-5.0, -5.0]
max = [5.0, 5.0]
[robot]
{robot}
[goal]
center = [4.0, 4.0]
radius = 0.2
{objects}
"#
    ))
    .unwrap()
}

const DISK: &str = r#"kind = "holonomic_disk"
radius = 0.1
mass = 1.0
mu_ground = 0.1
bounds = { lower = 1.0, upper = 10.0, v_max = 1.0 }
start = [-4.0, -4.0]"#;

fn cube(id: &str, x: f64, y: f64, half: f64, mass: f64) -> String {
    format!(
        r#"
[[objects]]
id = "{id}"
class = "free_manipulatable"
shape = {{ box = {{ half_width = {half}, half_depth = {half} }} }}
pose = [{x}, {y}, 0.0]
mass = {mass}
mu_ground = 0.5
"#
    )
}

fn rid(s: &str) -> RegionId {
    RegionId::from(s)
}

fn place_disk(q: &mut WorkspaceState, x: f64, y: f64) {
    if let RobotState::Holonomic { pose, .. } = &mut q.robot {
        *pose = Pose2::new(x, y, 0.0);
    }
}

#[test]
fn isolated_cube_has_all_regions_active() {
    let s = scene(DISK, &cube("cube", 0.0, 0.0, 0.5, 1.0));
    let km = infer_from_scene(&s, 9.8).unwrap();
    let st = update_manipulation_constraints(&km, &s.initial);
    assert_eq!(st.regions.len(), 4);
    assert!(st.regions.values().all(|r| *r == RegionState::Active));
    assert_eq!(st.classes[0], ObjectClass::FreeManipulatable);
}

#[test]
fn blocked_car_front_disables_front_and_rear() {
    let car = r#"
[[objects]]
id = "car"
class = "constraint_oriented_manipulatable"
shape = { box = { half_width = 0.4, half_depth = 0.2 } }
pose = [0.0, 0.0, 0.0]
mass = 2.0
mu_ground = 0.3
constraint_axis = [1.0, 0.0]
"#;
    let s = scene(DISK, &format!("{car}{}", cube("cube", 0.55, 0.0, 0.1, 0.5)));
    let km = infer_from_scene(&s, 9.8).unwrap();
    assert_eq!(km.objects[0].regions.len(), 2);
    let st = update_manipulation_constraints(&km, &s.initial);
    assert_eq!(st.regions[&rid("car:+x")], RegionState::Inactive(InactiveReason::OccupiedByObstacle));
    assert_eq!(st.regions[&rid("car:-x")], RegionState::Inactive(InactiveReason::OppositeBlocked));
    let kappa = reasoning_process(&km, &s.initial, &ReasoningParams::default());
    assert!(!kappa.is_active(&rid("car:+x")) && !kappa.is_active(&rid("car:-x")));
    assert_eq!(kappa.active_regions.len(), 4, "only the cube's regions stay active");
}

#[test]
fn yellow_box_is_retyped_and_reverts() {
    // the green target box sits against the yellow box's -x face
    let objs = format!("{}{}", cube("yellow", 0.0, 0.0, 0.3, 1.0), cube("green", -0.4, 0.0, 0.1, 0.2));
    let s = scene(DISK, &objs);
    let km = infer_from_scene(&s, 9.8).unwrap();
    let st = update_manipulation_constraints(&km, &s.initial);
    assert_eq!(st.regions[&rid("yellow:-x")], RegionState::Inactive(InactiveReason::OccupiedByObstacle));
    assert_eq!(st.regions[&rid("yellow:+x")], RegionState::Inactive(InactiveReason::OppositeBlocked));
    assert_eq!(st.regions[&rid("yellow:+y")], RegionState::Active);
    assert_eq!(st.regions[&rid("yellow:-y")], RegionState::Active);
    assert_eq!(st.classes[0], ObjectClass::ConstraintOrientedManipulatable);
    assert_eq!(st.axes[0], Some(Vec2::new(0.0, 1.0)));

    // moving the occluder away restores the free type and every region
    let mut q = s.initial.clone();
    q.objects[1].pose = Pose2::new(-2.0, 2.0, 0.0);
    let st = update_manipulation_constraints(&km, &q);
    assert!(["yellow:+x", "yellow:-x", "yellow:+y", "yellow:-y"]
        .iter()
        .all(|r| st.regions[&rid(r)] == RegionState::Active));
    assert_eq!(st.classes[0], ObjectClass::FreeManipulatable);
}

#[test]
fn retyping_deactivates_cross_axis_regions_without_opposite() {
    let objs = r#"
[[objects]]
id = "yellow"
class = "free_manipulatable"
shape = { box = { half_width = 0.3, half_depth = 0.3 } }
pose = [0.0, 0.0, 0.0]
mass = 1.0
mu_ground = 0.5
regions = ["+x", "+y", "-y"]
[[objects]]
id = "block"
class = "fixed"
shape = { box = { half_width = 0.1, half_depth = 0.1 } }
pose = [0.0, 0.4, 0.0]
mass = 1.0
mu_ground = 0.5
"#;
    let s = scene(DISK, objs);
    let km = infer_from_scene(&s, 9.8).unwrap();
    let st = update_manipulation_constraints(&km, &s.initial);
    assert_eq!(st.regions[&rid("yellow:+y")], RegionState::Inactive(InactiveReason::OccupiedByObstacle));
    assert_eq!(st.regions[&rid("yellow:-y")], RegionState::Inactive(InactiveReason::OppositeBlocked));
    assert_eq!(st.regions[&rid("yellow:+x")], RegionState::Active);
    assert_eq!(st.axes[0], Some(Vec2::new(1.0, 0.0)));
}

#[test]
fn robot_in_its_region_does_not_occupy_it() {
    let s = scene(DISK, &cube("cube", 0.0, 0.0, 0.5, 1.0));
    let km = infer_from_scene(&s, 9.8).unwrap();
    let mut q = s.initial.clone();
    place_disk(&mut q, 0.6, 0.0);
    let st = update_manipulation_constraints(&km, &q);
    assert_eq!(st.regions[&rid("cube:+x")], RegionState::Active);
}

#[test]
fn robot_location_cases() {
    let s = scene(DISK, &cube("cube", 0.0, 0.0, 0.5, 2.0));
    let km = infer_from_scene(&s, 9.8).unwrap();
    let loc = |x: f64, y: f64| {
        let mut q = s.initial.clone();
        place_disk(&mut q, x, y);
        let st = update_manipulation_constraints(&km, &q);
        compute_robot_location(&q, &km, &st)
    };
    assert_eq!(loc(-3.0, -3.0), RobotLocation::Move);
    // gap just past the touch tolerance, inside the +x region
    assert_eq!(loc(0.5 + 0.1 + 0.0011, 0.0), RobotLocation::Interaction);
    assert_eq!(
        loc(0.6, 0.1),
        RobotLocation::Contact {
            object: ObjectId::from("cube"),
            region: rid("cube:+x"),
        }
    );
    // touching the face outside the region span is not a region contact
    assert_eq!(loc(0.6, 0.48), RobotLocation::Move);
}

#[test]
fn control_range_cases() {
    let s = scene(DISK, &cube("cube", 0.0, 0.0, 0.5, 2.0));
    let km = infer_from_scene(&s, 9.8).unwrap();
    let q = &s.initial;
    let range = |loc: &RobotLocation| compute_control_range(loc, &km, q, 0.5).0;
    assert_eq!(range(&RobotLocation::Move), ControlRange::Magnitude { lower: 1.0, upper: 10.0 });
    assert_eq!(range(&RobotLocation::Interaction), ControlRange::Magnitude { lower: 0.5, upper: 5.0 });
    let contact = RobotLocation::Contact {
        object: ObjectId::from("cube"),
        region: rid("cube:+x"),
    };
    let f_obj = 0.5 * 2.0 * 9.8;
    assert_eq!(f_obj, 9.8);
    assert_eq!(
        range(&contact),
        ControlRange::Magnitude {
            lower: 1.0 + f_obj,
            upper: 10.0 + f_obj,
        }
    );
    assert_eq!(range(&contact), ControlRange::Magnitude { lower: 10.8, upper: 19.8 });
}

const ARM: &str = r#"kind = "planar_arm"
link_lengths = [1.0, 1.0]
link_masses = [1.0, 1.0]
link_thickness = 0.05
joint_limits = [[-3.0, 3.0], [-3.0, 3.0]]
base = [0.0, 0.0, 0.0]
bounds = { lower = 0.5, upper = 5.0, v_max = 2.0 }
start_angles = [0.0, 0.0]"#;

#[test]
fn arm_torque_bounds_follow_the_transposed_jacobian() {
    // box resting on the straight arm's upper side, pushed along +y
    let s = scene(ARM, &cube("box", 1.8, 0.025 + 0.2, 0.2, 1.0));
    let km = infer_from_scene(&s, 9.8).unwrap();
    let q = &s.initial;
    let st = update_manipulation_constraints(&km, q);
    let loc = compute_robot_location(q, &km, &st);
    assert_eq!(
        loc,
        RobotLocation::Contact {
            object: ObjectId::from("box"),
            region: rid("box:-y"),
        }
    );
    let (range, fallback) = compute_control_range(&loc, &km, q, 0.5);
    assert!(!fallback);
    // tool at (2, 0): columns perp(tool - joint) = (0, 2), (0, 1)
    let load = 0.5 * 1.0 * 9.8;
    let (f_lo, f_hi) = (0.5 / 2.0, 5.0 / 2.0);
    let ControlRange::Joint { lower, upper } = range else { panic!() };
    let expect_lo = [2.0 * (f_lo + load), 1.0 * (f_lo + load)];
    let expect_hi = [2.0 * (f_hi + load), 1.0 * (f_hi + load)];
    for k in 0..2 {
        assert!((lower[k] - expect_lo[k]).abs() < 1e-12);
        assert!((upper[k] - expect_hi[k]).abs() < 1e-12);
    }
}

#[test]
fn arm_push_along_its_own_axis_is_singular() {
    // box at the tip, pushed along +x: both columns are orthogonal to x
    let s = scene(ARM, &cube("box", 2.2, 0.0, 0.2, 1.0));
    let km = infer_from_scene(&s, 9.8).unwrap();
    let q = &s.initial;
    let st = update_manipulation_constraints(&km, q);
    let loc = compute_robot_location(q, &km, &st);
    assert_eq!(
        loc,
        RobotLocation::Contact {
            object: ObjectId::from("box"),
            region: rid("box:-x"),
        }
    );
    let (range, fallback) = compute_control_range(&loc, &km, q, 0.5);
    assert!(fallback);
    assert_eq!(range, ControlRange::Joint { lower: vec![0.5, 0.5], upper: vec![5.0, 5.0] });
}

#[test]
fn reasoning_is_pure_and_contact_raises_the_range() {
    let s = scene(DISK, &cube("cube", 0.0, 0.0, 0.5, 2.0));
    let km = infer_from_scene(&s, 9.8).unwrap();
    let mut q = s.initial.clone();
    place_disk(&mut q, -0.6, 0.0);
    let p = ReasoningParams::default();
    let a = reasoning_process(&km, &q, &p);
    assert_eq!(a, reasoning_process(&km, &q, &p));
    assert!(matches!(a.location, RobotLocation::Contact { .. }));
    assert_eq!(a.push_direction, Some(Vec2::new(1.0, 0.0)));
    let ControlRange::Magnitude { lower, .. } = a.control_range else { panic!() };
    assert!(lower > 10.0);

    let empty = scene(DISK, "");
    let km = infer_from_scene(&empty, 9.8).unwrap();
    let k = reasoning_process(&km, &empty.initial, &p);
    assert_eq!(k.location, RobotLocation::Move);
    assert!(k.active_regions.is_empty());
    assert_eq!(k.control_range, ControlRange::Magnitude { lower: 1.0, upper: 10.0 });
}

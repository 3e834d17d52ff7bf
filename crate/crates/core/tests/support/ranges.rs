//! Scene builders and the hand-computed control-range oracle.

use kpmp_core::knowledge::{infer_from_scene, ControlRange, ManipulationKnowledge, RobotLocation};
use kpmp_core::reasoning::compute_control_range;
use kpmp_core::world::{parse_scene, ObjectId, RobotState, Vec2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn scene_text(robot: &str, objects: &str) -> String {
    format!(
        r#"
name = "p"
[arena]
min = [-5.0, -5.0]
max = [5.0, 5.0]
[robot]
{robot}
[goal]
center = [4.5, 4.5]
radius = 0.2
{objects}"#
    )
}

pub fn cube(id: &str, x: f64, y: f64, heading: f64, half: f64, mass: f64, mu: f64) -> String {
    format!(
        r#"
[[objects]]
id = "{id}"
class = "free_manipulatable"
shape = {{ box = {{ half_width = {half}, half_depth = {half} }} }}
pose = [{x}, {y}, {heading}]
mass = {mass}
mu_ground = {mu}
"#
    )
}

pub fn disk_robot(lower: f64, upper: f64) -> String {
    format!(
        r#"kind = "holonomic_disk"
radius = 0.1
mass = 1.0
mu_ground = 0.1
bounds = {{ lower = {lower}, upper = {upper}, v_max = 1.0 }}
start = [-4.5, -4.5]"#
    )
}

pub fn car_robot(lower: f64, upper: f64, wheel_radius: f64) -> String {
    format!(
        r#"kind = "car_like"
half_length = 0.2
half_width = 0.1
wheel_radius = {wheel_radius}
mass = 2.0
mu_wheel = 0.8
max_steer = 0.6
steer_torque_max = 0.05
rolling_resistance = 0.05
bounds = {{ lower = {lower}, upper = {upper}, v_max = 1.0 }}
start = [-4.5, -4.5, 0.0]"#
    )
}

pub fn arm_robot(l1: f64, l2: f64, lower: f64, upper: f64) -> String {
    format!(
        r#"kind = "planar_arm"
link_lengths = [{l1}, {l2}]
link_masses = [1.0, 1.0]
link_thickness = 0.04
joint_limits = [[-3.1, 3.1], [-3.1, 3.1]]
base = [0.0, 0.0, 0.0]
bounds = {{ lower = {lower}, upper = {upper}, v_max = 3.0 }}
start_angles = [0.0, 0.0]"#
    )
}

/// Contact with one of the regions of the scene's first object ("box").
pub fn contact_on(km: &ManipulationKnowledge, pick: usize) -> RobotLocation {
    let regions = &km.objects[0].regions;
    assert!(!regions.is_empty(), "box must be manipulatable");
    RobotLocation::Contact {
        object: ObjectId::from("box"),
        region: regions[pick % regions.len()].id.clone(),
    }
}

pub fn magnitudes(r: ControlRange) -> (f64, f64) {
    match r {
        ControlRange::Magnitude { lower, upper } => (lower, upper),
        other => panic!("expected magnitude range, got {other:?}"),
    }
}

pub fn joints(r: ControlRange) -> (Vec<f64>, Vec<f64>) {
    match r {
        ControlRange::Joint { lower, upper } => (lower, upper),
        other => panic!("expected joint range, got {other:?}"),
    }
}

struct Draw {
    lower: f64,
    upper: f64,
    alpha: f64,
    gravity: f64,
    mass: f64,
    mu: f64,
    heading: f64,
    pick: usize,
}

fn draw(rng: &mut ChaCha8Rng, upper_lo: f64, upper_hi: f64) -> Draw {
    let upper = rng.random_range(upper_lo..upper_hi);
    Draw {
        lower: rng.random_range(0.0..upper * 0.5),
        upper,
        alpha: rng.random_range(0.01..0.99),
        gravity: rng.random_range(1.0..20.0),
        mass: rng.random_range(0.05..0.5),
        mu: rng.random_range(0.05..0.8),
        heading: rng.random_range(-3.0..3.0),
        pick: rng.random_range(0..4),
    }
}

#[derive(Debug, Default)]
pub struct Exactness {
    pub disk: usize,
    pub car: usize,
    pub arm: usize,
    pub mismatches: Vec<String>,
}

impl Exactness {
    fn expect<T: PartialEq + std::fmt::Debug>(&mut self, what: &str, got: T, want: T) {
        if got != want {
            self.mismatches.push(format!("{what}: got {got:?}, want {want:?}"));
        }
    }
}

/// Compares `compute_control_range` with the range formulas evaluated by
/// hand on `draws` random parameter sets per robot type. Arm levers come from
/// 2-link forward kinematics written out in closed form.
pub fn exactness(draws: usize, seed: u64) -> Exactness {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Exactness::default();
    for i in 0..draws {
        let d = draw(&mut rng, 2.0, 50.0);
        let s = parse_scene(&scene_text(&disk_robot(d.lower, d.upper), &cube("box", 2.0, 2.0, d.heading, 0.2, d.mass, d.mu)))
            .unwrap();
        let km = infer_from_scene(&s, d.gravity).unwrap();
        let q = &s.initial;
        let load = d.mu * d.mass * d.gravity;
        let mv = magnitudes(compute_control_range(&RobotLocation::Move, &km, q, d.alpha).0);
        out.expect(&format!("disk {i} move"), mv, (d.lower, d.upper));
        let it = magnitudes(compute_control_range(&RobotLocation::Interaction, &km, q, d.alpha).0);
        out.expect(&format!("disk {i} interaction"), it, (d.alpha * d.lower, d.alpha * d.upper));
        let (range, fallback) = compute_control_range(&contact_on(&km, d.pick), &km, q, d.alpha);
        out.expect(&format!("disk {i} fallback"), fallback, false);
        out.expect(&format!("disk {i} contact"), magnitudes(range), (d.lower + load, d.upper + load));
        out.disk += 1;
    }
    for i in 0..draws {
        let d = draw(&mut rng, 1.0, 3.0);
        let r = rng.random_range(0.03..0.1);
        let s = parse_scene(&scene_text(&car_robot(d.lower, d.upper, r), &cube("box", 2.0, 2.0, d.heading, 0.2, d.mass, d.mu)))
            .unwrap();
        let km = infer_from_scene(&s, d.gravity).unwrap();
        let q = &s.initial;
        let load = d.mu * d.mass * d.gravity;
        let it = magnitudes(compute_control_range(&RobotLocation::Interaction, &km, q, d.alpha).0);
        out.expect(&format!("car {i} interaction"), it, (d.alpha * d.lower, d.alpha * d.upper));
        let (range, _) = compute_control_range(&contact_on(&km, d.pick), &km, q, d.alpha);
        out.expect(&format!("car {i} contact"), magnitudes(range), (d.lower + load * r, d.upper + load * r));
        out.car += 1;
    }
    while out.arm < draws {
        let i = out.arm;
        let d = draw(&mut rng, 20.0, 60.0);
        let (l1, l2) = (rng.random_range(0.3..1.0), rng.random_range(0.3..1.0));
        let (a1, a2) = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let s = parse_scene(&scene_text(&arm_robot(l1, l2, d.lower, d.upper), &cube("box", 3.5, 3.5, d.heading, 0.2, d.mass, d.mu)))
            .unwrap();
        let km = infer_from_scene(&s, d.gravity).unwrap();
        let mut q = s.initial.clone();
        q.robot = RobotState::Arm {
            angles: vec![a1, a2],
            rates: vec![0.0, 0.0],
        };
        let loc = contact_on(&km, d.pick);
        let RobotLocation::Contact { region, .. } = &loc else { unreachable!() };
        let local_push = km.region(region).unwrap().1.push_direction;

        // forward kinematics from the base at the origin
        let elbow = Vec2::new(a1.cos() * l1, a1.sin() * l1);
        let tool = elbow + Vec2::new((a1 + a2).cos() * l2, (a1 + a2).sin() * l2);
        let (sh, ch) = d.heading.sin_cos();
        let n = Vec2::new(ch * local_push.x - sh * local_push.y, sh * local_push.x + ch * local_push.y);
        let levers = [
            (-tool.y * n.x + tool.x * n.y).abs(),
            (-(tool.y - elbow.y) * n.x + (tool.x - elbow.x) * n.y).abs(),
        ];
        // the second column is l2 · (-sin, cos) of the distal heading
        let closed = (-(a1 + a2).sin() * l2 * n.x + (a1 + a2).cos() * l2 * n.y).abs();
        if (levers[1] - closed).abs() >= 1e-12 {
            out.mismatches.push(format!("arm {i}: chain and closed-form levers differ"));
        }
        let (range, fallback) = compute_control_range(&loc, &km, &q, d.alpha);
        if levers.iter().any(|l| *l < 1e-9) {
            out.expect(&format!("arm {i} singular fallback"), fallback, true);
            continue;
        }
        out.expect(&format!("arm {i} fallback"), fallback, false);
        let reach = l1 + l2;
        let load = d.mu * d.mass * d.gravity;
        let (f_lo, f_hi) = (d.lower / reach, d.upper / reach);
        let (lo, hi) = joints(range);
        out.expect(&format!("arm {i} contact lower"), lo, levers.iter().map(|l| l * (f_lo + load)).collect());
        out.expect(&format!("arm {i} contact upper"), hi, levers.iter().map(|l| l * (f_hi + load)).collect());
        let it = joints(compute_control_range(&RobotLocation::Interaction, &km, &q, d.alpha).0);
        out.expect(&format!("arm {i} interaction"), it, (vec![d.alpha * d.lower; 2], vec![d.alpha * d.upper; 2]));
        out.arm += 1;
    }
    out
}

//! Planar rigid-body propagation: semi-implicit Euler substeps with Coulomb
//! floor friction, sequential-impulse contacts and robot actuation.

pub mod arm;
pub mod car;
pub mod contact;
pub mod friction;

use serde::{Deserialize, Serialize};

use crate::world::geometry::{manifold, Placed};
use crate::world::{perp, robot_footprint, Pose2, RobotKind, RobotState, Scene, Vec2, WorkspaceState};

pub use arm::arm_substep;
pub use car::car_substep;
pub use contact::{resolve_contacts, ContactConstraint, ContactImpulse, GroundFriction, PointJacobian};
pub use friction::ground_friction_force;

use friction::{friction_step, friction_step_1d};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Integration substep, s.
    pub dt: f64,
    /// One propagation step, s.
    pub control_duration: f64,
    pub gravity: f64,
    pub contact_solver_iterations: usize,
    /// Below this speed (m/s) static friction applies.
    pub static_friction_epsilon: f64,
    /// Coulomb coefficient between touching bodies.
    pub contact_friction: f64,
    pub baumgarte: f64,
    /// Penetration tolerated before positional correction, m.
    pub linear_slop: f64,
    /// Speculative contact distance, m.
    pub contact_margin: f64,
    /// Any body faster than this aborts propagation, m/s.
    pub max_speed: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            control_duration: 0.05,
            gravity: 9.8,
            contact_solver_iterations: 12,
            static_friction_epsilon: 1e-3,
            contact_friction: 0.5,
            baumgarte: 0.2,
            linear_slop: 5e-4,
            contact_margin: 4e-3,
            max_speed: 1e3,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), PhysicsError> {
        let ok = self.dt > 0.0
            && self.dt <= self.control_duration
            && self.gravity > 0.0
            && self.contact_solver_iterations >= 1
            && self.static_friction_epsilon >= 0.0
            && self.contact_friction >= 0.0
            && self.contact_margin >= 0.0
            && self.max_speed > 0.0
            && [self.dt, self.control_duration, self.gravity].iter().all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(PhysicsError::InvalidConfig(format!("{self:?}")))
        }
    }

    /// Substeps per control duration.
    pub fn substeps(&self) -> usize {
        ((self.control_duration / self.dt).round() as usize).max(1)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControlInput {
    PlanarForce(Vec2),
    CarControl { drive_torque: f64, steer_torque: f64 },
    JointTorques(Vec<f64>),
}

impl ControlInput {
    pub fn zero_for(kind: &RobotKind) -> Self {
        match kind {
            RobotKind::HolonomicDisk { .. } => ControlInput::PlanarForce(Vec2::zeros()),
            RobotKind::CarLike(_) => ControlInput::CarControl {
                drive_torque: 0.0,
                steer_torque: 0.0,
            },
            RobotKind::PlanarArm(a) => ControlInput::JointTorques(vec![0.0; a.joint_count()]),
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            ControlInput::PlanarForce(f) => f.x.is_finite() && f.y.is_finite(),
            ControlInput::CarControl {
                drive_torque,
                steer_torque,
            } => drive_torque.is_finite() && steer_torque.is_finite(),
            ControlInput::JointTorques(t) => t.iter().all(|v| v.is_finite()),
        }
    }

    fn matches(&self, kind: &RobotKind) -> bool {
        match (self, kind) {
            (ControlInput::PlanarForce(_), RobotKind::HolonomicDisk { .. }) => true,
            (ControlInput::CarControl { .. }, RobotKind::CarLike(_)) => true,
            (ControlInput::JointTorques(t), RobotKind::PlanarArm(a)) => t.len() == a.joint_count(),
            _ => false,
        }
    }
}

/// Robot body touching an object during one substep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContactEvent {
    /// Index into `Scene::objects`.
    pub object: usize,
    /// Robot body: 0 for mobile robots, link index for the arm.
    pub robot_body: usize,
    pub point: Vec2,
    /// Contact point in the object frame.
    pub local_point: Vec2,
    /// From the robot into the object.
    pub normal: Vec2,
    pub separation: f64,
    pub normal_impulse: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SubstepRecord {
    pub dt: f64,
    /// Planar actuation force (holonomic robot), N.
    pub force: Vec2,
    /// Robot displacement during the substep, m.
    pub displacement: Vec2,
    /// Actuated-axis torques (car: drive, steer; arm: joints), N·m.
    pub torques: Vec<f64>,
    /// Matching axis rates after the substep, rad/s.
    pub rates: Vec<f64>,
    pub contacts: Vec<ContactEvent>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PropagationLog {
    pub substeps: Vec<SubstepRecord>,
}

impl PropagationLog {
    pub fn contact_events(&self) -> impl Iterator<Item = &ContactEvent> {
        self.substeps.iter().flat_map(|s| s.contacts.iter())
    }

    pub fn append(&mut self, other: PropagationLog) {
        self.substeps.extend(other.substeps);
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PhysicsError {
    #[error("control input does not match the {0} robot model")]
    ControlMismatch(&'static str),
    #[error("control input is not finite")]
    NonFiniteControl,
    #[error("propagation needs at least one step")]
    ZeroSteps,
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("solver instability: {body} reached speed {speed}")]
    Instability { body: String, speed: f64 },
    #[error("robot state: {0}")]
    Robot(#[from] crate::world::robot::FootprintError),
}

/// Applies `u` for `steps` control durations starting from `q`.
pub fn propagate(
    scene: &Scene,
    q: &WorkspaceState,
    u: &ControlInput,
    steps: usize,
    cfg: &SimConfig,
) -> Result<(WorkspaceState, PropagationLog), PhysicsError> {
    if steps == 0 {
        return Err(PhysicsError::ZeroSteps);
    }
    let mut state = q.clone();
    let mut log = PropagationLog::default();
    for _ in 0..steps {
        step_into(scene, &mut state, u, cfg, &mut log)?;
    }
    Ok((state, log))
}

/// One control duration, appending to `log`. Chaining single steps is
/// bit-identical to a multi-step [`propagate`].
pub fn step_into(
    scene: &Scene,
    state: &mut WorkspaceState,
    u: &ControlInput,
    cfg: &SimConfig,
    log: &mut PropagationLog,
) -> Result<(), PhysicsError> {
    cfg.validate()?;
    if !u.matches(&scene.robot.kind) {
        return Err(PhysicsError::ControlMismatch(scene.robot.label()));
    }
    if !u.is_finite() {
        return Err(PhysicsError::NonFiniteControl);
    }
    let mut engine = Engine::new(scene, cfg);
    for _ in 0..cfg.substeps() {
        let rec = engine.substep(state, u)?;
        log.substeps.push(rec);
    }
    Ok(())
}

#[derive(Clone, Copy, Debug)]
enum Dofs {
    None,
    /// (vx, vy)
    Planar(usize),
    /// (vx, vy, ω)
    Rigid(usize),
    /// Speed along a world axis.
    Axis(usize, Vec2),
    /// Car longitudinal speed.
    Car(usize),
    /// Arm joint rates starting here.
    Arm(usize),
}

#[derive(Clone, Copy, Debug)]
enum Owner {
    Robot(usize),
    Object(usize),
}

struct Body {
    owner: Owner,
    placed: Placed,
    lo: Vec2,
    hi: Vec2,
}

struct Engine<'a> {
    scene: &'a Scene,
    cfg: &'a SimConfig,
    arm_inertias: Vec<f64>,
}

impl<'a> Engine<'a> {
    fn new(scene: &'a Scene, cfg: &'a SimConfig) -> Self {
        let arm_inertias = scene.robot.arm().map(|a| a.joint_inertias()).unwrap_or_default();
        Self {
            scene,
            cfg,
            arm_inertias,
        }
    }

    fn substep(&mut self, q: &mut WorkspaceState, u: &ControlInput) -> Result<SubstepRecord, PhysicsError> {
        let scene = self.scene;
        let cfg = self.cfg;
        let dt = cfg.dt;

        // generalised velocity layout: robot first, then movable objects
        let mut v: Vec<f64> = Vec::new();
        let mut inv_mass: Vec<f64> = Vec::new();
        let robot_dofs = match (&scene.robot.kind, &q.robot) {
            (RobotKind::HolonomicDisk { mass, .. }, RobotState::Holonomic { velocity, .. }) => {
                v.extend([velocity.x, velocity.y]);
                inv_mass.extend([1.0 / mass, 1.0 / mass]);
                Dofs::Planar(0)
            }
            (RobotKind::CarLike(c), RobotState::Car { speed, .. }) => {
                v.push(*speed);
                inv_mass.push(1.0 / c.mass);
                Dofs::Car(0)
            }
            (RobotKind::PlanarArm(_), RobotState::Arm { rates, .. }) => {
                v.extend(rates.iter().copied());
                inv_mass.extend(self.arm_inertias.iter().map(|i| 1.0 / i));
                Dofs::Arm(0)
            }
            _ => return Err(crate::world::robot::FootprintError::Mismatch(scene.robot.label()).into()),
        };
        let mut object_dofs = Vec::with_capacity(scene.objects.len());
        for (spec, st) in scene.objects.iter().zip(&q.objects) {
            let d = v.len();
            let dofs = if spec.is_fixed() {
                Dofs::None
            } else if let Some(axis) = st.constraint {
                let axis = st.pose.transform_vector(axis).normalize();
                v.push(st.linear_velocity.dot(&axis));
                inv_mass.push(1.0 / spec.mass);
                Dofs::Axis(d, axis)
            } else {
                v.extend([st.linear_velocity.x, st.linear_velocity.y, st.angular_velocity]);
                let inertia = spec.shape.inertia(spec.mass);
                inv_mass.extend([1.0 / spec.mass, 1.0 / spec.mass, 1.0 / inertia]);
                Dofs::Rigid(d)
            };
            object_dofs.push(dofs);
        }

        // bodies and contacts at the current configuration
        let footprint = robot_footprint(&scene.robot, &q.robot)?;
        let mut bodies: Vec<Body> = Vec::with_capacity(footprint.len() + scene.objects.len());
        for (i, (shape, pose)) in footprint.iter().enumerate() {
            bodies.push(body(Owner::Robot(i), Placed::new(shape, pose)));
        }
        for (i, (spec, st)) in scene.objects.iter().zip(&q.objects).enumerate() {
            bodies.push(body(Owner::Object(i), Placed::new(&spec.shape, &st.pose)));
        }
        let movable = |o: Owner| match o {
            Owner::Robot(_) => true,
            Owner::Object(i) => !matches!(object_dofs[i], Dofs::None),
        };

        let mut constraints: Vec<ContactConstraint> = Vec::new();
        let mut pairs: Vec<(Owner, Owner, Vec2)> = Vec::new();
        let mut touching = vec![false; v.len()];
        let margin = cfg.contact_margin;
        for i in 0..bodies.len() {
            for j in (i + 1)..bodies.len() {
                let (a, b) = (&bodies[i], &bodies[j]);
                if matches!((a.owner, b.owner), (Owner::Robot(_), Owner::Robot(_))) {
                    continue;
                }
                if !movable(a.owner) && !movable(b.owner) {
                    continue;
                }
                if a.lo.x > b.hi.x + margin
                    || b.lo.x > a.hi.x + margin
                    || a.lo.y > b.hi.y + margin
                    || b.lo.y > a.hi.y + margin
                {
                    continue;
                }
                let Some(m) = manifold(&a.placed, &b.placed, margin) else {
                    continue;
                };
                for cp in &m.points {
                    let ja = self.jacobian(q, a.owner, robot_dofs, &object_dofs, cp.point);
                    let jb = self.jacobian(q, b.owner, robot_dofs, &object_dofs, cp.point);
                    for (d, _) in ja.iter().chain(jb.iter()) {
                        touching[*d] = true;
                    }
                    constraints.push(ContactConstraint::new(
                        &ja,
                        &jb,
                        m.normal,
                        cp.separation,
                        cfg.contact_friction,
                        &inv_mass,
                        cfg,
                    ));
                    pairs.push((a.owner, b.owner, cp.point));
                }
            }
        }

        // actuation and floor friction; bodies in contact get their floor
        // friction inside the solver instead
        let mut ground: Vec<GroundFriction> = Vec::new();
        let mut rec = SubstepRecord {
            dt,
            ..SubstepRecord::default()
        };
        match (&scene.robot.kind, u, robot_dofs) {
            (RobotKind::HolonomicDisk { mass, mu_ground, .. }, ControlInput::PlanarForce(f), Dofs::Planar(d)) => {
                let vel = Vec2::new(v[d], v[d + 1]);
                rec.force = *f;
                if touching[d] || touching[d + 1] {
                    let driven = vel + f * (dt / mass);
                    v[d] = driven.x;
                    v[d + 1] = driven.y;
                    ground.push(GroundFriction::Planar {
                        dofs: (d, d + 1),
                        limit: mu_ground * cfg.gravity * dt,
                        acc: Vec2::zeros(),
                    });
                } else {
                    let (next, _) = friction_step(*mass, *mu_ground, vel, *f, cfg);
                    v[d] = next.x;
                    v[d + 1] = next.y;
                }
            }
            (
                RobotKind::CarLike(c),
                ControlInput::CarControl {
                    drive_torque,
                    steer_torque,
                },
                Dofs::Car(d),
            ) => {
                let RobotState::Car { steer_rate, .. } = &mut q.robot else {
                    unreachable!()
                };
                let (speed, rate) = car::car_actuate(c, v[d], *steer_rate, *drive_torque, *steer_torque, cfg);
                v[d] = speed;
                *steer_rate = rate;
                rec.torques = vec![*drive_torque, *steer_torque];
            }
            (RobotKind::PlanarArm(arm), ControlInput::JointTorques(t), Dofs::Arm(d)) => {
                let n = arm.joint_count();
                arm::arm_actuate(arm, &self.arm_inertias, &mut v[d..d + n], t, dt);
                rec.torques = t.clone();
            }
            _ => return Err(PhysicsError::ControlMismatch(scene.robot.label())),
        }
        for (i, spec) in scene.objects.iter().enumerate() {
            let mu = if spec.gravity_affected { spec.mu_ground } else { 0.0 };
            match object_dofs[i] {
                Dofs::Rigid(d) => {
                    let inertia = spec.shape.inertia(spec.mass);
                    let spin_limit = mu * spec.mass * cfg.gravity * spec.shape.friction_radius() * dt / inertia;
                    if touching[d] || touching[d + 1] || touching[d + 2] {
                        if mu > 0.0 {
                            ground.push(GroundFriction::Planar {
                                dofs: (d, d + 1),
                                limit: mu * cfg.gravity * dt,
                                acc: Vec2::zeros(),
                            });
                            ground.push(GroundFriction::Axis {
                                dof: d + 2,
                                limit: spin_limit,
                                acc: 0.0,
                            });
                        }
                    } else {
                        let vel = Vec2::new(v[d], v[d + 1]);
                        let (next, _) = friction_step(spec.mass, mu, vel, Vec2::zeros(), cfg);
                        v[d] = next.x;
                        v[d + 1] = next.y;
                        if spin_limit > 0.0 {
                            v[d + 2] = friction_step_1d(v[d + 2], v[d + 2], spin_limit, cfg.static_friction_epsilon);
                        }
                    }
                }
                Dofs::Axis(d, _) => {
                    let limit = mu * cfg.gravity * dt;
                    if touching[d] {
                        if mu > 0.0 {
                            ground.push(GroundFriction::Axis { dof: d, limit, acc: 0.0 });
                        }
                    } else if limit > 0.0 {
                        v[d] = friction_step_1d(v[d], v[d], limit, cfg.static_friction_epsilon);
                    }
                }
                _ => {}
            }
        }

        let impulses = resolve_contacts(&mut v, &inv_mass, &mut constraints, &mut ground, cfg);

        // robot contact events
        for (k, (a, b, point)) in pairs.iter().enumerate() {
            let c = &constraints[k];
            if impulses[k].normal <= 0.0 && c.separation > 0.0 {
                continue;
            }
            let (link, obj, normal) = match (*a, *b) {
                (Owner::Robot(l), Owner::Object(o)) => (l, o, c.normal),
                (Owner::Object(o), Owner::Robot(l)) => (l, o, -c.normal),
                _ => continue,
            };
            rec.contacts.push(ContactEvent {
                object: obj,
                robot_body: link,
                point: *point,
                local_point: q.objects[obj].pose.inverse_transform_point(*point),
                normal,
                separation: c.separation,
                normal_impulse: impulses[k].normal,
            });
        }

        // write back and integrate
        match (&scene.robot.kind, &mut q.robot, robot_dofs) {
            (RobotKind::HolonomicDisk { .. }, RobotState::Holonomic { pose, velocity }, Dofs::Planar(d)) => {
                *velocity = Vec2::new(v[d], v[d + 1]);
                let disp = *velocity * dt;
                *pose = Pose2::new(pose.position.x + disp.x, pose.position.y + disp.y, pose.heading);
                rec.displacement = disp;
            }
            (
                RobotKind::CarLike(c),
                RobotState::Car {
                    pose,
                    speed,
                    steer,
                    steer_rate,
                },
                Dofs::Car(d),
            ) => {
                *speed = v[d];
                let before = pose.position;
                car::car_integrate(c, pose, *speed, steer, steer_rate, dt);
                rec.displacement = pose.position - before;
                rec.rates = vec![*speed / c.wheel_radius, *steer_rate];
            }
            (RobotKind::PlanarArm(arm), RobotState::Arm { angles, rates }, Dofs::Arm(d)) => {
                let n = arm.joint_count();
                rates.copy_from_slice(&v[d..d + n]);
                let before = arm.tool_point(angles);
                arm::arm_integrate(arm, angles, rates, dt);
                rec.displacement = arm.tool_point(angles) - before;
                rec.rates = rates.clone();
            }
            _ => unreachable!(),
        }
        if q.robot.speed() > cfg.max_speed || !q.robot.speed().is_finite() {
            return Err(PhysicsError::Instability {
                body: "robot".into(),
                speed: q.robot.speed(),
            });
        }
        for (i, st) in q.objects.iter_mut().enumerate() {
            match object_dofs[i] {
                Dofs::Rigid(d) => {
                    st.linear_velocity = Vec2::new(v[d], v[d + 1]);
                    st.angular_velocity = v[d + 2];
                }
                Dofs::Axis(d, axis) => {
                    st.linear_velocity = axis * v[d];
                    st.angular_velocity = 0.0;
                }
                _ => continue,
            }
            let speed = st.linear_velocity.norm();
            if speed > cfg.max_speed || !speed.is_finite() || !st.angular_velocity.is_finite() {
                return Err(PhysicsError::Instability {
                    body: scene.objects[i].id.to_string(),
                    speed,
                });
            }
            if st.linear_velocity != Vec2::zeros() || st.angular_velocity != 0.0 {
                let p = st.pose.position + st.linear_velocity * dt;
                st.pose = Pose2::new(p.x, p.y, st.pose.heading + st.angular_velocity * dt);
            }
        }
        q.time += dt;
        Ok(rec)
    }

    fn jacobian(
        &self,
        q: &WorkspaceState,
        owner: Owner,
        robot_dofs: Dofs,
        object_dofs: &[Dofs],
        p: Vec2,
    ) -> PointJacobian {
        let mut j = PointJacobian::new();
        match owner {
            Owner::Robot(link) => match (&self.scene.robot.kind, &q.robot, robot_dofs) {
                (_, _, Dofs::Planar(d)) => {
                    j.push((d, Vec2::new(1.0, 0.0)));
                    j.push((d + 1, Vec2::new(0.0, 1.0)));
                }
                (RobotKind::CarLike(c), RobotState::Car { pose, steer, .. }, Dofs::Car(d)) => {
                    j.push((d, car::point_column(c, pose, *steer, p)));
                }
                (RobotKind::PlanarArm(arm), RobotState::Arm { angles, .. }, Dofs::Arm(d)) => {
                    for (k, col) in arm.point_jacobian(angles, link, p).into_iter().enumerate().take(link + 1) {
                        j.push((d + k, col));
                    }
                }
                _ => {}
            },
            Owner::Object(i) => match object_dofs[i] {
                Dofs::Rigid(d) => {
                    j.push((d, Vec2::new(1.0, 0.0)));
                    j.push((d + 1, Vec2::new(0.0, 1.0)));
                    j.push((d + 2, perp(p - q.objects[i].pose.position)));
                }
                Dofs::Axis(d, axis) => j.push((d, axis)),
                _ => {}
            },
        }
        j
    }
}

fn body(owner: Owner, placed: Placed) -> Body {
    let (lo, hi) = placed.aabb();
    Body { owner, placed, lo, hi }
}

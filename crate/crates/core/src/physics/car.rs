use crate::world::{CarParams, Pose2, RobotState, Vec2};

use super::friction::friction_step_1d;
use super::SimConfig;

/// Longitudinal force at the wheels, traction-limited.
pub fn drive_force(car: &CarParams, drive_torque: f64, gravity: f64) -> f64 {
    let traction = car.mu_wheel * car.mass * gravity;
    (drive_torque / car.wheel_radius).clamp(-traction, traction)
}

/// Velocity-level update before contacts: returns `(speed, steer_rate)`.
pub(crate) fn car_actuate(
    car: &CarParams,
    speed: f64,
    steer_rate: f64,
    drive_torque: f64,
    steer_torque: f64,
    cfg: &SimConfig,
) -> (f64, f64) {
    let driven = speed + drive_force(car, drive_torque, cfg.gravity) * cfg.dt / car.mass;
    let decel = car.rolling_resistance * cfg.gravity * cfg.dt;
    let speed = if decel > 0.0 {
        friction_step_1d(speed, driven, decel, cfg.static_friction_epsilon)
    } else {
        driven
    };
    let steer_rate =
        steer_rate + (steer_torque - car.steer_damping * steer_rate) * cfg.dt / car.steer_inertia;
    (speed, steer_rate)
}

/// Yaw rate of the bicycle model.
pub fn yaw_rate(car: &CarParams, speed: f64, steer: f64) -> f64 {
    speed * steer.tan() / car.wheelbase
}

/// Velocity of a point `p` on the chassis per unit longitudinal speed.
pub(crate) fn point_column(car: &CarParams, pose: &Pose2, steer: f64, p: Vec2) -> Vec2 {
    let h = Vec2::new(pose.heading.cos(), pose.heading.sin());
    let k = steer.tan() / car.wheelbase;
    h + crate::world::perp(p - pose.position) * k
}

/// Position-level update with the steering stop enforced.
pub(crate) fn car_integrate(
    car: &CarParams,
    pose: &mut Pose2,
    speed: f64,
    steer: &mut f64,
    steer_rate: &mut f64,
    dt: f64,
) {
    *steer += *steer_rate * dt;
    if steer.abs() > car.max_steer {
        *steer = steer.clamp(-car.max_steer, car.max_steer);
        *steer_rate = 0.0;
    }
    let heading = pose.heading + yaw_rate(car, speed, *steer) * dt;
    let h = Vec2::new(heading.cos(), heading.sin());
    *pose = Pose2::new(
        pose.position.x + h.x * speed * dt,
        pose.position.y + h.y * speed * dt,
        heading,
    );
}

/// One contact-free substep of the car: traction-limited drive, steering
/// with inertia and damping, no lateral slip.
pub fn car_substep(
    car: &CarParams,
    state: &RobotState,
    drive_torque: f64,
    steer_torque: f64,
    cfg: &SimConfig,
) -> RobotState {
    let RobotState::Car {
        pose,
        speed,
        steer,
        steer_rate,
    } = state
    else {
        panic!("car_substep needs a car state");
    };
    let (speed, mut steer_rate) = car_actuate(car, *speed, *steer_rate, drive_torque, steer_torque, cfg);
    let mut pose = *pose;
    let mut steer = *steer;
    car_integrate(car, &mut pose, speed, &mut steer, &mut steer_rate, cfg.dt);
    RobotState::Car {
        pose,
        speed,
        steer,
        steer_rate,
    }
}

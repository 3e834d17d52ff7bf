use crate::world::Vec2;

use super::SimConfig;

/// Coulomb floor friction on a body of `body_mass` moving at `velocity`
/// while `applied` acts on it.
///
/// Static regime (`|v| < ε` and `|applied| ≤ μmg`) cancels the applied
/// force exactly. Otherwise the kinetic force has magnitude `μmg` and opposes
/// the velocity, or the applied force when the body is (nearly) at rest.
pub fn ground_friction_force(body_mass: f64, mu: f64, velocity: Vec2, applied: Vec2, cfg: &SimConfig) -> Vec2 {
    let limit = mu * body_mass * cfg.gravity;
    let speed = velocity.norm();
    if speed < cfg.static_friction_epsilon {
        if applied.norm() <= limit {
            return -applied;
        }
        return -applied.normalize() * limit;
    }
    -velocity / speed * limit
}

/// One semi-implicit velocity update of a free body under `applied` and
/// floor friction. Kinetic friction never reverses the motion it opposes.
///
/// Returns the new velocity and the velocity change caused by friction.
pub(crate) fn friction_step(
    mass: f64,
    mu: f64,
    velocity: Vec2,
    applied: Vec2,
    cfg: &SimConfig,
) -> (Vec2, Vec2) {
    let dt = cfg.dt;
    let limit = mu * mass * cfg.gravity;
    let driven = velocity + applied * (dt / mass);
    if velocity.norm() < cfg.static_friction_epsilon && applied.norm() <= limit {
        return (Vec2::zeros(), -driven);
    }
    let friction = ground_friction_force(mass, mu, velocity, applied, cfg);
    let f_norm = friction.norm();
    if f_norm == 0.0 {
        return (driven, Vec2::zeros());
    }
    let dir = -friction / f_norm;
    let dv = f_norm * dt / mass;
    let along = driven.dot(&dir);
    let next = if along < dv {
        driven - dir * along.max(0.0)
    } else {
        driven - dir * dv
    };
    (next, next - driven)
}

/// Scalar analogue of [`friction_step`] for a single axis (constrained
/// objects, spin).
pub(crate) fn friction_step_1d(velocity: f64, driven: f64, decel: f64, eps: f64) -> f64 {
    if velocity.abs() < eps && (driven - velocity).abs() <= decel {
        return 0.0;
    }
    let sign = if velocity.abs() >= eps { velocity.signum() } else { (driven - velocity).signum() };
    let along = driven * sign;
    if along < decel {
        driven - sign * along.max(0.0)
    } else {
        driven - sign * decel
    }
}

use crate::world::{ArmParams, RobotState};

use super::SimConfig;

/// Decoupled joint dynamics `I_k q̈_k = τ_k − b q̇_k`, velocity level.
pub(crate) fn arm_actuate(arm: &ArmParams, inertias: &[f64], rates: &mut [f64], torques: &[f64], dt: f64) {
    for ((rate, tau), inertia) in rates.iter_mut().zip(torques).zip(inertias) {
        *rate += (tau - arm.joint_damping * *rate) * dt / inertia;
    }
}

/// Position update; a joint reaching its stop rests there with zero rate.
pub(crate) fn arm_integrate(arm: &ArmParams, angles: &mut [f64], rates: &mut [f64], dt: f64) {
    for ((q, rate), (lo, hi)) in angles.iter_mut().zip(rates.iter_mut()).zip(&arm.joint_limits) {
        *q += *rate * dt;
        if *q > *hi {
            *q = *hi;
            *rate = 0.0;
        } else if *q < *lo {
            *q = *lo;
            *rate = 0.0;
        }
    }
}

/// One contact-free substep of the arm.
pub fn arm_substep(arm: &ArmParams, state: &RobotState, torques: &[f64], cfg: &SimConfig) -> RobotState {
    let RobotState::Arm { angles, rates } = state else {
        panic!("arm_substep needs an arm state");
    };
    assert_eq!(torques.len(), arm.joint_count(), "one torque per joint");
    let inertias = arm.joint_inertias();
    let mut angles = angles.clone();
    let mut rates = rates.clone();
    arm_actuate(arm, &inertias, &mut rates, torques, cfg.dt);
    arm_integrate(arm, &mut angles, &mut rates, cfg.dt);
    RobotState::Arm { angles, rates }
}

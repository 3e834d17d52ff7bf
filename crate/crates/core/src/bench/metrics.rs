//! Power along trajectories.

use crate::physics::PropagationLog;

/// `Σ f·d / Δt` over substeps, robot actuation force only.
pub fn power_translational(log: &PropagationLog) -> f64 {
    let mut p = 0.0;
    for s in &log.substeps {
        p += s.force.dot(&s.displacement) / s.dt;
    }
    p
}

/// `Σ τ·ω` over actuated axes and substeps.
pub fn power_rotational(log: &PropagationLog) -> f64 {
    let mut p = 0.0;
    for s in &log.substeps {
        for (tau, omega) in s.torques.iter().zip(&s.rates) {
            p += tau * omega;
        }
    }
    p
}

/// Power of a log for any robot model: the disk logs only forces, the car
/// and arm only torques.
pub fn power(log: &PropagationLog) -> f64 {
    power_translational(log) + power_rotational(log)
}

/// Number of separate robot–object contact episodes in a log.
pub fn contact_episodes(log: &PropagationLog) -> usize {
    let mut episodes = 0;
    let mut touching = false;
    for s in &log.substeps {
        let now = !s.contacts.is_empty();
        if now && !touching {
            episodes += 1;
        }
        touching = now;
    }
    episodes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::SubstepRecord;
    use crate::world::Vec2;

    fn log(records: Vec<SubstepRecord>) -> PropagationLog {
        PropagationLog { substeps: records }
    }

    #[test]
    fn translational_cases() {
        assert_eq!(power_translational(&log(vec![])), 0.0);
        let one = SubstepRecord {
            dt: 0.5,
            force: Vec2::new(2.0, 0.0),
            displacement: Vec2::new(1.0, 0.0),
            ..SubstepRecord::default()
        };
        assert_eq!(power_translational(&log(vec![one.clone()])), 4.0);
        let orthogonal = SubstepRecord {
            displacement: Vec2::new(0.0, 1.0),
            ..one
        };
        assert_eq!(power_translational(&log(vec![orthogonal])), 0.0);
        let idle = SubstepRecord {
            dt: 0.001,
            displacement: Vec2::new(0.3, 0.1),
            ..SubstepRecord::default()
        };
        assert_eq!(power_translational(&log(vec![idle])), 0.0);
    }

    #[test]
    fn rotational_cases() {
        let zero = SubstepRecord {
            dt: 0.001,
            torques: vec![0.0],
            rates: vec![5.0],
            ..SubstepRecord::default()
        };
        assert_eq!(power_rotational(&log(vec![zero])), 0.0);
        let one = SubstepRecord {
            dt: 0.001,
            torques: vec![2.0],
            rates: vec![3.0],
            ..SubstepRecord::default()
        };
        assert_eq!(power_rotational(&log(vec![one])), 6.0);
        let cancel = SubstepRecord {
            dt: 0.001,
            torques: vec![2.0, -2.0],
            rates: vec![3.0, 3.0],
            ..SubstepRecord::default()
        };
        assert_eq!(power_rotational(&log(vec![cancel])), 0.0);
    }
}

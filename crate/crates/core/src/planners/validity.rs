use serde::{Deserialize, Serialize};

use crate::knowledge::{InstantiatedKnowledge, ManipulationKnowledge};
use crate::physics::PropagationLog;
use crate::reasoning::REGION_TOLERANCE;
use crate::world::geometry::{placed_overlap, Placed};
use crate::world::{robot_footprint, ObjectClass, Scene, WorkspaceState};

/// Why a propagated state was rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Invalidity {
    FixedContact { object: usize },
    OutsideRegion { object: usize },
    JointLimit,
    RobotSpeed { speed: f64 },
    ObjectSpeed { object: usize, speed: f64 },
}

pub struct ValidityContext<'a> {
    pub scene: &'a Scene,
    pub km: &'a ManipulationKnowledge,
    /// Sanity bound on object speeds, m/s.
    pub object_speed_limit: f64,
}

impl ValidityContext<'_> {
    /// Class the checker treats an object as: inferred when reasoning is on,
    /// declared otherwise.
    fn class(&self, object: usize, kappa: Option<&InstantiatedKnowledge>) -> ObjectClass {
        match kappa {
            Some(_) => self.km.objects[object].class,
            None => self.scene.objects[object].class,
        }
    }

    /// First violated rule, if any. Without `kappa` any contact with a
    /// manipulatable object is allowed.
    pub fn check(
        &self,
        q: &WorkspaceState,
        kappa: Option<&InstantiatedKnowledge>,
        log: &PropagationLog,
    ) -> Option<Invalidity> {
        for e in log.contact_events() {
            if self.class(e.object, kappa) == ObjectClass::Fixed {
                return Some(Invalidity::FixedContact { object: e.object });
            }
            if let Some(k) = kappa {
                let inside = self.km.objects[e.object]
                    .regions
                    .iter()
                    .any(|r| k.is_active(&r.id) && r.contains_local(e.local_point, REGION_TOLERANCE));
                if !inside {
                    return Some(Invalidity::OutsideRegion { object: e.object });
                }
            }
        }
        let footprint = match robot_footprint(&self.scene.robot, &q.robot) {
            Ok(f) => f,
            Err(_) => return Some(Invalidity::JointLimit),
        };
        if let Some(arm) = self.scene.robot.arm() {
            if let crate::world::RobotState::Arm { angles, .. } = &q.robot {
                if !arm.within_limits(angles) {
                    return Some(Invalidity::JointLimit);
                }
            }
        }
        let bodies: Vec<Placed> = footprint.iter().map(|(s, p)| Placed::new(s, p)).collect();
        for (i, (spec, st)) in self.scene.objects.iter().zip(&q.objects).enumerate() {
            if self.class(i, kappa) != ObjectClass::Fixed {
                continue;
            }
            let obj = Placed::new(&spec.shape, &st.pose);
            if bodies.iter().any(|b| placed_overlap(b, &obj)) {
                return Some(Invalidity::FixedContact { object: i });
            }
        }
        let speed = q.robot.speed();
        if speed > self.scene.robot.bounds.v_max {
            return Some(Invalidity::RobotSpeed { speed });
        }
        for (i, st) in q.objects.iter().enumerate() {
            let speed = st.linear_velocity.norm();
            if speed > self.object_speed_limit {
                return Some(Invalidity::ObjectSpeed { object: i, speed });
            }
        }
        None
    }
}

/// The physics-based validity checker: `true` when `q` (reached with the
/// contacts in `log`) is acceptable.
pub fn state_validity_check(
    ctx: &ValidityContext,
    q: &WorkspaceState,
    kappa: Option<&InstantiatedKnowledge>,
    log: &PropagationLog,
) -> bool {
    ctx.check(q, kappa, log).is_none()
}

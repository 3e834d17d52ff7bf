//! Knowledge-guided kinodynamic tree planning (RRT and KPIECE) with the
//! physics engine as state propagator.

pub mod audit;
pub mod kpiece;
pub mod path;
pub mod rrt;
pub mod sampling;
pub mod validity;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bench::metrics;
use crate::knowledge::{ControlRange, InstantiatedKnowledge, ManipulationKnowledge, RobotLocation};
use crate::physics::{step_into, ControlInput, PropagationLog, SimConfig};
use crate::reasoning::{move_range, reasoning_process, ReasoningParams};
use crate::world::{RobotKind, Scene, WorkspaceState};

pub use audit::{audit_path, AuditReport};
pub use kpiece::ProjectionGrid;
pub use path::{replay, PathFile, ReplayError, ReplayResult};
pub use rrt::{select_node_rrt, DistanceWeights};
pub use sampling::{sample_controls_and_steps, SamplingParams};
pub use validity::{state_validity_check, Invalidity, ValidityContext};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlannerKind {
    Rrt,
    Kpiece,
}

impl fmt::Display for PlannerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PlannerKind::Rrt => "rrt",
            PlannerKind::Kpiece => "kpiece",
        })
    }
}

impl FromStr for PlannerKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "rrt" => Ok(PlannerKind::Rrt),
            "kpiece" => Ok(PlannerKind::Kpiece),
            _ => Err(format!("unknown planner '{s}' (expected rrt or kpiece)")),
        }
    }
}

/// `Kappa` reasons every step; the plain modes fix the control range at the
/// start and accept any contact with manipulatable objects.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Kappa,
    PlainLow,
    PlainHigh,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Kappa, Mode::PlainLow, Mode::PlainHigh];

    pub fn label(self) -> &'static str {
        match self {
            Mode::Kappa => "kappa",
            Mode::PlainLow => "plain_low",
            Mode::PlainHigh => "plain_high",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "kappa" => Ok(Mode::Kappa),
            "plain-low" | "plain_low" => Ok(Mode::PlainLow),
            "plain-high" | "plain_high" => Ok(Mode::PlainHigh),
            _ => Err(format!("unknown mode '{s}' (expected kappa, plain-low or plain-high)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlannerConfig {
    pub kind: PlannerKind,
    pub mode: Mode,
    pub goal_bias: f64,
    pub min_steps: usize,
    pub max_steps: usize,
    pub weights: DistanceWeights,
    /// KPIECE grid resolution per projected axis.
    pub cells_per_axis: usize,
    /// Wall-clock budget, s.
    pub t_max: f64,
    pub seed: u64,
    /// Optional iteration cap (makes runs independent of machine speed).
    pub max_iterations: Option<usize>,
    pub alpha: f64,
    pub push_bias: bool,
    /// Sanity bound on object speeds, m/s.
    pub object_speed_limit: f64,
    pub log_kappa: bool,
    pub sim: SimConfig,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            kind: PlannerKind::Rrt,
            mode: Mode::Kappa,
            goal_bias: 0.05,
            min_steps: 1,
            max_steps: 10,
            weights: DistanceWeights::default(),
            cells_per_axis: 32,
            t_max: 150.0,
            seed: 0,
            max_iterations: None,
            alpha: 0.5,
            push_bias: true,
            object_speed_limit: 5.0,
            log_kappa: false,
            sim: SimConfig::default(),
        }
    }
}

impl PlannerConfig {
    pub fn validate(&self) -> Result<(), PlanError> {
        let bad = |m: &str| Err(PlanError::InvalidConfig(m.to_string()));
        if !(0.0..=1.0).contains(&self.goal_bias) {
            return bad("goal bias must lie in [0, 1]");
        }
        if self.min_steps == 0 || self.min_steps > self.max_steps {
            return bad("steps must satisfy 1 <= min <= max");
        }
        if !(self.t_max > 0.0) {
            return bad("t_max must be positive");
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return bad("alpha must lie in (0, 1]");
        }
        if self.cells_per_axis == 0 {
            return bad("cells_per_axis must be positive");
        }
        self.sim.validate().map_err(|e| PlanError::InvalidConfig(e.to_string()))
    }

    fn sampling(&self) -> SamplingParams {
        SamplingParams {
            min_steps: self.min_steps,
            max_steps: self.max_steps,
            push_bias: self.push_bias,
        }
    }
}

/// One tree node: the state reached by applying `control` for `steps`
/// control durations from the parent's state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Motion {
    pub state: WorkspaceState,
    pub control: Option<ControlInput>,
    pub steps: usize,
    pub parent: Option<usize>,
    pub power_increment: f64,
    pub contacts: usize,
    /// Location the extension started from (reasoning modes).
    pub location: Option<RobotLocation>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub control: ControlInput,
    pub steps: usize,
    /// State reached at the end of the segment.
    pub state: WorkspaceState,
    pub power_increment: f64,
    pub contacts: usize,
    pub location: Option<RobotLocation>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionPath {
    pub segments: Vec<Segment>,
    pub power: f64,
    pub duration: f64,
    pub contacts: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KappaRecord {
    pub iteration: usize,
    pub node: usize,
    pub kappa: InstantiatedKnowledge,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanOutcome {
    pub path: Option<SolutionPath>,
    /// Wall-clock search time, s.
    pub planning_time: f64,
    pub iterations: usize,
    pub tree: Vec<Motion>,
    pub kappa_log: Vec<KappaRecord>,
}

impl PlanOutcome {
    pub fn solved(&self) -> bool {
        self.path.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PlanError {
    #[error("invalid planner config: {0}")]
    InvalidConfig(String),
    #[error("initial state is invalid: {0:?}")]
    InvalidStart(Invalidity),
}

/// Control range used by the plain modes for the whole search.
pub fn fixed_range(km: &ManipulationKnowledge, mode: Mode) -> ControlRange {
    let base = move_range(km);
    if mode != Mode::PlainHigh {
        return base;
    }
    let load = km
        .objects
        .iter()
        .filter(|o| o.declared.is_manipulatable())
        .map(|o| o.props.push_load(km.gravity))
        .fold(0.0, f64::max);
    let shift = match &km.robot.kind {
        RobotKind::HolonomicDisk { .. } => load,
        RobotKind::CarLike(c) => load * c.wheel_radius,
        RobotKind::PlanarArm(a) => load * a.reach(),
    };
    match base {
        ControlRange::Magnitude { lower, upper } => ControlRange::Magnitude {
            lower,
            upper: upper + shift,
        },
        ControlRange::Joint { lower, upper } => ControlRange::Joint {
            lower,
            upper: upper.iter().map(|u| u + shift).collect(),
        },
    }
}

pub fn in_goal(scene: &Scene, q: &WorkspaceState) -> bool {
    scene.goal.contains(scene.robot.projection(&q.robot))
}

struct Search<'a> {
    scene: &'a Scene,
    km: &'a ManipulationKnowledge,
    cfg: &'a PlannerConfig,
    ctx: ValidityContext<'a>,
    fixed: Option<ControlRange>,
    reasoning: ReasoningParams,
}

struct Extension {
    motion: Motion,
    reached: bool,
}

impl Search<'_> {
    fn kappa(&self, q: &WorkspaceState) -> Option<InstantiatedKnowledge> {
        match self.cfg.mode {
            Mode::Kappa => Some(reasoning_process(self.km, q, &self.reasoning)),
            _ => None,
        }
    }

    /// Propagates one control duration at a time, keeping the valid prefix.
    fn extend(
        &self,
        parent: usize,
        from: &WorkspaceState,
        kappa: Option<&InstantiatedKnowledge>,
        control: ControlInput,
        steps: usize,
    ) -> Option<Extension> {
        let mut q = from.clone();
        let mut log = PropagationLog::default();
        let mut done = 0;
        let mut reached = false;
        for _ in 0..steps {
            let mut next = q.clone();
            let mut step_log = PropagationLog::default();
            if step_into(self.scene, &mut next, &control, &self.cfg.sim, &mut step_log).is_err() {
                break;
            }
            if !state_validity_check(&self.ctx, &next, kappa, &step_log) {
                break;
            }
            q = next;
            log.append(step_log);
            done += 1;
            if in_goal(self.scene, &q) {
                reached = true;
                break;
            }
        }
        if done < self.cfg.min_steps && !reached {
            return None;
        }
        Some(Extension {
            motion: Motion {
                state: q,
                control: Some(control),
                steps: done,
                parent: Some(parent),
                power_increment: metrics::power(&log),
                contacts: metrics::contact_episodes(&log),
                location: kappa.map(|k| k.location.clone()),
            },
            reached,
        })
    }
}

/// Builds the root-to-`leaf` path from a tree.
pub fn extract_path(tree: &[Motion], leaf: usize, sim: &SimConfig) -> SolutionPath {
    let mut chain = Vec::new();
    let mut cur = Some(leaf);
    while let Some(i) = cur {
        chain.push(i);
        cur = tree[i].parent;
    }
    chain.reverse();
    let mut segments = Vec::new();
    let mut power = 0.0;
    let mut steps = 0;
    let mut contacts = 0;
    for &i in &chain[1..] {
        let m = &tree[i];
        power += m.power_increment;
        steps += m.steps;
        contacts += m.contacts;
        segments.push(Segment {
            control: m.control.clone().expect("non-root motion has a control"),
            steps: m.steps,
            state: m.state.clone(),
            power_increment: m.power_increment,
            contacts: m.contacts,
            location: m.location.clone(),
        });
    }
    SolutionPath {
        segments,
        power,
        duration: steps as f64 * sim.control_duration,
        contacts,
    }
}

/// Searches for a control sequence driving the robot into the goal region:
/// select a node, reason on its state, sample a control, propagate it step
/// by step while the validity checker accepts, and stop at the goal or when
/// the time budget runs out.
pub fn plan(scene: &Scene, km: &ManipulationKnowledge, cfg: &PlannerConfig) -> Result<PlanOutcome, PlanError> {
    cfg.validate()?;
    let started = Instant::now();
    let search = Search {
        scene,
        km,
        cfg,
        ctx: ValidityContext {
            scene,
            km,
            object_speed_limit: cfg.object_speed_limit,
        },
        fixed: match cfg.mode {
            Mode::Kappa => None,
            m => Some(fixed_range(km, m)),
        },
        reasoning: ReasoningParams { alpha: cfg.alpha },
    };
    let q0 = scene.initial.clone();
    let k0 = search.kappa(&q0);
    if let Some(reason) = search.ctx.check(&q0, k0.as_ref(), &PropagationLog::default()) {
        return Err(PlanError::InvalidStart(reason));
    }
    let mut tree = vec![Motion {
        state: q0.clone(),
        control: None,
        steps: 0,
        parent: None,
        power_increment: 0.0,
        contacts: 0,
        location: None,
    }];
    let outcome = |tree: Vec<Motion>, path, iterations, kappa_log| PlanOutcome {
        path,
        planning_time: started.elapsed().as_secs_f64(),
        iterations,
        tree,
        kappa_log,
    };
    if in_goal(scene, &q0) {
        let path = extract_path(&tree, 0, &cfg.sim);
        return Ok(outcome(tree, Some(path), 0, Vec::new()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut coords = vec![rrt::config_coords(&q0.robot)];
    let extent = scene.arena.extent();
    let mut grid = ProjectionGrid::new(scene.arena.min, extent / cfg.cells_per_axis as f64);
    let project = |q: &WorkspaceState| scene.robot.projection(&q.robot);
    grid.add_motion(0, project(&q0));
    let goal_dist = |q: &WorkspaceState| (project(q) - scene.goal.center).norm();
    let mut closest = (goal_dist(&q0), 0usize);
    let mut kappa_log = Vec::new();
    let mut iterations = 0;

    while started.elapsed().as_secs_f64() < cfg.t_max && cfg.max_iterations.is_none_or(|cap| iterations < cap) {
        iterations += 1;
        let node = match cfg.kind {
            PlannerKind::Rrt => {
                let sample = if rng.random::<f64>() < cfg.goal_bias {
                    rrt::goal_sample(scene, &cfg.weights, &mut rng)
                } else {
                    rrt::uniform_sample(scene, &cfg.weights, &mut rng)
                };
                select_node_rrt(&scene.robot.kind, &coords, &sample)
            }
            PlannerKind::Kpiece => {
                if rng.random::<f64>() < cfg.goal_bias {
                    closest.1
                } else {
                    grid.select_cell_kpiece(&mut rng).1
                }
            }
        };
        let from = tree[node].state.clone();
        let kappa = search.kappa(&from);
        if cfg.log_kappa {
            if let Some(k) = &kappa {
                kappa_log.push(KappaRecord {
                    iteration: iterations,
                    node,
                    kappa: k.clone(),
                });
            }
        }
        let range = match (&kappa, &search.fixed) {
            (Some(k), _) => k.control_range.clone(),
            (None, Some(r)) => r.clone(),
            (None, None) => unreachable!("plain modes carry a fixed range"),
        };
        let push = kappa.as_ref().and_then(|k| k.push_direction);
        let (control, steps) = sample_controls_and_steps(&scene.robot, &from, &range, push, &cfg.sampling(), &mut rng);
        let Some(ext) = search.extend(node, &from, kappa.as_ref(), control, steps) else {
            continue;
        };
        let id = tree.len();
        coords.push(rrt::config_coords(&ext.motion.state.robot));
        grid.add_motion(id, project(&ext.motion.state));
        let d = goal_dist(&ext.motion.state);
        if d < closest.0 {
            closest = (d, id);
        }
        tree.push(ext.motion);
        if ext.reached {
            let path = extract_path(&tree, id, &cfg.sim);
            return Ok(outcome(tree, Some(path), iterations, kappa_log));
        }
    }
    Ok(outcome(tree, None, iterations, kappa_log))
}

/// Actuation magnitudes of a control: force norm (disk), drive torque (car)
/// or per-joint torques (arm).
pub fn control_magnitudes(u: &ControlInput) -> Vec<f64> {
    match u {
        ControlInput::PlanarForce(f) => vec![f.norm()],
        ControlInput::CarControl { drive_torque, .. } => vec![drive_torque.abs()],
        ControlInput::JointTorques(t) => t.iter().map(|v| v.abs()).collect(),
    }
}

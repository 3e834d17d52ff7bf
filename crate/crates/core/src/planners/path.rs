use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bench::metrics;
use crate::physics::{propagate, ControlInput, PhysicsError, PropagationLog, SimConfig};
use crate::world::{Scene, WorkspaceState};

use super::{Mode, PlannerConfig, PlannerKind, SolutionPath};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathStep {
    pub control: ControlInput,
    pub steps: usize,
    /// Expected state at the end of the segment.
    pub state: WorkspaceState,
}

/// Replayable solution: controls, step counts and the expected states, tied
/// to a scene by its hash.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathFile {
    pub scene: String,
    pub scene_hash: String,
    pub planner: PlannerKind,
    pub mode: Mode,
    pub seed: u64,
    pub alpha: f64,
    pub sim: SimConfig,
    pub segments: Vec<PathStep>,
    pub power: f64,
    pub duration: f64,
    pub contacts: usize,
}

#[derive(Debug, thiserror::Error)]
pub enum PathFileError {
    #[error("cannot access {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed path file: {0}")]
    Parse(#[from] serde_json::Error),
}

impl PathFile {
    pub fn new(scene: &Scene, cfg: &PlannerConfig, path: &SolutionPath) -> Self {
        Self {
            scene: scene.name.clone(),
            scene_hash: scene.hash(),
            planner: cfg.kind,
            mode: cfg.mode,
            seed: cfg.seed,
            alpha: cfg.alpha,
            sim: cfg.sim.clone(),
            segments: path
                .segments
                .iter()
                .map(|s| PathStep {
                    control: s.control.clone(),
                    steps: s.steps,
                    state: s.state.clone(),
                })
                .collect(),
            power: path.power,
            duration: path.duration,
            contacts: path.contacts,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("path files serialise")
    }

    pub fn from_json(text: &str) -> Result<Self, PathFileError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<(), PathFileError> {
        let p = path.as_ref();
        fs::write(p, self.to_json()).map_err(|source| PathFileError::Io {
            path: p.display().to_string(),
            source,
        })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self, PathFileError> {
        let p = path.as_ref();
        let text = fs::read_to_string(p).map_err(|source| PathFileError::Io {
            path: p.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplayResult {
    pub final_state: WorkspaceState,
    pub power: f64,
    pub contacts: usize,
    pub log: PropagationLog,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ReplayError {
    #[error("path was planned on scene {expected}, not {found}")]
    SceneMismatch { expected: String, found: String },
    #[error("segment {segment} diverged from the recorded state")]
    Divergence { segment: usize },
    #[error(transparent)]
    Physics(#[from] PhysicsError),
}

/// Re-propagates every segment from the scene's initial state, checking
/// each recorded state and accumulating power exactly as the planner did.
pub fn replay(scene: &Scene, path: &PathFile, cfg: &SimConfig) -> Result<ReplayResult, ReplayError> {
    let hash = scene.hash();
    if hash != path.scene_hash {
        return Err(ReplayError::SceneMismatch {
            expected: path.scene_hash.clone(),
            found: hash,
        });
    }
    let mut q = scene.initial.clone();
    let mut log = PropagationLog::default();
    let mut power = 0.0;
    let mut contacts = 0;
    for (i, seg) in path.segments.iter().enumerate() {
        let (next, seg_log) = propagate(scene, &q, &seg.control, seg.steps, cfg)?;
        if next != seg.state {
            return Err(ReplayError::Divergence { segment: i });
        }
        power += metrics::power(&seg_log);
        contacts += metrics::contact_episodes(&seg_log);
        log.append(seg_log);
        q = next;
    }
    Ok(ReplayResult {
        final_state: q,
        power,
        contacts,
        log,
    })
}

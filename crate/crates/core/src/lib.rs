//! Knowledge-guided physics-based kinodynamic planning.
//!
//! A planar rigid-body engine propagates the whole workspace; a per-step
//! reasoning pass over manipulation knowledge decides which object faces the
//! robot may push from and how strong the sampled controls should be.

pub mod world;
pub mod physics;
pub mod knowledge;
pub mod reasoning;
pub mod planners;
pub mod bench;

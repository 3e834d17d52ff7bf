//! Overlap tests against a brute-force point-membership oracle.

use std::f64::consts::PI;
use std::time::Instant;

use kpmp_core::world::{overlap, Pose2, Shape};

#[path = "support/collision.rs"]
mod collision;

#[test]
fn overlap_agrees_with_membership_oracle() {
    let started = Instant::now();
    let summary = collision::run_oracle(1000, 2024);
    assert_eq!(summary.pairs, 1000);
    assert!(summary.failures.is_empty(), "{:?}", summary.failures);
    assert!(
        summary.positives > 200 && summary.positives < 800,
        "degenerate sample: {} overlaps",
        summary.positives
    );
    assert!(summary.boundary <= 10, "{} boundary disagreements", summary.boundary);
    assert!(started.elapsed().as_secs_f64() < 30.0);
}

#[test]
fn touching_and_separated_examples() {
    let unit = Shape::Box {
        half_width: 0.5,
        half_depth: 0.5,
    };
    let disk = Shape::Disk { radius: 0.5 };
    assert!(overlap(&unit, &Pose2::new(0.0, 0.0, 0.0), &unit, &Pose2::new(0.9, 0.0, 0.0)));
    assert!(!overlap(&unit, &Pose2::new(0.0, 0.0, 0.0), &unit, &Pose2::new(1.1, 0.0, 0.0)));
    // rotated square's corner reaches 0.5·√2 ≈ 0.707
    assert!(overlap(&unit, &Pose2::new(0.0, 0.0, PI / 4.0), &unit, &Pose2::new(1.2, 0.0, 0.0)));
    assert!(!overlap(&unit, &Pose2::new(0.0, 0.0, PI / 4.0), &unit, &Pose2::new(1.25, 0.0, 0.0)));
    // disk near a box corner: centre distance to the corner decides
    let c = 0.5 + 0.5 / 2f64.sqrt();
    assert!(overlap(&disk, &Pose2::new(c - 0.01, c - 0.01, 0.0), &unit, &Pose2::identity()));
    assert!(!overlap(&disk, &Pose2::new(c + 0.01, c + 0.01, 0.0), &unit, &Pose2::identity()));
}

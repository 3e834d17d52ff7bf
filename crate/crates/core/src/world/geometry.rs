//! Exact planar overlap tests and contact manifolds.
//!
//! Rectangles go through separating-axis tests; disks are handled as
//! radius-inflated points against either another disk or a polygon.

use arrayvec::ArrayVec;

use super::{cross, ManipulationRegion, ObjectState, Pose2, Shape, Vec2};

/// A shape placed in the world frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Placed {
    Disk { center: Vec2, radius: f64 },
    /// Convex quad, counter-clockwise.
    Poly([Vec2; 4]),
}

impl Placed {
    pub fn new(shape: &Shape, pose: &Pose2) -> Placed {
        match *shape {
            Shape::Disk { radius } => Placed::Disk {
                center: pose.position,
                radius,
            },
            Shape::Box {
                half_width: hx,
                half_depth: hy,
            } => Placed::Poly([
                pose.transform_point(Vec2::new(-hx, -hy)),
                pose.transform_point(Vec2::new(hx, -hy)),
                pose.transform_point(Vec2::new(hx, hy)),
                pose.transform_point(Vec2::new(-hx, hy)),
            ]),
            Shape::ChainLink { length, thickness } => {
                let t = 0.5 * thickness;
                Placed::Poly([
                    pose.transform_point(Vec2::new(0.0, -t)),
                    pose.transform_point(Vec2::new(length, -t)),
                    pose.transform_point(Vec2::new(length, t)),
                    pose.transform_point(Vec2::new(0.0, t)),
                ])
            }
        }
    }

    /// Axis-aligned bounds `(min, max)`.
    pub fn aabb(&self) -> (Vec2, Vec2) {
        match self {
            Placed::Disk { center, radius } => {
                let r = Vec2::new(*radius, *radius);
                (center - r, center + r)
            }
            Placed::Poly(v) => {
                let mut lo = v[0];
                let mut hi = v[0];
                for p in &v[1..] {
                    lo = lo.inf(p);
                    hi = hi.sup(p);
                }
                (lo, hi)
            }
        }
    }

    pub fn centroid(&self) -> Vec2 {
        match self {
            Placed::Disk { center, .. } => *center,
            Placed::Poly(v) => (v[0] + v[1] + v[2] + v[3]) * 0.25,
        }
    }

    /// True iff `p` lies in the closed shape grown by `inflate`.
    pub fn contains(&self, p: Vec2, inflate: f64) -> bool {
        match self {
            Placed::Disk { center, radius } => (p - center).norm() <= radius + inflate,
            Placed::Poly(v) => {
                if inflate <= 0.0 {
                    poly_contains(v, p)
                } else {
                    poly_contains(v, p) || distance_to_boundary(v, p) <= inflate
                }
            }
        }
    }
}

fn edge_normal(a: Vec2, b: Vec2) -> Vec2 {
    let e = b - a;
    Vec2::new(e.y, -e.x).normalize()
}

fn poly_contains(v: &[Vec2; 4], p: Vec2) -> bool {
    (0..4).all(|i| cross(v[(i + 1) % 4] - v[i], p - v[i]) >= 0.0)
}

fn closest_on_segment(a: Vec2, b: Vec2, p: Vec2) -> Vec2 {
    let e = b - a;
    let l2 = e.norm_squared();
    if l2 == 0.0 {
        return a;
    }
    let t = ((p - a).dot(&e) / l2).clamp(0.0, 1.0);
    a + e * t
}

fn distance_to_boundary(v: &[Vec2; 4], p: Vec2) -> f64 {
    (0..4)
        .map(|i| (closest_on_segment(v[i], v[(i + 1) % 4], p) - p).norm())
        .fold(f64::INFINITY, f64::min)
}

/// Signed distance from `p` to the polygon (negative inside).
pub fn signed_distance(v: &[Vec2; 4], p: Vec2) -> f64 {
    let d = distance_to_boundary(v, p);
    if poly_contains(v, p) {
        -d
    } else {
        d
    }
}

fn project(v: &[Vec2; 4], axis: Vec2) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for p in v {
        let d = p.dot(&axis);
        lo = lo.min(d);
        hi = hi.max(d);
    }
    (lo, hi)
}

fn polys_overlap(a: &[Vec2; 4], b: &[Vec2; 4]) -> bool {
    for poly in [a, b] {
        for i in 0..4 {
            let n = edge_normal(poly[i], poly[(i + 1) % 4]);
            let (alo, ahi) = project(a, n);
            let (blo, bhi) = project(b, n);
            if ahi < blo || bhi < alo {
                return false;
            }
        }
    }
    true
}

/// Closed-set intersection test between two placed shapes.
pub fn placed_overlap(a: &Placed, b: &Placed) -> bool {
    match (a, b) {
        (
            Placed::Disk {
                center: c1,
                radius: r1,
            },
            Placed::Disk {
                center: c2,
                radius: r2,
            },
        ) => (c1 - c2).norm() <= r1 + r2,
        (Placed::Disk { center, radius }, Placed::Poly(v))
        | (Placed::Poly(v), Placed::Disk { center, radius }) => {
            poly_contains(v, *center) || distance_to_boundary(v, *center) <= *radius
        }
        (Placed::Poly(va), Placed::Poly(vb)) => polys_overlap(va, vb),
    }
}

/// True iff the closed regions of the two placed shapes intersect.
pub fn overlap(shape_a: &Shape, pose_a: &Pose2, shape_b: &Shape, pose_b: &Pose2) -> bool {
    placed_overlap(&Placed::new(shape_a, pose_a), &Placed::new(shape_b, pose_b))
}

/// World-frame polygon of a region whose owner is in `owner_state`.
pub fn region_world_polygon(region: &ManipulationRegion, owner_state: &ObjectState) -> [Vec2; 4] {
    let pose = owner_state.pose.compose(&region.local_pose);
    match Placed::new(&region.extent, &pose) {
        Placed::Poly(v) => v,
        Placed::Disk { .. } => unreachable!("regions are boxes"),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContactPoint {
    pub point: Vec2,
    /// Negative when penetrating.
    pub separation: f64,
}

/// Contact set between two shapes; `normal` points from A to B.
#[derive(Clone, Debug, PartialEq)]
pub struct Manifold {
    pub normal: Vec2,
    pub points: ArrayVec<ContactPoint, 2>,
}

impl Manifold {
    pub fn centroid(&self) -> Vec2 {
        let n = self.points.len() as f64;
        self.points.iter().fold(Vec2::zeros(), |acc, c| acc + c.point) / n
    }

    pub fn min_separation(&self) -> f64 {
        self.points
            .iter()
            .map(|c| c.separation)
            .fold(f64::INFINITY, f64::min)
    }

    fn flipped(mut self) -> Self {
        self.normal = -self.normal;
        self
    }
}

/// Contact manifold for shapes closer than `margin`, or `None`.
pub fn manifold(a: &Placed, b: &Placed, margin: f64) -> Option<Manifold> {
    match (a, b) {
        (
            Placed::Disk {
                center: c1,
                radius: r1,
            },
            Placed::Disk {
                center: c2,
                radius: r2,
            },
        ) => {
            let d = c2 - c1;
            let dist = d.norm();
            let sep = dist - r1 - r2;
            if sep > margin {
                return None;
            }
            let normal = if dist > 1e-12 { d / dist } else { Vec2::new(1.0, 0.0) };
            let mut points = ArrayVec::new();
            points.push(ContactPoint {
                point: c1 + normal * (r1 + 0.5 * sep),
                separation: sep,
            });
            Some(Manifold { normal, points })
        }
        (Placed::Poly(v), Placed::Disk { center, radius }) => poly_disk(v, *center, *radius, margin),
        (Placed::Disk { center, radius }, Placed::Poly(v)) => {
            poly_disk(v, *center, *radius, margin).map(Manifold::flipped)
        }
        (Placed::Poly(va), Placed::Poly(vb)) => poly_poly(va, vb, margin),
    }
}

/// Polygon (A) against disk (B). The contact point sits on the polygon boundary.
fn poly_disk(v: &[Vec2; 4], c: Vec2, r: f64, margin: f64) -> Option<Manifold> {
    let mut best = 0;
    let mut best_sep = f64::NEG_INFINITY;
    for i in 0..4 {
        let n = edge_normal(v[i], v[(i + 1) % 4]);
        let s = n.dot(&(c - v[i]));
        if s > r + margin {
            return None;
        }
        if s > best_sep {
            best_sep = s;
            best = i;
        }
    }
    let v1 = v[best];
    let v2 = v[(best + 1) % 4];
    let face_n = edge_normal(v1, v2);
    let mut points = ArrayVec::new();
    if best_sep < 0.0 {
        // centre inside: push out through the least-penetrated face
        points.push(ContactPoint {
            point: c - face_n * best_sep,
            separation: best_sep - r,
        });
        return Some(Manifold {
            normal: face_n,
            points,
        });
    }
    let u1 = (c - v1).dot(&(v2 - v1));
    let u2 = (c - v2).dot(&(v1 - v2));
    let (normal, point, dist) = if u1 <= 0.0 {
        let d = (c - v1).norm();
        ((c - v1) / d.max(1e-15), v1, d)
    } else if u2 <= 0.0 {
        let d = (c - v2).norm();
        ((c - v2) / d.max(1e-15), v2, d)
    } else {
        (face_n, c - face_n * best_sep, best_sep)
    };
    let sep = dist - r;
    if sep > margin {
        return None;
    }
    points.push(ContactPoint {
        point,
        separation: sep,
    });
    Some(Manifold { normal, points })
}

/// Largest separation of `b` along the edge normals of `a`: `(value, edge)`.
fn max_separation(a: &[Vec2; 4], b: &[Vec2; 4]) -> (f64, usize) {
    let mut best = (f64::NEG_INFINITY, 0);
    for i in 0..4 {
        let n = edge_normal(a[i], a[(i + 1) % 4]);
        let s = b
            .iter()
            .map(|p| n.dot(&(p - a[i])))
            .fold(f64::INFINITY, f64::min);
        if s > best.0 {
            best = (s, i);
        }
    }
    best
}

fn clip_segment(seg: [Vec2; 2], n: Vec2, offset: f64) -> Option<[Vec2; 2]> {
    let d0 = n.dot(&seg[0]) - offset;
    let d1 = n.dot(&seg[1]) - offset;
    let mut out = ArrayVec::<Vec2, 2>::new();
    if d0 <= 0.0 {
        out.push(seg[0]);
    }
    if d1 <= 0.0 {
        out.push(seg[1]);
    }
    if d0 * d1 < 0.0 {
        let t = d0 / (d0 - d1);
        out.push(seg[0] + (seg[1] - seg[0]) * t);
    }
    (out.len() == 2).then(|| [out[0], out[1]])
}

fn poly_poly(a: &[Vec2; 4], b: &[Vec2; 4], margin: f64) -> Option<Manifold> {
    let (sep_a, edge_a) = max_separation(a, b);
    if sep_a > margin {
        return None;
    }
    let (sep_b, edge_b) = max_separation(b, a);
    if sep_b > margin {
        return None;
    }
    // prefer A as reference unless B is clearly better
    let (reference, incident, ref_edge, flip) = if sep_b > sep_a + 1e-9 {
        (b, a, edge_b, true)
    } else {
        (a, b, edge_a, false)
    };
    let v1 = reference[ref_edge];
    let v2 = reference[(ref_edge + 1) % 4];
    let ref_n = edge_normal(v1, v2);

    let mut inc = 0;
    let mut min_dot = f64::INFINITY;
    for i in 0..4 {
        let d = edge_normal(incident[i], incident[(i + 1) % 4]).dot(&ref_n);
        if d < min_dot {
            min_dot = d;
            inc = i;
        }
    }
    let seg = [incident[inc], incident[(inc + 1) % 4]];
    let tangent = (v2 - v1).normalize();
    let seg = clip_segment(seg, -tangent, -tangent.dot(&v1))?;
    let seg = clip_segment(seg, tangent, tangent.dot(&v2))?;

    let mut points = ArrayVec::new();
    for p in seg {
        let s = ref_n.dot(&(p - v1));
        if s <= margin {
            points.push(ContactPoint {
                point: p,
                separation: s,
            });
        }
    }
    if points.is_empty() {
        return None;
    }
    let normal = if flip { -ref_n } else { ref_n };
    Some(Manifold { normal, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn unit_box() -> Shape {
        Shape::Box {
            half_width: 0.5,
            half_depth: 0.5,
        }
    }

    #[test]
    fn identical_boxes_overlap() {
        let p = Pose2::new(0.3, -0.2, 0.4);
        assert!(overlap(&unit_box(), &p, &unit_box(), &p));
    }

    #[test]
    fn distant_boxes_do_not_overlap() {
        let a = Pose2::identity();
        let b = Pose2::new(10.0, 0.0, 0.0);
        assert!(!overlap(&unit_box(), &a, &unit_box(), &b));
    }

    #[test]
    fn rotated_box_case() {
        // corner of the rotated box reaches x = 1.2 - sqrt(0.5) ≈ 0.493 < 0.5
        let a = Pose2::identity();
        let b = Pose2::new(1.2, 0.0, FRAC_PI_4);
        assert!(overlap(&unit_box(), &a, &unit_box(), &b));
        let c = Pose2::new(1.21, 0.0, FRAC_PI_4);
        assert!(!overlap(&unit_box(), &a, &unit_box(), &c));
    }

    #[test]
    fn touching_boxes_count_as_overlap() {
        let a = Pose2::identity();
        let b = Pose2::new(1.0, 0.0, 0.0);
        assert!(overlap(&unit_box(), &a, &unit_box(), &b));
    }

    #[test]
    fn disk_box_corner() {
        let d = Shape::Disk { radius: 0.1 };
        let corner = Vec2::new(0.5, 0.5) + Vec2::new(1.0, 1.0).normalize() * 0.099;
        let p = Pose2::new(corner.x, corner.y, 0.0);
        assert!(overlap(&d, &p, &unit_box(), &Pose2::identity()));
        let corner = Vec2::new(0.5, 0.5) + Vec2::new(1.0, 1.0).normalize() * 0.101;
        let p = Pose2::new(corner.x, corner.y, 0.0);
        assert!(!overlap(&d, &p, &unit_box(), &Pose2::identity()));
    }

    #[test]
    fn box_manifold_face_contact() {
        let a = Placed::new(&unit_box(), &Pose2::identity());
        let b = Placed::new(&unit_box(), &Pose2::new(0.99, 0.2, 0.0));
        let m = manifold(&a, &b, 1e-3).unwrap();
        assert!((m.normal - Vec2::new(1.0, 0.0)).norm() < 1e-12);
        assert_eq!(m.points.len(), 2);
        for c in &m.points {
            assert!((c.separation + 0.01).abs() < 1e-12);
        }
        // flipped order flips the normal
        let m2 = manifold(&b, &a, 1e-3).unwrap();
        assert!((m2.normal + Vec2::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn disk_box_manifold_points_on_box_surface() {
        let bx = Placed::new(&unit_box(), &Pose2::identity());
        let d = Placed::new(&Shape::Disk { radius: 0.2 }, &Pose2::new(0.69, 0.1, 0.0));
        let m = manifold(&d, &bx, 1e-3).unwrap();
        assert!((m.normal - Vec2::new(-1.0, 0.0)).norm() < 1e-12);
        assert!((m.points[0].point - Vec2::new(0.5, 0.1)).norm() < 1e-12);
        assert!((m.points[0].separation + 0.01).abs() < 1e-12);
        let far = Placed::new(&Shape::Disk { radius: 0.2 }, &Pose2::new(0.75, 0.1, 0.0));
        assert!(manifold(&far, &bx, 1e-3).is_none());
    }
}

//! Sequential-impulse contact resolution over generalised velocities.
//!
//! Every body exposes the velocity of a material point as a linear map of a
//! few generalised velocity entries (`v(p) = Σ col_k · q̇_k`) with a diagonal
//! generalised mass. Free boxes use (vx, vy, ω); the disk robot (vx, vy);
//! constrained objects and the car a single longitudinal speed; the arm its
//! joint rates. One solver then handles every body pair uniformly.

use arrayvec::ArrayVec;

use crate::world::Vec2;

use super::SimConfig;

/// Point Jacobian: `(dof, column)` pairs.
pub type PointJacobian = ArrayVec<(usize, Vec2), 12>;

#[derive(Clone, Debug)]
struct Row {
    terms: ArrayVec<(usize, f64), 24>,
    /// `J M⁻¹ Jᵀ`
    k: f64,
}

impl Row {
    fn new(a: &PointJacobian, b: &PointJacobian, dir: Vec2, inv_mass: &[f64]) -> Row {
        let mut terms = ArrayVec::new();
        for (dof, col) in b {
            terms.push((*dof, col.dot(&dir)));
        }
        for (dof, col) in a {
            terms.push((*dof, -col.dot(&dir)));
        }
        let k = terms.iter().map(|(d, c)| c * c * inv_mass[*d]).sum();
        Row { terms, k }
    }

    fn velocity(&self, v: &[f64]) -> f64 {
        self.terms.iter().map(|(d, c)| c * v[*d]).sum()
    }

    fn apply(&self, v: &mut [f64], inv_mass: &[f64], impulse: f64) {
        for (d, c) in &self.terms {
            v[*d] += inv_mass[*d] * c * impulse;
        }
    }
}

/// One contact point between body A and body B (normal from A to B).
#[derive(Clone, Debug)]
pub struct ContactConstraint {
    pub normal: Vec2,
    pub separation: f64,
    pub friction: f64,
    normal_row: Row,
    tangent_row: Row,
    target: f64,
    pub normal_impulse: f64,
    pub tangent_impulse: f64,
}

impl ContactConstraint {
    pub fn new(
        a: &PointJacobian,
        b: &PointJacobian,
        normal: Vec2,
        separation: f64,
        friction: f64,
        inv_mass: &[f64],
        cfg: &SimConfig,
    ) -> Self {
        let tangent = Vec2::new(-normal.y, normal.x);
        // speculative contacts let the gap close in one substep; penetrating
        // ones get Baumgarte push-out beyond the slop
        let target = if separation > 0.0 {
            -separation / cfg.dt
        } else {
            cfg.baumgarte / cfg.dt * (-separation - cfg.linear_slop).max(0.0)
        };
        Self {
            normal,
            separation,
            friction,
            normal_row: Row::new(a, b, normal, inv_mass),
            tangent_row: Row::new(a, b, tangent, inv_mass),
            target,
            normal_impulse: 0.0,
            tangent_impulse: 0.0,
        }
    }

    /// Relative normal velocity of B with respect to A.
    pub fn normal_velocity(&self, v: &[f64]) -> f64 {
        self.normal_row.velocity(v)
    }

    fn solve(&mut self, v: &mut [f64], inv_mass: &[f64]) {
        if self.normal_row.k > 0.0 {
            let vn = self.normal_row.velocity(v);
            let lambda = (self.target - vn) / self.normal_row.k;
            let acc = (self.normal_impulse + lambda).max(0.0);
            let delta = acc - self.normal_impulse;
            self.normal_impulse = acc;
            self.normal_row.apply(v, inv_mass, delta);
        }
        if self.tangent_row.k > 0.0 {
            let vt = self.tangent_row.velocity(v);
            let lambda = -vt / self.tangent_row.k;
            let bound = self.friction * self.normal_impulse;
            let acc = (self.tangent_impulse + lambda).clamp(-bound, bound);
            let delta = acc - self.tangent_impulse;
            self.tangent_impulse = acc;
            self.tangent_row.apply(v, inv_mass, delta);
        }
    }
}

/// Floor friction of a body in contact, expressed directly as a bounded
/// velocity change (the body's own generalised mass is diagonal).
#[derive(Clone, Debug)]
pub enum GroundFriction {
    /// Planar translation on dofs `(x, y)`.
    Planar { dofs: (usize, usize), limit: f64, acc: Vec2 },
    /// One translational or rotational dof.
    Axis { dof: usize, limit: f64, acc: f64 },
}

impl GroundFriction {
    fn solve(&mut self, v: &mut [f64]) {
        match self {
            GroundFriction::Planar { dofs, limit, acc } => {
                let cur = Vec2::new(v[dofs.0], v[dofs.1]);
                let mut next = *acc - cur;
                let n = next.norm();
                if n > *limit {
                    next *= *limit / n;
                }
                let delta = next - *acc;
                *acc = next;
                v[dofs.0] += delta.x;
                v[dofs.1] += delta.y;
            }
            GroundFriction::Axis { dof, limit, acc } => {
                let next = (*acc - v[*dof]).clamp(-*limit, *limit);
                v[*dof] += next - *acc;
                *acc = next;
            }
        }
    }
}

/// Impulses found for one contact.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContactImpulse {
    pub normal: f64,
    pub tangent: f64,
}

/// Runs `cfg.contact_solver_iterations` sweeps of sequential impulses over
/// the contacts and the floor friction of bodies touching something.
/// Restitution is zero; tangential impulses stay within `μ_contact · P_n`.
pub fn resolve_contacts(
    velocities: &mut [f64],
    inv_mass: &[f64],
    contacts: &mut [ContactConstraint],
    ground: &mut [GroundFriction],
    cfg: &SimConfig,
) -> Vec<ContactImpulse> {
    if !contacts.is_empty() {
        for _ in 0..cfg.contact_solver_iterations {
            for c in contacts.iter_mut() {
                c.solve(velocities, inv_mass);
            }
            for g in ground.iter_mut() {
                g.solve(velocities);
            }
        }
    }
    contacts
        .iter()
        .map(|c| ContactImpulse {
            normal: c.normal_impulse,
            tangent: c.tangent_impulse,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn planar(dof: usize) -> PointJacobian {
        let mut j = PointJacobian::new();
        j.push((dof, Vec2::new(1.0, 0.0)));
        j.push((dof + 1, Vec2::new(0.0, 1.0)));
        j
    }

    #[test]
    fn inelastic_head_on_contact() {
        let cfg = SimConfig::default();
        // body A (robot) moving +x at 1 m/s into B at rest; both 1 kg
        let mut v = vec![1.0, 0.0, 0.0, 0.0];
        let inv = vec![1.0; 4];
        let mut c = vec![ContactConstraint::new(&planar(0), &planar(2), Vec2::new(1.0, 0.0), 0.0, 0.5, &inv, &cfg)];
        let imp = resolve_contacts(&mut v, &inv, &mut c, &mut [], &cfg);
        assert!(c[0].normal_velocity(&v).abs() < 1e-12);
        assert!((v[0] - 0.5).abs() < 1e-12 && (v[2] - 0.5).abs() < 1e-12);
        assert!((imp[0].normal - 0.5).abs() < 1e-12);
    }

    #[test]
    fn resting_touch_has_zero_impulse() {
        let cfg = SimConfig::default();
        let mut v = vec![0.0; 4];
        let inv = vec![1.0; 4];
        let mut c = vec![ContactConstraint::new(&planar(0), &planar(2), Vec2::new(1.0, 0.0), 0.0, 0.5, &inv, &cfg)];
        let imp = resolve_contacts(&mut v, &inv, &mut c, &mut [], &cfg);
        assert_eq!(imp[0], ContactImpulse { normal: 0.0, tangent: 0.0 });
    }

    #[test]
    fn tangential_impulse_respects_coulomb_cone() {
        let cfg = SimConfig::default();
        // A slides along the contact tangent while pressing into B
        let mut v = vec![0.2, 5.0, 0.0, 0.0];
        let inv = vec![1.0; 4];
        let mut c = vec![ContactConstraint::new(&planar(0), &planar(2), Vec2::new(1.0, 0.0), 0.0, 0.5, &inv, &cfg)];
        let imp = resolve_contacts(&mut v, &inv, &mut c, &mut [], &cfg);
        assert!(imp[0].tangent.abs() <= 0.5 * imp[0].normal + 1e-12);
        assert!(imp[0].normal > 0.0);
    }

    #[test]
    fn static_anchor_stops_approach() {
        let cfg = SimConfig::default();
        let mut v = vec![-2.0, 0.0];
        let inv = vec![0.5, 0.5];
        let mut c = vec![ContactConstraint::new(
            &PointJacobian::new(),
            &planar(0),
            Vec2::new(1.0, 0.0),
            0.0,
            0.0,
            &inv,
            &cfg,
        )];
        resolve_contacts(&mut v, &inv, &mut c, &mut [], &cfg);
        assert!(v[0].abs() < 1e-12);
    }
}

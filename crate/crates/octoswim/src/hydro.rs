//! Quasi-steady hydrodynamic loads.
//!
//! Arm segments are treated as short cylinder elements in a blade-element
//! sense: each element sees only its own velocity relative to the water,
//! decomposed into a component normal to the segment axis and one along it,
//! and each component produces an independent quadratic drag force
//!
//! ```text
//! F = -1/2 rho Cd_n (D l) |v_n| v_n  -  1/2 rho Ct (pi D l) |v_t| v_t
//! ```
//!
//! with the frontal area `D*l` for the normal term and the wetted area
//! `pi*D*l` for the tangential (skin-friction) term. The hull is a bluff
//! body with a single quadratic drag term over its frontal disc. Added-mass
//! effects are off by default; a per-segment added-mass coefficient can be
//! switched on through [`FluidEnvironment::added_mass_coeff`] and is applied
//! by the arm dynamics, not here.
//!
//! Interface units: velocities mm/s, lengths mm, forces N, torques N*mm.

use nalgebra::{Vector2, Vector3};

const M_PER_MM: f64 = 1e-3;

/// Water properties and drag coefficients for the robot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluidEnvironment {
    /// Water density, kg/m^3.
    pub density_kg_m3: f64,
    /// Normal (crossflow) drag coefficient of an arm element.
    pub cd_normal: f64,
    /// Tangential (skin-friction) coefficient of an arm element.
    pub ct_tangential: f64,
    /// Bluff-body drag coefficient of the hull.
    pub cd_body: f64,
    /// Hull frontal diameter, mm.
    pub body_frontal_diameter_mm: f64,
    /// Added-mass coefficient for arm elements (fraction of displaced water
    /// mass added to each segment's inertia). 0 disables the effect.
    pub added_mass_coeff: f64,
}

impl Default for FluidEnvironment {
    fn default() -> Self {
        Self {
            density_kg_m3: 1000.0,
            cd_normal: 1.2,
            ct_tangential: 0.01,
            cd_body: 1.0,
            body_frontal_diameter_mm: 190.0,
            added_mass_coeff: 0.0,
        }
    }
}

/// Drag force (N) on one arm element of diameter `diameter_mm` and length
/// `length_mm`, moving through still water at `velocity_mm_s` (the element
/// midpoint velocity) with its axis along the unit vector `axis`.
pub fn segment_drag(
    env: &FluidEnvironment,
    velocity_mm_s: Vector2<f64>,
    axis: Vector2<f64>,
    diameter_mm: f64,
    length_mm: f64,
) -> Vector2<f64> {
    let v = velocity_mm_s * M_PER_MM;
    let v_t = axis * v.dot(&axis);
    let v_n = v - v_t;
    let d = diameter_mm * M_PER_MM;
    let l = length_mm * M_PER_MM;
    let q = 0.5 * env.density_kg_m3 * d * l;
    -q * env.cd_normal * v_n.norm() * v_n
        - q * env.ct_tangential * std::f64::consts::PI * v_t.norm() * v_t
}

/// Quadratic drag force (N) on the hull moving at `velocity_mm_s`.
pub fn body_drag(env: &FluidEnvironment, velocity_mm_s: Vector3<f64>) -> Vector3<f64> {
    let v = velocity_mm_s * M_PER_MM;
    let radius = 0.5 * env.body_frontal_diameter_mm * M_PER_MM;
    let area = std::f64::consts::PI * radius * radius;
    -0.5 * env.density_kg_m3 * env.cd_body * area * v.norm() * v
}

/// Reaction force and yaw torque on the body from the forces its arms exert
/// on the water.
///
/// `segments` holds, for every arm element, its midpoint position in the
/// body frame (mm) and the force the element applies to the water (N). The
/// body is pushed by the reaction: `force = -sum F`, and yawed by
/// `torque = -sum r x F` (N*mm, positive counterclockwise). No scaling
/// factors — thrust accounting is exact.
pub fn net_thrust(segments: &[(Vector2<f64>, Vector2<f64>)]) -> (Vector2<f64>, f64) {
    let mut force = Vector2::zeros();
    let mut torque = 0.0;
    for (r, f) in segments {
        force -= f;
        torque -= r.x * f.y - r.y * f.x;
    }
    (force, torque)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    fn env() -> FluidEnvironment {
        FluidEnvironment::default()
    }

    #[test]
    fn pure_normal_flow_matches_hand_computation() {
        // 1/2 * 1000 * 1.2 * 0.03 * 0.03 * 0.1^2 = 5.4e-3 N
        let f = segment_drag(
            &env(),
            Vector2::new(100.0, 0.0),
            Vector2::new(0.0, 1.0),
            30.0,
            30.0,
        );
        assert_relative_eq!(f.x, -5.4e-3, max_relative = 1e-12);
        assert_abs_diff_eq!(f.y, 0.0);
    }

    #[test]
    fn tangential_flow_uses_wetted_area_and_small_coefficient() {
        let f = segment_drag(
            &env(),
            Vector2::new(0.0, 200.0),
            Vector2::new(0.0, 1.0),
            20.0,
            30.0,
        );
        let expected = -0.5 * 1000.0 * 0.01 * std::f64::consts::PI * 0.02 * 0.03 * 0.2 * 0.2;
        assert_relative_eq!(f.y, expected, max_relative = 1e-12);
        assert_abs_diff_eq!(f.x, 0.0);
    }

    #[test]
    fn body_drag_matches_hand_computation() {
        let f = body_drag(&env(), Vector3::new(0.0, 0.0, 110.0));
        let area = std::f64::consts::PI * 0.095 * 0.095;
        let expected = -0.5 * 1000.0 * 1.0 * area * 0.11 * 0.11;
        assert_relative_eq!(f.z, expected, max_relative = 1e-12);
        assert_abs_diff_eq!(expected, -0.1715, epsilon = 1e-4);
        assert_abs_diff_eq!(f.x, 0.0);
        assert_abs_diff_eq!(f.y, 0.0);
    }

    #[test]
    fn zero_velocity_and_zero_coefficients_give_zero_force() {
        let f = segment_drag(&env(), Vector2::zeros(), Vector2::new(1.0, 0.0), 30.0, 30.0);
        assert_eq!(f, Vector2::zeros());
        let dead = FluidEnvironment {
            cd_normal: 0.0,
            ct_tangential: 0.0,
            cd_body: 0.0,
            ..env()
        };
        let f = segment_drag(&dead, Vector2::new(500.0, 300.0), Vector2::new(1.0, 0.0), 30.0, 30.0);
        assert_eq!(f, Vector2::zeros());
        assert_eq!(body_drag(&dead, Vector3::new(100.0, 50.0, 10.0)), Vector3::zeros());
    }

    #[test]
    fn thrust_is_exact_reaction() {
        // One arm pushing water straight down yields an equal upward thrust.
        let down = Vector2::new(0.0, -0.02);
        let segs = [
            (Vector2::new(10.0, -50.0), down),
            (Vector2::new(20.0, -80.0), down),
        ];
        let (force, _torque) = net_thrust(&segs);
        assert_relative_eq!(force.y, 0.04, max_relative = 1e-15);
        assert_abs_diff_eq!(force.x, 0.0);
    }

    #[test]
    fn mirror_symmetric_forces_cancel_laterally() {
        let segs = [
            (Vector2::new(-95.0, -60.0), Vector2::new(-0.01, -0.03)),
            (Vector2::new(95.0, -60.0), Vector2::new(0.01, -0.03)),
        ];
        let (force, torque) = net_thrust(&segs);
        assert_eq!(force.x, 0.0);
        assert_eq!(torque, 0.0);
        assert_relative_eq!(force.y, 0.06, max_relative = 1e-15);
    }

    fn rot2(angle: f64, v: Vector2<f64>) -> Vector2<f64> {
        let (s, c) = angle.sin_cos();
        Vector2::new(c * v.x - s * v.y, s * v.x + c * v.y)
    }

    proptest! {
        #[test]
        fn drag_opposes_each_velocity_component(
            vx in -500.0f64..500.0,
            vy in -500.0f64..500.0,
            axis_angle in 0.0f64..std::f64::consts::TAU,
            d in 5.0f64..40.0,
            l in 5.0f64..40.0,
        ) {
            let v = Vector2::new(vx, vy);
            let axis = Vector2::new(axis_angle.cos(), axis_angle.sin());
            let f = segment_drag(&env(), v, axis, d, l);
            prop_assert!(f.dot(&v) <= 0.0);
            // Normal and tangential parts individually oppose their components.
            let f_t = axis * f.dot(&axis);
            let v_t = axis * v.dot(&axis);
            prop_assert!(f_t.dot(&v_t) <= 0.0);
            prop_assert!((f - f_t).dot(&(v - v_t)) <= 0.0);
        }

        #[test]
        fn segment_drag_is_frame_independent(
            vx in -300.0f64..300.0,
            vy in -300.0f64..300.0,
            axis_angle in 0.0f64..std::f64::consts::TAU,
            rot in 0.0f64..std::f64::consts::TAU,
        ) {
            let v = Vector2::new(vx, vy);
            let axis = Vector2::new(axis_angle.cos(), axis_angle.sin());
            let f = segment_drag(&env(), v, axis, 25.0, 30.0);
            let f_rot = segment_drag(&env(), rot2(rot, v), rot2(rot, axis), 25.0, 30.0);
            prop_assert!((f_rot - rot2(rot, f)).norm() <= 1e-9 * f.norm().max(1e-12));
        }

        #[test]
        fn net_thrust_rotates_with_its_inputs(
            rx in -100.0f64..100.0,
            ry in -100.0f64..100.0,
            fx in -1.0f64..1.0,
            fy in -1.0f64..1.0,
            rot in 0.0f64..std::f64::consts::TAU,
        ) {
            let segs = [(Vector2::new(rx, ry), Vector2::new(fx, fy))];
            let rotated = [(rot2(rot, segs[0].0), rot2(rot, segs[0].1))];
            let (f, tau) = net_thrust(&segs);
            let (f_rot, tau_rot) = net_thrust(&rotated);
            prop_assert!((f_rot - rot2(rot, f)).norm() <= 1e-9 * f.norm().max(1e-12));
            prop_assert!((tau_rot - tau).abs() <= 1e-9 * tau.abs().max(1.0));
        }
    }
}

//! Pseudo-rigid-body model of a soft tapered arm with one-sided incisions.
//!
//! The arm is a linearly tapered silicone cone, cast with a row of incisions
//! along its outer face. It is discretized into `n` rigid segments joined by
//! torsional springs. Joint `i` sits at arc station `s_i = i*l` and carries
//! the local beam stiffness
//!
//! ```text
//! k_closing(s) = E I(s) / l,     I(s) = pi D(s)^4 / 64
//! ```
//!
//! When the arm bends so the incisions gape open, only the uncut core resists:
//! cutting to a depth fraction `d` leaves a ligament of relative thickness
//! `(1 - d)`, so the soft direction scales like a beam of that depth,
//!
//! ```text
//! k_opening = k_closing (1 - d)^3 .
//! ```
//!
//! Joint angles are relative. A *positive* angle bends toward the body axis,
//! the direction that opens the incisions (soft); a negative angle presses
//! them shut and engages the full cross-section (stiff). Each joint also has
//! a viscous damper `c = 2 zeta sqrt(k_closing I_seg)` sized against the
//! adjacent segment's lumped inertia.
//!
//! Dynamics: segment masses are lumped at segment midpoints, giving an
//! `n`-link chain with kinetic energy `T = 1/2 sum m_k |p_k'|^2`. In absolute
//! segment angles `theta` the equations of motion are the classic chain form
//!
//! ```text
//! sum_j A_ij cos(theta_i - theta_j) theta_j''
//!     + sum_j A_ij sin(theta_i - theta_j) theta_j'^2 = Q_i
//! ```
//!
//! where `A_ij` collects mass-times-lever products and `Q_i` gathers joint
//! spring/damper torques plus blade-element drag from [`crate::hydro`]
//! evaluated at segment midpoints with the full midpoint velocity (root
//! drive + deformation + ambient flow). The root angle and rate are imposed
//! kinematically each step — the drive linkage is rigid compared to the arm.
//! Integration is semi-implicit Euler:
//!
//! ```text
//! w  = w + dt * theta''        (update rates first)
//! q  = q + dt * q'             (then positions, from the new rates)
//! ```
//!
//! Interface units: millimetres, N*mm, seconds, kg; angles in radians.

use nalgebra::{DMatrix, DVector, Vector2};
use thiserror::Error;

use crate::hydro::{segment_drag, FluidEnvironment};

const M_PER_MM: f64 = 1e-3;
const MM_PER_M: f64 = 1e3;
/// N*m per N*mm.
const NM_PER_NMM: f64 = 1e-3;

/// Hard cap on the integration step. The step a given arm actually
/// tolerates is set by its stiffest internal mode and shrinks as the
/// discretization is refined — the default ten-segment arm wants
/// `dt <= 1e-4` s; a violation surfaces as [`ArmError::Unstable`], never
/// as silent garbage.
pub const MAX_DT_S: f64 = 1e-3;

#[derive(Debug, Error, PartialEq)]
pub enum ArmError {
    #[error("{what} must be {requirement} (got {value})")]
    NonPhysical {
        what: &'static str,
        requirement: &'static str,
        value: f64,
    },
    #[error("arm needs at least 2 segments (got {0})")]
    TooFewSegments(usize),
    #[error("state has {state} joints but the model has {model}")]
    StateSizeMismatch { state: usize, model: usize },
    #[error("step size must be in (0, {MAX_DT_S}] s (got {0})")]
    InvalidDt(f64),
    /// A joint angle left (-pi, pi) or became non-finite.
    #[error("arm simulation became unstable at t = {time_s} s")]
    Unstable { time_s: f64 },
    #[error("static deflection solve did not converge (load too large for the small-deflection solver)")]
    StaticsNotConverged,
}

/// Shape of the cast arm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmGeometry {
    /// Arm length root to tip, mm.
    pub length_mm: f64,
    /// Diameter at the root, mm.
    pub base_diameter_mm: f64,
    /// Diameter at the tip, mm (smaller than the base: the arm tapers).
    pub tip_diameter_mm: f64,
    /// Incision depth as a fraction of the local diameter, in [0, 1).
    /// 0 means an uncut, symmetric arm.
    pub incision_depth: f64,
    /// Number of rigid segments in the discretization (>= 2).
    pub n_segments: usize,
}

impl Default for ArmGeometry {
    /// The arm the robot was built with: 300 mm long, tapering 30 -> 10 mm,
    /// cut to the deepest studied incision depth.
    fn default() -> Self {
        Self {
            length_mm: 300.0,
            base_diameter_mm: 30.0,
            tip_diameter_mm: 10.0,
            incision_depth: 0.7,
            n_segments: 10,
        }
    }
}

impl ArmGeometry {
    /// Local diameter at arc station `s_mm` from the root (linear taper).
    pub fn diameter_at(&self, s_mm: f64) -> f64 {
        self.base_diameter_mm
            + (self.tip_diameter_mm - self.base_diameter_mm) * s_mm / self.length_mm
    }
}

/// Cast material and joint damping level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmMaterial {
    /// Young's modulus, Pa.
    pub youngs_modulus_pa: f64,
    /// Density, kg/m^3. Zero is accepted as the massless diagnostic limit:
    /// such an arm carries no inertia or spring-mass damping and relaxes
    /// instantly to its undeformed shape when stepped.
    pub density_kg_m3: f64,
    /// Dimensionless joint damping ratio `zeta`.
    pub damping_ratio: f64,
}

impl Default for ArmMaterial {
    fn default() -> Self {
        Self {
            youngs_modulus_pa: 1.0e6,
            density_kg_m3: 1080.0,
            damping_ratio: 0.3,
        }
    }
}

/// Torsional joint parameters, at arc station `station_mm`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointParams {
    pub station_mm: f64,
    /// Stiffness when the incisions are pressed shut (angle < 0), N*mm/rad.
    pub stiffness_closing_nmm: f64,
    /// Stiffness when the incisions gape open (angle > 0), N*mm/rad.
    pub stiffness_opening_nmm: f64,
    /// Viscous damping, N*mm*s/rad.
    pub damping_nmm_s: f64,
}

/// Rigid segment parameters. Mass is the cast frustum between stations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentParams {
    pub length_mm: f64,
    pub mass_kg: f64,
    /// Diameter at the segment midpoint (used for drag), mm.
    pub mid_diameter_mm: f64,
}

/// Discretized arm ready to simulate.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmModel {
    pub geometry: ArmGeometry,
    pub material: ArmMaterial,
    pub joints: Vec<JointParams>,
    pub segments: Vec<SegmentParams>,
}

/// Builds the pseudo-rigid-body model for a cast arm.
pub fn build_arm(geometry: &ArmGeometry, material: &ArmMaterial) -> Result<ArmModel, ArmError> {
    let bad = |what, requirement, value| ArmError::NonPhysical {
        what,
        requirement,
        value,
    };
    if !(geometry.length_mm > 0.0) {
        return Err(bad("length_mm", "positive", geometry.length_mm));
    }
    if !(geometry.tip_diameter_mm > 0.0) {
        return Err(bad("tip_diameter_mm", "positive", geometry.tip_diameter_mm));
    }
    if !(geometry.base_diameter_mm > geometry.tip_diameter_mm) {
        return Err(bad(
            "base_diameter_mm",
            "larger than the tip diameter",
            geometry.base_diameter_mm,
        ));
    }
    if !(0.0..1.0).contains(&geometry.incision_depth) {
        return Err(bad("incision_depth", "in [0, 1)", geometry.incision_depth));
    }
    if geometry.n_segments < 2 {
        return Err(ArmError::TooFewSegments(geometry.n_segments));
    }
    if !(material.youngs_modulus_pa > 0.0) {
        return Err(bad("youngs_modulus_pa", "positive", material.youngs_modulus_pa));
    }
    if !(material.density_kg_m3 >= 0.0) {
        return Err(bad("density_kg_m3", "non-negative", material.density_kg_m3));
    }
    if !(material.damping_ratio > 0.0) {
        return Err(bad("damping_ratio", "positive", material.damping_ratio));
    }

    let n = geometry.n_segments;
    let l = geometry.length_mm / n as f64;
    // Pa -> N/mm^2 so that E * I[mm^4] / l[mm] lands in N*mm/rad.
    let e_n_mm2 = material.youngs_modulus_pa * 1e-6;
    let soft_scale = (1.0 - geometry.incision_depth).powi(3);

    let mut joints = Vec::with_capacity(n);
    let mut segments = Vec::with_capacity(n);
    for i in 0..n {
        let s0 = i as f64 * l;
        let s1 = s0 + l;
        let d0 = geometry.diameter_at(s0);
        let d1 = geometry.diameter_at(s1);

        let second_moment = std::f64::consts::PI * d0.powi(4) / 64.0; // mm^4
        let k_closing = e_n_mm2 * second_moment / l;

        let frustum_mm3 = std::f64::consts::PI * l / 12.0 * (d0 * d0 + d0 * d1 + d1 * d1);
        let mass_kg = material.density_kg_m3 * frustum_mm3 * 1e-9;

        // Critical-damping scale of this joint against the adjacent segment's
        // lumped midpoint inertia, evaluated in SI then stored in N*mm*s.
        let inertia_kg_m2 = mass_kg * (0.5 * l * M_PER_MM).powi(2);
        let c_nm_s =
            2.0 * material.damping_ratio * (k_closing * NM_PER_NMM * inertia_kg_m2).sqrt();

        joints.push(JointParams {
            station_mm: s0,
            stiffness_closing_nmm: k_closing,
            stiffness_opening_nmm: k_closing * soft_scale,
            damping_nmm_s: c_nm_s * MM_PER_M,
        });
        segments.push(SegmentParams {
            length_mm: l,
            mass_kg,
            mid_diameter_mm: geometry.diameter_at(s0 + 0.5 * l),
        });
    }

    Ok(ArmModel {
        geometry: *geometry,
        material: *material,
        joints,
        segments,
    })
}

impl ArmModel {
    pub fn n_segments(&self) -> usize {
        self.segments.len()
    }

    pub fn segment_length_mm(&self) -> f64 {
        self.segments[0].length_mm
    }

    /// Spring + damper torque (N*mm) a joint exerts on its distal segment at
    /// the given relative angle (rad) and rate (rad/s). Positive angles use
    /// the opening (soft) stiffness.
    pub fn joint_torque(&self, joint: usize, angle_rad: f64, rate_rad_s: f64) -> f64 {
        let j = &self.joints[joint];
        let k = if angle_rad >= 0.0 {
            j.stiffness_opening_nmm
        } else {
            j.stiffness_closing_nmm
        };
        -k * angle_rad - j.damping_nmm_s * rate_rad_s
    }
}

/// Instantaneous arm configuration. Joint angles/rates are relative to the
/// parent segment (joint 0 is relative to the driven mount); positive angles
/// bend toward the body axis — the soft, incision-opening direction.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmState {
    /// Mount angle imposed during the last step, rad from straight down
    /// (positive opens the arm outward).
    pub root_angle_rad: f64,
    pub joint_angles: Vec<f64>,
    pub joint_rates: Vec<f64>,
    pub time_s: f64,
}

impl ArmState {
    /// Undeformed arm at a given mount angle.
    pub fn at_rest(model: &ArmModel, root_angle_rad: f64) -> Self {
        let n = model.n_segments();
        Self {
            root_angle_rad,
            joint_angles: vec![0.0; n],
            joint_rates: vec![0.0; n],
            time_s: 0.0,
        }
    }
}

/// Root drive imposed on the arm mount for one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootDrive {
    pub angle_rad: f64,
    pub rate_rad_s: f64,
}

/// Hydrodynamic loads an arm produced during a step, for thrust accounting.
#[derive(Debug, Clone)]
pub struct ArmLoads {
    /// Per segment: (midpoint position mm, force exerted *on the water* N),
    /// in the arm's local frame (x outward from the body axis, y up, mount
    /// at the origin).
    pub water_forces: Vec<(Vector2<f64>, Vector2<f64>)>,
    /// Torque the arm applies to its mount about the root hinge, N*mm
    /// (what the drive linkage must react).
    pub root_load_nmm: f64,
}

/// Segment direction for absolute angle `theta` (0 = straight down,
/// positive opens outward toward local +x).
#[inline]
fn dir(theta: f64) -> Vector2<f64> {
    let (s, c) = theta.sin_cos();
    Vector2::new(s, -c)
}

/// d(dir)/d(theta), which is `dir` rotated 90 degrees counterclockwise.
#[inline]
fn dir_perp(theta: f64) -> Vector2<f64> {
    let (s, c) = theta.sin_cos();
    Vector2::new(c, s)
}

/// Absolute segment angles from the mount angle and relative joint angles.
fn absolute_angles(root: f64, joint_angles: &[f64]) -> Vec<f64> {
    let mut acc = root;
    joint_angles
        .iter()
        .map(|q| {
            acc -= q;
            acc
        })
        .collect()
}

/// Midline polyline (mm) of the arm in its local frame: mount at the origin,
/// straight down is (0, -1). Returns `n_segments + 1` points.
pub fn midline(model: &ArmModel, state: &ArmState) -> Vec<Vector2<f64>> {
    let thetas = absolute_angles(state.root_angle_rad, &state.joint_angles);
    let l = model.segment_length_mm();
    let mut points = Vec::with_capacity(thetas.len() + 1);
    let mut p = Vector2::zeros();
    points.push(p);
    for theta in thetas {
        p += l * dir(theta);
        points.push(p);
    }
    points
}

/// Advances the arm by one semi-implicit Euler step. See the module docs for
/// the dynamics; `ambient_flow_mm_s` is the velocity the mount carries
/// through the water (body velocity projected into the arm's plane), which
/// adds to every segment's water-relative velocity.
pub fn step_arm(
    model: &ArmModel,
    env: &FluidEnvironment,
    state: &ArmState,
    drive: RootDrive,
    ambient_flow_mm_s: Vector2<f64>,
    dt: f64,
) -> Result<ArmState, ArmError> {
    step_arm_with_loads(model, env, state, drive, ambient_flow_mm_s, dt).map(|(s, _)| s)
}

/// [`step_arm`] variant that also reports the hydrodynamic loads and root
/// reaction evaluated at the pre-step state (the loads that acted during
/// this step).
pub fn step_arm_with_loads(
    model: &ArmModel,
    env: &FluidEnvironment,
    state: &ArmState,
    drive: RootDrive,
    ambient_flow_mm_s: Vector2<f64>,
    dt: f64,
) -> Result<(ArmState, ArmLoads), ArmError> {
    let n = model.n_segments();
    if state.joint_angles.len() != n || state.joint_rates.len() != n {
        return Err(ArmError::StateSizeMismatch {
            state: state.joint_angles.len(),
            model: n,
        });
    }
    if !(dt > 0.0 && dt <= MAX_DT_S) {
        return Err(ArmError::InvalidDt(dt));
    }

    let l_m = model.segment_length_mm() * M_PER_MM;
    let half_l = 0.5 * l_m;

    // Forward kinematics at the imposed drive (SI: metres).
    let thetas = absolute_angles(drive.angle_rad, &state.joint_angles);
    let mut omegas = Vec::with_capacity(n);
    let mut acc = drive.rate_rad_s;
    for qd in &state.joint_rates {
        acc -= qd;
        omegas.push(acc);
    }

    let mut mid_pos = Vec::with_capacity(n); // m
    let mut mid_vel = Vec::with_capacity(n); // m/s, deformation + root drive
    let mut joint_p = Vector2::zeros();
    let mut joint_v = Vector2::zeros();
    for i in 0..n {
        let u = dir(thetas[i]);
        let du = dir_perp(thetas[i]);
        mid_pos.push(joint_p + half_l * u);
        mid_vel.push(joint_v + half_l * omegas[i] * du);
        joint_p += l_m * u;
        joint_v += l_m * omegas[i] * du;
    }

    // Blade-element drag per segment (N), from the hydro module.
    let ambient_m_s = ambient_flow_mm_s * M_PER_MM;
    let mut drag = Vec::with_capacity(n);
    for i in 0..n {
        let v_rel_mm_s = (mid_vel[i] + ambient_m_s) * MM_PER_M;
        drag.push(segment_drag(
            env,
            v_rel_mm_s,
            dir(thetas[i]),
            model.segments[i].mid_diameter_mm,
            model.segments[i].length_mm,
        ));
    }

    // Effective segment masses, optionally augmented with fluid added mass.
    let mut masses = Vec::with_capacity(n);
    for seg in &model.segments {
        let mut m = seg.mass_kg;
        if env.added_mass_coeff > 0.0 {
            let r = 0.5 * seg.mid_diameter_mm * M_PER_MM;
            m += env.added_mass_coeff
                * env.density_kg_m3
                * std::f64::consts::PI
                * r
                * r
                * l_m;
        }
        masses.push(m);
    }

    // Joint spring/damper torques (N*m) at the pre-step state.
    let mut torque_nm = Vec::with_capacity(n);
    for j in 0..n {
        torque_nm
            .push(model.joint_torque(j, state.joint_angles[j], state.joint_rates[j]) * NM_PER_NMM);
    }

    // Loads reported for this step: evaluated at the pre-step state.
    let loads = ArmLoads {
        water_forces: mid_pos
            .iter()
            .zip(&drag)
            .map(|(p, d)| (p * MM_PER_M, -d))
            .collect(),
        root_load_nmm: torque_nm[0] * MM_PER_M,
    };

    // Massless diagnostic limit: no inertia and (since damping scales with
    // the square root of mass) no damping, so the chain relaxes instantly
    // to its undeformed shape under the elastic torques alone.
    if masses.iter().all(|&m| m == 0.0) {
        return Ok((
            ArmState {
                root_angle_rad: drive.angle_rad,
                joint_angles: vec![0.0; n],
                joint_rates: vec![0.0; n],
                time_s: state.time_s + dt,
            },
            loads,
        ));
    }

    // Lever-mass products A_ij = sum_{k >= max(i,j)} m_k l_ki l_kj with
    // l_ki = l for i < k and l/2 for i = k.
    let mut suffix = vec![0.0; n + 1];
    for k in (0..n).rev() {
        suffix[k] = suffix[k + 1] + masses[k];
    }
    let a = |i: usize, j: usize| -> f64 {
        let hi = i.max(j);
        masses[hi] * (if i == j { 0.25 } else { 0.5 }) * l_m * l_m + suffix[hi + 1] * l_m * l_m
    };

    // Generalized forces Q (N*m): joint torques + drag through the segment
    // midpoint Jacobians (suffix force sums).
    let mut force_suffix = Vector2::zeros(); // sum of drag on segments > i
    let mut q_gen = DVector::zeros(n);
    for i in (0..n).rev() {
        let lever = half_l * drag[i] + l_m * force_suffix;
        let next = if i + 1 < n { torque_nm[i + 1] } else { 0.0 };
        q_gen[i] = dir_perp(thetas[i]).dot(&lever) + next - torque_nm[i];
        force_suffix += drag[i];
    }

    // Mass matrix and velocity-product terms.
    let mut m_mat = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m_mat[(i, j)] = a(i, j) * (thetas[i] - thetas[j]).cos();
            q_gen[i] -= a(i, j) * (thetas[i] - thetas[j]).sin() * omegas[j] * omegas[j];
        }
    }

    let accel = match m_mat.clone().cholesky() {
        Some(ch) => ch.solve(&q_gen),
        None => m_mat
            .lu()
            .solve(&q_gen)
            .ok_or(ArmError::Unstable { time_s: state.time_s })?,
    };

    // Semi-implicit update: rates first, then angles from the new rates.
    let mut new_angles = Vec::with_capacity(n);
    let mut new_rates = Vec::with_capacity(n);
    let mut prev_omega_new = drive.rate_rad_s;
    for i in 0..n {
        let omega_new = omegas[i] + dt * accel[i];
        let qd = prev_omega_new - omega_new;
        let q = state.joint_angles[i] + dt * qd;
        if !q.is_finite() || q.abs() >= std::f64::consts::PI {
            return Err(ArmError::Unstable {
                time_s: state.time_s + dt,
            });
        }
        new_rates.push(qd);
        new_angles.push(q);
        prev_omega_new = omega_new;
    }

    Ok((
        ArmState {
            root_angle_rad: drive.angle_rad,
            joint_angles: new_angles,
            joint_rates: new_rates,
            time_s: state.time_s + dt,
        },
        loads,
    ))
}

/// Total mechanical energy (J): midpoint kinetic energy plus the piecewise
/// quadratic elastic energy of the joints. The mount is treated as moving at
/// `root_rate_rad_s`.
pub fn mechanical_energy(model: &ArmModel, state: &ArmState, root_rate_rad_s: f64) -> f64 {
    let n = model.n_segments();
    let l_m = model.segment_length_mm() * M_PER_MM;
    let thetas = absolute_angles(state.root_angle_rad, &state.joint_angles);

    let mut kinetic = 0.0;
    let mut joint_v = Vector2::zeros();
    let mut omega = root_rate_rad_s;
    for i in 0..n {
        omega -= state.joint_rates[i];
        let v_mid = joint_v + 0.5 * l_m * omega * dir_perp(thetas[i]);
        kinetic += 0.5 * model.segments[i].mass_kg * v_mid.norm_squared();
        joint_v += l_m * omega * dir_perp(thetas[i]);
    }

    let mut elastic = 0.0;
    for (j, &q) in state.joint_angles.iter().enumerate() {
        let k_nmm = if q >= 0.0 {
            model.joints[j].stiffness_opening_nmm
        } else {
            model.joints[j].stiffness_closing_nmm
        };
        elastic += 0.5 * k_nmm * NM_PER_NMM * q * q;
    }
    kinetic + elastic
}

/// Static tip deflection under a constant tip load.
#[derive(Debug, Clone)]
pub struct StaticDeflection {
    pub joint_angles: Vec<f64>,
    /// Tip displacement from the undeformed tip, mm (local frame).
    pub tip_deflection_mm: Vector2<f64>,
}

/// Solves the small-deflection static equilibrium of the arm (mount clamped
/// straight down) under a constant force applied at the tip, by relaxed
/// fixed-point iteration on the joint moment balance. Loads pushing the tip
/// toward the body axis (local -x) engage the soft opening stiffness.
pub fn static_tip_deflection(
    model: &ArmModel,
    tip_force_n: Vector2<f64>,
) -> Result<StaticDeflection, ArmError> {
    let n = model.n_segments();
    let mut state = ArmState::at_rest(model, 0.0);
    let undeformed_tip = Vector2::new(0.0, -model.geometry.length_mm);

    for _ in 0..20_000 {
        let points = midline(model, &state);
        let tip = points[n];
        let mut worst = 0.0f64;
        for j in 0..n {
            let r = tip - points[j];
            // Moment conjugate to q_j (positive bends toward the body axis).
            let moment = -(r.x * tip_force_n.y - r.y * tip_force_n.x);
            let k = if moment >= 0.0 {
                model.joints[j].stiffness_opening_nmm
            } else {
                model.joints[j].stiffness_closing_nmm
            };
            let target = moment / k;
            let step = target - state.joint_angles[j];
            state.joint_angles[j] += 0.5 * step;
            worst = worst.max(step.abs());
        }
        if !worst.is_finite() || state.joint_angles[0].abs() >= std::f64::consts::PI {
            return Err(ArmError::StaticsNotConverged);
        }
        if worst < 1e-13 {
            let tip = midline(model, &state)[n];
            return Ok(StaticDeflection {
                joint_angles: state.joint_angles,
                tip_deflection_mm: tip - undeformed_tip,
            });
        }
    }
    Err(ArmError::StaticsNotConverged)
}

//! Whole-robot assembly and swim simulation.
//!
//! Two motor-driven crank-slider groups (left and right) each raise and
//! lower a slider plate along the body axis. Four support rods per plate
//! swing four arms about their mount hinges, umbrella-fashion, so every
//! arm in a group shares one root-angle trajectory. Arm hydrodynamic
//! reactions and body drag drive the body: one translational degree of
//! freedom in vertical mode, or planar translation plus yaw for steering
//! studies.
//!
//! Conventions:
//!
//! * **Vertical mode** — the body translates along world `z` (positive =
//!   swim direction, arms trailing behind). `heading_rad` stays 0.
//! * **Planar mode** — the body moves in the world `x`–`y` plane.
//!   `heading_rad` is measured counterclockwise from `+y`, the initial
//!   swim direction; the right arm group is mounted toward `+x` at
//!   heading 0. A faster left motor therefore yaws and translates the
//!   body toward `+x`, the right-arm side.
//! * **Group reduction** — each four-arm group is represented by one
//!   simulated arm counted four times. The four arms of a group share
//!   the root drive and initial state, and the radial components of
//!   their water loads cancel around the ring by symmetry, so only the
//!   axial (rail-parallel) load component reaches the body. For the same
//!   symmetry reason only the axial carry-through velocity (body motion
//!   along the swim axis plus the yaw sweep at the group's mount) is
//!   passed to the arms as ambient flow; radial inflow is neglected.
//! * The crank turns clockwise in the mechanism module's angle
//!   convention, which puts the slow arc on the opening (recovery)
//!   stroke. Simulations start at top dead center: arms fully open, a
//!   power stroke about to begin.

use crate::arm::{step_arm_with_loads, ArmError, ArmModel, ArmState, RootDrive, MAX_DT_S};
use crate::hydro::{body_drag, FluidEnvironment};
use crate::mechanism::{
    slider_position, slider_velocity, stroke_characteristics, stroke_phase, CrankState,
    MechanismGeometry, StrokePhase,
};
use nalgebra::{Vector2, Vector3};
use thiserror::Error;

/// rad/s per rpm.
const RPM_TO_RAD_S: f64 = std::f64::consts::PI / 30.0;
/// Arms driven by one slider plate.
const ARMS_PER_GROUP: f64 = 4.0;
/// Samples of the construction-time support-linkage validation scan.
const LINKAGE_SCAN_SAMPLES: usize = 512;
/// Bisection iterations for the support-rod closure; narrows an interval
/// of width pi below 1e-12 rad, inside the 1e-10 rad tolerance.
const LINKAGE_BISECTIONS: usize = 48;

#[derive(Debug, Error, PartialEq)]
pub enum VehicleError {
    #[error("configuration rejected: {what} must be {requirement}, got {value}")]
    BadConfig {
        what: &'static str,
        requirement: &'static str,
        value: f64,
    },
    #[error("support linkage cannot assemble at slider height {slider_mm} mm")]
    Unassemblable { slider_mm: f64 },
    #[error("support linkage opening angle is not monotone at slider height {slider_mm} mm")]
    NotMonotone { slider_mm: f64 },
    #[error(transparent)]
    Arm(#[from] ArmError),
}

fn bad(what: &'static str, requirement: &'static str, value: f64) -> VehicleError {
    VehicleError::BadConfig {
        what,
        requirement,
        value,
    }
}

/// Piecewise-constant motor speed profile: `(start_s, rpm)` steps.
#[derive(Debug, Clone, PartialEq)]
pub struct MotorProfile {
    steps: Vec<(f64, f64)>,
}

impl MotorProfile {
    /// Single-speed profile.
    pub fn constant(rpm: f64) -> Self {
        Self::piecewise(vec![(0.0, rpm)]).expect("a finite non-negative rpm is a valid profile")
    }

    /// Profile from `(start_s, rpm)` steps. The first step must start at
    /// t = 0, starts must strictly increase, and every rpm must be finite
    /// and non-negative.
    pub fn piecewise(steps: Vec<(f64, f64)>) -> Result<Self, VehicleError> {
        let Some(&(first_start, _)) = steps.first() else {
            return Err(bad("motor profile", "non-empty", 0.0));
        };
        if first_start != 0.0 {
            return Err(bad("first profile step", "at t = 0", first_start));
        }
        for pair in steps.windows(2) {
            if !(pair[1].0 > pair[0].0) {
                return Err(bad("profile step starts", "strictly increasing", pair[1].0));
            }
        }
        for &(_, rpm) in &steps {
            if !(rpm.is_finite() && rpm >= 0.0) {
                return Err(bad("motor rpm", "finite and non-negative", rpm));
            }
        }
        Ok(Self { steps })
    }

    /// Speed in effect at time `t` (the last step whose start is <= t).
    pub fn rpm_at(&self, t: f64) -> f64 {
        let idx = self.steps.partition_point(|&(start, _)| start <= t);
        self.steps[idx.saturating_sub(1)].1
    }

    pub fn steps(&self) -> &[(f64, f64)] {
        &self.steps
    }
}

/// How a slider height becomes an arm root angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RootAngleMap {
    /// Affine map from the slider travel `[s_min, s_max]` onto
    /// `[root_angle_closed, root_angle_open]`. The default.
    Linear,
    /// Two-bar support-rod closure. The arm hinge sits at
    /// (`pivot_radius_mm`, `hinge_height_mm`) in its swing plane (x radial
    /// from the body axis, y up the rail, slider heights on the y axis
    /// scale); the rod of length `rod_length_mm` runs from the slider
    /// plate's rim — radius `chassis_radius_mm`, height = slider s — to a
    /// point `attachment_radius_mm` along the arm from the hinge. Opening
    /// angle is the closure's lower-branch root, solved by bisection to
    /// 1e-10 rad.
    Linkage {
        rod_length_mm: f64,
        attachment_radius_mm: f64,
        pivot_radius_mm: f64,
        hinge_height_mm: f64,
    },
}

impl Default for RootAngleMap {
    fn default() -> Self {
        RootAngleMap::Linear
    }
}

impl RootAngleMap {
    /// Reference support-rod geometry. Near the top of the stroke the rod
    /// approaches alignment with the arm radius, so the opening rate per
    /// millimetre of slider travel steepens sharply — the regime where
    /// long-coupler mechanisms, whose sliders spend their power stroke
    /// high on the rail, demand the most crank torque.
    pub fn linkage_reference() -> Self {
        RootAngleMap::Linkage {
            rod_length_mm: 65.0,
            attachment_radius_mm: 100.0,
            pivot_radius_mm: 60.0,
            hinge_height_mm: 95.0,
        }
    }
}

/// Body degrees of freedom simulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimMode {
    /// 1-DOF translation along world z.
    Vertical,
    /// 3-DOF planar translation plus yaw.
    Planar,
}

/// Full robot description.
#[derive(Debug, Clone, PartialEq)]
pub struct RobotConfig {
    pub mechanism_left: MechanismGeometry,
    pub mechanism_right: MechanismGeometry,
    /// Shared by all eight arms.
    pub arm_model: ArmModel,
    pub env: FluidEnvironment,
    pub body_mass_kg: f64,
    /// Root angle when the slider is at its lowest (Linear map), rad.
    pub root_angle_closed_rad: f64,
    /// Root angle when the slider is at its highest (Linear map), rad.
    pub root_angle_open_rad: f64,
    pub root_map: RootAngleMap,
    pub motor_profile_left: MotorProfile,
    pub motor_profile_right: MotorProfile,
    pub mode: SimMode,
    /// Lateral mount offset of each arm group and radius of the slider
    /// plate rim where support rods anchor, mm.
    pub chassis_radius_mm: f64,
    /// Yaw inertia about the body centre, kg mm^2. `None` uses the
    /// solid-disc estimate body_mass * chassis_radius^2 / 2.
    pub yaw_inertia_kg_mm2: Option<f64>,
    /// Optional motor torque rating used by [`motor_torque_estimate`] to
    /// flag overload, N mm.
    pub motor_torque_limit_nmm: Option<f64>,
}

impl Default for RobotConfig {
    fn default() -> Self {
        let geom = MechanismGeometry::new(25.0, 66.0, 40.0)
            .expect("the reference crank-slider dimensions are valid");
        Self {
            mechanism_left: geom,
            mechanism_right: geom,
            arm_model: crate::arm::build_arm(
                &crate::arm::ArmGeometry::default(),
                &crate::arm::ArmMaterial::default(),
            )
            .expect("the default arm parameters are valid"),
            env: FluidEnvironment::default(),
            body_mass_kg: 1.5,
            root_angle_closed_rad: 15f64.to_radians(),
            root_angle_open_rad: 75f64.to_radians(),
            root_map: RootAngleMap::default(),
            motor_profile_left: MotorProfile::constant(33.0),
            motor_profile_right: MotorProfile::constant(33.0),
            mode: SimMode::Vertical,
            chassis_radius_mm: 95.0,
            yaw_inertia_kg_mm2: None,
            motor_torque_limit_nmm: None,
        }
    }
}

impl RobotConfig {
    /// Checks the scalar parameters without running anything. The
    /// simulation entry points call this themselves; it is public so
    /// front-ends can reject a bad configuration before producing any
    /// artifacts.
    pub fn validate(&self) -> Result<(), VehicleError> {
        if !(self.body_mass_kg > 0.0 && self.body_mass_kg.is_finite()) {
            return Err(bad("body_mass_kg", "positive", self.body_mass_kg));
        }
        if !(self.root_angle_open_rad > self.root_angle_closed_rad) {
            return Err(bad(
                "root_angle_open_rad",
                "greater than root_angle_closed_rad",
                self.root_angle_open_rad,
            ));
        }
        if !(self.root_angle_closed_rad.is_finite() && self.root_angle_open_rad.is_finite()) {
            return Err(bad("root angles", "finite", self.root_angle_closed_rad));
        }
        if !(self.chassis_radius_mm > 0.0 && self.chassis_radius_mm.is_finite()) {
            return Err(bad("chassis_radius_mm", "positive", self.chassis_radius_mm));
        }
        if let Some(inertia) = self.yaw_inertia_kg_mm2 {
            if !(inertia > 0.0 && inertia.is_finite()) {
                return Err(bad("yaw_inertia_kg_mm2", "positive", inertia));
            }
        }
        if let Some(limit) = self.motor_torque_limit_nmm {
            if !(limit >= 0.0 && limit.is_finite()) {
                return Err(bad("motor_torque_limit_nmm", "non-negative", limit));
            }
        }
        for (name, v) in [
            ("env.density_kg_m3", self.env.density_kg_m3),
            ("env.cd_normal", self.env.cd_normal),
            ("env.ct_tangential", self.env.ct_tangential),
            ("env.cd_body", self.env.cd_body),
            ("env.body_frontal_diameter_mm", self.env.body_frontal_diameter_mm),
            ("env.added_mass_coeff", self.env.added_mass_coeff),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                let what: &'static str = name;
                return Err(bad(what, "finite and non-negative", v));
            }
        }
        Ok(())
    }

    /// Yaw inertia in effect, kg mm^2.
    pub fn yaw_inertia(&self) -> f64 {
        self.yaw_inertia_kg_mm2
            .unwrap_or(0.5 * self.body_mass_kg * self.chassis_radius_mm * self.chassis_radius_mm)
    }
}

/// One sampled instant of a simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleRow {
    pub time_s: f64,
    /// Body position, mm. Vertical mode uses z; planar mode uses x-y.
    pub position_mm: Vector3<f64>,
    /// Body velocity, mm/s.
    pub velocity_mm_s: Vector3<f64>,
    /// Heading, rad ccw from +y (0 in vertical mode).
    pub heading_rad: f64,
    pub root_angle_left_rad: f64,
    pub root_angle_right_rad: f64,
    /// Crank-shaft reaction torque of each motor group, N mm: the moment
    /// the arm root loads exert on the crank through the support rods,
    /// slider, and coupler at this instant.
    pub crank_torque_left_nmm: f64,
    pub crank_torque_right_nmm: f64,
    pub phase_left: StrokePhase,
    pub phase_right: StrokePhase,
}

/// Fixed-cadence samples of a simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    /// Spacing between rows, s (a whole multiple of the integration step).
    pub sample_interval_s: f64,
    pub rows: Vec<SampleRow>,
}

/// Full dynamic state of the robot. Each arm group is carried by one
/// representative [`ArmState`] (see the module docs for why the four
/// synchronized arms of a group reduce exactly to one).
#[derive(Debug, Clone, PartialEq)]
pub struct SwimState {
    pub position_mm: Vector3<f64>,
    pub velocity_mm_s: Vector3<f64>,
    pub heading_rad: f64,
    pub yaw_rate_rad_s: f64,
    pub crank_left: CrankState,
    pub crank_right: CrankState,
    pub arm_left: ArmState,
    pub arm_right: ArmState,
    pub time_s: f64,
}

/// Resolved slider-to-root-angle mapping for one mechanism.
#[derive(Debug)]
struct RootMap {
    kind: RootMapKind,
}

#[derive(Debug)]
enum RootMapKind {
    Linear {
        s_min: f64,
        inv_span: f64,
        closed: f64,
        open: f64,
    },
    Linkage {
        hinge_x: f64,
        hinge_y: f64,
        attach_r: f64,
        rod_l: f64,
        anchor_x: f64,
    },
}

impl RootMap {
    /// Builds the map for `geom` and, for the linkage mode, proves
    /// assembly and monotonicity across the mechanism's slider range.
    fn build(config: &RobotConfig, geom: &MechanismGeometry) -> Result<Self, VehicleError> {
        let kind = match config.root_map {
            RootAngleMap::Linear => RootMapKind::Linear {
                s_min: geom.slider_min(),
                inv_span: 1.0 / (geom.slider_max() - geom.slider_min()),
                closed: config.root_angle_closed_rad,
                open: config.root_angle_open_rad,
            },
            RootAngleMap::Linkage {
                rod_length_mm,
                attachment_radius_mm,
                pivot_radius_mm,
                hinge_height_mm,
            } => {
                if !(rod_length_mm > 0.0 && rod_length_mm.is_finite()) {
                    return Err(bad("rod_length_mm", "positive", rod_length_mm));
                }
                if !(attachment_radius_mm > 0.0 && attachment_radius_mm.is_finite()) {
                    return Err(bad("attachment_radius_mm", "positive", attachment_radius_mm));
                }
                if !(pivot_radius_mm >= 0.0 && pivot_radius_mm.is_finite()) {
                    return Err(bad("pivot_radius_mm", "non-negative", pivot_radius_mm));
                }
                if !hinge_height_mm.is_finite() {
                    return Err(bad("hinge_height_mm", "finite", hinge_height_mm));
                }
                RootMapKind::Linkage {
                    hinge_x: pivot_radius_mm,
                    hinge_y: hinge_height_mm,
                    attach_r: attachment_radius_mm,
                    rod_l: rod_length_mm,
                    anchor_x: config.chassis_radius_mm,
                }
            }
        };
        let map = Self { kind };
        if matches!(map.kind, RootMapKind::Linkage { .. }) {
            // Construction-time scan: every slider height the mechanism
            // can reach must assemble with a strictly opening slope.
            let (s_min, s_max) = (geom.slider_min(), geom.slider_max());
            for i in 0..=LINKAGE_SCAN_SAMPLES {
                let s = s_min + (s_max - s_min) * (i as f64 / LINKAGE_SCAN_SAMPLES as f64);
                map.angle(s)?;
                if !(map.slope(s)? > 0.0) {
                    return Err(VehicleError::NotMonotone { slider_mm: s });
                }
            }
        }
        Ok(map)
    }

    /// Root angle for slider height `s`, rad.
    fn angle(&self, s: f64) -> Result<f64, VehicleError> {
        match self.kind {
            RootMapKind::Linear {
                s_min,
                inv_span,
                closed,
                open,
            } => {
                let t = (s - s_min) * inv_span;
                Ok(closed * (1.0 - t) + open * t)
            }
            RootMapKind::Linkage {
                hinge_x,
                hinge_y,
                attach_r,
                rod_l,
                anchor_x,
            } => {
                // Squared rod-length error of candidate opening angle `al`.
                let gap = |al: f64| {
                    let ax = hinge_x + attach_r * al.sin() - anchor_x;
                    let ay = hinge_y - attach_r * al.cos() - s;
                    ax * ax + ay * ay - rod_l * rod_l
                };
                // The hinge-to-anchor direction splits the two closure
                // roots; the arm rides the lower branch.
                let amid = (anchor_x - hinge_x).atan2(hinge_y - s);
                if gap(amid) > 0.0 {
                    return Err(VehicleError::Unassemblable { slider_mm: s });
                }
                let mut lo = amid - std::f64::consts::PI;
                let mut hi = amid;
                if gap(lo) <= 0.0 {
                    return Err(VehicleError::Unassemblable { slider_mm: s });
                }
                for _ in 0..LINKAGE_BISECTIONS {
                    let mid = 0.5 * (lo + hi);
                    if gap(mid) <= 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                Ok(0.5 * (lo + hi))
            }
        }
    }

    /// d(root angle)/d(slider height), rad/mm.
    fn slope(&self, s: f64) -> Result<f64, VehicleError> {
        match self.kind {
            RootMapKind::Linear {
                inv_span,
                closed,
                open,
                ..
            } => Ok((open - closed) * inv_span),
            RootMapKind::Linkage {
                hinge_x,
                hinge_y,
                attach_r,
                rod_l: _,
                anchor_x,
            } => {
                let al = self.angle(s)?;
                let (sin_a, cos_a) = al.sin_cos();
                let ax = hinge_x + attach_r * sin_a - anchor_x;
                let ay = hinge_y - attach_r * cos_a - s;
                // Implicit differentiation of the closure.
                let denom = attach_r * (ax * cos_a + ay * sin_a);
                Ok(ay / denom)
            }
        }
    }
}

/// Root angle produced by `config`'s map for mechanism `geom` at slider
/// height `slider_mm`.
pub fn root_angle_map(
    config: &RobotConfig,
    geom: &MechanismGeometry,
    slider_mm: f64,
) -> Result<f64, VehicleError> {
    RootMap::build(config, geom)?.angle(slider_mm)
}

/// Per-group driving context that stays fixed through a run.
struct Group<'a> {
    geom: &'a MechanismGeometry,
    map: RootMap,
    profile: &'a MotorProfile,
}

/// Per-step kinematic snapshot of one group.
struct GroupStep {
    root: RootDrive,
    phase: StrokePhase,
    /// d(root angle)/d(crank angle), rad/rad.
    angle_per_crank: f64,
}

impl Group<'_> {
    fn step_kinematics(&self, crank: &CrankState, t: f64) -> Result<GroupStep, VehicleError> {
        let _ = t;
        let rate = -crank.speed_rad_s; // clockwise drive
        let s = slider_position(self.geom, crank.angle_rad);
        let angle = self.map.angle(s)?;
        let slope = self.map.slope(s)?;
        Ok(GroupStep {
            root: RootDrive {
                angle_rad: angle,
                rate_rad_s: slope * slider_velocity(self.geom, crank.angle_rad, rate),
            },
            phase: stroke_phase(self.geom, crank.angle_rad, rate),
            angle_per_crank: slope * slider_velocity(self.geom, crank.angle_rad, 1.0),
        })
    }
}

/// Simulates the robot for `duration_s` seconds and returns samples every
/// `sample_interval_s` (rounded to a whole number of `dt_s` steps).
///
/// The body starts at rest at the origin with both cranks at top dead
/// center (arms open, power stroke beginning). Arm dynamics, hydro loads,
/// and body momentum advance by semi-implicit Euler at `dt_s`. The run is
/// deterministic: identical inputs give a bit-identical series.
pub fn simulate(
    config: &RobotConfig,
    duration_s: f64,
    dt_s: f64,
    sample_interval_s: f64,
) -> Result<TimeSeries, VehicleError> {
    config.validate()?;
    if !(dt_s > 0.0 && dt_s <= MAX_DT_S) {
        return Err(bad("dt_s", "in (0, 1e-3] s", dt_s));
    }
    if !(duration_s > 0.0 && duration_s.is_finite()) {
        return Err(bad("duration_s", "positive", duration_s));
    }
    if !(sample_interval_s > 0.0 && sample_interval_s.is_finite()) {
        return Err(bad("sample_interval_s", "positive", sample_interval_s));
    }
    let n_steps = (duration_s / dt_s).round() as u64;
    if n_steps == 0 {
        return Err(bad("duration_s", "at least one time step", duration_s));
    }
    let stride = ((sample_interval_s / dt_s).round() as u64).max(1);

    let left = Group {
        geom: &config.mechanism_left,
        map: RootMap::build(config, &config.mechanism_left)?,
        profile: &config.motor_profile_left,
    };
    let right = Group {
        geom: &config.mechanism_right,
        map: RootMap::build(config, &config.mechanism_right)?,
        profile: &config.motor_profile_right,
    };

    let mut state = initial_state(config, &left, &right)?;
    let mut rows = Vec::with_capacity((n_steps / stride + 1) as usize);

    for k in 0..n_steps {
        let t = k as f64 * dt_s;
        state.crank_left.speed_rad_s = left.profile.rpm_at(t) * RPM_TO_RAD_S;
        state.crank_right.speed_rad_s = right.profile.rpm_at(t) * RPM_TO_RAD_S;

        let kin_l = left.step_kinematics(&state.crank_left, t)?;
        let kin_r = right.step_kinematics(&state.crank_right, t)?;

        // Axial carry-through velocity at each group's mount, mm/s.
        let (axial_l, axial_r) = match config.mode {
            SimMode::Vertical => (state.velocity_mm_s.z, state.velocity_mm_s.z),
            SimMode::Planar => {
                let (sin_h, cos_h) = state.heading_rad.sin_cos();
                let axial =
                    state.velocity_mm_s.x * (-sin_h) + state.velocity_mm_s.y * cos_h;
                let sweep = state.yaw_rate_rad_s * config.chassis_radius_mm;
                (axial - sweep, axial + sweep)
            }
        };

        let (arm_l, loads_l) = step_arm_with_loads(
            &config.arm_model,
            &config.env,
            &state.arm_left,
            kin_l.root,
            Vector2::new(0.0, axial_l),
            dt_s,
        )?;
        let (arm_r, loads_r) = step_arm_with_loads(
            &config.arm_model,
            &config.env,
            &state.arm_right,
            kin_r.root,
            Vector2::new(0.0, axial_r),
            dt_s,
        )?;

        // Axial thrust per group, N: reaction to the axial water loads of
        // four synchronized arms (radial components cancel on the ring).
        let mut water_axial_l = 0.0;
        for (_, f) in &loads_l.water_forces {
            water_axial_l += f.y;
        }
        let mut water_axial_r = 0.0;
        for (_, f) in &loads_r.water_forces {
            water_axial_r += f.y;
        }
        let thrust_l = -ARMS_PER_GROUP * water_axial_l;
        let thrust_r = -ARMS_PER_GROUP * water_axial_r;

        // Crank moment balancing the support-rod loads of four arms,
        // N mm: root torque times d(root angle)/d(crank angle).
        let torque_l = ARMS_PER_GROUP * loads_l.root_load_nmm * kin_l.angle_per_crank;
        let torque_r = ARMS_PER_GROUP * loads_r.root_load_nmm * kin_r.angle_per_crank;

        if k % stride == 0 {
            rows.push(SampleRow {
                time_s: t,
                position_mm: state.position_mm,
                velocity_mm_s: state.velocity_mm_s,
                heading_rad: state.heading_rad,
                root_angle_left_rad: kin_l.root.angle_rad,
                root_angle_right_rad: kin_r.root.angle_rad,
                crank_torque_left_nmm: torque_l,
                crank_torque_right_nmm: torque_r,
                phase_left: kin_l.phase,
                phase_right: kin_r.phase,
            });
        }

        // Body momentum update (semi-implicit: velocity, then position).
        match config.mode {
            SimMode::Vertical => {
                let force_n = thrust_l + thrust_r + body_drag(&config.env, state.velocity_mm_s).z;
                // N / kg = m/s^2; positions are millimetres.
                state.velocity_mm_s.z += dt_s * 1000.0 * force_n / config.body_mass_kg;
                state.position_mm.z += dt_s * state.velocity_mm_s.z;
            }
            SimMode::Planar => {
                let (sin_h, cos_h) = state.heading_rad.sin_cos();
                let axial_thrust = thrust_l + thrust_r;
                let drag = body_drag(&config.env, state.velocity_mm_s);
                let fx = axial_thrust * (-sin_h) + drag.x;
                let fy = axial_thrust * cos_h + drag.y;
                state.velocity_mm_s.x += dt_s * 1000.0 * fx / config.body_mass_kg;
                state.velocity_mm_s.y += dt_s * 1000.0 * fy / config.body_mass_kg;
                state.position_mm.x += dt_s * state.velocity_mm_s.x;
                state.position_mm.y += dt_s * state.velocity_mm_s.y;
                // Yaw from the thrust imbalance at the +-chassis_radius
                // mounts. N mm / (kg mm^2) needs the 1000 mm/m factor.
                let yaw_torque_nmm = config.chassis_radius_mm * (thrust_r - thrust_l);
                state.yaw_rate_rad_s += dt_s * 1000.0 * yaw_torque_nmm / config.yaw_inertia();
                state.heading_rad += dt_s * state.yaw_rate_rad_s;
            }
        }

        state.arm_left = arm_l;
        state.arm_right = arm_r;
        state.crank_left.advance(dt_s);
        state.crank_right.advance(dt_s);
        state.time_s = (k + 1) as f64 * dt_s;
    }

    Ok(TimeSeries {
        sample_interval_s: stride as f64 * dt_s,
        rows,
    })
}

fn initial_state(
    config: &RobotConfig,
    left: &Group<'_>,
    right: &Group<'_>,
) -> Result<SwimState, VehicleError> {
    let phi_l = config.mechanism_left.crank_angle_at_max();
    let phi_r = config.mechanism_right.crank_angle_at_max();
    let alpha_l = left.map.angle(slider_position(&config.mechanism_left, phi_l))?;
    let alpha_r = right
        .map
        .angle(slider_position(&config.mechanism_right, phi_r))?;
    Ok(SwimState {
        position_mm: Vector3::zeros(),
        velocity_mm_s: Vector3::zeros(),
        heading_rad: 0.0,
        yaw_rate_rad_s: 0.0,
        crank_left: CrankState {
            angle_rad: phi_l,
            speed_rad_s: 0.0,
        },
        crank_right: CrankState {
            angle_rad: phi_r,
            speed_rad_s: 0.0,
        },
        arm_left: ArmState::at_rest(&config.arm_model, alpha_l),
        arm_right: ArmState::at_rest(&config.arm_model, alpha_r),
        time_s: 0.0,
    })
}

/// [`simulate`] restricted to planar mode, for steering studies with
/// asymmetric motor profiles. A faster left motor yaws and translates the
/// body toward the right-arm side (+x); swapping the profiles mirrors the
/// trajectory about the y axis exactly.
pub fn simulate_steering(
    config: &RobotConfig,
    duration_s: f64,
    dt_s: f64,
    sample_interval_s: f64,
) -> Result<TimeSeries, VehicleError> {
    if config.mode != SimMode::Planar {
        return Err(bad("mode", "planar for steering", 0.0));
    }
    simulate(config, duration_s, dt_s, sample_interval_s)
}

/// One captured arm shape from [`simulate_single_arm`].
#[derive(Debug, Clone, PartialEq)]
pub struct ArmRigFrame {
    pub time_s: f64,
    /// Crank revolutions completed before this frame.
    pub cycle_index: u64,
    /// Arm midline in the arm's swing plane, mm (mount at the origin).
    pub midline_mm: Vec<Vector2<f64>>,
    pub phase: StrokePhase,
    /// True within the first quarter of the recovery arc — the window
    /// where tip-curl shape analysis applies.
    pub early_recovery: bool,
}

/// Drives a single arm (left mechanism, left motor profile) on a fixed
/// test rig — no body motion, still water — capturing `frames_per_cycle`
/// equally spaced midline snapshots per crank revolution.
pub fn simulate_single_arm(
    config: &RobotConfig,
    duration_s: f64,
    dt_s: f64,
    frames_per_cycle: u32,
) -> Result<Vec<ArmRigFrame>, VehicleError> {
    config.validate()?;
    if !(dt_s > 0.0 && dt_s <= MAX_DT_S) {
        return Err(bad("dt_s", "in (0, 1e-3] s", dt_s));
    }
    if !(duration_s > 0.0 && duration_s.is_finite()) {
        return Err(bad("duration_s", "positive", duration_s));
    }
    if frames_per_cycle == 0 {
        return Err(bad("frames_per_cycle", "at least 1", 0.0));
    }
    let n_steps = (duration_s / dt_s).round() as u64;
    if n_steps == 0 {
        return Err(bad("duration_s", "at least one time step", duration_s));
    }

    let geom = &config.mechanism_left;
    let group = Group {
        geom,
        map: RootMap::build(config, geom)?,
        profile: &config.motor_profile_left,
    };
    let phi0 = geom.crank_angle_at_max();
    let alpha0 = group.map.angle(slider_position(geom, phi0))?;
    let mut crank = CrankState {
        angle_rad: phi0,
        speed_rad_s: 0.0,
    };
    let mut arm = ArmState::at_rest(&config.arm_model, alpha0);

    let chars = stroke_characteristics(geom);
    let recovery_arc_rad = chars.recovery_arc_deg.to_radians();
    let recovery_start = geom.crank_angle_at_min();
    let frame_arc = 2.0 * std::f64::consts::PI / frames_per_cycle as f64;

    let mut frames = Vec::new();
    let mut swept = 0.0; // total crank sweep, rad
    let mut next_frame_at = 0.0;
    for k in 0..n_steps {
        let t = k as f64 * dt_s;
        crank.speed_rad_s = group.profile.rpm_at(t) * RPM_TO_RAD_S;
        let kin = group.step_kinematics(&crank, t)?;

        if swept >= next_frame_at {
            let into_recovery = (recovery_start - crank.angle_rad)
                .rem_euclid(2.0 * std::f64::consts::PI);
            frames.push(ArmRigFrame {
                time_s: t,
                cycle_index: (swept / (2.0 * std::f64::consts::PI)) as u64,
                midline_mm: crate::arm::midline(&config.arm_model, &arm),
                phase: kin.phase,
                early_recovery: kin.phase == StrokePhase::Recovery
                    && into_recovery <= 0.25 * recovery_arc_rad,
            });
            next_frame_at += frame_arc;
        }

        arm = crate::arm::step_arm(
            &config.arm_model,
            &config.env,
            &arm,
            kin.root,
            Vector2::zeros(),
            dt_s,
        )?;
        swept += crank.speed_rad_s * dt_s;
        crank.advance(dt_s);
    }
    Ok(frames)
}

/// Per-group crank torque series extracted from a simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct TorqueEstimate {
    pub time_s: Vec<f64>,
    pub left_nmm: Vec<f64>,
    pub right_nmm: Vec<f64>,
    /// Rating the series was checked against, if one was configured.
    pub limit_nmm: Option<f64>,
    /// True when some |torque| exceeds the rating.
    pub left_exceeds_limit: bool,
    pub right_exceeds_limit: bool,
}

impl TorqueEstimate {
    /// Largest |torque| over the whole series, per group.
    pub fn peak_nmm(&self) -> (f64, f64) {
        let peak = |v: &[f64]| v.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
        (peak(&self.left_nmm), peak(&self.right_nmm))
    }
}

/// Motor load diagnostic: the crank moment each group's motor must react,
/// read from the simulation's recorded torque columns, with an overload
/// flag against `config.motor_torque_limit_nmm` when set.
pub fn motor_torque_estimate(config: &RobotConfig, series: &TimeSeries) -> TorqueEstimate {
    let time_s = series.rows.iter().map(|r| r.time_s).collect();
    let left_nmm: Vec<f64> = series.rows.iter().map(|r| r.crank_torque_left_nmm).collect();
    let right_nmm: Vec<f64> = series
        .rows
        .iter()
        .map(|r| r.crank_torque_right_nmm)
        .collect();
    let limit = config.motor_torque_limit_nmm;
    let exceeds = |v: &[f64]| match limit {
        Some(l) => v.iter().any(|&x| x.abs() > l),
        None => false,
    };
    TorqueEstimate {
        left_exceeds_limit: exceeds(&left_nmm),
        right_exceeds_limit: exceeds(&right_nmm),
        time_s,
        left_nmm,
        right_nmm,
        limit_nmm: limit,
    }
}

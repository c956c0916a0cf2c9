//! Simulation and design toolkit for an octopus-inspired swimming robot.
//!
//! The robot swims by opening and closing eight flexible arms arranged like an
//! umbrella. A motor-driven offset crank-slider turns constant rotation into a
//! quick-return stroke: the slider opens the arms slowly (recovery) and closes
//! them quickly (power), so the drag asymmetry over a cycle produces net
//! thrust. The arms themselves are soft tapered cones with incisions along one
//! side, which makes them much softer when bending one way than the other and
//! shapes how they snap through the water.
//!
//! The crate is organized by physical subsystem:
//!
//! - [`mechanism`]: offset crank-slider geometry, stroke kinematics, and
//!   travel-ratio synthesis.
//! - [`arm`]: pseudo-rigid-body model of a tapered soft arm with
//!   direction-dependent joint stiffness.
//! - [`hydro`]: blade-element drag on arm segments and bluff-body drag on the
//!   hull.
//! - [`vehicle`]: the assembled robot — motor profiles, slider-to-arm
//!   coupling, single-arm test rig, and full swimming/steering simulations.
//! - [`analysis`]: trajectory and midline post-processing (curvature,
//!   recurve detection, per-cycle swimming metrics).
//!
//! All simulations are deterministic: fixed-step integration, no randomness,
//! and bit-identical output for identical inputs.

pub mod analysis;
pub mod arm;
pub mod hydro;
pub mod mechanism;
pub mod vehicle;

pub use analysis::{
    curvature_profile, cycle_metrics, detect_recurve, max_curvature_trace, AnalysisError,
    CurvaturePeak, CurvatureProfile, CycleMetrics, RecurveConfig, RecurveReport,
};
pub use arm::{
    build_arm, mechanical_energy, midline, static_tip_deflection, step_arm, step_arm_with_loads,
    ArmError, ArmGeometry, ArmLoads, ArmMaterial, ArmModel, ArmState, RootDrive, StaticDeflection,
    MAX_DT_S,
};
pub use hydro::{body_drag, net_thrust, segment_drag, FluidEnvironment};
pub use mechanism::{
    design_presets, k_from_polar_angle, polar_angle_from_k, slider_position, slider_velocity,
    stroke_characteristics, stroke_phase, stroke_timing, synthesize_linkage, CrankState,
    DesignPreset, MechanismError, MechanismGeometry, StrokeCharacteristics, StrokePhase,
    StrokeTiming,
};
pub use vehicle::{
    motor_torque_estimate, root_angle_map, simulate, simulate_single_arm, simulate_steering,
    ArmRigFrame, MotorProfile, RobotConfig, RootAngleMap, SampleRow, SimMode, SwimState,
    TimeSeries, TorqueEstimate, VehicleError,
};

//! Scenario configuration: TOML schema, strict validation, and resolution
//! into a ready-to-run [`RobotConfig`].
//!
//! Every key is optional and defaults to the robot the library models, so
//! an empty file (or no `--config` at all) is a valid scenario. Unknown
//! keys are rejected so typos fail loudly. After resolution the tool
//! writes an `effective_config.toml` with every choice materialized; that
//! file reloads to the identical scenario and re-emits byte-for-byte.

use std::fmt;
use std::path::Path;

use octoswim::{
    build_arm, design_presets, ArmGeometry, ArmMaterial, FluidEnvironment, MechanismGeometry,
    MotorProfile, RobotConfig, RootAngleMap, SimMode,
};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Parsed scenario file. Field order is the emission order; scalar keys
/// stay ahead of sub-tables as TOML requires.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    /// Optional scenario kind; when present it must match the subcommand.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
    pub run: RunSection,
    pub mechanism: MechanismSection,
    pub arm: ArmSection,
    pub material: MaterialSection,
    pub fluid: FluidSection,
    pub body: BodySection,
    pub drive: DriveSection,
    pub motor: MotorSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    /// Simulated time, s.
    pub duration_s: f64,
    /// Integration step, s. The default resolves the stiffest bending mode
    /// of the default ten-segment arm with a comfortable margin.
    pub dt_s: f64,
    /// Time between CSV samples, s (rounded to whole steps).
    pub sample_interval_s: f64,
    /// Arm-rig captures per crank revolution (`arm` scenario only).
    pub frames_per_cycle: u32,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            duration_s: 10.0,
            dt_s: 2.5e-5,
            sample_interval_s: 1e-3,
            frames_per_cycle: 64,
        }
    }
}

/// Crank-slider dimensions, either by catalogue label or explicitly.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometrySpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub crank_mm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coupler_mm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub offset_mm: Option<f64>,
}

impl GeometrySpec {
    fn is_empty(&self) -> bool {
        self.preset.is_none()
            && self.crank_mm.is_none()
            && self.coupler_mm.is_none()
            && self.offset_mm.is_none()
    }

    /// Resolves to a geometry; `None` when nothing was specified.
    fn resolve(&self, what: &str) -> Result<Option<MechanismGeometry>, CliError> {
        match (
            &self.preset,
            self.crank_mm,
            self.coupler_mm,
            self.offset_mm,
        ) {
            (None, None, None, None) => Ok(None),
            (Some(label), None, None, None) => Ok(Some(preset_geometry(label)?)),
            (None, Some(a), Some(b), Some(e)) => MechanismGeometry::new(a, b, e)
                .map(Some)
                .map_err(|err| CliError::usage(format!("{what}: {err}"))),
            _ => Err(CliError::usage(format!(
                "{what}: give either `preset` or the full crank_mm/coupler_mm/offset_mm \
                 triple, not a mixture"
            ))),
        }
    }

    fn explicit(geom: &MechanismGeometry) -> Self {
        Self {
            preset: None,
            crank_mm: Some(geom.crank_a),
            coupler_mm: Some(geom.coupler_b),
            offset_mm: Some(geom.offset_e),
        }
    }
}

/// Looks up a catalogued drive geometry by its label (e.g. "2.0:1").
pub fn preset_geometry(label: &str) -> Result<MechanismGeometry, CliError> {
    design_presets()
        .iter()
        .find(|p| p.label == label)
        .map(|p| p.geometry)
        .ok_or_else(|| {
            let known: Vec<_> = design_presets().iter().map(|p| p.label).collect();
            CliError::usage(format!(
                "unknown mechanism preset {label:?}; known presets: {}",
                known.join(", ")
            ))
        })
}

/// `[mechanism]` — base spec applies to both sides; `left`/`right`
/// override per side.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MechanismSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub crank_mm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coupler_mm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub offset_mm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub left: Option<GeometrySpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub right: Option<GeometrySpec>,
}

impl MechanismSection {
    fn base_spec(&self) -> GeometrySpec {
        GeometrySpec {
            preset: self.preset.clone(),
            crank_mm: self.crank_mm,
            coupler_mm: self.coupler_mm,
            offset_mm: self.offset_mm,
        }
    }

    fn resolve(&self) -> Result<(MechanismGeometry, MechanismGeometry), CliError> {
        let base = self
            .base_spec()
            .resolve("mechanism")?
            .unwrap_or_else(default_geometry);
        let side = |spec: &Option<GeometrySpec>, what: &str| -> Result<MechanismGeometry, CliError> {
            match spec {
                None => Ok(base),
                Some(s) if s.is_empty() => Err(CliError::usage(format!(
                    "{what}: empty override section; remove it or fill it in"
                ))),
                Some(s) => Ok(s.resolve(what)?.expect("non-empty spec resolves")),
            }
        };
        Ok((
            side(&self.left, "mechanism.left")?,
            side(&self.right, "mechanism.right")?,
        ))
    }
}

fn default_geometry() -> MechanismGeometry {
    MechanismGeometry::new(25.0, 66.0, 40.0).expect("default geometry is valid")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ArmSection {
    pub length_mm: f64,
    pub base_diameter_mm: f64,
    pub tip_diameter_mm: f64,
    /// Incision depth as a fraction of the local diameter, in [0, 1).
    pub incision_depth: f64,
    pub segments: usize,
}

impl Default for ArmSection {
    fn default() -> Self {
        let g = ArmGeometry::default();
        Self {
            length_mm: g.length_mm,
            base_diameter_mm: g.base_diameter_mm,
            tip_diameter_mm: g.tip_diameter_mm,
            incision_depth: g.incision_depth,
            segments: g.n_segments,
        }
    }
}

impl ArmSection {
    pub fn geometry(&self) -> ArmGeometry {
        ArmGeometry {
            length_mm: self.length_mm,
            base_diameter_mm: self.base_diameter_mm,
            tip_diameter_mm: self.tip_diameter_mm,
            incision_depth: self.incision_depth,
            n_segments: self.segments,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MaterialSection {
    pub youngs_modulus_pa: f64,
    pub density_kg_m3: f64,
    pub damping_ratio: f64,
}

impl Default for MaterialSection {
    fn default() -> Self {
        let m = ArmMaterial::default();
        Self {
            youngs_modulus_pa: m.youngs_modulus_pa,
            density_kg_m3: m.density_kg_m3,
            damping_ratio: m.damping_ratio,
        }
    }
}

impl MaterialSection {
    pub fn material(&self) -> ArmMaterial {
        ArmMaterial {
            youngs_modulus_pa: self.youngs_modulus_pa,
            density_kg_m3: self.density_kg_m3,
            damping_ratio: self.damping_ratio,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FluidSection {
    pub density_kg_m3: f64,
    pub cd_normal: f64,
    pub ct_tangential: f64,
    pub cd_body: f64,
    pub body_frontal_diameter_mm: f64,
    pub added_mass_coeff: f64,
}

impl Default for FluidSection {
    fn default() -> Self {
        let f = FluidEnvironment::default();
        Self {
            density_kg_m3: f.density_kg_m3,
            cd_normal: f.cd_normal,
            ct_tangential: f.ct_tangential,
            cd_body: f.cd_body,
            body_frontal_diameter_mm: f.body_frontal_diameter_mm,
            added_mass_coeff: f.added_mass_coeff,
        }
    }
}

impl FluidSection {
    fn environment(&self) -> FluidEnvironment {
        FluidEnvironment {
            density_kg_m3: self.density_kg_m3,
            cd_normal: self.cd_normal,
            ct_tangential: self.ct_tangential,
            cd_body: self.cd_body,
            body_frontal_diameter_mm: self.body_frontal_diameter_mm,
            added_mass_coeff: self.added_mass_coeff,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BodySection {
    pub mass_kg: f64,
    pub chassis_radius_mm: f64,
    /// "vertical" (ascent along +z) or "planar" (x-y swimming with yaw).
    /// Defaults to "planar" for the `steer` scenario, "vertical" otherwise.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    /// Yaw inertia override; defaults to the thin-disc value for the
    /// configured mass and chassis radius.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub yaw_inertia_kg_mm2: Option<f64>,
}

impl Default for BodySection {
    fn default() -> Self {
        Self {
            mass_kg: 1.5,
            chassis_radius_mm: 95.0,
            mode: None,
            yaw_inertia_kg_mm2: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DriveSection {
    /// Root angle when the arms are fully closed (slider at its lowest),
    /// degrees from straight-down. Used by the linear map.
    pub root_angle_closed_deg: f64,
    /// Root angle when the arms are fully open, degrees.
    pub root_angle_open_deg: f64,
    /// "linear" maps slider travel affinely onto the closed-open angle
    /// range; "linkage" solves the support-rod closure instead.
    pub map: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub motor_torque_limit_nmm: Option<f64>,
    /// Support-rod dimensions; only meaningful (and only allowed) with
    /// `map = "linkage"`. Defaults to the reference rig.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub linkage: Option<LinkageSection>,
}

impl Default for DriveSection {
    fn default() -> Self {
        Self {
            root_angle_closed_deg: 15.0,
            root_angle_open_deg: 75.0,
            map: "linear".to_string(),
            motor_torque_limit_nmm: None,
            linkage: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LinkageSection {
    pub rod_length_mm: f64,
    pub attachment_radius_mm: f64,
    pub pivot_radius_mm: f64,
    pub hinge_height_mm: f64,
}

impl Default for LinkageSection {
    fn default() -> Self {
        match RootAngleMap::linkage_reference() {
            RootAngleMap::Linkage {
                rod_length_mm,
                attachment_radius_mm,
                pivot_radius_mm,
                hinge_height_mm,
            } => Self {
                rod_length_mm,
                attachment_radius_mm,
                pivot_radius_mm,
                hinge_height_mm,
            },
            RootAngleMap::Linear => unreachable!("reference map is a linkage"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MotorSection {
    /// Constant speed for both motors, rpm. Exclusive with the per-side
    /// keys below.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rpm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rpm_left: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rpm_right: Option<f64>,
    /// Piecewise-constant schedule `[[start_s, rpm], ...]`; first start
    /// must be 0 and starts must increase.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps_left: Option<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps_right: Option<Vec<[f64; 2]>>,
}

const DEFAULT_RPM: f64 = 33.0;

impl MotorSection {
    fn resolve(&self) -> Result<(MotorProfile, MotorProfile), CliError> {
        if self.rpm.is_some()
            && (self.rpm_left.is_some()
                || self.rpm_right.is_some()
                || self.steps_left.is_some()
                || self.steps_right.is_some())
        {
            return Err(CliError::usage(
                "motor: `rpm` is exclusive with the per-side rpm_left/rpm_right/steps_* keys",
            ));
        }
        if let Some(rpm) = self.rpm {
            let p = constant_profile(rpm)?;
            return Ok((p.clone(), p));
        }
        let side = |rpm: Option<f64>,
                    steps: &Option<Vec<[f64; 2]>>,
                    what: &str|
         -> Result<MotorProfile, CliError> {
            match (rpm, steps) {
                (Some(_), Some(_)) => Err(CliError::usage(format!(
                    "motor: give either rpm_{what} or steps_{what}, not both"
                ))),
                (Some(rpm), None) => constant_profile(rpm),
                (None, Some(steps)) => {
                    MotorProfile::piecewise(steps.iter().map(|s| (s[0], s[1])).collect())
                        .map_err(|err| CliError::usage(format!("motor.steps_{what}: {err}")))
                }
                (None, None) => constant_profile(DEFAULT_RPM),
            }
        };
        Ok((
            side(self.rpm_left, &self.steps_left, "left")?,
            side(self.rpm_right, &self.steps_right, "right")?,
        ))
    }
}

fn constant_profile(rpm: f64) -> Result<MotorProfile, CliError> {
    if !(rpm.is_finite() && rpm >= 0.0) {
        return Err(CliError::usage(format!(
            "motor rpm must be finite and non-negative, got {rpm}"
        )));
    }
    Ok(MotorProfile::constant(rpm))
}

/// `[sweep]` — the grid is the cross product of the three axes.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    /// Catalogue labels, e.g. ["2.0:1", "1.6:1"].
    pub presets: Vec<String>,
    /// Incision depth fractions in [0, 1).
    pub depths: Vec<f64>,
    /// Motor speeds, rpm (both motors).
    pub rpms: Vec<f64>,
}

/// One fully resolved, runnable scenario.
#[derive(Debug)]
pub struct Resolved {
    pub robot: RobotConfig,
    pub run: RunSection,
    /// Arm shape/material inputs kept for sweep cells, which rebuild the
    /// arm at each grid depth.
    pub arm: ArmSection,
    pub material: MaterialSection,
    pub sweep: Option<SweepSection>,
}

/// Scenario kinds a config file may name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Mech,
    Arm,
    Swim,
    Steer,
    Sweep,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Mech => "mech",
            Scenario::Arm => "arm",
            Scenario::Swim => "swim",
            Scenario::Steer => "steer",
            Scenario::Sweep => "sweep",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Loads a scenario file, or the all-defaults scenario when `path` is None.
pub fn load(path: Option<&Path>) -> Result<ScenarioConfig, CliError> {
    match path {
        None => Ok(ScenarioConfig::default()),
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|err| {
                CliError::usage(format!("cannot read config {}: {err}", path.display()))
            })?;
            toml::from_str(&text)
                .map_err(|err| CliError::usage(format!("config {}: {err}", path.display())))
        }
    }
}

/// Validates and resolves `config` for `scenario`, returning the runnable
/// scenario and the canonical (fully materialized) config.
pub fn resolve(
    config: &ScenarioConfig,
    scenario: Scenario,
) -> Result<(Resolved, ScenarioConfig), CliError> {
    if let Some(named) = &config.scenario {
        if named != scenario.name() {
            return Err(CliError::usage(format!(
                "config names scenario {named:?} but the {scenario} subcommand was invoked"
            )));
        }
    }
    let run = config.run.clone();
    if !(run.duration_s > 0.0 && run.duration_s.is_finite()) {
        return Err(CliError::usage(format!(
            "run.duration_s must be positive, got {}",
            run.duration_s
        )));
    }
    if run.frames_per_cycle == 0 {
        return Err(CliError::usage("run.frames_per_cycle must be at least 1"));
    }

    let (left, right) = config.mechanism.resolve()?;
    let arm_model = build_arm(&config.arm.geometry(), &config.material.material())
        .map_err(|err| CliError::usage(format!("arm: {err}")))?;
    let (profile_left, profile_right) = config.motor.resolve()?;

    let mode = match (config.body.mode.as_deref(), scenario) {
        (None, Scenario::Steer) => SimMode::Planar,
        (None, _) => SimMode::Vertical,
        (Some("vertical"), Scenario::Steer) => {
            return Err(CliError::usage(
                "steer needs body.mode = \"planar\" (vertical runs have no heading dynamics)",
            ));
        }
        (Some("vertical"), _) => SimMode::Vertical,
        (Some("planar"), _) => SimMode::Planar,
        (Some(other), _) => {
            return Err(CliError::usage(format!(
                "body.mode must be \"vertical\" or \"planar\", got {other:?}"
            )));
        }
    };

    let root_map = match config.drive.map.as_str() {
        "linear" => {
            if config.drive.linkage.is_some() {
                return Err(CliError::usage(
                    "drive.linkage is set but drive.map is \"linear\"; \
                     set map = \"linkage\" or remove the section",
                ));
            }
            RootAngleMap::Linear
        }
        "linkage" => {
            let l = config.drive.linkage.clone().unwrap_or_default();
            RootAngleMap::Linkage {
                rod_length_mm: l.rod_length_mm,
                attachment_radius_mm: l.attachment_radius_mm,
                pivot_radius_mm: l.pivot_radius_mm,
                hinge_height_mm: l.hinge_height_mm,
            }
        }
        other => {
            return Err(CliError::usage(format!(
                "drive.map must be \"linear\" or \"linkage\", got {other:?}"
            )));
        }
    };

    let robot = RobotConfig {
        mechanism_left: left,
        mechanism_right: right,
        arm_model,
        env: config.fluid.environment(),
        body_mass_kg: config.body.mass_kg,
        root_angle_closed_rad: config.drive.root_angle_closed_deg.to_radians(),
        root_angle_open_rad: config.drive.root_angle_open_deg.to_radians(),
        root_map,
        motor_profile_left: profile_left,
        motor_profile_right: profile_right,
        mode,
        chassis_radius_mm: config.body.chassis_radius_mm,
        motor_torque_limit_nmm: config.drive.motor_torque_limit_nmm,
        yaw_inertia_kg_mm2: config.body.yaw_inertia_kg_mm2,
    };
    robot
        .validate()
        .map_err(|err| CliError::usage(err.to_string()))?;

    if scenario == Scenario::Sweep {
        let sweep = config
            .sweep
            .as_ref()
            .ok_or_else(|| CliError::usage("sweep scenario needs a [sweep] section"))?;
        if sweep.presets.is_empty() || sweep.depths.is_empty() || sweep.rpms.is_empty() {
            return Err(CliError::usage(
                "sweep grid is empty: presets, depths, and rpms must each list at least one value",
            ));
        }
        for label in &sweep.presets {
            preset_geometry(label)?;
        }
        for &d in &sweep.depths {
            if !(0.0..1.0).contains(&d) {
                return Err(CliError::usage(format!(
                    "sweep.depths entries must lie in [0, 1), got {d}"
                )));
            }
        }
        for &rpm in &sweep.rpms {
            if !(rpm.is_finite() && rpm >= 0.0) {
                return Err(CliError::usage(format!(
                    "sweep.rpms entries must be finite and non-negative, got {rpm}"
                )));
            }
        }
    }

    let canonical = canonicalize(config, scenario, &robot);
    let resolved = Resolved {
        robot,
        run,
        arm: config.arm.clone(),
        material: config.material.clone(),
        sweep: config.sweep.clone(),
    };
    Ok((resolved, canonical))
}

/// Materializes every resolved choice back into a config that reloads to
/// the identical scenario and re-serializes byte-for-byte.
fn canonicalize(config: &ScenarioConfig, scenario: Scenario, robot: &RobotConfig) -> ScenarioConfig {
    let mut out = config.clone();
    out.scenario = Some(scenario.name().to_string());
    out.mechanism = MechanismSection {
        preset: None,
        crank_mm: None,
        coupler_mm: None,
        offset_mm: None,
        left: Some(GeometrySpec::explicit(&robot.mechanism_left)),
        right: Some(GeometrySpec::explicit(&robot.mechanism_right)),
    };
    out.body.mode = Some(
        match robot.mode {
            SimMode::Vertical => "vertical",
            SimMode::Planar => "planar",
        }
        .to_string(),
    );
    out.body.yaw_inertia_kg_mm2 = Some(robot.yaw_inertia());
    out.drive.map = match robot.root_map {
        RootAngleMap::Linear => "linear".to_string(),
        RootAngleMap::Linkage { .. } => "linkage".to_string(),
    };
    out.drive.linkage = match robot.root_map {
        RootAngleMap::Linear => None,
        RootAngleMap::Linkage {
            rod_length_mm,
            attachment_radius_mm,
            pivot_radius_mm,
            hinge_height_mm,
        } => Some(LinkageSection {
            rod_length_mm,
            attachment_radius_mm,
            pivot_radius_mm,
            hinge_height_mm,
        }),
    };
    let steps = |profile: &MotorProfile| Some(profile.steps().iter().map(|&(t, r)| [t, r]).collect());
    out.motor = MotorSection {
        rpm: None,
        rpm_left: None,
        rpm_right: None,
        steps_left: steps(&robot.motor_profile_left),
        steps_right: steps(&robot.motor_profile_right),
    };
    out
}

/// Serializes a canonical config for the `effective_config.toml` artifact.
pub fn to_toml(config: &ScenarioConfig) -> String {
    toml::to_string_pretty(config).expect("scenario config serializes")
}

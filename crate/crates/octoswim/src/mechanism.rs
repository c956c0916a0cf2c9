//! Offset crank-slider quick-return mechanism.
//!
//! A crank of length `a` spins about a fixed pivot; a coupler of length `b`
//! connects the crank pin to a slider that runs on a straight rail. The rail
//! is parallel to the crank-plane x-axis but offset from the pivot by a
//! perpendicular distance `e`. With the crank pin at angle `phi`
//! (counterclockwise from the rail direction), the slider sits at
//!
//! ```text
//! s(phi) = a cos(phi) + sqrt(b^2 - (a sin(phi) - e)^2)
//! ```
//!
//! measured along the rail from the pivot foot. The offset makes the two
//! dead-center positions asymmetric: the crank sweeps `180 + theta` degrees
//! while the slider travels one way and `180 - theta` degrees on the way
//! back, where `theta` is the angle between the two pivot-to-dead-center
//! rays:
//!
//! ```text
//! theta_1 = asin(e / (a + b))      ray to the fully extended slider, s_max
//! theta_2 = asin(e / (b - a))      ray to the fully folded slider,   s_min
//! theta   = |theta_2 - theta_1|
//! K       = (180 + theta) / (180 - theta)
//! ```
//!
//! `K` is the travel ratio of slow-stroke to fast-stroke duration at constant
//! crank speed. In the robot the slider opens the arm umbrella as it rises to
//! `s_max`, so the slow arc is the recovery (opening) stroke and the fast arc
//! is the power (closing) stroke; this requires the crank to turn in the
//! *clockwise* sense of this module's angle convention, which is how
//! [`CrankState::advance`] steps it.
//!
//! Lengths are millimetres, interface angles degrees, internal math radians.

use std::f64::consts::PI;

use thiserror::Error;

/// Nudge used to classify the stroke phase exactly at a dead center.
const PHASE_TIEBREAK_RAD: f64 = 1e-6;

#[derive(Debug, Error, PartialEq)]
pub enum MechanismError {
    #[error("{what} must be {requirement} (got {value})")]
    InvalidDimension {
        what: &'static str,
        requirement: &'static str,
        value: f64,
    },
    /// The crank cannot complete a full revolution: the folded dead center
    /// requires `coupler_b - crank_a >= offset_e`.
    #[error(
        "mechanism not fully rotatable: coupler_b - crank_a = {margin} mm but offset_e = {offset_e} mm"
    )]
    NotRotatable { margin: f64, offset_e: f64 },
    /// Travel-ratio synthesis asked for `K <= 1`, which no offset can produce.
    #[error("travel ratio target must exceed 1 (got {target})")]
    InvalidTarget { target: f64 },
    /// No coupler length in the search bracket reaches the requested travel
    /// ratio for the given crank and offset.
    #[error(
        "no coupler length reaches K = {target} with crank_a = {crank_a} mm, offset_e = {offset_e} mm; achievable K range is ({k_min:.9}, {k_max:.9})"
    )]
    NoSolution {
        target: f64,
        crank_a: f64,
        offset_e: f64,
        k_min: f64,
        k_max: f64,
    },
}

/// Link dimensions of an offset crank-slider, in millimetres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MechanismGeometry {
    /// Crank length `a` (pivot to crank pin), mm.
    pub crank_a: f64,
    /// Coupler length `b` (crank pin to slider), mm.
    pub coupler_b: f64,
    /// Perpendicular rail offset `e` from the crank pivot, mm.
    pub offset_e: f64,
}

impl MechanismGeometry {
    /// Validates dimensions: positive links, non-negative offset, and full
    /// crank rotatability (`coupler_b - crank_a >= offset_e`).
    pub fn new(crank_a: f64, coupler_b: f64, offset_e: f64) -> Result<Self, MechanismError> {
        let dim = |what, requirement, value| MechanismError::InvalidDimension {
            what,
            requirement,
            value,
        };
        if !(crank_a > 0.0) || !crank_a.is_finite() {
            return Err(dim("crank_a", "finite and positive", crank_a));
        }
        if !(coupler_b > 0.0) || !coupler_b.is_finite() {
            return Err(dim("coupler_b", "finite and positive", coupler_b));
        }
        if !(offset_e >= 0.0) || !offset_e.is_finite() {
            return Err(dim("offset_e", "finite and non-negative", offset_e));
        }
        if coupler_b - crank_a < offset_e {
            return Err(MechanismError::NotRotatable {
                margin: coupler_b - crank_a,
                offset_e,
            });
        }
        Ok(Self {
            crank_a,
            coupler_b,
            offset_e,
        })
    }

    /// Fully extended slider position: `sqrt((a + b)^2 - e^2)` mm.
    pub fn slider_max(&self) -> f64 {
        let reach = self.crank_a + self.coupler_b;
        (reach * reach - self.offset_e * self.offset_e).sqrt()
    }

    /// Fully folded slider position: `sqrt((b - a)^2 - e^2)` mm.
    pub fn slider_min(&self) -> f64 {
        let reach = self.coupler_b - self.crank_a;
        (reach * reach - self.offset_e * self.offset_e).sqrt()
    }

    /// Slider travel `s_max - s_min` over a revolution, mm.
    pub fn stroke_length(&self) -> f64 {
        self.slider_max() - self.slider_min()
    }

    /// Crank angle (rad) at the extended dead center, where the slider is at
    /// `s_max`: crank and coupler are collinear and point at the slider.
    pub fn crank_angle_at_max(&self) -> f64 {
        (self.offset_e / (self.crank_a + self.coupler_b)).asin()
    }

    /// Crank angle (rad) at the folded dead center (`s_min`): the crank
    /// points away from the slider along the coupler line.
    pub fn crank_angle_at_min(&self) -> f64 {
        PI + (self.offset_e / (self.coupler_b - self.crank_a)).asin()
    }
}

/// Stroke geometry of a mechanism: dead-center polar angles and travel ratio.
/// All angles in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrokeCharacteristics {
    /// Polar angle of the pivot-to-`s_max` ray, `asin(e / (a + b))`, deg.
    pub theta1_deg: f64,
    /// Polar angle of the pivot-to-`s_min` ray, `asin(e / (b - a))`, deg.
    pub theta2_deg: f64,
    /// Quick-return angle `|theta2 - theta1|`, deg.
    pub theta_deg: f64,
    /// Crank arc of the slow opening (recovery) stroke, `180 + theta`, deg.
    pub recovery_arc_deg: f64,
    /// Crank arc of the fast closing (power) stroke, `180 - theta`, deg.
    pub power_arc_deg: f64,
    /// Travel ratio `K = recovery_arc / power_arc`.
    pub travel_ratio_k: f64,
}

/// Stroke labels for the two halves of a crank revolution. Recovery opens the
/// arm umbrella (slider rising toward `s_max`), power closes it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrokePhase {
    Power,
    Recovery,
}

impl StrokePhase {
    pub fn label(&self) -> &'static str {
        match self {
            StrokePhase::Power => "power",
            StrokePhase::Recovery => "recovery",
        }
    }
}

/// Durations of the two strokes at a constant motor speed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrokeTiming {
    /// Crank revolution period, s.
    pub period_s: f64,
    /// Recovery (slow, opening) stroke duration, s.
    pub t_recovery_s: f64,
    /// Power (fast, closing) stroke duration, s.
    pub t_power_s: f64,
}

impl StrokeTiming {
    /// Phase at time `t` since a power-stroke onset, plus the fraction of
    /// that stroke already elapsed. Cycles repeat with `period_s`.
    pub fn phase_at(&self, t: f64) -> (StrokePhase, f64) {
        let tc = t.rem_euclid(self.period_s);
        if tc < self.t_power_s {
            (StrokePhase::Power, tc / self.t_power_s)
        } else {
            (StrokePhase::Recovery, (tc - self.t_power_s) / self.t_recovery_s)
        }
    }
}

/// Instantaneous crank drive state. `angle_rad` wraps modulo 2*pi;
/// `speed_rad_s` is the motor speed magnitude and must be non-negative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrankState {
    pub angle_rad: f64,
    pub speed_rad_s: f64,
}

impl CrankState {
    /// Advances the crank by `dt` in the drive direction.
    ///
    /// The motor turns the crank clockwise in this module's angle convention
    /// (decreasing `phi`), which places the slow `180 + theta` arc on the
    /// opening stroke — the quick-return orientation the robot uses.
    pub fn advance(&mut self, dt: f64) {
        self.angle_rad = (self.angle_rad - self.speed_rad_s * dt).rem_euclid(2.0 * PI);
    }
}

/// Slider position `s(phi)` along the rail, mm. `phi` in radians.
pub fn slider_position(geom: &MechanismGeometry, phi: f64) -> f64 {
    let transverse = geom.crank_a * phi.sin() - geom.offset_e;
    geom.crank_a * phi.cos() + (geom.coupler_b * geom.coupler_b - transverse * transverse).sqrt()
}

/// Slider velocity `ds/dt` in mm/s for a crank turning at `crank_rate`
/// rad/s (signed; positive = counterclockwise, increasing `phi`).
pub fn slider_velocity(geom: &MechanismGeometry, phi: f64, crank_rate: f64) -> f64 {
    let (sin_phi, cos_phi) = phi.sin_cos();
    let transverse = geom.crank_a * sin_phi - geom.offset_e;
    let root = (geom.coupler_b * geom.coupler_b - transverse * transverse).sqrt();
    let ds_dphi = -geom.crank_a * sin_phi - geom.crank_a * cos_phi * transverse / root;
    ds_dphi * crank_rate
}

/// Stroke phase at crank angle `phi` for a crank turning at `crank_rate`
/// rad/s (signed, nonzero). The label follows the sign of the slider
/// velocity: opening (rising `s`) is recovery, closing is power. Exactly at
/// a dead center the phase of the stroke about to begin is reported.
pub fn stroke_phase(geom: &MechanismGeometry, phi: f64, crank_rate: f64) -> StrokePhase {
    let v = slider_velocity(geom, phi, crank_rate);
    if v > 0.0 {
        StrokePhase::Recovery
    } else if v < 0.0 {
        StrokePhase::Power
    } else {
        // Dead center: probe a short way into the upcoming arc.
        let ahead = phi + crank_rate.signum() * PHASE_TIEBREAK_RAD;
        if slider_velocity(geom, ahead, crank_rate) > 0.0 {
            StrokePhase::Recovery
        } else {
            StrokePhase::Power
        }
    }
}

/// Dead-center polar angles and travel ratio of a mechanism.
pub fn stroke_characteristics(geom: &MechanismGeometry) -> StrokeCharacteristics {
    let theta1_deg = geom.crank_angle_at_max().to_degrees();
    let theta2_deg = ((geom.offset_e / (geom.coupler_b - geom.crank_a)).asin()).to_degrees();
    let theta_deg = (theta2_deg - theta1_deg).abs();
    let recovery_arc_deg = 180.0 + theta_deg;
    let power_arc_deg = 360.0 - recovery_arc_deg;
    StrokeCharacteristics {
        theta1_deg,
        theta2_deg,
        theta_deg,
        recovery_arc_deg,
        power_arc_deg,
        travel_ratio_k: recovery_arc_deg / power_arc_deg,
    }
}

/// Quick-return angle (deg) needed for a travel ratio `K`:
/// `theta = 180 (K - 1) / (K + 1)`. Rejects `K < 1`.
pub fn polar_angle_from_k(travel_ratio_k: f64) -> Result<f64, MechanismError> {
    if !(travel_ratio_k >= 1.0) || !travel_ratio_k.is_finite() {
        return Err(MechanismError::InvalidTarget {
            target: travel_ratio_k,
        });
    }
    Ok(180.0 * (travel_ratio_k - 1.0) / (travel_ratio_k + 1.0))
}

/// Travel ratio produced by a quick-return angle (deg):
/// `K = (180 + theta) / (180 - theta)`. The inverse of
/// [`polar_angle_from_k`]; rejects angles outside `[0, 180)`.
pub fn k_from_polar_angle(theta_deg: f64) -> Result<f64, MechanismError> {
    if !(0.0..180.0).contains(&theta_deg) {
        return Err(MechanismError::InvalidTarget { target: theta_deg });
    }
    Ok((180.0 + theta_deg) / (180.0 - theta_deg))
}

/// Stroke durations at `rpm` crank revolutions per minute.
pub fn stroke_timing(geom: &MechanismGeometry, rpm: f64) -> StrokeTiming {
    let period_s = 60.0 / rpm;
    let stroke = stroke_characteristics(geom);
    let t_recovery_s = period_s * stroke.recovery_arc_deg / 360.0;
    StrokeTiming {
        period_s,
        t_recovery_s,
        t_power_s: period_s - t_recovery_s,
    }
}

/// Finds the coupler length that gives travel ratio `target_k` for a fixed
/// crank and rail offset, by bisection on `b`.
///
/// The quick-return angle decreases strictly with `b` (the folded dead
/// center flattens faster than the extended one), which is checked on the
/// bracket before solving. The bracket is
/// `b in [a + e + 1e-9, 100 (a + e)]`; targets outside its achievable range
/// return [`MechanismError::NoSolution`] with that range.
pub fn synthesize_linkage(
    target_k: f64,
    offset_e: f64,
    crank_a: f64,
) -> Result<MechanismGeometry, MechanismError> {
    if !(target_k > 1.0) || !target_k.is_finite() {
        return Err(MechanismError::InvalidTarget { target: target_k });
    }
    let theta_target = polar_angle_from_k(target_k)?;

    let theta_of = |b: f64| -> f64 {
        let geom = MechanismGeometry {
            crank_a,
            coupler_b: b,
            offset_e,
        };
        stroke_characteristics(&geom).theta_deg
    };
    let k_of_theta = |theta: f64| (180.0 + theta) / (180.0 - theta);

    // Validate the crank/offset pair itself before searching.
    MechanismGeometry::new(crank_a, crank_a + offset_e + 1e-9, offset_e)?;

    let mut lo = crank_a + offset_e + 1e-9;
    let mut hi = 100.0 * (crank_a + offset_e);
    let theta_lo = theta_of(lo);
    let theta_hi = theta_of(hi);
    assert!(
        theta_lo > theta_of(0.5 * (lo + hi)) && theta_of(0.5 * (lo + hi)) > theta_hi,
        "quick-return angle must decrease with coupler length"
    );
    if !(theta_target < theta_lo && theta_target > theta_hi) {
        return Err(MechanismError::NoSolution {
            target: target_k,
            crank_a,
            offset_e,
            k_min: k_of_theta(theta_hi),
            k_max: k_of_theta(theta_lo),
        });
    }

    // theta(b) decreases, so theta(lo) > target > theta(hi) is maintained.
    let mut best = 0.5 * (lo + hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // f64 exhaustion
        }
        if theta_of(mid) > theta_target {
            lo = mid;
        } else {
            hi = mid;
        }
        best = 0.5 * (lo + hi);
        if hi - lo <= 1e-10 && (k_of_theta(theta_of(best)) - target_k).abs() <= 1e-9 {
            break;
        }
    }
    MechanismGeometry::new(crank_a, best, offset_e)
}

/// One of the built-in reference linkage designs, labeled by its nominal
/// travel ratio.
#[derive(Debug, Clone, Copy)]
pub struct DesignPreset {
    pub label: &'static str,
    pub nominal_travel_ratio: f64,
    pub geometry: MechanismGeometry,
}

impl DesignPreset {
    /// Travel ratio the preset geometry actually achieves.
    pub fn achieved_travel_ratio(&self) -> f64 {
        stroke_characteristics(&self.geometry).travel_ratio_k
    }

    /// |achieved - nominal| / nominal.
    pub fn label_deviation(&self) -> f64 {
        (self.achieved_travel_ratio() - self.nominal_travel_ratio).abs()
            / self.nominal_travel_ratio
    }

    /// True when the built linkage misses its nominal label by more than 1%
    /// (the 2.0:1 build does: it lands near 1.8:1).
    pub fn misses_label(&self) -> bool {
        self.label_deviation() > 0.01
    }
}

/// The three reference linkages the robot was designed around. Nominal
/// labels are design targets; the achieved travel ratio of each geometry is
/// what [`stroke_characteristics`] reports (the 2.0:1 build in particular
/// lands near K = 1.8).
pub fn design_presets() -> [DesignPreset; 3] {
    let preset = |label, nominal_travel_ratio, a, b, e| DesignPreset {
        label,
        nominal_travel_ratio,
        geometry: MechanismGeometry::new(a, b, e).expect("preset geometry is valid"),
    };
    [
        preset("2.0:1", 2.0, 25.0, 66.0, 40.0),
        preset("1.6:1", 1.6, 25.0, 69.4, 40.0),
        preset("1.2:1", 1.2, 19.5, 83.0, 40.0),
    ]
}

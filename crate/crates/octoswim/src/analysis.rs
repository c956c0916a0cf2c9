//! Trajectory analytics: discrete curvature of arm midlines, detection of
//! the tip "recurve" shape, and per-cycle swim metrics.
//!
//! Curvature uses the Menger (circumscribed-circle) formula on polyline
//! vertices: for consecutive points `p, q, r`,
//!
//! ```text
//! kappa = 2 * cross(q - p, r - q) / (|q - p| |r - q| |r - p|)
//! ```
//!
//! which is exact on circles at any vertex spacing and needs no smoothing
//! parameters. The sign follows the cross product: positive where the
//! polyline turns left (counterclockwise). In an arm's local frame a
//! positive joint angle (soft, incision-opening bend) turns the midline
//! clockwise, so it shows up here as negative curvature; only relative
//! signs matter to the shape tests below.

use nalgebra::{Vector2, Vector3};
use thiserror::Error;

use crate::mechanism::StrokePhase;
use crate::vehicle::TimeSeries;

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error("curvature needs at least 3 points (got {0})")]
    TooFewPoints(usize),
    #[error("degenerate polyline near vertex {vertex}: coincident or fold-back points")]
    DegenerateGeometry { vertex: usize },
    #[error("polyline too coarse: no interior vertex falls in the {region} region")]
    InsufficientResolution { region: &'static str },
    #[error("series too short: {starts} power-stroke starts found, need at least 2")]
    SeriesTooShort { starts: usize },
}

/// Signed curvature at the interior vertices of a polyline.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureProfile {
    /// Arc position of each interior vertex, mm from the first point.
    pub arc_positions_mm: Vec<f64>,
    /// Signed Menger curvature at the matching vertex, 1/mm.
    pub curvatures_per_mm: Vec<f64>,
}

/// Computes the signed curvature profile of a midline polyline (mm).
pub fn curvature_profile(points: &[Vector2<f64>]) -> Result<CurvatureProfile, AnalysisError> {
    if points.len() < 3 {
        return Err(AnalysisError::TooFewPoints(points.len()));
    }
    let n = points.len();
    let mut arc_positions_mm = Vec::with_capacity(n - 2);
    let mut curvatures_per_mm = Vec::with_capacity(n - 2);
    let mut arc = (points[1] - points[0]).norm();
    for i in 1..n - 1 {
        let e1 = points[i] - points[i - 1];
        let e2 = points[i + 1] - points[i];
        let chord = points[i + 1] - points[i - 1];
        let denom = e1.norm() * e2.norm() * chord.norm();
        if denom == 0.0 || !denom.is_finite() {
            return Err(AnalysisError::DegenerateGeometry { vertex: i });
        }
        let cross = e1.x * e2.y - e1.y * e2.x;
        arc_positions_mm.push(arc);
        curvatures_per_mm.push(2.0 * cross / denom);
        arc += e2.norm();
    }
    Ok(CurvatureProfile {
        arc_positions_mm,
        curvatures_per_mm,
    })
}

/// Location and value of the largest-magnitude curvature in one frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvaturePeak {
    /// Arc position of the peak vertex, mm; ties resolve toward the tip.
    pub arc_position_mm: f64,
    /// Signed curvature at that vertex, 1/mm.
    pub curvature_per_mm: f64,
}

/// Per-frame location of the maximum-|curvature| vertex across a sequence of
/// midline frames. Ties (including all-straight frames) resolve toward the
/// tip, i.e. the last interior vertex.
pub fn max_curvature_trace(
    frames: &[Vec<Vector2<f64>>],
) -> Result<Vec<CurvaturePeak>, AnalysisError> {
    frames
        .iter()
        .map(|frame| {
            let profile = curvature_profile(frame)?;
            let mut best = 0;
            for (i, kappa) in profile.curvatures_per_mm.iter().enumerate() {
                if kappa.abs() >= profile.curvatures_per_mm[best].abs() {
                    best = i;
                }
            }
            Ok(CurvaturePeak {
                arc_position_mm: profile.arc_positions_mm[best],
                curvature_per_mm: profile.curvatures_per_mm[best],
            })
        })
        .collect()
}

/// Windows and threshold for [`detect_recurve`]. The shape is defined only
/// pictorially in the source experiments, so the windows are exposed rather
/// than hard-coded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecurveConfig {
    /// Distal window as a fraction of arc length (default 0.2: last 20%).
    pub distal_fraction: f64,
    /// Proximal window as a fraction of arc length (default 0.4: first 40%).
    pub proximal_fraction: f64,
    /// Minimum mean |curvature| in the distal window, 1/mm (default 1e-3,
    /// i.e. 1/m: gentler distal bends don't count as a recurve).
    pub min_distal_curvature_per_mm: f64,
    /// Minimum mean |curvature| in the proximal window, 1/mm (default 1e-4).
    /// A near-straight proximal section carries no bending direction for the
    /// tip to oppose, so such frames never count — this also keeps the test
    /// robust against curvature noise on translated straight sections.
    pub min_proximal_curvature_per_mm: f64,
}

impl Default for RecurveConfig {
    fn default() -> Self {
        Self {
            distal_fraction: 0.2,
            proximal_fraction: 0.4,
            min_distal_curvature_per_mm: 1e-3,
            min_proximal_curvature_per_mm: 1e-4,
        }
    }
}

/// Outcome of recurve detection on one frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecurveReport {
    pub recurve: bool,
    /// Mean signed curvature over the distal window, 1/mm.
    pub distal_mean_per_mm: f64,
    /// Mean signed curvature over the proximal window, 1/mm.
    pub proximal_mean_per_mm: f64,
}

/// Tests one midline frame for a tip recurve: the distal window curves the
/// opposite way from the proximal window, strongly enough to matter. Apply
/// this to frames from early in the recovery stroke, where the shape appears.
pub fn detect_recurve(
    points: &[Vector2<f64>],
    config: &RecurveConfig,
) -> Result<RecurveReport, AnalysisError> {
    let profile = curvature_profile(points)?;
    let total: f64 = points.windows(2).map(|w| (w[1] - w[0]).norm()).sum();
    let mut distal = MeanAccumulator::default();
    let mut proximal = MeanAccumulator::default();
    for (s, kappa) in profile
        .arc_positions_mm
        .iter()
        .zip(&profile.curvatures_per_mm)
    {
        if *s >= (1.0 - config.distal_fraction) * total {
            distal.push(*kappa);
        }
        if *s <= config.proximal_fraction * total {
            proximal.push(*kappa);
        }
    }
    let distal_mean = distal
        .mean()
        .ok_or(AnalysisError::InsufficientResolution { region: "distal" })?;
    let proximal_mean = proximal
        .mean()
        .ok_or(AnalysisError::InsufficientResolution { region: "proximal" })?;
    let opposite = distal_mean * proximal_mean < 0.0;
    Ok(RecurveReport {
        recurve: opposite
            && distal_mean.abs() >= config.min_distal_curvature_per_mm
            && proximal_mean.abs() >= config.min_proximal_curvature_per_mm,
        distal_mean_per_mm: distal_mean,
        proximal_mean_per_mm: proximal_mean,
    })
}

#[derive(Default)]
struct MeanAccumulator {
    sum: f64,
    count: usize,
}

impl MeanAccumulator {
    fn push(&mut self, value: f64) {
        self.sum += value;
        self.count += 1;
    }

    fn mean(&self) -> Option<f64> {
        (self.count > 0).then(|| self.sum / self.count as f64)
    }
}

/// Swim metrics for one crank cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleMetrics {
    pub start_time_s: f64,
    /// Cycle length as sampled: sample count times the sample interval, so
    /// the two stroke durations below sum to it exactly.
    pub period_s: f64,
    /// Body displacement over the cycle (vector, so per-cycle values
    /// telescope to the end-to-end displacement), mm.
    pub displacement_mm: Vector3<f64>,
    /// |displacement| / period, mm/s.
    pub average_speed_mm_s: f64,
    /// Largest sampled speed within the cycle, mm/s.
    pub peak_speed_mm_s: f64,
    pub power_duration_s: f64,
    pub recovery_duration_s: f64,
    /// True for the first detected cycle, which still carries the startup
    /// transient; exclude it from steady-state aggregates.
    pub startup: bool,
}

/// Splits a sampled swim into crank cycles and summarizes each.
///
/// Cycles are delimited by the left group's recovery-to-power transitions
/// (the moment all arms of the group begin their power stroke). A series
/// whose very first sample is already in the power stroke counts as starting
/// a cycle at t = 0 — the simulator's default initial crank angle does
/// exactly that. The first cycle is flagged as startup.
pub fn cycle_metrics(series: &TimeSeries) -> Result<Vec<CycleMetrics>, AnalysisError> {
    let rows = &series.rows;
    let dt = series.sample_interval_s;
    let mut starts = Vec::new();
    if rows.first().map(|r| r.phase_left) == Some(StrokePhase::Power) {
        starts.push(0);
    }
    for i in 1..rows.len() {
        if rows[i - 1].phase_left == StrokePhase::Recovery
            && rows[i].phase_left == StrokePhase::Power
        {
            starts.push(i);
        }
    }
    if starts.len() < 2 {
        return Err(AnalysisError::SeriesTooShort {
            starts: starts.len(),
        });
    }

    let mut metrics = Vec::with_capacity(starts.len() - 1);
    for (cycle, pair) in starts.windows(2).enumerate() {
        let (begin, end) = (pair[0], pair[1]);
        let samples = end - begin;
        let period_s = samples as f64 * dt;
        let displacement_mm = rows[end].position_mm - rows[begin].position_mm;
        let power_samples = rows[begin..end]
            .iter()
            .filter(|r| r.phase_left == StrokePhase::Power)
            .count();
        let peak_speed_mm_s = rows[begin..end]
            .iter()
            .map(|r| r.velocity_mm_s.norm())
            .fold(0.0, f64::max);
        metrics.push(CycleMetrics {
            start_time_s: rows[begin].time_s,
            period_s,
            displacement_mm,
            average_speed_mm_s: displacement_mm.norm() / period_s,
            peak_speed_mm_s,
            power_duration_s: power_samples as f64 * dt,
            recovery_duration_s: (samples - power_samples) as f64 * dt,
            startup: cycle == 0,
        });
    }
    Ok(metrics)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vehicle::SampleRow;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    fn circle_points(radius: f64, angles: &[f64]) -> Vec<Vector2<f64>> {
        angles
            .iter()
            .map(|a| Vector2::new(radius * a.cos(), radius * a.sin()))
            .collect()
    }

    #[test]
    fn circle_curvature_is_one_over_radius() {
        let angles: Vec<f64> = (0..20).map(|i| i as f64 * 0.22).collect();
        let profile = curvature_profile(&circle_points(100.0, &angles)).unwrap();
        for kappa in &profile.curvatures_per_mm {
            assert_abs_diff_eq!(*kappa, 0.01, epsilon = 1e-9);
        }
        // Opposite orientation flips the sign.
        let reversed: Vec<f64> = angles.iter().map(|a| -a).collect();
        let profile = curvature_profile(&circle_points(100.0, &reversed)).unwrap();
        for kappa in &profile.curvatures_per_mm {
            assert_abs_diff_eq!(*kappa, -0.01, epsilon = 1e-9);
        }
    }

    #[test]
    fn collinear_points_have_zero_curvature() {
        let points: Vec<_> = (0..8).map(|i| Vector2::new(3.0 * i as f64, 1.0)).collect();
        let profile = curvature_profile(&points).unwrap();
        assert!(profile.curvatures_per_mm.iter().all(|&k| k == 0.0));
        assert_relative_eq!(profile.arc_positions_mm[0], 3.0);
        assert_relative_eq!(*profile.arc_positions_mm.last().unwrap(), 18.0);
    }

    #[test]
    fn matches_analytic_curvature_of_a_smooth_graph() {
        // y = 0.2 sin x sampled at 31 points on a window where the analytic
        // curvature kappa = y'' / (1 + y'^2)^(3/2) stays away from zero.
        let points: Vec<_> = (0..31)
            .map(|i| {
                let x = 0.4 + 2.3 * i as f64 / 30.0;
                Vector2::new(x, 0.2 * x.sin())
            })
            .collect();
        let profile = curvature_profile(&points).unwrap();
        for (i, kappa) in profile.curvatures_per_mm.iter().enumerate() {
            let x = 0.4 + 2.3 * (i + 1) as f64 / 30.0;
            let analytic = -0.2 * x.sin() / (1.0 + (0.2 * x.cos()).powi(2)).powf(1.5);
            assert_relative_eq!(*kappa, analytic, max_relative = 0.02);
        }
    }

    #[test]
    fn degenerate_polylines_are_rejected() {
        assert_eq!(
            curvature_profile(&[Vector2::new(0.0, 0.0), Vector2::new(1.0, 0.0)]),
            Err(AnalysisError::TooFewPoints(2))
        );
        let repeated = [
            Vector2::new(0.0, 0.0),
            Vector2::new(1.0, 0.0),
            Vector2::new(1.0, 0.0),
            Vector2::new(2.0, 0.0),
        ];
        assert!(matches!(
            curvature_profile(&repeated),
            Err(AnalysisError::DegenerateGeometry { .. })
        ));
        // Fold-back: third point returns onto the first.
        let folded = [
            Vector2::new(0.0, 0.0),
            Vector2::new(1.0, 0.0),
            Vector2::new(0.0, 0.0),
        ];
        assert!(matches!(
            curvature_profile(&folded),
            Err(AnalysisError::DegenerateGeometry { vertex: 1 })
        ));
    }

    #[test]
    fn max_curvature_ties_break_toward_the_tip() {
        // Straight frame: every curvature is 0, peak reports the last
        // interior vertex.
        let straight: Vec<_> = (0..11).map(|i| Vector2::new(0.0, -30.0 * i as f64)).collect();
        let peaks = max_curvature_trace(std::slice::from_ref(&straight)).unwrap();
        assert_eq!(peaks[0].curvature_per_mm, 0.0);
        assert_relative_eq!(peaks[0].arc_position_mm, 270.0);

        // A single bend at the first interior vertex (arc 30 mm) wins.
        let mut bent = vec![Vector2::new(0.0, 0.0), Vector2::new(0.0, -30.0)];
        let dir = Vector2::new(0.4f64.sin(), -(0.4f64.cos()));
        for i in 1..=9 {
            bent.push(Vector2::new(0.0, -30.0) + 30.0 * i as f64 * dir);
        }
        let peaks = max_curvature_trace(std::slice::from_ref(&bent)).unwrap();
        assert_relative_eq!(peaks[0].arc_position_mm, 30.0);
        assert!(peaks[0].curvature_per_mm.abs() > 1e-3);
    }

    /// Walks a polyline with prescribed per-vertex turning, mimicking an arm
    /// midline of given segment length.
    fn walk(turns: &[f64], step: f64) -> Vec<Vector2<f64>> {
        let mut heading = -std::f64::consts::FRAC_PI_2; // straight down
        let mut p = Vector2::zeros();
        let mut points = vec![p];
        for turn in turns {
            heading += turn;
            p += step * Vector2::new(heading.cos(), heading.sin());
            points.push(p);
        }
        points
    }

    #[test]
    fn s_shaped_midline_is_a_recurve() {
        // Ten 30 mm segments: proximal arc turning one way at 5e-3 /mm,
        // distal arc turning the other way at the same rate.
        let turns: Vec<f64> = (0..10)
            .map(|i| if i < 6 { 0.15 } else { -0.15 })
            .collect();
        let frame = walk(&turns, 30.0);
        let report = detect_recurve(&frame, &RecurveConfig::default()).unwrap();
        assert!(report.recurve);
        assert!(report.distal_mean_per_mm * report.proximal_mean_per_mm < 0.0);
        assert!(report.distal_mean_per_mm.abs() >= 1e-3);
    }

    #[test]
    fn straight_and_single_arc_midlines_are_not_recurves() {
        let straight = walk(&[0.0; 10], 30.0);
        assert!(!detect_recurve(&straight, &RecurveConfig::default()).unwrap().recurve);
        // Uniform arc: strong curvature but no sign reversal.
        let arc = walk(&[0.09; 10], 30.0);
        assert!(!detect_recurve(&arc, &RecurveConfig::default()).unwrap().recurve);
        // Sign reversal but distal bend below the threshold.
        let turns: Vec<f64> = (0..10)
            .map(|i| if i < 6 { 0.15 } else { -0.02 })
            .collect();
        let faint = detect_recurve(&walk(&turns, 30.0), &RecurveConfig::default()).unwrap();
        assert!(!faint.recurve);
        assert!(faint.distal_mean_per_mm * faint.proximal_mean_per_mm < 0.0);
    }

    fn synthetic_series(
        dt: f64,
        velocity: impl Fn(f64) -> Vector3<f64>,
        phase: impl Fn(usize) -> StrokePhase,
        n: usize,
    ) -> TimeSeries {
        let mut rows = Vec::with_capacity(n);
        let mut position = Vector3::zeros();
        for i in 0..n {
            let t = i as f64 * dt;
            let v = velocity(t);
            rows.push(SampleRow {
                time_s: t,
                position_mm: position,
                velocity_mm_s: v,
                heading_rad: 0.0,
                root_angle_left_rad: 0.0,
                root_angle_right_rad: 0.0,
                crank_torque_left_nmm: 0.0,
                crank_torque_right_nmm: 0.0,
                phase_left: phase(i),
                phase_right: phase(i),
            });
            position += dt * v;
        }
        TimeSeries {
            sample_interval_s: dt,
            rows,
        }
    }

    #[test]
    fn constant_velocity_series_gives_textbook_metrics() {
        let dt = 1e-3;
        let series = synthetic_series(
            dt,
            |_| Vector3::new(0.0, 0.0, 50.0),
            |i| {
                if i % 1000 < 550 {
                    StrokePhase::Power
                } else {
                    StrokePhase::Recovery
                }
            },
            3201,
        );
        let metrics = cycle_metrics(&series).unwrap();
        assert_eq!(metrics.len(), 3);
        assert!(metrics[0].startup && !metrics[1].startup);
        for m in &metrics {
            assert_relative_eq!(m.period_s, 1.0, max_relative = 1e-12);
            assert_relative_eq!(m.displacement_mm.z, 50.0, max_relative = 1e-9);
            assert_relative_eq!(m.average_speed_mm_s, 50.0, max_relative = 1e-9);
            assert_relative_eq!(m.peak_speed_mm_s, 50.0, max_relative = 1e-12);
            assert_relative_eq!(m.power_duration_s, 0.55, max_relative = 1e-12);
            assert_relative_eq!(m.recovery_duration_s, 0.45, max_relative = 1e-12);
            assert_relative_eq!(m.power_duration_s + m.recovery_duration_s, m.period_s);
        }
    }

    #[test]
    fn zero_motion_series_gives_zero_metrics() {
        let series = synthetic_series(
            1e-3,
            |_| Vector3::zeros(),
            |i| {
                if i % 100 < 50 {
                    StrokePhase::Power
                } else {
                    StrokePhase::Recovery
                }
            },
            301,
        );
        for m in cycle_metrics(&series).unwrap() {
            assert_eq!(m.displacement_mm, Vector3::zeros());
            assert_eq!(m.average_speed_mm_s, 0.0);
            assert_eq!(m.peak_speed_mm_s, 0.0);
        }
    }

    #[test]
    fn per_cycle_displacements_telescope() {
        let dt = 1e-3;
        let series = synthetic_series(
            dt,
            |t| Vector3::new(20.0 * (3.0 * t).sin(), -5.0, 80.0 * (t).cos()),
            |i| {
                if i % 700 < 300 {
                    StrokePhase::Power
                } else {
                    StrokePhase::Recovery
                }
            },
            3000,
        );
        let metrics = cycle_metrics(&series).unwrap();
        assert!(metrics.len() >= 3);
        let total: Vector3<f64> = metrics.iter().map(|m| m.displacement_mm).sum();
        // Boundaries of the whole-cycle span.
        let first = 0;
        let last = first + metrics.iter().map(|m| (m.period_s / dt).round() as usize).sum::<usize>();
        let direct = series.rows[last].position_mm - series.rows[first].position_mm;
        assert!((total - direct).norm() <= 1e-9);
    }

    #[test]
    fn too_short_series_is_reported() {
        let series = synthetic_series(1e-3, |_| Vector3::zeros(), |_| StrokePhase::Power, 50);
        assert_eq!(
            cycle_metrics(&series),
            Err(AnalysisError::SeriesTooShort { starts: 1 })
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn circle_curvature_exact_at_uneven_spacing(
            mut angles in proptest::collection::vec(0.0f64..5.0, 6..24),
            radius in 5.0f64..500.0,
        ) {
            angles.sort_by(f64::total_cmp);
            angles.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
            prop_assume!(angles.len() >= 4);
            let profile = curvature_profile(&circle_points(radius, &angles)).unwrap();
            for kappa in profile.curvatures_per_mm {
                prop_assert!((kappa - 1.0 / radius).abs() <= 1e-9);
            }
        }

        #[test]
        fn recurve_detection_is_rigid_motion_invariant(
            rotation in -3.14f64..3.14,
            tx in -500.0f64..500.0,
            ty in -500.0f64..500.0,
            seed_turns in proptest::collection::vec(-0.12f64..0.12, 10),
        ) {
            let frame = walk(&seed_turns, 30.0);
            let (s, c) = rotation.sin_cos();
            let moved: Vec<_> = frame
                .iter()
                .map(|p| Vector2::new(c * p.x - s * p.y + tx, s * p.x + c * p.y + ty))
                .collect();
            // Window fractions chosen so no vertex of the equal-step walk
            // lands exactly on a window boundary, where one-ulp arc-length
            // jitter could legitimately flip its membership.
            let cfg = RecurveConfig {
                distal_fraction: 0.23,
                proximal_fraction: 0.37,
                ..RecurveConfig::default()
            };
            let a = detect_recurve(&frame, &cfg).unwrap();
            let b = detect_recurve(&moved, &cfg).unwrap();
            prop_assert_eq!(a.recurve, b.recurve);
            prop_assert!((a.distal_mean_per_mm - b.distal_mean_per_mm).abs() <= 1e-12);
            prop_assert!((a.proximal_mean_per_mm - b.proximal_mean_per_mm).abs() <= 1e-12);
        }
    }
}

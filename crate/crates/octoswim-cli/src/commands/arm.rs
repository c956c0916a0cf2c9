//! `arm` — single-arm bench rig: captures midline snapshots over the
//! configured run, writes them in long format (`arm_frames.csv`, one row
//! per midline point), and reports the early-recovery recurve fraction.

use octoswim::{detect_recurve, simulate_single_arm, ArmRigFrame, RecurveConfig};

use super::{artifact_path, write_effective_config, write_text};
use crate::config::{self, Scenario};
use crate::csvfmt::{float_cell, line, push_line};
use crate::{CliError, RunArgs};

/// Early-recovery recurve counts over the settled cycles (the first
/// revolution still carries the startup transient and is excluded).
pub struct RecurveStats {
    pub early_frames: usize,
    pub recurve_frames: usize,
}

impl RecurveStats {
    pub fn fraction(&self) -> f64 {
        if self.early_frames == 0 {
            0.0
        } else {
            self.recurve_frames as f64 / self.early_frames as f64
        }
    }
}

/// Scores every settled early-recovery frame with the default recurve
/// test. Shared with the sweep, which reports the same statistics per
/// grid cell.
pub fn recurve_stats(frames: &[ArmRigFrame]) -> Result<RecurveStats, CliError> {
    let config = RecurveConfig::default();
    let mut stats = RecurveStats {
        early_frames: 0,
        recurve_frames: 0,
    };
    for frame in frames {
        if !(frame.early_recovery && frame.cycle_index >= 1) {
            continue;
        }
        stats.early_frames += 1;
        let report = detect_recurve(&frame.midline_mm, &config)
            .map_err(|err| CliError::runtime(format!("midline analysis failed: {err}")))?;
        if report.recurve {
            stats.recurve_frames += 1;
        }
    }
    Ok(stats)
}

pub fn run(args: &RunArgs) -> Result<(), CliError> {
    let loaded = config::load(args.config.as_deref())?;
    let (resolved, canonical) = config::resolve(&loaded, Scenario::Arm)?;
    write_effective_config(&args.out, &canonical)?;

    let run = &resolved.run;
    let frames = simulate_single_arm(
        &resolved.robot,
        run.duration_s,
        run.dt_s,
        run.frames_per_cycle,
    )?;

    let recurve_config = RecurveConfig::default();
    let mut csv = String::new();
    push_line(
        &mut csv,
        "frame,time_s,cycle,phase,early_recovery,recurve,point,x_mm,y_mm",
    );
    for (index, frame) in frames.iter().enumerate() {
        let recurve = detect_recurve(&frame.midline_mm, &recurve_config)
            .map_err(|err| CliError::runtime(format!("midline analysis failed: {err}")))?
            .recurve;
        for (point, p) in frame.midline_mm.iter().enumerate() {
            push_line(
                &mut csv,
                &line(&[
                    index.to_string(),
                    float_cell(frame.time_s),
                    frame.cycle_index.to_string(),
                    frame.phase.label().to_string(),
                    frame.early_recovery.to_string(),
                    recurve.to_string(),
                    point.to_string(),
                    float_cell(p.x),
                    float_cell(p.y),
                ]),
            );
        }
    }
    write_text(&artifact_path(&args.out, "arm_frames.csv")?, &csv)?;

    let stats = recurve_stats(&frames)?;
    println!(
        "arm rig: {} frames captured, {} early-recovery frames in settled cycles",
        frames.len(),
        stats.early_frames
    );
    println!(
        "recurve fired on {} of {} early-recovery frames (fraction {})",
        stats.recurve_frames,
        stats.early_frames,
        float_cell(stats.fraction())
    );
    Ok(())
}

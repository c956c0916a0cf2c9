//! `sweep` — runs the cross product of mechanism presets, incision
//! depths, and motor speeds, one full swim plus one bench-rig capture per
//! cell, and tabulates per-cell steady metrics and recurve statistics.
//!
//! Cells run concurrently up to `--jobs`, but the table rows come out in
//! sorted grid order regardless, and a failing cell only fills its own
//! `error` column — the sweep always completes.

use octoswim::{build_arm, simulate, simulate_single_arm, RobotConfig};
use rayon::prelude::*;

use super::arm::{recurve_stats, RecurveStats};
use super::{artifact_path, metrics, write_effective_config, write_text};
use crate::config::{self, preset_geometry, Resolved, Scenario};
use crate::csvfmt::{float_cell, line, push_line, text_cell};
use crate::{CliError, SweepArgs};

#[derive(Clone)]
struct Cell {
    label: String,
    depth: f64,
    rpm: f64,
}

struct CellData {
    aggregates: metrics::Aggregates,
    recurve: RecurveStats,
}

pub fn run(args: &SweepArgs) -> Result<(), CliError> {
    if args.jobs == 0 {
        return Err(CliError::usage("--jobs must be at least 1"));
    }
    let loaded = config::load(args.run.config.as_deref())?;
    let (resolved, canonical) = config::resolve(&loaded, Scenario::Sweep)?;
    write_effective_config(&args.run.out, &canonical)?;

    let grid = resolved.sweep.as_ref().expect("sweep scenario has a grid");
    let mut labels = grid.presets.clone();
    labels.sort();
    let mut depths = grid.depths.clone();
    depths.sort_by(f64::total_cmp);
    let mut rpms = grid.rpms.clone();
    rpms.sort_by(f64::total_cmp);

    let mut cells = Vec::new();
    for label in &labels {
        for &depth in &depths {
            for &rpm in &rpms {
                cells.push(Cell {
                    label: label.clone(),
                    depth,
                    rpm,
                });
            }
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .map_err(|err| CliError::runtime(format!("cannot start worker pool: {err}")))?;
    let results: Vec<Result<CellData, CliError>> =
        pool.install(|| cells.par_iter().map(|cell| run_cell(&resolved, cell)).collect());

    let mut csv = String::new();
    push_line(
        &mut csv,
        "preset,depth,rpm,cycles_steady,steady_mean_speed_mm_s,steady_peak_speed_mm_s,steady_mean_dz_mm,recurve_fraction,recurve_frames,early_frames,error",
    );
    let mut failures = 0;
    for (cell, result) in cells.iter().zip(&results) {
        let mut fields = vec![
            text_cell(&cell.label),
            float_cell(cell.depth),
            float_cell(cell.rpm),
        ];
        match result {
            Ok(data) => {
                fields.extend([
                    data.aggregates.cycles_steady.to_string(),
                    float_cell(data.aggregates.steady_mean_speed_mm_s),
                    float_cell(data.aggregates.steady_peak_speed_mm_s),
                    float_cell(data.aggregates.steady_mean_dz_mm),
                    float_cell(data.recurve.fraction()),
                    data.recurve.recurve_frames.to_string(),
                    data.recurve.early_frames.to_string(),
                    String::new(),
                ]);
            }
            Err(err) => {
                failures += 1;
                fields.extend(std::iter::repeat(String::new()).take(7));
                fields.push(text_cell(&err.to_string()));
            }
        }
        push_line(&mut csv, &line(&fields));
    }
    write_text(&artifact_path(&args.run.out, "sweep.csv")?, &csv)?;

    println!(
        "sweep: {} cells on {} worker(s), {} failed",
        cells.len(),
        args.jobs,
        failures
    );
    Ok(())
}

/// Runs one grid cell in isolation: same scenario, with the cell's
/// mechanism on both sides, its incision depth, and its motor speed.
fn run_cell(resolved: &Resolved, cell: &Cell) -> Result<CellData, CliError> {
    let geometry = preset_geometry(&cell.label)?;
    let mut arm_geometry = resolved.arm.geometry();
    arm_geometry.incision_depth = cell.depth;
    let arm_model = build_arm(&arm_geometry, &resolved.material.material())
        .map_err(|err| CliError::usage(format!("arm: {err}")))?;
    let profile = octoswim::MotorProfile::constant(cell.rpm);
    let robot = RobotConfig {
        mechanism_left: geometry,
        mechanism_right: geometry,
        arm_model,
        motor_profile_left: profile.clone(),
        motor_profile_right: profile,
        ..resolved.robot.clone()
    };

    let run = &resolved.run;
    let series = simulate(&robot, run.duration_s, run.dt_s, run.sample_interval_s)?;
    let (_, aggregates) = metrics::summarize(&series)?;
    let frames = simulate_single_arm(&robot, run.duration_s, run.dt_s, run.frames_per_cycle)?;
    let recurve = recurve_stats(&frames)?;
    Ok(CellData {
        aggregates,
        recurve,
    })
}

//! `swim` — straight vertical swimming. Also hosts the shared driver the
//! `steer` subcommand reuses: the two runs differ only in scenario kind
//! and simulation entry point, not in artifacts.

use octoswim::{simulate, simulate_steering, TimeSeries};

use super::{artifact_path, metrics, write_effective_config, write_text};
use crate::config::{self, Scenario};
use crate::csvfmt::{float_cell, line, push_line};
use crate::{CliError, RunArgs};

pub fn run(args: &RunArgs) -> Result<(), CliError> {
    run_swim_like(args, Scenario::Swim)
}

/// Loads the scenario, runs it, and writes `effective_config.toml`, the
/// trajectory CSV, and `metrics.txt` into the output directory.
pub fn run_swim_like(args: &RunArgs, scenario: Scenario) -> Result<(), CliError> {
    let loaded = config::load(args.config.as_deref())?;
    let (resolved, canonical) = config::resolve(&loaded, scenario)?;
    write_effective_config(&args.out, &canonical)?;

    let run = &resolved.run;
    let series = match scenario {
        Scenario::Steer => simulate_steering(
            &resolved.robot,
            run.duration_s,
            run.dt_s,
            run.sample_interval_s,
        )?,
        _ => simulate(
            &resolved.robot,
            run.duration_s,
            run.dt_s,
            run.sample_interval_s,
        )?,
    };

    let csv_name = format!("{scenario}.csv");
    write_text(
        &artifact_path(&args.out, &csv_name)?,
        &trajectory_csv(&series),
    )?;

    let (cycles, aggregates) = metrics::summarize(&series)?;
    write_text(
        &artifact_path(&args.out, "metrics.txt")?,
        &metrics::render_report(&cycles, &aggregates),
    )?;

    println!(
        "{scenario}: {} samples over {} s, {} cycles ({} steady)",
        series.rows.len(),
        run.duration_s,
        aggregates.cycles_total,
        aggregates.cycles_steady,
    );
    println!(
        "steady mean speed {} mm/s, steady mean rise {} mm/cycle",
        float_cell(aggregates.steady_mean_speed_mm_s),
        float_cell(aggregates.steady_mean_dz_mm),
    );
    Ok(())
}

/// Renders a sampled trajectory with one row per sample. Speed is the
/// velocity magnitude; the per-axis components are recoverable from the
/// position columns.
pub fn trajectory_csv(series: &TimeSeries) -> String {
    let mut out = String::new();
    push_line(
        &mut out,
        "time_s,pos_x_mm,pos_y_mm,pos_z_mm,vel_mm_s,heading_rad,phase_left,phase_right",
    );
    for row in &series.rows {
        push_line(
            &mut out,
            &line(&[
                float_cell(row.time_s),
                float_cell(row.position_mm.x),
                float_cell(row.position_mm.y),
                float_cell(row.position_mm.z),
                float_cell(row.velocity_mm_s.norm()),
                float_cell(row.heading_rad),
                row.phase_left.label().to_string(),
                row.phase_right.label().to_string(),
            ]),
        );
    }
    out
}

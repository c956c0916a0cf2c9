//! `mech` — slider kinematics of the configured left mechanism over one
//! crank revolution: dead-center summary and stroke timing on stdout,
//! plus a 720-row table (`mech.csv`) sampled every half degree.

use octoswim::{slider_position, slider_velocity, stroke_characteristics, stroke_phase, stroke_timing};

use super::{artifact_path, write_effective_config, write_text};
use crate::config::{self, Scenario};
use crate::csvfmt::{float_cell, line, push_line};
use crate::{CliError, RunArgs};

/// The crank spins clockwise (negative angle rate); evaluating slopes and
/// phases at a unit clockwise rate gives per-radian-of-travel values.
const TRAVEL_RATE: f64 = -1.0;

pub fn run(args: &RunArgs) -> Result<(), CliError> {
    let loaded = config::load(args.config.as_deref())?;
    let (resolved, canonical) = config::resolve(&loaded, Scenario::Mech)?;
    write_effective_config(&args.out, &canonical)?;

    let geom = resolved.robot.mechanism_left;
    let c = stroke_characteristics(&geom);
    println!(
        "mechanism: crank {} mm, coupler {} mm, offset {} mm",
        geom.crank_a, geom.coupler_b, geom.offset_e
    );
    println!(
        "slider range [{:.4}, {:.4}] mm, stroke {:.4} mm",
        geom.slider_min(),
        geom.slider_max(),
        geom.stroke_length()
    );
    println!(
        "polar angle {:.4} deg, recovery arc {:.4} deg, power arc {:.4} deg, travel ratio {:.6}",
        c.theta_deg, c.recovery_arc_deg, c.power_arc_deg, c.travel_ratio_k
    );
    let rpm = resolved.robot.motor_profile_left.rpm_at(0.0);
    if rpm > 0.0 {
        let timing = stroke_timing(&geom, rpm);
        println!(
            "at {rpm} rpm: period {:.6} s, recovery {:.6} s, power {:.6} s",
            timing.period_s, timing.t_recovery_s, timing.t_power_s
        );
    } else {
        println!("motor stopped (0 rpm): no stroke timing");
    }

    let mut csv = String::new();
    push_line(&mut csv, "phi_deg,slider_mm,dslider_mm_per_rad,phase");
    for i in 0..720 {
        let phi_deg = i as f64 * 0.5;
        let phi = phi_deg.to_radians();
        push_line(
            &mut csv,
            &line(&[
                float_cell(phi_deg),
                float_cell(slider_position(&geom, phi)),
                float_cell(slider_velocity(&geom, phi, TRAVEL_RATE)),
                stroke_phase(&geom, phi, TRAVEL_RATE).label().to_string(),
            ]),
        );
    }
    write_text(&artifact_path(&args.out, "mech.csv")?, &csv)?;
    Ok(())
}

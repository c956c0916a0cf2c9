//! `design` — crank-slider dimensioning. Synthesizes a coupler length
//! for a requested travel ratio and/or tabulates the catalogued builds,
//! printing a human-readable table and writing `design.csv`.

use octoswim::{
    design_presets, stroke_characteristics, synthesize_linkage, MechanismGeometry,
};

use super::{artifact_path, write_text};
use crate::csvfmt::{float_cell, line, push_line, text_cell};
use crate::{CliError, DesignArgs};

struct DesignRow {
    label: String,
    geometry: MechanismGeometry,
    /// True when the achieved travel ratio misses the row's nominal value
    /// by more than 1%.
    off_label: bool,
}

pub fn run(args: &DesignArgs) -> Result<(), CliError> {
    if args.target_k.is_none() && !args.presets {
        return Err(CliError::usage(
            "design needs --target-k and/or --presets (nothing to tabulate otherwise)",
        ));
    }

    let mut rows = Vec::new();
    if args.presets {
        for preset in design_presets() {
            rows.push(DesignRow {
                label: preset.label.to_string(),
                geometry: preset.geometry,
                off_label: preset.misses_label(),
            });
        }
    }
    if let Some(target) = args.target_k {
        let geometry = synthesize_linkage(target, args.offset_e, args.crank_a)?;
        let achieved = stroke_characteristics(&geometry).travel_ratio_k;
        rows.push(DesignRow {
            label: format!("target {target}"),
            geometry,
            off_label: (achieved - target).abs() / target > 0.01,
        });
    }

    println!(
        "{:<12} {:>9} {:>9} {:>9} {:>9} {:>8} {:>9} {:>9} {:>9} {:>9}  {}",
        "label", "crank_mm", "coupler", "offset", "theta_deg", "K", "s_min_mm", "s_max_mm",
        "stroke", "margin", "off-label"
    );
    for row in &rows {
        let g = &row.geometry;
        let c = stroke_characteristics(g);
        println!(
            "{:<12} {:>9.3} {:>9.3} {:>9.3} {:>9.4} {:>8.4} {:>9.3} {:>9.3} {:>9.3} {:>9.3}  {}",
            row.label,
            g.crank_a,
            g.coupler_b,
            g.offset_e,
            c.theta_deg,
            c.travel_ratio_k,
            g.slider_min(),
            g.slider_max(),
            g.stroke_length(),
            rotation_margin(g),
            if row.off_label { "yes" } else { "no" },
        );
    }

    write_text(&artifact_path(&args.out, "design.csv")?, &design_csv(&rows))?;
    Ok(())
}

/// Clearance between the coupler and the longest reach it must span;
/// positive means the crank can rotate fully.
fn rotation_margin(g: &MechanismGeometry) -> f64 {
    g.coupler_b - g.crank_a - g.offset_e
}

fn design_csv(rows: &[DesignRow]) -> String {
    let mut out = String::new();
    push_line(
        &mut out,
        "label,crank_a_mm,coupler_b_mm,offset_e_mm,theta_deg,travel_ratio,s_min_mm,s_max_mm,stroke_mm,margin_mm,off_label",
    );
    for row in rows {
        let g = &row.geometry;
        let c = stroke_characteristics(g);
        push_line(
            &mut out,
            &line(&[
                text_cell(&row.label),
                float_cell(g.crank_a),
                float_cell(g.coupler_b),
                float_cell(g.offset_e),
                float_cell(c.theta_deg),
                float_cell(c.travel_ratio_k),
                float_cell(g.slider_min()),
                float_cell(g.slider_max()),
                float_cell(g.stroke_length()),
                float_cell(rotation_margin(g)),
                row.off_label.to_string(),
            ]),
        );
    }
    out
}

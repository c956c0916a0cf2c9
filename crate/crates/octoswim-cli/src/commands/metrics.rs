//! Per-cycle swim metrics and their steady-state aggregates, rendered
//! identically wherever they appear (the swim/steer report and the sweep
//! table share these strings, so a one-cell sweep matches a plain run
//! character for character).

use octoswim::{cycle_metrics, AnalysisError, CycleMetrics, TimeSeries};

use crate::csvfmt::{float_cell, line, push_line};
use crate::CliError;

/// Steady-state summary of a swim: aggregates over the cycles past the
/// startup transient.
pub struct Aggregates {
    pub cycles_total: usize,
    pub cycles_steady: usize,
    pub steady_mean_speed_mm_s: f64,
    pub steady_peak_speed_mm_s: f64,
    pub steady_mean_dz_mm: f64,
}

/// Splits a sampled swim into crank cycles and aggregates the steady
/// ones. A series without two power-stroke starts (for example at zero
/// motor speed) has no cycles: it reports zero counts and zero
/// aggregates rather than failing.
pub fn summarize(series: &TimeSeries) -> Result<(Vec<CycleMetrics>, Aggregates), CliError> {
    let cycles = match cycle_metrics(series) {
        Ok(cycles) => cycles,
        Err(AnalysisError::SeriesTooShort { .. }) => Vec::new(),
        Err(err) => return Err(CliError::runtime(err.to_string())),
    };
    let steady: Vec<&CycleMetrics> = cycles.iter().filter(|c| !c.startup).collect();
    let n = steady.len();
    let mean = |f: &dyn Fn(&CycleMetrics) -> f64| {
        if n == 0 {
            0.0
        } else {
            steady.iter().map(|c| f(c)).sum::<f64>() / n as f64
        }
    };
    let aggregates = Aggregates {
        cycles_total: cycles.len(),
        cycles_steady: n,
        steady_mean_speed_mm_s: mean(&|c| c.average_speed_mm_s),
        steady_peak_speed_mm_s: steady
            .iter()
            .map(|c| c.peak_speed_mm_s)
            .fold(0.0, f64::max),
        steady_mean_dz_mm: mean(&|c| c.displacement_mm.z),
    };
    Ok((cycles, aggregates))
}

/// Renders the `metrics.txt` report: counts, a per-cycle table, and the
/// steady aggregates as `key=value` lines.
pub fn render_report(cycles: &[CycleMetrics], agg: &Aggregates) -> String {
    let mut out = String::new();
    push_line(&mut out, &format!("cycles_total={}", agg.cycles_total));
    push_line(&mut out, &format!("cycles_steady={}", agg.cycles_steady));
    push_line(
        &mut out,
        &line(&[
            "cycle".into(),
            "start_time_s".into(),
            "period_s".into(),
            "dx_mm".into(),
            "dy_mm".into(),
            "dz_mm".into(),
            "mean_speed_mm_s".into(),
            "peak_speed_mm_s".into(),
            "power_s".into(),
            "recovery_s".into(),
            "startup".into(),
        ]),
    );
    for (i, c) in cycles.iter().enumerate() {
        push_line(
            &mut out,
            &line(&[
                i.to_string(),
                float_cell(c.start_time_s),
                float_cell(c.period_s),
                float_cell(c.displacement_mm.x),
                float_cell(c.displacement_mm.y),
                float_cell(c.displacement_mm.z),
                float_cell(c.average_speed_mm_s),
                float_cell(c.peak_speed_mm_s),
                float_cell(c.power_duration_s),
                float_cell(c.recovery_duration_s),
                c.startup.to_string(),
            ]),
        );
    }
    push_line(
        &mut out,
        &format!(
            "steady_mean_speed_mm_s={}",
            float_cell(agg.steady_mean_speed_mm_s)
        ),
    );
    push_line(
        &mut out,
        &format!(
            "steady_peak_speed_mm_s={}",
            float_cell(agg.steady_peak_speed_mm_s)
        ),
    );
    push_line(
        &mut out,
        &format!("steady_mean_dz_mm={}", float_cell(agg.steady_mean_dz_mm)),
    );
    out
}

//! Byte-stable text formatting for CSV artifacts.
//!
//! Every float is written as `{:.16e}` — 17 significant digits, enough to
//! reconstruct the exact f64 — with negative zero normalized so reruns of
//! the same scenario produce byte-identical files on any platform. Lines
//! always end in a bare `\n`.

/// Formats one float for a CSV cell.
pub fn float_cell(x: f64) -> String {
    // `x + 0.0` maps -0.0 to +0.0 and leaves every other value (including
    // NaN payloads produced by arithmetic) untouched.
    format!("{:.16e}", x + 0.0)
}

/// Quotes a string cell if it contains a delimiter, quote, or newline.
pub fn text_cell(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Joins cells into one CSV line (caller appends it with `push_line`).
pub fn line(cells: &[String]) -> String {
    cells.join(",")
}

/// Appends `line` plus a LF to `out`.
pub fn push_line(out: &mut String, line: &str) {
    out.push_str(line);
    out.push('\n');
}

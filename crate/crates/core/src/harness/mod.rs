mod output;
mod run;
mod spec;
mod summary;

pub use output::{
    emit_csv, emit_plot_data, plot_table, read_records, write_records, write_summaries, PlotMode, RECORD_COLUMNS,
    SUMMARY_COLUMNS,
};
pub use run::{artifact_dir, membership_path, run_sweep, Flag, RunRecord, SkippedCell, SweepOutcome};
pub use spec::{Cell, MuGrid, SweepSpec};
pub use summary::{correlate, summarize, AlgorithmCorrelation, CellSummary, Correlation, Parameter};

/// Formats with 6 significant digits, dropping trailing zeros.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}").to_lowercase();
    }
    let exp = x.abs().log10().floor() as i32;
    // rounding can carry into the next decade (999999.5 -> 1e6)
    let exp = {
        let rounded: f64 = format!("{:.5e}", x).parse().unwrap_or(x);
        if rounded.abs() >= 10f64.powi(exp + 1) {
            exp + 1
        } else {
            exp
        }
    };
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let s = format!("{x:.5e}");
        let (mantissa, e) = s.split_once('e').unwrap_or((&s, "0"));
        let mantissa = if mantissa.contains('.') {
            mantissa.trim_end_matches('0').trim_end_matches('.')
        } else {
            mantissa
        };
        format!("{mantissa}e{e}")
    }
}

use std::io::Write;

use csv::{Terminator, WriterBuilder};
use entroflux_core::ThermoReport;

use crate::scenario::{Output, Scenario};
use crate::sweep::ResultRow;

/// Round-trip exact: 17 significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn value_of(report: &ThermoReport, o: Output) -> Option<f64> {
    Some(match o {
        Output::PiS => report.pi_s,
        Output::MuA => report.mu_a,
        Output::MuC => report.mu_c,
        Output::MutualInfo => report.mutual_info,
        Output::LogNeg => report.log_neg,
        Output::NuMinus => report.nu_minus,
        Output::NAS => report.n_a_s,
        Output::NCS => report.n_c_s,
        Output::Stable | Output::Physical => return None,
    })
}

fn cell(row: &ResultRow, o: Output) -> String {
    let flag = |b: Option<bool>| b.map(|b| b.to_string()).unwrap_or_default();
    match o {
        Output::Stable => flag(row.stable()),
        Output::Physical => flag(row.report().map(|r| r.physical)),
        _ => row
            .report()
            .and_then(|r| value_of(r, o))
            .map(format_float)
            .unwrap_or_default(),
    }
}

/// Writes the sweep as CSV: sweep variable first, then the output columns.
pub fn emit_csv<W: Write>(s: &Scenario, rows: &[ResultRow], dest: W) -> csv::Result<()> {
    let mut w = WriterBuilder::new().terminator(Terminator::Any(b'\n')).from_writer(dest);
    let mut header = vec![s.sweep.var.name().to_string()];
    header.extend(s.outputs.iter().map(|o| o.name().to_string()));
    w.write_record(&header)?;
    for row in rows {
        let mut record = vec![format_float(row.x)];
        record.extend(s.outputs.iter().map(|&o| cell(row, o)));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

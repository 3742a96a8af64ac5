use std::io::{Read, Write};

use super::DiagnosticsRecord;
use crate::error::{Error, Result};

/// Header row of the diagnostics CSV, in column order.
pub const CSV_COLUMNS: [&str; 39] = [
    "time",
    "kinetic",
    "internal",
    "cold",
    "hyper",
    "poisson_signed",
    "total",
    "visc",
    "drag0",
    "drag1",
    "hypervisc",
    "press_diff",
    "cold_diff",
    "biharm",
    "press_defect",
    "energy_source",
    "bd_core",
    "log_term",
    "ent_lap",
    "ent_log",
    "ent_cold",
    "ent_visc",
    "ent_press",
    "ent_hyper",
    "ent_source",
    "picard_iterations",
    "min_rho",
    "max_rho",
    "step",
    "mass",
    "divu_linf_integral",
    "cold_time_integral",
    "grad_rho_gamma_half_sq_integral",
    "sqrt_rho_grad_u_sq_integral",
    "rho_u_cubed_integral",
    "rho_l1",
    "rho_lgamma",
    "sqrt_rho_u_l2",
    "grad_sqrt_rho_l2",
];

pub fn write_diagnostics_csv<W: Write>(records: &[DiagnosticsRecord], writer: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    w.write_record(CSV_COLUMNS)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_diagnostics_csv<R: Read>(reader: R) -> Result<Vec<DiagnosticsRecord>> {
    let mut r = csv::Reader::from_reader(reader);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != CSV_COLUMNS {
        return Err(Error::InvalidParams("diagnostics CSV header does not match the schema".into()));
    }
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

//! CSV writers for trajectories and spectral reports. Numbers are printed
//! with the shortest round-tripping representation, so identical runs give
//! identical files.

use std::io::Write;

use super::cartesian::SpectralLine;
use super::{StepRecord, WaveError};

fn csv_err(e: csv::Error) -> WaveError {
    WaveError::Io(e.to_string())
}

pub fn write_trajectory_csv(w: impl Write, records: &[StepRecord]) -> Result<(), WaveError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["step", "time", "energy", "weighted_norm", "support_radius"]).map_err(csv_err)?;
    for r in records {
        out.write_record([
            r.step.to_string(),
            r.time.to_string(),
            r.energy.to_string(),
            r.weighted_norm.to_string(),
            r.support_radius.to_string(),
        ])
        .map_err(csv_err)?;
    }
    out.flush().map_err(|e| WaveError::Io(e.to_string()))
}

pub fn write_spectral_csv(w: impl Write, lines: &[SpectralLine]) -> Result<(), WaveError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["k1", "k2", "k3", "freq_numeric", "freq_analytic", "rel_error", "branch"]).map_err(csv_err)?;
    for l in lines {
        out.write_record([
            l.k[0].to_string(),
            l.k[1].to_string(),
            l.k[2].to_string(),
            l.freq_numeric.to_string(),
            l.freq_analytic.to_string(),
            l.rel_error.to_string(),
            l.branch.label().to_string(),
        ])
        .map_err(csv_err)?;
    }
    out.flush().map_err(|e| WaveError::Io(e.to_string()))
}

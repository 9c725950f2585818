use std::path::Path;

use serde::Serialize;

use super::{EssNormReport, FredholmReport, GohbergReport, ProbeReport, TruncationSchedule};
use crate::error::Result;

/// Singular values recorded for one truncation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SigmaTable {
    pub band: usize,
    /// `all` or `high`, optionally with the shift, e.g. `high-λ=1.5`.
    pub kind: String,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralReport {
    pub symbol_id: String,
    pub schedule: TruncationSchedule,
    pub sigma_tables: Vec<SigmaTable>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ess_norm: Option<EssNormReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gohberg: Option<GohbergReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fredholm: Option<FredholmReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weyl: Option<ProbeReport>,
}

impl SpectralReport {
    pub fn new(symbol_id: impl Into<String>, schedule: TruncationSchedule) -> Self {
        SpectralReport {
            symbol_id: symbol_id.into(),
            schedule,
            sigma_tables: Vec::new(),
            ess_norm: None,
            gohberg: None,
            fredholm: None,
            weyl: None,
        }
    }

    /// Flattens every σ that the report carries into tables.
    pub fn collect_tables(&mut self) {
        let mut tables = Vec::new();
        let ess = self.ess_norm.as_ref().or(self.gohberg.as_ref().map(|g| &g.estimate));
        if let Some(e) = ess {
            for (band, s) in e.bands.iter().zip(&e.sigma) {
                tables.push(SigmaTable { band: *band, kind: "high-max".into(), values: vec![*s] });
            }
        }
        if let Some(f) = &self.fredholm {
            for (band, s) in self.schedule.bands.iter().zip(&f.sigma_min_traj) {
                tables.push(SigmaTable { band: *band, kind: "all-min".into(), values: vec![*s] });
            }
        }
        if let Some(w) = &self.weyl {
            for t in &w.trajectories {
                for (band, s) in t.bands.iter().zip(&t.sigma_min) {
                    tables.push(SigmaTable {
                        band: *band,
                        kind: format!("high-min-shift({},{})", t.lambda[0], t.lambda[1]),
                        values: vec![*s],
                    });
                }
            }
        }
        self.sigma_tables = tables;
    }
}

/// One row per value: `band,kind,index,sigma`.
pub fn write_sigma_csv(tables: &[SigmaTable], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["band", "kind", "index", "sigma"])?;
    for t in tables {
        for (i, v) in t.values.iter().enumerate() {
            w.write_record([t.band.to_string(), t.kind.clone(), i.to_string(), format!("{v:.12e}")])?;
        }
    }
    w.flush()?;
    Ok(())
}

//! Verification scenarios and their reports.

pub mod config;
mod scenarios;

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

pub use config::{scenario_seed, Config, ScenarioConfig, ScenarioKind};
pub use scenarios::claim;

use crate::error::{Error, Result};
use crate::weights::Geometry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioVerdict {
    Pass,
    Fail,
    /// The request falls outside what is known to hold.
    Refused,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub id: String,
    pub kind: ScenarioKind,
    pub geometry: Geometry,
    pub weight: String,
    pub p: Option<f64>,
    pub claim: String,
    pub threshold: f64,
    pub measured: BTreeMap<String, f64>,
    pub auxiliary: BTreeMap<String, f64>,
    pub verdict: ScenarioVerdict,
    pub message: Option<String>,
    /// Kept out of report.json so identical runs give identical files.
    #[serde(skip)]
    pub wall_time_s: f64,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.verdict == ScenarioVerdict::Pass
    }
}

pub fn run_scenario(sc: &ScenarioConfig, seed: u64) -> VerificationReport {
    let start = Instant::now();
    let outcome = scenarios::run(sc, seed);
    let mut report = VerificationReport {
        id: sc.id.clone(),
        kind: sc.kind,
        geometry: sc.geometry,
        weight: sc.weight.clone(),
        p: sc.p,
        claim: claim(sc.kind, sc.geometry, sc.p).to_string(),
        threshold: sc.tol,
        measured: BTreeMap::new(),
        auxiliary: BTreeMap::new(),
        verdict: ScenarioVerdict::Fail,
        message: None,
        wall_time_s: 0.0,
    };
    match outcome {
        Ok(o) => {
            let ok = o.measured.values().all(|v| *v <= sc.tol);
            report.verdict = if ok {
                ScenarioVerdict::Pass
            } else {
                ScenarioVerdict::Fail
            };
            report.measured = o.measured;
            report.auxiliary = o.auxiliary;
        }
        Err(e @ Error::OpenProblem(_)) => {
            report.verdict = ScenarioVerdict::Refused;
            report.message = Some(e.to_string());
        }
        Err(e) => report.message = Some(e.to_string()),
    }
    report.wall_time_s = start.elapsed().as_secs_f64();
    report
}

/// Runs the selected scenarios in parallel; reports keep the config order.
pub fn run_all(cfg: &Config, only: Option<&str>) -> Result<Vec<VerificationReport>> {
    let selected: Vec<&ScenarioConfig> = cfg
        .scenarios
        .iter()
        .filter(|s| only.is_none_or(|id| s.id == id))
        .collect();
    if let Some(id) = only {
        if selected.is_empty() {
            return Err(Error::Parse(format!("no scenario with id `{id}`")));
        }
    }
    Ok(selected
        .par_iter()
        .map(|s| run_scenario(s, cfg.seed))
        .collect())
}

/// 0 when every report passes, 1 otherwise.
pub fn exit_code(reports: &[VerificationReport]) -> i32 {
    if reports.iter().all(VerificationReport::passed) {
        0
    } else {
        1
    }
}

pub fn report_json(reports: &[VerificationReport]) -> Result<String> {
    serde_json::to_string_pretty(reports).map_err(|e| Error::Io(e.to_string()))
}

pub fn write_outputs(reports: &[VerificationReport], dir: &Path) -> Result<()> {
    let io = |e: std::io::Error| Error::Io(format!("{}: {e}", dir.display()));
    std::fs::create_dir_all(dir).map_err(io)?;
    std::fs::write(dir.join("report.json"), report_json(reports)? + "\n").map_err(io)?;
    let csv_err = |e: csv::Error| Error::Io(e.to_string());
    let mut w = csv::Writer::from_path(dir.join("summary.csv")).map_err(csv_err)?;
    w.write_record([
        "id",
        "kind",
        "geometry",
        "verdict",
        "worst_measured",
        "threshold",
        "wall_time_s",
        "message",
    ])
    .map_err(csv_err)?;
    for r in reports {
        let worst = r
            .measured
            .values()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let verdict = match r.verdict {
            ScenarioVerdict::Pass => "pass",
            ScenarioVerdict::Fail => "fail",
            ScenarioVerdict::Refused => "refused",
        };
        w.write_record([
            r.id.clone(),
            r.kind.as_str().to_string(),
            r.geometry.to_string(),
            verdict.to_string(),
            if worst.is_finite() {
                format!("{worst:e}")
            } else {
                String::new()
            },
            format!("{:e}", r.threshold),
            format!("{:.3}", r.wall_time_s),
            r.message.clone().unwrap_or_default(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}

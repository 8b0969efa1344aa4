//! Scenario configuration files.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functions::HolomorphicFunction;
use crate::grammar::{parse_function, parse_weight};
use crate::weights::{Geometry, WeightFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    MomentIdentity,
    KernelIdentity,
    Representation,
    Isometry,
    ProjectionBound,
    Reconstruction,
}

impl ScenarioKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioKind::MomentIdentity => "moment-identity",
            ScenarioKind::KernelIdentity => "kernel-identity",
            ScenarioKind::Representation => "representation",
            ScenarioKind::Isometry => "isometry",
            ScenarioKind::ProjectionBound => "projection-bound",
            ScenarioKind::Reconstruction => "reconstruction",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub id: String,
    pub kind: ScenarioKind,
    pub geometry: Geometry,
    pub weight: String,
    #[serde(default)]
    pub p: Option<f64>,
    /// Function specs; `random:N` expands to `N` seeded functions.
    #[serde(default)]
    pub functions: Vec<String>,
    pub tol: f64,
    /// Evaluation points as `[re, im]`; a default set is used when empty.
    #[serde(default)]
    pub points: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub seed: u64,
    pub scenarios: Vec<ScenarioConfig>,
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Config =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Static checks: unique ids, positive tolerances, parsable specs.
    pub fn check(&self) -> Result<()> {
        let mut seen = std::collections::BTreeSet::new();
        for s in &self.scenarios {
            if !seen.insert(s.id.as_str()) {
                return Err(Error::Parse(format!("duplicate scenario id `{}`", s.id)));
            }
            if !(s.tol > 0.0 && s.tol.is_finite()) {
                return Err(Error::Parse(format!(
                    "scenario `{}`: tol must be positive",
                    s.id
                )));
            }
            if let Some(p) = s.p {
                if !(p >= 1.0 && p.is_finite()) {
                    return Err(Error::Parse(format!(
                        "scenario `{}`: p must be at least 1",
                        s.id
                    )));
                }
            }
            s.parse_weight()?;
            s.expand_functions(self.seed)?;
        }
        Ok(())
    }

    /// The built-in configuration exercised by `verify` without `--config`.
    pub fn default_suite() -> Self {
        let sc = |id: &str,
                  kind,
                  geometry,
                  weight: &str,
                  p: Option<f64>,
                  functions: &[&str],
                  tol: f64| ScenarioConfig {
            id: id.into(),
            kind,
            geometry,
            weight: weight.into(),
            p,
            functions: functions.iter().map(|s| s.to_string()).collect(),
            tol,
            points: Vec::new(),
        };
        use Geometry::*;
        use ScenarioKind::*;
        Config {
            seed: 0,
            scenarios: vec![
                sc(
                    "moments-disc",
                    MomentIdentity,
                    Disc,
                    "power:alpha=1.5",
                    None,
                    &[],
                    1e-8,
                ),
                sc(
                    "moments-plane",
                    MomentIdentity,
                    Plane,
                    "exp-simple",
                    None,
                    &[],
                    1e-8,
                ),
                sc(
                    "moments-halfplane",
                    MomentIdentity,
                    HalfPlane,
                    "linear:slope=0.5,cap=2",
                    None,
                    &[],
                    1e-8,
                ),
                sc(
                    "kernel-disc",
                    KernelIdentity,
                    Disc,
                    "power:alpha=2",
                    None,
                    &[],
                    1e-7,
                ),
                sc(
                    "kernel-halfplane",
                    KernelIdentity,
                    HalfPlane,
                    "power:alpha=1",
                    None,
                    &[],
                    1e-6,
                ),
                sc(
                    "representation-disc",
                    Representation,
                    Disc,
                    "power:alpha=1",
                    Some(2.0),
                    &["random:5"],
                    1e-7,
                ),
                sc(
                    "representation-halfplane",
                    Representation,
                    HalfPlane,
                    "power:alpha=0",
                    Some(2.0),
                    &["rational:[(1,1,2)]"],
                    1e-4,
                ),
                sc(
                    "isometry-disc",
                    Isometry,
                    Disc,
                    "power:alpha=1",
                    Some(2.0),
                    &["random:20"],
                    1e-6,
                ),
                sc(
                    "isometry-plane",
                    Isometry,
                    Plane,
                    "exp-simple",
                    Some(2.0),
                    &["random:20"],
                    1e-6,
                ),
                sc(
                    "isometry-halfplane",
                    Isometry,
                    HalfPlane,
                    "linear:cap=1",
                    Some(2.0),
                    &["random:20"],
                    1e-6,
                ),
                sc(
                    "projection-disc",
                    ProjectionBound,
                    Disc,
                    "power:alpha=1",
                    Some(2.0),
                    &["random:20"],
                    1e-8,
                ),
                sc(
                    "projection-plane",
                    ProjectionBound,
                    Plane,
                    "exp-simple",
                    Some(2.0),
                    &["random:20"],
                    1e-8,
                ),
                sc(
                    "projection-halfplane-p2",
                    ProjectionBound,
                    HalfPlane,
                    "linear:cap=1",
                    Some(2.0),
                    &["random:20"],
                    1e-6,
                ),
                sc(
                    "projection-halfplane-p1",
                    ProjectionBound,
                    HalfPlane,
                    "linear:cap=1",
                    Some(1.0),
                    &["random:20"],
                    1e-6,
                ),
                sc(
                    "reconstruction-disc",
                    Reconstruction,
                    Disc,
                    "power:alpha=1",
                    None,
                    &["taylor:[0,2,0,1]"],
                    1e-7,
                ),
                sc(
                    "reconstruction-plane",
                    Reconstruction,
                    Plane,
                    "squash2(exp-simple)",
                    None,
                    &["monomial:n=2"],
                    1e-6,
                ),
                sc(
                    "reconstruction-halfplane",
                    Reconstruction,
                    HalfPlane,
                    "linear:cap=1",
                    None,
                    &["rational:[(1,1,2)]", "random:1"],
                    1e-4,
                ),
            ],
        }
    }
}

impl ScenarioConfig {
    pub fn parse_weight(&self) -> Result<WeightFunction> {
        parse_weight(&self.weight, self.geometry).map_err(|e| {
            Error::Parse(format!(
                "scenario `{}`: weight `{}`: {e}",
                self.id, self.weight
            ))
        })
    }

    pub fn expand_functions(&self, seed: u64) -> Result<Vec<(String, HolomorphicFunction)>> {
        let mut out = Vec::new();
        for spec in &self.functions {
            if let Some(n) = spec.strip_prefix("random:") {
                let n: usize = n.trim().parse().map_err(|_| {
                    Error::Parse(format!("scenario `{}`: bad count in `{spec}`", self.id))
                })?;
                let base = scenario_seed(seed, &self.id);
                for i in 0..n {
                    let s = base.wrapping_add(i as u64);
                    let f = match self.geometry {
                        Geometry::HalfPlane => HolomorphicFunction::random_rational(s),
                        _ => HolomorphicFunction::random_polynomial(s, 1 + (s % 8) as usize),
                    };
                    out.push((format!("{f}"), f));
                }
            } else {
                let f = parse_function(spec).map_err(|e| {
                    Error::Parse(format!("scenario `{}`: function `{spec}`: {e}", self.id))
                })?;
                out.push((spec.clone(), f));
            }
        }
        Ok(out)
    }

    pub fn points(&self) -> Vec<Complex64> {
        self.points
            .iter()
            .map(|[re, im]| Complex64::new(*re, *im))
            .collect()
    }
}

/// FNV-1a over the run seed and the scenario id, so a scenario's functions
/// do not depend on which other scenarios are present.
pub fn scenario_seed(seed: u64, id: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in seed.to_le_bytes().iter().chain(id.as_bytes()) {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

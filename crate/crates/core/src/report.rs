//! Machine-readable results: named residual checks with tolerances and a
//! versioned suite result envelope. Serialization is deterministic for a
//! fixed config and seed (struct field order, no timing data in the JSON).

use std::time::Duration;

use serde::Serialize;

use crate::analysis::ClassificationRecord;
use crate::geometry::Point;

pub const SCHEMA_VERSION: u32 = 1;
pub const RNG_ALGORITHM: &str = "chacha8";

#[derive(Clone, Debug, Serialize)]
pub struct ResidualReport {
    pub name: String,
    pub samples: usize,
    pub max_defect: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_point: Option<Point>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_directions: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Running maximum with the witness that attained it.
#[derive(Clone, Debug, Default)]
pub struct DefectTracker {
    pub max: f64,
    pub samples: usize,
    pub worst_point: Option<Point>,
    pub worst_directions: Option<Vec<Vec<f64>>>,
}

impl DefectTracker {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn observe(&mut self, defect: f64, point: &Point, directions: Option<&[Vec<f64>]>) {
        self.samples += 1;
        if defect >= self.max {
            self.max = defect;
            self.worst_point = Some(point.clone());
            self.worst_directions = directions.map(|d| d.to_vec());
        }
    }

    pub fn into_report(self, name: &str, tolerance: f64) -> ResidualReport {
        ResidualReport {
            name: name.to_string(),
            samples: self.samples,
            max_defect: self.max,
            tolerance,
            pass: self.max < tolerance,
            worst_point: self.worst_point,
            worst_directions: self.worst_directions,
            note: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteKind {
    Tg,
    Harmonic,
    Minimal,
    Classify,
    SffOracle,
    PhiCurvature,
    Trajectory,
}

impl SuiteKind {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "tg" => SuiteKind::Tg,
            "harmonic" => SuiteKind::Harmonic,
            "minimal" => SuiteKind::Minimal,
            "classify" => SuiteKind::Classify,
            "sff-oracle" => SuiteKind::SffOracle,
            "phi-curvature" => SuiteKind::PhiCurvature,
            "trajectory" => SuiteKind::Trajectory,
            _ => return None,
        })
    }

    pub fn all() -> &'static [&'static str] {
        &[
            "tg",
            "harmonic",
            "minimal",
            "classify",
            "sff-oracle",
            "phi-curvature",
            "trajectory",
        ]
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteConfig {
    pub manifold: String,
    pub field: String,
    pub suite: SuiteKind,
    pub samples: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

#[derive(Serialize)]
pub struct SuiteResult {
    pub schema_version: u32,
    pub rng: &'static str,
    pub config: SuiteConfig,
    pub checks: Vec<ResidualReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<ClassificationRecord>,
    pub verdict: &'static str,
    /// Measured but deliberately not serialized: output bytes must be a
    /// function of config and seed alone.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.verdict == "pass"
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("suite result serializes")
    }

    /// Flat CSV rendering of the checks (header + one row per check).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("check,samples,max_defect,tolerance,pass\r\n");
        for c in &self.checks {
            out.push_str(&format!(
                "{},{},{},{},{}\r\n",
                c.name, c.samples, c.max_defect, c.tolerance, c.pass
            ));
        }
        out
    }
}

pub fn verdict_word(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "fail"
    }
}

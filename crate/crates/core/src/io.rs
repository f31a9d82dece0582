//! File formats: realization and solution records as JSON, estimator and
//! survival tables as CSV.
//!
//! Infinite radii are written as the string `"inf"`. Floats use the
//! shortest representation that reads back to the same bits, so a
//! read/write round trip is exact.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{GeometryError, MarkedPoint};
use crate::pointprocess::{MarkedPointSet, PointProcessError, Provenance, Window};
use crate::solver::{Method, Model, RadiiAssignment, Solution};
use crate::stats::{Estimate, MassTransport, MuConsistency, PalmEstimates, SurvivalTable, TrendTable};
use crate::structure::{ContactIdentity, StructureReport};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema_version {0} (expected {SCHEMA_VERSION})")]
    SchemaVersion(u32),
    #[error("point {index}: {source}")]
    Point { index: usize, source: GeometryError },
    #[error(transparent)]
    PointSet(#[from] PointProcessError),
    #[error("invalid record: {0}")]
    Invalid(String),
    #[error("CSV: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealizationRecord {
    pub schema_version: u32,
    /// `None` for user-supplied sets.
    pub seed: Option<u64>,
    pub lambda: Option<f64>,
    pub window: Option<Window>,
    pub points: Vec<PointRecord>,
}

impl RealizationRecord {
    pub fn from_set(set: &MarkedPointSet<f64>) -> Self {
        let (seed, lambda, window) = match set.provenance() {
            Provenance::Sampled { seed, lambda, window } => (Some(seed), Some(lambda), Some(window)),
            Provenance::UserSupplied => (None, None, None),
        };
        RealizationRecord {
            schema_version: SCHEMA_VERSION,
            seed,
            lambda,
            window,
            points: set
                .points()
                .iter()
                .map(|p| PointRecord {
                    x: p.germ().x,
                    y: p.germ().y,
                    theta: p.theta(),
                })
                .collect(),
        }
    }

    pub fn to_set(&self) -> Result<MarkedPointSet<f64>, IoError> {
        check_version(self.schema_version)?;
        let points = self
            .points
            .iter()
            .enumerate()
            .map(|(index, p)| MarkedPoint::new(p.x, p.y, p.theta).map_err(|source| IoError::Point { index, source }))
            .collect::<Result<Vec<_>, _>>()?;
        let provenance = match (self.seed, self.lambda, self.window) {
            (Some(seed), Some(lambda), Some(window)) => {
                window.validate()?;
                Provenance::Sampled { seed, lambda, window }
            }
            (None, None, None) => Provenance::UserSupplied,
            _ => {
                return Err(IoError::Invalid(
                    "seed, lambda and window must be all present or all null".into(),
                ))
            }
        };
        Ok(MarkedPointSet::new(points, provenance)?)
    }
}

fn check_version(v: u32) -> Result<(), IoError> {
    if v == SCHEMA_VERSION {
        Ok(())
    } else {
        Err(IoError::SchemaVersion(v))
    }
}

/// A radius as stored: a number, or `"inf"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RadiusRecord {
    Finite(f64),
    Text(String),
}

impl RadiusRecord {
    pub fn new(r: f64) -> Self {
        if r.is_infinite() {
            RadiusRecord::Text("inf".into())
        } else {
            RadiusRecord::Finite(r)
        }
    }

    pub fn value(&self) -> Result<f64, IoError> {
        match self {
            RadiusRecord::Finite(r) => Ok(*r),
            RadiusRecord::Text(s) if s == "inf" => Ok(f64::INFINITY),
            RadiusRecord::Text(s) => Err(IoError::Invalid(format!("radius {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureRecord {
    pub clusters: Vec<Vec<usize>>,
    pub cycles: Vec<Vec<usize>>,
    pub doublets: Vec<[usize; 2]>,
    pub nu: Vec<usize>,
    /// Number of touching pairs.
    pub contacts: usize,
}

impl From<&StructureReport> for StructureRecord {
    fn from(r: &StructureReport) -> Self {
        StructureRecord {
            clusters: r.clusters.clone(),
            cycles: r.cycles.clone(),
            doublets: r.doublets.iter().map(|&(a, b)| [a, b]).collect(),
            nu: r.nu.clone(),
            contacts: r.contacts.len(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityRecord {
    pub segments: usize,
    pub doublets: usize,
    pub contacts: usize,
    pub expected_contacts: usize,
    pub nu_sum: usize,
    pub holds: bool,
}

impl From<&ContactIdentity> for IdentityRecord {
    fn from(c: &ContactIdentity) -> Self {
        IdentityRecord {
            segments: c.segments,
            doublets: c.doublets,
            contacts: c.contacts,
            expected_contacts: c.expected_contacts,
            nu_sum: c.nu_sum,
            holds: c.holds(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassTransportRecord {
    pub lhs: usize,
    pub rhs: usize,
    pub exhaustive: bool,
    pub balanced: bool,
}

impl From<&MassTransport> for MassTransportRecord {
    fn from(m: &MassTransport) -> Self {
        MassTransportRecord {
            lhs: m.lhs,
            rhs: m.rhs,
            exhaustive: m.exhaustive,
            balanced: m.balanced(),
        }
    }
}

/// Per-realization identity checks written by `analyze`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChecksRecord {
    /// Guard width used for certification, if any.
    pub margin: Option<f64>,
    pub contact_identity: IdentityRecord,
    pub mass_transport: MassTransportRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub schema_version: u32,
    pub model: u8,
    pub realization: RealizationRecord,
    pub radii: Vec<RadiusRecord>,
    pub method: Method,
    pub iterations: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure: Option<StructureRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checks: Option<ChecksRecord>,
}

impl SolutionRecord {
    pub fn from_solution(sol: &Solution<f64>) -> Self {
        SolutionRecord {
            schema_version: SCHEMA_VERSION,
            model: sol.model.number(),
            realization: RealizationRecord::from_set(&sol.set),
            radii: sol.radii.as_slice().iter().map(|&r| RadiusRecord::new(r)).collect(),
            method: sol.method,
            iterations: sol.iterations,
            structure: None,
            checks: None,
        }
    }

    pub fn to_solution(&self) -> Result<Solution<f64>, IoError> {
        check_version(self.schema_version)?;
        let model = Model::from_number(self.model).ok_or_else(|| IoError::Invalid(format!("model {}", self.model)))?;
        let set = self.realization.to_set()?;
        let radii = self
            .radii
            .iter()
            .map(RadiusRecord::value)
            .collect::<Result<Vec<_>, _>>()?;
        if radii.len() != set.len() {
            return Err(IoError::Invalid(format!(
                "{} radii for {} points",
                radii.len(),
                set.len()
            )));
        }
        let radii =
            RadiiAssignment::new(radii).map_err(|i| IoError::Invalid(format!("radius {i} is negative or NaN")))?;
        Ok(Solution {
            set,
            model,
            radii,
            method: self.method,
            iterations: self.iterations,
        })
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<S: Serialize>(value: &S) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("records serialize");
    s.push('\n');
    s
}

pub fn realization_to_json(set: &MarkedPointSet<f64>) -> String {
    to_json(&RealizationRecord::from_set(set))
}

pub fn realization_from_json(text: &str) -> Result<MarkedPointSet<f64>, IoError> {
    serde_json::from_str::<RealizationRecord>(text)?.to_set()
}

pub fn solution_to_json(sol: &Solution<f64>) -> String {
    to_json(&SolutionRecord::from_solution(sol))
}

pub fn solution_from_json(text: &str) -> Result<Solution<f64>, IoError> {
    serde_json::from_str::<SolutionRecord>(text)?.to_solution()
}

/// One row of the estimator table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateRow {
    pub name: String,
    pub estimate: f64,
    pub stderr: Option<f64>,
    pub n_effective: usize,
    pub config_hash: String,
}

impl EstimateRow {
    pub fn new(name: impl Into<String>, e: &Estimate, config_hash: &str) -> Self {
        EstimateRow {
            name: name.into(),
            estimate: e.value,
            stderr: e.stderr,
            n_effective: e.n_effective,
            config_hash: config_hash.to_owned(),
        }
    }

    fn plain(name: &str, value: f64, n: usize, config_hash: &str) -> Self {
        EstimateRow {
            name: name.to_owned(),
            estimate: value,
            stderr: None,
            n_effective: n,
            config_hash: config_hash.to_owned(),
        }
    }
}

/// Rows for the requested estimators: any of `nu`, `varpi`, `mu`, `p_finite`.
/// `mu` adds the formula value and relative discrepancy as extra rows.
pub fn palm_rows(est: &PalmEstimates, mu: Option<&MuConsistency>, wanted: &[&str], hash: &str) -> Vec<EstimateRow> {
    let mut rows = Vec::new();
    for &name in wanted {
        match name {
            "nu" => rows.push(EstimateRow::new("nu_mean", &est.nu, hash)),
            "varpi" => {
                rows.push(EstimateRow::new("varpi", &est.varpi, hash));
                if est.model == Model::Model1 {
                    for (len, e) in &est.varpi_by_length {
                        rows.push(EstimateRow::new(format!("varpi_{len}"), e, hash));
                    }
                }
                if let Some(se) = est.pooled_stderr() {
                    rows.push(EstimateRow::plain(
                        "nu_plus_varpi",
                        est.nu.value + est.varpi.value,
                        est.nu.n_effective,
                        hash,
                    ));
                    rows.push(EstimateRow::plain("pooled_stderr", se, est.nu.n_effective, hash));
                }
            }
            "p_finite" => rows.push(EstimateRow::new("p_finite", &est.p_finite, hash)),
            "mu" => {
                rows.push(EstimateRow::new("mu_mean_cluster", &est.mu_direct, hash));
                if let Some(m) = mu {
                    let n = est.varpi.n_effective;
                    rows.push(EstimateRow::plain("mu_formula", m.formula.unwrap_or(f64::NAN), n, hash));
                    rows.push(EstimateRow::plain(
                        "mu_relative_discrepancy",
                        m.relative_discrepancy.unwrap_or(f64::NAN),
                        n,
                        hash,
                    ));
                }
            }
            _ => {}
        }
    }
    rows.push(EstimateRow::plain(
        "infinite_fraction",
        est.infinite_fraction,
        est.germs,
        hash,
    ));
    rows
}

fn csv_string<R: Serialize>(rows: impl IntoIterator<Item = R>) -> Result<String, IoError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| IoError::Invalid(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("CSV of numbers and names is UTF-8"))
}

pub fn estimates_csv(rows: &[EstimateRow]) -> Result<String, IoError> {
    csv_string(rows)
}

pub fn survival_csv(table: &SurvivalTable) -> Result<String, IoError> {
    csv_string(&table.rows)
}

pub fn trend_csv(table: &TrendTable) -> Result<String, IoError> {
    #[derive(Serialize)]
    struct Row {
        side: f64,
        expected_points: f64,
        reps: usize,
        aborted: usize,
        mean_size: f64,
        stderr: Option<f64>,
        infinite_fraction: f64,
    }
    csv_string(table.rows.iter().map(|r| Row {
        side: r.side,
        expected_points: r.expected_points,
        reps: r.reps,
        aborted: r.aborted,
        mean_size: r.mean_size,
        stderr: r.stderr,
        infinite_fraction: r.infinite_fraction,
    }))
}

//! `report.json`: the run summary consumed by the plotting side.

use serde::{Deserialize, Serialize};

use crate::scenario::{Model, SchemeName};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateStats {
    pub mean: f64,
    /// Standard error of the mean; zero for a single replicate.
    pub stderr: f64,
    pub values: Vec<f64>,
}

impl ReplicateStats {
    pub fn from_values(values: Vec<f64>) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let stderr = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt()
        } else {
            0.0
        };
        Self { mean, stderr, values }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldErrors {
    /// Error of the replicate mean.
    pub l1: f64,
    pub linf: f64,
    /// Errors of the individual replicates.
    pub replicate_l1: ReplicateStats,
    pub replicate_linf: ReplicateStats,
}

impl FieldErrors {
    /// Both flux components: L1 adds, Linf takes the larger.
    pub fn combine(x: FieldErrors, y: FieldErrors) -> FieldErrors {
        let zip = |a: &ReplicateStats, b: &ReplicateStats, f: fn(f64, f64) -> f64| {
            ReplicateStats::from_values(a.values.iter().zip(&b.values).map(|(p, q)| f(*p, *q)).collect())
        };
        FieldErrors {
            l1: x.l1 + y.l1,
            linf: x.linf.max(y.linf),
            replicate_l1: zip(&x.replicate_l1, &y.replicate_l1, |p, q| p + q),
            replicate_linf: zip(&x.replicate_linf, &y.replicate_linf, f64::max),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotReport {
    pub time: f64,
    pub csv: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference_csv: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stderr_csv: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub replicate_csv: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<FieldErrors>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<FieldErrors>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub scenario: String,
    pub model: Model,
    pub scheme: SchemeName,
    pub reference: Option<SchemeName>,
    pub particles: u64,
    pub particle_mass: Option<f64>,
    pub replicates: u32,
    pub seed: u64,
    pub dt: f64,
    pub steps: u64,
    pub time_averaged: bool,
    pub average_samples: u64,
    pub live_particles: Vec<u64>,
    pub runtime_seconds: f64,
    pub snapshots: Vec<SnapshotReport>,
}

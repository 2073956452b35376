//! JSON file formats.
//!
//! Output files are written in canonical form: object keys sorted, two-space
//! indentation, trailing newline. Floats use the shortest representation that
//! round-trips, so rewriting a parsed file reproduces it byte for byte.
//! Every `parse_*` function accepts arbitrary bytes and reports malformed
//! input as [`Error::Parse`] or a validation error; none of them panic.

use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::family::{BranchProjection, IntersectionWitness, LevelReport, StageParameters, SuppressionCertificate};
use crate::hilbert::ComplexVector;
use crate::incline::{realify, InclinationCertificate};
use crate::index::TensorIndexSpace;
use crate::projection::ProductProjection;

/// Canonical JSON text of a value.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    // serde_json::Value keeps object keys in a BTreeMap, i.e. sorted.
    let v = serde_json::to_value(value)?;
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

/// Hex SHA-256 of raw file contents.
pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn parse<T: DeserializeOwned>(bytes: &[u8]) -> Result<T> {
    Ok(serde_json::from_slice(bytes)?)
}

/// `{"dim": d, "entries": [[re, im], ...]}`.
pub fn parse_vector(bytes: &[u8]) -> Result<ComplexVector> {
    parse(bytes)
}

/// A JSON array of vectors, all of the same dimension.
pub fn parse_vector_list(bytes: &[u8]) -> Result<Vec<ComplexVector>> {
    let list: Vec<ComplexVector> = parse(bytes)?;
    if let Some(first) = list.first() {
        if let Some(v) = list.iter().find(|v| v.dim() != first.dim()) {
            return Err(Error::DimensionMismatch {
                expected: first.dim(),
                got: v.dim(),
            });
        }
    }
    Ok(list)
}

/// `{"axes": [...], "alphabet_size": d}`.
pub fn parse_index_space(bytes: &[u8]) -> Result<TensorIndexSpace> {
    parse(bytes)
}

/// `{"axes": [...], "alphabet_size": d, "directions": {"axis": vector, ...}}`.
pub fn parse_projection_spec(bytes: &[u8]) -> Result<ProductProjection> {
    parse(bytes)
}

/// `{"regime": "paper" | "toy", "levels": [{"m": 1, "d": 4}, ...]}`.
pub fn parse_stage(bytes: &[u8]) -> Result<StageParameters> {
    parse(bytes)
}

/// Point sets for covering experiments: either a list of complex vectors
/// (compared through their realifications) or `{"real": [[x, ...], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointsFile {
    Real { real: Vec<Vec<f64>> },
    Complex(Vec<ComplexVector>),
}

impl PointsFile {
    pub fn into_real(self) -> Vec<Vec<f64>> {
        match self {
            PointsFile::Real { real } => real,
            PointsFile::Complex(vs) => vs.iter().map(realify).collect(),
        }
    }
}

pub fn parse_points(bytes: &[u8]) -> Result<PointsFile> {
    let points: PointsFile = parse(bytes)?;
    let empty = match &points {
        PointsFile::Real { real } => real.is_empty(),
        PointsFile::Complex(vs) => vs.is_empty(),
    };
    if empty {
        return Err(Error::Parse("point set is empty".into()));
    }
    Ok(points)
}

/// Provenance of the run that produced a file. Wall-clock timings are kept
/// out of it so that reruns produce identical bytes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Arguments after the program name, excluding output locations.
    pub args: Vec<String>,
    pub root_seed: Option<u64>,
    pub version: String,
    /// SHA-256 of each input, keyed by role.
    pub input_digests: BTreeMap<String, String>,
}

/// Output of `incline`: the certificate fields plus the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateFile {
    #[serde(flatten)]
    pub certificate: InclinationCertificate,
    pub manifest: RunManifest,
}

pub fn parse_certificate(bytes: &[u8]) -> Result<CertificateFile> {
    parse(bytes)
}

/// Where a family's basis came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BasisSource {
    /// Haar-random basis from `StageBasis::random(stage, seed)`.
    Random { seed: u64 },
    Standard,
    /// Read from a vector-list file with this digest.
    File { digest: String },
}

/// Output of `family build`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyFile {
    pub projection: BranchProjection,
    pub rho: f64,
    pub basis: BasisSource,
    pub levels: Vec<LevelReport>,
    pub certificate: SuppressionCertificate,
    pub manifest: RunManifest,
}

pub fn parse_family(bytes: &[u8]) -> Result<FamilyFile> {
    let file: FamilyFile = parse(bytes)?;
    if file.certificate.branch != file.projection.branch() {
        return Err(Error::Parse("certificate branch differs from projection branch".into()));
    }
    Ok(file)
}

/// Output of `family intersect`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntersectionFile {
    #[serde(flatten)]
    pub witness: IntersectionWitness,
    pub manifest: RunManifest,
}

pub fn parse_intersection(bytes: &[u8]) -> Result<IntersectionFile> {
    parse(bytes)
}

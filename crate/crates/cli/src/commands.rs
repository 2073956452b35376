use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use ndstate_core::family::{
    branch_intersection, build_branch_projection, parameter_trace, verify_suppression, BuildConfig,
    IntersectionWitness, StageBasis, StageParameters,
};
use ndstate_core::formats::{
    parse_certificate, parse_family, parse_points, parse_stage, parse_vector_list, sha256_hex, to_canonical_json,
    BasisSource, CertificateFile, FamilyFile, IntersectionFile, RunManifest,
};
use ndstate_core::hilbert::random_unit_vector;
use ndstate_core::incline::{cover_witness, search_inclined_vector, SearchConfig};
use ndstate_core::rng::derive_seed;
use ndstate_core::{ComplexVector, Error};

/// Residual allowed for a common fixed vector.
const FIXED_TOLERANCE: f64 = 1e-10;

pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::CertificateMismatch(_) => 1,
            Error::BudgetExhausted { .. } | Error::LevelBudgetExhausted { .. } => 3,
            _ => 2,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError {
            code: 2,
            message: e.to_string(),
        }
    }
}

type CliResult = Result<u8, CliError>;

fn exit(ok: bool) -> u8 {
    if ok {
        0
    } else {
        1
    }
}

/// The invocation as recorded in manifests.
pub struct Context {
    args: Vec<String>,
}

impl Context {
    /// Drops output locations and `--threads`, which do not affect results.
    pub fn from_env() -> Self {
        let mut args = Vec::new();
        let mut iter = std::env::args().skip(1);
        while let Some(a) = iter.next() {
            if matches!(a.as_str(), "--out" | "--out-dir" | "--threads") {
                iter.next();
            } else if !(a.starts_with("--out=") || a.starts_with("--out-dir=") || a.starts_with("--threads=")) {
                args.push(a);
            }
        }
        Context { args }
    }

    fn manifest(&self, command: &str, root_seed: Option<u64>, input_digests: BTreeMap<String, String>) -> RunManifest {
        RunManifest {
            command: command.to_string(),
            args: self.args.clone(),
            root_seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            input_digests,
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError {
        code: 2,
        message: format!("{}: {e}", path.display()),
    })
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<(), CliError> {
    let text = to_canonical_json(value)?;
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError {
            code: 2,
            message: format!("{}: {e}", path.display()),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_to<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<(), CliError> {
    emit(value, Some(&dir.join(name)))
}

pub fn params(m: u32) -> CliResult {
    emit(&parameter_trace(m)?, None)?;
    Ok(0)
}

pub fn incline(ctx: &Context, input: &Path, bound: f64, budget: u64, seed: u64, out: Option<&Path>) -> CliResult {
    let bytes = read(input)?;
    let vectors = parse_vector_list(&bytes)?;
    let dim = vectors
        .first()
        .map(ComplexVector::dim)
        .ok_or_else(|| Error::Parse("vector list is empty".into()))?;
    let certificate = search_inclined_vector(dim, &vectors, SearchConfig { bound, budget, seed })?;
    let passed = certificate.passed;
    if !passed {
        eprintln!(
            "bound not met: best achieved {:.6} > {bound} after {} iterations",
            certificate.achieved, certificate.iterations_used
        );
    }
    let digests = BTreeMap::from([("vectors".to_string(), sha256_hex(&bytes))]);
    let file = CertificateFile {
        certificate,
        manifest: ctx.manifest("incline", Some(seed), digests),
    };
    emit(&file, out)?;
    Ok(exit(passed))
}

#[derive(Serialize)]
struct InclineCheck {
    achieved: f64,
    bound: f64,
    verified: bool,
}

pub fn verify_incline(certificate: &Path, vectors: &Path) -> CliResult {
    let file = parse_certificate(&read(certificate)?)?;
    let vectors = parse_vector_list(&read(vectors)?)?;
    file.certificate.verify(&vectors)?;
    emit(
        &InclineCheck {
            achieved: file.certificate.achieved,
            bound: file.certificate.bound,
            verified: true,
        },
        None,
    )?;
    Ok(0)
}

pub struct BuildRequest<'a> {
    pub stage: &'a Path,
    pub branch: &'a str,
    /// `random`, `standard` or a basis file path.
    pub basis: &'a str,
    pub seed: u64,
    pub rho: f64,
    pub budget: u64,
}

pub fn family_build(ctx: &Context, req: BuildRequest<'_>, out: Option<&Path>) -> CliResult {
    let stage_bytes = read(req.stage)?;
    let stage = parse_stage(&stage_bytes)?;
    let mut digests = BTreeMap::from([("stage".to_string(), sha256_hex(&stage_bytes))]);
    let (basis, source) = match req.basis {
        "random" => (StageBasis::random(stage, req.seed)?, BasisSource::Random { seed: req.seed }),
        "standard" => (StageBasis::standard(stage)?, BasisSource::Standard),
        path => {
            let bytes = read(Path::new(path))?;
            digests.insert("basis".to_string(), sha256_hex(&bytes));
            let basis = StageBasis::new(stage, parse_vector_list(&bytes)?)?;
            let digest = basis.digest().to_string();
            (basis, BasisSource::File { digest })
        }
    };
    let config = BuildConfig {
        rho: req.rho,
        budget: req.budget,
        seed: req.seed,
    };
    let build = build_branch_projection(&basis, req.branch, config)?;
    let passed = build.certificate.passed;
    let file = FamilyFile {
        projection: build.projection,
        rho: req.rho,
        basis: source,
        levels: build.levels,
        certificate: build.certificate,
        manifest: ctx.manifest("family build", Some(req.seed), digests),
    };
    emit(&file, out)?;
    Ok(exit(passed))
}

#[derive(Serialize)]
struct SuppressionCheck {
    branch: String,
    max_diagonal: f64,
    bound: f64,
    passed: bool,
}

fn rebuild_basis(file: &FamilyFile, basis: Option<&Path>) -> Result<StageBasis, CliError> {
    let stage = file.projection.stage().clone();
    Ok(match &file.basis {
        BasisSource::Random { seed } => StageBasis::random(stage, *seed)?,
        BasisSource::Standard => StageBasis::standard(stage)?,
        BasisSource::File { digest } => {
            let path = basis.ok_or_else(|| CliError {
                code: 2,
                message: "family was built from a basis file; pass it with --basis".into(),
            })?;
            let basis = StageBasis::new(stage, parse_vector_list(&read(path)?)?)?;
            if basis.digest() != digest {
                return Err(Error::CertificateMismatch("basis file differs from the one used to build".into()).into());
            }
            basis
        }
    })
}

pub fn family_verify(family: &Path, basis: Option<&Path>, bound: f64) -> CliResult {
    let file = parse_family(&read(family)?)?;
    let basis = rebuild_basis(&file, basis)?;
    let fresh = verify_suppression(&file.projection, &basis, bound)?;
    file.certificate.check_against(&fresh)?;
    if !fresh.passed {
        eprintln!("max diagonal {:.12} exceeds bound {bound}", fresh.max_diagonal);
    }
    emit(
        &SuppressionCheck {
            branch: fresh.branch,
            max_diagonal: fresh.max_diagonal,
            bound,
            passed: fresh.passed,
        },
        None,
    )?;
    Ok(exit(fresh.passed))
}

fn witness_ok(w: &IntersectionWitness) -> bool {
    (w.vector.norm() - 1.0).abs() <= FIXED_TOLERANCE && w.residuals.iter().all(|&r| r <= FIXED_TOLERANCE)
}

pub fn family_intersect(ctx: &Context, families: &[PathBuf], out: Option<&Path>) -> CliResult {
    let mut digests = BTreeMap::new();
    let mut specs = Vec::with_capacity(families.len());
    for (i, path) in families.iter().enumerate() {
        let bytes = read(path)?;
        digests.insert(format!("family.{i}"), sha256_hex(&bytes));
        specs.push(parse_family(&bytes)?.projection);
    }
    let witness = branch_intersection(&specs)?;
    let ok = witness_ok(&witness);
    let file = IntersectionFile {
        witness,
        manifest: ctx.manifest("family intersect", None, digests),
    };
    emit(&file, out)?;
    Ok(exit(ok))
}

pub fn cover(points: &Path, radius: f64, trials: u64, seed: u64, out: Option<&Path>) -> CliResult {
    let points = parse_points(&read(points)?)?.into_real();
    let report = cover_witness(&points, radius, trials, seed)?;
    let found = report.witness.is_some();
    emit(&report, out)?;
    Ok(exit(found))
}

/// Demo dimensions: the inclined-vector lemma at d = 128 with 1000 vectors,
/// and a depth-3 toy stage.
const DEMO_DIM: usize = 128;
const DEMO_VECTORS: u64 = 1000;
const DEMO_LEVELS: [usize; 3] = [4, 4, 2];
const DEMO_RHO: f64 = 0.9;
const DEMO_BUDGET: u64 = 10_000;

#[derive(Serialize)]
struct IntersectionsFile {
    witnesses: Vec<IntersectionWitness>,
    manifest: RunManifest,
}

#[derive(Serialize)]
struct DemoSummary {
    incline_achieved: f64,
    incline_passed: bool,
    max_diagonals: BTreeMap<String, f64>,
    families_passed: bool,
    intersections: usize,
    max_residual: f64,
    intersections_passed: bool,
}

pub fn demo(ctx: &Context, seed: u64, out_dir: &Path) -> CliResult {
    fs::create_dir_all(out_dir)?;
    let manifest = ctx.manifest("demo", Some(seed), BTreeMap::new());

    let vectors = (0..DEMO_VECTORS)
        .into_par_iter()
        .map(|j| random_unit_vector(DEMO_DIM, derive_seed(seed, "demo-vectors", j)))
        .collect::<Result<Vec<_>, _>>()?;
    let certificate = search_inclined_vector(
        DEMO_DIM,
        &vectors,
        SearchConfig {
            bound: 0.9,
            budget: DEMO_BUDGET,
            seed: derive_seed(seed, "demo-incline", 0),
        },
    )?;
    let incline_passed = certificate.verify(&vectors).is_ok();
    let incline_achieved = certificate.achieved;
    emit_to(out_dir, "vectors.json", &vectors)?;
    emit_to(out_dir, "incline.json",
        &CertificateFile {
            certificate,
            manifest: manifest.clone(),
        },
    )?;

    let stage = StageParameters::toy(&DEMO_LEVELS)?;
    emit_to(out_dir, "stage.json", &stage)?;
    let basis = StageBasis::random(stage, seed)?;
    let config = BuildConfig {
        rho: DEMO_RHO,
        budget: DEMO_BUDGET,
        seed,
    };
    let branches: Vec<String> = (0..8u32).map(|b| format!("{b:03b}")).collect();
    let builds = branches
        .iter()
        .map(|branch| build_branch_projection(&basis, branch, config))
        .collect::<Result<Vec<_>, _>>()?;
    let mut max_diagonals = BTreeMap::new();
    let mut families_passed = true;
    let mut specs = Vec::with_capacity(builds.len());
    for build in builds {
        let branch = build.projection.branch().to_string();
        families_passed &= build.certificate.passed;
        max_diagonals.insert(branch.clone(), build.certificate.max_diagonal);
        specs.push(build.projection.clone());
        emit_to(out_dir, &format!("family-{branch}.json"),
            &FamilyFile {
                projection: build.projection,
                rho: DEMO_RHO,
                basis: BasisSource::Random { seed },
                levels: build.levels,
                certificate: build.certificate,
                manifest: manifest.clone(),
            },
        )?;
    }

    let mut groups = Vec::new();
    for i in 0..specs.len() {
        for j in i + 1..specs.len() {
            groups.push(vec![i, j]);
            for k in j + 1..specs.len() {
                groups.push(vec![i, j, k]);
            }
        }
    }
    let witnesses = groups
        .par_iter()
        .map(|g| branch_intersection(&g.iter().map(|&i| specs[i].clone()).collect::<Vec<_>>()))
        .collect::<Result<Vec<_>, _>>()?;
    let max_residual = witnesses
        .iter()
        .flat_map(|w| w.residuals.iter().copied())
        .fold(0.0, f64::max);
    let intersections_passed = witnesses.iter().all(witness_ok);
    let summary = DemoSummary {
        incline_achieved,
        incline_passed,
        max_diagonals,
        families_passed,
        intersections: witnesses.len(),
        max_residual,
        intersections_passed,
    };
    emit_to(out_dir, "intersections.json", &IntersectionsFile { witnesses, manifest })?;
    emit(&summary, None)?;
    Ok(exit(incline_passed && families_passed && intersections_passed))
}

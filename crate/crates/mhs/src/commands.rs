//! Subcommand implementations. Each returns a serializable result object and,
//! for tabular outputs, a CSV table.

use mhs_core::closedform::{clifford_jacobi, equator_jacobi, sphere_spectrum, SpectrumTable};
use mhs_core::fem::{assemble, mesh_sphere, mesh_torus, NormalMode, SurfaceMesh};
use mhs_core::geometry::{check_minimality, clifford, equator, GeometryFamily};
use mhs_core::paperlab::{
    chain_draws, chain_for_draw, chain_verify, conjecture_probe, gauss_identities, lemma_check,
    ratio_report, theorem_check, ChainRecord, Lab,
};
use mhs_core::rotational::{build_surface, find_otsuki, scan_window, ProfileCurve};
use mhs_core::spectral::{
    default_zero_tol, inertia_below, lowest_eigs_with, EigenReport, SolverOptions,
};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cli::{
    ChainArgs, Cli, Command, ConjectureArgs, FamilyArgs, FamilyName, FamilySpec, MeshExportArgs,
    MeshImportArgs, MeshSpec, OracleArgs, OracleKind, PaperArgs, RunConfig, SpectrumArgs,
};
use crate::error::{CliError, CliResult};
use crate::meshio::MeshFile;

/// Closure tolerance used when generating rotational profiles.
pub const PROFILE_TOL: f64 = 1e-12;
/// Total quadrature nodes allowed in `family` summaries.
const FAMILY_NODE_BUDGET: f64 = 1e6;

pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

pub struct Outcome {
    pub result: Value,
    pub table: Option<Table>,
}

impl Outcome {
    fn json<T: Serialize>(v: &T) -> CliResult<Self> {
        Ok(Outcome {
            result: serde_json::to_value(v)?,
            table: None,
        })
    }
}

fn validation(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

/// Profile data without the sample table.
#[derive(Debug, Clone, Serialize)]
pub struct ProfileSummary {
    pub p: u32,
    pub q: u32,
    pub clairaut: f64,
    pub period: f64,
    pub samples: usize,
    pub closure_residual: f64,
    pub clairaut_drift: f64,
    pub closure_tol: f64,
}

impl From<&ProfileCurve> for ProfileSummary {
    fn from(p: &ProfileCurve) -> Self {
        ProfileSummary {
            p: p.p,
            q: p.q,
            clairaut: p.clairaut,
            period: p.period,
            samples: p.samples.len(),
            closure_residual: p.closure_residual,
            clairaut_drift: p.clairaut_drift,
            closure_tol: PROFILE_TOL,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MeshSummary {
    pub source: Option<String>,
    pub vertices: usize,
    pub triangles: usize,
    pub area: f64,
    pub euler_characteristic: i64,
    pub normal_mode: NormalMode,
    pub max_asq: f64,
}

impl From<&SurfaceMesh> for MeshSummary {
    fn from(m: &SurfaceMesh) -> Self {
        MeshSummary {
            source: m.source.clone(),
            vertices: m.vertex_count(),
            triangles: m.triangles.len(),
            area: m.area(),
            euler_characteristic: m.euler_characteristic(),
            normal_mode: m.normal_mode,
            max_asq: m.max_asq(),
        }
    }
}

pub struct Prepared {
    pub mesh: SurfaceMesh,
    pub resolution: Vec<usize>,
    pub zero_tol: f64,
    pub profile: Option<ProfileSummary>,
}

fn require_surface(spec: &FamilySpec) -> CliResult<()> {
    if spec.n != 2 {
        return Err(validation(format!(
            "meshes exist for n = 2 only, got n = {}",
            spec.n
        )));
    }
    if spec.family == FamilyName::Clifford && spec.k != 1 {
        return Err(validation(format!(
            "clifford surfaces in S³ need k = 1, got k = {}",
            spec.k
        )));
    }
    Ok(())
}

pub fn prepare(spec: &FamilySpec, m: &MeshSpec) -> CliResult<Prepared> {
    require_surface(spec)?;
    let (mesh, resolution, profile) = match spec.family {
        FamilyName::Equator => {
            let s = m.res.unwrap_or(4);
            (mesh_sphere(s)?, vec![s], None)
        }
        FamilyName::Clifford => {
            let r = m.res.unwrap_or(64);
            let (nt, nphi) = (m.nt.unwrap_or(r), m.nphi.unwrap_or(r));
            (
                mesh_torus(&clifford(2, 1)?, nt, nphi)?,
                vec![nt, nphi],
                None,
            )
        }
        FamilyName::Otsuki => {
            let r = m.res.unwrap_or(64);
            let (nt, nphi) = (m.nt.unwrap_or(4 * r), m.nphi.unwrap_or(r));
            let prof = {
                let (p, q) = spec.pq();
                find_otsuki(p, q, PROFILE_TOL)
            }?;
            let fam = build_surface(&prof, nt, nphi)?;
            (
                mesh_torus(&fam, nt, nphi)?,
                vec![nt, nphi],
                Some(ProfileSummary::from(&prof)),
            )
        }
    };
    let zero_tol = match m.zero_tol {
        Some(z) if !(z >= 0.0) => {
            return Err(validation(format!("zero_tol {z} must be nonnegative")))
        }
        Some(z) => z,
        None => default_zero_tol(&mesh),
    };
    Ok(Prepared {
        mesh,
        resolution,
        zero_tol,
        profile,
    })
}

fn base_config(name: &str, cli: &Cli) -> RunConfig {
    RunConfig {
        subcommand: name.into(),
        output: cli.output.clone(),
        format: Some(cli.format),
        ..Default::default()
    }
}

fn mesh_config(name: &str, cli: &Cli, spec: &FamilySpec, p: &Prepared) -> RunConfig {
    RunConfig {
        family: Some(spec.normalized()),
        resolution: Some(p.resolution.clone()),
        zero_tol: Some(p.zero_tol),
        profile_tol: p.profile.as_ref().map(|_| PROFILE_TOL),
        ..base_config(name, cli)
    }
}

pub fn execute(cli: &Cli) -> CliResult<(RunConfig, Outcome)> {
    match &cli.command {
        Command::Oracle(a) => oracle(cli, a),
        Command::Family(a) => family(cli, a),
        Command::Spectrum(a) => spectrum(cli, a),
        Command::PaperCheck(a) => paper_check(cli, a),
        Command::Chain(a) => chain(cli, a),
        Command::Conjecture(a) => conjecture(cli, a),
        Command::MeshExport(a) => mesh_export(cli, a),
        Command::MeshImport(a) => mesh_import(cli, a),
    }
}

fn spectrum_table(t: &SpectrumTable) -> Table {
    Table {
        headers: vec!["eigenvalue", "multiplicity"],
        rows: t
            .entries
            .iter()
            .map(|e| vec![e.eigenvalue.to_string(), e.multiplicity.to_string()])
            .collect(),
    }
}

fn oracle(cli: &Cli, a: &OracleArgs) -> CliResult<(RunConfig, Outcome)> {
    let spec = FamilySpec {
        name: None,
        family_flag: None,
        family: match a.kind {
            OracleKind::Clifford => FamilyName::Clifford,
            _ => FamilyName::Equator,
        },
        n: a.n,
        k: a.k,
        p: None,
        q: None,
    }
    .normalized();
    let mut cfg = RunConfig {
        family: Some(spec),
        ..base_config("oracle", cli)
    };
    let outcome = match a.kind {
        OracleKind::Sphere => {
            cfg.count = Some(a.jmax);
            let t = sphere_spectrum(a.n, a.jmax)?;
            let table = spectrum_table(&t);
            Outcome {
                result: json!({ "kind": "sphere", "m": a.n, "jmax": a.jmax, "table": t }),
                table: Some(table),
            }
        }
        OracleKind::Clifford | OracleKind::Equator => {
            let s = if a.kind == OracleKind::Clifford {
                clifford_jacobi(a.n, a.k, a.cutoff)?
            } else {
                equator_jacobi(a.n, a.cutoff)?
            };
            let table = spectrum_table(&s.table);
            let mut v = serde_json::to_value(&s)?;
            v["kind"] = json!(a.kind);
            Outcome {
                result: v,
                table: Some(table),
            }
        }
    };
    Ok((cfg, outcome))
}

fn family_object(
    spec: &FamilySpec,
    res: usize,
    tol: f64,
) -> CliResult<(GeometryFamily, Option<ProfileCurve>)> {
    Ok(match spec.family {
        FamilyName::Equator => (equator(spec.n)?, None),
        FamilyName::Clifford => (clifford(spec.n, spec.k)?, None),
        FamilyName::Otsuki => {
            if spec.n != 2 {
                return Err(validation("rotational tori exist for n = 2 only"));
            }
            let prof = {
                let (p, q) = spec.pq();
                find_otsuki(p, q, tol)
            }?;
            let r = res.max(16);
            (build_surface(&prof, r, r)?, Some(prof))
        }
    })
}

#[derive(Serialize)]
struct FamilySummary {
    name: String,
    surface_dim: usize,
    ambient_dim: usize,
    /// Quadrature nodes per parameter axis actually used.
    nodes_per_axis: usize,
    area: f64,
    asq_ratio: f64,
    max_trace_a: f64,
    max_asq: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    profile: Option<ProfileSummary>,
    /// Full profile record, with `--profile`.
    #[serde(skip_serializing_if = "Option::is_none")]
    profile_curve: Option<ProfileCurve>,
}

fn family(cli: &Cli, a: &FamilyArgs) -> CliResult<(RunConfig, Outcome)> {
    let mut cfg = RunConfig {
        family: Some(a.family.normalized()),
        ..base_config("family", cli)
    };
    if let Some(points) = a.scan {
        cfg.count = Some(points);
        let scan = scan_window(points)?;
        let (lo, hi) = scan.window();
        let table = Table {
            headers: vec!["clairaut", "rotation_number"],
            rows: scan
                .energies
                .iter()
                .zip(&scan.rotation_numbers)
                .map(|(e, r)| vec![e.to_string(), r.to_string()])
                .collect(),
        };
        let result = json!({ "scan": scan, "window": [lo, hi] });
        return Ok((
            cfg,
            Outcome {
                result,
                table: Some(table),
            },
        ));
    }
    let (fam, curve) = family_object(&a.family, a.res, a.tol)?;
    cfg.profile_tol = curve.as_ref().map(|_| a.tol);
    let profile = curve.as_ref().map(|c| ProfileSummary {
        closure_tol: a.tol,
        ..ProfileSummary::from(c)
    });
    let dim = fam.surface_dim();
    let nodes = (a.res as f64)
        .min(FAMILY_NODE_BUDGET.powf(1.0 / dim as f64).floor())
        .max(2.0) as usize;
    cfg.resolution = Some(vec![nodes; dim]);
    let samples = fam.sample_points(nodes);
    let max_trace_a = check_minimality(&fam, &samples)?;
    let mut max_asq: f64 = 0.0;
    for u in &samples {
        max_asq = max_asq.max(fam.eval_frame(u)?.asq);
    }
    let summary = FamilySummary {
        name: fam.name.clone(),
        surface_dim: dim,
        ambient_dim: fam.ambient_dim(),
        nodes_per_axis: nodes,
        area: fam.area(nodes)?,
        asq_ratio: fam.asq_ratio(nodes)?,
        max_trace_a,
        max_asq,
        profile,
        profile_curve: curve.filter(|_| a.profile),
    };
    Ok((cfg, Outcome::json(&summary)?))
}

#[derive(Serialize)]
struct SpectrumResult {
    #[serde(flatten)]
    report: EigenReport,
    /// Eigenvalues below `-zero_tol` counted by factorization inertia.
    inertia_index: usize,
    counts_agree: bool,
    mesh: MeshSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    profile: Option<ProfileSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

fn eigen_table(r: &EigenReport) -> Table {
    Table {
        headers: vec!["k", "eigenvalue", "residual"],
        rows: r
            .eigenvalues
            .iter()
            .zip(&r.residuals)
            .enumerate()
            .map(|(k, (l, res))| vec![(k + 1).to_string(), l.to_string(), format!("{res:e}")])
            .collect(),
    }
}

fn solve_spectrum(
    mesh: &SurfaceMesh,
    count: usize,
    zero_tol: f64,
    dense: bool,
    vectors: bool,
) -> CliResult<SpectrumResult> {
    let ops = assemble(mesh)?;
    let opts = SolverOptions {
        force_dense: dense,
        ..Default::default()
    };
    let mut report = lowest_eigs_with(&ops, count, zero_tol, &opts)?;
    if !vectors {
        report = report.without_vectors();
    }
    let inertia_index = inertia_below(&ops, -zero_tol)?;
    let counts_agree = !report.complete || inertia_index == report.index;
    let note = (mesh.normal_mode == NormalMode::Reconstructed).then(|| {
        "normals reconstructed per triangle; f_v fields have reduced accuracy".to_string()
    });
    Ok(SpectrumResult {
        report,
        inertia_index,
        counts_agree,
        mesh: MeshSummary::from(mesh),
        profile: None,
        note,
    })
}

fn spectrum(cli: &Cli, a: &SpectrumArgs) -> CliResult<(RunConfig, Outcome)> {
    let p = prepare(&a.family, &a.mesh)?;
    let cfg = RunConfig {
        count: Some(a.count),
        ..mesh_config("spectrum", cli, &a.family, &p)
    };
    let mut res = solve_spectrum(&p.mesh, a.count, p.zero_tol, a.dense, a.vectors)?;
    res.profile = p.profile;
    let table = eigen_table(&res.report);
    Ok((
        cfg,
        Outcome {
            result: serde_json::to_value(&res)?,
            table: Some(table),
        },
    ))
}

/// Aggregate of seeded chain draws.
#[derive(Debug, Clone, Serialize)]
pub struct ChainSummary {
    pub draws: usize,
    pub seed: u64,
    pub identity_tol: f64,
    pub identity_pass: usize,
    pub max_identity_residual: f64,
    /// The ordering clause applies when `λ₁ ≤ -2n + 0.05`.
    pub ordering_applies: bool,
    pub ordering_tol: f64,
    pub ordering_pass: usize,
    /// `max (L0 - L1) / scale`
    pub max_ordering_excess: f64,
    pub max_l0_residual: f64,
}

pub const CHAIN_IDENTITY_TOL: f64 = 1e-10;
pub const CHAIN_ORDERING_TOL: f64 = 1e-6;
pub const LAMBDA_BAND: f64 = 0.05;

pub fn summarize_chain(lab: &Lab, records: &[ChainRecord], seed: u64) -> ChainSummary {
    let rel =
        |f: &dyn Fn(&ChainRecord) -> f64| records.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
    ChainSummary {
        draws: records.len(),
        seed,
        identity_tol: CHAIN_IDENTITY_TOL,
        identity_pass: records
            .iter()
            .filter(|r| r.identity_holds(CHAIN_IDENTITY_TOL))
            .count(),
        max_identity_residual: rel(&|r| r.residual_l12 / r.scale),
        ordering_applies: lab.lambda1 <= -2.0 * lab.n() as f64 + LAMBDA_BAND,
        ordering_tol: CHAIN_ORDERING_TOL,
        ordering_pass: records
            .iter()
            .filter(|r| r.ordering_holds(CHAIN_ORDERING_TOL))
            .count(),
        max_ordering_excess: rel(&|r| (r.l0 - r.l1) / r.scale),
        max_l0_residual: rel(&|r| r.residual_l0 / r.scale),
    }
}

fn seeded_chain(lab: &Lab, draws: usize, seed: u64) -> CliResult<Vec<ChainRecord>> {
    let params = chain_draws(draws, seed);
    let recs: Result<Vec<_>, _> = params.par_iter().map(|d| chain_for_draw(lab, d)).collect();
    Ok(recs?)
}

fn check_delta1(d: f64) -> CliResult<()> {
    if !(d > 0.0 && d < 1.0) {
        return Err(validation(format!("delta1 = {d} outside (0, 1)")));
    }
    Ok(())
}

fn paper_check(cli: &Cli, a: &PaperArgs) -> CliResult<(RunConfig, Outcome)> {
    check_delta1(a.delta1)?;
    let p = prepare(&a.family, &a.mesh)?;
    let delta2 = 1.0 - a.delta1;
    let cfg = RunConfig {
        delta1: Some(a.delta1),
        delta2: Some(delta2),
        rank_tol: Some(a.rank_tol),
        draws: Some(a.draws),
        seed: Some(a.seed),
        ..mesh_config("paper-check", cli, &a.family, &p)
    };
    let identities = gauss_identities(&p.mesh, &assemble(&p.mesh)?);
    let lab = Lab::with_zero_tol(p.mesh, p.zero_tol)?;
    let lemma = lemma_check(&lab, a.rank_tol)?;
    let theorem = theorem_check(&lab, a.delta1, delta2, a.rank_tol)?;
    let records = seeded_chain(&lab, a.draws, a.seed)?;
    let chain = summarize_chain(&lab, &records, a.seed);
    let conjecture = conjecture_probe(&lab, a.rank_tol)?;
    let result = json!({
        "mesh": MeshSummary::from(&lab.mesh),
        "profile": p.profile,
        "index": lab.index,
        "lambda1": lab.lambda1,
        "zero_tol": lab.zero_tol,
        "identities": identities,
        "lemma": lemma,
        "theorem": theorem,
        "chain": chain,
        "conjecture": conjecture,
        "ratio": ratio_report(&lab.mesh),
    });
    Ok((
        cfg,
        Outcome {
            result,
            table: None,
        },
    ))
}

fn chain(cli: &Cli, a: &ChainArgs) -> CliResult<(RunConfig, Outcome)> {
    check_delta1(a.delta1)?;
    let p = prepare(&a.family, &a.mesh)?;
    let mut cfg = RunConfig {
        delta1: Some(a.delta1),
        delta2: Some(1.0 - a.delta1),
        ..mesh_config("chain", cli, &a.family, &p)
    };
    let lab = Lab::with_zero_tol(p.mesh, p.zero_tol)?;
    let result = match (a.a, a.b, &a.w) {
        (Some(ca), Some(cb), Some(w)) => {
            if w.len() != 4 {
                return Err(validation(format!("w needs 4 components, got {}", w.len())));
            }
            let rec = chain_verify(
                &lab,
                ca,
                cb,
                &[w[0], w[1], w[2], w[3]],
                a.delta1,
                1.0 - a.delta1,
            )?;
            json!({ "record": rec, "lambda1": lab.lambda1 })
        }
        (None, None, None) => {
            cfg.draws = Some(a.draws);
            cfg.seed = Some(a.seed);
            let records = seeded_chain(&lab, a.draws, a.seed)?;
            json!({ "summary": summarize_chain(&lab, &records, a.seed), "records": records, "lambda1": lab.lambda1 })
        }
        _ => return Err(validation("give all of --a, --b, --w or none of them")),
    };
    Ok((
        cfg,
        Outcome {
            result,
            table: None,
        },
    ))
}

fn conjecture(cli: &Cli, a: &ConjectureArgs) -> CliResult<(RunConfig, Outcome)> {
    let p = prepare(&a.family, &a.mesh)?;
    let cfg = RunConfig {
        rank_tol: Some(a.rank_tol),
        ..mesh_config("conjecture", cli, &a.family, &p)
    };
    let lab = Lab::with_zero_tol(p.mesh, p.zero_tol)?;
    Ok((cfg, Outcome::json(&conjecture_probe(&lab, a.rank_tol)?)?))
}

fn mesh_export(cli: &Cli, a: &MeshExportArgs) -> CliResult<(RunConfig, Outcome)> {
    let p = prepare(&a.family, &a.mesh)?;
    let cfg = mesh_config("mesh-export", cli, &a.family, &p);
    Ok((cfg, Outcome::json(&MeshFile::from_mesh(&p.mesh))?))
}

fn mesh_import(cli: &Cli, a: &MeshImportArgs) -> CliResult<(RunConfig, Outcome)> {
    let mesh = MeshFile::read(&a.input)?.into_mesh()?;
    let zero_tol = match a.zero_tol {
        Some(z) if !(z >= 0.0) => {
            return Err(validation(format!("zero_tol {z} must be nonnegative")))
        }
        Some(z) => z,
        None => default_zero_tol(&mesh),
    };
    let cfg = RunConfig {
        input: Some(a.input.clone()),
        count: Some(a.count),
        zero_tol: Some(zero_tol),
        resolution: Some(vec![mesh.vertex_count()]),
        ..base_config("mesh-import", cli)
    };
    let spectrum = solve_spectrum(&mesh, a.count, zero_tol, false, false)?;
    let identities = gauss_identities(&mesh, &assemble(&mesh)?);
    let table = eigen_table(&spectrum.report);
    let result =
        json!({ "spectrum": spectrum, "identities": identities, "ratio": ratio_report(&mesh) });
    Ok((
        cfg,
        Outcome {
            result,
            table: Some(table),
        },
    ))
}

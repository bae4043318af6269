use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "mhs",
    version,
    about = "Morse index of the Jacobi operator on minimal hypersurfaces of spheres"
)]
pub struct Cli {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    /// Spectrum and scan tables only.
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form spectra of spheres, equators and Clifford hypersurfaces.
    Oracle(OracleArgs),
    /// Geometry summary of a family; `--scan` tabulates the rotation number.
    Family(FamilyArgs),
    /// Lowest eigenvalues, Morse index and nullity of a meshed surface.
    Spectrum(SpectrumArgs),
    /// Identities, Gram rank, theorem check, chain draws and the form on Λ.
    PaperCheck(PaperArgs),
    /// The inequality chain for given or seeded coefficients.
    Chain(ChainArgs),
    /// Negative inertia of the stability form on Λ.
    Conjecture(ConjectureArgs),
    /// Write a mesh JSON file.
    MeshExport(MeshExportArgs),
    /// Spectrum and identities of a user-supplied mesh.
    MeshImport(MeshImportArgs),
}

impl Command {
    pub fn family_mut(&mut self) -> Option<&mut FamilySpec> {
        match self {
            Command::Family(a) => Some(&mut a.family),
            Command::Spectrum(a) => Some(&mut a.family),
            Command::PaperCheck(a) => Some(&mut a.family),
            Command::Chain(a) => Some(&mut a.family),
            Command::Conjecture(a) => Some(&mut a.family),
            Command::MeshExport(a) => Some(&mut a.family),
            Command::Oracle(_) | Command::MeshImport(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleKind {
    Clifford,
    Equator,
    Sphere,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(value_enum)]
    pub kind: OracleKind,
    /// Hypersurface dimension (sphere dimension for `sphere`).
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Eigenvalue cutoff of the Jacobi tables.
    #[arg(long, default_value_t = 10.0)]
    pub cutoff: f64,
    /// Highest degree for `sphere`.
    #[arg(long, default_value_t = 6)]
    pub jmax: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyName {
    Equator,
    #[default]
    Clifford,
    Otsuki,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FamilySpec {
    /// Family name, given positionally or with `--family`.
    #[arg(
        value_enum,
        value_name = "FAMILY",
        required_unless_present = "family_flag"
    )]
    #[serde(skip)]
    pub name: Option<FamilyName>,
    #[arg(
        long = "family",
        id = "family_flag",
        value_enum,
        conflicts_with = "name"
    )]
    #[serde(skip)]
    pub family_flag: Option<FamilyName>,
    /// Resolved from `name` or `--family` after parsing.
    #[arg(skip)]
    pub family: FamilyName,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Rotational family: `v` advances by `2πp/q` per profile period
    /// (default 2/3).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u32>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<u32>,
}

impl FamilySpec {
    pub fn resolve(&mut self) {
        if let Some(f) = self.name.or(self.family_flag) {
            self.family = f;
        }
    }

    /// Fills defaults for the parameters the family uses and drops the rest.
    pub fn normalized(&self) -> FamilySpec {
        let mut s = self.clone();
        match s.family {
            FamilyName::Otsuki => {
                s.p = Some(s.p.unwrap_or(2));
                s.q = Some(s.q.unwrap_or(3));
                s.k = 0;
            }
            FamilyName::Equator => {
                s.p = None;
                s.q = None;
                s.k = 0;
            }
            FamilyName::Clifford => {
                s.p = None;
                s.q = None;
            }
        }
        s
    }

    pub fn pq(&self) -> (u32, u32) {
        (self.p.unwrap_or(2), self.q.unwrap_or(3))
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MeshSpec {
    /// Equator: icosphere subdivisions (default 4). Clifford: `res×res`
    /// (default 64). Otsuki: `4·res × res` (default 64).
    #[arg(long)]
    pub res: Option<usize>,
    /// Override the grid size along the first torus parameter.
    #[arg(long)]
    pub nt: Option<usize>,
    /// Override the grid size along the second torus parameter.
    #[arg(long)]
    pub nphi: Option<usize>,
    /// Zero band for index and nullity (default `0.05·h²/h²₆₄`).
    #[arg(long)]
    pub zero_tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    #[command(flatten)]
    pub family: FamilySpec,
    /// Quadrature nodes per parameter axis.
    #[arg(long, default_value_t = 128)]
    pub res: usize,
    /// Root-finding tolerance on the rotation number.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Include the sampled profile `{period, samples, clairaut, p, q}`.
    #[arg(long)]
    pub profile: bool,
    /// Tabulate the rotation number at this many Clairaut constants.
    #[arg(long)]
    pub scan: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub family: FamilySpec,
    #[command(flatten)]
    pub mesh: MeshSpec,
    #[arg(long, default_value_t = 12)]
    pub count: usize,
    /// Solve densely (at most 3000 unknowns).
    #[arg(long)]
    pub dense: bool,
    /// Include eigenvectors in the report.
    #[arg(long)]
    pub vectors: bool,
}

#[derive(Debug, Args)]
pub struct PaperArgs {
    #[command(flatten)]
    pub family: FamilySpec,
    #[command(flatten)]
    pub mesh: MeshSpec,
    #[arg(long, default_value_t = 0.5)]
    pub delta1: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub rank_tol: f64,
    #[arg(long, default_value_t = 100)]
    pub draws: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ChainArgs {
    #[command(flatten)]
    pub family: FamilySpec,
    #[command(flatten)]
    pub mesh: MeshSpec,
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    /// Comma-separated vector in R⁴.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub w: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.5)]
    pub delta1: f64,
    /// Seeded draws used when `a`, `b`, `w` are not all given.
    #[arg(long, default_value_t = 100)]
    pub draws: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ConjectureArgs {
    #[command(flatten)]
    pub family: FamilySpec,
    #[command(flatten)]
    pub mesh: MeshSpec,
    #[arg(long, default_value_t = 1e-8)]
    pub rank_tol: f64,
}

#[derive(Debug, Args)]
pub struct MeshExportArgs {
    #[command(flatten)]
    pub family: FamilySpec,
    #[command(flatten)]
    pub mesh: MeshSpec,
}

#[derive(Debug, Args)]
pub struct MeshImportArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 12)]
    pub count: usize,
    #[arg(long)]
    pub zero_tol: Option<f64>,
}

/// Everything a report depends on, echoed verbatim into it.
#[derive(Debug, Clone, Default, Serialize)]
pub struct RunConfig {
    pub subcommand: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilySpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolution: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zero_tol: Option<f64>,
    /// Rotation-number tolerance of a generated profile.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub draws: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
}

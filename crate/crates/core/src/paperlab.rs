//! Trial-space experiments on a meshed minimal surface: test-function
//! identities, the Gram rank of `Γ = {aρ + f_w + l_v}`, the `v₀` selection and
//! negativity of `Γ₀ = {aρ + l_w + b f_{v₀}}`, the completed-square chain, and
//! the form on `Λ = {a + f_w + l_v}`.
//!
//! Every form is evaluated weakly with the assembled matrices: `∫gh = gᵀMh`,
//! `∫g J h = gᵀ(K - W)h` and `∫|A|² g h = gᵀ(W - nM)h`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent f64 methods shadow these when std is linked
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::fem::{assemble, project_f, project_l, unit, OperatorSet, SurfaceMesh, Vec4};
use crate::linalg::{reduced_pencil, sym_eigen, CsrMatrix};
use crate::spectral::{default_zero_tol, first_eigfunction, inertia_below};
use crate::{Error, Result};

pub const DEFAULT_RANK_TOL: f64 = 1e-8;
pub const AMBIENT: usize = 4;

/// A mesh with its operators, ground state and Morse index.
#[derive(Debug, Clone)]
pub struct Lab {
    pub mesh: SurfaceMesh,
    pub ops: OperatorSet,
    /// `W - nM`
    pub asq_mass: CsrMatrix,
    pub zero_tol: f64,
    pub lambda1: f64,
    pub rho: Vec<f64>,
    /// Eigenvalues below `-zero_tol`, by inertia.
    pub index: usize,
}

impl Lab {
    pub fn new(mesh: SurfaceMesh) -> Result<Lab> {
        let zt = default_zero_tol(&mesh);
        Lab::with_zero_tol(mesh, zt)
    }

    pub fn with_zero_tol(mesh: SurfaceMesh, zero_tol: f64) -> Result<Lab> {
        let ops = assemble(&mesh)?;
        let (lambda1, rho) = first_eigfunction(&ops)?;
        let index = inertia_below(&ops, -zero_tol)?;
        let asq_mass = ops.asq_mass();
        Ok(Lab {
            mesh,
            ops,
            asq_mass,
            zero_tol,
            lambda1,
            rho,
            index,
        })
    }

    pub fn n(&self) -> usize {
        self.mesh.n
    }

    pub fn area(&self) -> f64 {
        self.mesh.area()
    }

    pub fn l(&self, v: &Vec4) -> Vec<f64> {
        project_l(&self.mesh, v)
    }

    pub fn f(&self, v: &Vec4) -> Vec<f64> {
        project_f(&self.mesh, v)
    }

    /// `∫|A|² g h`
    pub fn asq(&self, g: &[f64], h: &[f64]) -> f64 {
        self.asq_mass.bilinear(g, h)
    }

    /// Builds the Gram and stability matrices on a labelled basis.
    pub fn form_report(
        &self,
        labels: Vec<String>,
        basis: &[Vec<f64>],
        rank_tol: f64,
    ) -> Result<FormReport> {
        form_report(&self.ops, labels, basis, rank_tol, self.zero_tol)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub area: f64,
    /// `∫ l_{e_a}`
    pub mean_l: Vec<f64>,
    /// `∫ |A|² f_{e_a}`
    pub asq_f: Vec<f64>,
    /// `∫ (|A|² - n) l_{e_a} f_{e_b}`, row-major in `(a, b)`.
    pub green: Vec<f64>,
    /// Largest of all residuals divided by `|M|`.
    pub max_relative: f64,
}

/// Needs only the mesh and its operators, so it stays cheap on fine meshes.
pub fn gauss_identities(mesh: &SurfaceMesh, ops: &OperatorSet) -> IdentityReport {
    let ones = vec![1.0; ops.dim()];
    let n = mesh.n as f64;
    let asq_mass = ops.asq_mass();
    let green_mass = ops.weighted.add_scaled(1.0, &ops.mass, -2.0 * n);
    let ls: Vec<Vec<f64>> = (0..AMBIENT).map(|a| project_l(mesh, &unit(a))).collect();
    let fs: Vec<Vec<f64>> = (0..AMBIENT).map(|a| project_f(mesh, &unit(a))).collect();
    let mean_l: Vec<f64> = ls.iter().map(|l| ops.l2(&ones, l)).collect();
    let asq_f: Vec<f64> = fs.iter().map(|f| asq_mass.bilinear(&ones, f)).collect();
    let mut green = Vec::with_capacity(AMBIENT * AMBIENT);
    for l in &ls {
        for f in &fs {
            green.push(green_mass.bilinear(l, f));
        }
    }
    let area = mesh.area();
    let worst = mean_l
        .iter()
        .chain(&asq_f)
        .chain(&green)
        .fold(0.0_f64, |m, v| m.max(v.abs()));
    IdentityReport {
        area,
        mean_l,
        asq_f,
        green,
        max_relative: worst / area,
    }
}

/// Gram matrix `G`, stability matrix `B` and the inertia of the pencil on the
/// `G`-positive subspace.
#[derive(Debug, Clone, Serialize)]
pub struct FormReport {
    pub basis_labels: Vec<String>,
    pub g: Vec<f64>,
    pub b: Vec<f64>,
    pub rank: usize,
    pub rank_tol: f64,
    /// Ritz values below `-zero_tol`.
    pub neg_inertia: usize,
    pub zero_tol: f64,
    /// Eigenvalues of the reduced pencil, ascending.
    pub ritz_values: Vec<f64>,
    pub gram_eigenvalues: Vec<f64>,
    pub b_asymmetry: f64,
    #[serde(skip)]
    pub ritz_coefficients: Vec<Vec<f64>>,
}

impl FormReport {
    pub fn dim(&self) -> usize {
        self.basis_labels.len()
    }

    pub fn max_ritz(&self) -> f64 {
        self.ritz_values.last().copied().unwrap_or(f64::NAN)
    }
}

pub fn form_report(
    ops: &OperatorSet,
    basis_labels: Vec<String>,
    basis: &[Vec<f64>],
    rank_tol: f64,
    zero_tol: f64,
) -> Result<FormReport> {
    let d = basis.len();
    if d != basis_labels.len() {
        return Err(Error::InvalidParameter(
            "basis and label counts differ".into(),
        ));
    }
    let stability = ops.stability();
    let mb: Vec<Vec<f64>> = basis.iter().map(|v| ops.mass.mul_vec(v)).collect();
    let bb: Vec<Vec<f64>> = basis.iter().map(|v| stability.mul_vec(v)).collect();
    let mut g = vec![0.0; d * d];
    let mut b = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            g[i * d + j] = crate::linalg::dot(&basis[i], &mb[j]);
            b[i * d + j] = crate::linalg::dot(&basis[i], &bb[j]);
        }
    }
    let bscale = b.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let mut asym: f64 = 0.0;
    for i in 0..d {
        for j in 0..i {
            asym = asym.max((b[i * d + j] - b[j * d + i]).abs());
            let (gs, bs) = (
                0.5 * (g[i * d + j] + g[j * d + i]),
                0.5 * (b[i * d + j] + b[j * d + i]),
            );
            g[i * d + j] = gs;
            g[j * d + i] = gs;
            b[i * d + j] = bs;
            b[j * d + i] = bs;
        }
    }
    let red = reduced_pencil(&b, &g, d, rank_tol)?;
    Ok(FormReport {
        basis_labels,
        rank: red.rank,
        rank_tol,
        neg_inertia: red.values.iter().filter(|&&v| v < -zero_tol).count(),
        zero_tol,
        ritz_values: red.values,
        gram_eigenvalues: red.gram_eigenvalues,
        b_asymmetry: if bscale > 0.0 { asym / bscale } else { 0.0 },
        ritz_coefficients: red.coefficients,
        g,
        b,
    })
}

fn labelled(prefix: &str) -> impl Iterator<Item = String> + '_ {
    (1..=AMBIENT).map(move |a| format!("{prefix}_e{a}"))
}

/// `{ρ, f_{e₁..e₄}, l_{e₁..e₄}}` in that order.
pub fn gamma_basis(lab: &Lab) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut labels = vec!["rho".to_string()];
    labels.extend(labelled("f"));
    labels.extend(labelled("l"));
    let mut basis = vec![lab.rho.clone()];
    basis.extend((0..AMBIENT).map(|a| lab.f(&unit(a))));
    basis.extend((0..AMBIENT).map(|a| lab.l(&unit(a))));
    (labels, basis)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaVerdict {
    FullRank,
    Collapsed,
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaReport {
    pub rank: usize,
    pub expected: usize,
    pub verdict: LemmaVerdict,
    pub form: FormReport,
}

pub fn lemma_check(lab: &Lab, rank_tol: f64) -> Result<LemmaReport> {
    let (labels, basis) = gamma_basis(lab);
    let form = lab.form_report(labels, &basis, rank_tol)?;
    let expected = 2 * lab.n() + 5;
    let verdict = if form.rank == expected {
        LemmaVerdict::FullRank
    } else {
        LemmaVerdict::Collapsed
    };
    Ok(LemmaReport {
        rank: form.rank,
        expected,
        verdict,
        form,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct V0Choice {
    pub v0: Vec4,
    /// Smallest eigenvalue of `Q`, i.e. `∫(|A|² - nδ₂) f_{v₀}²`.
    pub value: f64,
    pub q: Vec<f64>,
    /// `|trace Q - ∫(|A|² - nδ₂)|` relative to `∫||A|² - nδ₂|`.
    pub trace_residual: f64,
}

/// Minimizes `∫(|A|² - nδ₂) f_v²` over unit `v` using quadrature-node normals.
pub fn choose_v0(lab: &Lab, delta2: f64) -> Result<V0Choice> {
    if !(delta2 > 0.0 && delta2 < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "delta2 = {delta2} outside (0, 1)"
        )));
    }
    let shift = lab.n() as f64 * delta2;
    let mut q = vec![0.0; AMBIENT * AMBIENT];
    let mut total = 0.0;
    let mut total_abs = 0.0;
    for qp in lab.mesh.quad_points.iter().flatten() {
        let c = qp.weight * (qp.asq - shift);
        total += c;
        total_abs += c.abs();
        for a in 0..AMBIENT {
            for b in 0..AMBIENT {
                q[a * AMBIENT + b] += c * qp.normal[a] * qp.normal[b];
            }
        }
    }
    let trace: f64 = (0..AMBIENT).map(|a| q[a * AMBIENT + a]).sum();
    let eig = sym_eigen(&q, AMBIENT)?;
    let v = eig.vector(0);
    Ok(V0Choice {
        v0: [v[0], v[1], v[2], v[3]],
        value: eig.values[0],
        q,
        trace_residual: (trace - total).abs() / total_abs.max(f64::MIN_POSITIVE),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremVerdict {
    NegativeDefinite,
    NotNegativeDefinite,
    HypothesesNotMet,
    ExcludedGeodesic,
}

#[derive(Debug, Clone, Serialize)]
pub struct TheoremReport {
    pub delta1: f64,
    pub delta2: f64,
    pub integral_asq: f64,
    pub area: f64,
    pub max_asq: f64,
    pub hyp_integral: bool,
    pub hyp_pointwise: bool,
    pub geodesic_flag: bool,
    pub v0: Vec4,
    pub v0_value: f64,
    pub lambda1: f64,
    pub gamma0: FormReport,
    pub gamma0_max_eig: f64,
    pub verdict: TheoremVerdict,
    /// Morse index of the mesh at `zero_tol`.
    pub index: usize,
    /// `neg_inertia(Γ₀) ≤ index`
    pub rayleigh_ritz_consistent: bool,
    /// `n + 4` when the verdict is negative definite.
    pub certified_index_bound: Option<usize>,
    /// Eigenvalues strictly below 0 by inertia; computed only to confirm a
    /// negative-definite verdict, whose Ritz values may sit inside the zero
    /// band.
    pub strict_negative_count: Option<usize>,
    /// `strict_negative_count ≥ n + 4` whenever a bound is certified.
    pub certificate_consistent: bool,
}

/// Relative slack for the hypothesis comparisons, so exact equalities such as
/// `|A|² = 2nδ₁` on the Clifford torus count as satisfied.
const HYPOTHESIS_SLACK: f64 = 1e-12;

fn check_split(delta1: f64, delta2: f64) -> Result<()> {
    if !(delta1 > 0.0 && delta2 > 0.0 && (delta1 + delta2 - 1.0).abs() <= 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "delta1 = {delta1}, delta2 = {delta2} must be positive with sum 1"
        )));
    }
    Ok(())
}

/// `{ρ, l_{e₁..e₄}, f_{v₀}}`
pub fn gamma0_basis(lab: &Lab, v0: &Vec4) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut labels = vec!["rho".to_string()];
    labels.extend(labelled("l"));
    labels.push("f_v0".to_string());
    let mut basis = vec![lab.rho.clone()];
    basis.extend((0..AMBIENT).map(|a| lab.l(&unit(a))));
    basis.push(lab.f(v0));
    (labels, basis)
}

pub fn theorem_check(lab: &Lab, delta1: f64, delta2: f64, rank_tol: f64) -> Result<TheoremReport> {
    check_split(delta1, delta2)?;
    let n = lab.n();
    let nf = n as f64;
    let area = lab.area();
    let integral_asq = lab.mesh.integrate(|q| q.asq);
    let max_asq = lab
        .mesh
        .max_asq()
        .max(lab.mesh.vertex_asq.iter().fold(0.0_f64, |m, &a| m.max(a)));
    let hyp_integral = integral_asq <= delta2 * nf * area * (1.0 + HYPOTHESIS_SLACK);
    let hyp_pointwise = max_asq <= 2.0 * nf * delta1 * (1.0 + HYPOTHESIS_SLACK);
    let geodesic_flag = max_asq <= 1e-12;
    let choice = choose_v0(lab, delta2)?;
    let (labels, basis) = gamma0_basis(lab, &choice.v0);
    let gamma0 = lab.form_report(labels, &basis, rank_tol)?;
    let gamma0_max_eig = gamma0.max_ritz();
    let verdict = if geodesic_flag {
        TheoremVerdict::ExcludedGeodesic
    } else if !(hyp_integral && hyp_pointwise) {
        TheoremVerdict::HypothesesNotMet
    } else if gamma0.rank == n + 4 && gamma0_max_eig < 0.0 {
        TheoremVerdict::NegativeDefinite
    } else {
        TheoremVerdict::NotNegativeDefinite
    };
    let certified_index_bound = (verdict == TheoremVerdict::NegativeDefinite).then_some(n + 4);
    let strict_negative_count = match certified_index_bound {
        Some(_) => Some(inertia_below(&lab.ops, 0.0)?),
        None => None,
    };
    let certificate_consistent = match (certified_index_bound, strict_negative_count) {
        (Some(bound), Some(count)) => count >= bound,
        _ => true,
    };
    Ok(TheoremReport {
        delta1,
        delta2,
        integral_asq,
        area,
        max_asq,
        hyp_integral,
        hyp_pointwise,
        geodesic_flag,
        v0: choice.v0,
        v0_value: choice.value,
        lambda1: lab.lambda1,
        rayleigh_ritz_consistent: gamma0.neg_inertia <= lab.index,
        certified_index_bound,
        strict_negative_count,
        certificate_consistent,
        gamma0_max_eig,
        gamma0,
        verdict,
        index: lab.index,
    })
}

/// The three lines of the inequality chain for `f = aρ + l_w + b f_{v₀}`.
#[derive(Debug, Clone, Serialize)]
pub struct ChainRecord {
    pub a: f64,
    pub b: f64,
    pub w: Vec4,
    pub delta1: f64,
    pub delta2: f64,
    pub v0: Vec4,
    /// `fᵀ(K - W)f`
    pub l0: f64,
    /// Expanded first line.
    pub l0e: f64,
    /// `λ₁` replaced by `-2n`.
    pub l1: f64,
    /// Completed squares.
    pub l2: f64,
    /// `[a²∫ρ²(|A|²/δ₁ - 2n), -∫|A|²(aρ/√δ₁ + √δ₁ l_w)², -∫|A|²(b f/√δ₂ + √δ₂ l_w)², b²∫(|A|²/δ₂ - n)f²]`
    pub l2_terms: [f64; 4],
    pub residual_l0: f64,
    pub residual_l12: f64,
    /// Sum of absolute values of every contributing integral.
    pub scale: f64,
    /// `a²∫ρ²`
    pub rho_weight: f64,
    pub lambda1: f64,
}

impl ChainRecord {
    pub fn identity_holds(&self, tol: f64) -> bool {
        self.residual_l12 <= tol * self.scale
    }

    pub fn ordering_holds(&self, tol: f64) -> bool {
        self.l0 <= self.l1 + tol * self.scale
    }

    /// `L1 - L0 ≥ (-2n - λ₁ - tol)·a²∫ρ²`
    pub fn gap_holds(&self, n: usize, tol: f64) -> bool {
        self.l1 - self.l0 >= (-2.0 * n as f64 - self.lambda1 - tol) * self.rho_weight
    }
}

pub fn chain_verify(
    lab: &Lab,
    a: f64,
    b: f64,
    w: &Vec4,
    delta1: f64,
    delta2: f64,
) -> Result<ChainRecord> {
    check_split(delta1, delta2)?;
    if a == 0.0 && b == 0.0 && w.iter().all(|&c| c == 0.0) {
        return Err(Error::InvalidParameter("(a, b, w) must not vanish".into()));
    }
    let v0 = choose_v0(lab, delta2)?.v0;
    chain_with_v0(lab, a, b, w, delta1, delta2, &v0)
}

pub fn chain_with_v0(
    lab: &Lab,
    a: f64,
    b: f64,
    w: &Vec4,
    delta1: f64,
    delta2: f64,
    v0: &Vec4,
) -> Result<ChainRecord> {
    check_split(delta1, delta2)?;
    let nf = lab.n() as f64;
    let rho = &lab.rho;
    let lw = lab.l(w);
    let fv = lab.f(v0);
    let f: Vec<f64> = (0..rho.len())
        .map(|i| a * rho[i] + lw[i] + b * fv[i])
        .collect();
    let l0 = lab.ops.form(&f, &f);

    let rho2 = lab.ops.l2(rho, rho);
    let f2 = lab.ops.l2(&fv, &fv);
    let asq_ll = lab.asq(&lw, &lw);
    let asq_lf = lab.asq(&lw, &fv);
    let asq_rl = lab.asq(rho, &lw);
    let asq_rr = lab.asq(rho, rho);
    let asq_ff = lab.asq(&fv, &fv);

    let head = [
        a * a * lab.lambda1 * rho2,
        -asq_ll,
        -nf * b * b * f2,
        -2.0 * b * asq_lf,
        -2.0 * a * asq_rl,
    ];
    let l0e: f64 = head.iter().sum();
    let l1 = l0e - head[0] - 2.0 * a * a * nf * rho2;

    let (s1, s2) = (delta1.sqrt(), delta2.sqrt());
    let g1: Vec<f64> = (0..rho.len())
        .map(|i| a * rho[i] / s1 + s1 * lw[i])
        .collect();
    let g2: Vec<f64> = (0..rho.len())
        .map(|i| b * fv[i] / s2 + s2 * lw[i])
        .collect();
    let terms = [
        a * a * (asq_rr / delta1 - 2.0 * nf * rho2),
        -lab.asq(&g1, &g1),
        -lab.asq(&g2, &g2),
        b * b * (asq_ff / delta2 - nf * f2),
    ];
    let l2: f64 = terms.iter().sum();
    let scale = l0.abs()
        + head.iter().map(|t| t.abs()).sum::<f64>()
        + 2.0 * a * a * nf * rho2
        + a * a * (asq_rr / delta1 + 2.0 * nf * rho2)
        + terms[1].abs()
        + terms[2].abs()
        + b * b * (asq_ff / delta2 + nf * f2);
    Ok(ChainRecord {
        a,
        b,
        w: *w,
        delta1,
        delta2,
        v0: *v0,
        l0,
        l0e,
        l1,
        l2,
        l2_terms: terms,
        residual_l0: (l0 - l0e).abs(),
        residual_l12: (l1 - l2).abs(),
        scale,
        rho_weight: a * a * rho2,
        lambda1: lab.lambda1,
    })
}

/// One seeded chain sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainDraw {
    pub a: f64,
    pub b: f64,
    pub w: Vec4,
    pub delta1: f64,
}

/// ChaCha8 draws of `(a, b, w, δ₁)` with `a, b, w_i ∈ [-1, 1)` and
/// `δ₁ ∈ [0.05, 0.95)`.
pub fn chain_draws(draws: usize, seed: u64) -> Vec<ChainDraw> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..draws)
        .map(|_| {
            let a = rng.gen_range(-1.0..1.0);
            let b = rng.gen_range(-1.0..1.0);
            let w: Vec4 = core::array::from_fn(|_| rng.gen_range(-1.0..1.0));
            ChainDraw {
                a,
                b,
                w,
                delta1: rng.gen_range(0.05..0.95),
            }
        })
        .collect()
}

pub fn chain_for_draw(lab: &Lab, d: &ChainDraw) -> Result<ChainRecord> {
    chain_verify(lab, d.a, d.b, &d.w, d.delta1, 1.0 - d.delta1)
}

pub fn random_chain_draws(lab: &Lab, draws: usize, seed: u64) -> Result<Vec<ChainRecord>> {
    chain_draws(draws, seed)
        .iter()
        .map(|d| chain_for_draw(lab, d))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ConjectureReport {
    pub form: FormReport,
    pub target: usize,
    /// `neg_inertia ≥ n + 4`
    pub reaches_target: bool,
    pub index: usize,
}

/// `{1, f_{e₁..e₄}, l_{e₁..e₄}}`
pub fn lambda_basis(lab: &Lab) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut labels = vec!["one".to_string()];
    labels.extend(labelled("f"));
    labels.extend(labelled("l"));
    let mut basis = vec![vec![1.0; lab.ops.dim()]];
    basis.extend((0..AMBIENT).map(|a| lab.f(&unit(a))));
    basis.extend((0..AMBIENT).map(|a| lab.l(&unit(a))));
    (labels, basis)
}

pub fn conjecture_probe(lab: &Lab, rank_tol: f64) -> Result<ConjectureReport> {
    let (labels, basis) = lambda_basis(lab);
    let form = lab.form_report(labels, &basis, rank_tol)?;
    let target = lab.n() + 4;
    Ok(ConjectureReport {
        reaches_target: form.neg_inertia >= target,
        target,
        index: lab.index,
        form,
    })
}

/// `∫|A|² / (n|M|)`
pub fn ratio_report(mesh: &SurfaceMesh) -> f64 {
    mesh.integrate(|q| q.asq) / (mesh.n as f64 * mesh.area())
}

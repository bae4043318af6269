//! Acceptance gate: one PASS/FAIL line per criterion, evaluated at the stated
//! tolerances. Set `MHS_ACCEPTANCE_STRICT=1` to turn any FAIL into a non-zero
//! exit status.

use std::time::{Duration, Instant};

use mhs_core::closedform::{clifford_jacobi, equator_jacobi};
use mhs_core::fem::{assemble, mesh_sphere, mesh_torus, SurfaceMesh};
use mhs_core::geometry::{check_minimality, clifford, GeometryFamily};
use mhs_core::paperlab::{
    chain_draws, chain_for_draw, conjecture_probe, gamma0_basis, gamma_basis, gauss_identities,
    lemma_check, theorem_check, IdentityReport, Lab, TheoremVerdict, DEFAULT_RANK_TOL,
};
use mhs_core::rotational::{build_surface, find_otsuki, ProfileCurve};
use mhs_core::spectral::{inertia_below, lowest_eigs, EigenReport};

struct Gate {
    passed: usize,
    total: usize,
}

impl Gate {
    fn record(&mut self, id: &str, ok: bool, summary: String, info: &[String]) {
        self.total += 1;
        self.passed += ok as usize;
        println!("{} {id:>3}  {summary}", if ok { "PASS" } else { "FAIL" });
        for line in info {
            println!("          {line}");
        }
    }
}

fn secs(d: Duration) -> String {
    format!("{:.2} s", d.as_secs_f64())
}

struct Case {
    lab: Lab,
    eig: EigenReport,
    inertia: usize,
}

/// Lowest eigenpairs covering the whole index and zero band.
fn solve_case(mesh: SurfaceMesh, zero_tol: f64, min_count: usize) -> Case {
    let lab = Lab::with_zero_tol(mesh, zero_tol).expect("lab");
    let below_band = inertia_below(&lab.ops, zero_tol).expect("inertia");
    let eig = lowest_eigs(&lab.ops, min_count.max(below_band + 4), zero_tol).expect("eigs");
    let inertia = lab.index;
    Case { lab, eig, inertia }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

fn identity_parts(ids: &IdentityReport) -> [f64; 3] {
    [
        max_abs(&ids.mean_l) / ids.area,
        max_abs(&ids.asq_f) / ids.area,
        max_abs(&ids.green) / ids.area,
    ]
}

fn otsuki_mesh(profile: &ProfileCurve, nt: usize, nphi: usize) -> (GeometryFamily, SurfaceMesh) {
    let fam = build_surface(profile, nt, nphi).expect("otsuki surface");
    let mesh = mesh_torus(&fam, nt, nphi).expect("otsuki mesh");
    (fam, mesh)
}

fn main() {
    let mut gate = Gate {
        passed: 0,
        total: 0,
    };
    let clifford21 = clifford(2, 1).unwrap();

    // 1. closed-form index table
    let t = Instant::now();
    let mut bad = Vec::new();
    for n in 2..=12usize {
        for k in 1..n {
            let idx = clifford_jacobi(n, k, 0.0).unwrap().index;
            if idx != (n + 3) as u64 {
                bad.push(format!("clifford({n},{k}) index {idx}"));
            }
        }
        let idx = equator_jacobi(n, 0.0).unwrap().index;
        if idx != 1 {
            bad.push(format!("equator({n}) index {idx}"));
        }
    }
    let el = t.elapsed();
    gate.record(
        "C1",
        bad.is_empty() && el < Duration::from_secs(1),
        format!(
            "closed-form index: clifford = n+3, equator = 1 for 2 ≤ n ≤ 12 ({})",
            secs(el)
        ),
        &bad,
    );

    // 2. FEM Clifford torus 64×64
    let t = Instant::now();
    let cmesh = mesh_torus(&clifford21, 64, 64).unwrap();
    let cliff = solve_case(cmesh, 0.05, 12);
    let el = t.elapsed();
    let e = &cliff.eig;
    let ok = e.index == 5
        && (e.lambda1 + 4.0).abs() <= 5e-2
        && e.nullity == 4
        && cliff.inertia == 5
        && el < Duration::from_secs(30);
    gate.record(
        "C2",
        ok,
        format!(
            "Clifford 64x64: index {} (inertia {}), nullity {}, λ₁ = {:.6} ({})",
            e.index,
            cliff.inertia,
            e.nullity,
            e.lambda1,
            secs(el)
        ),
        &[format!(
            "lowest 12: {:?}",
            e.eigenvalues
                .iter()
                .take(12)
                .map(|v| format!("{v:.5}"))
                .collect::<Vec<_>>()
        )],
    );

    // 3. FEM equator, subdivision 4
    let t = Instant::now();
    let smesh = mesh_sphere(4).unwrap();
    let zt = mhs_core::spectral::default_zero_tol(&smesh);
    let sphere = solve_case(smesh, zt, 8);
    let el = t.elapsed();
    let e = &sphere.eig;
    let ok = e.index == 1
        && (e.lambda1 + 2.0).abs() <= 5e-2
        && sphere.inertia == 1
        && el < Duration::from_secs(10);
    gate.record(
        "C3",
        ok,
        format!(
            "equator icosphere(4): index {}, λ₁ = {:.6}, zero_tol {:.4} ({})",
            e.index,
            e.lambda1,
            zt,
            secs(el)
        ),
        &[],
    );

    // 4. convergence order and monotonicity on Clifford(2,1)
    let t = Instant::now();
    let spectra: Vec<Vec<f64>> = [16usize, 32]
        .iter()
        .map(|&r| {
            let ops = assemble(&mesh_torus(&clifford21, r, r).unwrap()).unwrap();
            lowest_eigs(&ops, 12, 0.05).unwrap().eigenvalues
        })
        .chain(std::iter::once(cliff.eig.eigenvalues[..12].to_vec()))
        .collect();
    let order = |k: usize, exact: f64| -> [f64; 2] {
        let err: Vec<f64> = spectra.iter().map(|s| (s[k] - exact).abs()).collect();
        [(err[0] / err[1]).log2(), (err[1] / err[2]).log2()]
    };
    let errs1: Vec<f64> = spectra.iter().map(|s| (s[0] + 4.0).abs()).collect();
    // Errors at roundoff level carry no rate.
    let measurable = errs1.iter().all(|&e| e > 1e-10);
    let o1 = order(0, -4.0);
    let rate_ok = measurable && o1.iter().all(|o| (1.7..=2.3).contains(o));
    let monotone = (0..12)
        .all(|k| spectra[0][k] >= spectra[1][k] - 1e-10 && spectra[1][k] >= spectra[2][k] - 1e-10);
    let o2 = order(1, -2.0);
    gate.record(
        "C4",
        rate_ok && monotone,
        format!(
            "λ₁ convergence order on 16/32/64 in [1.7, 2.3]: errors {:?}, orders {}; monotone {} ({})",
            errs1.iter().map(|e| format!("{e:.1e}")).collect::<Vec<_>>(),
            if measurable { format!("{:.3}, {:.3}", o1[0], o1[1]) } else { "undefined (λ₁ exact)".into() },
            monotone,
            secs(t.elapsed())
        ),
        &[format!("info: λ₂ → -2 orders {:.3}, {:.3}", o2[0], o2[1])],
    );

    // 9 (generation part, shared with 5, 6, 7, 8)
    let t9 = Instant::now();
    let profile = find_otsuki(2, 3, 1e-12).unwrap();
    let (ofam, omesh) = otsuki_mesh(&profile, 256, 64);
    let samples: Vec<Vec<f64>> = omesh_params(&ofam, 256, 64);
    let max_trace = check_minimality(&ofam, &samples).unwrap();
    let ozt = mhs_core::spectral::default_zero_tol(&omesh);
    let ots = solve_case(omesh, ozt, 12);
    let el9 = t9.elapsed();

    // 5. identity suite
    let t = Instant::now();
    let cid = identity_parts(&gauss_identities(&cliff.lab.mesh, &cliff.lab.ops));
    let oid = identity_parts(&gauss_identities(&ots.lab.mesh, &ots.lab.ops));
    let (_, coarse) = otsuki_mesh(&profile, 128, 32);
    let coarse_id = identity_parts(&gauss_identities(&coarse, &assemble(&coarse).unwrap()));
    let worst = |p: &[f64; 3]| p.iter().fold(0.0_f64, |m, &v| m.max(v));
    let decrease = worst(&coarse_id) / worst(&oid);
    let ok = worst(&cid) <= 1e-4 && worst(&oid) <= 1e-4 && decrease >= 3.0;
    let (_, fine) = otsuki_mesh(&profile, 1024, 64);
    let fine_id = identity_parts(&gauss_identities(&fine, &assemble(&fine).unwrap()));
    let fmt = |p: &[f64; 3]| format!("[{:.1e}, {:.1e}, {:.1e}]", p[0], p[1], p[2]);
    gate.record(
        "C5",
        ok,
        format!(
            "identities / |M| ≤ 1e-4: Clifford {} Otsuki 256x64 {}; decrease 128x32 → 256x64 {:.2}x ({})",
            fmt(&cid),
            fmt(&oid),
            decrease,
            secs(t.elapsed())
        ),
        &[
            "order: [∫l_v, ∫|A|²f_v, ∫(|A|²-n) l_w f_v]".into(),
            format!("info: Otsuki 128x32 {}; 1024x64 {}", fmt(&coarse_id), fmt(&fine_id)),
        ],
    );

    // 6. lemma rank
    let ro = lemma_check(&ots.lab, DEFAULT_RANK_TOL).unwrap().rank;
    let rc = lemma_check(&cliff.lab, DEFAULT_RANK_TOL).unwrap().rank;
    let re = lemma_check(&sphere.lab, DEFAULT_RANK_TOL).unwrap().rank;
    gate.record(
        "C6",
        ro == 9 && rc == 5 && re == 4,
        format!("Gram rank on Γ: Otsuki {ro} (9), Clifford {rc} (5), equator {re} (4)"),
        &[],
    );

    // 7. chain identity and ordering
    let t = Instant::now();
    let draws = chain_draws(100, 0);
    let mut ok7 = true;
    let mut info = Vec::new();
    for (name, case) in [("clifford", &cliff), ("otsuki", &ots), ("equator", &sphere)] {
        let recs: Vec<_> = draws
            .iter()
            .map(|d| chain_for_draw(&case.lab, d).unwrap())
            .collect();
        let ident = recs.iter().filter(|r| r.identity_holds(1e-10)).count();
        let applies = case.lab.lambda1 <= -2.0 * case.lab.n() as f64 + 0.05;
        let ordered = recs.iter().filter(|r| r.ordering_holds(1e-6)).count();
        let excess = recs
            .iter()
            .map(|r| (r.l0 - r.l1) / r.scale)
            .fold(f64::NEG_INFINITY, f64::max);
        let l0res = recs
            .iter()
            .map(|r| r.residual_l0 / r.scale)
            .fold(0.0, f64::max);
        ok7 &= ident == recs.len() && (!applies || ordered == recs.len());
        info.push(format!(
            "{name}: |L1-L2| ok {ident}/100; ordering {} {ordered}/100, max (L0-L1)/scale {excess:.2e}, max |L0-L0e|/scale {l0res:.2e}",
            if applies { "applies" } else { "vacuous" },
        ));
    }
    gate.record(
        "C7",
        ok7,
        format!(
            "chain over 100 seeded draws per geometry ({})",
            secs(t.elapsed())
        ),
        &info,
    );

    // 8. Rayleigh–Ritz consistency
    let mut ok8 = true;
    let mut info = Vec::new();
    for (name, case) in [("clifford", &cliff), ("otsuki", &ots), ("equator", &sphere)] {
        let lab = &case.lab;
        let index = case.eig.index;
        let counts_agree = case.eig.complete && index == case.inertia;
        let (gl, gb) = gamma_basis(lab);
        let g = lab
            .form_report(gl, &gb, DEFAULT_RANK_TOL)
            .unwrap()
            .neg_inertia;
        let th = theorem_check(lab, 0.5, 0.5, DEFAULT_RANK_TOL).unwrap();
        let (l0l, l0b) = gamma0_basis(lab, &th.v0);
        let g0 = lab
            .form_report(l0l, &l0b, DEFAULT_RANK_TOL)
            .unwrap()
            .neg_inertia;
        let lam = conjecture_probe(lab, DEFAULT_RANK_TOL)
            .unwrap()
            .form
            .neg_inertia;
        ok8 &= counts_agree && g <= index && g0 <= index && lam <= index;
        info.push(format!(
            "{name}: index {index} (inertia {}), neg_inertia Γ {g}, Γ₀ {g0}, Λ {lam}",
            case.inertia
        ));
    }
    gate.record(
        "C8",
        ok8,
        "neg_inertia on Γ, Γ₀, Λ ≤ spectral Morse index".into(),
        &info,
    );

    // 9. Otsuki generation
    let ok9 = profile.closure_residual <= 1e-8
        && max_trace <= 1e-6
        && ots.eig.index >= 6
        && ots.eig.index == ots.inertia
        && el9 < Duration::from_secs(120);
    gate.record(
        "C9",
        ok9,
        format!(
            "Otsuki(2,3): closure {:.1e}, max|trace A| {:.1e}, FEM index {} at 256x64 ({})",
            profile.closure_residual,
            max_trace,
            ots.eig.index,
            secs(el9)
        ),
        &[format!(
            "info: Clairaut {:.10}, period {:.6}, λ₁ {:.5}, nullity {}, zero_tol {:.4}",
            profile.clairaut, profile.period, ots.eig.lambda1, ots.eig.nullity, ozt
        )],
    );

    // 10. theorem behaviour
    let t = Instant::now();
    let mut ok10 = true;
    let mut info = Vec::new();
    for d1 in [0.001, 0.05, 0.25, 0.5, 0.75, 0.95, 0.999] {
        let v = theorem_check(&cliff.lab, d1, 1.0 - d1, DEFAULT_RANK_TOL)
            .unwrap()
            .verdict;
        ok10 &= v == TheoremVerdict::HypothesesNotMet;
    }
    let ve = theorem_check(&sphere.lab, 0.5, 0.5, DEFAULT_RANK_TOL)
        .unwrap()
        .verdict;
    ok10 &= ve == TheoremVerdict::ExcludedGeodesic;
    info.push(format!(
        "Clifford δ₁ ∈ {{0.001, 0.05, .., 0.999}}: hypotheses_not_met; equator: {ve:?}"
    ));
    let mut certified = 0;
    for s in [0.02, 0.05, 0.1] {
        let lab = Lab::new(coarse.with_scaled_asq(s)).unwrap();
        for d1 in [0.3, 0.5, 0.7] {
            let r = theorem_check(&lab, d1, 1.0 - d1, DEFAULT_RANK_TOL).unwrap();
            if r.verdict == TheoremVerdict::NegativeDefinite {
                certified += 1;
                ok10 &= r.certificate_consistent
                    && r.rayleigh_ritz_consistent
                    && r.gamma0_max_eig < 0.0;
                info.push(format!(
                    "synthetic s={s} δ₁={d1}: Γ₀ max Ritz {:.4}, strict negative count {:?} ≥ {}, Γ₀ neg_inertia {} ≤ index {}",
                    r.gamma0_max_eig,
                    r.strict_negative_count,
                    lab.n() + 4,
                    r.gamma0.neg_inertia,
                    r.index
                ));
            }
        }
    }
    ok10 &= certified > 0;
    gate.record(
        "C10",
        ok10,
        format!(
            "theorem verdicts; {certified} synthetic negative-definite cases certified ({})",
            secs(t.elapsed())
        ),
        &info,
    );

    println!("acceptance: {}/{} criteria passed", gate.passed, gate.total);
    let strict = std::env::var("MHS_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    if strict && gate.passed != gate.total {
        std::process::exit(1);
    }
}

/// Cell-centre parameters of an `nt × nphi` grid.
fn omesh_params(fam: &GeometryFamily, nt: usize, nphi: usize) -> Vec<Vec<f64>> {
    let d = &fam.domain;
    let (ht, hp) = (
        (d.upper[0] - d.lower[0]) / nt as f64,
        (d.upper[1] - d.lower[1]) / nphi as f64,
    );
    (0..nt)
        .flat_map(|i| {
            (0..nphi).map(move |j| {
                vec![
                    d.lower[0] + (i as f64 + 0.5) * ht,
                    d.lower[1] + (j as f64 + 0.5) * hp,
                ]
            })
        })
        .collect()
}

use std::sync::OnceLock;

use proptest::prelude::*;

use mhs_core::closedform::{clifford_jacobi, equator_jacobi, sphere_spectrum};
use mhs_core::fem::{assemble, mesh_torus, SurfaceMesh};
use mhs_core::geometry::clifford;
use mhs_core::linalg::{rcm_ordering, sym_eigen, EnvelopeLdlt, TripletBuilder};
use mhs_core::ode::Dopri5;
use mhs_core::paperlab::{chain_verify, theorem_check, Lab, TheoremVerdict, DEFAULT_RANK_TOL};
use mhs_core::rotational::{build_surface, find_otsuki};
use mhs_core::spline::PeriodicSpline;

fn otsuki_mesh() -> &'static SurfaceMesh {
    static MESH: OnceLock<SurfaceMesh> = OnceLock::new();
    MESH.get_or_init(|| {
        let fam = build_surface(&find_otsuki(2, 3, 1e-12).unwrap(), 64, 16).unwrap();
        mesh_torus(&fam, 64, 16).unwrap()
    })
}

fn otsuki_lab() -> &'static Lab {
    static LAB: OnceLock<Lab> = OnceLock::new();
    LAB.get_or_init(|| Lab::new(otsuki_mesh().clone()).unwrap())
}

fn clifford_lab() -> &'static Lab {
    static LAB: OnceLock<Lab> = OnceLock::new();
    LAB.get_or_init(|| {
        Lab::with_zero_tol(mesh_torus(&clifford(2, 1).unwrap(), 16, 16).unwrap(), 0.05).unwrap()
    })
}

/// Gram–Schmidt on the rows of `m`; `None` when nearly dependent.
fn orthonormalize(m: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for row in m {
        let mut v = row.clone();
        for q in &out {
            let d: f64 = v.iter().zip(q).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(q).for_each(|(a, b)| *a -= d * b);
        }
        let nrm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if nrm < 1e-3 {
            return None;
        }
        out.push(v.into_iter().map(|a| a / nrm).collect());
    }
    Some(out)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn clifford_index_is_n_plus_3(n in 2usize..=12, k_frac in 0.0f64..1.0, cutoff in 0.0f64..40.0) {
        let k = 1 + ((n - 1) as f64 * k_frac) as usize;
        let k = k.min(n - 1);
        let s = clifford_jacobi(n, k, cutoff).unwrap();
        prop_assert_eq!(s.index, (n + 3) as u64);
        let e = equator_jacobi(n, cutoff).unwrap();
        prop_assert_eq!(e.index, 1);
        for t in [&s.table, &e.table] {
            prop_assert!(t.entries.windows(2).all(|w| w[0].eigenvalue < w[1].eigenvalue));
            prop_assert!(t.entries.iter().all(|x| x.multiplicity >= 1));
            prop_assert!(t.entries.iter().all(|x| x.eigenvalue <= t.cutoff.max(1.0) + 1e-12));
            prop_assert_eq!(t.expanded().len() as u64, t.total_multiplicity());
        }
    }

    #[test]
    fn sphere_tables_are_complete(m in 1usize..=6, jmax in 0usize..=8) {
        let t = sphere_spectrum(m, jmax).unwrap();
        prop_assert_eq!(t.entries.len(), jmax + 1);
        let total: u64 = (0..=jmax).map(|j| mhs_core::closedform::harmonic_dimension(m, j)).sum();
        prop_assert_eq!(t.total_multiplicity(), total);
    }

    #[test]
    fn level_sets_of_l_and_f_are_unit(
        n in 2usize..=5,
        k_frac in 0.0f64..1.0,
        u in prop::collection::vec(0.0f64..1.0, 5),
        m in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 7), 7),
    ) {
        let k = (1 + ((n - 1) as f64 * k_frac) as usize).min(n - 1);
        let fam = clifford(n, k).unwrap();
        let d = fam.ambient_dim();
        let rows: Vec<Vec<f64>> = m.iter().take(d).map(|r| r[..d].to_vec()).collect();
        let basis = match orthonormalize(&rows) { Some(b) => b, None => return Ok(()) };
        let dom = &fam.domain;
        let uu: Vec<f64> = (0..dom.dim()).map(|a| dom.lower[a] + u[a] * (dom.upper[a] - dom.lower[a])).collect();
        let fp = match fam.eval_frame(&uu) { Ok(fp) => fp, Err(_) => return Ok(()) };
        let sl: f64 = basis.iter().map(|v| fp.l(v).powi(2)).sum();
        let sf: f64 = basis.iter().map(|v| fp.f(v).powi(2)).sum();
        prop_assert!((sl - 1.0).abs() < 1e-12 && (sf - 1.0).abs() < 1e-12, "{sl} {sf}");
        prop_assert!(fp.frame_defect() < 1e-8 && fp.trace_a().abs() < 1e-8);
        let again = fam.eval_frame(&uu).unwrap();
        prop_assert!(fp.x == again.x && fp.nu == again.nu && fp.a == again.a);
    }

    #[test]
    fn ldlt_inertia_and_solve(
        n in 4usize..40,
        diag in prop::collection::vec(-3.0f64..3.0, 40),
        off in prop::collection::vec((0usize..40, 0usize..40, -1.0f64..1.0), 0..60),
        x in prop::collection::vec(-1.0f64..1.0, 40),
    ) {
        let mut t = TripletBuilder::new(n);
        for (i, d) in diag.iter().take(n).enumerate() {
            t.push(i, i, *d);
        }
        for &(i, j, v) in &off {
            let (i, j) = (i % n, j % n);
            if i != j {
                t.push(i, j, v);
                t.push(j, i, v);
            }
        }
        let a = t.build();
        let eig = sym_eigen(&a.to_dense(), n).unwrap();
        // keep away from singular matrices
        prop_assume!(eig.values.iter().all(|v| v.abs() > 1e-3));
        let perm = rcm_ordering(&a);
        let f = match EnvelopeLdlt::factor(&a, &perm, 1e-14) { Ok(f) => f, Err(_) => return Ok(()) };
        prop_assert_eq!(f.negative_count(), eig.values.iter().filter(|&&v| v < 0.0).count());
        let cond = eig.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
            / eig.values.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
        let x = &x[..n];
        let y = f.solve(&a.mul_vec(x));
        let err = x.iter().zip(&y).fold(0.0_f64, |m, (p, q)| m.max((p - q).abs()));
        prop_assert!(err < 1e-12 * cond.max(1.0) * 1e3, "err {err} cond {cond}");
    }

    #[test]
    fn spline_interpolates_and_is_periodic(
        values in prop::collection::vec(-5.0f64..5.0, 3..40),
        period in 0.5f64..10.0,
        t in -20.0f64..20.0,
    ) {
        let s = PeriodicSpline::new(values.clone(), period);
        let h = period / values.len() as f64;
        for (i, v) in values.iter().enumerate() {
            prop_assert!((s.eval(i as f64 * h) - v).abs() < 1e-9);
        }
        prop_assert!((s.eval(t) - s.eval(t + period)).abs() < 1e-9);
        prop_assert!((s.derivative(t) - s.derivative(t - period)).abs() < 1e-7);
    }

    #[test]
    fn dopri5_conserves_oscillator_energy(omega in 0.2f64..5.0, amp in 0.1f64..3.0, t1 in 0.1f64..20.0) {
        let ode = Dopri5::default();
        let f = |_t: f64, y: &[f64; 2]| [y[1], -omega * omega * y[0]];
        let mut h = 1e-3;
        let y = ode.integrate_to(&f, 0.0, [amp, 0.0], t1, &mut h).unwrap();
        prop_assert!((y[0] - amp * (omega * t1).cos()).abs() < 1e-9 * amp.max(1.0) * (1.0 + omega * t1));
        let e = 0.5 * y[1] * y[1] + 0.5 * omega * omega * y[0] * y[0];
        prop_assert!((e / (0.5 * omega * omega * amp * amp) - 1.0).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn torus_mesh_invariants(nt in 8usize..40, nphi in 8usize..40) {
        let mesh = mesh_torus(&clifford(2, 1).unwrap(), nt, nphi).unwrap();
        prop_assert_eq!(mesh.euler_characteristic(), 0);
        prop_assert!(mesh.is_consistently_oriented());
        prop_assert_eq!(mesh.vertex_count(), nt * nphi);
        let ops = assemble(&mesh).unwrap();
        prop_assert!(ops.stiffness.asymmetry() == 0.0 && ops.mass.asymmetry() == 0.0);
        let ones = vec![1.0; ops.dim()];
        prop_assert!(ops.stiffness.mul_vec(&ones).iter().all(|v| v.abs() < 1e-10));
        let area = ops.l2(&ones, &ones);
        prop_assert!(((area - mesh.area()) / area).abs() < 1e-12);
        // exact area is 2π², flat triangles inscribe the torus
        prop_assert!(area < 2.0 * std::f64::consts::PI.powi(2));
        let again = assemble(&mesh).unwrap();
        prop_assert!(again.stiffness == ops.stiffness && again.weighted == ops.weighted);
    }

    #[test]
    fn chain_identity_holds_for_any_draw(
        a in -1.0f64..1.0,
        b in -1.0f64..1.0,
        w in prop::array::uniform4(-1.0f64..1.0),
        delta1 in 0.01f64..0.99,
        clifford_geometry in any::<bool>(),
    ) {
        prop_assume!(a.abs() + b.abs() + w.iter().map(|c| c.abs()).sum::<f64>() > 1e-6);
        let lab = if clifford_geometry { clifford_lab() } else { otsuki_lab() };
        let r = chain_verify(lab, a, b, &w, delta1, 1.0 - delta1).unwrap();
        prop_assert!(r.identity_holds(1e-10), "|L1-L2| = {:e}, scale {:e}", r.residual_l12, r.scale);
        prop_assert!(r.residual_l12 <= 1e-10 * r.scale);
    }

    #[test]
    fn negative_definite_verdicts_are_certified(scale in 0.005f64..0.4, delta1 in 0.05f64..0.95) {
        let lab = Lab::new(otsuki_mesh().with_scaled_asq(scale)).unwrap();
        let r = theorem_check(&lab, delta1, 1.0 - delta1, DEFAULT_RANK_TOL).unwrap();
        if r.verdict == TheoremVerdict::NegativeDefinite {
            prop_assert!(r.gamma0_max_eig < 0.0);
            prop_assert!(r.certificate_consistent);
            prop_assert!(r.strict_negative_count.unwrap() >= lab.n() + 4);
            prop_assert!(r.gamma0.neg_inertia <= r.index);
        }
        prop_assert!(r.rayleigh_ritz_consistent);
    }
}

use mhs_core::geometry::GeometryFamily;
use mhs_core::rotational::{build_surface, find_otsuki, find_otsuki_with};

fn area_and_asq(fam: &GeometryFamily, res: usize) -> (f64, f64) {
    (
        fam.area(res).unwrap(),
        fam.integrate(res, |fp| fp.asq).unwrap(),
    )
}

#[test]
fn refinement_changes_area_and_total_curvature_below_1e_4() {
    let coarse = build_surface(&find_otsuki_with(2, 3, 1e-12, 512).unwrap(), 64, 16).unwrap();
    let fine = build_surface(&find_otsuki_with(2, 3, 1e-12, 1024).unwrap(), 128, 32).unwrap();
    let (a0, k0) = area_and_asq(&coarse, 64);
    let (a1, k1) = area_and_asq(&fine, 128);
    assert!(((a1 - a0) / a1).abs() <= 1e-4, "area {a0} -> {a1}");
    assert!(((k1 - k0) / k1).abs() <= 1e-4, "∫|A|² {k0} -> {k1}");
}

#[test]
fn otsuki_family_satisfies_frame_invariants() {
    let fam = build_surface(&find_otsuki(2, 3, 1e-12).unwrap(), 64, 16).unwrap();
    for u in fam.sample_points(24) {
        let fp = fam.eval_frame(&u).unwrap();
        assert!(
            fp.frame_defect() <= 1e-6,
            "frame defect {} at {u:?}",
            fp.frame_defect()
        );
        assert!(fp.trace_a().abs() <= 1e-6);
        assert!(fp.asq >= 0.0);
    }
}

#[test]
fn otsuki_total_curvature_matches_gauss_bonnet() {
    // Torus: ∫K = 0 and K = 1 - |A|²/2, so ∫|A|² = 2|M|.
    let fam = build_surface(&find_otsuki(2, 3, 1e-12).unwrap(), 64, 16).unwrap();
    let (area, asq) = area_and_asq(&fam, 128);
    assert!(
        (asq / (2.0 * area) - 1.0).abs() < 1e-8,
        "{}",
        asq / (2.0 * area)
    );
}

#[test]
fn near_window_endpoint_curvature_approaches_clifford() {
    // 408/577 is within 2e-6 of √2/2.
    let profile = find_otsuki_with(408, 577, 1e-10, 4096).unwrap();
    let fam = build_surface(&profile, 577 * 16, 16).unwrap();
    let tp = fam.domain.upper[0] / 577.0;
    let max_asq = (0..256)
        .map(|i| fam.eval_frame(&[tp * i as f64 / 256.0, 0.3]).unwrap().asq)
        .fold(0.0_f64, f64::max);
    assert!((max_asq - 2.0).abs() <= 0.05 * 2.0, "max |A|² = {max_asq}");
}

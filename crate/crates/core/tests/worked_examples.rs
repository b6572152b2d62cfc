mod common;

use drcs_core::ambiguity::{af_flock, theta_max_with, AfMethod};
use drcs_core::bounds::optimality_factor;
use drcs_core::drcs::{export_drcs, import_drcs};
use drcs_core::rectangle::{
    build_circular_florentine, build_circular_quasi_florentine, build_quasi_florentine_plus_one, search_max_rows,
    truncate_columns, verify_c2, SearchLimits, Side,
};
use drcs_core::Family;

#[test]
fn printed_factors_come_from_the_constructors() {
    let gf8 = build_circular_quasi_florentine(2, 3).unwrap();
    let cut = truncate_columns(&gf8, 1, Side::Right).unwrap();
    assert_eq!(cut.rows(), common::fixture("example1.json").rows());

    assert_eq!(build_circular_florentine(7).unwrap().rows(), common::fixture("example2_a.json").rows());
    assert_eq!(build_quasi_florentine_plus_one(2, 3).unwrap().rows(), common::fixture("example2_b.json").rows());

    let d = Family::C1ii { modulus: 7, prime: 2, degree: 3, trim: 1 }.instantiate().unwrap();
    assert_eq!(d.rows(), common::fixture("example2_d.json").rows());
    assert_eq!(d.rows(), common::rect63().rows());
}

#[test]
fn the_other_c1_family_also_fits_sixty_three() {
    let alt = Family::C1i { modulus: 7, prime: 3, degree: 2, trim: 1 }.instantiate().unwrap();
    assert_eq!((alt.nrows(), alt.ncols(), alt.modulus()), (6, 56, 63));
    assert_eq!(verify_c2(&alt, false), Ok(true));
    assert_ne!(alt.rows(), common::rect63().rows());
}

#[test]
fn sixty_three_set_values() {
    let set = common::set63();
    assert_eq!((set.set_size(), set.flock_size(), set.len()), (6, 63, 56));
    let peak = af_flock(set.flock(0), set.flock(0), set.r(), 0, 0).unwrap();
    assert!((peak.re - 63.0 * 56.0).abs() < 1e-6 && peak.im.abs() < 1e-6);
    assert!(af_flock(set.flock(2), set.flock(2), set.r(), 5, -3).unwrap().norm() < 1e-6);
    for (tau, nu) in [(0, 0), (1, 0), (-7, 4), (55, 55)] {
        let v = af_flock(set.flock(0), set.flock(1), set.r(), tau, nu).unwrap().norm();
        assert!(v < 1e-6 || (v - 63.0).abs() < 1e-6, "({tau},{nu}) -> {v}");
    }
}

#[test]
fn sixty_three_set_factor() {
    let set = common::set63();
    let theta = theta_max_with(&set, AfMethod::Fft);
    assert!((theta.theta_max - 63.0).abs() < 1e-6);
    let report = optimality_factor(&set, &theta).unwrap();
    assert!(report.k_condition);
    assert!((report.rho_rounded - 1.5).abs() < 1e-9);
}

#[test]
fn export_round_trip() {
    let set = common::set63();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("set.json");
    export_drcs(&set, &path).unwrap();
    assert_eq!(import_drcs(&path).unwrap(), set);
}

#[test]
fn small_searches() {
    let limits = SearchLimits::default();
    let (r, cert) = search_max_rows(4, 4, true, limits).unwrap();
    assert_eq!(r.nrows(), cert.rows_found);
    assert_eq!(verify_c2(&r, true), Ok(true));
    let (r, _) = search_max_rows(2, 2, false, limits).unwrap();
    assert_eq!(r.nrows(), 2);
    let (r, _) = search_max_rows(2, 2, true, limits).unwrap();
    assert_eq!(r.nrows(), 1);
}

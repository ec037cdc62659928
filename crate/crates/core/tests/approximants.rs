use std::f64::consts::PI;

use cmv_core::caratheodory::*;
use cmv_core::opuc::gen_u_sequence;
use cmv_core::rng::SplitMix64;
use cmv_core::{expand, Complex64, ParamPrefix, SchurSpec, USequenceSpec, UnitPoint};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

fn random_prefix(rng: &mut SplitMix64, len: usize) -> ParamPrefix {
    let v = (0..len).map(|_| Complex64::from_polar(0.95 * rng.next_f64().sqrt(), rng.uniform(-PI, PI))).collect();
    ParamPrefix::from_values(v).unwrap()
}

#[test]
fn three_routes_agree() {
    let mut rng = SplitMix64::new(2024);
    for _ in 0..50 {
        let n = 1 + rng.index(64);
        let p = random_prefix(&mut rng, n - 1);
        let u = UnitPoint::from_angle(rng.uniform(-PI, PI));
        let z = Complex64::from_polar(rng.uniform(0.1, 1.9), rng.uniform(-PI, PI));
        if (z.norm() - 1.0).abs() < 0.05 {
            continue;
        }
        let mut params = p.values.clone();
        params.push(u.value());
        let cf = cf_approximant(&params, 2 * n, None, z).unwrap().value;
        let cfw = cf_approximant(&p.values, 2 * n - 1, Some(u.value()), z).unwrap().value;
        let poly = modified_approximant(&p, u, n, z).unwrap().value;
        let res = resolvent_value(&p, u, n, z).unwrap().value;
        assert!(rel(cf, poly) <= 1e-9, "cf {cf} poly {poly} n={n} z={z}");
        assert!(rel(cfw, poly) <= 1e-9, "cfw {cfw} poly {poly}");
        assert!(rel(res, poly) <= 1e-9, "res {res} poly {poly} n={n} z={z}");
    }
}

#[test]
fn resolvent_matches_at_radius_07() {
    let mut rng = SplitMix64::new(32);
    let p = random_prefix(&mut rng, 31);
    let u = UnitPoint::from_angle(rng.uniform(-PI, PI));
    let z = Complex64::from_polar(0.7, rng.uniform(-PI, PI));
    let a = resolvent_value(&p, u, 32, z).unwrap().value;
    let b = modified_approximant(&p, u, 32, z).unwrap().value;
    assert!(rel(a, b) <= 1e-10);
}

#[test]
fn even_and_odd_standard_approximants() {
    let mut rng = SplitMix64::new(5);
    let p = random_prefix(&mut rng, 6);
    let z = c(0.3, -0.4);
    let phi = cmv_core::opuc::eval_pair(&p, 6, z, cmv_core::opuc::Normalization::Monic, cmv_core::opuc::Kind::First).unwrap();
    let psi = cmv_core::opuc::eval_pair(&p, 6, z, cmv_core::opuc::Normalization::Monic, cmv_core::opuc::Kind::Second).unwrap();
    let even = cf_approximant(&p.values, 12, None, z).unwrap().value;
    let odd = cf_approximant(&p.values, 13, None, z).unwrap().value;
    assert!(rel(even, psi.phi_star / phi.phi_star) < 1e-12);
    assert!(rel(odd, -psi.phi / phi.phi) < 1e-12);
}

fn check_rule(measure: OracleMeasure, n: usize) {
    let p = expand(&measure.schur_spec(), n).unwrap();
    let rule = szego_rule(&p, UnitPoint::one(), n).unwrap();
    assert!((rule.weight_sum() - 1.0).abs() <= 1e-12);
    assert!(rule.weights.iter().all(|w| *w > 0.0));
    let moments = oracle_moments(measure, n - 1).unwrap();
    for k in 0..n {
        let got = rule.moment(k as i64);
        assert!((got - moments[k]).norm() <= 1e-10, "{measure:?} n={n} k={k}: {got} vs {}", moments[k]);
        let neg = rule.moment(-(k as i64));
        assert!((neg - moments[k].conj()).norm() <= 1e-10);
    }
}

#[test]
fn quadrature_is_exact() {
    for n in [4, 8, 16] {
        check_rule(OracleMeasure::Lebesgue, n);
        check_rule(OracleMeasure::Geronimus { a: c(0.5, 0.0) }, n);
    }
}

#[test]
fn convergence_inside_disk() {
    let m = OracleMeasure::Geronimus { a: c(0.5, 0.0) };
    let p = expand(&m.schur_spec(), 100).unwrap();
    let z = c(0.3, 0.0);
    let f = oracle_f(m, z).unwrap();
    let errs: Vec<f64> = (20..=100)
        .map(|n| (modified_approximant(&p, UnitPoint::one(), n, z).unwrap().value - f).norm())
        .collect();
    for w in errs.windows(2) {
        assert!(w[1] <= w[0] || w[1] < 1e-14, "{} then {}", w[0], w[1]);
    }
    assert!(errs[errs.len() - 1] <= 1e-4);
}

#[test]
fn convergence_in_gap() {
    let m = OracleMeasure::Geronimus { a: c(0.5, 0.0) };
    let p = expand(&m.schur_spec(), 200).unwrap();
    let us = gen_u_sequence(&USequenceSpec::fixed_zero(UnitPoint::one()), &p, 200).unwrap();
    let z = Complex64::from_polar(1.0, PI / 6.0);
    let k150 = modified_approximant(&p, us[149], 150, z).unwrap().value;
    let k200 = modified_approximant(&p, us[199], 200, z).unwrap().value;
    assert!((k150 - k200).norm() <= 1e-3, "{k150} {k200}");
    let f = oracle_f(m, z).unwrap();
    assert!((k200 - f).norm() <= 1e-3, "{k200} vs oracle {f}");
}

#[test]
fn approximants_have_positive_real_part_in_disk() {
    let mut rng = SplitMix64::new(77);
    for _ in 0..100 {
        let n = 4 + rng.index(40);
        let p = random_prefix(&mut rng, n - 1);
        let u = UnitPoint::from_angle(rng.uniform(-PI, PI));
        let z = Complex64::from_polar(rng.next_f64().sqrt() * 0.999, rng.uniform(-PI, PI));
        let k = modified_approximant(&p, u, n, z).unwrap().value;
        assert!(k.re >= -1e-9, "{k}");
    }
}

#[test]
fn lebesgue_approximants_are_exact_off_circle() {
    let p = expand(&SchurSpec::Constant(c(0.0, 0.0)), 10).unwrap();
    let k = modified_approximant(&p, UnitPoint::one(), 10, c(0.2, 0.1)).unwrap().value;
    let z10 = c(0.2, 0.1).powi(10);
    assert!((k - (1.0 - z10) / (1.0 + z10)).norm() < 1e-15);
}

#[test]
fn presets_run() {
    for preset in convergence_presets() {
        let p = expand(&preset.spec, 60).unwrap();
        let us = gen_u_sequence(&preset.uspec, &p, 60).unwrap();
        let grid: Vec<Complex64> = preset.grid.iter().copied().filter(|z| (z.norm() - 1.0).abs() > 0.1).collect();
        let rows = approximant_sweep(&p, &us, &[40, 60], &grid, None).unwrap();
        assert_eq!(rows.len(), 2 * grid.len());
        // Off the circle both orders agree closely.
        for (a, b) in rows[..grid.len()].iter().zip(&rows[grid.len()..]) {
            assert!((a.value - b.value).norm() < 1e-3, "{}: {} vs {}", preset.name, a.value, b.value);
        }
    }
}

//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the report is always printed; exits non-zero if any fails.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use cmv_core::caratheodory::{cf_approximant, modified_approximant, oracle_f, resolvent_value, szego_rule, OracleMeasure};
use cmv_core::cmv::{build_truncation, theta_block};
use cmv_core::eig::{sigma_n, spectrum_of};
use cmv_core::geometry::{arc_contains, arc_distance, make_arc, ArcKind};
use cmv_core::opuc::{eval_para, gen_u_sequence, para_coefficients, uv_transform, Para};
use cmv_core::rng::SplitMix64;
use cmv_core::schur::{k_metric, rho};
use cmv_core::support::{approximate_support, bound_halfplane, bound_two_periodic, SupportEstimate};
use cmv_core::{expand, Complex64, ParamPrefix, SchurSpec, USequenceSpec, UnitPoint};
use nalgebra::{DMatrix, Matrix2};

type Outcome = Result<String, String>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn unit(re: f64, im: f64) -> UnitPoint {
    UnitPoint::new(c(re, im)).unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok { Ok(()) } else { Err(msg()) }
}

fn random_prefix(rng: &mut SplitMix64, len: usize, r: f64) -> ParamPrefix {
    let v = (0..len).map(|_| Complex64::from_polar(r * rng.next_f64().sqrt(), rng.uniform(-PI, PI))).collect();
    ParamPrefix::from_values(v).unwrap()
}

fn companion_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = c(1.0, 0.0);
    }
    for i in 0..n {
        m[(i, n - 1)] = -coeffs[i] / coeffs[n];
    }
    m.schur().eigenvalues().expect("complex Schur").iter().copied().collect()
}

fn pairing_error(a: &[Complex64], b: &[Complex64]) -> f64 {
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for x in a {
        let (k, d) = b
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, y)| (k, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        used[k] = true;
        worst = worst.max(d);
    }
    worst
}

fn unitarity() -> Outcome {
    let t = Instant::now();
    let mut rng = SplitMix64::new(1);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let p = random_prefix(&mut rng, 1023, 0.999);
        let u = UnitPoint::from_angle(rng.uniform(-PI, PI));
        for n in [8, 64, 256, 1024] {
            worst = worst.max(build_truncation(&p, u, n).map_err(|e| e.to_string())?.unitarity_defect());
        }
    }
    let secs = t.elapsed().as_secs_f64();
    ensure(worst <= 1e-12, || format!("defect {worst:e}"))?;
    ensure(secs <= 10.0, || format!("took {secs:.1}s"))?;
    Ok(format!("max |CC* - I| = {worst:.1e}, {secs:.2}s"))
}

fn spectrum_identity() -> Outcome {
    let mut rng = SplitMix64::new(2);
    let (mut root_err, mut residual) = (0.0f64, 0.0f64);
    for k in 0..50 {
        let n = if k < 25 { 1 + rng.index(12) } else { 1 + rng.index(64) };
        let p = random_prefix(&mut rng, n.saturating_sub(1), 0.95);
        let u = UnitPoint::from_angle(rng.uniform(-PI, PI));
        let s = spectrum_of(&p, u, n).map_err(|e| e.to_string())?;
        if n <= 12 {
            let roots = companion_roots(&para_coefficients(&p, n, u).map_err(|e| e.to_string())?);
            let eig: Vec<Complex64> = s.spectrum.values().collect();
            root_err = root_err.max(pairing_error(&eig, &roots));
        }
        residual = residual.max(s.residuals.iter().copied().fold(0.0, f64::max));
    }
    ensure(root_err <= 1e-8, || format!("companion mismatch {root_err:e}"))?;
    ensure(residual <= 1e-8, || format!("residual {residual:e}"))?;
    Ok(format!("root error {root_err:.1e}, max scaled residual {residual:.1e}"))
}

fn geronimus_support() -> Outcome {
    let t = Instant::now();
    let est = approximate_support(&SchurSpec::Constant(c(0.5, 0.0)), &USequenceSpec::fixed_zero(UnitPoint::one()), &[(400, 401)], None)
        .map_err(|e| e.to_string())?;
    let arc = make_arc(ArcKind::Delta, c(1.0, 0.0), PI / 3.0).unwrap();
    let pts: Vec<Complex64> = est.doubles().map(|d| d.point.value()).collect();
    let off = pts.iter().map(|z| arc_distance(&arc, *z).min((z - 1.0).norm())).fold(0.0, f64::max);
    let cover = arc
        .discretize(2000)
        .iter()
        .map(|s| pts.iter().map(|z| (z - s).norm()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    let secs = t.elapsed().as_secs_f64();
    ensure(off <= 0.03, || format!("a double is {off:.3} from the arc"))?;
    ensure(cover <= 0.05, || format!("coverage gap {cover:.3}"))?;
    ensure(secs <= 120.0, || format!("took {secs:.1}s"))?;
    Ok(format!("{} doubles, max distance {off:.1e}, max gap {cover:.4}, {secs:.1}s", pts.len()))
}

fn weak_not_double() -> Outcome {
    let spec = SchurSpec::Constant(c(0.5, 0.0));
    let us = USequenceSpec::fixed_zero(unit(-1.0, 0.0));
    let dist = |n: usize| -> Result<f64, String> {
        let s = sigma_n(&spec, &us, n).map_err(|e| e.to_string())?;
        Ok(s.spectrum.values().map(|z| (z - 1.0).norm()).fold(f64::INFINITY, f64::min))
    };
    let (even, odd) = (dist(200)?, dist(201)?);
    let est = approximate_support(&spec, &us, &[(200, 201)], None).map_err(|e| e.to_string())?;
    let nearest_double = est.doubles().map(|d| (d.point.value() - 1.0).norm()).fold(f64::INFINITY, f64::min);
    ensure(even <= 1e-2, || format!("order 200 misses 1 by {even:e}"))?;
    ensure(odd >= 0.1, || format!("order 201 comes within {odd:e} of 1"))?;
    ensure(nearest_double >= 0.1, || format!("a double lies {nearest_double:e} from 1"))?;
    Ok(format!("|1 - Σ_200| = {even:.1e}, |1 - Σ_201| = {odd:.3}, nearest double {nearest_double:.3}"))
}

/// Reliable doubles inside the open gaps, paired with their chordal distance
/// to the nearer gap endpoint.
fn gap_intruders(est: &SupportEstimate, gaps: &[(Complex64, f64)]) -> Vec<(Complex64, f64)> {
    let mut out = Vec::new();
    for d in est.reliable_doubles() {
        let z = d.point.value();
        for &(center, width) in gaps {
            let gap = make_arc(ArcKind::GammaOpen, center, width).unwrap();
            if arc_contains(&gap, z).unwrap() {
                let (e0, e1) = gap.endpoints();
                out.push((z, (z - e0).norm().min((z - e1).norm())));
            }
        }
    }
    out
}

fn penetration(v: &[(Complex64, f64)]) -> f64 {
    v.iter().map(|p| p.1).fold(0.0, f64::max)
}

fn two_periodic_gaps() -> Outcome {
    let b = bound_two_periodic(UnitPoint::one(), c(0.25, 0.0), c(0.75, 0.0), 0.0, 0.0).map_err(|e| e.to_string())?;
    let (ap, am) = (b.param("alpha_plus").unwrap() / PI, b.param("alpha_minus").unwrap() / PI);
    ensure((0.345..=0.355).contains(&ap), || format!("alpha+ = {ap:.4}pi"))?;
    ensure((0.185..=0.195).contains(&am), || format!("alpha- = {am:.4}pi"))?;

    let r = (3.0 * PI / 8.0).sin();
    let (odd, even) = (Complex64::from_polar(r, -PI / 3.0), Complex64::from_polar(r, PI / 3.0));
    let f = bound_two_periodic(UnitPoint::one(), odd, even, 0.0, 0.0).map_err(|e| e.to_string())?;
    let (fp, fm) = (f.param("alpha_plus").unwrap() / PI, f.param("alpha_minus").unwrap() / PI);
    ensure((0.30..=0.31).contains(&fp), || format!("limit-point family alpha+ = {fp:.4}pi"))?;
    ensure((0.585..=0.595).contains(&fm), || format!("limit-point family alpha- = {fm:.4}pi"))?;

    let mut worst = 0.0f64;
    let quarter = SchurSpec::TwoPeriodic { odd: c(0.25, 0.0), even: c(0.75, 0.0) };
    for us in [USequenceSpec::fixed_zero(UnitPoint::one()), USequenceSpec::fixed_zero(unit(0.0, 1.0)), USequenceSpec::phase()] {
        let est = approximate_support(&quarter, &us, &[(200, 201)], None).map_err(|e| e.to_string())?;
        worst = worst.max(penetration(&gap_intruders(&est, &[(c(1.0, 0.0), ap * PI), (c(-1.0, 0.0), am * PI)])));
    }
    let fam = SchurSpec::TwoPeriodic { odd, even };
    let est = approximate_support(&fam, &USequenceSpec::fixed_zero(UnitPoint::from_angle(PI / 3.0)), &[(200, 201)], None)
        .map_err(|e| e.to_string())?;
    // The gaps bound the derived set only; this family carries one isolated
    // atom near e^{2i pi/3}, which must be the sole intruder.
    let atom = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
    let (near_atom, rest): (Vec<_>, Vec<_>) = gap_intruders(&est, &[(c(1.0, 0.0), fp * PI), (c(-1.0, 0.0), fm * PI)])
        .into_iter()
        .partition(|(z, _)| (z - atom).norm() <= 0.1);
    ensure(near_atom.len() <= 1, || format!("{} intruders near e^(2i pi/3)", near_atom.len()))?;
    worst = worst.max(penetration(&rest));
    ensure(worst <= 0.05, || format!("a double penetrates a gap by {worst:.3}"))?;
    let atom_note = near_atom.first().map_or("none".to_string(), |(z, _)| format!("{:.4}pi", z.arg() / PI));
    Ok(format!(
        "alpha+ {ap:.4}pi, alpha- {am:.4}pi; limit-point family {fp:.4}pi, {fm:.4}pi; max penetration {worst:.1e}; isolated atom at {atom_note}"
    ))
}

fn halfplane() -> Outcome {
    let b = bound_halfplane(UnitPoint::one(), PI / 3.0).map_err(|e| e.to_string())?;
    let alpha = b.param("alpha").unwrap();
    ensure((0.235..=0.242).contains(&(alpha / PI)), || format!("alpha = {:.4}pi", alpha / PI))?;
    let spec = SchurSpec::RandomHalfPlane { u: c(1.0, 0.0), cos_alpha0: 0.5, seed: 7 };
    let est = approximate_support(&spec, &USequenceSpec::fixed_zero(unit(-1.0, 0.0)), &[(200, 201)], None)
        .map_err(|e| e.to_string())?;
    let gap = make_arc(ArcKind::GammaOpen, c(1.0, 0.0), alpha - 0.02 * PI).unwrap();
    let inside = est.doubles().filter(|d| arc_contains(&gap, d.point.value()).unwrap()).count();
    ensure(inside == 0, || format!("{inside} doubles inside the shrunken gap"))?;
    let closest = est.doubles().map(|d| d.point.angle().min(2.0 * PI - d.point.angle())).fold(f64::INFINITY, f64::min);
    Ok(format!("alpha = {:.4}pi, nearest double at angle {:.4}pi", alpha / PI, closest / PI))
}

fn quadrature() -> Outcome {
    let zero = expand(&SchurSpec::Constant(c(0.0, 0.0)), 16).map_err(|e| e.to_string())?;
    let rule = szego_rule(&zero, UnitPoint::one(), 16).map_err(|e| e.to_string())?;
    let leb = (-15i64..=15)
        .map(|k| (rule.moment(k) - if k == 0 { c(1.0, 0.0) } else { c(0.0, 0.0) }).norm())
        .fold(0.0, f64::max);
    ensure(leb <= 1e-12, || format!("Lebesgue moment error {leb:e}"))?;
    let half = expand(&SchurSpec::Constant(c(0.5, 0.0)), 2).map_err(|e| e.to_string())?;
    let g = szego_rule(&half, unit(-1.0, 0.0), 2).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for (z, w) in g.nodes.values().zip(&g.weights) {
        let (node, weight) = if z.re > 0.0 { (c(1.0, 0.0), 0.25) } else { (c(-1.0, 0.0), 0.75) };
        worst = worst.max((z - node).norm()).max((w - weight).abs());
    }
    worst = worst.max((g.moment(1) - c(-0.5, 0.0)).norm());
    ensure(worst <= 1e-12, || format!("two-point rule error {worst:e}"))?;
    Ok(format!("Lebesgue moments {leb:.1e}, two-point rule {worst:.1e}"))
}

fn approximant_identity() -> Outcome {
    let mut rng = SplitMix64::new(8);
    let mut worst = 0.0f64;
    let mut done = 0;
    while done < 50 {
        let n = 1 + rng.index(64);
        let p = random_prefix(&mut rng, n - 1, 0.95);
        let u = UnitPoint::from_angle(rng.uniform(-PI, PI));
        let z = Complex64::from_polar(rng.uniform(0.1, 1.9), rng.uniform(-PI, PI));
        let s = spectrum_of(&p, u, n).map_err(|e| e.to_string())?;
        if s.spectrum.values().any(|l| (l - z).norm() < 1e-3) {
            continue;
        }
        let mut params = p.values.clone();
        params.push(u.value());
        let cf = cf_approximant(&params, 2 * n, None, z).map_err(|e| e.to_string())?.value;
        let poly = modified_approximant(&p, u, n, z).map_err(|e| e.to_string())?.value;
        let res = resolvent_value(&p, u, n, z).map_err(|e| e.to_string())?.value;
        let scale = poly.norm().max(1e-300);
        worst = worst.max((cf - poly).norm() / scale).max((res - poly).norm() / scale);
        done += 1;
    }
    ensure(worst <= 1e-9, || format!("routes differ by {worst:e}"))?;
    Ok(format!("max relative disagreement {worst:.1e}"))
}

fn caratheodory_convergence() -> Outcome {
    let e = |x: cmv_core::Result<cmv_core::caratheodory::ApproximantValue>| x.map(|v| v.value).map_err(|e| e.to_string());
    let zero = expand(&SchurSpec::Constant(c(0.0, 0.0)), 20).map_err(|e| e.to_string())?;
    let inner = (e(modified_approximant(&zero, UnitPoint::one(), 20, c(0.5, 0.0)))? - 1.0).norm();
    let outer = (e(modified_approximant(&zero, UnitPoint::one(), 20, c(2.0, 0.0)))? + 1.0).norm();
    ensure(inner <= 1e-5 && outer <= 1e-5, || format!("Lebesgue errors {inner:e}, {outer:e}"))?;
    let m = OracleMeasure::Geronimus { a: c(0.5, 0.0) };
    let half = expand(&m.schur_spec(), 200).map_err(|e| e.to_string())?;
    let oracle = oracle_f(m, c(0.3, 0.0)).map_err(|e| e.to_string())?;
    let ger = (e(modified_approximant(&half, UnitPoint::one(), 100, c(0.3, 0.0)))? - oracle).norm();
    ensure(ger <= 1e-4, || format!("Geronimus error {ger:e}"))?;
    let us = gen_u_sequence(&USequenceSpec::fixed_zero(UnitPoint::one()), &half, 200).map_err(|e| e.to_string())?;
    let z = Complex64::from_polar(1.0, PI / 6.0);
    let step = (e(modified_approximant(&half, us[149], 150, z))? - e(modified_approximant(&half, us[199], 200, z))?).norm();
    ensure(step <= 1e-3, || format!("gap values move by {step:e}"))?;
    Ok(format!("Lebesgue {inner:.1e}/{outer:.1e}, Geronimus {ger:.1e}, gap step {step:.1e}"))
}

fn property_suites() -> Outcome {
    const CASES: usize = 1000;
    let mut rng = SplitMix64::new(10);
    let disk = |rng: &mut SplitMix64, r: f64| Complex64::from_polar(r * rng.next_f64().sqrt(), rng.uniform(-PI, PI));
    let (mut prop, mut fixed, mut remark, mut theta, mut invol) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..CASES {
        let n = 1 + rng.index(64);
        let p = random_prefix(&mut rng, n, 0.95);
        let u = UnitPoint::from_angle(rng.uniform(-PI, PI));
        let a = p.a(n);
        let v = uv_transform(u, a).map_err(|e| e.to_string())?;
        for _ in 0..10 {
            let z = Complex64::from_polar(1.0, rng.uniform(-PI, PI));
            let lhs = p.rho(n) * eval_para(&p, n, u, z, Para::P).map_err(|e| e.to_string())?;
            let rhs = (u.value() - a) * eval_para(&p, n, v, z, Para::Q).map_err(|e| e.to_string())?;
            prop = prop.max((lhs - rhs).norm() / (lhs.norm() + rhs.norm()).max(1e-300));
        }

        let m = 1 + rng.index(200);
        let q = random_prefix(&mut rng, m, 0.9);
        let w = UnitPoint::from_angle(rng.uniform(-PI, PI));
        let us = gen_u_sequence(&USequenceSpec::fixed_zero(w), &q, m).map_err(|e| e.to_string())?;
        let val = eval_para(&q, m, us[m - 1], w.value(), Para::P).map_err(|e| e.to_string())?;
        let e = cmv_core::opuc::eval_phi_pair(&q, m - 1, w.value()).map_err(|e| e.to_string())?;
        fixed = fixed.max(val.norm() / (e.phi.norm() + e.phi_star.norm()));

        let (x1, x2) = (disk(&mut rng, 1.0), disk(&mut rng, 1.0));
        let (y1, y2) = (rho(x1).unwrap(), rho(x2).unwrap());
        let k = k_metric(x1, x2).map_err(|e| e.to_string())?;
        remark = remark.max(k - 2.0 * (x1 - x2).norm() / (y1 + y2));
        let (t1, t2) = (theta_block(x1).unwrap(), theta_block(x2).unwrap());
        let d = Matrix2::new(t1[0][0] - t2[0][0], t1[0][1] - t2[0][1], t1[1][0] - t2[1][0], t1[1][1] - t2[1][1]);
        theta = theta.max((k - d.singular_values().max()).abs());

        let b = disk(&mut rng, 0.95);
        let back = uv_transform(uv_transform(u, b).map_err(|e| e.to_string())?, b).map_err(|e| e.to_string())?;
        invol = invol.max((back.value() - u.value()).norm());
    }
    ensure(prop <= 1e-10, || format!("proportionality {prop:e}"))?;
    ensure(fixed <= 1e-9, || format!("fixed zero {fixed:e}"))?;
    ensure(remark <= 1e-12, || format!("ratio inequality violated by {remark:e}"))?;
    ensure(theta <= 1e-12, || format!("k-metric vs block norm {theta:e}"))?;
    ensure(invol <= 1e-14, || format!("involution {invol:e}"))?;
    Ok(format!(
        "{CASES} cases each: proportionality {prop:.1e}, fixed zero {fixed:.1e}, inequality slack {remark:.1e}, block norm {theta:.1e}, involution {invol:.1e}"
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("unitarity of truncations", unitarity),
        ("spectrum equals para-orthogonal zeros", spectrum_identity),
        ("constant 1/2 support arc", geronimus_support),
        ("1 is weak but not double", weak_not_double),
        ("two-periodic gaps", two_periodic_gaps),
        ("half-plane bound", halfplane),
        ("quadrature exactness", quadrature),
        ("approximant routes agree", approximant_identity),
        ("Caratheodory convergence", caratheodory_convergence),
        ("property suites", property_suites),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", k + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}

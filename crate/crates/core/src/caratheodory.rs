//! Rational approximants of the Carathéodory function
//! `F(z) = ∫ (λ + z)/(λ - z) dμ(λ)`: the continued fraction with
//! `A_{2n} = Ψ*_n`, `B_{2n} = Φ*_n`, `A_{2n+1} = -zΨ_n`, `B_{2n+1} = zΦ_n`,
//! the para-orthogonal quotients `-Ψ_n^u/Φ_n^u`, the resolvent route
//! `1 - 2z((z - C)^{-1} e_1, e_1)`, Szegő quadrature rules and closed forms.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::sync::Arc as Shared;

use num_complex::Complex64;
use serde::Serialize;

use crate::cmv::{build_truncation, solve_shifted};
use crate::eig::spectrum_of;
use crate::error::{domain, CmvError, Result};
use crate::geometry::{FiniteSpectrum, UnitPoint};
use crate::numfmt::g17;
use crate::opuc::USequenceSpec;
use crate::schur::{ParamPrefix, SchurSpec};

const RESCALE_ABOVE: f64 = 1e150;
const POLE_REL: f64 = 1e-14;
/// Largest `‖(z - C)^{-1} e_1‖` accepted before the shift counts as a pole.
const RESOLVENT_CAP: f64 = 1e10;
const BRANCH_GUARD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    CfRecurrence,
    PolynomialQuotient,
    Resolvent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApproximantValue {
    pub order: usize,
    pub at: Complex64,
    pub value: Complex64,
    pub route: Route,
}

fn pole_check(num: Complex64, den: Complex64, scale: f64, z: Complex64) -> Result<Complex64> {
    if den == Complex64::new(0.0, 0.0) || den.norm() <= POLE_REL * scale {
        return Err(CmvError::Pole { z });
    }
    Ok(num / den)
}

/// `(α_m, β_m)` of the continued fraction for `m >= 1`.
fn cf_coefficients(params: &[Complex64], m: usize, z: Complex64) -> (Complex64, Complex64) {
    let one = Complex64::new(1.0, 0.0);
    if m == 1 {
        return (-2.0 * z, z);
    }
    let a = params[m / 2 - 1];
    if m % 2 == 0 {
        (one, a.conj())
    } else {
        ((1.0 - a.norm_sqr()).max(0.0) * z, a * z)
    }
}

/// `K_m^w(a; z)` by the forward three-term recurrence; `w_mod = None` gives `K_m`.
///
/// Uses `a_1..a_{⌊m/2⌋}`; the last one may be unimodular.
pub fn cf_approximant(params: &[Complex64], m: usize, w_mod: Option<Complex64>, z: Complex64) -> Result<ApproximantValue> {
    if params.len() < m / 2 {
        return domain(format!("approximant {m} needs {} parameters, got {}", m / 2, params.len()));
    }
    if let Some(a) = params[..m / 2].iter().find(|a| !(a.norm() <= 1.0 + 1e-12)) {
        return domain(format!("parameter {a} lies outside the closed unit disk"));
    }
    let one = Complex64::new(1.0, 0.0);
    // (X_{k-1}, X_k) for A and B, starting at k = 0.
    let (mut a_prev, mut a_cur) = (one, one);
    let (mut b_prev, mut b_cur) = (Complex64::new(0.0, 0.0), one);
    for k in 1..=m {
        let (alpha, beta) = cf_coefficients(params, k, z);
        let a_next = beta * a_cur + alpha * a_prev;
        let b_next = beta * b_cur + alpha * b_prev;
        a_prev = a_cur;
        a_cur = a_next;
        b_prev = b_cur;
        b_cur = b_next;
        let big = a_prev.norm().max(a_cur.norm()).max(b_prev.norm()).max(b_cur.norm());
        if big > RESCALE_ABOVE {
            a_prev /= big;
            a_cur /= big;
            b_prev /= big;
            b_cur /= big;
        }
    }
    let value = match w_mod {
        None => pole_check(a_cur, b_cur, b_cur.norm().max(a_cur.norm()), z)?,
        Some(w) => {
            if m == 0 {
                return domain("modified approximants start at m = 1");
            }
            let den = b_cur + w * b_prev;
            pole_check(a_cur + w * a_prev, den, b_cur.norm() + w.norm() * b_prev.norm(), z)?
        }
    };
    Ok(ApproximantValue { order: m, at: z, value, route: Route::CfRecurrence })
}

/// `-Ψ_n^u(z)/Φ_n^u(z)` with `Φ_n^u = zΦ_{n-1} + uΦ*_{n-1}`, `Ψ_n^u = zΨ_{n-1} - uΨ*_{n-1}`.
pub fn modified_approximant(prefix: &ParamPrefix, u: UnitPoint, n: usize, z: Complex64) -> Result<ApproximantValue> {
    if n == 0 {
        return domain("modified approximants start at n = 1");
    }
    if prefix.len() < n - 1 {
        return domain(format!("order {n} needs {} parameters, got {}", n - 1, prefix.len()));
    }
    let one = Complex64::new(1.0, 0.0);
    let (mut phi, mut phi_s, mut psi, mut psi_s) = (one, one, one, one);
    for &a in &prefix.values[..n - 1] {
        let (zphi, zpsi) = (z * phi, z * psi);
        let next = (zphi + a * phi_s, phi_s + a.conj() * zphi, zpsi - a * psi_s, psi_s - a.conj() * zpsi);
        (phi, phi_s, psi, psi_s) = next;
        let big = phi.norm().max(phi_s.norm()).max(psi.norm()).max(psi_s.norm());
        if big > RESCALE_ABOVE {
            phi /= big;
            phi_s /= big;
            psi /= big;
            psi_s /= big;
        }
    }
    let u = u.value();
    let den = z * phi + u * phi_s;
    let num = -(z * psi - u * psi_s);
    let value = pole_check(num, den, z.norm() * phi.norm() + phi_s.norm(), z)?;
    Ok(ApproximantValue { order: n, at: z, value, route: Route::PolynomialQuotient })
}

/// `1 - 2z((z - C)^{-1} e_1, e_1)` for `C = C(a_1, …, a_{n-1}, u)`.
pub fn resolvent_value(prefix: &ParamPrefix, u: UnitPoint, n: usize, z: Complex64) -> Result<ApproximantValue> {
    let c = build_truncation(prefix, u, n)?;
    let mut e1 = vec![Complex64::new(0.0, 0.0); n];
    e1[0] = Complex64::new(1.0, 0.0);
    let x = match solve_shifted(&c, z, &e1) {
        Ok(x) => x,
        Err(CmvError::SingularShift { .. }) => return Err(CmvError::Pole { z }),
        Err(e) => return Err(e),
    };
    let norm = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if !norm.is_finite() || norm > RESOLVENT_CAP {
        return Err(CmvError::Pole { z });
    }
    Ok(ApproximantValue { order: n, at: z, value: 1.0 - 2.0 * z * x[0], route: Route::Resolvent })
}

/// Nodes `Σ_n(a; u)` with Christoffel weights `1/Σ_{k<n} |φ_k(z_j)|²`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureRule {
    pub order: usize,
    pub nodes: FiniteSpectrum,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    /// `Σ_j w_j z_j^k` for any integer `k`.
    pub fn moment(&self, k: i64) -> Complex64 {
        self.nodes.values().zip(&self.weights).map(|(z, w)| w * z.powi(k as i32)).sum()
    }

    pub fn weight_sum(&self) -> f64 {
        self.weights.iter().sum()
    }
}

pub fn szego_rule(prefix: &ParamPrefix, u: UnitPoint, n: usize) -> Result<QuadratureRule> {
    if n == 0 {
        return domain("quadrature order must be at least 1");
    }
    let nodes = spectrum_of(prefix, u, n)?.spectrum;
    let weights = nodes
        .values()
        .map(|z| christoffel_sum(prefix, n, z).map(|s| 1.0 / s))
        .collect::<Result<Vec<_>>>()?;
    Ok(QuadratureRule { order: n, nodes, weights })
}

fn christoffel_sum(prefix: &ParamPrefix, n: usize, z: Complex64) -> Result<f64> {
    let mut phi = Complex64::new(1.0, 0.0);
    let mut star = phi;
    let mut sum = 1.0;
    for k in 1..n {
        let (a, r) = (prefix.a(k), prefix.rho(k));
        let zphi = z * phi;
        (phi, star) = ((zphi + a * star) / r, (star + a.conj() * zphi) / r);
        sum += phi.norm_sqr();
    }
    if !sum.is_finite() {
        return Err(CmvError::Degenerate(format!("Christoffel sum overflowed at {z}")));
    }
    Ok(sum)
}

/// Measures with a closed-form Carathéodory function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum OracleMeasure {
    Lebesgue,
    /// Constant Schur parameters `a_n ≡ a` in the recurrence convention of this crate.
    Geronimus { a: Complex64 },
}

impl OracleMeasure {
    /// The matching parameter family.
    pub fn schur_spec(&self) -> SchurSpec {
        match *self {
            OracleMeasure::Lebesgue => SchurSpec::Constant(Complex64::new(0.0, 0.0)),
            OracleMeasure::Geronimus { a } => SchurSpec::Constant(a),
        }
    }
}

/// Closed-form `F_μ(z)`. On the circle the value is the radial limit from inside.
pub fn oracle_f(measure: OracleMeasure, z: Complex64) -> Result<Complex64> {
    let r = z.norm();
    match measure {
        OracleMeasure::Lebesgue => {
            if (r - 1.0).abs() <= 1e-12 {
                return domain("the Lebesgue Carathéodory function has no values on the circle");
            }
            Ok(Complex64::new(if r < 1.0 { 1.0 } else { -1.0 }, 0.0))
        }
        OracleMeasure::Geronimus { a } => {
            if a.norm() >= 1.0 {
                return domain(format!("Geronimus parameter {a} must lie in the open unit disk"));
            }
            if r > 1.0 + 1e-12 {
                // F(z) = -conj(F(1/z̄)).
                return Ok(-geronimus_inside(a, 1.0 / z.conj())?.conj());
            }
            geronimus_inside(a, z)
        }
    }
}

/// `(1 + zf)/(1 - zf)` with `f` the Schur function whose parameters are all `γ = -ā`:
/// `γ̄ z f² + (1 - z) f - γ = 0`.
fn geronimus_inside(a: Complex64, z: Complex64) -> Result<Complex64> {
    let g = -a.conj();
    let roots = |z: Complex64| {
        let b = 1.0 - z;
        let disc = b * b + 4.0 * g.norm_sqr() * z;
        let s = disc.sqrt();
        // Root with f(0) = γ is 2γ/(b + s) near z = 0; the other is 2γ/(b - s).
        let f1 = if (b + s).norm() > 0.0 { 2.0 * g / (b + s) } else { Complex64::new(f64::INFINITY, 0.0) };
        let f2 = if (b - s).norm() > 0.0 { 2.0 * g / (b - s) } else { Complex64::new(f64::INFINITY, 0.0) };
        (f1, f2, disc)
    };
    let finish = |f: Complex64| {
        let den = 1.0 - z * f;
        pole_check(1.0 + z * f, den, 1.0 + (z * f).norm(), z)
    };
    if g.norm() == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let pick_small = |z: Complex64| {
        let (f1, f2, _) = roots(z);
        if f1.norm() <= f2.norm() { f1 } else { f2 }
    };
    if z.norm() <= 0.9 {
        return finish(pick_small(z));
    }
    let (_, _, disc) = roots(z);
    if disc.norm() < BRANCH_GUARD {
        return Err(CmvError::BranchPoint { z });
    }
    // Continue from 0.9z along the radius.
    let start = 0.9 * z / z.norm();
    let mut f = pick_small(start);
    let steps = 2000;
    for k in 1..=steps {
        let t = k as f64 / steps as f64;
        let w = start + (z - start) * t;
        let (f1, f2, _) = roots(w);
        f = if (f1 - f).norm() <= (f2 - f).norm() { f1 } else { f2 };
    }
    finish(f)
}

/// `∫ λ^k dμ` for `k = 0..=kmax`, read off the Taylor coefficients of the closed form.
pub fn oracle_moments(measure: OracleMeasure, kmax: usize) -> Result<Vec<Complex64>> {
    let m = 1024usize.max(4 * kmax);
    let r = 0.9;
    let samples = (0..m)
        .map(|j| oracle_f(measure, Complex64::from_polar(r, 2.0 * PI * j as f64 / m as f64)))
        .collect::<Result<Vec<_>>>()?;
    let mut out = vec![Complex64::new(1.0, 0.0)];
    for k in 1..=kmax {
        let t: Complex64 = samples
            .iter()
            .enumerate()
            .map(|(j, f)| f * Complex64::from_polar(1.0, -2.0 * PI * (j * k) as f64 / m as f64))
            .sum::<Complex64>()
            / (m as f64 * r.powi(k as i32));
        out.push(t.conj() / 2.0);
    }
    Ok(out)
}

/// One row of an approximant sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub z: Complex64,
    pub value: Complex64,
    pub oracle_error: Option<f64>,
}

/// `-Ψ_n^{u_n}/Φ_n^{u_n}` over orders and points, compared with an oracle when given.
pub fn approximant_sweep(
    prefix: &ParamPrefix,
    us: &[UnitPoint],
    orders: &[usize],
    grid: &[Complex64],
    oracle: Option<OracleMeasure>,
) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(orders.len() * grid.len());
    for &n in orders {
        let u = *us.get(n.wrapping_sub(1)).ok_or_else(|| CmvError::Domain(format!("no u for order {n}")))?;
        for &z in grid {
            let value = modified_approximant(prefix, u, n, z)?.value;
            let oracle_error = match oracle {
                Some(m) => Some((value - oracle_f(m, z)?).norm()),
                None => None,
            };
            rows.push(SweepRow { n, z, value, oracle_error });
        }
    }
    Ok(rows)
}

pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let with_oracle = rows.iter().any(|r| r.oracle_error.is_some());
    let mut out = String::from("n,re_z,im_z,re_k,im_k");
    out.push_str(if with_oracle { ",abs_err\n" } else { "\n" });
    for r in rows {
        let _ = write!(out, "{},{},{},{},{}", r.n, g17(r.z.re), g17(r.z.im), g17(r.value.re), g17(r.value.im));
        match (with_oracle, r.oracle_error) {
            (true, Some(e)) => {
                let _ = writeln!(out, ",{}", g17(e));
            }
            (true, None) => out.push_str(",\n"),
            _ => out.push('\n'),
        }
    }
    out
}

/// Points on circles of the given radii, `count` per circle, offset half a step from angle 0.
pub fn ring_grid(radii: &[f64], count: usize) -> Vec<Complex64> {
    radii
        .iter()
        .flat_map(|&r| (0..count).map(move |j| Complex64::from_polar(r, 2.0 * PI * (j as f64 + 0.5) / count as f64)))
        .collect()
}

/// A runnable convergence scenario: parameters, `u`-sequence and evaluation grid.
#[derive(Debug, Clone)]
pub struct ConvergencePreset {
    pub name: &'static str,
    pub spec: SchurSpec,
    pub uspec: USequenceSpec,
    pub grid: Vec<Complex64>,
    /// Where convergence is not claimed, besides the support itself.
    pub excluded: &'static str,
}

/// The four scenarios: unimodular limit, rotated two-periodic, band-separated parities,
/// and a ratio limit.
pub fn convergence_presets() -> Vec<ConvergencePreset> {
    let c = Complex64::new;
    let grid = ring_grid(&[0.5, 1.0, 2.0], 24);
    let rule: crate::schur::RuleFn = Shared::new(|n: usize| Complex64::new(1.0 - 1.0 / (n as f64 + 1.0), 0.0));
    vec![
        ConvergencePreset {
            name: "unimodular-limit",
            spec: SchurSpec::Rule { name: "1-1/(n+1)".into(), rule },
            uspec: USequenceSpec::phase(),
            grid: grid.clone(),
            excluded: "nothing",
        },
        ConvergencePreset {
            name: "rotated-two-periodic",
            spec: SchurSpec::TwoPeriodic { odd: c(0.8, 0.0), even: c(0.9, 0.0) },
            uspec: USequenceSpec::phase(),
            grid: grid.clone(),
            excluded: "the arc at 1 from the two-periodic bound",
        },
        ConvergencePreset {
            name: "band-separated",
            spec: SchurSpec::Parity {
                odd: Box::new(SchurSpec::RandomHalfPlane { u: c(-1.0, 0.0), cos_alpha0: -0.25, seed: 8 }),
                even: Box::new(SchurSpec::RandomHalfPlane { u: c(1.0, 0.0), cos_alpha0: 0.75, seed: 9 }),
            },
            uspec: USequenceSpec::fixed_zero(UnitPoint::new(c(-1.0, 0.0)).expect("unit")),
            grid: grid.clone(),
            excluded: "the band arc around 1 and the fixed zero -1",
        },
        ConvergencePreset {
            name: "ratio-limit",
            spec: SchurSpec::Rotated { lambda: Complex64::from_polar(1.0, -PI / 3.0), inner: Box::new(SchurSpec::Constant(c(0.5, 0.0))) },
            uspec: USequenceSpec::fixed_zero(UnitPoint::from_angle(PI / 3.0 + PI)),
            grid,
            excluded: "the fixed zero",
        },
    ]
}

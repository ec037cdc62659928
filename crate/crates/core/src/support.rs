//! Limit points of finite spectra (weak versus double) and closed-form arc
//! bounds for the derived set of the support.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::numfmt::g17;
use crate::eig::{spectrum_of, SpectrumResult};
use crate::error::{domain, Result};
use crate::geometry::{make_arc, Arc, ArcKind, ArcSet, UnitPoint};
use crate::opuc::{gen_u_sequence, USequenceSpec};
use crate::schur::{expand, ParamPrefix, SchurSpec};

/// Default matching tolerance for orders `(n, n+1)`: one mean eigenvalue spacing.
pub fn default_epsilon(n: usize) -> f64 {
    TAU / n.max(1) as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CandidateClass {
    Double,
    WeakOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Candidate {
    pub point: UnitPoint,
    pub class: CandidateClass,
    /// Chordal distance between the matched points of `Σ_n` and `Σ_{n+1}`,
    /// or the distance to the other spectrum for unmatched points.
    pub match_distance: f64,
    /// Orders `(n, n+1)` of the pair the point was recorded from.
    pub pair: (usize, usize),
    /// Distance to the declared exceptional set, when one is known.
    pub exceptional_distance: Option<f64>,
    /// Within `epsilon` of the exceptional set.
    pub near_exceptional: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupportEstimate {
    pub orders: Vec<usize>,
    pub epsilon: f64,
    pub candidates: Vec<Candidate>,
    pub exceptional: Vec<UnitPoint>,
}

impl SupportEstimate {
    pub fn doubles(&self) -> impl Iterator<Item = &Candidate> {
        self.candidates.iter().filter(|c| c.class == CandidateClass::Double)
    }

    pub fn weak_only(&self) -> impl Iterator<Item = &Candidate> {
        self.candidates.iter().filter(|c| c.class == CandidateClass::WeakOnly)
    }

    /// Double candidates not flagged as near the exceptional set.
    pub fn reliable_doubles(&self) -> impl Iterator<Item = &Candidate> {
        self.doubles().filter(|c| !c.near_exceptional)
    }

    /// `re,im,class,match_distance,near_exceptional` lines.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("re,im,class,match_distance,near_exceptional\n");
        for c in &self.candidates {
            let class = match c.class {
                CandidateClass::Double => "double",
                CandidateClass::WeakOnly => "weak-only",
            };
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                g17(c.point.value().re),
                g17(c.point.value().im),
                class,
                g17(c.match_distance),
                c.near_exceptional
            );
        }
        out
    }

    /// Flags candidates close to the given exceptional points.
    pub fn flag_exceptional(&mut self, points: &[UnitPoint]) {
        self.exceptional = points.to_vec();
        if points.is_empty() {
            return;
        }
        for c in &mut self.candidates {
            let d = points
                .iter()
                .map(|p| (p.value() - c.point.value()).norm())
                .fold(f64::INFINITY, f64::min);
            c.exceptional_distance = Some(d);
            c.near_exceptional = d <= self.epsilon;
        }
    }
}

struct Match {
    point: Complex64,
    distance: f64,
}

fn nearest(set: &[Complex64], z: Complex64) -> (usize, f64) {
    set.iter()
        .enumerate()
        .map(|(k, p)| (k, (p - z).norm()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("nonempty spectrum")
}

/// Classifies spectra given as consecutive pairs `(Σ_n, Σ_{n+1}), …`.
///
/// A point of `Σ_{n+1}` matches its nearest point of `Σ_n` when their
/// distance is at most `epsilon`; the representative is the normalised
/// midpoint. With several pairs, a match of the last pair is double only if
/// every other pair has a match within `epsilon` of it.
pub fn double_limit_filter(spectra: &[SpectrumResult], epsilon: f64) -> Result<SupportEstimate> {
    let labelled: Vec<(usize, Vec<Complex64>)> =
        spectra.iter().map(|s| (s.spectrum.order(), s.spectrum.values().collect())).collect();
    filter_labelled(&labelled, epsilon)
}

/// Same as [`double_limit_filter`] for point sets labelled with their order.
pub fn filter_labelled(spectra: &[(usize, Vec<Complex64>)], epsilon: f64) -> Result<SupportEstimate> {
    if spectra.is_empty() || spectra.len() % 2 != 0 {
        return domain("spectra must come in consecutive pairs (n, n+1)");
    }
    if !(epsilon > 0.0) {
        return domain(format!("epsilon must be positive, got {epsilon}"));
    }
    let mut pairs = Vec::new();
    for pair in spectra.chunks(2) {
        let (n, m) = (pair[0].0, pair[1].0);
        if m != n + 1 {
            return domain(format!("orders ({n}, {m}) are not consecutive"));
        }
        if pair[0].1.is_empty() || pair[1].1.is_empty() {
            return domain("empty spectrum");
        }
        pairs.push((n, m));
    }

    let mut matches: Vec<Vec<Match>> = Vec::with_capacity(pairs.len());
    let mut unmatched: Vec<Vec<(Complex64, f64)>> = Vec::with_capacity(pairs.len());
    for pair in spectra.chunks(2) {
        let lo = &pair[0].1;
        let hi = &pair[1].1;
        let mut ms = Vec::new();
        let mut um = Vec::new();
        for &q in hi {
            let (k, d) = nearest(lo, q);
            if d <= epsilon {
                let mid = (lo[k] + q) / 2.0;
                let point = if mid.norm() > 0.0 { mid / mid.norm() } else { q };
                ms.push(Match { point, distance: d });
            } else {
                um.push((q, d));
            }
        }
        for &p in lo {
            let (_, d) = nearest(hi, p);
            if d > epsilon {
                um.push((p, d));
            }
        }
        matches.push(ms);
        unmatched.push(um);
    }

    let last = pairs.len() - 1;
    let mut candidates = Vec::new();
    let mut doubles: Vec<Complex64> = Vec::new();
    for m in &matches[last] {
        let everywhere = (0..last).all(|j| matches[j].iter().any(|o| (o.point - m.point).norm() <= epsilon));
        if everywhere {
            doubles.push(m.point);
            candidates.push(Candidate {
                point: UnitPoint::project(m.point)?,
                class: CandidateClass::Double,
                match_distance: m.distance,
                pair: pairs[last],
                exceptional_distance: None,
                near_exceptional: false,
            });
        }
    }

    let mut weak: Vec<(Complex64, f64, (usize, usize))> = Vec::new();
    for (j, ms) in matches.iter().enumerate() {
        for m in ms {
            weak.push((m.point, m.distance, pairs[j]));
        }
    }
    for (j, um) in unmatched.iter().enumerate() {
        for &(p, d) in um {
            weak.push((p, d, pairs[j]));
        }
    }
    let mut kept: Vec<Complex64> = Vec::new();
    for (p, d, pair) in weak {
        if doubles.iter().any(|q| (q - p).norm() <= epsilon) {
            continue;
        }
        if kept.iter().any(|q| (q - p).norm() <= 1e-9) {
            continue;
        }
        kept.push(p);
        candidates.push(Candidate {
            point: UnitPoint::project(p)?,
            class: CandidateClass::WeakOnly,
            match_distance: d,
            pair,
            exceptional_distance: None,
            near_exceptional: false,
        });
    }
    candidates.sort_by(|a, b| a.point.angle().total_cmp(&b.point.angle()));

    let mut orders: Vec<usize> = pairs.iter().flat_map(|&(n, m)| [n, m]).collect();
    orders.sort_unstable();
    orders.dedup();
    Ok(SupportEstimate { orders, epsilon, candidates, exceptional: Vec::new() })
}

/// Spectra for the given consecutive pairs, computed in parallel.
pub fn pair_spectra(spec: &SchurSpec, uspec: &USequenceSpec, pairs: &[(usize, usize)]) -> Result<Vec<SpectrumResult>> {
    if pairs.is_empty() {
        return domain("at least one order pair is required");
    }
    for &(n, m) in pairs {
        if n == 0 || m != n + 1 {
            return domain(format!("orders ({n}, {m}) are not a consecutive pair"));
        }
    }
    let top = pairs.iter().map(|p| p.1).max().unwrap_or(1);
    let prefix = expand(spec, top)?;
    let us = gen_u_sequence(uspec, &prefix, top)?;
    let orders: Vec<usize> = pairs.iter().flat_map(|&(n, m)| [n, m]).collect();
    orders
        .par_iter()
        .map(|&n| spectrum_of(&prefix, us[n - 1], n))
        .collect()
}

/// `Σ_n` at each pair, double/weak classification and exceptional flags.
pub fn approximate_support(
    spec: &SchurSpec,
    uspec: &USequenceSpec,
    pairs: &[(usize, usize)],
    epsilon: Option<f64>,
) -> Result<SupportEstimate> {
    let spectra = pair_spectra(spec, uspec, pairs)?;
    let smallest = pairs.iter().map(|p| p.0).min().unwrap_or(1);
    let eps = epsilon.unwrap_or_else(|| default_epsilon(smallest));
    let mut est = double_limit_filter(&spectra, eps)?;
    if let Some(w) = uspec.target() {
        est.flag_exceptional(&[w]);
    }
    Ok(est)
}

/// Result of a closed-form bound: `{supp μ}′ ⊂ arcs`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArcBound {
    pub arcs: ArcSet,
    pub hypothesis: String,
    pub parameters: BTreeMap<String, f64>,
    pub conclusive: bool,
}

impl ArcBound {
    fn inconclusive(hypothesis: &str, parameters: BTreeMap<String, f64>) -> Self {
        ArcBound { arcs: ArcSet::full_circle(), hypothesis: hypothesis.to_string(), parameters, conclusive: false }
    }

    pub fn param(&self, key: &str) -> Option<f64> {
        self.parameters.get(key).copied()
    }

    /// Largest chordal distance from `z` into the bound arcs (0 when inside).
    pub fn distance(&self, z: Complex64) -> f64 {
        self.arcs.arcs.iter().map(|a| crate::geometry::arc_distance(a, z)).fold(f64::INFINITY, f64::min)
    }
}

fn params(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn delta(lambda: Complex64, alpha: f64) -> Result<Arc> {
    make_arc(ArcKind::Delta, lambda, alpha.clamp(0.0, PI))
}

/// Band separation of odd/even limit points.
pub fn bound_band(lambda: UnitPoint, alpha1: f64, alpha2: f64) -> Result<ArcBound> {
    if !(0.0 <= alpha1 && alpha1 < alpha2 && alpha2 <= PI) {
        return domain(format!("need 0 <= alpha1 < alpha2 <= pi, got ({alpha1}, {alpha2})"));
    }
    let m = ((alpha2 / 2.0).sin() - (alpha1 / 2.0).sin()).max((alpha1 / 2.0).cos() - (alpha2 / 2.0).cos());
    let mut p = params(&[("alpha1", alpha1), ("alpha2", alpha2)]);
    if m <= 0.0 {
        return Ok(ArcBound::inconclusive("band", p));
    }
    let alpha = 2.0 * m.min(1.0).asin();
    p.insert("alpha".into(), alpha);
    Ok(ArcBound {
        arcs: ArcSet::new(vec![delta(lambda.value(), alpha)?]),
        hypothesis: "band".into(),
        parameters: p,
        conclusive: true,
    })
}

/// Limit points in the half-plane `Re(ū z) >= cos α₀`.
pub fn bound_halfplane(lambda: UnitPoint, alpha0: f64) -> Result<ArcBound> {
    if !(alpha0 >= 0.0) {
        return domain(format!("alpha0 must be nonnegative, got {alpha0}"));
    }
    let mut p = params(&[("alpha0", alpha0)]);
    if alpha0 >= PI / 2.0 {
        return Ok(ArcBound::inconclusive("half-plane", p));
    }
    let alpha = 2.0 * alpha0.sin().sqrt().min(1.0).acos();
    p.insert("alpha".into(), alpha);
    Ok(ArcBound {
        arcs: ArcSet::new(vec![delta(lambda.value(), alpha)?]),
        hypothesis: "half-plane".into(),
        parameters: p,
        conclusive: true,
    })
}

/// Half-plane `D(u, α₀)` containing two limit points `a`, `b`; `None` when
/// they point in opposite directions.
pub fn best_halfplane(a: Complex64, b: Complex64) -> Result<Option<(UnitPoint, f64)>> {
    if a == b || a.norm() == 0.0 || b.norm() == 0.0 {
        return domain("need two distinct nonzero limit points");
    }
    let (a, b) = if a.norm() <= b.norm() { (a, b) } else { (b, a) };
    let dir = (b - a) / (b - a).norm();
    let theta = (dir * (a / a.norm()).conj()).arg();
    if (theta.abs() - PI).abs() < 1e-12 {
        return Ok(None);
    }
    if theta.abs() <= PI / 2.0 {
        Ok(Some((UnitPoint::project(a)?, a.norm().min(1.0).acos())))
    } else {
        let u = -theta.signum() * Complex64::i() * dir;
        let c = (a.norm() * theta.abs().sin()).min(1.0);
        Ok(Some((UnitPoint::project(u)?, c.acos())))
    }
}

/// Half-plane bound for a sequence whose rotated limit set is `{a, b}`.
pub fn bound_two_limit_points(lambda: UnitPoint, a: Complex64, b: Complex64) -> Result<ArcBound> {
    match best_halfplane(a, b)? {
        None => Ok(ArcBound::inconclusive("two-limit-points", BTreeMap::new())),
        Some((u, alpha0)) => {
            let mut bound = bound_halfplane(lambda, alpha0)?;
            bound.hypothesis = "two-limit-points".into();
            bound.parameters.insert("u_re".into(), u.value().re);
            bound.parameters.insert("u_im".into(), u.value().im);
            Ok(bound)
        }
    }
}

/// Limit set of unit points: finitely many, or contained in `Γ̄_ζ(center)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LimitSet {
    Points(Vec<UnitPoint>),
    Arc { center: UnitPoint, half_width: f64 },
}

/// Declared limit data for the diagonal comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagonalLimits {
    /// `limsup (||a_{n+1}| - |a_n|| + ρ_n + ρ_{n+1})`.
    pub limsup_c1_terms: f64,
    /// `limsup_{odd n} (1 - |a_n|)`.
    pub limsup_gap_odd: f64,
    /// `limsup_{even n} (1 - |a_n|)`.
    pub limsup_gap_even: f64,
    /// `liminf |a_n|`.
    pub liminf_modulus: f64,
    /// One parity subsequence has `|a_n| → 1`.
    pub parity_unimodular: bool,
    /// Limit set of `ū_n u_{n+1}` with `u_n = a_n/|a_n|`.
    pub phase_limits: LimitSet,
    /// Set when the data were estimated from a finite tail.
    pub estimated: bool,
}

impl DiagonalLimits {
    /// Exact data for constant parameters `a`.
    pub fn constant(a: Complex64) -> Result<Self> {
        let m = a.norm();
        if m >= 1.0 {
            return domain("constant parameter must lie in the open disk");
        }
        let r = (1.0 - m * m).sqrt();
        Ok(DiagonalLimits {
            limsup_c1_terms: 2.0 * r,
            limsup_gap_odd: 1.0 - m,
            limsup_gap_even: 1.0 - m,
            liminf_modulus: m,
            parity_unimodular: false,
            phase_limits: LimitSet::Points(vec![UnitPoint::one()]),
            estimated: false,
        })
    }
}

/// Diagonal (unimodular) comparison bound with the optional parity sharpening
/// and arc shrinking for an arc-shaped phase limit set.
pub fn bound_diagonal(limits: &DiagonalLimits) -> Result<ArcBound> {
    let l = limits;
    for (name, v) in [
        ("limsup_c1_terms", l.limsup_c1_terms),
        ("limsup_gap_odd", l.limsup_gap_odd),
        ("limsup_gap_even", l.limsup_gap_even),
        ("liminf_modulus", l.liminf_modulus),
    ] {
        if !(v >= 0.0) || !v.is_finite() {
            return domain(format!("{name} must be a nonnegative number, got {v}"));
        }
    }
    if l.liminf_modulus > 1.0 || l.limsup_gap_odd > 1.0 || l.limsup_gap_even > 1.0 {
        return domain("moduli must lie in [0, 1]");
    }
    let c1 = 0.5 * l.limsup_c1_terms;
    let c2 = (l.limsup_gap_odd / 2.0).sqrt() + (l.limsup_gap_even / 2.0).sqrt();
    let c = c1.min(c2);
    let tag = if l.estimated { "diagonal (estimate)" } else { "diagonal" };
    let mut p = params(&[("c1", c1), ("c2", c2), ("c", c)]);
    let alpha = if l.parity_unimodular {
        (-l.liminf_modulus).acos()
    } else if c < 1.0 {
        2.0 * c.acos()
    } else {
        return Ok(ArcBound::inconclusive(tag, p));
    };
    p.insert("alpha".into(), alpha);
    let arcs = match &l.phase_limits {
        LimitSet::Points(pts) => {
            if pts.is_empty() {
                return domain("phase limit set is empty");
            }
            pts.iter().map(|q| delta(q.value(), alpha)).collect::<Result<Vec<_>>>()?
        }
        LimitSet::Arc { center, half_width } => {
            p.insert("zeta".into(), *half_width);
            if *half_width < alpha {
                vec![delta(center.value(), alpha - half_width)?]
            } else {
                return Ok(ArcBound::inconclusive(tag, p));
            }
        }
    };
    Ok(ArcBound { arcs: ArcSet::new(arcs), hypothesis: tag.into(), parameters: p, conclusive: true })
}

/// Ratio-asymptotic bound: arcs `Δ_α(λ)` for `λ` in the limit set of `a_{n+1}/a_n`.
pub fn bound_ratio(limits: &[UnitPoint], liminf_modulus: f64) -> Result<ArcBound> {
    if limits.is_empty() {
        return domain("ratio limit set is empty");
    }
    if !(0.0..=1.0).contains(&liminf_modulus) {
        return domain(format!("liminf |a_n| = {liminf_modulus} outside [0, 1]"));
    }
    let mut p = params(&[("liminf_modulus", liminf_modulus)]);
    if liminf_modulus == 0.0 {
        return Ok(ArcBound::inconclusive("ratio", p));
    }
    let alpha = 2.0 * liminf_modulus.asin();
    p.insert("alpha".into(), alpha);
    let arcs = limits.iter().map(|q| delta(q.value(), alpha)).collect::<Result<Vec<_>>>()?;
    Ok(ArcBound { arcs: ArcSet::new(arcs), hypothesis: "ratio".into(), parameters: p, conclusive: true })
}

/// `(α₊, α₋)` with `cos α± = ρ_o ρ_e ∓ Re(ā_o a_e)`.
pub fn two_periodic_angles(a_o: Complex64, a_e: Complex64) -> Result<(f64, f64)> {
    if a_o.norm() > 1.0 + 1e-12 || a_e.norm() > 1.0 + 1e-12 {
        return domain("two-periodic parameters must lie in the closed disk");
    }
    let ro = (1.0 - a_o.norm_sqr()).max(0.0).sqrt();
    let re = (1.0 - a_e.norm_sqr()).max(0.0).sqrt();
    let x = (a_o.conj() * a_e).re;
    let plus = (ro * re - x).clamp(-1.0, 1.0).acos();
    let minus = (ro * re + x).clamp(-1.0, 1.0).acos();
    Ok((plus, minus))
}

/// Comparison with rotated two-periodic parameters at Schur distance `s`.
pub fn bound_two_periodic_distance(lambda: UnitPoint, a_o: Complex64, a_e: Complex64, s: f64) -> Result<ArcBound> {
    if !(s >= 0.0) {
        return domain(format!("distance s must be nonnegative, got {s}"));
    }
    let (plus, minus) = two_periodic_angles(a_o, a_e)?;
    let mut p = params(&[("alpha_plus", plus), ("alpha_minus", minus), ("s", s)]);
    let mut gaps = Vec::new();
    for (sign, alpha, key) in [(1.0, plus, "gap_plus"), (-1.0, minus, "gap_minus")] {
        if s < (alpha / 2.0).sin() {
            let zeta = 2.0 * s.asin();
            let width = alpha - zeta;
            p.insert(key.into(), width);
            if width > 0.0 {
                gaps.push((sign * lambda.value(), width));
            }
        }
    }
    if gaps.is_empty() {
        return Ok(ArcBound::inconclusive("two-periodic", p));
    }
    Ok(ArcBound {
        arcs: ArcSet::complement_of_gaps(&gaps),
        hypothesis: "two-periodic".into(),
        parameters: p,
        conclusive: true,
    })
}

/// Odd/even limit points within `Γ̄_{ξ_o}(a_o)`, `Γ̄_{ξ_e}(a_e)` of the rotated sequence.
pub fn bound_two_periodic(lambda: UnitPoint, a_o: Complex64, a_e: Complex64, xi_o: f64, xi_e: f64) -> Result<ArcBound> {
    if !(0.0..=PI).contains(&xi_o) || !(0.0..=PI).contains(&xi_e) {
        return domain("xi_o and xi_e must lie in [0, pi]");
    }
    let s = a_o.norm() * (xi_o / 2.0).sin() + a_e.norm() * (xi_e / 2.0).sin();
    bound_two_periodic_distance(lambda, a_o, a_e, s)
}

/// Intersection of `Δ_{α_j}(λ_j)`, i.e. the circle minus the gaps `Γ_{α_j}(λ_j)`.
pub fn intersect_deltas(parts: &[(UnitPoint, f64)]) -> ArcSet {
    let gaps: Vec<(Complex64, f64)> = parts.iter().map(|(l, a)| (l.value(), *a)).collect();
    ArcSet::complement_of_gaps(&gaps)
}

/// Confinement of spurious weak limit points inside a gap `Γ_{α_j}(w_j)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeakLimitBound {
    pub center: UnitPoint,
    pub alpha: f64,
    /// `None` when `α_j <= α₀`.
    pub beta: Option<f64>,
}

/// `cos(β_j/2) = cos(α_j/2)/cos(α₀/2)` for every gap with `α_j > α₀`.
pub fn bound_weak_limit(gaps: &[(UnitPoint, f64)], alpha0: f64) -> Result<Vec<WeakLimitBound>> {
    if !(0.0..=PI).contains(&alpha0) {
        return domain(format!("alpha0 = {alpha0} outside [0, pi]"));
    }
    gaps.iter()
        .map(|&(w, alpha)| {
            if !(alpha > 0.0 && alpha <= PI) {
                return domain(format!("gap half-width {alpha} outside (0, pi]"));
            }
            let beta = if alpha > alpha0 {
                let ratio = (alpha / 2.0).cos() / (alpha0 / 2.0).cos();
                Some(2.0 * ratio.clamp(-1.0, 1.0).acos())
            } else {
                None
            };
            Ok(WeakLimitBound { center: w, alpha, beta })
        })
        .collect()
}

/// `‖Q_n(a; u)‖ = √(1 + |u - a_n|²/ρ_n²)`.
pub fn projection_norm(a: Complex64, u: UnitPoint) -> Result<f64> {
    if a.norm() >= 1.0 {
        return domain(format!("|a_n| = {} is not below 1", a.norm()));
    }
    let r2 = 1.0 - a.norm_sqr();
    Ok((1.0 + (u.value() - a).norm_sqr() / r2).sqrt())
}

/// `α₀` from `liminf 1/‖Q_n‖ = cos(α₀/2)`.
pub fn alpha0_from_inverse_norm(liminf_inverse_norm: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&liminf_inverse_norm) {
        return domain(format!("liminf 1/||Q_n|| = {liminf_inverse_norm} outside [0, 1]"));
    }
    Ok(2.0 * liminf_inverse_norm.acos())
}

/// Tail window used by the estimators: `min(200, N/2)` (at least 1).
pub fn tail_window(n: usize) -> usize {
    (n / 2).clamp(1, 200)
}

/// Estimate of `α₀` from the last `tail_window` terms of `(a_n, u_n)`.
pub fn estimate_alpha0(prefix: &ParamPrefix, us: &[UnitPoint]) -> Result<f64> {
    let n = prefix.len().min(us.len());
    if n == 0 {
        return domain("empty sequence");
    }
    let w = tail_window(n);
    let mut worst = f64::INFINITY;
    for k in n - w..n {
        worst = worst.min(1.0 / projection_norm(prefix.values[k], us[k])?);
    }
    alpha0_from_inverse_norm(worst)
}

/// Greedy clustering of points with the given radius; cluster means are returned.
pub fn cluster_points(points: &[Complex64], radius: f64) -> Vec<Complex64> {
    let mut sums: Vec<(Complex64, Complex64, usize)> = Vec::new();
    for &p in points {
        match sums.iter_mut().find(|(seed, _, _)| (seed - p).norm() <= radius) {
            Some(entry) => {
                entry.1 += p;
                entry.2 += 1;
            }
            None => sums.push((p, p, 1)),
        }
    }
    sums.into_iter().map(|(_, s, k)| s / k as f64).collect()
}

/// Limit points of `(a_m)` estimated from the tail window with cluster radius `1e-3`.
pub fn estimate_limit_points(values: &[Complex64]) -> Vec<Complex64> {
    let n = values.len();
    if n == 0 {
        return Vec::new();
    }
    cluster_points(&values[n - tail_window(n)..], 1e-3)
}

/// Diagonal limit data estimated from the tail of a prefix (labelled as an estimate).
pub fn estimate_diagonal_limits(prefix: &ParamPrefix) -> Result<DiagonalLimits> {
    let n = prefix.len();
    if n < 4 {
        return domain("need at least four parameters to estimate limits");
    }
    let w = tail_window(n).min(n - 1);
    let start = n - 1 - w;
    let m: Vec<f64> = prefix.values.iter().map(|a| a.norm()).collect();
    let mut c1: f64 = 0.0;
    let mut odd: f64 = 0.0;
    let mut even: f64 = 0.0;
    let mut inf = f64::INFINITY;
    let mut phases = Vec::new();
    for k in start..n - 1 {
        c1 = c1.max((m[k + 1] - m[k]).abs() + prefix.rhos[k] + prefix.rhos[k + 1]);
        // k is 0-based, so index k holds a_{k+1}.
        if k % 2 == 0 {
            odd = odd.max(1.0 - m[k]);
        } else {
            even = even.max(1.0 - m[k]);
        }
        inf = inf.min(m[k]);
        if m[k] > 1e-14 && m[k + 1] > 1e-14 {
            let u0 = prefix.values[k] / m[k];
            let u1 = prefix.values[k + 1] / m[k + 1];
            phases.push(u0.conj() * u1);
        }
    }
    let pts = cluster_points(&phases, 1e-3)
        .into_iter()
        .map(UnitPoint::project)
        .collect::<Result<Vec<_>>>()?;
    if pts.is_empty() {
        return domain("no nonzero parameters in the tail window");
    }
    let near_one = |gap: f64| gap < 1e-3;
    Ok(DiagonalLimits {
        limsup_c1_terms: c1,
        limsup_gap_odd: odd,
        limsup_gap_even: even,
        liminf_modulus: inf,
        parity_unimodular: near_one(odd) || near_one(even),
        phase_limits: LimitSet::Points(pts),
        estimated: true,
    })
}

/// Smallest closed arc `Γ̄_ζ(λ₀)` containing the given unit points.
pub fn enclosing_arc(points: &[UnitPoint]) -> Result<(UnitPoint, f64)> {
    if points.is_empty() {
        return domain("no points to enclose");
    }
    let mut angles: Vec<f64> = points.iter().map(|p| p.angle()).collect();
    angles.sort_by(f64::total_cmp);
    let k = angles.len();
    let (mut best_gap, mut best_end) = (f64::NEG_INFINITY, 0usize);
    for i in 0..k {
        let next = if i + 1 < k { angles[i + 1] } else { angles[0] + TAU };
        let gap = next - angles[i];
        if gap > best_gap {
            best_gap = gap;
            best_end = (i + 1) % k;
        }
    }
    let zeta = (TAU - best_gap) / 2.0;
    let start = angles[best_end];
    Ok((UnitPoint::from_angle(start + zeta), zeta))
}

//! Points, arcs and finite point sets on circles centred at the origin.
//!
//! Arcs are stored as a centre point `c` (whose modulus fixes the carrying
//! circle) and an angular half-width `h`: the arc is `{e^{iθ} c : |θ| ≤ h}`
//! (closed) or `|θ| < h` (open). All distances are chordal, i.e. Euclidean
//! distances in the complex plane.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, CmvError, Result};

/// Absolute angular tolerance used for arc membership at endpoints.
pub const ANGLE_TOL: f64 = 1e-12;

const UNIT_TOL: f64 = 1e-12;
const RADIUS_REL_TOL: f64 = 1e-9;

/// A point of the unit circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Complex64", into = "Complex64")]
pub struct UnitPoint(Complex64);

impl UnitPoint {
    /// Checked constructor: `| |z| - 1 | <= 1e-12`.
    pub fn new(z: Complex64) -> Result<Self> {
        if !z.is_finite() || (z.norm() - 1.0).abs() > UNIT_TOL {
            return domain(format!("{z} is not on the unit circle (|z| = {})", z.norm()));
        }
        Ok(UnitPoint(z))
    }

    /// Radial projection onto the circle. Fails only for zero or non-finite input.
    pub fn project(z: Complex64) -> Result<Self> {
        let r = z.norm();
        if !(r.is_finite() && r > 0.0) {
            return domain(format!("cannot project {z} onto the unit circle"));
        }
        Ok(UnitPoint(z / r))
    }

    /// `e^{iθ}`.
    pub fn from_angle(theta: f64) -> Self {
        UnitPoint(Complex64::from_polar(1.0, theta))
    }

    pub fn one() -> Self {
        UnitPoint(Complex64::new(1.0, 0.0))
    }

    pub fn value(self) -> Complex64 {
        self.0
    }

    pub fn conj(self) -> Self {
        UnitPoint(self.0.conj())
    }

    /// Principal argument mapped to `[0, 2π)`.
    pub fn angle(self) -> f64 {
        principal_angle(self.0)
    }
}

impl From<UnitPoint> for Complex64 {
    fn from(p: UnitPoint) -> Self {
        p.0
    }
}

impl TryFrom<Complex64> for UnitPoint {
    type Error = CmvError;
    fn try_from(z: Complex64) -> Result<Self> {
        UnitPoint::new(z)
    }
}

/// Argument of `z` in `[0, 2π)`.
pub fn principal_angle(z: Complex64) -> f64 {
    let a = z.arg();
    if a < 0.0 {
        let b = a + TAU;
        if b >= TAU {
            0.0
        } else {
            b
        }
    } else {
        a
    }
}

/// Wraps an angle to `(-π, π]`.
pub fn wrap_angle(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(TAU);
    if t > PI {
        t -= TAU;
    }
    t
}

/// The three arc constructors used by the support bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArcKind {
    /// `Γ_α(w)`: open arc of half-width `α` centred at `w`.
    GammaOpen,
    /// `Γ̄_α(w)`: closed arc of half-width `α` centred at `w`.
    GammaClosed,
    /// `Δ_α(w)`: closed arc of half-width `π - α` centred at `-w`.
    Delta,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub center: Complex64,
    pub half_width: f64,
    pub closed: bool,
}

impl Arc {
    pub fn new(center: Complex64, half_width: f64, closed: bool) -> Result<Self> {
        if !(0.0..=PI).contains(&half_width) {
            return domain(format!("arc half-width {half_width} outside [0, π]"));
        }
        if !center.is_finite() {
            return domain("arc centre must be finite");
        }
        Ok(Arc {
            center,
            half_width,
            closed,
        })
    }

    /// The whole unit circle as a closed arc.
    pub fn full_circle() -> Self {
        Arc {
            center: Complex64::new(1.0, 0.0),
            half_width: PI,
            closed: true,
        }
    }

    pub fn radius(&self) -> f64 {
        self.center.norm()
    }

    /// Endpoints `e^{∓ih} c`.
    pub fn endpoints(&self) -> (Complex64, Complex64) {
        let r = Complex64::from_polar(1.0, self.half_width);
        (self.center * r.conj(), self.center * r)
    }

    pub fn is_full(&self) -> bool {
        self.closed && self.half_width >= PI
    }

    /// Evenly spaced sample of `m >= 2` points along the (closed) arc.
    pub fn discretize(&self, m: usize) -> Vec<Complex64> {
        let m = m.max(2);
        (0..m)
            .map(|k| {
                let t = -self.half_width + 2.0 * self.half_width * k as f64 / (m - 1) as f64;
                self.center * Complex64::from_polar(1.0, t)
            })
            .collect()
    }
}

/// Builds `Γ_α(w)`, `Γ̄_α(w)` or `Δ_α(w)`.
pub fn make_arc(kind: ArcKind, w: Complex64, alpha: f64) -> Result<Arc> {
    if !(0.0..=PI).contains(&alpha) {
        return domain(format!("alpha = {alpha} outside [0, π]"));
    }
    match kind {
        ArcKind::GammaOpen => Arc::new(w, alpha, false),
        ArcKind::GammaClosed => Arc::new(w, alpha, true),
        ArcKind::Delta => Arc::new(-w, PI - alpha, true),
    }
}

/// Membership of `z` in `arc`. `|z|` must agree with the arc radius.
pub fn arc_contains(arc: &Arc, z: Complex64) -> Result<bool> {
    let r = arc.radius();
    if (z.norm() - r).abs() > RADIUS_REL_TOL * r.max(f64::MIN_POSITIVE) {
        return domain(format!(
            "point {z} is not on the carrying circle of radius {r}"
        ));
    }
    Ok(angle_in_arc(arc, z))
}

fn angle_in_arc(arc: &Arc, z: Complex64) -> bool {
    if arc.half_width >= PI {
        // Only the antipode of the centre is an endpoint.
        return arc.closed || (z * arc.center.conj()).arg().abs() < PI - ANGLE_TOL;
    }
    let phi = (z * arc.center.conj()).arg().abs();
    if arc.closed {
        phi <= arc.half_width + ANGLE_TOL
    } else {
        phi < arc.half_width - ANGLE_TOL
    }
}

/// Chordal distance from `z` to the closure of `arc`.
pub fn arc_distance(arc: &Arc, z: Complex64) -> f64 {
    let r = arc.radius();
    let m = z.norm();
    if m == 0.0 {
        return r;
    }
    if arc.center == Complex64::new(0.0, 0.0) {
        return m;
    }
    let phi = (z * arc.center.conj()).arg().abs();
    if phi <= arc.half_width {
        (m - r).abs()
    } else {
        let (a, b) = arc.endpoints();
        (z - a).norm().min((z - b).norm())
    }
}

/// A finite union of arcs on a common circle.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ArcSet {
    pub arcs: Vec<Arc>,
}

impl ArcSet {
    pub fn new(arcs: Vec<Arc>) -> Self {
        ArcSet { arcs }
    }

    pub fn full_circle() -> Self {
        ArcSet {
            arcs: vec![Arc::full_circle()],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn contains(&self, z: Complex64) -> Result<bool> {
        for a in &self.arcs {
            if arc_contains(a, z)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Unit-circle set left after removing the given open gaps `Γ_h(c)`.
    ///
    /// Each gap is `(centre, half_width)`; the result is a union of closed arcs.
    pub fn complement_of_gaps(gaps: &[(Complex64, f64)]) -> Self {
        let mut spans: Vec<(f64, f64)> = gaps
            .iter()
            .filter(|(_, h)| *h > 0.0)
            .map(|&(c, h)| {
                let h = h.min(PI);
                let s = (principal_angle(c) - h).rem_euclid(TAU);
                (s, s + 2.0 * h)
            })
            .collect();
        if spans.is_empty() {
            return ArcSet::full_circle();
        }
        spans.sort_by(|a, b| a.0.total_cmp(&b.0));

        // Merge open intervals; touching intervals keep their shared endpoint free.
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(spans.len());
        for (s, e) in spans {
            match merged.last_mut() {
                Some(last) if s < last.1 => last.1 = last.1.max(e),
                _ => merged.push((s, e)),
            }
        }
        // Wrap-around overlap of the last interval onto the first ones.
        while merged.len() > 1 {
            let last = *merged.last().unwrap();
            let first = merged[0];
            if last.1 - TAU > first.0 {
                merged.pop();
                merged[0] = (last.0 - TAU, first.1.max(last.1 - TAU));
            } else {
                break;
            }
        }
        if merged.len() == 1 && merged[0].1 - merged[0].0 >= TAU {
            return ArcSet::default();
        }

        let m = merged.len();
        let mut arcs = Vec::with_capacity(m);
        for i in 0..m {
            let from = merged[i].1;
            let to = if i + 1 < m {
                merged[i + 1].0
            } else {
                merged[0].0 + TAU
            };
            if to >= from {
                let mid = 0.5 * (from + to);
                arcs.push(Arc {
                    center: Complex64::from_polar(1.0, mid),
                    half_width: 0.5 * (to - from),
                    closed: true,
                });
            }
        }
        ArcSet { arcs }
    }
}

/// `n` points of the unit circle sorted by argument in `[0, 2π)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteSpectrum {
    order: usize,
    points: Vec<UnitPoint>,
}

impl FiniteSpectrum {
    pub fn new(mut points: Vec<UnitPoint>) -> Result<Self> {
        if points.is_empty() {
            return domain("a finite spectrum needs at least one point");
        }
        sort_by_angle(&mut points);
        Ok(FiniteSpectrum {
            order: points.len(),
            points,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn points(&self) -> &[UnitPoint] {
        &self.points
    }

    pub fn values(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.points.iter().map(|p| p.value())
    }

    /// Smallest chordal distance between two distinct points (infinite for `n = 1`).
    pub fn min_gap(&self) -> f64 {
        let n = self.points.len();
        if n < 2 {
            return f64::INFINITY;
        }
        (0..n)
            .map(|i| (self.points[(i + 1) % n].value() - self.points[i].value()).norm())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Stable sort by principal argument.
pub fn sort_by_angle(points: &mut [UnitPoint]) {
    points.sort_by(|a, b| a.angle().total_cmp(&b.angle()));
}

/// Sets the chordal distance can be measured to.
pub trait PointSet {
    fn is_empty_set(&self) -> bool;
    fn distance_unchecked(&self, z: Complex64) -> f64;
}

impl PointSet for FiniteSpectrum {
    fn is_empty_set(&self) -> bool {
        self.points.is_empty()
    }
    fn distance_unchecked(&self, z: Complex64) -> f64 {
        self.points
            .iter()
            .map(|p| (p.value() - z).norm())
            .fold(f64::INFINITY, f64::min)
    }
}

impl PointSet for [Complex64] {
    fn is_empty_set(&self) -> bool {
        self.is_empty()
    }
    fn distance_unchecked(&self, z: Complex64) -> f64 {
        self.iter()
            .map(|p| (p - z).norm())
            .fold(f64::INFINITY, f64::min)
    }
}

impl PointSet for Arc {
    fn is_empty_set(&self) -> bool {
        false
    }
    fn distance_unchecked(&self, z: Complex64) -> f64 {
        arc_distance(self, z)
    }
}

impl PointSet for ArcSet {
    fn is_empty_set(&self) -> bool {
        self.arcs.is_empty()
    }
    fn distance_unchecked(&self, z: Complex64) -> f64 {
        self.arcs
            .iter()
            .map(|a| arc_distance(a, z))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Chordal distance `inf_{s ∈ S} |z - s|`.
pub fn set_distance<S: PointSet + ?Sized>(z: Complex64, set: &S) -> Result<f64> {
    if set.is_empty_set() {
        return domain("distance to an empty set");
    }
    Ok(set.distance_unchecked(z))
}

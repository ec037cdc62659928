//! Orthogonal polynomials on the unit circle evaluated by forward recurrence,
//! para-orthogonal polynomials, and the special `u`-sequences.
//!
//! Recurrence (orthonormal):
//! `ρ_k φ_k = z φ_{k-1} + a_k φ*_{k-1}`, `ρ_k φ*_k = φ*_{k-1} + conj(a_k) z φ_{k-1}`.
//! The monic variant drops the `ρ_k`; second-kind polynomials use `-a`.

use std::fmt;

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::error::{domain, CmvError, Result};
use crate::geometry::UnitPoint;
use crate::parse::{parse_complex, parse_real};
use crate::schur::{fmt_complex, ParamPrefix};

/// Threshold above which running recurrence values are rescaled jointly.
const RESCALE_ABOVE: f64 = 1e100;
/// Largest degree for which coefficient lists are produced.
pub const MAX_COEFF_DEGREE: usize = 16;

/// `φ_n(z)` and `φ*_n(z)` (or their monic / second-kind counterparts).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolyEval {
    pub order: usize,
    pub at: Complex64,
    pub phi: Complex64,
    pub phi_star: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    Orthonormal,
    Monic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    First,
    /// Parameters negated.
    Second,
}

fn check_order(prefix: &ParamPrefix, n: usize) -> Result<()> {
    if n > prefix.len() {
        return domain(format!("order {n} exceeds prefix length {}", prefix.len()));
    }
    Ok(())
}

/// Joint forward recurrence for `(φ_k, φ*_k)` up to `k = n`.
pub fn eval_pair(
    prefix: &ParamPrefix,
    n: usize,
    z: Complex64,
    norm: Normalization,
    kind: Kind,
) -> Result<PolyEval> {
    check_order(prefix, n)?;
    let (phi, phi_star) = recur(&prefix.values[..n], &prefix.rhos[..n], z, norm, kind);
    Ok(PolyEval { order: n, at: z, phi, phi_star })
}

fn recur(
    values: &[Complex64],
    rhos: &[f64],
    z: Complex64,
    norm: Normalization,
    kind: Kind,
) -> (Complex64, Complex64) {
    let mut phi = Complex64::new(1.0, 0.0);
    let mut star = Complex64::new(1.0, 0.0);
    for (a, r) in values.iter().zip(rhos) {
        let a = if kind == Kind::Second { -a } else { *a };
        let zphi = z * phi;
        let p = zphi + a * star;
        let s = star + a.conj() * zphi;
        match norm {
            Normalization::Orthonormal => {
                phi = p / r;
                star = s / r;
            }
            Normalization::Monic => {
                phi = p;
                star = s;
            }
        }
    }
    (phi, star)
}

/// Orthonormal `φ_n(z)`, `φ*_n(z)`.
pub fn eval_phi_pair(prefix: &ParamPrefix, n: usize, z: Complex64) -> Result<PolyEval> {
    eval_pair(prefix, n, z, Normalization::Orthonormal, Kind::First)
}

/// Orthonormal second-kind `ψ_n(z)`, `ψ*_n(z)`.
pub fn eval_second_kind(prefix: &ParamPrefix, n: usize, z: Complex64) -> Result<PolyEval> {
    eval_pair(prefix, n, z, Normalization::Orthonormal, Kind::Second)
}

/// `‖Φ_n‖ = ρ_1 ⋯ ρ_n`.
pub fn monic_norm(prefix: &ParamPrefix, n: usize) -> Result<f64> {
    check_order(prefix, n)?;
    Ok(prefix.rhos[..n].iter().product())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Para {
    /// `p_n^u = z φ_{n-1} + u φ*_{n-1}`
    P,
    /// `q_n^u = φ*_n - conj(u) φ_n`
    Q,
}

/// Para-orthogonal polynomial value.
pub fn eval_para(prefix: &ParamPrefix, n: usize, u: UnitPoint, z: Complex64, which: Para) -> Result<Complex64> {
    if n == 0 {
        return domain("para-orthogonal polynomials start at order 1");
    }
    let u = u.value();
    match which {
        Para::P => {
            let e = eval_phi_pair(prefix, n - 1, z)?;
            Ok(z * e.phi + u * e.phi_star)
        }
        Para::Q => {
            let e = eval_phi_pair(prefix, n, z)?;
            Ok(e.phi_star - u.conj() * e.phi)
        }
    }
}

/// Value, derivative and scale of `p_n^u` at `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParaDerivative {
    pub value: Complex64,
    pub derivative: Complex64,
    /// `|φ_{n-1}(z)| + |φ*_{n-1}(z)|`, the natural size of `p_n^u` near `z`.
    pub scale: f64,
    /// Natural log of the factor divided out by rescaling; the true values
    /// are the stored ones times `exp(log_rescale)`.
    pub log_rescale: f64,
}

impl ParaDerivative {
    /// `ln |p_n^u(z)|` (`-inf` at an exact zero).
    pub fn log_abs_value(&self) -> f64 {
        self.value.norm().ln() + self.log_rescale
    }
}

/// `p_n^u(z)` and `(p_n^u)'(z)` via the differentiated recurrence.
///
/// With `|z| = 1` the values may be rescaled jointly for very large `n`;
/// `value/scale` and `value/derivative` are always exact quotients.
pub fn eval_para_derivative(prefix: &ParamPrefix, n: usize, u: UnitPoint, z: Complex64) -> Result<ParaDerivative> {
    if n == 0 {
        return domain("para-orthogonal polynomials start at order 1");
    }
    check_order(prefix, n - 1)?;
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let (mut f, mut fs, mut df, mut dfs) = (one, one, zero, zero);
    let mut log_rescale = 0.0;
    for k in 0..n - 1 {
        let a = prefix.values[k];
        let r = prefix.rhos[k];
        let nf = (z * f + a * fs) / r;
        let nfs = (fs + a.conj() * z * f) / r;
        let ndf = (f + z * df + a * dfs) / r;
        let ndfs = (dfs + a.conj() * (f + z * df)) / r;
        f = nf;
        fs = nfs;
        df = ndf;
        dfs = ndfs;
        let m = f.norm().max(fs.norm()).max(df.norm()).max(dfs.norm());
        if m > RESCALE_ABOVE {
            let s = 1.0 / m;
            f *= s;
            fs *= s;
            df *= s;
            dfs *= s;
            log_rescale += m.ln();
        }
    }
    let u = u.value();
    Ok(ParaDerivative {
        value: z * f + u * fs,
        derivative: f + z * df + u * dfs,
        scale: f.norm() + fs.norm(),
        log_rescale,
    })
}

/// `v = -u (1 - a ū)/(1 - ā u)`. The map is an involution for fixed `a`.
pub fn uv_transform(u: UnitPoint, a: Complex64) -> Result<UnitPoint> {
    if a.norm() >= 1.0 {
        return domain(format!("|a| = {} must be below 1", a.norm()));
    }
    let u = u.value();
    let v = -u * (1.0 - a * u.conj()) / (1.0 - a.conj() * u);
    UnitPoint::project(v)
}

/// Ascending coefficient lists of `φ_n` and `φ*_n` (orthonormal), `n <= 16`.
pub fn phi_coefficients(prefix: &ParamPrefix, n: usize) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    check_order(prefix, n)?;
    if n > MAX_COEFF_DEGREE {
        return domain(format!("coefficient extraction is limited to degree {MAX_COEFF_DEGREE}"));
    }
    let mut phi = vec![Complex64::new(1.0, 0.0)];
    let mut star = vec![Complex64::new(1.0, 0.0)];
    for k in 0..n {
        let a = prefix.values[k];
        let r = prefix.rhos[k];
        let mut nphi = vec![Complex64::new(0.0, 0.0); k + 2];
        let mut nstar = vec![Complex64::new(0.0, 0.0); k + 2];
        for (j, c) in phi.iter().enumerate() {
            nphi[j + 1] += c;
            nstar[j + 1] += a.conj() * c;
        }
        for (j, c) in star.iter().enumerate() {
            nphi[j] += a * c;
            nstar[j] += c;
        }
        phi = nphi.into_iter().map(|c| c / r).collect();
        star = nstar.into_iter().map(|c| c / r).collect();
    }
    Ok((phi, star))
}

/// Ascending coefficients of `p_n^u`, `n <= 17`.
pub fn para_coefficients(prefix: &ParamPrefix, n: usize, u: UnitPoint) -> Result<Vec<Complex64>> {
    if n == 0 {
        return domain("para-orthogonal polynomials start at order 1");
    }
    let (phi, star) = phi_coefficients(prefix, n - 1)?;
    let mut p = vec![Complex64::new(0.0, 0.0); n + 1];
    for (j, c) in phi.iter().enumerate() {
        p[j + 1] += c;
    }
    for (j, c) in star.iter().enumerate() {
        p[j] += u.value() * c;
    }
    Ok(p)
}

/// Horner evaluation of ascending coefficients.
pub fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

/// How the final parameters `u_n` of the truncations are chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UMode {
    Const(UnitPoint),
    /// `u_n = a_n/|a_n|`.
    Phase,
    /// `u_1` given, `u_{n+1} = w u_n (1 - a_n ū_n)/(1 - ā_n u_n)`.
    WRecurrence { w: UnitPoint, u1: UnitPoint },
    /// `u_n = -w p_{n-1}(w)/p*_{n-1}(w)` with `p_k = c₁φ_k + i c₂ψ_k`.
    Mixed { w: UnitPoint, c1: f64, c2: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct USequenceSpec {
    pub mode: UMode,
    /// Used by phase mode when `|a_n| < 1e-14`.
    pub fallback: UnitPoint,
}

impl USequenceSpec {
    pub fn new(mode: UMode) -> Self {
        USequenceSpec { mode, fallback: UnitPoint::one() }
    }

    pub fn constant(u: UnitPoint) -> Self {
        Self::new(UMode::Const(u))
    }

    /// The sequence `u^w` fixing a common zero at `w`.
    pub fn fixed_zero(w: UnitPoint) -> Self {
        Self::new(UMode::WRecurrence { w, u1: UnitPoint::new(-w.value()).expect("unit") })
    }

    pub fn phase() -> Self {
        Self::new(UMode::Phase)
    }

    /// The point `w` of the recurrence modes.
    pub fn target(&self) -> Option<UnitPoint> {
        match self.mode {
            UMode::WRecurrence { w, .. } | UMode::Mixed { w, .. } => Some(w),
            _ => None,
        }
    }

    /// Grammar: `const:U`, `phase[:FALLBACK]`, `fixed-zero:W`, `target:W:U1`, `mixed:W:C1:C2`.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let (kind, body) = match text.split_once(':') {
            Some((k, b)) => (k, Some(b)),
            None => (text, None),
        };
        let unit = |s: &str| -> Result<UnitPoint> {
            let z = parse_complex(s)?;
            UnitPoint::new(z).map_err(|_| CmvError::Validation(format!("{s} is not unimodular")))
        };
        fn need<'a>(b: Option<&'a str>, text: &str) -> Result<&'a str> {
            b.ok_or_else(|| CmvError::Parse(format!("u spec {text:?} is missing fields")))
        }
        let spec = match kind {
            "const" => Self::constant(unit(need(body, text)?)?),
            "phase" => {
                let mut s = Self::phase();
                if let Some(b) = body {
                    s.fallback = unit(b)?;
                }
                s
            }
            "fixed-zero" => Self::fixed_zero(unit(need(body, text)?)?),
            "target" => {
                let (w, u1) = need(body, text)?
                    .split_once(':')
                    .ok_or_else(|| CmvError::Parse(format!("target needs W:U1, got {text:?}")))?;
                Self::new(UMode::WRecurrence { w: unit(w)?, u1: unit(u1)? })
            }
            "mixed" => {
                let f: Vec<&str> = need(body, text)?.split(':').collect();
                if f.len() != 3 {
                    return Err(CmvError::Parse(format!("mixed needs W:C1:C2, got {text:?}")));
                }
                let (c1, c2) = (parse_real(f[1])?, parse_real(f[2])?);
                if c1 == 0.0 && c2 == 0.0 {
                    return Err(CmvError::Validation("mixed mode needs (c1, c2) != (0, 0)".into()));
                }
                Self::new(UMode::Mixed { w: unit(f[0])?, c1, c2 })
            }
            other => return Err(CmvError::Parse(format!("unknown u-sequence mode {other:?}"))),
        };
        Ok(spec)
    }
}

impl fmt::Display for USequenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = |p: UnitPoint| fmt_complex(p.value());
        match self.mode {
            UMode::Const(u) => write!(f, "const:{}", c(u)),
            UMode::Phase => write!(f, "phase:{}", c(self.fallback)),
            UMode::WRecurrence { w, u1 } => {
                if u1.value() == -w.value() {
                    write!(f, "fixed-zero:{}", c(w))
                } else {
                    write!(f, "target:{}:{}", c(w), c(u1))
                }
            }
            UMode::Mixed { w, c1, c2 } => write!(f, "mixed:{}:{:?}:{:?}", c(w), c1, c2),
        }
    }
}

impl Serialize for USequenceSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `u_1..u_N` (`us[k]` is `u_{k+1}`).
pub fn gen_u_sequence(spec: &USequenceSpec, prefix: &ParamPrefix, n: usize) -> Result<Vec<UnitPoint>> {
    match spec.mode {
        UMode::Const(u) => Ok(vec![u; n]),
        UMode::Phase => {
            check_order(prefix, n)?;
            Ok(prefix.values[..n]
                .iter()
                .map(|a| {
                    if a.norm() < 1e-14 {
                        spec.fallback
                    } else {
                        UnitPoint::project(*a).expect("nonzero")
                    }
                })
                .collect())
        }
        UMode::WRecurrence { w, u1 } => {
            if n == 0 {
                return Ok(Vec::new());
            }
            check_order(prefix, n - 1)?;
            let w = w.value();
            let mut out = Vec::with_capacity(n);
            let mut u = u1.value();
            out.push(u1);
            for a in &prefix.values[..n - 1] {
                let next = w * u * (1.0 - a * u.conj()) / (1.0 - a.conj() * u);
                let p = UnitPoint::project(next)?;
                u = p.value();
                out.push(p);
            }
            Ok(out)
        }
        UMode::Mixed { w, c1, c2 } => u_seq_mixed(prefix, w, c1, c2, n),
    }
}

/// `u_n = -w p_{n-1}(w)/p*_{n-1}(w)` with `p_k = c₁φ_k + i c₂ψ_k`, `p*_k = c₁φ*_k - i c₂ψ*_k`.
pub fn u_seq_mixed(prefix: &ParamPrefix, w: UnitPoint, c1: f64, c2: f64, n: usize) -> Result<Vec<UnitPoint>> {
    if c1 == 0.0 && c2 == 0.0 {
        return Err(CmvError::Validation("mixed mode needs (c1, c2) != (0, 0)".into()));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    check_order(prefix, n - 1)?;
    let wv = w.value();
    let i = Complex64::new(0.0, 1.0);
    let one = Complex64::new(1.0, 0.0);
    let (mut f, mut fs, mut g, mut gs) = (one, one, one, one);
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let p = c1 * f + i * c2 * g;
        let ps = c1 * fs - i * c2 * gs;
        let size = c1.abs() * fs.norm() + c2.abs() * gs.norm();
        if ps.norm() < 1e-14 * size.max(f64::MIN_POSITIVE) || ps.norm() == 0.0 {
            return Err(CmvError::Degenerate(format!(
                "p*_{k}(w) vanishes for w = {wv}, (c1, c2) = ({c1}, {c2})"
            )));
        }
        out.push(UnitPoint::project(-wv * p / ps)?);
        if k + 1 == n {
            break;
        }
        let a = prefix.values[k];
        let r = prefix.rhos[k];
        let (nf, nfs) = ((wv * f + a * fs) / r, (fs + a.conj() * wv * f) / r);
        let (ng, ngs) = ((wv * g - a * gs) / r, (gs - a.conj() * wv * g) / r);
        f = nf;
        fs = nfs;
        g = ng;
        gs = ngs;
        let m = f.norm().max(fs.norm()).max(g.norm()).max(gs.norm());
        if m > RESCALE_ABOVE {
            let s = 1.0 / m;
            f *= s;
            fs *= s;
            g *= s;
            gs *= s;
        }
    }
    Ok(out)
}

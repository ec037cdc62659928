//! Eigenvalues of finite truncations: Hessenberg reduction, shifted QR,
//! projection onto the circle and Newton refinement against `p_n^u`.

use num_complex::Complex64;
use serde::Serialize;

use crate::cmv::{build_truncation, BandedUnitary};
use crate::error::{domain, CmvError, Result};
use crate::geometry::{FiniteSpectrum, UnitPoint};
use crate::opuc::{eval_para_derivative, gen_u_sequence, USequenceSpec};
use crate::schur::{expand, ParamPrefix, SchurSpec};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Spectrum of a truncation together with diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumResult {
    pub spectrum: FiniteSpectrum,
    /// `|p_n^u(λ_j)| / max_{|z|=1} |p_n^u(z)|`, in spectrum order; the maximum
    /// is estimated on an equispaced grid of `max(4n, 64)` points.
    pub residuals: Vec<f64>,
    /// Total QR sweeps.
    pub iterations: usize,
    pub converged: bool,
    /// `max_j ||λ_j| - 1|` before projection.
    pub modulus_defect: f64,
}

/// Row-major dense complex matrix.
struct Dense {
    n: usize,
    a: Vec<Complex64>,
}

impl Dense {
    #[inline]
    fn at(&self, i: usize, j: usize) -> Complex64 {
        self.a[i * self.n + j]
    }

    #[inline]
    fn at_mut(&mut self, i: usize, j: usize) -> &mut Complex64 {
        &mut self.a[i * self.n + j]
    }
}

/// In-place Householder reduction to upper Hessenberg form.
fn hessenberg(m: &mut Dense) {
    let n = m.n;
    if n < 3 {
        return;
    }
    let mut v = vec![ZERO; n];
    for k in 0..n - 2 {
        let norm: f64 = (k + 1..n).map(|r| m.at(r, k).norm_sqr()).sum::<f64>().sqrt();
        let tail: f64 = (k + 2..n).map(|r| m.at(r, k).norm_sqr()).sum();
        if tail == 0.0 {
            continue;
        }
        let x0 = m.at(k + 1, k);
        let phase = if x0.norm() == 0.0 { Complex64::new(1.0, 0.0) } else { x0 / x0.norm() };
        let alpha = -phase * norm;
        for r in k + 1..n {
            v[r] = m.at(r, k);
        }
        v[k + 1] -= alpha;
        let vn: f64 = (k + 1..n).map(|r| v[r].norm_sqr()).sum::<f64>().sqrt();
        for x in &mut v[k + 1..n] {
            *x /= vn;
        }
        // Left: rows k+1.., columns k..
        for c in k..n {
            let mut s = ZERO;
            for r in k + 1..n {
                s += v[r].conj() * m.at(r, c);
            }
            s *= 2.0;
            for r in k + 1..n {
                *m.at_mut(r, c) -= v[r] * s;
            }
        }
        // Right: all rows, columns k+1..
        for r in 0..n {
            let row = &mut m.a[r * n..(r + 1) * n];
            let mut s = ZERO;
            for c in k + 1..n {
                s += row[c] * v[c];
            }
            s *= 2.0;
            for c in k + 1..n {
                row[c] -= s * v[c].conj();
            }
        }
        *m.at_mut(k + 1, k) = alpha;
        for r in k + 2..n {
            *m.at_mut(r, k) = ZERO;
        }
    }
}

/// `(c, s)` with `[[c, s], [-s̄, c]] (x, y)ᵀ = (r, 0)ᵀ`.
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64) {
    let ax = x.norm();
    let ay = y.norm();
    if ay == 0.0 {
        return (1.0, ZERO);
    }
    if ax == 0.0 {
        return (0.0, y.conj() / ay);
    }
    let nrm = ax.hypot(ay);
    (ax / nrm, (x / ax) * y.conj() / nrm)
}

fn wilkinson(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) / 2.0;
    let disc = (half * half + b * c).sqrt();
    let m1 = (a + d) / 2.0 + disc;
    let m2 = (a + d) / 2.0 - disc;
    if (m1 - d).norm() <= (m2 - d).norm() {
        m1
    } else {
        m2
    }
}

struct QrOutcome {
    eigenvalues: Vec<Complex64>,
    sweeps: usize,
}

/// Shifted QR on a Hessenberg matrix, eigenvalues only.
fn hessenberg_qr(h: &mut Dense) -> Result<QrOutcome> {
    let n = h.n;
    let cap = 30 * n;
    let mut eig = vec![ZERO; n];
    let mut found = vec![false; n];
    let mut sweeps = 0usize;
    let mut rot: Vec<(f64, Complex64)> = vec![(1.0, ZERO); n];
    let mut hi = n - 1;
    let mut its = 0usize;
    loop {
        if hi == 0 {
            eig[0] = h.at(0, 0);
            found[0] = true;
            break;
        }
        // Locate the active block [lo, hi].
        let mut lo = 0;
        for k in (1..=hi).rev() {
            let sub = h.at(k, k - 1).norm();
            let mut s = h.at(k - 1, k - 1).norm() + h.at(k, k).norm();
            if s == 0.0 {
                s = 1.0;
            }
            if sub <= 1e-15 * s {
                *h.at_mut(k, k - 1) = ZERO;
                lo = k;
                break;
            }
        }
        if lo == hi {
            eig[hi] = h.at(hi, hi);
            found[hi] = true;
            hi -= 1;
            its = 0;
            continue;
        }
        if sweeps >= cap {
            let partial = (0..n).filter(|&k| found[k]).map(|k| eig[k]).collect();
            return Err(CmvError::NonConvergence { iterations: sweeps, partial });
        }
        its += 1;
        sweeps += 1;
        let mu = if its % 10 == 0 {
            h.at(hi, hi) + 0.75 * h.at(hi, hi - 1).re.abs()
        } else {
            wilkinson(h.at(hi - 1, hi - 1), h.at(hi - 1, hi), h.at(hi, hi - 1), h.at(hi, hi))
        };
        for k in lo..=hi {
            *h.at_mut(k, k) -= mu;
        }
        for k in lo..hi {
            let (c, s) = givens(h.at(k, k), h.at(k + 1, k));
            rot[k] = (c, s);
            for j in k..=hi {
                let a = h.at(k, j);
                let b = h.at(k + 1, j);
                *h.at_mut(k, j) = c * a + s * b;
                *h.at_mut(k + 1, j) = -s.conj() * a + c * b;
            }
            *h.at_mut(k + 1, k) = ZERO;
        }
        for k in lo..hi {
            let (c, s) = rot[k];
            for i in lo..=(k + 1).min(hi) {
                let a = h.at(i, k);
                let b = h.at(i, k + 1);
                *h.at_mut(i, k) = c * a + s.conj() * b;
                *h.at_mut(i, k + 1) = -s * a + c * b;
            }
        }
        for k in lo..=hi {
            *h.at_mut(k, k) += mu;
        }
    }
    Ok(QrOutcome { eigenvalues: eig, sweeps })
}

/// Raw QR eigenvalues (not projected), with the sweep count.
pub fn qr_eigenvalues(c: &BandedUnitary) -> Result<(Vec<Complex64>, usize)> {
    let n = c.order();
    let mut m = Dense { n, a: c.to_dense() };
    hessenberg(&mut m);
    let out = hessenberg_qr(&mut m)?;
    Ok((out.eigenvalues, out.sweeps))
}

/// `ln max_{|z|=1} |p_n^u(z)|`, estimated on an equispaced grid.
pub fn log_peak(prefix: &ParamPrefix, n: usize, u: UnitPoint) -> Result<f64> {
    let m = (4 * n).max(64);
    let mut best = f64::NEG_INFINITY;
    for k in 0..m {
        let z = Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / m as f64);
        best = best.max(eval_para_derivative(prefix, n, u, z)?.log_abs_value());
    }
    Ok(best)
}

fn residuals(prefix: &ParamPrefix, n: usize, u: UnitPoint, pts: &[UnitPoint]) -> Result<Vec<f64>> {
    let peak = log_peak(prefix, n, u)?;
    pts.iter()
        .map(|p| Ok((eval_para_derivative(prefix, n, u, p.value())?.log_abs_value() - peak).exp()))
        .collect()
}

/// All eigenvalues of `C`, projected onto the unit circle.
pub fn eigen_unitary(c: &BandedUnitary) -> Result<SpectrumResult> {
    let defect = c.unitarity_defect();
    if defect > 1e-10 {
        return Err(CmvError::Validation(format!("matrix is not unitary (defect {defect:e})")));
    }
    let (raw, sweeps) = qr_eigenvalues(c)?;
    let modulus_defect = raw.iter().map(|z| (z.norm() - 1.0).abs()).fold(0.0, f64::max);
    let pts = raw.iter().map(|z| UnitPoint::project(*z)).collect::<Result<Vec<_>>>()?;
    let spectrum = FiniteSpectrum::new(pts)?;
    let prov = c.provenance();
    let prefix = ParamPrefix::from_values(prov.params.clone())?;
    let u = UnitPoint::project(prov.u)?;
    let residuals = residuals(&prefix, c.order(), u, spectrum.points())?;
    Ok(SpectrumResult { spectrum, residuals, iterations: sweeps, converged: true, modulus_defect })
}

/// Newton iteration on the circle toward a zero of `p_n^u`.
///
/// A step that vanishes away from a root (a symmetric critical point of the
/// update) is replaced by a fixed nudge of `1e-3` rad so the outcome stays
/// deterministic.
pub fn newton_refine(prefix: &ParamPrefix, u: UnitPoint, n: usize, lambda0: Complex64) -> Result<UnitPoint> {
    if (lambda0.norm() - 1.0).abs() > 0.1 {
        return domain(format!("starting point {lambda0} is not within 0.1 of the unit circle"));
    }
    let mut theta = lambda0.arg();
    for _ in 0..50 {
        let lam = Complex64::from_polar(1.0, theta);
        let d = eval_para_derivative(prefix, n, u, lam)?;
        if d.value.norm() < 1e-12 * d.scale {
            return UnitPoint::project(lam);
        }
        if d.derivative.norm() < 1e-14 * d.scale {
            return Err(CmvError::Stationary { at: lam });
        }
        let step = (d.value / (Complex64::i() * lam * d.derivative)).re;
        if step.abs() <= 4.0 * f64::EPSILON {
            theta += 1e-3;
        } else {
            theta -= step;
        }
    }
    Err(CmvError::RefineNonConvergence { last: Complex64::from_polar(1.0, theta) })
}

/// Spectrum of `C(a_1, …, a_{n-1}, u)` from an expanded prefix, refined.
pub fn spectrum_of(prefix: &ParamPrefix, u: UnitPoint, n: usize) -> Result<SpectrumResult> {
    let c = build_truncation(prefix, u, n)?;
    let (raw, sweeps) = qr_eigenvalues(&c)?;
    let modulus_defect = raw.iter().map(|z| (z.norm() - 1.0).abs()).fold(0.0, f64::max);
    let projected = raw.iter().map(|z| UnitPoint::project(*z)).collect::<Result<Vec<_>>>()?;
    let refined: Vec<UnitPoint> = projected
        .iter()
        .enumerate()
        .map(|(j, p)| {
            let gap = projected
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != j)
                .map(|(_, q)| (q.value() - p.value()).norm())
                .fold(f64::INFINITY, f64::min);
            match newton_refine(prefix, u, n, p.value()) {
                Ok(r) if (r.value() - p.value()).norm() <= gap / 2.0 => r,
                _ => *p,
            }
        })
        .collect();
    let spectrum = FiniteSpectrum::new(refined)?;
    let residuals = residuals(prefix, n, u, spectrum.points())?;
    Ok(SpectrumResult { spectrum, residuals, iterations: sweeps, converged: true, modulus_defect })
}

/// `Σ_n(a; u)`: expand the parameters, pick `u_n`, build, diagonalize, refine.
pub fn sigma_n(spec: &SchurSpec, uspec: &USequenceSpec, n: usize) -> Result<SpectrumResult> {
    if n == 0 {
        return domain("order must be at least 1");
    }
    let prefix = expand(spec, n)?;
    let us = gen_u_sequence(uspec, &prefix, n)?;
    spectrum_of(&prefix, us[n - 1], n)
}

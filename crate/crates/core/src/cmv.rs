//! Five-diagonal unitary truncations `C(a_1, …, a_{n-1}, u)`, the Jacobi
//! comparison matrix, banded products and shifted solves.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use serde::Serialize;

use crate::numfmt::g17;
use crate::error::{domain, CmvError, Result};
use crate::geometry::UnitPoint;
use crate::schur::{rho, ParamPrefix, SchurSpec};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `Θ(a) = [[-a, ρ], [ρ, ā]]`.
pub fn theta_block(a: Complex64) -> Result<[[Complex64; 2]; 2]> {
    let r = Complex64::new(rho(a)?, 0.0);
    Ok([[-a, r], [r, a.conj()]])
}

/// Where a truncation came from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    /// `a_1, …, a_{n-1}`.
    pub params: Vec<Complex64>,
    pub u: Complex64,
}

/// `n × n` matrix with entries only on the diagonals `-2..=2`.
///
/// `rows[i][d]` holds entry `(i, i + d - 2)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandedUnitary {
    order: usize,
    rows: Vec<[Complex64; 5]>,
    provenance: Provenance,
}

impl BandedUnitary {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Entry `(i, j)`, zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        let d = j as isize - i as isize;
        if d.abs() > 2 || i >= self.order || j >= self.order {
            ZERO
        } else {
            self.rows[i][(d + 2) as usize]
        }
    }

    /// Dense row-major copy.
    pub fn to_dense(&self) -> Vec<Complex64> {
        let n = self.order;
        let mut m = vec![ZERO; n * n];
        for i in 0..n {
            for j in i.saturating_sub(2)..(i + 3).min(n) {
                m[i * n + j] = self.get(i, j);
            }
        }
        m
    }

    /// `max |(C C*)_{ij} - δ_{ij}|`, computed in O(n) from the band.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.order;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..(i + 5).min(n) {
                let lo = j.saturating_sub(2);
                let hi = (i + 2).min(n - 1);
                let mut s = ZERO;
                for k in lo..=hi {
                    s += self.get(i, k) * self.get(j, k).conj();
                }
                if i == j {
                    s -= ONE;
                }
                worst = worst.max(s.norm());
            }
        }
        worst
    }

    /// Nonzero entries as `i,j,re,im` lines (1-based indices).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,j,re,im\n");
        for i in 0..self.order {
            for j in i.saturating_sub(2)..(i + 3).min(self.order) {
                let v = self.get(i, j);
                if v != ZERO {
                    let _ = writeln!(out, "{},{},{},{}", i + 1, j + 1, g17(v.re), g17(v.im));
                }
            }
        }
        out
    }
}

/// Tridiagonal helper: `t[i] = [(i,i-1), (i,i), (i,i+1)]`.
fn tri_get(t: &[[Complex64; 3]], i: usize, j: usize) -> Complex64 {
    let d = j as isize - i as isize;
    if d.abs() > 1 {
        ZERO
    } else {
        t[i][(d + 1) as usize]
    }
}

fn place_block(t: &mut [[Complex64; 3]], k: usize, b: Complex64) -> Result<()> {
    // Θ(b_k) occupies rows/cols (k-1, k) in 0-based indexing; truncated at the edge.
    let n = t.len();
    let th = theta_block(b)?;
    let i = k - 1;
    t[i][1] = th[0][0];
    if i + 1 < n {
        t[i][2] = th[0][1];
        t[i + 1][0] = th[1][0];
        t[i + 1][1] = th[1][1];
    }
    Ok(())
}

/// `C(a_1, …, a_{n-1}, u) = C_o · C_e`, both factors truncated to order `n`.
pub fn build_truncation(prefix: &ParamPrefix, u: UnitPoint, n: usize) -> Result<BandedUnitary> {
    if n == 0 {
        return domain("truncation order must be at least 1");
    }
    if prefix.len() + 1 < n {
        return domain(format!("order {n} needs {} parameters, prefix has {}", n - 1, prefix.len()));
    }
    build_from_params(&prefix.values[..n - 1], u)
}

/// Truncation from explicit leading parameters (each in the open disk).
pub fn build_from_params(params: &[Complex64], u: UnitPoint) -> Result<BandedUnitary> {
    let n = params.len() + 1;
    let mut co = vec![[ZERO; 3]; n];
    let mut ce = vec![[ZERO; 3]; n];
    ce[0][1] = ONE;
    for k in 1..=n {
        let b = if k == n { u.value() } else { params[k - 1] };
        if k < n && b.norm() >= 1.0 {
            return Err(CmvError::Validation(format!("a_{k} = {b} is not in the open unit disk")));
        }
        if k % 2 == 1 {
            place_block(&mut co, k, b)?;
        } else {
            place_block(&mut ce, k, b)?;
        }
    }
    let mut rows = vec![[ZERO; 5]; n];
    for (i, row) in rows.iter_mut().enumerate() {
        for j in i.saturating_sub(2)..(i + 3).min(n) {
            let mut s = ZERO;
            let lo = i.saturating_sub(1).max(j.saturating_sub(1));
            let hi = (i + 1).min(j + 1).min(n - 1);
            for k in lo..=hi {
                s += tri_get(&co, i, k) * tri_get(&ce, k, j);
            }
            row[j + 2 - i] = s;
        }
    }
    Ok(BandedUnitary {
        order: n,
        rows,
        provenance: Provenance { params: params.to_vec(), u: u.value() },
    })
}

/// Symmetric tridiagonal `J(a)` section.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JacobiBand {
    pub order: usize,
    pub diagonal: Vec<f64>,
    pub offdiagonal: Vec<f64>,
}

impl JacobiBand {
    /// Gershgorin bound on the spectral radius.
    pub fn gershgorin_radius(&self) -> f64 {
        (0..self.order)
            .map(|i| {
                let left = if i > 0 { self.offdiagonal[i - 1] } else { 0.0 };
                let right = self.offdiagonal.get(i).copied().unwrap_or(0.0);
                self.diagonal[i].abs() + left + right
            })
            .fold(0.0, f64::max)
    }
}

/// Order-`n` section of `J(a)`: diagonal `1-|a_1|, |a_1|-|a_2|, …`, off-diagonal `ρ_1, ρ_2, …`.
pub fn build_jacobi(prefix: &ParamPrefix, n: usize) -> Result<JacobiBand> {
    if n == 0 {
        return domain("Jacobi order must be at least 1");
    }
    if prefix.len() < n {
        return domain(format!("order {n} needs {n} parameters, prefix has {}", prefix.len()));
    }
    let m: Vec<f64> = prefix.values[..n].iter().map(|a| a.norm()).collect();
    let diagonal = (0..n).map(|k| if k == 0 { 1.0 - m[0] } else { m[k - 1] - m[k] }).collect();
    let offdiagonal = prefix.rhos[..n - 1].to_vec();
    Ok(JacobiBand { order: n, diagonal, offdiagonal })
}

/// `y = C x`.
pub fn matvec(c: &BandedUnitary, x: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = c.order;
    if x.len() != n {
        return domain(format!("vector length {} does not match order {n}", x.len()));
    }
    Ok((0..n)
        .map(|i| {
            (i.saturating_sub(2)..(i + 3).min(n))
                .map(|j| c.get(i, j) * x[j])
                .sum()
        })
        .collect())
}

/// `y = C* x`.
pub fn matvec_adjoint(c: &BandedUnitary, x: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = c.order;
    if x.len() != n {
        return domain(format!("vector length {} does not match order {n}", x.len()));
    }
    Ok((0..n)
        .map(|j| {
            (j.saturating_sub(2)..(j + 3).min(n))
                .map(|i| c.get(i, j).conj() * x[i])
                .sum()
        })
        .collect())
}

/// LU factors of `zI - C` with partial pivoting.
///
/// Row `i` of `u` stores columns `i-2..=i+4`; pivoting fill widens the upper
/// band to four superdiagonals.
#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    u: Vec<[Complex64; 7]>,
    lower: Vec<[Complex64; 2]>,
    piv: Vec<usize>,
}

impl BandLu {
    fn at(&self, i: usize, j: usize) -> Complex64 {
        self.u[i][j + 2 - i]
    }

    pub fn factor(c: &BandedUnitary, z: Complex64) -> Result<BandLu> {
        let n = c.order;
        let mut a = vec![[ZERO; 7]; n];
        for (i, row) in a.iter_mut().enumerate() {
            for j in i.saturating_sub(2)..(i + 3).min(n) {
                let mut v = -c.get(i, j);
                if i == j {
                    v += z;
                }
                row[j + 2 - i] = v;
            }
        }
        let scale = z.norm() + 1.0;
        let mut lower = vec![[ZERO; 2]; n];
        let mut piv = vec![0usize; n];
        for j in 0..n {
            let last = (j + 2).min(n - 1);
            let mut p = j;
            let mut best = a[j][2].norm();
            for r in j + 1..=last {
                let v = a[r][j + 2 - r].norm();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best < 1e-14 * scale {
                return Err(CmvError::SingularShift { z });
            }
            piv[j] = p;
            let top = (j + 4).min(n - 1);
            if p != j {
                for col in j..=top {
                    let x = a[j][col + 2 - j];
                    a[j][col + 2 - j] = a[p][col + 2 - p];
                    a[p][col + 2 - p] = x;
                }
            }
            let d = a[j][2];
            for r in j + 1..=last {
                let m = a[r][j + 2 - r] / d;
                lower[j][r - j - 1] = m;
                a[r][j + 2 - r] = ZERO;
                if m != ZERO {
                    for col in j + 1..=top {
                        let s = a[j][col + 2 - j];
                        a[r][col + 2 - r] -= m * s;
                    }
                }
            }
        }
        Ok(BandLu { n, u: a, lower, piv })
    }

    pub fn solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.n;
        if b.len() != n {
            return domain(format!("right side length {} does not match order {n}", b.len()));
        }
        let mut x = b.to_vec();
        for j in 0..n {
            x.swap(j, self.piv[j]);
            for r in j + 1..=(j + 2).min(n - 1) {
                let m = self.lower[j][r - j - 1];
                let xj = x[j];
                x[r] -= m * xj;
            }
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..=(i + 4).min(n - 1) {
                s -= self.at(i, j) * x[j];
            }
            x[i] = s / self.at(i, i);
        }
        Ok(x)
    }
}

/// Solves `(zI - C) x = b`.
pub fn solve_shifted(c: &BandedUnitary, z: Complex64, b: &[Complex64]) -> Result<Vec<Complex64>> {
    BandLu::factor(c, z)?.solve(b)
}

/// Shifted solver that keeps one factorization per shift.
///
/// Concurrent callers may race to factor the same shift; both results are
/// identical, so the later insertion is harmless.
#[derive(Debug)]
pub struct ShiftedSolver<'a> {
    matrix: &'a BandedUnitary,
    cache: Mutex<HashMap<(u64, u64), Arc<BandLu>>>,
}

impl<'a> ShiftedSolver<'a> {
    pub fn new(matrix: &'a BandedUnitary) -> Self {
        ShiftedSolver { matrix, cache: Mutex::new(HashMap::new()) }
    }

    pub fn solve(&self, z: Complex64, b: &[Complex64]) -> Result<Vec<Complex64>> {
        let key = (z.re.to_bits(), z.im.to_bits());
        let cached = self.cache.lock().expect("cache lock").get(&key).cloned();
        let lu = match cached {
            Some(lu) => lu,
            None => {
                let lu = Arc::new(BandLu::factor(self.matrix, z)?);
                self.cache.lock().expect("cache lock").insert(key, lu.clone());
                lu
            }
        };
        lu.solve(b)
    }

    pub fn cached_shifts(&self) -> usize {
        self.cache.lock().expect("cache lock").len()
    }
}

/// Generator of `(ū a_{n+1}, ū a_{n+2}, …)`, the co-finite representative.
pub fn cofinite_params(spec: &SchurSpec, n: usize, u: UnitPoint) -> SchurSpec {
    let s = u.value().conj();
    match spec {
        _ if n == 0 && s == ONE => spec.clone(),
        SchurSpec::Constant(a) => SchurSpec::Constant(s * a),
        SchurSpec::TwoPeriodic { odd, even } => {
            let (o, e) = if n % 2 == 0 { (*odd, *even) } else { (*even, *odd) };
            SchurSpec::TwoPeriodic { odd: s * o, even: s * e }
        }
        SchurSpec::Tail { inner, offset, scale } => SchurSpec::Tail {
            inner: inner.clone(),
            offset: offset + n,
            scale: s * scale,
        },
        other => SchurSpec::Tail { inner: Box::new(other.clone()), offset: n, scale: s },
    }
}

#[cfg(test)]
pub(crate) fn scaled_for_tests(c: &BandedUnitary, s: f64) -> BandedUnitary {
    let mut out = c.clone();
    for row in &mut out.rows {
        for v in row.iter_mut() {
            *v *= s;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use crate::schur::{expand, k_metric};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_prefix(rng: &mut SplitMix64, n: usize) -> ParamPrefix {
        let v = (0..n)
            .map(|_| Complex64::from_polar(0.98 * rng.next_f64().sqrt(), rng.uniform(-3.2, 3.2)))
            .collect();
        ParamPrefix::from_values(v).unwrap()
    }

    #[test]
    fn theta_examples() {
        let t = theta_block(c(0.0, 0.0)).unwrap();
        assert_eq!(t, [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]]);
        let t = theta_block(c(0.5, 0.0)).unwrap();
        assert!((t[0][1].re - 0.8660254037844386).abs() < 1e-15);
        assert_eq!(t[0][0], c(-0.5, 0.0));
        assert_eq!(t[1][1], c(0.5, 0.0));
        let u = Complex64::from_polar(1.0, 0.9);
        let t = theta_block(u).unwrap();
        assert_eq!(t[0][1], c(0.0, 0.0));
        assert_eq!(t[1][1], u.conj());
        assert!(theta_block(c(1.5, 0.0)).is_err());
    }

    #[test]
    fn truncation_examples() {
        let u = UnitPoint::from_angle(0.7);
        let p = expand(&SchurSpec::Constant(c(0.5, 0.0)), 3).unwrap();
        let c1 = build_truncation(&p, u, 1).unwrap();
        assert_eq!(c1.get(0, 0), -u.value());

        let zero = expand(&SchurSpec::Constant(c(0.0, 0.0)), 1).unwrap();
        let c2 = build_truncation(&zero, UnitPoint::one(), 2).unwrap();
        assert_eq!(c2.to_dense(), vec![c(0.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);

        assert!(build_truncation(&p, u, 5).is_err());
    }

    #[test]
    fn unitarity_and_band() {
        let mut rng = SplitMix64::new(99);
        for n in [1, 2, 3, 8, 33, 200] {
            let p = random_prefix(&mut rng, n.max(1));
            let m = build_truncation(&p, UnitPoint::from_angle(rng.uniform(0.0, 6.0)), n).unwrap();
            assert!(m.unitarity_defect() <= 1e-12, "n = {n}");
            let d = m.to_dense();
            for i in 0..n {
                for j in 0..n {
                    if (i as isize - j as isize).abs() > 2 {
                        assert_eq!(d[i * n + j], c(0.0, 0.0));
                    }
                }
            }
        }
    }

    #[test]
    fn matvec_examples() {
        let zero = expand(&SchurSpec::Constant(c(0.0, 0.0)), 1).unwrap();
        let m = build_truncation(&zero, UnitPoint::one(), 2).unwrap();
        assert_eq!(matvec(&m, &[c(1.0, 0.0), c(0.0, 0.0)]).unwrap(), vec![c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matvec(&m, &[c(1.0, 0.0)]).is_err());
        let mut rng = SplitMix64::new(5);
        let p = random_prefix(&mut rng, 40);
        let m = build_truncation(&p, UnitPoint::from_angle(1.0), 41).unwrap();
        let x: Vec<Complex64> = (0..41).map(|_| c(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0))).collect();
        let y = matvec(&m, &x).unwrap();
        let nx: f64 = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        let ny: f64 = y.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        assert!((nx - ny).abs() < 1e-12);
        let back = matvec_adjoint(&m, &y).unwrap();
        for (a, b) in back.iter().zip(&x) {
            assert!((a - b).norm() < 1e-13);
        }
        assert!(matvec(&m, &vec![c(0.0, 0.0); 41]).unwrap().iter().all(|v| *v == c(0.0, 0.0)));
    }

    #[test]
    fn shifted_solve() {
        let u = UnitPoint::from_angle(0.3);
        let one = expand(&SchurSpec::Constant(c(0.0, 0.0)), 1).unwrap();
        let m1 = build_truncation(&one, u, 1).unwrap();
        let z = c(0.2, 0.1);
        let x = solve_shifted(&m1, z, &[c(2.0, 0.0)]).unwrap();
        assert!((x[0] - 2.0 / (z + u.value())).norm() < 1e-15);

        let m2 = build_truncation(&one, UnitPoint::one(), 2).unwrap();
        assert!(matches!(
            solve_shifted(&m2, c(0.0, 1.0), &[c(1.0, 0.0), c(0.0, 0.0)]),
            Err(CmvError::SingularShift { .. })
        ));

        let mut rng = SplitMix64::new(17);
        for n in [2, 5, 32, 101] {
            let p = random_prefix(&mut rng, n);
            let m = build_truncation(&p, UnitPoint::from_angle(2.0), n).unwrap();
            let z = Complex64::from_polar(rng.uniform(0.2, 1.6), rng.uniform(0.0, 6.2));
            let b: Vec<Complex64> = (0..n).map(|_| c(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0))).collect();
            let x = solve_shifted(&m, z, &b).unwrap();
            let cx = matvec(&m, &x).unwrap();
            let res: f64 = (0..n).map(|i| (z * x[i] - cx[i] - b[i]).norm_sqr()).sum::<f64>().sqrt();
            let nb: f64 = b.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            assert!(res <= 1e-10 * nb, "n = {n}: residual {res}");
        }
    }

    #[test]
    fn solver_cache() {
        let mut rng = SplitMix64::new(1);
        let p = random_prefix(&mut rng, 10);
        let m = build_truncation(&p, UnitPoint::one(), 11).unwrap();
        let s = ShiftedSolver::new(&m);
        let b = vec![c(1.0, 0.0); 11];
        let z = c(0.3, 0.2);
        let x1 = s.solve(z, &b).unwrap();
        let x2 = s.solve(z, &b).unwrap();
        assert_eq!(x1, x2);
        assert_eq!(s.cached_shifts(), 1);
        assert_eq!(x1, solve_shifted(&m, z, &b).unwrap());
    }

    #[test]
    fn jacobi_examples() {
        let p = expand(&SchurSpec::Constant(c(0.5, 0.0)), 3).unwrap();
        assert_eq!(build_jacobi(&p, 1).unwrap().diagonal, vec![0.5]);
        let j = build_jacobi(&p, 2).unwrap();
        assert_eq!(j.diagonal, vec![0.5, 0.0]);
        assert!((j.offdiagonal[0] - 0.8660254037844386).abs() < 1e-15);
        let z = build_jacobi(&expand(&SchurSpec::Constant(c(0.0, 0.0)), 4).unwrap(), 4).unwrap();
        assert_eq!(z.diagonal, vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(z.offdiagonal, vec![1.0, 1.0, 1.0]);
        assert!(z.gershgorin_radius() <= 2.0);
    }

    #[test]
    fn cofinite_examples() {
        let s = SchurSpec::Constant(c(0.5, 0.0));
        assert_eq!(cofinite_params(&s, 0, UnitPoint::one()), s);
        assert_eq!(
            cofinite_params(&s, 2, UnitPoint::new(c(0.0, 1.0)).unwrap()),
            SchurSpec::Constant(c(0.0, -0.5))
        );
        let tp = SchurSpec::TwoPeriodic { odd: c(0.25, 0.0), even: c(0.75, 0.0) };
        assert_eq!(
            cofinite_params(&tp, 1, UnitPoint::one()),
            SchurSpec::TwoPeriodic { odd: c(0.75, 0.0), even: c(0.25, 0.0) }
        );
        let ex = SchurSpec::Explicit(vec![c(0.1, 0.0), c(0.2, 0.0), c(0.3, 0.0), c(0.4, 0.0)]);
        let tail = cofinite_params(&ex, 2, UnitPoint::new(c(-1.0, 0.0)).unwrap());
        assert_eq!(expand(&tail, 2).unwrap().values, vec![c(-0.3, 0.0), c(-0.4, 0.0)]);
    }

    #[test]
    fn k_metric_is_theta_distance() {
        let mut rng = SplitMix64::new(8);
        for _ in 0..200 {
            let x1 = Complex64::from_polar(rng.next_f64(), rng.uniform(-3.2, 3.2));
            let x2 = Complex64::from_polar(rng.next_f64(), rng.uniform(-3.2, 3.2));
            let a = theta_block(x1).unwrap();
            let b = theta_block(x2).unwrap();
            let d = [[a[0][0] - b[0][0], a[0][1] - b[0][1]], [a[1][0] - b[1][0], a[1][1] - b[1][1]]];
            assert!((spectral_norm_2x2(d) - k_metric(x1, x2).unwrap()).abs() < 1e-12);
        }
    }

    fn spectral_norm_2x2(m: [[Complex64; 2]; 2]) -> f64 {
        // Largest eigenvalue of the Hermitian M*M.
        let h11 = m[0][0].norm_sqr() + m[1][0].norm_sqr();
        let h22 = m[0][1].norm_sqr() + m[1][1].norm_sqr();
        let h12 = m[0][0].conj() * m[0][1] + m[1][0].conj() * m[1][1];
        let half = (h11 - h22) / 2.0;
        ((h11 + h22) / 2.0 + (half * half + h12.norm_sqr()).sqrt()).sqrt()
    }

    #[test]
    fn csv_dump() {
        let zero = expand(&SchurSpec::Constant(c(0.0, 0.0)), 1).unwrap();
        let m = build_truncation(&zero, UnitPoint::one(), 2).unwrap();
        let csv = m.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "i,j,re,im");
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("1,2,"));
        assert!(lines[2].starts_with("2,1,"));
    }
}

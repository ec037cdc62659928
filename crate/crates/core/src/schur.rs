//! Schur-parameter sequences: generators, realized prefixes, rotation and the
//! elementary metric `k`.
//!
//! Indices are 1-based in the mathematics (`a_1, a_2, ...`) and 0-based in
//! storage: `prefix.values[k]` holds `a_{k+1}`.

use std::fmt;
use std::path::PathBuf;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::error::{domain, CmvError, Result};
use crate::geometry::UnitPoint;
use crate::parse::{parse_complex, parse_real, parse_u64};
use crate::rng::SplitMix64;

/// Tolerance for treating a parameter of modulus slightly above 1 as unimodular.
const UNIT_SLACK: f64 = 1e-12;
/// Upper bound on rejection-sampling attempts per draw.
const MAX_REJECTIONS: usize = 10_000_000;

/// Index rule `n -> a_n` (1-based).
pub type RuleFn = Arc<dyn Fn(usize) -> Complex64 + Send + Sync>;

/// Generator of a Schur-parameter sequence.
#[derive(Clone)]
pub enum SchurSpec {
    Constant(Complex64),
    /// `a_{2k-1} = odd`, `a_{2k} = even`.
    TwoPeriodic { odd: Complex64, even: Complex64 },
    /// `a_n = conj(lambda)^n b_n` where `b` is generated by `inner`.
    Rotated { lambda: Complex64, inner: Box<SchurSpec> },
    Explicit(Vec<Complex64>),
    /// Uniform in `{z ∈ 𝔻 : Re(conj(u) z) >= cos_alpha0}`.
    RandomHalfPlane { u: Complex64, cos_alpha0: f64, seed: u64 },
    /// `center · e^{iθ}` with `θ` uniform in `[-half_width, half_width]`.
    RandomArc { center: Complex64, half_width: f64, seed: u64 },
    /// Each `a_n` drawn uniformly from a finite value set.
    RandomSet { values: Vec<Complex64>, seed: u64 },
    /// Odd indices from `odd`, even indices from `even` (same index in each).
    Parity { odd: Box<SchurSpec>, even: Box<SchurSpec> },
    /// `prime` at prime indices, `composite` elsewhere (including `n = 1`).
    Prime { prime: Complex64, composite: Complex64 },
    /// `a_n = scale · b_{n + offset}` where `b` is generated by `inner`.
    Tail { inner: Box<SchurSpec>, offset: usize, scale: Complex64 },
    /// Arbitrary index rule; `name` is used for display only.
    Rule { name: String, rule: RuleFn },
}

impl fmt::Debug for SchurSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SchurSpec({self})")
    }
}

impl PartialEq for SchurSpec {
    fn eq(&self, other: &Self) -> bool {
        use SchurSpec::*;
        match (self, other) {
            (Constant(a), Constant(b)) => a == b,
            (TwoPeriodic { odd: a, even: b }, TwoPeriodic { odd: c, even: d }) => a == c && b == d,
            (Rotated { lambda: l1, inner: i1 }, Rotated { lambda: l2, inner: i2 }) => {
                l1 == l2 && i1 == i2
            }
            (Explicit(a), Explicit(b)) => a == b,
            (
                RandomHalfPlane { u: u1, cos_alpha0: c1, seed: s1 },
                RandomHalfPlane { u: u2, cos_alpha0: c2, seed: s2 },
            ) => u1 == u2 && c1 == c2 && s1 == s2,
            (
                RandomArc { center: a, half_width: h1, seed: s1 },
                RandomArc { center: b, half_width: h2, seed: s2 },
            ) => a == b && h1 == h2 && s1 == s2,
            (RandomSet { values: v1, seed: s1 }, RandomSet { values: v2, seed: s2 }) => {
                v1 == v2 && s1 == s2
            }
            (Parity { odd: a, even: b }, Parity { odd: c, even: d }) => a == c && b == d,
            (Prime { prime: a, composite: b }, Prime { prime: c, composite: d }) => {
                a == c && b == d
            }
            (
                Tail { inner: i1, offset: o1, scale: s1 },
                Tail { inner: i2, offset: o2, scale: s2 },
            ) => i1 == i2 && o1 == o2 && s1 == s2,
            (Rule { name: n1, rule: r1 }, Rule { name: n2, rule: r2 }) => {
                n1 == n2 && Arc::ptr_eq(r1, r2)
            }
            _ => false,
        }
    }
}

/// Formats a complex number in the literal grammar, round-trip exact.
pub fn fmt_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{:?}", z.re)
    } else if z.im < 0.0 || (z.im == 0.0 && z.im.is_sign_negative()) {
        format!("{:?}{:?}i", z.re, z.im)
    } else {
        format!("{:?}+{:?}i", z.re, z.im)
    }
}

fn join(values: &[Complex64], sep: &str) -> String {
    values.iter().map(|v| fmt_complex(*v)).collect::<Vec<_>>().join(sep)
}

impl fmt::Display for SchurSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use SchurSpec::*;
        match self {
            Constant(a) => write!(f, "constant:{}", fmt_complex(*a)),
            TwoPeriodic { odd, even } => {
                write!(f, "two-periodic:{},{}", fmt_complex(*odd), fmt_complex(*even))
            }
            Rotated { lambda, inner } => write!(f, "rotated:{}:{}", fmt_complex(*lambda), inner),
            Explicit(v) => write!(f, "list:{}", join(v, ",")),
            RandomHalfPlane { u, cos_alpha0, seed } => {
                write!(f, "random-halfplane:{}:{:?}:{}", fmt_complex(*u), cos_alpha0, seed)
            }
            RandomArc { center, half_width, seed } => {
                write!(f, "random-arc:{}:{:?}:{}", fmt_complex(*center), half_width, seed)
            }
            RandomSet { values, seed } => write!(f, "random-set:{}:{}", join(values, "|"), seed),
            Parity { odd, even } => write!(f, "parity:{odd};{even}"),
            Prime { prime, composite } => {
                write!(f, "prime:{},{}", fmt_complex(*prime), fmt_complex(*composite))
            }
            Tail { inner, offset, scale } => {
                write!(f, "tail:{}:{}:{}", offset, fmt_complex(*scale), inner)
            }
            Rule { name, .. } => write!(f, "rule:{name}"),
        }
    }
}

impl Serialize for SchurSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

fn perr<T>(msg: impl Into<String>) -> Result<T> {
    Err(CmvError::Parse(msg.into()))
}

fn two_fields(body: &str, sep: char) -> Result<(&str, &str)> {
    body.split_once(sep)
        .ok_or_else(|| CmvError::Parse(format!("expected two fields separated by {sep:?} in {body:?}")))
}

impl SchurSpec {
    /// Parses the text grammar.
    ///
    /// `constant:A`, `two-periodic:A,B`, `rotated:LAMBDA:SPEC`, `file:PATH`,
    /// `list:A,B,...`, `random-halfplane:U:COS_A0:SEED`, `random-arc:A:XI:SEED`,
    /// `random-set:A|B|...:SEED`, `parity:ODD_SPEC;EVEN_SPEC`, `prime:A,B`,
    /// `tail:OFFSET:SCALE:SPEC`.
    pub fn parse(text: &str) -> Result<SchurSpec> {
        let text = text.trim();
        let (kind, body) = text
            .split_once(':')
            .ok_or_else(|| CmvError::Parse(format!("missing ':' in schur spec {text:?}")))?;
        let spec = match kind {
            "constant" => SchurSpec::Constant(parse_complex(body)?),
            "two-periodic" => {
                let (a, b) = two_fields(body, ',')?;
                SchurSpec::TwoPeriodic {
                    odd: parse_complex(a)?,
                    even: parse_complex(b)?,
                }
            }
            "rotated" => {
                let (l, inner) = two_fields(body, ':')?;
                SchurSpec::Rotated {
                    lambda: parse_complex(l)?,
                    inner: Box::new(SchurSpec::parse(inner)?),
                }
            }
            "file" => SchurSpec::Explicit(read_param_file(&PathBuf::from(body))?),
            "list" => SchurSpec::Explicit(
                body.split(',').map(parse_complex).collect::<Result<Vec<_>>>()?,
            ),
            "random-halfplane" => {
                let f: Vec<&str> = body.split(':').collect();
                if f.len() != 3 {
                    return perr(format!("random-halfplane needs U:COS_A0:SEED, got {body:?}"));
                }
                SchurSpec::RandomHalfPlane {
                    u: parse_complex(f[0])?,
                    cos_alpha0: parse_real(f[1])?,
                    seed: parse_u64(f[2])?,
                }
            }
            "random-arc" => {
                let f: Vec<&str> = body.split(':').collect();
                if f.len() != 3 {
                    return perr(format!("random-arc needs A:XI:SEED, got {body:?}"));
                }
                SchurSpec::RandomArc {
                    center: parse_complex(f[0])?,
                    half_width: parse_real(f[1])?,
                    seed: parse_u64(f[2])?,
                }
            }
            "random-set" => {
                let (vals, seed) = body
                    .rsplit_once(':')
                    .ok_or_else(|| CmvError::Parse(format!("random-set needs VALUES:SEED, got {body:?}")))?;
                SchurSpec::RandomSet {
                    values: vals.split('|').map(parse_complex).collect::<Result<Vec<_>>>()?,
                    seed: parse_u64(seed)?,
                }
            }
            "parity" => {
                let (o, e) = two_fields(body, ';')?;
                SchurSpec::Parity {
                    odd: Box::new(SchurSpec::parse(o)?),
                    even: Box::new(SchurSpec::parse(e)?),
                }
            }
            "prime" => {
                let (p, c) = two_fields(body, ',')?;
                SchurSpec::Prime {
                    prime: parse_complex(p)?,
                    composite: parse_complex(c)?,
                }
            }
            "tail" => {
                let (off, rest) = two_fields(body, ':')?;
                let (scale, inner) = two_fields(rest, ':')?;
                SchurSpec::Tail {
                    inner: Box::new(SchurSpec::parse(inner)?),
                    offset: crate::parse::parse_usize(off)?,
                    scale: parse_complex(scale)?,
                }
            }
            other => return perr(format!("unknown schur family {other:?}")),
        };
        spec.check()?;
        Ok(spec)
    }

    /// Static validation of family parameters (independent of the length).
    pub fn check(&self) -> Result<()> {
        use SchurSpec::*;
        let inside = |a: &Complex64, what: &str| -> Result<()> {
            if !a.is_finite() || a.norm() >= 1.0 {
                Err(CmvError::Validation(format!("{what} {a} is not in the open unit disk")))
            } else {
                Ok(())
            }
        };
        match self {
            Constant(a) => inside(a, "constant value"),
            TwoPeriodic { odd, even } => {
                inside(odd, "odd value")?;
                inside(even, "even value")
            }
            Rotated { lambda, inner } => {
                UnitPoint::new(*lambda)
                    .map_err(|_| CmvError::Validation(format!("rotation {lambda} is not unimodular")))?;
                inner.check()
            }
            Explicit(_) | Rule { .. } => Ok(()),
            RandomHalfPlane { u, cos_alpha0, .. } => {
                UnitPoint::new(*u)
                    .map_err(|_| CmvError::Validation(format!("half-plane direction {u} is not unimodular")))?;
                if !(cos_alpha0.is_finite() && *cos_alpha0 < 1.0) {
                    return Err(CmvError::Validation(format!(
                        "half-plane offset {cos_alpha0} leaves no room inside the disk"
                    )));
                }
                Ok(())
            }
            RandomArc { center, half_width, .. } => {
                inside(center, "arc centre")?;
                if !(0.0..=std::f64::consts::PI).contains(half_width) {
                    return Err(CmvError::Validation(format!("arc half-width {half_width} outside [0, π]")));
                }
                Ok(())
            }
            RandomSet { values, .. } => {
                if values.is_empty() {
                    return Err(CmvError::Validation("random-set needs at least one value".into()));
                }
                values.iter().try_for_each(|v| inside(v, "set value"))
            }
            Parity { odd, even } => {
                odd.check()?;
                even.check()
            }
            Prime { prime, composite } => {
                inside(prime, "prime-index value")?;
                inside(composite, "composite-index value")
            }
            Tail { inner, scale, .. } => {
                UnitPoint::new(*scale)
                    .map_err(|_| CmvError::Validation(format!("tail scale {scale} is not unimodular")))?;
                inner.check()
            }
        }
    }

    /// Raw generation of `a_1..a_N` without the final disk validation.
    fn generate(&self, n: usize) -> Result<Vec<Complex64>> {
        use SchurSpec::*;
        Ok(match self {
            Constant(a) => vec![*a; n],
            TwoPeriodic { odd, even } => (1..=n).map(|k| if k % 2 == 1 { *odd } else { *even }).collect(),
            Rotated { lambda, inner } => {
                let theta = lambda.arg();
                inner
                    .generate(n)?
                    .into_iter()
                    .enumerate()
                    .map(|(k, b)| Complex64::from_polar(1.0, -((k + 1) as f64) * theta) * b)
                    .collect()
            }
            Explicit(v) => {
                if v.len() < n {
                    return Err(CmvError::Validation(format!(
                        "explicit sequence has {} terms, {} requested",
                        v.len(),
                        n
                    )));
                }
                v[..n].to_vec()
            }
            RandomHalfPlane { u, cos_alpha0, seed } => {
                let mut rng = SplitMix64::new(*seed);
                let mut out = Vec::with_capacity(n);
                for _ in 0..n {
                    out.push(draw_halfplane(&mut rng, *u, *cos_alpha0)?);
                }
                out
            }
            RandomArc { center, half_width, seed } => {
                let mut rng = SplitMix64::new(*seed);
                (0..n)
                    .map(|_| *center * Complex64::from_polar(1.0, rng.uniform(-half_width, *half_width)))
                    .collect()
            }
            RandomSet { values, seed } => {
                let mut rng = SplitMix64::new(*seed);
                (0..n).map(|_| values[rng.index(values.len())]).collect()
            }
            Parity { odd, even } => {
                let o = odd.generate(n)?;
                let e = even.generate(n)?;
                (0..n).map(|k| if k % 2 == 0 { o[k] } else { e[k] }).collect()
            }
            Prime { prime, composite } => {
                (1..=n).map(|k| if is_prime(k) { *prime } else { *composite }).collect()
            }
            Tail { inner, offset, scale } => inner
                .generate(n + offset)?
                .into_iter()
                .skip(*offset)
                .map(|b| *scale * b)
                .collect(),
            Rule { rule, .. } => (1..=n).map(|k| rule(k)).collect(),
        })
    }
}

fn draw_halfplane(rng: &mut SplitMix64, u: Complex64, cos_alpha0: f64) -> Result<Complex64> {
    for _ in 0..MAX_REJECTIONS {
        let z = Complex64::new(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
        if z.norm_sqr() < 1.0 && (u.conj() * z).re >= cos_alpha0 {
            return Ok(z);
        }
    }
    Err(CmvError::Validation(format!(
        "half-plane region Re(conj({u}) z) >= {cos_alpha0} too small to sample"
    )))
}

/// Trial-division primality test (indices are small).
pub fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Reads a parameter file: one `Re,Im` pair per line; blank lines and `#` comments skipped.
pub fn read_param_file(path: &PathBuf) -> Result<Vec<Complex64>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CmvError::Parse(format!("cannot read {}: {e}", path.display())))?;
    parse_param_csv(&text)
}

/// Parses `Re,Im` lines (a single column is read as a real value).
pub fn parse_param_csv(text: &str) -> Result<Vec<Complex64>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let value = match fields.as_slice() {
            [re] => Complex64::new(parse_real(re)?, 0.0),
            [re, im] => Complex64::new(parse_real(re)?, parse_real(im)?),
            _ => return perr(format!("line {}: expected Re,Im", lineno + 1)),
        };
        out.push(value);
    }
    Ok(out)
}

/// Realized prefix `a_1..a_N` with the matching `ρ_n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamPrefix {
    pub spec: SchurSpec,
    pub values: Vec<Complex64>,
    pub rhos: Vec<f64>,
}

impl ParamPrefix {
    /// Prefix of an explicit list.
    pub fn from_values(values: Vec<Complex64>) -> Result<Self> {
        let n = values.len();
        if n == 0 {
            return Ok(ParamPrefix { spec: SchurSpec::Explicit(values), values: Vec::new(), rhos: Vec::new() });
        }
        expand(&SchurSpec::Explicit(values), n)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `a_n`, 1-based.
    pub fn a(&self, n: usize) -> Complex64 {
        self.values[n - 1]
    }

    /// `ρ_n`, 1-based.
    pub fn rho(&self, n: usize) -> f64 {
        self.rhos[n - 1]
    }

    /// The first `n` terms.
    pub fn truncated(&self, n: usize) -> Result<ParamPrefix> {
        if n > self.len() {
            return domain(format!("prefix has {} terms, {} requested", self.len(), n));
        }
        Ok(ParamPrefix {
            spec: self.spec.clone(),
            values: self.values[..n].to_vec(),
            rhos: self.rhos[..n].to_vec(),
        })
    }
}

/// Realizes `a_1..a_N`, checking `|a_n| < 1`.
pub fn expand(spec: &SchurSpec, n: usize) -> Result<ParamPrefix> {
    if n == 0 {
        return domain("prefix length must be at least 1");
    }
    spec.check()?;
    let values = spec.generate(n)?;
    let mut rhos = Vec::with_capacity(n);
    for (k, a) in values.iter().enumerate() {
        if !a.is_finite() || a.norm() >= 1.0 {
            return Err(CmvError::Validation(format!(
                "a_{} = {} does not lie in the open unit disk",
                k + 1,
                a
            )));
        }
        rhos.push((1.0 - a.norm_sqr()).sqrt());
    }
    Ok(ParamPrefix {
        spec: spec.clone(),
        values,
        rhos,
    })
}

/// `a_n ↦ conj(λ)^n a_n`; the `ρ_n` are carried over unchanged.
pub fn rotate(prefix: &ParamPrefix, lambda: UnitPoint) -> ParamPrefix {
    let theta = lambda.value().arg();
    let values = prefix
        .values
        .iter()
        .enumerate()
        .map(|(k, a)| Complex64::from_polar(1.0, -((k + 1) as f64) * theta) * a)
        .collect();
    ParamPrefix {
        spec: SchurSpec::Rotated {
            lambda: lambda.value(),
            inner: Box::new(prefix.spec.clone()),
        },
        values,
        rhos: prefix.rhos.clone(),
    }
}

/// `ρ = √(1 - |a|²)` on the closed disk.
pub fn rho(a: Complex64) -> Result<f64> {
    let m2 = a.norm_sqr();
    if !m2.is_finite() || m2.sqrt() > 1.0 + UNIT_SLACK {
        return domain(format!("|a| = {} exceeds 1", a.norm()));
    }
    Ok((1.0 - m2).max(0.0).sqrt())
}

/// `k(x₁, x₂) = √(|x₁ - x₂|² + (y₁ - y₂)²)` with `y = ρ(x)`.
pub fn k_metric(x1: Complex64, x2: Complex64) -> Result<f64> {
    let y1 = rho(x1)?;
    let y2 = rho(x2)?;
    Ok(((x1 - x2).norm_sqr() + (y1 - y2) * (y1 - y2)).sqrt())
}

//! Literal parsing shared by the text grammars.
//!
//! Reals accept plain floats and multiples of `pi` (`pi`, `-pi/3`, `2pi/3`,
//! `0.25*pi`). Complex literals accept `RE`, `IMi`, `RE+IMi`, `RE-IMi`, `i`,
//! and the polar form `R@THETA` (modulus `R`, angle `THETA` in radians).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{CmvError, Result};

fn perr<T>(msg: impl Into<String>) -> Result<T> {
    Err(CmvError::Parse(msg.into()))
}

/// Parses a real literal, optionally a rational multiple of `pi`.
pub fn parse_real(s: &str) -> Result<f64> {
    let t = s.trim();
    if t.is_empty() {
        return perr("empty number");
    }
    if let Some(p) = t.find("pi") {
        let (neg, head) = match t[..p].trim().strip_prefix('-') {
            Some(h) => (true, h.trim()),
            None => (false, t[..p].trim()),
        };
        let head = head.strip_suffix('*').unwrap_or(head).trim();
        let coef = if head.is_empty() {
            1.0
        } else {
            parse_plain(head)?
        };
        let tail = t[p + 2..].trim();
        let div = if tail.is_empty() {
            1.0
        } else if let Some(d) = tail.strip_prefix('/') {
            parse_plain(d.trim())?
        } else {
            return perr(format!("malformed multiple of pi: {s:?}"));
        };
        if div == 0.0 {
            return perr(format!("division by zero in {s:?}"));
        }
        let v = coef * PI / div;
        return Ok(if neg { -v } else { v });
    }
    parse_plain(t)
}

fn parse_plain(t: &str) -> Result<f64> {
    match t.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => perr(format!("not a finite number: {t:?}")),
    }
}

/// Parses a complex literal.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return perr("empty complex literal");
    }
    if let Some((r, th)) = t.split_once('@') {
        let r = parse_real(r)?;
        let th = parse_real(th)?;
        return Ok(Complex64::from_polar(r, th));
    }
    let Some(body) = t.strip_suffix('i') else {
        return Ok(Complex64::new(parse_real(&t)?, 0.0));
    };
    // Split at the last sign that is not leading and not an exponent sign.
    let bytes = body.as_bytes();
    let mut split = None;
    for k in (1..bytes.len()).rev() {
        let c = bytes[k];
        if (c == b'+' || c == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
            split = Some(k);
            break;
        }
    }
    let (re, im) = match split {
        Some(k) => (parse_real(&body[..k])?, imag_coef(&body[k..])?),
        None => (0.0, imag_coef(body)?),
    };
    Ok(Complex64::new(re, im))
}

fn imag_coef(s: &str) -> Result<f64> {
    match s {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => {
            let s = s.strip_suffix('*').unwrap_or(s);
            parse_real(s)
        }
    }
}

/// Parses an unsigned integer.
pub fn parse_usize(s: &str) -> Result<usize> {
    s.trim()
        .parse::<usize>()
        .map_err(|_| CmvError::Parse(format!("not a non-negative integer: {s:?}")))
}

/// Parses a 64-bit seed.
pub fn parse_u64(s: &str) -> Result<u64> {
    s.trim()
        .parse::<u64>()
        .map_err(|_| CmvError::Parse(format!("not a 64-bit seed: {s:?}")))
}

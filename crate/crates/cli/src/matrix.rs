//! Textual group elements and points.
//!
//! A matrix is a `*`-separated product of factors:
//! `identity`, `weyl`, `translation(v1,..,vn)`, `lower-translation(..)`,
//! `dilation(t)`, `rot(j,t)` for `cos(t/2) + sin(t/2) e_j` and
//! `rot(j,k,t)` for `cos(t/2) + sin(t/2) e_j e_k`.

use vahlen::clifford::{MultiVec, ParaVec};
use vahlen::spinor::{one_param, OneParam};
use vahlen::vahlen::{CliffordMat, ExtPoint, VALIDATION_TOL};

fn numbers(args: &str) -> Result<Vec<f64>, String> {
    if args.trim().is_empty() {
        return Ok(Vec::new());
    }
    args.split(',')
        .map(|a| {
            a.trim()
                .parse::<f64>()
                .map_err(|_| format!("not a number: {a:?}"))
        })
        .collect()
}

fn index(v: f64) -> Result<usize, String> {
    if v.fract() == 0.0 && v >= 0.0 {
        Ok(v as usize)
    } else {
        Err(format!("expected an index, got {v}"))
    }
}

fn factor(n: usize, text: &str) -> Result<CliffordMat, String> {
    let text = text.trim();
    let (name, args) = match text.split_once('(') {
        Some((name, rest)) => {
            let args = rest
                .strip_suffix(')')
                .ok_or_else(|| format!("missing ')' in {text:?}"))?;
            (name.trim(), numbers(args)?)
        }
        None => (text, Vec::new()),
    };
    let vector = |args: &[f64]| ParaVec::new(args).map_err(|e| e.to_string());
    let check_len = |want: usize| {
        if args.len() == want {
            Ok(())
        } else {
            Err(format!("{name} takes {want} arguments, got {}", args.len()))
        }
    };
    let m = match name {
        "identity" | "id" => {
            check_len(0)?;
            CliffordMat::identity(n)
        }
        "weyl" | "w" => {
            check_len(0)?;
            CliffordMat::weyl(n)
        }
        "translation" => {
            check_len(n)?;
            CliffordMat::translation(&vector(&args)?)
        }
        "lower-translation" => {
            check_len(n)?;
            CliffordMat::lower_translation(&vector(&args)?)
        }
        "dilation" => {
            check_len(1)?;
            CliffordMat::dilation(n, args[0]).map_err(|e| e.to_string())?
        }
        "rot" => {
            let kind = match args.len() {
                2 => OneParam::Scalar(index(args[0])?),
                3 => OneParam::Bivector(index(args[0])?, index(args[1])?),
                k => return Err(format!("rot takes 2 or 3 arguments, got {k}")),
            };
            let t = *args.last().expect("nonempty");
            let m = one_param(n, kind, t).map_err(|e| e.to_string())?;
            CliffordMat::rotation(&m).map_err(|e| e.to_string())?
        }
        other => return Err(format!("unknown factor {other:?}")),
    };
    if m.dim() != n {
        return Err(format!(
            "factor {text:?} has dimension {}, expected {n}",
            m.dim()
        ));
    }
    Ok(m)
}

/// Parses a product of named factors.
pub fn parse_matrix(n: usize, text: &str) -> Result<CliffordMat, String> {
    let mut g = CliffordMat::identity(n);
    for part in split_product(text) {
        g = g.mul(&factor(n, &part)?).map_err(|e| e.to_string())?;
    }
    Ok(g)
}

/// Splits on `*` outside parentheses.
fn split_product(text: &str) -> Vec<String> {
    let mut parts = vec![String::new()];
    let mut depth = 0i32;
    for ch in text.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '*' if depth == 0 => {
                parts.push(String::new());
                continue;
            }
            _ => {}
        }
        parts.last_mut().expect("nonempty").push(ch);
    }
    parts
}

/// Matrix from explicit blade coefficients `[a, b, c, d]`, validated as a
/// Clifford matrix.
pub fn parse_entries(n: usize, json: &str) -> Result<CliffordMat, String> {
    let raw: Vec<Vec<f64>> = serde_json::from_str(json).map_err(|e| format!("entries: {e}"))?;
    if raw.len() != 4 {
        return Err(format!(
            "entries: expected 4 multivectors, got {}",
            raw.len()
        ));
    }
    let mut it = raw
        .into_iter()
        .map(|c| MultiVec::from_coeffs(n, c).map_err(|e| format!("entries: {e}")));
    let mut next = || it.next().expect("four entries");
    let (a, b, c, d) = (next()?, next()?, next()?, next()?);
    let g = CliffordMat::new(a, b, c, d).map_err(|e| e.to_string())?;
    let v = g.validate(VALIDATION_TOL);
    if !v.valid {
        return Err(format!(
            "not a Clifford matrix (residual {:.3e})",
            v.max_residual()
        ));
    }
    Ok(g)
}

/// `inf` or comma-separated coordinates.
pub fn parse_point(n: usize, text: &str) -> Result<ExtPoint, String> {
    let t = text.trim();
    if matches!(t, "inf" | "infinity" | "∞") {
        return Ok(ExtPoint::Infinity);
    }
    let coords = numbers(t.trim_start_matches('(').trim_end_matches(')'))?;
    if coords.len() != n {
        return Err(format!(
            "point has {} coordinates, expected {n}",
            coords.len()
        ));
    }
    Ok(ExtPoint::Finite(
        ParaVec::new(&coords).map_err(|e| e.to_string())?,
    ))
}

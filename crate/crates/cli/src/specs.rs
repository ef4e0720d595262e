//! Parsing of the human-writable field and diffeomorphism specs.
//!
//! Field grammar: a sum of terms `[coef*]atom` joined by `+`/`-`, where `atom`
//! is `1`, `cos`, `sin`, `cosK` or `sinK`; a bare number or `const:x` is a
//! constant. A spec ending in `.json` (or starting with `@`) is read as a
//! coefficient-list file `{"cutoff": K, "coeffs": [[n, re, im], ...]}`.
//!
//! Diffeomorphism grammar: `id`, `rot:α`, `lift:FIELD` (`θ ↦ θ + FIELD(θ)`),
//! `exp:t:FIELD` (time-`t` flow of `FIELD`) or a coefficient-list file holding
//! the periodic part.

use std::fs;

use diffvir_core::{CircleDiffeo, SpectralFunction};

use crate::UsageError;

fn read_file<T: serde::de::DeserializeOwned>(spec: &str) -> Result<Option<T>, UsageError> {
    let path = match spec.strip_prefix('@') {
        Some(p) => p,
        None if spec.ends_with(".json") => spec,
        None => return Ok(None),
    };
    let text = fs::read_to_string(path).map_err(|e| UsageError(format!("cannot read {path}: {e}")))?;
    serde_json::from_str(&text).map(Some).map_err(|e| UsageError(format!("{path}: {e}")))
}

fn number(text: &str, what: &str) -> Result<f64, UsageError> {
    text.trim().parse::<f64>().map_err(|_| UsageError(format!("cannot parse {what} `{text}`")))
}

fn atom(text: &str) -> Result<SpectralFunction, UsageError> {
    let text = text.trim();
    if text == "1" {
        return Ok(SpectralFunction::constant(1.0));
    }
    if let Some(x) = text.strip_prefix("const:") {
        return Ok(SpectralFunction::constant(number(x, "constant")?));
    }
    for (name, make) in
        [("cos", SpectralFunction::cos as fn(usize) -> SpectralFunction), ("sin", SpectralFunction::sin)]
    {
        if let Some(k) = text.strip_prefix(name) {
            let k = if k.is_empty() {
                1
            } else {
                k.parse::<usize>().map_err(|_| UsageError(format!("bad mode in `{text}`")))?
            };
            return Ok(make(k));
        }
    }
    number(text, "field term").map(SpectralFunction::constant)
}

/// Splits at `+`/`-` signs that start a new term (not those of an exponent).
fn terms(spec: &str) -> Vec<(f64, &str)> {
    let bytes = spec.as_bytes();
    let mut out = Vec::new();
    let mut start = 0;
    let mut sign = 1.0;
    for (i, &b) in bytes.iter().enumerate() {
        let exponent = i > 0 && matches!(bytes[i - 1], b'e' | b'E') && i >= 2 && bytes[i - 2].is_ascii_digit();
        if (b == b'+' || b == b'-') && !exponent && !spec[..i].ends_with(':') {
            if !spec[start..i].trim().is_empty() {
                out.push((sign, &spec[start..i]));
            }
            sign = if b == b'-' { -1.0 } else { 1.0 };
            start = i + 1;
        }
    }
    out.push((sign, &spec[start..]));
    out
}

pub fn parse_field(spec: &str) -> Result<SpectralFunction, UsageError> {
    if let Some(f) = read_file::<SpectralFunction>(spec)? {
        return Ok(f);
    }
    let mut total = SpectralFunction::zero();
    for (sign, term) in terms(spec) {
        if term.trim().is_empty() {
            return Err(UsageError(format!("empty term in field `{spec}`")));
        }
        let f = match term.split_once('*') {
            Some((coef, a)) => atom(a)?.scale(sign * number(coef, "coefficient")?),
            None => atom(term)?.scale(sign),
        };
        total = &total + &f;
    }
    Ok(total)
}

/// Parses a diffeomorphism spec. Construction errors (orientation, flow
/// budget) are numerical and returned separately from usage errors.
pub fn parse_diffeo(spec: &str) -> Result<diffvir_core::Result<CircleDiffeo>, UsageError> {
    if spec == "id" {
        return Ok(Ok(CircleDiffeo::identity()));
    }
    if let Some(a) = spec.strip_prefix("rot:") {
        return Ok(Ok(CircleDiffeo::rotation(number(a, "angle")?)));
    }
    if let Some(f) = spec.strip_prefix("lift:") {
        return Ok(CircleDiffeo::new(parse_field(f)?));
    }
    if let Some(rest) = spec.strip_prefix("exp:") {
        let (t, f) = rest.split_once(':').ok_or_else(|| UsageError(format!("expected exp:t:FIELD, got `{spec}`")))?;
        return Ok(CircleDiffeo::exp_flow(&parse_field(f)?, number(t, "flow time")?));
    }
    if let Some(p) = read_file::<SpectralFunction>(spec)? {
        return Ok(CircleDiffeo::new(p));
    }
    Err(UsageError(format!(
        "unknown diffeomorphism spec `{spec}` (use id, rot:a, lift:FIELD, exp:t:FIELD or a .json file)"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shorthands() {
        assert_eq!(parse_field("cos").unwrap(), SpectralFunction::cos(1));
        assert_eq!(parse_field("sin3").unwrap(), SpectralFunction::sin(3));
        assert_eq!(parse_field("const:2.5").unwrap(), SpectralFunction::constant(2.5));
        assert_eq!(parse_field("1").unwrap(), SpectralFunction::constant(1.0));
    }

    #[test]
    fn sums_and_exponents() {
        let f = parse_field("0.5*cos2 - 1e-3*sin + const:1").unwrap();
        let expected = &(&SpectralFunction::cos(2).scale(0.5) - &SpectralFunction::sin(1).scale(1e-3))
            + &SpectralFunction::constant(1.0);
        assert!(f.max_coeff_distance(&expected) < 1e-15);
        let g = parse_field("-cos").unwrap();
        assert!(g.max_coeff_distance(&SpectralFunction::cos(1).scale(-1.0)) < 1e-15);
        assert!(parse_field("const:-2").unwrap().max_coeff_distance(&SpectralFunction::constant(-2.0)) < 1e-15);
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_field("tan").is_err());
        assert!(parse_field("cos+").is_err());
        assert!(parse_diffeo("spin").is_err());
        assert!(parse_diffeo("exp:0.1").is_err());
    }

    #[test]
    fn diffeo_specs() {
        assert_eq!(parse_diffeo("id").unwrap().unwrap(), CircleDiffeo::identity());
        assert!(parse_diffeo("lift:0.1*sin").unwrap().is_ok());
        assert!(parse_diffeo("lift:2*sin").unwrap().is_err());
        assert!(parse_diffeo("exp:0.5:0.1*cos").unwrap().is_ok());
    }
}

//! Discrete-series central charges and lowest weights.

use crate::error::{Error, Result};

/// Indexing of the discrete series.
///
/// `Printed` uses `c(m) = 1 − 6/((m+2)(m+3))`; `Standard` uses
/// `c(m) = 1 − 6/(m(m+1))`. Both use
/// `h_{p,q}(m) = ((p(m+1) − qm)² − 1)/(4m(m+1))`, so the two lists differ by a
/// shift of two in the index of `c` only.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SeriesConvention {
    #[default]
    Printed,
    Standard,
}

fn check_m(m: u64) -> Result<()> {
    if m < 3 {
        return Err(Error::SeriesDomain(format!("m = {m} < 3")));
    }
    Ok(())
}

/// Central charge `c(m)` under `convention`, `m ≥ 3`.
pub fn discrete_series_c(m: u64, convention: SeriesConvention) -> Result<f64> {
    check_m(m)?;
    let m = m as f64;
    Ok(match convention {
        SeriesConvention::Printed => 1.0 - 6.0 / ((m + 2.0) * (m + 3.0)),
        SeriesConvention::Standard => 1.0 - 6.0 / (m * (m + 1.0)),
    })
}

/// `h_{p,q}(m)` for `m ≥ 3`, `1 ≤ p ≤ m − 1`, `1 ≤ q ≤ p`.
pub fn discrete_series_h(m: u64, p: u64, q: u64) -> Result<f64> {
    check_m(m)?;
    if !(1..m).contains(&p) || !(1..=p).contains(&q) {
        return Err(Error::SeriesDomain(format!("(p, q) = ({p}, {q}) outside 1 ≤ q ≤ p ≤ {}", m - 1)));
    }
    let (m, p, q) = (m as i64, p as i64, q as i64);
    let num = (p * (m + 1) - q * m).pow(2) - 1;
    Ok(num as f64 / (4 * m * (m + 1)) as f64)
}

/// All `(c(m), h_{p,q}(m))` pairs for one `m`.
pub fn discrete_series_pairs(m: u64, convention: SeriesConvention) -> Result<Vec<(f64, f64)>> {
    let c = discrete_series_c(m, convention)?;
    let mut out = Vec::new();
    for p in 1..m {
        for q in 1..=p {
            out.push((c, discrete_series_h(m, p, q)?));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn printed_values() {
        let p = SeriesConvention::Printed;
        assert_abs_diff_eq!(discrete_series_c(3, p).unwrap(), 0.8, epsilon = 1e-15);
        assert_abs_diff_eq!(discrete_series_c(4, p).unwrap(), 6.0 / 7.0, epsilon = 1e-15);
        assert!((discrete_series_c(1_000_000, p).unwrap() - 1.0).abs() < 1e-5);
        assert_eq!(discrete_series_h(3, 2, 1).unwrap(), 0.5);
        assert_eq!(discrete_series_h(3, 2, 2).unwrap(), 1.0 / 16.0);
        for m in 3..10 {
            assert_eq!(discrete_series_h(m, 1, 1).unwrap(), 0.0);
        }
    }

    #[test]
    fn standard_values() {
        let s = SeriesConvention::Standard;
        assert_abs_diff_eq!(discrete_series_c(3, s).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(discrete_series_c(5, s).unwrap(), 0.8, epsilon = 1e-15);
        assert_eq!(discrete_series_pairs(3, s).unwrap().len(), 3);
    }

    #[test]
    fn domain_errors() {
        assert!(discrete_series_c(2, SeriesConvention::Printed).is_err());
        assert!(discrete_series_h(3, 3, 1).is_err());
        assert!(discrete_series_h(3, 1, 2).is_err());
        assert!(discrete_series_h(3, 0, 0).is_err());
    }
}

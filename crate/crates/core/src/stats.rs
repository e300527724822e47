//! Shuffled-baseline normalization, informativeness and variability ratio.
//!
//! For a metric value `x` on a real text and values `r_1..r_n` on its
//! shuffled replicas:
//!
//! - `X = x / mean(r)`
//! - `eps = std(r) / mean(r) * X`
//! - `D = |X - 1| / eps` (or the signed `(X - 1) / eps`)
//!
//! A text is informative for the metric when `D > 1`. Informativeness `I`
//! is the percentage of texts with `D > 1`. The variability ratio is the
//! coefficient of variation across a same-content/multi-language set over
//! the one across a multi-content/same-language set.

use crate::error::{Error, Result};

/// Relative magnitude below which a spread or a deviation from 1 is treated
/// as exact zero (e.g. PageRank means that equal `1/n` up to rounding).
pub const DEGENERATE_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StdKind {
    /// Divide by `n`.
    #[default]
    Population,
    /// Divide by `n - 1`.
    Sample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct NormalizeOptions {
    pub std: StdKind,
    /// Use the signed distance `(X - 1) / eps` for the `D > 1` rule.
    pub signed_distance: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizedMetric {
    pub x_raw: f64,
    pub baseline_mean: f64,
    pub baseline_std: f64,
    pub x_norm: f64,
    pub eps: f64,
    /// `(X - 1) / eps`, kept regardless of the active convention.
    pub d_signed: f64,
    /// Distance under the active convention.
    pub d: f64,
    pub informative: bool,
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn std_dev(values: &[f64], kind: StdKind) -> f64 {
    let m = mean(values);
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    let denom = match kind {
        StdKind::Population => values.len() as f64,
        StdKind::Sample => (values.len() as f64 - 1.0).max(1.0),
    };
    (ss / denom).sqrt()
}

pub fn normalize(x_raw: f64, baseline: &[f64], opts: NormalizeOptions) -> Result<NormalizedMetric> {
    if baseline.is_empty() {
        return Err(Error::Undefined("empty shuffled baseline".into()));
    }
    if !x_raw.is_finite() || baseline.iter().any(|v| !v.is_finite()) {
        return Err(Error::Undefined("non-finite metric value".into()));
    }
    let mu = mean(baseline);
    if mu == 0.0 {
        return Err(Error::Undefined("shuffled baseline mean is zero".into()));
    }
    let mut sigma = std_dev(baseline, opts.std);
    if sigma <= DEGENERATE_RTOL * mu.abs() {
        sigma = 0.0;
    }
    let x_norm = x_raw / mu;
    let eps = (sigma / mu * x_norm).abs();
    let dev = if (x_norm - 1.0).abs() <= DEGENERATE_RTOL {
        0.0
    } else {
        x_norm - 1.0
    };
    let d_signed = if dev == 0.0 {
        0.0
    } else if eps == 0.0 {
        f64::INFINITY.copysign(dev)
    } else {
        dev / eps
    };
    let d = if opts.signed_distance {
        d_signed
    } else {
        d_signed.abs()
    };
    Ok(NormalizedMetric {
        x_raw,
        baseline_mean: mu,
        baseline_std: sigma,
        x_norm,
        eps,
        d_signed,
        d,
        informative: d > 1.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Informativeness {
    /// Percentage in `[0, 100]`; `None` when no cell was defined.
    pub percent: Option<f64>,
    pub n_t: usize,
    pub n_informative: usize,
    pub n_undefined: usize,
}

/// `I = 100 * |D > 1| / N_T`; undefined cells count in neither term.
pub fn informativeness(cells: &[Option<NormalizedMetric>]) -> Result<Informativeness> {
    informativeness_at(cells, 1.0)
}

pub fn informativeness_at(cells: &[Option<NormalizedMetric>], threshold: f64) -> Result<Informativeness> {
    if cells.is_empty() {
        return Err(Error::InvalidArgument("informativeness of an empty cell list".into()));
    }
    let defined: Vec<&NormalizedMetric> = cells.iter().flatten().collect();
    let n_t = defined.len();
    let n_informative = defined.iter().filter(|c| c.d > threshold).count();
    Ok(Informativeness {
        percent: (n_t > 0).then(|| 100.0 * n_informative as f64 / n_t as f64),
        n_t,
        n_informative,
        n_undefined: cells.len() - n_t,
    })
}

/// `std / |mean|`. A spread below `DEGENERATE_RTOL` of the mean is
/// rounding noise and gives exactly 0.
pub fn coefficient_of_variation(values: &[f64], kind: StdKind) -> Result<f64> {
    if values.len() < 2 {
        return Err(Error::Undefined(format!(
            "coefficient of variation needs >= 2 values, got {}",
            values.len()
        )));
    }
    let m = mean(values);
    if m == 0.0 || !m.is_finite() {
        return Err(Error::Undefined("coefficient of variation with zero mean".into()));
    }
    let sigma = std_dev(values, kind);
    if sigma <= DEGENERATE_RTOL * m.abs() {
        return Ok(0.0);
    }
    Ok(sigma / m.abs())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Variability {
    pub v_syntax: f64,
    pub v_semantics: f64,
    pub ratio: f64,
    /// `ratio > 1`.
    pub syntax_dominant: bool,
}

pub fn variability_ratio(syntax_values: &[f64], semantics_values: &[f64], kind: StdKind) -> Result<Variability> {
    let v_syntax = coefficient_of_variation(syntax_values, kind)?;
    let v_semantics = coefficient_of_variation(semantics_values, kind)?;
    if v_semantics == 0.0 {
        return Err(Error::Undefined("semantic variability is zero".into()));
    }
    let ratio = v_syntax / v_semantics;
    Ok(Variability {
        v_syntax,
        v_semantics,
        ratio,
        syntax_dominant: ratio > 1.0,
    })
}

//! Numerically stable log-domain scalar arithmetic and the weighted median.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// log(e^a + e^b) without leaving the log domain.
///
/// Exact for `-inf` arguments; NaN propagates.
#[inline]
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + libm::log1p(libm::exp(lo - hi))
}

/// log Σ e^{v_i}, computed as `m + log Σ e^{v_i − m}` with `m = max v`.
///
/// Returns `-inf` when every entry is `-inf`; errors on an empty list.
pub fn log_sum_exp(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyInput("log_sum_exp"));
    }
    let mut m = f64::NEG_INFINITY;
    for &v in values {
        if v.is_nan() {
            return Ok(f64::NAN);
        }
        if v > m {
            m = v;
        }
    }
    if m == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    if m == f64::INFINITY {
        return Ok(f64::INFINITY);
    }
    let sum: f64 = values.iter().map(|&v| libm::exp(v - m)).sum();
    Ok(m + libm::log(sum))
}

/// A value `z` among `values` minimizing `Σ w_i |v_i − z|`.
///
/// The objective is piecewise linear with breakpoints only at the inputs, so
/// restricting candidates to the inputs loses nothing. Ties (an interval of
/// minimizers) break deterministically to the smallest minimizing value.
pub fn weighted_median(values: &[f64], weights: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyInput("weighted_median"));
    }
    if values.len() != weights.len() {
        return Err(Error::LengthMismatch {
            context: "weighted_median",
            left: values.len(),
            right: weights.len(),
        });
    }
    for &w in weights {
        if !(w > 0.0) || !w.is_finite() {
            return Err(Error::InvalidParameter {
                name: "weighted_median weights must be positive and finite",
            });
        }
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let total: f64 = order.iter().map(|&i| weights[i]).sum();
    // The minimizers of the piecewise-linear objective are exactly the values
    // where the cumulative weight first reaches half the total; scanning in
    // ascending order returns the smallest one.
    let mut acc = 0.0;
    for &i in &order {
        acc += weights[i];
        if 2.0 * acc >= total {
            return Ok(values[i]);
        }
    }
    // Unreachable for positive weights (acc == total ≥ total/2 at the end),
    // but keep a deterministic fallback rather than a panic path.
    Ok(values[order[values.len() - 1]])
}

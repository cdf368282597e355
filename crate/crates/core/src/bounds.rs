//! Closed-form variance bounds and `(epsilon, delta)` sample-size requirements.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative error `epsilon` and failure probability `delta`, both in `(0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproximationParams {
    epsilon: f64,
    delta: f64,
}

impl ApproximationParams {
    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        for (name, v) in [("epsilon", epsilon), ("delta", delta)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::arg(format!("{name} must lie in (0, 1), got {v}")));
            }
        }
        Ok(ApproximationParams { epsilon, delta })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

/// `((1 - p) / p) * C^2`, the variance bound for edge and node sampling.
pub fn es_ns_variance_bound(count: f64, p: f64) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::arg(format!("p must lie in (0, 1], got {p}")));
    }
    if count < 0.0 {
        return Err(Error::arg("count must be non-negative"));
    }
    Ok((1.0 - p) / p * count * count)
}

/// `((m - 1) / s) * C^2`, the variance bound for interval sampling.
pub fn is_variance_bound(count: f64, m: usize, s: usize) -> Result<f64> {
    if s == 0 {
        return Err(Error::arg("s must be positive"));
    }
    if m == 0 {
        return Err(Error::arg("m must be positive"));
    }
    if count < 0.0 {
        return Err(Error::arg("count must be non-negative"));
    }
    Ok((m - 1) as f64 / s as f64 * count * count)
}

/// Chebyshev: smallest sampling probability `1 / (1 + delta * eps^2)`.
pub fn min_probability(params: ApproximationParams) -> f64 {
    1.0 / (1.0 + params.delta * params.epsilon * params.epsilon)
}

/// `h(x) = (1 + x) ln(1 + x) - x`.
pub fn bennett_h(x: f64) -> f64 {
    (1.0 + x) * x.ln_1p() - x
}

/// Bennett: anchors needed by interval sampling,
/// `ceil((m - 1) ln(2/delta) / h(epsilon))`. Returns 1 when `m < 2`.
pub fn min_interval_samples(params: ApproximationParams, m: usize) -> u64 {
    if m < 2 {
        return 1;
    }
    let raw = (m - 1) as f64 * (2.0 / params.delta).ln() / bennett_h(params.epsilon);
    raw.ceil() as u64
}

/// Chebyshev: anchors needed by interval sampling, `ceil((m - 1) / (delta * eps^2))`.
pub fn chebyshev_interval_samples(params: ApproximationParams, m: usize) -> u64 {
    if m < 2 {
        return 1;
    }
    let raw = (m - 1) as f64 / (params.delta * params.epsilon * params.epsilon);
    // Keep exact quotients like 100 / 0.025 from rounding up past 4000.
    let rounded = raw.round();
    if (raw - rounded).abs() <= 1e-9 * rounded.max(1.0) {
        rounded as u64
    } else {
        raw.ceil() as u64
    }
}

/// Every quantity the `bounds` command prints.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsSummary {
    pub epsilon: f64,
    pub delta: f64,
    pub min_probability: f64,
    pub m: Option<usize>,
    pub min_interval_samples: Option<u64>,
    pub chebyshev_interval_samples: Option<u64>,
    pub count: Option<f64>,
    pub p: Option<f64>,
    pub es_ns_variance_bound: Option<f64>,
    pub s: Option<usize>,
    pub is_variance_bound: Option<f64>,
}

pub fn summarize(
    params: ApproximationParams,
    m: Option<usize>,
    count: Option<f64>,
    p: Option<f64>,
    s: Option<usize>,
) -> Result<BoundsSummary> {
    let es_ns = match (count, p) {
        (Some(c), Some(p)) => Some(es_ns_variance_bound(c, p)?),
        _ => None,
    };
    let is = match (count, m, s) {
        (Some(c), Some(m), Some(s)) => Some(is_variance_bound(c, m, s)?),
        _ => None,
    };
    Ok(BoundsSummary {
        epsilon: params.epsilon,
        delta: params.delta,
        min_probability: min_probability(params),
        m,
        min_interval_samples: m.map(|m| min_interval_samples(params, m)),
        chebyshev_interval_samples: m.map(|m| chebyshev_interval_samples(params, m)),
        count,
        p,
        es_ns_variance_bound: es_ns,
        s,
        is_variance_bound: is,
    })
}

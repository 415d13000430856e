//! Bernstein basis, the exponential warping map `a_n`, its maximal deviation
//! from the identity and the per-axis operator weights.

use serde::{Deserialize, Serialize};

use crate::binom::{binomial_pmf, binomial_pmf_vector};
use crate::error::{check_unit, Error, Result};
use crate::numeric::{compensated_dot, compensated_sum, expm1_ratio_excess, golden_section_max, ln1p_minus_ratio};

/// Largest dimension accepted when `EXPOBERN_DMAX` is unset.
pub const DEFAULT_D_MAX: usize = 3;

/// Maximum supported dimension, overridable through `EXPOBERN_DMAX`.
pub fn d_max() -> usize {
    std::env::var("EXPOBERN_DMAX")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&v| v >= 1)
        .unwrap_or(DEFAULT_D_MAX)
}

/// Degree `n`, exponential rate `mu` and dimension `d` of an operator.
///
/// `mu = 0` is accepted and selects the classical Bernstein operators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorParams {
    n: u32,
    mu: f64,
    d: usize,
}

impl OperatorParams {
    pub fn new(n: u32, mu: f64, d: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("degree n must be >= 1".into()));
        }
        if !mu.is_finite() || mu < 0.0 {
            return Err(Error::InvalidParameter(format!("rate mu must be finite and >= 0, got {mu}")));
        }
        let max = d_max();
        if d == 0 || d > max {
            return Err(Error::InvalidParameter(format!("dimension d must be in 1..={max}, got {d}")));
        }
        Ok(Self { n, mu, d })
    }

    /// One-dimensional parameters.
    pub fn univariate(n: u32, mu: f64) -> Result<Self> {
        Self::new(n, mu, 1)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Same rate and dimension at another degree.
    pub fn with_n(&self, n: u32) -> Result<Self> {
        Self::new(n, self.mu, self.d)
    }

    pub fn with_d(&self, d: usize) -> Result<Self> {
        Self::new(self.n, self.mu, d)
    }

    pub fn is_classical(&self) -> bool {
        self.mu == 0.0
    }

    pub(crate) fn warp_unchecked(&self, x: f64) -> f64 {
        if self.mu == 0.0 || x == 0.0 || x == 1.0 {
            return x;
        }
        let n = self.n as f64;
        (self.mu * x / n).exp_m1() / (self.mu / n).exp_m1()
    }
}

/// Basis value `C(n,k) t^k (1-t)^(n-k)`.
pub fn bernstein_basis(n: u32, k: u32, t: f64) -> Result<f64> {
    if k > n {
        return Err(Error::IndexOutOfRange { n, k });
    }
    check_unit("t", t)?;
    Ok(binomial_pmf(n, k, t))
}

/// All `n + 1` basis values at `t`.
pub fn basis_vector(n: u32, t: f64) -> Result<Vec<f64>> {
    check_unit("t", t)?;
    Ok(binomial_pmf_vector(n, t))
}

/// The warping map `a_n(x) = (e^{mu x/n} - 1) / (e^{mu/n} - 1)`.
pub fn warp(params: &OperatorParams, x: f64) -> Result<f64> {
    check_unit("x", x)?;
    Ok(params.warp_unchecked(x))
}

/// `max_x |a_n(x) - x|` from its closed form.
///
/// With `y = mu/n` and `r = (e^y - 1)/y` the maximum equals
/// `[ln r - (r - 1)/r] / y`; both pieces are formed from `r - 1` by series
/// near zero, so the result keeps full relative accuracy for tiny `y`.
pub fn gamma_n_closed(params: &OperatorParams) -> f64 {
    if params.mu == 0.0 {
        return 0.0;
    }
    let y = params.mu / params.n as f64;
    let u = expm1_ratio_excess(y);
    (ln1p_minus_ratio(u) / y).max(0.0)
}

/// `max_x |a_n(x) - x|` by grid search refined with golden-section search.
pub fn gamma_n_grid(params: &OperatorParams, resolution: usize) -> Result<f64> {
    if resolution < 1000 {
        return Err(Error::InvalidParameter(format!(
            "gamma grid resolution must be >= 1000, got {resolution}"
        )));
    }
    if params.mu == 0.0 {
        return Ok(0.0);
    }
    let gap = |x: f64| x - params.warp_unchecked(x);
    let step = 1.0 / resolution as f64;
    let (best_i, best) = (0..=resolution)
        .map(|i| (i, gap(i as f64 * step)))
        .fold((0, f64::NEG_INFINITY), |acc, c| if c.1 > acc.1 { c } else { acc });
    let lo = (best_i.saturating_sub(1)) as f64 * step;
    let hi = ((best_i + 1).min(resolution)) as f64 * step;
    let (_, refined) = golden_section_max(gap, lo, hi, 1e-15, 200);
    Ok(refined.max(best).max(0.0))
}

/// First absolute moment `sum_k |k/n - x| p_{n,k}(x)`.
pub fn first_moment(params: &OperatorParams, x: f64) -> Result<f64> {
    check_unit("x", x)?;
    let n = params.n;
    let nf = n as f64;
    Ok(compensated_sum(
        (0..=n).map(|k| (k as f64 / nf - x).abs() * binomial_pmf(n, k, x)),
    ))
}

/// Per-axis weights `e^{-mu k/n} e^{mu x} p_{n,k}(a_n(x))` at one coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisWeights {
    values: Vec<f64>,
    x: f64,
    params: OperatorParams,
}

impl BasisWeights {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn params(&self) -> &OperatorParams {
        &self.params
    }

    /// The underlying basis values `p_{n,k}(a_n(x))`, exponential factors removed.
    pub fn stripped(&self) -> Vec<f64> {
        let n = self.params.n as f64;
        let mu = self.params.mu;
        self.values
            .iter()
            .enumerate()
            .map(|(k, w)| w * (mu * (k as f64 / n - self.x)).exp())
            .collect()
    }

    /// `sum_k samples[k] * values[k]`, with `samples[k] = f(k/n)`.
    pub fn apply(&self, samples: &[f64]) -> f64 {
        compensated_dot(&self.values, samples)
    }
}

pub(crate) fn exp_weights_unchecked(params: &OperatorParams, x: f64) -> BasisWeights {
    let a = params.warp_unchecked(x);
    let n = params.n as f64;
    let mu = params.mu;
    let values = binomial_pmf_vector(params.n, a)
        .into_iter()
        .enumerate()
        .map(|(k, p)| if p == 0.0 { 0.0 } else { p * (mu * (x - k as f64 / n)).exp() })
        .collect();
    BasisWeights { values, x, params: *params }
}

/// Operator weights at coordinate `x`.
pub fn exp_weights(params: &OperatorParams, x: f64) -> Result<BasisWeights> {
    check_unit("x", x)?;
    Ok(exp_weights_unchecked(params, x))
}

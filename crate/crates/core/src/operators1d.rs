//! One-dimensional operators: classical Bernstein `B_n`, the exponential
//! operators `G_n`, and the closed forms they admit on exponential monomials.

use std::fmt;
use std::sync::Arc;

use crate::basis::{exp_weights_unchecked, OperatorParams};
use crate::binom::binomial_pmf_vector;
use crate::error::{check_unit, Error, Result};
use crate::numeric::compensated_dot;

pub type Eval1D = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A real function on `[0, 1]`. Evaluation must be deterministic and safe to
/// call from several threads.
#[derive(Clone)]
pub struct Function1D {
    eval: Eval1D,
    name: String,
    sup_norm_hint: Option<f64>,
}

impl Function1D {
    pub fn new(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            eval: Arc::new(f),
            name: name.into(),
            sup_norm_hint: None,
        }
    }

    pub fn with_sup_norm(mut self, sup: f64) -> Self {
        self.sup_norm_hint = Some(sup);
        self
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn sup_norm_hint(&self) -> Option<f64> {
        self.sup_norm_hint
    }

    pub fn constant(c: f64) -> Self {
        Self::new(format!("const({c})"), move |_| c).with_sup_norm(c.abs())
    }

    /// `t -> t^j`.
    pub fn monomial(j: i32) -> Self {
        Self::new(format!("e{j}"), move |t| t.powi(j)).with_sup_norm(1.0)
    }

    /// `t -> e^{m mu t}`.
    pub fn exp_power(mu: f64, m: u32) -> Self {
        let rate = mu * m as f64;
        Self::new(format!("exp^{m}"), move |t| (rate * t).exp()).with_sup_norm(rate.max(0.0).exp())
    }

    /// Samples `f(k/n)` for `k = 0..=n`.
    pub fn samples(&self, n: u32) -> Vec<f64> {
        let nf = n as f64;
        (0..=n).map(|k| self.eval(k as f64 / nf)).collect()
    }
}

impl fmt::Debug for Function1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Function1D")
            .field("name", &self.name)
            .field("sup_norm_hint", &self.sup_norm_hint)
            .finish_non_exhaustive()
    }
}

/// `B_n(f, x) = sum_k f(k/n) p_{n,k}(x)`.
pub fn bernstein_apply(f: &Function1D, n: u32, x: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("degree n must be >= 1".into()));
    }
    check_unit("x", x)?;
    Ok(compensated_dot(&binomial_pmf_vector(n, x), &f.samples(n)))
}

/// `G_n(f, x) = sum_k f(k/n) e^{-mu k/n} e^{mu x} p_{n,k}(a_n(x))`.
pub fn gn_apply(f: &Function1D, params: &OperatorParams, x: f64) -> Result<f64> {
    check_unit("x", x)?;
    Ok(exp_weights_unchecked(params, x).apply(&f.samples(params.n())))
}

/// `G_n(f, x)` routed through the classical operator:
/// `e^{mu x} B_n(f / exp_mu, a_n(x))`.
pub fn gn_via_bernstein(f: &Function1D, params: &OperatorParams, x: f64) -> Result<f64> {
    check_unit("x", x)?;
    let mu = params.mu();
    let inner = f.clone();
    let damped = Function1D::new("f/exp_mu", move |t| inner.eval(t) * (-mu * t).exp());
    let a = params.warp_unchecked(x);
    Ok((mu * x).exp() * bernstein_apply(&damped, params.n(), a)?)
}

// Each closed form is `e^{lead} (1 + c)^n`, with `c` a signed sum of
// `expm1` terms. Returned as the exponent `lead + n ln(1 + c)`.
fn log_e0(params: &OperatorParams, x: f64) -> f64 {
    let y = params.mu() / params.n() as f64;
    let c = y.exp_m1() - (x * y).exp_m1();
    params.mu() * (x - 1.0) + params.n() as f64 * c.ln_1p()
}

fn log_exp3(params: &OperatorParams, x: f64) -> f64 {
    let y = params.mu() / params.n() as f64;
    let c = ((x + 1.0) * y).exp_m1() + (x * y).exp_m1() - y.exp_m1();
    params.mu() * x + params.n() as f64 * c.ln_1p()
}

fn log_exp4(params: &OperatorParams, x: f64) -> f64 {
    let y = params.mu() / params.n() as f64;
    let c = ((x + 2.0) * y).exp_m1() + ((x + 1.0) * y).exp_m1() + (x * y).exp_m1()
        - y.exp_m1()
        - (2.0 * y).exp_m1();
    params.mu() * x + params.n() as f64 * c.ln_1p()
}

pub(crate) fn log_e0_unchecked(params: &OperatorParams, x: f64) -> f64 {
    log_e0(params, x)
}

pub(crate) fn e0_closed_unchecked(params: &OperatorParams, x: f64) -> f64 {
    log_e0(params, x).exp()
}

pub(crate) fn e0_closed_minus_one_unchecked(params: &OperatorParams, x: f64) -> f64 {
    log_e0(params, x).exp_m1()
}

pub(crate) fn exp3_closed_unchecked(params: &OperatorParams, x: f64) -> f64 {
    log_exp3(params, x).exp()
}

pub(crate) fn exp4_closed_unchecked(params: &OperatorParams, x: f64) -> f64 {
    log_exp4(params, x).exp()
}

/// `G_n(e_0, x) = e^{mu(x-1)} (e^{mu/n} + 1 - e^{mu x/n})^n`.
pub fn gn_e0_closed(params: &OperatorParams, x: f64) -> Result<f64> {
    check_unit("x", x)?;
    Ok(e0_closed_unchecked(params, x))
}

/// `G_n(exp_mu^3, x) = e^{mu x} (e^{mu(x+1)/n} + e^{mu x/n} - e^{mu/n})^n`.
pub fn gn_exp3_closed(params: &OperatorParams, x: f64) -> Result<f64> {
    check_unit("x", x)?;
    Ok(exp3_closed_unchecked(params, x))
}

/// `G_n(exp_mu^4, x)`; the base is
/// `e^{mu(x+2)/n} + e^{mu(x+1)/n} + e^{mu x/n} - e^{mu/n} - e^{2mu/n}`.
pub fn gn_exp4_closed(params: &OperatorParams, x: f64) -> Result<f64> {
    check_unit("x", x)?;
    Ok(exp4_closed_unchecked(params, x))
}

/// `G_n((exp_mu - e^{mu x})^2, x) = e^{2 mu x} (G_n(e_0, x) - 1)`.
pub fn gn_centered_exp_sq(params: &OperatorParams, x: f64) -> Result<f64> {
    check_unit("x", x)?;
    Ok((2.0 * params.mu() * x).exp() * e0_closed_minus_one_unchecked(params, x))
}

/// Below this degree the `|G_n(e_0) - 1| <= mu^2/n` check is reported only.
pub const VORONOVSKAJA_MIN_ASSERTED_N: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VoronovskajaCheck {
    pub max_deviation: f64,
    pub bound: f64,
    pub bound_holds: bool,
    /// Whether `n` is large enough for a failure to count as a hard failure.
    pub asserted: bool,
}

/// Max over a uniform grid of `|G_n(e_0, x) - 1|`, compared with `mu^2/n`.
pub fn voronovskaja_e0_check(params: &OperatorParams, grid_resolution: usize) -> Result<VoronovskajaCheck> {
    if grid_resolution < 257 {
        return Err(Error::InvalidParameter(format!(
            "grid resolution must be >= 257, got {grid_resolution}"
        )));
    }
    let last = (grid_resolution - 1) as f64;
    let max_deviation = (0..grid_resolution)
        .map(|i| e0_closed_minus_one_unchecked(params, i as f64 / last).abs())
        .fold(0.0, f64::max);
    let bound = params.mu() * params.mu() / params.n() as f64;
    Ok(VoronovskajaCheck {
        max_deviation,
        bound,
        bound_holds: max_deviation <= bound,
        asserted: params.n() >= VORONOVSKAJA_MIN_ASSERTED_N,
    })
}

/// Smallest `n0 <= n_max` such that the `e_0` inequality holds for every
/// `n` in `n0..=n_max`; `None` if it fails at `n_max`.
pub fn voronovskaja_threshold(mu: f64, n_max: u32, grid_resolution: usize) -> Result<Option<u32>> {
    let mut threshold = None;
    for n in (1..=n_max).rev() {
        let check = voronovskaja_e0_check(&OperatorParams::univariate(n, mu)?, grid_resolution)?;
        if !check.bound_holds {
            break;
        }
        threshold = Some(n);
    }
    Ok(threshold)
}

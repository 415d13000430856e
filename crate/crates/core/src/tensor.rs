//! Multidimensional operators on the hypercube `[0,1]^d`.
//!
//! Every operator here is a tensor product of per-axis weight vectors applied
//! to the `(n+1)^d` lattice of samples `f(k_1/n, ..., k_d/n)`. Single points
//! are evaluated with a nested loop (last axis innermost); whole grids are
//! evaluated by contracting the sample lattice one axis at a time.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{exp_weights_unchecked, OperatorParams};
use crate::binom::binomial_pmf_vector;
use crate::error::{check_cube, Error, Result};
use crate::numeric::{compensated_dot, NeumaierSum};
use crate::operators1d::{
    e0_closed_unchecked, exp3_closed_unchecked, exp4_closed_unchecked, gn_apply, log_e0_unchecked,
    Function1D,
};

pub type EvalND = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A real function on `[0,1]^d` with optional metadata.
///
/// `eval` must be deterministic and safe for concurrent calls; grid sweeps
/// evaluate it from several threads.
#[derive(Clone)]
pub struct ScalarField {
    eval: EvalND,
    d: usize,
    name: String,
    lip_alpha_hint: Option<f64>,
    sup_norm_hint: Option<f64>,
    separable_factors: Option<Vec<Function1D>>,
}

impl ScalarField {
    pub fn new(
        name: impl Into<String>,
        d: usize,
        f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            eval: Arc::new(f),
            d,
            name: name.into(),
            lip_alpha_hint: None,
            sup_norm_hint: None,
            separable_factors: None,
        }
    }

    /// `x -> prod_i factors[i](x_i)`, with the factors kept for the fast path.
    pub fn from_factors(name: impl Into<String>, factors: Vec<Function1D>) -> Self {
        let d = factors.len();
        let fs = factors.clone();
        let mut field = Self::new(name, d, move |x: &[f64]| {
            fs.iter().zip(x).map(|(f, &xi)| f.eval(xi)).product()
        });
        field.separable_factors = Some(factors);
        field
    }

    /// Declares a product structure for an existing field.
    pub fn with_separable_factors(mut self, factors: Vec<Function1D>) -> Result<Self> {
        if factors.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: factors.len(),
            });
        }
        self.separable_factors = Some(factors);
        Ok(self)
    }

    pub fn with_lip_alpha(mut self, alpha: f64) -> Self {
        self.lip_alpha_hint = Some(alpha);
        self
    }

    pub fn with_sup_norm(mut self, sup: f64) -> Self {
        self.sup_norm_hint = Some(sup);
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.eval)(x)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn lip_alpha_hint(&self) -> Option<f64> {
        self.lip_alpha_hint
    }

    pub fn sup_norm_hint(&self) -> Option<f64> {
        self.sup_norm_hint
    }

    pub fn separable_factors(&self) -> Option<&[Function1D]> {
        self.separable_factors.as_deref()
    }

    /// Checks `eval(x) == prod_i factor_i(x_i)` to `rel_tol` at the given probes.
    /// Fields without declared factors pass trivially.
    pub fn factors_consistent(&self, probes: &[Vec<f64>], rel_tol: f64) -> bool {
        let Some(factors) = &self.separable_factors else {
            return true;
        };
        probes.iter().all(|x| {
            let full = self.eval(x);
            let prod: f64 = factors.iter().zip(x).map(|(f, &xi)| f.eval(xi)).product();
            (full - prod).abs() <= rel_tol * full.abs().max(prod.abs()) + f64::MIN_POSITIVE
        })
    }
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("name", &self.name)
            .field("d", &self.d)
            .field("lip_alpha_hint", &self.lip_alpha_hint)
            .field("sup_norm_hint", &self.sup_norm_hint)
            .field("separable", &self.separable_factors.is_some())
            .finish_non_exhaustive()
    }
}

/// Tensor evaluation lattice on `[0,1]^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    axes: Vec<Vec<f64>>,
}

/// Default points per axis for `d = 1, 2, 3`.
pub const DEFAULT_RESOLUTIONS: [usize; 3] = [1025, 129, 33];

impl Grid {
    /// Each axis must be strictly increasing, start at 0 and end at 1.
    pub fn new(axes: Vec<Vec<f64>>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::InvalidParameter("grid needs at least one axis".into()));
        }
        for (i, axis) in axes.iter().enumerate() {
            let ok = axis.len() >= 2
                && axis.first() == Some(&0.0)
                && axis.last() == Some(&1.0)
                && axis.windows(2).all(|w| w[0] < w[1]);
            if !ok {
                return Err(Error::InvalidParameter(format!(
                    "grid axis {i} must be strictly increasing from 0 to 1"
                )));
            }
        }
        Ok(Self { axes })
    }

    /// `resolution` equispaced points per axis, endpoints included.
    pub fn uniform(d: usize, resolution: usize) -> Result<Self> {
        if resolution < 2 {
            return Err(Error::InvalidParameter(format!(
                "grid resolution must be >= 2, got {resolution}"
            )));
        }
        let last = (resolution - 1) as f64;
        let axis: Vec<f64> = (0..resolution).map(|i| i as f64 / last).collect();
        Self::new(vec![axis; d])
    }

    /// Equispaced axes with the given number of points each.
    pub fn with_resolutions(resolutions: &[usize]) -> Result<Self> {
        let mut axes = Vec::with_capacity(resolutions.len());
        for &r in resolutions {
            if r < 2 {
                return Err(Error::InvalidParameter(format!("grid resolution must be >= 2, got {r}")));
            }
            let last = (r - 1) as f64;
            axes.push((0..r).map(|i| i as f64 / last).collect());
        }
        Self::new(axes)
    }

    pub fn default_resolution(d: usize) -> usize {
        DEFAULT_RESOLUTIONS.get(d.saturating_sub(1)).copied().unwrap_or(9)
    }

    pub fn default_for(d: usize) -> Self {
        Self::uniform(d, Self::default_resolution(d)).expect("default grid is valid")
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Vec<f64>] {
        &self.axes
    }

    pub fn resolution(&self) -> Vec<usize> {
        self.axes.iter().map(Vec::len).collect()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(Vec::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Point at a flat index; the last axis varies fastest.
    pub fn point(&self, mut index: usize) -> Vec<f64> {
        let mut x = vec![0.0; self.dim()];
        for (i, axis) in self.axes.iter().enumerate().rev() {
            x[i] = axis[index % axis.len()];
            index /= axis.len();
        }
        x
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }
}

/// Which operator family to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorKind {
    Classical,
    Exponential,
}

impl OperatorKind {
    /// Weight vector over `k = 0..=n` at coordinate `x`.
    fn weights(self, params: &OperatorParams, x: f64) -> Vec<f64> {
        match self {
            OperatorKind::Classical => binomial_pmf_vector(params.n(), x),
            OperatorKind::Exponential => exp_weights_unchecked(params, x).values().to_vec(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            OperatorKind::Classical => "classical",
            OperatorKind::Exponential => "exponential",
        }
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OperatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "classical" | "bernstein" => Ok(OperatorKind::Classical),
            "exponential" | "exp" => Ok(OperatorKind::Exponential),
            other => Err(Error::InvalidParameter(format!("unknown operator kind `{other}`"))),
        }
    }
}

/// Samples of a field on the lattice `{k/n}^d`, last axis fastest.
#[derive(Debug, Clone)]
pub struct SampleLattice {
    n: u32,
    d: usize,
    values: Vec<f64>,
}

impl SampleLattice {
    pub fn new(f: &ScalarField, n: u32) -> Self {
        let d = f.d();
        let side = n as usize + 1;
        let len = side.pow(d as u32);
        let nf = n as f64;
        let values = (0..len)
            .into_par_iter()
            .map(|mut idx| {
                let mut x = vec![0.0; d];
                for xi in x.iter_mut().rev() {
                    *xi = (idx % side) as f64 / nf;
                    idx /= side;
                }
                f.eval(&x)
            })
            .collect();
        Self { n, d, values }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Multiplies every sample by `prod_i e^{-mu k_i/n}`.
    pub fn damped(&self, mu: f64) -> Self {
        let side = self.n as usize + 1;
        let nf = self.n as f64;
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(mut idx, v)| {
                let mut ksum = 0usize;
                for _ in 0..self.d {
                    ksum += idx % side;
                    idx /= side;
                }
                v * (-mu * ksum as f64 / nf).exp()
            })
            .collect();
        Self { n: self.n, d: self.d, values }
    }

    /// `sum_{k} samples[k] prod_i weights[i][k_i]`, last axis innermost.
    pub fn contract_point(&self, weights: &[Vec<f64>]) -> f64 {
        debug_assert_eq!(weights.len(), self.d);
        let side = self.n as usize + 1;
        let last = &weights[self.d - 1];
        let outer_axes = self.d - 1;
        let mut idx = vec![0usize; outer_axes];
        let mut acc = NeumaierSum::new();
        let mut offset = 0;
        loop {
            let prefix: f64 = idx.iter().enumerate().map(|(i, &k)| weights[i][k]).product();
            if prefix != 0.0 {
                acc += prefix * compensated_dot(last, &self.values[offset..offset + side]);
            }
            offset += side;
            // odometer over the outer axes
            let mut axis = outer_axes;
            loop {
                if axis == 0 {
                    return acc.value();
                }
                axis -= 1;
                idx[axis] += 1;
                if idx[axis] < side {
                    break;
                }
                idx[axis] = 0;
            }
        }
    }

    /// Contracts every axis against a family of weight vectors, producing the
    /// operator on the full tensor grid (last axis fastest).
    pub fn contract_grid(&self, axis_weights: &[Vec<Vec<f64>>]) -> Vec<f64> {
        debug_assert_eq!(axis_weights.len(), self.d);
        let mut shape = vec![self.n as usize + 1; self.d];
        let mut tensor = self.values.clone();
        for (axis, w) in axis_weights.iter().enumerate() {
            tensor = mode_product(&tensor, &shape, axis, w);
            shape[axis] = w.len();
        }
        tensor
    }
}

fn mode_product(t: &[f64], shape: &[usize], axis: usize, w: &[Vec<f64>]) -> Vec<f64> {
    let inner: usize = shape[axis + 1..].iter().product();
    let kdim = shape[axis];
    let outer: usize = shape[..axis].iter().product();
    let g = w.len();
    let mut out = vec![0.0; outer * g * inner];
    out.par_chunks_mut(inner).enumerate().for_each(|(row_idx, row)| {
        let o = row_idx / g;
        let wv = &w[row_idx % g];
        let mut comp = vec![0.0; inner];
        for (k, &wk) in wv.iter().enumerate().take(kdim) {
            if wk == 0.0 {
                continue;
            }
            let src = &t[(o * kdim + k) * inner..(o * kdim + k + 1) * inner];
            for ((s, c), &v) in row.iter_mut().zip(comp.iter_mut()).zip(src) {
                let term = wk * v;
                let sum = *s + term;
                if s.abs() >= term.abs() {
                    *c += (*s - sum) + term;
                } else {
                    *c += (term - sum) + *s;
                }
                *s = sum;
            }
        }
        for (s, c) in row.iter_mut().zip(comp) {
            *s += c;
        }
    });
    out
}

fn check_dims(f: &ScalarField, params: &OperatorParams, x: &[f64]) -> Result<()> {
    if f.d() != params.d() {
        return Err(Error::DimensionMismatch {
            expected: params.d(),
            got: f.d(),
        });
    }
    check_cube(x, params.d())
}

/// An operator bound to one field and degree, with the sample lattice cached
/// so repeated evaluations only pay for the weights and the contraction.
#[derive(Debug, Clone)]
pub struct TensorOperator {
    params: OperatorParams,
    kind: OperatorKind,
    lattice: SampleLattice,
}

impl TensorOperator {
    pub fn new(f: &ScalarField, params: &OperatorParams, kind: OperatorKind) -> Result<Self> {
        if f.d() != params.d() {
            return Err(Error::DimensionMismatch {
                expected: params.d(),
                got: f.d(),
            });
        }
        Ok(Self {
            params: *params,
            kind,
            lattice: SampleLattice::new(f, params.n()),
        })
    }

    pub fn params(&self) -> &OperatorParams {
        &self.params
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        check_cube(x, self.params.d())?;
        let weights: Vec<Vec<f64>> = x.iter().map(|&xi| self.kind.weights(&self.params, xi)).collect();
        Ok(self.lattice.contract_point(&weights))
    }

    /// Values on every grid point, last axis fastest.
    pub fn eval_grid(&self, grid: &Grid) -> Result<Vec<f64>> {
        if grid.dim() != self.params.d() {
            return Err(Error::DimensionMismatch {
                expected: self.params.d(),
                got: grid.dim(),
            });
        }
        let axis_weights = axis_weights(grid, &self.params, self.kind);
        Ok(self.lattice.contract_grid(&axis_weights))
    }
}

fn axis_weights(grid: &Grid, params: &OperatorParams, kind: OperatorKind) -> Vec<Vec<Vec<f64>>> {
    grid.axes()
        .iter()
        .map(|axis| axis.par_iter().map(|&x| kind.weights(params, x)).collect())
        .collect()
}

/// Classical multivariate Bernstein operator `B~_n f(x)`.
pub fn multi_bernstein_apply(f: &ScalarField, n: u32, x: &[f64]) -> Result<f64> {
    let params = OperatorParams::new(n, 0.0, f.d())?;
    check_dims(f, &params, x)?;
    TensorOperator::new(f, &params, OperatorKind::Classical)?.eval(x)
}

/// Exponential operator `G~_n f(x)` as the full `(n+1)^d` sum.
pub fn multi_gn_apply(f: &ScalarField, params: &OperatorParams, x: &[f64]) -> Result<f64> {
    check_dims(f, params, x)?;
    TensorOperator::new(f, params, OperatorKind::Exponential)?.eval(x)
}

/// `G~_n f(x) = e^{mu sum x_i} B~_n(f_mu, (a_n(x_1), ..., a_n(x_d)))` with
/// `f_mu(k/n) = f(k/n) prod_i e^{-mu k_i/n}`.
pub fn multi_gn_via_bernstein(f: &ScalarField, params: &OperatorParams, x: &[f64]) -> Result<f64> {
    check_dims(f, params, x)?;
    let lattice = SampleLattice::new(f, params.n()).damped(params.mu());
    let weights: Vec<Vec<f64>> = x
        .iter()
        .map(|&xi| binomial_pmf_vector(params.n(), params.warp_unchecked(xi)))
        .collect();
    let shift: f64 = x.iter().sum::<f64>() * params.mu();
    Ok(shift.exp() * lattice.contract_point(&weights))
}

/// `G~_n(exp_mu^m, x)` as a product of one-dimensional evaluations.
pub fn multi_gn_power_apply(m: u32, params: &OperatorParams, x: &[f64]) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidParameter("power m must be >= 1".into()));
    }
    check_cube(x, params.d())?;
    let one_d = params.with_d(1)?;
    let f = Function1D::exp_power(params.mu(), m);
    x.iter().map(|&xi| gn_apply(&f, &one_d, xi)).product()
}

fn closed_product(params: &OperatorParams, x: &[f64], one: fn(&OperatorParams, f64) -> f64) -> Result<f64> {
    check_cube(x, params.d())?;
    Ok(x.iter().map(|&xi| one(params, xi)).product())
}

/// `G~_n(e_0, x)` as the product of the per-axis closed forms.
pub fn multi_gn_e0_closed(params: &OperatorParams, x: &[f64]) -> Result<f64> {
    closed_product(params, x, e0_closed_unchecked)
}

pub fn multi_gn_e3_closed(params: &OperatorParams, x: &[f64]) -> Result<f64> {
    closed_product(params, x, exp3_closed_unchecked)
}

pub fn multi_gn_e4_closed(params: &OperatorParams, x: &[f64]) -> Result<f64> {
    closed_product(params, x, exp4_closed_unchecked)
}

/// `G~_n((exp_mu - exp_mu(x))^2, x) = exp_mu(x)^2 (G~_n(e_0, x) - 1)`.
pub fn multi_gn_centered_exp_sq(params: &OperatorParams, x: &[f64]) -> Result<f64> {
    check_cube(x, params.d())?;
    let log_e0: f64 = x.iter().map(|&xi| log_e0_unchecked(params, xi)).sum();
    let s: f64 = x.iter().sum();
    Ok((2.0 * params.mu() * s).exp() * log_e0.exp_m1())
}

/// Operator values on every point of `grid` (last axis fastest). Uses the
/// declared product structure of `f` when present.
pub fn apply_on_grid(
    f: &ScalarField,
    params: &OperatorParams,
    grid: &Grid,
    kind: OperatorKind,
) -> Result<Vec<f64>> {
    if f.d() != params.d() || grid.dim() != params.d() {
        return Err(Error::DimensionMismatch {
            expected: params.d(),
            got: if f.d() != params.d() { f.d() } else { grid.dim() },
        });
    }
    if let Some(factors) = f.separable_factors() {
        let per_axis: Vec<Vec<f64>> = factors
            .iter()
            .zip(grid.axes())
            .map(|(factor, axis)| {
                let samples = factor.samples(params.n());
                axis.par_iter()
                    .map(|&x| compensated_dot(&kind.weights(params, x), &samples))
                    .collect()
            })
            .collect();
        return Ok((0..grid.len())
            .map(|mut idx| {
                let mut v = 1.0;
                for axis in per_axis.iter().rev() {
                    v *= axis[idx % axis.len()];
                    idx /= axis.len();
                }
                v
            })
            .collect());
    }
    TensorOperator::new(f, params, kind)?.eval_grid(grid)
}

/// Field values on every grid point, last axis fastest.
pub fn field_on_grid(f: &ScalarField, grid: &Grid) -> Vec<f64> {
    (0..grid.len()).into_par_iter().map(|i| f.eval(&grid.point(i))).collect()
}

/// `max |f|` over the grid.
pub fn sup_norm_on_grid(f: &ScalarField, grid: &Grid) -> f64 {
    field_on_grid(f, grid).into_iter().map(f64::abs).fold(0.0, f64::max)
}

/// `max |Op_n f(x) - f(x)|` over the grid points.
pub fn sup_error(f: &ScalarField, params: &OperatorParams, grid: &Grid, kind: OperatorKind) -> Result<f64> {
    let approx = apply_on_grid(f, params, grid, kind)?;
    let exact = field_on_grid(f, grid);
    Ok(approx
        .iter()
        .zip(&exact)
        .map(|(a, e)| (a - e).abs())
        .fold(0.0, f64::max))
}

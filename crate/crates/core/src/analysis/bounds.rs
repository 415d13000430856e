use crate::basis::{gamma_n_closed, OperatorParams};
use crate::binom::binomial_pmf_vector;
use crate::error::{check_unit, Error, Result};
use crate::numeric::compensated_sum;
use crate::tensor::{sup_norm_on_grid, Grid, ScalarField};

use super::modulus::ModulusSource;

/// Factor applied to grid estimates of the modulus of continuity before they
/// enter the error bound; grid estimates are biased low.
pub const MODULUS_INFLATION: f64 = 1.1;

/// Right-hand side of the quantitative estimate
/// `(1 + d/2) e^{mu d} w(1/sqrt n) + e^{mu d} |f| mu^2/n + e^{mu d} (1 + mu d) w(1/n)`.
pub fn teoultimo_rhs(params: &OperatorParams, omega_sqrt_n: f64, sup_norm: f64, omega_inv_n: f64) -> f64 {
    let d = params.d() as f64;
    let mu = params.mu();
    let n = params.n() as f64;
    let scale = (mu * d).exp();
    (1.0 + d / 2.0) * scale * omega_sqrt_n
        + scale * sup_norm * mu * mu / n
        + scale * (1.0 + mu * d) * omega_inv_n
}

/// The quantitative error bound for `f` at `params`, with moduli taken from
/// `source` and the sup norm from the field's hint (or the source's grid, or
/// the default grid, when no hint is declared).
pub fn teoultimo_bound(f: &ScalarField, params: &OperatorParams, source: &ModulusSource) -> Result<f64> {
    if f.d() != params.d() {
        return Err(Error::DimensionMismatch {
            expected: params.d(),
            got: f.d(),
        });
    }
    let sup = match f.sup_norm_hint() {
        Some(s) => s,
        None => match source.grid() {
            Some(g) => sup_norm_on_grid(f, g),
            None => sup_norm_on_grid(f, &Grid::default_for(f.d())),
        },
    };
    let n = params.n() as f64;
    let w_sqrt = source.omega(f, 1.0 / n.sqrt())?;
    let w_inv = source.omega(f, 1.0 / n)?;
    Ok(teoultimo_rhs(params, w_sqrt, sup, w_inv))
}

/// Uniform bound on `|G_n(e_0) - 1|` over the cube: `(mu^2/n) sum_{j<d} e^{mu j}`.
pub fn e0_bound(params: &OperatorParams) -> f64 {
    let mu = params.mu();
    let geometric: f64 = (0..params.d()).map(|j| (mu * j as f64).exp()).sum();
    mu * mu / params.n() as f64 * geometric
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailMassCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Mass of `p_{n,k}(a_n(x))` on `|k/n - x| > delta`, against
/// `delta^{-1} / (2 sqrt n) + delta^{-1} gamma_n`.
pub fn tail_mass_bound_check(params: &OperatorParams, x: f64, delta: f64) -> Result<TailMassCheck> {
    check_unit("x", x)?;
    if delta.is_nan() || delta <= 0.0 || delta.is_infinite() {
        return Err(Error::Domain {
            what: "delta",
            value: delta,
            domain: "(0, inf)",
        });
    }
    let n = params.n();
    let nf = n as f64;
    let basis = binomial_pmf_vector(n, params.warp_unchecked(x));
    let lhs = compensated_sum(
        basis
            .iter()
            .enumerate()
            .filter(|(k, _)| (*k as f64 / nf - x).abs() > delta)
            .map(|(_, p)| *p),
    );
    let rhs = (0.5 / nf.sqrt() + gamma_n_closed(params)) / delta;
    Ok(TailMassCheck {
        lhs,
        rhs,
        holds: lhs <= rhs + 1e-12,
    })
}

/// Smallest `n0 <= n_max` with `gamma_n <= mu/n` for every `n` in `n0..=n_max`.
pub fn gamma_threshold(mu: f64, n_max: u32) -> Result<Option<u32>> {
    let mut threshold = None;
    for n in (1..=n_max).rev() {
        let params = OperatorParams::univariate(n, mu)?;
        if gamma_n_closed(&params) > mu / n as f64 {
            break;
        }
        threshold = Some(n);
    }
    Ok(threshold)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WarpShift {
    /// `max_x |(a_n(x_1), ..., a_n(x_d)) - x|_2` over the grid.
    pub max_shift: f64,
    /// `d gamma_n`.
    pub d_gamma: f64,
    /// `d mu / n`.
    pub d_mu_over_n: f64,
}

/// Size of the coordinate-wise warp displacement on a grid.
pub fn warp_shift_check(params: &OperatorParams, grid: &Grid) -> Result<WarpShift> {
    if grid.dim() != params.d() {
        return Err(Error::DimensionMismatch {
            expected: params.d(),
            got: grid.dim(),
        });
    }
    // The Euclidean norm is maximised axis by axis.
    let max_shift = grid
        .axes()
        .iter()
        .map(|axis| {
            axis.iter()
                .map(|&x| {
                    let s = params.warp_unchecked(x) - x;
                    s * s
                })
                .fold(0.0, f64::max)
        })
        .sum::<f64>()
        .sqrt();
    let d = params.d() as f64;
    Ok(WarpShift {
        max_shift,
        d_gamma: d * gamma_n_closed(params),
        d_mu_over_n: d * params.mu() / params.n() as f64,
    })
}

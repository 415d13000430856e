use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::bounds::MODULUS_INFLATION;
use crate::corpus::ModulusFn;
use crate::error::{Error, Result};
use crate::tensor::{field_on_grid, Grid, ScalarField};

/// Relative slack granted to `omega(lambda delta) <= (1 + lambda) omega(delta)`
/// when both sides are grid estimates.
pub const SUBADDITIVITY_TOLERANCE: f64 = 0.05;

const STENCIL_SEED: u64 = 0x00c0_ffee;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModulusMethod {
    DirectionalGrid,
    PairwiseSample,
}

/// A lower estimate of `omega(f, delta) = sup_{|t - x|_2 <= delta} |f(t) - f(x)|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModulusEstimate {
    pub delta: f64,
    pub omega: f64,
    pub method: ModulusMethod,
    pub resolution: Vec<usize>,
}

/// Unit directions of the directional stencil: `+-e_i`, `+-(1,..,1)/sqrt(d)`,
/// `+-(1,-1,1,..)/sqrt(d)` and four fixed pseudo-random directions.
pub fn stencil_directions(d: usize) -> Vec<Vec<f64>> {
    let mut dirs = Vec::with_capacity(2 * d + 8);
    for i in 0..d {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; d];
            e[i] = s;
            dirs.push(e);
        }
    }
    let norm = (d as f64).sqrt();
    let diag: Vec<f64> = vec![1.0 / norm; d];
    let alt: Vec<f64> = (0..d).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 } / norm).collect();
    for v in [diag, alt] {
        dirs.push(v.iter().map(|c| -c).collect());
        dirs.push(v);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(STENCIL_SEED);
    while dirs.len() < 2 * d + 8 {
        let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let len = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if len > 1e-3 {
            dirs.push(v.into_iter().map(|c| c / len).collect());
        }
    }
    dirs
}

fn check_inputs(f: &ScalarField, delta: f64, grid: &Grid) -> Result<()> {
    if delta.is_nan() || delta <= 0.0 || delta.is_infinite() {
        return Err(Error::Domain {
            what: "delta",
            value: delta,
            domain: "(0, inf)",
        });
    }
    if grid.dim() != f.d() {
        return Err(Error::DimensionMismatch {
            expected: f.d(),
            got: grid.dim(),
        });
    }
    Ok(())
}

/// Directional-stencil estimate of `omega(f, delta)`: for every grid point
/// `x`, compares `f(x)` with `f` at `x + r u` for every stencil direction `u`
/// and `r` in `{delta/2, delta}`, the shifted point projected back onto the
/// cube. Projection does not increase the distance to `x`, so the result is a
/// lower bound of the true modulus.
pub fn modulus(f: &ScalarField, delta: f64, grid: &Grid) -> Result<ModulusEstimate> {
    check_inputs(f, delta, grid)?;
    let offsets: Vec<Vec<f64>> = stencil_directions(f.d())
        .into_iter()
        .flat_map(|u| [0.5 * delta, delta].map(|r| u.iter().map(|c| c * r).collect::<Vec<_>>()))
        .collect();
    let omega = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let x = grid.point(i);
            let fx = f.eval(&x);
            let mut t = vec![0.0; x.len()];
            offsets
                .iter()
                .map(|h| {
                    for ((ti, xi), hi) in t.iter_mut().zip(&x).zip(h) {
                        *ti = (xi + hi).clamp(0.0, 1.0);
                    }
                    (f.eval(&t) - fx).abs()
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    Ok(ModulusEstimate {
        delta,
        omega,
        method: ModulusMethod::DirectionalGrid,
        resolution: grid.resolution(),
    })
}

/// Estimate of `omega(f, delta)` from all pairs of grid points at Euclidean
/// distance at most `delta`. Monotone in `delta` by construction; zero when
/// `delta` is below the grid spacing.
pub fn modulus_pairwise(f: &ScalarField, delta: f64, grid: &Grid) -> Result<ModulusEstimate> {
    check_inputs(f, delta, grid)?;
    let values = field_on_grid(f, grid);
    let axes = grid.axes();
    let d = axes.len();
    let dims = grid.resolution();
    let delta_sq = delta * delta;
    let omega = (0..grid.len())
        .into_par_iter()
        .map(|flat| {
            let mut idx = vec![0usize; d];
            let mut rem = flat;
            for i in (0..d).rev() {
                idx[i] = rem % dims[i];
                rem /= dims[i];
            }
            let ranges: Vec<(usize, usize)> = (0..d)
                .map(|i| {
                    let xi = axes[i][idx[i]];
                    let lo = axes[i].partition_point(|&v| v < xi - delta);
                    let hi = axes[i].partition_point(|&v| v <= xi + delta);
                    (lo, hi)
                })
                .collect();
            let fx = values[flat];
            let mut best = 0.0f64;
            let mut cur: Vec<usize> = ranges.iter().map(|r| r.0).collect();
            loop {
                let dist_sq: f64 = (0..d)
                    .map(|i| {
                        let diff = axes[i][cur[i]] - axes[i][idx[i]];
                        diff * diff
                    })
                    .sum();
                if dist_sq <= delta_sq {
                    let other = cur.iter().zip(&dims).fold(0usize, |acc, (&c, &n)| acc * n + c);
                    best = best.max((values[other] - fx).abs());
                }
                let mut axis = d;
                loop {
                    if axis == 0 {
                        return best;
                    }
                    axis -= 1;
                    cur[axis] += 1;
                    if cur[axis] < ranges[axis].1 {
                        break;
                    }
                    cur[axis] = ranges[axis].0;
                }
            }
        })
        .reduce(|| 0.0, f64::max);
    Ok(ModulusEstimate {
        delta,
        omega,
        method: ModulusMethod::PairwiseSample,
        resolution: grid.resolution(),
    })
}

/// Whether the grid estimates satisfy `omega(lambda delta) <= (1 + lambda) omega(delta)`
/// up to [`SUBADDITIVITY_TOLERANCE`].
pub fn modulus_subadditivity_check(f: &ScalarField, delta: f64, lambda: f64, grid: &Grid) -> Result<bool> {
    if lambda.is_nan() || lambda <= 0.0 || lambda.is_infinite() {
        return Err(Error::Domain {
            what: "lambda",
            value: lambda,
            domain: "(0, inf)",
        });
    }
    let wide = modulus(f, lambda * delta, grid)?.omega;
    let narrow = modulus(f, delta, grid)?.omega;
    Ok(wide <= (1.0 + lambda) * narrow * (1.0 + SUBADDITIVITY_TOLERANCE))
}

/// Where the bound takes its moduli of continuity from.
#[derive(Clone)]
pub enum ModulusSource {
    /// A closed-form `delta -> omega(f, delta)`.
    Exact(ModulusFn),
    /// Directional-stencil estimates on `grid`, multiplied by `inflation`.
    Estimated { grid: Grid, inflation: f64 },
}

impl ModulusSource {
    /// Directional estimates on `grid`, inflated by [`MODULUS_INFLATION`].
    pub fn estimated(grid: Grid) -> Self {
        ModulusSource::Estimated {
            grid,
            inflation: MODULUS_INFLATION,
        }
    }

    pub fn omega(&self, f: &ScalarField, delta: f64) -> Result<f64> {
        match self {
            ModulusSource::Exact(omega) => Ok(omega(delta)),
            ModulusSource::Estimated { grid, inflation } => Ok(modulus(f, delta, grid)?.omega * inflation),
        }
    }

    pub fn grid(&self) -> Option<&Grid> {
        match self {
            ModulusSource::Exact(_) => None,
            ModulusSource::Estimated { grid, .. } => Some(grid),
        }
    }
}

impl std::fmt::Debug for ModulusSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModulusSource::Exact(_) => f.write_str("Exact(..)"),
            ModulusSource::Estimated { grid, inflation } => f
                .debug_struct("Estimated")
                .field("resolution", &grid.resolution())
                .field("inflation", inflation)
                .finish(),
        }
    }
}

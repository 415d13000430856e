use crate::error::{check_cube, Result};

/// Witness `h(x) = sum_i (e^{mu (x_i - xt_i)} - 1)^2`, which expands to
/// `d - 2 sum_i e^{mu(x_i - xt_i)} + sum_i e^{2 mu (x_i - xt_i)}`. Nonnegative,
/// and zero only at `x = x_tilde` when `mu > 0`.
pub fn korovkin_witness(x_tilde: &[f64], x: &[f64], mu: f64) -> Result<f64> {
    check_cube(x_tilde, x_tilde.len())?;
    check_cube(x, x_tilde.len())?;
    Ok(x.iter()
        .zip(x_tilde)
        .map(|(xi, ti)| {
            let e = (mu * (xi - ti)).exp_m1();
            e * e
        })
        .sum())
}

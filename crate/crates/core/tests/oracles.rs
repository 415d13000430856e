mod common;

use common::*;
use expobern::analysis::korovkin_witness;
use expobern::*;
use num::rational::BigRational;
use num::{BigInt, Signed, ToPrimitive, Zero};
use rand::Rng;

#[test]
fn central_binomial_at_degree_1000() {
    let exact = BigRational::new(
        BigInt::from(binomial_exact(1000, 500)),
        BigInt::from(2u8).pow(1000),
    )
    .to_f64()
    .unwrap();
    let got = bernstein_basis(1000, 500, 0.5).unwrap();
    assert!(rel_err(got, exact) < 1e-12, "{got} vs {exact}");
}

#[test]
fn basis_matches_rational_pmf() {
    for n in [1u32, 5, 17, 60, 150, 400] {
        for num in [0i64, 1, 7, 32, 45, 63, 64] {
            let t = rational(num, 64);
            let tf = num as f64 / 64.0;
            for k in 0..=n {
                let exact = pmf_rational(n, k, &t).to_f64().unwrap();
                let got = bernstein_basis(n, k, tf).unwrap();
                if exact < 1e-290 {
                    assert!(got < 1e-280);
                } else {
                    assert!(rel_err(got, exact) < 1e-12, "n={n} k={k} t={tf}: {got} vs {exact}");
                }
            }
        }
    }
}

#[test]
fn warp_against_series_oracle_at_large_degree() {
    let n = 1_000_000u32;
    let x = 0.3;
    let params = OperatorParams::univariate(n, 1.0).unwrap();
    let xr = BigRational::from_float(x).unwrap();
    let nr = BigRational::from_integer(BigInt::from(n));
    let num = expm1_rational(&(xr / &nr), 8);
    let den = expm1_rational(&(BigRational::from_integer(BigInt::from(1)) / nr), 8);
    let exact = (num / den).to_f64().unwrap();
    let got = warp(&params, x).unwrap();
    assert!((got - exact).abs() < 1e-9);
    assert!(rel_err(got, exact) < 1e-14, "{got} vs {exact}");
    // first-order correction: a_n(x) ~ x - mu x (1-x) / (2n)
    assert!((got - (x - x * (1.0 - x) / (2.0 * n as f64))).abs() < 1e-12);
}

#[test]
fn first_moment_exact_rational() {
    let n = 9u32;
    let x = 1.0 / 3.0;
    let xr = BigRational::from_float(x).unwrap();
    let mut exact = BigRational::zero();
    for k in 0..=n {
        let dist = (rational(k as i64, n as i64) - &xr).abs();
        exact += dist * pmf_rational(n, k, &xr);
    }
    let params = OperatorParams::univariate(n, 0.0).unwrap();
    let got = first_moment(&params, x).unwrap();
    assert!(rel_err(got, exact.to_f64().unwrap()) < 1e-14);
    assert!(got <= 0.5 / (n as f64).sqrt());
}

#[test]
fn bernstein_of_square_at_half() {
    let f = Function1D::new("sq", |t| t * t);
    assert_eq!(bernstein_apply(&f, 2, 0.5).unwrap(), 0.375);
    // exact rational sum: (0 + 2 * 1/4 * 1/2 + 1 * 1/4) = 3/8
    let mut exact = BigRational::zero();
    for k in 0..=2u32 {
        exact += pow(&rational(k as i64, 2), 2) * pmf_rational(2, k, &rational(1, 2));
    }
    assert_eq!(exact, rational(3, 8));
}

#[test]
fn operator_sums_match_naive_sums() {
    let mut r = rng(11);
    for _ in 0..64 {
        let n = r.gen_range(1..=100);
        let mu = r.gen_range(0.05..3.0);
        let x = r.gen::<f64>();
        let params = OperatorParams::univariate(n, mu).unwrap();
        let f = Function1D::new("cos", |t| (3.0 * t).cos() + 2.0);
        let expected = gn_naive(|t| (3.0 * t).cos() + 2.0, n, mu, x);
        assert!(rel_err(gn_apply(&f, &params, x).unwrap(), expected) < 1e-11);
        assert!(rel_err(gn_via_bernstein(&f, &params, x).unwrap(), expected) < 1e-11);
    }
}

#[test]
fn closed_forms_match_naive_sums() {
    let mut r = rng(12);
    for _ in 0..64 {
        let n = r.gen_range(1..=100);
        let mu = r.gen_range(0.05..3.0);
        let x = r.gen::<f64>();
        let params = OperatorParams::univariate(n, mu).unwrap();
        let e0 = gn_naive(|_| 1.0, n, mu, x);
        let e3 = gn_naive(|t| (3.0 * mu * t).exp(), n, mu, x);
        let e4 = gn_naive(|t| (4.0 * mu * t).exp(), n, mu, x);
        assert!(rel_err(gn_e0_closed(&params, x).unwrap(), e0) < 1e-11, "e0 n={n} mu={mu} x={x}");
        assert!(rel_err(gn_exp3_closed(&params, x).unwrap(), e3) < 1e-11, "e3 n={n} mu={mu} x={x}");
        assert!(rel_err(gn_exp4_closed(&params, x).unwrap(), e4) < 1e-11, "e4 n={n} mu={mu} x={x}");
    }
}

#[test]
fn centered_square_matches_direct_sum() {
    let (n, mu, x) = (50u32, 1.0, 0.5);
    let params = OperatorParams::univariate(n, mu).unwrap();
    let ex = (mu * x).exp();
    let direct = gn_naive(|t| ((mu * t).exp() - ex).powi(2), n, mu, x);
    assert!(rel_err(gn_centered_exp_sq(&params, x).unwrap(), direct) < 1e-11);
    let params2 = OperatorParams::new(40, 1.0, 2).unwrap();
    let p = [0.5, 0.5];
    let s = mu * (p[0] + p[1]);
    let f = move |y: &[f64]| ((mu * (y[0] + y[1])).exp() - s.exp()).powi(2);
    let direct2 = multi_gn_naive(&f, 40, mu, &p);
    assert!(rel_err(multi_gn_centered_exp_sq(&params2, &p).unwrap(), direct2) < 1e-11);
}

#[test]
fn lattice_contraction_matches_recursive_oracle() {
    let mut r = rng(13);
    let g = |y: &[f64]| (y[0] + 2.0 * y[1]).sin() + y[0] * y[0] * y[1];
    let field = ScalarField::new("g", 2, move |y: &[f64]| (y[0] + 2.0 * y[1]).sin() + y[0] * y[0] * y[1]);
    for n in 1..=8u32 {
        for _ in 0..8 {
            let mu = r.gen_range(0.0..2.5);
            let x = random_point(&mut r, 2);
            let params = OperatorParams::new(n, mu, 2).unwrap();
            let expected = multi_gn_naive(&g, n, mu, &x);
            let got = multi_gn_apply(&field, &params, &x).unwrap();
            assert!((got - expected).abs() < 1e-13 * (1.0 + expected.abs()), "n={n}");
            let via = multi_gn_via_bernstein(&field, &params, &x).unwrap();
            assert!((via - expected).abs() < 1e-13 * (1.0 + expected.abs()));
        }
    }
}

#[test]
fn three_dimensional_contraction_matches_recursive_oracle() {
    let mut r = rng(14);
    let g = |y: &[f64]| (y[0] * y[1] - y[2]).cos() + y[2];
    let field = ScalarField::new("g3", 3, move |y: &[f64]| (y[0] * y[1] - y[2]).cos() + y[2]);
    for n in [1u32, 3, 6, 8] {
        let mu = r.gen_range(0.1..2.0);
        let x = random_point(&mut r, 3);
        let params = OperatorParams::new(n, mu, 3).unwrap();
        let expected = multi_gn_naive(&g, n, mu, &x);
        let got = multi_gn_apply(&field, &params, &x).unwrap();
        assert!((got - expected).abs() < 1e-13 * (1.0 + expected.abs()));
    }
}

#[test]
fn multi_closed_forms_match_brute_force() {
    let params = OperatorParams::new(30, 1.0, 2).unwrap();
    let x = [0.2, 0.9];
    let e0 = multi_gn_naive(&|_: &[f64]| 1.0, 30, 1.0, &x);
    assert!(rel_err(multi_gn_e0_closed(&params, &x).unwrap(), e0) < 1e-11);

    let mut r = rng(15);
    for _ in 0..32 {
        let d = r.gen_range(2..=3usize);
        let n = r.gen_range(1..=20u32);
        let mu = r.gen_range(0.1..2.0);
        let x = random_point(&mut r, d);
        let params = OperatorParams::new(n, mu, d).unwrap();
        let e3 = multi_gn_naive(&|y: &[f64]| (3.0 * mu * y.iter().sum::<f64>()).exp(), n, mu, &x);
        let e4 = multi_gn_naive(&|y: &[f64]| (4.0 * mu * y.iter().sum::<f64>()).exp(), n, mu, &x);
        assert!(rel_err(multi_gn_e3_closed(&params, &x).unwrap(), e3) < 1e-11);
        assert!(rel_err(multi_gn_e4_closed(&params, &x).unwrap(), e4) < 1e-11);
        assert!(rel_err(multi_gn_power_apply(3, &params, &x).unwrap(), e3) < 1e-11);
    }
}

#[test]
fn witness_matches_three_term_expansion() {
    let mut r = rng(16);
    for _ in 0..2000 {
        let d = r.gen_range(1..=3usize);
        let mu = r.gen_range(0.01..3.0);
        let xt = random_point(&mut r, d);
        let x = random_point(&mut r, d);
        let h = korovkin_witness(&xt, &x, mu).unwrap();
        let (mut s1, mut s2) = (0.0, 0.0);
        for (xi, ti) in x.iter().zip(&xt) {
            s1 += (mu * (xi - ti)).exp();
            s2 += (2.0 * mu * (xi - ti)).exp();
        }
        let three_term = d as f64 - 2.0 * s1 + s2;
        assert!((h - three_term).abs() <= 1e-12 * (d as f64 + s2), "{h} vs {three_term}");
    }
}

#[test]
fn gamma_grid_oracle_for_degree_one() {
    let params = OperatorParams::univariate(1, 1.0).unwrap();
    let e = std::f64::consts::E;
    // maximizer of x - (e^x - 1)/(e - 1) solves e^x = e - 1
    let xs = (e - 1.0).ln();
    let exact = xs - (xs.exp() - 1.0) / (e - 1.0);
    assert!((gamma_n_grid(&params, 1000).unwrap() - exact).abs() < 1e-10);
    assert!((gamma_n_closed(&params) - exact).abs() < 1e-12);
}

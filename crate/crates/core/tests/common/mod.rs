//! Independent reference implementations used by the integration tests.
//! Nothing here calls into the library's numerical kernels.
#![allow(dead_code)]

use num::bigint::{BigInt, BigUint};
use num::rational::BigRational;
use num::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn binomial_exact(n: u32, k: u32) -> BigUint {
    let mut c = BigUint::one();
    for i in 0..k {
        c = c * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    c
}

pub fn binomial_f64(n: u32, k: u32) -> f64 {
    binomial_exact(n, k).to_f64().unwrap()
}

/// `C(n,k) t^k (1-t)^{n-k}` in exact rational arithmetic.
pub fn pmf_rational(n: u32, k: u32, t: &BigRational) -> BigRational {
    let c = BigRational::from_integer(BigInt::from(binomial_exact(n, k)));
    let q = BigRational::one() - t;
    c * pow(t, k) * pow(&q, n - k)
}

pub fn pow(x: &BigRational, e: u32) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..e {
        acc *= x;
    }
    acc
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// `e^z - 1` by its Taylor series, truncated after `terms` terms.
pub fn expm1_rational(z: &BigRational, terms: u32) -> BigRational {
    let mut term = BigRational::one();
    let mut sum = BigRational::zero();
    for j in 1..=terms {
        term = term * z / BigRational::from_integer(BigInt::from(j));
        sum += &term;
    }
    sum
}

/// Direct `C(n,k) t^k (1-t)^{n-k}` in f64.
pub fn pmf_naive(n: u32, k: u32, t: f64) -> f64 {
    binomial_f64(n, k) * t.powi(k as i32) * (1.0 - t).powi((n - k) as i32)
}

pub fn warp_naive(n: u32, mu: f64, x: f64) -> f64 {
    if mu == 0.0 {
        x
    } else {
        (mu * x / n as f64).exp_m1() / (mu / n as f64).exp_m1()
    }
}

/// Per-axis weights `e^{-mu k/n} e^{mu x} p_{n,k}(a_n(x))`.
pub fn gn_weights_naive(n: u32, mu: f64, x: f64) -> Vec<f64> {
    let a = warp_naive(n, mu, x);
    (0..=n)
        .map(|k| (mu * (x - k as f64 / n as f64)).exp() * pmf_naive(n, k, a))
        .collect()
}

/// One-dimensional exponential operator as a plain sum.
pub fn gn_naive(f: impl Fn(f64) -> f64, n: u32, mu: f64, x: f64) -> f64 {
    gn_weights_naive(n, mu, x)
        .iter()
        .enumerate()
        .map(|(k, w)| w * f(k as f64 / n as f64))
        .sum()
}

/// `sum_{k_1..k_d} f(k/n) prod_i weights[i][k_i]`, recursing one axis at a time.
pub fn recursive_sum(f: &dyn Fn(&[f64]) -> f64, weights: &[Vec<f64>], n: u32) -> f64 {
    fn go(f: &dyn Fn(&[f64]) -> f64, weights: &[Vec<f64>], n: u32, prefix: &mut Vec<f64>, scale: f64) -> f64 {
        let axis = prefix.len();
        if axis == weights.len() {
            return scale * f(prefix);
        }
        let mut total = 0.0;
        for (k, w) in weights[axis].iter().enumerate() {
            prefix.push(k as f64 / n as f64);
            total += go(f, weights, n, prefix, scale * w);
            prefix.pop();
        }
        total
    }
    go(f, weights, n, &mut Vec::with_capacity(weights.len()), 1.0)
}

pub fn multi_gn_naive(f: &dyn Fn(&[f64]) -> f64, n: u32, mu: f64, x: &[f64]) -> f64 {
    let weights: Vec<Vec<f64>> = x.iter().map(|&xi| gn_weights_naive(n, mu, xi)).collect();
    recursive_sum(f, &weights, n)
}

pub fn random_point(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    (0..d).map(|_| rng.gen::<f64>()).collect()
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

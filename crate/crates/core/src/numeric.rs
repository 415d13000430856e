//! Small floating-point kernels shared by the operator code: compensated
//! summation, cancellation-free exponential/logarithm combinations and a
//! golden-section line search.

use std::ops::AddAssign;

/// Kahan-Babuska-Neumaier running sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl AddAssign<f64> for NeumaierSum {
    fn add_assign(&mut self, rhs: f64) {
        self.add(rhs);
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = NeumaierSum::new();
        for v in iter {
            s.add(v);
        }
        s
    }
}

/// Compensated sum of an iterator.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<NeumaierSum>().value()
}

/// Compensated dot product of two equally long slices.
pub fn compensated_dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    compensated_sum(a.iter().zip(b).map(|(x, y)| x * y))
}

/// `expm1(y) / y - 1`, i.e. `y/2! + y^2/3! + ...`, without cancellation near 0.
pub fn expm1_ratio_excess(y: f64) -> f64 {
    if y == 0.0 {
        return 0.0;
    }
    if y.abs() < 0.5 {
        let mut term = 1.0;
        let mut sum = 0.0;
        for j in 1..40 {
            term *= y / (j + 1) as f64;
            let next = sum + term;
            if next == sum {
                break;
            }
            sum = next;
        }
        sum
    } else {
        (y.exp_m1() - y) / y
    }
}

/// `ln(1 + u) - u / (1 + u)` for `u > -1`, cancellation-free near 0.
///
/// The series is `sum_{j>=2} (-1)^j (j - 1)/j u^j`.
pub fn ln1p_minus_ratio(u: f64) -> f64 {
    if u.abs() < 0.25 {
        let mut pow = u;
        let mut sum = 0.0;
        for j in 2..80 {
            pow *= u;
            let jf = j as f64;
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            let next = sum + sign * (jf - 1.0) / jf * pow;
            if next == sum {
                break;
            }
            sum = next;
        }
        sum
    } else {
        u.ln_1p() - u / (1.0 + u)
    }
}

/// Golden-section search for a maximum of a unimodal `f` on `[a, b]`.
///
/// Returns `(x_max, f_max)`. Stops once the bracket is narrower than `tol`
/// or after `max_iter` shrink steps.
pub fn golden_section_max(
    f: impl Fn(f64) -> f64,
    mut a: f64,
    mut b: f64,
    tol: f64,
    max_iter: usize,
) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;

    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..max_iter {
        if (b - a).abs() <= tol {
            break;
        }
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    let (fa, fb) = (f(a), f(b));
    [(x1, f1), (x2, f2), (a, fa), (b, fb)]
        .into_iter()
        .fold((a, f64::NEG_INFINITY), |best, c| if c.1 > best.1 { c } else { best })
}
